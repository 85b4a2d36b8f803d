use revhardy::hardy::*;
use revhardy::radial::*;
use revhardy::spaces::PolarSpace;
use revhardy::quadrature::*;

fn main() {
    let space = PolarSpace::euclidean(1).unwrap();
    let e = make_exponents(-1.0, -1.0).unwrap();
    let w = WeightPair::powers(-2.0, -3.0);
    let f = PiecewisePowerFunction::new(-4.3100, -1.2685, 4.0846, 1.0).unwrap().profile();
    let cfg = QuadratureConfig::default();
    println!("rhs: {:?}", hardy_rhs(&space, &f, &w.v, e.p, &cfg));
    println!("lhs: {:?}", conjugate_hardy_lhs(&space, &f, &w.u, e.q, &cfg));
    // replicate: G cumulative then outer by hand with probes
    let norm = f.eval(1.0);
    let fn_ = f.scaled(1.0 / norm);
    let g_cum = CumulativeIntegral::from_infinity(
        |r| 2.0 * fn_.eval(r),
        EndpointHint::Power(-1.2685),
        f64::INFINITY,
        default_grid(&fn_.breakpoints()),
        &cfg,
    ).unwrap();
    for &r in &[1e-260_f64, 1e-100, 1e-10, 1.0, 4.0, 1e10, 1e100, 1e249, 1e260, 1e280] {
        let g = g_cum.eval(r);
        match g {
            Ok(v) => println!("G({r:e}) = {v:e}"),
            Err(e2) => println!("G({r:e}) = ERR {e2}"),
        }
    }
}
