//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! and enforcing its runtime budget. Run with
//! `cargo test -p revhardy --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::panic::AssertUnwindSafe;
use std::time::{Duration, Instant};

use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revhardy::bilinear::{
    chain_check, generate_sw_family, sw_lower_constant, sw_param_check, verify_sw, FormRegion,
    SwCase, SwVerifyOptions, WARN_FULL_FORM_DIVERGES,
};
use revhardy::closedform::{hardy_constant_conjugate, hardy_constant_direct, solve_beta, PowerParams};
use revhardy::config::{run, CommandKind, GridSpec, RunConfig};
use revhardy::hardy::{
    admissible_window, conjugate, d1_profile, d2_profile, eq_factor, generate_family,
    make_exponents, proof_identity_check, reverse_holder_check, verify_hardy, FamilySpec,
    HardyKind, MonotoneVerdict, VerifyOptions,
};
use revhardy::quadrature::QuadratureConfig;
use revhardy::radial::{PiecewisePowerFunction, RadialProfile, WeightPair};
use revhardy::report::Verdict;
use revhardy::spaces::{
    ball_volume_mc, ball_volume_quadrature, sphere_area_quadrature, HomogeneousGroup, PolarSpace,
    Space,
};

fn criterion(number: u32, description: &str, limit: Duration, body: impl FnOnce()) {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    match outcome {
        Ok(()) => {
            println!(
                "criterion {number}: PASS — {description} ({:.2}s, budget {:.0}s)",
                elapsed.as_secs_f64(),
                limit.as_secs_f64()
            );
            assert!(
                elapsed < limit,
                "criterion {number} exceeded its runtime budget: {elapsed:?} >= {limit:?}"
            );
        }
        Err(cause) => {
            println!(
                "criterion {number}: FAIL — {description} ({:.2}s)",
                elapsed.as_secs_f64()
            );
            std::panic::resume_unwind(cause);
        }
    }
}

fn line() -> PolarSpace {
    PolarSpace::euclidean(1).unwrap()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn criterion_01_direct_constant_reproduction() {
    criterion(
        1,
        "closed-form direct constant reproduced by quadrature",
        Duration::from_secs(5),
        || {
            let space = line();
            let exps = make_exponents(-1.0, -1.0).unwrap();
            let weights = WeightPair::powers(0.0, -1.0);
            let radii = [0.01, 0.1, 1.0, 10.0, 100.0];
            let profile = d1_profile(&space, &weights, &exps, &radii, &cfg()).unwrap();
            for v in &profile.values {
                assert_relative_eq!(*v, 8.0, max_relative = 1e-6);
            }
            let params = PowerParams::new(1.0, 2.0, 0.0, -1.0, exps).unwrap();
            let c = hardy_constant_direct(&params).unwrap();
            assert_relative_eq!(c.c_lower, 2.0, max_relative = 1e-9);
            assert_relative_eq!(c.c_upper, 8.0, max_relative = 1e-9);

            // 20-point (p, q, alpha) grid with beta solved from balance.
            let p_values = [-0.5, -1.0, -1.5, -2.5];
            let q_offsets = [0.0, 0.5, 1.5, 3.0, 6.0];
            let alphas = [-0.5, 0.0, 0.7, 1.8, 3.0];
            let mut max_dev: f64 = 0.0;
            let mut tuples = 0;
            for (i, &p) in p_values.iter().enumerate() {
                for (j, &dq) in q_offsets.iter().enumerate() {
                    let alpha = alphas[(i + j) % alphas.len()];
                    let exps = make_exponents(p, p - dq).unwrap();
                    let beta = solve_beta(alpha, 1.0, &exps);
                    let params = PowerParams::new(1.0, 2.0, alpha, beta, exps).unwrap();
                    let closed = hardy_constant_direct(&params).unwrap();
                    let weights = WeightPair::powers(alpha, beta);
                    let profile =
                        d1_profile(&space, &weights, &exps, &radii, &cfg()).unwrap();
                    for v in &profile.values {
                        max_dev = max_dev.max((v - closed.d).abs() / closed.d);
                    }
                    assert_eq!(profile.monotone_verdict, MonotoneVerdict::NonDecreasing);
                    tuples += 1;
                }
            }
            assert_eq!(tuples, 20);
            assert!(max_dev <= 1e-5, "max relative deviation {max_dev}");
        },
    );
}

#[test]
fn criterion_02_conjugate_constant_reproduction() {
    criterion(
        2,
        "closed-form conjugate constant reproduced by quadrature",
        Duration::from_secs(5),
        || {
            let space = line();
            let exps = make_exponents(-1.0, -1.0).unwrap();
            let weights = WeightPair::powers(-2.0, -3.0);
            let radii = [0.01, 0.1, 1.0, 10.0, 100.0];
            let profile = d2_profile(&space, &weights, &exps, &radii, &cfg()).unwrap();
            for v in &profile.values {
                assert_relative_eq!(*v, 8.0, max_relative = 1e-6);
            }
            assert_eq!(profile.monotone_verdict, MonotoneVerdict::NonIncreasing);
            let params = PowerParams::new(1.0, 2.0, -2.0, -3.0, exps).unwrap();
            let c = hardy_constant_conjugate(&params).unwrap();
            assert_relative_eq!(c.d, 8.0, max_relative = 1e-9);
            assert_relative_eq!(c.c_lower, 2.0, max_relative = 1e-9);
        },
    );
}

#[test]
fn criterion_03_hardy_lower_bound_family() {
    criterion(
        3,
        "every admissible family ratio clears the certified lower bound",
        Duration::from_secs(60),
        || {
            let space = line();
            let exps = make_exponents(-1.0, -1.0).unwrap();
            let weights = WeightPair::powers(0.0, -1.0);
            let windows =
                admissible_window(&space, &weights, &exps, HardyKind::Direct).unwrap();
            let family = generate_family(
                &windows,
                &FamilySpec {
                    count: 50,
                    seed: 7,
                    breakpoint_range: (0.1, 10.0),
                },
            );
            assert_eq!(family.len(), 50);
            let opts = VerifyOptions::default();
            let report = verify_hardy(&space, &weights, &exps, &family, &opts).unwrap();
            assert_eq!(report.verdict, Verdict::Verified);
            assert_eq!(report.ratios.len(), 50);
            for entry in &report.ratios {
                assert!(
                    entry.ratio >= 2.0 * (1.0 - 1e-6),
                    "ratio {} fell below the lower bound",
                    entry.ratio
                );
            }
            let extremal_min = report.extremal_min.unwrap();
            assert!(
                extremal_min <= 8.0 * (1.0 + 1e-2),
                "extremal minimum {extremal_min}"
            );
            assert_eq!(report.extremal.len(), 3);
        },
    );
}

#[test]
fn criterion_04_proof_identity() {
    criterion(
        4,
        "cumulative identity H1(t) = p' h(t)^p across power weights",
        Duration::from_secs(10),
        || {
            let space = line();
            let t_grid: Vec<f64> = (0..10)
                .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 9.0))
                .collect();
            let cases = [
                (-1.0f64, -1.0f64),
                (-0.5, -1.5),
                (0.0, -2.0),
                (0.7, -1.0),
                (2.0, -0.8),
            ];
            for &(beta, p) in &cases {
                let exps = make_exponents(p, p).unwrap();
                let report = proof_identity_check(
                    &space,
                    &RadialProfile::power(beta),
                    &exps,
                    &t_grid,
                    &cfg(),
                )
                .unwrap();
                assert!(
                    report.holds,
                    "beta {beta}, p {p}: max deviation {}",
                    report.max_rel_deviation
                );
                assert!(report.max_rel_deviation <= 1e-6);
            }
        },
    );
}

#[test]
fn criterion_05_reverse_holder() {
    criterion(
        5,
        "reverse Holder on 1000 seeded pairs plus 10 equality cases",
        Duration::from_secs(30),
        || {
            let space = line();
            let mut rng = ChaCha8Rng::seed_from_u64(505);
            let quad = cfg();
            for i in 0..1000 {
                let p = -(0.3 + 2.7 * rng.gen::<f64>());
                let pc = conjugate(p);
                let inv_p = 1.0 / p.abs();
                // f needs \int f^p finite: head below 1/|p|, tail above.
                let s0 = inv_p - 0.05 - 2.0 * rng.gen::<f64>();
                let s_inf = inv_p + 0.05 + 2.0 * rng.gen::<f64>();
                // g needs \int g^{p'} finite plus joint integrability of fg.
                let g_head_floor = (-1.0 / pc + 0.05).max(-1.0 - s0 + 0.05);
                let t0 = g_head_floor + 2.0 * rng.gen::<f64>();
                let g_tail_cap = (-1.0 / pc - 0.05).min(-1.0 - s_inf - 0.05);
                let t_inf = g_tail_cap - 2.0 * rng.gen::<f64>();
                let bp_f = 10f64.powf(rng.gen::<f64>() * 2.0 - 1.0);
                let bp_g = 10f64.powf(rng.gen::<f64>() * 2.0 - 1.0);
                let f = PiecewisePowerFunction::new(s0, s_inf, bp_f, 1.0)
                    .unwrap()
                    .profile();
                let g = PiecewisePowerFunction::new(t0, t_inf, bp_g, 1.0)
                    .unwrap()
                    .profile();
                let check = reverse_holder_check(&space, &f, &g, p, &quad).unwrap();
                assert!(
                    check.lhs >= check.rhs * (1.0 - 1e-10),
                    "pair {i}: lhs {} rhs {}",
                    check.lhs,
                    check.rhs
                );
            }
            // Constructed equality cases f^p = c g^{p'}.
            for i in 0..10 {
                let p = -(0.4 + 0.25 * i as f64);
                let pc = conjugate(p);
                let t0 = -1.0 / pc + 0.3;
                let t_inf = -1.0 / pc - 0.4 - 0.1 * i as f64;
                let g = PiecewisePowerFunction::new(t0, t_inf, 1.0 + 0.2 * i as f64, 0.8)
                    .unwrap()
                    .profile();
                let c = 0.5 + 0.3 * i as f64;
                let f = g.powered(pc / p).unwrap().scaled(c.powf(1.0 / p));
                let check = reverse_holder_check(&space, &f, &g, p, &quad).unwrap();
                assert_relative_eq!(check.lhs, check.rhs, max_relative = 1e-8);
            }
        },
    );
}

#[test]
fn criterion_06_lower_factor_grid() {
    criterion(
        6,
        "|p|^{1/q} (p')^{1/p'} <= 1 on a 10^4-point exponent grid",
        Duration::from_secs(1),
        || {
            let mut checked = 0;
            for i in 0..100 {
                // p log-spaced over [-1000, -0.001].
                let p = -10f64.powf(3.0 - 6.0 * i as f64 / 99.0);
                for j in 0..100 {
                    // q = p * m with m >= 1 keeps q <= p < 0.
                    let m = 1.0 + 9.0 * j as f64 / 99.0;
                    let exps = make_exponents(p, p * m).unwrap();
                    let factor = eq_factor(&exps);
                    assert!(
                        factor <= 1.0 + 1e-12,
                        "factor {factor} at p = {p}, q = {}",
                        p * m
                    );
                    checked += 1;
                }
            }
            assert_eq!(checked, 10_000);
        },
    );
}

#[test]
fn criterion_07_sphere_areas_and_dilation_scaling() {
    criterion(
        7,
        "sphere measures by quadrature and Monte Carlo, dilation volume law",
        Duration::from_secs(60),
        || {
            use std::f64::consts::PI;
            for (n, expected) in [(1usize, 2.0), (2, 2.0 * PI), (3, 4.0 * PI)] {
                let group = HomogeneousGroup::abelian(n).unwrap();
                let area = sphere_area_quadrature(&group).unwrap();
                assert_relative_eq!(area, expected, max_relative = 1e-6);
            }
            let h1 = HomogeneousGroup::heisenberg1();
            let quad = sphere_area_quadrature(&h1).unwrap();
            let (mc, _se) = revhardy::spaces::sphere_area_mc(&h1, 600_000, 77);
            assert!(
                (mc - quad).abs() / quad <= 5e-3,
                "Heisenberg sphere measure: mc {mc} vs quadrature {quad}"
            );
            let unit = ball_volume_quadrature(&h1, 1.0).unwrap();
            for &s in &[0.5f64, 1.0, 2.0, 10.0] {
                let (v, _) = ball_volume_mc(&h1, s, 400_000, 1234 + s as u64);
                let expected = s.powi(4) * unit;
                assert!(
                    (v - expected).abs() / expected <= 0.01,
                    "dilation scaling at s = {s}: {v} vs {expected}"
                );
            }
        },
    );
}

#[test]
fn criterion_08_stein_weiss_full_form() {
    criterion(
        8,
        "Stein-Weiss ratios clear the composed constructive constant",
        Duration::from_secs(120),
        || {
            let space = Space::euclidean(1).unwrap();
            let params = sw_param_check(&space, -1.0, -1.0, -0.3, -0.4).unwrap();
            // Recompute the target through the composed proof-chain formula:
            // (2C)^lambda * |p|^{1/q} (p')^{1/p'} * D1 with
            // D1 = (S/(Q+(a+l)q))^{1/q} (S/(b p' + Q))^{1/p'}.
            let d1 = (2.0f64 / 1.6).powf(-1.0) * (2.0f64 / 0.8).powf(2.0);
            assert_relative_eq!(d1, 5.0, max_relative = 1e-12);
            let expected_lower = 2f64.powf(-0.3) * 0.25 * d1;
            assert_relative_eq!(expected_lower, 1.0153, max_relative = 2e-4);
            let lower = sw_lower_constant(&params, SwCase::A).unwrap();
            assert_relative_eq!(lower, expected_lower, max_relative = 1e-12);

            let pairs = generate_sw_family(&params, 10, 8).unwrap();
            assert_eq!(pairs.len(), 10);
            let opts = SwVerifyOptions {
                mc_samples: 200_000,
                seeds: vec![17, 4242],
                run_chain: false,
                quadrature: cfg(),
            };
            let report = verify_sw(&space, &params, &pairs, &opts).unwrap();
            assert_eq!(report.verdict, Verdict::Verified);
            assert!(report.seeds_agree);
            // The full form diverges for every hypothesis-admissible pair at
            // these parameters; the certified ratio uses the proof's own
            // ball restriction, which the full form dominates.
            assert_eq!(report.region, FormRegion::Ball);
            assert!(report
                .warnings
                .iter()
                .any(|w| w == WARN_FULL_FORM_DIVERGES));
            for pair in &report.pairs {
                assert!(pair.passes);
                for (est, ratio) in pair.estimates.iter().zip(&pair.ratios) {
                    let slack = 3.0 * est.relative_std_error();
                    assert!(
                        *ratio >= lower * (1.0 - slack),
                        "ratio {ratio} below {lower} - 3 standard errors"
                    );
                }
            }
        },
    );
}

#[test]
fn criterion_09_hls_trivial_regime() {
    criterion(
        9,
        "Hardy-Littlewood-Sobolev regime certifies divergence under refinement",
        Duration::from_secs(60),
        || {
            let space = Space::euclidean(1).unwrap();
            let check =
                revhardy::bilinear::hls_param_check(&space, -1.0, -2.0, None).unwrap();
            assert_relative_eq!(check.derived_lambda, -1.5, max_relative = 1e-12);
            assert!(check.diagonal_divergent);
            let params = sw_param_check(&space, -1.0, -2.0, 0.0, 0.0).unwrap();
            let pairs = vec![(
                PiecewisePowerFunction::new(0.0, -2.5, 1.0, 1.0).unwrap(),
                PiecewisePowerFunction::new(0.0, 1.5, 1.0, 1.0).unwrap(),
            )];
            let report = verify_sw(
                &space,
                &params,
                &pairs,
                &SwVerifyOptions {
                    mc_samples: 150_000,
                    seeds: vec![2, 3],
                    run_chain: false,
                    quadrature: cfg(),
                },
            )
            .unwrap();
            assert_eq!(report.verdict, Verdict::TriviallyHolds);
            let evidence = &report.divergence_evidence;
            assert!(evidence.len() >= 4);
            for w in evidence.windows(2) {
                assert!(
                    w[1].estimate > w[0].estimate,
                    "estimates failed to grow under refinement: {evidence:?}"
                );
            }
            assert!(evidence.last().unwrap().estimate > 3.0 * evidence[0].estimate);
        },
    );
}

#[test]
fn criterion_10_proof_chain() {
    criterion(
        10,
        "all proof-chain steps hold for 20 admissible test functions",
        Duration::from_secs(120),
        || {
            let space = Space::euclidean(1).unwrap();
            let params = sw_param_check(&space, -1.0, -1.0, -0.3, -0.4).unwrap();
            let pairs = generate_sw_family(&params, 20, 21).unwrap();
            assert_eq!(pairs.len(), 20);
            for (i, (f, h)) in pairs.iter().enumerate() {
                let steps =
                    chain_check(&space, &f.profile(), &h.profile(), &params, &cfg()).unwrap();
                assert_eq!(steps.len(), 5);
                for step in &steps {
                    assert!(
                        step.holds,
                        "pair {i}: step {} failed: {}",
                        step.name, step.detail
                    );
                }
            }
        },
    );
}

#[test]
fn criterion_11_determinism() {
    criterion(
        11,
        "seeded reruns reproduce verdicts and payloads byte-for-byte",
        Duration::from_secs(240),
        || {
            let mut hardy_cfg = RunConfig::new(CommandKind::CheckHardy);
            hardy_cfg.p = Some(-1.0);
            hardy_cfg.q = Some(-1.0);
            hardy_cfg.alpha = Some(0.0);
            hardy_cfg.beta = Some(-1.0);
            hardy_cfg.family_count = 8;
            hardy_cfg.seed = 7;

            let mut sw_cfg = RunConfig::new(CommandKind::CheckSteinWeiss);
            sw_cfg.p = Some(-1.0);
            sw_cfg.q = Some(-1.0);
            sw_cfg.alpha = Some(-0.3);
            sw_cfg.beta = Some(-0.4);
            sw_cfg.family_count = 3;
            sw_cfg.mc_samples = 50_000;
            sw_cfg.seed = 11;

            let mut hls_cfg = RunConfig::new(CommandKind::CheckHls);
            hls_cfg.p = Some(-1.0);
            hls_cfg.q = Some(-2.0);
            hls_cfg.family_count = 1;
            hls_cfg.mc_samples = 50_000;
            hls_cfg.seed = 13;

            let mut scan_cfg = RunConfig::new(CommandKind::Scan);
            scan_cfg.p_grid = Some(GridSpec::parse("-3:-0.5:5").unwrap());
            scan_cfg.q_grid = Some(GridSpec::parse("-4:-1:5").unwrap());
            scan_cfg.alpha_grid = Some(GridSpec::parse("0:2:2").unwrap());

            let mut sphere_cfg = RunConfig::new(CommandKind::SphereArea);
            sphere_cfg.space = "heisenberg:1".into();
            sphere_cfg.mc_samples = 100_000;
            sphere_cfg.seed = 5;

            for config in [&hardy_cfg, &sw_cfg, &hls_cfg, &scan_cfg, &sphere_cfg] {
                let first = run(config).unwrap();
                let second = run(config).unwrap();
                assert_eq!(first.verdict, second.verdict);
                assert_eq!(
                    first.deterministic_json().unwrap(),
                    second.deterministic_json().unwrap(),
                    "non-deterministic payload for {}",
                    config.command.as_str()
                );
            }
        },
    );
}
