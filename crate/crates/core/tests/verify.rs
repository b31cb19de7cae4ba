use num_complex::Complex64;
use rvkloosterman::basis::TruncationPolicy;
use rvkloosterman::kloosterman::Variant;
use rvkloosterman::verify::*;

fn policy(cutoff: u64) -> TruncationPolicy {
    VerifyConfig::default().policy(cutoff)
}

#[test]
fn embedded_tolerances_parse_and_versions_are_enforced() {
    let t = Tolerances::embedded();
    assert_eq!(t.version, TOLERANCES_VERSION);
    assert_eq!(t.analytic.nodes, 40);
    assert_eq!(t.analytic.delta_cutoff, 200_000);
    let bumped = EMBEDDED_TOLERANCES.replace("version = 1", "version = 2");
    assert!(matches!(Tolerances::from_toml_str(&bumped), Err(VerifyError::Config(_))));
    let negative = EMBEDDED_TOLERANCES.replace("identity = 1e-9", "identity = -1e-9");
    assert!(Tolerances::from_toml_str(&negative).is_err());
    let unknown = EMBEDDED_TOLERANCES.replace("[exact]", "[exact]\nbogus = 1");
    assert!(Tolerances::from_toml_str(&unknown).is_err());
    assert!(Tolerances::load(std::path::Path::new("/nonexistent/tolerances.toml")).is_err());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.toml");
    std::fs::write(&path, EMBEDDED_TOLERANCES).unwrap();
    assert_eq!(Tolerances::load(&path).unwrap(), t);
}

#[test]
fn empty_selection_is_an_empty_passing_report() {
    let cfg = VerifyConfig::default();
    assert!(parse_suites("").unwrap().is_empty());
    let reports = run_suite(&[], &cfg);
    assert!(reports.is_empty());
    assert_eq!(exit_code(&reports), 0);
    assert!(run_checks(&[], &cfg).is_empty());
}

#[test]
fn suite_selection() {
    assert_eq!(parse_suites("all").unwrap(), vec![Suite::Exact, Suite::Analytic]);
    assert_eq!(parse_suites("analytic, exact").unwrap(), vec![Suite::Analytic, Suite::Exact]);
    assert!(parse_suites("exact,bogus").is_err());
    for c in Check::ALL {
        assert_eq!(Check::from_name(c.name()), Some(c));
    }
    assert_eq!(Check::Relations.suite(), Suite::Exact);
    assert_eq!(Check::ZeroValues.suite(), Suite::Exact);
    assert_eq!(Check::MockModular.suite(), Suite::Analytic);
    assert_eq!(Check::from_name("nope"), None);
}

#[test]
fn reports_round_trip_and_pass_flag_matches_residual() {
    let cfg = VerifyConfig::default();
    let reports = run_checks(&[Check::S00, Check::A4Identity, Check::E2, Check::ThetaMultiplier], &cfg);
    assert!(reports.len() >= 4);
    for r in &reports {
        let res = r.residual.expect("evaluated");
        assert_eq!(r.pass, res <= r.tolerance, "{}", r.name);
        assert!(r.pass, "{r:?}");
        assert!(r.error.is_none());
    }
    let text = reports_to_jsonl(&reports);
    assert_eq!(text.lines().count(), reports.len());
    assert_eq!(reports_from_jsonl(&text).unwrap(), reports);
    assert!(reports_from_jsonl("{not json").is_err());
    let table = reports_table(&reports);
    assert!(table.lines().count() == reports.len() + 1 && table.contains("PASS"));
    assert_eq!(exit_code(&reports), 0);

    let mut failing = reports.clone();
    failing[0].pass = false;
    assert_eq!(exit_code(&failing), 1);
}

#[test]
fn reports_are_reproducible() {
    let cfg = VerifyConfig::default();
    let checks = [Check::Specialization, Check::ThetaMultiplier, Check::Weil];
    let a: Vec<_> = run_checks(&checks, &cfg).iter().map(CheckReport::deterministic).collect();
    let b: Vec<_> = run_checks(&checks, &cfg).iter().map(CheckReport::deterministic).collect();
    assert_eq!(reports_to_jsonl(&a), reports_to_jsonl(&b));
}

#[test]
fn weil_bound_shapes() {
    // nu^4, even c: sigma_0(2c) sqrt(gcd(m, n, 2c)) sqrt(2c)
    let b = weil_bound(1, 1, 6, 4, Variant::ThetaCapEven).unwrap();
    assert!((b - 6.0 * 12f64.sqrt()).abs() < 1e-12);
    // nu^3, even c: 2 sigma_0(2c) sqrt(gcd(m, n, c)) sqrt(c)
    let b = weil_bound(2, 4, 6, 3, Variant::ThetaCapEven).unwrap();
    assert!((b - 2.0 * 6.0 * 2f64.sqrt() * 6f64.sqrt()).abs() < 1e-12);
    assert!(weil_residual().unwrap() <= 0.0);
}

#[test]
fn interpolation_preconditions() {
    let p = policy(2_000);
    for t in [0.5, 2.5] {
        let r = interp_check(GaussianSpec { t, dimension: 4 }, &[0.7], 40, &p);
        assert!(matches!(r, Err(VerifyError::Precondition(_))), "t = {t}");
    }
    let g = GaussianSpec { t: 1.3, dimension: 3 };
    assert_eq!(g.f(0.0), 1.0);
    assert!((g.f_hat(0.0) - 1.3f64.powf(-1.5)).abs() < 1e-15);
    let strict = TruncationPolicy { tol: 1e-14, ..p };
    let r = interp_check(GaussianSpec { t: 1.0, dimension: 4 }, &[0.7], 40, &strict);
    assert!(matches!(r, Err(VerifyError::Basis(_))), "{r:?}");
}

#[test]
fn interpolation_residual_decreases_with_cutoff() {
    // pinned where truncation, not rounding, dominates the residual
    let spec = GaussianSpec { t: 1.0, dimension: 3 };
    let mut residuals = Vec::new();
    for cutoff in [1_250, 2_500, 5_000, 10_000] {
        let pt = interp_check(spec, &[0.3], 40, &policy(cutoff)).unwrap()[0];
        if let Some(&prev) = residuals.last() {
            assert!(pt.residual <= prev + pt.oscillation, "cutoff {cutoff}: {} after {prev}", pt.residual);
        }
        residuals.push(pt.residual);
    }
    assert!(residuals[3] < residuals[0] / 2.0, "{residuals:?}");
}

#[test]
fn functional_equation_examples() {
    let tau = Complex64::new(0.0, 2.0);
    let pts = functional_equation_check(4, tau, &[0.5], 40, &policy(20_000)).unwrap();
    assert!(pts[0].residual < 1e-3, "{:?}", pts[0]);
    let pts = functional_equation_check(3, Complex64::i(), &[1.2], 40, &policy(20_000)).unwrap();
    assert!(pts[0].residual < 5e-3, "{:?}", pts[0]);
    // -1/tau too close to the real line
    let r = functional_equation_check(4, Complex64::new(0.0, 4.0), &[0.5], 40, &policy(2_000));
    assert!(matches!(r, Err(VerifyError::Precondition(_))));
    let r = functional_equation_check(4, Complex64::new(0.0, 0.3), &[0.5], 40, &policy(2_000));
    assert!(matches!(r, Err(VerifyError::Precondition(_))));
}

#[test]
fn asymptotic_constants() {
    let fit = asymptotic_fit(-1, -1, Variant::ThetaCapEven, 100_000).unwrap();
    let want = 16.0 / std::f64::consts::PI.powi(2);
    assert!((fit.expected.norm() - want).abs() < 1e-12);
    assert!((fit.expected.arg() + std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    assert!(fit.modulus_deviation < 0.1 && fit.phase_deviation < 0.1, "{fit:?}");
    assert!(fit.samples.iter().all(|s| s.0 >= 1000));
    let odd = expected_coefficient(-1, -1, Variant::ThetaCapOdd);
    assert!((odd + fit.expected).norm() < 1e-12);

    // no main term for (1, 1): the normalized sums drift towards 0
    let fit = asymptotic_fit(1, 1, Variant::ThetaCapEven, 100_000).unwrap();
    assert_eq!(fit.expected, Complex64::new(0.0, 0.0));
    let first = fit.samples.first().unwrap().1.norm();
    let last = fit.samples.last().unwrap().1.norm();
    assert!(last < first && last < 0.2, "{first} -> {last}");

    assert!(matches!(asymptotic_fit(-1, -1, Variant::Classical, 10_000), Err(VerifyError::Precondition(_))));
    assert!(asymptotic_fit(-1, -1, Variant::ThetaCapEven, 999).is_err());
}

#[test]
fn theta_multiplier_and_random_words() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let (g, word) = random_theta_element(&mut rng, 6);
        assert_eq!(g.a * g.d - g.b * g.c, 1);
        assert!(!word.is_empty());
        // Gamma_Theta: ab and cd even
        assert!((g.a * g.b) % 2 == 0 && (g.c * g.d) % 2 == 0, "{word}");
    }
    assert!(theta_multiplier_residual(50, 1).unwrap() < 1e-10);
}

#[test]
fn exact_identities_hold() {
    let tol = Tolerances::embedded().exact.identity;
    assert!(relations_residual().unwrap() < tol);
    assert!(weight_two_residual().unwrap() < tol);
    assert!(multiplicativity_residual().unwrap() < tol);
    assert!(conjugation_symmetry_residual().unwrap() < tol);
    assert!(specialization_residual(20, 3).unwrap() < tol);
    assert_eq!(a4_identity_mismatches(), 0);
    assert_eq!(three_squares_mismatches(500), 0);
}
