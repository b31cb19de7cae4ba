//! Verification suites: exact identities checked to machine precision and
//! truncation-budgeted checks of the analytic statements.
//!
//! Every check produces one or more [`CheckReport`]s. Tolerances and
//! truncation budgets come from `config/tolerances.toml`, which is
//! compiled in and can be replaced at run time.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{divisor_sum, hurwitz, hurwitz_table, r3};
use crate::basis::{
    a3, basis_b_grid, big_b_at_zero, big_b_zero_series, growth_envelope, half_integral_delta_check,
    kn_delta_check, BasisError, BasisVariant, TruncationPolicy,
};
use crate::kernel::e_frac;
use crate::kloosterman::{
    geometric_checkpoints, gcd_mnc, kloosterman, multiplicativity_check, partial_sums_multi,
    relation_check, special_s00, Divisor, KloostermanError, KloostermanQuery, Variant,
};
use crate::modforms::{
    a3_coefficients, a4_generating_identity, auto_order, curly_e2_residual, e2_transformation_residual,
    h_star_residual, lemma92_check, theta_cap, theta_cap_series, zagier_identity_residual, ModFormError,
};
use crate::modgroup::{nu_theta, principal_power, Mat2Z, ModGroupError};
use crate::rv::{dft_identity_check, rv_kloosterman, RvError, RvQuery, RvVariant};

pub const EMBEDDED_TOLERANCES: &str = include_str!("../config/tolerances.toml");
pub const TOLERANCES_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Kloosterman(#[from] KloostermanError),
    #[error(transparent)]
    Rv(#[from] RvError),
    #[error(transparent)]
    ModForm(#[from] ModFormError),
    #[error(transparent)]
    ModGroup(#[from] ModGroupError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactTolerances {
    pub identity: f64,
    pub zero_value: f64,
    pub zero_cutoff: u64,
    pub zero_n_max: usize,
    pub r3_n_max: usize,
    pub random_cases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticTolerances {
    pub cutoff: u64,
    pub mock_modular: f64,
    pub lemma_quadrature: f64,
    pub e2: f64,
    pub theta_multiplier: f64,
    pub theta_samples: usize,
    pub delta: f64,
    pub delta_cutoff: u64,
    pub delta_size: usize,
    pub nodes: usize,
    pub interp_d4: f64,
    pub interp_d3: f64,
    pub fe_d4: f64,
    pub fe_d3: f64,
    pub asymptotic_modulus: f64,
    pub asymptotic_phase: f64,
    pub asymptotic_x: u64,
    pub growth_n: usize,
    pub growth_d4: f64,
    pub growth_d3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub version: u32,
    pub exact: ExactTolerances,
    pub analytic: AnalyticTolerances,
}

impl Tolerances {
    pub fn embedded() -> Self {
        Self::from_toml_str(EMBEDDED_TOLERANCES).expect("embedded tolerances are valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, VerifyError> {
        let t: Tolerances = toml::from_str(text).map_err(|e| VerifyError::Config(e.to_string()))?;
        if t.version != TOLERANCES_VERSION {
            return Err(VerifyError::Config(format!(
                "tolerance file version {} is not {TOLERANCES_VERSION}",
                t.version
            )));
        }
        let e = &t.exact;
        let a = &t.analytic;
        let tols = [
            e.identity,
            e.zero_value,
            a.mock_modular,
            a.lemma_quadrature,
            a.e2,
            a.theta_multiplier,
            a.delta,
            a.interp_d4,
            a.interp_d3,
            a.fe_d4,
            a.fe_d3,
            a.asymptotic_modulus,
            a.asymptotic_phase,
        ];
        if tols.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(VerifyError::Config("tolerances must be positive and finite".into()));
        }
        if a.growth_d4 <= 0.0 || a.growth_d3 <= 0.0 {
            return Err(VerifyError::Config("growth exponents must be positive".into()));
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self, VerifyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| VerifyError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub tolerances: Tolerances,
    /// Cesàro window and segment count of every truncated series.
    pub blocks: usize,
    pub segments: usize,
    /// Replaces every truncation cutoff of the analytic checks when set.
    pub cutoff: Option<u64>,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let p = TruncationPolicy::default();
        VerifyConfig {
            tolerances: Tolerances::embedded(),
            blocks: p.blocks,
            segments: p.segments,
            cutoff: None,
            seed: 20240601,
        }
    }
}

impl VerifyConfig {
    /// The truncation policy at a nominal cutoff (or the override). The
    /// suites judge residuals, so the oscillation tolerance is left open.
    pub fn policy(&self, nominal: u64) -> TruncationPolicy {
        TruncationPolicy {
            cutoff: self.cutoff.unwrap_or(nominal),
            blocks: self.blocks,
            segments: self.segments,
            tol: f64::INFINITY,
        }
    }
}

/// The outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub parameters: String,
    /// `None` when the check could not be evaluated; see `error`.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// Wall-clock seconds; the only field that varies between runs.
    pub runtime: f64,
    pub cutoff: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckReport {
    fn new(name: impl Into<String>, parameters: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckReport {
            name: name.into(),
            parameters: parameters.into(),
            residual: Some(residual),
            tolerance,
            pass: residual <= tolerance,
            runtime: 0.0,
            cutoff: None,
            error: None,
        }
    }

    fn failed(name: impl Into<String>, parameters: impl Into<String>, tolerance: f64, err: &VerifyError) -> Self {
        CheckReport {
            name: name.into(),
            parameters: parameters.into(),
            residual: None,
            tolerance,
            pass: false,
            runtime: 0.0,
            cutoff: None,
            error: Some(err.to_string()),
        }
    }

    fn with_cutoff(mut self, c: u64) -> Self {
        self.cutoff = Some(c);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    /// The report without its run-time, for comparing runs.
    pub fn deterministic(&self) -> CheckReport {
        CheckReport { runtime: 0.0, ..self.clone() }
    }
}

pub fn reports_to_jsonl(reports: &[CheckReport]) -> String {
    reports.iter().map(|r| r.to_json() + "\n").collect()
}

pub fn reports_from_jsonl(text: &str) -> Result<Vec<CheckReport>, VerifyError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| VerifyError::Config(e.to_string())))
        .collect()
}

pub fn reports_table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut s = String::new();
    let _ = writeln!(s, "{:<width$}  {:>11}  {:>9}  {:>6}  {:>9}  parameters", "name", "residual", "tolerance", "result", "seconds");
    for r in reports {
        let res = r.residual.map_or_else(|| "-".to_string(), |x| format!("{x:.3e}"));
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        let mut params = r.parameters.clone();
        if let Some(c) = r.cutoff {
            let _ = write!(params, " cutoff={c}");
        }
        if let Some(e) = &r.error {
            let _ = write!(params, " error: {e}");
        }
        let _ = writeln!(s, "{:<width$}  {res:>11}  {:>9.1e}  {verdict:>6}  {:>9.2}  {params}", r.name, r.tolerance, r.runtime);
    }
    s
}

/// 0 when every check passed (or none ran), 1 otherwise.
pub fn exit_code(reports: &[CheckReport]) -> i32 {
    if reports.iter().all(|r| r.pass) {
        0
    } else {
        1
    }
}

fn s_int(m: i64, n: i64, c: u64, weight2k: i64, variant: Variant) -> Result<Complex64, VerifyError> {
    Ok(kloosterman(KloostermanQuery { m, n, c, weight2k, variant })?.value)
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// exact identities

/// The three parity relations for |m|, |n| <= 8 and odd c <= 49.
pub fn relations_residual() -> Result<f64, VerifyError> {
    let mut worst = 0.0f64;
    for c in (1..=49).step_by(2) {
        for m in -8..=8 {
            for n in -8..=8 {
                worst = worst.max(max_of(relation_check(m, n, c)?));
            }
        }
    }
    Ok(worst)
}

/// S(m, n, c, nu^4) against the classical sum modulo 2c.
pub fn weight_two_residual() -> Result<f64, VerifyError> {
    let mut worst = 0.0f64;
    for c in (2..=100).step_by(2) {
        for m in -10..=10 {
            for n in -10..=10 {
                let a = s_int(m, n, c, 4, Variant::ThetaCapEven)?;
                let b = s_int(m, n, 2 * c, 0, Variant::Classical)?;
                worst = worst.max((a - b).norm());
            }
        }
    }
    Ok(worst)
}

/// Direct S(0, n, c, nu^3) against products of local factors, both parities.
pub fn multiplicativity_residual() -> Result<f64, VerifyError> {
    let mut worst = 0.0f64;
    for n in (-50..=50).filter(|&n| n != 0) {
        for c in (2..=200).step_by(2) {
            worst = worst.max(multiplicativity_check(n, c, 3, Variant::ThetaCapEven)?);
        }
        for c in (1..=199).step_by(2) {
            worst = worst.max(multiplicativity_check(n, c, 3, Variant::ThetaCapOdd)?);
        }
    }
    Ok(worst)
}

pub fn s00_residual() -> Result<f64, VerifyError> {
    let mut worst = 0.0f64;
    for c in 1..=400u64 {
        let variant = if c % 2 == 0 { Variant::ThetaCapEven } else { Variant::ThetaCapOdd };
        let direct = s_int(0, 0, c, 3, variant)?;
        worst = worst.max((direct - special_s00(c, variant)?).norm());
    }
    Ok(worst)
}

fn sigma0(n: u64) -> f64 {
    divisor_sum(n, 0) as f64
}

/// The Weil-type bounds for nu^4 (both parities) and nu^3 (even moduli).
pub fn weil_bound(m: i64, n: i64, c: u64, weight2k: i64, variant: Variant) -> Option<f64> {
    let cf = c as f64;
    match (weight2k, variant) {
        (4, Variant::ThetaCapEven) => Some(sigma0(2 * c) * (gcd_mnc(m, n, 2 * c) as f64).sqrt() * (2.0 * cf).sqrt()),
        (4, Variant::ThetaCapOdd) => {
            Some(2.0 * SQRT_2 * sigma0(4 * c) * (gcd_mnc(m, n, 2 * c) as f64).sqrt() * cf.sqrt())
        }
        (3, Variant::ThetaCapEven) => Some(2.0 * sigma0(2 * c) * (gcd_mnc(m, n, c) as f64).sqrt() * cf.sqrt()),
        _ => None,
    }
}

/// Largest relative excess max(|S|/bound - 1, 0) over |m|, |n| <= 10, c <= 200.
pub fn weil_residual() -> Result<f64, VerifyError> {
    let cases = [(4, Variant::ThetaCapEven), (4, Variant::ThetaCapOdd), (3, Variant::ThetaCapEven)];
    let mut worst = 0.0f64;
    for (w, variant) in cases {
        for c in (1..=200u64).filter(|&c| variant.admits(c)) {
            for m in -10..=10 {
                for n in -10..=10 {
                    let s = s_int(m, n, c, w, variant)?.norm();
                    let b = weil_bound(m, n, c, w, variant).expect("bounded case");
                    worst = worst.max(s / b - 1.0);
                }
            }
        }
    }
    Ok(worst)
}

/// Number of coefficients up to order 200 where the two sides of the A_4
/// generating identity differ.
pub fn a4_identity_mismatches() -> usize {
    let (lhs, rhs) = a4_generating_identity(200);
    (0..=200).filter(|&n| lhs.coeff(n) != rhs.coeff(n)).count()
}

/// conj S(m,n,c,nu^{2k}) = S(-m,-n,c,nu^{-2k}) and S(m,n,c) = S(n,m,c) for even c.
pub fn conjugation_symmetry_residual() -> Result<f64, VerifyError> {
    let mut worst = 0.0f64;
    for w in [1, 3, 4] {
        for c in 1..=60u64 {
            let variant = if c % 2 == 0 { Variant::ThetaCapEven } else { Variant::ThetaCapOdd };
            for m in -8..=8 {
                for n in -8..=8 {
                    let s = s_int(m, n, c, w, variant)?;
                    worst = worst.max((s.conj() - s_int(-m, -n, c, -w, variant)?).norm());
                    if c % 2 == 0 {
                        worst = worst.max((s - s_int(n, m, c, w, variant)?).norm());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Random cases of K(integer) = S(integer) and of the DFT reconstruction.
pub fn specialization_residual(cases: usize, seed: u64) -> Result<f64, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..cases {
        let variant = if rng.gen::<bool>() { RvVariant::Even } else { RvVariant::Odd };
        let c = loop {
            let c = rng.gen_range(1..=40u64);
            if variant.admits(c) {
                break c;
            }
        };
        let weight2k = [1i64, 3, 4][rng.gen_range(0..3)];
        let n = rng.gen_range(-10..=10i64);
        if i % 2 == 0 {
            let m = rng.gen_range(-12..=12i64);
            let k = rv_kloosterman(RvQuery { rsq: m as f64, n, modulus: c, weight2k, variant })?;
            let s = s_int(m, n, c, weight2k, variant.integer_variant())?;
            worst = worst.max((k - s).norm());
        } else {
            let rsq = rng.gen_range(-6.0..6.0);
            worst = worst.max(dft_identity_check(rsq, n, c, weight2k, variant)?);
        }
    }
    Ok(worst)
}

/// Count of n <= n_max where Theta^3 disagrees with the direct count of
/// representations, where 12 H(n) differs between the single-value and
/// table routes, or where 8 H(n) + r_3(n)/6 is not an integer.
pub fn three_squares_mismatches(n_max: usize) -> usize {
    let th = theta_cap_series(n_max).map(|a| a as i128);
    let cube = th.mul(&th).and_then(|t| t.mul(&th)).expect("matching half-periods");
    let table = hurwitz_table(n_max);
    let a3s = a3_coefficients(n_max);
    (0..=n_max)
        .filter(|&n| {
            cube.coeff(n as i64) != Some(r3(n as u64) as i128)
                || table[n] != hurwitz(n as u64)
                || (n > 0 && !a3s[n].is_integer())
        })
        .count()
}

/// Worst deviation of the r -> 0 series from the closed forms for
/// n = 1..=n_max: `[(B_4, B~_4), (B_3, B~_3)]`; the b_{3,n}(0) check
/// subtracts the exact A_3(n) from both sides and has the B_3 residual.
pub fn zero_value_residuals(n_max: usize, policy: &TruncationPolicy) -> Result<[(f64, f64); 2], VerifyError> {
    let mut out = [(0.0, 0.0); 2];
    for (k, dim) in [4u32, 3].into_iter().enumerate() {
        let mut pair = [0.0; 2];
        for (j, variant) in [BasisVariant::Plain, BasisVariant::Tilde].into_iter().enumerate() {
            let series = big_b_zero_series(dim, variant, n_max, policy)?;
            for n in 1..=n_max {
                let closed = big_b_at_zero(dim, n as u64, variant)?;
                let closed = *closed.numer() as f64 / *closed.denom() as f64;
                pair[j] = f64::max(pair[j], (series[n - 1].value - closed).norm());
            }
        }
        out[k] = (pair[0], pair[1]);
    }
    Ok(out)
}

/// b_{3,n}(0) = B_{3,n}(0) - A_3(n) against -r_3(n)/2 (plain) and r_3(n)/2
/// (tilde), with B from the series.
pub fn small_b3_zero_residual(n_max: usize, policy: &TruncationPolicy) -> Result<f64, VerifyError> {
    let mut worst = 0.0f64;
    for (variant, sign) in [(BasisVariant::Plain, -0.5), (BasisVariant::Tilde, 0.5)] {
        let series = big_b_zero_series(3, variant, n_max, policy)?;
        for n in 1..=n_max {
            let a = a3(n as u64);
            let b = series[n - 1].value - *a.numer() as f64 / *a.denom() as f64;
            worst = worst.max((b - sign * r3(n as u64) as f64).norm());
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// analytic checks

/// The Gaussian f(x) = exp(-pi t |x|^2) on R^d and its Fourier transform
/// t^{-d/2} exp(-pi |xi|^2 / t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub t: f64,
    pub dimension: u32,
}

impl GaussianSpec {
    pub fn f(&self, x: f64) -> f64 {
        (-PI * self.t * x * x).exp()
    }

    pub fn f_hat(&self, xi: f64) -> f64 {
        self.t.powf(-(self.dimension as f64) / 2.0) * (-PI * xi * xi / self.t).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpPoint {
    pub x: f64,
    pub approx: f64,
    pub exact: f64,
    pub residual: f64,
    /// Accumulated oscillation bound of the basis values used.
    pub oscillation: f64,
}

/// Reconstruct the Gaussian at each x from its values and Fourier values at
/// sqrt(n), n <= nodes. Fails if any basis value oscillates by more than
/// `policy.tol`.
pub fn interp_check(
    spec: GaussianSpec,
    xs: &[f64],
    nodes: usize,
    policy: &TruncationPolicy,
) -> Result<Vec<InterpPoint>, VerifyError> {
    if !(0.8..=2.0).contains(&spec.t) {
        return Err(VerifyError::Precondition(format!("Gaussian width t = {} is outside [0.8, 2]", spec.t)));
    }
    let d = spec.dimension;
    let plain = basis_b_grid(d, BasisVariant::Plain, xs, nodes, policy)?;
    let tilde = basis_b_grid(d, BasisVariant::Tilde, xs, nodes, policy)?;
    for v in plain.iter().chain(&tilde).flatten() {
        v.require_converged(policy.tol)?;
    }
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut approx = 0.0;
            let mut osc = 0.0;
            for n in 0..=nodes {
                let s = (n as f64).sqrt();
                let (p, q) = (plain[i][n], tilde[i][n]);
                approx += spec.f(s) * p.value + spec.f_hat(s) * q.value;
                osc += spec.f(s) * p.oscillation + spec.f_hat(s) * q.oscillation;
            }
            let exact = spec.f(x);
            InterpPoint { x, approx, exact, residual: (approx - exact).abs(), oscillation: osc }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FePoint {
    pub r: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Generating series G(tau) = sum b_n(r) e^{pi i n tau} with n <= nodes;
/// checks G(tau) + (-i tau)^{-d/2} G~(-1/tau) = e^{pi i r^2 tau}.
/// Both tau and -1/tau must have imaginary part at least 1/2.
pub fn functional_equation_check(
    dim: u32,
    tau: Complex64,
    rs: &[f64],
    nodes: usize,
    policy: &TruncationPolicy,
) -> Result<Vec<FePoint>, VerifyError> {
    let dual = -1.0 / tau;
    if tau.im < 0.5 || dual.im < 0.5 {
        return Err(VerifyError::Precondition(format!("Im tau and Im(-1/tau) must be >= 1/2 (tau = {tau})")));
    }
    let plain = basis_b_grid(dim, BasisVariant::Plain, rs, nodes, policy)?;
    let tilde = basis_b_grid(dim, BasisVariant::Tilde, rs, nodes, policy)?;
    let i = Complex64::i();
    let front = principal_power(-i * tau, -(dim as i32));
    Ok(rs
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let mut g = Complex64::new(0.0, 0.0);
            let mut gt = Complex64::new(0.0, 0.0);
            for n in 0..=nodes {
                let nf = n as f64;
                g += plain[k][n].value * (PI * i * nf * tau).exp();
                gt += tilde[k][n].value * (PI * i * nf * dual).exp();
            }
            let lhs = g + front * gt;
            let rhs = (PI * i * r * r * tau).exp();
            FePoint { r, lhs, rhs, residual: (lhs - rhs).norm() }
        })
        .collect())
}

/// The predicted x^{1/2} coefficient of sum_{c <= x} S(m, n, c, nu^3)/c.
pub fn expected_coefficient(m: i64, n: i64, variant: Variant) -> Complex64 {
    let pi2 = PI * PI;
    match (m, n, variant) {
        (-1, -1, Variant::ThetaCapEven) => e_frac(-1.0 / 8.0) * (16.0 / pi2),
        (-1, -1, Variant::ThetaCapOdd) => -e_frac(-1.0 / 8.0) * (16.0 / pi2),
        (0, 0, Variant::ThetaCapEven) => e_frac(-1.0 / 8.0) * (4.0 / pi2),
        (0, 0, Variant::ThetaCapOdd) => e_frac(3.0 / 8.0) * (4.0 / pi2),
        _ => Complex64::new(0.0, 0.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticFit {
    pub m: i64,
    pub n: i64,
    pub variant: Variant,
    /// Mean of P(x)/sqrt(x) over the checkpoints x >= 10^3.
    pub coefficient: Complex64,
    pub expected: Complex64,
    /// |coefficient|/|expected| - 1, or |coefficient| if nothing is expected.
    pub modulus_deviation: f64,
    /// |arg(coefficient/expected)| in radians.
    pub phase_deviation: f64,
    pub samples: Vec<(u64, Complex64)>,
}

pub fn asymptotic_fit(m: i64, n: i64, variant: Variant, x: u64) -> Result<AsymptoticFit, VerifyError> {
    if !matches!(variant, Variant::ThetaCapEven | Variant::ThetaCapOdd) {
        return Err(VerifyError::Precondition(format!("no asymptotic for variant {variant}")));
    }
    if x < 1000 {
        return Err(VerifyError::Precondition("x must be at least 1000".into()));
    }
    let cps = geometric_checkpoints(x, 10);
    let sums = partial_sums_multi(&[(m, n)], 3, variant, x, Divisor::C, &cps);
    let samples: Vec<(u64, Complex64)> = sums
        .into_iter()
        .filter(|(x, _)| *x >= 1000)
        .map(|(x, v)| (x, v[0] / (x as f64).sqrt()))
        .collect();
    let coefficient = samples.iter().map(|s| s.1).sum::<Complex64>() / samples.len() as f64;
    let expected = expected_coefficient(m, n, variant);
    let (modulus_deviation, phase_deviation) = if expected.norm() == 0.0 {
        (coefficient.norm(), 0.0)
    } else {
        ((coefficient.norm() / expected.norm() - 1.0).abs(), (coefficient / expected).arg().abs())
    };
    Ok(AsymptoticFit { m, n, variant, coefficient, expected, modulus_deviation, phase_deviation, samples })
}

/// A random element of the theta group as a word in S, T^2 and -I, together
/// with the word.
pub fn random_theta_element(rng: &mut impl Rng, max_len: usize) -> (Mat2Z, String) {
    let mut g = Mat2Z::IDENTITY;
    let mut word = String::new();
    let len = rng.gen_range(1..=max_len);
    for _ in 0..len {
        if rng.gen::<bool>() {
            g = g * Mat2Z::S;
            word.push('S');
        } else {
            let k = [-2i64, -1, 1, 2][rng.gen_range(0..4)];
            g = g * Mat2Z::translation(2 * k);
            let _ = write!(word, "T^{}", 2 * k);
        }
    }
    if rng.gen::<bool>() {
        g = g.neg();
        word.insert_str(0, "-");
    }
    (g, word)
}

/// Worst relative residual of Theta(g tau) = nu(g) (c tau + d)^{1/2} Theta(tau)
/// over `samples` random g and tau; g tau is kept above Im = 0.02.
pub fn theta_multiplier_residual(samples: usize, seed: u64) -> Result<f64, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < samples {
        let (g, _) = random_theta_element(&mut rng, 8);
        let tau = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.5));
        let gt = g.act(tau);
        if gt.im < 0.02 {
            continue;
        }
        let lhs = theta_cap(gt, auto_order(gt))?.value;
        let rhs = nu_theta(g)?.to_complex() * principal_power(g.j(tau), 1) * theta_cap(tau, auto_order(tau))?.value;
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
        done += 1;
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// suites

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Exact,
    Analytic,
}

impl std::str::FromStr for Suite {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, VerifyError> {
        match s {
            "exact" => Ok(Suite::Exact),
            "analytic" => Ok(Suite::Analytic),
            _ => Err(VerifyError::Config(format!("unknown suite `{s}` (exact, analytic, all)"))),
        }
    }
}

/// Parse `exact`, `analytic`, `all` or a comma-separated list.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>, VerifyError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend([Suite::Exact, Suite::Analytic]);
        } else {
            out.push(part.parse()?);
        }
    }
    out.dedup();
    Ok(out)
}

/// The individual checks, in the order their reports appear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    Relations,
    WeightTwo,
    Multiplicativity,
    S00,
    Weil,
    A4Identity,
    Conjugation,
    Specialization,
    ThreeSquares,
    ZeroValues,
    MockModular,
    E2,
    ThetaMultiplier,
    Delta,
    Interpolation,
    FunctionalEquation,
    Asymptotic,
    Growth,
}

impl Check {
    pub const ALL: [Check; 18] = [
        Check::Relations,
        Check::WeightTwo,
        Check::Multiplicativity,
        Check::S00,
        Check::Weil,
        Check::A4Identity,
        Check::Conjugation,
        Check::Specialization,
        Check::ThreeSquares,
        Check::ZeroValues,
        Check::MockModular,
        Check::E2,
        Check::ThetaMultiplier,
        Check::Delta,
        Check::Interpolation,
        Check::FunctionalEquation,
        Check::Asymptotic,
        Check::Growth,
    ];

    pub fn suite(self) -> Suite {
        if (self as usize) < Check::MockModular as usize {
            Suite::Exact
        } else {
            Suite::Analytic
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Check::Relations => "relations",
            Check::WeightTwo => "weight_two",
            Check::Multiplicativity => "multiplicativity",
            Check::S00 => "s00",
            Check::Weil => "weil",
            Check::A4Identity => "a4_identity",
            Check::Conjugation => "conjugation",
            Check::Specialization => "specialization",
            Check::ThreeSquares => "three_squares",
            Check::ZeroValues => "zero_values",
            Check::MockModular => "mock_modular",
            Check::E2 => "e2",
            Check::ThetaMultiplier => "theta_multiplier",
            Check::Delta => "delta",
            Check::Interpolation => "interpolation",
            Check::FunctionalEquation => "functional_equation",
            Check::Asymptotic => "asymptotic",
            Check::Growth => "growth",
        }
    }

    pub fn from_name(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }
}

fn single(name: &str, params: &str, tol: f64, r: Result<f64, VerifyError>) -> Vec<CheckReport> {
    vec![match r {
        Ok(x) => CheckReport::new(name, params, x, tol),
        Err(e) => CheckReport::failed(name, params, tol, &e),
    }]
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Evaluate one check.
pub fn run_check(check: Check, cfg: &VerifyConfig) -> Vec<CheckReport> {
    let start = Instant::now();
    let ex = &cfg.tolerances.exact;
    let an = &cfg.tolerances.analytic;
    let id = ex.identity;
    let mut out = match check {
        Check::Relations => single("relations", "|m|,|n|<=8 odd c<=49 weights 1/2,3/2,2", id, relations_residual()),
        Check::WeightTwo => single("weight_two", "|m|,|n|<=10 even c<=100", id, weight_two_residual()),
        Check::Multiplicativity => {
            single("multiplicativity", "0<|n|<=50 c<=200 weight 3/2", id, multiplicativity_residual())
        }
        Check::S00 => single("s00", "c<=400 weight 3/2", id, s00_residual()),
        Check::Weil => single("weil", "|m|,|n|<=10 c<=200", id, weil_residual()),
        Check::A4Identity => {
            vec![CheckReport::new("a4_identity", "order 200", a4_identity_mismatches() as f64, 0.0)]
        }
        Check::Conjugation => single("conjugation", "|m|,|n|<=8 c<=60 weights 1/2,3/2,2", id, conjugation_symmetry_residual()),
        Check::Specialization => single(
            "specialization",
            &format!("{} random cases seed {}", ex.random_cases, cfg.seed),
            id,
            specialization_residual(ex.random_cases, cfg.seed),
        ),
        Check::ThreeSquares => vec![CheckReport::new(
            "three_squares",
            &format!("n<={}", ex.r3_n_max),
            three_squares_mismatches(ex.r3_n_max) as f64,
            0.0,
        )],
        Check::ZeroValues => {
            let policy = cfg.policy(ex.zero_cutoff);
            let params = format!("n<={}", ex.zero_n_max);
            let mut v = match zero_value_residuals(ex.zero_n_max, &policy) {
                Ok([(b4, bt4), (b3, bt3)]) => vec![
                    CheckReport::new("zero_values_b4", &params, b4, ex.zero_value),
                    CheckReport::new("zero_values_b4_tilde", &params, bt4, ex.zero_value),
                    CheckReport::new("zero_values_b3", &params, b3, ex.zero_value),
                    CheckReport::new("zero_values_b3_tilde", &params, bt3, ex.zero_value),
                ],
                Err(e) => vec![CheckReport::failed("zero_values", &params, ex.zero_value, &e)],
            };
            v.extend(single("zero_values_small_b3", &params, ex.zero_value, small_b3_zero_residual(ex.zero_n_max, &policy)));
            v.into_iter().map(|r| r.with_cutoff(policy.cutoff)).collect()
        }
        Check::MockModular => {
            let mut v = Vec::new();
            for tau in [c64(0.0, 1.0), c64(0.3, 0.9)] {
                let order = auto_order(-1.0 / (4.0 * tau)).max(auto_order(tau));
                let r = zagier_identity_residual(tau, order).map_err(VerifyError::from);
                v.extend(single("zagier_identity", &format!("tau={tau}"), an.mock_modular, r));
            }
            let tau = c64(0.0, 1.0);
            let r = h_star_residual(tau, auto_order(tau)).map_err(VerifyError::from);
            v.extend(single("h_star_anti_invariance", &format!("tau={tau}"), an.mock_modular, r));
            let r = lemma92_check(tau).map(|r| r.residual).map_err(VerifyError::from);
            v.extend(single("contour_identity", &format!("tau={tau}"), an.lemma_quadrature, r));
            v
        }
        Check::E2 => {
            let mut v = Vec::new();
            for tau in [c64(0.0, 1.0), c64(1.0 / 3.0, 5.0 / 3.0)] {
                let order = auto_order(-1.0 / tau).max(auto_order(tau));
                let r = e2_transformation_residual(tau, order).map_err(VerifyError::from);
                v.extend(single("e2_transformation", &format!("tau={tau}"), an.e2, r));
            }
            for tau in [c64(0.0, 1.0), c64(0.6, 1.1)] {
                let order = auto_order(-1.0 / tau).max(auto_order(tau));
                let r = curly_e2_residual(tau, order).map_err(VerifyError::from);
                v.extend(single("curly_e2_anti_invariance", &format!("tau={tau}"), an.e2, r));
            }
            v
        }
        Check::ThetaMultiplier => single(
            "theta_multiplier",
            &format!("{} samples seed {}", an.theta_samples, cfg.seed),
            an.theta_multiplier,
            theta_multiplier_residual(an.theta_samples, cfg.seed),
        ),
        Check::Delta => {
            let policy = cfg.policy(an.delta_cutoff);
            let size = an.delta_size;
            let params = format!("m,n<={size}");
            let worst = |r: Result<Vec<Vec<(f64, f64)>>, BasisError>| {
                r.map(|t| max_of(t.iter().flatten().map(|x| x.0))).map_err(VerifyError::from)
            };
            let mut v = single("delta_k", &params, an.delta, worst(kn_delta_check(BasisVariant::Plain, size, &policy)));
            v.extend(single("delta_k_tilde", &params, an.delta, worst(kn_delta_check(BasisVariant::Tilde, size, &policy))));
            v.extend(single("delta_half_integral", &params, an.delta, worst(half_integral_delta_check(size, &policy))));
            v.into_iter().map(|r| r.with_cutoff(policy.cutoff)).collect()
        }
        Check::Interpolation => {
            let policy = cfg.policy(an.cutoff);
            let xs = [0.3, 0.7, 1.4];
            let mut v = Vec::new();
            for (dim, tol) in [(4u32, an.interp_d4), (3, an.interp_d3)] {
                let spec = GaussianSpec { t: 1.0, dimension: dim };
                let name = format!("interpolation_d{dim}");
                match interp_check(spec, &xs, an.nodes, &policy) {
                    Ok(points) => v.extend(points.iter().map(|p| {
                        CheckReport::new(&name, format!("t=1 x={} N={}", p.x, an.nodes), p.residual, tol)
                    })),
                    Err(e) => v.push(CheckReport::failed(&name, format!("t=1 N={}", an.nodes), tol, &e)),
                }
            }
            v.into_iter().map(|r| r.with_cutoff(policy.cutoff)).collect()
        }
        Check::FunctionalEquation => {
            let policy = cfg.policy(an.cutoff);
            let tau = c64(0.0, 2.0);
            let rs = [0.5, 1.2];
            let mut v = Vec::new();
            for (dim, tol) in [(4u32, an.fe_d4), (3, an.fe_d3)] {
                let name = format!("functional_equation_d{dim}");
                match functional_equation_check(dim, tau, &rs, an.nodes, &policy) {
                    Ok(points) => v.extend(points.iter().map(|p| {
                        CheckReport::new(&name, format!("tau={tau} r={} N={}", p.r, an.nodes), p.residual, tol)
                    })),
                    Err(e) => v.push(CheckReport::failed(&name, format!("tau={tau}"), tol, &e)),
                }
            }
            v.into_iter().map(|r| r.with_cutoff(policy.cutoff)).collect()
        }
        Check::Asymptotic => {
            let x = cfg.cutoff.unwrap_or(an.asymptotic_x);
            let mut v = Vec::new();
            let cases = [
                ("asymptotic_even_m1m1", -1, Variant::ThetaCapEven, true),
                ("asymptotic_even_00", 0, Variant::ThetaCapEven, false),
                ("asymptotic_odd_m1m1", -1, Variant::ThetaCapOdd, true),
            ];
            for (name, mn, variant, phase) in cases {
                let params = format!("m=n={mn} weight 3/2 {variant} x<={x}");
                match asymptotic_fit(mn, mn, variant, x) {
                    Ok(fit) => {
                        v.push(CheckReport::new(format!("{name}_modulus"), &params, fit.modulus_deviation, an.asymptotic_modulus));
                        if phase {
                            v.push(CheckReport::new(format!("{name}_phase"), &params, fit.phase_deviation, an.asymptotic_phase));
                        }
                    }
                    Err(e) => v.push(CheckReport::failed(name, &params, an.asymptotic_modulus, &e)),
                }
            }
            v.into_iter().map(|r| r.with_cutoff(x)).collect()
        }
        Check::Growth => {
            let policy = cfg.policy(an.cutoff);
            let mut v = Vec::new();
            for (dim, exponent) in [(4u32, an.growth_d4), (3, an.growth_d3)] {
                let name = format!("growth_d{dim}");
                let params = format!("r=1 n<={} exponent {exponent}", an.growth_n);
                // residual: holdout ratio over the constant fitted on the first half
                let r = growth_envelope(dim, BasisVariant::Plain, 1.0, an.growth_n, exponent, &policy)
                    .map(|g| g.holdout_ratio / g.fitted_c)
                    .map_err(VerifyError::from);
                v.extend(single(&name, &params, 1.0, r));
            }
            v.into_iter().map(|r| r.with_cutoff(policy.cutoff)).collect()
        }
    };
    let secs = start.elapsed().as_secs_f64();
    for r in &mut out {
        r.runtime = secs;
    }
    out
}

/// Run the given checks concurrently; reports keep the order of `checks`.
pub fn run_checks(checks: &[Check], cfg: &VerifyConfig) -> Vec<CheckReport> {
    checks.par_iter().map(|&c| run_check(c, cfg)).collect::<Vec<_>>().concat()
}

/// Run whole suites; an empty selection yields an empty report.
pub fn run_suite(suites: &[Suite], cfg: &VerifyConfig) -> Vec<CheckReport> {
    let checks: Vec<Check> = Check::ALL.into_iter().filter(|c| suites.contains(&c.suite())).collect();
    run_checks(&checks, cfg)
}
