//! Radial Fourier interpolation bases in dimensions 3 and 4.
//!
//! b_{4,n} = B_{4,n} + 8 sin(pi r^2)/(pi r^2) A_4(n) and
//! b_{3,n} = B_{3,n} - sin(pi r^2)/(r sinh(pi r)) A_3(n), likewise for the
//! tilde functions, where B and B~ are Bessel/sine-weighted series of
//! real-variable Kloosterman sums over even (plain) or odd (tilde) moduli,
//! summed in increasing modulus order with terminal Cesaro averaging.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use thiserror::Error;

use crate::arith::{divisor_sum, hurwitz, r3, valuation};
use crate::kernel::{e_frac, APhase, FrameKind};
use crate::modforms::{a3_coefficients, a4_coefficients};
use crate::rv::{cesaro_series, CesaroValue, SeriesTerms};
use crate::special::{bessel_j1, bessel_j_half, sinc_factor_3, sinc_factor_4};

pub use crate::rv::TruncationPolicy;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("dimension {0} is not supported (use 3 or 4)")]
    Dimension(u32),
    #[error("invalid truncation policy: {0}")]
    Policy(String),
    #[error("r = {0} is not finite")]
    NonFinite(f64),
    #[error("series did not settle: oscillation {oscillation:e} exceeds {tol:e}")]
    NonConvergedOscillation { value: BasisValue, oscillation: f64, tol: f64 },
    #[error("{0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisVariant {
    Plain,
    Tilde,
}

impl BasisVariant {
    pub fn tag(self) -> &'static str {
        match self {
            BasisVariant::Plain => "plain",
            BasisVariant::Tilde => "tilde",
        }
    }
}

impl fmt::Display for BasisVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BasisVariant {
    type Err = BasisError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(BasisVariant::Plain),
            "tilde" => Ok(BasisVariant::Tilde),
            _ => Err(BasisError::Parse(format!("unknown variant `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisRequest {
    pub dimension: u32,
    pub n: u64,
    pub r: f64,
    pub variant: BasisVariant,
    pub policy: TruncationPolicy,
}

/// value = kl_part + correction_part in dimension 4 and
/// value = kl_part - correction_part in dimension 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisValue {
    pub value: f64,
    pub kl_part: f64,
    pub correction_part: f64,
    pub oscillation: f64,
    /// |Im| of the phase-normalized series, which is real in exact arithmetic.
    pub imag_residue: f64,
    pub converged: bool,
}

impl BasisValue {
    fn exact(kl: f64, correction: f64, dim: u32) -> Self {
        let value = if dim == 4 { kl + correction } else { kl - correction };
        BasisValue { value, kl_part: kl, correction_part: correction, oscillation: 0.0, imag_residue: 0.0, converged: true }
    }

    /// Turn an unsettled value into an error.
    pub fn require_converged(self, tol: f64) -> Result<Self, BasisError> {
        if self.converged {
            Ok(self)
        } else {
            Err(BasisError::NonConvergedOscillation { value: self, oscillation: self.oscillation, tol })
        }
    }
}

fn check_dim(dim: u32) -> Result<(), BasisError> {
    if dim == 3 || dim == 4 {
        Ok(())
    } else {
        Err(BasisError::Dimension(dim))
    }
}

fn check_policy(p: &TruncationPolicy) -> Result<(), BasisError> {
    p.validate().map_err(BasisError::Policy)
}

/// Moduli and frame family of the plain (even c) and tilde (odd c) series.
fn series_shape(variant: BasisVariant) -> (FrameKind, u64) {
    match variant {
        BasisVariant::Plain => (FrameKind::ThetaEven, 2),
        BasisVariant::Tilde => (FrameKind::ThetaOdd, 1),
    }
}

/// The constant phase in front of the dimension-3 series.
fn phase3(variant: BasisVariant) -> Complex64 {
    match variant {
        BasisVariant::Plain => e_frac(1.0 / 8.0),
        BasisVariant::Tilde => e_frac(-3.0 / 8.0),
    }
}

/// B_{d,n}(r) (or the tilde series) for every r > 0 in `rs` and every
/// n = 1..=n_max, as `out[ir][n - 1]`.
pub fn big_b_grid(
    dim: u32,
    variant: BasisVariant,
    rs: &[f64],
    n_max: usize,
    policy: &TruncationPolicy,
) -> Result<Vec<Vec<CesaroValue>>, BasisError> {
    check_dim(dim)?;
    check_policy(policy)?;
    if let Some(&r) = rs.iter().find(|r| !r.is_finite() || **r <= 0.0) {
        return Err(BasisError::NonFinite(r));
    }
    if rs.is_empty() || n_max == 0 {
        return Ok(vec![Vec::new(); rs.len()]);
    }
    let phases: Vec<APhase> = rs.iter().map(|&r| APhase::from_real(r * r)).collect();
    let (kind, first) = series_shape(variant);
    let terms =
        SeriesTerms { kind, weight2k: dim as i64, first, step: 2, phases: &phases, n_max, n_sign: 1 };
    let sqrt_n: Vec<f64> = (0..=n_max).map(|n| (n as f64).sqrt()).collect();
    let vals = if dim == 4 {
        let sign = if variant == BasisVariant::Plain { 1.0 } else { -1.0 };
        cesaro_series(&terms, policy, |c, ix, n| {
            let r = rs[ix];
            let cf = c as f64;
            let x = 2.0 * PI * r * sqrt_n[n] / cf;
            Complex64::new(sign * PI * sqrt_n[n] / r * bessel_j1(x) / cf, 0.0)
        })
    } else {
        let ph = phase3(variant);
        cesaro_series(&terms, policy, |c, ix, n| {
            let r = rs[ix];
            let cf = c as f64;
            ph * ((2.0 * PI * r * sqrt_n[n] / cf).sin() / (r * cf.sqrt()))
        })
    };
    Ok(vals.chunks(n_max).map(|c| c.to_vec()).collect())
}

/// The r -> 0 limits of the series: pi^2 n sum S(0, n, c)/c^2 in dimension 4
/// and e(1/8) 2 pi sqrt(n) sum S(0, n, c)/c^{3/2} in dimension 3 (signs and
/// phases of the tilde series as in the definitions), for n = 1..=n_max.
pub fn big_b_zero_series(
    dim: u32,
    variant: BasisVariant,
    n_max: usize,
    policy: &TruncationPolicy,
) -> Result<Vec<CesaroValue>, BasisError> {
    check_dim(dim)?;
    check_policy(policy)?;
    let phases = [APhase::Int(0)];
    let (kind, first) = series_shape(variant);
    let terms =
        SeriesTerms { kind, weight2k: dim as i64, first, step: 2, phases: &phases, n_max, n_sign: 1 };
    Ok(if dim == 4 {
        let sign = if variant == BasisVariant::Plain { 1.0 } else { -1.0 };
        cesaro_series(&terms, policy, |c, _, n| {
            let cf = c as f64;
            Complex64::new(sign * PI * PI * n as f64 / (cf * cf), 0.0)
        })
    } else {
        let ph = phase3(variant);
        cesaro_series(&terms, policy, |c, _, n| {
            let cf = c as f64;
            ph * (2.0 * PI * (n as f64).sqrt() / (cf * cf.sqrt()))
        })
    })
}

/// A_3(n) = 8 H(n) + r_3(n)/6; A_3(0) = -1/2.
pub fn a3(n: u64) -> Ratio<i64> {
    Ratio::new(2 * hurwitz(n).twelfths, 3) + Ratio::new(r3(n) as i64, 6)
}

/// A_4(n) = sigma_1(n/2) - (-1)^n sigma_1(n); A_4(0) = 0.
pub fn a4(n: u64) -> i64 {
    if n == 0 {
        return 0;
    }
    let s = divisor_sum(n, 1) as i64;
    if n % 2 == 0 {
        divisor_sum(n / 2, 1) as i64 - s
    } else {
        s
    }
}

/// B_{d,n}(0) and the tilde analogue in closed form, n >= 1.
pub fn big_b_at_zero(dim: u32, n: u64, variant: BasisVariant) -> Result<Ratio<i64>, BasisError> {
    check_dim(dim)?;
    if n == 0 {
        return Ok(Ratio::from_integer(0));
    }
    Ok(if dim == 4 {
        let h = valuation(n as i64, 2).expect("n > 0");
        let s = 8 * divisor_sum(n, 1) as i64;
        let den = (1i64 << (h + 1)) - 1;
        match variant {
            BasisVariant::Plain if n % 2 == 1 => Ratio::from_integer(0),
            BasisVariant::Plain => Ratio::new(s * ((1i64 << h) - 3), den),
            BasisVariant::Tilde => Ratio::new(s << h, den),
        }
    } else {
        let eight_h = Ratio::new(2 * hurwitz(n).twelfths, 3);
        let r = r3(n) as i64;
        match variant {
            BasisVariant::Plain => eight_h - Ratio::new(r, 3),
            BasisVariant::Tilde => eight_h + Ratio::new(2 * r, 3),
        }
    })
}

fn ratio_f64(x: Ratio<i64>) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// The correction term multiplying A_d(n): 8 sin(pi r^2)/(pi r^2) A_4(n) or
/// sin(pi r^2)/(r sinh(pi r)) A_3(n).
fn correction(dim: u32, r: f64, a3s: &[Ratio<i64>], a4s: &[i64], n: usize) -> f64 {
    if dim == 4 {
        sinc_factor_4(r) * a4s[n] as f64
    } else {
        sinc_factor_3(r) * ratio_f64(a3s[n])
    }
}

/// b_{d,n}(r) (or b~) for n = 0..=n_max at one r.
pub fn basis_b_batch(
    dim: u32,
    variant: BasisVariant,
    r: f64,
    n_max: usize,
    policy: &TruncationPolicy,
) -> Result<Vec<BasisValue>, BasisError> {
    Ok(basis_b_grid(dim, variant, &[r], n_max, policy)?.pop().unwrap())
}

/// b_{d,n}(r) for every r in `rs` and n = 0..=n_max, as `out[ir][n]`.
/// r = 0 uses the closed forms; b_{4,0} = 0 and b_{3,0} is elementary.
pub fn basis_b_grid(
    dim: u32,
    variant: BasisVariant,
    rs: &[f64],
    n_max: usize,
    policy: &TruncationPolicy,
) -> Result<Vec<Vec<BasisValue>>, BasisError> {
    check_dim(dim)?;
    check_policy(policy)?;
    if let Some(&r) = rs.iter().find(|r| !r.is_finite()) {
        return Err(BasisError::NonFinite(r));
    }
    let a3s = a3_coefficients(n_max);
    let a4s = a4_coefficients(n_max);
    let positive: Vec<f64> = rs.iter().map(|r| r.abs()).filter(|&r| r > 0.0).collect();
    let series = big_b_grid(dim, variant, &positive, n_max, policy)?;
    let mut series = series.into_iter();
    let mut out = Vec::with_capacity(rs.len());
    for &r in rs {
        let r = r.abs();
        let mut row = Vec::with_capacity(n_max + 1);
        // n = 0 has no Kloosterman part
        row.push(BasisValue::exact(0.0, correction(dim, r, &a3s, &a4s, 0), dim));
        if r == 0.0 {
            for n in 1..=n_max {
                let kl = ratio_f64(big_b_at_zero(dim, n as u64, variant)?);
                row.push(BasisValue::exact(kl, correction(dim, 0.0, &a3s, &a4s, n), dim));
            }
        } else {
            let vals = series.next().expect("one series per positive r");
            for (k, v) in vals.iter().enumerate() {
                let n = k + 1;
                let corr = correction(dim, r, &a3s, &a4s, n);
                let kl = v.value.re;
                let value = if dim == 4 { kl + corr } else { kl - corr };
                let osc = v.oscillation;
                row.push(BasisValue {
                    value,
                    kl_part: kl,
                    correction_part: corr,
                    oscillation: osc,
                    imag_residue: v.value.im.abs(),
                    converged: osc <= policy.tol,
                });
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// A single b_{d,n}(r).
pub fn basis_b(req: &BasisRequest) -> Result<BasisValue, BasisError> {
    let row = basis_b_batch(req.dimension, req.variant, req.r, req.n as usize, &req.policy)?;
    Ok(row[req.n as usize])
}

/// The kl_part of a single request.
pub fn big_b(req: &BasisRequest) -> Result<BasisValue, BasisError> {
    let v = basis_b(req)?;
    Ok(BasisValue { value: v.kl_part, ..v })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// The odd functions d_n^+(x) = x B_{3,n} + x B~_{3,n} - 2 sin(pi x^2)/sinh(pi x) A_3(n)
/// and d_n^-(x) = x B_{3,n} - x B~_{3,n}, for n = 0..=n_max; B_{3,0} = 0.
/// Returns (value, oscillation) pairs.
pub fn d_n_pm_batch(n_max: usize, x: f64, sign: Sign, policy: &TruncationPolicy) -> Result<Vec<(f64, f64)>, BasisError> {
    if !x.is_finite() {
        return Err(BasisError::NonFinite(x));
    }
    let r = x.abs();
    let s = x.signum();
    let plain = basis_b_batch(3, BasisVariant::Plain, r, n_max, policy)?;
    let tilde = basis_b_batch(3, BasisVariant::Tilde, r, n_max, policy)?;
    let a3s = a3_coefficients(n_max);
    Ok((0..=n_max)
        .map(|n| {
            let (p, t) = (plain[n], tilde[n]);
            let osc = r * (p.oscillation + t.oscillation);
            let v = match sign {
                // 2 sin(pi x^2)/sinh(pi x) = 2 x sin(pi r^2)/(r sinh(pi r))
                Sign::Plus => r * (p.kl_part + t.kl_part) - 2.0 * r * sinc_factor_3(r) * ratio_f64(a3s[n]),
                Sign::Minus => r * (p.kl_part - t.kl_part),
            };
            (if x == 0.0 { 0.0 } else { s * v }, osc)
        })
        .collect())
}

pub fn d_n_pm(n: u64, x: f64, sign: Sign, policy: &TruncationPolicy) -> Result<(f64, f64), BasisError> {
    Ok(d_n_pm_batch(n as usize, x, sign, policy)?[n as usize])
}

/// Residuals of K_n(sqrt m) = e(-1/8) delta_{m,n} sqrt m (plain) and
/// K~_n(sqrt m) = 0 (tilde), with K_n(r) = sum K(r^2, n, c)/sqrt(c) sin(2 pi r sqrt(n)/c),
/// for 1 <= m, n <= size: `out[m - 1][n - 1] = (residual, oscillation)`.
pub fn kn_delta_check(variant: BasisVariant, size: usize, policy: &TruncationPolicy) -> Result<Vec<Vec<(f64, f64)>>, BasisError> {
    check_policy(policy)?;
    let phases: Vec<APhase> = (1..=size as i64).map(APhase::Int).collect();
    let (kind, first) = series_shape(variant);
    let terms = SeriesTerms { kind, weight2k: 3, first, step: 2, phases: &phases, n_max: size, n_sign: 1 };
    let vals = cesaro_series(&terms, policy, |c, ix, n| {
        let cf = c as f64;
        let m = (ix + 1) as f64;
        Complex64::new((2.0 * PI * (m * n as f64).sqrt() / cf).sin() / cf.sqrt(), 0.0)
    });
    let target = |m: usize, n: usize| {
        if variant == BasisVariant::Plain && m == n {
            e_frac(-1.0 / 8.0) * (m as f64).sqrt()
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    Ok((1..=size)
        .map(|m| {
            (1..=size)
                .map(|n| {
                    let v = vals[(m - 1) * size + n - 1];
                    ((v.value - target(m, n)).norm(), v.oscillation)
                })
                .collect()
        })
        .collect())
}

/// Residuals of
/// 2 pi e(-1/8) (n/m)^{1/4} sum_{4|c} S(-m, -n, c, nu_theta)/c J_{1/2}(4 pi sqrt(mn)/c) = delta_{m,n}
/// for 1 <= m, n <= size, over 4 | c <= policy.cutoff.
pub fn half_integral_delta_check(size: usize, policy: &TruncationPolicy) -> Result<Vec<Vec<(f64, f64)>>, BasisError> {
    check_policy(policy)?;
    // ascending a-phases -size, ..., -1 share the power recursion
    let phases: Vec<APhase> = (1..=size as i64).rev().map(|m| APhase::Int(-m)).collect();
    let terms = SeriesTerms { kind: FrameKind::Level4, weight2k: 1, first: 4, step: 4, phases: &phases, n_max: size, n_sign: -1 };
    let front = 2.0 * PI * e_frac(-1.0 / 8.0);
    let vals = cesaro_series(&terms, policy, |c, ix, n| {
        let m = (size - ix) as f64;
        let nf = n as f64;
        let cf = c as f64;
        front * ((nf / m).powf(0.25) * bessel_j_half(4.0 * PI * (m * nf).sqrt() / cf) / cf)
    });
    Ok((1..=size)
        .map(|m| {
            (1..=size)
                .map(|n| {
                    let v = vals[(size - m) * size + n - 1];
                    let target = if m == n { 1.0 } else { 0.0 };
                    ((v.value - target).norm(), v.oscillation)
                })
                .collect()
        })
        .collect())
}

/// |b_{d,n}(r)| for n = 1..=n_max together with the least constant C such
/// that the first half of the range satisfies |b_n| <= C n^exponent, and
/// the largest ratio |b_n| / n^exponent over the second half.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub magnitudes: Vec<f64>,
    pub exponent: f64,
    pub fitted_c: f64,
    pub holdout_ratio: f64,
}

impl GrowthReport {
    pub fn holds(&self) -> bool {
        self.holdout_ratio <= self.fitted_c
    }
}

pub fn growth_envelope(
    dim: u32,
    variant: BasisVariant,
    r: f64,
    n_max: usize,
    exponent: f64,
    policy: &TruncationPolicy,
) -> Result<GrowthReport, BasisError> {
    let row = basis_b_batch(dim, variant, r, n_max, policy)?;
    let magnitudes: Vec<f64> = row[1..].iter().map(|v| v.value.abs()).collect();
    let ratio = |k: usize| magnitudes[k] / ((k + 1) as f64).powf(exponent);
    let half = n_max / 2;
    let fitted_c = (0..half).map(ratio).fold(0.0, f64::max);
    let holdout_ratio = (half..n_max).map(ratio).fold(0.0, f64::max);
    Ok(GrowthReport { magnitudes, exponent, fitted_c, holdout_ratio })
}

/// One row of a basis table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub dim: u32,
    pub n: u64,
    pub variant: BasisVariant,
    pub r: f64,
    pub value: f64,
    pub oscillation: f64,
}

/// A batch of basis evaluations: every n in `ns` at every r in `r_grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRequest {
    pub dim: u32,
    pub ns: Vec<u64>,
    pub variant: BasisVariant,
    pub r_grid: Vec<f64>,
}

pub fn evaluate_table(requests: &[TableRequest], policy: &TruncationPolicy) -> Result<Vec<TableRow>, BasisError> {
    let mut rows = Vec::new();
    for req in requests {
        let n_max = req.ns.iter().copied().max().unwrap_or(0) as usize;
        if req.ns.is_empty() || req.r_grid.is_empty() {
            continue;
        }
        let grid = basis_b_grid(req.dim, req.variant, &req.r_grid, n_max, policy)?;
        for (&r, vals) in req.r_grid.iter().zip(&grid) {
            for &n in &req.ns {
                let v = vals[n as usize];
                rows.push(TableRow { dim: req.dim, n, variant: req.variant, r, value: v.value, oscillation: v.oscillation });
            }
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "dim,n,variant,r,value,oscillation";

/// Rows as CSV with 17 significant digits.
pub fn rows_to_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{:.16e}",
            row.dim, row.n, row.variant, row.r, row.value, row.oscillation
        )
        .unwrap();
    }
    out
}

pub fn rows_from_csv(text: &str) -> Result<Vec<TableRow>, BasisError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => return Err(BasisError::Parse("missing header".into())),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = || BasisError::Parse(format!("bad row `{line}`"));
            if f.len() != 6 {
                return Err(bad());
            }
            Ok(TableRow {
                dim: f[0].parse().map_err(|_| bad())?,
                n: f[1].parse().map_err(|_| bad())?,
                variant: f[2].parse()?,
                r: f[3].parse().map_err(|_| bad())?,
                value: f[4].parse().map_err(|_| bad())?,
                oscillation: f[5].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}
