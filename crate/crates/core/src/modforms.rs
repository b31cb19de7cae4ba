//! Truncated q-series and point evaluations of the theta functions, the
//! weight-2 Eisenstein series, Zagier's weight-3/2 mock modular form and the
//! companion forms entering the interpolation bases.
//!
//! Series are indexed by the exponent of e^{pi i tau} (`halfperiod`) or of
//! e^{2 pi i tau}. Every point evaluation carries an upper bound for the
//! discarded tail.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_rational::Ratio;
use thiserror::Error;

use crate::arith::{divisor_sum, hurwitz_table, isqrt, r3_table};
use crate::modgroup::principal_power;
use crate::special::{gamma_upper_mhalf_scaled, quad};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModFormError {
    #[error("tau = {0} is not in the upper half-plane")]
    NotUpperHalfPlane(Complex64),
    #[error("series with different expansion variables cannot be combined")]
    HalfperiodMismatch,
    #[error("quadrature did not converge (last refinement changed the value by {0:e})")]
    QuadratureNonConvergence(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn check_tau(tau: Complex64) -> Result<(), ModFormError> {
    if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
        Ok(())
    } else {
        Err(ModFormError::NotUpperHalfPlane(tau))
    }
}

/// Coefficient rings for [`QSeries`].
pub trait Coefficient:
    Copy + Default + PartialEq + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn to_complex(self) -> Complex64;
}

impl Coefficient for i64 {
    fn to_complex(self) -> Complex64 {
        Complex64::new(self as f64, 0.0)
    }
}

impl Coefficient for i128 {
    fn to_complex(self) -> Complex64 {
        Complex64::new(self as f64, 0.0)
    }
}

impl Coefficient for f64 {
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Coefficient for Complex64 {
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// sum_{n = n_min}^{order} a_n x^n with x = e^{pi i tau} (`halfperiod`) or
/// x = e^{2 pi i tau}. Coefficients are exact for every index in range.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries<T> {
    n_min: i64,
    coeffs: Vec<T>,
    halfperiod: bool,
}

impl<T: Coefficient> QSeries<T> {
    pub fn new(n_min: i64, coeffs: Vec<T>, halfperiod: bool) -> Self {
        QSeries { n_min, coeffs, halfperiod }
    }

    /// A series with the given nonzero terms, exact up to `order`.
    pub fn from_terms(order: i64, halfperiod: bool, terms: impl IntoIterator<Item = (i64, T)>) -> Self {
        let mut coeffs = vec![T::default(); (order + 1).max(0) as usize];
        for (n, a) in terms {
            if (0..=order).contains(&n) {
                coeffs[n as usize] = coeffs[n as usize] + a;
            }
        }
        QSeries { n_min: 0, coeffs, halfperiod }
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn order(&self) -> i64 {
        self.n_min + self.coeffs.len() as i64 - 1
    }

    pub fn halfperiod(&self) -> bool {
        self.halfperiod
    }

    /// The coefficient of x^n; zero below `n_min`, unknown above `order`.
    pub fn coeff(&self, n: i64) -> Option<T> {
        if n < self.n_min {
            Some(T::default())
        } else if n > self.order() {
            None
        } else {
            Some(self.coeffs[(n - self.n_min) as usize])
        }
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, &a)| (self.n_min + i as i64, a))
    }

    fn same_variable(&self, other: &Self) -> Result<(), ModFormError> {
        if self.halfperiod == other.halfperiod {
            Ok(())
        } else {
            Err(ModFormError::HalfperiodMismatch)
        }
    }

    fn combine(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self, ModFormError> {
        self.same_variable(other)?;
        let lo = self.n_min.min(other.n_min);
        let hi = self.order().min(other.order());
        let coeffs = (lo..=hi).map(|n| f(self.coeff(n).unwrap(), other.coeff(n).unwrap())).collect();
        Ok(QSeries { n_min: lo, coeffs, halfperiod: self.halfperiod })
    }

    pub fn add(&self, other: &Self) -> Result<Self, ModFormError> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ModFormError> {
        self.combine(other, |a, b| a - b)
    }

    /// The Cauchy product, exact up to the smaller of the two orders shifted
    /// by the other factor's leading index.
    pub fn mul(&self, other: &Self) -> Result<Self, ModFormError> {
        self.same_variable(other)?;
        let lo = self.n_min + other.n_min;
        let hi = (self.order() + other.n_min).min(other.order() + self.n_min);
        let mut coeffs = vec![T::default(); (hi - lo + 1).max(0) as usize];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == T::default() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= coeffs.len() {
                    break;
                }
                coeffs[k] = coeffs[k] + a * b;
            }
        }
        Ok(QSeries { n_min: lo, coeffs, halfperiod: self.halfperiod })
    }

    pub fn scale(&self, s: T) -> Self {
        QSeries { n_min: self.n_min, coeffs: self.coeffs.iter().map(|&a| a * s).collect(), halfperiod: self.halfperiod }
    }

    pub fn truncate(&self, order: i64) -> Self {
        let keep = (order - self.n_min + 1).clamp(0, self.coeffs.len() as i64) as usize;
        QSeries { n_min: self.n_min, coeffs: self.coeffs[..keep].to_vec(), halfperiod: self.halfperiod }
    }

    /// Rewrite a period-1 series in the variable e^{pi i tau} (index doubling).
    pub fn to_halfperiod(&self) -> Self {
        if self.halfperiod {
            return self.clone();
        }
        let mut coeffs = vec![T::default(); 2 * self.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = a;
        }
        QSeries { n_min: 2 * self.n_min, coeffs, halfperiod: true }
    }

    /// f(2 tau) for a series f in e^{pi i tau}: the same coefficients, read in
    /// e^{2 pi i tau}.
    pub fn at_double_argument(&self) -> Self {
        assert!(self.halfperiod, "only period-2 series can be dilated this way");
        QSeries { n_min: self.n_min, coeffs: self.coeffs.clone(), halfperiod: false }
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(T) -> U) -> QSeries<U> {
        QSeries { n_min: self.n_min, coeffs: self.coeffs.iter().map(|&a| f(a)).collect(), halfperiod: self.halfperiod }
    }

    /// The truncated sum at tau.
    pub fn eval(&self, tau: Complex64) -> Result<Complex64, ModFormError> {
        check_tau(tau)?;
        let w = if self.halfperiod { PI } else { 2.0 * PI };
        let x = (Complex64::i() * w * tau).exp();
        // Horner in x, then the leading power
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            acc = acc * x + a.to_complex();
        }
        Ok(acc * (Complex64::i() * w * self.n_min as f64 * tau).exp())
    }

    /// One line per coefficient: `n, re, im`, preceded by a comment naming
    /// the expansion variable.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let var = if self.halfperiod { "e^{pi i n tau}" } else { "e^{2 pi i n tau}" };
        writeln!(out, "# variable {var}").unwrap();
        for (n, a) in self.coeffs() {
            let z = a.to_complex();
            writeln!(out, "{n}, {:.16e}, {:.16e}", z.re, z.im).unwrap();
        }
        out
    }
}

impl QSeries<Complex64> {
    /// Parse the output of [`QSeries::to_text`]. Indices must be consecutive.
    pub fn from_text(text: &str) -> Result<Self, ModFormError> {
        let mut halfperiod = true;
        let mut n_min = None;
        let mut coeffs = Vec::new();
        for (ix, line) in text.lines().enumerate() {
            let err = |msg: &str| ModFormError::Parse { line: ix + 1, msg: msg.to_string() };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if rest.contains("2 pi i") {
                    halfperiod = false;
                }
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(err("expected `n, re, im`"));
            }
            let n: i64 = parts[0].parse().map_err(|_| err("bad index"))?;
            let re: f64 = parts[1].parse().map_err(|_| err("bad real part"))?;
            let im: f64 = parts[2].parse().map_err(|_| err("bad imaginary part"))?;
            let start = *n_min.get_or_insert(n);
            if n != start + coeffs.len() as i64 {
                return Err(err("indices are not consecutive"));
            }
            coeffs.push(Complex64::new(re, im));
        }
        Ok(QSeries { n_min: n_min.unwrap_or(0), coeffs, halfperiod })
    }
}

/// A value at tau together with an upper bound for the truncation tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEval {
    pub tau: Complex64,
    pub value: Complex64,
    pub tail_bound: f64,
}

/// A truncation order in e^{pi i tau} after which the terms of the series
/// used here drop below 1e-17.
pub fn auto_order(tau: Complex64) -> usize {
    let y = tau.im.max(1e-3);
    (48.0 / (PI * y)).ceil() as usize + 8
}

/// Bound for sum_{n > last} coef n^p x^n using the ratio of consecutive
/// terms.
fn poly_geometric_tail(coef: f64, p: i32, x: f64, last: usize) -> f64 {
    let n = last as f64;
    let first = coef * (n + 1.0).powi(p) * x.powf(n + 1.0);
    let ratio = ((n + 2.0) / (n + 1.0)).powi(p) * x;
    if ratio < 1.0 {
        first / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Theta(tau) = sum_n e^{pi i n^2 tau}, as a series in e^{pi i tau}.
pub fn theta_cap_series(order: usize) -> QSeries<i64> {
    let m = isqrt(order as u64) as i64;
    QSeries::from_terms(order as i64, true, (0..=m).map(|k| (k * k, if k == 0 { 1 } else { 2 })))
}

/// theta(tau) = sum_n e(n^2 tau) = Theta(2 tau), as a series in e^{2 pi i tau}.
pub fn theta_series(order: usize) -> QSeries<i64> {
    let m = isqrt(order as u64) as i64;
    QSeries::from_terms(order as i64, false, (0..=m).map(|k| (k * k, if k == 0 { 1 } else { 2 })))
}

/// Theta(tau) summed over |n| <= ceil(sqrt(order)).
pub fn theta_cap(tau: Complex64, order: usize) -> Result<PointEval, ModFormError> {
    check_tau(tau)?;
    let m = (order as f64).sqrt().ceil() as i64;
    let mut s = Complex64::new(1.0, 0.0);
    for k in 1..=m {
        s += 2.0 * (Complex64::i() * PI * (k * k) as f64 * tau).exp();
    }
    let x = (-PI * tau.im).exp();
    let mf = m as f64;
    let tail = 2.0 * x.powf((mf + 1.0).powi(2)) / (1.0 - x.powf(2.0 * mf + 3.0));
    Ok(PointEval { tau, value: s, tail_bound: tail })
}

/// theta(tau) = Theta(2 tau).
pub fn theta(tau: Complex64, order: usize) -> Result<PointEval, ModFormError> {
    let v = theta_cap(2.0 * tau, order)?;
    Ok(PointEval { tau, ..v })
}

/// E_2 = 1 - 24 sum sigma_1(n) q^n, q = e^{2 pi i tau}.
pub fn eisenstein_e2_series(order: usize) -> QSeries<i64> {
    let terms = (1..=order as u64).map(|n| (n as i64, -24 * divisor_sum(n, 1) as i64));
    QSeries::from_terms(order as i64, false, std::iter::once((0, 1)).chain(terms))
}

pub fn eisenstein_e2(tau: Complex64, order: usize) -> Result<PointEval, ModFormError> {
    let value = eisenstein_e2_series(order).map(|a| a as f64).eval(tau)?;
    // sigma_1(n) <= n^2
    let tail = poly_geometric_tail(24.0, 2, (-2.0 * PI * tau.im).exp(), order);
    Ok(PointEval { tau, value, tail_bound: tail })
}

/// A_4(n) = sigma_1(n/2) - (-1)^n sigma_1(n) for 0 <= n <= n_max, with
/// A_4(0) = 0.
pub fn a4_coefficients(n_max: usize) -> Vec<i64> {
    let mut out = vec![0i64; n_max + 1];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        let s = divisor_sum(n as u64, 1) as i64;
        let half = if n % 2 == 0 { divisor_sum(n as u64 / 2, 1) as i64 } else { 0 };
        *slot = half - if n % 2 == 0 { s } else { -s };
    }
    out
}

/// Both sides of 2 sum A_4(n) q^n * sum_{n in Z} q^{n^2} = sum_{n in Z} n^2 q^{n^2}
/// as exact integer series in q, truncated at `order`.
pub fn a4_generating_identity(order: usize) -> (QSeries<i128>, QSeries<i128>) {
    let a4 = a4_coefficients(order);
    let gen = QSeries::from_terms(order as i64, false, a4.iter().enumerate().map(|(n, &a)| (n as i64, 2 * a as i128)));
    let th = theta_series(order).map(|a| a as i128);
    let lhs = gen.mul(&th).expect("same variable");
    let m = isqrt(order as u64) as i64;
    let rhs = QSeries::from_terms(order as i64, false, (1..=m).map(|k| (k * k, 2 * (k * k) as i128)));
    (lhs, rhs)
}

/// The holomorphic part 24 sum A_4(n) e^{pi i n tau} of the weight-2 form
/// below.
pub fn curly_e2_holomorphic(order: usize) -> QSeries<i64> {
    let a4 = a4_coefficients(order);
    QSeries::from_terms(order as i64, true, a4.iter().enumerate().map(|(n, &a)| (n as i64, 24 * a)))
}

/// -3/(pi y) + 24 sum A_4(n) e^{pi i n tau}, which satisfies
/// f(tau) + (tau/i)^{-2} f(-1/tau) = 0.
pub fn curly_e2(tau: Complex64, order: usize) -> Result<PointEval, ModFormError> {
    let hol = curly_e2_holomorphic(order).map(|a| a as f64).eval(tau)?;
    let tail = poly_geometric_tail(48.0, 2, (-PI * tau.im).exp(), order);
    Ok(PointEval { tau, value: hol - 3.0 / (PI * tau.im), tail_bound: tail })
}

/// E_2(tau) - tau^{-2} E_2(-1/tau) + 12/(2 pi i tau).
pub fn e2_transformation_residual(tau: Complex64, order: usize) -> Result<f64, ModFormError> {
    let a = eisenstein_e2(tau, order)?.value;
    let b = eisenstein_e2(-1.0 / tau, order)?.value;
    let rhs = -12.0 / (2.0 * PI * Complex64::i() * tau);
    Ok((a - b / (tau * tau) - rhs).norm())
}

pub fn curly_e2_residual(tau: Complex64, order: usize) -> Result<f64, ModFormError> {
    let a = curly_e2(tau, order)?.value;
    let b = curly_e2(-1.0 / tau, order)?.value;
    Ok((a + b * principal_power(tau / Complex64::i(), -4)).norm())
}

/// The weight-3/2 coefficient stream 8 H(n) + r_3(n)/6, exactly.
pub fn a3_coefficients(n_max: usize) -> Vec<Ratio<i64>> {
    let h = hurwitz_table(n_max);
    let r = r3_table(n_max);
    (0..=n_max)
        .map(|n| Ratio::new(2 * h[n].twelfths, 3) + Ratio::new(r[n] as i64, 6))
        .collect()
}

/// -1/12 + sum_{n >= 1} H(n) q^n, q = e^{2 pi i tau}, exact.
pub fn zagier_holomorphic(order: usize) -> QSeries<Ratio<i64>> {
    let h = hurwitz_table(order);
    QSeries::new(0, h.iter().map(|x| Ratio::new(x.twelfths, 12)).collect(), false)
}

/// sum_{n >= 0} (H(n) + r_3(n)/48) e^{pi i n tau}, exact.
pub fn h_star_holomorphic(order: usize) -> QSeries<Ratio<i64>> {
    let h = hurwitz_table(order);
    let r = r3_table(order);
    QSeries::new(
        0,
        (0..=order).map(|n| Ratio::new(h[n].twelfths, 12) + Ratio::new(r[n] as i64, 48)).collect(),
        true,
    )
}

impl Coefficient for Ratio<i64> {
    fn to_complex(self) -> Complex64 {
        Complex64::new(*self.numer() as f64 / *self.denom() as f64, 0.0)
    }
}

/// sum_{m >= 1} m Gamma(-1/2, 2 w m^2 y) e(-w m^2 x) with the matching
/// growth factor e^{w m^2 y}: the non-holomorphic tail of the mock forms.
/// Here w = 2 pi for x = e^{2 pi i tau} and w = pi for e^{pi i tau}.
fn mock_sum(tau: Complex64, w: f64, m_max: i64) -> (Complex64, f64) {
    let y = tau.im;
    let mut s = Complex64::new(0.0, 0.0);
    for m in 1..=m_max {
        let mm = (m * m) as f64;
        let x = 2.0 * w * mm * y;
        // Gamma(-1/2, x) |e^{-i w m^2 tau}| = e^{x} Gamma(-1/2, x) e^{-x/2}
        let mag = m as f64 * gamma_upper_mhalf_scaled(x) * (-x / 2.0).exp();
        s += Complex64::from_polar(mag, -w * mm * tau.re);
    }
    let mf = (m_max + 1) as f64;
    let x = 2.0 * w * mf * mf * y;
    let first = mf * x.powf(-1.5) * (-x / 2.0).exp();
    let tail = first / (1.0 - (-w * (2.0 * mf + 1.0) * y).exp());
    (s, tail)
}

/// Zagier's weight-3/2 form: -1/12 + sum H(n) q^n + 1/(8 pi sqrt y)
/// + (1/(4 sqrt pi)) sum m Gamma(-1/2, 4 pi m^2 y) q^{-m^2}.
pub fn zagier_h(tau: Complex64, order: usize) -> Result<PointEval, ModFormError> {
    check_tau(tau)?;
    let hol = zagier_holomorphic(order).eval(tau)?;
    let m_max = (order as f64).sqrt().ceil() as i64;
    let (mock, mock_tail) = mock_sum(tau, 2.0 * PI, m_max);
    let value = hol + 1.0 / (8.0 * PI * tau.im.sqrt()) + mock / (4.0 * PI.sqrt());
    // H(n) <= n
    let tail = poly_geometric_tail(1.0, 1, (-2.0 * PI * tau.im).exp(), order) + mock_tail / (4.0 * PI.sqrt());
    Ok(PointEval { tau, value, tail_bound: tail })
}

/// H*(tau) = H(tau/2) + Theta(tau)^3 / 48, evaluated from its own expansion
/// -1/16 + sum (H(n) + r_3(n)/48) e^{pi i n tau}
/// + (1/(8 pi)) (sqrt(2/y) + 2 sqrt(pi) sum m Gamma(-1/2, 2 pi m^2 y) e^{-pi i m^2 tau}).
pub fn h_star(tau: Complex64, order: usize) -> Result<PointEval, ModFormError> {
    check_tau(tau)?;
    let hol = h_star_holomorphic(order).eval(tau)?;
    let m_max = (order as f64).sqrt().ceil() as i64;
    let (mock, mock_tail) = mock_sum(tau, PI, m_max);
    let value = hol + ((2.0 / tau.im).sqrt() + 2.0 * PI.sqrt() * mock) / (8.0 * PI);
    // H(n) + r_3(n)/48 <= 2n
    let tail = poly_geometric_tail(2.0, 1, (-PI * tau.im).exp(), order) + mock_tail / (4.0 * PI.sqrt());
    Ok(PointEval { tau, value, tail_bound: tail })
}

/// |H(tau) + (2 tau/i)^{-3/2} H(-1/(4 tau)) + Theta(2 tau)^3 / 24|.
pub fn zagier_identity_residual(tau: Complex64, order: usize) -> Result<f64, ModFormError> {
    let a = zagier_h(tau, order)?.value;
    let b = zagier_h(-1.0 / (4.0 * tau), order)?.value;
    let th = theta_cap(2.0 * tau, order)?.value;
    let f = principal_power(2.0 * tau / Complex64::i(), -3);
    Ok((a + f * b + th * th * th / 24.0).norm())
}

/// |(-i tau)^{-3/2} H*(-1/tau) + H*(tau)|.
pub fn h_star_residual(tau: Complex64, order: usize) -> Result<f64, ModFormError> {
    let a = h_star(tau, order)?.value;
    let b = h_star(-1.0 / tau, order)?.value;
    Ok((principal_power(-Complex64::i() * tau, -3) * b + a).norm())
}

/// int_0^{i infinity} (tau + u)^{-3/2} du along the imaginary axis.
pub fn contour_power_integral(tau: Complex64) -> Result<Complex64, ModFormError> {
    check_tau(tau)?;
    let i = Complex64::i();
    Ok(i * quad::tanh_sinh_inf(|t| principal_power(tau + i * t, -3), 0.0, 1e-13))
}

/// theta(it) - 1, using theta(it) = theta(i/(4t)) / sqrt(2t) for small t.
fn theta_imag_minus_one(t: f64) -> f64 {
    let tail = |s: f64| {
        let mut acc = 0.0;
        for n in 1.. {
            let v = (-2.0 * PI * (n * n) as f64 * s).exp();
            acc += v;
            if v < 1e-20 * acc.max(1e-300) || v == 0.0 {
                break;
            }
        }
        2.0 * acc
    };
    if t >= 0.5 {
        tail(t)
    } else {
        (1.0 + tail(1.0 / (4.0 * t))) / (2.0 * t).sqrt() - 1.0
    }
}

/// e^z - 1 without cancellation for small |z|.
fn cexpm1(z: Complex64) -> Complex64 {
    let em1 = libm::expm1(z.re);
    let s = (z.im / 2.0).sin();
    Complex64::new(em1 * z.im.cos() - 2.0 * s * s, z.re.exp() * z.im.sin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma92Report {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Both sides of
/// (1+i)/(16 pi) int_0^{i inf} theta(u) (tau+u)^{-3/2} du
///   = sqrt(tau/(8i)) int_R e(xi^2 tau) (1 + e(2 xi tau)) / (1 - e(2 xi tau)) xi dxi,
/// each by tanh-sinh quadrature. On the left the constant term of theta is
/// integrated in closed form; on the right the integrand is even in xi.
pub fn lemma92_check(tau: Complex64) -> Result<Lemma92Report, ModFormError> {
    check_tau(tau)?;
    let i = Complex64::i();
    let tol = 1e-12;
    let accept = |(v, err): (Complex64, f64)| {
        if err <= 1e-9 * v.norm().max(1.0) {
            Ok(v)
        } else {
            Err(ModFormError::QuadratureNonConvergence(err))
        }
    };
    // theta(it) - 1 < 1e-16 beyond this height
    let top = (2e16f64).ln() / (2.0 * PI);
    let f = |t: f64| principal_power(tau + i * t, -3) * theta_imag_minus_one(t);
    let low = accept(quad::tanh_sinh_estimate(f, 0.0, 1.0, tol))?;
    let high = accept(quad::tanh_sinh_estimate(f, 1.0, top, tol))?;
    let lhs = (1.0 + i) / (16.0 * PI) * (2.0 * principal_power(tau, -1) + i * (low + high));

    let g = |xi: f64| {
        if xi == 0.0 {
            // xi (1 + w)/(1 - w) -> -1/(2 pi i tau)
            return -1.0 / (2.0 * PI * i * tau);
        }
        let z = 4.0 * PI * i * xi * tau;
        let w = z.exp();
        let ratio = (1.0 + w) / -cexpm1(z);
        (2.0 * PI * i * xi * xi * tau).exp() * ratio * xi
    };
    // e^{-2 pi xi^2 y} xi < 1e-18 beyond this point
    let edge = (45.0 / (2.0 * PI * tau.im)).sqrt() + 1.0;
    let mut total = Complex64::new(0.0, 0.0);
    let pieces = (edge.ceil() as usize).max(2);
    for k in 0..pieces {
        let a = edge * k as f64 / pieces as f64;
        let b = edge * (k + 1) as f64 / pieces as f64;
        total += accept(quad::tanh_sinh_estimate(g, a, b, tol))?;
    }
    let rhs = principal_power(tau / (8.0 * i), 1) * 2.0 * total;
    Ok(Lemma92Report { lhs, rhs, residual: (lhs - rhs).norm() })
}
