//! Special functions: Bessel functions of integer and half order, the upper
//! incomplete gamma function at -1/2, the sinc-type correction factors of the
//! interpolation bases, double-double arithmetic and tanh-sinh quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialFnConfig {
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Evaluate power series in double-double arithmetic.
    pub extended: bool,
}

impl Default for SpecialFnConfig {
    fn default() -> Self {
        SpecialFnConfig { rel_tol: 1e-17, max_terms: 200, extended: false }
    }
}

/// Below this the power series is used.
pub const SERIES_LIMIT: f64 = 8.0;
/// At and above this the Hankel expansion is used; in between, the
/// trapezoidal rule on Bessel's integral, which is spectrally accurate.
pub const HANKEL_LIMIT: f64 = 25.0;

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// Power series sum_j (-1)^j (x/2)^{2j+n} / (j! (j+n)!).
pub fn bessel_jn_series(n: u32, x: f64, cfg: &SpecialFnConfig) -> f64 {
    if cfg.extended {
        return dd::bessel_series(n, x, cfg.max_terms).to_f64();
    }
    let h = x / 2.0;
    let h2 = h * h;
    let mut t = h.powi(n as i32) / factorial(n);
    let mut s = t;
    for j in 1..cfg.max_terms {
        t *= -h2 / (j as f64 * (j + n as usize) as f64);
        s += t;
        if t.abs() <= cfg.rel_tol * s.abs() {
            break;
        }
    }
    s
}

/// Trapezoidal rule on (1/2pi) int_0^{2pi} cos(n t - x sin t) dt.
pub fn bessel_jn_trapezoid(n: u32, x: f64) -> f64 {
    let m = 2 * ((x.abs() as usize) + n as usize + 40);
    let mut s = 0.0;
    for j in 0..m {
        let t = 2.0 * PI * j as f64 / m as f64;
        s += (n as f64 * t - x * t.sin()).cos();
    }
    s / m as f64
}

/// Hankel's asymptotic expansion for large x.
pub fn bessel_jn_hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64).powi(2);
    let (mut p, mut q) = (0.0, 0.0);
    let mut term: f64 = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        if term.abs() > prev || term.abs() < 1e-18 {
            break;
        }
        prev = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        let odd = (2 * k + 1) as f64;
        term *= (mu - odd * odd) / ((k + 1) as f64 * 8.0 * x);
    }
    let chi = x - (n as f64 / 2.0 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

pub fn bessel_jn_cfg(n: u32, x: f64, cfg: &SpecialFnConfig) -> f64 {
    if x < 0.0 {
        let v = bessel_jn_cfg(n, -x, cfg);
        return if n % 2 == 0 { v } else { -v };
    }
    if x < SERIES_LIMIT {
        bessel_jn_series(n, x, cfg)
    } else if x < HANKEL_LIMIT {
        bessel_jn_trapezoid(n, x)
    } else {
        bessel_jn_hankel(n, x)
    }
}

pub fn bessel_jn(n: u32, x: f64) -> f64 {
    bessel_jn_cfg(n, x, &SpecialFnConfig::default())
}

pub fn bessel_j1(x: f64) -> f64 {
    bessel_jn(1, x)
}

/// J_{1/2}(z) = sqrt(2/(pi z)) sin z.
pub fn bessel_j_half(z: f64) -> f64 {
    assert!(z > 0.0, "J_1/2 is evaluated on the positive axis");
    (2.0 / (PI * z)).sqrt() * z.sin()
}

/// Gamma(-1/2, x) = 2 (e^{-x} x^{-1/2} - sqrt(pi) erfc(sqrt x)) for small x;
/// the difference cancels as x grows, so x >= 2 uses the continued fraction.
pub fn gamma_upper_mhalf(x: f64) -> f64 {
    assert!(x > 0.0, "Gamma(-1/2, x) needs x > 0");
    if x < CF_LIMIT {
        return 2.0 * ((-x).exp() / x.sqrt() - PI.sqrt() * libm::erfc(x.sqrt()));
    }
    gamma_upper_mhalf_scaled(x) * (-x).exp()
}

const CF_LIMIT: f64 = 2.0;

/// e^x Gamma(-1/2, x), which stays representable for large x.
pub fn gamma_upper_mhalf_scaled(x: f64) -> f64 {
    assert!(x > 0.0, "Gamma(-1/2, x) needs x > 0");
    if x < CF_LIMIT {
        return gamma_upper_mhalf(x) * x.exp();
    }
    // x^a / (x + 1 - a - 1 (1 - a) / (x + 3 - a - 2 (2 - a) / ...)), a = -1/2,
    // by the modified Lentz method
    let a = -0.5;
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..300 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    x.powf(a) * h
}

/// 8 sin(pi r^2) / (pi r^2), the correction factor in dimension 4.
pub fn sinc_factor_4(r: f64) -> f64 {
    let t = PI * r * r;
    if t.abs() < 1e-4 {
        8.0 * (1.0 - t * t / 6.0)
    } else {
        8.0 * t.sin() / t
    }
}

/// sin(pi r^2) / (r sinh(pi r)), the correction factor in dimension 3.
pub fn sinc_factor_3(r: f64) -> f64 {
    if r.abs() < 1e-4 {
        // = (pi r^2 - ...) / (pi r^2 + pi^3 r^4 / 6 + ...)
        let t = PI * r * r;
        return (1.0 - t * t / 6.0) / (1.0 + PI * PI * r * r / 6.0);
    }
    (PI * r * r).sin() / (r * (PI * r).sinh())
}

/// The correction factor of dimension 3 or 4.
pub fn sinc_factors(r: f64, dim: u32) -> f64 {
    match dim {
        3 => sinc_factor_3(r),
        4 => sinc_factor_4(r),
        _ => panic!("only dimensions 3 and 4 are supported"),
    }
}

/// Double-double arithmetic (about 32 significant digits).
pub mod dd {
    use std::ops::{Add, Mul, Neg, Sub};

    #[derive(Debug, Clone, Copy, PartialEq, Default)]
    pub struct DoubleDouble {
        pub hi: f64,
        pub lo: f64,
    }

    #[inline]
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    #[inline]
    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    impl DoubleDouble {
        pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
        pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };
        pub const PI: DoubleDouble =
            DoubleDouble { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };

        pub fn from_f64(x: f64) -> Self {
            DoubleDouble { hi: x, lo: 0.0 }
        }

        pub fn to_f64(self) -> f64 {
            self.hi + self.lo
        }

        pub fn div_f64(self, b: f64) -> Self {
            let q1 = self.hi / b;
            let p = DoubleDouble::from_f64(q1) * b;
            let r = self - p;
            let q2 = (r.hi + r.lo) / b;
            let (s, e) = quick_two_sum(q1, q2);
            DoubleDouble { hi: s, lo: e }
        }

        pub fn abs(self) -> Self {
            if self.hi < 0.0 {
                -self
            } else {
                self
            }
        }
    }

    impl Add for DoubleDouble {
        type Output = Self;
        fn add(self, o: Self) -> Self {
            let (s, e) = two_sum(self.hi, o.hi);
            let (t, f) = two_sum(self.lo, o.lo);
            let (s, e) = quick_two_sum(s, e + t);
            let (s, e) = quick_two_sum(s, e + f);
            DoubleDouble { hi: s, lo: e }
        }
    }

    impl Neg for DoubleDouble {
        type Output = Self;
        fn neg(self) -> Self {
            DoubleDouble { hi: -self.hi, lo: -self.lo }
        }
    }

    impl Sub for DoubleDouble {
        type Output = Self;
        fn sub(self, o: Self) -> Self {
            self + (-o)
        }
    }

    impl Mul for DoubleDouble {
        type Output = Self;
        fn mul(self, o: Self) -> Self {
            let p = self.hi * o.hi;
            let e = self.hi.mul_add(o.hi, -p);
            let e = e + (self.hi * o.lo + self.lo * o.hi);
            let (s, e) = quick_two_sum(p, e);
            DoubleDouble { hi: s, lo: e }
        }
    }

    impl Mul<f64> for DoubleDouble {
        type Output = Self;
        fn mul(self, o: f64) -> Self {
            self * DoubleDouble::from_f64(o)
        }
    }

    /// (cos, sin) of 2 pi j / n in double-double.
    pub fn dd_root_of_unity(j: u64, n: u64) -> (DoubleDouble, DoubleDouble) {
        let j = j % n;
        // quadrant q = floor(4 j / n), remainder angle (pi/2) r / n
        let q = (4 * j as u128 / n as u128) as u64;
        let r = 4 * j - q * n;
        let phi = (DoubleDouble::PI * (r as f64)).div_f64(2.0 * n as f64);
        let (c, s) = cos_sin_taylor(phi);
        match q {
            0 => (c, s),
            1 => (-s, c),
            2 => (-c, -s),
            _ => (s, -c),
        }
    }

    /// Taylor series of cos and sin for 0 <= phi <= pi/2.
    pub fn cos_sin_taylor(phi: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
        let mut c = DoubleDouble::ONE;
        let mut s = phi;
        let mut term = phi;
        let phi2 = phi * phi;
        let mut k = 1.0;
        // term_k = (-1)^k phi^k / k!
        for _ in 0..24 {
            term = (term * phi2).div_f64(-((k + 1.0) * (k + 2.0)));
            s = s + term;
            k += 2.0;
        }
        let mut t = DoubleDouble::ONE;
        let mut k = 0.0;
        for _ in 0..24 {
            t = (t * phi2).div_f64(-((k + 1.0) * (k + 2.0)));
            c = c + t;
            k += 2.0;
        }
        (c, s)
    }

    /// Power series of J_n(x) in double-double.
    pub fn bessel_series(n: u32, x: f64, max_terms: usize) -> DoubleDouble {
        let h = DoubleDouble::from_f64(x).div_f64(2.0);
        let h2 = h * h;
        let mut t = DoubleDouble::ONE;
        for k in 1..=n {
            t = (t * h).div_f64(k as f64);
        }
        let mut s = t;
        for j in 1..max_terms {
            t = (t * h2).div_f64(-(j as f64 * (j + n as usize) as f64));
            s = s + t;
            if t.hi.abs() < 1e-34 * s.hi.abs().max(1e-300) {
                break;
            }
        }
        s
    }
}

/// Tanh-sinh quadrature.
pub mod quad {
    use std::f64::consts::FRAC_PI_2;

    use num_complex::Complex64;

    /// int_a^b f(x) dx for f with at most endpoint singularities. The step
    /// is halved until two successive levels agree to `tol` (relative).
    pub fn tanh_sinh<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
        tanh_sinh_estimate(f, a, b, tol).0
    }

    /// Like [`tanh_sinh`], also returning the difference between the last
    /// two refinement levels.
    pub fn tanh_sinh_estimate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> (Complex64, f64) {
        let half = (b - a) / 2.0;
        let (v, err) = refine(
            |t: f64| {
                let u = FRAC_PI_2 * t.sinh();
                let w = FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
                // distance to the nearer endpoint, computed without cancellation
                let dist = half / (u.abs().exp() * u.cosh());
                let x = if t >= 0.0 { b - dist } else { a + dist };
                if (t >= 0.0 && x >= b) || (t < 0.0 && x <= a) || w == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    f(x) * w
                }
            },
            4.0,
            tol,
        );
        (v * half, err * half.abs())
    }

    /// Trapezoidal sums of `eval` on [-tmax, tmax] with the step halved
    /// until two levels agree to `tol` (relative).
    fn refine(eval: impl Fn(f64) -> Complex64, tmax: f64, tol: f64) -> (Complex64, f64) {
        let mut h: f64 = 1.0;
        let mut sum = eval(0.0);
        let mut k = 1;
        while k as f64 * h <= tmax {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 1;
        }
        let mut prev = sum * h;
        let mut last = f64::INFINITY;
        for _level in 0..12 {
            h /= 2.0;
            let mut k = 1;
            while k as f64 * h <= tmax {
                sum += eval(k as f64 * h) + eval(-(k as f64) * h);
                k += 2;
            }
            let cur = sum * h;
            let diff = (cur - prev).norm();
            if diff <= tol * cur.norm().max(1e-300) {
                return (cur, diff);
            }
            prev = cur;
            last = diff;
        }
        (prev, last)
    }

    /// int_a^inf f(x) dx by the exp-sinh rule x = a + exp(pi/2 sinh t),
    /// suitable for algebraic or exponential decay.
    pub fn tanh_sinh_inf<F: Fn(f64) -> Complex64>(f: F, a: f64, tol: f64) -> Complex64 {
        exp_sinh_estimate(f, a, tol).0
    }

    pub fn exp_sinh_estimate<F: Fn(f64) -> Complex64>(f: F, a: f64, tol: f64) -> (Complex64, f64) {
        refine(
            |t: f64| {
                let e = (FRAC_PI_2 * t.sinh()).exp();
                let w = FRAC_PI_2 * t.cosh() * e;
                if !w.is_finite() || e == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let v = f(a + e) * w;
                if v.re.is_finite() && v.im.is_finite() {
                    v
                } else {
                    Complex64::new(0.0, 0.0)
                }
            },
            6.5,
            tol,
        )
    }

    /// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
    pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                if n == 1 {
                    p0 = 1.0;
                    p1 = x;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    }
}

/// The principal square root of a complex number.
pub fn csqrt(z: Complex64) -> Complex64 {
    crate::modgroup::principal_power(z, 1)
}
