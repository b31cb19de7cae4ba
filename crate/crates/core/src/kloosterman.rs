//! Kloosterman sums attached to powers of the theta multiplier, their local
//! factors and Euler factors, and partial sums over the modulus.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{
    epsilon, euler_phi, factorize, gcd, isqrt, jacobi, kronecker, valuation, SpfSieve,
};
use crate::kernel::{
    batch_sums, e_rat, single_sum_int, APhase, BatchBuffers, Frame, FrameKind, NeumaierSum,
    Scratch,
};
use crate::modgroup::EighthRoot;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KloostermanError {
    #[error("modulus {c} has the wrong parity for variant {variant}")]
    ParityMismatch { c: u64, variant: Variant },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("modulus {0} must be divisible by 4")]
    NotDivisibleBy4(u64),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("exponent {nu} is out of range for p = {p}")]
    BadExponent { p: u64, nu: u32 },
    #[error("weight 2k = {0} must be odd")]
    EvenWeight(i64),
    #[error("cache: {0}")]
    Cache(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Theta group, even modulus c (sum over d mod 2c).
    ThetaCapEven,
    /// Theta group, odd modulus c (sum over even d mod 2c).
    ThetaCapOdd,
    /// Gamma_0(4) with the theta multiplier, modulus divisible by 4.
    ThetaLevel4,
    /// The classical sum modulo c.
    Classical,
}

impl Variant {
    pub fn tag(self) -> &'static str {
        match self {
            Variant::ThetaCapEven => "theta-even",
            Variant::ThetaCapOdd => "theta-odd",
            Variant::ThetaLevel4 => "theta-level4",
            Variant::Classical => "classical",
        }
    }

    pub fn frame_kind(self) -> FrameKind {
        match self {
            Variant::ThetaCapEven => FrameKind::ThetaEven,
            Variant::ThetaCapOdd => FrameKind::ThetaOdd,
            Variant::ThetaLevel4 => FrameKind::Level4,
            Variant::Classical => FrameKind::Classical,
        }
    }

    /// Whether c is an admissible modulus for this variant.
    pub fn admits(self, c: u64) -> bool {
        c > 0
            && match self {
                Variant::ThetaCapEven => c % 2 == 0,
                Variant::ThetaCapOdd => c % 2 == 1,
                Variant::ThetaLevel4 => c % 4 == 0,
                Variant::Classical => true,
            }
    }

    /// The step between consecutive admissible moduli and the first one.
    pub fn moduli(self) -> (u64, u64) {
        match self {
            Variant::ThetaCapEven => (2, 2),
            Variant::ThetaCapOdd => (2, 1),
            Variant::ThetaLevel4 => (4, 4),
            Variant::Classical => (1, 1),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "theta-even" | "even" => Ok(Variant::ThetaCapEven),
            "theta-odd" | "odd" => Ok(Variant::ThetaCapOdd),
            "theta-level4" | "level4" => Ok(Variant::ThetaLevel4),
            "classical" => Ok(Variant::Classical),
            _ => Err(format!("unknown variant '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KloostermanQuery {
    pub m: i64,
    pub n: i64,
    pub c: u64,
    pub weight2k: i64,
    pub variant: Variant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KloostermanValue {
    pub value: Complex64,
    /// Size of the compensation term of the summation.
    pub comp: f64,
    pub terms: usize,
}

/// A shared smallest-prime-factor sieve for moduli up to 2^22.
pub fn sieve() -> &'static SpfSieve {
    static SIEVE: OnceLock<SpfSieve> = OnceLock::new();
    SIEVE.get_or_init(|| SpfSieve::new(1 << 22))
}

fn check(q: &KloostermanQuery) -> Result<(), KloostermanError> {
    if q.c == 0 {
        return Err(KloostermanError::ZeroModulus);
    }
    if q.variant == Variant::ThetaLevel4 && q.c % 4 != 0 {
        return Err(KloostermanError::NotDivisibleBy4(q.c));
    }
    if !q.variant.admits(q.c) {
        return Err(KloostermanError::ParityMismatch { c: q.c, variant: q.variant });
    }
    Ok(())
}

pub fn frame_for(q: &KloostermanQuery) -> Result<Frame, KloostermanError> {
    check(q)?;
    let mut s = Scratch::default();
    Ok(Frame::build(q.variant.frame_kind(), q.c, q.weight2k, sieve(), &mut s))
}

/// S(m, n, c, nu^{2k}) for the requested variant.
pub fn kloosterman(q: KloostermanQuery) -> Result<KloostermanValue, KloostermanError> {
    let frame = frame_for(&q)?;
    let (value, comp) = single_sum_int(&frame, q.m, q.n);
    Ok(KloostermanValue { value, comp, terms: frame.terms() })
}

/// The same sum with roots of unity and accumulation in double-double
/// arithmetic, for validating the binary64 path.
pub fn kloosterman_extended(q: KloostermanQuery) -> Result<Complex64, KloostermanError> {
    use crate::special::dd::{dd_root_of_unity, DoubleDouble};
    let frame = frame_for(&q)?;
    let n = frame.modulus;
    let (mut re, mut im) = (DoubleDouble::ZERO, DoubleDouble::ZERO);
    for j in 0..frame.len() {
        let idx = (q.m as i128 * frame.alpha[j] as i128 + q.n as i128 * frame.delta[j] as i128)
            .rem_euclid(n as i128) as u64;
        // fold the per-term quarter turn into the root index
        let shift = frame.wexp[j] as u64 / 2;
        let (c, s) = dd_root_of_unity(4 * idx + shift * n, 4 * n);
        re = re + c;
        im = im + s;
    }
    if let Some(k) = frame.kappa {
        // kappa is a fourth root, so kappa conj(A) is exact componentwise
        let kz = k.to_complex();
        let (kr, ki) = (kz.re, kz.im);
        let (cr, ci) = (re * kr + im * ki, re * ki - im * kr);
        re = re + cr;
        im = im + ci;
    }
    let z = Complex64::new(re.to_f64(), im.to_f64());
    Ok(z * frame.constant.to_complex())
}

/// Residuals of the three relations between even and odd moduli
/// (c = 2 c_odd): weight 1/2 and 3/2 with the 4n twist, and weight 2
/// with the doubled arguments. Each residual should vanish.
pub fn relation_check(m: i64, n: i64, c_odd: u64) -> Result<[f64; 3], KloostermanError> {
    if c_odd % 2 == 0 {
        return Err(KloostermanError::ParityMismatch { c: c_odd, variant: Variant::ThetaCapOdd });
    }
    let c = 2 * c_odd;
    let s = |m, n, c, w, variant| {
        kloosterman(KloostermanQuery { m, n, c, weight2k: w, variant }).map(|v| v.value)
    };
    let (ev, od) = (Variant::ThetaCapEven, Variant::ThetaCapOdd);
    let sign1 = if matches!(m.rem_euclid(4), 0 | 1) { 1.0 } else { -1.0 };
    let sign3 = if matches!(m.rem_euclid(4), 0 | 3) { -1.0 } else { 1.0 };
    let r1 = (s(m, 4 * n, c, 1, ev)? - s(m, n, c_odd, 1, od)? * (sign1 * SQRT_2)).norm();
    let r3 = (s(m, 4 * n, c, 3, ev)? - s(m, n, c_odd, 3, od)? * (sign3 * SQRT_2)).norm();
    let sign4 = if (m + n + 1).rem_euclid(2) == 0 { 2.0 } else { -2.0 };
    let r4 = (s(2 * m, 2 * n, c, 4, ev)? - s(m, n, c_odd, 4, od)? * sign4).norm();
    Ok([r1, r3, r4])
}

/// Closed form of S(0, 0, c, nu^3).
pub fn special_s00(c: u64, variant: Variant) -> Result<Complex64, KloostermanError> {
    let q = KloostermanQuery { m: 0, n: 0, c, weight2k: 3, variant };
    check(&q)?;
    let zero = Complex64::new(0.0, 0.0);
    match variant {
        Variant::ThetaCapEven => {
            let h = c / 2;
            let r = isqrt(h);
            if r * r != h {
                return Ok(zero);
            }
            let v = SQRT_2 * (r * euler_phi(2 * r)) as f64;
            Ok(EighthRoot::from_exponent(-1).to_complex() * v)
        }
        Variant::ThetaCapOdd => {
            let r = isqrt(c);
            if r * r != c {
                return Ok(zero);
            }
            Ok(EighthRoot::from_exponent(3).to_complex() * (r * euler_phi(r)) as f64)
        }
        _ => Err(KloostermanError::ParityMismatch { c, variant }),
    }
}

fn require_prime(p: u64) -> Result<(), KloostermanError> {
    if crate::arith::is_prime(p) {
        Ok(())
    } else {
        Err(KloostermanError::NotPrime(p))
    }
}

/// The local factor alpha_{2k}(p^nu, n) by its defining residue sum.
pub fn alpha_direct(p: u64, nu: u32, n: i64, weight2k: i64) -> Result<Complex64, KloostermanError> {
    require_prime(p)?;
    if p == 2 && nu < 2 {
        return Err(KloostermanError::BadExponent { p, nu });
    }
    let q = p.pow(nu);
    let mut acc = NeumaierSum::default();
    if p == 2 {
        for a in (1..q).step_by(2) {
            let sym = kronecker(q as i64, a as i64);
            let w = EighthRoot::from_sign(sym) * epsilon(a as i64).unwrap().pow(weight2k);
            acc.add(w.to_complex() * e_rat(n.rem_euclid(q as i64) * a as i64 % q as i64, q));
        }
        return Ok(acc.value());
    }
    for a in 1..=q {
        let sym = if q == 1 { 1 } else { jacobi(a as i64, q) };
        if sym != 0 {
            let ph = e_rat((n.rem_euclid(q as i64) as i128 * a as i128 % q as i128) as i64, q);
            acc.add(ph * sym as f64);
        }
    }
    let eps = epsilon(q as i64).unwrap().pow(-weight2k);
    Ok(acc.value() * eps.to_complex())
}

/// The local factor alpha_{2k}(p^nu, n) from its closed-form case table.
pub fn alpha(p: u64, nu: u32, n: i64, weight2k: i64) -> Result<Complex64, KloostermanError> {
    require_prime(p)?;
    if weight2k % 2 == 0 {
        return Err(KloostermanError::EvenWeight(weight2k));
    }
    let zero = Complex64::new(0.0, 0.0);
    let pf = p as f64;
    if p == 2 {
        if nu < 2 {
            return Err(KloostermanError::BadExponent { p, nu });
        }
        if nu % 2 == 0 {
            let g = 1i64 << (nu - 2);
            if n % g != 0 {
                return Ok(zero);
            }
            let l = n / g;
            let sign = if l % 2 == 0 { 1 } else { -1 };
            let inner = Complex64::new(1.0, 0.0)
                + EighthRoot::from_sign(sign).to_complex() * EighthRoot::I.pow(weight2k).to_complex();
            return Ok(EighthRoot::from_exponent(2 * l).to_complex() * inner * g as f64);
        }
        let g = 1i64 << (nu - 3);
        if n % g != 0 {
            return Ok(zero);
        }
        let l = n / g;
        if l % 2 == 0 || (l - weight2k).rem_euclid(4) != 0 {
            return Ok(zero);
        }
        return Ok(EighthRoot::from_exponent(l).to_complex() * (4 * g) as f64);
    }
    if nu == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let h = valuation(n, p).unwrap_or(u32::MAX);
    if nu <= h {
        if nu % 2 == 1 {
            return Ok(zero);
        }
        return Ok(Complex64::new(pf.powi(nu as i32 - 1) * (pf - 1.0), 0.0));
    }
    if nu == h + 1 {
        if nu % 2 == 0 {
            return Ok(Complex64::new(-pf.powi(nu as i32 - 1), 0.0));
        }
        let lam = (weight2k - 1) / 2;
        let top = if lam.rem_euclid(2) == 0 { 1 } else { -1 } * (n / p.pow(nu - 1) as i64);
        let sym = jacobi(top, p) as f64;
        return Ok(Complex64::new(pf.powf(nu as f64 - 0.5) * sym, 0.0));
    }
    Ok(zero)
}

fn cpow(base: f64, s: Complex64) -> Complex64 {
    (s * base.ln()).exp()
}

/// The Euler factor A_{2k}(p, n, s) in closed form (n != 0).
pub fn local_a(p: u64, n: i64, s: Complex64, weight2k: i64) -> Result<Complex64, KloostermanError> {
    require_prime(p)?;
    if weight2k % 2 == 0 {
        return Err(KloostermanError::EvenWeight(weight2k));
    }
    assert!(n != 0, "the Euler factor is only formed for n != 0");
    let one = Complex64::new(1.0, 0.0);
    let u = one - s * 2.0;
    let pf = p as f64;
    let pw = |e: f64| cpow(pf, u * e);
    let h = valuation(n, p).unwrap();
    let core = n / p.pow(h) as i64;
    let lam = (weight2k - 1) / 2;
    let signed = if lam.rem_euclid(2) == 0 { core } else { -core };
    let geo = |top: f64| (one - pw(top)) / (one - pw(2.0));
    if p == 2 {
        let pre = cpow(2.0, -s * 4.0) * (one + EighthRoot::I.pow(weight2k).to_complex());
        let hf = h as f64;
        let val = if h % 2 == 1 {
            geo(hf - 1.0) - pw(hf - 1.0)
        } else if (core + weight2k).rem_euclid(4) == 0 {
            if h == 0 {
                -one
            } else {
                geo(hf) - pw(hf)
            }
        } else {
            let sym = kronecker(signed, 2) as f64;
            geo(hf + 2.0) + cpow(2.0, u * (hf + 1.0) + 0.5) * sym
        };
        return Ok(pre * val);
    }
    let hf = h as f64;
    let val = if h % 2 == 1 {
        one + (pw(2.0) - pw(hf + 1.0)) / (one - pw(2.0)) * (1.0 - 1.0 / pf) - pw(hf + 1.0) / pf
    } else {
        let sym = jacobi(signed, p) as f64;
        one + (pw(2.0) - pw(hf + 2.0)) / (one - pw(2.0)) * (1.0 - 1.0 / pf)
            + cpow(pf, u * (hf + 1.0) - 0.5) * sym
    };
    Ok(val)
}

/// The Euler factor by summing alpha(p^nu, n) p^{-2 s nu} directly; the sum
/// is finite for n != 0.
pub fn local_a_series(p: u64, n: i64, s: Complex64, weight2k: i64) -> Result<Complex64, KloostermanError> {
    require_prime(p)?;
    let h = valuation(n, p).expect("n != 0");
    let start = if p == 2 { 2 } else { 0 };
    let mut acc = Complex64::new(0.0, 0.0);
    for nu in start..=(h + 3) {
        acc += alpha(p, nu, n, weight2k)? * cpow(p as f64, -s * (2.0 * nu as f64));
    }
    Ok(acc)
}

/// |S(0, n, c) - prod of local factors|, with the extra e(k/4) for odd c.
pub fn multiplicativity_check(
    n: i64,
    c: u64,
    weight2k: i64,
    variant: Variant,
) -> Result<f64, KloostermanError> {
    let direct = kloosterman(KloostermanQuery { m: 0, n, c, weight2k, variant })?.value;
    let product = local_product(n, c, weight2k, variant)?;
    Ok((direct - product).norm())
}

/// S(0, n, c, nu^{2k}) assembled from the closed-form local factors.
pub fn local_product(n: i64, c: u64, weight2k: i64, variant: Variant) -> Result<Complex64, KloostermanError> {
    let mut acc = Complex64::new(1.0, 0.0);
    match variant {
        Variant::ThetaCapEven => {
            if c % 2 != 0 {
                return Err(KloostermanError::ParityMismatch { c, variant });
            }
            for (p, e) in factorize(2 * c) {
                acc *= alpha(p, e, n, weight2k)?;
            }
        }
        Variant::ThetaCapOdd => {
            if c % 2 != 1 {
                return Err(KloostermanError::ParityMismatch { c, variant });
            }
            acc = EighthRoot::from_exponent(weight2k).to_complex();
            for (p, e) in factorize(c) {
                acc *= alpha(p, e, n, weight2k)?;
            }
        }
        _ => return Err(KloostermanError::ParityMismatch { c, variant }),
    }
    Ok(acc)
}

/// Normalization of the terms of a partial sum over the modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divisor {
    /// S / c
    C,
    /// S / c^{3/2}
    C32,
    /// S / c^{s}
    Pow(f64),
}

impl Divisor {
    fn weight(self, c: u64) -> f64 {
        let cf = c as f64;
        match self {
            Divisor::C => 1.0 / cf,
            Divisor::C32 => 1.0 / (cf * cf.sqrt()),
            Divisor::Pow(s) => cf.powf(-s),
        }
    }
}

/// Split the admissible moduli up to `cutoff` into consecutive chunks that
/// never straddle a checkpoint. The split depends only on the inputs, so the
/// reduction order is independent of the worker count.
pub fn moduli_chunks(variant: Variant, cutoff: u64, checkpoints: &[u64], chunk: usize) -> Vec<Vec<u64>> {
    let (step, first) = variant.moduli();
    let mut bounds: Vec<u64> = checkpoints.iter().copied().filter(|&x| x < cutoff).collect();
    bounds.push(cutoff);
    bounds.sort_unstable();
    bounds.dedup();
    let mut chunks = Vec::new();
    let mut cur: Vec<u64> = Vec::new();
    let mut bi = 0;
    let mut c = first;
    while c <= cutoff {
        while bounds[bi] < c {
            if !cur.is_empty() {
                chunks.push(std::mem::take(&mut cur));
            }
            bi += 1;
        }
        cur.push(c);
        if cur.len() >= chunk {
            chunks.push(std::mem::take(&mut cur));
        }
        c += step;
    }
    if !cur.is_empty() {
        chunks.push(cur);
    }
    chunks
}

/// A geometric grid of checkpoints up to x.
pub fn geometric_checkpoints(x: u64, per_decade: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut t = 10f64;
    let r = 10f64.powf(1.0 / per_decade as f64);
    while t < x as f64 {
        out.push(t.round() as u64);
        t *= r;
    }
    out.push(x);
    out.dedup();
    out
}

/// Partial sums of S(m, n, c)/c^s over admissible c <= cutoff, for several
/// (m, n) at once: `pairs` share the modulus loop. Returns, for each
/// checkpoint, the partial sums in the order of `pairs`.
pub fn partial_sums_multi(
    pairs: &[(i64, i64)],
    weight2k: i64,
    variant: Variant,
    cutoff: u64,
    divisor: Divisor,
    checkpoints: &[u64],
) -> Vec<(u64, Vec<Complex64>)> {
    // group by m; each group is evaluated for n = 1..=max |n| with one sign
    let mut ms: Vec<i64> = pairs.iter().map(|p| p.0).collect();
    ms.sort_unstable();
    ms.dedup();
    let n_max = pairs.iter().map(|p| p.1.unsigned_abs()).max().unwrap_or(1).max(1) as usize;
    let phases: Vec<APhase> = ms.iter().map(|&m| APhase::Int(m)).collect();
    let chunks = moduli_chunks(variant, cutoff, checkpoints, 64);
    let kind = variant.frame_kind();
    let width = pairs.len();
    let lookup = |vals_pos: &[Complex64], vals_neg: &[Complex64], vals_zero: &[Complex64], m: i64, n: i64| {
        let im = ms.binary_search(&m).unwrap();
        if n > 0 {
            vals_pos[im * n_max + n as usize - 1]
        } else if n < 0 {
            vals_neg[im * n_max + (-n) as usize - 1]
        } else {
            vals_zero[im]
        }
    };
    let need_pos = pairs.iter().any(|p| p.1 > 0);
    let need_neg = pairs.iter().any(|p| p.1 < 0);
    let need_zero = pairs.iter().any(|p| p.1 == 0);
    let results: Vec<(u64, Vec<Complex64>)> = chunks
        .par_iter()
        .map(|chunk| {
            let mut scratch = Scratch::default();
            let mut frame = Frame::default();
            let mut buf = BatchBuffers::default();
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            let mut acc = vec![NeumaierSum::default(); width];
            for &c in chunk {
                frame.fill(kind, c, weight2k, sieve(), &mut scratch);
                if need_pos {
                    batch_sums(&frame, &phases, n_max, 1, &mut buf, &mut pos);
                }
                if need_neg {
                    batch_sums(&frame, &phases, n_max, -1, &mut buf, &mut neg);
                }
                let zero: Vec<Complex64> = if need_zero {
                    ms.iter().map(|&m| single_sum_int(&frame, m, 0).0).collect()
                } else {
                    Vec::new()
                };
                let w = divisor.weight(c);
                for (k, &(m, n)) in pairs.iter().enumerate() {
                    acc[k].add(lookup(&pos, &neg, &zero, m, n) * w);
                }
            }
            (*chunk.last().unwrap(), acc.iter().map(|a| a.value()).collect())
        })
        .collect();
    // chunks arrive in modulus order and never straddle a checkpoint
    let mut cps: Vec<u64> = checkpoints.iter().copied().filter(|&x| x <= cutoff).collect();
    cps.push(cutoff);
    cps.sort_unstable();
    cps.dedup();
    let mut total = vec![NeumaierSum::default(); width];
    let mut it = results.into_iter().peekable();
    let mut out = Vec::with_capacity(cps.len());
    for &x in &cps {
        while let Some((_, vals)) = it.next_if(|(last_c, _)| *last_c <= x) {
            for (t, v) in total.iter_mut().zip(&vals) {
                t.add(*v);
            }
        }
        out.push((x, total.iter().map(|t| t.value()).collect()));
    }
    out
}

/// Partial sums of S(m, n, c)/c^s over admissible c <= x, reported at
/// geometric checkpoints.
pub fn partial_sum(
    m: i64,
    n: i64,
    weight2k: i64,
    variant: Variant,
    x_cutoff: u64,
    divisor: Divisor,
) -> Vec<(u64, Complex64)> {
    let cps = geometric_checkpoints(x_cutoff, 10);
    partial_sums_multi(&[(m, n)], weight2k, variant, x_cutoff, divisor, &cps)
        .into_iter()
        .map(|(x, v)| (x, v[0]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub variant: String,
    pub weight2k: i64,
    pub m: Option<i64>,
    pub n: i64,
    pub c: u64,
    /// The real a-phase, stored by its bit pattern.
    pub rsq_bits: Option<u64>,
}

/// A record-per-line disk cache of sums: comma-separated
/// `variant,weight2k,m,n,c,re,im[,rsq]` with 17 significant digits.
#[derive(Debug, Default)]
pub struct KloostermanCache {
    entries: HashMap<CacheKey, Complex64>,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl KloostermanCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &CacheKey) -> Option<Complex64> {
        self.entries.get(key).copied()
    }

    pub fn insert(&mut self, key: CacheKey, v: Complex64) {
        self.entries.insert(key, v);
    }

    pub fn key(q: &KloostermanQuery) -> CacheKey {
        CacheKey {
            variant: q.variant.tag().to_string(),
            weight2k: q.weight2k,
            m: Some(q.m),
            n: q.n,
            c: q.c,
            rsq_bits: None,
        }
    }

    /// Look up or compute-and-insert.
    pub fn get_or_compute(&mut self, q: KloostermanQuery) -> Result<Complex64, KloostermanError> {
        let key = Self::key(&q);
        if let Some(v) = self.get(&key) {
            return Ok(v);
        }
        let v = kloosterman(q)?.value;
        self.insert(key, v);
        Ok(v)
    }

    pub fn format_record(key: &CacheKey, v: Complex64) -> String {
        let m = key.m.map(|m| m.to_string()).unwrap_or_default();
        let mut line = format!(
            "{},{},{},{},{},{},{}",
            key.variant,
            key.weight2k,
            m,
            key.n,
            key.c,
            fmt17(v.re),
            fmt17(v.im)
        );
        if let Some(bits) = key.rsq_bits {
            line.push(',');
            line.push_str(&fmt17(f64::from_bits(bits)));
        }
        line
    }

    pub fn parse_record(line: &str) -> Result<(CacheKey, Complex64), KloostermanError> {
        let bad = || KloostermanError::Cache(format!("malformed record '{line}'"));
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 7 && f.len() != 8 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let key = CacheKey {
            variant: f[0].to_string(),
            weight2k: f[1].parse().map_err(|_| bad())?,
            m: if f[2].is_empty() { None } else { Some(f[2].parse().map_err(|_| bad())?) },
            n: f[3].parse().map_err(|_| bad())?,
            c: f[4].parse().map_err(|_| bad())?,
            rsq_bits: if f.len() == 8 { Some(num(f[7])?.to_bits()) } else { None },
        };
        Ok((key, Complex64::new(num(f[5])?, num(f[6])?)))
    }

    pub fn load(path: &Path) -> Result<Self, KloostermanError> {
        let mut cache = Self::new();
        if !path.exists() {
            return Ok(cache);
        }
        let file = fs::File::open(path).map_err(|e| KloostermanError::Cache(e.to_string()))?;
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| KloostermanError::Cache(e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = Self::parse_record(&line)?;
            cache.insert(k, v);
        }
        Ok(cache)
    }

    /// Write all records sorted by key, so the file is reproducible.
    pub fn save(&self, path: &Path) -> Result<(), KloostermanError> {
        let mut lines: Vec<String> =
            self.entries.iter().map(|(k, v)| Self::format_record(k, *v)).collect();
        lines.sort();
        let mut file = fs::File::create(path).map_err(|e| KloostermanError::Cache(e.to_string()))?;
        for l in lines {
            writeln!(file, "{l}").map_err(|e| KloostermanError::Cache(e.to_string()))?;
        }
        Ok(())
    }
}

/// gcd(m, n, c) with gcd(0, 0, c) = c.
pub fn gcd_mnc(m: i64, n: i64, c: u64) -> u64 {
    gcd(gcd(m, n) as i64, c as i64)
}
