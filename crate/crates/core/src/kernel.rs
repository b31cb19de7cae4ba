//! Per-modulus frames and batched exponential-sum evaluation.
//!
//! Every theta-multiplier Kloosterman-type sum in this crate has the shape
//!
//! ```text
//!   K = C * sum_j w_j e((X alpha_j + n delta_j) / N)
//! ```
//!
//! where `(alpha_j, delta_j)` runs over pairs of mutually inverse residues,
//! `w_j` is an exact fourth root of unity and `C` an eighth root of unity.
//! A [`Frame`] materializes the pairs once per modulus; the batch routines
//! then evaluate many `(X, n)` at once.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::arith::{epsilon, jacobi, kronecker, mod_inverse, FastMod, SpfSieve};
use crate::modgroup::EighthRoot;

/// Which family of sums a frame describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameKind {
    /// Theta group, even modulus c; N = 2c, a in (-c, c).
    ThetaEven,
    /// Theta group, odd modulus c; N = 2c, a and d even, a in (-c, c).
    ThetaOdd,
    /// Gamma_0(4) with the theta multiplier, 4 | c; N = c.
    Level4,
    /// Untwisted sums modulo c; N = c.
    Classical,
}

/// The pairs `(a, -a)` contribute complex-conjugate phases, and
/// `w(a) w(-a)` is the same fourth root `kappa` for every unit of a given
/// modulus. A frame therefore stores only the units below N/2, and the full
/// sum is `C (A + kappa conj(A))` with `A` the stored half. `kappa` is
/// `None` when every unit is its own partner (N <= 2) and the frame is
/// complete.
#[derive(Debug, Clone, Default)]
pub struct Frame {
    pub modulus: u64,
    pub alpha: Vec<i64>,
    pub delta: Vec<u32>,
    pub wexp: Vec<u8>,
    pub constant: EighthRoot,
    pub kappa: Option<EighthRoot>,
}

/// Scratch buffers reused across moduli.
#[derive(Default)]
pub struct Scratch {
    units: Vec<u32>,
    prefix: Vec<u32>,
    inv: Vec<u32>,
    chi: Vec<i8>,
    leg: Vec<i8>,
}

fn legendre_table(p: u64, out: &mut Vec<i8>) {
    out.clear();
    out.resize(p as usize, -1);
    out[0] = 0;
    // successive squares: (x+1)^2 = x^2 + 2x + 1
    let mut sq = 0u64;
    for x in 0..=(p / 2) {
        out[sq as usize] = if x == 0 { 0 } else { 1 };
        sq += 2 * x + 1;
        while sq >= p {
            sq -= p;
        }
    }
}

/// Multiply `t` elementwise by the periodic extension of `pattern`.
fn apply_periodic(t: &mut [i8], pattern: &[i8]) {
    for chunk in t.chunks_mut(pattern.len()) {
        for (x, &y) in chunk.iter_mut().zip(pattern) {
            *x *= y;
        }
    }
}

/// How the residues d in [0, n) are labelled for a frame.
#[derive(Clone, Copy)]
enum Symbol {
    /// (top / d) for odd positive d (the period must divide n).
    Kronecker(u64),
    /// (d / q) for odd q.
    Jacobi(u64),
    /// Unit indicator only.
    Trivial,
}

/// Fill `s.chi[d]` for d in [0, len): zero unless gcd(d, n) = 1, otherwise
/// the requested symbol.
fn symbol_table(n: u64, len: usize, sym: Symbol, sieve: &SpfSieve, s: &mut Scratch) {
    s.chi.clear();
    s.chi.resize(len, 1);
    if n == 1 {
        return;
    }
    let odd_exp = |x: u64, p: u64| -> bool {
        let mut x = x;
        let mut e = 0;
        while x % p == 0 {
            x /= p;
            e += 1;
        }
        e % 2 == 1
    };
    let mut pat: Vec<i8> = Vec::new();
    for (p, _) in sieve.factorize(n) {
        pat.clear();
        match sym {
            Symbol::Kronecker(top) if odd_exp(top, p) => {
                if p == 2 {
                    pat.extend((0..8).map(|d| match d {
                        1 | 7 => 1,
                        3 | 5 => -1,
                        _ => 0,
                    }));
                } else {
                    legendre_table(p, &mut s.leg);
                    // (p / d) = (d / p) (-1)^{(p-1)/2 (d-1)/2} by reciprocity
                    let flip = p % 4 == 3;
                    pat.extend((0..4 * p as usize).map(|d| {
                        let v = s.leg[d % p as usize];
                        if flip && d % 4 == 3 {
                            -v
                        } else {
                            v
                        }
                    }));
                }
            }
            Symbol::Jacobi(q) if odd_exp(q, p) => {
                legendre_table(p, &mut s.leg);
                pat.extend_from_slice(&s.leg);
            }
            _ => {
                pat.extend((0..p).map(|d| if d == 0 { 0 } else { 1 }));
            }
        }
        apply_periodic(&mut s.chi, &pat);
    }
}

/// The units modulo n marked in `s.chi`, in increasing order, with their
/// inverses.
fn units_and_inverses(n: u64, s: &mut Scratch) {
    s.units.clear();
    s.inv.clear();
    if n == 1 {
        s.units.push(0);
        s.inv.push(0);
        return;
    }
    // branchless compaction
    s.units.resize(s.chi.len() + 1, 0);
    let mut k = 0usize;
    for (d, &v) in s.chi.iter().enumerate() {
        s.units[k] = d as u32;
        k += (v != 0) as usize;
    }
    let len = k;
    // batch inversion with CHAINS interleaved prefix products, so that the
    // modular multiplications do not form one long dependency chain; the
    // tail is padded with ones
    const CHAINS: usize = 8;
    let padded = len.div_ceil(CHAINS) * CHAINS;
    s.units.truncate(len);
    s.units.resize(padded, 1);
    s.prefix.clear();
    s.prefix.resize(padded, 0);
    s.inv.clear();
    s.inv.resize(padded, 0);
    let fm = FastMod::new(n);
    let mut acc = [1u64; CHAINS];
    for (u, p) in s.units.chunks_exact(CHAINS).zip(s.prefix.chunks_exact_mut(CHAINS)) {
        for l in 0..CHAINS {
            acc[l] = fm.mul(acc[l], u[l] as u64);
            p[l] = acc[l] as u32;
        }
    }
    let mut inv_acc = [0u64; CHAINS];
    for l in 0..CHAINS {
        inv_acc[l] = mod_inverse(acc[l] as i64, n).expect("product of units");
    }
    let chunks = padded / CHAINS;
    for ci in (0..chunks).rev() {
        let lo = ci * CHAINS;
        let prev: [u32; CHAINS] = if ci == 0 {
            [1; CHAINS]
        } else {
            s.prefix[lo - CHAINS..lo].try_into().unwrap()
        };
        let u: [u32; CHAINS] = s.units[lo..lo + CHAINS].try_into().unwrap();
        let out = &mut s.inv[lo..lo + CHAINS];
        for l in 0..CHAINS {
            out[l] = fm.mul(inv_acc[l], prev[l] as u64) as u32;
            inv_acc[l] = fm.mul(inv_acc[l], u[l] as u64);
        }
    }
    s.units.truncate(len);
    s.inv.truncate(len);
}

/// Exponent of w = eps_d^{2k} (2c/d)^{2k} as a function of (d mod 4 == 3,
/// symbol < 0).
fn weight_table(k2: i64) -> [[u8; 2]; 2] {
    let e = (2 * k2).rem_euclid(8) as u8;
    let s = if k2.rem_euclid(2) == 1 { 4 } else { 0 };
    [[0, s], [e, (e + s) % 8]]
}

impl Frame {
    /// Build the frame of modulus `c` for `kind` and weight 2k = `k2`.
    pub fn build(kind: FrameKind, c: u64, k2: i64, sieve: &SpfSieve, s: &mut Scratch) -> Frame {
        let mut f = Frame::default();
        f.fill(kind, c, k2, sieve, s);
        f
    }

    pub fn fill(&mut self, kind: FrameKind, c: u64, k2: i64, sieve: &SpfSieve, s: &mut Scratch) {
        self.alpha.clear();
        self.delta.clear();
        self.wexp.clear();
        self.constant = EighthRoot::ONE;
        let wt = weight_table(k2);
        let neg = wt[0][1];
        match kind {
            FrameKind::ThetaEven | FrameKind::Level4 => {
                let (n, top) = if kind == FrameKind::ThetaEven { (2 * c, 2 * c) } else { (c, c) };
                self.modulus = n;
                symbol_table(n, n.div_ceil(2) as usize, Symbol::Kronecker(top), sieve, s);
                units_and_inverses(n, s);
                self.alpha.extend(s.units.iter().map(|&a| a as i64));
                self.delta.extend_from_slice(&s.inv);
                // the symbol is a real character mod n, so chi(d) = chi(a^{-1}) = chi(a)
                let chi = &s.chi;
                self.wexp.extend(
                    s.units
                        .iter()
                        .zip(&s.inv)
                        .map(|(&a, &d)| wt[(d & 3 == 3) as usize][(chi[a as usize] < 0) as usize]),
                );
                let sym = kronecker(top as i64, n as i64 - 1);
                self.kappa = Some(EighthRoot::from_exponent(wt[1][(sym < 0) as usize] as i64));
            }
            FrameKind::ThetaOdd => {
                let q = c;
                let n = 2 * q;
                self.modulus = n;
                symbol_table(q, q.div_ceil(2) as usize, Symbol::Jacobi(q), sieve, s);
                units_and_inverses(q, s);
                // even lift of a residue mod q to a residue mod 2q
                let lift = |x: u32| x as i64 + q as i64 * (x & 1) as i64;
                let (qi, ni) = (q as i64, n as i64);
                for (&u, &ui) in s.units.iter().zip(&s.inv) {
                    let a = lift(ui);
                    self.alpha.push(a - ni * ((a >= qi) as i64));
                    self.delta.push(lift(u) as u32);
                    self.wexp.push(if s.chi[u as usize] < 0 { neg } else { 0 });
                }
                let two_q = jacobi(2, q);
                let eps_q = epsilon(q as i64).expect("odd modulus");
                self.constant = EighthRoot::from_exponent(k2)
                    * eps_q.pow(-k2)
                    * EighthRoot::from_sign(two_q).pow(k2);
                self.kappa = (q > 1).then(|| {
                    EighthRoot::from_exponent(if jacobi(-1, q) < 0 { neg as i64 } else { 0 })
                });
            }
            FrameKind::Classical => {
                self.modulus = c;
                let len = if c <= 2 { c as usize } else { c.div_ceil(2) as usize };
                symbol_table(c, len, Symbol::Trivial, sieve, s);
                units_and_inverses(c, s);
                self.alpha.extend(s.units.iter().map(|&a| a as i64));
                self.delta.extend_from_slice(&s.inv);
                self.wexp.resize(s.units.len(), 0);
                self.kappa = (c > 2).then_some(EighthRoot::ONE);
            }
        }
    }

    /// Number of terms of the full sum.
    pub fn terms(&self) -> usize {
        if self.kappa.is_some() {
            2 * self.len()
        } else {
            self.len()
        }
    }

    /// `C (A + kappa conj(A))` from the sum `A` over the stored pairs.
    #[inline]
    pub fn complete(&self, half: Complex64) -> Complex64 {
        let full = match self.kappa {
            Some(k) => half + k.to_complex() * half.conj(),
            None => half,
        };
        full * self.constant.to_complex()
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// e(j / n) for integers j, from two small tables.
pub struct RootTable {
    n: u64,
    shift: u32,
    coarse: Vec<Complex64>,
    fine: Vec<Complex64>,
}

/// e(x) with the argument reduced to [-1/2, 1/2) before scaling.
#[inline]
pub fn e_frac(x: f64) -> Complex64 {
    let t = x - x.round();
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// e(p/q) with p reduced exactly modulo q before the division.
#[inline]
pub fn e_rat(p: i64, q: u64) -> Complex64 {
    let r = p.rem_euclid(q as i64) as f64;
    e_frac(r / q as f64)
}

impl RootTable {
    pub fn new(n: u64) -> Self {
        let bits = 64 - n.max(1).leading_zeros();
        let shift = (bits + 1) / 2;
        let step = 1u64 << shift;
        let coarse = (0..=(n >> shift))
            .map(|k| e_rat((k * step) as i64, n))
            .collect();
        let fine = (0..step).map(|l| e_rat(l as i64, n)).collect();
        RootTable { n, shift, coarse, fine }
    }

    #[inline(always)]
    pub fn get(&self, j: u64) -> Complex64 {
        debug_assert!(j < self.n);
        let mask = (1u64 << self.shift) - 1;
        self.coarse[(j >> self.shift) as usize] * self.fine[(j & mask) as usize]
    }
}

/// e(x alpha / n) for real x and integer alpha in [-n, n).
pub struct RealPhaseTable {
    offset: i64,
    shift: u32,
    coarse: Vec<Complex64>,
    fine: Vec<Complex64>,
}

impl RealPhaseTable {
    pub fn new(x: f64, n: u64) -> Self {
        let span = 2 * n;
        let bits = 64 - span.leading_zeros();
        let shift = (bits + 1) / 2;
        let step = 1u64 << shift;
        let nf = n as f64;
        let ph = |j: f64| e_frac((x * j / nf).rem_euclid(1.0));
        let coarse = (0..=(span >> shift))
            .map(|k| ph((k * step) as f64 - n as f64))
            .collect();
        let fine = (0..step).map(|l| ph(l as f64)).collect();
        RealPhaseTable { offset: n as i64, shift, coarse, fine }
    }

    #[inline(always)]
    pub fn get(&self, alpha: i64) -> Complex64 {
        let j = (alpha + self.offset) as u64;
        let mask = (1u64 << self.shift) - 1;
        self.coarse[(j >> self.shift) as usize] * self.fine[(j & mask) as usize]
    }
}

/// The phase attached to the a-slot: an integer m (exact residue arithmetic)
/// or a real number x (continuous phase e(x alpha / N)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum APhase {
    Int(i64),
    Real(f64),
}

impl APhase {
    /// Integers given as reals are routed to the exact path.
    pub fn from_real(x: f64) -> Self {
        if x.fract() == 0.0 && x.abs() < 1e15 {
            APhase::Int(x as i64)
        } else {
            APhase::Real(x)
        }
    }
}

const QUARTER: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

#[inline(always)]
fn times_quarter(z: Complex64, w: u8) -> Complex64 {
    // multiplication by e(w/8) for even w is exact; branch-free since w is
    // data dependent
    let q = QUARTER[(w >> 1) as usize & 3];
    Complex64::new(z.re * q.re - z.im * q.im, z.re * q.im + z.im * q.re)
}

/// Compensated summation of complex numbers (Neumaier).
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    re: f64,
    im: f64,
    cre: f64,
    cim: f64,
}

#[inline(always)]
fn two_sum(s: &mut f64, c: &mut f64, x: f64) {
    let t = *s + x;
    if s.abs() >= x.abs() {
        *c += (*s - t) + x;
    } else {
        *c += (x - t) + *s;
    }
    *s = t;
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        two_sum(&mut self.re, &mut self.cre, z.re);
        two_sum(&mut self.im, &mut self.cim, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.cre, self.im + self.cim)
    }

    /// Magnitude of the accumulated compensation.
    pub fn compensation(&self) -> f64 {
        self.cre.hypot(self.cim)
    }
}

/// Reusable buffers for [`batch_sums`].
#[derive(Default)]
pub struct BatchBuffers {
    rr: Vec<f64>,
    ri: Vec<f64>,
    zr: Vec<f64>,
    zi: Vec<f64>,
    sr: Vec<f64>,
    si: Vec<f64>,
    pr: Vec<f64>,
    pi: Vec<f64>,
    acc: Vec<NeumaierSum>,
}

const BLOCK: usize = 512;
const LANES: usize = 8;

/// p <- p * r elementwise, returning the sum of the updated p. The lane
/// structure fixes the association order, so every instruction set gives
/// bit-identical results.
#[inline(always)]
fn mul_and_sum_body(pr: &mut [f64], pi: &mut [f64], rr: &[f64], ri: &[f64]) -> (f64, f64) {
    let mut sr = [0.0f64; LANES];
    let mut si = [0.0f64; LANES];
    let len = pr.len();
    let full = len - len % LANES;
    let (pr_h, pr_t) = pr.split_at_mut(full);
    let (pi_h, pi_t) = pi.split_at_mut(full);
    for (((a, b), c), d) in pr_h
        .chunks_exact_mut(LANES)
        .zip(pi_h.chunks_exact_mut(LANES))
        .zip(rr[..full].chunks_exact(LANES))
        .zip(ri[..full].chunks_exact(LANES))
    {
        for l in 0..LANES {
            let x = a[l] * c[l] - b[l] * d[l];
            let y = a[l] * d[l] + b[l] * c[l];
            a[l] = x;
            b[l] = y;
            sr[l] += x;
            si[l] += y;
        }
    }
    let mut tr = 0.0;
    let mut ti = 0.0;
    for k in 0..pr_t.len() {
        let (a, b, c, d) = (pr_t[k], pi_t[k], rr[full + k], ri[full + k]);
        let x = a * c - b * d;
        let y = a * d + b * c;
        pr_t[k] = x;
        pi_t[k] = y;
        tr += x;
        ti += y;
    }
    let r = ((sr[0] + sr[4]) + (sr[1] + sr[5])) + ((sr[2] + sr[6]) + (sr[3] + sr[7]));
    let i = ((si[0] + si[4]) + (si[1] + si[5])) + ((si[2] + si[6]) + (si[3] + si[7]));
    (r + tr, i + ti)
}

/// Run `n_max` rounds of [`mul_and_sum_body`], adding each round's sum to
/// the matching accumulator.
#[inline(always)]
fn power_rounds_body(pr: &mut [f64], pi: &mut [f64], rr: &[f64], ri: &[f64], acc: &mut [NeumaierSum]) {
    for slot in acc.iter_mut() {
        let (sr, si) = mul_and_sum_body(pr, pi, rr, ri);
        slot.add(Complex64::new(sr, si));
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx")]
unsafe fn mul_and_sum_avx(pr: &mut [f64], pi: &mut [f64], rr: &[f64], ri: &[f64]) -> (f64, f64) {
    use std::arch::x86_64::*;
    let len = pr.len().min(pi.len()).min(rr.len()).min(ri.len());
    let full = len - len % LANES;
    // lanes 0..4 and 4..8 of the scalar body
    let mut sr0 = _mm256_setzero_pd();
    let mut sr1 = _mm256_setzero_pd();
    let mut si0 = _mm256_setzero_pd();
    let mut si1 = _mm256_setzero_pd();
    let (a, b, c, d) = (pr.as_mut_ptr(), pi.as_mut_ptr(), rr.as_ptr(), ri.as_ptr());
    let mut k = 0;
    while k < full {
        for (h, (sr, si)) in [(0usize, (&mut sr0, &mut si0)), (4, (&mut sr1, &mut si1))] {
            let j = k + h;
            let va = _mm256_loadu_pd(a.add(j));
            let vb = _mm256_loadu_pd(b.add(j));
            let vc = _mm256_loadu_pd(c.add(j));
            let vd = _mm256_loadu_pd(d.add(j));
            let x = _mm256_sub_pd(_mm256_mul_pd(va, vc), _mm256_mul_pd(vb, vd));
            let y = _mm256_add_pd(_mm256_mul_pd(va, vd), _mm256_mul_pd(vb, vc));
            _mm256_storeu_pd(a.add(j), x);
            _mm256_storeu_pd(b.add(j), y);
            *sr = _mm256_add_pd(*sr, x);
            *si = _mm256_add_pd(*si, y);
        }
        k += LANES;
    }
    let mut sr = [0.0f64; LANES];
    let mut si = [0.0f64; LANES];
    _mm256_storeu_pd(sr.as_mut_ptr(), sr0);
    _mm256_storeu_pd(sr.as_mut_ptr().add(4), sr1);
    _mm256_storeu_pd(si.as_mut_ptr(), si0);
    _mm256_storeu_pd(si.as_mut_ptr().add(4), si1);
    let mut tr = 0.0;
    let mut ti = 0.0;
    for k in full..len {
        let (a, b, c, d) = (pr[k], pi[k], rr[k], ri[k]);
        let x = a * c - b * d;
        let y = a * d + b * c;
        pr[k] = x;
        pi[k] = y;
        tr += x;
        ti += y;
    }
    let r = ((sr[0] + sr[4]) + (sr[1] + sr[5])) + ((sr[2] + sr[6]) + (sr[3] + sr[7]));
    let i = ((si[0] + si[4]) + (si[1] + si[5])) + ((si[2] + si[6]) + (si[3] + si[7]));
    (r + tr, i + ti)
}

fn power_rounds(pr: &mut [f64], pi: &mut [f64], rr: &[f64], ri: &[f64], acc: &mut [NeumaierSum]) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx") {
            for slot in acc.iter_mut() {
                // SAFETY: the required CPU feature was detected at runtime;
                // all pointer accesses stay below the common slice length.
                let (sr, si) = unsafe { mul_and_sum_avx(pr, pi, rr, ri) };
                slot.add(Complex64::new(sr, si));
            }
            return;
        }
    }
    power_rounds_body(pr, pi, rr, ri, acc)
}

/// z <- z * w elementwise.
#[inline(always)]
fn mul_in_place(zr: &mut [f64], zi: &mut [f64], wr: &[f64], wi: &[f64]) {
    for (((a, b), &c), &d) in zr.iter_mut().zip(zi.iter_mut()).zip(wr).zip(wi) {
        let x = *a * c - *b * d;
        let y = *a * d + *b * c;
        *a = x;
        *b = y;
    }
}

/// Exact index offset of the fourth root e(w/8), w even, in units of 1/n.
/// Valid for every weight a frame can carry: w in {2, 6} only occurs when
/// 4 | n, and w = 4 only when n is even.
fn quarter_offsets(n: u64) -> [u64; 4] {
    [0, 1, 2, 3].map(|k| if (k * n) % 4 == 0 { (k * n / 4) % n } else { u64::MAX })
}

/// For each a-phase X in `phases` and each n in 1..=n_max, the value
/// `C sum_j w_j e((X alpha_j + sign n delta_j)/N)`, laid out as
/// `out[ix * n_max + (n - 1)]`.
///
/// The pairs are processed in cache-sized blocks; within a block the powers
/// e(n delta/N) are generated by repeated multiplication. A run of
/// consecutive integer phases is generated the same way in the a-slot.
pub fn batch_sums(
    frame: &Frame,
    phases: &[APhase],
    n_max: usize,
    n_sign: i64,
    buf: &mut BatchBuffers,
    out: &mut Vec<Complex64>,
) {
    let width = phases.len() * n_max;
    out.clear();
    out.resize(width, Complex64::new(0.0, 0.0));
    buf.acc.clear();
    buf.acc.resize(width, NeumaierSum::default());
    let n = frame.modulus;
    let ni = n as i64;
    let len = frame.len();
    let roots = RootTable::new(n);
    let fm = FastMod::new(n);
    let qoff = quarter_offsets(n);
    let real_tabs: Vec<Option<RealPhaseTable>> = phases
        .iter()
        .map(|ph| match *ph {
            APhase::Real(x) => Some(RealPhaseTable::new(x, n)),
            APhase::Int(_) => None,
        })
        .collect();
    // phases[ix] continues an integer run started earlier
    let continues: Vec<bool> = (0..phases.len())
        .map(|ix| {
            ix > 0
                && matches!((phases[ix - 1], phases[ix]),
                    (APhase::Int(a), APhase::Int(b)) if b == a + 1)
        })
        .collect();
    let have_runs = continues.iter().any(|&c| c);
    for b0 in (0..len).step_by(BLOCK) {
        let b1 = (b0 + BLOCK).min(len);
        let alpha = &frame.alpha[b0..b1];
        let wexp = &frame.wexp[b0..b1];
        buf.rr.clear();
        buf.ri.clear();
        for &d in &frame.delta[b0..b1] {
            let d = d as u64;
            let idx = if n_sign >= 0 || d == 0 { d } else { n - d };
            let z = roots.get(idx);
            buf.rr.push(z.re);
            buf.ri.push(z.im);
        }
        if have_runs {
            buf.zr.clear();
            buf.zi.clear();
            for &a in alpha {
                let z = roots.get((a + ni * ((a < 0) as i64)) as u64);
                buf.zr.push(z.re);
                buf.zi.push(z.im);
            }
        }
        for (ix, ph) in phases.iter().enumerate() {
            if continues[ix] {
                // s holds the previous integer phase; step it by e(alpha/N)
                mul_in_place(&mut buf.sr, &mut buf.si, &buf.zr, &buf.zi);
            } else {
                buf.sr.clear();
                buf.si.clear();
                match (*ph, &real_tabs[ix]) {
                    (APhase::Real(_), Some(tab)) => {
                        for (&a, &w) in alpha.iter().zip(wexp) {
                            let z = times_quarter(tab.get(a), w);
                            buf.sr.push(z.re);
                            buf.si.push(z.im);
                        }
                    }
                    (APhase::Int(m), _) => {
                        let mm = m.rem_euclid(ni) as u64;
                        for (&a, &w) in alpha.iter().zip(wexp) {
                            let ar = (a + ni * ((a < 0) as i64)) as u64;
                            let off = qoff[(w >> 1) as usize & 3];
                            debug_assert!(off != u64::MAX);
                            let z = roots.get(fm.reduce(mm * ar + off));
                            buf.sr.push(z.re);
                            buf.si.push(z.im);
                        }
                    }
                    _ => unreachable!(),
                }
            }
            buf.pr.clear();
            buf.pr.extend_from_slice(&buf.sr);
            buf.pi.clear();
            buf.pi.extend_from_slice(&buf.si);
            let acc = &mut buf.acc[ix * n_max..(ix + 1) * n_max];
            power_rounds(&mut buf.pr, &mut buf.pi, &buf.rr, &buf.ri, acc);
        }
    }
    for (o, a) in out.iter_mut().zip(&buf.acc) {
        *o = frame.complete(a.value());
    }
}

/// A single sum `C sum_j w_j e((m alpha_j + n delta_j)/N)` with directly
/// evaluated roots and compensated accumulation.
pub fn single_sum_int(frame: &Frame, m: i64, n: i64) -> (Complex64, f64) {
    let modulus = frame.modulus;
    let mut acc = NeumaierSum::default();
    for j in 0..frame.len() {
        let idx = (m as i128 * frame.alpha[j] as i128 + n as i128 * frame.delta[j] as i128)
            .rem_euclid(modulus as i128) as i64;
        acc.add(times_quarter(e_rat(idx, modulus), frame.wexp[j]));
    }
    (frame.complete(acc.value()), acc.compensation())
}

/// Same as [`single_sum_int`] with a real a-phase.
pub fn single_sum_real(frame: &Frame, x: f64, n: i64) -> (Complex64, f64) {
    let modulus = frame.modulus;
    let mut acc = NeumaierSum::default();
    for j in 0..frame.len() {
        let dn = (n as i128 * frame.delta[j] as i128).rem_euclid(modulus as i128) as f64;
        let t = (x * frame.alpha[j] as f64 + dn) / modulus as f64;
        acc.add(times_quarter(e_frac(t.rem_euclid(1.0)), frame.wexp[j]));
    }
    (frame.complete(acc.value()), acc.compensation())
}

pub fn quarter_table() -> &'static [Complex64; 4] {
    &QUARTER
}
