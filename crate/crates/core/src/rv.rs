//! Kloosterman sums with a real first argument. The a-variable runs over a
//! fixed symmetric window instead of a residue system, which makes the sum
//! a smooth function of r; at integer r it agrees with the ordinary sum.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use rayon::prelude::*;

use crate::kernel::{batch_sums, single_sum_real, APhase, BatchBuffers, Frame, FrameKind, NeumaierSum, Scratch};
use crate::kloosterman::{kloosterman, sieve, KloostermanError, KloostermanQuery, Variant};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RvError {
    #[error("modulus {modulus} has the wrong parity for the {variant:?} sum")]
    ParityMismatch { modulus: u64, variant: RvVariant },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error(transparent)]
    Kloosterman(#[from] KloostermanError),
}

/// Even modulus c (window -c < a < c) or odd modulus (window -c < b < c,
/// b even).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RvVariant {
    Even,
    Odd,
}

impl RvVariant {
    pub fn tag(self) -> &'static str {
        match self {
            RvVariant::Even => "rv-even",
            RvVariant::Odd => "rv-odd",
        }
    }

    pub fn frame_kind(self) -> FrameKind {
        match self {
            RvVariant::Even => FrameKind::ThetaEven,
            RvVariant::Odd => FrameKind::ThetaOdd,
        }
    }

    pub fn integer_variant(self) -> Variant {
        match self {
            RvVariant::Even => Variant::ThetaCapEven,
            RvVariant::Odd => Variant::ThetaCapOdd,
        }
    }

    pub fn admits(self, c: u64) -> bool {
        c > 0 && (c % 2 == 0) == (self == RvVariant::Even)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvQuery {
    pub rsq: f64,
    pub n: i64,
    pub modulus: u64,
    pub weight2k: i64,
    pub variant: RvVariant,
}

fn check(q: &RvQuery) -> Result<(), RvError> {
    if q.modulus == 0 {
        return Err(RvError::ZeroModulus);
    }
    if !q.variant.admits(q.modulus) {
        return Err(RvError::ParityMismatch { modulus: q.modulus, variant: q.variant });
    }
    Ok(())
}

/// K(r^2, n, c, nu^{2k}) (even) or K~(r^2, n, c, nu^{2k}) (odd).
pub fn rv_kloosterman(q: RvQuery) -> Result<Complex64, RvError> {
    check(&q)?;
    let mut s = Scratch::default();
    let frame = Frame::build(q.variant.frame_kind(), q.modulus, q.weight2k, sieve(), &mut s);
    Ok(single_sum_real(&frame, q.rsq, q.n).0)
}

/// The interpolation kernel 2i sin(pi t) / (e(t/(2c)) - 1), written as
/// e(-t/(4c)) sin(pi t) / sin(pi t/(2c)) so that it stays accurate near the
/// removable singularities t in 2cZ, where it equals 2c.
pub fn dft_kernel(t: f64, c: u64) -> Complex64 {
    let two_c = 2.0 * c as f64;
    let u = t / two_c;
    if u == u.round() {
        return Complex64::new(two_c, 0.0);
    }
    let ratio = (PI * t).sin() / (PI * u).sin();
    Complex64::from_polar(ratio, -PI * u)
}

/// Reconstruct K(r^2, n, c) from the integer sums S(k, n, c), k mod 2c,
/// through the finite Fourier expansion of e(r a / (2c)) on the window,
/// and return the deviation from the direct real-variable sum.
pub fn dft_identity_check(rsq: f64, n: i64, c: u64, weight2k: i64, variant: RvVariant) -> Result<f64, RvError> {
    let direct = rv_kloosterman(RvQuery { rsq, n, modulus: c, weight2k, variant })?;
    if rsq.fract() == 0.0 {
        let s = kloosterman(KloostermanQuery {
            m: rsq as i64,
            n,
            c,
            weight2k,
            variant: variant.integer_variant(),
        })?
        .value;
        return Ok((direct - s).norm());
    }
    let mut acc = NeumaierSum::default();
    for k in 0..(2 * c) as i64 {
        let s = kloosterman(KloostermanQuery {
            m: k,
            n,
            c,
            weight2k,
            variant: variant.integer_variant(),
        })?
        .value;
        acc.add(dft_kernel(rsq - k as f64, c) * s);
    }
    let rebuilt = acc.value() / (2.0 * c as f64);
    Ok((direct - rebuilt).norm())
}

/// How an infinite modulus series is truncated and averaged.
///
/// The moduli up to `cutoff` are split into `segments` equal blocks; the
/// reported value is the mean of the partial sums at the last `blocks` block
/// ends, and the oscillation is the largest change between consecutive
/// block ends within that window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub cutoff: u64,
    pub blocks: usize,
    pub segments: usize,
    pub tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { cutoff: 20_000, blocks: 8, segments: 16, tol: 1e-2 }
    }
}

impl TruncationPolicy {
    pub fn with_cutoff(cutoff: u64) -> Self {
        TruncationPolicy { cutoff, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.cutoff < 64 {
            return Err(format!("cutoff {} is below 64", self.cutoff));
        }
        if self.blocks < 2 || self.blocks > self.segments {
            return Err(format!("averaging window {} must lie in [2, {}]", self.blocks, self.segments));
        }
        if !(self.tol > 0.0) {
            return Err("tolerance must be positive".into());
        }
        Ok(())
    }

    /// The block ends, increasing, the last one equal to the cutoff.
    pub fn block_ends(&self) -> Vec<u64> {
        let mut ends: Vec<u64> = (1..=self.segments as u64)
            .map(|j| (self.cutoff as u128 * j as u128 / self.segments as u128) as u64)
            .collect();
        ends.dedup();
        ends
    }
}

/// Which sums enter a modulus series: moduli first, first + step, ... and
/// for each one the batch of a-phases times n = 1..=n_max.
#[derive(Debug, Clone, Copy)]
pub struct SeriesTerms<'a> {
    pub kind: FrameKind,
    pub weight2k: i64,
    pub first: u64,
    pub step: u64,
    pub phases: &'a [APhase],
    pub n_max: usize,
    pub n_sign: i64,
}

impl SeriesTerms<'_> {
    pub fn width(&self) -> usize {
        self.phases.len() * self.n_max
    }
}

/// Consecutive moduli per parallel task.
const CHUNK: usize = 16;

/// Partial sums of sum_c K(phase, n, c) weight(c, phase, n) over moduli
/// c <= x for every x in `ends` (increasing). The result holds one vector
/// per end point, laid out like [`batch_sums`]. Chunks never straddle an end
/// point and are reduced in modulus order, so the output does not depend on
/// the number of worker threads.
pub fn series_snapshots<F>(terms: &SeriesTerms, ends: &[u64], weight: F) -> Vec<Vec<Complex64>>
where
    F: Fn(u64, usize, usize) -> Complex64 + Sync,
{
    let width = terms.width();
    let Some(&cutoff) = ends.last() else {
        return Vec::new();
    };
    let mut chunks: Vec<(u64, u64)> = Vec::new();
    let mut c = terms.first;
    let mut ei = 0;
    while c <= cutoff {
        while ends[ei] < c {
            ei += 1;
        }
        // at most CHUNK moduli, none beyond the current end point
        let last = (c + terms.step * (CHUNK as u64 - 1)).min(ends[ei]);
        let last = last - (last - c) % terms.step;
        chunks.push((c, last));
        c = last + terms.step;
    }
    let partials: Vec<(u64, Vec<Complex64>)> = chunks
        .par_iter()
        .map_init(
            || (Scratch::default(), Frame::default(), BatchBuffers::default(), Vec::new()),
            |(scratch, frame, buf, out), &(lo, hi)| {
                let mut acc = vec![NeumaierSum::default(); width];
                let mut c = lo;
                while c <= hi {
                    frame.fill(terms.kind, c, terms.weight2k, sieve(), scratch);
                    batch_sums(frame, terms.phases, terms.n_max, terms.n_sign, buf, out);
                    for (j, (a, v)) in acc.iter_mut().zip(out.iter()).enumerate() {
                        a.add(*v * weight(c, j / terms.n_max, j % terms.n_max + 1));
                    }
                    c += terms.step;
                }
                (hi, acc.iter().map(|a| a.value()).collect())
            },
        )
        .collect();
    let mut total = vec![NeumaierSum::default(); width];
    let mut it = partials.into_iter().peekable();
    let mut snaps = Vec::with_capacity(ends.len());
    for &x in ends {
        while let Some((_, vals)) = it.next_if(|(hi, _)| *hi <= x) {
            for (t, v) in total.iter_mut().zip(&vals) {
                t.add(*v);
            }
        }
        snaps.push(total.iter().map(|t| t.value()).collect());
    }
    snaps
}

/// A Cesaro-averaged truncation of a modulus series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CesaroValue {
    pub value: Complex64,
    pub oscillation: f64,
    /// The plain partial sum at the cutoff.
    pub last: Complex64,
}

/// Average the snapshots at the block ends of `policy`.
pub fn cesaro_from_snapshots(snaps: &[Vec<Complex64>], window: usize) -> Vec<CesaroValue> {
    let Some(last) = snaps.last() else {
        return Vec::new();
    };
    let w = window.min(snaps.len()).max(1);
    let tail = &snaps[snaps.len() - w..];
    (0..last.len())
        .map(|j| {
            let mut acc = NeumaierSum::default();
            for s in tail {
                acc.add(s[j]);
            }
            let mut osc: f64 = 0.0;
            for k in snaps.len() - w..snaps.len() {
                if k > 0 {
                    osc = osc.max((snaps[k][j] - snaps[k - 1][j]).norm());
                }
            }
            CesaroValue { value: acc.value() / w as f64, oscillation: osc, last: last[j] }
        })
        .collect()
}

/// Cesaro-averaged series sum_c K(phase, n, c) weight(c, phase, n) under
/// `policy`, one entry per (phase, n).
pub fn cesaro_series<F>(terms: &SeriesTerms, policy: &TruncationPolicy, weight: F) -> Vec<CesaroValue>
where
    F: Fn(u64, usize, usize) -> Complex64 + Sync,
{
    let snaps = series_snapshots(terms, &policy.block_ends(), weight);
    cesaro_from_snapshots(&snaps, policy.blocks)
}

/// The Cesaro-averaged sum of K(r^2, n, c)/c^s over admissible c <= cutoff,
/// with the block-to-block oscillation.
pub fn rv_partial_sum(
    rsq: f64,
    n: i64,
    weight2k: i64,
    variant: RvVariant,
    s: f64,
    policy: &TruncationPolicy,
) -> (Complex64, f64) {
    if n == 0 {
        // the batch routine covers n >= 1 only
        return rv_partial_sum_direct(rsq, 0, weight2k, variant, s, policy);
    }
    let phases = [APhase::from_real(rsq)];
    let terms = SeriesTerms {
        kind: variant.frame_kind(),
        weight2k,
        first: if variant == RvVariant::Even { 2 } else { 1 },
        step: 2,
        phases: &phases,
        n_max: n.unsigned_abs() as usize,
        n_sign: if n < 0 { -1 } else { 1 },
    };
    let idx = n.unsigned_abs() as usize - 1;
    let w = |c: u64, _: usize, k: usize| {
        if k == idx + 1 {
            Complex64::new((c as f64).powf(-s), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let r = &cesaro_series(&terms, policy, w)[idx];
    (r.value, r.oscillation)
}

fn rv_partial_sum_direct(
    rsq: f64,
    n: i64,
    weight2k: i64,
    variant: RvVariant,
    s: f64,
    policy: &TruncationPolicy,
) -> (Complex64, f64) {
    let mut scratch = Scratch::default();
    let mut frame = Frame::default();
    let mut acc = NeumaierSum::default();
    let ends = policy.block_ends();
    let mut snaps = Vec::new();
    let mut c = if variant == RvVariant::Even { 2 } else { 1 };
    for &x in &ends {
        while c <= x {
            frame.fill(variant.frame_kind(), c, weight2k, sieve(), &mut scratch);
            acc.add(single_sum_real(&frame, rsq, n).0 * (c as f64).powf(-s));
            c += 2;
        }
        snaps.push(vec![acc.value()]);
    }
    let r = cesaro_from_snapshots(&snaps, policy.blocks)[0];
    (r.value, r.oscillation)
}
