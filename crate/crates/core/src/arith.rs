//! Elementary number theory: Kronecker symbols, theta signs, divisor
//! functions, sums of three squares and Hurwitz class numbers.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use thiserror::Error;

use crate::modgroup::EighthRoot;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("argument {0} must be odd")]
    EvenArgument(i64),
    #[error("{a} is not invertible modulo {m}")]
    NotCoprime { a: i64, m: u64 },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("argument {0} must be positive")]
    NonPositive(i64),
}

pub fn gcd(a: i64, b: i64) -> u64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd3(a: i64, b: i64, c: i64) -> u64 {
    gcd(gcd(a, b) as i64, c)
}

/// Extended Euclid: returns (g, x, y) with a x + b y = g >= 0.
pub fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

pub fn mod_inverse(a: i64, m: u64) -> Result<u64, ArithError> {
    if m == 0 {
        return Err(ArithError::ZeroModulus);
    }
    if m == 1 {
        return Ok(0);
    }
    let (g, x, _) = egcd(a.rem_euclid(m as i64), m as i64);
    if g != 1 {
        return Err(ArithError::NotCoprime { a, m });
    }
    Ok(x.rem_euclid(m as i64) as u64)
}

/// Combine x = r1 mod m1, x = r2 mod m2 for coprime moduli.
pub fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> Result<u64, ArithError> {
    let inv = mod_inverse(m1 as i64, m2)?;
    let m = m1 as u128 * m2 as u128;
    let diff = (r2 as i128 - r1 as i128).rem_euclid(m2 as i128) as u128;
    let t = diff * inv as u128 % m2 as u128;
    Ok(((r1 as u128 + m1 as u128 * t) % m) as u64)
}

/// Split c = 2^v * odd.
pub fn split_two(c: u64) -> (u32, u64) {
    if c == 0 {
        return (0, 0);
    }
    let v = c.trailing_zeros();
    (v, c >> v)
}

/// p-adic valuation; `None` for n = 0.
pub fn valuation(n: i64, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut n = n.unsigned_abs();
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Some(v)
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: i64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (m/n) with (m/-1) = sign of m (and +1 for m = 0).
pub fn kronecker(m: i64, n: i64) -> i32 {
    if n == 0 {
        return if m.unsigned_abs() == 1 { 1 } else { 0 };
    }
    let mut r = 1;
    if n < 0 && m < 0 {
        r = -r;
    }
    let (v, odd) = split_two(n.unsigned_abs());
    if v > 0 {
        if m % 2 == 0 {
            return 0;
        }
        let m8 = m.rem_euclid(8);
        if v % 2 == 1 && (m8 == 3 || m8 == 5) {
            r = -r;
        }
    }
    r * jacobi(m, odd)
}

/// The theta sign: 1 for d = 1 mod 4, i for d = 3 mod 4.
pub fn epsilon(d: i64) -> Result<EighthRoot, ArithError> {
    match d.rem_euclid(4) {
        1 => Ok(EighthRoot::ONE),
        3 => Ok(EighthRoot::I),
        _ => Err(ArithError::EvenArgument(d)),
    }
}

pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut n = n;
    if n < 2 {
        return out;
    }
    let (v, odd) = split_two(n);
    if v > 0 {
        out.push((2, v));
    }
    n = odd;
    let mut p = 3u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 2;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).first() == Some(&(n, 1))
}

pub fn moebius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// sigma_s(n) = sum of d^s over divisors d of n.
pub fn divisor_sum(n: u64, s: u32) -> u128 {
    if n == 0 {
        return 0;
    }
    factorize(n).iter().fold(1u128, |acc, &(p, e)| {
        let ps = (p as u128).pow(s);
        let mut term = 1u128;
        let mut pw = 1u128;
        for _ in 0..e {
            pw *= ps;
            term += pw;
        }
        acc * term
    })
}

/// sigma_s(num/den), which vanishes when the argument is not an integer.
pub fn divisor_sum_frac(num: u64, den: u64, s: u32) -> u128 {
    if den == 0 || num % den != 0 {
        0
    } else {
        divisor_sum(num / den, s)
    }
}

pub fn isqrt(n: u64) -> u64 {
    let sq = |r: u64| r as u128 * r as u128;
    let mut r = ((n as f64).sqrt() as u64).min(u32::MAX as u64);
    while sq(r) > n as u128 {
        r -= 1;
    }
    while sq(r + 1) <= n as u128 {
        r += 1;
    }
    r
}

pub fn is_square(n: i64) -> bool {
    n >= 0 && {
        let r = isqrt(n as u64);
        r * r == n as u64
    }
}

/// Number of representations of n as an ordered sum of three squares.
pub fn r3(n: u64) -> u64 {
    let s = isqrt(n);
    let mut count = 0u64;
    for x in 0..=s {
        let rest = n - x * x;
        let t = isqrt(rest);
        for y in 0..=t {
            let z2 = rest - y * y;
            if is_square(z2 as i64) {
                let z = isqrt(z2);
                let signs = [x, y, z].iter().filter(|&&v| v != 0).count() as u32;
                count += 1 << signs;
            }
        }
    }
    count
}

/// r3(0..=n_max) through the cube of the theta series.
pub fn r3_table(n_max: usize) -> Vec<u64> {
    let mut r1 = vec![0u64; n_max + 1];
    let mut x = 0usize;
    while x * x <= n_max {
        r1[x * x] += if x == 0 { 1 } else { 2 };
        x += 1;
    }
    let conv = |a: &[u64], b: &[u64]| {
        let mut out = vec![0u64; n_max + 1];
        for (i, &ai) in a.iter().enumerate().filter(|(_, &v)| v != 0) {
            for (j, &bj) in b[..=n_max - i].iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        out
    };
    let r2 = conv(&r1, &r1);
    conv(&r1, &r2)
}

/// A Hurwitz class number, stored exactly as a multiple of 1/12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HurwitzNumber {
    pub twelfths: i64,
}

impl HurwitzNumber {
    pub fn to_f64(self) -> f64 {
        self.twelfths as f64 / 12.0
    }

    pub fn numer_denom(self) -> (i64, i64) {
        let g = gcd(self.twelfths, 12) as i64;
        (self.twelfths / g, 12 / g)
    }
}

impl fmt::Display for HurwitzNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.numer_denom();
        if q == 1 {
            write!(f, "{p}")
        } else {
            write!(f, "{p}/{q}")
        }
    }
}

fn hurwitz_cache() -> &'static RwLock<HashMap<u64, HurwitzNumber>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, HurwitzNumber>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Weighted count (in twelfths) of reduced forms of discriminant -n.
fn hurwitz_direct(n: u64) -> i64 {
    if n == 0 {
        return -1;
    }
    if n % 4 == 1 || n % 4 == 2 {
        return 0;
    }
    let mut total = 0i64;
    let mut a = 1u64;
    while 3 * a * a <= n {
        // b has the parity of n, |b| <= a, and c = (b^2 + n) / (4a) >= a
        let mut b = (n % 2) as i64;
        while b as u64 <= a {
            let num = b as u64 * b as u64 + n;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a {
                    let bu = b as u64;
                    total += if bu == 0 && a == c {
                        6
                    } else if bu == a && a == c {
                        4
                    } else if bu == 0 || bu == a || a == c {
                        12
                    } else {
                        24
                    };
                }
            }
            b += 2;
        }
        a += 1;
    }
    total
}

/// Hurwitz class number H(n), with H(0) = -1/12.
pub fn hurwitz(n: u64) -> HurwitzNumber {
    if let Some(h) = hurwitz_cache().read().unwrap().get(&n) {
        return *h;
    }
    let h = HurwitzNumber { twelfths: hurwitz_direct(n) };
    hurwitz_cache().write().unwrap().insert(n, h);
    h
}

/// H(0..=n_max) by enumerating every reduced form once.
pub fn hurwitz_table(n_max: usize) -> Vec<HurwitzNumber> {
    let mut t = vec![0i64; n_max + 1];
    t[0] = -1;
    let nm = n_max as u64;
    let mut a = 1u64;
    while 3 * a * a <= nm {
        for b in 0..=a {
            let mut c = a;
            loop {
                let disc = 4 * a * c - b * b;
                if disc > nm {
                    break;
                }
                let w = if b == 0 && a == c {
                    6
                } else if b == a && a == c {
                    4
                } else if b == 0 || b == a || a == c {
                    12
                } else {
                    24
                };
                t[disc as usize] += w;
                c += 1;
            }
        }
        a += 1;
    }
    t.into_iter().map(|twelfths| HurwitzNumber { twelfths }).collect()
}

/// Smallest-prime-factor sieve for fast repeated factorization.
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(n_max: usize) -> Self {
        let mut spf = vec![0u32; n_max + 1];
        for i in 2..=n_max {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n_max {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfSieve { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn factorize(&self, n: u64) -> Vec<(u64, u32)> {
        if n as usize > self.limit() {
            return factorize(n);
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut n = n as usize;
        while n > 1 {
            let p = self.spf[n] as u64;
            n /= p as usize;
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

/// Barrett reduction for a fixed modulus below 2^32.
#[derive(Debug, Clone, Copy)]
pub struct FastMod {
    m: u64,
    inv: u64,
}

impl FastMod {
    pub fn new(m: u64) -> Self {
        assert!(m > 0 && m < (1 << 32));
        FastMod { m, inv: u64::MAX / m }
    }

    #[inline(always)]
    pub fn modulus(&self) -> u64 {
        self.m
    }

    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.inv as u128) >> 64) as u64;
        let mut r = x - q * self.m;
        if r >= self.m {
            r -= self.m;
        }
        if r >= self.m {
            r -= self.m;
        }
        r
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_small() {
        assert_eq!(kronecker(2, 7), 1);
        assert_eq!(kronecker(3, 7), -1);
        assert_eq!(kronecker(-1, -1), -1);
        assert_eq!(kronecker(5, -1), 1);
        assert_eq!(kronecker(0, -1), 1);
        assert_eq!(kronecker(3, 8), -1);
        assert_eq!(kronecker(2, 4), 0);
    }

    #[test]
    fn epsilon_rejects_even() {
        assert_eq!(epsilon(5), Ok(EighthRoot::ONE));
        assert_eq!(epsilon(-1), Ok(EighthRoot::I));
        assert_eq!(epsilon(4), Err(ArithError::EvenArgument(4)));
    }

    #[test]
    fn barrett_matches_rem() {
        for m in [1u64, 2, 3, 97, 4000, 399_998, (1 << 32) - 5] {
            let f = FastMod::new(m);
            for x in [0u64, 1, m - 1, m, m + 1, 12_345_678_901, u32::MAX as u64 * 7] {
                assert_eq!(f.reduce(x), x % m);
            }
        }
    }
}
