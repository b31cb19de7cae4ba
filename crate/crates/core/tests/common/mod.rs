//! Brute-force reference implementations shared by the integration tests.
//! Everything here is written from the definitions with naive loops and no
//! calls into the library's arithmetic, so the two sides fail independently.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::TAU;

pub fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

pub fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// (a/p) by exhaustive search for a square root.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if (1..p).any(|x| x * x % p == r) {
        1
    } else {
        -1
    }
}

/// Kronecker symbol by factoring the bottom argument.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut v = if n < 0 && a < 0 { -1 } else { 1 };
    for p in prime_factors(n.unsigned_abs()) {
        v *= if p == 2 {
            match a.rem_euclid(8) {
                1 | 7 => 1,
                3 | 5 => -1,
                _ => 0,
            }
        } else {
            legendre(a, p)
        };
    }
    v
}

/// eps_d as a complex number (d odd).
pub fn eps(d: i64) -> Complex64 {
    if d.rem_euclid(4) == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

pub fn inverse(a: i64, m: i64) -> i64 {
    (0..m).find(|&x| (a * x).rem_euclid(m) == 1 % m).expect("unit")
}

fn ipow(z: Complex64, k: i64) -> Complex64 {
    z.powi(k as i32)
}

/// S(m, n, c, nu_Theta^{2k}) for even c, straight from the residue sum.
pub fn s_even(m: i64, n: i64, c: i64, k2: i64) -> Complex64 {
    let w = 2 * c;
    let mut acc = Complex64::new(0.0, 0.0);
    for d in 0..w {
        if gcd(d, w) != 1 {
            continue;
        }
        let a = inverse(d, w);
        let chi = kronecker(2 * c, d) as f64;
        let wt = ipow(eps(d), k2) * chi.powi(k2 as i32);
        acc += wt * e(((m * a + n * d).rem_euclid(w)) as f64 / w as f64);
    }
    acc
}

/// S(m, n, c, nu_Theta^{2k}) for odd c: a, d even mod 2c, ad = 1 mod c.
pub fn s_odd(m: i64, n: i64, c: i64, k2: i64) -> Complex64 {
    let w = 2 * c;
    let pre = e(k2 as f64 / 8.0) * ipow(eps(c), -k2);
    let mut acc = Complex64::new(0.0, 0.0);
    for d in (0..w).step_by(2) {
        if gcd(d, c) != 1 {
            continue;
        }
        let a = (0..w)
            .step_by(2)
            .find(|&a| (a * d).rem_euclid(c) == 1 % c)
            .unwrap();
        let chi = kronecker(2 * d, c) as f64;
        acc += chi.powi(k2 as i32) * e(((m * a + n * d).rem_euclid(w)) as f64 / w as f64);
    }
    acc * pre
}

/// S(m, n, c, nu_theta^{2k}) on Gamma_0(4) (width one), 4 | c.
pub fn s_level4(m: i64, n: i64, c: i64, k2: i64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for d in 0..c {
        if gcd(d, c) != 1 {
            continue;
        }
        let a = inverse(d, c);
        let chi = kronecker(c, d) as f64;
        let wt = ipow(eps(d), k2) * chi.powi(k2 as i32);
        acc += wt * e(((m * a + n * d).rem_euclid(c)) as f64 / c as f64);
    }
    acc
}

pub fn s_classical(m: i64, n: i64, c: i64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for d in 0..c {
        if gcd(d, c) != 1 {
            continue;
        }
        let a = inverse(d, c);
        acc += e(((m * a + n * d).rem_euclid(c)) as f64 / c as f64);
    }
    acc
}

/// K(r, n, c, nu^{2k}), even c, a in the window (-c, c).
pub fn k_even(r: f64, n: i64, c: i64, k2: i64) -> Complex64 {
    let w = 2 * c;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in (-c + 1)..c {
        if gcd(a, w) != 1 {
            continue;
        }
        let d = inverse(a.rem_euclid(w), w);
        let chi = kronecker(2 * c, d) as f64;
        let wt = ipow(eps(d), k2) * chi.powi(k2 as i32);
        acc += wt * e((r * a as f64 + (n * d) as f64) / w as f64);
    }
    acc
}

/// K~(r, n, q, nu^{2k}), odd q: b even in (-q, q), c even, bc = -1 mod q.
pub fn k_odd(r: f64, n: i64, q: i64, k2: i64) -> Complex64 {
    let pre = e(k2 as f64 / 8.0);
    if q == 1 {
        return pre;
    }
    let w = 2 * q;
    let pre = pre * ipow(eps(q), -k2);
    let mut acc = Complex64::new(0.0, 0.0);
    for b in ((-q + 1)..q).filter(|b| b % 2 == 0) {
        if gcd(b, q) != 1 {
            continue;
        }
        let c = (0..w)
            .step_by(2)
            .find(|&c| (b * c).rem_euclid(q) == q - 1)
            .unwrap();
        let chi = kronecker(-2 * c, q) as f64;
        acc += chi.powi(k2 as i32) * e((r * b as f64 - (n * c) as f64) / w as f64);
    }
    acc * pre
}

pub fn phi(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k as i64, n as i64) == 1).count() as u64
}

pub fn sigma(n: u64, s: u32) -> u64 {
    (1..=n).filter(|d| n % d == 0).map(|d| d.pow(s)).sum()
}

/// Number of integer triples with x^2 + y^2 + z^2 = n.
pub fn r3_count(n: i64) -> u64 {
    let b = (n as f64).sqrt() as i64 + 1;
    let mut k = 0;
    for x in -b..=b {
        for y in -b..=b {
            for z in -b..=b {
                if x * x + y * y + z * z == n {
                    k += 1;
                }
            }
        }
    }
    k
}

/// 12 H(n) from the reduced forms of discriminant -n, weighted by
/// 12 / (number of automorphisms modulo ±1).
pub fn twelve_h(n: i64) -> i64 {
    if n == 0 {
        return -1;
    }
    if n % 4 == 1 || n % 4 == 2 {
        return 0;
    }
    let mut t = 0;
    let mut a = 1;
    while 3 * a * a <= n {
        for b in -a..=a {
            if (b * b + n) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + n) / (4 * a);
            if c < a {
                continue;
            }
            if (b < 0) && (b == -a || a == c) {
                continue;
            }
            t += if a == b.abs() && a == c {
                4 // x^2 + xy + y^2 scaled
            } else if b == 0 && a == c {
                6
            } else {
                12
            };
        }
        a += 1;
    }
    t
}

pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}
