mod common;

use common::*;
use rvkloosterman::arith::*;
use rvkloosterman::modgroup::EighthRoot;

#[test]
fn gcd_inverse_and_crt() {
    for a in -40..=40i64 {
        for b in -40..=40i64 {
            assert_eq!(rvkloosterman::arith::gcd(a, b) as i64, common::gcd(a, b));
            let (g, x, y) = egcd(a, b);
            assert_eq!(a * x + b * y, g);
            assert_eq!(g, common::gcd(a, b));
        }
    }
    for m in 2..=60u64 {
        for a in -70..70i64 {
            match mod_inverse(a, m) {
                Ok(x) => assert_eq!(x as i64, inverse(a.rem_euclid(m as i64), m as i64)),
                Err(e) => {
                    assert!(common::gcd(a, m as i64) > 1);
                    assert_eq!(e, ArithError::NotCoprime { a, m });
                }
            }
        }
    }
    assert_eq!(mod_inverse(3, 0), Err(ArithError::ZeroModulus));
    for (m1, m2) in [(4u64, 9u64), (7, 16), (25, 3)] {
        for r1 in 0..m1 {
            for r2 in 0..m2 {
                let x = crt_pair(r1, m1, r2, m2).unwrap();
                assert!(x < m1 * m2 && x % m1 == r1 && x % m2 == r2);
            }
        }
    }
}

#[test]
fn kronecker_matches_factored_definition() {
    for a in -60..=60i64 {
        for n in -60..=60i64 {
            assert_eq!(rvkloosterman::arith::kronecker(a, n), common::kronecker(a, n), "({a}/{n})");
        }
    }
    for a in -30..=30i64 {
        for n in (1..=99u64).step_by(2) {
            assert_eq!(jacobi(a, n), common::kronecker(a, n as i64));
        }
    }
}

#[test]
fn kronecker_is_multiplicative() {
    use rvkloosterman::arith::kronecker as k;
    for a in -25..=25i64 {
        for b in -25..=25i64 {
            for n in 1..=40i64 {
                assert_eq!(k(a * b, n), k(a, n) * k(b, n));
                assert_eq!(k(n, a * b), k(n, a) * k(n, b), "({n}/{a}*{b})");
            }
        }
    }
}

#[test]
fn theta_sign() {
    for d in (-51..=51i64).step_by(2) {
        assert!(close(epsilon(d).unwrap().to_complex(), eps(d), 0.0));
        assert_eq!(epsilon(d).unwrap().pow(4), EighthRoot::ONE);
    }
    assert_eq!(epsilon(6), Err(ArithError::EvenArgument(6)));
}

#[test]
fn divisor_functions() {
    for n in 1..=500u64 {
        let f = factorize(n);
        let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
        assert_eq!(back, n);
        let flat: Vec<u64> = f.iter().flat_map(|&(p, e)| std::iter::repeat(p).take(e as usize)).collect();
        assert_eq!(flat, prime_factors(n));
        assert_eq!(sieve_or_plain(n), f);
        assert_eq!(euler_phi(n), phi(n));
        assert_eq!(divisor_sum(n, 0) as u64, sigma(n, 0));
        assert_eq!(divisor_sum(n, 1) as u64, sigma(n, 1));
        assert_eq!(divisor_sum(n, 2) as u64, sigma(n, 2));
        let ds = divisors(n);
        assert_eq!(ds, (1..=n).filter(|d| n % d == 0).collect::<Vec<_>>());
        let squarefree = prime_factors(n).windows(2).all(|w| w[0] != w[1]);
        let mu = if squarefree { if prime_factors(n).len() % 2 == 0 { 1 } else { -1 } } else { 0 };
        assert_eq!(moebius(n), mu);
        assert_eq!(is_prime(n), prime_factors(n) == vec![n]);
    }
    // sum_{d | n} mu(d) = [n = 1]
    for n in 1..=200u64 {
        let s: i32 = divisors(n).into_iter().map(moebius).sum();
        assert_eq!(s, (n == 1) as i32);
    }
    assert_eq!(divisor_sum_frac(12, 4, 1), 4);
}

fn sieve_or_plain(n: u64) -> Vec<(u64, u32)> {
    SpfSieve::new(1000).factorize(n)
}

#[test]
fn small_helpers() {
    for n in 0..=2000u64 {
        let s = isqrt(n);
        assert!(s * s <= n && (s + 1) * (s + 1) > n);
        assert_eq!(is_square(n as i64), s * s == n);
        let (v, odd) = split_two(n);
        if n > 0 {
            assert_eq!(odd << v, n);
            assert_eq!(odd % 2, 1);
            assert_eq!(valuation(n as i64, 2), Some(v));
        }
    }
    assert!(!is_square(-4));
    assert_eq!(valuation(0, 3), None);
    assert_eq!(valuation(-54, 3), Some(3));
    assert_eq!(isqrt(u64::MAX), 4294967295);
    let fm = FastMod::new(1_000_003);
    for x in [0u64, 5, 1_000_003, 123_456_789_012, u32::MAX as u64 * 1000] {
        assert_eq!(fm.reduce(x), x % 1_000_003);
    }
}

#[test]
fn three_squares_brute_force() {
    let t = r3_table(400);
    for n in 0..=400u64 {
        let want = r3_count(n as i64);
        assert_eq!(r3(n), want, "n={n}");
        assert_eq!(t[n as usize], want, "n={n}");
    }
    // r_3(4n) = r_3(n), and no representations for 4^a (8b + 7)
    for n in 1..=300u64 {
        assert_eq!(r3(4 * n), r3(n));
    }
    assert_eq!(r3(7), 0);
    assert_eq!(r3(28), 0);
}

#[test]
fn hurwitz_numbers() {
    let table = hurwitz_table(1200);
    for n in 0..=1200u64 {
        let h = hurwitz(n);
        assert_eq!(h, table[n as usize]);
        if n <= 300 {
            assert_eq!(h.twelfths, twelve_h(n as i64), "n={n}");
        }
    }
    assert_eq!(hurwitz(0).to_string(), "-1/12");
    assert_eq!(hurwitz(3).to_string(), "1/3");
    assert_eq!(hurwitz(4).to_string(), "1/2");
    assert_eq!(hurwitz(23).to_string(), "3");
}

#[test]
fn class_number_relations() {
    // sum over t^2 <= 4n of H(4n - t^2) = 2 sigma(n) - sum_{d | n} min(d, n/d)
    for n in 1..=250u64 {
        let mut lhs = 0i64;
        let mut t = -(isqrt(4 * n) as i64);
        while t * t <= 4 * n as i64 {
            lhs += hurwitz(4 * n - (t * t) as u64).twelfths;
            t += 1;
        }
        let lambda: u64 = (1..=n).filter(|d| n % d == 0).map(|d| d.min(n / d)).sum();
        let rhs = 12 * (2 * sigma(n, 1) as i64 - lambda as i64);
        assert_eq!(lhs, rhs, "n={n}");
    }
    // r_3(n) = 12 (H(4n) - 2 H(n))
    for n in 1..=600u64 {
        assert_eq!(r3(n) as i64, hurwitz(4 * n).twelfths - 2 * hurwitz(n).twelfths, "n={n}");
    }
}
