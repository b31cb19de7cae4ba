mod common;

use common::*;
use num_complex::Complex64;
use rvkloosterman::kernel::{batch_sums, APhase, BatchBuffers};
use rvkloosterman::kloosterman::*;

fn s(m: i64, n: i64, c: u64, k2: i64, variant: Variant) -> Complex64 {
    kloosterman(KloostermanQuery { m, n, c, weight2k: k2, variant }).unwrap().value
}

#[test]
fn even_modulus_matches_residue_sum() {
    for c in (2..=40).step_by(2) {
        for k2 in 1..=4 {
            for m in -5..=5 {
                for n in [-4, -1, 0, 1, 3, 7] {
                    let lib = s(m, n, c, k2, Variant::ThetaCapEven);
                    let want = s_even(m, n, c as i64, k2);
                    assert!(close(lib, want, 1e-10), "c={c} k2={k2} m={m} n={n}: {lib} vs {want}");
                }
            }
        }
    }
}

#[test]
fn odd_modulus_matches_residue_sum() {
    for c in (1..=39).step_by(2) {
        for k2 in 1..=4 {
            for m in -5..=5 {
                for n in [-4, -1, 0, 1, 3, 7] {
                    let lib = s(m, n, c, k2, Variant::ThetaCapOdd);
                    let want = s_odd(m, n, c as i64, k2);
                    assert!(close(lib, want, 1e-10), "c={c} k2={k2} m={m} n={n}: {lib} vs {want}");
                }
            }
        }
    }
}

#[test]
fn level4_and_classical_match_residue_sums() {
    for c in (4..=64).step_by(4) {
        for k2 in [1, 3] {
            for m in -3..=3 {
                for n in -3..=3 {
                    let lib = s(m, n, c, k2, Variant::ThetaLevel4);
                    assert!(close(lib, s_level4(m, n, c as i64, k2), 1e-10));
                }
            }
        }
    }
    for c in 1..=40 {
        for m in -3..=3 {
            for n in -3..=3 {
                let lib = s(m, n, c, 0, Variant::Classical);
                assert!(close(lib, s_classical(m, n, c as i64), 1e-10), "c={c}");
            }
        }
    }
}

#[test]
fn larger_moduli_spot_checks() {
    for &c in &[210u64, 512, 998, 1024, 1446] {
        for (m, n) in [(1, 1), (-3, 2), (5, -7)] {
            let lib = s(m, n, c, 3, Variant::ThetaCapEven);
            assert!(close(lib, s_even(m, n, c as i64, 3), 1e-9), "c={c}");
        }
    }
    for &c in &[255u64, 729, 1001] {
        let lib = s(2, -3, c, 1, Variant::ThetaCapOdd);
        assert!(close(lib, s_odd(2, -3, c as i64, 1), 1e-9), "c={c}");
    }
}

#[test]
fn ramanujan_sums_and_phi() {
    for c in 1..=60u64 {
        assert!(close(s(0, 0, c, 0, Variant::Classical), Complex64::new(phi(c) as f64, 0.0), 1e-10));
        for n in 1..=12u64 {
            let mut rs = 0i64;
            for d in 1..=c {
                if c % d == 0 && n % d == 0 {
                    let e = c / d;
                    let pf = prime_factors(e);
                    let sq = pf.windows(2).any(|w| w[0] == w[1]);
                    let mu = if sq { 0 } else if pf.len() % 2 == 0 { 1 } else { -1 };
                    rs += d as i64 * mu;
                }
            }
            assert!(close(s(0, n as i64, c, 0, Variant::Classical), Complex64::new(rs as f64, 0.0), 1e-10));
        }
    }
}

#[test]
fn batch_matches_single_sums() {
    let mut buf = BatchBuffers::default();
    let mut out = Vec::new();
    for (variant, c) in [
        (Variant::ThetaCapEven, 96u64),
        (Variant::ThetaCapEven, 2310),
        (Variant::ThetaCapOdd, 105),
        (Variant::ThetaCapOdd, 1),
        (Variant::ThetaLevel4, 44),
        (Variant::Classical, 2),
        (Variant::Classical, 97),
    ] {
        let q = KloostermanQuery { m: 0, n: 0, c, weight2k: 3, variant };
        let frame = frame_for(&q).unwrap();
        let phases = [APhase::Int(-2), APhase::Int(-1), APhase::Int(0), APhase::Int(1), APhase::Int(5)];
        for sign in [1i64, -1] {
            batch_sums(&frame, &phases, 6, sign, &mut buf, &mut out);
            for (ix, ph) in phases.iter().enumerate() {
                let APhase::Int(m) = *ph else { unreachable!() };
                for n in 1..=6i64 {
                    let want = s(m, sign * n, c, 3, variant);
                    let got = out[ix * 6 + n as usize - 1];
                    assert!(close(got, want, 1e-9), "{variant} c={c} m={m} n={}", sign * n);
                }
            }
        }
    }
}

#[test]
fn extended_precision_agrees() {
    for (variant, c) in [(Variant::ThetaCapEven, 300u64), (Variant::ThetaCapOdd, 301), (Variant::ThetaLevel4, 300)] {
        for k2 in [1, 3, 4] {
            let q = KloostermanQuery { m: 7, n: -11, c, weight2k: k2, variant };
            let a = kloosterman(q).unwrap().value;
            let b = kloosterman_extended(q).unwrap();
            assert!((a - b).norm() < 1e-12, "{variant} {k2}: {}", (a - b).norm());
        }
    }
}

#[test]
fn weight_two_is_classical_at_double_modulus() {
    for c in (2..=60).step_by(2) {
        for m in -4..=4 {
            for n in -4..=4 {
                let a = s(m, n, c, 4, Variant::ThetaCapEven);
                let b = s(m, n, 2 * c, 0, Variant::Classical);
                assert!(close(a, b, 1e-10));
            }
        }
    }
}

#[test]
fn relations_between_parities() {
    for c in (1..=21).step_by(2) {
        for m in -4..=4 {
            for n in -4..=4 {
                let r = relation_check(m, n, c).unwrap();
                assert!(r.iter().all(|&x| x < 1e-9), "m={m} n={n} c={c}: {r:?}");
            }
        }
    }
    assert!(relation_check(1, 1, 4).is_err());
}

#[test]
fn closed_forms_for_zero_frequencies() {
    // the even family is nonzero exactly at c = 2 n^2
    for c in (2..=200).step_by(2) {
        let direct = s_even(0, 0, c as i64, 3);
        assert!(close(special_s00(c, Variant::ThetaCapEven).unwrap(), direct, 1e-9), "c={c}");
    }
    for c in (1..=199).step_by(2) {
        let direct = s_odd(0, 0, c as i64, 3);
        assert!(close(special_s00(c, Variant::ThetaCapOdd).unwrap(), direct, 1e-9), "c={c}");
    }
    let v = special_s00(2, Variant::ThetaCapEven).unwrap();
    assert!(close(v, e(-1.0 / 8.0) * std::f64::consts::SQRT_2, 1e-14));
    assert_eq!(special_s00(4, Variant::ThetaCapEven).unwrap(), Complex64::new(0.0, 0.0));
    let v = special_s00(9, Variant::ThetaCapOdd).unwrap();
    assert!(close(v, e(3.0 / 8.0) * 6.0, 1e-13));
}

#[test]
fn local_factor_tables() {
    for k2 in [1, 3] {
        for n in -50..=50 {
            assert_eq!(alpha(3, 0, n, k2).unwrap(), Complex64::new(1.0, 0.0));
            for p in [3u64, 5, 7] {
                for nu in 1..=4 {
                    let a = alpha(p, nu, n, k2).unwrap();
                    let b = alpha_direct(p, nu, n, k2).unwrap();
                    assert!(close(a, b, 1e-8), "p={p} nu={nu} n={n} k2={k2}: {a} vs {b}");
                }
            }
            for nu in 2..=7 {
                let a = alpha(2, nu, n, k2).unwrap();
                let b = alpha_direct(2, nu, n, k2).unwrap();
                assert!(close(a, b, 1e-8), "p=2 nu={nu} n={n} k2={k2}: {a} vs {b}");
            }
        }
    }
    // the vanishing case for even exponents
    assert_eq!(alpha(2, 4, 2, 3).unwrap(), Complex64::new(0.0, 0.0));
    assert!(alpha(2, 1, 1, 3).is_err());
    assert!(alpha(4, 1, 1, 3).is_err());
}

#[test]
fn euler_factors_closed_form_vs_series() {
    for k2 in [1, 3] {
        for p in [2u64, 3, 5, 7, 11] {
            for n in [-48i64, -25, -9, -4, -1, 1, 2, 3, 8, 12, 50] {
                for s in [0.6, 0.75, 0.9, 1.001] {
                    let s = Complex64::new(s, 0.0);
                    let a = local_a(p, n, s, k2).unwrap();
                    let b = local_a_series(p, n, s, k2).unwrap();
                    assert!(close(a, b, 1e-12), "p={p} n={n} s={s} k2={k2}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn euler_factors_at_three_quarters() {
    let s = Complex64::new(0.75, 0.0);
    let base = |p: f64| 1.0 + p.powf(-(2.0 * 0.75 - 0.5));
    for m in 1..=6i64 {
        let n = -m * m;
        for p in [3u64, 5, 7, 11, 13] {
            let r = local_a(p, n, s, 3).unwrap() / base(p as f64);
            assert!(close(r, Complex64::new(1.0, 0.0), 1e-12), "p={p} m={m}");
        }
        let r = local_a(2, n, s, 3).unwrap() / base(2.0);
        assert!(close(r, e(-1.0 / 8.0) / (3.0 * std::f64::consts::SQRT_2), 1e-12), "m={m}: {r}");
    }
    // p not dividing 2n: 1 + (-4n/p) p^{-(2s - 1/2)}
    for (p, n) in [(3u64, 1i64), (5, 2), (7, -3), (11, 5)] {
        let sv = 0.8;
        let want = 1.0 + legendre(-4 * n, p) as f64 * (p as f64).powf(-(2.0 * sv - 0.5));
        let got = local_a(p, n, Complex64::new(sv, 0.0), 3).unwrap();
        assert!(close(got, Complex64::new(want, 0.0), 1e-12));
    }
}

#[test]
fn products_of_local_factors() {
    for c in (2..=60).step_by(2) {
        for n in [-7i64, -4, -1, 1, 2, 5, 12] {
            assert!(multiplicativity_check(n, c, 3, Variant::ThetaCapEven).unwrap() < 1e-9, "c={c} n={n}");
        }
    }
    assert!(multiplicativity_check(5, 6, 3, Variant::ThetaCapEven).unwrap() < 1e-9);
    for c in (1..=45).step_by(2) {
        for n in [-3i64, 1, 4] {
            assert!(multiplicativity_check(n, c, 3, Variant::ThetaCapOdd).unwrap() < 1e-9, "c={c}");
            assert!(multiplicativity_check(n, c, 1, Variant::ThetaCapOdd).unwrap() < 1e-9, "c={c}");
        }
    }
}

#[test]
fn parity_errors() {
    let q = KloostermanQuery { m: 1, n: 1, c: 3, weight2k: 3, variant: Variant::ThetaCapEven };
    assert!(matches!(kloosterman(q), Err(KloostermanError::ParityMismatch { .. })));
    let q = KloostermanQuery { m: 1, n: 1, c: 6, weight2k: 3, variant: Variant::ThetaLevel4 };
    assert!(kloosterman(q).is_err());
    let q = KloostermanQuery { m: 1, n: 1, c: 0, weight2k: 3, variant: Variant::Classical };
    assert!(matches!(kloosterman(q), Err(KloostermanError::ZeroModulus)));
}

#[test]
fn partial_sums_are_order_stable() {
    let cps = geometric_checkpoints(3000, 4);
    let pool = |k| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
    let run = || partial_sums_multi(&[(-1, -1), (1, 2), (0, 3)], 3, Variant::ThetaCapEven, 3000, Divisor::C, &cps);
    let a = pool(1).install(run);
    let b = pool(4).install(run);
    assert_eq!(a.len(), b.len());
    for ((xa, va), (xb, vb)) in a.iter().zip(&b) {
        assert_eq!(xa, xb);
        for (p, q) in va.iter().zip(vb) {
            assert_eq!(p.re.to_bits(), q.re.to_bits());
            assert_eq!(p.im.to_bits(), q.im.to_bits());
        }
    }
    // direct accumulation at the last checkpoint
    let mut want = Complex64::new(0.0, 0.0);
    for c in (2..=3000).step_by(2) {
        want += s(1, 2, c, 3, Variant::ThetaCapEven) / c as f64;
    }
    let last = &a.last().unwrap().1;
    assert!(close(last[1], want, 1e-9));
    assert_eq!(a.last().unwrap().0, 3000);
}

#[test]
fn partial_sums_cover_every_admissible_modulus() {
    for variant in [Variant::ThetaCapOdd, Variant::ThetaLevel4, Variant::Classical] {
        let got = partial_sum(2, -1, 3, variant, 500, Divisor::C32);
        let mut want = Complex64::new(0.0, 0.0);
        for c in (1..=500u64).filter(|&c| variant.admits(c)) {
            want += s(2, -1, c, 3, variant) / (c as f64).powf(1.5);
        }
        assert!(close(got.last().unwrap().1, want, 1e-10), "{variant}");
    }
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.txt");
    let mut cache = KloostermanCache::new();
    let queries = [
        KloostermanQuery { m: 3, n: -2, c: 30, weight2k: 3, variant: Variant::ThetaCapEven },
        KloostermanQuery { m: 0, n: 1, c: 15, weight2k: 1, variant: Variant::ThetaCapOdd },
    ];
    let vals: Vec<_> = queries.iter().map(|&q| cache.get_or_compute(q).unwrap()).collect();
    cache.save(&path).unwrap();
    let loaded = KloostermanCache::load(&path).unwrap();
    assert_eq!(loaded.len(), 2);
    for (q, v) in queries.iter().zip(&vals) {
        let got = loaded.get(&KloostermanCache::key(q)).unwrap();
        assert_eq!(got.re.to_bits(), v.re.to_bits());
        assert_eq!(got.im.to_bits(), v.im.to_bits());
    }
    assert!(KloostermanCache::parse_record("theta-even,3,1").is_err());
}
