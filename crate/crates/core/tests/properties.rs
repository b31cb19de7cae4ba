mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rvkloosterman::arith;
use rvkloosterman::basis::{rows_from_csv, rows_to_csv, BasisVariant, TableRow};
use rvkloosterman::kloosterman::{kloosterman, KloostermanCache, KloostermanQuery, Variant};
use rvkloosterman::modforms::QSeries;
use rvkloosterman::modgroup::{membership, nu_theta, principal_power, Group, Mat2Z};
use rvkloosterman::rv::{dft_identity_check, rv_kloosterman, RvQuery, RvVariant};

fn s(m: i64, n: i64, c: u64, weight2k: i64, variant: Variant) -> Complex64 {
    kloosterman(KloostermanQuery { m, n, c, weight2k, variant }).unwrap().value
}

fn weight() -> impl Strategy<Value = i64> {
    prop_oneof![Just(1i64), Just(3), Just(4), Just(-1), Just(-3), Just(2), Just(0)]
}

/// Words in S and T^2 (and -I), i.e. elements of the theta group.
fn theta_word() -> impl Strategy<Value = Mat2Z> {
    (prop::collection::vec(-3i64..=3, 1..8), any::<bool>()).prop_map(|(word, neg)| {
        let mut g = Mat2Z::IDENTITY;
        for k in word {
            g = if k == 0 { g * Mat2Z::S } else { g * Mat2Z::translation(2 * k) };
        }
        if neg {
            g.neg()
        } else {
            g
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn kronecker_matches_oracle_and_is_multiplicative(a in -200i64..200, b in -200i64..200, n in -150i64..150) {
        prop_assert_eq!(arith::kronecker(a, n), common::kronecker(a, n));
        prop_assert_eq!(arith::kronecker(a * b, n), arith::kronecker(a, n) * arith::kronecker(b, n));
    }

    #[test]
    fn inverse_and_crt(a in -10_000i64..10_000, m in 2u64..5_000, r in 0u64..97, q in 0u64..89) {
        match arith::mod_inverse(a, m) {
            Ok(x) => prop_assert_eq!((a.rem_euclid(m as i64) as u64 * x) % m, 1),
            Err(_) => prop_assert!(arith::gcd(a, m as i64) > 1),
        }
        let x = arith::crt_pair(r, 97, q, 89).unwrap();
        prop_assert_eq!((x % 97, x % 89), (r, q));
    }

    #[test]
    fn even_sums_match_residue_oracle(m in -12i64..12, n in -12i64..12, h in 1u64..20, k2 in weight()) {
        let c = 2 * h;
        let got = s(m, n, c, k2, Variant::ThetaCapEven);
        let want = common::s_even(m, n, c as i64, k2);
        prop_assert!((got - want).norm() < 1e-9, "{} vs {}", got, want);
    }

    #[test]
    fn odd_sums_match_residue_oracle(m in -12i64..12, n in -12i64..12, h in 0u64..20, k2 in weight()) {
        let c = 2 * h + 1;
        let got = s(m, n, c, k2, Variant::ThetaCapOdd);
        let want = common::s_odd(m, n, c as i64, k2);
        prop_assert!((got - want).norm() < 1e-9, "{} vs {}", got, want);
    }

    #[test]
    fn conjugation_and_symmetry(m in -15i64..15, n in -15i64..15, c in 1u64..60, k2 in weight()) {
        let variant = if c % 2 == 0 { Variant::ThetaCapEven } else { Variant::ThetaCapOdd };
        let a = s(m, n, c, k2, variant);
        prop_assert!((a.conj() - s(-m, -n, c, -k2, variant)).norm() < 1e-9);
        if c % 2 == 0 {
            prop_assert!((a - s(n, m, c, k2, variant)).norm() < 1e-9);
        }
        let bound = (2 * c) as f64;
        prop_assert!(a.norm() <= bound + 1e-9);
    }

    #[test]
    fn real_variable_sums_match_oracle(r in 0.0f64..6.0, n in -8i64..8, h in 1u64..15, k2 in weight()) {
        let rsq = r * r;
        let even = rv_kloosterman(RvQuery { rsq, n, modulus: 2 * h, weight2k: k2, variant: RvVariant::Even }).unwrap();
        prop_assert!((even - common::k_even(rsq, n, 2 * h as i64, k2)).norm() < 1e-9);
        let q = 2 * h - 1;
        let odd = rv_kloosterman(RvQuery { rsq, n, modulus: q, weight2k: k2, variant: RvVariant::Odd }).unwrap();
        prop_assert!((odd - common::k_odd(rsq, n, q as i64, k2)).norm() < 1e-9);
    }

    #[test]
    fn dft_reconstruction(r in 0.0f64..5.0, n in -10i64..10, c in 1u64..40, k2 in weight()) {
        let variant = if c % 2 == 0 { RvVariant::Even } else { RvVariant::Odd };
        prop_assert!(dft_identity_check(r * r, n, c, k2, variant).unwrap() < 1e-9);
    }

    #[test]
    fn integer_argument_specializes(m in -10i64..10, n in -10i64..10, c in 1u64..40, k2 in weight()) {
        let (variant, iv) = if c % 2 == 0 { (RvVariant::Even, Variant::ThetaCapEven) } else { (RvVariant::Odd, Variant::ThetaCapOdd) };
        let k = rv_kloosterman(RvQuery { rsq: m as f64, n, modulus: c, weight2k: k2, variant }).unwrap();
        prop_assert!((k - s(m, n, c, k2, iv)).norm() < 1e-9);
    }

    #[test]
    fn theta_words_stay_in_the_group(g in theta_word(), h in theta_word()) {
        prop_assert!(membership(g, Group::GammaTheta));
        prop_assert!(membership(g * h, Group::GammaTheta));
        prop_assert_eq!(g * g.inverse(), Mat2Z::IDENTITY);
        prop_assert!(nu_theta(g).is_ok());
    }

    #[test]
    fn theta_multiplier_is_a_multiplier_system(g in theta_word(), h in theta_word(), x in -0.5f64..0.5, y in 0.5f64..2.0) {
        // nu(gh) (gh : tau)^{1/2} = nu(g) (g : h tau)^{1/2} nu(h) (h : tau)^{1/2}
        let tau = Complex64::new(x, y);
        let lhs = nu_theta(g * h).unwrap().to_complex() * principal_power((g * h).j(tau), 1);
        let rhs = nu_theta(g).unwrap().to_complex() * principal_power(g.j(h.act(tau)), 1)
            * nu_theta(h).unwrap().to_complex() * principal_power(h.j(tau), 1);
        prop_assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn qseries_ring_laws(a in prop::collection::vec(-50i64..50, 1..12), b in prop::collection::vec(-50i64..50, 1..12),
                         c in prop::collection::vec(-50i64..50, 1..12), shift in -3i64..3) {
        let sa = QSeries::new(shift, a, false);
        let sb = QSeries::new(0, b, false);
        let sc = QSeries::new(1, c, false);
        prop_assert_eq!(sa.mul(&sb).unwrap(), sb.mul(&sa).unwrap());
        let left = sa.add(&sb).unwrap().mul(&sc).unwrap();
        let right = sa.mul(&sc).unwrap().add(&sb.mul(&sc).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let zero = sa.sub(&sa).unwrap();
        prop_assert!(zero.coeffs().all(|(_, v)| v == 0));
        let halved = QSeries::new(0, vec![1i64], true);
        prop_assert!(sa.mul(&halved).is_err() || sa.halfperiod());
    }

    #[test]
    fn qseries_text_round_trip(re in prop::collection::vec(-1e6f64..1e6, 1..10), shift in -5i64..5, half in any::<bool>()) {
        let coeffs: Vec<Complex64> = re.iter().map(|&x| Complex64::new(x, -x / 3.0)).collect();
        let q = QSeries::new(shift, coeffs, half);
        let back = QSeries::<Complex64>::from_text(&q.to_text()).unwrap();
        prop_assert_eq!(back, q);
    }

    #[test]
    fn cache_records_round_trip(m in -100i64..100, n in -100i64..100, c in 1u64..500, k2 in weight()) {
        let variant = if c % 2 == 0 { Variant::ThetaCapEven } else { Variant::ThetaCapOdd };
        let q = KloostermanQuery { m, n, c, weight2k: k2, variant };
        let key = KloostermanCache::key(&q);
        let v = Complex64::new(m as f64 / 7.0, (n as f64).sqrt().max(0.0) * 1e-3);
        let (k2_, v2) = KloostermanCache::parse_record(&KloostermanCache::format_record(&key, v)).unwrap();
        prop_assert_eq!(k2_, key);
        prop_assert_eq!(v2, v);
    }

    #[test]
    fn basis_csv_round_trip(rows in prop::collection::vec((3u32..5, 0u64..100, any::<bool>(), -1e3f64..1e3, any::<f64>(), 0.0f64..1.0), 0..8)) {
        let rows: Vec<TableRow> = rows
            .into_iter()
            .filter(|r| r.4.is_finite())
            .map(|(dim, n, t, r, value, oscillation)| TableRow {
                dim,
                n,
                variant: if t { BasisVariant::Tilde } else { BasisVariant::Plain },
                r,
                value,
                oscillation,
            })
            .collect();
        prop_assert_eq!(rows_from_csv(&rows_to_csv(&rows)).unwrap(), rows);
    }
}
