//! Theta-multiplier Kloosterman sums next to the classical ones, and the
//! even/odd modulus relation at weight 3/2.

use rvkloosterman::kloosterman::{kloosterman, relation_check, special_s00, KloostermanQuery, Variant};

fn s(m: i64, n: i64, c: u64, weight2k: i64, variant: Variant) -> rvkloosterman::Complex64 {
    kloosterman(KloostermanQuery { m, n, c, weight2k, variant }).expect("admissible modulus").value
}

fn main() {
    println!("weight 2: S(m, n, c, nu^4) against the classical S(m, n, 2c)");
    let cases = (6..=12u64).step_by(2).flat_map(|c| (-3..=3).flat_map(move |m| (m..=3).map(move |n| (m, n, c))));
    for (m, n, c) in cases.filter(|&(m, n, c)| s(m, n, c, 4, Variant::ThetaCapEven).norm() > 1e-9).step_by(5).take(6) {
        let theta = s(m, n, c, 4, Variant::ThetaCapEven);
        let classical = s(m, n, 2 * c, 0, Variant::Classical);
        println!("  m={m:>2} n={n:>2} c={c:>2}  {:>10.6}  {:>10.6}", theta.re, classical.re);
    }

    println!("weight 3/2, odd moduli");
    for c in [1, 3, 5, 9, 15, 25] {
        let v = s(-1, -1, c, 3, Variant::ThetaCapOdd);
        println!("  S(-1, -1, {c:>2}) = {:>10.6} {:+.6}i", v.re, v.im);
    }

    println!("closed form of S(0, 0, c) at square moduli");
    for c in [8, 18, 32] {
        let v = special_s00(c, Variant::ThetaCapEven).unwrap();
        println!("  c={c:>2}  {:.6} {:+.6}i", v.re, v.im);
    }

    let worst = (1..=21)
        .step_by(2)
        .flat_map(|c| (-3..=3).flat_map(move |m| (-3..=3).map(move |n| (m, n, c))))
        .map(|(m, n, c)| relation_check(m, n, c).unwrap().into_iter().fold(0.0, f64::max))
        .fold(0.0, f64::max);
    println!("even/odd relations, worst residual over |m|,|n|<=3, c<=21: {worst:.2e}");
}
