//! Real-variable Kloosterman sums K(r^2, n, c): agreement with the integer
//! sums at integer r^2, the finite Fourier reconstruction in between, and a
//! Cesaro-averaged modulus series.

use rvkloosterman::kloosterman::{kloosterman, KloostermanQuery, Variant};
use rvkloosterman::rv::{dft_identity_check, rv_kloosterman, rv_partial_sum, RvQuery, RvVariant, TruncationPolicy};

fn main() {
    let c = 12;
    for rsq in [2.0, 2.25, 2.5, 3.0] {
        let k = rv_kloosterman(RvQuery { rsq, n: 1, modulus: c, weight2k: 3, variant: RvVariant::Even }).unwrap();
        let dft = dft_identity_check(rsq, 1, c, 3, RvVariant::Even).unwrap();
        print!("K({rsq:.2}, 1, {c}) = {:>9.5} {:+.5}i  reconstruction error {dft:.1e}", k.re, k.im);
        if rsq.fract() == 0.0 {
            let s = kloosterman(KloostermanQuery { m: rsq as i64, n: 1, c, weight2k: 3, variant: Variant::ThetaCapEven })
                .unwrap()
                .value;
            print!("  S = {:>9.5} {:+.5}i", s.re, s.im);
        }
        println!();
    }

    for cutoff in [1_000, 4_000, 16_000] {
        let policy = TruncationPolicy::with_cutoff(cutoff);
        let (v, osc) = rv_partial_sum(1.7, 2, 3, RvVariant::Odd, 1.5, &policy);
        println!("sum over odd c <= {cutoff:>5} of K~(1.7, 2, c)/c^1.5 = {:.6} {:+.6}i (oscillation {osc:.1e})", v.re, v.im);
    }
}
