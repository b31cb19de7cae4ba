//! Euler factors of the Kloosterman zeta function at weight 3/2: the
//! closed form against the truncated defining series.

use rvkloosterman::kloosterman::{local_a, local_a_series};
use rvkloosterman::Complex64;

fn main() {
    let s = Complex64::new(0.75, 0.0);
    for p in [3, 5, 7, 11] {
        for n in [-4, -1, 1, 2, 9] {
            let closed = local_a(p, n, s, 3).unwrap();
            let series = local_a_series(p, n, s, 3).unwrap();
            println!("A(p={p:>2}, n={n:>2}, s=0.75) = {:>9.6} {:+.6}i   series {:>9.6}", closed.re, closed.im, series.re);
        }
    }
}
