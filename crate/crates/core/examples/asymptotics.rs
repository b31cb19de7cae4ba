//! Partial sums of S(m, n, c, nu^3)/c grow like a constant times sqrt(x)
//! when m and n are both negative squares, and are o(sqrt x) otherwise.

use rvkloosterman::kloosterman::Variant;
use rvkloosterman::verify::asymptotic_fit;

fn main() {
    for (m, n, variant) in [(-1, -1, Variant::ThetaCapEven), (-1, -1, Variant::ThetaCapOdd), (0, 0, Variant::ThetaCapEven), (1, 1, Variant::ThetaCapEven)] {
        let fit = asymptotic_fit(m, n, variant, 50_000).unwrap();
        println!(
            "(m, n) = ({m:>2}, {n:>2}) {variant:<10}: coefficient {:.4} {:+.4}i, predicted {:.4} {:+.4}i",
            fit.coefficient.re, fit.coefficient.im, fit.expected.re, fit.expected.im
        );
        for (x, v) in fit.samples.iter().step_by(4) {
            println!("    x = {x:>6}: P(x)/sqrt(x) = {:.4} {:+.4}i", v.re, v.im);
        }
    }
}
