//! Reconstruct a Gaussian from its values and Fourier values at sqrt(n).

use rvkloosterman::verify::{interp_check, GaussianSpec, VerifyConfig};

fn main() {
    let policy = VerifyConfig::default().policy(20_000);
    for dimension in [4, 3] {
        let spec = GaussianSpec { t: 1.0, dimension };
        let points = interp_check(spec, &[0.3, 0.7, 1.4, 2.5], 40, &policy).expect("converged");
        for p in points {
            println!(
                "d={dimension} x={:.1}: series {:.9}  exact {:.9}  residual {:.1e}",
                p.x, p.approx, p.exact, p.residual
            );
        }
    }
}
