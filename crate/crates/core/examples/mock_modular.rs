//! Zagier's weight 3/2 mock modular form: leading coefficients and the
//! transformation identities at sample points.

use rvkloosterman::modforms::*;
use rvkloosterman::Complex64;

fn main() {
    let series = zagier_holomorphic(12);
    let coeffs: Vec<String> = series.coeffs().map(|(n, a)| format!("{n}:{a}")).collect();
    println!("holomorphic part: {}", coeffs.join(" "));
    for tau in [Complex64::new(0.0, 1.0), Complex64::new(0.3, 0.9)] {
        let order = auto_order(-1.0 / (4.0 * tau)).max(auto_order(tau));
        println!("tau = {tau}: identity residual {:.1e}", zagier_identity_residual(tau, order).unwrap());
    }
    let tau = Complex64::new(0.0, 1.0);
    println!("H* anti-invariance residual {:.1e}", h_star_residual(tau, auto_order(tau)).unwrap());
    let r = lemma92_check(tau).unwrap();
    println!("contour integral identity: {:.12} vs {:.12}", r.lhs, r.rhs);
    let e2 = eisenstein_e2_series(6);
    println!("E_2 coefficients: {:?}", e2.coeffs().map(|(_, a)| a).collect::<Vec<_>>());
}
