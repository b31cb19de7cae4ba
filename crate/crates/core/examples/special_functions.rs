//! Bessel J_1 across its three evaluation regimes and the incomplete gamma
//! function Gamma(-1/2, x).

use rvkloosterman::special::*;

fn main() {
    println!("{:>6} {:>22} {:>22} {:>22}", "x", "series", "trapezoid", "Hankel");
    let cfg = SpecialFnConfig::default();
    for x in [2.0, SERIES_LIMIT, 15.0, HANKEL_LIMIT, 60.0] {
        println!(
            "{x:>6.1} {:>22.15e} {:>22.15e} {:>22.15e}",
            bessel_jn_series(1, x, &SpecialFnConfig { extended: true, ..cfg }),
            bessel_jn_trapezoid(1, x),
            bessel_jn_hankel(1, x)
        );
    }
    for x in [0.1, 1.0, 10.0, 100.0] {
        println!("Gamma(-1/2, {x:>5}) = {:.15e}   scaled {:.15e}", gamma_upper_mhalf(x), gamma_upper_mhalf_scaled(x));
    }
    for r in [0.0, 0.5, 1.0, 1.5] {
        println!("r = {r}: dimension-4 factor {:.6}, dimension-3 factor {:.6}", sinc_factor_4(r), sinc_factor_3(r));
    }
}
