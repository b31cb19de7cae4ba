//! The theta multiplier on generators and random words, checked against the
//! transformation of Theta(tau) = sum e^{pi i n^2 tau}.

use rvkloosterman::modforms::{auto_order, theta_cap};
use rvkloosterman::modgroup::{membership, nu_theta, principal_power, Group, Mat2Z};
use rvkloosterman::Complex64;

fn main() {
    for (name, g) in [("S", Mat2Z::S), ("T^2", Mat2Z::translation(2)), ("-I", Mat2Z::IDENTITY.neg())] {
        let nu = nu_theta(g).unwrap();
        println!("nu({name:>3}) = e({}/8)", nu.exponent());
    }

    let tau = Complex64::new(0.1, 1.2);
    let theta = |z: Complex64| theta_cap(z, auto_order(z)).unwrap().value;
    let mut g = Mat2Z::IDENTITY;
    for (step, gen) in [Mat2Z::S, Mat2Z::translation(2), Mat2Z::S, Mat2Z::translation(-4), Mat2Z::S].iter().enumerate() {
        g = g * *gen;
        assert!(membership(g, Group::GammaTheta));
        let gt = g.act(tau);
        let lhs = theta(gt);
        let rhs = nu_theta(g).unwrap().to_complex() * principal_power(g.j(tau), 1) * theta(tau);
        println!(
            "word length {}: g = [{} {}; {} {}]  |Theta(g tau) - nu (c tau + d)^(1/2) Theta(tau)| = {:.1e}",
            step + 1,
            g.a,
            g.b,
            g.c,
            g.d,
            (lhs - rhs).norm()
        );
    }
}
