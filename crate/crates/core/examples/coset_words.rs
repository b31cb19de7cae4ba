//! Coset representatives of the theta group as reduced words in the
//! generators A and B of Gamma(2), listed with their bottom rows.

use rvkloosterman::modgroup::{enumerate_coset_b, enumerate_coset_b_tilde};

fn main() {
    let max_c = 12;
    let words = enumerate_coset_b(max_c);
    println!("{} words ending in B with |c| <= {max_c}:", words.len());
    for (w, g) in words.iter().take(12) {
        println!("  {w:<16} (c, d) = ({}, {})", g.c, g.d);
    }
    let tilde = enumerate_coset_b_tilde(max_c);
    println!("{} words followed by S:", tilde.len());
    for (w, g) in tilde.iter().take(6) {
        println!("  {w:<16} (c, d) = ({}, {})", g.c, g.d);
    }
}
