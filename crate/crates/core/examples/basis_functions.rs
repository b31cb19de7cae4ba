//! A table of interpolation basis functions b_{4,n}(r) and b_{3,n}(r),
//! written as CSV. The values at r = sqrt(m) show b_n(sqrt m) = delta_{nm}.

use rvkloosterman::basis::{evaluate_table, rows_to_csv, BasisVariant, TableRequest, TruncationPolicy};

fn main() {
    let policy = TruncationPolicy { cutoff: 20_000, tol: 0.05, ..TruncationPolicy::default() };
    let r_grid: Vec<f64> = vec![0.0, 0.5, 1.0, 2f64.sqrt(), 3f64.sqrt(), 2.0];
    let requests = [
        TableRequest { dim: 4, ns: vec![1, 2, 3], variant: BasisVariant::Plain, r_grid: r_grid.clone() },
        TableRequest { dim: 3, ns: vec![0, 1, 2], variant: BasisVariant::Tilde, r_grid },
    ];
    let rows = evaluate_table(&requests, &policy).expect("cutoff is valid");
    print!("{}", rows_to_csv(&rows));
}
