//! Run the exact verification suite and print its report table.

use rvkloosterman::verify::{exit_code, reports_table, run_suite, Suite, VerifyConfig};

fn main() {
    let reports = run_suite(&[Suite::Exact], &VerifyConfig::default());
    print!("{}", reports_table(&reports));
    std::process::exit(exit_code(&reports));
}
