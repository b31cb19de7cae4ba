//! Kloosterman sums for the theta multiplier, their real-variable
//! analogues, and the Fourier interpolation bases they produce for radial
//! functions in dimensions 3 and 4.
//!
//! The runnable examples are the intended entry points:
//!
//! ```text
//! cargo run --release --example kloosterman_sums
//! cargo run --release --example theta_multiplier
//! cargo run --release --example coset_words
//! cargo run --release --example real_variable
//! cargo run --release --example local_factors
//! cargo run --release --example special_functions
//! cargo run --release --example mock_modular
//! cargo run --release --example basis_functions
//! cargo run --release --example gaussian_interpolation
//! cargo run --release --example asymptotics
//! cargo run --release --example verify_suite
//! ```
//!
//! The `rvk` binary exposes the same functionality on the command line.

pub mod arith;
pub mod basis;
pub mod cli;
pub mod kernel;
pub mod kloosterman;
pub mod modforms;
pub mod modgroup;
pub mod rv;
pub mod special;
pub mod verify;

pub use num_complex::Complex64;
