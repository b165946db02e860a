pub mod error;
pub mod flows;
pub mod diffop;
pub mod groupoid;
pub mod powerfun;
pub mod quad;
pub mod schrodinger;
pub mod selftest;
pub mod weights;

pub use error::{Error, Result};

/// Full double precision (17 significant digits) for CSV output.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
