pub mod analysis;
pub mod constants;
pub mod error;
pub mod fidelity;
pub mod gates;
pub mod materials;
pub mod ion;
pub mod matrix;
pub mod optim;
pub mod propagate;
pub mod pulse;
pub mod spin;
pub mod units;

pub use error::{Error, Result};
