//! Collective-spin sensing with symmetric qubit ensembles under dephasing.

pub mod dephasing;
pub mod dicke;
pub mod error;
pub mod exec;
pub mod fit;
pub mod metrology;
pub mod oracle;
pub mod protocol;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
