pub mod circuit;
pub mod config;
pub mod enumerate;
pub mod error;
pub mod figures;
pub mod gadget;
pub mod logical;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod steane;
pub mod sweep;
pub mod tomography;
pub mod verify;

pub use error::{Error, Result};
