pub mod classify;
pub mod error;
pub mod exactalg;
pub mod jacobi;
pub mod models;
pub mod par;
pub mod projcurve;
pub mod sweep;

pub use error::{Error, ErrorKind, Result};
pub use par::{par_map, seq_map};
