pub mod error;
pub mod heisenberg;
pub mod mlde;
pub mod modforms;
pub mod numkernel;
pub mod qseries;
pub mod serreseq;

pub use error::{Error, Result};
pub use numkernel::{Rat, Val2};
pub use qseries::QSeries;
