pub mod audit;
pub mod bath;
pub mod cg;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod ode;
pub mod oracle;
pub mod quadrature;
pub mod runner;
pub mod special;
pub mod system;
pub mod vdp;

pub use error::{Error, Result};
