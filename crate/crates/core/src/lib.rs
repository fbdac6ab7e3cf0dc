pub mod ball_spectrum;
pub mod buckling_oracle;
pub mod disk_spectrum;
pub mod error;
pub mod fd;
pub mod field;
pub mod linalg;
pub mod poly3;
pub mod quadrature;
pub mod semidiff_3d;
pub mod shape_deriv_2d;
pub mod specfun;
pub mod validation;

pub use error::{Error, Result};
