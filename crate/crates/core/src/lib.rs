//! Exact zeta functions, special values and Artin–Tate invariants of Fermat
//! surfaces `X_0^d + X_1^d + X_2^d + X_3^d = 0` over small finite fields.

pub mod arith;
pub mod bounds;
pub mod cache;
pub mod charsum;
pub mod config;
pub mod cyclo;
pub mod equidist;
pub mod error;
pub mod ffield;
pub mod orbit;
pub mod stick;
pub mod verify;
pub mod zeta;

pub use charsum::JacobiEngine;
pub use config::Limits;
pub use cyclo::{CycElement, QPowRational};
pub use error::{Error, Result};
pub use orbit::{Lambda, OrbitRecord, Tuple};
