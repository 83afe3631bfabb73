//! Numerical Kauffman-bracket recoupling theory and the Yang-Mills trace on
//! closed surfaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`scalar`]: extended-exponent complex scalars.
//! * [`param`]: the deformation parameter `t` and its regime.
//! * [`recoupling`]: quantum integers, theta and tetrahedral networks, 6j symbols.
//! * [`annulus`]: the skein algebra of the annulus and the Kirby-color partial sums.
//! * [`torus`]: the skein algebra of the torus in the `(p, q)` basis.
//! * [`spine`]: colored trivalent spines of surfaces.
//! * [`surface`]: the Yang-Mills series on closed surfaces.
//! * [`cli`]: the command-line front end.

pub mod annulus;
pub mod cli;
pub mod error;
pub mod param;
pub mod recoupling;
pub mod scalar;
pub mod spine;
pub mod surface;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
pub use param::{Param, Regime};
pub use recoupling::{Color, Recoupler, TetLabels, Triple};
pub use scalar::ScaledScalar;
