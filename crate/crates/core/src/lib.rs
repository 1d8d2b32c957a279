//! Coded caching from projective geometries over finite fields.
//!
//! The crate builds the caching line graph whose users are the t-dim
//! superspaces of a fixed (t-1)-dim subspace W of F_q^k, whose subfiles are
//! (m+1)-sets of users spanning an (m+t)-dim space, and whose XOR
//! transmissions are (m+2)-sets of users spanning an (m+t+1)-dim space. On top
//! of that it provides placement and delivery, an end-to-end simulator, and
//! subpacketization-aware lower bounds on the delivery rate.

pub mod bounds;
pub mod cli;
pub mod compare;
pub mod error;
pub mod gf;
pub mod linegraph;
pub mod projgeom;
pub mod scheme;

pub use error::{Error, Result};
