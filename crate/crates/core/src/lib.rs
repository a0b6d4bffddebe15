//! Component-level combinatorics of Hurwitz spaces attached to finite racks
//! and groups: braid-orbit enumeration, `H_2(G, c)`, Frobenius descent on
//! components, and Malle / Cohen-Lenstra-Martinet counting constants.

pub mod error;
pub mod frobenius;
pub mod group;
pub mod homology;
pub mod input;
pub mod malle;
pub mod braid;
pub mod clm;
pub mod rack;

pub use error::{Error, Result};
