//! Construction and analysis of quasi-cyclic LDPC codes built from circulant
//! permutation matrices whose shift values come from difference families.
//!
//! The pipeline: pick or verify a `(v, k, 1)` difference family
//! ([`family`], [`catalog`]), turn its blocks into an exponent matrix and
//! optionally disperse or mask it ([`exponent`]), expand at a lifting degree
//! into a sparse parity-check matrix ([`lifting`]), then analyze girth and
//! cycle spectra ([`cycles`]), minimum distance ([`distance`]) and decoding
//! performance ([`sim`]). [`tables`] rebuilds the reference result tables.

pub mod catalog;
pub mod cycles;
pub mod distance;
pub mod error;
pub mod exponent;
pub mod family;
pub mod lifting;
pub mod report;
pub mod sim;
pub mod tables;

pub use error::{Error, Result};
