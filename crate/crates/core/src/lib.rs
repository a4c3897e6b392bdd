#![no_std]
// Input checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// `num_traits::Float` supplies the float methods when nothing links std; the
// imports are allowed to go unused in builds that do.
#[cfg(test)]
extern crate std;
extern crate alloc;

pub mod analysis;
pub mod completeness;
pub mod dispersion;
pub mod error;
pub mod modefinder;
pub mod spectrum;
pub mod transfer;

pub use dispersion::{FrequencyScale, Material};
pub use error::{Error, Result};
pub use modefinder::{find_modes, Method, Mode, ModeSet, Rect, SearchRegion};
pub use num_complex::Complex64;
pub use spectrum::{spectrum, Spectrum};
pub use transfer::{Layer, Polarization, Stack};
