//! Shape statistics for contiguous rainfall regions observed in gridded
//! satellite precipitation snapshots.
//!
//! The pipeline runs in stages, each of which is usable on its own:
//!
//! 1. [`ingest`] reads per-pass grids of rain-rate cells from delimited text.
//! 2. [`regions`] extracts 8-connected positive-rain regions and flags the
//!    ones clipped by the swath edge.
//! 3. [`geometry`] projects each region onto a local planar chart and traces
//!    its outer boundary polygon.
//! 4. [`starhull`] reduces a boundary polygon to a radial function on a fixed
//!    angular grid, together with the error this reduction incurs.
//! 5. [`normalize`] pools radial distances across regions and maps them
//!    through an empirical-quantile Gaussian transform.
//! 6. [`survival`] turns region areas with censoring flags into
//!    product-limit weights.
//! 7. [`fpca`] fits a weighted functional principal component decomposition
//!    of the transformed radial functions.
//! 8. [`fourier`] fits truncated Fourier series per region and summarizes
//!    second-harmonic axiality across regions.
//! 9. [`analysis`] measures reconstruction error in the original units.
//! 10. [`synth`] generates synthetic snapshots with known ground truth.

pub mod analysis;
pub mod error;
pub mod fourier;
pub mod fpca;
pub mod geometry;
pub mod ingest;
pub mod io;
pub mod normalize;
pub mod regions;
pub mod starhull;
pub mod survival;
pub mod synth;

pub use error::{Error, Result};
