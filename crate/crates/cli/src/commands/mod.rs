pub mod common;
pub mod extract;
pub mod fourier;
pub mod fpca;
pub mod report;
pub mod synth;
