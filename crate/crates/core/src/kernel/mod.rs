//! Finitely supported signals on Z, their convolution algebra, and the
//! dyadic kernel triples built from a selector sequence.

mod convolve;
mod signal;
mod triple;

pub use convolve::{
    autocorrelate, autocorrelate_with, convolve, convolve_direct, convolve_fft, convolve_with,
    ConvolveOptions, DEFAULT_FAST_THRESHOLD,
};
pub use signal::IntegerSignal;
pub use triple::{build_triple, build_triples, default_scales, KernelTriple};
