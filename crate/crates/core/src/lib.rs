//! Numerical laboratory for random Bernoulli selector sequences and the
//! weak-type (1,1) machinery behind subsequence ergodic averages along them.

// `!(x > 0.0)` is how validation rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod czlab;
pub mod dynsys;
pub mod error;
pub mod kernel;
pub mod maximal;
pub mod probab;
pub mod rng;
pub mod selector;
pub mod stats;

pub use error::{Error, Result};
pub use kernel::{IntegerSignal, KernelTriple};
pub use selector::{SelectorConfig, SelectorSequence, TauProfile};
