//! Low-coherence unit-norm frames: construction, coherence measurement,
//! lower bounds, flipping equivalence, and one-step thresholding recovery.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod constructions;
pub mod equivalence;
pub mod error;
pub mod experiment;
pub mod fmt;
pub mod frame;
pub mod gf2m;
pub mod io;
mod kernels;
pub mod linalg;
pub mod ost;
pub mod rng;
pub mod scalar;
pub mod stats;

pub use error::{FrameError, Result};
pub use frame::{
    average_coherence, gram, spectral_norm, worst_case_coherence, CoherenceReport, Frame,
    FrameData, Gram, ScalarField,
};
