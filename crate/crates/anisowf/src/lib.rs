//! Anisotropic Gabor wave front sets of sampled signals.
//!
//! The crate estimates `WF_g^s(u)`, the set of phase-space directions along
//! whose curves `lambda -> (lambda x, lambda^s xi)` the short-time Fourier
//! transform of `u` fails to decay rapidly, and checks how these sets move
//! under the evolution `d_t u + i p(D) u = 0` for real polynomial symbols `p`.

pub mod error;
pub mod experiment;
pub mod fft;
pub mod format;
pub mod geometry;
pub mod propagator;
pub mod regression;
pub mod relation;
pub mod signal;
pub mod sphere;
pub mod stft;
pub mod symbols;
pub mod wavefront;

pub use error::{Error, Result};
pub use geometry::{lambda_s, project_s, Anisotropy, ConeKind, PhasePoint, SCone};
pub use propagator::{build_kernel, evolve, EvolutionProblem};
pub use relation::{compose, estimate_wf_kernel, graph_condition, tensor_bound_check, WfRelation};
pub use signal::{Grid, Signal};
pub use stft::{gaussian_window, istft, moyal_check, stft, StftField, Window};
pub use symbols::{FlowMap, PolySymbol};
pub use wavefront::{estimate_wf, DecayProfile, DirectionSet, ScanConfig};
