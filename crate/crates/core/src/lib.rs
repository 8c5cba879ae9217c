//! Discrete spectral machinery on (p+1)-regular trees and their finite quotients.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`chebwave`]: Chebyshev polynomials of both kinds and the discrete wave
//!   propagator `(Φ, Ψ) ↦ (½TΦ − (1 − T²/4)Ψ, ½TΨ + Φ)`.
//! - [`treekernel`]: radial kernels on the tree, the explicit propagation
//!   values of `P_n[½T]δ₀`, and the spherical transform.
//! - [`synth`]: Fejér-based synthesis of the flattening kernel `K_N` together
//!   with a certificate of its support, decay, spectral floor and target value.
//! - [`graph`]: finite regular graphs, girth, non-backtracking sphere operators
//!   and kernel application.
//! - [`eigen`]: dense and Lanczos symmetric eigensolvers.
//! - [`deloc`]: the two-sided correlation estimate recast as a mass
//!   concentration obstruction for graph eigenvectors.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod chebwave;
pub mod deloc;
pub mod eigen;
pub mod graph;
pub mod operator;
pub mod synth;
pub mod tree;
pub mod treekernel;

pub use chebwave::{cheb_eval_first, cheb_eval_second, wave_closed_form, wave_step, WaveState};
pub use deloc::{MassSet, ObstructionReport};
pub use eigen::{EigenPair, EigenSelection};
pub use error::Error;
pub use graph::{Kernel, RegularGraph};
pub use operator::{Adjacency, Operator};
pub use synth::{KernelCertificate, SynthesisConfig, SynthesisParams};
pub use tree::TreeBall;
pub use treekernel::{ChebyKernel, RadialKernel, SpectralPoint};

pub type Result<T, E = Error> = core::result::Result<T, E>;
