//! Exact-arithmetic engine for the destabilizing invariant `eta(S)` of the
//! basic semi test configuration attached to a plane `S` inside a Fano
//! manifold, together with the Donaldson-Futaki value it scales to.
//!
//! The crate is layered bottom-up:
//!
//! - [`exactmath`]: rationals and dense univariate polynomials with exact calculus.
//! - [`intersection`]: Segre classes of the normal bundle and the top
//!   intersection numbers on the exceptional divisor and the blowup.
//! - [`models`]: the ample model sequence (piecewise restriction and volume
//!   polynomials) from presets or JSON configuration.
//! - [`invariants`]: `eta`, its volume-formula cross-check, the closed form,
//!   Donaldson-Futaki scaling and the stability verdict.
//! - [`verify`]: the self-check suite run by `kstab verify`.

pub mod exactmath;
pub mod intersection;
pub mod invariants;
pub mod models;
pub mod verify;

pub use exactmath::{Polynomial, Rational};
pub use intersection::{NormalBundleData, SegreData};
pub use invariants::{EtaReport, StabilityVerdict};
pub use models::{AmpleModelSequence, ModelPiece, SequenceConfig};
