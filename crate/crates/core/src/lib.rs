//! Four-dimensional algebraic curvature operators.
//!
//! The crate covers the wedge-basis algebra of ∧²ℝ⁴ (brackets, `#`-products,
//! `Q(R) = R² + R#`), the self-dual/anti-self-dual block decomposition, the
//! two-parameter curvature cone `𝔠_{η,μ}` together with its lower-bound
//! functional `l`, the reaction ODE `dR/dt = 2Q(R)`, seeded samplers, the
//! cutoff profiles used in barrier arguments and a suite runner that checks
//! all of the algebraic identities numerically.

pub mod cone;
pub mod cutoff;
pub mod decomposition;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod sampling;
pub mod verify;
pub mod wedge;

pub use cone::{ConeParams, FrameOctet};
pub use decomposition::BlockData;
pub use error::{Error, Result};
pub use wedge::{CurvatureOperator, SymmetricTwoTensor, TwoForm};
