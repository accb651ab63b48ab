//! Dynamics of affine composition operators `C_φ f = f ∘ φ` on the Hardy
//! space `H²(C₊)` of the right half-plane, `φ(w) = aw + b`.

// `!(x > 0.0)` is deliberate: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod eigen;
pub mod error;
pub mod kernel;
pub mod laguerre;
pub mod quadrature;
pub mod symbol;
pub mod verdicts;
pub mod witness;

pub use error::{Error, Result};
pub use kernel::{KernelElement, KernelTerm};
pub use symbol::{AffineSymbol, FixedPoints, SymbolClass};
pub use verdicts::{report, DynamicsReport, SpectrumDescriptor, Verdict, VerdictValue};
