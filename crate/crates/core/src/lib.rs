//! Exact arithmetic for superelliptic curves `y^N = ∏ (x - λ_i)^{A_i}` over
//! `F_p`: genus, bases of regular differentials on three models, and
//! Cartier–Manin matrices computed both from power expansions of `f` and
//! from truncated Appell–Lauricella series.

pub mod cartier;
pub mod curve;
pub mod differentials;
pub mod error;
pub mod exactmath;
pub mod hypergeometric;
pub mod mpoly;

pub use cartier::CartierManinMatrix;
pub use curve::{CaseTag, CurveSpec, PointIndex};
pub use differentials::{DifferentialForm, Model};
pub use error::{Error, Result};
pub use exactmath::{BigRat, FpElem, PrimeField};
pub use mpoly::{MPoly, XPoly};
