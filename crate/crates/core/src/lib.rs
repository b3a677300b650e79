//! Finite-field Fourier restriction toolkit over odd prime fields.

pub mod budget;
pub mod checks;
pub mod error;
pub mod exponent;
pub mod field;
pub mod grid;
pub mod restriction;
pub mod soperator;
pub mod tol;
pub mod varieties;

pub use budget::Budget;
pub use error::{Error, Result};
pub use exponent::{Exponent, Rational};
pub use field::{make_field, CaseTag, Field, Scalar};
pub use checks::{run_verify, CheckResult, JRule, VerifyConfig, VerifyOutcome};
pub use grid::{fourier_transform, inverse_fourier_transform, lp_norm, GridFunction, Measure, Point};
pub use restriction::{
    exponent_row, extremizer_ratio, necessary_threshold, restriction_ratio, sup_ratio_search, ExponentRow,
    SearchClass, SearchOptions, SweepCell,
};
pub use soperator::{s_apply, HomogeneousFunction, LineOrbits};
pub use varieties::{build_affine_in_sphere, variety_points, AffineSubspace, PointSet, VarietyKind, VarietySpec};
