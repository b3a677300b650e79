//! Tolerances shared by the identity checks.
//!
//! Absolute tolerances scale with the number of summed terms; relative
//! ones are taken against the larger side of the identity.

/// Per-summand absolute tolerance for character sums.
pub const PER_TERM: f64 = 1e-9;

/// Character orthogonality, per summand.
pub const ORTHOGONALITY: f64 = 1e-12;

/// Plancherel, relative.
pub const PLANCHEREL_REL: f64 = 1e-8;

/// Forward/inverse round trip, per entry.
pub const ROUND_TRIP: f64 = 1e-9;

/// Closed form vs. brute-force transform of `1_H`, in units of `q^{(d+1)/2}`.
pub const HOM_FOURIER: f64 = 1e-6;

/// Transform of `Sg` vs. its closed form, in units of `q^d`.
pub const S_HAT: f64 = 1e-8;

/// Exact agreement between the two S-operator evaluation paths.
pub const S_HOMOGENEOUS: f64 = 1e-10;

/// The ℓ^p identity for `Sg`, relative.
pub const S_LP_REL: f64 = 1e-9;

/// Sphere/variety norm transfer, relative.
pub const TRANSFER_REL: f64 = 1e-8;

/// The two Ω algorithms, relative.
pub const OMEGA_REL: f64 = 1e-7;

/// Slack on the Ω bound.
pub const OMEGA_BOUND_REL: f64 = 1e-9;

/// Normalization of `Σ F^p = 1`.
pub const DYADIC_NORMALIZED: f64 = 1e-9;

/// Affine-extremizer ratio, closed vs. computed, relative.
pub const EXTREMIZER_REL: f64 = 1e-8;

/// Power iteration vs. closed operator norm, relative.
pub const OPERATOR_NORM_REL: f64 = 1e-6;

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
