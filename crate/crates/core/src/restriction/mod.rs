//! Restriction norms `‖ĝ‖_{L^r(V)}` (normalized counting measure on `V`)
//! against `‖g‖_{ℓ^p}` (counting measure), and the objects used to probe
//! their ratio: the sphere/variety transfer, extremizers built from affine
//! subspaces, the exact `p = r = 2` operator norm, `Ω(E)` bounds and
//! exponent thresholds.

mod exponents;
mod omega;
mod search;

pub use exponents::{
    conjectured_exponent, exponent_row, necessary_threshold, printed_r2_threshold, stein_tomas,
    ExponentRow,
};
pub use omega::{
    dyadic_l2_ratio, omega, omega_bound_check, DyadicRatioReport, OmegaContext, OmegaReport,
    OmegaValue, PairMethod, Regime, PAIRWISE_CAP,
};
pub use search::{
    cell_seed, sup_ratio_search, SearchClass, SearchOptions, SweepCell, WORK_CAP,
};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::{power, Budget};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::field::{Field, Scalar};
use crate::grid::{
    fourier_transform, inverse_fourier_transform, lp_norm, lp_norm_on, lp_sum, GridFunction, Measure,
};
use crate::soperator::s_apply;
use crate::tol;
use crate::varieties::{variety_points, AffineSubspace, PointSet, VarietySpec};

/// A restriction problem `V`, `p → r`.
#[derive(Debug, Clone)]
pub struct RestrictionQuery {
    pub variety: VarietySpec,
    pub p: Exponent,
    pub r: Exponent,
}

impl RestrictionQuery {
    pub fn new(variety: VarietySpec, p: Exponent, r: Exponent) -> Self {
        RestrictionQuery { variety, p, r }
    }
}

fn check_dims(g: &GridFunction, variety: &PointSet) -> Result<()> {
    if g.dim() != variety.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: variety.ambient_dim(),
            found: g.dim(),
        });
    }
    if variety.is_empty() {
        return Err(Error::EmptyVariety(variety.spec.to_string()));
    }
    Ok(())
}

/// `‖ĝ‖_{L^r(V)}` with the normalized measure on `V`.
pub fn restriction_norm(g: &GridFunction, variety: &PointSet, r: f64) -> Result<f64> {
    check_dims(g, variety)?;
    lp_norm_on(&fourier_transform(g), &variety.points, r, Measure::Normalized)
}

/// `‖ĝ‖_{L^r(V)} / ‖g‖_{ℓ^p}`.
pub fn restriction_ratio(g: &GridFunction, variety: &PointSet, p: f64, r: f64) -> Result<f64> {
    check_dims(g, variety)?;
    if g.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let source = lp_norm(g.values(), p, Measure::Counting)?;
    Ok(restriction_norm(g, variety, r)? / source)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    /// `‖ĝ‖^r_{L^r(S)}·(q−1)·|S|`.
    pub lhs: f64,
    /// `‖Ŝg‖^r_{L^r(H)}·|H|`.
    pub rhs: f64,
    pub rel_err: f64,
    pub pass: bool,
}

/// Exact form of the sphere-to-variety norm transfer for `g` on `F_q^d`.
pub fn transfer_identity_check(g: &GridFunction, j: Scalar, r: f64, budget: &Budget) -> Result<TransferReport> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::InvalidExponent(format!("r = {r}, transfer needs 1 <= r < inf")));
    }
    let field = g.field();
    let sphere = variety_points(&VarietySpec::sphere(field, g.dim(), j)?, budget)?;
    let hom = variety_points(&VarietySpec::hom(field, g.dim(), j)?, budget)?;
    if sphere.is_empty() {
        return Err(Error::EmptyVariety(sphere.spec.to_string()));
    }
    let sphere_norm = restriction_norm(g, &sphere, r)?;
    let lifted_norm = restriction_norm(&s_apply(g)?, &hom, r)?;
    let lhs = sphere_norm.powf(r) * (field.q() - 1) as f64 * sphere.len() as f64;
    let rhs = lifted_norm.powf(r) * hom.len() as f64;
    let rel_err = tol::rel_diff(lhs, rhs);
    Ok(TransferReport {
        lhs,
        rhs,
        rel_err,
        pass: rel_err <= tol::TRANSFER_REL,
    })
}

/// `g(m) = q^{-d} Σ_{x∈H} χ(m·x)`, whose transform is exactly `1_H`.
pub fn extremizer_from_subspace(flat: &AffineSubspace) -> Result<GridFunction> {
    let indicator = GridFunction::indicator(flat.field(), flat.ambient_dim(), &flat.point_indices());
    Ok(inverse_fourier_transform(&indicator))
}

/// `(|H|/|S|)^{1/r} / (q^{k−d}·q^{(d−k)/p})` for a `k`-flat `H` in a sphere
/// `S` of size `sphere_size` in `F_q^d`.
pub fn extremizer_ratio_closed(q: u64, d: usize, k: usize, sphere_size: usize, p: f64, r: f64) -> f64 {
    let q = q as f64;
    let (d, k) = (d as f64, k as f64);
    let target = (q.powf(k) / sphere_size as f64).powf(1.0 / r);
    let source = q.powf(k - d) * q.powf((d - k) / p);
    target / source
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremizerReport {
    pub k: usize,
    pub sphere_size: usize,
    pub closed: f64,
    pub computed: f64,
    pub rel_err: f64,
    pub pass: bool,
}

/// The ratio of the subspace extremizer, by the closed formula and by
/// transforming the extremizer numerically.
pub fn extremizer_ratio(flat: &AffineSubspace, j: Scalar, p: f64, r: f64, budget: &Budget) -> Result<ExtremizerReport> {
    flat.certify_in_sphere(j)?;
    let field = flat.field();
    let sphere = variety_points(&VarietySpec::sphere(field, flat.ambient_dim(), j)?, budget)?;
    let g = extremizer_from_subspace(flat)?;
    let computed = restriction_ratio(&g, &sphere, p, r)?;
    let closed = extremizer_ratio_closed(field.q(), flat.ambient_dim(), flat.k(), sphere.len(), p, r);
    let rel_err = tol::rel_diff(closed, computed);
    Ok(ExtremizerReport {
        k: flat.k(),
        sphere_size: sphere.len(),
        closed,
        computed,
        rel_err,
        pass: rel_err <= tol::EXTREMIZER_REL,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorNormReport {
    pub power_iteration: f64,
    /// `(q^n/|V|)^{1/2}`.
    pub closed: f64,
    pub iterations: usize,
    pub rel_err: f64,
    pub pass: bool,
}

/// `sup ‖ĝ‖_{L²(V)}/‖g‖_{ℓ²}` by power iteration on `R*R`, where `R` maps
/// `g` to `ĝ|_V`, compared with the closed value.
pub fn operator_norm_p2(variety: &PointSet, seed: u64) -> Result<OperatorNormReport> {
    if variety.is_empty() {
        return Err(Error::EmptyVariety(variety.spec.to_string()));
    }
    let field: &Field = &variety.spec.field;
    let n = variety.ambient_dim();
    let size = power(field.q(), n) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = GridFunction::from_fn(field, n, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let mut lambda = 0.0;
    let mut iterations = 0;
    for it in 1..=200 {
        iterations = it;
        let g_norm = lp_sum(g.values(), 2.0);
        let hat = fourier_transform(&g);
        let mut on_v = GridFunction::zeros(field, n);
        for &i in &variety.points {
            on_v.values_mut()[i] = hat.values()[i];
        }
        let next_lambda = lp_sum(on_v.values(), 2.0) / g_norm;
        // R* h = Σ_{x∈V} h(x) χ(m·x) = q^n · (inverse transform of h).
        let back = inverse_fourier_transform(&on_v).scaled(Complex64::new(size, 0.0));
        let scale = lp_sum(back.values(), 2.0).sqrt();
        g = back.scaled(Complex64::new(1.0 / scale, 0.0));
        let done = (next_lambda - lambda).abs() <= 1e-14 * next_lambda;
        lambda = next_lambda;
        if done {
            break;
        }
    }
    let power_iteration = (lambda / variety.len() as f64).sqrt();
    let closed = (size / variety.len() as f64).sqrt();
    let rel_err = tol::rel_diff(power_iteration, closed);
    Ok(OperatorNormReport {
        power_iteration,
        closed,
        iterations,
        rel_err,
        pass: rel_err <= tol::OPERATOR_NORM_REL,
    })
}
