//! Affine subspaces inside spheres.
//!
//! `v + W` lies in `S_j^{d-1}` iff `‖v‖ = j`, `W ⊥ v` and `W` is totally
//! singular for `Q(x) = Σ x_i²`. The constructor picks `v` on the sphere and
//! grows `W` inside `v^⊥` by repeatedly splitting off hyperbolic planes, so
//! its dimension is the Witt index of `v^⊥`.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::{nullspace, rank, span_basis};
use super::{variety_points, VarietySpec};
use crate::budget::{power, Budget};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::grid::encode;

/// Cap on the number of candidate direction spans the brute-force
/// maximality oracle may enumerate.
pub const MAX_DIRECTION_SETS: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSubspace {
    field: Field,
    pub base: Vec<Scalar>,
    pub directions: Vec<Vec<Scalar>>,
}

impl AffineSubspace {
    pub fn new(field: &Field, base: Vec<Scalar>, directions: Vec<Vec<Scalar>>) -> Result<Self> {
        let d = base.len();
        if directions.iter().any(|v| v.len() != d) {
            return Err(Error::InvalidDimension("direction length differs from base".into()));
        }
        if rank(field, &directions) != directions.len() {
            return Err(Error::InvalidDimension("directions are linearly dependent".into()));
        }
        Ok(AffineSubspace {
            field: field.clone(),
            base,
            directions,
        })
    }

    pub fn point(field: &Field, base: Vec<Scalar>) -> Self {
        AffineSubspace {
            field: field.clone(),
            base,
            directions: Vec::new(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.directions.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn size(&self) -> u128 {
        power(self.field.q(), self.k())
    }

    /// All `q^k` points `base + Σ c_i dir_i`.
    pub fn points(&self) -> Vec<Vec<Scalar>> {
        let f = &self.field;
        let q = f.q();
        let k = self.k();
        (0..power(q, k) as usize)
            .map(|mut idx| {
                let mut p = self.base.clone();
                for dir in &self.directions {
                    let c = (idx % q as usize) as Scalar;
                    idx /= q as usize;
                    for (pi, &di) in p.iter_mut().zip(dir) {
                        *pi = f.add(*pi, f.mul(c, di));
                    }
                }
                p
            })
            .collect()
    }

    pub fn point_indices(&self) -> Vec<usize> {
        let q = self.field.q();
        let mut idx: Vec<usize> = self.points().iter().map(|p| encode(p, q)).collect();
        idx.sort_unstable();
        idx
    }

    /// Pointwise membership certificate against `S_j^{d-1}`.
    pub fn certify_in_sphere(&self, j: Scalar) -> Result<()> {
        let j = j % self.field.q();
        match self.points().into_iter().find(|p| self.field.norm(p) != j) {
            Some(p) => Err(Error::NotContained(p)),
            None => Ok(()),
        }
    }

    /// The flat spanned by the first `k` directions.
    pub fn truncated(&self, k: usize) -> AffineSubspace {
        AffineSubspace {
            field: self.field.clone(),
            base: self.base.clone(),
            directions: self.directions[..k.min(self.k())].to_vec(),
        }
    }

    /// The same flat placed in the slice `x_{d+1} = 1` of `F_q^{d+1}`.
    pub fn lift(&self) -> AffineSubspace {
        let mut base = self.base.clone();
        base.push(1);
        let directions = self
            .directions
            .iter()
            .map(|v| {
                let mut w = v.clone();
                w.push(0);
                w
            })
            .collect();
        AffineSubspace {
            field: self.field.clone(),
            base,
            directions,
        }
    }
}

/// Largest `k` with a `k`-flat inside `S_j^{d-1}`, by case.
pub fn affine_dimension(field: &Field, d: usize, j: Scalar) -> usize {
    field.case_tag(d, j).sphere_flat_dim(d)
}

fn combo(field: &Field, basis: &[Vec<Scalar>], coeffs: &[Scalar]) -> Vec<Scalar> {
    let n = basis[0].len();
    let mut v = vec![0; n];
    for (b, &c) in basis.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for (vi, &bi) in v.iter_mut().zip(b) {
            *vi = field.add(*vi, field.mul(c, bi));
        }
    }
    v
}

/// A nonzero `Q`-isotropic vector in `span(basis)`, if one exists.
fn find_isotropic(field: &Field, basis: &[Vec<Scalar>], rng: &mut ChaCha8Rng) -> Option<Vec<Scalar>> {
    let n = basis.len();
    if n < 2 {
        return None;
    }
    let q = field.q();
    for _ in 0..64 * q {
        let coeffs: Vec<Scalar> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        let v = combo(field, basis, &coeffs);
        if field.norm(&v) == 0 {
            return Some(v);
        }
    }
    // Any ternary form has a nontrivial zero, so three basis vectors suffice.
    let m = n.min(3);
    (1..power(q, m) as usize).find_map(|mut idx| {
        let coeffs: Vec<Scalar> = (0..m)
            .map(|_| {
                let c = (idx % q as usize) as Scalar;
                idx /= q as usize;
                c
            })
            .collect();
        let v = combo(field, &basis[..m], &coeffs);
        (field.norm(&v) == 0).then_some(v)
    })
}

/// Maximal totally singular subspace of the nondegenerate space
/// `span(basis)`, via hyperbolic splitting.
fn totally_singular(
    field: &Field,
    mut basis: Vec<Vec<Scalar>>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<Scalar>>> {
    let half = field.inv(2);
    let mut singular = Vec::new();
    while let Some(u) = find_isotropic(field, &basis, rng) {
        let w = basis
            .iter()
            .find(|b| field.dot(&u, b) != 0)
            .ok_or_else(|| Error::SearchFailed("degenerate quadratic space".into()))?;
        // Rescale so B(u, w) = 1, then shift w to be isotropic.
        let s = field.inv(field.dot(&u, w));
        let w: Vec<Scalar> = w.iter().map(|&x| field.mul(x, s)).collect();
        let c = field.mul(field.norm(&w), half);
        let w: Vec<Scalar> = w
            .iter()
            .zip(&u)
            .map(|(&wi, &ui)| field.sub(wi, field.mul(c, ui)))
            .collect();
        let projected: Vec<Vec<Scalar>> = basis
            .iter()
            .map(|y| {
                let a = field.dot(y, &w);
                let b = field.dot(y, &u);
                y.iter()
                    .zip(u.iter().zip(&w))
                    .map(|(&yi, (&ui, &wi))| field.sub(field.sub(yi, field.mul(a, ui)), field.mul(b, wi)))
                    .collect()
            })
            .collect();
        basis = span_basis(field, &projected);
        singular.push(u);
    }
    Ok(singular)
}

/// Seeded construction of a maximal affine subspace inside `S_j^{d-1}`.
pub fn build_affine_in_sphere(field: &Field, d: usize, j: Scalar, seed: u64) -> Result<AffineSubspace> {
    let q = field.q();
    let j = j % q;
    if j == 0 {
        return Err(Error::ZeroArgument("j"));
    }
    if d < 2 {
        return Err(Error::InvalidDimension(format!("d = {d}, need d >= 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut base = None;
    for _ in 0..64 * q {
        let v: Vec<Scalar> = (0..d).map(|_| rng.gen_range(0..q)).collect();
        if field.norm(&v) == j {
            base = Some(v);
            break;
        }
    }
    if base.is_none() {
        // The circle x² + y² = j is never empty, so two coordinates suffice.
        base = (0..q * q).find_map(|t| {
            let mut v = vec![0; d];
            v[0] = t % q;
            v[1] = t / q;
            (field.norm(&v) == j).then_some(v)
        });
    }
    let base = base.ok_or_else(|| Error::SearchFailed(format!("no point on S_{j} in F_{q}^{d}")))?;
    let perp = nullspace(field, std::slice::from_ref(&base), d);
    let directions = totally_singular(field, perp, &mut rng)?;
    let flat = AffineSubspace::new(field, base, directions)?;
    flat.certify_in_sphere(j)?;
    Ok(flat)
}

/// Number of `k`-dimensional linear subspaces of `F_q^n`.
pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.saturating_mul(q.saturating_pow((n - i) as u32).saturating_sub(1));
        den = den.saturating_mul(q.saturating_pow((i + 1) as u32) - 1);
    }
    if num == u128::MAX {
        return u128::MAX;
    }
    num / den
}

/// Calls `visit` with a basis (reduced row echelon form) of every
/// `k`-dimensional subspace of `F_q^n`, each exactly once. Stops early when
/// `visit` returns `true`; returns whether it did.
pub fn enumerate_subspaces(
    field: &Field,
    n: usize,
    k: usize,
    mut visit: impl FnMut(&[Vec<Scalar>]) -> bool,
) -> bool {
    let q = field.q();
    for pivots in (0..n).combinations(k) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| {
                let pivots = &pivots;
                (pc + 1..n).filter(move |c| !pivots.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let mut rows = vec![vec![0; n]; k];
        for (r, &pc) in pivots.iter().enumerate() {
            rows[r][pc] = 1;
        }
        for mut idx in 0..power(q, free.len()) as usize {
            for &(r, c) in &free {
                rows[r][c] = (idx % q as usize) as Scalar;
                idx /= q as usize;
            }
            if visit(&rows) {
                return true;
            }
        }
    }
    false
}

/// Largest `k ≤ k_max` such that some `k`-flat lies in `S_j^{d-1}`, by
/// exhaustive search over direction spans and base points.
pub fn bruteforce_max_affine(
    field: &Field,
    d: usize,
    j: Scalar,
    k_max: usize,
    budget: &Budget,
) -> Result<usize> {
    let spec = VarietySpec::sphere(field, d, j)?;
    let sphere = variety_points(&spec, budget)?;
    if sphere.is_empty() {
        return Err(Error::EmptyVariety(spec.to_string()));
    }
    let on_sphere = sphere.membership();
    let coords = sphere.coords();
    let q = field.q();
    let mut best = 0;
    for k in 1..=k_max.min(d) {
        let needed = gaussian_binomial(q, d, k);
        if needed > MAX_DIRECTION_SETS {
            return Err(Error::BudgetExceeded {
                what: format!("{k}-dimensional direction spans of F_{q}^{d}"),
                needed,
                cap: MAX_DIRECTION_SETS,
            });
        }
        let found = enumerate_subspaces(field, d, k, |dirs| {
            let span = AffineSubspace {
                field: field.clone(),
                base: vec![0; d],
                directions: dirs.to_vec(),
            }
            .points();
            coords.iter().any(|v| {
                span.iter().all(|w| {
                    let p: Vec<Scalar> = v.iter().zip(w).map(|(&a, &b)| field.add(a, b)).collect();
                    on_sphere[encode(&p, q)]
                })
            })
        });
        if !found {
            break;
        }
        best = k;
    }
    Ok(best)
}
