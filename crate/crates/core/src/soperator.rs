//! The lifting operator `Sg(m, s) = q^{-1} Σ_{t≠0} χ(t·s) g(t·m)` from
//! `F_q^d` to `F_q^{d+1}`, and functions that are constant on punctured lines.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{power, Budget};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::grid::{ambient_size, decode_into, encode, fourier_transform, lp_sum, GridFunction};
use crate::tol;

/// Partition of `F_q^d \ {0}` into punctured lines `{λm : λ ≠ 0}`.
///
/// Each line is represented by its lexicographically smallest point, which is
/// the one whose first nonzero coordinate is 1. Lines are numbered in
/// increasing order of the representative's index.
#[derive(Debug)]
pub struct LineOrbits {
    field: Field,
    d: usize,
    reps: Vec<usize>,
    /// Line number of each point; `u32::MAX` at the origin.
    line_of: Vec<u32>,
}

impl LineOrbits {
    pub fn new(field: &Field, d: usize, budget: &Budget) -> Result<Arc<Self>> {
        let q = field.q();
        let size = ambient_size(q, d, budget)?;
        let canonical = |i: usize, c: &mut [Scalar]| -> usize {
            decode_into(i, q, c);
            let lead = c.iter().copied().find(|&x| x != 0).unwrap_or(0);
            if lead <= 1 {
                return i;
            }
            let s = field.inv(lead);
            for x in c.iter_mut() {
                *x = field.mul(*x, s);
            }
            encode(c, q)
        };
        let reps: Vec<usize> = (1..size)
            .into_par_iter()
            .with_min_len(4096)
            .filter(|&i| {
                let mut c = vec![0; d];
                canonical(i, &mut c) == i
            })
            .collect();
        let line_of = (0..size)
            .into_par_iter()
            .with_min_len(4096)
            .map_init(
                || vec![0; d],
                |c, i| {
                    if i == 0 {
                        return u32::MAX;
                    }
                    let r = canonical(i, c);
                    reps.binary_search(&r).expect("every line has a representative") as u32
                },
            )
            .collect();
        Ok(Arc::new(LineOrbits {
            field: field.clone(),
            d,
            reps,
            line_of,
        }))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `(q^d - 1)/(q - 1)`.
    pub fn count(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[usize] {
        &self.reps
    }

    /// Line number of the point with this index, `None` at the origin.
    pub fn line_of(&self, index: usize) -> Option<usize> {
        match self.line_of[index] {
            u32::MAX => None,
            l => Some(l as usize),
        }
    }

    pub fn ambient_len(&self) -> usize {
        self.line_of.len()
    }
}

/// `g` with `g(λm) = g(m)` for every `λ ≠ 0`; `g(0)` is unconstrained.
#[derive(Debug, Clone)]
pub struct HomogeneousFunction {
    orbits: Arc<LineOrbits>,
    pub line_values: Vec<Complex64>,
    pub value_at_zero: Complex64,
}

impl HomogeneousFunction {
    pub fn new(orbits: Arc<LineOrbits>, line_values: Vec<Complex64>, value_at_zero: Complex64) -> Result<Self> {
        if line_values.len() != orbits.count() {
            return Err(Error::DimensionMismatch {
                expected: orbits.count(),
                found: line_values.len(),
            });
        }
        Ok(HomogeneousFunction {
            orbits,
            line_values,
            value_at_zero,
        })
    }

    pub fn zeros(orbits: Arc<LineOrbits>) -> Self {
        let n = orbits.count();
        HomogeneousFunction {
            orbits,
            line_values: vec![Complex64::new(0.0, 0.0); n],
            value_at_zero: Complex64::new(0.0, 0.0),
        }
    }

    pub fn orbits(&self) -> &Arc<LineOrbits> {
        &self.orbits
    }

    pub fn field(&self) -> &Field {
        &self.orbits.field
    }

    pub fn d(&self) -> usize {
        self.orbits.d
    }

    pub fn value(&self, index: usize) -> Complex64 {
        match self.orbits.line_of(index) {
            Some(l) => self.line_values[l],
            None => self.value_at_zero,
        }
    }

    pub fn to_grid(&self) -> GridFunction {
        let values = (0..self.orbits.ambient_len()).map(|i| self.value(i)).collect();
        GridFunction::new(self.field(), self.d(), values).expect("orbit table matches the grid")
    }

    /// Reads off line values, failing with the first index where `g` is not
    /// constant along its line.
    pub fn from_grid(g: &GridFunction, orbits: Arc<LineOrbits>) -> Result<Self> {
        if g.dim() != orbits.d || g.field() != orbits.field() {
            return Err(Error::DimensionMismatch {
                expected: orbits.d,
                found: g.dim(),
            });
        }
        let vals = g.values();
        let scale = vals.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let line_values: Vec<Complex64> = orbits.reps.iter().map(|&r| vals[r]).collect();
        for (i, v) in vals.iter().enumerate().skip(1) {
            let l = orbits.line_of(i).expect("nonzero index");
            if (v - line_values[l]).norm() > tol::S_HOMOGENEOUS * scale {
                return Err(Error::NotHomogeneous(i));
            }
        }
        Ok(HomogeneousFunction {
            orbits,
            line_values,
            value_at_zero: vals[0],
        })
    }

    /// `Σ_m |g(m)|^p` over `F_q^d`.
    pub fn lp_sum(&self, p: f64) -> f64 {
        let per_line = (self.field().q() - 1) as f64;
        per_line * lp_sum(&self.line_values, p) + lp_sum(&[self.value_at_zero], p)
    }
}

/// `Sg` on `F_q^{d+1}`, evaluated directly from the defining sum.
pub fn s_apply(g: &GridFunction) -> Result<GridFunction> {
    let field = g.field();
    let q = field.q();
    let d = g.dim();
    ambient_size(q, d + 1, &Budget::unlimited())?;
    let vals = g.values();
    let chi = field.chi_table();
    let inv_q = 1.0 / q as f64;
    let per_m: Vec<Vec<Complex64>> = (0..vals.len())
        .into_par_iter()
        .with_min_len(1024)
        .map(|i| {
            let mut m = vec![0; d];
            decode_into(i, q, &mut m);
            let mut tm = vec![0; d];
            // g(t·m) for t = 1..q-1
            let scaled: Vec<Complex64> = (1..q)
                .map(|_| {
                    for (a, &b) in tm.iter_mut().zip(&m) {
                        *a = field.add(*a, b);
                    }
                    vals[encode(&tm, q)]
                })
                .collect();
            (0..q)
                .map(|s| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (t, gv) in (1..q).zip(&scaled) {
                        acc += chi[field.mul(t, s) as usize] * gv;
                    }
                    acc * inv_q
                })
                .collect()
        })
        .collect();
    let slab = vals.len();
    let mut out = vec![Complex64::new(0.0, 0.0); slab * q as usize];
    for (i, col) in per_m.iter().enumerate() {
        for (s, v) in col.iter().enumerate() {
            out[i + s * slab] = *v;
        }
    }
    GridFunction::new(field, d + 1, out)
}

/// `Sg(m, s) = g(m)·(q·δ₀(s) − 1)/q` for homogeneous `g`.
pub fn s_apply_homogeneous(g: &HomogeneousFunction) -> GridFunction {
    let q = g.field().q();
    let base = g.to_grid();
    let slab = base.len();
    let on_zero = (q - 1) as f64 / q as f64;
    let off_zero = -1.0 / q as f64;
    let mut out = Vec::with_capacity(slab * q as usize);
    for s in 0..q {
        let c = if s == 0 { on_zero } else { off_zero };
        out.extend(base.values().iter().map(|v| v * c));
    }
    GridFunction::new(g.field(), g.d() + 1, out).expect("length is q^{d+1}")
}

#[derive(Debug, Clone, Serialize)]
pub struct SHatReport {
    pub max_err: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares the transform of `Sg` with `ĝ(x/s)` for `s ≠ 0` and with `0` on
/// the slab `s = 0`.
pub fn s_hat_check(g: &GridFunction) -> Result<SHatReport> {
    let field = g.field();
    let q = field.q();
    let d = g.dim();
    let lifted = fourier_transform(&s_apply(g)?);
    let g_hat = fourier_transform(g);
    let slab = g.len();
    let mut x = vec![0; d];
    let mut max_err: f64 = 0.0;
    for (idx, v) in lifted.values().iter().enumerate() {
        let s = (idx / slab) as Scalar;
        let want = if s == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            decode_into(idx % slab, q, &mut x);
            let si = field.inv(s);
            for c in x.iter_mut() {
                *c = field.mul(*c, si);
            }
            g_hat.values()[encode(&x, q)]
        };
        max_err = max_err.max((v - want).norm());
    }
    let tol = tol::S_HAT * power(q, d) as f64;
    Ok(SHatReport {
        max_err,
        tol,
        pass: max_err <= tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SLpReport {
    /// `‖Sg‖_p^p` over `F_q^{d+1}`.
    pub lhs: f64,
    /// `[(q−1)/q^p + ((q−1)/q)^p]·‖g‖_p^p`.
    pub rhs: f64,
    /// `lhs / ‖g‖_p^p`; absent when `g = 0`.
    pub ratio: Option<f64>,
    pub factor: f64,
    pub pass: bool,
}

/// The bracketed factor `(q−1)/q^p + ((q−1)/q)^p`.
pub fn s_lp_factor(q: u64, p: f64) -> f64 {
    let q = q as f64;
    (q - 1.0) / q.powf(p) + ((q - 1.0) / q).powf(p)
}

/// Exact `ℓ^p` identity for `S` on homogeneous functions. The left side is
/// computed from the general operator on the induced grid.
pub fn s_lp_identity(g: &HomogeneousFunction, p: f64) -> Result<SLpReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(format!("p = {p}, need 1 <= p < inf")));
    }
    let sg = s_apply(&g.to_grid())?;
    let lhs = lp_sum(sg.values(), p);
    let norm = g.lp_sum(p);
    let factor = s_lp_factor(g.field().q(), p);
    let rhs = factor * norm;
    Ok(SLpReport {
        lhs,
        rhs,
        ratio: (norm > 0.0).then(|| lhs / norm),
        factor,
        pass: tol::rel_diff(lhs, rhs) <= tol::S_LP_REL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_grid(field: &Field, d: usize, rng: &mut ChaCha8Rng) -> GridFunction {
        GridFunction::from_fn(field, d, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_hom(orbits: &Arc<LineOrbits>, rng: &mut ChaCha8Rng) -> HomogeneousFunction {
        let vals = (0..orbits.count())
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        HomogeneousFunction::new(orbits.clone(), vals, Complex64::new(rng.gen_range(-2.0..2.0), 0.5)).unwrap()
    }

    #[test]
    fn orbit_table_counts_and_reps() {
        for (q, d) in [(3u64, 1usize), (3, 2), (5, 3), (7, 2)] {
            let field = f(q);
            let o = LineOrbits::new(&field, d, &Budget::default()).unwrap();
            assert_eq!(o.count() as u128, (power(q, d) - 1) / (q as u128 - 1));
            let mut sizes = vec![0; o.count()];
            for i in 1..o.ambient_len() {
                sizes[o.line_of(i).unwrap()] += 1;
            }
            assert!(sizes.iter().all(|&s| s == q - 1));
            let mut x = vec![0; d];
            for &r in o.representatives() {
                decode_into(r, q, &mut x);
                assert_eq!(x.iter().find(|&&v| v != 0), Some(&1));
            }
        }
    }

    #[test]
    fn s_apply_examples() {
        let field = f(3);
        let ones = GridFunction::constant(&field, 2, c(1.0));
        let sg = s_apply(&ones).unwrap();
        for (i, v) in sg.values().iter().enumerate() {
            let want = if i / 9 == 0 { 2.0 / 3.0 } else { -1.0 / 3.0 };
            assert!((v - c(want)).norm() < 1e-12);
        }

        let delta1 = GridFunction::delta(&field, 1, 1);
        let sg = s_apply(&delta1).unwrap();
        let v = sg.at(&[2, 1]);
        assert!((v - field.chi(2) / 3.0).norm() < 1e-12);

        let zero = GridFunction::zeros(&field, 2);
        assert!(s_apply(&zero).unwrap().is_zero());
    }

    #[test]
    fn s_apply_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let field = f(5);
        for _ in 0..5 {
            let g = random_grid(&field, 2, &mut rng);
            let h = random_grid(&field, 2, &mut rng);
            let a = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let b = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let lhs = s_apply(&g.combine(a, &h, b).unwrap()).unwrap();
            let rhs = s_apply(&g).unwrap().combine(a, &s_apply(&h).unwrap(), b).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }
    }

    #[test]
    fn s_hat_examples() {
        let field = f(3);
        let r = s_hat_check(&GridFunction::delta(&field, 2, 0)).unwrap();
        assert!(r.pass, "{r:?}");
        let r = s_hat_check(&GridFunction::constant(&field, 2, c(1.0))).unwrap();
        assert!(r.pass, "{r:?}");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (q, d) in [(3u64, 2usize), (5, 2), (7, 1), (3, 3)] {
            let g = random_grid(&f(q), d, &mut rng);
            let r = s_hat_check(&g).unwrap();
            assert!(r.pass, "q={q} d={d}: {r:?}");
        }
    }

    #[test]
    fn s_hat_has_dilation_structure() {
        // Independent of the closed form: for s ≠ 0 the transform only sees x/s.
        let field = f(5);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = random_grid(&field, 2, &mut rng);
        let hat = fourier_transform(&s_apply(&g).unwrap());
        for x0 in 0..5u64 {
            for x1 in 0..5u64 {
                let base = hat.at(&[x0, x1, 1]);
                for l in 2..5u64 {
                    let v = hat.at(&[field.mul(l, x0), field.mul(l, x1), l]);
                    assert!((v - base).norm() < 1e-9);
                }
                assert!(hat.at(&[x0, x1, 0]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn homogeneous_shortcut_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (q, d) in [(3u64, 2usize), (5, 2), (3, 3), (7, 2)] {
            let field = f(q);
            let o = LineOrbits::new(&field, d, &Budget::default()).unwrap();
            let g = random_hom(&o, &mut rng);
            let fast = s_apply_homogeneous(&g);
            let slow = s_apply(&g.to_grid()).unwrap();
            assert!(fast.max_abs_diff(&slow) < 1e-10);
            // Branch values at a sample point.
            let m = o.representatives()[0];
            let gm = g.value(m);
            let slab = g.to_grid().len();
            assert!((fast.values()[m] - gm * ((q - 1) as f64 / q as f64)).norm() < 1e-12);
            assert!((fast.values()[m + slab] + gm / q as f64).norm() < 1e-12);
        }
        let field = f(3);
        let o = LineOrbits::new(&field, 2, &Budget::default()).unwrap();
        let ones = HomogeneousFunction::new(o.clone(), vec![c(1.0); o.count()], c(1.0)).unwrap();
        let fast = s_apply_homogeneous(&ones);
        let slow = s_apply(&GridFunction::constant(&field, 2, c(1.0))).unwrap();
        assert!(fast.max_abs_diff(&slow) < 1e-12);
    }

    #[test]
    fn from_grid_round_trip_and_rejection() {
        let field = f(5);
        let o = LineOrbits::new(&field, 2, &Budget::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_hom(&o, &mut rng);
        let back = HomogeneousFunction::from_grid(&g.to_grid(), o.clone()).unwrap();
        assert_eq!(back.line_values, g.line_values);
        assert_eq!(back.value_at_zero, g.value_at_zero);
        let mut bad = g.to_grid();
        bad.values_mut()[7] += c(0.1);
        assert!(matches!(
            HomogeneousFunction::from_grid(&bad, o),
            Err(Error::NotHomogeneous(_))
        ));
    }

    #[test]
    fn lp_identity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let field = f(3);
        let o = LineOrbits::new(&field, 2, &Budget::default()).unwrap();
        let g = random_hom(&o, &mut rng);
        let r = s_lp_identity(&g, 2.0).unwrap();
        assert!(r.pass);
        assert_abs_diff_eq!(r.ratio.unwrap(), 2.0 / 3.0, epsilon = 1e-10);

        let r = s_lp_identity(&HomogeneousFunction::zeros(o), 2.0).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, None));
        assert!(r.pass);

        let field = f(5);
        let o = LineOrbits::new(&field, 2, &Budget::default()).unwrap();
        let g = random_hom(&o, &mut rng);
        let r = s_lp_identity(&g, 1.0).unwrap();
        assert!(r.pass);
        assert_abs_diff_eq!(r.ratio.unwrap(), 8.0 / 5.0, epsilon = 1e-10);
        assert!(s_lp_identity(&g, 0.5).is_err());
    }

    #[test]
    fn lp_identity_many_exponents() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (q, d) in [(3u64, 3usize), (5, 2), (7, 2), (11, 2)] {
            let o = LineOrbits::new(&f(q), d, &Budget::default()).unwrap();
            for p in [1.0, 1.25, 1.5, 2.0, 3.7] {
                let g = random_hom(&o, &mut rng);
                let r = s_lp_identity(&g, p).unwrap();
                assert!(r.pass, "q={q} d={d} p={p}: {r:?}");
                assert!(r.lhs <= 2.0 * g.lp_sum(p));
            }
        }
    }
}
