//! Spheres `S_j^{d-1} = {x ∈ F_q^d : ‖x‖ = j}` and `j`-homogeneous
//! varieties `H_j^d = {(x, s) ∈ F_q^{d+1} : ‖x‖ = j s²}`, with the exact
//! Fourier transform of `1_{H_j^d}` and affine subspaces inside spheres.

pub mod linalg;
mod subspace;

pub use subspace::{
    affine_dimension, bruteforce_max_affine, build_affine_in_sphere, enumerate_subspaces,
    gaussian_binomial, AffineSubspace, MAX_DIRECTION_SETS,
};

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{power, Budget};
use crate::error::{Error, Result};
use crate::field::{CaseTag, Field, Scalar};
use crate::grid::{ambient_size, decode_into};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VarietyKind {
    Sphere,
    HomVariety,
    /// `(H_j^d)^* = H_{1/j}^d`.
    DualHomVariety,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietySpec {
    pub kind: VarietyKind,
    pub field: Field,
    /// Dimension of the base space `F_q^d`.
    pub d: usize,
    pub j: Scalar,
}

impl VarietySpec {
    pub fn new(kind: VarietyKind, field: &Field, d: usize, j: Scalar) -> Result<Self> {
        let j = j % field.q();
        if j == 0 {
            return Err(Error::ZeroArgument("j"));
        }
        if d < 2 {
            return Err(Error::InvalidDimension(format!("d = {d}, need d >= 2")));
        }
        Ok(VarietySpec {
            kind,
            field: field.clone(),
            d,
            j,
        })
    }

    pub fn sphere(field: &Field, d: usize, j: Scalar) -> Result<Self> {
        Self::new(VarietyKind::Sphere, field, d, j)
    }

    pub fn hom(field: &Field, d: usize, j: Scalar) -> Result<Self> {
        Self::new(VarietyKind::HomVariety, field, d, j)
    }

    pub fn dual(field: &Field, d: usize, j: Scalar) -> Result<Self> {
        Self::new(VarietyKind::DualHomVariety, field, d, j)
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            VarietyKind::Sphere => self.d,
            _ => self.d + 1,
        }
    }

    /// The `j` in the defining equation; the dual variety uses `1/j`.
    pub fn effective_j(&self) -> Scalar {
        match self.kind {
            VarietyKind::DualHomVariety => self.field.inv(self.j),
            _ => self.j,
        }
    }

    pub fn case_tag(&self) -> CaseTag {
        self.field.case_tag(self.d, self.effective_j())
    }

    /// Defining equation, for a point of the ambient space.
    pub fn contains(&self, x: &[Scalar]) -> bool {
        let f = &self.field;
        let j = self.effective_j();
        match self.kind {
            VarietyKind::Sphere => f.norm(x) == j,
            _ => {
                let s = x[self.d];
                f.norm(&x[..self.d]) == f.mul(j, f.mul(s, s))
            }
        }
    }

    /// The homogeneous variety whose slice `s = 1` is this sphere.
    pub fn lift(&self) -> Result<VarietySpec> {
        Self::hom(&self.field, self.d, self.j)
    }
}

impl fmt::Display for VarietySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            VarietyKind::Sphere => "S",
            VarietyKind::HomVariety => "H",
            VarietyKind::DualHomVariety => "H*",
        };
        write!(f, "{name}(q={}, d={}, j={})", self.field.q(), self.d, self.j)
    }
}

#[derive(Debug, Clone)]
pub struct PointSet {
    pub spec: VarietySpec,
    /// Canonical indices in the ambient space, ascending.
    pub points: Vec<usize>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.spec.ambient_dim()
    }

    pub fn coords(&self) -> Vec<Vec<Scalar>> {
        let q = self.spec.field.q();
        let n = self.ambient_dim();
        self.points
            .iter()
            .map(|&i| {
                let mut c = vec![0; n];
                decode_into(i, q, &mut c);
                c
            })
            .collect()
    }

    /// Flat row-major coordinates, `ambient_dim` entries per point.
    pub fn flat_coords(&self) -> Vec<Scalar> {
        self.coords().concat()
    }

    pub fn membership(&self) -> Vec<bool> {
        let n = power(self.spec.field.q(), self.ambient_dim()) as usize;
        let mut mask = vec![false; n];
        for &i in &self.points {
            mask[i] = true;
        }
        mask
    }
}

/// Exhaustive scan of the ambient space.
pub fn variety_points(spec: &VarietySpec, budget: &Budget) -> Result<PointSet> {
    let q = spec.field.q();
    let n = spec.ambient_dim();
    let size = ambient_size(q, n, budget)?;
    let points = (0..size)
        .into_par_iter()
        .with_min_len(4096)
        .filter(|&i| {
            let mut c = [0 as Scalar; 64];
            decode_into(i, q, &mut c[..n]);
            spec.contains(&c[..n])
        })
        .collect();
    Ok(PointSet {
        spec: spec.clone(),
        points,
    })
}

fn ipow(q: u64, e: usize) -> i128 {
    power(q, e) as i128
}

/// Exact value of `Ĥ(M) = Σ_{X ∈ H} χ(-M·X)` for `H = H_j^d` (or its dual),
/// `M = (m, m_{d+1}) ∈ F_q^{d+1}`.
pub fn hom_fourier_closed(spec: &VarietySpec, m_full: &[Scalar]) -> Result<i128> {
    if spec.kind == VarietyKind::Sphere {
        return Err(Error::UnsupportedVariety(
            "closed-form transform is only available for homogeneous varieties".into(),
        ));
    }
    if m_full.len() != spec.d + 1 {
        return Err(Error::DimensionMismatch {
            expected: spec.d + 1,
            found: m_full.len(),
        });
    }
    let f = &spec.field;
    let (q, d) = (f.q(), spec.d);
    let j = spec.effective_j();
    let (m, last) = (&m_full[..d], m_full[d]);
    let norm_m = f.norm(m);
    let last_sq = f.mul(last, last);
    let on_dual = norm_m == f.mul(f.inv(j), last_sq);
    let at_origin = m_full.iter().all(|&c| c == 0);
    let head = if at_origin { ipow(q, d) } else { 0 };
    let tag = f.case_tag(d, j);
    let value = match tag {
        CaseTag::Even => {
            if on_dual {
                head
            } else {
                let eta_m1 = i128::from(f.eta(q - 1));
                let sign = if ((d + 2) / 2) % 2 == 0 { 1 } else { eta_m1 };
                let arg = f.sub(f.mul(j, norm_m), last_sq);
                ipow(q, d / 2) * sign * i128::from(f.eta(arg))
            }
        }
        t => {
            let sign: i128 = if t.is_minus_case() { -1 } else { 1 };
            let half = ipow(q, (d - 1) / 2);
            if on_dual {
                head + sign * (q as i128 - 1) * half
            } else {
                -sign * half
            }
        }
    };
    Ok(value)
}

/// `|H_j^d|`, read off the closed form at `M = 0`.
pub fn hom_cardinality(spec: &VarietySpec) -> Result<i128> {
    hom_fourier_closed(spec, &vec![0; spec.d + 1])
}

/// `Σ_{X ∈ set} χ(-M·X)` by direct summation.
pub fn character_sum(set: &PointSet, m: &[Scalar]) -> Result<Complex64> {
    let n = set.ambient_dim();
    if m.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.len(),
        });
    }
    let f = &set.spec.field;
    let q = f.q();
    let mut c = vec![0; n];
    let mut acc = Complex64::new(0.0, 0.0);
    for &i in &set.points {
        decode_into(i, q, &mut c);
        acc += f.chi(f.neg(f.dot(m, &c)));
    }
    Ok(acc)
}

/// Brute-force `Ĥ(M)`: enumerates the variety and sums characters.
pub fn hom_fourier_bruteforce(
    spec: &VarietySpec,
    m: &[Scalar],
    budget: &Budget,
) -> Result<Complex64> {
    let set = variety_points(spec, budget)?;
    character_sum(&set, m)
}

/// `Ĥ(Z)` for every `Z ∈ F_q^{d+1}`, indexed canonically.
pub fn hom_fourier_table(spec: &VarietySpec, budget: &Budget) -> Result<Vec<i64>> {
    let q = spec.field.q();
    let n = spec.d + 1;
    let size = ambient_size(q, n, budget)?;
    (0..size)
        .into_par_iter()
        .with_min_len(4096)
        .map(|i| {
            let mut c = vec![0; n];
            decode_into(i, q, &mut c);
            hom_fourier_closed(spec, &c).map(|v| v as i64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::encode;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    #[test]
    fn sphere_example() {
        let s = VarietySpec::sphere(&f(3), 2, 1).unwrap();
        let set = variety_points(&s, &Budget::default()).unwrap();
        let want: Vec<usize> = [[1, 0], [2, 0], [0, 1], [0, 2]]
            .iter()
            .map(|c| encode(c, 3))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(set.points, want);
    }

    #[test]
    fn hom_sizes() {
        let h = VarietySpec::hom(&f(3), 2, 1).unwrap();
        assert_eq!(variety_points(&h, &Budget::default()).unwrap().len(), 9);
        assert_eq!(hom_cardinality(&h).unwrap(), 9);
        let h = VarietySpec::hom(&f(3), 5, 2).unwrap();
        assert_eq!(variety_points(&h, &Budget::default()).unwrap().len(), 225);
        assert_eq!(hom_cardinality(&h).unwrap(), 225);
    }

    #[test]
    fn closed_form_examples() {
        let h = VarietySpec::hom(&f(3), 2, 1).unwrap();
        assert_eq!(hom_fourier_closed(&h, &[0, 0, 0]).unwrap(), 9);
        assert_eq!(hom_fourier_closed(&h, &[1, 0, 0]).unwrap(), 3);
        let b = Budget::default();
        let v = hom_fourier_bruteforce(&h, &[1, 0, 0], &b).unwrap();
        assert!((v - Complex64::new(3.0, 0.0)).norm() < 1e-9);
        let v = hom_fourier_bruteforce(&h, &[0, 0, 0], &b).unwrap();
        assert!((v - Complex64::new(9.0, 0.0)).norm() < 1e-12);

        let h = VarietySpec::hom(&f(5), 3, 1).unwrap();
        let closed = hom_fourier_closed(&h, &[0, 0, 0, 1]).unwrap();
        let brute = hom_fourier_bruteforce(&h, &[0, 0, 0, 1], &b).unwrap();
        assert!((brute.re - closed as f64).abs() < 1e-9 && brute.im.abs() < 1e-9);
    }

    #[test]
    fn closed_matches_bruteforce_small_exhaustive() {
        // Every M, every j, for the smallest cells of each parity class.
        let b = Budget::default();
        for (q, d) in [(3u64, 2usize), (3, 3), (5, 2), (3, 4), (5, 3), (3, 5)] {
            let field = f(q);
            for j in 1..q {
                let h = VarietySpec::hom(&field, d, j).unwrap();
                let set = variety_points(&h, &b).unwrap();
                let n = power(q, d + 1) as usize;
                for i in 0..n {
                    let mut m = vec![0; d + 1];
                    decode_into(i, q, &mut m);
                    let closed = hom_fourier_closed(&h, &m).unwrap() as f64;
                    let brute = character_sum(&set, &m).unwrap();
                    assert!(
                        (brute.re - closed).abs() < 1e-7 && brute.im.abs() < 1e-7,
                        "q={q} d={d} j={j} M={m:?}: {brute} vs {closed}"
                    );
                }
            }
        }
    }

    #[test]
    fn dual_is_inverse_j() {
        let field = f(7);
        let dual = VarietySpec::dual(&field, 3, 3).unwrap();
        let direct = VarietySpec::hom(&field, 3, field.inv(3)).unwrap();
        let b = Budget::default();
        assert_eq!(
            variety_points(&dual, &b).unwrap().points,
            variety_points(&direct, &b).unwrap().points
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let m: Vec<u64> = (0..4).map(|_| rng.gen_range(0..7)).collect();
            assert_eq!(
                hom_fourier_closed(&dual, &m).unwrap(),
                hom_fourier_closed(&direct, &m).unwrap()
            );
        }
    }

    #[test]
    fn spec_validation() {
        assert_eq!(
            VarietySpec::sphere(&f(5), 3, 5).unwrap_err(),
            Error::ZeroArgument("j")
        );
        assert!(VarietySpec::hom(&f(5), 1, 1).is_err());
        let s = VarietySpec::sphere(&f(5), 3, 1).unwrap();
        assert!(hom_fourier_closed(&s, &[0, 0, 0]).is_err());
        let tiny = Budget {
            max_ambient: 100,
            max_evaluations: 1,
        };
        assert!(matches!(variety_points(&s, &tiny), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn cardinality_is_order_q_to_the_d() {
        for q in [3u64, 5, 7] {
            let field = f(q);
            for d in 2..=5 {
                for j in 1..q {
                    let h = VarietySpec::hom(&field, d, j).unwrap();
                    let size = hom_cardinality(&h).unwrap() as f64;
                    let qd = power(q, d) as f64;
                    assert!(qd / 2.0 <= size && size <= 2.0 * qd);
                }
            }
        }
    }
}
