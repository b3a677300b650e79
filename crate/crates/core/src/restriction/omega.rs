//! `Ω(E) = Σ_{M∈H} |Ê(M)|²` for `E ⊂ F_q^{d+1}` and `H = H_j^d`, and the
//! size-dependent bounds it satisfies.

use num_complex::Complex64;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::field::{CaseTag, Scalar};
use crate::grid::{
    decode_into, dyadic_decompose, encode, fourier_transform, inverse_fourier_transform,
    majorant_sandwich, GridFunction, FULL_DEPTH,
};
use crate::tol;
use crate::varieties::{hom_fourier_table, variety_points, PointSet, VarietyKind, VarietySpec};

/// Largest `|E|²` for which the double sum over pairs is evaluated directly.
pub const PAIRWISE_CAP: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMethod {
    /// `Σ_{X,Y∈E} Ĥ(X−Y)` over all pairs.
    Pairwise,
    /// `Σ_Z Ĥ(Z)·#{(X,Y) : X−Y = Z}` with the difference counts recovered
    /// from a transform.
    Autocorrelation,
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaValue {
    /// Sum of `|Ê|²` over the variety.
    pub omega: f64,
    /// Exact integer value from the closed transform of `1_H`.
    pub omega_pairs: i128,
    pub method: PairMethod,
    pub rel_err: f64,
}

/// Which size range `|E|` falls in, relative to `q^α` and `q^{α+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Small,
    Middle,
    Large,
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaReport {
    pub tag: CaseTag,
    pub size: usize,
    pub omega: f64,
    pub omega_pairs: i128,
    pub regime: Regime,
    /// `‖Ê‖_{L²(H)}` with the normalized measure.
    pub l2_norm: f64,
    /// The regime's size bound for `‖Ê‖_{L²(H)}`: `|E|^{1/2}`,
    /// `q^{−α/2}|E|` or `q^{1/2}|E|^{1/2}`.
    pub branch_value: f64,
    /// `min{q^d|E| + C·q^{α'}|E|², q^{d+1}|E|}`.
    pub bound: f64,
    pub pass: bool,
}

/// Shared tables for repeated `Ω` evaluations on one variety.
#[derive(Debug, Clone)]
pub struct OmegaContext {
    pub variety: PointSet,
    coords: Vec<Vec<Scalar>>,
    table: Vec<i64>,
}

impl OmegaContext {
    pub fn new(spec: &VarietySpec, budget: &Budget) -> Result<Self> {
        if spec.kind == VarietyKind::Sphere {
            return Err(Error::UnsupportedVariety("Ω is defined on homogeneous varieties".into()));
        }
        let variety = variety_points(spec, budget)?;
        Ok(OmegaContext {
            coords: variety.coords(),
            variety,
            table: hom_fourier_table(spec, budget)?,
        })
    }

    fn spec(&self) -> &VarietySpec {
        &self.variety.spec
    }

    fn ambient_len(&self) -> usize {
        self.table.len()
    }

    fn normalize(&self, e: &[usize]) -> Result<Vec<usize>> {
        let n = self.ambient_len();
        if let Some(&bad) = e.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidDimension(format!("point index {bad} outside F_q^{}", self.spec().d + 1)));
        }
        let mut e = e.to_vec();
        e.sort_unstable();
        e.dedup();
        if e.is_empty() {
            return Err(Error::EmptyDomain);
        }
        Ok(e)
    }

    fn pairwise(&self, e: &[usize]) -> i128 {
        let field = &self.spec().field;
        let q = field.q();
        let n = self.spec().d + 1;
        let coords: Vec<Vec<Scalar>> = e
            .iter()
            .map(|&i| {
                let mut c = vec![0; n];
                decode_into(i, q, &mut c);
                c
            })
            .collect();
        let mut diff = vec![0; n];
        let mut total: i128 = 0;
        for x in &coords {
            for y in &coords {
                for ((d, &a), &b) in diff.iter_mut().zip(x).zip(y) {
                    *d = field.sub(a, b);
                }
                total += self.table[encode(&diff, q)] as i128;
            }
        }
        total
    }

    fn autocorrelation(&self, e_hat: &GridFunction) -> i128 {
        let energy = GridFunction::new(
            e_hat.field(),
            e_hat.dim(),
            e_hat.values().iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect(),
        )
        .expect("same shape");
        let counts = inverse_fourier_transform(&energy);
        counts
            .values()
            .iter()
            .zip(&self.table)
            .map(|(c, &h)| c.re.round() as i128 * h as i128)
            .sum()
    }

    pub fn omega(&self, e: &[usize]) -> Result<OmegaValue> {
        let e = self.normalize(e)?;
        let field = &self.spec().field;
        let n = self.spec().d + 1;
        let q = field.q();
        let transform = || fourier_transform(&GridFunction::indicator(field, n, &e));
        // Summing characters over E for each point of H beats a full
        // transform when |E|·|H| ≤ q^{n+1}.
        let direct = (e.len() as u128) * (self.variety.len() as u128) <= (self.ambient_len() as u128) * q as u128;
        let (omega, e_hat) = if direct {
            let chi = field.chi_table();
            let pts: Vec<Vec<Scalar>> = e
                .iter()
                .map(|&i| {
                    let mut c = vec![0; n];
                    decode_into(i, q, &mut c);
                    c
                })
                .collect();
            let omega: f64 = self
                .coords
                .iter()
                .map(|z| {
                    pts.iter()
                        .map(|x| chi[field.neg(field.dot(z, x)) as usize])
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .sum();
            (omega, None)
        } else {
            let e_hat = transform();
            let omega = self.variety.points.iter().map(|&i| e_hat.values()[i].norm_sqr()).sum();
            (omega, Some(e_hat))
        };
        let pairs = (e.len() as u128).pow(2);
        let (omega_pairs, method) = if pairs <= PAIRWISE_CAP {
            (self.pairwise(&e), PairMethod::Pairwise)
        } else {
            let e_hat = e_hat.unwrap_or_else(transform);
            (self.autocorrelation(&e_hat), PairMethod::Autocorrelation)
        };
        let rel_err = tol::rel_diff(omega, omega_pairs as f64);
        if rel_err > tol::OMEGA_REL {
            return Err(Error::IdentityViolation {
                check: "omega",
                lhs: omega,
                rhs: omega_pairs as f64,
                tol: tol::OMEGA_REL,
            });
        }
        Ok(OmegaValue {
            omega,
            omega_pairs,
            method,
            rel_err,
        })
    }

    pub fn bound_check(&self, e: &[usize]) -> Result<OmegaReport> {
        let value = self.omega(e)?;
        let size = self.normalize(e)?.len();
        let spec = self.spec();
        let tag = spec.case_tag();
        let (q, d) = (spec.field.q() as f64, spec.d as i32);
        let s = size as f64;
        let alpha = *tag.alpha(spec.d).numer() as f64 / *tag.alpha(spec.d).denom() as f64;
        let regime = if s <= q.powf(alpha) {
            Regime::Small
        } else if s <= q.powf(alpha + 1.0) {
            Regime::Middle
        } else {
            Regime::Large
        };
        let branch_value = match regime {
            Regime::Small => s.sqrt(),
            Regime::Middle => q.powf(-alpha / 2.0) * s,
            Regime::Large => q.sqrt() * s.sqrt(),
        };
        let (cross_exp, cross_const) = if tag.is_minus_case() {
            ((d - 1) as f64 / 2.0, 1.0)
        } else if tag.is_plus_case() {
            ((d + 1) as f64 / 2.0, 1.0 - 1.0 / q)
        } else {
            (d as f64 / 2.0, 1.0)
        };
        let bound = (q.powi(d) * s + cross_const * q.powf(cross_exp) * s * s).min(q.powi(d + 1) * s);
        Ok(OmegaReport {
            tag,
            size,
            omega: value.omega,
            omega_pairs: value.omega_pairs,
            regime,
            l2_norm: (value.omega / self.variety.len() as f64).sqrt(),
            branch_value,
            bound,
            pass: value.omega <= bound * (1.0 + tol::OMEGA_BOUND_REL),
        })
    }
}

/// `Ω(E)` on `H = spec`, by both algorithms.
pub fn omega(e: &[usize], spec: &VarietySpec, budget: &Budget) -> Result<OmegaValue> {
    OmegaContext::new(spec, budget)?.omega(e)
}

pub fn omega_bound_check(e: &[usize], spec: &VarietySpec, budget: &Budget) -> Result<OmegaReport> {
    OmegaContext::new(spec, budget)?.bound_check(e)
}

#[derive(Debug, Clone, Serialize)]
pub struct DyadicRatioReport {
    /// `Σ_{X∈H} |F̂(X)|²`.
    pub original: f64,
    /// `Σ_{X∈H} |F̃̂(X)|²` for the dyadic majorant `F̃`.
    pub majorant: f64,
    pub ratio: f64,
    /// `F ≤ F̃ ≤ 2F` pointwise.
    pub sandwich: bool,
    pub pass: bool,
}

/// Compares the `L²(H)` mass of `F̂` with that of its dyadic majorant. The
/// ratio is expected in `[1/4, 4]`.
pub fn dyadic_l2_ratio(f: &GridFunction, hom: &PointSet) -> Result<DyadicRatioReport> {
    if f.dim() != hom.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: hom.ambient_dim(),
            found: f.dim(),
        });
    }
    let dec = dyadic_decompose(f, FULL_DEPTH)?;
    let mass = |g: &GridFunction| -> f64 {
        let hat = fourier_transform(g);
        hom.points.iter().map(|&i| hat.values()[i].norm_sqr()).sum()
    };
    let original = mass(f);
    let majorant = mass(&dec.majorant);
    let ratio = if majorant > 0.0 { original / majorant } else { 1.0 };
    let sandwich = majorant_sandwich(f, &dec.majorant);
    Ok(DyadicRatioReport {
        original,
        majorant,
        ratio,
        sandwich,
        pass: sandwich && (0.25..=4.0).contains(&ratio),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::varieties::{build_affine_in_sphere, hom_cardinality};
    use rand::{seq::index::sample, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    fn ambient_count(q: u64, d: usize) -> f64 {
        crate::budget::power(q, d + 1) as f64
    }

    #[test]
    fn singleton_and_full_space() {
        let b = Budget::default();
        for (q, d, j) in [(3u64, 2usize, 1u64), (5, 3, 2), (3, 5, 2)] {
            let spec = VarietySpec::hom(&f(q), d, j).unwrap();
            let ctx = OmegaContext::new(&spec, &b).unwrap();
            let h = hom_cardinality(&spec).unwrap();
            let v = ctx.omega(&[7]).unwrap();
            assert!((v.omega - h as f64).abs() < 1e-9 * h as f64);
            assert_eq!(v.omega_pairs, h);
            let all: Vec<usize> = (0..ambient_count(q, d) as usize).collect();
            let rep = ctx.bound_check(&all).unwrap();
            let want = ambient_count(q, d).powi(2);
            assert!(tol::rel_diff(rep.omega, want) < 1e-12);
            assert_eq!(rep.omega_pairs as f64, want);
            assert_eq!(rep.regime, Regime::Large);
            assert!(rep.pass);
            assert_eq!(rep.bound, want);
        }
    }

    #[test]
    fn random_sets_agree() {
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let spec = VarietySpec::hom(&f(3), 2, 1).unwrap();
        let ctx = OmegaContext::new(&spec, &b).unwrap();
        for _ in 0..20 {
            let e = sample(&mut rng, 27, 10).into_vec();
            let v = ctx.omega(&e).unwrap();
            assert_eq!(v.method, PairMethod::Pairwise);
            assert!(v.rel_err <= 1e-7);
        }
        // Force the transform path and compare with the pairwise sum.
        let spec = VarietySpec::hom(&f(5), 3, 3).unwrap();
        let ctx = OmegaContext::new(&spec, &b).unwrap();
        let e = sample(&mut rng, 625, 300).into_vec();
        let direct = ctx.pairwise(&e);
        let ind = GridFunction::indicator(&spec.field, 4, &e);
        assert_eq!(ctx.autocorrelation(&fourier_transform(&ind)), direct);
    }

    #[test]
    fn affine_subspace_example() {
        let b = Budget::default();
        let field = f(3);
        let spec = VarietySpec::hom(&field, 5, 2).unwrap();
        assert_eq!(spec.case_tag(), CaseTag::D1Mod4NonSq);
        // span of e1, e2, e3 in F_3^6
        let mut e = Vec::new();
        for a in 0..3u64 {
            for bb in 0..3u64 {
                for c in 0..3u64 {
                    e.push(encode(&[a, bb, c, 0, 0, 0], 3));
                }
            }
        }
        let rep = omega_bound_check(&e, &spec, &b).unwrap();
        assert_eq!(rep.size, 27);
        assert!(rep.pass, "{rep:?}");
        assert!(rep.omega <= 243.0 * 27.0 + 9.0 * 27.0 * 27.0);

        let flat = build_affine_in_sphere(&field, 5, 2, 1).unwrap().lift();
        let rep = omega_bound_check(&flat.point_indices(), &spec, &b).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn random_bounds_hold() {
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (q, d) in [(3u64, 2usize), (3, 3), (5, 2), (3, 4), (3, 5)] {
            for j in 1..q {
                let spec = VarietySpec::hom(&f(q), d, j).unwrap();
                let ctx = OmegaContext::new(&spec, &b).unwrap();
                let n = ambient_count(q, d) as usize;
                for _ in 0..10 {
                    let size = (n as f64).powf(rng.gen_range(0.0..1.0)).round().max(1.0) as usize;
                    let e = sample(&mut rng, n, size).into_vec();
                    let rep = ctx.bound_check(&e).unwrap();
                    assert!(rep.pass, "q={q} d={d} j={j}: {rep:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_sphere_and_bad_points() {
        let b = Budget::default();
        let s = VarietySpec::sphere(&f(3), 2, 1).unwrap();
        assert!(OmegaContext::new(&s, &b).is_err());
        let h = VarietySpec::hom(&f(3), 2, 1).unwrap();
        assert!(omega(&[27], &h, &b).is_err());
        assert!(omega(&[], &h, &b).is_err());
    }

    #[test]
    fn dyadic_ratio_in_range() {
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let field = f(3);
        let hom = variety_points(&VarietySpec::hom(&field, 2, 1).unwrap(), &b).unwrap();
        for _ in 0..20 {
            let g = GridFunction::from_fn(&field, 3, |_| Complex64::new(rng.gen_range(0.0..=1.0), 0.0));
            let rep = dyadic_l2_ratio(&g, &hom).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }
}
