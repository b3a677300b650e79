//! Dense complex functions on `F_q^d`, the Fourier transform
//! `ĝ(x) = Σ_m χ(-m·x) g(m)` and its inverse, and `L^p`/`ℓ^p` norms.
//!
//! Points are addressed by a canonical base-`q` index with the first
//! coordinate least significant.

mod dyadic;

pub use dyadic::{
    check_dyadic_mass, default_truncation, dyadic_decompose, DyadicDecomposition, DyadicMassReport,
    majorant_sandwich, FULL_DEPTH,
};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{power, Budget};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

/// Below this many entries the transforms run single-threaded.
const PAR_THRESHOLD: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point(pub Vec<Scalar>);

impl Point {
    pub fn encode(&self, q: u64) -> usize {
        encode(&self.0, q)
    }

    pub fn decode(index: usize, q: u64, dim: usize) -> Self {
        let mut c = vec![0; dim];
        decode_into(index, q, &mut c);
        Point(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

pub fn encode(coords: &[Scalar], q: u64) -> usize {
    coords
        .iter()
        .rev()
        .fold(0usize, |acc, &c| acc * q as usize + c as usize)
}

pub fn decode_into(mut index: usize, q: u64, out: &mut [Scalar]) {
    let q = q as usize;
    for c in out.iter_mut() {
        *c = (index % q) as Scalar;
        index /= q;
    }
}

/// Number of points of `F_q^dim`, or `BudgetExceeded` past the cap.
pub fn ambient_size(q: u64, dim: usize, budget: &Budget) -> Result<usize> {
    let n = power(q, dim);
    budget.check_ambient(&format!("ambient space F_{q}^{dim}"), n)?;
    Ok(n as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Measure {
    /// `(|V|^{-1} Σ |f|^p)^{1/p}`.
    Normalized,
    /// `(Σ |f|^p)^{1/p}`.
    Counting,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    field: Field,
    dim: usize,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(field: &Field, dim: usize, values: Vec<Complex64>) -> Result<Self> {
        let expected = power(field.q(), dim);
        if values.len() as u128 != expected {
            return Err(Error::InvalidDimension(format!(
                "{} values given for F_{}^{dim} ({expected} points)",
                values.len(),
                field.q()
            )));
        }
        Ok(GridFunction {
            field: field.clone(),
            dim,
            values,
        })
    }

    pub fn zeros(field: &Field, dim: usize) -> Self {
        let n = power(field.q(), dim) as usize;
        GridFunction {
            field: field.clone(),
            dim,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn constant(field: &Field, dim: usize, c: Complex64) -> Self {
        let mut g = Self::zeros(field, dim);
        g.values.fill(c);
        g
    }

    pub fn delta(field: &Field, dim: usize, index: usize) -> Self {
        let mut g = Self::zeros(field, dim);
        g.values[index] = Complex64::new(1.0, 0.0);
        g
    }

    pub fn indicator(field: &Field, dim: usize, points: &[usize]) -> Self {
        let mut g = Self::zeros(field, dim);
        for &i in points {
            g.values[i] = Complex64::new(1.0, 0.0);
        }
        g
    }

    pub fn from_fn(field: &Field, dim: usize, mut f: impl FnMut(&[Scalar]) -> Complex64) -> Self {
        let q = field.q();
        let n = power(q, dim) as usize;
        let mut c = vec![0; dim];
        let values = (0..n)
            .map(|i| {
                decode_into(i, q, &mut c);
                f(&c)
            })
            .collect();
        GridFunction {
            field: field.clone(),
            dim,
            values,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, coords: &[Scalar]) -> Complex64 {
        self.values[encode(coords, self.field.q())]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut g = self.clone();
        g.values.iter_mut().for_each(|v| *v *= c);
        g
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if other.dim != self.dim || other.field != self.field {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(GridFunction {
            field: self.field.clone(),
            dim: self.dim,
            values,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ |g|²`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// `ĝ(x) = Σ_m χ(-m·x) g(m)`, computed one axis at a time.
pub fn fourier_transform(g: &GridFunction) -> GridFunction {
    let values = separable_transform(&g.field, g.dim, &g.values, true);
    GridFunction {
        field: g.field.clone(),
        dim: g.dim,
        values,
    }
}

/// `g(m) = q^{-d} Σ_x χ(m·x) G(x)`.
pub fn inverse_fourier_transform(big_g: &GridFunction) -> GridFunction {
    let mut values = separable_transform(&big_g.field, big_g.dim, &big_g.values, false);
    let scale = 1.0 / power(big_g.field.q(), big_g.dim) as f64;
    values.iter_mut().for_each(|v| *v *= scale);
    GridFunction {
        field: big_g.field.clone(),
        dim: big_g.dim,
        values,
    }
}

/// Direct `O(q^{2d})` evaluation of the forward transform. Oracle only.
pub fn fourier_transform_direct(g: &GridFunction) -> GridFunction {
    let field = &g.field;
    let q = field.q();
    let n = g.len();
    let dim = g.dim;
    let coords: Vec<Vec<Scalar>> = (0..n).map(|i| Point::decode(i, q, dim).0).collect();
    let values = (0..n)
        .into_par_iter()
        .with_min_len(64)
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, gm) in g.values.iter().enumerate() {
                let phase = field.neg(field.dot(&coords[m], &coords[x]));
                acc += field.chi(phase) * gm;
            }
            acc
        })
        .collect();
    GridFunction {
        field: field.clone(),
        dim,
        values,
    }
}

/// One 1-D DFT of size `q` per axis. Every output entry is an independent
/// sequential sum, so the result does not depend on thread scheduling.
fn separable_transform(
    field: &Field,
    dim: usize,
    input: &[Complex64],
    forward: bool,
) -> Vec<Complex64> {
    let q = field.q() as usize;
    let kernel: Vec<Complex64> = (0..q * q)
        .map(|k| {
            let prod = ((k / q) * (k % q) % q) as Scalar;
            field.chi(if forward { field.neg(prod) } else { prod })
        })
        .collect();
    let mut src = input.to_vec();
    let mut dst = vec![Complex64::new(0.0, 0.0); input.len()];
    let mut stride = 1usize;
    for _ in 0..dim {
        let pass = |(idx, out): (usize, &mut Complex64)| {
            let x = (idx / stride) % q;
            let base = idx - x * stride;
            let row = &kernel[x * q..(x + 1) * q];
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, k) in row.iter().enumerate() {
                acc += k * src[base + m * stride];
            }
            *out = acc;
        };
        if dst.len() >= PAR_THRESHOLD {
            dst.par_iter_mut().enumerate().with_min_len(1024).for_each(pass);
        } else {
            dst.iter_mut().enumerate().for_each(pass);
        }
        std::mem::swap(&mut src, &mut dst);
        stride *= q;
    }
    src
}

/// `Σ |f|^p` for finite `p`.
pub fn lp_sum(values: &[Complex64], p: f64) -> f64 {
    if p == 2.0 {
        values.iter().map(|v| v.norm_sqr()).sum()
    } else if p == 1.0 {
        values.iter().map(|v| v.norm()).sum()
    } else {
        values.iter().map(|v| v.norm().powf(p)).sum()
    }
}

/// `L^p` (normalized) or `ℓ^p` (counting) norm; `p = f64::INFINITY` is the
/// max norm under either measure.
pub fn lp_norm(values: &[Complex64], p: f64, measure: Measure) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(format!("p = {p}")));
    }
    if p.is_infinite() {
        return Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let mut s = lp_sum(values, p);
    if measure == Measure::Normalized {
        s /= values.len() as f64;
    }
    Ok(s.powf(1.0 / p))
}

/// Norm of `f` restricted to the listed point indices.
pub fn lp_norm_on(f: &GridFunction, domain: &[usize], p: f64, measure: Measure) -> Result<f64> {
    let vals: Vec<Complex64> = domain.iter().map(|&i| f.values[i]).collect();
    lp_norm(&vals, p, measure)
}
