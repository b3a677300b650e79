//! Dyadic level sets `F_k = {X : 2^{-k-1} < F(X) ≤ 2^{-k}}` and the step
//! majorant `F̃ = Σ_k 2^{-k} 1_{F_k}`.

use num_complex::Complex64;
use serde::Serialize;

use super::GridFunction;
use crate::error::{Error, Result};
use crate::tol;

/// Deep enough that every positive `f64` (subnormals included) gets a level.
pub const FULL_DEPTH: u32 = 1075;

/// `⌈n·log₂ q⌉` for `F` on `F_q^n`.
pub fn default_truncation(q: u64, ambient_dim: usize) -> u32 {
    (ambient_dim as f64 * (q as f64).log2()).ceil() as u32
}

#[derive(Debug, Clone)]
pub struct DyadicDecomposition {
    pub truncation: u32,
    /// `levels[k]` lists the point indices of `F_k`, ascending.
    pub levels: Vec<Vec<usize>>,
    pub majorant: GridFunction,
}

impl DyadicDecomposition {
    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

#[inline]
fn two_pow_neg(k: u32) -> f64 {
    0.5f64.powi(k as i32)
}

/// The unique `k ≥ 0` with `2^{-k-1} < v ≤ 2^{-k}`, for `0 < v ≤ 1`.
pub(crate) fn level_of(v: f64) -> u32 {
    debug_assert!(v > 0.0 && v <= 1.0);
    let mut k = (-v.log2()).floor().max(0.0) as u32;
    while k > 0 && v > two_pow_neg(k) {
        k -= 1;
    }
    while v <= two_pow_neg(k + 1) {
        k += 1;
    }
    k
}

fn real_values(f: &GridFunction) -> Result<Vec<f64>> {
    f.values()
        .iter()
        .enumerate()
        .map(|(index, v)| {
            if v.im != 0.0 || !(0.0..=1.0).contains(&v.re) {
                let value = if v.im != 0.0 { v.im } else { v.re };
                Err(Error::OutOfRangeValue { index, value })
            } else {
                Ok(v.re)
            }
        })
        .collect()
}

/// Splits `F: F_q^n → [0,1]` into levels `0..=truncation`; values at or
/// below `2^{-truncation-1}` (including zeros) land in no level.
pub fn dyadic_decompose(f: &GridFunction, truncation: u32) -> Result<DyadicDecomposition> {
    let vals = real_values(f)?;
    let mut levels = vec![Vec::new(); truncation as usize + 1];
    let mut majorant = vec![Complex64::new(0.0, 0.0); vals.len()];
    for (i, &v) in vals.iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        let k = level_of(v);
        if k <= truncation {
            levels[k as usize].push(i);
            majorant[i] = Complex64::new(two_pow_neg(k), 0.0);
        }
    }
    Ok(DyadicDecomposition {
        truncation,
        levels,
        majorant: GridFunction::new(f.field(), f.dim(), majorant)?,
    })
}

/// `F ≤ F̃ ≤ 2F` at every point, for a majorant built at full depth.
pub fn majorant_sandwich(f: &GridFunction, majorant: &GridFunction) -> bool {
    f.values()
        .iter()
        .zip(majorant.values())
        .all(|(v, m)| v.re <= m.re && m.re <= 2.0 * v.re)
}

#[derive(Debug, Clone, Serialize)]
pub struct DyadicMassReport {
    /// `Σ_k 2^{-pk} |F_k|`.
    pub lhs: f64,
    /// `2^p`.
    pub bound: f64,
    pub pass: bool,
}

/// `Σ_k 2^{-pk}|F_k| ≤ 2^p` for `F` normalized so that `Σ F^p = 1`.
pub fn check_dyadic_mass(f: &GridFunction, p: f64) -> Result<DyadicMassReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(format!("p = {p}")));
    }
    let vals = real_values(f)?;
    let mass: f64 = vals.iter().map(|v| v.powf(p)).sum();
    if (mass - 1.0).abs() > tol::DYADIC_NORMALIZED {
        return Err(Error::NotNormalized(mass));
    }
    let dec = dyadic_decompose(f, FULL_DEPTH)?;
    let lhs: f64 = dec
        .levels
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(k, l)| 2f64.powf(-p * k as f64) * l.len() as f64)
        .sum();
    let bound = 2f64.powf(p);
    Ok(DyadicMassReport {
        lhs,
        bound,
        pass: lhs <= bound,
    })
}
