//! Arithmetic in the prime field F_q (q odd), its canonical additive
//! character `χ(t) = exp(2πi t / q)`, the quadratic character `η`, and
//! Gauss sums.
//!
//! All tables are built once in [`Field::new`] and shared behind an `Arc`,
//! so cloning a `Field` is cheap and it can be read from any number of
//! threads.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A field element, always kept reduced into `0..q`.
pub type Scalar = u64;

struct Tables {
    q: u64,
    chi: Vec<Complex64>,
    eta: Vec<i8>,
    inv: Vec<u64>,
}

#[derive(Clone)]
pub struct Field {
    tables: Arc<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q() == other.q()
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut k = 3;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

/// Validating constructor; see [`Field::new`].
pub fn make_field(q: u64) -> Result<Field> {
    Field::new(q)
}

impl Field {
    pub fn new(q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if q == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let chi = (0..q)
            .map(|t| {
                let (s, c) = (2.0 * PI * t as f64 / q as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        let mut eta = vec![-1i8; q as usize];
        eta[0] = 0;
        for x in 1..q {
            eta[((x * x) % q) as usize] = 1;
        }
        let mut inv = vec![0u64; q as usize];
        for x in 1..q {
            inv[x as usize] = pow_mod(x, q - 2, q);
        }
        Ok(Field {
            tables: Arc::new(Tables { q, chi, eta, inv }),
        })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.tables.q
    }

    #[inline]
    pub fn reduce(&self, t: i64) -> Scalar {
        t.rem_euclid(self.q() as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        (a + b) % self.q()
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        (a + self.q() - b) % self.q()
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        (a * b) % self.q()
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        (self.q() - a) % self.q()
    }

    /// Multiplicative inverse; `inv(0)` is 0.
    #[inline]
    pub fn inv(&self, a: Scalar) -> Scalar {
        self.tables.inv[a as usize]
    }

    #[inline]
    pub fn chi(&self, t: Scalar) -> Complex64 {
        self.tables.chi[t as usize]
    }

    /// The full table `χ(0), …, χ(q-1)`.
    pub fn chi_table(&self) -> &[Complex64] {
        &self.tables.chi
    }

    /// Quadratic character with the Legendre convention `η(0) = 0`.
    #[inline]
    pub fn eta(&self, t: Scalar) -> i8 {
        self.tables.eta[t as usize]
    }

    pub fn eta_table(&self) -> &[i8] {
        &self.tables.eta
    }

    pub fn is_square(&self, t: Scalar) -> bool {
        self.eta(t) == 1
    }

    /// `‖x‖ = Σ x_i²` (a quadratic form value, no square root).
    pub fn norm(&self, x: &[Scalar]) -> Scalar {
        let q = self.q();
        x.iter().fold(0, |acc, &v| (acc + v * v) % q)
    }

    pub fn dot(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let q = self.q();
        x.iter().zip(y).fold(0, |acc, (&a, &b)| (acc + a * b) % q)
    }

    /// Gauss sum `G_a = Σ_{s≠0} η(s) χ(a s)`.
    pub fn gauss_sum(&self, a: Scalar) -> Result<Complex64> {
        let a = a % self.q();
        if a == 0 {
            return Err(Error::ZeroArgument("a"));
        }
        Ok((1..self.q())
            .map(|s| self.chi(self.mul(a, s)) * f64::from(self.eta(s)))
            .sum())
    }

    /// Closed form of `Σ_s χ(a s² + b s)`, i.e. `η(a) G_1 χ(-b²/(4a))`.
    pub fn complete_square_closed(&self, a: Scalar, b: Scalar) -> Result<Complex64> {
        let (a, b) = (a % self.q(), b % self.q());
        if a == 0 {
            return Err(Error::ZeroArgument("a"));
        }
        let four_a_inv = self.inv(self.mul(4 % self.q(), a));
        let phase = self.neg(self.mul(self.mul(b, b), four_a_inv));
        Ok(self.gauss_sum(1)? * f64::from(self.eta(a)) * self.chi(phase))
    }

    /// `Σ_{s∈F_q} χ(a s² + b s)` by direct summation.
    ///
    /// The closed form is evaluated as well; a disagreement beyond
    /// `1e-9·q` is reported as [`Error::IdentityViolation`].
    pub fn complete_square_sum(&self, a: Scalar, b: Scalar) -> Result<Complex64> {
        let (a, b) = (a % self.q(), b % self.q());
        if a == 0 {
            return Err(Error::ZeroArgument("a"));
        }
        let direct: Complex64 = (0..self.q())
            .map(|s| self.chi(self.add(self.mul(a, self.mul(s, s)), self.mul(b, s))))
            .sum();
        let closed = self.complete_square_closed(a, b)?;
        let tol = tol::PER_TERM * self.q() as f64;
        let err = (direct - closed).norm();
        if err > tol {
            return Err(Error::IdentityViolation {
                check: "complete_square_sum",
                lhs: direct.norm(),
                rhs: closed.norm(),
                tol,
            });
        }
        Ok(direct)
    }

    /// Five-way classification of `(d, j)`.
    pub fn case_tag(&self, d: usize, j: Scalar) -> CaseTag {
        debug_assert!(d >= 1 && j % self.q() != 0);
        let j = j % self.q();
        match d % 4 {
            0 | 2 => CaseTag::Even,
            1 if self.eta(j) == -1 => CaseTag::D1Mod4NonSq,
            1 => CaseTag::D1Mod4Sq,
            _ if self.eta(self.neg(j)) == -1 => CaseTag::D3Mod4NegNonSq,
            _ => CaseTag::D3Mod4NegSq,
        }
    }
}

/// Free-function form of [`Field::gauss_sum`].
pub fn gauss_sum(field: &Field, a: Scalar) -> Result<Complex64> {
    field.gauss_sum(a)
}

pub fn complete_square_sum(field: &Field, a: Scalar, b: Scalar) -> Result<Complex64> {
    field.complete_square_sum(a, b)
}

pub fn case_tag(field: &Field, d: usize, j: Scalar) -> CaseTag {
    field.case_tag(d, j)
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// The five `(d mod 4, η(±j))` cases.
///
/// "Neg" cases are the ones where the relevant character value is `-1`
/// (`η(j)` for `d ≡ 1`, `η(-j)` for `d ≡ 3`); they carry the larger
/// exponent `α = (d+1)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "EVEN")]
    Even,
    #[serde(rename = "D1MOD4_NONSQ")]
    D1Mod4NonSq,
    #[serde(rename = "D1MOD4_SQ")]
    D1Mod4Sq,
    #[serde(rename = "D3MOD4_NEG_NONSQ")]
    D3Mod4NegNonSq,
    #[serde(rename = "D3MOD4_NEG_SQ")]
    D3Mod4NegSq,
}

impl CaseTag {
    pub const ALL: [CaseTag; 5] = [
        CaseTag::Even,
        CaseTag::D1Mod4NonSq,
        CaseTag::D1Mod4Sq,
        CaseTag::D3Mod4NegNonSq,
        CaseTag::D3Mod4NegSq,
    ];

    pub fn is_minus_case(self) -> bool {
        matches!(self, CaseTag::D1Mod4NonSq | CaseTag::D3Mod4NegNonSq)
    }

    pub fn is_plus_case(self) -> bool {
        matches!(self, CaseTag::D1Mod4Sq | CaseTag::D3Mod4NegSq)
    }

    /// Whether the tag can occur in dimension `d`.
    pub fn fits(self, d: usize) -> bool {
        match self {
            CaseTag::Even => d % 2 == 0,
            CaseTag::D1Mod4NonSq | CaseTag::D1Mod4Sq => d % 4 == 1,
            CaseTag::D3Mod4NegNonSq | CaseTag::D3Mod4NegSq => d % 4 == 3,
        }
    }

    /// `α = d/2`, `(d+1)/2` or `(d-1)/2`.
    pub fn alpha(self, d: usize) -> Ratio<i64> {
        let d = d as i64;
        if self.is_minus_case() {
            Ratio::new(d + 1, 2)
        } else if self.is_plus_case() {
            Ratio::new(d - 1, 2)
        } else {
            Ratio::new(d, 2)
        }
    }

    /// Dimension of the largest affine subspace inside `S_j^{d-1}`.
    pub fn sphere_flat_dim(self, d: usize) -> usize {
        if self.is_minus_case() {
            (d - 3) / 2
        } else if self.is_plus_case() {
            (d - 1) / 2
        } else {
            (d - 2) / 2
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CaseTag::Even => "EVEN",
            CaseTag::D1Mod4NonSq => "D1MOD4_NONSQ",
            CaseTag::D1Mod4Sq => "D1MOD4_SQ",
            CaseTag::D3Mod4NegNonSq => "D3MOD4_NEG_NONSQ",
            CaseTag::D3Mod4NegSq => "D3MOD4_NEG_SQ",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    #[test]
    fn rejects_bad_moduli() {
        assert_eq!(Field::new(4).unwrap_err(), Error::NotPrime(4));
        assert_eq!(Field::new(1).unwrap_err(), Error::NotPrime(1));
        assert_eq!(Field::new(9).unwrap_err(), Error::NotPrime(9));
        assert_eq!(Field::new(2).unwrap_err(), Error::EvenCharacteristic);
    }

    #[test]
    fn eta_tables_small() {
        assert_eq!(Field::new(3).unwrap().eta_table(), &[0, 1, -1]);
        let f5 = Field::new(5).unwrap();
        assert_eq!(f5.eta(2), -1);
        assert_eq!(f5.eta(4), 1);
        assert_eq!(f5.eta_table(), &[0, 1, -1, -1, 1]);
    }

    #[test]
    fn eta_minus_one_tracks_q_mod_4() {
        for q in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43] {
            let f = Field::new(q).unwrap();
            assert_eq!(f.eta(q - 1) == -1, q % 4 == 3, "q = {q}");
            let squares = (1..q).filter(|&t| f.eta(t) == 1).count() as u64;
            assert_eq!(squares, (q - 1) / 2);
        }
    }

    #[test]
    fn inverse_table() {
        let f = Field::new(13).unwrap();
        for a in 1..13 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let f3 = Field::new(3).unwrap();
        let g = f3.gauss_sum(1).unwrap();
        assert_abs_diff_eq!(g.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.im, SQRT3, epsilon = 1e-12);
        let sq = g * g;
        assert_abs_diff_eq!(sq.re, -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sq.im, 0.0, epsilon = 1e-12);

        let f5 = Field::new(5).unwrap();
        let g = f5.gauss_sum(1).unwrap();
        // 2cos(2π/5) − 2cos(4π/5)
        let expected = 2.0 * (2.0 * PI / 5.0).cos() - 2.0 * (4.0 * PI / 5.0).cos();
        assert_abs_diff_eq!(g.re, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(g.re, 5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-12);

        assert_eq!(f5.gauss_sum(0).unwrap_err(), Error::ZeroArgument("a"));
        assert_eq!(f5.gauss_sum(5).unwrap_err(), Error::ZeroArgument("a"));
    }

    #[test]
    fn complete_square_examples() {
        let f3 = Field::new(3).unwrap();
        let v = f3.complete_square_sum(1, 1).unwrap();
        assert_abs_diff_eq!(v.re, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, -SQRT3 / 2.0, epsilon = 1e-12);
        let v = f3.complete_square_sum(1, 0).unwrap();
        assert_abs_diff_eq!(v.im, SQRT3, epsilon = 1e-12);
        let f5 = Field::new(5).unwrap();
        let v = f5.complete_square_sum(1, 0).unwrap();
        assert_abs_diff_eq!(v.re, 5f64.sqrt(), epsilon = 1e-12);
        assert!(f5.complete_square_sum(0, 3).is_err());
    }

    #[test]
    fn case_tag_examples() {
        let f3 = Field::new(3).unwrap();
        let f5 = Field::new(5).unwrap();
        let t = f3.case_tag(5, 2);
        assert_eq!(t, CaseTag::D1Mod4NonSq);
        assert_eq!(t.alpha(5), Ratio::from_integer(3));
        let t = f5.case_tag(4, 1);
        assert_eq!(t, CaseTag::Even);
        assert_eq!(t.alpha(4), Ratio::from_integer(2));
        let t = f3.case_tag(3, 1);
        assert_eq!(t, CaseTag::D3Mod4NegNonSq);
        assert_eq!(t.alpha(3), Ratio::from_integer(2));
    }

    #[test]
    fn case_tag_total_and_alpha_table() {
        for q in [3u64, 5, 7, 11, 13] {
            let f = Field::new(q).unwrap();
            for d in 2..=13usize {
                for j in 1..q {
                    let tag = f.case_tag(d, j);
                    assert!(tag.fits(d));
                    let di = d as i64;
                    let want = match tag {
                        CaseTag::Even => Ratio::new(di, 2),
                        t if t.is_minus_case() => Ratio::new(di + 1, 2),
                        _ => Ratio::new(di - 1, 2),
                    };
                    assert_eq!(tag.alpha(d), want);
                }
            }
        }
    }
}
