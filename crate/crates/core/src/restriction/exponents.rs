//! Critical exponents for `L²` restriction to spheres, as exact rationals.

use crate::error::{Error, Result};
use crate::exponent::{Exponent, Rational};
use crate::field::CaseTag;

fn ratio(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}

/// Largest `p` with `R(p → 2) ≲ 1` conjectured for the sphere case `tag`.
pub fn conjectured_exponent(d: usize, tag: CaseTag) -> Result<Rational> {
    if d < 2 || !tag.fits(d) {
        return Err(Error::InvalidDimension(format!("case {tag} does not occur for d = {d}")));
    }
    let d = d as i64;
    Ok(match tag {
        CaseTag::Even => ratio(2 * d + 4, d + 4),
        t if t.is_minus_case() => ratio(2 * d + 6, d + 5),
        _ => ratio(2 * d + 2, d + 3),
    })
}

/// Upper end of the range obtained by the Stein–Tomas argument.
pub fn stein_tomas(d: usize) -> Rational {
    let d = d as i64;
    ratio(2 * d + 2, d + 3)
}

/// Largest `p` allowed by a `k`-dimensional affine subspace inside the
/// sphere, for target exponent `r`: with `L = max(2d/(d−1), r(d−k)/(d−1−k))`
/// the conditions read `p' ≥ L`, i.e. `p ≤ L/(L−1)`. For `r = 2` this is
/// `2(d−k)/(d+1−k)`.
pub fn necessary_threshold(d: usize, k: usize, r: Exponent) -> Result<Rational> {
    let max = d as i64 - 2;
    if (k as i64) > max {
        return Err(Error::InvalidK { k: k as i64, max });
    }
    let (d, k) = (d as i64, k as i64);
    let r = match r {
        Exponent::Finite(r) => r,
        Exponent::Infinity => return Ok(Rational::from_integer(1)),
    };
    // r'/(r'−1) = r
    let from_flat = r * ratio(d - k, d - 1 - k);
    let baseline = ratio(2 * d, d - 1);
    let l = from_flat.max(baseline);
    Ok(l / (l - 1))
}

/// The `r = 2` threshold exactly as the closed expression
/// `(2d³−2d²−2d²k+2dk)/(d³−2d²−d²k+dk+d)` is printed. It equals
/// `2(d−k)/(d−1−k)`, the bound on the conjugate exponent `p'`.
pub fn printed_r2_threshold(d: usize, k: usize) -> Rational {
    let (d, k) = (d as i64, k as i64);
    ratio(
        2 * d * d * d - 2 * d * d - 2 * d * d * k + 2 * d * k,
        d * d * d - 2 * d * d - d * d * k + d * k + d,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentRow {
    pub d: usize,
    /// Case exponent and the subspace threshold at that case's `k`, for each
    /// case that occurs in dimension `d`.
    pub cases: Vec<(CaseTag, Rational, Rational)>,
    pub stein_tomas: Rational,
}

impl ExponentRow {
    pub fn case(&self, tag: CaseTag) -> Option<Rational> {
        self.cases.iter().find(|(t, _, _)| *t == tag).map(|c| c.1)
    }
}

pub fn exponent_row(d: usize) -> Result<ExponentRow> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("d = {d}, need d >= 2")));
    }
    let two = Exponent::integer(2)?;
    let cases = CaseTag::ALL
        .iter()
        .filter(|t| t.fits(d))
        .map(|&t| {
            let p = conjectured_exponent(d, t)?;
            let thr = necessary_threshold(d, t.sphere_flat_dim(d), two)?;
            Ok((t, p, thr))
        })
        .collect::<Result<_>>()?;
    Ok(ExponentRow {
        d,
        cases,
        stein_tomas: stein_tomas(d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn conjecture_examples() {
        assert_eq!(conjectured_exponent(4, CaseTag::Even).unwrap(), r(3, 2));
        assert_eq!(conjectured_exponent(5, CaseTag::D1Mod4NonSq).unwrap(), r(8, 5));
        assert_eq!(conjectured_exponent(3, CaseTag::D3Mod4NegSq).unwrap(), r(4, 3));
        assert!(conjectured_exponent(4, CaseTag::D1Mod4Sq).is_err());
        assert_eq!(stein_tomas(4), r(10, 7));
        assert_eq!(stein_tomas(3), r(4, 3));
    }

    #[test]
    fn threshold_examples() {
        let two = Exponent::integer(2).unwrap();
        assert_eq!(necessary_threshold(4, 1, two).unwrap(), r(3, 2));
        assert_eq!(necessary_threshold(5, 1, two).unwrap(), r(8, 5));
        assert_eq!(necessary_threshold(3, 1, two).unwrap(), r(4, 3));
        assert_eq!(
            necessary_threshold(4, 3, two).unwrap_err(),
            Error::InvalidK { k: 3, max: 2 }
        );
        assert_eq!(necessary_threshold(4, 1, Exponent::Infinity).unwrap(), r(1, 1));
    }

    #[test]
    fn threshold_matches_conjecture_at_case_dimension() {
        let two = Exponent::integer(2).unwrap();
        for d in 3..=12 {
            for t in CaseTag::ALL.into_iter().filter(|t| t.fits(d)) {
                let k = t.sphere_flat_dim(d);
                assert_eq!(
                    necessary_threshold(d, k, two).unwrap(),
                    conjectured_exponent(d, t).unwrap(),
                    "d={d} {t}"
                );
            }
        }
    }

    #[test]
    fn printed_form_is_the_conjugate_bound() {
        for d in 3..=12usize {
            for k in 0..=d - 2 {
                let printed = printed_r2_threshold(d, k);
                let (di, ki) = (d as i64, k as i64);
                assert_eq!(printed, r(2 * (di - ki), di - 1 - ki));
                let p = necessary_threshold(d, k, Exponent::integer(2).unwrap()).unwrap();
                // 1/p + 1/printed = 1
                assert_eq!(p.recip() + printed.recip(), r(1, 1));
            }
        }
    }

    #[test]
    fn general_r_reduces_to_baseline() {
        // r = 1 gives L = max(2d/(d−1), (d−k)/(d−1−k)) = 2d/(d−1).
        let one = Exponent::integer(1).unwrap();
        assert_eq!(necessary_threshold(5, 1, one).unwrap(), r(5, 3));
    }

    #[test]
    fn rows() {
        let row = exponent_row(3).unwrap();
        assert_eq!(row.case(CaseTag::Even), None);
        assert_eq!(row.case(CaseTag::D3Mod4NegNonSq), Some(r(3, 2)));
        assert_eq!(row.case(CaseTag::D3Mod4NegSq), Some(r(4, 3)));
        assert_eq!(row.stein_tomas, r(4, 3));
        let row = exponent_row(4).unwrap();
        assert_eq!(row.case(CaseTag::Even), Some(r(3, 2)));
        assert_eq!(row.stein_tomas, r(10, 7));
        let row = exponent_row(5).unwrap();
        assert_eq!(row.case(CaseTag::D1Mod4NonSq), Some(r(8, 5)));
        assert_eq!(row.case(CaseTag::D1Mod4Sq), Some(r(3, 2)));
        for (_, p, thr) in &row.cases {
            assert_eq!(p, thr);
        }
    }
}
