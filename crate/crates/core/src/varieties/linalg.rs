//! Row reduction over F_q.

use crate::field::{Field, Scalar};

/// Reduces `rows` in place to reduced row echelon form, drops zero rows,
/// and returns the pivot columns.
pub fn rref(field: &Field, rows: &mut Vec<Vec<Scalar>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv(rows[r][col]);
        for v in rows[r].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let factor = rows[i][col];
                let pivot_row = rows[r].clone();
                for (v, &p) in rows[i].iter_mut().zip(&pivot_row) {
                    *v = field.sub(*v, field.mul(factor, p));
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(field: &Field, vectors: &[Vec<Scalar>]) -> usize {
    let mut rows = vectors.to_vec();
    rref(field, &mut rows).len()
}

/// A basis of the span of `vectors`.
pub fn span_basis(field: &Field, vectors: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let mut rows = vectors.to_vec();
    rref(field, &mut rows);
    rows
}

/// Basis of `{x ∈ F_q^ncols : A x = 0}` where `A` has the given rows.
pub fn nullspace(field: &Field, rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut a = rows.to_vec();
    let pivots = rref(field, &mut a);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0; ncols];
            x[f] = 1;
            for (row, &pc) in a.iter().zip(&pivots) {
                x[pc] = field.neg(row[f]);
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_is_orthogonal_and_complete() {
        let f = Field::new(5).unwrap();
        let rows = vec![vec![1, 2, 0, 3], vec![2, 4, 1, 1]];
        let ns = nullspace(&f, &rows, 4);
        assert_eq!(ns.len(), 2);
        for x in &ns {
            for r in &rows {
                assert_eq!(f.dot(r, x), 0);
            }
        }
        assert_eq!(rank(&f, &ns), 2);
    }

    #[test]
    fn rank_of_dependent_set() {
        let f = Field::new(3).unwrap();
        let v = vec![vec![1, 1, 0], vec![2, 2, 0], vec![0, 1, 1], vec![1, 2, 1]];
        assert_eq!(rank(&f, &v), 2);
        assert_eq!(span_basis(&f, &v).len(), 2);
    }
}
