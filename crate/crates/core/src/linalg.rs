//! Dense linear algebra over the base field `B`.
//!
//! Vectors are coordinate slices of `Belem` of a fixed width. All arithmetic
//! is delegated to the owning [`TowerParams`].

use crate::error::{Error, Result};
use crate::field::{Belem, TowerParams};

struct Row {
    pivot: usize,
    coords: Vec<Belem>,
    /// Expression of `coords` in terms of the generators inserted so far.
    combo: Vec<Belem>,
}

/// Incrementally built row-echelon form that remembers how each row was
/// obtained from the inserted generators.
pub(crate) struct Span<'a> {
    tower: &'a TowerParams,
    width: usize,
    rows: Vec<Row>,
}

impl<'a> Span<'a> {
    pub(crate) fn new(tower: &'a TowerParams, width: usize) -> Self {
        Self {
            tower,
            width,
            rows: Vec::new(),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Returns the residual of `v` and the multipliers `f` with
    /// `v = sum_j f_j * row_j + residual`.
    fn reduce(&self, v: &[Belem]) -> (Vec<Belem>, Vec<Belem>) {
        debug_assert_eq!(v.len(), self.width);
        let tw = self.tower;
        let mut residual = v.to_vec();
        let mut factors = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let f = residual[row.pivot];
            if !f.is_zero() {
                for (r, c) in residual.iter_mut().zip(&row.coords) {
                    *r = tw.b_sub(*r, tw.b_mul(f, *c));
                }
            }
            factors.push(f);
        }
        (residual, factors)
    }

    /// Sum of `f_j * combo_j`, padded to `len`.
    fn combine_combos(&self, factors: &[Belem], len: usize) -> Vec<Belem> {
        let tw = self.tower;
        let mut out = vec![Belem::ZERO; len];
        for (f, row) in factors.iter().zip(&self.rows) {
            if f.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(&row.combo) {
                *o = tw.b_add(*o, tw.b_mul(*f, *c));
            }
        }
        out
    }

    /// Inserts `v` as a new generator if it is independent of the current
    /// span. Returns whether the rank increased.
    pub(crate) fn insert(&mut self, v: &[Belem]) -> bool {
        let tw = self.tower;
        let (residual, factors) = self.reduce(v);
        let Some(pivot) = residual.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = tw.b_inv(residual[pivot]);
        let rank = self.rows.len();
        let mut combo = self.combine_combos(&factors, rank + 1);
        for c in combo.iter_mut() {
            *c = tw.b_neg(*c);
        }
        combo[rank] = Belem::ONE;
        let coords = residual.iter().map(|x| tw.b_mul(*x, inv)).collect();
        let combo = combo.iter().map(|x| tw.b_mul(*x, inv)).collect();
        for row in self.rows.iter_mut() {
            row.combo.push(Belem::ZERO);
        }
        self.rows.push(Row {
            pivot,
            coords,
            combo,
        });
        true
    }

    /// Coefficients of `v` over the inserted generators, in insertion order.
    pub(crate) fn express(&self, v: &[Belem]) -> Option<Vec<Belem>> {
        let (residual, factors) = self.reduce(v);
        if residual.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(self.combine_combos(&factors, self.rows.len()))
    }
}

/// Inverse of a square matrix over `B` by Gauss-Jordan elimination.
pub(crate) fn invert(tower: &TowerParams, matrix: &[Vec<Belem>]) -> Result<Vec<Vec<Belem>>> {
    let n = matrix.len();
    let mut a: Vec<Vec<Belem>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Belem::ONE } else { Belem::ZERO }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::Rank)?;
        a.swap(col, pivot);
        let inv = tower.b_inv(a[col][col]);
        for x in a[col].iter_mut() {
            *x = tower.b_mul(*x, inv);
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col];
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = tower.b_sub(*x, tower.b_mul(f, *p));
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_express_matches_insertion_order() {
        let tw = TowerParams::new(2, 2, 2, None).unwrap();
        // Vectors over GF(4) of width 2.
        let b = |i| Belem::from_index(i);
        let mut span = Span::new(&tw, 2);
        assert!(span.insert(&[b(2), b(3)]));
        assert!(!span.insert(&[b(0), b(0)]));
        assert!(span.insert(&[b(1), b(0)]));
        assert_eq!(span.rank(), 2);
        let target = [b(3), b(1)];
        let coeffs = span.express(&target).unwrap();
        let rebuilt: Vec<Belem> = (0..2)
            .map(|c| {
                tw.b_add(
                    tw.b_mul(coeffs[0], [b(2), b(3)][c]),
                    tw.b_mul(coeffs[1], [b(1), b(0)][c]),
                )
            })
            .collect();
        assert_eq!(rebuilt, target);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let tw = TowerParams::new(3, 1, 1, None).unwrap();
        let b = |i| Belem::from_index(i);
        let m = vec![vec![b(1), b(2)], vec![b(2), b(1)]];
        // Rows (1,2) and (2,1) = 2*(1,2) mod 3.
        assert_eq!(invert(&tw, &m), Err(Error::Rank));
        let m = vec![vec![b(1), b(1)], vec![b(0), b(2)]];
        let inv = invert(&tw, &m).unwrap();
        assert_eq!(inv, vec![vec![b(1), b(1)], vec![b(0), b(2)]]);
    }
}
