//! Double description vertex enumeration for `{x ≥ 0, A x = b}`.
//!
//! The equalities are solved exactly for a parametrization `x = x0 + N t` over
//! the free columns. In homogeneous coordinates `(t, s)` the nonnegativity of
//! the free coordinates together with `s ≥ 0` is the initial orthant; the
//! pivot coordinates' constraints are then inserted one at a time in index
//! order. Extreme rays with `s > 0` are the vertices.

use crate::lp::Row;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersection(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_superset(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

#[derive(Clone, Debug)]
struct Ray {
    coords: Vec<Rational>,
    zeros: BitSet,
}

/// Reduced row echelon form of `[A | b]`: `None` when inconsistent, otherwise
/// the pivot columns and the reduced rows (length `n + 1`).
pub(crate) fn rref(n: usize, rows: &[Row]) -> Option<(Vec<usize>, Vec<Vec<Rational>>)> {
    let mut mat: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| {
            let mut d = vec![Rational::zero(); n + 1];
            for (j, c) in &r.coeffs {
                d[*j] += c;
            }
            d[n] = r.rhs.clone();
            d
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..mat.len()).find(|&i| !mat[i][col].is_zero()) else {
            continue;
        };
        mat.swap(rank, p);
        let inv = mat[rank][col].recip();
        for v in mat[rank].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let prow = mat[rank].clone();
        let nz: Vec<usize> = (0..=n).filter(|&j| !prow[j].is_zero()).collect();
        for (i, row) in mat.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                row[j] -= &delta;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if mat[rank..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    mat.truncate(rank);
    Some((pivots, mat))
}

/// All vertices of `{x ∈ Rⁿ : x ≥ 0, rows}`; assumes the set is bounded.
pub(crate) fn enumerate_vertices(n: usize, rows: &[Row]) -> Vec<Vec<Rational>> {
    let Some((pivots, reduced)) = rref(n, rows) else {
        return Vec::new();
    };
    let mut is_pivot = vec![None; n];
    for (k, &p) in pivots.iter().enumerate() {
        is_pivot[p] = Some(k);
    }
    let free: Vec<usize> = (0..n).filter(|&j| is_pivot[j].is_none()).collect();
    let dim = free.len() + 1; // homogeneous coordinates (t_free..., s)
    let s_index = free.len();
    let constraint_count = n + 1; // one per variable, plus s ≥ 0 at index n

    // Constraint for pivot variable p_k: s·b_k - Σ_f R[k][f] t_f ≥ 0.
    let pivot_constraint = |k: usize| -> Vec<Rational> {
        let mut a: Vec<Rational> = free.iter().map(|&f| -&reduced[k][f]).collect();
        a.push(reduced[k][n].clone());
        a
    };

    let mut rays: Vec<Ray> = (0..dim)
        .map(|i| {
            let mut coords = vec![Rational::zero(); dim];
            coords[i] = Rational::one();
            let mut zeros = BitSet::new(constraint_count);
            for (slot, &f) in free.iter().enumerate() {
                if slot != i {
                    zeros.insert(f);
                }
            }
            if i != s_index {
                zeros.insert(n);
            }
            Ray { coords, zeros }
        })
        .collect();
    let mut processed = free.len() + 1;

    for (k, &p) in pivots.iter().enumerate() {
        let a = pivot_constraint(k);
        let values: Vec<Rational> = rays
            .iter()
            .map(|r| {
                a.iter()
                    .zip(&r.coords)
                    .filter(|(c, x)| !c.is_zero() && !x.is_zero())
                    .map(|(c, x)| c * x)
                    .sum()
            })
            .collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::new();
        for (i, ray) in rays.iter().enumerate() {
            if values[i].is_negative() {
                continue;
            }
            let mut ray = ray.clone();
            if values[i].is_zero() {
                ray.zeros.insert(p);
            }
            next.push(ray);
        }
        for &i in &pos {
            for &j in &neg {
                let common = rays[i].zeros.intersection(&rays[j].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .all(|l| l == i || l == j || !rays[l].zeros.is_superset(&common));
                if !adjacent {
                    continue;
                }
                let (vi, vj) = (&values[i], &values[j]);
                let coords: Vec<Rational> = rays[i]
                    .coords
                    .iter()
                    .zip(&rays[j].coords)
                    .map(|(x, y)| vi * y - vj * x)
                    .collect();
                let mut zeros = common;
                zeros.insert(p);
                next.push(Ray {
                    coords: normalize(coords, s_index),
                    zeros,
                });
            }
        }
        rays = next;
        processed += 1;
    }
    debug_assert_eq!(processed, constraint_count);

    let mut out: Vec<Vec<Rational>> = rays
        .into_iter()
        .filter(|r| r.coords[s_index].is_positive())
        .map(|r| {
            let s = &r.coords[s_index];
            let t: Vec<Rational> = r.coords[..s_index].iter().map(|x| x / s).collect();
            let mut x = vec![Rational::zero(); n];
            for (slot, &f) in free.iter().enumerate() {
                x[f] = t[slot].clone();
            }
            for (k, &p) in pivots.iter().enumerate() {
                let mut v = reduced[k][n].clone();
                for (slot, &f) in free.iter().enumerate() {
                    if !reduced[k][f].is_zero() && !t[slot].is_zero() {
                        v -= &reduced[k][f] * &t[slot];
                    }
                }
                x[p] = v;
            }
            x
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

fn normalize(mut coords: Vec<Rational>, s_index: usize) -> Vec<Rational> {
    let scale = if coords[s_index].is_positive() {
        coords[s_index].clone()
    } else {
        match coords.iter().find(|c| !c.is_zero()) {
            Some(c) => c.abs(),
            None => return coords,
        }
    };
    if !scale.is_one() {
        for c in coords.iter_mut() {
            if !c.is_zero() {
                *c = &*c / &scale;
            }
        }
    }
    coords
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn simplex_vertices() {
        let v = enumerate_vertices(3, &[Row::indicator(&[0, 1, 2], int(1))]);
        assert_eq!(v.len(), 3);
        for x in &v {
            assert_eq!(x.iter().filter(|c| c.is_one()).count(), 1);
        }
    }

    #[test]
    fn square_as_product_of_segments() {
        // x0 + x1 = 1, x2 + x3 = 1: four vertices.
        let v = enumerate_vertices(
            4,
            &[Row::indicator(&[0, 1], int(1)), Row::indicator(&[2, 3], int(1))],
        );
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn infeasible_and_point() {
        assert!(enumerate_vertices(
            1,
            &[Row::indicator(&[0], int(1)), Row::indicator(&[0], int(2))]
        )
        .is_empty());
        assert!(enumerate_vertices(1, &[Row::indicator(&[0], int(-1))]).is_empty());
        assert_eq!(enumerate_vertices(1, &[Row::indicator(&[0], int(1))]), vec![vec![int(1)]]);
    }
}
