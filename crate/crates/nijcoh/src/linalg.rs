//! Sparse exact linear algebra: rank, kernel bases, and linear solves over an
//! exact field.
//!
//! The production path is a sparse column-echelon elimination that tracks, for
//! every reduced column, its expression in terms of the original columns; rank,
//! kernel vectors, and solve certificates all fall out of that bookkeeping and
//! every answer is exact. A dense fraction-free (Bareiss) elimination over
//! big integers is provided alongside as an algorithmically independent
//! cross-check used by the test suites.

use std::collections::HashMap;

use num::BigInt;
use num::{One, Zero};
use thiserror::Error;

use crate::field::{Field, Q};

/// Errors from matrix construction and resource accounting.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("vector length {got} does not match expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error(
        "estimated working set of {needed} bytes exceeds the NIJCOH_MEM_LIMIT of {limit} bytes"
    )]
    ResourceLimit { needed: u64, limit: u64 },
}

/// Environment variable bounding the memory used by matrix assembly, in bytes.
pub const MEM_LIMIT_VAR: &str = "NIJCOH_MEM_LIMIT";

/// Estimated bytes per stored sparse entry (index + boxed scalar, amortized).
const BYTES_PER_ENTRY: u64 = 64;

/// Check an estimated entry count against the `NIJCOH_MEM_LIMIT` budget.
///
/// The limit is read from the environment on every call so tests and callers
/// can adjust it dynamically; unset or unparsable values mean "unbounded".
pub fn ensure_budget(entries: usize) -> Result<(), LinalgError> {
    let Some(limit) = std::env::var(MEM_LIMIT_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
    else {
        return Ok(());
    };
    let needed = entries as u64 * BYTES_PER_ENTRY;
    if needed > limit {
        Err(LinalgError::ResourceLimit { needed, limit })
    } else {
        Ok(())
    }
}

/// Column-major sparse matrix over an exact field.
///
/// Each column stores `(row, value)` pairs sorted by row with no explicit
/// zeros, matching the shape of coboundary-matrix assembly (columns are images
/// of basis cochains and are built one at a time).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix<F: Field> {
    rows: usize,
    columns: Vec<Vec<(usize, F)>>,
}

impl<F: Field> SparseMatrix<F> {
    /// The zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            columns: vec![Vec::new(); cols],
        }
    }

    /// Build from `(row, col, value)` triples; duplicate positions are summed.
    pub fn from_triples(
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (usize, usize, F)>,
    ) -> Result<Self, LinalgError> {
        let mut m = SparseMatrix::zero(rows, cols);
        let mut scratch: Vec<Vec<(usize, F)>> = vec![Vec::new(); cols];
        for (r, c, v) in triples {
            if r >= rows || c >= cols {
                return Err(LinalgError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            scratch[c].push((r, v));
        }
        for (c, mut entries) in scratch.into_iter().enumerate() {
            entries.sort_by_key(|(r, _)| *r);
            let mut merged: Vec<(usize, F)> = Vec::with_capacity(entries.len());
            for (r, v) in entries {
                match merged.last_mut() {
                    Some((lr, lv)) if *lr == r => *lv = lv.add(&v),
                    _ => merged.push((r, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            m.columns[c] = merged;
        }
        Ok(m)
    }

    /// Build from explicit dense columns (test and assembly convenience).
    pub fn from_dense_columns(rows: usize, columns: Vec<Vec<F>>) -> Result<Self, LinalgError> {
        let cols = columns.len();
        let mut m = SparseMatrix::zero(rows, cols);
        for (c, col) in columns.into_iter().enumerate() {
            if col.len() != rows {
                return Err(LinalgError::LengthMismatch {
                    got: col.len(),
                    expected: rows,
                });
            }
            m.columns[c] = col
                .into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .collect();
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Entry accessor (linear in the column's support).
    pub fn get(&self, row: usize, col: usize) -> F {
        self.columns[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(F::zero)
    }

    pub fn column(&self, col: usize) -> &[(usize, F)] {
        &self.columns[col]
    }

    pub fn transpose(&self) -> SparseMatrix<F> {
        let mut t = SparseMatrix::zero(self.cols(), self.rows);
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                t.columns[*r].push((c, v.clone()));
            }
        }
        // Row-major traversal above emits each transposed column in sorted order already;
        // sort defensively in case of future construction changes.
        for col in &mut t.columns {
            col.sort_by_key(|(r, _)| *r);
        }
        t
    }

    /// Matrix-vector product with a dense vector.
    pub fn mul_vec(&self, v: &[F]) -> Result<Vec<F>, LinalgError> {
        if v.len() != self.cols() {
            return Err(LinalgError::LengthMismatch {
                got: v.len(),
                expected: self.cols(),
            });
        }
        let mut out = vec![F::zero(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            if v[c].is_zero() {
                continue;
            }
            for (r, a) in col {
                out[*r].add_mul(a, &v[c]);
            }
        }
        Ok(out)
    }

    /// Rank over the matrix's field.
    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new();
        for col in &self.columns {
            ech.offer(col.clone(), Vec::new());
        }
        ech.pivots.len()
    }

    /// A basis of the right kernel `{v : m·v = 0}`, as dense vectors.
    ///
    /// The list has exactly `cols − rank` elements and each satisfies
    /// `m·v = 0` with exact field equality.
    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        let mut ech = Echelon::new();
        let mut kernel = Vec::new();
        for (j, col) in self.columns.iter().enumerate() {
            if let Some(combo) = ech.offer(col.clone(), vec![(j, F::one())]) {
                let mut dense = vec![F::zero(); self.cols()];
                for (k, v) in combo {
                    dense[k] = v;
                }
                kernel.push(dense);
            }
        }
        kernel
    }

    /// Some exact solution `x` of `m·x = b`, or `None` if the system is
    /// inconsistent.
    pub fn solve(&self, b: &[F]) -> Result<Option<Vec<F>>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::LengthMismatch {
                got: b.len(),
                expected: self.rows,
            });
        }
        let mut ech = Echelon::new();
        for (j, col) in self.columns.iter().enumerate() {
            ech.offer(col.clone(), vec![(j, F::one())]);
        }
        let rhs: Vec<(usize, F)> = b
            .iter()
            .cloned()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Ok(ech.express(rhs).map(|combo| {
            let mut dense = vec![F::zero(); self.cols()];
            for (k, v) in combo {
                dense[k] = v;
            }
            dense
        }))
    }
}

/// Incremental sparse echelon form with combination tracking.
///
/// Pivot columns are normalized (pivot entry 1) and remembered together with
/// their expression in terms of the columns offered so far.
struct Echelon<F: Field> {
    pivot_of_row: HashMap<usize, usize>,
    pivots: Vec<Pivot<F>>,
}

struct Pivot<F: Field> {
    col: Vec<(usize, F)>,
    combo: Vec<(usize, F)>,
}

/// `target -= coeff * source` on sorted sparse vectors.
fn axpy_sub<F: Field>(target: &mut Vec<(usize, F)>, coeff: &F, source: &[(usize, F)]) {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let mut i = 0;
    let mut j = 0;
    while i < target.len() || j < source.len() {
        match (target.get(i), source.get(j)) {
            (Some((ri, vi)), Some((rj, vj))) if ri == rj => {
                let v = vi.sub(&coeff.mul(vj));
                if !v.is_zero() {
                    out.push((*ri, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ri, vi)), Some((rj, _))) if ri < rj => {
                out.push((*ri, vi.clone()));
                i += 1;
            }
            (Some(_), Some((rj, vj))) => {
                let v = coeff.mul(vj).neg();
                if !v.is_zero() {
                    out.push((*rj, v));
                }
                j += 1;
            }
            (Some((ri, vi)), None) => {
                out.push((*ri, vi.clone()));
                i += 1;
            }
            (None, Some((rj, vj))) => {
                let v = coeff.mul(vj).neg();
                if !v.is_zero() {
                    out.push((*rj, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    *target = out;
}

impl<F: Field> Echelon<F> {
    fn new() -> Self {
        Echelon {
            pivot_of_row: HashMap::new(),
            pivots: Vec::new(),
        }
    }

    /// Fully reduce `(col, combo)` against the stored pivots.
    fn reduce(&self, col: &mut Vec<(usize, F)>, combo: &mut Vec<(usize, F)>) {
        loop {
            let hit = col
                .iter()
                .find_map(|(r, v)| self.pivot_of_row.get(r).map(|p| (*p, v.clone())));
            let Some((p, coeff)) = hit else { break };
            let pivot = &self.pivots[p];
            axpy_sub(col, &coeff, &pivot.col);
            axpy_sub(combo, &coeff, &pivot.combo);
        }
    }

    /// Offer a column. Returns `Some(kernel combo)` when the column is
    /// dependent on the pivots seen so far, otherwise installs a new pivot
    /// and returns `None`.
    fn offer(&mut self, mut col: Vec<(usize, F)>, mut combo: Vec<(usize, F)>) -> Option<Vec<(usize, F)>> {
        self.reduce(&mut col, &mut combo);
        if col.is_empty() {
            return Some(combo);
        }
        let (row, lead) = col[0].clone();
        let inv = lead.inv().expect("nonzero leading entry");
        for (_, v) in col.iter_mut() {
            *v = v.mul(&inv);
        }
        for (_, v) in combo.iter_mut() {
            *v = v.mul(&inv);
        }
        self.pivot_of_row.insert(row, self.pivots.len());
        self.pivots.push(Pivot { col, combo });
        None
    }

    /// Express `rhs` in terms of the original columns, if possible.
    fn express(&self, rhs: Vec<(usize, F)>) -> Option<Vec<(usize, F)>> {
        let mut col = rhs;
        let mut x: HashMap<usize, F> = HashMap::new();
        loop {
            let hit = col
                .iter()
                .find_map(|(r, v)| self.pivot_of_row.get(r).map(|p| (*p, v.clone())));
            let Some((p, coeff)) = hit else { break };
            let pivot = &self.pivots[p];
            axpy_sub(&mut col, &coeff, &pivot.col);
            for (k, v) in &pivot.combo {
                let slot = x.entry(*k).or_insert_with(F::zero);
                slot.add_mul(&coeff, v);
            }
        }
        if col.is_empty() {
            Some(x.into_iter().filter(|(_, v)| !v.is_zero()).collect())
        } else {
            None
        }
    }
}

/// Rank by dense fraction-free (Bareiss) elimination over big integers.
///
/// Input rows are rational; each row is scaled by the least common multiple of
/// its denominators (row scaling preserves rank) and the elimination then
/// stays in `BigInt` with exact divisions. This path shares no code with
/// [`SparseMatrix::rank`] and exists so the two can cross-check each other.
pub fn bareiss_rank(dense: &[Vec<Q>]) -> usize {
    if dense.is_empty() || dense[0].is_empty() {
        return 0;
    }
    let cols = dense[0].len();
    let mut m: Vec<Vec<BigInt>> = dense
        .iter()
        .map(|row| {
            assert_eq!(row.len(), cols, "ragged input");
            let lcm = row
                .iter()
                .map(|v| v.denom().clone())
                .fold(BigInt::one(), |acc, d| num::integer::lcm(acc, d));
            row.iter()
                .map(|v| v.numer() * (&lcm / v.denom()))
                .collect()
        })
        .collect();
    let rows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    let mut col = 0;
    while rank < rows && col < cols {
        // Find a pivot row at or below `rank` in this column.
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            col += 1;
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let num = &m[r][c] * &m[rank][col] - &m[r][col] * &m[rank][c];
                m[r][c] = num / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        col += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, qr, F32003};
    use proptest::prelude::*;

    fn dense_q(rows: &[&[i64]]) -> SparseMatrix<Q> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        SparseMatrix::from_triples(
            r,
            c,
            rows.iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i, j, q(v)))),
        )
        .unwrap()
    }

    #[test]
    fn rank_identity_and_zero() {
        let id = dense_q(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(id.rank(), 3);
        assert!(id.kernel_basis().is_empty());
        let z = SparseMatrix::<Q>::zero(4, 7);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.kernel_basis().len(), 7);
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let id = dense_q(&[&[1, 0], &[0, 1]]);
        let b = vec![q(3), qr(1, 2)];
        assert_eq!(id.solve(&b).unwrap().unwrap(), b);
        let z = SparseMatrix::<Q>::zero(2, 3);
        assert_eq!(z.solve(&[q(1), q(0)]).unwrap(), None);
        assert!(z.solve(&[q(0), q(0)]).unwrap().is_some());
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = dense_q(&[&[1, 2, 3], &[2, 4, 6], &[1, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 1);
        for v in &ker {
            assert!(m.mul_vec(v).unwrap().iter().all(Field::is_zero));
        }
    }

    #[test]
    fn transpose_shape_and_entries() {
        let m = dense_q(&[&[1, 0, 5], &[0, -2, 0]]);
        let t = m.transpose();
        assert_eq!((t.rows(), t.cols()), (3, 2));
        assert_eq!(t.get(2, 0), q(5));
        assert_eq!(t.get(1, 1), q(-2));
        assert_eq!(m.rank(), t.rank());
    }

    #[test]
    fn duplicate_triples_are_summed() {
        let m =
            SparseMatrix::from_triples(2, 2, vec![(0, 0, q(2)), (0, 0, q(-2)), (1, 1, q(5))])
                .unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), q(0));
    }

    #[test]
    fn out_of_range_is_rejected() {
        let e = SparseMatrix::from_triples(2, 2, vec![(2, 0, q(1))]).unwrap_err();
        assert!(matches!(e, LinalgError::IndexOutOfRange { row: 2, .. }));
    }

    #[test]
    fn budget_is_enforced_when_set() {
        // Run both cases in one test to avoid env races across parallel tests.
        std::env::set_var(MEM_LIMIT_VAR, "1024");
        assert!(ensure_budget(4).is_ok());
        let e = ensure_budget(1_000_000).unwrap_err();
        assert!(matches!(e, LinalgError::ResourceLimit { .. }));
        std::env::remove_var(MEM_LIMIT_VAR);
        assert!(ensure_budget(usize::MAX / 128).is_ok());
    }

    #[test]
    fn bareiss_matches_known_ranks() {
        let m = vec![
            vec![q(1), q(2), q(3)],
            vec![q(2), q(4), q(6)],
            vec![qr(1, 2), q(1), q(0)],
        ];
        assert_eq!(bareiss_rank(&m), 2);
        assert_eq!(bareiss_rank(&[]), 0);
    }

    /// Strategy: sparse rational matrices up to 8x8 with small entries.
    fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<(usize, usize, i64, i64)>)> {
        (1usize..8, 1usize..8).prop_flat_map(|(r, c)| {
            let entry = (0..r, 0..c, -9i64..10, 1i64..5);
            (Just(r), Just(c), proptest::collection::vec(entry, 0..24))
        })
    }

    fn build(r: usize, c: usize, entries: &[(usize, usize, i64, i64)]) -> SparseMatrix<Q> {
        SparseMatrix::from_triples(
            r,
            c,
            entries.iter().map(|&(i, j, n, d)| (i, j, qr(n, d))),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn rank_bounds_and_transpose_invariance((r, c, es) in small_matrix()) {
            let m = build(r, c, &es);
            let rank = m.rank();
            prop_assert!(rank <= r.min(c));
            prop_assert_eq!(rank, m.transpose().rank());
        }

        #[test]
        fn rank_nullity_and_kernel_exactness((r, c, es) in small_matrix()) {
            let m = build(r, c, &es);
            let ker = m.kernel_basis();
            prop_assert_eq!(m.rank() + ker.len(), c);
            for v in &ker {
                let y = m.mul_vec(v).unwrap();
                prop_assert!(y.iter().all(Field::is_zero));
            }
        }

        #[test]
        fn sparse_rank_agrees_with_bareiss((r, c, es) in small_matrix()) {
            let m = build(r, c, &es);
            let dense: Vec<Vec<Q>> = (0..r)
                .map(|i| (0..c).map(|j| m.get(i, j)).collect())
                .collect();
            prop_assert_eq!(m.rank(), bareiss_rank(&dense));
        }

        #[test]
        fn fp_rank_never_exceeds_rational_rank((r, c, es) in small_matrix()) {
            // Integer matrices reduce mod p; the mod-p rank can only drop.
            let m = build(r, c, &es);
            let mp = SparseMatrix::from_triples(
                r,
                c,
                es.iter().map(|&(i, j, n, d)| {
                    let fd = F32003::new(d);
                    (i, j, Field::mul(&F32003::new(n), &fd.inv().unwrap()))
                }),
            )
            .unwrap();
            prop_assert!(mp.rank() <= m.rank());
        }

        #[test]
        fn solve_recovers_constructed_systems(
            (r, c, es) in small_matrix(),
            xs in proptest::collection::vec(-5i64..6, 0..8),
        ) {
            let m = build(r, c, &es);
            let x0: Vec<Q> = (0..c).map(|j| q(xs.get(j).copied().unwrap_or(1))).collect();
            let b = m.mul_vec(&x0).unwrap();
            let x = m.solve(&b).unwrap().expect("constructed system is consistent");
            prop_assert_eq!(m.mul_vec(&x).unwrap(), b);
        }

        #[test]
        fn unsolvable_means_rank_jump((r, c, es) in small_matrix(), bs in proptest::collection::vec(-5i64..6, 1..8)) {
            let m = build(r, c, &es);
            let b: Vec<Q> = (0..r).map(|i| q(bs.get(i).copied().unwrap_or(0))).collect();
            if m.solve(&b).unwrap().is_none() {
                // Augment and compare ranks.
                let mut triples: Vec<(usize, usize, Q)> = Vec::new();
                for j in 0..c {
                    for (i, v) in m.column(j) {
                        triples.push((*i, j, v.clone()));
                    }
                }
                for (i, v) in b.iter().enumerate() {
                    triples.push((i, c, v.clone()));
                }
                let aug = SparseMatrix::from_triples(r, c + 1, triples).unwrap();
                prop_assert_eq!(aug.rank(), m.rank() + 1);
            }
        }
    }
}
