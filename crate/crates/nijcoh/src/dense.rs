//! Small dense row-major matrix/vector helpers shared by the
//! structure-constant layer. These stay internal: sizes here are algebra
//! dimensions (single digits), so dense storage is the right tool.

use crate::field::Field;

/// `n × n` identity, row-major.
pub(crate) fn identity<F: Field>(n: usize) -> Vec<F> {
    let mut m = vec![F::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = F::one();
    }
    m
}

/// Apply a `rows × cols` matrix to a vector of length `cols`.
pub(crate) fn apply<F: Field>(mat: &[F], rows: usize, cols: usize, v: &[F]) -> Vec<F> {
    debug_assert_eq!(mat.len(), rows * cols);
    debug_assert_eq!(v.len(), cols);
    let mut out = vec![F::zero(); rows];
    for r in 0..rows {
        for c in 0..cols {
            out[r].add_mul(&mat[r * cols + c], &v[c]);
        }
    }
    out
}

/// Product of an `n × k` and a `k × m` matrix.
pub(crate) fn mat_mul<F: Field>(a: &[F], b: &[F], n: usize, k: usize, m: usize) -> Vec<F> {
    debug_assert_eq!(a.len(), n * k);
    debug_assert_eq!(b.len(), k * m);
    let mut out = vec![F::zero(); n * m];
    for i in 0..n {
        for l in 0..k {
            if a[i * k + l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i * m + j].add_mul(&a[i * k + l], &b[l * m + j]);
            }
        }
    }
    out
}

pub(crate) fn add<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub(crate) fn sub<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub(crate) fn neg<F: Field>(a: &[F]) -> Vec<F> {
    a.iter().map(|x| x.neg()).collect()
}

pub(crate) fn is_zero<F: Field>(a: &[F]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Standard basis vector `e_i` of length `n`.
pub(crate) fn basis<F: Field>(n: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[i] = F::one();
    v
}
