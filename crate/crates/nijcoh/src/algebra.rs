//! Data model and axiom checkers for Nijenhuis algebras, bimodules,
//! morphisms, and φ-bimodules, together with the deformed product, triangle
//! actions, and restriction along a morphism.
//!
//! Conventions:
//!
//! - structure constants: `e_i · e_j = Σ_k mul[i][j][k] e_k`;
//! - operators are row-major matrices acting on coordinate columns, so
//!   `P(e_j) = Σ_i op[i][j] e_i`;
//! - the deformed product is `x ·_P y = P(x)·y + x·P(y) − P(x·y)`;
//! - triangle actions are `x ⊳ m = P_A(x)·m + x·P_M(m) − P_M(x·m)` and its
//!   mirror `m ⊲ x = m·P_A(x) + P_M(m)·x − P_M(m·x)`.
//!
//! Checkers never assume unitality: a designated unit vector is optional
//! metadata (validated separately by [`Algebra::unit_defects`]) and is used
//! only by the mapping-ring constructions in [`crate::cct`].

use thiserror::Error;

use crate::dense;
use crate::field::Field;

/// Number of failing tuples a defect report keeps before truncating.
pub const DEFECT_CAP: usize = 16;

/// One failing law instance: which law, at which basis tuple, with the exact
/// residual vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect<F: Field> {
    pub law: &'static str,
    pub indices: Vec<usize>,
    pub residual: Vec<F>,
}

/// Outcome of an axiom check: the number of law instances evaluated and the
/// first [`DEFECT_CAP`] failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport<F: Field> {
    pub checked: usize,
    pub defects: Vec<Defect<F>>,
    /// True when failures beyond the cap were dropped.
    pub truncated: bool,
}

impl<F: Field> CheckReport<F> {
    pub fn new() -> Self {
        CheckReport {
            checked: 0,
            defects: Vec::new(),
            truncated: false,
        }
    }

    /// Record one evaluated law instance.
    pub fn observe(&mut self, law: &'static str, indices: &[usize], residual: Vec<F>) {
        self.checked += 1;
        if dense::is_zero(&residual) {
            return;
        }
        if self.defects.len() < DEFECT_CAP {
            self.defects.push(Defect {
                law,
                indices: indices.to_vec(),
                residual,
            });
        } else {
            self.truncated = true;
        }
    }

    /// True when every evaluated law held exactly.
    pub fn passed(&self) -> bool {
        self.defects.is_empty()
    }

    /// Merge another report into this one (law sets are disjoint by
    /// construction, so concatenation is faithful).
    pub fn absorb(&mut self, other: CheckReport<F>) {
        self.checked += other.checked;
        self.truncated |= other.truncated;
        for d in other.defects {
            if self.defects.len() < DEFECT_CAP {
                self.defects.push(d);
            } else {
                self.truncated = true;
            }
        }
    }
}

impl<F: Field> Default for CheckReport<F> {
    fn default() -> Self {
        Self::new()
    }
}

/// Shape errors raised by the typed constructors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShapeError {
    #[error("{what} has {got} coefficients, expected {expected}")]
    BadLength {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("dimension mismatch: {what} expects {expected}, got {got}")]
    DimMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
}

fn expect_len<F: Field>(
    what: &'static str,
    v: &[F],
    expected: usize,
) -> Result<(), ShapeError> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(ShapeError::BadLength {
            what,
            got: v.len(),
            expected,
        })
    }
}

/// A finite-dimensional algebra with a distinguished linear operator and an
/// optional designated unit vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra<F: Field> {
    dim: usize,
    mul: Vec<F>,
    op: Vec<F>,
    unit: Option<Vec<F>>,
}

impl<F: Field> Algebra<F> {
    /// Build from a `dim³` multiplication tensor and a `dim²` operator matrix.
    pub fn new(dim: usize, mul: Vec<F>, op: Vec<F>) -> Result<Self, ShapeError> {
        expect_len("multiplication tensor", &mul, dim * dim * dim)?;
        expect_len("operator matrix", &op, dim * dim)?;
        Ok(Algebra {
            dim,
            mul,
            op,
            unit: None,
        })
    }

    /// Attach a designated unit vector (metadata; see [`Algebra::unit_defects`]).
    pub fn with_unit(mut self, unit: Vec<F>) -> Result<Self, ShapeError> {
        expect_len("unit vector", &unit, self.dim)?;
        self.unit = Some(unit);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mul_tensor(&self) -> &[F] {
        &self.mul
    }

    pub fn op_matrix(&self) -> &[F] {
        &self.op
    }

    pub fn unit(&self) -> Option<&[F]> {
        self.unit.as_deref()
    }

    /// Structure-constant slice of `e_i · e_j`.
    pub fn mul_basis(&self, i: usize, j: usize) -> &[F] {
        let d = self.dim;
        &self.mul[(i * d + j) * d..(i * d + j + 1) * d]
    }

    /// Product of two coordinate vectors.
    pub fn mul_vec(&self, x: &[F], y: &[F]) -> Vec<F> {
        let d = self.dim;
        let mut out = vec![F::zero(); d];
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() {
                    continue;
                }
                let c = x[i].mul(&y[j]);
                for (k, s) in self.mul_basis(i, j).iter().enumerate() {
                    out[k].add_mul(&c, s);
                }
            }
        }
        out
    }

    /// Apply the operator `P`.
    pub fn op_apply(&self, x: &[F]) -> Vec<F> {
        dense::apply(&self.op, self.dim, self.dim, x)
    }

    /// The deformed algebra `A_P`: same space and operator, product `·_P`.
    ///
    /// Any designated unit is dropped: `·_P` is generally non-unital.
    pub fn deformed(&self) -> Algebra<F> {
        let d = self.dim;
        let mut mul = vec![F::zero(); d * d * d];
        for i in 0..d {
            let pi = self.op_apply(&dense::basis(d, i));
            for j in 0..d {
                let pj = self.op_apply(&dense::basis(d, j));
                let a = self.mul_vec(&pi, &dense::basis(d, j));
                let b = self.mul_vec(&dense::basis(d, i), &pj);
                let c = self.op_apply(self.mul_basis(i, j));
                let v = dense::sub(&dense::add(&a, &b), &c);
                mul[(i * d + j) * d..(i * d + j + 1) * d].clone_from_slice(&v);
            }
        }
        Algebra {
            dim: d,
            mul,
            op: self.op.clone(),
            unit: None,
        }
    }

    /// Defects of the designated unit vector, if any is stored.
    pub fn unit_defects(&self) -> CheckReport<F> {
        let mut report = CheckReport::new();
        let Some(u) = &self.unit else {
            return report;
        };
        let d = self.dim;
        for i in 0..d {
            let e = dense::basis(d, i);
            report.observe("left-unit", &[i], dense::sub(&self.mul_vec(u, &e), &e));
            report.observe("right-unit", &[i], dense::sub(&self.mul_vec(&e, u), &e));
        }
        report
    }
}

/// Associativity on all basis triples.
pub fn check_associative<F: Field>(a: &Algebra<F>) -> CheckReport<F> {
    let d = a.dim;
    let mut report = CheckReport::new();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let lhs = a.mul_vec(a.mul_basis(i, j), &dense::basis(d, k));
                let rhs = a.mul_vec(&dense::basis(d, i), a.mul_basis(j, k));
                report.observe("associativity", &[i, j, k], dense::sub(&lhs, &rhs));
            }
        }
    }
    report
}

/// The operator identity `P(x)·P(y) = P(P(x)·y + x·P(y) − P(x·y))` on all
/// basis pairs.
pub fn check_nijenhuis_operator<F: Field>(a: &Algebra<F>) -> CheckReport<F> {
    let d = a.dim;
    let mut report = CheckReport::new();
    for i in 0..d {
        let ei = dense::basis(d, i);
        let pi = a.op_apply(&ei);
        for j in 0..d {
            let ej = dense::basis(d, j);
            let pj = a.op_apply(&ej);
            let lhs = a.mul_vec(&pi, &pj);
            let inner = dense::sub(
                &dense::add(&a.mul_vec(&pi, &ej), &a.mul_vec(&ei, &pj)),
                &a.op_apply(a.mul_basis(i, j)),
            );
            report.observe("nijenhuis", &[i, j], dense::sub(&lhs, &a.op_apply(&inner)));
        }
    }
    report
}

/// A bimodule over an algebra of dimension `alg_dim`, with its own operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bimodule<F: Field> {
    alg_dim: usize,
    dim: usize,
    left: Vec<F>,
    right: Vec<F>,
    op: Vec<F>,
}

impl<F: Field> Bimodule<F> {
    /// Build from action tensors `left[(i·dm + j)·dm + k]` for `e_i · v_j` and
    /// `right[(j·da + i)·dm + k]` for `v_j · e_i`, plus a `dm²` operator.
    pub fn new(
        alg_dim: usize,
        dim: usize,
        left: Vec<F>,
        right: Vec<F>,
        op: Vec<F>,
    ) -> Result<Self, ShapeError> {
        expect_len("left action tensor", &left, alg_dim * dim * dim)?;
        expect_len("right action tensor", &right, dim * alg_dim * dim)?;
        expect_len("module operator matrix", &op, dim * dim)?;
        Ok(Bimodule {
            alg_dim,
            dim,
            left,
            right,
            op,
        })
    }

    /// The regular bimodule: `M = A` with both actions the product and
    /// `P_M = P_A`.
    pub fn regular(a: &Algebra<F>) -> Bimodule<F> {
        let d = a.dim;
        Bimodule {
            alg_dim: d,
            dim: d,
            left: a.mul.clone(),
            right: a.mul.clone(),
            op: a.op.clone(),
        }
    }

    pub fn alg_dim(&self) -> usize {
        self.alg_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn op_matrix(&self) -> &[F] {
        &self.op
    }

    pub fn left_tensor(&self) -> &[F] {
        &self.left
    }

    pub fn right_tensor(&self) -> &[F] {
        &self.right
    }

    /// Action slice of `e_i · v_j`.
    pub fn left_basis(&self, i: usize, j: usize) -> &[F] {
        let dm = self.dim;
        &self.left[(i * dm + j) * dm..(i * dm + j + 1) * dm]
    }

    /// Action slice of `v_j · e_i`.
    pub fn right_basis(&self, j: usize, i: usize) -> &[F] {
        let dm = self.dim;
        let da = self.alg_dim;
        &self.right[(j * da + i) * dm..(j * da + i + 1) * dm]
    }

    /// `x · m` for coordinate vectors.
    pub fn left_act(&self, x: &[F], m: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim];
        for i in 0..self.alg_dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if m[j].is_zero() {
                    continue;
                }
                let c = x[i].mul(&m[j]);
                for (k, s) in self.left_basis(i, j).iter().enumerate() {
                    out[k].add_mul(&c, s);
                }
            }
        }
        out
    }

    /// `m · x` for coordinate vectors.
    pub fn right_act(&self, m: &[F], x: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim];
        for j in 0..self.dim {
            if m[j].is_zero() {
                continue;
            }
            for i in 0..self.alg_dim {
                if x[i].is_zero() {
                    continue;
                }
                let c = m[j].mul(&x[i]);
                for (k, s) in self.right_basis(j, i).iter().enumerate() {
                    out[k].add_mul(&c, s);
                }
            }
        }
        out
    }

    /// Apply the module operator `P_M`.
    pub fn op_apply(&self, m: &[F]) -> Vec<F> {
        dense::apply(&self.op, self.dim, self.dim, m)
    }

    /// The triangle bimodule `⊳M⊲` over the deformed algebra: actions
    /// `x ⊳ m` and `m ⊲ x`, same operator.
    pub fn triangle(&self, a: &Algebra<F>) -> Bimodule<F> {
        let da = self.alg_dim;
        let dm = self.dim;
        let mut left = vec![F::zero(); da * dm * dm];
        let mut right = vec![F::zero(); dm * da * dm];
        for i in 0..da {
            let ei = dense::basis(da, i);
            let pi = a.op_apply(&ei);
            for j in 0..dm {
                let mj = dense::basis(dm, j);
                let pmj = self.op_apply(&mj);
                let l = dense::sub(
                    &dense::add(&self.left_act(&pi, &mj), &self.left_act(&ei, &pmj)),
                    &self.op_apply(self.left_basis(i, j)),
                );
                left[(i * dm + j) * dm..(i * dm + j + 1) * dm].clone_from_slice(&l);
                let r = dense::sub(
                    &dense::add(&self.right_act(&mj, &pi), &self.right_act(&pmj, &ei)),
                    &self.op_apply(self.right_basis(j, i)),
                );
                right[(j * da + i) * dm..(j * da + i + 1) * dm].clone_from_slice(&r);
            }
        }
        Bimodule {
            alg_dim: da,
            dim: dm,
            left,
            right,
            op: self.op.clone(),
        }
    }
}

/// Associative bimodule laws plus the two operator-compatibility equations,
/// on all basis tuples.
pub fn check_nijenhuis_bimodule<F: Field>(a: &Algebra<F>, m: &Bimodule<F>) -> CheckReport<F> {
    let da = a.dim;
    let dm = m.dim;
    let mut report = CheckReport::new();
    assert_eq!(m.alg_dim, da, "bimodule is over an algebra of different dimension");
    for i in 0..da {
        let ei = dense::basis(da, i);
        for j in 0..da {
            let ej = dense::basis(da, j);
            for k in 0..dm {
                let vk = dense::basis(dm, k);
                // (e_i e_j)·v = e_i·(e_j v)
                let lhs = m.left_act(a.mul_basis(i, j), &vk);
                let rhs = m.left_act(&ei, m.left_basis(j, k));
                report.observe("bimodule-left", &[i, j, k], dense::sub(&lhs, &rhs));
                // (v e_i)·e_j = v·(e_i e_j)
                let lhs = m.right_act(m.right_basis(k, i), &ej);
                let rhs = m.right_act(&vk, a.mul_basis(i, j));
                report.observe("bimodule-right", &[k, i, j], dense::sub(&lhs, &rhs));
                // (e_i v)·e_j = e_i·(v e_j)
                let lhs = m.right_act(m.left_basis(i, k), &ej);
                let rhs = m.left_act(&ei, m.right_basis(k, j));
                report.observe("bimodule-mixed", &[i, k, j], dense::sub(&lhs, &rhs));
            }
        }
    }
    for i in 0..da {
        let ei = dense::basis(da, i);
        let pi = a.op_apply(&ei);
        for k in 0..dm {
            let vk = dense::basis(dm, k);
            let pk = m.op_apply(&vk);
            // P_A(x)·P_M(m) = P_M( P_A(x)·m + x·P_M(m) − P_M(x·m) )
            let lhs = m.left_act(&pi, &pk);
            let inner = dense::sub(
                &dense::add(&m.left_act(&pi, &vk), &m.left_act(&ei, &pk)),
                &m.op_apply(m.left_basis(i, k)),
            );
            report.observe("op-left", &[i, k], dense::sub(&lhs, &m.op_apply(&inner)));
            // P_M(m)·P_A(x) = P_M( m·P_A(x) + P_M(m)·x − P_M(m·x) )
            let lhs = m.right_act(&pk, &pi);
            let inner = dense::sub(
                &dense::add(&m.right_act(&vk, &pi), &m.right_act(&pk, &ei)),
                &m.op_apply(m.right_basis(k, i)),
            );
            report.observe("op-right", &[k, i], dense::sub(&lhs, &m.op_apply(&inner)));
        }
    }
    report
}

/// A linear map between the underlying spaces of two algebras, stored as a
/// `dst_dim × src_dim` row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism<F: Field> {
    src_dim: usize,
    dst_dim: usize,
    mat: Vec<F>,
}

impl<F: Field> Morphism<F> {
    pub fn new(src_dim: usize, dst_dim: usize, mat: Vec<F>) -> Result<Self, ShapeError> {
        expect_len("morphism matrix", &mat, src_dim * dst_dim)?;
        Ok(Morphism {
            src_dim,
            dst_dim,
            mat,
        })
    }

    pub fn identity(dim: usize) -> Morphism<F> {
        Morphism {
            src_dim: dim,
            dst_dim: dim,
            mat: dense::identity(dim),
        }
    }

    pub fn src_dim(&self) -> usize {
        self.src_dim
    }

    pub fn dst_dim(&self) -> usize {
        self.dst_dim
    }

    pub fn matrix(&self) -> &[F] {
        &self.mat
    }

    pub fn apply(&self, x: &[F]) -> Vec<F> {
        dense::apply(&self.mat, self.dst_dim, self.src_dim, x)
    }

    pub fn apply_basis(&self, i: usize) -> Vec<F> {
        (0..self.dst_dim)
            .map(|r| self.mat[r * self.src_dim + i].clone())
            .collect()
    }
}

/// Multiplicativity and operator-intertwining of a morphism.
///
/// Unitality is deliberately not tested; the theory does not require it and
/// the mapping-ring layer handles units on its own.
pub fn check_morphism<F: Field>(
    a: &Algebra<F>,
    b: &Algebra<F>,
    phi: &Morphism<F>,
) -> CheckReport<F> {
    let mut report = CheckReport::new();
    assert_eq!(phi.src_dim, a.dim, "morphism source dimension mismatch");
    assert_eq!(phi.dst_dim, b.dim, "morphism target dimension mismatch");
    for i in 0..a.dim {
        for j in 0..a.dim {
            let lhs = phi.apply(a.mul_basis(i, j));
            let rhs = b.mul_vec(&phi.apply_basis(i), &phi.apply_basis(j));
            report.observe("morphism-mult", &[i, j], dense::sub(&lhs, &rhs));
        }
    }
    for i in 0..a.dim {
        let lhs = phi.apply(&a.op_apply(&dense::basis(a.dim, i)));
        let rhs = b.op_apply(&phi.apply_basis(i));
        report.observe("morphism-operator", &[i], dense::sub(&lhs, &rhs));
    }
    report
}

/// Pull a bimodule over the target algebra back along a morphism:
/// `x · n := φ(x)·n`, `n · x := n·φ(x)`, operator unchanged.
pub fn restrict_along<F: Field>(phi: &Morphism<F>, n: &Bimodule<F>) -> Bimodule<F> {
    let da = phi.src_dim;
    let dn = n.dim;
    assert_eq!(phi.dst_dim, n.alg_dim, "restriction along a mismatched morphism");
    let mut left = vec![F::zero(); da * dn * dn];
    let mut right = vec![F::zero(); dn * da * dn];
    for i in 0..da {
        let fi = phi.apply_basis(i);
        for j in 0..dn {
            let vj = dense::basis(dn, j);
            left[(i * dn + j) * dn..(i * dn + j + 1) * dn]
                .clone_from_slice(&n.left_act(&fi, &vj));
            right[(j * da + i) * dn..(j * da + i + 1) * dn]
                .clone_from_slice(&n.right_act(&vj, &fi));
        }
    }
    Bimodule {
        alg_dim: da,
        dim: dn,
        left,
        right,
        op: n.op.clone(),
    }
}

/// A φ-bimodule: bimodules `M` over the source and `N` over the target of a
/// morphism, connected by a linear map `ψ: M → N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiBimodule<F: Field> {
    m: Bimodule<F>,
    n: Bimodule<F>,
    psi: Vec<F>,
}

impl<F: Field> PhiBimodule<F> {
    /// Build from the two bimodules and a `dim N × dim M` matrix for ψ.
    pub fn new(m: Bimodule<F>, n: Bimodule<F>, psi: Vec<F>) -> Result<Self, ShapeError> {
        expect_len("psi matrix", &psi, m.dim * n.dim)?;
        Ok(PhiBimodule { m, n, psi })
    }

    /// The regular φ-bimodule `⟨A, B, φ⟩` of a morphism.
    pub fn regular(a: &Algebra<F>, b: &Algebra<F>, phi: &Morphism<F>) -> PhiBimodule<F> {
        PhiBimodule {
            m: Bimodule::regular(a),
            n: Bimodule::regular(b),
            psi: phi.mat.clone(),
        }
    }

    pub fn m(&self) -> &Bimodule<F> {
        &self.m
    }

    pub fn n(&self) -> &Bimodule<F> {
        &self.n
    }

    pub fn psi_matrix(&self) -> &[F] {
        &self.psi
    }

    pub fn psi_apply(&self, v: &[F]) -> Vec<F> {
        dense::apply(&self.psi, self.n.dim, self.m.dim, v)
    }
}

/// ψ is an `A`-bimodule map into `N` restricted along φ, intertwines the
/// module operators, and also intertwines the triangle actions over the
/// deformed algebras.
pub fn check_phi_bimodule<F: Field>(
    a: &Algebra<F>,
    b: &Algebra<F>,
    phi: &Morphism<F>,
    pb: &PhiBimodule<F>,
) -> CheckReport<F> {
    let mut report = CheckReport::new();
    let da = a.dim;
    let dm = pb.m.dim;
    let nres = restrict_along(phi, &pb.n);
    let _ = b;
    for i in 0..da {
        for j in 0..dm {
            let vj = dense::basis(dm, j);
            let lhs = pb.psi_apply(pb.m.left_basis(i, j));
            let rhs = nres.left_act(&dense::basis(da, i), &pb.psi_apply(&vj));
            report.observe("psi-left", &[i, j], dense::sub(&lhs, &rhs));
            let lhs = pb.psi_apply(pb.m.right_basis(j, i));
            let rhs = nres.right_act(&pb.psi_apply(&vj), &dense::basis(da, i));
            report.observe("psi-right", &[j, i], dense::sub(&lhs, &rhs));
        }
    }
    for j in 0..dm {
        let vj = dense::basis(dm, j);
        let lhs = pb.psi_apply(&pb.m.op_apply(&vj));
        let rhs = pb.n.op_apply(&pb.psi_apply(&vj));
        report.observe("psi-operator", &[j], dense::sub(&lhs, &rhs));
    }
    // Triangle intertwining over the deformed data: ψ(x ⊳ m) = x ⊳ ψ(m) and
    // ψ(m ⊲ x) = ψ(m) ⊲ x.
    let tri_m = pb.m.triangle(a);
    let tri_nres = nres.triangle(a);
    for i in 0..da {
        let ei = dense::basis(da, i);
        for j in 0..dm {
            let vj = dense::basis(dm, j);
            let lhs = pb.psi_apply(tri_m.left_basis(i, j));
            let rhs = tri_nres.left_act(&ei, &pb.psi_apply(&vj));
            report.observe("psi-triangle-left", &[i, j], dense::sub(&lhs, &rhs));
            let lhs = pb.psi_apply(tri_m.right_basis(j, i));
            let rhs = tri_nres.right_act(&pb.psi_apply(&vj), &ei);
            report.observe("psi-triangle-right", &[j, i], dense::sub(&lhs, &rhs));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, Q};

    fn one_dim_idempotent() -> Algebra<Q> {
        // e·e = e, P = 0.
        Algebra::new(1, vec![q(1)], vec![q(0)])
            .unwrap()
            .with_unit(vec![q(1)])
            .unwrap()
    }

    #[test]
    fn one_dim_algebra_passes_checks() {
        let a = one_dim_idempotent();
        assert!(check_associative(&a).passed());
        assert!(check_nijenhuis_operator(&a).passed());
        assert!(a.unit_defects().passed());
    }

    #[test]
    fn perturbed_algebra_fails_with_localized_defect() {
        let mut mul = vec![q(0); 8];
        mul[0] = q(1); // e0 e0 = e0
        let a = Algebra::new(2, mul, vec![q(0); 4]).unwrap();
        assert!(check_associative(&a).passed());
        let mut bad = a.mul_tensor().to_vec();
        // e0 e1 = e0 breaks (e0 e1) e1 = e0 against e0 (e1 e1) = 0.
        bad[(0 * 2 + 1) * 2 + 0] = q(1);
        let a_bad = Algebra::new(2, bad, vec![q(0); 4]).unwrap();
        let report = check_associative(&a_bad);
        assert!(!report.passed());
        assert_eq!(report.defects[0].law, "associativity");
        assert!(report.defects.iter().any(|d| d.indices == vec![0, 1, 1]));
    }

    #[test]
    fn identity_and_zero_operators_are_nijenhuis() {
        let a = one_dim_idempotent();
        for lambda in [0i64, 1, 2, -3] {
            let op = vec![q(lambda)];
            let b = Algebra::new(1, vec![q(1)], op).unwrap();
            assert!(check_nijenhuis_operator(&b).passed(), "lambda = {lambda}");
        }
        let _ = a;
    }

    #[test]
    fn deformed_product_special_cases() {
        // P = identity: x ·_P y = xy; P = 0: zero product.
        let a = Algebra::new(1, vec![q(1)], vec![q(1)]).unwrap();
        assert_eq!(a.deformed().mul_tensor(), a.mul_tensor());
        let z = Algebra::new(1, vec![q(1)], vec![q(0)]).unwrap();
        assert!(dense::is_zero(z.deformed().mul_tensor()));
    }

    #[test]
    fn regular_bimodule_passes() {
        let a = one_dim_idempotent();
        let m = Bimodule::regular(&a);
        assert!(check_nijenhuis_bimodule(&a, &m).passed());
    }

    #[test]
    fn shape_errors_are_reported() {
        assert!(Algebra::new(2, vec![q(0); 7], vec![q(0); 4]).is_err());
        assert!(Algebra::new(2, vec![q(0); 8], vec![q(0); 3]).is_err());
        let a = one_dim_idempotent();
        assert!(a.clone().with_unit(vec![q(1), q(0)]).is_err());
    }
}
