//! Cochain complexes over an algebra with coefficients in a bimodule.
//!
//! Three complexes share the same underlying cochain spaces
//! `Cⁿ = Hom(A^⊗n, M)`:
//!
//! * the Hochschild complex with coboundary [`delta_alg`];
//! * the operator complex with coboundary [`delta_njo`], built from the
//!   auxiliary differential [`partial_p`] of the deformed structure;
//! * the combined complex on pairs `Cⁿ ⊕ Cⁿ⁻¹` with coboundary
//!   [`delta_nja`], the mapping cone (shifted by −1) of the chain map
//!   [`phi_map`].
//!
//! Every coboundary exists twice: as a pointwise evaluator on [`Cochain`]
//! values and as an assembled sparse matrix over the canonical basis
//! ([`delta_matrix`]). The canonical basis order is lexicographic on
//! (input tuple, output basis index) with the first tensor slot most
//! significant; assembled matrices and all fixture data use it.
//!
//! Evaluators are uncapped. Matrix assembly enforces a degree cap
//! (default 4, overridable through `NIJCOH_DEGREE_CAP`) and the shared
//! memory budget honoured by the linear algebra layer, because cochain-space
//! dimensions grow as `dim(A)ⁿ`.

use std::env;

use thiserror::Error;

use crate::algebra::{Algebra, Bimodule, ShapeError};
use crate::dense;
use crate::field::Field;
use crate::linalg::{ensure_budget, LinalgError, SparseMatrix};

/// Environment variable overriding the default matrix-assembly degree cap.
pub const DEGREE_CAP_VAR: &str = "NIJCOH_DEGREE_CAP";

/// Default highest cochain degree for which coboundary matrices are
/// assembled.
pub const DEFAULT_DEGREE_CAP: usize = 4;

/// The degree cap currently in force (environment override or default).
pub fn degree_cap() -> usize {
    env::var(DEGREE_CAP_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_DEGREE_CAP)
}

/// Errors from matrix assembly and cohomology computations.
#[derive(Debug, Error)]
pub enum CochainError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("cochain degree {requested} exceeds the assembly cap {cap}")]
    DegreeCap { requested: usize, cap: usize },
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Which of the three complexes a matrix-level operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Complex {
    /// Hochschild complex of the underlying algebra.
    Alg,
    /// Operator complex (coboundary [`delta_njo`]).
    NjO,
    /// Combined complex on pairs (coboundary [`delta_nja`]).
    NjA,
}

/// A multilinear map `A^⊗n → M`, stored as its value table on basis tuples.
///
/// `coeffs[t·dim_out + k]` is the `k`-th coordinate of the value on the
/// basis tuple with lexicographic index `t` (first slot most significant).
/// Arity 0 means a single element of `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain<F: Field> {
    arity: usize,
    dim_in: usize,
    dim_out: usize,
    coeffs: Vec<F>,
}

/// `dim_in^arity`, the number of basis tuples.
fn tuple_count(dim_in: usize, arity: usize) -> usize {
    dim_in.pow(arity as u32)
}

impl<F: Field> Cochain<F> {
    /// Builds a cochain from its full coefficient table.
    pub fn new(
        arity: usize,
        dim_in: usize,
        dim_out: usize,
        coeffs: Vec<F>,
    ) -> Result<Self, ShapeError> {
        let expected = tuple_count(dim_in, arity) * dim_out;
        if coeffs.len() != expected {
            return Err(ShapeError::BadLength {
                what: "cochain coefficient table",
                got: coeffs.len(),
                expected,
            });
        }
        Ok(Cochain {
            arity,
            dim_in,
            dim_out,
            coeffs,
        })
    }

    /// The zero cochain of the given shape.
    pub fn zero(arity: usize, dim_in: usize, dim_out: usize) -> Self {
        let len = tuple_count(dim_in, arity) * dim_out;
        Cochain {
            arity,
            dim_in,
            dim_out,
            coeffs: vec![F::zero(); len],
        }
    }

    /// The basis cochain with a single coefficient 1 at flat index `idx`.
    pub fn basis(arity: usize, dim_in: usize, dim_out: usize, idx: usize) -> Self {
        let mut c = Cochain::zero(arity, dim_in, dim_out);
        c.coeffs[idx] = F::one();
        c
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// The flat coefficient table, in canonical basis order.
    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Lexicographic index of a basis tuple (first slot most significant).
    fn tuple_index(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.arity);
        tuple.iter().fold(0, |acc, &x| acc * self.dim_in + x)
    }

    /// Value on a basis tuple, as a coefficient slice of length `dim_out`.
    pub fn value(&self, tuple: &[usize]) -> &[F] {
        let t = self.tuple_index(tuple);
        &self.coeffs[t * self.dim_out..(t + 1) * self.dim_out]
    }

    /// Value with one slot replaced by an `A`-vector, expanded by
    /// multilinearity: `Σ_k v[k] · self(tuple with slot = k)`.
    fn value_with_vector(&self, tuple: &mut [usize], slot: usize, v: &[F]) -> Vec<F> {
        let mut acc = vec![F::zero(); self.dim_out];
        let saved = tuple[slot];
        for (k, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            tuple[slot] = k;
            for (a, x) in acc.iter_mut().zip(self.value(tuple)) {
                a.add_mul(c, x);
            }
        }
        tuple[slot] = saved;
        acc
    }

    /// Pointwise sum (shapes must agree).
    pub fn add(&self, other: &Cochain<F>) -> Cochain<F> {
        assert_eq!(
            (self.arity, self.dim_in, self.dim_out),
            (other.arity, other.dim_in, other.dim_out),
            "cochain shape mismatch in add",
        );
        let coeffs = dense::add(&self.coeffs, &other.coeffs);
        Cochain { coeffs, ..*self }
    }

    /// Pointwise difference (shapes must agree).
    pub fn sub(&self, other: &Cochain<F>) -> Cochain<F> {
        assert_eq!(
            (self.arity, self.dim_in, self.dim_out),
            (other.arity, other.dim_in, other.dim_out),
            "cochain shape mismatch in sub",
        );
        let coeffs = dense::sub(&self.coeffs, &other.coeffs);
        Cochain { coeffs, ..*self }
    }

    /// Pointwise negation.
    pub fn neg(&self) -> Cochain<F> {
        let coeffs = dense::neg(&self.coeffs);
        Cochain { coeffs, ..*self }
    }

    pub fn is_zero(&self) -> bool {
        dense::is_zero(&self.coeffs)
    }

    /// Post-composition with a linear map `M → M` (row-major square matrix).
    pub fn post_compose(&self, mat: &[F]) -> Cochain<F> {
        assert_eq!(mat.len(), self.dim_out * self.dim_out);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for chunk in self.coeffs.chunks(self.dim_out) {
            coeffs.extend(dense::apply(mat, self.dim_out, self.dim_out, chunk));
        }
        Cochain { coeffs, ..*self }
    }

    /// Post-composition with a linear map into a *different* space: `mat` is
    /// row-major with `new_dim_out` rows and `dim_out` columns.
    pub fn map_values(&self, mat: &[F], new_dim_out: usize) -> Cochain<F> {
        assert_eq!(mat.len(), new_dim_out * self.dim_out);
        let mut coeffs = Vec::with_capacity(tuple_count(self.dim_in, self.arity) * new_dim_out);
        for chunk in self.coeffs.chunks(self.dim_out) {
            coeffs.extend(dense::apply(mat, new_dim_out, self.dim_out, chunk));
        }
        Cochain {
            arity: self.arity,
            dim_in: self.dim_in,
            dim_out: new_dim_out,
            coeffs,
        }
    }

    /// Pre-composition with a linear map in *every* input slot: for
    /// `mat: V → A` (row-major, `dim_in × new_dim_in`), returns the cochain
    /// on `V` sending `(x₁,…,xₙ)` to `self(mat x₁, …, mat xₙ)`.
    pub fn pre_compose_all(&self, mat: &[F], new_dim_in: usize) -> Cochain<F> {
        assert_eq!(mat.len(), self.dim_in * new_dim_in);
        let n = self.arity;
        let mut out = Cochain::zero(n, new_dim_in, self.dim_out);
        let mut xs = vec![0usize; n];
        let mut ys = vec![0usize; n];
        for t in 0..tuple_count(new_dim_in, n) {
            decode_tuple(t, new_dim_in, &mut xs);
            let mut acc = vec![F::zero(); self.dim_out];
            for s in 0..tuple_count(self.dim_in, n) {
                decode_tuple(s, self.dim_in, &mut ys);
                let mut weight = F::one();
                for (y, x) in ys.iter().zip(&xs) {
                    weight = weight.mul(&mat[y * new_dim_in + x]);
                    if weight.is_zero() {
                        break;
                    }
                }
                if weight.is_zero() {
                    continue;
                }
                for (a, v) in acc.iter_mut().zip(self.value(&ys)) {
                    a.add_mul(&weight, v);
                }
            }
            out.coeffs[t * self.dim_out..(t + 1) * self.dim_out].clone_from_slice(&acc);
        }
        out
    }

    /// Pre-composition with a linear map `A → A` in one input slot:
    /// the result sends `(…, x @ slot, …)` to `self(…, op(x) @ slot, …)`.
    pub fn pre_compose_at(&self, slot: usize, op: &[F]) -> Cochain<F> {
        assert!(slot < self.arity, "slot {slot} out of range");
        assert_eq!(op.len(), self.dim_in * self.dim_in);
        let mut out = Cochain::zero(self.arity, self.dim_in, self.dim_out);
        let mut tuple = vec![0usize; self.arity];
        for t in 0..tuple_count(self.dim_in, self.arity) {
            decode_tuple(t, self.dim_in, &mut tuple);
            let j = tuple[slot];
            // op(e_j) = Σ_i op[i·d + j] e_i, expanded by multilinearity.
            let column: Vec<F> = (0..self.dim_in)
                .map(|i| op[i * self.dim_in + j].clone())
                .collect();
            let v = self.value_with_vector(&mut tuple, slot, &column);
            out.coeffs[t * self.dim_out..(t + 1) * self.dim_out].clone_from_slice(&v);
        }
        out
    }
}

/// Writes the digits of `idx` in base `dim` into `buf`, most significant
/// digit first.
pub(crate) fn decode_tuple(mut idx: usize, dim: usize, buf: &mut [usize]) {
    for slot in buf.iter_mut().rev() {
        *slot = idx % dim;
        idx /= dim;
    }
}

fn check_shapes<F: Field>(a: &Algebra<F>, m: &Bimodule<F>, f: &Cochain<F>) {
    assert_eq!(m.alg_dim(), a.dim(), "bimodule is over a different algebra");
    assert_eq!(f.dim_in(), a.dim(), "cochain input dimension mismatch");
    assert_eq!(f.dim_out(), m.dim(), "cochain output dimension mismatch");
}

/// Hochschild coboundary:
///
/// ```text
/// (δf)(x₁,…,x_{n+1}) = x₁·f(x₂,…,x_{n+1})
///                    + Σ_{i=1}^{n} (−1)^i f(x₁,…,x_i x_{i+1},…,x_{n+1})
///                    + (−1)^{n+1} f(x₁,…,x_n)·x_{n+1}
/// ```
///
/// For arity 0 this is `m ↦ (x ↦ xm − mx)`.
pub fn delta_alg<F: Field>(a: &Algebra<F>, m: &Bimodule<F>, f: &Cochain<F>) -> Cochain<F> {
    check_shapes(a, m, f);
    let n = f.arity();
    let d = a.dim();
    let mut out = Cochain::zero(n + 1, d, m.dim());
    let mut tuple = vec![0usize; n + 1];
    let mut inner = vec![0usize; n];
    for t in 0..tuple_count(d, n + 1) {
        decode_tuple(t, d, &mut tuple);
        // x₁ · f(x₂,…)
        let mut acc = m.left_act(
            &basis_vec::<F>(d, tuple[0]),
            f.value(&tuple[1..]),
        );
        // inner contractions
        let mut sign_pos = false; // (−1)^i starting at i = 1
        for i in 0..n {
            sign_pos = !sign_pos;
            inner[..i].copy_from_slice(&tuple[..i]);
            inner[i..].copy_from_slice(&tuple[i + 1..]);
            let prod = a.mul_basis(tuple[i], tuple[i + 1]).to_vec();
            let v = f.value_with_vector(&mut inner, i, &prod);
            accumulate(&mut acc, &v, !sign_pos);
        }
        // (−1)^{n+1} f(…)·x_{n+1}
        let tail = m.right_act(
            f.value(&tuple[..n]),
            &basis_vec::<F>(d, tuple[n]),
        );
        accumulate(&mut acc, &tail, n % 2 == 1);
        out.coeffs[t * m.dim()..(t + 1) * m.dim()].clone_from_slice(&acc);
    }
    out
}

/// Adds `v` (or `−v` when `positive` is false) into `acc`.
fn accumulate<F: Field>(acc: &mut [F], v: &[F], positive: bool) {
    for (a, x) in acc.iter_mut().zip(v) {
        if positive {
            *a = a.add(x);
        } else {
            *a = a.sub(x);
        }
    }
}

fn basis_vec<F: Field>(dim: usize, i: usize) -> Vec<F> {
    dense::basis(dim, i)
}

/// The auxiliary coboundary `∂`: the Hochschild coboundary of the deformed
/// algebra with its induced coefficient actions,
///
/// ```text
/// (∂f)(x₁,…,x_{n+1}) = x₁ ⊳ f(x₂,…)
///                    + Σ (−1)^i f(…, x_i ·_P x_{i+1}, …)
///                    + (−1)^{n+1} f(…) ⊲ x_{n+1}
/// ```
///
/// where `x ·_P y = P(x)y + xP(y) − P(xy)`, `x ⊳ m = P(x)m + xP_M(m) −
/// P_M(xm)` and `m ⊲ x = mP(x) + P_M(m)x − P_M(mx)`. The three ingredient
/// operations are expanded inline here, deliberately *not* routed through
/// the deformed-algebra and induced-bimodule constructors, so that the
/// agreement of the two code paths is a meaningful test.
pub fn partial_p<F: Field>(a: &Algebra<F>, m: &Bimodule<F>, f: &Cochain<F>) -> Cochain<F> {
    check_shapes(a, m, f);
    let n = f.arity();
    let d = a.dim();
    let mut out = Cochain::zero(n + 1, d, m.dim());
    let mut tuple = vec![0usize; n + 1];
    let mut inner = vec![0usize; n];
    for t in 0..tuple_count(d, n + 1) {
        decode_tuple(t, d, &mut tuple);
        let mut acc = left_triangle(a, m, tuple[0], f.value(&tuple[1..]));
        let mut sign_pos = false;
        for i in 0..n {
            sign_pos = !sign_pos;
            inner[..i].copy_from_slice(&tuple[..i]);
            inner[i..].copy_from_slice(&tuple[i + 1..]);
            let prod = deformed_product(a, tuple[i], tuple[i + 1]);
            let v = f.value_with_vector(&mut inner, i, &prod);
            accumulate(&mut acc, &v, !sign_pos);
        }
        let tail = right_triangle(a, m, f.value(&tuple[..n]), tuple[n]);
        accumulate(&mut acc, &tail, n % 2 == 1);
        out.coeffs[t * m.dim()..(t + 1) * m.dim()].clone_from_slice(&acc);
    }
    out
}

/// `e_i ·_P e_j = P(e_i)e_j + e_i P(e_j) − P(e_i e_j)`, expanded inline.
fn deformed_product<F: Field>(a: &Algebra<F>, i: usize, j: usize) -> Vec<F> {
    let d = a.dim();
    let pi = a.op_apply(&basis_vec::<F>(d, i));
    let pj = a.op_apply(&basis_vec::<F>(d, j));
    let mut acc = a.mul_vec(&pi, &basis_vec::<F>(d, j));
    let second = a.mul_vec(&basis_vec::<F>(d, i), &pj);
    accumulate(&mut acc, &second, true);
    let third = a.op_apply(a.mul_basis(i, j));
    accumulate(&mut acc, &third, false);
    acc
}

/// `e_i ⊳ v = P(e_i)v + e_i P_M(v) − P_M(e_i v)`, expanded inline.
fn left_triangle<F: Field>(a: &Algebra<F>, m: &Bimodule<F>, i: usize, v: &[F]) -> Vec<F> {
    let d = a.dim();
    let ei = basis_vec::<F>(d, i);
    let mut acc = m.left_act(&a.op_apply(&ei), v);
    accumulate(&mut acc, &m.left_act(&ei, &m.op_apply(v)), true);
    accumulate(&mut acc, &m.op_apply(&m.left_act(&ei, v)), false);
    acc
}

/// `v ⊲ e_i = vP(e_i) + P_M(v)e_i − P_M(v e_i)`, expanded inline.
fn right_triangle<F: Field>(a: &Algebra<F>, m: &Bimodule<F>, v: &[F], i: usize) -> Vec<F> {
    let d = a.dim();
    let ei = basis_vec::<F>(d, i);
    let mut acc = m.right_act(v, &a.op_apply(&ei));
    accumulate(&mut acc, &m.right_act(&m.op_apply(v), &ei), true);
    accumulate(&mut acc, &m.op_apply(&m.right_act(v, &ei)), false);
    acc
}

/// Coboundary of the operator complex:
///
/// ```text
/// δ_NjO(f) = ∂(f) − δ_Alg(P_M ∘ f).
/// ```
///
/// This combination squares to zero and makes [`phi_map`] a chain map; both
/// identities are enforced by the sign-audit tests.
pub fn delta_njo<F: Field>(a: &Algebra<F>, m: &Bimodule<F>, f: &Cochain<F>) -> Cochain<F> {
    let first = partial_p(a, m, f);
    let second = delta_alg(a, m, &f.post_compose(m.op_matrix()));
    first.sub(&second)
}

/// The comparison chain map `Φⁿ: (Cⁿ, δ_Alg) → (Cⁿ, δ_NjO)`:
///
/// ```text
/// Φⁿ(f)(x₁,…,xₙ) = Σ_{k=0}^{n} Σ_{|S|=k} (−1)^{n−k} P_M^{n−k} ( f(x with P at S) )
/// ```
///
/// summing over subsets `S ⊆ {1,…,n}`, applying `P` in the slots of `S` and
/// post-composing with `P_M^{n−|S|}`. `Φ⁰ = id` and `Φ¹(f) = f∘P − P_M∘f`.
pub fn phi_map<F: Field>(a: &Algebra<F>, m: &Bimodule<F>, f: &Cochain<F>) -> Cochain<F> {
    check_shapes(a, m, f);
    let n = f.arity();
    let mut total = Cochain::zero(n, a.dim(), m.dim());
    // Powers of P_M up to n.
    let mut pm_powers: Vec<Vec<F>> = Vec::with_capacity(n + 1);
    pm_powers.push(dense::identity(m.dim()));
    for _ in 0..n {
        let last = pm_powers.last().unwrap();
        pm_powers.push(dense::mat_mul(
            last,
            m.op_matrix(),
            m.dim(),
            m.dim(),
            m.dim(),
        ));
    }
    for mask in 0usize..(1 << n) {
        let k = mask.count_ones() as usize;
        let mut term = f.clone();
        for slot in 0..n {
            if mask & (1 << slot) != 0 {
                term = term.pre_compose_at(slot, a.op_matrix());
            }
        }
        term = term.post_compose(&pm_powers[n - k]);
        if (n - k) % 2 == 0 {
            total = total.add(&term);
        } else {
            total = total.sub(&term);
        }
    }
    total
}

/// A degree-`n` element of the combined complex: a pair of an arity-`n`
/// cochain and an arity-`(n−1)` cochain; the second component is absent in
/// degree 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainPairNjA<F: Field> {
    pub top: Cochain<F>,
    pub bot: Option<Cochain<F>>,
}

impl<F: Field> CochainPairNjA<F> {
    /// Builds a pair, enforcing the arity offset.
    pub fn new(top: Cochain<F>, bot: Option<Cochain<F>>) -> Result<Self, ShapeError> {
        match (&bot, top.arity()) {
            (None, 0) => {}
            (None, n) => {
                return Err(ShapeError::DimMismatch {
                    what: "combined-complex pair (missing second component)",
                    got: 0,
                    expected: n,
                })
            }
            (Some(b), n) => {
                if n == 0 || b.arity() != n - 1 {
                    return Err(ShapeError::DimMismatch {
                        what: "combined-complex pair arity offset",
                        got: b.arity(),
                        expected: n.saturating_sub(1),
                    });
                }
            }
        }
        Ok(CochainPairNjA { top, bot })
    }

    /// Degree of the pair = arity of the top component.
    pub fn degree(&self) -> usize {
        self.top.arity()
    }

    pub fn is_zero(&self) -> bool {
        self.top.is_zero() && self.bot.as_ref().map_or(true, Cochain::is_zero)
    }

    /// The zero pair of the given degree.
    pub fn zero(degree: usize, dim_in: usize, dim_out: usize) -> Self {
        let bot = (degree > 0).then(|| Cochain::zero(degree - 1, dim_in, dim_out));
        CochainPairNjA {
            top: Cochain::zero(degree, dim_in, dim_out),
            bot,
        }
    }
}

/// Coboundary of the combined complex:
///
/// ```text
/// δ_NjA(f, g) = ( δ_Alg(f), −δ_NjO(g) − Φⁿ(f) )
/// ```
///
/// with an absent `g` (degree 0) treated as zero; since `Φ⁰ = id`, degree 0
/// reads `δ_NjA(m) = (δ_Alg(m), −m)`.
pub fn delta_nja<F: Field>(
    a: &Algebra<F>,
    m: &Bimodule<F>,
    p: &CochainPairNjA<F>,
) -> CochainPairNjA<F> {
    let top = delta_alg(a, m, &p.top);
    let mut bot = phi_map(a, m, &p.top).neg();
    if let Some(g) = &p.bot {
        bot = bot.sub(&delta_njo(a, m, g));
    }
    CochainPairNjA {
        top,
        bot: Some(bot),
    }
}

/// Dimension of the degree-`n` cochain space of `complex`.
pub fn space_dim<F: Field>(complex: Complex, a: &Algebra<F>, m: &Bimodule<F>, n: usize) -> usize {
    let base = tuple_count(a.dim(), n) * m.dim();
    match complex {
        Complex::Alg | Complex::NjO => base,
        Complex::NjA => {
            if n == 0 {
                base
            } else {
                base + tuple_count(a.dim(), n - 1) * m.dim()
            }
        }
    }
}

fn check_degree(n: usize) -> Result<(), CochainError> {
    let cap = degree_cap();
    if n > cap {
        Err(CochainError::DegreeCap { requested: n, cap })
    } else {
        Ok(())
    }
}

/// Flattens a pair into the canonical coordinate vector (top block first).
fn flatten_pair<F: Field>(p: &CochainPairNjA<F>) -> Vec<F> {
    let mut v = p.top.coeffs().to_vec();
    if let Some(b) = &p.bot {
        v.extend_from_slice(b.coeffs());
    }
    v
}

/// Applies the coboundary of `complex` to the flat coordinate vector of a
/// degree-`n` element, returning flat degree-`(n+1)` coordinates.
fn apply_delta_flat<F: Field>(
    complex: Complex,
    a: &Algebra<F>,
    m: &Bimodule<F>,
    n: usize,
    coords: &[F],
) -> Vec<F> {
    match complex {
        Complex::Alg => {
            let f = Cochain::new(n, a.dim(), m.dim(), coords.to_vec()).unwrap();
            delta_alg(a, m, &f).coeffs().to_vec()
        }
        Complex::NjO => {
            let f = Cochain::new(n, a.dim(), m.dim(), coords.to_vec()).unwrap();
            delta_njo(a, m, &f).coeffs().to_vec()
        }
        Complex::NjA => {
            let top_len = tuple_count(a.dim(), n) * m.dim();
            let top = Cochain::new(n, a.dim(), m.dim(), coords[..top_len].to_vec()).unwrap();
            let bot = (n > 0).then(|| {
                Cochain::new(n - 1, a.dim(), m.dim(), coords[top_len..].to_vec()).unwrap()
            });
            let p = CochainPairNjA { top, bot };
            flatten_pair(&delta_nja(a, m, &p))
        }
    }
}

/// Assembles the degree-`n` coboundary matrix of `complex` over the
/// canonical basis: column `j` is the flattened image of basis element `j`.
///
/// Fails with [`CochainError::DegreeCap`] above the configured cap and with
/// a resource-limit error when the estimated size exceeds the shared memory
/// budget.
pub fn delta_matrix<F: Field>(
    complex: Complex,
    a: &Algebra<F>,
    m: &Bimodule<F>,
    n: usize,
) -> Result<SparseMatrix<F>, CochainError> {
    check_degree(n)?;
    let cols = space_dim(complex, a, m, n);
    let rows = space_dim(complex, a, m, n + 1);
    ensure_budget(rows.saturating_mul(cols))?;
    let columns = assemble_columns(cols, |j| {
        let mut coords = vec![F::zero(); cols];
        coords[j] = F::one();
        apply_delta_flat(complex, a, m, n, &coords)
    });
    let mut triples = Vec::new();
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            if !v.is_zero() {
                triples.push((i, j, v));
            }
        }
    }
    Ok(SparseMatrix::from_triples(rows, cols, triples)?)
}

/// Evaluates `make_column` for every column index, fanning out over threads
/// for larger assemblies. Columns only read shared immutable data, so the
/// split is safe; results are returned in column order either way.
pub(crate) fn assemble_columns<F, G>(cols: usize, make_column: G) -> Vec<Vec<F>>
where
    F: Field,
    G: Fn(usize) -> Vec<F> + Sync,
{
    const PARALLEL_THRESHOLD: usize = 64;
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    if cols < PARALLEL_THRESHOLD || workers < 2 {
        return (0..cols).map(make_column).collect();
    }
    let chunk = cols.div_ceil(workers);
    let mut out: Vec<Vec<F>> = Vec::with_capacity(cols);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cols)
            .step_by(chunk)
            .map(|start| {
                let end = (start + chunk).min(cols);
                let make_column = &make_column;
                scope.spawn(move || (start..end).map(make_column).collect::<Vec<_>>())
            })
            .collect();
        for h in handles {
            out.extend(h.join().expect("column assembly worker panicked"));
        }
    });
    out
}

/// `dim ker δⁿ − rank δⁿ⁻¹` for the requested complex; degree 0 returns
/// `dim ker δ⁰`.
pub fn cohomology_dim<F: Field>(
    complex: Complex,
    a: &Algebra<F>,
    m: &Bimodule<F>,
    n: usize,
) -> Result<usize, CochainError> {
    let dn = delta_matrix(complex, a, m, n)?;
    let kernel = space_dim(complex, a, m, n) - dn.rank();
    if n == 0 {
        return Ok(kernel);
    }
    let dprev = delta_matrix(complex, a, m, n - 1)?;
    Ok(kernel - dprev.rank())
}
