//! Shared concrete instances: a two-parameter 3-dimensional family with a
//! diagonal operator, a 2-dimensional companion algebra, the morphism between
//! them, upper-triangular 2×2 matrices, and truncated polynomial rings.
//!
//! These power the seeded property-test corpus (dimension ≤ 3, all
//! axiom-checked) and the shipped workspace fixtures. The corpus deliberately
//! mixes averaging operators (multiplication by a central element) with
//! genuinely non-averaging ones (diagonal operators on the upper-triangular
//! algebra): several sign conventions in the cochain layer coincide on
//! averaging operators only, so the non-averaging seeds are the ones that
//! keep the test suite honest.

use crate::algebra::{Algebra, Bimodule, Morphism, PhiBimodule};
use crate::deformation::{gauge_transform, GaugePair, TruncatedDeformation};
use crate::field::{q, qr, Q};
use crate::workspace::Workspace;

/// The 3-dimensional family `A(α,β)`:
///
/// ```text
/// e₁e₁ = αe₁   e₁e₂ = e₂e₁ = αe₂   e₁e₃ = e₃e₁ = βe₃
/// e₂e₂ = αe₂   e₂e₃ = βe₃         e₃e₂ = e₃e₃ = 0
/// ```
///
/// with operator `P = diag(α, α, β)`. The family is associative exactly when
/// `β(α−β) = 0`; callers should stay on that locus. A unit (`e₁/α`) exists
/// when `α = β ≠ 0` and is attached in that case.
pub fn example_a(alpha: i64, beta: i64) -> Algebra<Q> {
    let d = 3;
    let mut mul = vec![q(0); d * d * d];
    let mut set = |i: usize, j: usize, k: usize, v: Q| {
        mul[(i * d + j) * d + k] = v;
    };
    set(0, 0, 0, q(alpha));
    set(0, 1, 1, q(alpha));
    set(1, 0, 1, q(alpha));
    set(0, 2, 2, q(beta));
    set(2, 0, 2, q(beta));
    set(1, 1, 1, q(alpha));
    set(1, 2, 2, q(beta));
    let mut op = vec![q(0); d * d];
    op[0] = q(alpha);
    op[4] = q(alpha);
    op[8] = q(beta);
    let a = Algebra::new(d, mul, op).unwrap();
    if alpha == beta && alpha != 0 {
        a.with_unit(vec![qr(1, alpha), q(0), q(0)]).unwrap()
    } else {
        a
    }
}

/// The 2-dimensional companion `B(γ)`:
///
/// ```text
/// f₁f₁ = f₁    f₁f₂ = f₂f₁ = f₂f₂ = f₂
/// ```
///
/// with `P(f₁) = γ(f₁ − f₂)`, `P(f₂) = 0`. Unital with unit `f₁` for every γ.
pub fn example_b(gamma: i64) -> Algebra<Q> {
    let d = 2;
    let mut mul = vec![q(0); d * d * d];
    mul[(0 * d + 0) * d + 0] = q(1);
    mul[(0 * d + 1) * d + 1] = q(1);
    mul[(1 * d + 0) * d + 1] = q(1);
    mul[(1 * d + 1) * d + 1] = q(1);
    let op = vec![q(gamma), q(0), q(-gamma), q(0)];
    Algebra::new(d, mul, op)
        .unwrap()
        .with_unit(vec![q(1), q(0)])
        .unwrap()
}

/// The morphism `φ: A(1,1) → B(1)` with `φ(e₁) = φ(e₂) = f₁ − f₂`,
/// `φ(e₃) = 0`. Multiplicative and operator-intertwining (not unital).
pub fn example_phi() -> Morphism<Q> {
    Morphism::new(3, 2, vec![q(1), q(1), q(0), q(-1), q(-1), q(0)]).unwrap()
}

/// The full worked fixture: `A(1,1)`, `B(1)`, φ, and the regular φ-bimodule
/// `⟨A, B, φ⟩` (with ψ = φ).
pub fn example_fixture() -> (Algebra<Q>, Algebra<Q>, Morphism<Q>, PhiBimodule<Q>) {
    let a = example_a(1, 1);
    let b = example_b(1);
    let phi = example_phi();
    let pb = PhiBimodule::regular(&a, &b, &phi);
    (a, b, phi, pb)
}

/// Upper-triangular 2×2 matrices over the ground field, basis
/// `(e₁₁, e₁₂, e₂₂)`, with operator `P = diag(p₀, p₁, p₂)`.
///
/// Every diagonal operator on this algebra satisfies the Nijenhuis identity,
/// and non-constant diagonals are *not* averaging operators — these are the
/// corpus seeds that distinguish otherwise-coincident sign conventions.
pub fn upper_triangular_2(p: [i64; 3]) -> Algebra<Q> {
    let d = 3;
    let mut mul = vec![q(0); d * d * d];
    let mut set = |i: usize, j: usize, k: usize| {
        mul[(i * d + j) * d + k] = q(1);
    };
    set(0, 0, 0); // e11 e11 = e11
    set(0, 1, 1); // e11 e12 = e12
    set(1, 2, 1); // e12 e22 = e12
    set(2, 2, 2); // e22 e22 = e22
    let mut op = vec![q(0); d * d];
    for (i, v) in p.iter().enumerate() {
        op[i * d + i] = q(*v);
    }
    Algebra::new(d, mul, op)
        .unwrap()
        .with_unit(vec![q(1), q(0), q(1)])
        .unwrap()
}

/// Operator choice for the truncated polynomial seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncOp {
    Zero,
    Identity,
    /// Multiplication by `x` (an averaging operator, hence Nijenhuis).
    MulX,
}

/// The truncated polynomial ring `k[x]/(x^dim)` with basis `1, x, …`.
pub fn truncated_polynomial(dim: usize, op: TruncOp) -> Algebra<Q> {
    let mut mul = vec![q(0); dim * dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            if i + j < dim {
                mul[(i * dim + j) * dim + (i + j)] = q(1);
            }
        }
    }
    let mut opm = vec![q(0); dim * dim];
    match op {
        TruncOp::Zero => {}
        TruncOp::Identity => {
            for i in 0..dim {
                opm[i * dim + i] = q(1);
            }
        }
        TruncOp::MulX => {
            for i in 0..dim - 1 {
                opm[(i + 1) * dim + i] = q(1);
            }
        }
    }
    let mut unit = vec![q(0); dim];
    unit[0] = q(1);
    Algebra::new(dim, mul, opm)
        .unwrap()
        .with_unit(unit)
        .unwrap()
}

/// The 1-dimensional fixture used by the mapping-ring comparisons: `e² = e`,
/// `P = 0`, `φ = id`, regular coefficients.
pub fn identity_fixture() -> (Algebra<Q>, Algebra<Q>, Morphism<Q>, PhiBimodule<Q>) {
    let a = Algebra::new(1, vec![q(1)], vec![q(0)])
        .unwrap()
        .with_unit(vec![q(1)])
        .unwrap();
    let b = a.clone();
    let phi = Morphism::identity(1);
    let pb = PhiBimodule::regular(&a, &b, &phi);
    (a, b, phi, pb)
}

/// The seeded corpus: 22 named Nijenhuis algebras of dimension ≤ 3, spanning
/// the `A(α,β)` associativity locus, the `B(γ)` family, upper-triangular
/// matrices with assorted diagonal operators, and truncated polynomial rings.
pub fn seed_corpus() -> Vec<(String, Algebra<Q>)> {
    let mut seeds = Vec::new();
    for (alpha, beta) in [(0, 0), (1, 0), (1, 1), (2, 0), (2, 2), (-1, 0), (-1, -1)] {
        seeds.push((format!("A({alpha},{beta})"), example_a(alpha, beta)));
    }
    for gamma in [0, 1, -1, 2] {
        seeds.push((format!("B({gamma})"), example_b(gamma)));
    }
    for p in [[0, 0, 0], [1, 1, 1], [1, 2, 3], [1, 1, 0], [0, 1, 1]] {
        seeds.push((format!("ut2{p:?}"), upper_triangular_2(p)));
    }
    for dim in [2usize, 3] {
        for (tag, op) in [
            ("0", TruncOp::Zero),
            ("id", TruncOp::Identity),
            ("x", TruncOp::MulX),
        ] {
            seeds.push((format!("k[x]/(x^{dim}),P={tag}"), truncated_polynomial(dim, op)));
        }
    }
    seeds
}

/// Unital seeds paired with their identity morphisms — inputs for the
/// mapping-ring construction suites.
pub fn unital_morphism_corpus() -> Vec<(String, Algebra<Q>, Algebra<Q>, Morphism<Q>)> {
    let mut out = Vec::new();
    for (name, a) in seed_corpus() {
        if a.unit().is_some() {
            let phi = Morphism::identity(a.dim());
            out.push((format!("id:{name}"), a.clone(), a, phi));
        }
    }
    let (a, b, phi, _) = example_fixture();
    out.push(("phi:A(1,1)->B(1)".to_string(), a, b, phi));
    out
}

/// A regular φ-bimodule for each entry of [`unital_morphism_corpus`].
pub fn phi_bimodule_corpus() -> Vec<(String, Algebra<Q>, Algebra<Q>, Morphism<Q>, PhiBimodule<Q>)> {
    unital_morphism_corpus()
        .into_iter()
        .map(|(name, a, b, phi)| {
            let pb = PhiBimodule::regular(&a, &b, &phi);
            (name, a, b, phi, pb)
        })
        .collect()
}

/// A bimodule test set for one algebra: the regular bimodule plus its
/// triangle version over the deformed algebra.
pub fn regular_and_triangle(a: &Algebra<Q>) -> Vec<(String, Algebra<Q>, Bimodule<Q>)> {
    let reg = Bimodule::regular(a);
    let tri = reg.triangle(a);
    vec![
        ("regular".to_string(), a.clone(), reg),
        ("triangle".to_string(), a.deformed(), tri),
    ]
}

/// The shipped example workspace: `A(1,1)`, `B(1)`, their regular bimodules,
/// the morphism φ with its regular φ-bimodule, and an order-2 deformation of
/// the triple obtained by gauge-transporting the trivial deformation along a
/// fixed nilpotent gauge pair — nontrivial-looking but trivializable, so it
/// exercises both `verify` and `trivialize` end to end.
pub fn example_workspace() -> Workspace {
    let (a, b, phi, _) = example_fixture();
    let mut ws = Workspace::new();
    ws.add_algebra("A", a.clone()).unwrap();
    ws.add_algebra("B", b.clone()).unwrap();
    ws.add_bimodule("A_reg", "A", Bimodule::regular(&a)).unwrap();
    ws.add_bimodule("B_reg", "B", Bimodule::regular(&b)).unwrap();
    ws.add_morphism("phi", "A", "B", phi.clone()).unwrap();
    ws.add_phi_bimodule("phi_reg", "phi", "A_reg", "B_reg", phi.matrix().to_vec())
        .unwrap();
    let e = |entries: &[(usize, usize)], d: usize| {
        let mut m = vec![q(0); d * d];
        for &(r, c) in entries {
            m[r * d + c] = q(1);
        }
        m
    };
    let gauge = GaugePair::new(
        3,
        2,
        vec![e(&[(0, 1)], 3), e(&[(1, 2)], 3)],
        vec![e(&[(0, 1)], 2), e(&[(1, 0)], 2)],
    )
    .unwrap();
    let wiggle = gauge_transform(&TruncatedDeformation::trivial(&a, &b, &phi, 2), &gauge);
    ws.add_deformation("gauge_order2", "phi", wiggle).unwrap();
    ws
}

/// The shipped one-dimensional workspace built from [`identity_fixture`]:
/// algebra `k`, its regular bimodule `k_reg`, the identity morphism `id`,
/// and the regular φ-bimodule `id_reg`.
pub fn identity_workspace() -> Workspace {
    let (a, _, phi, pb) = identity_fixture();
    let mut ws = Workspace::new();
    ws.add_algebra("k", a.clone()).unwrap();
    ws.add_bimodule("k_reg", "k", Bimodule::regular(&a)).unwrap();
    ws.add_morphism("id", "k", "k", phi).unwrap();
    ws.add_phi_bimodule("id_reg", "id", "k_reg", "k_reg", pb.psi_matrix().to_vec())
        .unwrap();
    ws
}
