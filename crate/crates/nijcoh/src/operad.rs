//! The free graded nonsymmetric operad on generators `m_n` (arity n ≥ 2,
//! degree n−2) and `P_n` (arity n ≥ 1, degree n−1), the differential that
//! makes it a minimal model, and the evaluation of the two-colored relations
//! on concrete structure maps.
//!
//! Elements are integer combinations of planar tree monomials. The
//! differential is given on generators by [`d_m`] — the usual pattern
//!
//! ```text
//! ∂(m_n) = Σ_{j=2}^{n−1} Σ_{i=1}^{n−j+1} (−1)^{i+j(n−i)} m_{n−j+1} ∘_i m_j
//! ```
//!
//! — and by [`d_p`], a nested sum over compositions r₁+…+r_p = n (p ≥ 2), a
//! wrap depth t, insertion slots, and slot subsets, with an explicit sign
//! exponent (see [`d_p`]); it extends to tree monomials as a graded
//! derivation ([`extend_differential`]).
//!
//! Koszul signs follow a fixed planar left-to-right convention: grafting an
//! element of degree d at leaf i of a monomial costs (−1)^{d·e} where `e`
//! is the total degree of the vertices visited strictly after leaf i in
//! preorder. The convention is pinned by the `d_squared_*` suites (∂² = 0
//! for `m` up to arity 5 and `P` up to arity 3 in the default suites; the
//! mirrored right-to-left convention already fails for ∂²(m₅) and is
//! rejected by an arbitration test).
//!
//! [`check_colored_relations`] leaves the symbolic world: it evaluates the
//! quadratic relation shapes — associativity and the Nijenhuis relation in
//! each color, plus the two mixed relations `f∘₁μ_A − (μ_B∘₁f)∘₂f` and
//! `f∘₁P_A − P_B∘₁f` — on concrete structure constants, reporting defects
//! with basis indices.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::algebra::{Algebra, CheckReport, Morphism};
use crate::dense;
use crate::field::Field;

/// Default arity bound for ∂²-checks on `m` generators.
pub const DEFAULT_M_BOUND: usize = 4;
/// Default arity bound for ∂²-checks on `P` generators.
pub const DEFAULT_P_BOUND: usize = 3;

/// Errors from symbolic operad computations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperadError {
    #[error("m generators need arity ≥ 2, got {0}")]
    MArity(usize),
    #[error("P generators need arity ≥ 1, got {0}")]
    PArity(usize),
    #[error("leaf index {got} outside 1..={leaves}")]
    LeafRange { got: usize, leaves: usize },
    #[error("arity {requested} exceeds the configured {kind} bound {bound}")]
    ArityBound {
        kind: &'static str,
        requested: usize,
        bound: usize,
    },
}

/// Generator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    M,
    P,
}

/// A generator `m_n` or `P_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    kind: Kind,
    arity: usize,
}

impl Generator {
    /// The generator `m_n`, `n ≥ 2`.
    pub fn m(arity: usize) -> Result<Self, OperadError> {
        if arity < 2 {
            return Err(OperadError::MArity(arity));
        }
        Ok(Generator { kind: Kind::M, arity })
    }

    /// The generator `P_n`, `n ≥ 1`.
    pub fn p(arity: usize) -> Result<Self, OperadError> {
        if arity < 1 {
            return Err(OperadError::PArity(arity));
        }
        Ok(Generator { kind: Kind::P, arity })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `n−2` for `m_n`, `n−1` for `P_n`.
    pub fn degree(&self) -> usize {
        match self.kind {
            Kind::M => self.arity - 2,
            Kind::P => self.arity - 1,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::M => write!(f, "m{}", self.arity),
            Kind::P => write!(f, "P{}", self.arity),
        }
    }
}

/// A planar tree monomial: a generator at the root and one child slot per
/// root input, each either an open leaf (`None`) or a subtree. Structural
/// equality is canonical-form equality, and the derived lexicographic order
/// makes element printouts deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tree {
    gen: Generator,
    children: Vec<Option<Tree>>,
}

/// Preorder visit events: root vertex first, then children left to right.
enum Visit {
    Vertex(usize),
    Leaf,
}

impl Tree {
    /// The one-vertex tree on `gen` with all slots open.
    pub fn corolla(gen: Generator) -> Tree {
        Tree {
            children: vec![None; gen.arity()],
            gen,
        }
    }

    fn with_children(gen: Generator, children: Vec<Option<Tree>>) -> Tree {
        debug_assert_eq!(children.len(), gen.arity());
        Tree { gen, children }
    }

    pub fn generator(&self) -> Generator {
        self.gen
    }

    /// Number of leaves (inputs of the monomial).
    pub fn arity(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.as_ref().map_or(1, Tree::arity))
            .sum()
    }

    /// Total degree: sum over all vertices.
    pub fn degree(&self) -> usize {
        self.gen.degree()
            + self
                .children
                .iter()
                .filter_map(|c| c.as_ref().map(Tree::degree))
                .sum::<usize>()
    }

    fn visits(&self, out: &mut Vec<Visit>) {
        out.push(Visit::Vertex(self.gen.degree()));
        for c in &self.children {
            match c {
                None => out.push(Visit::Leaf),
                Some(s) => s.visits(out),
            }
        }
    }

    /// Total degree of the vertices visited strictly after leaf `i`
    /// (1-based) in preorder — the Koszul exponent partner for a graft
    /// at that leaf.
    fn degree_after_leaf(&self, i: usize) -> usize {
        let mut events = Vec::new();
        self.visits(&mut events);
        let mut seen = 0usize;
        let mut acc = 0usize;
        for e in events {
            match e {
                Visit::Leaf => seen += 1,
                Visit::Vertex(d) if seen >= i => acc += d,
                Visit::Vertex(_) => {}
            }
        }
        acc
    }

    fn substitute(&self, remaining: &mut usize, inner: &Tree) -> Tree {
        let children = self
            .children
            .iter()
            .map(|c| match c {
                Some(s) => Some(s.substitute(remaining, inner)),
                None => {
                    if *remaining == 0 {
                        None
                    } else {
                        *remaining -= 1;
                        if *remaining == 0 {
                            Some(inner.clone())
                        } else {
                            None
                        }
                    }
                }
            })
            .collect();
        Tree {
            gen: self.gen,
            children,
        }
    }

    /// Grafts `inner` at leaf `i` (1-based, planar order), returning the
    /// composite and its Koszul sign
    /// `(−1)^{deg(inner) · deg-after-leaf-i}`.
    pub fn graft(&self, i: usize, inner: &Tree) -> Result<(Tree, i64), OperadError> {
        let leaves = self.arity();
        if i == 0 || i > leaves {
            return Err(OperadError::LeafRange { got: i, leaves });
        }
        let exponent = inner.degree() * self.degree_after_leaf(i);
        let sign = if exponent % 2 == 0 { 1 } else { -1 };
        let mut remaining = i;
        Ok((self.substitute(&mut remaining, inner), sign))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.gen)?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match c {
                None => write!(f, "_")?,
                Some(s) => write!(f, "{s}")?,
            }
        }
        write!(f, ")")
    }
}

/// An integer combination of tree monomials; zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    terms: BTreeMap<Tree, i64>,
}

impl Element {
    pub fn zero() -> Element {
        Element::default()
    }

    /// The single-term element `coeff·tree` (zero if `coeff` is 0).
    pub fn term(tree: Tree, coeff: i64) -> Element {
        let mut e = Element::zero();
        e.add_term(tree, coeff);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate terms in canonical (tree-lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Tree, i64)> {
        self.terms.iter().map(|(t, &c)| (t, c))
    }

    /// Adds `coeff·tree` in place, dropping the monomial if it cancels.
    pub fn add_term(&mut self, tree: Tree, coeff: i64) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry(tree) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (t, c) in other.terms() {
            out.add_term(t.clone(), c);
        }
        out
    }

    pub fn scale(&self, k: i64) -> Element {
        let mut out = Element::zero();
        for (t, c) in self.terms() {
            out.add_term(t.clone(), c * k);
        }
        out
    }

    pub fn neg(&self) -> Element {
        self.scale(-1)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mag != 1 {
                write!(f, "{mag}·")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Partial composition `outer ∘_i inner` as a single signed monomial.
pub fn compose(outer: &Tree, i: usize, inner: &Tree) -> Result<Element, OperadError> {
    let (tree, sign) = outer.graft(i, inner)?;
    Ok(Element::term(tree, sign))
}

/// The generator differential on `m_n`:
///
/// ```text
/// ∂(m_n) = Σ_{j=2}^{n−1} Σ_{i=1}^{n−j+1} (−1)^{i+j(n−i)} m_{n−j+1} ∘_i m_j
/// ```
///
/// Empty for `n = 2`.
pub fn d_m(n: usize) -> Result<Element, OperadError> {
    Generator::m(n)?;
    let mut out = Element::zero();
    for j in 2..n {
        let outer = Tree::corolla(Generator::m(n - j + 1)?);
        let inner = Tree::corolla(Generator::m(j)?);
        for i in 1..=(n - j + 1) {
            let explicit = if (i + j * (n - i)) % 2 == 0 { 1 } else { -1 };
            let (tree, koszul) = outer.graft(i, &inner)?;
            out.add_term(tree, explicit * koszul);
        }
    }
    Ok(out)
}

/// Ordered compositions of `n` into at least two positive parts.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            if cur.len() >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        for part in 1..=rem {
            cur.push(part);
            rec(rem - part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out
}

/// All terms of ∂(P_n) contributed by one composition r₁+…+r_p = n.
///
/// Each term is indexed by a wrap depth `t ∈ 0..=p`, insertion slots
/// `i_q ∈ 1..=r_q` for the `t` outer `P_{r_q}`-wraps, and an ascending
/// slot subset `k_t < … < k_{p−1} ⊆ {1..p}` naming which inputs of the
/// inner `m_p` receive the remaining `P_{r_{t+1}}, …, P_{r_p}`. The sign
/// exponent is
///
/// ```text
/// α′ = 1 + Σ_{q=1}^{t} ( i_q + (Σ_{s=q+1}^{p} r_s)(r_q − i_q) − q(r_q − i_q) )
///        + Σ_{i=t+1}^{p} (k_{i−1} − p)(r_i − 1)
/// ```
fn d_p_composition(r: &[usize]) -> Result<Element, OperadError> {
    let p = r.len();
    let suffix: Vec<i64> = {
        // suffix[q] = Σ_{s>q} r_s with 1-based q; index 0 = whole sum.
        let mut acc = vec![0i64; p + 1];
        for q in (0..p).rev() {
            acc[q] = acc[q + 1] + r[q] as i64;
        }
        acc
    };
    let mut out = Element::zero();
    for t in 0..=p {
        let slot_sets: Vec<Vec<usize>> = (1..=p).combinations(p - t).collect();
        let insertions: Vec<Vec<usize>> = if t == 0 {
            vec![Vec::new()]
        } else {
            (0..t)
                .map(|q| (1..=r[q]).collect::<Vec<_>>())
                .multi_cartesian_product()
                .collect()
        };
        for ks in &slot_sets {
            for is in &insertions {
                let mut alpha: i64 = 1;
                for q in 1..=t {
                    let (rq, iq) = (r[q - 1] as i64, is[q - 1] as i64);
                    alpha += iq + suffix[q] * (rq - iq) - q as i64 * (rq - iq);
                }
                for i in (t + 1)..=p {
                    let k = ks[i - 1 - t] as i64;
                    alpha += (k - p as i64) * (r[i - 1] as i64 - 1);
                }
                let sign = if alpha.rem_euclid(2) == 0 { 1 } else { -1 };

                let mut kids: Vec<Option<Tree>> = vec![None; p];
                for (j, &slot) in ks.iter().enumerate() {
                    kids[slot - 1] = Some(Tree::corolla(Generator::p(r[t + j])?));
                }
                let mut tree = Tree::with_children(Generator::m(p)?, kids);
                for q in (0..t).rev() {
                    let mut wrap: Vec<Option<Tree>> = vec![None; r[q]];
                    wrap[is[q] - 1] = Some(tree);
                    tree = Tree::with_children(Generator::p(r[q])?, wrap);
                }
                out.add_term(tree, sign);
            }
        }
    }
    Ok(out)
}

/// The generator differential on `P_n`: the nested sum over compositions
/// described at [`d_p_composition`]. Empty for `n = 1` (no composition of 1
/// into two or more positive parts), so `P_1` is a cycle.
///
/// Partial sums over compositions are independent and merge commutatively;
/// large arities fan the per-composition work out over threads.
pub fn d_p(n: usize) -> Result<Element, OperadError> {
    Generator::p(n)?;
    let comps = compositions(n);
    const PARALLEL_THRESHOLD: usize = 8;
    if comps.len() < PARALLEL_THRESHOLD {
        let mut out = Element::zero();
        for r in &comps {
            out = out.add(&d_p_composition(r)?);
        }
        return Ok(out);
    }
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get());
    let chunk = comps.len().div_ceil(workers);
    let partials: Vec<Result<Element, OperadError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = comps
            .chunks(chunk)
            .map(|batch| {
                scope.spawn(move || {
                    let mut acc = Element::zero();
                    for r in batch {
                        acc = acc.add(&d_p_composition(r)?);
                    }
                    Ok(acc)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("operad worker panicked"))
            .collect()
    });
    let mut out = Element::zero();
    for p in partials {
        out = out.add(&p?);
    }
    Ok(out)
}

/// The generator differential of a single generator.
fn d_generator(g: Generator) -> Result<Element, OperadError> {
    match g.kind() {
        Kind::M => d_m(g.arity()),
        Kind::P => d_p(g.arity()),
    }
}

/// Substitutes the child slots of a monomial into a replacement tree of the
/// same arity, grafting right-to-left so earlier leaf indices stay stable;
/// Koszul signs accumulate through [`Tree::graft`].
fn substitute_root(
    replacement: &Tree,
    children: &[Option<Tree>],
) -> Result<(Tree, i64), OperadError> {
    let mut acc = replacement.clone();
    let mut sign = 1i64;
    for i in (1..=children.len()).rev() {
        if let Some(c) = &children[i - 1] {
            let (next, s) = acc.graft(i, c)?;
            acc = next;
            sign *= s;
        }
    }
    Ok((acc, sign))
}

/// ∂ of a single monomial: the graded derivation
///
/// ```text
/// ∂(g(C₁,…,C_k)) = (∂g)(C₁,…,C_k)
///                + Σ_i (−1)^{|g| + |C₁| + … + |C_{i−1}|} g(C₁,…,∂C_i,…,C_k)
/// ```
///
/// where open leaves have ∂ = 0 and degree 0.
fn d_tree(t: &Tree) -> Result<Element, OperadError> {
    let mut out = Element::zero();
    for (s, c) in d_generator(t.gen)?.terms() {
        let (tree, sign) = substitute_root(s, &t.children)?;
        out.add_term(tree, c * sign);
    }
    let mut degree_before = t.gen.degree();
    for (idx, child) in t.children.iter().enumerate() {
        let Some(ci) = child else { continue };
        let sign = if degree_before % 2 == 0 { 1 } else { -1 };
        for (s, c) in d_tree(ci)?.terms() {
            let mut kids = t.children.clone();
            kids[idx] = Some(s.clone());
            out.add_term(Tree::with_children(t.gen, kids), c * sign);
        }
        degree_before += ci.degree();
    }
    Ok(out)
}

/// Extends the generator differential to arbitrary elements as a graded
/// derivation (see [`d_tree`] for the monomial formula).
pub fn extend_differential(e: &Element) -> Result<Element, OperadError> {
    let mut out = Element::zero();
    for (t, c) in e.terms() {
        out = out.add(&d_tree(t)?.scale(c));
    }
    Ok(out)
}

/// Arity ceilings for [`d_squared_check`]; expansion itself is never
/// bounded, only the quadratic ∂² verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArityBounds {
    pub m: usize,
    pub p: usize,
}

impl Default for ArityBounds {
    fn default() -> Self {
        ArityBounds {
            m: DEFAULT_M_BOUND,
            p: DEFAULT_P_BOUND,
        }
    }
}

/// ∂²(generator): expands the generator differential and differentiates it
/// once more. The result is returned rather than asserted — the caller
/// inspects it (it must be the zero element for the differential to square
/// to zero).
pub fn d_squared_check(
    kind: Kind,
    n: usize,
    bounds: ArityBounds,
) -> Result<Element, OperadError> {
    let (label, bound) = match kind {
        Kind::M => ("m", bounds.m),
        Kind::P => ("P", bounds.p),
    };
    if n > bound {
        return Err(OperadError::ArityBound {
            kind: label,
            requested: n,
            bound,
        });
    }
    let first = match kind {
        Kind::M => d_m(n)?,
        Kind::P => d_p(n)?,
    };
    extend_differential(&first)
}

/// Evaluates the two-colored quadratic relations on concrete structure
/// maps: associativity and the Nijenhuis relation in each color, morphism
/// multiplicativity, and operator intertwining. Each relation is contracted
/// directly against the structure constants, independently of the
/// `algebra`-module checkers, so the two suites corroborate each other.
pub fn check_colored_relations<F: Field>(
    a: &Algebra<F>,
    b: &Algebra<F>,
    phi: &Morphism<F>,
) -> CheckReport<F> {
    let mut report = CheckReport::new();
    color_relations(a, "color-a-associativity", "color-a-nijenhuis", &mut report);
    color_relations(b, "color-b-associativity", "color-b-nijenhuis", &mut report);

    let da = a.dim();
    // f∘₁μ_A − (μ_B∘₁f)∘₂f: φ(e_i e_j) − φ(e_i)φ(e_j).
    for i in 0..da {
        for j in 0..da {
            let lhs = phi.apply(a.mul_basis(i, j));
            let rhs = b.mul_vec(&phi.apply_basis(i), &phi.apply_basis(j));
            report.observe("mixed-multiplicativity", &[i, j], dense::sub(&lhs, &rhs));
        }
    }
    // f∘₁P_A − P_B∘₁f: φ(P_A e_i) − P_B(φ e_i).
    for i in 0..da {
        let p_col: Vec<F> = (0..da).map(|r| a.op_matrix()[r * da + i].clone()).collect();
        let lhs = phi.apply(&p_col);
        let rhs = b.op_apply(&phi.apply_basis(i));
        report.observe("mixed-operator", &[i], dense::sub(&lhs, &rhs));
    }
    report
}

/// One color's associativity and Nijenhuis relations, contracted inline.
fn color_relations<F: Field>(
    a: &Algebra<F>,
    assoc_law: &'static str,
    nij_law: &'static str,
    report: &mut CheckReport<F>,
) {
    let d = a.dim();
    // m₂∘₁m₂ − m₂∘₂m₂ on basis triples.
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut lhs = vec![F::zero(); d];
                let mut rhs = vec![F::zero(); d];
                for l in 0..d {
                    let cij = &a.mul_basis(i, j)[l];
                    if !cij.is_zero() {
                        for (m, s) in a.mul_basis(l, k).iter().enumerate() {
                            lhs[m].add_mul(cij, s);
                        }
                    }
                    let cjk = &a.mul_basis(j, k)[l];
                    if !cjk.is_zero() {
                        for (m, s) in a.mul_basis(i, l).iter().enumerate() {
                            rhs[m].add_mul(cjk, s);
                        }
                    }
                }
                report.observe(assoc_law, &[i, j, k], dense::sub(&lhs, &rhs));
            }
        }
    }
    // (m₂∘₁P₁)∘₂P₁ − P₁∘₁(m₂∘₁P₁) − P₁∘₁(m₂∘₂P₁) + P₁∘₁(P₁∘₁m₂) on basis
    // pairs.
    let p_col = |i: usize| -> Vec<F> { (0..d).map(|r| a.op_matrix()[r * d + i].clone()).collect() };
    for i in 0..d {
        for j in 0..d {
            let (pi, pj) = (p_col(i), p_col(j));
            let ei = dense::basis::<F>(d, i);
            let ej = dense::basis::<F>(d, j);
            let term1 = a.mul_vec(&pi, &pj);
            let term2 = a.op_apply(&a.mul_vec(&pi, &ej));
            let term3 = a.op_apply(&a.mul_vec(&ei, &pj));
            let term4 = a.op_apply(&a.op_apply(a.mul_basis(i, j)));
            let residual = dense::add(
                &dense::sub(&dense::sub(&term1, &term2), &term3),
                &term4,
            );
            report.observe(nij_law, &[i, j], residual);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example_fixture, seed_corpus, unital_morphism_corpus};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(n: usize) -> Generator {
        Generator::m(n).unwrap()
    }

    fn p(n: usize) -> Generator {
        Generator::p(n).unwrap()
    }

    #[test]
    fn generator_degrees() {
        assert_eq!(m(2).degree(), 0);
        assert_eq!(m(3).degree(), 1);
        assert_eq!(p(1).degree(), 0);
        assert_eq!(p(3).degree(), 2);
        assert!(Generator::m(1).is_err());
        assert!(Generator::p(0).is_err());
    }

    #[test]
    fn compose_of_degree_zero_generators_has_sign_one() {
        let e = compose(&Tree::corolla(m(2)), 1, &Tree::corolla(m(2))).unwrap();
        assert_eq!(e.len(), 1);
        let (t, c) = e.terms().next().unwrap();
        assert_eq!(c, 1);
        assert_eq!(t.arity(), 3);
        assert_eq!(t.to_string(), "m2(m2(_,_),_)");
        let e = compose(&Tree::corolla(p(1)), 1, &Tree::corolla(p(1))).unwrap();
        assert_eq!((e.len(), e.terms().next().unwrap().1), (1, 1));
    }

    #[test]
    fn compose_rejects_out_of_range_leaves() {
        let t = Tree::corolla(m(2));
        assert!(matches!(
            compose(&t, 3, &Tree::corolla(p(1))),
            Err(OperadError::LeafRange { got: 3, leaves: 2 })
        ));
        assert!(compose(&t, 0, &Tree::corolla(p(1))).is_err());
    }

    #[test]
    fn koszul_sign_counts_degree_to_the_right() {
        // Graft P₂ (degree 1) into m₂∘₂P₂ at leaf 1: the vertices after
        // leaf 1 in preorder are the inner P₂ (degree 1), so the sign is
        // (−1)^{1·1} = −1.
        let (host, s0) = Tree::corolla(m(2))
            .graft(2, &Tree::corolla(p(2)))
            .unwrap();
        assert_eq!(s0, 1);
        let (_, sign) = host.graft(1, &Tree::corolla(p(2))).unwrap();
        assert_eq!(sign, -1);
        // Grafting at the last leaf has nothing to its right: sign +1.
        let (_, sign) = host.graft(3, &Tree::corolla(p(2))).unwrap();
        assert_eq!(sign, 1);
    }

    #[test]
    fn d_m_small_cases() {
        assert!(d_m(2).unwrap().is_zero());

        let d3 = d_m(3).unwrap();
        let mut expected = Element::zero();
        expected.add_term(
            Tree::corolla(m(2)).graft(1, &Tree::corolla(m(2))).unwrap().0,
            -1,
        );
        expected.add_term(
            Tree::corolla(m(2)).graft(2, &Tree::corolla(m(2))).unwrap().0,
            1,
        );
        assert_eq!(d3, expected);
        // Canonical term order is tree-lexicographic, and open leaves sort
        // before subtrees, so the right-comb monomial prints first.
        assert_eq!(d3.to_string(), "m2(_,m2(_,_)) - m2(m2(_,_),_)");

        // The double sum yields Σ_{j=2}^{n−1}(n−j+1) terms: five at n = 4
        // (three m₃∘ᵢm₂ and two m₂∘ᵢm₃), pinned here with their signs.
        let d4 = d_m(4).unwrap();
        let graft = |outer: Generator, i: usize, inner: Generator| {
            Tree::corolla(outer).graft(i, &Tree::corolla(inner)).unwrap().0
        };
        let mut expected = Element::zero();
        expected.add_term(graft(m(3), 1, m(2)), -1);
        expected.add_term(graft(m(3), 2, m(2)), 1);
        expected.add_term(graft(m(3), 3, m(2)), -1);
        expected.add_term(graft(m(2), 1, m(3)), 1);
        expected.add_term(graft(m(2), 2, m(3)), 1);
        assert_eq!(d4, expected);
    }

    #[test]
    fn d_p_one_is_zero() {
        assert!(d_p(1).unwrap().is_zero());
    }

    /// ∂(P₂) is exactly the four-monomial Nijenhuis relation with
    /// m₂, P₁ in place of μ, P — same monomials, same relative signs.
    #[test]
    fn d_p_two_is_the_nijenhuis_relation() {
        let d2 = d_p(2).unwrap();
        assert_eq!(d2.len(), 4);

        let m2p1_1 = Tree::corolla(m(2)).graft(1, &Tree::corolla(p(1))).unwrap().0;
        let m2p1_2 = Tree::corolla(m(2)).graft(2, &Tree::corolla(p(1))).unwrap().0;
        let t1 = m2p1_1.graft(2, &Tree::corolla(p(1))).unwrap().0;
        let t2 = Tree::corolla(p(1)).graft(1, &m2p1_1).unwrap().0;
        let t3 = Tree::corolla(p(1)).graft(1, &m2p1_2).unwrap().0;
        let p1p1 = Tree::corolla(p(1)).graft(1, &Tree::corolla(p(1))).unwrap().0;
        let t4 = p1p1.graft(1, &Tree::corolla(m(2))).unwrap().0;

        let mut expected = Element::zero();
        expected.add_term(t1, -1);
        expected.add_term(t2, 1);
        expected.add_term(t3, 1);
        expected.add_term(t4, -1);
        assert_eq!(d2, expected);
    }

    /// Term counts of the P-differential, frozen after the first verified
    /// expansion; they guard the tuple enumeration.
    #[test]
    fn d_p_term_counts() {
        assert_eq!(d_p(2).unwrap().len(), 4);
        assert_eq!(d_p(3).unwrap().len(), 20);
        assert_eq!(d_p(4).unwrap().len(), 77);
        assert_eq!(d_p(5).unwrap().len(), 274);
    }

    /// Every ∂(P_n) monomial, rebuilt as a literal sequence of signed
    /// grafts — the P-corollas into m_p left to right with slot-shift
    /// bookkeeping, then the outer P-wraps innermost to outermost —
    /// accumulates total Koszul sign +1. The displayed coefficient is
    /// therefore the explicit sign alone, independent of the reading order.
    #[test]
    fn d_p_terms_rebuild_with_trivial_koszul_sign() {
        for n in 2..=4 {
            for (tree, _) in d_p(n).unwrap().terms() {
                // Peel the wrap chain: P-vertices with a single subtree.
                let mut wraps: Vec<(Generator, usize)> = Vec::new();
                let mut cur = tree;
                while cur.generator().kind() == Kind::P {
                    let occupied: Vec<usize> = (0..cur.children.len())
                        .filter(|&k| cur.children[k].is_some())
                        .collect();
                    assert_eq!(occupied.len(), 1, "wrap vertex holds one subtree");
                    wraps.push((cur.generator(), occupied[0] + 1));
                    cur = cur.children[occupied[0]].as_ref().unwrap();
                }
                // The core: m_p with P-corollas at some slots.
                assert_eq!(cur.generator().kind(), Kind::M);
                let grafts: Vec<(usize, Generator)> = cur
                    .children
                    .iter()
                    .enumerate()
                    .filter_map(|(k, c)| c.as_ref().map(|s| (k + 1, s.generator())))
                    .collect();
                for (_, g) in &grafts {
                    assert_eq!(g.kind(), Kind::P);
                }

                let mut acc = Tree::corolla(cur.generator());
                let mut sign = 1i64;
                let mut shift = 0usize;
                for (k, g) in &grafts {
                    let (next, s) = acc.graft(k + shift, &Tree::corolla(*g)).unwrap();
                    acc = next;
                    sign *= s;
                    shift += g.arity() - 1;
                }
                for (g, i) in wraps.iter().rev() {
                    let (next, s) = Tree::corolla(*g).graft(*i, &acc).unwrap();
                    acc = next;
                    sign *= s;
                }
                assert_eq!(&acc, tree);
                assert_eq!(sign, 1, "Koszul residue rebuilding {tree}");
            }
        }
    }

    #[test]
    fn extend_differential_on_generators_and_zero() {
        assert!(extend_differential(&Element::zero()).unwrap().is_zero());
        let e = Element::term(Tree::corolla(m(3)), 1);
        assert_eq!(extend_differential(&e).unwrap(), d_m(3).unwrap());
        // ∂(m₂∘₁P₁) = (∂m₂)∘₁P₁ ± m₂∘₁(∂P₁) = 0.
        let t = Tree::corolla(m(2)).graft(1, &Tree::corolla(p(1))).unwrap().0;
        assert!(extend_differential(&Element::term(t, 1)).unwrap().is_zero());
    }

    #[test]
    fn d_squared_vanishes_for_m_up_to_five() {
        let bounds = ArityBounds { m: 5, p: 3 };
        for n in 2..=5 {
            let residual = d_squared_check(Kind::M, n, bounds).unwrap();
            assert!(residual.is_zero(), "∂²(m{n}) = {residual}");
        }
    }

    #[test]
    fn d_squared_vanishes_for_p_up_to_three() {
        for n in 1..=3 {
            let residual = d_squared_check(Kind::P, n, ArityBounds::default()).unwrap();
            assert!(residual.is_zero(), "∂²(P{n}) = {residual}");
        }
    }

    /// The heavy tail of the ∂² suite; run with `--ignored`. Covers the
    /// arities gated behind the CLI's explicit opt-in.
    #[test]
    #[ignore = "heavy: larger arities, run with --ignored"]
    fn d_squared_vanishes_for_heavy_arities() {
        let bounds = ArityBounds { m: 6, p: 4 };
        assert!(d_squared_check(Kind::M, 6, bounds).unwrap().is_zero());
        assert!(d_squared_check(Kind::P, 4, bounds).unwrap().is_zero());
    }

    #[test]
    fn d_squared_check_enforces_bounds() {
        let err = d_squared_check(Kind::M, 5, ArityBounds::default()).unwrap_err();
        assert!(matches!(
            err,
            OperadError::ArityBound {
                kind: "m",
                requested: 5,
                bound: 4
            }
        ));
        assert!(d_squared_check(Kind::P, 4, ArityBounds::default()).is_err());
    }

    /// Arbitration for the Koszul convention: under the mirrored
    /// (right-to-left) convention — exponent paired with the degree
    /// *before* leaf i in preorder, ancestors included — ∂² = 0 fails
    /// already at m₅, with twelve uncancelled terms. This re-runs the m₅
    /// computation with the mirror exponent used consistently everywhere,
    /// including inside the generator expansion (on a corolla host the
    /// mirror pairs the grafted degree with the root's own degree, which
    /// flips the m₃∘ᵢm₃ signs) — documenting why left-to-right is the
    /// recorded convention.
    #[test]
    fn right_to_left_convention_fails_d_squared_at_m5() {
        fn mirror_graft(outer: &Tree, i: usize, inner: &Tree) -> (Tree, i64) {
            let (tree, _) = outer.graft(i, inner).unwrap();
            let after = outer.degree_after_leaf(i);
            let before = outer.degree() - after;
            let sign = if (inner.degree() * before) % 2 == 0 {
                1
            } else {
                -1
            };
            (tree, sign)
        }
        fn mirror_d_m(n: usize) -> Element {
            let mut out = Element::zero();
            for j in 2..n {
                for i in 1..=(n - j + 1) {
                    let explicit = if (i + j * (n - i)) % 2 == 0 { 1 } else { -1 };
                    let (tree, sign) = mirror_graft(
                        &Tree::corolla(Generator::m(n - j + 1).unwrap()),
                        i,
                        &Tree::corolla(Generator::m(j).unwrap()),
                    );
                    out.add_term(tree, explicit * sign);
                }
            }
            out
        }
        fn mirror_substitute(replacement: &Tree, children: &[Option<Tree>]) -> (Tree, i64) {
            let mut acc = replacement.clone();
            let mut sign = 1;
            for i in (1..=children.len()).rev() {
                if let Some(c) = &children[i - 1] {
                    let (next, s) = mirror_graft(&acc, i, c);
                    acc = next;
                    sign *= s;
                }
            }
            (acc, sign)
        }
        fn mirror_d_tree(t: &Tree) -> Element {
            let mut out = Element::zero();
            for (s, c) in mirror_d_m(t.generator().arity()).terms() {
                let (tree, sign) = mirror_substitute(s, &t.children);
                out.add_term(tree, c * sign);
            }
            let mut degree_before = t.generator().degree();
            for (idx, child) in t.children.iter().enumerate() {
                let Some(ci) = child else { continue };
                let sign = if degree_before % 2 == 0 { 1 } else { -1 };
                for (s, c) in mirror_d_tree(ci).terms() {
                    let mut kids = t.children.clone();
                    kids[idx] = Some(s.clone());
                    out.add_term(Tree::with_children(t.generator(), kids), c * sign);
                }
                degree_before += ci.degree();
            }
            out
        }
        let mut residual = Element::zero();
        for (t, c) in mirror_d_m(5).terms() {
            residual = residual.add(&mirror_d_tree(t).scale(c));
        }
        assert_eq!(residual.len(), 12);
    }

    /// Operadic associativity of `compose` with Koszul signs, on seeded
    /// random trees: the sequential axiom
    /// `(a ∘_i b) ∘_{i−1+j} c = a ∘_i (b ∘_j c)` and the parallel axiom
    /// `(a ∘_i b) ∘_{j+|b|−1} c = (−1)^{deg b · deg c} (a ∘_j c) ∘_i b`
    /// for slots i < j of `a`.
    #[test]
    fn compose_satisfies_the_operad_axioms() {
        let pool = [m(2), m(3), m(4), p(1), p(2), p(3)];
        let mut rng = ChaCha8Rng::seed_from_u64(0x6e696a63);
        let random_tree = |rng: &mut ChaCha8Rng| -> Tree {
            let mut t = Tree::corolla(pool[rng.random_range(0..pool.len())]);
            for _ in 0..rng.random_range(0..3) {
                let inner = Tree::corolla(pool[rng.random_range(0..pool.len())]);
                let leaf = rng.random_range(1..=t.arity());
                t = t.graft(leaf, &inner).unwrap().0;
            }
            t
        };
        for _ in 0..200 {
            let a = random_tree(&mut rng);
            let b = random_tree(&mut rng);
            let c = random_tree(&mut rng);

            // Sequential: graft c inside the grafted copy of b.
            let i = rng.random_range(1..=a.arity());
            let j = rng.random_range(1..=b.arity());
            let (ab, s_ab) = a.graft(i, &b).unwrap();
            let (lhs_t, s_l) = ab.graft(i - 1 + j, &c).unwrap();
            let (bc, s_bc) = b.graft(j, &c).unwrap();
            let (rhs_t, s_r) = a.graft(i, &bc).unwrap();
            assert_eq!(lhs_t, rhs_t);
            assert_eq!(s_ab * s_l, s_bc * s_r, "sequential signs");

            // Parallel: two distinct slots of a.
            if a.arity() < 2 {
                continue;
            }
            let i = rng.random_range(1..a.arity());
            let j = rng.random_range(i + 1..=a.arity());
            let (ab, s_ab) = a.graft(i, &b).unwrap();
            let (lhs_t, s_l) = ab.graft(j + b.arity() - 1, &c).unwrap();
            let (ac, s_ac) = a.graft(j, &c).unwrap();
            let (rhs_t, s_r) = ac.graft(i, &b).unwrap();
            let swap = if (b.degree() * c.degree()) % 2 == 0 {
                1
            } else {
                -1
            };
            assert_eq!(lhs_t, rhs_t);
            assert_eq!(s_ab * s_l, swap * s_ac * s_r, "parallel signs");
        }
    }

    #[test]
    fn colored_relations_pass_on_the_example_and_identity_morphisms() {
        let (a, b, phi, _) = example_fixture();
        assert!(check_colored_relations(&a, &b, &phi).passed());
        for (name, a, b, phi) in unital_morphism_corpus() {
            assert!(check_colored_relations(&a, &b, &phi).passed(), "{name}");
        }
        for (name, a) in seed_corpus() {
            let phi = Morphism::identity(a.dim());
            assert!(check_colored_relations(&a, &a, &phi).passed(), "{name}");
        }
    }

    /// Breaking only the operator compatibility: pair the example source
    /// with the γ = 2 target. Both colors still satisfy their relations and
    /// φ stays multiplicative, but φ∘P_A = φ ≠ 2φ = P_B∘φ, so exactly the
    /// mixed-operator generator reports defects.
    #[test]
    fn colored_relations_localize_an_operator_defect() {
        let (a, _, phi, _) = example_fixture();
        let b2 = crate::fixtures::example_b(2);
        let report = check_colored_relations(&a, &b2, &phi);
        assert!(!report.passed());
        assert!(report.defects.iter().all(|d| d.law == "mixed-operator"));
        // φ(e₃) = 0, so only e₁ and e₂ witness it.
        let witnesses: Vec<usize> = report.defects.iter().map(|d| d.indices[0]).collect();
        assert_eq!(witnesses, vec![0, 1]);
    }
}
