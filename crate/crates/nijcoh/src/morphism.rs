//! Cochain complexes attached to a morphism of algebras-with-operator and a
//! compatible pair of coefficient bimodules.
//!
//! Fix φ: A → B, an `A`-bimodule `M`, a `B`-bimodule `N` and a connecting
//! map ψ: M → N (packaged as a [`PhiBimodule`]). The degree-`n` morphism
//! cochains are triples
//!
//! ```text
//! Cⁿ_mor = Hom(A^⊗n, M) ⊕ Hom(B^⊗n, N) ⊕ Hom(A^⊗(n−1), N)
//! ```
//!
//! with `N` acting on `A`-tensors through φ; in degree 0 the third slot is
//! absent and the triple degenerates to a pair `M ⊕ N`. The coboundary
//! [`delta_mor`] comes in two flavors — [`MorFlavor::Plain`] (Hochschild
//! componentwise) and [`MorFlavor::Triangle`] (operator-complex
//! componentwise) — connected by the chain map [`theta_map`]. The total
//! complex pairs a plain triple with a triangle triple one degree down and
//! carries the differential [`big_D`]; its cohomology is computed by
//! [`njm_cohomology_dim`].
//!
//! Degree-0 convention: the total differential is the single formula
//! `D(x, y) = (δ_mor x, δ_mor y + (−1)ⁿ Θⁿ x)` at every degree, with absent
//! components read as zero. In degree 0 this gives `D⁰(m₁,m₂) =
//! (δ⁰_mor(m₁,m₂), (m₁,m₂))`, the unique extension under which `D∘D = 0`
//! holds from degree 0 on; the test suite pins this down.

use thiserror::Error;

use crate::algebra::{restrict_along, Algebra, Bimodule, Morphism, PhiBimodule, ShapeError};
use crate::cochain::{
    assemble_columns, delta_alg, delta_njo, phi_map, Cochain, CochainError, Complex,
};
use crate::field::Field;
use crate::linalg::{ensure_budget, SparseMatrix};

/// Which componentwise coboundary [`delta_mor`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorFlavor {
    /// Hochschild coboundaries in all three slots.
    Plain,
    /// Operator-complex coboundaries in all three slots.
    Triangle,
}

/// Errors from degree-guard checks on morphism-complex operations.
#[derive(Debug, Error)]
pub enum MorphismError {
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error("vanishing report requires degree ≥ 2, got {0}")]
    DegreeTooLow(usize),
}

/// Everything the morphism complexes need, precomputed once: the two
/// algebras, φ, the coefficient bimodules and the restriction of `N` to an
/// `A`-bimodule along φ.
#[derive(Debug, Clone)]
pub struct MorContext<F: Field> {
    a: Algebra<F>,
    b: Algebra<F>,
    phi: Morphism<F>,
    m: Bimodule<F>,
    n: Bimodule<F>,
    n_res: Bimodule<F>,
    psi: Vec<F>,
}

impl<F: Field> MorContext<F> {
    /// Assembles a context from checked pieces. The caller is responsible
    /// for having run the axiom checkers; this constructor only validates
    /// dimensions.
    pub fn new(
        a: &Algebra<F>,
        b: &Algebra<F>,
        phi: &Morphism<F>,
        pb: &PhiBimodule<F>,
    ) -> Result<Self, ShapeError> {
        if phi.src_dim() != a.dim() || phi.dst_dim() != b.dim() {
            return Err(ShapeError::DimMismatch {
                what: "morphism endpoints",
                got: phi.src_dim(),
                expected: a.dim(),
            });
        }
        if pb.m().alg_dim() != a.dim() || pb.n().alg_dim() != b.dim() {
            return Err(ShapeError::DimMismatch {
                what: "coefficient bimodule base algebras",
                got: pb.m().alg_dim(),
                expected: a.dim(),
            });
        }
        let n_res = restrict_along(phi, pb.n());
        Ok(MorContext {
            a: a.clone(),
            b: b.clone(),
            phi: phi.clone(),
            m: pb.m().clone(),
            n: pb.n().clone(),
            n_res,
            psi: pb.psi_matrix().to_vec(),
        })
    }

    pub fn algebra_a(&self) -> &Algebra<F> {
        &self.a
    }

    pub fn algebra_b(&self) -> &Algebra<F> {
        &self.b
    }

    pub fn phi(&self) -> &Morphism<F> {
        &self.phi
    }

    pub fn coefficients_m(&self) -> &Bimodule<F> {
        &self.m
    }

    pub fn coefficients_n(&self) -> &Bimodule<F> {
        &self.n
    }

    /// `N` viewed as an `A`-bimodule through φ.
    pub fn coefficients_n_res(&self) -> &Bimodule<F> {
        &self.n_res
    }

    fn dim_f(&self, degree: usize) -> usize {
        self.a.dim().pow(degree as u32) * self.m.dim()
    }

    fn dim_g(&self, degree: usize) -> usize {
        self.b.dim().pow(degree as u32) * self.n.dim()
    }

    fn dim_h(&self, degree: usize) -> usize {
        if degree == 0 {
            0
        } else {
            self.a.dim().pow(degree as u32 - 1) * self.n.dim()
        }
    }
}

/// A degree-`n` morphism cochain `(f, g, h)`; `h` is absent in degree 0,
/// where the triple degenerates to a pair of module elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainTriple<F: Field> {
    pub f: Cochain<F>,
    pub g: Cochain<F>,
    pub h: Option<Cochain<F>>,
}

impl<F: Field> CochainTriple<F> {
    /// Builds a triple, validating arities and dimensions against a context.
    pub fn new(
        ctx: &MorContext<F>,
        f: Cochain<F>,
        g: Cochain<F>,
        h: Option<Cochain<F>>,
    ) -> Result<Self, ShapeError> {
        let n = f.arity();
        let ok = g.arity() == n
            && f.dim_in() == ctx.a.dim()
            && f.dim_out() == ctx.m.dim()
            && g.dim_in() == ctx.b.dim()
            && g.dim_out() == ctx.n.dim()
            && match &h {
                None => n == 0,
                Some(h) => {
                    n >= 1
                        && h.arity() == n - 1
                        && h.dim_in() == ctx.a.dim()
                        && h.dim_out() == ctx.n.dim()
                }
            };
        if !ok {
            return Err(ShapeError::DimMismatch {
                what: "morphism cochain triple",
                got: g.arity(),
                expected: n,
            });
        }
        Ok(CochainTriple { f, g, h })
    }

    /// The zero triple of the given degree.
    pub fn zero(ctx: &MorContext<F>, degree: usize) -> Self {
        let h = (degree > 0).then(|| Cochain::zero(degree - 1, ctx.a.dim(), ctx.n.dim()));
        CochainTriple {
            f: Cochain::zero(degree, ctx.a.dim(), ctx.m.dim()),
            g: Cochain::zero(degree, ctx.b.dim(), ctx.n.dim()),
            h,
        }
    }

    /// The basis triple with a 1 at flat index `idx` (blocks f, g, h).
    pub fn basis(ctx: &MorContext<F>, degree: usize, idx: usize) -> Self {
        let mut t = CochainTriple::zero(ctx, degree);
        let mut coords = t.flatten();
        coords[idx] = F::one();
        t.assign(&coords);
        t
    }

    pub fn degree(&self) -> usize {
        self.f.arity()
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero() && self.g.is_zero() && self.h.as_ref().map_or(true, Cochain::is_zero)
    }

    pub fn add(&self, other: &CochainTriple<F>) -> CochainTriple<F> {
        CochainTriple {
            f: self.f.add(&other.f),
            g: self.g.add(&other.g),
            h: match (&self.h, &other.h) {
                (Some(x), Some(y)) => Some(x.add(y)),
                (None, None) => None,
                _ => panic!("triple degree mismatch in add"),
            },
        }
    }

    pub fn sub(&self, other: &CochainTriple<F>) -> CochainTriple<F> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CochainTriple<F> {
        CochainTriple {
            f: self.f.neg(),
            g: self.g.neg(),
            h: self.h.as_ref().map(Cochain::neg),
        }
    }

    /// Canonical flat coordinates: f block, then g, then h.
    pub fn flatten(&self) -> Vec<F> {
        let mut v = self.f.coeffs().to_vec();
        v.extend_from_slice(self.g.coeffs());
        if let Some(h) = &self.h {
            v.extend_from_slice(h.coeffs());
        }
        v
    }

    fn assign(&mut self, coords: &[F]) {
        let df = self.f.coeffs().len();
        let dg = self.g.coeffs().len();
        self.f = Cochain::new(
            self.f.arity(),
            self.f.dim_in(),
            self.f.dim_out(),
            coords[..df].to_vec(),
        )
        .unwrap();
        self.g = Cochain::new(
            self.g.arity(),
            self.g.dim_in(),
            self.g.dim_out(),
            coords[df..df + dg].to_vec(),
        )
        .unwrap();
        if let Some(h) = &self.h {
            self.h = Some(
                Cochain::new(
                    h.arity(),
                    h.dim_in(),
                    h.dim_out(),
                    coords[df + dg..].to_vec(),
                )
                .unwrap(),
            );
        }
    }

    /// Rebuilds a triple of the given degree from flat coordinates.
    pub fn from_flat(ctx: &MorContext<F>, degree: usize, coords: &[F]) -> Self {
        let mut t = CochainTriple::zero(ctx, degree);
        t.assign(coords);
        t
    }
}

/// Dimension of the degree-`n` morphism cochain space.
pub fn mor_space_dim<F: Field>(ctx: &MorContext<F>, n: usize) -> usize {
    ctx.dim_f(n) + ctx.dim_g(n) + ctx.dim_h(n)
}

/// The morphism coboundary
///
/// ```text
/// δ_mor(f, g, h) = ( δ(f), δ(g), ψ∘f − g∘φ^⊗n − δ(h) )
/// ```
///
/// where δ is the Hochschild coboundary for [`MorFlavor::Plain`] and the
/// operator coboundary for [`MorFlavor::Triangle`], in the matching
/// coefficients (`M` over `A`, `N` over `B`, restricted `N` over `A`). An
/// absent `h` contributes zero, so degree 0 reads
/// `δ⁰_mor(m₁, m₂) = (δ⁰m₁, δ⁰m₂, ψ(m₁) − m₂)`.
pub fn delta_mor<F: Field>(
    ctx: &MorContext<F>,
    t: &CochainTriple<F>,
    flavor: MorFlavor,
) -> CochainTriple<F> {
    let db = |alg: &Algebra<F>, m: &Bimodule<F>, c: &Cochain<F>| match flavor {
        MorFlavor::Plain => delta_alg(alg, m, c),
        MorFlavor::Triangle => delta_njo(alg, m, c),
    };
    let f_out = db(&ctx.a, &ctx.m, &t.f);
    let g_out = db(&ctx.b, &ctx.n, &t.g);
    let mut third = t
        .f
        .map_values(&ctx.psi, ctx.n.dim())
        .sub(&t.g.pre_compose_all(ctx.phi.matrix(), ctx.a.dim()));
    if let Some(h) = &t.h {
        third = third.sub(&db(&ctx.a, &ctx.n_res, h));
    }
    CochainTriple {
        f: f_out,
        g: g_out,
        h: Some(third),
    }
}

/// The componentwise comparison map
/// `Θⁿ(f, g, h) = (Φⁿ(f), Φⁿ(g), Φⁿ⁻¹(h))`; `Θ⁰` is the identity.
pub fn theta_map<F: Field>(ctx: &MorContext<F>, t: &CochainTriple<F>) -> CochainTriple<F> {
    CochainTriple {
        f: phi_map(&ctx.a, &ctx.m, &t.f),
        g: phi_map(&ctx.b, &ctx.n, &t.g),
        h: t.h.as_ref().map(|h| phi_map(&ctx.a, &ctx.n_res, h)),
    }
}

/// A degree-`n` element of the total complex: a plain triple of degree `n`
/// and a triangle triple of degree `n−1` (absent in degree 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainPairNjM<F: Field> {
    pub top: CochainTriple<F>,
    pub bot: Option<CochainTriple<F>>,
}

impl<F: Field> CochainPairNjM<F> {
    /// Builds a pair, enforcing the degree offset.
    pub fn new(
        top: CochainTriple<F>,
        bot: Option<CochainTriple<F>>,
    ) -> Result<Self, ShapeError> {
        let n = top.degree();
        let ok = match &bot {
            None => n == 0,
            Some(b) => n >= 1 && b.degree() == n - 1,
        };
        if !ok {
            return Err(ShapeError::DimMismatch {
                what: "total-complex pair degree offset",
                got: bot.map_or(0, |b| b.degree()),
                expected: n.saturating_sub(1),
            });
        }
        Ok(CochainPairNjM { top, bot })
    }

    pub fn zero(ctx: &MorContext<F>, degree: usize) -> Self {
        let bot = (degree > 0).then(|| CochainTriple::zero(ctx, degree - 1));
        CochainPairNjM {
            top: CochainTriple::zero(ctx, degree),
            bot,
        }
    }

    pub fn degree(&self) -> usize {
        self.top.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.top.is_zero() && self.bot.as_ref().map_or(true, CochainTriple::is_zero)
    }

    pub fn add(&self, other: &CochainPairNjM<F>) -> CochainPairNjM<F> {
        CochainPairNjM {
            top: self.top.add(&other.top),
            bot: match (&self.bot, &other.bot) {
                (Some(x), Some(y)) => Some(x.add(y)),
                (None, None) => None,
                _ => panic!("pair degree mismatch in add"),
            },
        }
    }

    pub fn sub(&self, other: &CochainPairNjM<F>) -> CochainPairNjM<F> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CochainPairNjM<F> {
        CochainPairNjM {
            top: self.top.neg(),
            bot: self.bot.as_ref().map(CochainTriple::neg),
        }
    }

    /// Canonical flat coordinates: top blocks then bottom blocks.
    pub fn flatten(&self) -> Vec<F> {
        let mut v = self.top.flatten();
        if let Some(b) = &self.bot {
            v.extend(b.flatten());
        }
        v
    }

    /// Rebuilds a pair of the given degree from flat coordinates.
    pub fn from_flat(ctx: &MorContext<F>, degree: usize, coords: &[F]) -> Self {
        let top_len = mor_space_dim(ctx, degree);
        let top = CochainTriple::from_flat(ctx, degree, &coords[..top_len]);
        let bot =
            (degree > 0).then(|| CochainTriple::from_flat(ctx, degree - 1, &coords[top_len..]));
        CochainPairNjM { top, bot }
    }
}

/// Dimension of the degree-`n` total cochain space.
pub fn njm_space_dim<F: Field>(ctx: &MorContext<F>, n: usize) -> usize {
    if n == 0 {
        mor_space_dim(ctx, 0)
    } else {
        mor_space_dim(ctx, n) + mor_space_dim(ctx, n - 1)
    }
}

/// The total differential
///
/// ```text
/// D(x, y) = ( δ_mor(x),  δ_mor(y) + (−1)ⁿ Θⁿ(x) )
/// ```
///
/// with `x` plain, `y` triangle, and an absent `y` (degree 0) treated as
/// zero. Squares to zero from degree 0 on.
pub fn big_d<F: Field>(ctx: &MorContext<F>, p: &CochainPairNjM<F>) -> CochainPairNjM<F> {
    let n = p.degree();
    let top = delta_mor(ctx, &p.top, MorFlavor::Plain);
    let theta = theta_map(ctx, &p.top);
    let mut bot = if n % 2 == 0 { theta } else { theta.neg() };
    if let Some(y) = &p.bot {
        bot = bot.add(&delta_mor(ctx, y, MorFlavor::Triangle));
    }
    CochainPairNjM {
        top,
        bot: Some(bot),
    }
}

fn check_degree_cap(n: usize) -> Result<(), CochainError> {
    let cap = crate::cochain::degree_cap();
    if n > cap {
        Err(CochainError::DegreeCap { requested: n, cap })
    } else {
        Ok(())
    }
}

/// Assembles the degree-`n` matrix of [`delta_mor`] over the canonical
/// basis (blocks f, g, h; lexicographic within blocks).
pub fn delta_mor_matrix<F: Field>(
    ctx: &MorContext<F>,
    n: usize,
    flavor: MorFlavor,
) -> Result<SparseMatrix<F>, CochainError> {
    check_degree_cap(n)?;
    let cols = mor_space_dim(ctx, n);
    let rows = mor_space_dim(ctx, n + 1);
    ensure_budget(rows.saturating_mul(cols))?;
    let columns = assemble_columns(cols, |j| {
        let t = CochainTriple::basis(ctx, n, j);
        delta_mor(ctx, &t, flavor).flatten()
    });
    collect_matrix(rows, columns)
}

/// Assembles the degree-`n` matrix of [`big_D`] over the canonical basis
/// (top triple blocks, then bottom).
pub fn big_d_matrix<F: Field>(
    ctx: &MorContext<F>,
    n: usize,
) -> Result<SparseMatrix<F>, CochainError> {
    check_degree_cap(n)?;
    let cols = njm_space_dim(ctx, n);
    let rows = njm_space_dim(ctx, n + 1);
    ensure_budget(rows.saturating_mul(cols))?;
    let columns = assemble_columns(cols, |j| {
        let mut coords = vec![F::zero(); cols];
        coords[j] = F::one();
        let p = CochainPairNjM::from_flat(ctx, n, &coords);
        big_d(ctx, &p).flatten()
    });
    collect_matrix(rows, columns)
}

fn collect_matrix<F: Field>(
    rows: usize,
    columns: Vec<Vec<F>>,
) -> Result<SparseMatrix<F>, CochainError> {
    let cols = columns.len();
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

/// `dim ker Dⁿ − rank Dⁿ⁻¹`; degree 0 returns `dim ker D⁰`.
pub fn njm_cohomology_dim<F: Field>(
    ctx: &MorContext<F>,
    n: usize,
) -> Result<usize, CochainError> {
    let dn = big_d_matrix(ctx, n)?;
    let kernel = njm_space_dim(ctx, n) - dn.rank();
    if n == 0 {
        return Ok(kernel);
    }
    let dprev = big_d_matrix(ctx, n - 1)?;
    Ok(kernel - dprev.rank())
}

/// The four cohomology dimensions compared by [`vanishing_check`], plus the
/// consistency verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingReport {
    pub degree: usize,
    /// `dim Hⁿ` of the combined complex of `A` with coefficients in `M`.
    pub h_a: usize,
    /// `dim Hⁿ` of the combined complex of `B` with coefficients in `N`.
    pub h_b: usize,
    /// `dim Hⁿ⁻¹` of the combined complex of `A` with restricted `N`.
    pub h_res: usize,
    /// `dim Hⁿ` of the morphism complex.
    pub h_mor: usize,
    /// Whether the computed values are consistent with "if the three
    /// component groups vanish, the morphism group vanishes".
    pub consistent: bool,
}

/// Computes the three component cohomology groups and the morphism group in
/// degree `n ≥ 2` and checks the vanishing implication against them.
pub fn vanishing_check<F: Field>(
    ctx: &MorContext<F>,
    n: usize,
) -> Result<VanishingReport, MorphismError> {
    if n < 2 {
        return Err(MorphismError::DegreeTooLow(n));
    }
    let h_a = crate::cochain::cohomology_dim(Complex::NjA, &ctx.a, &ctx.m, n)?;
    let h_b = crate::cochain::cohomology_dim(Complex::NjA, &ctx.b, &ctx.n, n)?;
    let h_res = crate::cochain::cohomology_dim(Complex::NjA, &ctx.a, &ctx.n_res, n - 1)?;
    let h_mor = njm_cohomology_dim(ctx, n)?;
    let consistent = !(h_a == 0 && h_b == 0 && h_res == 0) || h_mor == 0;
    Ok(VanishingReport {
        degree: n,
        h_a,
        h_b,
        h_res,
        h_mor,
        consistent,
    })
}
