//! The on-disk workspace format: named algebras, bimodules, morphisms,
//! φ-bimodules and truncated deformations in one JSON document, fully
//! validated on parse and emitted deterministically.
//!
//! A document looks like
//!
//! ```json
//! {
//!   "field": "Q",
//!   "algebras": [
//!     { "name": "A", "dim": 3,
//!       "mul": [[0, 0, 0, "1"], [0, 1, 1, "1"]],
//!       "op": [[0, 0, "1"], [2, 2, "1/2"]],
//!       "unit": ["1", "0", "0"] }
//!   ],
//!   "bimodules": [
//!     { "name": "A_reg", "algebra": "A", "dim": 3,
//!       "left": [[0, 0, 0, "1"]], "right": [[0, 0, 0, "1"]], "op": [] }
//!   ],
//!   "morphisms": [
//!     { "name": "phi", "source": "A", "target": "B",
//!       "matrix": [[0, 0, "1"], [1, 0, "-1"]] }
//!   ],
//!   "phi_bimodules": [
//!     { "name": "phi_reg", "morphism": "phi", "m": "A_reg", "n": "B_reg",
//!       "psi": [[0, 0, "1"]] }
//!   ],
//!   "deformations": [
//!     { "name": "wiggle", "morphism": "phi", "order": 2,
//!       "terms": [ { "mul_a": [[0, 0, 0, "1"]], "phi": [[0, 1, "-2"]] },
//!                  { } ] }
//!   ]
//! }
//! ```
//!
//! Conventions, uniform across every section:
//!
//! - **Scalars** are exact rationals, written either as JSON integers or as
//!   strings `"p"` / `"p/q"`. Emission always writes strings.
//! - **Tensors are sparse.** A product or action entry `[i, j, k, c]` says
//!   the product of the `i`-th and `j`-th basis vectors (in multiplication
//!   order — for a right action the module element comes first) has
//!   coefficient `c` on the `k`-th output basis vector. A matrix entry
//!   `[r, c, v]` says the image of basis vector `c` has coefficient `v` on
//!   basis vector `r`. Omitted entries are zero; all indices are 0-based;
//!   duplicate index tuples are rejected.
//! - **Units are dense** (one scalar per basis vector) and validated: an
//!   algebra entry carrying a `unit` that fails left- or right-unitality on
//!   some basis vector is a parse error.
//! - **Names are globally unique** across all five sections, and every
//!   cross-reference (`algebra`, `source`/`target`, `morphism`, `m`/`n`)
//!   must resolve. A φ-bimodule's `m` must live over the morphism's source
//!   algebra and `n` over its target; a deformation's base data must match
//!   the referenced morphism and its endpoint algebras.
//!
//! [`parse_workspace`] reports *all* validation problems at once, each with
//! a location such as `algebras.A.mul[3]`; lawfulness of the structures
//! themselves (associativity, the operator identity, multiplicativity, …)
//! is deliberately *not* part of parsing — that is what the checkers and
//! the command-line `check` command are for. [`emit_workspace`] writes a
//! canonical document (name-sorted sections, row-major entries, string
//! scalars); emit-then-parse is the identity on every valid [`Workspace`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value as JsonValue;
use thiserror::Error;

use crate::algebra::{Algebra, Bimodule, Morphism, PhiBimodule};
use crate::deformation::TruncatedDeformation;
use crate::field::{q, Q};

/// One localized validation problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    /// Where in the document, e.g. `algebras.A.mul[3]` or `morphisms.phi`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

fn render_issues(issues: &[Issue]) -> String {
    issues
        .iter()
        .map(Issue::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Errors from reading, writing, or validating a workspace document.
#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// The document is not syntactically valid JSON of the expected shape;
    /// the message carries serde's line/column position.
    #[error("malformed workspace document: {0}")]
    Syntax(String),
    /// The document parsed but failed validation; one entry per problem.
    #[error("invalid workspace:\n{}", render_issues(.0))]
    Invalid(Vec<Issue>),
}

impl WorkspaceError {
    /// The validation issues, if this is a validation failure.
    pub fn issues(&self) -> &[Issue] {
        match self {
            WorkspaceError::Invalid(issues) => issues,
            _ => &[],
        }
    }
}

/// A named bimodule together with the algebra it lives over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BimoduleEntry {
    pub algebra: String,
    pub module: Bimodule<Q>,
}

/// A named morphism together with its endpoint algebra names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismEntry {
    pub source: String,
    pub target: String,
    pub map: Morphism<Q>,
}

/// A named φ-bimodule: the morphism it decorates, the two bimodule names,
/// and the assembled coefficient object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiBimoduleEntry {
    pub morphism: String,
    pub m: String,
    pub n: String,
    pub coefficients: PhiBimodule<Q>,
}

/// A named truncated deformation of the triple behind a morphism entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeformationEntry {
    pub morphism: String,
    pub deformation: TruncatedDeformation<Q>,
}

/// A validated collection of named objects. Every value reachable through a
/// `Workspace` satisfies the referential and shape invariants of the file
/// format — the `add_*` builders enforce them, and [`parse_workspace`] goes
/// through the same checks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Workspace {
    algebras: BTreeMap<String, Algebra<Q>>,
    bimodules: BTreeMap<String, BimoduleEntry>,
    morphisms: BTreeMap<String, MorphismEntry>,
    phi_bimodules: BTreeMap<String, PhiBimoduleEntry>,
    deformations: BTreeMap<String, DeformationEntry>,
}

fn single_issue(section: &str, name: &str, message: String) -> WorkspaceError {
    WorkspaceError::Invalid(vec![Issue {
        location: format!("{section}.{name}"),
        message,
    }])
}

impl Workspace {
    pub fn new() -> Workspace {
        Workspace::default()
    }

    pub fn algebras(&self) -> &BTreeMap<String, Algebra<Q>> {
        &self.algebras
    }

    pub fn bimodules(&self) -> &BTreeMap<String, BimoduleEntry> {
        &self.bimodules
    }

    pub fn morphisms(&self) -> &BTreeMap<String, MorphismEntry> {
        &self.morphisms
    }

    pub fn phi_bimodules(&self) -> &BTreeMap<String, PhiBimoduleEntry> {
        &self.phi_bimodules
    }

    pub fn deformations(&self) -> &BTreeMap<String, DeformationEntry> {
        &self.deformations
    }

    pub fn algebra(&self, name: &str) -> Option<&Algebra<Q>> {
        self.algebras.get(name)
    }

    pub fn bimodule(&self, name: &str) -> Option<&BimoduleEntry> {
        self.bimodules.get(name)
    }

    pub fn morphism(&self, name: &str) -> Option<&MorphismEntry> {
        self.morphisms.get(name)
    }

    pub fn phi_bimodule(&self, name: &str) -> Option<&PhiBimoduleEntry> {
        self.phi_bimodules.get(name)
    }

    pub fn deformation(&self, name: &str) -> Option<&DeformationEntry> {
        self.deformations.get(name)
    }

    /// A morphism with its endpoint algebras resolved.
    pub fn morphism_objects(&self, name: &str) -> Option<(&Algebra<Q>, &Algebra<Q>, &Morphism<Q>)> {
        let entry = self.morphisms.get(name)?;
        Some((
            self.algebras.get(&entry.source)?,
            self.algebras.get(&entry.target)?,
            &entry.map,
        ))
    }

    /// A φ-bimodule with its full ambient data (source, target, morphism)
    /// resolved.
    #[allow(clippy::type_complexity)]
    pub fn phi_objects(
        &self,
        name: &str,
    ) -> Option<(&Algebra<Q>, &Algebra<Q>, &Morphism<Q>, &PhiBimodule<Q>)> {
        let entry = self.phi_bimodules.get(name)?;
        let (a, b, phi) = self.morphism_objects(&entry.morphism)?;
        Some((a, b, phi, &entry.coefficients))
    }

    fn check_fresh(&self, name: &str) -> Result<(), String> {
        let taken = [
            ("algebras", self.algebras.contains_key(name)),
            ("bimodules", self.bimodules.contains_key(name)),
            ("morphisms", self.morphisms.contains_key(name)),
            ("phi_bimodules", self.phi_bimodules.contains_key(name)),
            ("deformations", self.deformations.contains_key(name)),
        ];
        match taken.iter().find(|(_, hit)| *hit) {
            Some((section, _)) => Err(format!(
                "duplicate name {name:?} (already defined under {section}; names are global)"
            )),
            None => Ok(()),
        }
    }

    fn resolve<'a, T>(
        map: &'a BTreeMap<String, T>,
        kind: &str,
        name: &str,
        skipped: &BTreeSet<String>,
    ) -> Result<&'a T, String> {
        map.get(name).ok_or_else(|| {
            if skipped.contains(name) {
                format!("{kind} {name:?} failed validation and was skipped")
            } else {
                format!("unknown {kind} {name:?}")
            }
        })
    }

    fn try_add_algebra(&mut self, name: &str, a: Algebra<Q>) -> Result<(), String> {
        self.check_fresh(name)?;
        if a.unit().is_some() {
            let defects = a.unit_defects();
            if let Some(d) = defects.defects.first() {
                let extra = defects.defects.len() - 1;
                let tail = if extra > 0 {
                    format!(" (+{extra} more)")
                } else {
                    String::new()
                };
                return Err(format!(
                    "designated unit fails {} at basis {:?}{tail}",
                    d.law, d.indices
                ));
            }
        }
        self.algebras.insert(name.to_owned(), a);
        Ok(())
    }

    fn try_add_bimodule(
        &mut self,
        name: &str,
        algebra: &str,
        module: Bimodule<Q>,
        skipped: &BTreeSet<String>,
    ) -> Result<(), String> {
        self.check_fresh(name)?;
        let alg = Self::resolve(&self.algebras, "algebra", algebra, skipped)?;
        if module.alg_dim() != alg.dim() {
            return Err(format!(
                "bimodule actions are over a dimension-{} algebra, but {algebra:?} has dimension {}",
                module.alg_dim(),
                alg.dim()
            ));
        }
        self.bimodules.insert(
            name.to_owned(),
            BimoduleEntry {
                algebra: algebra.to_owned(),
                module,
            },
        );
        Ok(())
    }

    fn try_add_morphism(
        &mut self,
        name: &str,
        source: &str,
        target: &str,
        map: Morphism<Q>,
        skipped: &BTreeSet<String>,
    ) -> Result<(), String> {
        self.check_fresh(name)?;
        let src = Self::resolve(&self.algebras, "algebra", source, skipped)?;
        let dst = Self::resolve(&self.algebras, "algebra", target, skipped)?;
        if map.src_dim() != src.dim() || map.dst_dim() != dst.dim() {
            return Err(format!(
                "matrix is {}×{}, but {target:?} has dimension {} and {source:?} dimension {}",
                map.dst_dim(),
                map.src_dim(),
                dst.dim(),
                src.dim()
            ));
        }
        self.morphisms.insert(
            name.to_owned(),
            MorphismEntry {
                source: source.to_owned(),
                target: target.to_owned(),
                map,
            },
        );
        Ok(())
    }

    fn try_add_phi_bimodule(
        &mut self,
        name: &str,
        morphism: &str,
        m: &str,
        n: &str,
        psi: Vec<Q>,
        skipped: &BTreeSet<String>,
    ) -> Result<(), String> {
        self.check_fresh(name)?;
        let mor = Self::resolve(&self.morphisms, "morphism", morphism, skipped)?;
        let m_entry = Self::resolve(&self.bimodules, "bimodule", m, skipped)?;
        let n_entry = Self::resolve(&self.bimodules, "bimodule", n, skipped)?;
        if m_entry.algebra != mor.source {
            return Err(format!(
                "bimodule {m:?} is over algebra {:?}, but the morphism source is {:?}",
                m_entry.algebra, mor.source
            ));
        }
        if n_entry.algebra != mor.target {
            return Err(format!(
                "bimodule {n:?} is over algebra {:?}, but the morphism target is {:?}",
                n_entry.algebra, mor.target
            ));
        }
        let coefficients = PhiBimodule::new(m_entry.module.clone(), n_entry.module.clone(), psi)
            .map_err(|e| e.to_string())?;
        self.phi_bimodules.insert(
            name.to_owned(),
            PhiBimoduleEntry {
                morphism: morphism.to_owned(),
                m: m.to_owned(),
                n: n.to_owned(),
                coefficients,
            },
        );
        Ok(())
    }

    fn try_add_deformation(
        &mut self,
        name: &str,
        morphism: &str,
        deformation: TruncatedDeformation<Q>,
        skipped: &BTreeSet<String>,
    ) -> Result<(), String> {
        self.check_fresh(name)?;
        let mor = Self::resolve(&self.morphisms, "morphism", morphism, skipped)?;
        let a = Self::resolve(&self.algebras, "algebra", &mor.source, skipped)?;
        let b = Self::resolve(&self.algebras, "algebra", &mor.target, skipped)?;
        if deformation.base_a() != a {
            return Err(format!(
                "deformation base source algebra differs from {:?}",
                mor.source
            ));
        }
        if deformation.base_b() != b {
            return Err(format!(
                "deformation base target algebra differs from {:?}",
                mor.target
            ));
        }
        if deformation.base_phi() != &mor.map {
            return Err(format!("deformation base morphism differs from {morphism:?}"));
        }
        self.deformations.insert(
            name.to_owned(),
            DeformationEntry {
                morphism: morphism.to_owned(),
                deformation,
            },
        );
        Ok(())
    }

    /// Adds an algebra; the name must be globally fresh and a designated
    /// unit, if present, must actually be one.
    pub fn add_algebra(&mut self, name: &str, a: Algebra<Q>) -> Result<(), WorkspaceError> {
        self.try_add_algebra(name, a)
            .map_err(|m| single_issue("algebras", name, m))
    }

    /// Adds a bimodule over a named algebra already in the workspace.
    pub fn add_bimodule(
        &mut self,
        name: &str,
        algebra: &str,
        module: Bimodule<Q>,
    ) -> Result<(), WorkspaceError> {
        self.try_add_bimodule(name, algebra, module, &BTreeSet::new())
            .map_err(|m| single_issue("bimodules", name, m))
    }

    /// Adds a morphism between two named algebras already in the workspace.
    pub fn add_morphism(
        &mut self,
        name: &str,
        source: &str,
        target: &str,
        map: Morphism<Q>,
    ) -> Result<(), WorkspaceError> {
        self.try_add_morphism(name, source, target, map, &BTreeSet::new())
            .map_err(|m| single_issue("morphisms", name, m))
    }

    /// Adds a φ-bimodule ⟨m, n, ψ⟩ over a named morphism; `m` must be a
    /// bimodule over the morphism's source algebra and `n` over its target.
    pub fn add_phi_bimodule(
        &mut self,
        name: &str,
        morphism: &str,
        m: &str,
        n: &str,
        psi: Vec<Q>,
    ) -> Result<(), WorkspaceError> {
        self.try_add_phi_bimodule(name, morphism, m, n, psi, &BTreeSet::new())
            .map_err(|msg| single_issue("phi_bimodules", name, msg))
    }

    /// Adds a truncated deformation whose base triple must coincide with
    /// the named morphism and its endpoint algebras.
    pub fn add_deformation(
        &mut self,
        name: &str,
        morphism: &str,
        deformation: TruncatedDeformation<Q>,
    ) -> Result<(), WorkspaceError> {
        self.try_add_deformation(name, morphism, deformation, &BTreeSet::new())
            .map_err(|m| single_issue("deformations", name, m))
    }
}

// ---------------------------------------------------------------------------
// Raw document layer (serde).

type Entry3 = (usize, usize, usize, JsonValue);
type Entry2 = (usize, usize, JsonValue);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorkspace {
    field: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    algebras: Vec<RawAlgebra>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    bimodules: Vec<RawBimodule>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    morphisms: Vec<RawMorphism>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    phi_bimodules: Vec<RawPhiBimodule>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    deformations: Vec<RawDeformation>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    name: String,
    dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    mul: Vec<Entry3>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    op: Vec<Entry2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit: Option<Vec<JsonValue>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBimodule {
    name: String,
    algebra: String,
    dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    left: Vec<Entry3>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    right: Vec<Entry3>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    op: Vec<Entry2>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMorphism {
    name: String,
    source: String,
    target: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    matrix: Vec<Entry2>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhiBimodule {
    name: String,
    morphism: String,
    m: String,
    n: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    psi: Vec<Entry2>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDeformation {
    name: String,
    morphism: String,
    order: usize,
    terms: Vec<RawDeformationTerm>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDeformationTerm {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    mul_a: Vec<Entry3>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    mul_b: Vec<Entry3>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    op_a: Vec<Entry2>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    op_b: Vec<Entry2>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    phi: Vec<Entry2>,
}

// ---------------------------------------------------------------------------
// Lowering (raw → validated), collecting located issues.

fn lower_scalar(v: &JsonValue) -> Result<Q, String> {
    match v {
        JsonValue::Number(n) => n
            .as_i64()
            .map(q)
            .ok_or_else(|| format!("number {n} is not an integer (write it as \"p/q\")")),
        JsonValue::String(s) => s
            .parse::<Q>()
            .map_err(|_| format!("cannot read {s:?} as a rational \"p\" or \"p/q\"")),
        other => Err(format!("expected an integer or \"p/q\" string, found {other}")),
    }
}

struct Lowering<'a> {
    issues: &'a mut Vec<Issue>,
}

impl Lowering<'_> {
    fn push(&mut self, location: String, message: String) {
        self.issues.push(Issue { location, message });
    }

    /// Dense tensor from sparse 4-entry rows; `None` when any issue fired.
    fn sparse3(
        &mut self,
        entries: &[Entry3],
        dims: (usize, usize, usize),
        loc: &str,
        key: &str,
    ) -> Option<Vec<Q>> {
        let (d0, d1, d2) = dims;
        let mut out = vec![q(0); d0 * d1 * d2];
        let mut seen = BTreeSet::new();
        let mut ok = true;
        for (pos, (i, j, k, c)) in entries.iter().enumerate() {
            let here = format!("{loc}.{key}[{pos}]");
            if *i >= d0 || *j >= d1 || *k >= d2 {
                self.push(
                    here,
                    format!("index ({i}, {j}, {k}) outside dimensions ({d0}, {d1}, {d2})"),
                );
                ok = false;
                continue;
            }
            if !seen.insert((*i, *j, *k)) {
                self.push(here, format!("duplicate entry for index ({i}, {j}, {k})"));
                ok = false;
                continue;
            }
            match lower_scalar(c) {
                Ok(v) => out[(*i * d1 + *j) * d2 + *k] = v,
                Err(msg) => {
                    self.push(here, msg);
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }

    /// Dense matrix from sparse 3-entry rows; `None` when any issue fired.
    fn sparse2(
        &mut self,
        entries: &[Entry2],
        dims: (usize, usize),
        loc: &str,
        key: &str,
    ) -> Option<Vec<Q>> {
        let (rows, cols) = dims;
        let mut out = vec![q(0); rows * cols];
        let mut seen = BTreeSet::new();
        let mut ok = true;
        for (pos, (r, c, v)) in entries.iter().enumerate() {
            let here = format!("{loc}.{key}[{pos}]");
            if *r >= rows || *c >= cols {
                self.push(
                    here,
                    format!("index ({r}, {c}) outside shape ({rows}, {cols})"),
                );
                ok = false;
                continue;
            }
            if !seen.insert((*r, *c)) {
                self.push(here, format!("duplicate entry for index ({r}, {c})"));
                ok = false;
                continue;
            }
            match lower_scalar(v) {
                Ok(val) => out[*r * cols + *c] = val,
                Err(msg) => {
                    self.push(here, msg);
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }

    /// Dense vector of scalars of an exact length.
    fn dense(&mut self, entries: &[JsonValue], len: usize, loc: &str, key: &str) -> Option<Vec<Q>> {
        if entries.len() != len {
            self.push(
                format!("{loc}.{key}"),
                format!("has {} entries, expected {len}", entries.len()),
            );
            return None;
        }
        let mut out = Vec::with_capacity(len);
        let mut ok = true;
        for (pos, v) in entries.iter().enumerate() {
            match lower_scalar(v) {
                Ok(x) => out.push(x),
                Err(msg) => {
                    self.push(format!("{loc}.{key}[{pos}]"), msg);
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }
}

fn parse_raw(raw: &RawWorkspace) -> Result<Workspace, WorkspaceError> {
    let mut issues = Vec::new();
    let mut ws = Workspace::new();
    let mut skipped: BTreeSet<String> = BTreeSet::new();

    if raw.field != "Q" {
        issues.push(Issue {
            location: "field".to_owned(),
            message: format!(
                "unsupported field descriptor {:?}; this build computes over \"Q\"",
                raw.field
            ),
        });
    }

    for ra in &raw.algebras {
        let loc = format!("algebras.{}", ra.name);
        let before = issues.len();
        let d = ra.dim;
        let mut low = Lowering { issues: &mut issues };
        let mul = low.sparse3(&ra.mul, (d, d, d), &loc, "mul");
        let op = low.sparse2(&ra.op, (d, d), &loc, "op");
        let unit = match &ra.unit {
            None => Some(None),
            Some(u) => low.dense(u, d, &loc, "unit").map(Some),
        };
        let (Some(mul), Some(op), Some(unit)) = (mul, op, unit) else {
            debug_assert!(issues.len() > before);
            skipped.insert(ra.name.clone());
            continue;
        };
        let built = Algebra::new(d, mul, op)
            .and_then(|a| match unit {
                Some(u) => a.with_unit(u),
                None => Ok(a),
            })
            .map_err(|e| e.to_string())
            .and_then(|a| ws.try_add_algebra(&ra.name, a));
        if let Err(msg) = built {
            issues.push(Issue {
                location: loc,
                message: msg,
            });
            skipped.insert(ra.name.clone());
        }
    }

    for rb in &raw.bimodules {
        let loc = format!("bimodules.{}", rb.name);
        let da = match Workspace::resolve(&ws.algebras, "algebra", &rb.algebra, &skipped) {
            Ok(a) => a.dim(),
            Err(msg) => {
                issues.push(Issue {
                    location: loc,
                    message: msg,
                });
                skipped.insert(rb.name.clone());
                continue;
            }
        };
        let dm = rb.dim;
        let mut low = Lowering { issues: &mut issues };
        let left = low.sparse3(&rb.left, (da, dm, dm), &loc, "left");
        let right = low.sparse3(&rb.right, (dm, da, dm), &loc, "right");
        let op = low.sparse2(&rb.op, (dm, dm), &loc, "op");
        let (Some(left), Some(right), Some(op)) = (left, right, op) else {
            skipped.insert(rb.name.clone());
            continue;
        };
        let built = Bimodule::new(da, dm, left, right, op)
            .map_err(|e| e.to_string())
            .and_then(|m| ws.try_add_bimodule(&rb.name, &rb.algebra, m, &skipped));
        if let Err(msg) = built {
            issues.push(Issue {
                location: loc,
                message: msg,
            });
            skipped.insert(rb.name.clone());
        }
    }

    for rm in &raw.morphisms {
        let loc = format!("morphisms.{}", rm.name);
        let dims = Workspace::resolve(&ws.algebras, "algebra", &rm.source, &skipped)
            .and_then(|s| {
                Workspace::resolve(&ws.algebras, "algebra", &rm.target, &skipped)
                    .map(|t| (s.dim(), t.dim()))
            });
        let (src, dst) = match dims {
            Ok(d) => d,
            Err(msg) => {
                issues.push(Issue {
                    location: loc,
                    message: msg,
                });
                skipped.insert(rm.name.clone());
                continue;
            }
        };
        let mut low = Lowering { issues: &mut issues };
        let Some(mat) = low.sparse2(&rm.matrix, (dst, src), &loc, "matrix") else {
            skipped.insert(rm.name.clone());
            continue;
        };
        let built = Morphism::new(src, dst, mat)
            .map_err(|e| e.to_string())
            .and_then(|map| ws.try_add_morphism(&rm.name, &rm.source, &rm.target, map, &skipped));
        if let Err(msg) = built {
            issues.push(Issue {
                location: loc,
                message: msg,
            });
            skipped.insert(rm.name.clone());
        }
    }

    for rp in &raw.phi_bimodules {
        let loc = format!("phi_bimodules.{}", rp.name);
        let dims = Workspace::resolve(&ws.bimodules, "bimodule", &rp.m, &skipped)
            .and_then(|m| {
                Workspace::resolve(&ws.bimodules, "bimodule", &rp.n, &skipped)
                    .map(|n| (m.module.dim(), n.module.dim()))
            });
        let (dm, dn) = match dims {
            Ok(d) => d,
            Err(msg) => {
                issues.push(Issue {
                    location: loc,
                    message: msg,
                });
                skipped.insert(rp.name.clone());
                continue;
            }
        };
        let mut low = Lowering { issues: &mut issues };
        let Some(psi) = low.sparse2(&rp.psi, (dn, dm), &loc, "psi") else {
            skipped.insert(rp.name.clone());
            continue;
        };
        if let Err(msg) =
            ws.try_add_phi_bimodule(&rp.name, &rp.morphism, &rp.m, &rp.n, psi, &skipped)
        {
            issues.push(Issue {
                location: loc,
                message: msg,
            });
            skipped.insert(rp.name.clone());
        }
    }

    for rd in &raw.deformations {
        let loc = format!("deformations.{}", rd.name);
        let ctx = Workspace::resolve(&ws.morphisms, "morphism", &rd.morphism, &skipped)
            .map(|m| (m.source.clone(), m.target.clone()))
            .and_then(|(s, t)| {
                let a = Workspace::resolve(&ws.algebras, "algebra", &s, &skipped)?.clone();
                let b = Workspace::resolve(&ws.algebras, "algebra", &t, &skipped)?.clone();
                Ok((a, b))
            });
        let (a, b) = match ctx {
            Ok(c) => c,
            Err(msg) => {
                issues.push(Issue {
                    location: loc,
                    message: msg,
                });
                skipped.insert(rd.name.clone());
                continue;
            }
        };
        if rd.order == 0 || rd.order != rd.terms.len() {
            issues.push(Issue {
                location: loc,
                message: format!(
                    "order is {} but {} term blocks are given (need one per order ≥ 1)",
                    rd.order,
                    rd.terms.len()
                ),
            });
            skipped.insert(rd.name.clone());
            continue;
        }
        let (da, db) = (a.dim(), b.dim());
        let mut mul_a = Vec::new();
        let mut mul_b = Vec::new();
        let mut op_a = Vec::new();
        let mut op_b = Vec::new();
        let mut phi = Vec::new();
        let mut ok = true;
        for (k, term) in rd.terms.iter().enumerate() {
            let tloc = format!("{loc}.terms[{k}]");
            let mut low = Lowering { issues: &mut issues };
            let ma = low.sparse3(&term.mul_a, (da, da, da), &tloc, "mul_a");
            let mb = low.sparse3(&term.mul_b, (db, db, db), &tloc, "mul_b");
            let pa = low.sparse2(&term.op_a, (da, da), &tloc, "op_a");
            let pb = low.sparse2(&term.op_b, (db, db), &tloc, "op_b");
            let ph = low.sparse2(&term.phi, (db, da), &tloc, "phi");
            match (ma, mb, pa, pb, ph) {
                (Some(ma), Some(mb), Some(pa), Some(pb), Some(ph)) => {
                    mul_a.push(ma);
                    mul_b.push(mb);
                    op_a.push(pa);
                    op_b.push(pb);
                    phi.push(ph);
                }
                _ => ok = false,
            }
        }
        if !ok {
            skipped.insert(rd.name.clone());
            continue;
        }
        let phi_map = ws.morphisms[&rd.morphism].map.clone();
        let built =
            TruncatedDeformation::new(&a, &b, &phi_map, rd.order, mul_a, mul_b, op_a, op_b, phi)
                .map_err(|e| e.to_string())
                .and_then(|d| ws.try_add_deformation(&rd.name, &rd.morphism, d, &skipped));
        if let Err(msg) = built {
            issues.push(Issue {
                location: loc,
                message: msg,
            });
            skipped.insert(rd.name.clone());
        }
    }

    if issues.is_empty() {
        Ok(ws)
    } else {
        Err(WorkspaceError::Invalid(issues))
    }
}

/// Parses and validates a workspace document from a string.
pub fn parse_workspace_str(text: &str) -> Result<Workspace, WorkspaceError> {
    let raw: RawWorkspace =
        serde_json::from_str(text).map_err(|e| WorkspaceError::Syntax(e.to_string()))?;
    parse_raw(&raw)
}

/// Parses and validates the workspace document at `path`.
pub fn parse_workspace(path: impl AsRef<Path>) -> Result<Workspace, WorkspaceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| WorkspaceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_workspace_str(&text)
}

// ---------------------------------------------------------------------------
// Emission (validated → raw → text).

fn scalar_out(v: &Q) -> JsonValue {
    JsonValue::String(v.to_string())
}

fn sparse3_out(tensor: &[Q], dims: (usize, usize, usize)) -> Vec<Entry3> {
    let (d0, d1, d2) = dims;
    let mut out = Vec::new();
    for i in 0..d0 {
        for j in 0..d1 {
            for k in 0..d2 {
                let v = &tensor[(i * d1 + j) * d2 + k];
                if !num::Zero::is_zero(v) {
                    out.push((i, j, k, scalar_out(v)));
                }
            }
        }
    }
    out
}

fn sparse2_out(mat: &[Q], dims: (usize, usize)) -> Vec<Entry2> {
    let (rows, cols) = dims;
    let mut out = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = &mat[r * cols + c];
            if !num::Zero::is_zero(v) {
                out.push((r, c, scalar_out(v)));
            }
        }
    }
    out
}

fn to_raw(ws: &Workspace) -> RawWorkspace {
    let algebras = ws
        .algebras
        .iter()
        .map(|(name, a)| {
            let d = a.dim();
            RawAlgebra {
                name: name.clone(),
                dim: d,
                mul: sparse3_out(a.mul_tensor(), (d, d, d)),
                op: sparse2_out(a.op_matrix(), (d, d)),
                unit: a.unit().map(|u| u.iter().map(scalar_out).collect()),
            }
        })
        .collect();
    let bimodules = ws
        .bimodules
        .iter()
        .map(|(name, e)| {
            let (da, dm) = (e.module.alg_dim(), e.module.dim());
            RawBimodule {
                name: name.clone(),
                algebra: e.algebra.clone(),
                dim: dm,
                left: sparse3_out(e.module.left_tensor(), (da, dm, dm)),
                right: sparse3_out(e.module.right_tensor(), (dm, da, dm)),
                op: sparse2_out(e.module.op_matrix(), (dm, dm)),
            }
        })
        .collect();
    let morphisms = ws
        .morphisms
        .iter()
        .map(|(name, e)| RawMorphism {
            name: name.clone(),
            source: e.source.clone(),
            target: e.target.clone(),
            matrix: sparse2_out(e.map.matrix(), (e.map.dst_dim(), e.map.src_dim())),
        })
        .collect();
    let phi_bimodules = ws
        .phi_bimodules
        .iter()
        .map(|(name, e)| {
            let (dm, dn) = (e.coefficients.m().dim(), e.coefficients.n().dim());
            RawPhiBimodule {
                name: name.clone(),
                morphism: e.morphism.clone(),
                m: e.m.clone(),
                n: e.n.clone(),
                psi: sparse2_out(e.coefficients.psi_matrix(), (dn, dm)),
            }
        })
        .collect();
    let deformations = ws
        .deformations
        .iter()
        .map(|(name, e)| {
            let d = &e.deformation;
            let (da, db) = (d.base_a().dim(), d.base_b().dim());
            let terms = (1..=d.order())
                .map(|k| {
                    let (ma, mb, pa, pb, ph) = d.order_terms(k);
                    RawDeformationTerm {
                        mul_a: sparse3_out(ma, (da, da, da)),
                        mul_b: sparse3_out(mb, (db, db, db)),
                        op_a: sparse2_out(pa, (da, da)),
                        op_b: sparse2_out(pb, (db, db)),
                        phi: sparse2_out(ph, (db, da)),
                    }
                })
                .collect();
            RawDeformation {
                name: name.clone(),
                morphism: e.morphism.clone(),
                order: d.order(),
                terms,
            }
        })
        .collect();
    RawWorkspace {
        field: "Q".to_owned(),
        algebras,
        bimodules,
        morphisms,
        phi_bimodules,
        deformations,
    }
}

/// The index one past the closing quote of the string literal starting at
/// `start` (which must point at the opening `"`).
fn skip_string(bytes: &[u8], start: usize) -> usize {
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'"' => return i + 1,
            _ => i += 1,
        }
    }
    bytes.len()
}

/// If the array starting at `start` (an `[`) contains no nested array or
/// object, the index one past its `]`; otherwise `None`.
fn leaf_array_end(bytes: &[u8], start: usize) -> Option<usize> {
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'"' => i = skip_string(bytes, i),
            b'[' | b'{' => return None,
            b']' => return Some(i + 1),
            _ => i += 1,
        }
    }
    None
}

/// A leaf array span rewritten onto one line: `[0, 1, 1, "1"]`.
fn compact_span(span: &str) -> String {
    let bytes = span.as_bytes();
    let mut out = String::with_capacity(span.len());
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'"' => {
                let end = skip_string(bytes, i);
                out.push_str(&span[i..end]);
                i = end;
            }
            c if c.is_ascii_whitespace() => i += 1,
            b',' => {
                out.push_str(", ");
                i += 1;
            }
            c => {
                out.push(c as char);
                i += 1;
            }
        }
    }
    out
}

/// Pretty JSON with bottom-level arrays (sparse entries, unit vectors)
/// collapsed onto single lines; string literals are left untouched.
fn compact_leaf_arrays(text: &str) -> String {
    let bytes = text.as_bytes();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'"' => {
                let end = skip_string(bytes, i);
                out.push_str(&text[i..end]);
                i = end;
            }
            b'[' => match leaf_array_end(bytes, i) {
                Some(end) => {
                    out.push_str(&compact_span(&text[i..end]));
                    i = end;
                }
                None => {
                    out.push('[');
                    i += 1;
                }
            },
            c => {
                out.push(c as char);
                i += 1;
            }
        }
    }
    out
}

/// Serializes a workspace to its canonical document text: name-sorted
/// sections, row-major sparse entries on one line each, all scalars as
/// strings. Emitting the same workspace twice yields byte-identical text,
/// and parsing the result returns an equal [`Workspace`].
pub fn emit_workspace(ws: &Workspace) -> String {
    let raw = to_raw(ws);
    let text = serde_json::to_string_pretty(&raw).expect("workspace serialization cannot fail");
    let mut text = compact_leaf_arrays(&text);
    text.push('\n');
    text
}

/// Writes the canonical document for `ws` at `path`.
pub fn write_workspace(ws: &Workspace, path: impl AsRef<Path>) -> Result<(), WorkspaceError> {
    let path = path.as_ref();
    std::fs::write(path, emit_workspace(ws)).map_err(|source| WorkspaceError::Io {
        path: path.display().to_string(),
        source,
    })
}
