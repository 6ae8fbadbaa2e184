//! `nijcoh` — checks, cohomology dimensions, deformation tools and operad
//! expansions for workspaces of finite-dimensional Nijenhuis algebras.
//!
//! Objects live in a JSON workspace document (see the `nijcoh::workspace`
//! module for the format); commands address them by name:
//!
//! ```text
//! nijcoh -w ws.json check phi
//! nijcoh -w ws.json cohomology --complex njm --object phi_reg --degrees 1..2
//! nijcoh -w ws.json cct --morphism phi --max-degree 2
//! nijcoh -w ws.json deform verify --name gauge_order2
//! nijcoh -w ws.json deform trivialize --name gauge_order2
//! nijcoh operad d2 --max-arity 4
//! nijcoh operad dP --arity 2
//! ```
//!
//! Exit status: `0` when every requested check passed, `1` when some check
//! or comparison failed, `2` for usage problems (unknown names, malformed
//! workspaces, bad flags), `3` when a computation was refused because it
//! would exceed the `NIJCOH_MEM_LIMIT` byte budget or the degree cap.
//!
//! `--format json` switches every report to a machine-readable form whose
//! tensor conventions (sparse `[r, c, "v"]` entries, string scalars) mirror
//! the workspace format, so reported gauges and expansions can be pasted
//! back into fixtures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as JsonValue};

use nijcoh::algebra::{
    check_associative, check_morphism, check_nijenhuis_bimodule, check_nijenhuis_operator,
    check_phi_bimodule, CheckReport, PhiBimodule,
};
use nijcoh::cct::{cct_report, CctContext, CctError};
use nijcoh::cochain::{cohomology_dim, CochainError, Complex};
use nijcoh::deformation::{
    trivialize, verify_deformation, DeformationError, GaugePair, TrivializeOutcome,
};
use nijcoh::field::Q;
use nijcoh::linalg::{ensure_budget, LinalgError};
use nijcoh::morphism::{njm_cohomology_dim, MorContext, MorphismError};
use nijcoh::operad::{d_p, d_squared_check, ArityBounds, Kind, OperadError};
use nijcoh::workspace::{parse_workspace, Workspace, WorkspaceError};

#[derive(Parser)]
#[command(name = "nijcoh", version, about = "Nijenhuis-algebra workspace toolkit")]
struct Cli {
    /// Workspace document to operate on (required by all commands except `operad`).
    #[arg(short, long, global = true, value_name = "PATH")]
    workspace: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every axiom check appropriate for the named object.
    Check {
        /// Name of an algebra, bimodule, morphism, φ-bimodule or deformation.
        name: String,
    },
    /// Cohomology dimensions over a degree range.
    Cohomology {
        /// Complex: alg/njo/nja take a bimodule, njm takes a φ-bimodule.
        #[arg(long, value_enum)]
        complex: ComplexArg,
        /// Name of the coefficient object.
        #[arg(long)]
        object: String,
        /// Inclusive degree range, e.g. `1..2`.
        #[arg(long, value_parser = parse_degrees)]
        degrees: (usize, usize),
    },
    /// Compare morphism cohomology with mapping-ring cohomology (regular
    /// coefficients) and verify the comparison identities.
    Cct {
        /// Name of the morphism; both endpoint algebras must carry units.
        #[arg(long)]
        morphism: String,
        /// Dimensions are compared for degrees 1..=N, identities for 0..=N.
        #[arg(long, value_name = "N")]
        max_degree: usize,
    },
    /// Verify or trivialize a truncated deformation.
    Deform {
        #[command(subcommand)]
        action: DeformAction,
    },
    /// Symbolic computations in the free operad (workspace-independent).
    Operad {
        #[command(subcommand)]
        action: OperadAction,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComplexArg {
    Alg,
    Njo,
    Nja,
    Njm,
}

#[derive(Subcommand)]
enum DeformAction {
    /// Check the deformation equations order by order.
    Verify(DeformName),
    /// Search for a gauge transporting the deformation to the trivial one.
    Trivialize(DeformName),
}

#[derive(Args)]
struct DeformName {
    /// Name of the deformation entry.
    #[arg(long)]
    name: String,
}

#[derive(Subcommand)]
enum OperadAction {
    /// Check ∂² = 0 on every generator m₂..m_N, P₁..P_N.
    D2 {
        #[arg(long, value_name = "N")]
        max_arity: usize,
    },
    /// Print the canonical expansion of ∂(P_n).
    #[command(name = "dP")]
    DP {
        #[arg(long)]
        arity: usize,
    },
}

fn parse_degrees(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected an inclusive range like 1..3, got {s:?}"))?;
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad lower degree {lo:?}"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad upper degree {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty degree range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

/// Errors that abort a command (as opposed to checks that merely fail).
enum CliError {
    /// Unknown names, missing workspace, objects of the wrong kind,
    /// malformed workspace documents — exit 2.
    Usage(String),
    /// `NIJCOH_MEM_LIMIT` or degree-cap refusal — exit 3.
    Resource(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Resource(m) => m,
        }
    }
}

fn lift_linalg(e: LinalgError) -> CliError {
    match e {
        LinalgError::ResourceLimit { .. } => CliError::Resource(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn lift_cochain(e: CochainError) -> CliError {
    match e {
        CochainError::Linalg(l) => lift_linalg(l),
        CochainError::DegreeCap { .. } => CliError::Resource(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn lift_morphism(e: MorphismError) -> CliError {
    match e {
        MorphismError::Cochain(c) => lift_cochain(c),
        other => CliError::Usage(other.to_string()),
    }
}

fn lift_cct(e: CctError) -> CliError {
    match e {
        CctError::Cochain(c) => lift_cochain(c),
        CctError::Morphism(m) => lift_morphism(m),
        other => CliError::Usage(other.to_string()),
    }
}

fn lift_deformation(e: DeformationError) -> CliError {
    match e {
        DeformationError::Cochain(c) => lift_cochain(c),
        DeformationError::Linalg(l) => lift_linalg(l),
        other => CliError::Usage(other.to_string()),
    }
}

fn lift_operad(e: OperadError) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("nijcoh: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Check { name } => cmd_check(&load(cli.workspace)?, &name, format),
        Command::Cohomology {
            complex,
            object,
            degrees,
        } => cmd_cohomology(&load(cli.workspace)?, complex, &object, degrees, format),
        Command::Cct {
            morphism,
            max_degree,
        } => cmd_cct(&load(cli.workspace)?, &morphism, max_degree, format),
        Command::Deform { action } => cmd_deform(&load(cli.workspace)?, action, format),
        Command::Operad { action } => cmd_operad(action, format),
    }
}

fn load(path: Option<PathBuf>) -> Result<Workspace, CliError> {
    let path = path.ok_or_else(|| {
        CliError::Usage("this command reads a workspace; pass --workspace <PATH>".to_owned())
    })?;
    parse_workspace(&path).map_err(|e| match e {
        WorkspaceError::Io { .. } | WorkspaceError::Syntax(_) | WorkspaceError::Invalid(_) => {
            CliError::Usage(e.to_string())
        }
    })
}

fn unknown(kind: &str, name: &str) -> CliError {
    CliError::Usage(format!("no {kind} named {name:?} in the workspace"))
}

// ---------------------------------------------------------------------------
// check

/// A rendered defect, independent of which checker produced it.
struct DefectLine {
    law: String,
    indices: Vec<usize>,
    residual: Vec<Q>,
}

fn collect<const N: usize>(reports: [CheckReport<Q>; N]) -> (usize, Vec<DefectLine>) {
    let mut checked = 0;
    let mut lines = Vec::new();
    for r in reports {
        checked += r.checked;
        for d in r.defects {
            lines.push(DefectLine {
                law: d.law.to_owned(),
                indices: d.indices,
                residual: d.residual,
            });
        }
    }
    (checked, lines)
}

fn cmd_check(ws: &Workspace, name: &str, format: Format) -> Result<bool, CliError> {
    let (kind, checked, defects) = if let Some(a) = ws.algebra(name) {
        let mut reports = vec![check_associative(a), check_nijenhuis_operator(a)];
        if a.unit().is_some() {
            reports.push(a.unit_defects());
        }
        let mut checked = 0;
        let mut lines = Vec::new();
        for r in reports {
            let (c, mut l) = collect([r]);
            checked += c;
            lines.append(&mut l);
        }
        ("algebra", checked, lines)
    } else if let Some(entry) = ws.bimodule(name) {
        let a = ws
            .algebra(&entry.algebra)
            .ok_or_else(|| unknown("algebra", &entry.algebra))?;
        let (c, l) = collect([check_nijenhuis_bimodule(a, &entry.module)]);
        ("bimodule", c, l)
    } else if let Some((a, b, phi)) = ws.morphism_objects(name) {
        // Morphism checks cover the ambient algebras too: associativity and
        // the operator identity on both sides, then the two mixed laws.
        let (c, l) = collect([
            check_associative(a),
            check_nijenhuis_operator(a),
            check_associative(b),
            check_nijenhuis_operator(b),
            check_morphism(a, b, phi),
        ]);
        ("morphism", c, l)
    } else if let Some((a, b, phi, pb)) = ws.phi_objects(name) {
        let (c, l) = collect([check_phi_bimodule(a, b, phi, pb)]);
        ("phi_bimodule", c, l)
    } else if let Some(entry) = ws.deformation(name) {
        let report = verify_deformation(&entry.deformation);
        let checked = report.checked;
        let lines = report
            .defects
            .into_iter()
            .map(|d| DefectLine {
                law: format!("{} at order {}", d.family, d.order),
                indices: d.indices,
                residual: d.residual,
            })
            .collect();
        ("deformation", checked, lines)
    } else {
        return Err(unknown("object", name));
    };

    let passed = defects.is_empty();
    match format {
        Format::Table => {
            let verdict = if passed { "PASS" } else { "FAIL" };
            println!("check {name} ({kind}): {verdict} ({checked} instances checked)");
            for d in &defects {
                println!(
                    "  {} at {:?}: residual {}",
                    d.law,
                    d.indices,
                    render_vector(&d.residual)
                );
            }
        }
        Format::Json => {
            print_json(&json!({
                "command": "check",
                "object": name,
                "kind": kind,
                "checked": checked,
                "passed": passed,
                "defects": defects.iter().map(|d| json!({
                    "law": d.law,
                    "indices": d.indices,
                    "residual": d.residual.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            }));
        }
    }
    Ok(passed)
}

fn render_vector(v: &[Q]) -> String {
    let body = v.iter().map(Q::to_string).collect::<Vec<_>>().join(", ");
    format!("({body})")
}

// ---------------------------------------------------------------------------
// cohomology

fn cmd_cohomology(
    ws: &Workspace,
    complex: ComplexArg,
    object: &str,
    (lo, hi): (usize, usize),
    format: Format,
) -> Result<bool, CliError> {
    let label = match complex {
        ComplexArg::Alg => "alg",
        ComplexArg::Njo => "njo",
        ComplexArg::Nja => "nja",
        ComplexArg::Njm => "njm",
    };
    let mut dims = Vec::new();
    match complex {
        ComplexArg::Alg | ComplexArg::Njo | ComplexArg::Nja => {
            let entry = ws.bimodule(object).ok_or_else(|| {
                if ws.phi_bimodule(object).is_some() {
                    CliError::Usage(format!(
                        "{object:?} is a φ-bimodule; complexes alg/njo/nja take a bimodule"
                    ))
                } else {
                    unknown("bimodule", object)
                }
            })?;
            let a = ws
                .algebra(&entry.algebra)
                .ok_or_else(|| unknown("algebra", &entry.algebra))?;
            let cx = match complex {
                ComplexArg::Alg => Complex::Alg,
                ComplexArg::Njo => Complex::NjO,
                _ => Complex::NjA,
            };
            for n in lo..=hi {
                dims.push((n, cohomology_dim(cx, a, &entry.module, n).map_err(lift_cochain)?));
            }
        }
        ComplexArg::Njm => {
            let (a, b, phi, pb) = ws.phi_objects(object).ok_or_else(|| {
                if ws.bimodule(object).is_some() {
                    CliError::Usage(format!(
                        "{object:?} is a bimodule; complex njm takes a φ-bimodule"
                    ))
                } else {
                    unknown("phi_bimodule", object)
                }
            })?;
            let ctx = MorContext::new(a, b, phi, pb)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            for n in lo..=hi {
                dims.push((n, njm_cohomology_dim(&ctx, n).map_err(lift_cochain)?));
            }
        }
    }

    match format {
        Format::Table => {
            for (n, d) in &dims {
                println!("H^{n}({label}, {object}) = {d}");
            }
        }
        Format::Json => {
            print_json(&json!({
                "command": "cohomology",
                "complex": label,
                "object": object,
                "dims": dims.iter().map(|(n, d)| json!({"degree": n, "dim": d}))
                    .collect::<Vec<_>>(),
            }));
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// cct

fn cmd_cct(
    ws: &Workspace,
    morphism: &str,
    max_degree: usize,
    format: Format,
) -> Result<bool, CliError> {
    let (a, b, phi) = ws
        .morphism_objects(morphism)
        .ok_or_else(|| unknown("morphism", morphism))?;
    let pb = PhiBimodule::regular(a, b, phi);
    let ctx = CctContext::new(a, b, phi, &pb).map_err(lift_cct)?;
    let report = cct_report(&ctx, max_degree).map_err(lift_cct)?;
    let passed =
        report.dimensions_agree() && report.square_commutes() && report.chain_map_holds();

    match format {
        Format::Table => {
            println!("degree  dim H(morphism)  dim H(mapping ring)  equal");
            for r in &report.rows {
                println!(
                    "{:<7} {:<16} {:<20} {}",
                    r.degree,
                    r.dim_mor,
                    r.dim_ring,
                    if r.equal { "yes" } else { "no" }
                );
            }
            for (what, checks) in [("square", &report.square), ("chain map", &report.chain)] {
                for c in checks {
                    match c.first_failure {
                        None => println!("{what} at degree {}: holds", c.degree),
                        Some(i) => {
                            println!("{what} at degree {}: FAILS at basis element {i}", c.degree)
                        }
                    }
                }
            }
            println!("cct {morphism}: {}", if passed { "PASS" } else { "FAIL" });
        }
        Format::Json => {
            let identity = |checks: &[nijcoh::cct::IdentityCheck]| {
                checks
                    .iter()
                    .map(|c| {
                        json!({
                            "degree": c.degree,
                            "holds": c.holds,
                            "first_failure": c.first_failure,
                        })
                    })
                    .collect::<Vec<_>>()
            };
            print_json(&json!({
                "command": "cct",
                "morphism": morphism,
                "passed": passed,
                "dimensions": report.rows.iter().map(|r| json!({
                    "degree": r.degree,
                    "dim_morphism": r.dim_mor,
                    "dim_mapping_ring": r.dim_ring,
                    "equal": r.equal,
                })).collect::<Vec<_>>(),
                "square": identity(&report.square),
                "chain_map": identity(&report.chain),
            }));
        }
    }
    Ok(passed)
}

// ---------------------------------------------------------------------------
// deform

fn cmd_deform(ws: &Workspace, action: DeformAction, format: Format) -> Result<bool, CliError> {
    match action {
        DeformAction::Verify(DeformName { name }) => {
            let entry = ws
                .deformation(&name)
                .ok_or_else(|| unknown("deformation", &name))?;
            let report = verify_deformation(&entry.deformation);
            let passed = report.passed();
            match format {
                Format::Table => {
                    println!(
                        "deform verify {name}: {} ({} equation instances)",
                        if passed { "PASS" } else { "FAIL" },
                        report.checked
                    );
                    for d in &report.defects {
                        println!(
                            "  {} at order {} {:?}: residual {}",
                            d.family,
                            d.order,
                            d.indices,
                            render_vector(&d.residual)
                        );
                    }
                }
                Format::Json => {
                    print_json(&json!({
                        "command": "deform verify",
                        "name": name,
                        "checked": report.checked,
                        "passed": passed,
                        "defects": report.defects.iter().map(|d| json!({
                            "family": d.family.to_string(),
                            "order": d.order,
                            "indices": d.indices,
                            "residual": d.residual.iter().map(|v| v.to_string())
                                .collect::<Vec<_>>(),
                        })).collect::<Vec<_>>(),
                    }));
                }
            }
            Ok(passed)
        }
        DeformAction::Trivialize(DeformName { name }) => {
            let entry = ws
                .deformation(&name)
                .ok_or_else(|| unknown("deformation", &name))?;
            let outcome = match trivialize(&entry.deformation) {
                Ok(outcome) => outcome,
                Err(DeformationError::NotVerified {
                    through_order,
                    defects,
                }) => {
                    // Not an abort: the named object simply fails the check.
                    match format {
                        Format::Table => println!(
                            "deform trivialize {name}: FAIL (deformation equations fail \
                             at orders ≤ {through_order}; {defects} residuals)"
                        ),
                        Format::Json => print_json(&json!({
                            "command": "deform trivialize",
                            "name": name,
                            "trivialized": false,
                            "reason": "deformation equations fail",
                            "through_order": through_order,
                            "defects": defects,
                        })),
                    }
                    return Ok(false);
                }
                Err(other) => return Err(lift_deformation(other)),
            };
            let da = entry.deformation.base_a().dim();
            let db = entry.deformation.base_b().dim();
            match outcome {
                TrivializeOutcome::Trivialized { gauge } => {
                    match format {
                        Format::Table => {
                            println!("deform trivialize {name}: PASS (gauge found)");
                            print_gauge_table(&gauge, da, db);
                        }
                        Format::Json => print_json(&json!({
                            "command": "deform trivialize",
                            "name": name,
                            "trivialized": true,
                            "gauge": gauge_json(&gauge, da, db),
                        })),
                    }
                    Ok(true)
                }
                TrivializeOutcome::Obstructed { order, .. } => {
                    match format {
                        Format::Table => println!(
                            "deform trivialize {name}: FAIL (obstructed at order {order}; \
                             the order-{order} class is not a gauge coboundary)"
                        ),
                        Format::Json => print_json(&json!({
                            "command": "deform trivialize",
                            "name": name,
                            "trivialized": false,
                            "reason": "obstructed",
                            "order": order,
                        })),
                    }
                    Ok(false)
                }
            }
        }
    }
}

fn sparse_entries(mat: &[Q], rows: usize, cols: usize) -> Vec<(usize, usize, String)> {
    let mut out = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = &mat[r * cols + c];
            if !num_is_zero(v) {
                out.push((r, c, v.to_string()));
            }
        }
    }
    out
}

fn num_is_zero(v: &Q) -> bool {
    v == &nijcoh::field::q(0)
}

fn print_gauge_table(g: &GaugePair<Q>, da: usize, db: usize) {
    for (k, (fa, fb)) in g.fa().iter().zip(g.fb()).enumerate() {
        let show = |mat: &[Q], d: usize| {
            let entries = sparse_entries(mat, d, d);
            if entries.is_empty() {
                "0".to_owned()
            } else {
                entries
                    .iter()
                    .map(|(r, c, v)| format!("[{r}, {c}, \"{v}\"]"))
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        };
        println!("  order {}: F_A {} | F_B {}", k + 1, show(fa, da), show(fb, db));
    }
}

fn gauge_json(g: &GaugePair<Q>, da: usize, db: usize) -> JsonValue {
    let side = |mats: &[Vec<Q>], d: usize| {
        mats.iter()
            .map(|m| {
                sparse_entries(m, d, d)
                    .into_iter()
                    .map(|(r, c, v)| json!([r, c, v]))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    json!({ "fa": side(g.fa(), da), "fb": side(g.fb(), db) })
}

// ---------------------------------------------------------------------------
// operad

fn cmd_operad(action: OperadAction, format: Format) -> Result<bool, CliError> {
    match action {
        OperadAction::D2 { max_arity } => {
            let bounds = ArityBounds {
                m: max_arity.max(2),
                p: max_arity.max(1),
            };
            let mut results = Vec::new();
            for n in 2..=max_arity {
                guard_operad(count_dm_terms(n))?;
                let residual = d_squared_check(Kind::M, n, bounds).map_err(lift_operad)?;
                results.push((format!("m{n}"), residual.len()));
            }
            for n in 1..=max_arity {
                guard_operad(count_dp_terms(n))?;
                let residual = d_squared_check(Kind::P, n, bounds).map_err(lift_operad)?;
                results.push((format!("P{n}"), residual.len()));
            }
            let passed = results.iter().all(|(_, terms)| *terms == 0);
            match format {
                Format::Table => {
                    for (gen, terms) in &results {
                        if *terms == 0 {
                            println!("∂²({gen}) = 0");
                        } else {
                            println!("∂²({gen}) ≠ 0 ({terms} uncancelled terms)");
                        }
                    }
                    println!(
                        "operad d2 (arity ≤ {max_arity}): {}",
                        if passed { "PASS" } else { "FAIL" }
                    );
                }
                Format::Json => print_json(&json!({
                    "command": "operad d2",
                    "max_arity": max_arity,
                    "passed": passed,
                    "results": results.iter().map(|(gen, terms)| json!({
                        "generator": gen,
                        "residual_terms": terms,
                        "zero": *terms == 0,
                    })).collect::<Vec<_>>(),
                })),
            }
            Ok(passed)
        }
        OperadAction::DP { arity } => {
            let expansion = d_p(arity).map_err(lift_operad)?;
            match format {
                Format::Table => {
                    for (tree, coeff) in expansion.terms() {
                        println!("{coeff:+}  {tree}");
                    }
                    println!("∂(P{arity}): {} terms", expansion.len());
                }
                Format::Json => print_json(&json!({
                    "command": "operad dP",
                    "arity": arity,
                    "terms": expansion.terms().map(|(tree, coeff)| json!({
                        "coeff": coeff,
                        "tree": tree.to_string(),
                    })).collect::<Vec<_>>(),
                })),
            }
            Ok(true)
        }
    }
}

/// Coarse memory guard for operad squares: the working set is on the order
/// of (first-differential terms)² trees.
fn guard_operad(first_order_terms: usize) -> Result<(), CliError> {
    ensure_budget(first_order_terms.saturating_mul(first_order_terms)).map_err(lift_linalg)
}

/// Number of monomials in ∂(m_n): one per inner generator placement.
fn count_dm_terms(n: usize) -> usize {
    (2..n).map(|j| n - j + 1).sum()
}

/// Number of monomials in ∂(P_n), counted without building trees: for each
/// ordered composition r₁+…+r_p = n (p ≥ 2) and wrap depth t, there are
/// C(p, t) slot subsets and r₁⋯r_t insertion choices.
fn count_dp_terms(n: usize) -> usize {
    fn go(remaining: usize, parts: &mut Vec<usize>, total: &mut usize) {
        if remaining == 0 {
            if parts.len() < 2 {
                return;
            }
            let p = parts.len();
            for t in 0..=p {
                let choices: usize = binomial(p, t) * parts[..t].iter().product::<usize>();
                *total += choices;
            }
            return;
        }
        for r in 1..=remaining {
            parts.push(r);
            go(remaining - r, parts, total);
            parts.pop();
        }
    }
    let mut total = 0;
    go(n, &mut Vec::new(), &mut total);
    total
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn print_json(value: &JsonValue) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization cannot fail")
    );
}
