//! `kirby`: reports on handle decompositions, Legendrian grids, genus
//! bounds and the built-in catalog of corks and plugs.
//!
//! Exit status: 0 when the report was computed, 1 on bad input, 2 when a
//! verification or move ledger finds a broken invariant.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kirby_core::adjunction::{exoticness_certificate, genus_gap, min_genus};
use kirby_core::algebra::{forms_equivalent, Equivalence};
use kirby_core::catalog::{self, Family, FamilyParams};
use kirby_core::document::{self, Document};
use kirby_core::exec::Execution;
use kirby_core::handle::InvariantReport;
use kirby_core::legendrian::stein_check;
use kirby_core::moves::{self, MoveError, MoveScript};

pub const REPORT_FORMAT: &str = "kirby-report 1";

#[derive(Debug, Parser)]
#[command(name = "kirby", version, about = "Handle calculus reports for compact Stein 4-manifolds")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Entry bound for the unimodular search in form comparisons.
    #[arg(long, global = true, default_value_t = 4)]
    search_bound: u32,
    /// Largest multiple `a` swept in exoticness certificates.
    #[arg(long, global = true, default_value_t = 5)]
    a_max: i64,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Homology, intersection form and boundary homology of a document.
    Invariants { file: PathBuf },
    /// Framing versus Thurston-Bennequin number on every 2-handle.
    Stein { file: PathBuf },
    /// Replay a move script and print the invariant ledger.
    Moves {
        file: PathBuf,
        /// Script file; defaults to the document's own [script] section.
        #[arg(long)]
        script: Option<PathBuf>,
    },
    /// Genus lower bound from `K(α)` and `α²`, or the certified gap for `(m, p, r)`.
    GenusBound(GenusArgs),
    /// Exoticness certificate for the enlarged cork pair.
    Certify(FamilyArgs),
    /// Compare two documents at the level of homeomorphism invariants.
    Compare { left: PathBuf, right: PathBuf },
    /// Emit a catalog document.
    Catalog(CatalogArgs),
    /// Run a named verification bundle.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct GenusArgs {
    #[arg(long, allow_hyphen_values = true, requires = "square", conflicts_with_all = ["m", "p", "r"])]
    k_alpha: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    square: Option<i64>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["p", "r"])]
    m: Option<i64>,
    #[arg(long)]
    p: Option<i64>,
    #[arg(long)]
    r: Option<i64>,
}

#[derive(Debug, Args, Clone, Copy)]
struct FamilyArgs {
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    #[arg(long)]
    n: i64,
    #[arg(long)]
    p: i64,
    #[arg(long, default_value_t = 0)]
    q: i64,
}

#[derive(Debug, Args)]
struct CatalogArgs {
    /// W, Wplug, C1, C2, P1 or P2.
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    m: i64,
    #[arg(long, default_value_t = 1)]
    n: i64,
    #[arg(long, default_value_t = 3)]
    p: i64,
    #[arg(long, default_value_t = 0)]
    q: i64,
    /// Emit the named demo script with its starting decomposition.
    #[arg(long, conflicts_with = "family")]
    script: Option<String>,
    /// List families and scripts.
    #[arg(long, conflicts_with_all = ["family", "script"])]
    list: bool,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
struct VerifyArgs {
    #[command(subcommand)]
    bundle: Option<Bundle>,
    /// Run every bundle at its default parameters.
    #[arg(long)]
    all: bool,
}

#[derive(Debug, Clone, Subcommand)]
enum Bundle {
    /// Twist invariance, Stein condition, boundary and rank of the enlarged cork pair.
    CorkPair(FamilyArgs),
    /// Odd versus even forms with the same boundary homology.
    Parity {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
    },
    /// Same form, torus class on one side only.
    PlugPair {
        #[arg(long, default_value_t = 10)]
        torus_bound: i64,
    },
}

/// A broken invariant or failed verification; maps to exit status 2.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format: &'static str,
    command: &'a str,
    result: &'a T,
}

struct Ctx {
    format: Format,
    search_bound: u32,
    a_max: i64,
    exec: Execution,
}

impl Ctx {
    fn emit<T: Serialize>(&self, command: &str, value: &T, text: impl FnOnce(&T) -> String) -> Result<()> {
        match self.format {
            Format::Text => print!("{}", text(value)),
            Format::Structured => {
                let env = Envelope { format: REPORT_FORMAT, command, result: value };
                println!("{}", serde_json::to_string_pretty(&env)?);
            }
        }
        Ok(())
    }
}

fn load(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    document::parse(&text).map_err(|errs| {
        let lines: Vec<String> = errs.iter().map(|e| format!("{}:{e}", path.display())).collect();
        anyhow!(lines.join("\n"))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<VerificationFailed>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        format: cli.format,
        search_bound: cli.search_bound,
        a_max: cli.a_max,
        exec: if cli.sequential { Execution::Sequential } else { Execution::default() },
    };
    match cli.command {
        Command::Invariants { file } => {
            let doc = load(&file)?;
            let report = doc.decomposition.invariant_report()?;
            ctx.emit("invariants", &report, render::invariants)
        }
        Command::Stein { file } => {
            let doc = load(&file)?;
            let report = stein_check(&doc.decomposition);
            ctx.emit("stein", &report, render::stein)
        }
        Command::Moves { file, script } => run_moves(&ctx, &file, script.as_deref()),
        Command::GenusBound(args) => run_genus(&ctx, &args),
        Command::Certify(a) => {
            let report = exoticness_certificate(a.m, a.n, a.p, a.q, ctx.a_max)?;
            ctx.emit("certify", &report, render::certificate)
        }
        Command::Compare { left, right } => {
            let (l, r) = (load(&left)?, load(&right)?);
            let cmp = compare(&l, &r, ctx.search_bound)?;
            ctx.emit("compare", &cmp, render::comparison)
        }
        Command::Catalog(args) => run_catalog(&ctx, &args),
        Command::Verify(args) => run_verify(&ctx, &args),
    }
}

fn run_moves(ctx: &Ctx, file: &Path, script: Option<&Path>) -> Result<()> {
    let doc = load(file)?;
    let script = match script {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            MoveScript::parse(&text).map_err(|e| anyhow!("{}:{e}", p.display()))?
        }
        None => doc.script.clone().ok_or_else(|| anyhow!("{} has no [script] section", file.display()))?,
    };
    match moves::replay(&doc.decomposition, &script) {
        Ok((end, ledger)) => {
            #[derive(Serialize)]
            struct Out<'a> {
                ledger: &'a moves::Ledger,
                result: String,
            }
            let out = Out { ledger: &ledger, result: document::emit(&end, None) };
            ctx.emit("moves", &out, |o| render::ledger(o.ledger, &o.result))
        }
        Err(MoveError::Violation(v)) => {
            ctx.emit("moves", &*v, |v| {
                format!(
                    "VIOLATION at step {} (`{}`): {} expected {}, went from {} to {}\n",
                    v.step, v.mv, v.quantity, v.expected, v.before, v.after
                )
            })?;
            Err(VerificationFailed(format!("step {} broke {}", v.step, v.quantity)).into())
        }
        Err(e) => Err(e.into()),
    }
}

fn run_genus(ctx: &Ctx, a: &GenusArgs) -> Result<()> {
    match (a.k_alpha, a.square, a.m, a.p, a.r) {
        (Some(k), Some(s), None, None, None) => {
            let b = min_genus(k, s)?;
            ctx.emit("genus-bound", &b, render::genus_bound)
        }
        (None, None, Some(m), Some(p), Some(r)) => {
            #[derive(Serialize)]
            struct Gap {
                m: i64,
                p: i64,
                r: i64,
                gap: i64,
            }
            let gap = Gap { m, p, r, gap: genus_gap(m, p, r)? };
            ctx.emit("genus-bound", &gap, |g| format!("genus gap for m={} p={} r={}: {}\n", g.m, g.p, g.r, g.gap))
        }
        _ => bail!("give either --k-alpha and --square, or --m, --p and --r"),
    }
}

#[derive(Serialize)]
pub struct Comparison {
    pub left: InvariantReport,
    pub right: InvariantReport,
    pub equivalence: Option<Equivalence>,
    pub verdict: &'static str,
    pub reason: String,
}

pub const DISTINGUISHED: &str = "distinguished";
pub const CONSISTENT: &str = "consistent-with-homeomorphic (Boyer-level invariants agree)";
pub const UNKNOWN: &str = "unknown";

fn compare(l: &Document, r: &Document, bound: u32) -> Result<Comparison> {
    let (a, b) = (l.decomposition.invariant_report()?, r.decomposition.invariant_report()?);
    let mut differs = Vec::new();
    if a.h1 != b.h1 {
        differs.push(format!("h1 {} vs {}", a.h1, b.h1));
    }
    if a.h2_rank != b.h2_rank {
        differs.push(format!("h2 rank {} vs {}", a.h2_rank, b.h2_rank));
    }
    if a.boundary_h1 != b.boundary_h1 {
        differs.push(format!("boundary h1 {} vs {}", a.boundary_h1, b.boundary_h1));
    }
    let equivalence = match (&a.intersection_form, &b.intersection_form) {
        (Some(x), Some(y)) if differs.is_empty() => Some(forms_equivalent(x, y, bound)?),
        _ => None,
    };
    let (verdict, reason) = if !differs.is_empty() {
        (DISTINGUISHED, differs.join("; "))
    } else {
        match &equivalence {
            Some(Equivalence::Equivalent { .. }) => (CONSISTENT, "forms are equivalent".to_string()),
            Some(Equivalence::Distinct { reason }) => (DISTINGUISHED, format!("forms differ: {reason}")),
            Some(Equivalence::Unknown { .. }) => {
                (UNKNOWN, format!("no equivalence with entries up to {bound}"))
            }
            None => (UNKNOWN, "H_1 has torsion; forms not compared".to_string()),
        }
    };
    Ok(Comparison { left: a, right: b, equivalence, verdict, reason })
}

fn run_catalog(ctx: &Ctx, a: &CatalogArgs) -> Result<()> {
    #[derive(Serialize)]
    struct Listing {
        families: Vec<&'static str>,
        scripts: Vec<&'static str>,
    }
    #[derive(Serialize)]
    struct Emitted {
        name: String,
        document: String,
    }
    if a.list {
        let l = Listing {
            families: Family::ALL.iter().map(|f| f.label()).collect(),
            scripts: catalog::scripts().iter().map(|s| s.name).collect(),
        };
        return ctx.emit("catalog", &l, |l| {
            format!("families: {}\nscripts: {}\n", l.families.join(" "), l.scripts.join(" "))
        });
    }
    let out = if let Some(name) = &a.script {
        let s = catalog::script(name).ok_or_else(|| anyhow!("no catalog script `{name}`"))?;
        let h = catalog::build(s.start)?;
        Emitted { name: s.name.to_string(), document: document::emit(&h, Some(&s.script)) }
    } else {
        let label = a.family.as_deref().ok_or_else(|| anyhow!("give a family, --script NAME or --list"))?;
        let family = Family::parse(label).ok_or_else(|| anyhow!("unknown family `{label}`"))?;
        let params = FamilyParams { family, m: a.m, n: a.n, p: a.p, q: a.q };
        let params = match family {
            Family::W => FamilyParams::cork(a.n),
            Family::WPlug => FamilyParams::plug(a.m, a.n),
            Family::P1 => FamilyParams::p1(a.m, a.n),
            Family::P2 => FamilyParams::p2(a.m, a.n),
            Family::C1 | Family::C2 => params,
        };
        let h = catalog::build(params)?;
        Emitted { name: params.name(), document: document::emit(&h, None) }
    };
    ctx.emit("catalog", &out, |e| e.document.clone())
}

#[derive(Serialize)]
#[serde(tag = "bundle", rename_all = "kebab-case")]
enum BundleReport {
    CorkPair(Box<catalog::CorkPairChecklist>),
    Parity(Box<catalog::ParityReport>),
    PlugPair(Box<catalog::PlugPairReport>),
}

impl BundleReport {
    fn passed(&self) -> bool {
        match self {
            BundleReport::CorkPair(c) => c.all_pass(),
            BundleReport::Parity(p) => p.not_homeomorphic,
            BundleReport::PlugPair(p) => p.exotic,
        }
    }

    fn name(&self) -> String {
        match self {
            BundleReport::CorkPair(c) => {
                let (m, n, p, q) = c.params;
                format!("cork-pair m={m} n={n} p={p} q={q}")
            }
            BundleReport::Parity(p) => format!("parity m={} n={}", p.m, p.n),
            BundleReport::PlugPair(_) => "plug-pair".into(),
        }
    }
}

fn run_bundle(b: &Bundle, search_bound: u32, exec: Execution) -> Result<BundleReport> {
    Ok(match b {
        Bundle::CorkPair(a) => BundleReport::CorkPair(Box::new(catalog::verify_cork_pair(a.m, a.n, a.p, a.q)?)),
        Bundle::Parity { m, n } => BundleReport::Parity(Box::new(catalog::verify_parity(*m, *n)?)),
        Bundle::PlugPair { torus_bound } => {
            BundleReport::PlugPair(Box::new(catalog::verify_plug_pair(search_bound, *torus_bound, exec)?))
        }
    })
}

/// Default bundles for `verify --all`.
fn all_bundles() -> Vec<Bundle> {
    let mut out = Vec::new();
    for (m, n, p, q) in catalog::cork_grid_params(&[3, 4], &[1, 4], &[0, 2]) {
        out.push(Bundle::CorkPair(FamilyArgs { m, n, p, q }));
    }
    for (m, n) in [(1, 2), (3, 2), (1, 4), (5, 6)] {
        out.push(Bundle::Parity { m, n });
    }
    out.push(Bundle::PlugPair { torus_bound: 10 });
    out
}

fn run_verify(ctx: &Ctx, a: &VerifyArgs) -> Result<()> {
    let bundles = match (&a.bundle, a.all) {
        (Some(b), false) => vec![b.clone()],
        (None, true) => all_bundles(),
        _ => bail!("give a bundle (cork-pair, parity, plug-pair) or --all"),
    };
    // bundles fan out; reports come back in input order
    let results = ctx.exec.map(&bundles, |b| run_bundle(b, ctx.search_bound, Execution::Sequential));
    let reports: Vec<BundleReport> = results.into_iter().collect::<Result<_>>()?;
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.name()).collect();
    ctx.emit("verify", &reports, |rs| rs.iter().map(render::bundle).collect::<Vec<_>>().join("\n"))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(VerificationFailed(failed.join(", ")).into())
    }
}
