//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equivariant::{
    module_action, stable_cohomology, torsion_analysis, twisted_cohomology, CartanComplex, CohomologyResult,
    TorsionOutcome,
};
use crate::error::{Error, Result};
use crate::library;
use crate::model::{CdgaModel, FormElement};
use crate::morphisms::{localization_check, LocalizationReport};
use crate::operators::{
    basis_probes, bundled_sections, isotropy_check, purity_check, verify_cartan_relations, RelationStatus,
    CARTAN_EQUATIONS,
};
use crate::parser::{emit_model, parse_model, parse_package, ModelSource, Package};
use crate::scalar::{format_rational, ratio};
use crate::sparse::SparseVec;
use crate::validate::validate_model;

#[derive(Parser, Debug)]
#[command(name = "cartanext", version, about = "Twisted and extended-equivariant cohomology of finite models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Print machine-readable JSON instead of tables.
    #[arg(long)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse model files and check every axiom.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Cohomology of the twisted differential d − H∧.
    Cohomology {
        file: PathBuf,
        /// Twist to use: `0`, a basis element name, or omitted for the model's own H.
        #[arg(long)]
        twist: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Extended equivariant cohomology truncated at u-degree N.
    Equivariant {
        file: PathBuf,
        #[arg(short = 'N', default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Only list classes that survive from N + 1.
        #[arg(long)]
        stable: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Thom identities and localization at a fixed component.
    Localize {
        total: PathBuf,
        fixed: PathBuf,
        package: PathBuf,
        /// Thom block to use (defaults to the first one in the package).
        #[arg(long)]
        thom: Option<String>,
        #[arg(short = 'N', default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Run operator-level checks; with no selection, all of them.
    Verify {
        file: PathBuf,
        #[arg(long)]
        relations: bool,
        #[arg(long)]
        purity: bool,
        #[arg(long)]
        isotropy: bool,
        #[arg(long)]
        dsq: bool,
        /// Probe forms: `basis`, `all`, or `random:<seed>`.
        #[arg(long, default_value = "basis")]
        probes: String,
        #[arg(short = 'N', default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Write the bundled model and package files to a directory.
    Bundle {
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) => 1,
        Error::NotIsotropic { .. }
        | Error::NotPure(_)
        | Error::MultiVariableUnsupported(_)
        | Error::NonInvariantData(_)
        | Error::NonInvariantFunction(_)
        | Error::GeneratorMismatch(_)
        | Error::CapExceeded { .. }
        | Error::NotInvariantClosed(_)
        | Error::UnknownGenerator(_)
        | Error::NonConstantCoefficient => 3,
        Error::EulerNotInvertible(_) => 4,
        _ => 2,
    }
}

/// Failure with an exit code and a message for the error stream.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn source_for(path: &Path, bundled: impl Fn(&str) -> Option<&'static str>) -> Result<ModelSource> {
    if path.exists() {
        return ModelSource::from_file(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())));
    }
    let name = path.to_string_lossy();
    match bundled(&name) {
        Some(text) => Ok(ModelSource { text: text.into(), origin: format!("<bundled>/{}", file_name(path)) }),
        None => Err(Error::Io(format!("{}: no such file or bundled model", path.display()))),
    }
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Loads a model from disk, falling back to the bundled library.
pub fn load_model(path: &Path, n: Option<usize>) -> Result<CdgaModel> {
    if !path.exists() {
        if let (Some(n), Some(_)) = (n, library::model_source(&path.to_string_lossy())) {
            return library::load_model_for_truncation(&path.to_string_lossy(), n);
        }
    }
    let src = source_for(path, library::model_source)?;
    parse_model(&src).map_err(Error::Parse)
}

pub fn load_package(path: &Path, models: &[CdgaModel]) -> Result<Package> {
    let src = source_for(path, library::package_source)?;
    parse_package(&src, models).map_err(Error::Parse)
}

fn probes(m: &CdgaModel, spec: &str) -> Result<Vec<FormElement>> {
    let random = |seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..16)
            .map(|_| {
                let mut v = SparseVec::new();
                for i in 0..m.dim() {
                    if rng.gen_bool(0.5) {
                        v.add_at(i, &ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4)));
                    }
                }
                v
            })
            .collect::<Vec<_>>()
    };
    match spec {
        "basis" => Ok(basis_probes(m)),
        "all" => {
            let mut out = basis_probes(m);
            out.extend(random(0));
            Ok(out)
        }
        other => match other.strip_prefix("random:").and_then(|s| s.parse::<u64>().ok()) {
            Some(seed) => Ok(random(seed)),
            None => Err(Error::Io(format!("bad --probes value `{other}` (expected basis, all or random:<seed>)"))),
        },
    }
}

fn parity_name(p: usize) -> &'static str {
    ["even", "odd"][p]
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable report");
    writeln!(out, "{text}")
}

#[derive(Serialize)]
struct ValidateJson {
    model: String,
    valid: bool,
    checks: Vec<CheckJson>,
}

#[derive(Serialize)]
struct CheckJson {
    name: String,
    passed: bool,
    inconclusive: bool,
    witness: Option<String>,
}

fn cmd_validate(files: &[PathBuf], output: &Output, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let mut code = 0;
    let mut reports = Vec::new();
    for f in files {
        let m = match load_model(f, None) {
            Ok(m) => m,
            Err(e) => {
                writeln!(err, "{e}")?;
                code = 1;
                continue;
            }
        };
        let r = validate_model(&m);
        if let Some(c) = r.first_failure() {
            writeln!(err, "{}: axiom `{}` violated: {}", m.name(), c.axiom, c.witness.clone().unwrap_or_default())?;
            if code == 0 {
                code = 2;
            }
        }
        if output.json {
            reports.push(ValidateJson {
                model: m.name().into(),
                valid: r.is_valid(),
                checks: r
                    .checks
                    .iter()
                    .map(|c| CheckJson {
                        name: c.axiom.to_string(),
                        passed: c.passed,
                        inconclusive: c.inconclusive > 0,
                        witness: c.witness.clone(),
                    })
                    .collect(),
            });
        } else {
            let verdict = if r.is_valid() { "ok" } else { "FAILED" };
            writeln!(out, "{}: {verdict} ({} basis elements)", m.name(), m.dim())?;
            for c in &r.checks {
                let status = match (c.passed, c.inconclusive > 0) {
                    (true, false) => "pass",
                    (true, true) => "inconclusive",
                    _ => "FAIL",
                };
                writeln!(out, "  {:<22} {status}", c.axiom)?;
            }
        }
    }
    if output.json {
        print_json(out, &reports)?;
    }
    Ok(code)
}

#[derive(Serialize)]
struct TwistedJson {
    model: String,
    twist: String,
    classes: Vec<TwistedBlock>,
}

#[derive(Serialize)]
struct TwistedBlock {
    parity: &'static str,
    rank: usize,
    representatives: Vec<String>,
}

fn resolve_twist(m: &CdgaModel, twist: Option<&str>) -> Result<FormElement> {
    match twist {
        None => Ok(m.h().clone()),
        Some("0") => Ok(FormElement::new()),
        Some(name) => match m.index_of(name) {
            Some(i) if m.degree(i) % 2 == 1 => Ok(SparseVec::unit(i)),
            Some(_) => Err(Error::Structural(format!("twist `{name}` must have odd degree"))),
            None => Err(Error::Io(format!("unknown twist `{name}`: expected 0 or a basis element"))),
        },
    }
}

fn cmd_cohomology(file: &Path, twist: Option<&str>, output: &Output, out: &mut dyn Write) -> CmdResult {
    let m = load_model(file, None)?;
    validate_model(&m).into_result()?;
    let h = resolve_twist(&m, twist)?;
    let r = twisted_cohomology(&m, &h)?;
    if output.json {
        let classes = (0..2)
            .map(|p| TwistedBlock {
                parity: parity_name(p),
                rank: r.ranks[p],
                representatives: r.representatives[p].iter().map(|v| m.format(v)).collect(),
            })
            .collect();
        print_json(out, &TwistedJson { model: m.name().into(), twist: m.format(&h), classes })?;
    } else {
        writeln!(out, "model {}, twist H = {}", m.name(), m.format(&h))?;
        writeln!(out, "even: {}, odd: {}", r.ranks[0], r.ranks[1])?;
        for p in 0..2 {
            for v in &r.representatives[p] {
                writeln!(out, "  {:<4} {}", parity_name(p), m.format(v))?;
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct EquivariantJson {
    model: String,
    truncation: usize,
    stable_only: bool,
    classes: Vec<EquivariantBlock>,
    u_action: Vec<UActionJson>,
}

#[derive(Serialize)]
struct EquivariantBlock {
    parity: &'static str,
    u_degree: usize,
    rank: usize,
    representatives: Vec<String>,
    stable: Vec<bool>,
}

#[derive(Serialize)]
struct UActionJson {
    generator: String,
    parity: &'static str,
    /// Column `i` holds the class coordinates of `u · [x_i]`, over the listed classes.
    matrix: Vec<Vec<String>>,
    edge: Vec<bool>,
}

fn listed_classes(r: &CohomologyResult, p: usize, stable_only: bool) -> Vec<usize> {
    (0..r.rank(p)).filter(|&k| !stable_only || r.classes(p)[k].stable == Some(true)).collect()
}

fn equivariant_json(r: &CohomologyResult, stable_only: bool) -> EquivariantJson {
    let m = r.model();
    let n = r.truncation();
    let mut classes = Vec::new();
    for p in 0..2 {
        let listed = listed_classes(r, p, stable_only);
        for deg in 0..=n {
            let here: Vec<usize> = listed.iter().copied().filter(|&k| r.classes(p)[k].u_degree == deg).collect();
            classes.push(EquivariantBlock {
                parity: parity_name(p),
                u_degree: deg,
                rank: here.len(),
                representatives: here.iter().map(|&k| r.representative(p, k).format(m)).collect(),
                stable: here.iter().map(|&k| r.classes(p)[k].stable == Some(true)).collect(),
            });
        }
    }
    let mut u_action = Vec::new();
    for j in 0..m.generator_count() {
        let Ok(action) = module_action(r, j) else { continue };
        for p in 0..2 {
            let listed = listed_classes(r, p, stable_only);
            let matrix = listed
                .iter()
                .map(|&col| {
                    let c = action.matrices[p].column(col);
                    listed.iter().map(|&row| format_rational(&c.coeff(row))).collect()
                })
                .collect();
            u_action.push(UActionJson {
                generator: m.generators()[j].clone(),
                parity: parity_name(p),
                matrix,
                edge: listed.iter().map(|&k| action.edge[p][k]).collect(),
            });
        }
    }
    EquivariantJson { model: m.name().into(), truncation: n, stable_only, classes, u_action }
}

fn degree_summary(r: &CohomologyResult, p: usize, stable_only: bool) -> String {
    let listed = listed_classes(r, p, stable_only);
    let mut degrees: Vec<usize> = listed.iter().map(|&k| r.classes(p)[k].u_degree).collect();
    degrees.dedup();
    match degrees.len() {
        0 => format!("{}: 0", parity_name(p)),
        1 => format!("{}: {} (u-degree {})", parity_name(p), listed.len(), degrees[0]),
        _ => {
            let list: Vec<String> = degrees.iter().map(|d| d.to_string()).collect();
            format!("{}: {} (u-degrees {})", parity_name(p), listed.len(), list.join(", "))
        }
    }
}

fn cmd_equivariant(file: &Path, n: usize, stable: bool, output: &Output, out: &mut dyn Write) -> CmdResult {
    let m = load_model(file, Some(n))?;
    validate_model(&m).into_result()?;
    let r = stable_cohomology(&m, n)?;
    if output.json {
        print_json(out, &equivariant_json(&r, stable))?;
        return Ok(0);
    }
    let which = if stable { "stable classes" } else { "all classes" };
    writeln!(out, "model {}, N = {n}, {which}", m.name())?;
    writeln!(out, "{}, {}", degree_summary(&r, 0, stable), degree_summary(&r, 1, stable))?;
    writeln!(out, "{:<9} {:>5} {:>5}", "u-degree", "even", "odd")?;
    for deg in 0..=n {
        let count = |p: usize| listed_classes(&r, p, stable).iter().filter(|&&k| r.classes(p)[k].u_degree == deg).count();
        writeln!(out, "{deg:<9} {:>5} {:>5}", count(0), count(1))?;
    }
    for p in 0..2 {
        for k in listed_classes(&r, p, stable) {
            let c = &r.classes(p)[k];
            let flag = if c.stable == Some(true) { "stable" } else { "edge" };
            writeln!(out, "  {:<4} u^{} {:<6} {}", parity_name(p), c.u_degree, flag, r.representative(p, k).format(&m))?;
        }
    }
    if m.generator_count() == 1 {
        if let Ok(t) = torsion_analysis(&r) {
            let stable_entries: Vec<_> =
                t.iter().filter(|e| !stable || r.classes(e.parity)[e.class].stable == Some(true)).collect();
            for e in stable_entries {
                let verdict = match e.outcome {
                    TorsionOutcome::Torsion(k) => format!("u^{k} annihilates"),
                    TorsionOutcome::FreeUpToTruncation => "free up to truncation".into(),
                };
                writeln!(out, "  torsion {} class {}: {verdict}", parity_name(e.parity), e.class)?;
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct LocalizeJson {
    thom: String,
    truncation: usize,
    checks: Vec<CheckJson>,
    euler_invertible: bool,
    euler_leading_power: usize,
    euler_leading_coefficient: String,
    torsion_total: [Vec<TorsionOutcome>; 2],
    torsion_fixed: [Vec<TorsionOutcome>; 2],
    kernel_torsion: Vec<TorsionOutcome>,
    cokernel_torsion: Vec<TorsionOutcome>,
    reconstruction: Vec<TorsionOutcome>,
    localized_ranks_total: [usize; 2],
    localized_ranks_fixed: [usize; 2],
    passed: bool,
    witness: Option<String>,
}

fn outcome_text(o: &TorsionOutcome) -> String {
    match o {
        TorsionOutcome::Torsion(k) => format!("torsion (u^{k})"),
        TorsionOutcome::FreeUpToTruncation => "free up to truncation".into(),
    }
}

fn all_torsion(r: &LocalizationReport) -> bool {
    r.torsion_m.iter().chain(&r.torsion_f).flatten().all(|o| matches!(o, TorsionOutcome::Torsion(_)))
}

fn cmd_localize(
    total: &Path,
    fixed: &Path,
    package: &Path,
    thom: Option<&str>,
    n: usize,
    output: &Output,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let m = load_model(total, None)?;
    let f = load_model(fixed, None)?;
    validate_model(&m).into_result()?;
    validate_model(&f).into_result()?;
    let pkg = load_package(package, &[m, f])?;
    let t = match thom {
        Some(name) => pkg.thom(name).ok_or_else(|| Error::Io(format!("package has no thom block `{name}`")))?,
        None => pkg.thom.first().ok_or_else(|| Error::Io("package has no thom block".into()))?,
    };
    let r = match localization_check(t, n) {
        Ok(r) => r,
        Err(e @ Error::EulerNotInvertible(_)) => {
            writeln!(err, "localization failed: {e}")?;
            return Ok(4);
        }
        Err(e) => return Err(e.into()),
    };
    if output.json {
        let checks = r
            .thom
            .checks
            .iter()
            .map(|c| CheckJson { name: c.name.into(), passed: c.passed, inconclusive: false, witness: c.witness.clone() })
            .collect();
        print_json(
            out,
            &LocalizeJson {
                thom: t.name.clone(),
                truncation: n,
                checks,
                euler_invertible: r.euler_invertible,
                euler_leading_power: r.euler_leading.0,
                euler_leading_coefficient: format_rational(&r.euler_leading.1),
                torsion_total: r.torsion_m.clone(),
                torsion_fixed: r.torsion_f.clone(),
                kernel_torsion: r.kernel_torsion.clone(),
                cokernel_torsion: r.cokernel_torsion.clone(),
                reconstruction: r.reconstruction.clone(),
                localized_ranks_total: r.localized_ranks_m,
                localized_ranks_fixed: r.localized_ranks_f,
                passed: r.passed(),
                witness: r.witness.clone(),
            },
        )?;
    } else {
        writeln!(out, "thom data `{}`: {} -> {}, N = {n}", t.name, t.fixed_set().name(), t.total_space().name())?;
        for c in &r.thom.checks {
            writeln!(out, "  {:<26} {}", c.name, if c.passed { "pass" } else { "FAIL" })?;
        }
        writeln!(
            out,
            "  euler class: leading term {} u^{}, invertible after inverting u",
            format_rational(&r.euler_leading.1),
            r.euler_leading.0
        )?;
        for (label, table) in [("total", &r.torsion_m), ("fixed", &r.torsion_f)] {
            for p in 0..2 {
                for (k, o) in table[p].iter().enumerate() {
                    writeln!(out, "  {label} {} class {k}: {}", parity_name(p), outcome_text(o))?;
                }
            }
        }
        let recon = r.reconstruction.iter().all(|o| matches!(o, TorsionOutcome::Torsion(0)));
        let verdict = if recon { "exact" } else { "up to torsion" };
        writeln!(out, "  reconstruction: {verdict}")?;
        if all_torsion(&r) {
            write!(out, "all stable classes torsion; ")?;
        }
        writeln!(
            out,
            "localized ranks {}/{}",
            r.localized_ranks_m[0] + r.localized_ranks_m[1],
            r.localized_ranks_f[0] + r.localized_ranks_f[1]
        )?;
    }
    if let Some(w) = &r.witness {
        writeln!(err, "localization identity failed: {w}")?;
        return Ok(4);
    }
    Ok(0)
}

#[derive(Serialize)]
struct VerifyJson {
    model: String,
    checks: Vec<CheckJson>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    file: &Path,
    selection: [bool; 4],
    probe_spec: &str,
    n: usize,
    output: &Output,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let m = load_model(file, Some(n))?;
    validate_model(&m).into_result()?;
    let [mut relations, mut purity, mut isotropy, mut dsq] = selection;
    if !selection.iter().any(|&b| b) {
        (relations, purity, isotropy, dsq) = (true, true, true, true);
    }
    let mut checks: Vec<CheckJson> = Vec::new();
    let mut code = 0;
    let mut record = |name: String, witness: Option<String>, fail_code: i32, code: &mut i32| {
        if witness.is_some() && *code == 0 {
            *code = fail_code;
        }
        checks.push(CheckJson { name, passed: witness.is_none(), inconclusive: false, witness });
    };
    if relations {
        let report = verify_cartan_relations(&m, &bundled_sections(&m), &probes(&m, probe_spec)?);
        for (i, status) in report.equations.iter().enumerate() {
            let witness = match status {
                RelationStatus::Fail(w) => Some(w.clone()),
                _ => None,
            };
            record(format!("equation {} ({})", i + 1, CARTAN_EQUATIONS[i]), witness, 2, &mut code);
        }
    }
    if purity {
        for (j, ok) in purity_check(&m)?.into_iter().enumerate() {
            let w = (!ok).then(|| {
                let dxi = m.differential(m.xi(j)).unwrap_or_default();
                let ih = m.iota(j, m.h()).unwrap_or_default();
                format!("dξ = {} but ι H = {}", m.format(&dxi), m.format(&ih))
            });
            record(format!("purity ({})", m.generators()[j]), w, 2, &mut code);
        }
    }
    if isotropy {
        let r = isotropy_check(&m)?;
        let w = r.witness.map(|(i, j, v)| format!("<δ_{i}, δ_{j}> = {v}"));
        record("isotropy".into(), w, 2, &mut code);
    }
    if dsq {
        let w = match CartanComplex::new(&m, n) {
            Ok(_) => None,
            Err(e @ Error::DSquaredNonzero(_)) => Some(e.to_string()),
            Err(e) => return Err(e.into()),
        };
        record(format!("d² = 0 at N = {n}"), w, 2, &mut code);
    }
    for c in checks.iter().filter(|c| !c.passed) {
        writeln!(err, "{} failed: {}", c.name, c.witness.clone().unwrap_or_default())?;
    }
    if output.json {
        print_json(out, &VerifyJson { model: m.name().into(), checks })?;
    } else {
        writeln!(out, "model {}", m.name())?;
        for c in &checks {
            writeln!(out, "  {:<40} {}", c.name, if c.passed { "pass" } else { "FAIL" })?;
        }
    }
    Ok(code)
}

fn cmd_bundle(dir: &Path, out: &mut dyn Write) -> CmdResult {
    std::fs::create_dir_all(dir)?;
    for (name, text) in library::generated_files() {
        std::fs::write(dir.join(&name), text)?;
        writeln!(out, "wrote {name}")?;
    }
    for (name, text) in library::PACKAGE_FILES {
        std::fs::write(dir.join(name), text)?;
        writeln!(out, "wrote {name}")?;
    }
    Ok(0)
}

/// Runs a parsed command line, writing reports to `out` and diagnostics to `err`.
pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Validate { files, output } => cmd_validate(files, output, out, err),
        Command::Cohomology { file, twist, output } => cmd_cohomology(file, twist.as_deref(), output, out),
        Command::Equivariant { file, n, stable, output } => cmd_equivariant(file, *n as usize, *stable, output, out),
        Command::Localize { total, fixed, package, thom, n, output } => {
            cmd_localize(total, fixed, package, thom.as_deref(), *n as usize, output, out, err)
        }
        Command::Verify { file, relations, purity, isotropy, dsq, probes, n, output } => {
            cmd_verify(file, [*relations, *purity, *isotropy, *dsq], probes, *n as usize, output, out, err)
        }
        Command::Bundle { out: dir } => cmd_bundle(dir, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli, out, err),
        Err(e) => {
            let _ = write!(err, "{e}");
            if e.use_stderr() {
                1
            } else {
                0
            }
        }
    }
}

/// Canonical text of a model, as `bundle` writes it.
pub fn canonical_text(m: &CdgaModel) -> String {
    emit_model(m).text
}
