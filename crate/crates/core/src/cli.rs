//! `cmfuse` command-line front end.
//!
//! Exit codes: 0 ok, 1 usage, 2 parse or validation error, 3 conflicts under
//! `--fail-on-conflict`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cm::{check_component_set, check_layering, union, ComponentSet};
use crate::error::Error;
use crate::integrate::{
    align_with, detect_naming_conflicts, merge, render_alignment, Alignment, Classification,
    MergedComponent,
};
use crate::onto::{load_domain_ontology, DomainOntology};
use crate::simatch::{similarity_matrix_with, Mode, SimConfig, Verdict};
use crate::transform::{parse_ocm, transform_component, AnchorDiagnostic, ComponentOntology};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFLICT: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    Json,
    #[default]
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Literal,
    Bipartite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub mode: Mode,
    pub recursive_semantics: bool,
    pub fail_on_conflict: bool,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Literal,
            recursive_semantics: true,
            fail_on_conflict: false,
            format: Format::Text,
        }
    }
}

impl RunConfig {
    pub fn sim(&self) -> SimConfig {
        SimConfig {
            mode: self.mode,
            recursive: self.recursive_semantics,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cmfuse", version, about = "Semantic integration of business-component models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SimOpts {
    /// How member matrices are aggregated
    #[arg(long, value_enum, default_value = "literal")]
    mode: ModeArg,
    /// Fall back to syntactic similarity for composites instead of
    /// consulting the thesaurus on their members
    #[arg(long)]
    no_recursive_semantics: bool,
    /// Exit with status 3 when a homonym conflict is found
    #[arg(long)]
    fail_on_conflict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate component-set, ontology or OCM files
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Turn every component of a set into its component ontology
    Transform {
        set: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Member similarity matrix between two component ontologies
    Sim {
        ocm_a: PathBuf,
        ocm_b: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[command(flatten)]
        opts: SimOpts,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Align two component sets and write alignment.json
    Align {
        set_a: PathBuf,
        set_b: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        #[command(flatten)]
        opts: SimOpts,
    },
    /// Merge an alignment into cm_r.json and ocm_r.json
    Merge {
        alignment: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Summarize an alignment
    Report {
        alignment: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the whole chain: union, transform, align, merge, report
    Pipeline {
        set_a: PathBuf,
        set_b: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        #[command(flatten)]
        opts: SimOpts,
    },
}

impl SimOpts {
    fn config(&self, format: Format) -> RunConfig {
        RunConfig {
            mode: match self.mode {
                ModeArg::Literal => Mode::Literal,
                ModeArg::Bipartite => Mode::Bipartite,
            },
            recursive_semantics: !self.no_recursive_semantics,
            fail_on_conflict: self.fail_on_conflict,
            format,
        }
    }
}

/// Failure of a command: each diagnostic line goes to stderr.
struct Failure {
    code: i32,
    lines: Vec<String>,
}

impl Failure {
    fn input(line: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            lines: vec![line.into()],
        }
    }
}

type CmdResult = Result<i32, Failure>;

fn color_enabled() -> bool {
    std::env::var("CMFUSE_COLOR").is_ok_and(|v| v == "1")
}

fn describe(path: &Path, err: &Error) -> String {
    match err {
        Error::Syntax {
            line,
            column,
            message,
        } => format!("{}:{line}:{column}: error: {message}", path.display()),
        other => format!("{}: error: {other}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: error: cannot read: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::input(format!("{}: error: cannot write: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::input(format!("{}: error: cannot create: {e}", dir.display())))
}

fn load_set(path: &Path) -> Result<ComponentSet, Failure> {
    check_component_set(&read(path)?).map_err(|errs| Failure {
        code: EXIT_INPUT,
        lines: errs.iter().map(|e| describe(path, e)).collect(),
    })
}

fn load_domain(path: &Path) -> Result<DomainOntology, Failure> {
    load_domain_ontology(&read(path)?).map_err(|e| Failure::input(describe(path, &e)))
}

fn load_ocm(path: &Path) -> Result<ComponentOntology, Failure> {
    parse_ocm(&read(path)?).map_err(|e| Failure::input(describe(path, &e)))
}

fn load_alignment(path: &Path) -> Result<Alignment, Failure> {
    Alignment::from_json(&read(path)?).map_err(|e| Failure::input(describe(path, &e)))
}

fn file_stem_for(ocm: &ComponentOntology) -> String {
    let clean = |s: &str| -> String {
        s.chars()
            .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect()
    };
    format!("{}.{}.ocm.json", clean(&ocm.source), clean(&ocm.origin))
}

fn cmd_validate(files: &[PathBuf], out: &mut dyn Write) -> CmdResult {
    let mut problems = Vec::new();
    for path in files {
        let text = match read(path) {
            Ok(t) => t,
            Err(f) => {
                problems.extend(f.lines);
                continue;
            }
        };
        let value: serde_json::Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(e) => {
                problems.push(describe(path, &Error::from_json(e)));
                continue;
            }
        };
        if value.get("concepts").is_some() {
            match load_domain_ontology(&text) {
                Ok(od) => {
                    let _ = writeln!(out, "{}: ok (ontology, {} concepts)", path.display(), od.concepts().len());
                }
                Err(e) => problems.push(describe(path, &e)),
            }
        } else if value.get("root").is_some() {
            match parse_ocm(&text) {
                Ok(ocm) => {
                    let _ = writeln!(out, "{}: ok (ocm {})", path.display(), ocm.path());
                }
                Err(e) => problems.push(describe(path, &e)),
            }
        } else {
            match check_component_set(&text) {
                Ok(set) => {
                    let _ = writeln!(out, "{}: ok ({} components)", path.display(), set.len());
                    for w in check_layering(&set) {
                        let _ = writeln!(out, "{}: {w}", path.display());
                    }
                }
                Err(errs) => problems.extend(errs.iter().map(|e| describe(path, e))),
            }
        }
    }
    if problems.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(Failure {
            code: EXIT_INPUT,
            lines: problems,
        })
    }
}

fn transform_set(
    set: &ComponentSet,
    od: &DomainOntology,
) -> (Vec<ComponentOntology>, Vec<AnchorDiagnostic>) {
    let mut ocms = Vec::with_capacity(set.len());
    let mut diagnostics = Vec::new();
    for cm in &set.components {
        let (ocm, diags) = transform_component(cm, od);
        ocms.push(ocm);
        diagnostics.extend(diags);
    }
    (ocms, diagnostics)
}

fn cmd_transform(set: &Path, domain: &Path, dir: &Path, err: &mut dyn Write) -> CmdResult {
    let set = load_set(set)?;
    let od = load_domain(domain)?;
    let (ocms, diagnostics) = transform_set(&set, &od);
    for d in diagnostics {
        let _ = writeln!(err, "warning: {d}");
    }
    ensure_dir(dir)?;
    for ocm in &ocms {
        write_file(&dir.join(file_stem_for(ocm)), &ocm.to_json())?;
    }
    Ok(EXIT_OK)
}

fn cmd_sim(a: &Path, b: &Path, domain: &Path, cfg: RunConfig, out: &mut dyn Write) -> CmdResult {
    let a = load_ocm(a)?;
    let b = load_ocm(b)?;
    let od = load_domain(domain)?;
    let m = similarity_matrix_with(&a, &b, &od, cfg.sim());
    let rendered = match cfg.format {
        Format::Json => m.to_json(),
        Format::Text => m.render_text(color_enabled()),
    };
    let _ = out.write_all(rendered.as_bytes());
    if cfg.fail_on_conflict && m.verdict == Verdict::NotSynonym && m.same_name() {
        return Ok(EXIT_CONFLICT);
    }
    Ok(EXIT_OK)
}

/// Union, transform and align two sets. Hint problems found during transformation are
/// appended to the alignment diagnostics; ambiguity is already reported by alignment.
fn align_sets(a: &Path, b: &Path, domain: &Path, cfg: RunConfig) -> Result<Alignment, Failure> {
    let a = load_set(a)?;
    let b = load_set(b)?;
    let od = load_domain(domain)?;
    let all = union(&a, &b).map_err(|e| Failure::input(format!("error: {e}")))?;
    let (ocms, diagnostics) = transform_set(&all, &od);
    let mut al = align_with(&ocms, &od, cfg.sim());
    for w in check_layering(&all) {
        al.diagnostics.push(w.to_string());
    }
    al.diagnostics.extend(
        diagnostics
            .into_iter()
            .filter(|d| !matches!(d, AnchorDiagnostic::Ambiguous { .. }))
            .map(|d| d.to_string()),
    );
    Ok(al)
}

fn conflict_exit(al: &Alignment, cfg: RunConfig) -> i32 {
    if cfg.fail_on_conflict && al.count(Classification::HomonymConflict) > 0 {
        EXIT_CONFLICT
    } else {
        EXIT_OK
    }
}

fn cmd_align(a: &Path, b: &Path, domain: &Path, dir: &Path, cfg: RunConfig) -> CmdResult {
    let al = align_sets(a, b, domain, cfg)?;
    ensure_dir(dir)?;
    write_file(&dir.join("alignment.json"), &al.to_json())?;
    Ok(conflict_exit(&al, cfg))
}

fn merge_alignment(al: &Alignment) -> Result<MergedComponent, Failure> {
    merge(al, &al.ontologies).map_err(|e| Failure::input(format!("error: {e}")))
}

fn write_merged(dir: &Path, merged: &MergedComponent) -> Result<(), Failure> {
    write_file(&dir.join("cm_r.json"), &merged.result.to_json())?;
    write_file(&dir.join("ocm_r.json"), &merged.representation.to_json())
}

fn cmd_merge(alignment: &Path, dir: &Path) -> CmdResult {
    let al = load_alignment(alignment)?;
    let merged = merge_alignment(&al)?;
    ensure_dir(dir)?;
    write_merged(dir, &merged)?;
    Ok(EXIT_OK)
}

fn report_json(al: &Alignment) -> String {
    let classes = [
        Classification::Equivalent,
        Classification::SynonymPair,
        Classification::HomonymConflict,
        Classification::Distinct,
    ];
    let counts: serde_json::Map<String, serde_json::Value> = classes
        .iter()
        .map(|c| (c.as_str().to_string(), json!(al.count(*c))))
        .collect();
    let naming: Vec<_> = detect_naming_conflicts(al)
        .iter()
        .map(|c| {
            json!({
                "left": c.left.path(),
                "right": c.right.path(),
                "score": c.score.to_string(),
                "class": c.classification.as_str(),
            })
        })
        .collect();
    let value = json!({
        "root_pairs": al.roots().count(),
        "member_correspondences": al.members().count(),
        "classes": counts,
        "naming_conflicts": naming,
        "diagnostics": al.diagnostics,
    });
    let mut out = serde_json::to_string_pretty(&value).expect("report serializes");
    out.push('\n');
    out
}

fn cmd_report(alignment: &Path, format: Format, out: &mut dyn Write) -> CmdResult {
    let al = load_alignment(alignment)?;
    let text = match format {
        Format::Json => report_json(&al),
        Format::Text => render_alignment(&al, color_enabled()),
    };
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

fn render_merged(merged: &MergedComponent) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "result components: {}", merged.result.len());
    for c in &merged.result.components {
        let members: Vec<String> = c
            .attributes
            .iter()
            .map(|a| a.name.clone())
            .chain(c.operations.iter().map(|o| format!("{}()", o.name)))
            .collect();
        let _ = writeln!(out, "  {} ({}): {}", c.name, c.kind, members.join(", "));
    }
    let eqs = &merged.representation.equivalences;
    let _ = writeln!(out, "equivalences: {}", eqs.len());
    for [a, b] in eqs {
        let _ = writeln!(out, "  {a} == {b}");
    }
    out
}

fn cmd_pipeline(
    a: &Path,
    b: &Path,
    domain: &Path,
    dir: &Path,
    cfg: RunConfig,
    out: &mut dyn Write,
) -> CmdResult {
    let al = align_sets(a, b, domain, cfg)?;
    let merged = merge_alignment(&al)?;
    let report = format!("{}{}", render_alignment(&al, false), render_merged(&merged));
    ensure_dir(dir)?;
    write_file(&dir.join("alignment.json"), &al.to_json())?;
    write_merged(dir, &merged)?;
    write_file(&dir.join("report.txt"), &report)?;
    let _ = writeln!(
        out,
        "{} root pairs, {} homonym conflicts, {} result components",
        al.roots().count(),
        al.count(Classification::HomonymConflict),
        merged.result.len()
    );
    Ok(conflict_exit(&al, cfg))
}

/// Runs the CLI against explicit output streams and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };

    let result = match &cli.command {
        Command::Validate { files } => cmd_validate(files, out),
        Command::Transform { set, domain, out: dir } => cmd_transform(set, domain, dir, err),
        Command::Sim {
            ocm_a,
            ocm_b,
            domain,
            opts,
            format,
        } => cmd_sim(ocm_a, ocm_b, domain, opts.config(*format), out),
        Command::Align {
            set_a,
            set_b,
            domain,
            out: dir,
            opts,
        } => cmd_align(set_a, set_b, domain, dir, opts.config(Format::Json)),
        Command::Merge { alignment, out: dir } => cmd_merge(alignment, dir),
        Command::Report { alignment, format } => cmd_report(alignment, *format, out),
        Command::Pipeline {
            set_a,
            set_b,
            domain,
            out: dir,
            opts,
        } => cmd_pipeline(set_a, set_b, domain, dir, opts.config(Format::Text), out),
    };

    match result {
        Ok(code) => code,
        Err(failure) => {
            for line in failure.lines {
                let _ = writeln!(err, "{line}");
            }
            failure.code
        }
    }
}
