//! Front end for the `toric-kring` binary: reads fan or characteristic pair
//! JSON, runs the requested stage of the pipeline and renders the result.
//!
//! Exit status: 0 when the computation completed and every check passed,
//! 1 when validation or a check failed (or the u radius cap was hit), 2 on
//! IO and schema errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use toric_kring::charpair::{euler_characteristic, validate_char_pair, CharPair, CharPairData};
use toric_kring::fan::{to_char_pair, validate_fan, Fan, FanData};
use toric_kring::presentations::{
    adaptive_verify, build_relations, cohomology_presentation, graded_ranks_of_kring,
    kring_presentation, monomial_basis, ZModulePresentation,
};

pub mod corpus;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Fan,
    #[value(name = "charpair")]
    #[serde(rename = "charpair")]
    CharPair,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Kring,
    Cohomology,
    GrCompare,
    Basis,
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Kring => "kring",
            Command::Cohomology => "cohomology",
            Command::GrCompare => "gr-compare",
            Command::Basis => "basis",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSpec {
    pub input: PathBuf,
    /// `None` means detect from the file name or the JSON keys.
    pub kind: Option<InputKind>,
    pub command: Command,
    pub max_u_radius: u32,
    pub format: Format,
}

#[derive(Parser, Debug)]
#[command(
    name = "toric-kring",
    version,
    about = "K-rings of smooth complete fans and characteristic pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(clap::Args, Debug)]
pub struct InputArgs {
    /// Fan (`*.fan.json`) or characteristic pair (`*.cp.json`) file.
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub kind: Option<InputKind>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(clap::Args, Debug)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Largest max-norm of the vectors u used for the relations z_u.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_u_radius: u32,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Check the fan axioms, smoothness and completeness, or local standardness.
    Validate(InputArgs),
    /// Presentation of the K-ring as an abelian group.
    Kring(PipelineArgs),
    /// Presentation of the cohomology ring, degree by degree.
    Cohomology(InputArgs),
    /// Compare the graded ranks of the K-ring with the cohomology ranks.
    GrCompare(PipelineArgs),
    /// Extract a squarefree monomial basis and check it in the K-ring.
    Basis(PipelineArgs),
    /// Run every check.
    Verify(PipelineArgs),
    /// List the bundled examples, or write them to a directory.
    Examples {
        #[arg(long, value_name = "DIR")]
        write: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(message: String) -> Self {
        Outcome {
            status: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

impl Cli {
    pub fn execute(self) -> Outcome {
        let (command, args, radius) = match self.command {
            CliCommand::Examples { write, format } => return examples(write.as_deref(), format),
            CliCommand::Validate(a) => (Command::Validate, a, 3),
            CliCommand::Cohomology(a) => (Command::Cohomology, a, 3),
            CliCommand::Kring(p) => (Command::Kring, p.input, p.max_u_radius),
            CliCommand::GrCompare(p) => (Command::GrCompare, p.input, p.max_u_radius),
            CliCommand::Basis(p) => (Command::Basis, p.input, p.max_u_radius),
            CliCommand::Verify(p) => (Command::Verify, p.input, p.max_u_radius),
        };
        run(&JobSpec {
            input: args.input,
            kind: args.kind,
            command,
            max_u_radius: radius,
            format: args.format,
        })
    }
}

enum Input {
    Fan(Fan),
    CharPair(CharPair),
}

fn detect_kind(path: &Path, value: &Value) -> Option<InputKind> {
    let name = path.file_name()?.to_string_lossy();
    if name.ends_with(".fan.json") {
        return Some(InputKind::Fan);
    }
    if name.ends_with(".cp.json") {
        return Some(InputKind::CharPair);
    }
    let obj = value.as_object()?;
    match (obj.contains_key("rays"), obj.contains_key("lambda")) {
        (true, false) => Some(InputKind::Fan),
        (false, true) => Some(InputKind::CharPair),
        _ => None,
    }
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value) -> Result<T, String> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.into_inner().to_string()
        } else {
            format!("{path}: {}", e.into_inner())
        }
    })
}

fn load(path: &Path, text: &str, kind: Option<InputKind>) -> Result<(InputKind, Input), String> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| format!("malformed JSON in {}: {e}", path.display()))?;
    let kind = kind.or_else(|| detect_kind(path, &value)).ok_or_else(|| {
        format!(
            "cannot tell whether {} is a fan or a charpair; pass --kind",
            path.display()
        )
    })?;
    let input = match kind {
        InputKind::Fan => {
            let data: FanData = from_value(value)?;
            Input::Fan(Fan::from_data(&data).map_err(|e| e.to_string())?)
        }
        InputKind::CharPair => {
            let data: CharPairData = from_value(value)?;
            Input::CharPair(CharPair::from_data(&data).map_err(|e| e.to_string())?)
        }
    };
    Ok((kind, input))
}

struct Rendered {
    passed: bool,
    json: Value,
    text: String,
}

pub fn run(job: &JobSpec) -> Outcome {
    let text = match fs::read_to_string(&job.input) {
        Ok(t) => t,
        Err(e) => return Outcome::input_error(format!("cannot read {}: {e}", job.input.display())),
    };
    let (kind, input) = match load(&job.input, &text, job.kind) {
        Ok(x) => x,
        Err(e) => return Outcome::input_error(e),
    };
    let rendered = match execute(job, &input) {
        Ok(r) => r,
        Err(e) => return Outcome::input_error(e),
    };
    let stdout = match job.format {
        Format::Json => {
            let mut obj = json!({
                "command": job.command.name(),
                "input": job.input.display().to_string(),
                "input_kind": kind,
                "passed": rendered.passed,
            });
            if let (Value::Object(o), Value::Object(extra)) = (&mut obj, rendered.json) {
                o.extend(extra);
            }
            canonical_json(&obj)
        }
        Format::Text => rendered.text,
    };
    Outcome {
        status: if rendered.passed {
            EXIT_OK
        } else {
            EXIT_FAILED
        },
        stdout,
        stderr: String::new(),
    }
}

/// Pretty JSON with keys sorted at every level.
pub fn canonical_json<T: Serialize>(x: &T) -> String {
    // serde_json's Map is ordered by key unless `preserve_order` is enabled
    let value = serde_json::to_value(x).expect("serializable");
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}

fn lines(items: impl IntoIterator<Item = impl ToString>) -> String {
    items
        .into_iter()
        .map(|w| format!("  {}\n", w.to_string()))
        .collect()
}

fn fmt_set(set: &[usize]) -> String {
    let parts: Vec<String> = set.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

/// Validation gate; `Err` carries the rejection.
fn gate(input: &Input) -> Result<CharPair, Rendered> {
    match input {
        Input::Fan(fan) => {
            let report = validate_fan(fan);
            if !report.passes() {
                return Err(Rendered {
                    passed: false,
                    text: format!("fan rejected\n{}", lines(&report.witnesses)),
                    json: json!({ "stage": "validate", "fan": report }),
                });
            }
            Ok(to_char_pair(fan).expect("validated fan"))
        }
        Input::CharPair(cp) => {
            let report = validate_char_pair(cp);
            if !report.passes() {
                return Err(Rendered {
                    passed: false,
                    text: format!("characteristic pair rejected\n{}", lines(&report.witnesses)),
                    json: json!({ "stage": "validate", "char_pair": report }),
                });
            }
            Ok(cp.clone())
        }
    }
}

/// Smallest radius whose presentation is free of rank `χ`, or the cap.
fn adaptive_kring(cp: &CharPair, max_u_radius: u32) -> (ZModulePresentation, bool) {
    let chi = euler_characteristic(cp).expect("validated pair is pure");
    let mut radius = 1;
    loop {
        let rels = build_relations(cp, radius).expect("validated pair, radius >= 1");
        let pres = kring_presentation(cp, &rels);
        let reached = pres.rank() == chi && pres.is_torsion_free();
        if reached || radius >= max_u_radius {
            return (pres, reached);
        }
        radius += 1;
    }
}

fn execute(job: &JobSpec, input: &Input) -> Result<Rendered, String> {
    if job.max_u_radius == 0 {
        return Err("--max-u-radius must be at least 1".to_string());
    }
    if job.command == Command::Validate {
        return Ok(validate(input));
    }
    let cp = match gate(input) {
        Ok(cp) => cp,
        Err(r) => return Ok(r),
    };
    let chi = euler_characteristic(&cp).expect("validated pair is pure");
    let r = match job.command {
        Command::Validate => unreachable!(),
        Command::Kring => {
            let (pres, reached) = adaptive_kring(&cp, job.max_u_radius);
            let mut text = format!(
                "K-ring: {} generators, {} relation rows, u radius {}\nrank {} (euler characteristic {chi})\n",
                pres.basis_monomials.len(),
                pres.relation_matrix.rows(),
                pres.u_radius,
                pres.rank()
            );
            let torsion = pres.torsion();
            if torsion.is_empty() {
                text.push_str("torsion-free\n");
            } else {
                let _ = writeln!(text, "torsion {torsion:?}");
            }
            if !reached {
                let _ = writeln!(
                    text,
                    "rank {chi} not reached within u radius {}",
                    job.max_u_radius
                );
            }
            Rendered {
                passed: reached,
                text,
                json: json!({
                    "euler_characteristic": chi,
                    "rank": pres.rank(),
                    "torsion": pres.torsion().iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "presentation": pres,
                }),
            }
        }
        Command::Cohomology => {
            let coh = cohomology_presentation(&cp);
            let mut text = format!("cohomology ranks {}\n", coh.ranks());
            for (j, t) in coh.torsion_by_degree().iter().enumerate() {
                if !t.is_empty() {
                    let _ = writeln!(text, "degree {j} torsion {t:?}");
                }
            }
            Rendered {
                passed: true,
                text,
                json: json!({ "ranks": coh.ranks(), "presentation": coh }),
            }
        }
        Command::GrCompare => {
            let (pres, reached) = adaptive_kring(&cp, job.max_u_radius);
            let coh = cohomology_presentation(&cp).ranks();
            match graded_ranks_of_kring(&cp, &pres) {
                Ok(gr) if reached => {
                    let equal = gr == coh;
                    Rendered {
                        passed: equal,
                        text: format!("gr {gr} {} H* {coh}\n", if equal { "=" } else { "!=" }),
                        json: json!({ "kring_graded": gr, "cohomology_graded": coh, "equal": equal }),
                    }
                }
                other => {
                    let why = match other {
                        Err(e) => e.to_string(),
                        Ok(_) => format!(
                            "rank {} != {chi} within u radius {}",
                            pres.rank(),
                            job.max_u_radius
                        ),
                    };
                    Rendered {
                        passed: false,
                        text: format!("{why}\n"),
                        json: json!({ "cohomology_graded": coh, "error": why }),
                    }
                }
            }
        }
        Command::Basis => {
            let (pres, reached) = adaptive_kring(&cp, job.max_u_radius);
            let coh = cohomology_presentation(&cp);
            match monomial_basis(&cp, &coh, &pres) {
                Ok(b) => {
                    let passed = reached && b.is_kring_basis() && b.faces.len() == chi;
                    let faces: Vec<String> = b.faces.iter().map(|f| fmt_set(f)).collect();
                    Rendered {
                        passed,
                        text: format!(
                            "basis faces {}\nK-ring determinant {}\n",
                            faces.join(" "),
                            b.kring_determinant
                        ),
                        json: json!({ "basis": b }),
                    }
                }
                Err(e) => Rendered {
                    passed: false,
                    text: format!("{e}\n"),
                    json: json!({ "error": e.to_string() }),
                },
            }
        }
        Command::Verify => {
            let report = adaptive_verify(&cp, job.max_u_radius).map_err(|e| e.to_string())?;
            let yes = |b: bool| if b { "ok" } else { "FAILED" };
            let mut text = format!(
                "rank {} = χ {}: {} (u radius {})\ntorsion-free: {}\n",
                report.rank,
                report.euler_characteristic,
                yes(report.ranks_match_chi),
                report.u_radius_used,
                yes(report.torsion_free)
            );
            if let Some(gr) = &report.kring_graded {
                let _ = writeln!(
                    text,
                    "gr {gr} = H* {}: {}",
                    report.cohomology_graded,
                    yes(report.gr_matches_cohomology)
                );
            }
            let _ = writeln!(
                text,
                "absorption in degree {}: {}",
                report.dim + 1,
                yes(report.absorption)
            );
            let _ = writeln!(text, "in(z_u) = -h_u: {}", yes(report.initial_forms_match));
            if let Some(basis) = &report.basis {
                let faces: Vec<String> = basis.iter().map(|f| fmt_set(f)).collect();
                let _ = writeln!(text, "monomial basis {}", faces.join(" "));
            }
            let _ = writeln!(
                text,
                "monomial basis in K-ring: {}",
                yes(report.monomial_basis_verified)
            );
            text.push_str(&lines(&report.witnesses));
            let _ = writeln!(
                text,
                "{}",
                if report.all_passed() { "PASS" } else { "FAIL" }
            );
            Rendered {
                passed: report.all_passed(),
                text,
                json: json!({ "report": report }),
            }
        }
    };
    Ok(r)
}

fn validate(input: &Input) -> Rendered {
    match input {
        Input::Fan(fan) => {
            let report = validate_fan(fan);
            let mut json = json!({ "fan": report });
            let mut text = format!(
                "fan: {}, smooth: {}, complete: {}\n",
                report.is_fan,
                report.is_smooth.map_or("n/a".into(), |b| b.to_string()),
                report.is_complete.map_or("n/a".into(), |b| b.to_string()),
            );
            text.push_str(&lines(&report.witnesses));
            let mut passed = report.passes();
            if passed {
                let cp = to_char_pair(fan).expect("validated fan");
                let cpr = validate_char_pair(&cp);
                passed = cpr.passes();
                json["char_pair"] = serde_json::to_value(&cpr).expect("serializable");
            }
            Rendered { passed, json, text }
        }
        Input::CharPair(cp) => {
            let report = validate_char_pair(cp);
            let mut text = format!(
                "pure: {}, locally standard: {}\n",
                report.is_pure, report.is_locally_standard
            );
            text.push_str(&lines(&report.witnesses));
            Rendered {
                passed: report.passes(),
                json: json!({ "char_pair": report }),
                text,
            }
        }
    }
}

fn examples(write: Option<&Path>, format: Format) -> Outcome {
    if let Some(dir) = write {
        if let Err(e) = fs::create_dir_all(dir) {
            return Outcome::input_error(format!("cannot create {}: {e}", dir.display()));
        }
        for e in corpus::EXAMPLES {
            let path = dir.join(e.file);
            if let Err(err) = fs::write(&path, e.source) {
                return Outcome::input_error(format!("cannot write {}: {err}", path.display()));
            }
        }
    }
    let stdout = match format {
        Format::Json => canonical_json(&corpus::EXAMPLES),
        Format::Text => corpus::EXAMPLES
            .iter()
            .map(|e| {
                let expect = match e.expectation {
                    corpus::Expectation::Verify {
                        euler_characteristic,
                    } => {
                        format!("verifies, χ = {euler_characteristic}")
                    }
                    corpus::Expectation::Reject { witness_class } => {
                        format!("rejected ({witness_class})")
                    }
                };
                format!(
                    "{:<18} {:<26} {expect}: {}\n",
                    e.name, e.file, e.description
                )
            })
            .collect(),
    };
    Outcome {
        status: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}
