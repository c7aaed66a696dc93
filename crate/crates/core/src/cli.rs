//! Command-line front end: configuration, system selection, and the
//! `validate`, `quiver`, `stability`, `fiber`, `blowdown` and `suite`
//! commands.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::acceptance::{blowdown_checks, report_line, run_all, Criterion, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::fixtures::{default_surface, table1_system};
use crate::linalg::{parse_q, Q};
use crate::moduli::exceptional_fiber_analysis;
use crate::picard::{check_general_position, DivisorClass, SurfaceConfig};
use crate::pipeline::{auto_weight, chain_steps, Step, PLANE_TORIC};
use crate::quiver::{build_quiver_of_sections, QuiverOfSections};
use crate::sections::SurfacePoint;
use crate::stability::{check_stability, fine_moduli_check, tautological_rep, Weight};
use crate::toric_system::{
    from_collection, is_cyclic_strong, reduce_to_plane, technical_condition, validate_toric_system,
    Collection, ToricSystem,
};

/// Exit status of a completed run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "dpquiver", version, about = "Quivers of sections on blow-ups of the plane")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Fixture row by degree (9 down to 3).
    #[arg(long, global = true)]
    pub table1: Option<u32>,
    /// Line bundles of the collection, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub collection: Option<Vec<String>>,
    /// Seed of every sampled check.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Weight `theta`, comma separated, or `auto`.
    #[arg(long, global = true, conflicts_with = "toric")]
    pub weight: Option<String>,
    /// Weight by its toric form, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub toric: Option<Vec<i64>>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Toric-system axioms, strong left-orthogonality and Hom audits.
    Validate,
    /// Quiver of sections as DOT or JSON.
    Quiver {
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
    /// Stability of a tautological representation.
    Stability {
        /// Plane point `x,y,z`.
        #[arg(long, conflicts_with = "exceptional", allow_hyphen_values = true)]
        point: Option<String>,
        /// Point `a,v` of `E_a`: the tangent direction `[1 : v]` at the center.
        #[arg(long, allow_hyphen_values = true)]
        exceptional: Option<String>,
    },
    /// Analysis of the locus `r_e = 0`.
    Fiber,
    /// Blow-down map and its sampled checks.
    Blowdown,
    /// Every acceptance criterion.
    Suite,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dot,
    Json,
}

/// Weight selection: `"auto"` or an explicit `theta`.
#[derive(Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(untagged)]
pub enum WeightSpec {
    Named(String),
    Theta(Vec<i64>),
}

/// Contents of the TOML configuration file.
#[derive(Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Integer homogeneous coordinates of the centers.
    pub centers: Option<Vec<[i64; 3]>>,
    pub collection: Option<Vec<String>>,
    pub table1_row: Option<u32>,
    pub weight: Option<WeightSpec>,
    pub toric: Option<Vec<i64>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Commands run when none is given on the command line.
    pub commands: Option<Vec<String>>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Resolved inputs of one run.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub system: Option<(ToricSystem, SurfaceConfig)>,
    pub weight: Option<WeightSpec>,
    pub toric: Option<Vec<i64>>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

fn lattice_rank(entries: &[String]) -> usize {
    entries
        .iter()
        .flat_map(|s| {
            s.split(|c: char| !c.is_ascii_alphanumeric())
                .filter_map(|t| t.strip_prefix('E'))
                .filter_map(|t| t.parse::<usize>().ok())
                .collect::<Vec<_>>()
        })
        .max()
        .unwrap_or(0)
}

/// Merges flags over the configuration file.
pub fn resolve(cli: &Cli) -> Result<Resolved> {
    let file = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let table1 = cli.table1.or(if cli.collection.is_some() { None } else { file.table1_row });
    let collection = cli
        .collection
        .clone()
        .or(if cli.table1.is_some() { None } else { file.collection.clone() });
    if table1.is_some() && collection.is_some() {
        return Err(Error::Config("give either a collection or a table1_row, not both".into()));
    }
    let system = match (table1, collection) {
        (Some(d), None) => {
            let (ts, cfg) = table1_system(d)?;
            let cfg = match &file.centers {
                Some(c) => surface(c, cfg.r())?,
                None => cfg,
            };
            Some((ts, cfg))
        }
        (None, Some(entries)) => {
            let r = match &file.centers {
                Some(c) => c.len(),
                None => lattice_rank(&entries),
            };
            let cfg = match &file.centers {
                Some(c) => surface(c, r)?,
                None => default_surface(r)?,
            };
            let d = entries
                .iter()
                .map(|s| DivisorClass::parse(s.trim(), r))
                .collect::<Result<Vec<_>>>()?;
            Some((from_collection(&Collection::new(d))?, cfg))
        }
        _ => None,
    };
    let weight = match &cli.weight {
        Some(s) => Some(parse_weight_flag(s)?),
        None if cli.toric.is_some() => None,
        None => file.weight.clone(),
    };
    let toric = if cli.weight.is_some() { None } else { cli.toric.clone().or(file.toric.clone()) };
    if weight.is_some() && toric.is_some() {
        return Err(Error::Config("give either a weight or a toric form, not both".into()));
    }
    Ok(Resolved {
        system,
        weight,
        toric,
        seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        out: cli.out.clone().or(file.out),
    })
}

fn surface(centers: &[[i64; 3]], r: usize) -> Result<SurfaceConfig> {
    if centers.len() != r {
        return Err(Error::Config(format!(
            "{} centers given for a surface with {r} exceptional classes",
            centers.len()
        )));
    }
    SurfaceConfig::from_integers(centers)
}

fn parse_weight_flag(s: &str) -> Result<WeightSpec> {
    if s.trim() == "auto" {
        return Ok(WeightSpec::Named("auto".into()));
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Config(format!("weight entry '{t}' is not an integer")))
        })
        .collect::<Result<Vec<_>>>()
        .map(WeightSpec::Theta)
}

fn parse_rationals(s: &str, n: usize) -> Result<Vec<Q>> {
    let v: Vec<Q> = s
        .split(',')
        .map(|t| parse_q(t.trim()).ok_or_else(|| Error::Config(format!("'{t}' is not a rational number"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::Config(format!("expected {n} comma-separated values, got {}", v.len())));
    }
    Ok(v)
}

impl Resolved {
    fn system(&self) -> Result<&(ToricSystem, SurfaceConfig)> {
        self.system
            .as_ref()
            .ok_or_else(|| Error::Config("no system selected: use --table1, --collection or a config file".into()))
    }

    /// Weight on `ts`: explicit, toric, or the automatic chain weight.
    fn weight_for(&self, ts: &ToricSystem, cfg: &SurfaceConfig) -> Result<Weight> {
        let w = match (&self.weight, &self.toric) {
            (Some(WeightSpec::Theta(t)), _) => {
                Weight::new(t.clone()).map_err(|e| Error::Config(e.to_string()))?
            }
            (Some(WeightSpec::Named(s)), _) if s != "auto" => {
                return Err(Error::Config(format!("unknown weight '{s}'")))
            }
            (_, Some(t)) => Weight::from_toric(t),
            _ => auto_weight(ts, cfg)?,
        };
        if w.n() != ts.n() {
            return Err(Error::Config(format!(
                "weight has {} entries, the quiver has {} vertices",
                w.n(),
                ts.n()
            )));
        }
        Ok(w)
    }

    /// Last chain step of the selected system, with the run weight.
    fn top_step(&self) -> Result<Step> {
        let (ts, cfg) = self.system()?;
        let mut step = chain_steps(ts, cfg, &PLANE_TORIC)?
            .pop()
            .ok_or_else(|| Error::Config("the plane has no exceptional curve".into()))?;
        step.weight = self.weight_for(ts, cfg)?;
        Ok(step)
    }

    /// Quiver of the selected system, marked when it is an augmentation.
    fn quiver(&self) -> Result<QuiverOfSections> {
        let (ts, cfg) = self.system()?;
        if ts.r() == 0 {
            return build_quiver_of_sections(ts, cfg, None);
        }
        let chain = reduce_to_plane(ts, cfg)?;
        let meta = chain.steps.last().map(|s| s.meta.clone());
        build_quiver_of_sections(ts, cfg, meta.as_ref())
    }
}

/// Text written by a command and whether its checks passed.
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Error::Internal(format!("serialization: {e}")))
}

#[derive(Serialize)]
struct ValidateReport {
    system: String,
    toric: crate::toric_system::ToricReport,
    cyclic_strong: bool,
    technical_condition: bool,
    general_position: bool,
    chain: Vec<String>,
    chain_warnings: Vec<String>,
    hom_audit: crate::quiver::HomAudit,
    pass: bool,
}

#[derive(Serialize)]
struct QuiverReport<'a> {
    dot: String,
    relations: Vec<String>,
    quiver: &'a QuiverOfSections,
}

#[derive(Serialize)]
struct StabilityOutput {
    point: SurfacePoint,
    theta: Vec<i64>,
    fine: bool,
    values: Vec<String>,
    report: crate::stability::StabilityReport,
}

#[derive(Serialize)]
struct SuiteReport {
    seed: u64,
    criteria: Vec<Criterion>,
    pass: bool,
}

/// Runs one command on resolved inputs.
pub fn run_command(res: &Resolved, cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Validate => {
            let (ts, cfg) = res.system()?;
            let toric = validate_toric_system(ts);
            let chain = reduce_to_plane(ts, cfg)?;
            let hom_audit = build_quiver_of_sections(ts, cfg, None)?.hom_dimension_audit();
            let general_position = check_general_position(cfg).ok;
            let pass = toric.pass && hom_audit.pass && general_position;
            let report = ValidateReport {
                system: ts.to_string(),
                cyclic_strong: is_cyclic_strong(ts),
                technical_condition: technical_condition(ts),
                general_position,
                chain: chain.steps.iter().map(|s| s.ts.to_string()).collect(),
                chain_warnings: chain.warnings,
                toric,
                hom_audit,
                pass,
            };
            Ok(Outcome { text: json(&report)?, pass })
        }
        Command::Quiver { format } => {
            let quiv = res.quiver()?;
            let dot = quiv.to_dot();
            let relations = quiv.relation_strings();
            let text = match format {
                Format::Dot => {
                    let mut s = dot;
                    for r in &relations {
                        s.push_str(&format!("// relation {r}\n"));
                    }
                    s
                }
                Format::Json => json(&QuiverReport {
                    dot,
                    relations,
                    quiver: &quiv,
                })?,
            };
            Ok(Outcome { text, pass: true })
        }
        Command::Stability { point, exceptional } => {
            let (ts, cfg) = res.system()?;
            let pt = match (point, exceptional) {
                (Some(p), None) => {
                    let v = parse_rationals(p, 3)?;
                    SurfacePoint::Plane([v[0].clone(), v[1].clone(), v[2].clone()])
                }
                (None, Some(e)) => {
                    let v = parse_rationals(e, 2)?;
                    let a = v[0]
                        .to_integer()
                        .try_into()
                        .ok()
                        .filter(|&a: &usize| a >= 1 && a <= cfg.r() && v[0].is_integer())
                        .ok_or_else(|| Error::Config(format!("no exceptional class E{}", v[0])))?;
                    SurfacePoint::Exceptional {
                        center: a - 1,
                        dir: [Q::from_integer(1.into()), v[1].clone()],
                    }
                }
                _ => return Err(Error::Config("give --point x,y,z or --exceptional a,v".into())),
            };
            pt.validate(cfg)?;
            let quiv = build_quiver_of_sections(ts, cfg, None)?;
            let w = res.weight_for(ts, cfg)?;
            let r = tautological_rep(&pt, &quiv)?;
            let report = check_stability(&r, &w, &quiv)?;
            let out = StabilityOutput {
                point: pt,
                fine: fine_moduli_check(&w).fine,
                theta: w.theta.clone(),
                values: r.values.iter().map(crate::linalg::fmt_q).collect(),
                report,
            };
            Ok(Outcome { text: json(&out)?, pass: true })
        }
        Command::Fiber => {
            let step = res.top_step()?;
            let rep = exceptional_fiber_analysis(&step.q, &step.weight, res.seed)?;
            let pass = rep.passes();
            Ok(Outcome { text: json(&rep)?, pass })
        }
        Command::Blowdown => {
            let step = res.top_step()?;
            let checks = blowdown_checks(&step, res.seed)?;
            let pass = checks.passes();
            Ok(Outcome { text: json(&checks)?, pass })
        }
        Command::Suite => {
            let criteria = run_all(res.seed);
            let pass = criteria.iter().all(|c| c.pass);
            let text = if res.out.is_some() {
                json(&SuiteReport {
                    seed: res.seed,
                    criteria,
                    pass,
                })?
            } else {
                criteria.iter().map(|c| report_line(c) + "\n").collect()
            };
            Ok(Outcome { text, pass })
        }
    }
}

fn parse_command(name: &str) -> Result<Command> {
    Ok(match name {
        "validate" => Command::Validate,
        "quiver" => Command::Quiver { format: Format::Dot },
        "fiber" => Command::Fiber,
        "blowdown" => Command::Blowdown,
        "suite" => Command::Suite,
        other => return Err(Error::Config(format!("unknown command '{other}' in config"))),
    })
}

fn emit(res: &Resolved, text: &str) -> Result<()> {
    match &res.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses arguments, runs the commands and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let res = match resolve(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let commands = match &cli.command {
        Some(c) => vec![c.clone()],
        None => {
            let file = cli.config.as_deref().map(PipelineConfig::load).transpose();
            match file.map(|f| f.and_then(|f| f.commands).unwrap_or_default()) {
                Ok(names) if !names.is_empty() => match names.iter().map(|n| parse_command(n)).collect() {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_CONFIG;
                    }
                },
                Ok(_) => {
                    eprintln!("error: no command given");
                    return EXIT_CONFIG;
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_CONFIG;
                }
            }
        }
    };
    let mut text = String::new();
    let mut pass = true;
    for cmd in &commands {
        match run_command(&res, cmd) {
            Ok(o) => {
                text.push_str(&o.text);
                pass &= o.pass;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return match e {
                    Error::Config(_) | Error::InvalidPoint(_) | Error::AmbiguousPoint(_) => EXIT_CONFIG,
                    _ => EXIT_CHECK_FAILED,
                };
            }
        }
    }
    if let Err(e) = emit(&res, &text) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    if pass {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}
