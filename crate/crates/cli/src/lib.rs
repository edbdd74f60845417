//! The `asdim` command-line workbench.
//!
//! Every subcommand except `fmt` prints one JSON document on standard
//! output. Exit codes: 0 success, 1 domain error, 2 parse or input error,
//! 3 a verification found violations.

mod input;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use asdim_core::abelian::{rank_and_torsion, smith_normal_form, IntegerMatrix, PresentedAbelian};
use asdim_core::cover::{
    exhaustive_cover_oracle, extend_cover_by_cosets, make_interval_cover, product_cover, solve_min_diameter,
    transport_cover, verify_families, CoverCertificate, MetricTable,
};
use asdim_core::metric::{check_coarse_sandwich, r_stabilizer, rho_profile, CappedNorm, MetricContext};
use asdim_core::solvable::{asdim_bounds, hirsch_length};
use asdim_core::workbench::{parse_element, Workbench};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use input::{load_workbench, parse_matrix, parse_rational_arg, parse_t_values, read_series_json, read_table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VIOLATIONS: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "asdim",
    version,
    about = "Exact coarse-geometry workbench for finitely generated groups"
)]
pub struct Cli {
    /// Worker threads for parallel verification (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FileArg {
    /// Workbench file.
    #[arg(long, value_name = "PATH")]
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct SeriesSource {
    /// Workbench file holding the series.
    #[arg(long, value_name = "PATH", requires = "series", conflicts_with = "series_json")]
    pub file: Option<PathBuf>,
    /// Series section name.
    #[arg(long)]
    pub series: Option<String>,
    /// Series description as a JSON file.
    #[arg(long, value_name = "PATH")]
    pub series_json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weighted word norm of an element, capped.
    Norm {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        weights: String,
        #[arg(long, allow_hyphen_values = true)]
        element: String,
        #[arg(long)]
        cap: String,
    },
    /// Distance `‖x⁻¹y‖` between two elements, capped.
    Dist {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        weights: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        cap: String,
    },
    /// Closed ball at the identity in norm order.
    Ball {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        weights: String,
        #[arg(long)]
        radius: String,
        /// Report only the size.
        #[arg(long)]
        count_only: bool,
    },
    /// Distortion table `ρ₁(t)`, `ρ₂(t)` between two metrics.
    Profile {
        #[command(flatten)]
        file: FileArg,
        /// Weights of the source metric.
        #[arg(long = "d")]
        d: String,
        /// Weights of the target metric.
        #[arg(long = "dprime")]
        dprime: String,
        /// Homomorphism from the source group to the target group.
        #[arg(long)]
        hom: Option<String>,
        /// Values of t: `a..b` (integers, inclusive) or a comma list.
        #[arg(long)]
        t: String,
        #[arg(long)]
        search: String,
    },
    /// Pairwise check of `ρ₁(d) ≤ d' ≤ ρ₂(d)` on a ball.
    Sandwich {
        #[command(flatten)]
        file: FileArg,
        #[arg(long = "d")]
        d: String,
        #[arg(long = "dprime")]
        dprime: String,
        #[arg(long)]
        hom: Option<String>,
        #[arg(long)]
        radius: String,
    },
    /// Elements moving a basepoint at most R under an action by left
    /// multiplication through a homomorphism.
    Stabilizer {
        #[command(flatten)]
        file: FileArg,
        /// Homomorphism from the acting group to the acted-on group.
        #[arg(long)]
        action: String,
        /// Weights of the acted-on group.
        #[arg(long)]
        space: String,
        /// Weights of the acting group.
        #[arg(long)]
        acting: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long)]
        radius: String,
        #[arg(long)]
        search: String,
    },
    /// Interval cover of Z, or its product cover of Z^rank.
    CoverMake {
        #[arg(long = "d")]
        d: u64,
        #[arg(long, default_value_t = 1)]
        rank: usize,
    },
    /// Pointwise verification of a cover on a ball.
    CoverVerify {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        cover: String,
        /// Metric to verify in (default: the cover's own weights, else unit
        /// weights on Z^n for symbolic covers).
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        radius: String,
    },
    /// Extends a cover of the subgroup of short generators to the group.
    CoverExtend {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        weights: String,
        #[arg(long)]
        cover: String,
        /// Homomorphism to transport the cover along first.
        #[arg(long)]
        via: Option<String>,
        #[arg(long = "d")]
        d: String,
        #[arg(long)]
        radius: String,
        /// Replaces the declared diameter bound of the input cover.
        #[arg(long)]
        bound: Option<String>,
    },
    /// Minimal largest component diameter over k-colorings of a ball.
    Solve {
        #[arg(long, value_name = "PATH")]
        file: Option<PathBuf>,
        #[arg(long, requires_all = ["file", "radius"])]
        weights: Option<String>,
        #[arg(long)]
        radius: Option<String>,
        /// JSON metric table instead of a ball.
        #[arg(long, value_name = "PATH", conflicts_with = "weights")]
        table: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(long = "d")]
        d: String,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        /// Also run the exhaustive oracle (at most 16 points).
        #[arg(long)]
        oracle: bool,
    },
    /// Smith normal form with its transforms.
    Snf {
        /// Rows as `[[a,b],[c,d]]` or `a,b; c,d`.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Column count, needed for matrices without rows.
        #[arg(long)]
        cols: Option<usize>,
    },
    /// Rank, torsion and asymptotic dimension of a presented abelian group.
    Rank {
        /// Relation rows.
        #[arg(long, allow_hyphen_values = true, requires = "gens", conflicts_with = "group")]
        matrix: Option<String>,
        /// Generator count.
        #[arg(long)]
        gens: Option<usize>,
        #[arg(long, value_name = "PATH", requires = "group")]
        file: Option<PathBuf>,
        /// Abelian group section name.
        #[arg(long)]
        group: Option<String>,
    },
    /// Hirsch length of a series.
    Hirsch {
        #[command(flatten)]
        source: SeriesSource,
    },
    /// Asymptotic dimension bounds of a series with their derivation.
    Bounds {
        #[command(flatten)]
        source: SeriesSource,
    },
    /// Prints the canonical text of a workbench file.
    Fmt {
        #[command(flatten)]
        file: FileArg,
    },
}

/// Why a command failed, determining the exit code.
#[derive(Debug)]
pub enum Failure {
    Parse {
        message: String,
        line: Option<usize>,
        column: Option<usize>,
    },
    Domain(asdim_core::Error),
    Violations {
        report: Value,
        summary: String,
    },
}

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Failure::Parse {
            message: message.into(),
            line: None,
            column: None,
        }
    }

    fn code(&self) -> i32 {
        match self {
            Failure::Parse { .. } => EXIT_PARSE,
            Failure::Domain(_) => EXIT_DOMAIN,
            Failure::Violations { .. } => EXIT_VIOLATIONS,
        }
    }
}

impl From<asdim_core::Error> for Failure {
    fn from(e: asdim_core::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<asdim_core::workbench::ParseError> for Failure {
    fn from(e: asdim_core::workbench::ParseError) -> Self {
        Failure::Parse {
            message: e.message,
            line: Some(e.line),
            column: Some(e.column),
        }
    }
}

type CmdResult = std::result::Result<Output, Failure>;

/// Result of a successful command.
pub enum Output {
    Json(Value),
    Text(String),
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn paint(text: &str, ansi: &str) -> String {
    let plain = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
    if plain {
        text.to_string()
    } else {
        format!("\x1b[{ansi}m{text}\x1b[0m")
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: pretty(&json!({"error": {"kind": "usage", "message": text.lines().next().unwrap_or("")}})),
                    stderr: text,
                }
            };
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| execute(cli.command)),
            Err(e) => Err(Failure::parse(format!("cannot start {n} threads: {e}"))),
        },
        None => execute(cli.command),
    };
    finish(result)
}

fn finish(result: CmdResult) -> Outcome {
    match result {
        Ok(Output::Json(v)) => Outcome {
            code: EXIT_OK,
            stdout: pretty(&v),
            stderr: String::new(),
        },
        Ok(Output::Text(t)) => Outcome {
            code: EXIT_OK,
            stdout: t,
            stderr: String::new(),
        },
        Err(f) => {
            let code = f.code();
            let (stdout, stderr) = match f {
                Failure::Parse { message, line, column } => {
                    let mut err = json!({"kind": "parse", "message": message});
                    if let (Some(l), Some(c)) = (line, column) {
                        err["line"] = json!(l);
                        err["column"] = json!(c);
                    }
                    let place = line
                        .map(|l| format!("line {l}, column {}: ", column.unwrap_or(1)))
                        .unwrap_or_default();
                    (
                        pretty(&json!({"error": err})),
                        format!("{} {place}{message}\n", paint("parse error:", "1;31")),
                    )
                }
                Failure::Domain(e) => (
                    pretty(&json!({"error": {"kind": "domain", "message": e.to_string()}})),
                    format!("{} {e}\n", paint("error:", "1;31")),
                ),
                Failure::Violations { report, summary } => {
                    (pretty(&report), format!("{} {summary}\n", paint("violations:", "1;33")))
                }
            };
            Outcome { code, stdout, stderr }
        }
    }
}

fn weights_context(wb: &Workbench, name: &str) -> std::result::Result<MetricContext, Failure> {
    wb.weights(name)
        .map(|w| w.context())
        .ok_or_else(|| Failure::parse(format!("no weights section named '{name}'")))
}

fn element_arg(
    ctx: &MetricContext,
    text: &str,
    what: &str,
) -> std::result::Result<asdim_core::group::GroupElement, Failure> {
    parse_element(ctx.group(), text).map_err(|e| Failure::parse(format!("{what}: {e}")))
}

fn hom_arg<'a>(
    wb: &'a Workbench,
    name: Option<&str>,
) -> std::result::Result<Option<&'a asdim_core::group::Homomorphism>, Failure> {
    match name {
        None => Ok(None),
        Some(n) => wb
            .hom(n)
            .map(|h| Some(&h.hom))
            .ok_or_else(|| Failure::parse(format!("no hom section named '{n}'"))),
    }
}

fn capped(n: CappedNorm) -> Value {
    report::opt_rational(n.value())
}

fn execute(command: Command) -> CmdResult {
    match command {
        Command::Norm {
            file,
            weights,
            element,
            cap,
        } => {
            let wb = load_workbench(&file.file)?;
            let ctx = weights_context(&wb, &weights)?;
            let x = element_arg(&ctx, &element, "element")?;
            let cap = parse_rational_arg(&cap, "cap")?;
            Ok(Output::Json(json!({"norm": capped(ctx.norm(&x, &cap)?)})))
        }
        Command::Dist {
            file,
            weights,
            x,
            y,
            cap,
        } => {
            let wb = load_workbench(&file.file)?;
            let ctx = weights_context(&wb, &weights)?;
            let x = element_arg(&ctx, &x, "x")?;
            let y = element_arg(&ctx, &y, "y")?;
            let cap = parse_rational_arg(&cap, "cap")?;
            Ok(Output::Json(json!({"distance": capped(ctx.distance(&x, &y, &cap)?)})))
        }
        Command::Ball {
            file,
            weights,
            radius,
            count_only,
        } => {
            let wb = load_workbench(&file.file)?;
            let ctx = weights_context(&wb, &weights)?;
            let r = parse_rational_arg(&radius, "radius")?;
            let ball = ctx.ball_with_norms(&r)?;
            Ok(Output::Json(if count_only {
                json!({"radius": report::rational(&r), "size": ball.len()})
            } else {
                report::ball(ctx.group(), &ball)
            }))
        }
        Command::Profile {
            file,
            d,
            dprime,
            hom,
            t,
            search,
        } => {
            let wb = load_workbench(&file.file)?;
            let (ctx_d, ctx_dp) = (weights_context(&wb, &d)?, weights_context(&wb, &dprime)?);
            let hom = hom_arg(&wb, hom.as_deref())?;
            let ts = parse_t_values(&t)?;
            let search = parse_rational_arg(&search, "search")?;
            let rows = rho_profile(&ctx_d, &ctx_dp, hom, &ts, &search)?;
            Ok(Output::Json(json!({
                "search_radius": report::rational(&search),
                "rows": report::rho_rows(&rows),
            })))
        }
        Command::Sandwich {
            file,
            d,
            dprime,
            hom,
            radius,
        } => {
            let wb = load_workbench(&file.file)?;
            let (ctx_d, ctx_dp) = (weights_context(&wb, &d)?, weights_context(&wb, &dprime)?);
            let hom = hom_arg(&wb, hom.as_deref())?;
            let r = parse_rational_arg(&radius, "radius")?;
            let rep = check_coarse_sandwich(&ctx_d, &ctx_dp, hom, &r)?;
            let v = report::sandwich(ctx_d.group(), &rep);
            if rep.violations.is_empty() {
                Ok(Output::Json(v))
            } else {
                Err(Failure::Violations {
                    summary: format!("{} pairs violate the distortion bounds", rep.violations.len()),
                    report: v,
                })
            }
        }
        Command::Stabilizer {
            file,
            action,
            space,
            acting,
            x0,
            radius,
            search,
        } => {
            let wb = load_workbench(&file.file)?;
            let hom = hom_arg(&wb, Some(&action))?.expect("named");
            let (ctx_h, ctx_g) = (weights_context(&wb, &space)?, weights_context(&wb, &acting)?);
            let x0 = element_arg(&ctx_h, &x0, "x0")?;
            let r = parse_rational_arg(&radius, "radius")?;
            let s = parse_rational_arg(&search, "search")?;
            let found = r_stabilizer(hom, &ctx_h, &x0, &r, &ctx_g, &s)?;
            Ok(Output::Json(json!({
                "radius": report::rational(&r),
                "search_radius": report::rational(&s),
                "count": found.len(),
                "elements": found.iter().map(|x| report::element(Some(ctx_g.group()), x)).collect::<Vec<_>>(),
            })))
        }
        Command::CoverMake { d, rank } => {
            let base = make_interval_cover(d)?;
            let mut cert = CoverCertificate::point();
            for _ in 0..rank {
                cert = product_cover(&cert, &base)?;
            }
            Ok(Output::Json(report::certificate(None, &cert)))
        }
        Command::CoverVerify {
            file,
            cover,
            weights,
            radius,
        } => {
            let wb = load_workbench(&file.file)?;
            let def = wb
                .cover(&cover)
                .ok_or_else(|| Failure::parse(format!("no cover section named '{cover}'")))?;
            let ctx = match weights.as_deref().or(def.weights.as_deref()) {
                Some(w) => weights_context(&wb, w)?,
                None => match def.certificate.symbolic_rank() {
                    Some(n) => MetricContext::standard(asdim_core::group::GroupSpec::FreeAbelian { rank: n })?,
                    None => {
                        return Err(Failure::parse(format!(
                            "cover '{cover}' names no weights; pass --weights"
                        )))
                    }
                },
            };
            let r = parse_rational_arg(&radius, "radius")?;
            let rep = verify_families(&def.certificate, &ctx, &r)?;
            let v = report::verify(ctx.group(), &rep);
            if rep.is_clean() {
                Ok(Output::Json(v))
            } else {
                Err(Failure::Violations {
                    summary: violation_summary(&rep),
                    report: v,
                })
            }
        }
        Command::CoverExtend {
            file,
            weights,
            cover,
            via,
            d,
            radius,
            bound,
        } => {
            let wb = load_workbench(&file.file)?;
            let ctx = weights_context(&wb, &weights)?;
            let def = wb
                .cover(&cover)
                .ok_or_else(|| Failure::parse(format!("no cover section named '{cover}'")))?;
            let d = parse_rational_arg(&d, "d")?;
            let r = parse_rational_arg(&radius, "radius")?;
            let mut input = def.certificate.clone();
            if let Some(h) = hom_arg(&wb, via.as_deref())? {
                let reach = &r * asdim_core::BigRational::from_integer(2.into());
                input = transport_cover(&input, h, &ctx, &reach)?;
            }
            if let Some(b) = bound {
                input = input.with_bound(parse_rational_arg(&b, "bound")?)?;
            }
            let rep = extend_cover_by_cosets(&ctx, &d, &input, &r)?;
            let v = report::extension(ctx.group(), &rep);
            if rep.input_report.is_clean() && rep.output_report.is_clean() {
                Ok(Output::Json(v))
            } else {
                let which = if rep.input_report.is_clean() {
                    &rep.output_report
                } else {
                    &rep.input_report
                };
                Err(Failure::Violations {
                    summary: violation_summary(which),
                    report: v,
                })
            }
        }
        Command::Solve {
            file,
            weights,
            radius,
            table,
            k,
            d,
            budget,
            oracle,
        } => {
            let table = match (table, file, weights, radius) {
                (Some(path), ..) => read_table(&path)?,
                (None, Some(f), Some(w), Some(r)) => {
                    let wb = load_workbench(&f)?;
                    let ctx = weights_context(&wb, &w)?;
                    MetricTable::from_ball(&ctx, &parse_rational_arg(&r, "radius")?)?
                }
                _ => {
                    return Err(Failure::parse(
                        "solve needs --table, or --file with --weights and --radius",
                    ))
                }
            };
            let d = parse_rational_arg(&d, "d")?;
            let result = solve_min_diameter(&table, k, &d, budget)?;
            let oracle_value = if oracle {
                Some(exhaustive_cover_oracle(&table, k, &d)?.0)
            } else {
                None
            };
            Ok(Output::Json(report::solve(table.ids(), &result, oracle_value.as_ref())))
        }
        Command::Snf { matrix, cols } => {
            let a = parse_matrix(&matrix, cols)?;
            let result = smith_normal_form(&a);
            let verified = result.verify(&a).is_ok();
            Ok(Output::Json(report::snf(&result, verified)))
        }
        Command::Rank {
            matrix,
            gens,
            file,
            group,
        } => {
            let p = match (matrix, gens, file, group) {
                (Some(m), Some(n), ..) => {
                    let rows = parse_matrix(&m, Some(n))?;
                    PresentedAbelian::new(n, rows)?
                }
                (None, _, Some(f), Some(g)) => {
                    let wb = load_workbench(&f)?;
                    let spec = wb
                        .group(&g)
                        .ok_or_else(|| Failure::parse(format!("no group section named '{g}'")))?;
                    let (n, rel) = asdim_core::group::abelian_presentation(spec)
                        .ok_or_else(|| asdim_core::Error::Unsupported(format!("group '{g}' is not abelian")))?;
                    PresentedAbelian::new(n, rel)?
                }
                (None, Some(n), None, None) => PresentedAbelian::new(n, IntegerMatrix::zeros(0, n))?,
                _ => {
                    return Err(Failure::parse(
                        "rank needs --matrix with --gens, or --file with --group",
                    ))
                }
            };
            Ok(Output::Json(report::rank(&rank_and_torsion(&p))))
        }
        Command::Hirsch { source } => {
            let s = series_from(&source)?;
            Ok(Output::Json(
                json!({"series": s.name(), "hirsch_length": report::bound(hirsch_length(&s))}),
            ))
        }
        Command::Bounds { source } => {
            let s = series_from(&source)?;
            let b = asdim_bounds(&s)?;
            let mut v = report::interval_bounds(s.name(), &b);
            v["hirsch_length"] = report::bound(hirsch_length(&s));
            v["polycyclic"] = json!(s.is_polycyclic());
            Ok(Output::Json(v))
        }
        Command::Fmt { file } => Ok(Output::Text(load_workbench(&file.file)?.to_text())),
    }
}

fn violation_summary(r: &asdim_core::cover::VerifyReport) -> String {
    format!(
        "{} disjointness, {} diameter, {} coverage, {} closed-form mismatches",
        r.disjointness_violations.len(),
        r.bound_violations.len(),
        r.coverage_gaps.len(),
        r.symbolic_checks.iter().filter(|c| !c.agrees).count()
    )
}

fn series_from(source: &SeriesSource) -> std::result::Result<asdim_core::solvable::SeriesSpec, Failure> {
    match (&source.file, &source.series, &source.series_json) {
        (_, _, Some(path)) => read_series_json(path),
        (Some(f), Some(name), None) => {
            let wb = load_workbench(f)?;
            wb.series(name)
                .cloned()
                .ok_or_else(|| Failure::parse(format!("no series section named '{name}'")))
        }
        _ => Err(Failure::parse("pass --file with --series, or --series-json")),
    }
}
