mod report;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fqres::checks::{plan_verify, run_verify, JRule, VerifyConfig};
use fqres::restriction::{cell_seed, conjectured_exponent, exponent_row, sup_ratio_search, SearchClass, SearchOptions, SweepCell};
use fqres::varieties::{build_affine_in_sphere, variety_points, VarietySpec};
use fqres::{make_field, Budget, Error, Exponent, Rational};
use rayon::prelude::*;

use report::{Cell, Format, Report, Table};

#[derive(Parser)]
#[command(name = "fqres", version, about = "Fourier restriction experiments over finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity and inequality suites over a grid of (q, d, j).
    Verify(VerifyArgs),
    /// Search for large restriction ratios in each (q, d, j) cell.
    Sweep(SweepArgs),
    /// Tabulate the critical exponents per dimension.
    Exponents(ExponentArgs),
    /// Build maximal affine subspaces inside spheres.
    Subspace(SubspaceArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Field sizes, e.g. `3,5,7`.
    #[arg(long = "q", value_delimiter = ',', required = true)]
    qs: Vec<u64>,
    /// Dimensions: a list `2,3` or an inclusive range `2..6`.
    #[arg(long = "d", required = true, value_parser = parse_dims)]
    ds: std::vec::Vec<usize>,
    /// `all`, `squares`, `nonsquares` or an explicit list such as `1,2`.
    #[arg(long, default_value = "all")]
    j_rule: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = Budget::default().max_ambient)]
    max_ambient: u64,
    #[arg(long, default_value_t = Budget::default().max_evaluations)]
    max_evaluations: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Defaults to the output file's extension, else JSON.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Random instances per check and cell.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VarietyArg {
    Sphere,
    Hom,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// A rational such as `8/5`, or `auto` for the conjectured exponent of each cell.
    #[arg(long, default_value = "auto")]
    p: String,
    #[arg(long, default_value = "2")]
    r: String,
    #[arg(long, default_value = "homogeneous")]
    class: String,
    #[arg(long, value_enum, default_value = "sphere")]
    variety: VarietyArg,
    /// Add per-cell wall time (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct ExponentArgs {
    #[arg(long = "d", required = true, value_parser = parse_dims)]
    ds: std::vec::Vec<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SubspaceArgs {
    #[command(flatten)]
    common: Common,
}

fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    let bad = |t: &str| format!("bad dimension '{t}'");
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad(s))?;
        let b: usize = b.trim().parse().map_err(|_| bad(s))?;
        if a > b {
            return Err(bad(s));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad(t)))
        .collect()
}

/// Error category that decides the exit code.
enum Failure {
    Config(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Common {
    fn budget(&self) -> Result<Budget, Error> {
        if self.max_ambient == 0 || self.max_evaluations == 0 {
            return Err(Error::InvalidDimension("budget caps must be positive".into()));
        }
        Ok(Budget {
            max_ambient: self.max_ambient,
            max_evaluations: self.max_evaluations,
        })
    }

    fn config_cells(&self) -> Vec<(String, Cell)> {
        vec![
            ("q".into(), Cell::List(self.qs.iter().map(|&q| q.into()).collect())),
            ("d".into(), Cell::List(self.ds.iter().map(|&d| d.into()).collect())),
            ("j_rule".into(), self.j_rule.as_str().into()),
            ("seed".into(), self.seed.into()),
            ("max_ambient".into(), self.max_ambient.into()),
            ("max_evaluations".into(), self.max_evaluations.into()),
        ]
    }
}

impl OutputArgs {
    fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.output {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
            _ => Format::Json,
        })
    }

    fn emit(&self, report: &Report) -> io::Result<()> {
        let format = self.format();
        match &self.output {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                report.write(format, &mut w)?;
                w.flush()
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                report.write(format, &mut lock)
            }
        }
    }
}

fn error_summary(e: &Error) -> Cell {
    Cell::Map(vec![("error".into(), e.to_string().into())])
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, Failure> {
    let c = &args.common;
    let mut config = c.config_cells();
    config.push(("samples".into(), args.samples.into()));
    config.push(("tol_scale".into(), args.tol_scale.into()));
    let columns = vec!["check", "params", "lhs", "rhs", "tol", "pass"];

    let setup = || -> Result<VerifyConfig, Error> {
        let cfg = VerifyConfig {
            qs: c.qs.clone(),
            ds: c.ds.clone(),
            j_rule: c.j_rule.parse::<JRule>()?,
            seed: c.seed,
            samples: args.samples,
            budget: c.budget()?,
            tol_scale: args.tol_scale,
        };
        plan_verify(&cfg)?;
        Ok(cfg)
    };
    let outcome = setup().and_then(|cfg| run_verify(&cfg));
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            args.common.out.emit(&Report {
                config: Cell::Map(config),
                results: Table::new(columns),
                summary: error_summary(&e),
            })?;
            return Err(e.into());
        }
    };

    let mut table = Table::new(columns);
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in &outcome.results {
        table.push(vec![
            r.check.into(),
            r.params.clone().into(),
            r.lhs.into(),
            r.rhs.into(),
            r.tol.into(),
            r.pass.into(),
        ]);
        let e = counts.entry(r.check).or_default();
        e.0 += usize::from(r.pass);
        e.1 += 1;
    }
    let passed = outcome.results.iter().filter(|r| r.pass).count();
    let mut summary = vec![
        ("total".into(), outcome.results.len().into()),
        ("passed".into(), passed.into()),
        ("failed".into(), (outcome.results.len() - passed).into()),
        (
            "checks".into(),
            Cell::Map(
                counts
                    .iter()
                    .map(|(k, (p, t))| {
                        (k.to_string(), Cell::Map(vec![("passed".into(), (*p).into()), ("total".into(), (*t).into())]))
                    })
                    .collect(),
            ),
        ),
    ];
    if let Some(e) = &outcome.error {
        summary.push(("error".into(), e.to_string().into()));
    }
    args.common.out.emit(&Report {
        config: Cell::Map(config),
        results: table,
        summary: Cell::Map(summary),
    })?;
    if let Some(e) = outcome.error {
        return Err(e.into());
    }
    for (k, (p, t)) in &counts {
        eprintln!("{k}: {p}/{t} passed");
    }
    Ok(passed == outcome.results.len())
}

fn rational_cell(r: Rational) -> Cell {
    r.to_string().into()
}

struct SweepPlan {
    field: fqres::Field,
    d: usize,
    j: u64,
}

struct SweepSetup {
    plans: Vec<SweepPlan>,
    /// `None` means the conjectured exponent of each cell.
    p: Option<Exponent>,
    r: Exponent,
    class: SearchClass,
    budget: Budget,
}

fn cmd_sweep(args: &SweepArgs) -> Result<bool, Failure> {
    let c = &args.common;
    let mut config = c.config_cells();
    config.extend([
        ("p".into(), args.p.as_str().into()),
        ("r".into(), args.r.as_str().into()),
        ("class".into(), args.class.as_str().into()),
        ("variety".into(), (if args.variety == VarietyArg::Sphere { "sphere" } else { "hom" }).into()),
    ]);
    let mut columns = vec![
        "variety", "q", "d", "j", "tag", "class", "p", "r", "ratio", "bound", "exhaustive", "evaluations", "witness", "seed",
    ];
    if args.timing {
        columns.push("seconds");
    }

    let setup = || -> Result<SweepSetup, Error> {
        let budget = c.budget()?;
        let p = if args.p.eq_ignore_ascii_case("auto") {
            None
        } else {
            Some(args.p.parse::<Exponent>()?)
        };
        let r: Exponent = args.r.parse()?;
        let class: SearchClass = args.class.parse()?;
        let rule: JRule = c.j_rule.parse()?;
        let mut plans = Vec::new();
        for &q in &c.qs {
            let field = make_field(q)?;
            for &d in &c.ds {
                if d < 2 {
                    return Err(Error::InvalidDimension(format!("d = {d}, need d >= 2")));
                }
                let n = if args.variety == VarietyArg::Hom { d + 1 } else { d };
                budget.check_ambient(&format!("ambient space F_{q}^{n}"), fqres::budget::power(q, n))?;
                for j in rule.resolve(&field)? {
                    plans.push(SweepPlan { field: field.clone(), d, j });
                }
            }
        }
        plans.sort_by_key(|p| (p.d, p.field.q(), p.j));
        Ok(SweepSetup {
            plans,
            p,
            r,
            class,
            budget,
        })
    };

    let run = setup().and_then(|SweepSetup { plans, p, r, class, budget }| {
        let cells: Vec<Result<(SweepCell, f64), Error>> = plans
            .par_iter()
            .map(|plan| {
                let spec = match args.variety {
                    VarietyArg::Sphere => VarietySpec::sphere(&plan.field, plan.d, plan.j)?,
                    VarietyArg::Hom => VarietySpec::hom(&plan.field, plan.d, plan.j)?,
                };
                let p = match p {
                    Some(p) => p,
                    None => Exponent::new(conjectured_exponent(plan.d, spec.case_tag())?)?,
                };
                let start = Instant::now();
                let points = variety_points(&spec, &budget)?;
                let opts = SearchOptions {
                    p: p.to_f64(),
                    r: r.to_f64(),
                    class,
                    budget,
                    seed: cell_seed(c.seed, &[plan.field.q(), plan.d as u64, plan.j]),
                };
                let cell = sup_ratio_search(&points, &opts)?;
                Ok((cell, start.elapsed().as_secs_f64()))
            })
            .collect();
        cells.into_iter().collect::<Result<Vec<_>, Error>>()
    });

    let mut table = Table::new(columns);
    let cells = match run {
        Ok(cells) => cells,
        Err(e) => {
            c.out.emit(&Report {
                config: Cell::Map(config),
                results: table,
                summary: error_summary(&e),
            })?;
            return Err(e.into());
        }
    };
    for (cell, secs) in &cells {
        let mut row: Vec<Cell> = vec![
            cell.variety.clone().into(),
            cell.q.into(),
            cell.d.into(),
            cell.j.into(),
            cell.tag.name().into(),
            cell.class.name().into(),
            cell.p.into(),
            cell.r.into(),
            cell.ratio.into(),
            cell.bound.into(),
            cell.exhaustive.into(),
            cell.evaluations.into(),
            cell.witness.clone().into(),
            cell.seed.into(),
        ];
        if args.timing {
            row.push((*secs).into());
        }
        table.push(row);
    }
    let ratios: Vec<f64> = cells.iter().map(|(c, _)| c.ratio).collect();
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let summary = Cell::Map(vec![
        ("cells".into(), cells.len().into()),
        ("max_ratio".into(), max.into()),
        ("min_ratio".into(), min.into()),
        ("spread".into(), (max / min).into()),
    ]);
    c.out.emit(&Report {
        config: Cell::Map(config),
        results: table,
        summary,
    })?;
    Ok(true)
}

fn cmd_exponents(args: &ExponentArgs) -> Result<bool, Failure> {
    let config = Cell::Map(vec![("d".into(), Cell::List(args.ds.iter().map(|&d| d.into()).collect()))]);
    let mut columns = vec!["d"];
    for t in fqres::CaseTag::ALL {
        columns.push(t.name());
    }
    columns.extend(["stein_tomas", "threshold_even", "threshold_minus", "threshold_plus"]);
    let mut table = Table::new(columns);
    for &d in &args.ds {
        let row = match exponent_row(d) {
            Ok(row) => row,
            Err(e) => {
                args.out.emit(&Report {
                    config,
                    results: table,
                    summary: error_summary(&e),
                })?;
                return Err(e.into());
            }
        };
        let na = || Cell::from("n/a");
        let mut cells: Vec<Cell> = vec![d.into()];
        for t in fqres::CaseTag::ALL {
            cells.push(row.case(t).map_or_else(na, rational_cell));
        }
        cells.push(rational_cell(row.stein_tomas));
        let threshold = |pick: fn(fqres::CaseTag) -> bool| {
            row.cases.iter().find(|c| pick(c.0)).map_or_else(na, |c| rational_cell(c.2))
        };
        cells.push(threshold(|t| t == fqres::CaseTag::Even));
        cells.push(threshold(|t| t.is_minus_case()));
        cells.push(threshold(|t| t.is_plus_case()));
        table.push(cells);
    }
    args.out.emit(&Report {
        config,
        results: table,
        summary: Cell::Map(vec![("rows".into(), args.ds.len().into())]),
    })?;
    Ok(true)
}

fn cmd_subspace(args: &SubspaceArgs) -> Result<bool, Failure> {
    let c = &args.common;
    let config = Cell::Map(c.config_cells());
    let mut table = Table::new(vec!["q", "d", "j", "tag", "k", "expected_k", "certified", "base", "directions"]);
    let mut all_ok = true;
    let mut run = || -> Result<(), Error> {
        let rule: JRule = c.j_rule.parse()?;
        for &q in &c.qs {
            let field = make_field(q)?;
            for &d in &c.ds {
                if d < 2 {
                    return Err(Error::InvalidDimension(format!("d = {d}, need d >= 2")));
                }
                for j in rule.resolve(&field)? {
                    let flat = build_affine_in_sphere(&field, d, j, cell_seed(c.seed, &[q, d as u64, j]))?;
                    let tag = field.case_tag(d, j);
                    let certified = flat.certify_in_sphere(j).is_ok();
                    let ok = certified && flat.k() == tag.sphere_flat_dim(d);
                    all_ok &= ok;
                    let vec_cell = |v: &[u64]| Cell::List(v.iter().map(|&x| x.into()).collect());
                    table.push(vec![
                        q.into(),
                        d.into(),
                        j.into(),
                        tag.name().into(),
                        flat.k().into(),
                        tag.sphere_flat_dim(d).into(),
                        certified.into(),
                        vec_cell(&flat.base),
                        Cell::List(flat.directions.iter().map(|w| vec_cell(w)).collect()),
                    ]);
                }
            }
        }
        Ok(())
    };
    let result = run();
    let summary = match &result {
        Ok(()) => Cell::Map(vec![("rows".into(), table.rows.len().into()), ("all_certified".into(), all_ok.into())]),
        Err(e) => error_summary(e),
    };
    c.out.emit(&Report {
        config,
        results: table,
        summary,
    })?;
    result?;
    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Exponents(a) => cmd_exponents(a),
        Command::Subspace(a) => cmd_subspace(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
