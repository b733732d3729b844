//! `lauricella` command-line front end.
//!
//! ```text
//! lauricella info       --curve curve.json
//! lauricella basis      --curve curve.json --model C
//! lauricella cartier    --curve '{"p":7,"N":3,"exponents":[1,2,2],"lambdas":["0","1","z"]}'
//! lauricella verify-hgm --curve curve.json --s 1..2 --range l=0..1 --range j=1..3
//! lauricella scan       --curve curve.json --var z=2..6 --jobs 4
//! ```
//!
//! Every subcommand accepts `--format json|text` (default `json`).
//! Exit codes: 0 success, 2 invalid input, 3 when `verify-hgm` sees a mismatch.

mod report;

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lauricella::cartier::{cartier_manin, evaluate_and_rank, gamma_coeffs, l_range};
use lauricella::differentials::{basis, Model};
use lauricella::hypergeometric::HgmSolver;
use lauricella::{CurveSpec, Error, PrimeField};
use rayon::prelude::*;
use serde_json::json;

use report::{
    BasisOutput, CartierOutput, InfoReport, Report, ScanPoint, ScanReport, VerifyReport, VerifyRow,
};

#[derive(Parser)]
#[command(
    name = "lauricella",
    version,
    about = "Cartier-Manin matrices of superelliptic curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Case, singular points, local data and genus.
    Info {
        #[arg(long)]
        curve: String,
    },
    /// Basis of regular differentials on one model.
    Basis {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value = "X")]
        model: Model,
    },
    /// Cartier-Manin matrix on one model.
    Cartier {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value = "Ctilde")]
        model: Model,
    },
    /// Compare power-expansion coefficients against the hypergeometric route.
    VerifyHgm {
        #[arg(long)]
        curve: String,
        /// Character range, e.g. `1..2`. Defaults to `1..N-1`.
        #[arg(long)]
        s: Option<String>,
        /// `l=A..B` or `j=A..B`; repeatable.
        #[arg(long = "range")]
        ranges: Vec<String>,
    },
    /// Rank of the evaluated matrix over a grid of branch point values.
    Scan {
        #[arg(long)]
        curve: String,
        /// `name=A..B`; unlisted variables range over `0..p-1`.
        #[arg(long = "var")]
        vars: Vec<String>,
        #[arg(long, default_value = "Ctilde")]
        model: Model,
        /// Worker threads; 0 lets rayon decide.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

enum Failure {
    Invalid(Error),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(Error::InvalidInput(msg.into()))
}

fn load_curve(arg: &str) -> Result<CurveSpec, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg))
            .map_err(|e| invalid(format!("cannot read {arg}: {e}")))?
    };
    Ok(CurveSpec::from_json_str(&text)?)
}

fn parse_range(text: &str) -> Result<RangeInclusive<u64>, Failure> {
    let num = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| invalid(format!("bad range bound {s:?}")))
    };
    match text.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok(num(a)?..=num(b)?)
        }
        None => {
            let v = num(text)?;
            Ok(v..=v)
        }
    }
}

fn parse_named(text: &str) -> Result<(String, RangeInclusive<u64>), Failure> {
    let (name, range) = text
        .split_once('=')
        .ok_or_else(|| invalid(format!("expected name=A..B, got {text:?}")))?;
    Ok((name.trim().to_string(), parse_range(range)?))
}

fn emit(report: &dyn Report, format: Format) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report.to_json()).expect("report serializes")
        ),
        Format::Text => print!("{}", report.to_text()),
    }
}

fn verify_hgm(
    spec: CurveSpec,
    s_range: Option<String>,
    ranges: Vec<String>,
) -> Result<VerifyReport, Failure> {
    if spec.p() == 0 {
        return Err(Error::RequiresPositiveCharacteristic.into());
    }
    if !spec.is_normalized() {
        return Err(Error::NotNormalized.into());
    }
    let p = spec.p();
    let s_range = match s_range {
        Some(t) => parse_range(&t)?,
        None => 1..=spec.n() - 1,
    };
    let mut l_override = None;
    let mut j_range = 1..=p;
    for r in &ranges {
        let (name, range) = parse_named(r)?;
        match name.as_str() {
            "l" => l_override = Some(range),
            "j" => j_range = range,
            _ => {
                return Err(invalid(format!(
                    "unknown range variable {name:?}; use l or j"
                )))
            }
        }
    }
    let mut rows = Vec::new();
    for s in s_range {
        if s == 0 || s >= spec.n() {
            return Err(invalid(format!("s = {s} outside 1..N-1")));
        }
        let data = gamma_coeffs(&spec, s)?;
        let solver = HgmSolver::new(&spec, s)?;
        for j in j_range.clone() {
            if j == 0 {
                return Err(invalid("j must be at least 1"));
            }
            let ls: Vec<u64> = match &l_override {
                Some(r) => r.clone().collect(),
                None => l_range(&spec, data.n_prime, j)
                    .filter(|&l| l >= 0)
                    .map(|l| l as u64)
                    .collect(),
            };
            for l in ls {
                let e = (l + 1) * p - j;
                // indices with d' < 0 have no hypergeometric counterpart
                let d = data.n_prime as i64 * spec.degree() as i64 - e as i64;
                if d < 0 {
                    continue;
                }
                let direct = data.gamma(e as i64).to_string();
                let hgm = solver
                    .gamma(l, j)
                    .map(|g| g.to_string())
                    .map_err(|err| format!("{}: {err}", err.kind()));
                rows.push(VerifyRow {
                    s,
                    l,
                    j,
                    e,
                    direct,
                    hgm,
                });
            }
        }
    }
    Ok(VerifyReport { spec, rows })
}

fn scan(
    spec: CurveSpec,
    vars: Vec<String>,
    model: Model,
    jobs: usize,
) -> Result<ScanReport, Failure> {
    if spec.p() == 0 {
        return Err(Error::RequiresPositiveCharacteristic.into());
    }
    let p = spec.p();
    let field = PrimeField::new(p)?;
    let names = spec.vars();
    let mut ranges: BTreeMap<String, RangeInclusive<u64>> = BTreeMap::new();
    for v in &vars {
        let (name, range) = parse_named(v)?;
        if !names.contains(&name) {
            return Err(invalid(format!("curve has no variable {name:?}")));
        }
        ranges.insert(name, range);
    }

    // grid in lexicographic order of the curve's variable list
    let axes: Vec<Vec<u64>> = names
        .iter()
        .map(|n| ranges.get(n).cloned().unwrap_or(0..=p - 1).collect())
        .collect();
    let mut grid: Vec<Vec<u64>> = vec![vec![]];
    for axis in &axes {
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }

    let matrix = cartier_manin(&spec, model)?;
    let run = || -> Vec<Option<ScanPoint>> {
        grid.par_iter()
            .map(|point| {
                let assignment: BTreeMap<String, _> = names
                    .iter()
                    .zip(point)
                    .map(|(n, &v)| (n.clone(), field.elem(v as i64)))
                    .collect();
                let rank = evaluate_and_rank(&matrix, &assignment).ok()?;
                Some(ScanPoint {
                    values: names.iter().cloned().zip(point.iter().copied()).collect(),
                    rank: rank.rank,
                    is_zero: rank.is_zero,
                })
            })
            .collect()
    };
    let results = if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| invalid(format!("thread pool: {e}")))?
            .install(run)
    } else {
        run()
    };
    Ok(ScanReport {
        model: model.to_string(),
        size: matrix.size(),
        points: results.into_iter().flatten().collect(),
        spec,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let format = cli.format;
    match cli.command {
        Command::Info { curve } => emit(&InfoReport::new(load_curve(&curve)?), format),
        Command::Basis { curve, model } => {
            emit(&BasisOutput(basis(&load_curve(&curve)?, model)), format)
        }
        Command::Cartier { curve, model } => emit(
            &CartierOutput(cartier_manin(&load_curve(&curve)?, model)?),
            format,
        ),
        Command::VerifyHgm { curve, s, ranges } => {
            let report = verify_hgm(load_curve(&curve)?, s, ranges)?;
            emit(&report, format);
            if !report.all_pass() {
                return Err(Failure::Mismatch(format!(
                    "{} of {} indices disagree",
                    report.rows.iter().filter(|r| !r.pass()).count(),
                    report.rows.len()
                )));
            }
        }
        Command::Scan {
            curve,
            vars,
            model,
            jobs,
        } => emit(&scan(load_curve(&curve)?, vars, model, jobs)?, format),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            println!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(2)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(3)
        }
    }
}
