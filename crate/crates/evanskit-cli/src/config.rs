//! Run configuration: an optional JSON file overlaid by command-line flags.

use clap::Args;
use evanskit::evans::Rect;
use evanskit::problem::Numerics;
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Report,
    Scan,
    Contour,
    Verify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Report => "report",
            Task::Scan => "scan",
            Task::Contour => "contour",
            Task::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelName {
    CoupledWave,
    Mtm,
    Cme,
    DiracDemo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    AppendixA,
    ExactEvans,
    Theorem22,
    Structure,
    Clifford,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub p: Option<f64>,
    pub alpha: Option<f64>,
    pub nu: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsFile {
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub tol: Option<f64>,
    pub h: Option<f64>,
    pub grid_n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<String>,
    #[serde(default)]
    pub params: Params,
    pub c: Option<f64>,
    #[serde(default)]
    pub numerics: NumericsFile,
    pub task: Option<String>,
    pub lambda_max: Option<f64>,
    pub rect: Option<[f64; 4]>,
    pub suite: Option<String>,
    pub seeds: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

#[derive(Debug, Default, Clone, Args)]
pub struct Flags {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long = "lambda-max", allow_hyphen_values = true)]
    pub lambda_max: Option<f64>,
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
    /// re0,re1,im0,im1
    #[arg(long, allow_hyphen_values = true)]
    pub rect: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<f64>,
    #[arg(long = "L", allow_hyphen_values = true)]
    pub l: Option<f64>,
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub seeds: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub task: Task,
    pub model: ModelName,
    pub p: f64,
    pub alpha: f64,
    pub nu: f64,
    pub c: f64,
    pub numerics: Numerics,
    pub lambda_max: f64,
    pub grid_n: usize,
    pub rect: Option<Rect>,
    pub suite: Option<Suite>,
    pub seeds: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn bad(field: &str, why: impl std::fmt::Display) -> String {
    format!("{field}: {why}")
}

fn positive(field: &str, v: Option<f64>) -> Result<Option<f64>, String> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(bad(field, format!("must be a positive number, got {x}"))),
        v => Ok(v),
    }
}

fn parse_rect(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| bad("rect", e))?;
    v.try_into().map_err(|_| bad("rect", "expected re0,re1,im0,im1"))
}

pub fn resolve(task: Task, flags: Flags) -> Result<Resolved, String> {
    let file: RunConfig = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| bad("config", format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| bad("config", e))?
        }
        None => RunConfig::default(),
    };
    if let Some(t) = &file.task
        && t != task.name()
    {
        return Err(bad(
            "task",
            format!("config says {t} but the command is {}", task.name()),
        ));
    }
    let model = match flags.model.or(file.model).as_deref().unwrap_or("coupled-wave") {
        "coupled-wave" => ModelName::CoupledWave,
        "mtm" => ModelName::Mtm,
        "cme" => ModelName::Cme,
        "dirac-demo" => ModelName::DiracDemo,
        other => return Err(bad("model", format!("unknown model {other}"))),
    };
    let p = flags.p.or(file.params.p).unwrap_or(1.0);
    let alpha = flags.alpha.or(file.params.alpha).unwrap_or(1.0);
    let nu = flags.nu.or(file.params.nu).unwrap_or(1.0);
    for (name, v) in [("p", p), ("alpha", alpha), ("nu", nu)] {
        if !v.is_finite() {
            return Err(bad(name, "must be finite"));
        }
    }
    let c = flags.c.or(file.c).unwrap_or(0.0);
    if !c.is_finite() || (model == ModelName::CoupledWave && c.abs() >= 1.0) {
        return Err(bad("c", format!("{c} outside the speed window (-1, 1)")));
    }
    let tol = positive("tol", flags.tol.or(file.numerics.tol))?;
    let h = positive("h", flags.h.or(file.numerics.h))?;
    let l = positive("L", flags.l.or(file.numerics.l))?;
    let lambda_max = positive("lambda_max", flags.lambda_max.or(file.lambda_max))?.unwrap_or(5.0);
    let grid_n = flags.grid_n.or(file.numerics.grid_n).unwrap_or(64);
    if grid_n == 0 {
        return Err(bad("grid_n", "must be at least 1"));
    }
    let rect = match (flags.rect.as_deref(), file.rect) {
        (Some(s), _) => Some(parse_rect(s)?),
        (None, r) => r,
    };
    let rect = match rect {
        Some([re0, re1, im0, im1]) => {
            if !(re0 < re1 && im0 < im1) || [re0, re1, im0, im1].iter().any(|x| !x.is_finite()) {
                return Err(bad("rect", "need re0 < re1 and im0 < im1"));
            }
            Some(Rect { re0, re1, im0, im1 })
        }
        None => None,
    };
    if task == Task::Contour && rect.is_none() {
        return Err(bad("rect", "contour needs a rectangle"));
    }
    let suite = match flags.suite.or(file.suite).as_deref() {
        None if task == Task::Verify => return Err(bad("suite", "verify needs a suite")),
        None => None,
        Some("appendix-a") => Some(Suite::AppendixA),
        Some("exact-evans") => Some(Suite::ExactEvans),
        Some("theorem22") => Some(Suite::Theorem22),
        Some("structure") => Some(Suite::Structure),
        Some("clifford") => Some(Suite::Clifford),
        Some(other) => return Err(bad("suite", format!("unknown suite {other}"))),
    };
    let seeds = flags.seeds.or(file.seeds).unwrap_or(20);
    let format = match flags.format.or(file.format).as_deref() {
        None if task == Task::Scan => Format::Csv,
        None | Some("json") => Format::Json,
        Some("csv") if task == Task::Scan => Format::Csv,
        Some("csv") => return Err(bad("format", format!("{} writes json only", task.name()))),
        Some(other) => return Err(bad("format", format!("unknown format {other}"))),
    };
    let mut numerics = Numerics {
        l,
        h,
        lambda_max,
        scan_n: grid_n,
        ..Numerics::default()
    };
    if let Some(t) = tol {
        numerics.tol = t;
    }
    Ok(Resolved {
        task,
        model,
        p,
        alpha,
        nu,
        c,
        numerics,
        lambda_max,
        grid_n,
        rect,
        suite,
        seeds,
        out: flags.out.or(file.out),
        format,
    })
}
