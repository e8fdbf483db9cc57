use crate::config::{Format, ModelName, Resolved, Suite, Task};
use evanskit::asymptotics::check_hypotheses;
use evanskit::finite_re::{corollary23, synth_re, theorem22_check};
use evanskit::linalg::C64;
use evanskit::model::coupled_wave::{self, Oracle};
use evanskit::model::dirac::{build_cme, build_dirac, build_dirac_demo, build_mtm};
use evanskit::model::{MultisymplecticModel, WaveFamily, uniform_grid};
use evanskit::problem::Problem;
use evanskit::{Error, Result};
use serde::Serialize;
use serde_json::{Value, json};
use std::fmt::Write as _;

/// What a task produced: the main output, an optional sidecar and the exit code.
pub struct Output {
    pub body: String,
    pub sidecar: Option<String>,
    pub code: u8,
}

pub struct Failure {
    pub code: u8,
    pub message: String,
    pub body: Option<String>,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BadParameter(_) | Error::NoWave => 1,
        e if e.is_hypothesis() => 2,
        _ => 3,
    }
}

fn build(cfg: &Resolved) -> Result<(MultisymplecticModel, Option<WaveFamily>)> {
    Ok(match cfg.model {
        ModelName::CoupledWave => {
            let (m, w) = coupled_wave::build(cfg.p)?;
            (m, Some(w))
        }
        ModelName::Mtm => (build_mtm(cfg.alpha, cfg.nu)?, None),
        ModelName::Cme => (build_cme(cfg.alpha, cfg.nu)?, None),
        ModelName::DiracDemo => (build_dirac_demo(cfg.alpha)?, None),
    })
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn run(cfg: &Resolved) -> std::result::Result<Output, Failure> {
    let fail = |e: Error| Failure {
        code: exit_code(&e),
        message: e.to_string(),
        body: None,
    };
    let (model, wave) = build(cfg).map_err(fail)?;
    let needs_wave =
        cfg.task != Task::Verify || matches!(cfg.suite, Some(Suite::AppendixA | Suite::ExactEvans | Suite::Structure));
    let wave = match wave {
        Some(w) => Some(w),
        None if needs_wave => return Err(fail(Error::NoWave)),
        None => None,
    };
    let problem = match &wave {
        Some(w) => Some(Problem::new(&model, w, cfg.c, cfg.numerics.clone()).map_err(|e| {
            let mut f = fail(e.clone());
            if e.is_hypothesis() {
                f.body = Some(pretty(&json!({
                    "error": e.to_string(),
                    "hypotheses": check_hypotheses(&model, w, cfg.c),
                })));
            }
            f
        })?),
        None => None,
    };
    let result = match cfg.task {
        Task::Report => report(problem.as_ref().expect("wave checked")),
        Task::Scan => scan(cfg, problem.as_ref().expect("wave checked")),
        Task::Contour => contour(cfg, problem.as_ref().expect("wave checked")),
        Task::Verify => verify(cfg, &model, problem.as_ref()),
    };
    result.map_err(|e| {
        let mut f = fail(e.clone());
        if let (true, Some(w)) = (e.is_hypothesis(), &wave) {
            f.body = Some(pretty(&json!({
                "error": e.to_string(),
                "hypotheses": check_hypotheses(&model, w, cfg.c),
            })));
        }
        f
    })
}

fn report(p: &Problem) -> Result<Output> {
    let r = p.stability_report()?;
    Ok(Output {
        body: pretty(&r),
        sidecar: None,
        code: 0,
    })
}

fn scan(cfg: &Resolved, p: &Problem) -> Result<Output> {
    let s = p.real_axis_scan(cfg.lambda_max, cfg.grid_n)?;
    let roots: Vec<Value> = s
        .roots
        .iter()
        .map(|r| json!({"lo": r.lo, "hi": r.hi, "lambda": r.lambda}))
        .collect();
    let meta = json!({"roots": roots, "d_inf": s.d_inf, "warnings": s.warnings});
    let body = match cfg.format {
        Format::Csv => {
            let mut out =
                String::from("lambda_re,lambda_im,D_re,D_im,d1_re,d1_im,d2_re,d2_im,d3_re,d3_im,d4_re,d4_im\n");
            for x in &s.samples {
                let e = x.entries.unwrap_or([C64::new(f64::NAN, f64::NAN); 4]);
                write!(out, "{},{},{},{}", x.lambda.re, x.lambda.im, x.d.re, x.d.im).unwrap();
                for z in e {
                    write!(out, ",{},{}", z.re, z.im).unwrap();
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let samples: Vec<Value> = s
                .samples
                .iter()
                .map(|x| json!({"lambda_re": x.lambda.re, "lambda_im": x.lambda.im, "D_re": x.d.re, "D_im": x.d.im}))
                .collect();
            return Ok(Output {
                body: pretty(
                    &json!({"samples": samples, "roots": meta["roots"], "d_inf": s.d_inf, "warnings": s.warnings}),
                ),
                sidecar: None,
                code: 0,
            });
        }
    };
    Ok(Output {
        body,
        sidecar: Some(pretty(&meta)),
        code: 0,
    })
}

fn contour(cfg: &Resolved, p: &Problem) -> Result<Output> {
    let r = cfg.rect.expect("checked when resolving");
    let w = p.winding_count(r)?;
    let body = json!({
        "rect": [r.re0, r.re1, r.im0, r.im1],
        "winding": w.winding,
        "phase": w.phase,
        "closure": w.closure,
        "points": w.points,
    });
    Ok(Output {
        body: pretty(&body),
        sidecar: None,
        code: 0,
    })
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    tol: f64,
    pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tol,
            pass: value <= tol,
        }
    }
}

fn verify(cfg: &Resolved, model: &MultisymplecticModel, p: Option<&Problem>) -> Result<Output> {
    let suite = cfg.suite.expect("checked when resolving");
    let checks = match suite {
        Suite::Clifford => clifford(model),
        Suite::Theorem22 => theorem22(cfg.seeds)?,
        Suite::AppendixA => appendix_a(p.expect("wave checked"))?,
        Suite::ExactEvans => exact_evans(cfg, p.expect("wave checked"))?,
        Suite::Structure => structure(p.expect("wave checked"))?,
    };
    let passed = checks.iter().filter(|c| c.pass).count();
    let pass = passed == checks.len();
    let name = match suite {
        Suite::AppendixA => "appendix-a",
        Suite::ExactEvans => "exact-evans",
        Suite::Theorem22 => "theorem22",
        Suite::Structure => "structure",
        Suite::Clifford => "clifford",
    };
    let body = json!({"suite": name, "pass": pass, "passed": passed, "total": checks.len(), "checks": checks});
    Ok(Output {
        body: pretty(&body),
        sidecar: None,
        code: if pass { 0 } else { 3 },
    })
}

fn clifford(model: &MultisymplecticModel) -> Vec<Check> {
    let mut out: Vec<Check> = build_dirac()
        .identities()
        .into_iter()
        .map(|(name, ok)| Check::new(name, if ok { 0.0 } else { 1.0 }, 0.0))
        .collect();
    if let Some(r) = model.reversor {
        out.push(Check::new(
            "R^2 = I, RM = -MR, RK = -KR (model)",
            (r * r - evanskit::linalg::RMat4::identity())
                .amax()
                .max((r * model.m + model.m * r).amax())
                .max((r * model.k + model.k * r).amax()),
            0.0,
        ));
    }
    let w = coupled_wave::wave();
    let r = coupled_wave::model(1.0)
        .expect("p = 1 is valid")
        .reversor
        .expect("reversible");
    let worst = uniform_grid(-10.0, 10.0, 41)
        .into_iter()
        .map(|xi| (r * w.zhat(-xi, 0.3) - w.zhat(xi, 0.3)).amax())
        .fold(0.0, f64::max);
    out.push(Check::new("coupled-wave R Z(-xi) = Z(xi)", worst, 1e-12));
    out
}

fn theorem22(seeds: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for seed in 0..seeds {
        let n = 1 + (seed % 3) as usize;
        let prob = synth_re(n, seed)?;
        let r = theorem22_check(&prob)?;
        let mut c = Check::new(format!("seed {seed} (n = {n})"), r.rel_err, 1e-8);
        c.pass &= r.pass;
        let cor = corollary23(&prob)?;
        if cor.predicted {
            c.pass &= cor.root.is_some_and(|x| x > 0.0);
        }
        out.push(c);
    }
    Ok(out)
}

fn appendix_a(p: &Problem) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for l in [0.5, 1.0, 1.5] {
        let lam = C64::new(l, 0.0);
        out.push(Check::new(
            format!("eta identity at {l}"),
            p.eta_identity_defect(lam)?,
            1e-10,
        ));
        for xi in [0.0, 1.5] {
            out.push(Check::new(
                format!("W-Upsilon identity at {l}, xi = {xi}"),
                p.w_upsilon_defect(lam, xi)?,
                1e-8,
            ));
        }
    }
    Ok(out)
}

fn exact_evans(cfg: &Resolved, p: &Problem) -> Result<Vec<Check>> {
    let o = Oracle::new(cfg.p, cfg.c);
    let a = coupled_wave::alpha(cfg.c);
    let roots: Vec<f64> = [5.0, 5.0 - 3.0 * cfg.p]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|x: &f64| x.sqrt() / a)
        .collect();
    let lams: Vec<f64> = uniform_grid(0.2, 3.0, 57)
        .into_iter()
        .filter(|l| roots.iter().all(|r| (l - r).abs() > 0.05))
        .collect();
    let picks: Vec<f64> = (0..15).map(|k| lams[k * (lams.len() - 1) / 14]).collect();
    let ratios: Vec<C64> = picks
        .iter()
        .map(|&l| Ok(p.evans_det(C64::new(l, 0.0))?.d / o.evans_dual(C64::new(l, 0.0))))
        .collect::<Result<_>>()?;
    let mean = ratios.iter().sum::<C64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r / mean - 1.0).norm()).fold(0.0, f64::max);
    let scan = p.real_axis_scan(3.0, 64)?;
    let want: Vec<f64> = roots.iter().copied().filter(|&r| r <= 3.0).rev().collect();
    let root_err = if scan.roots.len() == want.len() {
        scan.roots
            .iter()
            .zip(&want)
            .map(|(g, w)| (g.lambda - w).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(vec![
        Check::new("ratio to the exact Evans function is constant", spread, 1e-4),
        Check::new("real roots match the exact ones", root_err, 1e-5),
    ])
}

fn structure(p: &Problem) -> Result<Vec<Check>> {
    let s = p.structural_checks()?;
    let st = p.model.check_structure(
        &uniform_grid(-3.0, 3.0, 7)
            .iter()
            .map(|&x| p.wave.zhat(x, p.c))
            .collect::<Vec<_>>(),
    );
    let mut inv = 0.0f64;
    let swapped = p.clone().with_swap();
    let scaled = p.clone().with_scales([
        C64::new(3.0, -1.0),
        C64::new(0.2, 0.0),
        C64::new(-5.0, 0.0),
        C64::new(0.0, 2.0),
    ]);
    for l in [C64::new(0.8, 0.0), C64::new(1.2, 0.5)] {
        let d = p.evans_det(l)?.d;
        for q in [&swapped, &scaled] {
            inv = inv.max((q.evans_det(l)?.d - d).norm() / d.norm());
        }
    }
    Ok(vec![
        Check::new("Omega(Z_xi, a+)", s.zx_a_plus, 1e-7),
        Check::new("Omega(Z_xi, a-)", s.zx_a_minus, 1e-7),
        Check::new("Omega(Z_xi, Z_c)", s.zx_zc, 1e-7),
        Check::new("Jordan chain pairing", s.chain_defect, 1e-6),
        Check::new("Hessian symmetry", st.hess_asym, 1e-12),
        Check::new("Hessian against gradient", st.hess_fd, 1e-6),
        Check::new("swap and rescaling invariance of D", inv, 1e-10),
    ])
}
