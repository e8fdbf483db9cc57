use evanskit::Result;
use evanskit::evans::Rect;
use evanskit::exec::Execution;
use evanskit::finite_re::{corollary23, synth_re, synth_re_flipped, theorem22_check};
use evanskit::linalg::C64;
use evanskit::model::coupled_wave::{self, Oracle};
use evanskit::model::dirac::build_dirac;
use evanskit::model::uniform_grid;
use evanskit::problem::{Numerics, Problem};
use std::process::ExitCode;
use std::time::Instant;

const C1_RATIO: f64 = 1e-3;
const C1_D0: f64 = 1e-8;
const C1_D1: f64 = 1e-6;
const C1_SECONDS: f64 = 30.0;
const C2_REL: f64 = 1e-6;
const C3_REL: f64 = 1e-4;
const C4_STD: f64 = 1e-6;
const C5_DEV: f64 = 1e-4;
const C6_ROOT: f64 = 1e-5;
const C7_CLOSURE: f64 = 0.1;
const C8_WEDGE: f64 = 1e-6;
const C8_ETA: f64 = 1e-10;
const C9_STRUCT: f64 = 1e-7;
const C9_INVARIANCE: f64 = 1e-10;
const C10_REL: f64 = 1e-8;
const C11_REVERSIBLE: f64 = 1e-12;

type Outcome = Result<(bool, String)>;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn theorem61() -> Outcome {
    let start = Instant::now();
    let cases: Vec<(f64, f64)> = [0.0, 0.3, -0.3]
        .iter()
        .flat_map(|&c| [0.5, 1.0, 2.0].map(|p| (c, p)))
        .collect();
    let rows = Execution::Parallel.map(&cases, |&(c, p)| -> Result<(f64, f64, f64)> {
        let (m, w) = coupled_wave::build(p)?;
        let n = Numerics {
            exec: Execution::Sequential,
            ..Numerics::default()
        };
        let pr = Problem::new(&m, &w, c, n)?;
        let d = pr.derivatives_at_zero(None)?;
        let product = 2.0 * pr.chi_factors()?.chi * pr.lazutkin_pi()?.pi * pr.didc()?.value;
        let scale = d.samples.iter().fold(0.0f64, |a, s| a.max(s.1.abs()));
        Ok((d.d2_raw / product, d.d0.norm() / scale, d.d1.abs() * d.h / scale))
    });
    let secs = start.elapsed().as_secs_f64();
    let (mut worst, mut d0, mut d1) = (0.0f64, 0.0f64, 0.0f64);
    for r in rows {
        let (ratio, a, b) = r?;
        worst = worst.max((ratio - 1.0).abs());
        d0 = d0.max(a);
        d1 = d1.max(b);
    }
    let pass = worst <= C1_RATIO && d0 <= C1_D0 && d1 <= C1_D1 && secs <= C1_SECONDS;
    Ok((
        pass,
        format!("max |ratio-1| = {worst:.2e}, |D(0)| = {d0:.1e}, |D'(0)| h = {d1:.1e} (local scale), {secs:.1} s"),
    ))
}

fn momentum_slope() -> Outcome {
    let (m, w) = coupled_wave::build(1.0)?;
    let mut worst = 0.0f64;
    for c in [0.0, 0.3, -0.3, 0.6] {
        let pr = Problem::new(&m, &w, c, Numerics::default())?;
        let want = Oracle::new(1.0, c).didc();
        worst = worst.max((pr.didc()?.value / want - 1.0).abs());
    }
    Ok((worst <= C2_REL, format!("max relative error {worst:.2e}")))
}

fn chi_factor() -> Outcome {
    let (m, w) = coupled_wave::build(1.0)?;
    let mut worst = 0.0f64;
    let mut negative = true;
    for c in [0.0, 0.5, 0.3, -0.3, 0.6] {
        let chi = Problem::new(&m, &w, c, Numerics::default())?.chi_factors()?.chi;
        negative &= chi < 0.0;
        if c == 0.0 || c == 0.5 {
            let want = -1.0 / (768.0 * coupled_wave::alpha(c));
            worst = worst.max((chi / want - 1.0).abs());
        }
    }
    Ok((
        worst <= C3_REL && negative,
        format!("max relative error {worst:.2e}, all negative: {negative}"),
    ))
}

fn pi_sign() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (p, sign) in [(1.0, 1.0), (2.0, -1.0)] {
        let (m, w) = coupled_wave::build(p)?;
        let r = Problem::new(&m, &w, 0.0, Numerics::default())?.lazutkin_pi()?;
        pass &= r.pi.signum() == sign && r.rel_std <= C4_STD;
        detail.push(format!("p={p}: Pi = {:.6e}, rel std {:.1e}", r.pi, r.rel_std));
    }
    Ok((pass, detail.join("; ")))
}

fn shape_samples(alpha: f64, p: f64) -> Vec<f64> {
    // zeros of D and of the polynomial, in x = alpha lambda
    let roots: Vec<f64> = [5.0, 5.0 - 3.0 * p]
        .iter()
        .filter(|&&x2| x2 > 0.0)
        .map(|x2: &f64| x2.sqrt() / alpha)
        .collect();
    let ok: Vec<f64> = uniform_grid(0.2, 3.0, 57)
        .into_iter()
        .filter(|l| roots.iter().all(|r| (l - r).abs() > 0.05))
        .collect();
    (0..15).map(|k| ok[k * (ok.len() - 1) / 14]).collect()
}

fn spread(v: &[C64]) -> f64 {
    let mean = v.iter().sum::<C64>() / v.len() as f64;
    v.iter().map(|r| (r / mean - 1.0).norm()).fold(0.0, f64::max)
}

fn exact_shape() -> Outcome {
    let (mut literal, mut intrinsic) = (0.0f64, 0.0f64);
    for (p, c) in [(1.0, 0.0), (1.0, 0.3), (2.0, 0.0), (2.0, 0.3)] {
        let (m, w) = coupled_wave::build(p)?;
        let pr = Problem::new(&m, &w, c, Numerics::default())?;
        let o = Oracle::new(p, c);
        let a = coupled_wave::alpha(c);
        let (mut lit, mut int) = (Vec::new(), Vec::new());
        for l in shape_samples(a, p) {
            let d = pr.evans_det(re(l))?.d;
            let x2 = (a * l).powi(2);
            let poly = (3.0 + x2) * (5.0 - x2) * (3.0 + 3.0 * p + x2) * (3.0 * p + x2) * (5.0 - 3.0 * p - x2);
            lit.push(d / (l * l * poly));
            int.push(d / o.evans_dual(re(l)));
        }
        literal = literal.max(spread(&lit));
        intrinsic = intrinsic.max(spread(&int));
    }
    Ok((
        literal <= C5_DEV,
        format!("max deviation of D/(lambda^2 P) = {literal:.3e}; against the intrinsic closed form {intrinsic:.1e}"),
    ))
}

fn roots_and_sign() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (p, want) in [(1.0, vec![2f64.sqrt(), 5f64.sqrt()]), (2.0, vec![5f64.sqrt()])] {
        let (m, w) = coupled_wave::build(p)?;
        let pr = Problem::new(&m, &w, 0.0, Numerics::default())?;
        let scan = pr.real_axis_scan(3.0, 64)?;
        let got: Vec<f64> = scan.roots.iter().map(|r| r.lambda).collect();
        let close = got.len() == want.len() && got.iter().zip(&want).all(|(g, w)| (g - w).abs() <= C6_ROOT);
        let d3 = pr.evans_det(re(3.0))?.d.re;
        pass &= close && d3 > 0.0;
        detail.push(format!("p={p}: roots {got:.7?}, D(3) = {d3:.3e}"));
    }
    Ok((pass, detail.join("; ")))
}

fn windings() -> Outcome {
    let rect = Rect {
        re0: 0.5,
        re1: 3.0,
        im0: -0.8,
        im1: 0.8,
    };
    let mut pass = true;
    let mut detail = Vec::new();
    for (p, want) in [(1.0, 2), (2.0, 1)] {
        let (m, w) = coupled_wave::build(p)?;
        let r = Problem::new(&m, &w, 0.0, Numerics::default())?.winding_count(rect)?;
        pass &= r.winding == want && r.closure < C7_CLOSURE;
        detail.push(format!("p={p}: {} zeros, closure {:.1e}", r.winding, r.closure));
    }
    Ok((pass, detail.join("; ")))
}

fn representation() -> Outcome {
    let (m, w) = coupled_wave::build(1.0)?;
    let pr = Problem::new(&m, &w, 0.3, Numerics::default())?;
    let (mut wedge, mut eta) = (0.0f64, 0.0f64);
    for l in [0.5, 1.0, 1.5] {
        let s = pr.evans_both(re(l))?;
        let k = pr.spectrum(re(l))?.kconst;
        let dw = s.d_wedge.expect("wedge requested");
        wedge = wedge.max((dw - s.d_unoriented() * k).norm() / dw.norm());
        eta = eta.max(pr.eta_identity_defect(re(l))?);
    }
    Ok((
        wedge <= C8_WEDGE && eta <= C8_ETA,
        format!("wedge {wedge:.1e}, eta identity {eta:.1e}"),
    ))
}

fn structure() -> Outcome {
    let (m, w) = coupled_wave::build(1.0)?;
    let pr = Problem::new(&m, &w, 0.3, Numerics::default())?;
    let s = pr.structural_checks()?;
    let lag = s.zx_a_plus.max(s.zx_a_minus).max(s.zx_zc);
    let swapped = pr.clone().with_swap();
    let scaled = pr
        .clone()
        .with_scales([C64::new(3.0, -1.0), re(0.2), re(-5.0), C64::new(0.0, 2.0)]);
    let mut inv = 0.0f64;
    for l in [re(0.8), C64::new(1.2, 0.5)] {
        let d = pr.evans_det(l)?.d;
        for other in [&swapped, &scaled] {
            inv = inv.max((other.evans_det(l)?.d - d).norm() / d.norm());
        }
    }
    Ok((
        lag <= C9_STRUCT && inv <= C9_INVARIANCE,
        format!("Lagrangian {lag:.1e}, swap/rescale {inv:.1e}"),
    ))
}

fn finite_dimensional() -> Outcome {
    let mut passed = 0;
    let mut worst = 0.0f64;
    let mut roots_ok = true;
    for seed in 0..20u64 {
        let n = 1 + (seed % 3) as usize;
        let prob = if n >= 2 && seed % 2 == 1 {
            synth_re_flipped(n, seed)?
        } else {
            synth_re(n, seed)?
        };
        let r = theorem22_check(&prob)?;
        worst = worst.max(r.rel_err);
        if r.pass && r.rel_err <= C10_REL {
            passed += 1;
        }
        let cor = corollary23(&prob)?;
        if cor.predicted {
            roots_ok &= cor.root.is_some_and(|x| x > 0.0);
        }
    }
    Ok((
        passed == 20 && roots_ok,
        format!("{passed}/20 instances, worst D''(0) error {worst:.1e}, roots found: {roots_ok}"),
    ))
}

fn clifford() -> Outcome {
    let ids = build_dirac().identities();
    let exact = ids.iter().all(|(_, ok)| *ok);
    let m = coupled_wave::model(1.0)?;
    let w = coupled_wave::wave();
    let r = m.reversor.expect("coupled-wave is reversible");
    let mut worst = 0.0f64;
    for c in [0.0, 0.3] {
        for xi in uniform_grid(-10.0, 10.0, 41) {
            worst = worst.max((r * w.zhat(-xi, c) - w.zhat(xi, c)).amax());
        }
    }
    Ok((
        exact && worst <= C11_REVERSIBLE,
        format!(
            "{} exact identities hold: {exact}; reversibility {worst:.1e}",
            ids.len()
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("second derivative identity", theorem61),
        ("momentum derivative", momentum_slope),
        ("chi factor", chi_factor),
        ("Pi sign", pi_sign),
        ("exact Evans shape", exact_shape),
        ("roots and d_inf", roots_and_sign),
        ("winding counts", windings),
        ("wedge representation", representation),
        ("structural suite", structure),
        ("finite-dimensional suite", finite_dimensional),
        ("Clifford and reversor", clifford),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!pass);
        println!("{} {:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
