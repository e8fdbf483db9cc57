//! Geometric factors chi, Pi and dI/dc, structural checks and the
//! assembled stability report.

use crate::error::{Error, Result};
use crate::evans::Root;
use crate::integrator::TangentPair;
use crate::linalg::{C64, CVec4, cvec, omega};
use crate::model::{MultisymplecticModel, WaveFamily, uniform_grid};
use crate::problem::{Numerics, Problem};
use serde::Serialize;
use std::collections::BTreeMap;

const QUAD_TOL: f64 = 1e-12;
const DC: f64 = 1e-4;

/// Composite double-exponential quadrature on panels no wider than `panel`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panel: f64) -> f64 {
    let n = ((b - a) / panel).ceil().max(1.0) as usize;
    let w = (b - a) / n as f64;
    (0..n)
        .map(|k| {
            let lo = a + k as f64 * w;
            quadrature::double_exponential::integrate(&f, lo, lo + w, QUAD_TOL / n as f64).integral
        })
        .sum()
}

/// I(c) = 1/2 int <M Zhat_xi, Zhat> over [-l, l].
pub fn momentum_on(model: &MultisymplecticModel, wave: &WaveFamily, c: f64, l: f64) -> f64 {
    let f = |x: f64| 0.5 * (model.m * wave.zhat_xi(x, c)).dot(&wave.zhat(x, c));
    integrate(f, -l, l, 2.0)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DIdc {
    pub value: f64,
    /// Central difference of the momentum in c.
    pub check: f64,
    pub mismatch: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChiFactors {
    pub chi_minus: f64,
    pub chi_plus: f64,
    pub chi: f64,
    pub drift_minus: f64,
    pub drift_plus: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PiResult {
    /// Oriented value.
    pub pi: f64,
    pub raw: f64,
    pub orientation: f64,
    /// The scaled four-fold wedge limit C+ C- K.
    pub orientation_limit: f64,
    pub rel_std: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StructuralReport {
    pub zx_a_plus: f64,
    pub zx_a_minus: f64,
    pub zx_zc: f64,
    pub chain_obstruction: f64,
    pub didc: f64,
    pub chain_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    UnstableRealEigenvalue,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub model: String,
    pub c: f64,
    pub params: BTreeMap<String, f64>,
    pub chi_minus: f64,
    pub chi_plus: f64,
    pub chi: f64,
    #[serde(rename = "Pi")]
    pub pi: f64,
    #[serde(rename = "I")]
    pub momentum: f64,
    #[serde(rename = "dIdc")]
    pub didc: f64,
    #[serde(rename = "D2_raw")]
    pub d2_raw: f64,
    #[serde(rename = "D2_scaled")]
    pub d2_scaled: f64,
    pub ratio_check: f64,
    pub d_inf: f64,
    pub verdict: Verdict,
    /// sign(Pi), the parity of the Maslov index.
    pub maslov_parity: f64,
    pub orientation: f64,
    pub lambda_max: f64,
    pub real_roots: Vec<f64>,
}

/// |Omega(a, b)| / (|J| |a| |b|).
pub fn lagrangian_defect(j: &crate::linalg::CMat4, a: &CVec4, b: &CVec4) -> f64 {
    let s = j.norm() * a.norm() * b.norm();
    if s == 0.0 { 0.0 } else { omega(j, a, b).norm() / s }
}

fn plateau(values: &[f64]) -> Result<(f64, f64)> {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let drift = (hi - lo) / mean.abs();
    if !(drift <= 1e-6) {
        return Err(Error::NoPlateau(drift));
    }
    Ok((mean, drift))
}

impl Problem<'_> {
    pub fn momentum(&self) -> f64 {
        momentum_on(self.model, self.wave, self.c, self.l)
    }

    /// int <M Zhat_xi, Zhat_c>, checked against a central difference of the momentum.
    pub fn didc(&self) -> Result<DIdc> {
        let (m, w, c) = (self.model, self.wave, self.c);
        let f = |x: f64| (m.m * w.zhat_xi(x, c)).dot(&w.zhat_c(x, c));
        let value = integrate(f, -self.l, self.l, 2.0);
        let (cp, cm) = (c + DC, c - DC);
        if w.check_speed(cp).is_err() || w.check_speed(cm).is_err() {
            return Err(Error::SpeedOutOfWindow(c));
        }
        let check = (momentum_on(m, w, cp, self.l) - momentum_on(m, w, cm, self.l)) / (2.0 * DC);
        if value.abs() < 1e-10 && check.abs() < 1e-10 {
            return Err(Error::Degenerate(format!("dI/dc = {value:e}")));
        }
        let mismatch = (value - check).abs() / value.abs().max(check.abs());
        if mismatch > 1e-4 {
            return Err(Error::Inconsistent(format!(
                "dI/dc quadrature {value} vs difference {check}"
            )));
        }
        if value.abs() < 1e-10 {
            return Err(Error::Degenerate(format!("dI/dc = {value:e}")));
        }
        Ok(DIdc { value, check, mismatch })
    }

    /// Tail plateaus of e^{-mu xi} Omega(eta, Zhat_xi) at -inf and
    /// e^{mu xi} Omega(Zhat_xi, zeta) at +inf for the attached mode.
    pub fn chi_factors(&self) -> Result<ChiFactors> {
        let s = &self.rest;
        let k = self.attached();
        let mu = s.mu[k].re;
        let width = 5.0 / self.rho;
        let zx = |x: f64| cvec(&self.wave.zhat_xi(x, self.c));
        let left: Vec<f64> = uniform_grid(-self.l, -self.l + width, 11)
            .into_iter()
            .map(|x| (-mu * x).exp() * omega(&s.j, &s.eta[k], &zx(x)).re)
            .collect();
        let right: Vec<f64> = uniform_grid(self.l - width, self.l, 11)
            .into_iter()
            .map(|x| (mu * x).exp() * omega(&s.j, &zx(x), &s.zeta[k]).re)
            .collect();
        let (chi_minus, drift_minus) = plateau(&left)?;
        let (chi_plus, drift_plus) = plateau(&right)?;
        Ok(ChiFactors {
            chi_minus,
            chi_plus,
            chi: 1.0 / (chi_plus * chi_minus),
            drift_minus,
            drift_plus,
        })
    }

    pub fn lazutkin_pi_from(&self, pair: &TangentPair) -> Result<PiResult> {
        let (orientation, orientation_limit) = self.orientation()?;
        let j = &self.rest.j;
        let vals: Vec<C64> = (0..pair.grid.len())
            .map(|i| omega(j, &pair.a_minus(i), &pair.a_plus(i)))
            .collect();
        let mid = pair.grid.iter().position(|&x| x == 0.0).unwrap_or(pair.grid.len() / 2);
        let raw = vals[mid].re;
        let size = pair.a_minus(mid).norm() * pair.a_plus(mid).norm();
        if !(raw.abs() >= 1e-10 * size) {
            return Err(Error::NonTransverse(raw.abs()));
        }
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<C64>() / n;
        let var = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / n;
        let rel_std = var.sqrt() / mean.norm();
        if rel_std > 1e-6 {
            return Err(Error::Inconsistent(format!(
                "Omega(a-, a+) varies along the wave (rel std {rel_std:e})"
            )));
        }
        Ok(PiResult {
            pi: orientation * raw,
            raw,
            orientation,
            orientation_limit,
            rel_std,
            grid: pair.grid.clone(),
            values: vals.iter().map(|v| v.re).collect(),
        })
    }

    pub fn lazutkin_pi(&self) -> Result<PiResult> {
        self.lazutkin_pi_from(&self.tangent_a()?)
    }

    pub fn structural_checks_with(&self, pair: &TangentPair, didc: f64) -> StructuralReport {
        let j = &self.rest.j;
        let (w, c) = (self.wave, self.c);
        let zx = |x: f64| cvec(&w.zhat_xi(x, c));
        let mut zx_a_plus = 0.0f64;
        let mut zx_a_minus = 0.0f64;
        for (i, &x) in pair.grid.iter().enumerate() {
            zx_a_plus = zx_a_plus.max(lagrangian_defect(j, &zx(x), &pair.a_plus(i)));
            zx_a_minus = zx_a_minus.max(lagrangian_defect(j, &zx(x), &pair.a_minus(i)));
        }
        let g = pair.grid[pair.grid.len() - 1];
        let zx_zc = uniform_grid(-g, g, 41)
            .into_iter()
            .map(|x| lagrangian_defect(j, &zx(x), &cvec(&w.zhat_c(x, c))))
            .fold(0.0, f64::max);
        let f = |x: f64| w.zhat_xi(x, c).dot(&(self.model.m * w.zhat_c(x, c)));
        let chain_obstruction = integrate(f, -self.l, self.l, 2.0);
        StructuralReport {
            zx_a_plus,
            zx_a_minus,
            zx_zc,
            chain_obstruction,
            didc,
            chain_defect: (chain_obstruction + didc).abs() / didc.abs(),
        }
    }

    pub fn structural_checks(&self) -> Result<StructuralReport> {
        Ok(self.structural_checks_with(&self.tangent_a()?, self.didc()?.value))
    }

    pub fn stability_report(&self) -> Result<StabilityReport> {
        let chi = self.chi_factors()?;
        let pi = self.lazutkin_pi()?;
        let didc = self.didc()?;
        let d = self.derivatives_at_zero(None)?;
        let scan = self.real_axis_scan(self.numerics.lambda_max, self.numerics.scan_n)?;
        let product = chi.chi * pi.pi * didc.value;
        let verdict = if product * scan.d_inf < 0.0 {
            Verdict::UnstableRealEigenvalue
        } else {
            Verdict::Inconclusive
        };
        Ok(StabilityReport {
            model: self.model.name.clone(),
            c: self.c,
            params: self.model.params.clone(),
            chi_minus: chi.chi_minus,
            chi_plus: chi.chi_plus,
            chi: chi.chi,
            pi: pi.pi,
            momentum: self.momentum(),
            didc: didc.value,
            d2_raw: d.d2_raw,
            d2_scaled: d.d2_scaled,
            ratio_check: d.d2_raw / (2.0 * product),
            d_inf: scan.d_inf,
            verdict,
            maslov_parity: pi.pi.signum(),
            orientation: pi.orientation,
            lambda_max: self.numerics.lambda_max,
            real_roots: scan.roots.iter().map(|r: &Root| r.lambda).collect(),
        })
    }
}

pub fn momentum(model: &MultisymplecticModel, wave: &WaveFamily, c: f64) -> Result<f64> {
    Ok(Problem::new(model, wave, c, Numerics::default())?.momentum())
}

pub fn did_c(model: &MultisymplecticModel, wave: &WaveFamily, c: f64) -> Result<DIdc> {
    Problem::new(model, wave, c, Numerics::default())?.didc()
}

pub fn chi_factors(model: &MultisymplecticModel, wave: &WaveFamily, c: f64) -> Result<ChiFactors> {
    Problem::new(model, wave, c, Numerics::default())?.chi_factors()
}

pub fn lazutkin_pi(model: &MultisymplecticModel, wave: &WaveFamily, c: f64) -> Result<PiResult> {
    Problem::new(model, wave, c, Numerics::default())?.lazutkin_pi()
}

pub fn structural_checks(model: &MultisymplecticModel, wave: &WaveFamily, c: f64) -> Result<StructuralReport> {
    Problem::new(model, wave, c, Numerics::default())?.structural_checks()
}

pub fn stability_report(
    model: &MultisymplecticModel,
    wave: &WaveFamily,
    c: f64,
    numerics: &Numerics,
) -> Result<StabilityReport> {
    Problem::new(model, wave, c, numerics.clone())?.stability_report()
}
