//! The Evans function in its symplectic 2x2 form and its exterior-algebra
//! form, derivatives at the origin, real-axis scans and winding counts.

use crate::asymptotics::{InfinitySpectrum, continuous_spectrum_distance, sigma_cont_gap};
use crate::error::{Error, Result};
use crate::integrator::Run;
use crate::linalg::{Bivector, C64, CVec4, interior2, omega, wedge2, wedge4};
use crate::model::{MultisymplecticModel, WaveFamily, uniform_grid};
use crate::problem::{Numerics, Problem};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct EvansSample {
    pub lambda: C64,
    /// Oriented determinant d1 d4 - d2 d3.
    pub d: C64,
    pub d_wedge: Option<C64>,
    /// Omega(w3,u3), Omega(w3,u4), Omega(w4,u3), Omega(w4,u4), oriented.
    pub entries: Option<[C64; 4]>,
    /// Sign applied to the second row (the w4 pairings).
    pub orientation: f64,
}

impl EvansSample {
    /// The determinant before the orientation sign is applied.
    pub fn d_unoriented(&self) -> C64 {
        self.d * self.orientation
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    fn point(&self, t: f64) -> C64 {
        let (w, h) = (self.re1 - self.re0, self.im1 - self.im0);
        match t {
            t if t < 1.0 => C64::new(self.re0 + t * w, self.im0),
            t if t < 2.0 => C64::new(self.re1, self.im0 + (t - 1.0) * h),
            t if t < 3.0 => C64::new(self.re1 - (t - 2.0) * w, self.im1),
            t => C64::new(self.re0, self.im1 - (t - 3.0) * h),
        }
    }

    fn touches_origin(&self) -> bool {
        let on_re = (self.re0 == 0.0 || self.re1 == 0.0) && self.im0 <= 0.0 && self.im1 >= 0.0;
        let on_im = (self.im0 == 0.0 || self.im1 == 0.0) && self.re0 <= 0.0 && self.re1 >= 0.0;
        on_re || on_im
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Derivatives {
    pub h: f64,
    pub d0: C64,
    pub d1: f64,
    pub d2_raw: f64,
    pub d2_scaled: f64,
    /// RMS residual of a least-squares quadratic through the five samples,
    /// relative to the largest |D| among them.
    pub fit_residual: f64,
    pub samples: [(f64, f64); 5],
    pub entries0: [C64; 4],
}

#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub lo: f64,
    pub hi: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct Scan {
    pub samples: Vec<EvansSample>,
    pub roots: Vec<Root>,
    pub d_inf: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct Winding {
    pub winding: i64,
    pub phase: f64,
    pub closure: f64,
    pub points: usize,
}

fn spectral(e: Error, lambda: C64) -> Error {
    match e {
        Error::SplittingViolated { .. } | Error::DegenerateMu(_) => Error::ContourOnSpectrum {
            re: lambda.re,
            im: lambda.im,
        },
        e => e,
    }
}

impl Problem<'_> {
    pub fn evans_det(&self, lambda: C64) -> Result<EvansSample> {
        self.evans_det_at(lambda, 0.0)
    }

    /// Pairings assembled at `xi`; they are independent of it up to integration error.
    pub fn evans_det_at(&self, lambda: C64, xi: f64) -> Result<EvansSample> {
        let spec = self.spectrum(lambda)?;
        let jobs = [(2, Run::U), (3, Run::U), (2, Run::W), (3, Run::W)];
        let sols = self
            .numerics
            .exec
            .map(&jobs, |&(j, run)| self.solve(&spec, j, run, &[xi]));
        let v: Vec<CVec4> = sols.into_iter().map(|s| s.map(|s| s.end())).collect::<Result<_>>()?;
        let pair = |wi: usize, ui: usize| {
            let (i, j) = (jobs[wi].0, jobs[ui].0);
            omega(&spec.j, &v[wi], &v[ui]) * ((spec.mu[j] - spec.mu[i]) * xi).exp()
        };
        let sigma = self.orientation().map(|o| o.0).unwrap_or(1.0);
        let e = [pair(2, 0), pair(2, 1), pair(3, 0) * sigma, pair(3, 1) * sigma];
        Ok(EvansSample {
            lambda,
            d: e[0] * e[3] - e[1] * e[2],
            d_wedge: None,
            entries: Some(e),
            orientation: sigma,
        })
    }

    /// e^{-tau lambda xi} u1 ^ u2 ^ u3 ^ u4 at xi = 0.
    pub fn evans_wedge(&self, lambda: C64) -> Result<C64> {
        let spec = self.spectrum(lambda)?;
        let u = self.u_modes(&spec, 0.0)?;
        Ok(wedge4(&u[0], &u[1], &u[2], &u[3]))
    }

    fn u_modes(&self, spec: &InfinitySpectrum, xi: f64) -> Result<Vec<CVec4>> {
        let idx = [0, 1, 2, 3];
        let sols = self.numerics.exec.map(&idx, |&j| self.solve(spec, j, Run::U, &[xi]));
        sols.into_iter()
            .enumerate()
            .map(|(j, s)| s.map(|s| s.end() * (spec.mu[j] * xi).exp()))
            .collect()
    }

    /// Both representations at one point.
    pub fn evans_both(&self, lambda: C64) -> Result<EvansSample> {
        let mut s = self.evans_det(lambda)?;
        s.d_wedge = Some(self.evans_wedge(lambda)?);
        Ok(s)
    }

    pub fn default_step(&self) -> Result<f64> {
        match self.numerics.h {
            Some(h) if h > 0.0 && h.is_finite() => Ok(h),
            Some(h) => Err(Error::BadParameter(format!("derivative step {h}"))),
            None => Ok(0.05 * sigma_cont_gap(self.model, self.c)?),
        }
    }

    /// D(0) directly, then first and second derivatives by Richardson-extrapolated
    /// central differences over steps h and h/2.
    pub fn derivatives_at_zero(&self, h: Option<f64>) -> Result<Derivatives> {
        let h = match h {
            Some(h) => h,
            None => self.default_step()?,
        };
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::BadParameter(format!("derivative step {h}")));
        }
        let nodes = [-h, -0.5 * h, 0.0, 0.5 * h, h];
        let vals = self.numerics.exec.map(&nodes, |&x| self.evans_det(C64::new(x, 0.0)));
        let vals: Vec<EvansSample> = vals.into_iter().collect::<Result<_>>()?;
        let d: Vec<f64> = vals.iter().map(|s| s.d.re).collect();
        let (dm2, dm1, d0, dp1, dp2) = (d[0], d[1], d[2], d[3], d[4]);
        let d1_h = (dp2 - dm2) / (2.0 * h);
        let d1_h2 = (dp1 - dm1) / h;
        let d2_h = (dp2 - 2.0 * d0 + dm2) / (h * h);
        let d2_h2 = (dp1 - 2.0 * d0 + dm1) / (0.25 * h * h);
        let d1 = (4.0 * d1_h2 - d1_h) / 3.0;
        let d2 = (4.0 * d2_h2 - d2_h) / 3.0;
        let fit_residual = quadratic_fit_residual(&nodes, &d);
        if fit_residual > 1e-3 {
            return Err(Error::StepTooLarge(fit_residual));
        }
        Ok(Derivatives {
            h,
            d0: vals[2].d,
            d1,
            d2_raw: d2,
            d2_scaled: 0.5 * d2,
            fit_residual,
            samples: std::array::from_fn(|i| (nodes[i], d[i])),
            entries0: vals[2].entries.unwrap(),
        })
    }

    pub fn real_axis_scan(&self, lambda_max: f64, n: usize) -> Result<Scan> {
        if !(lambda_max > 0.0 && lambda_max.is_finite()) || n == 0 {
            return Err(Error::BadParameter(format!("scan to {lambda_max} with {n} samples")));
        }
        let lams: Vec<f64> = (1..=n).map(|k| lambda_max * k as f64 / n as f64).collect();
        let samples: Vec<EvansSample> = self
            .numerics
            .exec
            .map(&lams, |&x| self.evans_det(C64::new(x, 0.0)))
            .into_iter()
            .collect::<Result<_>>()?;
        let mut brackets = Vec::new();
        for k in 0..n - 1 {
            let (a, b) = (samples[k].d.re, samples[k + 1].d.re);
            if a == 0.0 {
                brackets.push((lams[k], lams[k]));
            } else if a * b < 0.0 {
                brackets.push((lams[k], lams[k + 1]));
            }
        }
        let roots: Vec<Root> = self
            .numerics
            .exec
            .map(&brackets, |&(lo, hi)| self.bisect(lo, hi))
            .into_iter()
            .collect::<Result<_>>()?;
        let kappa = uniform_grid(-20.0, 20.0, 401);
        let mut warnings = Vec::new();
        for s in &samples {
            if continuous_spectrum_distance(self.model, self.c, s.lambda, &kappa)?.on_spectrum {
                warnings.push(format!(
                    "lambda = {} is within tolerance of the continuous spectrum",
                    s.lambda.re
                ));
            }
        }
        let d_inf = samples[n - 1].d.re.signum();
        Ok(Scan {
            samples,
            roots,
            d_inf,
            warnings,
        })
    }

    fn bisect(&self, mut lo: f64, mut hi: f64) -> Result<Root> {
        let (a0, b0) = (lo, hi);
        if lo == hi {
            return Ok(Root { lo, hi, lambda: lo });
        }
        let mut flo = self.evans_det(C64::new(lo, 0.0))?.d.re;
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            let fm = self.evans_det(C64::new(mid, 0.0))?.d.re;
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm * flo < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        Ok(Root {
            lo: a0,
            hi: b0,
            lambda: 0.5 * (lo + hi),
        })
    }

    /// Winding number of D around the rectangle boundary, traversed
    /// counterclockwise, refining until successive images turn by less than pi/2.
    pub fn winding_count(&self, rect: Rect) -> Result<Winding> {
        if !(rect.re0 < rect.re1 && rect.im0 < rect.im1) {
            return Err(Error::BadParameter("degenerate contour".into()));
        }
        if rect.touches_origin() {
            return Err(Error::ContourOnSpectrum { re: 0.0, im: 0.0 });
        }
        let eval = |t: &f64| {
            let l = rect.point(*t);
            self.evans_det(l).map(|s| s.d).map_err(|e| spectral(e, l))
        };
        let mut ts: Vec<f64> = (0..64).map(|k| k as f64 / 16.0).collect();
        let mut ds: Vec<C64> = self.numerics.exec.map(&ts, eval).into_iter().collect::<Result<_>>()?;
        for _ in 0..40 {
            let n = ts.len();
            let mut mids = Vec::new();
            for k in 0..n {
                let next = (k + 1) % n;
                if (ds[next] / ds[k]).arg().abs() >= 0.5 * PI {
                    let t1 = if next == 0 { 4.0 } else { ts[next] };
                    mids.push(0.5 * (ts[k] + t1));
                }
            }
            if mids.is_empty() {
                break;
            }
            if n + mids.len() > 50_000 {
                return Err(Error::NonClosure(f64::NAN));
            }
            let new: Vec<C64> = self.numerics.exec.map(&mids, eval).into_iter().collect::<Result<_>>()?;
            let mut merged: Vec<(f64, C64)> = ts.iter().copied().zip(ds.iter().copied()).collect();
            merged.extend(mids.into_iter().zip(new));
            merged.sort_by(|a, b| a.0.total_cmp(&b.0));
            (ts, ds) = merged.into_iter().unzip();
        }
        let scale = ds.iter().map(|d| d.norm()).fold(0.0, f64::max);
        if let Some(k) = ds.iter().position(|d| d.norm() <= 1e-14 * scale) {
            let l = rect.point(ts[k]);
            return Err(Error::ContourOnSpectrum { re: l.re, im: l.im });
        }
        let n = ts.len();
        let phase: f64 = (0..n).map(|k| (ds[(k + 1) % n] / ds[k]).arg()).sum();
        let turns = phase / (2.0 * PI);
        let winding = turns.round();
        let closure = (turns - winding).abs();
        if closure > 0.1 {
            return Err(Error::NonClosure(closure));
        }
        Ok(Winding {
            winding: winding as i64,
            phase,
            closure,
            points: n,
        })
    }

    /// Residual of J eta_3 ^ J eta_4 = (zeta_1 ^ zeta_2) interior V*, relative.
    pub fn eta_identity_defect(&self, lambda: C64) -> Result<f64> {
        let s = self.spectrum(lambda)?;
        let je: Vec<CVec4> = s.eta.iter().map(|e| s.j * e).collect();
        let vstar = wedge4(&je[0], &je[1], &je[2], &je[3]);
        let lhs = wedge2(&je[2], &je[3]);
        let rhs = interior2(vstar, &wedge2(&s.zeta[0], &s.zeta[1]));
        Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
    }

    /// Residual of e^{-tau lambda xi} u1 ^ u2 interior V* = J w3 ^ J w4 at `xi`, relative.
    pub fn w_upsilon_defect(&self, lambda: C64, xi: f64) -> Result<f64> {
        let s = self.spectrum(lambda)?;
        let je: Vec<CVec4> = s.eta.iter().map(|e| s.j * e).collect();
        let vstar = wedge4(&je[0], &je[1], &je[2], &je[3]);
        let jobs = [(0, Run::U), (1, Run::U), (2, Run::W), (3, Run::W)];
        let sols = self.numerics.exec.map(&jobs, |&(j, run)| self.solve(&s, j, run, &[xi]));
        let v: Vec<CVec4> = sols.into_iter().map(|r| r.map(|r| r.end())).collect::<Result<_>>()?;
        let grow = |j: usize| (s.mu[j] * xi).exp();
        let u1 = v[0] * grow(0);
        let u2 = v[1] * grow(1);
        let w3 = v[2] / grow(2);
        let w4 = v[3] / grow(3);
        let lhs: Bivector = interior2(vstar, &wedge2(&u1, &u2)) * (-s.lambda * s.tau * xi).exp();
        let rhs = wedge2(&(s.j * w3), &(s.j * w4));
        Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
    }
}

fn quadratic_fit_residual(x: &[f64], y: &[f64]) -> f64 {
    let a = nalgebra::DMatrix::from_fn(x.len(), 3, |i, k| x[i].powi(k as i32));
    let b = nalgebra::DVector::from_column_slice(y);
    let coef = a.clone().svd(true, true).solve(&b, 1e-14).expect("svd solve");
    let r = &a * coef - &b;
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        0.0
    } else {
        (r.norm_squared() / x.len() as f64).sqrt() / scale
    }
}

pub fn evans_det(
    model: &MultisymplecticModel,
    wave: &WaveFamily,
    c: f64,
    lambda: C64,
    numerics: &Numerics,
) -> Result<EvansSample> {
    Problem::new(model, wave, c, numerics.clone())?.evans_det(lambda)
}

pub fn evans_wedge(model: &MultisymplecticModel, wave: &WaveFamily, c: f64, lambda: C64) -> Result<C64> {
    Problem::new(model, wave, c, Numerics::default())?.evans_wedge(lambda)
}

pub fn derivatives_at_zero(
    model: &MultisymplecticModel,
    wave: &WaveFamily,
    c: f64,
    h: Option<f64>,
    numerics: &Numerics,
) -> Result<Derivatives> {
    Problem::new(model, wave, c, numerics.clone())?.derivatives_at_zero(h)
}

pub fn real_axis_scan(
    model: &MultisymplecticModel,
    wave: &WaveFamily,
    c: f64,
    lambda_max: f64,
    n: usize,
    numerics: &Numerics,
) -> Result<Scan> {
    Problem::new(model, wave, c, numerics.clone())?.real_axis_scan(lambda_max, n)
}

pub fn winding_count(
    model: &MultisymplecticModel,
    wave: &WaveFamily,
    c: f64,
    rect: Rect,
    numerics: &Numerics,
) -> Result<Winding> {
    Problem::new(model, wave, c, numerics.clone())?.winding_count(rect)
}
