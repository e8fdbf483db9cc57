//! Exponentially rescaled integration of the linearized flow and its
//! symplectic adjoint, plus the lambda = 0 solutions a-minus and a-plus.

use crate::error::{Error, Result};
use crate::linalg::{C64, CMat4, CVec4, RMat4, cplx};
use crate::model::{MultisymplecticModel, WaveFamily, uniform_grid};
use crate::problem::{Numerics, Problem};

const OVERFLOW: f64 = 1e12;
const MAX_STEPS: usize = 2_000_000;

/// The coefficient matrix A(xi, lambda) = J(c)^-1 (B(xi) - lambda M) for one speed.
#[derive(Clone)]
pub struct Flow<'a> {
    pub model: &'a MultisymplecticModel,
    pub wave: &'a WaveFamily,
    pub c: f64,
    jinv: RMat4,
    jinv_m: CMat4,
}

impl<'a> Flow<'a> {
    pub fn new(model: &'a MultisymplecticModel, wave: &'a WaveFamily, c: f64) -> Result<Self> {
        let j = model.jc(c)?;
        let jinv = j.try_inverse().ok_or(Error::SingularJc { c, det: 0.0 })?;
        let jinv_m = cplx(&(jinv * model.m));
        Ok(Flow {
            model,
            wave,
            c,
            jinv,
            jinv_m,
        })
    }

    pub fn b(&self, xi: f64) -> RMat4 {
        self.model.hess_s(&self.wave.zhat(xi, self.c))
    }

    pub fn amatrix(&self, lambda: C64, xi: f64) -> CMat4 {
        cplx(&(self.jinv * self.b(xi))) - self.jinv_m * lambda
    }

    /// (A(xi, lambda) - shift I) v
    pub fn apply(&self, lambda: C64, shift: C64, xi: f64, v: &CVec4) -> CVec4 {
        let a = cplx(&(self.jinv * self.b(xi)));
        a * v - (self.jinv_m * v) * lambda - v * shift
    }
}

pub fn amatrix(model: &MultisymplecticModel, wave: &WaveFamily, c: f64, lambda: C64, xi: f64) -> Result<CMat4> {
    Ok(Flow::new(model, wave, c)?.amatrix(lambda, xi))
}

/// Forward solutions u_j of A(xi, lambda), or adjoint solutions w_j of A(xi, -lambda).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Run {
    U,
    W,
}

impl Run {
    /// Sign of the boundary where mode `j` (0-based) is seeded.
    pub fn start_side(self, j: usize) -> f64 {
        match (self, j < 2) {
            (Run::U, true) | (Run::W, false) => 1.0,
            _ => -1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RescaledSolution {
    pub run: Run,
    pub index: usize,
    pub ref_mu: C64,
    pub grid: Vec<f64>,
    /// v = e^{-mu xi} u for U-runs, v = e^{mu xi} w for W-runs.
    pub values: Vec<CVec4>,
    pub steps: usize,
}

impl RescaledSolution {
    fn factor(&self, xi: f64) -> C64 {
        match self.run {
            Run::U => (self.ref_mu * xi).exp(),
            Run::W => (-self.ref_mu * xi).exp(),
        }
    }

    pub fn at(&self, xi: f64) -> Option<CVec4> {
        self.grid.iter().position(|&x| x == xi).map(|i| self.values[i])
    }

    pub fn value_at_zero(&self) -> Option<CVec4> {
        self.at(0.0)
    }

    pub fn end(&self) -> CVec4 {
        *self.values.last().expect("nonempty solution")
    }

    pub fn end_xi(&self) -> f64 {
        *self.grid.last().expect("nonempty solution")
    }

    /// The unscaled solution at sample `i`.
    pub fn unscaled(&self, i: usize) -> CVec4 {
        self.values[i] * self.factor(self.grid[i])
    }
}

fn inf_norm(v: &CVec4) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn lc(y: &CVec4, h: f64, terms: &[(f64, &CVec4)]) -> CVec4 {
    let mut r = *y;
    for (a, k) in terms {
        r += *k * C64::new(a * h, 0.0);
    }
    r
}

/// Dormand-Prince 5(4) with error per unit step, relative to the solution size.
/// `outputs` must be monotone from `x0`; each is hit exactly.
pub fn dopri<F>(f: F, x0: f64, y0: CVec4, outputs: &[f64], tol: f64) -> Result<(Vec<CVec4>, usize)>
where
    F: Fn(f64, &CVec4) -> CVec4,
{
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A2: f64 = 0.2;
    const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
    const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
    const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
    const A6: [f64; 5] = [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ];
    const B: [f64; 6] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    if !(tol > 0.0) {
        return Err(Error::BadParameter("tolerance must be positive".into()));
    }
    let mut out = Vec::with_capacity(outputs.len());
    let Some(&x_end) = outputs.last() else {
        return Ok((out, 0));
    };
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let span = (x_end - x0).abs();
    let hmin = 1e-12 * span.max(1.0);
    let mut h = dir * span.min(0.05);
    let (mut x, mut y) = (x0, y0);
    let mut k1 = f(x, &y);
    let mut next = 0;
    while next < outputs.len() && (outputs[next] - x0) * dir <= 0.0 {
        out.push(y);
        next += 1;
    }
    let mut steps = 0;
    while next < outputs.len() {
        let target = outputs[next];
        let clamped = (x + h - target) * dir >= 0.0;
        let hh = if clamped { target - x } else { h };
        let k2 = f(x + C[0] * hh, &lc(&y, hh, &[(A2, &k1)]));
        let k3 = f(x + C[1] * hh, &lc(&y, hh, &[(A3[0], &k1), (A3[1], &k2)]));
        let k4 = f(x + C[2] * hh, &lc(&y, hh, &[(A4[0], &k1), (A4[1], &k2), (A4[2], &k3)]));
        let k5 = f(
            x + C[3] * hh,
            &lc(&y, hh, &[(A5[0], &k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)]),
        );
        let k6 = f(
            x + C[4] * hh,
            &lc(
                &y,
                hh,
                &[(A6[0], &k1), (A6[1], &k2), (A6[2], &k3), (A6[3], &k4), (A6[4], &k5)],
            ),
        );
        let y5 = lc(
            &y,
            hh,
            &[(B[0], &k1), (B[2], &k3), (B[3], &k4), (B[4], &k5), (B[5], &k6)],
        );
        let k7 = f(x + hh, &y5);
        let err = lc(
            &CVec4::zeros(),
            hh,
            &[
                (E[0], &k1),
                (E[2], &k3),
                (E[3], &k4),
                (E[4], &k5),
                (E[5], &k6),
                (E[6], &k7),
            ],
        );
        let scale = inf_norm(&y).max(inf_norm(&y5)).max(f64::MIN_POSITIVE);
        let ratio = inf_norm(&err) / (tol * hh.abs() * scale);
        if !ratio.is_finite() || !y5.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("integrator state"));
        }
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepFail(x));
        }
        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-0.25)).clamp(0.2, 5.0)
        };
        if ratio <= 1.0 {
            x = if clamped { target } else { x + hh };
            y = y5;
            k1 = k7;
            if inf_norm(&y) > OVERFLOW {
                return Err(Error::Overflow(x));
            }
            if clamped {
                out.push(y);
                next += 1;
                if factor < 1.0 {
                    h = hh * factor;
                }
            } else {
                h = hh * factor;
            }
        } else {
            h = hh * factor;
            if h.abs() < hmin {
                return Err(Error::StepFail(x));
            }
        }
    }
    Ok((out, steps))
}

/// Integrates mode `j` of `spec` from `start` through the `outputs` grid.
pub fn solve(
    flow: &Flow,
    spec: &crate::asymptotics::InfinitySpectrum,
    j: usize,
    run: Run,
    start: f64,
    outputs: &[f64],
    tol: f64,
) -> Result<RescaledSolution> {
    let mu = spec.mu[j];
    let (lam, shift, seed) = match run {
        Run::U => (spec.lambda, mu, spec.zeta[j]),
        Run::W => (-spec.lambda, -mu, spec.eta[j]),
    };
    let (values, steps) = dopri(|xi, v| flow.apply(lam, shift, xi, v), start, seed, outputs, tol)?;
    Ok(RescaledSolution {
        run,
        index: j,
        ref_mu: mu,
        grid: outputs.to_vec(),
        values,
        steps,
    })
}

/// Mode `j` (0-based) integrated from its seeding boundary to xi = 0 on the
/// diagnostic grid.
pub fn integrate_mode(
    model: &MultisymplecticModel,
    wave: &WaveFamily,
    c: f64,
    lambda: C64,
    j: usize,
    run: Run,
    numerics: &Numerics,
) -> Result<RescaledSolution> {
    let p = Problem::new(model, wave, c, numerics.clone())?;
    let spec = p.spectrum(lambda)?;
    let start = run.start_side(j) * p.l;
    p.solve(&spec, j, run, &uniform_grid(start, 0.0, p.numerics.grid_n.max(2)))
}

#[derive(Debug, Clone)]
pub struct TangentPair {
    /// Forward run of the transverse growing mode, from -L across the grid.
    pub minus: RescaledSolution,
    /// Adjoint run of the same mode, from +L across the grid.
    pub plus: RescaledSolution,
    /// Common sample points, ascending.
    pub grid: Vec<f64>,
}

impl TangentPair {
    pub fn a_minus(&self, i: usize) -> CVec4 {
        self.minus
            .unscaled(self.minus.grid.iter().position(|&x| x == self.grid[i]).unwrap())
    }

    pub fn a_plus(&self, i: usize) -> CVec4 {
        self.plus
            .unscaled(self.plus.grid.iter().position(|&x| x == self.grid[i]).unwrap())
    }
}

pub fn tangent_a(model: &MultisymplecticModel, wave: &WaveFamily, c: f64, numerics: &Numerics) -> Result<TangentPair> {
    Problem::new(model, wave, c, numerics.clone())?.tangent_a()
}
