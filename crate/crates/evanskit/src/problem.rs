//! Shared per-speed context: the lambda = 0 spectrum, truncation length,
//! mode labels and the orientation sign.

use crate::asymptotics::{InfinitySpectrum, spectrum};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::integrator::{Flow, RescaledSolution, Run, TangentPair, solve};
use crate::linalg::{C64, ONE, ZERO, cvec, wedge4};
use crate::model::{MultisymplecticModel, WaveFamily, uniform_grid};

#[derive(Debug, Clone)]
pub struct Numerics {
    pub tol: f64,
    /// Truncation half-length; defaults to 40 / (slowest decay rate at lambda = 0).
    pub l: Option<f64>,
    /// Step for derivatives at lambda = 0; defaults to 5% of the gap to the continuous spectrum.
    pub h: Option<f64>,
    pub grid_n: usize,
    pub lambda_max: f64,
    pub scan_n: usize,
    pub exec: Execution,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            tol: 1e-10,
            l: None,
            h: None,
            grid_n: 2001,
            lambda_max: 5.0,
            scan_n: 64,
            exec: Execution::default(),
        }
    }
}

impl Numerics {
    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

/// Everything that depends on (model, wave, c) but not on lambda.
///
/// Labels follow the sorted order of Re mu, except that the growing mode the
/// wave tangent attaches to at -inf is always index 2.
#[derive(Clone)]
pub struct Problem<'a> {
    pub model: &'a MultisymplecticModel,
    pub wave: &'a WaveFamily,
    pub c: f64,
    pub numerics: Numerics,
    pub flow: Flow<'a>,
    pub rest: InfinitySpectrum,
    pub l: f64,
    pub rho: f64,
    /// Least-squares slope of log |Zhat_xi| on the left tail.
    pub tail_slope: f64,
    perm: [usize; 4],
    scales: [C64; 4],
    swapped: bool,
    orientation: Result<(f64, f64)>,
}

impl<'a> Problem<'a> {
    pub fn new(model: &'a MultisymplecticModel, wave: &'a WaveFamily, c: f64, numerics: Numerics) -> Result<Self> {
        wave.check_speed(c)?;
        let flow = Flow::new(model, wave, c)?;
        let raw = spectrum(model, c, ZERO)?;
        let rho = raw.mu.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
        let l = match numerics.l {
            Some(l) if l > 0.0 && l.is_finite() => l,
            Some(l) => return Err(Error::BadParameter(format!("truncation length {l}"))),
            None => 40.0 / rho,
        };
        let tail_slope = tail_slope(wave, c, -l, 5.0 / rho);
        let perm = if tail_slope.is_finite() && (tail_slope - raw.mu[3].re).abs() < (tail_slope - raw.mu[2].re).abs() {
            [1, 0, 3, 2]
        } else {
            [0, 1, 2, 3]
        };
        let mut p = Problem {
            model,
            wave,
            c,
            numerics,
            flow,
            rest: raw.clone(),
            l,
            rho,
            tail_slope,
            perm,
            scales: [ONE; 4],
            swapped: false,
            orientation: Err(Error::OrientationFail),
        };
        p.rest = p.relabel(raw);
        p.orientation = p.compute_orientation();
        Ok(p)
    }

    /// Rescale zeta_j by s_j and eta_j by 1/s_j in every spectrum.
    pub fn with_scales(mut self, s: [C64; 4]) -> Self {
        for (k, z) in s.iter().enumerate() {
            self.rest.rescale(k, *z);
        }
        self.scales = s;
        self
    }

    /// Exchange the labels of the two growing modes.
    pub fn with_swap(mut self) -> Self {
        self.swapped = !self.swapped;
        self.rest.swap(2, 3);
        self
    }

    fn relabel(&self, raw: InfinitySpectrum) -> InfinitySpectrum {
        // perm is the identity or two transpositions, so kconst keeps its sign
        let mut s = raw.clone();
        for i in 0..4 {
            s.mu[i] = raw.mu[self.perm[i]];
            s.zeta[i] = raw.zeta[self.perm[i]];
            s.eta[i] = raw.eta[self.perm[i]];
        }
        if self.swapped {
            s.swap(2, 3);
        }
        for (k, z) in self.scales.iter().enumerate() {
            s.rescale(k, *z);
        }
        s
    }

    pub fn spectrum(&self, lambda: C64) -> Result<InfinitySpectrum> {
        if lambda == ZERO {
            return Ok(self.rest.clone());
        }
        Ok(self.relabel(spectrum(self.model, self.c, lambda)?))
    }

    /// Mode `j` from its seeding boundary across `outputs`.
    pub fn solve(&self, spec: &InfinitySpectrum, j: usize, run: Run, outputs: &[f64]) -> Result<RescaledSolution> {
        solve(
            &self.flow,
            spec,
            j,
            run,
            run.start_side(j) * self.l,
            outputs,
            self.numerics.tol,
        )
    }

    /// Label of the growing mode that the wave tangent attaches to.
    pub fn attached(&self) -> usize {
        if self.swapped { 3 } else { 2 }
    }

    pub fn transverse(&self) -> usize {
        5 - self.attached()
    }

    /// Whether the tangent attaches to the faster growing mode.
    pub fn attaches_to_fastest(&self) -> bool {
        self.perm[2] == 3
    }

    /// +1 or -1 such that the oriented stable and unstable subspaces satisfy
    /// C+ C- K > 0, and the raw limit C+ C- K itself.
    pub fn orientation(&self) -> Result<(f64, f64)> {
        self.orientation.clone()
    }

    fn compute_orientation(&self) -> Result<(f64, f64)> {
        let s = &self.rest;
        let (k, o) = (self.attached(), self.transverse());
        let grow = (s.mu[k].re * self.l).exp();
        let right = cvec(&(self.wave.zhat_xi(self.l, self.c) * grow));
        let left = cvec(&(self.wave.zhat_xi(-self.l, self.c) * grow));
        let q = wedge4(&right, &s.eta[o], &left, &s.zeta[o]);
        let size = right.norm() * s.eta[o].norm() * left.norm() * s.zeta[o].norm();
        if !(q.re.abs() > 1e-8 * size) || !q.re.is_finite() {
            return Err(Error::OrientationFail);
        }
        Ok((q.re.signum(), q.re))
    }

    /// Forward run of the transverse mode from -L and adjoint run of the same mode from +L at
    /// lambda = 0, both sampled on nine common points around the wave core.
    pub fn tangent_a(&self) -> Result<TangentPair> {
        let g = (8.0 / self.rho).min(0.5 * self.l);
        let grid = uniform_grid(-g, g, 9);
        let rev: Vec<f64> = grid.iter().rev().copied().collect();
        let spec = &self.rest;
        let (minus, plus) = self.numerics.exec.join(
            || self.solve(spec, self.transverse(), Run::U, &grid),
            || self.solve(spec, self.transverse(), Run::W, &rev),
        );
        Ok(TangentPair {
            minus: minus?,
            plus: plus?,
            grid,
        })
    }
}

fn tail_slope(wave: &WaveFamily, c: f64, start: f64, width: f64) -> f64 {
    let n = 11;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let x = start + width * i as f64 / (n - 1) as f64;
        let y = wave.zhat_xi(x, c).norm().ln();
        if !y.is_finite() {
            return f64::NAN;
        }
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let nf = n as f64;
    (nf * sxy - sx * sy) / (nf * sxx - sx * sx)
}
