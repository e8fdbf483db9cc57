//! Multisymplectic models M Z_t + K Z_x = grad S(Z) and solitary-wave families.

pub mod coupled_wave;
pub mod dirac;

use crate::error::{Error, Result};
use crate::linalg::{RMat4, RVec4};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type GradFn = Arc<dyn Fn(&RVec4) -> RVec4 + Send + Sync>;
pub type HessFn = Arc<dyn Fn(&RVec4) -> RMat4 + Send + Sync>;
/// A field of the wave family, evaluated at (xi, c).
pub type FieldFn = Arc<dyn Fn(f64, f64) -> RVec4 + Send + Sync>;

#[derive(Clone)]
pub struct MultisymplecticModel {
    pub name: String,
    pub m: RMat4,
    pub k: RMat4,
    grad: GradFn,
    hess: HessFn,
    pub reversor: Option<RMat4>,
    pub params: BTreeMap<String, f64>,
}

impl fmt::Debug for MultisymplecticModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultisymplecticModel")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

fn skew_defect(m: &RMat4) -> f64 {
    (m + m.transpose()).amax()
}

impl MultisymplecticModel {
    pub fn new(
        name: &str,
        m: RMat4,
        k: RMat4,
        grad: GradFn,
        hess: HessFn,
        reversor: Option<RMat4>,
        params: BTreeMap<String, f64>,
    ) -> Result<Self> {
        for mat in [&m, &k] {
            let d = skew_defect(mat);
            if d > 1e-14 {
                return Err(Error::NonSkew(d));
            }
        }
        Ok(MultisymplecticModel {
            name: name.to_string(),
            m,
            k,
            grad,
            hess,
            reversor,
            params,
        })
    }

    pub fn grad_s(&self, z: &RVec4) -> RVec4 {
        (self.grad)(z)
    }

    pub fn hess_s(&self, z: &RVec4) -> RMat4 {
        (self.hess)(z)
    }

    /// Hessian at the rest state the waves decay to.
    pub fn b_inf(&self) -> RMat4 {
        self.hess_s(&RVec4::zeros())
    }

    pub fn jc_unchecked(&self, c: f64) -> RMat4 {
        self.k + self.m * c
    }

    pub fn jc(&self, c: f64) -> Result<RMat4> {
        let j = self.jc_unchecked(c);
        let det = j.determinant();
        if det.abs() < 1e-10 || !det.is_finite() {
            return Err(Error::SingularJc { c, det: det.abs() });
        }
        Ok(j)
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    /// Structural self-checks on sample points: Hessian symmetry, Hessian
    /// versus finite-differenced gradient, and reversor identities.
    pub fn check_structure(&self, samples: &[RVec4]) -> StructureReport {
        let mut hess_asym: f64 = 0.0;
        let mut hess_fd: f64 = 0.0;
        let mut rev: f64 = 0.0;
        for z in samples {
            let h = self.hess_s(z);
            hess_asym = hess_asym.max((h - h.transpose()).amax());
            let d = 1e-5;
            for j in 0..4 {
                let mut zp = *z;
                let mut zm = *z;
                zp[j] += d;
                zm[j] -= d;
                let col = (self.grad_s(&zp) - self.grad_s(&zm)) / (2.0 * d);
                let err = (col - h.column(j)).amax() / (1.0 + h.amax());
                hess_fd = hess_fd.max(err);
            }
            if let Some(r) = &self.reversor {
                rev = rev.max((self.grad_s(&(r * z)) - r * self.grad_s(z)).amax());
            }
        }
        let reversor_algebra = self.reversor.map(|r| {
            let a = (r * r - RMat4::identity()).amax();
            let b = (r * self.m + self.m * r).amax();
            let c = (r * self.k + self.k * r).amax();
            a.max(b).max(c)
        });
        StructureReport {
            hess_asym,
            hess_fd,
            reversor_grad: rev,
            reversor_algebra,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StructureReport {
    pub hess_asym: f64,
    pub hess_fd: f64,
    pub reversor_grad: f64,
    pub reversor_algebra: Option<f64>,
}

/// Solitary-wave family Zhat(xi, c) over an open speed window.
#[derive(Clone)]
pub struct WaveFamily {
    zhat: FieldFn,
    zhat_xi: FieldFn,
    zhat_c: Option<FieldFn>,
    pub window: (f64, f64),
    decay: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for WaveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveFamily")
            .field("window", &self.window)
            .field("analytic_zhat_c", &self.zhat_c.is_some())
            .finish_non_exhaustive()
    }
}

pub const FD_DC: f64 = 1e-4;

impl WaveFamily {
    pub fn new(
        zhat: FieldFn,
        zhat_xi: FieldFn,
        zhat_c: Option<FieldFn>,
        window: (f64, f64),
        decay: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    ) -> Self {
        WaveFamily {
            zhat,
            zhat_xi,
            zhat_c,
            window,
            decay,
        }
    }

    /// The trivial family Zhat = 0 (frozen-coefficient linearization).
    pub fn rest(decay: f64) -> Self {
        let z: FieldFn = Arc::new(|_, _| RVec4::zeros());
        WaveFamily::new(
            z.clone(),
            z.clone(),
            Some(z),
            (f64::NEG_INFINITY, f64::INFINITY),
            Arc::new(move |_| decay),
        )
    }

    pub fn zhat(&self, xi: f64, c: f64) -> RVec4 {
        (self.zhat)(xi, c)
    }

    pub fn zhat_xi(&self, xi: f64, c: f64) -> RVec4 {
        (self.zhat_xi)(xi, c)
    }

    /// Analytic c-derivative when supplied, else a central difference.
    pub fn zhat_c(&self, xi: f64, c: f64) -> RVec4 {
        match &self.zhat_c {
            Some(f) => f(xi, c),
            None => self.zhat_c_fd(xi, c),
        }
    }

    pub fn zhat_c_fd(&self, xi: f64, c: f64) -> RVec4 {
        (self.zhat(xi, c + FD_DC) - self.zhat(xi, c - FD_DC)) / (2.0 * FD_DC)
    }

    pub fn has_analytic_zhat_c(&self) -> bool {
        self.zhat_c.is_some()
    }

    pub fn without_analytic_zhat_c(&self) -> Self {
        WaveFamily {
            zhat_c: None,
            ..self.clone()
        }
    }

    pub fn decay(&self, c: f64) -> f64 {
        (self.decay)(c)
    }

    pub fn check_speed(&self, c: f64) -> Result<()> {
        if c > self.window.0 && c < self.window.1 && c.is_finite() {
            Ok(())
        } else {
            Err(Error::SpeedOutOfWindow(c))
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WaveResidual {
    pub profile: f64,
    pub tangent: f64,
    pub chain: f64,
}

impl WaveResidual {
    pub fn max(&self) -> f64 {
        self.profile.max(self.tangent).max(self.chain)
    }
}

/// Five-point centered derivative in xi.
fn dxi(f: impl Fn(f64) -> RVec4, xi: f64, h: f64) -> RVec4 {
    (f(xi - 2.0 * h) - f(xi - h) * 8.0 + f(xi + h) * 8.0 - f(xi + 2.0 * h)) / (12.0 * h)
}

/// Residuals of J Zhat_xi = grad S(Zhat), of L Zhat_xi = 0 and of
/// L Zhat_c = M Zhat_xi, with L W = hess S(Zhat) W - J W_xi.
pub fn verify_wave(model: &MultisymplecticModel, wave: &WaveFamily, c: f64, grid: &[f64]) -> WaveResidual {
    let j = model.jc_unchecked(c);
    let h = 1e-3;
    let mut out = WaveResidual {
        profile: 0.0,
        tangent: 0.0,
        chain: 0.0,
    };
    for &xi in grid {
        let z = wave.zhat(xi, c);
        let zx = wave.zhat_xi(xi, c);
        let b = model.hess_s(&z);
        let r0 = j * zx - model.grad_s(&z);
        let zxx = dxi(|s| wave.zhat_xi(s, c), xi, h);
        let r1 = b * zx - j * zxx;
        let zc = wave.zhat_c(xi, c);
        let zcx = dxi(|s| wave.zhat_c(s, c), xi, h);
        let r2 = b * zc - j * zcx - model.m * zx;
        out.profile = out.profile.max(r0.norm());
        out.tangent = out.tangent.max(r1.norm());
        out.chain = out.chain.max(r2.norm());
    }
    out
}

pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jc_singular_at_unit_speed() {
        let (m, _) = coupled_wave::build(1.0).unwrap();
        assert_eq!(m.jc(0.0).unwrap(), m.k);
        assert!((m.jc(0.5).unwrap().determinant() - 0.5625).abs() < 1e-14);
        assert!(matches!(m.jc(1.0), Err(Error::SingularJc { .. })));
    }

    #[test]
    fn exact_wave_has_small_residuals() {
        let (m, w) = coupled_wave::build(1.0).unwrap();
        let grid = uniform_grid(-10.0, 10.0, 201);
        for c in [0.0, 0.3] {
            let r = verify_wave(&m, &w, c, &grid);
            assert!(r.max() <= 1e-8, "{r:?}");
        }
    }

    #[test]
    fn rest_state_is_trivial_solution() {
        let (m, _) = coupled_wave::build(1.0).unwrap();
        let r = verify_wave(&m, &WaveFamily::rest(1.0), 0.0, &uniform_grid(-5.0, 5.0, 11));
        assert_eq!(r.max(), 0.0);
    }

    #[test]
    fn perturbed_wave_is_detected() {
        let (m, w) = coupled_wave::build(1.0).unwrap();
        let base = w.clone();
        let bumped = WaveFamily::new(
            Arc::new(move |xi, c| base.zhat(xi, c) + RVec4::new(0.01, 0.0, 0.0, 0.0)),
            Arc::new({
                let w = w.clone();
                move |xi, c| w.zhat_xi(xi, c)
            }),
            None,
            w.window,
            Arc::new(|_| 2.0),
        );
        let r = verify_wave(&m, &bumped, 0.0, &uniform_grid(-5.0, 5.0, 41));
        assert!(r.profile > 1e-3);
    }

    #[test]
    fn fd_zhat_c_matches_analytic() {
        let (_, w) = coupled_wave::build(1.0).unwrap();
        for xi in [-3.0, -0.4, 0.0, 1.1, 5.0] {
            for c in [0.0, 0.3, -0.5] {
                let d = (w.zhat_c(xi, c) - w.zhat_c_fd(xi, c)).amax();
                assert!(d < 1e-6, "{xi} {c} {d}");
            }
        }
    }
}
