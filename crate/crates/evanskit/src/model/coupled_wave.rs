//! Coupled nonlinear wave system with an explicit sech^2 solitary wave.
//!
//! S(Z) = (u1^2 - u2^2)/2 + 2 phi^2 - 2 phi^3 - 2 v^2 + v^3 + (p/2)(2 phi - v)^2,
//! Z = (phi, u1, u2, v), and the wave is phi = sech^2(alpha xi),
//! alpha = 1/sqrt(1 - c^2), for every |c| < 1.

use super::{MultisymplecticModel, WaveFamily};
use crate::error::{Error, Result};
use crate::linalg::{C64, RMat4, RVec4};
use std::collections::BTreeMap;
use std::sync::Arc;

pub fn m_matrix() -> RMat4 {
    RMat4::new(0., -1., 0., 0., 1., 0., 0., 0., 0., 0., 0., 1., 0., 0., -1., 0.)
}

pub fn k_matrix() -> RMat4 {
    RMat4::new(0., 0., 1., 0., 0., 0., 0., -1., -1., 0., 0., 0., 0., 1., 0., 0.)
}

pub fn alpha(c: f64) -> f64 {
    1.0 / (1.0 - c * c).sqrt()
}

// sech^2 and its first two derivatives at y
fn profile(y: f64) -> (f64, f64, f64) {
    let s = 1.0 / y.cosh();
    let s2 = s * s;
    let t = y.tanh();
    (s2, -2.0 * s2 * t, 4.0 * s2 * t * t - 2.0 * s2 * s2)
}

pub fn model(p: f64) -> Result<MultisymplecticModel> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::BadParameter(format!("coupled-wave needs p > 0, got {p}")));
    }
    let grad = Arc::new(move |z: &RVec4| {
        let (phi, u1, u2, v) = (z[0], z[1], z[2], z[3]);
        let q = 2.0 * phi - v;
        RVec4::new(
            4.0 * phi - 6.0 * phi * phi + 2.0 * p * q,
            u1,
            -u2,
            -4.0 * v + 3.0 * v * v - p * q,
        )
    });
    #[rustfmt::skip]
    let hess = Arc::new(move |z: &RVec4| {
        let (phi, v) = (z[0], z[3]);
        RMat4::new(
            4.0 - 12.0 * phi + 4.0 * p, 0., 0., -2.0 * p,
            0., 1., 0., 0.,
            0., 0., -1., 0.,
            -2.0 * p, 0., 0., -4.0 + 6.0 * v + p,
        )
    });
    let mut params = BTreeMap::new();
    params.insert("p".to_string(), p);
    MultisymplecticModel::new(
        "coupled-wave",
        m_matrix(),
        k_matrix(),
        grad,
        hess,
        Some(RMat4::from_diagonal(&RVec4::new(1., -1., -1., 1.))),
        params,
    )
}

pub fn wave() -> WaveFamily {
    let zhat = Arc::new(|xi: f64, c: f64| {
        let a = alpha(c);
        let (f, f1, _) = profile(a * xi);
        let fx = a * f1;
        RVec4::new(f, -(2.0 - c) * fx, (1.0 - 2.0 * c) * fx, 2.0 * f)
    });
    let zhat_xi = Arc::new(|xi: f64, c: f64| {
        let a = alpha(c);
        let (_, f1, f2) = profile(a * xi);
        let (fx, fxx) = (a * f1, a * a * f2);
        RVec4::new(fx, -(2.0 - c) * fxx, (1.0 - 2.0 * c) * fxx, 2.0 * fx)
    });
    let zhat_c = Arc::new(|xi: f64, c: f64| {
        let a = alpha(c);
        let da = c * a * a * a;
        let (_, f1, f2) = profile(a * xi);
        let fx = a * f1;
        let fc = f1 * xi * da;
        let fxc = da * f1 + a * f2 * xi * da;
        RVec4::new(fc, fx - (2.0 - c) * fxc, -2.0 * fx + (1.0 - 2.0 * c) * fxc, 2.0 * fc)
    });
    WaveFamily::new(zhat, zhat_xi, Some(zhat_c), (-1.0, 1.0), Arc::new(|c| 2.0 * alpha(c)))
}

pub fn build(p: f64) -> Result<(MultisymplecticModel, WaveFamily)> {
    Ok((model(p)?, wave()))
}

/// Closed forms for the example: exponents, profiles psi+-, the tangent
/// vectors a+-, the exact Evans function and the factors chi, Pi, dI/dc.
#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub p: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl Oracle {
    pub fn new(p: f64, c: f64) -> Self {
        Oracle {
            p,
            c,
            alpha: alpha(c),
            gamma: (4.0 + 3.0 * p).sqrt(),
        }
    }

    pub fn chi(&self) -> f64 {
        -1.0 / (768.0 * self.alpha)
    }

    pub fn momentum(&self) -> f64 {
        -3.2 * self.c * self.alpha
    }

    pub fn didc(&self) -> f64 {
        -3.2 * self.alpha.powi(3)
    }

    /// Pi for the psi-normalized tangent vectors.
    pub fn pi_psi(&self) -> f64 {
        let p = self.p;
        6.0 * p / (25.0 * self.alpha) * self.gamma * (5.0 - 3.0 * p) * (1.0 + p)
    }

    /// D''(0) of the psi-normalized exact Evans function.
    pub fn d2_psi(&self) -> f64 {
        let p = self.p;
        self.alpha * p * self.gamma * (5.0 - 3.0 * p) * (1.0 + p) / 500.0
    }

    /// Pi for tangent vectors normalized against the dual eigenvector pair.
    pub fn pi_dual(&self) -> f64 {
        let g = self.gamma;
        (g - 1.0) * (g - 2.0) * (3.0 - g) / ((g + 1.0) * (g + 2.0) * (g + 3.0))
    }

    pub fn mu(&self, lambda: C64) -> [C64; 4] {
        let a = self.alpha;
        let x2 = lambda * lambda * a * a;
        let shift = lambda * self.c * a * a;
        let s = (x2 + 4.0).sqrt() * a;
        let g = (x2 + 4.0 + 3.0 * self.p).sqrt() * a;
        [shift - g, shift - s, shift + s, shift + g]
    }

    /// Quintic polynomial factor of the exact Evans function in x = alpha lambda.
    pub fn poly_factor(&self, lambda: C64) -> C64 {
        let p = self.p;
        let x2 = lambda * lambda * self.alpha * self.alpha;
        (x2 + 3.0) * (-x2 + 5.0) * (x2 + 3.0 + 3.0 * p) * (x2 + 3.0 * p) * (-x2 + 5.0 - 3.0 * p)
    }

    /// The exact Evans function with psi-normalized boundary solutions.
    pub fn evans_exact(&self, lambda: C64) -> C64 {
        let x2 = lambda * lambda * self.alpha * self.alpha;
        let s = (x2 + 4.0).sqrt() * (x2 + 4.0 + 3.0 * self.p).sqrt();
        s * lambda * lambda * self.alpha * 3.0 / (16.0 * 225.0 * 225.0) * self.poly_factor(lambda)
    }

    /// The Evans determinant with dual-normalized boundary eigenvectors,
    /// a product of two Poschl-Teller transmission factors.
    pub fn evans_dual(&self, lambda: C64) -> C64 {
        let x2 = lambda * lambda * self.alpha * self.alpha;
        let s = (x2 + 4.0).sqrt();
        let g = (x2 + 4.0 + 3.0 * self.p).sqrt();
        let mut d = C64::new(1.0, 0.0);
        for k in 1..=3 {
            let k = k as f64;
            d *= (s - k) * (g - k) / ((s + k) * (g + k));
        }
        d
    }

    fn psi_parts(&self, xi: f64, sgn: f64) -> (f64, f64) {
        let (a, g, p) = (self.alpha, self.gamma, self.p);
        let t = (a * xi).tanh();
        let e = (-sgn * a * g * xi).exp();
        let poly = sgn * p * g / 5.0 + (1.0 + 1.2 * p) * t + sgn * g * t * t + t * t * t;
        let dpoly = (1.0 + 1.2 * p) + 2.0 * sgn * g * t + 3.0 * t * t;
        let psi = e * poly;
        let psi_xi = -sgn * a * g * psi + e * dpoly * a * (1.0 - t * t);
        (psi, psi_xi)
    }

    pub fn psi_plus(&self, xi: f64) -> (f64, f64) {
        self.psi_parts(xi, 1.0)
    }

    pub fn psi_minus(&self, xi: f64) -> (f64, f64) {
        self.psi_parts(xi, -1.0)
    }

    fn a_from(&self, (psi, psi_xi): (f64, f64)) -> RVec4 {
        let c = self.c;
        RVec4::new(2.0 * psi, (2.0 * c - 1.0) * psi_xi, (2.0 - c) * psi_xi, psi)
    }

    pub fn a_plus(&self, xi: f64) -> RVec4 {
        self.a_from(self.psi_plus(xi))
    }

    pub fn a_minus(&self, xi: f64) -> RVec4 {
        self.a_from(self.psi_minus(xi))
    }

    /// Unnormalized eigenvector of the rest state at lambda = 0, index 0..4.
    pub fn zeta_at_rest(&self, j: usize) -> RVec4 {
        let c = self.c;
        let mu = self.mu(C64::new(0.0, 0.0))[j].re;
        match j {
            0 | 3 => RVec4::new(2.0, (2.0 * c - 1.0) * mu, (2.0 - c) * mu, 1.0),
            _ => RVec4::new(1.0, (c - 2.0) * mu, (1.0 - 2.0 * c) * mu, 2.0),
        }
    }
}
