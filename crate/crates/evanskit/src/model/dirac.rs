//! Dirac operators on R^{1,1}, the coupled-mode / massive Thirring models and
//! the amplitude change of variables.

use super::MultisymplecticModel;
use crate::error::Result;
use crate::linalg::{C64, RMat4, RVec4};
use std::collections::BTreeMap;
use std::sync::Arc;

pub type IMat4 = [[i64; 4]; 4];

pub fn imul(a: &IMat4, b: &IMat4) -> IMat4 {
    let mut out = [[0; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

pub fn iadd(a: &IMat4, b: &IMat4) -> IMat4 {
    std::array::from_fn(|r| std::array::from_fn(|c| a[r][c] + b[r][c]))
}

pub fn ineg(a: &IMat4) -> IMat4 {
    a.map(|row| row.map(|x| -x))
}

pub fn iscale(s: i64) -> IMat4 {
    std::array::from_fn(|r| std::array::from_fn(|c| if r == c { s } else { 0 }))
}

pub fn to_real(a: &IMat4) -> RMat4 {
    RMat4::from_fn(|r, c| a[r][c] as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiracPair {
    pub j1: IMat4,
    pub j2: IMat4,
    pub metric: IMat4,
    pub m: IMat4,
    pub k: IMat4,
    pub reversor: IMat4,
}

pub fn build_dirac() -> DiracPair {
    let j1 = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]];
    let j2 = [[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]];
    let metric = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]];
    let reversor = [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]];
    DiracPair {
        j1,
        j2,
        metric,
        m: imul(&metric, &j1),
        k: imul(&metric, &j2),
        reversor,
    }
}

impl DiracPair {
    /// Each named identity with whether it holds exactly.
    pub fn identities(&self) -> Vec<(&'static str, bool)> {
        let i = iscale(1);
        let zero = iscale(0);
        let anti = |a: &IMat4, b: &IMat4| iadd(&imul(a, b), &imul(b, a));
        vec![
            ("J1^2 = -I", imul(&self.j1, &self.j1) == ineg(&i)),
            ("J2^2 = I", imul(&self.j2, &self.j2) == i),
            ("J1 J2 + J2 J1 = 0", anti(&self.j1, &self.j2) == zero),
            ("R^2 = I", imul(&self.reversor, &self.reversor) == i),
            ("R M = -M R", anti(&self.reversor, &self.m) == zero),
            ("R K = -K R", anti(&self.reversor, &self.k) == zero),
            (
                "M skew",
                self.m
                    .iter()
                    .enumerate()
                    .all(|(r, row)| (0..4).all(|c| row[c] == -self.m[c][r])),
            ),
            (
                "K skew",
                self.k
                    .iter()
                    .enumerate()
                    .all(|(r, row)| (0..4).all(|c| row[c] == -self.k[c][r])),
            ),
        ]
    }
}

fn thirring(name: &str, alpha: f64, nu: f64) -> Result<MultisymplecticModel> {
    let d = build_dirac();
    // Z = (w1, w2, v1, v2); P = w1 v2 + w2 v1, Q = w.w + v.v
    let grad = Arc::new(move |z: &RVec4| {
        let (w1, w2, v1, v2) = (z[0], z[1], z[2], z[3]);
        let q = z.norm_squared();
        let p = w1 * v2 + w2 * v1;
        RVec4::new(
            -alpha * w1 - nu * q * w1 + 2.0 * nu * p * v2,
            -alpha * w2 - nu * q * w2 + 2.0 * nu * p * v1,
            alpha * v1 - nu * q * v1 + 2.0 * nu * p * w2,
            alpha * v2 - nu * q * v2 + 2.0 * nu * p * w1,
        )
    });
    let hess = Arc::new(move |z: &RVec4| {
        let q = z.norm_squared();
        let p = z[0] * z[3] + z[1] * z[2];
        // dP/dz
        let dp = RVec4::new(z[3], z[2], z[1], z[0]);
        let mut h = RMat4::from_diagonal(&RVec4::new(-alpha, -alpha, alpha, alpha));
        h -= RMat4::identity() * (nu * q);
        h -= (z * z.transpose()) * (2.0 * nu);
        h += (dp * dp.transpose()) * (2.0 * nu);
        // second derivative of P is the anti-diagonal exchange
        let ex = RMat4::new(0., 0., 0., 1., 0., 0., 1., 0., 0., 1., 0., 0., 1., 0., 0., 0.);
        h += ex * (2.0 * nu * p);
        h
    });
    let mut params = BTreeMap::new();
    params.insert("alpha".to_string(), alpha);
    params.insert("nu".to_string(), nu);
    MultisymplecticModel::new(
        name,
        to_real(&d.m),
        to_real(&d.k),
        grad,
        hess,
        Some(to_real(&d.reversor)),
        params,
    )
}

/// Massive Thirring model in Dirac form.
pub fn build_mtm(alpha: f64, nu: f64) -> Result<MultisymplecticModel> {
    thirring("mtm", alpha, nu)
}

/// Coupled-mode equations in (w, v) coordinates, Thirring nonlinearity.
pub fn build_cme(alpha: f64, nu: f64) -> Result<MultisymplecticModel> {
    thirring("cme", alpha, nu)
}

/// Linear massive Dirac equation.
pub fn build_dirac_demo(mass: f64) -> Result<MultisymplecticModel> {
    let mut m = thirring("dirac-demo", mass, 0.0)?;
    m.params.remove("nu");
    Ok(m)
}

pub fn cme_to_z(a: C64, b: C64) -> RVec4 {
    RVec4::new(
        (a.re + b.re) / 2.0,
        (a.im + b.im) / 2.0,
        (b.im - a.im) / 2.0,
        (b.re - a.re) / 2.0,
    )
}

pub fn z_to_cme(z: &RVec4) -> (C64, C64) {
    let (w1, w2, v1, v2) = (z[0], z[1], z[2], z[3]);
    (C64::new(w1 - v2, w2 - v1), C64::new(w1 + v2, w2 + v1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clifford_identities_exact() {
        let d = build_dirac();
        for (name, ok) in d.identities() {
            assert!(ok, "{name}");
        }
        assert_eq!(d.m, [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]);
        assert_eq!(d.k, [[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]]);
    }

    #[test]
    fn mtm_gradient_and_hessian() {
        let m = build_mtm(0.7, 1.3).unwrap();
        assert_eq!(m.grad_s(&RVec4::zeros()), RVec4::zeros());
        assert_eq!(m.b_inf(), RMat4::from_diagonal(&RVec4::new(-0.7, -0.7, 0.7, 0.7)));
        let r = m.check_structure(&[RVec4::new(0.1, 0.2, -0.1, 0.3), RVec4::new(1.0, -0.5, 0.7, 0.2)]);
        assert!(r.hess_fd < 1e-6 && r.hess_asym < 1e-15, "{r:?}");
        assert!(r.reversor_grad < 1e-14);
    }

    #[test]
    fn mtm_gradient_matches_potential() {
        let (alpha, nu) = (0.9, -0.4);
        let s = |z: &RVec4| {
            let ww = z[0] * z[0] + z[1] * z[1];
            let vv = z[2] * z[2] + z[3] * z[3];
            let p = z[0] * z[3] + z[1] * z[2];
            -0.5 * alpha * (ww - vv) - 0.25 * nu * (ww + vv).powi(2) + nu * p * p
        };
        let m = build_mtm(alpha, nu).unwrap();
        let z = RVec4::new(0.3, -0.2, 0.5, 0.1);
        let g = m.grad_s(&z);
        for j in 0..4 {
            let mut zp = z;
            let mut zm = z;
            zp[j] += 1e-6;
            zm[j] -= 1e-6;
            assert!(((s(&zp) - s(&zm)) / 2e-6 - g[j]).abs() < 1e-8);
        }
    }

    #[test]
    fn amplitude_examples() {
        let one = C64::new(1.0, 0.0);
        assert_eq!(cme_to_z(one, one), RVec4::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(
            cme_to_z(C64::new(0.0, 1.0), C64::new(0.0, -1.0)),
            RVec4::new(0.0, 0.0, -1.0, 0.0)
        );
    }

    proptest! {
        #[test]
        fn amplitude_roundtrip(x in proptest::collection::vec(-5.0f64..5.0, 4)) {
            let (a, b) = (C64::new(x[0], x[1]), C64::new(x[2], x[3]));
            let (a2, b2) = z_to_cme(&cme_to_z(a, b));
            prop_assert!((a - a2).norm() < 1e-14 && (b - b2).norm() < 1e-14);
        }
    }
}
