//! Fixed-size complex linear algebra, exterior algebra on C^4 and small
//! polynomial/eigenvalue solvers.

mod exterior;
mod poly;
mod sym;

pub use exterior::{Bivector, interior1, interior2, pair2, wedge2, wedge4, wedge22};
pub use poly::{Poly4, quartic_roots};
pub use sym::sym_eigs;

use crate::error::{Error, Result};
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CVec4 = Vector4<C64>;
pub type CMat4 = Matrix4<C64>;
pub type RVec4 = Vector4<f64>;
pub type RMat4 = Matrix4<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn cplx(m: &RMat4) -> CMat4 {
    m.map(|x| C64::new(x, 0.0))
}

pub fn cvec(v: &RVec4) -> CVec4 {
    v.map(|x| C64::new(x, 0.0))
}

pub fn is_finite_mat(m: &CMat4) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_finite_vec(v: &CVec4) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn det4(m: &CMat4) -> Result<C64> {
    if !is_finite_mat(m) {
        return Err(Error::NonFinite("det4"));
    }
    Ok(m.determinant())
}

pub fn skew_defect(j: &CMat4) -> f64 {
    (j + j.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Omega(u, v) = <J u, v>, bilinear (no conjugation). Checks skewness of J.
pub fn symplectic_form(j: &CMat4, u: &CVec4, v: &CVec4) -> Result<C64> {
    let d = skew_defect(j);
    if d > 1e-12 {
        return Err(Error::NonSkew(d));
    }
    if !is_finite_vec(u) || !is_finite_vec(v) {
        return Err(Error::NonFinite("symplectic_form"));
    }
    Ok(omega(j, u, v))
}

/// Unchecked variant for inner loops where J is known skew.
#[inline]
pub fn omega(j: &CMat4, u: &CVec4, v: &CVec4) -> C64 {
    (j * u).dot(v)
}

/// Same pairing with a real structure matrix.
#[inline]
pub fn omega_r(j: &RMat4, u: &CVec4, v: &CVec4) -> C64 {
    let mut s = ZERO;
    for r in 0..4 {
        let mut ju = ZERO;
        for c in 0..4 {
            ju += u[c] * j[(r, c)];
        }
        s += ju * v[r];
    }
    s
}

pub fn bilinear(u: &CVec4, v: &CVec4) -> C64 {
    u.dot(v)
}

/// Unit vector, largest-magnitude component real and positive.
pub fn fix_phase(v: &CVec4) -> CVec4 {
    let n = v.norm();
    let mut k = 0;
    for i in 1..4 {
        if v[i].norm() > v[k].norm() * (1.0 + 1e-12) {
            k = i;
        }
    }
    let ph = v[k].conj() / v[k].norm();
    v.map(|z| z * ph / n)
}

/// Unit kernel vector of a rank-3 matrix.
pub fn nullvector(m: &CMat4, tol: f64) -> Result<CVec4> {
    if !is_finite_mat(m) {
        return Err(Error::NonFinite("nullvector"));
    }
    let scale = m.norm();
    if scale == 0.0 {
        return Err(Error::RankError(4));
    }
    let svd = m.svd(false, true);
    let vt = svd.v_t.ok_or(Error::NoConverge(0))?;
    let s = svd.singular_values;
    let small = s.iter().filter(|&&x| x <= tol * scale).count();
    if small != 1 {
        return Err(Error::RankError(small));
    }
    let mut imin = 0;
    for i in 1..4 {
        if s[i] < s[imin] {
            imin = i;
        }
    }
    let v = CVec4::from_iterator(vt.row(imin).iter().map(|z| z.conj()));
    Ok(fix_phase(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::coupled_wave;

    fn real(rows: [[f64; 4]; 4]) -> CMat4 {
        cplx(&RMat4::from_fn(|r, c| rows[r][c]))
    }

    #[test]
    fn det_of_identity_and_k() {
        assert!((det4(&CMat4::identity()).unwrap() - ONE).norm() < 1e-15);
        let k = real([[0., 0., 1., 0.], [0., 0., 0., -1.], [-1., 0., 0., 0.], [0., 1., 0., 0.]]);
        assert!((det4(&k).unwrap() - ONE).norm() < 1e-14);
    }

    #[test]
    fn det_of_jc() {
        let (model, _) = coupled_wave::build(1.0).unwrap();
        for c in [0.0, 0.5, -0.3] {
            let j = cplx(&model.jc_unchecked(c));
            let want = (1.0 - c * c) * (1.0 - c * c);
            assert!((det4(&j).unwrap().re - want).abs() < 1e-14);
        }
        let j = cplx(&model.jc_unchecked(0.5));
        assert!((det4(&j).unwrap().re - 0.5625).abs() < 1e-14);
    }

    #[test]
    fn det_rejects_nan() {
        let mut m = CMat4::identity();
        m[(1, 2)] = C64::new(f64::NAN, 0.0);
        assert_eq!(det4(&m), Err(Error::NonFinite("det4")));
    }

    #[test]
    fn omega_examples() {
        let k = real([[0., 0., 1., 0.], [0., 0., 0., -1.], [-1., 0., 0., 0.], [0., 1., 0., 0.]]);
        let e = |i: usize| CVec4::from_fn(|r, _| if r == i { ONE } else { ZERO });
        assert_eq!(symplectic_form(&k, &e(0), &e(2)).unwrap(), C64::new(-1.0, 0.0));
        let u = CVec4::new(ONE, C64::new(0.3, -1.0), C64::new(2.0, 0.5), C64::new(-0.7, 0.0));
        assert!(symplectic_form(&k, &u, &u).unwrap().norm() < 1e-15);
        assert!(symplectic_form(&CMat4::identity(), &u, &u).is_err());
    }

    #[test]
    fn nullvector_diag_and_rank_errors() {
        let d = real([[1., 0., 0., 0.], [0., 2., 0., 0.], [0., 0., 3., 0.], [0., 0., 0., 0.]]);
        let v = nullvector(&d, 1e-8).unwrap();
        assert!((v[3] - ONE).norm() < 1e-14 && v[0].norm() < 1e-14);
        let d2 = real([[1., 0., 0., 0.], [0., 2., 0., 0.], [0., 0., 0., 0.], [0., 0., 0., 0.]]);
        assert_eq!(nullvector(&d2, 1e-8), Err(Error::RankError(2)));
        assert_eq!(nullvector(&CMat4::identity(), 1e-8), Err(Error::RankError(0)));
    }

    #[test]
    fn nullvector_of_b_inf_minus_mu_j() {
        let (model, _) = coupled_wave::build(1.0).unwrap();
        let m = cplx(&model.b_inf()) - cplx(&model.jc_unchecked(0.0)) * C64::new(2.0, 0.0);
        let v = nullvector(&m, 1e-8).unwrap();
        let want = CVec4::new(ONE, C64::new(-4.0, 0.0), C64::new(2.0, 0.0), C64::new(2.0, 0.0));
        let r = v[0] / want[0];
        assert!((v - want * r).norm() < 1e-12);
    }
}
