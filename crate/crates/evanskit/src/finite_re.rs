//! Finite-dimensional relative equilibria: the characteristic function
//! det(L - lambda M), adjugate calculus, and a randomized synthesizer for
//! linearizations with a length-two Jordan chain.

use crate::error::{Error, Result};
use crate::linalg::sym_eigs;
use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct REProblem {
    pub n: usize,
    pub m: DMatrix<f64>,
    pub l: DMatrix<f64>,
    pub zeta1: DVector<f64>,
    pub zeta2: DVector<f64>,
    /// Skew generator commuting with M.
    pub s: DMatrix<f64>,
}

impl REProblem {
    /// max of |L zeta1| and |L zeta2 - M zeta1|.
    pub fn chain_residual(&self) -> f64 {
        let a = (&self.l * &self.zeta1).amax();
        let b = (&self.l * &self.zeta2 - &self.m * &self.zeta1).amax();
        a.max(b)
    }

    /// <zeta2, M zeta1>.
    pub fn chain_pairing(&self) -> f64 {
        self.zeta2.dot(&(&self.m * &self.zeta1))
    }
}

fn check_pair(l: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<()> {
    let n = l.nrows();
    if n != l.ncols() || m.shape() != (n, n) {
        return Err(Error::BadParameter(format!(
            "shape mismatch {:?} vs {:?}",
            l.shape(),
            m.shape()
        )));
    }
    Ok(())
}

/// det(L - lambda M).
pub fn char_fn(l: &DMatrix<f64>, m: &DMatrix<f64>, lambda: f64) -> Result<f64> {
    check_pair(l, m)?;
    Ok((l - m * lambda).determinant())
}

/// Transposed cofactor matrix, so that A adj(A) = det(A) I.
pub fn adjugate(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if n != a.ncols() || n == 0 || n > 12 {
        return Err(Error::BadParameter(format!(
            "adjugate needs square n <= 12, got {:?}",
            a.shape()
        )));
    }
    if n == 1 {
        return Ok(DMatrix::from_element(1, 1, 1.0));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let minor = a.clone().remove_row(j).remove_column(i);
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign * minor.determinant()
    }))
}

/// Product of the nonzero eigenvalues of a symmetric L with a one-dimensional kernel.
pub fn mu_product(l: &DMatrix<f64>) -> Result<f64> {
    let e = sym_eigs(l)?;
    let tol = 1e-10 * l.norm();
    let zeros = e.iter().filter(|v| v.abs() <= tol).count();
    if zeros != 1 {
        return Err(Error::KernelDim(zeros));
    }
    Ok(e.iter().filter(|v| v.abs() > tol).product())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Theorem22Report {
    pub d0: f64,
    /// -Tr(adj(L) M)
    pub d1_adjugate: f64,
    pub d1_fd: f64,
    pub d2_fd: f64,
    /// 2 mu(L) <zeta2, M zeta1>
    pub d2_formula: f64,
    pub rel_err: f64,
    pub pass: bool,
}

fn richardson(f: impl Fn(f64) -> f64, h: f64) -> (f64, f64) {
    let f0 = f(0.0);
    let d1 = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    let d2 = |h: f64| (f(h) - 2.0 * f0 + f(-h)) / (h * h);
    let rich = |g: &dyn Fn(f64) -> f64| {
        let (a, b, c) = (g(h), g(0.5 * h), g(0.25 * h));
        let ab = (4.0 * b - a) / 3.0;
        let bc = (4.0 * c - b) / 3.0;
        (16.0 * bc - ab) / 15.0
    };
    (rich(&d1), rich(&d2))
}

pub fn theorem22_check(prob: &REProblem) -> Result<Theorem22Report> {
    let (l, m) = (&prob.l, &prob.m);
    let d0 = char_fn(l, m, 0.0)?;
    let adj = adjugate(l)?;
    let d1_adjugate = -(&adj * m).trace();
    let mu = mu_product(l)?;
    let d2_formula = 2.0 * mu * prob.chain_pairing();
    let h = 0.05 / (l.norm() / l.nrows() as f64).max(1.0);
    let (d1_fd, d2_fd) = richardson(|x| (l - m * x).determinant(), h);
    let scale = mu.abs().max(f64::MIN_POSITIVE);
    let rel_err = (d2_fd - d2_formula).abs() / d2_formula.abs();
    let pass = d0.abs() <= 1e-10 * scale
        && d1_adjugate.abs() <= 1e-8 * scale
        && (d1_fd - d1_adjugate).abs() <= 1e-8 * scale
        && rel_err <= 1e-8;
    Ok(Theorem22Report {
        d0,
        d1_adjugate,
        d1_fd,
        d2_fd,
        d2_formula,
        rel_err,
        pass,
    })
}

pub fn synth_re(n: usize, seed: u64) -> Result<REProblem> {
    synth(n, seed, false)
}

/// Like `synth_re` but with the sign of <zeta2, M zeta1> reversed while mu(L)
/// keeps its sign. Needs n >= 2.
pub fn synth_re_flipped(n: usize, seed: u64) -> Result<REProblem> {
    if n < 2 {
        return Err(Error::BadParameter("a flipped instance needs n >= 2".into()));
    }
    synth(n, seed, true)
}

fn synth(n: usize, seed: u64, flip: bool) -> Result<REProblem> {
    if n == 0 || n > 6 {
        return Err(Error::BadParameter(format!("n = {n} outside 1..=6")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 2 * n;
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let om: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let mut d: Vec<f64> = (0..dim)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                s * rng.random_range(0.5..2.5)
            }
        })
        .collect();
    if flip {
        d[n] = -d[n];
        d[1] = -d[1];
    }
    let mut m0 = DMatrix::zeros(dim, dim);
    let mut s0 = DMatrix::zeros(dim, dim);
    for i in 0..n {
        m0[(i, n + i)] = -w[i];
        m0[(n + i, i)] = w[i];
        s0[(i, n + i)] = -om[i];
        s0[(n + i, i)] = om[i];
    }
    let l0 = DMatrix::from_diagonal(&DVector::from_vec(d.clone()));
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    let conj = |a: &DMatrix<f64>| &q * a * q.transpose();
    let mut z2 = DVector::zeros(dim);
    z2[n] = w[0] / d[n];
    Ok(REProblem {
        n,
        m: conj(&m0),
        l: conj(&l0),
        zeta1: q.column(0).into_owned(),
        zeta2: &q * z2,
        s: conj(&s0),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Corollary23 {
    pub predicted: bool,
    pub lambda_big: f64,
    pub root: Option<f64>,
}

/// When mu(L) <zeta2, M zeta1> < 0, look for a positive real root of det(L - lambda M)
/// on (0, 10 |M^-1 L|].
pub fn corollary23(prob: &REProblem) -> Result<Corollary23> {
    let (l, m) = (&prob.l, &prob.m);
    let predicted = mu_product(l)? * prob.chain_pairing() < 0.0;
    let minv = m
        .clone()
        .try_inverse()
        .ok_or(Error::Degenerate("M is singular".into()))?;
    let lambda_big = 10.0 * (&minv * l).norm();
    if !predicted {
        return Ok(Corollary23 {
            predicted,
            lambda_big,
            root: None,
        });
    }
    let f = |x: f64| (l - m * x).determinant();
    let n = 4000;
    let mut root = None;
    let mut prev = (lambda_big / n as f64, f(lambda_big / n as f64));
    for k in 2..=n {
        let x = lambda_big * k as f64 / n as f64;
        let fx = f(x);
        if fx * prev.1 <= 0.0 {
            let (mut a, mut b, mut fa) = (prev.0, x, prev.1);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fm * fa <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
                if b - a <= 1e-13 * b {
                    break;
                }
            }
            root = Some(0.5 * (a + b));
            break;
        }
        prev = (x, fx);
    }
    Ok(Corollary23 {
        predicted,
        lambda_big,
        root,
    })
}
