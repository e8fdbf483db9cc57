//! The constant-coefficient system at infinity: spatial exponents mu_j,
//! eigenvectors zeta_j, dual adjoints eta_j, orientation constant and trace
//! factor, plus the continuous-spectrum proxy and hypothesis checks.

use crate::error::{Error, Result};
use crate::linalg::{C64, CMat4, CVec4, Poly4, ZERO, cplx, det4, nullvector, omega, quartic_roots, wedge4};
use crate::model::{MultisymplecticModel, WaveFamily};
use serde::Serialize;

const NULL_TOL: f64 = 1e-8;
const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct InfinitySpectrum {
    pub c: f64,
    pub lambda: C64,
    /// Sorted by real part; two negative, two positive.
    pub mu: [C64; 4],
    pub zeta: [CVec4; 4],
    /// Normalized so that Omega(eta_i, zeta_j) = delta_ij.
    pub eta: [CVec4; 4],
    pub kconst: C64,
    pub tau: f64,
    pub j: CMat4,
}

impl InfinitySpectrum {
    /// zeta_j -> s zeta_j, eta_j -> eta_j / s.
    pub fn rescale(&mut self, j: usize, s: C64) {
        self.zeta[j] *= s;
        self.eta[j] /= s;
        self.kconst *= s;
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        self.mu.swap(a, b);
        self.zeta.swap(a, b);
        self.eta.swap(a, b);
        self.kconst = -self.kconst;
    }

    /// Matrix of Omega(eta_i, zeta_j).
    pub fn duality(&self) -> [[C64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|k| omega(&self.j, &self.eta[i], &self.zeta[k])))
    }

    pub fn min_spacing(&self) -> f64 {
        let mut s = f64::INFINITY;
        for i in 0..4 {
            for k in 0..i {
                s = s.min((self.mu[i] - self.mu[k]).norm());
            }
        }
        s
    }
}

fn char_matrix(model: &MultisymplecticModel, j: &CMat4, lambda: C64, mu: C64) -> CMat4 {
    cplx(&model.b_inf()) - cplx(&model.m) * lambda - j * mu
}

/// det(B_inf - lambda M - mu J(c)).
pub fn delta(model: &MultisymplecticModel, c: f64, lambda: C64, mu: C64) -> Result<C64> {
    let j = cplx(&model.jc(c)?);
    det4(&char_matrix(model, &j, lambda, mu))
}

/// Quartic in mu through its values at mu = -2..2.
pub fn interpolate_quartic(f: impl Fn(f64) -> Result<C64>) -> Result<Poly4> {
    let (fm2, fm1, f0, f1, f2) = (f(-2.0)?, f(-1.0)?, f(0.0)?, f(1.0)?, f(2.0)?);
    let e1 = (f1 + fm1) * 0.5 - f0;
    let e2 = (f2 + fm2) * 0.5 - f0;
    let o1 = (f1 - fm1) * 0.5;
    let o2 = (f2 - fm2) * 0.5;
    let a4 = (e2 - e1 * 4.0) / 12.0;
    let a2 = e1 - a4;
    let a3 = (o2 - o1 * 2.0) / 6.0;
    let a1 = o1 - a3;
    Poly4::new([f0, a1, a2, a3, a4])
}

pub fn char_poly(model: &MultisymplecticModel, c: f64, lambda: C64) -> Result<Poly4> {
    let j = cplx(&model.jc(c)?);
    interpolate_quartic(|mu| det4(&char_matrix(model, &j, lambda, C64::new(mu, 0.0))))
}

pub fn spectrum(model: &MultisymplecticModel, c: f64, lambda: C64) -> Result<InfinitySpectrum> {
    let jr = model.jc(c)?;
    let j = cplx(&jr);
    let poly = interpolate_quartic(|mu| det4(&char_matrix(model, &j, lambda, C64::new(mu, 0.0))))?;
    let mut mu = quartic_roots(&poly, ROOT_TOL)?;
    let real_problem = lambda.im == 0.0;
    if real_problem {
        let s = mu.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for z in mu.iter_mut() {
            if z.im.abs() <= 1e-10 * s {
                z.im = 0.0;
            }
        }
    }
    let scale = mu.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let thr = 1e-8 * scale;
    if !(mu[1].re < -thr && mu[2].re > thr) {
        return Err(Error::SplittingViolated {
            re: lambda.re,
            im: lambda.im,
        });
    }
    let mut spacing = f64::INFINITY;
    for a in 0..4 {
        for b in 0..a {
            spacing = spacing.min((mu[a] - mu[b]).norm());
        }
    }
    if spacing < 1e-6 {
        return Err(Error::DegenerateMu(spacing));
    }
    let b = cplx(&model.b_inf());
    let m = cplx(&model.m);
    let mut zeta = [CVec4::zeros(); 4];
    let mut eta = [CVec4::zeros(); 4];
    let jnorm = j.norm();
    for k in 0..4 {
        zeta[k] = nullvector(&(b - m * lambda - j * mu[k]), NULL_TOL)?;
        let mut e = nullvector(&(b + m * lambda + j * mu[k]), NULL_TOL)?;
        if real_problem && mu[k].im == 0.0 {
            zeta[k] = zeta[k].map(|z| C64::new(z.re, 0.0)).normalize();
            e = e.map(|z| C64::new(z.re, 0.0)).normalize();
        }
        let pairing = omega(&j, &e, &zeta[k]);
        if pairing.norm() < 1e-12 * jnorm {
            return Err(Error::NormalizationFail(pairing.norm()));
        }
        eta[k] = e / pairing;
    }
    for a in 0..4 {
        for k in 0..4 {
            if a != k {
                let x = omega(&j, &eta[a], &zeta[k]).norm();
                if x > 1e-9 * eta[a].norm().max(1.0) {
                    return Err(Error::NormalizationFail(x));
                }
            }
        }
    }
    let kconst = wedge4(&zeta[0], &zeta[1], &zeta[2], &zeta[3]);
    let jinv = jr.try_inverse().ok_or(Error::SingularJc { c, det: 0.0 })?;
    let tau = -(jinv * model.m).trace();
    Ok(InfinitySpectrum {
        c,
        lambda,
        mu,
        zeta,
        eta,
        kconst,
        tau,
        j,
    })
}

/// Reorder `next` within the decaying and growing pairs to follow `prev`.
pub fn match_branches(prev: &InfinitySpectrum, mut next: InfinitySpectrum) -> InfinitySpectrum {
    for (a, b) in [(0, 1), (2, 3)] {
        let keep = (next.mu[a] - prev.mu[a]).norm() + (next.mu[b] - prev.mu[b]).norm();
        let swap = (next.mu[b] - prev.mu[a]).norm() + (next.mu[a] - prev.mu[b]).norm();
        if swap < keep {
            next.swap(a, b);
        }
    }
    next
}

/// Spectra along a path of lambda values with continuous branch labels.
pub fn spectrum_path(model: &MultisymplecticModel, c: f64, lambdas: &[C64]) -> Result<Vec<InfinitySpectrum>> {
    let mut out: Vec<InfinitySpectrum> = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let s = spectrum(model, c, l)?;
        let s = match out.last() {
            Some(prev) => match_branches(prev, s),
            None => s,
        };
        out.push(s);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SigmaContDistance {
    pub min_abs: f64,
    pub kappa: f64,
    pub relative: f64,
    pub on_spectrum: bool,
}

/// Minimum of |det(B_inf - lambda M - i kappa J)| over a kappa grid, refined
/// by golden-section search around the best grid point.
pub fn continuous_spectrum_distance(
    model: &MultisymplecticModel,
    c: f64,
    lambda: C64,
    kappa_grid: &[f64],
) -> Result<SigmaContDistance> {
    let j = cplx(&model.jc(c)?);
    let f = |k: f64| det4(&char_matrix(model, &j, lambda, C64::new(0.0, k))).map(|d| d.norm());
    if kappa_grid.is_empty() || kappa_grid.iter().any(|k| !k.is_finite()) {
        return Err(Error::BadParameter("kappa grid must be finite and nonempty".into()));
    }
    let vals: Vec<f64> = kappa_grid.iter().map(|&k| f(k)).collect::<Result<_>>()?;
    let mut ib = 0;
    for i in 1..vals.len() {
        if vals[i] < vals[ib] {
            ib = i;
        }
    }
    let (mut best_k, mut best) = (kappa_grid[ib], vals[ib]);
    if kappa_grid.len() > 2 {
        let mut a = kappa_grid[ib.saturating_sub(1)];
        let mut b = kappa_grid[(ib + 1).min(kappa_grid.len() - 1)];
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = b - g * (b - a);
            let x2 = a + g * (b - a);
            if f(x1)? < f(x2)? {
                b = x2;
            } else {
                a = x1;
            }
        }
        let k = 0.5 * (a + b);
        let v = f(k)?;
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let detj = j.determinant().norm();
    let size = 1.0 + best_k * best_k + lambda.norm_sqr();
    let relative = best / (detj * size * size);
    Ok(SigmaContDistance {
        min_abs: best,
        kappa: best_k,
        relative,
        on_spectrum: relative < 1e-8,
    })
}

/// Smallest |omega| with lambda = i omega on the continuous spectrum.
pub fn sigma_cont_gap(model: &MultisymplecticModel, c: f64) -> Result<f64> {
    let j = cplx(&model.jc(c)?);
    let b = cplx(&model.b_inf());
    let m = cplx(&model.m);
    let mut gap = f64::INFINITY;
    let n = 2001;
    for i in 0..n {
        let kappa = -20.0 + 40.0 * i as f64 / (n - 1) as f64;
        let base = b - j * C64::new(0.0, kappa);
        let poly = interpolate_quartic(|w| det4(&(base - m * C64::new(0.0, w))))?;
        for w in quartic_roots(&poly, ROOT_TOL)? {
            if w.im.abs() <= 1e-7 * (1.0 + w.norm()) {
                gap = gap.min(w.re.abs());
            }
        }
    }
    Ok(gap)
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub pass: bool,
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct HReport {
    pub c: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub checks: Vec<HypothesisCheck>,
}

impl HReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|h| h.pass)
    }

    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|h| h.name == name)
    }
}

pub fn check_hypotheses(model: &MultisymplecticModel, wave: &WaveFamily, c: f64) -> HReport {
    check_hypotheses_at(model, wave, c, ZERO)
}

/// H1 (J(c) invertible), H4 (simple real exponents at lambda = 0) and
/// H6 (two-two splitting at `lambda`).
pub fn check_hypotheses_at(model: &MultisymplecticModel, wave: &WaveFamily, c: f64, lambda: C64) -> HReport {
    let mut checks = Vec::new();
    let det = model.jc_unchecked(c).determinant().abs();
    let in_window = wave.check_speed(c).is_ok();
    checks.push(HypothesisCheck {
        name: "H1",
        pass: det >= 1e-10 && in_window,
        margin: det,
        detail: if in_window {
            format!("|det J(c)| = {det:e}")
        } else {
            format!("c = {c} outside speed window")
        },
    });
    match spectrum(model, c, ZERO) {
        Ok(s) => {
            let spacing = s.min_spacing();
            let imag = s.mu.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            let pass = spacing >= 1e-6 && imag <= 1e-9 && s.kconst.norm() > 1e-12;
            checks.push(HypothesisCheck {
                name: "H4",
                pass,
                margin: spacing,
                detail: format!(
                    "min spacing {spacing:e}, max |Im mu| {imag:e}, |K| {:e}",
                    s.kconst.norm()
                ),
            });
        }
        Err(e) => checks.push(HypothesisCheck {
            name: "H4",
            pass: false,
            margin: 0.0,
            detail: e.to_string(),
        }),
    }
    match spectrum(model, c, lambda) {
        Ok(s) => {
            let margin = s.mu[1].re.abs().min(s.mu[2].re.abs());
            checks.push(HypothesisCheck {
                name: "H6",
                pass: true,
                margin,
                detail: "two-two splitting".into(),
            })
        }
        Err(e) => checks.push(HypothesisCheck {
            name: "H6",
            pass: false,
            margin: 0.0,
            detail: e.to_string(),
        }),
    }
    HReport {
        c,
        lambda_re: lambda.re,
        lambda_im: lambda.im,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::coupled_wave::{self, Oracle};

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn delta_examples() {
        let m = coupled_wave::model(1.0).unwrap();
        assert!(delta(&m, 0.0, ZERO, re(2.0)).unwrap().norm() < 1e-12);
        assert!((delta(&m, 0.0, ZERO, ZERO).unwrap() - re(28.0)).norm() < 1e-12);
        for mu in [0.3, 1.7, 2.9] {
            let d = delta(&m, 0.0, ZERO, re(mu)).unwrap() - delta(&m, 0.0, ZERO, re(-mu)).unwrap();
            assert!(d.norm() < 1e-12);
        }
        assert!(matches!(delta(&m, 1.0, ZERO, ZERO), Err(Error::SingularJc { .. })));
    }

    #[test]
    fn exponents_at_rest_and_unit_lambda() {
        let m = coupled_wave::model(1.0).unwrap();
        let s = spectrum(&m, 0.0, ZERO).unwrap();
        let want = [-(7f64.sqrt()), -2.0, 2.0, 7f64.sqrt()];
        for k in 0..4 {
            assert!((s.mu[k] - re(want[k])).norm() < 1e-12);
        }
        assert!(s.mu.iter().sum::<C64>().norm() < 1e-10);
        let s1 = spectrum(&m, 0.0, re(1.0)).unwrap();
        let want = [-(8f64.sqrt()), -(5f64.sqrt()), 5f64.sqrt(), 8f64.sqrt()];
        for k in 0..4 {
            assert!((s1.mu[k] - re(want[k])).norm() < 1e-12);
        }
    }

    #[test]
    fn exponents_match_closed_form_off_axis() {
        for (p, c) in [(1.0, 0.3), (2.0, -0.5), (0.5, 0.0)] {
            let m = coupled_wave::model(p).unwrap();
            let o = Oracle::new(p, c);
            for lam in [re(0.7), C64::new(0.5, 0.6), C64::new(2.0, -1.0)] {
                let s = spectrum(&m, c, lam).unwrap();
                for want in o.mu(lam) {
                    let d = s.mu.iter().map(|z| (z - want).norm()).fold(f64::INFINITY, f64::min);
                    assert!(d < 1e-10, "{p} {c} {lam}");
                }
            }
        }
    }

    #[test]
    fn duality_and_reality() {
        let m = coupled_wave::model(1.0).unwrap();
        for c in [0.0, 0.3, -0.5] {
            let s = spectrum(&m, c, ZERO).unwrap();
            let d = s.duality();
            for i in 0..4 {
                for k in 0..4 {
                    let want = if i == k { 1.0 } else { 0.0 };
                    assert!((d[i][k] - re(want)).norm() < 1e-10);
                }
                assert!(s.zeta[i].iter().chain(s.eta[i].iter()).all(|z| z.im == 0.0));
            }
        }
    }

    #[test]
    fn trace_factor() {
        let m = coupled_wave::model(1.0).unwrap();
        assert!(spectrum(&m, 0.0, ZERO).unwrap().tau.abs() < 1e-14);
        assert!((spectrum(&m, 0.5, ZERO).unwrap().tau - 8.0 / 3.0).abs() < 1e-12);
        let s = spectrum(&m, 0.3, re(0.9)).unwrap();
        assert!((s.mu.iter().sum::<C64>() - re(0.9 * s.tau)).norm() < 1e-10);
    }

    #[test]
    fn orientation_constant_matches_closed_form() {
        for (p, c) in [(1.0, 0.0), (2.0, 0.0), (1.0, 0.3)] {
            let m = coupled_wave::model(p).unwrap();
            let o = Oracle::new(p, c);
            let s = spectrum(&m, c, ZERO).unwrap();
            let mut z = 1.0;
            for k in 0..4 {
                let closed = o.zeta_at_rest(k);
                let ratio = s.zeta[k][0].re / closed[0];
                assert!((s.zeta[k].map(|x| x.re) - closed * ratio).norm() < 1e-12);
                z *= ratio;
            }
            let want = -72.0 * z * o.gamma;
            assert!(
                (s.kconst.re - want).abs() < 1e-10 * want.abs(),
                "{p} {c}: {} vs {}",
                s.kconst.re,
                want
            );
        }
    }

    #[test]
    fn rescaling_keeps_duality() {
        let m = coupled_wave::model(1.0).unwrap();
        let mut s = spectrum(&m, 0.2, re(0.4)).unwrap();
        s.rescale(2, C64::new(-3.0, 0.5));
        let d = s.duality();
        assert!((d[2][2] - re(1.0)).norm() < 1e-12);
    }

    #[test]
    fn adjoint_is_eigenvector_of_reflected_problem() {
        let m = coupled_wave::model(1.0).unwrap();
        let lam = C64::new(0.6, 0.2);
        let s = spectrum(&m, 0.3, lam).unwrap();
        let r = spectrum(&m, 0.3, -lam).unwrap();
        for k in 0..4 {
            let idx = (0..4).min_by(|&a, &b| (r.mu[a] + s.mu[k]).norm().total_cmp(&(r.mu[b] + s.mu[k]).norm()));
            let z = r.zeta[idx.unwrap()].normalize();
            let e = s.eta[k].normalize();
            let overlap = z.dotc(&e).norm();
            assert!((overlap - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn branch_matching_follows_path() {
        let m = coupled_wave::model(1.0).unwrap();
        let lams: Vec<C64> = (0..20).map(|i| C64::new(0.1 * i as f64, 0.05 * i as f64)).collect();
        let path = spectrum_path(&m, 0.2, &lams).unwrap();
        for w in path.windows(2) {
            for k in 0..4 {
                assert!((w[1].mu[k] - w[0].mu[k]).norm() < 0.3);
            }
        }
    }

    #[test]
    fn continuous_spectrum_proxy() {
        let m = coupled_wave::model(1.0).unwrap();
        let grid = crate::model::uniform_grid(-6.0, 6.0, 241);
        let on = continuous_spectrum_distance(&m, 0.0, C64::new(0.0, 2.5), &grid).unwrap();
        assert!(on.on_spectrum && on.relative < 1e-10);
        for lam in [ZERO, re(1.0)] {
            let off = continuous_spectrum_distance(&m, 0.0, lam, &grid).unwrap();
            assert!(!off.on_spectrum && off.relative > 1e-2, "{off:?}");
        }
        assert!((sigma_cont_gap(&m, 0.0).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn hypothesis_report() {
        let (m, w) = coupled_wave::build(1.0).unwrap();
        assert!(check_hypotheses(&m, &w, 0.0).all_pass());
        let near = check_hypotheses(&m, &w, 0.999999);
        assert!(!near.get("H1").unwrap().pass);
        let cont = check_hypotheses_at(&m, &w, 0.0, C64::new(0.0, 2.5));
        let h6 = cont.get("H6").unwrap();
        assert!(!h6.pass && h6.detail.contains("splitting"));
        assert!(matches!(
            spectrum(&m, 0.0, C64::new(0.0, 2.5)),
            Err(Error::SplittingViolated { .. })
        ));
    }
}
