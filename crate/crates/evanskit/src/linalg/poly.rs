use super::{C64, ZERO};
use crate::error::{Error, Result};

/// Degree-4 polynomial, `c[k]` multiplies `z^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poly4 {
    pub c: [C64; 5],
}

impl Poly4 {
    pub fn new(c: [C64; 5]) -> Result<Self> {
        if c[4].norm() == 0.0 || !c[4].is_finite() {
            return Err(Error::Degenerate("leading coefficient of quartic is zero".into()));
        }
        if c.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("Poly4"));
        }
        Ok(Poly4 { c })
    }

    pub fn from_roots(r: &[C64; 4]) -> Self {
        let mut c = [ZERO; 5];
        c[0] = C64::new(1.0, 0.0);
        for (deg, &root) in r.iter().enumerate() {
            for k in (1..=deg + 1).rev() {
                c[k] = c[k - 1] - root * c[k];
            }
            c[0] = -root * c[0];
        }
        Poly4 { c }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.c.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
    }

    pub fn eval_deriv(&self, z: C64) -> (C64, C64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &a in self.c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }

    /// Size of the terms summed at `z`; residuals are measured against it.
    pub fn scale_at(&self, z: C64) -> f64 {
        let r = z.norm();
        self.c
            .iter()
            .enumerate()
            .map(|(k, a)| a.norm() * r.powi(k as i32))
            .sum()
    }
}

/// All four roots by Durand-Kerner iteration followed by Newton polish,
/// sorted by real then imaginary part.
pub fn quartic_roots(p: &Poly4, tol: f64) -> Result<[C64; 4]> {
    let lead = p.c[4];
    let a: Vec<C64> = p.c.iter().map(|z| z / lead).collect();
    let monic = Poly4 {
        c: [a[0], a[1], a[2], a[3], a[4]],
    };
    // Fujiwara bound for the root radius
    let radius = (0..4)
        .map(|k| a[k].norm().powf(1.0 / (4 - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3)
        * 2.0;
    let seed = C64::new(0.4, 0.9);
    let mut z: [C64; 4] = std::array::from_fn(|i| seed.powi(i as i32) * radius);

    const CAP: usize = 2000;
    let mut done = false;
    for _ in 0..CAP {
        let mut max_step: f64 = 0.0;
        for i in 0..4 {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..4 {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = C64::new(1e-300, 0.0);
            }
            let step = monic.eval(z[i]) / den;
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        let converged = z.iter().all(|&r| monic.eval(r).norm() <= tol * monic.scale_at(r)) || max_step <= tol;
        if converged {
            done = true;
            break;
        }
    }
    if !done || z.iter().any(|r| !r.is_finite()) {
        return Err(Error::NoConverge(CAP));
    }

    for r in z.iter_mut() {
        for _ in 0..4 {
            let (f, df) = monic.eval_deriv(*r);
            if df.norm() == 0.0 {
                break;
            }
            let cand = *r - f / df;
            if monic.eval(cand).norm() < f.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    z.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn biquadratic_at_rest() {
        let p = Poly4::new([re(28.0), ZERO, re(-11.0), ZERO, re(1.0)]).unwrap();
        let r = quartic_roots(&p, 1e-12).unwrap();
        let want = [-(7f64.sqrt()), -2.0, 2.0, 7f64.sqrt()];
        for (z, w) in r.iter().zip(want) {
            assert!((z - re(w)).norm() < 1e-12, "{z} vs {w}");
        }
    }

    #[test]
    fn quadruple_root_clusters() {
        let p = Poly4::from_roots(&[re(1.0); 4]);
        let r = quartic_roots(&p, 1e-12).unwrap();
        for z in r {
            assert!((z - re(1.0)).norm() < 1e-3);
        }
    }

    #[test]
    fn zero_leading_coefficient_rejected() {
        assert!(Poly4::new([re(1.0), re(1.0), ZERO, ZERO, ZERO]).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_separated_roots(v in proptest::collection::vec(-3.0f64..3.0, 8)) {
            let roots: [C64; 4] = std::array::from_fn(|i| C64::new(v[2 * i], v[2 * i + 1]));
            let mut gap = f64::INFINITY;
            for i in 0..4 { for j in 0..i { gap = gap.min((roots[i] - roots[j]).norm()); } }
            prop_assume!(gap > 0.1);
            let got = quartic_roots(&Poly4::from_roots(&roots), 1e-12).unwrap();
            for r in roots {
                let d = got.iter().map(|g| (g - r).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(d < 1e-9, "missing root {} (dist {})", r, d);
            }
        }
    }
}
