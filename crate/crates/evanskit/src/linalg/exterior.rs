use super::{C64, CVec4, ZERO};
use std::ops::{Add, Mul, Sub};

/// Index pairs of the bivector basis e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bivector(pub [C64; 6]);

impl Bivector {
    pub fn zero() -> Self {
        Bivector([ZERO; 6])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Antisymmetric 4x4 component B_ij.
    pub fn component(&self, i: usize, j: usize) -> C64 {
        if i == j {
            return ZERO;
        }
        let (a, b, s) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let k = PAIRS.iter().position(|&p| p == (a, b)).unwrap();
        self.0[k] * s
    }
}

impl Add for Bivector {
    type Output = Bivector;
    fn add(self, o: Bivector) -> Bivector {
        Bivector(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }
}

impl Sub for Bivector {
    type Output = Bivector;
    fn sub(self, o: Bivector) -> Bivector {
        Bivector(std::array::from_fn(|k| self.0[k] - o.0[k]))
    }
}

impl Mul<C64> for Bivector {
    type Output = Bivector;
    fn mul(self, s: C64) -> Bivector {
        Bivector(self.0.map(|z| z * s))
    }
}

pub fn wedge2(u: &CVec4, v: &CVec4) -> Bivector {
    Bivector(PAIRS.map(|(i, j)| u[i] * v[j] - u[j] * v[i]))
}

/// Coefficient of b^c against e1^e2^e3^e4.
pub fn wedge22(b: &Bivector, c: &Bivector) -> C64 {
    let (b, c) = (&b.0, &c.0);
    b[0] * c[5] - b[1] * c[4] + b[2] * c[3] + b[3] * c[2] - b[4] * c[1] + b[5] * c[0]
}

pub fn wedge4(u1: &CVec4, u2: &CVec4, u3: &CVec4, u4: &CVec4) -> C64 {
    wedge22(&wedge2(u1, u2), &wedge2(u3, u4))
}

/// Pairing of a dual bivector with a bivector (2x2 determinant rule).
pub fn pair2(bs: &Bivector, b: &Bivector) -> C64 {
    bs.0.iter().zip(b.0.iter()).map(|(x, y)| x * y).sum()
}

/// Contraction of a bivector into the 4-form `vol * e1*^e2*^e3*^e4*`,
/// returned as a dual bivector `X` with `pair2(X, c^d) = vol * wedge22(b, c^d)`.
pub fn interior2(vol: C64, b: &Bivector) -> Bivector {
    let b = &b.0;
    Bivector([b[5], -b[4], b[3], b[2], -b[1], b[0]]) * vol
}

/// `c` contracted into a dual bivector: `<c _| B, d> = pair2(B, c^d)`.
pub fn interior1(c: &CVec4, b: &Bivector) -> CVec4 {
    CVec4::from_fn(|j, _| (0..4).map(|i| c[i] * b.component(i, j)).sum())
}
