use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Eigenvalues of a real symmetric matrix (n <= 12), ascending.
pub fn sym_eigs(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    if n != m.ncols() || n > 12 {
        return Err(Error::BadParameter(format!(
            "sym_eigs needs square n <= 12, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("sym_eigs"));
    }
    let defect = (m - m.transpose()).amax();
    if defect > 1e-12 * m.amax().max(1.0) {
        return Err(Error::NonSymmetric(defect));
    }
    let mut e: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![5.0, 0.0, 3.0, 2.0]));
        assert_eq!(sym_eigs(&d).unwrap(), vec![0.0, 2.0, 3.0, 5.0]);
        let r = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = sym_eigs(&r).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        let ns = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(matches!(sym_eigs(&ns), Err(Error::NonSymmetric(_))));
    }

    proptest! {
        #[test]
        fn trace_and_residual(n in 1usize..9, v in proptest::collection::vec(-1.0f64..1.0, 144)) {
            let a = DMatrix::from_fn(n, n, |i, j| v[12 * i.max(j) + i.min(j)]);
            let e = sym_eigs(&a).unwrap();
            let tr: f64 = e.iter().sum();
            prop_assert!((tr - a.trace()).abs() < 1e-10);
            let norm = a.norm();
            for &l in &e {
                let s = (a.clone() - DMatrix::identity(n, n) * l).singular_values().min();
                prop_assert!(s <= 1e-10 * norm.max(1.0));
            }
        }
    }
}
