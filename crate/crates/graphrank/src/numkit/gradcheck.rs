use crate::error::{Error, Result};
use crate::numkit::matrix::Matrix;

/// Compare analytic gradients against central finite differences.
///
/// `loss` must be deterministic for fixed parameters (freeze any sampling
/// before calling). Returns the maximum relative error
/// |a−n| / max(|a|, |n|, 1e-8) over every coordinate of every tensor.
pub fn finite_diff_check<L>(
    loss: L,
    params: &[Matrix],
    analytic: &[Matrix],
    eps: f64,
) -> Result<f64>
where
    L: Fn(&[Matrix]) -> f64,
{
    if params.len() != analytic.len() {
        return Err(Error::DimensionMismatch(
            "finite_diff_check: analytic gradient count mismatch".into(),
        ));
    }
    let mut work: Vec<Matrix> = params.to_vec();
    let mut max_rel = 0.0f64;
    for t in 0..params.len() {
        if params[t].rows() != analytic[t].rows() || params[t].cols() != analytic[t].cols() {
            return Err(Error::DimensionMismatch(
                "finite_diff_check: analytic gradient shape mismatch".into(),
            ));
        }
        for idx in 0..params[t].values().len() {
            let orig = work[t].values()[idx];
            work[t].values_mut()[idx] = orig + eps;
            let plus = loss(&work);
            work[t].values_mut()[idx] = orig - eps;
            let minus = loss(&work);
            work[t].values_mut()[idx] = orig;
            if !plus.is_finite() || !minus.is_finite() {
                return Err(Error::NonFinite("loss in finite_diff_check".into()));
            }
            let numeric = (plus - minus) / (2.0 * eps);
            let a = analytic[t].values()[idx];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
            max_rel = max_rel.max(rel);
        }
    }
    Ok(max_rel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_quadratic() {
        // f(W) = sum w^2, grad 2W; central differences are exact up to roundoff
        let w = Matrix::from_vec(2, 2, vec![0.3, -1.2, 0.7, 2.0]).unwrap();
        let grad = w.map(|v| 2.0 * v);
        let err = finite_diff_check(
            |p| p[0].values().iter().map(|v| v * v).sum(),
            &[w],
            &[grad],
            1e-5,
        )
        .unwrap();
        assert!(err < 1e-8, "err = {err}");
    }

    #[test]
    fn detects_wrong_gradient() {
        let w = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let wrong = Matrix::from_vec(1, 1, vec![3.0]).unwrap();
        let err = finite_diff_check(
            |p| p[0].get(0, 0) * p[0].get(0, 0),
            &[w],
            &[wrong],
            1e-5,
        )
        .unwrap();
        assert!(err > 0.1);
    }
}
