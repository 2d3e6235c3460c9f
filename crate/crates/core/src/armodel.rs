//! Autoregressive models: estimation by the autocorrelation method and the
//! linear operators derived from the prediction-error filter.
//!
//! For coefficients `a = [1, a_2, ..., a_{p+1}]` the error operator `A` is
//! the full linear convolution with `a`, an `(N + p) x N` Toeplitz matrix.
//! Because the convolution is not truncated, `A^T A` is exactly Toeplitz
//! with bandwidth `p`.

use crate::banded::BandedSpdMatrix;
use crate::error::{Error, Result};

/// Relative floor on the prediction-error variance below which the
/// recursion stops.
const VARIANCE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    coeffs: Vec<f64>,
    error_variance: f64,
}

impl ArModel {
    pub fn new(coeffs: Vec<f64>, error_variance: f64) -> Result<Self> {
        if coeffs.first() != Some(&1.0) {
            return Err(Error::InvalidParameter(
                "AR coefficients must start with 1".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("AR coefficients must be finite".into()));
        }
        if !(error_variance >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "error variance {error_variance} is negative"
            )));
        }
        Ok(Self {
            coeffs,
            error_variance,
        })
    }

    /// Identity model `a = [1]`.
    pub fn identity() -> Self {
        Self {
            coeffs: vec![1.0],
            error_variance: 0.0,
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn error_variance(&self) -> f64 {
        self.error_variance
    }

    /// Autocorrelation of the coefficient vector, `g_k = sum_j a_j a_{j+k}`:
    /// the first column of `A^T A`.
    pub fn gram_bands(&self) -> Vec<f64> {
        let a = &self.coeffs;
        (0..a.len())
            .map(|k| a.iter().zip(&a[k..]).map(|(x, y)| x * y).sum())
            .collect()
    }
}

/// Biased autocorrelation estimate `r_k = (1/N) sum_n x_n x_{n+k}` for
/// `k = 0..=max_lag`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if max_lag >= n {
        return Err(Error::InvalidOrder {
            order: max_lag,
            len: n,
        });
    }
    let scale = (n as f64).recip();
    Ok((0..=max_lag)
        .map(|k| {
            let s: f64 = x[..n - k].iter().zip(&x[k..]).map(|(a, b)| a * b).sum();
            s * scale
        })
        .collect())
}

/// Levinson-Durbin recursion for the Yule-Walker equations with
/// autocorrelation `r[0..=p]`.
///
/// If the prediction-error variance collapses before order `p` the recursion
/// stops there and the remaining coefficients are zero.
pub fn levinson(r: &[f64]) -> Result<ArModel> {
    let r0 = *r.first().ok_or(Error::InsufficientData {
        required: 1,
        got: 0,
    })?;
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::DegenerateSignal(r0));
    }
    let p = r.len() - 1;
    let mut a = vec![0.0; p + 1];
    a[0] = 1.0;
    let mut prev = vec![0.0; p + 1];
    let mut err = r0;
    for m in 1..=p {
        let acc: f64 = r[m] + (1..m).map(|i| a[i] * r[m - i]).sum::<f64>();
        let k = -acc / err;
        if !k.is_finite() || k.abs() > 1.0 {
            break;
        }
        prev[..m].copy_from_slice(&a[..m]);
        for i in 1..m {
            a[i] = prev[i] + k * prev[m - i];
        }
        a[m] = k;
        err *= 1.0 - k * k;
        if err <= VARIANCE_FLOOR * r0 {
            err = err.max(0.0);
            break;
        }
    }
    ArModel::new(a, err)
}

/// Estimates an order-`order` AR model from `x`.
pub fn lpc(x: &[f64], order: usize) -> Result<ArModel> {
    levinson(&autocorrelation(x, order)?)
}

/// Prediction error `e = A x`, the full convolution of the coefficients
/// with `x` (length `N + p`).
pub fn ar_error(model: &ArModel, x: &[f64]) -> Vec<f64> {
    let a = model.coeffs();
    let p = a.len() - 1;
    if x.is_empty() {
        return vec![0.0; p];
    }
    let mut e = vec![0.0; x.len() + p];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (ej, xj) in e[i..i + x.len()].iter_mut().zip(x) {
            *ej += ai * xj;
        }
    }
    e
}

/// `1/2 ||A x||^2`.
pub fn ar_objective(model: &ArModel, x: &[f64]) -> f64 {
    0.5 * ar_error(model, x).iter().map(|v| v * v).sum::<f64>()
}

/// `A^T A x`, evaluated through the banded Toeplitz form.
pub fn gram_apply(model: &ArModel, x: &[f64]) -> Vec<f64> {
    let g = model.gram_bands();
    let n = x.len();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = g[0] * x[i];
        for (k, gk) in g.iter().enumerate().skip(1) {
            if k <= i {
                s += gk * x[i - k];
            }
            if i + k < n {
                s += gk * x[i + k];
            }
        }
        *o = s;
    }
    out
}

/// `I + (1/rho) A^T A` in banded storage.
pub fn gram_plus_identity(model: &ArModel, n: usize, rho: f64) -> Result<BandedSpdMatrix> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!("step size {rho} must be positive")));
    }
    let mut bands: Vec<f64> = model.gram_bands().iter().map(|g| g / rho).collect();
    bands[0] += 1.0;
    Ok(BandedSpdMatrix::toeplitz(n, &bands))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use approx::assert_abs_diff_eq;

    #[test]
    fn autocorrelation_examples() {
        let r = autocorrelation(&[1.0, 0.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(r, vec![0.25, 0.0, 0.0]);

        let c = 0.7;
        let r = autocorrelation(&[c; 10], 4).unwrap();
        for (k, rk) in r.iter().enumerate() {
            assert_abs_diff_eq!(*rk, c * c * (10 - k) as f64 / 10.0, epsilon = 1e-15);
        }

        assert_eq!(autocorrelation(&[0.0; 5], 1).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(
            autocorrelation(&[1.0; 3], 3),
            Err(Error::InvalidOrder { .. })
        ));
    }

    #[test]
    fn levinson_examples() {
        let m = levinson(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.coeffs(), &[1.0, 0.0, 0.0]);
        assert_eq!(m.error_variance(), 1.0);

        let m = levinson(&[1.0, 0.5]).unwrap();
        assert_abs_diff_eq!(m.coeffs()[1], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.error_variance(), 0.75, epsilon = 1e-15);

        assert!(matches!(levinson(&[0.0, 0.0]), Err(Error::DegenerateSignal(_))));
        assert!(matches!(levinson(&[-1.0]), Err(Error::DegenerateSignal(_))));
    }

    #[test]
    fn levinson_stops_on_perfect_prediction() {
        // A constant sequence is predicted exactly at order 1.
        let m = levinson(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(m.order(), 3);
        assert_abs_diff_eq!(m.coeffs()[1], -1.0, epsilon = 1e-15);
        assert_eq!(&m.coeffs()[2..], &[0.0, 0.0]);
        assert_eq!(m.error_variance(), 0.0);
    }

    #[test]
    fn recovers_ar2() {
        let truth = [1.0, -1.5, 0.8];
        let x = synth::ar_process(&truth, 200_000, 1.0, 17);
        let m = lpc(&x, 2).unwrap();
        for (a, b) in m.coeffs().iter().zip(truth) {
            assert_abs_diff_eq!(*a, b, epsilon = 0.02);
        }
    }

    #[test]
    fn lpc_examples() {
        let x = synth::ar_process(&[1.0, -0.9], 20_000, 1.0, 3);
        let m = lpc(&x, 1).unwrap();
        assert_abs_diff_eq!(m.coeffs()[1], -0.9, epsilon = 0.01);

        let w = synth::white_noise(20_000, 1.0, 4);
        let m = lpc(&w, 8).unwrap();
        for c in &m.coeffs()[1..] {
            assert!(c.abs() < 0.05, "{c}");
        }

        assert!(matches!(lpc(&[0.0; 100], 4), Err(Error::DegenerateSignal(_))));
    }

    #[test]
    fn error_variance_matches_residual() {
        let truth = [1.0, -1.2, 0.5, -0.1];
        let x = synth::ar_process(&truth, 100_000, 0.3, 8);
        let m = lpc(&x, 3).unwrap();
        let e = ar_error(&m, &x);
        let inner = &e[3..x.len()];
        let mse = inner.iter().map(|v| v * v).sum::<f64>() / inner.len() as f64;
        assert!((mse - m.error_variance()).abs() / mse < 0.05);
    }

    #[test]
    fn ar_error_examples() {
        let x = [0.3, -1.0, 2.0];
        assert_eq!(ar_error(&ArModel::identity(), &x), x.to_vec());

        let m = ArModel::new(vec![1.0, -1.0], 0.0).unwrap();
        assert_eq!(ar_error(&m, &[1.0, 2.0, 3.0]), vec![1.0, 1.0, 1.0, -3.0]);
    }

    #[test]
    fn ar_error_returns_innovation() {
        let innovation: Vec<f64> = (0..50).map(|i| ((i * 7 % 11) as f64 - 5.0) / 5.0).collect();
        let mut x = vec![0.0; 50];
        for n in 0..50 {
            x[n] = innovation[n] + if n > 0 { 0.9 * x[n - 1] } else { 0.0 };
        }
        let m = ArModel::new(vec![1.0, -0.9], 0.0).unwrap();
        let e = ar_error(&m, &x);
        for n in 0..50 {
            assert_abs_diff_eq!(e[n], innovation[n], epsilon = 1e-12);
        }
        assert_abs_diff_eq!(e[50], -0.9 * x[49], epsilon = 1e-12);
    }

    #[test]
    fn gram_examples() {
        let g = gram_plus_identity(&ArModel::identity(), 3, 1.0).unwrap();
        assert_eq!(
            g.to_dense(),
            vec![vec![2.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 2.0]]
        );

        let m = ArModel::new(vec![1.0, -1.0], 0.0).unwrap();
        let g = gram_plus_identity(&m, 3, 1.0).unwrap();
        assert_eq!(
            g.to_dense(),
            vec![
                vec![3.0, -1.0, 0.0],
                vec![-1.0, 3.0, -1.0],
                vec![0.0, -1.0, 3.0]
            ]
        );

        assert!(gram_plus_identity(&m, 3, 0.0).is_err());
        assert!(gram_plus_identity(&m, 3, -1.0).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(ArModel::new(vec![0.5, 1.0], 1.0).is_err());
        assert!(ArModel::new(vec![1.0], -1.0).is_err());
        assert!(ArModel::new(vec![], 1.0).is_err());
    }
}
