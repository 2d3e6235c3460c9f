//! Small ADMM instances and a dense equality-constrained least-squares
//! reference solution.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfinpaint::armodel::ar_objective;
use tfinpaint::degradation::apply_mask;
use tfinpaint::{istft, lpc, stft, synth, ArModel, Spectrogram, StftParams, TfMask, TimeSignal};

pub const N: usize = 256;

pub fn small_params() -> StftParams {
    StftParams::new(32, 8, 32).unwrap()
}

pub struct Instance {
    pub x: Vec<f64>,
    pub model: ArModel,
    pub x_cor: Spectrogram,
    pub mask: TfMask,
}

pub fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = small_params();
    let a = synth::resonant_ar_coeffs(
        &[
            (rng.random_range(300.0..1500.0), rng.random_range(0.8..0.97)),
            (rng.random_range(2000.0..3500.0), rng.random_range(0.7..0.95)),
        ],
        8000.0,
    );
    let x = synth::ar_process(&a, N, 1.0, seed);
    let model = lpc(&x, 4).unwrap();
    let sig = TimeSignal::new(x.clone(), 8000).unwrap();
    let spec = stft(&sig, &params).unwrap();
    let t = spec.n_frames();
    let g = rng.random_range(1..=6);
    let start = rng.random_range(4..t - 4 - g);
    let mut cols: Vec<usize> = (start..start + g).collect();
    if rng.random_bool(0.5) {
        let other = if start > 14 { 5 } else { t - 8 };
        cols.extend(other..other + 2);
    }
    let mask = TfMask::new(t, cols).unwrap();
    let x_cor = apply_mask(&spec, &mask).unwrap();
    Instance { x, model, x_cor, mask }
}

/// Dense equality-constrained least squares: minimize 1/2 ||A x||^2 subject
/// to the reliable columns of G x matching the observation.
pub fn constrained_ls_oracle(inst: &Instance) -> (Vec<f64>, f64) {
    let params = small_params();
    // M = G* P G restricted to reliable columns, built column by column.
    let mut m = DMatrix::<f64>::zeros(N, N);
    for j in 0..N {
        let mut e = vec![0.0; N];
        e[j] = 1.0;
        let s = stft(&TimeSignal::new(e, 8000).unwrap(), &params).unwrap();
        let col = istft(&apply_mask(&s, &inst.mask).unwrap()).unwrap();
        for (i, v) in col.samples().iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    let m = (&m + m.transpose()) * 0.5;
    // G* of the observation; equals M x for any feasible x.
    let rhs = DVector::from_vec(istft(&inst.x_cor).unwrap().into_samples());

    let eig = m.symmetric_eigen();
    let tol = 1e-10;
    let mut particular = DVector::<f64>::zeros(N);
    let mut null_cols = Vec::new();
    for k in 0..N {
        let v = eig.eigenvectors.column(k);
        let lambda = eig.eigenvalues[k];
        if lambda > tol {
            particular += v * (v.dot(&rhs) / lambda);
        } else {
            null_cols.push(v.into_owned());
        }
    }
    let a = inst.model.coeffs();
    let p = a.len() - 1;
    let amat = DMatrix::from_fn(N + p, N, |i, j| if i >= j && i - j <= p { a[i - j] } else { 0.0 });
    let q = amat.transpose() * &amat;
    let x = if null_cols.is_empty() {
        particular
    } else {
        let basis = DMatrix::from_columns(&null_cols);
        let h = basis.transpose() * &q * &basis;
        let g = basis.transpose() * &q * &particular;
        let y = h.cholesky().expect("reduced Hessian is positive definite").solve(&(-g));
        particular + basis * y
    };
    let x: Vec<f64> = x.iter().copied().collect();
    let obj = ar_objective(&inst.model, &x);
    (x, obj)
}
