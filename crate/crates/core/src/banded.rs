//! Symmetric positive-definite band matrices and their Cholesky factors.
//!
//! Storage is row-wise over the lower band: row `i` holds the `bandwidth + 1`
//! entries `(i, i - bandwidth) ..= (i, i)`, the diagonal last. Slots left of
//! column 0 in the first rows are kept at zero. Keeping each row contiguous
//! turns the inner loop of the factorization into a plain dot product.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandedSpdMatrix {
    dim: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl BandedSpdMatrix {
    pub fn zeros(dim: usize, bandwidth: usize) -> Self {
        let bandwidth = bandwidth.min(dim.saturating_sub(1));
        Self {
            dim,
            bandwidth,
            data: vec![0.0; dim * (bandwidth + 1)],
        }
    }

    /// Symmetric Toeplitz band matrix with first column `bands` (longer
    /// inputs are truncated to the dimension).
    pub fn toeplitz(dim: usize, bands: &[f64]) -> Self {
        let mut m = Self::zeros(dim, bands.len().saturating_sub(1));
        let w = m.bandwidth;
        for i in 0..dim {
            for d in 0..=w.min(i) {
                m.data[i * (w + 1) + w - d] = bands[d];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bandwidth {
            0.0
        } else {
            self.data[i * (self.bandwidth + 1) + self.bandwidth - (i - j)]
        }
    }

    /// Sets entry `(i, j)` and its mirror.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i >= self.dim || i - j > self.bandwidth {
            return Err(Error::InvalidParameter(format!(
                "entry ({i}, {j}) is outside a band of width {} in dimension {}",
                self.bandwidth, self.dim
            )));
        }
        self.data[i * (self.bandwidth + 1) + self.bandwidth - (i - j)] = value;
        Ok(())
    }

    /// Row `i` of the lower band, diagonal last.
    fn row(&self, i: usize) -> &[f64] {
        let w = self.bandwidth + 1;
        &self.data[i * w..(i + 1) * w]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let w = self.bandwidth;
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            let row = self.row(i);
            let lo = i.saturating_sub(w);
            for j in lo..i {
                let a = row[w - (i - j)];
                out[i] += a * v[j];
                out[j] += a * v[i];
            }
            out[i] += row[w] * v[i];
        }
        Ok(out)
    }

    /// Dense row-major copy, for tests and small problems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Lower-triangular band factor `L` with `L * L^T = B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedCholesky {
    factor: BandedSpdMatrix,
}

impl BandedCholesky {
    pub fn dim(&self) -> usize {
        self.factor.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.factor.bandwidth
    }

    /// Entry `(i, j)` of `L` (zero above the diagonal).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.factor.get(i, j)
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut s = ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

pub fn banded_cholesky(matrix: &BandedSpdMatrix) -> Result<BandedCholesky> {
    let n = matrix.dim;
    let w = matrix.bandwidth;
    let stride = w + 1;
    let mut l = matrix.data.clone();
    for i in 0..n {
        let lo = i.saturating_sub(w);
        for j in lo..=i {
            // Both rows cover columns lo..j: row i from slot lo - (i - w),
            // row j from slot lo - (j - w).
            let len = j - lo;
            let si = i * stride + (lo + w - i);
            let sj = j * stride + (lo + w - j);
            let s = {
                let (head, tail) = l.split_at(i * stride);
                let row_i = &tail[si - i * stride..si - i * stride + len];
                let row_j = if j == i {
                    row_i
                } else {
                    &head[sj..sj + len]
                };
                dot(row_i, row_j)
            };
            let idx = i * stride + (w - (i - j));
            let v = l[idx] - s;
            if j < i {
                l[idx] = v / l[j * stride + w];
            } else {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::NotPositiveDefinite { row: i, pivot: v });
                }
                l[idx] = v.sqrt();
            }
        }
    }
    Ok(BandedCholesky {
        factor: BandedSpdMatrix {
            dim: n,
            bandwidth: w,
            data: l,
        },
    })
}

/// Solves `B x = v` given the factor of `B`.
pub fn banded_solve(factor: &BandedCholesky, v: &[f64]) -> Result<Vec<f64>> {
    let mut x = v.to_vec();
    banded_solve_in_place(factor, &mut x)?;
    Ok(x)
}

pub fn banded_solve_in_place(factor: &BandedCholesky, x: &mut [f64]) -> Result<()> {
    let f = &factor.factor;
    let n = f.dim;
    let w = f.bandwidth;
    let stride = w + 1;
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    // L y = v
    for i in 0..n {
        let lo = i.saturating_sub(w);
        let row = &f.data[i * stride..(i + 1) * stride];
        let s = dot(&row[lo + w - i..w], &x[lo..i]);
        x[i] = (x[i] - s) / row[w];
    }
    // L^T x = y, column-oriented so each row of L is read contiguously.
    for i in (0..n).rev() {
        let row = &f.data[i * stride..(i + 1) * stride];
        x[i] /= row[w];
        let xi = x[i];
        let lo = i.saturating_sub(w);
        for (xj, lij) in x[lo..i].iter_mut().zip(&row[lo + w - i..w]) {
            *xj -= lij * xi;
        }
    }
    Ok(())
}
