use nalgebra_sparse::{CooMatrix, CsrMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::generator::LindbladGenerator;
use crate::operators::CMatrix;

/// Largest Hilbert dimension accepted when assembling a superoperator.
pub const DEFAULT_HILBERT_CAP: usize = 512;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Sparse superoperator acting on column-stacked density matrices,
/// `vec(rho)[i + j d] = rho[(i, j)]`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    dim: usize,
    cutoffs: Vec<usize>,
    matrix: CsrMatrix<Complex64>,
}

fn nonzeros(m: &CMatrix) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != ZERO {
                out.push((i, j, v));
            }
        }
    }
    out
}

impl Liouvillian {
    pub fn build(generator: &LindbladGenerator) -> Result<Self> {
        Self::build_with_cap(generator, DEFAULT_HILBERT_CAP)
    }

    pub fn build_with_cap(generator: &LindbladGenerator, cap: usize) -> Result<Self> {
        let d = generator.dim();
        if d > cap {
            return Err(Error::DimensionCap { dim: d, cap });
        }
        let n = d * d;
        let idx = |i: usize, j: usize| i + j * d;

        // d rho = K rho + rho K^† + sum rate L rho L^†, K = -iH - 1/2 sum rate L^† L
        let mut k = generator.hamiltonian() * (-I);
        for jump in generator.jumps() {
            if jump.rate > 0.0 {
                let ldl = jump.op.adjoint() * &jump.op;
                k -= ldl * Complex64::new(0.5 * jump.rate, 0.0);
            }
        }
        let k_nz = nonzeros(&k);
        let mut coo = CooMatrix::new(n, n);
        for &(a, b, v) in &k_nz {
            for j in 0..d {
                // (K rho)_{aj} += K_ab rho_bj
                coo.push(idx(a, j), idx(b, j), v);
                // (rho K^†)_{ja} += rho_jb conj(K_ab)
                coo.push(idx(j, a), idx(j, b), v.conj());
            }
        }
        for jump in generator.jumps() {
            if jump.rate == 0.0 {
                continue;
            }
            let l_nz = nonzeros(&jump.op);
            let rate = Complex64::new(jump.rate, 0.0);
            for &(i, kk, x) in &l_nz {
                for &(j, l, y) in &l_nz {
                    // (L rho L^†)_{ij} += L_ik rho_kl conj(L_jl)
                    coo.push(idx(i, j), idx(kk, l), rate * x * y.conj());
                }
            }
        }
        let matrix = CsrMatrix::from(&coo);
        Ok(Liouvillian { dim: d, cutoffs: generator.cutoffs().to_vec(), matrix })
    }

    /// Hilbert-space dimension `d`; the superoperator is `d^2 x d^2`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn matrix(&self) -> &CsrMatrix<Complex64> {
        &self.matrix
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    pub fn apply_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let (offsets, cols, vals) = self.matrix.csr_data();
        (0..self.matrix.nrows())
            .map(|r| {
                let mut acc = ZERO;
                for p in offsets[r]..offsets[r + 1] {
                    acc += vals[p] * x[cols[p]];
                }
                acc
            })
            .collect()
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::ShapeMismatch { expected: self.dim, found: rho.nrows() });
        }
        let y = self.apply_vec(rho.as_slice());
        Ok(CMatrix::from_column_slice(self.dim, self.dim, &y))
    }

    /// Largest column absolute sum.
    pub fn norm_one(&self) -> f64 {
        let mut col = vec![0.0; self.matrix.ncols()];
        let (_, cols, vals) = self.matrix.csr_data();
        for (c, v) in cols.iter().zip(vals) {
            col[*c] += v.norm();
        }
        col.into_iter().fold(0.0, f64::max)
    }

    /// Largest absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.matrix.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max_col |sum_i M[(i,i), col]|`, zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let mut col = vec![ZERO; self.matrix.ncols()];
        let (offsets, cols, vals) = self.matrix.csr_data();
        for i in 0..self.dim {
            let r = i + i * self.dim;
            for p in offsets[r]..offsets[r + 1] {
                col[cols[p]] += vals[p];
            }
        }
        col.into_iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.matrix.nrows();
        let mut m = CMatrix::zeros(n, n);
        for (r, c, v) in self.matrix.triplet_iter() {
            m[(r, c)] += *v;
        }
        m
    }

    /// `||M vec(rho)||_inf`
    pub fn residual(&self, rho: &CMatrix) -> Result<f64> {
        Ok(self.apply(rho)?.iter().map(|v| v.norm()).fold(0.0, f64::max))
    }
}
