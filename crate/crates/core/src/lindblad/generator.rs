use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::density::hilbert_dim;
use crate::operators::{matrix_of, CMatrix, OperatorExpr};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One Lindblad channel `rate * D[op]`.
#[derive(Clone, Debug)]
pub struct Jump {
    pub rate: f64,
    pub op: CMatrix,
}

/// `d rho/dt = -i[H, rho] + sum_k rate_k (L_k rho L_k^† - 1/2 {L_k^† L_k, rho})`
/// over a truncated bosonic basis.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    cutoffs: Vec<usize>,
    hamiltonian: CMatrix,
    jumps: Vec<Jump>,
}

impl LindbladGenerator {
    pub fn new(cutoffs: Vec<usize>, hamiltonian: CMatrix, jumps: Vec<Jump>) -> Result<Self> {
        let dim = hilbert_dim(&cutoffs);
        if hamiltonian.nrows() != dim || hamiltonian.ncols() != dim {
            return Err(Error::ShapeMismatch { expected: dim, found: hamiltonian.nrows() });
        }
        for j in &jumps {
            if j.op.nrows() != dim || j.op.ncols() != dim {
                return Err(Error::ShapeMismatch { expected: dim, found: j.op.nrows() });
            }
            if !(j.rate >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative rate {}", j.rate)));
            }
        }
        Ok(LindbladGenerator { cutoffs, hamiltonian, jumps })
    }

    /// Zero generator on the given basis.
    pub fn zero(cutoffs: Vec<usize>) -> Result<Self> {
        let dim = hilbert_dim(&cutoffs);
        Self::new(cutoffs, CMatrix::zeros(dim, dim), Vec::new())
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    fn check(&self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::ShapeMismatch { expected: self.dim(), found: m.nrows() });
        }
        Ok(())
    }

    /// Schrödinger-picture action on a density matrix.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.check(rho)?;
        let mut out = (&self.hamiltonian * rho - rho * &self.hamiltonian) * (-I);
        for j in &self.jumps {
            out += dissipator_apply(&j.op, j.rate, rho)?;
        }
        Ok(out)
    }

    /// Heisenberg-picture action `i[H, O] + sum rate (L^† O L - 1/2 {L^† L, O})`,
    /// the dual of [`apply`](Self::apply) under `Tr[O rho]`.
    pub fn apply_adjoint(&self, op: &CMatrix) -> Result<CMatrix> {
        self.check(op)?;
        let mut out = (&self.hamiltonian * op - op * &self.hamiltonian) * I;
        for j in &self.jumps {
            out += adjoint_dissipator_apply(&j.op, j.rate, op)?;
        }
        Ok(out)
    }
}

/// `rate (L rho L^† - 1/2 {L^† L, rho})`
pub fn dissipator_apply(l: &CMatrix, rate: f64, rho: &CMatrix) -> Result<CMatrix> {
    if l.shape() != rho.shape() {
        return Err(Error::ShapeMismatch { expected: l.nrows(), found: rho.nrows() });
    }
    if !(rate >= 0.0) {
        return Err(Error::InvalidParameter(format!("negative rate {rate}")));
    }
    if rate == 0.0 {
        return Ok(CMatrix::zeros(rho.nrows(), rho.ncols()));
    }
    let ld = l.adjoint();
    let ldl = &ld * l;
    let half = Complex64::new(0.5, 0.0);
    Ok((l * rho * &ld - (&ldl * rho + rho * &ldl) * half) * Complex64::new(rate, 0.0))
}

/// `rate (L^† O L - 1/2 {L^† L, O})`
pub fn adjoint_dissipator_apply(l: &CMatrix, rate: f64, op: &CMatrix) -> Result<CMatrix> {
    if l.shape() != op.shape() {
        return Err(Error::ShapeMismatch { expected: l.nrows(), found: op.nrows() });
    }
    if rate == 0.0 {
        return Ok(CMatrix::zeros(op.nrows(), op.ncols()));
    }
    let ld = l.adjoint();
    let ldl = &ld * l;
    let half = Complex64::new(0.5, 0.0);
    Ok((&ld * op * l - (&ldl * op + op * &ldl) * half) * Complex64::new(rate, 0.0))
}

/// Dense matrix of a purely bosonic operator expression.
pub fn bosonic_matrix(expr: &OperatorExpr, cutoffs: &[usize]) -> Result<CMatrix> {
    if expr.fermi_modes() != 0 {
        return Err(Error::ShapeMismatch { expected: 0, found: expr.fermi_modes() });
    }
    Ok(matrix_of(expr, cutoffs)?.matrix)
}
