use std::collections::VecDeque;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::density::{hermitize, DensityMatrix};
use crate::lindblad::liouvillian::Liouvillian;
use crate::operators::CMatrix;

/// Accepted `||M rho||_inf / max|M_ij|` for a returned steady state.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Relative pivot size below which the sector is treated as singular.
pub const PIVOT_TOL: f64 = 1e-14;

const UNSET: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `||M vec(rho)||_inf` after normalization.
    pub residual: f64,
    /// Number of density-matrix entries coupled to the populations.
    pub sector_size: usize,
    /// Number of BFS levels in the block-tridiagonal elimination.
    pub levels: usize,
}

/// Unique stationary state of a trace-preserving Liouvillian.
///
/// Only the entries reachable from the populations through the sparsity
/// graph of `M` can be nonzero. Ordering them by BFS distance from the
/// vacuum population makes `M` block tridiagonal; pinning that population
/// to one and dropping its (redundant) row leaves a square system solved by
/// block elimination.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyState> {
    let d = l.dim();
    let n = d * d;
    let m = l.matrix();
    let mt = m.transpose();
    let (ro, rc, _) = m.csr_data();
    let (to, tc, _) = mt.csr_data();
    let neighbours = |v: usize| rc[ro[v]..ro[v + 1]].iter().chain(tc[to[v]..to[v + 1]].iter()).copied();

    let root = 0;
    let mut level = vec![UNSET; n];
    level[root] = 0;
    let mut order = vec![root];
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for w in neighbours(v) {
            if level[w] == UNSET {
                level[w] = level[v] + 1;
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    if let Some(i) = (0..d).find(|&i| level[i + i * d] == UNSET) {
        return Err(Error::DegenerateSteadyState(format!(
            "population {i} is decoupled from the vacuum population"
        )));
    }

    let depth = order.iter().map(|&v| level[v]).max().unwrap_or(0);
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); depth + 1];
    let mut local = vec![UNSET; n];
    for &v in &order {
        local[v] = blocks[level[v]].len();
        blocks[level[v]].push(v);
    }

    let scale = l.norm_max();
    let mut x: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
    x[root] = Complex64::new(1.0, 0.0);

    if depth > 0 {
        let (_, _, vals) = m.csr_data();
        // Dense A_{k,k-1}, A_{k,k}, A_{k,k+1} for level k.
        let block = |k: usize, target: usize| -> CMatrix {
            let rows = &blocks[k];
            let cols = &blocks[target];
            let mut out = CMatrix::zeros(rows.len(), cols.len());
            for (r, &row) in rows.iter().enumerate() {
                for p in ro[row]..ro[row + 1] {
                    let c = rc[p];
                    if level[c] == target {
                        out[(r, local[c])] += vals[p];
                    }
                }
            }
            out
        };

        // Forward elimination over levels 1..=depth.
        let mut couplings: Vec<CMatrix> = Vec::with_capacity(depth + 1);
        let mut partial: Vec<DVector<Complex64>> = Vec::with_capacity(depth + 1);
        couplings.push(CMatrix::zeros(0, 0));
        partial.push(DVector::zeros(0));
        for k in 1..=depth {
            let lower = block(k, k - 1);
            let mut diag = block(k, k);
            let rhs = if k == 1 {
                -(&lower * DVector::from_element(1, Complex64::new(1.0, 0.0)))
            } else {
                diag -= &lower * &couplings[k - 1];
                -(&lower * &partial[k - 1])
            };
            let lu = diag.clone().lu();
            let pivot = lu.u().diagonal().iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
            if !(pivot > PIVOT_TOL * scale) {
                return Err(Error::DegenerateSteadyState(format!(
                    "singular elimination block at level {k} (pivot {pivot:.3e})"
                )));
            }
            let y = lu
                .solve(&rhs)
                .ok_or_else(|| Error::DegenerateSteadyState(format!("singular block at level {k}")))?;
            let coupling = if k < depth {
                lu.solve(&block(k, k + 1))
                    .ok_or_else(|| Error::DegenerateSteadyState(format!("singular block at level {k}")))?
            } else {
                CMatrix::zeros(blocks[k].len(), 0)
            };
            couplings.push(coupling);
            partial.push(y);
        }

        // Back substitution.
        let mut next = partial[depth].clone();
        for (i, &v) in blocks[depth].iter().enumerate() {
            x[v] = next[i];
        }
        for k in (1..depth).rev() {
            let cur = &partial[k] - &couplings[k] * &next;
            for (i, &v) in blocks[k].iter().enumerate() {
                x[v] = cur[i];
            }
            next = cur;
        }
    }

    let raw = CMatrix::from_column_slice(d, d, &x);
    let mut rho = hermitize(&raw);
    let tr = rho.trace();
    if !(tr.re.abs() > 0.0) || !tr.re.is_finite() {
        return Err(Error::Numerical(format!("steady-state trace {tr}")));
    }
    rho /= Complex64::new(tr.re, 0.0);
    let residual = l.residual(&rho)?;
    if residual > RESIDUAL_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Numerical(format!(
            "steady-state residual {residual:.3e} exceeds {:.1e} x {scale:.3e}",
            RESIDUAL_TOL
        )));
    }
    let rho = DensityMatrix::new(l.cutoffs().to_vec(), rho)?;
    Ok(SteadyState { rho, residual, sector_size: order.len(), levels: depth + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::generator::{Jump, LindbladGenerator};
    use crate::operators::{matrix_of, OperatorExpr};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_damped_mode_is_thermal() {
        let cutoff = 30;
        let nbar = 0.3;
        let a = matrix_of(&OperatorExpr::annihilate(1, 0).unwrap(), &[cutoff]).unwrap().matrix;
        let jumps = vec![
            Jump { rate: nbar + 1.0, op: a.clone() },
            Jump { rate: nbar, op: a.adjoint() },
        ];
        let d = cutoff + 1;
        let g = LindbladGenerator::new(vec![cutoff], CMatrix::zeros(d, d), jumps).unwrap();
        let ss = steady_state(&Liouvillian::build(&g).unwrap()).unwrap();
        let r = nbar / (nbar + 1.0);
        for k in 0..5 {
            assert_abs_diff_eq!(ss.rho.population(k), (1.0 - r) * r.powi(k as i32), epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_system_is_degenerate() {
        let n = matrix_of(&OperatorExpr::number(1, 0).unwrap(), &[4]).unwrap().matrix;
        let g = LindbladGenerator::new(vec![4], n, Vec::new()).unwrap();
        let err = steady_state(&Liouvillian::build(&g).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DegenerateSteadyState(_)));
    }
}
