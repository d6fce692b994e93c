//! Position-space wavefunctions and the Segal–Bargmann map into the
//! holomorphic representation; Husimi Q densities.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holo::{evaluate, sqrt_factorial, BargmannPoint, HoloState, MultiIndex};

pub const DEFAULT_HALF_WIDTH: f64 = 12.0;
pub const DEFAULT_POINTS: usize = 2048;
/// Edge samples must be below this fraction of the peak magnitude.
pub const GRID_TAIL_TOL: f64 = 1e-8;
/// Samples on each circle used to read off Taylor coefficients.
pub const CONTOUR_POINTS: usize = 128;

/// Uniform grid on `[-half_width, half_width]` with trapezoid weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub half_width: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { half_width: DEFAULT_HALF_WIDTH, points: DEFAULT_POINTS }
    }
}

impl Grid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width > 0.0) || points < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid needs half_width > 0 and at least 3 points (got {half_width}, {points})"
            )));
        }
        Ok(Grid { half_width, points })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.step()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.x(k)).collect()
    }

    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.points {
            0.5 * self.step()
        } else {
            self.step()
        }
    }
}

/// A wavefunction sampled on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledWavefunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledWavefunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.points {
            return Err(Error::ShapeMismatch { expected: grid.points, found: values.len() });
        }
        Ok(SampledWavefunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.xs().into_iter().map(f).collect();
        SampledWavefunction { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `int |f|^2 dx` by the trapezoid rule.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().enumerate().map(|(k, v)| self.grid.weight(k) * v.norm_sqr()).sum()
    }

    /// Errors when the sample has not decayed at the grid edges.
    pub fn check_tails(&self) -> Result<()> {
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let edge = self.values[0].norm().max(self.values[self.values.len() - 1].norm());
        if edge > GRID_TAIL_TOL * peak {
            return Err(Error::GridTail(format!(
                "edge magnitude {edge:.3e} vs peak {peak:.3e} on half-width {}",
                self.grid.half_width
            )));
        }
        Ok(())
    }
}

/// `psi_0(x), ..., psi_{n_max}(x)` by the three-term recurrence.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let psi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if n_max == 0 {
        return out;
    }
    out.push(SQRT_2 * x * psi0);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Normalized Hermite function `psi_n(x)`.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    hermite_functions(n, x)[n]
}

pub fn hermite_wavefunction(n: usize, grid: Grid) -> SampledWavefunction {
    SampledWavefunction::from_fn(grid, |x| Complex64::new(hermite_function(n, x), 0.0))
}

/// `(A psi_0)(z)`, the constant relating `A psi_n` to `2^{n/2} z^n / sqrt(n!)`.
pub fn transform_constant() -> f64 {
    PI.powf(0.25) / SQRT_2
}

/// Segal–Bargmann transform evaluated at `z`:
/// `(A f)(z) = 2^{-1/2} int exp(-z^2 + 2 z x - x^2/2) f(x) dx`.
pub fn segal_bargmann(f: &SampledWavefunction, z: Complex64) -> Result<Complex64> {
    f.check_tails()?;
    let grid = f.grid();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, v) in f.values().iter().enumerate() {
        let x = grid.x(k);
        acc += (-z * z + 2.0 * z * x - 0.5 * x * x).exp() * v * grid.weight(k);
    }
    Ok(acc / SQRT_2)
}

/// Coordinates in the normalized-monomial basis from the overlaps
/// `<psi_n, f>`, `n <= cutoff`.
pub fn to_holo_state(f: &SampledWavefunction, cutoff: usize) -> Result<HoloState> {
    f.check_tails()?;
    let grid = f.grid();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    for (k, v) in f.values().iter().enumerate() {
        let w = grid.weight(k);
        for (n, psi) in hermite_functions(cutoff, grid.x(k)).into_iter().enumerate() {
            coeffs[n] += v * (psi * w);
        }
    }
    HoloState::from_coeffs(
        vec![cutoff],
        coeffs.into_iter().enumerate().map(|(n, c)| (MultiIndex::new([n]), c)),
    )
}

/// Same coordinates, obtained by sampling `A f` on circles and reading off
/// its Taylor coefficients. Degree `n` uses radius `max(1, sqrt(n/2))`, where
/// rounding in the samples is amplified least by the `sqrt(n!)/2^{n/2}` rescaling.
pub fn to_holo_state_via_transform(f: &SampledWavefunction, cutoff: usize) -> Result<HoloState> {
    f.check_tails()?;
    let m = CONTOUR_POINTS.max(2 * (cutoff + 1));
    let c0 = transform_constant();
    let mut coeffs = Vec::with_capacity(cutoff + 1);
    for n in 0..=cutoff {
        let r = (0.5 * n as f64).sqrt().max(1.0);
        let mut taylor = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let theta = 2.0 * PI * j as f64 / m as f64;
            let sample = segal_bargmann(f, Complex64::from_polar(r, theta))?;
            taylor += sample * Complex64::from_polar(1.0, -(n as f64) * theta);
        }
        taylor /= m as f64 * r.powi(n as i32);
        let c = taylor * sqrt_factorial(n) / (c0 * 2f64.powf(n as f64 / 2.0));
        coeffs.push((MultiIndex::new([n]), c));
    }
    HoloState::from_coeffs(vec![cutoff], coeffs)
}

/// Normalization convention for [`husimi_q`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QNormalization {
    /// `|f(conj z)|^2 e^{-|z|^2} / pi^d`, a probability density.
    #[default]
    Standard,
    /// `|f(conj z)|^2 e^{-|z|^2/2} / (2 pi)^d`.
    Alternate,
}

/// Husimi Q density of the state at phase-space point `z`.
pub fn husimi_q(state: &HoloState, z: &BargmannPoint, norm: QNormalization) -> Result<f64> {
    let value = evaluate(state, &z.conj())?.norm_sqr();
    let r2: f64 = z.0.iter().map(|c| c.norm_sqr()).sum();
    let d = z.modes() as i32;
    Ok(match norm {
        QNormalization::Standard => value * (-r2).exp() / PI.powi(d),
        QNormalization::Alternate => value * (-0.5 * r2).exp() / (2.0 * PI).powi(d),
    })
}

/// `int Q d^2z` over the square `[-half_width, half_width]^2` (one mode).
pub fn q_integral(state: &HoloState, half_width: f64, points: usize, norm: QNormalization) -> Result<f64> {
    if state.mode_count() != 1 {
        return Err(Error::ShapeMismatch { expected: 1, found: state.mode_count() });
    }
    let grid = Grid::new(half_width, points)?;
    let mut acc = 0.0;
    for i in 0..points {
        for j in 0..points {
            let z = BargmannPoint::single(Complex64::new(grid.x(i), grid.x(j)));
            acc += grid.weight(i) * grid.weight(j) * husimi_q(state, &z, norm)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hermite_functions_are_normalized() {
        let grid = Grid::default();
        for n in [0, 1, 5, 20] {
            assert_abs_diff_eq!(hermite_wavefunction(n, grid).norm_sqr(), 1.0, epsilon = 1e-12);
        }
        // psi_2 = pi^{-1/4} (2x^2 - 1)/sqrt(2) e^{-x^2/2}
        let x = 0.7f64;
        let exact = PI.powf(-0.25) * (2.0 * x * x - 1.0) / SQRT_2 * (-0.5 * x * x).exp();
        assert_abs_diff_eq!(hermite_function(2, x), exact, epsilon = 1e-15);
    }

    #[test]
    fn ground_state_maps_to_constant() {
        let psi0 = hermite_wavefunction(0, Grid::default());
        for z in [Complex64::new(0.0, 0.0), Complex64::new(1.5, -1.0), Complex64::new(-0.3, 1.9)] {
            let v = segal_bargmann(&psi0, z).unwrap();
            assert!((v - transform_constant()).norm() < 1e-10 * transform_constant());
        }
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let f = SampledWavefunction::from_fn(Grid::new(2.0, 101).unwrap(), |x| Complex64::new((-0.5 * x * x).exp(), 0.0));
        assert!(matches!(to_holo_state(&f, 4), Err(Error::GridTail(_))));
    }

    #[test]
    fn vacuum_q_at_origin() {
        let vac = HoloState::from_coeffs(vec![4], [(MultiIndex::new([0]), Complex64::new(1.0, 0.0))]).unwrap();
        let q = husimi_q(&vac, &BargmannPoint::single(Complex64::new(0.0, 0.0)), QNormalization::Standard).unwrap();
        assert_abs_diff_eq!(q, 1.0 / PI, epsilon = 1e-15);
    }
}
