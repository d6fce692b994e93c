//! Bosonic states as truncated holomorphic polynomials.
//!
//! A state of `d` bosonic modes is stored as a sparse map from occupation
//! multi-indices `n = (n_1, ..., n_d)` to the complex amplitude of the
//! normalized monomial `z^n / sqrt(n!)`. In that basis the Gaussian-measure
//! inner product is the plain Hermitian dot product of coefficient vectors,
//! the creation operator is multiplication by `z` and annihilation is `d/dz`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes below this magnitude are dropped from the sparse map.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Largest `n` for which `sqrt(n!)` is tabulated (170! is the last finite f64 factorial).
pub const MAX_TABULATED_DEGREE: usize = 170;

/// Tail weight a series-defined state (coherent, cat) may leave above its cutoff.
pub const SERIES_TAIL_TOLERANCE: f64 = 1e-10;

fn sqrt_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(MAX_TABULATED_DEGREE + 1);
        let mut acc = 1.0_f64;
        table.push(acc);
        for n in 1..=MAX_TABULATED_DEGREE {
            acc *= (n as f64).sqrt();
            table.push(acc);
        }
        table
    })
}

/// `sqrt(n!)` from the cumulative-product table.
///
/// # Panics
/// If `n > MAX_TABULATED_DEGREE`.
pub fn sqrt_factorial(n: usize) -> f64 {
    sqrt_factorial_table()[n]
}

/// Occupation numbers, one per bosonic mode.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(exponents: impl Into<Vec<usize>>) -> Self {
        MultiIndex(exponents.into())
    }

    pub fn zeros(modes: usize) -> Self {
        MultiIndex(vec![0; modes])
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    /// Total number of quanta.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn get(&self, mode: usize) -> usize {
        self.0[mode]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    fn with(&self, mode: usize, value: usize) -> Self {
        let mut out = self.0.clone();
        out[mode] = value;
        MultiIndex(out)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[usize; N]> for MultiIndex {
    fn from(v: [usize; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

/// A point `z` in phase space, one complex coordinate per mode.
#[derive(Clone, Debug, PartialEq)]
pub struct BargmannPoint(pub Vec<Complex64>);

impl BargmannPoint {
    pub fn new(coords: impl Into<Vec<Complex64>>) -> Self {
        BargmannPoint(coords.into())
    }

    pub fn single(z: Complex64) -> Self {
        BargmannPoint(vec![z])
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn conj(&self) -> Self {
        BargmannPoint(self.0.iter().map(|z| z.conj()).collect())
    }
}

/// Result of an operation that may push amplitude above the cutoff.
#[derive(Clone, Debug)]
pub struct Truncated<T> {
    pub value: T,
    /// Squared norm of everything that fell outside the truncated basis.
    pub discarded_weight: f64,
}

impl<T> Truncated<T> {
    pub fn exact(value: T) -> Self {
        Truncated { value, discarded_weight: 0.0 }
    }
}

/// Even or odd superposition of opposite coherent states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Truncated multi-mode bosonic state in the normalized-monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct HoloState {
    cutoffs: Vec<usize>,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl HoloState {
    /// The zero vector.
    pub fn zero(cutoffs: impl Into<Vec<usize>>) -> Result<Self> {
        let cutoffs = cutoffs.into();
        if cutoffs.is_empty() {
            return Err(Error::InvalidParameter("a state needs at least one mode".into()));
        }
        if let Some(&c) = cutoffs.iter().find(|&&c| c == 0 || c > MAX_TABULATED_DEGREE) {
            return Err(Error::InvalidParameter(format!(
                "cutoff {c} outside 1..={MAX_TABULATED_DEGREE}"
            )));
        }
        Ok(HoloState { cutoffs, coeffs: BTreeMap::new() })
    }

    /// Build from explicit amplitudes; amplitudes below the prune threshold are dropped.
    pub fn from_coeffs(
        cutoffs: impl Into<Vec<usize>>,
        coeffs: impl IntoIterator<Item = (MultiIndex, Complex64)>,
    ) -> Result<Self> {
        let mut state = HoloState::zero(cutoffs)?;
        for (index, c) in coeffs {
            state.check_index(&index)?;
            let slot = state.coeffs.entry(index).or_insert(Complex64::new(0.0, 0.0));
            *slot += c;
        }
        state.prune();
        Ok(state)
    }

    pub fn mode_count(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, index: &MultiIndex) -> Complex64 {
        self.coeffs.get(index).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn check_index(&self, index: &MultiIndex) -> Result<()> {
        if index.modes() != self.mode_count() {
            return Err(Error::ShapeMismatch {
                expected: self.mode_count(),
                found: index.modes(),
            });
        }
        for (mode, (&n, &cut)) in index.0.iter().zip(&self.cutoffs).enumerate() {
            if n > cut {
                return Err(Error::OutOfRange(format!(
                    "occupation {n} of mode {mode} exceeds cutoff {cut}"
                )));
            }
        }
        Ok(())
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count() {
            return Err(Error::InvalidMode { mode, count: self.mode_count() });
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &HoloState) -> Result<()> {
        if self.mode_count() != other.mode_count() {
            return Err(Error::ShapeMismatch {
                expected: self.mode_count(),
                found: other.mode_count(),
            });
        }
        Ok(())
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    }

    pub fn scale(&self, factor: Complex64) -> HoloState {
        let mut out = HoloState {
            cutoffs: self.cutoffs.clone(),
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c * factor)).collect(),
        };
        out.prune();
        out
    }

    /// `self + factor * other`. Cutoffs are taken from `self`; terms of `other`
    /// that lie above them are rejected.
    pub fn add_scaled(&self, other: &HoloState, factor: Complex64) -> Result<HoloState> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.check_index(k)?;
            *out.coeffs.entry(k.clone()).or_default() += c * factor;
        }
        out.prune();
        Ok(out)
    }

    pub fn normalized(&self) -> Result<HoloState> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize the zero state".into()));
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    /// Raise `mode` by one quantum: `c'_{n+1} = sqrt(n+1) c_n`.
    ///
    /// Terms that would exceed the cutoff are dropped; their squared weight is
    /// returned alongside the result.
    pub fn apply_create(&self, mode: usize) -> Result<Truncated<HoloState>> {
        self.check_mode(mode)?;
        let cut = self.cutoffs[mode];
        let mut coeffs = BTreeMap::new();
        let mut discarded = 0.0;
        for (index, c) in &self.coeffs {
            let n = index.get(mode);
            let amp = c * ((n + 1) as f64).sqrt();
            if n + 1 > cut {
                discarded += amp.norm_sqr();
            } else {
                coeffs.insert(index.with(mode, n + 1), amp);
            }
        }
        let mut value = HoloState { cutoffs: self.cutoffs.clone(), coeffs };
        value.prune();
        Ok(Truncated { value, discarded_weight: discarded })
    }

    /// Lower `mode` by one quantum: `c'_{n-1} = sqrt(n) c_n`.
    pub fn apply_annihilate(&self, mode: usize) -> Result<HoloState> {
        self.check_mode(mode)?;
        let mut coeffs = BTreeMap::new();
        for (index, c) in &self.coeffs {
            let n = index.get(mode);
            if n > 0 {
                coeffs.insert(index.with(mode, n - 1), c * (n as f64).sqrt());
            }
        }
        let mut value = HoloState { cutoffs: self.cutoffs.clone(), coeffs };
        value.prune();
        Ok(value)
    }

    /// Multiply by a per-index scalar (diagonal operators).
    pub fn map_diagonal(&self, f: impl Fn(&MultiIndex) -> Complex64) -> HoloState {
        let mut out = HoloState {
            cutoffs: self.cutoffs.clone(),
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c * f(k))).collect(),
        };
        out.prune();
        out
    }
}

/// The normalized monomial `z^index / sqrt(index!)`.
pub fn monomial_state(index: impl Into<MultiIndex>, cutoffs: impl Into<Vec<usize>>) -> Result<HoloState> {
    let index = index.into();
    let mut state = HoloState::zero(cutoffs)?;
    state.check_index(&index)?;
    state.coeffs.insert(index, Complex64::new(1.0, 0.0));
    Ok(state)
}

/// `<f|g> = sum_n conj(f_n) g_n`, equal to the Gaussian-measure integral.
pub fn inner_product(f: &HoloState, g: &HoloState) -> Result<Complex64> {
    f.check_same_shape(g)?;
    // iterate over the sparser side
    let (small, large, conj_small) = if f.coeffs.len() <= g.coeffs.len() {
        (f, g, true)
    } else {
        (g, f, false)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, a) in &small.coeffs {
        if let Some(b) = large.coeffs.get(k) {
            acc += if conj_small { a.conj() * b } else { b.conj() * a };
        }
    }
    Ok(acc)
}

/// Evaluate the holomorphic function at `p`.
pub fn evaluate(f: &HoloState, p: &BargmannPoint) -> Result<Complex64> {
    if p.modes() != f.mode_count() {
        return Err(Error::ShapeMismatch { expected: f.mode_count(), found: p.modes() });
    }
    // per-mode tables of z^n / sqrt(n!)
    let tables: Vec<Vec<Complex64>> = p
        .0
        .iter()
        .zip(f.cutoffs())
        .map(|(&z, &cut)| {
            let mut row = Vec::with_capacity(cut + 1);
            let mut term = Complex64::new(1.0, 0.0);
            row.push(term);
            for n in 1..=cut {
                term = term * z / (n as f64).sqrt();
                row.push(term);
            }
            row
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (index, c) in f.coeffs() {
        let mut term = *c;
        for (mode, &n) in index.0.iter().enumerate() {
            term *= tables[mode][n];
        }
        acc += term;
    }
    Ok(acc)
}

/// Reproducing kernel `K(z, w) = exp(sum_i z_i conj(w_i))`.
pub fn kernel(z: &BargmannPoint, w: &BargmannPoint) -> Result<Complex64> {
    if z.modes() != w.modes() {
        return Err(Error::ShapeMismatch { expected: z.modes(), found: w.modes() });
    }
    let s: Complex64 = z.0.iter().zip(&w.0).map(|(a, b)| a * b.conj()).sum();
    Ok(s.exp())
}

/// Truncated kernel state `K_w` with coefficients `conj(w)^n / sqrt(n!)`, so that
/// `<K_w, f> = f(w)` up to the truncation tail.
pub fn kernel_state(w: &BargmannPoint, cutoffs: impl Into<Vec<usize>>) -> Result<HoloState> {
    let cutoffs = cutoffs.into();
    if w.modes() != cutoffs.len() {
        return Err(Error::ShapeMismatch { expected: cutoffs.len(), found: w.modes() });
    }
    let per_mode: Vec<Vec<Complex64>> = w
        .0
        .iter()
        .zip(&cutoffs)
        .map(|(&wi, &cut)| (0..=cut).map(|n| wi.conj().powu(n as u32) / sqrt_factorial(n)).collect())
        .collect();
    let coeffs = product_basis(&cutoffs).into_iter().map(|index| {
        let c = index
            .0
            .iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |acc, (m, &n)| acc * per_mode[m][n]);
        (index, c)
    });
    HoloState::from_coeffs(cutoffs.clone(), coeffs.collect::<Vec<_>>())
}

/// All multi-indices of the box `0..=cutoff_i`, lexicographic (mode 0 major).
pub fn product_basis(cutoffs: &[usize]) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex(Vec::with_capacity(cutoffs.len()))];
    for &cut in cutoffs {
        let mut next = Vec::with_capacity(out.len() * (cut + 1));
        for prefix in &out {
            for n in 0..=cut {
                let mut v = prefix.0.clone();
                v.push(n);
                next.push(MultiIndex(v));
            }
        }
        out = next;
    }
    out
}

/// Squared weight a coherent state of amplitude `|alpha|` leaves above `cutoff`.
pub fn coherent_tail_weight(alpha: Complex64, cutoff: usize) -> f64 {
    let x = alpha.norm_sqr();
    // sum_{n <= cutoff} e^{-x} x^n / n!, complemented
    let mut term = (-x).exp();
    let mut kept = term;
    for n in 1..=cutoff {
        term *= x / n as f64;
        kept += term;
    }
    (1.0 - kept).max(0.0)
}

/// Single-mode coherent state `e^{-|a|^2/2} sum a^n/sqrt(n!) |n>`.
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<HoloState> {
    let tail = coherent_tail_weight(alpha, cutoff);
    if tail >= SERIES_TAIL_TOLERANCE {
        return Err(Error::InsufficientCutoff { cutoff, tail });
    }
    let prefactor = (-alpha.norm_sqr() / 2.0).exp();
    let coeffs = (0..=cutoff).map(|n| {
        (MultiIndex(vec![n]), alpha.powu(n as u32) * prefactor / sqrt_factorial(n))
    });
    HoloState::from_coeffs(vec![cutoff], coeffs.collect::<Vec<_>>())
}

/// `|alpha> + |-alpha>` (even) or `|alpha> - |-alpha>` (odd), unnormalized.
pub fn cat_state(alpha: Complex64, parity: Parity, cutoff: usize) -> Result<HoloState> {
    let tail = coherent_tail_weight(alpha, cutoff);
    if tail >= SERIES_TAIL_TOLERANCE {
        return Err(Error::InsufficientCutoff { cutoff, tail });
    }
    let prefactor = 2.0 * (-alpha.norm_sqr() / 2.0).exp();
    let keep = |n: usize| match parity {
        Parity::Even => n.is_multiple_of(2),
        Parity::Odd => n % 2 == 1,
    };
    let coeffs = (0..=cutoff)
        .filter(|&n| keep(n))
        .map(|n| (MultiIndex(vec![n]), alpha.powu(n as u32) * prefactor / sqrt_factorial(n)));
    HoloState::from_coeffs(vec![cutoff], coeffs.collect::<Vec<_>>())
}

/// Closed form of the cat state as a holomorphic function:
/// `2 e^{-|a|^2/2} cosh(a z)` (even) or `... sinh(a z)` (odd).
pub fn cat_closed_form(alpha: Complex64, z: Complex64, parity: Parity) -> Complex64 {
    let prefactor = 2.0 * (-alpha.norm_sqr() / 2.0).exp();
    let x = alpha * z;
    match parity {
        Parity::Even => prefactor * x.cosh(),
        Parity::Odd => prefactor * x.sinh(),
    }
}

/// Modified Bessel function `I_nu(x)` for `nu = -1/2` (even) or `+1/2` (odd),
/// from its power series. Independent of the hyperbolic identities.
pub fn bessel_i_half(x: Complex64, parity: Parity) -> Complex64 {
    // I_nu(x) = (x/2)^nu sum_k (x^2/4)^k / (k! Gamma(k + nu + 1))
    let nu = match parity {
        Parity::Even => -0.5,
        Parity::Odd => 0.5,
    };
    let q = x * x / 4.0;
    // Gamma(nu + 1): Gamma(1/2) = sqrt(pi), Gamma(3/2) = sqrt(pi)/2
    let gamma0 = if nu < 0.0 {
        std::f64::consts::PI.sqrt()
    } else {
        std::f64::consts::PI.sqrt() / 2.0
    };
    let mut term = Complex64::new(1.0 / gamma0, 0.0);
    let mut sum = term;
    for k in 1..400 {
        let k = k as f64;
        term = term * q / (k * (k + nu));
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    (x / 2.0).powf(nu) * sum
}

/// The Bessel-function form `sqrt(2 pi a z) e^{-|a|^2/2} I_{-+1/2}(a z)`.
pub fn cat_bessel_form(alpha: Complex64, z: Complex64, parity: Parity) -> Complex64 {
    let x = alpha * z;
    let prefactor = (-alpha.norm_sqr() / 2.0).exp();
    if x.norm() == 0.0 {
        // limit of sqrt(2 pi x) I_{-1/2}(x) at 0 is 2; I_{1/2}(0) = 0
        return match parity {
            Parity::Even => Complex64::new(2.0 * prefactor, 0.0),
            Parity::Odd => Complex64::new(0.0, 0.0),
        };
    }
    (2.0 * std::f64::consts::PI * x).sqrt() * prefactor * bessel_i_half(x, parity)
}
