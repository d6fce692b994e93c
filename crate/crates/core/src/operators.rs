//! Operators as weighted words over creation/annihilation generators.
//!
//! Bosonic creation is multiplication by `z_i`, annihilation is `d/dz_i`;
//! the fermionic pair is `theta_j` and `d/dtheta_j`. Words are never
//! simplified symbolically: identities are checked through [`matrix_of`]
//! on the truncated joint basis.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{FermiWord, MixedState};
use crate::holo::{monomial_state, product_basis, HoloState, MultiIndex, Truncated};

pub type CMatrix = DMatrix<Complex64>;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default limit on the joint-basis dimension accepted by [`matrix_of`].
pub const DEFAULT_MATRIX_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    BosonCreate(usize),
    BosonAnnihilate(usize),
    FermiCreate(usize),
    FermiAnnihilate(usize),
}

impl Generator {
    pub fn adjoint(self) -> Generator {
        match self {
            Generator::BosonCreate(m) => Generator::BosonAnnihilate(m),
            Generator::BosonAnnihilate(m) => Generator::BosonCreate(m),
            Generator::FermiCreate(m) => Generator::FermiAnnihilate(m),
            Generator::FermiAnnihilate(m) => Generator::FermiCreate(m),
        }
    }
}

/// Ordered product of generators; the rightmost acts first.
pub type Word = Vec<Generator>;

/// Weighted sum of words. The empty word is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorExpr {
    boson_modes: usize,
    fermi_modes: usize,
    terms: Vec<(Complex64, Word)>,
}

impl OperatorExpr {
    pub fn zero(boson_modes: usize, fermi_modes: usize) -> Self {
        OperatorExpr { boson_modes, fermi_modes, terms: Vec::new() }
    }

    pub fn identity(boson_modes: usize, fermi_modes: usize) -> Self {
        OperatorExpr { boson_modes, fermi_modes, terms: vec![(ONE, Vec::new())] }
    }

    pub fn word(boson_modes: usize, fermi_modes: usize, weight: Complex64, word: Word) -> Result<Self> {
        let mut out = OperatorExpr::zero(boson_modes, fermi_modes);
        out.push(weight, word)?;
        Ok(out)
    }

    /// `z_mode`
    pub fn create(boson_modes: usize, mode: usize) -> Result<Self> {
        Self::word(boson_modes, 0, ONE, vec![Generator::BosonCreate(mode)])
    }

    /// `d/dz_mode`
    pub fn annihilate(boson_modes: usize, mode: usize) -> Result<Self> {
        Self::word(boson_modes, 0, ONE, vec![Generator::BosonAnnihilate(mode)])
    }

    /// `z_mode d/dz_mode`
    pub fn number(boson_modes: usize, mode: usize) -> Result<Self> {
        Self::word(
            boson_modes,
            0,
            ONE,
            vec![Generator::BosonCreate(mode), Generator::BosonAnnihilate(mode)],
        )
    }

    pub fn boson_modes(&self) -> usize {
        self.boson_modes
    }

    pub fn fermi_modes(&self) -> usize {
        self.fermi_modes
    }

    pub fn terms(&self) -> &[(Complex64, Word)] {
        &self.terms
    }

    /// Append a weighted word after validating its mode indices.
    pub fn push(&mut self, weight: Complex64, word: Word) -> Result<()> {
        for g in &word {
            let (mode, count) = match *g {
                Generator::BosonCreate(m) | Generator::BosonAnnihilate(m) => (m, self.boson_modes),
                Generator::FermiCreate(m) | Generator::FermiAnnihilate(m) => (m, self.fermi_modes),
            };
            if mode >= count {
                return Err(Error::InvalidMode { mode, count });
            }
        }
        self.terms.push((weight, word));
        Ok(())
    }

    fn check_same(&self, other: &OperatorExpr) -> Result<()> {
        if self.boson_modes != other.boson_modes {
            return Err(Error::ShapeMismatch { expected: self.boson_modes, found: other.boson_modes });
        }
        if self.fermi_modes != other.fermi_modes {
            return Err(Error::ShapeMismatch { expected: self.fermi_modes, found: other.fermi_modes });
        }
        Ok(())
    }

    pub fn scale(&self, factor: Complex64) -> OperatorExpr {
        let mut out = self.clone();
        for (w, _) in &mut out.terms {
            *w *= factor;
        }
        out
    }

    pub fn add(&self, other: &OperatorExpr) -> Result<OperatorExpr> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn sub(&self, other: &OperatorExpr) -> Result<OperatorExpr> {
        self.add(&other.scale(-ONE))
    }

    /// Formal product `self * other` (other acts first).
    pub fn mul(&self, other: &OperatorExpr) -> Result<OperatorExpr> {
        self.check_same(other)?;
        let mut out = OperatorExpr::zero(self.boson_modes, self.fermi_modes);
        for (wa, a) in &self.terms {
            for (wb, b) in &other.terms {
                let mut word = a.clone();
                word.extend(b.iter().copied());
                out.terms.push((wa * wb, word));
            }
        }
        Ok(out)
    }

    /// Longest word, an upper bound on how many quanta a term can add to one mode.
    pub fn max_word_len(&self) -> usize {
        self.terms.iter().map(|(_, w)| w.len()).max().unwrap_or(0)
    }
}

/// `ab - ba`, unsimplified.
pub fn commutator(a: &OperatorExpr, b: &OperatorExpr) -> Result<OperatorExpr> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// `ab + ba`, unsimplified.
pub fn anticommutator(a: &OperatorExpr, b: &OperatorExpr) -> Result<OperatorExpr> {
    a.mul(b)?.add(&b.mul(a)?)
}

/// Hermitian adjoint: reverse words, swap creation and annihilation, conjugate weights.
pub fn adjoint(expr: &OperatorExpr) -> OperatorExpr {
    let mut out = OperatorExpr::zero(expr.boson_modes, expr.fermi_modes);
    out.terms = expr
        .terms
        .iter()
        .map(|(w, word)| (w.conj(), word.iter().rev().map(|g| g.adjoint()).collect()))
        .collect();
    out
}

fn apply_word(word: &[Generator], s: &MixedState) -> Result<Truncated<MixedState>> {
    let mut state = s.clone();
    let mut discarded = 0.0;
    for g in word.iter().rev() {
        state = match *g {
            Generator::BosonCreate(m) => {
                let t = state.boson_create(m)?;
                discarded += t.discarded_weight;
                t.value
            }
            Generator::BosonAnnihilate(m) => state.boson_annihilate(m)?,
            Generator::FermiCreate(m) => state.fermi_create(m)?,
            Generator::FermiAnnihilate(m) => state.fermi_annihilate(m)?,
        };
        if state.is_zero() {
            break;
        }
    }
    Ok(Truncated { value: state, discarded_weight: discarded })
}

/// Linear action of `expr` on a mixed state. The discarded weight sums what
/// each word pushed above the cutoff.
pub fn apply(expr: &OperatorExpr, s: &MixedState) -> Result<Truncated<MixedState>> {
    if s.fermi_mode_count() != expr.fermi_modes {
        return Err(Error::ShapeMismatch { expected: expr.fermi_modes, found: s.fermi_mode_count() });
    }
    if s.boson_cutoffs().len() != expr.boson_modes {
        return Err(Error::ShapeMismatch { expected: expr.boson_modes, found: s.boson_cutoffs().len() });
    }
    let mut out = MixedState::zero(expr.fermi_modes, s.boson_cutoffs().to_vec())?;
    let mut discarded = 0.0;
    for (w, word) in &expr.terms {
        let t = apply_word(word, s)?;
        discarded += t.discarded_weight * w.norm_sqr();
        out = out.add_scaled(&t.value, *w)?;
    }
    Ok(Truncated { value: out, discarded_weight: discarded })
}

/// Action on a purely bosonic state (no fermionic modes).
pub fn apply_bosonic(expr: &OperatorExpr, s: &HoloState) -> Result<Truncated<HoloState>> {
    if expr.fermi_modes != 0 {
        return Err(Error::ShapeMismatch { expected: 0, found: expr.fermi_modes });
    }
    let mixed = MixedState::product(0, FermiWord::EMPTY, s.clone())?;
    let t = apply(expr, &mixed)?;
    let value = match t.value.sector(FermiWord::EMPTY) {
        Some(h) => h.clone(),
        None => HoloState::zero(s.cutoffs().to_vec())?,
    };
    Ok(Truncated { value, discarded_weight: t.discarded_weight })
}

/// Truncated joint basis: fermionic word major, then bosonic multi-index.
#[derive(Clone, Debug, PartialEq)]
pub struct JointBasis {
    fermi_modes: usize,
    cutoffs: Vec<usize>,
    states: Vec<(FermiWord, MultiIndex)>,
    lookup: HashMap<(FermiWord, MultiIndex), usize>,
}

impl JointBasis {
    pub fn new(fermi_modes: usize, cutoffs: &[usize]) -> Result<Self> {
        // validates the cutoffs
        HoloState::zero(cutoffs.to_vec())?;
        let bosonic = product_basis(cutoffs);
        let states: Vec<(FermiWord, MultiIndex)> = FermiWord::all(fermi_modes)
            .flat_map(|w| bosonic.iter().map(move |m| (w, m.clone())))
            .collect();
        let lookup = states.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Ok(JointBasis { fermi_modes, cutoffs: cutoffs.to_vec(), states, lookup })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn fermi_modes(&self) -> usize {
        self.fermi_modes
    }

    pub fn states(&self) -> &[(FermiWord, MultiIndex)] {
        &self.states
    }

    pub fn index_of(&self, word: FermiWord, index: &MultiIndex) -> Option<usize> {
        self.lookup.get(&(word, index.clone())).copied()
    }

    pub fn basis_state(&self, i: usize) -> Result<MixedState> {
        let (w, m) = &self.states[i];
        MixedState::product(self.fermi_modes, *w, monomial_state(m.clone(), self.cutoffs.clone())?)
    }

    /// Coefficient vector of `s` in this basis.
    pub fn expand(&self, s: &MixedState) -> Result<nalgebra::DVector<Complex64>> {
        let mut v = nalgebra::DVector::zeros(self.dim());
        for (w, h) in s.sectors() {
            for (m, c) in h.coeffs() {
                let i = self.index_of(*w, m).ok_or_else(|| {
                    Error::OutOfRange(format!("{w:?} {m:?} not in the basis"))
                })?;
                v[i] += c;
            }
        }
        Ok(v)
    }

    /// Basis positions whose bosonic occupations all stay `margin` below the cutoff.
    pub fn interior(&self, margin: usize) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, (_, m))| {
                m.as_slice().iter().zip(&self.cutoffs).all(|(&n, &c)| n + margin <= c)
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Matrix of an operator in a truncated joint basis.
#[derive(Clone, Debug)]
pub struct MatrixRep {
    pub basis: JointBasis,
    pub matrix: CMatrix,
}

impl MatrixRep {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs_diff(&self.matrix, &self.matrix.adjoint()) <= tol
    }

    /// Submatrix on the interior block (rows and columns) for the given margin.
    pub fn interior_block(&self, margin: usize) -> CMatrix {
        submatrix(&self.matrix, &self.basis.interior(margin))
    }
}

pub fn submatrix(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Matrix of `expr`: column `j` is `apply(expr, basis_j)` expanded in the basis.
pub fn matrix_of(expr: &OperatorExpr, cutoffs: &[usize]) -> Result<MatrixRep> {
    matrix_of_with_cap(expr, cutoffs, DEFAULT_MATRIX_CAP)
}

pub fn matrix_of_with_cap(expr: &OperatorExpr, cutoffs: &[usize], cap: usize) -> Result<MatrixRep> {
    if cutoffs.len() != expr.boson_modes {
        return Err(Error::ShapeMismatch { expected: expr.boson_modes, found: cutoffs.len() });
    }
    let dim = (1usize << expr.fermi_modes)
        .saturating_mul(cutoffs.iter().map(|c| c + 1).product::<usize>());
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let basis = JointBasis::new(expr.fermi_modes, cutoffs)?;
    let mut matrix = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let image = apply(expr, &basis.basis_state(j)?)?.value;
        matrix.set_column(j, &basis.expand(&image)?);
    }
    Ok(MatrixRep { basis, matrix })
}

/// `sum_i omega_i z_i d/dz_i` (hbar = 1).
pub fn build_h0(frequencies: &[f64]) -> Result<OperatorExpr> {
    if frequencies.is_empty() {
        return Err(Error::InvalidParameter("at least one mode frequency required".into()));
    }
    if let Some(w) = frequencies.iter().find(|w| !(**w > 0.0)) {
        return Err(Error::InvalidParameter(format!("frequency {w} must be positive")));
    }
    let modes = frequencies.len();
    let mut h = OperatorExpr::zero(modes, 0);
    for (i, &w) in frequencies.iter().enumerate() {
        h.push(
            Complex64::new(w, 0.0),
            vec![Generator::BosonCreate(i), Generator::BosonAnnihilate(i)],
        )?;
    }
    Ok(h)
}

/// Mode positions of the three-oscillator refrigerator.
pub const HOT: usize = 0;
pub const COLD: usize = 1;
pub const WORK: usize = 2;

/// Frequencies of the three-oscillator absorption refrigerator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefrigeratorHamiltonianParams {
    pub omega_h: f64,
    pub omega_c: f64,
    pub omega_w: f64,
    pub omega_int: f64,
}

impl RefrigeratorHamiltonianParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega_h", self.omega_h), ("omega_c", self.omega_c), ("omega_w", self.omega_w)] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.omega_int >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega_int = {} must be non-negative",
                self.omega_int
            )));
        }
        Ok(())
    }

    /// `omega_h - omega_c - omega_w`; zero at the absorption resonance.
    pub fn resonance_mismatch(&self) -> f64 {
        self.omega_h - self.omega_c - self.omega_w
    }

    pub fn is_resonant(&self, tol: f64) -> bool {
        self.resonance_mismatch().abs() <= tol * self.omega_h.max(1.0)
    }

    /// Unperturbed energy of the occupation `n = (n_h, n_c, n_w)`.
    pub fn unperturbed_energy(&self, n: &MultiIndex) -> f64 {
        self.omega_h * n.get(HOT) as f64
            + self.omega_c * n.get(COLD) as f64
            + self.omega_w * n.get(WORK) as f64
    }
}

/// `omega_int (z_h d_c d_w + z_c z_w d_h)`
pub fn build_refrigerator_interaction(omega_int: f64) -> Result<OperatorExpr> {
    use Generator::*;
    let w = Complex64::new(omega_int, 0.0);
    let mut h = OperatorExpr::zero(3, 0);
    h.push(w, vec![BosonCreate(HOT), BosonAnnihilate(COLD), BosonAnnihilate(WORK)])?;
    h.push(w, vec![BosonCreate(COLD), BosonCreate(WORK), BosonAnnihilate(HOT)])?;
    Ok(h)
}

/// Full three-oscillator Hamiltonian `H0 + H_int` over modes (h, c, w).
pub fn build_refrigerator_h(p: &RefrigeratorHamiltonianParams) -> Result<OperatorExpr> {
    p.validate()?;
    build_h0(&[p.omega_h, p.omega_c, p.omega_w])?.add(&build_refrigerator_interaction(p.omega_int)?)
}

/// Jaynes-Cummings `omega_c z d_z + omega_eg theta d_theta + g (theta d_z + d_theta z)`,
/// one bosonic and one fermionic mode.
pub fn build_jc(omega_c: f64, omega_eg: f64, g_c: f64) -> Result<OperatorExpr> {
    use Generator::*;
    if !(omega_c > 0.0) || !(omega_eg > 0.0) {
        return Err(Error::InvalidParameter("JC frequencies must be positive".into()));
    }
    let mut h = OperatorExpr::zero(1, 1);
    h.push(Complex64::new(omega_c, 0.0), vec![BosonCreate(0), BosonAnnihilate(0)])?;
    h.push(Complex64::new(omega_eg, 0.0), vec![FermiCreate(0), FermiAnnihilate(0)])?;
    h.push(Complex64::new(g_c, 0.0), vec![FermiCreate(0), BosonAnnihilate(0)])?;
    h.push(Complex64::new(g_c, 0.0), vec![FermiAnnihilate(0), BosonCreate(0)])?;
    Ok(h)
}

/// Total excitation number `theta d_theta + z d_z` for the JC model.
pub fn jc_number() -> Result<OperatorExpr> {
    use Generator::*;
    let mut n = OperatorExpr::zero(1, 1);
    n.push(ONE, vec![FermiCreate(0), FermiAnnihilate(0)])?;
    n.push(ONE, vec![BosonCreate(0), BosonAnnihilate(0)])?;
    Ok(n)
}

/// `<g,n| H_JC |e,n-1> = sqrt(n) g_c`.
pub fn jc_coupling_element(n: usize, g_c: f64) -> f64 {
    (n as f64).sqrt() * g_c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DressedSign {
    Plus,
    Minus,
}

/// Dressed JC eigenstate for mixing angle `phi`:
/// `|n,+> = cos(phi/2) |e,n-1> + sin(phi/2) |g,n>`,
/// `|n,-> = cos(phi/2) |g,n> - sin(phi/2) |e,n-1>`.
pub fn jc_dressed_state(n: usize, phi: f64, sign: DressedSign, cutoff: usize) -> Result<MixedState> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "dressed states need n >= 1 (|e,-1> does not exist)".into(),
        ));
    }
    let (c, s) = ((phi / 2.0).cos(), (phi / 2.0).sin());
    let excited = monomial_state([n - 1], [cutoff])?;
    let ground = monomial_state([n], [cutoff])?;
    let (ce, cg) = match sign {
        DressedSign::Plus => (c, s),
        DressedSign::Minus => (-s, c),
    };
    let mut out = MixedState::zero(1, vec![cutoff])?;
    out.insert(FermiWord::single(0), excited.scale(Complex64::new(ce, 0.0)))?;
    out.insert(FermiWord::EMPTY, ground.scale(Complex64::new(cg, 0.0)))?;
    Ok(out)
}

/// Mixing angle diagonalizing the `(|e,n-1>, |g,n>)` block: `tan(phi) = 2 g sqrt(n) / (omega_eg - omega_c)`.
///
/// Not fixed by the model definition; provided as a convenience.
pub fn jc_mixing_angle(n: usize, omega_c: f64, omega_eg: f64, g_c: f64) -> f64 {
    (2.0 * g_c * (n as f64).sqrt()).atan2(omega_eg - omega_c)
}

/// The swap algebra `(X1, X2, X3, N)` over two bosonic modes (h = 0, c = 1).
#[derive(Clone, Debug)]
pub struct Su2Generators {
    pub x1: OperatorExpr,
    pub x2: OperatorExpr,
    pub x3: OperatorExpr,
    pub n: OperatorExpr,
}

pub fn su2_generators() -> Result<Su2Generators> {
    use Generator::*;
    let (h, c) = (0, 1);
    let hc = vec![BosonCreate(h), BosonAnnihilate(c)];
    let ch = vec![BosonCreate(c), BosonAnnihilate(h)];
    let nh = vec![BosonCreate(h), BosonAnnihilate(h)];
    let nc = vec![BosonCreate(c), BosonAnnihilate(c)];

    let mut x1 = OperatorExpr::zero(2, 0);
    x1.push(ONE, hc.clone())?;
    x1.push(ONE, ch.clone())?;
    let mut x2 = OperatorExpr::zero(2, 0);
    x2.push(I, hc)?;
    x2.push(-I, ch)?;
    let mut x3 = OperatorExpr::zero(2, 0);
    x3.push(ONE, nh.clone())?;
    x3.push(-ONE, nc.clone())?;
    let mut n = OperatorExpr::zero(2, 0);
    n.push(ONE, nh)?;
    n.push(ONE, nc)?;
    Ok(Su2Generators { x1, x2, x3, n })
}

/// `<m| H_int |n>` for the three-oscillator interaction, in closed form.
pub fn perturbation_matrix_element(m: &MultiIndex, n: &MultiIndex, omega_int: f64) -> Result<f64> {
    if m.modes() != 3 || n.modes() != 3 {
        return Err(Error::ShapeMismatch { expected: 3, found: m.modes().min(n.modes()) });
    }
    let (mh, mc, mw) = (m.get(HOT) as i64, m.get(COLD) as i64, m.get(WORK) as i64);
    let (nh, nc, nw) = (n.get(HOT) as i64, n.get(COLD) as i64, n.get(WORK) as i64);
    let mut value = 0.0;
    // z_h d_c d_w
    if mh == nh + 1 && mc == nc - 1 && mw == nw - 1 {
        value += (((nh + 1) * nc * nw) as f64).sqrt();
    }
    // z_c z_w d_h
    if mh == nh - 1 && mc == nc + 1 && mw == nw + 1 {
        value += ((nh * (nc + 1) * (nw + 1)) as f64).sqrt();
    }
    Ok(omega_int * value)
}

/// Which unperturbed energy differences enter the first-order eigenstate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyDenominator {
    /// `E_n - E_m` from `H0 = sum omega_i n_i`.
    #[default]
    Unperturbed,
    /// `omega_int (|n| - |m|)` with `|n|` the total excitation count.
    ExcitationCount,
}

impl EnergyDenominator {
    fn gap(self, p: &RefrigeratorHamiltonianParams, n: &MultiIndex, m: &MultiIndex) -> f64 {
        match self {
            EnergyDenominator::Unperturbed => p.unperturbed_energy(n) - p.unperturbed_energy(m),
            EnergyDenominator::ExcitationCount => {
                p.omega_int * (n.total() as f64 - m.total() as f64)
            }
        }
    }
}

/// States `m` reachable from `n` by one application of `H_int`.
fn coupled_states(n: &MultiIndex) -> Vec<MultiIndex> {
    let (nh, nc, nw) = (n.get(HOT), n.get(COLD), n.get(WORK));
    let mut out = Vec::new();
    if nc > 0 && nw > 0 {
        out.push(MultiIndex::new([nh + 1, nc - 1, nw - 1]));
    }
    if nh > 0 {
        out.push(MultiIndex::new([nh - 1, nc + 1, nw + 1]));
    }
    out
}

/// First-order eigenstate correction
/// `sum_{m != n} <m|H_int|n> / (E_n - E_m) |m>`.
///
/// Coupled states beyond `cutoff` are dropped. A vanishing denominator on a
/// coupled pair is reported as [`Error::Degeneracy`].
pub fn first_order_state(
    n: &MultiIndex,
    p: &RefrigeratorHamiltonianParams,
    cutoff: usize,
    denominator: EnergyDenominator,
) -> Result<HoloState> {
    p.validate()?;
    let cutoffs = vec![cutoff; 3];
    let mut out = HoloState::zero(cutoffs.clone())?;
    out.check_index(n)?;
    let scale = p.omega_h.max(p.omega_c).max(p.omega_w);
    for m in coupled_states(n) {
        if m.as_slice().iter().any(|&k| k > cutoff) {
            continue;
        }
        let element = perturbation_matrix_element(&m, n, p.omega_int)?;
        if element == 0.0 {
            continue;
        }
        let gap = denominator.gap(p, n, &m);
        if gap.abs() <= 1e-12 * scale {
            return Err(Error::Degeneracy(format!(
                "E({n:?}) = E({m:?}) = {} with coupling {element}",
                p.unperturbed_energy(n)
            )));
        }
        out = out.add_scaled(&monomial_state(m, cutoffs.clone())?, Complex64::new(element / gap, 0.0))?;
    }
    Ok(out)
}
