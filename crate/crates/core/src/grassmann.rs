//! Finite Grassmann algebra for two-level fermionic modes.
//!
//! Basis words are products of distinct generators `theta_j` kept in
//! ascending mode order, so a word is a bitmask. Derivatives act from the
//! left, and Berezin integration coincides with the left derivative.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::holo::{HoloState, Truncated, PRUNE_THRESHOLD};

/// Largest supported number of fermionic modes.
pub const MAX_FERMI_MODES: usize = 16;

/// Product of distinct generators, bit `j` set iff `theta_j` is present.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FermiWord(pub u32);

impl FermiWord {
    pub const EMPTY: FermiWord = FermiWord(0);

    pub fn single(mode: usize) -> Self {
        FermiWord(1 << mode)
    }

    pub fn contains(self, mode: usize) -> bool {
        self.0 & (1 << mode) != 0
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    /// Number of generators with index below `mode`.
    fn preceding(self, mode: usize) -> u32 {
        (self.0 & ((1u32 << mode) - 1)).count_ones()
    }

    /// `theta_mode * self`, or `None` if the generator is already present.
    pub fn raise(self, mode: usize) -> Option<(f64, FermiWord)> {
        if self.contains(mode) {
            return None;
        }
        Some((sign(self.preceding(mode)), FermiWord(self.0 | (1 << mode))))
    }

    /// `d/dtheta_mode` acting from the left on `self`.
    pub fn lower(self, mode: usize) -> Option<(f64, FermiWord)> {
        if !self.contains(mode) {
            return None;
        }
        Some((sign(self.preceding(mode)), FermiWord(self.0 & !(1 << mode))))
    }

    /// Exterior product `self * other` with its reordering sign.
    pub fn wedge(self, other: FermiWord) -> Option<(f64, FermiWord)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // each generator of `other` passes every generator of `self` with a higher index
        let mut swaps = 0;
        let mut rest = other.0;
        while rest != 0 {
            let j = rest.trailing_zeros();
            swaps += (self.0 >> (j + 1)).count_ones();
            rest &= rest - 1;
        }
        Some((sign(swaps), FermiWord(self.0 | other.0)))
    }

    pub fn all(modes: usize) -> impl Iterator<Item = FermiWord> {
        (0..(1u32 << modes)).map(FermiWord)
    }
}

fn sign(transpositions: u32) -> f64 {
    if transpositions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl fmt::Debug for FermiWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for j in 0..32 {
            if self.contains(j) {
                if !first {
                    write!(f, "·")?;
                }
                write!(f, "θ{j}")?;
                first = false;
            }
        }
        Ok(())
    }
}

fn check_modes(modes: usize) -> Result<()> {
    if modes > MAX_FERMI_MODES {
        return Err(Error::InvalidParameter(format!(
            "fermionic mode count {modes} exceeds {MAX_FERMI_MODES}"
        )));
    }
    Ok(())
}

/// Element of the Grassmann algebra over `mode_count` generators.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannElement {
    mode_count: usize,
    terms: BTreeMap<FermiWord, Complex64>,
}

impl GrassmannElement {
    pub fn zero(mode_count: usize) -> Result<Self> {
        check_modes(mode_count)?;
        Ok(GrassmannElement { mode_count, terms: BTreeMap::new() })
    }

    pub fn scalar(mode_count: usize, value: Complex64) -> Result<Self> {
        Self::from_terms(mode_count, [(FermiWord::EMPTY, value)])
    }

    /// The generator `theta_mode`.
    pub fn generator(mode_count: usize, mode: usize) -> Result<Self> {
        check_modes(mode_count)?;
        if mode >= mode_count {
            return Err(Error::InvalidMode { mode, count: mode_count });
        }
        Self::from_terms(mode_count, [(FermiWord::single(mode), Complex64::new(1.0, 0.0))])
    }

    pub fn from_terms(
        mode_count: usize,
        terms: impl IntoIterator<Item = (FermiWord, Complex64)>,
    ) -> Result<Self> {
        let mut out = GrassmannElement::zero(mode_count)?;
        for (word, c) in terms {
            if word.0 >> mode_count != 0 {
                return Err(Error::OutOfRange(format!("{word:?} uses modes beyond {mode_count}")));
            }
            *out.terms.entry(word).or_default() += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn terms(&self) -> &BTreeMap<FermiWord, Complex64> {
        &self.terms
    }

    pub fn coeff(&self, word: FermiWord) -> Complex64 {
        self.terms.get(&word).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    }

    fn check_same(&self, other: &GrassmannElement) -> Result<()> {
        if self.mode_count != other.mode_count {
            return Err(Error::ShapeMismatch { expected: self.mode_count, found: other.mode_count });
        }
        Ok(())
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count {
            return Err(Error::InvalidMode { mode, count: self.mode_count });
        }
        Ok(())
    }

    pub fn add(&self, other: &GrassmannElement) -> Result<GrassmannElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            *out.terms.entry(*w).or_default() += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> GrassmannElement {
        let mut out = GrassmannElement {
            mode_count: self.mode_count,
            terms: self.terms.iter().map(|(w, c)| (*w, c * factor)).collect(),
        };
        out.prune();
        out
    }
}

/// Exterior product. Repeated generators annihilate a term.
pub fn g_multiply(a: &GrassmannElement, b: &GrassmannElement) -> Result<GrassmannElement> {
    a.check_same(b)?;
    let mut out = GrassmannElement::zero(a.mode_count)?;
    for (wa, ca) in &a.terms {
        for (wb, cb) in &b.terms {
            if let Some((s, w)) = wa.wedge(*wb) {
                *out.terms.entry(w).or_default() += ca * cb * s;
            }
        }
    }
    out.prune();
    Ok(out)
}

/// Left derivative `d/dtheta_mode`.
pub fn g_derivative(a: &GrassmannElement, mode: usize) -> Result<GrassmannElement> {
    a.check_mode(mode)?;
    let mut out = GrassmannElement::zero(a.mode_count)?;
    for (w, c) in &a.terms {
        if let Some((s, lowered)) = w.lower(mode) {
            *out.terms.entry(lowered).or_default() += c * s;
        }
    }
    out.prune();
    Ok(out)
}

/// Berezin integral over `theta_mode`; identical to the left derivative.
pub fn berezin_integrate(a: &GrassmannElement, mode: usize) -> Result<GrassmannElement> {
    g_derivative(a, mode)
}

/// Boson-fermion state: a bosonic [`HoloState`] attached to each fermionic word.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    fermi_mode_count: usize,
    boson_cutoffs: Vec<usize>,
    sectors: BTreeMap<FermiWord, HoloState>,
}

impl MixedState {
    pub fn zero(fermi_mode_count: usize, boson_cutoffs: impl Into<Vec<usize>>) -> Result<Self> {
        check_modes(fermi_mode_count)?;
        let boson_cutoffs = boson_cutoffs.into();
        // validates cutoffs
        HoloState::zero(boson_cutoffs.clone())?;
        Ok(MixedState { fermi_mode_count, boson_cutoffs, sectors: BTreeMap::new() })
    }

    /// `word ⊗ boson`.
    pub fn product(fermi_mode_count: usize, word: FermiWord, boson: HoloState) -> Result<Self> {
        let mut out = MixedState::zero(fermi_mode_count, boson.cutoffs().to_vec())?;
        out.insert(word, boson)?;
        Ok(out)
    }

    pub fn fermi_mode_count(&self) -> usize {
        self.fermi_mode_count
    }

    pub fn boson_cutoffs(&self) -> &[usize] {
        &self.boson_cutoffs
    }

    pub fn sectors(&self) -> &BTreeMap<FermiWord, HoloState> {
        &self.sectors
    }

    pub fn sector(&self, word: FermiWord) -> Option<&HoloState> {
        self.sectors.get(&word)
    }

    pub fn is_zero(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sectors.values().map(HoloState::norm_sqr).sum()
    }

    /// Add `boson` to the component attached to `word`.
    pub fn insert(&mut self, word: FermiWord, boson: HoloState) -> Result<()> {
        if word.0 >> self.fermi_mode_count != 0 {
            return Err(Error::OutOfRange(format!(
                "{word:?} uses modes beyond {}",
                self.fermi_mode_count
            )));
        }
        if boson.cutoffs() != self.boson_cutoffs.as_slice() {
            return Err(Error::ShapeMismatch {
                expected: self.boson_cutoffs.len(),
                found: boson.cutoffs().len(),
            });
        }
        let merged = match self.sectors.remove(&word) {
            Some(existing) => existing.add_scaled(&boson, Complex64::new(1.0, 0.0))?,
            None => boson,
        };
        if !merged.is_zero() {
            self.sectors.insert(word, merged);
        }
        Ok(())
    }

    pub fn scale(&self, factor: Complex64) -> MixedState {
        let mut out = self.clone();
        out.sectors = self
            .sectors
            .iter()
            .map(|(w, s)| (*w, s.scale(factor)))
            .filter(|(_, s)| !s.is_zero())
            .collect();
        out
    }

    pub fn add_scaled(&self, other: &MixedState, factor: Complex64) -> Result<MixedState> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (w, s) in &other.sectors {
            out.insert(*w, s.scale(factor))?;
        }
        Ok(out)
    }

    pub fn check_same(&self, other: &MixedState) -> Result<()> {
        if self.fermi_mode_count != other.fermi_mode_count {
            return Err(Error::ShapeMismatch {
                expected: self.fermi_mode_count,
                found: other.fermi_mode_count,
            });
        }
        if self.boson_cutoffs != other.boson_cutoffs {
            return Err(Error::ShapeMismatch {
                expected: self.boson_cutoffs.len(),
                found: other.boson_cutoffs.len(),
            });
        }
        Ok(())
    }

    fn check_fermi_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.fermi_mode_count {
            return Err(Error::InvalidMode { mode, count: self.fermi_mode_count });
        }
        Ok(())
    }

    /// Left multiplication by `theta_mode`.
    pub fn fermi_create(&self, mode: usize) -> Result<MixedState> {
        self.check_fermi_mode(mode)?;
        self.map_words(|w| w.raise(mode))
    }

    /// Left derivative `d/dtheta_mode`.
    pub fn fermi_annihilate(&self, mode: usize) -> Result<MixedState> {
        self.check_fermi_mode(mode)?;
        self.map_words(|w| w.lower(mode))
    }

    fn map_words(&self, f: impl Fn(FermiWord) -> Option<(f64, FermiWord)>) -> Result<MixedState> {
        let mut out = MixedState::zero(self.fermi_mode_count, self.boson_cutoffs.clone())?;
        for (w, s) in &self.sectors {
            if let Some((sgn, nw)) = f(*w) {
                out.insert(nw, s.scale(Complex64::new(sgn, 0.0)))?;
            }
        }
        Ok(out)
    }

    pub fn boson_create(&self, mode: usize) -> Result<Truncated<MixedState>> {
        let mut out = MixedState::zero(self.fermi_mode_count, self.boson_cutoffs.clone())?;
        let mut discarded = 0.0;
        for (w, s) in &self.sectors {
            let t = s.apply_create(mode)?;
            discarded += t.discarded_weight;
            out.insert(*w, t.value)?;
        }
        Ok(Truncated { value: out, discarded_weight: discarded })
    }

    pub fn boson_annihilate(&self, mode: usize) -> Result<MixedState> {
        let mut out = MixedState::zero(self.fermi_mode_count, self.boson_cutoffs.clone())?;
        for (w, s) in &self.sectors {
            out.insert(*w, s.apply_annihilate(mode)?)?;
        }
        Ok(out)
    }
}

/// `<a|b>`: words are orthonormal, bosonic parts use the Bargmann inner product.
pub fn mixed_inner_product(a: &MixedState, b: &MixedState) -> Result<Complex64> {
    a.check_same(b)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (w, sa) in &a.sectors {
        if let Some(sb) = b.sectors.get(w) {
            acc += crate::holo::inner_product(sa, sb)?;
        }
    }
    Ok(acc)
}

/// Fermionic number operator `theta_mode d/dtheta_mode`.
pub fn fermi_number(a: &MixedState, mode: usize) -> Result<MixedState> {
    a.fermi_annihilate(mode)?.fermi_create(mode)
}
