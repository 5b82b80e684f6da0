//! Spectral order and daseinisation: approximating operators from
//! inside and outside a context, and the interval-valued sections this
//! induces over a context fragment.
//!
//! A Hermitian operator is packaged as its right-continuous spectral
//! family (a finite increasing list of jumps in finite dimensions). The
//! spectral order compares families pointwise. Approximating an
//! operator into a context works at the level of these families:
//!
//! - the outer approximation has family `λ ↦ inner daseinisation of
//!   E_λ` (the largest projection of the context under `E_λ`);
//! - the inner approximation has family `λ ↦ inf over μ > λ of the
//!   outer daseinisation of E_μ`, the infimum evaluated on the jump
//!   grid plus midpoints, which settles the strict inequality exactly
//!   since the family is a step function.
//!
//! Both results live in the context (they are cell-coefficient
//! vectors), their coefficients are eigenvalues of the input, and they
//! bracket the operator in the spectral order. These coefficient
//! endpoints are what becomes an unsharp value.

use std::collections::BTreeMap;

use serde_json::Value;
use thiserror::Error;

use crate::contexts::{Context, ContextError, Fragment};
use crate::interval::{sup_bounded, sup_directed, IntervalError, RatInterval};
use crate::matrix::{eigendecompose, ComplexMatrix, MatrixError};
use crate::poset::{FinitePoset, PosetError};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DaseinError {
    #[error("character cell index {index} out of range for a context with {cells} cells")]
    BadCharacter { index: usize, cells: usize },
    #[error("label {0:?} not in the fragment")]
    UnknownLabel(String),
    #[error("section domain is not downward closed: missing {0:?}")]
    NotDownwardClosed(String),
    #[error("nesting violated between {inner:?} and {outer:?}")]
    NestingViolated { inner: String, outer: String },
    #[error("sections live on different domains")]
    DomainMismatch,
    #[error("family of sections is not directed")]
    NotDirected,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A right-continuous step spectral family: strictly increasing
/// thresholds with cumulative projections, the last being the identity.
#[derive(Debug, Clone)]
pub struct SpectralFamily {
    jumps: Vec<(Rat, ComplexMatrix)>,
}

impl SpectralFamily {
    /// Assembles a family from cumulative jumps, sorted by threshold.
    /// The caller is responsible for monotonicity of the projections.
    pub fn from_jumps(mut jumps: Vec<(Rat, ComplexMatrix)>) -> SpectralFamily {
        jumps.sort_by(|a, b| a.0.cmp(&b.0));
        SpectralFamily { jumps }
    }

    pub fn jumps(&self) -> &[(Rat, ComplexMatrix)] {
        &self.jumps
    }

    pub fn thresholds(&self) -> impl Iterator<Item = &Rat> {
        self.jumps.iter().map(|(t, _)| t)
    }

    /// The cumulative projection at `λ`: zero below the first jump,
    /// constant between jumps, identity from the last jump on.
    pub fn cumulative_at(&self, threshold: &Rat) -> ComplexMatrix {
        let dim = self.jumps[0].1.dim();
        let mut latest: Option<&ComplexMatrix> = None;
        for (t, cumulative) in &self.jumps {
            if t <= threshold {
                latest = Some(cumulative);
            }
        }
        latest.cloned().unwrap_or_else(|| ComplexMatrix::zero(dim))
    }
}

/// The spectral family of a Hermitian matrix: jumps at the clustered
/// eigenvalues, cumulative sums of spectral projections.
pub fn spectral_family(a: &ComplexMatrix, tol: f64) -> Result<SpectralFamily, DaseinError> {
    let spectrum = eigendecompose(a, tol)?;
    let mut jumps = Vec::with_capacity(spectrum.len());
    let mut cumulative = ComplexMatrix::zero(a.dim());
    for point in spectrum {
        cumulative = cumulative.add(&point.projection);
        jumps.push((point.value, cumulative.clone()));
    }
    Ok(SpectralFamily { jumps })
}

/// `p ≤ q` for projections: `qp = p` within tolerance.
fn projection_below(p: &ComplexMatrix, q: &ComplexMatrix, eps: f64) -> bool {
    q.mul(p).sub(p).is_zero_within(eps)
}

/// The spectral order: `a ≼ b` iff `E^a_λ ≥ E^b_λ` for every `λ`,
/// checked at the merged finite jump set (sufficient for step
/// families).
pub fn spectral_leq(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<bool, DaseinError> {
    if a.dim() != b.dim() {
        return Err(DaseinError::Context(ContextError::DimMismatch(
            a.dim(),
            b.dim(),
        )));
    }
    let fa = spectral_family(a, tol)?;
    let fb = spectral_family(b, tol)?;
    let eps = (a.dim() as f64) * tol.max(1e-12) * 10.0;
    let mut merged: Vec<Rat> = fa.thresholds().chain(fb.thresholds()).cloned().collect();
    merged.sort();
    merged.dedup();
    for t in &merged {
        let ea = fa.cumulative_at(t);
        let eb = fb.cumulative_at(t);
        if !projection_below(&eb, &ea, eps) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DaseinMode {
    Inner,
    Outer,
}

fn context_eps(v: &Context, tol: f64) -> f64 {
    (v.dim() as f64) * tol.max(1e-12) * 10.0
}

/// Daseinisation of a projection into a context: the largest context
/// projection below it (inner) or the smallest one dominating it
/// (outer), computed cell by cell.
pub fn dasein_projection(
    p: &ComplexMatrix,
    v: &Context,
    mode: DaseinMode,
    tol: f64,
) -> Result<ComplexMatrix, DaseinError> {
    if p.dim() != v.dim() {
        return Err(DaseinError::Context(ContextError::DimMismatch(
            p.dim(),
            v.dim(),
        )));
    }
    if !p.is_projection(tol) {
        return Err(DaseinError::Matrix(MatrixError::NotProjection));
    }
    let eps = context_eps(v, tol);
    let mut sum = ComplexMatrix::zero(v.dim());
    for q in v.cells() {
        let keep = match mode {
            DaseinMode::Outer => !q.mul(p).is_zero_within(eps),
            DaseinMode::Inner => q.mul(p).sub(q).is_zero_within(eps),
        };
        if keep {
            sum = sum.add(q);
        }
    }
    Ok(sum)
}

/// An operator expressed in a context: one coefficient per cell, in the
/// context's canonical cell order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextOperator {
    pub coeffs: Vec<Rat>,
}

impl ContextOperator {
    pub fn materialize(&self, v: &Context) -> ComplexMatrix {
        let mut out = ComplexMatrix::zero(v.dim());
        for (c, q) in self.coeffs.iter().zip(v.cells()) {
            out = out.add(&q.scale_rat(c));
        }
        out
    }
}

/// Which cells of `v` lie below `p`, as a bitmask (the inner
/// daseinisation of `p`, recorded cellwise).
fn cells_below(p: &ComplexMatrix, v: &Context, eps: f64) -> u64 {
    let mut mask = 0u64;
    for (j, q) in v.cells().iter().enumerate() {
        if q.mul(p).sub(q).is_zero_within(eps) {
            mask |= 1 << j;
        }
    }
    mask
}

/// Which cells of `v` overlap `p` (the outer daseinisation, cellwise).
fn cells_overlapping(p: &ComplexMatrix, v: &Context, eps: f64) -> u64 {
    let mut mask = 0u64;
    for (j, q) in v.cells().iter().enumerate() {
        if !q.mul(p).is_zero_within(eps) {
            mask |= 1 << j;
        }
    }
    mask
}

/// Inner and outer daseinisation of a Hermitian operator into a
/// context, as cell-coefficient vectors. See the module docs for the
/// two spectral-family constructions.
pub fn dasein_coeffs(
    a: &ComplexMatrix,
    v: &Context,
    tol: f64,
) -> Result<(ContextOperator, ContextOperator), DaseinError> {
    if a.dim() != v.dim() {
        return Err(DaseinError::Context(ContextError::DimMismatch(
            a.dim(),
            v.dim(),
        )));
    }
    let family = spectral_family(a, tol)?;
    let eps = context_eps(v, tol);
    let ncells = v.cells().len();
    let thresholds: Vec<Rat> = family.thresholds().cloned().collect();

    // outer: family λ_k ↦ δ^i(E_{λ_k}); coefficient of a cell is the
    // first threshold whose daseinised family covers it
    let mut outer = vec![None::<Rat>; ncells];
    let mut previous_mask = 0u64;
    for (t, cumulative) in family.jumps() {
        let mask = cells_below(cumulative, v, eps);
        debug_assert_eq!(mask & previous_mask, previous_mask, "family must increase");
        previous_mask = mask;
        for (j, slot) in outer.iter_mut().enumerate() {
            if slot.is_none() && mask & (1 << j) != 0 {
                *slot = Some(t.clone());
            }
        }
    }

    // inner: family λ_k ↦ inf over μ > λ_k of δ^o(E_μ); candidates are
    // the later thresholds, midpoints, and one point past the top
    let mut inner = vec![None::<Rat>; ncells];
    let mut candidates: Vec<Rat> = Vec::new();
    for w in thresholds.windows(2) {
        candidates.push((&w[0] + &w[1]) / Rat::from_int(2));
    }
    candidates.extend(thresholds.iter().cloned());
    candidates.push(thresholds.last().unwrap() + &Rat::one());
    candidates.sort();
    candidates.dedup();
    let mut previous_mask = 0u64;
    for t in &thresholds {
        let full = (1u64 << ncells) - 1;
        let mut inf_mask = full;
        for mu in candidates.iter().filter(|mu| *mu > t) {
            let overlap = cells_overlapping(&family.cumulative_at(mu), v, eps);
            inf_mask &= overlap;
        }
        debug_assert_eq!(
            inf_mask & previous_mask,
            previous_mask,
            "family must increase"
        );
        previous_mask = inf_mask;
        for (j, slot) in inner.iter_mut().enumerate() {
            if slot.is_none() && inf_mask & (1 << j) != 0 {
                *slot = Some(t.clone());
            }
        }
    }

    let unwrap_all = |slots: Vec<Option<Rat>>| -> Vec<Rat> {
        slots
            .into_iter()
            .map(|s| s.expect("final family value is the identity, covering every cell"))
            .collect()
    };
    Ok((
        ContextOperator {
            coeffs: unwrap_all(inner),
        },
        ContextOperator {
            coeffs: unwrap_all(outer),
        },
    ))
}

/// Daseinised operator as a matrix. Inner and outer bracket the input
/// in the spectral order.
pub fn dasein_selfadjoint(
    a: &ComplexMatrix,
    v: &Context,
    mode: DaseinMode,
    tol: f64,
) -> Result<ComplexMatrix, DaseinError> {
    let (inner, outer) = dasein_coeffs(a, v, tol)?;
    let op = match mode {
        DaseinMode::Inner => inner,
        DaseinMode::Outer => outer,
    };
    Ok(op.materialize(v))
}

/// A character of a finite-dimensional abelian algebra: the point of
/// its spectrum picking out one minimal projection. Evaluating an
/// operator `Σ c_j Q_j` at the character returns `c_cell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Character {
    pub cell: usize,
}

impl Character {
    pub fn validate(&self, v: &Context) -> Result<(), DaseinError> {
        if self.cell >= v.cells().len() {
            return Err(DaseinError::BadCharacter {
                index: self.cell,
                cells: v.cells().len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, op: &ContextOperator) -> Rat {
        op.coeffs[self.cell].clone()
    }

    /// Restriction along a coarsening: the unique cell of the coarser
    /// context dominating this character's cell.
    pub fn restrict(
        &self,
        from: &Context,
        to: &Context,
        tol: f64,
    ) -> Result<Character, DaseinError> {
        self.validate(from)?;
        let eps = context_eps(to, tol);
        let q = &from.cells()[self.cell];
        for (j, w) in to.cells().iter().enumerate() {
            if projection_below(q, w, eps) {
                return Ok(Character { cell: j });
            }
        }
        Err(DaseinError::BadCharacter {
            index: self.cell,
            cells: to.cells().len(),
        })
    }
}

/// The unsharp value of `a` in context `v` at a character: endpoints
/// are the character's evaluations of the inner and outer
/// daseinisations, both eigenvalues of `a`.
pub fn value_interval(
    a: &ComplexMatrix,
    v: &Context,
    chi: Character,
    tol: f64,
) -> Result<RatInterval, DaseinError> {
    chi.validate(v)?;
    let (inner, outer) = dasein_coeffs(a, v, tol)?;
    let lo = chi.eval(&inner);
    let hi = chi.eval(&outer);
    Ok(RatInterval::new(lo, hi).expect("inner endpoint cannot exceed outer endpoint"))
}

/// An interval per context label over a downward-closed fragment, with
/// the nesting invariant: going down, intervals only widen.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSection {
    poset: FinitePoset,
    intervals: BTreeMap<String, RatInterval>,
}

impl GlobalSection {
    /// Validates the domain against the carrier poset (every label
    /// present, domain downward closed) and the nesting invariant.
    pub fn new(
        poset: FinitePoset,
        intervals: BTreeMap<String, RatInterval>,
    ) -> Result<Self, DaseinError> {
        for label in poset.labels() {
            if !intervals.contains_key(label) {
                return Err(DaseinError::NotDownwardClosed(label.clone()));
            }
        }
        for label in intervals.keys() {
            poset.index_of(label)?;
        }
        let section = GlobalSection { poset, intervals };
        section.check_nesting()?;
        Ok(section)
    }

    fn check_nesting(&self) -> Result<(), DaseinError> {
        let n = self.poset.len();
        for i in 0..n {
            for j in 0..n {
                if !self.poset.leq_idx(i, j) {
                    continue;
                }
                let below = &self.intervals[self.poset.label(i)];
                let above = &self.intervals[self.poset.label(j)];
                if !below.leq(above) {
                    return Err(DaseinError::NestingViolated {
                        inner: self.poset.label(j).to_string(),
                        outer: self.poset.label(i).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn intervals(&self) -> &BTreeMap<String, RatInterval> {
        &self.intervals
    }

    pub fn interval(&self, label: &str) -> Option<&RatInterval> {
        self.intervals.get(label)
    }

    /// The two endpoint maps: the left is order-preserving, the right
    /// order-reversing, left ≤ right pointwise. Verified on return.
    pub fn decompose(&self) -> (BTreeMap<String, Rat>, BTreeMap<String, Rat>) {
        let lo: BTreeMap<String, Rat> = self
            .intervals
            .iter()
            .map(|(l, iv)| (l.clone(), iv.lo().clone()))
            .collect();
        let hi: BTreeMap<String, Rat> = self
            .intervals
            .iter()
            .map(|(l, iv)| (l.clone(), iv.hi().clone()))
            .collect();
        let n = self.poset.len();
        for i in 0..n {
            for j in 0..n {
                if self.poset.leq_idx(i, j) {
                    let (li, lj) = (self.poset.label(i), self.poset.label(j));
                    debug_assert!(lo[li] <= lo[lj], "left endpoints must be order-preserving");
                    debug_assert!(hi[li] >= hi[lj], "right endpoints must be order-reversing");
                }
            }
        }
        for label in self.intervals.keys() {
            debug_assert!(lo[label] <= hi[label]);
        }
        (lo, hi)
    }

    /// Inverse of [`decompose`](Self::decompose).
    pub fn recompose(
        poset: FinitePoset,
        lo: &BTreeMap<String, Rat>,
        hi: &BTreeMap<String, Rat>,
    ) -> Result<GlobalSection, DaseinError> {
        let mut intervals = BTreeMap::new();
        for (label, l) in lo {
            let h = hi
                .get(label)
                .ok_or_else(|| DaseinError::NotDownwardClosed(label.clone()))?;
            intervals.insert(
                label.clone(),
                RatInterval::new(l.clone(), h.clone()).map_err(DaseinError::Interval)?,
            );
        }
        GlobalSection::new(poset, intervals)
    }

    /// Monotone sections preserve directed suprema on a finite
    /// fragment: the supremum of a directed label set is its maximum,
    /// and the directed supremum of the intervals is the intersection.
    /// Checked exhaustively over all directed label subsets, so the
    /// enumeration cap applies.
    pub fn preserves_directed_sups(&self) -> Result<bool, DaseinError> {
        if self.poset.len() > crate::poset::DEFAULT_WAY_BELOW_CAP {
            return Err(DaseinError::Poset(PosetError::SizeCapExceeded {
                size: self.poset.len(),
                cap: crate::poset::DEFAULT_WAY_BELOW_CAP,
            }));
        }
        let n = self.poset.len();
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        for s in 1..=full {
            if !self.poset.is_directed_mask(s) {
                continue;
            }
            let sup = match self.poset.lub_mask(s) {
                Some(m) => m,
                None => return Ok(false),
            };
            let members: Vec<RatInterval> = self
                .poset
                .iter_mask(s)
                .map(|i| self.intervals[self.poset.label(i)].clone())
                .collect();
            let interval_sup = sup_directed(&members)?;
            if interval_sup != self.intervals[self.poset.label(sup)] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// JSON: `{"fragment": <poset>, "intervals": {"V00": {"lo": .., "hi": ..}}}`.
    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "fragment": serde_json::to_value(self.poset.to_json()).unwrap(),
            "intervals": self.intervals,
        })
    }
}

/// The section of unsharp values beneath one context: restrict the
/// character down every label under `top_label` and take the value
/// interval there. Nesting holds by the antitone/monotone behaviour of
/// the two daseinisations and is re-validated on the result.
pub fn section_at(
    a: &ComplexMatrix,
    fragment: &Fragment,
    top_label: &str,
    chi: Character,
    tol: f64,
) -> Result<GlobalSection, DaseinError> {
    let top = fragment
        .context(top_label)
        .ok_or_else(|| DaseinError::UnknownLabel(top_label.to_string()))?;
    chi.validate(top)?;
    let top_idx = fragment.poset.index_of(top_label)?;
    let domain_mask = fragment.poset.down_mask(top_idx);
    let sub = fragment.poset.restrict(domain_mask);
    let mut intervals = BTreeMap::new();
    for label in sub.labels() {
        let w = fragment
            .context(label)
            .ok_or_else(|| DaseinError::UnknownLabel(label.clone()))?;
        let restricted = chi.restrict(top, w, tol)?;
        intervals.insert(label.clone(), value_interval(a, w, restricted, tol)?);
    }
    GlobalSection::new(sub, intervals)
}

/// Pointwise supremum of a finite directed family of sections over a
/// common domain. Directedness is checked within the family; the result
/// is validated as a section again.
pub fn section_pointwise_sup(family: &[GlobalSection]) -> Result<GlobalSection, DaseinError> {
    let first = family.first().ok_or(DaseinError::NotDirected)?;
    for s in &family[1..] {
        if s.poset != first.poset {
            return Err(DaseinError::DomainMismatch);
        }
    }
    let pointwise_leq = |a: &GlobalSection, b: &GlobalSection| {
        a.intervals.iter().all(|(l, iv)| iv.leq(&b.intervals[l]))
    };
    for (i, a) in family.iter().enumerate() {
        for b in &family[i..] {
            if !family
                .iter()
                .any(|z| pointwise_leq(a, z) && pointwise_leq(b, z))
            {
                return Err(DaseinError::NotDirected);
            }
        }
    }
    let mut intervals = BTreeMap::new();
    for label in first.intervals.keys() {
        let members: Vec<RatInterval> = family.iter().map(|s| s.intervals[label].clone()).collect();
        intervals.insert(label.clone(), sup_directed(&members)?);
    }
    GlobalSection::new(first.poset.clone(), intervals)
}

/// Pointwise supremum of a family of sections that overlap label by
/// label (a bounded family). The result is validated as a section.
pub fn section_pointwise_sup_bounded(
    family: &[GlobalSection],
) -> Result<GlobalSection, DaseinError> {
    let first = family.first().ok_or(DaseinError::NotDirected)?;
    for s in &family[1..] {
        if s.poset != first.poset {
            return Err(DaseinError::DomainMismatch);
        }
    }
    let mut intervals = BTreeMap::new();
    for label in first.intervals.keys() {
        let members: Vec<RatInterval> = family.iter().map(|s| s.intervals[label].clone()).collect();
        intervals.insert(label.clone(), sup_bounded(&members)?);
    }
    GlobalSection::new(first.poset.clone(), intervals)
}
