//! Contexts: abelian subalgebras of a matrix algebra, given by their
//! partitions of unity.
//!
//! A context is a list of pairwise-orthogonal Hermitian projections
//! summing to the identity — the minimal projections of the abelian
//! algebra they generate. The trivial context `{1}` is the bottom
//! element. Contexts are ordered by algebra inclusion, decided cell by
//! cell: `v ⊑ w` iff every cell of `v` is a sum of cells of `w`.
//!
//! Finite fragments of the context poset are materialised as
//! [`FinitePoset`]s so the definitional domain checks apply to them.

use std::collections::BTreeMap;

use serde_json::Value;
use thiserror::Error;

use crate::matrix::{eigendecompose, ComplexMatrix, MatrixError, MAX_DIM_FLOAT};
use crate::poset::{FinitePoset, PosetError};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContextError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("operators do not commute (commutator norm {0:.3e})")]
    NonCommuting(f64),
    #[error("cells do not form a partition of unity")]
    NotPartition,
    #[error("cell {0} is not a projection within tolerance")]
    CellNotProjection(usize),
    #[error("projection does not respect the block mask")]
    BlockViolation,
    #[error("map is not a unital *-homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("family of contexts is not directed")]
    NotDirected,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// An abelian subalgebra context, stored by its minimal projections in
/// canonical order (rank, then rounded-entry lexicographic).
#[derive(Debug, Clone)]
pub struct Context {
    dim: usize,
    cells: Vec<ComplexMatrix>,
}

type CellKey = (u32, Vec<(i64, i64)>);

fn cell_key(cell: &ComplexMatrix) -> CellKey {
    let rank = cell.trace_re().round().max(0.0) as u32;
    let n = cell.dim();
    let mut rounded = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let z = cell.get(i, j);
            // rounding is for ordering only, never for order semantics
            let key_of = |x: f64| {
                let r = (x * 1e12).round();
                if r == 0.0 {
                    0i64 // avoid -0
                } else {
                    r as i64
                }
            };
            rounded.push((key_of(z.re), key_of(z.im)));
        }
    }
    (rank, rounded)
}

impl Context {
    /// Validates and canonically orders a partition of unity.
    pub fn new(cells: Vec<ComplexMatrix>, tol: f64) -> Result<Self, ContextError> {
        let dim = cells
            .first()
            .map(|c| c.dim())
            .ok_or(ContextError::NotPartition)?;
        let eps = tol * (dim as f64).max(1.0);
        let mut sum = ComplexMatrix::zero(dim);
        for (k, cell) in cells.iter().enumerate() {
            if cell.dim() != dim {
                return Err(ContextError::DimMismatch(cell.dim(), dim));
            }
            if !cell.is_projection(tol) {
                return Err(ContextError::CellNotProjection(k));
            }
            sum = sum.add(cell);
        }
        if !sum.approx_eq(&ComplexMatrix::identity(dim), 10.0 * eps) {
            return Err(ContextError::NotPartition);
        }
        for (i, a) in cells.iter().enumerate() {
            for b in &cells[i + 1..] {
                if !a.mul(b).is_zero_within(10.0 * eps) {
                    return Err(ContextError::NotPartition);
                }
            }
        }
        let mut cells = cells;
        cells.sort_by_cached_key(cell_key);
        Ok(Context { dim, cells })
    }

    /// The trivial context `{1}`, bottom of the poset.
    pub fn bottom(dim: usize) -> Self {
        Context {
            dim,
            cells: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[ComplexMatrix] {
        &self.cells
    }

    pub fn is_bottom(&self) -> bool {
        self.cells.len() == 1
    }

    pub fn canonical_key(&self) -> Vec<CellKey> {
        self.cells.iter().map(cell_key).collect()
    }

    /// Every cell respects the diagonal block mask.
    pub fn respects_blocks(&self, blocks: &[usize], tol: f64) -> bool {
        self.cells.iter().all(|c| c.respects_blocks(blocks, tol))
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "dim": self.dim,
            "cells": self.cells.iter().map(|c| c.to_json()["entries"].clone()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value, tol: f64) -> Result<Self, ContextError> {
        let obj = value
            .as_object()
            .ok_or_else(|| ContextError::Matrix(MatrixError::BadJson("expected object".into())))?;
        let dim =
            obj.get("dim").and_then(Value::as_u64).ok_or_else(|| {
                ContextError::Matrix(MatrixError::BadJson("missing \"dim\"".into()))
            })? as usize;
        let cells_json = obj.get("cells").and_then(Value::as_array).ok_or_else(|| {
            ContextError::Matrix(MatrixError::BadJson("missing \"cells\"".into()))
        })?;
        let cells = cells_json
            .iter()
            .map(|entries| {
                ComplexMatrix::from_json(&serde_json::json!({"dim": dim, "entries": entries}))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Context::new(cells, tol)
    }

    /// Short rendering of the cell structure, for tooltips and tables.
    pub fn describe(&self) -> String {
        let cells: Vec<String> = self
            .cells
            .iter()
            .map(|c| {
                let diag: Vec<String> = (0..self.dim)
                    .map(|i| format!("{:.2}", c.get(i, i).re))
                    .collect();
                format!(
                    "rank{} diag[{}]",
                    c.trace_re().round() as i64,
                    diag.join(",")
                )
            })
            .collect();
        cells.join("; ")
    }
}

/// Keeps the eigenvalue-one part of an approximate projection. Used to
/// clean products of commuting projections.
fn clean_projection(m: &ComplexMatrix, tol: f64) -> Result<Option<ComplexMatrix>, ContextError> {
    let sym = m.add(&m.adjoint()).scale_rat(&Rat::new(1, 2));
    if sym.is_zero_within(sym.tol_scale(tol).max(tol)) {
        return Ok(None);
    }
    let spec = eigendecompose(&sym, tol)?;
    let mut kept: Option<ComplexMatrix> = None;
    for point in spec {
        if point.value.to_f64() > 0.5 {
            kept = Some(match kept {
                Some(acc) => acc.add(&point.projection),
                None => point.projection,
            });
        }
    }
    Ok(kept)
}

/// The context generated by a family of commuting Hermitian operators:
/// the common refinement of their spectral projections.
pub fn context_of(operators: &[ComplexMatrix], tol: f64) -> Result<Context, ContextError> {
    let dim = operators
        .first()
        .map(|m| m.dim())
        .ok_or(ContextError::NotPartition)?;
    if dim > MAX_DIM_FLOAT {
        return Err(ContextError::Matrix(MatrixError::DimCapExceeded {
            dim,
            cap: MAX_DIM_FLOAT,
        }));
    }
    for (i, a) in operators.iter().enumerate() {
        if a.dim() != dim {
            return Err(ContextError::DimMismatch(a.dim(), dim));
        }
        if !a.is_hermitian(tol) {
            return Err(ContextError::Matrix(MatrixError::NotHermitian));
        }
        for b in &operators[i + 1..] {
            let c = a.commutator_norm(b);
            if c > a.tol_scale(tol).max(b.tol_scale(tol)) {
                return Err(ContextError::NonCommuting(c));
            }
        }
    }
    let mut cells = vec![ComplexMatrix::identity(dim)];
    for op in operators {
        let spectrum = eigendecompose(op, tol)?;
        let mut refined = Vec::new();
        for cell in &cells {
            for point in &spectrum {
                if let Some(product) = clean_projection(&cell.mul(&point.projection), tol)? {
                    refined.push(product);
                }
            }
        }
        cells = refined;
    }
    Context::new(cells, tol)
}

/// Algebra inclusion, decided cellwise: true iff every cell of `coarse`
/// is a sum of cells of `fine`.
pub fn context_leq(coarse: &Context, fine: &Context, tol: f64) -> Result<bool, ContextError> {
    if coarse.dim() != fine.dim() {
        return Err(ContextError::DimMismatch(coarse.dim(), fine.dim()));
    }
    let eps = (coarse.dim() as f64) * tol.max(1e-12) * 10.0;
    for p in coarse.cells() {
        let mut sum = ComplexMatrix::zero(coarse.dim());
        for q in fine.cells() {
            let qp = q.mul(p);
            let is_below = qp.sub(q).is_zero_within(eps);
            let is_disjoint = qp.is_zero_within(eps);
            if is_below {
                sum = sum.add(q);
            } else if !is_disjoint {
                return Ok(false);
            }
        }
        if !sum.approx_eq(p, eps) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn context_eq(a: &Context, b: &Context, tol: f64) -> Result<bool, ContextError> {
    Ok(a.cells().len() == b.cells().len() && context_leq(a, b, tol)? && context_leq(b, a, tol)?)
}

/// The intersection algebra, computed from the bipartite overlap graph:
/// cells of the two contexts are joined by an edge when their product
/// is nonzero, and each connected component sums (from either side, the
/// sums agree) to one minimal projection of the meet.
pub fn context_meet(a: &Context, b: &Context, tol: f64) -> Result<Context, ContextError> {
    if a.dim() != b.dim() {
        return Err(ContextError::DimMismatch(a.dim(), b.dim()));
    }
    let eps = (a.dim() as f64) * tol.max(1e-12) * 10.0;
    let na = a.cells().len();
    let nb = b.cells().len();
    // union-find over na + nb nodes
    let mut parent: Vec<usize> = (0..na + nb).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for (i, p) in a.cells().iter().enumerate() {
        for (j, q) in b.cells().iter().enumerate() {
            if !p.mul(q).is_zero_within(eps) {
                let ri = find(&mut parent, i);
                let rj = find(&mut parent, na + j);
                parent[ri] = rj;
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..na + nb {
        let root = find(&mut parent, x);
        components.entry(root).or_default().push(x);
    }
    let mut cells = Vec::new();
    for members in components.values() {
        let mut sum_a = ComplexMatrix::zero(a.dim());
        let mut sum_b = ComplexMatrix::zero(a.dim());
        for &x in members {
            if x < na {
                sum_a = sum_a.add(&a.cells()[x]);
            } else {
                sum_b = sum_b.add(&b.cells()[x - na]);
            }
        }
        debug_assert!(
            sum_a.approx_eq(&sum_b, 100.0 * eps),
            "component sums from the two sides must agree"
        );
        cells.push(sum_a);
    }
    Context::new(cells, tol)
}

/// Join of two contexts: the common refinement when all cells commute,
/// `Incompatible` otherwise.
#[derive(Debug, Clone)]
pub enum JoinResult {
    Joined(Context),
    Incompatible,
}

pub fn context_join(a: &Context, b: &Context, tol: f64) -> Result<JoinResult, ContextError> {
    if a.dim() != b.dim() {
        return Err(ContextError::DimMismatch(a.dim(), b.dim()));
    }
    let eps = (a.dim() as f64) * tol.max(1e-12) * 10.0;
    for p in a.cells() {
        for q in b.cells() {
            if p.commutator_norm(q) > eps {
                return Ok(JoinResult::Incompatible);
            }
        }
    }
    let mut cells = Vec::new();
    for p in a.cells() {
        for q in b.cells() {
            if let Some(product) = clean_projection(&p.mul(q), tol)? {
                cells.push(product);
            }
        }
    }
    Ok(JoinResult::Joined(Context::new(cells, tol)?))
}

/// Supremum of a finite directed family: the iterated join, which for a
/// finite directed set equals the maximum member. Both are computed and
/// cross-checked.
pub fn directed_sup_contexts(family: &[Context], tol: f64) -> Result<Context, ContextError> {
    if family.is_empty() {
        return Err(ContextError::NotDirected);
    }
    // directedness: each pair has an upper bound within the family
    for (i, a) in family.iter().enumerate() {
        for b in &family[i..] {
            let mut bounded = false;
            for c in family {
                if context_leq(a, c, tol)? && context_leq(b, c, tol)? {
                    bounded = true;
                    break;
                }
            }
            if !bounded {
                return Err(ContextError::NotDirected);
            }
        }
    }
    let mut joined = family[0].clone();
    for v in &family[1..] {
        match context_join(&joined, v, tol)? {
            JoinResult::Joined(next) => joined = next,
            JoinResult::Incompatible => return Err(ContextError::NotDirected),
        }
    }
    // a finite directed family has a maximum; the join must be it
    let mut max = None;
    for c in family {
        let mut dominates = true;
        for v in family {
            if !context_leq(v, c, tol)? {
                dominates = false;
                break;
            }
        }
        if dominates {
            max = Some(c.clone());
            break;
        }
    }
    let max = max.ok_or(ContextError::NotDirected)?;
    debug_assert!(context_eq(&joined, &max, tol)?);
    Ok(max)
}

/// A unital *-homomorphism between matrix algebras (or finite direct
/// sums of them), specified by the images of all source matrix units
/// and verified rather than trusted.
#[derive(Debug, Clone)]
pub struct StarHom {
    source_blocks: Vec<usize>,
    target_dim: usize,
    /// Per block `b` of size `n_b`: the `n_b²` images, row-major.
    images: Vec<Vec<ComplexMatrix>>,
}

impl StarHom {
    pub fn new(
        source_blocks: Vec<usize>,
        target_dim: usize,
        images: Vec<Vec<ComplexMatrix>>,
        tol: f64,
    ) -> Result<Self, ContextError> {
        let hom = StarHom {
            source_blocks,
            target_dim,
            images,
        };
        hom.verify(tol)?;
        Ok(hom)
    }

    pub fn source_dim(&self) -> usize {
        self.source_blocks.iter().sum()
    }

    pub fn source_blocks(&self) -> &[usize] {
        &self.source_blocks
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    /// The identity on `M_dim`.
    pub fn identity(dim: usize) -> Self {
        let images = (0..dim * dim)
            .map(|k| ComplexMatrix::unit(dim, k / dim, k % dim))
            .collect();
        StarHom {
            source_blocks: vec![dim],
            target_dim: dim,
            images: vec![images],
        }
    }

    fn image_of_unit(&self, block: usize, i: usize, j: usize) -> &ComplexMatrix {
        let nb = self.source_blocks[block];
        &self.images[block][i * nb + j]
    }

    /// Multiplicativity, *-preservation and unitality on matrix units.
    fn verify(&self, tol: f64) -> Result<(), ContextError> {
        let fail = |msg: &str| Err(ContextError::NotHomomorphism(msg.to_string()));
        if self.images.len() != self.source_blocks.len() {
            return fail("images must cover every block");
        }
        for (b, &nb) in self.source_blocks.iter().enumerate() {
            if self.images[b].len() != nb * nb {
                return fail("wrong number of unit images in a block");
            }
            for img in &self.images[b] {
                if img.dim() != self.target_dim {
                    return Err(ContextError::DimMismatch(img.dim(), self.target_dim));
                }
            }
        }
        let eps = (self.target_dim as f64) * tol.max(1e-12) * 10.0;
        // star: φ(E_ij)* = φ(E_ji)
        for (b, &nb) in self.source_blocks.iter().enumerate() {
            for i in 0..nb {
                for j in 0..nb {
                    let lhs = self.image_of_unit(b, i, j).adjoint();
                    if !lhs.approx_eq(self.image_of_unit(b, j, i), eps) {
                        return fail("star is not preserved on matrix units");
                    }
                }
            }
        }
        // multiplicativity within a block: φ(E_ij)φ(E_kl) = δ_jk φ(E_il)
        for (b, &nb) in self.source_blocks.iter().enumerate() {
            for i in 0..nb {
                for j in 0..nb {
                    for k in 0..nb {
                        for l in 0..nb {
                            let prod = self.image_of_unit(b, i, j).mul(self.image_of_unit(b, k, l));
                            let expected = if j == k {
                                self.image_of_unit(b, i, l).clone()
                            } else {
                                ComplexMatrix::zero(self.target_dim)
                            };
                            if !prod.approx_eq(&expected, eps) {
                                return fail("multiplicativity fails on matrix units");
                            }
                        }
                    }
                }
            }
        }
        // cross-block products vanish
        for b in 0..self.source_blocks.len() {
            for c in 0..self.source_blocks.len() {
                if b == c {
                    continue;
                }
                let prod = self.image_of_unit(b, 0, 0).mul(self.image_of_unit(c, 0, 0));
                if !prod.is_zero_within(eps) {
                    return fail("cross-block products must vanish");
                }
            }
        }
        // unitality: the diagonal units sum to the target identity
        let mut unit = ComplexMatrix::zero(self.target_dim);
        for (b, &nb) in self.source_blocks.iter().enumerate() {
            for i in 0..nb {
                unit = unit.add(self.image_of_unit(b, i, i));
            }
        }
        if !unit.approx_eq(&ComplexMatrix::identity(self.target_dim), eps) {
            return fail("φ(1) ≠ 1");
        }
        Ok(())
    }

    /// Applies the homomorphism entrywise over the matrix-unit basis.
    /// The argument must respect the source block mask.
    pub fn apply(&self, a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix, ContextError> {
        if a.dim() != self.source_dim() {
            return Err(ContextError::DimMismatch(a.dim(), self.source_dim()));
        }
        if self.source_blocks.len() > 1 && !a.respects_blocks(&self.source_blocks, tol) {
            return Err(ContextError::BlockViolation);
        }
        let mut out = ComplexMatrix::zero(self.target_dim);
        let mut offset = 0usize;
        for (b, &nb) in self.source_blocks.iter().enumerate() {
            for i in 0..nb {
                for j in 0..nb {
                    let coeff = a.get(offset + i, offset + j);
                    if coeff.norm_sqr() > 0.0 {
                        out = out.add(&self.image_of_unit(b, i, j).scale(coeff));
                    }
                }
            }
            offset += nb;
        }
        Ok(out)
    }

    /// Composition `self ∘ inner`.
    pub fn compose(&self, inner: &StarHom, tol: f64) -> Result<StarHom, ContextError> {
        if inner.target_dim != self.source_dim() {
            return Err(ContextError::DimMismatch(
                inner.target_dim,
                self.source_dim(),
            ));
        }
        let mut images = Vec::with_capacity(inner.source_blocks.len());
        for (b, &nb) in inner.source_blocks.iter().enumerate() {
            let mut block_images = Vec::with_capacity(nb * nb);
            for i in 0..nb {
                for j in 0..nb {
                    block_images.push(self.apply(inner.image_of_unit(b, i, j), tol)?);
                }
            }
            images.push(block_images);
        }
        StarHom::new(inner.source_blocks.clone(), self.target_dim, images, tol)
    }

    /// JSON: `{"source_dim": m, "target_dim": n, "unit_images": {...}}`
    /// with keys `e_{i}_{j}` (single block) or `e_{b}_{i}_{j}` and an
    /// optional `"source_blocks"` list.
    pub fn from_json(value: &Value, tol: f64) -> Result<Self, ContextError> {
        let badj = |m: &str| ContextError::Matrix(MatrixError::BadJson(m.to_string()));
        let obj = value.as_object().ok_or_else(|| badj("expected object"))?;
        let source_dim = obj
            .get("source_dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| badj("missing \"source_dim\""))? as usize;
        let target_dim = obj
            .get("target_dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| badj("missing \"target_dim\""))? as usize;
        let source_blocks: Vec<usize> = match obj.get("source_blocks") {
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| badj(&e.to_string()))?,
            None => vec![source_dim],
        };
        if source_blocks.iter().sum::<usize>() != source_dim {
            return Err(badj("source_blocks must sum to source_dim"));
        }
        let units = obj
            .get("unit_images")
            .and_then(Value::as_object)
            .ok_or_else(|| badj("missing \"unit_images\""))?;
        let mut images = Vec::new();
        for (b, &nb) in source_blocks.iter().enumerate() {
            let mut block_images = Vec::new();
            for i in 0..nb {
                for j in 0..nb {
                    let key_long = format!("e_{b}_{i}_{j}");
                    let key_short = format!("e_{i}_{j}");
                    let entry = units.get(&key_long).or_else(|| {
                        (source_blocks.len() == 1)
                            .then(|| units.get(&key_short))
                            .flatten()
                    });
                    let entries =
                        entry.ok_or_else(|| badj(&format!("missing unit image {key_long}")))?;
                    block_images.push(ComplexMatrix::from_json(&serde_json::json!({
                        "dim": target_dim,
                        "entries": entries,
                    }))?);
                }
            }
            images.push(block_images);
        }
        StarHom::new(source_blocks, target_dim, images, tol)
    }
}

/// Image of a context under a verified homomorphism: cells map through,
/// zero images are dropped, and the result is validated as a context of
/// the target algebra.
pub fn apply_hom(hom: &StarHom, v: &Context, tol: f64) -> Result<Context, ContextError> {
    if v.dim() != hom.source_dim() {
        return Err(ContextError::DimMismatch(v.dim(), hom.source_dim()));
    }
    let eps = (hom.target_dim() as f64) * tol.max(1e-12) * 10.0;
    let mut cells = Vec::new();
    for p in v.cells() {
        let image = hom.apply(p, tol)?;
        if !image.is_zero_within(eps) {
            cells.push(image);
        }
    }
    Context::new(cells, tol)
}

/// A finite fragment of the context poset: deduplicated contexts with
/// the induced order, materialised for the definitional checks.
#[derive(Debug, Clone)]
pub struct Fragment {
    pub poset: FinitePoset,
    labels: BTreeMap<String, Context>,
}

impl Fragment {
    pub fn context(&self, label: &str) -> Option<&Context> {
        self.labels.get(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = (&String, &Context)> {
        self.labels.iter()
    }

    pub fn to_json(&self) -> Value {
        let labels: BTreeMap<&String, Value> =
            self.labels.iter().map(|(l, c)| (l, c.to_json())).collect();
        serde_json::json!({
            "poset": serde_json::to_value(self.poset.to_json()).unwrap(),
            "labels": labels,
        })
    }

    pub fn from_json(value: &Value, tol: f64) -> Result<Self, ContextError> {
        let badj = |m: &str| ContextError::Matrix(MatrixError::BadJson(m.to_string()));
        let obj = value.as_object().ok_or_else(|| badj("expected object"))?;
        let labels_json = obj
            .get("labels")
            .and_then(Value::as_object)
            .ok_or_else(|| badj("missing \"labels\""))?;
        let mut contexts = Vec::new();
        for ctx in labels_json.values() {
            contexts.push(Context::from_json(ctx, tol)?);
        }
        // the order is recomputed rather than trusted from the file
        fragment_build(&contexts, false, false, tol)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let tooltips: BTreeMap<String, String> = self
            .labels
            .iter()
            .map(|(l, c)| (l.clone(), c.describe()))
            .collect();
        self.poset.to_dot(name, Some(&tooltips))
    }
}

/// Builds a fragment: deduplicates the inputs, optionally closes under
/// pairwise meets and adjoins the bottom context, then materialises the
/// induced poset. Labels are assigned in canonical order (cell count,
/// then canonical key), so the bottom is always `V00` when present.
pub fn fragment_build(
    contexts: &[Context],
    close_under_meets: bool,
    include_bottom: bool,
    tol: f64,
) -> Result<Fragment, ContextError> {
    let dim = contexts
        .first()
        .map(|c| c.dim())
        .ok_or(ContextError::NotPartition)?;
    for c in contexts {
        if c.dim() != dim {
            return Err(ContextError::DimMismatch(c.dim(), dim));
        }
    }
    let mut pool: Vec<Context> = Vec::new();
    let push_unique = |pool: &mut Vec<Context>, candidate: Context| -> Result<bool, ContextError> {
        for existing in pool.iter() {
            if context_eq(existing, &candidate, tol)? {
                return Ok(false);
            }
        }
        pool.push(candidate);
        Ok(true)
    };
    for c in contexts {
        push_unique(&mut pool, c.clone())?;
    }
    if include_bottom {
        push_unique(&mut pool, Context::bottom(dim))?;
    }
    if close_under_meets {
        let mut changed = true;
        while changed {
            changed = false;
            let snapshot = pool.clone();
            for (i, a) in snapshot.iter().enumerate() {
                for b in &snapshot[i + 1..] {
                    let m = context_meet(a, b, tol)?;
                    if push_unique(&mut pool, m)? {
                        changed = true;
                    }
                }
            }
        }
    }
    pool.sort_by_cached_key(|c| (c.cells().len(), c.canonical_key()));
    let width = pool.len().to_string().len().max(2);
    let labels: Vec<String> = (0..pool.len()).map(|i| format!("V{i:0width$}")).collect();
    let mut edges = Vec::new();
    for (i, a) in pool.iter().enumerate() {
        for (j, b) in pool.iter().enumerate() {
            if i != j && context_leq(a, b, tol)? {
                edges.push((labels[i].clone(), labels[j].clone()));
            }
        }
    }
    let poset = FinitePoset::validate(&labels, &edges)?;
    Ok(Fragment {
        poset,
        labels: labels.into_iter().zip(pool).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::DEFAULT_REPORT_CAP;
    use num::complex::Complex64;

    const TOL: f64 = 1e-9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(entries: &[i64]) -> ComplexMatrix {
        ComplexMatrix::diagonal(
            &entries
                .iter()
                .map(|&x| Rat::from_int(x))
                .collect::<Vec<_>>(),
        )
    }

    /// The two Hadamard-basis projections of M2.
    fn hadamard_context() -> Context {
        let plus = ComplexMatrix::from_rows(vec![
            vec![c(0.5, 0.0), c(0.5, 0.0)],
            vec![c(0.5, 0.0), c(0.5, 0.0)],
        ]);
        let minus = ComplexMatrix::from_rows(vec![
            vec![c(0.5, 0.0), c(-0.5, 0.0)],
            vec![c(-0.5, 0.0), c(0.5, 0.0)],
        ]);
        Context::new(vec![plus, minus], TOL).unwrap()
    }

    fn z_context() -> Context {
        context_of(&[diag(&[1, 2])], TOL).unwrap()
    }

    #[test]
    fn context_of_diagonal_operators() {
        let v = context_of(&[diag(&[1, 2, 3])], TOL).unwrap();
        assert_eq!(v.cells().len(), 3);
        let w = context_of(&[diag(&[1, 1, 2])], TOL).unwrap();
        assert_eq!(w.cells().len(), 2);
        // refinement by a second operator
        let r = context_of(&[diag(&[1, 1, 2]), diag(&[3, 4, 4])], TOL).unwrap();
        assert_eq!(r.cells().len(), 3);
    }

    #[test]
    fn non_commuting_generators_are_rejected() {
        let x = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let z = diag(&[1, -1]);
        assert!(matches!(
            context_of(&[x, z], TOL),
            Err(ContextError::NonCommuting(_))
        ));
    }

    #[test]
    fn leq_is_coarsening() {
        let coarse = context_of(&[diag(&[1, 1, 2])], TOL).unwrap();
        let fine = context_of(&[diag(&[1, 2, 3])], TOL).unwrap();
        assert!(context_leq(&coarse, &fine, TOL).unwrap());
        assert!(!context_leq(&fine, &coarse, TOL).unwrap());
        let bottom = Context::bottom(3);
        assert!(context_leq(&bottom, &fine, TOL).unwrap());
        assert!(context_leq(&bottom, &coarse, TOL).unwrap());
    }

    #[test]
    fn z_and_hadamard_are_incomparable() {
        let z = z_context();
        let h = hadamard_context();
        assert!(!context_leq(&z, &h, TOL).unwrap());
        assert!(!context_leq(&h, &z, TOL).unwrap());
        // meet is the bottom
        let m = context_meet(&z, &h, TOL).unwrap();
        assert!(m.is_bottom());
        // join is incompatible
        assert!(matches!(
            context_join(&z, &h, TOL).unwrap(),
            JoinResult::Incompatible
        ));
    }

    #[test]
    fn meet_is_idempotent() {
        let v = context_of(&[diag(&[1, 2, 3])], TOL).unwrap();
        let m = context_meet(&v, &v, TOL).unwrap();
        assert!(context_eq(&m, &v, TOL).unwrap());
    }

    #[test]
    fn m4_overlap_example_collapses_to_bottom() {
        // cells {12},{34} vs {123},{4}: the overlap graph is connected
        let a = Context::new(
            vec![
                ComplexMatrix::basis_projection(4, &[0, 1]),
                ComplexMatrix::basis_projection(4, &[2, 3]),
            ],
            TOL,
        )
        .unwrap();
        let b = Context::new(
            vec![
                ComplexMatrix::basis_projection(4, &[0, 1, 2]),
                ComplexMatrix::basis_projection(4, &[3]),
            ],
            TOL,
        )
        .unwrap();
        let m = context_meet(&a, &b, TOL).unwrap();
        assert!(m.is_bottom());
    }

    #[test]
    fn join_of_diagonal_partitions() {
        let a = Context::new(
            vec![
                ComplexMatrix::basis_projection(4, &[0, 1]),
                ComplexMatrix::basis_projection(4, &[2, 3]),
            ],
            TOL,
        )
        .unwrap();
        let b = Context::new(
            vec![
                ComplexMatrix::basis_projection(4, &[0, 2]),
                ComplexMatrix::basis_projection(4, &[1, 3]),
            ],
            TOL,
        )
        .unwrap();
        match context_join(&a, &b, TOL).unwrap() {
            JoinResult::Joined(j) => assert_eq!(j.cells().len(), 4),
            JoinResult::Incompatible => panic!("diagonal contexts must join"),
        }
        // bottom is neutral
        match context_join(&a, &Context::bottom(4), TOL).unwrap() {
            JoinResult::Joined(j) => assert!(context_eq(&j, &a, TOL).unwrap()),
            JoinResult::Incompatible => panic!("bottom joins with everything"),
        }
    }

    #[test]
    fn directed_sup_is_chain_max() {
        let v1 = Context::bottom(3);
        let v2 = context_of(&[diag(&[1, 1, 2])], TOL).unwrap();
        let v3 = context_of(&[diag(&[1, 2, 3])], TOL).unwrap();
        let sup = directed_sup_contexts(&[v1.clone(), v2.clone(), v3.clone()], TOL).unwrap();
        assert!(context_eq(&sup, &v3, TOL).unwrap());
        let sup2 = directed_sup_contexts(&[v1.clone(), v2.clone()], TOL).unwrap();
        assert!(context_eq(&sup2, &v2, TOL).unwrap());
        // an antichain pair is not directed
        let err = directed_sup_contexts(&[z_context(), hadamard_context()], TOL);
        assert!(matches!(err, Err(ContextError::NotDirected)));
    }

    #[test]
    fn hom_identity_and_doubling() {
        let id = StarHom::identity(2);
        let z = z_context();
        let back = apply_hom(&id, &z, TOL).unwrap();
        assert!(context_eq(&back, &z, TOL).unwrap());

        // A ↦ A ⊕ A from M2 into M4
        let mut images = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let mut m = ComplexMatrix::zero(4);
                m.set(i, j, c(1.0, 0.0));
                m.set(2 + i, 2 + j, c(1.0, 0.0));
                images.push(m);
            }
        }
        let double = StarHom::new(vec![2], 4, vec![images], TOL).unwrap();
        let image = apply_hom(&double, &z, TOL).unwrap();
        assert_eq!(image.cells().len(), 2);
        let expected = Context::new(
            vec![
                ComplexMatrix::basis_projection(4, &[0, 2]),
                ComplexMatrix::basis_projection(4, &[1, 3]),
            ],
            TOL,
        )
        .unwrap();
        assert!(context_eq(&image, &expected, TOL).unwrap());
    }

    #[test]
    fn compression_hom_drops_cells() {
        // A ⊕ B ↦ A from M2 ⊕ M2 onto M2 is unital: the unit 1⊕1 maps
        // to 1, while the whole second block maps to zero.
        let first_block: Vec<ComplexMatrix> = (0..4)
            .map(|k| ComplexMatrix::unit(2, k / 2, k % 2))
            .collect();
        let second_block = vec![ComplexMatrix::zero(2); 4];
        let hom = StarHom::new(vec![2, 2], 2, vec![first_block, second_block], TOL).unwrap();

        // a block-respecting context of M2 ⊕ M2 with cells {1},{2},{34}
        let v = Context::new(
            vec![
                ComplexMatrix::basis_projection(4, &[0]),
                ComplexMatrix::basis_projection(4, &[1]),
                ComplexMatrix::basis_projection(4, &[2, 3]),
            ],
            TOL,
        )
        .unwrap();
        assert!(v.respects_blocks(&[2, 2], TOL));
        let image = apply_hom(&hom, &v, TOL).unwrap();
        // the {34} cell maps to zero and is dropped
        assert_eq!(image.cells().len(), 2);
        assert!(context_eq(&image, &z_context(), TOL).unwrap());
    }

    #[test]
    fn fragment_build_partitions_of_three() {
        // the five partition contexts of {1,2,3}
        let discrete = context_of(&[diag(&[1, 2, 3])], TOL).unwrap();
        let v12 = context_of(&[diag(&[1, 1, 2])], TOL).unwrap();
        let v13 = context_of(&[diag(&[1, 2, 1])], TOL).unwrap();
        let v23 = context_of(&[diag(&[2, 1, 1])], TOL).unwrap();
        let fragment = fragment_build(&[discrete, v12, v13, v23], true, true, TOL).unwrap();
        assert_eq!(fragment.poset.len(), 5);
        let report = fragment.poset.domain_report(DEFAULT_REPORT_CAP).unwrap();
        assert!(report.is_bounded_complete);
        assert!(report.is_algebraic);
        // duplicates collapse
        let dup = context_of(&[diag(&[5, 6, 7])], TOL).unwrap();
        let again = fragment_build(
            &[context_of(&[diag(&[1, 2, 3])], TOL).unwrap(), dup],
            false,
            false,
            TOL,
        )
        .unwrap();
        assert_eq!(again.poset.len(), 1);
    }

    #[test]
    fn cells_reconstruct_single_generator() {
        // Σ (cell-mean eigenvalue)·P recovers the generating operator
        let ops = [
            diag(&[1, 2, 3]),
            diag(&[1, 1, 2]),
            ComplexMatrix::from_rows(vec![
                vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
                vec![c(0.0, -1.0), c(2.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)],
            ]),
        ];
        for a in &ops {
            let v = context_of(std::slice::from_ref(a), TOL).unwrap();
            let mut rebuilt = ComplexMatrix::zero(a.dim());
            for p in v.cells() {
                let mean = a.mul(p).trace_re() / p.trace_re();
                rebuilt = rebuilt.add(&p.scale(c(mean, 0.0)));
            }
            assert!(rebuilt.approx_eq(a, 1e-8));
        }
    }

    #[test]
    fn apply_hom_is_monotone() {
        let coarse = context_of(&[diag(&[1, 1, 2])], TOL).unwrap();
        let fine = context_of(&[diag(&[1, 2, 3])], TOL).unwrap();
        assert!(context_leq(&coarse, &fine, TOL).unwrap());
        // doubling into M6 preserves the order
        let mut images = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                let mut m = ComplexMatrix::zero(6);
                m.set(i, j, c(1.0, 0.0));
                m.set(3 + i, 3 + j, c(1.0, 0.0));
                images.push(m);
            }
        }
        let hom = StarHom::new(vec![3], 6, vec![images], TOL).unwrap();
        let image_coarse = apply_hom(&hom, &coarse, TOL).unwrap();
        let image_fine = apply_hom(&hom, &fine, TOL).unwrap();
        assert!(context_leq(&image_coarse, &image_fine, TOL).unwrap());
    }

    #[test]
    fn single_context_plus_bottom_is_two_chain() {
        let v = context_of(&[diag(&[1, 2])], TOL).unwrap();
        let fragment = fragment_build(&[v], false, true, TOL).unwrap();
        assert_eq!(fragment.poset.len(), 2);
        assert!(fragment.poset.leq("V00", "V01").unwrap());
        assert!(fragment.context("V00").unwrap().is_bottom());
    }
}
