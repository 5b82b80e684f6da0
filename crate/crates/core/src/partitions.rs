//! Symbolic partitions of the positive naturals.
//!
//! These stand in for contexts of the diagonal maximal abelian
//! subalgebra of operators on a separable Hilbert space: a partition
//! cell is the support of one minimal projection. The descriptor class
//! — finite unions of arithmetic progressions plus finite sets, or the
//! all-singletons partition — is the smallest one expressing the
//! even/odd split, the initial-segment algebras and their join, while
//! keeping refinement decidable by residue arithmetic.
//!
//! Every descriptor is eventually periodic: beyond the largest start
//! there is a modulus M such that membership depends only on n mod M.
//! All set questions (disjointness, exhaustion, refinement) are
//! therefore decided exactly on the finite window [1, T + M).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("malformed cells: {0}")]
    MalformedCells(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("descriptor window too large (modulus {0})")]
    WindowTooLarge(u64),
    #[error("coarsening enumeration capped at {cap} cells, got {cells}")]
    TooManyCells { cells: usize, cap: usize },
}

/// Cap on the cell count for coarsening enumeration (Bell numbers).
pub const STRICTLY_BELOW_CAP: usize = 10;

const MODULUS_CAP: u64 = 1 << 20;

/// One partition cell: arithmetic progressions `{start + k·step, k ≥ 0}`
/// plus a finite exceptional set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(default)]
    pub aps: Vec<(u64, u64)>,
    #[serde(default)]
    pub fin: BTreeSet<u64>,
}

impl Cell {
    pub fn singleton(n: u64) -> Cell {
        Cell {
            aps: vec![],
            fin: [n].into_iter().collect(),
        }
    }

    pub fn progression(start: u64, step: u64) -> Cell {
        Cell {
            aps: vec![(start, step)],
            fin: BTreeSet::new(),
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        if self.fin.contains(&n) {
            return true;
        }
        self.aps
            .iter()
            .any(|&(start, step)| n >= start && (n - start) % step == 0)
    }

    fn check(&self) -> Result<(), PartitionError> {
        for &(start, step) in &self.aps {
            if start == 0 || step == 0 {
                return Err(PartitionError::MalformedCells(
                    "progressions need start ≥ 1 and step ≥ 1".to_string(),
                ));
            }
        }
        if self.fin.contains(&0) {
            return Err(PartitionError::MalformedCells(
                "naturals start at 1 here".to_string(),
            ));
        }
        if self.aps.is_empty() && self.fin.is_empty() {
            return Err(PartitionError::MalformedCells("empty cell".to_string()));
        }
        Ok(())
    }

    /// Merge of disjoint cells.
    fn union(&self, other: &Cell) -> Cell {
        let mut aps = self.aps.clone();
        aps.extend(other.aps.iter().copied());
        let fin = self.fin.union(&other.fin).copied().collect();
        Cell { aps, fin }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// A partition of the positive naturals in the descriptor class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NatPartition {
    /// All singletons: the maximal diagonal context.
    Discrete,
    /// Finitely many descriptor cells.
    Finite { cells: Vec<Cell> },
}

/// The named partitions of the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextKind {
    /// Evens and odds.
    Ve,
    /// Singletons 1..=j plus the tail.
    Vj(u64),
    /// All singletons.
    Vm,
    /// The one-cell partition — the trivial algebra.
    Bottom,
    Custom(Vec<Cell>),
}

/// Builds and validates one of the named partitions.
pub fn make_context(kind: ContextKind) -> Result<NatPartition, PartitionError> {
    let partition = match kind {
        ContextKind::Ve => NatPartition::Finite {
            cells: vec![Cell::progression(2, 2), Cell::progression(1, 2)],
        },
        ContextKind::Vj(j) => {
            let mut cells: Vec<Cell> = (1..=j).map(Cell::singleton).collect();
            cells.push(Cell::progression(j + 1, 1));
            NatPartition::Finite { cells }
        }
        ContextKind::Vm => NatPartition::Discrete,
        ContextKind::Bottom => NatPartition::Finite {
            cells: vec![Cell::progression(1, 1)],
        },
        ContextKind::Custom(cells) => NatPartition::Finite { cells },
    };
    partition.validate()?;
    Ok(partition)
}

impl NatPartition {
    pub fn bottom() -> NatPartition {
        make_context(ContextKind::Bottom).unwrap()
    }

    pub fn ve() -> NatPartition {
        make_context(ContextKind::Ve).unwrap()
    }

    pub fn vj(j: u64) -> NatPartition {
        make_context(ContextKind::Vj(j)).unwrap()
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, NatPartition::Finite { cells } if cells.len() == 1)
    }

    pub fn cell_count(&self) -> Option<usize> {
        match self {
            NatPartition::Discrete => None,
            NatPartition::Finite { cells } => Some(cells.len()),
        }
    }

    /// Threshold and modulus: for n ≥ T membership of every cell
    /// depends only on n mod M.
    fn window_params(&self) -> (u64, u64) {
        match self {
            NatPartition::Discrete => (1, 1),
            NatPartition::Finite { cells } => {
                let mut threshold = 1u64;
                let mut modulus = 1u64;
                for cell in cells {
                    for &(start, step) in &cell.aps {
                        threshold = threshold.max(start + 1);
                        modulus = lcm(modulus, step);
                    }
                    if let Some(max_fin) = cell.fin.iter().max() {
                        threshold = threshold.max(max_fin + 1);
                    }
                }
                (threshold, modulus)
            }
        }
    }

    /// The cell index of each n in [1, end], or an error when some n is
    /// uncovered or doubly covered.
    fn assign_cells(&self, end: u64) -> Result<Vec<usize>, PartitionError> {
        match self {
            NatPartition::Discrete => Ok((0..end as usize).collect()),
            NatPartition::Finite { cells } => {
                let mut assignment = Vec::with_capacity(end as usize);
                for n in 1..=end {
                    let mut owner = None;
                    for (k, cell) in cells.iter().enumerate() {
                        if cell.contains(n) {
                            if owner.is_some() {
                                return Err(PartitionError::MalformedCells(format!(
                                    "{n} lies in two cells"
                                )));
                            }
                            owner = Some(k);
                        }
                    }
                    match owner {
                        Some(k) => assignment.push(k),
                        None => {
                            return Err(PartitionError::MalformedCells(format!(
                                "{n} lies in no cell"
                            )))
                        }
                    }
                }
                Ok(assignment)
            }
        }
    }

    /// Cells are pairwise disjoint and jointly exhaust the naturals,
    /// decided exactly on the periodic window.
    pub fn validate(&self) -> Result<(), PartitionError> {
        if let NatPartition::Finite { cells } = self {
            for cell in cells {
                cell.check()?;
            }
        }
        let (threshold, modulus) = self.window_params();
        if modulus > MODULUS_CAP {
            return Err(PartitionError::WindowTooLarge(modulus));
        }
        self.assign_cells(threshold + modulus).map(|_| ())
    }
}

/// Algebra inclusion: true iff every cell of `coarse` is a union of
/// cells of `fine`. Decided on the joint periodic window by checking
/// that the fine cell classes refine the coarse ones there.
pub fn refines_leq(coarse: &NatPartition, fine: &NatPartition) -> Result<bool, PartitionError> {
    match (coarse, fine) {
        (_, NatPartition::Discrete) => Ok(true),
        (NatPartition::Discrete, NatPartition::Finite { .. }) => {
            // a validated finite descriptor has an infinite cell, which
            // is not a union of singletons' worth of cells — it IS a
            // single non-singleton cell, so the discrete partition is
            // never below it
            Ok(false)
        }
        (NatPartition::Finite { .. }, NatPartition::Finite { .. }) => {
            let (t1, m1) = coarse.window_params();
            let (t2, m2) = fine.window_params();
            let modulus = lcm(m1, m2);
            if modulus > MODULUS_CAP {
                return Err(PartitionError::WindowTooLarge(modulus));
            }
            let end = t1.max(t2) + modulus;
            let coarse_at = coarse.assign_cells(end)?;
            let fine_at = fine.assign_cells(end)?;
            let fine_cells = fine.cell_count().unwrap();
            Ok(consistent_refinement(&coarse_at, &fine_at, fine_cells))
        }
    }
}

/// The window test shared by [`refines_leq`] and the batched
/// certificate path: the fine cell classes must refine the coarse ones.
/// Valid on any window at least as long as the joint periodic one.
fn consistent_refinement(coarse_at: &[usize], fine_at: &[usize], fine_cells: usize) -> bool {
    let mut image: Vec<Option<usize>> = vec![None; fine_cells];
    for (c, f) in coarse_at.iter().zip(fine_at) {
        match image[*f] {
            None => image[*f] = Some(*c),
            Some(seen) if seen == *c => {}
            Some(_) => return false,
        }
    }
    true
}

pub fn partition_eq(a: &NatPartition, b: &NatPartition) -> Result<bool, PartitionError> {
    Ok(refines_leq(a, b)? && refines_leq(b, a)?)
}

/// A registered infinite directed family: the initial-segment chain
/// indexed by all of ℕ or a strided (hence cofinal) subset of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainFamily {
    /// `(V_j)` for all j ≥ 1.
    AllJ,
    /// `(V_{start + k·step})`, cofinal since step ≥ 1.
    Strided { start: u64, step: u64 },
    /// An explicit finite index list — never accepted as a chain.
    FiniteIndices(Vec<u64>),
}

impl ChainFamily {
    /// The smallest family index ≥ k, if the family is infinite.
    fn index_at_least(&self, k: u64) -> Option<u64> {
        match self {
            ChainFamily::AllJ => Some(k.max(1)),
            ChainFamily::Strided { start, step } => {
                if *step == 0 {
                    return None;
                }
                if k <= *start {
                    Some(*start)
                } else {
                    let t = (k - start).div_ceil(*step);
                    Some(start + t * step)
                }
            }
            ChainFamily::FiniteIndices(_) => None,
        }
    }
}

/// Supremum of the registered initial-segment chain: the all-singletons
/// partition. The closure rule — every singleton `{k}` is a cell of
/// `V_j` once `j ≥ k` — is spot-checked at finitely many k against the
/// actual descriptors before the symbolic answer is returned.
pub fn chain_sup(family: &ChainFamily) -> Result<NatPartition, PartitionError> {
    match family {
        ChainFamily::FiniteIndices(idx) => Err(PartitionError::UnsupportedFamily(format!(
            "finite index list {idx:?} is not the parametric chain"
        ))),
        ChainFamily::Strided { step: 0, .. } => Err(PartitionError::UnsupportedFamily(
            "zero stride is not cofinal".to_string(),
        )),
        _ => {
            for k in 1..=16 {
                let j = family.index_at_least(k).ok_or_else(|| {
                    PartitionError::UnsupportedFamily("family is not cofinal".to_string())
                })?;
                let vj = NatPartition::vj(j);
                let NatPartition::Finite { cells } = &vj else {
                    unreachable!()
                };
                if !cells
                    .iter()
                    .any(|c| c.fin.len() == 1 && c.aps.is_empty() && c.contains(k))
                {
                    return Err(PartitionError::UnsupportedFamily(format!(
                        "singleton {{{k}}} missing from V_{j}"
                    )));
                }
            }
            Ok(NatPartition::Discrete)
        }
    }
}

/// Enumerates set partitions of `count` items as restricted growth
/// strings, calling `visit` with each assignment.
fn for_each_set_partition(count: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(
        assignment: &mut Vec<usize>,
        blocks: usize,
        count: usize,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if assignment.len() == count {
            visit(assignment);
            return;
        }
        for b in 0..=blocks {
            assignment.push(b);
            rec(assignment, blocks.max(b + 1), count, visit);
            assignment.pop();
        }
    }
    rec(&mut Vec::with_capacity(count), 0, count, &mut visit);
}

/// All partitions strictly coarser than `v` expressible with at most as
/// many cells — the merges of its cells, the identity excluded.
pub fn strictly_below(v: &NatPartition) -> Result<Vec<NatPartition>, PartitionError> {
    let NatPartition::Finite { cells } = v else {
        return Err(PartitionError::UnsupportedFamily(
            "cannot enumerate coarsenings of the discrete partition".to_string(),
        ));
    };
    if cells.len() > STRICTLY_BELOW_CAP {
        return Err(PartitionError::TooManyCells {
            cells: cells.len(),
            cap: STRICTLY_BELOW_CAP,
        });
    }
    let mut out = Vec::new();
    for_each_set_partition(cells.len(), |assignment| {
        let blocks = assignment.iter().max().map_or(0, |m| m + 1);
        if blocks == cells.len() {
            return; // the identity coarsening is not strict
        }
        let mut merged: Vec<Option<Cell>> = vec![None; blocks];
        for (cell, &block) in cells.iter().zip(assignment) {
            merged[block] = Some(match merged[block].take() {
                None => cell.clone(),
                Some(acc) => acc.union(cell),
            });
        }
        out.push(NatPartition::Finite {
            cells: merged.into_iter().map(Option::unwrap).collect(),
        });
    });
    // deterministic order: fewer cells first, then structural
    out.sort_by_key(|p| {
        (
            p.cell_count().unwrap_or(usize::MAX),
            serde_json::to_string(p).unwrap(),
        )
    });
    for p in &out {
        p.validate()?;
    }
    Ok(out)
}

/// One checked part of the non-continuity certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessPart {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// The machine-checked witness that the context poset of the diagonal
/// algebra is not continuous: the initial-segment chain is directed and
/// joins to the maximal context, which dominates the even/odd atom —
/// yet no chain member does, so the atom is not way below itself, and
/// since only the trivial algebra lies strictly below it, the directed
/// supremum of its approximants is the bottom, not the atom.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub bound: u64,
    pub parts: Vec<WitnessPart>,
}

impl WitnessCertificate {
    pub fn passed(&self) -> bool {
        self.parts.iter().all(|p| p.passed)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("non-continuity witness, chain bound {}\n", self.bound);
        for part in &self.parts {
            out.push_str(&format!(
                "  [{}] {}: {}\n",
                if part.passed { "pass" } else { "FAIL" },
                part.name,
                part.detail
            ));
        }
        out.push_str(if self.passed() {
            "verdict: the atom is not way below itself; the poset is not continuous\n"
        } else {
            "verdict: witness did not check out\n"
        });
        out
    }
}

/// Runs the four-part certificate for a candidate atom (the even/odd
/// partition by default) against the chain `V_1 ⊑ … ⊑ V_bound`.
pub fn non_continuity_witness(
    bound: u64,
    atom: &NatPartition,
) -> Result<WitnessCertificate, PartitionError> {
    assert!(bound >= 2, "the witness needs at least two chain members");
    atom.validate()?;
    let mut parts = Vec::new();

    // (i) the chain is directed: pairwise, the smaller index refines
    // up. Cell assignments are computed once on a window shared by all
    // pairs (a longer window than each pair needs is still sound).
    let end = bound + 3;
    let mut assignments = Vec::with_capacity(bound as usize);
    for j in 1..=bound {
        assignments.push(NatPartition::vj(j).assign_cells(end)?);
    }
    let mut directed = true;
    let mut directed_detail = format!("V_i ⊑ V_j for all i ≤ j ≤ {bound}");
    'outer: for i in 1..=bound as usize {
        for j in i..=bound as usize {
            // vj(j) has j + 1 cells
            if !consistent_refinement(&assignments[i - 1], &assignments[j - 1], j + 1) {
                directed = false;
                directed_detail = format!("V_{i} ⋢ V_{j}");
                break 'outer;
            }
        }
    }
    parts.push(WitnessPart {
        name: "chain-directed".to_string(),
        passed: directed,
        detail: directed_detail,
    });

    // (ii) the chain join is the maximal context and dominates the atom
    let sup = chain_sup(&ChainFamily::AllJ)?;
    let sup_is_vm = partition_eq(&sup, &NatPartition::Discrete)?;
    let atom_below_sup = refines_leq(atom, &sup)?;
    parts.push(WitnessPart {
        name: "chain-sup-dominates-atom".to_string(),
        passed: sup_is_vm && atom_below_sup,
        detail: format!("⊔V_j = V_m: {sup_is_vm}; atom ⊑ V_m: {atom_below_sup}"),
    });

    // (iii) no chain member contains the atom
    let mut escapes = true;
    let mut escape_detail = format!("atom ⋢ V_j for every j ≤ {bound}");
    for j in 1..=bound {
        if refines_leq(atom, &NatPartition::vj(j))? {
            escapes = false;
            escape_detail = format!("atom ⊑ V_{j} (first failing j = {j})");
            break;
        }
    }
    parts.push(WitnessPart {
        name: "atom-escapes-chain".to_string(),
        passed: escapes,
        detail: escape_detail,
    });

    // (iv) only the bottom lies strictly below the atom, so the
    // supremum of the atom's approximants is the bottom, not the atom
    let below = strictly_below(atom)?;
    let only_bottom = below.len() == 1 && below[0].is_bottom();
    let not_bottom = !atom.is_bottom();
    parts.push(WitnessPart {
        name: "atom-is-atom".to_string(),
        passed: only_bottom && not_bottom,
        detail: if only_bottom && not_bottom {
            "strictly below the atom: exactly the trivial algebra; ⊔↡atom = ⊥ ≠ atom".to_string()
        } else {
            format!(
                "strict coarsenings: {} (bottom only: {only_bottom}), atom ≠ ⊥: {not_bottom}",
                below.len()
            )
        },
    });

    Ok(WitnessCertificate { bound, parts })
}

/// Truncation of a descriptor partition to the first `dim` naturals, as
/// 0-based index cells. This is the bridge to diagonal matrix contexts:
/// the cells become supports of diagonal projections.
pub fn truncate_cells(v: &NatPartition, dim: usize) -> Vec<Vec<usize>> {
    let assignment = v
        .assign_cells(dim as u64)
        .expect("validated partitions assign every natural");
    let cell_count = assignment.iter().max().map_or(0, |m| m + 1);
    let mut cells = vec![Vec::new(); cell_count];
    for (idx, &cell) in assignment.iter().enumerate() {
        cells[cell].push(idx);
    }
    cells.retain(|c| !c.is_empty());
    cells
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_partitions_are_well_formed() {
        for p in [
            NatPartition::ve(),
            NatPartition::vj(1),
            NatPartition::vj(2),
            NatPartition::vj(7),
            NatPartition::bottom(),
            NatPartition::Discrete,
        ] {
            p.validate().unwrap();
        }
        let NatPartition::Finite { cells } = NatPartition::vj(2) else {
            unreachable!()
        };
        assert_eq!(cells.len(), 3);
        assert!(cells[0].contains(1) && !cells[0].contains(2));
        assert!(cells[2].contains(3) && cells[2].contains(100));
    }

    #[test]
    fn malformed_cells_are_rejected() {
        // overlap: both cells contain 2
        let overlapping = make_context(ContextKind::Custom(vec![
            Cell::progression(2, 2),
            Cell::progression(1, 1),
        ]));
        assert!(matches!(
            overlapping,
            Err(PartitionError::MalformedCells(_))
        ));
        // gap: nothing contains 1
        let gappy = make_context(ContextKind::Custom(vec![Cell::progression(2, 1)]));
        assert!(matches!(gappy, Err(PartitionError::MalformedCells(_))));
    }

    #[test]
    fn refinement_examples() {
        let ve = NatPartition::ve();
        assert!(refines_leq(&ve, &NatPartition::Discrete).unwrap());
        for j in 1..=12 {
            assert!(
                !refines_leq(&ve, &NatPartition::vj(j)).unwrap(),
                "the even/odd split must escape V_{j}"
            );
        }
        let bottom = NatPartition::bottom();
        for v in [&ve, &NatPartition::vj(3), &NatPartition::Discrete, &bottom] {
            assert!(refines_leq(&bottom, v).unwrap());
        }
        // discrete is only below itself
        assert!(!refines_leq(&NatPartition::Discrete, &ve).unwrap());
        assert!(refines_leq(&NatPartition::Discrete, &NatPartition::Discrete).unwrap());
        // chain refinement
        assert!(refines_leq(&NatPartition::vj(2), &NatPartition::vj(5)).unwrap());
        assert!(!refines_leq(&NatPartition::vj(5), &NatPartition::vj(2)).unwrap());
    }

    #[test]
    fn refinement_is_a_partial_order_on_samples() {
        let samples = vec![
            NatPartition::bottom(),
            NatPartition::ve(),
            NatPartition::vj(1),
            NatPartition::vj(2),
            NatPartition::vj(4),
            NatPartition::Discrete,
            make_context(ContextKind::Custom(vec![
                Cell {
                    aps: vec![(3, 3)],
                    fin: BTreeSet::new(),
                }, // 3,6,9,…
                Cell {
                    aps: vec![(1, 3), (2, 3)],
                    fin: BTreeSet::new(),
                }, // the rest
            ]))
            .unwrap(),
        ];
        for a in &samples {
            assert!(refines_leq(a, a).unwrap(), "reflexive");
        }
        for a in &samples {
            for b in &samples {
                for c in &samples {
                    if refines_leq(a, b).unwrap() && refines_leq(b, c).unwrap() {
                        assert!(refines_leq(a, c).unwrap(), "transitive");
                    }
                }
                if refines_leq(a, b).unwrap() && refines_leq(b, a).unwrap() {
                    assert!(partition_eq(a, b).unwrap(), "antisymmetric up to equality");
                }
            }
        }
    }

    #[test]
    fn chain_sup_accepts_cofinal_families_only() {
        assert_eq!(
            chain_sup(&ChainFamily::AllJ).unwrap(),
            NatPartition::Discrete
        );
        assert_eq!(
            chain_sup(&ChainFamily::Strided { start: 2, step: 2 }).unwrap(),
            NatPartition::Discrete
        );
        assert!(matches!(
            chain_sup(&ChainFamily::FiniteIndices(vec![5])),
            Err(PartitionError::UnsupportedFamily(_))
        ));
        assert!(matches!(
            chain_sup(&ChainFamily::Strided { start: 3, step: 0 }),
            Err(PartitionError::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn strictly_below_examples() {
        let below_ve = strictly_below(&NatPartition::ve()).unwrap();
        assert_eq!(below_ve.len(), 1);
        assert!(below_ve[0].is_bottom());

        assert!(strictly_below(&NatPartition::bottom()).unwrap().is_empty());

        // three cells merge in 4 strict ways: 3 pair-merges + bottom
        let below_vj2 = strictly_below(&NatPartition::vj(2)).unwrap();
        assert_eq!(below_vj2.len(), 4);
        assert!(below_vj2[0].is_bottom());
        assert!(below_vj2[1..].iter().all(|p| p.cell_count() == Some(2)));
        for p in &below_vj2 {
            assert!(refines_leq(p, &NatPartition::vj(2)).unwrap());
            assert!(!partition_eq(p, &NatPartition::vj(2)).unwrap());
        }

        assert!(matches!(
            strictly_below(&NatPartition::Discrete),
            Err(PartitionError::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn witness_passes_at_small_and_large_bounds() {
        for bound in [2, 16, 128] {
            let cert = non_continuity_witness(bound, &NatPartition::ve()).unwrap();
            assert!(cert.passed(), "bound {bound}: {:?}", cert.parts);
            assert_eq!(cert.parts.len(), 4);
        }
    }

    #[test]
    fn witness_rejects_mutants_with_a_named_part() {
        // a mutant atom that IS a chain member fails part (iii) at j = 1
        let mutant = NatPartition::vj(1);
        let cert = non_continuity_witness(8, &mutant).unwrap();
        assert!(!cert.passed());
        let part = cert.parts.iter().find(|p| !p.passed).unwrap();
        assert_eq!(part.name, "atom-escapes-chain");
        assert!(part.detail.contains("j = 1"), "{}", part.detail);

        // a finite initial cell {1,2} is swallowed by V_2
        let finite_cell = make_context(ContextKind::Custom(vec![
            Cell {
                aps: vec![],
                fin: [1, 2].into_iter().collect(),
            },
            Cell::progression(3, 1),
        ]))
        .unwrap();
        let cert2 = non_continuity_witness(8, &finite_cell).unwrap();
        assert!(!cert2.passed());
        assert_eq!(
            cert2.parts.iter().find(|p| !p.passed).unwrap().name,
            "atom-escapes-chain"
        );

        // a three-cell atom is no atom: part (iv) reports extra coarsenings
        let three_cells = make_context(ContextKind::Custom(vec![
            Cell::progression(3, 3),
            Cell::progression(1, 3),
            Cell::progression(2, 3),
        ]))
        .unwrap();
        let cert3 = non_continuity_witness(8, &three_cells).unwrap();
        assert!(!cert3.passed());
        assert_eq!(
            cert3.parts.iter().find(|p| !p.passed).unwrap().name,
            "atom-is-atom"
        );

        // the bottom sits inside every chain member and is no atom:
        // parts (iii) and (iv) both fail
        let cert4 = non_continuity_witness(8, &NatPartition::bottom()).unwrap();
        assert!(!cert4.passed());
        let failing: Vec<&str> = cert4
            .parts
            .iter()
            .filter(|p| !p.passed)
            .map(|p| p.name.as_str())
            .collect();
        assert_eq!(failing, vec!["atom-escapes-chain", "atom-is-atom"]);
    }

    #[test]
    fn witness_is_monotone_in_the_bound() {
        let big = non_continuity_witness(64, &NatPartition::ve()).unwrap();
        assert!(big.passed());
        for bound in [2, 4, 8, 16, 32] {
            assert!(non_continuity_witness(bound, &NatPartition::ve())
                .unwrap()
                .passed());
        }
    }

    #[test]
    fn truncation_produces_partition_cells() {
        let cells = truncate_cells(&NatPartition::vj(2), 5);
        assert_eq!(cells, vec![vec![0], vec![1], vec![2, 3, 4]]);
        let ve_cells = truncate_cells(&NatPartition::ve(), 4);
        assert_eq!(ve_cells, vec![vec![1, 3], vec![0, 2]]);
        let bottom_cells = truncate_cells(&NatPartition::bottom(), 3);
        assert_eq!(bottom_cells, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn descriptor_json_round_trip() {
        let ve = NatPartition::ve();
        let json = serde_json::to_string(&ve).unwrap();
        assert!(json.contains("\"kind\":\"finite\""));
        let back: NatPartition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ve);
        let discrete: NatPartition = serde_json::from_str(r#"{"kind":"discrete"}"#).unwrap();
        assert_eq!(discrete, NatPartition::Discrete);
        // the documented shape parses
        let doc: NatPartition = serde_json::from_str(
            r#"{"kind": "finite", "cells": [{"aps": [[2,2]], "fin": []}, {"aps": [[1,2]], "fin": []}]}"#,
        )
        .unwrap();
        assert!(partition_eq(&doc, &ve).unwrap());
    }
}
