//! Finite posets and definitional domain-property checks.
//!
//! Every check in this module is implemented by exhaustive enumeration
//! straight from the definitions: directed subsets are enumerated as
//! subsets, suprema are found by scanning for least upper bounds, and
//! the way-below relation quantifies over all directed subsets. The
//! point is to have an oracle that other modules can be validated
//! against, so nothing here takes the finite-poset shortcuts (such as
//! "way-below equals the order") that the checks themselves are used
//! to certify.
//!
//! Posets are stored fully reflexive-transitively closed, which makes
//! `leq` a constant-time bit test. Elements carry string labels; the
//! lexicographic label order is used only to make output deterministic,
//! never for order semantics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard representation cap: element sets are stored as `u64` bitmasks.
pub const MAX_ELEMENTS: usize = 64;

/// Default cap for the definitional way-below enumeration (2^|P| subsets).
pub const DEFAULT_WAY_BELOW_CAP: usize = 20;

/// Default cap for the exhaustive [`DomainReport`] checks.
pub const DEFAULT_REPORT_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("antisymmetry violated: {0:?} and {1:?} lie on a cycle")]
    Cycle(String, String),
    #[error("poset has {size} elements, exceeding the cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
    #[error("subset is not directed")]
    NotDirected,
    #[error("map is not total: no image for {0:?}")]
    PartialMap(String),
}

/// A finite partial order, stored as the full closed relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    /// `up[i]` is the bitmask of all `j` with `i ⊑ j` (includes `i`).
    up: Vec<u64>,
}

/// JSON form: generating edges, closure implied.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    pub leq: Vec<(String, String)>,
}

impl FinitePoset {
    /// Builds a poset from distinct labels and arbitrary generating
    /// edges. Computes the reflexive-transitive closure and rejects
    /// inputs whose closure violates antisymmetry.
    pub fn validate(
        elements: &[String],
        raw_relation: &[(String, String)],
    ) -> Result<Self, PosetError> {
        if elements.len() > MAX_ELEMENTS {
            return Err(PosetError::SizeCapExceeded {
                size: elements.len(),
                cap: MAX_ELEMENTS,
            });
        }
        let mut labels = elements.to_vec();
        labels.sort();
        for w in labels.windows(2) {
            if w[0] == w[1] {
                return Err(PosetError::DuplicateLabel(w[0].clone()));
            }
        }
        let index: BTreeMap<String, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let n = labels.len();
        let mut up = vec![0u64; n];
        for (i, row) in up.iter_mut().enumerate() {
            *row = 1 << i;
        }
        for (a, b) in raw_relation {
            let i = *index
                .get(a)
                .ok_or_else(|| PosetError::UnknownLabel(a.clone()))?;
            let j = *index
                .get(b)
                .ok_or_else(|| PosetError::UnknownLabel(b.clone()))?;
            up[i] |= 1 << j;
        }
        // Warshall closure on the up-masks.
        for k in 0..n {
            for i in 0..n {
                if up[i] & (1 << k) != 0 {
                    up[i] |= up[k];
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if up[i] & (1 << j) != 0 && up[j] & (1 << i) != 0 {
                    return Err(PosetError::Cycle(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        Ok(FinitePoset { labels, index, up })
    }

    pub fn from_json(json: &PosetJson) -> Result<Self, PosetError> {
        Self::validate(&json.elements, &json.leq)
    }

    pub fn to_json(&self) -> PosetJson {
        PosetJson {
            elements: self.labels.clone(),
            leq: self
                .strict_pairs()
                .map(|(i, j)| (self.labels[i].clone(), self.labels[j].clone()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize, PosetError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| PosetError::UnknownLabel(label.to_string()))
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.up[i] & (1 << j) != 0
    }

    pub fn leq(&self, a: &str, b: &str) -> Result<bool, PosetError> {
        Ok(self.leq_idx(self.index_of(a)?, self.index_of(b)?))
    }

    /// Bitmask of everything above `i` (inclusive).
    pub fn up_mask(&self, i: usize) -> u64 {
        self.up[i]
    }

    /// Bitmask of everything below `i` (inclusive).
    pub fn down_mask(&self, i: usize) -> u64 {
        let mut m = 0u64;
        for j in 0..self.len() {
            if self.leq_idx(j, i) {
                m |= 1 << j;
            }
        }
        m
    }

    fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| {
            (0..n).filter_map(move |j| (i != j && self.leq_idx(i, j)).then_some((i, j)))
        })
    }

    pub fn mask_of(&self, subset: &[String]) -> Result<u64, PosetError> {
        let mut m = 0u64;
        for l in subset {
            m |= 1 << self.index_of(l)?;
        }
        Ok(m)
    }

    pub fn labels_of(&self, mask: u64) -> Vec<String> {
        self.iter_mask(mask)
            .map(|i| self.labels[i].clone())
            .collect()
    }

    pub fn iter_mask(&self, mask: u64) -> impl Iterator<Item = usize> + '_ {
        let n = self.len();
        (0..n).filter(move |i| mask & (1 << i) != 0)
    }

    /// Directedness per the definition: nonempty, and every pair has an
    /// upper bound inside the subset.
    pub fn is_directed_mask(&self, s: u64) -> bool {
        if s == 0 {
            return false;
        }
        let idx: Vec<usize> = self.iter_mask(s).collect();
        for (k, &i) in idx.iter().enumerate() {
            for &j in &idx[k..] {
                if self.up[i] & self.up[j] & s == 0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_directed(&self, subset: &[String]) -> Result<bool, PosetError> {
        Ok(self.is_directed_mask(self.mask_of(subset)?))
    }

    /// Least upper bound of an arbitrary subset, if one exists.
    /// The empty set's upper bounds are all elements, so its least
    /// upper bound is the bottom element when there is one.
    pub fn lub_mask(&self, s: u64) -> Option<usize> {
        let mut ubs = self.full_mask();
        for i in self.iter_mask(s) {
            ubs &= self.up[i];
        }
        self.least_of(ubs)
    }

    /// Greatest lower bound of an arbitrary subset, if one exists.
    pub fn glb_mask(&self, s: u64) -> Option<usize> {
        let mut lbs = self.full_mask();
        for i in self.iter_mask(s) {
            lbs &= self.down_mask(i);
        }
        self.greatest_of(lbs)
    }

    /// The element of `mask` below all of `mask`, if any.
    fn least_of(&self, mask: u64) -> Option<usize> {
        self.iter_mask(mask)
            .find(|&u| self.iter_mask(mask).all(|v| self.leq_idx(u, v)))
    }

    fn greatest_of(&self, mask: u64) -> Option<usize> {
        self.iter_mask(mask)
            .find(|&u| self.iter_mask(mask).all(|v| self.leq_idx(v, u)))
    }

    /// Supremum of a directed subset. In a finite poset this is the
    /// maximum element of the subset, but it is computed as a least
    /// upper bound and cross-checked.
    pub fn directed_sup_mask(&self, s: u64) -> Result<usize, PosetError> {
        if !self.is_directed_mask(s) {
            return Err(PosetError::NotDirected);
        }
        let lub = self.lub_mask(s).ok_or(PosetError::NotDirected)?;
        debug_assert!(
            s & (1 << lub) != 0,
            "finite directed set must contain its supremum"
        );
        Ok(lub)
    }

    pub fn directed_sup(&self, subset: &[String]) -> Result<String, PosetError> {
        let m = self.mask_of(subset)?;
        Ok(self.labels[self.directed_sup_mask(m)?].clone())
    }

    fn check_cap(&self, cap: usize) -> Result<(), PosetError> {
        if self.len() > cap {
            return Err(PosetError::SizeCapExceeded {
                size: self.len(),
                cap,
            });
        }
        Ok(())
    }

    /// The full way-below relation, computed definitionally: `x ≪ y`
    /// iff every directed subset whose supremum dominates `y` contains
    /// an element dominating `x`. Quantifies over all 2^|P| subsets.
    ///
    /// Returns `ww` with `ww[y]` the bitmask of all `x ≪ y`.
    pub fn way_below_relation(&self, cap: usize) -> Result<Vec<u64>, PosetError> {
        self.check_cap(cap)?;
        let n = self.len();
        let full = self.full_mask();
        let mut ww = vec![full; n];
        for s in 1..=full {
            if !self.is_directed_mask(s) {
                continue;
            }
            let Some(sup) = self.lub_mask(s) else {
                continue;
            };
            // cover = everything dominated by some member of S
            let mut cover = 0u64;
            for i in self.iter_mask(s) {
                cover |= self.down_mask(i);
            }
            for y in 0..n {
                if self.leq_idx(y, sup) {
                    ww[y] &= cover;
                }
            }
        }
        Ok(ww)
    }

    pub fn way_below(&self, x: &str, y: &str, cap: usize) -> Result<bool, PosetError> {
        let xi = self.index_of(x)?;
        let yi = self.index_of(y)?;
        let ww = self.way_below_relation(cap)?;
        Ok(ww[yi] & (1 << xi) != 0)
    }

    /// Restriction to the elements in `mask`, preserving labels.
    pub fn restrict(&self, mask: u64) -> FinitePoset {
        let keep: Vec<usize> = self.iter_mask(mask).collect();
        let labels: Vec<String> = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let mut up = vec![0u64; keep.len()];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                if self.leq_idx(i, j) {
                    up[a] |= 1 << b;
                }
            }
        }
        FinitePoset { labels, index, up }
    }

    /// Every subset has a least upper bound (hence also all infima).
    fn is_complete_lattice(&self) -> bool {
        let full = self.full_mask();
        // 0..=full includes the empty set, whose lub is a bottom element.
        (0..=full).all(|s| self.lub_mask(s).is_some())
    }

    /// Exhaustive domain-property report. Each flag is computed from its
    /// definition by iterating over all subsets; `cap` bounds |P|.
    pub fn domain_report(&self, cap: usize) -> Result<DomainReport, PosetError> {
        self.check_cap(cap)?;
        let n = self.len();
        let full = self.full_mask();
        let ww = self.way_below_relation(cap)?;

        let mut is_dcpo = true;
        let mut is_bounded_complete = true;
        let mut is_finitely_bounded_complete = true;
        let mut is_almost_bounded_complete = true;
        for s in 0..=full {
            let has_ub = (0..n).any(|u| self.iter_mask(s).all(|i| self.leq_idx(i, u)));
            let has_lub = self.lub_mask(s).is_some();
            if self.is_directed_mask(s) && !has_lub {
                is_dcpo = false;
            }
            if has_ub && !has_lub {
                is_bounded_complete = false;
                // every subset of a finite poset is finite
                is_finitely_bounded_complete = false;
                if s != 0 {
                    is_almost_bounded_complete = false;
                }
            }
        }

        let compact: u64 = (0..n)
            .filter(|&x| ww[x] & (1 << x) != 0)
            .map(|x| 1 << x)
            .fold(0, |a, b| a | b);

        // Continuity: ↡y is directed with supremum y, for every y.
        let continuous_at = |y: usize, approx: u64| -> bool {
            self.is_directed_mask(approx) && self.lub_mask(approx) == Some(y)
        };
        let is_continuous = (0..n).all(|y| continuous_at(y, ww[y]));
        let is_algebraic = (0..n).all(|y| continuous_at(y, ww[y] & compact));

        let is_complete_lattice = self.is_complete_lattice();

        // L-domain: a domain in which each principal ideal is a complete lattice.
        let is_l_domain = is_dcpo
            && is_continuous
            && (0..n).all(|x| self.restrict(self.down_mask(x)).is_complete_lattice());

        Ok(DomainReport {
            is_dcpo,
            compact_elements: self.labels_of(compact).into_iter().collect(),
            is_continuous,
            is_algebraic,
            is_bounded_complete,
            is_finitely_bounded_complete,
            is_almost_bounded_complete,
            is_complete_lattice,
            is_l_domain,
            way_below: (0..n)
                .flat_map(|y| {
                    let ww_y = ww[y];
                    (0..n).filter_map(move |x| (ww_y & (1 << x) != 0).then_some((x, y)))
                })
                .map(|(x, y)| (self.labels[x].clone(), self.labels[y].clone()))
                .collect(),
        })
    }

    /// Scott-openness of a subset: an upper set that no directed
    /// supremum enters from outside. Both conditions are checked
    /// definitionally (so the subset enumeration cap applies); on
    /// finite posets the second is implied by the first.
    pub fn is_scott_open(&self, subset: &[String]) -> Result<bool, PosetError> {
        self.check_cap(DEFAULT_WAY_BELOW_CAP)?;
        let g = self.mask_of(subset)?;
        let full = self.full_mask();
        let upper = self.iter_mask(g).all(|x| self.up[x] & full & !g == 0);
        let mut inaccessible = true;
        for s in 1..=full {
            if !self.is_directed_mask(s) {
                continue;
            }
            if let Some(sup) = self.lub_mask(s) {
                if g & (1 << sup) != 0 && s & g == 0 {
                    inaccessible = false;
                    break;
                }
            }
        }
        Ok(upper && inaccessible)
    }

    /// Hasse diagram edges (transitive reduction of the strict order).
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq_idx(i, j) {
                    continue;
                }
                let covered =
                    (0..n).any(|k| k != i && k != j && self.leq_idx(i, k) && self.leq_idx(k, j));
                if !covered {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    /// DOT output of the Hasse diagram, deterministic node order.
    /// `tooltips` may attach extra per-label text.
    pub fn to_dot(&self, name: &str, tooltips: Option<&BTreeMap<String, String>>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph {} {{", sanitize_dot_id(name));
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=box];");
        for l in &self.labels {
            let tip = tooltips.and_then(|t| t.get(l));
            match tip {
                Some(t) => {
                    let _ = writeln!(
                        out,
                        "  {} [label=\"{}\" tooltip=\"{}\"];",
                        sanitize_dot_id(l),
                        escape_dot(l),
                        escape_dot(t)
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "  {} [label=\"{}\"];",
                        sanitize_dot_id(l),
                        escape_dot(l)
                    );
                }
            }
        }
        for (i, j) in self.hasse_edges() {
            let _ = writeln!(
                out,
                "  {} -> {};",
                sanitize_dot_id(&self.labels[i]),
                sanitize_dot_id(&self.labels[j])
            );
        }
        out.push_str("}\n");
        out
    }
}

fn sanitize_dot_id(s: &str) -> String {
    let mut id: String = s
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if id.is_empty() || id.chars().next().unwrap().is_ascii_digit() {
        id.insert(0, 'n');
    }
    id
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The outcome of the exhaustive definitional checks on one poset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainReport {
    pub is_dcpo: bool,
    pub compact_elements: BTreeSet<String>,
    pub is_continuous: bool,
    pub is_algebraic: bool,
    pub is_bounded_complete: bool,
    pub is_finitely_bounded_complete: bool,
    pub is_almost_bounded_complete: bool,
    pub is_complete_lattice: bool,
    pub is_l_domain: bool,
    pub way_below: BTreeSet<(String, String)>,
}

/// A total map between finite posets.
#[derive(Debug, Clone)]
pub struct MonotoneMap<'a> {
    pub source: &'a FinitePoset,
    pub target: &'a FinitePoset,
    pub mapping: BTreeMap<String, String>,
}

impl<'a> MonotoneMap<'a> {
    /// Checks monotonicity and preservation of all directed suprema,
    /// both definitionally (the subset enumeration cap applies). On
    /// finite posets the two coincide; this is asserted rather than
    /// assumed.
    pub fn check(&self) -> Result<bool, PosetError> {
        self.source.check_cap(DEFAULT_WAY_BELOW_CAP)?;
        let n = self.source.len();
        let mut image = vec![0usize; n];
        for i in 0..n {
            let src = self.source.label(i);
            let tgt = self
                .mapping
                .get(src)
                .ok_or_else(|| PosetError::PartialMap(src.to_string()))?;
            image[i] = self.target.index_of(tgt)?;
        }
        let monotone = (0..n).all(|i| {
            (0..n).all(|j| !self.source.leq_idx(i, j) || self.target.leq_idx(image[i], image[j]))
        });
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut preserves = true;
        'outer: for s in 1..=full {
            if !self.source.is_directed_mask(s) {
                continue;
            }
            let Some(sup) = self.source.lub_mask(s) else {
                continue;
            };
            let mut image_mask = 0u64;
            for i in self.source.iter_mask(s) {
                image_mask |= 1 << image[i];
            }
            match self.target.lub_mask(image_mask) {
                Some(t) if t == image[sup] => {}
                _ => {
                    preserves = false;
                    break 'outer;
                }
            }
        }
        debug_assert_eq!(
            monotone,
            monotone && preserves,
            "on finite posets monotone maps preserve directed suprema"
        );
        Ok(monotone && preserves)
    }
}

/// Builders for the small posets used across tests and reports.
pub mod shapes {
    use super::FinitePoset;

    pub fn chain(labels: &[&str]) -> FinitePoset {
        let elements: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let edges: Vec<(String, String)> = labels
            .windows(2)
            .map(|w| (w[0].to_string(), w[1].to_string()))
            .collect();
        FinitePoset::validate(&elements, &edges).unwrap()
    }

    /// bot ⊑ a, b ⊑ top, a and b incomparable.
    pub fn diamond() -> FinitePoset {
        let elements: Vec<String> = ["bot", "a", "b", "top"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let edges = [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")]
            .iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect::<Vec<_>>();
        FinitePoset::validate(&elements, &edges).unwrap()
    }

    pub fn antichain(labels: &[&str]) -> FinitePoset {
        let elements: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        FinitePoset::validate(&elements, &[]).unwrap()
    }
}
