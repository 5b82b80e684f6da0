//! Property tests for the finite-poset engine: the way-below collapse,
//! Scott-open structure, and map checks on randomized posets.

use std::collections::BTreeMap;

use proptest::prelude::*;

use unsharp_core::poset::{FinitePoset, MonotoneMap, DEFAULT_REPORT_CAP, DEFAULT_WAY_BELOW_CAP};

/// Random poset on up to 7 elements: forward edges over a random
/// permutation keep the generating relation acyclic.
fn poset() -> impl Strategy<Value = FinitePoset> {
    (1usize..=7).prop_flat_map(|n| {
        let edges = prop::collection::vec(prop::bool::ANY, n * n);
        let perm = prop::collection::vec(0usize..100, n);
        (Just(n), edges, perm).prop_map(|(n, edge_bits, perm_keys)| {
            let labels: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&i| (perm_keys[i], i));
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if edge_bits[i * n + j] {
                        edges.push((labels[order[i]].clone(), labels[order[j]].clone()));
                    }
                }
            }
            FinitePoset::validate(&labels, &edges).unwrap()
        })
    })
}

fn subsets(n: usize) -> impl Iterator<Item = u64> {
    0..(1u64 << n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// On finite posets the way-below relation is the order itself, and
    /// the exhaustive report certifies an algebraic dcpo.
    #[test]
    fn way_below_collapses_to_leq(p in poset()) {
        let ww = p.way_below_relation(DEFAULT_WAY_BELOW_CAP).unwrap();
        for y in 0..p.len() {
            prop_assert_eq!(ww[y], p.down_mask(y));
        }
        let report = p.domain_report(DEFAULT_REPORT_CAP).unwrap();
        prop_assert!(report.is_dcpo);
        prop_assert!(report.is_continuous);
        prop_assert!(report.is_algebraic);
        prop_assert_eq!(report.compact_elements.len(), p.len());
        prop_assert_eq!(report.is_finitely_bounded_complete, report.is_bounded_complete);
    }

    /// On finite posets Scott-openness reduces to being an upper set,
    /// and complements are lower sets closed under directed suprema.
    #[test]
    fn scott_opens_are_upper_sets_with_closed_complements(p in poset()) {
        let n = p.len();
        for g in subsets(n) {
            let labels = p.labels_of(g);
            let open = p.is_scott_open(&labels).unwrap();
            let upper = p.iter_mask(g).all(|x| {
                (0..n).all(|y| !p.leq_idx(x, y) || g & (1 << y) != 0)
            });
            prop_assert_eq!(open, upper);
            if open {
                let complement = !g & ((1u64 << n) - 1);
                // lower set
                for x in p.iter_mask(complement) {
                    for y in 0..n {
                        if p.leq_idx(y, x) {
                            prop_assert!(complement & (1 << y) != 0);
                        }
                    }
                }
                // closed under directed suprema
                for s in subsets(n) {
                    if s != 0 && s & complement == s && p.is_directed_mask(s) {
                        let sup = p.directed_sup_mask(s).unwrap();
                        prop_assert!(complement & (1 << sup) != 0);
                    }
                }
            }
        }
    }

    /// Every Scott-open is a union of principal filters, and principal
    /// filters coincide with way-below filters here.
    #[test]
    fn scott_opens_are_unions_of_filters(p in poset()) {
        let n = p.len();
        let ww = p.way_below_relation(DEFAULT_WAY_BELOW_CAP).unwrap();
        for x in 0..n {
            // ⇑x = ↑x on finite posets
            let filter_up: u64 = (0..n).filter(|&y| p.leq_idx(x, y)).map(|y| 1 << y).sum();
            let filter_way: u64 =
                (0..n).filter(|&y| ww[y] & (1 << x) != 0).map(|y| 1 << y).sum();
            prop_assert_eq!(filter_up, filter_way);
        }
        for g in subsets(n) {
            if p.is_scott_open(&p.labels_of(g)).unwrap() {
                let mut union = 0u64;
                for x in p.iter_mask(g) {
                    union |= (0..n).filter(|&y| p.leq_idx(x, y)).map(|y| 1u64 << y).sum::<u64>();
                }
                prop_assert_eq!(union, g);
            }
        }
    }

    /// Indicator maps of upper sets into the two-chain are exactly the
    /// maps passing the monotonicity/continuity check.
    #[test]
    fn upper_set_indicators_are_continuous(p in poset(), bits in prop::collection::vec(prop::bool::ANY, 7)) {
        let chain = FinitePoset::validate(
            &["lo".into(), "hi".into()],
            &[("lo".into(), "hi".into())],
        ).unwrap();
        let n = p.len();
        let g: u64 = (0..n).filter(|&i| bits[i]).map(|i| 1u64 << i).sum();
        let mapping: BTreeMap<String, String> = (0..n)
            .map(|i| {
                let target = if g & (1 << i) != 0 { "hi" } else { "lo" };
                (p.label(i).to_string(), target.to_string())
            })
            .collect();
        let map = MonotoneMap { source: &p, target: &chain, mapping };
        let upper = p.iter_mask(g).all(|x| {
            (0..n).all(|y| !p.leq_idx(x, y) || g & (1 << y) != 0)
        });
        prop_assert_eq!(map.check().unwrap(), upper);
    }

    /// The finite-scale separation consequence: Scott-opens separate
    /// every pair of distinct points by disjoint opens exactly when the
    /// order is trivial. The smallest open around a point is its
    /// principal filter, so separation reduces to disjoint filters.
    #[test]
    fn scott_opens_separate_points_iff_order_trivial(p in poset()) {
        let n = p.len();
        let trivial = (0..n).all(|i| (0..n).all(|j| i == j || !p.leq_idx(i, j)));
        let separated = (0..n).all(|x| {
            (0..n).all(|y| {
                x == y || p.up_mask(x) & p.up_mask(y) == 0
            })
        });
        prop_assert_eq!(separated, trivial);
    }

    /// Directed subsets of a finite poset contain their own supremum.
    #[test]
    fn directed_sets_have_internal_maxima(p in poset()) {
        for s in subsets(p.len()) {
            if s != 0 && p.is_directed_mask(s) {
                let sup = p.directed_sup_mask(s).unwrap();
                prop_assert!(s & (1 << sup) != 0);
                for x in p.iter_mask(s) {
                    prop_assert!(p.leq_idx(x, sup));
                }
            }
        }
    }
}
