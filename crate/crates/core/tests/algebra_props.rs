//! Property tests for the universal-algebra engine on randomized
//! finite algebras.

use proptest::prelude::*;

use unsharp_core::algebra::{
    enumerate_subalgebras, samples, satisfies, FiniteAlgebra, Signature, DEFAULT_VALUATION_CAP,
};

/// A random algebra with one constant, one unary and one binary table.
fn small_algebra() -> impl Strategy<Value = FiniteAlgebra> {
    (2usize..=5).prop_flat_map(|n| {
        let unary = prop::collection::vec(0..n, n);
        let binary = prop::collection::vec(0..n, n * n);
        let constant = 0..n;
        (Just(n), constant, unary, binary).prop_map(|(n, c, u, b)| {
            let signature = Signature {
                symbols: vec![
                    ("c".to_string(), 0),
                    ("u".to_string(), 1),
                    ("b".to_string(), 2),
                ],
            };
            FiniteAlgebra::new(
                n,
                signature,
                vec![
                    ("c".to_string(), vec![c]),
                    ("u".to_string(), u),
                    ("b".to_string(), b),
                ],
            )
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Generation is a closure operator: extensive, monotone, idempotent.
    #[test]
    fn generate_is_a_closure_operator(a in small_algebra(), g in any::<u64>(), h in any::<u64>()) {
        let full = a.full_mask();
        let g = g & full;
        let h = h & full & g; // h ⊆ g
        let cg = a.generate(g);
        prop_assert_eq!(cg & g, g, "extensive");
        prop_assert_eq!(a.generate(cg), cg, "idempotent");
        let ch = a.generate(h);
        prop_assert_eq!(ch & cg, ch, "monotone");
        prop_assert!(a.is_closed(cg));
    }

    /// The two enumeration routes agree, and the lattice structure
    /// holds: meets are intersections, directed joins are unions.
    #[test]
    fn enumeration_routes_agree(a in small_algebra()) {
        let brute = a.subalgebras_brute_force().unwrap();
        let grown = a.subalgebras_generated(100_000).unwrap();
        prop_assert_eq!(&brute, &grown);
        let lattice = enumerate_subalgebras(&a).unwrap();
        for &x in &lattice.sets {
            for &y in &lattice.sets {
                prop_assert!(brute.contains(&lattice.meet(x, y)));
                let join = lattice.join(&a, x, y);
                prop_assert!(brute.contains(&join));
                if x & y == x || x & y == y {
                    prop_assert_eq!(join, x | y, "directed joins are unions");
                }
            }
        }
    }

    /// Satisfaction is downward closed over subalgebras.
    #[test]
    fn satisfaction_is_downward_closed(a in small_algebra()) {
        let comm = {
            // reuse the commutativity shape over this signature's binary op
            use unsharp_core::algebra::{Equation, Term};
            Equation {
                lhs: Term::App("b".into(), vec![Term::Var("x".into()), Term::Var("y".into())]),
                rhs: Term::App("b".into(), vec![Term::Var("y".into()), Term::Var("x".into())]),
                vars: vec!["x".into(), "y".into()],
            }
        };
        let lattice = enumerate_subalgebras(&a).unwrap();
        for &big in &lattice.sets {
            if satisfies(&a, big, &comm, DEFAULT_VALUATION_CAP).unwrap() {
                for &small in &lattice.sets {
                    if small & big == small {
                        prop_assert!(satisfies(&a, small, &comm, DEFAULT_VALUATION_CAP).unwrap());
                    }
                }
            }
        }
    }
}

/// The valuation cap is enforced rather than silently truncated.
#[test]
fn valuation_cap_is_honest() {
    use unsharp_core::algebra::{Equation, Term};
    let z6 = samples::cyclic_group(6);
    let vars: Vec<String> = (0..9).map(|i| format!("x{i}")).collect();
    let wide = Equation {
        lhs: Term::Var("x0".into()),
        rhs: Term::Var("x0".into()),
        vars,
    };
    // 6^9 > 10^6
    let err = satisfies(&z6, z6.full_mask(), &wide, 1_000_000).unwrap_err();
    assert!(err.to_string().contains("cap"));
}
