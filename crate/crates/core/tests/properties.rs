use mcsp_core::census::is_feasible_extension;
use mcsp_core::configurations::{
    build_inequalities, is_unique, output_configurations, Configuration, ConstraintSystem, PartialConfiguration,
};
use mcsp_core::feasibility::{strict_feasible_with, Route};
use mcsp_core::kernels::{maxplus_conv, mcsp_naive, minplus_conv, Sequence};
use mcsp_core::reductions::{conv_to_mcsp, covers_gadget_cells, decode_conv, mcsp_to_conv, recover_maxima};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = BigRational> {
    (-50i64..=50, 1i64..=9).prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

fn sequence(max_len: usize) -> impl Strategy<Value = Sequence> {
    prop::collection::vec(rational(), 1..=max_len).prop_map(|v| Sequence::new(v).unwrap())
}

fn pair(max_len: usize) -> impl Strategy<Value = (Sequence, Sequence)> {
    (1..=max_len).prop_flat_map(|len| {
        (prop::collection::vec(rational(), len), prop::collection::vec(rational(), len))
            .prop_map(|(x, y)| (Sequence::new(x).unwrap(), Sequence::new(y).unwrap()))
    })
}

/// Positions `p_i ∈ 1..=n-i+1`.
fn configuration(max_n: usize) -> impl Strategy<Value = Configuration> {
    (1..=max_n).prop_flat_map(|n| {
        (1..=n)
            .map(|i| 1..=n - i + 1)
            .collect::<Vec<_>>()
            .prop_map(|p| Configuration::new(p).unwrap())
    })
}

fn window(a: &Sequence, start: usize, len: usize) -> BigRational {
    a.as_slice()[start - 1..start - 1 + len].iter().sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn window_maxima_dominate(a in sequence(24)) {
        let prof = mcsp_naive(&a);
        let n = a.len();
        for len in 1..=n {
            let p = prof.position(len);
            prop_assert_eq!(&window(&a, p, len), prof.maximum(len));
            for j in 1..=n - len + 1 {
                let s = window(&a, j, len);
                prop_assert!(&s <= prof.maximum(len));
                if j < p {
                    prop_assert!(&s < prof.maximum(len), "smaller start also attains the maximum");
                }
            }
        }
    }

    #[test]
    fn minplus_is_symmetric((x, y) in pair(12)) {
        prop_assert_eq!(minplus_conv(&x, &y).unwrap(), minplus_conv(&y, &x).unwrap());
    }

    #[test]
    fn minplus_shifts_with_x((x, y) in pair(12), c in rational()) {
        let shifted = Sequence::new(x.iter().map(|v| v + &c).collect()).unwrap();
        let base = minplus_conv(&x, &y).unwrap();
        let moved = minplus_conv(&shifted, &y).unwrap();
        for (b, m) in base.z.iter().zip(&moved.z) {
            prop_assert_eq!(&(b + &c), m);
        }
    }

    #[test]
    fn maxplus_matches_direct_definition((x, y) in pair(10)) {
        let n = x.len() - 1;
        let z = maxplus_conv(&x, &y).unwrap();
        for k in 0..=2 * n {
            let best = (0..=n)
                .filter(|&i| k >= i && k - i <= n)
                .map(|i| &x.as_slice()[i] + &y.as_slice()[k - i])
                .max()
                .unwrap();
            prop_assert_eq!(&z.z[k], &best);
        }
    }

    #[test]
    fn conv_reduction_round_trips((x, y) in pair(14)) {
        let inst = conv_to_mcsp(&x, &y).unwrap();
        prop_assert_eq!(inst.a.len(), 2 * inst.n + 4);
        let prof = mcsp_naive(&inst.a);
        prop_assert!(covers_gadget_cells(&inst, &prof));
        prop_assert_eq!(decode_conv(&inst, &prof).unwrap(), minplus_conv(&x, &y).unwrap());
    }

    #[test]
    fn mcsp_reduction_round_trips(a in sequence(20)) {
        let inst = mcsp_to_conv(&a);
        let z = minplus_conv(&inst.x, &inst.y).unwrap();
        prop_assert_eq!(recover_maxima(&inst, &z).unwrap(), mcsp_naive(&a).maxima);
    }

    #[test]
    fn routes_agree_and_certify(
        dim in 1usize..=5,
        raw in prop::collection::vec(prop::collection::vec(-1i8..=1, 5), 1..=8),
    ) {
        let rows: Vec<Vec<i8>> = raw
            .into_iter()
            .map(|r| r[..dim].to_vec())
            .filter(|r| r.iter().any(|&c| c != 0))
            .collect();
        prop_assume!(!rows.is_empty());
        let system = ConstraintSystem::from_rows(dim, rows).unwrap();
        let alt = strict_feasible_with(&system, dim, Route::Alternative).unwrap();
        let primal = strict_feasible_with(&system, dim, Route::Primal).unwrap();
        prop_assert_eq!(alt.status, primal.status);
        for r in [&alt, &primal] {
            if let Some(w) = &r.witness {
                prop_assert!(system.is_satisfied_by(w));
            }
        }
    }

    #[test]
    fn unique_verdicts_carry_round_trip_witnesses(p in configuration(7)) {
        let v = is_unique(&p).unwrap();
        if v.unique {
            let w = v.witness_sequence().expect("unique verdicts carry a witness");
            prop_assert_eq!(output_configurations(&w).unwrap(), vec![p.clone()]);
        } else {
            prop_assert!(v.witness.is_none());
        }
        let violations = p.nonadjacency_violations();
        if !violations.is_empty() {
            prop_assert!(!v.unique);
            prop_assert_eq!(v.adjacent_pairs, violations);
        }
    }

    /// Any sequence with a single output configuration certifies that
    /// configuration as unique.
    #[test]
    fn generic_inputs_have_unique_configurations(
        v in prop::collection::vec(-1_000_000i64..=1_000_000, 1..=8),
    ) {
        let a = Sequence::from_integers(&v).unwrap();
        let configs = output_configurations(&a).unwrap();
        if configs.len() == 1 {
            prop_assert!(is_unique(&configs[0]).unwrap().unique);
        }
        prop_assert_eq!(&configs[0].positions().to_vec(), &mcsp_naive(&a).positions);
    }

    #[test]
    fn infeasible_prefixes_stay_infeasible(p in configuration(6), cut in 1usize..=6) {
        let n = p.n();
        let cut = cut.min(n.saturating_sub(1)).max(1);
        if cut >= n {
            return Ok(());
        }
        let mut system = ConstraintSystem::new(n);
        for i in 1..=cut {
            system.extend(build_inequalities(&p, i).unwrap()).unwrap();
        }
        let prefix_ok = strict_feasible_with(&system, n, Route::Alternative).unwrap().is_feasible();
        if !prefix_ok {
            let partial = PartialConfiguration::new(n, p.positions()[..cut].to_vec()).unwrap();
            for j in 1..=n - cut {
                prop_assert!(!is_feasible_extension(&partial, cut + 1, j).unwrap());
            }
        }
    }
}

#[test]
fn big_integer_entries_stay_exact() {
    let big = BigInt::from(10).pow(40);
    let x = Sequence::new(vec![BigRational::from_integer(big.clone()), BigRational::from_integer(-big)]).unwrap();
    let y = Sequence::from_integers(&[1, 2]).unwrap();
    let inst = conv_to_mcsp(&x, &y).unwrap();
    assert_eq!(decode_conv(&inst, &mcsp_naive(&inst.a)).unwrap(), minplus_conv(&x, &y).unwrap());
}
