//! The exact subset-pair checkers against brute-force trace enumeration.

mod common;

use common::{small, sym, syms, Mode, Naive};
use mia_core::conformance::replay;
use mia_core::{famlts, ioco_check, mior_check, mioco_check, Clause, ExplorationLimits};
use proptest::prelude::*;

const LEN: usize = 7;

fn shape() -> impl Strategy<Value = (u64, u64, usize, usize, usize, usize)> {
    (any::<u64>(), any::<u64>(), 1usize..=4, 1usize..=4, 0usize..=2, 1usize..=2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ioco_matches_oracle((a, b, n, m, ins, outs) in shape()) {
        let i = famlts(&small(a, n, ins, outs, true));
        let s = famlts(&small(b, m, ins, outs, false));
        let v = ioco_check(&i, &s).unwrap();
        let o = common::ioco(&Naive::of_iolts(&i), &Naive::of_iolts(&s), LEN);
        match (&v.witness, o) {
            (None, None) => prop_assert!(v.holds),
            (Some(w), Some((t, x))) => {
                prop_assert_eq!(syms(&w.trace), t);
                prop_assert_eq!(sym(w.symbol), x);
                prop_assert!(replay(w, &i, &s));
            }
            (Some(w), None) => prop_assert!(w.trace.len() > LEN),
            (None, Some(t)) => prop_assert!(false, "oracle found {:?}", t),
        }
    }

    #[test]
    fn mioco_matches_oracle((a, b, n, m, ins, outs) in shape()) {
        let i = small(a, n, ins, outs, true);
        let s = small(b, m, ins, outs, false);
        let v = mioco_check(&i, &s).unwrap();
        let o = common::mioco(&Naive::of_mia(&i), &Naive::of_mia(&s), LEN);
        match (&v.witness, o) {
            (None, None) => prop_assert!(v.holds),
            (Some(w), Some((t, x, must))) => {
                prop_assert_eq!(syms(&w.trace), t);
                prop_assert_eq!(sym(w.symbol), x);
                prop_assert_eq!(w.clause == Clause::MustInclusion, must);
                prop_assert!(replay(w, &i, &s));
            }
            (Some(w), None) => prop_assert!(w.trace.len() > LEN),
            (None, Some(t)) => prop_assert!(false, "oracle found {:?}", t),
        }
    }

    #[test]
    fn mior_matches_oracle((a, b, n, m, ins, outs) in shape()) {
        let i = small(a, n, ins, outs, false);
        let s = small(b, m, ins, outs, false);
        let v = mior_check(&i, &s).unwrap();
        let o = common::mior(&Naive::of_mia(&i), &Naive::of_mia(&s), LEN);
        match (&v.witness, o) {
            (None, None) => prop_assert!(v.holds),
            (Some(w), Some((t, x, mode))) => {
                prop_assert_eq!(syms(&w.trace), t);
                prop_assert_eq!(sym(w.symbol), x);
                let expect = if mode == Mode::Must { Clause::MustTraces } else { Clause::MayTraces };
                prop_assert_eq!(w.clause, expect);
                prop_assert!(replay(w, &i, &s));
            }
            (Some(w), None) => prop_assert!(w.trace.len() > LEN),
            (None, Some(t)) => prop_assert!(false, "oracle found {:?}", t),
        }
    }

    #[test]
    fn verdicts_ignore_doubled_limits((a, b, n, m, ins, outs) in shape()) {
        let i = small(a, n, ins, outs, true);
        let s = small(b, m, ins, outs, false);
        let base = ExplorationLimits::default();
        prop_assert_eq!(
            mia_core::conformance::mioco_check_with(&i, &s, base).unwrap(),
            mia_core::conformance::mioco_check_with(&i, &s, base.doubled()).unwrap()
        );
        prop_assert_eq!(
            mia_core::conformance::mior_check_with(&i, &s, base).unwrap(),
            mia_core::conformance::mior_check_with(&i, &s, base.doubled()).unwrap()
        );
    }
}

#[test]
fn mioco_on_degenerate_pairs_implies_ioco() {
    for seed in 0..300u64 {
        let i = mia_core::embed_iolts(&famlts(&small(seed, 3, 1, 2, true))).unwrap();
        let s = mia_core::embed_iolts(&famlts(&small(seed + 1000, 3, 1, 2, true))).unwrap();
        if mioco_check(&i, &s).unwrap().holds {
            assert!(ioco_check(&famlts(&i), &famlts(&s)).unwrap().holds, "seed {seed}");
        }
    }
}

/// Every relation over P×Q that satisfies both refinement clauses, checked
/// literally from the definition.
fn is_refinement(p: &Naive, q: &Naive, rel: &[(usize, usize)]) -> bool {
    rel.iter().all(|&(a, b)| {
        let must_ok = q.must.iter().filter(|t| t.0 == b).all(|&(_, x, b2)| {
            p.must
                .iter()
                .any(|&(a1, y, a2)| a1 == a && y == x && rel.contains(&(a2, b2)))
        });
        let may_ok = p
            .may
            .iter()
            .filter(|t| t.0 == a && p.outputs.contains(&t.1))
            .all(|&(_, x, a2)| {
                q.may
                    .iter()
                    .any(|&(b1, y, b2)| b1 == b && y == x && rel.contains(&(a2, b2)))
            });
        must_ok && may_ok
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn refinement_matches_relation_enumeration(
        a in any::<u64>(), b in any::<u64>(), n in 1usize..=3, m in 1usize..=3, ins in 0usize..=1
    ) {
        let p = small(a, n, ins, 2, false);
        let q = small(b, m, ins, 2, false);
        let (np, nq) = (Naive::of_mia(&p), Naive::of_mia(&q));
        let all: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..m).map(move |y| (x, y))).collect();
        let mut greatest = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << all.len()) {
            let rel: Vec<_> = all.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, r)| *r).collect();
            if is_refinement(&np, &nq, &rel) {
                greatest.extend(rel);
            }
        }
        let got: std::collections::BTreeSet<(usize, usize)> = mia_core::mia_refines(&p, &q)
            .unwrap()
            .relation
            .pairs
            .iter()
            .map(|(x, y)| (x.0, y.0))
            .collect();
        prop_assert_eq!(got, greatest);
    }
}
