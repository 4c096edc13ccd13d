//! Small hand-built models on which properties of the family semantics
//! do not carry over.

use mia_core::family::{outstate_counterexample, verify_soundness, HarnessConfig, HarnessStatus};
use mia_core::model::{Draft, ModelKind, TransitionKind};
use mia_core::{famlts, ioco_check, mia_refines, mioco_check, Mia, Modality, Model, Symbol};

fn build(name: &str, inputs: &[&str], outputs: &[&str], states: &[&str], edges: &[(TransitionKind, &str, &str, &str)]) -> Mia {
    let mut d = Draft::new(ModelKind::Mia, name);
    d.inputs = inputs.iter().map(|s| s.to_string()).collect();
    d.outputs = outputs.iter().map(|s| s.to_string()).collect();
    d.states = states.iter().map(|s| s.to_string()).collect();
    d.initial = Some(states[0].to_string());
    for (k, a, x, b) in edges {
        d.add(*k, a, x, b);
    }
    d.close_may();
    d.build_mia().unwrap()
}

#[test]
fn may_quiescence_is_lost_in_the_family_lts() {
    use TransitionKind::*;
    // s0 may emit `o`; nothing is mandatory, so s0 is may-quiescent
    let s = build("s", &[], &["o"], &["s0", "s1"], &[(May, "s0", "o", "s1")]);
    let i = build("i", &[], &["o"], &["i0"], &[]);

    assert!(mioco_check(&i, &s).unwrap().holds);
    let v = ioco_check(&famlts(&i), &famlts(&s)).unwrap();
    assert!(!v.holds);
    let w = v.witness.unwrap();
    assert!(w.trace.is_empty());
    assert_eq!(w.symbol, Symbol::Delta);

    let report = verify_soundness(&i, &s, HarnessConfig { cap: 16, seed: 0 }).unwrap();
    assert_eq!(report.status, HarnessStatus::Violated);
}

#[test]
fn related_after_sets_need_not_pair_up() {
    use TransitionKind::*;
    let q = build(
        "q",
        &["i"],
        &["o"],
        &["q0", "q1", "q2", "q3"],
        &[(May, "q0", "o", "q1"), (May, "q0", "o", "q2"), (Must, "q1", "i", "q3")],
    );
    let p = build(
        "p",
        &["i"],
        &["o"],
        &["p0", "p1", "p3", "p4"],
        &[(Must, "p0", "o", "p1"), (Must, "p1", "i", "p3"), (Must, "p3", "o", "p4")],
    );
    // p1 is related to q2, which has no input obligation
    let r = mia_refines(&p, &q).unwrap();
    assert!(r.holds());
    assert!(r.relation.relates(p.state_id("p1").unwrap(), q.state_id("q2").unwrap()));

    let c = outstate_counterexample(&p, &q, 3).expect("p refines q").expect("counterexample");
    assert_eq!(c.modality, Modality::May);
    assert_eq!(c.trace.tokens(p.alphabet()), ["o", "i"]);
    assert_eq!(c.state, p.state_id("p3").unwrap());
}
