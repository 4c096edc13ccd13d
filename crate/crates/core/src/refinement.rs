//! MIA refinement, variant derivation and trace lifting.
//!
//! `p ≤ q` holds when some relation R contains (p, q) and every pair in R
//! satisfies two clauses:
//!
//! 1. every must transition `q -a-> q'` is matched by a must transition
//!    `p -a-> p'` with `(p', q') ∈ R`;
//! 2. every may *output* transition `p -α-> p'` is matched by a may
//!    transition `q -α-> q'` with `(p', q') ∈ R`.
//!
//! The greatest such relation is computed by deleting violating pairs from
//! `P × Q` in rounds until nothing changes. Each round judges every pair
//! against the previous round's relation, so a pair deleted in round `r`
//! only depends on pairs deleted before `r`; that ordering is what makes
//! failure explanations well-founded.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::model::{embed_iolts, ActionId, Iolts, Mia, Model, ModelError, StateId, Transition};
use crate::semantics::{Modality, Symbol, Trace};
use crate::stateset::StateSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefinementError {
    AlphabetMismatch,
    /// The variant uses state identifiers the specification does not have.
    StateSpaceMismatch { unknown: Vec<String> },
    PreconditionViolated(String),
}

impl fmt::Display for RefinementError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefinementError::AlphabetMismatch => f.write_str("models have different alphabets"),
            RefinementError::StateSpaceMismatch { unknown } => {
                write!(f, "states not in the specification: {}", unknown.join(", "))
            }
            RefinementError::PreconditionViolated(why) => write!(f, "precondition violated: {why}"),
        }
    }
}

impl core::error::Error for RefinementError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RefinementClause {
    /// A must transition of the abstract model has no must match.
    MustMatch,
    /// A may output of the refined model has no may match.
    MayOutputMatch,
}

impl RefinementClause {
    pub fn id(self) -> &'static str {
        match self {
            RefinementClause::MustMatch => "must-match",
            RefinementClause::MayOutputMatch => "may-output-match",
        }
    }
}

/// The greatest MIA refinement between two models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementRelation {
    pub pairs: BTreeSet<(StateId, StateId)>,
    /// Whether the pair of initial states is related.
    pub holds: bool,
}

impl RefinementRelation {
    pub fn relates(&self, p: StateId, q: StateId) -> bool {
        self.pairs.contains(&(p, q))
    }
}

/// One deleted pair on the path from the initial pair to a direct violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplanationStep {
    pub pair: (StateId, StateId),
    pub clause: RefinementClause,
    pub action: ActionId,
    /// The successor pair whose earlier deletion caused this one, or `None`
    /// when no matching transition exists at all.
    pub next: Option<(StateId, StateId)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementOutcome {
    pub relation: RefinementRelation,
    /// Present iff refinement fails. Ends with a step whose `next` is `None`.
    pub explanation: Vec<ExplanationStep>,
    pub rounds: usize,
}

impl RefinementOutcome {
    pub fn holds(&self) -> bool {
        self.relation.holds
    }

    /// The actions along the explanation path.
    pub fn distinguishing_trace(&self) -> Trace {
        Trace(
            self.explanation
                .iter()
                .filter(|s| s.next.is_some())
                .map(|s| Symbol::Action(s.action))
                .collect(),
        )
    }
}

#[derive(Clone, Copy)]
struct Kill {
    round: usize,
    clause: RefinementClause,
    action: ActionId,
    // target on the side that must be matched
    target: StateId,
}

fn violation<P: Model + ?Sized, Q: Model + ?Sized>(
    p: &P,
    q: &Q,
    alive: &dyn Fn(StateId, StateId) -> bool,
    pp: StateId,
    qq: StateId,
) -> Option<(RefinementClause, ActionId, StateId)> {
    for &(a, q2) in q.edges(qq, Modality::Must) {
        let matched = p
            .edges(pp, Modality::Must)
            .iter()
            .any(|&(b, p2)| b == a && alive(p2, q2));
        if !matched {
            return Some((RefinementClause::MustMatch, a, q2));
        }
    }
    let alphabet = p.alphabet();
    for &(a, p2) in p.edges(pp, Modality::May) {
        if !alphabet.is_output(a) {
            continue;
        }
        let matched = q
            .edges(qq, Modality::May)
            .iter()
            .any(|&(b, q2)| b == a && alive(p2, q2));
        if !matched {
            return Some((RefinementClause::MayOutputMatch, a, p2));
        }
    }
    None
}

/// Decides `p ≤ q` and returns the greatest refinement relation.
pub fn mia_refines(p: &Mia, q: &Mia) -> Result<RefinementOutcome, RefinementError> {
    refines_models(p, q)
}

pub(crate) fn refines_models<P: Model + ?Sized, Q: Model + ?Sized>(
    p: &P,
    q: &Q,
) -> Result<RefinementOutcome, RefinementError> {
    if p.alphabet() != q.alphabet() {
        return Err(RefinementError::AlphabetMismatch);
    }
    let (n, m) = (p.state_count(), q.state_count());
    let mut alive = alloc::vec![true; n * m];
    let mut kills: Vec<Option<Kill>> = alloc::vec![None; n * m];
    // deterministic order: by state names
    let mut p_order: Vec<StateId> = p.states().collect();
    p_order.sort_by(|a, b| p.state_name(*a).cmp(p.state_name(*b)));
    let mut q_order: Vec<StateId> = q.states().collect();
    q_order.sort_by(|a, b| q.state_name(*a).cmp(q.state_name(*b)));

    let mut rounds = 0;
    loop {
        rounds += 1;
        let snapshot = alive.clone();
        let is_alive = |a: StateId, b: StateId| snapshot[a.0 * m + b.0];
        let mut changed = false;
        for &pp in &p_order {
            for &qq in &q_order {
                let ix = pp.0 * m + qq.0;
                if !snapshot[ix] {
                    continue;
                }
                if let Some((clause, action, target)) = violation(p, q, &is_alive, pp, qq) {
                    alive[ix] = false;
                    kills[ix] = Some(Kill {
                        round: rounds,
                        clause,
                        action,
                        target,
                    });
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let pairs: BTreeSet<(StateId, StateId)> = (0..n)
        .flat_map(|a| (0..m).map(move |b| (StateId(a), StateId(b))))
        .filter(|(a, b)| alive[a.0 * m + b.0])
        .collect();
    let holds = alive[p.initial().0 * m + q.initial().0];
    debug_assert!(is_mia_refinement(p, q, &pairs));

    let mut explanation = Vec::new();
    if !holds {
        let mut cur = (p.initial(), q.initial());
        loop {
            let kill = kills[cur.0 .0 * m + cur.1 .0].expect("deleted pair has a cause");
            let children: Vec<(StateId, StateId)> = match kill.clause {
                RefinementClause::MustMatch => p
                    .edges(cur.0, Modality::Must)
                    .iter()
                    .filter(|(b, _)| *b == kill.action)
                    .map(|&(_, p2)| (p2, kill.target))
                    .collect(),
                RefinementClause::MayOutputMatch => q
                    .edges(cur.1, Modality::May)
                    .iter()
                    .filter(|(b, _)| *b == kill.action)
                    .map(|&(_, q2)| (kill.target, q2))
                    .collect(),
            };
            let next = children.into_iter().min_by(|x, y| {
                let rx = kills[x.0 .0 * m + x.1 .0].map_or(usize::MAX, |k| k.round);
                let ry = kills[y.0 .0 * m + y.1 .0].map_or(usize::MAX, |k| k.round);
                rx.cmp(&ry)
                    .then_with(|| p.state_name(x.0).cmp(p.state_name(y.0)))
                    .then_with(|| q.state_name(x.1).cmp(q.state_name(y.1)))
            });
            explanation.push(ExplanationStep {
                pair: cur,
                clause: kill.clause,
                action: kill.action,
                next,
            });
            match next {
                Some(n) => cur = n,
                None => break,
            }
        }
    }
    Ok(RefinementOutcome {
        relation: RefinementRelation { pairs, holds },
        explanation,
        rounds,
    })
}

/// Checks both refinement clauses on every pair of `pairs`.
pub fn is_mia_refinement<P: Model + ?Sized, Q: Model + ?Sized>(
    p: &P,
    q: &Q,
    pairs: &BTreeSet<(StateId, StateId)>,
) -> bool {
    let related = |a: StateId, b: StateId| pairs.contains(&(a, b));
    pairs
        .iter()
        .all(|&(a, b)| violation(p, q, &related, a, b).is_none())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VariantMode {
    /// The variant reuses the specification's state identifiers.
    #[default]
    Literal,
    /// Some injective renaming of the variant's states must make its
    /// transitions a subset of the specification's may transitions.
    UpToIso,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariantVerdict {
    pub holds: bool,
    pub refines: bool,
    pub transitions_included: bool,
    /// A variant transition outside the may relation (literal mode).
    pub offending: Option<Transition>,
    /// Variant state index -> specification state, when one was found.
    pub mapping: Option<Vec<StateId>>,
    pub refinement: Option<RefinementOutcome>,
}

/// Decides whether `p` is a variant of `q`: `p ≤ q` with the initial states
/// related, and every transition of `p` is a may transition of `q`.
pub fn is_variant_of(p: &Iolts, q: &Mia, mode: VariantMode) -> Result<VariantVerdict, RefinementError> {
    if p.alphabet() != q.alphabet() {
        return Err(RefinementError::AlphabetMismatch);
    }
    let literal: Option<Vec<StateId>> = match mode {
        VariantMode::Literal => {
            let mut unknown = Vec::new();
            let map: Vec<StateId> = p
                .state_names()
                .iter()
                .filter_map(|name| {
                    let id = q.state_id(name);
                    if id.is_none() {
                        unknown.push(name.clone());
                    }
                    id
                })
                .collect();
            if !unknown.is_empty() {
                return Err(RefinementError::StateSpaceMismatch { unknown });
            }
            Some(map)
        }
        VariantMode::UpToIso => None,
    };

    let (included, offending, mapping) = match literal {
        Some(map) => {
            let offending = p
                .transitions()
                .map(|t| Transition::new(map[t.source.0], t.action, map[t.target.0]))
                .find(|t| !q.is_may(t));
            (offending.is_none(), offending, Some(map))
        }
        None => match find_embedding(p, q) {
            Some(map) => (true, None, Some(map)),
            None => (false, None, None),
        },
    };

    let refinement = match embed_iolts(p) {
        Ok(embedded) => Some(refines_models(&embedded, q)?),
        Err(ModelError::InputNondeterministic { .. }) => None,
        Err(e) => unreachable!("embedding a valid IOLTS: {e}"),
    };
    let refines = refinement.as_ref().is_some_and(|r| r.holds());
    Ok(VariantVerdict {
        holds: refines && included,
        refines,
        transitions_included: included,
        offending,
        mapping: if included { mapping } else { None },
        refinement,
    })
}

// Backtracking search for an injective state map that sends every variant
// transition onto a may transition.
fn find_embedding(p: &Iolts, q: &Mia) -> Option<Vec<StateId>> {
    let n = p.state_count();
    if n > q.state_count() {
        return None;
    }
    let mut map: Vec<Option<StateId>> = alloc::vec![None; n];
    let mut used = alloc::vec![false; q.state_count()];
    let transitions: Vec<Transition> = p.transitions().copied().collect();

    fn consistent(map: &[Option<StateId>], transitions: &[Transition], q: &Mia) -> bool {
        transitions.iter().all(|t| match (map[t.source.0], map[t.target.0]) {
            (Some(s), Some(d)) => q.is_may(&Transition::new(s, t.action, d)),
            _ => true,
        })
    }

    fn go(
        k: usize,
        map: &mut Vec<Option<StateId>>,
        used: &mut Vec<bool>,
        transitions: &[Transition],
        q: &Mia,
    ) -> bool {
        if k == map.len() {
            return true;
        }
        for cand in 0..used.len() {
            if used[cand] {
                continue;
            }
            map[k] = Some(StateId(cand));
            used[cand] = true;
            if consistent(map, transitions, q) && go(k + 1, map, used, transitions, q) {
                return true;
            }
            used[cand] = false;
            map[k] = None;
        }
        false
    }

    if go(0, &mut map, &mut used, &transitions, q) {
        Some(map.into_iter().map(|s| s.expect("complete map")).collect())
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftingVerdict {
    pub holds: bool,
    /// A trace of `p` (length ≤ depth) that `q` cannot follow over may
    /// transitions.
    pub counterexample: Option<Trace>,
    pub explored: usize,
}

/// Checks that every trace of the variant `p` up to `depth` is a may-trace
/// of `q`. A counterexample means an implementation bug, not a model
/// property.
pub fn check_lemma1_trace_lifting(
    p: &Iolts,
    q: &Mia,
    depth: usize,
) -> Result<LiftingVerdict, RefinementError> {
    let verdict = is_variant_of(p, q, VariantMode::Literal)?;
    if !verdict.holds {
        return Err(RefinementError::PreconditionViolated(
            "p is not a variant of q".to_string(),
        ));
    }
    Ok(trace_inclusion_bounded(p, q, depth))
}

fn trace_inclusion_bounded(p: &Iolts, q: &Mia, depth: usize) -> LiftingVerdict {
    let symbols = crate::semantics::symbols_by_name(p.alphabet());
    let start = (StateSet::singleton(p.initial()), StateSet::singleton(q.initial()));
    let mut seen: BTreeMap<(StateSet, StateSet), ()> = BTreeMap::new();
    seen.insert(start.clone(), ());
    let mut frontier = alloc::vec![(start, Trace::empty())];
    let step = |m: &dyn Model, set: &StateSet, a: crate::model::ActionId, modality| -> StateSet {
        set.iter()
            .flat_map(|s| m.edges(s, modality))
            .filter(|(b, _)| *b == a)
            .map(|(_, t)| *t)
            .collect()
    };
    for _ in 0..depth {
        let mut next_frontier = Vec::new();
        for ((ps, qs), trace) in &frontier {
            for sym in &symbols {
                let Symbol::Action(a) = *sym else { continue };
                let p2 = step(p, ps, a, Modality::May);
                if p2.is_empty() {
                    continue;
                }
                let q2 = step(q, qs, a, Modality::May);
                let t2 = trace.pushed(*sym);
                if q2.is_empty() {
                    return LiftingVerdict {
                        holds: false,
                        counterexample: Some(t2),
                        explored: seen.len(),
                    };
                }
                let key = (p2, q2);
                if seen.insert(key.clone(), ()).is_none() {
                    next_frontier.push((key, t2));
                }
            }
        }
        frontier = next_frontier;
    }
    LiftingVerdict {
        holds: true,
        counterexample: None,
        explored: seen.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{famlts, Alphabet};
    use alloc::vec;

    fn t(s: usize, a: usize, d: usize) -> Transition {
        Transition::new(StateId(s), ActionId(a), StateId(d))
    }

    fn abc() -> Alphabet {
        Alphabet::new(Vec::<String>::new(), ["a", "b"]).unwrap()
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("q{i}")).collect()
    }

    #[test]
    fn optional_b_does_not_refine_mandatory_b() {
        let i = Mia::with_implied_may("i", abc(), names(3), StateId(0), [t(0, 0, 1)], [t(0, 1, 2)]).unwrap();
        let s = Mia::with_implied_may("s", abc(), names(3), StateId(0), [t(0, 0, 1), t(0, 1, 2)], []).unwrap();
        let out = mia_refines(&i, &s).unwrap();
        assert!(!out.holds());
        let last = out.explanation.last().unwrap();
        assert_eq!(last.clause, RefinementClause::MustMatch);
        assert_eq!(last.action, ActionId(1));
        assert!(last.next.is_none());
        // the other direction holds: s's outputs are all allowed by i
        assert!(mia_refines(&s, &i).unwrap().holds());
    }

    #[test]
    fn explanation_follows_deleted_successors() {
        // p: q0 -a-> q1 -b-> q2 ; q: q0 -a-> q1, nothing after
        let p = Mia::with_implied_may("p", abc(), names(3), StateId(0), [t(0, 0, 1), t(1, 1, 2)], []).unwrap();
        let q = Mia::with_implied_may("q", abc(), names(3), StateId(0), [t(0, 0, 1)], []).unwrap();
        let out = mia_refines(&p, &q).unwrap();
        assert!(!out.holds());
        assert_eq!(out.explanation.len(), 2);
        assert_eq!(out.explanation[0].clause, RefinementClause::MustMatch);
        assert_eq!(out.distinguishing_trace().0, [Symbol::Action(ActionId(0))]);
        assert_eq!(out.explanation[1].action, ActionId(1));
    }

    #[test]
    fn alphabet_mismatch() {
        let a = Mia::new("a", abc(), names(1), StateId(0), [], []).unwrap();
        let other = Alphabet::new(["x"], ["a", "b"]).unwrap();
        let b = Mia::new("b", other, names(1), StateId(0), [], []).unwrap();
        assert_eq!(mia_refines(&a, &b), Err(RefinementError::AlphabetMismatch));
    }

    #[test]
    fn famlts_is_a_variant() {
        let q = Mia::with_implied_may("q", abc(), names(3), StateId(0), [t(0, 0, 1)], [t(0, 1, 2)]).unwrap();
        let v = is_variant_of(&famlts(&q), &q, VariantMode::Literal).unwrap();
        assert!(v.holds);
        let lift = check_lemma1_trace_lifting(&famlts(&q), &q, 4).unwrap();
        assert!(lift.holds);
        assert!(check_lemma1_trace_lifting(&famlts(&q), &q, 0).unwrap().holds);
    }

    #[test]
    fn extra_transition_breaks_inclusion() {
        let q = Mia::with_implied_may("q", abc(), names(3), StateId(0), [t(0, 0, 1)], []).unwrap();
        let p = Iolts::new("p", abc(), names(3), StateId(0), [t(0, 0, 1), t(1, 0, 1)]).unwrap();
        let v = is_variant_of(&p, &q, VariantMode::Literal).unwrap();
        assert!(!v.holds);
        assert!(!v.transitions_included);
        assert_eq!(v.offending, Some(t(1, 0, 1)));
        assert!(matches!(
            check_lemma1_trace_lifting(&p, &q, 3),
            Err(RefinementError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn unknown_variant_states() {
        let q = Mia::new("q", abc(), names(1), StateId(0), [], []).unwrap();
        let p = Iolts::new("p", abc(), vec!["zz".into()], StateId(0), []).unwrap();
        assert!(matches!(
            is_variant_of(&p, &q, VariantMode::Literal),
            Err(RefinementError::StateSpaceMismatch { .. })
        ));
        let iso = is_variant_of(&p, &q, VariantMode::UpToIso).unwrap();
        assert!(iso.holds);
        assert_eq!(iso.mapping, Some(vec![StateId(0)]));
    }

    #[test]
    fn up_to_iso_finds_renaming() {
        let q = Mia::with_implied_may("q", abc(), names(3), StateId(0), [t(0, 0, 1)], [t(0, 1, 2)]).unwrap();
        // same shape as q's must core, states named differently and reordered
        let p = Iolts::new(
            "p",
            abc(),
            vec!["x".into(), "start".into()],
            StateId(1),
            [t(1, 0, 0)],
        )
        .unwrap();
        let v = is_variant_of(&p, &q, VariantMode::UpToIso).unwrap();
        assert!(v.holds, "{v:?}");
        assert_eq!(v.mapping, Some(vec![StateId(1), StateId(0)]));
    }
}
