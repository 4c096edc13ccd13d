//! `ioco`, `mioco` and `mior` with replayable witnesses.
//!
//! Every relation quantifies over the suspension traces of one model (the
//! *universe*) and compares something about a second model (the *checked*
//! one) after each trace. All three are decided exactly by breadth-first
//! search over pairs of state subsets of the two suspension views. The pair
//! graph is finite, so the search terminates; the pair limit in
//! [`ExplorationLimits`] is a safety valve only.
//!
//! Breadth-first order with symbols expanded by ascending name yields the
//! shortest witness, ties broken lexicographically.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{input_enabledness, Iolts, Mia, Model};
use crate::semantics::{symbols_by_name, Modality, OutSet, SuspensionView, Symbol, Trace};
use crate::stateset::StateSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExplorationLimits {
    /// Maximum number of distinct subset pairs visited per clause.
    pub max_pairs: usize,
}

impl Default for ExplorationLimits {
    fn default() -> Self {
        ExplorationLimits {
            max_pairs: 1 << 20,
        }
    }
}

impl ExplorationLimits {
    pub fn doubled(self) -> Self {
        ExplorationLimits {
            max_pairs: self.max_pairs.saturating_mul(2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConformanceError {
    AlphabetMismatch,
    /// The implementation lacks (must) transitions for these (state, input)
    /// pairs.
    NotInputEnabled { missing: Vec<(String, String)> },
    LimitExceeded { max_pairs: usize },
}

impl fmt::Display for ConformanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConformanceError::AlphabetMismatch => f.write_str("models have different alphabets"),
            ConformanceError::NotInputEnabled { missing } => {
                write!(f, "implementation is not input-enabled:")?;
                for (s, i) in missing.iter().take(8) {
                    write!(f, " ({s}, {i})")?;
                }
                if missing.len() > 8 {
                    write!(f, " ... {} more", missing.len() - 8)?;
                }
                Ok(())
            }
            ConformanceError::LimitExceeded { max_pairs } => {
                write!(f, "exploration exceeded {max_pairs} subset pairs")
            }
        }
    }
}

impl core::error::Error for ConformanceError {}

/// Which part of a conformance relation a witness violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    /// Mandatory outputs of the specification missing in the implementation
    /// (mioco, over must-traces of the implementation).
    MustInclusion,
    /// Implementation outputs not allowed by the specification (mioco, over
    /// may-traces of the specification).
    MayInclusion,
    /// Plain ioco.
    Classic,
    /// A may-suspension-trace of the implementation the specification lacks.
    MayTraces,
    /// A must-suspension-trace of the implementation the specification lacks.
    MustTraces,
}

impl Clause {
    pub fn id(self) -> &'static str {
        match self {
            Clause::MustInclusion => "must-inclusion",
            Clause::MayInclusion => "may-inclusion",
            Clause::Classic => "classic",
            Clause::MayTraces => "may-traces",
            Clause::MustTraces => "must-traces",
        }
    }

    /// Quiescence modality of the clause; `None` for plain ioco.
    pub fn modality(self) -> Option<Modality> {
        match self {
            Clause::MustInclusion | Clause::MustTraces => Some(Modality::Must),
            Clause::MayInclusion | Clause::MayTraces => Some(Modality::May),
            Clause::Classic => None,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A counterexample to a conformance relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub clause: Clause,
    pub trace: Trace,
    /// For inclusion clauses: the offending observation. For trace clauses:
    /// the symbol that extends `trace` in the implementation only.
    pub symbol: Symbol,
    /// Out-sets after `trace` of (implementation, specification); inclusion
    /// clauses only.
    pub outs: Option<(OutSet, OutSet)>,
}

impl Witness {
    /// `extra` when the implementation shows something not allowed,
    /// `missing` when it lacks something mandatory.
    pub fn kind(&self) -> &'static str {
        match self.clause {
            Clause::MustInclusion => "missing",
            _ => "extra",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub explored_pairs: usize,
    pub max_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseOutcome {
    pub clause: Clause,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub stats: Stats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// The shortest witness over all failing clauses.
    pub witness: Option<Witness>,
    pub clauses: Vec<ClauseOutcome>,
    pub stats: Stats,
}

impl Verdict {
    fn combine(clauses: Vec<ClauseOutcome>) -> Verdict {
        let holds = clauses.iter().all(|c| c.holds);
        // shortest trace first; equal traces report the must clause first
        let witness = clauses
            .iter()
            .filter_map(|c| c.witness.as_ref())
            .min_by(|a, b| {
                a.trace
                    .len()
                    .cmp(&b.trace.len())
                    .then_with(|| a.clause.cmp(&b.clause))
            })
            .cloned();
        let stats = Stats {
            explored_pairs: clauses.iter().map(|c| c.stats.explored_pairs).sum(),
            max_depth: clauses.iter().map(|c| c.stats.max_depth).max().unwrap_or(0),
        };
        Verdict {
            holds,
            witness,
            clauses,
            stats,
        }
    }

    pub fn clause(&self, clause: Clause) -> Option<&ClauseOutcome> {
        self.clauses.iter().find(|c| c.clause == clause)
    }
}

struct Node {
    universe: StateSet,
    checked: StateSet,
    parent: Option<(usize, Symbol)>,
    depth: usize,
}

fn trace_of(nodes: &[Node], mut ix: usize) -> Trace {
    let mut rev = Vec::new();
    while let Some((p, s)) = nodes[ix].parent {
        rev.push(s);
        ix = p;
    }
    rev.reverse();
    Trace(rev)
}

/// The question asked at every explored pair.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Check {
    /// Out(checked after σ) ⊆ Out(universe after σ) for σ in the universe's
    /// suspension traces.
    OutInclusion,
    /// Every one-symbol extension enabled in `checked` is enabled in
    /// `universe`.
    TraceInclusion,
}

fn explore<U: Model + ?Sized, C: Model + ?Sized>(
    universe: &SuspensionView<'_, U>,
    checked: &SuspensionView<'_, C>,
    check: Check,
    clause: Clause,
    // when true the checked side is the implementation
    checked_is_impl: bool,
    limits: ExplorationLimits,
) -> Result<ClauseOutcome, ConformanceError> {
    let symbols = symbols_by_name(universe.model().alphabet());
    let mut nodes = alloc::vec![Node {
        universe: universe.initial(),
        checked: checked.initial(),
        parent: None,
        depth: 0,
    }];
    let mut index: BTreeMap<(StateSet, StateSet), usize> = BTreeMap::new();
    index.insert((nodes[0].universe.clone(), nodes[0].checked.clone()), 0);
    let mut head = 0;
    let mut max_depth = 0;
    let name_rank = |s: &Symbol| symbols.iter().position(|x| x == s).unwrap_or(usize::MAX);

    while head < nodes.len() {
        let ix = head;
        head += 1;
        max_depth = max_depth.max(nodes[ix].depth);

        if check == Check::OutInclusion {
            let u_out = universe.out(&nodes[ix].universe);
            let c_out = checked.out(&nodes[ix].checked);
            if !c_out.is_subset(&u_out) {
                let mut extra = c_out.difference(&u_out);
                extra.sort_by_key(|s| name_rank(s));
                let outs = if checked_is_impl {
                    (c_out, u_out)
                } else {
                    (u_out, c_out)
                };
                return Ok(ClauseOutcome {
                    clause,
                    holds: false,
                    witness: Some(Witness {
                        clause,
                        trace: trace_of(&nodes, ix),
                        symbol: extra[0],
                        outs: Some(outs),
                    }),
                    stats: Stats {
                        explored_pairs: nodes.len(),
                        max_depth,
                    },
                });
            }
        }

        for &sym in &symbols {
            let c_next = checked.step(&nodes[ix].checked, sym);
            if c_next.is_empty() {
                continue;
            }
            let u_next = universe.step(&nodes[ix].universe, sym);
            if u_next.is_empty() {
                if check == Check::TraceInclusion {
                    return Ok(ClauseOutcome {
                        clause,
                        holds: false,
                        witness: Some(Witness {
                            clause,
                            trace: trace_of(&nodes, ix),
                            symbol: sym,
                            outs: None,
                        }),
                        stats: Stats {
                            explored_pairs: nodes.len(),
                            max_depth,
                        },
                    });
                }
                // σ is not a suspension trace of the universe
                continue;
            }
            let key = (u_next, c_next);
            if index.contains_key(&key) {
                continue;
            }
            if nodes.len() >= limits.max_pairs {
                return Err(ConformanceError::LimitExceeded {
                    max_pairs: limits.max_pairs,
                });
            }
            index.insert(key.clone(), nodes.len());
            let depth = nodes[ix].depth + 1;
            nodes.push(Node {
                universe: key.0,
                checked: key.1,
                parent: Some((ix, sym)),
                depth,
            });
        }
    }
    Ok(ClauseOutcome {
        clause,
        holds: true,
        witness: None,
        stats: Stats {
            explored_pairs: nodes.len(),
            max_depth,
        },
    })
}

fn require_input_enabled<M: Model + ?Sized>(m: &M) -> Result<(), ConformanceError> {
    let ie = input_enabledness(m);
    if ie.is_enabled() {
        return Ok(());
    }
    let missing = ie
        .missing
        .iter()
        .map(|(s, a)| (String::from(m.state_name(*s)), String::from(m.alphabet().name(*a))))
        .collect();
    Err(ConformanceError::NotInputEnabled { missing })
}

/// `i ioco s`: after every suspension trace of `s`, the outputs (and
/// quiescence) of `i` are allowed by `s`. `i` must be input-enabled.
pub fn ioco_check(i: &Iolts, s: &Iolts) -> Result<Verdict, ConformanceError> {
    ioco_check_with(i, s, ExplorationLimits::default())
}

pub fn ioco_check_with(
    i: &Iolts,
    s: &Iolts,
    limits: ExplorationLimits,
) -> Result<Verdict, ConformanceError> {
    if i.alphabet() != s.alphabet() {
        return Err(ConformanceError::AlphabetMismatch);
    }
    require_input_enabled(i)?;
    let clause = explore(
        &SuspensionView::new(s, Modality::May),
        &SuspensionView::new(i, Modality::May),
        Check::OutInclusion,
        Clause::Classic,
        true,
        limits,
    )?;
    Ok(Verdict::combine(alloc::vec![clause]))
}

/// `i mioco s`: the may clause checks `Out◇(i after◇ σ) ⊆ Out◇(s after◇ σ)`
/// for every may-suspension-trace σ of `s`; the must clause checks
/// `Out□(s after□ σ) ⊆ Out□(i after□ σ)` for every must-suspension-trace σ
/// of `i`. `i` must be input-enabled.
pub fn mioco_check(i: &Mia, s: &Mia) -> Result<Verdict, ConformanceError> {
    mioco_check_with(i, s, ExplorationLimits::default())
}

pub fn mioco_check_with(
    i: &Mia,
    s: &Mia,
    limits: ExplorationLimits,
) -> Result<Verdict, ConformanceError> {
    if i.alphabet() != s.alphabet() {
        return Err(ConformanceError::AlphabetMismatch);
    }
    require_input_enabled(i)?;
    let may = explore(
        &SuspensionView::new(s, Modality::May),
        &SuspensionView::new(i, Modality::May),
        Check::OutInclusion,
        Clause::MayInclusion,
        true,
        limits,
    )?;
    let must = explore(
        &SuspensionView::new(i, Modality::Must),
        &SuspensionView::new(s, Modality::Must),
        Check::OutInclusion,
        Clause::MustInclusion,
        false,
        limits,
    )?;
    Ok(Verdict::combine(alloc::vec![may, must]))
}

/// `i mior s`: may- and must-suspension-trace inclusion of `i` into `s`.
/// No input-enabledness is required.
pub fn mior_check(i: &Mia, s: &Mia) -> Result<Verdict, ConformanceError> {
    mior_check_with(i, s, ExplorationLimits::default())
}

pub fn mior_check_with(
    i: &Mia,
    s: &Mia,
    limits: ExplorationLimits,
) -> Result<Verdict, ConformanceError> {
    if i.alphabet() != s.alphabet() {
        return Err(ConformanceError::AlphabetMismatch);
    }
    let may = explore(
        &SuspensionView::new(s, Modality::May),
        &SuspensionView::new(i, Modality::May),
        Check::TraceInclusion,
        Clause::MayTraces,
        true,
        limits,
    )?;
    let must = explore(
        &SuspensionView::new(s, Modality::Must),
        &SuspensionView::new(i, Modality::Must),
        Check::TraceInclusion,
        Clause::MustTraces,
        true,
        limits,
    )?;
    Ok(Verdict::combine(alloc::vec![may, must]))
}

/// Recomputes the cited sets at the witness trace and confirms the
/// violation. `implementation` and `specification` are the models the
/// witness was produced for.
pub fn replay<I: Model + ?Sized, S: Model + ?Sized>(
    witness: &Witness,
    implementation: &I,
    specification: &S,
) -> bool {
    let modality = witness.clause.modality().unwrap_or(Modality::May);
    let iv = SuspensionView::new(implementation, modality);
    let sv = SuspensionView::new(specification, modality);
    let sigma = witness.trace.symbols();
    let i_after = iv.after(&iv.initial(), sigma);
    let s_after = sv.after(&sv.initial(), sigma);
    match witness.clause {
        Clause::Classic | Clause::MayInclusion => {
            !s_after.is_empty()
                && iv.out(&i_after).contains(witness.symbol)
                && !sv.out(&s_after).contains(witness.symbol)
        }
        Clause::MustInclusion => {
            !i_after.is_empty()
                && sv.out(&s_after).contains(witness.symbol)
                && !iv.out(&i_after).contains(witness.symbol)
        }
        Clause::MayTraces | Clause::MustTraces => {
            !iv.step(&i_after, witness.symbol).is_empty()
                && sv.step(&s_after, witness.symbol).is_empty()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActionId, Alphabet, StateId, Transition};

    fn t(s: usize, a: usize, d: usize) -> Transition {
        Transition::new(StateId(s), ActionId(a), StateId(d))
    }

    fn ab() -> Alphabet {
        Alphabet::new(Vec::<String>::new(), ["a", "b"]).unwrap()
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("q{i}")).collect()
    }

    #[test]
    fn optional_mandatory_counterexample_fails_must_clause_at_epsilon() {
        let i = Mia::with_implied_may("i", ab(), names(3), StateId(0), [t(0, 0, 1)], [t(0, 1, 2)]).unwrap();
        let s = Mia::with_implied_may("s", ab(), names(3), StateId(0), [t(0, 0, 1), t(0, 1, 2)], []).unwrap();
        let v = mioco_check(&i, &s).unwrap();
        assert!(!v.holds);
        let w = v.witness.as_ref().unwrap();
        assert_eq!(w.clause, Clause::MustInclusion);
        assert!(w.trace.is_empty());
        assert_eq!(w.symbol, Symbol::Action(ActionId(1)));
        assert_eq!(w.kind(), "missing");
        assert!(replay(w, &i, &s));
        assert!(v.clause(Clause::MayInclusion).unwrap().holds);
    }

    #[test]
    fn reflexive() {
        let i = Mia::with_implied_may("i", ab(), names(3), StateId(0), [t(0, 0, 1)], [t(0, 1, 2)]).unwrap();
        assert!(mioco_check(&i, &i).unwrap().holds);
        assert!(mior_check(&i, &i).unwrap().holds);
    }

    #[test]
    fn requires_input_enabled_implementation() {
        let alphabet = Alphabet::new(["x"], ["a"]).unwrap();
        let i = Mia::new("i", alphabet, names(1), StateId(0), [], []).unwrap();
        assert!(matches!(
            mioco_check(&i, &i),
            Err(ConformanceError::NotInputEnabled { .. })
        ));
        assert!(mior_check(&i, &i).unwrap().holds);
    }

    #[test]
    fn limit_is_reported() {
        let i = Mia::with_implied_may("i", ab(), names(3), StateId(0), [t(0, 0, 1)], [t(0, 1, 2)]).unwrap();
        let tiny = ExplorationLimits { max_pairs: 1 };
        assert_eq!(
            mioco_check_with(&i, &i, tiny),
            Err(ConformanceError::LimitExceeded { max_pairs: 1 })
        );
    }
}
