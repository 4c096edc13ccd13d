//! Trace semantics over suspension views.
//!
//! For a modality γ, a state is γ-quiescent when it cannot produce an output
//! of the *other* kind: may-quiescence looks at must-enabled actions and
//! must-quiescence at may-enabled actions. The γ suspension view of a model
//! follows γ-transitions and adds a δ self-loop at every γ-quiescent state.
//! For an IOLTS both modalities see the same relation, so both quiescence
//! notions reduce to plain quiescence.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{ActionId, Alphabet, Model, StateId};
use crate::stateset::StateSet;

/// Token used for quiescence in traces.
pub const DELTA: &str = "delta";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modality {
    Must,
    May,
}

impl Modality {
    pub fn other(self) -> Modality {
        match self {
            Modality::Must => Modality::May,
            Modality::May => Modality::Must,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Modality::Must => "must",
            Modality::May => "may",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A suspension-trace symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Action(ActionId),
    Delta,
}

impl Symbol {
    pub fn name(self, alphabet: &Alphabet) -> &str {
        match self {
            Symbol::Action(a) => alphabet.name(a),
            Symbol::Delta => DELTA,
        }
    }

    /// Name with the quiescence modality spelled out, e.g. `delta[must]`.
    pub fn annotated(self, alphabet: &Alphabet, modality: Option<Modality>) -> String {
        match (self, modality) {
            (Symbol::Delta, Some(m)) => alloc::format!("{DELTA}[{m}]"),
            _ => String::from(self.name(alphabet)),
        }
    }
}

/// All symbols of `alphabet` plus δ, in ascending name order.
pub fn symbols_by_name(alphabet: &Alphabet) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = alphabet
        .sorted_by_name()
        .iter()
        .map(|a| Symbol::Action(*a))
        .collect();
    let pos = out
        .iter()
        .position(|s| s.name(alphabet) > DELTA)
        .unwrap_or(out.len());
    out.insert(pos, Symbol::Delta);
    out
}

/// A sequence over inputs, outputs and δ.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace(pub Vec<Symbol>);

impl Trace {
    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn pushed(&self, symbol: Symbol) -> Trace {
        let mut v = self.0.clone();
        v.push(symbol);
        Trace(v)
    }

    /// Parses whitespace-separated action names; `delta` is quiescence.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Trace, String> {
        text.split_whitespace()
            .map(|tok| {
                if tok == DELTA {
                    Ok(Symbol::Delta)
                } else {
                    alphabet
                        .lookup(tok)
                        .map(Symbol::Action)
                        .ok_or_else(|| String::from(tok))
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Trace)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> TraceDisplay<'a> {
        TraceDisplay {
            trace: self,
            alphabet,
        }
    }

    /// Symbol names; the empty trace gives an empty list.
    pub fn tokens(&self, alphabet: &Alphabet) -> Vec<String> {
        self.0.iter().map(|s| String::from(s.name(alphabet))).collect()
    }
}

pub struct TraceDisplay<'a> {
    trace: &'a Trace,
    alphabet: &'a Alphabet,
}

impl fmt::Display for TraceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.trace.is_empty() {
            return f.write_str("ε");
        }
        for (i, s) in self.trace.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(s.name(self.alphabet))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemanticsError {
    UnknownState(StateId),
}

impl fmt::Display for SemanticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemanticsError::UnknownState(s) => write!(f, "unknown state index {}", s.0),
        }
    }
}

impl core::error::Error for SemanticsError {}

/// An `Out` set: enabled outputs plus the quiescence flag of its modality.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutSet {
    pub outputs: BTreeSet<ActionId>,
    pub delta: bool,
}

impl OutSet {
    pub fn contains(&self, symbol: Symbol) -> bool {
        match symbol {
            Symbol::Action(a) => self.outputs.contains(&a),
            Symbol::Delta => self.delta,
        }
    }

    pub fn is_subset(&self, other: &OutSet) -> bool {
        self.outputs.is_subset(&other.outputs) && (!self.delta || other.delta)
    }

    /// Symbols of `self` missing from `other`, outputs first in id order.
    pub fn difference(&self, other: &OutSet) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self
            .outputs
            .difference(&other.outputs)
            .map(|a| Symbol::Action(*a))
            .collect();
        if self.delta && !other.delta {
            out.push(Symbol::Delta);
        }
        out
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self.outputs.iter().map(|a| Symbol::Action(*a)).collect();
        if self.delta {
            out.push(Symbol::Delta);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty() && !self.delta
    }
}

/// The γ suspension view of a model: γ-transitions plus δ self-loops at
/// γ-quiescent states. Read-only over its base model.
pub struct SuspensionView<'a, M: Model + ?Sized> {
    model: &'a M,
    modality: Modality,
    quiescent: Vec<bool>,
}

impl<'a, M: Model + ?Sized> SuspensionView<'a, M> {
    pub fn new(model: &'a M, modality: Modality) -> Self {
        let quiescent = model
            .states()
            .map(|q| quiescent_unchecked(model, q, modality))
            .collect();
        SuspensionView {
            model,
            modality,
            quiescent,
        }
    }

    pub fn model(&self) -> &'a M {
        self.model
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn is_quiescent(&self, q: StateId) -> bool {
        self.quiescent[q.0]
    }

    pub fn initial(&self) -> StateSet {
        StateSet::singleton(self.model.initial())
    }

    pub fn step(&self, from: &StateSet, symbol: Symbol) -> StateSet {
        match symbol {
            Symbol::Delta => from.iter().filter(|q| self.quiescent[q.0]).collect(),
            Symbol::Action(a) => from
                .iter()
                .flat_map(|q| self.model.edges(q, self.modality))
                .filter(|(b, _)| *b == a)
                .map(|(_, t)| *t)
                .collect(),
        }
    }

    pub fn after(&self, from: &StateSet, trace: &[Symbol]) -> StateSet {
        let mut cur = from.clone();
        for s in trace {
            if cur.is_empty() {
                break;
            }
            cur = self.step(&cur, *s);
        }
        cur
    }

    pub fn out(&self, set: &StateSet) -> OutSet {
        let alphabet = self.model.alphabet();
        let mut out = OutSet::default();
        for q in set.iter() {
            for (a, _) in self.model.edges(q, self.modality) {
                if alphabet.is_output(*a) {
                    out.outputs.insert(*a);
                }
            }
            out.delta |= self.quiescent[q.0];
        }
        out
    }
}

fn init_unchecked<M: Model + ?Sized>(m: &M, q: StateId, modality: Modality) -> BTreeSet<ActionId> {
    m.edges(q, modality).iter().map(|(a, _)| *a).collect()
}

fn quiescent_unchecked<M: Model + ?Sized>(m: &M, q: StateId, modality: Modality) -> bool {
    // may-quiescence inspects must-init, must-quiescence inspects may-init
    let alphabet = m.alphabet();
    m.edges(q, modality.other())
        .iter()
        .all(|(a, _)| alphabet.is_input(*a))
}

fn check_state<M: Model + ?Sized>(m: &M, q: StateId) -> Result<(), SemanticsError> {
    if q.0 < m.state_count() {
        Ok(())
    } else {
        Err(SemanticsError::UnknownState(q))
    }
}

/// Labels of the outgoing γ-transitions of `q`.
pub fn init<M: Model + ?Sized>(
    m: &M,
    q: StateId,
    modality: Modality,
) -> Result<BTreeSet<ActionId>, SemanticsError> {
    check_state(m, q)?;
    Ok(init_unchecked(m, q, modality))
}

/// γ-quiescence of `q`.
pub fn is_quiescent<M: Model + ?Sized>(
    m: &M,
    q: StateId,
    modality: Modality,
) -> Result<bool, SemanticsError> {
    check_state(m, q)?;
    Ok(quiescent_unchecked(m, q, modality))
}

/// States reachable from `from` via `trace` in the γ suspension view.
/// Empty when the trace is not enabled.
pub fn after<M: Model + ?Sized>(
    m: &M,
    from: &StateSet,
    trace: &Trace,
    modality: Modality,
) -> StateSet {
    SuspensionView::new(m, modality).after(from, trace.symbols())
}

/// γ-enabled outputs of `set`, plus δ when some member is γ-quiescent.
pub fn out<M: Model + ?Sized>(m: &M, set: &StateSet, modality: Modality) -> OutSet {
    SuspensionView::new(m, modality).out(set)
}

/// Membership in the γ suspension traces of the initial state. Repeated δ
/// is accepted.
pub fn is_strace<M: Model + ?Sized>(m: &M, trace: &Trace, modality: Modality) -> bool {
    let view = SuspensionView::new(m, modality);
    !view.after(&view.initial(), trace.symbols()).is_empty()
}

/// Default exploration depth: every simple path plus a quiescence
/// observation.
pub fn default_depth<M: Model + ?Sized>(m: &M) -> usize {
    2 * m.state_count() + 2
}

/// All γ suspension traces of length at most `depth` from the initial
/// state. δδ never appears: a δ self-loop makes the repetition redundant.
pub fn enumerate_straces<M: Model + ?Sized>(
    m: &M,
    modality: Modality,
    depth: usize,
) -> BTreeSet<Trace> {
    let view = SuspensionView::new(m, modality);
    let symbols = symbols_by_name(m.alphabet());
    let mut out = BTreeSet::new();
    let mut stack = alloc::vec![(Trace::empty(), view.initial())];
    while let Some((trace, set)) = stack.pop() {
        if trace.len() < depth {
            for &sym in &symbols {
                if sym == Symbol::Delta && trace.0.last() == Some(&Symbol::Delta) {
                    continue;
                }
                let next = view.step(&set, sym);
                if !next.is_empty() {
                    stack.push((trace.pushed(sym), next));
                }
            }
        }
        out.insert(trace);
    }
    out
}
