//! Model data types and their validity rules.
//!
//! A [`Mia`] is a modal interface automaton: an I/O-labelled modal transition
//! system that is syntactically consistent (must ⊆ may), input-deterministic,
//! and in which every specified input is mandatory. An [`Iolts`] carries a
//! single transition relation. Both are immutable once built; every
//! constructor checks the invariants, so a value of either type is valid.
//!
//! Unvalidated input (from files or tests) is described by a [`Draft`], which
//! [`validate_mia`] inspects without failing.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::semantics::Modality;
use crate::stateset::StateSet;

/// Index of a state within its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// Index of an action within its alphabet. Inputs come first, then outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

/// Action names that collide with the quiescence token.
pub const RESERVED_NAMES: [&str; 3] = ["delta", "delta_may", "delta_must"];

/// Disjoint input and output action sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    inputs: Vec<String>,
    outputs: Vec<String>,
    // action ids sorted by name; exploration order for witnesses
    by_name: Vec<ActionId>,
}

impl Alphabet {
    pub fn new<I, O, S, T>(inputs: I, outputs: O) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        O: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let inputs: Vec<String> = inputs.into_iter().map(Into::into).collect();
        let outputs: Vec<String> = outputs.into_iter().map(Into::into).collect();
        let violations = alphabet_violations(&inputs, &outputs);
        if !violations.is_empty() {
            return Err(ModelError::Invalid(ValidationReport {
                violations,
                warnings: Vec::new(),
            }));
        }
        Ok(Self::new_unchecked(inputs, outputs))
    }

    fn new_unchecked(inputs: Vec<String>, outputs: Vec<String>) -> Self {
        let mut by_name: Vec<ActionId> = (0..inputs.len() + outputs.len()).map(ActionId).collect();
        by_name.sort_by(|a, b| {
            let name = |x: &ActionId| {
                if x.0 < inputs.len() {
                    inputs[x.0].as_str()
                } else {
                    outputs[x.0 - inputs.len()].as_str()
                }
            };
            name(a).cmp(name(b))
        });
        Alphabet {
            inputs,
            outputs,
            by_name,
        }
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn len(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_input(&self, action: ActionId) -> bool {
        action.0 < self.inputs.len()
    }

    pub fn is_output(&self, action: ActionId) -> bool {
        !self.is_input(action) && action.0 < self.len()
    }

    pub fn input_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.inputs.len()).map(ActionId)
    }

    pub fn output_ids(&self) -> impl Iterator<Item = ActionId> {
        (self.inputs.len()..self.len()).map(ActionId)
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.len()).map(ActionId)
    }

    /// Action ids in ascending name order.
    pub fn sorted_by_name(&self) -> &[ActionId] {
        &self.by_name
    }

    pub fn name(&self, action: ActionId) -> &str {
        if action.0 < self.inputs.len() {
            &self.inputs[action.0]
        } else {
            &self.outputs[action.0 - self.inputs.len()]
        }
    }

    pub fn lookup(&self, name: &str) -> Option<ActionId> {
        self.inputs
            .iter()
            .chain(self.outputs.iter())
            .position(|n| n == name)
            .map(ActionId)
    }

    /// Equality of the input and output sets, ignoring declaration order.
    pub fn same_sets(&self, other: &Alphabet) -> bool {
        let set = |v: &[String]| v.iter().cloned().collect::<BTreeSet<_>>();
        set(&self.inputs) == set(&other.inputs) && set(&self.outputs) == set(&other.outputs)
    }
}

fn alphabet_violations(inputs: &[String], outputs: &[String]) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for name in inputs.iter().chain(outputs.iter()) {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            out.push(Violation::new(
                Rule::BadActionName,
                Some(name.clone()),
                format!("action name {name:?} must be a nonempty token"),
            ));
        }
        if RESERVED_NAMES.contains(&name.as_str()) {
            out.push(Violation::new(
                Rule::ReservedName,
                Some(name.clone()),
                format!("action name `{name}` is reserved for quiescence"),
            ));
        }
        if !seen.insert(name.as_str()) {
            let rule = if inputs.contains(name) && outputs.contains(name) {
                Rule::AlphabetNotDisjoint
            } else {
                Rule::DuplicateAction
            };
            let message = match rule {
                Rule::AlphabetNotDisjoint => format!("`{name}` is both an input and an output"),
                _ => format!("action `{name}` is declared twice"),
            };
            out.push(Violation::new(rule, Some(name.clone()), message));
        }
    }
    out
}

/// One labelled transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: StateId,
    pub action: ActionId,
    pub target: StateId,
}

impl Transition {
    pub fn new(source: StateId, action: ActionId, target: StateId) -> Self {
        Transition {
            source,
            action,
            target,
        }
    }
}

/// A transition relation with per-state adjacency.
#[derive(Clone, Debug)]
pub(crate) struct Relation {
    set: BTreeSet<Transition>,
    adjacency: Vec<Vec<(ActionId, StateId)>>,
}

impl Relation {
    fn new(state_count: usize, set: BTreeSet<Transition>) -> Self {
        let mut adjacency = alloc::vec![Vec::new(); state_count];
        for t in &set {
            adjacency[t.source.0].push((t.action, t.target));
        }
        Relation { set, adjacency }
    }

    pub(crate) fn contains(&self, t: &Transition) -> bool {
        self.set.contains(t)
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.set == other.set
    }
}

impl Eq for Relation {}

/// Read access shared by [`Mia`] and [`Iolts`].
///
/// For an IOLTS both modalities see the same single relation.
pub trait Model {
    fn name(&self) -> &str;
    fn alphabet(&self) -> &Alphabet;
    fn state_names(&self) -> &[String];
    fn initial(&self) -> StateId;
    /// Outgoing edges of `state` under `modality`, sorted by (action, target).
    fn edges(&self, state: StateId, modality: Modality) -> &[(ActionId, StateId)];

    fn state_count(&self) -> usize {
        self.state_names().len()
    }

    fn state_name(&self, state: StateId) -> &str {
        &self.state_names()[state.0]
    }

    fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_names().iter().position(|n| n == name).map(StateId)
    }

    fn states(&self) -> core::iter::Map<core::ops::Range<usize>, fn(usize) -> StateId> {
        (0..self.state_count()).map(StateId as fn(usize) -> StateId)
    }

    /// States not reachable from the initial state over may transitions.
    fn unreachable_states(&self) -> Vec<StateId> {
        let mut seen = StateSet::singleton(self.initial());
        let mut stack = alloc::vec![self.initial()];
        while let Some(q) = stack.pop() {
            for &(_, t) in self.edges(q, Modality::May) {
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        self.states().filter(|s| !seen.contains(*s)).collect()
    }
}

/// A modal interface automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mia {
    name: String,
    alphabet: Alphabet,
    states: Vec<String>,
    initial: StateId,
    must: Relation,
    may: Relation,
}

impl Mia {
    /// Builds a MIA from id-based parts, checking every MIA invariant.
    ///
    /// `may` is taken literally: must transitions are not added to it.
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        states: Vec<String>,
        initial: StateId,
        must: impl IntoIterator<Item = Transition>,
        may: impl IntoIterator<Item = Transition>,
    ) -> Result<Self, ModelError> {
        let must: BTreeSet<Transition> = must.into_iter().collect();
        let may: BTreeSet<Transition> = may.into_iter().collect();
        let mut violations = alphabet_violations(&alphabet.inputs, &alphabet.outputs);
        violations.extend(structural_violations(
            &alphabet,
            &states,
            initial,
            must.iter().chain(may.iter()),
        ));
        if violations.is_empty() {
            violations.extend(modal_violations(&alphabet, &states, &must, &may));
        }
        if !violations.is_empty() {
            return Err(ModelError::Invalid(ValidationReport {
                violations,
                warnings: Vec::new(),
            }));
        }
        let n = states.len();
        Ok(Mia {
            name: name.into(),
            alphabet,
            states,
            initial,
            must: Relation::new(n, must),
            may: Relation::new(n, may),
        })
    }

    /// Like [`Mia::new`], but every must transition is also entered into the
    /// may relation.
    pub fn with_implied_may(
        name: impl Into<String>,
        alphabet: Alphabet,
        states: Vec<String>,
        initial: StateId,
        must: impl IntoIterator<Item = Transition>,
        may: impl IntoIterator<Item = Transition>,
    ) -> Result<Self, ModelError> {
        let must: BTreeSet<Transition> = must.into_iter().collect();
        let may: BTreeSet<Transition> = may.into_iter().chain(must.iter().copied()).collect();
        Self::new(name, alphabet, states, initial, must, may)
    }

    pub fn must_transitions(&self) -> impl Iterator<Item = &Transition> {
        self.must.set.iter()
    }

    pub fn may_transitions(&self) -> impl Iterator<Item = &Transition> {
        self.may.set.iter()
    }

    /// May transitions that are not must transitions, in canonical order.
    pub fn optional_transitions(&self) -> Vec<Transition> {
        self.may
            .set
            .iter()
            .filter(|t| !self.must.set.contains(t))
            .copied()
            .collect()
    }

    pub fn is_must(&self, t: &Transition) -> bool {
        self.must.contains(t)
    }

    pub fn is_may(&self, t: &Transition) -> bool {
        self.may.contains(t)
    }

    /// True when must and may coincide, i.e. the MIA is an embedded IOLTS.
    pub fn is_degenerate(&self) -> bool {
        self.must == self.may
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Structural equality that ignores the model name.
    pub fn same_structure(&self, other: &Mia) -> bool {
        self.alphabet == other.alphabet
            && self.states == other.states
            && self.initial == other.initial
            && self.must == other.must
            && self.may == other.may
    }
}

impl Model for Mia {
    fn name(&self) -> &str {
        &self.name
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn state_names(&self) -> &[String] {
        &self.states
    }

    fn initial(&self) -> StateId {
        self.initial
    }

    fn edges(&self, state: StateId, modality: Modality) -> &[(ActionId, StateId)] {
        match modality {
            Modality::Must => &self.must.adjacency[state.0],
            Modality::May => &self.may.adjacency[state.0],
        }
    }
}

/// An I/O labelled transition system with a fixed initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iolts {
    name: String,
    alphabet: Alphabet,
    states: Vec<String>,
    initial: StateId,
    transitions: Relation,
}

impl Iolts {
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        states: Vec<String>,
        initial: StateId,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Result<Self, ModelError> {
        let transitions: BTreeSet<Transition> = transitions.into_iter().collect();
        let mut violations = alphabet_violations(&alphabet.inputs, &alphabet.outputs);
        violations.extend(structural_violations(
            &alphabet,
            &states,
            initial,
            transitions.iter(),
        ));
        if !violations.is_empty() {
            return Err(ModelError::Invalid(ValidationReport {
                violations,
                warnings: Vec::new(),
            }));
        }
        let n = states.len();
        Ok(Iolts {
            name: name.into(),
            alphabet,
            states,
            initial,
            transitions: Relation::new(n, transitions),
        })
    }

    pub fn transitions(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.set.iter()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.set.len()
    }

    /// The first (state, input) pair with two distinct targets, if any.
    pub fn input_nondeterminism(&self) -> Option<(StateId, ActionId)> {
        input_split(&self.alphabet, &self.transitions.set)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl Model for Iolts {
    fn name(&self) -> &str {
        &self.name
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn state_names(&self) -> &[String] {
        &self.states
    }

    fn initial(&self) -> StateId {
        self.initial
    }

    fn edges(&self, state: StateId, _modality: Modality) -> &[(ActionId, StateId)] {
        &self.transitions.adjacency[state.0]
    }
}

fn input_split(alphabet: &Alphabet, set: &BTreeSet<Transition>) -> Option<(StateId, ActionId)> {
    let mut targets: BTreeMap<(StateId, ActionId), StateId> = BTreeMap::new();
    for t in set.iter().filter(|t| alphabet.is_input(t.action)) {
        match targets.insert((t.source, t.action), t.target) {
            Some(prev) if prev != t.target => return Some((t.source, t.action)),
            _ => {}
        }
    }
    None
}

fn structural_violations<'a>(
    alphabet: &Alphabet,
    states: &[String],
    initial: StateId,
    transitions: impl Iterator<Item = &'a Transition>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if states.is_empty() {
        out.push(Violation::new(
            Rule::NoStates,
            None,
            "a model needs at least one state".to_string(),
        ));
    }
    let mut seen = BTreeSet::new();
    for s in states {
        if !seen.insert(s.as_str()) {
            out.push(Violation::new(
                Rule::DuplicateState,
                Some(s.clone()),
                format!("state `{s}` is declared twice"),
            ));
        }
    }
    if initial.0 >= states.len() {
        out.push(Violation::new(
            Rule::UnknownInitial,
            None,
            format!("initial state index {} is out of range", initial.0),
        ));
    }
    for t in transitions {
        for s in [t.source, t.target] {
            if s.0 >= states.len() {
                out.push(Violation::new(
                    Rule::UnknownState,
                    None,
                    format!("transition endpoint index {} is out of range", s.0),
                ));
            }
        }
        if t.action.0 >= alphabet.len() {
            out.push(Violation::new(
                Rule::UnknownAction,
                None,
                format!("action index {} is out of range", t.action.0),
            ));
        }
    }
    out
}

fn modal_violations(
    alphabet: &Alphabet,
    states: &[String],
    must: &BTreeSet<Transition>,
    may: &BTreeSet<Transition>,
) -> Vec<Violation> {
    let show = |t: &Transition| {
        format!(
            "({}, {}, {})",
            states[t.source.0],
            alphabet.name(t.action),
            states[t.target.0]
        )
    };
    let mut out = Vec::new();
    for t in must.difference(may) {
        out.push(Violation::new(
            Rule::SyntacticConsistency,
            Some(show(t)),
            format!("must transition {} is not a may transition", show(t)),
        ));
    }
    let mut first_target: BTreeMap<(StateId, ActionId), Transition> = BTreeMap::new();
    for t in must.iter().filter(|t| alphabet.is_input(t.action)) {
        if let Some(prev) = first_target.get(&(t.source, t.action)) {
            out.push(Violation::new(
                Rule::InputDeterminism,
                Some(show(t)),
                format!(
                    "input `{}` at `{}` leads to both `{}` and `{}`",
                    alphabet.name(t.action),
                    states[t.source.0],
                    states[prev.target.0],
                    states[t.target.0]
                ),
            ));
        } else {
            first_target.insert((t.source, t.action), *t);
        }
    }
    for t in may.difference(must) {
        if alphabet.is_input(t.action) {
            out.push(Violation::new(
                Rule::InputsMandatory,
                Some(show(t)),
                format!("input transition {} is optional", show(t)),
            ));
        }
    }
    out
}

/// Identifier of a validity rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    BadActionName,
    ReservedName,
    DuplicateAction,
    AlphabetNotDisjoint,
    NoStates,
    DuplicateState,
    UnknownInitial,
    UnknownState,
    UnknownAction,
    SyntacticConsistency,
    InputDeterminism,
    InputsMandatory,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::BadActionName => "bad-action-name",
            Rule::ReservedName => "reserved-name",
            Rule::DuplicateAction => "duplicate-action",
            Rule::AlphabetNotDisjoint => "alphabet-disjoint",
            Rule::NoStates => "no-states",
            Rule::DuplicateState => "duplicate-state",
            Rule::UnknownInitial => "unknown-initial",
            Rule::UnknownState => "unknown-state",
            Rule::UnknownAction => "unknown-action",
            Rule::SyntacticConsistency => "syntactic-consistency",
            Rule::InputDeterminism => "input-determinism",
            Rule::InputsMandatory => "inputs-mandatory",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    /// The offending state, action or transition, when there is one.
    pub location: Option<String>,
    /// Source line of the offending declaration, when known.
    pub line: Option<usize>,
    pub message: String,
}

impl Violation {
    fn new(rule: Rule, location: Option<String>, message: String) -> Self {
        Violation {
            rule,
            location,
            line: None,
            message,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        write!(f, "[{}] {}", self.rule, self.message)
    }
}

/// Outcome of [`validate_mia`]. `ok()` holds iff there are no violations;
/// warnings (unreachable states) do not affect validity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    Invalid(ValidationReport),
    InputNondeterministic { state: String, input: String },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Invalid(report) => {
                write!(f, "invalid model")?;
                for v in &report.violations {
                    write!(f, "\n  {v}")?;
                }
                Ok(())
            }
            ModelError::InputNondeterministic { state, input } => {
                write!(f, "input `{input}` is nondeterministic at state `{state}`")
            }
        }
    }
}

impl core::error::Error for ModelError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Mia,
    Iolts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransitionKind {
    Must,
    May,
    /// An IOLTS transition.
    Plain,
}

/// A name-based transition as written in a model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTransition {
    pub kind: TransitionKind,
    pub source: String,
    pub action: String,
    pub target: String,
    pub line: Option<usize>,
}

/// An unvalidated, name-based model description.
///
/// The `must` and `may` declarations are taken literally by
/// [`validate_mia`]; loaders that want "must implies may" call
/// [`Draft::close_may`] first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Draft {
    pub kind: ModelKind,
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: Option<String>,
    pub transitions: Vec<RawTransition>,
}

impl Draft {
    pub fn new(kind: ModelKind, name: impl Into<String>) -> Self {
        Draft {
            kind,
            name: name.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            states: Vec::new(),
            initial: None,
            transitions: Vec::new(),
        }
    }

    pub fn add(&mut self, kind: TransitionKind, source: &str, action: &str, target: &str) {
        self.transitions.push(RawTransition {
            kind,
            source: source.to_string(),
            action: action.to_string(),
            target: target.to_string(),
            line: None,
        });
    }

    /// Adds a may declaration for every must declaration lacking one.
    pub fn close_may(&mut self) {
        let declared: BTreeSet<(String, String, String)> = self
            .transitions
            .iter()
            .filter(|t| t.kind == TransitionKind::May)
            .map(|t| (t.source.clone(), t.action.clone(), t.target.clone()))
            .collect();
        let missing: Vec<RawTransition> = self
            .transitions
            .iter()
            .filter(|t| t.kind == TransitionKind::Must)
            .filter(|t| !declared.contains(&(t.source.clone(), t.action.clone(), t.target.clone())))
            .map(|t| RawTransition {
                kind: TransitionKind::May,
                ..t.clone()
            })
            .collect();
        self.transitions.extend(missing);
    }

    /// Resolves names, reporting unknown states or actions.
    fn resolve(&self) -> (ValidationReport, Option<Resolved>) {
        let mut report = ValidationReport {
            violations: alphabet_violations(&self.inputs, &self.outputs),
            warnings: Vec::new(),
        };
        let alphabet = Alphabet::new_unchecked(self.inputs.clone(), self.outputs.clone());
        let state_ix: BTreeMap<&str, StateId> = self
            .states
            .iter()
            .enumerate()
            .rev()
            .map(|(i, s)| (s.as_str(), StateId(i)))
            .collect();
        report.violations.extend(structural_violations(
            &alphabet,
            &self.states,
            StateId(0),
            core::iter::empty(),
        ));
        report.violations.retain(|v| v.rule != Rule::UnknownInitial);
        let initial = match &self.initial {
            None => {
                report.violations.push(Violation::new(
                    Rule::UnknownInitial,
                    None,
                    "no initial state declared".to_string(),
                ));
                None
            }
            Some(name) => match state_ix.get(name.as_str()) {
                Some(id) => Some(*id),
                None => {
                    report.violations.push(Violation::new(
                        Rule::UnknownInitial,
                        Some(name.clone()),
                        format!("initial state `{name}` is not declared"),
                    ));
                    None
                }
            },
        };
        let mut resolved = Resolved {
            alphabet,
            initial: initial.unwrap_or(StateId(0)),
            must: BTreeSet::new(),
            may: BTreeSet::new(),
            lines: BTreeMap::new(),
        };
        for raw in &self.transitions {
            let mut ok = true;
            let mut state = |name: &str| match state_ix.get(name) {
                Some(id) => Some(*id),
                None => {
                    let mut v = Violation::new(
                        Rule::UnknownState,
                        Some(name.to_string()),
                        format!("state `{name}` is not declared"),
                    );
                    v.line = raw.line;
                    report.violations.push(v);
                    ok = false;
                    None
                }
            };
            let source = state(&raw.source);
            let target = state(&raw.target);
            let action = resolved.alphabet.lookup(&raw.action);
            if action.is_none() {
                let mut v = Violation::new(
                    Rule::UnknownAction,
                    Some(raw.action.clone()),
                    format!("action `{}` is not in the alphabet", raw.action),
                );
                v.line = raw.line;
                report.violations.push(v);
                ok = false;
            }
            if let (true, Some(s), Some(a), Some(t)) = (ok, source, action, target) {
                let t = Transition::new(s, a, t);
                if let Some(line) = raw.line {
                    resolved.lines.entry(t).or_insert(line);
                }
                match raw.kind {
                    TransitionKind::Must => {
                        resolved.must.insert(t);
                    }
                    TransitionKind::May => {
                        resolved.may.insert(t);
                    }
                    TransitionKind::Plain => {
                        resolved.must.insert(t);
                        resolved.may.insert(t);
                    }
                }
            }
        }
        let complete = initial.is_some() && report.ok();
        (report, complete.then_some(resolved))
    }

    /// Builds a MIA, or returns the full validation report.
    pub fn build_mia(&self) -> Result<Mia, ModelError> {
        let report = validate_mia(self);
        if !report.ok() {
            return Err(ModelError::Invalid(report));
        }
        let (_, resolved) = self.resolve();
        let r = resolved.expect("validated draft resolves");
        Mia::new(
            self.name.clone(),
            r.alphabet,
            self.states.clone(),
            r.initial,
            r.must,
            r.may,
        )
    }

    /// Builds an IOLTS. Modalities are ignored: every declared transition
    /// becomes a plain transition.
    pub fn build_iolts(&self) -> Result<Iolts, ModelError> {
        let (report, resolved) = self.resolve();
        match resolved {
            Some(r) if report.ok() => Iolts::new(
                self.name.clone(),
                r.alphabet,
                self.states.clone(),
                r.initial,
                r.may.into_iter().chain(r.must),
            ),
            _ => Err(ModelError::Invalid(report)),
        }
    }
}

struct Resolved {
    alphabet: Alphabet,
    initial: StateId,
    must: BTreeSet<Transition>,
    may: BTreeSet<Transition>,
    lines: BTreeMap<Transition, usize>,
}

/// Lists every violated MIA invariant of a candidate model. Never fails.
///
/// Unreachable states are reported as warnings.
pub fn validate_mia(draft: &Draft) -> ValidationReport {
    let (mut report, resolved) = draft.resolve();
    let Some(r) = resolved else {
        return report;
    };
    let mut modal = modal_violations(&r.alphabet, &draft.states, &r.must, &r.may);
    for v in &mut modal {
        // pinpoint the declaration line of the offending transition
        v.line = r
            .lines
            .iter()
            .find(|(t, _)| {
                v.location.as_deref()
                    == Some(
                        format!(
                            "({}, {}, {})",
                            draft.states[t.source.0],
                            r.alphabet.name(t.action),
                            draft.states[t.target.0]
                        )
                        .as_str(),
                    )
            })
            .map(|(_, l)| *l);
    }
    report.violations.extend(modal);
    if report.ok() {
        let n = draft.states.len();
        let probe = Mia {
            name: draft.name.clone(),
            alphabet: r.alphabet.clone(),
            states: draft.states.clone(),
            initial: r.initial,
            must: Relation::new(n, r.must),
            may: Relation::new(n, r.may),
        };
        for s in probe.unreachable_states() {
            report
                .warnings
                .push(format!("state `{}` is unreachable", probe.state_name(s)));
        }
    }
    report
}

/// Views an input-deterministic IOLTS as the MIA with must = may.
pub fn embed_iolts(p: &Iolts) -> Result<Mia, ModelError> {
    if let Some((state, input)) = p.input_nondeterminism() {
        return Err(ModelError::InputNondeterministic {
            state: p.state_name(state).to_string(),
            input: p.alphabet.name(input).to_string(),
        });
    }
    let set = p.transitions.set.clone();
    Mia::new(
        p.name.clone(),
        p.alphabet.clone(),
        p.states.clone(),
        p.initial,
        set.clone(),
        set,
    )
}

/// The family LTS: the IOLTS made of all may transitions of `q`.
pub fn famlts(q: &Mia) -> Iolts {
    Iolts {
        name: q.name.clone(),
        alphabet: q.alphabet.clone(),
        states: q.states.clone(),
        initial: q.initial,
        transitions: q.may.clone(),
    }
}

/// Result of [`input_enabledness`]: every (state, input) pair lacking a
/// (must) transition, in state then input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputEnabledness {
    pub missing: Vec<(StateId, ActionId)>,
}

impl InputEnabledness {
    pub fn is_enabled(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Input-enabledness over must transitions (for an IOLTS, its only relation).
pub fn input_enabledness<M: Model + ?Sized>(m: &M) -> InputEnabledness {
    let mut missing = Vec::new();
    for q in m.states() {
        let edges = m.edges(q, Modality::Must);
        for i in m.alphabet().input_ids() {
            if !edges.iter().any(|(a, _)| *a == i) {
                missing.push((q, i));
            }
        }
    }
    InputEnabledness { missing }
}
