//! Brute-force reference semantics, written directly from the definitions
//! over explicit transition lists. Shares nothing with the library beyond
//! the model accessors.

#![allow(dead_code)]

use std::collections::BTreeSet;

use mia_core::family::{random_mia, GeneratorConfig};
use mia_core::{ActionId, Iolts, Mia, Model, StateId};

/// `None` stands for quiescence.
pub type Sym = Option<ActionId>;

#[derive(Clone, Debug)]
pub struct Naive {
    pub states: usize,
    pub init: usize,
    pub inputs: BTreeSet<ActionId>,
    pub outputs: BTreeSet<ActionId>,
    pub must: Vec<(usize, ActionId, usize)>,
    pub may: Vec<(usize, ActionId, usize)>,
    /// Actions and δ, ordered by display name.
    pub symbols: Vec<Sym>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Must,
    May,
}

fn symbol_order<M: Model>(m: &M) -> Vec<Sym> {
    let a = m.alphabet();
    let mut named: Vec<(String, Sym)> = a
        .action_ids()
        .map(|id| (a.name(id).to_string(), Some(id)))
        .collect();
    named.push(("delta".to_string(), None));
    named.sort();
    named.into_iter().map(|(_, s)| s).collect()
}

impl Naive {
    pub fn of_mia(m: &Mia) -> Self {
        let tr = |it: &mut dyn Iterator<Item = &mia_core::Transition>| {
            it.map(|t| (t.source.0, t.action, t.target.0)).collect()
        };
        Naive {
            states: m.state_count(),
            init: m.initial().0,
            inputs: m.alphabet().input_ids().collect(),
            outputs: m.alphabet().output_ids().collect(),
            must: tr(&mut m.must_transitions()),
            may: tr(&mut m.may_transitions()),
            symbols: symbol_order(m),
        }
    }

    pub fn of_iolts(p: &Iolts) -> Self {
        let all: Vec<_> = p.transitions().map(|t| (t.source.0, t.action, t.target.0)).collect();
        Naive {
            states: p.state_count(),
            init: p.initial().0,
            inputs: p.alphabet().input_ids().collect(),
            outputs: p.alphabet().output_ids().collect(),
            must: all.clone(),
            may: all,
            symbols: symbol_order(p),
        }
    }

    fn rel(&self, mode: Mode) -> &[(usize, ActionId, usize)] {
        match mode {
            Mode::Must => &self.must,
            Mode::May => &self.may,
        }
    }

    pub fn init(&self, q: usize, mode: Mode) -> BTreeSet<ActionId> {
        self.rel(mode).iter().filter(|t| t.0 == q).map(|t| t.1).collect()
    }

    /// May-quiescence looks at must-enabled actions and vice versa.
    pub fn quiescent(&self, q: usize, mode: Mode) -> bool {
        let other = match mode {
            Mode::May => Mode::Must,
            Mode::Must => Mode::May,
        };
        self.init(q, other).is_subset(&self.inputs)
    }

    pub fn step(&self, set: &BTreeSet<usize>, sym: Sym, mode: Mode) -> BTreeSet<usize> {
        match sym {
            None => set.iter().copied().filter(|&q| self.quiescent(q, mode)).collect(),
            Some(a) => self
                .rel(mode)
                .iter()
                .filter(|t| t.1 == a && set.contains(&t.0))
                .map(|t| t.2)
                .collect(),
        }
    }

    pub fn after(&self, trace: &[Sym], mode: Mode) -> BTreeSet<usize> {
        let mut set = BTreeSet::from([self.init]);
        for s in trace {
            set = self.step(&set, *s, mode);
        }
        set
    }

    pub fn out(&self, set: &BTreeSet<usize>, mode: Mode) -> BTreeSet<Sym> {
        let mut out: BTreeSet<Sym> = self
            .rel(mode)
            .iter()
            .filter(|t| set.contains(&t.0) && self.outputs.contains(&t.1))
            .map(|t| Some(t.1))
            .collect();
        if set.iter().any(|&q| self.quiescent(q, mode)) {
            out.insert(None);
        }
        out
    }

    /// Suspension traces up to `len`, in shortlex order (symbols by name).
    pub fn straces(&self, mode: Mode, len: usize) -> Vec<Vec<Sym>> {
        let mut all = vec![vec![]];
        let mut layer = vec![(vec![], BTreeSet::from([self.init]))];
        for _ in 0..len {
            let mut next = Vec::new();
            for (trace, set) in &layer {
                for &s in &self.symbols {
                    let after = self.step(set, s, mode);
                    if !after.is_empty() {
                        let mut t: Vec<Sym> = trace.clone();
                        t.push(s);
                        all.push(t.clone());
                        next.push((t, after));
                    }
                }
            }
            layer = next;
        }
        all
    }

    pub fn rank(&self, s: Sym) -> usize {
        self.symbols.iter().position(|x| *x == s).unwrap()
    }
}

/// First (shortlex) σ in `universe`'s traces, with the first symbol by name,
/// such that `Out(lhs after σ) ⊄ Out(rhs after σ)`.
pub fn out_inclusion(
    universe: &Naive,
    lhs: &Naive,
    rhs: &Naive,
    mode: Mode,
    len: usize,
) -> Option<(Vec<Sym>, Sym)> {
    for sigma in universe.straces(mode, len) {
        let l = lhs.out(&lhs.after(&sigma, mode), mode);
        let r = rhs.out(&rhs.after(&sigma, mode), mode);
        if let Some(x) = l.difference(&r).min_by_key(|s| lhs.rank(**s)) {
            return Some((sigma, *x));
        }
    }
    None
}

/// First σ·x with σ·x a trace of `i` but not of `s` (σ a trace of both).
pub fn trace_inclusion(i: &Naive, s: &Naive, mode: Mode, len: usize) -> Option<(Vec<Sym>, Sym)> {
    for sigma in i.straces(mode, len) {
        let si = s.after(&sigma, mode);
        if si.is_empty() {
            continue;
        }
        let ii = i.after(&sigma, mode);
        for &x in &i.symbols {
            if !i.step(&ii, x, mode).is_empty() && s.step(&si, x, mode).is_empty() {
                return Some((sigma, x));
            }
        }
    }
    None
}

pub fn ioco(i: &Naive, s: &Naive, len: usize) -> Option<(Vec<Sym>, Sym)> {
    out_inclusion(s, i, s, Mode::May, len)
}

/// Returns the witness and whether it comes from the must clause.
pub fn mioco(i: &Naive, s: &Naive, len: usize) -> Option<(Vec<Sym>, Sym, bool)> {
    let may = out_inclusion(s, i, s, Mode::May, len);
    let must = out_inclusion(i, s, i, Mode::Must, len);
    match (may, must) {
        (None, None) => None,
        (Some((t, x)), None) => Some((t, x, false)),
        (None, Some((t, x))) => Some((t, x, true)),
        (Some((a, x)), Some((b, y))) => {
            if b.len() <= a.len() {
                Some((b, y, true))
            } else {
                Some((a, x, false))
            }
        }
    }
}

pub fn mior(i: &Naive, s: &Naive, len: usize) -> Option<(Vec<Sym>, Sym, Mode)> {
    let may = trace_inclusion(i, s, Mode::May, len);
    let must = trace_inclusion(i, s, Mode::Must, len);
    match (may, must) {
        (None, None) => None,
        (Some((t, x)), None) => Some((t, x, Mode::May)),
        (None, Some((t, x))) => Some((t, x, Mode::Must)),
        (Some((a, x)), Some((b, y))) => {
            if b.len() < a.len() {
                Some((b, y, Mode::Must))
            } else {
                Some((a, x, Mode::May))
            }
        }
    }
}

/// Converts a library trace to oracle symbols.
pub fn syms(t: &mia_core::Trace) -> Vec<Sym> {
    t.symbols()
        .iter()
        .map(|s| match s {
            mia_core::Symbol::Action(a) => Some(*a),
            mia_core::Symbol::Delta => None,
        })
        .collect()
}

pub fn sym(s: mia_core::Symbol) -> Sym {
    match s {
        mia_core::Symbol::Action(a) => Some(a),
        mia_core::Symbol::Delta => None,
    }
}

/// A small random MIA; the alphabet depends only on `inputs`/`outputs`.
pub fn small(seed: u64, states: usize, inputs: usize, outputs: usize, ie: bool) -> Mia {
    random_mia(&GeneratorConfig {
        seed,
        state_count: states,
        input_count: inputs,
        output_count: outputs,
        transition_density: 0.6,
        optional_fraction: 0.4,
        ensure_input_enabled: ie,
    })
    .unwrap()
}

pub fn state(m: &impl Model, name: &str) -> StateId {
    m.state_id(name).unwrap()
}
