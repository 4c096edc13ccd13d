//! Input completions. Both add transitions only; existing ones are kept.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{Mia, Model, StateId, Transition};
use crate::semantics::Modality;

/// Base name of the fresh sink added by chaotic completion.
pub const CHAOS_STATE: &str = "__chaos";

fn missing_inputs(m: &Mia, modality: Modality) -> Vec<(StateId, crate::model::ActionId)> {
    let mut out = Vec::new();
    for q in m.states() {
        for i in m.alphabet().input_ids() {
            if !m.edges(q, modality).iter().any(|(a, _)| *a == i) {
                out.push((q, i));
            }
        }
    }
    out
}

/// Ignores unspecified inputs: adds a must (and may) self-loop for every
/// state and input without a must transition. Idempotent.
pub fn angelic_completion(m: &Mia) -> Mia {
    let must_gaps = missing_inputs(m, Modality::Must);
    // inputs are mandatory, so must and may gaps coincide
    debug_assert_eq!(must_gaps, missing_inputs(m, Modality::May));
    let loops = must_gaps.iter().map(|&(q, i)| Transition::new(q, i, q));
    Mia::new(
        m.name(),
        m.alphabet().clone(),
        m.state_names().to_vec(),
        m.initial(),
        m.must_transitions().copied().chain(loops.clone()),
        m.may_transitions().copied().chain(loops),
    )
    .expect("angelic completion preserves validity")
}

#[derive(Clone, Debug)]
pub struct ChaoticCompletion {
    pub mia: Mia,
    /// The fresh error sink.
    pub sink: StateId,
}

impl ChaoticCompletion {
    pub fn sink_name(&self) -> &str {
        self.mia.state_name(self.sink)
    }
}

/// A state name starting with `base` that `m` does not use.
pub fn fresh_state_name(m: &Mia, base: &str) -> String {
    if m.state_id(base).is_none() {
        return String::from(base);
    }
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| m.state_id(n).is_none())
        .expect("unbounded supply of names")
}

/// Routes every unspecified input to a fresh output-less sink that accepts
/// every input. The sink is added even when `m` is already input-enabled.
pub fn chaotic_completion(m: &Mia) -> ChaoticCompletion {
    let mut states = m.state_names().to_vec();
    let sink = StateId(states.len());
    states.push(fresh_state_name(m, CHAOS_STATE));
    let gaps = missing_inputs(m, Modality::Must);
    debug_assert_eq!(gaps, missing_inputs(m, Modality::May));
    let added: Vec<Transition> = gaps
        .iter()
        .map(|&(q, i)| Transition::new(q, i, sink))
        .chain(m.alphabet().input_ids().map(|i| Transition::new(sink, i, sink)))
        .collect();
    let mia = Mia::new(
        m.name(),
        m.alphabet().clone(),
        states,
        m.initial(),
        m.must_transitions().copied().chain(added.iter().copied()),
        m.may_transitions().copied().chain(added.iter().copied()),
    )
    .expect("chaotic completion preserves validity");
    ChaoticCompletion { mia, sink }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{input_enabledness, ActionId, Alphabet};
    use crate::semantics::is_quiescent;
    use alloc::vec;

    fn single_input() -> Mia {
        let alphabet = Alphabet::new(["a"], Vec::<String>::new()).unwrap();
        Mia::new("m", alphabet, vec!["q".into()], StateId(0), [], []).unwrap()
    }

    #[test]
    fn angelic_adds_one_self_loop() {
        let ac = angelic_completion(&single_input());
        let loops: Vec<_> = ac.must_transitions().copied().collect();
        assert_eq!(loops, [Transition::new(StateId(0), ActionId(0), StateId(0))]);
        assert!(input_enabledness(&ac).is_enabled());
        assert_eq!(angelic_completion(&ac), ac);
    }

    #[test]
    fn chaotic_adds_quiescent_sink() {
        let cc = chaotic_completion(&single_input());
        assert_eq!(cc.sink_name(), CHAOS_STATE);
        assert!(input_enabledness(&cc.mia).is_enabled());
        assert!(is_quiescent(&cc.mia, cc.sink, Modality::Must).unwrap());
        assert!(is_quiescent(&cc.mia, cc.sink, Modality::May).unwrap());
        // the sink name never collides
        let again = chaotic_completion(&cc.mia);
        assert_eq!(again.sink_name(), "__chaos_1");
        assert_eq!(again.mia.state_count(), 3);
    }
}
