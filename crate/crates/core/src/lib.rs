//! Modal interface automata (MIA) for product-line conformance testing.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`model`]: alphabets, MIAs, IOLTSs, validation, IOLTS embedding and the
//!   family LTS of a MIA.
//! * [`semantics`]: modal `init`, quiescence, `after`, `Out` and suspension
//!   traces over suspension views.
//! * [`refinement`]: MIA refinement (alternating simulation) as a greatest
//!   fixpoint, variant derivation and trace lifting.
//! * [`conformance`]: `ioco`, `mior` and `mioco` with replayable witnesses.
//! * [`completion`]: angelic and chaotic input completion.
//! * [`family`]: variant enumeration, random models and the theorem harness.
#![no_std]

extern crate alloc;

pub mod completion;
pub mod conformance;
pub mod family;
pub mod model;
pub mod refinement;
pub mod semantics;

mod stateset;

pub use completion::{angelic_completion, chaotic_completion, ChaoticCompletion};
pub use conformance::{
    ioco_check, mioco_check, mior_check, Clause, ConformanceError, ExplorationLimits, Verdict,
    Witness,
};
pub use model::{
    embed_iolts, famlts, input_enabledness, validate_mia, ActionId, Alphabet, Draft,
    InputEnabledness, Iolts, Mia, Model, ModelError, ModelKind, RawTransition, Rule, StateId,
    Transition, TransitionKind, ValidationReport, Violation,
};
pub use refinement::{
    check_lemma1_trace_lifting, is_variant_of, mia_refines, RefinementError, RefinementOutcome,
    RefinementRelation, VariantMode,
};
pub use semantics::{Modality, OutSet, Symbol, Trace};
pub use stateset::StateSet;
