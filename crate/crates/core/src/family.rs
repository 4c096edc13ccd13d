//! Product variants, random models and the brute-force theorem harness.
//!
//! A variant of a MIA keeps every must transition and some subset of the
//! optional (may but not must) transitions, over the MIA's own state space.
//! Variants are numbered by a bitmask over the canonical list of optional
//! transitions; enumeration runs in ascending mask order.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conformance::{ioco_check, mioco_check, ConformanceError, Verdict, Witness};
use crate::model::{
    famlts, input_enabledness, ActionId, Alphabet, Iolts, Mia, Model, StateId, Transition,
};
use crate::refinement::{mia_refines, RefinementRelation};
use crate::semantics::{symbols_by_name, Modality, SuspensionView, Trace};
use crate::stateset::StateSet;

pub const DEFAULT_CAP: usize = 4096;

/// Selection of optional transitions; bit `j` selects optional transition `j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariantMask(Vec<bool>);

impl VariantMask {
    pub fn from_index(index: u128, len: usize) -> Self {
        VariantMask((0..len).map(|j| j < 128 && index >> j & 1 == 1).collect())
    }

    pub fn all(len: usize, value: bool) -> Self {
        VariantMask(alloc::vec![value; len])
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn selected(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }
}

impl fmt::Display for VariantMask {
    /// Most significant bit first, like the binary numeral of the index.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for b in self.0.iter().rev() {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Variant {
    pub mask: VariantMask,
    pub iolts: Iolts,
}

/// Lazily enumerated variants of a MIA, in ascending mask order, stopping
/// after `cap` variants.
#[derive(Clone, Debug)]
pub struct VariantSet<'a> {
    base: &'a Mia,
    optional: Vec<Transition>,
    cap: usize,
    next: u128,
    emitted: usize,
}

impl<'a> VariantSet<'a> {
    pub fn new(base: &'a Mia, cap: usize) -> Self {
        VariantSet {
            base,
            optional: base.optional_transitions(),
            cap,
            next: 0,
            emitted: 0,
        }
    }

    pub fn base(&self) -> &'a Mia {
        self.base
    }

    pub fn optional(&self) -> &[Transition] {
        &self.optional
    }

    /// The variant count is `2^exponent`.
    pub fn exponent(&self) -> usize {
        self.optional.len()
    }

    /// Exact variant count when it fits in a `u128`.
    pub fn total(&self) -> Option<u128> {
        1u128.checked_shl(self.optional.len() as u32)
    }

    /// Whether enumeration stops before every variant is produced.
    pub fn truncated(&self) -> bool {
        self.total().map_or(true, |t| t > self.cap as u128)
    }

    pub fn variant(&self, mask: &VariantMask) -> Iolts {
        let chosen = self
            .optional
            .iter()
            .zip(mask.bits())
            .filter(|(_, b)| **b)
            .map(|(t, _)| *t);
        Iolts::new(
            self.base.name(),
            self.base.alphabet().clone(),
            self.base.state_names().to_vec(),
            self.base.initial(),
            self.base.must_transitions().copied().chain(chosen),
        )
        .expect("variant of a valid MIA")
    }

    /// `cap` distinct masks drawn uniformly, in ascending order.
    pub fn sample(&self, seed: u64) -> Vec<VariantMask> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let want = match self.total() {
            Some(t) if t <= self.cap as u128 => t as usize,
            _ => self.cap,
        };
        let mut masks = BTreeSet::new();
        while masks.len() < want {
            let bits = (0..self.optional.len()).map(|_| rng.gen_bool(0.5)).collect();
            masks.insert(VariantMask(bits));
        }
        masks.into_iter().collect()
    }
}

impl Iterator for VariantSet<'_> {
    type Item = Variant;

    fn next(&mut self) -> Option<Variant> {
        if self.emitted >= self.cap || self.total().is_some_and(|t| self.next >= t) {
            return None;
        }
        let mask = VariantMask::from_index(self.next, self.optional.len());
        self.next += 1;
        self.emitted += 1;
        let iolts = self.variant(&mask);
        Some(Variant { mask, iolts })
    }
}

/// Variants of `q`, at most `cap` of them; check
/// [`VariantSet::truncated`] for the truncation marker.
pub fn enumerate_variants(q: &Mia, cap: usize) -> VariantSet<'_> {
    VariantSet::new(q, cap)
}

/// The masks a harness run checks: all of them when they fit under the cap,
/// otherwise a seeded uniform sample.
fn masks_for(set: &VariantSet<'_>, seed: u64) -> (Vec<VariantMask>, bool) {
    if set.truncated() {
        (set.sample(seed), true)
    } else {
        let n = set.total().expect("fits under cap") as u128;
        (
            (0..n)
                .map(|k| VariantMask::from_index(k, set.exponent()))
                .collect(),
            false,
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub state_count: usize,
    pub input_count: usize,
    pub output_count: usize,
    /// Probability of each input transition, and expected number of
    /// transitions per (state, output).
    pub transition_density: f64,
    /// Probability that a generated output transition is optional.
    pub optional_fraction: f64,
    pub ensure_input_enabled: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            state_count: 4,
            input_count: 1,
            output_count: 2,
            transition_density: 0.5,
            optional_fraction: 0.4,
            ensure_input_enabled: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorError {
    InfeasibleConfig(String),
}

impl fmt::Display for GeneratorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorError::InfeasibleConfig(why) => write!(f, "infeasible generator config: {why}"),
        }
    }
}

impl core::error::Error for GeneratorError {}

impl GeneratorConfig {
    pub fn check(&self) -> Result<(), GeneratorError> {
        let bad = |why: &str| Err(GeneratorError::InfeasibleConfig(String::from(why)));
        if self.state_count == 0 {
            return bad("state_count must be at least 1");
        }
        if self.input_count == 0 && self.output_count == 0 {
            return bad("inputs and outputs cannot both be empty");
        }
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.transition_density) {
            return bad("transition_density must lie in [0, 1]");
        }
        if !unit(self.optional_fraction) {
            return bad("optional_fraction must lie in [0, 1]");
        }
        if self.ensure_input_enabled && self.transition_density == 0.0 && self.input_count > 0 {
            return bad("density 0 contradicts ensure_input_enabled with inputs");
        }
        Ok(())
    }
}

/// A random valid MIA; deterministic for a fixed config.
///
/// Inputs are named `i0, i1, ...`, outputs `o0, o1, ...`, states
/// `q0, q1, ...` with `q0` initial.
pub fn random_mia(cfg: &GeneratorConfig) -> Result<Mia, GeneratorError> {
    cfg.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.state_count;
    let alphabet = Alphabet::new(
        (0..cfg.input_count).map(|k| format!("i{k}")),
        (0..cfg.output_count).map(|k| format!("o{k}")),
    )
    .expect("generated names are valid");
    let mut must = Vec::new();
    let mut may = Vec::new();
    for q in 0..n {
        for i in alphabet.input_ids() {
            if cfg.ensure_input_enabled || rng.gen_bool(cfg.transition_density) {
                let t = Transition::new(StateId(q), i, StateId(rng.gen_range(0..n)));
                must.push(t);
                may.push(t);
            }
        }
        let per_target = cfg.transition_density / n as f64;
        for o in alphabet.output_ids() {
            for target in 0..n {
                if rng.gen_bool(per_target) {
                    let t = Transition::new(StateId(q), o, StateId(target));
                    may.push(t);
                    if !rng.gen_bool(cfg.optional_fraction) {
                        must.push(t);
                    }
                }
            }
        }
    }
    let states = (0..n).map(|k| format!("q{k}")).collect();
    Ok(Mia::new(
        format!("random-{}", cfg.seed),
        alphabet,
        states,
        StateId(0),
        must,
        may,
    )
    .expect("generator output is a valid MIA"))
}

/// How one optional transition is resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolution {
    Drop,
    KeepOptional,
    Promote,
}

/// Applies one resolution per optional transition (canonical order). The
/// result shares `q`'s state space and refines `q` via the identity.
pub fn resolve_with(q: &Mia, choices: &[Resolution]) -> Mia {
    let optional = q.optional_transitions();
    assert_eq!(optional.len(), choices.len(), "one choice per optional transition");
    let mut must: Vec<Transition> = q.must_transitions().copied().collect();
    let mut may = must.clone();
    for (t, c) in optional.iter().zip(choices) {
        match c {
            Resolution::Drop => {}
            Resolution::KeepOptional => may.push(*t),
            Resolution::Promote => {
                must.push(*t);
                may.push(*t);
            }
        }
    }
    let r = Mia::new(
        q.name(),
        q.alphabet().clone(),
        q.state_names().to_vec(),
        q.initial(),
        must,
        may,
    )
    .expect("resolution preserves validity");
    debug_assert!(mia_refines(&r, q).expect("same alphabet").holds());
    r
}

/// A seeded random refinement of `q`: every optional transition is dropped,
/// kept optional, or promoted to must with equal probability.
pub fn resolve_refinement(q: &Mia, seed: u64) -> Mia {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices: Vec<Resolution> = q
        .optional_transitions()
        .iter()
        .map(|_| match rng.gen_range(0..3) {
            0 => Resolution::Drop,
            1 => Resolution::KeepOptional,
            _ => Resolution::Promote,
        })
        .collect();
    resolve_with(q, &choices)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    Soundness,
    CompletenessI,
    CompletenessII,
    /// Refinement preserves mioco.
    Prop2,
}

impl Theorem {
    pub fn id(self) -> &'static str {
        match self {
            Theorem::Soundness => "soundness",
            Theorem::CompletenessI => "completeness1",
            Theorem::CompletenessII => "completeness2",
            Theorem::Prop2 => "prop2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarnessStatus {
    /// The hypotheses held and so did the conclusion.
    Passed,
    /// The hypotheses did not hold; nothing to check.
    VacuousPass,
    /// A precondition of the statement (input-enabledness, refinement) is
    /// not met.
    Skipped,
    /// Sampling could not establish a universal hypothesis.
    Inconclusive,
    Violated,
}

impl HarnessStatus {
    pub fn id(self) -> &'static str {
        match self {
            HarnessStatus::Passed => "passed",
            HarnessStatus::VacuousPass => "vacuous-pass",
            HarnessStatus::Skipped => "skipped",
            HarnessStatus::Inconclusive => "inconclusive",
            HarnessStatus::Violated => "THEOREM VIOLATION",
        }
    }
}

/// A reproduction bundle for one theorem violation.
#[derive(Clone, Debug)]
pub struct TheoremViolation {
    pub mask: Option<VariantMask>,
    /// The ioco witness of the failing variant, if one is involved.
    pub variant_witness: Option<Witness>,
    /// The mioco verdict that contradicts the theorem, if one is involved.
    pub mioco: Option<Verdict>,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct HarnessReport {
    pub theorem: Theorem,
    pub status: HarnessStatus,
    pub detail: String,
    pub seed: u64,
    pub cap: usize,
    /// Variants total `2^optional_count`.
    pub optional_count: usize,
    pub variants_checked: usize,
    pub sampled: bool,
    pub violations: Vec<TheoremViolation>,
}

impl HarnessReport {
    fn new(theorem: Theorem, cfg: &HarnessConfig, optional_count: usize) -> Self {
        HarnessReport {
            theorem,
            status: HarnessStatus::Passed,
            detail: String::new(),
            seed: cfg.seed,
            cap: cfg.cap,
            optional_count,
            variants_checked: 0,
            sampled: false,
            violations: Vec::new(),
        }
    }

    fn finish(mut self, status: HarnessStatus, detail: impl Into<String>) -> Self {
        self.status = status;
        self.detail = detail.into();
        self
    }

    pub fn is_violation(&self) -> bool {
        self.status == HarnessStatus::Violated
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HarnessConfig {
    pub cap: usize,
    /// Seeds sampling beyond the cap and prop2's random refinement.
    pub seed: u64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            cap: DEFAULT_CAP,
            seed: 0,
        }
    }
}

/// Soundness: if `i mioco s` then every variant of `i` is ioco-conformant to
/// some variant of `s`. The witness variant is `famlts(s)`, as in the
/// correctness argument.
pub fn verify_soundness(i: &Mia, s: &Mia, cfg: HarnessConfig) -> Result<HarnessReport, ConformanceError> {
    let variants = VariantSet::new(i, cfg.cap);
    let mut report = HarnessReport::new(Theorem::Soundness, &cfg, variants.exponent());
    if !input_enabledness(i).is_enabled() {
        return Ok(report.finish(HarnessStatus::Skipped, "implementation is not input-enabled"));
    }
    if !mioco_check(i, s)?.holds {
        return Ok(report.finish(HarnessStatus::VacuousPass, "i mioco s does not hold"));
    }
    let spec = famlts(s);
    let (masks, sampled) = masks_for(&variants, cfg.seed);
    report.sampled = sampled;
    for mask in masks {
        let v = variants.variant(&mask);
        report.variants_checked += 1;
        let verdict = ioco_check(&v, &spec)?;
        if !verdict.holds {
            report.violations.push(TheoremViolation {
                mask: Some(mask),
                variant_witness: verdict.witness,
                mioco: None,
                message: String::from("variant is not ioco famlts(s) although i mioco s"),
            });
        }
    }
    let status = if report.violations.is_empty() {
        HarnessStatus::Passed
    } else {
        HarnessStatus::Violated
    };
    Ok(report.finish(status, ""))
}

/// Completeness I: with `i ≤ s`, if every variant of `i` is ioco
/// `famlts(s)`, then `i mioco s`.
pub fn verify_completeness_i(
    i: &Mia,
    s: &Mia,
    cfg: HarnessConfig,
) -> Result<HarnessReport, ConformanceError> {
    let variants = VariantSet::new(i, cfg.cap);
    let mut report = HarnessReport::new(Theorem::CompletenessI, &cfg, variants.exponent());
    if !input_enabledness(i).is_enabled() {
        return Ok(report.finish(HarnessStatus::Skipped, "implementation is not input-enabled"));
    }
    let refines = mia_refines(i, s).map_err(|_| ConformanceError::AlphabetMismatch)?;
    if !refines.holds() {
        return Ok(report.finish(HarnessStatus::Skipped, "i does not refine s"));
    }
    let spec = famlts(s);
    let (masks, sampled) = masks_for(&variants, cfg.seed);
    report.sampled = sampled;
    for mask in masks {
        let v = variants.variant(&mask);
        report.variants_checked += 1;
        if !ioco_check(&v, &spec)?.holds {
            return Ok(report.finish(HarnessStatus::VacuousPass, "some variant is not ioco famlts(s)"));
        }
    }
    let mioco = mioco_check(i, s)?;
    if mioco.holds {
        return Ok(report.finish(HarnessStatus::Passed, ""));
    }
    if sampled {
        return Ok(report.finish(
            HarnessStatus::Inconclusive,
            "sampled variants all conform but i mioco s fails",
        ));
    }
    report.violations.push(TheoremViolation {
        mask: None,
        variant_witness: None,
        mioco: Some(mioco),
        message: String::from("all variants conform to famlts(s) but i mioco s fails"),
    });
    Ok(report.finish(HarnessStatus::Violated, ""))
}

/// Completeness II: if some variant of `i` is not ioco `famlts(s)`, then
/// `i mioco s` fails.
pub fn verify_completeness_ii(
    i: &Mia,
    s: &Mia,
    cfg: HarnessConfig,
) -> Result<HarnessReport, ConformanceError> {
    let variants = VariantSet::new(i, cfg.cap);
    let mut report = HarnessReport::new(Theorem::CompletenessII, &cfg, variants.exponent());
    if !input_enabledness(i).is_enabled() {
        return Ok(report.finish(HarnessStatus::Skipped, "implementation is not input-enabled"));
    }
    let spec = famlts(s);
    let (masks, sampled) = masks_for(&variants, cfg.seed);
    report.sampled = sampled;
    for mask in masks {
        let v = variants.variant(&mask);
        report.variants_checked += 1;
        let verdict = ioco_check(&v, &spec)?;
        if verdict.holds {
            continue;
        }
        let mioco = mioco_check(i, s)?;
        if mioco.holds {
            report.violations.push(TheoremViolation {
                mask: Some(mask),
                variant_witness: verdict.witness,
                mioco: Some(mioco),
                message: String::from("a variant is not ioco famlts(s) but i mioco s holds"),
            });
            return Ok(report.finish(HarnessStatus::Violated, ""));
        }
        return Ok(report.finish(HarnessStatus::Passed, ""));
    }
    Ok(report.finish(HarnessStatus::VacuousPass, "every checked variant conforms"))
}

/// Refinement preserves mioco: for `i' = resolve_refinement(i, seed)`,
/// `i mioco s` implies `i' mioco s`.
pub fn verify_prop2(i: &Mia, s: &Mia, cfg: HarnessConfig) -> Result<HarnessReport, ConformanceError> {
    let mut report = HarnessReport::new(Theorem::Prop2, &cfg, i.optional_transitions().len());
    if !input_enabledness(i).is_enabled() {
        return Ok(report.finish(HarnessStatus::Skipped, "implementation is not input-enabled"));
    }
    if !mioco_check(i, s)?.holds {
        return Ok(report.finish(HarnessStatus::VacuousPass, "i mioco s does not hold"));
    }
    let refined = resolve_refinement(i, cfg.seed);
    let verdict = match mioco_check(&refined, s) {
        Ok(v) => v,
        Err(ConformanceError::NotInputEnabled { .. }) => {
            report.violations.push(TheoremViolation {
                mask: None,
                variant_witness: None,
                mioco: None,
                message: String::from("refinement of an input-enabled MIA is not input-enabled"),
            });
            return Ok(report.finish(HarnessStatus::Violated, ""));
        }
        Err(e) => return Err(e),
    };
    if verdict.holds {
        return Ok(report.finish(HarnessStatus::Passed, ""));
    }
    report.violations.push(TheoremViolation {
        mask: None,
        variant_witness: None,
        mioco: Some(verdict),
        message: format!("resolve_refinement(i, {}) mioco s fails", cfg.seed),
    });
    Ok(report.finish(HarnessStatus::Violated, ""))
}

/// A trace after which some state of one side has no refinement partner on
/// the other side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutstateCounterexample {
    pub modality: Modality,
    pub trace: Trace,
    /// The unmatched state (of `p` for the may clause, of `q` for the must
    /// clause).
    pub state: StateId,
}

/// Checks that refinement pairs up the γ-after-sets of `p ≤ q` over
/// suspension traces up to `max_len`:
///
/// * may: if `q after◇ σ ≠ ∅`, every `p' ∈ p after◇ σ` refines some
///   `q' ∈ q after◇ σ`;
/// * must: if `p after□ σ ≠ ∅`, every `q' ∈ q after□ σ` is refined by some
///   `p' ∈ p after□ σ`.
///
/// Returns `None` when `p ≤ q` does not hold.
pub fn outstate_counterexample(p: &Mia, q: &Mia, max_len: usize) -> Option<Option<OutstateCounterexample>> {
    let outcome = mia_refines(p, q).ok()?;
    if !outcome.holds() {
        return None;
    }
    let rel = &outcome.relation;
    for modality in [Modality::May, Modality::Must] {
        if let Some(cex) = outstate_clause(p, q, rel, modality, max_len) {
            return Some(Some(cex));
        }
    }
    Some(None)
}

fn outstate_clause(
    p: &Mia,
    q: &Mia,
    rel: &RefinementRelation,
    modality: Modality,
    max_len: usize,
) -> Option<OutstateCounterexample> {
    let pv = SuspensionView::new(p, modality);
    let qv = SuspensionView::new(q, modality);
    let symbols = symbols_by_name(p.alphabet());
    let mut seen: BTreeSet<(StateSet, StateSet)> = BTreeSet::new();
    let mut frontier = alloc::vec![(pv.initial(), qv.initial(), Trace::empty())];
    seen.insert((pv.initial(), qv.initial()));
    for len in 0..=max_len {
        let mut next = Vec::new();
        for (ps, qs, trace) in &frontier {
            let bad = match modality {
                Modality::May if !qs.is_empty() => ps
                    .iter()
                    .find(|&a| !qs.iter().any(|b| rel.relates(a, b))),
                Modality::Must if !ps.is_empty() => qs
                    .iter()
                    .find(|&b| !ps.iter().any(|a| rel.relates(a, b))),
                _ => None,
            };
            if let Some(state) = bad {
                return Some(OutstateCounterexample {
                    modality,
                    trace: trace.clone(),
                    state,
                });
            }
            if len == max_len {
                continue;
            }
            for &sym in &symbols {
                let p2 = pv.step(ps, sym);
                let q2 = qv.step(qs, sym);
                if p2.is_empty() && q2.is_empty() {
                    continue;
                }
                if seen.insert((p2.clone(), q2.clone())) {
                    next.push((p2, q2, trace.pushed(sym)));
                }
            }
        }
        frontier = next;
    }
    None
}

/// Input-enabledness preservation: with `r ≤ q` and `q` input-enabled,
/// returns the (state, input) pairs `r` lacks, restricted to states of `r`
/// reachable from its initial state when `reachable_only` is set.
/// `None` when the hypotheses do not hold.
pub fn inherited_enabledness_gaps(r: &Mia, q: &Mia, reachable_only: bool) -> Option<Vec<(StateId, ActionId)>> {
    if !input_enabledness(q).is_enabled() || !mia_refines(r, q).ok()?.holds() {
        return None;
    }
    let unreachable: BTreeSet<StateId> = if reachable_only {
        r.unreachable_states().into_iter().collect()
    } else {
        BTreeSet::new()
    };
    Some(
        input_enabledness(r)
            .missing
            .into_iter()
            .filter(|(s, _)| !unreachable.contains(s))
            .collect(),
    )
}

/// Bounded check that every must-suspension-trace is a may-suspension-trace
/// (and the other inclusions of the may/must preservation properties) on
/// every state of `m`. Returns a description of the first failure.
pub fn may_must_preservation(m: &Mia, depth: usize) -> Result<(), String> {
    use crate::semantics::{enumerate_straces, init, is_quiescent};
    let must_view = SuspensionView::new(m, Modality::Must);
    let may_view = SuspensionView::new(m, Modality::May);
    for p in m.states() {
        let must_init = init(m, p, Modality::Must).expect("state exists");
        let may_init = init(m, p, Modality::May).expect("state exists");
        if !must_init.is_subset(&may_init) {
            return Err(format!("init□ ⊄ init◇ at {}", m.state_name(p)));
        }
        if is_quiescent(m, p, Modality::Must).unwrap() && !is_quiescent(m, p, Modality::May).unwrap() {
            return Err(format!("δ□ without δ◇ at {}", m.state_name(p)));
        }
    }
    let must_traces = enumerate_straces(m, Modality::Must, depth);
    let may_traces = enumerate_straces(m, Modality::May, depth);
    if let Some(t) = must_traces.difference(&may_traces).next() {
        return Err(format!("must-trace {} is not a may-trace", t.display(m.alphabet())));
    }
    for t in &must_traces {
        let from = must_view.initial();
        let a = must_view.after(&from, t.symbols());
        let b = may_view.after(&from, t.symbols());
        if !a.is_subset(&b) {
            return Err(format!("after□ ⊄ after◇ on {}", t.display(m.alphabet())));
        }
        if !must_view.out(&a).is_subset(&may_view.out(&a)) {
            return Err(format!("Out□ ⊄ Out◇ on {}", t.display(m.alphabet())));
        }
    }
    Ok(())
}
