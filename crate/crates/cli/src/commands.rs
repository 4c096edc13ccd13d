use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mia_core::family::{
    enumerate_variants, random_mia, verify_completeness_i, verify_completeness_ii, verify_prop2,
    verify_soundness, GeneratorConfig, HarnessConfig, HarnessReport, HarnessStatus, DEFAULT_CAP,
};
use mia_core::{
    angelic_completion, chaotic_completion, famlts, input_enabledness, ioco_check, is_variant_of,
    mia_refines, mior_check, mioco_check, validate_mia, Alphabet, ConformanceError, Mia, Model,
    ModelKind, RefinementError, VariantMode,
};
use serde_json::{json, Value};

use crate::format::{self, LoadError, Loaded};
use crate::report::{self, Report, SymbolReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Fails = 1,
    Usage = 2,
    InvalidModel = 3,
    TheoremViolation = 4,
}

#[derive(Parser, Debug)]
#[command(name = "mia", version, about = "Modal interface automata: refinement and modal I/O conformance")]
struct Cli {
    /// Print the report as JSON (schema report-v1).
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Angelic,
    Chaotic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TheoremArg {
    Soundness,
    Completeness1,
    Completeness2,
    Prop2,
}

#[derive(Args, Debug)]
struct Pair {
    /// Implementation (or refined) model.
    implementation: PathBuf,
    /// Specification (or abstract) model.
    specification: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a model file.
    Check { model: PathBuf },
    /// Decide MIA refinement p ≤ q.
    Refine {
        p: PathBuf,
        q: PathBuf,
    },
    /// Decide whether an IOLTS is a variant of a MIA.
    Variant {
        p: PathBuf,
        q: PathBuf,
        /// Allow the variant's states to be renamed.
        #[arg(long)]
        up_to_iso: bool,
    },
    /// Check classic ioco between two IOLTS.
    Ioco(Pair),
    /// Check modal ioco between two MIAs.
    Mioco {
        #[command(flatten)]
        pair: Pair,
        /// Input-complete the implementation first.
        #[arg(long, value_enum)]
        complete_impl: Option<Strategy>,
    },
    /// Check may/must suspension-trace inclusion between two MIAs.
    Mior {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum)]
        complete_impl: Option<Strategy>,
    },
    /// Input-complete a MIA.
    Complete {
        #[arg(long, value_enum)]
        strategy: Strategy,
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the IOLTS of all may transitions.
    Famlts {
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Count and enumerate the variants of a MIA.
    Variants {
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// List every enumerated variant.
        #[arg(long)]
        list: bool,
        /// Show only the states each listed variant can reach.
        #[arg(long, requires = "list")]
        prune: bool,
    },
    /// Generate a random valid MIA.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long, default_value_t = 1)]
        inputs: usize,
        #[arg(long, default_value_t = 2)]
        outputs: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Probability that an output transition is optional.
        #[arg(long, default_value_t = 0.4)]
        optional: f64,
        #[arg(long)]
        input_enabled: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a theorem of the variant semantics on one model pair.
    Verify {
        #[arg(value_enum)]
        theorem: TheoremArg,
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Load(LoadError),
    Conformance(ConformanceError),
    Refinement(RefinementError),
    Io(PathBuf, std::io::Error),
}

impl Failure {
    fn exit(&self) -> ExitCode {
        match self {
            Failure::Load(LoadError::Invalid { .. }) => ExitCode::InvalidModel,
            Failure::Load(_) | Failure::Io(..) => ExitCode::Usage,
            Failure::Conformance(ConformanceError::NotInputEnabled { .. }) => ExitCode::InvalidModel,
            Failure::Conformance(_) => ExitCode::Usage,
            Failure::Refinement(RefinementError::PreconditionViolated(_)) => ExitCode::InvalidModel,
            Failure::Refinement(_) => ExitCode::Usage,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Load(e) => e.to_string(),
            Failure::Conformance(e @ ConformanceError::NotInputEnabled { .. }) => {
                format!("{e}\n  hint: use --complete-impl=angelic|chaotic or `mia complete`")
            }
            Failure::Conformance(e) => e.to_string(),
            Failure::Refinement(e) => e.to_string(),
            Failure::Io(p, e) => format!("{}: {e}", p.display()),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::Load(e)
    }
}

impl From<ConformanceError> for Failure {
    fn from(e: ConformanceError) -> Self {
        Failure::Conformance(e)
    }
}

impl From<RefinementError> for Failure {
    fn from(e: RefinementError) -> Self {
        Failure::Refinement(e)
    }
}

/// What a command produced: a report, its exit code, and possibly a model
/// text destined for stdout.
struct Outcome {
    report: Report,
    exit: ExitCode,
    model_text: Option<String>,
}

impl Outcome {
    fn verdict(report: Report) -> Self {
        let exit = match report.holds {
            Some(false) => ExitCode::Fails,
            _ => ExitCode::Success,
        };
        Outcome {
            report,
            exit,
            model_text: None,
        }
    }
}

/// Runs the tool with process stdout and stderr; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::Usage } else { ExitCode::Success };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code as i32;
        }
    };
    let echo: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let started = Instant::now();
    match dispatch(&cli.command, echo) {
        Ok(mut outcome) => {
            if cli.timings {
                outcome.report.stats.wall_time_ms = Some(started.elapsed().as_millis());
            }
            let rendered = if cli.json {
                outcome.report.to_json() + "\n"
            } else {
                outcome.report.to_human()
            };
            // a model on stdout pushes the report to stderr
            let _ = match &outcome.model_text {
                Some(text) => {
                    let _ = write!(out, "{text}");
                    write!(err, "{rendered}")
                }
                None => write!(out, "{rendered}"),
            };
            outcome.exit as i32
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.exit() as i32
        }
    }
}

fn dispatch(command: &Command, echo: Vec<String>) -> Result<Outcome, Failure> {
    match command {
        Command::Check { model } => check(model, echo),
        Command::Refine { p, q } => refine(p, q, echo),
        Command::Variant { p, q, up_to_iso } => variant(p, q, *up_to_iso, echo),
        Command::Ioco(pair) => ioco(pair, echo),
        Command::Mioco { pair, complete_impl } => modal(pair, *complete_impl, false, echo),
        Command::Mior { pair, complete_impl } => modal(pair, *complete_impl, true, echo),
        Command::Complete {
            strategy,
            model,
            output,
        } => complete(*strategy, model, output.as_deref(), echo),
        Command::Famlts { model, output } => family_lts(model, output.as_deref(), echo),
        Command::Variants { model, cap, list, prune } => variants(model, *cap, *list, *prune, echo),
        Command::Gen {
            seed,
            states,
            inputs,
            outputs,
            density,
            optional,
            input_enabled,
            output,
        } => {
            let cfg = GeneratorConfig {
                seed: *seed,
                state_count: *states,
                input_count: *inputs,
                output_count: *outputs,
                transition_density: *density,
                optional_fraction: *optional,
                ensure_input_enabled: *input_enabled,
            };
            generate(&cfg, output.as_deref(), echo)
        }
        Command::Verify {
            theorem,
            pair,
            cap,
            seed,
        } => verify(*theorem, pair, HarnessConfig { cap: *cap, seed: *seed }, echo),
    }
}

fn sizes(report: &mut Report, models: &[&dyn Model]) {
    for m in models {
        report.stats.states.push(m.state_count());
        let n: usize = m
            .states()
            .map(|s| m.edges(s, mia_core::semantics::Modality::May).len())
            .sum();
        report.stats.transitions.push(n);
    }
}

fn warnings_for(m: &dyn Model) -> Vec<String> {
    m.unreachable_states()
        .into_iter()
        .map(|s| format!("{}: state `{}` is unreachable", m.name(), m.state_name(s)))
        .collect()
}

fn check(path: &Path, echo: Vec<String>) -> Result<Outcome, Failure> {
    let draft = format::read_draft(path)?;
    let mut report = Report::new(echo, "valid");
    let (violations, warnings, model) = match draft.kind {
        ModelKind::Mia => {
            let r = validate_mia(&draft);
            let model = r.ok().then(|| draft.build_mia().map(Loaded::Mia).expect("validated"));
            (r.violations, r.warnings, model)
        }
        ModelKind::Iolts => match draft.build_iolts() {
            Ok(p) => {
                let w = warnings_for(&p)
                    .into_iter()
                    .map(|w| w.split_once(": ").map_or(w.clone(), |(_, r)| r.to_string()))
                    .collect();
                (Vec::new(), w, Some(Loaded::Iolts(p)))
            }
            Err(mia_core::ModelError::Invalid(r)) => (r.violations, r.warnings, None),
            Err(e) => unreachable!("IOLTS construction reports {e}"),
        },
    };
    report.warnings = warnings;
    let violation_json: Vec<Value> = violations
        .iter()
        .map(|v| {
            json!({
                "rule": v.rule.id(),
                "line": v.line,
                "location": v.location,
                "message": v.message,
            })
        })
        .collect();
    let kind = match draft.kind {
        ModelKind::Mia => "mia",
        ModelKind::Iolts => "iolts",
    };
    let mut details = json!({ "file": path.display().to_string(), "kind": kind });
    let exit = match &model {
        Some(loaded) => {
            let m = loaded.model();
            sizes(&mut report, &[m]);
            details["input_enabled"] = input_enabledness(m).is_enabled().into();
            if let Loaded::Mia(mia) = loaded {
                details["must"] = mia.must_transitions().count().into();
                details["optional"] = mia.optional_transitions().len().into();
            }
            ExitCode::Success
        }
        None => {
            report.status = "invalid".into();
            details["violations"] = violation_json.into();
            ExitCode::InvalidModel
        }
    };
    report.details = details;
    Ok(Outcome {
        report,
        exit,
        model_text: None,
    })
}

fn load_pair_mia(pair: (&Path, &Path)) -> Result<(Mia, Mia), Failure> {
    let i = format::load_mia(pair.0, None)?;
    let s = format::load_mia(pair.1, Some(i.alphabet()))?;
    Ok((i, s))
}

fn refine(p: &Path, q: &Path, echo: Vec<String>) -> Result<Outcome, Failure> {
    let (pm, qm) = load_pair_mia((p, q))?;
    let outcome = mia_refines(&pm, &qm)?;
    let a = pm.alphabet();
    let mut report = Report::new(echo, "").verdict(outcome.holds());
    sizes(&mut report, &[&pm, &qm]);
    report.warnings = [warnings_for(&pm), warnings_for(&qm)].concat();
    let steps: Vec<Value> = outcome
        .explanation
        .iter()
        .map(|s| {
            json!({
                "pair": [pm.state_name(s.pair.0), qm.state_name(s.pair.1)],
                "clause": s.clause.id(),
                "action": a.name(s.action),
                "next": s.next.map(|(x, y)| vec![pm.state_name(x), qm.state_name(y)]),
            })
        })
        .collect();
    if let Some(last) = outcome.explanation.last() {
        report.clause = Some(last.clause.id().to_string());
        report.witness_trace = Some(report::trace_text(&outcome.distinguishing_trace(), a));
        report.missing_or_extra_symbol = Some(SymbolReport {
            kind: match last.clause {
                mia_core::refinement::RefinementClause::MustMatch => "missing",
                mia_core::refinement::RefinementClause::MayOutputMatch => "extra",
            }
            .to_string(),
            symbol: a.name(last.action).to_string(),
        });
    }
    report.details = json!({
        "relation_size": outcome.relation.pairs.len(),
        "rounds": outcome.rounds,
        "explanation": steps,
    });
    Ok(Outcome::verdict(report))
}

fn variant(p: &Path, q: &Path, up_to_iso: bool, echo: Vec<String>) -> Result<Outcome, Failure> {
    let pl = format::load_iolts(p, None)?;
    let qm = format::load_mia(q, Some(pl.alphabet()))?;
    let mode = if up_to_iso { VariantMode::UpToIso } else { VariantMode::Literal };
    let v = is_variant_of(&pl, &qm, mode)?;
    let mut report = Report::new(echo, "").verdict(v.holds);
    sizes(&mut report, &[&pl, &qm]);
    let a = pl.alphabet();
    report.details = json!({
        "mode": if up_to_iso { "up-to-iso" } else { "literal" },
        "refines": v.refines,
        "transitions_included": v.transitions_included,
        "offending": v.offending.map(|t| format!(
            "{} {} {}", qm.state_name(t.source), a.name(t.action), qm.state_name(t.target)
        )),
        "mapping": v.mapping.as_ref().map(|m| m
            .iter()
            .enumerate()
            .map(|(k, s)| vec![pl.state_names()[k].as_str(), qm.state_name(*s)])
            .collect::<Vec<_>>()),
    });
    Ok(Outcome::verdict(report))
}

fn ioco(pair: &Pair, echo: Vec<String>) -> Result<Outcome, Failure> {
    let i = format::load_iolts(&pair.implementation, None)?;
    let s = format::load_iolts(&pair.specification, Some(i.alphabet()))?;
    let verdict = ioco_check(&i, &s)?;
    let mut report = report::apply_verdict(Report::new(echo, ""), &verdict, i.alphabet());
    sizes(&mut report, &[&i, &s]);
    Ok(Outcome::verdict(report))
}

fn apply_strategy(m: &Mia, strategy: Strategy) -> (Mia, Option<String>) {
    match strategy {
        Strategy::Angelic => (angelic_completion(m), None),
        Strategy::Chaotic => {
            let c = chaotic_completion(m);
            let sink = c.sink_name().to_string();
            (c.mia, Some(sink))
        }
    }
}

fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Angelic => "angelic",
        Strategy::Chaotic => "chaotic",
    }
}

fn modal(pair: &Pair, completion: Option<Strategy>, mior: bool, echo: Vec<String>) -> Result<Outcome, Failure> {
    let (mut i, s) = load_pair_mia((&pair.implementation, &pair.specification))?;
    let mut warnings = Vec::new();
    if let Some(strategy) = completion {
        let (completed, sink) = apply_strategy(&i, strategy);
        i = completed;
        warnings.push(match sink {
            Some(name) => format!("implementation completed ({}, sink `{name}`)", strategy_name(strategy)),
            None => format!("implementation completed ({})", strategy_name(strategy)),
        });
    }
    let verdict = if mior { mior_check(&i, &s)? } else { mioco_check(&i, &s)? };
    let mut report = report::apply_verdict(Report::new(echo, ""), &verdict, i.alphabet());
    sizes(&mut report, &[&i, &s]);
    report.warnings = warnings;
    Ok(Outcome::verdict(report))
}

fn emit_model(
    mut report: Report,
    text: String,
    output: Option<&Path>,
) -> Result<Outcome, Failure> {
    let model_text = match output {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
            report.details["output"] = path.display().to_string().into();
            None
        }
        None => Some(text),
    };
    Ok(Outcome {
        report,
        exit: ExitCode::Success,
        model_text,
    })
}

fn provenance(echo: &[String]) -> String {
    format!("generated by: mia {}", echo.join(" "))
}

fn complete(strategy: Strategy, path: &Path, output: Option<&Path>, echo: Vec<String>) -> Result<Outcome, Failure> {
    let m = format::load_mia(path, None)?;
    let (c, sink) = apply_strategy(&m, strategy);
    let text = format::write_mia(&c, Some(&provenance(&echo)));
    let mut report = Report::new(echo, "ok");
    sizes(&mut report, &[&m]);
    report.details = json!({
        "strategy": strategy_name(strategy),
        "added_transitions": c.must_transitions().count() - m.must_transitions().count(),
        "sink": sink,
    });
    emit_model(report, text, output)
}

fn family_lts(path: &Path, output: Option<&Path>, echo: Vec<String>) -> Result<Outcome, Failure> {
    let m = format::load_mia(path, None)?;
    let f = famlts(&m);
    let text = format::write_iolts(&f, Some(&provenance(&echo)));
    let mut report = Report::new(echo, "ok");
    sizes(&mut report, &[&m]);
    report.details = json!({ "transitions": f.transition_count() });
    emit_model(report, text, output)
}

fn transition_text(m: &Mia, t: &mia_core::Transition) -> String {
    format!("{} {} {}", m.state_name(t.source), m.alphabet().name(t.action), m.state_name(t.target))
}

fn variants(path: &Path, cap: usize, list: bool, prune: bool, echo: Vec<String>) -> Result<Outcome, Failure> {
    let m = format::load_mia(path, None)?;
    let set = enumerate_variants(&m, cap);
    let optional: Vec<String> = set.optional().iter().map(|t| transition_text(&m, t)).collect();
    let total = set
        .total()
        .map_or_else(|| format!("2^{}", set.exponent()), |t| t.to_string());
    let truncated = set.truncated();
    let mut report = Report::new(echo, if truncated { "truncated" } else { "ok" });
    sizes(&mut report, &[&m]);
    let mut details = json!({
        "optional": optional,
        "exponent": set.exponent(),
        "total": total,
        "truncated": truncated,
    });
    let opt = set.optional().to_vec();
    let listed: Vec<Value> = set
        .map(|v| {
            let chosen: Vec<String> = opt
                .iter()
                .zip(v.mask.bits())
                .filter(|(_, b)| **b)
                .map(|(t, _)| transition_text(&m, t))
                .collect();
            let mut entry = json!({ "mask": v.mask.to_string(), "optional_selected": chosen });
            if prune {
                let dead = v.iolts.unreachable_states();
                let live: Vec<&str> = v
                    .iolts
                    .states()
                    .filter(|q| !dead.contains(q))
                    .map(|q| v.iolts.state_name(q))
                    .collect();
                entry["reachable_states"] = live.into();
            }
            entry
        })
        .collect();
    details["enumerated"] = listed.len().into();
    if list {
        details["variants"] = listed.into();
    }
    report.details = details;
    Ok(Outcome {
        report,
        exit: ExitCode::Success,
        model_text: None,
    })
}

fn generate(cfg: &GeneratorConfig, output: Option<&Path>, echo: Vec<String>) -> Result<Outcome, Failure> {
    let m = match random_mia(cfg) {
        Ok(m) => m,
        Err(e) => {
            let mut report = Report::new(echo, "infeasible");
            report.details = json!({ "error": e.to_string() });
            return Ok(Outcome {
                report,
                exit: ExitCode::Usage,
                model_text: None,
            });
        }
    };
    let text = format::write_mia(&m, Some(&provenance(&echo)));
    let mut report = Report::new(echo, "ok");
    sizes(&mut report, &[&m]);
    report.details = json!({ "seed": cfg.seed, "optional": m.optional_transitions().len() });
    emit_model(report, text, output)
}

fn harness_json(h: &HarnessReport, i: &Mia, s: &Mia, alphabet: &Alphabet) -> Value {
    let violations: Vec<Value> = h
        .violations
        .iter()
        .map(|v| {
            json!({
                "message": v.message,
                "mask": v.mask.as_ref().map(|m| m.to_string()),
                "variant_witness": v.variant_witness.as_ref().map(|w| report::witness_json(w, alphabet)),
                "mioco_witness": v.mioco.as_ref().and_then(|m| m.witness.as_ref()).map(|w| report::witness_json(w, alphabet)),
                "seed": h.seed,
                "implementation": format::write_mia(i, None),
                "specification": format::write_mia(s, None),
            })
        })
        .collect();
    json!({
        "theorem": h.theorem.id(),
        "detail": h.detail,
        "seed": h.seed,
        "cap": h.cap,
        "optional": h.optional_count,
        "variants_checked": h.variants_checked,
        "sampled": h.sampled,
        "violations": violations,
    })
}

fn verify(theorem: TheoremArg, pair: &Pair, cfg: HarnessConfig, echo: Vec<String>) -> Result<Outcome, Failure> {
    let (i, s) = load_pair_mia((&pair.implementation, &pair.specification))?;
    let h = match theorem {
        TheoremArg::Soundness => verify_soundness(&i, &s, cfg)?,
        TheoremArg::Completeness1 => verify_completeness_i(&i, &s, cfg)?,
        TheoremArg::Completeness2 => verify_completeness_ii(&i, &s, cfg)?,
        TheoremArg::Prop2 => verify_prop2(&i, &s, cfg)?,
    };
    let mut report = Report::new(echo, h.status.id());
    sizes(&mut report, &[&i, &s]);
    if h.sampled {
        report.warnings.push(format!("SAMPLED: {} of 2^{} variants checked", h.variants_checked, h.optional_count));
    }
    if let Some(w) = h
        .violations
        .first()
        .and_then(|v| v.variant_witness.as_ref().or(v.mioco.as_ref().and_then(|m| m.witness.as_ref())))
    {
        report.clause = Some(report::clause_name(w.clause).to_string());
        report.witness_trace = Some(report::trace_text(&w.trace, i.alphabet()));
        report.missing_or_extra_symbol = Some(SymbolReport {
            kind: w.kind().to_string(),
            symbol: w.symbol.name(i.alphabet()).to_string(),
        });
    }
    report.details = harness_json(&h, &i, &s, i.alphabet());
    let exit = if h.status == HarnessStatus::Violated {
        ExitCode::TheoremViolation
    } else {
        ExitCode::Success
    };
    Ok(Outcome {
        report,
        exit,
        model_text: None,
    })
}
