use std::fmt::Write;
use std::path::Path;

use markovspan::analysis::{deadlock_series, find_deadlocks, limit_absorption, simulate, verify_convergence};
use markovspan::dsl::declared_automaton;
use markovspan::laws::check_all;
use markovspan::models::{dining, dining_initial_state, dining_source, fork, phil};
use markovspan::{elaborate, parse_model, Error, MarkovAutomaton, ModelDocument, Rational, StateLabel};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::report::{yes_no, Render, Report};
use crate::{
    Builtin, CheckArgs, Command, ComposeArgs, DeadlockArgs, DiningArgs, Format, LawsArgs, LimitArgs, Mode,
    SimulateArgs, Source,
};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unreadable or invalid model input: exit code 2.
    #[error("{0}")]
    Input(String),
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

type CliResult<T> = Result<T, CliError>;

/// What to print, and whether it reports findings (exit code 1).
pub struct Outcome {
    pub text: String,
    pub findings: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, findings: false }
    }
}

pub fn run(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Check(a) => check(a),
        Command::Compose(a) => by_mode(a.mode, || compose::<Rational>(a), || compose::<f64>(a)),
        Command::Deadlock(a) => by_mode(a.mode, || deadlock::<Rational>(a), || deadlock::<f64>(a)),
        Command::Limit(a) => by_mode(a.mode, || limit::<Rational>(a), || limit::<f64>(a)),
        Command::Simulate(a) => by_mode(a.mode, || simulate_cmd::<Rational>(a), || simulate_cmd::<f64>(a)),
        Command::Laws(a) => laws(a),
        Command::Dining(a) => by_mode(a.mode, || dining_cmd::<Rational>(a), || dining_cmd::<f64>(a)),
    }
}

fn by_mode<T>(mode: Mode, exact: impl FnOnce() -> T, float: impl FnOnce() -> T) -> T {
    if mode.float {
        float()
    } else {
        exact()
    }
}

fn mode_name(mode: Mode) -> &'static str {
    if mode.float {
        "float"
    } else {
        "exact"
    }
}

fn read_document(path: &Path) -> CliResult<ModelDocument> {
    let src = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&src).map_err(|diags| {
        let file = path.display().to_string();
        input(diags.iter().map(|d| d.render(&file)).collect::<Vec<_>>().join("\n"))
    })
}

fn pick_system(doc: &ModelDocument, requested: Option<&str>, path: &Path) -> CliResult<String> {
    let names: Vec<&str> = doc.systems().map(|s| s.name.name.as_str()).collect();
    match requested {
        Some(name) if names.contains(&name) => Ok(name.to_string()),
        Some(name) => Err(input(format!(
            "{}: no system named `{name}` (available: {})",
            path.display(),
            names.join(", ")
        ))),
        None => match names.as_slice() {
            [one] => Ok(one.to_string()),
            [] => Err(input(format!("{}: the file declares no system", path.display()))),
            many => Err(input(format!(
                "{}: several systems, choose one with --system ({})",
                path.display(),
                many.join(", ")
            ))),
        },
    }
}

/// The automaton selected by `--model`/`--file`.
struct Loaded<S> {
    name: String,
    automaton: MarkovAutomaton<S>,
    default_init: Option<StateLabel>,
    parameters: Map<String, Value>,
}

fn load<S: Render>(source: &Source) -> CliResult<Loaded<S>> {
    let mut parameters = Map::new();
    match (&source.model, &source.file) {
        (Some(Builtin::Dining), _) => {
            if source.n == 0 {
                return Err(input("--n must be at least 1"));
            }
            parameters.insert("n".into(), json!(source.n));
            let automaton = dining::<S>(source.n).map_err(|e| input(e.to_string()))?;
            Ok(Loaded {
                name: "dining".into(),
                automaton,
                default_init: Some(dining_initial_state(source.n)),
                parameters,
            })
        }
        (None, Some(path)) => {
            let doc = read_document(path)?;
            let system = pick_system(&doc, source.system.as_deref(), path)?;
            let file = path.display().to_string();
            let automaton = elaborate::<S>(&doc, &system).map_err(|d| input(d.render(&file)))?;
            parameters.insert("system".into(), json!(system));
            Ok(Loaded {
                name: file,
                automaton,
                default_init: None,
                parameters,
            })
        }
        (None, None) => Err(input("a model is required: use --model dining or --file FILE")),
    }
}

/// Index of the `--init` state, or the model's default start state.
fn initial_state<S: Render>(loaded: &mut Loaded<S>, init: Option<&str>) -> CliResult<usize> {
    let label = match init {
        Some(s) => StateLabel::parse(s),
        None => match &loaded.default_init {
            Some(l) => l.clone(),
            None => {
                let first = loaded
                    .automaton
                    .states()
                    .first()
                    .cloned()
                    .ok_or_else(|| input("the system has no states"))?;
                first
            }
        },
    };
    let index = loaded
        .automaton
        .state_index(&label)
        .ok_or_else(|| input(format!("unknown state `{label}`")))?;
    loaded.parameters.insert("init".into(), json!(label.to_string()));
    Ok(index)
}

/// Analysis errors that describe the input rather than the system's behaviour.
fn analysis_input_error(e: Error) -> CliError {
    input(e.to_string())
}

fn check(args: &CheckArgs) -> CliResult<Outcome> {
    let mut rows: Vec<(String, bool)> = Vec::new();
    let mut parameters = Map::new();
    let model = match (&args.source.model, &args.source.file) {
        (Some(Builtin::Dining), _) => {
            let n = args.source.n;
            parameters.insert("n".into(), json!(n));
            rows.push(("Phil".into(), phil::<Rational>().is_markov()));
            rows.push(("Fork".into(), fork::<Rational>().is_markov()));
            let d = dining::<Rational>(n).map_err(|e| input(e.to_string()))?;
            rows.push(("Dining".into(), d.is_markov()));
            "dining".to_string()
        }
        (None, Some(path)) => {
            let doc = read_document(path)?;
            let file = path.display().to_string();
            for decl in doc.automata() {
                let w = declared_automaton::<Rational>(&doc, &decl.name.name).map_err(|d| input(d.render(&file)))?;
                let report = w.validate();
                if !report.is_ok() {
                    let mut d = markovspan::Diagnostic::error(
                        decl.name.span,
                        format!("automaton `{}` is invalid", decl.name),
                    );
                    let details: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
                    d.message = format!("{}: {}", d.message, details.join("; "));
                    return Err(input(d.render(&file)));
                }
                rows.push((decl.name.name.clone(), w.is_markov()));
            }
            for sys in doc.systems() {
                let m = elaborate::<Rational>(&doc, &sys.name.name).map_err(|d| input(d.render(&file)))?;
                rows.push((sys.name.name.clone(), m.is_markov()));
            }
            file
        }
        (None, None) => return Err(input("a model is required: use --model dining or --file FILE")),
    };
    let findings = rows.iter().any(|(_, markov)| !markov);
    let text = match args.output.format {
        Format::Json => Report {
            command: "check",
            model,
            parameters,
            results: json!({
                "automata": rows.iter().map(|(n, m)| json!({ "name": n, "markov": m })).collect::<Vec<_>>(),
            }),
        }
        .to_json(),
        Format::Csv => {
            let mut s = "name,markov\n".to_string();
            for (n, m) in &rows {
                let _ = writeln!(s, "{n},{m}");
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (n, m) in &rows {
                let _ = writeln!(s, "{n}: {}", if *m { "Markov" } else { "not Markov" });
            }
            s
        }
    };
    Ok(Outcome { text, findings })
}

fn compose<S: Render>(args: &ComposeArgs) -> CliResult<Outcome> {
    let mut loaded = load::<S>(&args.source)?;
    loaded.parameters.insert("mode".into(), json!(mode_name(args.mode)));
    let automaton = loaded.automaton.to_json();
    let value = serde_json::to_value(&automaton).expect("automaton serializes");
    let text = match args.output.format {
        Format::Json => Report {
            command: "compose",
            model: loaded.name,
            parameters: loaded.parameters,
            results: json!({ "automaton": value }),
        }
        .to_json(),
        Format::Text => {
            let mut s = serde_json::to_string_pretty(&value).expect("automaton serializes");
            s.push('\n');
            s
        }
        Format::Csv => return Err(input("compose has no csv output; use --format json or text")),
    };
    Ok(Outcome::ok(text))
}

fn deadlock<S: Render>(args: &DeadlockArgs) -> CliResult<Outcome> {
    let mut loaded = load::<S>(&args.source)?;
    let q0 = initial_state(&mut loaded, args.init.as_deref())?;
    loaded.parameters.insert("k".into(), json!(args.k));
    loaded.parameters.insert("mode".into(), json!(mode_name(args.mode)));
    let series = deadlock_series(&loaded.automaton, q0, args.k).map_err(analysis_input_error)?;
    let text = match args.output.format {
        Format::Json => Report {
            command: "deadlock",
            model: loaded.name,
            parameters: loaded.parameters,
            results: json!({
                "series": series
                    .iter()
                    .enumerate()
                    .map(|(k, p)| json!({ "k": k, "probability": p.json() }))
                    .collect::<Vec<_>>(),
            }),
        }
        .to_json(),
        Format::Csv => {
            let mut s = "k,probability,decimal\n".to_string();
            for (k, p) in series.iter().enumerate() {
                let (exact, decimal) = p.csv();
                let _ = writeln!(s, "{k},{exact},{decimal}");
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (k, p) in series.iter().enumerate() {
                let _ = writeln!(s, "{k}, {}", p.text());
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn limit<S: Render>(args: &LimitArgs) -> CliResult<Outcome> {
    let mut loaded = load::<S>(&args.source)?;
    let q0 = initial_state(&mut loaded, args.init.as_deref())?;
    loaded.parameters.insert("mode".into(), json!(mode_name(args.mode)));
    let report = verify_convergence(&loaded.automaton, q0).map_err(analysis_input_error)?;
    let absorption = match limit_absorption(&loaded.automaton, q0) {
        Ok(a) => Ok(a),
        Err(e @ (Error::NoAbsorbingState | Error::Divergence)) => Err(e.to_string()),
        Err(e) => return Err(analysis_input_error(e)),
    };
    let findings = absorption.is_err() || !report.all_conditions_hold();
    let text = match args.output.format {
        Format::Json => {
            let limit = match &absorption {
                Ok(a) => json!({
                    "deadlocks": a
                        .deadlocks
                        .iter()
                        .zip(&a.probabilities)
                        .map(|(d, p)| json!({ "state": d.to_string(), "probability": p.json() }))
                        .collect::<Vec<_>>(),
                    "total": a.total().json(),
                }),
                Err(msg) => json!({ "error": msg }),
            };
            Report {
                command: "limit",
                model: loaded.name,
                parameters: loaded.parameters,
                results: json!({
                    "limit": limit,
                    "convergence": serde_json::to_value(&report).expect("report serializes"),
                    "all_conditions_hold": report.all_conditions_hold(),
                }),
            }
            .to_json()
        }
        Format::Csv => {
            let mut s = "state,probability,decimal\n".to_string();
            if let Ok(a) = &absorption {
                for (d, p) in a.deadlocks.iter().zip(&a.probabilities) {
                    let (exact, decimal) = p.csv();
                    let _ = writeln!(s, "\"{d}\",{exact},{decimal}");
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            match &absorption {
                Ok(a) => {
                    for (d, p) in a.deadlocks.iter().zip(&a.probabilities) {
                        let _ = writeln!(s, "limit into {d}: {}", p.text());
                    }
                    let _ = writeln!(s, "total: {}", a.total().text());
                }
                Err(msg) => {
                    let _ = writeln!(s, "limit: {msg}");
                }
            }
            let _ = writeln!(s, "unique deadlock: {}", yes_no(report.unique_deadlock));
            let _ = writeln!(
                s,
                "return paths to start: {}{}",
                yes_no(report.return_paths),
                failure(&report.return_path_failure)
            );
            let _ = writeln!(
                s,
                "self-loops everywhere: {}{}",
                yes_no(report.self_loops),
                failure(&report.self_loop_failure)
            );
            let _ = match report.k0 {
                Some(k) => writeln!(s, "k0: {k}"),
                None => writeln!(s, "k0: none"),
            };
            s
        }
    };
    Ok(Outcome { text, findings })
}

fn failure(state: &Option<StateLabel>) -> String {
    state.as_ref().map(|s| format!(" (fails at {s})")).unwrap_or_default()
}

fn simulate_cmd<S: Render>(args: &SimulateArgs) -> CliResult<Outcome> {
    let mut loaded = load::<S>(&args.source)?;
    let q0 = initial_state(&mut loaded, args.init.as_deref())?;
    for (key, v) in [("k", args.k), ("trajectories", args.trajectories), ("seed", args.seed)] {
        loaded.parameters.insert(key.into(), json!(v));
    }
    loaded.parameters.insert("mode".into(), json!(mode_name(args.mode)));
    let est = simulate(&loaded.automaton, q0, args.k, args.trajectories, args.seed).map_err(analysis_input_error)?;
    let text = match args.output.format {
        Format::Json => Report {
            command: "simulate",
            model: loaded.name,
            parameters: loaded.parameters,
            results: serde_json::to_value(&est).expect("estimate serializes"),
        }
        .to_json(),
        Format::Csv => format!(
            "k,trajectories,hits,estimate,std_error\n{},{},{},{},{}\n",
            args.k, est.trajectories, est.hits, est.estimate, est.std_error
        ),
        Format::Text => format!(
            "{}, {} ± {} ({} of {} trajectories, seed {})\n",
            args.k, est.estimate, est.std_error, est.hits, est.trajectories, est.seed
        ),
    };
    Ok(Outcome::ok(text))
}

fn laws(args: &LawsArgs) -> CliResult<Outcome> {
    let mut parameters = Map::new();
    let (model, automata) = match (&args.source.model, &args.source.file) {
        (Some(Builtin::Dining), _) => (
            "dining".to_string(),
            vec![("Phil".to_string(), phil::<Rational>()), ("Fork".to_string(), fork::<Rational>())],
        ),
        (None, Some(path)) => {
            let doc = read_document(path)?;
            let file = path.display().to_string();
            let mut automata = Vec::new();
            for decl in doc.automata() {
                let w = declared_automaton::<Rational>(&doc, &decl.name.name).map_err(|d| input(d.render(&file)))?;
                match MarkovAutomaton::new(w) {
                    Ok(m) => automata.push((decl.name.name.clone(), m)),
                    Err(e) => {
                        let d = markovspan::Diagnostic::error(
                            decl.name.span,
                            format!("automaton `{}` is not a Markov automaton: {e}", decl.name),
                        );
                        return Err(input(d.render(&file)));
                    }
                }
            }
            if automata.is_empty() {
                return Err(input(format!("{file}: the file declares no automaton")));
            }
            (file, automata)
        }
        (None, None) => return Err(input("a model is required: use --model dining or --file FILE")),
    };
    parameters.insert(
        "automata".into(),
        json!(automata.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>()),
    );
    let outcomes = check_all(&automata);
    let failed = outcomes.iter().filter(|o| !o.holds).count();
    let text = match args.output.format {
        Format::Json => Report {
            command: "laws",
            model,
            parameters,
            results: json!({
                "checked": outcomes.len(),
                "failed": failed,
                "outcomes": serde_json::to_value(&outcomes).expect("outcomes serialize"),
            }),
        }
        .to_json(),
        Format::Csv => {
            let mut s = "law,operands,holds\n".to_string();
            for o in &outcomes {
                let _ = writeln!(s, "{},\"{}\",{}", o.law, o.operands, o.holds);
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for o in &outcomes {
                let status = match (&o.error, o.holds) {
                    (Some(e), _) => format!("ERROR ({e})"),
                    (None, true) => "holds".to_string(),
                    (None, false) => "FAILS".to_string(),
                };
                let _ = writeln!(s, "{} [{}]: {status}", o.law, o.operands);
            }
            let _ = writeln!(s, "{} checks, {failed} failed", outcomes.len());
            s
        }
    };
    Ok(Outcome {
        text,
        findings: failed > 0,
    })
}

fn dining_cmd<S: Render>(args: &DiningArgs) -> CliResult<Outcome> {
    let n = args.n as usize;
    if args.emit {
        return dining_source(n).map(Outcome::ok).map_err(|e| input(e.to_string()));
    }
    let m = dining::<S>(n).map_err(|e| input(e.to_string()))?;
    let init = dining_initial_state(n);
    let q0 = m.state_index(&init).ok_or_else(|| input(format!("unknown state `{init}`")))?;
    let reachable = m.reachable_states(q0).map_err(|e| input(e.to_string()))?;
    let deadlocks: Vec<StateLabel> = find_deadlocks(&m)
        .map_err(|e| input(e.to_string()))?
        .into_iter()
        .filter(|d| reachable.contains(d))
        .map(|d| m.states()[d].clone())
        .collect();
    let text = match args.output.format {
        Format::Json => {
            let mut parameters = Map::new();
            parameters.insert("n".into(), json!(n));
            parameters.insert("mode".into(), json!(mode_name(args.mode)));
            Report {
                command: "dining",
                model: "dining".into(),
                parameters,
                results: json!({
                    "states": m.num_states(),
                    "initial": init.to_string(),
                    "reachable": reachable.len(),
                    "deadlocks": deadlocks.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                }),
            }
            .to_json()
        }
        Format::Csv => format!(
            "n,states,reachable,deadlocks\n{n},{},{},{}\n",
            m.num_states(),
            reachable.len(),
            deadlocks.len()
        ),
        Format::Text => {
            let names: Vec<String> = deadlocks.iter().map(|d| d.to_string()).collect();
            format!(
                "philosophers: {n}\nstates: {}\nreachable from {init}: {}\nreachable deadlocks: {}\n",
                m.num_states(),
                reachable.len(),
                names.join(" ")
            )
        }
    };
    Ok(Outcome::ok(text))
}
