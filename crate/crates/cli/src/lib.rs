//! `qcap` command-line front end.
//!
//! Every command writes one JSON document to the output stream (or, for
//! `ce` and `holevo` with `--output csv`, the iteration trace). Floats are
//! rounded to 12 significant digits so repeated runs diff cleanly.
//!
//! Exit codes: 0 success, 1 usage error or bad channel spec, 2 bound
//! violation found, 3 optimizer did not converge.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use qcap_core::channels::zoo;
use qcap_core::optimize::{check_cqfb_bound_with, Argmax, BoundCheckOptions, VIOLATION_MARGIN};
use qcap_core::protocols::{dense_coding_distribution, dense_coding_rate, ebit, teleportation};
use qcap_core::sampling::{random_pure_state, SeededRng};
use qcap_core::{
    check_additivity, compute_ce, compute_holevo, feedback_equivalence_demo, CeOptions, ChannelSpec, ComplexMatrix,
    Error, HolevoOptions, OptimizerReport, QuantumChannel,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Significant digits kept in every printed float.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Parser, Debug)]
#[command(
    name = "qcap",
    version,
    about = "Quantum channel capacities, feedback bounds and protocol demos"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Relative convergence tolerance for the optimizers.
    #[arg(long, global = true, default_value_t = 1e-6, value_parser = positive_float)]
    pub tol: f64,

    #[arg(long, global = true, default_value_t = 5000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iter: u64,

    #[arg(long, global = true, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,

    /// Number of separable samples drawn by `bound`.
    #[arg(long, global = true, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a channel spec.
    Validate { spec: PathBuf },
    /// Entanglement-assisted capacity.
    Ce { spec: PathBuf },
    /// One-shot Holevo quantity (lower-bound witness).
    Holevo { spec: PathBuf },
    /// Compare the conditional mutual information of separable inputs with C_E.
    Bound { spec: PathBuf },
    /// Compare C_E of two uses with twice the single-use value.
    Additivity { spec: PathBuf },
    /// Exact protocol simulations.
    Demo { protocol: Demo },
    /// List built-in channels.
    Zoo,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Demo {
    DenseCoding,
    Teleportation,
    FeedbackEquivalence,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

fn positive_float(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive number, got {s}"))
    }
}

/// A channel spec that could not be turned into a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub message: String,
    /// `‖Σ K†K − I‖_F` when the spec parsed but failed completeness.
    pub completeness_residual: Option<f64>,
    pub sha256: Option<String>,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)?;
        if let Some(r) = self.completeness_residual {
            write!(f, " (completeness residual {r:e})")?;
        }
        Ok(())
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub channel: QuantumChannel,
    pub sha256: String,
}

/// Reads, parses and validates a channel spec file.
pub fn load_channel_spec(path: &Path) -> Result<LoadedSpec, SpecError> {
    let bytes = std::fs::read(path).map_err(|e| SpecError {
        message: format!("cannot read {}: {e}", path.display()),
        completeness_residual: None,
        sha256: None,
    })?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let fail = |e: Error| SpecError {
        completeness_residual: match e {
            Error::Completeness { residual } => Some(residual),
            _ => None,
        },
        message: e.to_string(),
        sha256: Some(sha256.clone()),
    };
    let text = String::from_utf8(bytes).map_err(|e| fail(Error::ChannelSpec(e.to_string())))?;
    let channel = ChannelSpec::from_json(&text)
        .and_then(|s| s.to_channel())
        .map_err(fail)?;
    Ok(LoadedSpec { channel, sha256 })
}

/// Rounds every float in `value` to [`SIGNIFICANT_DIGITS`].
pub fn round_numbers(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x);
            // avoid printing -0.0
            let rounded = if rounded == 0.0 { 0.0 } else { rounded };
            *value = serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| Value::Array((0..m.cols()).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect()))
        .collect();
    Value::Array(rows)
}

fn argmax_json(argmax: &Argmax) -> Value {
    match argmax {
        Argmax::State(rho) => json!({ "state": matrix_json(rho.matrix()) }),
        Argmax::Ensemble(ens) => json!({
            "probabilities": ens.probs(),
            "states": ens.states().iter().map(|s| matrix_json(s.matrix())).collect::<Vec<_>>(),
        }),
    }
}

fn optimizer_json(r: &OptimizerReport) -> Value {
    json!({
        "value": r.value,
        "converged": r.converged,
        "iterations": r.iterations,
        "restarts_used": r.restarts_used,
        "best_restart": r.best_restart,
        "restart_values": r.restart_values,
        "trace_points": r.trace.len(),
        "max_trace_decrease": r.max_trace_decrease(),
        "argmax": argmax_json(&r.argmax),
    })
}

struct Context<'a> {
    cli: &'a Cli,
}

impl Context<'_> {
    fn ce_options(&self) -> CeOptions {
        CeOptions {
            tol: self.cli.tol,
            max_iter: self.cli.max_iter as usize,
            restarts: self.cli.restarts as usize,
            seed: self.cli.seed,
        }
    }

    fn holevo_options(&self) -> HolevoOptions {
        HolevoOptions {
            tol: self.cli.tol,
            max_iter: self.cli.max_iter as usize,
            restarts: self.cli.restarts as usize,
            seed: self.cli.seed,
            ensemble_size: None,
        }
    }

    fn inputs(&self, command: &str, spec: Option<(&Path, Option<&str>)>) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(command));
        if let Some((path, hash)) = spec {
            m.insert("spec_path".into(), json!(path.display().to_string()));
            m.insert("spec_sha256".into(), json!(hash));
        }
        m.insert("tol".into(), json!(self.cli.tol));
        m.insert("max_iter".into(), json!(self.cli.max_iter));
        m.insert("restarts".into(), json!(self.cli.restarts));
        m.insert("samples".into(), json!(self.cli.samples));
        m.insert("seed".into(), json!(self.cli.seed));
        Value::Object(m)
    }
}

fn channel_json(ch: &QuantumChannel) -> Value {
    json!({
        "name": ch.name(),
        "dim_in": ch.dim_in(),
        "dim_out": ch.dim_out(),
        "kraus_count": ch.kraus().len(),
    })
}

/// Outcome of one command before printing.
struct Outcome {
    body: Value,
    csv: Option<String>,
    code: i32,
}

impl Outcome {
    fn json(body: Value, code: i32) -> Self {
        Self { body, csv: None, code }
    }
}

fn trace_csv(r: &OptimizerReport) -> String {
    let mut s = String::from("restart,iteration,value\n");
    for p in &r.trace {
        let mut v = json!(p.value);
        round_numbers(&mut v);
        s.push_str(&format!("{},{},{}\n", p.restart, p.iteration, v));
    }
    s
}

fn spec_failure(ctx: &Context, command: &str, path: &Path, err: &SpecError) -> Outcome {
    Outcome::json(
        json!({
            "inputs": ctx.inputs(command, Some((path, err.sha256.as_deref()))),
            "valid": false,
            "error": err.message,
            "completeness_residual": err.completeness_residual,
        }),
        EXIT_INVALID,
    )
}

fn core_failure(inputs: Value, err: &Error) -> Outcome {
    let code = match err {
        Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_INVALID,
    };
    Outcome::json(json!({ "inputs": inputs, "error": err.to_string() }), code)
}

fn with_channel(
    ctx: &Context,
    command: &str,
    path: &Path,
    body: impl FnOnce(&QuantumChannel, Value) -> Outcome,
) -> Outcome {
    match load_channel_spec(path) {
        Ok(loaded) => body(&loaded.channel, ctx.inputs(command, Some((path, Some(&loaded.sha256))))),
        Err(e) => spec_failure(ctx, command, path, &e),
    }
}

fn convergence_code(converged: bool) -> i32 {
    if converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

fn optimizer_outcome(
    ctx: &Context,
    inputs: Value,
    ch: &QuantumChannel,
    result: qcap_core::Result<OptimizerReport>,
) -> Outcome {
    match result {
        Ok(report) => {
            let code = convergence_code(report.converged);
            let csv = (ctx.cli.output == OutputFormat::Csv).then(|| trace_csv(&report));
            let mut body = optimizer_json(&report);
            body["inputs"] = inputs;
            body["channel"] = channel_json(ch);
            Outcome { body, csv, code }
        }
        Err(e) => core_failure(inputs, &e),
    }
}

fn execute(ctx: &Context) -> Outcome {
    match &ctx.cli.command {
        Command::Validate { spec } => match load_channel_spec(spec) {
            Ok(loaded) => {
                let ch = &loaded.channel;
                let residual = qcap_core::channels::completeness_residual(ch.kraus(), ch.dim_in());
                let mut channel = channel_json(ch);
                if let Ok(eb) = ch.is_entanglement_breaking() {
                    channel["entanglement_breaking"] = json!(eb);
                }
                Outcome::json(
                    json!({
                        "inputs": ctx.inputs("validate", Some((spec, Some(&loaded.sha256)))),
                        "valid": true,
                        "completeness_residual": residual,
                        "channel": channel,
                    }),
                    EXIT_OK,
                )
            }
            Err(e) => spec_failure(ctx, "validate", spec, &e),
        },
        Command::Ce { spec } => with_channel(ctx, "ce", spec, |ch, inputs| {
            optimizer_outcome(ctx, inputs, ch, compute_ce(ch, &ctx.ce_options()))
        }),
        Command::Holevo { spec } => with_channel(ctx, "holevo", spec, |ch, inputs| {
            optimizer_outcome(ctx, inputs, ch, compute_holevo(ch, &ctx.holevo_options()))
        }),
        Command::Bound { spec } => with_channel(ctx, "bound", spec, |ch, inputs| {
            let opts = BoundCheckOptions {
                samples: ctx.cli.samples as usize,
                seed: ctx.cli.seed,
                ce: ctx.ce_options(),
                ..BoundCheckOptions::default()
            };
            match check_cqfb_bound_with(ch, &opts) {
                Ok(r) => {
                    let code = if r.violations > 0 { EXIT_VIOLATION } else { EXIT_OK };
                    Outcome::json(
                        json!({
                            "inputs": inputs,
                            "channel": channel_json(ch),
                            "samples": r.samples,
                            "conditioner_dim": opts.conditioner_dim,
                            "terms": opts.terms,
                            "violation_margin": VIOLATION_MARGIN,
                            "violations": r.violations,
                            "max_conditional_qmi": r.max_conditional_qmi,
                            "ce_reference": r.ce_reference,
                            "worst_margin": r.worst_margin,
                        }),
                        code,
                    )
                }
                Err(e) => core_failure(inputs, &e),
            }
        }),
        Command::Additivity { spec } => with_channel(ctx, "additivity", spec, |ch, inputs| {
            match check_additivity(ch, &ctx.ce_options()) {
                Ok(r) => Outcome::json(
                    json!({
                        "inputs": inputs,
                        "channel": channel_json(ch),
                        "ce_single": r.ce_single,
                        "ce_double": r.ce_double,
                        "gap": r.gap,
                        "converged": r.converged,
                    }),
                    convergence_code(r.converged),
                ),
                Err(e) => core_failure(inputs, &e),
            }
        }),
        Command::Demo { protocol } => demo(ctx, *protocol),
        Command::Zoo => {
            let channels: Vec<Value> = zoo()
                .iter()
                .map(|ch| {
                    let mut v = channel_json(ch);
                    if let Ok(eb) = ch.is_entanglement_breaking() {
                        v["entanglement_breaking"] = json!(eb);
                    }
                    v["spec"] = serde_json::to_value(ChannelSpec::explicit(ch)).unwrap_or(Value::Null);
                    v
                })
                .collect();
            Outcome::json(
                json!({ "inputs": ctx.inputs("zoo", None), "kinds": kinds_json(), "channels": channels }),
                EXIT_OK,
            )
        }
    }
}

fn kinds_json() -> Value {
    qcap_core::channel_spec::KINDS
        .iter()
        .map(|(kind, params)| json!({ "kind": kind, "params": params }))
        .collect()
}

fn demo(ctx: &Context, protocol: Demo) -> Outcome {
    let inputs = ctx.inputs("demo", None);
    let result = match protocol {
        Demo::DenseCoding => (|| {
            let shared = ebit();
            let messages = (0..4u8)
                .map(|m| {
                    let dist = dense_coding_distribution(m, &shared)?;
                    let decoded = (0..4).max_by(|&a, &b| dist[a].total_cmp(&dist[b])).unwrap_or(0);
                    Ok(json!({ "message": m, "distribution": dist, "decoded": decoded }))
                })
                .collect::<qcap_core::Result<Vec<_>>>()?;
            Ok(json!({
                "protocol": "dense-coding",
                "messages": messages,
                "bits_per_qubit": dense_coding_rate(&shared)?,
                "qubits_used": 1,
                "ebits_used": 1,
            }))
        })(),
        Demo::Teleportation => (|| {
            let state = random_pure_state(&mut SeededRng::new(ctx.cli.seed, 0), 2);
            let r = teleportation(&state)?;
            Ok(json!({
                "protocol": "teleportation",
                "input_state": matrix_json(state.matrix()),
                "probabilities": r.probabilities,
                "fidelities": r.fidelities,
                "fidelity_min": r.fidelity_min(),
                "cbits_used": 2,
                "ebits_used": 1,
            }))
        })(),
        Demo::FeedbackEquivalence => feedback_equivalence_demo().map(|d| {
            let mut v = serde_json::to_value(&d).unwrap_or(Value::Null);
            v["protocol"] = json!("feedback-equivalence");
            v
        }),
    };
    match result {
        Ok(mut body) => {
            body["inputs"] = inputs;
            Outcome::json(body, EXIT_OK)
        }
        Err(e) => core_failure(inputs, &e),
    }
}

/// Parses `argv` (including the program name), runs the command and writes
/// the report to `out`. Usage errors go to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let ctx = Context { cli: &cli };
    if cli.output == OutputFormat::Csv && !matches!(cli.command, Command::Ce { .. } | Command::Holevo { .. }) {
        let _ = writeln!(
            err,
            "error: --output csv is only available for `ce` and `holevo` traces"
        );
        return EXIT_INVALID;
    }
    let outcome = execute(&ctx);
    let printed = match outcome.csv {
        Some(csv) => out.write_all(csv.as_bytes()),
        None => {
            let mut body = outcome.body;
            round_numbers(&mut body);
            let text = serde_json::to_string_pretty(&body).expect("report serializes");
            writeln!(out, "{text}")
        }
    };
    if let Some(msg) = outcome_message(outcome.code) {
        let _ = writeln!(err, "{msg}");
    }
    match printed {
        Ok(()) => outcome.code,
        Err(_) => EXIT_INVALID,
    }
}

fn outcome_message(code: i32) -> Option<&'static str> {
    match code {
        EXIT_INVALID => Some("error: invalid input (see report)"),
        EXIT_VIOLATION => Some("bound violation found"),
        EXIT_NOT_CONVERGED => Some("optimizer did not converge"),
        _ => None,
    }
}
