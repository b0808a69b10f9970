//! Command dispatch: resolves declared names, executes the engine calls,
//! and renders one RESULT line per command (text or JSON).

use std::path::PathBuf;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use fncalc::calibration::{first_cousin_residual, hl_residual, plane_condition, KVectorFrame};
use fncalc::deformation::{f_psi, mc_residual, mc_solve, plie_check, FormalSection, McOutcome, PlieVerdict};
use fncalc::forms::{fn_bracket, hat, ConstMetric};
use fncalc::poly::{Point, Rational};
use fncalc::vdata::{ell1_operator, ell_n, p_l, symbol_at, vdata_validate, NormalValuedForm, VData};
use fncalc::{ScalarForm, VectorForm};

use crate::parser::{parse_document, Check, Command, Decl, Document};
use crate::printer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub format: Format,
    pub fixtures_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions {
            format: Format::Text,
            fixtures_dir: PathBuf::from("fixtures"),
            seed: 0,
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    /// Bad input: unknown names, shape mismatches, unreadable fixtures.
    Usage(String),
    /// An engine invariant was breached; not attributable to the input.
    Internal(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "error: {m}"),
            RunError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

type RResult<T> = Result<T, RunError>;

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

fn engine(e: fncalc::Error) -> RunError {
    RunError::Usage(e.to_string())
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub lines: Vec<String>,
    pub all_verdicts_pass: bool,
}

struct Env<'a> {
    doc: &'a Document,
}

impl<'a> Env<'a> {
    fn decl(&self, name: &str, kind: &str) -> RResult<&'a Decl> {
        let d = self
            .doc
            .lookup(name)
            .ok_or_else(|| usage(format!("no declaration named `{name}`")))?;
        if d.kind() != kind {
            return Err(usage(format!(
                "`{name}` is a {}, expected a {kind}",
                d.kind()
            )));
        }
        Ok(d)
    }

    fn vform(&self, name: &str) -> RResult<&'a VectorForm> {
        match self.decl(name, "vform")? {
            Decl::VForm(f) => Ok(f),
            _ => unreachable!(),
        }
    }

    fn sform(&self, name: &str) -> RResult<&'a ScalarForm> {
        match self.decl(name, "sform")? {
            Decl::SForm(f) => Ok(f),
            _ => unreachable!(),
        }
    }

    fn metric(&self, name: &str) -> RResult<&'a ConstMetric> {
        match self.decl(name, "metric")? {
            Decl::Metric(g) => Ok(g),
            _ => unreachable!(),
        }
    }

    fn section(&self, name: &str) -> RResult<&'a NormalValuedForm> {
        match self.decl(name, "section")? {
            Decl::Section(s) => Ok(s),
            _ => unreachable!(),
        }
    }

    fn frame(&self, name: &str) -> RResult<KVectorFrame> {
        match self.decl(name, "frame")? {
            Decl::Frame(vs) => KVectorFrame::new(vs.clone()).map_err(engine),
            _ => unreachable!(),
        }
    }

    fn point(&self, name: &str) -> RResult<&'a Point> {
        match self.decl(name, "point")? {
            Decl::Point(p) => Ok(p),
            _ => unreachable!(),
        }
    }

    fn vector(&self, name: &str) -> RResult<&'a Vec<Rational>> {
        match self.decl(name, "vector")? {
            Decl::Vector(v) => Ok(v),
            _ => unreachable!(),
        }
    }

    fn fseries(&self, name: &str) -> RResult<FormalSection> {
        match self.decl(name, "fseries")? {
            Decl::FSeries(parts) => {
                let mut coeffs = Vec::with_capacity(parts.len());
                for p in parts {
                    coeffs.push(self.section(p)?.clone());
                }
                let split = coeffs[0].split().clone();
                FormalSection::new(&split, coeffs).map_err(engine)
            }
            _ => unreachable!(),
        }
    }

    fn vdata(&self, name: &str) -> RResult<VData> {
        VData::new(self.vform(name)?.clone()).map_err(engine)
    }
}

/// One executed command: human-readable detail lines plus the RESULT
/// payload, mirrored verbatim into the JSON object.
struct CommandOutput {
    details: Vec<String>,
    result: String,
    json: serde_json::Value,
    verdict: Option<bool>,
}

impl CommandOutput {
    fn value(result: String, json: serde_json::Value) -> CommandOutput {
        CommandOutput {
            details: Vec::new(),
            result,
            json,
            verdict: None,
        }
    }
}

pub fn run_document(doc: &Document, opts: &RunOptions) -> RResult<RunOutput> {
    let env = Env { doc };
    let mut lines = Vec::new();
    let mut all_pass = true;

    for check in &doc.checks {
        let origin = check_origin(doc)?;
        let pass = run_check(&env, check, &origin)?;
        emit_check(check, pass, opts, &mut lines);
        all_pass &= pass;
    }
    for cmd in &doc.commands {
        let out = run_command(&env, cmd, opts)?;
        if opts.format == Format::Text {
            lines.extend(out.details);
            lines.push(format!("RESULT {}", out.result));
        } else {
            lines.push(format!("RESULT {}", out.json));
        }
        if let Some(v) = out.verdict {
            all_pass &= v;
        }
    }
    Ok(RunOutput {
        lines,
        all_verdicts_pass: all_pass,
    })
}

fn check_origin(doc: &Document) -> RResult<Point> {
    let split = doc
        .split
        .as_ref()
        .ok_or_else(|| usage("checks require a `patch` declaration"))?;
    Ok(Point::origin(split))
}

fn emit_check(check: &Check, pass: bool, opts: &RunOptions, lines: &mut Vec<String>) {
    let identity = check.identity();
    let verdict = if pass { "pass" } else { "fail" };
    if opts.format == Format::Text {
        lines.push(format!("RESULT check {identity} {verdict}"));
    } else {
        lines.push(format!(
            "RESULT {}",
            json!({"command": "check", "identity": identity, "verdict": pass})
        ));
    }
}

fn run_check(env: &Env, check: &Check, origin: &Point) -> RResult<bool> {
    match check {
        Check::SquareZero { k } => {
            let k = env.vform(k)?;
            Ok(fn_bracket(k, k).map_err(engine)?.is_zero())
        }
        Check::SquareZeroHat { phi, metric } => {
            let h = hat(env.sform(phi)?, env.metric(metric)?).map_err(engine)?;
            Ok(fn_bracket(&h, &h).map_err(engine)?.is_zero())
        }
        Check::Value { phi, value, vectors } => {
            let got = env
                .sform(phi)?
                .eval_on_vectors(origin, vectors)
                .map_err(engine)?;
            Ok(&got == value)
        }
        Check::Plane { psi, vectors } => {
            let frame = KVectorFrame::new(vectors.clone()).map_err(engine)?;
            Ok(plane_condition(env.vform(psi)?, origin, &frame)
                .map_err(engine)?
                .passed)
        }
        Check::Vdata { delta } => {
            let d = env.vform(delta)?;
            let v = match VData::new(d.clone()) {
                Ok(v) => v,
                Err(_) => return Ok(false),
            };
            Ok(fn_bracket(v.delta(), v.delta()).map_err(engine)?.is_zero()
                && p_l(v.delta()).is_zero())
        }
        Check::Cousin { phi, metric, normal, vectors } => {
            let frame = KVectorFrame::new(vectors.clone()).map_err(engine)?;
            let res = first_cousin_residual(env.sform(phi)?, env.metric(metric)?, origin, &frame, normal)
                .map_err(engine)?;
            Ok(res.iter().all(Rational::is_zero))
        }
        Check::Hl { phi, psi_e, c, vectors } => {
            let frame = KVectorFrame::new(vectors.clone()).map_err(engine)?;
            let res = hl_residual(env.sform(phi)?, env.vform(psi_e)?, origin, &frame, c)
                .map_err(engine)?;
            Ok(res.is_zero())
        }
    }
}

fn run_command(env: &Env, cmd: &Command, opts: &RunOptions) -> RResult<CommandOutput> {
    match cmd {
        Command::FnBracket { k, l } => {
            let r = fn_bracket(env.vform(k)?, env.vform(l)?).map_err(engine)?;
            let text = printer::vform_text(&r);
            Ok(CommandOutput::value(
                format!("fn-bracket {text}"),
                json!({"command": "fn-bracket", "value": text}),
            ))
        }
        Command::Hat { phi, metric } => {
            let r = hat(env.sform(phi)?, env.metric(metric)?).map_err(engine)?;
            let text = printer::vform_text(&r);
            Ok(CommandOutput::value(
                format!("hat {text}"),
                json!({"command": "hat", "value": text}),
            ))
        }
        Command::SquareZero { k } => {
            let kf = env.vform(k)?;
            let sq = fn_bracket(kf, kf).map_err(engine)?;
            let pass = sq.is_zero();
            let result = if pass {
                "square-zero pass".to_string()
            } else {
                format!("square-zero fail {}", printer::vform_text(&sq))
            };
            Ok(CommandOutput {
                details: vec![format!("square = {}", printer::vform_text(&sq))],
                result,
                json: json!({"command": "square-zero", "verdict": pass,
                             "square": printer::vform_text(&sq)}),
                verdict: Some(pass),
            })
        }
        Command::VdataValidate { delta, samples } => {
            let v = env.vdata(delta)?;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let report = vdata_validate(&v, *samples, &mut rng).map_err(engine)?;
            let axioms = [
                ("p-iota-identity", report.p_iota_identity),
                ("abelian", report.abelian),
                ("ker-p-closed", report.ker_p_closed),
                ("square-zero", report.square_zero),
                ("delta-in-ker", report.delta_in_ker),
            ];
            let details: Vec<String> = axioms
                .iter()
                .map(|(n, ok)| format!("axiom {n} {}", if *ok { "pass" } else { "fail" }))
                .collect();
            let pass = report.all_pass();
            Ok(CommandOutput {
                details,
                result: format!("vdata-validate {}", if pass { "pass" } else { "fail" }),
                json: json!({"command": "vdata-validate", "verdict": pass,
                             "axioms": axioms.iter().map(|(n, ok)| json!({"axiom": n, "pass": ok})).collect::<Vec<_>>()}),
                verdict: Some(pass),
            })
        }
        Command::Ell { delta, args } => {
            let v = env.vdata(delta)?;
            let sections: Vec<&NormalValuedForm> = args
                .iter()
                .map(|a| env.section(a))
                .collect::<RResult<_>>()?;
            let r = ell_n(&v, &sections).map_err(engine)?;
            let text = printer::nvform_text(&r);
            Ok(CommandOutput::value(
                format!("ell {} {text}", args.len()),
                json!({"command": "ell", "arity": args.len(), "value": text}),
            ))
        }
        Command::Ell1Matrix { delta, d_bound } => {
            let v = env.vdata(delta)?;
            let op = ell1_operator(&v, *d_bound as u32).map_err(engine)?;
            let rank = op.matrix.rank();
            let mut details = Vec::new();
            for i in 0..op.matrix.n_rows() {
                let row: Vec<String> = (0..op.matrix.n_cols())
                    .map(|j| printer::rational_text(&op.matrix[(i, j)]))
                    .collect();
                details.push(format!("row {i} : {}", row.join(" ")));
            }
            let mut kernel_json = Vec::new();
            for k in &op.kernel {
                let text = printer::vector_text(k);
                details.push(format!("kernel-basis {text}"));
                kernel_json.push(text);
            }
            let result = format!(
                "ell1-matrix domain {} codomain {} rank {} kernel {}",
                op.domain.len(),
                op.codomain.len(),
                rank,
                op.kernel_dimension()
            );
            Ok(CommandOutput {
                details,
                result,
                json: json!({"command": "ell1-matrix", "domain": op.domain.len(),
                             "codomain": op.codomain.len(), "rank": rank,
                             "kernel": op.kernel_dimension(),
                             "kernel_basis": kernel_json}),
                verdict: None,
            })
        }
        Command::Symbol { delta, point, xi } => {
            let v = env.vdata(delta)?;
            let sym = symbol_at(&v, env.point(point)?, env.vector(xi)?).map_err(engine)?;
            let split = v.split().clone();
            let split = &split;
            let mut details = Vec::new();
            let mut rows_json = Vec::new();
            for (i, (idx, dir)) in sym.slots.iter().enumerate() {
                let row: Vec<String> = (0..sym.matrix.n_cols())
                    .map(|j| printer::rational_text(&sym.matrix[(i, j)]))
                    .collect();
                let names: Vec<&str> = idx.0.iter().map(|&k| split.var_name(k)).collect();
                let slot = format!("[{}]->{}", names.join(" "), split.var_name(*dir));
                details.push(format!("slot {slot} : {}", row.join(" ")));
                rows_json.push(json!({"slot": slot, "row": row}));
            }
            let injective = sym.is_injective();
            Ok(CommandOutput {
                details,
                result: format!("symbol injective {injective}"),
                json: json!({"command": "symbol", "injective": injective, "matrix": rows_json}),
                verdict: None,
            })
        }
        Command::FPsi { delta, series, order } => {
            let v = env.vdata(delta)?;
            let s = env.fseries(series)?;
            let f = f_psi(&v, &s, *order).map_err(engine)?;
            series_output("fpsi", &f, *order)
        }
        Command::McResidual { delta, series, order } => {
            let v = env.vdata(delta)?;
            let s = env.fseries(series)?;
            let f = mc_residual(&v, &s, *order).map_err(engine)?;
            series_output("mc-residual", &f, *order)
        }
        Command::McSolve { delta, s1, order, d_bound } => {
            let v = env.vdata(delta)?;
            let s1 = env.section(s1)?;
            let outcome = mc_solve(&v, s1, *order, *d_bound as u32).map_err(engine)?;
            match outcome {
                McOutcome::Solved(s) => {
                    let details: Vec<String> = s
                        .coeffs()
                        .iter()
                        .enumerate()
                        .map(|(i, c)| format!("s_{} = {}", i + 1, printer::section_text(c)))
                        .collect();
                    let coeffs_json: Vec<String> = s
                        .coeffs()
                        .iter()
                        .map(printer::section_text)
                        .collect();
                    Ok(CommandOutput {
                        details,
                        result: "mc-solve solved".to_string(),
                        json: json!({"command": "mc-solve", "outcome": "solved",
                                     "coefficients": coeffs_json}),
                        verdict: None,
                    })
                }
                McOutcome::Obstructed(rep) => Ok(CommandOutput {
                    details: vec![format!(
                        "residual = {}",
                        printer::nvform_text(&rep.residual)
                    )],
                    result: format!(
                        "mc-solve obstructed order {} operator-rank {} augmented-rank {}",
                        rep.order, rep.operator_rank, rep.augmented_rank
                    ),
                    json: json!({"command": "mc-solve", "outcome": "obstructed",
                                 "order": rep.order,
                                 "solved_through": rep.solved_through,
                                 "operator_rank": rep.operator_rank,
                                 "augmented_rank": rep.augmented_rank,
                                 "residual": printer::nvform_text(&rep.residual)}),
                    verdict: None,
                }),
                McOutcome::DegreeOverflow { order } => Ok(CommandOutput {
                    details: Vec::new(),
                    result: format!("mc-solve degree-overflow order {order}"),
                    json: json!({"command": "mc-solve", "outcome": "degree-overflow",
                                 "order": order}),
                    verdict: None,
                }),
            }
        }
        Command::PlaneCheck { psi, point, frame } => {
            let report = plane_condition(env.vform(psi)?, env.point(point)?, &env.frame(frame)?)
                .map_err(engine)?;
            Ok(CommandOutput {
                details: Vec::new(),
                result: format!(
                    "plane-check {}",
                    if report.passed { "pass" } else { "fail" }
                ),
                json: json!({"command": "plane-check", "verdict": report.passed}),
                verdict: Some(report.passed),
            })
        }
        Command::Cousin { phi, metric, point, frame, normal } => {
            let res = first_cousin_residual(
                env.sform(phi)?,
                env.metric(metric)?,
                env.point(point)?,
                &env.frame(frame)?,
                env.vector(normal)?,
            )
            .map_err(engine)?;
            let pass = res.iter().all(Rational::is_zero);
            let text = printer::vector_text(&res);
            Ok(CommandOutput {
                details: Vec::new(),
                result: format!("cousin {} {text}", if pass { "pass" } else { "fail" }),
                json: json!({"command": "cousin", "verdict": pass, "residuals": text}),
                verdict: Some(pass),
            })
        }
        Command::Hl { phi, psi_e, frame, c } => {
            let origin = Point::origin(env.sform(phi)?.split());
            let res = hl_residual(
                env.sform(phi)?,
                env.vform(psi_e)?,
                &origin,
                &env.frame(frame)?,
                c,
            )
            .map_err(engine)?;
            let pass = res.is_zero();
            Ok(CommandOutput {
                details: Vec::new(),
                result: format!(
                    "hl {} {}",
                    if pass { "pass" } else { "fail" },
                    printer::rational_text(&res)
                ),
                json: json!({"command": "hl", "verdict": pass,
                             "residual": printer::rational_text(&res)}),
                verdict: Some(pass),
            })
        }
        Command::Plie { delta, xi, kmax } => {
            let v = env.vdata(delta)?;
            let verdicts = plie_check(&v, env.section(xi)?, *kmax).map_err(engine)?;
            let mut details = Vec::new();
            let mut json_rows = Vec::new();
            let mut pass = true;
            for (k, verdict) in verdicts.iter().enumerate() {
                let text = match verdict {
                    PlieVerdict::BothZero => "both-zero".to_string(),
                    PlieVerdict::Ratio(c) => format!("ratio {}", printer::rational_text(c)),
                    PlieVerdict::Mismatch => {
                        pass = false;
                        "mismatch".to_string()
                    }
                };
                details.push(format!("arity {} {text}", k + 1));
                json_rows.push(json!({"arity": k + 1, "verdict": text}));
            }
            Ok(CommandOutput {
                details,
                result: format!("plie {}", if pass { "pass" } else { "fail" }),
                json: json!({"command": "plie", "verdict": pass, "arities": json_rows}),
                verdict: Some(pass),
            })
        }
        Command::Fixture { name } => run_fixture(name, opts),
    }
}

fn series_output(
    command: &str,
    f: &fncalc::deformation::FormalNormalForm,
    order: usize,
) -> RResult<CommandOutput> {
    let mut details = Vec::new();
    let mut coeffs_json = Vec::new();
    for k in 1..=order {
        let text = printer::nvform_text(f.coeff(k));
        details.push(format!("eps^{k} {text}"));
        coeffs_json.push(text);
    }
    let zero = f.is_zero_through(order);
    Ok(CommandOutput {
        details,
        result: format!("{command} zero {zero}"),
        json: json!({"command": command, "zero": zero, "coefficients": coeffs_json}),
        verdict: None,
    })
}

/// Load and validate a fixture file; any failed check, unreadable file, or
/// parse error makes the fixture unavailable (fail-closed).
fn run_fixture(name: &str, opts: &RunOptions) -> RResult<CommandOutput> {
    let path = opts.fixtures_dir.join(format!("{name}.fn"));
    let text = std::fs::read_to_string(&path)
        .map_err(|e| usage(format!("cannot read fixture `{}`: {e}", path.display())))?;
    let doc = parse_document(&text)
        .map_err(|e| usage(format!("fixture `{name}`: {e}")))?;
    if !doc.commands.is_empty() {
        return Err(usage(format!(
            "fixture `{name}` contains commands; only declarations and checks are allowed"
        )));
    }
    if doc.checks.is_empty() {
        return Err(usage(format!(
            "fixture `{name}` declares no checks; refusing to load unverified data"
        )));
    }
    let env = Env { doc: &doc };
    let origin = check_origin(&doc)?;
    let mut details = Vec::new();
    let mut failed: Option<String> = None;
    let mut checks_json = Vec::new();
    for check in &doc.checks {
        let pass = run_check(&env, check, &origin)?;
        let identity = check.identity();
        details.push(format!(
            "check {identity} {}",
            if pass { "pass" } else { "fail" }
        ));
        checks_json.push(json!({"identity": identity, "pass": pass}));
        if !pass && failed.is_none() {
            failed = Some(identity);
        }
    }
    let (result, verdict) = match &failed {
        None => (format!("fixture {name} pass"), true),
        Some(id) => (format!("fixture {name} fail {id}"), false),
    };
    Ok(CommandOutput {
        details,
        result,
        json: json!({"command": "fixture", "name": name, "verdict": verdict,
                     "checks": checks_json}),
        verdict: Some(verdict),
    })
}

/// Convenience for tests: parse and run in one step.
pub fn run_text(text: &str, opts: &RunOptions) -> Result<RunOutput, String> {
    let doc = parse_document(text).map_err(|e| e.to_string())?;
    run_document(&doc, opts).map_err(|e| e.to_string())
}
