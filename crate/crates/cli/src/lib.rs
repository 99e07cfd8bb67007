//! Reports and commands behind the `frontal` binary.
//!
//! Every command turns one or more [`GermDocument`]s into a [`Report`]. The
//! report echoes its inputs with the truncation order that was used, so
//! running the same command on a saved JSON report reproduces it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use frontal_core::document::GermDocument;
use frontal_core::frontal::{adapt_target, frontality, is_front, one_based, FrontalData, FrontalStatus};
use frontal_core::gallery::{expected_class, normal_form, random_a_perturbation, CATALOG};
use frontal_core::germs::{corank, JetMap, VectorFieldJet};
use frontal_core::jetcalc::{Jet, Rational};
use frontal_core::openings::{is_opening, is_versal_opening, j_module_equal, JModuleComparison};
use frontal_core::recognize::{recognize, vanishing_order, Certificate, RecognizeOptions, SingularityClass};
use frontal_core::Error;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const EXIT_DEFINITE: i32 = 0;
pub const EXIT_SELFTEST_FAILED: i32 = 1;
pub const EXIT_UNRECOGNIZED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_INPUT: i32 = 4;
pub const EXIT_PRECONDITION: i32 = 5;

pub const TOOL: &str = "frontal";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Recognize,
    Frontality,
    Jacobian,
    Orders,
    Opening,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Recognize => "recognize",
            Command::Frontality => "frontality",
            Command::Jacobian => "jacobian",
            Command::Orders => "orders",
            Command::Opening => "opening",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Overrides the order stored in the documents.
    pub order: Option<u32>,
    pub max_eta_order: u32,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        let r = RecognizeOptions::default();
        Options {
            order: None,
            max_eta_order: r.max_eta_order,
            seed: r.seed,
        }
    }
}

impl Options {
    fn recognize(&self) -> RecognizeOptions {
        RecognizeOptions {
            max_eta_order: self.max_eta_order,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub order: u32,
    pub max_eta_order: u32,
    pub inputs: Vec<GermDocument>,
    /// Class name, frontality status, or the outcome of the command.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<SingularityClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frontality: Option<FrontalStatus>,
    #[serde(default)]
    pub values: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub exit_code: i32,
}

impl Report {
    fn new(command: Command, order: u32, opts: &Options, inputs: Vec<GermDocument>) -> Self {
        Report {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.name().to_string(),
            order,
            max_eta_order: opts.max_eta_order,
            inputs,
            verdict: String::new(),
            class: None,
            frontality: None,
            values: Vec::new(),
            certificate: None,
            error: None,
            exit_code: EXIT_DEFINITE,
        }
    }

    fn fail(mut self, verdict: &str, e: &Error) -> Self {
        self.verdict = verdict.to_string();
        self.error = Some(e.to_string());
        self.exit_code = exit_code_of(e);
        self
    }

    fn value(&mut self, key: impl Into<String>, v: impl ToString) {
        self.values.push((key.into(), v.to_string()));
    }
}

/// Input errors are the caller's to fix; everything else is a violated
/// precondition of the mathematics.
pub fn exit_code_of(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Document(_)
        | Error::NoComponents
        | Error::NonzeroConstant { .. }
        | Error::DimensionOrder { .. }
        | Error::Jet(_)
        | Error::UnknownNormalForm(_)
        | Error::InvalidCurveType(_) => EXIT_INPUT,
        _ => EXIT_PRECONDITION,
    }
}

pub fn exit_code_of_class(c: &SingularityClass) -> i32 {
    match c {
        SingularityClass::Unrecognized { .. } => EXIT_UNRECOGNIZED,
        SingularityClass::Inconclusive { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_DEFINITE,
    }
}

/// The variant name of a status, e.g. `DegenerateJacobiIdeal`.
pub fn status_kind(s: &FrontalStatus) -> String {
    serde_json::to_value(s)
        .ok()
        .and_then(|v| v.get("kind").and_then(|k| k.as_str()).map(str::to_string))
        .unwrap_or_else(|| s.to_string())
}

/// A loaded input file: its documents and the text they came from.
#[derive(Clone, Debug)]
pub struct Input {
    pub path: PathBuf,
    pub documents: Vec<GermDocument>,
    /// The raw text, kept for error positions of TOML documents.
    pub source: Option<String>,
}

/// Reads a `.toml` document, or a `.json` file holding either a document or
/// a report (whose echoed inputs are used).
pub fn load(path: &Path) -> Result<Input, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Document(format!("cannot read {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|x| x == "json") || text.trim_start().starts_with('{');
    if !is_json {
        let doc = GermDocument::from_toml(&text)?;
        return Ok(Input {
            path: path.to_path_buf(),
            documents: vec![doc],
            source: Some(text),
        });
    }
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let documents = if value.get("inputs").is_some() {
        let report: Report = serde_json::from_value(value)
            .map_err(|e| Error::Document(format!("malformed report: {e}")))?;
        report.inputs
    } else {
        vec![GermDocument::from_json(&text)?]
    };
    Ok(Input {
        path: path.to_path_buf(),
        documents,
        source: None,
    })
}

struct Parsed {
    doc: GermDocument,
    germ: JetMap,
}

/// Parses a document at the effective order and echoes it with that order.
fn parse(doc: &GermDocument, source: Option<&str>, opts: &Options) -> Result<Parsed, Error> {
    let order = opts.order.unwrap_or_else(|| doc.order());
    let germ = doc.to_germ(Some(order), source)?;
    let mut echoed = doc.clone();
    echoed.order = Some(order);
    Ok(Parsed { doc: echoed, germ })
}

fn effective_order(docs: &[GermDocument], opts: &Options) -> u32 {
    opts.order
        .or_else(|| docs.first().map(|d| d.order()))
        .unwrap_or(frontal_core::jetcalc::DEFAULT_ORDER)
}

fn input_error(command: Command, docs: &[GermDocument], opts: &Options, e: &Error) -> Report {
    Report::new(command, effective_order(docs, opts), opts, docs.to_vec()).fail("InputError", e)
}

/// Runs a single-germ command on the first document of `input`.
pub fn run(command: Command, input: &Input, opts: &Options) -> Report {
    match command {
        Command::Opening => return cmd_opening(&input.documents, input.source.as_deref(), opts),
        Command::Selftest => return cmd_selftest(opts),
        _ => {}
    }
    let Some(doc) = input.documents.first() else {
        return input_error(command, &[], opts, &Error::Document("no input document".into()));
    };
    match command {
        Command::Recognize => cmd_recognize(doc, input.source.as_deref(), opts),
        Command::Frontality => cmd_frontality(doc, input.source.as_deref(), opts),
        Command::Jacobian => cmd_jacobian(doc, input.source.as_deref(), opts),
        Command::Orders => cmd_orders(doc, input.source.as_deref(), opts),
        Command::Opening | Command::Selftest => unreachable!("handled above"),
    }
}

/// Runs `command` on every `.toml` and `.json` file in `dir`, in parallel,
/// sorted by file name.
pub fn run_batch(command: Command, dir: &Path, opts: &Options) -> Result<Vec<(PathBuf, Report)>, Error> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| Error::Document(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml" || x == "json"))
        .collect();
    paths.sort();
    Ok(paths
        .into_par_iter()
        .map(|p| {
            let report = match load(&p) {
                Ok(input) => run(command, &input, opts),
                Err(e) => input_error(command, &[], opts, &e),
            };
            (p, report)
        })
        .collect())
}

fn frontal_values(r: &mut Report, f: &JetMap, fd: &FrontalData, names: &[String]) {
    r.value("corank", corank(f));
    for (set, d) in &fd.minors {
        r.value(format!("D{}", one_based(set)), d.format_with(names));
    }
    if let Some(i0) = &fd.generator_index {
        r.value("generator", format!("D{}", one_based(i0)));
    }
    if let Some(l) = &fd.lambda {
        r.value("lambda", l.format_with(names));
    }
    for (set, h) in &fd.pluecker {
        r.value(format!("h{}", one_based(set)), h.format_with(names));
    }
    if let Some(eta) = &fd.kernel {
        r.value("eta", format_field(eta, names));
    }
}

pub fn cmd_recognize(doc: &GermDocument, source: Option<&str>, opts: &Options) -> Report {
    let p = match parse(doc, source, opts) {
        Ok(p) => p,
        Err(e) => return input_error(Command::Recognize, std::slice::from_ref(doc), opts, &e),
    };
    let mut r = Report::new(Command::Recognize, p.germ.order(), opts, vec![p.doc.clone()]);
    let names = &p.doc.vars;
    // The frontality status is reported even when recognition is refused.
    if p.germ.m() > p.germ.n() {
        match frontality(&p.germ) {
            Ok(fd) => {
                if let Some(l) = fd.lambda.as_ref().filter(|_| fd.is_proper()) {
                    r.value("lambda", l.format_with(names));
                }
                r.frontality = Some(fd.status);
            }
            Err(e) => return r.fail("Refused", &e),
        }
    }
    match recognize(&p.germ, &opts.recognize()) {
        Ok(rec) => {
            r.verdict = rec.class.name().to_string();
            r.exit_code = exit_code_of_class(&rec.class);
            r.class = Some(rec.class);
            r.certificate = Some(rec.certificate);
            r
        }
        Err(e) => {
            let verdict = match (&e, &r.frontality) {
                (Error::Corank(_), _) => "Refused".to_string(),
                (_, Some(s)) if *s != FrontalStatus::ProperFrontal => status_kind(s),
                _ => "Refused".to_string(),
            };
            r.fail(&verdict, &e)
        }
    }
}

pub fn cmd_frontality(doc: &GermDocument, source: Option<&str>, opts: &Options) -> Report {
    let p = match parse(doc, source, opts) {
        Ok(p) => p,
        Err(e) => return input_error(Command::Frontality, std::slice::from_ref(doc), opts, &e),
    };
    let mut r = Report::new(Command::Frontality, p.germ.order(), opts, vec![p.doc.clone()]);
    let fd = match frontality(&p.germ) {
        Ok(fd) => fd,
        Err(e) => return r.fail("Refused", &e),
    };
    frontal_values(&mut r, &p.germ, &fd, &p.doc.vars);
    if fd.is_proper() && corank(&p.germ) == 1 {
        match is_front(&p.germ, &fd) {
            Ok(b) => r.value("front", b),
            Err(e) => r.value("front", format!("undetermined: {e}")),
        }
    }
    if let FrontalStatus::InconclusiveAtOrder { .. } = fd.status {
        r.exit_code = EXIT_INCONCLUSIVE;
    }
    r.verdict = status_kind(&fd.status);
    r.frontality = Some(fd.status);
    r
}

/// `λ = c · λ₀` with `λ₀` monic in its leading term.
fn split_unit(l: &Jet) -> Option<(Rational, Jet)> {
    let (_, c) = l.leading_term()?;
    let inv = c.recip();
    Some((c, l.scale(&inv)))
}

pub fn cmd_jacobian(doc: &GermDocument, source: Option<&str>, opts: &Options) -> Report {
    let p = match parse(doc, source, opts) {
        Ok(p) => p,
        Err(e) => return input_error(Command::Jacobian, std::slice::from_ref(doc), opts, &e),
    };
    let mut r = Report::new(Command::Jacobian, p.germ.order(), opts, vec![p.doc.clone()]);
    let fd = match frontality(&p.germ) {
        Ok(fd) => fd,
        Err(e) => return r.fail("Refused", &e),
    };
    let names = &p.doc.vars;
    frontal_values(&mut r, &p.germ, &fd, names);
    r.frontality = Some(fd.status.clone());
    let lambda = match fd.lambda() {
        Ok(l) => l.clone(),
        Err(e) => return r.fail(&status_kind(&fd.status), &e),
    };
    if let Some((unit, reduced)) = split_unit(&lambda) {
        r.value("unit", unit);
        r.value("lambda_reduced", reduced.format_with(names));
        r.value("singular_locus", format!("{} = 0", reduced.format_with(names)));
    }
    r.verdict = "ProperFrontal".to_string();
    r
}

pub fn cmd_orders(doc: &GermDocument, source: Option<&str>, opts: &Options) -> Report {
    let p = match parse(doc, source, opts) {
        Ok(p) => p,
        Err(e) => return input_error(Command::Orders, std::slice::from_ref(doc), opts, &e),
    };
    let mut r = Report::new(Command::Orders, p.germ.order(), opts, vec![p.doc.clone()]);
    let f = &p.germ;
    let k = corank(f);
    if k != 1 {
        return r.fail("Refused", &Error::Corank(k));
    }
    let fd = match frontality(f) {
        Ok(fd) => fd,
        Err(e) => return r.fail("Refused", &e),
    };
    r.frontality = Some(fd.status.clone());
    let (lambda, eta) = match (fd.lambda(), fd.kernel.as_ref()) {
        (Ok(l), Some(eta)) => (l.clone(), eta.clone()),
        (Err(e), _) => return r.fail(&status_kind(&fd.status), &e),
        (Ok(_), None) => {
            return r.fail("Refused", &Error::Precondition("no kernel field at this order".into()))
        }
    };
    let adapted = match adapt_target(f, &fd) {
        Ok(a) => a,
        Err(e) => return r.fail("Refused", &e),
    };
    let names = &p.doc.vars;
    r.value("lambda", lambda.format_with(names));
    r.value("eta", format_field(&eta, names));
    let mut undetermined = false;
    let mut record = |r: &mut Report, key: String, h: &Jet| {
        let o = vanishing_order(h, &eta, opts.max_eta_order);
        undetermined |= o.exact().is_none();
        r.value(key, o);
    };
    record(&mut r, "ord_eta(lambda)".to_string(), &lambda);
    for i in f.n()..f.m() {
        r.value(format!("f{}", i + 1), adapted.comp(i).format_with(names));
        record(&mut r, format!("ord_eta(f{})", i + 1), adapted.comp(i));
    }
    r.verdict = "orders".to_string();
    if undetermined {
        r.exit_code = EXIT_INCONCLUSIVE;
    }
    r
}

/// `f` is the candidate opening, `g` the plane-to-plane germ.
pub fn cmd_opening(docs: &[GermDocument], source: Option<&str>, opts: &Options) -> Report {
    if docs.len() != 2 {
        let e = Error::Document(format!("opening needs two germs (f, g), got {}", docs.len()));
        return input_error(Command::Opening, docs, opts, &e);
    }
    let parsed: Result<Vec<Parsed>, Error> = docs.iter().map(|d| parse(d, source, opts)).collect();
    let parsed = match parsed {
        Ok(p) => p,
        Err(e) => return input_error(Command::Opening, docs, opts, &e),
    };
    let (f, g) = (&parsed[0].germ, &parsed[1].germ);
    let order = f.order().min(g.order());
    let (f, g) = (f.with_order(order), g.with_order(order));
    let echoed = parsed.iter().map(|p| p.doc.clone()).collect();
    let mut r = Report::new(Command::Opening, order, opts, echoed);
    let opening = match is_opening(&f, &g, order) {
        Ok(b) => b,
        Err(e) => return r.fail("Refused", &e),
    };
    r.value("opening", opening);
    let names = &parsed[0].doc.vars;
    match is_versal_opening(&f, &g, order) {
        Ok(v) => {
            r.value("versal", v.versal);
            r.value("versal_order", v.order);
            if let Some(m) = v.missing {
                r.value("missing", m.format_with(names));
            }
        }
        Err(e) => r.value("versal", format!("undetermined: {e}")),
    }
    match j_module_equal(&f, &g, order) {
        Ok(JModuleComparison::Equal { .. }) => r.value("j_module_equal", true),
        Ok(JModuleComparison::Differ {
            direction, component, ..
        }) => {
            r.value("j_module_equal", false);
            r.value("j_module_obstruction", format!("{direction}, component {}", component + 1));
        }
        Err(e) => r.value("j_module_equal", format!("undetermined: {e}")),
    }
    r.verdict = if opening { "opening" } else { "not an opening" }.to_string();
    r
}

/// Recognizes a seeded perturbation of every catalog normal form.
pub fn cmd_selftest(opts: &Options) -> Report {
    let order = opts.order.unwrap_or(frontal_core::jetcalc::DEFAULT_ORDER);
    let mut r = Report::new(Command::Selftest, order, opts, Vec::new());
    r.value("seed", opts.seed);
    let results: Vec<(String, Result<bool, String>)> = CATALOG
        .par_iter()
        .map(|&(tag, m)| {
            let outcome = (|| -> Result<bool, Error> {
                let f = normal_form(tag, m, order)?;
                let g = random_a_perturbation(&f, opts.seed, 4.min(order))?;
                let class = recognize(&g, &opts.recognize())?.class;
                let expected = expected_class(tag)?;
                Ok(class == expected)
            })();
            (tag.to_string(), outcome.map_err(|e| e.to_string()))
        })
        .collect();
    let mut failed = 0;
    for (tag, outcome) in results {
        let shown = match outcome {
            Ok(true) => "pass".to_string(),
            Ok(false) => {
                failed += 1;
                "fail".to_string()
            }
            Err(e) => {
                failed += 1;
                format!("error: {e}")
            }
        };
        r.value(tag, shown);
    }
    r.verdict = if failed == 0 { "pass" } else { "fail" }.to_string();
    if failed > 0 {
        r.exit_code = EXIT_SELFTEST_FAILED;
    }
    r
}

fn format_field(eta: &VectorFieldJet, names: &[String]) -> String {
    let parts: Vec<String> = eta
        .coeffs()
        .iter()
        .zip(names)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, v)| format!("({})∂/∂{v}", c.format_with(names)))
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => render_json(report),
        Format::Text => render_text(report),
    }
}

pub fn render_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}

pub fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {} (order {})", r.tool, r.version, r.command, r.order);
    for (i, d) in r.inputs.iter().enumerate() {
        let _ = writeln!(s, "input {}: ({}) -> ({})", i + 1, d.vars.join(", "), d.components.join(", "));
    }
    let _ = writeln!(s, "verdict: {}", r.verdict);
    if let Some(c) = &r.class {
        if !c.is_definite() {
            let _ = writeln!(s, "detail: {c}");
        }
    }
    if let Some(st) = &r.frontality {
        let _ = writeln!(s, "frontality: {st}");
    }
    if let Some(e) = &r.error {
        let _ = writeln!(s, "error: {e}");
    }
    for (k, v) in &r.values {
        let _ = writeln!(s, "  {k} = {v}");
    }
    if let Some(cert) = &r.certificate {
        let _ = writeln!(s, "certificate:");
        for e in &cert.entries {
            let _ = write!(s, "  [{}] {}: {}", e.verdict, e.id, e.statement);
            if !e.values.is_empty() {
                let vals: Vec<String> = e.values.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                let _ = write!(s, " ({})", vals.join("; "));
            }
            s.push('\n');
        }
    }
    let _ = writeln!(s, "exit: {}", r.exit_code);
    s
}
