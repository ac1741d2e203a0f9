use std::fmt;

use isocalc::constructions::{
    make_cuntz, make_isometry_with_parts, make_shift_with_range, make_shift_with_wandering,
    ConstructionError, Constructed,
};
use isocalc::json::{
    certificate_to_json, coefficient_to_json, constructed_to_json, index_set_to_json,
    operator_to_json, parse_operator, unitary_to_json, wold_to_json,
};
use isocalc::mi_space::{
    adjoint_membership_check, check_mi_space, commutation_check, commutator_identity_check,
    structural_audit, GramReport, MiError, Verdict,
};
use isocalc::numeric_oracle::{cross_validate, norm_estimate, truncate};
use isocalc::op_algebra::{Coefficient, Operator, ScalarTest};
use isocalc::wold::{self, check_bounded_isometry, wold_decompose, wold_decompose_prefix, WoldError};
use num_traits::One;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::input::{load_operators, Document, InputError};

/// Largest difference between exact and floating-point products that still
/// counts as agreement.
const CROSS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Negative = 1,
    Input = 2,
    Inconsistent = 3,
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("construction rejected: {0}")]
    Construction(#[from] ConstructionError),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy)]
pub enum Cert {
    Exact,
    Prefix(u64),
    Truncation(usize),
}

impl Cert {
    fn to_json(self) -> Value {
        match self {
            Cert::Exact => certificate_to_json(&wold::Certificate::Exact),
            Cert::Prefix(n) => certificate_to_json(&wold::Certificate::Prefix(n)),
            Cert::Truncation(n) => json!({ "truncation": n }),
        }
    }
}

impl From<wold::Certificate> for Cert {
    fn from(c: wold::Certificate) -> Self {
        match c {
            wold::Certificate::Exact => Cert::Exact,
            wold::Certificate::Prefix(n) => Cert::Prefix(n),
        }
    }
}

impl fmt::Display for Cert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cert::Exact => write!(f, "exact"),
            Cert::Prefix(n) => write!(f, "verified for indices below {n}"),
            Cert::Truncation(n) => write!(f, "floating point, {n}×{n} truncation"),
        }
    }
}

/// The outcome of one command. JSON is authoritative; the text form is
/// rendered from the same verdict and certificate.
pub struct Report {
    pub command: &'static str,
    pub verdict: String,
    pub certificate: Cert,
    pub parameters: Value,
    pub body: Map<String, Value>,
    pub notes: Vec<String>,
    pub exit: Exit,
}

impl Report {
    fn new(command: &'static str, parameters: Value) -> Self {
        Report {
            command,
            verdict: String::new(),
            certificate: Cert::Exact,
            parameters,
            body: Map::new(),
            notes: Vec::new(),
            exit: Exit::Ok,
        }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.body.insert(key.to_string(), value);
    }

    fn verdict(&mut self, verdict: &str, exit: Exit) {
        self.verdict = verdict.to_string();
        self.exit = exit;
    }

    pub fn to_json(&self) -> Value {
        let mut out = self.body.clone();
        out.insert("command".into(), json!(self.command));
        out.insert("verdict".into(), json!(self.verdict));
        out.insert("certificate".into(), self.certificate.to_json());
        out.insert(
            "provenance".into(),
            json!({
                "tool": "isocalc",
                "version": env!("CARGO_PKG_VERSION"),
                "command": self.command,
                "parameters": self.parameters,
            }),
        );
        Value::Object(out)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{}: {}\ncertificate: {}\n",
            self.command, self.verdict, self.certificate
        );
        for line in &self.notes {
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

pub struct Options {
    pub bound: u64,
    pub truncation: Option<usize>,
}

fn exact_isometry(op: &Operator) -> bool {
    op.adjoint().mul(op).scalar_test() == ScalarTest::Scalar(Coefficient::one())
}

fn round_trips(c: &Constructed) -> bool {
    let v = constructed_to_json(c);
    parse_operator(&v, "").is_ok_and(|back| constructed_to_json(&back) == v)
}

fn finish_construction(mut r: Report, c: Constructed, bound: u64) -> Report {
    let verified = match &c {
        Constructed::Exact(op) => exact_isometry(op),
        Constructed::Prefix(p) => {
            r.certificate = Cert::Prefix(bound);
            check_bounded_isometry(p, bound).is_ok_and(|n| n.is_one())
        }
    };
    let round_trip = round_trips(&c);
    r.set("operator", constructed_to_json(&c));
    r.set("tier", json!(if c.is_exact() { "exact" } else { "prefix" }));
    r.notes.push(format!("tier: {}", if c.is_exact() { "exact" } else { "prefix" }));
    r.notes.push(match &c {
        Constructed::Exact(op) => format!("operator: {op}"),
        Constructed::Prefix(p) => format!("operator: {p}"),
    });
    if verified && round_trip {
        r.verdict("constructed", Exit::Ok);
    } else {
        r.verdict("inconsistent", Exit::Inconsistent);
        r.notes.push(format!(
            "isometry check {}, serialisation round trip {}",
            pass(verified),
            pass(round_trip)
        ));
    }
    r
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "passed"
    } else {
        "FAILED"
    }
}

pub fn make_shift(arg: &str, opts: &Options) -> Result<Report, CommandError> {
    let m = Document::load(arg)?.index_set()?;
    let c = make_shift_with_wandering(&m)?;
    let r = Report::new("make-shift", json!({ "wandering": index_set_to_json(&m) }));
    Ok(finish_construction(r, c, opts.bound))
}

pub fn make_range_shift(arg: &str, opts: &Options) -> Result<Report, CommandError> {
    let k = Document::load(arg)?.index_set()?;
    let c = make_shift_with_range(&k)?;
    let r = Report::new("make-range-shift", json!({ "range": index_set_to_json(&k) }));
    Ok(finish_construction(r, c, opts.bound))
}

pub fn make_isometry(unitary: &str, range: &str, opts: &Options) -> Result<Report, CommandError> {
    let u = Document::load(unitary)?.unitary()?;
    let k = Document::load(range)?.index_set()?;
    let c = make_isometry_with_parts(&u, &k)?;
    let r = Report::new(
        "make-isometry",
        json!({ "unitary": unitary_to_json(&u), "range": index_set_to_json(&k) }),
    );
    Ok(finish_construction(r, c, opts.bound))
}

pub fn make_cuntz_family(n: u64) -> Result<Report, CommandError> {
    let gens = make_cuntz(n)?;
    let mut r = Report::new("make-cuntz", json!({ "n": n }));
    let mut sum = Operator::zero();
    let mut relations = true;
    for (i, si) in gens.iter().enumerate() {
        sum = sum.add(&si.mul(&si.adjoint()));
        for (j, sj) in gens.iter().enumerate() {
            let want = if i == j { Coefficient::one() } else { Coefficient::zero() };
            relations &= sj.adjoint().mul(si).scalar_test() == ScalarTest::Scalar(want);
        }
    }
    relations &= sum.scalar_test() == ScalarTest::Scalar(Coefficient::one());
    r.set("generators", gens.iter().map(operator_to_json).collect());
    for (i, g) in gens.iter().enumerate() {
        r.notes.push(format!("S{i} = {g}"));
    }
    if relations {
        r.verdict("constructed", Exit::Ok);
    } else {
        r.verdict("inconsistent", Exit::Inconsistent);
    }
    Ok(r)
}

fn gram_summary(r: &mut Report, report: &GramReport) {
    r.set("generators", json!(report.generators.len()));
    match report.verdict {
        Verdict::MiSpace => {
            let dim = report.dimension.expect("MI-spaces carry a dimension");
            r.set("code", json!("MI-OK"));
            r.set("dimension", json!(dim));
            r.notes.push(format!("dimension: {dim}"));
            r.verdict("mi-space", Exit::Ok);
        }
        Verdict::Violation { pair, witness } => {
            r.set("code", json!("MI-VIOLATION"));
            r.set("witness", json!({ "pair": [pair.0, pair.1], "column": witness }));
            r.notes.push(format!(
                "MI-VIOLATION: A{}*A{} is not a scalar multiple of I (column {witness})",
                pair.1, pair.0
            ));
            r.verdict("MI-VIOLATION", Exit::Negative);
        }
    }
}

pub fn check_mi(args: &[String]) -> Result<Report, CommandError> {
    let gens = load_operators(args)?;
    let report = check_mi_space(&gens);
    let mut r = Report::new("check-mi", json!({ "inputs": args }));
    gram_summary(&mut r, &report);
    Ok(r)
}

pub fn gram(args: &[String]) -> Result<Report, CommandError> {
    let gens = load_operators(args)?;
    let report = check_mi_space(&gens);
    let mut r = Report::new("gram", json!({ "inputs": args }));
    gram_summary(&mut r, &report);
    let matrix: Vec<Value> = report
        .gram
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| e.as_ref().map_or(Value::Null, coefficient_to_json))
                .collect()
        })
        .collect();
    r.set("gram", Value::Array(matrix));
    r.set("hermitian", json!(report.hermitian));
    r.set("psd", json!(report.psd));
    r.set("reduction", json!(report.reduction));
    for row in &report.gram {
        let cells: Vec<String> = row
            .iter()
            .map(|e| e.as_ref().map_or("?".to_string(), |c| c.to_string()))
            .collect();
        r.notes.push(format!("  [{}]", cells.join(", ")));
    }
    if report.is_mi_space() {
        r.notes.push(format!("hermitian: {}, psd: {}", report.hermitian, report.psd));
        if !(report.hermitian && report.psd) {
            r.verdict("inconsistent", Exit::Inconsistent);
        }
    }
    Ok(r)
}

pub fn wold_command(arg: &str, opts: &Options) -> Result<Report, CommandError> {
    let op = Document::load(arg)?.operator()?;
    let mut r = Report::new("wold", json!({ "operator": arg, "bound": opts.bound }));
    let result = match &op {
        Constructed::Exact(a) => wold_decompose(a, opts.bound),
        Constructed::Prefix(p) => wold_decompose_prefix(p, opts.bound),
    };
    match result {
        Ok(w) => {
            r.certificate = w.certificate.into();
            let v = wold_to_json(&w);
            for key in ["unitary", "shift", "wandering", "multiplicity"] {
                r.set(key, v[key].clone());
            }
            r.notes.push(format!("unitary part: {}", w.unitary));
            r.notes.push(format!("shift part: {}", w.shift));
            r.notes.push(format!("wandering set: {}", w.wandering));
            r.notes.push(format!("multiplicity: {}", w.multiplicity));
            r.verdict("decomposed", Exit::Ok);
        }
        Err(e @ WoldError::NotBasisMap { .. }) => return Err(CommandError::Unsupported(e.to_string())),
        Err(e) => {
            let witness = match e {
                WoldError::NotIsometry { witness } => json!(witness),
                WoldError::UnequalNorms { first, second } => json!([first, second]),
                WoldError::SharedRow { first, second, row } => json!([first, second, row]),
                _ => Value::Null,
            };
            r.set("witness", witness);
            r.set("reason", json!(e.to_string()));
            r.notes.push(e.to_string());
            r.verdict("not-isometry", Exit::Negative);
        }
    }
    Ok(r)
}

pub fn commutator_check(a: &str, b: &str) -> Result<Report, CommandError> {
    let a_op = Document::load(a)?.exact_operator()?;
    let b_op = Document::load(b)?.exact_operator()?;
    let mut r = Report::new("commutator-check", json!({ "a": a, "b": b }));
    let identity = match commutator_identity_check(&a_op, &b_op) {
        Ok(id) => id,
        Err(MiError::NotMiPair { pair, witness }) => {
            r.set("code", json!("MI-VIOLATION"));
            r.set("witness", json!({ "pair": [pair.0, pair.1], "column": witness }));
            r.notes.push(format!("A and B do not span an MI-space (column {witness})"));
            r.verdict("MI-VIOLATION", Exit::Negative);
            return Ok(r);
        }
        Err(e) => return Err(CommandError::Unsupported(e.to_string())),
    };
    let commutation = commutation_check(&a_op, &b_op).map_err(|e| CommandError::Unsupported(e.to_string()))?;
    let code = if identity.holds { "CI-HOLDS" } else { "CI-FAIL" };
    r.set("code", json!(code));
    r.set("commutator", operator_to_json(&identity.commutator));
    r.set("lhs", operator_to_json(&identity.lhs));
    r.set("rhs_scalar", coefficient_to_json(&identity.rhs_scalar));
    r.set("commutator_in_mi", json!(identity.commutator_in_mi));
    r.set(
        "commutation",
        json!({
            "commute": commutation.commute,
            "dependent": commutation.dependent,
            "consistent": commutation.consistent,
        }),
    );
    r.notes.push(format!("{code}: [A,B]*[A,B] = {}", identity.lhs));
    r.notes.push(format!("expected: ({})·I", identity.rhs_scalar));
    r.notes.push(format!(
        "commute: {}, linearly dependent: {}",
        commutation.commute, commutation.dependent
    ));
    if identity.holds && identity.commutator_in_mi && commutation.consistent {
        r.verdict(code, Exit::Ok);
    } else {
        r.verdict("inconsistent", Exit::Inconsistent);
    }
    Ok(r)
}

pub fn audit(args: &[String]) -> Result<Report, CommandError> {
    let gens = load_operators(args)?;
    let report = check_mi_space(&gens);
    let mut r = Report::new("audit", json!({ "inputs": args }));
    gram_summary(&mut r, &report);
    if !report.is_mi_space() {
        return Ok(r);
    }
    let findings = structural_audit(&report);
    let mut inconsistent = findings.iter().any(|f| f.is_inconsistency());
    r.set(
        "findings",
        findings
            .iter()
            .map(|f| json!({ "code": f.code.as_str(), "holds": f.holds, "detail": f.detail }))
            .collect(),
    );
    for f in &findings {
        r.notes.push(format!("{} [{}] {}", f.code, if f.holds { "ok" } else { "fails" }, f.detail));
    }
    let mut adjoints = Vec::new();
    for (n, g) in gens.iter().enumerate() {
        match adjoint_membership_check(g) {
            Ok(a) => {
                inconsistent |= !a.consistent();
                adjoints.push(json!({
                    "generator": n,
                    "adjoint_in_mi": a.adjoint_in_mi,
                    "forced_unitary": a.forced_unitary,
                    "witness": a.witness,
                }));
                r.notes.push(format!(
                    "A{n}*: {} the span{}",
                    if a.adjoint_in_mi { "in" } else { "not in" },
                    if a.forced_unitary { ", so A is a unitary multiple" } else { "" }
                ));
            }
            Err(_) => adjoints.push(json!({ "generator": n, "skipped": "not an isometry multiple" })),
        }
    }
    r.set("adjoints", Value::Array(adjoints));
    if inconsistent {
        r.verdict("inconsistent", Exit::Inconsistent);
    }
    Ok(r)
}

pub fn truncate_command(arg: &str, opts: &Options) -> Result<Report, CommandError> {
    let n = opts.truncation.unwrap_or(64);
    let op = Document::load(arg)?.operator()?;
    let t = truncate(&op, n);
    let norm = norm_estimate(&op, n);
    let mut r = Report::new("truncate", json!({ "operator": arg, "truncation": n }));
    r.certificate = Cert::Truncation(n);
    let mut entries = Vec::new();
    for j in 0..n {
        for &(i, v) in t.column(j) {
            entries.push(json!([i, j, v.re, v.im]));
        }
    }
    r.set("size", json!(n));
    r.set("entries", Value::Array(entries));
    r.set("nonzeros", json!(t.nonzeros()));
    r.set("safe_columns", json!(t.safe_columns().len()));
    r.set("norm_estimate", json!(norm));
    r.notes.push(format!("norm estimate: {norm}"));
    r.notes.push(format!("safe columns: {} of {n}", t.safe_columns().len()));
    r.notes.push(t.to_csv().trim_end().to_string());
    r.verdict("truncated", Exit::Ok);
    Ok(r)
}

pub fn cross_validate_command(a: &str, b: &str, opts: &Options) -> Result<Report, CommandError> {
    let n = opts.truncation.unwrap_or(128);
    let a_op = Document::load(a)?.exact_operator()?;
    let b_op = Document::load(b)?.exact_operator()?;
    let cv = cross_validate(&a_op, &b_op, n);
    let mut r = Report::new("cross-validate", json!({ "a": a, "b": b, "truncation": n }));
    r.certificate = Cert::Truncation(n);
    r.set("max_difference", json!(cv.max_difference));
    r.set("columns_compared", json!(cv.columns_compared));
    r.set("tolerance", json!(CROSS_TOLERANCE));
    r.notes.push(format!(
        "max |P(AB)P − (PAP)(PBP)| = {} over {} columns",
        cv.max_difference, cv.columns_compared
    ));
    if cv.max_difference <= CROSS_TOLERANCE {
        r.verdict("agree", Exit::Ok);
    } else {
        r.verdict("disagree", Exit::Inconsistent);
    }
    Ok(r)
}
