//! Command-line front end. Every command produces a [`RunReport`]; the exit
//! code is 0 when no verdict failed, 1 when one did, and 2 for usage, parse
//! and input errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{Catalog, CatalogEntry, Source, Q_SAMPLES};
use crate::error::{Error, Result};
use crate::extend;
use crate::field::{parse_rational, FieldSpec, FieldValue};
use crate::isocheck::{self, Classification, Classifier, IsoVerdict};
use crate::msc::{parse_msc, render_msc, StructureMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Passed,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub subject: String,
    pub status: Status,
    pub outcome: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub field: String,
    pub inputs: Vec<String>,
    pub verdicts: Vec<Verdict>,
    pub counters: Counters,
    pub findings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, field: FieldSpec, inputs: Vec<String>) -> RunReport {
        RunReport {
            command: command.to_string(),
            field: field.to_string(),
            inputs,
            verdicts: Vec::new(),
            counters: Counters::default(),
            findings: Vec::new(),
            elapsed: None,
        }
    }

    pub fn push(&mut self, v: Verdict) {
        match v.status {
            Status::Passed => {
                self.counters.checked += 1;
                self.counters.passed += 1;
            }
            Status::Failed => {
                self.counters.checked += 1;
                self.counters.failed += 1;
                self.findings.push(format!("{}: {}", v.subject, v.outcome));
            }
            Status::Skipped => {}
        }
        self.verdicts.push(v);
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.counters.failed > 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} over {}", self.command, self.field);
        for v in &self.verdicts {
            let tag = match v.status {
                Status::Passed => "ok  ",
                Status::Failed => "FAIL",
                Status::Skipped => "skip",
            };
            let _ = writeln!(s, "{tag} {:<24} {}", v.subject, v.outcome);
        }
        let c = &self.counters;
        let _ = writeln!(s, "checked {}, passed {}, failed {}", c.checked, c.passed, c.failed);
        for f in &self.findings {
            let _ = writeln!(s, "finding: {f}");
        }
        if let Some(e) = self.elapsed {
            let _ = writeln!(s, "elapsed {e:.3}s");
        }
        s
    }
}

fn verdict(subject: impl Into<String>, status: Status, outcome: impl Into<String>, detail: Value) -> Verdict {
    Verdict { subject: subject.into(), status, outcome: outcome.into(), detail }
}

fn show(v: Option<&FieldValue>) -> String {
    v.map_or_else(|| "-".to_string(), ToString::to_string)
}

/// Parameter values to check for `entry`: admissible samples over Q, every
/// admissible residue over `F_p`.
fn entry_values(entry: &CatalogEntry, spec: FieldSpec, samples: &[BigRational]) -> Result<Vec<Option<FieldValue>>> {
    if spec.is_finite() {
        entry.admissible_params(spec)
    } else {
        Ok(entry.q_samples(samples))
    }
}

pub fn default_samples() -> Vec<BigRational> {
    Q_SAMPLES.iter().map(|&i| BigRational::from_integer(i.into())).collect()
}

/// Associativity and stated traces of every entry at every sample.
pub fn cmd_verify_catalog(catalog: &Catalog, spec: FieldSpec, samples: &[BigRational]) -> Result<RunReport> {
    let mut report = RunReport::new("verify-catalog", spec, vec![]);
    for entry in &catalog.entries {
        let values = entry_values(entry, spec, samples)?;
        if values.is_empty() {
            report.push(verdict(&entry.id, Status::Skipped, "no admissible parameter value", Value::Null));
            continue;
        }
        let mut failures = Vec::new();
        for v in &values {
            let a = match entry.instantiate(v.as_ref(), spec) {
                Ok(a) => a,
                Err(e) => {
                    failures.push(json!({"value": show(v.as_ref()), "reason": e.to_string()}));
                    continue;
                }
            };
            if !a.is_associative() {
                failures.push(json!({"value": show(v.as_ref()), "reason": "not associative"}));
            }
            if let Some(stated) = &entry.stated_traces {
                let eval = |xs: &[crate::catalog::ParamExpr]| -> Result<Vec<FieldValue>> {
                    xs.iter().map(|x| x.eval(v.as_ref(), spec)).collect()
                };
                let computed = a.trace_vectors();
                match (eval(&stated.tr1), eval(&stated.tr2)) {
                    (Ok(t1), Ok(t2)) if t1 == computed.tr1 && t2 == computed.tr2 => {}
                    (Ok(t1), Ok(t2)) => {
                        let stated = crate::msc::TraceProfile { tr1: t1, tr2: t2 };
                        failures.push(json!({
                            "value": show(v.as_ref()),
                            "reason": "stated traces differ",
                            "stated": stated.to_string(),
                            "computed": computed.to_string(),
                        }));
                    }
                    (Err(e), _) | (_, Err(e)) => {
                        failures.push(json!({"value": show(v.as_ref()), "reason": e.to_string()}))
                    }
                }
            }
        }
        let samples_json: Vec<String> = values.iter().map(|v| show(v.as_ref())).collect();
        if failures.is_empty() {
            let outcome = if entry.stated_traces.is_some() { "associative, traces match" } else { "associative" };
            report.push(verdict(&entry.id, Status::Passed, outcome, json!({"samples": samples_json})));
        } else {
            let outcome = failures
                .iter()
                .map(|f| format!("{} at {}", f["reason"].as_str().unwrap_or(""), f["value"].as_str().unwrap_or("")))
                .collect::<Vec<_>>()
                .join("; ");
            report.push(verdict(&entry.id, Status::Failed, outcome, json!({"samples": samples_json, "failures": failures})));
        }
    }
    Ok(report)
}

/// Every shipped claim at every admissible sample, in whichever orientation holds.
pub fn cmd_verify_claims(catalog: &Catalog, spec: FieldSpec) -> Result<RunReport> {
    let mut report = RunReport::new("verify-claims", spec, vec![]);
    for claim in &catalog.claims {
        let values: Vec<Option<FieldValue>> = if !spec.is_finite() {
            claim.q_samples()
        } else if claim.parameter.is_some() {
            spec.elements()?.into_iter().filter(|v| claim.holds_at(Some(v), spec)).map(Some).collect()
        } else {
            vec![None]
        };
        let mut held = Vec::new();
        let mut failures = Vec::new();
        for v in &values {
            match isocheck::verify_claim(claim, catalog, v.as_ref(), spec) {
                Ok(check) => match (&check.verdict, &check.residuals) {
                    (IsoVerdict::Isomorphic { orientation, .. }, _) => {
                        held.push(json!({"value": show(v.as_ref()), "orientation": orientation}))
                    }
                    (_, Some((fwd, rev))) => failures.push(json!({
                        "value": show(v.as_ref()),
                        "reason": "fails in both orientations",
                        "forward_residual": fwd.to_string(),
                        "reverse_residual": rev.to_string(),
                    })),
                    _ => failures.push(json!({"value": show(v.as_ref()), "reason": check.verdict.to_string()})),
                },
                Err(e) => failures.push(json!({"value": show(v.as_ref()), "reason": e.to_string()})),
            }
        }
        let subject = format!("{} ({} ~ {})", claim.id, claim.lhs.id, claim.rhs.id);
        if values.is_empty() {
            report.push(verdict(subject, Status::Skipped, "no admissible parameter value", Value::Null));
        } else if failures.is_empty() {
            let mut orients: Vec<&str> = held.iter().filter_map(|h| h["orientation"].as_str()).collect();
            orients.sort_unstable();
            orients.dedup();
            report.push(verdict(subject, Status::Passed, format!("holds ({})", orients.join(", ")), json!({"held": held})));
        } else {
            let outcome = failures
                .iter()
                .map(|f| format!("{} at {}", f["reason"].as_str().unwrap_or(""), f["value"].as_str().unwrap_or("")))
                .collect::<Vec<_>>()
                .join("; ");
            report.push(verdict(subject, Status::Failed, outcome, json!({"held": held, "failures": failures})));
        }
    }
    Ok(report)
}

fn read_msc(path: &Path, spec: FieldSpec) -> Result<StructureMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_msc(&text, spec)
}

fn verdict_detail(v: &IsoVerdict) -> Value {
    let mut d = json!({"outcome": v.outcome()});
    if let IsoVerdict::Isomorphic { witness, orientation } = v {
        d["witness"] = json!(witness.to_string());
        d["orientation"] = json!(orientation);
    }
    if let Some(s) = v.separating_invariant() {
        d["separating_invariant"] = json!(s);
    }
    d
}

/// Decide whether two MSC files describe isomorphic algebras.
pub fn cmd_iso(a_path: &Path, b_path: &Path, spec: FieldSpec) -> Result<RunReport> {
    let inputs = vec![a_path.display().to_string(), b_path.display().to_string()];
    let mut report = RunReport::new("iso", spec, inputs.clone());
    let a = read_msc(a_path, spec)?;
    let b = read_msc(b_path, spec)?;
    let v = if spec.is_finite() {
        isocheck::brute_force_iso(&a, &b)?
    } else {
        let (fa, fb) = (isocheck::fingerprint(&a), isocheck::fingerprint(&b));
        match fa.separating_invariant(&fb) {
            Some(s) => IsoVerdict::NotIsomorphic(isocheck::NonIsoReason::SeparatingInvariant(s)),
            None if a == b => IsoVerdict::Isomorphic {
                witness: crate::msc::BaseChange::identity(spec, a.dim()),
                orientation: isocheck::Orientation::Forward,
            },
            None => IsoVerdict::Unknown,
        }
    };
    let mut detail = verdict_detail(&v);
    detail["lhs"] = json!(inputs[0]);
    detail["rhs"] = json!(inputs[1]);
    detail["field"] = json!(spec.to_string());
    report.push(verdict(format!("{} vs {}", inputs[0], inputs[1]), Status::Passed, v.to_string(), detail));
    Ok(report)
}

/// Identify an MSC file with a catalog entry.
pub fn cmd_classify(catalog: &Catalog, path: &Path, spec: FieldSpec) -> Result<RunReport> {
    let mut report = RunReport::new("classify", spec, vec![path.display().to_string()]);
    let a = read_msc(path, spec)?;
    let subject = path.display().to_string();
    let classifier = Classifier::new(catalog, spec, a.dim())?;
    match classifier.classify(&a) {
        Ok(Classification::Unclassified) => report.push(verdict(
            subject,
            Status::Failed,
            "unclassified",
            json!({"msc": render_msc(&a), "fingerprint": isocheck::fingerprint(&a)}),
        )),
        Ok(c) => {
            let mut detail = json!({"class": c.label()});
            if let Classification::Match { witness, .. } = &c {
                detail["witness"] = json!(witness.to_string());
            }
            report.push(verdict(subject, Status::Passed, c.label(), detail));
        }
        Err(Error::NotAssociative) => {
            report.push(verdict(subject, Status::Failed, "not associative", Value::Null));
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

#[derive(Clone, Debug, Default)]
pub struct ExtendOptions {
    /// Catalog id, `trivial`, `all`, or a path to a 2D MSC file.
    pub subalgebra: String,
    /// Parameter value for a parametric base (all orbit representatives otherwise).
    pub param: Option<String>,
    pub max_report: usize,
    /// Also run the unpruned sweep and compare.
    pub sweep: bool,
}

fn resolve_bases(catalog: &Catalog, spec: FieldSpec, opts: &ExtendOptions) -> Result<Vec<(String, StructureMatrix)>> {
    let name = opts.subalgebra.as_str();
    if name == "all" {
        return extend::base_algebras(catalog, spec);
    }
    if name == "trivial" {
        return Ok(vec![("trivial".into(), StructureMatrix::zero(spec, 2))]);
    }
    if let Ok(entry) = catalog.entry(name) {
        if entry.dimension != 2 {
            return Err(Error::DimensionMismatch(format!("{name} is not two-dimensional")));
        }
        let values = match &opts.param {
            Some(p) => vec![Some(FieldValue::parse(p, spec)?)],
            None => entry.orbit_representatives(spec)?,
        };
        return values
            .into_iter()
            .map(|v| {
                let label = match &v {
                    Some(v) => format!("{name}[{v}]"),
                    None => name.to_string(),
                };
                Ok((label, entry.instantiate(v.as_ref(), spec)?))
            })
            .collect();
    }
    let path = Path::new(name);
    if path.exists() {
        return Ok(vec![(name.to_string(), read_msc(path, spec)?)]);
    }
    Err(Error::UnknownEntry(name.to_string()))
}

/// Re-run the extension method over `F_p` and sort the results into classes.
pub fn cmd_extend(catalog: &Catalog, spec: FieldSpec, opts: &ExtendOptions) -> Result<RunReport> {
    spec.require_finite()?;
    let mut report = RunReport::new("extend", spec, vec![opts.subalgebra.clone()]);
    for (label, base) in resolve_bases(catalog, spec, opts)? {
        if base.dim() != 2 {
            return Err(Error::DimensionMismatch(format!("{label} is not two-dimensional")));
        }
        if !base.is_associative() {
            report.push(verdict(label, Status::Failed, "base is not associative", Value::Null));
            continue;
        }
        let assignments = extend::enumerate_assignments(&base)?;
        let rejected = match extend::audit(&base, &assignments, 10_000, 0x5eed) {
            Ok(r) => r,
            Err(e) => {
                report.push(verdict(label, Status::Failed, e.to_string(), Value::Null));
                continue;
            }
        };
        let items: Vec<StructureMatrix> = assignments
            .iter()
            .map(|a| extend::embed_assignment(&base, a).map(|f| f.to_structure()))
            .collect::<Result<_>>()?;
        let mut by_class: BTreeMap<String, usize> = BTreeMap::new();
        for a in &items {
            *by_class.entry(a.trace_class().kind().to_string()).or_default() += 1;
        }
        let classes = extend::reduce_classes(&items, catalog)?;
        let unclassified: Vec<String> = classes
            .iter()
            .filter(|c| c.classification == Classification::Unclassified)
            .map(|c| render_msc(&c.representative))
            .collect();
        let mut detail = json!({
            "base": label,
            "outputs": items.len(),
            "rechecked": items.len(),
            "rejected_sampled": rejected,
            "by_trace_class": by_class,
            "classes": classes.iter().map(|c| json!({
                "class": c.classification.label(),
                "multiplicity": c.multiplicity,
                "representative": render_msc(&c.representative),
            })).collect::<Vec<_>>(),
            "unclassified": unclassified,
        });
        if items.len() <= opts.max_report {
            detail["list"] = json!(items.iter().map(render_msc).collect::<Vec<_>>());
        }
        let mut sweep_mismatch = false;
        if opts.sweep {
            let swept = extend::sweep_assignments(&base)?;
            sweep_mismatch = swept != assignments;
            detail["sweep"] = json!({"forced_zeros": extend::forced_zeros(&base)?.len(), "matches": !sweep_mismatch});
        }
        let outcome = format!("{} outputs, {} classes, {} unclassified", items.len(), classes.len(), unclassified.len());
        let status = if unclassified.is_empty() && !sweep_mismatch { Status::Passed } else { Status::Failed };
        report.push(verdict(label, status, outcome, detail));
    }
    Ok(report)
}

/// Trace vectors and trace class of an MSC file.
pub fn cmd_traces(path: &Path, spec: FieldSpec) -> Result<RunReport> {
    let mut report = RunReport::new("traces", spec, vec![path.display().to_string()]);
    let a = read_msc(path, spec)?;
    let t = a.trace_vectors();
    let class = t.class();
    let outcome = format!("{t}, class {class}");
    report.push(verdict(
        path.display().to_string(),
        Status::Passed,
        outcome,
        json!({"tr1": t.tr1.iter().map(ToString::to_string).collect::<Vec<_>>(),
               "tr2": t.tr2.iter().map(ToString::to_string).collect::<Vec<_>>(),
               "class": class.to_string()}),
    ));
    Ok(report)
}

/// Each listed addition against every entry of the older 3D list.
pub fn cmd_crosscheck(catalog: &Catalog, spec: FieldSpec) -> Result<RunReport> {
    spec.require_finite()?;
    let mut report = RunReport::new("crosscheck", spec, vec!["additions".into()]);
    let mut others = Vec::new();
    for e in catalog.entries.iter().filter(|e| e.source == Source::Kstt) {
        for v in e.admissible_params(spec)? {
            let label = match &v {
                Some(v) => format!("{}[{v}]", e.id),
                None => e.id.clone(),
            };
            others.push((label, e.instantiate(v.as_ref(), spec)?));
        }
    }
    for member in &catalog.view("additions")?.members {
        let entry = catalog.entry(&member.id)?;
        let values: Vec<Option<FieldValue>> = match &member.binding {
            Some(b) => vec![Some(b.value(spec)?)],
            None => entry
                .admissible_params(spec)?
                .into_iter()
                .filter(|v| member.constraints.iter().all(|c| c.holds(v.as_ref(), spec)))
                .collect(),
        };
        for v in values {
            let subject = match &v {
                Some(v) => format!("{}[{v}]", entry.id),
                None => entry.id.clone(),
            };
            let a = entry.instantiate(v.as_ref(), spec)?;
            let mut matches = Vec::new();
            for (label, b) in &others {
                let verdict = isocheck::brute_force_iso(b, &a)?;
                if let Some(w) = verdict.witness() {
                    matches.push(json!({"kstt": label, "witness": w.to_string()}));
                }
            }
            if matches.is_empty() {
                report.push(verdict(subject, Status::Passed, "new: isomorphic to no listed algebra", Value::Null));
            } else {
                let names: Vec<&str> = matches.iter().filter_map(|m| m["kstt"].as_str()).collect();
                let outcome = format!("already listed as {}", names.join(", "));
                report.push(verdict(subject, Status::Failed, outcome, json!({"matches": matches})));
            }
        }
    }
    Ok(report)
}

fn parse_field(s: &str) -> std::result::Result<FieldSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_samples(s: &str) -> std::result::Result<Vec<BigRational>, String> {
    s.split(',').map(|t| parse_rational(t.trim()).map_err(|e| e.to_string())).collect()
}

#[derive(Parser, Debug)]
#[command(name = "assoc3d", version, about = "Verify and search the classification of low-dimensional associative algebras")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base field: `Q` or a prime other than 2 and 3.
    #[arg(long, global = true, value_parser = parse_field)]
    field: Option<FieldSpec>,
    /// Parameter samples over Q, comma separated.
    #[arg(long, global = true, value_parser = parse_samples)]
    samples: Option<Vec<BigRational>>,
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Largest extension output listed in full.
    #[arg(long, global = true, default_value_t = 200)]
    max_report: usize,
    /// Worker threads for the searches.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Catalog file to use instead of the built-in one.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Include elapsed wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Associativity and stated traces of every catalog entry.
    VerifyCatalog,
    /// Every explicit isomorphism in the catalog.
    VerifyClaims,
    /// Decide isomorphism of two MSC files.
    Iso { a: PathBuf, b: PathBuf },
    /// Identify an MSC file with a catalog entry.
    Classify { file: PathBuf },
    /// Extensions of a 2D algebra (`trivial`, `all`, a catalog id, or an MSC file).
    Extend {
        subalgebra: String,
        /// Parameter value for a parametric base.
        #[arg(long)]
        param: Option<String>,
        /// Largest prime accepted.
        #[arg(long, default_value_t = 7)]
        max_p: u32,
        /// Compare with an unpruned sweep of the non-forced unknowns.
        #[arg(long)]
        sweep: bool,
    },
    /// Trace vectors and trace class of an MSC file.
    Traces { file: PathBuf },
    /// Listed additions against the older 3D list.
    Crosscheck,
}

fn run(cli: &Cli) -> Result<RunReport> {
    let owned;
    let catalog = match &cli.catalog {
        Some(p) => {
            owned = Catalog::load(p)?;
            &owned
        }
        None => Catalog::shipped(),
    };
    let searches = FieldSpec::prime(5).expect("5 is prime");
    let samples = cli.samples.clone().unwrap_or_else(default_samples);
    match &cli.command {
        Command::VerifyCatalog => cmd_verify_catalog(catalog, cli.field.unwrap_or(FieldSpec::RATIONALS), &samples),
        Command::VerifyClaims => cmd_verify_claims(catalog, cli.field.unwrap_or(FieldSpec::RATIONALS)),
        Command::Iso { a, b } => cmd_iso(a, b, cli.field.unwrap_or(searches)),
        Command::Classify { file } => cmd_classify(catalog, file, cli.field.unwrap_or(searches)),
        Command::Extend { subalgebra, param, max_p, sweep } => {
            let spec = cli.field.unwrap_or(searches);
            if spec.modulus().is_some_and(|p| p > *max_p) {
                return Err(Error::UnsupportedField(format!("p = {spec} exceeds --max-p {max_p}")));
            }
            let opts = ExtendOptions {
                subalgebra: subalgebra.clone(),
                param: param.clone(),
                max_report: cli.max_report,
                sweep: *sweep,
            };
            cmd_extend(catalog, spec, &opts)
        }
        Command::Traces { file } => cmd_traces(file, cli.field.unwrap_or(FieldSpec::RATIONALS)),
        Command::Crosscheck => cmd_crosscheck(catalog, cli.field.unwrap_or(searches)),
    }
}

/// Parse `args`, run the command, print the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.jobs {
        // fails only if a pool already exists, in which case it is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let start = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            if cli.timing {
                report.elapsed = Some(start.elapsed().as_secs_f64());
            }
            if cli.json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.to_table());
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
