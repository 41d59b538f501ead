//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every line is printed; exits 1 if any criterion fails.

mod common;

use std::time::Instant;

use assoc3d::catalog::{CatalogEntry, OrbitRelation, Source};
use assoc3d::extend::{audit, base_algebras, embed_assignment, enumerate_assignments, reduce_classes};
use assoc3d::isocheck::{brute_force_iso, canonical_instances, fingerprint, verify_claim, Classification, IsoVerdict};
use assoc3d::msc::{kron, render_msc};
use assoc3d::{BaseChange, FieldSpec, FieldValue, StructureMatrix};
use common::gen::*;
use common::*;
use proptest::test_runner::{Config as ProptestConfig, TestCaseError, TestRunner};

struct Outcome {
    passed: bool,
    summary: String,
    findings: Vec<String>,
}

impl Outcome {
    fn new(findings: Vec<String>, summary: String) -> Outcome {
        Outcome { passed: findings.is_empty(), summary, findings }
    }
}

fn show(v: &Option<FieldValue>) -> String {
    v.as_ref().map_or("-".into(), ToString::to_string)
}

fn samples_q(e: &CatalogEntry) -> Vec<Option<FieldValue>> {
    e.q_samples(&assoc3d::cli::default_samples())
}

fn finite_values(e: &CatalogEntry, spec: FieldSpec) -> Vec<Option<FieldValue>> {
    e.admissible_params(spec).unwrap()
}

fn catalog_soundness() -> Outcome {
    let mut findings = Vec::new();
    let mut checked = 0;
    for e in &catalog().entries {
        let mut runs: Vec<(FieldSpec, Option<FieldValue>)> = samples_q(e).into_iter().map(|v| (q(), v)).collect();
        for spec in [f5(), f7()] {
            runs.extend(finite_values(e, spec).into_iter().map(|v| (spec, v)));
        }
        for (spec, v) in runs {
            let a = e.instantiate(v.as_ref(), spec).unwrap();
            checked += 1;
            if !associative_oracle(&a) || !a.is_associative() {
                findings.push(format!("{} at {} over {spec} is not associative", e.id, show(&v)));
            }
        }
    }
    let alpha: Vec<Option<FieldValue>> = samples_q(catalog().entry("As_2^5").unwrap());
    for want in ["0", "1", "-1", "2"] {
        if !alpha.iter().flatten().any(|v| v.to_string() == want) {
            findings.push(format!("As_2^5 sample {want} missing"));
        }
    }
    Outcome::new(findings, format!("{} entries, {checked} instantiations over Q, F5, F7", catalog().entries.len()))
}

fn trace_fidelity() -> Outcome {
    let mut findings = Vec::new();
    let mut pairs = 0;
    for e in catalog().entries.iter().filter(|e| e.stated_traces.is_some()) {
        let stated = e.stated_traces.as_ref().unwrap();
        let mut samples = samples_q(e);
        // top up families whose constraint rejects most small integers
        for extra in ["4", "5", "-3", "1/2", "-1/2", "3/2"] {
            if !e.is_parametric() || samples.len() >= 4 {
                break;
            }
            let v = rat(q(), extra);
            if e.admits(Some(&v), q()) {
                samples.push(Some(v));
            }
        }
        if e.is_parametric() && samples.len() < 4 {
            findings.push(format!("{}: only {} admissible samples", e.id, samples.len()));
        }
        pairs += 1;
        for v in samples {
            let a = e.instantiate(v.as_ref(), q()).unwrap();
            let (t1, t2) = traces_oracle(&a);
            let computed = a.trace_vectors();
            assert_eq!((&computed.tr1, &computed.tr2), (&t1, &t2), "library traces disagree with the oracle");
            let s1: Vec<FieldValue> = stated.tr1.iter().map(|x| x.eval(v.as_ref(), q()).unwrap()).collect();
            let s2: Vec<FieldValue> = stated.tr2.iter().map(|x| x.eval(v.as_ref(), q()).unwrap()).collect();
            if s1 != t1 || s2 != t2 {
                findings.push(format!(
                    "{} at {}: stated {} {}, computed {computed}",
                    e.id,
                    show(&v),
                    covector(&s1),
                    covector(&s2)
                ));
            }
        }
    }
    let a27 = catalog().entry("As_2^7(3)").unwrap().instantiate(None, q()).unwrap();
    if traces_oracle(&a27).0 != vals(q(), &[1, 0, 2]) {
        findings.push("As_2^7(3) Tr1 is not (1,0,2)".into());
    }
    Outcome::new(findings, format!("{pairs} stated trace pairs"))
}

fn covector(v: &[FieldValue]) -> String {
    format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

/// Check a claim at `values` over Q: the library verdict, then the oracle on the printed g.
fn check_claims(ids: &[(&str, &[&str])]) -> (usize, Vec<String>) {
    let mut findings = Vec::new();
    let mut checked = 0;
    for (id, values) in ids {
        let claim = catalog().claim(id).unwrap();
        let values: Vec<Option<FieldValue>> = if values.is_empty() {
            claim.q_samples()
        } else {
            values.iter().map(|t| Some(rat(q(), t))).collect()
        };
        for v in values {
            checked += 1;
            let label = format!("{id} ({} ~ {}) at {}", claim.lhs.id, claim.rhs.id, show(&v));
            match claim.instantiate(catalog(), v.as_ref(), q()) {
                Err(e) => findings.push(format!("{label}: {e}")),
                Ok(inst) => {
                    let g = inst.g.matrix();
                    let oracle = carries_oracle(g, &inst.lhs, &inst.rhs) || carries_oracle(g, &inst.rhs, &inst.lhs);
                    let lib = verify_claim(claim, catalog(), v.as_ref(), q()).unwrap().verdict.is_isomorphic();
                    assert_eq!(oracle, lib, "{label}: library and oracle disagree");
                    if !oracle {
                        findings.push(format!("{label}: printed g fails in both orientations"));
                    }
                }
            }
        }
    }
    (checked, findings)
}

fn red_corrections() -> Outcome {
    let (n, findings) = check_claims(&[
        ("red-1", &[]),
        ("red-3", &["0", "1", "2", "-2"]),
        ("red-21", &["0", "-1", "2"]),
        ("red-30", &[]),
        ("red-33", &["1", "2", "-1"]),
    ]);
    Outcome::new(findings, format!("{n} claim instances over Q"))
}

fn correspondence_table() -> Outcome {
    let ids: Vec<String> = (1..=24).map(|i| format!("table-{i}")).collect();
    let k = ["1", "2", "3", "1/2"];
    let spec: Vec<(&str, &[&str])> = ids
        .iter()
        .map(|id| {
            let parametric = catalog().claim(id).unwrap().parameter.is_some();
            (id.as_str(), if parametric { &k[..] } else { &[][..] })
        })
        .collect();
    let (n, findings) = check_claims(&spec);
    Outcome::new(findings, format!("24 rows, {n} instances over Q"))
}

fn orbit_relations() -> Outcome {
    let families = [
        ("As_{1,1}^1(3)", OrbitRelation::SquareScaling),
        ("As_{1,1}^{14}(3)", OrbitRelation::Negation),
        ("As_0^3(3)", OrbitRelation::CubeScaling),
        ("As_0^4(3)", OrbitRelation::SquareScaling),
        ("As_0^5(3)", OrbitRelation::Negation),
        ("As_{1,1}^{17}(3)", OrbitRelation::CubeScaling),
        ("As_2^5", OrbitRelation::SquareScaling),
    ];
    let mut findings = Vec::new();
    let mut pairs = 0;
    for (id, rel) in families {
        let e = catalog().entry(id).unwrap();
        assert_eq!(e.orbit, Some(rel), "{id}");
        for spec in [f5(), f7()] {
            let values: Vec<FieldValue> = finite_values(e, spec).into_iter().flatten().collect();
            for t in &values {
                for a in spec.elements().unwrap().iter().filter(|a| !a.is_zero()) {
                    let u = rel.apply(t, a);
                    if u.as_residue() <= t.as_residue() || !e.admits(Some(&u), spec) {
                        continue;
                    }
                    let (x, y) = (e.instantiate(Some(t), spec).unwrap(), e.instantiate(Some(&u), spec).unwrap());
                    pairs += 1;
                    match brute_force_iso(&x, &y).unwrap() {
                        IsoVerdict::Isomorphic { witness, .. } => assert!(carries_oracle(witness.matrix(), &x, &y)),
                        v => {
                            let f = format!("{id} over {spec}: {t} vs {u}: {v}");
                            if !findings.contains(&f) {
                                findings.push(f);
                            }
                        }
                    }
                }
            }
        }
    }
    Outcome::new(findings, format!("{pairs} related pairs over F5 and F7"))
}

fn irredundancy() -> Outcome {
    let mut findings = Vec::new();
    let mut summary = Vec::new();
    for spec in [f5(), f7()] {
        for source in [Source::Paper2d, Source::Paper3d] {
            let inst: Vec<_> = canonical_instances(catalog(), spec, source, true)
                .unwrap()
                .into_iter()
                .filter(|i| !i.redundant)
                .collect();
            let mut iso = 0;
            for i in 0..inst.len() {
                for j in i + 1..inst.len() {
                    if let Some(w) = brute_force_iso(&inst[i].algebra, &inst[j].algebra).unwrap().witness() {
                        assert!(carries_oracle(w.matrix(), &inst[i].algebra, &inst[j].algebra));
                        iso += 1;
                        findings.push(format!("over {spec}: {} ~ {} via g = {w}", inst[i].label(), inst[j].label()));
                    }
                }
            }
            summary.push(format!("{}D over {spec}: {} instances, {iso} isomorphic pairs", inst[0].algebra.dim(), inst.len()));
        }
    }
    Outcome::new(findings, summary.join("; "))
}

fn completeness() -> Outcome {
    let mut findings = Vec::new();
    let mut summary = Vec::new();
    for (label, base) in base_algebras(catalog(), f5()).unwrap() {
        let found = enumerate_assignments(&base).unwrap();
        audit(&base, &found, 20_000, 11).unwrap();
        let items: Vec<StructureMatrix> =
            found.iter().map(|a| embed_assignment(&base, a).unwrap().to_structure()).collect();
        let unsound = items.iter().filter(|a| !associative_oracle(a)).count();
        if unsound > 0 {
            findings.push(format!("{label}: {unsound} outputs fail the associativity oracle"));
        }
        let classes = reduce_classes(&items, catalog()).unwrap();
        let decided: usize = classes.iter().map(|c| c.multiplicity).sum();
        assert_eq!(decided, items.len());
        for c in classes.iter().filter(|c| c.classification == Classification::Unclassified) {
            findings.push(format!("{label}: unclassified\n{}", render_msc(&c.representative)));
        }
        for c in &classes {
            if let Classification::Match { id, value, witness } = &c.classification {
                let e = catalog().entry(id).unwrap().instantiate(value.as_ref(), f5()).unwrap();
                assert!(carries_oracle(witness.matrix(), &e, &c.representative), "{label}: bad witness for {id}");
            }
        }
        summary.push(format!("{label} {}/{}", items.len(), classes.len()));
    }
    println!("  unclassified findings: {}", findings.len());
    Outcome::new(findings, format!("outputs/classes over F5: {}", summary.join(", ")))
}

fn additions() -> Outcome {
    let spec = f5();
    let kstt: Vec<(String, StructureMatrix)> = catalog()
        .entries
        .iter()
        .filter(|e| e.source == Source::Kstt)
        .flat_map(|e| {
            finite_values(e, spec).into_iter().map(move |v| {
                let label = v.as_ref().map_or(e.id.clone(), |v| format!("{}[{v}]", e.id));
                (label, e.instantiate(v.as_ref(), spec).unwrap())
            })
        })
        .collect();
    let mut findings = Vec::new();
    let mut checked = 0;
    for m in &catalog().view("additions").unwrap().members {
        let e = catalog().entry(&m.id).unwrap();
        let values: Vec<Option<FieldValue>> = match &m.binding {
            Some(b) => vec![Some(b.value(spec).unwrap())],
            None => finite_values(e, spec)
                .into_iter()
                .filter(|v| m.constraints.iter().all(|c| c.holds(v.as_ref(), spec)))
                .collect(),
        };
        for v in values {
            let a = e.instantiate(v.as_ref(), spec).unwrap();
            checked += 1;
            let hits: Vec<String> = kstt
                .iter()
                .filter_map(|(label, b)| {
                    let w = brute_force_iso(b, &a).unwrap().witness().cloned()?;
                    assert!(carries_oracle(w.matrix(), b, &a));
                    Some(format!("{label} via g = {w}"))
                })
                .collect();
            if !hits.is_empty() {
                findings.push(format!("{}[{}] ~ {}", m.id, show(&v), hits.join(", ")));
            }
        }
    }
    Outcome::new(findings, format!("{checked} addition instances against {} KSTT instances over F5", kstt.len()))
}

fn property_suites() -> Outcome {
    let mut findings = Vec::new();
    let runner = || TestRunner::new(ProptestConfig { failure_persistence: None, ..config() });
    let check = |ok: bool, what: &str| if ok { Ok(()) } else { Err(TestCaseError::fail(what.to_string())) };
    let results: [(&str, Result<(), String>); 5] = [
        (
            "action composition",
            runner().run(&(msc(3), invertible(3), invertible(3)), |(a, g, h)| {
                let gh = BaseChange::new(g.matrix().mul(h.matrix()).unwrap()).unwrap();
                check(a.act(&g).unwrap().act(&h).unwrap() == a.act(&gh).unwrap(), "act(h, act(g, A)) != act(gh, A)")
            }).map_err(|e| e.to_string()),
        ),
        (
            "trace equivariance",
            runner().run(&(msc(3), invertible(3)), |(a, g)| {
                let b = a.act(&g).unwrap();
                let (t1, t2) = traces_oracle(&a);
                let (u1, u2) = traces_oracle(&b);
                let times = |v: &[FieldValue]| -> Vec<FieldValue> {
                    (0..3).map(|c| (0..3).fold(FieldValue::zero(f5()), |s, r| s + &v[r] * g.matrix().get(r, c))).collect()
                };
                check(u1 == times(&t1) && u2 == times(&t2), "Tr(act(g, A)) != Tr(A) g")
            }).map_err(|e| e.to_string()),
        ),
        (
            "Kronecker mixed product",
            runner().run(&(matrix(2, 3), matrix(3, 2), matrix(3, 2), matrix(2, 2)), |(a, b, c, d)| {
                let lhs = kron(&a, &b).unwrap().mul(&kron(&c, &d).unwrap()).unwrap();
                check(lhs == kron(&a.mul(&c).unwrap(), &b.mul(&d).unwrap()).unwrap(), "mixed product")
            }).map_err(|e| e.to_string()),
        ),
        (
            "fingerprint invariance",
            runner().run(&(associative(), invertible(3)), |(a, g)| {
                check(fingerprint(&a.act(&g).unwrap()) == fingerprint(&a), "fingerprint moved")
            }).map_err(|e| e.to_string()),
        ),
        (
            "is_associative vs basis-triple oracle",
            runner()
                .run(&msc(3), |a| check(a.is_associative() == associative_oracle(&a), "associativity verdicts differ"))
                .map_err(|e| e.to_string()),
        ),
    ];
    for (name, r) in &results {
        if let Err(e) = r {
            findings.push(format!("{name}: {e}"));
        }
    }
    Outcome::new(findings, format!("{} suites x 1000 cases over F5", results.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("catalog soundness", catalog_soundness),
        ("trace fidelity", trace_fidelity),
        ("red-correction claims", red_corrections),
        ("correspondence table", correspondence_table),
        ("orbit relations", orbit_relations),
        ("irredundancy", irredundancy),
        ("completeness spot-check", completeness),
        ("additions vs KSTT", additions),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let tag = if out.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} ({name}): {} [{secs:.2}s]", i + 1, out.summary);
        for f in &out.findings {
            println!("    {}", f.replace('\n', "\n    "));
        }
        failed += usize::from(!out.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
