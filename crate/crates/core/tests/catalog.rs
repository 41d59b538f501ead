mod common;

use assoc3d::catalog::{Catalog, EntryFilter, Source};
use assoc3d::msc::TraceClassKind;
use assoc3d::{Error, FieldValue};
use common::*;

fn ids(entries: &[&assoc3d::catalog::CatalogEntry]) -> Vec<String> {
    entries.iter().map(|e| e.id.clone()).collect()
}

#[test]
fn shipped_catalog_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.json");
    catalog().save(&path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), Catalog::shipped_json());
    let loaded = Catalog::load(&path).unwrap();
    assert_eq!(&loaded, catalog());
    let again = dir.path().join("again.json");
    loaded.save(&again).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn schema_version_is_checked() {
    let text = Catalog::shipped_json().replacen("\"schema_version\": 1", "\"schema_version\": 99", 1);
    assert!(matches!(Catalog::from_json(&text), Err(Error::SchemaVersionMismatch { found: 99, expected: 1 })));
}

#[test]
fn shipped_counts() {
    let count = |s| catalog().entries.iter().filter(|e| e.source == s).count();
    assert_eq!(count(Source::Paper2d), 5);
    assert_eq!(count(Source::Paper3d), 36);
    assert_eq!(count(Source::Kstt), 24);
}

#[test]
fn unital_kstt_entries() {
    let filter = EntryFilter { source: Some(Source::Kstt), unital: Some(true), ..Default::default() };
    assert_eq!(ids(&catalog().list_entries(&filter)), ["U_0^3", "U_1^3", "U_2^3", "U_3^3", "U_4^3"]);
}

#[test]
fn zero_trace_section_is_the_last_five_items() {
    let filter = EntryFilter { source: Some(Source::Paper3d), trace_class: Some(TraceClassKind::M0), ..Default::default() };
    let items: Vec<u32> = catalog().list_entries(&filter).iter().map(|e| e.item).collect();
    assert_eq!(items, [32, 33, 34, 35, 36]);
}

#[test]
fn empty_filter_lists_everything() {
    assert_eq!(catalog().list_entries(&EntryFilter::default()).len(), catalog().entries.len());
}

#[test]
fn cube_root_family_has_no_values_over_f5() {
    let e = catalog().entry("As_{1,1}^{17}(3)").unwrap();
    assert!(e.admissible_params(f5()).unwrap().is_empty());
    // 2 is not a cube mod 7 (cubes are 0, 1, 6)
    let f7_values: Vec<u32> = e.admissible_params(f7()).unwrap().into_iter().flatten().map(|v| v.as_residue().unwrap()).collect();
    assert_eq!(f7_values, [2, 3, 4, 5]);
    let one = FieldValue::one(f5());
    assert!(matches!(e.instantiate(Some(&one), f5()), Err(Error::ConstraintViolated(_))));
}

#[test]
fn sqrt_minus_one_family() {
    let e = catalog().entry("As_0^5(3)").unwrap();
    assert!(e.admissible_params(f7()).unwrap().is_empty());
    assert_eq!(e.admissible_params(f5()).unwrap().len(), 5);
    // t ~ -t pairs 1 with 4 and 2 with 3
    let reps: Vec<u32> = e.orbit_representatives(f5()).unwrap().into_iter().flatten().map(|v| v.as_residue().unwrap()).collect();
    assert_eq!(reps, [0, 1, 2]);
}

#[test]
fn instantiation_matches_stated_traces() {
    let e = catalog().entry("As_2^2(3)").unwrap();
    let a = e.instantiate(Some(&FieldValue::zero(q())), q()).unwrap();
    let (t1, t2) = traces_oracle(&a);
    assert_eq!(t1, vals(q(), &[3, 0, 1]));
    assert_eq!(t2, vals(q(), &[3, 0, 2]));

    let fixed = catalog().entry("As_2^1(3)").unwrap();
    assert!(matches!(fixed.instantiate(Some(&FieldValue::one(q())), q()), Err(Error::UnboundParameter(_))));
    assert!(matches!(e.instantiate(None, q()), Err(Error::UnboundParameter(_))));
}

#[test]
fn stated_traces_agree_with_oracle_over_q() {
    // the one stated pair that disagrees with its own matrix
    let known_bad = ["As_{1,1/3}(3)"];
    for e in catalog().entries.iter().filter(|e| e.stated_traces.is_some()) {
        if known_bad.contains(&e.id.as_str()) {
            continue;
        }
        let stated = e.stated_traces.as_ref().unwrap();
        for v in e.q_samples(&assoc3d::cli::default_samples()) {
            let a = e.instantiate(v.as_ref(), q()).unwrap();
            let (t1, t2) = traces_oracle(&a);
            let eval = |xs: &[assoc3d::catalog::ParamExpr]| -> Vec<FieldValue> {
                xs.iter().map(|x| x.eval(v.as_ref(), q()).unwrap()).collect()
            };
            assert_eq!(eval(&stated.tr1), t1, "{} at {:?}", e.id, v);
            assert_eq!(eval(&stated.tr2), t2, "{} at {:?}", e.id, v);
        }
    }
}

#[test]
fn red_corrections_name_the_redundant_side() {
    let red: Vec<&str> = catalog().redundant_ids().into_iter().collect();
    assert_eq!(red, ["As_0^2(3)", "As_2^1(3)", "As_2^3(3)", "As_{1,1}^7(3)", "As_{1,1}^{16}(3)"]);
}
