//! Three-dimensional algebras containing a fixed two-dimensional subalgebra
//! `span(e₁, e₂)`, found by exhausting the unknown structure constants over `F_p`.
//!
//! Template (rows are coefficients of `e₁, e₂, e₃`; columns `e₁e₁ … e₃e₃`):
//!
//! ```text
//! α₁ α₂ x₃ α₃ α₄ x₆ x₇ x₈ x₉
//! β₁ β₂ y₃ β₃ β₄ y₆ y₇ y₈ y₉
//! 0  0  z₃ 0  0  z₆ z₇ z₈ z₉
//! ```

use std::collections::HashMap;
use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldValue};
use crate::isocheck::{fingerprint, Classification, Classifier, Fingerprint};
use crate::kernel::{self, FpAlg, Key};
use crate::msc::{Matrix, StructureMatrix};

/// Number of unknowns in the template.
pub const UNKNOWNS: usize = 15;

/// Template columns (0-based) holding unknowns, in the order `3, 6, 7, 8, 9`.
const FREE_COLUMNS: [usize; 5] = [2, 5, 6, 7, 8];

/// Assignment slots are ordered `x₃ x₆ x₇ x₈ x₉ y₃ … y₉ z₃ … z₉`.
pub fn slot_name(slot: usize) -> String {
    format!("{}{}", ["x", "y", "z"][slot / 5], FREE_COLUMNS[slot % 5] + 1)
}

/// `(row, column)` of an assignment slot in the 3×9 matrix.
fn slot_position(slot: usize) -> (usize, usize) {
    (slot / 5, FREE_COLUMNS[slot % 5])
}

/// Search order: `z` first, then `y`, then `x`.
const SEARCH_ORDER: [usize; UNKNOWNS] = [10, 11, 12, 13, 14, 5, 6, 7, 8, 9, 0, 1, 2, 3, 4];

fn check_base(base: &StructureMatrix) -> Result<()> {
    if base.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("base algebra must be 2D, got {}D", base.dim())));
    }
    Ok(())
}

/// Fill the template with `base` and `assignment`.
pub fn embed(base: &StructureMatrix, assignment: &[FieldValue]) -> Result<StructureMatrix> {
    check_base(base)?;
    if assignment.len() != UNKNOWNS {
        return Err(Error::DimensionMismatch(format!("{} values for {UNKNOWNS} unknowns", assignment.len())));
    }
    let spec = base.spec();
    let mut m = Matrix::zeros(spec, 3, 9);
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                m.set(k, i * 3 + j, base.constant(i, j, k).clone());
            }
        }
    }
    for (slot, v) in assignment.iter().enumerate() {
        if v.spec() != spec {
            return Err(Error::MixedFields(spec, v.spec()));
        }
        let (r, c) = slot_position(slot);
        m.set(r, c, v.clone());
    }
    StructureMatrix::new(m)
}

fn embed_fast(base: &FpAlg, a: &[u8; UNKNOWNS]) -> FpAlg {
    let mut out = FpAlg::zero(3, base.p());
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                out.set(i, j, k, base.get(i, j, k));
            }
        }
    }
    for (slot, &v) in a.iter().enumerate() {
        let (r, c) = slot_position(slot);
        out.set(c / 3, c % 3, r, v as u32);
    }
    out
}

/// One structure constant of the template: known or unknown.
#[derive(Clone, Copy)]
enum Atom {
    Const(u32),
    Var(usize),
}

/// `Σ coef · v[a] · v[b]`, where index `UNKNOWNS` stands for the constant 1.
#[derive(Clone, Debug)]
struct Equation {
    terms: Vec<(u32, usize, usize)>,
}

impl Equation {
    fn eval(&self, vals: &[u32; UNKNOWNS + 1], p: u32) -> u32 {
        let mut acc = 0u64;
        for &(c, a, b) in &self.terms {
            acc += c as u64 * (vals[a] * vals[b] % p) as u64;
        }
        (acc % p as u64) as u32
    }
}

/// The associativity identity on the template as quadratic equations in the unknowns.
fn compile(base: &FpAlg) -> Vec<Equation> {
    let p = base.p();
    let atom = |i: usize, j: usize, k: usize| -> Atom {
        let col = i * 3 + j;
        match FREE_COLUMNS.iter().position(|&c| c == col) {
            Some(pos) => Atom::Var(k * 5 + pos),
            None if k < 2 && i < 2 && j < 2 => Atom::Const(base.get(i, j, k)),
            None => Atom::Const(0),
        }
    };
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for r in 0..3 {
                    // (e_i e_j) e_k − e_i (e_j e_k), coefficient of e_r
                    let mut acc: HashMap<(usize, usize), u32> = HashMap::new();
                    let mut add = |x: Atom, y: Atom, sign: u32| {
                        let (mut c, mut vs) = (sign, vec![]);
                        for t in [x, y] {
                            match t {
                                Atom::Const(v) => c = c * v % p,
                                Atom::Var(v) => vs.push(v),
                            }
                        }
                        if c == 0 {
                            return;
                        }
                        vs.sort();
                        let key = match vs.as_slice() {
                            [] => (UNKNOWNS, UNKNOWNS),
                            [a] => (*a, UNKNOWNS),
                            [a, b] => (*a, *b),
                            _ => unreachable!(),
                        };
                        let e = acc.entry(key).or_insert(0);
                        *e = (*e + c) % p;
                    };
                    for s in 0..3 {
                        add(atom(i, j, s), atom(s, k, r), 1);
                        add(atom(j, k, s), atom(i, s, r), p - 1);
                    }
                    let mut terms: Vec<(u32, usize, usize)> =
                        acc.into_iter().filter(|&(_, c)| c != 0).map(|((a, b), c)| (c, a, b)).collect();
                    terms.sort_by_key(|&(_, a, b)| (a, b));
                    if !terms.is_empty() {
                        out.push(Equation { terms });
                    }
                }
            }
        }
    }
    out
}

struct Enumerator {
    p: u32,
    /// Equations to test once `SEARCH_ORDER[depth]` is assigned.
    by_depth: Vec<Vec<Equation>>,
}

impl Enumerator {
    fn new(base: &FpAlg) -> Enumerator {
        let mut by_depth = vec![Vec::new(); UNKNOWNS];
        let depth_of = |slot: usize| SEARCH_ORDER.iter().position(|&s| s == slot).expect("slot in order");
        for eq in compile(base) {
            let last = eq
                .terms
                .iter()
                .flat_map(|&(_, a, b)| [a, b])
                .filter(|&v| v < UNKNOWNS)
                .map(depth_of)
                .max();
            match last {
                Some(d) => by_depth[d].push(eq),
                // a constant equation: the base itself is not associative
                None => by_depth[0].push(eq),
            }
        }
        Enumerator { p: base.p(), by_depth }
    }

    fn run(&self, vals: &mut [u32; UNKNOWNS + 1], depth: usize, out: &mut Vec<[u8; UNKNOWNS]>) {
        if depth == UNKNOWNS {
            let mut a = [0u8; UNKNOWNS];
            for (slot, v) in a.iter_mut().enumerate() {
                *v = vals[slot] as u8;
            }
            out.push(a);
            return;
        }
        let slot = SEARCH_ORDER[depth];
        for v in 0..self.p {
            vals[slot] = v;
            if self.by_depth[depth].iter().all(|e| e.eval(vals, self.p) == 0) {
                self.run(vals, depth + 1, out);
            }
        }
        vals[slot] = 0;
    }
}

/// Every assignment of the unknowns that makes the filled template
/// associative, sorted lexicographically in slot order.
pub fn enumerate_assignments(base: &StructureMatrix) -> Result<Vec<[u8; UNKNOWNS]>> {
    check_base(base)?;
    base.spec().require_finite()?;
    let fast = FpAlg::from_structure(base)?;
    let en = Enumerator::new(&fast);
    let mut out: Vec<[u8; UNKNOWNS]> = (0..fast.p())
        .into_par_iter()
        .map(|first| {
            let mut vals = [0u32; UNKNOWNS + 1];
            vals[UNKNOWNS] = 1;
            vals[SEARCH_ORDER[0]] = first;
            let mut out = Vec::new();
            if en.by_depth[0].iter().all(|e| e.eval(&vals, en.p) == 0) {
                en.run(&mut vals, 1, &mut out);
            }
            out
        })
        .flatten()
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// The embedded algebras for [`enumerate_assignments`].
pub fn enumerate_extensions(base: &StructureMatrix) -> Result<Vec<StructureMatrix>> {
    let fast = FpAlg::from_structure(base)?;
    Ok(enumerate_assignments(base)?.iter().map(|a| embed_fast(&fast, a).to_structure()).collect())
}

pub fn embed_assignment(base: &StructureMatrix, a: &[u8; UNKNOWNS]) -> Result<FpAlg> {
    check_base(base)?;
    Ok(embed_fast(&FpAlg::from_structure(base)?, a))
}

/// Unknowns the equations force to zero by themselves (`c·v = 0` or
/// `c·v² = 0`), propagated to a fixed point.
pub fn forced_zeros(base: &StructureMatrix) -> Result<Vec<usize>> {
    check_base(base)?;
    let fast = FpAlg::from_structure(base)?;
    let eqs = compile(&fast);
    let mut zero = [false; UNKNOWNS];
    loop {
        let mut changed = false;
        for eq in &eqs {
            let live: Vec<&(u32, usize, usize)> = eq
                .terms
                .iter()
                .filter(|&&(_, a, b)| !(a < UNKNOWNS && zero[a]) && !(b < UNKNOWNS && zero[b]))
                .collect();
            if let [&(_, a, b)] = live.as_slice() {
                if a < UNKNOWNS && (b == UNKNOWNS || b == a) && !zero[a] {
                    zero[a] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok((0..UNKNOWNS).filter(|&s| zero[s]).collect())
}

/// Every assignment with the forced zeros in place and the remaining
/// unknowns free, tested with the plain associativity check. Independent of
/// the compiled equations and the search order.
pub fn sweep_assignments(base: &StructureMatrix) -> Result<Vec<[u8; UNKNOWNS]>> {
    let fast = FpAlg::from_structure(base)?;
    let zeros = forced_zeros(base)?;
    let free: Vec<usize> = (0..UNKNOWNS).filter(|s| !zeros.contains(s)).collect();
    let p = fast.p() as u64;
    let total = p.pow(free.len() as u32);
    let mut out: Vec<[u8; UNKNOWNS]> = (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut a = [0u8; UNKNOWNS];
            for &s in free.iter().rev() {
                a[s] = (idx % p) as u8;
                idx /= p;
            }
            embed_fast(&fast, &a).is_associative().then_some(a)
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Recheck outputs with the plain associativity test, and confirm that
/// `samples` random assignments outside the output set are not associative.
/// Returns the number of rejected assignments examined.
pub fn audit(base: &StructureMatrix, outputs: &[[u8; UNKNOWNS]], samples: usize, seed: u64) -> Result<usize> {
    let fast = FpAlg::from_structure(base)?;
    if let Some(a) = outputs.iter().find(|a| !embed_fast(&fast, a).is_associative()) {
        return Err(Error::ConstraintViolated(format!("enumerated assignment {a:?} fails the recheck")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0;
    for _ in 0..samples {
        let mut a = [0u8; UNKNOWNS];
        for v in a.iter_mut() {
            *v = rng.gen_range(0..fast.p()) as u8;
        }
        if outputs.binary_search(&a).is_err() {
            rejected += 1;
            if embed_fast(&fast, &a).is_associative() {
                return Err(Error::ConstraintViolated(format!("associative assignment {a:?} was missed")));
            }
        }
    }
    Ok(rejected)
}

/// One isomorphism class among a list of algebras.
#[derive(Clone, Debug)]
pub struct ExtensionClass {
    /// First member in input order.
    pub representative: StructureMatrix,
    pub classification: Classification,
    pub multiplicity: usize,
    /// Input positions of the members.
    pub members: Vec<usize>,
}

/// Group `items` into isomorphism classes (by sweeping `GL₃(F_p)` over a
/// representative of each class) and match each class with the catalog.
pub fn reduce_classes(items: &[StructureMatrix], catalog: &Catalog) -> Result<Vec<ExtensionClass>> {
    let Some(first) = items.first() else { return Ok(vec![]) };
    let spec = first.spec();
    let p = spec.require_finite()?;
    let dim = first.dim();
    if let Some(bad) = items.iter().find(|a| a.spec() != spec || a.dim() != dim) {
        return Err(Error::MixedFields(spec, bad.spec()));
    }
    let fast: Vec<FpAlg> = items.iter().map(FpAlg::from_structure).collect::<Result<_>>()?;
    let prints: Vec<Fingerprint> = items.par_iter().map(fingerprint).collect();
    // positions of each distinct algebra, grouped by fingerprint
    let mut groups: HashMap<&Fingerprint, HashMap<Key, Vec<usize>>> = HashMap::new();
    for (i, (a, fp)) in fast.iter().zip(&prints).enumerate() {
        groups.entry(fp).or_default().entry(*a.key()).or_default().push(i);
    }
    let classifier = Classifier::new(catalog, spec, dim)?;
    let mut class_of: Vec<Option<usize>> = vec![None; items.len()];
    let mut classes: Vec<ExtensionClass> = Vec::new();
    for i in 0..items.len() {
        if class_of[i].is_some() {
            continue;
        }
        let group = groups.get_mut(&prints[i]).expect("every item is grouped");
        let mut members: Vec<usize> = group.remove(fast[i].key()).expect("unassigned item is present");
        if !group.is_empty() {
            let _ = kernel::for_each_gl(dim, p, |g, inv| {
                if let Some(hit) = group.remove(fast[i].act(g, inv).key()) {
                    members.extend(hit);
                }
                if group.is_empty() {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
        }
        members.sort_unstable();
        for &m in &members {
            class_of[m] = Some(classes.len());
        }
        classes.push(ExtensionClass {
            representative: items[i].clone(),
            classification: classifier.classify(&items[i])?,
            multiplicity: members.len(),
            members,
        });
    }
    Ok(classes)
}

/// Base algebras for the extension run: the zero algebra and the 2D list,
/// with `α₄` at one representative per orbit.
pub fn base_algebras(catalog: &Catalog, spec: FieldSpec) -> Result<Vec<(String, StructureMatrix)>> {
    let mut out = vec![("trivial".to_string(), StructureMatrix::zero(spec, 2))];
    for entry in catalog.entries.iter().filter(|e| e.source == crate::catalog::Source::Paper2d) {
        for v in entry.orbit_representatives(spec)? {
            let label = match &v {
                Some(v) => format!("{}[{v}]", entry.id),
                None => entry.id.clone(),
            };
            out.push((label, entry.instantiate(v.as_ref(), spec)?));
        }
    }
    Ok(out)
}
