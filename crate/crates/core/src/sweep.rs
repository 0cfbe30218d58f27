//! The acceptance sweep: enumerates operads, algebras and fibrations under
//! bounds, runs every check, and reports one record per instance and check.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::category::Category;
use crate::dendroidal::{
    enumerate_forest_codes, enumerate_simplices, enumerate_tree_codes, forest_map_check, l_local_check, level_edge_map,
    nerve_comparison, retract_through_simplex, w_forest, Forest, Simplex,
};
use crate::envelope::{basepoint_fibration, is_strong_sm_left_fibration, EnvelopeCategory, StrongFailure};
use crate::grothendieck::{
    chaotic_operad, is_fibrewise_equivalence, is_operator_iso, roundtrip_algebra, roundtrip_fibration,
    roundtrip_naturality, strong_transfer_check, unstraighten, unstraighten_map, OperadicLeftFibration,
    StraighteningResult,
};
use crate::instance::{hash_text, InstanceFile};
use crate::operad::{algebra_map_check, enumerate_algebras, library, Algebra, Color, ColoredOperad, OpId, OperadMap};
use crate::operators::{OperatorCategory, OverFinStar};
use crate::perm;
use crate::pointed::PointedMap;

/// Arity cap of every operad in the sweep.
pub const ARITY_CAP: usize = 3;

pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub colors: usize,
    pub op_bound: usize,
    pub size_bound: usize,
    pub horizon: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { colors: 2, op_bound: 2, size_bound: 2, horizon: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub hash: String,
    pub instance: String,
    pub criterion: u8,
    pub check: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub bounds: Bounds,
    pub records: Vec<Record>,
}

/// Pass and fail counts of one check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.passed)
    }

    /// A criterion passes when it has records and none of them failed.
    pub fn criterion_passed(&self, criterion: u8) -> bool {
        let mut any = false;
        for r in self.records.iter().filter(|r| r.criterion == criterion) {
            if !r.passed {
                return false;
            }
            any = true;
        }
        any
    }

    pub fn summary(&self) -> BTreeMap<(u8, String), Tally> {
        let mut out: BTreeMap<(u8, String), Tally> = BTreeMap::new();
        for r in &self.records {
            let t = out.entry((r.criterion, r.check.clone())).or_default();
            if r.passed {
                t.passed += 1;
            } else {
                t.failed += 1;
            }
        }
        out
    }

    /// One JSON object per line, in record order.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    /// A summary table followed by one block per failure.
    pub fn to_human(&self) -> String {
        let b = self.bounds;
        let mut out = format!(
            "sweep: colors ≤ {}, operations per profile ≤ {}, carriers ≤ {}, horizon {}\n\n",
            b.colors, b.op_bound, b.size_bound, b.horizon
        );
        let _ = writeln!(out, "{:<3} {:<28} {:>8} {:>8}", "#", "check", "passed", "failed");
        for ((c, check), t) in self.summary() {
            let _ = writeln!(out, "{c:<3} {check:<28} {:>8} {:>8}", t.passed, t.failed);
        }
        for k in CRITERIA {
            if self.records.iter().any(|r| r.criterion == k) {
                let verdict = if self.criterion_passed(k) { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "criterion {k}: {verdict}");
            }
        }
        for r in self.failures() {
            let _ = writeln!(out, "\nFAIL {} [{}] {}", r.check, r.hash, r.instance);
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "  {}", w.replace('\n', "\n  "));
            }
        }
        out
    }
}

struct Sink<'a> {
    criteria: &'a [u8],
    records: Vec<Record>,
}

impl Sink<'_> {
    fn wants(&self, criterion: u8) -> bool {
        self.criteria.contains(&criterion)
    }

    fn push(&mut self, key: &str, instance: &str, criterion: u8, check: &str, result: Result<(), String>) {
        if !self.wants(criterion) {
            return;
        }
        self.records.push(Record {
            hash: hash_text(key),
            instance: instance.to_string(),
            criterion,
            check: check.to_string(),
            passed: result.is_ok(),
            witness: result.err(),
        });
    }
}

fn json(f: &InstanceFile) -> String {
    serde_json::to_string(f).expect("instances serialize")
}

pub fn run(bounds: &Bounds) -> SweepReport {
    run_criteria(bounds, &CRITERIA)
}

/// Runs the checks of the listed criteria only. Records are sorted by
/// instance hash, then criterion and check name.
pub fn run_criteria(bounds: &Bounds, criteria: &[u8]) -> SweepReport {
    let mut sink = Sink { criteria, records: Vec::new() };
    let h = bounds.horizon;
    for (name, p) in library::sweep_operads(bounds.colors, bounds.op_bound, ARITY_CAP) {
        let p = Arc::new(p);
        let key = json(&InstanceFile::from(&*p));
        operad_checks(&mut sink, &key, name, &p, h);
        if [2, 3, 4, 5, 8].iter().any(|&k| sink.wants(k)) {
            fibration_checks(&mut sink, name, &p, bounds);
        }
        if sink.wants(7) {
            let result = match nerve_comparison(&p, h, 3, 5) {
                Ok(r) if r.passed() => Ok(()),
                Ok(r) => Err(format!("{} failures, first: {:?}", r.failure_count(), r.failures.first())),
                Err(e) => Err(e.to_string()),
            };
            sink.push(&key, name, 7, "nerve.comparison", result);
        }
    }
    global_checks(&mut sink, bounds);
    let mut records = sink.records;
    records.sort_by(|a, b| (&a.hash, a.criterion, &a.check).cmp(&(&b.hash, b.criterion, &b.check)));
    SweepReport { bounds: *bounds, records }
}

fn operad_checks(sink: &mut Sink<'_>, key: &str, name: &str, p: &Arc<ColoredOperad>, h: usize) {
    if !sink.wants(1) {
        return;
    }
    let report = p.validate();
    let result = match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(format!("{v}; suspect {:?}", report.prime_suspect())),
    };
    sink.push(key, name, 1, "operad.validate", result);
    match OperatorCategory::build(p.clone(), h) {
        Ok(ops) => {
            sink.push(key, name, 1, "operators.segal", ops.check_segal_objects().map_err(|e| e.to_string()));
            sink.push(key, name, 1, "operators.cocartesian", ops.check_cocartesian_lifts().map_err(|e| e.to_string()));
            sink.push(key, name, 1, "operators.hom-products", ops.check_hom_products().map_err(|e| e.to_string()));
        }
        Err(e) => sink.push(key, name, 1, "operators.build", Err(e.to_string())),
    }
}

/// Every family of functions `A(c) → B(c)`.
fn function_families(src: &[usize], tgt: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    for (&n, &m) in src.iter().zip(tgt) {
        let mut funcs: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..n {
            funcs = funcs.iter().flat_map(|f| (0..m).map(move |v| [f.as_slice(), &[v]].concat())).collect();
        }
        out = out.iter().flat_map(|fam| funcs.iter().map(move |f| [fam.clone(), vec![f.clone()]].concat())).collect();
    }
    out
}

fn is_bijective_family(g: &[Vec<usize>], tgt: &[usize]) -> bool {
    g.iter().zip(tgt).all(|(f, &m)| {
        let mut seen = vec![false; m];
        f.len() == m && f.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    })
}

/// Profiles `(base operation, input positions, output position)` of the
/// total operad, with fiber positions renamed by `rename[c]`.
fn total_signature(fib: &OperadicLeftFibration, rename: &[Vec<usize>]) -> Vec<(OpId, Vec<usize>, usize)> {
    let total = fib.total();
    let pos = |t: Color| rename[fib.base_color(t).0][fib.position(t)];
    let mut sig: Vec<(OpId, Vec<usize>, usize)> = total
        .ops()
        .map(|o| (fib.proj().ops[o.0], total.inputs(o).iter().map(|&t| pos(t)).collect(), pos(total.output(o))))
        .collect();
    sig.sort();
    sig
}

fn algebra_signature(alg: &Algebra) -> Vec<(OpId, Vec<usize>, usize)> {
    let p = alg.operad();
    let mut sig: Vec<(OpId, Vec<usize>, usize)> =
        p.ops().flat_map(|o| alg.arguments(o).map(move |args| (o, args.clone(), alg.eval(o, &args)))).collect();
    sig.sort();
    sig
}

/// Whether the total operad is, up to renaming fiber elements, the
/// Grothendieck construction of one of `algebras`, comparing operation
/// profiles directly.
pub fn matches_grothendieck(fib: &OperadicLeftFibration, algebras: &[Algebra]) -> bool {
    let sizes: Vec<usize> = fib.base().colors().map(|c| fib.fiber(c).len()).collect();
    let perms: Vec<Vec<perm::Perm>> = sizes.iter().map(|&n| perm::all(n)).collect();
    let candidates: Vec<Vec<(OpId, Vec<usize>, usize)>> = algebras
        .iter()
        .filter(|a| *a.operad() == **fib.base() && a.carriers() == sizes.as_slice())
        .map(algebra_signature)
        .collect();
    if candidates.is_empty() {
        return false;
    }
    let mut choice = vec![0; sizes.len()];
    loop {
        let rename: Vec<Vec<usize>> =
            choice.iter().zip(&perms).map(|(&k, ps)| ps[k].as_slice().to_vec()).collect();
        let sig = total_signature(fib, &rename);
        if candidates.contains(&sig) {
            return true;
        }
        let mut i = choice.len();
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < perms[i].len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// Vectors of length `k` with entries in `1..=bound`, lexicographically.
fn size_vectors(k: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out.iter().flat_map(|v: &Vec<usize>| (1..=bound).map(move |s| [v.as_slice(), &[s]].concat())).collect();
    }
    out
}

fn reversed(fib: &OperadicLeftFibration) -> OperadicLeftFibration {
    let color_perm: Vec<usize> = (0..fib.total().color_count()).rev().collect();
    let op_perm: Vec<usize> = (0..fib.total().op_count()).rev().collect();
    fib.relabel(&color_perm, &op_perm).expect("relabeling keeps the operad map")
}

/// The test forests for locality: at most two trees of at most three
/// vertices of arity at most the cap.
pub fn locality_forests() -> Vec<Forest> {
    enumerate_forest_codes(&enumerate_tree_codes(3, ARITY_CAP), 2)
        .iter()
        .map(|c| Forest::from_code(c).expect("enumerated code"))
        .collect()
}

/// Fibrations over `p` fed to the fibration checks: Grothendieck
/// constructions (as built and relabeled), the identity, total operads with
/// every operation lifted between all fiber elements, and the units-only
/// total operad.
pub fn candidate_fibrations(
    name: &str,
    p: &Arc<ColoredOperad>,
    algebras: &[Algebra],
    size_bound: usize,
    horizon: usize,
) -> Vec<(String, OperadicLeftFibration)> {
    let mut out = Vec::new();
    for (i, alg) in algebras.iter().enumerate() {
        if let Ok(fib) = unstraighten(alg, horizon) {
            out.push((format!("{name}/unstraighten{i}"), reversed(&fib)));
            out.push((format!("{name}/unstraighten{i}/built"), fib));
        }
    }
    let identity = OperadMap::identity(p);
    out.push((format!("{name}/identity"), OperadicLeftFibration::from_parts(p.clone(), p.clone(), identity).unwrap()));
    let k = p.color_count();
    for sizes in size_vectors(k, size_bound) {
        if let Ok((total, proj)) = chaotic_operad(p, &sizes) {
            if let Ok(fib) = OperadicLeftFibration::from_parts(p.clone(), Arc::new(total), proj) {
                out.push((format!("{name}/chaotic{sizes:?}"), fib));
            }
        }
    }
    let units = library::initial(k, p.arity_cap());
    let mut ops = vec![OpId(0); units.op_count()];
    for c in p.colors() {
        ops[units.unit(c).0] = p.unit(c);
    }
    let proj = OperadMap { colors: p.colors().collect(), ops };
    if let Ok(fib) = OperadicLeftFibration::from_parts(p.clone(), Arc::new(units), proj) {
        out.push((format!("{name}/units-only"), fib));
    }
    out
}

fn carrier_witness(fib: &OperadicLeftFibration, alg: &Algebra, st: &StraighteningResult) -> Result<(), String> {
    for w in &st.witnesses {
        let n = alg.carrier(w.color);
        if w.components != n {
            return Err(format!("color {:?}: {} components for a carrier of {n}", w.color, w.components));
        }
        let mut canonical = w.canonical.clone();
        canonical.sort();
        let mut fiber = fib.fiber(w.color).to_vec();
        fiber.sort();
        if canonical != fiber {
            return Err(format!("color {:?}: canonical objects {:?}, fiber {:?}", w.color, w.canonical, fiber));
        }
    }
    Ok(())
}

fn fibration_checks(sink: &mut Sink<'_>, name: &str, p: &Arc<ColoredOperad>, bounds: &Bounds) {
    let h = bounds.horizon;
    let algebras = enumerate_algebras(p, bounds.size_bound);
    // per algebra: key, fibration, straightened algebra, operators of the
    // total at horizon ≤ 2
    let mut built: Vec<Option<(String, OperadicLeftFibration, Algebra, OperatorCategory)>> = Vec::new();
    for (i, alg) in algebras.iter().enumerate() {
        let key = json(&InstanceFile::from(alg));
        let label = format!("{name}/algebra{i} carriers {:?}", alg.carriers());
        let fib = match unstraighten(alg, h) {
            Ok(f) => f,
            Err(e) => {
                sink.push(&key, &label, 2, "roundtrip.algebra", Err(format!("unstraighten: {e}")));
                built.push(None);
                continue;
            }
        };
        let st = roundtrip_algebra(alg, h);
        let st_alg = st.as_ref().ok().map(|s| s.algebra.clone());
        sink.push(&key, &label, 3, "straighten.carrier", match &st {
            Ok(s) => carrier_witness(&fib, alg, s),
            Err(e) => Err(e.to_string()),
        });
        sink.push(&key, &label, 2, "roundtrip.algebra", st.map(|_| ()).map_err(|e| e.to_string()));
        if sink.wants(2) {
            let scrambled = reversed(&fib);
            let fkey = json(&InstanceFile::from(&scrambled));
            let result = roundtrip_fibration(&scrambled, h).map(|_| ()).map_err(|e| e.to_string());
            sink.push(&fkey, &format!("{label} relabeled fibration"), 2, "roundtrip.fibration", result);
        }
        if sink.wants(5) {
            let result = strong_transfer_check(&fib, h.min(2)).map_err(|e| e.to_string());
            sink.push(&key, &label, 5, "envelope.strong", result);
        }
        match (st_alg, OperatorCategory::build(fib.total().clone(), h.min(2))) {
            (Some(s), Ok(ops)) => built.push(Some((key, fib, s, ops))),
            _ => built.push(None),
        }
    }
    if sink.wants(2) || sink.wants(4) {
        for (i, a) in algebras.iter().enumerate() {
            for (j, b) in algebras.iter().enumerate() {
                let (Some(src), Some(tgt)) = (&built[i], &built[j]) else { continue };
                for g in function_families(a.carriers(), b.carriers()) {
                    if algebra_map_check(&g, a, b) != Ok(true) {
                        continue;
                    }
                    let key = format!("map:{}:{}:{:?}", src.0, tgt.0, g);
                    let label = format!("{name}/algebra{i} → algebra{j} by {g:?}");
                    let result = roundtrip_naturality(&g, &src.1, &src.2, &tgt.1, &tgt.2).map_err(|e| e.to_string());
                    sink.push(&key, &label, 2, "roundtrip.naturality", result);
                    let result = match unstraighten_map(&g, &src.1, &tgt.1) {
                        None => Err("algebra map has no induced map of fibrations".to_string()),
                        Some(ug) => {
                            let fibrewise = is_fibrewise_equivalence(&ug, &src.1, &tgt.1).is_ok();
                            let iso = is_operator_iso(&ug, &src.3, &tgt.3);
                            let bijective = is_bijective_family(&g, b.carriers());
                            if fibrewise == iso && iso == bijective {
                                Ok(())
                            } else {
                                Err(format!("fibrewise {fibrewise}, operator iso {iso}, bijective {bijective}"))
                            }
                        }
                    };
                    sink.push(&key, &label, 4, "fibration-map.agreement", result);
                }
            }
        }
    }
    if sink.wants(4) || sink.wants(8) {
        let forests = locality_forests();
        for (label, fib) in candidate_fibrations(name, p, &algebras, bounds.size_bound, h) {
            let key = json(&InstanceFile::from(&fib));
            let accepted = fib.check(h).map_err(|e| e.to_string());
            let oracle = matches_grothendieck(&fib, &algebras);
            let verdict = |b: bool| if b { "accepts" } else { "rejects" };
            let result = if accepted.is_ok() == oracle {
                Ok(())
            } else {
                Err(format!(
                    "checker {} ({:?}), profile search {}",
                    verdict(accepted.is_ok()),
                    accepted.as_ref().err(),
                    verdict(oracle)
                ))
            };
            sink.push(&key, &label, 4, "fibration.acceptance", result.clone());
            if sink.wants(8) {
                let local = l_local_check(&fib, &forests, false);
                let result = if local.is_ok() == accepted.is_ok() {
                    Ok(())
                } else {
                    Err(format!("locality {:?}, operadic check {}", local.err(), verdict(accepted.is_ok())))
                };
                sink.push(&key, &label, 8, "locality.agreement", result);
                let result = match nerve_comparison(fib.total(), h.min(2), 2, 3) {
                    Ok(r) if r.passed() => Ok(()),
                    Ok(r) => Err(format!("{:?}", r.failures.first())),
                    Err(e) => Err(e.to_string()),
                };
                sink.push(&key, &label, 8, "nerve.total", result);
            }
        }
    }
}

fn pm(target: usize, image: &[usize]) -> PointedMap {
    PointedMap::new(target, image.to_vec()).expect("valid pointed map")
}

fn forest_matches(sigma: &Simplex, expected: &str) -> Result<(), String> {
    let got = w_forest(sigma).canonical();
    let want = Forest::parse(expected).map_err(|e| e.to_string())?.canonical();
    if got == want {
        Ok(())
    } else {
        Err(format!("w({sigma:?}) = {got}, expected {want}"))
    }
}

/// Faces and degeneracies of every simplex of dimension `1..=max_dim` go to
/// maps of forests.
pub fn w_functoriality(horizon: usize, max_dim: usize) -> Result<usize, String> {
    let mut count = 0;
    for dim in 1..=max_dim {
        for sigma in enumerate_simplices(horizon, dim) {
            let w = w_forest(&sigma);
            for i in 0..=dim {
                let face = sigma.face(i).expect("in range");
                let map = level_edge_map(&face, &sigma, &sigma.face_levels(i));
                forest_map_check(&w_forest(&face), &w, &map).map_err(|e| format!("{sigma:?} d{i}: {e}"))?;
                let deg = sigma.degeneracy(i).expect("in range");
                let map = level_edge_map(&deg, &sigma, &sigma.degeneracy_levels(i));
                forest_map_check(&w_forest(&deg), &w, &map).map_err(|e| format!("{sigma:?} s{i}: {e}"))?;
            }
            count += 1;
        }
    }
    Ok(count)
}

/// Every forest of at most `max_trees` trees with at most `max_vertices`
/// vertices each is a retract of the forest of a simplex.
pub fn retract_hook(max_vertices: usize, max_trees: usize) -> Result<usize, String> {
    let codes = enumerate_forest_codes(&enumerate_tree_codes(max_vertices, ARITY_CAP), max_trees);
    for code in &codes {
        let f = Forest::from_code(code).map_err(|e| e.to_string())?;
        let r = retract_through_simplex(&f);
        let w = w_forest(&r.simplex);
        forest_map_check(&f, &w, &r.include).map_err(|e| format!("{code}: inclusion {e}"))?;
        forest_map_check(&w, &f, &r.retract).map_err(|e| format!("{code}: retraction {e}"))?;
        if r.include.iter().enumerate().any(|(e, &x)| r.retract[x] != e) {
            return Err(format!("{code}: retraction does not split the inclusion"));
        }
    }
    Ok(codes.len())
}

/// Commutative monoid structures on `{0..n-1}`, counted by brute force
/// over multiplication tables.
pub fn count_commutative_monoids(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let cells = n * n;
    let mut count = 0;
    let mut table = vec![0usize; cells];
    loop {
        let m = |a: usize, b: usize| table[a * n + b];
        let commutative = (0..n).all(|a| (0..n).all(|b| m(a, b) == m(b, a)));
        let associative = commutative
            && (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| m(m(a, b), c) == m(a, m(b, c)))));
        let units = (0..n).filter(|&e| (0..n).all(|a| m(e, a) == a)).count();
        if associative && units == 1 {
            count += 1;
        }
        let mut i = cells;
        loop {
            if i == 0 {
                return count;
            }
            i -= 1;
            table[i] += 1;
            if table[i] < n {
                break;
            }
            table[i] = 0;
        }
    }
}

/// Arrows `⟨x^m⟩ → ⟨x^n⟩` over `id_{1_+}` in the envelope of Comm, indexed
/// by `(m, n)`.
pub fn envelope_hom_counts(horizon: usize) -> Vec<((usize, usize), usize)> {
    let ops = OperatorCategory::build(Arc::new(library::comm(ARITY_CAP)), horizon).expect("comm operators");
    let e = EnvelopeCategory::new(ops).expect("comm envelope");
    let one = PointedMap::identity(1);
    let mut out = Vec::new();
    for m in 0..=horizon {
        for n in 0..=horizon {
            let x = e.underlying_object(&vec![Color(0); m]).expect("within horizon");
            let y = e.underlying_object(&vec![Color(0); n]).expect("within horizon");
            let count = e.arrows_from(x).iter().filter(|&&a| e.target(a) == y && *e.base_map(a) == one).count();
            out.push(((m, n), count));
        }
    }
    out
}

/// The strong check on the fibration with fiber `n_+` over objects over
/// `n_+`, which must fail at the empty sum.
pub fn non_strong_counterexample() -> Result<(), String> {
    let ops = OperatorCategory::build(Arc::new(library::comm(2)), 2).map_err(|e| e.to_string())?;
    let e = EnvelopeCategory::new(ops).map_err(|e| e.to_string())?;
    let total = basepoint_fibration(&e);
    match is_strong_sm_left_fibration(&total, &e, &total.projection()) {
        Err(StrongFailure::NotBijective { sum, tensor, sum_fiber: 1, tensor_fiber: 2 })
            if e.arity_of(sum) == 0 && e.arity_of(tensor) == 1 =>
        {
            Ok(())
        }
        other => Err(format!("expected a β_! failure from the empty sum, got {other:?}")),
    }
}

fn global_checks(sink: &mut Sink<'_>, bounds: &Bounds) {
    let h = bounds.horizon;
    let key = |name: &str| format!("global:{name}");
    if sink.wants(5) {
        sink.push(&key("non-strong"), "pointed-set fibration over Env(Comm)", 5, "envelope.non-strong", non_strong_counterexample());
    }
    if sink.wants(6) {
        let fig1 = Simplex::from_maps(vec![pm(3, &[2, 2, 2, 3, 0, 0])]).expect("chain");
        let fig1_file = json(&InstanceFile::from(&fig1));
        sink.push(&fig1_file, "6_+ → 3_+", 6, "w.figure", forest_matches(&fig1, "a(); b(x, y, z); c(w); e; f"));
        let fig2 = Simplex::from_maps(vec![pm(3, &[1, 1, 3, 3]), pm(1, &[1, 1, 0])]).expect("chain");
        let fig2_file = json(&InstanceFile::from(&fig2));
        sink.push(&fig2_file, "4_+ → 3_+ → 1_+", 6, "w.figure", forest_matches(&fig2, "r(a(x, y), b()); c(u, v)"));
        for s in 0..=4 {
            let point = Simplex::point(s);
            let expected = vec!["|"; s].join(" ");
            let got = w_forest(&point).canonical();
            let result = if got == expected { Ok(()) } else { Err(format!("got {got:?}")) };
            sink.push(&json(&InstanceFile::from(&point)), &format!("{s}_+"), 6, "w.point", result);
        }
        let result = w_functoriality(h, 2).map(|_| ());
        sink.push(&key(&format!("w-functorial-{h}")), &format!("simplices of dimension ≤ 2, horizon {h}"), 6, "w.functorial", result);
    }
    if sink.wants(8) {
        let result = retract_hook(2, 2).map(|_| ());
        sink.push(&key("retract"), "forests of ≤ 2 trees with ≤ 2 vertices", 8, "forest.retract", result);
    }
    if sink.wants(9) {
        let comm = Arc::new(library::comm(ARITY_CAP));
        let found = enumerate_algebras(&comm, bounds.size_bound).len();
        let expected: usize = (0..=bounds.size_bound).map(count_commutative_monoids).sum();
        let result = if found == expected { Ok(()) } else { Err(format!("{found} algebras, {expected} monoids")) };
        sink.push(&key("comm-monoids"), &format!("Comm algebras with carrier ≤ {}", bounds.size_bound), 9, "oracle.comm-monoids", result);
        let bad: Vec<String> = envelope_hom_counts(h.min(ARITY_CAP))
            .into_iter()
            .filter(|&((m, n), c)| c != n.pow(m as u32))
            .map(|((m, n), c)| format!("{m} → {n}: {c}"))
            .collect();
        let result = if bad.is_empty() { Ok(()) } else { Err(bad.join(", ")) };
        sink.push(&key("envelope-homs"), "Env(Comm) homs over id", 9, "oracle.envelope-homs", result);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monoid_counts() {
        assert_eq!(count_commutative_monoids(1), 1);
        assert_eq!(count_commutative_monoids(2), 4);
        assert_eq!(function_families(&[2, 1], &[2, 3]).len(), 4 * 3);
        assert_eq!(function_families(&[1], &[0]).len(), 0);
    }

    #[test]
    fn smallest_sweep_passes() {
        let r = run(&Bounds { colors: 1, op_bound: 1, size_bound: 1, horizon: 2 });
        assert!(r.passed(), "{}", r.to_human());
        for k in CRITERIA {
            assert!(r.criterion_passed(k), "criterion {k}");
        }
        let hashes: Vec<&String> = r.records.iter().map(|r| &r.hash).collect();
        assert!(hashes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn profile_search_rejects_chaotic() {
        let comm = Arc::new(library::comm(3));
        let algebras = enumerate_algebras(&comm, 2);
        let cands = candidate_fibrations("comm", &comm, &algebras, 2, 2);
        let verdicts: Vec<(String, bool)> =
            cands.iter().map(|(l, f)| (l.clone(), matches_grothendieck(f, &algebras))).collect();
        assert!(verdicts.iter().any(|(l, v)| l.contains("chaotic[2]") && !v));
        assert!(verdicts.iter().any(|(l, v)| l.contains("chaotic[1]") && *v));
        assert!(verdicts.iter().any(|(l, v)| l.contains("units-only") && !v));
        assert!(verdicts.iter().filter(|(l, _)| l.contains("unstraighten")).all(|(_, v)| *v));
    }
}
