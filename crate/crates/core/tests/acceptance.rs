//! One PASS/FAIL line per acceptance criterion. Each criterion runs the
//! sweep checks at the default bounds plus extra oracle checks, and the
//! process fails if any criterion fails.

use std::sync::Arc;
use std::time::Instant;

use opfib::dendroidal::{nerve_comparison, w_forest, Simplex};
use opfib::operad::{enumerate_algebras, library, Algebra};
use opfib::operators::{OperatorCategory, OverFinStar};
use opfib::category::Category;
use opfib::grothendieck::roundtrip_algebra;
use opfib::sweep::{self, Bounds};

/// Objects over `n_+` number `colors^n`.
fn object_counts() -> Result<(), String> {
    for (name, p) in library::sweep_operads(2, 2, sweep::ARITY_CAP) {
        let k = p.color_count();
        let ops = OperatorCategory::build(Arc::new(p), 3).map_err(|e| e.to_string())?;
        for n in 0..=3 {
            let found = ops.objects().filter(|&x| ops.arity_of(x) == n).count();
            if found != k.pow(n as u32) {
                return Err(format!("{name}: {found} objects over {n}_+"));
            }
        }
    }
    Ok(())
}

/// The ({0,1}, max) monoid straightens with two components per color.
fn max_monoid_components() -> Result<(), String> {
    let comm = Arc::new(library::comm(sweep::ARITY_CAP));
    let alg = Algebra::from_fn(comm, vec![2], |_, a| a.iter().copied().max().unwrap_or(0)).map_err(|e| e.to_string())?;
    let st = roundtrip_algebra(&alg, 3).map_err(|e| e.to_string())?;
    match st.witnesses.iter().all(|w| w.components == 2) {
        true => Ok(()),
        false => Err(format!("{:?}", st.witnesses)),
    }
}

/// Points go to `s` copies of η, and faces and degeneracies of all
/// simplices of dimension ≤ 2 under horizon 4 are forest maps.
fn w_extras() -> Result<(), String> {
    for s in 0..=4 {
        if w_forest(&Simplex::point(s)).edge_count() != s || w_forest(&Simplex::point(s)).vertex_count() != 0 {
            return Err(format!("w({s}_+)"));
        }
    }
    sweep::w_functoriality(4, 2).map(|_| ())
}

/// Comm has exactly one nerve element per simplex.
fn comm_nerve_counts() -> Result<(), String> {
    let r = nerve_comparison(&library::comm(3), 3, 3, 1).map_err(|e| e.to_string())?;
    if r.passed() && r.simplices == r.elements {
        Ok(())
    } else {
        Err(format!("simplices {:?}, elements {:?}", r.simplices, r.elements))
    }
}

/// Hand count: commutative monoids on a labeled set of size ≤ 2 are the
/// point, and on two elements a choice of unit times two squares.
fn comm_monoid_hand_count() -> Result<(), String> {
    let found = enumerate_algebras(&Arc::new(library::comm(3)), 2).len();
    if found == 1 + 2 * 2 {
        Ok(())
    } else {
        Err(format!("{found} algebras"))
    }
}

type Extra = fn() -> Result<(), String>;

fn main() {
    let bounds = Bounds::default();
    let criteria: [(u8, &str, &[Extra]); 9] = [
        (1, "operad axioms on categories of operators", &[object_counts]),
        (2, "straighten/unstraighten roundtrips", &[]),
        (3, "comma-category carriers match fibers", &[max_monoid_components]),
        (4, "fibration acceptance and fibrewise equivalences", &[]),
        (5, "envelopes of fibrations are strong; counterexample fails", &[]),
        (6, "w-forests of simplices", &[w_extras]),
        (7, "dendroidal nerve comparison, dimension ≤ 3, horizon 3", &[comm_nerve_counts]),
        (8, "locality agrees with the operadic check; forest retracts", &[]),
        (9, "oracle counts: commutative monoids, envelope homs", &[comm_monoid_hand_count]),
    ];
    let mut all_passed = true;
    for (k, title, extras) in criteria {
        let start = Instant::now();
        let report = sweep::run_criteria(&bounds, &[k]);
        let mut passed = report.criterion_passed(k);
        let mut notes: Vec<String> = report
            .failures()
            .take(3)
            .map(|r| format!("{} {}: {}", r.check, r.instance, r.witness.clone().unwrap_or_default()))
            .collect();
        for extra in extras {
            if let Err(e) = extra() {
                passed = false;
                notes.push(e);
            }
        }
        all_passed &= passed;
        println!(
            "criterion {k}: {} {title} ({} records, {:.1} s)",
            if passed { "PASS" } else { "FAIL" },
            report.records.len(),
            start.elapsed().as_secs_f64()
        );
        for n in notes {
            println!("    {n}");
        }
    }
    if !all_passed {
        std::process::exit(1);
    }
}
