use thiserror::Error;

use super::{ArrowId, Category, Functor, ObjId, SetFunctor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("object {object:?} has {lifts} lifts of base arrow {base_arrow:?}")]
pub struct LiftFailure {
    pub object: ObjId,
    pub base_arrow: ArrowId,
    pub lifts: usize,
}

/// Checks unique lifting of every base arrow out of `proj(e)` to an arrow out
/// of `e`. The first failure in (object, arrow) order is returned.
pub fn is_discrete_opfibration<E, B>(total: &E, base: &B, proj: &Functor) -> Result<(), LiftFailure>
where
    E: Category + ?Sized,
    B: Category + ?Sized,
{
    let mut counts = vec![0usize; base.arrow_count()];
    for e in total.objects() {
        for &a in total.arrows_from(e) {
            counts[proj.arr(a).0] += 1;
        }
        let mut failure = None;
        for &g in base.arrows_from(proj.obj(e)) {
            if failure.is_none() && counts[g.0] != 1 {
                failure = Some(LiftFailure { object: e, base_arrow: g, lifts: counts[g.0] });
            }
        }
        for &a in total.arrows_from(e) {
            counts[proj.arr(a).0] = 0;
        }
        if let Some(f) = failure {
            return Err(f);
        }
    }
    Ok(())
}

/// The lift of `g` starting at `e`, when there is exactly one.
pub fn unique_lift<E: Category + ?Sized>(total: &E, proj: &Functor, e: ObjId, g: ArrowId) -> Option<ArrowId> {
    let mut found = None;
    for &a in total.arrows_from(e) {
        if proj.arr(a) == g {
            if found.is_some() {
                return None;
            }
            found = Some(a);
        }
    }
    found
}

/// Fibers of a discrete opfibration, packaged as a set-valued functor on the
/// base. Elements of the fiber over `b` are numbered in object-id order.
#[derive(Clone, Debug)]
pub struct FiberFunctor {
    pub fibers: Vec<Vec<ObjId>>,
    pub position: Vec<usize>,
    pub functor: SetFunctor,
}

impl FiberFunctor {
    /// The comparison `E → ∫F` sending `e` to `(p(e), position of e)`.
    pub fn comparison<E: Category + ?Sized, B: Category>(
        &self,
        total: &E,
        proj: &Functor,
        elements: &super::ElementsCategory<B>,
    ) -> Functor {
        Functor {
            objects: total
                .objects()
                .map(|e| elements.object_of(proj.obj(e), self.position[e.0]).expect("element"))
                .collect(),
            arrows: total
                .arrows()
                .map(|a| elements.arrow_of(proj.arr(a), self.position[total.source(a).0]).expect("element"))
                .collect(),
        }
    }
}

pub fn fiber_functor<E, B>(total: &E, base: &B, proj: &Functor) -> Result<FiberFunctor, LiftFailure>
where
    E: Category + ?Sized,
    B: Category + ?Sized,
{
    is_discrete_opfibration(total, base, proj)?;
    let mut fibers = vec![Vec::new(); base.object_count()];
    let mut position = vec![0; total.object_count()];
    for e in total.objects() {
        let f = &mut fibers[proj.obj(e).0];
        position[e.0] = f.len();
        f.push(e);
    }
    let maps = base
        .arrows()
        .map(|g| {
            fibers[base.source(g).0]
                .iter()
                .map(|&e| {
                    let a = unique_lift(total, proj, e, g).expect("opfibration");
                    position[total.target(a).0]
                })
                .collect()
        })
        .collect();
    let sizes = fibers.iter().map(Vec::len).collect();
    Ok(FiberFunctor { fibers, position, functor: SetFunctor { sizes, maps } })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("chain {chain:?} from {start:?} has {lifts} lifts")]
pub struct ChainFailure {
    pub start: ObjId,
    pub chain: Vec<ArrowId>,
    pub lifts: usize,
}

/// Unique lifting of composable chains of length `1..=max_len` from any lift
/// of their first vertex.
pub fn i_local_check<E, B>(total: &E, base: &B, proj: &Functor, max_len: usize) -> Result<(), ChainFailure>
where
    E: Category + ?Sized,
    B: Category + ?Sized,
{
    fn count<E: Category + ?Sized>(total: &E, proj: &Functor, e: ObjId, chain: &[ArrowId]) -> usize {
        match chain.split_first() {
            None => 1,
            Some((g, rest)) => total
                .arrows_from(e)
                .iter()
                .filter(|&&a| proj.arr(a) == *g)
                .map(|&a| count(total, proj, total.target(a), rest))
                .sum(),
        }
    }
    fn walk<E: Category + ?Sized, B: Category + ?Sized>(
        total: &E,
        base: &B,
        proj: &Functor,
        starts: &[Vec<ObjId>],
        chain: &mut Vec<ArrowId>,
        at: ObjId,
        remaining: usize,
    ) -> Result<(), ChainFailure> {
        if !chain.is_empty() {
            let start = base.source(chain[0]);
            for &e in &starts[start.0] {
                let lifts = count(total, proj, e, chain);
                if lifts != 1 {
                    return Err(ChainFailure { start: e, chain: chain.clone(), lifts });
                }
            }
        }
        if remaining == 0 {
            return Ok(());
        }
        for &g in base.arrows_from(at) {
            chain.push(g);
            walk(total, base, proj, starts, chain, base.target(g), remaining - 1)?;
            chain.pop();
        }
        Ok(())
    }
    let mut starts = vec![Vec::new(); base.object_count()];
    for e in total.objects() {
        starts[proj.obj(e).0].push(e);
    }
    for b in base.objects() {
        walk(total, base, proj, &starts, &mut Vec::new(), b, max_len)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{iso_check, ElementsCategory, FinCategory};

    fn two_points_over_arrow() -> (FinCategory, FinCategory, Functor) {
        let base = crate::category::tests::walking_arrow();
        let mut b = FinCategory::builder();
        b.object("x");
        b.object("y");
        let total = b.build().unwrap();
        let proj = Functor { objects: vec![ObjId(0), ObjId(1)], arrows: vec![ArrowId(0), ArrowId(1)] };
        (total, base, proj)
    }

    #[test]
    fn identity_is_an_opfibration() {
        let c = FinCategory::poset(3, |i, j| i <= j).unwrap();
        let id = Functor::identity(&c);
        assert!(is_discrete_opfibration(&c, &c, &id).is_ok());
        assert!(i_local_check(&c, &c, &id, 3).is_ok());
    }

    #[test]
    fn missing_lift_is_witnessed() {
        let (total, base, proj) = two_points_over_arrow();
        let err = is_discrete_opfibration(&total, &base, &proj).unwrap_err();
        assert_eq!(err.object, ObjId(0));
        assert_eq!(err.lifts, 0);
        assert_ne!(err.base_arrow, base.identity(ObjId(0)));
        assert!(i_local_check(&total, &base, &proj, 3).is_err());
    }

    #[test]
    fn grothendieck_roundtrip_on_poset() {
        let base = FinCategory::poset(3, |i, j| i == j || (i == 0)).unwrap();
        let f = SetFunctor {
            sizes: vec![2, 2, 1],
            maps: base
                .arrows()
                .map(|a| match (base.source(a).0, base.target(a).0) {
                    (0, 1) => vec![1, 0],
                    (0, 2) => vec![0, 0],
                    (s, _) => (0..[2, 2, 1][s]).collect(),
                })
                .collect(),
        };
        let el = ElementsCategory::new(&base, f).unwrap();
        let proj = el.projection();
        let fib = fiber_functor(&el, &base, &proj).unwrap();
        let el2 = ElementsCategory::new(&base, fib.functor.clone()).unwrap();
        let cmp = fib.comparison(&el, &proj, &el2);
        assert!(iso_check(&el, &el2, &cmp));
        assert_eq!(el2.projection().after(&cmp), proj);
    }
}
