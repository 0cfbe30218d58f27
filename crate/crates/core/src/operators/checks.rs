//! Predicates for categories lying over the truncated `Fin_*`.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::category::{check_functor, is_discrete_opfibration, unique_lift, ArrowId, Category, Functor, FunctorViolation, LiftFailure, ObjId};
use crate::pointed::{enumerate_maps, FinStar, PointedMap};

/// A category with a functor to `Fin_*` truncated at `horizon`, together
/// with chosen lifts of inert maps.
pub trait OverFinStar: Category {
    fn horizon(&self) -> usize;
    fn arity_of(&self, x: ObjId) -> usize;
    fn base_map(&self, a: ArrowId) -> &PointedMap;
    /// A chosen lift of the inert map `f` starting at `x`, if one exists.
    fn inert_lift(&self, x: ObjId, f: &PointedMap) -> Option<ArrowId>;

    /// The structure functor to `base`, which must contain every base map.
    fn projection(&self, base: &FinStar) -> Functor {
        Functor {
            objects: self.objects().map(|x| ObjId(self.arity_of(x))).collect(),
            arrows: self
                .arrows()
                .map(|a| base.arrow_of(self.base_map(a)).expect("base map within the horizon"))
                .collect(),
        }
    }
}

impl<C: OverFinStar + ?Sized> OverFinStar for &C {
    fn horizon(&self) -> usize {
        (**self).horizon()
    }
    fn arity_of(&self, x: ObjId) -> usize {
        (**self).arity_of(x)
    }
    fn base_map(&self, a: ArrowId) -> &PointedMap {
        (**self).base_map(a)
    }
    fn inert_lift(&self, x: ObjId, f: &PointedMap) -> Option<ArrowId> {
        (**self).inert_lift(x, f)
    }
}

/// Number of `g` with `g ∘ f = h`, for `f: n → k`, `h: n → m`.
fn extension_count(f: &PointedMap, h: &PointedMap) -> usize {
    let (k, m) = (f.target(), h.target());
    let mut fixed: Vec<Option<usize>> = vec![None; k + 1];
    fixed[0] = Some(0);
    for i in 1..=f.source() {
        let j = f.apply(i);
        match fixed[j] {
            Some(v) if v != h.apply(i) => return 0,
            _ => fixed[j] = Some(h.apply(i)),
        }
    }
    let free = fixed.iter().filter(|v| v.is_none()).count();
    (m + 1).pow(free as u32)
}

/// Whether `a: x → x'` is coCartesian relative to the projection: for each
/// `b: x → z` and each `g` with `g ∘ p(a) = p(b)` there is exactly one
/// `c: x' → z` over `g` with `c ∘ a = b`.
pub fn is_cocartesian<E: OverFinStar + ?Sized>(total: &E, a: ArrowId) -> bool {
    let (x, x2) = (total.source(a), total.target(a));
    let mut through: HashMap<ArrowId, Vec<&PointedMap>> = HashMap::new();
    for &c in total.arrows_from(x2) {
        if let Some(b) = total.compose(c, a) {
            through.entry(b).or_default().push(total.base_map(c));
        }
    }
    let f = total.base_map(a);
    for &b in total.arrows_from(x) {
        let expected = extension_count(f, total.base_map(b));
        let maps = through.get(&b).map(Vec::as_slice).unwrap_or(&[]);
        let distinct: HashSet<&PointedMap> = maps.iter().copied().collect();
        if maps.len() != expected || distinct.len() != expected {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperadMapFailure {
    #[error("not a functor: {0}")]
    NotAFunctor(#[from] FunctorViolation),
    #[error("arrow {0:?} changes its underlying pointed map")]
    NotOverBase(ArrowId),
    #[error("no chosen lift of {map:?} from {object:?}")]
    MissingLift { object: ObjId, map: PointedMap },
    #[error("image of the lift of {map:?} from {object:?} is not coCartesian")]
    InertNotPreserved { object: ObjId, map: PointedMap },
}

fn inerts_within(n: usize, h: usize) -> impl Iterator<Item = PointedMap> {
    (0..=h).flat_map(move |m| enumerate_maps(n, m).into_iter().filter(PointedMap::is_inert))
}

/// A functor over `Fin_*` that sends chosen inert lifts to coCartesian arrows.
pub fn is_operad_map<S, T>(src: &S, tgt: &T, f: &Functor) -> Result<(), OperadMapFailure>
where
    S: OverFinStar + ?Sized,
    T: OverFinStar + ?Sized,
{
    check_functor(src, tgt, f)?;
    if let Some(a) = src.arrows().find(|&a| src.base_map(a) != tgt.base_map(f.arr(a))) {
        return Err(OperadMapFailure::NotOverBase(a));
    }
    for x in src.objects() {
        for map in inerts_within(src.arity_of(x), src.horizon()) {
            let Some(lift) = src.inert_lift(x, &map) else {
                return Err(OperadMapFailure::MissingLift { object: x, map });
            };
            if !is_cocartesian(tgt, f.arr(lift)) {
                return Err(OperadMapFailure::InertNotPreserved { object: x, map });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FibrationFailure {
    #[error("not a discrete opfibration: {0}")]
    Lifting(#[from] LiftFailure),
    #[error("base has no chosen lift of {map:?} from {object:?}")]
    MissingLift { object: ObjId, map: PointedMap },
    #[error("fiber over {object:?} has {found} elements but its components give {expected}")]
    FiberCount { object: ObjId, found: usize, expected: usize },
    #[error("fiber over {object:?} is not determined by its components")]
    FiberNotInjective { object: ObjId },
}

/// For a discrete opfibration, checks that the fiber over each `⟨x_1..x_n⟩`
/// is the product of the fibers over the `⟨x_i⟩`, via the lifts of `ρ^i`.
pub fn fiber_segal_check<E, B>(total: &E, base: &B, proj: &Functor) -> Result<(), FibrationFailure>
where
    E: Category + ?Sized,
    B: OverFinStar + ?Sized,
{
    let mut fibers: Vec<Vec<ObjId>> = vec![Vec::new(); base.object_count()];
    for e in total.objects() {
        fibers[proj.obj(e).0].push(e);
    }
    for x in base.objects() {
        let n = base.arity_of(x);
        let mut rhos = Vec::with_capacity(n);
        for i in 1..=n {
            let map = PointedMap::projection(n, i).expect("in range");
            match base.inert_lift(x, &map) {
                Some(r) => rhos.push(r),
                None => return Err(FibrationFailure::MissingLift { object: x, map }),
            }
        }
        let expected: usize = rhos.iter().map(|&r| fibers[base.target(r).0].len()).product();
        if expected != fibers[x.0].len() {
            return Err(FibrationFailure::FiberCount { object: x, found: fibers[x.0].len(), expected });
        }
        let mut seen = HashSet::new();
        for &e in &fibers[x.0] {
            let parts: Option<Vec<ObjId>> =
                rhos.iter().map(|&r| unique_lift(total, proj, e, r).map(|l| total.target(l))).collect();
            if !parts.is_some_and(|p| seen.insert(p)) {
                return Err(FibrationFailure::FiberNotInjective { object: x });
            }
        }
    }
    Ok(())
}

/// Discrete opfibration whose fibers satisfy the product condition.
pub fn is_operadic_left_fibration<E, B>(total: &E, base: &B, proj: &Functor) -> Result<(), FibrationFailure>
where
    E: Category + ?Sized,
    B: OverFinStar + ?Sized,
{
    is_discrete_opfibration(total, base, proj)?;
    fiber_segal_check(total, base, proj)
}

/// All functors `src → tgt` preserving arity and underlying pointed maps,
/// up to `limit` of them, in lexicographic order of assignments.
pub fn enumerate_functors_over<S, T>(src: &S, tgt: &T, limit: usize) -> Vec<Functor>
where
    S: OverFinStar + ?Sized,
    T: OverFinStar + ?Sized,
{
    let mut order: Vec<ArrowId> = src.objects().map(|x| src.identity(x)).collect();
    let ids: HashSet<ArrowId> = order.iter().copied().collect();
    order.extend(src.arrows().filter(|a| !ids.contains(a)));
    let mut position = vec![0; src.arrow_count()];
    for (i, &a) in order.iter().enumerate() {
        position[a.0] = i;
    }
    // composition triples, checked once the last of them is assigned
    let mut triples: Vec<Vec<(ArrowId, ArrowId, ArrowId)>> = vec![Vec::new(); order.len()];
    for y in src.objects() {
        for &f in src.arrows_to(y) {
            for &g in src.arrows_from(y) {
                let h = src.compose(g, f).expect("composable");
                let last = position[f.0].max(position[g.0]).max(position[h.0]);
                triples[last].push((g, f, h));
            }
        }
    }
    let mut state = Search {
        src,
        tgt,
        order,
        triples,
        objects: vec![None; src.object_count()],
        arrows: vec![None; src.arrow_count()],
        out: Vec::new(),
        limit,
    };
    state.run(0);
    state.out
}

struct Search<'a, S: ?Sized, T: ?Sized> {
    src: &'a S,
    tgt: &'a T,
    order: Vec<ArrowId>,
    triples: Vec<Vec<(ArrowId, ArrowId, ArrowId)>>,
    objects: Vec<Option<ObjId>>,
    arrows: Vec<Option<ArrowId>>,
    out: Vec<Functor>,
    limit: usize,
}

impl<S: OverFinStar + ?Sized, T: OverFinStar + ?Sized> Search<'_, S, T> {
    fn candidates(&self, a: ArrowId) -> Vec<ArrowId> {
        let (s, t) = (self.src.source(a), self.src.target(a));
        match self.objects[s.0] {
            None => {
                // only identities reach here: choose the image object
                let n = self.src.arity_of(s);
                self.tgt.objects().filter(|&y| self.tgt.arity_of(y) == n).map(|y| self.tgt.identity(y)).collect()
            }
            Some(fs) => {
                let map = self.src.base_map(a);
                self.tgt
                    .arrows_from(fs)
                    .iter()
                    .copied()
                    .filter(|&b| self.tgt.base_map(b) == map)
                    .filter(|&b| self.objects[t.0].map_or(true, |ft| self.tgt.target(b) == ft))
                    .collect()
            }
        }
    }

    fn consistent(&self, i: usize) -> bool {
        self.triples[i].iter().all(|&(g, f, h)| {
            let get = |a: ArrowId| self.arrows[a.0].expect("assigned");
            self.tgt.compose(get(g), get(f)) == Some(get(h))
        })
    }

    fn run(&mut self, i: usize) {
        if self.out.len() >= self.limit {
            return;
        }
        if i == self.order.len() {
            self.out.push(Functor {
                objects: self.objects.iter().map(|x| x.expect("assigned")).collect(),
                arrows: self.arrows.iter().map(|a| a.expect("assigned")).collect(),
            });
            return;
        }
        let a = self.order[i];
        let t = self.src.target(a);
        for b in self.candidates(a) {
            let fresh = self.objects[t.0].is_none();
            if fresh {
                self.objects[t.0] = Some(self.tgt.target(b));
            }
            self.arrows[a.0] = Some(b);
            if self.consistent(i) {
                self.run(i + 1);
            }
            self.arrows[a.0] = None;
            if fresh {
                self.objects[t.0] = None;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::category::i_local_check;
    use crate::operad::{library, OperadMap};
    use crate::operators::OperatorCategory;

    #[test]
    fn extension_counts() {
        let f = PointedMap::projection(2, 1).unwrap();
        let h = PointedMap::new(2, vec![2, 0]).unwrap();
        assert_eq!(extension_count(&f, &h), 1);
        let h = PointedMap::new(2, vec![2, 1]).unwrap();
        assert_eq!(extension_count(&f, &h), 0);
        let f = PointedMap::new(2, vec![1]).unwrap();
        let h = PointedMap::new(1, vec![1]).unwrap();
        assert_eq!(extension_count(&f, &h), 2);
    }

    #[test]
    fn non_invertible_unary_is_not_cocartesian() {
        let c = OperatorCategory::new(Arc::new(library::arrow(2)), 2).unwrap();
        let a = c.object_of(&[crate::operad::Color(0)]).unwrap();
        let over_id = c.arrows_over(a, &PointedMap::identity(1));
        assert_eq!(over_id.len(), 2);
        for f in over_id {
            assert_eq!(is_cocartesian(&c, f), c.target(f) == a);
        }
    }

    #[test]
    fn everything_is_cocartesian_over_comm() {
        let c = OperatorCategory::new(Arc::new(library::comm(3)), 3).unwrap();
        assert!(c.arrows().all(|a| is_cocartesian(&c, a)));
    }

    #[test]
    fn identity_is_an_operad_map() {
        for (name, p) in library::all(2) {
            let c = OperatorCategory::build(Arc::new(p), 2).unwrap();
            assert!(is_operad_map(&c, &c, &Functor::identity(&c)).is_ok(), "{name}");
        }
    }

    #[test]
    fn operad_maps_induce_operad_maps() {
        let src = Arc::new(library::arrow(2));
        let tgt = Arc::new(library::comm(2));
        let m = OperadMap::from_color_map(&src, &tgt, vec![crate::operad::Color(0); 2]).unwrap();
        m.check(&src, &tgt).unwrap();
        let (s, t) = (OperatorCategory::build(src, 2).unwrap(), OperatorCategory::build(tgt, 2).unwrap());
        let f = s.induced_functor(&m, &t).unwrap();
        assert!(is_operad_map(&s, &t, &f).is_ok());
    }

    #[test]
    fn functor_search_finds_non_operad_maps() {
        // Functors over the base between small categories of operators, some
        // of which send an inert lift to an arrow that is not coCartesian.
        let src = OperatorCategory::build(Arc::new(library::initial(1, 2)), 2).unwrap();
        let tgt = OperatorCategory::build(Arc::new(library::z2_sets(2)), 2).unwrap();
        let all = enumerate_functors_over(&src, &tgt, usize::MAX);
        assert!(!all.is_empty());
        for f in &all {
            check_functor(&src, &tgt, f).unwrap();
        }
        let maps = all.iter().filter(|f| is_operad_map(&src, &tgt, f).is_ok()).count();
        assert!(maps >= 1);
    }

    #[test]
    fn identity_fibration_is_operadic_and_i_local() {
        let c = OperatorCategory::build(Arc::new(library::comm2(2)), 2).unwrap();
        let id = Functor::identity(&c);
        assert!(is_operadic_left_fibration(&c, &c, &id).is_ok());
        assert!(i_local_check(&c, &c, &id, 3).is_ok());
    }
}
