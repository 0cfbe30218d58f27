use std::collections::HashMap;

use thiserror::Error;

use super::{Adjacency, ArrowId, Category, Functor, ObjId};

/// A functor from a finite category to finite sets: a size per object and a
/// function per arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFunctor {
    pub sizes: Vec<usize>,
    pub maps: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetFunctorError {
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("arrow {0:?} is not a function between the assigned sets")]
    NotAFunction(ArrowId),
    #[error("identity of {0:?} acts non-trivially")]
    Identity(ObjId),
    #[error("composite {g:?} ∘ {f:?} is not preserved")]
    Composition { g: ArrowId, f: ArrowId },
}

impl SetFunctor {
    pub fn check<B: Category + ?Sized>(&self, base: &B) -> Result<(), SetFunctorError> {
        if self.sizes.len() != base.object_count() {
            return Err(SetFunctorError::Shape { expected: base.object_count(), found: self.sizes.len() });
        }
        if self.maps.len() != base.arrow_count() {
            return Err(SetFunctorError::Shape { expected: base.arrow_count(), found: self.maps.len() });
        }
        for a in base.arrows() {
            let m = &self.maps[a.0];
            let (s, t) = (self.sizes[base.source(a).0], self.sizes[base.target(a).0]);
            if m.len() != s || m.iter().any(|&v| v >= t) {
                return Err(SetFunctorError::NotAFunction(a));
            }
        }
        for x in base.objects() {
            if self.maps[base.identity(x).0].iter().enumerate().any(|(i, &v)| i != v) {
                return Err(SetFunctorError::Identity(x));
            }
        }
        for y in base.objects() {
            for &f in base.arrows_to(y) {
                for &g in base.arrows_from(y) {
                    let h = base.compose(g, f).expect("composable");
                    let ok = self.maps[f.0].iter().zip(&self.maps[h.0]).all(|(&v, &w)| self.maps[g.0][v] == w);
                    if !ok {
                        return Err(SetFunctorError::Composition { g, f });
                    }
                }
            }
        }
        Ok(())
    }
}

/// The category of elements `∫F`: objects `(x, s)` with `s ∈ F(x)`, arrows
/// `(a, s): (x, s) → (y, F(a)(s))`.
pub struct ElementsCategory<B> {
    base: B,
    functor: SetFunctor,
    objects: Vec<(ObjId, usize)>,
    object_index: HashMap<(ObjId, usize), ObjId>,
    arrows: Vec<(ArrowId, usize)>,
    arrow_index: HashMap<(ArrowId, usize), ArrowId>,
    adj: Adjacency,
}

impl<B: Category> ElementsCategory<B> {
    pub fn new(base: B, functor: SetFunctor) -> Result<Self, SetFunctorError> {
        functor.check(&base)?;
        let mut objects = Vec::new();
        let mut object_index = HashMap::new();
        for x in base.objects() {
            for s in 0..functor.sizes[x.0] {
                object_index.insert((x, s), ObjId(objects.len()));
                objects.push((x, s));
            }
        }
        let mut adj = Adjacency::with_objects(objects.len());
        let mut arrows = Vec::new();
        let mut arrow_index = HashMap::new();
        for (i, &(x, s)) in objects.iter().enumerate() {
            for &a in base.arrows_from(x) {
                let t = object_index[&(base.target(a), functor.maps[a.0][s])];
                let id = adj.add_arrow(ObjId(i), t);
                if a == base.identity(x) {
                    adj.set_identity(ObjId(i), id);
                }
                arrow_index.insert((a, s), id);
                arrows.push((a, s));
            }
        }
        Ok(ElementsCategory { base, functor, objects, object_index, arrows, arrow_index, adj })
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn functor(&self) -> &SetFunctor {
        &self.functor
    }

    pub fn element(&self, x: ObjId) -> (ObjId, usize) {
        self.objects[x.0]
    }

    pub fn object_of(&self, x: ObjId, s: usize) -> Option<ObjId> {
        self.object_index.get(&(x, s)).copied()
    }

    pub fn arrow_of(&self, a: ArrowId, s: usize) -> Option<ArrowId> {
        self.arrow_index.get(&(a, s)).copied()
    }

    pub fn projection(&self) -> Functor {
        Functor {
            objects: self.objects.iter().map(|p| p.0).collect(),
            arrows: self.arrows.iter().map(|p| p.0).collect(),
        }
    }
}

impl<B: Category> Category for ElementsCategory<B> {
    fn object_count(&self) -> usize {
        self.adj.object_count()
    }
    fn arrow_count(&self) -> usize {
        self.adj.arrow_count()
    }
    fn source(&self, a: ArrowId) -> ObjId {
        self.adj.source(a)
    }
    fn target(&self, a: ArrowId) -> ObjId {
        self.adj.target(a)
    }
    fn identity(&self, x: ObjId) -> ArrowId {
        self.adj.identity(x)
    }
    fn compose(&self, g: ArrowId, f: ArrowId) -> Option<ArrowId> {
        if self.adj.target(f) != self.adj.source(g) {
            return None;
        }
        let (a, s) = self.arrows[f.0];
        let h = self.base.compose(self.arrows[g.0].0, a)?;
        self.arrow_of(h, s)
    }
    fn arrows_from(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_from(x)
    }
    fn arrows_to(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_to(x)
    }
    fn object_label(&self, x: ObjId) -> String {
        let (b, s) = self.objects[x.0];
        format!("({}, {s})", self.base.object_label(b))
    }
    fn arrow_label(&self, a: ArrowId) -> String {
        let (b, s) = self.arrows[a.0];
        format!("({}, {s})", self.base.arrow_label(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{check_category, is_discrete_opfibration, FinCategory};

    #[test]
    fn elements_of_a_functor_on_a_poset_is_an_opfibration() {
        // 0 ≤ 1 ≤ 2 with F = 3 → 2 → 1
        let base = FinCategory::poset(3, |i, j| i <= j).unwrap();
        let value = |a: ArrowId| -> Vec<usize> {
            let (s, t) = (base.source(a).0, base.target(a).0);
            let size = [3, 2, 1][s];
            (0..size).map(|v| if s == t { v } else if t == 2 { 0 } else { v.min(1) }).collect()
        };
        let f = SetFunctor { sizes: vec![3, 2, 1], maps: base.arrows().map(value).collect() };
        let el = ElementsCategory::new(&base, f).unwrap();
        check_category(&el).unwrap();
        assert_eq!(el.object_count(), 6);
        assert!(is_discrete_opfibration(&el, &base, &el.projection()).is_ok());
    }

    #[test]
    fn non_functorial_assignment_rejected() {
        let base = crate::category::tests::walking_arrow();
        let f = SetFunctor { sizes: vec![1, 1], maps: vec![vec![0], vec![0], vec![1]] };
        assert!(ElementsCategory::new(&base, f).is_err());
    }
}
