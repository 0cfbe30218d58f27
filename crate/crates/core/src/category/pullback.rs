use std::collections::HashMap;

use thiserror::Error;

use super::{Adjacency, ArrowId, Category, Functor, ObjId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PullbackError {
    #[error("mismatched targets: the {side} functor does not land in the given base")]
    MismatchedTargets { side: &'static str },
}

/// Strict fiber product `A ×_B C` of `f: A → B` and `g: C → B`.
pub struct Pullback<A, C> {
    left: A,
    right: C,
    objects: Vec<(ObjId, ObjId)>,
    object_index: HashMap<(ObjId, ObjId), ObjId>,
    arrows: Vec<(ArrowId, ArrowId)>,
    arrow_index: HashMap<(ArrowId, ArrowId), ArrowId>,
    adj: Adjacency,
}

fn lands_in<S: Category, B: Category + ?Sized>(src: &S, base: &B, f: &Functor) -> bool {
    f.objects.len() == src.object_count()
        && f.arrows.len() == src.arrow_count()
        && f.objects.iter().all(|x| x.0 < base.object_count())
        && src.arrows().all(|a| {
            let fa = f.arr(a);
            fa.0 < base.arrow_count()
                && base.source(fa) == f.obj(src.source(a))
                && base.target(fa) == f.obj(src.target(a))
        })
}

impl<A: Category, C: Category> Pullback<A, C> {
    pub fn new<B: Category + ?Sized>(
        left: A,
        f: &Functor,
        right: C,
        g: &Functor,
        base: &B,
    ) -> Result<Self, PullbackError> {
        if !lands_in(&left, base, f) {
            return Err(PullbackError::MismatchedTargets { side: "left" });
        }
        if !lands_in(&right, base, g) {
            return Err(PullbackError::MismatchedTargets { side: "right" });
        }
        let mut right_over: Vec<Vec<ObjId>> = vec![Vec::new(); base.object_count()];
        for c in right.objects() {
            right_over[g.obj(c).0].push(c);
        }
        let mut objects = Vec::new();
        let mut object_index = HashMap::new();
        for a in left.objects() {
            for &c in &right_over[f.obj(a).0] {
                object_index.insert((a, c), ObjId(objects.len()));
                objects.push((a, c));
            }
        }
        let mut adj = Adjacency::with_objects(objects.len());
        let mut arrows = Vec::new();
        let mut arrow_index = HashMap::new();
        for (i, &(a, c)) in objects.iter().enumerate() {
            let mut by_image: HashMap<ArrowId, Vec<ArrowId>> = HashMap::new();
            for &v in right.arrows_from(c) {
                by_image.entry(g.arr(v)).or_default().push(v);
            }
            for &u in left.arrows_from(a) {
                let Some(vs) = by_image.get(&f.arr(u)) else { continue };
                for &v in vs {
                    let t = object_index[&(left.target(u), right.target(v))];
                    let id = adj.add_arrow(ObjId(i), t);
                    if u == left.identity(a) && v == right.identity(c) {
                        adj.set_identity(ObjId(i), id);
                    }
                    arrow_index.insert((u, v), id);
                    arrows.push((u, v));
                }
            }
        }
        Ok(Pullback { left, right, objects, object_index, arrows, arrow_index, adj })
    }

    pub fn left(&self) -> &A {
        &self.left
    }

    pub fn right(&self) -> &C {
        &self.right
    }

    pub fn pair(&self, x: ObjId) -> (ObjId, ObjId) {
        self.objects[x.0]
    }

    pub fn arrow_pair(&self, a: ArrowId) -> (ArrowId, ArrowId) {
        self.arrows[a.0]
    }

    pub fn object_of(&self, a: ObjId, c: ObjId) -> Option<ObjId> {
        self.object_index.get(&(a, c)).copied()
    }

    pub fn arrow_of(&self, u: ArrowId, v: ArrowId) -> Option<ArrowId> {
        self.arrow_index.get(&(u, v)).copied()
    }

    pub fn left_projection(&self) -> Functor {
        Functor {
            objects: self.objects.iter().map(|p| p.0).collect(),
            arrows: self.arrows.iter().map(|p| p.0).collect(),
        }
    }

    pub fn right_projection(&self) -> Functor {
        Functor {
            objects: self.objects.iter().map(|p| p.1).collect(),
            arrows: self.arrows.iter().map(|p| p.1).collect(),
        }
    }
}

impl<A: Category, C: Category> Category for Pullback<A, C> {
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
        let (g1, g2) = self.arrows[g.0];
        let (f1, f2) = self.arrows[f.0];
        let h1 = self.left.compose(g1, f1)?;
        let h2 = self.right.compose(g2, f2)?;
        self.arrow_of(h1, h2)
    }
    fn arrows_from(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_from(x)
    }
    fn arrows_to(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_to(x)
    }
    fn object_label(&self, x: ObjId) -> String {
        let (a, c) = self.objects[x.0];
        format!("({}, {})", self.left.object_label(a), self.right.object_label(c))
    }
    fn arrow_label(&self, x: ArrowId) -> String {
        let (u, v) = self.arrows[x.0];
        format!("({}, {})", self.left.arrow_label(u), self.right.arrow_label(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{check_category, check_functor, iso_check, FinCategory};

    #[test]
    fn pullback_along_identities() {
        let c = FinCategory::poset(3, |i, j| i <= j).unwrap();
        let id = Functor::identity(&c);
        let p = Pullback::new(&c, &id, &c, &id, &c).unwrap();
        check_category(&p).unwrap();
        assert!(iso_check(&p, &c, &p.left_projection()));
    }

    #[test]
    fn projections_commute() {
        let c = FinCategory::poset(3, |i, j| i <= j).unwrap();
        let b = crate::category::tests::walking_arrow();
        // collapse 0,1 to a and 2 to b
        let side = |x: ObjId| ObjId(usize::from(x.0 == 2));
        let f = Functor {
            objects: vec![ObjId(0), ObjId(0), ObjId(1)],
            arrows: c
                .arrows()
                .map(|a| b.hom(side(c.source(a)), side(c.target(a)))[0])
                .collect(),
        };
        check_functor(&c, &b, &f).unwrap();
        let p = Pullback::new(&c, &f, &c, &f, &b).unwrap();
        check_category(&p).unwrap();
        let (l, r) = (p.left_projection(), p.right_projection());
        check_functor(&p, &c, &l).unwrap();
        assert_eq!(f.after(&l), f.after(&r));
        assert_eq!(p.object_count(), 2 * 2 + 1);
    }

    #[test]
    fn mismatched_targets() {
        let c = FinCategory::poset(2, |i, j| i <= j).unwrap();
        let mut t = FinCategory::builder();
        t.object("*");
        let point = t.build().unwrap();
        let bad = Functor { objects: vec![ObjId(0), ObjId(3)], arrows: vec![ArrowId(0); 3] };
        let id = Functor::identity(&c);
        assert!(Pullback::new(&c, &bad, &c, &id, &point).is_err());
    }
}
