use std::collections::HashMap;

use thiserror::Error;

use super::{Adjacency, ArrowId, Category, FinCategory, ObjId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("object {object} is not in a category with {count} objects")]
pub struct MissingObject {
    pub object: usize,
    pub count: usize,
}

/// The slice `C_{/x}`: objects are arrows `h: y → x`, arrows `(y,h) → (y',h')`
/// are arrows `k: y → y'` with `h' ∘ k = h`.
pub struct Slice<'a, C: ?Sized> {
    base: &'a C,
    apex: ObjId,
    objects: Vec<ArrowId>,
    object_index: HashMap<ArrowId, ObjId>,
    arrows: Vec<ArrowId>,
    arrow_index: HashMap<(ArrowId, ObjId), ArrowId>,
    adj: Adjacency,
}

impl<'a, C: Category + ?Sized> Slice<'a, C> {
    pub fn new(base: &'a C, apex: ObjId) -> Result<Self, MissingObject> {
        if apex.0 >= base.object_count() {
            return Err(MissingObject { object: apex.0, count: base.object_count() });
        }
        let objects: Vec<ArrowId> = base.arrows_to(apex).to_vec();
        let object_index: HashMap<ArrowId, ObjId> =
            objects.iter().enumerate().map(|(i, &h)| (h, ObjId(i))).collect();
        let mut adj = Adjacency::with_objects(objects.len());
        let mut arrows = Vec::new();
        let mut arrow_index = HashMap::new();
        for (i, &h) in objects.iter().enumerate() {
            for &k in base.arrows_from(base.source(h)) {
                for &h2 in base.arrows_from(base.target(k)) {
                    if base.target(h2) != apex || base.compose(h2, k) != Some(h) {
                        continue;
                    }
                    let t = object_index[&h2];
                    let a = adj.add_arrow(ObjId(i), t);
                    if k == base.identity(base.source(h)) {
                        adj.set_identity(ObjId(i), a);
                    }
                    arrows.push(k);
                    arrow_index.insert((k, t), a);
                }
            }
        }
        Ok(Slice { base, apex, objects, object_index, arrows, arrow_index, adj })
    }

    pub fn apex(&self) -> ObjId {
        self.apex
    }

    /// The arrow into the apex represented by a slice object.
    pub fn structure_arrow(&self, x: ObjId) -> ArrowId {
        self.objects[x.0]
    }

    pub fn object_of(&self, h: ArrowId) -> Option<ObjId> {
        self.object_index.get(&h).copied()
    }

    /// The underlying arrow of the base.
    pub fn underlying(&self, a: ArrowId) -> ArrowId {
        self.arrows[a.0]
    }

    /// The forgetful functor to the base, as object and arrow assignments.
    pub fn forget(&self) -> super::Functor {
        super::Functor {
            objects: self.objects.iter().map(|&h| self.base.source(h)).collect(),
            arrows: self.arrows.clone(),
        }
    }

    /// The terminal object `(x, id_x)`.
    pub fn terminal(&self) -> ObjId {
        self.object_index[&self.base.identity(self.apex)]
    }
}

impl<C: Category + ?Sized> Category for Slice<'_, C> {
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
        let k = self.base.compose(self.arrows[g.0], self.arrows[f.0])?;
        self.arrow_index.get(&(k, self.adj.target(g))).copied()
    }
    fn arrows_from(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_from(x)
    }
    fn arrows_to(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_to(x)
    }
    fn object_label(&self, x: ObjId) -> String {
        self.base.arrow_label(self.objects[x.0])
    }
    fn arrow_label(&self, a: ArrowId) -> String {
        self.base.arrow_label(self.arrows[a.0])
    }
}

/// The slice `C_{/x}` copied into table form.
pub fn comma_slice<C: Category + ?Sized>(c: &C, x: ObjId) -> Result<FinCategory, MissingObject> {
    Ok(FinCategory::materialize(&Slice::new(c, x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{check_category, iso_check, Functor};

    #[test]
    fn slice_of_walking_arrow_over_target() {
        let c = crate::category::tests::walking_arrow();
        let s = comma_slice(&c, ObjId(1)).unwrap();
        assert_eq!(s.object_count(), 2);
        assert_eq!(s.arrow_count(), 3);
        check_category(&s).unwrap();
    }

    #[test]
    fn slice_of_terminal_category() {
        let mut b = FinCategory::builder();
        b.object("*");
        let t = b.build().unwrap();
        let s = comma_slice(&t, ObjId(0)).unwrap();
        assert!(iso_check(&s, &t, &Functor::identity(&t)));
    }

    #[test]
    fn missing_apex() {
        let c = crate::category::tests::walking_arrow();
        assert_eq!(Slice::new(&c, ObjId(5)).err(), Some(MissingObject { object: 5, count: 2 }));
    }

    #[test]
    fn identity_is_terminal() {
        let c = FinCategory::poset(4, |i, j| i == j || (i < j && j != 3) || (i == 0)).unwrap();
        for x in c.objects() {
            let s = Slice::new(&c, x).unwrap();
            let t = s.terminal();
            for y in s.objects() {
                assert_eq!(s.hom(y, t).len(), 1);
            }
        }
    }
}
