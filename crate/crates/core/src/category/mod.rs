//! Finite categories, functors between them, and the constructions the rest
//! of the crate is assembled from: slices, strict pullbacks, categories of
//! elements, connected components and unique-lifting queries.
//!
//! Every category exposes its objects and arrows as dense integer ids. Large
//! categories (categories of operators, envelopes) compose on demand instead
//! of storing a composition table.

mod components;
mod elements;
mod fibration;
mod pullback;
mod slice;
mod table;

pub use components::{connected_components, Components};
pub use elements::{ElementsCategory, SetFunctor};
pub use fibration::{
    fiber_functor, i_local_check, is_discrete_opfibration, unique_lift, ChainFailure, FiberFunctor,
    LiftFailure,
};
pub use pullback::{Pullback, PullbackError};
pub use slice::{comma_slice, MissingObject, Slice};
pub use table::{dump, FinCategory, FinCategoryBuilder, ParseDumpError};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ObjId(pub usize);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ArrowId(pub usize);

impl fmt::Debug for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

impl fmt::Debug for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// A finite category with dense object and arrow ids.
pub trait Category {
    fn object_count(&self) -> usize;
    fn arrow_count(&self) -> usize;
    fn source(&self, a: ArrowId) -> ObjId;
    fn target(&self, a: ArrowId) -> ObjId;
    fn identity(&self, x: ObjId) -> ArrowId;
    /// `g ∘ f`, or `None` when `target(f) != source(g)`.
    fn compose(&self, g: ArrowId, f: ArrowId) -> Option<ArrowId>;
    fn arrows_from(&self, x: ObjId) -> &[ArrowId];
    fn arrows_to(&self, x: ObjId) -> &[ArrowId];

    fn object_label(&self, x: ObjId) -> String {
        format!("{}", x.0)
    }

    fn arrow_label(&self, a: ArrowId) -> String {
        format!("{}", a.0)
    }

    fn objects(&self) -> std::iter::Map<std::ops::Range<usize>, fn(usize) -> ObjId> {
        (0..self.object_count()).map(ObjId as fn(usize) -> ObjId)
    }

    fn arrows(&self) -> std::iter::Map<std::ops::Range<usize>, fn(usize) -> ArrowId> {
        (0..self.arrow_count()).map(ArrowId as fn(usize) -> ArrowId)
    }

    /// Arrows `x → y`.
    fn hom(&self, x: ObjId, y: ObjId) -> Vec<ArrowId> {
        self.arrows_from(x).iter().copied().filter(|&a| self.target(a) == y).collect()
    }
}

impl<C: Category + ?Sized> Category for &C {
    fn object_count(&self) -> usize {
        (**self).object_count()
    }
    fn arrow_count(&self) -> usize {
        (**self).arrow_count()
    }
    fn source(&self, a: ArrowId) -> ObjId {
        (**self).source(a)
    }
    fn target(&self, a: ArrowId) -> ObjId {
        (**self).target(a)
    }
    fn identity(&self, x: ObjId) -> ArrowId {
        (**self).identity(x)
    }
    fn compose(&self, g: ArrowId, f: ArrowId) -> Option<ArrowId> {
        (**self).compose(g, f)
    }
    fn arrows_from(&self, x: ObjId) -> &[ArrowId] {
        (**self).arrows_from(x)
    }
    fn arrows_to(&self, x: ObjId) -> &[ArrowId] {
        (**self).arrows_to(x)
    }
    fn object_label(&self, x: ObjId) -> String {
        (**self).object_label(x)
    }
    fn arrow_label(&self, a: ArrowId) -> String {
        (**self).arrow_label(a)
    }
}

/// Source/target bookkeeping shared by the concrete categories.
#[derive(Clone, Debug, Default)]
pub struct Adjacency {
    src: Vec<ObjId>,
    tgt: Vec<ObjId>,
    out: Vec<Vec<ArrowId>>,
    inc: Vec<Vec<ArrowId>>,
    ident: Vec<ArrowId>,
}

impl Adjacency {
    pub fn with_objects(n: usize) -> Self {
        Adjacency {
            src: Vec::new(),
            tgt: Vec::new(),
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
            ident: vec![ArrowId(usize::MAX); n],
        }
    }

    pub fn add_object(&mut self) -> ObjId {
        self.out.push(Vec::new());
        self.inc.push(Vec::new());
        self.ident.push(ArrowId(usize::MAX));
        ObjId(self.out.len() - 1)
    }

    pub fn add_arrow(&mut self, s: ObjId, t: ObjId) -> ArrowId {
        let a = ArrowId(self.src.len());
        self.src.push(s);
        self.tgt.push(t);
        self.out[s.0].push(a);
        self.inc[t.0].push(a);
        a
    }

    pub fn set_identity(&mut self, x: ObjId, a: ArrowId) {
        self.ident[x.0] = a;
    }

    pub fn object_count(&self) -> usize {
        self.out.len()
    }
    pub fn arrow_count(&self) -> usize {
        self.src.len()
    }
    pub fn source(&self, a: ArrowId) -> ObjId {
        self.src[a.0]
    }
    pub fn target(&self, a: ArrowId) -> ObjId {
        self.tgt[a.0]
    }
    pub fn identity(&self, x: ObjId) -> ArrowId {
        self.ident[x.0]
    }
    pub fn arrows_from(&self, x: ObjId) -> &[ArrowId] {
        &self.out[x.0]
    }
    pub fn arrows_to(&self, x: ObjId) -> &[ArrowId] {
        &self.inc[x.0]
    }
}

/// Object and arrow assignment of a functor; the categories themselves are
/// passed alongside whenever a check needs them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Functor {
    pub objects: Vec<ObjId>,
    pub arrows: Vec<ArrowId>,
}

impl Functor {
    pub fn identity<C: Category + ?Sized>(c: &C) -> Self {
        Functor {
            objects: (0..c.object_count()).map(ObjId).collect(),
            arrows: (0..c.arrow_count()).map(ArrowId).collect(),
        }
    }

    pub fn obj(&self, x: ObjId) -> ObjId {
        self.objects[x.0]
    }

    pub fn arr(&self, a: ArrowId) -> ArrowId {
        self.arrows[a.0]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Functor) -> Functor {
        Functor {
            objects: first.objects.iter().map(|&x| self.obj(x)).collect(),
            arrows: first.arrows.iter().map(|&a| self.arr(a)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorViolation {
    #[error("functor has {found} {what} images, category has {expected}")]
    Arity { what: &'static str, found: usize, expected: usize },
    #[error("image {image} of {what} {index} is out of range")]
    OutOfRange { what: &'static str, index: usize, image: usize },
    #[error("arrow {0:?} is not sent to an arrow between the images of its endpoints")]
    Endpoints(ArrowId),
    #[error("identity of {0:?} is not preserved")]
    Identity(ObjId),
    #[error("composite {g:?} ∘ {f:?} is not preserved")]
    Composition { g: ArrowId, f: ArrowId },
}

/// Exhaustively checks that `f` is a functor `src → tgt`.
pub fn check_functor<S, T>(src: &S, tgt: &T, f: &Functor) -> Result<(), FunctorViolation>
where
    S: Category + ?Sized,
    T: Category + ?Sized,
{
    if f.objects.len() != src.object_count() {
        return Err(FunctorViolation::Arity {
            what: "object",
            found: f.objects.len(),
            expected: src.object_count(),
        });
    }
    if f.arrows.len() != src.arrow_count() {
        return Err(FunctorViolation::Arity {
            what: "arrow",
            found: f.arrows.len(),
            expected: src.arrow_count(),
        });
    }
    for (i, x) in f.objects.iter().enumerate() {
        if x.0 >= tgt.object_count() {
            return Err(FunctorViolation::OutOfRange { what: "object", index: i, image: x.0 });
        }
    }
    for (i, a) in f.arrows.iter().enumerate() {
        if a.0 >= tgt.arrow_count() {
            return Err(FunctorViolation::OutOfRange { what: "arrow", index: i, image: a.0 });
        }
    }
    for a in src.arrows() {
        let fa = f.arr(a);
        if tgt.source(fa) != f.obj(src.source(a)) || tgt.target(fa) != f.obj(src.target(a)) {
            return Err(FunctorViolation::Endpoints(a));
        }
    }
    for x in src.objects() {
        if f.arr(src.identity(x)) != tgt.identity(f.obj(x)) {
            return Err(FunctorViolation::Identity(x));
        }
    }
    for y in src.objects() {
        for &fa in src.arrows_to(y) {
            for &g in src.arrows_from(y) {
                let h = src.compose(g, fa).expect("composable");
                if tgt.compose(f.arr(g), f.arr(fa)) != Some(f.arr(h)) {
                    return Err(FunctorViolation::Composition { g, f: fa });
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryViolation {
    #[error("identity of {0:?} has wrong endpoints")]
    IdentityEndpoints(ObjId),
    #[error("composite {g:?} ∘ {f:?} missing or with wrong endpoints")]
    Composite { g: ArrowId, f: ArrowId },
    #[error("identity law fails for {0:?}")]
    Unit(ArrowId),
    #[error("associativity fails for {h:?} ∘ {g:?} ∘ {f:?}")]
    Associativity { h: ArrowId, g: ArrowId, f: ArrowId },
}

/// Exhaustive unit and associativity check. Cubic in the arrow count; meant
/// for small categories.
pub fn check_category<C: Category + ?Sized>(c: &C) -> Result<(), CategoryViolation> {
    for x in c.objects() {
        let i = c.identity(x);
        if c.source(i) != x || c.target(i) != x {
            return Err(CategoryViolation::IdentityEndpoints(x));
        }
    }
    for a in c.arrows() {
        let (s, t) = (c.source(a), c.target(a));
        if c.compose(a, c.identity(s)) != Some(a) || c.compose(c.identity(t), a) != Some(a) {
            return Err(CategoryViolation::Unit(a));
        }
    }
    for y in c.objects() {
        for &f in c.arrows_to(y) {
            for &g in c.arrows_from(y) {
                match c.compose(g, f) {
                    Some(h) if c.source(h) == c.source(f) && c.target(h) == c.target(g) => {}
                    _ => return Err(CategoryViolation::Composite { g, f }),
                }
                for &h in c.arrows_from(c.target(g)) {
                    let left = c.compose(h, c.compose(g, f).unwrap());
                    let right = c.compose(h, g).and_then(|hg| c.compose(hg, f));
                    if left != right {
                        return Err(CategoryViolation::Associativity { h, g, f });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Whether `f` is an isomorphism of categories: bijective on objects and
/// arrows, functorial, with a functorial inverse.
pub fn iso_check<S, T>(src: &S, tgt: &T, f: &Functor) -> bool
where
    S: Category + ?Sized,
    T: Category + ?Sized,
{
    // bijectivity first: the functor checks walk every composable pair
    if src.object_count() != tgt.object_count() || src.arrow_count() != tgt.arrow_count() {
        return false;
    }
    let Some(objects) = invert(&f.objects.iter().map(|x| x.0).collect::<Vec<_>>()) else {
        return false;
    };
    let Some(arrows) = invert(&f.arrows.iter().map(|a| a.0).collect::<Vec<_>>()) else {
        return false;
    };
    let inverse = Functor {
        objects: objects.into_iter().map(ObjId).collect(),
        arrows: arrows.into_iter().map(ArrowId).collect(),
    };
    check_functor(src, tgt, f).is_ok() && check_functor(tgt, src, &inverse).is_ok()
}

fn invert(map: &[usize]) -> Option<Vec<usize>> {
    let mut inv = vec![usize::MAX; map.len()];
    for (i, &y) in map.iter().enumerate() {
        if y >= map.len() || inv[y] != usize::MAX {
            return None;
        }
        inv[y] = i;
    }
    Some(inv)
}

/// Checks naturality of `components: F ⇒ G` for functors `src → tgt`.
pub fn check_natural_transformation<S, T>(
    src: &S,
    tgt: &T,
    f: &Functor,
    g: &Functor,
    components: &[ArrowId],
) -> Result<(), ArrowId>
where
    S: Category + ?Sized,
    T: Category + ?Sized,
{
    for x in src.objects() {
        let c = components[x.0];
        if tgt.source(c) != f.obj(x) || tgt.target(c) != g.obj(x) {
            return Err(src.identity(x));
        }
    }
    for a in src.arrows() {
        let (s, t) = (src.source(a), src.target(a));
        let left = tgt.compose(components[t.0], f.arr(a));
        let right = tgt.compose(g.arr(a), components[s.0]);
        if left.is_none() || left != right {
            return Err(a);
        }
    }
    Ok(())
}

/// Groups the arrows of `c` by their image under `f`.
pub fn arrows_by_image<C: Category + ?Sized>(c: &C, f: &Functor) -> HashMap<ArrowId, Vec<ArrowId>> {
    let mut out: HashMap<ArrowId, Vec<ArrowId>> = HashMap::new();
    for a in c.arrows() {
        out.entry(f.arr(a)).or_default().push(a);
    }
    out
}

/// Objects of `total` lying over `b`.
pub fn fiber<C: Category + ?Sized>(total: &C, proj: &Functor, b: ObjId) -> Vec<ObjId> {
    total.objects().filter(|&e| proj.obj(e) == b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn walking_arrow() -> FinCategory {
        let mut b = FinCategory::builder();
        let x = b.object("a");
        let y = b.object("b");
        b.arrow(x, y, "f");
        b.build().unwrap()
    }

    #[test]
    fn identity_is_iso_constant_is_not() {
        let c = walking_arrow();
        assert!(iso_check(&c, &c, &Functor::identity(&c)));

        let mut b = FinCategory::builder();
        b.object("a");
        b.object("b");
        let discrete = b.build().unwrap();
        let mut t = FinCategory::builder();
        t.object("*");
        let terminal = t.build().unwrap();
        let constant = Functor { objects: vec![ObjId(0), ObjId(0)], arrows: vec![ArrowId(0), ArrowId(0)] };
        assert!(check_functor(&discrete, &terminal, &constant).is_ok());
        assert!(!iso_check(&discrete, &terminal, &constant));
    }

    #[test]
    fn natural_transformation_on_walking_arrow() {
        // the arrow itself is a natural transformation from "constant at a" to "constant at b"
        let c = walking_arrow();
        let mut t = FinCategory::builder();
        t.object("*");
        let point = t.build().unwrap();
        let at = |x: usize| Functor { objects: vec![ObjId(x)], arrows: vec![c.identity(ObjId(x))] };
        let f_arrow = c.hom(ObjId(0), ObjId(1))[0];
        assert!(check_natural_transformation(&point, &c, &at(0), &at(1), &[f_arrow]).is_ok());
        assert!(check_natural_transformation(&point, &c, &at(1), &at(0), &[f_arrow]).is_err());
    }
}
