//! The symmetric monoidal envelope of an operad, materialized over the
//! truncated `Fin_*`.
//!
//! An object over `n_+` is a pair `(c, α)` of a color list of length `m` and
//! an active map `α: m_+ → n_+`. An arrow `(c, α) → (d, α')` over `v` is an
//! operator arrow `u: c → d` over some `f` with `α' ∘ f = v ∘ α`. The lists
//! are never normalized by the symmetry.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::category::{
    is_discrete_opfibration, unique_lift, Adjacency, ArrowId, Category, ElementsCategory, Functor, LiftFailure, ObjId,
    Pullback, SetFunctor,
};
use crate::operad::{Color, OperadMap};
use crate::operators::{is_operadic_left_fibration, FibrationFailure, OperatorCategory, OverFinStar};
use crate::pointed::{enumerate_active, PointedMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("the envelope needs the full category of operators, not its active part")]
    ActiveOnly,
    #[error("result needs lists of length {needed} but the horizon is {horizon}")]
    HorizonExceeded { needed: usize, horizon: usize },
    #[error("object {0:?} does not lie over 1_+")]
    NotOverOne(ObjId),
    #[error("underlying category differs from the active operators: {0}")]
    Underlying(String),
    #[error("tensor of {0:?} and {1:?} is not concatenation")]
    Tensor(ObjId, ObjId),
    #[error("not a discrete opfibration: {0}")]
    NotAFibration(#[from] LiftFailure),
    #[error("base change is not an operadic left fibration: {0}")]
    NotOperadic(#[from] FibrationFailure),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnvelopeObject {
    /// Object of the category of operators.
    pub list: ObjId,
    pub assignment: PointedMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeArrow {
    /// Arrow of the category of operators.
    pub op: ArrowId,
    pub base: PointedMap,
}

pub struct EnvelopeCategory {
    operators: OperatorCategory,
    objects: Vec<EnvelopeObject>,
    object_index: HashMap<EnvelopeObject, ObjId>,
    arrows: Vec<EnvelopeArrow>,
    arrow_index: HashMap<(ObjId, ArrowId, ObjId, PointedMap), ArrowId>,
    adj: Adjacency,
}

/// All `v: n_+ → n'_+` with `v ∘ alpha = h`, for `alpha: m_+ → n_+` and `h: m_+ → n'_+`.
fn solutions(alpha: &PointedMap, h: &PointedMap) -> Vec<PointedMap> {
    let (n, n2) = (alpha.target(), h.target());
    let mut fixed: Vec<Option<usize>> = vec![None; n + 1];
    for i in 1..=alpha.source() {
        let j = alpha.apply(i);
        match fixed[j] {
            Some(v) if v != h.apply(i) => return Vec::new(),
            _ => fixed[j] = Some(h.apply(i)),
        }
    }
    let mut out = vec![Vec::new()];
    for slot in &fixed[1..] {
        let choices: Vec<usize> = match slot {
            Some(v) => vec![*v],
            None => (0..=n2).collect(),
        };
        out = out.into_iter().flat_map(|p: Vec<usize>| choices.iter().map(move |&c| [&p[..], &[c]].concat())).collect();
    }
    out.into_iter().map(|image| PointedMap::new(n2, image).expect("in range")).collect()
}

/// Block sum of pointed maps: the `k`-th source block goes to the `k`-th target block.
fn block_sum(maps: &[&PointedMap]) -> PointedMap {
    let mut image = Vec::new();
    let mut offset = 0;
    for f in maps {
        image.extend(f.image().iter().map(|&j| if j == 0 { 0 } else { j + offset }));
        offset += f.target();
    }
    PointedMap::new(offset, image).expect("in range")
}

impl EnvelopeCategory {
    /// Builds the envelope and verifies that its underlying category is the
    /// active part of the operators and that tensor is concatenation.
    pub fn new(operators: OperatorCategory) -> Result<Self, EnvelopeError> {
        let active = OperatorCategory::active(operators.operad_arc().clone(), operators.horizon())
            .map_err(|e| EnvelopeError::Underlying(e.to_string()))?;
        let env = Self::build(operators)?;
        env.check_underlying(&active)?;
        env.check_tensor()?;
        Ok(env)
    }

    /// Builds without the invariant checks.
    pub fn build(operators: OperatorCategory) -> Result<Self, EnvelopeError> {
        if operators.is_active_only() {
            return Err(EnvelopeError::ActiveOnly);
        }
        let h = operators.horizon();
        let mut objects = Vec::new();
        let mut by_list: Vec<Vec<ObjId>> = vec![Vec::new(); operators.object_count()];
        for c in operators.objects() {
            let m = operators.arity_of(c);
            for n in 0..=h {
                for alpha in enumerate_active(m, n) {
                    by_list[c.0].push(ObjId(objects.len()));
                    objects.push(EnvelopeObject { list: c, assignment: alpha });
                }
            }
        }
        let object_index: HashMap<EnvelopeObject, ObjId> =
            objects.iter().enumerate().map(|(i, o)| (o.clone(), ObjId(i))).collect();
        let mut adj = Adjacency::with_objects(objects.len());
        let mut arrows = Vec::new();
        let mut arrow_index = HashMap::new();
        for (xi, x) in objects.iter().enumerate() {
            for &u in operators.arrows_from(x.list) {
                let f = operators.base_map(u);
                for &y in &by_list[operators.target(u).0] {
                    let alpha2 = &objects[y.0].assignment;
                    let h_map = alpha2.compose(f).expect("composable");
                    for v in solutions(&x.assignment, &h_map) {
                        let a = adj.add_arrow(ObjId(xi), y);
                        if y.0 == xi && u == operators.identity(x.list) && v == PointedMap::identity(v.source()) {
                            adj.set_identity(ObjId(xi), a);
                        }
                        arrow_index.insert((ObjId(xi), u, y, v.clone()), a);
                        arrows.push(EnvelopeArrow { op: u, base: v });
                    }
                }
            }
        }
        Ok(EnvelopeCategory { operators, objects, object_index, arrows, arrow_index, adj })
    }

    pub fn operators(&self) -> &OperatorCategory {
        &self.operators
    }

    pub fn object(&self, x: ObjId) -> &EnvelopeObject {
        &self.objects[x.0]
    }

    pub fn arrow(&self, a: ArrowId) -> &EnvelopeArrow {
        &self.arrows[a.0]
    }

    pub fn object_of(&self, list: ObjId, assignment: &PointedMap) -> Option<ObjId> {
        self.object_index.get(&EnvelopeObject { list, assignment: assignment.clone() }).copied()
    }

    pub fn arrow_of(&self, source: ObjId, op: ArrowId, target: ObjId, base: &PointedMap) -> Option<ArrowId> {
        self.arrow_index.get(&(source, op, target, base.clone())).copied()
    }

    pub fn colors_of(&self, x: ObjId) -> &[Color] {
        self.operators.list(self.objects[x.0].list)
    }

    /// The object `⟨c⟩` over `1_+`, when the list is within the horizon.
    pub fn underlying_object(&self, colors: &[Color]) -> Option<ObjId> {
        let list = self.operators.object_of(colors)?;
        self.object_of(list, &PointedMap::beta(colors.len()))
    }

    /// The object `⟨c⟩` over `m_+` with the identity assignment.
    pub fn unit_object(&self, list: ObjId) -> ObjId {
        let m = self.operators.arity_of(list);
        self.object_of(list, &PointedMap::identity(m)).expect("identity assignment")
    }

    /// The unit `O^⊗ → Env(O)^⊗`: `c ↦ (c, id)`, `u ↦ (u, f)`.
    pub fn unit(&self) -> Functor {
        let o = &self.operators;
        Functor {
            objects: o.objects().map(|c| self.unit_object(c)).collect(),
            arrows: o
                .arrows()
                .map(|u| {
                    let (s, t) = (self.unit_object(o.source(u)), self.unit_object(o.target(u)));
                    self.arrow_of(s, u, t, o.base_map(u)).expect("unit arrow present")
                })
                .collect(),
        }
    }

    /// The coCartesian lift of `v` from `x`: the canonical inert lift on the
    /// colors that survive, with the induced assignment.
    pub fn canonical_lift(&self, x: ObjId, v: &PointedMap) -> Option<ArrowId> {
        let EnvelopeObject { list, assignment } = &self.objects[x.0];
        if v.source() != assignment.target() {
            return None;
        }
        let hv = v.compose(assignment).ok()?;
        let keep: Vec<usize> = (1..=hv.source()).filter(|&i| hv.apply(i) != 0).collect();
        let mut g_image = vec![0; hv.source()];
        for (pos, &i) in keep.iter().enumerate() {
            g_image[i - 1] = pos + 1;
        }
        let g = PointedMap::new(keep.len(), g_image).ok()?;
        let alpha2 = PointedMap::new(v.target(), keep.iter().map(|&i| hv.apply(i)).collect()).ok()?;
        let u = self.operators.canonical_inert_lift(*list, &g)?;
        let y = self.object_of(self.operators.target(u), &alpha2)?;
        self.arrow_of(x, u, y, v)
    }

    /// `x_1 ⊕ .. ⊕ x_k`, the object over `(n_1 + .. + n_k)_+`.
    pub fn sum(&self, xs: &[ObjId]) -> Result<ObjId, EnvelopeError> {
        let colors: Vec<Color> = xs.iter().flat_map(|&x| self.colors_of(x).iter().copied()).collect();
        let n: usize = xs.iter().map(|&x| self.objects[x.0].assignment.target()).sum();
        let horizon = self.operators.horizon();
        if colors.len() > horizon || n > horizon {
            return Err(EnvelopeError::HorizonExceeded { needed: colors.len().max(n), horizon });
        }
        let maps: Vec<&PointedMap> = xs.iter().map(|&x| &self.objects[x.0].assignment).collect();
        let list = self.operators.object_of(&colors).expect("within horizon");
        Ok(self.object_of(list, &block_sum(&maps)).expect("active assignment"))
    }

    /// `β_!: (c, α) → (c, β)`, the arrow `(id, β)`.
    pub fn beta_shriek(&self, x: ObjId) -> ArrowId {
        let EnvelopeObject { list, assignment } = &self.objects[x.0];
        let y = self.object_of(*list, &PointedMap::beta(self.operators.arity_of(*list))).expect("β assignment");
        self.arrow_of(x, self.operators.identity(*list), y, &PointedMap::beta(assignment.target()))
            .expect("β_! present")
    }

    /// Tensor of objects over `1_+`, computed as `β_!` of their sum.
    pub fn tensor(&self, xs: &[ObjId]) -> Result<ObjId, EnvelopeError> {
        if let Some(&x) = xs.iter().find(|&&x| self.objects[x.0].assignment.target() != 1) {
            return Err(EnvelopeError::NotOverOne(x));
        }
        Ok(self.target(self.beta_shriek(self.sum(xs)?)))
    }

    pub fn check_tensor(&self) -> Result<(), EnvelopeError> {
        let over_one: Vec<ObjId> = self.objects().filter(|&x| self.objects[x.0].assignment.target() == 1).collect();
        for &x in &over_one {
            for &y in &over_one {
                let expected = [self.colors_of(x), self.colors_of(y)].concat();
                if expected.len() > self.operators.horizon() {
                    continue;
                }
                let t = self.tensor(&[x, y])?;
                if self.colors_of(t) != expected.as_slice() {
                    return Err(EnvelopeError::Tensor(x, y));
                }
            }
        }
        Ok(())
    }

    /// Verifies that the fiber over `1_+` is isomorphic to `active`, the
    /// active part of the operators at the same horizon, via `u ↦ (u, id)`.
    pub fn check_underlying(&self, active: &OperatorCategory) -> Result<(), EnvelopeError> {
        let fail = |s: String| Err(EnvelopeError::Underlying(s));
        let one = PointedMap::identity(1);
        let image_obj = |c: ObjId| {
            let list = self.operators.object_of(active.list(c))?;
            self.object_of(list, &PointedMap::beta(active.arity_of(c)))
        };
        let mut image = Vec::with_capacity(active.arrow_count());
        for a in active.arrows() {
            let arr = active.arrow(a);
            let (Some(s), Some(t)) = (image_obj(active.source(a)), image_obj(active.target(a))) else {
                return fail(format!("object of {a:?} has no image"));
            };
            let Some(u) = self.operators.arrow_of(self.objects[s.0].list, &arr.map, &arr.ops) else {
                return fail(format!("{a:?} has no operator arrow"));
            };
            match self.arrow_of(s, u, t, &one) {
                Some(e) => image.push(e),
                None => return fail(format!("{a:?} has no image")),
            }
        }
        let fiber_arrows: HashSet<ArrowId> = self
            .arrows()
            .filter(|&e| self.arrows[e.0].base == one)
            .collect();
        let distinct: HashSet<ArrowId> = image.iter().copied().collect();
        if distinct.len() != image.len() || distinct != fiber_arrows {
            return fail(format!("{} active arrows, {} arrows over id_1", image.len(), fiber_arrows.len()));
        }
        for y in active.objects() {
            for &f in active.arrows_to(y) {
                for &g in active.arrows_from(y) {
                    let h = active.compose(g, f).expect("composable");
                    if self.compose(image[g.0], image[f.0]) != Some(image[h.0]) {
                        return fail(format!("composite {g:?} ∘ {f:?} not preserved"));
                    }
                }
            }
        }
        Ok(())
    }

    /// The envelope map induced by an operad map, given the envelope of the
    /// target at the same horizon.
    pub fn induced_functor(&self, map: &OperadMap, target: &EnvelopeCategory) -> Option<Functor> {
        let ops = self.operators.induced_functor(map, &target.operators)?;
        let objects = self
            .objects
            .iter()
            .map(|o| target.object_of(ops.obj(o.list), &o.assignment))
            .collect::<Option<Vec<_>>>()?;
        let arrows = self
            .arrows()
            .map(|a| {
                let e = &self.arrows[a.0];
                target.arrow_of(objects[self.source(a).0], ops.arr(e.op), objects[self.target(a).0], &e.base)
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Functor { objects, arrows })
    }
}

impl Category for EnvelopeCategory {
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
        let (first, second) = (&self.arrows[f.0], &self.arrows[g.0]);
        let u = self.operators.compose(second.op, first.op)?;
        let v = second.base.compose(&first.base).ok()?;
        self.arrow_of(self.adj.source(f), u, self.adj.target(g), &v)
    }
    fn arrows_from(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_from(x)
    }
    fn arrows_to(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_to(x)
    }
    fn object_label(&self, x: ObjId) -> String {
        let o = &self.objects[x.0];
        format!("{} {}", self.operators.object_label(o.list), o.assignment)
    }
    fn arrow_label(&self, a: ArrowId) -> String {
        let e = &self.arrows[a.0];
        format!("({}; {})", self.operators.arrow_label(e.op), e.base)
    }
}

impl OverFinStar for EnvelopeCategory {
    fn horizon(&self) -> usize {
        self.operators.horizon()
    }
    fn arity_of(&self, x: ObjId) -> usize {
        self.objects[x.0].assignment.target()
    }
    fn base_map(&self, a: ArrowId) -> &PointedMap {
        &self.arrows[a.0].base
    }
    fn inert_lift(&self, x: ObjId, f: &PointedMap) -> Option<ArrowId> {
        if !f.is_inert() {
            return None;
        }
        self.canonical_lift(x, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrongFailure {
    #[error("not a discrete opfibration: {0}")]
    Lifting(#[from] LiftFailure),
    #[error("β_! from {sum:?} to {tensor:?} maps a fiber of size {sum_fiber} to one of size {tensor_fiber} non-bijectively")]
    NotBijective { sum: ObjId, tensor: ObjId, sum_fiber: usize, tensor_fiber: usize },
}

/// A discrete opfibration over the envelope whose `β_!`-induced maps
/// `fiber(x_1 ⊕ .. ⊕ x_n) → fiber(x_1 ⊗ .. ⊗ x_n)` are bijections.
pub fn is_strong_sm_left_fibration<E: Category + ?Sized>(
    total: &E,
    base: &EnvelopeCategory,
    proj: &Functor,
) -> Result<(), StrongFailure> {
    is_discrete_opfibration(total, base, proj)?;
    let mut fibers: Vec<Vec<ObjId>> = vec![Vec::new(); base.object_count()];
    for e in total.objects() {
        fibers[proj.obj(e).0].push(e);
    }
    for x in base.objects() {
        let b = base.beta_shriek(x);
        let t = base.target(b);
        let fail = StrongFailure::NotBijective {
            sum: x,
            tensor: t,
            sum_fiber: fibers[x.0].len(),
            tensor_fiber: fibers[t.0].len(),
        };
        if fibers[x.0].len() != fibers[t.0].len() {
            return Err(fail);
        }
        let images: HashSet<ObjId> = fibers[x.0]
            .iter()
            .map(|&e| total.target(unique_lift(total, proj, e, b).expect("discrete opfibration")))
            .collect();
        if images.len() != fibers[x.0].len() {
            return Err(fail);
        }
    }
    Ok(())
}

/// Pullback of a fibration over the envelope along the unit, as a category
/// over the operators; verified to be an operadic left fibration.
pub fn slice_unit_base_change<'a, E: Category + ?Sized>(
    total: &'a E,
    proj: &Functor,
    env: &'a EnvelopeCategory,
) -> Result<(Pullback<&'a E, &'a OperatorCategory>, Functor), EnvelopeError> {
    is_discrete_opfibration(total, env, proj)?;
    let pb = Pullback::new(total, proj, env.operators(), &env.unit(), env).expect("functors land in the envelope");
    let p = pb.right_projection();
    is_operadic_left_fibration(&pb, env.operators(), &p)?;
    Ok((pb, p))
}

/// The left fibration with fiber `n_+` over every object lying over `n_+`,
/// acted on by the underlying pointed maps. It is not strong: `β_!` sends a
/// fiber of size `n + 1` to one of size 2.
pub fn basepoint_fibration(e: &EnvelopeCategory) -> ElementsCategory<&EnvelopeCategory> {
    let sizes = e.objects().map(|x| e.arity_of(x) + 1).collect();
    let maps = e
        .arrows()
        .map(|a| std::iter::once(0).chain(e.base_map(a).image().iter().copied()).collect())
        .collect();
    ElementsCategory::new(e, SetFunctor { sizes, maps }).expect("pointed maps act functorially")
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::category::{check_category, check_functor, iso_check};
    use crate::operad::library;
    use crate::operators::is_operad_map;

    fn env(p: crate::operad::ColoredOperad, h: usize) -> EnvelopeCategory {
        EnvelopeCategory::new(OperatorCategory::build(Arc::new(p), h).unwrap()).unwrap()
    }

    #[test]
    fn comm_envelope_homs_are_all_functions() {
        let e = env(library::comm(3), 3);
        let one = PointedMap::identity(1);
        for m in 0..=3usize {
            for n in 0..=3usize {
                let x = e.underlying_object(&vec![Color(0); m]).unwrap();
                let y = e.underlying_object(&vec![Color(0); n]).unwrap();
                let count = e.arrows_from(x).iter().filter(|&&a| e.target(a) == y && *e.base_map(a) == one).count();
                assert_eq!(count, n.pow(m as u32), "{m} → {n}");
            }
        }
    }

    #[test]
    fn underlying_category_is_active_operators() {
        for (name, p) in library::all(2) {
            let p = Arc::new(p);
            let e = EnvelopeCategory::new(OperatorCategory::build(p.clone(), 2).unwrap()).unwrap();
            let active = OperatorCategory::active(p, 2).unwrap();
            e.check_underlying(&active).unwrap_or_else(|err| panic!("{name}: {err}"));
        }
    }

    #[test]
    fn envelope_is_a_category_and_unit_is_an_operad_map() {
        for (name, p) in library::all(2) {
            let e = env(p, 2);
            // associativity is cubic; the larger envelopes are covered through
            // the underlying-category and unit checks
            if e.arrow_count() <= 600 {
                check_category(&e).unwrap_or_else(|err| panic!("{name}: {err}"));
            }
            let unit = e.unit();
            is_operad_map(e.operators(), &e, &unit).unwrap_or_else(|err| panic!("{name}: {err}"));
        }
    }

    #[test]
    fn beta_shriek_concatenates() {
        let e = env(library::arrow(2), 2);
        let (a, b) = (e.underlying_object(&[Color(0)]).unwrap(), e.underlying_object(&[Color(1)]).unwrap());
        let sum = e.sum(&[a, b]).unwrap();
        assert_eq!(e.colors_of(sum), &[Color(0), Color(1)]);
        assert_eq!(e.object(sum).assignment, PointedMap::identity(2));
        let arrow = e.arrow(e.beta_shriek(sum));
        assert_eq!(arrow.base, PointedMap::beta(2));
        assert_eq!(arrow.op, e.operators().identity(e.object(sum).list));
        assert_eq!(e.tensor(&[a, b]).unwrap(), e.underlying_object(&[Color(0), Color(1)]).unwrap());
        let ab = e.tensor(&[a, b]).unwrap();
        assert!(matches!(e.tensor(&[ab, a]), Err(EnvelopeError::HorizonExceeded { .. })));
    }

    #[test]
    fn identity_is_strong() {
        let e = env(library::comm(2), 2);
        assert!(is_strong_sm_left_fibration(&e, &e, &Functor::identity(&e)).is_ok());
    }

    #[test]
    fn non_strong_counterexample() {
        let e = env(library::comm(2), 2);
        let total = basepoint_fibration(&e);
        let proj = total.projection();
        assert!(is_discrete_opfibration(&total, &e, &proj).is_ok());
        let pair = e.unit_object(e.operators().object_of(&[Color(0), Color(0)]).unwrap());
        match is_strong_sm_left_fibration(&total, &e, &proj) {
            Err(StrongFailure::NotBijective { sum, tensor, sum_fiber, tensor_fiber }) => {
                // the first witness is the empty sum; the pair fails too
                assert_eq!((sum_fiber, tensor_fiber), (1, 2));
                assert_eq!(e.arity_of(sum), 0);
                assert_eq!(e.arity_of(tensor), 1);
            }
            other => panic!("{other:?}"),
        }
        let b = e.beta_shriek(pair);
        let sizes = total.functor().sizes.clone();
        assert_eq!((sizes[pair.0], sizes[e.target(b).0]), (3, 2));
    }

    #[test]
    fn base_change_of_identity_is_identity() {
        let e = env(library::comm2(2), 2);
        let (pb, p) = slice_unit_base_change(&e, &Functor::identity(&e), &e).unwrap();
        check_functor(&pb, e.operators(), &p).unwrap();
        assert!(iso_check(&pb, e.operators(), &p));
    }
}
