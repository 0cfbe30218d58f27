//! The category of operators of a finite operad, over the truncation of
//! `Fin_*` to `0_+, .., h_+`.
//!
//! Objects over `n_+` are color lists of length `n`. An arrow over
//! `f: n_+ → m_+` from `(c_1, .., c_n)` is a family of operations
//! `φ_j ∈ P(c_{f⁻¹(j)}; d_j)`, inputs taken in increasing order.

mod checks;

pub use checks::{
    enumerate_functors_over, fiber_segal_check, is_cocartesian, is_operad_map, is_operadic_left_fibration,
    FibrationFailure, OperadMapFailure, OverFinStar,
};

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::category::{Adjacency, ArrowId, Category, Functor, ObjId};
use crate::operad::{Color, ColoredOperad, OpId, OperadMap};
use crate::perm::Perm;
use crate::pointed::{enumerate_maps, PointedMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("horizon must be at least 1")]
    HorizonTooSmall,
    #[error("horizon {horizon} exceeds the operad's arity cap {cap}")]
    HorizonAboveCap { horizon: usize, cap: usize },
    #[error("invalid operad: {0}")]
    InvalidOperad(String),
    #[error("invariant fails: {0}")]
    Invariant(#[from] InvariantViolation),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantViolation {
    #[error("{found} objects over {n}_+, expected {expected}")]
    ObjectCount { n: usize, found: usize, expected: usize },
    #[error("object {0:?} is not recovered from its projections")]
    Segal(ObjId),
    #[error("canonical lift of {map:?} from {object:?} is not coCartesian")]
    NotCocartesian { object: ObjId, map: PointedMap },
    #[error("arrows {source_obj:?} → {target:?} over {map:?} are not the product of their components")]
    HomProduct { source_obj: ObjId, target: ObjId, map: PointedMap },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorArrow {
    pub map: PointedMap,
    pub ops: Vec<OpId>,
}

pub struct OperatorCategory {
    operad: Arc<ColoredOperad>,
    horizon: usize,
    active_only: bool,
    objects: Vec<Vec<Color>>,
    object_index: HashMap<Vec<Color>, ObjId>,
    arrows: Vec<OperatorArrow>,
    arrow_index: HashMap<(ObjId, Vec<OpId>, PointedMap), ArrowId>,
    adj: Adjacency,
}

/// All color lists of length at most `h`, by length then lexicographically.
pub fn color_lists(colors: usize, h: usize) -> Vec<Vec<Color>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..h {
        let mut next = Vec::new();
        for l in &level {
            for c in 0..colors {
                let mut l2: Vec<Color> = l.clone();
                l2.push(Color(c));
                next.push(l2);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

impl OperatorCategory {
    /// Builds the category of operators and verifies the operad axioms and
    /// the three structural invariants.
    pub fn new(operad: Arc<ColoredOperad>, horizon: usize) -> Result<Self, OperatorError> {
        let report = operad.validate();
        if let Some(v) = report.violations.first() {
            return Err(OperatorError::InvalidOperad(v.to_string()));
        }
        let c = Self::build(operad, horizon)?;
        c.check_invariants()?;
        Ok(c)
    }

    /// Builds without checking; the operad must already be valid.
    pub fn build(operad: Arc<ColoredOperad>, horizon: usize) -> Result<Self, OperatorError> {
        Self::construct(operad, horizon, false)
    }

    /// The wide subcategory on arrows over active maps.
    pub fn active(operad: Arc<ColoredOperad>, horizon: usize) -> Result<Self, OperatorError> {
        Self::construct(operad, horizon, true)
    }

    fn construct(operad: Arc<ColoredOperad>, horizon: usize, active_only: bool) -> Result<Self, OperatorError> {
        if horizon < 1 {
            return Err(OperatorError::HorizonTooSmall);
        }
        if horizon > operad.arity_cap() {
            return Err(OperatorError::HorizonAboveCap { horizon, cap: operad.arity_cap() });
        }
        let objects = color_lists(operad.color_count(), horizon);
        let object_index: HashMap<Vec<Color>, ObjId> =
            objects.iter().enumerate().map(|(i, l)| (l.clone(), ObjId(i))).collect();
        let mut by_inputs: HashMap<Vec<Color>, Vec<OpId>> = HashMap::new();
        for op in operad.ops() {
            by_inputs.entry(operad.inputs(op).to_vec()).or_default().push(op);
        }
        let mut maps_by_size: Vec<Vec<Vec<PointedMap>>> = Vec::new();
        for n in 0..=horizon {
            maps_by_size.push(
                (0..=horizon)
                    .map(|m| enumerate_maps(n, m).into_iter().filter(|f| !active_only || f.is_active()).collect())
                    .collect(),
            );
        }
        let mut adj = Adjacency::with_objects(objects.len());
        let mut arrows = Vec::new();
        let mut arrow_index = HashMap::new();
        for (xi, x) in objects.iter().enumerate() {
            let n = x.len();
            for m in 0..=horizon {
                for f in &maps_by_size[n][m] {
                    let choices: Vec<&[OpId]> = (1..=m)
                        .map(|j| {
                            let inputs: Vec<Color> = f.preimage(j).iter().map(|&i| x[i - 1]).collect();
                            by_inputs.get(&inputs).map(Vec::as_slice).unwrap_or(&[])
                        })
                        .collect();
                    if choices.iter().any(|c| c.is_empty()) {
                        continue;
                    }
                    let mut pick = vec![0; m];
                    loop {
                        let ops: Vec<OpId> = pick.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
                        let target: Vec<Color> = ops.iter().map(|&o| operad.output(o)).collect();
                        let t = object_index[&target];
                        let a = adj.add_arrow(ObjId(xi), t);
                        if t.0 == xi && *f == PointedMap::identity(n) && ops.iter().all(|&o| operad.is_unit(o)) {
                            adj.set_identity(ObjId(xi), a);
                        }
                        arrow_index.insert((ObjId(xi), ops.clone(), f.clone()), a);
                        arrows.push(OperatorArrow { map: f.clone(), ops });
                        let mut k = m;
                        loop {
                            if k == 0 {
                                break;
                            }
                            k -= 1;
                            if pick[k] + 1 < choices[k].len() {
                                pick[k] += 1;
                                pick[k + 1..].iter_mut().for_each(|p| *p = 0);
                                break;
                            }
                            if k == 0 {
                                k = usize::MAX;
                                break;
                            }
                        }
                        if k == usize::MAX || m == 0 {
                            break;
                        }
                    }
                }
            }
        }
        Ok(OperatorCategory { operad, horizon, active_only, objects, object_index, arrows, arrow_index, adj })
    }

    pub fn operad(&self) -> &ColoredOperad {
        &self.operad
    }

    pub fn operad_arc(&self) -> &Arc<ColoredOperad> {
        &self.operad
    }

    pub fn is_active_only(&self) -> bool {
        self.active_only
    }

    pub fn list(&self, x: ObjId) -> &[Color] {
        &self.objects[x.0]
    }

    pub fn object_of(&self, list: &[Color]) -> Option<ObjId> {
        self.object_index.get(list).copied()
    }

    pub fn arrow(&self, a: ArrowId) -> &OperatorArrow {
        &self.arrows[a.0]
    }

    pub fn arrow_of(&self, source: ObjId, map: &PointedMap, ops: &[OpId]) -> Option<ArrowId> {
        self.arrow_index.get(&(source, ops.to_vec(), map.clone())).copied()
    }

    /// Arrows out of `x` lying over `f`.
    pub fn arrows_over(&self, x: ObjId, f: &PointedMap) -> Vec<ArrowId> {
        self.adj.arrows_from(x).iter().copied().filter(|&a| self.arrows[a.0].map == *f).collect()
    }

    /// The canonical lift of an inert map: units on the surviving colors.
    pub fn canonical_inert_lift(&self, x: ObjId, f: &PointedMap) -> Option<ArrowId> {
        if !f.is_inert() || f.source() != self.objects[x.0].len() {
            return None;
        }
        let list = &self.objects[x.0];
        let ops: Vec<OpId> = (1..=f.target()).map(|j| self.operad.unit(list[f.preimage(j)[0] - 1])).collect();
        self.arrow_of(x, f, &ops)
    }

    /// The lift of `ρ^i` from `x`.
    pub fn projection_lift(&self, x: ObjId, i: usize) -> Option<ArrowId> {
        let f = PointedMap::projection(self.objects[x.0].len(), i).ok()?;
        self.canonical_inert_lift(x, &f)
    }

    /// The permutation taking block order to sorted source order for the
    /// composite over `g ∘ f` at target `k`.
    fn reorder(f: &PointedMap, g: &PointedMap, k: usize) -> Option<Perm> {
        let blocks = g.preimage(k);
        let mut pos = HashMap::new();
        let mut next = 0;
        for &j in &blocks {
            for i in f.preimage(j) {
                pos.insert(i, next);
                next += 1;
            }
        }
        let mut sorted: Vec<usize> = pos.keys().copied().collect();
        sorted.sort_unstable();
        Perm::from_vec(sorted.iter().map(|i| pos[i]).collect())
    }

    /// The operations of `g ∘ f` for operator arrows over `f` and `g`.
    pub fn compose_ops(&self, first: &OperatorArrow, second: &OperatorArrow) -> Option<Vec<OpId>> {
        let p = &*self.operad;
        let mut ops = Vec::with_capacity(second.ops.len());
        for k in 1..=second.map.target() {
            let blocks = second.map.preimage(k);
            let inners: Vec<OpId> = blocks.iter().map(|&j| first.ops[j - 1]).collect();
            let chi = p.compose(second.ops[k - 1], &inners)?;
            let tau = Self::reorder(&first.map, &second.map, k)?;
            ops.push(if tau.is_identity() { chi } else { p.act(chi, &tau) });
        }
        Some(ops)
    }

    /// The functor on categories of operators induced by an operad map.
    pub fn induced_functor(&self, map: &OperadMap, target: &OperatorCategory) -> Option<Functor> {
        let objects = self
            .objects
            .iter()
            .map(|l| target.object_of(&l.iter().map(|c| map.colors[c.0]).collect::<Vec<_>>()))
            .collect::<Option<Vec<_>>>()?;
        let arrows = self
            .arrows()
            .map(|a| {
                let arr = &self.arrows[a.0];
                let ops: Vec<OpId> = arr.ops.iter().map(|o| map.ops[o.0]).collect();
                target.arrow_of(objects[self.source(a).0], &arr.map, &ops)
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Functor { objects, arrows })
    }

    /// Objects over `n_+` are exactly the color lists of length `n`, each
    /// recovered from its images under the lifts of `ρ^1, .., ρ^n`.
    pub fn check_segal_objects(&self) -> Result<(), InvariantViolation> {
        let k = self.operad.color_count();
        for n in 0..=self.horizon {
            let found = self.objects.iter().filter(|l| l.len() == n).count();
            if found != k.pow(n as u32) {
                return Err(InvariantViolation::ObjectCount { n, found, expected: k.pow(n as u32) });
            }
        }
        if self.active_only {
            return Ok(());
        }
        for x in self.objects() {
            let n = self.objects[x.0].len();
            let recovered: Option<Vec<Color>> = (1..=n)
                .map(|i| {
                    let a = self.projection_lift(x, i)?;
                    Some(self.objects[self.target(a).0][0])
                })
                .collect();
            if recovered.as_deref() != Some(&self.objects[x.0][..]) {
                return Err(InvariantViolation::Segal(x));
            }
        }
        Ok(())
    }

    /// Every canonical inert lift is coCartesian.
    pub fn check_cocartesian_lifts(&self) -> Result<(), InvariantViolation> {
        for x in self.objects() {
            let n = self.objects[x.0].len();
            for m in 0..=self.horizon {
                for f in enumerate_maps(n, m) {
                    if !f.is_inert() || (self.active_only && !f.is_active()) {
                        continue;
                    }
                    let a = self.canonical_inert_lift(x, &f);
                    if !a.is_some_and(|a| is_cocartesian(self, a)) {
                        return Err(InvariantViolation::NotCocartesian { object: x, map: f });
                    }
                }
            }
        }
        Ok(())
    }

    /// `Hom_f(x, y) → ∏_j Hom_{ρ^j∘f}(x, y_j)` is a bijection.
    pub fn check_hom_products(&self) -> Result<(), InvariantViolation> {
        if self.active_only {
            return Ok(());
        }
        for x in self.objects() {
            let mut groups: HashMap<(PointedMap, ObjId), Vec<ArrowId>> = HashMap::new();
            for &a in self.adj.arrows_from(x) {
                groups.entry((self.arrows[a.0].map.clone(), self.target(a))).or_default().push(a);
            }
            let count = |map: &PointedMap, y: ObjId| groups.get(&(map.clone(), y)).map_or(0, Vec::len);
            for ((f, y), arrows) in &groups {
                let m = f.target();
                let fail =
                    || InvariantViolation::HomProduct { source_obj: x, target: *y, map: f.clone() };
                let mut expected = 1;
                for j in 1..=m {
                    let rho = PointedMap::projection(m, j).expect("in range");
                    let yj = self.object_of(&[self.objects[y.0][j - 1]]).expect("singleton list");
                    expected *= count(&rho.compose(f).expect("composable"), yj);
                }
                if expected != arrows.len() {
                    return Err(fail());
                }
                let mut seen = std::collections::HashSet::new();
                for &a in arrows {
                    let parts: Option<Vec<ArrowId>> = (1..=m)
                        .map(|j| self.compose(self.projection_lift(*y, j)?, a))
                        .collect();
                    if !seen.insert(parts.ok_or_else(fail)?) {
                        return Err(fail());
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_invariants(&self) -> Result<(), InvariantViolation> {
        self.check_segal_objects()?;
        self.check_cocartesian_lifts()?;
        self.check_hom_products()
    }
}

impl Category for OperatorCategory {
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
        let map = second.map.compose(&first.map).ok()?;
        let ops = self.compose_ops(first, second)?;
        self.arrow_index.get(&(self.adj.source(f), ops, map)).copied()
    }
    fn arrows_from(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_from(x)
    }
    fn arrows_to(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_to(x)
    }
    fn object_label(&self, x: ObjId) -> String {
        let names: Vec<&str> = self.objects[x.0].iter().map(|&c| self.operad.color_name(c)).collect();
        format!("⟨{}⟩", names.join(","))
    }
    fn arrow_label(&self, a: ArrowId) -> String {
        let arr = &self.arrows[a.0];
        let names: Vec<&str> = arr.ops.iter().map(|&o| self.operad.op(o).name.as_str()).collect();
        format!("{} [{}]", arr.map, names.join(", "))
    }
}

impl OverFinStar for OperatorCategory {
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn arity_of(&self, x: ObjId) -> usize {
        self.objects[x.0].len()
    }
    fn base_map(&self, a: ArrowId) -> &PointedMap {
        &self.arrows[a.0].map
    }
    fn inert_lift(&self, x: ObjId, f: &PointedMap) -> Option<ArrowId> {
        self.canonical_inert_lift(x, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{check_category, iso_check};
    use crate::operad::library;
    use crate::pointed::FinStar;

    #[test]
    fn comm_operators_are_fin_star() {
        for h in 1..=4 {
            let c = OperatorCategory::new(Arc::new(library::comm(4)), h).unwrap();
            let base = FinStar::new(h);
            assert!(iso_check(&c, &base, &c.projection(&base)));
        }
    }

    #[test]
    fn operator_categories_are_categories() {
        for (name, p) in library::all(2) {
            let c = OperatorCategory::new(Arc::new(p), 2).unwrap_or_else(|e| panic!("{name}: {e}"));
            check_category(&c).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn two_colors_give_four_objects_over_two() {
        let c = OperatorCategory::new(Arc::new(library::arrow(2)), 2).unwrap();
        assert_eq!(c.objects().filter(|&x| c.arity_of(x) == 2).count(), 4);
    }

    #[test]
    fn horizon_guards() {
        let p = Arc::new(library::comm(2));
        assert!(matches!(OperatorCategory::build(p.clone(), 0), Err(OperatorError::HorizonTooSmall)));
        assert!(matches!(OperatorCategory::build(p, 3), Err(OperatorError::HorizonAboveCap { .. })));
    }
}
