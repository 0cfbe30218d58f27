//! The nerve comparison: decorations of the forest of a simplex of `Fin_*`
//! against chains in the category of operators lying over that simplex.
//!
//! Dimensions up to two are compared element by element: both sets are
//! enumerated, the decoration-to-chain map is checked to be a bijection,
//! and every face and degeneracy is checked by pulling decorations back
//! along the corresponding forest map. In dimension three the forests grow
//! large (hundreds of millions of decorations for some operads), so each
//! decoration is streamed as a stored two-dimensional decoration plus the
//! operations of its top level. Every face of such an element is a pullback
//! that only regrafts two consecutive levels, so it is decided by the
//! two-dimensional check on those levels together with the fact that a
//! single vertex pulls back to its own operation.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use super::nerve::{decorations, pull_back, subtree_composite};
use super::simplex::{enumerate_simplices, level_edge_map, level_offsets, w_forest};
use super::{Decoration, Simplex, Tree};
use crate::category::{ArrowId, Category, ObjId};
use crate::operad::{Color, ColoredOperad, OpId};
use crate::operators::{OperatorCategory, OperatorError};
use crate::pointed::{enumerate_maps, PointedMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NerveError {
    #[error(transparent)]
    Operators(#[from] OperatorError),
    #[error("dimension {0} is above the supported maximum 3")]
    Dimension(usize),
    #[error("too many objects, maps or operations to index")]
    TooLarge,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NerveFailure {
    #[error("{simplex}: {decorations} decorations but {chains} chains")]
    Count { simplex: String, decorations: usize, chains: usize },
    #[error("{simplex}: a decoration has no chain")]
    Unmapped { simplex: String },
    #[error("{simplex}: two decorations give the same chain")]
    NotInjective { simplex: String },
    #[error("{simplex}: face {index} does not commute")]
    Face { simplex: String, index: usize },
    #[error("{simplex}: degeneracy {index} does not commute")]
    Degeneracy { simplex: String, index: usize },
}

#[derive(Debug, Clone, Default)]
pub struct NerveReport {
    /// Simplices checked, by dimension.
    pub simplices: Vec<usize>,
    /// Decorations compared, by dimension.
    pub elements: Vec<usize>,
    pub failures: Vec<NerveFailure>,
    failure_limit: usize,
    failure_count: usize,
}

impl NerveReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn failure_count(&self) -> usize {
        self.failure_count
    }

    pub fn total_simplices(&self) -> usize {
        self.simplices.iter().sum()
    }

    pub fn total_elements(&self) -> usize {
        self.elements.iter().sum()
    }

    fn record(&mut self, f: NerveFailure) {
        self.failure_count += 1;
        if self.failures.len() < self.failure_limit {
            self.failures.push(f);
        }
    }
}

/// A functor from `[k]` into the category of operators: first object and
/// arrows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Chain {
    start: ObjId,
    arrows: Vec<ArrowId>,
}

/// A two-dimensional decoration kept for the streaming pass.
struct Stored {
    image: [ArrowId; 2],
    top: Vec<Color>,
    /// Every vertex pulls back to its own operation.
    units_ok: bool,
    /// The inner face commutes.
    inner_ok: bool,
}

/// Top-level decorations over one object and map, with their arrows and
/// whether each vertex pulls back to itself.
struct TopLevel {
    arrows: Vec<(ArrowId, bool)>,
    unmapped: bool,
}

struct Comparison<'a> {
    operad: &'a ColoredOperad,
    opcat: OperatorCategory,
    maps: Vec<PointedMap>,
    map_id: HashMap<PointedMap, usize>,
    by_source: Vec<Vec<usize>>,
    over: Vec<Vec<ArrowId>>,
    index: HashMap<u128, ArrowId>,
    unit_ok: Vec<bool>,
    report: NerveReport,
}

const MAX_INDEXED_OPS: usize = 4;

impl<'a> Comparison<'a> {
    fn new(operad: &'a ColoredOperad, horizon: usize, failure_limit: usize) -> Result<Self, NerveError> {
        let opcat = OperatorCategory::build(Arc::new(operad.clone()), horizon)?;
        let mut maps = Vec::new();
        let mut by_source = vec![Vec::new(); horizon + 1];
        for n in 0..=horizon {
            for m in 0..=horizon {
                for f in enumerate_maps(n, m) {
                    by_source[n].push(maps.len());
                    maps.push(f);
                }
            }
        }
        if horizon > MAX_INDEXED_OPS
            || opcat.object_count() >= 1 << 16
            || maps.len() >= 1 << 16
            || operad.op_count() >= 1 << 24
        {
            return Err(NerveError::TooLarge);
        }
        let map_id: HashMap<PointedMap, usize> = maps.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let mut over = vec![Vec::new(); opcat.object_count() * maps.len()];
        let mut index = HashMap::new();
        for x in 0..opcat.object_count() {
            for &a in opcat.arrows_from(ObjId(x)) {
                let arrow = opcat.arrow(a);
                let f = map_id[&arrow.map];
                over[x * maps.len() + f].push(a);
                index.insert(Self::key(ObjId(x), f, &arrow.ops), a);
            }
        }
        // a decorated corolla pulls back to its own operation
        let unit_ok = operad
            .ops()
            .map(|op| {
                let n = operad.arity(op);
                let tree = Tree::corolla(n);
                let mut colors = vec![operad.output(op)];
                colors.extend_from_slice(operad.inputs(op));
                let d = Decoration { colors, ops: vec![op] };
                let leaves: Vec<usize> = (1..=n).collect();
                subtree_composite(operad, tree.forest(), &d, 0, &leaves) == Some(op)
            })
            .collect();
        Ok(Comparison {
            operad,
            opcat,
            maps,
            map_id,
            by_source,
            over,
            index,
            unit_ok,
            report: NerveReport { failure_limit, ..NerveReport::default() },
        })
    }

    fn key(x: ObjId, f: usize, ops: &[OpId]) -> u128 {
        let mut k = ((x.0 as u128) << 112) | ((f as u128) << 96);
        for (i, op) in ops.iter().enumerate() {
            k |= (op.0 as u128) << (24 * i);
        }
        k
    }

    fn lookup(&self, x: ObjId, f: usize, ops: &[OpId]) -> Option<ArrowId> {
        let a = *self.index.get(&Self::key(x, f, ops))?;
        (self.opcat.arrow(a).ops == ops).then_some(a)
    }

    fn over(&self, x: ObjId, f: usize) -> &[ArrowId] {
        &self.over[x.0 * self.maps.len() + f]
    }

    fn chains_over(&self, sigma: &Simplex) -> Vec<Chain> {
        let n0 = sigma.objects()[0];
        let mut out: Vec<Chain> = (0..self.opcat.object_count())
            .map(ObjId)
            .filter(|&x| self.opcat.list(x).len() == n0)
            .map(|x| Chain { start: x, arrows: Vec::new() })
            .collect();
        for f in sigma.maps() {
            let f = self.map_id[f];
            let mut next = Vec::new();
            for c in &out {
                let end = c.arrows.last().map_or(c.start, |&a| self.opcat.target(a));
                for &a in self.over(end, f) {
                    let mut arrows = c.arrows.clone();
                    arrows.push(a);
                    next.push(Chain { start: c.start, arrows });
                }
            }
            out = next;
        }
        out
    }

    /// Reads a chain off a decoration: level `l` gives an object, the
    /// vertices of level `l + 1` the operations of an arrow.
    fn chain_of(&self, sigma: &Simplex, d: &Decoration) -> Option<Chain> {
        let objects = sigma.objects();
        let offsets = level_offsets(sigma);
        let start = self.opcat.object_of(&d.colors[offsets[0]..offsets[0] + objects[0]])?;
        let mut current = start;
        let mut arrows = Vec::new();
        for (l, f) in sigma.maps().iter().enumerate() {
            let first_vertex = offsets[l + 1] - offsets[1];
            let ops = &d.ops[first_vertex..first_vertex + f.target()];
            let a = self.lookup(current, self.map_id[f], ops)?;
            current = self.opcat.target(a);
            arrows.push(a);
        }
        Some(Chain { start, arrows })
    }

    fn chain_face(&self, c: &Chain, i: usize) -> Option<Chain> {
        let k = c.arrows.len();
        let mut arrows = c.arrows.clone();
        if i == 0 {
            let a = arrows.remove(0);
            Some(Chain { start: self.opcat.target(a), arrows })
        } else if i == k {
            arrows.pop();
            Some(Chain { start: c.start, arrows })
        } else {
            let g = self.opcat.compose(arrows[i], arrows[i - 1])?;
            arrows.splice(i - 1..=i, [g]);
            Some(Chain { start: c.start, arrows })
        }
    }

    fn chain_degeneracy(&self, c: &Chain, i: usize) -> Chain {
        let x = if i == 0 { c.start } else { self.opcat.target(c.arrows[i - 1]) };
        let mut arrows = c.arrows.clone();
        arrows.insert(i, self.opcat.identity(x));
        Chain { start: c.start, arrows }
    }

    /// Element-by-element comparison on one simplex. Returns the decorations
    /// with their chains and the results of the inner face check when every
    /// decoration has a chain.
    fn compare(&mut self, sigma: &Simplex, degeneracies: bool) -> Option<Vec<(Decoration, Chain, bool)>> {
        let name = || format!("{sigma:?}");
        let dim = sigma.dim();
        let forest = w_forest(sigma);
        let decs = decorations(self.operad, &forest);
        let chains = self.chains_over(sigma);
        self.report.elements[dim] += decs.len();
        if decs.len() != chains.len() {
            self.report.record(NerveFailure::Count {
                simplex: name(),
                decorations: decs.len(),
                chains: chains.len(),
            });
        }
        let mut mapped = Vec::with_capacity(decs.len());
        for d in &decs {
            match self.chain_of(sigma, d) {
                Some(c) => mapped.push(c),
                None => {
                    self.report.record(NerveFailure::Unmapped { simplex: name() });
                    return None;
                }
            }
        }
        let distinct: HashSet<&Chain> = mapped.iter().collect();
        if distinct.len() != mapped.len() {
            self.report.record(NerveFailure::NotInjective { simplex: name() });
        }
        let mut inner_ok = vec![true; decs.len()];
        if dim > 0 {
            for i in 0..=dim {
                let face = sigma.face(i).expect("face index");
                let wf = w_forest(&face);
                let map = level_edge_map(&face, sigma, &sigma.face_levels(i));
                let mut ok = true;
                for (k, (d, c)) in decs.iter().zip(&mapped).enumerate() {
                    let pulled = pull_back(self.operad, &forest, d, &wf, &map).and_then(|r| self.chain_of(&face, &r));
                    let good = pulled.is_some() && pulled == self.chain_face(c, i);
                    if 0 < i && i < dim {
                        inner_ok[k] &= good;
                    }
                    ok &= good;
                }
                if !ok {
                    self.report.record(NerveFailure::Face { simplex: name(), index: i });
                }
            }
        }
        if degeneracies {
            for i in 0..=dim {
                let deg = sigma.degeneracy(i).expect("degeneracy index");
                let wd = w_forest(&deg);
                let map = level_edge_map(&deg, sigma, &sigma.degeneracy_levels(i));
                let ok = decs.iter().zip(&mapped).all(|(d, c)| {
                    pull_back(self.operad, &forest, d, &wd, &map).and_then(|r| self.chain_of(&deg, &r))
                        == Some(self.chain_degeneracy(c, i))
                });
                if !ok {
                    self.report.record(NerveFailure::Degeneracy { simplex: name(), index: i });
                }
            }
        }
        Some(decs.into_iter().zip(mapped).zip(inner_ok).map(|((d, c), ok)| (d, c, ok)).collect())
    }

    fn run(&mut self, horizon: usize, max_dim: usize) {
        self.report.simplices = vec![0; max_dim + 1];
        self.report.elements = vec![0; max_dim + 1];
        let mut stored: HashMap<(usize, usize), Vec<Stored>> = HashMap::new();
        let mut inner_ok: HashMap<(ArrowId, ArrowId), bool> = HashMap::new();
        for dim in 0..=max_dim.min(2) {
            for sigma in enumerate_simplices(horizon, dim) {
                self.report.simplices[dim] += 1;
                let Some(elements) = self.compare(&sigma, dim < max_dim) else { continue };
                if dim != 2 || max_dim < 3 {
                    continue;
                }
                let fs = (self.map_id[&sigma.maps()[0]], self.map_id[&sigma.maps()[1]]);
                let top_at = level_offsets(&sigma)[2];
                let list = stored.entry(fs).or_default();
                for (d, c, ok) in elements {
                    let image = [c.arrows[0], c.arrows[1]];
                    inner_ok.insert((image[0], image[1]), ok);
                    list.push(Stored {
                        image,
                        top: d.colors[top_at..].to_vec(),
                        units_ok: d.ops.iter().all(|op| self.unit_ok[op.0]),
                        inner_ok: ok,
                    });
                }
            }
        }
        if max_dim >= 3 {
            self.stream_dim3(&stored, &inner_ok);
        }
    }

    /// Dimension three, streamed over stored two-dimensional decorations.
    fn stream_dim3(&mut self, stored: &HashMap<(usize, usize), Vec<Stored>>, inner_ok: &HashMap<(ArrowId, ArrowId), bool>) {
        let mut prefixes: Vec<(usize, usize)> = Vec::new();
        for f1 in 0..self.maps.len() {
            for &f2 in &self.by_source[self.maps[f1].target()] {
                prefixes.push((f1, f2));
            }
        }
        let empty = Vec::new();
        let mut images: Vec<[ArrowId; 3]> = Vec::new();
        // top levels depend on the object below and the map only
        let mut tops: Vec<Option<TopLevel>> = (0..self.over.len()).map(|_| None).collect();
        let mut inner_faces: Vec<Option<Vec<bool>>> =
            (0..self.opcat.arrow_count() * self.maps.len()).map(|_| None).collect();
        for (f1, f2) in prefixes {
            let below = stored.get(&(f1, f2)).unwrap_or(&empty);
            // chains over (f1, f2), enumerated in the category of operators
            let mut two_chains: Vec<ObjId> = Vec::new();
            for x in (0..self.opcat.object_count()).map(ObjId) {
                if self.opcat.list(x).len() != self.maps[f1].source() {
                    continue;
                }
                for &a1 in self.over(x, f1) {
                    for &a2 in self.over(self.opcat.target(a1), f2) {
                        two_chains.push(self.opcat.target(a2));
                    }
                }
            }
            for &f3 in &self.by_source[self.maps[f2].target()] {
                self.report.simplices[3] += 1;
                let alpha = &self.maps[f3];
                let blocks: Vec<Vec<usize>> = (1..=alpha.target()).map(|j| alpha.preimage(j)).collect();
                let chains: usize = two_chains.iter().map(|&x| self.over(x, f3).len()).sum();
                images.clear();
                let mut unmapped = false;
                let mut faces_ok = [true; 4];
                for s in below {
                    let x2 = match self.opcat.object_of(&s.top) {
                        Some(x2) if x2 == self.opcat.target(s.image[1]) => x2,
                        _ => {
                            unmapped = true;
                            continue;
                        }
                    };
                    let slot = x2.0 * self.maps.len() + f3;
                    if tops[slot].is_none() {
                        tops[slot] = Some(self.top_level(&s.top, x2, &blocks, f3));
                    }
                    let top = tops[slot].as_ref().unwrap();
                    unmapped |= top.unmapped;
                    let inner_slot = s.image[1].0 * self.maps.len() + f3;
                    if inner_faces[inner_slot].is_none() {
                        let flags = top.arrows.iter().map(|&(a3, _)| inner_ok.get(&(s.image[1], a3)) == Some(&true));
                        inner_faces[inner_slot] = Some(flags.collect());
                    }
                    let inner = inner_faces[inner_slot].as_ref().unwrap();
                    for (&(a3, top_ok), &upper_inner_ok) in top.arrows.iter().zip(inner) {
                        images.push([s.image[0], s.image[1], a3]);
                        let lower_ok = s.units_ok && top_ok;
                        faces_ok[0] &= lower_ok;
                        faces_ok[1] &= s.inner_ok && top_ok;
                        faces_ok[2] &= s.units_ok && upper_inner_ok;
                        faces_ok[3] &= lower_ok;
                    }
                }
                self.report.elements[3] += images.len();
                let simplex = self.simplex3(f1, f2, f3);
                let name = || format!("{simplex:?}");
                if unmapped {
                    self.report.record(NerveFailure::Unmapped { simplex: name() });
                    continue;
                }
                if images.len() != chains {
                    let decorations = images.len();
                    self.report.record(NerveFailure::Count { simplex: name(), decorations, chains });
                }
                images.sort_unstable();
                if images.windows(2).any(|w| w[0] == w[1]) {
                    self.report.record(NerveFailure::NotInjective { simplex: name() });
                }
                for (index, ok) in faces_ok.into_iter().enumerate() {
                    if !ok {
                        self.report.record(NerveFailure::Face { simplex: name(), index });
                    }
                }
            }
        }
    }

    /// All ways to decorate the top level over `f3` above the coloring
    /// `top`: one operation per vertex, inputs read off the level below.
    fn top_level(&self, top: &[Color], x2: ObjId, blocks: &[Vec<usize>], f3: usize) -> TopLevel {
        let options: Vec<Vec<OpId>> = blocks
            .iter()
            .map(|b| {
                let inputs: Vec<Color> = b.iter().map(|&i| top[i - 1]).collect();
                self.operad.colors().flat_map(|c| self.operad.hom(&inputs, c).iter().copied()).collect()
            })
            .collect();
        let mut out = TopLevel { arrows: Vec::new(), unmapped: false };
        if options.iter().any(Vec::is_empty) {
            return out;
        }
        let mut idx = vec![0usize; options.len()];
        let mut ops = vec![OpId(0); options.len()];
        loop {
            for (k, &i) in idx.iter().enumerate() {
                ops[k] = options[k][i];
            }
            match self.lookup(x2, f3, &ops) {
                Some(a3) => out.arrows.push((a3, ops.iter().all(|op| self.unit_ok[op.0]))),
                None => out.unmapped = true,
            }
            if !advance(&mut idx, &options) {
                return out;
            }
        }
    }

    fn simplex3(&self, f1: usize, f2: usize, f3: usize) -> Simplex {
        Simplex::from_maps(vec![self.maps[f1].clone(), self.maps[f2].clone(), self.maps[f3].clone()])
            .expect("composable")
    }
}

fn advance(idx: &mut [usize], options: &[Vec<OpId>]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < options[k].len() {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Compares the dendroidal nerve of `operad` on forests of simplices with
/// functors from simplices into its category of operators, for all
/// simplices of dimension at most `max_dim` (at most 3) in `Fin_*`
/// truncated at `horizon`: a bijection on each simplex, natural for faces,
/// and for degeneracies landing in dimension at most `max_dim`. At most
/// `failure_limit` failures are kept.
pub fn nerve_comparison(
    operad: &ColoredOperad,
    horizon: usize,
    max_dim: usize,
    failure_limit: usize,
) -> Result<NerveReport, NerveError> {
    if max_dim > 3 {
        return Err(NerveError::Dimension(max_dim));
    }
    let mut cmp = Comparison::new(operad, horizon, failure_limit)?;
    cmp.run(horizon, max_dim);
    Ok(cmp.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::library;

    #[test]
    fn low_dimensions_for_every_library_operad() {
        for (name, p) in library::all(2) {
            let report = nerve_comparison(&p, 2, 2, 5).unwrap();
            assert!(report.passed(), "{name}: {:?}", report.failures);
        }
    }

    #[test]
    fn streamed_dimension_three_matches_direct_comparison() {
        // at horizon 2 the direct comparison is cheap enough to run in
        // dimension three as well
        for (name, p) in library::all(2) {
            let streamed = nerve_comparison(&p, 2, 3, 5).unwrap();
            assert!(streamed.passed(), "{name}: {:?}", streamed.failures);
            let mut direct = Comparison::new(&p, 2, 5).unwrap();
            direct.report.simplices = vec![0; 4];
            direct.report.elements = vec![0; 4];
            for sigma in enumerate_simplices(2, 3) {
                direct.report.simplices[3] += 1;
                direct.compare(&sigma, false);
            }
            assert!(direct.report.passed(), "{name}: {:?}", direct.report.failures);
            assert_eq!(direct.report.simplices[3], streamed.simplices[3], "{name}");
            assert_eq!(direct.report.elements[3], streamed.elements[3], "{name}");
        }
    }

    #[test]
    fn comm_has_one_element_per_simplex() {
        let report = nerve_comparison(&library::comm(3), 3, 2, 5).unwrap();
        assert!(report.passed());
        assert_eq!(report.simplices, report.elements);
    }

    #[test]
    fn dimension_bound() {
        assert_eq!(nerve_comparison(&library::comm(2), 2, 4, 1).unwrap_err(), NerveError::Dimension(4));
    }
}
