use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Forest, Vertex};
use crate::pointed::{enumerate_maps, PointedMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplexError {
    #[error("map {index} starts at {found}_+ but the previous object is {expected}_+")]
    NotComposable { index: usize, found: usize, expected: usize },
    #[error("face or degeneracy index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },
}

/// A chain `n_0 → n_1 → .. → n_k` of pointed maps; a 0-simplex is a bare
/// object.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Simplex {
    start: usize,
    maps: Vec<PointedMap>,
}

impl Simplex {
    pub fn new(start: usize, maps: Vec<PointedMap>) -> Result<Self, SimplexError> {
        let mut cur = start;
        for (index, f) in maps.iter().enumerate() {
            if f.source() != cur {
                return Err(SimplexError::NotComposable { index, found: f.source(), expected: cur });
            }
            cur = f.target();
        }
        Ok(Simplex { start, maps })
    }

    pub fn point(n: usize) -> Self {
        Simplex { start: n, maps: Vec::new() }
    }

    pub fn from_maps(maps: Vec<PointedMap>) -> Result<Self, SimplexError> {
        let start = maps.first().map_or(0, PointedMap::source);
        Simplex::new(start, maps)
    }

    pub fn dim(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[PointedMap] {
        &self.maps
    }

    /// Sizes `n_0, .., n_k`.
    pub fn objects(&self) -> Vec<usize> {
        std::iter::once(self.start).chain(self.maps.iter().map(PointedMap::target)).collect()
    }

    pub fn face(&self, i: usize) -> Result<Simplex, SimplexError> {
        let k = self.dim();
        if k == 0 || i > k {
            return Err(SimplexError::Index { index: i, dim: k });
        }
        let mut maps = self.maps.clone();
        if i == 0 {
            maps.remove(0);
            let start = self.objects()[1];
            return Ok(Simplex { start, maps });
        }
        if i == k {
            maps.pop();
        } else {
            let composite = maps[i].compose(&maps[i - 1]).expect("composable chain");
            maps.splice(i - 1..=i, [composite]);
        }
        Ok(Simplex { start: self.start, maps })
    }

    pub fn degeneracy(&self, i: usize) -> Result<Simplex, SimplexError> {
        let k = self.dim();
        if i > k {
            return Err(SimplexError::Index { index: i, dim: k });
        }
        let mut maps = self.maps.clone();
        maps.insert(i, PointedMap::identity(self.objects()[i]));
        Ok(Simplex { start: self.start, maps })
    }

    /// Object indices of `face(i)` inside `self`.
    pub fn face_levels(&self, i: usize) -> Vec<usize> {
        (0..=self.dim()).filter(|&l| l != i).collect()
    }

    /// Object indices of `self` hit by each object of `degeneracy(i)`.
    pub fn degeneracy_levels(&self, i: usize) -> Vec<usize> {
        (0..=self.dim() + 1).map(|l| if l <= i { l } else { l - 1 }).collect()
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_+", self.start)?;
        for m in &self.maps {
            write!(f, " -{:?}-> {}_+", m.image(), m.target())?;
        }
        Ok(())
    }
}

/// Edge index of element `j` (1-based) of level `l` in `w_forest(σ)`.
pub(crate) fn level_offsets(sigma: &Simplex) -> Vec<usize> {
    let mut offsets = vec![0];
    for n in sigma.objects() {
        offsets.push(offsets.last().unwrap() + n);
    }
    offsets
}

/// The forest of a simplex: one edge per element of each level, and for each
/// element `j` of level `l ≥ 1` a vertex with output `j` and inputs the
/// preimage of `j` in level `l - 1`. Elements sent to the base point become
/// roots.
pub fn w_forest(sigma: &Simplex) -> Forest {
    let objects = sigma.objects();
    let offsets = level_offsets(sigma);
    let mut labels = Vec::with_capacity(*offsets.last().unwrap());
    for (l, &n) in objects.iter().enumerate() {
        labels.extend((1..=n).map(|j| format!("e{l}_{j}")));
    }
    let mut vertices = Vec::new();
    for (l, f) in sigma.maps.iter().enumerate() {
        for j in 1..=f.target() {
            vertices.push(Vertex {
                inputs: f.preimage(j).into_iter().map(|i| offsets[l] + i - 1).collect(),
                output: offsets[l + 1] + j - 1,
            });
        }
    }
    Forest::new(labels, vertices).expect("leveled forest")
}

/// Edge map `w(src) → w(tgt)` sending element `j` of level `l` to element
/// `j` of level `levels[l]`.
pub fn level_edge_map(src: &Simplex, tgt: &Simplex, levels: &[usize]) -> Vec<usize> {
    let (so, to) = (level_offsets(src), level_offsets(tgt));
    let mut map = Vec::with_capacity(*so.last().unwrap());
    for (l, n) in src.objects().into_iter().enumerate() {
        map.extend((0..n).map(|j| to[levels[l]] + j));
    }
    map
}

/// All simplices of dimension `dim` with objects in `0_+ .. horizon_+`.
pub fn enumerate_simplices(horizon: usize, dim: usize) -> Vec<Simplex> {
    let mut out: Vec<Simplex> = (0..=horizon).map(Simplex::point).collect();
    for _ in 0..dim {
        let mut next = Vec::new();
        for s in &out {
            let last = *s.objects().last().unwrap();
            for m in 0..=horizon {
                for f in enumerate_maps(last, m) {
                    let mut maps = s.maps.clone();
                    maps.push(f);
                    next.push(Simplex { start: s.start, maps });
                }
            }
        }
        out = next;
    }
    out
}

/// A simplex together with forest maps `F → w(σ) → F` composing to the
/// identity.
#[derive(Clone, Debug)]
pub struct Retraction {
    pub simplex: Simplex,
    pub include: Vec<usize>,
    pub retract: Vec<usize>,
}

/// Levels a forest, padding long edges with unary vertices, so that it is a
/// retract of the forest of a simplex.
pub fn retract_through_simplex(forest: &Forest) -> Retraction {
    // height of each vertex above the leaves
    let mut height = vec![0usize; forest.vertex_count()];
    for v in forest.bottom_up() {
        height[v] = 1 + forest.vertices()[v]
            .inputs
            .iter()
            .filter_map(|&e| forest.producer(e))
            .map(|u| height[u])
            .max()
            .unwrap_or(0);
    }
    let top = height.iter().copied().max().unwrap_or(0);
    let n_edges = forest.edge_count();
    let low: Vec<usize> = (0..n_edges).map(|e| forest.producer(e).map_or(0, |u| height[u])).collect();
    let high: Vec<usize> = (0..n_edges)
        .map(|e| forest.consumer(e).map_or(low[e], |v| height[v] - 1))
        .collect();
    // position of edge e at level l, 1-based
    let mut pos = vec![vec![0usize; top + 1]; n_edges];
    let mut sizes = vec![0usize; top + 1];
    for l in 0..=top {
        for e in 0..n_edges {
            if low[e] <= l && l <= high[e] {
                sizes[l] += 1;
                pos[e][l] = sizes[l];
            }
        }
    }
    let mut maps = Vec::with_capacity(top);
    for l in 1..=top {
        let mut image = vec![0usize; sizes[l - 1]];
        for e in 0..n_edges {
            if !(low[e] < l && l - 1 <= high[e]) {
                continue;
            }
            image[pos[e][l - 1] - 1] = if l <= high[e] {
                pos[e][l]
            } else {
                match forest.consumer(e) {
                    Some(v) if height[v] == l => pos[forest.vertices()[v].output][l],
                    _ => 0,
                }
            };
        }
        maps.push(PointedMap::new(sizes[l], image).expect("level map"));
    }
    let simplex = Simplex::new(sizes[0], maps).expect("leveled chain");
    let offsets = level_offsets(&simplex);
    let include = (0..n_edges).map(|e| offsets[low[e]] + pos[e][low[e]] - 1).collect();
    let mut retract = vec![0usize; *offsets.last().unwrap()];
    for e in 0..n_edges {
        for l in low[e]..=high[e] {
            retract[offsets[l] + pos[e][l] - 1] = e;
        }
    }
    Retraction { simplex, include, retract }
}

#[cfg(test)]
mod tests {
    use super::super::{forest_map_check, Forest};
    use super::*;

    fn pm(target: usize, image: &[usize]) -> PointedMap {
        PointedMap::new(target, image.to_vec()).unwrap()
    }

    #[test]
    fn point_is_etas() {
        let f = w_forest(&Simplex::point(3));
        assert_eq!(f.canonical(), "| | |");
    }

    #[test]
    fn one_simplex_forest() {
        // 6_+ → 3_+ with 1,2,3 ↦ 2, 4 ↦ 3, 5,6 ↦ *
        let sigma = Simplex::from_maps(vec![pm(3, &[2, 2, 2, 3, 0, 0])]).unwrap();
        let expected = Forest::parse("a(); b(x, y, z); c(w); e; f").unwrap();
        assert_eq!(w_forest(&sigma).canonical(), expected.canonical());
    }

    #[test]
    fn two_simplex_forest() {
        let sigma = Simplex::from_maps(vec![pm(3, &[1, 1, 3, 3]), pm(1, &[1, 1, 0])]).unwrap();
        let expected = Forest::parse("r(a(x, y), b()); c(u, v)").unwrap();
        assert_eq!(w_forest(&sigma).canonical(), expected.canonical());
    }

    #[test]
    fn faces_and_degeneracies_are_forest_maps() {
        for dim in 1..=2 {
            for sigma in enumerate_simplices(3, dim) {
                let w = w_forest(&sigma);
                for i in 0..=dim {
                    let face = sigma.face(i).unwrap();
                    let map = level_edge_map(&face, &sigma, &sigma.face_levels(i));
                    assert_eq!(forest_map_check(&w_forest(&face), &w, &map), Ok(()), "{sigma:?} d{i}");
                    let deg = sigma.degeneracy(i).unwrap();
                    let map = level_edge_map(&deg, &sigma, &sigma.degeneracy_levels(i));
                    assert_eq!(forest_map_check(&w_forest(&deg), &w, &map), Ok(()), "{sigma:?} s{i}");
                }
            }
        }
    }

    #[test]
    fn retraction_of_a_forest() {
        let f = Forest::parse("r(a(x, y), b); c()").unwrap();
        let ret = retract_through_simplex(&f);
        let w = w_forest(&ret.simplex);
        assert_eq!(forest_map_check(&f, &w, &ret.include), Ok(()));
        assert_eq!(forest_map_check(&w, &f, &ret.retract), Ok(()));
        let composite: Vec<usize> = ret.include.iter().map(|&e| ret.retract[e]).collect();
        assert_eq!(composite, (0..f.edge_count()).collect::<Vec<_>>());
    }
}
