//! Finite pointed sets `n_+ = {*, 1, .., n}` and base-point preserving maps.
//!
//! A map `n_+ → m_+` is stored as its image vector `[f(1), .., f(n)]` with
//! `0` standing for the base point.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::category::{Adjacency, ArrowId, Category, ObjId};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointedMap {
    target: usize,
    image: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Active,
    Inert,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointedError {
    #[error("index {index} out of range for {size}_+")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("image value {value} exceeds target {target}_+")]
    ImageOutOfRange { value: usize, target: usize },
    #[error("cannot compose: {left}_+ is not {right}_+")]
    NotComposable { left: usize, right: usize },
}

impl PointedMap {
    pub fn new(target: usize, image: Vec<usize>) -> Result<Self, PointedError> {
        if let Some(&value) = image.iter().find(|&&v| v > target) {
            return Err(PointedError::ImageOutOfRange { value, target });
        }
        Ok(PointedMap { target, image })
    }

    pub fn identity(n: usize) -> Self {
        PointedMap { target: n, image: (1..=n).collect() }
    }

    /// The unique active map `n_+ → 1_+`.
    pub fn beta(n: usize) -> Self {
        PointedMap { target: 1, image: vec![1; n] }
    }

    /// The inert map `n_+ → 1_+` sending `i` to `1` and everything else to `*`.
    pub fn projection(n: usize, i: usize) -> Result<Self, PointedError> {
        if i == 0 || i > n {
            return Err(PointedError::IndexOutOfRange { index: i, size: n });
        }
        Ok(PointedMap { target: 1, image: (1..=n).map(|j| usize::from(j == i)).collect() })
    }

    pub fn source(&self) -> usize {
        self.image.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Value at `i` (1-based; `apply(0) == 0`).
    pub fn apply(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.image[i - 1]
        }
    }

    /// Non-base elements of the source sent to `j`, increasing.
    pub fn preimage(&self, j: usize) -> Vec<usize> {
        (1..=self.source()).filter(|&i| self.image[i - 1] == j).collect()
    }

    pub fn is_active(&self) -> bool {
        self.image.iter().all(|&v| v != 0)
    }

    pub fn is_inert(&self) -> bool {
        let mut hits = vec![0usize; self.target + 1];
        for &v in &self.image {
            hits[v] += 1;
        }
        hits[1..].iter().all(|&h| h == 1)
    }

    pub fn is_bijection(&self) -> bool {
        self.is_active() && self.is_inert()
    }

    pub fn classify(&self) -> MapKind {
        if self.is_active() {
            MapKind::Active
        } else if self.is_inert() {
            MapKind::Inert
        } else {
            MapKind::Neither
        }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &PointedMap) -> Result<PointedMap, PointedError> {
        if first.target != self.source() {
            return Err(PointedError::NotComposable { left: first.target, right: self.source() });
        }
        Ok(PointedMap { target: self.target, image: first.image.iter().map(|&v| self.apply(v)).collect() })
    }

    /// Canonical factorization `self = active ∘ inert`, the inert part keeping
    /// the surviving elements in their original order.
    pub fn factorize(&self) -> (PointedMap, PointedMap) {
        let mut inert = Vec::with_capacity(self.source());
        let mut active = Vec::new();
        for &v in &self.image {
            if v == 0 {
                inert.push(0);
            } else {
                active.push(v);
                inert.push(active.len());
            }
        }
        let k = active.len();
        (PointedMap { target: k, image: inert }, PointedMap { target: self.target, image: active })
    }
}

impl fmt::Debug for PointedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}→{}:{:?}", self.source(), self.target, self.image)
    }
}

impl fmt::Display for PointedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.image.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            if *v == 0 {
                write!(f, "*")?;
            } else {
                write!(f, "{v}")?;
            }
        }
        write!(f, "]:{}→{}", self.source(), self.target)
    }
}

/// All `(m+1)^n` maps `n_+ → m_+`, lexicographic in the image with
/// `* < 1 < .. < m`.
pub fn enumerate_maps(n: usize, m: usize) -> Vec<PointedMap> {
    let mut out = Vec::with_capacity((m + 1).pow(n as u32));
    let mut image = vec![0; n];
    loop {
        out.push(PointedMap { target: m, image: image.clone() });
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if image[k] < m {
                image[k] += 1;
                image[k + 1..].iter_mut().for_each(|v| *v = 0);
                break;
            }
        }
    }
}

/// All active maps `n_+ → m_+`, in the same order as [`enumerate_maps`].
pub fn enumerate_active(n: usize, m: usize) -> Vec<PointedMap> {
    enumerate_maps(n, m).into_iter().filter(PointedMap::is_active).collect()
}

/// The full subcategory of `Fin_*` on `0_+, .., h_+`.
#[derive(Clone, Debug)]
pub struct FinStar {
    horizon: usize,
    maps: Vec<PointedMap>,
    index: HashMap<PointedMap, ArrowId>,
    adj: Adjacency,
    active_only: bool,
}

impl FinStar {
    pub fn new(horizon: usize) -> Self {
        Self::build(horizon, false)
    }

    /// The wide subcategory on active maps.
    pub fn active(horizon: usize) -> Self {
        Self::build(horizon, true)
    }

    fn build(horizon: usize, active_only: bool) -> Self {
        let mut adj = Adjacency::with_objects(horizon + 1);
        let mut maps = Vec::new();
        let mut index = HashMap::new();
        for n in 0..=horizon {
            for m in 0..=horizon {
                for f in enumerate_maps(n, m) {
                    if active_only && !f.is_active() {
                        continue;
                    }
                    let a = adj.add_arrow(ObjId(n), ObjId(m));
                    if n == m && f == PointedMap::identity(n) {
                        adj.set_identity(ObjId(n), a);
                    }
                    index.insert(f.clone(), a);
                    maps.push(f);
                }
            }
        }
        FinStar { horizon, maps, index, adj, active_only }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn is_active_only(&self) -> bool {
        self.active_only
    }

    pub fn map(&self, a: ArrowId) -> &PointedMap {
        &self.maps[a.0]
    }

    pub fn arrow_of(&self, f: &PointedMap) -> Option<ArrowId> {
        self.index.get(f).copied()
    }
}

impl Category for FinStar {
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
        let h = self.maps[g.0].compose(&self.maps[f.0]).ok()?;
        self.arrow_of(&h)
    }
    fn arrows_from(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_from(x)
    }
    fn arrows_to(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_to(x)
    }
    fn object_label(&self, x: ObjId) -> String {
        format!("{}_+", x.0)
    }
    fn arrow_label(&self, a: ArrowId) -> String {
        self.maps[a.0].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::check_category;
    use proptest::prelude::*;

    fn pm(target: usize, image: &[usize]) -> PointedMap {
        PointedMap::new(target, image.to_vec()).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(PointedMap::identity(2).classify(), MapKind::Active);
        assert_eq!(PointedMap::projection(3, 2).unwrap().classify(), MapKind::Inert);
        assert_eq!(pm(2, &[1, 0]).classify(), MapKind::Neither);
    }

    #[test]
    fn beta_and_projection() {
        assert_eq!(PointedMap::beta(0), pm(1, &[]));
        assert_eq!(PointedMap::beta(1), PointedMap::identity(1));
        assert_eq!(PointedMap::projection(3, 2).unwrap(), pm(1, &[0, 1, 0]));
        assert_eq!(
            PointedMap::projection(3, 4),
            Err(PointedError::IndexOutOfRange { index: 4, size: 3 })
        );
        assert!(PointedMap::projection(3, 0).is_err());
    }

    #[test]
    fn factorization_of_six_to_three() {
        let alpha = pm(3, &[2, 2, 2, 3, 0, 0]);
        let (inert, active) = alpha.factorize();
        assert_eq!(inert, pm(4, &[1, 2, 3, 4, 0, 0]));
        assert_eq!(active, pm(3, &[2, 2, 2, 3]));
    }

    #[test]
    fn factorization_of_active_map_is_trivial() {
        let f = pm(2, &[2, 1, 1]);
        assert_eq!(f.factorize(), (PointedMap::identity(3), f));
    }

    #[test]
    fn enumeration_order_starts_with_constant_base_point() {
        let maps = enumerate_maps(2, 1);
        let images: Vec<_> = maps.iter().map(|f| f.image().to_vec()).collect();
        assert_eq!(images, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn truncated_fin_star_is_a_category() {
        check_category(&FinStar::new(2)).unwrap();
        check_category(&FinStar::active(2)).unwrap();
    }

    fn small_map() -> impl Strategy<Value = PointedMap> {
        (0usize..=4, 0usize..=4).prop_flat_map(|(n, m)| {
            proptest::collection::vec(0..=m, n).prop_map(move |image| PointedMap::new(m, image).unwrap())
        })
    }

    proptest! {
        #[test]
        fn factorization_roundtrip(f in small_map()) {
            let (inert, active) = f.factorize();
            prop_assert!(inert.is_inert());
            prop_assert!(active.is_active());
            prop_assert_eq!(active.compose(&inert).unwrap(), f);
        }

        #[test]
        fn inerts_and_actives_closed_under_composition(f in small_map(), seed in proptest::collection::vec(0usize..5, 4)) {
            let m = f.target();
            let g = PointedMap::new(m, seed.iter().take(m).map(|&v| v % (m + 1)).chain(std::iter::repeat(0)).take(m).collect()).unwrap();
            let gf = g.compose(&f).unwrap();
            if f.is_active() && g.is_active() { prop_assert!(gf.is_active()); }
            if f.is_inert() && g.is_inert() { prop_assert!(gf.is_inert()); }
            if f.is_active() && f.is_inert() { prop_assert!(f.source() == f.target()); }
        }
    }
}
