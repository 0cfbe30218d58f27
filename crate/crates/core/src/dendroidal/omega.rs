use std::collections::BTreeSet;

use thiserror::Error;

use super::Forest;
use crate::operad::library::thin;
use crate::operad::{BuildError, Color, ColoredOperad};
use crate::perm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestMapFailure {
    #[error("edge map has length {found}, expected {expected}")]
    Shape { found: usize, expected: usize },
    #[error("edge image {0} out of range")]
    Range(usize),
    #[error("vertex {vertex} sends two inputs to the same edge")]
    RepeatedInput { vertex: usize },
    #[error("vertex {vertex} has no subtree with the image profile")]
    NoSubtree { vertex: usize },
}

/// Whether `forest` has a subtree with root `root` and leaf set exactly
/// `leaves`. A single edge is the subtree with no vertices.
pub fn subtree_leaves(forest: &Forest, root: usize, leaves: &BTreeSet<usize>) -> bool {
    fn descend(forest: &Forest, e: usize, leaves: &BTreeSet<usize>, found: &mut Vec<usize>) -> bool {
        if leaves.contains(&e) {
            found.push(e);
            return true;
        }
        match forest.producer(e) {
            Some(v) => forest.vertices()[v].inputs.iter().all(|&i| descend(forest, i, leaves, found)),
            None => false,
        }
    }
    let mut found = Vec::new();
    descend(forest, root, leaves, &mut found) && found.len() == leaves.len()
}

/// Leaf sets of all subtrees rooted at `root`, including `{root}`.
fn subtrees_at(forest: &Forest, root: usize) -> Vec<BTreeSet<usize>> {
    let mut out = vec![BTreeSet::from([root])];
    if let Some(v) = forest.producer(root) {
        let mut acc = vec![BTreeSet::new()];
        for &i in &forest.vertices()[v].inputs {
            let below = subtrees_at(forest, i);
            acc = acc
                .iter()
                .flat_map(|a| below.iter().map(move |b| a.union(b).copied().collect()))
                .collect();
        }
        out.extend(acc);
    }
    out
}

/// The operad freely generated by the vertices of a forest: one color per
/// edge and one operation per subtree and ordering of its leaves.
pub fn tree_operad(forest: &Forest) -> Result<ColoredOperad, BuildError> {
    let mut profiles = Vec::new();
    let mut cap = 1;
    for r in 0..forest.edge_count() {
        for leaves in subtrees_at(forest, r) {
            if leaves.len() == 1 && leaves.contains(&r) {
                continue;
            }
            let list: Vec<usize> = leaves.iter().copied().collect();
            cap = cap.max(list.len());
            for sigma in perm::all(list.len()) {
                let inputs: Vec<Color> = sigma.permute(&list).into_iter().map(Color).collect();
                let name = format!(
                    "{}<-{}",
                    forest.label(r),
                    inputs.iter().map(|c| forest.label(c.0)).collect::<Vec<_>>().join(",")
                );
                profiles.push((inputs, Color(r), name));
            }
        }
    }
    let labels: Vec<&str> = forest.labels().iter().map(String::as_str).collect();
    thin(cap, &labels, &profiles)
}

/// Checks that an edge map `src → tgt` is a map of forests: each vertex goes
/// to the subtree spanned by the images of its edges.
pub fn forest_map_check(src: &Forest, tgt: &Forest, map: &[usize]) -> Result<(), ForestMapFailure> {
    if map.len() != src.edge_count() {
        return Err(ForestMapFailure::Shape { found: map.len(), expected: src.edge_count() });
    }
    if let Some(&bad) = map.iter().find(|&&e| e >= tgt.edge_count()) {
        return Err(ForestMapFailure::Range(bad));
    }
    for (v, vert) in src.vertices().iter().enumerate() {
        let images: BTreeSet<usize> = vert.inputs.iter().map(|&e| map[e]).collect();
        if images.len() != vert.inputs.len() {
            return Err(ForestMapFailure::RepeatedInput { vertex: v });
        }
        if !subtree_leaves(tgt, map[vert.output], &images) {
            return Err(ForestMapFailure::NoSubtree { vertex: v });
        }
    }
    Ok(())
}

/// All forest maps `src → tgt`, as edge maps, in lexicographic order.
pub fn omega_hom(src: &Forest, tgt: &Forest) -> Vec<Vec<usize>> {
    let (n, m) = (src.edge_count(), tgt.edge_count());
    let mut out = Vec::new();
    if m == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut map = vec![0; n];
    loop {
        if forest_map_check(src, tgt, &map).is_ok() {
            out.push(map.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            map[i] += 1;
            if map[i] < m {
                break;
            }
            map[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::Tree;
    use super::*;

    #[test]
    fn hom_from_eta_is_edges() {
        let t = Tree::parse("r(a(x, y), b)").unwrap();
        assert_eq!(omega_hom(Tree::eta().forest(), t.forest()).len(), 5);
    }

    #[test]
    fn corolla_automorphisms() {
        let c2 = Tree::corolla(2);
        assert_eq!(omega_hom(c2.forest(), c2.forest()).len(), 2);
    }

    #[test]
    fn inner_face_is_a_map() {
        let t = Tree::parse("r(a(x, y), b)").unwrap();
        let face = Tree::parse("r(x, y, b)").unwrap();
        // edges: face r,x,y,b ↦ tree r,x,y,b
        let map = vec![0, 2, 3, 4];
        assert_eq!(forest_map_check(face.forest(), t.forest(), &map), Ok(()));
        assert!(omega_hom(face.forest(), t.forest()).contains(&map));
        // the face has no binary subtree to receive the vertices of t
        assert!(omega_hom(t.forest(), face.forest()).is_empty());
    }

    #[test]
    fn unary_vertex_collapses() {
        let s = Tree::parse("r(a)").unwrap();
        assert_eq!(forest_map_check(s.forest(), Tree::eta().forest(), &[0, 0]), Ok(()));
    }

    #[test]
    fn tree_operad_profiles() {
        let t = Tree::parse("r(a(x, y), b)").unwrap();
        let p = tree_operad(t.forest()).unwrap();
        assert_eq!(p.color_count(), 5);
        assert_eq!(p.max_hom_size(), 1);
        // r ← x,y,b in 6 orders
        let r = Color(0);
        assert_eq!(p.hom(&[Color(2), Color(3), Color(4)], r).len(), 1);
        assert_eq!(p.hom(&[Color(4), Color(3), Color(2)], r).len(), 1);
        assert!(p.validate().is_valid());
    }
}
