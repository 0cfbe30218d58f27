//! Non-planar trees and forests, their operads, the forest attached to a
//! simplex of `Fin_*`, dendroidal nerves of operads, and unique lifting
//! against leaf inclusions.

mod comparison;
mod nerve;
mod omega;
mod simplex;

pub use comparison::{nerve_comparison, NerveError, NerveFailure, NerveReport};
pub use nerve::{decorations, l_local_check, pull_back, segal_counts, subtree_composite, Decoration, LLocalFailure};
pub use omega::{forest_map_check, omega_hom, subtree_leaves, tree_operad, ForestMapFailure};
pub use simplex::{enumerate_simplices, level_edge_map, retract_through_simplex, w_forest, Retraction, Simplex, SimplexError};

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub inputs: Vec<usize>,
    pub output: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("edge {0} is the output of two vertices")]
    TwoProducers(usize),
    #[error("edge {0} is the input of two vertices")]
    TwoConsumers(usize),
    #[error("edge {0} lies on a cycle")]
    Cycle(usize),
    #[error("edge index {0} out of range")]
    Edge(usize),
    #[error("expected one tree, found {0}")]
    NotATree(usize),
}

/// A finite forest: edges, vertices with an input list and one output edge.
/// Roots are the edges that are not the input of any vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    labels: Vec<String>,
    vertices: Vec<Vertex>,
    producer: Vec<Option<usize>>,
    consumer: Vec<Option<usize>>,
    roots: Vec<usize>,
}

/// A forest with exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree(Forest);

impl Forest {
    pub fn new(labels: Vec<String>, vertices: Vec<Vertex>) -> Result<Self, TreeError> {
        let n = labels.len();
        let mut producer = vec![None; n];
        let mut consumer = vec![None; n];
        for (v, vert) in vertices.iter().enumerate() {
            if vert.output >= n {
                return Err(TreeError::Edge(vert.output));
            }
            if producer[vert.output].replace(v).is_some() {
                return Err(TreeError::TwoProducers(vert.output));
            }
            for &e in &vert.inputs {
                if e >= n {
                    return Err(TreeError::Edge(e));
                }
                if consumer[e].replace(v).is_some() {
                    return Err(TreeError::TwoConsumers(e));
                }
            }
        }
        // walking down from any edge must reach a root within n steps
        for start in 0..n {
            let mut e = start;
            for step in 0..=n {
                match consumer[e] {
                    None => break,
                    Some(v) if step < n => e = vertices[v].output,
                    Some(_) => return Err(TreeError::Cycle(start)),
                }
            }
        }
        let roots = (0..n).filter(|&e| consumer[e].is_none()).collect();
        Ok(Forest { labels, vertices, producer, consumer, roots })
    }

    pub fn empty() -> Self {
        Forest::new(Vec::new(), Vec::new()).expect("empty forest")
    }

    pub fn parse(text: &str) -> Result<Self, TreeError> {
        let mut p = Parser { text: text.as_bytes(), pos: 0, labels: Vec::new(), vertices: Vec::new() };
        p.skip_ws();
        if p.pos < p.text.len() {
            loop {
                p.tree()?;
                p.skip_ws();
                if p.eat(b';') {
                    continue;
                }
                break;
            }
        }
        p.skip_ws();
        if p.pos != p.text.len() {
            return Err(p.error("trailing input"));
        }
        Forest::new(p.labels, p.vertices)
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn label(&self, e: usize) -> &str {
        &self.labels[e]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// The vertex whose output is `e`.
    pub fn producer(&self, e: usize) -> Option<usize> {
        self.producer[e]
    }

    /// The vertex having `e` among its inputs.
    pub fn consumer(&self, e: usize) -> Option<usize> {
        self.consumer[e]
    }

    /// Edges that are not the output of a vertex.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.edge_count()).filter(|&e| self.producer[e].is_none()).collect()
    }

    /// Edges that are both an input and an output.
    pub fn inner_edges(&self) -> Vec<usize> {
        (0..self.edge_count()).filter(|&e| self.producer[e].is_some() && self.consumer[e].is_some()).collect()
    }

    /// The root edge below `e`.
    pub fn root_of(&self, mut e: usize) -> usize {
        while let Some(v) = self.consumer[e] {
            e = self.vertices[v].output;
        }
        e
    }

    /// Vertices ordered so that each comes after every vertex above it.
    pub fn bottom_up(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.vertices.len());
        for &r in &self.roots {
            self.post_order(r, &mut order);
        }
        order
    }

    fn post_order(&self, e: usize, out: &mut Vec<usize>) {
        if let Some(v) = self.producer[e] {
            for &i in &self.vertices[v].inputs {
                self.post_order(i, out);
            }
            out.push(v);
        }
    }

    /// The connected components, each relabeled densely.
    pub fn trees(&self) -> Vec<Tree> {
        self.roots.iter().map(|&r| Tree(self.component(r))).collect()
    }

    fn component(&self, root: usize) -> Forest {
        let mut edges = Vec::new();
        self.collect_edges(root, &mut edges);
        edges.sort_unstable();
        let mut index = vec![usize::MAX; self.edge_count()];
        for (i, &e) in edges.iter().enumerate() {
            index[e] = i;
        }
        let mut vs: Vec<usize> = edges.iter().filter_map(|&e| self.producer[e]).collect();
        vs.sort_unstable();
        let vertices = vs
            .iter()
            .map(|&v| Vertex {
                inputs: self.vertices[v].inputs.iter().map(|&e| index[e]).collect(),
                output: index[self.vertices[v].output],
            })
            .collect();
        Forest::new(edges.iter().map(|&e| self.labels[e].clone()).collect(), vertices).expect("component")
    }

    fn collect_edges(&self, e: usize, out: &mut Vec<usize>) {
        out.push(e);
        if let Some(v) = self.producer[e] {
            for &i in &self.vertices[v].inputs {
                self.collect_edges(i, out);
            }
        }
    }

    /// Disjoint union, edges and vertices of later forests shifted.
    pub fn disjoint_union(parts: &[Forest]) -> Forest {
        let mut labels = Vec::new();
        let mut vertices = Vec::new();
        for f in parts {
            let off = labels.len();
            labels.extend(f.labels.iter().cloned());
            vertices.extend(f.vertices.iter().map(|v| Vertex {
                inputs: v.inputs.iter().map(|&e| e + off).collect(),
                output: v.output + off,
            }));
        }
        Forest::new(labels, vertices).expect("disjoint union of forests")
    }

    /// Unordered-children canonical code of the tree above `e`: `|` for an
    /// edge without a vertex, `(…)` around the sorted codes of the inputs.
    pub fn code_at(&self, e: usize) -> String {
        match self.producer[e] {
            None => "|".to_string(),
            Some(v) => {
                let mut children: Vec<String> = self.vertices[v].inputs.iter().map(|&i| self.code_at(i)).collect();
                children.sort();
                format!("({})", children.concat())
            }
        }
    }

    /// Sorted tree codes separated by spaces; equal iff the forests are
    /// isomorphic.
    pub fn canonical(&self) -> String {
        let mut codes: Vec<String> = self.roots.iter().map(|&r| self.code_at(r)).collect();
        codes.sort();
        codes.join(" ")
    }

    pub fn from_code(code: &str) -> Result<Forest, TreeError> {
        let mut labels = Vec::new();
        let mut vertices = Vec::new();
        let bytes = code.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            if bytes[pos] == b' ' {
                pos += 1;
                continue;
            }
            decode_code(bytes, &mut pos, &mut labels, &mut vertices)?;
        }
        Forest::new(labels, vertices)
    }

    fn write_edge(&self, e: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.labels[e])?;
        if let Some(v) = self.producer[e] {
            write!(f, "(")?;
            for (k, &i) in self.vertices[v].inputs.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                self.write_edge(i, f)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn decode_code(
    bytes: &[u8],
    pos: &mut usize,
    labels: &mut Vec<String>,
    vertices: &mut Vec<Vertex>,
) -> Result<usize, TreeError> {
    let e = labels.len();
    labels.push(format!("e{e}"));
    match bytes.get(*pos) {
        Some(b'|') => {
            *pos += 1;
            Ok(e)
        }
        Some(b'(') => {
            *pos += 1;
            let mut inputs = Vec::new();
            while bytes.get(*pos) != Some(&b')') {
                if *pos >= bytes.len() {
                    return Err(TreeError::Parse { pos: *pos, msg: "unclosed vertex".into() });
                }
                inputs.push(decode_code(bytes, pos, labels, vertices)?);
            }
            *pos += 1;
            vertices.push(Vertex { inputs, output: e });
            Ok(e)
        }
        _ => Err(TreeError::Parse { pos: *pos, msg: "expected | or (".into() }),
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &r) in self.roots.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            self.write_edge(r, f)?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    labels: Vec<String>,
    vertices: Vec<Vertex>,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> TreeError {
        TreeError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.text.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn name(&mut self) -> Result<String, TreeError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() {
            let c = self.text[self.pos];
            if c.is_ascii_alphanumeric() || matches!(c, b'_' | b'\'' | b'.' | b'-') {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.error("expected an edge name"));
        }
        Ok(String::from_utf8_lossy(&self.text[start..self.pos]).into_owned())
    }

    fn tree(&mut self) -> Result<usize, TreeError> {
        let name = self.name()?;
        let e = self.labels.len();
        self.labels.push(name);
        if self.eat(b'(') {
            let mut inputs = Vec::new();
            if !self.eat(b')') {
                loop {
                    inputs.push(self.tree()?);
                    if self.eat(b',') {
                        continue;
                    }
                    if self.eat(b')') {
                        break;
                    }
                    return Err(self.error("expected , or )"));
                }
            }
            self.vertices.push(Vertex { inputs, output: e });
        }
        Ok(e)
    }
}

impl Tree {
    pub fn new(forest: Forest) -> Result<Self, TreeError> {
        match forest.roots.len() {
            1 => Ok(Tree(forest)),
            n => Err(TreeError::NotATree(n)),
        }
    }

    pub fn parse(text: &str) -> Result<Self, TreeError> {
        Tree::new(Forest::parse(text)?)
    }

    /// The tree with one edge and no vertex.
    pub fn eta() -> Self {
        Tree::parse("e").expect("η")
    }

    /// The corolla with `n` leaves.
    pub fn corolla(n: usize) -> Self {
        let leaves: Vec<String> = (1..=n).map(|i| format!("l{i}")).collect();
        Tree::parse(&format!("r({})", leaves.join(", "))).expect("corolla")
    }

    pub fn forest(&self) -> &Forest {
        &self.0
    }

    pub fn into_forest(self) -> Forest {
        self.0
    }

    pub fn root(&self) -> usize {
        self.0.roots[0]
    }

    pub fn canonical(&self) -> String {
        self.0.canonical()
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Canonical codes of all trees with at most `max_vertices` vertices, each of
/// arity at most `max_arity`, sorted.
pub fn enumerate_tree_codes(max_vertices: usize, max_arity: usize) -> Vec<String> {
    // shapes[k] = codes with exactly k vertices
    let mut shapes: Vec<BTreeSet<String>> = vec![BTreeSet::from(["|".to_string()])];
    for k in 1..=max_vertices {
        let mut level = BTreeSet::new();
        for arity in 0..=max_arity {
            for children in multisets_with_total(&shapes, arity, k - 1) {
                let mut c = children;
                c.sort();
                level.insert(format!("({})", c.concat()));
            }
        }
        shapes.push(level);
    }
    shapes.into_iter().flatten().collect()
}

fn multisets_with_total(shapes: &[BTreeSet<String>], count: usize, total: usize) -> Vec<Vec<String>> {
    if count == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for k in 0..=total {
        for s in &shapes[k] {
            for mut rest in multisets_with_total(shapes, count - 1, total - k) {
                rest.push(s.clone());
                out.push(rest);
            }
        }
    }
    out
}

/// Canonical codes of forests with at most `max_trees` trees drawn from
/// `tree_codes`, as multisets, including the empty forest.
pub fn enumerate_forest_codes(tree_codes: &[String], max_trees: usize) -> Vec<String> {
    let mut out: HashSet<String> = HashSet::new();
    let mut stack: Vec<(usize, Vec<String>)> = vec![(0, Vec::new())];
    while let Some((start, chosen)) = stack.pop() {
        let mut sorted = chosen.clone();
        sorted.sort();
        out.insert(sorted.join(" "));
        if chosen.len() == max_trees {
            continue;
        }
        for (i, code) in tree_codes.iter().enumerate().skip(start) {
            let mut next = chosen.clone();
            next.push(code.clone());
            stack.push((i, next));
        }
    }
    let mut v: Vec<String> = out.into_iter().collect();
    v.sort();
    v
}

/// Isomorphism by exhaustive matching of children, independent of the
/// canonical codes. Exponential; meant for small forests.
pub fn isomorphic_by_search(a: &Forest, b: &Forest) -> bool {
    fn edges_match(a: &Forest, x: usize, b: &Forest, y: usize) -> bool {
        match (a.producer(x), b.producer(y)) {
            (None, None) => true,
            (Some(v), Some(w)) => {
                let (xs, ys) = (&a.vertices[v].inputs, &b.vertices[w].inputs);
                xs.len() == ys.len() && match_all(xs, ys, &mut vec![false; ys.len()], &|i, j| edges_match(a, i, b, j))
            }
            _ => false,
        }
    }
    fn match_all(xs: &[usize], ys: &[usize], used: &mut Vec<bool>, ok: &dyn Fn(usize, usize) -> bool) -> bool {
        let Some((&x, rest)) = xs.split_first() else { return true };
        for (j, &y) in ys.iter().enumerate() {
            if !used[j] && ok(x, y) {
                used[j] = true;
                if match_all(rest, ys, used, ok) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    a.roots.len() == b.roots.len()
        && match_all(&a.roots, &b.roots, &mut vec![false; b.roots.len()], &|x, y| edges_match(a, x, b, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_display() {
        let t = Tree::parse("r(a(x, y), b)").unwrap();
        assert_eq!(t.to_string(), "r(a(x, y), b)");
        assert_eq!(t.forest().vertex_count(), 2);
        assert_eq!(t.forest().leaves().len(), 3);
        assert_eq!(t.forest().inner_edges().len(), 1);
        let f = Forest::parse("r(l1, l2); e").unwrap();
        assert_eq!(f.trees().len(), 2);
        assert!(Forest::parse("r(a,").is_err());
        assert!(Forest::parse("").unwrap().edge_count() == 0);
    }

    #[test]
    fn invalid_forests() {
        let two_out = Forest::new(
            vec!["a".into(), "b".into()],
            vec![Vertex { inputs: vec![], output: 0 }, Vertex { inputs: vec![1], output: 0 }],
        );
        assert_eq!(two_out, Err(TreeError::TwoProducers(0)));
        let cycle = Forest::new(vec!["a".into()], vec![Vertex { inputs: vec![0], output: 0 }]);
        assert!(matches!(cycle, Err(TreeError::Cycle(_))));
        assert!(matches!(Tree::parse("a; b"), Err(TreeError::NotATree(2))));
    }

    #[test]
    fn canonical_ignores_order_and_labels() {
        let a = Tree::parse("r(a(x, y), b)").unwrap();
        let b = Tree::parse("s(c, d(u, v))").unwrap();
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.canonical(), "((||)|)");
        let back = Forest::from_code(&a.canonical()).unwrap();
        assert_eq!(back.canonical(), a.canonical());
    }

    #[test]
    fn tree_counts() {
        // η; C0..C2; two-vertex trees with binary-or-less vertices
        let codes = enumerate_tree_codes(2, 2);
        assert_eq!(codes.len(), 1 + 3 + 6);
    }

    #[test]
    fn canonical_codes_agree_with_search() {
        let codes = enumerate_tree_codes(4, 3);
        let trees: Vec<Forest> = codes.iter().map(|c| Forest::from_code(c).unwrap()).collect();
        for (i, a) in trees.iter().enumerate() {
            for (j, b) in trees.iter().enumerate() {
                assert_eq!(isomorphic_by_search(a, b), i == j, "{} {}", codes[i], codes[j]);
            }
        }
    }

    /// A random labeled tree with at most `n` vertices, built by attaching
    /// new vertices to random open leaves.
    fn random_tree(arities: &[usize], picks: &[usize]) -> Forest {
        let mut labels = vec!["r".to_string()];
        let mut vertices = Vec::new();
        let mut open = vec![0usize];
        for (k, (&arity, &pick)) in arities.iter().zip(picks).enumerate() {
            if open.is_empty() {
                break;
            }
            let e = open.remove(pick % open.len());
            let inputs: Vec<usize> = (0..arity).map(|i| {
                labels.push(format!("e{k}_{i}"));
                labels.len() - 1
            }).collect();
            open.extend(&inputs);
            vertices.push(Vertex { inputs, output: e });
        }
        Forest::new(labels, vertices).unwrap()
    }

    /// Reverses every input list and relabels, giving an isomorphic tree.
    fn mirrored(f: &Forest) -> Forest {
        let n = f.edge_count();
        let relabel = |e: usize| n - 1 - e;
        let mut labels = f.labels.clone();
        labels.reverse();
        let vertices = f
            .vertices
            .iter()
            .rev()
            .map(|v| Vertex { inputs: v.inputs.iter().rev().map(|&e| relabel(e)).collect(), output: relabel(v.output) })
            .collect();
        Forest::new(labels, vertices).unwrap()
    }

    proptest! {
        #[test]
        fn canonical_form_is_sound(
            a in proptest::collection::vec(0usize..4, 0..6),
            pa in proptest::collection::vec(0usize..8, 6),
            b in proptest::collection::vec(0usize..4, 0..6),
            pb in proptest::collection::vec(0usize..8, 6),
        ) {
            let (s, t) = (random_tree(&a, &pa), random_tree(&b, &pb));
            prop_assert_eq!(s.canonical() == t.canonical(), isomorphic_by_search(&s, &t));
            prop_assert_eq!(mirrored(&s).canonical(), s.canonical());
            prop_assert!(isomorphic_by_search(&mirrored(&s), &s));
        }

        #[test]
        fn parse_display_roundtrip(a in proptest::collection::vec(0usize..4, 0..6), p in proptest::collection::vec(0usize..8, 6)) {
            let t = random_tree(&a, &p);
            let back = Forest::parse(&t.to_string()).unwrap();
            prop_assert_eq!(back.canonical(), t.canonical());
            prop_assert_eq!(back.to_string(), t.to_string());
        }
    }
}
