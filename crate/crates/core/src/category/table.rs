use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{check_category, Adjacency, ArrowId, Category, CategoryViolation, ObjId};

/// A category stored as explicit tables.
#[derive(Clone, Debug, Default)]
pub struct FinCategory {
    adj: Adjacency,
    object_labels: Vec<String>,
    arrow_labels: Vec<String>,
    composition: HashMap<(ArrowId, ArrowId), ArrowId>,
}

#[derive(Debug, Clone, Default)]
pub struct FinCategoryBuilder {
    objects: Vec<String>,
    arrows: Vec<(ObjId, ObjId, String)>,
    rules: Vec<(ArrowId, ArrowId, ArrowId)>,
}

impl FinCategoryBuilder {
    pub fn object(&mut self, label: &str) -> ObjId {
        self.objects.push(label.to_string());
        ObjId(self.objects.len() - 1)
    }

    /// Adds a non-identity arrow. Ids handed out here refer to the builder;
    /// the built category places identities first, one per object.
    pub fn arrow(&mut self, s: ObjId, t: ObjId, label: &str) -> ArrowId {
        self.arrows.push((s, t, label.to_string()));
        ArrowId(self.arrows.len() - 1)
    }

    /// Declares `g ∘ f = h` for non-identity arrows.
    pub fn compose(&mut self, g: ArrowId, f: ArrowId, h: ArrowId) -> &mut Self {
        self.rules.push((g, f, h));
        self
    }

    pub fn build(&self) -> Result<FinCategory, CategoryViolation> {
        let n = self.objects.len();
        let mut adj = Adjacency::with_objects(n);
        let mut arrow_labels = Vec::new();
        for x in 0..n {
            let a = adj.add_arrow(ObjId(x), ObjId(x));
            adj.set_identity(ObjId(x), a);
            arrow_labels.push(format!("id_{}", self.objects[x]));
        }
        for (s, t, label) in &self.arrows {
            adj.add_arrow(*s, *t);
            arrow_labels.push(label.clone());
        }
        let shift = |a: ArrowId| ArrowId(a.0 + n);
        let mut composition = HashMap::new();
        for a in 0..adj.arrow_count() {
            let a = ArrowId(a);
            composition.insert((a, adj.identity(adj.source(a))), a);
            composition.insert((adj.identity(adj.target(a)), a), a);
        }
        for &(g, f, h) in &self.rules {
            composition.insert((shift(g), shift(f)), shift(h));
        }
        let c = FinCategory { adj, object_labels: self.objects.clone(), arrow_labels, composition };
        check_category(&c)?;
        Ok(c)
    }
}

impl FinCategory {
    pub fn builder() -> FinCategoryBuilder {
        FinCategoryBuilder::default()
    }

    /// The poset on `0..n` with `i ≤ j` whenever `le(i, j)`. `le` must be a
    /// partial order.
    pub fn poset(n: usize, le: impl Fn(usize, usize) -> bool) -> Result<Self, CategoryViolation> {
        let mut b = Self::builder();
        for i in 0..n {
            b.object(&i.to_string());
        }
        let mut ids = HashMap::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && le(i, j) {
                    ids.insert((i, j), b.arrow(ObjId(i), ObjId(j), &format!("{i}≤{j}")));
                }
            }
        }
        for (&(i, j), &f) in &ids {
            for (&(j2, k), &g) in &ids {
                if j2 == j && k != i {
                    b.compose(g, f, ids[&(i, k)]);
                }
            }
        }
        b.build()
    }

    /// Copies any category into table form, keeping ids and labels.
    pub fn materialize<C: Category + ?Sized>(c: &C) -> Self {
        let mut adj = Adjacency::with_objects(c.object_count());
        for a in c.arrows() {
            adj.add_arrow(c.source(a), c.target(a));
        }
        for x in c.objects() {
            adj.set_identity(x, c.identity(x));
        }
        let mut composition = HashMap::new();
        for y in c.objects() {
            for &f in c.arrows_to(y) {
                for &g in c.arrows_from(y) {
                    if let Some(h) = c.compose(g, f) {
                        composition.insert((g, f), h);
                    }
                }
            }
        }
        FinCategory {
            adj,
            object_labels: c.objects().map(|x| c.object_label(x)).collect(),
            arrow_labels: c.arrows().map(|a| c.arrow_label(a)).collect(),
            composition,
        }
    }

    /// Inverse of [`dump`].
    pub fn parse_dump(text: &str) -> Result<Self, ParseDumpError> {
        let mut object_labels = Vec::new();
        let mut arrows: Vec<(usize, usize, String)> = Vec::new();
        let mut identities = Vec::new();
        let mut triples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || ParseDumpError::Line { line: lineno + 1, content: line.to_string() };
            let mut words = line.split_whitespace();
            let tag = words.next().ok_or_else(bad)?;
            let mut num = || -> Result<usize, ParseDumpError> {
                words.next().and_then(|w| w.parse().ok()).ok_or_else(bad)
            };
            match tag {
                "object" => {
                    let id = num()?;
                    if id != object_labels.len() {
                        return Err(bad());
                    }
                    let label = line.splitn(3, ' ').nth(2).unwrap_or("").to_string();
                    object_labels.push(label);
                }
                "arrow" => {
                    let (id, s, t) = (num()?, num()?, num()?);
                    if id != arrows.len() {
                        return Err(bad());
                    }
                    let label = line.splitn(5, ' ').nth(4).unwrap_or("").to_string();
                    arrows.push((s, t, label));
                }
                "identity" => identities.push((num()?, num()?)),
                "compose" => triples.push((num()?, num()?, num()?)),
                _ => return Err(bad()),
            }
        }
        let n = object_labels.len();
        let mut adj = Adjacency::with_objects(n);
        for (s, t, _) in &arrows {
            if *s >= n || *t >= n {
                return Err(ParseDumpError::Dangling);
            }
            adj.add_arrow(ObjId(*s), ObjId(*t));
        }
        if identities.len() != n {
            return Err(ParseDumpError::Dangling);
        }
        for (x, a) in identities {
            if x >= n || a >= arrows.len() {
                return Err(ParseDumpError::Dangling);
            }
            adj.set_identity(ObjId(x), ArrowId(a));
        }
        let mut composition = HashMap::new();
        for (g, f, h) in triples {
            if g.max(f).max(h) >= arrows.len() {
                return Err(ParseDumpError::Dangling);
            }
            composition.insert((ArrowId(g), ArrowId(f)), ArrowId(h));
        }
        let c = FinCategory {
            adj,
            object_labels,
            arrow_labels: arrows.into_iter().map(|(_, _, l)| l).collect(),
            composition,
        };
        check_category(&c)?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseDumpError {
    #[error("line {line}: cannot parse `{content}`")]
    Line { line: usize, content: String },
    #[error("reference to an undeclared object or arrow")]
    Dangling,
    #[error(transparent)]
    NotACategory(#[from] CategoryViolation),
}

/// Plain-text dump: objects, arrows with endpoints, identities, and every
/// composition triple `g f g∘f`, in id order.
pub fn dump<C: Category + ?Sized>(c: &C) -> String {
    let mut out = String::new();
    for x in c.objects() {
        let _ = writeln!(out, "object {} {}", x.0, c.object_label(x));
    }
    for a in c.arrows() {
        let _ = writeln!(out, "arrow {} {} {} {}", a.0, c.source(a).0, c.target(a).0, c.arrow_label(a));
    }
    for x in c.objects() {
        let _ = writeln!(out, "identity {} {}", x.0, c.identity(x).0);
    }
    let mut triples = Vec::new();
    for y in c.objects() {
        for &f in c.arrows_to(y) {
            for &g in c.arrows_from(y) {
                if let Some(h) = c.compose(g, f) {
                    triples.push((g.0, f.0, h.0));
                }
            }
        }
    }
    triples.sort_unstable();
    for (g, f, h) in triples {
        let _ = writeln!(out, "compose {g} {f} {h}");
    }
    out
}

impl Category for FinCategory {
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
        self.composition.get(&(g, f)).copied()
    }
    fn arrows_from(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_from(x)
    }
    fn arrows_to(&self, x: ObjId) -> &[ArrowId] {
        self.adj.arrows_to(x)
    }
    fn object_label(&self, x: ObjId) -> String {
        self.object_labels[x.0].clone()
    }
    fn arrow_label(&self, a: ArrowId) -> String {
        self.arrow_labels[a.0].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_composite_is_rejected() {
        let mut b = FinCategory::builder();
        let (x, y, z) = (b.object("x"), b.object("y"), b.object("z"));
        b.arrow(x, y, "f");
        b.arrow(y, z, "g");
        assert!(b.build().is_err());
    }

    #[test]
    fn dump_roundtrip() {
        let c = FinCategory::poset(3, |i, j| i <= j).unwrap();
        let text = dump(&c);
        let back = FinCategory::parse_dump(&text).unwrap();
        assert_eq!(dump(&back), text);
        assert_eq!(back.arrow_count(), 6);
    }

    #[test]
    fn dump_rejects_garbage() {
        assert!(matches!(FinCategory::parse_dump("object zero"), Err(ParseDumpError::Line { line: 1, .. })));
    }
}
