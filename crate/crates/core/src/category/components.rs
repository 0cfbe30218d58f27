use super::{Category, ObjId};

/// A partition of the objects into zig-zag components. Each class is sorted
/// and represented by its least object; classes are ordered by representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub classes: Vec<Vec<ObjId>>,
    pub class_of: Vec<usize>,
}

impl Components {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn representative(&self, x: ObjId) -> ObjId {
        self.classes[self.class_of[x.0]][0]
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn connected_components<C: Category + ?Sized>(c: &C) -> Components {
    let n = c.object_count();
    let mut parent: Vec<usize> = (0..n).collect();
    for a in c.arrows() {
        let (s, t) = (find(&mut parent, c.source(a).0), find(&mut parent, c.target(a).0));
        if s != t {
            parent[s.max(t)] = s.min(t);
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<ObjId>> = Vec::new();
    let mut class_of_root = vec![usize::MAX; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = classes.len();
            classes.push(Vec::new());
        }
        class_of[x] = class_of_root[r];
        classes[class_of[x]].push(ObjId(x));
    }
    Components { classes, class_of }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FinCategory;

    #[test]
    fn discrete_and_connected() {
        let mut b = FinCategory::builder();
        for l in ["a", "b", "c"] {
            b.object(l);
        }
        assert_eq!(connected_components(&b.build().unwrap()).len(), 3);
        let c = crate::category::tests::walking_arrow();
        assert_eq!(connected_components(&c).len(), 1);
    }

    #[test]
    fn zig_zag_joins() {
        // 0 → 1 ← 2, 3 alone
        let c = FinCategory::poset(4, |i, j| i == j || (j == 1 && i != 3)).unwrap();
        let comps = connected_components(&c);
        assert_eq!(comps.classes, vec![vec![ObjId(0), ObjId(1), ObjId(2)], vec![ObjId(3)]]);
        assert_eq!(comps.representative(ObjId(2)), ObjId(0));
    }
}
