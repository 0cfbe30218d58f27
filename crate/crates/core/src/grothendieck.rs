//! Unstraightening as the operadic Grothendieck construction, straightening
//! through connected components of a comma pullback, and the checks relating
//! the two.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::category::{connected_components, iso_check, Category, Functor, Pullback, Slice};
use crate::envelope::{is_strong_sm_left_fibration, slice_unit_base_change, EnvelopeCategory, EnvelopeError, StrongFailure};
use crate::operad::{
    algebra_map_check, Algebra, AlgebraViolation, BuildError, Color, ColoredOperad, OpId, OperadBuilder, OperadMap,
    OperadMapViolation,
};
use crate::operators::{is_operadic_left_fibration, FibrationFailure, OperatorCategory, OperatorError};
use crate::pointed::PointedMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrothendieckError {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(AlgebraViolation),
    #[error("total operad does not build: {0}")]
    Build(#[from] BuildError),
    #[error("invalid total operad: {0}")]
    InvalidTotal(String),
    #[error("projection is not an operad map: {0}")]
    Map(#[from] OperadMapViolation),
    #[error(transparent)]
    Operators(#[from] OperatorError),
    #[error("not an operadic left fibration: {0}")]
    NotOperadic(#[from] FibrationFailure),
    #[error("arity caps differ: base {base}, total {total}")]
    CapMismatch { base: usize, total: usize },
    #[error("component {component} of the comma category at color {color:?} has {canonical} canonical objects")]
    Contractibility { color: Color, component: usize, canonical: usize },
    #[error("straightened algebra is invalid: {0}")]
    StraightenedInvalid(AlgebraViolation),
}

/// An operad over a base operad, together with its fibers.
#[derive(Clone, Debug)]
pub struct OperadicLeftFibration {
    base: Arc<ColoredOperad>,
    total: Arc<ColoredOperad>,
    proj: OperadMap,
    fibers: Vec<Vec<Color>>,
    position: Vec<usize>,
    lifts: HashMap<(OpId, Vec<Color>), Vec<OpId>>,
}

impl OperadicLeftFibration {
    /// Assembles the data without checking the fibration condition.
    pub fn from_parts(
        base: Arc<ColoredOperad>,
        total: Arc<ColoredOperad>,
        proj: OperadMap,
    ) -> Result<Self, GrothendieckError> {
        if base.arity_cap() != total.arity_cap() {
            return Err(GrothendieckError::CapMismatch { base: base.arity_cap(), total: total.arity_cap() });
        }
        proj.check(&total, &base)?;
        let mut fibers = vec![Vec::new(); base.color_count()];
        let mut position = vec![0; total.color_count()];
        for t in total.colors() {
            let fiber = &mut fibers[proj.colors[t.0].0];
            position[t.0] = fiber.len();
            fiber.push(t);
        }
        let mut lifts: HashMap<(OpId, Vec<Color>), Vec<OpId>> = HashMap::new();
        for o in total.ops() {
            lifts.entry((proj.ops[o.0], total.inputs(o).to_vec())).or_default().push(o);
        }
        Ok(OperadicLeftFibration { base, total, proj, fibers, position, lifts })
    }

    /// Assembles and verifies the fibration condition on categories of
    /// operators at `horizon`.
    pub fn new(
        base: Arc<ColoredOperad>,
        total: Arc<ColoredOperad>,
        proj: OperadMap,
        horizon: usize,
    ) -> Result<Self, GrothendieckError> {
        let f = Self::from_parts(base, total, proj)?;
        f.check(horizon)?;
        Ok(f)
    }

    /// Runs the operadic left fibration check on categories of operators.
    pub fn check(&self, horizon: usize) -> Result<(), GrothendieckError> {
        let (t, b) = self.operator_categories(horizon)?;
        let functor = t.induced_functor(&self.proj, &b).expect("operad map induces a functor");
        is_operadic_left_fibration(&t, &b, &functor)?;
        Ok(())
    }

    pub fn operator_categories(&self, horizon: usize) -> Result<(OperatorCategory, OperatorCategory), OperatorError> {
        Ok((
            OperatorCategory::build(self.total.clone(), horizon)?,
            OperatorCategory::build(self.base.clone(), horizon)?,
        ))
    }

    pub fn base(&self) -> &Arc<ColoredOperad> {
        &self.base
    }

    pub fn total(&self) -> &Arc<ColoredOperad> {
        &self.total
    }

    pub fn proj(&self) -> &OperadMap {
        &self.proj
    }

    pub fn fiber(&self, c: Color) -> &[Color] {
        &self.fibers[c.0]
    }

    pub fn base_color(&self, t: Color) -> Color {
        self.proj.colors[t.0]
    }

    /// Index of `t` within its fiber.
    pub fn position(&self, t: Color) -> usize {
        self.position[t.0]
    }

    /// Operations of the total operad over `op` with the given inputs.
    pub fn lifts(&self, op: OpId, inputs: &[Color]) -> &[OpId] {
        self.lifts.get(&(op, inputs.to_vec())).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Operad-level unique lifting: every base operation has exactly one lift
    /// with any prescribed inputs. Returns the first offending operation and
    /// inputs.
    pub fn unique_operation_lifts(&self) -> Result<(), (OpId, Vec<Color>, usize)> {
        for op in self.base.ops() {
            let choices: Vec<&[Color]> = self.base.inputs(op).iter().map(|c| self.fiber(*c)).collect();
            let mut pick = vec![0; choices.len()];
            if choices.iter().any(|c| c.is_empty()) {
                continue;
            }
            loop {
                let inputs: Vec<Color> = pick.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
                let n = self.lifts(op, &inputs).len();
                if n != 1 {
                    return Err((op, inputs, n));
                }
                let mut i = pick.len();
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if pick[i] + 1 < choices[i].len() {
                        pick[i] += 1;
                        pick[i + 1..].iter_mut().for_each(|p| *p = 0);
                        break;
                    }
                    if i == 0 {
                        i = usize::MAX;
                        break;
                    }
                }
                if i == usize::MAX || pick.is_empty() {
                    break;
                }
            }
        }
        Ok(())
    }

    /// Relabels the total operad by permutations of its colors and operations.
    pub fn relabel(&self, color_perm: &[usize], op_perm: &[usize]) -> Result<Self, GrothendieckError> {
        let total = self.total.relabel(color_perm, op_perm);
        let mut colors = vec![Color(0); color_perm.len()];
        for (old, &new) in color_perm.iter().enumerate() {
            colors[new] = self.proj.colors[old];
        }
        let mut ops = vec![OpId(0); op_perm.len()];
        for (old, &new) in op_perm.iter().enumerate() {
            ops[new] = self.proj.ops[old];
        }
        Self::from_parts(self.base.clone(), Arc::new(total), OperadMap { colors, ops })
    }
}

/// The total operad of the Grothendieck construction: colors `(c, s)` with
/// `s ∈ F(c)`, operations `(φ, s)` from `(c_i, s_i)` to `(y, φ(s))`.
/// Colors are ordered by `c` then `s`, so `(c, s)` sits at position `s` of
/// its fiber.
pub fn grothendieck_operad(alg: &Algebra) -> Result<(ColoredOperad, OperadMap), BuildError> {
    let p = alg.operad();
    let mut b = OperadBuilder::new(p.arity_cap());
    let mut offset = Vec::with_capacity(p.color_count());
    let mut color_proj = Vec::new();
    for c in p.colors() {
        offset.push(color_proj.len());
        for s in 0..alg.carrier(c) {
            b.color(&format!("{}{}", p.color_name(c), s));
            color_proj.push(c);
        }
    }
    let lifted = |c: Color, s: usize| Color(offset[c.0] + s);
    let mut index: HashMap<(OpId, Vec<usize>), OpId> = HashMap::new();
    let mut info: Vec<(OpId, Vec<usize>)> = Vec::new();
    for t in 0..color_proj.len() {
        let c = color_proj[t];
        let s = t - offset[c.0];
        index.insert((p.unit(c), vec![s]), b.unit(Color(t)));
        info.push((p.unit(c), vec![s]));
    }
    for op in p.ops().filter(|&o| !p.is_unit(o)) {
        for args in alg.arguments(op) {
            let inputs: Vec<Color> = p.inputs(op).iter().zip(&args).map(|(&c, &s)| lifted(c, s)).collect();
            let output = lifted(p.output(op), alg.eval(op, &args));
            let label: Vec<String> = args.iter().map(usize::to_string).collect();
            let id = b.op(&format!("{}({})", p.op(op).name, label.join(",")), &inputs, output);
            index.insert((op, args.clone()), id);
            info.push((op, args));
        }
    }
    let total = b.build(
        |id, sigma| {
            let (op, args) = &info[id.0];
            let permuted: Vec<usize> = (0..args.len()).map(|i| args[sigma.apply(i)]).collect();
            index.get(&(p.act(*op, sigma), permuted)).copied()
        },
        |outer, inners| {
            let ops: Vec<OpId> = inners.iter().map(|q| info[q.0].0).collect();
            let chi = p.compose(info[outer.0].0, &ops)?;
            let args: Vec<usize> = inners.iter().flat_map(|q| info[q.0].1.iter().copied()).collect();
            index.get(&(chi, args)).copied()
        },
    )?;
    let ops = info.iter().map(|(op, _)| *op).collect();
    Ok((total, OperadMap { colors: color_proj, ops }))
}

/// The operad over `base` with fibers of the given sizes in which every
/// operation lifts to every compatible profile.
pub fn chaotic_operad(base: &ColoredOperad, sizes: &[usize]) -> Result<(ColoredOperad, OperadMap), BuildError> {
    let mut b = OperadBuilder::new(base.arity_cap());
    let mut fibers: Vec<Vec<Color>> = Vec::with_capacity(base.color_count());
    let mut color_proj = Vec::new();
    for c in base.colors() {
        fibers.push((0..sizes[c.0]).map(|s| b.color(&format!("{}{}", base.color_name(c), s))).collect());
        color_proj.extend(std::iter::repeat(c).take(sizes[c.0]));
    }
    let mut index: HashMap<(OpId, Vec<Color>, Color), OpId> = HashMap::new();
    let mut info: Vec<(OpId, Vec<Color>, Color)> = Vec::new();
    for t in 0..color_proj.len() {
        let key = (base.unit(color_proj[t]), vec![Color(t)], Color(t));
        index.insert(key.clone(), b.unit(Color(t)));
        info.push(key);
    }
    for op in base.ops() {
        let mut tuples: Vec<Vec<Color>> = vec![Vec::new()];
        for c in base.inputs(op) {
            tuples = tuples
                .into_iter()
                .flat_map(|p| fibers[c.0].iter().map(move |&t| [&p[..], &[t]].concat()))
                .collect();
        }
        for inputs in tuples {
            for &out in &fibers[base.output(op).0] {
                let key = (op, inputs.clone(), out);
                if index.contains_key(&key) {
                    continue;
                }
                let names: Vec<String> = inputs.iter().map(|t| t.0.to_string()).collect();
                let id = b.op(&format!("{}[{}→{}]", base.op(op).name, names.join(","), out.0), &inputs, out);
                index.insert(key.clone(), id);
                info.push(key);
            }
        }
    }
    let total = b.build(
        |id, sigma| {
            let (op, inputs, out) = &info[id.0];
            index.get(&(base.act(*op, sigma), sigma.permute(inputs), *out)).copied()
        },
        |outer, inners| {
            let ops: Vec<OpId> = inners.iter().map(|q| info[q.0].0).collect();
            let chi = base.compose(info[outer.0].0, &ops)?;
            let inputs: Vec<Color> = inners.iter().flat_map(|q| info[q.0].1.iter().copied()).collect();
            index.get(&(chi, inputs, info[outer.0].2)).copied()
        },
    )?;
    let ops = info.iter().map(|(op, _, _)| *op).collect();
    Ok((total, OperadMap { colors: color_proj, ops }))
}

/// The Grothendieck construction of a valid algebra, verified to be an
/// operadic left fibration at `horizon`.
pub fn unstraighten(alg: &Algebra, horizon: usize) -> Result<OperadicLeftFibration, GrothendieckError> {
    alg.validate().map_err(GrothendieckError::InvalidAlgebra)?;
    let (total, proj) = grothendieck_operad(alg)?;
    let report = total.validate();
    if let Some(v) = report.violations.first() {
        return Err(GrothendieckError::InvalidTotal(v.to_string()));
    }
    OperadicLeftFibration::new(alg.operad_arc().clone(), Arc::new(total), proj, horizon)
}

/// The comma pullback at one color and its component partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommaWitness {
    pub color: Color,
    pub objects: usize,
    pub arrows: usize,
    pub components: usize,
    /// Per component, the fiber element whose canonical object lies in it.
    pub canonical: Vec<Color>,
}

#[derive(Clone, Debug)]
pub struct StraighteningResult {
    pub algebra: Algebra,
    pub witnesses: Vec<CommaWitness>,
}

/// Straightens through the comma pullback `Env(T) ×_{Env(O)} Env(O)_{/⟨x⟩}`,
/// computed on the underlying categories (the active operators) at the arity
/// cap. Carrier elements are named by fiber position.
pub fn straighten(fib: &OperadicLeftFibration) -> Result<StraighteningResult, GrothendieckError> {
    let h = fib.base.arity_cap();
    let tact = OperatorCategory::active(fib.total.clone(), h)?;
    let oact = OperatorCategory::active(fib.base.clone(), h)?;
    let pf = tact.induced_functor(&fib.proj, &oact).expect("operad map induces a functor");
    let base = &*fib.base;
    // component index → carrier element, per color
    let mut naming: Vec<HashMap<usize, usize>> = Vec::with_capacity(base.color_count());
    let mut comps_by_color = Vec::with_capacity(base.color_count());
    let mut witnesses = Vec::with_capacity(base.color_count());
    for x in base.colors() {
        let apex = oact.object_of(&[x]).expect("singleton list");
        let slice = Slice::new(&oact, apex).expect("apex present");
        let pb = Pullback::new(&tact, &pf, &slice, &slice.forget(), &oact).expect("functors land in the base");
        let comps = connected_components(&pb);
        let id_obj = slice.object_of(oact.identity(apex)).expect("terminal object");
        let mut canonical: Vec<Vec<Color>> = vec![Vec::new(); comps.len()];
        for &s in fib.fiber(x) {
            let t = tact.object_of(&[s]).expect("singleton list");
            let e = pb.object_of(t, id_obj).expect("canonical object");
            canonical[comps.class_of[e.0]].push(s);
        }
        if let Some((component, c)) = canonical.iter().enumerate().find(|(_, c)| c.len() != 1) {
            return Err(GrothendieckError::Contractibility { color: x, component, canonical: c.len() });
        }
        let canonical: Vec<Color> = canonical.into_iter().map(|c| c[0]).collect();
        naming.push(canonical.iter().enumerate().map(|(k, &s)| (k, fib.position(s))).collect());
        witnesses.push(CommaWitness {
            color: x,
            objects: pb.object_count(),
            arrows: pb.arrow_count(),
            components: comps.len(),
            canonical,
        });
        comps_by_color.push((slice_objects(&slice, &oact), pb_index(&pb), comps.class_of));
    }
    let carriers: Vec<usize> = base.colors().map(|x| fib.fiber(x).len()).collect();
    let algebra = Algebra::from_fn(base_arc(fib), carriers, |op, args| {
        let inputs = base.inputs(op);
        let y = base.output(op);
        let colors: Vec<Color> = inputs.iter().zip(args).map(|(c, &k)| fib.fiber(*c)[k]).collect();
        let t = tact.object_of(&colors).expect("within the cap");
        let source = oact.object_of(inputs).expect("within the cap");
        let arrow = oact.arrow_of(source, &PointedMap::beta(inputs.len()), &[op]).expect("operation as arrow");
        let (slice_objs, index, class_of) = &comps_by_color[y.0];
        let e = index[&(t, slice_objs[&arrow])];
        naming[y.0][&class_of[e.0]]
    })
    .expect("well-shaped tables");
    algebra.validate().map_err(GrothendieckError::StraightenedInvalid)?;
    Ok(StraighteningResult { algebra, witnesses })
}

fn base_arc(fib: &OperadicLeftFibration) -> Arc<ColoredOperad> {
    fib.base.clone()
}

fn slice_objects(
    slice: &Slice<'_, OperatorCategory>,
    oact: &OperatorCategory,
) -> HashMap<crate::category::ArrowId, crate::category::ObjId> {
    oact.arrows_to(slice.apex()).iter().map(|&h| (h, slice.object_of(h).expect("slice object"))).collect()
}

fn pb_index<A: Category, C: Category>(
    pb: &Pullback<A, C>,
) -> HashMap<(crate::category::ObjId, crate::category::ObjId), crate::category::ObjId> {
    pb.objects().map(|e| (pb.pair(e), e)).collect()
}

/// `St(U(g))` for a map `g` of fibrations over the same base: carrier
/// element at position `k` goes to the position of its image.
pub fn straighten_map(map: &OperadMap, src: &OperadicLeftFibration, tgt: &OperadicLeftFibration) -> Vec<Vec<usize>> {
    src.base
        .colors()
        .map(|x| src.fiber(x).iter().map(|&t| tgt.position(map.colors[t.0])).collect())
        .collect()
}

/// The map of Grothendieck constructions induced by an algebra map.
pub fn unstraighten_map(
    components: &[Vec<usize>],
    src: &OperadicLeftFibration,
    tgt: &OperadicLeftFibration,
) -> Option<OperadMap> {
    let colors: Vec<Color> = src
        .total
        .colors()
        .map(|t| {
            let x = src.base_color(t);
            tgt.fiber(x).get(*components[x.0].get(src.position(t))?).copied()
        })
        .collect::<Option<_>>()?;
    let ops = src
        .total
        .ops()
        .map(|o| {
            let inputs: Vec<Color> = src.total.inputs(o).iter().map(|t| colors[t.0]).collect();
            match tgt.lifts(src.proj.ops[o.0], &inputs) {
                [only] => Some(*only),
                _ => None,
            }
        })
        .collect::<Option<_>>()?;
    Some(OperadMap { colors, ops })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FibrewiseFailure {
    #[error("map does not commute with the projections at color {0:?}")]
    NotOverBase(Color),
    #[error("map does not commute with the projections at operation {0:?}")]
    OpNotOverBase(OpId),
    #[error("map is not a bijection on the fiber over {0:?}")]
    NotBijective(Color),
}

/// Whether a map of fibrations over the same base is a bijection on the fiber
/// over every color.
pub fn is_fibrewise_equivalence(
    map: &OperadMap,
    src: &OperadicLeftFibration,
    tgt: &OperadicLeftFibration,
) -> Result<(), FibrewiseFailure> {
    for t in src.total.colors() {
        if tgt.base_color(map.colors[t.0]) != src.base_color(t) {
            return Err(FibrewiseFailure::NotOverBase(src.base_color(t)));
        }
    }
    for o in src.total.ops() {
        if tgt.proj.ops[map.ops[o.0].0] != src.proj.ops[o.0] {
            return Err(FibrewiseFailure::OpNotOverBase(o));
        }
    }
    for x in src.base.colors() {
        let mut image: Vec<usize> = src.fiber(x).iter().map(|t| tgt.position(map.colors[t.0])).collect();
        image.sort_unstable();
        image.dedup();
        if image.len() != src.fiber(x).len() || image.len() != tgt.fiber(x).len() {
            return Err(FibrewiseFailure::NotBijective(x));
        }
    }
    Ok(())
}

/// `iso_check` of the induced functor on categories of operators.
pub fn is_operator_iso(map: &OperadMap, src: &OperatorCategory, tgt: &OperatorCategory) -> bool {
    src.induced_functor(map, tgt).is_some_and(|f| iso_check(src, tgt, &f))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundtripFailure {
    #[error(transparent)]
    Grothendieck(#[from] GrothendieckError),
    #[error("carrier of {0:?} changed size")]
    Carrier(Color),
    #[error("action tables differ after naming components")]
    Tables,
    #[error("naturality fails for an algebra map")]
    Naturality,
    #[error("no operation of the roundtrip over {0:?} with the mapped inputs")]
    MissingOperation(OpId),
    #[error("comparison map is not an isomorphism over the base: {0}")]
    NotIso(String),
}

/// `St(Un(F)) ≅ F`: the comparison sends fiber position `s` at `c` to `s`;
/// returns the straightened algebra.
pub fn roundtrip_algebra(alg: &Algebra, horizon: usize) -> Result<StraighteningResult, RoundtripFailure> {
    let fib = unstraighten(alg, horizon)?;
    let st = straighten(&fib)?;
    let iso: Vec<Vec<usize>> = alg.carriers().iter().map(|&n| (0..n).collect()).collect();
    for c in alg.operad().colors() {
        if st.algebra.carrier(c) != alg.carrier(c) {
            return Err(RoundtripFailure::Carrier(c));
        }
    }
    if algebra_map_check(&iso, &st.algebra, alg) != Ok(true) {
        return Err(RoundtripFailure::Tables);
    }
    Ok(st)
}

/// Naturality of the roundtrip along an algebra map `g: F → F'`: the map
/// `St(Un(g))` computed from the constructions equals `g` under the roundtrip
/// isomorphisms, and is an algebra map.
pub fn roundtrip_naturality(
    g: &[Vec<usize>],
    src: &OperadicLeftFibration,
    src_st: &Algebra,
    tgt: &OperadicLeftFibration,
    tgt_st: &Algebra,
) -> Result<(), RoundtripFailure> {
    let ug = unstraighten_map(g, src, tgt).ok_or(RoundtripFailure::Naturality)?;
    ug.check(&src.total, &tgt.total).map_err(|e| RoundtripFailure::NotIso(e.to_string()))?;
    let sug = straighten_map(&ug, src, tgt);
    if sug != g || algebra_map_check(&sug, src_st, tgt_st) != Ok(true) {
        return Err(RoundtripFailure::Naturality);
    }
    Ok(())
}

/// `Un(St(T)) ≅ T` over the base: returns the comparison `T → Un(St(T))`
/// after checking it is an isomorphism of operads commuting with projections.
pub fn roundtrip_fibration(
    fib: &OperadicLeftFibration,
    horizon: usize,
) -> Result<(OperadicLeftFibration, OperadMap), RoundtripFailure> {
    let st = straighten(fib)?;
    let un = unstraighten(&st.algebra, horizon)?;
    let colors: Vec<Color> =
        fib.total.colors().map(|t| un.fiber(fib.base_color(t))[fib.position(t)]).collect();
    let ops = fib
        .total
        .ops()
        .map(|o| {
            let inputs: Vec<Color> = fib.total.inputs(o).iter().map(|t| colors[t.0]).collect();
            match un.lifts(fib.proj.ops[o.0], &inputs) {
                [only] => Ok(*only),
                _ => Err(RoundtripFailure::MissingOperation(o)),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let map = OperadMap { colors, ops };
    map.check(&fib.total, &un.total).map_err(|e| RoundtripFailure::NotIso(e.to_string()))?;
    let bijective = |v: &[usize], n: usize| {
        let mut seen = vec![false; n];
        v.len() == n && v.iter().all(|&i| !std::mem::replace(&mut seen[i], true))
    };
    let color_ids: Vec<usize> = map.colors.iter().map(|c| c.0).collect();
    let op_ids: Vec<usize> = map.ops.iter().map(|o| o.0).collect();
    if !bijective(&color_ids, un.total.color_count()) || !bijective(&op_ids, un.total.op_count()) {
        return Err(RoundtripFailure::NotIso("not bijective".into()));
    }
    is_fibrewise_equivalence(&map, fib, &un).map_err(|e| RoundtripFailure::NotIso(e.to_string()))?;
    Ok((un, map))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferFailure {
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error(transparent)]
    Operators(#[from] OperatorError),
    #[error("envelope of the fibration is not strong: {0}")]
    NotStrong(#[from] StrongFailure),
    #[error("pulling the envelope back along the unit does not recover the fibration")]
    Triangle,
}

/// The envelope of the fibration is a strong sm-left fibration over the
/// envelope of the base, and its base change along the unit recovers the
/// fibration.
pub fn strong_transfer_check(fib: &OperadicLeftFibration, horizon: usize) -> Result<(), TransferFailure> {
    let (t, b) = fib.operator_categories(horizon)?;
    let (et, eb) = (EnvelopeCategory::build(t)?, EnvelopeCategory::build(b)?);
    let functor = et.induced_functor(&fib.proj, &eb).expect("operad map induces a functor");
    is_strong_sm_left_fibration(&et, &eb, &functor)?;
    let (pb, _) = slice_unit_base_change(&et, &functor, &eb)?;
    let t = et.operators();
    let unit_t = et.unit();
    let ops = t.induced_functor(&fib.proj, eb.operators()).expect("operad map induces a functor");
    let comparison = Functor {
        objects: t.objects().map(|x| pb.object_of(unit_t.obj(x), ops.obj(x)).expect("pullback object")).collect(),
        arrows: t.arrows().map(|a| pb.arrow_of(unit_t.arr(a), ops.arr(a)).expect("pullback arrow")).collect(),
    };
    if !iso_check(t, &pb, &comparison) {
        return Err(TransferFailure::Triangle);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{enumerate_algebras, library};

    fn max_monoid() -> Algebra {
        let comm = Arc::new(library::comm(3));
        Algebra::from_fn(comm, vec![2], |_, args| args.iter().copied().max().unwrap_or(0)).unwrap()
    }

    #[test]
    fn terminal_algebra_gives_isomorphic_projection() {
        let p = Arc::new(library::mixed_comm(3));
        let fib = unstraighten(&Algebra::terminal(p.clone()), 3).unwrap();
        let (t, b) = fib.operator_categories(3).unwrap();
        assert!(is_operator_iso(fib.proj(), &t, &b));
        let st = straighten(&fib).unwrap();
        assert_eq!(st.algebra, Algebra::terminal(p));
    }

    #[test]
    fn max_monoid_construction() {
        let alg = max_monoid();
        let fib = unstraighten(&alg, 3).unwrap();
        assert_eq!(fib.total().color_count(), 2);
        let mu = OpId(2);
        assert_eq!(fib.base().arity(mu), 2);
        for s1 in 0..2 {
            for s2 in 0..2 {
                let inputs = [fib.fiber(Color(0))[s1], fib.fiber(Color(0))[s2]];
                for t in 0..2 {
                    let out = fib.fiber(Color(0))[t];
                    let n = fib.lifts(mu, &inputs).iter().filter(|&&o| fib.total().output(o) == out).count();
                    assert_eq!(n == 1, s1.max(s2) == t);
                }
            }
        }
        let st = roundtrip_algebra(&alg, 3).unwrap();
        assert_eq!(st.algebra.tables(), alg.tables());
        for w in &st.witnesses {
            assert_eq!(w.components, 2);
        }
    }

    #[test]
    fn roundtrips_over_mixed_colors() {
        let p = Arc::new(library::action(3));
        for alg in enumerate_algebras(&p, 2) {
            roundtrip_algebra(&alg, 2).unwrap();
            let fib = unstraighten(&alg, 2).unwrap();
            let color_perm: Vec<usize> = (0..fib.total().color_count()).rev().collect();
            let op_perm: Vec<usize> = (0..fib.total().op_count()).rev().collect();
            let scrambled = fib.relabel(&color_perm, &op_perm).unwrap();
            let (_, map) = roundtrip_fibration(&scrambled, 2).unwrap();
            assert_eq!(map.colors.len(), fib.total().color_count());
        }
    }

    #[test]
    fn fiber_collapse_is_not_an_equivalence() {
        let big = unstraighten(&max_monoid(), 2).unwrap();
        let small = unstraighten(&Algebra::terminal(Arc::new(library::comm(3))), 2).unwrap();
        let g = unstraighten_map(&[vec![0, 0]], &big, &small).unwrap();
        g.check(big.total(), small.total()).unwrap();
        assert_eq!(is_fibrewise_equivalence(&g, &big, &small), Err(FibrewiseFailure::NotBijective(Color(0))));
        let (t1, t2) = (big.operator_categories(2).unwrap().0, small.operator_categories(2).unwrap().0);
        assert!(!is_operator_iso(&g, &t1, &t2));
    }

    #[test]
    fn chaotic_lifts_are_rejected() {
        let comm = Arc::new(library::comm(3));
        let (total, proj) = chaotic_operad(&comm, &[2]).unwrap();
        assert!(total.validate().is_valid());
        let fib = OperadicLeftFibration::from_parts(comm.clone(), Arc::new(total), proj).unwrap();
        assert!(fib.unique_operation_lifts().is_err());
        assert!(matches!(fib.check(2), Err(GrothendieckError::NotOperadic(_))));
        let (total, proj) = chaotic_operad(&comm, &[1]).unwrap();
        let fib = OperadicLeftFibration::from_parts(comm, Arc::new(total), proj).unwrap();
        assert!(fib.unique_operation_lifts().is_ok());
        assert!(fib.check(2).is_ok());
    }

    #[test]
    fn strong_transfer_for_small_algebras() {
        strong_transfer_check(&unstraighten(&max_monoid(), 2).unwrap(), 2).unwrap();
    }
}
