//! Formal cochain complexes over the matching category, with planar
//! gluing, delooping and Gaussian elimination.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cobordism::MorphismSum;
use crate::error::{FoamError, Result};
use crate::frobenius::FrobeniusAlgebra;
use crate::ring::{Coefficient, RingElem};
use crate::skein::LaurentPoly;
use crate::tangle::{LoopKind, Matching, PDCode};

pub type VertexId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedObject {
    pub web: Matching,
    pub qshift: i32,
}

#[derive(Clone, Debug)]
struct Vertex<C> {
    deg: i32,
    obj: GradedObject,
    out: BTreeMap<VertexId, MorphismSum<C>>,
    inc: BTreeSet<VertexId>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub crossing: usize,
    pub boundary_points: usize,
    pub objects_before: usize,
    pub objects_after: usize,
    pub millis: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SimplifyStats {
    pub deloops: usize,
    pub eliminations: usize,
    /// peak object count after each crossing has been simplified
    pub max_objects: usize,
    /// peak object count at any point, including mid-gluing
    pub peak_transient: usize,
    pub timeline: Vec<StepRecord>,
}

impl SimplifyStats {
    fn observe(&mut self, n: usize) {
        self.peak_transient = self.peak_transient.max(n);
    }
}

/// How much internal verification runs during simplification.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub enum DebugLevel {
    #[default]
    Off,
    /// check after every crossing is added
    PerCrossing,
    /// check after every deloop and elimination
    PerStep,
}

impl DebugLevel {
    pub fn from_u8(n: u8) -> Self {
        match n {
            0 => DebugLevel::Off,
            1 => DebugLevel::PerCrossing,
            _ => DebugLevel::PerStep,
        }
    }
}

/// A bounded cochain complex stored as a graph: vertices are graded
/// objects, directed edges are the nonzero differential entries.
#[derive(Clone, Debug)]
pub struct FormalComplex<C = RingElem> {
    alg: FrobeniusAlgebra<C>,
    graded: bool,
    vertices: BTreeMap<VertexId, Vertex<C>>,
    next_id: VertexId,
    debug: DebugLevel,
}

impl<C: Coefficient> FormalComplex<C> {
    /// The complex with no objects. `graded` enables q-degree checks, which
    /// only make sense when the scalars respect the grading.
    pub fn new(alg: FrobeniusAlgebra<C>, graded: bool) -> Self {
        Self { alg, graded, vertices: BTreeMap::new(), next_id: 0, debug: DebugLevel::Off }
    }

    /// The unit for gluing: a single empty web in degree 0.
    pub fn unit(alg: FrobeniusAlgebra<C>, graded: bool) -> Self {
        let mut c = Self::new(alg, graded);
        c.add_object(0, GradedObject { web: Matching::empty(), qshift: 0 });
        c
    }

    pub fn with_debug(mut self, level: DebugLevel) -> Self {
        self.debug = level;
        self
    }

    pub fn set_debug(&mut self, level: DebugLevel) {
        self.debug = level;
    }

    pub fn algebra(&self) -> &FrobeniusAlgebra<C> {
        &self.alg
    }

    pub fn is_graded(&self) -> bool {
        self.graded
    }

    pub fn n_objects(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_entries(&self) -> usize {
        self.vertices.values().map(|v| v.out.len()).sum()
    }

    pub fn add_object(&mut self, deg: i32, obj: GradedObject) -> VertexId {
        let id = self.next_id;
        self.next_id += 1;
        self.vertices.insert(id, Vertex { deg, obj, out: BTreeMap::new(), inc: BTreeSet::new() });
        id
    }

    pub fn object(&self, id: VertexId) -> Option<(i32, &GradedObject)> {
        self.vertices.get(&id).map(|v| (v.deg, &v.obj))
    }

    pub fn ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn degree_range(&self) -> Option<(i32, i32)> {
        let lo = self.vertices.values().map(|v| v.deg).min()?;
        let hi = self.vertices.values().map(|v| v.deg).max()?;
        Some((lo, hi))
    }

    /// Objects of homological degree `d`, in their fixed order.
    pub fn objects_in_degree(&self, d: i32) -> Vec<VertexId> {
        self.vertices.iter().filter(|(_, v)| v.deg == d).map(|(&id, _)| id).collect()
    }

    pub fn entry(&self, src: VertexId, tgt: VertexId) -> Option<&MorphismSum<C>> {
        self.vertices.get(&src).and_then(|v| v.out.get(&tgt))
    }

    pub fn out_entries(&self, src: VertexId) -> impl Iterator<Item = (VertexId, &MorphismSum<C>)> {
        self.vertices[&src].out.iter().map(|(&t, f)| (t, f))
    }

    /// Sets (or, for a zero map, clears) the differential entry `src -> tgt`.
    pub fn set_entry(&mut self, src: VertexId, tgt: VertexId, f: MorphismSum<C>) -> Result<()> {
        let (vs, vt) = match (self.vertices.get(&src), self.vertices.get(&tgt)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(FoamError::InvalidDiagram("entry between unknown objects".into())),
        };
        if vt.deg != vs.deg + 1 {
            return Err(FoamError::DegreeViolation(format!(
                "differential from degree {} to degree {}",
                vs.deg, vt.deg
            )));
        }
        if f.source() != &vs.obj.web || f.target() != &vt.obj.web {
            return Err(FoamError::BoundaryMismatch("entry does not match its objects".into()));
        }
        if f.is_zero() {
            self.vertices.get_mut(&src).unwrap().out.remove(&tgt);
            self.vertices.get_mut(&tgt).unwrap().inc.remove(&src);
        } else {
            self.vertices.get_mut(&src).unwrap().out.insert(tgt, f);
            self.vertices.get_mut(&tgt).unwrap().inc.insert(src);
        }
        Ok(())
    }

    fn remove_vertex(&mut self, id: VertexId) -> Vertex<C> {
        let v = self.vertices.remove(&id).expect("vertex exists");
        for s in &v.inc {
            if let Some(sv) = self.vertices.get_mut(s) {
                sv.out.remove(&id);
            }
        }
        for t in v.out.keys() {
            if let Some(tv) = self.vertices.get_mut(t) {
                tv.inc.remove(&id);
            }
        }
        v
    }

    /// The differential `d^k` as a dense matrix; rows are the targets.
    pub fn matrix(&self, k: i32) -> (Vec<VertexId>, Vec<VertexId>, Vec<Vec<Option<MorphismSum<C>>>>) {
        let cols = self.objects_in_degree(k);
        let rows = self.objects_in_degree(k + 1);
        let m = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| self.entry(c, r).cloned()).collect())
            .collect();
        (rows, cols, m)
    }

    /// Multiset of `(degree, qshift, #loops)` over all objects.
    pub fn object_counts(&self) -> BTreeMap<(i32, i32), usize> {
        let mut m = BTreeMap::new();
        for v in self.vertices.values() {
            *m.entry((v.deg, v.obj.qshift)).or_default() += 1;
        }
        m
    }

    /// `Σ (-1)^deg q^qshift (q + q^{-1})^{#loops}` over all objects.
    pub fn euler_characteristic(&self) -> LaurentPoly {
        let lv = LaurentPoly::loop_value();
        let mut total = LaurentPoly::zero();
        for v in self.vertices.values() {
            let sign = if v.deg.rem_euclid(2) == 0 { 1 } else { -1 };
            let term = &LaurentPoly::monomial(sign, v.obj.qshift) * &lv.pow(v.obj.web.loops().len());
            total = total + term;
        }
        total
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for (&x, vx) in &self.vertices {
            let mut acc: BTreeMap<VertexId, MorphismSum<C>> = BTreeMap::new();
            for (&y, f) in &vx.out {
                for (&z, g) in &self.vertices[&y].out {
                    let gf = MorphismSum::compose(&self.alg, g, f)?;
                    match acc.get_mut(&z) {
                        Some(s) => s.add_assign(&gf)?,
                        None => {
                            acc.insert(z, gf);
                        }
                    }
                }
            }
            if let Some((z, _)) = acc.iter().find(|(_, s)| !s.is_zero()) {
                return Err(FoamError::NonZeroSquare(format!("path from object {x} to object {z}")));
            }
        }
        Ok(())
    }

    pub fn check_degrees(&self) -> Result<()> {
        if !self.graded {
            return Ok(());
        }
        for vx in self.vertices.values() {
            for (t, f) in &vx.out {
                let d = f.deg()?.unwrap_or(0);
                let total = d + vx.obj.qshift - self.vertices[t].obj.qshift;
                if total != 0 {
                    return Err(FoamError::DegreeViolation(format!("entry has q-degree {total}")));
                }
            }
        }
        Ok(())
    }

    pub fn verify(&self) -> Result<()> {
        self.check_d_squared()?;
        self.check_degrees()
    }

    fn step_check(&self) -> Result<()> {
        if self.debug >= DebugLevel::PerStep {
            self.verify()?;
        }
        Ok(())
    }

    /// Two-term complex of crossing `c`: positive crossings give
    /// `[singular]{2} -> [oriented]{1}` in degrees `-1, 0`, negative ones
    /// `[oriented]{-1} -> [singular]{-2}` in degrees `0, 1`.
    pub fn crossing_complex(alg: FrobeniusAlgebra<C>, graded: bool, pd: &PDCode, c: usize) -> Self {
        let r = pd.resolve_crossing(c);
        let mut cx = Self::new(alg, graded);
        let (a, b) = if r.sign > 0 {
            let a = cx.add_object(-1, GradedObject { web: r.singular.clone(), qshift: 2 });
            let b = cx.add_object(0, GradedObject { web: r.oriented.clone(), qshift: 1 });
            (a, b)
        } else {
            let a = cx.add_object(0, GradedObject { web: r.oriented.clone(), qshift: -1 });
            let b = cx.add_object(1, GradedObject { web: r.singular.clone(), qshift: -2 });
            (a, b)
        };
        let (s, t) = (cx.vertices[&a].obj.web.clone(), cx.vertices[&b].obj.web.clone());
        let mut saddle = MorphismSum::disk(s, t, 0, C::one()).expect("smoothings share the boundary");
        // a crossing that meets itself (a kink) closes its repeated edge
        let pairs = repeated_labels(saddle.source());
        if !pairs.is_empty() {
            saddle = saddle.contract(&cx.alg, &pairs).expect("repeated edge joins an in and an out slot");
            for (id, m) in [(a, saddle.source().clone()), (b, saddle.target().clone())] {
                cx.vertices.get_mut(&id).unwrap().obj.web = m;
            }
        }
        cx.set_entry(a, b, saddle).expect("valid entry");
        cx
    }

    /// Tensor product glued along all shared edge labels, with the Koszul
    /// sign `(-1)^{deg}` of the left factor on the right differential.
    pub fn glue(&self, other: &Self) -> Result<Self> {
        let mut out = Self::new(self.alg.clone(), self.graded && other.graded);
        out.debug = self.debug.max(other.debug);
        let mut ids = HashMap::new();
        for (&x, vx) in &self.vertices {
            for (&y, vy) in &other.vertices {
                let web = vx.obj.web.glue_by_labels(&vy.obj.web)?.matching;
                let id = out.add_object(vx.deg + vy.deg, GradedObject { web, qshift: vx.obj.qshift + vy.obj.qshift });
                ids.insert((x, y), id);
            }
        }
        let mut id_left: HashMap<VertexId, MorphismSum<C>> = HashMap::new();
        let mut id_right: HashMap<VertexId, MorphismSum<C>> = HashMap::new();
        for (&y, vy) in &other.vertices {
            id_right.insert(y, MorphismSum::identity(&vy.obj.web)?);
        }
        for (&x, vx) in &self.vertices {
            id_left.insert(x, MorphismSum::identity(&vx.obj.web)?);
        }
        for (&x, vx) in &self.vertices {
            for (&x2, f) in &vx.out {
                for &y in other.vertices.keys() {
                    let g = f.glue_by_labels(&self.alg, &id_right[&y])?;
                    out.set_entry(ids[&(x, y)], ids[&(x2, y)], g)?;
                }
            }
        }
        for (&y, vy) in &other.vertices {
            for (&y2, g) in &vy.out {
                for (&x, vx) in &self.vertices {
                    let mut h = id_left[&x].glue_by_labels(&self.alg, g)?;
                    if vx.deg.rem_euclid(2) == 1 {
                        h = h.scale(&-C::one());
                    }
                    out.set_entry(ids[&(x, y)], ids[&(x, y2)], h)?;
                }
            }
        }
        Ok(out)
    }

    /// Replaces loop `l` of object `id` by two copies of the smaller web
    /// with q-shifts `+1` and `-1`.
    pub fn deloop_object(&mut self, id: VertexId, l: usize) -> Result<(VertexId, VertexId)> {
        let incoming: Vec<(VertexId, MorphismSum<C>)> =
            self.vertices[&id].inc.iter().map(|&s| (s, self.vertices[&s].out[&id].clone())).collect();
        let v = self.remove_vertex(id);
        let kind = v.obj.web.loops()[l];
        let (s_in, s_out) = deloop_factors::<C>(kind);
        let web = v.obj.web.remove_loop(l);
        let plus = self.add_object(v.deg, GradedObject { web: web.clone(), qshift: v.obj.qshift + 1 });
        let minus = self.add_object(v.deg, GradedObject { web, qshift: v.obj.qshift - 1 });
        for (s, f) in incoming {
            let to_plus = f.cap_target_loop(&self.alg, l, 0).scale(&s_in);
            let to_minus = f.cap_target_loop(&self.alg, l, 1).scale(&s_in);
            self.set_entry(s, plus, to_plus)?;
            self.set_entry(s, minus, to_minus)?;
        }
        let h = self.alg.h.clone();
        for (&t, g) in &v.out {
            let dotted = g.cup_source_loop(&self.alg, l, 1);
            let plain = g.cup_source_loop(&self.alg, l, 0);
            let from_plus = dotted.sub(&plain.scale(&h))?.scale(&s_out);
            self.set_entry(plus, t, from_plus)?;
            self.set_entry(minus, t, plain.scale(&s_out))?;
        }
        Ok((plus, minus))
    }

    pub fn deloop_all(&mut self, stats: &mut SimplifyStats) -> Result<()> {
        loop {
            let next = self.vertices.iter().find(|(_, v)| !v.obj.web.loops().is_empty()).map(|(&id, _)| id);
            let Some(id) = next else { break };
            self.deloop_object(id, 0)?;
            stats.deloops += 1;
            stats.observe(self.n_objects());
            self.step_check()?;
        }
        Ok(())
    }

    /// The invertible `u · id` entry to eliminate next: lowest source degree,
    /// then row-major in the differential matrix.
    pub fn find_isomorphism(&self, min_deg: i32) -> Option<(VertexId, VertexId, C)> {
        let degs: BTreeSet<i32> = self.vertices.values().map(|v| v.deg).filter(|&d| d >= min_deg).collect();
        for d in degs {
            for t in self.objects_in_degree(d + 1) {
                for &s in &self.vertices[&t].inc {
                    let f = &self.vertices[&s].out[&t];
                    if let Some(inv) = f.as_identity_multiple().and_then(|u| u.try_inverse()) {
                        return Some((s, t, inv));
                    }
                }
            }
        }
        None
    }

    /// Cancels `b1 -> b2` whose entry is `u · id`, given `u^{-1}`:
    /// every `d -> e` becomes `ε - γ u^{-1} δ`.
    pub fn gaussian_eliminate(&mut self, b1: VertexId, b2: VertexId, u_inv: &C) -> Result<()> {
        let phi = self
            .entry(b1, b2)
            .ok_or_else(|| FoamError::NotInvertible("no entry between the chosen objects".into()))?;
        match phi.as_identity_multiple() {
            Some(u) if (u.clone() * u_inv.clone()) == C::one() => {}
            _ => return Err(FoamError::NotInvertible("entry is not a unit multiple of the identity".into())),
        }
        let gammas: Vec<(VertexId, MorphismSum<C>)> =
            self.vertices[&b1].out.iter().filter(|(&e, _)| e != b2).map(|(&e, g)| (e, g.clone())).collect();
        let deltas: Vec<(VertexId, MorphismSum<C>)> = self.vertices[&b2]
            .inc
            .iter()
            .filter(|&&d| d != b1)
            .map(|&d| (d, self.vertices[&d].out[&b2].clone()))
            .collect();
        self.remove_vertex(b1);
        self.remove_vertex(b2);
        let neg_inv = -u_inv.clone();
        for (d, delta) in &deltas {
            for (e, gamma) in &gammas {
                let corr = MorphismSum::compose(&self.alg, gamma, delta)?.scale(&neg_inv);
                let new = match self.entry(*d, *e) {
                    Some(eps) => eps.add(&corr)?,
                    None => corr,
                };
                self.set_entry(*d, *e, new)?;
            }
        }
        Ok(())
    }

    pub fn eliminate_all(&mut self, stats: &mut SimplifyStats) -> Result<()> {
        let mut from = i32::MIN;
        while let Some((b1, b2, inv)) = self.find_isomorphism(from) {
            from = self.vertices[&b1].deg;
            self.gaussian_eliminate(b1, b2, &inv)?;
            stats.eliminations += 1;
            self.step_check()?;
        }
        Ok(())
    }

    /// Deloops every object, then cancels isomorphisms until none remain.
    pub fn simplify(&mut self, stats: &mut SimplifyStats) -> Result<()> {
        stats.observe(self.n_objects());
        self.deloop_all(stats)?;
        self.eliminate_all(stats)?;
        Ok(())
    }

    /// Tensor with the complex of a crossingless unknot, `∅{1} ⊕ ∅{-1}`.
    pub fn tensor_free_loop(&self) -> Result<Self> {
        let mut out = Self::new(self.alg.clone(), self.graded);
        out.debug = self.debug;
        let mut ids = HashMap::new();
        for (&x, v) in &self.vertices {
            for s in [1, -1] {
                let obj = GradedObject { web: v.obj.web.clone(), qshift: v.obj.qshift + s };
                ids.insert((x, s), out.add_object(v.deg, obj));
            }
        }
        for (&x, v) in &self.vertices {
            for (&y, f) in &v.out {
                for s in [1, -1] {
                    out.set_entry(ids[&(x, s)], ids[&(y, s)], f.clone())?;
                }
            }
        }
        Ok(out)
    }

    /// Converts every scalar, e.g. to specialize a complex over `R`.
    pub fn map_coeffs<D: Coefficient>(
        &self,
        alg: FrobeniusAlgebra<D>,
        graded: bool,
        f: impl Fn(&C) -> D,
    ) -> FormalComplex<D> {
        let mut out = FormalComplex::new(alg, graded);
        out.debug = self.debug;
        out.next_id = self.next_id;
        for (&id, v) in &self.vertices {
            out.vertices.insert(id, Vertex { deg: v.deg, obj: v.obj.clone(), out: BTreeMap::new(), inc: BTreeSet::new() });
        }
        for (&id, v) in &self.vertices {
            for (&t, m) in &v.out {
                out.set_entry(id, t, m.map_coeffs(&f)).expect("same shape");
            }
        }
        out
    }
}

fn repeated_labels(m: &Matching) -> Vec<(usize, usize)> {
    let b = m.boundary();
    (0..b.len())
        .flat_map(|p| ((p + 1)..b.len()).filter(move |&q| b[p].label == b[q].label).map(move |q| (p, q)))
        .collect()
}

/// Builds the complex of `pd` one crossing at a time along `order`,
/// simplifying after each step; free loops are tensored in at the end.
pub fn assemble<C: Coefficient>(
    alg: FrobeniusAlgebra<C>,
    graded: bool,
    pd: &PDCode,
    order: &[usize],
    debug: DebugLevel,
) -> Result<(FormalComplex<C>, SimplifyStats)> {
    let mut seen = vec![false; pd.n_crossings()];
    for &c in order {
        if c >= seen.len() || seen[c] {
            return Err(FoamError::InvalidDiagram(format!("crossing order is not a permutation at {c}")));
        }
        seen[c] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(FoamError::InvalidDiagram("crossing order misses a crossing".into()));
    }
    let mut stats = SimplifyStats::default();
    let mut cx = FormalComplex::unit(alg.clone(), graded).with_debug(debug);
    for &c in order {
        let start = Instant::now();
        let mut local = FormalComplex::crossing_complex(alg.clone(), graded, pd, c);
        if local.vertices.values().any(|v| !v.obj.web.loops().is_empty()) {
            local.simplify(&mut stats)?;
        }
        cx = cx.glue(&local)?;
        let before = cx.n_objects();
        stats.observe(before);
        cx.simplify(&mut stats)?;
        if debug >= DebugLevel::PerCrossing {
            cx.verify()?;
        }
        stats.max_objects = stats.max_objects.max(cx.n_objects());
        let boundary_points = cx.vertices.values().next().map_or(0, |v| v.obj.web.n_points());
        stats.timeline.push(StepRecord {
            crossing: c,
            boundary_points,
            objects_before: before,
            objects_after: cx.n_objects(),
            millis: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    for _ in 0..pd.free_loops {
        cx = cx.tensor_free_loop()?;
        stats.observe(cx.n_objects());
        stats.max_objects = stats.max_objects.max(cx.n_objects());
    }
    Ok((cx, stats))
}

/// Scalars applied to the in-maps and out-maps when delooping a loop of
/// the given kind. For two-vertex loops the singular cap is `i` times the
/// plain cap (see `foamrel::check_deloop_maps`).
pub fn deloop_factors<C: Coefficient>(kind: LoopKind) -> (C, C) {
    match kind {
        LoopKind::Oriented => (C::one(), C::one()),
        LoopKind::TwoVertex => (C::i(), -C::i()),
    }
}

pub const DEFAULT_CUBE_CAP: usize = 12;

/// The full resolution cube: every crossing glued in, loops removed, no
/// elimination. Refuses diagrams with more than `cap` crossings.
pub fn naive_cube<C: Coefficient>(
    alg: FrobeniusAlgebra<C>,
    graded: bool,
    pd: &PDCode,
    cap: usize,
) -> Result<(FormalComplex<C>, SimplifyStats)> {
    let n = pd.n_crossings();
    if n > cap {
        return Err(FoamError::InvalidDiagram(format!(
            "naive cube refused: {n} crossings exceed the cap of {cap} ({} resolutions)",
            1u128 << n.min(127)
        )));
    }
    let mut stats = SimplifyStats::default();
    let mut cx = FormalComplex::unit(alg.clone(), graded);
    for c in 0..n {
        let start = Instant::now();
        let mut local = FormalComplex::crossing_complex(alg.clone(), graded, pd, c);
        local.deloop_all(&mut stats)?;
        cx = cx.glue(&local)?;
        let before = cx.n_objects();
        stats.observe(before);
        cx.deloop_all(&mut stats)?;
        stats.max_objects = stats.max_objects.max(cx.n_objects());
        let boundary_points = cx.vertices.values().next().map_or(0, |v| v.obj.web.n_points());
        stats.timeline.push(StepRecord {
            crossing: c,
            boundary_points,
            objects_before: before,
            objects_after: cx.n_objects(),
            millis: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    for _ in 0..pd.free_loops {
        cx = cx.tensor_free_loop()?;
    }
    stats.observe(cx.n_objects());
    stats.max_objects = stats.max_objects.max(cx.n_objects());
    Ok((cx, stats))
}

// ---------------------------------------------------------------------------
// JSON dumps

#[derive(Serialize, Deserialize)]
struct ObjectJson {
    id: VertexId,
    deg: i32,
    qshift: i32,
    web: Matching,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    src: VertexId,
    tgt: VertexId,
    map: MorphismSum<RingElem>,
}

#[derive(Serialize, Deserialize)]
pub struct ComplexJson {
    objects: Vec<ObjectJson>,
    entries: Vec<EntryJson>,
}

impl FormalComplex<RingElem> {
    pub fn to_json(&self) -> ComplexJson {
        let objects = self
            .vertices
            .iter()
            .map(|(&id, v)| ObjectJson { id, deg: v.deg, qshift: v.obj.qshift, web: v.obj.web.clone() })
            .collect();
        let entries = self
            .vertices
            .iter()
            .flat_map(|(&src, v)| v.out.iter().map(move |(&tgt, m)| EntryJson { src, tgt, map: m.clone() }))
            .collect();
        ComplexJson { objects, entries }
    }

    pub fn from_json(j: ComplexJson) -> Result<Self> {
        let mut cx = Self::new(FrobeniusAlgebra::universal(), true);
        for o in j.objects {
            if cx.vertices.contains_key(&o.id) {
                return Err(FoamError::Parse(format!("duplicate object id {}", o.id)));
            }
            cx.vertices.insert(
                o.id,
                Vertex {
                    deg: o.deg,
                    obj: GradedObject { web: o.web, qshift: o.qshift },
                    out: BTreeMap::new(),
                    inc: BTreeSet::new(),
                },
            );
            cx.next_id = cx.next_id.max(o.id + 1);
        }
        for e in j.entries {
            cx.set_entry(e.src, e.tgt, e.map)?;
        }
        Ok(cx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{FieldScalar, Specialization};
    use crate::tangle::{parse_braid, parse_pd};

    const FIGURE_EIGHT: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";

    fn universal() -> FrobeniusAlgebra<RingElem> {
        FrobeniusAlgebra::universal()
    }

    fn field_khovanov() -> FrobeniusAlgebra<FieldScalar> {
        FrobeniusAlgebra::new(FieldScalar::from_ints(0, 0), FieldScalar::from_ints(0, 0))
    }

    fn shifts(cx: &FormalComplex<impl Coefficient>) -> Vec<(i32, Vec<i32>)> {
        let (lo, hi) = cx.degree_range().unwrap();
        (lo..=hi)
            .map(|d| {
                let mut q: Vec<i32> = cx.objects_in_degree(d).iter().map(|&id| cx.object(id).unwrap().1.qshift).collect();
                q.sort();
                (d, q)
            })
            .collect()
    }

    #[test]
    fn crossing_complex_shapes() {
        let pd = parse_braid("s1 s-2", None).unwrap();
        let pos = FormalComplex::crossing_complex(universal(), true, &pd, 0);
        assert_eq!(shifts(&pos), vec![(-1, vec![2]), (0, vec![1])]);
        let neg = FormalComplex::crossing_complex(universal(), true, &pd, 1);
        assert_eq!(shifts(&neg), vec![(0, vec![-1]), (1, vec![-2])]);
        pos.verify().unwrap();
        neg.verify().unwrap();
    }

    #[test]
    fn negative_kink_deloop_shape() {
        // an open strand with a negative kink
        let pd = PDCode::from_crossings(vec![[1, 2, 2, 3]], 0).unwrap();
        assert_eq!(pd.signs, vec![-1]);
        let mut cx = FormalComplex::crossing_complex(universal(), true, &pd, 0);
        assert_eq!(shifts(&cx), vec![(0, vec![-1]), (1, vec![-2])]);
        let mut stats = SimplifyStats::default();
        cx.deloop_all(&mut stats).unwrap();
        cx.verify().unwrap();
        assert_eq!(shifts(&cx), vec![(0, vec![-2, 0]), (1, vec![-2])]);
        let t = cx.objects_in_degree(1)[0];
        let mut inv = 0;
        for s in cx.objects_in_degree(0) {
            let f = cx.entry(s, t).unwrap();
            if f.as_identity_multiple().is_some_and(|u| u.is_unit()) {
                inv += 1;
                assert_eq!(cx.object(s).unwrap().1.qshift, -2);
            }
        }
        assert_eq!(inv, 1);
        cx.eliminate_all(&mut stats).unwrap();
        assert_eq!(shifts(&cx), vec![(0, vec![0])]);
        let id = cx.ids().next().unwrap();
        assert_eq!(cx.object(id).unwrap().1.web.n_points(), 2);
    }

    #[test]
    fn kinks_reduce_to_unknot() {
        for word in ["s1", "s-1"] {
            let pd = parse_braid(word, None).unwrap();
            let (cx, stats) = assemble(universal(), true, &pd, &[0], DebugLevel::PerStep).unwrap();
            assert_eq!(shifts(&cx), vec![(0, vec![-1, 1])], "{word}");
            assert!(stats.eliminations >= 1);
        }
    }

    #[test]
    fn identity_differential_eliminates() {
        let mut cx = FormalComplex::new(universal(), true);
        let w = Matching::empty();
        let a = cx.add_object(0, GradedObject { web: w.clone(), qshift: 0 });
        let b = cx.add_object(1, GradedObject { web: w.clone(), qshift: 0 });
        cx.set_entry(a, b, MorphismSum::identity(&w).unwrap()).unwrap();
        let mut stats = SimplifyStats::default();
        cx.simplify(&mut stats).unwrap();
        assert_eq!(cx.n_objects(), 0);
        assert_eq!(stats.eliminations, 1);
    }

    #[test]
    fn non_invertible_rejected() {
        let mut cx = FormalComplex::new(universal(), true);
        let w = Matching::empty();
        let a = cx.add_object(0, GradedObject { web: w.clone(), qshift: 0 });
        let b = cx.add_object(1, GradedObject { web: w.clone(), qshift: 0 });
        cx.set_entry(a, b, MorphismSum::identity(&w).unwrap().scale(&RingElem::int(2))).unwrap();
        assert!(cx.find_isomorphism(i32::MIN).is_none());
        assert!(cx.gaussian_eliminate(a, b, &RingElem::int(1)).is_err());
    }

    #[test]
    fn double_loop_deloops_to_four() {
        let mut cx = FormalComplex::new(universal(), true);
        let w = Matching::empty().with_loops(vec![LoopKind::Oriented, LoopKind::TwoVertex]);
        cx.add_object(0, GradedObject { web: w, qshift: 0 });
        let mut stats = SimplifyStats::default();
        cx.simplify(&mut stats).unwrap();
        assert_eq!(shifts(&cx), vec![(0, vec![-2, 0, 0, 2])]);
        assert_eq!(stats.deloops, 3);
    }

    #[test]
    fn unknot_is_two_objects() {
        let pd = parse_pd("free_loops=1").unwrap();
        let (cx, _) = assemble(universal(), true, &pd, &[], DebugLevel::PerStep).unwrap();
        assert_eq!(shifts(&cx), vec![(0, vec![-1, 1])]);
    }

    #[test]
    fn already_simplified_is_fixed() {
        let pd = parse_pd("free_loops=1").unwrap();
        let (mut cx, _) = assemble(universal(), true, &pd, &[], DebugLevel::Off).unwrap();
        let mut stats = SimplifyStats::default();
        cx.simplify(&mut stats).unwrap();
        assert_eq!((stats.deloops, stats.eliminations), (0, 0));
    }

    #[test]
    fn trefoil_steps_keep_invariants() {
        let pd = parse_pd("X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]").unwrap();
        let (cx, stats) = assemble(universal(), true, &pd, &[0, 1, 2], DebugLevel::PerStep).unwrap();
        assert_eq!(stats.timeline.len(), 3);
        assert_eq!(cx.euler_characteristic(), crate::skein::p2(&pd).unwrap());
    }

    #[test]
    fn figure_eight_halves() {
        let pd = parse_pd(FIGURE_EIGHT).unwrap();
        let mut stats = SimplifyStats::default();
        let mut half = |cs: [usize; 2]| {
            let mut cx = FormalComplex::unit(universal(), true).with_debug(DebugLevel::PerStep);
            for c in cs {
                cx = cx.glue(&FormalComplex::crossing_complex(universal(), true, &pd, c)).unwrap();
                cx.simplify(&mut stats).unwrap();
            }
            cx
        };
        let c1 = half([0, 1]);
        assert_eq!(shifts(&c1), vec![(-2, vec![4]), (-1, vec![3]), (0, vec![1])]);
        let c2 = half([2, 3]);
        assert_eq!(shifts(&c2), vec![(0, vec![-1]), (1, vec![-3]), (2, vec![-4])]);
        // 𝒞₁'s first entry is a unit times a saddle, its second is dot − dot
        let (_, _, m) = c1.matrix(-2);
        let f = m[0][0].as_ref().unwrap();
        assert_eq!(f.n_terms(), 1);
        assert!(f.terms().next().unwrap().1.is_unit());
        let (_, _, m) = c1.matrix(-1);
        let g = m[0][0].as_ref().unwrap();
        assert_eq!(g.n_terms(), 2);
        let total = c1.glue(&c2).unwrap();
        total.verify().unwrap();
        // every object of the glued double complex is a union of loops
        for id in total.ids() {
            let web = &total.object(id).unwrap().1.web;
            assert_eq!(web.n_points(), 0);
            assert!((1..=2).contains(&web.loops().len()));
        }
    }

    #[test]
    fn figure_eight_lambda_shape_over_field() {
        let pd = parse_pd(FIGURE_EIGHT).unwrap();
        let (cx, stats) = assemble(field_khovanov(), true, &pd, &[0, 1, 2, 3], DebugLevel::PerStep).unwrap();
        assert!(stats.max_objects <= 8, "{stats:?}");
        assert_eq!(
            shifts(&cx),
            vec![(-2, vec![5]), (-1, vec![1]), (0, vec![-1, 1]), (1, vec![-1]), (2, vec![-5])]
        );
        assert_eq!(cx.n_entries(), 0);
    }

    #[test]
    fn figure_eight_over_ring_keeps_invariants() {
        let pd = parse_pd(FIGURE_EIGHT).unwrap();
        let (cx, stats) = assemble(universal(), true, &pd, &[0, 1, 2, 3], DebugLevel::PerStep).unwrap();
        assert!(stats.max_objects <= 16, "{stats:?}");
        let p = cx.euler_characteristic();
        assert_eq!(p, LaurentPoly::monomial(1, 5) + LaurentPoly::monomial(1, -5));
        // specializing the ring result agrees with working over the field
        let s = Specialization::khovanov();
        let spec = cx.map_coeffs(field_khovanov(), true, |c| c.specialize(&s));
        spec.verify().unwrap();
    }

    #[test]
    fn naive_cube_figure_eight() {
        let pd = parse_pd(FIGURE_EIGHT).unwrap();
        let (cx, _) = naive_cube(universal(), true, &pd, DEFAULT_CUBE_CAP).unwrap();
        cx.verify().unwrap();
        // one generator per loop labelling of each of the 16 resolutions
        let expected: usize = (0..16u64).map(|b| 1 << crate::skein::resolution_loops(&pd, b)).sum();
        assert_eq!(cx.n_objects(), expected);
        assert_eq!(cx.euler_characteristic(), crate::skein::p2(&pd).unwrap());
        assert!(naive_cube(universal(), true, &pd, 3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let pd = parse_pd(FIGURE_EIGHT).unwrap();
        let (cx, _) = assemble(universal(), true, &pd, &[0, 1, 2, 3], DebugLevel::Off).unwrap();
        let text = serde_json::to_string(&cx.to_json()).unwrap();
        let back = FormalComplex::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        back.verify().unwrap();
        assert_eq!(back.object_counts(), cx.object_counts());
        assert_eq!(back.n_entries(), cx.n_entries());
    }

    #[test]
    fn glue_with_unit_is_isomorphic() {
        let pd = parse_braid("s1 s1 s1", None).unwrap();
        let (cx, _) = assemble(universal(), true, &pd, &[0, 1, 2], DebugLevel::Off).unwrap();
        let g = cx.glue(&FormalComplex::unit(universal(), true)).unwrap();
        assert_eq!(g.object_counts(), cx.object_counts());
        assert_eq!(g.n_entries(), cx.n_entries());
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(24))]

        #[test]
        fn crossing_order_keeps_objects(order in proptest::strategy::Strategy::prop_shuffle(proptest::strategy::Just((0..7usize).collect::<Vec<_>>()))) {
            let pd = parse_braid("s1 s1 s1 s2 s-1 s2 s3", Some(4)).unwrap();
            let (cx, _) = assemble(field_khovanov(), true, &pd, &order, DebugLevel::Off).unwrap();
            let (base, _) = assemble(field_khovanov(), true, &pd, &pd.ordering_heuristic(), DebugLevel::Off).unwrap();
            proptest::prop_assert_eq!(shifts(&cx), shifts(&base));
        }
    }
}
