//! Dotted cobordisms between crossingless matchings in reduced normal form.
//!
//! Every morphism `S -> T` is stored as a linear combination of *disk
//! patterns*: the boundary of `S ∪ T` decomposes into closed curves
//! ("cycles", alternating source and target arcs, or single loops), and a
//! basis cobordism is a disjoint union of one disk per cycle, each carrying
//! zero or one dot. Any surface is brought to this form by neck cutting,
//! i.e. a connected component with `b` boundary cycles, genus `g` and `d`
//! dots expands as `Δ^{b-1}((2X-h)^g X^d)` in the disk basis.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{FoamError, Result};
use crate::frobenius::FrobeniusAlgebra;
use crate::ring::{Coefficient, RingElem};
use crate::tangle::{GlueResult, Matching};

/// Cycles of `S ∪ T`: arc cycles ordered by smallest boundary point, then
/// source loops, then target loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleStructure {
    pub point_cycle: Vec<usize>,
    pub arc_cycle_points: Vec<Vec<usize>>,
    pub n_source_loops: usize,
    pub n_target_loops: usize,
}

impl CycleStructure {
    pub fn new(s: &Matching, t: &Matching) -> Result<Self> {
        if s.boundary() != t.boundary() {
            return Err(FoamError::BoundaryMismatch(format!("{s} and {t} have different boundaries")));
        }
        let n = s.n_points();
        let mut point_cycle = vec![usize::MAX; n];
        let mut arc_cycle_points = Vec::new();
        for p in 0..n {
            if point_cycle[p] != usize::MAX {
                continue;
            }
            let k = arc_cycle_points.len();
            let mut pts = Vec::new();
            let mut cur = p;
            loop {
                let q = s.partner(cur);
                point_cycle[cur] = k;
                point_cycle[q] = k;
                pts.push(cur);
                pts.push(q);
                cur = t.partner(q);
                if cur == p {
                    break;
                }
            }
            pts.sort_unstable();
            arc_cycle_points.push(pts);
        }
        Ok(Self { point_cycle, arc_cycle_points, n_source_loops: s.loops().len(), n_target_loops: t.loops().len() })
    }

    pub fn n_arc_cycles(&self) -> usize {
        self.arc_cycle_points.len()
    }

    pub fn count(&self) -> usize {
        self.n_arc_cycles() + self.n_source_loops + self.n_target_loops
    }

    pub fn source_loop(&self, i: usize) -> usize {
        self.n_arc_cycles() + i
    }

    pub fn target_loop(&self, j: usize) -> usize {
        self.n_arc_cycles() + self.n_source_loops + j
    }
}

/// A formal linear combination of disk patterns from `source` to `target`.
/// Bit `k` of a pattern is the dot on the disk bounding cycle `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphismSum<C = RingElem> {
    source: Matching,
    target: Matching,
    terms: BTreeMap<u64, C>,
}

/// A connected component handed to [`MorphismSum::from_components`].
#[derive(Clone, Debug)]
pub struct Component {
    pub cycles: Vec<usize>,
    pub genus: u32,
    pub dots: u32,
}

impl<C: Coefficient> MorphismSum<C> {
    pub fn zero(source: Matching, target: Matching) -> Self {
        Self { source, target, terms: BTreeMap::new() }
    }

    pub fn source(&self) -> &Matching {
        &self.source
    }

    pub fn target(&self) -> &Matching {
        &self.target
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u64, &C)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn cycles(&self) -> CycleStructure {
        CycleStructure::new(&self.source, &self.target).expect("validated at construction")
    }

    /// A single basis cobordism; fails if `S` and `T` have different
    /// boundaries or the pattern uses nonexistent cycles.
    pub fn disk(source: Matching, target: Matching, pattern: u64, coeff: C) -> Result<Self> {
        let cs = CycleStructure::new(&source, &target)?;
        if cs.count() < 64 && pattern >> cs.count() != 0 {
            return Err(FoamError::InvalidDiagram("dot pattern refers to a nonexistent cycle".into()));
        }
        let mut m = Self::zero(source, target);
        m.add_term(pattern, coeff);
        Ok(m)
    }

    /// Identity of a loop-free matching: one undotted disk per arc.
    pub fn identity(m: &Matching) -> Result<Self> {
        if !m.loops().is_empty() {
            return Err(FoamError::InvalidDiagram("identity is only defined on loop-free matchings".into()));
        }
        Self::disk(m.clone(), m.clone(), 0, C::one())
    }

    /// Surface given by its connected components, expanded into normal form.
    pub fn from_components(
        alg: &FrobeniusAlgebra<C>,
        source: Matching,
        target: Matching,
        components: &[Component],
        coeff: C,
    ) -> Result<Self> {
        let cs = CycleStructure::new(&source, &target)?;
        let mut seen = vec![false; cs.count()];
        for c in components {
            for &k in &c.cycles {
                if k >= seen.len() || seen[k] {
                    return Err(FoamError::InvalidDiagram(format!("cycle {k} covered twice or out of range")));
                }
                seen[k] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(FoamError::InvalidDiagram("some boundary cycle is not covered".into()));
        }
        let mut acc = vec![(0u64, coeff)];
        let mut cache = HashMap::new();
        for c in components {
            acc = multiply_expansion(alg, &mut cache, acc, c.cycles.len(), c.genus, c.dots, &c.cycles);
        }
        let mut m = Self::zero(source, target);
        for (p, c) in acc {
            m.add_term(p, c);
        }
        Ok(m)
    }

    pub fn add_term(&mut self, pattern: u64, c: C) {
        if c.is_zero() {
            return;
        }
        let s = match self.terms.remove(&pattern) {
            Some(old) => old + c,
            None => c,
        };
        if !s.is_zero() {
            self.terms.insert(pattern, s);
        }
    }

    pub fn coeff(&self, pattern: u64) -> C {
        self.terms.get(&pattern).cloned().unwrap_or_else(C::zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_ends(other)?;
        let mut r = self.clone();
        for (p, c) in &other.terms {
            r.add_term(*p, c.clone());
        }
        Ok(r)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_same_ends(other)?;
        for (p, c) in &other.terms {
            self.add_term(*p, c.clone());
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut r = Self::zero(self.source.clone(), self.target.clone());
        for (p, x) in &self.terms {
            r.add_term(*p, x.clone() * c.clone());
        }
        r
    }

    fn check_same_ends(&self, other: &Self) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(FoamError::BoundaryMismatch("summands have different source or target".into()));
        }
        Ok(())
    }

    /// Whether this is `u · id` for some scalar `u`; returns `u`.
    pub fn as_identity_multiple(&self) -> Option<C> {
        if self.source != self.target || !self.source.loops().is_empty() || self.terms.len() != 1 {
            return None;
        }
        self.terms.get(&0).cloned()
    }

    /// q-degree: `#cycles - #points/2 - 2·dots + deg(coeff)`, equal across
    /// terms. `Ok(None)` for the zero morphism.
    pub fn deg(&self) -> Result<Option<i32>> {
        let cs = self.cycles();
        let base = cs.count() as i32 - self.source.n_points() as i32 / 2;
        let mut d = None;
        for (p, c) in &self.terms {
            let cd = c
                .q_degree()
                .ok_or_else(|| FoamError::DegreeViolation(format!("inhomogeneous coefficient {c}")))?;
            let t = base - 2 * p.count_ones() as i32 + cd;
            match d {
                None => d = Some(t),
                Some(e) if e != t => {
                    return Err(FoamError::DegreeViolation(format!("terms of degree {e} and {t}")));
                }
                _ => {}
            }
        }
        Ok(d)
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> MorphismSum<D> {
        let mut r = MorphismSum::zero(self.source.clone(), self.target.clone());
        for (p, c) in &self.terms {
            r.add_term(*p, f(c));
        }
        r
    }

    /// Vertical composition `g ∘ f` (first `f`, then `g`).
    pub fn compose(alg: &FrobeniusAlgebra<C>, g: &Self, f: &Self) -> Result<Self> {
        if f.target != g.source {
            return Err(FoamError::BoundaryMismatch(format!(
                "cannot compose: target {} differs from source {}",
                f.target, g.source
            )));
        }
        let (cf, cg) = (f.cycles(), g.cycles());
        let nf = cf.count();
        let mut intervals = Vec::new();
        for (p, q) in f.target.arcs() {
            debug_assert_eq!(cf.point_cycle[p], cf.point_cycle[q]);
            intervals.push((cf.point_cycle[p], nf + cg.point_cycle[p]));
        }
        let circles: Vec<_> =
            (0..f.target.loops().len()).map(|j| (cf.target_loop(j), nf + cg.source_loop(j))).collect();
        let out = CycleStructure::new(&f.source, &g.target)?;
        let mut rep = Vec::with_capacity(out.count());
        for pts in &out.arc_cycle_points {
            rep.push(cf.point_cycle[pts[0]]);
        }
        for i in 0..f.source.loops().len() {
            rep.push(cf.source_loop(i));
        }
        for j in 0..g.target.loops().len() {
            rep.push(nf + cg.target_loop(j));
        }
        let plan = GluePlan::new(nf + cg.count(), &intervals, &circles, &rep)?;
        let mut r = Self::zero(f.source.clone(), g.target.clone());
        let mut cache = HashMap::new();
        for (pf, xf) in &f.terms {
            for (pg, xg) in &g.terms {
                let pieces = u128::from(*pf) | u128::from(*pg) << nf;
                plan.expand(alg, &mut cache, pieces, xf.clone() * xg.clone(), &mut r);
            }
        }
        Ok(r)
    }

    /// Side-by-side union; `other`'s boundary points follow `self`'s.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let source = self.source.disjoint_union(&other.source);
        let target = self.target.disjoint_union(&other.target);
        let (c1, c2) = (self.cycles(), other.cycles());
        let (a1, a2) = (c1.n_arc_cycles(), c2.n_arc_cycles());
        let (s1, s2) = (c1.n_source_loops, c2.n_source_loops);
        let t1 = c1.n_target_loops;
        let mut map1: Vec<usize> = (0..a1).collect();
        map1.extend((0..s1).map(|i| a1 + a2 + i));
        map1.extend((0..t1).map(|j| a1 + a2 + s1 + s2 + j));
        let mut map2: Vec<usize> = (0..a2).map(|k| a1 + k).collect();
        map2.extend((0..s2).map(|i| a1 + a2 + s1 + i));
        map2.extend((0..c2.n_target_loops).map(|j| a1 + a2 + s1 + s2 + t1 + j));
        let mut r = Self::zero(source, target);
        for (p1, x1) in &self.terms {
            let q1 = remap_bits(*p1, &map1);
            for (p2, x2) in &other.terms {
                r.add_term(q1 | remap_bits(*p2, &map2), x1.clone() * x2.clone());
            }
        }
        r
    }

    /// Glues boundary points pairwise, on source and target at once.
    pub fn contract(&self, alg: &FrobeniusAlgebra<C>, pairs: &[(usize, usize)]) -> Result<Self> {
        let gs = self.source.contract(pairs)?;
        let gt = self.target.contract(pairs)?;
        let old = self.cycles();
        let intervals: Vec<_> = pairs.iter().map(|&(p, q)| (old.point_cycle[p], old.point_cycle[q])).collect();
        let out = CycleStructure::new(&gs.matching, &gt.matching)?;
        let mut inverse = vec![usize::MAX; gs.matching.n_points()];
        for (p, np) in gs.point_map.iter().enumerate() {
            if let Some(np) = np {
                inverse[*np] = p;
            }
        }
        let mut rep = Vec::with_capacity(out.count());
        for pts in &out.arc_cycle_points {
            rep.push(old.point_cycle[inverse[pts[0]]]);
        }
        let loop_reps = |g: &GlueResult, old_loop: &dyn Fn(usize) -> usize| -> Vec<usize> {
            let mut v = vec![usize::MAX; g.matching.loops().len()];
            for (i, &ni) in g.loop_map.iter().enumerate() {
                v[ni] = old_loop(i);
            }
            for (ni, arcs) in &g.created_loops {
                v[*ni] = old.point_cycle[arcs[0]];
            }
            v
        };
        rep.extend(loop_reps(&gs, &|i| old.source_loop(i)));
        rep.extend(loop_reps(&gt, &|j| old.target_loop(j)));
        let plan = GluePlan::new(old.count(), &intervals, &[], &rep)?;
        let mut r = Self::zero(gs.matching, gt.matching);
        let mut cache = HashMap::new();
        for (p, x) in &self.terms {
            plan.expand(alg, &mut cache, u128::from(*p), x.clone(), &mut r);
        }
        Ok(r)
    }

    /// Planar gluing of `self` and `other` along every shared edge label.
    pub fn glue_by_labels(&self, alg: &FrobeniusAlgebra<C>, other: &Self) -> Result<Self> {
        let off = self.source.n_points();
        let pairs: Vec<_> = (0..off)
            .filter_map(|p| other.source.index_of_label(self.source.boundary()[p].label).map(|q| (p, q + off)))
            .collect();
        self.disjoint_union(other).contract(alg, &pairs)
    }

    /// `f` followed by a cap with `dots` dots on target loop `j`.
    pub fn cap_target_loop(&self, alg: &FrobeniusAlgebra<C>, j: usize, dots: u32) -> Self {
        let k = self.cycles().target_loop(j);
        let target = self.target.remove_loop(j);
        let mut r = Self::zero(self.source.clone(), target);
        for (p, x) in &self.terms {
            let v = sphere_value(alg, (p >> k & 1) as u32 + dots);
            r.add_term(remove_bit(*p, k), x.clone() * v);
        }
        r
    }

    /// A cup with `dots` dots on source loop `i`, followed by `g`.
    pub fn cup_source_loop(&self, alg: &FrobeniusAlgebra<C>, i: usize, dots: u32) -> Self {
        let k = self.cycles().source_loop(i);
        let source = self.source.remove_loop(i);
        let mut r = Self::zero(source, self.target.clone());
        for (p, x) in &self.terms {
            let v = sphere_value(alg, (p >> k & 1) as u32 + dots);
            r.add_term(remove_bit(*p, k), x.clone() * v);
        }
        r
    }
}

/// `ε(X^d)`: the value of a sphere with `d` dots.
fn sphere_value<C: Coefficient>(alg: &FrobeniusAlgebra<C>, d: u32) -> C {
    match d {
        0 => C::zero(),
        1 => C::one(),
        2 => alg.h.clone(),
        _ => alg.counit(&alg.handle_power(0, d)),
    }
}

/// Closed surface of genus `g` with `d` dots: `ε((2X-h)^g X^d)`.
pub fn evaluate_closed<C: Coefficient>(alg: &FrobeniusAlgebra<C>, g: u32, d: u32) -> C {
    alg.counit(&alg.handle_power(g, d))
}

fn remove_bit(w: u64, j: usize) -> u64 {
    let low = w & ((1u64 << j) - 1);
    let high = w >> (j + 1);
    low | high << j
}

fn remap_bits(w: u64, map: &[usize]) -> u64 {
    let mut r = 0;
    for (k, &t) in map.iter().enumerate() {
        if w >> k & 1 == 1 {
            r |= 1 << t;
        }
    }
    r
}

type ExpansionCache<C> = HashMap<(usize, u32, u32), Vec<(u64, C)>>;

/// Multiplies each partial term by the disk expansion of one component with
/// cycles `cycles` (or by its closed value when `b = 0`).
fn multiply_expansion<C: Coefficient>(
    alg: &FrobeniusAlgebra<C>,
    cache: &mut ExpansionCache<C>,
    acc: Vec<(u64, C)>,
    b: usize,
    genus: u32,
    dots: u32,
    cycles: &[usize],
) -> Vec<(u64, C)> {
    let exp = cache.entry((b, genus, dots)).or_insert_with(|| {
        let x = alg.handle_power(genus, dots);
        if b == 0 {
            vec![(0, alg.counit(&x))]
        } else {
            alg.iterated_comul(&x, b).terms().map(|(w, c)| (*w, c.clone())).collect()
        }
    });
    let mut out = Vec::with_capacity(acc.len() * exp.len());
    for (p, c) in &acc {
        for (w, e) in exp.iter() {
            let v = c.clone() * e.clone();
            if v.is_zero() {
                continue;
            }
            out.push((*p | remap_bits(*w, cycles), v));
        }
    }
    out
}

/// Connected-component bookkeeping for gluing disk pieces into a surface.
struct GluePlan {
    comp_of_piece: Vec<usize>,
    comps: Vec<PlanComponent>,
}

struct PlanComponent {
    genus: u32,
    cycles: Vec<usize>,
}

impl GluePlan {
    fn new(
        n_pieces: usize,
        intervals: &[(usize, usize)],
        circles: &[(usize, usize)],
        new_cycle_piece: &[usize],
    ) -> Result<Self> {
        assert!(n_pieces <= 128, "too many surface pieces");
        let mut uf: Vec<usize> = (0..n_pieces).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for &(a, b) in intervals.iter().chain(circles) {
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            if ra != rb {
                uf[ra] = rb;
            }
        }
        let mut index = HashMap::new();
        let mut comp_of_piece = vec![0; n_pieces];
        for (p, slot) in comp_of_piece.iter_mut().enumerate() {
            let r = find(&mut uf, p);
            let n = index.len();
            *slot = *index.entry(r).or_insert(n);
        }
        let n = index.len();
        let mut chi = vec![0i64; n];
        for &c in &comp_of_piece {
            chi[c] += 1;
        }
        for &(a, _) in intervals {
            chi[comp_of_piece[a]] -= 1;
        }
        let mut cycles = vec![Vec::new(); n];
        for (k, &piece) in new_cycle_piece.iter().enumerate() {
            cycles[comp_of_piece[piece]].push(k);
        }
        let mut comps = Vec::with_capacity(n);
        for (c, cyc) in cycles.into_iter().enumerate() {
            let twice_g = 2 - chi[c] - cyc.len() as i64;
            if twice_g < 0 || twice_g % 2 != 0 {
                return Err(FoamError::InvalidDiagram(format!(
                    "glued surface component has χ = {} and {} boundary curves",
                    chi[c],
                    cyc.len()
                )));
            }
            comps.push(PlanComponent { genus: (twice_g / 2) as u32, cycles: cyc });
        }
        Ok(Self { comp_of_piece, comps })
    }

    fn expand<C: Coefficient>(
        &self,
        alg: &FrobeniusAlgebra<C>,
        cache: &mut ExpansionCache<C>,
        pieces: u128,
        coeff: C,
        into: &mut MorphismSum<C>,
    ) {
        let mut dots = vec![0u32; self.comps.len()];
        for (p, &c) in self.comp_of_piece.iter().enumerate() {
            dots[c] += (pieces >> p & 1) as u32;
        }
        let mut acc = vec![(0u64, coeff)];
        for (c, comp) in self.comps.iter().enumerate() {
            acc = multiply_expansion(alg, cache, acc, comp.cycles.len(), comp.genus, dots[c], &comp.cycles);
            if acc.is_empty() {
                return;
            }
        }
        for (p, x) in acc {
            into.add_term(p, x);
        }
    }
}

// ---------------------------------------------------------------------------
// JSON form

#[derive(Serialize, Deserialize)]
struct TermJson {
    components: Vec<Vec<usize>>,
    dots: Vec<u8>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
pub struct MorphismJson {
    source: Matching,
    target: Matching,
    terms: Vec<TermJson>,
}

impl MorphismSum<RingElem> {
    /// Components are listed as sets of curve indices: source arcs (in arc
    /// order) then source loops, then target arcs and target loops.
    pub fn to_json(&self) -> MorphismJson {
        let cs = self.cycles();
        let curve = |m: &Matching, p: usize| m.arcs().iter().position(|&(a, _)| a == p.min(m.partner(p))).unwrap();
        let ns = self.source.arcs().len() + self.source.loops().len();
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for pts in &cs.arc_cycle_points {
            let mut v: Vec<usize> = pts
                .iter()
                .flat_map(|&p| [curve(&self.source, p), ns + curve(&self.target, p)])
                .collect();
            v.sort_unstable();
            v.dedup();
            comps.push(v);
        }
        let nsa = self.source.arcs().len();
        for i in 0..cs.n_source_loops {
            comps.push(vec![nsa + i]);
        }
        let nta = self.target.arcs().len();
        for j in 0..cs.n_target_loops {
            comps.push(vec![ns + nta + j]);
        }
        let terms = self
            .terms
            .iter()
            .map(|(p, c)| TermJson {
                components: comps.clone(),
                dots: (0..cs.count()).map(|k| (p >> k & 1) as u8).collect(),
                coeff: c.to_string(),
            })
            .collect();
        MorphismJson { source: self.source.clone(), target: self.target.clone(), terms }
    }

    pub fn from_json(j: MorphismJson) -> Result<Self> {
        let mut m = Self::zero(j.source, j.target);
        let n = m.cycles().count();
        for t in j.terms {
            if t.dots.len() != n {
                return Err(FoamError::Parse("dot vector does not match the cycle count".into()));
            }
            let p = t.dots.iter().enumerate().fold(0u64, |w, (k, &d)| w | u64::from(d & 1) << k);
            m.add_term(p, t.coeff.parse()?);
        }
        Ok(m)
    }
}

impl Serialize for MorphismSum<RingElem> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MorphismSum<RingElem> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MorphismSum::from_json(MorphismJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
