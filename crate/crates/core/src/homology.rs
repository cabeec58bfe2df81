//! The functor to free modules, bigraded cohomology over Q(i), and
//! Smith normal form over Z[i].

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use num_traits::Zero;
use rayon::prelude::*;

use crate::complex::{FormalComplex, VertexId};
use crate::error::{FoamError, Result};
use crate::frobenius::{AlgebraElement, FrobeniusAlgebra};
use crate::ring::{Coefficient, FieldScalar, GaussianInt, RingElem, Specialization};
use crate::skein::{resolution_loops, LaurentPoly};
use crate::tangle::PDCode;

/// A basis element: one word over `{1, X}` per loop of an object's web.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub q: i32,
    pub source: VertexId,
    pub word: u64,
}

/// A sparse matrix stored as `(row, col, value)` triples.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<F> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, F)>,
}

/// A complex of free modules with homogeneous generators.
#[derive(Clone, Debug)]
pub struct AlgebraicComplex<F> {
    pub graded: bool,
    pub gens: BTreeMap<i32, Vec<Generator>>,
    /// `diffs[k]` maps degree `k` to `k + 1`; rows index the targets.
    pub diffs: BTreeMap<i32, SparseMatrix<F>>,
}

/// Contribution of a loop in state `x` (1 or X) to the q-degree.
fn letter_q(dotted: bool) -> i32 {
    if dotted {
        1
    } else {
        -1
    }
}

fn word_q(word: u64, n: usize) -> i32 {
    (0..n).map(|k| letter_q(word >> k & 1 == 1)).sum()
}

impl<F: Coefficient> AlgebraicComplex<F> {
    pub fn n_generators(&self) -> usize {
        self.gens.values().map(Vec::len).sum()
    }

    pub fn map<G: Coefficient>(&self, f: impl Fn(&F) -> G) -> AlgebraicComplex<G> {
        let diffs = self
            .diffs
            .iter()
            .map(|(&k, m)| {
                let entries = m
                    .entries
                    .iter()
                    .map(|(r, c, v)| (*r, *c, f(v)))
                    .filter(|(_, _, v)| !v.is_zero())
                    .collect();
                (k, SparseMatrix { rows: m.rows, cols: m.cols, entries })
            })
            .collect();
        AlgebraicComplex { graded: self.graded, gens: self.gens.clone(), diffs }
    }

    /// Graded Euler characteristic `Σ (-1)^k q^{q(g)}`.
    pub fn euler_characteristic(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (&k, gs) in &self.gens {
            let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
            for g in gs {
                p.add_term(g.q, sign);
            }
        }
        p
    }

    /// Checks `d^{k+1} d^k = 0` and, if graded, that every entry joins
    /// generators of equal q-degree.
    pub fn verify(&self) -> Result<()> {
        for (&k, m) in &self.diffs {
            if m.entries.is_empty() {
                continue;
            }
            if self.graded {
                let (src, tgt) = (&self.gens[&k], &self.gens[&(k + 1)]);
                if let Some((r, c, _)) = m.entries.iter().find(|(r, c, _)| src[*c].q != tgt[*r].q) {
                    return Err(FoamError::DegreeViolation(format!("entry ({r},{c}) of d^{k} is not q-homogeneous")));
                }
            }
            if let Some(m2) = self.diffs.get(&(k + 1)) {
                let mut by_row: HashMap<usize, Vec<(usize, &F)>> = HashMap::new();
                for (r, c, v) in &m.entries {
                    by_row.entry(*r).or_default().push((*c, v));
                }
                let mut acc: HashMap<(usize, usize), F> = HashMap::new();
                for (r2, c2, v2) in &m2.entries {
                    for (c, v) in by_row.get(c2).into_iter().flatten() {
                        let e = acc.entry((*r2, *c)).or_insert_with(F::zero);
                        *e = e.clone() + v2.clone() * (*v).clone();
                    }
                }
                if acc.values().any(|v| !v.is_zero()) {
                    return Err(FoamError::NonZeroSquare(format!("d^{} d^{k} != 0", k + 1)));
                }
            }
        }
        Ok(())
    }

    /// Splits `d^k` into blocks by q-degree (one block when ungraded):
    /// `q -> (n_cols, n_rows, entries)` with local indices.
    fn blocks(&self, k: i32) -> BTreeMap<i32, (usize, usize, Vec<(usize, usize, F)>)> {
        let key = |g: &Generator| if self.graded { g.q } else { 0 };
        let empty = Vec::new();
        let src = self.gens.get(&k).unwrap_or(&empty);
        let tgt = self.gens.get(&(k + 1)).unwrap_or(&empty);
        let mut out: BTreeMap<i32, (usize, usize, Vec<(usize, usize, F)>)> = BTreeMap::new();
        let mut local_c = vec![0; src.len()];
        let mut local_r = vec![0; tgt.len()];
        for (i, g) in src.iter().enumerate() {
            let b = out.entry(key(g)).or_insert((0, 0, Vec::new()));
            local_c[i] = b.0;
            b.0 += 1;
        }
        for (i, g) in tgt.iter().enumerate() {
            let b = out.entry(key(g)).or_insert((0, 0, Vec::new()));
            local_r[i] = b.1;
            b.1 += 1;
        }
        if let Some(m) = self.diffs.get(&k) {
            for (r, c, v) in &m.entries {
                out.get_mut(&key(&src[*c])).unwrap().2.push((local_r[*r], local_c[*c], v.clone()));
            }
        }
        out
    }
}

/// Applies the TQFT to a complex of closed webs. Loops left in an object
/// are expanded in the basis `{1, X}`.
pub fn apply_tqft<C: Coefficient>(cx: &FormalComplex<C>) -> Result<AlgebraicComplex<C>> {
    let alg = cx.algebra();
    let mut gens: BTreeMap<i32, Vec<Generator>> = BTreeMap::new();
    let mut index: HashMap<(VertexId, u64), (i32, usize)> = HashMap::new();
    for id in cx.ids() {
        let (deg, obj) = cx.object(id).unwrap();
        if obj.web.n_points() > 0 {
            return Err(FoamError::InvalidDiagram("TQFT needs closed webs".into()));
        }
        let n = obj.web.loops().len();
        let list = gens.entry(deg).or_default();
        for word in 0..1u64 << n {
            index.insert((id, word), (deg, list.len()));
            list.push(Generator { q: obj.qshift + word_q(word, n), source: id, word });
        }
    }
    let mut diffs: BTreeMap<i32, SparseMatrix<C>> = BTreeMap::new();
    for (&k, list) in &gens {
        let rows = gens.get(&(k + 1)).map_or(0, Vec::len);
        diffs.insert(k, SparseMatrix { rows, cols: list.len(), entries: Vec::new() });
    }
    for src in cx.ids() {
        let ns = cx.object(src).unwrap().1.web.loops().len();
        for (tgt, f) in cx.out_entries(src) {
            let nt = f.target().loops().len();
            let deg = cx.object(src).unwrap().0;
            let mut acc: HashMap<(usize, usize), C> = HashMap::new();
            for (&pattern, c) in f.terms() {
                // cycles of a closed morphism: source loops, then target loops
                let tword = pattern >> ns & ((1u64 << nt) - 1);
                let dots = pattern & ((1u64 << ns) - 1);
                for sword in 0..1u64 << ns {
                    let mut v = c.clone();
                    for i in 0..ns {
                        let x = AlgebraElement::basis(sword >> i & 1 == 1);
                        let y = if dots >> i & 1 == 1 { alg.mul_x(&x) } else { x };
                        v = v * alg.counit(&y);
                        if v.is_zero() {
                            break;
                        }
                    }
                    if v.is_zero() {
                        continue;
                    }
                    let (_, col) = index[&(src, sword)];
                    let (_, row) = index[&(tgt, tword)];
                    let e = acc.entry((row, col)).or_insert_with(C::zero);
                    *e = e.clone() + v;
                }
            }
            let m = diffs.get_mut(&deg).unwrap();
            m.entries.extend(acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)));
        }
    }
    for m in diffs.values_mut() {
        m.entries.sort_by_key(|e| (e.0, e.1));
    }
    Ok(AlgebraicComplex { graded: cx.is_graded(), gens, diffs })
}

/// The resolution cube built straight from the Frobenius algebra: merges
/// and splits of loops in the `{1, X}` basis, no cobordisms involved.
pub fn direct_cube<C: Coefficient>(
    alg: &FrobeniusAlgebra<C>,
    graded: bool,
    pd: &PDCode,
    cap: usize,
) -> Result<AlgebraicComplex<C>> {
    let n = pd.n_crossings();
    if n > cap {
        return Err(FoamError::InvalidDiagram(format!("direct cube refused: {n} crossings exceed the cap of {cap}")));
    }
    if !pd.open_edges().is_empty() {
        return Err(FoamError::InvalidDiagram("the cube needs a closed diagram".into()));
    }
    let states: Vec<ResolutionLoops> = (0..1u64 << n).map(|bits| ResolutionLoops::new(pd, bits)).collect();
    let free = pd.free_loops;
    let hom_deg = |bits: u64| -> i32 {
        (0..n)
            .map(|c| {
                let singular = bits >> c & 1 == 1;
                match (pd.signs[c] > 0, singular) {
                    (true, true) => -1,
                    (false, true) => 1,
                    _ => 0,
                }
            })
            .sum()
    };
    let shift = |bits: u64| -> i32 {
        (0..n)
            .map(|c| {
                let s = i32::from(pd.signs[c]);
                if bits >> c & 1 == 1 {
                    2 * s
                } else {
                    s
                }
            })
            .sum()
    };
    let mut gens: BTreeMap<i32, Vec<Generator>> = BTreeMap::new();
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    for (bits, st) in states.iter().enumerate() {
        let bits = bits as u64;
        let nl = st.count + free;
        let list = gens.entry(hom_deg(bits)).or_default();
        for word in 0..1u64 << nl {
            index.insert((bits, word), list.len());
            list.push(Generator { q: shift(bits) + word_q(word, nl), source: bits as usize, word });
        }
    }
    let mut diffs: BTreeMap<i32, SparseMatrix<C>> = BTreeMap::new();
    for (&k, list) in &gens {
        let rows = gens.get(&(k + 1)).map_or(0, Vec::len);
        diffs.insert(k, SparseMatrix { rows, cols: list.len(), entries: Vec::new() });
    }
    for (bits, st) in states.iter().enumerate() {
        let bits = bits as u64;
        let k = hom_deg(bits);
        for c in 0..n {
            // the edge at c raises the degree: positive crossings go
            // singular -> oriented, negative ones oriented -> singular
            let singular = bits >> c & 1 == 1;
            if (pd.signs[c] > 0) != singular {
                continue;
            }
            let tbits = bits ^ (1 << c);
            let tt = &states[tbits as usize];
            let before = (0..c).filter(|&c2| bits >> c2 & 1 == 1).count();
            let sign = if before % 2 == 0 { C::one() } else { -C::one() };
            let m = diffs.get_mut(&k).unwrap();
            for word in 0..1u64 << (st.count + free) {
                for (tw, v) in cube_edge(alg, st, tt, word, free) {
                    let v = sign.clone() * v;
                    if !v.is_zero() {
                        m.entries.push((index[&(tbits, tw)], index[&(bits, word)], v));
                    }
                }
            }
        }
    }
    Ok(AlgebraicComplex { graded, gens, diffs })
}

/// Loops of one resolution, identified by the PD edges they run along.
struct ResolutionLoops {
    count: usize,
    loop_of_edge: HashMap<u32, usize>,
}

impl ResolutionLoops {
    fn new(pd: &PDCode, bits: u64) -> Self {
        let mut labels: Vec<u32> = pd.crossings.iter().flatten().copied().collect();
        labels.sort_unstable();
        labels.dedup();
        let pos: HashMap<u32, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut uf: Vec<usize> = (0..labels.len()).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for (c, x) in pd.crossings.iter().enumerate() {
            let singular = bits >> c & 1 == 1;
            let oriented = if pd.signs[c] > 0 { [(0, 1), (2, 3)] } else { [(0, 3), (1, 2)] };
            let other = if pd.signs[c] > 0 { [(0, 3), (1, 2)] } else { [(0, 1), (2, 3)] };
            for (s, t) in if singular { other } else { oriented } {
                let (a, b) = (find(&mut uf, pos[&x[s]]), find(&mut uf, pos[&x[t]]));
                if a != b {
                    uf[a] = b;
                }
            }
        }
        let mut root_index = HashMap::new();
        let mut loop_of_edge = HashMap::new();
        for (i, &l) in labels.iter().enumerate() {
            let r = find(&mut uf, i);
            let next = root_index.len();
            let k = *root_index.entry(r).or_insert(next);
            loop_of_edge.insert(l, k);
        }
        Self { count: root_index.len(), loop_of_edge }
    }
}

/// Image of the basis word `word` of `src` under the merge or split that
/// turns `src` into `tgt`. Free loops sit after the diagram loops.
fn cube_edge<C: Coefficient>(
    alg: &FrobeniusAlgebra<C>,
    src: &ResolutionLoops,
    tgt: &ResolutionLoops,
    word: u64,
    free: usize,
) -> Vec<(u64, C)> {
    // for each source loop, the target loops its edges land in
    let mut images: Vec<Vec<usize>> = vec![Vec::new(); src.count];
    for (e, &l) in &src.loop_of_edge {
        let t = tgt.loop_of_edge[e];
        if !images[l].contains(&t) {
            images[l].push(t);
        }
    }
    let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); tgt.count];
    for (l, ts) in images.iter().enumerate() {
        for &t in ts {
            preimages[t].push(l);
        }
    }
    let bit = |w: u64, i: usize| w >> i & 1 == 1;
    let mut base = 0u64;
    for f in 0..free {
        if bit(word, src.count + f) {
            base |= 1 << (tgt.count + f);
        }
    }
    let mut out: Vec<(u64, C)> = vec![(base, C::one())];
    let mut handled = vec![false; src.count];
    for l in 0..src.count {
        if handled[l] {
            continue;
        }
        handled[l] = true;
        let x = AlgebraElement::basis(bit(word, l));
        // (target loops, element of A or A⊗A on them)
        let piece: Vec<(u64, C)> = if images[l].len() == 2 {
            let (t1, t2) = (images[l][0], images[l][1]);
            alg.comul(&x)
                .terms()
                .map(|(&w, c)| {
                    let m = u64::from(w & 1 == 1) << t1 | u64::from(w >> 1 & 1 == 1) << t2;
                    (m, c.clone())
                })
                .collect()
        } else {
            let t = images[l][0];
            let mut y = x;
            for &l2 in &preimages[t] {
                if l2 != l {
                    handled[l2] = true;
                    y = alg.mul(&y, &AlgebraElement::basis(bit(word, l2)));
                }
            }
            vec![(0, y.c1.clone()), (1 << t, y.c_x.clone())]
        };
        let mut next = Vec::new();
        for (w, c) in &out {
            for (pw, pc) in &piece {
                let v = c.clone() * pc.clone();
                if !v.is_zero() {
                    next.push((w | pw, v));
                }
            }
        }
        out = next;
    }
    out
}

// ---------------------------------------------------------------------------
// ranks

fn field_rank<F: Coefficient>(entries: Vec<(usize, usize, F)>) -> usize {
    let mut rows: BTreeMap<usize, BTreeMap<usize, F>> = BTreeMap::new();
    for (r, c, v) in entries {
        if !v.is_zero() {
            rows.entry(r).or_default().insert(c, v);
        }
    }
    // sparsest rows first keeps fill-in down
    let mut order: Vec<BTreeMap<usize, F>> = rows.into_values().collect();
    order.sort_by_key(BTreeMap::len);
    let mut pivots: HashMap<usize, BTreeMap<usize, F>> = HashMap::new();
    for mut row in order {
        while let Some((&c, v)) = row.iter().next() {
            let Some(p) = pivots.get(&c) else {
                let inv = v.try_inverse().expect("nonzero field element");
                let normalized = row.into_iter().map(|(k, x)| (k, x * inv.clone())).collect();
                pivots.insert(c, normalized);
                break;
            };
            let factor = v.clone();
            for (k, x) in p {
                let cur = row.remove(k).unwrap_or_else(F::zero);
                let new = cur - factor.clone() * x.clone();
                if !new.is_zero() {
                    row.insert(*k, new);
                }
            }
        }
    }
    pivots.len()
}

/// Bigraded ranks, plus torsion (nonunit elementary divisors) when computed
/// over Z[i]. Ungraded tables use `j = 0` throughout.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BigradedTable {
    pub graded: bool,
    pub ranks: BTreeMap<(i32, i32), usize>,
    pub torsion: BTreeMap<(i32, i32), Vec<GaussianInt>>,
}

impl BigradedTable {
    pub fn rank(&self, i: i32, j: i32) -> usize {
        self.ranks.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn support(&self) -> Vec<(i32, i32)> {
        self.ranks.keys().copied().collect()
    }

    /// The table of the mirror diagram: `(i, j) -> (-i, -j)`.
    pub fn mirrored(&self) -> Self {
        Self {
            graded: self.graded,
            ranks: self.ranks.iter().map(|(&(i, j), &r)| ((-i, -j), r)).collect(),
            torsion: BTreeMap::new(),
        }
    }

    pub fn poincare(&self) -> PoincarePolynomial {
        let mut p = PoincarePolynomial::default();
        for (&k, &r) in &self.ranks {
            *p.coeffs.entry(k).or_insert(0) += r as i64;
        }
        p
    }

    fn key(&self, i: i32, j: i32) -> String {
        if self.graded {
            format!("({i},{j})")
        } else {
            format!("({i})")
        }
    }

    /// `{"(i,j)": rank}`; ungraded tables use `{"(i)": rank}`.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            self.ranks.iter().map(|(&(i, j), &r)| (self.key(i, j), serde_json::Value::from(r))).collect();
        serde_json::Value::Object(map)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(if self.graded { "i,j,rank\n" } else { "i,rank\n" });
        for (&(i, j), &r) in &self.ranks {
            if self.graded {
                let _ = writeln!(s, "{i},{j},{r}");
            } else {
                let _ = writeln!(s, "{i},{r}");
            }
        }
        s
    }

    /// Rows are homological degrees, columns q-degrees.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        if self.ranks.is_empty() {
            return "(zero)\n".into();
        }
        if !self.graded {
            let _ = writeln!(s, "{:>4} | rank", "i");
            for (&(i, _), &r) in &self.ranks {
                let _ = writeln!(s, "{i:>4} | {r}");
            }
            return s;
        }
        let is: Vec<i32> = {
            let (lo, hi) = (self.ranks.keys().map(|k| k.0).min().unwrap(), self.ranks.keys().map(|k| k.0).max().unwrap());
            (lo..=hi).collect()
        };
        let mut js: Vec<i32> = self.ranks.keys().map(|k| k.1).collect();
        js.sort_unstable();
        js.dedup();
        js.reverse();
        let _ = write!(s, "{:>5} |", "j\\i");
        for i in &is {
            let _ = write!(s, "{i:>4}");
        }
        s.push('\n');
        let _ = writeln!(s, "{}", "-".repeat(7 + 4 * is.len()));
        for j in js {
            let _ = write!(s, "{j:>5} |");
            for &i in &is {
                let cell = match (self.rank(i, j), self.torsion.get(&(i, j))) {
                    (0, None) => ".".to_string(),
                    (r, None) => r.to_string(),
                    (r, Some(t)) => format!("{r}+{}t", t.len()),
                };
                let _ = write!(s, "{cell:>4}");
            }
            s.push('\n');
        }
        s
    }
}

/// `Σ rank(i,j) t^i q^j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PoincarePolynomial {
    pub coeffs: BTreeMap<(i32, i32), i64>,
}

impl PoincarePolynomial {
    /// Evaluation at `t = -1`.
    pub fn at_t_minus_one(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (&(i, j), &c) in &self.coeffs {
            p.add_term(j, if i.rem_euclid(2) == 0 { c } else { -c });
        }
        p
    }
}

impl fmt::Display for PoincarePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (k, (&(i, j), &c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mut body = String::new();
            if i != 0 {
                let _ = write!(body, "t^{i}");
            }
            if j != 0 {
                let _ = write!(body, "q^{j}");
            }
            match (c, body.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{body}")?,
                _ => write!(f, "{c}{body}")?,
            }
        }
        Ok(())
    }
}

/// Exact ranks over Q(i), block by block in q-degree.
pub fn cohomology(a: &AlgebraicComplex<FieldScalar>) -> BigradedTable {
    let degs: Vec<i32> = a.gens.keys().copied().collect();
    let mut dims: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    for (&k, gs) in &a.gens {
        for g in gs {
            *dims.entry((k, if a.graded { g.q } else { 0 })).or_default() += 1;
        }
    }
    let jobs: Vec<(i32, i32, Vec<(usize, usize, FieldScalar)>)> = degs
        .iter()
        .flat_map(|&k| a.blocks(k).into_iter().map(move |(q, (_, _, e))| (k, q, e)))
        .collect();
    let ranks: HashMap<(i32, i32), usize> =
        jobs.into_par_iter().map(|(k, q, e)| ((k, q), field_rank(e))).collect();
    let rank_d = |k: i32, q: i32| ranks.get(&(k, q)).copied().unwrap_or(0);
    let mut table = BigradedTable { graded: a.graded, ..Default::default() };
    for (&(k, q), &dim) in &dims {
        let r = dim - rank_d(k, q) - rank_d(k - 1, q);
        if r > 0 {
            table.ranks.insert((k, q), r);
        }
    }
    table
}

/// Specializes scalars into Q(i) and computes ranks.
pub fn cohomology_at<C: Coefficient>(a: &AlgebraicComplex<C>, s: &Specialization) -> BigradedTable {
    let mut field = a.map(|c| c.to_field(s));
    field.graded = a.graded && s.is_graded();
    cohomology(&field)
}

// ---------------------------------------------------------------------------
// Smith normal form over Z[i]

fn associate_normal(x: &GaussianInt) -> GaussianInt {
    let units = [GaussianInt::new(1, 0), GaussianInt::new(0, 1), GaussianInt::new(-1, 0), GaussianInt::new(0, -1)];
    units
        .iter()
        .map(|u| x * u)
        .find(|y| y.re > Zero::zero() && y.im >= Zero::zero())
        .unwrap_or_else(|| x.clone())
}

/// Diagonal of a Smith normal form of a dense matrix over Z[i], with
/// nonzero entries normalized up to units.
pub fn smith_diagonal(mut m: Vec<Vec<GaussianInt>>) -> Vec<GaussianInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in m.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.norm() < m[bi][bj].norm()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { return diag };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let p = m[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_round(&p);
                for j in t..cols {
                    let v = &m[i][j] - &(&q * &m[t][j]);
                    m[i][j] = v;
                }
                clean &= m[i][t].is_zero();
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_round(&p);
                for i in t..rows {
                    let v = &m[i][j] - &(&q * &m[i][t]);
                    m[i][j] = v;
                }
                clean &= m[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // enforce divisibility of the remaining block by the pivot
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&m[i][j] - &(&m[i][j].div_round(&p) * &p)).is_zero()));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = &m[t][j] + &m[i][j];
                        m[t][j] = v;
                    }
                }
                None => break,
            }
        }
        diag.push(associate_normal(&m[t][t]));
    }
    diag
}

/// Ranks and torsion over Z[i]. Scalars must already be Gaussian integers.
pub fn integral_homology(a: &AlgebraicComplex<GaussianInt>) -> BigradedTable {
    let mut dims: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    for (&k, gs) in &a.gens {
        for g in gs {
            *dims.entry((k, if a.graded { g.q } else { 0 })).or_default() += 1;
        }
    }
    let mut divisors: HashMap<(i32, i32), Vec<GaussianInt>> = HashMap::new();
    for &k in a.gens.keys() {
        for (q, (nc, nr, entries)) in a.blocks(k) {
            let mut dense = vec![vec![GaussianInt::zero(); nc]; nr];
            for (r, c, v) in entries {
                dense[r][c] = v;
            }
            divisors.insert((k, q), smith_diagonal(dense));
        }
    }
    let rank_d = |k: i32, q: i32| divisors.get(&(k, q)).map_or(0, Vec::len);
    let mut table = BigradedTable { graded: a.graded, ..Default::default() };
    for (&(k, q), &dim) in &dims {
        let r = dim - rank_d(k, q) - rank_d(k - 1, q);
        if r > 0 {
            table.ranks.insert((k, q), r);
        }
        let tors: Vec<GaussianInt> =
            divisors.get(&(k - 1, q)).into_iter().flatten().filter(|d| !d.is_unit()).cloned().collect();
        if !tors.is_empty() {
            table.torsion.insert((k, q), tors);
        }
    }
    table
}

/// The `a = h = 0` reduction of a ring element to Z[i].
pub fn constant_term(x: &RingElem) -> GaussianInt {
    x.terms()
        .find(|(m, _)| m.deg_a == 0 && m.deg_h == 0)
        .map_or_else(GaussianInt::zero, |(_, c)| c.clone())
}

/// Number of generators of the unreduced cube, `Σ 2^{#loops}`.
pub fn cube_generator_count(pd: &PDCode) -> usize {
    (0..1u64 << pd.n_crossings()).map(|b| 1usize << resolution_loops(pd, b)).sum()
}
