//! Seam-aware evaluation of closed foams and machine checks of the local
//! relations, for both the dotted theory over `R` and the dotless theory
//! over `R~ = Z[1/2, i][a, h]`.
//!
//! A closed foam is given as a movie: a sequence of elementary slices acting
//! on a running list of circles. Each circle is either oriented or a
//! two-vertex circle, the boundary of a pair of facets meeting along a seam.
//! A two-vertex circle's state is written in the coordinates of its
//! preferred facet; a dot on the other facet acts as `h - X`.
//!
//! Seam scalars: every seam arc that closes up (a singular cap, a vertex-pair
//! cancellation, a singular split or a seam ring) contributes `+i` when the
//! preferred facet lies on its left and `-i` otherwise.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{FoamError, Result};
use crate::ring::{Coefficient, DotlessElem, DyadicGaussian, RingElem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeamSide {
    Left,
    Right,
}

impl SeamSide {
    pub fn flip(self) -> Self {
        match self {
            SeamSide::Left => SeamSide::Right,
            SeamSide::Right => SeamSide::Left,
        }
    }

    fn sigma<S: Coefficient>(self) -> S {
        match self {
            SeamSide::Left => S::i(),
            SeamSide::Right => -S::i(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Facet {
    Preferred,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CircleKind {
    Oriented,
    TwoVertex(SeamSide),
}

/// One elementary slice. Circle indices refer to the running state; new
/// circles are appended, removed ones shift later indices down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slice {
    /// a cup; for a two-vertex circle the cup carries a seam arc
    Birth(CircleKind),
    /// a cap on circle `i`
    Death(usize),
    /// saddle fusing oriented circle `j` into the given facet of circle `i`
    Merge(usize, usize, Facet),
    /// saddle pinching an oriented circle off a facet of circle `i`
    Split(usize, Facet),
    Dot(usize, Facet),
    /// a handle attached to a facet of circle `i`
    Handle(usize, Facet),
    /// singular saddle joining oriented circles `i`, `j` into a two-vertex circle
    SingularMerge(usize, usize, SeamSide),
    /// singular saddle splitting two-vertex circle `i` into two oriented circles
    SingularSplit(usize),
    /// curtain removing the vertex pair of circle `i`
    VertexPairCancel(usize),
    /// curtain creating a vertex pair on oriented circle `i`
    VertexPairCreate(usize, SeamSide),
    /// a seam circle running once around the tube over oriented circle `i`
    SeamRing(usize, SeamSide),
}

impl Slice {
    fn map_indices(self, f: impl Fn(usize) -> usize) -> Slice {
        use Slice::*;
        match self {
            Birth(k) => Birth(k),
            Death(i) => Death(f(i)),
            Merge(i, j, x) => Merge(f(i), f(j), x),
            Split(i, x) => Split(f(i), x),
            Dot(i, x) => Dot(f(i), x),
            Handle(i, x) => Handle(f(i), x),
            SingularMerge(i, j, s) => SingularMerge(f(i), f(j), s),
            SingularSplit(i) => SingularSplit(f(i)),
            VertexPairCancel(i) => VertexPairCancel(f(i)),
            VertexPairCreate(i, s) => VertexPairCreate(f(i), s),
            SeamRing(i, s) => SeamRing(f(i), s),
        }
    }

    fn flip_seam(self) -> Slice {
        use Slice::*;
        match self {
            Birth(CircleKind::TwoVertex(s)) => Birth(CircleKind::TwoVertex(s.flip())),
            SingularMerge(i, j, s) => SingularMerge(i, j, s.flip()),
            VertexPairCreate(i, s) => VertexPairCreate(i, s.flip()),
            SeamRing(i, s) => SeamRing(i, s.flip()),
            other => other,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SliceWord {
    pub slices: Vec<Slice>,
}

impl SliceWord {
    pub fn new(slices: Vec<Slice>) -> Self {
        Self { slices }
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn then(&self, other: &SliceWord) -> SliceWord {
        let mut slices = self.slices.clone();
        slices.extend_from_slice(&other.slices);
        SliceWord { slices }
    }

    /// The same foam with every seam orientation reversed.
    pub fn flip_seams(&self) -> SliceWord {
        SliceWord { slices: self.slices.iter().map(|s| s.flip_seam()).collect() }
    }

    pub fn dot_count(&self) -> usize {
        self.slices.iter().filter(|s| matches!(s, Slice::Dot(..))).count()
    }

    /// Interleaves two closed words into one movie of their disjoint union.
    /// `pattern[k]` says whether the k-th slice comes from `a`; once one word
    /// is exhausted the rest of the other follows.
    pub fn interleave(a: &SliceWord, b: &SliceWord, pattern: &[bool]) -> SliceWord {
        let mut owners: Vec<u8> = Vec::new();
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut ia, mut ib) = (0, 0);
        let mut k = 0;
        while ia < a.len() || ib < b.len() {
            let take_a = if ia == a.len() {
                false
            } else if ib == b.len() {
                true
            } else {
                pattern.get(k).copied().unwrap_or(true)
            };
            k += 1;
            let (owner, s) = if take_a {
                ia += 1;
                (0u8, a.slices[ia - 1])
            } else {
                ib += 1;
                (1u8, b.slices[ib - 1])
            };
            let global = |local: usize| {
                owners.iter().enumerate().filter(|(_, &o)| o == owner).nth(local).map(|(g, _)| g).unwrap_or(usize::MAX)
            };
            let mapped = s.map_indices(global);
            match mapped {
                Slice::Birth(_) | Slice::Split(..) | Slice::SingularSplit(_) => owners.push(owner),
                Slice::Death(g) | Slice::Merge(_, g, _) | Slice::SingularMerge(_, g, _)
                    if g < owners.len() => {
                        owners.remove(g);
                    }
                _ => {}
            }
            out.push(mapped);
        }
        SliceWord { slices: out }
    }
}

impl From<Vec<Slice>> for SliceWord {
    fn from(slices: Vec<Slice>) -> Self {
        Self { slices }
    }
}

// ---------------------------------------------------------------------------
// The two Frobenius models

/// Structure constants of a rank-two Frobenius algebra in a chosen basis.
struct Model<S> {
    unit: [S; 2],
    counit: [S; 2],
    /// `mul[x][y]` is the product `e_x e_y`
    mul: [[[S; 2]; 2]; 2],
    /// `comul[x][u][v]` is the coefficient of `e_u ⊗ e_v` in `Δ(e_x)`
    comul: [[[S; 2]; 2]; 2],
    /// the involution `X ↦ h - X` relating the two facets at a seam
    phi: [[S; 2]; 2],
    /// multiplication by `X`; absent in the dotless theory
    dot: Option<[[S; 2]; 2]>,
}

/// Basis `(1, X)` of `A = R[X]/(X^2 - hX - a)`.
fn dotted_model() -> Model<RingElem> {
    let (a, h) = (RingElem::var_a(), RingElem::var_h());
    let (z, o) = (RingElem::zero(), RingElem::one());
    Model {
        unit: [o.clone(), z.clone()],
        counit: [z.clone(), o.clone()],
        mul: [[[o.clone(), z.clone()], [z.clone(), o.clone()]], [[z.clone(), o.clone()], [a.clone(), h.clone()]]],
        comul: [[[-h.clone(), o.clone()], [o.clone(), z.clone()]], [[a.clone(), z.clone()], [z.clone(), o.clone()]]],
        phi: [[o.clone(), z.clone()], [h.clone(), -o.clone()]],
        dot: Some([[z.clone(), o.clone()], [a, h]]),
    }
}

/// Genus basis `c_0 = 1`, `c_1 = 2X - h` of `A' = R~[X]/(X^2 - hX - a)`.
/// A handle multiplies by `c_1`, and `c_1^2 = (h^2 + 4a) c_0`.
fn dotless_model() -> Model<DotlessElem> {
    let (z, o) = (DotlessElem::zero(), DotlessElem::one());
    let half = DotlessElem::constant(DyadicGaussian::half());
    let g2 = genus_two().to_dotless();
    Model {
        unit: [o.clone(), z.clone()],
        counit: [z.clone(), DotlessElem::int(2)],
        mul: [[[o.clone(), z.clone()], [z.clone(), o.clone()]], [[z.clone(), o.clone()], [g2.clone(), z.clone()]]],
        comul: [
            [[z.clone(), half.clone()], [half.clone(), z.clone()]],
            [[g2 * half.clone(), z.clone()], [z.clone(), half]],
        ],
        phi: [[o.clone(), z.clone()], [z.clone(), -o]],
        dot: None,
    }
}

/// `h^2 + 4a`, the square of the handle element `2X - h`.
fn genus_two() -> RingElem {
    let (a, h) = (RingElem::var_a(), RingElem::var_h());
    h.clone() * h + RingElem::int(4) * a
}

// ---------------------------------------------------------------------------
// State machine

struct State<S> {
    kinds: Vec<CircleKind>,
    tensor: BTreeMap<Vec<u8>, S>,
}

fn bad(msg: impl Into<String>) -> FoamError {
    FoamError::InvalidWord(msg.into())
}

impl<S: Coefficient> State<S> {
    fn empty() -> Self {
        let mut tensor = BTreeMap::new();
        tensor.insert(Vec::new(), S::one());
        Self { kinds: Vec::new(), tensor }
    }

    fn check(&self, i: usize) -> Result<CircleKind> {
        self.kinds.get(i).copied().ok_or_else(|| bad(format!("circle {i} out of range ({} live)", self.kinds.len())))
    }

    fn oriented(&self, i: usize) -> Result<()> {
        match self.check(i)? {
            CircleKind::Oriented => Ok(()),
            k => Err(bad(format!("circle {i} is {k:?}, expected oriented"))),
        }
    }

    fn two_vertex(&self, i: usize) -> Result<SeamSide> {
        match self.check(i)? {
            CircleKind::TwoVertex(s) => Ok(s),
            k => Err(bad(format!("circle {i} is {k:?}, expected two-vertex"))),
        }
    }

    fn facet_allowed(&self, i: usize, f: Facet) -> Result<()> {
        if f == Facet::Other && self.check(i)? == CircleKind::Oriented {
            return Err(bad(format!("oriented circle {i} has a single facet")));
        }
        Ok(())
    }

    fn rebuild(&mut self, f: impl Fn(&[u8]) -> Vec<(Vec<u8>, S)>) {
        let mut out: BTreeMap<Vec<u8>, S> = BTreeMap::new();
        for (k, c) in std::mem::take(&mut self.tensor) {
            for (nk, s) in f(&k) {
                if s.is_zero() {
                    continue;
                }
                let v = c.clone() * s;
                match out.get_mut(&nk) {
                    Some(e) => *e = e.clone() + v,
                    None => {
                        out.insert(nk, v);
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        self.tensor = out;
    }

    fn scale(&mut self, s: &S) {
        for v in self.tensor.values_mut() {
            *v = v.clone() * s.clone();
        }
        self.tensor.retain(|_, v| !v.is_zero());
    }

    fn unary(&mut self, i: usize, m: &[[S; 2]; 2]) {
        self.rebuild(|k| {
            (0..2u8)
                .map(|x| {
                    let mut nk = k.to_vec();
                    nk[i] = x;
                    (nk, m[k[i] as usize][x as usize].clone())
                })
                .collect()
        });
    }

    fn birth(&mut self, model: &Model<S>, kind: CircleKind) {
        self.kinds.push(kind);
        self.rebuild(|k| {
            (0..2u8)
                .map(|x| {
                    let mut nk = k.to_vec();
                    nk.push(x);
                    (nk, model.unit[x as usize].clone())
                })
                .collect()
        });
    }

    fn death(&mut self, model: &Model<S>, i: usize) {
        self.kinds.remove(i);
        self.rebuild(|k| {
            let mut nk = k.to_vec();
            let x = nk.remove(i);
            vec![(nk, model.counit[x as usize].clone())]
        });
    }

    fn merge(&mut self, model: &Model<S>, i: usize, j: usize) {
        self.kinds.remove(j);
        self.rebuild(|k| {
            let (x, y) = (k[i] as usize, k[j] as usize);
            (0..2u8)
                .map(|z| {
                    let mut nk = k.to_vec();
                    nk[i] = z;
                    nk.remove(j);
                    (nk, model.mul[x][y][z as usize].clone())
                })
                .collect()
        });
    }

    fn split(&mut self, model: &Model<S>, i: usize) {
        self.kinds.push(CircleKind::Oriented);
        self.rebuild(|k| {
            let x = k[i] as usize;
            let mut terms = Vec::with_capacity(4);
            for u in 0..2u8 {
                for v in 0..2u8 {
                    let mut nk = k.to_vec();
                    nk[i] = u;
                    nk.push(v);
                    terms.push((nk, model.comul[x][u as usize][v as usize].clone()));
                }
            }
            terms
        });
    }

    fn apply(&mut self, model: &Model<S>, s: Slice) -> Result<()> {
        match s {
            Slice::Birth(kind) => self.birth(model, kind),
            Slice::Death(i) => {
                if let CircleKind::TwoVertex(side) = self.check(i)? {
                    self.scale(&side.sigma());
                }
                self.death(model, i);
            }
            Slice::Merge(i, j, f) => {
                if i == j {
                    return Err(bad("merge needs two distinct circles"));
                }
                self.facet_allowed(i, f)?;
                self.oriented(j)?;
                if f == Facet::Other {
                    self.unary(j, &model.phi);
                }
                self.merge(model, i, j);
            }
            Slice::Split(i, f) => {
                self.facet_allowed(i, f)?;
                if f == Facet::Other {
                    self.unary(i, &model.phi);
                    self.split(model, i);
                    self.unary(i, &model.phi);
                } else {
                    self.split(model, i);
                }
            }
            Slice::Dot(i, f) => {
                self.facet_allowed(i, f)?;
                let dot = model.dot.as_ref().ok_or_else(|| bad("dot slice in a dotless word"))?;
                if f == Facet::Other {
                    self.unary(i, &model.phi);
                    self.unary(i, dot);
                    self.unary(i, &model.phi);
                } else {
                    self.unary(i, dot);
                }
            }
            Slice::Handle(i, f) => {
                self.apply(model, Slice::Split(i, f))?;
                let last = self.kinds.len() - 1;
                self.apply(model, Slice::Merge(i, last, f))?;
            }
            Slice::SingularMerge(i, j, side) => {
                if i == j {
                    return Err(bad("singular merge needs two distinct circles"));
                }
                self.oriented(i)?;
                self.oriented(j)?;
                self.merge(model, i, j);
                let i = if j < i { i - 1 } else { i };
                self.kinds[i] = CircleKind::TwoVertex(side);
            }
            Slice::SingularSplit(i) => {
                let side = self.two_vertex(i)?;
                self.scale(&side.sigma());
                self.kinds[i] = CircleKind::Oriented;
                self.split(model, i);
            }
            Slice::VertexPairCancel(i) => {
                let side = self.two_vertex(i)?;
                self.scale(&side.sigma());
                self.kinds[i] = CircleKind::Oriented;
            }
            Slice::VertexPairCreate(i, side) => {
                self.oriented(i)?;
                self.kinds[i] = CircleKind::TwoVertex(side);
            }
            Slice::SeamRing(i, side) => {
                self.oriented(i)?;
                self.scale(&side.sigma());
                self.unary(i, &model.phi);
            }
        }
        Ok(())
    }
}

fn evaluate<S: Coefficient>(model: &Model<S>, w: &SliceWord) -> Result<S> {
    let mut st = State::empty();
    for (k, &s) in w.slices.iter().enumerate() {
        st.apply(model, s).map_err(|e| bad(format!("slice {k} ({s:?}): {e}")))?;
    }
    if !st.kinds.is_empty() {
        return Err(bad(format!("word is not closed: {} circles remain", st.kinds.len())));
    }
    Ok(st.tensor.remove(&Vec::new()).unwrap_or_else(S::zero))
}

/// Evaluates a closed dotted foam to an element of `R`.
pub fn eval_dotted(w: &SliceWord) -> Result<RingElem> {
    evaluate(&dotted_model(), w)
}

/// Evaluates a closed dotless foam over `R~`, carrying genus in the basis
/// `(1, 2X - h)`.
pub fn eval_dotless(w: &SliceWord) -> Result<DotlessElem> {
    if w.slices.iter().any(|s| matches!(s, Slice::Dot(..))) {
        return Err(bad("dot slice in a dotless word"));
    }
    evaluate(&dotless_model(), w)
}

/// Replaces every dot by `1/2 (handle) + 1/2 h (identity)` on the same facet,
/// expanded into a sum of dotless words.
pub fn dot_substitution(w: &SliceWord) -> Vec<(DotlessElem, SliceWord)> {
    let half = DotlessElem::constant(DyadicGaussian::half());
    let half_h = half.clone() * DotlessElem::var_h();
    let mut acc: Vec<(DotlessElem, Vec<Slice>)> = vec![(DotlessElem::one(), Vec::new())];
    for &s in &w.slices {
        match s {
            Slice::Dot(i, f) => {
                let mut next = Vec::with_capacity(acc.len() * 2);
                for (c, mut word) in acc {
                    next.push((c.clone() * half_h.clone(), word.clone()));
                    word.push(Slice::Handle(i, f));
                    next.push((c * half.clone(), word));
                }
                acc = next;
            }
            other => acc.iter_mut().for_each(|(_, word)| word.push(other)),
        }
    }
    acc.into_iter().map(|(c, word)| (c, SliceWord::new(word))).collect()
}

/// Checks `eval_dotted(w) = eval_dotless(w')` in `R~` for every word.
pub fn cross_validate(words: &[SliceWord]) -> Result<bool> {
    for w in words {
        if !cross_validate_one(w)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn cross_validate_one(w: &SliceWord) -> Result<bool> {
    let lhs = eval_dotted(w)?.to_dotless();
    let mut rhs = DotlessElem::zero();
    for (c, word) in dot_substitution(w) {
        rhs = rhs + c * eval_dotless(&word)?;
    }
    Ok(lhs == rhs)
}

/// Random closed dotted word with at most `max_len` slices.
pub fn random_closed_word(rng: &mut impl Rng, max_len: usize) -> SliceWord {
    use CircleKind::*;
    let mut kinds: Vec<CircleKind> = Vec::new();
    let mut w: Vec<Slice> = Vec::new();
    let side = |rng: &mut dyn rand::RngCore| if rng.gen_bool(0.5) { SeamSide::Left } else { SeamSide::Right };
    let mut attempts = 0;
    while w.len() + kinds.len() < max_len && attempts < 4 * max_len {
        attempts += 1;
        let room = max_len - w.len() - kinds.len();
        let n = kinds.len();
        let oriented: Vec<usize> = (0..n).filter(|&i| kinds[i] == Oriented).collect();
        let twov: Vec<usize> = (0..n).filter(|&i| kinds[i] != Oriented).collect();
        let pick = |rng: &mut dyn rand::RngCore, v: &[usize]| v[rng.gen_range(0..v.len())];
        let facet = |rng: &mut dyn rand::RngCore, k: CircleKind| {
            if k != Oriented && rng.gen_bool(0.5) {
                Facet::Other
            } else {
                Facet::Preferred
            }
        };
        match rng.gen_range(0..11) {
            0 | 1 if room >= 2 => {
                let k = if rng.gen_bool(0.5) { Oriented } else { TwoVertex(side(rng)) };
                kinds.push(k);
                w.push(Slice::Birth(k));
            }
            2 | 3 if n > 0 => {
                let i = rng.gen_range(0..n);
                w.push(Slice::Dot(i, facet(rng, kinds[i])));
            }
            4 if n > 1 && !oriented.is_empty() => {
                let j = pick(rng, &oriented);
                let mut i = rng.gen_range(0..n - 1);
                if i >= j {
                    i += 1;
                }
                w.push(Slice::Merge(i, j, facet(rng, kinds[i])));
                kinds.remove(j);
            }
            5 if n > 0 && room >= 2 => {
                let i = rng.gen_range(0..n);
                w.push(Slice::Split(i, facet(rng, kinds[i])));
                kinds.push(Oriented);
            }
            6 if n > 0 => {
                let i = rng.gen_range(0..n);
                w.push(Slice::Handle(i, facet(rng, kinds[i])));
            }
            7 if oriented.len() > 1 => {
                let i = pick(rng, &oriented);
                let j = loop {
                    let j = pick(rng, &oriented);
                    if j != i {
                        break j;
                    }
                };
                let s = side(rng);
                w.push(Slice::SingularMerge(i, j, s));
                kinds.remove(j);
                let i = if j < i { i - 1 } else { i };
                kinds[i] = TwoVertex(s);
            }
            8 if !twov.is_empty() && room >= 2 => {
                let i = pick(rng, &twov);
                w.push(Slice::SingularSplit(i));
                kinds[i] = Oriented;
                kinds.push(Oriented);
            }
            9 if n > 0 => {
                let i = rng.gen_range(0..n);
                if kinds[i] == Oriented {
                    let s = side(rng);
                    if rng.gen_bool(0.5) {
                        w.push(Slice::VertexPairCreate(i, s));
                        kinds[i] = TwoVertex(s);
                    } else {
                        w.push(Slice::SeamRing(i, s));
                    }
                } else {
                    w.push(Slice::VertexPairCancel(i));
                    kinds[i] = Oriented;
                }
            }
            10 if n > 0 => {
                let i = rng.gen_range(0..n);
                w.push(Slice::Death(i));
                kinds.remove(i);
            }
            _ => {}
        }
    }
    for i in (0..kinds.len()).rev() {
        w.push(Slice::Death(i));
    }
    SliceWord::new(w)
}

// ---------------------------------------------------------------------------
// Relations

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    TwoDots,
    Surgery,
    Spheres,
    Ufo,
    Curtains,
    CutNeck,
    DotExchange,
    SingularRing,
    GenusTwo,
    SurgeryDotless,
    SphereDotless,
    Torus,
    UfoDotless,
    CutNeckDotless,
    SingularRingDotless,
    HandleExchange,
}

impl Relation {
    pub const ALL: [Relation; 16] = [
        Relation::TwoDots,
        Relation::Surgery,
        Relation::Spheres,
        Relation::Ufo,
        Relation::Curtains,
        Relation::CutNeck,
        Relation::DotExchange,
        Relation::SingularRing,
        Relation::GenusTwo,
        Relation::SurgeryDotless,
        Relation::SphereDotless,
        Relation::Torus,
        Relation::UfoDotless,
        Relation::CutNeckDotless,
        Relation::SingularRingDotless,
        Relation::HandleExchange,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Relation::TwoDots => "2D",
            Relation::Surgery => "SF",
            Relation::Spheres => "S",
            Relation::Ufo => "UFO",
            Relation::Curtains => "curtain",
            Relation::CutNeck => "CN",
            Relation::DotExchange => "dot-exchange",
            Relation::SingularRing => "RSC",
            Relation::GenusTwo => "G2",
            Relation::SurgeryDotless => "SF~",
            Relation::SphereDotless => "S~",
            Relation::Torus => "T",
            Relation::UfoDotless => "UFO~",
            Relation::CutNeckDotless => "CN~",
            Relation::SingularRingDotless => "RSC~",
            Relation::HandleExchange => "handle-exchange",
        }
    }

    pub fn is_dotless(self) -> bool {
        self >= Relation::GenusTwo
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Relation {
    type Err = FoamError;
    fn from_str(s: &str) -> Result<Self> {
        Relation::ALL
            .iter()
            .copied()
            .find(|r| r.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| FoamError::Parse(format!("unknown relation id {s:?}")))
    }
}

type Combo<S> = Vec<(S, Vec<Slice>)>;

/// `lhs = rhs` as open foams from `inputs` to `n_out` circles.
struct Identity<S> {
    inputs: Vec<CircleKind>,
    n_out: usize,
    lhs: Combo<S>,
    rhs: Combo<S>,
}

impl<S: Coefficient> Identity<S> {
    fn closed(lhs: Combo<S>, rhs: Combo<S>) -> Self {
        Self { inputs: Vec::new(), n_out: 0, lhs, rhs }
    }

    fn endo(kind: CircleKind, lhs: Combo<S>, rhs: Combo<S>) -> Self {
        Self { inputs: vec![kind], n_out: 1, lhs, rhs }
    }
}

fn one<S: Coefficient>(w: Vec<Slice>) -> Combo<S> {
    vec![(S::one(), w)]
}

fn eval_combo<S: Coefficient>(model: &Model<S>, combo: &Combo<S>, prep: &[Slice], close: &[Slice]) -> Result<S> {
    let mut total = S::zero();
    for (c, w) in combo {
        let mut full = prep.to_vec();
        full.extend_from_slice(w);
        full.extend_from_slice(close);
        total = total + c.clone() * evaluate(model, &SliceWord::new(full))?;
    }
    Ok(total)
}

/// Closes both sides with every choice of 0..=2 decorations on each boundary
/// circle and compares.
fn holds<S: Coefficient>(model: &Model<S>, id: &Identity<S>) -> Result<bool> {
    let decorate = |i: usize, n: usize, out: &mut Vec<Slice>| {
        for _ in 0..n {
            out.push(if model.dot.is_some() { Slice::Dot(i, Facet::Preferred) } else { Slice::Handle(i, Facet::Preferred) });
        }
    };
    let slots = id.inputs.len() + id.n_out;
    for code in 0..3usize.pow(slots as u32) {
        let digit = |k: usize| code / 3usize.pow(k as u32) % 3;
        let mut prep = Vec::new();
        for (k, &kind) in id.inputs.iter().enumerate() {
            prep.push(Slice::Birth(kind));
            decorate(k, digit(k), &mut prep);
        }
        let mut close = Vec::new();
        for r in 0..id.n_out {
            decorate(r, digit(id.inputs.len() + r), &mut close);
        }
        for r in (0..id.n_out).rev() {
            close.push(Slice::Death(r));
        }
        if eval_combo(model, &id.lhs, &prep, &close)? != eval_combo(model, &id.rhs, &prep, &close)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn dotted_identities(rel: Relation) -> Vec<Identity<RingElem>> {
    use CircleKind::*;
    use Facet::*;
    use SeamSide::*;
    use Slice::*;
    let (a, h) = (RingElem::var_a(), RingElem::var_h());
    let i = RingElem::i();
    let ring = |s: SeamSide| SeamRing(0, s);
    match rel {
        Relation::TwoDots => vec![Identity::endo(
            Oriented,
            one(vec![Dot(0, Preferred), Dot(0, Preferred)]),
            vec![(h, vec![Dot(0, Preferred)]), (a, vec![])],
        )],
        Relation::Surgery => vec![Identity::endo(
            Oriented,
            one(vec![]),
            vec![
                (RingElem::one(), vec![Death(0), Birth(Oriented), Dot(0, Preferred)]),
                (RingElem::one(), vec![Dot(0, Preferred), Death(0), Birth(Oriented)]),
                (-h, vec![Death(0), Birth(Oriented)]),
            ],
        )],
        Relation::Spheres => vec![
            Identity::closed(one(vec![Birth(Oriented), Death(0)]), vec![]),
            Identity::closed(one(vec![Birth(Oriented), Dot(0, Preferred), Death(0)]), one(vec![])),
        ],
        Relation::Ufo => ufo_identities(Dot, RingElem::i()),
        Relation::Curtains => vec![
            Identity::endo(TwoVertex(Left), one(vec![VertexPairCancel(0), VertexPairCreate(0, Left)]), vec![(i.clone(), vec![])]),
            Identity::endo(TwoVertex(Right), one(vec![VertexPairCancel(0), VertexPairCreate(0, Right)]), vec![(-i.clone(), vec![])]),
            Identity::endo(Oriented, one(vec![VertexPairCreate(0, Right), VertexPairCancel(0)]), vec![(-i.clone(), vec![])]),
            Identity::endo(Oriented, one(vec![VertexPairCreate(0, Left), VertexPairCancel(0)]), vec![(i, vec![])]),
        ],
        Relation::CutNeck => {
            let cup = Birth(TwoVertex(Left));
            vec![Identity::endo(
                TwoVertex(Left),
                one(vec![]),
                vec![
                    (-i.clone(), vec![Death(0), cup, Dot(0, Preferred)]),
                    (-i.clone(), vec![Dot(0, Preferred), Death(0), cup]),
                    (h * i, vec![Death(0), cup]),
                ],
            )]
        }
        Relation::DotExchange => {
            let mut v = Vec::new();
            for s in [Left, Right] {
                v.push(Identity::endo(
                    TwoVertex(s),
                    vec![(RingElem::one(), vec![Dot(0, Preferred)]), (RingElem::one(), vec![Dot(0, Other)])],
                    vec![(h.clone(), vec![])],
                ));
                v.push(Identity::endo(TwoVertex(s), one(vec![Dot(0, Preferred), Dot(0, Other)]), vec![(-a.clone(), vec![])]));
                // across a seam ring: the dot below plus the dot above
                v.push(Identity::endo(
                    Oriented,
                    vec![(RingElem::one(), vec![Dot(0, Preferred), ring(s)]), (RingElem::one(), vec![ring(s), Dot(0, Preferred)])],
                    vec![(h.clone(), vec![ring(s)])],
                ));
                v.push(Identity::endo(
                    Oriented,
                    one(vec![Dot(0, Preferred), ring(s), Dot(0, Preferred)]),
                    vec![(-a.clone(), vec![ring(s)])],
                ));
            }
            v
        }
        Relation::SingularRing => vec![Identity::endo(
            Oriented,
            one(vec![ring(Left)]),
            vec![
                (i.clone(), vec![Dot(0, Preferred), Death(0), Birth(Oriented)]),
                (-i, vec![Death(0), Birth(Oriented), Dot(0, Preferred)]),
            ],
        )],
        _ => Vec::new(),
    }
}

/// The four singular spheres: plain with either seam side, then decorated
/// on the preferred and on the other facet.
fn ufo_identities<S: Coefficient>(decoration: fn(usize, Facet) -> Slice, value: S) -> Vec<Identity<S>> {
    use CircleKind::TwoVertex;
    use SeamSide::*;
    use Slice::*;
    vec![
        Identity::closed(one(vec![Birth(TwoVertex(Left)), Death(0)]), vec![]),
        Identity::closed(one(vec![Birth(TwoVertex(Right)), Death(0)]), vec![]),
        Identity::closed(
            one(vec![Birth(TwoVertex(Left)), decoration(0, Facet::Preferred), Death(0)]),
            vec![(value.clone(), vec![])],
        ),
        Identity::closed(one(vec![Birth(TwoVertex(Left)), decoration(0, Facet::Other), Death(0)]), vec![(-value, vec![])]),
    ]
}

fn dotless_identities(rel: Relation) -> Vec<Identity<DotlessElem>> {
    use CircleKind::*;
    use Facet::*;
    use SeamSide::*;
    use Slice::*;
    let g2 = genus_two().to_dotless();
    let half = DotlessElem::constant(DyadicGaussian::half());
    let half_i = half.clone() * DotlessElem::i();
    match rel {
        Relation::GenusTwo => vec![Identity::endo(
            Oriented,
            one(vec![Handle(0, Preferred), Handle(0, Preferred)]),
            vec![(g2, vec![])],
        )],
        Relation::SurgeryDotless => vec![Identity::endo(
            Oriented,
            one(vec![]),
            vec![
                (half.clone(), vec![Death(0), Birth(Oriented), Handle(0, Preferred)]),
                (half, vec![Handle(0, Preferred), Death(0), Birth(Oriented)]),
            ],
        )],
        Relation::SphereDotless => vec![Identity::closed(one(vec![Birth(Oriented), Death(0)]), vec![])],
        Relation::Torus => vec![Identity::closed(
            one(vec![Birth(Oriented), Split(0, Preferred), Merge(0, 1, Preferred), Death(0)]),
            vec![(DotlessElem::int(2), vec![])],
        )],
        Relation::UfoDotless => ufo_identities(Handle, DotlessElem::gaussian(0, 2)),
        Relation::CutNeckDotless => {
            let cup = Birth(TwoVertex(Left));
            vec![Identity::endo(
                TwoVertex(Left),
                one(vec![]),
                vec![
                    (-half_i.clone(), vec![Death(0), cup, Handle(0, Preferred)]),
                    (-half_i, vec![Handle(0, Preferred), Death(0), cup]),
                ],
            )]
        }
        Relation::SingularRingDotless => vec![Identity::endo(
            Oriented,
            one(vec![SeamRing(0, Left)]),
            vec![
                (half_i.clone(), vec![Handle(0, Preferred), Death(0), Birth(Oriented)]),
                (-half_i, vec![Death(0), Birth(Oriented), Handle(0, Preferred)]),
            ],
        )],
        Relation::HandleExchange => {
            let mut v = Vec::new();
            for s in [Left, Right] {
                v.push(Identity::endo(
                    TwoVertex(s),
                    vec![(DotlessElem::one(), vec![Handle(0, Preferred)]), (DotlessElem::one(), vec![Handle(0, Other)])],
                    vec![],
                ));
                v.push(Identity::endo(
                    TwoVertex(s),
                    one(vec![Handle(0, Preferred), Handle(0, Other)]),
                    vec![(-g2.clone(), vec![])],
                ));
                v.push(Identity::endo(
                    Oriented,
                    vec![
                        (DotlessElem::one(), vec![Handle(0, Preferred), SeamRing(0, s)]),
                        (DotlessElem::one(), vec![SeamRing(0, s), Handle(0, Preferred)]),
                    ],
                    vec![],
                ));
            }
            v
        }
        _ => Vec::new(),
    }
}

/// Whether `rel` holds under every closure in the fixed closure family.
pub fn check_relation(rel: Relation) -> Result<bool> {
    if rel.is_dotless() {
        let model = dotless_model();
        for id in dotless_identities(rel) {
            if !holds(&model, &id)? {
                return Ok(false);
            }
        }
    } else {
        let model = dotted_model();
        for id in dotted_identities(rel) {
            if !holds(&model, &id)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every relation with its verdict, in a fixed order.
pub fn relation_table() -> Result<Vec<(Relation, bool)>> {
    Relation::ALL.iter().map(|&r| Ok((r, check_relation(r)?))).collect()
}

// ---------------------------------------------------------------------------
// Delooping maps

/// Checks that `alpha = (cap, dotted cap)^t` and
/// `beta = factor * (dotted cup - h cup, cup)` on a loop of `kind` are
/// mutually inverse. For a two-vertex loop the caps and cups are singular.
fn deloop_pair_is_inverse(kind: CircleKind, factor: RingElem) -> Result<bool> {
    use Slice::*;
    let model = dotted_model();
    let h = RingElem::var_h();
    let dot = Dot(0, Facet::Preferred);
    let alpha = [vec![Death(0)], vec![dot, Death(0)]];
    let beta: [Combo<RingElem>; 2] = [
        vec![(factor.clone(), vec![Birth(kind), dot]), (-(factor.clone() * h), vec![Birth(kind)])],
        vec![(factor, vec![Birth(kind)])],
    ];
    // beta ∘ alpha = id on the loop
    let mut composite = Vec::new();
    for r in 0..2 {
        for (c, b) in &beta[r] {
            let mut w = alpha[r].clone();
            w.extend_from_slice(b);
            composite.push((c.clone(), w));
        }
    }
    if !holds(&model, &Identity::endo(kind, composite, one(vec![])))? {
        return Ok(false);
    }
    // alpha ∘ beta = identity matrix
    for r in 0..2 {
        for (c, b) in beta.iter().enumerate() {
            let v = eval_combo(&model, b, &[], &alpha[r])?;
            let expected = if r == c { RingElem::one() } else { RingElem::zero() };
            if v != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Both delooping pairs compose to identities both ways, and the
/// sign-perturbed two-vertex pair does not.
pub fn check_deloop_maps() -> Result<bool> {
    let tv = CircleKind::TwoVertex(SeamSide::Left);
    Ok(deloop_pair_is_inverse(CircleKind::Oriented, RingElem::one())?
        && deloop_pair_is_inverse(tv, -RingElem::i())?
        && !deloop_pair_is_inverse(tv, RingElem::i())?)
}

/// The two-vertex pair with an arbitrary out-map factor, for tests and the
/// relation report.
pub fn two_vertex_deloop_holds(out_factor: RingElem) -> Result<bool> {
    deloop_pair_is_inverse(CircleKind::TwoVertex(SeamSide::Left), out_factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::deloop_factors;
    use crate::tangle::LoopKind;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use CircleKind::*;
    use Facet::*;
    use SeamSide::*;
    use Slice::*;

    fn w(s: Vec<Slice>) -> SliceWord {
        SliceWord::new(s)
    }

    fn ri(re: i64, im: i64) -> RingElem {
        RingElem::gaussian(re, im)
    }

    #[test]
    fn ufo_values() {
        let tv = Birth(TwoVertex(Left));
        assert_eq!(eval_dotted(&w(vec![tv, Death(0)])).unwrap(), RingElem::zero());
        assert_eq!(eval_dotted(&w(vec![tv, Dot(0, Preferred), Death(0)])).unwrap(), ri(0, 1));
        assert_eq!(eval_dotted(&w(vec![tv, Dot(0, Other), Death(0)])).unwrap(), ri(0, -1));
    }

    #[test]
    fn ufo_signs_flip_with_seam_side() {
        let word = w(vec![Birth(TwoVertex(Left)), Dot(0, Preferred), Death(0)]);
        assert_eq!(eval_dotted(&word.flip_seams()).unwrap(), ri(0, -1));
        let handle = w(vec![Birth(TwoVertex(Left)), Handle(0, Preferred), Death(0)]);
        let two_i = DotlessElem::gaussian(0, 2);
        assert_eq!(eval_dotless(&handle).unwrap(), two_i);
        assert_eq!(eval_dotless(&handle.flip_seams()).unwrap(), -two_i);
    }

    #[test]
    fn dotless_ufo_values() {
        let tv = |s| Birth(TwoVertex(s));
        let vals: Vec<DotlessElem> = [
            w(vec![tv(Left), Death(0)]),
            w(vec![tv(Right), Death(0)]),
            w(vec![tv(Left), Handle(0, Preferred), Death(0)]),
            w(vec![tv(Left), Handle(0, Other), Death(0)]),
        ]
        .iter()
        .map(|x| eval_dotless(x).unwrap())
        .collect();
        let expect = [(0, 0), (0, 0), (0, 2), (0, -2)].map(|(r, i)| DotlessElem::gaussian(r, i));
        assert_eq!(vals, expect);
    }

    #[test]
    fn torus_is_two_in_both_theories() {
        let t = w(vec![Birth(Oriented), Split(0, Preferred), Merge(0, 1, Preferred), Death(0)]);
        assert_eq!(eval_dotted(&t).unwrap(), RingElem::int(2));
        assert_eq!(eval_dotless(&t).unwrap(), DotlessElem::int(2));
    }

    #[test]
    fn genus_ladder() {
        // closed genus-g surfaces: 0, 2, 0 and a dotted genus-2 gives h^2 + 4a
        let surf = |g: usize, dots: usize| {
            let mut s = vec![Birth(Oriented)];
            s.extend(std::iter::repeat_n(Handle(0, Preferred), g));
            s.extend(std::iter::repeat_n(Dot(0, Preferred), dots));
            s.push(Death(0));
            eval_dotted(&w(s)).unwrap()
        };
        assert_eq!(surf(0, 0), RingElem::zero());
        assert_eq!(surf(1, 0), RingElem::int(2));
        assert_eq!(surf(2, 0), RingElem::zero());
        let g2 = genus_two();
        assert_eq!(surf(2, 1), g2);
        // double-dotted sphere
        assert_eq!(surf(0, 2), RingElem::var_h());
    }

    #[test]
    fn substitution_examples() {
        let dotted_sphere = w(vec![Birth(Oriented), Dot(0, Preferred), Death(0)]);
        let sub = dot_substitution(&dotted_sphere);
        assert_eq!(sub.len(), 2);
        assert!(cross_validate(&[dotted_sphere]).unwrap());
        let double = w(vec![Birth(Oriented), Dot(0, Preferred), Dot(0, Preferred), Death(0)]);
        assert_eq!(eval_dotted(&double).unwrap(), RingElem::var_h());
        assert!(cross_validate(&[double]).unwrap());
    }

    #[test]
    fn every_relation_holds() {
        for (rel, ok) in relation_table().unwrap() {
            assert!(ok, "{rel}");
        }
    }

    #[test]
    fn relations_are_not_vacuous() {
        // CN with the two-dot coefficient flipped must fail
        let model = dotted_model();
        let cup = Birth(TwoVertex(Left));
        let i = RingElem::i();
        let bad_cn = Identity::endo(
            TwoVertex(Left),
            one(vec![]),
            vec![
                (-i.clone(), vec![Death(0), cup, Dot(0, Preferred)]),
                (-i.clone(), vec![Dot(0, Preferred), Death(0), cup]),
                (-(RingElem::var_h() * i), vec![Death(0), cup]),
            ],
        );
        assert!(!holds(&model, &bad_cn).unwrap());
        // CN stated on the other seam side needs conjugate coefficients
        let mut cn = dotted_identities(Relation::CutNeck).remove(0);
        cn.inputs = vec![TwoVertex(Right)];
        for (_, word) in &mut cn.rhs {
            for s in word.iter_mut() {
                *s = s.flip_seam();
            }
        }
        assert!(!holds(&model, &cn).unwrap());
    }

    #[test]
    fn relation_ids_round_trip() {
        for r in Relation::ALL {
            assert_eq!(r.id().parse::<Relation>().unwrap(), r);
        }
        assert!("XYZ".parse::<Relation>().is_err());
    }

    #[test]
    fn deloop_maps() {
        assert!(check_deloop_maps().unwrap());
        assert!(two_vertex_deloop_holds(-RingElem::i()).unwrap());
        assert!(!two_vertex_deloop_holds(RingElem::i()).unwrap());
        assert!(!two_vertex_deloop_holds(RingElem::one()).unwrap());
    }

    #[test]
    fn seamless_factors_match_complex() {
        // singular cap = s_in * plain cap, singular cup = plain cup
        let (s_in, s_out): (RingElem, RingElem) = deloop_factors(LoopKind::TwoVertex);
        let sing = eval_dotted(&w(vec![Birth(TwoVertex(Left)), Dot(0, Preferred), Death(0)])).unwrap();
        let plain = eval_dotted(&w(vec![Birth(Oriented), Dot(0, Preferred), Death(0)])).unwrap();
        assert_eq!(sing, s_in * plain);
        assert!(two_vertex_deloop_holds(s_out).unwrap());
    }

    #[test]
    fn rejects_bad_words() {
        assert!(eval_dotted(&w(vec![Birth(Oriented)])).is_err());
        assert!(eval_dotted(&w(vec![Death(0)])).is_err());
        assert!(eval_dotted(&w(vec![Birth(Oriented), Dot(0, Other), Death(0)])).is_err());
        assert!(eval_dotted(&w(vec![Birth(Oriented), VertexPairCancel(0), Death(0)])).is_err());
        assert!(eval_dotless(&w(vec![Birth(Oriented), Dot(0, Preferred), Death(0)])).is_err());
        let two = w(vec![Birth(TwoVertex(Left)), Birth(TwoVertex(Left)), Merge(0, 1, Preferred), Death(0)]);
        assert!(eval_dotted(&two).is_err());
    }

    #[test]
    fn thousand_random_words_cross_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let words: Vec<SliceWord> = (0..1000).map(|_| random_closed_word(&mut rng, 12)).collect();
        assert!(words.iter().all(|x| x.len() <= 12));
        assert!(words.iter().filter(|x| x.dot_count() > 0).count() > 500);
        assert!(cross_validate(&words).unwrap());
    }

    fn word_strategy() -> impl Strategy<Value = SliceWord> {
        any::<u64>().prop_map(|seed| random_closed_word(&mut ChaCha8Rng::seed_from_u64(seed), 10))
    }

    proptest! {
        #[test]
        fn disjoint_union_is_multiplicative(a in word_strategy(), b in word_strategy(), pattern in proptest::collection::vec(any::<bool>(), 0..20)) {
            let va = eval_dotted(&a).unwrap();
            let vb = eval_dotted(&b).unwrap();
            let consecutive = eval_dotted(&a.then(&b)).unwrap();
            prop_assert_eq!(&consecutive, &(va.clone() * vb.clone()));
            let mixed = SliceWord::interleave(&a, &b, &pattern);
            prop_assert_eq!(eval_dotted(&mixed).unwrap(), va * vb);
        }

        #[test]
        fn seam_flip_conjugates(a in word_strategy()) {
            let v = eval_dotted(&a).unwrap();
            let conj = v.map_coeffs(|c| c.conj());
            prop_assert_eq!(eval_dotted(&a.flip_seams()).unwrap(), conj);
        }

        #[test]
        fn random_words_cross_validate(a in word_strategy()) {
            prop_assert!(cross_validate(&[a]).unwrap());
        }
    }
}
