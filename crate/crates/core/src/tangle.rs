//! Planar diagrams, crossingless tangles and their gluing.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FoamError, Result};

pub type EdgeLabel = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    In,
    Out,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::In => Dir::Out,
            Dir::Out => Dir::In,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct BoundaryPoint {
    pub label: EdgeLabel,
    pub dir: Dir,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopKind {
    Oriented,
    TwoVertex,
}

/// A crossingless tangle: boundary points in cyclic order, a perfect pairing
/// of them, and closed loops.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Matching {
    boundary: Vec<BoundaryPoint>,
    partner: Vec<usize>,
    loops: Vec<LoopKind>,
}

/// Result of [`Matching::contract`]: the new matching together with where
/// its pieces came from. Old arcs are identified by their smaller endpoint.
#[derive(Clone, Debug)]
pub struct GlueResult {
    pub matching: Matching,
    /// old boundary index -> new boundary index, for surviving points
    pub point_map: Vec<Option<usize>>,
    /// per new boundary point `p` with `p < partner(p)`: old arcs forming it
    pub arc_origin: BTreeMap<usize, Vec<usize>>,
    /// old loop index -> new loop index
    pub loop_map: Vec<usize>,
    /// new loop index -> old arcs forming it, for loops closed by this glue
    pub created_loops: Vec<(usize, Vec<usize>)>,
}

impl Matching {
    pub fn new(boundary: Vec<BoundaryPoint>, partner: Vec<usize>, loops: Vec<LoopKind>) -> Result<Self> {
        let n = boundary.len();
        if partner.len() != n {
            return Err(FoamError::InvalidDiagram("partner vector has wrong length".into()));
        }
        for (p, &q) in partner.iter().enumerate() {
            if q >= n || q == p || partner[q] != p {
                return Err(FoamError::InvalidDiagram(format!("point {p} is not properly paired")));
            }
        }
        Ok(Self { boundary, partner, loops })
    }

    pub fn from_arcs(boundary: Vec<BoundaryPoint>, arcs: &[(usize, usize)], loops: Vec<LoopKind>) -> Result<Self> {
        let mut partner = vec![usize::MAX; boundary.len()];
        for &(p, q) in arcs {
            if p >= boundary.len() || q >= boundary.len() || partner[p] != usize::MAX || partner[q] != usize::MAX {
                return Err(FoamError::InvalidDiagram(format!("bad arc ({p}, {q})")));
            }
            partner[p] = q;
            partner[q] = p;
        }
        Self::new(boundary, partner, loops)
    }

    pub fn empty() -> Self {
        Self { boundary: vec![], partner: vec![], loops: vec![] }
    }

    pub fn boundary(&self) -> &[BoundaryPoint] {
        &self.boundary
    }

    pub fn partner(&self, p: usize) -> usize {
        self.partner[p]
    }

    pub fn loops(&self) -> &[LoopKind] {
        &self.loops
    }

    pub fn n_points(&self) -> usize {
        self.boundary.len()
    }

    /// Arcs as `(p, q)` with `p < q`, sorted.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.boundary.len()).filter(|&p| p < self.partner[p]).map(|p| (p, self.partner[p])).collect()
    }

    /// Derived orientation-reversal parity of the arc at `p`: `1` when both
    /// endpoints carry the same tag.
    pub fn arc_parity(&self, p: usize) -> u8 {
        u8::from(self.boundary[p].dir == self.boundary[self.partner[p]].dir)
    }

    pub fn is_planar(&self) -> bool {
        let arcs = self.arcs();
        for &(a, b) in &arcs {
            for &(c, d) in &arcs {
                if a < c && c < b && b < d {
                    return false;
                }
            }
        }
        true
    }

    pub fn without_loops(&self) -> Matching {
        Matching { boundary: self.boundary.clone(), partner: self.partner.clone(), loops: vec![] }
    }

    pub fn remove_loop(&self, idx: usize) -> Matching {
        let mut m = self.clone();
        m.loops.remove(idx);
        m
    }

    pub fn with_loops(&self, loops: Vec<LoopKind>) -> Matching {
        Matching { boundary: self.boundary.clone(), partner: self.partner.clone(), loops }
    }

    pub fn index_of_label(&self, label: EdgeLabel) -> Option<usize> {
        self.boundary.iter().position(|b| b.label == label)
    }

    pub fn disjoint_union(&self, other: &Matching) -> Matching {
        let off = self.boundary.len();
        let mut boundary = self.boundary.clone();
        boundary.extend_from_slice(&other.boundary);
        let mut partner = self.partner.clone();
        partner.extend(other.partner.iter().map(|q| q + off));
        let mut loops = self.loops.clone();
        loops.extend_from_slice(&other.loops);
        Matching { boundary, partner, loops }
    }

    /// Identifies each pair of boundary points, which must carry opposite
    /// tags. Surviving points keep their relative order.
    pub fn contract(&self, pairs: &[(usize, usize)]) -> Result<GlueResult> {
        let n = self.boundary.len();
        let mut mate = vec![usize::MAX; n];
        for &(p, q) in pairs {
            if p >= n || q >= n || p == q || mate[p] != usize::MAX || mate[q] != usize::MAX {
                return Err(FoamError::BoundaryMismatch(format!("bad glue pair ({p}, {q})")));
            }
            if self.boundary[p].dir == self.boundary[q].dir {
                return Err(FoamError::BoundaryMismatch(format!(
                    "glued points {p} and {q} carry the same tag"
                )));
            }
            mate[p] = q;
            mate[q] = p;
        }
        let mut point_map = vec![None; n];
        let mut boundary = Vec::new();
        for p in 0..n {
            if mate[p] == usize::MAX {
                point_map[p] = Some(boundary.len());
                boundary.push(self.boundary[p]);
            }
        }
        let arc_id = |p: usize| p.min(self.partner[p]);
        let mut partner = vec![usize::MAX; boundary.len()];
        let mut arc_origin = BTreeMap::new();
        let mut seen = vec![false; n];
        for p in 0..n {
            if mate[p] != usize::MAX || seen[p] {
                continue;
            }
            let mut cur = p;
            let mut origin = Vec::new();
            loop {
                seen[cur] = true;
                origin.push(arc_id(cur));
                let q = self.partner[cur];
                seen[q] = true;
                if mate[q] == usize::MAX {
                    let (np, nq) = (point_map[p].unwrap(), point_map[q].unwrap());
                    partner[np] = nq;
                    partner[nq] = np;
                    arc_origin.insert(np.min(nq), origin);
                    break;
                }
                cur = mate[q];
            }
        }
        let mut loops = self.loops.clone();
        let loop_map = (0..loops.len()).collect();
        let mut created_loops = Vec::new();
        for p in 0..n {
            if seen[p] {
                continue;
            }
            let mut cur = p;
            let mut origin = Vec::new();
            let mut parity = 0u32;
            while !seen[cur] {
                seen[cur] = true;
                let q = self.partner[cur];
                seen[q] = true;
                origin.push(arc_id(cur));
                parity += u32::from(self.arc_parity(cur));
                cur = mate[q];
            }
            created_loops.push((loops.len(), origin));
            loops.push(if parity > 0 { LoopKind::TwoVertex } else { LoopKind::Oriented });
        }
        Ok(GlueResult { matching: Matching { boundary, partner, loops }, point_map, arc_origin, loop_map, created_loops })
    }

    /// Closes off the union of `self` and `other` along every edge label they
    /// share.
    pub fn glue_by_labels(&self, other: &Matching) -> Result<GlueResult> {
        let u = self.disjoint_union(other);
        let off = self.boundary.len();
        let pairs: Vec<_> = (0..off)
            .filter_map(|p| other.index_of_label(self.boundary[p].label).map(|q| (p, q + off)))
            .collect();
        u.contract(&pairs)
    }

    /// Glues two matchings along contiguous boundary segments; `pts1[k]` is
    /// identified with `pts2[k]`.
    pub fn glue(m1: &Matching, pts1: &[usize], m2: &Matching, pts2: &[usize]) -> Result<GlueResult> {
        if pts1.len() != pts2.len() {
            return Err(FoamError::BoundaryMismatch("segments differ in length".into()));
        }
        if !is_contiguous(pts1, m1.n_points()) || !is_contiguous(pts2, m2.n_points()) {
            return Err(FoamError::BoundaryMismatch("segment is not contiguous".into()));
        }
        let off = m1.n_points();
        let pairs: Vec<_> = pts1.iter().zip(pts2).map(|(&p, &q)| (p, q + off)).collect();
        m1.disjoint_union(m2).contract(&pairs)
    }
}

/// Whether `pts` (as a set) forms a cyclic interval of `0..n`.
fn is_contiguous(pts: &[usize], n: usize) -> bool {
    if pts.is_empty() || pts.len() == n {
        return pts.iter().all(|&p| p < n);
    }
    let mut inset = vec![false; n];
    for &p in pts {
        if p >= n || inset[p] {
            return false;
        }
        inset[p] = true;
    }
    // exactly one position where membership switches on
    (0..n).filter(|&p| inset[p] && !inset[(p + n - 1) % n]).count() == 1
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs: Vec<String> = self
            .arcs()
            .iter()
            .map(|&(p, q)| format!("{}-{}", self.boundary[p].label, self.boundary[q].label))
            .collect();
        write!(f, "[{}]", arcs.join(" "))?;
        for l in &self.loops {
            write!(f, " {}", if *l == LoopKind::Oriented { "O" } else { "T" })?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    idx: usize,
    dir: Dir,
    label: EdgeLabel,
}

#[derive(Serialize, Deserialize)]
struct LoopJson {
    kind: LoopKind,
}

#[derive(Serialize, Deserialize)]
struct MatchingJson {
    boundary: Vec<PointJson>,
    arcs: Vec<[usize; 2]>,
    loops: Vec<LoopJson>,
}

impl Serialize for Matching {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatchingJson {
            boundary: self
                .boundary
                .iter()
                .enumerate()
                .map(|(idx, b)| PointJson { idx, dir: b.dir, label: b.label })
                .collect(),
            arcs: self.arcs().into_iter().map(|(p, q)| [p, q]).collect(),
            loops: self.loops.iter().map(|&kind| LoopJson { kind }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matching {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatchingJson::deserialize(d)?;
        let mut boundary = vec![BoundaryPoint { label: 0, dir: Dir::In }; j.boundary.len()];
        for p in &j.boundary {
            if p.idx >= boundary.len() {
                return Err(serde::de::Error::custom("boundary index out of range"));
            }
            boundary[p.idx] = BoundaryPoint { label: p.label, dir: p.dir };
        }
        let arcs: Vec<_> = j.arcs.iter().map(|a| (a[0], a[1])).collect();
        Matching::from_arcs(boundary, &arcs, j.loops.into_iter().map(|l| l.kind).collect())
            .map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// PD codes

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Resolution {
    Oriented,
    Singular,
}

/// A planar diagram. Each crossing lists its four edge labels
/// counterclockwise starting from the incoming under-strand.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PDCode {
    pub crossings: Vec<[EdgeLabel; 4]>,
    pub signs: Vec<i8>,
    /// per crossing, per slot: whether the edge points into the crossing
    pub incoming: Vec<[bool; 4]>,
    pub n_plus: usize,
    pub n_minus: usize,
    pub free_loops: usize,
}

#[derive(Clone, Debug)]
pub struct CrossingResolutions {
    pub oriented: Matching,
    pub singular: Matching,
    pub sign: i8,
}

impl PDCode {
    pub fn from_crossings(crossings: Vec<[EdgeLabel; 4]>, free_loops: usize) -> Result<PDCode> {
        let mut occ: HashMap<EdgeLabel, Vec<(usize, usize)>> = HashMap::new();
        for (c, x) in crossings.iter().enumerate() {
            for (s, &l) in x.iter().enumerate() {
                occ.entry(l).or_default().push((c, s));
            }
        }
        if let Some((l, _)) = occ.iter().find(|(_, v)| v.len() > 2) {
            return Err(FoamError::InvalidDiagram(format!("edge label {l} occurs more than twice")));
        }
        // None = unknown, Some(true) = into the crossing at this slot
        let mut inc: Vec<[Option<bool>; 4]> = vec![[None; 4]; crossings.len()];
        let mut stack = Vec::new();
        let set = |inc: &mut Vec<[Option<bool>; 4]>, stack: &mut Vec<(usize, usize)>, c: usize, s: usize, v: bool| -> Result<()> {
            match inc[c][s] {
                Some(old) if old != v => {
                    Err(FoamError::InvalidDiagram(format!("inconsistent orientation at crossing {c}")))
                }
                Some(_) => Ok(()),
                None => {
                    inc[c][s] = Some(v);
                    stack.push((c, s));
                    Ok(())
                }
            }
        };
        for c in 0..crossings.len() {
            set(&mut inc, &mut stack, c, 0, true)?;
            set(&mut inc, &mut stack, c, 2, false)?;
        }
        let mut next_free = 0;
        loop {
            while let Some((c, s)) = stack.pop() {
                let v = inc[c][s].unwrap();
                // the strand continues straight through the crossing
                set(&mut inc, &mut stack, c, (s + 2) % 4, !v)?;
                for &(c2, s2) in &occ[&crossings[c][s]] {
                    if (c2, s2) != (c, s) {
                        set(&mut inc, &mut stack, c2, s2, !v)?;
                    }
                }
            }
            // components passing only over crossings: orient arbitrarily
            while next_free < crossings.len() && inc[next_free][1].is_some() {
                next_free += 1;
            }
            if next_free == crossings.len() {
                break;
            }
            set(&mut inc, &mut stack, next_free, 1, true)?;
        }
        let incoming: Vec<[bool; 4]> = inc.iter().map(|x| x.map(|v| v.unwrap())).collect();
        let signs: Vec<i8> = incoming.iter().map(|x| if x[3] { 1 } else { -1 }).collect();
        let n_plus = signs.iter().filter(|&&s| s > 0).count();
        Ok(PDCode { n_minus: signs.len() - n_plus, crossings, signs, incoming, n_plus, free_loops })
    }

    pub fn n_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn writhe(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    /// Labels occurring once: the open boundary of a tangle diagram.
    pub fn open_edges(&self) -> Vec<EdgeLabel> {
        let mut count: BTreeMap<EdgeLabel, usize> = BTreeMap::new();
        for x in &self.crossings {
            for &l in x {
                *count.entry(l).or_default() += 1;
            }
        }
        count.into_iter().filter(|&(_, n)| n == 1).map(|(l, _)| l).collect()
    }

    /// Both local smoothings of crossing `c` as 4-point matchings.
    pub fn resolve_crossing(&self, c: usize) -> CrossingResolutions {
        let x = self.crossings[c];
        let boundary: Vec<BoundaryPoint> = (0..4)
            .map(|s| BoundaryPoint { label: x[s], dir: if self.incoming[c][s] { Dir::In } else { Dir::Out } })
            .collect();
        let (o, sg) = if self.signs[c] > 0 {
            ([(0, 1), (2, 3)], [(0, 3), (1, 2)])
        } else {
            ([(0, 3), (1, 2)], [(0, 1), (2, 3)])
        };
        CrossingResolutions {
            oriented: Matching::from_arcs(boundary.clone(), &o, vec![]).expect("valid"),
            singular: Matching::from_arcs(boundary, &sg, vec![]).expect("valid"),
            sign: self.signs[c],
        }
    }

    pub fn resolution(&self, c: usize, r: Resolution) -> Matching {
        let cr = self.resolve_crossing(c);
        match r {
            Resolution::Oriented => cr.oriented,
            Resolution::Singular => cr.singular,
        }
    }

    /// Greedy crossing order keeping the open boundary small: each step takes
    /// the crossing sharing most edges with the current partial tangle,
    /// lowest index on ties.
    pub fn ordering_heuristic(&self) -> Vec<usize> {
        let n = self.crossings.len();
        let mut used = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut open: HashMap<EdgeLabel, usize> = HashMap::new();
        for _ in 0..n {
            let mut best = None;
            for c in (0..n).filter(|&c| !used[c]) {
                let shared = self.crossings[c].iter().filter(|l| open.contains_key(l)).count();
                if best.is_none_or(|(_, b)| shared > b) {
                    best = Some((c, shared));
                }
            }
            let (c, _) = best.unwrap();
            used[c] = true;
            order.push(c);
            for &l in &self.crossings[c] {
                match open.get_mut(&l) {
                    Some(k) if *k > 0 => {
                        open.remove(&l);
                    }
                    _ => {
                        *open.entry(l).or_default() += 1;
                    }
                }
            }
        }
        order
    }

    /// Largest open boundary size along a crossing order.
    pub fn max_boundary(&self, order: &[usize]) -> usize {
        let mut count: HashMap<EdgeLabel, usize> = HashMap::new();
        let mut best = 0;
        for &c in order {
            for &l in &self.crossings[c] {
                *count.entry(l).or_default() += 1;
            }
            best = best.max(count.values().filter(|&&k| k == 1).count());
        }
        best
    }

    /// Builds the closure of a braid word on `strands` strands; generator
    /// `k` (1-based) is `σ_k`, `-k` its inverse. Strands never touched become
    /// free loops.
    pub fn from_braid(word: &[i32], strands: usize) -> Result<PDCode> {
        let initial: Vec<EdgeLabel> = (1..=strands as EdgeLabel).collect();
        let (mut crossings, cur) = braid_crossings(word, strands)?;
        let mut rename: HashMap<EdgeLabel, EdgeLabel> = HashMap::new();
        let mut free_loops = 0;
        for p in 0..strands {
            if cur[p] == initial[p] {
                free_loops += 1;
            } else {
                rename.insert(cur[p], initial[p]);
            }
        }
        for x in &mut crossings {
            for l in x.iter_mut() {
                if let Some(&r) = rename.get(l) {
                    *l = r;
                }
            }
        }
        PDCode::from_crossings(crossings, free_loops)
    }

    /// The braid as an open tangle: bottom endpoints are labelled
    /// `1..=strands`, and the returned vector holds the top label of each
    /// position.
    pub fn open_braid(word: &[i32], strands: usize) -> Result<(PDCode, Vec<EdgeLabel>)> {
        let (crossings, top) = braid_crossings(word, strands)?;
        Ok((PDCode::from_crossings(crossings, 0)?, top))
    }
}

fn braid_crossings(word: &[i32], strands: usize) -> Result<(Vec<[EdgeLabel; 4]>, Vec<EdgeLabel>)> {
    let mut cur: Vec<EdgeLabel> = (1..=strands as EdgeLabel).collect();
    let mut next = strands as EdgeLabel + 1;
    let mut crossings = Vec::new();
    for &g in word {
        let k = g.unsigned_abs() as usize;
        if k == 0 || k >= strands {
            return Err(FoamError::InvalidDiagram(format!("generator {g} needs more than {strands} strands")));
        }
        let (a, b) = (cur[k - 1], cur[k]);
        let (c, d) = (next, next + 1);
        next += 2;
        crossings.push(if g > 0 { [b, d, c, a] } else { [a, b, d, c] });
        cur[k - 1] = c;
        cur[k] = d;
    }
    Ok((crossings, cur))
}

/// Parses `X[a,b,c,d] X[...] ... [free_loops=k]`.
pub fn parse_pd(text: &str) -> Result<PDCode> {
    let mut crossings = Vec::new();
    let mut free_loops = 0;
    let mut rest = text.trim();
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("free_loops=") {
            let end = r.find(|c: char| c.is_whitespace()).unwrap_or(r.len());
            free_loops = r[..end]
                .parse()
                .map_err(|_| FoamError::Parse(format!("bad free_loops value `{}`", &r[..end])))?;
            rest = r[end..].trim_start();
            continue;
        }
        let r = rest
            .strip_prefix("X[")
            .ok_or_else(|| FoamError::Parse(format!("expected `X[` at `{rest}`")))?;
        let end = r.find(']').ok_or_else(|| FoamError::Parse("unterminated crossing".into()))?;
        let labels: Vec<EdgeLabel> = r[..end]
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| FoamError::Parse(format!("bad edge label `{t}`"))))
            .collect::<Result<_>>()?;
        let x: [EdgeLabel; 4] = labels
            .try_into()
            .map_err(|_| FoamError::Parse("a crossing needs exactly four labels".into()))?;
        crossings.push(x);
        rest = r[end + 1..].trim_start_matches([',', ' ', '\t']).trim_start();
    }
    PDCode::from_crossings(crossings, free_loops)
}

/// Parses a braid word like `s1 s-2 s1`; the strand count is one more than
/// the largest generator index unless given explicitly.
pub fn parse_braid(text: &str, strands: Option<usize>) -> Result<PDCode> {
    let word: Vec<i32> = text
        .split_whitespace()
        .map(|t| {
            t.strip_prefix('s')
                .and_then(|n| n.parse::<i32>().ok())
                .filter(|&n| n != 0)
                .ok_or_else(|| FoamError::Parse(format!("bad braid generator `{t}`")))
        })
        .collect::<Result<_>>()?;
    let max = word.iter().map(|g| g.unsigned_abs() as usize).max().unwrap_or(0);
    PDCode::from_braid(&word, strands.unwrap_or(max + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TREFOIL: &str = "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]";
    const FIGURE_EIGHT: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";

    fn pts(dirs: &[(EdgeLabel, Dir)]) -> Vec<BoundaryPoint> {
        dirs.iter().map(|&(label, dir)| BoundaryPoint { label, dir }).collect()
    }

    #[test]
    fn trefoil_signs() {
        let pd = parse_pd(TREFOIL).unwrap();
        assert_eq!(pd.n_crossings(), 3);
        assert_eq!((pd.n_plus, pd.n_minus), (3, 0));
    }

    #[test]
    fn figure_eight_signs() {
        let pd = parse_pd(FIGURE_EIGHT).unwrap();
        assert_eq!((pd.n_plus, pd.n_minus), (2, 2));
        assert_eq!(pd.signs, vec![1, 1, -1, -1]);
    }

    #[test]
    fn empty_unknot() {
        let pd = parse_pd("free_loops=1").unwrap();
        assert_eq!(pd.n_crossings(), 0);
        assert_eq!(pd.free_loops, 1);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_pd("X[1,2,3]").is_err());
        assert!(parse_pd("X[1,1,1,2]").is_err());
        assert!(parse_pd("Y[1,2,3,4]").is_err());
    }

    #[test]
    fn braid_closure_signs() {
        let t = parse_braid("s1 s1 s1", None).unwrap();
        assert_eq!((t.n_plus, t.n_minus, t.free_loops), (3, 0, 0));
        let f = parse_braid("s1 s-2 s1 s-2", None).unwrap();
        assert_eq!((f.n_plus, f.n_minus), (2, 2));
        let u = parse_braid("s1 s1 s1", Some(3)).unwrap();
        assert_eq!(u.free_loops, 1);
    }

    #[test]
    fn smoothings_cover_endpoints() {
        let pd = parse_pd(FIGURE_EIGHT).unwrap();
        for c in 0..4 {
            let r = pd.resolve_crossing(c);
            for m in [&r.oriented, &r.singular] {
                assert!(m.is_planar());
                assert_eq!(m.arcs().len(), 2);
            }
            for p in 0..4 {
                assert_eq!(r.oriented.arc_parity(p), 0);
                assert_eq!(r.singular.arc_parity(p), 1);
            }
        }
    }

    #[test]
    fn positive_crossing_of_upward_strands() {
        // closure of a single σ1: slots are b, d, c, a with a, b at the bottom
        let pd = PDCode::from_braid(&[1], 2).unwrap();
        assert_eq!(pd.signs, vec![1]);
        let r = pd.resolve_crossing(0);
        // vertical arcs b-d and c-a; horizontal arcs b-a and d-c
        assert_eq!(r.oriented.arcs(), vec![(0, 1), (2, 3)]);
        assert_eq!(r.singular.arcs(), vec![(0, 3), (1, 2)]);
        let neg = PDCode::from_braid(&[-1], 2).unwrap();
        assert_eq!(neg.signs, vec![-1]);
    }

    #[test]
    fn glue_one_loop() {
        use Dir::*;
        let m1 = Matching::from_arcs(pts(&[(1, In), (2, Out), (3, In), (4, Out)]), &[(0, 3), (1, 2)], vec![]).unwrap();
        let m2 = Matching::from_arcs(pts(&[(4, In), (3, Out), (2, In), (1, Out)]), &[(0, 1), (2, 3)], vec![]).unwrap();
        let g = Matching::glue(&m1, &[0, 1, 2, 3], &m2, &[3, 2, 1, 0]).unwrap();
        assert_eq!(g.matching.n_points(), 0);
        assert_eq!(g.matching.loops().len(), 1);
    }

    #[test]
    fn glue_identity_strands() {
        use Dir::*;
        let m1 = Matching::from_arcs(pts(&[(1, In), (2, In), (3, Out), (4, Out)]), &[(0, 3), (1, 2)], vec![]).unwrap();
        let m2 = Matching::from_arcs(pts(&[(3, In), (4, In), (5, Out), (6, Out)]), &[(0, 3), (1, 2)], vec![]).unwrap();
        let g = Matching::glue(&m1, &[2, 3], &m2, &[0, 1]).unwrap();
        assert!(g.matching.loops().is_empty());
        assert_eq!(g.matching.n_points(), 4);
        assert_eq!(g.matching.arcs().len(), 2);
        assert!(Matching::glue(&m1, &[0, 2], &m2, &[0, 1]).is_err());
        assert!(Matching::glue(&m1, &[2, 3], &m2, &[2, 3]).is_err());
    }

    #[test]
    fn two_vertex_loop_from_singular_pair() {
        use Dir::*;
        // two singular arcs joined into a loop
        let m1 = Matching::from_arcs(pts(&[(1, In), (2, In)]), &[(0, 1)], vec![]).unwrap();
        let m2 = Matching::from_arcs(pts(&[(1, Out), (2, Out)]), &[(0, 1)], vec![]).unwrap();
        let g = m1.glue_by_labels(&m2).unwrap();
        assert_eq!(g.matching.loops(), &[LoopKind::TwoVertex]);
        let m3 = Matching::from_arcs(pts(&[(1, In), (2, Out)]), &[(0, 1)], vec![]).unwrap();
        let m4 = Matching::from_arcs(pts(&[(1, Out), (2, In)]), &[(0, 1)], vec![]).unwrap();
        assert_eq!(m3.glue_by_labels(&m4).unwrap().matching.loops(), &[LoopKind::Oriented]);
    }

    #[test]
    fn figure_eight_halves_glue_to_loops() {
        let pd = parse_pd(FIGURE_EIGHT).unwrap();
        // every full resolution closes up into loops only
        for bits in 0..16u32 {
            let mut m = Matching::empty();
            for c in 0..4 {
                let r = if bits >> c & 1 == 1 { Resolution::Singular } else { Resolution::Oriented };
                m = m.glue_by_labels(&pd.resolution(c, r)).unwrap().matching;
            }
            assert_eq!(m.n_points(), 0);
            assert!((1..=3).contains(&m.loops().len()));
        }
    }

    #[test]
    fn ordering() {
        let t = parse_pd(TREFOIL).unwrap();
        assert!(t.max_boundary(&t.ordering_heuristic()) <= 4);
        let f = parse_pd(FIGURE_EIGHT).unwrap();
        assert_eq!(f.max_boundary(&f.ordering_heuristic()), 4);
        let granny = parse_braid("s1 s1 s1 s2 s2 s2", None).unwrap();
        let order = granny.ordering_heuristic();
        assert!(granny.max_boundary(&order) <= 4);
        let firsts: Vec<_> = order[..3].to_vec();
        assert!(firsts.iter().all(|&c| c < 3) || firsts.iter().all(|&c| c >= 3));
    }

    #[test]
    fn json_round_trip() {
        use Dir::*;
        let m = Matching::from_arcs(pts(&[(1, In), (2, Out), (3, In), (4, Out)]), &[(0, 3), (1, 2)], vec![LoopKind::Oriented])
            .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"arcs\":[[0,3],[1,2]]"));
        assert!(s.contains("{\"kind\":\"oriented\"}"));
        assert_eq!(serde_json::from_str::<Matching>(&s).unwrap(), m);
    }

    /// Random planar matching on `2n` points with alternating tags.
    fn planar(n: usize, seed: u64, label0: EdgeLabel) -> Matching {
        // Dyck word from seed
        let mut open = Vec::new();
        let mut arcs = Vec::new();
        let mut s = seed;
        let mut remaining_open = n;
        for p in 0..2 * n {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let can_open = remaining_open > 0;
            let can_close = !open.is_empty();
            if can_open && (!can_close || s >> 63 == 1) {
                open.push(p);
                remaining_open -= 1;
            } else {
                arcs.push((open.pop().unwrap(), p));
            }
        }
        let boundary = (0..2 * n)
            .map(|p| BoundaryPoint { label: label0 + p as EdgeLabel, dir: if p % 2 == 0 { Dir::In } else { Dir::Out } })
            .collect();
        Matching::from_arcs(boundary, &arcs, vec![]).unwrap()
    }

    fn relabel(m: &Matching, f: impl Fn(usize) -> (EdgeLabel, Dir)) -> Matching {
        let boundary = (0..m.n_points()).map(f).map(|(label, dir)| BoundaryPoint { label, dir }).collect();
        Matching::from_arcs(boundary, &m.arcs(), m.loops().to_vec()).unwrap()
    }

    proptest! {
        #[test]
        fn glue_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
            // A (points 100..) glued to B (200..) on two labels, B to C on two labels
            let a = relabel(&planar(2, s1, 0), |p| (10 + p as EdgeLabel, if p % 2 == 0 { Dir::In } else { Dir::Out }));
            let b = relabel(&planar(3, s2, 0), |p| match p {
                0 => (10, Dir::Out),
                1 => (11, Dir::In),
                2 => (30, Dir::In),
                3 => (31, Dir::Out),
                _ => (50 + p as EdgeLabel, if p % 2 == 0 { Dir::In } else { Dir::Out }),
            });
            let c = relabel(&planar(2, s3, 0), |p| match p {
                0 => (30, Dir::Out),
                1 => (31, Dir::In),
                _ => (70 + p as EdgeLabel, if p % 2 == 0 { Dir::In } else { Dir::Out }),
            });
            let left = a.glue_by_labels(&b).unwrap().matching.glue_by_labels(&c).unwrap().matching;
            let right = a.glue_by_labels(&b.glue_by_labels(&c).unwrap().matching).unwrap().matching;
            let canon = |m: &Matching| {
                let mut arcs: Vec<_> = m.arcs().iter().map(|&(p, q)| {
                    let (x, y) = (m.boundary()[p].label, m.boundary()[q].label);
                    (x.min(y), x.max(y))
                }).collect();
                arcs.sort();
                let mut loops = m.loops().to_vec();
                loops.sort();
                (arcs, loops)
            };
            prop_assert_eq!(canon(&left), canon(&right));
        }
    }

    #[test]
    fn parity_consistent_on_small_diagrams() {
        let words: [&[i32]; 5] = [&[1, 1, 1], &[1, -2, 1, -2], &[1, 1, 1, 2, -1, 2], &[1, 1, 2, -1, -3, 2, -3], &[1, 1, 1, -2, 1, -2]];
        for w in words {
            let strands = w.iter().map(|g| g.unsigned_abs()).max().unwrap() as usize + 1;
            let pd = PDCode::from_braid(w, strands).unwrap();
            let n = pd.n_crossings();
            for bits in 0..1u32 << n {
                let mut m = Matching::empty();
                for c in 0..n {
                    let r = if bits >> c & 1 == 1 { Resolution::Singular } else { Resolution::Oriented };
                    let local = pd.resolution(c, r);
                    let u = m.disjoint_union(&local);
                    let g = m.glue_by_labels(&local).unwrap();
                    let raw = |ids: &[usize]| ids.iter().map(|&a| u32::from(u.arc_parity(a))).sum::<u32>();
                    for (&p, ids) in &g.arc_origin {
                        assert_eq!(raw(ids) % 2, u32::from(g.matching.arc_parity(p)));
                    }
                    for (_, ids) in &g.created_loops {
                        assert_eq!(raw(ids) % 2, 0);
                    }
                    m = g.matching;
                }
            }
        }
    }
}
