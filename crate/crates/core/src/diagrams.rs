//! A small catalogue of knot and link diagrams used by tests, the oracle
//! run and the benchmarks.

use crate::error::{FoamError, Result};
use crate::tangle::{parse_braid, parse_pd, PDCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// braid word and strand count
    Braid(&'static str, usize),
    Pd(&'static str),
}

#[derive(Clone, Copy, Debug)]
pub struct Diagram {
    pub name: &'static str,
    pub source: Source,
    /// `|det|`, or 0 where the determinant vanishes (split links)
    pub determinant: u64,
    /// number of link components
    pub components: usize,
}

impl Diagram {
    pub fn pd(&self) -> PDCode {
        match self.source {
            Source::Braid(w, n) => parse_braid(w, Some(n)),
            Source::Pd(t) => parse_pd(t),
        }
        .expect("catalogue entries parse")
    }
}

const fn braid(name: &'static str, w: &'static str, n: usize, det: u64, comps: usize) -> Diagram {
    Diagram { name, source: Source::Braid(w, n), determinant: det, components: comps }
}

const fn pd(name: &'static str, t: &'static str, det: u64, comps: usize) -> Diagram {
    Diagram { name, source: Source::Pd(t), determinant: det, components: comps }
}

pub const CATALOGUE: &[Diagram] = &[
    pd("unknot", "free_loops=1", 1, 1),
    pd("unlink2", "free_loops=2", 0, 2),
    braid("unlink2_r2", "s1 s-1", 2, 0, 2),
    braid("hopf", "s1 s1", 2, 2, 2),
    pd("3_1", "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]", 3, 1),
    braid("3_1_mirror", "s-1 s-1 s-1", 2, 3, 1),
    pd("4_1", "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]", 5, 1),
    braid("5_1", "s1 s1 s1 s1 s1", 2, 5, 1),
    braid("5_2", "s1 s1 s1 s2 s-1 s2", 3, 7, 1),
    braid("6_1", "s1 s1 s2 s-1 s-3 s2 s-3", 4, 9, 1),
    braid("6_2", "s1 s1 s1 s-2 s1 s-2", 3, 11, 1),
    braid("6_3", "s1 s1 s-2 s1 s-2 s-2", 3, 13, 1),
    braid("7_1", "s1 s1 s1 s1 s1 s1 s1", 2, 7, 1),
    pd("7_2", "X[1,4,2,5] X[3,10,4,11] X[5,14,6,1] X[7,12,8,13] X[11,8,12,9] X[13,6,14,7] X[9,2,10,3]", 11, 1),
    pd("7_3", "X[6,2,7,1] X[10,4,11,3] X[14,8,1,7] X[8,14,9,13] X[12,6,13,5] X[2,10,3,9] X[4,12,5,11]", 13, 1),
    pd("7_4", "X[6,2,7,1] X[12,6,13,5] X[14,8,1,7] X[8,14,9,13] X[2,12,3,11] X[10,4,11,3] X[4,10,5,9]", 15, 1),
    // an 8-crossing closure; no minimal diagram is bundled
    braid("7_5", "s1 s1 s1 s1 s2 s-1 s2 s2", 3, 17, 1),
    braid("7_6", "s1 s1 s-2 s1 s3 s-2 s3", 4, 19, 1),
    braid("7_7", "s1 s-2 s1 s-2 s3 s-2 s3", 4, 21, 1),
    braid("granny", "s1 s1 s1 s2 s2 s2", 3, 9, 1),
    braid("square", "s1 s1 s1 s-2 s-2 s-2", 3, 9, 1),
    braid("8_19", "s1 s2 s1 s2 s1 s2 s1 s2", 3, 3, 1),
    braid("t2_7", "s1 s1 s1 s1 s1 s1 s1", 2, 7, 1),
];

pub fn find(name: &str) -> Result<Diagram> {
    CATALOGUE
        .iter()
        .find(|d| d.name == name)
        .copied()
        .ok_or_else(|| FoamError::Parse(format!("no bundled diagram named {name}")))
}

/// Diagram pairs related by a single Reidemeister move.
pub const REIDEMEISTER_PAIRS: &[(&str, Source, Source)] = &[
    ("R1", Source::Braid("s1 s1 s1", 2), Source::Braid("s1 s1 s1 s2", 3)),
    ("R1-", Source::Braid("s1 s1 s1", 2), Source::Braid("s1 s1 s1 s-2", 3)),
    ("R2", Source::Braid("s1 s1 s1", 3), Source::Braid("s1 s1 s1 s2 s-2", 3)),
    ("R2'", Source::Braid("s-1 s2 s-1 s2", 3), Source::Braid("s-1 s2 s1 s-1 s-1 s2", 3)),
    ("R3", Source::Braid("s1 s2 s1 s2", 3), Source::Braid("s2 s1 s2 s2", 3)),
    ("R3'", Source::Braid("s1 s2 s1 s-2", 3), Source::Braid("s2 s1 s2 s-2", 3)),
];

pub fn source_pd(s: Source) -> PDCode {
    match s {
        Source::Braid(w, n) => parse_braid(w, Some(n)),
        Source::Pd(t) => parse_pd(t),
    }
    .expect("catalogue entries parse")
}

/// `|J(i)|` where `P_2 = (q + q^{-1}) J`; equals the knot determinant.
pub fn determinant_from_p2(p: &crate::skein::LaurentPoly) -> Option<u64> {
    // multiply by q and divide by q^2 + 1
    let terms: Vec<(i32, i64)> = p.terms().map(|(&e, &c)| (e + 1, c)).collect();
    let lo = terms.iter().map(|t| t.0).min()?;
    let hi = terms.iter().map(|t| t.0).max()?;
    let mut coeffs = vec![0i64; (hi - lo + 1) as usize];
    for (e, c) in terms {
        coeffs[(e - lo) as usize] = c;
    }
    // synthetic division from the top degree down
    let mut quot = vec![0i64; coeffs.len().saturating_sub(2)];
    for k in (2..coeffs.len()).rev() {
        let c = coeffs[k];
        quot[k - 2] = c;
        coeffs[k] -= c;
        coeffs[k - 2] -= c;
    }
    if coeffs.iter().any(|&c| c != 0) {
        return None;
    }
    // evaluate the quotient (exponents lo..) at q = i
    let mut re = 0i64;
    let mut im = 0i64;
    for (k, &c) in quot.iter().enumerate() {
        match (lo + k as i32).rem_euclid(4) {
            0 => re += c,
            1 => im += c,
            2 => re -= c,
            _ => im -= c,
        }
    }
    let n2 = re * re + im * im;
    let r = (n2 as f64).sqrt().round() as u64;
    (r * r == n2 as u64).then_some(r)
}
