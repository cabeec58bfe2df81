//! The sl(2) polynomial by brute-force state sum over all resolutions.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{FoamError, Result};
use crate::tangle::PDCode;

/// Integer Laurent polynomial in `q`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: i64, e: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `q + q^{-1}`.
    pub fn loop_value() -> Self {
        Self::monomial(1, 1) + Self::monomial(1, -1)
    }

    pub fn add_term(&mut self, e: i32, c: i64) {
        let v = self.coeffs.entry(e).or_insert(0);
        *v += c;
        if *v == 0 {
            self.coeffs.remove(&e);
        }
    }

    pub fn coeff(&self, e: i32) -> i64 {
        self.coeffs.get(&e).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i32, &i64)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Evaluation at `q = i`, returned as `(re, im)`.
    pub fn eval_at_i(&self) -> (i64, i64) {
        let mut re = 0;
        let mut im = 0;
        for (&e, &c) in &self.coeffs {
            match e.rem_euclid(4) {
                0 => re += c,
                1 => im += c,
                2 => re -= c,
                _ => im -= c,
            }
        }
        (re, im)
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, r: LaurentPoly) -> LaurentPoly {
        for (e, c) in r.coeffs {
            self.add_term(e, c);
        }
        self
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, r: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&e1, &c1) in &self.coeffs {
            for (&e2, &c2) in &r.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (k, (&e, &c)) in self.coeffs.iter().rev().enumerate() {
            let mag = c.abs();
            if k == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c < 0 { " - " } else { " + " })?;
            }
            match (mag, e) {
                (_, 0) => write!(f, "{mag}")?,
                (1, _) => write!(f, "q^{e}")?,
                _ => write!(f, "{mag}q^{e}")?,
            }
        }
        Ok(())
    }
}

pub const MAX_SKEIN_CROSSINGS: usize = 16;

/// Number of closed loops of the resolution selected by `bits` (bit `c`
/// set = singular smoothing at crossing `c`), free loops included.
pub fn resolution_loops(pd: &PDCode, bits: u64) -> usize {
    let mut labels: Vec<u32> = pd.crossings.iter().flatten().copied().collect();
    labels.sort_unstable();
    labels.dedup();
    let index = |l: u32| labels.binary_search(&l).unwrap();
    let mut uf: Vec<usize> = (0..labels.len()).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let mut comps = labels.len();
    for (c, x) in pd.crossings.iter().enumerate() {
        let singular = bits >> c & 1 == 1;
        let oriented_pairs = if pd.signs[c] > 0 { [(0, 1), (2, 3)] } else { [(0, 3), (1, 2)] };
        let singular_pairs = if pd.signs[c] > 0 { [(0, 3), (1, 2)] } else { [(0, 1), (2, 3)] };
        for (s, t) in if singular { singular_pairs } else { oriented_pairs } {
            let (a, b) = (find(&mut uf, index(x[s])), find(&mut uf, index(x[t])));
            if a != b {
                uf[a] = b;
                comps -= 1;
            }
        }
    }
    comps + pd.free_loops
}

/// `P_2` of a closed diagram: positive crossings contribute `q` (oriented)
/// or `-q^2` (singular), negative ones `q^{-1}` or `-q^{-2}`, and each loop
/// `q + q^{-1}`.
pub fn p2(pd: &PDCode) -> Result<LaurentPoly> {
    if !pd.open_edges().is_empty() {
        return Err(FoamError::InvalidDiagram("P2 needs a closed diagram".into()));
    }
    let n = pd.n_crossings();
    if n > MAX_SKEIN_CROSSINGS {
        return Err(FoamError::InvalidDiagram(format!("{n} crossings exceed the skein cap")));
    }
    let mut by_loops: BTreeMap<usize, LaurentPoly> = BTreeMap::new();
    for bits in 0..1u64 << n {
        let mut e = 0;
        let mut sign = 1;
        for c in 0..n {
            let singular = bits >> c & 1 == 1;
            let s = i32::from(pd.signs[c]);
            e += if singular { 2 * s } else { s };
            if singular {
                sign = -sign;
            }
        }
        let loops = resolution_loops(pd, bits);
        by_loops.entry(loops).or_default().add_term(e, sign);
    }
    let lv = LaurentPoly::loop_value();
    Ok(by_loops.into_iter().fold(LaurentPoly::zero(), |acc, (k, p)| acc + &p * &lv.pow(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangle::{parse_braid, parse_pd};

    #[test]
    fn unknot() {
        let pd = parse_pd("free_loops=1").unwrap();
        assert_eq!(p2(&pd).unwrap(), LaurentPoly::loop_value());
    }

    #[test]
    fn kinked_unknot() {
        let pd = parse_braid("s1", None).unwrap();
        assert_eq!(pd.n_plus, 1);
        assert_eq!(p2(&pd).unwrap(), LaurentPoly::loop_value());
        let neg = parse_braid("s-1", None).unwrap();
        assert_eq!(p2(&neg).unwrap(), LaurentPoly::loop_value());
    }

    #[test]
    fn figure_eight() {
        let pd = parse_pd("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]").unwrap();
        let v = p2(&pd).unwrap();
        assert_eq!(v, LaurentPoly::monomial(1, 5) + LaurentPoly::monomial(1, -5));
        assert_eq!(v.to_string(), "q^5 + q^-5");
    }

    #[test]
    fn unlinks_and_products() {
        for k in 0..4 {
            let pd = parse_pd(&format!("free_loops={k}")).unwrap();
            assert_eq!(p2(&pd).unwrap(), LaurentPoly::loop_value().pow(k));
        }
        let t = p2(&parse_braid("s1 s1 s1", None).unwrap()).unwrap();
        let split = parse_braid("s1 s1 s1", Some(3)).unwrap();
        assert_eq!(p2(&split).unwrap(), &t * &LaurentPoly::loop_value());
    }

    #[test]
    fn reidemeister_two() {
        let a = p2(&parse_braid("s1 s1 s1", Some(3)).unwrap()).unwrap();
        let b = p2(&parse_braid("s1 s1 s1 s2 s-2", None).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn open_diagram_rejected() {
        let pd = parse_pd("X[1,2,3,4]").unwrap();
        assert!(p2(&pd).is_err());
    }

    #[test]
    fn display() {
        let p = LaurentPoly::monomial(-2, 3) + LaurentPoly::monomial(1, 0) + LaurentPoly::monomial(-1, -1);
        assert_eq!(p.to_string(), "-2q^3 + 1 - q^-1");
    }
}
