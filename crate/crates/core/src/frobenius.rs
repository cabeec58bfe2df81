//! The rank-two Frobenius algebra `A = R[X]/(X^2 - hX - a)` and its tensor
//! powers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{FoamError, Result};
use crate::ring::{Coefficient, RingElem};

/// Structure constants `a`, `h` of the algebra over scalar type `C`.
///
/// Over `R` these are the formal variables; over a field they are the
/// specialized values.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusAlgebra<C> {
    pub a: C,
    pub h: C,
}

impl FrobeniusAlgebra<RingElem> {
    pub fn universal() -> Self {
        Self { a: RingElem::var_a(), h: RingElem::var_h() }
    }
}

impl<C: Coefficient> FrobeniusAlgebra<C> {
    pub fn new(a: C, h: C) -> Self {
        Self { a, h }
    }

    pub fn unit(&self) -> AlgebraElement<C> {
        AlgebraElement::one()
    }

    pub fn x(&self) -> AlgebraElement<C> {
        AlgebraElement::x()
    }

    pub fn counit(&self, x: &AlgebraElement<C>) -> C {
        x.c_x.clone()
    }

    pub fn mul(&self, x: &AlgebraElement<C>, y: &AlgebraElement<C>) -> AlgebraElement<C> {
        // (p + qX)(r + sX) = pr + qs a + (ps + qr + qs h) X
        let qs = x.c_x.clone() * y.c_x.clone();
        AlgebraElement {
            c1: x.c1.clone() * y.c1.clone() + qs.clone() * self.a.clone(),
            c_x: x.c1.clone() * y.c_x.clone() + x.c_x.clone() * y.c1.clone() + qs * self.h.clone(),
        }
    }

    pub fn mul_x(&self, x: &AlgebraElement<C>) -> AlgebraElement<C> {
        AlgebraElement {
            c1: x.c_x.clone() * self.a.clone(),
            c_x: x.c1.clone() + x.c_x.clone() * self.h.clone(),
        }
    }

    pub fn comul(&self, x: &AlgebraElement<C>) -> TensorElement<C> {
        let mut t = TensorElement::zero(2);
        // Δ(1) = 1⊗X + X⊗1 − h 1⊗1 ; Δ(X) = X⊗X + a 1⊗1
        t.add_word(0b10, x.c1.clone());
        t.add_word(0b01, x.c1.clone());
        t.add_word(0b00, -(x.c1.clone() * self.h.clone()));
        t.add_word(0b11, x.c_x.clone());
        t.add_word(0b00, x.c_x.clone() * self.a.clone());
        t
    }

    /// The handle element `2X - h`.
    pub fn handle(&self) -> AlgebraElement<C> {
        AlgebraElement { c1: -self.h.clone(), c_x: C::from_gaussian(2, 0) }
    }

    /// `(2X - h)^g X^d` in the basis `(1, X)`.
    pub fn handle_power(&self, g: u32, d: u32) -> AlgebraElement<C> {
        let mut r = self.unit();
        for _ in 0..d {
            r = self.mul_x(&r);
        }
        let hd = self.handle();
        for _ in 0..g {
            r = self.mul(&r, &hd);
        }
        r
    }

    /// `Δ^{b-1}(x)` for `b >= 1` boundary circles (left-to-right bracketing,
    /// the result is independent of it by coassociativity).
    pub fn iterated_comul(&self, x: &AlgebraElement<C>, b: usize) -> TensorElement<C> {
        assert!(b >= 1);
        let mut t = TensorElement::from_element(x);
        for k in 1..b {
            t = self.split_factor(&t, k - 1).expect("in range");
        }
        t
    }

    pub fn apply_on_factor(&self, t: &TensorElement<C>, pos: usize, f: FactorMap) -> Result<TensorElement<C>> {
        t.check_index(pos)?;
        match f {
            FactorMap::Identity => Ok(t.clone()),
            FactorMap::MulX => Ok(t.map_factor(pos, |e| self.mul_x(e))),
        }
    }

    /// Applies `m` to factors `i` and `j`; the product replaces factor `i`
    /// and factor `j` is removed.
    pub fn merge_factors(&self, t: &TensorElement<C>, i: usize, j: usize) -> Result<TensorElement<C>> {
        t.check_index(i)?;
        t.check_index(j)?;
        if i == j {
            return Err(FoamError::InvalidDiagram("merge of a factor with itself".into()));
        }
        let mut out = TensorElement::zero(t.arity - 1);
        for (w, c) in &t.coeffs {
            let xi = AlgebraElement::basis(w >> i & 1 == 1);
            let xj = AlgebraElement::basis(w >> j & 1 == 1);
            let p = self.mul(&xi, &xj);
            let rest = remove_bit(w & !(1 << i), j);
            let i2 = if j < i { i - 1 } else { i };
            out.add_word(rest, c.clone() * p.c1);
            out.add_word(rest | 1 << i2, c.clone() * p.c_x);
        }
        Ok(out)
    }

    /// Applies `Δ` to factor `i`; the first tensorand stays at `i` and the
    /// second is appended as a new last factor.
    pub fn split_factor(&self, t: &TensorElement<C>, i: usize) -> Result<TensorElement<C>> {
        t.check_index(i)?;
        let k = t.arity;
        let mut out = TensorElement::zero(k + 1);
        for (w, c) in &t.coeffs {
            let d = self.comul(&AlgebraElement::basis(w >> i & 1 == 1));
            let base = w & !(1 << i);
            for (dw, dc) in &d.coeffs {
                // word bit 0 is the left tensorand
                let left = dw & 1;
                let right = dw >> 1 & 1;
                out.add_word(base | left << i | right << k, c.clone() * dc.clone());
            }
        }
        Ok(out)
    }

    /// Applies `ε` to factor `i`, removing it.
    pub fn counit_factor(&self, t: &TensorElement<C>, i: usize) -> Result<TensorElement<C>> {
        t.check_index(i)?;
        let mut out = TensorElement::zero(t.arity - 1);
        for (w, c) in &t.coeffs {
            if w >> i & 1 == 1 {
                out.add_word(remove_bit(*w, i), c.clone());
            }
        }
        Ok(out)
    }

    /// Appends a factor `1` (the unit `ι`).
    pub fn unit_factor(&self, t: &TensorElement<C>) -> TensorElement<C> {
        TensorElement { arity: t.arity + 1, coeffs: t.coeffs.clone() }
    }

    /// Matrix of a linear endomorphism-like map `A^{⊗k} -> A^{⊗l}`; column `j`
    /// is the image of the `j`-th basis word in [`TensorElement::basis_order`].
    pub fn matrix_of(
        &self,
        k: usize,
        l: usize,
        f: impl Fn(&TensorElement<C>) -> TensorElement<C>,
    ) -> Vec<Vec<C>> {
        let mut m = vec![vec![C::zero(); 1 << k]; 1 << l];
        for (col, w) in TensorElement::<C>::basis_order(k).into_iter().enumerate() {
            let mut e = TensorElement::zero(k);
            e.add_word(w, C::one());
            let img = f(&e);
            assert_eq!(img.arity, l);
            for (row, v) in TensorElement::<C>::basis_order(l).into_iter().enumerate() {
                m[row][col] = img.coeff(v);
            }
        }
        m
    }
}

fn remove_bit(w: u64, j: usize) -> u64 {
    let low = w & ((1 << j) - 1);
    let high = w >> (j + 1);
    low | high << j
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorMap {
    Identity,
    MulX,
}

/// `c1 + c_x X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement<C = RingElem> {
    pub c1: C,
    #[serde(rename = "cX")]
    pub c_x: C,
}

impl<C: Coefficient> AlgebraElement<C> {
    pub fn new(c1: C, c_x: C) -> Self {
        Self { c1, c_x }
    }

    pub fn zero() -> Self {
        Self::new(C::zero(), C::zero())
    }

    pub fn one() -> Self {
        Self::new(C::one(), C::zero())
    }

    pub fn x() -> Self {
        Self::new(C::zero(), C::one())
    }

    pub fn basis(dotted: bool) -> Self {
        if dotted {
            Self::x()
        } else {
            Self::one()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c1.is_zero() && self.c_x.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.c1.clone() + o.c1.clone(), self.c_x.clone() + o.c_x.clone())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.c1.clone() * c.clone(), self.c_x.clone() * c.clone())
    }

    /// q-degree with `deg 1 = +1`, `deg X = -1`; `None` if zero or not
    /// homogeneous.
    pub fn q_degree(&self) -> Option<i32> {
        let d1 = (!self.c1.is_zero()).then(|| self.c1.q_degree().map(|d| d + 1));
        let dx = (!self.c_x.is_zero()).then(|| self.c_x.q_degree().map(|d| d - 1));
        match (d1, dx) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => (a.is_some() && a == b).then(|| a.unwrap()),
        }
    }
}

/// A sparse element of `A^{⊗k}`. Word bit `j` set means factor `j` is `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorElement<C = RingElem> {
    pub arity: usize,
    coeffs: BTreeMap<u64, C>,
}

impl<C: Coefficient> TensorElement<C> {
    pub fn zero(arity: usize) -> Self {
        assert!(arity < 64);
        Self { arity, coeffs: BTreeMap::new() }
    }

    pub fn scalar(c: C) -> Self {
        let mut t = Self::zero(0);
        t.add_word(0, c);
        t
    }

    pub fn from_element(x: &AlgebraElement<C>) -> Self {
        let mut t = Self::zero(1);
        t.add_word(0, x.c1.clone());
        t.add_word(1, x.c_x.clone());
        t
    }

    pub fn add_word(&mut self, w: u64, c: C) {
        if c.is_zero() {
            return;
        }
        let s = match self.coeffs.remove(&w) {
            Some(old) => old + c,
            None => c,
        };
        if !s.is_zero() {
            self.coeffs.insert(w, s);
        }
    }

    pub fn coeff(&self, w: u64) -> C {
        self.coeffs.get(&w).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u64, &C)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity);
        let mut r = self.clone();
        for (w, c) in &o.coeffs {
            r.add_word(*w, c.clone());
        }
        r
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut r = Self::zero(self.arity);
        for (w, x) in &self.coeffs {
            r.add_word(*w, x.clone() * c.clone());
        }
        r
    }

    /// Basis words ordered with factor 0 most significant, so that for
    /// `k = 2` the order is `1⊗1, 1⊗X, X⊗1, X⊗X`.
    pub fn basis_order(k: usize) -> Vec<u64> {
        (0..1u64 << k)
            .map(|n| (0..k).fold(0u64, |w, j| w | ((n >> (k - 1 - j)) & 1) << j))
            .collect()
    }

    fn check_index(&self, pos: usize) -> Result<()> {
        if pos < self.arity {
            Ok(())
        } else {
            Err(FoamError::InvalidDiagram(format!("factor {pos} out of range for arity {}", self.arity)))
        }
    }

    fn map_factor(&self, pos: usize, f: impl Fn(&AlgebraElement<C>) -> AlgebraElement<C>) -> Self {
        let mut out = Self::zero(self.arity);
        for (w, c) in &self.coeffs {
            let e = f(&AlgebraElement::basis(w >> pos & 1 == 1));
            let base = w & !(1 << pos);
            out.add_word(base, c.clone() * e.c1);
            out.add_word(base | 1 << pos, c.clone() * e.c_x);
        }
        out
    }

    pub fn map_factor_with(&self, pos: usize, f: impl Fn(&AlgebraElement<C>) -> AlgebraElement<C>) -> Result<Self> {
        self.check_index(pos)?;
        Ok(self.map_factor(pos, f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type El = AlgebraElement<RingElem>;

    fn alg() -> FrobeniusAlgebra<RingElem> {
        FrobeniusAlgebra::universal()
    }
    fn a() -> RingElem {
        RingElem::var_a()
    }
    fn h() -> RingElem {
        RingElem::var_h()
    }
    fn int(n: i64) -> RingElem {
        RingElem::int(n)
    }

    #[test]
    fn unit_counit() {
        let f = alg();
        assert_eq!(f.counit(&El::one()), int(0));
        assert_eq!(f.counit(&El::x()), int(1));
        assert_eq!(f.counit(&El::new(h(), a())), a());
    }

    #[test]
    fn multiplication_table() {
        let f = alg();
        assert_eq!(f.mul(&El::x(), &El::x()), El::new(a(), h()));
        assert_eq!(f.mul(&El::one(), &El::x()), El::x());
        let hd = f.handle();
        assert_eq!(f.mul(&hd, &hd), El::new(h() * h() + int(4) * a(), int(0)));
    }

    #[test]
    fn comultiplication() {
        let f = alg();
        let d1 = f.comul(&El::one());
        assert_eq!(d1.coeff(0b00), -h());
        assert_eq!(d1.coeff(0b01), int(1));
        assert_eq!(d1.coeff(0b10), int(1));
        assert_eq!(d1.coeff(0b11), int(0));
        let dx = f.comul(&El::x());
        assert_eq!(dx.coeff(0b11), int(1));
        assert_eq!(dx.coeff(0b00), a());
        assert!(f.comul(&El::zero()).is_zero());
    }

    #[test]
    fn handle_powers() {
        let f = alg();
        assert_eq!(f.handle_power(0, 0), El::one());
        assert_eq!(f.handle_power(2, 0), El::new(h() * h() + int(4) * a(), int(0)));
        let t = f.handle_power(1, 0);
        assert_eq!(t, El::new(-h(), int(2)));
        assert_eq!(f.counit(&t), int(2));
        // closed surfaces: sphere, dotted sphere, torus
        assert_eq!(f.counit(&f.handle_power(0, 0)), int(0));
        assert_eq!(f.counit(&f.handle_power(0, 1)), int(1));
        assert_eq!(f.counit(&f.handle_power(1, 0)), int(2));
    }

    #[test]
    fn m_delta_is_handle() {
        let f = alg();
        for x in [El::one(), El::x()] {
            let d = f.comul(&x);
            let m = f.merge_factors(&d, 0, 1).unwrap();
            let expect = f.mul(&x, &f.handle());
            assert_eq!(m, TensorElement::from_element(&expect));
        }
        let torus = f.merge_factors(&f.comul(&El::one()), 0, 1).unwrap();
        assert_eq!(f.counit_factor(&torus, 0).unwrap().coeff(0), int(2));
    }

    fn dot_matrix(cl: RingElem, cr: RingElem) -> Vec<Vec<RingElem>> {
        let f = alg();
        f.matrix_of(2, 2, |t| {
            let l = f.apply_on_factor(t, 0, FactorMap::MulX).unwrap().scale(&cl);
            let r = f.apply_on_factor(t, 1, FactorMap::MulX).unwrap().scale(&cr);
            l.add(&r)
        })
    }

    #[test]
    fn dot_difference_matrices() {
        let i = RingElem::i();
        let z = int(0);
        let m = dot_matrix(i.clone(), -i.clone());
        let ai = a() * i.clone();
        let hi = h() * i.clone();
        let expect = vec![
            vec![z.clone(), -ai.clone(), ai.clone(), z.clone()],
            vec![-i.clone(), -hi.clone(), z.clone(), ai.clone()],
            vec![i.clone(), z.clone(), hi.clone(), -ai.clone()],
            vec![z.clone(), i.clone(), -i.clone(), z.clone()],
        ];
        assert_eq!(m, expect);
        let m = dot_matrix(int(1), int(-1));
        let expect = vec![
            vec![z.clone(), -a(), a(), z.clone()],
            vec![int(-1), -h(), z.clone(), a()],
            vec![int(1), z.clone(), h(), -a()],
            vec![z.clone(), int(1), int(-1), z.clone()],
        ];
        assert_eq!(m, expect);
    }

    #[test]
    fn merge_example() {
        let f = alg();
        let mut t = TensorElement::zero(2);
        t.add_word(0b10, int(1)); // 1 ⊗ X
        assert_eq!(f.merge_factors(&t, 0, 1).unwrap(), TensorElement::from_element(&El::x()));
        assert!(f.merge_factors(&t, 0, 2).is_err());
        assert!(f.apply_on_factor(&t, 5, FactorMap::MulX).is_err());
    }

    #[test]
    fn frobenius_identity() {
        let f = alg();
        for w in 0..4u64 {
            let mut t = TensorElement::zero(2);
            t.add_word(w, int(1));
            // Δ∘m
            let dm = f.split_factor(&f.merge_factors(&t, 0, 1).unwrap(), 0).unwrap();
            // (m⊗id)∘(id⊗Δ): split factor 1 into (1, 2), merge 0 with 1
            let s = f.split_factor(&t, 1).unwrap();
            let lhs = f.merge_factors(&s, 0, 1).unwrap();
            assert_eq!(lhs, dm);
            // (id⊗m)∘(Δ⊗id): split 0 into (0, 2), merge 2 and 1 onto 1
            let s = f.split_factor(&t, 0).unwrap();
            let rhs = f.merge_factors(&s, 1, 2).unwrap();
            assert_eq!(rhs, dm);
        }
    }

    #[test]
    fn relation_x_squared() {
        let f = alg();
        let x2 = f.mul(&El::x(), &El::x());
        let rhs = El::x().scale(&h()).add(&El::one().scale(&a()));
        assert_eq!(x2, rhs);
    }

    #[test]
    fn homogeneity() {
        let f = alg();
        for x in [El::one(), El::x()] {
            let dx = x.q_degree().unwrap();
            assert_eq!(f.mul_x(&x).q_degree(), Some(dx - 2));
            for (w, c) in f.comul(&x).terms() {
                let deg = c.q_degree().unwrap() + (2 - 2 * w.count_ones() as i32);
                assert_eq!(deg, dx - 1);
            }
            for y in [El::one(), El::x()] {
                let dy = y.q_degree().unwrap();
                assert_eq!(f.mul(&x, &y).q_degree(), Some(dx + dy - 1));
            }
        }
        assert_eq!(f.handle_power(3, 2).q_degree(), Some(1 - 2 * 3 - 2 * 2));
    }

    #[test]
    fn basis_order_two() {
        assert_eq!(TensorElement::<RingElem>::basis_order(2), vec![0b00, 0b10, 0b01, 0b11]);
    }
}
