//! Exact scalars: Gaussian integers, the polynomial ring `Z[i][a,h]`, its
//! dotless variant `Z[1/2,i][a,h]`, and specializations into `Q(i)`.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::FoamError;

macro_rules! forward_binop {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, rhs: &'a $t) -> $t {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<$t> for &'a $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                self.$m(&rhs)
            }
        }
    };
}

/// Common interface of every scalar type the algorithms run over.
///
/// Generic code is written against owned-value operators; concrete hot paths
/// use the reference impls directly.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_gaussian(re: i64, im: i64) -> Self;

    fn i() -> Self {
        Self::from_gaussian(0, 1)
    }

    /// Multiplicative inverse when the element is a unit of the ring.
    fn try_inverse(&self) -> Option<Self>;

    /// q-degree of a nonzero homogeneous element; `None` otherwise.
    fn q_degree(&self) -> Option<i32>;

    /// Image in `Q(i)`; scalars that already live there are returned as is.
    fn to_field(&self, s: &Specialization) -> FieldScalar;
}

// ---------------------------------------------------------------------------
// Gaussian integers

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Self { re: re.into(), im: im.into() }
    }

    pub fn i() -> Self {
        Self::new(0, 1)
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn inverse(&self) -> Option<Self> {
        self.is_unit().then(|| self.conj())
    }

    /// Euclidean quotient: `self / d` rounded to the nearest lattice point.
    pub fn div_round(&self, d: &GaussianInt) -> GaussianInt {
        let n = d.norm();
        assert!(!n.is_zero(), "division by zero");
        let num = self * &d.conj();
        let round = |x: &BigInt| -> BigInt {
            let two = BigInt::from(2);
            (x * &two + &n).div_floor(&(&n * &two))
        };
        GaussianInt { re: round(&num.re), im: round(&num.im) }
    }

    pub fn to_field(&self) -> GaussianRational {
        GaussianRational {
            re: BigRational::from_integer(self.re.clone()),
            im: BigRational::from_integer(self.im.clone()),
        }
    }
}

impl<'a> Add<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn add(self, r: &GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re + &r.re, im: &self.im + &r.im }
    }
}
impl<'a> Sub<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn sub(self, r: &GaussianInt) -> GaussianInt {
        GaussianInt { re: &self.re - &r.re, im: &self.im - &r.im }
    }
}
impl<'a> Mul<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn mul(self, r: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re * &r.re - &self.im * &r.im,
            im: &self.re * &r.im + &self.im * &r.re,
        }
    }
}
forward_binop!(GaussianInt, Add, add);
forward_binop!(GaussianInt, Sub, sub);
forward_binop!(GaussianInt, Mul, mul);

impl Neg for GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt { re: -self.re, im: -self.im }
    }
}
impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt { re: -&self.re, im: -&self.im }
    }
}

impl Zero for GaussianInt {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}
impl One for GaussianInt {
    fn one() -> Self {
        Self::new(1, 0)
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "({}{}{}i)", self.re, sign, self.im.abs())
    }
}

// ---------------------------------------------------------------------------
// Q(i)

/// An exact element of `Q(i)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

/// Target field of every specialization.
pub type FieldScalar = GaussianRational;

impl Default for GaussianRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn half() -> Self {
        Self::new(BigRational::new(1.into(), 2.into()), BigRational::zero())
    }

    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(Self { re: &self.re / &n, im: -&self.im / &n })
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, r: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &r.re, im: &self.im + &r.im }
    }
}
impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, r: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &r.re, im: &self.im - &r.im }
    }
}
impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, r: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &r.re - &self.im * &r.im,
            im: &self.re * &r.im + &self.im * &r.re,
        }
    }
}
forward_binop!(GaussianRational, Add, add);
forward_binop!(GaussianRational, Sub, sub);
forward_binop!(GaussianRational, Mul, mul);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}
impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}
impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}
impl One for GaussianRational {
    fn one() -> Self {
        Self::from_ints(1, 0)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "({}{}{}i)", self.re, sign, self.im.abs())
    }
}

impl Coefficient for GaussianInt {
    fn from_gaussian(re: i64, im: i64) -> Self {
        Self::new(re, im)
    }
    fn try_inverse(&self) -> Option<Self> {
        self.inverse()
    }
    fn q_degree(&self) -> Option<i32> {
        (!self.is_zero()).then_some(0)
    }
    fn to_field(&self, _: &Specialization) -> FieldScalar {
        GaussianInt::to_field(self)
    }
}

impl Coefficient for GaussianRational {
    fn from_gaussian(re: i64, im: i64) -> Self {
        Self::from_ints(re, im)
    }
    fn try_inverse(&self) -> Option<Self> {
        self.inverse()
    }
    fn q_degree(&self) -> Option<i32> {
        (!self.is_zero()).then_some(0)
    }
    fn to_field(&self, _: &Specialization) -> FieldScalar {
        self.clone()
    }
}

fn is_power_of_two(n: &BigInt) -> bool {
    n.is_positive() && (n & (n - BigInt::one())).is_zero()
}

/// An element of `Z[1/2, i]`: a Gaussian rational whose denominators are
/// powers of two.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct DyadicGaussian(GaussianRational);

impl DyadicGaussian {
    pub fn new(value: GaussianRational) -> Result<Self, FoamError> {
        let ok = |x: &BigRational| is_power_of_two(x.denom());
        if ok(&value.re) && ok(&value.im) {
            Ok(Self(value))
        } else {
            Err(FoamError::Parse(format!("{value} is not dyadic")))
        }
    }

    pub fn half() -> Self {
        Self(GaussianRational::half())
    }

    pub fn value(&self) -> &GaussianRational {
        &self.0
    }

    /// Units of `Z[1/2,i]` are exactly the elements of norm `2^k`.
    pub fn is_unit(&self) -> bool {
        if self.0.is_zero() {
            return false;
        }
        let n = self.0.norm();
        is_power_of_two(n.numer()) && is_power_of_two(n.denom())
    }
}

impl From<GaussianInt> for DyadicGaussian {
    fn from(x: GaussianInt) -> Self {
        Self(x.to_field())
    }
}

impl<'a> Add<&'a DyadicGaussian> for &'a DyadicGaussian {
    type Output = DyadicGaussian;
    fn add(self, r: &DyadicGaussian) -> DyadicGaussian {
        DyadicGaussian(&self.0 + &r.0)
    }
}
impl<'a> Sub<&'a DyadicGaussian> for &'a DyadicGaussian {
    type Output = DyadicGaussian;
    fn sub(self, r: &DyadicGaussian) -> DyadicGaussian {
        DyadicGaussian(&self.0 - &r.0)
    }
}
impl<'a> Mul<&'a DyadicGaussian> for &'a DyadicGaussian {
    type Output = DyadicGaussian;
    fn mul(self, r: &DyadicGaussian) -> DyadicGaussian {
        DyadicGaussian(&self.0 * &r.0)
    }
}
forward_binop!(DyadicGaussian, Add, add);
forward_binop!(DyadicGaussian, Sub, sub);
forward_binop!(DyadicGaussian, Mul, mul);
impl Neg for DyadicGaussian {
    type Output = DyadicGaussian;
    fn neg(self) -> DyadicGaussian {
        DyadicGaussian(-self.0)
    }
}
impl Neg for &DyadicGaussian {
    type Output = DyadicGaussian;
    fn neg(self) -> DyadicGaussian {
        DyadicGaussian(-&self.0)
    }
}
impl Zero for DyadicGaussian {
    fn zero() -> Self {
        Self(GaussianRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}
impl One for DyadicGaussian {
    fn one() -> Self {
        Self(GaussianRational::one())
    }
}
impl fmt::Display for DyadicGaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

// ---------------------------------------------------------------------------
// Polynomials in a, h

/// Coefficient types of [`Poly`].
pub trait PolyCoeff:
    Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static + Zero + One
{
    fn add_ref(&self, r: &Self) -> Self;
    fn sub_ref(&self, r: &Self) -> Self;
    fn mul_ref(&self, r: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn from_parts(re: i64, im: i64) -> Self;
    fn is_unit(&self) -> bool;
    fn inverse(&self) -> Option<Self>;
    fn to_field(&self) -> GaussianRational;
    fn parse_coeff(s: &str) -> Result<Self, FoamError>;
}

impl PolyCoeff for GaussianInt {
    fn add_ref(&self, r: &Self) -> Self {
        self + r
    }
    fn sub_ref(&self, r: &Self) -> Self {
        self - r
    }
    fn mul_ref(&self, r: &Self) -> Self {
        self * r
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_parts(re: i64, im: i64) -> Self {
        GaussianInt::new(re, im)
    }
    fn is_unit(&self) -> bool {
        GaussianInt::is_unit(self)
    }
    fn inverse(&self) -> Option<Self> {
        GaussianInt::inverse(self)
    }
    fn to_field(&self) -> GaussianRational {
        GaussianInt::to_field(self)
    }
    fn parse_coeff(s: &str) -> Result<Self, FoamError> {
        let (re, im) = split_gaussian(s)?;
        let p = |t: &str| {
            t.parse::<BigInt>().map_err(|_| FoamError::Parse(format!("bad integer `{t}`")))
        };
        Ok(GaussianInt { re: p(re)?, im: p(&im)? })
    }
}

impl PolyCoeff for DyadicGaussian {
    fn add_ref(&self, r: &Self) -> Self {
        self + r
    }
    fn sub_ref(&self, r: &Self) -> Self {
        self - r
    }
    fn mul_ref(&self, r: &Self) -> Self {
        self * r
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_parts(re: i64, im: i64) -> Self {
        DyadicGaussian(GaussianRational::from_ints(re, im))
    }
    fn is_unit(&self) -> bool {
        DyadicGaussian::is_unit(self)
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_unit() {
            self.0.inverse().map(DyadicGaussian)
        } else {
            None
        }
    }
    fn to_field(&self) -> GaussianRational {
        self.0.clone()
    }
    fn parse_coeff(s: &str) -> Result<Self, FoamError> {
        let (re, im) = split_gaussian(s)?;
        let p = |t: &str| {
            t.parse::<BigRational>().map_err(|_| FoamError::Parse(format!("bad rational `{t}`")))
        };
        DyadicGaussian::new(GaussianRational::new(p(re)?, p(&im)?))
    }
}

/// Splits `"(re+imi)"` / `"(re-imi)"` into its two signed parts.
fn split_gaussian(s: &str) -> Result<(&str, String), FoamError> {
    let bad = || FoamError::Parse(format!("bad Gaussian coefficient `{s}`"));
    let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix("i)")).ok_or_else(bad)?;
    // the separating sign is the last '+' or '-' not at position 0
    let pos = inner
        .char_indices()
        .skip(1)
        .filter(|(_, c)| *c == '+' || *c == '-')
        .map(|(k, _)| k)
        .last()
        .ok_or_else(bad)?;
    let (re, im) = inner.split_at(pos);
    let im = im.strip_prefix('+').unwrap_or(im).to_string();
    Ok((re, im))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub deg_a: u32,
    pub deg_h: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { deg_a: 0, deg_h: 0 };

    /// `deg_q(a) = -4`, `deg_q(h) = -2`.
    pub fn q_degree(&self) -> i32 {
        -4 * self.deg_a as i32 - 2 * self.deg_h as i32
    }
}

/// A polynomial in the formal variables `a`, `h`. Zero coefficients are
/// never stored, so structural equality is ring equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<K: PolyCoeff>
{
    terms: BTreeMap<Monomial, K>,
}

/// The ground ring `Z[i][a,h]`.
pub type RingElem = Poly<GaussianInt>;
/// The dotless ground ring `Z[1/2,i][a,h]`.
pub type DotlessElem = Poly<DyadicGaussian>;

impl<K: PolyCoeff> Poly<K>
{
    pub fn constant(c: K) -> Self {
        Self::monomial(Monomial::ONE, c)
    }

    pub fn monomial(m: Monomial, c: K) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(K::from_parts(n, 0))
    }

    pub fn gaussian(re: i64, im: i64) -> Self {
        Self::constant(K::from_parts(re, im))
    }

    pub fn var_a() -> Self {
        Self::monomial(Monomial { deg_a: 1, deg_h: 0 }, K::one())
    }

    pub fn var_h() -> Self {
        Self::monomial(Monomial { deg_a: 0, deg_h: 1 }, K::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &K)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<K> {
        match self.terms.len() {
            0 => Some(K::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_unit())
    }

    pub fn inverse(&self) -> Option<Self> {
        self.as_constant().and_then(|c| c.inverse()).map(Self::constant)
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, x)| (*m, x.mul_ref(c))).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn q_degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(Monomial::q_degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn specialize(&self, s: &Specialization) -> FieldScalar {
        let mut acc = FieldScalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.to_field();
            for _ in 0..m.deg_a {
                t = &t * &s.value_a;
            }
            for _ in 0..m.deg_h {
                t = &t * &s.value_h;
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn map_coeffs<L: PolyCoeff>(&self, f: impl Fn(&K) -> L) -> Poly<L>
    {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                terms.insert(*m, v);
            }
        }
        Poly { terms }
    }

    fn add_term(terms: &mut BTreeMap<Monomial, K>, m: Monomial, c: K) {
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add_ref(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }
}

impl RingElem {
    pub fn to_dotless(&self) -> DotlessElem {
        self.map_coeffs(|c| DyadicGaussian::from(c.clone()))
    }
}

impl<'b, K: PolyCoeff> Add<&'b Poly<K>> for &'b Poly<K>
{
    type Output = Poly<K>;
    fn add(self, r: &Poly<K>) -> Poly<K> {
        let mut terms = self.terms.clone();
        for (m, c) in &r.terms {
            Poly::add_term(&mut terms, *m, c.clone());
        }
        Poly { terms }
    }
}

impl<'b, K: PolyCoeff> Sub<&'b Poly<K>> for &'b Poly<K>
{
    type Output = Poly<K>;
    fn sub(self, r: &Poly<K>) -> Poly<K> {
        let mut terms = self.terms.clone();
        for (m, c) in &r.terms {
            Poly::add_term(&mut terms, *m, c.neg_ref());
        }
        Poly { terms }
    }
}

impl<'b, K: PolyCoeff> Mul<&'b Poly<K>> for &'b Poly<K>
{
    type Output = Poly<K>;
    fn mul(self, r: &Poly<K>) -> Poly<K> {
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &r.terms {
                let m = Monomial { deg_a: m1.deg_a + m2.deg_a, deg_h: m1.deg_h + m2.deg_h };
                Poly::add_term(&mut terms, m, c1.mul_ref(c2));
            }
        }
        Poly { terms }
    }
}

macro_rules! forward_poly_binop {
    ($tr:ident, $m:ident) => {
        impl<K: PolyCoeff> $tr<Poly<K>> for Poly<K>
        {
            type Output = Poly<K>;
            fn $m(self, r: Poly<K>) -> Poly<K> {
                (&self).$m(&r)
            }
        }
        impl<'b, K: PolyCoeff> $tr<&'b Poly<K>> for Poly<K>
        {
            type Output = Poly<K>;
            fn $m(self, r: &'b Poly<K>) -> Poly<K> {
                (&self).$m(r)
            }
        }
    };
}
forward_poly_binop!(Add, add);
forward_poly_binop!(Sub, sub);
forward_poly_binop!(Mul, mul);

impl<K: PolyCoeff> Neg for Poly<K>
{
    type Output = Poly<K>;
    fn neg(self) -> Poly<K> {
        Poly { terms: self.terms.into_iter().map(|(m, c)| (m, c.neg_ref())).collect() }
    }
}
impl<K: PolyCoeff> Neg for &Poly<K>
{
    type Output = Poly<K>;
    fn neg(self) -> Poly<K> {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, c.neg_ref())).collect() }
    }
}

impl<K: PolyCoeff> Zero for Poly<K>
{
    fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}
impl<K: PolyCoeff> One for Poly<K>
{
    fn one() -> Self {
        Self::constant(K::one())
    }
}

impl<K: PolyCoeff> Coefficient for Poly<K>
{
    fn from_gaussian(re: i64, im: i64) -> Self {
        Self::gaussian(re, im)
    }
    fn try_inverse(&self) -> Option<Self> {
        self.inverse()
    }
    fn q_degree(&self) -> Option<i32> {
        Poly::q_degree(self)
    }
    fn to_field(&self, s: &Specialization) -> FieldScalar {
        self.specialize(s)
    }
}

/// Canonical text form: monomials sorted by `(deg_a, deg_h)` descending,
/// e.g. `(1+1i)*a^1*h^0 + (0-1i)`.
impl<K: PolyCoeff> fmt::Display for Poly<K>
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if *m == Monomial::ONE {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*a^{}*h^{}", m.deg_a, m.deg_h)?;
            }
        }
        Ok(())
    }
}

impl<K: PolyCoeff> FromStr for Poly<K>
{
    type Err = FoamError;

    fn from_str(s: &str) -> Result<Self, FoamError> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut terms = BTreeMap::new();
        for part in s.split(" + ") {
            let mut pieces = part.split('*');
            let coeff = K::parse_coeff(pieces.next().unwrap_or_default())?;
            let mut m = Monomial::ONE;
            for p in pieces {
                let bad = || FoamError::Parse(format!("bad monomial factor `{p}`"));
                let (var, e) = p.split_once('^').ok_or_else(bad)?;
                let e: u32 = e.parse().map_err(|_| bad())?;
                match var {
                    "a" => m.deg_a = e,
                    "h" => m.deg_h = e,
                    _ => return Err(bad()),
                }
            }
            Self::add_term(&mut terms, m, coeff);
        }
        Ok(Self { terms })
    }
}

impl<K: PolyCoeff> Serialize for Poly<K>
{
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de, K: PolyCoeff> Deserialize<'de> for Poly<K>
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------

/// Evaluation homomorphism `a ↦ value_a`, `h ↦ value_h`, `i ↦ i` into `Q(i)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Specialization {
    pub value_a: FieldScalar,
    pub value_h: FieldScalar,
}

impl Specialization {
    pub fn new(value_a: FieldScalar, value_h: FieldScalar) -> Self {
        Self { value_a, value_h }
    }

    /// `a = 0 = h`, the specialization giving Khovanov-type homology.
    pub fn khovanov() -> Self {
        Self::new(FieldScalar::zero(), FieldScalar::zero())
    }

    pub fn from_ints(a: i64, h: i64) -> Self {
        Self::new(FieldScalar::from_ints(a, 0), FieldScalar::from_ints(h, 0))
    }

    /// A specialized element is invertible iff it is nonzero.
    pub fn is_unit(&self, x: &RingElem) -> bool {
        !x.specialize(self).is_zero()
    }

    /// Whether the specialization respects the q-grading (only `a = h = 0`).
    pub fn is_graded(&self) -> bool {
        self.value_a.is_zero() && self.value_h.is_zero()
    }
}

impl FromStr for Specialization {
    type Err = FoamError;

    /// Parses `a=<r>,h=<r>` where each value is a rational or `(re+imi)`.
    fn from_str(s: &str) -> Result<Self, FoamError> {
        let mut a = None;
        let mut h = None;
        for part in s.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| FoamError::Parse(format!("bad specialization `{s}`")))?;
            let v = v.trim();
            let val = if v.starts_with('(') {
                let (re, im) = split_gaussian(v)?;
                let p = |t: &str| {
                    t.parse::<BigRational>().map_err(|_| FoamError::Parse(format!("bad rational `{t}`")))
                };
                FieldScalar::new(p(re)?, p(&im)?)
            } else {
                let r = v
                    .parse::<BigRational>()
                    .map_err(|_| FoamError::Parse(format!("bad rational `{v}`")))?;
                FieldScalar::new(r, BigRational::zero())
            };
            match k.trim() {
                "a" => a = Some(val),
                "h" => h = Some(val),
                other => return Err(FoamError::Parse(format!("unknown variable `{other}`"))),
            }
        }
        Ok(Self::new(a.unwrap_or_default(), h.unwrap_or_default()))
    }
}
