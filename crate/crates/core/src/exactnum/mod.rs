//! Exact ordered-field arithmetic for plane normal vectors.
//!
//! A [`Scalar`] is a rational, an element of a real number field, or a
//! polynomial in π with exact coefficients. Equality is always exact; order
//! is exact for the first two kinds and found by escalating interval
//! precision for the third.

mod field;
mod interval;
mod parse;
mod poly;
mod real;
mod serial;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use field::{factor_rational, AlgNum, NumberField, DEGREE_CAP};
pub use interval::{pi_enclosure, rational_to_decimal, RInterval};
pub use parse::{parse_scalar, parse_vec3, Bindings};
pub use poly::QPoly;
pub use real::{PiPoly, MAX_BITS, START_BITS};
pub use serial::{scalar_from_json, scalar_to_json, vec3_from_json, vec3_to_json};

use field::RootValue;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum NumError {
    #[error("comparison undecidable at the {0}-bit precision cap")]
    Undecidable(u32),
    #[error("rational dimension is not decidable for interval reals")]
    UnsupportedScalar,
    #[error("inputs are incommensurable")]
    IncommensurableInputs,
    #[error("division by zero")]
    DivisionByZero,
    #[error("field degree {0} exceeds the cap of 64")]
    DegreeCap(usize),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("invalid algebraic number: {0}")]
    InvalidAlgebraic(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Exact real number.
#[derive(Clone)]
pub enum Scalar {
    Rational(BigRational),
    Algebraic(AlgNum),
    IntervalReal(PiPoly),
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Algebraic(a) => write!(f, "{a:?}≈{}", self.to_decimal(12)),
            Scalar::IntervalReal(p) => write!(f, "{:?}(π)≈{}", p.c, self.to_decimal(12)),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            _ => write!(f, "{}", self.to_decimal(30)),
        }
    }
}

/// Hashable exact identity of a rational or algebraic value; two values in
/// the same field have equal keys iff they are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarKey {
    field: u64,
    coords: Vec<BigRational>,
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Scalar {
        Scalar::Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Scalar {
        Scalar::Rational(BigRational::from_integer(n))
    }

    pub fn from_ratio(p: i64, q: i64) -> Scalar {
        Scalar::Rational(BigRational::new(p.into(), q.into()))
    }

    pub fn pi() -> Scalar {
        Scalar::IntervalReal(PiPoly::pi())
    }

    /// Principal square root of a nonnegative rational.
    pub fn sqrt(r: &BigRational) -> Result<Scalar, NumError> {
        Scalar::root(r, 2)
    }

    /// Real `k`-th root of a rational (principal for nonnegative input).
    pub fn root(r: &BigRational, k: u32) -> Result<Scalar, NumError> {
        // (p/q)^(1/k) = (p q^(k-1))^(1/k) / q
        let q = r.denom().clone();
        let n = r.numer() * num_traits::pow(q.clone(), k.saturating_sub(1) as usize);
        let base = match field::real_root(&n, k)? {
            RootValue::Rational(x) => Scalar::Rational(x),
            RootValue::Algebraic(a) => Scalar::Algebraic(a),
        };
        base.try_div(&Scalar::from_bigint(q))
    }

    /// The root of `poly` isolated by `[lo, hi]`.
    pub fn algebraic(poly: &QPoly, lo: &BigRational, hi: &BigRational) -> Result<Scalar, NumError> {
        Ok(match field::root_in_interval(poly, lo, hi)? {
            RootValue::Rational(x) => Scalar::Rational(x),
            RootValue::Algebraic(a) => Scalar::Algebraic(a),
        })
    }

    pub(crate) fn from_alg(a: AlgNum) -> Scalar {
        match a.as_rational() {
            Some(r) => Scalar::Rational(r),
            None => Scalar::Algebraic(a),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Algebraic(a) => a.is_zero(),
            Scalar::IntervalReal(p) => p.c.iter().all(|x| x.is_zero()),
        }
    }

    /// Rational or algebraic (as opposed to involving π).
    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::IntervalReal(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn number_field(&self) -> Option<&Arc<NumberField>> {
        match self {
            Scalar::Algebraic(a) => Some(&a.field),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Scalar::Rational(_) => "rational",
            Scalar::Algebraic(_) => "algebraic",
            Scalar::IntervalReal(_) => "interval_real",
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Algebraic(a) => Scalar::Algebraic(a.neg()),
            Scalar::IntervalReal(p) => Scalar::IntervalReal(p.neg()),
        }
    }

    fn as_pipoly(&self) -> PiPoly {
        match self {
            Scalar::IntervalReal(p) => p.clone(),
            s => PiPoly::from_exact(s.clone()),
        }
    }

    fn lift_pair(a: &AlgNum, b: &AlgNum) -> Result<(AlgNum, AlgNum), NumError> {
        if a.field.id() == b.field.id() {
            return Ok((a.clone(), b.clone()));
        }
        let c = field::compositum(&a.field, &b.field)?;
        Ok((a.lift(&c.field, &c.img_a), b.lift(&c.field, &c.img_b)))
    }

    pub fn try_add(&self, o: &Scalar) -> Result<Scalar, NumError> {
        use Scalar::*;
        Ok(match (self, o) {
            (Rational(a), Rational(b)) => Rational(a + b),
            (Rational(r), Algebraic(a)) | (Algebraic(a), Rational(r)) => Scalar::from_alg(a.add_rational(r)),
            (Algebraic(a), Algebraic(b)) => {
                let (a, b) = Scalar::lift_pair(a, b)?;
                Scalar::from_alg(a.add(&b))
            }
            _ => self.as_pipoly().try_add(&o.as_pipoly())?.normalize(),
        })
    }

    pub fn try_sub(&self, o: &Scalar) -> Result<Scalar, NumError> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &Scalar) -> Result<Scalar, NumError> {
        use Scalar::*;
        Ok(match (self, o) {
            (Rational(a), Rational(b)) => Rational(a * b),
            (Rational(r), Algebraic(a)) | (Algebraic(a), Rational(r)) => Scalar::from_alg(a.scale(r)),
            (Algebraic(a), Algebraic(b)) => {
                let (a, b) = Scalar::lift_pair(a, b)?;
                Scalar::from_alg(a.mul(&b))
            }
            _ => self.as_pipoly().try_mul(&o.as_pipoly())?.normalize(),
        })
    }

    pub fn try_recip(&self) -> Result<Scalar, NumError> {
        match self {
            _ if self.is_zero() => Err(NumError::DivisionByZero),
            Scalar::Rational(r) => Ok(Scalar::Rational(r.recip())),
            Scalar::Algebraic(a) => Ok(Scalar::from_alg(a.inv().ok_or(NumError::DivisionByZero)?)),
            Scalar::IntervalReal(_) => {
                Err(NumError::Unsupported("division by a value involving pi".into()))
            }
        }
    }

    pub fn try_div(&self, o: &Scalar) -> Result<Scalar, NumError> {
        if o.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        match (self, o) {
            (Scalar::IntervalReal(p), d) if d.is_exact() => Ok(p.try_scale_div(d)?.normalize()),
            _ => self.try_mul(&o.try_recip()?),
        }
    }

    pub fn pow(&self, e: i64) -> Result<Scalar, NumError> {
        let base = if e < 0 { self.try_recip()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.try_mul(&base)?;
        }
        Ok(acc)
    }

    /// Sign of the value.
    pub fn signum(&self) -> Result<Ordering, NumError> {
        match self {
            Scalar::Rational(r) => Ok(r.cmp(&BigRational::zero())),
            Scalar::Algebraic(a) => Ok(a.signum()),
            Scalar::IntervalReal(p) => p.signum(),
        }
    }

    pub fn is_positive(&self) -> Result<bool, NumError> {
        Ok(self.signum()? == Ordering::Greater)
    }

    pub fn is_negative(&self) -> Result<bool, NumError> {
        Ok(self.signum()? == Ordering::Less)
    }

    pub(crate) fn enclose_exact(&self, bits: u32) -> RInterval {
        match self {
            Scalar::Rational(r) => RInterval::point(r.clone()),
            Scalar::Algebraic(a) => a.enclose(bits),
            Scalar::IntervalReal(p) => p.enclose(bits),
        }
    }

    /// Enclosure of width at most `2^-bits` (for values involving π, as
    /// narrow as the precision cap permits).
    pub fn enclose(&self, bits: u32) -> RInterval {
        match self {
            Scalar::IntervalReal(p) => p.enclose_to(bits),
            s => s.enclose_exact(bits),
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        match self {
            Scalar::Rational(r) => rational_to_decimal(r, digits),
            _ => {
                // magnitude first, then enough bits for the requested digits
                let rough = self.enclose(16);
                let mag = rough.lo.abs().max(rough.hi.abs());
                let mut extra = 0u32;
                let mut t = mag;
                let two = BigRational::from_integer(BigInt::from(2));
                while t < BigRational::one() && extra < 100_000 {
                    t *= &two;
                    extra += 1;
                }
                let bits = (digits as f64 * 3.33) as u32 + 16 + extra;
                self.enclose(bits).to_decimal(digits)
            }
        }
    }

    /// Nearest `f64`, for display and heuristics only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.enclose(64).midpoint().to_f64().unwrap_or(f64::NAN)
    }

    /// Hashable identity for rational and algebraic values.
    pub fn key(&self) -> Option<ScalarKey> {
        match self {
            Scalar::Rational(r) => Some(ScalarKey { field: 0, coords: vec![r.clone()] }),
            Scalar::Algebraic(a) => Some(ScalarKey { field: a.field.id(), coords: a.coordinates() }),
            Scalar::IntervalReal(_) => None,
        }
    }

    fn collect_fields(&self, out: &mut Vec<Arc<NumberField>>) {
        match self {
            Scalar::Rational(_) => {}
            Scalar::Algebraic(a) => {
                if !out.iter().any(|f| f.id() == a.field.id()) {
                    out.push(a.field.clone());
                }
            }
            Scalar::IntervalReal(p) => p.c.iter().for_each(|c| c.collect_fields(out)),
        }
    }

    fn rewrite_field(&self, images: &HashMap<u64, AlgNum>) -> Scalar {
        match self {
            Scalar::Rational(_) => self.clone(),
            Scalar::Algebraic(a) => {
                let img = &images[&a.field.id()];
                let mut acc = AlgNum::new(img.field.clone(), QPoly::zero());
                for c in a.c.coeffs().iter().rev() {
                    acc = acc.mul(img).add_rational(c);
                }
                Scalar::from_alg(acc)
            }
            Scalar::IntervalReal(p) => {
                PiPoly { c: p.c.iter().map(|c| c.rewrite_field(images)).collect() }.normalize()
            }
        }
    }
}

/// Rewrites all values over one common number field, so later arithmetic
/// between them never needs a compositum.
pub fn unify_fields(values: &[Scalar]) -> Result<Vec<Scalar>, NumError> {
    let mut fields = Vec::new();
    for v in values {
        v.collect_fields(&mut fields);
    }
    if fields.len() <= 1 {
        return Ok(values.to_vec());
    }
    let mut current = fields[0].clone();
    let mut images: HashMap<u64, AlgNum> = HashMap::new();
    images.insert(current.id(), AlgNum::generator(current.clone()));
    for f in &fields[1..] {
        if images.contains_key(&f.id()) {
            continue;
        }
        let c = field::compositum(&current, f)?;
        for img in images.values_mut() {
            *img = img.lift(&c.field, &c.img_a);
        }
        images.insert(f.id(), AlgNum::new(c.field.clone(), c.img_b.clone()));
        current = c.field;
    }
    Ok(values.iter().map(|v| v.rewrite_field(&images)).collect())
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        self.try_sub(o).expect("field degree cap exceeded while testing equality").is_zero()
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                self.$try(o).unwrap_or_else(|e| panic!("scalar arithmetic failed: {e}"))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Scalar {
        Scalar::Rational(r)
    }
}

/// Exact comparison; values involving π are separated by escalating
/// interval precision and may report [`NumError::Undecidable`].
pub fn compare(a: &Scalar, b: &Scalar) -> Result<Ordering, NumError> {
    a.try_sub(b)?.signum()
}

/// Dimension of the ℚ-span of `values`.
pub fn rational_dimension(values: &[Scalar]) -> Result<usize, NumError> {
    if values.iter().any(|v| !v.is_exact()) {
        return Err(NumError::UnsupportedScalar);
    }
    let vals = unify_fields(values)?;
    let deg = vals.iter().filter_map(|v| v.number_field()).map(|f| f.degree()).max().unwrap_or(1);
    let rows: Vec<Vec<BigRational>> = vals
        .iter()
        .map(|v| match v {
            Scalar::Rational(r) => {
                let mut row = vec![BigRational::zero(); deg];
                row[0] = r.clone();
                row
            }
            Scalar::Algebraic(a) => a.coordinates(),
            Scalar::IntervalReal(_) => unreachable!(),
        })
        .collect();
    Ok(crate::linalg::rank(&rows))
}

/// Dimension over ℚ of the span of two nonnegative scalars; unlike
/// [`rational_dimension`] this also handles polynomials in π.
pub fn pair_dimension(a: &Scalar, b: &Scalar) -> Result<usize, NumError> {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => Ok(0),
        (true, false) | (false, true) => Ok(1),
        _ => match gcd_ext(a, b) {
            Ok(_) => Ok(1),
            Err(NumError::IncommensurableInputs) => Ok(2),
            Err(e) => Err(e),
        },
    }
}

/// Positive generator of `aℤ + bℤ` for nonnegative commensurable `a`, `b`.
pub fn gcd_ext(a: &Scalar, b: &Scalar) -> Result<Scalar, NumError> {
    if a.is_negative()? || b.is_negative()? {
        return Err(NumError::InvalidArgument("gcd_ext needs nonnegative inputs".into()));
    }
    if a.is_zero() && b.is_zero() {
        return Err(NumError::InvalidArgument("gcd_ext(0, 0) is undefined".into()));
    }
    if a.is_zero() {
        return Ok(b.clone());
    }
    if b.is_zero() {
        return Ok(a.clone());
    }
    if !a.is_exact() || !b.is_exact() {
        // the ratio of two π-polynomials is rational iff they are proportional
        let (pa, pb) = (a.as_pipoly(), b.as_pipoly());
        if pa.c.len() != pb.c.len() {
            return Err(NumError::IncommensurableInputs);
        }
        let lead = pb.c.last().unwrap().try_div(pa.c.last().unwrap())?;
        let scaled = pa.try_mul(&PiPoly::from_exact(lead.clone()))?;
        if !pb.try_add(&scaled.neg())?.normalize().is_zero() {
            return Err(NumError::IncommensurableInputs);
        }
        return gcd_from_ratio(a, &lead);
    }
    let q = b.try_div(a)?;
    gcd_from_ratio(a, &q)
}

fn gcd_from_ratio(a: &Scalar, q: &Scalar) -> Result<Scalar, NumError> {
    let Scalar::Rational(q) = q else {
        return Err(NumError::IncommensurableInputs);
    };
    // a·ℤ + a(p/r)·ℤ = (a/r)·ℤ when gcd(p, r) = 1
    a.try_div(&Scalar::from_bigint(q.denom().clone()))
}

/// Triple of scalars sharing one number field.
#[derive(Clone, Debug, PartialEq)]
pub struct Vec3(pub [Scalar; 3]);

impl Vec3 {
    pub fn new(a: Scalar, b: Scalar, c: Scalar) -> Result<Vec3, NumError> {
        let u = unify_fields(&[a, b, c])?;
        Ok(Vec3([u[0].clone(), u[1].clone(), u[2].clone()]))
    }

    pub fn from_ints(v: [i64; 3]) -> Vec3 {
        Vec3(v.map(Scalar::from_int))
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(|x| x.is_exact())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn l1(&self) -> Scalar {
        // callers keep coordinates nonnegative; sign-aware sum otherwise
        let abs = |x: &Scalar| if x.is_negative().unwrap_or(false) { x.neg() } else { x.clone() };
        &(&abs(&self.0[0]) + &abs(&self.0[1])) + &abs(&self.0[2])
    }

    pub fn sum(&self) -> Scalar {
        &(&self.0[0] + &self.0[1]) + &self.0[2]
    }

    /// ⟨x, v⟩ for an integer vector `x`.
    pub fn dot_int(&self, x: &[i64; 3]) -> Scalar {
        let mut acc = Scalar::zero();
        for (c, &k) in self.0.iter().zip(x.iter()) {
            if k != 0 {
                acc = &acc + &(c * &Scalar::from_int(k));
            }
        }
        acc
    }

    /// `0 ≤ v₁ ≤ v₂ ≤ v₃`.
    pub fn is_sorted_nonneg(&self) -> Result<bool, NumError> {
        Ok(!self.0[0].is_negative()?
            && compare(&self.0[0], &self.0[1])? != Ordering::Greater
            && compare(&self.0[1], &self.0[2])? != Ordering::Greater)
    }

    /// Sorts ascending and returns the permutation applied (`out[k] = in[perm[k]]`).
    pub fn sorted(&self) -> Result<(Vec3, [usize; 3]), NumError> {
        let mut idx = [0usize, 1, 2];
        // insertion sort with fallible comparisons
        for i in 1..3 {
            let mut j = i;
            while j > 0 && compare(&self.0[idx[j - 1]], &self.0[idx[j]])? == Ordering::Greater {
                idx.swap(j - 1, j);
                j -= 1;
            }
        }
        Ok((Vec3(idx.map(|i| self.0[i].clone())), idx))
    }

    /// Canonical key of the ray through `self`, for exact coordinates.
    pub fn projective_key(&self) -> Option<Vec<ScalarKey>> {
        if !self.is_exact() {
            return None;
        }
        let s = self.sum();
        if s.is_zero() {
            return None;
        }
        let inv = s.try_recip().ok()?;
        self.0.iter().map(|x| (x * &inv).key()).collect()
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.0[0].to_f64(), self.0[1].to_f64(), self.0[2].to_f64()]
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Scalar {
        parse_scalar(text, &Bindings::new()).unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&s("1/2"), &s("1/2")).unwrap(), Ordering::Equal);
        assert_eq!(compare(&s("sqrt(13)"), &s("18/5")).unwrap(), Ordering::Greater);
        let mut env = Bindings::new();
        env.insert("a".into(), s("algebraic(-1,1,1,1; 1/2, 3/5)"));
        let v = parse_scalar("a^3 + a^2 + a", &env).unwrap();
        assert_eq!(compare(&v, &Scalar::one()).unwrap(), Ordering::Equal);
    }

    #[test]
    fn rational_dimension_examples() {
        assert_eq!(rational_dimension(&[s("1"), s("2"), s("4")]).unwrap(), 1);
        assert_eq!(rational_dimension(&[s("1"), s("sqrt(2)")]).unwrap(), 2);
        let mut env = Bindings::new();
        env.insert("a".into(), s("algebraic(-1,1,1,1; 1/2, 3/5)"));
        let v = parse_vec3("1, 1+a, 1+a+a^2", &env).unwrap();
        assert_eq!(rational_dimension(&v.0).unwrap(), 3);
        assert_eq!(rational_dimension(&[s("sqrt(13)"), s("sqrt(17)"), s("sqrt(13)+2*sqrt(17)")]).unwrap(), 2);
        assert_eq!(rational_dimension(&[s("pi")]), Err(NumError::UnsupportedScalar));
    }

    #[test]
    fn gcd_ext_examples() {
        assert_eq!(gcd_ext(&s("4"), &s("6")).unwrap(), s("2"));
        assert_eq!(gcd_ext(&s("sqrt(2)"), &s("3*sqrt(2)/2")).unwrap(), s("sqrt(2)/2"));
        assert_eq!(gcd_ext(&s("0"), &s("5/3")).unwrap(), s("5/3"));
        assert_eq!(gcd_ext(&s("1"), &s("sqrt(2)")), Err(NumError::IncommensurableInputs));
        assert_eq!(gcd_ext(&s("2*pi"), &s("3*pi")).unwrap(), s("pi"));
    }

    #[test]
    fn pi_values_compare_and_cancel() {
        let a = s("2*pi - 98*root(10,3) + 208");
        assert!(a.is_positive().unwrap());
        assert!(s("pi - pi").is_zero());
        assert_eq!(compare(&s("pi"), &s("355/113")).unwrap(), Ordering::Less);
        assert_eq!(compare(&s("pi"), &s("22/7")).unwrap(), Ordering::Less);
        assert_eq!(compare(&s("pi*pi"), &s("987/100")).unwrap(), Ordering::Less);
    }

    #[test]
    fn mixed_fields_unify() {
        let v = Vec3::new(s("1"), s("sqrt(13)"), s("sqrt(17)")).unwrap();
        let f1 = v.0[1].number_field().unwrap().id();
        let f2 = v.0[2].number_field().unwrap().id();
        assert_eq!(f1, f2);
        assert_eq!(&v.0[1] * &v.0[1], s("13"));
        assert!(v.is_sorted_nonneg().unwrap());
    }

    #[test]
    fn sorting_reports_permutation() {
        let v = Vec3::new(s("3"), s("sqrt(2)"), s("0")).unwrap();
        let (w, p) = v.sorted().unwrap();
        assert_eq!(p, [2, 1, 0]);
        assert_eq!(w.0[0], s("0"));
        assert!(w.is_sorted_nonneg().unwrap());
    }
}
