//! Real number fields ℚ(θ) given by an irreducible minimal polynomial and an
//! isolating interval, elements in the power basis, and pairwise composita.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::{Arc, Mutex, RwLock};

use algebraics::polynomial::Polynomial;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::RInterval;
use super::poly::QPoly;
use super::NumError;
use crate::linalg;

/// Largest field degree the library will construct.
pub const DEGREE_CAP: usize = 64;

pub struct NumberField {
    id: u64,
    minpoly: QPoly,
    isolating: RInterval,
    enclosure: RwLock<RInterval>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField#{}({:?})", self.id, self.minpoly)
    }
}

impl PartialEq for NumberField {
    fn eq(&self, o: &Self) -> bool {
        self.id == o.id
    }
}

impl Eq for NumberField {}

static NEXT_FIELD_ID: AtomicU64 = AtomicU64::new(1);
static FIELDS: Mutex<Vec<Arc<NumberField>>> = Mutex::new(Vec::new());

impl NumberField {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap_or(0)
    }

    pub fn minpoly(&self) -> &QPoly {
        &self.minpoly
    }

    /// The interval the field was registered with.
    pub fn isolating_interval(&self) -> &RInterval {
        &self.isolating
    }

    /// Returns the unique field for the root of `minpoly` inside `iv`.
    /// `minpoly` must be monic and irreducible of degree ≥ 2 and `iv` must
    /// contain exactly one of its roots.
    pub(crate) fn intern(minpoly: QPoly, iv: RInterval) -> Arc<NumberField> {
        let mut fields = FIELDS.lock().unwrap();
        for f in fields.iter() {
            if f.minpoly != minpoly {
                continue;
            }
            let lo = (&f.isolating.lo).max(&iv.lo).clone();
            let hi = (&f.isolating.hi).min(&iv.hi).clone();
            if lo <= hi && minpoly.count_roots_closed(&lo, &hi) >= 1 {
                return f.clone();
            }
        }
        let f = Arc::new(NumberField {
            id: NEXT_FIELD_ID.fetch_add(1, AtomicOrdering::Relaxed),
            minpoly,
            isolating: iv.clone(),
            enclosure: RwLock::new(iv),
        });
        fields.push(f.clone());
        f
    }

    /// Enclosure of the generating root of width at most `2^-bits`.
    pub fn root_enclosure(&self, bits: u32) -> RInterval {
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        {
            let cur = self.enclosure.read().unwrap();
            if cur.width() <= target {
                return cur.clone();
            }
        }
        let mut iv = self.enclosure.read().unwrap().clone();
        let p = &self.minpoly;
        // The root is simple and irrational, so p changes sign across it and
        // never vanishes at a rational endpoint.
        let s_lo = p.eval(&iv.lo).is_positive();
        while iv.width() > target {
            let mid = iv.midpoint().round_dyadic(bits + 8);
            let mid = if mid <= iv.lo || mid >= iv.hi { iv.midpoint() } else { mid };
            let v = p.eval(&mid);
            if v.is_zero() {
                // only possible for a rational root, excluded by irreducibility
                return RInterval::point(mid);
            }
            if v.is_positive() == s_lo {
                iv.lo = mid;
            } else {
                iv.hi = mid;
            }
        }
        let mut w = self.enclosure.write().unwrap();
        if iv.width() < w.width() {
            *w = iv.clone();
        }
        iv
    }
}

trait RoundDyadic {
    fn round_dyadic(&self, bits: u32) -> BigRational;
}

impl RoundDyadic for BigRational {
    fn round_dyadic(&self, bits: u32) -> BigRational {
        let scale = BigInt::one() << bits;
        let n = (self * BigRational::from_integer(scale.clone())).round().to_integer();
        BigRational::new(n, scale)
    }
}

/// Monic irreducible factors of a nonzero rational polynomial (multiplicities dropped).
pub fn factor_rational(p: &QPoly) -> Vec<QPoly> {
    let ints = p.to_primitive_ints();
    if ints.len() <= 1 {
        return Vec::new();
    }
    let poly: Polynomial<BigInt> = ints.into();
    let factors = poly.factor();
    factors
        .polynomial_factors
        .into_iter()
        .map(|f| {
            let c: Vec<BigInt> = f.polynomial.into_coefficients();
            QPoly::from_ints(&c).monic()
        })
        .collect()
}

/// An element of a number field, stored as a polynomial in the generator of
/// degree below the field degree.
#[derive(Clone)]
pub struct AlgNum {
    pub(crate) field: Arc<NumberField>,
    pub(crate) c: QPoly,
}

impl fmt::Debug for AlgNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}] in #{}", self.c, self.field.id)
    }
}

impl AlgNum {
    pub fn new(field: Arc<NumberField>, c: QPoly) -> AlgNum {
        let c = c.rem(&field.minpoly);
        AlgNum { field, c }
    }

    pub fn generator(field: Arc<NumberField>) -> AlgNum {
        AlgNum::new(field, QPoly::x())
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &QPoly {
        &self.c
    }

    /// Power-basis coordinates, padded to the field degree.
    pub fn coordinates(&self) -> Vec<BigRational> {
        (0..self.field.degree()).map(|i| self.c.coeff(i)).collect()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.c.degree() {
            None => Some(BigRational::zero()),
            Some(0) => Some(self.c.coeff(0)),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero()
    }

    fn same(&self, o: &AlgNum) {
        debug_assert_eq!(self.field.id, o.field.id, "mixing number fields without lifting");
    }

    pub fn add(&self, o: &AlgNum) -> AlgNum {
        self.same(o);
        AlgNum { field: self.field.clone(), c: self.c.add(&o.c) }
    }

    pub fn sub(&self, o: &AlgNum) -> AlgNum {
        self.same(o);
        AlgNum { field: self.field.clone(), c: self.c.sub(&o.c) }
    }

    pub fn neg(&self) -> AlgNum {
        AlgNum { field: self.field.clone(), c: self.c.neg() }
    }

    pub fn mul(&self, o: &AlgNum) -> AlgNum {
        self.same(o);
        AlgNum::new(self.field.clone(), self.c.mul(&o.c))
    }

    pub fn add_rational(&self, r: &BigRational) -> AlgNum {
        AlgNum { field: self.field.clone(), c: self.c.add(&QPoly::constant(r.clone())) }
    }

    pub fn scale(&self, r: &BigRational) -> AlgNum {
        AlgNum { field: self.field.clone(), c: self.c.scale(r) }
    }

    pub fn inv(&self) -> Option<AlgNum> {
        if self.is_zero() {
            return None;
        }
        let (g, s) = self.c.gcd_cofactor(&self.field.minpoly);
        debug_assert_eq!(g, QPoly::one());
        Some(AlgNum::new(self.field.clone(), s))
    }

    /// Enclosure of the real value with width at most `2^-bits`.
    pub fn enclose(&self, bits: u32) -> RInterval {
        if let Some(r) = self.as_rational() {
            return RInterval::point(r);
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let mut guard = 16 + 2 * self.field.degree() as u32;
        loop {
            let work = bits + guard;
            let theta = self.field.root_enclosure(work);
            let mut acc = RInterval::point(BigRational::zero());
            for c in self.c.coeffs().iter().rev() {
                acc = acc.mul(&theta).add_scalar(c).round_out(work + 4);
            }
            if acc.width() <= target {
                return acc;
            }
            guard *= 2;
        }
    }

    /// Sign of a field element; exact because the element is known to be
    /// nonzero unless its coordinate vector vanishes.
    pub fn signum(&self) -> std::cmp::Ordering {
        if self.is_zero() {
            return std::cmp::Ordering::Equal;
        }
        let mut bits = 32u32;
        loop {
            if let Some(s) = self.enclose(bits).strict_sign() {
                return s;
            }
            bits = bits.checked_mul(2).expect("sign determination ran away");
        }
    }

    /// Re-expresses this element in a larger field via `theta ↦ img`.
    pub(crate) fn lift(&self, target: &Arc<NumberField>, img: &QPoly) -> AlgNum {
        let m = &target.minpoly;
        let mut acc = QPoly::zero();
        for c in self.c.coeffs().iter().rev() {
            acc = acc.mul(img).rem(m).add(&QPoly::constant(c.clone()));
        }
        AlgNum { field: target.clone(), c: acc }
    }
}

/// Common field of two fields together with the images of both generators.
#[derive(Clone, Debug)]
pub struct Compositum {
    pub field: Arc<NumberField>,
    pub img_a: QPoly,
    pub img_b: QPoly,
}

type CompositumCache = HashMap<(u64, u64), Result<Compositum, NumError>>;
static COMPOSITA: Mutex<Option<CompositumCache>> = Mutex::new(None);

pub fn compositum(a: &Arc<NumberField>, b: &Arc<NumberField>) -> Result<Compositum, NumError> {
    if a.id == b.id {
        return Ok(Compositum { field: a.clone(), img_a: QPoly::x(), img_b: QPoly::x() });
    }
    let key = (a.id, b.id);
    if let Some(r) = COMPOSITA.lock().unwrap().get_or_insert_with(HashMap::new).get(&key) {
        return r.clone();
    }
    let r = build_compositum(a, b);
    COMPOSITA.lock().unwrap().get_or_insert_with(HashMap::new).insert(key, r.clone());
    r
}

/// Multiplies a tensor element (index `i*d2 + j` for θ₁^i θ₂^j) by θ₁ or θ₂.
fn tensor_shift(v: &[BigRational], m: &QPoly, d1: usize, d2: usize, first: bool) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); d1 * d2];
    let d = if first { d1 } else { d2 };
    for i in 0..d1 {
        for j in 0..d2 {
            let c = &v[i * d2 + j];
            if c.is_zero() {
                continue;
            }
            let (e, other) = if first { (i + 1, j) } else { (j + 1, i) };
            let idx = |e: usize| if first { e * d2 + other } else { other * d2 + e };
            if e < d {
                out[idx(e)] += c;
            } else {
                for t in 0..d {
                    out[idx(t)] -= c * m.coeff(t);
                }
            }
        }
    }
    out
}

fn build_compositum(a: &Arc<NumberField>, b: &Arc<NumberField>) -> Result<Compositum, NumError> {
    let (d1, d2) = (a.degree(), b.degree());
    let dim = d1 * d2;
    if dim > DEGREE_CAP {
        return Err(NumError::DegreeCap(dim));
    }
    let mut unit = vec![BigRational::zero(); dim];
    unit[0] = BigRational::one();
    let mut theta_a = vec![BigRational::zero(); dim];
    theta_a[d2] = BigRational::one();
    let mut theta_b = vec![BigRational::zero(); dim];
    theta_b[1] = BigRational::one();

    for k in 1..=(4 * dim as i64 + 8) {
        let kq = BigRational::from_integer(BigInt::from(k));
        // powers of γ = θ₁ + kθ₂ in the tensor algebra
        let mut powers = vec![unit.clone()];
        for _ in 0..dim {
            let last = powers.last().unwrap();
            let x = tensor_shift(last, &a.minpoly, d1, d2, true);
            let y = tensor_shift(last, &b.minpoly, d1, d2, false);
            powers.push(x.iter().zip(&y).map(|(p, q)| p + q * &kq).collect());
        }
        // columns are the powers γ^0..γ^{dim-1}
        let mat: Vec<Vec<BigRational>> =
            (0..dim).map(|r| (0..dim).map(|c| powers[c][r].clone()).collect()).collect();
        let Some(coef) = linalg::solve(&mat, &powers[dim]) else {
            continue;
        };
        let (Some(ha), Some(hb)) = (linalg::solve(&mat, &theta_a), linalg::solve(&mat, &theta_b)) else {
            continue;
        };
        let mut cp: Vec<BigRational> = coef.iter().map(|c| -c).collect();
        cp.push(BigRational::one());
        let charpoly = QPoly::new(cp);
        let factors = factor_rational(&charpoly);
        // locate the factor vanishing at the real γ
        let mut bits = 32;
        loop {
            let ea = a.root_enclosure(bits);
            let eb = b.root_enclosure(bits);
            let g = ea.add(&eb.mul_scalar(&kq));
            let hits: Vec<&QPoly> =
                factors.iter().filter(|f| f.count_roots_closed(&g.lo, &g.hi) > 0).collect();
            let total: usize = hits.iter().map(|f| f.count_roots_closed(&g.lo, &g.hi)).sum();
            if hits.len() == 1 && total == 1 {
                let g_poly = hits[0].clone();
                if g_poly.degree().unwrap_or(0) > DEGREE_CAP {
                    return Err(NumError::DegreeCap(g_poly.degree().unwrap()));
                }
                let field = NumberField::intern(g_poly.clone(), g);
                let img_a = QPoly::new(ha).rem(&g_poly);
                let img_b = QPoly::new(hb).rem(&g_poly);
                return Ok(Compositum { field, img_a, img_b });
            }
            bits *= 2;
            if bits > 1 << 16 {
                return Err(NumError::Unsupported("could not isolate compositum generator".into()));
            }
        }
    }
    Err(NumError::Unsupported("no primitive element found for compositum".into()))
}

/// Builds the field element for the real root of `p` inside `[lo, hi]`;
/// returns the rational root directly when the relevant factor is linear.
pub fn root_in_interval(p: &QPoly, lo: &BigRational, hi: &BigRational) -> Result<RootValue, NumError> {
    if p.degree().unwrap_or(0) == 0 {
        return Err(NumError::InvalidAlgebraic("polynomial must be nonconstant".into()));
    }
    if lo > hi {
        return Err(NumError::InvalidAlgebraic("empty interval".into()));
    }
    let sf = p.squarefree();
    if sf.count_roots_closed(lo, hi) != 1 {
        return Err(NumError::InvalidAlgebraic(format!(
            "interval [{lo}, {hi}] must contain exactly one root, found {}",
            sf.count_roots_closed(lo, hi)
        )));
    }
    for f in factor_rational(p) {
        if f.count_roots_closed(lo, hi) == 1 {
            if f.degree() == Some(1) {
                return Ok(RootValue::Rational(-f.coeff(0)));
            }
            if f.degree().unwrap() > DEGREE_CAP {
                return Err(NumError::DegreeCap(f.degree().unwrap()));
            }
            let field = NumberField::intern(f, RInterval::new(lo.clone(), hi.clone()));
            return Ok(RootValue::Algebraic(AlgNum::generator(field)));
        }
    }
    Err(NumError::InvalidAlgebraic("factorization lost the root".into()))
}

pub enum RootValue {
    Rational(BigRational),
    Algebraic(AlgNum),
}

/// The real `k`-th root of `n` (principal for `n ≥ 0`, negative for odd `k`).
pub fn real_root(n: &BigInt, k: u32) -> Result<RootValue, NumError> {
    if k == 0 {
        return Err(NumError::InvalidAlgebraic("root index must be positive".into()));
    }
    if n.is_zero() {
        return Ok(RootValue::Rational(BigRational::zero()));
    }
    if n.is_negative() && k % 2 == 0 {
        return Err(NumError::InvalidAlgebraic("even root of a negative number".into()));
    }
    let p = QPoly::binomial(n, k);
    let bound = BigRational::from_integer(n.abs() + BigInt::one());
    let (lo, hi) = if n.is_positive() { (BigRational::zero(), bound) } else { (-bound, BigRational::zero()) };
    // zero is never a root here, so the closed interval is safe
    root_in_interval(&p, &lo, &hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn alg(v: RootValue) -> AlgNum {
        match v {
            RootValue::Algebraic(a) => a,
            RootValue::Rational(_) => panic!("expected irrational"),
        }
    }

    #[test]
    fn sqrt_square_is_rational() {
        let s = alg(real_root(&BigInt::from(13), 2).unwrap());
        assert_eq!(s.mul(&s).as_rational(), Some(q(13, 1)));
        assert!(matches!(real_root(&BigInt::from(16), 2).unwrap(), RootValue::Rational(r) if r == q(4, 1)));
        assert!(matches!(real_root(&BigInt::from(-27), 3).unwrap(), RootValue::Rational(r) if r == q(-3, 1)));
    }

    #[test]
    fn interning_identifies_equal_roots() {
        let a = alg(real_root(&BigInt::from(2), 2).unwrap());
        let p = QPoly::new(vec![q(-2, 1), q(0, 1), q(1, 1)]);
        let b = alg(root_in_interval(&p, &q(7, 5), &q(3, 2)).unwrap());
        assert_eq!(a.field.id(), b.field.id());
        let c = alg(root_in_interval(&p, &q(-2, 1), &q(-1, 1)).unwrap());
        assert_ne!(a.field.id(), c.field.id());
        assert_eq!(c.signum(), std::cmp::Ordering::Less);
    }

    #[test]
    fn inverse_and_enclosure() {
        let p = QPoly::new(vec![q(-1, 1), q(1, 1), q(1, 1), q(1, 1)]);
        let a = alg(root_in_interval(&p, &q(1, 2), &q(3, 5)).unwrap());
        let inv = a.inv().unwrap();
        assert_eq!(inv.mul(&a).as_rational(), Some(q(1, 1)));
        let e = a.enclose(100);
        assert!(e.lo > q(5436, 10000) && e.hi < q(5437, 10000));
    }

    #[test]
    fn compositum_of_two_square_roots() {
        let s13 = alg(real_root(&BigInt::from(13), 2).unwrap());
        let s17 = alg(real_root(&BigInt::from(17), 2).unwrap());
        let c = compositum(&s13.field, &s17.field).unwrap();
        assert_eq!(c.field.degree(), 4);
        let a = s13.lift(&c.field, &c.img_a);
        let b = s17.lift(&c.field, &c.img_b);
        assert_eq!(a.mul(&a).as_rational(), Some(q(13, 1)));
        assert_eq!(b.mul(&b).as_rational(), Some(q(17, 1)));
        assert_eq!(a.signum(), std::cmp::Ordering::Greater);
        assert_eq!(b.sub(&a).signum(), std::cmp::Ordering::Greater);
        let e = b.enclose(60);
        assert!(e.lo > q(41231, 10000) && e.hi < q(41232, 10000));
    }

    #[test]
    fn compositum_with_shared_subfield() {
        // ℚ(√2) ⊂ ℚ(√2 + √3)
        let s2 = alg(real_root(&BigInt::from(2), 2).unwrap());
        let p = QPoly::new(vec![q(1, 1), q(0, 1), q(-10, 1), q(0, 1), q(1, 1)]);
        let t = alg(root_in_interval(&p, &q(3, 1), &q(7, 2)).unwrap());
        let c = compositum(&s2.field, &t.field).unwrap();
        assert_eq!(c.field.degree(), 4);
        let a = s2.lift(&c.field, &c.img_a);
        assert_eq!(a.mul(&a).as_rational(), Some(q(2, 1)));
        let e = a.enclose(40);
        assert!(e.lo > q(14142, 10000) && e.hi < q(14143, 10000));
    }
}
