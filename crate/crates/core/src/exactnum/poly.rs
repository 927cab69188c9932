//! Dense univariate polynomials over the rationals.
//!
//! Coefficients are stored low degree first and the vector never carries
//! trailing zeros, so the zero polynomial is the empty vector.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::RInterval;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    c: Vec<BigRational>,
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly::constant(BigRational::one())
    }

    pub fn x() -> Self {
        QPoly::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        QPoly::new(vec![c])
    }

    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn from_ints(c: &[BigInt]) -> Self {
        QPoly::new(c.iter().map(|x| BigRational::from_integer(x.clone())).collect())
    }

    /// `x^k - n`
    pub fn binomial(n: &BigInt, k: u32) -> Self {
        let mut c = vec![BigRational::zero(); k as usize + 1];
        c[0] = -BigRational::from_integer(n.clone());
        c[k as usize] = BigRational::one();
        QPoly::new(c)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.c.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> QPoly {
        QPoly { c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, k: &BigRational) -> QPoly {
        if k.is_zero() {
            return QPoly::zero();
        }
        QPoly { c: self.c.iter().map(|x| x * k).collect() }
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QPoly::new(c)
    }

    pub fn pow(&self, mut e: u32) -> QPoly {
        let mut base = self.clone();
        let mut acc = QPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let lead_inv = d.lead().recip();
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] * &lead_inv;
            if coef.is_zero() {
                continue;
            }
            for (j, dc) in d.c.iter().enumerate() {
                r[k + j] -= &coef * dc;
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (QPoly::new(q), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.divrem(d).1
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let l = self.lead().recip();
        self.scale(&l)
    }

    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s)` with `s * self ≡ g (mod m)` and `g = gcd(self, m)` monic.
    pub fn gcd_cofactor(&self, m: &QPoly) -> (QPoly, QPoly) {
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut s0, mut s1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        let l = r0.lead().recip();
        (r0.scale(&l), s0.scale(&l))
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn squarefree(&self) -> QPoly {
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_interval(&self, x: &RInterval) -> RInterval {
        let mut acc = RInterval::point(BigRational::zero());
        for c in self.c.iter().rev() {
            acc = acc.mul(x).add_scalar(c);
        }
        acc
    }

    /// Substitutes `x -> a*x + b`.
    pub fn compose_linear(&self, a: &BigRational, b: &BigRational) -> QPoly {
        let lin = QPoly::new(vec![b.clone(), a.clone()]);
        let mut acc = QPoly::zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(&lin).add(&QPoly::constant(c.clone()));
        }
        acc
    }

    /// Primitive integer polynomial proportional to `self` with positive leading coefficient.
    pub fn to_primitive_ints(&self) -> Vec<BigInt> {
        let mut den = BigInt::one();
        for c in &self.c {
            den = den.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = self.c.iter().map(|c| (c * &den).to_integer()).collect();
        let mut g = BigInt::zero();
        for x in &ints {
            g = g.gcd(x);
        }
        if !g.is_zero() {
            for x in ints.iter_mut() {
                *x = &*x / &g;
            }
        }
        if ints.last().is_some_and(|x| x.is_negative()) {
            for x in ints.iter_mut() {
                *x = -&*x;
            }
        }
        ints
    }

    pub fn sturm_sequence(&self) -> Vec<QPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_roots(&self, lo: &BigRational, hi: &BigRational) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let seq = self.sturm_sequence();
        let va = sign_changes(&seq, lo);
        let vb = sign_changes(&seq, hi);
        va.saturating_sub(vb)
    }

    /// Number of distinct real roots in the closed interval `[lo, hi]`.
    pub fn count_roots_closed(&self, lo: &BigRational, hi: &BigRational) -> usize {
        let extra = usize::from(self.eval(lo).is_zero());
        self.count_roots(lo, hi) + extra
    }

    /// Cauchy bound on the absolute value of every complex root.
    pub fn root_bound(&self) -> BigRational {
        let l = self.lead().abs();
        let mut m = BigRational::zero();
        for c in &self.c[..self.c.len().saturating_sub(1)] {
            let r = c.abs() / &l;
            if r > m {
                m = r;
            }
        }
        m + BigRational::one()
    }
}

fn sign_changes(seq: &[QPoly], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn p(c: &[i64]) -> QPoly {
        QPoly::new(c.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn divrem_reconstructs() {
        let a = p(&[1, -3, 0, 2, 5]);
        let b = p(&[2, 0, 1]);
        let (qq, r) = a.divrem(&b);
        assert_eq!(qq.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_and_cofactor() {
        // (x-1)(x+2) and (x-1)(x-3)
        let a = p(&[-2, 1, 1]);
        let m = p(&[3, -4, 1]);
        assert_eq!(a.gcd(&m), p(&[-1, 1]));
        let f = p(&[1, 1]);
        let m = p(&[-1, 1, 1, 1]);
        let (g, s) = f.gcd_cofactor(&m);
        assert_eq!(g, QPoly::one());
        assert_eq!(s.mul(&f).rem(&m), QPoly::one());
    }

    #[test]
    fn sturm_counts() {
        // x^3 - x has roots -1, 0, 1
        let f = p(&[0, -1, 0, 1]);
        assert_eq!(f.count_roots(&q(-2), &q(2)), 3);
        assert_eq!(f.count_roots(&q(-1), &q(1)), 2);
        assert_eq!(f.count_roots_closed(&q(-1), &q(1)), 3);
        let g = p(&[-1, 1, 1, 1]);
        let half = BigRational::new(1.into(), 2.into());
        let three_fifths = BigRational::new(3.into(), 5.into());
        assert_eq!(g.count_roots(&half, &three_fifths), 1);
        assert_eq!(g.count_roots(&q(-10), &q(10)), 1);
    }

    #[test]
    fn squarefree_and_primitive() {
        let f = p(&[1, -2, 1]).mul(&p(&[2, 1]));
        assert_eq!(f.squarefree(), p(&[-1, 1]).mul(&p(&[2, 1])));
        let h = QPoly::new(vec![BigRational::new(1.into(), 2.into()), q(0), BigRational::new((-3).into(), 4.into())]);
        let ints = h.to_primitive_ints();
        assert_eq!(ints, vec![BigInt::from(-2), BigInt::from(0), BigInt::from(3)]);
    }

    #[test]
    fn compose_linear_shifts() {
        let f = p(&[0, 0, 1]);
        // (2x + 1)^2
        assert_eq!(f.compose_linear(&q(2), &q(1)), p(&[1, 4, 4]));
    }
}
