//! Reals of the form `c₀ + c₁π + … + c_kπ^k` with exact algebraic
//! coefficients.
//!
//! Because π is transcendental, such a value is zero exactly when every
//! coefficient is zero, so equality stays exact; only the sign of a nonzero
//! value is found by interval evaluation with escalating precision.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::interval::{pi_enclosure, RInterval};
use super::{NumError, Scalar};

/// Starting precision for sign determination, in bits.
pub const START_BITS: u32 = 128;
/// Hard precision cap; beyond it comparisons report [`NumError::Undecidable`].
pub const MAX_BITS: u32 = 8192;

#[derive(Clone, Debug)]
pub struct PiPoly {
    /// Exact coefficients, lowest power of π first, no trailing zeros,
    /// degree at least one once normalized into a [`Scalar`].
    pub(crate) c: Vec<Scalar>,
}

impl PiPoly {
    pub fn pi() -> PiPoly {
        PiPoly { c: vec![Scalar::zero(), Scalar::one()] }
    }

    pub fn from_exact(s: Scalar) -> PiPoly {
        debug_assert!(s.is_exact());
        PiPoly { c: vec![s] }.trimmed()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.c
    }

    pub(crate) fn trimmed(mut self) -> PiPoly {
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
        self
    }

    /// Collapses to an exact scalar when π no longer occurs.
    pub(crate) fn normalize(self) -> Scalar {
        let p = self.trimmed();
        match p.c.len() {
            0 => Scalar::zero(),
            1 => p.c.into_iter().next().unwrap(),
            _ => Scalar::IntervalReal(p),
        }
    }

    pub(crate) fn try_add(&self, o: &PiPoly) -> Result<PiPoly, NumError> {
        let n = self.c.len().max(o.c.len());
        let z = Scalar::zero();
        let c = (0..n)
            .map(|i| self.c.get(i).unwrap_or(&z).try_add(o.c.get(i).unwrap_or(&z)))
            .collect::<Result<_, _>>()?;
        Ok(PiPoly { c })
    }

    pub(crate) fn neg(&self) -> PiPoly {
        PiPoly { c: self.c.iter().map(|x| x.neg()).collect() }
    }

    pub(crate) fn try_mul(&self, o: &PiPoly) -> Result<PiPoly, NumError> {
        if self.c.is_empty() || o.c.is_empty() {
            return Ok(PiPoly { c: Vec::new() });
        }
        let mut c = vec![Scalar::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].try_add(&a.try_mul(b)?)?;
            }
        }
        Ok(PiPoly { c })
    }

    pub(crate) fn try_scale_div(&self, d: &Scalar) -> Result<PiPoly, NumError> {
        let c = self.c.iter().map(|x| x.try_div(d)).collect::<Result<_, _>>()?;
        Ok(PiPoly { c })
    }

    /// Enclosure computed from `bits`-bit enclosures of π and of the coefficients.
    pub fn enclose(&self, bits: u32) -> RInterval {
        let work = bits + 16;
        let pi = pi_enclosure(work);
        let mut acc = RInterval::point(BigRational::from_integer(BigInt::from(0)));
        for c in self.c.iter().rev() {
            let ci = c.enclose_exact(work);
            acc = acc.mul(&pi).add(&ci).round_out(work);
        }
        acc
    }

    /// Sign of a nonzero value, escalating precision up to [`MAX_BITS`].
    pub fn signum(&self) -> Result<Ordering, NumError> {
        if self.c.iter().all(|x| x.is_zero()) {
            return Ok(Ordering::Equal);
        }
        let mut bits = START_BITS;
        while bits <= MAX_BITS {
            if let Some(s) = self.enclose(bits).strict_sign() {
                return Ok(s);
            }
            bits *= 2;
        }
        Err(NumError::Undecidable(MAX_BITS))
    }

    /// Enclosure narrower than `2^-bits` when reachable below the cap.
    pub fn enclose_to(&self, bits: u32) -> RInterval {
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let mut b = bits;
        loop {
            let e = self.enclose(b);
            if e.width() <= target || b >= MAX_BITS {
                return e;
            }
            b = (b * 2).min(MAX_BITS);
        }
    }
}
