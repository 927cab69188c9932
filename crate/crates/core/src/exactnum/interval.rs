//! Closed rational intervals with optional outward dyadic rounding, and
//! certified enclosures of π.

use std::cmp::Ordering;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RInterval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Sign of every point of the interval, if they agree and are nonzero.
    pub fn strict_sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn add(&self, o: &RInterval) -> RInterval {
        RInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &RInterval) -> RInterval {
        RInterval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> RInterval {
        RInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn add_scalar(&self, c: &BigRational) -> RInterval {
        RInterval { lo: &self.lo + c, hi: &self.hi + c }
    }

    pub fn mul_scalar(&self, c: &BigRational) -> RInterval {
        if c.is_negative() {
            RInterval { lo: &self.hi * c, hi: &self.lo * c }
        } else {
            RInterval { lo: &self.lo * c, hi: &self.hi * c }
        }
    }

    pub fn mul(&self, o: &RInterval) -> RInterval {
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = p.iter().min().cloned().unwrap();
        let hi = p.iter().max().cloned().unwrap();
        RInterval { lo, hi }
    }

    /// Rounds the endpoints outward to multiples of `2^-bits`.
    pub fn round_out(&self, bits: u32) -> RInterval {
        let scale = BigInt::one() << bits;
        let lo = (&self.lo * &scale).floor().to_integer();
        let hi = (&self.hi * &scale).ceil().to_integer();
        let den = BigRational::from_integer(scale);
        RInterval {
            lo: BigRational::from_integer(lo) / &den,
            hi: BigRational::from_integer(hi) / &den,
        }
    }

    /// Decimal rendering of the midpoint with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        rational_to_decimal(&self.midpoint(), digits)
    }
}

/// Scientific-free decimal rendering with roughly `digits` significant digits.
pub fn rational_to_decimal(x: &BigRational, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let a = x.abs();
    // Position of the leading digit.
    let int_part = a.to_integer();
    let int_digits = if int_part.is_zero() { 0 } else { int_part.to_string().len() };
    let frac_digits = if int_digits >= digits {
        0
    } else if int_digits > 0 {
        digits - int_digits
    } else {
        // count leading zeros after the point
        let mut lead = 0usize;
        let mut t = a.clone();
        let ten = BigRational::from_integer(BigInt::from(10));
        while t < BigRational::one() && lead < 10_000 {
            t *= &ten;
            lead += 1;
        }
        lead - 1 + digits
    };
    let scale = num_traits::pow(BigInt::from(10), frac_digits);
    let scaled = (&a * BigRational::from_integer(scale.clone())).round().to_integer();
    let (ip, fp) = scaled.div_rem(&scale);
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&ip.to_string());
    if frac_digits > 0 {
        let f = fp.to_string();
        s.push('.');
        for _ in f.len()..frac_digits {
            s.push('0');
        }
        s.push_str(&f);
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// arctan(1/k) scaled by 2^bits, with an absolute error bound in units.
fn arctan_inv_fixed(k: u64, bits: u32) -> (BigInt, u64) {
    let one = BigInt::one() << bits;
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let mut power = &one / &k; // (1/k)^(2n+1) * 2^bits, truncated
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    let mut terms = 0u64;
    loop {
        let term = &power / BigInt::from(2 * n + 1);
        if term.is_zero() {
            break;
        }
        if n % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        power /= &k2;
        n += 1;
        terms += 1;
    }
    // each truncation contributes < 1 unit; tail is < 1 unit
    (sum, 2 * terms + 2)
}

static PI_CACHE: RwLock<Option<(u32, RInterval)>> = RwLock::new(None);

/// Certified enclosure of π of width at most about `2^-bits`.
pub fn pi_enclosure(bits: u32) -> RInterval {
    if let Some((b, iv)) = PI_CACHE.read().unwrap().as_ref() {
        if *b >= bits {
            return iv.clone();
        }
    }
    let guard = 32;
    let w = bits + guard;
    // π = 16 arctan(1/5) − 4 arctan(1/239)
    let (a, ea) = arctan_inv_fixed(5, w);
    let (b, eb) = arctan_inv_fixed(239, w);
    let mid = BigInt::from(16) * a - BigInt::from(4) * b;
    let err = BigInt::from(16 * ea + 4 * eb);
    let den = BigRational::from_integer(BigInt::one() << w);
    let iv = RInterval {
        lo: BigRational::from_integer(&mid - &err) / &den,
        hi: BigRational::from_integer(&mid + &err) / &den,
    };
    let mut cache = PI_CACHE.write().unwrap();
    if cache.as_ref().map_or(true, |(b, _)| *b < bits) {
        *cache = Some((bits, iv.clone()));
    }
    iv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pi_enclosure_is_tight_and_correct() {
        let iv = pi_enclosure(200);
        // 3.14159265358979323846264338327950288419716939937510
        let lo = r(314159265358979, 100000000000000);
        let hi = r(314159265358980, 100000000000000);
        assert!(iv.lo > lo && iv.hi < hi);
        assert!(iv.width() < BigRational::new(BigInt::one(), BigInt::one() << 190));
        assert!(iv.to_decimal(30).starts_with("3.1415926535897932384626433832"));
    }

    #[test]
    fn interval_ops_enclose() {
        let a = RInterval::new(r(-1, 2), r(1, 3));
        let b = RInterval::new(r(2, 1), r(3, 1));
        let p = a.mul(&b);
        assert_eq!(p.lo, r(-3, 2));
        assert_eq!(p.hi, r(1, 1));
        assert_eq!(a.strict_sign(), None);
        assert_eq!(b.strict_sign(), Some(Ordering::Greater));
        let rr = RInterval::point(r(1, 3)).round_out(4);
        assert!(rr.contains(&r(1, 3)));
        assert!(rr.width() <= r(1, 16));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_to_decimal(&r(5, 2), 30), "2.5");
        assert_eq!(rational_to_decimal(&r(-1, 3), 5), "-0.33333");
        assert_eq!(rational_to_decimal(&r(1, 400), 3), "0.0025");
        assert_eq!(rational_to_decimal(&r(12345, 1), 3), "12345");
    }
}
