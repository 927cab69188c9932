//! The ordered fully subtractive map, its expansions, connecting thickness
//! and membership in the set of vectors that never halt.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::exactnum::{compare, gcd_ext, pair_dimension, rational_dimension, NumError, Scalar, Vec3};
use crate::linalg::{BigMat3, IMat3};

/// Default number of steps before an expansion gives up.
pub const DEFAULT_BUDGET: usize = 1000;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FsError {
    #[error("vector is not sorted and nonnegative")]
    NotSorted,
    #[error("zero vector")]
    ZeroVector,
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("budget of {budget} steps exhausted; {lower} <= omega <= {upper}")]
    BudgetExhausted { budget: usize, lower: Scalar, upper: Scalar },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

/// The matrix attached to digit `i`, so that `v = M_i F(v)`.
pub fn fs_matrix(i: u8) -> IMat3 {
    match i {
        1 => IMat3([[1, 0, 0], [1, 1, 0], [1, 0, 1]]),
        2 => IMat3([[0, 1, 0], [1, 1, 0], [0, 1, 1]]),
        3 => IMat3([[0, 0, 1], [1, 0, 1], [0, 1, 1]]),
        _ => panic!("digit must be 1, 2 or 3"),
    }
}

/// Product `M_{d1} ⋯ M_{dn}` in arbitrary precision.
pub fn matrix_product(digits: &[u8]) -> BigMat3 {
    digits.iter().fold(BigMat3::identity(), |acc, &d| acc.mul(&fs_matrix(d).to_big()))
}

fn check_input(v: &Vec3) -> Result<(), FsError> {
    if v.is_zero() {
        return Err(FsError::ZeroVector);
    }
    if !v.is_sorted_nonneg()? {
        return Err(FsError::NotSorted);
    }
    Ok(())
}

fn step_unchecked(v: &Vec3) -> Result<(u8, Vec3), FsError> {
    let [a, b, c] = &v.0;
    let b1 = b - a;
    let c1 = c - a;
    if compare(a, &b1)? != Ordering::Greater {
        Ok((1, Vec3([a.clone(), b1, c1])))
    } else if compare(a, &c1)? != Ordering::Greater {
        Ok((2, Vec3([b1, a.clone(), c1])))
    } else {
        Ok((3, Vec3([b1, c1, a.clone()])))
    }
}

/// One application of the ordered fully subtractive map.
pub fn fs_step(v: &Vec3) -> Result<(u8, Vec3), FsError> {
    check_input(v)?;
    step_unchecked(v)
}

/// `v₁ + v₂ ≤ v₃`.
pub fn halts(v: &Vec3) -> Result<bool, FsError> {
    Ok(compare(&(v.get(0) + v.get(1)), v.get(2))? != Ordering::Greater)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionStatus {
    Halted(usize),
    Periodic { preperiod: usize, period: usize },
    BudgetExhausted(usize),
}

#[derive(Clone, Debug)]
pub struct Expansion {
    /// `iterates[0] = v`, `iterates[n] = v⁽ⁿ⁾`.
    pub iterates: Vec<Vec3>,
    /// `digits[n-1] = iₙ`.
    pub digits: Vec<u8>,
    pub status: ExpansionStatus,
}

impl Expansion {
    pub fn v0(&self) -> &Vec3 {
        &self.iterates[0]
    }

    /// Steps actually computed.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// The repeating block of a periodic expansion.
    pub fn cycle(&self) -> Option<&[u8]> {
        match self.status {
            ExpansionStatus::Periodic { preperiod, period } => Some(&self.digits[preperiod..preperiod + period]),
            _ => None,
        }
    }

    /// Digit `iₖ` (1-based); periodic expansions are extended through their cycle.
    pub fn digit(&self, k: usize) -> Option<u8> {
        assert!(k >= 1);
        if k <= self.digits.len() {
            return Some(self.digits[k - 1]);
        }
        let ExpansionStatus::Periodic { preperiod, period } = self.status else {
            return None;
        };
        Some(self.digits[preperiod + (k - 1 - preperiod) % period])
    }

    /// First `n` digits, when the expansion is that long.
    pub fn prefix(&self, n: usize) -> Option<Vec<u8>> {
        (1..=n).map(|k| self.digit(k)).collect()
    }

    /// `Σ_{k<n} v⁽ᵏ⁾₁` over the computed iterates.
    pub fn first_coord_sum(&self, n: usize) -> Scalar {
        self.iterates[..n].iter().fold(Scalar::zero(), |acc, v| &acc + v.get(0))
    }
}

/// Iterates `F` until halting, a projective repetition, or the budget.
pub fn expand(v: &Vec3, budget: usize) -> Result<Expansion, FsError> {
    check_input(v)?;
    let mut iterates = vec![v.clone()];
    let mut digits = Vec::new();
    let mut seen: HashMap<Vec<crate::exactnum::ScalarKey>, usize> = HashMap::new();
    loop {
        let n = digits.len();
        let cur = &iterates[n];
        if halts(cur)? {
            return Ok(Expansion { iterates, digits, status: ExpansionStatus::Halted(n) });
        }
        if let Some(key) = cur.projective_key() {
            if let Some(&m) = seen.get(&key) {
                let status = ExpansionStatus::Periodic { preperiod: m, period: n - m };
                return Ok(Expansion { iterates, digits, status });
            }
            seen.insert(key, n);
        }
        if n == budget {
            return Ok(Expansion { iterates, digits, status: ExpansionStatus::BudgetExhausted(budget) });
        }
        let (d, next) = step_unchecked(cur)?;
        digits.push(d);
        iterates.push(next);
    }
}

/// Exactly `n` applications of `F`, ignoring the halting rule.
pub fn iterate(v: &Vec3, n: usize) -> Result<Expansion, FsError> {
    check_input(v)?;
    let mut iterates = vec![v.clone()];
    let mut digits = Vec::new();
    for _ in 0..n {
        let (d, next) = step_unchecked(iterates.last().unwrap())?;
        digits.push(d);
        iterates.push(next);
    }
    Ok(Expansion { iterates, digits, status: ExpansionStatus::BudgetExhausted(n) })
}

/// Connecting thickness following the recursive procedure literally:
/// halt with `v₃`, otherwise add `v₁` and recurse on `F(v)`.
pub fn connecting_thickness(v: &Vec3, budget: usize) -> Result<(Scalar, Expansion), FsError> {
    let e = expand(v, budget)?;
    let omega = match &e.status {
        ExpansionStatus::Halted(n) => &e.first_coord_sum(*n) + e.iterates[*n].get(2),
        ExpansionStatus::Periodic { .. } => {
            check_cycle_has_three(&e)?;
            v.sum().try_div(&Scalar::from_int(2))?
        }
        ExpansionStatus::BudgetExhausted(b) => {
            let lower = e.first_coord_sum(*b);
            let upper = &lower + &e.iterates[*b].sum();
            return Err(FsError::BudgetExhausted { budget: *b, lower, upper });
        }
    };
    Ok((omega, e))
}

fn check_cycle_has_three(e: &Expansion) -> Result<(), FsError> {
    if e.cycle().is_some_and(|c| c.contains(&3)) {
        Ok(())
    } else {
        Err(FsError::InternalInconsistency("periodic expansion without digit 3 never halts".into()))
    }
}

/// The infimum of thicknesses giving a 2-connected plane.
///
/// Agrees with [`connecting_thickness`] except when the halting iterate has
/// a zero or a commensurable pair among its smaller coordinates, where the
/// literal recursion is off: it gives 2 for `(1,1,1)`, whose planes are
/// connected for every thickness above 1, and 5 for `(2,2,5)`, whose
/// planes are disconnected up to thickness 6.
pub fn critical_thickness(v: &Vec3, budget: usize) -> Result<Scalar, FsError> {
    let e = expand(v, budget)?;
    match &e.status {
        ExpansionStatus::Periodic { .. } => {
            check_cycle_has_three(&e)?;
            Ok(v.sum().try_div(&Scalar::from_int(2))?)
        }
        ExpansionStatus::BudgetExhausted(b) => {
            let lower = e.first_coord_sum(*b);
            let upper = &lower + &e.iterates[*b].sum();
            Err(FsError::BudgetExhausted { budget: *b, lower, upper })
        }
        ExpansionStatus::Halted(n) => {
            let sigma = e.first_coord_sum(*n);
            let [w1, w2, w3] = &e.iterates[*n].0;
            // gcd over ℚ, zero for an incommensurable pair
            let gcd = |a: &Scalar, b: &Scalar| match gcd_ext(a, b) {
                _ if a.is_zero() && b.is_zero() => Ok(Scalar::zero()),
                Ok(g) => Ok(g),
                Err(NumError::IncommensurableInputs) => Ok(Scalar::zero()),
                Err(err) => Err(FsError::from(err)),
            };
            let tail = if !w1.is_zero() && pair_dimension(w1, w2)? == 2 {
                w3.clone()
            } else {
                // The subtractive Euclid steps on (w1, w2) reach (0, g, w3 - w1 - w2 + g),
                // a discrete line whose thickness is its ℓ¹ norm minus the gcd.
                let g = gcd(w1, w2)?;
                &(w3 + &g) - &gcd(&g, w3)?
            };
            Ok(&sigma + &tail)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum F3Verdict {
    InF3 { preperiod: usize, cycle: Vec<u8> },
    NotInF3(usize),
    Unknown(usize),
}

/// Decides whether `v⁽ⁿ⁾₁ + v⁽ⁿ⁾₂ > v⁽ⁿ⁾₃` for every `n`.
pub fn classify_f3(v: &Vec3, budget: usize) -> Result<F3Verdict, FsError> {
    let e = expand(v, budget)?;
    match &e.status {
        ExpansionStatus::Halted(n) => Ok(F3Verdict::NotInF3(*n)),
        ExpansionStatus::BudgetExhausted(b) => Ok(F3Verdict::Unknown(*b)),
        ExpansionStatus::Periodic { preperiod, .. } => {
            check_cycle_has_three(&e)?;
            let dim = rational_dimension(&v.0)?;
            if dim != 3 {
                return Err(FsError::InternalInconsistency(format!(
                    "non-halting vector has rational dimension {dim}, expected 3"
                )));
            }
            Ok(F3Verdict::InF3 { preperiod: *preperiod, cycle: e.cycle().unwrap().to_vec() })
        }
    }
}

/// `‖v‖∞ + ξ(v)` with `ξ(v)` the smallest nonzero coordinate.
pub fn omega_upper_bound(v: &Vec3) -> Result<Scalar, FsError> {
    check_input(v)?;
    let xi = v.0.iter().find(|x| !x.is_zero()).ok_or(FsError::ZeroVector)?;
    Ok(v.get(2) + xi)
}

/// `v = M_{i₁} ⋯ M_{iₙ} v⁽ⁿ⁾` for every computed `n`.
pub fn check_reconstruction(e: &Expansion) -> bool {
    let mut prod = BigMat3::identity();
    for n in 0..=e.digits.len() {
        if n > 0 {
            prod = prod.mul(&fs_matrix(e.digits[n - 1]).to_big());
        }
        let w = &e.iterates[n];
        for (row, target) in prod.0.iter().zip(e.v0().0.iter()) {
            let mut acc = Scalar::zero();
            for (m, x) in row.iter().zip(w.0.iter()) {
                if *m != BigInt::from(0) {
                    acc = &acc + &(&Scalar::from_bigint(m.clone()) * x);
                }
            }
            if &acc != target {
                return false;
            }
        }
    }
    true
}

/// `‖v⁽ⁿ⁺¹⁾‖₁ + 2v⁽ⁿ⁾₁ = ‖v⁽ⁿ⁾‖₁` along the computed iterates.
pub fn check_conservation(e: &Expansion) -> bool {
    e.iterates.windows(2).all(|w| {
        let lhs = &w[1].sum() + &(w[0].get(0) * &Scalar::from_int(2));
        lhs == w[0].sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{parse_scalar, parse_vec3, Bindings};

    fn v(text: &str) -> Vec3 {
        parse_vec3(text, &Bindings::new()).unwrap()
    }

    fn s(text: &str) -> Scalar {
        parse_scalar(text, &Bindings::new()).unwrap()
    }

    fn eigen() -> Vec3 {
        let mut env = Bindings::new();
        env.insert("a".into(), s("algebraic(-1,1,1,1; 1/2, 3/5)"));
        parse_vec3("1, 1+a, 1+a+a^2", &env).unwrap()
    }

    #[test]
    fn step_examples() {
        let (d, w) = fs_step(&v("1, sqrt(13), sqrt(17)")).unwrap();
        assert_eq!(d, 1);
        assert_eq!(w, v("1, sqrt(13)-1, sqrt(17)-1"));
        let (d, w) = fs_step(&v("1,1,1")).unwrap();
        assert_eq!((d, w), (3, v("0,0,1")));
        let (d, w) = fs_step(&v("sqrt(13)-3, 1, sqrt(17)-3")).unwrap();
        assert_eq!(d, 3);
        assert_eq!(w, v("4-sqrt(13), sqrt(17)-sqrt(13), sqrt(13)-3"));
        assert_eq!(fs_step(&v("2,1,3")), Err(FsError::NotSorted));
        assert_eq!(fs_step(&v("0,0,0")), Err(FsError::ZeroVector));
    }

    #[test]
    fn ties_follow_the_printed_cases() {
        // v₁ = v₂ − v₁ falls in case 1
        assert_eq!(fs_step(&v("1,2,5")).unwrap().0, 1);
        // v₁ = v₃ − v₁ with v₂ − v₁ < v₁ falls in case 2
        assert_eq!(fs_step(&v("2,3,4")).unwrap().0, 2);
    }

    #[test]
    fn first_worked_example() {
        let (omega, e) = connecting_thickness(&v("1, sqrt(13), sqrt(17)"), 100).unwrap();
        assert_eq!(e.status, ExpansionStatus::Halted(5));
        assert_eq!(e.digits, vec![1, 1, 2, 3, 3]);
        assert_eq!(omega, s("8 - sqrt(13)"));
        assert_eq!(e.iterates[4], v("4-sqrt(13), sqrt(17)-sqrt(13), sqrt(13)-3"));
        assert!(check_reconstruction(&e));
        assert!(check_conservation(&e));
    }

    #[test]
    fn eigenvector_is_periodic() {
        let w = eigen();
        let e = expand(&w, 100).unwrap();
        assert_eq!(e.status, ExpansionStatus::Periodic { preperiod: 0, period: 1 });
        assert_eq!(e.cycle().unwrap(), &[3]);
        assert_eq!(e.digit(57), Some(3));
        assert_eq!(
            classify_f3(&w, 100).unwrap(),
            F3Verdict::InF3 { preperiod: 0, cycle: vec![3] }
        );
        let (omega, _) = connecting_thickness(&w, 100).unwrap();
        assert_eq!(omega, w.sum().try_div(&Scalar::from_int(2)).unwrap());
    }

    #[test]
    fn halting_and_classification() {
        assert_eq!(expand(&v("0,0,1"), 10).unwrap().status, ExpansionStatus::Halted(0));
        // halting already holds at the start: 1 + 2 ≤ 4
        assert_eq!(classify_f3(&v("1,2,4"), 100).unwrap(), F3Verdict::NotInF3(0));
        assert_eq!(classify_f3(&v("1, sqrt(13), sqrt(17)"), 100).unwrap(), F3Verdict::NotInF3(5));
        let (omega, _) = connecting_thickness(&v("1,1,1"), 10).unwrap();
        assert_eq!(omega, s("2"));
    }

    #[test]
    fn upper_bound_examples() {
        assert_eq!(omega_upper_bound(&v("1,2,4")).unwrap(), s("5"));
        assert_eq!(omega_upper_bound(&v("0,1,sqrt(2)")).unwrap(), s("sqrt(2)+1"));
        assert_eq!(omega_upper_bound(&v("1,1,1")).unwrap(), s("2"));
    }

    #[test]
    fn critical_thickness_cases() {
        assert_eq!(critical_thickness(&v("1,1,1"), 10).unwrap(), s("1"));
        assert_eq!(critical_thickness(&v("0,1,sqrt(2)"), 10).unwrap(), s("1+sqrt(2)"));
        assert_eq!(critical_thickness(&v("0,2,3"), 10).unwrap(), s("4"));
        assert_eq!(critical_thickness(&v("1,2,4"), 10).unwrap(), s("4"));
        assert_eq!(critical_thickness(&v("2,2,5"), 10).unwrap(), s("6"));
        assert_eq!(critical_thickness(&v("0,0,3"), 10).unwrap(), s("0"));
        assert_eq!(critical_thickness(&v("1, sqrt(13), sqrt(17)"), 10).unwrap(), s("8-sqrt(13)"));
        // commensurable smaller pair, incommensurable largest coordinate
        assert_eq!(critical_thickness(&v("2, 4, 7*sqrt(2)"), 10).unwrap(), s("7*sqrt(2) + 2"));
    }

    #[test]
    fn budget_exhaustion_reports_bounds() {
        let err = connecting_thickness(&eigen(), 0).unwrap_err();
        assert!(matches!(err, FsError::BudgetExhausted { budget: 0, .. }));
    }
}
