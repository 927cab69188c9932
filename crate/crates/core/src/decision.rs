//! Deciding whether the plane at critical thickness is 2-connected.

use std::fmt;

use serde_json::json;

use crate::exactnum::{pair_dimension, scalar_to_json, vec3_to_json, Scalar, Vec3};
use crate::fsalgo::{self, FsError};
use crate::planes::{self, PlaneError, PlaneSpec, WindowedVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectedReason {
    /// The expansion never halts.
    InF3,
    /// `v⁽ⁿ⁾₁ = 0` with `v⁽ⁿ⁾₂, v⁽ⁿ⁾₃` linearly independent over ℚ.
    ZeroFirstCoordDim2(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotConnectedReason {
    RationalDim1,
    /// Halting stage `n` with positive, ℚ-independent `v⁽ⁿ⁾₁, v⁽ⁿ⁾₂`.
    PositiveNonF3(usize),
    /// `v⁽ⁿ⁾₁ = 0` with `v⁽ⁿ⁾₂, v⁽ⁿ⁾₃` commensurable.
    ZeroFirstCoordDim1(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Connected(ConnectedReason),
    NotConnected(NotConnectedReason),
    Unknown(usize),
}

impl Verdict {
    pub fn is_connected(&self) -> Option<bool> {
        match self {
            Verdict::Connected(_) => Some(true),
            Verdict::NotConnected(_) => Some(false),
            Verdict::Unknown(_) => None,
        }
    }

    pub fn reason(&self) -> String {
        match self {
            Verdict::Connected(ConnectedReason::InF3) => "InF3".into(),
            Verdict::Connected(ConnectedReason::ZeroFirstCoordDim2(n)) => format!("ZeroFirstCoordDim2({n})"),
            Verdict::NotConnected(NotConnectedReason::RationalDim1) => "RationalDim1".into(),
            Verdict::NotConnected(NotConnectedReason::PositiveNonF3(n)) => format!("PositiveNonF3({n})"),
            Verdict::NotConnected(NotConnectedReason::ZeroFirstCoordDim1(n)) => format!("ZeroFirstCoordDim1({n})"),
            Verdict::Unknown(b) => format!("budget {b}"),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self {
            Verdict::Connected(_) => "Connected",
            Verdict::NotConnected(_) => "NotConnected",
            Verdict::Unknown(_) => "Unknown",
        };
        write!(f, "{head}({})", self.reason())
    }
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: Verdict,
    /// Stage at which the verdict was reached.
    pub stage: usize,
    pub iterate: Vec3,
    /// `Ω(v)` when it could be computed.
    pub omega: Option<Scalar>,
}

impl Decision {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "verdict": self.verdict.to_string(),
            "connected": self.verdict.is_connected(),
            "stage": self.stage,
            "iterate": vec3_to_json(&self.iterate),
            "omega": self.omega.as_ref().map(scalar_to_json),
        })
    }
}

/// Follows the expansion of sorted `v` until one of the cases of the
/// characterization applies.
///
/// Halting stages with commensurable `v⁽ⁿ⁾₁, v⁽ⁿ⁾₂` are passed over: the
/// iteration then acts as a Euclidean algorithm on those two coordinates and
/// reaches a zero first coordinate.
pub fn decide_critical_connectedness(v: &Vec3, budget: usize) -> Result<Decision, FsError> {
    if v.is_zero() {
        return Err(FsError::ZeroVector);
    }
    if !v.is_sorted_nonneg()? {
        return Err(FsError::NotSorted);
    }
    let mut cur = v.clone();
    let mut seen = std::collections::HashMap::new();
    let mut digits = Vec::new();
    for n in 0..=budget {
        let [w1, w2, w3] = &cur.0;
        let verdict = if w1.is_zero() {
            Some(if w2.is_zero() {
                Verdict::NotConnected(NotConnectedReason::RationalDim1)
            } else if pair_dimension(w2, w3)? == 2 {
                Verdict::Connected(ConnectedReason::ZeroFirstCoordDim2(n))
            } else {
                Verdict::NotConnected(NotConnectedReason::ZeroFirstCoordDim1(n))
            })
        } else if fsalgo::halts(&cur)? && pair_dimension(w1, w2)? == 2 {
            Some(Verdict::NotConnected(NotConnectedReason::PositiveNonF3(n)))
        } else if let Some(m) = cur.projective_key().and_then(|k| seen.insert(k, n)) {
            if !digits[m..].contains(&3) {
                return Err(FsError::InternalInconsistency("cycle without digit 3".into()));
            }
            Some(Verdict::Connected(ConnectedReason::InF3))
        } else {
            None
        };
        if let Some(verdict) = verdict {
            let omega = match fsalgo::critical_thickness(v, budget) {
                Ok(o) => Some(o),
                Err(FsError::BudgetExhausted { .. }) => None,
                Err(e) => return Err(e),
            };
            return Ok(Decision { verdict, stage: n, iterate: cur, omega });
        }
        if n == budget {
            break;
        }
        let (d, next) = fsalgo::fs_step(&cur)?;
        digits.push(d);
        cur = next;
    }
    Ok(Decision { verdict: Verdict::Unknown(budget), stage: budget, iterate: cur, omega: None })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub windowed: WindowedVerdict,
    pub consistent: bool,
}

/// Compares a verdict with windowed BFS of `P(v, Ω(v))`: a connected verdict
/// contradicts a stable split, a disconnected one contradicts connectivity
/// at every radius.
pub fn cross_check(d: &Decision, v: &Vec3, radii: &[i64]) -> Result<Option<CrossCheck>, PlaneError> {
    let Some(omega) = &d.omega else { return Ok(None) };
    let spec = PlaneSpec::new(v.clone(), omega.clone());
    let windowed = planes::is_connected_windowed(&spec, radii, [0, 0, 0], None)?;
    let consistent = match (d.verdict.is_connected(), &windowed) {
        (Some(true), WindowedVerdict::DisconnectedStable(..)) => false,
        (Some(false), WindowedVerdict::ConnectedAtAll) => false,
        _ => true,
    };
    Ok(Some(CrossCheck { windowed, consistent }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{parse_scalar, parse_vec3, Bindings};

    fn v(text: &str) -> Vec3 {
        let mut env = Bindings::new();
        env.insert("a".into(), parse_scalar("algebraic(-1,1,1,1; 1/2, 3/5)", &Bindings::new()).unwrap());
        parse_vec3(text, &env).unwrap()
    }

    fn decide(text: &str) -> Verdict {
        decide_critical_connectedness(&v(text), 1000).unwrap().verdict
    }

    #[test]
    fn worked_verdicts() {
        assert_eq!(decide("1,1+a,1+a+a^2"), Verdict::Connected(ConnectedReason::InF3));
        assert_eq!(decide("1,2,4"), Verdict::NotConnected(NotConnectedReason::ZeroFirstCoordDim1(2)));
        assert_eq!(decide("0,1,sqrt(2)"), Verdict::Connected(ConnectedReason::ZeroFirstCoordDim2(0)));
        assert_eq!(decide("1,1,1"), Verdict::NotConnected(NotConnectedReason::RationalDim1));
        assert_eq!(decide("1,sqrt(13),sqrt(17)"), Verdict::NotConnected(NotConnectedReason::PositiveNonF3(5)));
        assert_eq!(decide("0,0,3"), Verdict::NotConnected(NotConnectedReason::RationalDim1));
    }

    #[test]
    fn pi_vectors_are_decided() {
        let d = decide_critical_connectedness(&v("1,sqrt(2),pi"), 1000).unwrap();
        assert!(d.verdict.is_connected().is_some());
    }

    #[test]
    fn bfs_agrees_on_small_cases() {
        for text in ["1,1+a,1+a+a^2", "0,1,sqrt(2)", "1,1,1"] {
            let vv = v(text);
            let d = decide_critical_connectedness(&vv, 1000).unwrap();
            let c = cross_check(&d, &vv, &[4, 6]).unwrap().unwrap();
            assert!(c.consistent, "{text}: {:?} vs {:?}", d.verdict, c.windowed);
        }
    }

    #[test]
    fn pair_dimension_cases() {
        assert_eq!(pair_dimension(&Scalar::from_int(2), &Scalar::from_int(3)).unwrap(), 1);
        assert_eq!(pair_dimension(&Scalar::pi(), &Scalar::from_int(3)).unwrap(), 2);
        assert_eq!(pair_dimension(&Scalar::zero(), &Scalar::zero()).unwrap(), 0);
    }
}
