//! Arithmetical discrete planes `{x ∈ ℤ³ : 0 ≤ ⟨x,v⟩ < ω}`: membership,
//! windowed enumeration and 6-neighbour connectivity.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

use crate::exactnum::{compare, NumError, Scalar, Vec3};
use crate::linalg::IVec3;

/// Default cap on the number of candidate points of a window.
pub const DEFAULT_POINT_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PlaneError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("window has {0} candidate points, above the cap of {1}")]
    WindowTooLarge(u64, u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Finite set of integer points, sorted lexicographically and deduplicated.
pub type PointSet = Vec<IVec3>;

#[derive(Clone, Debug)]
pub struct PlaneSpec {
    pub v: Vec3,
    pub omega: Scalar,
}

impl PlaneSpec {
    pub fn new(v: Vec3, omega: Scalar) -> Self {
        PlaneSpec { v, omega }
    }

    /// Naive plane, thickness `‖v‖∞`.
    pub fn naive(v: &Vec3) -> Result<Self, NumError> {
        let mut m = v.get(0).clone();
        for c in &v.0[1..] {
            if compare(c, &m)? == Ordering::Greater {
                m = c.clone();
            }
        }
        Ok(PlaneSpec { v: v.clone(), omega: m })
    }

    /// Standard plane, thickness `‖v‖₁`.
    pub fn standard(v: &Vec3) -> Self {
        PlaneSpec { v: v.clone(), omega: v.l1() }
    }
}

/// Box `anchor + [−R, R]³`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub radius: i64,
    pub anchor: IVec3,
}

impl Window {
    pub fn new(radius: i64) -> Self {
        Window { radius, anchor: [0, 0, 0] }
    }

    pub fn contains(&self, x: &IVec3) -> bool {
        (0..3).all(|i| (x[i] - self.anchor[i]).abs() <= self.radius)
    }

    pub fn candidate_count(&self) -> u64 {
        let side = (2 * self.radius + 1).max(0) as u64;
        side.saturating_mul(side).saturating_mul(side)
    }
}

const FAST_SHIFT: u32 = 48;

/// Fixed-point enclosures of `v` and `ω` that settle most membership tests
/// without exact arithmetic; undecided cases fall back to exact comparison.
pub struct FastForm {
    v: Vec3,
    omega: Scalar,
    lo: [i128; 3],
    hi: [i128; 3],
    om_lo: i128,
    om_hi: i128,
}

fn fixed_bounds(s: &Scalar) -> (i128, i128) {
    let e = s.enclose(FAST_SHIFT + 8);
    let scale = BigRational::from_integer(BigInt::one() << FAST_SHIFT);
    let lo = (&e.lo * &scale).floor().to_integer().to_i128().unwrap_or(i128::MIN / 4);
    let hi = (&e.hi * &scale).ceil().to_integer().to_i128().unwrap_or(i128::MAX / 4);
    (lo, hi)
}

impl FastForm {
    pub fn new(spec: &PlaneSpec) -> Self {
        let b: Vec<(i128, i128)> = spec.v.0.iter().map(fixed_bounds).collect();
        let (om_lo, om_hi) = fixed_bounds(&spec.omega);
        FastForm {
            v: spec.v.clone(),
            omega: spec.omega.clone(),
            lo: [b[0].0, b[1].0, b[2].0],
            hi: [b[0].1, b[1].1, b[2].1],
            om_lo,
            om_hi,
        }
    }

    fn dot_bounds(&self, x: &IVec3) -> (i128, i128) {
        let (mut lo, mut hi) = (0i128, 0i128);
        for i in 0..3 {
            let k = x[i] as i128;
            if k >= 0 {
                lo += k * self.lo[i];
                hi += k * self.hi[i];
            } else {
                lo += k * self.hi[i];
                hi += k * self.lo[i];
            }
        }
        (lo, hi)
    }

    /// `0 ≤ ⟨x,v⟩ < ω`.
    pub fn contains(&self, x: &IVec3) -> Result<bool, NumError> {
        let (lo, hi) = self.dot_bounds(x);
        if hi < 0 || lo >= self.om_hi {
            return Ok(false);
        }
        let nonneg = if lo >= 0 { true } else { !self.v.dot_int(x).is_negative()? };
        if !nonneg {
            return Ok(false);
        }
        if hi < self.om_lo {
            return Ok(true);
        }
        Ok(compare(&self.v.dot_int(x), &self.omega)? == Ordering::Less)
    }

    /// Sign of `⟨x,v⟩ − c` for a threshold `c` with precomputed bounds.
    pub fn compare_dot(&self, x: &IVec3, c: &Scalar, c_bounds: (i128, i128)) -> Result<Ordering, NumError> {
        let (lo, hi) = self.dot_bounds(x);
        if hi < c_bounds.0 {
            return Ok(Ordering::Less);
        }
        if lo > c_bounds.1 {
            return Ok(Ordering::Greater);
        }
        compare(&self.v.dot_int(x), c)
    }

    pub fn bounds_of(s: &Scalar) -> (i128, i128) {
        fixed_bounds(s)
    }
}

/// `0 ≤ ⟨x,v⟩ < ω`, decided exactly.
pub fn contains(spec: &PlaneSpec, x: &IVec3) -> Result<bool, NumError> {
    let d = spec.v.dot_int(x);
    Ok(!d.is_negative()? && compare(&d, &spec.omega)? == Ordering::Less)
}

fn enumerate_with_cap(spec: &PlaneSpec, w: &Window, cap: u64) -> Result<PointSet, PlaneError> {
    if !spec.omega.is_positive()? {
        return Err(PlaneError::InvalidArgument("thickness must be positive".into()));
    }
    if w.radius < 0 {
        return Err(PlaneError::InvalidArgument("radius must be nonnegative".into()));
    }
    let n = w.candidate_count();
    if n > cap {
        return Err(PlaneError::WindowTooLarge(n, cap));
    }
    let ff = FastForm::new(spec);
    let r = w.radius;
    let [ax, ay, az] = w.anchor;
    let slabs: Vec<Result<Vec<IVec3>, NumError>> = (-r..=r)
        .into_par_iter()
        .map(|dx| {
            let mut out = Vec::new();
            for dy in -r..=r {
                for dz in -r..=r {
                    let p = [ax + dx, ay + dy, az + dz];
                    if ff.contains(&p)? {
                        out.push(p);
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut pts = Vec::new();
    for s in slabs {
        pts.extend(s?);
    }
    Ok(pts)
}

/// All points of the plane inside the window, in lexicographic order.
pub fn enumerate(spec: &PlaneSpec, w: &Window) -> Result<PointSet, PlaneError> {
    enumerate_with_cap(spec, w, DEFAULT_POINT_CAP)
}

/// [`enumerate`] with an explicit cap on candidate points.
pub fn enumerate_capped(spec: &PlaneSpec, w: &Window, cap: u64) -> Result<PointSet, PlaneError> {
    enumerate_with_cap(spec, w, cap)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityReport {
    /// Components ordered by their lexicographically smallest point.
    pub sizes: Vec<usize>,
    pub representatives: Vec<IVec3>,
    /// Index of the component holding the origin, if the origin is present.
    pub origin_component: Option<usize>,
    /// Component index of every input point, aligned with the input order.
    pub labels: Vec<usize>,
}

impl ConnectivityReport {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_connected(&self) -> bool {
        self.sizes.len() == 1
    }
}

pub const NEIGHBOURS: [IVec3; 6] = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]];

/// Components under the 6-neighbourhood (points at ℓ¹-distance 1).
pub fn connectivity(points: &[IVec3]) -> ConnectivityReport {
    let index: HashMap<IVec3, usize> = points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut labels = vec![usize::MAX; points.len()];
    let mut comps: Vec<(IVec3, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..points.len() {
        if labels[start] != usize::MAX {
            continue;
        }
        let c = comps.len();
        labels[start] = c;
        queue.push_back(start);
        let mut size = 0;
        let mut rep = points[start];
        while let Some(i) = queue.pop_front() {
            size += 1;
            let p = points[i];
            if p < rep {
                rep = p;
            }
            for d in NEIGHBOURS {
                let q = [p[0] + d[0], p[1] + d[1], p[2] + d[2]];
                if let Some(&j) = index.get(&q) {
                    if labels[j] == usize::MAX {
                        labels[j] = c;
                        queue.push_back(j);
                    }
                }
            }
        }
        comps.push((rep, size));
    }
    // renumber by representative
    let mut order: Vec<usize> = (0..comps.len()).collect();
    order.sort_by_key(|&c| comps[c].0);
    let mut rank = vec![0; comps.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let labels: Vec<usize> = labels.iter().map(|&l| rank[l]).collect();
    let origin_component = index.get(&[0, 0, 0]).map(|&i| labels[i]);
    ConnectivityReport {
        sizes: order.iter().map(|&c| comps[c].1).collect(),
        representatives: order.iter().map(|&c| comps[c].0).collect(),
        origin_component,
        labels,
    }
}

/// Components of the plane seen through a window with a surrounding margin:
/// points of the enlarged box are linked, and only components meeting the
/// inner box are reported. Returned pairs are (component points inside the
/// inner box, sorted).
pub fn windowed_components(
    spec: &PlaneSpec,
    w: &Window,
    margin: i64,
) -> Result<Vec<Vec<IVec3>>, PlaneError> {
    let outer = Window { radius: w.radius + margin, anchor: w.anchor };
    let pts = enumerate(spec, &outer)?;
    let rep = connectivity(&pts);
    let mut groups: Vec<Vec<IVec3>> = vec![Vec::new(); rep.count()];
    for (p, &l) in pts.iter().zip(&rep.labels) {
        if w.contains(p) {
            groups[l].push(*p);
        }
    }
    groups.retain(|g| !g.is_empty());
    Ok(groups)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WindowedVerdict {
    ConnectedAtAll,
    DisconnectedStable(IVec3, IVec3),
    Inconclusive,
}

/// Semi-decision of 2-connectedness from finite windows.
///
/// For each radius `R` the plane is enumerated on the box of radius
/// `R + margin` (margin defaults to `R`), and the components meeting the
/// inner box of radius `R` are counted, so paths may leave the inner box.
/// The answer is evidence about the infinite plane, not a proof.
pub fn is_connected_windowed(
    spec: &PlaneSpec,
    radii: &[i64],
    anchor: IVec3,
    margin: Option<i64>,
) -> Result<WindowedVerdict, PlaneError> {
    if radii.len() < 2 || radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] < 1 {
        return Err(PlaneError::InvalidArgument("need at least two increasing positive radii".into()));
    }
    let mut all_connected = true;
    let mut witness: Option<(IVec3, IVec3)> = None;
    let mut stable = true;
    for (k, &r) in radii.iter().enumerate() {
        let w = Window { radius: r, anchor };
        let m = margin.unwrap_or(r);
        let outer = Window { radius: r + m, anchor };
        let pts = enumerate(spec, &outer)?;
        let rep = connectivity(&pts);
        let mut inner: HashMap<usize, (usize, IVec3)> = HashMap::new();
        for (p, &l) in pts.iter().zip(&rep.labels) {
            if w.contains(p) {
                let e = inner.entry(l).or_insert((0, *p));
                e.0 += 1;
                if *p < e.1 {
                    e.1 = *p;
                }
            }
        }
        if inner.len() != 1 {
            all_connected = false;
        }
        if k == 0 {
            if inner.len() >= 2 {
                let mut comps: Vec<(usize, IVec3)> = inner.values().cloned().collect();
                // largest first, ties by smallest point
                comps.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
                let (a, b) = (comps[0].1, comps[1].1);
                witness = Some(if a < b { (a, b) } else { (b, a) });
            } else {
                stable = false;
            }
        } else if let Some((a, b)) = witness {
            let idx: HashMap<IVec3, usize> = pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
            match (idx.get(&a), idx.get(&b)) {
                (Some(&i), Some(&j)) if rep.labels[i] != rep.labels[j] => {}
                _ => stable = false,
            }
        }
    }
    if all_connected {
        Ok(WindowedVerdict::ConnectedAtAll)
    } else if stable {
        let (a, b) = witness.unwrap();
        Ok(WindowedVerdict::DisconnectedStable(a, b))
    } else {
        Ok(WindowedVerdict::Inconclusive)
    }
}

pub fn points_to_json(points: &[IVec3]) -> serde_json::Value {
    serde_json::Value::Array(points.iter().map(|p| serde_json::json!(p)).collect())
}

pub fn points_to_xyz(points: &[IVec3]) -> String {
    points.iter().map(|p| format!("{} {} {}\n", p[0], p[1], p[2])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{parse_scalar, parse_vec3, Bindings};

    fn spec(v: &str, w: &str) -> PlaneSpec {
        let env = Bindings::new();
        PlaneSpec::new(parse_vec3(v, &env).unwrap(), parse_scalar(w, &env).unwrap())
    }

    #[test]
    fn membership_examples() {
        let s = spec("1, sqrt(2), pi", "1");
        assert!(contains(&s, &[0, 0, 0]).unwrap());
        assert!(!contains(&s, &[1, 0, 0]).unwrap());
        assert!(contains(&spec("0,1,2", "2"), &[5, 1, 0]).unwrap());
    }

    #[test]
    fn fast_form_agrees_with_exact() {
        let s = spec("1, sqrt(2), pi", "5/2");
        let ff = FastForm::new(&s);
        for x in -4..=4 {
            for y in -4..=4 {
                for z in -4..=4 {
                    let p = [x, y, z];
                    assert_eq!(ff.contains(&p).unwrap(), contains(&s, &p).unwrap(), "{p:?}");
                }
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let pts = enumerate(&spec("0,0,1", "1"), &Window::new(1)).unwrap();
        assert_eq!(pts.len(), 9);
        assert!(pts.iter().all(|p| p[2] == 0));
        let pts = enumerate(&spec("1,1,1", "2"), &Window::new(1)).unwrap();
        let brute: Vec<IVec3> = (-1..=1)
            .flat_map(|x| (-1..=1).flat_map(move |y| (-1..=1).map(move |z| [x, y, z])))
            .filter(|p| (0..2).contains(&(p[0] + p[1] + p[2])))
            .collect();
        assert_eq!(pts, brute);
        assert!(matches!(
            enumerate_capped(&spec("1,1,1", "2"), &Window::new(10), 1000),
            Err(PlaneError::WindowTooLarge(9261, 1000))
        ));
    }

    #[test]
    fn connectivity_examples() {
        assert_eq!(connectivity(&[[0, 0, 0], [1, 0, 0]]).count(), 1);
        assert_eq!(connectivity(&[[0, 0, 0], [1, 1, 0]]).count(), 2);
        assert_eq!(connectivity(&[]).count(), 0);
        let pts = enumerate(&spec("1, sqrt(2), pi", "1"), &Window::new(3)).unwrap();
        assert!(connectivity(&pts).count() > 1);
    }

    #[test]
    fn windowed_examples() {
        let r = is_connected_windowed(&spec("1, sqrt(2), pi", "4"), &[4, 8], [0, 0, 0], None).unwrap();
        assert_eq!(r, WindowedVerdict::ConnectedAtAll);
        let r = is_connected_windowed(&spec("1, sqrt(2), pi", "1"), &[4, 8], [0, 0, 0], None).unwrap();
        assert!(matches!(r, WindowedVerdict::DisconnectedStable(_, _)));
        let r = is_connected_windowed(&spec("0,0,1", "1"), &[2, 4], [0, 0, 0], None).unwrap();
        assert_eq!(r, WindowedVerdict::ConnectedAtAll);
    }

    #[test]
    fn monotone_in_thickness() {
        let w = Window::new(3);
        let a = enumerate(&spec("1, sqrt(2), pi", "2"), &w).unwrap();
        let b = enumerate(&spec("1, sqrt(2), pi", "3"), &w).unwrap();
        assert!(a.iter().all(|p| b.binary_search(p).is_ok()));
    }
}
