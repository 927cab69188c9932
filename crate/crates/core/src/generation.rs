//! Point patterns `Tₙ` generated by translations, and the checks tying them
//! to the face patterns `Pₙ` and to the critical and naive planes.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::json;
use thiserror::Error;

use crate::exactnum::{NumError, QPoly, Scalar, Vec3};
use crate::fsalgo::{self, F3Verdict, FsError};
use crate::linalg::{add_i, sub_i, IMat3, IVec3};
use crate::planes::{self, ConnectivityReport, FastForm, PlaneError, PlaneSpec, PointSet, Window};
use crate::stepped::{self, distinguished_vertices, Pattern, SteppedError, SteppedPlane, UnitFace};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GenError {
    #[error("expansion has {available} digits, {needed} requested")]
    ExpansionTooShort { needed: usize, available: usize },
    #[error("vector is not certified to lie in F3: {0:?}")]
    NotInF3(F3Verdict),
    #[error("integer overflow in translation vectors")]
    Overflow,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Fs(#[from] FsError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Stepped(#[from] SteppedError),
    #[error(transparent)]
    Plane(#[from] PlaneError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TnSequence {
    pub digits: Vec<u8>,
    /// `levels[k] = T_k`, sorted.
    pub levels: Vec<PointSet>,
    /// `translations[k] = t_k`, with `T_{k+1} = T_k ∪ (T_k + t_k)`.
    pub translations: Vec<IVec3>,
}

impl TnSequence {
    pub fn last(&self) -> &PointSet {
        self.levels.last().unwrap()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "levels": self.levels.iter().map(|l| planes::points_to_json(l)).collect::<Vec<_>>(),
            "translations": self.translations,
        })
    }
}

/// `T₀ … Tₙ` for a digit sequence of length at least `n − 1`.
pub fn generate_tn_from_digits(digits: &[u8], n: usize) -> Result<TnSequence, GenError> {
    let needed = n.saturating_sub(1);
    if digits.len() < needed {
        return Err(GenError::ExpansionTooShort { needed, available: digits.len() });
    }
    let mut inv = IMat3::IDENTITY;
    let mut levels = vec![vec![[0i64, 0, 0]]];
    let mut translations = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            let mi = fsalgo::fs_matrix(digits[k - 1]).inverse_unimodular().ok_or(GenError::Overflow)?;
            inv = mi.checked_mul(&inv).ok_or(GenError::Overflow)?;
        }
        // first row of (M_{i₁}⋯M_{i_k})⁻¹
        let t = inv.0[0];
        let prev = levels.last().unwrap();
        let mut next: Vec<IVec3> = prev.iter().cloned().chain(prev.iter().map(|x| add_i(x, &t))).collect();
        next.sort();
        next.dedup();
        translations.push(t);
        levels.push(next);
    }
    Ok(TnSequence { digits: digits[..needed].to_vec(), levels, translations })
}

/// `T₀ … Tₙ` from the expansion of `v`.
pub fn generate_tn(v: &Vec3, n: usize) -> Result<TnSequence, GenError> {
    let e = fsalgo::expand(v, n.max(fsalgo::DEFAULT_BUDGET))?;
    let needed = n.saturating_sub(1);
    let digits = e.prefix(needed).ok_or(GenError::ExpansionTooShort { needed, available: e.digits.len() })?;
    generate_tn_from_digits(&digits, n)
}

fn require_f3(v: &Vec3) -> Result<(), GenError> {
    match fsalgo::classify_f3(v, fsalgo::DEFAULT_BUDGET)? {
        F3Verdict::InF3 { .. } => Ok(()),
        other => Err(GenError::NotInF3(other)),
    }
}

/// `⟨t_k, v⟩ = v⁽ᵏ⁾₁` for every translation of the sequence.
pub fn check_translation_values(v: &Vec3, seq: &TnSequence) -> Result<bool, GenError> {
    let it = fsalgo::iterate(v, seq.translations.len())?;
    Ok(seq.translations.iter().enumerate().all(|(k, t)| v.dot_int(t) == *it.iterates[k].get(0)))
}

/// Point of `seq`'s last level violating `0 ≤ ⟨x,v⟩ < Σ_{k≤n} v⁽ᵏ⁾₁ ≤ Ω(v)`.
pub fn critical_plane_violation(v: &Vec3, seq: &TnSequence) -> Result<Option<IVec3>, GenError> {
    let n = seq.levels.len() - 1;
    let it = fsalgo::iterate(v, n)?;
    let bound = it.first_coord_sum(n + 1);
    let omega = fsalgo::critical_thickness(v, fsalgo::DEFAULT_BUDGET)?;
    if bound.try_sub(&omega)?.is_positive()? {
        return Err(GenError::InternalInconsistency("partial sum exceeds the critical thickness".into()));
    }
    let spec = PlaneSpec::new(v.clone(), bound);
    for x in seq.last() {
        if !planes::contains(&spec, x)? {
            return Ok(Some(*x));
        }
    }
    Ok(None)
}

/// Every point of `Tₙ` lies in `P(v, Ω(v))`, below the partial sum bound.
pub fn check_tn_in_critical_plane(v: &Vec3, n: usize) -> Result<bool, GenError> {
    require_f3(v)?;
    let seq = generate_tn(v, n)?;
    if !check_translation_values(v, &seq)? {
        return Err(GenError::InternalInconsistency("translation value differs from first coordinate".into()));
    }
    Ok(critical_plane_violation(v, &seq)?.is_none())
}

pub fn check_tn_connected(v: &Vec3, n: usize) -> Result<ConnectivityReport, GenError> {
    require_f3(v)?;
    Ok(planes::connectivity(generate_tn(v, n)?.last()))
}

/// For each level `k ≥ 1`, the point of largest value `x_k = Σ t_j` has a
/// neighbour `x_k − e_j` in `T_{k−1}`.
pub fn check_adjacency_ladder(seq: &TnSequence) -> bool {
    let mut top = [0i64; 3];
    for k in 1..seq.levels.len() {
        top = add_i(&top, &seq.translations[k - 1]);
        let prev: HashSet<&IVec3> = seq.levels[k - 1].iter().collect();
        let ok = k == 1 && prev.contains(&[0, 0, 0])
            || [[1, 0, 0], [0, 1, 0], [0, 0, 1]].iter().any(|e| prev.contains(&sub_i(&top, e)));
        if !ok || seq.levels[k].binary_search(&top).is_err() {
            return false;
        }
    }
    true
}

/// Distinguished vertices of `Pₙ` missing from `Tₙ`.
pub fn pn_outside_tn(v: &Vec3, n: usize) -> Result<PointSet, GenError> {
    let pn = stepped::generate_pn(v, n, fsalgo::DEFAULT_BUDGET)?;
    let tn = generate_tn(v, n)?;
    Ok(distinguished_vertices(&pn).into_iter().filter(|x| tn.last().binary_search(x).is_err()).collect())
}

/// `Pₙ ⊆ Tₙ` as point sets.
pub fn check_pn_in_tn(v: &Vec3, n: usize) -> Result<bool, GenError> {
    require_f3(v)?;
    Ok(pn_outside_tn(v, n)?.is_empty())
}

/// Faces of `p` outside the stepped plane `Γ_v`.
pub fn faces_outside_plane(v: &Vec3, p: &Pattern) -> Result<Vec<UnitFace>, GenError> {
    let plane = SteppedPlane::new(v)?;
    let mut out = Vec::new();
    for f in p.iter() {
        if !plane.contains(f)? {
            out.push(*f);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FillResult {
    Filled,
    MissingPoints(PointSet),
}

/// Compares `Pₙ`'s distinguished vertices with the naive plane on the
/// window of radius `r`.
pub fn check_pn_fills_naive(v: &Vec3, n: usize, r: i64) -> Result<FillResult, GenError> {
    require_f3(v)?;
    let pn = stepped::generate_pn(v, n, fsalgo::DEFAULT_BUDGET)?;
    fill_status(v, &pn, r)
}

fn fill_status(v: &Vec3, pn: &Pattern, r: i64) -> Result<FillResult, GenError> {
    let spec = PlaneSpec::naive(v)?;
    let verts = distinguished_vertices(pn);
    let ff = FastForm::new(&spec);
    for x in &verts {
        if !ff.contains(x)? {
            return Err(GenError::InternalInconsistency(format!("vertex {x:?} of Pn lies outside the naive plane")));
        }
    }
    let window = planes::enumerate(&spec, &Window::new(r))?;
    let have: HashSet<&IVec3> = verts.iter().collect();
    let missing: PointSet = window.into_iter().filter(|x| !have.contains(x)).collect();
    Ok(if missing.is_empty() { FillResult::Filled } else { FillResult::MissingPoints(missing) })
}

/// Smallest `n ≤ max_n` with `Pₙ` filling the naive plane on radius `r`.
pub fn pn_fill_depth(v: &Vec3, r: i64, max_n: usize) -> Result<Option<usize>, GenError> {
    require_f3(v)?;
    let e = fsalgo::expand(v, fsalgo::DEFAULT_BUDGET)?;
    for n in 0..=max_n {
        let digits = e.prefix(n).ok_or(GenError::ExpansionTooShort { needed: n, available: e.digits.len() })?;
        let pn = stepped::sigma_word(&digits, &Pattern::unit_corner());
        if fill_status(v, &pn, r)? == FillResult::Filled {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Positive eigenvector, sorted and scaled to `v₁ = 1`, for the dominant
/// eigenvalue of `M_{w₁} ⋯ M_{w_k}`; its expansion is `w` repeated.
pub fn perron_vector(word: &[u8]) -> Result<Vec3, GenError> {
    if word.is_empty() || word.iter().any(|d| !(1..=3).contains(d)) {
        return Err(GenError::InvalidArgument("word must be a nonempty string over 1, 2, 3".into()));
    }
    let a = word
        .iter()
        .try_fold(IMat3::IDENTITY, |acc, &d| acc.checked_mul(&fsalgo::fs_matrix(d)))
        .ok_or(GenError::Overflow)?;
    let m = a.0;
    let r = |x: i64| BigRational::from_integer(x.into());
    let tr = m[0][0] + m[1][1] + m[2][2];
    let c2 = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let charpoly = QPoly::new(vec![r(-a.det()), r(c2), r(-tr), r(1)]);

    // isolate the largest real root
    let mut hi = charpoly.root_bound();
    let mut lo = BigRational::zero();
    if charpoly.count_roots(&lo, &hi) == 0 {
        return Err(GenError::InternalInconsistency("no positive eigenvalue".into()));
    }
    while charpoly.count_roots(&lo, &hi) > 1 {
        let mid = (&lo + &hi) / r(2);
        if charpoly.count_roots(&mid, &hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    while charpoly.eval(&lo).is_zero() || charpoly.eval(&hi).is_zero() {
        lo = (&lo + &hi) / r(2);
    }
    let lambda = Scalar::algebraic(&charpoly, &lo, &hi)?;

    // a nonzero column of adj(A − λI) spans the eigenspace
    let b: Vec<Vec<Scalar>> = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let e = Scalar::from_int(m[i][j]);
                    if i == j {
                        e.try_sub(&lambda)
                    } else {
                        Ok(e)
                    }
                })
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, NumError>>()?;
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| -> Result<Scalar, NumError> {
        b[r0][c0].try_mul(&b[r1][c1])?.try_sub(&b[r0][c1].try_mul(&b[r1][c0])?)
    };
    let mut vec: Option<[Scalar; 3]> = None;
    for col in 0..3 {
        // column `col` of the adjugate: cofactors of row `col`
        let others: Vec<usize> = (0..3).filter(|&k| k != col).collect();
        let (r0, r1) = (others[0], others[1]);
        let c = [
            minor(r0, r1, 1, 2)?,
            minor(r0, r1, 0, 2)?.neg(),
            minor(r0, r1, 0, 1)?,
        ];
        // sign pattern of cofactors for row `col`
        let c = if col == 1 { [c[0].neg(), c[1].neg(), c[2].neg()] } else { c };
        if c.iter().any(|x| !x.is_zero()) {
            vec = Some(c);
            break;
        }
    }
    let c = vec.ok_or_else(|| GenError::InternalInconsistency("eigenspace is not one-dimensional".into()))?;
    let scale = c.iter().find(|x| !x.is_zero()).unwrap().clone();
    let c = [c[0].try_div(&scale)?, c[1].try_div(&scale)?, c[2].try_div(&scale)?];
    let v = Vec3::new(c[0].clone(), c[1].clone(), c[2].clone())?;
    let (sorted, _) = v.sorted()?;
    let v = Vec3::new(
        Scalar::one(),
        sorted.get(1).try_div(sorted.get(0))?,
        sorted.get(2).try_div(sorted.get(0))?,
    )?;
    // exact check: A v = λ v
    for i in 0..3 {
        let mut acc = Scalar::zero();
        for j in 0..3 {
            acc = acc.try_add(&Scalar::from_int(m[i][j]).try_mul(v.get(j))?)?;
        }
        if acc != lambda.try_mul(v.get(i))? {
            return Err(GenError::InternalInconsistency("eigenvector equation fails".into()));
        }
    }
    if !v.0.iter().all(|x| x.is_positive().unwrap_or(false)) {
        return Err(GenError::InternalInconsistency("dominant eigenvector is not positive".into()));
    }
    Ok(v)
}
