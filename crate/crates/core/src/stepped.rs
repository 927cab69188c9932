//! Unit faces, stepped planes, dual substitutions E₁*(σ) and the patterns
//! `Pₙ` they generate.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::exactnum::{NumError, Vec3};
use crate::fsalgo::{self, FsError};
use crate::linalg::{add_i, IMat3, IVec3};
use crate::planes::{FastForm, PlaneError, PlaneSpec, PointSet, Window};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SteppedError {
    #[error("substitution is not unimodular (det = {0})")]
    NotUnimodular(i64),
    #[error("expansion has {available} digits, {needed} requested")]
    ExpansionTooShort { needed: usize, available: usize },
    #[error(transparent)]
    Fs(#[from] FsError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Plane(#[from] PlaneError),
    #[error("integer overflow in face coordinates")]
    Overflow,
}

/// Unit face `[x, t]⋆`: the unit square at `x` orthogonal to `e_t`.
/// Ordered by type first, then by position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitFace {
    pub t: u8,
    pub x: IVec3,
}

impl UnitFace {
    pub const fn new(x: IVec3, t: u8) -> Self {
        UnitFace { t, x }
    }

    pub fn translate(&self, d: &IVec3) -> UnitFace {
        UnitFace { t: self.t, x: add_i(&self.x, d) }
    }

    /// The four corners of the square, in cyclic order.
    pub fn vertices(&self) -> [IVec3; 4] {
        let (a, b) = match self.t {
            1 => ([0, 1, 0], [0, 0, 1]),
            2 => ([1, 0, 0], [0, 0, 1]),
            _ => ([1, 0, 0], [0, 1, 0]),
        };
        let x = self.x;
        [x, add_i(&x, &a), add_i(&add_i(&x, &a), &b), add_i(&x, &b)]
    }
}

impl fmt::Display for UnitFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[({},{},{}),{}]", self.x[0], self.x[1], self.x[2], self.t)
    }
}

/// Finite set of unit faces in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pattern {
    faces: BTreeSet<UnitFace>,
}

impl Pattern {
    pub fn new() -> Self {
        Pattern::default()
    }

    /// The lower unit cube corner `𝒰 = [0,1]⋆ ∪ [0,2]⋆ ∪ [0,3]⋆`.
    pub fn unit_corner() -> Self {
        [1, 2, 3].into_iter().map(|t| UnitFace::new([0, 0, 0], t)).collect()
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn contains(&self, f: &UnitFace) -> bool {
        self.faces.contains(f)
    }

    pub fn insert(&mut self, f: UnitFace) -> bool {
        self.faces.insert(f)
    }

    pub fn iter(&self) -> impl Iterator<Item = &UnitFace> {
        self.faces.iter()
    }

    pub fn union(&self, o: &Pattern) -> Pattern {
        Pattern { faces: self.faces.union(&o.faces).cloned().collect() }
    }

    pub fn difference(&self, o: &Pattern) -> Pattern {
        Pattern { faces: self.faces.difference(&o.faces).cloned().collect() }
    }

    pub fn intersection(&self, o: &Pattern) -> Pattern {
        Pattern { faces: self.faces.intersection(&o.faces).cloned().collect() }
    }

    pub fn is_subset(&self, o: &Pattern) -> bool {
        self.faces.is_subset(&o.faces)
    }

    pub fn translate(&self, d: &IVec3) -> Pattern {
        self.faces.iter().map(|f| f.translate(d)).collect()
    }

    /// Largest `|coordinate|` of any face vertex.
    pub fn extent(&self) -> i64 {
        self.faces.iter().flat_map(|f| f.vertices()).flat_map(|v| v.map(i64::abs)).max().unwrap_or(0)
    }

    /// Axis-aligned bounding box of the distinguished vertices.
    pub fn bounding_box(&self) -> Option<(IVec3, IVec3)> {
        let mut it = self.faces.iter();
        let f = it.next()?;
        let (mut lo, mut hi) = (f.x, f.x);
        for g in it {
            for i in 0..3 {
                lo[i] = lo[i].min(g.x[i]);
                hi[i] = hi[i].max(g.x[i]);
            }
        }
        Some((lo, hi))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.faces.iter().map(|f| serde_json::json!({"x": f.x, "type": f.t})).collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Option<Pattern> {
        v.as_array()?
            .iter()
            .map(|f| {
                let x = f.get("x")?.as_array()?;
                let x: Vec<i64> = x.iter().map(|c| c.as_i64()).collect::<Option<_>>()?;
                let t = f.get("type")?.as_u64()? as u8;
                ((1..=3).contains(&t) && x.len() == 3).then(|| UnitFace::new([x[0], x[1], x[2]], t))
            })
            .collect()
    }

    /// OFF mesh with one quadrilateral per face.
    pub fn to_off(&self) -> String {
        let mut verts: Vec<IVec3> = self.faces.iter().flat_map(|f| f.vertices()).collect();
        verts.sort();
        verts.dedup();
        let mut s = format!("OFF\n{} {} 0\n", verts.len(), self.faces.len());
        for v in &verts {
            s.push_str(&format!("{} {} {}\n", v[0], v[1], v[2]));
        }
        for f in &self.faces {
            let idx: Vec<String> =
                f.vertices().iter().map(|v| verts.binary_search(v).unwrap().to_string()).collect();
            s.push_str(&format!("4 {}\n", idx.join(" ")));
        }
        s
    }
}

impl FromIterator<UnitFace> for Pattern {
    fn from_iter<I: IntoIterator<Item = UnitFace>>(it: I) -> Self {
        Pattern { faces: it.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a Pattern {
    type Item = &'a UnitFace;
    type IntoIter = std::collections::btree_set::Iter<'a, UnitFace>;
    fn into_iter(self) -> Self::IntoIter {
        self.faces.iter()
    }
}

/// Word morphism on the alphabet {1,2,3}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Substitution {
    pub images: [Vec<u8>; 3],
}

impl Substitution {
    pub fn new(a: &[u8], b: &[u8], c: &[u8]) -> Self {
        Substitution { images: [a.to_vec(), b.to_vec(), c.to_vec()] }
    }

    pub fn identity() -> Self {
        Substitution::new(&[1], &[2], &[3])
    }

    /// `σᵢ` of the fully subtractive algorithm.
    pub fn fs(i: u8) -> Self {
        match i {
            1 => Substitution::new(&[1], &[2, 1], &[3, 1]),
            2 => Substitution::new(&[2], &[1, 2], &[3, 2]),
            3 => Substitution::new(&[3], &[1, 3], &[2, 3]),
            _ => panic!("digit must be 1, 2 or 3"),
        }
    }

    pub fn apply_word(&self, w: &[u8]) -> Vec<u8> {
        w.iter().flat_map(|&a| self.images[a as usize - 1].iter().copied()).collect()
    }

    /// `(self ∘ other)(a) = self(other(a))`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        Substitution { images: other.images.clone().map(|w| self.apply_word(&w)) }
    }
}

/// Letter counts of a word.
pub fn parikh(w: &[u8]) -> IVec3 {
    let mut v = [0i64; 3];
    for &a in w {
        v[a as usize - 1] += 1;
    }
    v
}

/// `m[i][j]` = occurrences of letter `i` in `σ(j)`; must be unimodular.
pub fn incidence_matrix(s: &Substitution) -> Result<IMat3, SteppedError> {
    let mut m = [[0i64; 3]; 3];
    for (j, w) in s.images.iter().enumerate() {
        let p = parikh(w);
        for i in 0..3 {
            m[i][j] = p[i];
        }
    }
    let m = IMat3(m);
    let d = m.det();
    if d.abs() != 1 {
        return Err(SteppedError::NotUnimodular(d));
    }
    Ok(m)
}

/// Face rules of E₁*(σ): `[x, i]⋆ ↦ ⋃ [M⁻¹x + c, j]⋆` over `(c, j) ∈ rules[i]`.
#[derive(Clone, Debug)]
pub struct DualRules {
    pub inv: IMat3,
    pub rules: [Vec<(IVec3, u8)>; 3],
}

impl DualRules {
    pub fn new(s: &Substitution) -> Result<Self, SteppedError> {
        let m = incidence_matrix(s)?;
        let inv = m.inverse_unimodular().ok_or(SteppedError::NotUnimodular(m.det()))?;
        let mut rules: [Vec<(IVec3, u8)>; 3] = Default::default();
        for (j, w) in s.images.iter().enumerate() {
            for (pos, &a) in w.iter().enumerate() {
                // σ(j) = p · a · s
                let suffix = &w[pos + 1..];
                rules[a as usize - 1].push((inv.apply(&parikh(suffix)), j as u8 + 1));
            }
        }
        Ok(DualRules { inv, rules })
    }

    pub fn image_of(&self, f: &UnitFace) -> Result<Vec<UnitFace>, SteppedError> {
        let base = self.inv.checked_apply(&f.x).ok_or(SteppedError::Overflow)?;
        Ok(self.rules[f.t as usize - 1].iter().map(|(c, j)| UnitFace::new(add_i(&base, c), *j)).collect())
    }

    pub fn apply(&self, p: &Pattern) -> Result<Pattern, SteppedError> {
        let faces: Vec<&UnitFace> = p.iter().collect();
        let parts: Vec<Result<Vec<UnitFace>, SteppedError>> = if faces.len() > 4096 {
            faces.par_chunks(1024).map(|ch| self.apply_chunk(ch)).collect()
        } else {
            vec![self.apply_chunk(&faces)]
        };
        let mut out = Pattern::new();
        for part in parts {
            out.faces.extend(part?);
        }
        Ok(out)
    }

    fn apply_chunk(&self, faces: &[&UnitFace]) -> Result<Vec<UnitFace>, SteppedError> {
        let mut v = Vec::with_capacity(faces.len() * 2);
        for f in faces {
            v.extend(self.image_of(f)?);
        }
        Ok(v)
    }
}

/// E₁*(σ) applied to a pattern.
pub fn dual_apply(s: &Substitution, p: &Pattern) -> Result<Pattern, SteppedError> {
    DualRules::new(s)?.apply(p)
}

fn fs_rules(i: u8) -> &'static DualRules {
    use std::sync::OnceLock;
    static RULES: OnceLock<[DualRules; 3]> = OnceLock::new();
    &RULES.get_or_init(|| [1u8, 2, 3].map(|k| DualRules::new(&Substitution::fs(k)).expect("unimodular")))
        [i as usize - 1]
}

/// `Σᵢ = E₁*(σᵢ)` with precomputed face rules.
pub fn sigma_fs(i: u8, p: &Pattern) -> Pattern {
    fs_rules(i).apply(p).expect("face coordinates overflowed")
}

/// `Σᵢ` of a single face.
pub fn sigma_fs_face(i: u8, f: &UnitFace) -> Vec<UnitFace> {
    fs_rules(i).image_of(f).expect("face coordinates overflowed")
}

/// `Σ_{w₁} ⋯ Σ_{w_k}(p)`, applying the last letter first.
pub fn sigma_word(word: &[u8], p: &Pattern) -> Pattern {
    word.iter().rev().fold(p.clone(), |acc, &i| sigma_fs(i, &acc))
}

/// All faces `g` with `f ∈ Σᵢ(g)`, from the closed-form preimage table.
pub fn dual_preimage(i: u8, f: &UnitFace) -> Pattern {
    let [x, y, z] = f.x;
    let s = x + y + z;
    let (main, shifted) = match i {
        1 => ([s, y, z], [s - 1, y, z]),
        2 => ([y, s, z], [y, s - 1, z]),
        3 => ([y, z, s], [y, z, s - 1]),
        _ => panic!("digit must be 1, 2 or 3"),
    };
    let mut p = Pattern::new();
    p.insert(UnitFace::new(main, i));
    if f.t != 1 {
        // types 2, 3 come from the two-letter images, letters other than i in order
        let others: Vec<u8> = (1..=3).filter(|&j| j != i).collect();
        p.insert(UnitFace::new(shifted, others[f.t as usize - 2]));
    }
    p
}

/// `0 ≤ ⟨x,v⟩ < ⟨e_t,v⟩`.
pub fn face_in_plane(v: &Vec3, f: &UnitFace) -> Result<bool, NumError> {
    crate::planes::contains(&PlaneSpec::new(v.clone(), v.get(f.t as usize - 1).clone()), &f.x)
}

/// Membership tests for the faces of one stepped plane.
pub struct SteppedPlane {
    forms: Vec<Option<FastForm>>,
}

impl SteppedPlane {
    pub fn new(v: &Vec3) -> Result<Self, NumError> {
        let forms = (0..3)
            .map(|i| {
                let w = v.get(i);
                Ok(if w.is_positive()? { Some(FastForm::new(&PlaneSpec::new(v.clone(), w.clone()))) } else { None })
            })
            .collect::<Result<_, NumError>>()?;
        Ok(SteppedPlane { forms })
    }

    pub fn contains(&self, f: &UnitFace) -> Result<bool, NumError> {
        match &self.forms[f.t as usize - 1] {
            Some(ff) => ff.contains(&f.x),
            None => Ok(false),
        }
    }

    /// Faces whose distinguished vertex lies in the window.
    pub fn faces_in_window(&self, w: &Window) -> Result<Pattern, NumError> {
        let r = w.radius;
        let a = w.anchor;
        self.faces_in_box([a[0] - r, a[1] - r, a[2] - r], [a[0] + r, a[1] + r, a[2] + r])
    }

    /// Faces whose distinguished vertex lies in the box `[lo, hi]`.
    pub fn faces_in_box(&self, lo: IVec3, hi: IVec3) -> Result<Pattern, NumError> {
        let parts: Vec<Result<Vec<UnitFace>, NumError>> = (lo[0]..=hi[0])
            .into_par_iter()
            .map(|x| {
                let mut out = Vec::new();
                for y in lo[1]..=hi[1] {
                    for z in lo[2]..=hi[2] {
                        for t in 1..=3 {
                            let f = UnitFace::new([x, y, z], t);
                            if self.contains(&f)? {
                                out.push(f);
                            }
                        }
                    }
                }
                Ok(out)
            })
            .collect();
        let mut p = Pattern::new();
        for part in parts {
            p.faces.extend(part?);
        }
        Ok(p)
    }
}

/// `Pₙ = Σ_{i₁} ⋯ Σ_{iₙ}(𝒰)` for the expansion of `v`.
pub fn generate_pn(v: &Vec3, n: usize, budget: usize) -> Result<Pattern, SteppedError> {
    let e = fsalgo::expand(v, budget.max(n))?;
    let digits = e
        .prefix(n)
        .ok_or(SteppedError::ExpansionTooShort { needed: n, available: e.digits.len() })?;
    Ok(sigma_word(&digits, &Pattern::unit_corner()))
}

/// `P₀ ⊆ P₁ ⊆ … ⊆ Pₙ` for a digit sequence.
pub fn pn_sequence(digits: &[u8]) -> Vec<Pattern> {
    (0..=digits.len()).map(|k| sigma_word(&digits[..k], &Pattern::unit_corner())).collect()
}

/// `{x : [x,i]⋆ ∈ p}` in lexicographic order.
pub fn distinguished_vertices(p: &Pattern) -> PointSet {
    let mut pts: Vec<IVec3> = p.iter().map(|f| f.x).collect();
    pts.sort();
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{parse_vec3, Bindings};
    use crate::fsalgo::fs_matrix;

    fn f(x: IVec3, t: u8) -> UnitFace {
        UnitFace::new(x, t)
    }

    fn pat(faces: &[UnitFace]) -> Pattern {
        faces.iter().cloned().collect()
    }

    #[test]
    fn face_membership_examples() {
        let one = parse_vec3("1,1,1", &Bindings::new()).unwrap();
        assert!(face_in_plane(&one, &f([0, 0, 0], 3)).unwrap());
        assert!(!face_in_plane(&one, &f([1, 0, 0], 3)).unwrap());
        let v = parse_vec3("1,2,3", &Bindings::new()).unwrap();
        assert!(!face_in_plane(&v, &f([-1, 0, 1], 2)).unwrap());
    }

    #[test]
    fn incidence_matrices_are_transposes() {
        for i in 1..=3 {
            assert_eq!(incidence_matrix(&Substitution::fs(i)).unwrap(), fs_matrix(i).transpose());
        }
        assert_eq!(incidence_matrix(&Substitution::identity()).unwrap(), IMat3::IDENTITY);
        assert!(matches!(
            incidence_matrix(&Substitution::new(&[1, 1], &[2], &[3])),
            Err(SteppedError::NotUnimodular(2))
        ));
    }

    #[test]
    fn dual_examples() {
        let u = Pattern::unit_corner();
        let s1 = Substitution::fs(1);
        assert_eq!(dual_apply(&s1, &pat(&[f([0, 0, 0], 1)])).unwrap(), u);
        assert_eq!(dual_apply(&s1, &pat(&[f([0, 0, 0], 2)])).unwrap(), pat(&[f([1, 0, 0], 2)]));
        let grown = u.union(&pat(&[f([1, 0, 0], 2), f([1, 0, 0], 3)]));
        for i in 1..=3 {
            assert_eq!(dual_apply(&Substitution::fs(i), &u).unwrap(), grown);
            assert_eq!(sigma_fs(i, &u), grown);
            assert!(sigma_fs(i, &Pattern::new()).is_empty());
        }
        assert_eq!(sigma_fs(2, &pat(&[f([0, 0, 0], 2)])), u);
        assert_eq!(distinguished_vertices(&grown), vec![[0, 0, 0], [1, 0, 0]]);
    }

    #[test]
    fn preimage_examples() {
        assert_eq!(dual_preimage(1, &f([0, 0, 0], 1)), pat(&[f([0, 0, 0], 1)]));
        assert_eq!(dual_preimage(2, &f([1, 0, 0], 3)), pat(&[f([0, 1, 0], 2), f([0, 0, 0], 3)]));
        assert_eq!(dual_preimage(2, &f([2, 2, 0], 2)), pat(&[f([2, 4, 0], 2), f([2, 3, 0], 1)]));
        assert_eq!(dual_preimage(3, &f([2, 2, 0], 3)), pat(&[f([2, 0, 4], 3), f([2, 0, 3], 2)]));
    }

    #[test]
    fn contravariance_on_fs_pairs() {
        let p = pat(&[f([0, 0, 0], 1), f([2, -1, 0], 2), f([-1, 3, 1], 3)]);
        for a in 1..=3 {
            for b in 1..=3 {
                let sa = Substitution::fs(a);
                let sb = Substitution::fs(b);
                let lhs = dual_apply(&sa.compose(&sb), &p).unwrap();
                let rhs = dual_apply(&sb, &dual_apply(&sa, &p).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn off_export_shape() {
        let off = Pattern::unit_corner().to_off();
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("7 3 0"));
        let p = Pattern::unit_corner();
        assert_eq!(Pattern::from_json(&p.to_json()), Some(p));
    }
}
