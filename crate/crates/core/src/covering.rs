//! Template covers of face patterns, annuli and forbidden-pattern scans.

use std::collections::{HashMap, HashSet, VecDeque};

use serde_json::json;
use thiserror::Error;

use crate::exactnum::{NumError, Vec3};
use crate::linalg::{sub_i, IVec3};
use crate::stepped::{sigma_fs, Pattern, SteppedPlane, UnitFace};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CoverError {
    #[error("pattern comes within {0} of the ambient window boundary")]
    WindowTooSmall(i64),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TemplateName {
    Edge,
    Fs,
    Forbidden4,
}

#[derive(Clone, Debug)]
pub struct TemplateSet {
    pub name: TemplateName,
    pub patterns: Vec<Pattern>,
}

fn pat(faces: &[(IVec3, u8)]) -> Pattern {
    faces.iter().map(|&(x, t)| UnitFace::new(x, t)).collect()
}

/// Translate so that the smallest face sits at the origin.
fn normalize(p: &Pattern) -> Pattern {
    match p.iter().next() {
        Some(f) => p.translate(&f.x.map(|c| -c)),
        None => p.clone(),
    }
}

/// Faces sharing a full edge (two vertices) with `[0, t]⋆`.
fn edge_offsets(t: u8) -> Vec<UnitFace> {
    let f = UnitFace::new([0, 0, 0], t);
    let fv: HashSet<IVec3> = f.vertices().into_iter().collect();
    let mut out = Vec::new();
    for x in -1..=1 {
        for y in -1..=1 {
            for z in -1..=1 {
                for s in 1..=3 {
                    let g = UnitFace::new([x, y, z], s);
                    if g != f && g.vertices().iter().filter(|v| fv.contains(*v)).count() == 2 {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

fn edge_offset_table() -> &'static [Vec<UnitFace>; 3] {
    use std::sync::OnceLock;
    static T: OnceLock<[Vec<UnitFace>; 3]> = OnceLock::new();
    T.get_or_init(|| [1, 2, 3].map(edge_offsets))
}

/// Faces sharing an edge with `f`.
pub fn edge_neighbours(f: &UnitFace) -> impl Iterator<Item = UnitFace> + '_ {
    edge_offset_table()[f.t as usize - 1].iter().map(move |g| g.translate(&f.x))
}

/// Some stepped plane with positive integer normal contains a translate of
/// `{[0,i]⋆, [y,j]⋆}`.
fn pair_feasible(i: u8, y: &IVec3, j: u8) -> bool {
    const GRID: i64 = 7;
    for a in 1..=GRID {
        for b in 1..=GRID {
            for c in 1..=GRID {
                let v = [a, b, c];
                let d = a * y[0] + b * y[1] + c * y[2];
                let (vi, vj) = (v[i as usize - 1], v[j as usize - 1]);
                // ⟨x,v⟩ = k ranges over all integers when gcd(v) = 1
                if (0..vi).any(|k| 0 <= k + d && k + d < vj) {
                    return true;
                }
            }
        }
    }
    false
}

impl TemplateSet {
    /// Edge-connected two-face patterns occurring in stepped planes.
    pub fn l_edge() -> Result<Self, CoverError> {
        let mut seen: Vec<Pattern> = Vec::new();
        for t in 1..=3u8 {
            for g in edge_offsets(t) {
                let p = normalize(&pat(&[([0, 0, 0], t), (g.x, g.t)]));
                if seen.contains(&p) {
                    continue;
                }
                let fs: Vec<UnitFace> = p.iter().cloned().collect();
                let (f0, f1) = (fs[0], fs[1]);
                if pair_feasible(f0.t, &sub_i(&f1.x, &f0.x), f1.t) {
                    seen.push(p);
                }
            }
        }
        if seen.len() != 12 {
            return Err(CoverError::InternalInconsistency(format!(
                "found {} edge-connected two-face patterns, expected 12",
                seen.len()
            )));
        }
        seen.sort_by(|a, b| a.iter().cmp(b.iter()));
        Ok(TemplateSet { name: TemplateName::Edge, patterns: seen })
    }

    pub fn l_fs() -> Self {
        let patterns = vec![
            pat(&[([0, 0, 0], 2), ([0, 0, 0], 1)]),
            pat(&[([0, 0, 0], 1), ([-1, 1, 0], 2)]),
            pat(&[([0, 0, 0], 1), ([0, 0, 0], 3)]),
            pat(&[([0, 0, 0], 1), ([-1, 0, 1], 3)]),
            pat(&[([0, 0, 0], 2), ([0, 0, 0], 3)]),
            pat(&[([0, -1, 1], 3), ([0, 0, 0], 2)]),
            pat(&[([0, 0, 0], 2), ([1, 0, 0], 2), ([0, 0, 0], 3)]),
            pat(&[([0, 0, 0], 3), ([1, 0, 0], 3), ([0, 0, 0], 2)]),
            pat(&[([0, 0, 0], 3), ([0, 1, 0], 3), ([0, 0, 0], 1)]),
        ];
        TemplateSet { name: TemplateName::Fs, patterns }
    }

    pub fn forbidden4() -> Self {
        let patterns = vec![
            pat(&[([0, 0, 0], 1), ([0, 1, 0], 1)]),
            pat(&[([0, 0, 0], 1), ([0, 0, 1], 1)]),
            pat(&[([0, 0, 0], 2), ([0, 0, 1], 2)]),
            pat(&[([0, 0, 0], 3), ([1, 1, 0], 3)]),
        ];
        TemplateSet { name: TemplateName::Forbidden4, patterns }
    }
}

/// All translates of templates contained in `p`, deduplicated, in
/// canonical order.
pub fn placements(p: &Pattern, templates: &TemplateSet) -> Vec<Pattern> {
    let mut out: Vec<Pattern> = Vec::new();
    let mut seen: HashSet<Vec<UnitFace>> = HashSet::new();
    for q in &templates.patterns {
        let Some(q0) = q.iter().next() else { continue };
        for f in p.iter().filter(|f| f.t == q0.t) {
            let d = sub_i(&f.x, &q0.x);
            if q.iter().all(|g| p.contains(&g.translate(&d))) {
                let placed = q.translate(&d);
                if seen.insert(placed.iter().cloned().collect()) {
                    out.push(placed);
                }
            }
        }
    }
    out.sort_by(|a, b| a.iter().cmp(b.iter()));
    out
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Outcome of a cover test, with witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverReport {
    pub covered: bool,
    /// Faces lying in no template placement.
    pub uncovered: Vec<UnitFace>,
    /// Number of placement-chain classes among the checked faces.
    pub classes: usize,
    /// Two checked faces with no linking chain, if any.
    pub split: Option<(UnitFace, UnitFace)>,
    pub placements: Vec<Pattern>,
}

impl CoverReport {
    /// A chain of placements from `a` to `b`, consecutive ones sharing a face.
    pub fn chain(&self, a: &UnitFace, b: &UnitFace) -> Option<Vec<Pattern>> {
        let starts: Vec<usize> = (0..self.placements.len()).filter(|&k| self.placements[k].contains(a)).collect();
        let mut prev: HashMap<usize, usize> = HashMap::new();
        let mut queue: VecDeque<usize> = starts.iter().cloned().collect();
        let mut seen: HashSet<usize> = starts.into_iter().collect();
        while let Some(k) = queue.pop_front() {
            if self.placements[k].contains(b) {
                let mut path = vec![self.placements[k].clone()];
                let mut cur = k;
                while let Some(&p) = prev.get(&cur) {
                    path.push(self.placements[p].clone());
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for j in 0..self.placements.len() {
                if !seen.contains(&j) && !self.placements[j].intersection(&self.placements[k]).is_empty() {
                    seen.insert(j);
                    prev.insert(j, k);
                    queue.push_back(j);
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "covered": self.covered,
            "uncovered": Pattern::from_iter(self.uncovered.iter().cloned()).to_json(),
            "classes": self.classes,
            "split": self.split.map(|(a, b)| Pattern::from_iter([a, b]).to_json()),
        })
    }
}

/// Cover test where faces satisfying `exempt` need not lie in a placement
/// and need not be chained to the rest.
pub fn is_covered_except(p: &Pattern, templates: &TemplateSet, exempt: impl Fn(&UnitFace) -> bool) -> CoverReport {
    let faces: Vec<UnitFace> = p.iter().cloned().collect();
    let index: HashMap<UnitFace, usize> = faces.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let pls = placements(p, templates);
    let mut dsu = Dsu::new(faces.len());
    let mut in_placement = vec![false; faces.len()];
    for q in &pls {
        let ids: Vec<usize> = q.iter().map(|f| index[f]).collect();
        for &i in &ids {
            in_placement[i] = true;
            dsu.union(ids[0], i);
        }
    }
    let checked: Vec<usize> = (0..faces.len()).filter(|&i| !exempt(&faces[i])).collect();
    let uncovered: Vec<UnitFace> = checked.iter().filter(|&&i| !in_placement[i]).map(|&i| faces[i]).collect();
    let mut roots: Vec<(usize, usize)> = Vec::new();
    for &i in &checked {
        let r = dsu.find(i);
        if !roots.iter().any(|&(rr, _)| rr == r) {
            roots.push((r, i));
        }
    }
    let split = (roots.len() > 1).then(|| (faces[roots[0].1], faces[roots[1].1]));
    CoverReport { covered: uncovered.is_empty() && roots.len() <= 1, uncovered, classes: roots.len(), split, placements: pls }
}

/// Every face lies in a placement and any two are chained by placements
/// sharing faces. The empty pattern counts as covered.
pub fn is_covered(p: &Pattern, templates: &TemplateSet) -> CoverReport {
    is_covered_except(p, templates, |_| false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongCoverReport {
    pub cover: CoverReport,
    /// Edge placements with no completion inside the pattern.
    pub incomplete: Vec<Pattern>,
}

impl StrongCoverReport {
    pub fn holds(&self) -> bool {
        self.cover.covered && self.incomplete.is_empty()
    }
}

/// Covered by `L_FS`, and every edge-connected pair inside `p` extends to an
/// `L_FS` translate inside `p`.
pub fn is_strongly_covered(p: &Pattern) -> Result<StrongCoverReport, CoverError> {
    let fs = TemplateSet::l_fs();
    let cover = is_covered(p, &fs);
    let mut incomplete = Vec::new();
    for x in placements(p, &TemplateSet::l_edge()?) {
        let x0 = *x.iter().next().unwrap();
        let completes = fs.patterns.iter().any(|y| {
            y.iter().filter(|g| g.t == x0.t).any(|g| {
                let d = sub_i(&x0.x, &g.x);
                let placed = y.translate(&d);
                x.is_subset(&placed) && placed.is_subset(p)
            })
        });
        if !completes {
            incomplete.push(x);
        }
    }
    Ok(StrongCoverReport { cover, incomplete })
}

/// Closed unit squares intersect, i.e. the faces share a vertex.
pub fn touches(f: &UnitFace, g: &UnitFace) -> bool {
    let fv = f.vertices();
    g.vertices().iter().any(|v| fv.contains(v))
}

/// Ambient faces of a stepped plane on a box.
#[derive(Clone, Debug)]
pub struct Ambient {
    pub faces: Pattern,
    pub lo: IVec3,
    pub hi: IVec3,
}

impl Ambient {
    /// Faces of `Γ_v` on the bounding box of `p` enlarged by `margin`.
    pub fn around(v: &Vec3, p: &Pattern, margin: i64) -> Result<Self, CoverError> {
        let (lo, hi) = p.bounding_box().unwrap_or(([0; 3], [0; 3]));
        let lo = lo.map(|c| c - margin);
        let hi = hi.map(|c| c + margin);
        Ok(Ambient { faces: SteppedPlane::new(v)?.faces_in_box(lo, hi)?, lo, hi })
    }

    /// Distance from the distinguished vertex to the box boundary.
    pub fn depth(&self, f: &UnitFace) -> i64 {
        (0..3).map(|i| (f.x[i] - self.lo[i]).min(self.hi[i] - f.x[i])).min().unwrap()
    }
}

/// Faces this close to the ambient boundary are exempt from chain checks.
pub const BOUNDARY_BAND: i64 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnulusCheck {
    /// Conditions 1–4: coverage, strong coverage of `A`, disjointness,
    /// closure separation.
    pub conditions: [bool; 4],
    pub cover_p: CoverReport,
    pub cover_ap: CoverReport,
    pub cover_rest: CoverReport,
    pub strong: StrongCoverReport,
    pub overlap: Vec<UnitFace>,
    /// Faces of `P` touching faces outside `P ∪ A`.
    pub touching: Vec<(UnitFace, UnitFace)>,
}

impl AnnulusCheck {
    pub fn passes(&self) -> bool {
        self.conditions.iter().all(|&c| c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "pass": self.passes(),
            "conditions": {
                "covered": self.conditions[0],
                "strongly_covered": self.conditions[1],
                "disjoint": self.conditions[2],
                "separated": self.conditions[3],
            },
            "cover_p": self.cover_p.to_json(),
            "cover_a_union_p": self.cover_ap.to_json(),
            "cover_complement": self.cover_rest.to_json(),
            "incomplete_edges": self.strong.incomplete.iter().map(Pattern::to_json).collect::<Vec<_>>(),
            "overlap": Pattern::from_iter(self.overlap.iter().cloned()).to_json(),
            "touching": self.touching.iter().map(|(a, b)| Pattern::from_iter([*a, *b]).to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Checks that `A` is an `L_FS`-annulus of `P` inside the windowed plane.
pub fn check_annulus(p: &Pattern, a: &Pattern, ambient: &Ambient) -> Result<AnnulusCheck, CoverError> {
    let ap = a.union(p);
    if let Some(f) = ap.iter().find(|f| ambient.depth(f) <= BOUNDARY_BAND) {
        return Err(CoverError::WindowTooSmall(ambient.depth(f)));
    }
    let fs = TemplateSet::l_fs();
    let rest = ambient.faces.difference(&ap);
    let cover_p = is_covered(p, &fs);
    let cover_ap = is_covered(&ap, &fs);
    let cover_rest = is_covered_except(&rest, &fs, |f| ambient.depth(f) <= BOUNDARY_BAND);
    let strong = is_strongly_covered(a)?;
    let overlap: Vec<UnitFace> = p.intersection(a).iter().cloned().collect();

    let mut at_vertex: HashMap<IVec3, Vec<UnitFace>> = HashMap::new();
    for f in p.iter() {
        for v in f.vertices() {
            at_vertex.entry(v).or_default().push(*f);
        }
    }
    let mut touching = Vec::new();
    for g in rest.iter() {
        if let Some(f) = g.vertices().iter().find_map(|v| at_vertex.get(v).map(|fs| fs[0])) {
            touching.push((f, *g));
        }
    }
    let conditions = [
        cover_p.covered && cover_ap.covered && cover_rest.covered,
        strong.holds(),
        overlap.is_empty(),
        touching.is_empty(),
    ];
    Ok(AnnulusCheck { conditions, cover_p, cover_ap, cover_rest, strong, overlap, touching })
}

/// Every translate of a forbidden pattern inside `faces`.
pub fn scan_forbidden(faces: &Pattern) -> Vec<Pattern> {
    placements(faces, &TemplateSet::forbidden4())
}

/// `Σᵢ(Q)` is `L_FS`-covered, for each `Q ∈ L_FS`.
pub fn image_covered_table(i: u8) -> Vec<(Pattern, bool)> {
    let fs = TemplateSet::l_fs();
    fs.patterns.iter().map(|q| (q.clone(), is_covered(&sigma_fs(i, q), &fs).covered)).collect()
}

/// Conjunction of [`image_covered_table`].
pub fn image_covered_lemma_check(i: u8) -> bool {
    image_covered_table(i).iter().all(|(_, ok)| *ok)
}

/// Largest `r` such that every face of `Γ_v` within edge-adjacency distance
/// `r` of `𝒰` lies in `p`; `-1` when `𝒰 ⊄ p`. Capped at `max`.
pub fn combinatorial_radius(v: &Vec3, p: &Pattern, max: i64) -> Result<i64, CoverError> {
    let plane = SteppedPlane::new(v)?;
    let start = Pattern::unit_corner();
    let mut dist: HashMap<UnitFace, i64> = HashMap::new();
    let mut queue = VecDeque::new();
    for f in start.iter() {
        if !plane.contains(f)? {
            continue;
        }
        if !p.contains(f) {
            return Ok(-1);
        }
        dist.insert(*f, 0);
        queue.push_back(*f);
    }
    while let Some(f) = queue.pop_front() {
        let d = dist[&f];
        if d >= max {
            return Ok(max);
        }
        for g in edge_neighbours(&f) {
            if dist.contains_key(&g) || !plane.contains(&g)? {
                continue;
            }
            if !p.contains(&g) {
                return Ok(d);
            }
            dist.insert(g, d + 1);
            queue.push_back(g);
        }
    }
    Ok(max)
}
