//! Reproducible batteries of checks over the covering lemmas and the
//! generation properties, shared by the command line and the tests.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::covering::{self, Ambient, AnnulusCheck, CoverError};
use crate::exactnum::{Scalar, Vec3};
use crate::fsalgo::{self, FsError};
use crate::generation::{self, GenError};
use crate::planes::Window;
use crate::stepped::{sigma_fs, sigma_word, Pattern, SteppedError, SteppedPlane};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SuiteError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Fs(#[from] FsError),
    #[error(transparent)]
    Stepped(#[from] SteppedError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl From<crate::exactnum::NumError> for SuiteError {
    fn from(e: crate::exactnum::NumError) -> Self {
        SuiteError::Cover(CoverError::Num(e))
    }
}

pub fn word_string(w: &[u8]) -> String {
    w.iter().map(|d| char::from(b'0' + d)).collect()
}

/// `M_{w₁} ⋯ M_{w_k} (1,1,1)`, the normal of `Σ_w(Γ_(1,1,1))`.
pub fn image_normal(word: &[u8]) -> Vec3 {
    let m = fsalgo::matrix_product(word);
    Vec3(m.0.map(|row| Scalar::from_bigint(row.iter().sum::<BigInt>())))
}

/// Side of the bounding box of the distinguished vertices.
pub fn diameter(p: &Pattern) -> i64 {
    p.bounding_box().map_or(0, |(lo, hi)| (0..3).map(|i| hi[i] - lo[i]).max().unwrap())
}

/// `A = Σ_{w₁}⋯Σ_{w_{k+ℓ}}(𝒰) ∖ P` against `P = Σ_{w₁}⋯Σ_{w_ℓ}(𝒰)` in
/// `Σ_{w₁}⋯Σ_{w_{k+ℓ}}(Γ_(1,1,1))`; the word is repeated as needed.
pub fn annulus_for_word(word: &[u8], k: usize, l: usize, margin: Option<i64>) -> Result<AnnulusCheck, SuiteError> {
    if word.is_empty() || word.iter().any(|d| !(1..=3).contains(d)) {
        return Err(SuiteError::InvalidArgument("word must be a nonempty string over 1, 2, 3".into()));
    }
    let digits: Vec<u8> = word.iter().cycle().take(k + l).cloned().collect();
    let u = Pattern::unit_corner();
    let p = sigma_word(&digits[..l], &u);
    let big = sigma_word(&digits, &u);
    let a = big.difference(&p);
    let margin = margin.unwrap_or_else(|| diameter(&big) + 4);
    let ambient = Ambient::around(&image_normal(&digits), &big, margin)?;
    Ok(covering::check_annulus(&p, &a, &ambient)?)
}

#[derive(Clone, Debug)]
pub struct ForbiddenCase {
    pub v: [i64; 3],
    /// Hits in the window of `Γ_v` itself (the lemma's hypothesis).
    pub base_hits: usize,
    /// Hits in `Σᵢ` of the window, for `i = 1, 2, 3`.
    pub image_hits: [usize; 3],
}

#[derive(Clone, Debug)]
pub struct WordCase {
    pub word: Vec<u8>,
    pub conditions: [bool; 4],
}

impl WordCase {
    pub fn passes(&self) -> bool {
        self.conditions.iter().all(|&c| c)
    }
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    /// `(i, template index, covered)` for the 27 cases.
    pub cover_table: Vec<(u8, usize, bool)>,
    pub forbidden: Vec<ForbiddenCase>,
    /// Words with four 3s, all expected to pass.
    pub base_words: Vec<WordCase>,
    /// Words with at most three 3s, reported only.
    pub sparse_words: Vec<WordCase>,
}

impl LemmaReport {
    pub fn cover_table_ok(&self) -> bool {
        self.cover_table.len() == 27 && self.cover_table.iter().all(|c| c.2)
    }

    pub fn forbidden_ok(&self) -> bool {
        self.forbidden.iter().all(|c| c.base_hits == 0 && c.image_hits == [0, 0, 0])
    }

    pub fn base_ok(&self) -> bool {
        self.base_words.iter().all(WordCase::passes)
    }

    pub fn passes(&self) -> bool {
        self.cover_table_ok() && self.forbidden_ok() && self.base_ok()
    }

    /// Pass counts per condition among the sparse words.
    pub fn sparse_breakdown(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for w in &self.sparse_words {
            for (k, ok) in w.conditions.iter().enumerate() {
                c[k] += usize::from(*ok);
            }
        }
        c
    }

    pub fn to_json(&self) -> Value {
        let words = |ws: &[WordCase]| {
            ws.iter()
                .map(|w| json!({"word": word_string(&w.word), "conditions": w.conditions, "pass": w.passes()}))
                .collect::<Vec<_>>()
        };
        json!({
            "pass": self.passes(),
            "cover_table": {
                "pass": self.cover_table_ok(),
                "cases": self.cover_table.iter().map(|(i, q, ok)| json!({"i": i, "template": q, "covered": ok})).collect::<Vec<_>>(),
            },
            "forbidden": {
                "pass": self.forbidden_ok(),
                "cases": self.forbidden.iter().map(|c| json!({"v": c.v, "base_hits": c.base_hits, "image_hits": c.image_hits})).collect::<Vec<_>>(),
            },
            "annulus_base": {"pass": self.base_ok(), "words": words(&self.base_words)},
            "sparse_words": {"breakdown": self.sparse_breakdown(), "total": self.sparse_words.len(), "words": words(&self.sparse_words)},
        })
    }
}

fn word_case(word: Vec<u8>) -> Result<WordCase, SuiteError> {
    let r = annulus_for_word(&word, word.len(), 0, None)?;
    Ok(WordCase { word, conditions: r.conditions })
}

/// Random word of the given length with exactly `threes` letters 3.
fn random_word(rng: &mut ChaCha8Rng, len: usize, threes: usize) -> Vec<u8> {
    let mut w: Vec<u8> = (0..len).map(|k| if k < threes { 3 } else { rng.gen_range(1..=2) }).collect();
    w.shuffle(rng);
    w
}

/// Random sorted positive integer vector with `v₁ + v₂ > v₃`.
fn random_f3_like(rng: &mut ChaCha8Rng) -> [i64; 3] {
    loop {
        let mut v = [rng.gen_range(1..=40), rng.gen_range(1..=40), rng.gen_range(1..=40)];
        v.sort();
        if v[0] + v[1] > v[2] {
            return v;
        }
    }
}

/// The three lemma batteries: the 27-case cover table, the forbidden
/// pattern scan and the annulus base case.
pub fn lemma_suite(seed: u64) -> Result<LemmaReport, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cover_table = Vec::new();
    for i in 1..=3u8 {
        for (q, (_, ok)) in covering::image_covered_table(i).into_iter().enumerate() {
            cover_table.push((i, q, ok));
        }
    }

    let mut forbidden = Vec::new();
    for _ in 0..20 {
        let v = random_f3_like(&mut rng);
        let faces = SteppedPlane::new(&Vec3::from_ints(v))?.faces_in_window(&Window::new(6))?;
        let base_hits = covering::scan_forbidden(&faces).len();
        let image_hits = [1, 2, 3].map(|i| covering::scan_forbidden(&sigma_fs(i, &faces)).len());
        forbidden.push(ForbiddenCase { v, base_hits, image_hits });
    }

    // u₁3u₂3u₃3u₄3 over all u ∈ {1,2,3}⁴
    let mut base_words = Vec::new();
    for n in 0..81u32 {
        let u = [n / 27 % 3, n / 9 % 3, n / 3 % 3, n % 3].map(|d| d as u8 + 1);
        base_words.push(word_case(vec![u[0], 3, u[1], 3, u[2], 3, u[3], 3])?);
    }
    for _ in 0..50 {
        let len = rng.gen_range(4..=8);
        base_words.push(word_case(random_word(&mut rng, len, 4))?);
    }

    let mut sparse_words = Vec::new();
    for _ in 0..50 {
        let len = rng.gen_range(1..=6);
        let threes = rng.gen_range(0..=3.min(len));
        sparse_words.push(word_case(random_word(&mut rng, len, threes))?);
    }
    Ok(LemmaReport { cover_table, forbidden, base_words, sparse_words })
}

#[derive(Clone, Debug)]
pub struct PropsReport {
    pub n: usize,
    pub tn_connected: bool,
    pub tn_in_critical_plane: bool,
    pub pn_in_tn: bool,
    pub pn_in_plane: bool,
    pub conservation: bool,
    /// Smallest `n` at which `Pₙ` fills the naive plane on the fill window.
    pub fill_depth: Option<usize>,
    pub fill_radius: i64,
}

impl PropsReport {
    pub fn passes(&self) -> bool {
        self.tn_connected
            && self.tn_in_critical_plane
            && self.pn_in_tn
            && self.pn_in_plane
            && self.conservation
            && self.fill_depth.is_some()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.passes(),
            "n": self.n,
            "tn_connected": self.tn_connected,
            "tn_in_critical_plane": self.tn_in_critical_plane,
            "pn_in_tn": self.pn_in_tn,
            "pn_faces_in_stepped_plane": self.pn_in_plane,
            "conservation": self.conservation,
            "fill_radius": self.fill_radius,
            "fill_depth": self.fill_depth,
        })
    }
}

/// Checks of `Tₙ` and `Pₙ` for a vector certified to lie in `F₃`, every
/// level up to `n`, plus the fill depth up to `fill_max`.
pub fn props_suite(v: &Vec3, n: usize, fill_radius: i64, fill_max: usize) -> Result<PropsReport, SuiteError> {
    let mut r = PropsReport {
        n,
        tn_connected: true,
        tn_in_critical_plane: true,
        pn_in_tn: true,
        pn_in_plane: true,
        conservation: fsalgo::check_conservation(&fsalgo::iterate(v, n.max(fill_max))?),
        fill_depth: None,
        fill_radius,
    };
    for m in 0..=n {
        r.tn_connected &= generation::check_tn_connected(v, m)?.is_connected();
        r.tn_in_critical_plane &= generation::check_tn_in_critical_plane(v, m)?;
        r.pn_in_tn &= generation::check_pn_in_tn(v, m)?;
        let pn = crate::stepped::generate_pn(v, m, fsalgo::DEFAULT_BUDGET)?;
        r.pn_in_plane &= generation::faces_outside_plane(v, &pn)?.is_empty();
    }
    r.fill_depth = generation::pn_fill_depth(v, fill_radius, fill_max)?;
    Ok(r)
}
