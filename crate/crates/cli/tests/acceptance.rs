//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Tolerances and time limits are fixed constants below.

use std::collections::HashMap;
use std::process::Command;
use std::time::{Duration, Instant};

use discplane_core::decision::{self, ConnectedReason, NotConnectedReason, Verdict};
use discplane_core::exactnum::{
    parse_scalar, parse_vec3, Bindings, RInterval, Scalar, Vec3,
};
use discplane_core::fsalgo::{self, ExpansionStatus, F3Verdict, DEFAULT_BUDGET};
use discplane_core::generation;
use discplane_core::planes::WindowedVerdict;
use discplane_core::stepped::{dual_preimage, sigma_fs, sigma_fs_face, Pattern, UnitFace};
use discplane_core::suites;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const ALPHA: &str = "algebraic(-1,1,1,1; 1/2, 3/5)";
const EXAMPLE1_TOL_BITS: u32 = 100; // 2^-100 < 1e-30
const EXAMPLE2_TOL: f64 = 1e-12;
const SHADOW_BITS: u32 = 256;

type Outcome = Result<String, String>;

fn env() -> Bindings {
    let mut env = Bindings::new();
    env.insert("a".into(), parse_scalar(ALPHA, &Bindings::new()).unwrap());
    env
}

fn vec3(text: &str) -> Vec3 {
    parse_vec3(text, &env()).unwrap()
}

fn cli(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_discplane"))
        .arg("--quiet")
        .arg(format!("--let=a={ALPHA}"))
        .args(args)
        .output()
        .expect("binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), json)
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(t: Duration, limit: Duration) -> Result<(), String> {
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

/// `|x - y| < 2^-bits` from exact enclosures.
fn close(x: &Scalar, y: &RInterval, bits: u32) -> bool {
    let d = x.enclose(bits + 8).sub(y);
    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
    d.lo.abs() < eps && d.hi.abs() < eps
}

// ---------------------------------------------------------------- 1

fn criterion1() -> Outcome {
    let t = Instant::now();
    let v = vec3("1,sqrt(13),sqrt(17)");
    let (omega, e) = fsalgo::connecting_thickness(&v, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure(e.status == ExpansionStatus::Halted(5), || format!("status {:?}", e.status))?;
    let s = |t: &str| parse_scalar(t, &Bindings::new()).unwrap();
    let expected = [
        ["1", "sqrt(13)", "sqrt(17)"],
        ["1", "sqrt(13) - 1", "sqrt(17) - 1"],
        ["1", "sqrt(13) - 2", "sqrt(17) - 2"],
        ["sqrt(13) - 3", "1", "sqrt(17) - 3"],
        ["4 - sqrt(13)", "sqrt(17) - sqrt(13)", "sqrt(13) - 3"],
        ["sqrt(17) - 4", "2*sqrt(13) - 7", "4 - sqrt(13)"],
    ];
    for (n, row) in expected.iter().enumerate() {
        for k in 0..3 {
            ensure(e.iterates[n].0[k] == s(row[k]), || format!("v^({n})_{} = {:?}", k + 1, e.iterates[n].0[k]))?;
        }
    }
    let target = s("8 - sqrt(13)");
    ensure(omega == target, || format!("omega = {omega:?}"))?;
    ensure(close(&omega, &target.enclose(200), EXAMPLE1_TOL_BITS), || "enclosure mismatch".into())?;
    ensure(fsalgo::critical_thickness(&v, DEFAULT_BUDGET).unwrap() == target, || "critical thickness differs".into())?;

    let t = Instant::now();
    let (code, json) = cli(&["omega", "1,sqrt(13),sqrt(17)"]);
    let cli_time = t.elapsed();
    ensure(code == 0 && json["expansion"]["status"]["steps"] == 5, || format!("cli exit {code}"))?;
    within(elapsed.max(cli_time), Duration::from_secs(1))?;
    Ok(format!("omega = 8 - sqrt(13) exactly, 5 steps, iterates match ({cli_time:?})"))
}

// ---------------------------------------------------------------- 2

/// π from Machin's formula, to about `2^-bits`.
fn machin_pi(bits: u32) -> BigRational {
    fn arctan_inv(x: i64, bits: u32) -> BigRational {
        let eps = BigRational::new(BigInt::one(), BigInt::one() << (bits + 8));
        let x2 = BigRational::from_integer(BigInt::from(x * x));
        let mut term = BigRational::new(BigInt::one(), BigInt::from(x));
        let mut sum = BigRational::zero();
        let mut k = 0i64;
        while term.abs() > eps {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            sum += &term * BigRational::new(BigInt::from(sign), BigInt::from(2 * k + 1));
            term /= &x2;
            k += 1;
        }
        sum
    }
    BigRational::from_integer(BigInt::from(4)) * (BigRational::from_integer(BigInt::from(4)) * arctan_inv(5, bits) - arctan_inv(239, bits))
}

/// Cube root of 10 by bisection.
fn cbrt10(bits: u32) -> BigRational {
    let ten = BigRational::from_integer(BigInt::from(10));
    let (mut lo, mut hi) = (BigRational::from_integer(BigInt::from(2)), BigRational::from_integer(BigInt::from(3)));
    for _ in 0..bits {
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        if &mid * &mid * &mid < ten {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn criterion2() -> Outcome {
    let t = Instant::now();
    let v = vec3("1,root(10,3),pi");
    let e = fsalgo::expand(&v, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let omega = fsalgo::critical_thickness(&v, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure(e.status == ExpansionStatus::Halted(19), || format!("status {:?}", e.status))?;
    let oracle = BigRational::from_integer(BigInt::from(2)) * machin_pi(160)
        - BigRational::from_integer(BigInt::from(98)) * cbrt10(160)
        + BigRational::from_integer(BigInt::from(208));
    let err = (omega.enclose(160).midpoint() - &oracle).abs();
    let err = num_traits::ToPrimitive::to_f64(&err).unwrap();
    ensure(err < EXAMPLE2_TOL, || format!("|omega - oracle| = {err:e}"))?;

    let t = Instant::now();
    let (code, json) = cli(&["omega", "1,root(10,3),pi"]);
    let cli_time = t.elapsed();
    ensure(code == 0 && json["expansion"]["status"]["steps"] == 19, || format!("cli exit {code}"))?;
    within(elapsed.max(cli_time), Duration::from_secs(1))?;
    Ok(format!("19 steps, |omega - (2pi - 98*10^(1/3) + 208)| = {err:.1e} ({cli_time:?})"))
}

// ---------------------------------------------------------------- 3

/// `p mod (x³ + x² + x − 1)` for integer polynomials, lowest degree first.
fn reduce_alpha(mut p: Vec<i64>) -> Vec<i64> {
    while p.len() > 3 {
        let c = p.pop().unwrap();
        let d = p.len() - 3;
        // x^(d+3) = x^d (1 - x - x²)
        p[d] += c;
        p[d + 1] -= c;
        p[d + 2] -= c;
    }
    p.resize(3, 0);
    p
}

fn polymul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

fn criterion3() -> Outcome {
    // Oracle: with v = (1, 1+α, 1+α+α²) and 1/α = 1+α+α², M₃ v = (1/α) v.
    let v = [vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1]];
    let inv_alpha = vec![1, 1, 1];
    ensure(reduce_alpha(polymul(&[0, 1], &inv_alpha)) == vec![1, 0, 0], || "1/alpha".into())?;
    let m3 = [[0, 0, 1], [1, 0, 1], [0, 1, 1]];
    for (row, vi) in m3.iter().zip(&v) {
        let mut lhs = vec![0; 3];
        for (m, vj) in row.iter().zip(&v) {
            for k in 0..3 {
                lhs[k] += m * vj[k];
            }
        }
        ensure(reduce_alpha(lhs) == reduce_alpha(polymul(&inv_alpha, vi)), || "M3 v != v / alpha".into())?;
    }

    let t = Instant::now();
    let vv = vec3("1,1+a,1+a+a^2");
    let verdict = fsalgo::classify_f3(&vv, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(verdict == F3Verdict::InF3 { preperiod: 0, cycle: vec![3] }, || format!("{verdict:?}"))?;
    let half = vv.sum().try_div(&Scalar::from_int(2)).unwrap();
    let omega = fsalgo::critical_thickness(&vv, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(omega == half, || format!("omega = {omega:?}"))?;
    let elapsed = t.elapsed();

    let t = Instant::now();
    let (c1, classify) = cli(&["classify", "1,1+a,1+a+a^2"]);
    let (c2, om) = cli(&["omega", "1,1+a,1+a+a^2"]);
    let cli_time = t.elapsed();
    ensure(c1 == 0 && classify["verdict"] == "InF3" && classify["cycle"] == "3", || format!("cli classify {classify}"))?;
    ensure(c2 == 0 && om["expansion"]["status"]["kind"] == "periodic", || format!("cli omega {om}"))?;
    within(elapsed.max(cli_time / 2), Duration::from_secs(1))?;
    Ok(format!("M3 v = v/alpha verified, InF3 cycle 3, omega = |v|_1/2 exactly ({cli_time:?} for two calls)"))
}

// ---------------------------------------------------------------- 4

fn criterion4() -> Outcome {
    let t = Instant::now();
    let (code, json) = cli(&["check", "lemmas", "--seed", "1"]);
    let elapsed = t.elapsed();
    ensure(code == 0 && json["pass"] == true, || format!("exit {code}"))?;
    ensure(json["cover_table"]["cases"].as_array().map_or(0, Vec::len) == 27, || "cover table size".into())?;
    ensure(json["forbidden"]["cases"].as_array().map_or(0, Vec::len) == 20, || "forbidden cases".into())?;
    ensure(json["annulus_base"]["words"].as_array().map_or(0, Vec::len) == 131, || "base words".into())?;
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "27/27 covered, 20 planes clean, 131 base words pass; sparse breakdown {} of {} ({elapsed:.1?})",
        json["sparse_words"]["breakdown"], json["sparse_words"]["total"]
    ))
}

// ---------------------------------------------------------------- 5

const PERIODIC_WORDS: [&str; 10] = ["3", "31", "13", "23", "32", "223", "331", "133", "233", "113"];

fn is_rotation(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && (0..a.len()).any(|k| a[k..].iter().chain(&a[..k]).eq(b))
}

fn criterion5() -> Outcome {
    let t = Instant::now();
    let mut depths = Vec::new();
    for w in PERIODIC_WORDS {
        let word: Vec<u8> = w.bytes().map(|b| b - b'0').collect();
        let v = generation::perron_vector(&word).map_err(|e| format!("{w}: {e}"))?;
        match fsalgo::classify_f3(&v, DEFAULT_BUDGET).map_err(|e| e.to_string())? {
            F3Verdict::InF3 { cycle, .. } if is_rotation(&cycle, &word) => {}
            other => return Err(format!("{w}: {other:?}")),
        }
        let r = suites::props_suite(&v, 10, 3, 30).map_err(|e| format!("{w}: {e}"))?;
        ensure(r.passes(), || format!("{w}: {}", r.to_json()))?;
        depths.push(format!("{w}:{}", r.fill_depth.unwrap()));
    }
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!("10 words, n <= 10, fill depth at R=3 [{}] ({elapsed:.1?})", depths.join(" ")))
}

// ---------------------------------------------------------------- 6

/// Sorted fully subtractive steps in `f64` until `v₁ + v₂ ≤ v₃`; only
/// meaningful far from ties.
fn float_halting_stage(mut v: [f64; 3], max: usize) -> Option<usize> {
    for n in 0..=max {
        if v[0] + v[1] <= v[2] {
            return Some(n);
        }
        v = [v[0], v[1] - v[0], v[2] - v[0]];
        v.sort_by(f64::total_cmp);
    }
    None
}

fn windowed_tag(w: &WindowedVerdict) -> &'static str {
    match w {
        WindowedVerdict::ConnectedAtAll => "connected",
        WindowedVerdict::DisconnectedStable(..) => "split",
        WindowedVerdict::Inconclusive => "inconclusive",
    }
}

fn criterion6() -> Outcome {
    use ConnectedReason as C;
    use NotConnectedReason as N;
    // Hand-traced expansions:
    // (1,2,4) → (1,1,3) → (0,1,2): zero first coordinate, 1 and 2 commensurable.
    // (0,1,√2): zero first coordinate at once, 1 and √2 independent.
    // (1,√13,√17) halts after 5 steps with all coordinates positive.
    let cases: [(&str, Verdict); 5] = [
        ("1,1+a,1+a+a^2", Verdict::Connected(C::InF3)),
        ("0,1,sqrt(2)", Verdict::Connected(C::ZeroFirstCoordDim2(0))),
        ("1,2,4", Verdict::NotConnected(N::ZeroFirstCoordDim1(2))),
        ("1,1,1", Verdict::NotConnected(N::RationalDim1)),
        ("1,sqrt(13),sqrt(17)", Verdict::NotConnected(N::PositiveNonF3(5))),
    ];
    let t = Instant::now();
    let mut lines = Vec::new();
    for (text, expected) in cases {
        let v = vec3(text);
        let d = decision::decide_critical_connectedness(&v, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        ensure(d.verdict == expected, || format!("{text}: {} (expected {expected})", d.verdict))?;
        // independent reading of the expansion for the positive halting case
        if let Verdict::NotConnected(N::PositiveNonF3(n)) = expected {
            let e = fsalgo::iterate(&v, n).unwrap();
            ensure(e.iterates.iter().all(|w| w.get(0).is_positive().unwrap()), || format!("{text}: zero iterate"))?;
            ensure(fsalgo::halts(&e.iterates[n]).unwrap(), || format!("{text}: no halt at {n}"))?;
        }
        let c = decision::cross_check(&d, &v, &[6, 10]).map_err(|e| e.to_string())?.ok_or("no omega")?;
        ensure(c.consistent, || format!("{text}: {} vs {:?}", d.verdict, c.windowed))?;
        lines.push(format!("{}={}", d.verdict, windowed_tag(&c.windowed)));
    }
    // (1,√2,√3): the halting stage comes from a floating-point trace
    let v = vec3("1,sqrt(2),sqrt(3)");
    let n = float_halting_stage([1.0, 2f64.sqrt(), 3f64.sqrt()], 40).ok_or("float trace did not halt")?;
    let d = decision::decide_critical_connectedness(&v, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(d.verdict == Verdict::NotConnected(N::PositiveNonF3(n)), || format!("(1,√2,√3): {} vs stage {n}", d.verdict))?;
    let c = decision::cross_check(&d, &v, &[6, 10]).map_err(|e| e.to_string())?.ok_or("no omega")?;
    ensure(c.consistent, || format!("(1,√2,√3): {:?}", c.windowed))?;
    lines.push(format!("{}={}", d.verdict, windowed_tag(&c.windowed)));

    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!("{} ({elapsed:.1?})", lines.join(", ")))
}

// ---------------------------------------------------------------- 7

/// Box for the brute-force inverse: preimages of faces in `[-5,5]³` have
/// coordinates bounded by `|x+y+z| + 1 ≤ 16`.
const BRUTE_BOX: i64 = 16;

fn criterion7() -> Outcome {
    let t = Instant::now();
    let mut reverse: [HashMap<UnitFace, Pattern>; 3] = Default::default();
    for (k, rev) in reverse.iter_mut().enumerate() {
        let i = k as u8 + 1;
        for x in -BRUTE_BOX..=BRUTE_BOX {
            for y in -BRUTE_BOX..=BRUTE_BOX {
                for z in -BRUTE_BOX..=BRUTE_BOX {
                    for ty in 1..=3 {
                        let g = UnitFace::new([x, y, z], ty);
                        for f in sigma_fs_face(i, &g) {
                            rev.entry(f).or_default().insert(g);
                        }
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..500 {
        let f = UnitFace::new([0; 3].map(|_| rng.gen_range(-5..=5)), rng.gen_range(1..=3));
        for (k, rev) in reverse.iter().enumerate() {
            let i = k as u8 + 1;
            let pre = dual_preimage(i, &f);
            ensure(sigma_fs(i, &pre).contains(&f), || format!("{f} not in Sigma_{i}(Sigma_{i}^-1)"))?;
            let brute = rev.get(&f).cloned().unwrap_or_default();
            ensure(pre == brute, || format!("Sigma_{i}^-1({f}) differs from brute force"))?;
        }
    }
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("500 faces x 3 maps match brute force over [-{BRUTE_BOX},{BRUTE_BOX}]^3 ({elapsed:.1?})"))
}

// ---------------------------------------------------------------- 8

fn recip(x: &RInterval) -> Option<RInterval> {
    if x.lo.is_positive() || x.hi.is_negative() {
        Some(RInterval::new(x.hi.recip(), x.lo.recip()))
    } else {
        None
    }
}

fn criterion8() -> Outcome {
    let t = Instant::now();
    let families: [&[&str]; 4] = [
        &["a", "1+a", "a^2", "3/7", "-2"],
        &["sqrt(2)", "sqrt(3)", "1/3", "5"],
        &["root(10,3)", "root(10,3)^2", "-1/2", "7"],
        &["pi", "pi - 3", "2/5", "-1"],
    ];
    let env = env();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut ops, mut worst) = (0usize, 0f64);
    while ops < 1000 {
        let fam = families[ops / 10 % families.len()];
        let mut pool: Vec<(Scalar, RInterval)> = fam
            .iter()
            .map(|s| {
                let x = parse_scalar(s, &env).unwrap();
                let shadow = x.enclose(SHADOW_BITS).round_out(SHADOW_BITS);
                (x, shadow)
            })
            .collect();
        // a chain of ten ops within one field, results fed back into the pool
        for _ in 0..10 {
            let a = &pool[rng.gen_range(0..pool.len())];
            let b = &pool[rng.gen_range(0..pool.len())];
            let allow_div = !fam.contains(&"pi");
            let op = rng.gen_range(0..if allow_div { 4 } else { 3 });
            let (exact, shadow) = match op {
                0 => (&a.0 + &b.0, a.1.add(&b.1)),
                1 => (&a.0 - &b.0, a.1.sub(&b.1)),
                2 => (&a.0 * &b.0, a.1.mul(&b.1)),
                _ => match (b.0.is_zero(), recip(&b.1)) {
                    (false, Some(r)) => (a.0.try_div(&b.0).map_err(|e| e.to_string())?, a.1.mul(&r)),
                    _ => (&a.0 + &b.0, a.1.add(&b.1)),
                },
            };
            let shadow = shadow.round_out(SHADOW_BITS);
            let e = exact.enclose(SHADOW_BITS + 16);
            ensure(e.lo <= shadow.hi && shadow.lo <= e.hi, || format!("op {ops}: exact {exact:?} outside shadow"))?;
            let gap = (e.midpoint() - shadow.midpoint()).abs();
            ensure(gap <= shadow.width() + e.width(), || format!("op {ops}: disagreement"))?;
            let rel = num_traits::ToPrimitive::to_f64(&shadow.width()).unwrap_or(f64::INFINITY);
            worst = worst.max(rel);
            let slot = rng.gen_range(0..pool.len());
            pool[slot] = (exact, shadow);
            ops += 1;
        }
    }

    // conservation along every expansion computed above
    let mut expansions = 0;
    for text in ["1,sqrt(13),sqrt(17)", "1,root(10,3),pi", "1,1+a,1+a+a^2", "1,2,4", "0,1,sqrt(2)", "1,sqrt(2),sqrt(3)"] {
        let e = fsalgo::expand(&vec3(text), DEFAULT_BUDGET).unwrap();
        ensure(fsalgo::check_conservation(&e), || format!("conservation fails for {text}"))?;
        expansions += 1;
    }
    for w in PERIODIC_WORDS {
        let word: Vec<u8> = w.bytes().map(|b| b - b'0').collect();
        let v = generation::perron_vector(&word).unwrap();
        ensure(fsalgo::check_conservation(&fsalgo::iterate(&v, 30).unwrap()), || format!("conservation fails for {w}"))?;
        expansions += 1;
    }
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "1000 ops agree with the {SHADOW_BITS}-bit shadow (widest shadow {worst:.1e}); conservation on {expansions} expansions ({elapsed:.1?})"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("worked example (1, sqrt 13, sqrt 17)", criterion1),
        ("worked example (1, 10^(1/3), pi)", criterion2),
        ("eigenvector loop", criterion3),
        ("lemma suite", criterion4),
        ("generation property suite", criterion5),
        ("decision with windowed cross-check", criterion6),
        ("dual-substitution round trip", criterion7),
        ("exactness guard", criterion8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("criterion {}: PASS  {name}: {detail}", k + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", k + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: panicked", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
