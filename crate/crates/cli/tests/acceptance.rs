//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Values are checked against oracles written here from scratch
//! (integer phase reduction, exact rational phases, trapezoid sums) rather
//! than against the library's own evaluators.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num::complex::Complex64;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use onesided_core::angle::{Angle, BasisDecl};
use onesided_core::averaging::AveragingCertificate;
use onesided_core::bounds::{self, TheoremId};
use onesided_core::config::{parse_config, Config, ConfigFile};
use onesided_core::quadrature::{l1_norm, TrigPolynomial};
use onesided_core::relation::numeric_relation_scan;
use onesided_core::search::{
    certify_cs_equals_ct, exact_period_scan, scan_spectrum, CertifyOptions, Restrict, ScanOptions,
};
use onesided_core::spectrum::{
    collapse_repeats, extremal_example, Coefficient, CosineConfig, CosineTerm, Node, SpectrumConfig,
};
use onesided_core::structure::{detect_degeneracy, reduce_minus_one, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if let false = $cond {
            return Err(format!($($fmt)*));
        }
    };
}

const BASES: [(&str, &str); 3] = [
    ("sqrt2_minus_1", "0.41421356237309504880168872420969807856967187537694807"),
    ("sqrt3_minus_1", "0.73205080756887729352744634150587236694280525381038063"),
    ("sqrt5_minus_2", "0.23606797749978969640917366873127623544061835961152573"),
];

/// Largest one-period length drawn for the exhaustive suites.
const MAX_SUITE_PERIOD: i64 = 1_000_000;

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "tightness of the extremal example", secs(1), criterion_1),
        (2, "one-period minimum below -Σ|b|²/Σ|b|", secs(30), criterion_2),
        (3, "collapse of repeated angles", secs(30), criterion_3),
        (4, "block-sum closed forms and constants", secs(60), criterion_4),
        (5, "L1 lower bound", secs(60), criterion_5),
        (6, "scan beats -(1/π⁴) log n", secs(120), criterion_6),
        (7, "cosine certification", secs(300), criterion_7),
        (8, "relation detection", secs(120), criterion_8),
        (9, "odd-index reduction", secs(120), criterion_9),
        (10, "determinism", secs(600), criterion_10),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > limit => Err(format!("took {:.1}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs())),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS [{name}] {detail} ({:.2}s)", elapsed.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL [{name}] {detail} ({:.2}s)", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

// ---------------------------------------------------------------- oracles

fn cis(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * turns)
}

/// A node `b e^{2πi p/q}` evaluated with integer phase reduction.
#[derive(Clone, Copy)]
struct RatNode {
    b: Complex64,
    p: i64,
    q: i64,
}

fn oracle_sum(nodes: &[RatNode], k: i64) -> Complex64 {
    nodes
        .iter()
        .map(|n| {
            let r = (n.p as i128 * k as i128).rem_euclid(n.q as i128);
            n.b * cis(r as f64 / n.q as f64)
        })
        .sum()
}

fn decimal(text: &str) -> BigRational {
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let digits = BigInt::parse_bytes(format!("{int}{frac}").as_bytes(), 10).unwrap();
    BigRational::new(digits, num::pow(BigInt::from(10), frac.len()))
}

/// `r + Σ c_i β_i` exactly, for `β` taken from [`BASES`].
fn exact_angle(p: i64, q: i64, coeffs: &[i64], which: &[usize]) -> BigRational {
    let mut x = BigRational::new(p.into(), q.into());
    for (c, &w) in coeffs.iter().zip(which) {
        x += decimal(BASES[w].1) * BigRational::from_integer((*c).into());
    }
    x
}

/// `cos(2π k x)` with `k x` reduced mod 1 in exact arithmetic.
fn exact_cos(x: &BigRational, k: i64) -> f64 {
    let t = x * BigRational::from_integer(k.into());
    let frac = &t - t.floor();
    (2.0 * PI * frac.to_f64().unwrap()).cos()
}

fn basis_of(which: &[usize]) -> BasisDecl {
    BasisDecl::new(which.iter().map(|&w| BASES[w])).unwrap()
}

/// Saturates at `i64::MAX`.
fn lcm_all(qs: impl IntoIterator<Item = i64>) -> i64 {
    qs.into_iter().fold(1i128, |a, q| a.lcm(&(q as i128)).min(i64::MAX as i128)) as i64
}

fn inv_pi4_log(n: usize) -> f64 {
    (n as f64).ln() / PI.powi(4)
}

// ------------------------------------------------------------- generators

/// Conjugate pairs on distinct reduced `p/q ∈ (0, 1/2)` plus an optional
/// real node at `1/2`, with total period at most [`MAX_SUITE_PERIOD`].
fn random_rational_nodes(rng: &mut ChaCha8Rng, max_q: i64, max_n: usize) -> Vec<RatNode> {
    random_rational_nodes_within(rng, max_q, max_n, MAX_SUITE_PERIOD)
}

fn random_rational_nodes_within(rng: &mut ChaCha8Rng, max_q: i64, max_n: usize, max_period: i64) -> Vec<RatNode> {
    loop {
        let pairs = rng.gen_range(1..=max_n / 2);
        let mut seen: Vec<(i64, i64)> = Vec::new();
        let mut nodes = Vec::new();
        while seen.len() < pairs {
            let q = rng.gen_range(3..=max_q);
            let p = rng.gen_range(1..=(q - 1) / 2);
            let g = p.gcd(&q);
            let a = (p / g, q / g);
            if seen.contains(&a) {
                continue;
            }
            seen.push(a);
            let b = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            nodes.push(RatNode { b, p: a.0, q: a.1 });
            nodes.push(RatNode { b: b.conj(), p: a.1 - a.0, q: a.1 });
        }
        if 2 * pairs < max_n && rng.gen_bool(0.5) {
            nodes.push(RatNode { b: Complex64::new(rng.gen_range(-2.0..2.0), 0.0), p: 1, q: 2 });
        }
        if lcm_all(nodes.iter().map(|n| n.q)) <= max_period {
            return nodes;
        }
    }
}

fn rational_config(nodes: &[RatNode]) -> SpectrumConfig {
    let nodes = nodes.iter().map(|n| Node::new(Coefficient::complex(n.b.re, n.b.im), Angle::rational(n.p, n.q, 0))).collect();
    SpectrumConfig::new(BasisDecl::empty(), nodes).unwrap()
}

/// Exact angle recipe `p/q + Σ c_i β_i` over a subset of [`BASES`].
#[derive(Clone)]
struct Combo {
    p: i64,
    q: i64,
    coeffs: Vec<i64>,
}

/// `pairs` conjugate pairs whose coefficient vectors are nonzero, distinct
/// and pairwise non-opposite, so every ratio has infinite order.
fn independent_combos(rng: &mut ChaCha8Rng, dim: usize, pairs: usize) -> Vec<Combo> {
    let mut out: Vec<Combo> = Vec::new();
    while out.len() < pairs {
        let coeffs: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
        let neg: Vec<i64> = coeffs.iter().map(|c| -c).collect();
        if coeffs.iter().all(|c| *c == 0) || out.iter().any(|c| c.coeffs == coeffs || c.coeffs == neg) {
            continue;
        }
        let q = rng.gen_range(1..=12);
        out.push(Combo { p: rng.gen_range(0..q), q, coeffs });
    }
    out
}

fn combo_config(basis: &BasisDecl, combos: &[Combo], b: impl Fn(usize) -> Coefficient) -> SpectrumConfig {
    let mut nodes = Vec::new();
    for (j, c) in combos.iter().enumerate() {
        let angle = Angle::combination(c.p, c.q, c.coeffs.clone());
        nodes.push(Node::new(b(j), angle.negate()));
        nodes.push(Node::new(b(j).conj(), angle));
    }
    SpectrumConfig::new(basis.clone(), nodes).unwrap()
}

fn random_subset(rng: &mut ChaCha8Rng) -> Vec<usize> {
    loop {
        let which: Vec<usize> = (0..3).filter(|_| rng.gen_bool(0.5)).collect();
        if !which.is_empty() {
            return which;
        }
    }
}

// ------------------------------------------------------------------- cli

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn cli(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_onesided"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t.to_string());
    }
    cmd.output().expect("binary runs")
}

fn stdout_json(out: &Output) -> std::result::Result<Value, String> {
    serde_json::from_slice(&out.stdout).map_err(|e| format!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

// -------------------------------------------------------------- criteria

fn criterion_1() -> Check {
    for n in [2usize, 4, 9] {
        let out = cli(&["extremal", "--n", &n.to_string()], None);
        ensure!(out.status.code() == Some(0), "extremal --n {n} exited {:?}", out.status.code());
        let r = &stdout_json(&out)?["result"];
        let scan = &r["period_scan"];
        ensure!(scan["period"] == n as i64 + 1, "n={n}: period {}", scan["period"]);
        let (min, max) = (scan["min"].as_f64().unwrap(), scan["max"].as_f64().unwrap());
        ensure!((min + 1.0).abs() <= 1e-12, "n={n}: min {min}");
        ensure!((max - n as f64).abs() <= 1e-12, "n={n}: max {max}");
        for id in ["bound_thm1", "bound_cor1"] {
            let v = r[id]["value"].as_f64().unwrap();
            ensure!((v + 1.0).abs() <= 1e-12, "n={n}: {id} = {v}");
        }
        let q = n as i64 + 1;
        let nodes: Vec<RatNode> = (1..q).map(|p| RatNode { b: Complex64::new(1.0, 0.0), p, q }).collect();
        let values: Vec<f64> = (0..q).map(|k| oracle_sum(&nodes, k).re).collect();
        let omin = values.iter().copied().fold(f64::INFINITY, f64::min);
        let omax = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ensure!((omin - min).abs() <= 1e-12 && (omax - max).abs() <= 1e-12, "n={n}: oracle ({omin}, {omax})");
    }
    Ok("n ∈ {2,4,9}: min -1, max n, thm1 = cor1 = -1".into())
}

/// Exhaustive one-period minimum against `-Σ|b|²/Σ|b|`; returns the margin.
fn thm1_holds(cfg: &SpectrumConfig, nodes: &[RatNode], rng: &mut ChaCha8Rng) -> std::result::Result<f64, String> {
    let abs: Vec<f64> = nodes.iter().map(|n| n.b.norm()).collect();
    let bound = -abs.iter().map(|a| a * a).sum::<f64>() / abs.iter().sum::<f64>();
    let lib = bounds::bound_thm1(cfg).value;
    ensure!((lib - bound).abs() <= 1e-12 * bound.abs().max(1.0), "bound {lib} vs oracle {bound}");
    let scan = exact_period_scan(cfg).map_err(|e| e.to_string())?;
    ensure!(scan.period == lcm_all(nodes.iter().map(|n| n.q)), "period {}", scan.period);
    ensure!(scan.min <= bound + 1e-12, "min {} above bound {bound}", scan.min);
    let scale: f64 = abs.iter().sum();
    for k in std::iter::once(scan.k_min).chain((0..16).map(|_| rng.gen_range(0..scan.period))) {
        let want = oracle_sum(nodes, k);
        let got = onesided_core::spectrum::eval_power_sum(cfg, k).map_err(|e| e.to_string())?;
        ensure!(want.im.abs() <= 1e-12 * scale, "oracle imaginary part {} at k={k}", want.im);
        ensure!((got - want.re).abs() <= 1e-12 * scale, "s_{k} = {got}, oracle {}", want.re);
    }
    Ok(bound - scan.min)
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::INFINITY;
    for i in 0..200 {
        let nodes = random_rational_nodes(&mut rng, 50, 10);
        let cfg = rational_config(&nodes);
        let margin = thm1_holds(&cfg, &nodes, &mut rng).map_err(|e| format!("config {i}: {e}"))?;
        worst = worst.min(margin);
    }
    Ok(format!("200/200 configs, smallest margin {worst:.3e}"))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut merged_away = 0;
    for i in 0..100 {
        let base = random_rational_nodes(&mut rng, 50, 10);
        let mut nodes = Vec::new();
        let mut exact_total = BigRational::zero();
        let mut collapsed: Vec<(RatNode, BigRational)> = Vec::new();
        for (pos, pair) in base.chunks(2).enumerate() {
            let b = BigRational::new(rng.gen_range(1i64..30).into(), rng.gen_range(1i64..30).into());
            let copies = if pos == 0 { rng.gen_range(2..=3) } else { rng.gen_range(1..=3) };
            for node in pair {
                for _ in 0..copies {
                    nodes.push(Node::new(Coefficient::Rational(b.clone()), Angle::rational(node.p, node.q, 0)));
                    exact_total += &b;
                }
                let merged_b = &b * BigRational::from_integer(copies.into());
                let f = merged_b.to_f64().unwrap();
                collapsed.push((RatNode { b: Complex64::new(f, 0.0), ..*node }, merged_b));
            }
        }
        let cfg = SpectrumConfig::new(BasisDecl::empty(), nodes).unwrap();
        ensure!(cfg.repeated_pair().is_some(), "config {i}: no repeat planted");
        let merged = collapse_repeats(&cfg).map_err(|e| format!("config {i}: {e}"))?;
        ensure!(merged.repeated_pair().is_none(), "config {i}: repeats survive collapse");
        ensure!(merged.n() == collapsed.len(), "config {i}: {} nodes after collapse, want {}", merged.n(), collapsed.len());
        let mut merged_total = BigRational::zero();
        for node in merged.nodes() {
            let Coefficient::Rational(b) = &node.b else { return Err(format!("config {i}: exact coefficient lost")) };
            merged_total += b;
        }
        ensure!(merged_total == exact_total, "config {i}: Σ B_r = {merged_total}, Σ b_j = {exact_total}");
        let oracle: Vec<RatNode> = collapsed.iter().map(|(n, _)| *n).collect();
        thm1_holds(&merged, &oracle, &mut rng).map_err(|e| format!("config {i}: {e}"))?;
        merged_away += cfg.n() - merged.n();
    }
    Ok(format!("100/100 configs, {merged_away} nodes merged, sums conserved exactly"))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let max_q = if i % 2 == 0 { 50 } else { 10_000 };
        let nodes = random_rational_nodes_within(&mut rng, max_q, 10, i64::MAX);
        let cfg = rational_config(&nodes);
        let start = rng.gen_range(-1_000_000i64..=1_000_000);
        let len = rng.gen_range(1i64..=10_000);
        let cert = AveragingCertificate::compute(&cfg, start, len).map_err(|e| format!("config {i}: {e}"))?;

        let (mut d1, mut d2) = (Complex64::new(0.0, 0.0), 0.0);
        for k in start..start + len {
            let s = oracle_sum(&nodes, k);
            d1 += s;
            d2 += s.re * s.re;
        }
        let abs_sum: f64 = nodes.iter().map(|n| n.b.norm()).sum();
        let sq_sum: f64 = nodes.iter().map(|n| n.b.norm_sqr()).sum();
        let rel1 = (cert.sigma1 - d1).norm() / d1.norm().max(abs_sum);
        let rel2 = (cert.sigma2 - d2).norm() / d2.abs().max(sq_sum);
        ensure!(rel1 <= 1e-10, "config {i}: Σ₁ closed {} vs direct {d1} (rel {rel1:e})", cert.sigma1);
        ensure!(rel2 <= 1e-10, "config {i}: Σ₂ closed {} vs direct {d2} (rel {rel2:e})", cert.sigma2);
        worst = worst.max(rel1).max(rel2);

        let chord = |p: i64, q: i64| 2.0 * (PI * p as f64 / q as f64).sin().abs();
        let c1: f64 = nodes.iter().map(|n| 2.0 * n.b.norm() / chord(n.p, n.q)).sum();
        let mut c2 = 0.0;
        for (a, x) in nodes.iter().enumerate() {
            for (b, y) in nodes.iter().enumerate() {
                if a != b {
                    let p = x.p as i128 * y.q as i128 - y.p as i128 * x.q as i128;
                    let q = x.q as i128 * y.q as i128;
                    c2 += 2.0 * x.b.norm() * y.b.norm() / (2.0 * (PI * p as f64 / q as f64).sin().abs());
                }
            }
        }
        ensure!((cert.c1 - c1).abs() <= 1e-10 * c1, "config {i}: C₁ {} vs {c1}", cert.c1);
        ensure!((cert.c2 - c2).abs() <= 1e-10 * c2.max(1.0), "config {i}: C₂ {} vs {c2}", cert.c2);
        ensure!(cert.sigma1_bounded() && cert.sigma2_bounded(), "config {i}: closed forms exceed C₁/C₂");
        let diag = len as f64 * sq_sum;
        ensure!(d1.norm() <= c1 * (1.0 + 1e-10), "config {i}: |Σ₁| = {} > C₁ = {c1}", d1.norm());
        ensure!((d2 - diag).abs() <= c2 + 1e-10 * diag, "config {i}: |Σ₂ - KΣ|b|²| = {} > C₂ = {c2}", (d2 - diag).abs());
    }
    Ok(format!("100/100 configs, worst relative gap {worst:.2e}"))
}

/// Trapezoid rule on `2^18` points; a slow independent check of the L¹ norm.
fn trapezoid_l1(poly: &TrigPolynomial) -> f64 {
    let m = 1usize << 18;
    let h = 2.0 * PI / m as f64;
    (0..m).map(|i| poly.eval(-PI + h * i as f64).norm()).sum::<f64>() * h
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut polys: Vec<TrigPolynomial> = [2usize, 5, 10, 20].iter().map(|&n| TrigPolynomial::dirichlet(n).unwrap()).collect();
    while polys.len() < 4 + 50 {
        let n = rng.gen_range(1..=8);
        let mut freqs: Vec<i64> = Vec::new();
        while freqs.len() < n {
            let q = rng.gen_range(-30..=30);
            if !freqs.contains(&q) {
                freqs.push(q);
            }
        }
        let terms = freqs.into_iter().map(|q| (Complex64::from_polar(rng.gen_range(0.2..2.0), rng.gen_range(0.0..2.0 * PI)), q)).collect();
        polys.push(TrigPolynomial::new(terms).unwrap());
    }
    let mut worst = f64::INFINITY;
    for (i, poly) in polys.iter().enumerate() {
        let min_b = poly.terms().iter().map(|(b, _)| b.norm()).fold(f64::INFINITY, f64::min);
        let bound = 4.0 / PI.powi(3) * min_b * (poly.n() as f64).ln();
        let lib_bound = bounds::bound_lemma1(poly).map_err(|e| e.to_string())?.value;
        ensure!((lib_bound - bound).abs() <= 1e-14 * bound.max(1.0), "poly {i}: bound {lib_bound} vs {bound}");
        let l1 = l1_norm(poly).map_err(|e| format!("poly {i}: {e}"))?.value;
        let trap = trapezoid_l1(poly);
        ensure!((l1 - trap).abs() <= 1e-5 * trap.max(1.0), "poly {i}: quadrature {l1} vs trapezoid {trap}");
        ensure!(l1 >= bound - 1e-6, "poly {i}: L1 {l1} < bound {bound}");
        worst = worst.min(l1 - bound);
    }
    Ok(format!("4 Dirichlet + 50 random polynomials, smallest margin {worst:.4}"))
}

/// Twenty non-degenerate unit-coefficient configs over subsets of [`BASES`].
fn criterion_6_configs() -> Vec<(SpectrumConfig, Vec<Combo>, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut out = Vec::new();
    for i in 0..20 {
        let n = [2usize, 4, 6][i % 3];
        loop {
            let which = random_subset(&mut rng);
            let combos = independent_combos(&mut rng, which.len(), n / 2);
            let cfg = combo_config(&basis_of(&which), &combos, |_| Coefficient::one());
            if detect_degeneracy(&cfg).verdict == Verdict::NonDegenerate {
                out.push((cfg, combos, which));
                break;
            }
        }
    }
    out
}

fn criterion_6() -> Check {
    let mut margins = Vec::new();
    for (i, (cfg, combos, which)) in criterion_6_configs().iter().enumerate() {
        let verdict = detect_degeneracy(cfg);
        let thm4 = bounds::bound_thm4(cfg, verdict.token());
        ensure!(thm4.applicable(), "config {i}: non-degeneracy hypothesis not met");
        let bound = -inv_pi4_log(cfg.n());
        let cor3 = bounds::bound_cor3(cfg.n()).map_err(|e| e.to_string())?.value;
        ensure!((cor3 - bound).abs() <= 1e-15, "config {i}: Cor3 value {cor3} vs {bound}");
        let scan = scan_spectrum(cfg, &ScanOptions::with_budget(1_000_000)).map_err(|e| format!("config {i}: {e}"))?;
        let oracle: f64 = combos
            .iter()
            .map(|c| 2.0 * exact_cos(&exact_angle(c.p, c.q, &c.coeffs, which), scan.k_best))
            .sum();
        ensure!((oracle - scan.value_best).abs() <= 1e-9, "config {i}: s_{} = {}, oracle {oracle}", scan.k_best, scan.value_best);
        ensure!(scan.value_best < bound, "config {i} (n={}): scan minimum {} not below {bound}", cfg.n(), scan.value_best);
        margins.push(bound - scan.value_best);
    }
    let least = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(format!("20/20 configs below -(1/π⁴) log n, smallest margin {least:.3}"))
}

fn criterion_7_configs() -> Vec<(CosineConfig, Vec<(f64, usize)>)> {
    let recipes: Vec<Vec<(f64, usize)>> = vec![
        vec![(1.0, 0)],
        vec![(0.7, 1)],
        vec![(2.5, 2)],
        vec![(1.0, 0), (1.0, 2)],
        vec![(1.0, 0), (0.5, 1)],
        vec![(0.8, 1), (1.3, 2)],
    ];
    recipes
        .into_iter()
        .map(|recipe| {
            let which: Vec<usize> = recipe.iter().map(|(_, w)| *w).collect();
            let basis = basis_of(&which);
            let terms = recipe
                .iter()
                .enumerate()
                .map(|(i, (b, _))| {
                    // √3 - 1 exceeds 1/2, so that term uses 2 - √3 and the same cosines.
                    let sign = if recipe[i].1 == 1 { -1 } else { 1 };
                    let coeffs = (0..recipe.len()).map(|j| if i == j { sign } else { 0 }).collect();
                    CosineTerm { b: *b, alpha: Angle::combination(i64::from(sign < 0), 1, coeffs) }
                })
                .collect();
            (CosineConfig::new(basis, terms).unwrap(), recipe)
        })
        .collect()
}

fn criterion_7() -> Check {
    let opts = CertifyOptions { epsilon: 1e-3, effort: 10_000_000, ..CertifyOptions::default() };
    let mut gaps = Vec::new();
    for (i, (cfg, recipe)) in criterion_7_configs().iter().enumerate() {
        let report = certify_cs_equals_ct(cfg, &opts).map_err(|e| format!("config {i}: {e}"))?;
        // Independent generators: the torus minimum puts every cosine at -1.
        let c_t: f64 = recipe.iter().map(|(b, _)| b.abs()).sum();
        ensure!((report.c_t - c_t).abs() <= 1e-6, "config {i}: c_T {} vs {c_t}", report.c_t);
        let f_k: f64 = recipe.iter().map(|(b, w)| b * exact_cos(&decimal(BASES[*w].1), report.k)).sum();
        ensure!((f_k - report.f_k).abs() <= 1e-9, "config {i}: f({}) = {}, oracle {f_k}", report.k, report.f_k);
        ensure!(report.certified, "config {i}: not certified");
        ensure!(f_k <= -report.c_t + 2e-3, "config {i}: f(k) = {f_k} > -c_T + 2ε");
        ensure!(report.lower_side_consistent && f_k >= -c_t - 1e-9, "config {i}: f(k) = {f_k} below -c_T");
        gaps.push(f_k + c_t);
    }
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    Ok(format!("{}/{} configs certified, largest f(k) + c_T = {worst:.2e}", gaps.len(), gaps.len()))
}

fn random_unit_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num = (BigInt::from(rng.gen::<u128>()) << 128) + BigInt::from(rng.gen::<u128>());
    BigRational::new(num, BigInt::one() << 256)
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut found = 0;
    for i in 0..100 {
        let count = rng.gen_range(1..=6);
        let mut values: Vec<BigRational> = (0..count - 1).map(|_| random_unit_rational(&mut rng)).collect();
        let coeffs: Vec<i64> = (0..count).map(|_| rng.gen_range(-100..=100)).collect();
        let last = loop {
            let c = rng.gen_range(-100i64..=100);
            if c != 0 {
                break c;
            }
        };
        let mut acc = BigRational::from_integer(coeffs[0].into());
        for (c, x) in coeffs[1..].iter().zip(&values) {
            acc += x * BigRational::from_integer((*c).into());
        }
        values.push(-acc / BigRational::from_integer(last.into()));
        let rels = numeric_relation_scan(&values, 100, 128).map_err(|e| format!("set {i}: {e}"))?;
        ensure!(rels.iter().any(|r| r.residual(&values).is_zero()), "set {i} ({count} values): planted relation missed, got {rels:?}");
        found += 1;
    }

    let mut false_degenerate = 0;
    let mut proven = 0;
    for _ in 0..100 {
        let which = random_subset(&mut rng);
        let pairs = rng.gen_range(1..=3);
        let combos = independent_combos(&mut rng, which.len(), pairs);
        let weights: Vec<i64> = (0..pairs).map(|_| rng.gen_range(1..10)).collect();
        let cfg = combo_config(&basis_of(&which), &combos, |j| Coefficient::integer(weights[j]));
        let verdict = detect_degeneracy(&cfg);
        if verdict.is_degenerate() {
            false_degenerate += 1;
        }
        if verdict.verdict == Verdict::NonDegenerate {
            proven += 1;
        }
    }
    ensure!(false_degenerate == 0, "{false_degenerate} relation-free sets reported degenerate");
    Ok(format!("{found}/100 planted relations found; 0/100 false degenerate ({proven} proven non-degenerate)"))
}

fn criterion_9_configs() -> Vec<SpectrumConfig> {
    let mut out = Vec::new();
    for which in [vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]] {
        let mut nodes = vec![Node::new(Coefficient::one(), Angle::combination(1, 2, vec![0; which.len()]))];
        for j in 0..which.len() {
            let coeffs: Vec<i64> = (0..which.len()).map(|i| i64::from(i == j)).collect();
            let angle = Angle::combination(0, 1, coeffs);
            nodes.push(Node::new(Coefficient::one(), angle.negate()));
            nodes.push(Node::new(Coefficient::one(), angle));
        }
        out.push(SpectrumConfig::new(basis_of(&which), nodes).unwrap());
    }
    out
}

fn criterion_9() -> Check {
    let budgets = [10u64, 100, 1_000, 10_000, 100_000, 1_000_000];
    let mut finals = Vec::new();
    for (i, cfg) in criterion_9_configs().iter().enumerate() {
        let n = cfg.n();
        let (reduced, offset) = reduce_minus_one(cfg).map_err(|e| format!("config {i}: {e}"))?;
        ensure!(offset == -1.0 && reduced.n() == n - 1, "config {i}: reduction offset {offset}, {} nodes", reduced.n());
        let mut last = f64::NAN;
        for budget in budgets {
            let opts = ScanOptions { budget, restrict: Restrict::All, start: 0, history: false };
            let chained = scan_spectrum(&reduced, &opts).map_err(|e| e.to_string())?.value_best + offset;
            let opts = ScanOptions { budget, restrict: Restrict::Odd, start: 1, history: false };
            let direct = scan_spectrum(cfg, &opts).map_err(|e| e.to_string())?;
            ensure!(direct.k_best % 2 != 0, "config {i}: direct odd scan returned k = {}", direct.k_best);
            ensure!(
                chained <= direct.value_best + 1e-12,
                "config {i}, budget {budget}: reduced {chained} > direct {}",
                direct.value_best
            );
            last = chained;
        }
        let bound = -inv_pi4_log(n);
        ensure!(last < bound, "config {i} (n={n}): final value {last} not below {bound}");
        finals.push(last);
    }
    Ok(format!("{} configs (n ∈ {{3,5}}) at 6 budgets, final values {:?}", finals.len(), finals.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>()))
}

fn write_config(dir: &Path, name: &str, file: &ConfigFile) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(file).unwrap()).unwrap();
    path.display().to_string()
}

/// Library results serialized under a pool of `threads` workers.
fn library_snapshot(threads: usize, c6: &SpectrumConfig, cosine: &CosineConfig) -> String {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let extremal = exact_period_scan(&extremal_example(9).unwrap()).unwrap();
        let scan = scan_spectrum(c6, &ScanOptions { history: true, ..ScanOptions::with_budget(1_000_000) }).unwrap();
        let certify = certify_cs_equals_ct(cosine, &CertifyOptions::default()).unwrap();
        let l1 = l1_norm(&TrigPolynomial::dirichlet(20).unwrap()).unwrap();
        let avg = AveragingCertificate::compute(c6, -12_345, 10_000).unwrap();
        serde_json::to_string(&(extremal, scan, certify, l1, avg)).unwrap()
    })
}

fn criterion_10() -> Check {
    let dir = std::env::temp_dir().join(format!("onesided-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let corpus = |name: &str| manifest_dir().join("corpus").join(name).display().to_string();

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let c2 = rational_config(&random_rational_nodes(&mut rng, 50, 10));
    let c3 = SpectrumConfig::unit_rational(&[(1, 7), (1, 7), (6, 7), (6, 7), (2, 9), (7, 9)]).unwrap();
    let c6 = criterion_6_configs().swap_remove(5).0;
    let c9 = criterion_9_configs().swap_remove(3);
    let cosine = match parse_config(&std::fs::read_to_string(corpus("cosine_m2.json")).unwrap()).unwrap() {
        Config::Cosine(c) => c,
        Config::Spectrum(_) => return Err("cosine_m2.json is not a cosine config".into()),
    };
    let p2 = write_config(&dir, "c2.json", &ConfigFile::from_spectrum(&c2));
    let p3 = write_config(&dir, "c3.json", &ConfigFile::from_spectrum(&c3));
    let p6 = write_config(&dir, "c6.json", &ConfigFile::from_spectrum(&c6));
    let p9 = write_config(&dir, "c9.json", &ConfigFile::from_spectrum(&c9));
    let corpus_dir = manifest_dir().join("corpus").display().to_string();
    let two = corpus("two_generators_n4.json");
    let cos = corpus("cosine_m2.json");
    let lemma1 = TheoremId::Lemma1.as_str();

    let runs: Vec<Vec<&str>> = vec![
        vec!["extremal", "--n", "9"],
        vec!["--config", &p2, "verify", "--theorem", "Thm1"],
        vec!["--config", &p2, "eval", "--from", "-50", "--to", "50"],
        vec!["--config", &p3, "bounds"],
        vec!["--config", &two, "verify", "--theorem", lemma1],
        vec!["--config", &p6, "--budget", "1000000", "verify", "--theorem", "Cor3"],
        vec!["--config", &cos, "certify"],
        vec!["--config", &cos, "continuous"],
        vec!["--config", &p6, "degeneracy"],
        vec!["--config", &two, "decompose"],
        vec!["--config", &p9, "--restrict", "odd", "--budget", "100000", "verify", "--theorem", "Cor3"],
        vec!["--budget", "20000", "corpus", "--dir", &corpus_dir],
    ];
    for args in &runs {
        let first = cli(args, Some(1));
        ensure!(!first.stdout.is_empty(), "{args:?}: no output ({})", String::from_utf8_lossy(&first.stderr));
        for threads in [1, 4] {
            let again = cli(args, Some(threads));
            ensure!(again.status.code() == first.status.code(), "{args:?}: exit code differs at {threads} threads");
            ensure!(again.stdout == first.stdout, "{args:?}: output differs at {threads} threads");
        }
    }
    let one = library_snapshot(1, &c6, &cosine);
    ensure!(one == library_snapshot(1, &c6, &cosine), "library results differ between runs");
    ensure!(one == library_snapshot(4, &c6, &cosine), "library results differ between 1 and 4 threads");
    std::fs::remove_dir_all(&dir).map_err(|e| e.to_string())?;
    Ok(format!("{} CLI invocations byte-identical over 3 runs (1 and 4 threads); library results identical", runs.len()))
}
