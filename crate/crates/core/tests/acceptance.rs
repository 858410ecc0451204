//! One PASS/FAIL line per acceptance criterion.
//!
//! Runs without the libtest harness so the lines appear in plain
//! `cargo test` output. The process fails if any criterion fails for a reason
//! other than a documented deviation.

mod common;

use std::time::{Duration, Instant};

use common::*;
use secant_core::catalog::{build_family, verify_all, EntryOutcome, Family};
use secant_core::hilbert::hilbert12;
use secant_core::terracini::{min_defective_scan, secant_dim, tangential_projection, SecantReport};
use secant_core::{Engine, VarietySpec as V};

const SEEDS: [u64; 2] = [2024, 77];

/// Field names the measured F13 table is known to disagree on.
const F13_DEVIATION: &[&str] = &["n_k"];

enum Verdict {
    Pass,
    Fail(String),
    /// Fails only on a documented conflict in the expected table.
    Known(String),
}

struct Line {
    id: usize,
    title: &'static str,
    elapsed: Duration,
    verdict: Verdict,
}

impl Line {
    fn print(&self) {
        let (tag, note) = match &self.verdict {
            Verdict::Pass => ("PASS", String::new()),
            Verdict::Fail(m) => ("FAIL", format!(": {m}")),
            Verdict::Known(m) => ("FAIL", format!(": known deviation, {m}")),
        };
        println!("criterion {}: {tag} {} [{:.2?}]{note}", self.id, self.title, self.elapsed);
    }
}

fn run(id: usize, title: &'static str, f: impl FnOnce() -> Verdict) -> Line {
    let t = Instant::now();
    let verdict = f();
    Line { id, title, elapsed: t.elapsed(), verdict }
}

fn within(limit: Duration, elapsed: Duration, v: Verdict) -> Verdict {
    match v {
        Verdict::Pass if elapsed > limit => Verdict::Fail(format!("took {elapsed:.2?}, limit {limit:?}")),
        v => v,
    }
}

/// Runs `f` under each seed and requires identical results with cross-prime agreement.
fn stable<T: PartialEq + std::fmt::Debug>(f: impl Fn(&Engine) -> Result<(T, bool), String>) -> Result<T, String> {
    let mut first = None;
    for seed in SEEDS {
        let (v, agree) = f(&Engine::new(seed))?;
        if !agree {
            return Err(format!("trials or primes disagree under seed {seed}"));
        }
        match &first {
            None => first = Some(v),
            Some(w) if *w != v => return Err(format!("seed {seed} gives {v:?}, first seed {w:?}")),
            _ => {}
        }
    }
    Ok(first.unwrap())
}

fn secant(e: &Engine, spec: &V, k: usize) -> Result<SecantReport, String> {
    secant_dim(e, spec, k).map_err(|e| e.to_string())
}

fn criterion1() -> Verdict {
    let spec = V::veronese(V::linear(3), 2);
    let t = Instant::now();
    let got = stable(|e| secant(e, &spec, 1).map(|r| ((r.s_k(), r.delta_k, r.sigma_k), r.agreement)));
    let elapsed = t.elapsed() / SEEDS.len() as u32;
    let v = match got {
        Ok((6, 1, 7)) => Verdict::Pass,
        Ok(v) => Verdict::Fail(format!("(s, delta, sigma) = {v:?}")),
        Err(m) => Verdict::Fail(m),
    };
    within(Duration::from_secs(1), elapsed, v)
}

fn criterion2() -> Verdict {
    for k in [2, 3] {
        let spec = V::segre(V::linear(k + 1), V::linear(k + 1));
        let got = stable(|e| {
            let r = secant(e, &spec, 1)?;
            let t = tangential_projection(e, &spec, 1).map_err(|e| e.to_string())?;
            Ok(((r.delta_k, t.n_k), r.agreement))
        });
        match got {
            Ok((2, n)) if n == 2 * k => {}
            Ok(v) => return Verdict::Fail(format!("k={k}: (delta_1, n_1) = {v:?}")),
            Err(m) => return Verdict::Fail(format!("k={k}: {m}")),
        }
    }
    Verdict::Pass
}

/// Field-by-field comparison of the F13 full variant at order `k`.
fn f13_mismatches(e: &Engine, k: usize) -> Result<(Vec<String>, bool), String> {
    let spec = build_family(Family::F13, k, Some("full")).map_err(|e| e.to_string())?.spec;
    let (first, reports) = min_defective_scan(e, &spec, k + 1).map_err(|e| e.to_string())?;
    let n_k = tangential_projection(e, &spec, k).map_err(|e| e.to_string())?.n_k;
    let at = &reports[k];
    let mut bad = Vec::new();
    let mut check = |name: &str, ok: bool, got: String| {
        if !ok {
            bad.push(format!("{name}={got}"));
        }
    };
    check("minimal", first == Some(k), format!("{first:?}"));
    check("s_k", at.s_k() == 4 * k + 2, at.s_k().to_string());
    check("s_k_plus_1", reports[k + 1].s_k() == 4 * k + 4, reports[k + 1].s_k().to_string());
    check("n_k", n_k == 1, n_k.to_string());
    check("delta_k", at.delta_k == 1, at.delta_k.to_string());
    Ok((bad, reports[k + 1].agreement))
}

fn criterion3() -> Verdict {
    let mut notes = Vec::new();
    for k in 2..=4 {
        let t = Instant::now();
        let bad = match stable(|e| f13_mismatches(e, k)) {
            Ok(b) => b,
            Err(m) => return Verdict::Fail(format!("k={k}: {m}")),
        };
        let per_run = t.elapsed() / SEEDS.len() as u32;
        if k == 4 && per_run > Duration::from_secs(60) {
            return Verdict::Fail(format!("k=4 took {per_run:.2?}"));
        }
        let names: Vec<&str> = bad.iter().map(|b| b.split('=').next().unwrap()).collect();
        if !names.is_empty() && names != F13_DEVIATION {
            return Verdict::Fail(format!("k={k}: {}", bad.join(", ")));
        }
        if !bad.is_empty() {
            notes.push(format!("k={k} {}", bad.join(", ")));
        }
    }
    if notes.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Known(format!("printed n_k = 1; measured {}", notes.join("; ")))
    }
}

fn criterion4() -> Verdict {
    let all = verify_all(&Engine::new(SEEDS[0]), 2..=4);
    let mut hard = Vec::new();
    let mut known = Vec::new();
    for (key, out) in &all.entries {
        match out {
            EntryOutcome::Verified(r) if r.pass => {}
            EntryOutcome::Verified(r) => {
                let fields: Vec<&str> = r.mismatches.iter().map(|m| m.field.as_str()).collect();
                let detail: Vec<String> = r.mismatches.iter().map(|m| format!("{}={} (expected {})", m.field, m.measured, m.expected)).collect();
                if r.entry.family == Family::F13 && fields == F13_DEVIATION {
                    known.push(format!("{key} {}", detail.join(", ")));
                } else {
                    hard.push(format!("{key} {}", detail.join(", ")));
                }
            }
            EntryOutcome::Failed { error, .. } => hard.push(format!("{key} error {error}")),
        }
    }
    for k in 2..=4 {
        for f in [Family::F3, Family::F6, Family::F9] {
            if !all.skipped.iter().any(|s| s.family == f && s.k == k) {
                hard.push(format!("{f} k={k} not reported as skipped"));
            }
        }
    }
    let expected_families = [
        Family::F1,
        Family::F2,
        Family::F4,
        Family::F5,
        Family::F7,
        Family::F8,
        Family::F10,
        Family::F11,
        Family::F12,
        Family::F13,
        Family::F14,
    ];
    for f in expected_families {
        if !all.entries.iter().any(|(_, o)| matches!(o, EntryOutcome::Verified(r) if r.entry.family == f)) {
            hard.push(format!("{f} has no verified entry"));
        }
    }
    if !hard.is_empty() {
        Verdict::Fail(hard.join("; "))
    } else if !known.is_empty() {
        Verdict::Known(format!("{} of {} entries, all F13 n_k only: {}", known.len(), all.entries.len(), known.join("; ")))
    } else {
        Verdict::Pass
    }
}

fn criterion5() -> Verdict {
    let spec = match build_family(Family::ExTerracini13, 4, None) {
        Ok(e) => e.spec,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    match stable(|e| secant(e, &spec, 4).map(|r| ((r.at(3).delta_k, r.delta_k, r.s_k(), r.r), r.agreement))) {
        Ok((0, 1, 18, 19)) => Verdict::Pass,
        Ok(v) => Verdict::Fail(format!("(delta_3, delta_4, s_4, r) = {v:?}")),
        Err(m) => Verdict::Fail(m),
    }
}

fn criterion6() -> Verdict {
    let mut checked = 0;
    for seed in SEEDS {
        let e = Engine::new(seed);
        for (name, spec, bound) in chain_corpus() {
            match check_chain_law(&e, &spec, bound) {
                Ok(c) => checked += c,
                Err(m) => return Verdict::Fail(format!("{name}: {m}")),
            }
        }
    }
    if checked == 0 {
        return Verdict::Fail("nothing checked".into());
    }
    Verdict::Pass
}

fn criterion7() -> Verdict {
    let e = Engine::new(SEEDS[0]);
    for (i, base) in cone_bases(SEEDS[0]).iter().enumerate() {
        let y = base.spec();
        for s in 0..=2 {
            let x = ruled_over(base, s, &mut rng(100 * i as u64 + s as u64, "ruled"));
            if let Err(m) = check_cone_law(&e, &x, &y, s + 1, s, 4) {
                return Verdict::Fail(format!("vertex P^{s}, base {i}: {m}"));
            }
        }
        // A vertex of dimension 2s = 0 cannot carry a variety projecting with two
        // dimensions less, so the second law starts at s = 1.
        for s in 1..=2 {
            let x = fibered_over(base, s, &mut rng(100 * i as u64 + s as u64, "fibered"));
            if let Err(m) = check_cone_law(&e, &x, &y, 2 * s + 1, s, 4) {
                return Verdict::Fail(format!("vertex P^{}, base {i}: {m}", 2 * s));
            }
        }
    }
    Verdict::Pass
}

fn criterion8() -> Verdict {
    let e = Engine::new(SEEDS[0]);
    for (name, spec, r, n, d) in minimal_degree_cases() {
        match hilbert12(&e, &spec) {
            Ok((_, h2)) if h2 == bound_formula(r, n, d) => {}
            Ok((_, h2)) => return Verdict::Fail(format!("{name}: h2 = {h2}, bound {}", bound_formula(r, n, d))),
            Err(m) => return Verdict::Fail(format!("{name}: {m}")),
        }
    }
    for r in [6, 7] {
        match hilbert12(&e, &line_cone_over_curve(r)) {
            Ok((h1, h2)) if h1 == r && h2 == 4 * r - 4 => {}
            Ok(v) => return Verdict::Fail(format!("r={r}: (h1, h2) = {v:?}")),
            Err(m) => return Verdict::Fail(format!("r={r}: {m}")),
        }
    }
    Verdict::Pass
}

fn criterion9() -> Verdict {
    let suites: [(&str, u32, Box<dyn Fn(u64) -> Result<(), proptest::test_runner::TestCaseError>>); 5] = [
        ("euler", 60, Box::new(|s| check_euler(s, 1 + (s % 4) as usize, 1 + (s >> 8) as u32 % 4))),
        ("leibniz", 60, Box::new(|s| check_leibniz(s, 1 + (s % 3) as usize, (s >> 8) as u32 % 4))),
        ("kernel", 60, Box::new(|s| check_kernel(s, 1 + (s % 7) as usize, 1 + (s >> 8) as usize % 8, (s >> 16) as usize % 8))),
        ("frame", 60, Box::new(|s| check_frame(s, (s % 4) as usize))),
        ("cross-prime", 40, Box::new(check_cross_prime)),
    ];
    let mut total = 0;
    for (name, cases, check) in suites {
        if let Err(m) = run_seeded(cases, check) {
            return Verdict::Fail(format!("{name}: {m}"));
        }
        total += cases;
    }
    if total < 200 {
        return Verdict::Fail(format!("only {total} cases"));
    }
    Verdict::Pass
}

fn main() {
    let t = Instant::now();
    let mut lines = vec![
        run(1, "v2(P^3) at k=1: s=6, delta=1, sigma=7, under 1 s", criterion1),
        run(2, "Segre P^(k+1) x P^(k+1), k=2,3: delta_1=2, n_1=2k", criterion2),
        run(3, "F13 full, k=2..4: minimal, s_k=4k+2, s_k+1=4k+4, n_k=1, delta_k=1", criterion3),
    ];
    let t4 = Instant::now();
    let c4 = criterion4();
    let e4 = t4.elapsed();
    lines.push(Line { id: 4, title: "catalog verify-all over k=2..4", elapsed: e4, verdict: within(Duration::from_secs(600), e4, c4) });
    lines.push(run(5, "Terracini P^1 x P^2 in P^19: delta_3=0, delta_4=1, s_4=18", criterion5));
    lines.push(run(6, "chain law s^(h) = n_h + s^(h-1) + 1 on the corpus", criterion6));
    lines.push(run(7, "cone laws over 3 random bases, vertex shifts s+1 and 2s+1", criterion7));
    lines.push(run(8, "degree-two Hilbert bound and 4r-4 for the line cone", criterion8));
    lines.push(run(9, "property suite, 280 seed-pinned cases", criterion9));

    println!();
    for line in &lines {
        line.print();
    }
    let hard: Vec<usize> = lines.iter().filter(|l| matches!(l.verdict, Verdict::Fail(_))).map(|l| l.id).collect();
    let known = lines.iter().filter(|l| matches!(l.verdict, Verdict::Known(_))).count();
    println!("acceptance: {} pass, {known} known deviations, {} fail [{:.2?}]", lines.len() - known - hard.len(), hard.len(), t.elapsed());
    if !hard.is_empty() {
        eprintln!("failing criteria: {hard:?}");
        std::process::exit(1);
    }
}
