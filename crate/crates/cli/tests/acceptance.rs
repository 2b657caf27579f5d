//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report lines stay readable; the
//! process exits nonzero when any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use assembly_core::number::{factorial, rational_to_f64};
use assembly_core::oracle::{structure_oracle_permutations, OracleSummary};
use assembly_core::registry::scan_constants;
use assembly_core::sampler::{chi_square, sample_profiles, solve_tilt, SamplerConfig};
use assembly_core::{
    builtin_class, check_condition, g_of_n, q_table, suggest_constants, AdditiveFunction,
    AssemblyClass, BigRational, ConditionId, Error, Family, MomentEngine, Real, Scalar,
    WeaklyLogParams,
};
use num_bigint::BigInt;

const CLASSES: [&str; 5] = [
    "permutations",
    "mappings",
    "two_regular_graphs",
    "set_partitions",
    "forests",
];

/// Criterion 1: largest order and wall-clock budget.
const ORACLE_MAX_N: usize = 40;
const ORACLE_BUDGET: Duration = Duration::from_secs(300);
/// Criterion 5: largest order.
const IDENTITY_MAX_N: usize = 60;
/// Criterion 6: allowed growth of the running supremum from n <= 100 to n <= 200.
const SUP_GROWTH: f64 = 0.05;
/// Criterion 7: relative tolerance, and the magnitude below which values are
/// compared absolutely (the float tables carry subnormal weights there).
const MODE_REL_TOL: f64 = 1e-9;
const MODE_ABS_FLOOR: f64 = 1e-300;
/// Criterion 8: tolerance on the suggested constants.
const CONSTANT_TOL: f64 = 1e-9;
/// Criterion 9: sample size, agreement band, goodness-of-fit threshold and budget.
const SAMPLES: usize = 100_000;
const STDERR_BAND: f64 = 3.0;
const CHI_SQUARE_LEVEL: f64 = 1e-4;
const SAMPLER_BUDGET: Duration = Duration::from_secs(60);

type Check = Result<String, String>;

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

/// Rational-valued families at order `n`.
fn exact_families(n: usize) -> Vec<AdditiveFunction> {
    [
        Family::ComponentCount,
        Family::SmallComponents,
        Family::Rademacher { seed: 7 },
        Family::DistinctSizes,
        Family::SingleSize { size: 2 },
    ]
    .iter()
    .map(|f| f.for_n(n))
    .collect()
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut compared = 0usize;
    for name in CLASSES {
        let class = builtin_class(name).map_err(err)?;
        let engine = MomentEngine::<BigRational>::new(&class, ORACLE_MAX_N).map_err(err)?;
        let q = q_table::<BigRational>(&class, ORACLE_MAX_N).map_err(err)?;
        for n in 1..=ORACLE_MAX_N {
            let families = exact_families(n);
            let summary = match OracleSummary::compute(&class, n, &families) {
                Ok(s) => s,
                Err(Error::EmptySupport { .. }) => {
                    ensure(!engine.has_support(n) && q.get(n).is_zero(), || {
                        format!("{name} n={n}: oracle finds no structures but the engine does")
                    })?;
                    continue;
                }
                Err(e) => return Err(err(e)),
            };
            ensure(*q.get(n) == summary.q, || {
                format!("{name} n={n}: Q differs")
            })?;
            for j in 1..=n {
                ensure(
                    engine.pmf(n, j).map_err(err)? == summary.pmfs[j - 1],
                    || format!("{name} n={n}: law of k_{j} differs"),
                )?;
            }
            for ((h, (mean, var)), bound) in families
                .iter()
                .zip(&summary.moments)
                .zip(&summary.second_moment_bounds)
            {
                let (m, v) = engine.moments(n, h).map_err(err)?;
                ensure(&m == mean && &v == var, || {
                    format!("{name} n={n} {}: moments differ", h.name())
                })?;
                ensure(&engine.rhs_general(n, h).map_err(err)? == bound, || {
                    format!("{name} n={n} {}: general bound differs", h.name())
                })?;
                compared += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= ORACLE_BUDGET, || {
        format!("took {elapsed:?}, budget {ORACLE_BUDGET:?}")
    })?;
    Ok(format!("5 classes, n <= {ORACLE_MAX_N}, {compared} (class, n, h) moments and bounds exact in {elapsed:.1?}"))
}

fn bell_numbers(upto: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(1)];
    let mut row = vec![BigInt::from(1)];
    for _ in 1..=upto {
        let mut next = vec![row.last().unwrap().clone()];
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        out.push(next[0].clone());
        row = next;
    }
    out
}

/// Labeled 2-regular graphs: sum over partitions of `n` into parts >= 3.
fn two_regular_direct(n: usize) -> BigInt {
    fn parts(n: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(acc.clone());
            return;
        }
        for p in (3..=max.min(n)).rev() {
            acc.push(p);
            parts(n - p, p, acc, out);
            acc.pop();
        }
    }
    let mut all = Vec::new();
    parts(n, n, &mut Vec::new(), &mut all);
    let mut total = BigInt::from(0);
    for p in all {
        let mut num = factorial(n);
        let mut den = BigInt::from(1);
        for (j, group) in itertools_group(&p) {
            for _ in 0..group {
                num *= factorial(j - 1);
                den *= factorial(j) * 2;
            }
            den *= factorial(group);
        }
        total += num / den;
    }
    total
}

fn itertools_group(parts: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &p in parts {
        match out.last_mut() {
            Some((q, c)) if *q == p => *c += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

fn closed_form_counting() -> Check {
    let perm = builtin_class("permutations").map_err(err)?;
    let q = q_table::<BigRational>(&perm, 500).map_err(err)?;
    ensure(q.values().iter().all(|v| *v == int(1)), || {
        "permutations: Q(n) != 1".into()
    })?;
    let maps = builtin_class("mappings").map_err(err)?;
    for n in 1..=25usize {
        let expect = BigRational::from_integer(BigInt::from(n).pow(n as u32));
        ensure(g_of_n(&maps, n).map_err(err)? == expect, || {
            format!("mappings G({n}) != n^n")
        })?;
    }
    let graphs = builtin_class("two_regular_graphs").map_err(err)?;
    for (n, e) in [1u64, 0, 0, 1, 3, 12, 70, 465, 3507]
        .into_iter()
        .enumerate()
    {
        ensure(two_regular_direct(n) == BigInt::from(e), || {
            format!("direct count at n={n} is off")
        })?;
        ensure(g_of_n(&graphs, n).map_err(err)? == int(e), || {
            format!("two_regular_graphs G({n}) != {e}")
        })?;
    }
    let sets = builtin_class("set_partitions").map_err(err)?;
    for (n, b) in bell_numbers(20).into_iter().enumerate() {
        ensure(
            g_of_n(&sets, n).map_err(err)? == BigRational::from_integer(b),
            || format!("set_partitions G({n}) is not the Bell number"),
        )?;
    }
    Ok("Q=1 to 500, n^n to 25, 2-regular to 8, Bell to 20".into())
}

/// `(H_n, H_n - H_n^(2))` as mean and variance of a sum of Bernoulli(1/i).
fn bernoulli_sums(upto: usize) -> Vec<(BigRational, BigRational)> {
    let mut out = vec![(int(0), int(0))];
    for i in 1..=upto as i64 {
        let p = ratio(1, i);
        let (m, v) = out.last().unwrap().clone();
        out.push((&m + &p, v + &p * (int(1) - &p)));
    }
    out
}

fn closed_form_moments() -> Check {
    let w = AdditiveFunction::component_count();
    let reference = bernoulli_sums(200);
    for n in 1..=8 {
        ensure(
            structure_oracle_permutations(n, &w).map_err(err)? == reference[n],
            || format!("Bernoulli reference disagrees with permutation structures at n={n}"),
        )?;
    }
    let engine =
        MomentEngine::<BigRational>::new(&builtin_class("permutations").map_err(err)?, 200)
            .map_err(err)?;
    let all = engine.moments_upto(200, &w).map_err(err)?;
    for n in 1..=200 {
        ensure(all[n].as_ref() == Some(&reference[n]), || {
            format!("moments differ at n={n}")
        })?;
    }
    Ok("E w = H_n and V w = H_n - H_n^(2) exactly for n <= 200".into())
}

fn permutation_bound() -> Check {
    let reference = bernoulli_sums(200);
    let engine =
        MomentEngine::<BigRational>::new(&builtin_class("permutations").map_err(err)?, 200)
            .map_err(err)?;
    let sweep = engine
        .sweep(&Family::ComponentCount, 1..=200)
        .map_err(err)?;
    ensure(sweep.reports.len() == 200, || "sweep skipped orders".into())?;
    let mut worst = 0.0f64;
    for r in &sweep.reports {
        let n = r.n;
        let h = &reference[n].0;
        ensure(r.rhs2.as_ref() == Some(h), || {
            format!("rhs2 != H_n at n={n}")
        })?;
        let r2 = r
            .ratio2
            .clone()
            .ok_or_else(|| format!("no ratio2 at n={n}"))?;
        ensure(r2 == &reference[n].1 / h && r2 < int(1), || {
            format!("ratio2 wrong at n={n}")
        })?;
        worst = worst.max(r2.as_f64());
    }
    Ok(format!(
        "rhs2 = H_n, ratio2 < 1 for n <= 200 (max {worst:.6})"
    ))
}

/// `Q^{excluded}(0..=n_max)` by the plain recurrence.
fn restricted_sums(class: &AssemblyClass, n_max: usize, excluded: usize) -> Vec<BigRational> {
    let lam: Vec<BigRational> = (0..=n_max).map(|j| class.lambda(j)).collect();
    let mut q = vec![int(1)];
    for n in 1..=n_max {
        let mut s = int(0);
        for j in 1..=n {
            if j != excluded {
                s += &lam[j] * int(j as u64) * &q[n - j];
            }
        }
        q.push(s / int(n as u64));
    }
    q
}

fn general_bound_identity() -> Check {
    let mut checked = 0usize;
    for name in CLASSES {
        let class = builtin_class(name).map_err(err)?;
        let engine = MomentEngine::<BigRational>::new(&class, IDENTITY_MAX_N).map_err(err)?;
        let full = restricted_sums(&class, IDENTITY_MAX_N, 0);
        let excl: Vec<Vec<BigRational>> = (0..=IDENTITY_MAX_N)
            .map(|j| {
                if j == 0 {
                    Vec::new()
                } else {
                    restricted_sums(&class, IDENTITY_MAX_N, j)
                }
            })
            .collect();
        for n in 1..=IDENTITY_MAX_N {
            if full[n].is_zero() {
                continue;
            }
            for h in exact_families(n) {
                // sum_j sum_k h_j(k)^2 P(k_j = k), each law written out directly
                let mut expect = int(0);
                for j in 1..=n {
                    let lam = class.lambda(j);
                    let mut term = int(1);
                    for k in 1..=n / j {
                        term = term * &lam / int(k as u64);
                        let v: BigRational = h.h(j, k).map_err(err)?;
                        expect += &v * &v * &term * &excl[j][n - j * k];
                    }
                }
                expect /= &full[n];
                let got = engine.rhs_general(n, &h).map_err(err)?;
                ensure(got == expect, || {
                    format!("{name} n={n} {}: bound differs", h.name())
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} (class, n, h) cases exact for n <= {IDENTITY_MAX_N}"
    ))
}

fn ratios_bounded() -> Check {
    let mut worst = (String::new(), 0.0f64);
    let mut failures = Vec::new();
    for (name, n0) in [
        ("permutations", 1),
        ("mappings", 1),
        ("two_regular_graphs", 4),
    ] {
        let class = builtin_class(name).map_err(err)?;
        let engine = MomentEngine::<f64>::new(&class, 200).map_err(err)?;
        for family in Family::sweep_families(7) {
            let s = engine.sweep(&family, n0..=200).map_err(err)?;
            for r in &s.reports {
                for v in [r.ratio1, r.ratio2].into_iter().flatten() {
                    ensure(v.is_finite(), || {
                        format!("{name} {family} n={}: ratio not finite", r.n)
                    })?;
                }
            }
            for (label, full, half) in [
                ("ratio1", s.sup_ratio1, s.sup_ratio1_upto(100)),
                ("ratio2", s.sup_ratio2, s.sup_ratio2_upto(100)),
            ] {
                let (Some((_, full)), Some((_, half))) = (full, half) else {
                    continue;
                };
                let growth = full / half - 1.0;
                let key = format!("{name}/{family}/{label}");
                if growth > worst.1 {
                    worst = (key.clone(), growth);
                }
                if growth > SUP_GROWTH {
                    failures.push(format!(
                        "{key}: sup grows {:.2}% ({half:.6} -> {full:.6})",
                        100.0 * growth
                    ));
                }
            }
        }
    }
    if failures.is_empty() {
        Ok(format!(
            "all finite; largest sup growth {:.2}% ({})",
            100.0 * worst.1,
            worst.0
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn close(exact: &BigRational, float: f64) -> bool {
    let e = rational_to_f64(exact);
    if e.abs() < MODE_ABS_FLOOR {
        return (float - e).abs() < MODE_ABS_FLOOR;
    }
    ((float - e) / e).abs() <= MODE_REL_TOL
}

/// Mean and variance. A variance that is exactly zero has no relative error;
/// there the float value must vanish relative to `E h^2`, the scale of the
/// difference it is computed from.
fn close_moments(mean: &BigRational, var: &BigRational, fmean: f64, fvar: f64) -> bool {
    if !close(mean, fmean) {
        return false;
    }
    if Scalar::is_zero(var) {
        let scale = rational_to_f64(mean).powi(2);
        return fvar.abs() <= MODE_REL_TOL * scale.max(MODE_ABS_FLOOR);
    }
    close(var, fvar)
}

/// `x rho^n` in exact arithmetic when `rho` is rational, else in floats.
fn scaled(x: &BigRational, rho: &Real, n: usize) -> BigRational {
    match rho {
        Real::Exact(r) => {
            let mut out = x.clone();
            for _ in 0..n {
                out *= r;
            }
            out
        }
        Real::Float(r) => {
            let ln = assembly_core::number::ln_rational(x) + n as f64 * r.ln();
            BigRational::from_float(ln.exp()).unwrap_or_else(|| int(0))
        }
    }
}

fn mode_agreement() -> Check {
    const N: usize = 200;
    let mut compared = 0usize;
    for name in CLASSES {
        let class = builtin_class(name).map_err(err)?;
        let exact = MomentEngine::<BigRational>::new(&class, N).map_err(err)?;
        let float = MomentEngine::<f64>::new(&class, N).map_err(err)?;
        for n in 0..=N {
            let e = scaled(exact.tables().q(n), class.rho(), n);
            ensure(close(&e, *float.tables().q(n)), || {
                format!("{name}: scaled Q({n}) differs")
            })?;
        }
        for n in (1..=N).filter(|&n| exact.has_support(n)) {
            for j in 1..=n {
                let pe = exact.pmf(n, j).map_err(err)?;
                let pf = float.pmf(n, j).map_err(err)?;
                for (k, (a, b)) in pe.probabilities.iter().zip(&pf.probabilities).enumerate() {
                    ensure(close(a, *b), || {
                        format!(
                            "{name}: P(k_{j}={k}) at n={n}: {} vs {b:e}",
                            rational_to_f64(a)
                        )
                    })?;
                    compared += 1;
                }
            }
        }
        for family in [
            Family::ComponentCount,
            Family::Rademacher { seed: 7 },
            Family::DistinctSizes,
        ] {
            let h = family.for_n(N);
            let me = exact.moments_upto(N, &h).map_err(err)?;
            let mf = float.moments_upto(N, &h).map_err(err)?;
            for (n, (a, b)) in me.iter().zip(&mf).enumerate() {
                if let (Some((m1, v1)), Some((m2, v2))) = (a, b) {
                    ensure(close_moments(m1, v1, *m2, *v2), || {
                        format!("{name} {family}: moments differ at n={n}")
                    })?;
                    compared += 2;
                }
            }
        }
        for n in [10, 50, 100, 150, 200]
            .into_iter()
            .filter(|&n| exact.has_support(n))
        {
            let h = Family::SmallComponents.for_n(n);
            let (m1, v1) = exact.moments(n, &h).map_err(err)?;
            let (m2, v2) = float.moments(n, &h).map_err(err)?;
            ensure(close_moments(&m1, &v1, m2, v2), || {
                format!("{name} half: moments differ at n={n}")
            })?;
            compared += 2;
        }
    }
    Ok(format!(
        "{compared} values within {MODE_REL_TOL:e} relative for n <= {N}"
    ))
}

fn condition_checker() -> Check {
    let one = Real::integer(1);
    let perm = builtin_class("permutations").map_err(err)?;
    let s = suggest_constants(&perm, &one, 200)
        .map_err(err)?
        .ok_or("no suggestion for permutations")?;
    ensure(
        (s.theta_upper.to_f64() - 1.0).abs() <= CONSTANT_TOL
            && (s.theta.to_f64() - 1.0).abs() <= CONSTANT_TOL
            && (s.theta_prime.to_f64() - (-1f64).exp()).abs() <= CONSTANT_TOL,
        || format!("permutations suggested {s:?}"),
    )?;

    let graphs = builtin_class("two_regular_graphs").map_err(err)?;
    let suggested = suggest_constants(&graphs, &one, 200)
        .map_err(err)?
        .ok_or("no suggestion for two_regular_graphs")?;
    let params = WeaklyLogParams::new(
        one.clone(),
        Real::ratio(1, 2),
        Real::ratio(1, 4),
        suggested.theta_prime,
        4,
    )
    .map_err(err)?;
    for id in [
        ConditionId::Upper,
        ConditionId::LowerSum,
        ConditionId::QLower,
    ] {
        let v = check_condition(&graphs, &params, id, 200).map_err(err)?;
        ensure(v.holds, || {
            format!("two_regular_graphs fails {id}: {:?}", v.witness)
        })?;
    }

    let strong = check_condition(&graphs, &params, ConditionId::Strong, 200).map_err(err)?;
    ensure(
        !strong.holds && strong.witness.as_ref().map(|w| w.index) == Some(1),
        || format!("two_regular_graphs strong condition: {strong:?}"),
    )?;

    let mut witnesses = Vec::new();
    for name in ["forests", "set_partitions"] {
        let class = builtin_class(name).map_err(err)?;
        let calib = scan_constants(&class, class.rho(), 50).map_err(err)?;
        let params = WeaklyLogParams::new(
            class.rho().clone(),
            calib.theta_upper,
            calib.theta,
            Real::Float(calib.theta_prime.max(1e-300)),
            calib.n0,
        )
        .map_err(err)?;
        let v = check_condition(&class, &params, ConditionId::LowerSum, 100).map_err(err)?;
        let w = v
            .witness
            .clone()
            .ok_or_else(|| format!("{name}: no witness"))?;
        ensure(
            !v.holds && !w.satisfied(v.tolerance) && w.index > 50 && w.index <= 100,
            || format!("{name}: expected a condition (3) failure in (50, 100], got {v:?}"),
        )?;
        witnesses.push(format!("{name} at n={}", w.index));
    }
    Ok(format!(
        "permutations (1, 1, {:.12}); two_regular_graphs passes (2)-(4) and fails (1) at j=1; (3) fails for {}",
        s.theta_prime.to_f64(),
        witnesses.join(", ")
    ))
}

fn sampler_agreement() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    for (name, j, seed) in [("permutations", 1, 101), ("two_regular_graphs", 3, 102)] {
        let class = builtin_class(name).map_err(err)?;
        let exact = MomentEngine::<BigRational>::new(&class, 20)
            .map_err(err)?
            .pmf(20, j)
            .map_err(err)?;
        let p = exact.probabilities[0].as_f64();
        let batch = sample_profiles(&class, 20, SAMPLES, &SamplerConfig::new(seed)).map_err(err)?;
        let est = batch.marginal(j)[0] as f64 / SAMPLES as f64;
        let se = (p * (1.0 - p) / SAMPLES as f64).sqrt();
        ensure((est - p).abs() <= STDERR_BAND * se, || {
            format!("{name}: P(k_{j}=0) = {est:.5}, exact {p:.5}, se {se:.5}")
        })?;
        notes.push(format!("{name} {:.2} se", (est - p).abs() / se));
    }
    let mut worst = 1.0f64;
    for name in CLASSES {
        let class = builtin_class(name).map_err(err)?;
        for n in [4, 11, 30] {
            let mut config = SamplerConfig::new(1000 + n as u64);
            if matches!(name, "set_partitions" | "forests") {
                config.tilt = Some(solve_tilt(&class, n, 1e3).map_err(err)?.value);
            }
            let batch = sample_profiles(&class, n, SAMPLES, &config).map_err(err)?;
            let engine = MomentEngine::<f64>::new(&class, n).map_err(err)?;
            for j in [1, 3] {
                let law = engine.pmf(n, j).map_err(err)?;
                let t = chi_square(&batch.marginal(j), &law.probabilities);
                ensure(t.p_value >= CHI_SQUARE_LEVEL, || {
                    format!("{name} n={n} j={j}: chi-square {t:?}")
                })?;
                worst = worst.min(t.p_value);
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= SAMPLER_BUDGET, || {
        format!("took {elapsed:?}, budget {SAMPLER_BUDGET:?}")
    })?;
    Ok(format!(
        "{}; smallest chi-square p = {worst:.4}; {elapsed:.1?}",
        notes.join(", ")
    ))
}

fn run_cli(args: &[&str], threads: usize) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_assembly-tk"))
        .args(args)
        .arg("--threads")
        .arg(threads.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "{args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok(out.stdout)
}

fn determinism() -> Check {
    let commands: [&[&str]; 9] = [
        &["classes"],
        &["count", "--class", "mappings", "--n", "60"],
        &[
            "count", "--class", "forests", "--n", "150", "--mode", "float",
        ],
        &[
            "check",
            "--class",
            "two_regular_graphs",
            "--auto",
            "--N",
            "150",
            "--format",
            "json",
        ],
        &[
            "pmf",
            "--class",
            "set_partitions",
            "--n",
            "40",
            "--j",
            "2",
            "--mode",
            "float",
        ],
        &[
            "tk", "--class", "mappings", "--n", "30", "--family", "distinct",
        ],
        &[
            "sweep",
            "--class",
            "permutations",
            "--to",
            "120",
            "--family",
            "half",
            "--mode",
            "float",
        ],
        &[
            "sweep",
            "--class",
            "two_regular_graphs",
            "--to",
            "40",
            "--family",
            "rademacher:3",
            "--format",
            "json",
        ],
        &[
            "sample",
            "--class",
            "permutations",
            "--n",
            "25",
            "--reps",
            "20000",
            "--seed",
            "42",
        ],
    ];
    for args in commands {
        let base = run_cli(args, 1)?;
        for threads in [1, 2, 8] {
            ensure(run_cli(args, threads)? == base, || {
                format!("{args:?} differs at --threads {threads}")
            })?;
        }
    }
    Ok(format!(
        "{} commands byte-identical at 1, 2 and 8 threads",
        commands.len()
    ))
}

fn main() {
    let criteria: [(u8, &str, fn() -> Check); 10] = [
        (1, "oracle equivalence", oracle_equivalence),
        (2, "closed-form counting", closed_form_counting),
        (3, "closed-form moments", closed_form_moments),
        (
            4,
            "completely additive bound on permutations",
            permutation_bound,
        ),
        (
            5,
            "general bound as a second-moment sum",
            general_bound_identity,
        ),
        (6, "bounded ratios", ratios_bounded),
        (7, "exact and float agreement", mode_agreement),
        (8, "condition checker", condition_checker),
        (9, "sampler agreement", sampler_agreement),
        (10, "determinism", determinism),
    ];
    let only: Vec<u8> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, title, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2} ({title}): {detail} [{elapsed:.1?}]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:>2} ({title}): {detail} [{elapsed:.1?}]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
