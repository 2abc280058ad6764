//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ifacediv::mc_oracle::{mc_check, SimConfig};
use ifacediv::optimizer::{two_split_latency, SigmaModel};
use ifacediv::presets::{ScenarioId, ScenarioPreset};
use ifacediv::strategy_eval::{binomial_k_of_n, k_of_n_closed_form, outcome_sum};
use ifacediv::trace_playback::{run_playback, synthetic_trace};
use ifacediv::{
    analytic_two_split, brute_force_optimize, eval_cloning, eval_k_of_n, eval_weighted, objective,
    AllocationVector, EmpiricalCurve, GridSpec, InterfaceProfile, ReliabilityCurve, Strategy,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Delivery probability within `x` of a `bytes` packet, written out
/// independently of the library.
fn reference_f(p: &InterfaceProfile, x: f64, bytes: f64) -> f64 {
    let mu = (p.alpha * bytes + p.beta) / 2.0;
    let sd = p.sigma_ratio * mu;
    p.p_succ * phi((x - mu) / sd)
}

fn brute_force(f: &[f64], gamma: &[f64], sum: f64, decode_min: f64) -> f64 {
    match f.split_first() {
        None => {
            if sum >= decode_min - 1e-9 {
                1.0
            } else {
                0.0
            }
        }
        Some((&fi, rest)) => {
            fi * brute_force(rest, &gamma[1..], sum + gamma[0], decode_min)
                + (1.0 - fi) * brute_force(rest, &gamma[1..], sum, decode_min)
        }
    }
}

fn random_profile(rng: &mut ChaCha8Rng, name: &str) -> InterfaceProfile {
    InterfaceProfile::with_sigma_ratio(
        name,
        rng.random_range(0.0..1.0),
        rng.random_range(10.0..500.0),
        rng.random_range(0.9..1.0),
        rng.random_range(0.05..0.3),
    )
    .expect("valid random profile")
}

fn ac1() -> Check {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    let mut worst_sum = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=6);
        let profiles: Vec<_> = (0..n)
            .map(|i| random_profile(&mut rng, &format!("if{i}")))
            .collect();
        let gamma: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.15) {
                    0.0
                } else {
                    rng.random_range(0.0..=1.05)
                }
            })
            .collect();
        let bytes = rng.random_range(100.0..2000.0);
        let x = rng.random_range(0.0..1500.0);
        let alloc = AllocationVector::new(gamma.clone()).map_err(|e| e.to_string())?;
        let curves: Vec<_> = profiles
            .iter()
            .cloned()
            .map(ReliabilityCurve::from)
            .collect();
        let got = eval_weighted(&curves, &alloc, bytes, x).map_err(|e| e.to_string())?;
        let f: Vec<f64> = profiles
            .iter()
            .zip(&gamma)
            .map(|(p, &g)| reference_f(p, x, g * bytes))
            .collect();
        let want = brute_force(&f, &gamma, 0.0, 1.0);
        worst = worst.max((got - want).abs());
        let total = outcome_sum(&f, |_| true).map_err(|e| e.to_string())?;
        worst_sum = worst_sum.max((total - 1.0).abs());
    }
    let elapsed = started.elapsed();
    let detail = format!(
        "max |enum - brute| = {worst:.2e}, max |sum - 1| = {worst_sum:.2e}, {:.2}s",
        elapsed.as_secs_f64()
    );
    if worst <= 1e-12 && worst_sum <= 1e-12 && elapsed < Duration::from_secs(10) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..300 {
        let n = rng.random_range(1..=10);
        let p: f64 = rng.random_range(1e-6..1.0 - 1e-6);
        let step = EmpiricalCurve::new(vec![(0.0, p)], p).map_err(|e| e.to_string())?;
        let curves = vec![ReliabilityCurve::Empirical(step); n];
        let x = 1.0;

        let cloning_enum = eval_weighted(
            &curves,
            &AllocationVector::uniform(n, 1.0).map_err(|e| e.to_string())?,
            1.0,
            x,
        )
        .map_err(|e| e.to_string())?;
        let cloning_closed = 1.0 - (1.0 - p).powi(n as i32);
        let cloning_lib = eval_cloning(&curves, 1.0, x).map_err(|e| e.to_string())?;
        worst = worst
            .max((cloning_enum - cloning_closed).abs())
            .max((cloning_lib - cloning_closed).abs());

        for k in 1..=n {
            let enumerated = eval_k_of_n(&curves, k, 1.0, x).map_err(|e| e.to_string())?;
            let closed = binomial_k_of_n(p, k, n).map_err(|e| e.to_string())?;
            worst = worst.max((enumerated - closed).abs());
            cases += 1;
        }

        // identical parametric interfaces through the library's closed form
        let prof = random_profile(&mut rng, "same");
        let par = vec![ReliabilityCurve::from(prof); n];
        let bytes = rng.random_range(100.0..2000.0);
        let x = rng.random_range(0.0..1200.0);
        for k in 1..=n {
            let enumerated = eval_k_of_n(&par, k, bytes, x).map_err(|e| e.to_string())?;
            let closed = k_of_n_closed_form(&par, k, bytes, x).map_err(|e| e.to_string())?;
            worst = worst.max((enumerated - closed).abs());
            cases += 1;
        }
    }
    let detail = format!("{cases} k-of-N cases, max deviation {worst:.2e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac3() -> Check {
    let started = Instant::now();
    let mut runs = Vec::new();
    for (id, starred) in [
        (ScenarioId::A, false),
        (ScenarioId::B, false),
        (ScenarioId::B, true),
        (ScenarioId::C, false),
    ] {
        let preset = ScenarioPreset::new(id, starred);
        let n = preset.profiles.len();
        let sol = brute_force_optimize(
            &preset.curves(),
            preset.bytes,
            &preset.target,
            &GridSpec::new(0.05),
        )
        .map_err(|e| e.to_string())?;
        let label = if starred {
            format!("{id}*")
        } else {
            id.to_string()
        };
        if !starred {
            runs.push((label.clone(), preset.clone(), Strategy::Cloning));
            for k in 1..=n {
                runs.push((label.clone(), preset.clone(), Strategy::KofN(k)));
            }
        }
        runs.push((label, preset, Strategy::Weighted(sol.gamma_star)));
    }
    let mut failures = Vec::new();
    let mut worst_ratio = 0.0f64;
    for (i, (label, preset, strategy)) in runs.iter().enumerate() {
        let config = SimConfig {
            n_trials: 1_000_000,
            seed: 1000 + i as u64,
            profiles: preset.profiles.clone(),
            strategy: strategy.clone(),
            bytes: preset.bytes,
        };
        let report = mc_check(&config, 20).map_err(|e| e.to_string())?;
        for p in &report.probes {
            worst_ratio = worst_ratio.max(p.deviation() / p.bound);
        }
        if !report.pass {
            failures.push(format!("{label}/{strategy}"));
        }
    }
    let elapsed = started.elapsed();
    let detail = format!(
        "{} runs x 20 probes at 1e6 trials, worst |dev|/bound = {worst_ratio:.3}, {:.1}s",
        runs.len(),
        elapsed.as_secs_f64()
    );
    if failures.is_empty() && elapsed < Duration::from_secs(120) {
        Ok(detail)
    } else {
        Err(format!("{detail}; failing: {failures:?}"))
    }
}

/// E[max(X, Y)] for independent Gaussians by direct quadrature of
/// ∫ (1 - F_X F_Y) over the positive axis minus ∫ F_X F_Y over the negative.
fn exact_expected_max(mu_a: f64, sd_a: f64, mu_b: f64, sd_b: f64) -> f64 {
    let lo = (mu_a - 12.0 * sd_a).min(mu_b - 12.0 * sd_b).min(0.0);
    let hi = (mu_a + 12.0 * sd_a).max(mu_b + 12.0 * sd_b).max(0.0);
    let cdf = |x: f64| phi((x - mu_a) / sd_a) * phi((x - mu_b) / sd_b);
    let simpson = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| {
        let m = 20_000;
        let h = (b - a) / m as f64;
        let mut s = f(a) + f(b);
        for j in 1..m {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + j as f64 * h);
        }
        s * h / 3.0
    };
    simpson(0.0, hi, &|x| 1.0 - cdf(x)) - simpson(lo, 0.0, &cdf)
}

fn ac4() -> Check {
    let preset = ScenarioPreset::new(ScenarioId::A, false);
    let (a, b) = (&preset.profiles[0], &preset.profiles[1]);
    let bytes = preset.bytes;
    let mut lines = Vec::new();
    let mut ok = true;
    for total in [1.0, 1.05] {
        let sol = analytic_two_split(a, b, bytes, total).map_err(|e| e.to_string())?;
        let detail = sol.analytic.ok_or("missing analytic detail")?;
        let exact_at = |g: f64| {
            let (ba, bb) = (g * bytes, (total - g) * bytes);
            let (ma, mb) = ((a.alpha * ba + a.beta) / 2.0, (b.alpha * bb + b.beta) / 2.0);
            exact_expected_max(ma, a.sigma_ratio * ma, mb, b.sigma_ratio * mb)
        };
        let lo = (total - 1.05f64).max(0.0);
        let hi = total.min(1.05);
        let steps = ((hi - lo) / 0.001 + 1e-9).floor() as usize;
        let (scan_g, scan_l) = (0..=steps)
            .map(|j| (lo + j as f64 * 0.001).min(hi))
            .map(|g| (g, exact_at(g)))
            .fold((f64::NAN, f64::INFINITY), |best, c| {
                if c.1 < best.1 {
                    c
                } else {
                    best
                }
            });
        let rel = (detail.expected_latency_ms - scan_l).abs() / scan_l;
        ok &= rel <= 0.02;
        lines.push(format!(
            "total {total}: analytic gamma {:.4} L {:.2} ms, scan gamma {scan_g:.3} L {scan_l:.2} ms, rel {rel:.2e}",
            detail.gamma, detail.expected_latency_ms
        ));
    }
    let detail = lines.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac5() -> Check {
    let started = Instant::now();
    let preset = ScenarioPreset::new(ScenarioId::C, false);
    let curves = preset.curves();
    let sol = brute_force_optimize(&curves, preset.bytes, &preset.target, &GridSpec::new(0.05))
        .map_err(|e| e.to_string())?;
    let fw =
        eval_weighted(&curves, &sol.gamma_star, preset.bytes, 500.0).map_err(|e| e.to_string())?;
    let best_k = (1..=5)
        .map(|k| eval_k_of_n(&curves, k, preset.bytes, 500.0))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?
        .into_iter()
        .fold(0.0f64, f64::max);
    let elapsed = started.elapsed();
    let detail = format!(
        "F_weighted(500) = {fw:.6} at gamma {:.2?}, best k-of-5 F(500) = {best_k:.6}, {:.1}s",
        sol.gamma_star.gamma(),
        elapsed.as_secs_f64()
    );
    if 1.0 - fw <= 0.5 * (1.0 - best_k) && elapsed < Duration::from_secs(300) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac6() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut f900 = Vec::new();
    for starred in [false, true] {
        let preset = ScenarioPreset::new(ScenarioId::B, starred);
        let curves = preset.curves();
        let sol = brute_force_optimize(&curves, preset.bytes, &preset.target, &GridSpec::new(0.05))
            .map_err(|e| e.to_string())?;
        let mut best_rival = f64::NEG_INFINITY;
        for s in std::iter::once(Strategy::Cloning).chain((1..=5).map(Strategy::KofN)) {
            let alloc = s.allocation(5).map_err(|e| e.to_string())?;
            let o = objective(&curves, &alloc, preset.bytes, &preset.target)
                .map_err(|e| e.to_string())?;
            best_rival = best_rival.max(o);
        }
        ok &= sol.objective_value >= best_rival;
        f900.push(
            eval_weighted(&curves, &sol.gamma_star, preset.bytes, 900.0)
                .map_err(|e| e.to_string())?,
        );
        lines.push(format!(
            "{}: optimized {:.6} vs best fixed {best_rival:.6}",
            if starred { "B*" } else { "B" },
            sol.objective_value
        ));
    }
    ok &= f900[1] >= f900[0];
    lines.push(format!(
        "F(900) unstarred {:.9}, starred {:.9}",
        f900[0], f900[1]
    ));
    let detail = lines.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac7() -> Check {
    let bytes = 128.0;
    let profiles = [
        InterfaceProfile::with_sigma_ratio("wlan", 0.1, 20.0, 0.99, 0.35)
            .map_err(|e| e.to_string())?,
        InterfaceProfile::with_sigma_ratio("lte", 0.0067, 34.0, 0.98, 0.2)
            .map_err(|e| e.to_string())?,
        InterfaceProfile::with_sigma_ratio("hspa", 0.05, 28.0, 0.981, 0.25)
            .map_err(|e| e.to_string())?,
    ];
    let traces = profiles
        .iter()
        .zip([71u64, 72, 73])
        .map(|(p, seed)| synthetic_trace(&p.name, p, bytes, 100_000, seed))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let strategies = [
        Strategy::KofN(1),
        Strategy::KofN(2),
        Strategy::KofN(3),
        Strategy::Cloning,
    ];
    let report = run_playback(&traces, &strategies).map_err(|e| e.to_string())?;
    let worst = report
        .strategies
        .iter()
        .map(|s| s.ks)
        .fold(0.0f64, f64::max);
    let detail = report
        .strategies
        .iter()
        .map(|s| format!("{} KS {:.4}", s.strategy, s.ks))
        .collect::<Vec<_>>()
        .join(", ");
    if worst <= 0.01 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut accepted = 0;
    let mut redrawn = 0;
    let mut worst = 0.0f64;
    while accepted < 100 {
        let a = random_profile(&mut rng, "a");
        let b = random_profile(&mut rng, "b");
        let bytes = rng.random_range(200.0..3000.0);
        let total = rng.random_range(0.5..=1.05);
        let sol = analytic_two_split(&a, &b, bytes, total).map_err(|e| e.to_string())?;
        let d = sol.analytic.ok_or("missing analytic detail")?;
        if d.clamped || d.degenerate {
            redrawn += 1;
            continue;
        }
        let h = 1e-5;
        let l = |g: f64| two_split_latency(&a, &b, bytes, total, g, SigmaModel::FrozenXi(d.xi_ms));
        let slope = (l(d.gamma + h) - l(d.gamma - h)) / (2.0 * h);
        worst = worst.max(slope.abs() / l(d.gamma));
        accepted += 1;
    }
    let detail = format!("max |dL/dgamma| / L = {worst:.2e} over 100 interior optima ({redrawn} clamped draws replaced)");
    if worst <= 1e-3 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run_binary(args: &[&str], threads: Option<&str>) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ifacediv"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("IFACEDIV_THREADS", t),
        None => cmd.env_remove("IFACEDIV_THREADS"),
    };
    let out = cmd.output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    Ok(out.stdout)
}

fn ac9() -> Check {
    let commands: [&[&str]; 3] = [
        &["optimize", "--preset", "C"],
        &["optimize", "--preset", "A"],
        &[
            "mc-check",
            "--preset",
            "A",
            "--strategy",
            "optimized",
            "--trials",
            "300000",
            "--seed",
            "17",
        ],
    ];
    let mut lines = Vec::new();
    for args in commands {
        let reference = run_binary(args, Some("1"))?;
        for threads in [None, Some("2"), Some("4"), Some("7"), Some("1")] {
            if run_binary(args, threads)? != reference {
                return Err(format!(
                    "{} differs with threads {threads:?}",
                    args.join(" ")
                ));
            }
        }
        lines.push(format!("{} ({} bytes)", args.join(" "), reference.len()));
    }
    Ok(format!(
        "identical across thread counts: {}",
        lines.join(", ")
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "AC-1 weighted enumeration matches brute-force expansion",
            ac1,
        ),
        ("AC-2 closed forms match enumeration", ac2),
        ("AC-3 analytic curves within 3 sigma of Monte Carlo", ac3),
        ("AC-4 scenario A analytic split vs exact grid scan", ac4),
        (
            "AC-5 scenario C weighted halves the best k-of-5 miss rate",
            ac5,
        ),
        ("AC-6 scenario B optimum dominates fixed strategies", ac6),
        ("AC-7 trace playback matches marginal prediction", ac7),
        ("AC-8 first-order condition at the analytic split", ac8),
        ("AC-9 outputs independent of thread count", ac9),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let result = check();
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("[PASS] {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("{} of 9 acceptance criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
