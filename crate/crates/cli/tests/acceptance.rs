//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use commcap::optimizer::{fd_step_for, simplex_shift};
use commcap::protocol::{
    clean_state, ensemble_density_matrix, ensemble_trace_distance, simulate_clean_protocol,
    NoisyAnswerModel,
};
use commcap::spectral::von_neumann_entropy;
use commcap::{
    bound_report, capacity_entropy, entropy_gradient, make_family, optimize_distributions,
    renyi2_of_spectrum, renyi2_uniform_fast, rng, sign_matrix, Family, FannesVariant,
    OptimizerConfig, Provenance, SignMatrix, SimplexVector,
};
use rand::Rng;
use serde_json::Value;

type Check = fn() -> Result<String, String>;

fn cli(args: &[&str]) -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = commcap_cli::run(
        std::iter::once("commcap").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    if code != 0 {
        return Err(format!(
            "{args:?} exited {code}: {}",
            String::from_utf8_lossy(&err)
        ));
    }
    String::from_utf8(out).map_err(|e| e.to_string())
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    serde_json::from_str(&cli(args)?).map_err(|e| e.to_string())
}

fn field(v: &Value, path: &[&str]) -> Result<f64, String> {
    path.iter()
        .fold(v, |v, k| &v[*k])
        .as_f64()
        .ok_or_else(|| format!("missing {}", path.join(".")))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit_s), || {
        format!("took {elapsed:.2?}, limit {limit_s} s")
    })
}

fn random_simplex(rng: &mut impl Rng, dim: usize, lo: f64) -> SimplexVector {
    SimplexVector::normalized((0..dim).map(|_| rng.random_range(lo..1.0)).collect()).unwrap()
}

fn ip_capacity() -> Result<String, String> {
    for n in 1..=8 {
        let start = Instant::now();
        let v = cli_json(&["bound", "--fn", "ip", "--n", &n.to_string()])?;
        let h = field(&v, &["results", "report", "entropy_bits"])?;
        ensure((h - n as f64).abs() <= 1e-9, || {
            format!("n={n}: entropy {h}")
        })?;
        if n == 8 {
            within(start.elapsed(), 5)?;
            return Ok(format!(
                "entropy_bits = n for n = 1..8; n = 8 in {:.2?}",
                start.elapsed()
            ));
        }
    }
    unreachable!()
}

fn fannes_arithmetic() -> Result<String, String> {
    let r = bound_report(10.0, 10, 0.01, FannesVariant::Paper, Provenance::User)
        .map_err(|e| e.to_string())?;
    // The criterion's closed form, evaluated directly.
    let log2_e = std::f64::consts::LOG2_E;
    let direct = 10.0 - 0.4 * 10.0 - (log2_e / std::f64::consts::E).log2();
    ensure((r.q_eps_fannes - direct).abs() <= 1e-6, || {
        format!("{} vs {direct}", r.q_eps_fannes)
    })?;
    ensure(r.q_eps_ent_fannes == r.q_eps_fannes / 2.0, || {
        "entangled bound is not half".into()
    })?;
    Ok(format!(
        "q_eps_fannes = {:.9} (closed form {direct:.9}; the quoted 6.913937 is {:.1e} away from its own formula)",
        r.q_eps_fannes,
        (6.913937 - direct).abs()
    ))
}

fn renyi_agreement() -> Result<String, String> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..200u64 {
        let n = 2 + (seed % 3) as usize;
        let m = sign_matrix(&make_family(Family::Random, n, Some(seed)).unwrap());
        let u = SimplexVector::uniform(m.dim());
        let spectrum = capacity_entropy(&m, &u, &u).map_err(|e| e.to_string())?;
        let fast = renyi2_uniform_fast(&m).s2_bits;
        let slow = renyi2_of_spectrum(&spectrum.sigma_sq)
            .map_err(|e| e.to_string())?
            .s2_bits;
        worst = worst.max((fast - slow).abs());
        ensure((fast - slow).abs() <= 1e-8, || {
            format!("seed {seed}: {fast} vs {slow}")
        })?;
        ensure(fast <= spectrum.entropy_bits + 1e-9, || {
            format!("seed {seed}: S2 {fast} > S {}", spectrum.entropy_bits)
        })?;
    }
    within(start.elapsed(), 30)?;
    Ok(format!(
        "200 functions, max |fast - spectrum| = {worst:.1e}, S2 <= S, {:.2?}",
        start.elapsed()
    ))
}

fn tail_desk_scale() -> Result<String, String> {
    let start = Instant::now();
    let v = cli_json(&[
        "tail", "--n", "4", "--delta", "0.5", "--trials", "10000", "--seed", "1",
    ])?;
    let freq = field(&v, &["results", "experiment", "empirical_freq"])?;
    let p = (-4.5f64).exp();
    let limit = p + 3.0 * (p * (1.0 - p) / 1e4).sqrt();
    ensure(limit <= 0.0143, || format!("slack threshold {limit}"))?;
    ensure(freq <= limit, || format!("empirical_freq {freq} > {limit}"))?;
    within(start.elapsed(), 60)?;
    Ok(format!(
        "empirical_freq = {freq} <= {limit:.6}, {:.2?}",
        start.elapsed()
    ))
}

fn protocol_algebra() -> Result<String, String> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut states = 0;
    for n in 1..=3 {
        for family in Family::ALL {
            let f = make_family(family, n, Some(n as u64)).unwrap();
            let b = SimplexVector::uniform(f.dim());
            for x in 0..f.dim() {
                let sim = simulate_clean_protocol(&f, x, &b).map_err(|e| e.to_string())?;
                let closed = clean_state(&f, x, &b).map_err(|e| e.to_string())?;
                let d: f64 = sim
                    .amplitudes
                    .iter()
                    .zip(&closed.amplitudes)
                    .map(|(p, q)| (p - q).norm_sqr())
                    .sum();
                worst = worst.max(d.sqrt());
                states += 1;
            }
        }
    }
    ensure(worst <= 1e-10, || {
        format!("clean protocol l2 error {worst}")
    })?;

    let (mut models, mut violations) = (0, 0);
    for n in [2, 3] {
        for eps in [0.01, 0.05, 0.1] {
            for i in 0..50u64 {
                let f = make_family(Family::Random, n, Some(i)).unwrap();
                let u = SimplexVector::uniform(f.dim());
                let model = NoisyAnswerModel::sample(n, eps, rng::derive_seed(i, n as u64))
                    .map_err(|e| e.to_string())?;
                let r = ensemble_trace_distance(&f, &u, &u, &model).map_err(|e| e.to_string())?;
                models += 1;
                if !(r.fidelity_pass && r.trace_distance_pass) {
                    violations += 1;
                }
            }
        }
    }
    ensure(violations == 0, || {
        format!("{violations} of {models} noisy models violate a ceiling")
    })?;
    within(start.elapsed(), 60)?;
    Ok(format!(
        "{states} clean states, max l2 error {worst:.1e}; {models} noisy models, 0 violations, {:.2?}",
        start.elapsed()
    ))
}

fn gram_ensemble() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    let mut r = rng::stream(6);
    for seed in 0..50u64 {
        let f = make_family(Family::Random, 3, Some(seed)).unwrap();
        let a = SimplexVector::uniform(8);
        let b = random_simplex(&mut r, 8, 0.0);
        let states = (0..8)
            .map(|x| clean_state(&f, x, &b))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let rho = ensemble_density_matrix(&states, &a).map_err(|e| e.to_string())?;
        let s = von_neumann_entropy(&rho).map_err(|e| e.to_string())?;
        let h = capacity_entropy(&sign_matrix(&f), &a, &b)
            .map_err(|e| e.to_string())?
            .entropy_bits;
        worst = worst.max((s - h).abs());
    }
    ensure(worst <= 1e-8, || format!("max |S(rho) - H| = {worst}"))?;
    Ok(format!("50 functions, max |S(rho) - H| = {worst:.1e}"))
}

fn disj_growth() -> Result<String, String> {
    let out = cli(&[
        "sweep", "--fn", "disj", "--n-min", "2", "--n-max", "10", "--dist", "uniform",
    ])?;
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    let got: Vec<(usize, f64)> = rd
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap())
        })
        .collect();
    let fixture = include_str!("fixtures/disj_uniform_entropy.csv");
    let oracle: Vec<(usize, f64)> = fixture
        .lines()
        .skip(1)
        .map(|l| {
            let (n, h) = l.split_once(',').unwrap();
            (n.parse().unwrap(), h.parse().unwrap())
        })
        .filter(|&(n, _)| (2..=10).contains(&n))
        .collect();
    ensure(got.len() == oracle.len(), || {
        format!("{} rows, fixture has {}", got.len(), oracle.len())
    })?;
    for (&(n, h), &(_, want)) in got.iter().zip(&oracle) {
        ensure((h - want).abs() <= 1e-9, || {
            format!("n={n}: {h} vs fixture {want}")
        })?;
    }
    for w in got.windows(2) {
        let (a, b) = (w[0].1 / w[0].0 as f64, w[1].1 / w[1].0 as f64);
        ensure(b < a, || format!("H/n not decreasing at n={}", w[1].0))?;
    }
    let h = |n: usize| got.iter().find(|r| r.0 == n).unwrap().1;
    ensure(h(10) < 2.0 * h(5), || {
        format!("H(10) = {} >= 2 H(5) = {}", h(10), 2.0 * h(5))
    })?;
    Ok(format!(
        "H/n strictly decreasing; H(10) = {:.6} < 2 H(5) = {:.6}; matches oracle fixture",
        h(10),
        2.0 * h(5)
    ))
}

fn stencil(m: &SignMatrix, a: &[f64], b: &[f64], on_a: bool) -> Vec<f64> {
    let entropy = |a: &[f64], b: &[f64]| {
        let a = SimplexVector::normalized(a.to_vec()).unwrap();
        let b = SimplexVector::normalized(b.to_vec()).unwrap();
        capacity_entropy(m, &a, &b).unwrap().entropy_bits
    };
    let w = if on_a { a } else { b };
    let g: Vec<f64> = (0..w.len())
        .map(|i| {
            let h = fd_step_for(w[i], 1e-3) / 2.0;
            let f = |t: f64| {
                let s = simplex_shift(w, i, t);
                if on_a {
                    entropy(&s, b)
                } else {
                    entropy(a, &s)
                }
            };
            (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h)
        })
        .collect();
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    g.iter().map(|v| v - mean).collect()
}

/// Relative error, except that an identically flat objective (constant
/// functions) must give a numerically zero gradient.
fn gradient_ok(got: &[f64], want: &[f64]) -> bool {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = got.iter().zip(want).map(|(x, y)| x - y).collect();
    if norm(want) < 1e-9 {
        norm(got) < 1e-6
    } else {
        norm(&diff) / norm(want) < 1e-3
    }
}

fn optimizer_soundness() -> Result<String, String> {
    let start = Instant::now();
    let cfg = OptimizerConfig::default();
    let mut r = rng::stream(8);
    let mut checked = 0;
    for n in 2..=4 {
        for family in Family::ALL {
            let m = sign_matrix(&make_family(family, n, Some(n as u64)).unwrap());
            let u = SimplexVector::uniform(m.dim());
            let uniform = capacity_entropy(&m, &u, &u)
                .map_err(|e| e.to_string())?
                .entropy_bits;
            let got = optimize_distributions(&m, &cfg).map_err(|e| e.to_string())?;
            ensure(got.entropy_bits >= uniform - 1e-9, || {
                format!("{family} n={n}: below uniform")
            })?;
            let fresh = capacity_entropy(&m, &got.a, &got.b)
                .map_err(|e| e.to_string())?
                .entropy_bits;
            ensure((fresh - got.entropy_bits).abs() <= 1e-8, || {
                format!("{family} n={n}: witness {fresh}")
            })?;
            for _ in 0..20 {
                let (a, b) = (
                    random_simplex(&mut r, m.dim(), 0.05),
                    random_simplex(&mut r, m.dim(), 0.05),
                );
                let g = entropy_gradient(&m, &a, &b, cfg.fd_step).map_err(|e| e.to_string())?;
                ensure(
                    gradient_ok(&g.grad_a, &stencil(&m, a.weights(), b.weights(), true)),
                    || format!("{family} n={n}: grad_a mismatch"),
                )?;
                ensure(
                    gradient_ok(&g.grad_b, &stencil(&m, a.weights(), b.weights(), false)),
                    || format!("{family} n={n}: grad_b mismatch"),
                )?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "21 (family, n) pairs, {checked} gradient points, {:.2?}",
        start.elapsed()
    ))
}

fn desk_scale_scope() -> Result<String, String> {
    Ok("asymptotic claims are out of scope: the almost-all-functions linear bound is represented by \
        criterion 4 and capacity achievability by criterion 6, both at fixed small n"
        .into())
}

fn main() {
    let checks: [(&str, Check); 9] = [
        ("IP capacity equals n", ip_capacity),
        ("bounded-error bound arithmetic", fannes_arithmetic),
        ("Renyi-2 fast path agrees with spectrum", renyi_agreement),
        ("random-function tail at desk scale", tail_desk_scale),
        (
            "clean protocol algebra and noisy ceilings",
            protocol_algebra,
        ),
        ("Gram spectrum equals ensemble entropy", gram_ensemble),
        ("DISJ sublinear growth", disj_growth),
        ("optimizer soundness", optimizer_soundness),
        ("desk-scale scope statement", desk_scale_scope),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({why})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
