use std::io::Write;

use commcap::protocol::{
    clean_state, ensemble_trace_distance, simulate_clean_protocol, EnsembleReport, NoisyAnswerModel,
};
use commcap::randfn::{
    entropy_tail_bound, entropy_tail_bound_doubled, s2_from_t, t_statistic, t_tail_bound,
    tail_experiment, TailExperimentConfig, TailExperimentResult,
};
use commcap::{
    bound_report, capacity_entropy, make_family, optimize_distributions, parse_ccf,
    renyi2_of_spectrum, renyi2_uniform_fast, rng, sign_matrix, BooleanFunction, BoundReport,
    Family, FannesVariant, OptimizerConfig, OptimizerResult, Provenance, Renyi2Result, SignMatrix,
    SimplexVector, SpectrumResult,
};
use serde::Serialize;

use crate::args::{
    BoundArgs, Command, Dist, Fannes, Format, FunctionArgs, OptimizeArgs, OptimizerFlags,
    ProtocolArgs, Source, SweepArgs, TailArgs,
};
use crate::output::{cell, to_json, write_csv, RunManifest};
use crate::Failure;

const PAPER_NOTE: &str = "fannes=paper subtracts log2(eta0(4 sqrt(eps))) with an n-qubit dimension; \
     that correction is smaller than the textbook Fannes inequality justifies, so these bounded-error \
     values are not certified. Use fannes=conservative for sound bounds.";

pub(crate) fn dispatch(
    command: &Command,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    match command {
        Command::Bound(a) => bound(a, out),
        Command::Renyi2(a) => renyi2(a, out),
        Command::Optimize(a) => optimize(a, out),
        Command::ProtocolCheck(a) => protocol_check(a, out, err),
        Command::Tail(a) => tail(a, out),
        Command::Sweep(a) => sweep(a, out),
    }
}

fn build(family: Family, n: usize, seed: Option<u64>) -> Result<BooleanFunction, Failure> {
    if family == Family::Random && seed.is_none() {
        return Err(Failure::Usage("--fn random needs --seed".into()));
    }
    Ok(make_family(family, n, seed)?)
}

fn load(source: &Source, n: Option<u32>, seed: Option<u64>) -> Result<BooleanFunction, Failure> {
    match (&source.family, &source.file) {
        (Some(family), _) => {
            let n = n.ok_or_else(|| Failure::Usage("--fn needs --n".into()))?;
            build(*family, n as usize, seed)
        }
        (None, Some(path)) => {
            let bytes = std::fs::read(path)
                .map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))?;
            let f = parse_ccf(&bytes)
                .map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))?;
            match n {
                Some(n) if n as usize != f.n() => Err(Failure::Usage(format!(
                    "--n {n} disagrees with n = {} in {}",
                    f.n(),
                    path.display()
                ))),
                _ => Ok(f),
            }
        }
        (None, None) => Err(Failure::Usage("one of --fn or --file is required".into())),
    }
}

fn optimizer_config(flags: &OptimizerFlags, seed: Option<u64>) -> OptimizerConfig {
    OptimizerConfig {
        restarts: flags.restarts,
        max_iters: flags.max_iters as usize,
        seed: seed.unwrap_or(0),
        ..OptimizerConfig::default()
    }
}

fn variant(f: Fannes) -> FannesVariant {
    match f {
        Fannes::Paper => FannesVariant::Paper,
        Fannes::Conservative => FannesVariant::Conservative,
    }
}

/// Bounds below this many bits are roundoff-level and say nothing.
const VACUOUS_TOL: f64 = 1e-9;

#[derive(Debug, Serialize)]
struct Vacuous {
    q_exact: bool,
    q_exact_ent: bool,
    q_eps_fannes: bool,
    q_eps_ent_fannes: bool,
    q_eps_repeated: bool,
}

impl Vacuous {
    fn of(r: &BoundReport) -> Self {
        Vacuous {
            q_exact: r.q_exact < VACUOUS_TOL,
            q_exact_ent: r.q_exact_ent < VACUOUS_TOL,
            q_eps_fannes: r.q_eps_fannes < VACUOUS_TOL,
            q_eps_ent_fannes: r.q_eps_ent_fannes < VACUOUS_TOL,
            q_eps_repeated: r.q_eps_repeated < VACUOUS_TOL,
        }
    }

    fn any(&self) -> bool {
        self.q_exact
            || self.q_exact_ent
            || self.q_eps_fannes
            || self.q_eps_ent_fannes
            || self.q_eps_repeated
    }
}

struct Evaluation {
    spectrum: SpectrumResult,
    renyi2: Renyi2Result,
    h_uniform: f64,
    report: BoundReport,
    witness: Option<OptimizerResult>,
}

fn evaluate(
    m: &SignMatrix,
    dist: Dist,
    eps: f64,
    fannes: Fannes,
    cfg: &OptimizerConfig,
) -> Result<Evaluation, Failure> {
    let u = SimplexVector::uniform(m.dim());
    let uniform = capacity_entropy(m, &u, &u)?;
    let h_uniform = uniform.entropy_bits;
    let (spectrum, renyi2, witness, provenance) = match dist {
        Dist::Uniform => (uniform, renyi2_uniform_fast(m), None, Provenance::Uniform),
        Dist::Optimize => {
            let w = optimize_distributions(m, cfg)?;
            let spectrum = capacity_entropy(m, &w.a, &w.b)?;
            let renyi2 = renyi2_of_spectrum(&spectrum.sigma_sq)?;
            (spectrum, renyi2, Some(w), Provenance::Optimized)
        }
    };
    let report = bound_report(
        spectrum.entropy_bits,
        m.n(),
        eps,
        variant(fannes),
        provenance,
    )?;
    Ok(Evaluation {
        spectrum,
        renyi2,
        h_uniform,
        report,
        witness,
    })
}

#[derive(Serialize)]
struct BoundResults<'a> {
    n: usize,
    report: &'a BoundReport,
    vacuous: Vacuous,
    spectrum: &'a SpectrumResult,
    renyi2: &'a Renyi2Result,
    uniform_entropy_bits: f64,
    witness: Option<&'a OptimizerResult>,
    fannes_note: Option<&'static str>,
}

fn bound(a: &BoundArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let fa = &a.function;
    let f = load(&fa.source, fa.n, fa.seed)?;
    let m = sign_matrix(&f);
    let cfg = optimizer_config(&a.optimizer, fa.seed);
    let e = evaluate(&m, a.dist, a.eps, a.fannes, &cfg)?;
    let r = &e.report;
    match a.format {
        Format::Json => {
            let results = BoundResults {
                n: f.n(),
                report: r,
                vacuous: Vacuous::of(r),
                spectrum: &e.spectrum,
                renyi2: &e.renyi2,
                uniform_entropy_bits: e.h_uniform,
                witness: e.witness.as_ref(),
                fannes_note: (a.fannes == Fannes::Paper).then_some(PAPER_NOTE),
            };
            RunManifest::new("bound", a, to_json(&results)).write(out)?;
        }
        Format::Csv => {
            let header = [
                "n",
                "entropy_bits",
                "s2_bits",
                "epsilon",
                "q_exact",
                "q_exact_ent",
                "q_eps_fannes",
                "q_eps_ent_fannes",
                "q_eps_repeated",
                "repetitions",
                "fannes_variant",
                "distribution_provenance",
                "vacuous",
            ];
            let row = vec![
                r.n.to_string(),
                cell(r.entropy_bits),
                cell(e.renyi2.s2_bits),
                cell(r.epsilon),
                cell(r.q_exact),
                cell(r.q_exact_ent),
                cell(r.q_eps_fannes),
                cell(r.q_eps_ent_fannes),
                cell(r.q_eps_repeated),
                r.repetitions.to_string(),
                label(&r.fannes_variant),
                label(&r.distribution_provenance),
                Vacuous::of(r).any().to_string(),
            ];
            write_csv(out, &header, &[row])?;
        }
    }
    Ok(())
}

/// Serialized name of a unit enum variant.
fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

#[derive(Serialize)]
struct Renyi2Results {
    n: usize,
    renyi2: Renyi2Result,
    /// Same quantity through the off-diagonal statistic T.
    s2_bits_from_t: f64,
}

fn renyi2(a: &FunctionArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let f = load(&a.source, a.n, a.seed)?;
    let m = sign_matrix(&f);
    let results = Renyi2Results {
        n: f.n(),
        renyi2: renyi2_uniform_fast(&m),
        s2_bits_from_t: s2_from_t(f.n(), t_statistic(&m)),
    };
    RunManifest::new("renyi2", a, to_json(&results)).write(out)?;
    Ok(())
}

#[derive(Serialize)]
struct OptimizeResults {
    n: usize,
    seed: u64,
    uniform_entropy_bits: f64,
    result: OptimizerResult,
}

fn optimize(a: &OptimizeArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let fa = &a.function;
    let f = load(&fa.source, fa.n, fa.seed)?;
    let m = sign_matrix(&f);
    let cfg = optimizer_config(&a.optimizer, fa.seed);
    let u = SimplexVector::uniform(m.dim());
    let results = OptimizeResults {
        n: f.n(),
        seed: cfg.seed,
        uniform_entropy_bits: capacity_entropy(&m, &u, &u)?.entropy_bits,
        result: optimize_distributions(&m, &cfg)?,
    };
    RunManifest::new("optimize", a, to_json(&results)).write(out)?;
    Ok(())
}

#[derive(Serialize)]
struct CleanCheck {
    max_l2_error: f64,
    pass: bool,
}

#[derive(Serialize)]
struct Trial {
    model_seed: u64,
    report: EnsembleReport,
}

#[derive(Serialize)]
struct ProtocolSummary {
    trials: usize,
    fidelity_violations: usize,
    trace_distance_violations: usize,
    fannes_conservative_violations: usize,
    /// Logged only; the `paper` inequality is not implied by the Fannes bound.
    fannes_paper_violations: usize,
    all_pass: bool,
}

#[derive(Serialize)]
struct ProtocolResults {
    n: usize,
    epsilon: f64,
    clean_protocol: CleanCheck,
    summary: ProtocolSummary,
    trials: Vec<Trial>,
}

fn protocol_check(
    a: &ProtocolArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let f = load(&a.source, a.n, Some(a.seed))?;
    let n = f.n();
    if n > commcap::protocol::MAX_SIMULATED_N {
        return Err(Failure::Usage(format!(
            "protocol-check simulates n <= {}, got {n}",
            commcap::protocol::MAX_SIMULATED_N
        )));
    }
    let u = SimplexVector::uniform(f.dim());
    let mut max_l2_error: f64 = 0.0;
    for x in 0..f.dim() {
        let sim = simulate_clean_protocol(&f, x, &u)?;
        let closed = clean_state(&f, x, &u)?;
        let d: f64 = sim
            .amplitudes
            .iter()
            .zip(&closed.amplitudes)
            .map(|(p, q)| (p - q).norm_sqr())
            .sum();
        max_l2_error = max_l2_error.max(d.sqrt());
    }
    let clean_protocol = CleanCheck {
        max_l2_error,
        pass: max_l2_error <= 1e-10,
    };

    let mut trials = Vec::with_capacity(a.trials as usize);
    for t in 0..a.trials {
        let model_seed = rng::derive_seed(a.seed, t);
        let model = NoisyAnswerModel::sample(n, a.eps, model_seed)?;
        let report = ensemble_trace_distance(&f, &u, &u, &model)?;
        trials.push(Trial { model_seed, report });
    }
    let count =
        |pred: fn(&EnsembleReport) -> bool| trials.iter().filter(|t| !pred(&t.report)).count();
    let summary = ProtocolSummary {
        trials: trials.len(),
        fidelity_violations: count(|r| r.fidelity_pass),
        trace_distance_violations: count(|r| r.trace_distance_pass),
        fannes_conservative_violations: count(|r| r.fannes_conservative_pass),
        fannes_paper_violations: count(|r| r.fannes_paper_pass),
        all_pass: false,
    };
    let summary = ProtocolSummary {
        all_pass: clean_protocol.pass
            && summary.fidelity_violations == 0
            && summary.trace_distance_violations == 0
            && summary.fannes_conservative_violations == 0,
        ..summary
    };
    if summary.fannes_paper_violations > 0 {
        let _ = writeln!(
            err,
            "note: {} of {} models violate the fannes=paper entropy inequality (logged, not failed)",
            summary.fannes_paper_violations, summary.trials
        );
    }
    let results = ProtocolResults {
        n,
        epsilon: a.eps,
        clean_protocol,
        summary,
        trials,
    };
    RunManifest::new("protocol-check", a, to_json(&results)).write(out)?;
    Ok(())
}

/// Bound plus three standard errors of a frequency estimated from `trials` samples.
pub(crate) fn sampling_slack(bound: f64, trials: usize) -> f64 {
    let p = bound.clamp(0.0, 1.0);
    bound + 3.0 * (p * (1.0 - p) / trials as f64).sqrt() + 1e-6
}

#[derive(Serialize)]
struct TailResults {
    experiment: TailExperimentResult,
    /// exp(-(2^(delta n) - 1)^2 / 2)
    bound_factor1: f64,
    /// 2 exp(-(2^(delta n) - 1)^2 / 2), the form the acceptance check uses.
    bound_factor2: f64,
    /// T exceeding this is the same event as S2 < (1 - delta) n.
    t_threshold: f64,
    /// 2 exp(-a^2 / (2 N^6)) at a = t_threshold.
    t_tail_bound: f64,
    threshold_factor1: f64,
    threshold_factor2: f64,
    within_factor1: bool,
    within_factor2: bool,
    vacuous: bool,
}

fn tail(a: &TailArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let n = a.n as usize;
    if n > 8 {
        return Err(Failure::Usage(format!(
            "tail experiments are capped at n = 8, got {n}"
        )));
    }
    let cfg = TailExperimentConfig {
        n,
        delta: a.delta,
        trials: a.trials as usize,
        seed: a.seed,
    };
    let experiment = tail_experiment(&cfg)?;
    let big_n = (n as f64).exp2();
    let t_threshold = big_n.powi(3) * (big_n.powf(a.delta) - 1.0);
    let bound_factor1 = entropy_tail_bound(n, a.delta);
    let bound_factor2 = entropy_tail_bound_doubled(n, a.delta);
    let threshold_factor1 = sampling_slack(bound_factor1, cfg.trials);
    let threshold_factor2 = sampling_slack(bound_factor2, cfg.trials);
    let results = TailResults {
        within_factor1: experiment.empirical_freq <= threshold_factor1,
        within_factor2: experiment.empirical_freq <= threshold_factor2,
        experiment,
        bound_factor1,
        bound_factor2,
        t_threshold,
        t_tail_bound: t_tail_bound(n, t_threshold),
        threshold_factor1,
        threshold_factor2,
        vacuous: bound_factor2 >= 1.0,
    };
    RunManifest::new("tail", a, to_json(&results)).write(out)?;
    Ok(())
}

pub(crate) const SWEEP_HEADER: [&str; 12] = [
    "n",
    "H_uniform",
    "H",
    "S2",
    "q_exact",
    "q_exact_ent",
    "q_eps_fannes",
    "q_eps_ent_fannes",
    "q_eps_repeated",
    "repetitions",
    "vacuous",
    "seed",
];

fn sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<(), Failure> {
    if a.n_min > a.n_max {
        return Err(Failure::Usage(format!(
            "--n-min {} exceeds --n-max {}",
            a.n_min, a.n_max
        )));
    }
    let cfg = optimizer_config(&a.optimizer, a.seed);
    let mut rows = Vec::new();
    for n in a.n_min..=a.n_max {
        let f = build(a.family, n as usize, a.seed)?;
        let m = sign_matrix(&f);
        let e = evaluate(&m, a.dist, a.eps, a.fannes, &cfg)?;
        let r = &e.report;
        rows.push(vec![
            n.to_string(),
            cell(e.h_uniform),
            cell(r.entropy_bits),
            cell(e.renyi2.s2_bits),
            cell(r.q_exact),
            cell(r.q_exact_ent),
            cell(r.q_eps_fannes),
            cell(r.q_eps_ent_fannes),
            cell(r.q_eps_repeated),
            r.repetitions.to_string(),
            Vacuous::of(r).any().to_string(),
            a.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]);
    }
    write_csv(out, &SWEEP_HEADER, &rows)?;
    Ok(())
}
