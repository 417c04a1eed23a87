//! `hamilton` — dataset generation, solving, training, evaluation, potential
//! extension, and benchmarking for the bounded-potential operator pipeline.
//!
//! Exit codes: 0 success, 1 usage, 2 data/validation, 3 training divergence.

mod sensor;

use clap::{Parser, Subcommand};
use hamilton_core::datafmt::{
    export_csv, read_dataset, write_dataset, CsvKind, DataError, DatasetArrays, DatasetMeta,
};
use hamilton_core::deeponet::{
    self, load_checkpoint, save_checkpoint, DeepONetModel, ModelError, SchedulerConfig,
    TrainConfig, TrainSample,
};
use hamilton_core::dynamics::{
    gl4_solve, hermite_resample, rk4_solve, DynError, HamiltonianSystem, Trajectory, GL4_DT,
    GL4_FP_TOL, GL4_MAX_ITERS,
};
use hamilton_core::metrics::{aggregate, sample_loss, time_trajectory, SampleLoss};
use hamilton_core::potgen::{generate_dataset, GeneratorConfig};
use hamilton_core::rng::child_rng;
use hamilton_core::testpots::{analytic_solution, eval_named, eval_named_deriv, NamedPotential};
use hamilton_core::unbounded::{
    build_cubic_extension, eval_cubic, extended_potential, valid_time, ExtensionSpec,
    UnboundedError,
};
use rayon::prelude::*;
use sensor::SensorPotential;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const USAGE: u8 = 1;
const DATA: u8 = 2;
const DIVERGED: u8 = 3;

struct Failure {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure {
        code,
        msg: msg.into(),
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        fail(DATA, e.to_string())
    }
}

impl From<DynError> for Failure {
    fn from(e: DynError) -> Self {
        fail(DATA, e.to_string())
    }
}

impl From<UnboundedError> for Failure {
    fn from(e: UnboundedError) -> Self {
        fail(DATA, e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let code = match e {
            ModelError::DivergenceDetected { .. } => DIVERGED,
            _ => DATA,
        };
        fail(code, e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "hamilton", version, about = "Hamiltonian trajectory pipeline")]
struct Cli {
    /// RNG seed; falls back to NH_SEED, then 8407
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress the reproducibility line
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate random bounded potentials with ground-truth trajectories
    Gen {
        /// Number of potentials
        #[arg(long)]
        n: usize,
        /// Sensor nodes per potential
        #[arg(long, default_value_t = 100)]
        m: usize,
        /// Time horizon
        #[arg(long = "T", default_value_t = 2.0)]
        t_final: f64,
        /// Output dataset directory
        #[arg(long)]
        out: PathBuf,
        /// Optional train fraction; writes train/ and val/ partitions
        #[arg(long)]
        split: Option<f64>,
    },
    /// Solve one potential and write the trajectory CSV
    Solve {
        /// Named id (sho, double-well, morse, mff, smff) or a potential CSV
        #[arg(long)]
        potential: String,
        /// rk4, gl4, or exact
        #[arg(long, default_value = "gl4")]
        method: String,
        #[arg(long, default_value_t = 100)]
        m: usize,
        #[arg(long = "T", default_value_t = 2.0)]
        t_final: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the operator model on a generated dataset
    Train {
        /// Dataset directory
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 250)]
        epochs: usize,
        /// Initial learning rate
        #[arg(long, default_value_t = deeponet::DEFAULT_INIT_LR)]
        lr: f64,
        /// Infimum learning rate
        #[arg(long = "inf-lr", default_value_t = deeponet::DEFAULT_INF_LR)]
        inf_lr: f64,
        /// Schedule upper bound U
        #[arg(long = "upper-bound", default_value_t = deeponet::DEFAULT_UPPER_BOUND)]
        upper_bound: f64,
        /// Checkpoint output path
        #[arg(long)]
        ckpt: PathBuf,
        /// Loss-history CSV path (default: alongside the checkpoint)
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Evaluate a predictor against dataset ground truth
    Eval {
        #[arg(long)]
        data: PathBuf,
        /// rk4, gl4, truth, or a checkpoint path
        #[arg(long)]
        pred: String,
        /// Per-sample metrics CSV
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Extend a monotone potential past its switch point
    Extend {
        /// free-fall, a named id, or a potential CSV
        #[arg(long)]
        potential: String,
        /// Switch point Q
        #[arg(long = "Q", default_value_t = 0.5)]
        q_switch: f64,
        #[arg(long, default_value_t = 100)]
        m: usize,
        /// Extended-potential CSV path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-trajectory wall-time statistics, batch size 1
    Bench {
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated: rk4, gl4, model
        #[arg(long, default_value = "rk4,gl4")]
        methods: String,
        /// Checkpoint for the model method
        #[arg(long)]
        ckpt: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version through the same path; those are not
            // failures
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(USAGE)
            };
        }
    };
    let seed = cli
        .seed
        .or_else(|| std::env::var("NH_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(8407);
    if !cli.quiet {
        let flags: Vec<String> = std::env::args().skip(1).collect();
        println!(
            "hamilton {} seed={} flags: {}",
            env!("CARGO_PKG_VERSION"),
            seed,
            flags.join(" ")
        );
    }
    match run(cli.cmd, seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Cmd, seed: u64) -> Result<(), Failure> {
    match cmd {
        Cmd::Gen {
            n,
            m,
            t_final,
            out,
            split,
        } => cmd_gen(n, m, t_final, &out, split, seed),
        Cmd::Solve {
            potential,
            method,
            m,
            t_final,
            out,
        } => cmd_solve(&potential, &method, m, t_final, &out),
        Cmd::Train {
            data,
            epochs,
            lr,
            inf_lr,
            upper_bound,
            ckpt,
            history,
        } => cmd_train(&data, epochs, lr, inf_lr, upper_bound, &ckpt, history, seed),
        Cmd::Eval { data, pred, report } => cmd_eval(&data, &pred, report.as_deref()),
        Cmd::Extend {
            potential,
            q_switch,
            m,
            out,
        } => cmd_extend(&potential, q_switch, m, out.as_deref()),
        Cmd::Bench {
            data,
            methods,
            ckpt,
            repeats,
        } => cmd_bench(&data, &methods, ckpt.as_deref(), repeats),
    }
}

fn base_meta(cfg: &GeneratorConfig, n: usize, m: usize, t_final: f64, role: &str) -> DatasetMeta {
    DatasetMeta {
        version: 1,
        n,
        m,
        t_final,
        length: cfg.domain_length,
        v0: cfg.potential_scale,
        n_grf_range: cfg.n_grf_range,
        omega: cfg.omega,
        length_scale_range: cfg.length_scale_range,
        seed: cfg.seed,
        role: role.into(),
    }
}

fn cmd_gen(
    n: usize,
    m: usize,
    t_final: f64,
    out: &Path,
    split: Option<f64>,
    seed: u64,
) -> Result<(), Failure> {
    if n == 0 {
        return Err(fail(USAGE, "--n must be positive"));
    }
    if m < 2 {
        return Err(fail(USAGE, "--m must be at least 2"));
    }
    if let Some(f) = split {
        if !(f > 0.0 && f < 1.0) {
            return Err(fail(USAGE, "--split must lie in (0, 1)"));
        }
    }
    let cfg = GeneratorConfig {
        n_sensors: m,
        seed,
        ..GeneratorConfig::default()
    };
    let potentials =
        generate_dataset(&cfg, n).map_err(|e| fail(DATA, format!("generation failed: {e}")))?;
    let labels: Result<Vec<Trajectory>, DynError> = potentials
        .par_iter()
        .enumerate()
        .map(|(i, pot)| {
            let sys = HamiltonianSystem::new(|q: f64| pot.value_and_slope(q));
            hamilton_core::dynamics::generate_label(&sys, m, t_final, i as u64)
        })
        .collect();
    let labels = labels.map_err(|e| fail(DATA, format!("labeling failed: {e}")))?;

    let t = labels[0].t.clone();
    let collect = |idx: &[usize]| -> DatasetArrays {
        let mut arrays = DatasetArrays {
            t: t.clone(),
            v: Vec::with_capacity(idx.len() * m),
            q: Vec::with_capacity(idx.len() * m),
            p: Vec::with_capacity(idx.len() * m),
        };
        for &i in idx {
            arrays.v.extend_from_slice(&potentials[i].sensor_v);
            arrays.q.extend_from_slice(&labels[i].q);
            arrays.p.extend_from_slice(&labels[i].p);
        }
        arrays
    };

    match split {
        None => {
            let idx: Vec<usize> = (0..n).collect();
            write_dataset(out, &base_meta(&cfg, n, m, t_final, "train"), &collect(&idx))?;
        }
        Some(frac) => {
            let idx = hamilton_core::rng::shuffled_indices(n, seed);
            let n_train = ((n as f64 * frac).round() as usize).clamp(1, n - 1);
            let (train_idx, val_idx) = idx.split_at(n_train);
            write_dataset(
                &out.join("train"),
                &base_meta(&cfg, train_idx.len(), m, t_final, "train"),
                &collect(train_idx),
            )?;
            write_dataset(
                &out.join("val"),
                &base_meta(&cfg, val_idx.len(), m, t_final, "test"),
                &collect(val_idx),
            )?;
        }
    }
    Ok(())
}

/// Named evaluator or Catmull-Rom interpolant of a potential CSV.
enum BasePotential {
    Named(NamedPotential),
    File(SensorPotential),
}

impl BasePotential {
    fn resolve(spec: &str) -> Result<Self, Failure> {
        if Path::new(spec).is_file() {
            let rows = hamilton_core::datafmt::import_csv(Path::new(spec), CsvKind::Potential)?;
            let (q, v): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r[0], r[1])).unzip();
            let pot = SensorPotential::new(q, v)
                .map_err(|e| fail(DATA, format!("bad potential file {spec}: {e}")))?;
            return Ok(BasePotential::File(pot));
        }
        NamedPotential::from_id(spec)
            .map(BasePotential::Named)
            .map_err(|e| fail(USAGE, e.to_string()))
    }

    fn value_and_slope(&self, q: f64) -> (f64, f64) {
        match self {
            BasePotential::Named(p) => (eval_named(p, q), eval_named_deriv(p, q)),
            BasePotential::File(p) => p.value_and_slope(q),
        }
    }
}

fn trajectory_rows(traj: &Trajectory) -> Vec<Vec<f64>> {
    traj.t
        .iter()
        .zip(&traj.q)
        .zip(&traj.p)
        .map(|((&t, &q), &p)| vec![t, q, p])
        .collect()
}

fn solve_by_method<P: hamilton_core::dynamics::Potential>(
    sys: &HamiltonianSystem<P>,
    method: &str,
    m: usize,
    t_final: f64,
) -> Result<Trajectory, Failure> {
    match method {
        "rk4" => Ok(rk4_solve(sys, t_final, m, (0.0, 0.0))?),
        "gl4" => {
            let fine = gl4_solve(sys, t_final, GL4_DT, GL4_FP_TOL, GL4_MAX_ITERS, (0.0, 0.0))?;
            Ok(hermite_resample(&fine, m, t_final))
        }
        other => Err(fail(USAGE, format!("unknown method {other:?}"))),
    }
}

fn cmd_solve(
    potential: &str,
    method: &str,
    m: usize,
    t_final: f64,
    out: &Path,
) -> Result<(), Failure> {
    let base = BasePotential::resolve(potential)?;
    let traj = if method == "exact" {
        let named = match &base {
            BasePotential::Named(p) => p,
            BasePotential::File(_) => {
                return Err(fail(USAGE, "--method exact needs a named potential"))
            }
        };
        let mut traj = Trajectory {
            t: Vec::new(),
            q: Vec::new(),
            p: Vec::new(),
            dq: Vec::new(),
            dp: Vec::new(),
        };
        for j in 0..m {
            let t = j as f64 * t_final / (m - 1) as f64;
            let (q, p) = analytic_solution(named, t).map_err(|e| fail(USAGE, e.to_string()))?;
            traj.t.push(t);
            traj.q.push(q);
            traj.p.push(p);
            traj.dq.push(p);
            traj.dp.push(-eval_named_deriv(named, q));
        }
        traj
    } else {
        let sys = HamiltonianSystem::new(|q: f64| base.value_and_slope(q));
        solve_by_method(&sys, method, m, t_final)?
    };
    export_csv(out, CsvKind::Trajectory, &trajectory_rows(&traj))?;
    Ok(())
}

fn dataset_samples(arrays: &DatasetArrays, n: usize, m: usize) -> Vec<TrainSample<'_>> {
    (0..n)
        .map(|i| TrainSample {
            v: &arrays.v[i * m..(i + 1) * m],
            q: &arrays.q[i * m..(i + 1) * m],
            p: &arrays.p[i * m..(i + 1) * m],
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    data: &Path,
    epochs: usize,
    lr: f64,
    inf_lr: f64,
    upper_bound: f64,
    ckpt: &Path,
    history: Option<PathBuf>,
    seed: u64,
) -> Result<(), Failure> {
    if epochs == 0 {
        return Err(fail(USAGE, "--epochs must be positive"));
    }
    let (meta, arrays) = read_dataset(data)?;
    let samples = dataset_samples(&arrays, meta.n, meta.m);

    // 80/20 split with a seeded shuffle
    let idx = hamilton_core::rng::shuffled_indices(samples.len(), seed);
    let n_train = ((samples.len() as f64 * 0.8).round() as usize).clamp(1, samples.len() - 1);
    let train_set: Vec<TrainSample<'_>> = idx[..n_train].iter().map(|&i| samples[i].clone()).collect();
    let val_set: Vec<TrainSample<'_>> = idx[n_train..].iter().map(|&i| samples[i].clone()).collect();

    println!("init_lr = {lr:e}  inf_lr = {inf_lr:e}  upper_bound = {upper_bound}");
    let mut model = DeepONetModel::standard(meta.m, &mut child_rng(seed, 0));
    let cfg = TrainConfig {
        epochs,
        scheduler: SchedulerConfig {
            init_lr: lr,
            inf_lr,
            upper_bound,
        },
        seed,
        ..TrainConfig::default()
    };
    let records = deeponet::train(&mut model, &train_set, &val_set, &arrays.t, &cfg)?;
    save_checkpoint(&model, ckpt)?;

    let history_path = history.unwrap_or_else(|| ckpt.with_extension("history.csv"));
    let rows: Vec<Vec<f64>> = records
        .iter()
        .map(|r| vec![r.epoch as f64, r.train_loss, r.val_loss, r.lr])
        .collect();
    export_csv(&history_path, CsvKind::LossHistory, &rows)?;
    let last = records.last().unwrap();
    println!(
        "epochs={} final train_loss={:e} val_loss={:e}",
        records.len(),
        last.train_loss,
        last.val_loss
    );
    Ok(())
}

fn predict(
    pred: &str,
    model: Option<&DeepONetModel>,
    sample: &TrainSample<'_>,
    t_grid: &[f64],
    t_final: f64,
    m: usize,
) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    match pred {
        "truth" => Ok((sample.q.to_vec(), sample.p.to_vec())),
        "rk4" | "gl4" => {
            let pot = SensorPotential::uniform(sample.v.to_vec())
                .map_err(|e| fail(DATA, e.to_string()))?;
            let sys = HamiltonianSystem::new(|q: f64| pot.value_and_slope(q));
            let traj = solve_by_method(&sys, pred, m, t_final)?;
            Ok((traj.q, traj.p))
        }
        _ => {
            let model = model.expect("checkpoint loaded for model predictions");
            Ok(model.forward(sample.v, t_grid)?)
        }
    }
}

fn print_aggregate_table(losses: &[SampleLoss]) {
    println!("metric,mean,std,median,iqr");
    let columns: [(&str, Box<dyn Fn(&SampleLoss) -> f64>); 4] = [
        ("l_q", Box::new(|l| l.l_q)),
        ("l_p", Box::new(|l| l.l_p)),
        ("l_tot", Box::new(|l| l.l_tot)),
        ("time_s", Box::new(|l| l.time_seconds)),
    ];
    for (name, get) in &columns {
        let values: Vec<f64> = losses.iter().map(|l| get(l)).collect();
        let s = aggregate(&values).expect("non-empty metrics");
        println!("{name},{:e},{:e},{:e},{:e}", s.mean, s.std, s.median, s.iqr);
    }
}

fn cmd_eval(data: &Path, pred: &str, report: Option<&Path>) -> Result<(), Failure> {
    let (meta, arrays) = read_dataset(data)?;
    let samples = dataset_samples(&arrays, meta.n, meta.m);
    let model = if matches!(pred, "truth" | "rk4" | "gl4") {
        None
    } else {
        let model = load_checkpoint(Path::new(pred))?;
        if model.m != meta.m {
            return Err(fail(
                DATA,
                format!(
                    "grid mismatch: checkpoint expects m = {}, dataset has m = {}",
                    model.m, meta.m
                ),
            ));
        }
        Some(model)
    };

    let mut losses = Vec::with_capacity(samples.len());
    for sample in &samples {
        let (out, secs) = time_trajectory(|| {
            predict(pred, model.as_ref(), sample, &arrays.t, meta.t_final, meta.m)
        });
        let (q_pred, p_pred) = out?;
        losses.push(
            sample_loss(sample.q, sample.p, &q_pred, &p_pred, secs)
                .map_err(|e| fail(DATA, e.to_string()))?,
        );
    }

    if let Some(path) = report {
        let rows: Vec<Vec<f64>> = losses
            .iter()
            .enumerate()
            .map(|(i, l)| vec![i as f64, l.l_q, l.l_p, l.l_tot, l.time_seconds])
            .collect();
        export_csv(path, CsvKind::Metrics, &rows)?;
    }
    print_aggregate_table(&losses);
    Ok(())
}

fn cmd_extend(potential: &str, q_switch: f64, m: usize, out: Option<&Path>) -> Result<(), Failure> {
    let base: Box<dyn Fn(f64) -> (f64, f64)> = if potential == "free-fall" {
        Box::new(|q: f64| (-4.0 * (q - 0.5), -4.0))
    } else {
        let resolved = BasePotential::resolve(potential)?;
        Box::new(move |q: f64| resolved.value_and_slope(q))
    };
    let (v0, _) = base(0.0);
    let (v_q, dv_q) = base(q_switch);
    // curvature at the switch by a central difference of the slope
    let h = 1e-5;
    let ddv_q = (base(q_switch + h).1 - base(q_switch - h).1) / (2.0 * h);

    let coeffs = build_cubic_extension(q_switch, v0, v_q, dv_q, ddv_q)?;
    let spec = ExtensionSpec {
        q_switch,
        v0,
        coeffs,
    };
    let t_valid = valid_time(|q| base(q), v0, q_switch)?;
    println!("T_valid = {t_valid}");
    println!(
        "P(q) = {:+e} q^3 {:+e} q^2 {:+e} q {:+e}",
        coeffs[0], coeffs[1], coeffs[2], coeffs[3]
    );
    if let Some(path) = out {
        let values = extended_potential(&spec, |q| base(q).0, m);
        let rows: Vec<Vec<f64>> = values
            .iter()
            .enumerate()
            .map(|(j, &v)| vec![j as f64 / (m - 1) as f64, v])
            .collect();
        export_csv(path, CsvKind::Potential, &rows)?;
        // composite check: the cubic agrees with what we wrote past Q
        debug_assert!((eval_cubic(&coeffs, 1.0) - v0).abs() < 1e-8);
    }
    Ok(())
}

fn cmd_bench(
    data: &Path,
    methods: &str,
    ckpt: Option<&Path>,
    repeats: usize,
) -> Result<(), Failure> {
    if repeats == 0 {
        return Err(fail(USAGE, "--repeats must be positive"));
    }
    let (meta, arrays) = read_dataset(data)?;
    let samples = dataset_samples(&arrays, meta.n, meta.m);
    println!("method,count,mean,std,median,iqr");
    for method in methods.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let model = if method == "model" {
            let path = ckpt.ok_or_else(|| fail(USAGE, "method model needs --ckpt"))?;
            let model = load_checkpoint(path)?;
            if model.m != meta.m {
                return Err(fail(DATA, "grid mismatch between checkpoint and dataset"));
            }
            Some(model)
        } else if matches!(method, "rk4" | "gl4") {
            None
        } else {
            return Err(fail(USAGE, format!("unknown method {method:?}")));
        };
        let mut timings = Vec::with_capacity(samples.len() * repeats);
        for sample in &samples {
            for _ in 0..repeats {
                let (out, secs) = time_trajectory(|| {
                    predict(method, model.as_ref(), sample, &arrays.t, meta.t_final, meta.m)
                });
                out?;
                timings.push(secs);
            }
        }
        let s = aggregate(&timings).expect("non-empty timings");
        println!(
            "{method},{},{:e},{:e},{:e},{:e}",
            timings.len(),
            s.mean,
            s.std,
            s.median,
            s.iqr
        );
    }
    Ok(())
}
