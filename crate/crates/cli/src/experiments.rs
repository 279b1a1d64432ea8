//! Seed-matched comparison runs of Euclidean vs Fisher–Rao regularization.
//!
//! Every `(spread, weight, replicate)` cell derives one data seed and runs
//! the identical task under both penalty arms, so the two arms consume the
//! same sample stream (verified through the logged minibatch hashes). The
//! efficiency proxy `η̂ = net_geodesic / path_length` is the quasi-static
//! ratio of the trajectory — a joule-free stand-in for thermodynamic
//! efficiency, labeled as a proxy in every artifact.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use thermoreg_core::gaussian::GaussianChart;
use thermoreg_core::regularization::{PenaltyKind, PenaltySpec};
use thermoreg_core::sampling::{derive_seed, rng_from_seed};
use thermoreg_core::trajectory::{run_toy_learner, trajectory_csv, DataGenerator, ToyTask};
use thermoreg_core::vonmises::VonMisesChart;
use thermoreg_core::{Belief, GaussianBelief, ToleranceConfig, VonMisesBelief};

use crate::config::{ChartName, ExperimentConfig, ManifoldKind};
use crate::error::{CliError, Result};

/// `(run_id, csv)` trajectory dump of one run.
type TrajectoryDump = (String, String);

/// Stream index offset for the held-out evaluation data.
const HELDOUT_STREAM: u64 = 0x48454C44; // "HELD"

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyArm {
    Euclidean,
    FisherRao,
}

impl fmt::Display for PenaltyArm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenaltyArm::Euclidean => "euclidean",
            PenaltyArm::FisherRao => "fisher-rao",
        })
    }
}

/// One learner run's results, one row of `records.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub prediction: u8,
    pub arm: PenaltyArm,
    pub spread: f64,
    pub weight: f64,
    pub replicate: u32,
    pub seed: u64,
    /// Quasi-static ratio of the trajectory (efficiency proxy).
    pub eta_hat: f64,
    pub final_kl: f64,
    pub heldout_nll: f64,
    pub path_length: f64,
    pub net_geodesic: f64,
    pub clamp_events: u64,
    /// First three minibatch hashes, hex, dash-joined.
    pub data_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub arm: PenaltyArm,
    pub n: usize,
    pub mean_eta_hat: f64,
    pub std_eta_hat: f64,
    pub mean_final_kl: f64,
    pub mean_heldout_nll: f64,
    pub mean_path_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadGap {
    pub spread: f64,
    /// mean η̂(Fisher–Rao) − mean η̂(Euclidean) at this spread.
    pub gap_eta_hat: f64,
}

/// Everything an experiment produces. `summary.json` carries all fields
/// except the per-run records and trajectories, which go to CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub prediction: u8,
    pub library_version: String,
    pub config: ExperimentConfig,
    pub aggregates: Vec<ArmSummary>,
    pub per_spread_gap: Vec<SpreadGap>,
    pub prediction1_pass: Option<bool>,
    pub prediction2_trend: Option<f64>,
    #[serde(skip)]
    pub records: Vec<RunRecord>,
    /// `(run_id, csv)` trajectory dumps.
    #[serde(skip)]
    pub trajectories: Vec<(String, String)>,
}

/// The serializable half of a report, as stored in `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub prediction: u8,
    pub library_version: String,
    pub config: ExperimentConfig,
    pub n_records: usize,
    pub aggregates: Vec<ArmSummary>,
    pub per_spread_gap: Vec<SpreadGap>,
    pub prediction1_pass: Option<bool>,
    pub prediction2_trend: Option<f64>,
}

impl ComparisonReport {
    pub fn summary(&self) -> Summary {
        Summary {
            prediction: self.prediction,
            library_version: self.library_version.clone(),
            config: self.config.clone(),
            n_records: self.records.len(),
            aggregates: self.aggregates.clone(),
            per_spread_gap: self.per_spread_gap.clone(),
            prediction1_pass: self.prediction1_pass,
            prediction2_trend: self.prediction2_trend,
        }
    }
}

/// Prediction 1: matched runs at fixed spread; passes when the Fisher–Rao
/// arm's mean η̂ is no worse than the Euclidean arm's minus two pooled
/// standard deviations.
pub fn run_prediction1(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    let (records, trajectories) = run_all(cfg)?;
    let analysis = analyze(1, &records);
    Ok(ComparisonReport {
        prediction: 1,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        aggregates: analysis.aggregates,
        per_spread_gap: analysis.per_spread_gap,
        prediction1_pass: analysis.prediction1_pass,
        prediction2_trend: None,
        records,
        trajectories,
    })
}

/// Prediction 2: sweeps the precision spread and reports the Spearman
/// rank correlation between spread and the η̂ gap.
pub fn run_prediction2(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    if cfg.tau_spread.len() < 3 {
        return Err(CliError::Config(
            "prediction 2 needs at least 3 tau_spread values".into(),
        ));
    }
    let (records, trajectories) = run_all(cfg)?;
    let analysis = analyze(2, &records);
    Ok(ComparisonReport {
        prediction: 2,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        aggregates: analysis.aggregates,
        per_spread_gap: analysis.per_spread_gap,
        prediction1_pass: None,
        prediction2_trend: analysis.prediction2_trend,
        records,
        trajectories,
    })
}

/// Dispatches on `cfg.prediction`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    match cfg.prediction {
        1 => run_prediction1(cfg),
        2 => run_prediction2(cfg),
        other => Err(CliError::Config(format!("unknown prediction {other}"))),
    }
}

// ---------------------------------------------------------------------------
// Run execution

#[derive(Debug, Clone, Copy)]
struct RunSpec {
    spread_idx: usize,
    weight_idx: usize,
    replicate: u32,
    arm: PenaltyArm,
}

fn run_all(cfg: &ExperimentConfig) -> Result<(Vec<RunRecord>, Vec<TrajectoryDump>)> {
    let mut specs = Vec::new();
    for spread_idx in 0..cfg.tau_spread.len() {
        for weight_idx in 0..cfg.penalty_weights.len() {
            for replicate in 0..cfg.replicates {
                for arm in [PenaltyArm::Euclidean, PenaltyArm::FisherRao] {
                    specs.push(RunSpec {
                        spread_idx,
                        weight_idx,
                        replicate,
                        arm,
                    });
                }
            }
        }
    }
    let outputs: Result<Vec<(RunRecord, TrajectoryDump)>> = specs
        .par_iter()
        .map(|spec| execute_one(cfg, spec))
        .collect();
    let outputs = outputs?;
    let (records, trajectories) = outputs.into_iter().unzip();
    Ok((records, trajectories))
}

fn execute_one(cfg: &ExperimentConfig, spec: &RunSpec) -> Result<(RunRecord, TrajectoryDump)> {
    let spread = cfg.tau_spread[spec.spread_idx];
    let weight = cfg.penalty_weights[spec.weight_idx];
    // The data seed is arm-independent: both arms of a cell see the same
    // sample stream.
    let stream = (spec.spread_idx as u64) << 40
        | (spec.weight_idx as u64) << 24
        | spec.replicate as u64;
    let data_seed = derive_seed(cfg.seed_base, stream);
    let run_id = format!(
        "p{}-s{}-w{}-r{:02}-{}",
        cfg.prediction, spread, weight, spec.replicate, spec.arm
    );

    match cfg.task_family.manifold {
        ManifoldKind::Gaussian => {
            let family = &cfg.task_family;
            let tau0 = 1.0 / spread.sqrt();
            let tau_star = spread.sqrt();
            let initial = GaussianBelief::new(family.initial_mu, tau0)?;
            let reference = GaussianBelief::new(family.reference_mu, tau_star)?;
            let generator = GaussianBelief::new(family.data_mu, tau_star)?;
            let kind = match spec.arm {
                PenaltyArm::FisherRao => PenaltyKind::FisherRao,
                PenaltyArm::Euclidean => PenaltyKind::Euclidean(match family.euclidean_chart {
                    ChartName::MuTau => GaussianChart::MuTau,
                    ChartName::MuSigma => GaussianChart::MuSigma,
                }),
            };
            let penalty = PenaltySpec::new(kind, reference, weight)?;
            run_typed(cfg, spec, spread, weight, data_seed, run_id, initial, reference, generator, penalty)
        }
        ManifoldKind::Vonmises => {
            let family = &cfg.task_family;
            let kappa0 = (1.0 / spread.sqrt()).max(thermoreg_core::vonmises::KAPPA_MIN);
            let kappa_star = spread.sqrt();
            let initial = VonMisesBelief::new(family.initial_mu, kappa0)?;
            let reference = VonMisesBelief::new(family.reference_mu, kappa_star)?;
            let generator = VonMisesBelief::new(family.data_mu, kappa_star)?;
            let kind = match spec.arm {
                PenaltyArm::FisherRao => PenaltyKind::FisherRao,
                PenaltyArm::Euclidean => PenaltyKind::Euclidean(VonMisesChart),
            };
            let penalty = PenaltySpec::new(kind, reference, weight)?;
            run_typed(cfg, spec, spread, weight, data_seed, run_id, initial, reference, generator, penalty)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_typed<B: Belief>(
    cfg: &ExperimentConfig,
    spec: &RunSpec,
    spread: f64,
    weight: f64,
    data_seed: u64,
    run_id: String,
    initial: B,
    reference: B,
    generator: B,
    penalty: PenaltySpec<B>,
) -> Result<(RunRecord, TrajectoryDump)> {
    let tol = ToleranceConfig::default();
    let task = ToyTask {
        data: DataGenerator {
            distribution: generator,
            sample_count: cfg.task_family.sample_count,
            seed: data_seed,
        },
        initial_belief: initial,
        reference_belief: reference,
        penalty,
        lr: cfg.task_family.lr,
        steps: cfg.task_family.steps,
    };
    let run = run_toy_learner(&task, &tol).map_err(|source| CliError::RunDiverged {
        run_id: run_id.clone(),
        source,
    })?;

    // Held-out generalization estimate at the final belief.
    let final_belief = *run.path.points().last().expect("path never empty");
    let mut heldout_rng = rng_from_seed(derive_seed(data_seed, HELDOUT_STREAM));
    let n_heldout = cfg.task_family.heldout_samples.max(1);
    let mut nll_sum = 0.0;
    for _ in 0..n_heldout {
        nll_sum += final_belief.nll(generator.draw(&mut heldout_rng));
    }

    let data_hash = run
        .minibatch_hashes
        .iter()
        .map(|h| format!("{h:016x}"))
        .collect::<Vec<_>>()
        .join("-");
    let record = RunRecord {
        run_id: run_id.clone(),
        prediction: cfg.prediction,
        arm: spec.arm,
        spread,
        weight,
        replicate: spec.replicate,
        seed: data_seed,
        eta_hat: run.ledger.quasi_static_ratio,
        final_kl: run.final_kl_to_target,
        heldout_nll: nll_sum / n_heldout as f64,
        path_length: run.ledger.path_length_fr,
        net_geodesic: run.ledger.net_geodesic_fr,
        clamp_events: run.clamp_events,
        data_hash,
    };
    let csv = trajectory_csv(&run);
    Ok((record, (run_id, csv)))
}

// ---------------------------------------------------------------------------
// Statistics

pub struct Analysis {
    pub aggregates: Vec<ArmSummary>,
    pub per_spread_gap: Vec<SpreadGap>,
    pub prediction1_pass: Option<bool>,
    pub prediction2_trend: Option<f64>,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn arm_values<F: Fn(&RunRecord) -> f64>(records: &[RunRecord], arm: PenaltyArm, f: F) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.arm == arm)
        .map(f)
        .collect()
}

/// Recomputes every reported statistic from the records alone; the
/// emitted aggregates are exactly this function's output.
pub fn analyze(prediction: u8, records: &[RunRecord]) -> Analysis {
    let mut aggregates = Vec::new();
    for arm in [PenaltyArm::Euclidean, PenaltyArm::FisherRao] {
        let eta = arm_values(records, arm, |r| r.eta_hat);
        aggregates.push(ArmSummary {
            arm,
            n: eta.len(),
            mean_eta_hat: mean(&eta),
            std_eta_hat: sample_std(&eta),
            mean_final_kl: mean(&arm_values(records, arm, |r| r.final_kl)),
            mean_heldout_nll: mean(&arm_values(records, arm, |r| r.heldout_nll)),
            mean_path_length: mean(&arm_values(records, arm, |r| r.path_length)),
        });
    }

    // Per-spread η̂ gap, in first-appearance order of the spreads.
    let mut spreads: Vec<f64> = Vec::new();
    for r in records {
        if !spreads.contains(&r.spread) {
            spreads.push(r.spread);
        }
    }
    let per_spread_gap: Vec<SpreadGap> = spreads
        .iter()
        .map(|&s| {
            let fr: Vec<f64> = records
                .iter()
                .filter(|r| r.arm == PenaltyArm::FisherRao && r.spread == s)
                .map(|r| r.eta_hat)
                .collect();
            let eu: Vec<f64> = records
                .iter()
                .filter(|r| r.arm == PenaltyArm::Euclidean && r.spread == s)
                .map(|r| r.eta_hat)
                .collect();
            SpreadGap {
                spread: s,
                gap_eta_hat: mean(&fr) - mean(&eu),
            }
        })
        .collect();

    let prediction1_pass = if prediction == 1 {
        let eu = arm_values(records, PenaltyArm::Euclidean, |r| r.eta_hat);
        let fr = arm_values(records, PenaltyArm::FisherRao, |r| r.eta_hat);
        let pooled = ((sample_std(&eu).powi(2) + sample_std(&fr).powi(2)) / 2.0).sqrt();
        Some(mean(&fr) >= mean(&eu) - 2.0 * pooled)
    } else {
        None
    };
    let prediction2_trend = if prediction == 2 {
        let xs: Vec<f64> = per_spread_gap.iter().map(|g| g.spread).collect();
        let ys: Vec<f64> = per_spread_gap.iter().map(|g| g.gap_eta_hat).collect();
        Some(spearman(&xs, &ys))
    } else {
        None
    };

    Analysis {
        aggregates,
        per_spread_gap,
        prediction1_pass,
        prediction2_trend,
    }
}

/// Spearman rank correlation with average ranks for ties; 0 when either
/// variable has no rank variation.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return 0.0;
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let mx = mean(&rx);
    let my = mean(&ry);
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for i in 0..rx.len() {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite statistics"));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // average rank for the tie group [i, j]
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Report emission

const RECORDS_HEADER: &str = "run_id,prediction,arm,spread,weight,replicate,seed,eta_hat,final_kl,heldout_nll,path_length,net_geodesic,clamp_events,data_hash";

/// Renders `records.csv` deterministically.
pub fn records_csv(records: &[RunRecord]) -> String {
    let mut out = String::with_capacity(128 * (records.len() + 1));
    out.push_str(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.run_id,
            r.prediction,
            r.arm,
            r.spread,
            r.weight,
            r.replicate,
            r.seed,
            r.eta_hat,
            r.final_kl,
            r.heldout_nll,
            r.path_length,
            r.net_geodesic,
            r.clamp_events,
            r.data_hash
        ));
    }
    out
}

/// Writes `records.csv`, `summary.json` and per-run trajectory CSVs under
/// `dir`, creating it as needed. Returns the written paths.
pub fn emit_report(report: &ComparisonReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();

    let records_path = dir.join("records.csv");
    std::fs::write(&records_path, records_csv(&report.records))
        .map_err(|e| CliError::io(&records_path, e))?;
    written.push(records_path);

    let summary_path = dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(&report.summary())
        .map_err(|e| CliError::Config(e.to_string()))?;
    json.push('\n');
    std::fs::write(&summary_path, json).map_err(|e| CliError::io(&summary_path, e))?;
    written.push(summary_path);

    let traj_dir = dir.join("trajectories");
    std::fs::create_dir_all(&traj_dir).map_err(|e| CliError::io(&traj_dir, e))?;
    for (run_id, csv) in &report.trajectories {
        let path = traj_dir.join(format!("run_{run_id}.csv"));
        std::fs::write(&path, csv).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
