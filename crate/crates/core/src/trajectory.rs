//! Belief-trajectory bookkeeping and the seeded toy learners the
//! experiments are built on.
//!
//! The central quantity is the discretized Fisher–Rao path length
//! `Σ d_F(p_i, p_{i+1})`, an estimator of the information a learner erased
//! while moving through belief space. Geodesic minimality makes the net
//! endpoint distance a lower bound, and their ratio — the quasi-static
//! ratio — measures how far a trajectory is from the reversible ideal.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::manifold::Belief;
use crate::numerics::ToleranceConfig;
use crate::regularization::{
    natural_gradient_step_detailed, penalty_gradient_native, penalty_value, PenaltySpec,
};
use crate::sampling::{hash_f64_slice, rng_from_seed};

/// Fixed minibatch size of the toy learners.
pub const MINIBATCH_SIZE: usize = 16;

/// Clamp-event budget; exceeding it classifies the run as divergent.
pub const MAX_CLAMP_EVENTS: u64 = 1_000_000;

/// An ordered sequence of beliefs on one manifold, with optional strictly
/// increasing timestamps. The manifold is part of the type, so paths can
/// never mix Gaussian and von Mises points.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefPath<B: Belief> {
    points: Vec<B>,
    timestamps: Option<Vec<f64>>,
}

impl<B: Belief> BeliefPath<B> {
    pub fn new(points: Vec<B>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::PathTooShort { needed: 1, got: 0 });
        }
        Ok(Self {
            points,
            timestamps: None,
        })
    }

    pub fn with_timestamps(points: Vec<B>, timestamps: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::PathTooShort { needed: 1, got: 0 });
        }
        if timestamps.len() != points.len() {
            return Err(Error::Domain("one timestamp per path point required"));
        }
        if timestamps.windows(2).any(|w| w[1] <= w[0] || w[1].is_nan() || w[0].is_nan()) {
            return Err(Error::Domain("timestamps must be strictly increasing"));
        }
        Ok(Self {
            points,
            timestamps: Some(timestamps),
        })
    }

    pub fn points(&self) -> &[B] {
        &self.points
    }

    pub fn timestamps(&self) -> Option<&[f64]> {
        self.timestamps.as_deref()
    }
}

/// Information-erasure accounting for one trajectory.
///
/// `path_length_fr >= net_geodesic_fr` always (geodesic minimality), so
/// `quasi_static_ratio = net/path` lies in `(0, 1]`, reaching 1 exactly on
/// geodesics. Both KL estimators are reported side by side; neither is
/// privileged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationLedger {
    pub path_length_fr: f64,
    pub net_geodesic_fr: f64,
    /// KL(last ‖ first) in nats.
    pub net_kl_nats: f64,
    /// Σ KL(p_{i+1} ‖ p_i) in nats.
    pub step_kl_sum_nats: f64,
    pub quasi_static_ratio: f64,
}

/// Sum of consecutive Fisher–Rao distances along the path.
pub fn path_length<B: Belief>(path: &BeliefPath<B>, cfg: &ToleranceConfig) -> Result<f64> {
    let pts = path.points();
    if pts.len() < 2 {
        return Err(Error::PathTooShort {
            needed: 2,
            got: pts.len(),
        });
    }
    let mut total = 0.0;
    for pair in pts.windows(2) {
        total += pair[0].fisher_rao_distance(&pair[1], cfg)?;
    }
    Ok(total)
}

/// Builds the full dissipation ledger of a path.
pub fn dissipation_ledger<B: Belief>(
    path: &BeliefPath<B>,
    cfg: &ToleranceConfig,
) -> Result<DissipationLedger> {
    let pts = path.points();
    if pts.len() < 2 {
        return Err(Error::PathTooShort {
            needed: 2,
            got: pts.len(),
        });
    }
    let length = path_length(path, cfg)?;
    let first = &pts[0];
    let last = &pts[pts.len() - 1];
    let net_geodesic = first.fisher_rao_distance(last, cfg)?;
    let mut step_kl_sum = 0.0;
    for pair in pts.windows(2) {
        step_kl_sum += pair[1].kl_divergence(&pair[0]);
    }
    let ratio = if length > 0.0 {
        net_geodesic / length
    } else {
        1.0
    };
    Ok(DissipationLedger {
        path_length_fr: length,
        net_geodesic_fr: net_geodesic,
        net_kl_nats: last.kl_divergence(first),
        step_kl_sum_nats: step_kl_sum,
        quasi_static_ratio: ratio,
    })
}

/// Seeded data source for a toy task: samples are drawn from
/// `distribution`, either as a fresh stream (`sample_count: None`) or from
/// a pre-drawn finite pool that minibatches are resampled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataGenerator<B: Belief> {
    pub distribution: B,
    pub sample_count: Option<usize>,
    pub seed: u64,
}

/// A sequential estimation task: start at `initial_belief`, descend the
/// penalized NLL by natural-gradient steps, and report the trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyTask<B: Belief> {
    pub data: DataGenerator<B>,
    pub initial_belief: B,
    /// Target for the final KL report; usually equals `penalty.reference`.
    pub reference_belief: B,
    pub penalty: PenaltySpec<B>,
    pub lr: f64,
    pub steps: usize,
}

/// Per-step log line of a learner run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// Native coordinates after the step.
    pub coords: [f64; 2],
    /// Penalty value at the post-step belief.
    pub penalty: f64,
    /// Mean NLL of the step's minibatch at the pre-step belief.
    pub nll: f64,
    /// KL(post ‖ pre) of the step in nats.
    pub step_kl_nats: f64,
}

/// Everything a learner run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerRun<B: Belief> {
    pub path: BeliefPath<B>,
    pub ledger: DissipationLedger,
    /// KL(final ‖ reference_belief) in nats.
    pub final_kl_to_target: f64,
    pub clamp_events: u64,
    /// FNV-1a hashes of the first three minibatches, for verifying that
    /// seed-matched runs consumed identical data.
    pub minibatch_hashes: Vec<u64>,
    pub records: Vec<StepRecord>,
}

/// Runs the task: every step draws a minibatch, adds the penalty gradient
/// to the NLL gradient and applies one natural-gradient step, recording
/// the belief after each step. Bit-for-bit deterministic under a fixed
/// seed.
///
/// Errors with [`Error::Diverged`] when chart clamping exceeds
/// [`MAX_CLAMP_EVENTS`].
pub fn run_toy_learner<B: Belief>(
    task: &ToyTask<B>,
    cfg: &ToleranceConfig,
) -> Result<LearnerRun<B>> {
    if !(task.lr > 0.0 && task.lr.is_finite()) {
        return Err(Error::Domain("learning rate must be positive and finite"));
    }
    let mut rng = rng_from_seed(task.data.seed);
    let pool: Option<Vec<f64>> = task.data.sample_count.map(|n| {
        (0..n.max(1))
            .map(|_| task.data.distribution.draw(&mut rng))
            .collect()
    });

    let mut belief = task.initial_belief;
    let mut points = Vec::with_capacity(task.steps + 1);
    points.push(belief);
    let mut records = Vec::with_capacity(task.steps);
    let mut hashes = Vec::with_capacity(3);
    let mut clamp_events = 0u64;
    let mut batch = [0.0f64; MINIBATCH_SIZE];

    for step in 1..=task.steps {
        match &pool {
            Some(data) => {
                for slot in batch.iter_mut() {
                    let idx = (rand_core::RngCore::next_u64(&mut rng) % data.len() as u64) as usize;
                    *slot = data[idx];
                }
            }
            None => {
                for slot in batch.iter_mut() {
                    *slot = task.data.distribution.draw(&mut rng);
                }
            }
        }
        if hashes.len() < 3 {
            hashes.push(hash_f64_slice(&batch));
        }

        let nll = batch.iter().map(|&x| belief.nll(x)).sum::<f64>() / MINIBATCH_SIZE as f64;
        let nll_grad = belief.batch_nll_grad(&batch);
        let pen_grad = penalty_gradient_native(&task.penalty, &belief, cfg)?;
        let grad = [nll_grad[0] + pen_grad[0], nll_grad[1] + pen_grad[1]];

        let (next, clamped) = natural_gradient_step_detailed(&belief, grad, task.lr)?;
        if clamped {
            clamp_events += 1;
            if clamp_events > MAX_CLAMP_EVENTS {
                return Err(Error::Diverged { clamp_events });
            }
        }
        let step_kl = next.kl_divergence(&belief);
        belief = next;
        points.push(belief);
        records.push(StepRecord {
            step,
            coords: belief.coords(),
            penalty: penalty_value(&task.penalty, &belief, cfg)?,
            nll,
            step_kl_nats: step_kl,
        });
    }

    let path = BeliefPath::new(points)?;
    let ledger = if task.steps == 0 {
        DissipationLedger {
            path_length_fr: 0.0,
            net_geodesic_fr: 0.0,
            net_kl_nats: 0.0,
            step_kl_sum_nats: 0.0,
            quasi_static_ratio: 1.0,
        }
    } else {
        dissipation_ledger(&path, cfg)?
    };
    Ok(LearnerRun {
        final_kl_to_target: belief.kl_divergence(&task.reference_belief),
        path,
        ledger,
        clamp_events,
        minibatch_hashes: hashes,
        records,
    })
}

/// Renders a run as the trajectory CSV: header
/// `step,<coord1>,<coord2>,penalty,nll,step_kl_nats` with the manifold's
/// coordinate names, one row per step. `f64` values use the shortest
/// round-trip decimal form, which is locale-independent.
pub fn trajectory_csv<B: Belief>(run: &LearnerRun<B>) -> String {
    let names = B::coord_names();
    let mut out = String::with_capacity(64 * (run.records.len() + 1));
    out.push_str(&format!(
        "step,{},{},penalty,nll,step_kl_nats\n",
        names[0], names[1]
    ));
    for r in &run.records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.step, r.coords[0], r.coords[1], r.penalty, r.nll, r.step_kl_nats
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianBelief;
    use crate::regularization::PenaltyKind;
    use crate::vonmises::VonMisesBelief;
    use approx::assert_abs_diff_eq;
    use std::vec;

    fn g(mu: f64, tau: f64) -> GaussianBelief {
        GaussianBelief::new(mu, tau).unwrap()
    }

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn gaussian_task(
        seed: u64,
        weight: f64,
        steps: usize,
        lr: f64,
    ) -> ToyTask<GaussianBelief> {
        let reference = g(1.0, 4.0);
        ToyTask {
            data: DataGenerator {
                distribution: g(1.0, 4.0),
                sample_count: None,
                seed,
            },
            initial_belief: g(-1.0, 0.25),
            reference_belief: reference,
            penalty: PenaltySpec::fisher_rao(reference, weight).unwrap(),
            lr,
            steps,
        }
    }

    #[test]
    fn path_construction_rules() {
        assert!(BeliefPath::<GaussianBelief>::new(vec![]).is_err());
        let p = vec![g(0.0, 1.0), g(1.0, 1.0)];
        assert!(BeliefPath::with_timestamps(p.clone(), vec![0.0, 1.0]).is_ok());
        assert!(BeliefPath::with_timestamps(p.clone(), vec![1.0, 0.5]).is_err());
        assert!(BeliefPath::with_timestamps(p, vec![0.0]).is_err());
    }

    #[test]
    fn constant_path_has_zero_length() {
        let path = BeliefPath::new(vec![g(0.5, 2.0); 8]).unwrap();
        assert_eq!(path_length(&path, &cfg()).unwrap(), 0.0);
        let single = BeliefPath::new(vec![g(0.5, 2.0)]).unwrap();
        assert!(matches!(
            path_length(&single, &cfg()),
            Err(Error::PathTooShort { .. })
        ));
    }

    #[test]
    fn geodesic_discretization_reproduces_distance() {
        // Points on a geodesic: pairwise distances add up exactly.
        let p = g(-1.0, 0.5);
        let q = g(2.0, 4.0);
        let d = p.fisher_rao_distance(&q);
        let path = p.geodesic(&q, 64).unwrap();
        assert_abs_diff_eq!(path_length(&path, &cfg()).unwrap(), d, epsilon = 1e-6);
    }

    #[test]
    fn refining_a_geodesic_discretization_is_stable() {
        let p = g(0.0, 1.0);
        let q = g(1.5, 3.0);
        let coarse = path_length(&p.geodesic(&q, 1024).unwrap(), &cfg()).unwrap();
        let fine = path_length(&p.geodesic(&q, 2048).unwrap(), &cfg()).unwrap();
        assert!(fine <= coarse * (1.0 + 1e-6), "{fine} vs {coarse}");
    }

    #[test]
    fn concatenation_is_additive() {
        let (a, b, c) = (g(0.0, 1.0), g(1.0, 2.0), g(-0.5, 0.7));
        let ab = path_length(&BeliefPath::new(vec![a, b]).unwrap(), &cfg()).unwrap();
        let bc = path_length(&BeliefPath::new(vec![b, c]).unwrap(), &cfg()).unwrap();
        let abc = path_length(&BeliefPath::new(vec![a, b, c]).unwrap(), &cfg()).unwrap();
        assert_eq!(ab + bc, abc);
    }

    #[test]
    fn ledger_on_geodesic_is_quasi_static() {
        let p = g(-1.0, 0.5);
        let q = g(1.0, 2.0);
        let led = dissipation_ledger(&p.geodesic(&q, 64).unwrap(), &cfg()).unwrap();
        assert_abs_diff_eq!(led.quasi_static_ratio, 1.0, epsilon = 1e-6);
        assert!(led.path_length_fr >= led.net_geodesic_fr);
    }

    #[test]
    fn ledger_detour_lowers_the_ratio() {
        // Out-and-back excursion strictly lengthens the path.
        let a = g(0.0, 1.0);
        let detour = g(0.0, 5.0);
        let b = g(1.0, 1.0);
        let led =
            dissipation_ledger(&BeliefPath::new(vec![a, detour, b]).unwrap(), &cfg()).unwrap();
        assert!(led.quasi_static_ratio < 1.0);
        assert!(led.path_length_fr > led.net_geodesic_fr);
    }

    #[test]
    fn two_point_path_is_its_own_geodesic() {
        let a = g(0.3, 1.0);
        let b = g(-0.4, 3.0);
        let led = dissipation_ledger(&BeliefPath::new(vec![a, b]).unwrap(), &cfg()).unwrap();
        assert_eq!(led.path_length_fr, led.net_geodesic_fr);
        assert_eq!(led.quasi_static_ratio, 1.0);
    }

    #[test]
    fn zero_step_run_is_trivial() {
        let task = gaussian_task(1, 0.5, 0, 1e-2);
        let run = run_toy_learner(&task, &cfg()).unwrap();
        assert_eq!(run.path.points().len(), 1);
        assert_eq!(run.ledger.path_length_fr, 0.0);
        assert_eq!(run.ledger.quasi_static_ratio, 1.0);
        assert!(run.records.is_empty());
    }

    #[test]
    fn learner_is_seed_deterministic() {
        let task = gaussian_task(7, 0.3, 200, 1e-2);
        let a = run_toy_learner(&task, &cfg()).unwrap();
        let b = run_toy_learner(&task, &cfg()).unwrap();
        assert_eq!(trajectory_csv(&a), trajectory_csv(&b));
        assert_eq!(a.minibatch_hashes, b.minibatch_hashes);
        assert_eq!(a.path.points(), b.path.points());
    }

    #[test]
    fn maximum_likelihood_consistency_without_penalty() {
        // Infinite data, zero penalty: the belief converges to the
        // generating parameters.
        let mut task = gaussian_task(3, 0.0, 10_000, 1e-2);
        task.penalty = PenaltySpec::fisher_rao(task.reference_belief, 0.0).unwrap();
        let run = run_toy_learner(&task, &cfg()).unwrap();
        let last = *run.path.points().last().unwrap();
        let d = last.fisher_rao_distance(&task.data.distribution);
        assert!(d <= 0.05, "final distance to generator {d}");
    }

    #[test]
    fn dominant_penalty_pins_the_reference() {
        let mut task = gaussian_task(5, 1e4, 20_000, 2e-5);
        task.data.sample_count = Some(64);
        let run = run_toy_learner(&task, &cfg()).unwrap();
        let last = *run.path.points().last().unwrap();
        let d = last.fisher_rao_distance(&task.reference_belief);
        assert!(d <= 1e-3, "final distance to reference {d}");
    }

    #[test]
    fn divergence_error_after_excessive_clamping() {
        // An enormous Euclidean pull toward the concentration ceiling makes
        // κ slam between the chart bounds on every step, while the wrapped
        // direction coordinate stays finite throughout.
        let reference = VonMisesBelief::new(0.0, 1e6).unwrap();
        let task = ToyTask {
            data: DataGenerator {
                distribution: VonMisesBelief::new(0.0, 1.0).unwrap(),
                sample_count: Some(32),
                seed: 2,
            },
            initial_belief: VonMisesBelief::new(0.0, 1.0).unwrap(),
            reference_belief: reference,
            penalty: PenaltySpec::new(
                PenaltyKind::Euclidean(crate::vonmises::VonMisesChart),
                reference,
                1e30,
            )
            .unwrap(),
            lr: 1.0,
            steps: 1_100_000,
        };
        assert!(matches!(
            run_toy_learner(&task, &cfg()),
            Err(Error::Diverged { .. })
        ));
    }

    #[test]
    fn csv_has_manifold_coordinate_names() {
        let task = gaussian_task(11, 0.1, 3, 1e-2);
        let run = run_toy_learner(&task, &cfg()).unwrap();
        let csv = trajectory_csv(&run);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "step,mu,tau,penalty,nll,step_kl_nats");
        assert_eq!(csv.lines().count(), 4);

        let vm_ref = VonMisesBelief::new(0.5, 2.0).unwrap();
        let vm_task = ToyTask {
            data: DataGenerator {
                distribution: vm_ref,
                sample_count: None,
                seed: 1,
            },
            initial_belief: VonMisesBelief::new(0.0, 1.0).unwrap(),
            reference_belief: vm_ref,
            penalty: PenaltySpec::fisher_rao(vm_ref, 0.0).unwrap(),
            lr: 1e-2,
            steps: 2,
        };
        let vm_run = run_toy_learner(&vm_task, &cfg()).unwrap();
        assert!(trajectory_csv(&vm_run)
            .starts_with("step,mu_dir,kappa,penalty,nll,step_kl_nats"));
    }

    #[test]
    fn slower_schedule_is_closer_to_quasi_static() {
        // lr/10 with 10x steps never lowers the quasi-static ratio on the
        // consistency task.
        let fast = {
            let mut t = gaussian_task(13, 0.0, 600, 1e-1);
            t.penalty = PenaltySpec::fisher_rao(t.reference_belief, 0.0).unwrap();
            run_toy_learner(&t, &cfg()).unwrap()
        };
        let slow = {
            let mut t = gaussian_task(13, 0.0, 6_000, 1e-2);
            t.penalty = PenaltySpec::fisher_rao(t.reference_belief, 0.0).unwrap();
            run_toy_learner(&t, &cfg()).unwrap()
        };
        assert!(
            slow.ledger.quasi_static_ratio >= fast.ledger.quasi_static_ratio,
            "slow {} < fast {}",
            slow.ledger.quasi_static_ratio,
            fast.ledger.quasi_static_ratio
        );
    }

    #[test]
    fn vonmises_learner_runs_and_is_deterministic() {
        let target = VonMisesBelief::new(1.0, 3.0).unwrap();
        let task = ToyTask {
            data: DataGenerator {
                distribution: target,
                sample_count: None,
                seed: 21,
            },
            initial_belief: VonMisesBelief::new(-0.5, 0.8).unwrap(),
            reference_belief: target,
            penalty: PenaltySpec::fisher_rao(target, 0.0).unwrap(),
            lr: 2e-2,
            steps: 400,
        };
        let a = run_toy_learner(&task, &cfg()).unwrap();
        let b = run_toy_learner(&task, &cfg()).unwrap();
        assert_eq!(trajectory_csv(&a), trajectory_csv(&b));
        let last = *a.path.points().last().unwrap();
        // Moves toward the generator.
        assert!(
            last.kl_divergence(&target) < task.initial_belief.kl_divergence(&target),
            "no progress toward target"
        );
    }

    #[test]
    fn quasi_static_ratio_stays_in_unit_interval() {
        for seed in 0..5 {
            let task = gaussian_task(seed, 0.4, 300, 2e-2);
            let run = run_toy_learner(&task, &cfg()).unwrap();
            let r = run.ledger.quasi_static_ratio;
            assert!(r > 0.0 && r <= 1.0 + 1e-12, "ratio {r}");
        }
    }
}
