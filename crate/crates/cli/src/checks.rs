//! Runnable invariant suites with their independent numerical oracles.
//!
//! The oracles deliberately avoid the code paths they certify: the
//! closed-form Gaussian distance is checked against a boundary-value
//! geodesic solve of the raw `(μ, τ)` metric; KL divergences are checked
//! against quadrature; the von Mises Fisher matrix against the score
//! covariance integral. `check <suite>` on the CLI and the acceptance test
//! suite both run exactly these functions.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use thermoreg_core::gaussian::GaussianChart;
use thermoreg_core::numerics::{integrate_ode, mean_resultant};
use thermoreg_core::regularization::{penalty_value, suboptimality_ratio, PenaltySpec};
use thermoreg_core::sampling::{rng_from_seed, uniform_unit, ChaCha8Rng};
use thermoreg_core::thermo::{
    decompose_inefficiency, efficiency, landauer_bound_per_bit, local_kl_quadratic_check,
    Environment,
};
use thermoreg_core::{Belief, Error, GaussianBelief, Result, ToleranceConfig, VonMisesBelief};

/// Outcome of one property check.
#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub pass: bool,
    /// Worst measured error across the sampled inputs.
    pub worst_error: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl PropertyCheck {
    fn from_error(name: &'static str, worst: f64, tol: f64, detail: String) -> Self {
        Self {
            name,
            pass: worst <= tol,
            worst_error: worst,
            tolerance: tol,
            detail,
        }
    }
}

impl fmt::Display for PropertyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<38} worst {:>12.4e}  tol {:>9.1e}  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.worst_error,
            self.tolerance,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    MetricAxioms,
    Invariance,
    Curvature,
    KlQuadratic,
    Thermo,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "metric-axioms" => Ok(Suite::MetricAxioms),
            "invariance" => Ok(Suite::Invariance),
            "curvature" => Ok(Suite::Curvature),
            "kl-quadratic" => Ok(Suite::KlQuadratic),
            "thermo" => Ok(Suite::Thermo),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite '{other}' (expected metric-axioms, invariance, curvature, kl-quadratic, thermo or all)"
            )),
        }
    }
}

/// Runs a suite; `tol_scale` loosens (>1) or tightens (<1) every tolerance.
pub fn run_suite(suite: Suite, tol_scale: f64) -> Vec<PropertyCheck> {
    let mut out = Vec::new();
    let s = tol_scale;
    match suite {
        Suite::MetricAxioms => {
            out.push(gaussian_metric_axioms(1000, s * 1e-10));
            out.push(closed_form_vs_bvp(100, s * 1e-6));
            out.push(vonmises_metric_axioms(12, s * 1e-4));
            out.push(vonmises_distance_vs_shooting(20, s * 2e-3));
            out.push(vonmises_fisher_vs_quadrature(s * 1e-3));
        }
        Suite::Invariance => {
            out.push(coordinate_invariance(1000, s * 1e-10));
            out.push(euclidean_noninvariance_counterexample());
            out.push(fisher_rao_penalty_invariance(s * 1e-10));
        }
        Suite::Curvature => {
            out.push(curvature_grid(s * 1e-3));
        }
        Suite::KlQuadratic => {
            out.push(gaussian_kl_vs_quadrature(50, s * 1e-9));
            out.push(vonmises_kl_vs_quadrature(100, s * 1e-9));
            out.push(quadratic_expansion_schedule::<GaussianBelief>(
                "gaussian-kl-quadratic-limit",
                s,
            ));
            out.push(quadratic_expansion_schedule::<VonMisesBelief>(
                "vonmises-kl-quadratic-limit",
                s,
            ));
        }
        Suite::Thermo => {
            out.push(thermo_reference_values(s));
            out.push(efficiency_error_path());
            out.push(factor_product_identity(s * 1e-10));
            out.push(fixed_sigma_ratio(s * 1e-12));
        }
        Suite::All => {
            for sub in [
                Suite::MetricAxioms,
                Suite::Invariance,
                Suite::Curvature,
                Suite::KlQuadratic,
                Suite::Thermo,
            ] {
                out.extend(run_suite(sub, tol_scale));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Random point helpers

fn random_gaussian(rng: &mut ChaCha8Rng, tau_lo: f64, tau_hi: f64) -> GaussianBelief {
    let mu = 4.0 * (uniform_unit(rng) - 0.5);
    let tau = tau_lo * (tau_hi / tau_lo).powf(uniform_unit(rng));
    GaussianBelief::new(mu, tau).expect("sampled point in chart")
}

fn random_vonmises(rng: &mut ChaCha8Rng) -> VonMisesBelief {
    let mu = TAU * (uniform_unit(rng) - 0.5);
    let kappa = 10f64.powf(2.0 * uniform_unit(rng) - 1.0);
    VonMisesBelief::new(mu, kappa).expect("sampled point in chart")
}

// ---------------------------------------------------------------------------
// Gaussian geodesic boundary-value oracle

/// Geodesic equations of `ds² = τ dμ² + dτ²/(2τ²)`:
/// `μ'' = −μ'τ'/τ`, `τ'' = τ² μ'² + τ'²/τ`.
fn geodesic_rhs(_t: f64, y: &[f64], dy: &mut [f64]) {
    let (tau, dmu, dtau) = (y[1], y[2], y[3]);
    if tau <= 0.0 {
        // Outside the chart: poison the state so the integrator reports it.
        dy.fill(f64::NAN);
        return;
    }
    dy[0] = dmu;
    dy[1] = dtau;
    dy[2] = -dmu * dtau / tau;
    dy[3] = tau * tau * dmu * dmu + dtau * dtau / tau;
}

fn shoot_endpoint(p: &GaussianBelief, v: [f64; 2], cfg: &ToleranceConfig) -> Result<[f64; 2]> {
    let y0 = [p.mu(), p.tau(), v[0], v[1]];
    let trace = integrate_ode(geodesic_rhs, &y0, (0.0, 1.0), cfg)?;
    let last = &trace.last().expect("trace non-empty").1;
    Ok([last[0], last[1]])
}

fn shooting_residual(
    p: &GaussianBelief,
    target: [f64; 2],
    v: [f64; 2],
    cfg: &ToleranceConfig,
) -> Result<[f64; 2]> {
    let end = shoot_endpoint(p, v, cfg)?;
    Ok([
        (end[0] - target[0]) / (1.0 + target[0].abs()),
        (end[1] - target[1]) / target[1],
    ])
}

fn norm2(r: [f64; 2]) -> f64 {
    r[0].hypot(r[1])
}

/// Damped-Newton shooting toward `target` starting from velocity `v`.
fn newton_shoot(
    p: &GaussianBelief,
    target: [f64; 2],
    mut v: [f64; 2],
    cfg: &ToleranceConfig,
) -> Result<[f64; 2]> {
    let mut r = shooting_residual(p, target, v, cfg)?;
    for _ in 0..60 {
        if norm2(r) <= 1e-11 {
            return Ok(v);
        }
        // Forward-difference Jacobian.
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-7 * (1.0 + v[j].abs());
            let mut vh = v;
            vh[j] += h;
            let rh = shooting_residual(p, target, vh, cfg)?;
            jac[0][j] = (rh[0] - r[0]) / h;
            jac[1][j] = (rh[1] - r[1]) / h;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let delta = [
            (-r[0] * jac[1][1] + r[1] * jac[0][1]) / det,
            (-r[1] * jac[0][0] + r[0] * jac[1][0]) / det,
        ];
        // Damping: halve the step until the residual improves.
        let mut alpha = 1.0;
        let mut advanced = false;
        for _ in 0..30 {
            let trial = [v[0] + alpha * delta[0], v[1] + alpha * delta[1]];
            match shooting_residual(p, target, trial, cfg) {
                Ok(rt) if norm2(rt) < norm2(r) => {
                    v = trial;
                    r = rt;
                    advanced = true;
                    break;
                }
                _ => alpha *= 0.5,
            }
        }
        if !advanced {
            break;
        }
    }
    if norm2(r) <= 1e-9 {
        Ok(v)
    } else {
        Err(Error::ConvergenceFailure("geodesic shooting", 60))
    }
}

/// Fisher–Rao distance via a boundary-value geodesic solve of the raw
/// metric — fully independent of the closed-form half-plane formula.
///
/// The affine-parameter geodesic has constant speed, so the distance is
/// the initial speed `√(τ μ'² + τ'²/(2τ²))`. A short homotopy walks the
/// target from near `p` out to `q`, which keeps Newton in its basin even
/// for far pairs.
pub fn geodesic_bvp_distance(
    p: &GaussianBelief,
    q: &GaussianBelief,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    if p == q {
        return Ok(0.0);
    }
    let dmu = q.mu() - p.mu();
    let log_ratio = (q.tau() / p.tau()).ln();
    let mut v = [dmu, p.tau() * log_ratio];
    let stages = 6;
    for stage in 1..=stages {
        let t = stage as f64 / stages as f64;
        let target = [p.mu() + t * dmu, p.tau() * (t * log_ratio).exp()];
        v = newton_shoot(p, target, v, cfg)?;
    }
    Ok(p.line_element_sq(v[0], v[1]).sqrt())
}

pub fn closed_form_vs_bvp(pairs: usize, tol: f64) -> PropertyCheck {
    let cfg = ToleranceConfig::default();
    let mut rng = rng_from_seed(0xB0);
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for i in 0..pairs {
        let p = random_gaussian(&mut rng, 0.01, 100.0);
        let q = random_gaussian(&mut rng, 0.01, 100.0);
        match geodesic_bvp_distance(&p, &q, &cfg) {
            Ok(oracle) => {
                let err = (p.fisher_rao_distance(&q) - oracle).abs();
                if err > worst {
                    worst = err;
                }
            }
            Err(e) => {
                worst = f64::INFINITY;
                detail = format!("pair {i}: shooting failed: {e}");
                break;
            }
        }
    }
    if detail.is_empty() {
        detail = format!("{pairs} random pairs, tau in [0.01, 100]");
    }
    PropertyCheck::from_error("gaussian-closed-form-vs-bvp", worst, tol, detail)
}

pub fn gaussian_metric_axioms(n: usize, triangle_tol: f64) -> PropertyCheck {
    let mut rng = rng_from_seed(0xA1);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let p = random_gaussian(&mut rng, 0.01, 100.0);
        let q = random_gaussian(&mut rng, 0.01, 100.0);
        let asym = (p.fisher_rao_distance(&q) - q.fisher_rao_distance(&p)).abs();
        let self_d = p.fisher_rao_distance(&p);
        worst = worst.max(asym).max(self_d);
    }
    for _ in 0..n {
        let a = random_gaussian(&mut rng, 0.01, 100.0);
        let b = random_gaussian(&mut rng, 0.01, 100.0);
        let c = random_gaussian(&mut rng, 0.01, 100.0);
        let violation =
            a.fisher_rao_distance(&c) - a.fisher_rao_distance(&b) - b.fisher_rao_distance(&c);
        worst = worst.max(violation);
    }
    PropertyCheck::from_error(
        "gaussian-metric-axioms",
        worst,
        triangle_tol,
        format!("{n} pairs and {n} triples"),
    )
}

// ---------------------------------------------------------------------------
// von Mises geodesic shooting oracle

/// Metric entries and their κ-derivatives, rebuilt locally from the
/// public Bessel ratios so the oracle does not share code with the
/// manifold's own metric functions:
/// `f = κA`, `h = A' = 1 − A² − A/κ`, `f' = A + κA'`,
/// `h' = A'' = −2AA' − A'/κ + A/κ²`.
fn vm_metric_and_derivs(kappa: f64) -> (f64, f64, f64, f64) {
    let a = mean_resultant(kappa).expect("kappa in chart");
    let ap = 1.0 - a * a - a / kappa;
    let f = kappa * a;
    let h = ap;
    let fp = a + kappa * ap;
    let hp = -2.0 * a * ap - ap / kappa + a / (kappa * kappa);
    (f, h, fp, hp)
}

/// Geodesic equations of `ds² = f(κ) dμ² + h(κ) dκ²`:
/// `μ'' = −(f'/f) μ'κ'`, `κ'' = (f'/(2h)) μ'² − (h'/(2h)) κ'²`.
fn vm_geodesic_rhs(_t: f64, y: &[f64], dy: &mut [f64]) {
    let (kappa, dmu, dka) = (y[1], y[2], y[3]);
    if kappa <= 0.0 {
        dy.fill(f64::NAN);
        return;
    }
    let (f, h, fp, hp) = vm_metric_and_derivs(kappa);
    dy[0] = dmu;
    dy[1] = dka;
    dy[2] = -(fp / f) * dmu * dka;
    dy[3] = (fp / (2.0 * h)) * dmu * dmu - (hp / (2.0 * h)) * dka * dka;
}

/// von Mises Fisher–Rao distance by damped-Newton geodesic shooting —
/// independent of the discrete path-energy optimizer it cross-checks.
/// Only suitable away from the κ → 0 boundary, which is exactly why the
/// production path uses energy minimization instead.
pub fn vonmises_bvp_distance(
    p: &VonMisesBelief,
    q: &VonMisesBelief,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    if p == q {
        return Ok(0.0);
    }
    let dmu = thermoreg_core::vonmises::shortest_arc(q.mu_dir() - p.mu_dir());
    let log_ratio = (q.kappa() / p.kappa()).ln();
    let mut v = [dmu, q.kappa() - p.kappa()];
    let stages = 6;
    for stage in 1..=stages {
        let t = stage as f64 / stages as f64;
        let target = [
            p.mu_dir() + t * dmu,
            p.kappa() * (t * log_ratio).exp(),
        ];
        v = vm_newton_shoot(p, target, v, cfg)?;
    }
    let (f, h, _, _) = vm_metric_and_derivs(p.kappa());
    Ok((f * v[0] * v[0] + h * v[1] * v[1]).sqrt())
}

fn vm_shoot_residual(
    p: &VonMisesBelief,
    target: [f64; 2],
    v: [f64; 2],
    cfg: &ToleranceConfig,
) -> Result<[f64; 2]> {
    let y0 = [p.mu_dir(), p.kappa(), v[0], v[1]];
    let trace = integrate_ode(vm_geodesic_rhs, &y0, (0.0, 1.0), cfg)?;
    let last = &trace.last().expect("trace non-empty").1;
    Ok([last[0] - target[0], (last[1] - target[1]) / target[1]])
}

fn vm_newton_shoot(
    p: &VonMisesBelief,
    target: [f64; 2],
    mut v: [f64; 2],
    cfg: &ToleranceConfig,
) -> Result<[f64; 2]> {
    let mut r = vm_shoot_residual(p, target, v, cfg)?;
    for _ in 0..60 {
        if norm2(r) <= 1e-11 {
            return Ok(v);
        }
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-7 * (1.0 + v[j].abs());
            let mut vh = v;
            vh[j] += h;
            let rh = vm_shoot_residual(p, target, vh, cfg)?;
            jac[0][j] = (rh[0] - r[0]) / h;
            jac[1][j] = (rh[1] - r[1]) / h;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let delta = [
            (-r[0] * jac[1][1] + r[1] * jac[0][1]) / det,
            (-r[1] * jac[0][0] + r[0] * jac[1][0]) / det,
        ];
        let mut alpha = 1.0;
        let mut advanced = false;
        for _ in 0..30 {
            let trial = [v[0] + alpha * delta[0], v[1] + alpha * delta[1]];
            match vm_shoot_residual(p, target, trial, cfg) {
                Ok(rt) if norm2(rt) < norm2(r) => {
                    v = trial;
                    r = rt;
                    advanced = true;
                    break;
                }
                _ => alpha *= 0.5,
            }
        }
        if !advanced {
            break;
        }
    }
    if norm2(r) <= 1e-9 {
        Ok(v)
    } else {
        Err(Error::ConvergenceFailure("von Mises geodesic shooting", 60))
    }
}

/// Cross-checks the discrete path-energy distance against the shooting
/// oracle on curved pairs away from the chart boundary.
pub fn vonmises_distance_vs_shooting(pairs: usize, tol: f64) -> PropertyCheck {
    let cfg = ToleranceConfig::default();
    let mut rng = rng_from_seed(0xA3);
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for i in 0..pairs {
        let p = VonMisesBelief::new(
            TAU * (uniform_unit(&mut rng) - 0.5),
            10f64.powf(0.6 * (2.0 * uniform_unit(&mut rng) - 1.0)), // kappa in [0.25, 4]
        )
        .expect("in chart");
        let q = VonMisesBelief::new(
            TAU * (uniform_unit(&mut rng) - 0.5),
            10f64.powf(0.6 * (2.0 * uniform_unit(&mut rng) - 1.0)),
        )
        .expect("in chart");
        let optimized = p.fisher_rao_distance(&q, &cfg).expect("converges");
        match vonmises_bvp_distance(&p, &q, &cfg) {
            Ok(oracle) => {
                let rel = (optimized - oracle).abs() / oracle.max(1e-12);
                worst = worst.max(rel);
            }
            Err(e) => {
                worst = f64::INFINITY;
                detail = format!("pair {i}: shooting failed: {e}");
                break;
            }
        }
    }
    if detail.is_empty() {
        detail = format!(
            "{pairs} curved pairs, kappa in [0.25, 4]; bound reflects the 64-point polyline bias (~1/N^2)"
        );
    }
    PropertyCheck::from_error("vonmises-distance-vs-shooting", worst, tol, detail)
}

pub fn vonmises_metric_axioms(triples: usize, tol: f64) -> PropertyCheck {
    let cfg = ToleranceConfig::default();
    let mut rng = rng_from_seed(0xA2);
    let mut worst = 0.0f64;
    for _ in 0..triples {
        let a = random_vonmises(&mut rng);
        let b = random_vonmises(&mut rng);
        let c = random_vonmises(&mut rng);
        let ab = a.fisher_rao_distance(&b, &cfg).expect("converges");
        let ba = b.fisher_rao_distance(&a, &cfg).expect("converges");
        let bc = b.fisher_rao_distance(&c, &cfg).expect("converges");
        let ac = a.fisher_rao_distance(&c, &cfg).expect("converges");
        worst = worst.max((ab - ba).abs()).max(ac - ab - bc);
    }
    PropertyCheck::from_error(
        "vonmises-metric-axioms",
        worst,
        tol,
        format!("{triples} sampled triples (symmetry and triangle)"),
    )
}

// ---------------------------------------------------------------------------
// Coordinate invariance

/// Length of the geodesic polyline measured through the metric tensor
/// expressed in `chart`, midpoint rule with Richardson extrapolation.
pub fn distance_via_chart(
    p: &GaussianBelief,
    q: &GaussianBelief,
    chart: GaussianChart,
    segments: usize,
) -> f64 {
    let coarse = polyline_length_in_chart(p, q, chart, segments);
    let fine = polyline_length_in_chart(p, q, chart, 2 * segments);
    (4.0 * fine - coarse) / 3.0
}

fn polyline_length_in_chart(
    p: &GaussianBelief,
    q: &GaussianBelief,
    chart: GaussianChart,
    segments: usize,
) -> f64 {
    let path = p.geodesic(q, segments + 1).expect("valid endpoints");
    let pts = path.points();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let a = w[0].coords_in(chart);
        let b = w[1].coords_in(chart);
        let mid =
            GaussianBelief::from_coords_in(chart, [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0])
                .expect("midpoint stays in chart");
        let d = [b[0] - a[0], b[1] - a[1]];
        total += mid.line_element_sq_in(chart, d).sqrt();
    }
    total
}

pub fn coordinate_invariance(pairs: usize, tol: f64) -> PropertyCheck {
    let mut rng = rng_from_seed(0xC0);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let p = random_gaussian(&mut rng, 0.1, 10.0);
        let q = random_gaussian(&mut rng, 0.1, 10.0);
        if p == q {
            continue;
        }
        let via_tau = distance_via_chart(&p, &q, GaussianChart::MuTau, 4096);
        let via_sigma = distance_via_chart(&p, &q, GaussianChart::MuSigma, 4096);
        let rel = (via_tau - via_sigma).abs() / via_tau.max(1e-300);
        worst = worst.max(rel);
    }
    PropertyCheck::from_error(
        "gaussian-coordinate-invariance",
        worst,
        tol,
        format!("{pairs} pairs, (mu,tau) vs (mu,sigma) metric integration"),
    )
}

pub fn euclidean_noninvariance_counterexample() -> PropertyCheck {
    let cfg = ToleranceConfig::default();
    let reference = GaussianBelief::from_mu_sigma(0.0, 1.0).expect("valid");
    let q = GaussianBelief::from_mu_sigma(0.0, 2.0).expect("valid");
    let in_sigma = penalty_value(
        &PenaltySpec::euclidean(GaussianChart::MuSigma, reference, 1.0).expect("valid"),
        &q,
        &cfg,
    )
    .expect("valid");
    let in_tau = penalty_value(
        &PenaltySpec::euclidean(GaussianChart::MuTau, reference, 1.0).expect("valid"),
        &q,
        &cfg,
    )
    .expect("valid");
    let disagreement = (in_sigma - in_tau).abs() / in_sigma.max(in_tau);
    PropertyCheck {
        name: "euclidean-chart-dependence",
        pass: disagreement > 0.10,
        worst_error: disagreement,
        tolerance: 0.10,
        detail: format!(
            "same move: {in_sigma} in (mu,sigma) vs {in_tau} in (mu,tau); must disagree by > 10%"
        ),
    }
}

pub fn fisher_rao_penalty_invariance(tol: f64) -> PropertyCheck {
    let cfg = ToleranceConfig::default();
    let mut rng = rng_from_seed(0xC1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let reference = random_gaussian(&mut rng, 0.1, 10.0);
        let q = random_gaussian(&mut rng, 0.1, 10.0);
        let spec = PenaltySpec::fisher_rao(reference, 1.0).expect("valid");
        let direct = penalty_value(&spec, &q, &cfg).expect("valid");
        // Rebuild both points through the (mu, sigma) chart and re-evaluate.
        let q2 = GaussianBelief::from_mu_sigma(q.mu(), q.sigma()).expect("valid");
        let r2 = GaussianBelief::from_mu_sigma(reference.mu(), reference.sigma()).expect("valid");
        let spec2 = PenaltySpec::fisher_rao(r2, 1.0).expect("valid");
        let via_sigma = penalty_value(&spec2, &q2, &cfg).expect("valid");
        if direct > 0.0 {
            worst = worst.max((direct - via_sigma).abs() / direct);
        }
    }
    PropertyCheck::from_error(
        "fisher-rao-penalty-invariance",
        worst,
        tol,
        "200 random reference/point pairs".into(),
    )
}

// ---------------------------------------------------------------------------
// Curvature

pub fn curvature_grid(tol: f64) -> PropertyCheck {
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let mu = -2.0 + 4.0 * i as f64 / 9.0;
            let tau = 10f64.powf(-1.0 + 2.0 * j as f64 / 9.0);
            let p = GaussianBelief::new(mu, tau).expect("grid in chart");
            let k = p.sectional_curvature(1e-4).expect("stencil in chart");
            worst = worst.max((k + 0.5).abs());
        }
    }
    PropertyCheck::from_error(
        "gaussian-curvature-constant",
        worst,
        tol,
        "10x10 grid, expected -1/2 everywhere".into(),
    )
}

// ---------------------------------------------------------------------------
// KL quadrature oracles and the quadratic expansion

/// Composite Simpson quadrature of `∫ p ln(p/q)`, windowed at 15 standard
/// deviations beyond both means so the truncated tails are negligible
/// against the 1e-9 agreement target.
fn gaussian_kl_quadrature(p: &GaussianBelief, q: &GaussianBelief) -> f64 {
    let integrand = |x: f64| {
        let lp = -p.nll(x);
        let lq = -q.nll(x);
        lp.exp() * (lp - lq)
    };
    let spread = 15.0 * p.sigma().max(q.sigma());
    let lo = p.mu().min(q.mu()) - spread;
    let hi = p.mu().max(q.mu()) + spread;
    simpson(integrand, lo, hi, 60_000)
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Trapezoid rule over the circle (spectrally accurate for periodic
/// integrands).
fn circle_quadrature<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let h = TAU / n as f64;
    (0..n).map(|i| f(-PI + i as f64 * h)).sum::<f64>() * h
}

pub fn gaussian_kl_vs_quadrature(pairs: usize, tol: f64) -> PropertyCheck {
    let mut rng = rng_from_seed(0xD0);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let p = random_gaussian(&mut rng, 0.25, 4.0);
        let q = random_gaussian(&mut rng, 0.25, 4.0);
        let err = (p.kl_divergence(&q) - gaussian_kl_quadrature(&p, &q)).abs();
        worst = worst.max(err);
    }
    PropertyCheck::from_error(
        "gaussian-kl-vs-quadrature",
        worst,
        tol,
        format!("{pairs} pairs, adaptive-window Simpson"),
    )
}

pub fn vonmises_kl_vs_quadrature(pairs: usize, tol: f64) -> PropertyCheck {
    let mut rng = rng_from_seed(0xD1);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let p = random_vonmises(&mut rng);
        let q = random_vonmises(&mut rng);
        let oracle = circle_quadrature(
            |x| {
                let lp = p.log_density(x);
                lp.exp() * (lp - q.log_density(x))
            },
            8192,
        );
        worst = worst.max((p.kl_divergence(&q) - oracle).abs());
    }
    PropertyCheck::from_error(
        "vonmises-kl-vs-quadrature",
        worst,
        tol,
        format!("{pairs} pairs, trapezoid over the circle"),
    )
}

pub fn vonmises_fisher_vs_quadrature(tol: f64) -> PropertyCheck {
    let mut worst = 0.0f64;
    for &kappa in &[0.5, 1.0, 2.0, 10.0] {
        let p = VonMisesBelief::new(0.3, kappa).expect("valid");
        let a = mean_resultant(kappa).expect("valid");
        let dens = |x: f64| p.log_density(x).exp();
        let g_mm = circle_quadrature(
            |x| {
                let s = kappa * (x - 0.3).sin();
                dens(x) * s * s
            },
            8192,
        );
        let g_kk = circle_quadrature(
            |x| {
                let s = (x - 0.3).cos() - a;
                dens(x) * s * s
            },
            8192,
        );
        let g = VonMisesBelief::fisher_info(&p);
        worst = worst
            .max((g.g11 / g_mm - 1.0).abs())
            .max((g.g22 / g_kk - 1.0).abs());
    }
    PropertyCheck::from_error(
        "vonmises-fisher-vs-quadrature",
        worst,
        tol,
        "score covariance at kappa in {0.5, 1, 2, 10}".into(),
    )
}

/// Local expansion check: |2·KL/d² − 1| ≤ 0.1 at ε = 1e-2 and ≤ 0.02 at
/// ε = 1e-3, decreasing monotonically over {1e-1, 1e-2, 1e-3}.
pub fn quadratic_expansion_schedule<B: ExpansionProbe>(name: &'static str, s: f64) -> PropertyCheck {
    let cfg = ToleranceConfig::default();
    let base = B::base_point();
    let mut errors = Vec::new();
    for eps in [1e-1, 1e-2, 1e-3] {
        let perturbed = B::perturb(&base, eps);
        let ratio = local_kl_quadratic_check(&base, &perturbed, &cfg).expect("separated points");
        errors.push((ratio - 1.0).abs());
    }
    let monotone = errors[0] > errors[1] && errors[1] > errors[2];
    let pass = monotone && errors[1] <= s * 0.1 && errors[2] <= s * 0.02;
    PropertyCheck {
        name,
        pass,
        worst_error: errors[1].max(errors[2] * 5.0),
        tolerance: s * 0.1,
        detail: format!(
            "|2KL/d^2-1| at eps 1e-1/1e-2/1e-3: {:.3e}/{:.3e}/{:.3e}, monotone: {monotone}",
            errors[0], errors[1], errors[2]
        ),
    }
}

/// Gives each manifold a base point and a perturbation that exercises the
/// cubic remainder of the expansion.
pub trait ExpansionProbe: Belief {
    fn base_point() -> Self;
    fn perturb(base: &Self, eps: f64) -> Self;
}

impl ExpansionProbe for GaussianBelief {
    fn base_point() -> Self {
        GaussianBelief::new(0.0, 1.0).expect("valid")
    }

    fn perturb(base: &Self, eps: f64) -> Self {
        GaussianBelief::new(base.mu() + eps, base.tau() * (1.0 + eps)).expect("valid")
    }
}

impl ExpansionProbe for VonMisesBelief {
    fn base_point() -> Self {
        VonMisesBelief::new(0.0, 2.0).expect("valid")
    }

    fn perturb(base: &Self, eps: f64) -> Self {
        VonMisesBelief::new(base.mu_dir() + eps, base.kappa() * (1.0 + eps)).expect("valid")
    }
}

// ---------------------------------------------------------------------------
// Thermodynamics

pub fn thermo_reference_values(s: f64) -> PropertyCheck {
    let env = Environment::new(300.0).expect("valid");
    let err = (landauer_bound_per_bit(&env) - 2.8711e-21).abs();
    PropertyCheck::from_error(
        "landauer-bound-300k",
        err,
        s * 1e-24,
        "k_B * 300 K * ln 2".into(),
    )
}

pub fn efficiency_error_path() -> PropertyCheck {
    let env = Environment::new(300.0).expect("valid");
    let bound = landauer_bound_per_bit(&env);
    let at_bound = efficiency(1.0, bound, &env);
    let below = efficiency(1.0, bound * (1.0 - 1e-12), &env);
    let pass = matches!(at_bound, Ok(ref r) if r.eta == 1.0)
        && matches!(below, Err(Error::SecondLawViolation { .. }));
    PropertyCheck {
        name: "second-law-boundary",
        pass,
        worst_error: if pass { 0.0 } else { 1.0 },
        tolerance: 0.0,
        detail: "eta = 1 exactly at the bound, error just below it".into(),
    }
}

pub fn factor_product_identity(tol: f64) -> PropertyCheck {
    let mut worst = 0.0f64;
    let env = Environment::new(300.0).expect("valid");
    let bound = landauer_bound_per_bit(&env);
    for &mult in &[1.0, 1.5, 7.0, 1e3, 1e9] {
        let rep = efficiency(2.0, 2.0 * bound * mult, &env).expect("above bound");
        worst = worst.max(rep.factor_product_residual());
    }
    for &(h, a, d) in &[(1.0, 1.0, 1.0), (2.0, 2.0, 2.0), (10.0, 1.5, 3.0)] {
        let rep = decompose_inefficiency(h, a, d).expect("factors >= 1");
        worst = worst.max(rep.factor_product_residual());
    }
    PropertyCheck::from_error(
        "inefficiency-factor-identity",
        worst,
        tol,
        "hardware * algorithm * dissipation = 1/eta".into(),
    )
}

pub fn fixed_sigma_ratio(tol: f64) -> PropertyCheck {
    let mut worst = 0.0f64;
    for &sigma in &[0.1, 0.5, 1.0, 2.0, 10.0] {
        let r = suboptimality_ratio(0.0, 1.7, sigma).expect("separated");
        worst = worst.max((r / (sigma * sigma) - 1.0).abs());
    }
    PropertyCheck::from_error(
        "fixed-sigma-ratio-is-sigma-squared",
        worst,
        tol,
        "sigma in {0.1, 0.5, 1, 2, 10}".into(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bvp_oracle_matches_known_values() {
        let cfg = ToleranceConfig::default();
        let p = GaussianBelief::from_mu_sigma(0.0, 1.0).unwrap();
        let q = GaussianBelief::from_mu_sigma(1.0, 1.0).unwrap();
        let d = geodesic_bvp_distance(&p, &q, &cfg).unwrap();
        assert_abs_diff_eq!(d, 0.9802581434685472, epsilon = 1e-8);
        // Pure scale pair.
        let r = GaussianBelief::from_mu_sigma(0.0, std::f64::consts::E).unwrap();
        let d2 = geodesic_bvp_distance(&p, &r, &cfg).unwrap();
        assert_abs_diff_eq!(d2, std::f64::consts::SQRT_2, epsilon = 1e-8);
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("metric-axioms".parse::<Suite>().unwrap(), Suite::MetricAxioms);
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn curvature_suite_passes() {
        let checks = run_suite(Suite::Curvature, 1.0);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn thermo_suite_passes() {
        let checks = run_suite(Suite::Thermo, 1.0);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }
}
