//! `thermoreg` — point queries on the belief manifolds, invariant check
//! suites, and the regularization-comparison experiment runner.

use std::path::PathBuf;
use std::process::ExitCode as ProcessExit;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use thermoreg::checks::{run_suite, Suite};
use thermoreg::config::ExperimentConfig;
use thermoreg::error::{CliError, ExitCode};
use thermoreg::experiments::{emit_report, run_experiment};
use thermoreg_core::thermo::{
    crystallization_index, efficiency, landauer_bound_per_bit, Environment, Regime,
};
use thermoreg_core::trajectory::BeliefPath;
use thermoreg_core::{Belief, GaussianBelief, ToleranceConfig, VonMisesBelief};

#[derive(Parser)]
#[command(
    name = "thermoreg",
    version,
    about = "Fisher-Rao belief geometry, Landauer-bound accounting and \
             Euclidean-vs-Fisher-Rao regularization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ManifoldArg {
    Gaussian,
    Vonmises,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoordsArg {
    /// mean, precision
    MuTau,
    /// mean, standard deviation
    MuSigma,
}

#[derive(Subcommand)]
enum Command {
    /// Fisher-Rao distance and squared distance between two points
    Distance {
        #[arg(long)]
        manifold: ManifoldArg,
        /// First point as "c1,c2"
        #[arg(long)]
        a: String,
        /// Second point as "c1,c2"
        #[arg(long)]
        b: String,
        /// Input coordinate chart (gaussian only)
        #[arg(long, value_enum, default_value_t = CoordsArg::MuTau)]
        coords: CoordsArg,
        #[arg(long)]
        json: bool,
    },
    /// Sample the geodesic between two points
    Geodesic {
        #[arg(long)]
        manifold: ManifoldArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, value_enum, default_value_t = CoordsArg::MuTau)]
        coords: CoordsArg,
        /// Number of sample points (at least 2)
        #[arg(long, default_value_t = 33)]
        points: usize,
        #[arg(long)]
        json: bool,
    },
    /// KL divergence D(p || q) in nats
    Kl {
        #[arg(long)]
        manifold: ManifoldArg,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long, value_enum, default_value_t = CoordsArg::MuTau)]
        coords: CoordsArg,
        #[arg(long)]
        json: bool,
    },
    /// Landauer bound per bit at the given temperature
    Landauer {
        /// Temperature in kelvin
        #[arg(long)]
        temperature: f64,
        /// Boltzmann constant override (J/K)
        #[arg(long)]
        boltzmann: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Thermodynamic efficiency of an erasure process
    Efficiency {
        /// Information erased, in bits
        #[arg(long)]
        info_bits: f64,
        /// Measured energy in joules
        #[arg(long)]
        actual_joules: f64,
        #[arg(long)]
        temperature: f64,
        #[arg(long)]
        json: bool,
    },
    /// Crystallization index C = tau * kappa with regime classification
    Crystallize {
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        kappa: f64,
        /// Exploration/critical boundary
        #[arg(long, default_value_t = 0.1)]
        low: f64,
        /// Critical/over-constrained boundary
        #[arg(long, default_value_t = 10.0)]
        high: f64,
        #[arg(long)]
        json: bool,
    },
    /// Run an invariant suite (metric-axioms, invariance, curvature,
    /// kl-quadratic, thermo, all)
    Check {
        #[arg(default_value = "all")]
        suite: String,
        /// Multiplies every tolerance (>1 loosens, <1 tightens)
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
        #[arg(long)]
        json: bool,
    },
    /// Run a prediction experiment from a JSON config
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads for concurrent runs
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ProcessExit {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ProcessExit::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ProcessExit::from(err.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Distance {
            manifold,
            a,
            b,
            coords,
            json,
        } => cmd_distance(manifold, &a, &b, coords, json),
        Command::Geodesic {
            manifold,
            a,
            b,
            coords,
            points,
            json,
        } => cmd_geodesic(manifold, &a, &b, coords, points, json),
        Command::Kl {
            manifold,
            p,
            q,
            coords,
            json,
        } => cmd_kl(manifold, &p, &q, coords, json),
        Command::Landauer {
            temperature,
            boltzmann,
            json,
        } => cmd_landauer(temperature, boltzmann, json),
        Command::Efficiency {
            info_bits,
            actual_joules,
            temperature,
            json,
        } => cmd_efficiency(info_bits, actual_joules, temperature, json),
        Command::Crystallize {
            tau,
            kappa,
            low,
            high,
            json,
        } => cmd_crystallize(tau, kappa, low, high, json),
        Command::Check {
            suite,
            tolerance_scale,
            json,
        } => cmd_check(&suite, tolerance_scale, json),
        Command::Experiment {
            config,
            workers,
            json,
        } => cmd_experiment(&config, workers, json),
    }
}

fn parse_pair(text: &str) -> Result<(f64, f64), CliError> {
    let mut parts = text.split(',');
    let parse = |part: Option<&str>| -> Result<f64, CliError> {
        part.ok_or_else(|| CliError::Usage(format!("expected \"c1,c2\", got \"{text}\"")))?
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("cannot parse coordinate in \"{text}\"")))
    };
    let c1 = parse(parts.next())?;
    let c2 = parse(parts.next())?;
    if parts.next().is_some() {
        return Err(CliError::Usage(format!(
            "expected exactly two coordinates, got \"{text}\""
        )));
    }
    Ok((c1, c2))
}

fn gaussian_point(text: &str, coords: CoordsArg) -> Result<GaussianBelief, CliError> {
    let (c1, c2) = parse_pair(text)?;
    let point = match coords {
        CoordsArg::MuTau => GaussianBelief::new(c1, c2)?,
        CoordsArg::MuSigma => GaussianBelief::from_mu_sigma(c1, c2)?,
    };
    Ok(point)
}

fn vonmises_point(text: &str, coords: CoordsArg) -> Result<VonMisesBelief, CliError> {
    if coords == CoordsArg::MuSigma {
        return Err(CliError::Usage(
            "--coords mu-sigma applies to the gaussian manifold only".into(),
        ));
    }
    let (c1, c2) = parse_pair(text)?;
    Ok(VonMisesBelief::new(c1, c2)?)
}

/// 12 significant digits, locale-independent.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn cmd_distance(
    manifold: ManifoldArg,
    a: &str,
    b: &str,
    coords: CoordsArg,
    json: bool,
) -> Result<ExitCode, CliError> {
    let cfg = ToleranceConfig::default();
    let (d, manifold_name) = match manifold {
        ManifoldArg::Gaussian => {
            let pa = gaussian_point(a, coords)?;
            let pb = gaussian_point(b, coords)?;
            (pa.fisher_rao_distance(&pb), "gaussian")
        }
        ManifoldArg::Vonmises => {
            let pa = vonmises_point(a, coords)?;
            let pb = vonmises_point(b, coords)?;
            (pa.fisher_rao_distance(&pb, &cfg)?, "vonmises")
        }
    };
    if json {
        println!(
            "{}",
            json!({ "manifold": manifold_name, "distance": d, "distance_squared": d * d })
        );
    } else {
        println!("distance          {}", sig12(d));
        println!("distance_squared  {}", sig12(d * d));
    }
    Ok(ExitCode::Success)
}

fn cmd_geodesic(
    manifold: ManifoldArg,
    a: &str,
    b: &str,
    coords: CoordsArg,
    points: usize,
    json: bool,
) -> Result<ExitCode, CliError> {
    let cfg = ToleranceConfig::default();
    fn render<B: Belief>(path: &BeliefPath<B>, json: bool) {
        let names = B::coord_names();
        if json {
            let pts: Vec<_> = path
                .points()
                .iter()
                .map(|p| {
                    let c = p.coords();
                    json!({ names[0]: c[0], names[1]: c[1] })
                })
                .collect();
            println!("{}", json!({ "points": pts }));
        } else {
            println!("{},{}", names[0], names[1]);
            for p in path.points() {
                let c = p.coords();
                println!("{},{}", c[0], c[1]);
            }
        }
    }
    match manifold {
        ManifoldArg::Gaussian => {
            let pa = gaussian_point(a, coords)?;
            let pb = gaussian_point(b, coords)?;
            render(&pa.geodesic(&pb, points)?, json);
        }
        ManifoldArg::Vonmises => {
            let pa = vonmises_point(a, coords)?;
            let pb = vonmises_point(b, coords)?;
            render(&pa.geodesic(&pb, points, &cfg)?, json);
        }
    }
    Ok(ExitCode::Success)
}

fn cmd_kl(
    manifold: ManifoldArg,
    p: &str,
    q: &str,
    coords: CoordsArg,
    json: bool,
) -> Result<ExitCode, CliError> {
    let (kl, manifold_name) = match manifold {
        ManifoldArg::Gaussian => {
            let pp = gaussian_point(p, coords)?;
            let pq = gaussian_point(q, coords)?;
            (pp.kl_divergence(&pq), "gaussian")
        }
        ManifoldArg::Vonmises => {
            let pp = vonmises_point(p, coords)?;
            let pq = vonmises_point(q, coords)?;
            (pp.kl_divergence(&pq), "vonmises")
        }
    };
    if json {
        println!(
            "{}",
            json!({ "manifold": manifold_name, "kl_nats": kl, "kl_bits": kl / std::f64::consts::LN_2 })
        );
    } else {
        println!("kl_nats  {}", sig12(kl));
        println!("kl_bits  {}", sig12(kl / std::f64::consts::LN_2));
    }
    Ok(ExitCode::Success)
}

fn cmd_landauer(
    temperature: f64,
    boltzmann: Option<f64>,
    json: bool,
) -> Result<ExitCode, CliError> {
    let env = match boltzmann {
        Some(kb) => Environment::with_boltzmann(temperature, kb)?,
        None => Environment::new(temperature)?,
    };
    let bound = landauer_bound_per_bit(&env);
    if json {
        println!(
            "{}",
            json!({
                "temperature_kelvin": env.temperature_kelvin(),
                "boltzmann_constant": env.boltzmann_constant(),
                "landauer_joules_per_bit": bound,
            })
        );
    } else {
        println!("landauer_joules_per_bit  {}", sig12(bound));
    }
    Ok(ExitCode::Success)
}

fn cmd_efficiency(
    info_bits: f64,
    actual_joules: f64,
    temperature: f64,
    json: bool,
) -> Result<ExitCode, CliError> {
    let env = Environment::new(temperature)?;
    let report = efficiency(info_bits, actual_joules, &env)?;
    if json {
        println!(
            "{}",
            json!({
                "landauer_joules": report.landauer_joules,
                "actual_joules": report.actual_joules,
                "eta": report.eta,
                "hardware_factor": report.hardware_factor,
                "algorithm_factor": report.algorithm_factor,
                "dissipation_factor": report.dissipation_factor,
            })
        );
    } else {
        println!("landauer_joules     {}", sig12(report.landauer_joules));
        println!("actual_joules       {}", sig12(report.actual_joules));
        println!("eta                 {}", sig12(report.eta));
        println!("dissipation_factor  {}", sig12(report.dissipation_factor));
    }
    Ok(ExitCode::Success)
}

fn cmd_crystallize(
    tau: f64,
    kappa: f64,
    low: f64,
    high: f64,
    json: bool,
) -> Result<ExitCode, CliError> {
    let index = crystallization_index(tau, kappa, (low, high))?;
    let regime = match index.regime {
        Regime::Exploration => "exploration",
        Regime::Critical => "critical",
        Regime::OverConstrained => "over-constrained",
    };
    if json {
        println!(
            "{}",
            json!({ "value": index.value, "regime": regime, "low": low, "high": high })
        );
    } else {
        println!("crystallization_index  {}", sig12(index.value));
        println!("regime                 {regime}");
    }
    Ok(ExitCode::Success)
}

fn cmd_check(suite: &str, tolerance_scale: f64, json: bool) -> Result<ExitCode, CliError> {
    let suite: Suite = suite.parse().map_err(CliError::Usage)?;
    if !(tolerance_scale > 0.0 && tolerance_scale.is_finite()) {
        return Err(CliError::Usage("tolerance scale must be positive".into()));
    }
    let checks = run_suite(suite, tolerance_scale);
    let all_pass = checks.iter().all(|c| c.pass);
    if json {
        let items: Vec<_> = checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "pass": c.pass,
                    "worst_error": c.worst_error,
                    "tolerance": c.tolerance,
                    "detail": c.detail,
                })
            })
            .collect();
        println!("{}", json!({ "pass": all_pass, "checks": items }));
    } else {
        for c in &checks {
            println!("{c}");
        }
        println!(
            "{}: {}/{} checks passed",
            if all_pass { "PASS" } else { "FAIL" },
            checks.iter().filter(|c| c.pass).count(),
            checks.len()
        );
    }
    Ok(if all_pass {
        ExitCode::Success
    } else {
        ExitCode::CheckFailed
    })
}

fn cmd_experiment(
    config_path: &std::path::Path,
    workers: Option<usize>,
    json: bool,
) -> Result<ExitCode, CliError> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    if let Ok(seed_text) = std::env::var("THERMOREG_SEED") {
        cfg.seed_base = seed_text.trim().parse().map_err(|_| {
            CliError::Usage(format!("THERMOREG_SEED must be a u64, got \"{seed_text}\""))
        })?;
    }

    let report = match workers {
        Some(n) => {
            if n == 0 {
                return Err(CliError::Usage("--workers must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(e.to_string()))?;
            pool.install(|| run_experiment(&cfg))?
        }
        None => run_experiment(&cfg)?,
    };
    emit_report(&report, &cfg.output_dir)?;

    if json {
        println!(
            "{}",
            serde_json::to_string(&report.summary()).map_err(|e| CliError::Config(e.to_string()))?
        );
    } else {
        match report.prediction {
            1 => {
                let fr = &report.aggregates[1];
                let eu = &report.aggregates[0];
                println!(
                    "prediction1_pass={} (eta_hat fisher-rao {:.6} +- {:.6}, euclidean {:.6} +- {:.6}, {} records) -> {}",
                    report.prediction1_pass.unwrap_or(false),
                    fr.mean_eta_hat,
                    fr.std_eta_hat,
                    eu.mean_eta_hat,
                    eu.std_eta_hat,
                    report.records.len(),
                    cfg.output_dir.display()
                );
            }
            _ => {
                println!(
                    "prediction2_trend={} ({} records) -> {}",
                    report.prediction2_trend.unwrap_or(f64::NAN),
                    report.records.len(),
                    cfg.output_dir.display()
                );
            }
        }
    }
    Ok(ExitCode::Success)
}
