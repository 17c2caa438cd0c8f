use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use shiftlyap::cocycle::Potential;
use shiftlyap::config::{parse_config, ExperimentConfig};
use shiftlyap::error::Error;
use shiftlyap::intervals::IntervalSet;
use shiftlyap::report::{
    bands_csv, out_path, scan_csv, write_json, write_text, ReportMeta, SSetPayload,
};
use shiftlyap::spectra::union_s;
use shiftlyap::symbolic::TransitionSystem;
use shiftlyap::zeros::{
    classify_candidates, compute_j, corollary_cross_check, positivity_certificate,
    run_monotonicity_experiment, scan_zero_candidates,
};

const USAGE: &str = "commands: scan-lyapunov | periodic-spectra | classify-zeros | compute-j | \
                     compare-embeddings | positivity-certificate | selftest";

/// Periodic-orbit spectra and Lyapunov zero sets for Schrödinger cocycles
/// over subshifts of finite type.
#[derive(Debug, Parser)]
#[command(name = "shiftlyap", version, after_help = USAGE)]
struct Cli {
    /// Configuration file (TOML); defaults describe the bundled golden-mean
    /// example when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Command to run.
    #[arg(long)]
    command: String,
    /// Override the base seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the orbit-period truncation from the config.
    #[arg(long)]
    max_period: Option<usize>,
    /// Override the output directory from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Resource(_) => ExitCode::from(3),
                Error::Io { .. } => ExitCode::from(2),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(mp) = cli.max_period {
        cfg.max_period = mp;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.display().to_string();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    if cli.command == "selftest" {
        return selftest();
    }
    let cfg = load_config(cli)?;
    let meta = ReportMeta::from_config(&cfg);
    match cli.command.as_str() {
        "scan-lyapunov" => {
            let scan = scan_zero_candidates(
                &cfg.potential,
                &cfg.measure,
                &cfg.grid(),
                &cfg.estimator_params(),
                cfg.theta,
            )?;
            let path = out_path(&cfg.out_dir, "scan.csv");
            write_text(&path, &scan_csv(&scan.estimates))?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        "periodic-spectra" => {
            let union = union_s(&cfg.system, &cfg.potential, cfg.max_period)?;
            let csv_path = out_path(&cfg.out_dir, "bands.csv");
            write_text(&csv_path, &bands_csv(&union, &cfg.alphabet))?;
            let json_path = out_path(&cfg.out_dir, "s_set.json");
            write_json(&json_path, &meta, &SSetPayload::from_union(&union))?;
            println!("wrote {} and {}", csv_path.display(), json_path.display());
            Ok(ExitCode::SUCCESS)
        }
        "classify-zeros" => {
            let union = union_s(&cfg.system, &cfg.potential, cfg.max_period)?;
            let mut scan = scan_zero_candidates(
                &cfg.potential,
                &cfg.measure,
                &cfg.grid(),
                &cfg.estimator_params(),
                cfg.theta,
            )?;
            let orbits: Vec<_> = union.per_orbit.iter().map(|o| o.orbit.clone()).collect();
            classify_candidates(&mut scan, &orbits, &cfg.potential, cfg.tol_delta)?;
            corollary_cross_check(&scan.candidates, &orbits, &cfg.potential, cfg.tol_delta)?;
            let path = out_path(&cfg.out_dir, "candidates.json");
            write_json(&path, &meta, &scan.candidates)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        "compute-j" => {
            let union = union_s(&cfg.system, &cfg.potential, cfg.max_period)?;
            let mut scan = scan_zero_candidates(
                &cfg.potential,
                &cfg.measure,
                &cfg.grid(),
                &cfg.estimator_params(),
                cfg.theta,
            )?;
            let orbits: Vec<_> = union.per_orbit.iter().map(|o| o.orbit.clone()).collect();
            classify_candidates(&mut scan, &orbits, &cfg.potential, cfg.tol_delta)?;
            let zeros: Vec<f64> = scan
                .candidates
                .iter()
                .filter(|c| c.classification.is_unremovable())
                .map(|c| c.energy)
                .collect();
            let mut rep = compute_j(&zeros, &union.set, cfg.potential.sup_norm())?;
            rep.truncation_max_period = Some(cfg.max_period);
            let path = out_path(&cfg.out_dir, "j_report.json");
            write_json(&path, &meta, &rep)?;
            println!("J = {}", rep.j_value);
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        "compare-embeddings" => {
            let report = run_monotonicity_experiment(
                &cfg.embedding(),
                &cfg.measure,
                cfg.submeasure_or_measure(),
                &cfg.potential,
                &cfg.experiment_params(),
            )?;
            let path = out_path(&cfg.out_dir, "experiment.json");
            write_json(&path, &meta, &report)?;
            for a in &report.assertions {
                let status = if a.skipped {
                    "SKIP"
                } else if a.passed {
                    "PASS"
                } else {
                    "FAIL"
                };
                println!("{status} {}: {}", a.name, a.detail);
            }
            println!("wrote {}", path.display());
            Ok(if report.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        "positivity-certificate" => {
            let cert = positivity_certificate(&cfg.system, &cfg.potential);
            let path = out_path(&cfg.out_dir, "positivity.json");
            write_json(&path, &meta, &cert)?;
            println!("certificate: {}", cert.holds);
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        other => {
            eprintln!("unknown command {other:?}\n{USAGE}");
            Ok(ExitCode::from(2))
        }
    }
}

/// A quick built-in verification pass over the bundled examples.
fn selftest() -> Result<ExitCode, Error> {
    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool| {
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    let full = TransitionSystem::full_shift(2);
    let gm = TransitionSystem::golden_mean();
    check(
        "orbit-enumeration",
        full.enumerate_periodic_orbits(3)?.len() == 5
            && gm.enumerate_periodic_orbits(2)?.len() == 2,
    );

    let v = Potential::from_symbol_values(&full, &[0.0, 0.0])?;
    let u = union_s(&full, &v, 1)?;
    check("band-union", (u.set.measure() - 4.0).abs() < 1e-9);

    let s = IntervalSet::from_intervals(vec![(-2.0, 0.0), (0.0, 2.0)]);
    let rep = compute_j(&[], &s, 0.0)?;
    check("j-fixture", (rep.j_value + 0.639032).abs() < 1e-5);

    let v01 = Potential::from_symbol_values(&full, &[0.0, 1.0])?;
    check("positivity", positivity_certificate(&full, &v01).holds);

    let cfg = parse_config("")?;
    check("default-config", cfg.system == gm);

    if failures == 0 {
        println!("selftest: all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("selftest: {failures} check(s) failed");
        Ok(ExitCode::from(1))
    }
}
