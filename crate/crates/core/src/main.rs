use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fdsic::bias::monte_carlo_bias;
use fdsic::budget::image_crossover;
use fdsic::harness::output::{run_budget, write_bias, write_grid, write_manifest, write_tx_sweep};
use fdsic::harness::{run_mn_grid, run_tx_power_sweep, ExperimentConfig};
use fdsic::{Error, Result, RngSeed};

/// Full-duplex transceiver simulator with widely-linear digital SI
/// cancellation.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form power budget over the transmit power range.
    Budget(Common),
    /// Monte-Carlo SINR and attenuation against transmit power.
    SweepTx(Common),
    /// Monte-Carlo SINR and attenuation over filter and training length.
    SweepMn(Common),
    /// Estimator bias from PA intermodulation, analytic against Monte-Carlo.
    Bias(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; missing keys take the preset's values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named scenario used when no config file is given.
    #[arg(long, default_value = "baseline")]
    preset: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<(ExperimentConfig, PathBuf)> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                ExperimentConfig::from_toml(&text)?
            }
            None => ExperimentConfig::preset(&self.preset)?,
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(r) = self.realizations {
            cfg.realizations = r;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.display().to_string();
        }
        cfg.validate()?;
        let dir = PathBuf::from(&cfg.output_dir);
        Ok((cfg, dir))
    }
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn finish(cfg: &ExperimentConfig, command: &str, mut files: Vec<PathBuf>, dir: &Path) -> Result<()> {
    files.push(write_manifest(cfg, command, &files, dir)?);
    report(&files);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Budget(c) => {
            let (cfg, dir) = c.resolve()?;
            let (sweep, files) = run_budget(&cfg, &dir)?;
            match image_crossover(&sweep) {
                Some(tx) => println!("conjugate SI reaches the signal of interest at {tx:.2} dBm"),
                None => println!("conjugate SI stays below the signal of interest"),
            }
            let (first, last) = (&sweep[0], &sweep[sweep.len() - 1]);
            println!(
                "required linear digital cancellation: {:.1} dB at {} dBm, {:.1} dB at {} dBm",
                first.required_ldc, first.tx_dbm, last.required_ldc, last.tx_dbm
            );
            finish(&cfg, "budget", files, &dir)
        }
        Command::SweepTx(c) => {
            let (cfg, dir) = c.resolve()?;
            let res = run_tx_power_sweep(&cfg)?;
            println!("{:>7} {:>9} {:>9} {:>9} {:>9}", "tx", "SINR wl", "SINR lin", "att wl", "att lin");
            for p in &res.points {
                println!(
                    "{:>7.1} {:>9.2} {:>9.2} {:>9.2} {:>9.2}",
                    p.tx_dbm, p.wl.sinr_db, p.linear.sinr_db, p.wl.attenuation_db, p.linear.attenuation_db
                );
            }
            let files = write_tx_sweep(&res, &dir)?;
            finish(&cfg, "sweep-tx", files, &dir)
        }
        Command::SweepMn(c) => {
            let (cfg, dir) = c.resolve()?;
            let res = run_mn_grid(&cfg)?;
            println!("{:>3} {:>7} {:>9} {:>9}", "M", "N", "SINR", "att");
            for p in &res.points {
                match &p.wl {
                    Some(s) => println!("{:>3} {:>7} {:>9.2} {:>9.2}", p.taps, p.training, s.sinr_db, s.attenuation_db),
                    None => println!("{:>3} {:>7} {:>9} {:>9}", p.taps, p.training, "-", "-"),
                }
            }
            let files = write_grid(&res, &dir)?;
            finish(&cfg, "sweep-mn", files, &dir)
        }
        Command::Bias(c) => {
            let (cfg, dir) = c.resolve()?;
            let b = &cfg.bias;
            let rep = monte_carlo_bias(&cfg.system, b.samples, b.trials, RngSeed(cfg.seed), b.signal)
                .map_err(|e| e.in_scenario(&cfg.scenario))?;
            println!("relative disagreement between empirical and analytic bias: {:.4}", rep.agreement);
            let files = write_bias(&rep, &dir)?;
            finish(&cfg, "bias", files, &dir)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
