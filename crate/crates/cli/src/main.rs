use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use ymblow_cli::commands::{self, Finished};
use ymblow_cli::config::{self, Level, PerturbationSpec, Suite};
use ymblow_cli::{classify, Failure};

/// Self-similar blowup of equivariant Yang-Mills fields in dimensions d >= 5.
#[derive(Parser, Debug)]
#[command(name = "ymblow", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON configuration; defaults are used for missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory that receives the run directory.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    /// Overrides the dimension d of the configuration.
    #[arg(long)]
    d: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the model constants for dimension d.
    Params {
        #[arg(long)]
        d: u32,
    },
    /// Evolve the radial equation in physical variables and fit the blowup.
    EvolvePhys {
        #[command(flatten)]
        common: Common,
        /// Seed of a perturbed-data configuration.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evolve in similarity variables.
    EvolveSim {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Select the blowup time of perturbed profile data.
    Modulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// `zero` for unperturbed profile data.
        #[arg(long)]
        v: Option<String>,
    },
    /// Count eigenvalues of the linearized operator in a box.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Box as `re_min,re_max,im_min,im_max`.
        #[arg(long = "box", value_delimiter = ',', allow_negative_numbers = true)]
        scan_box: Option<Vec<f64>>,
    },
    /// Randomized checks of the functional inequalities.
    Inequalities {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
    },
    /// Run the acceptance criteria.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        level: Option<Level>,
    },
}

fn report(f: &Finished) {
    println!("{}: {}", f.record.dir.display(), f.status);
}

fn run(cli: Cli) -> Result<i32> {
    let finished = match cli.command {
        Command::Params { d } => {
            print!("{}", commands::params(d)?);
            return Ok(0);
        }
        Command::EvolvePhys { common, seed } => {
            let mut cfg: config::PhysRunConfig = config::load(common.config.as_deref())?;
            cfg.d = common.d.unwrap_or(cfg.d);
            if let (Some(s), config::PhysData::Perturbed { seed, .. }) = (seed, &mut cfg.data) {
                *seed = s;
            }
            commands::evolve_phys(&cfg, &common.out)?
        }
        Command::EvolveSim { common, seed } => {
            let mut cfg: config::SimRunConfig = config::load(common.config.as_deref())?;
            cfg.d = common.d.unwrap_or(cfg.d);
            if let (Some(s), config::SimData::Seeded { seed, .. }) = (seed, &mut cfg.data) {
                *seed = s;
            }
            commands::evolve_sim(&cfg, &common.out)?
        }
        Command::Modulate { common, seed, v } => {
            let mut cfg: config::ModulateConfig = config::load(common.config.as_deref())?;
            cfg.d = common.d.unwrap_or(cfg.d);
            match v.as_deref() {
                None => {}
                Some("zero") => cfg.perturbation = PerturbationSpec::Zero,
                Some(other) => {
                    return Err(Failure::usage("argument", format!("--v accepts only `zero`, got {other:?}")).into())
                }
            }
            if let (Some(s), PerturbationSpec::Seeded { seed, .. }) = (seed, &mut cfg.perturbation) {
                *seed = s;
            }
            commands::modulate_cmd(&cfg, &common.out)?
        }
        Command::Spectrum { common, scan_box } => {
            let mut cfg: config::SpectrumConfig = config::load(common.config.as_deref())?;
            cfg.d = common.d.unwrap_or(cfg.d);
            if let Some(b) = scan_box {
                if b.len() != 4 {
                    return Err(Failure::usage("argument", format!("--box takes 4 numbers, got {}", b.len())).into());
                }
                cfg.scan_box = [b[0], b[1], b[2], b[3]];
                config::RunConfig::validate(&cfg)?;
            }
            commands::spectrum(&cfg, &common.out)?
        }
        Command::Inequalities { common, seed, suite } => {
            let mut cfg: config::InequalityConfig = config::load(common.config.as_deref())?;
            cfg.d = common.d.unwrap_or(cfg.d);
            cfg.harness.seed = seed.unwrap_or(cfg.harness.seed);
            cfg.suite = suite.unwrap_or(cfg.suite);
            commands::inequalities(&cfg, &common.out)?
        }
        Command::Verify { config, out, seed, level } => {
            let mut cfg: config::VerifyConfig = config::load(config.as_deref())?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.level = level.unwrap_or(cfg.level);
            commands::verify(&cfg, &out, |t| eprintln!("{} ({:.1} s)", commands::criterion_line(&t.report), t.seconds))?
        }
    };
    report(&finished);
    Ok(finished.exit_code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let (code, reason) = classify(&e);
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error[{reason}]: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
