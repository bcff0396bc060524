use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use softlayer::config::{PotentialSpec, RunConfig, SurfaceSpec, Task};
use softlayer::{report, run, Error, Result};

/// Soft quantum layer lab: geometry, transverse threshold, bound-state
/// certificates and discretized spectra.
#[derive(Debug, Parser)]
#[command(name = "softlayer", version)]
struct Cli {
    #[arg(value_enum)]
    task: Task,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; for `report`, the directory to consolidate.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// `plane`, `cap_cone:R,THETA`, `paraboloid:C` or `tabulated:PATH`.
    #[arg(long)]
    surface: Option<String>,
    /// `delta:ALPHA`, `square_well:W0,A` or `sampled:PATH`.
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    m: Option<u32>,
    /// Truncation in s; a comma-separated list for `sweep`.
    #[arg(long = "S")]
    s_end: Option<String>,
    #[arg(long = "T")]
    t_half: Option<f64>,
    #[arg(long)]
    hs: Option<f64>,
    #[arg(long)]
    ht: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("--S: cannot parse '{x}'"))))
        .collect()
}

fn configure(cli: &Cli) -> Result<(RunConfig, PathBuf)> {
    let (mut cfg, base) = match &cli.config {
        Some(p) => (RunConfig::load(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => {
            let (Some(s), Some(v)) = (&cli.surface, &cli.potential) else {
                return Err(Error::Invalid("either --config or both --surface and --potential are required".into()));
            };
            (RunConfig::new(SurfaceSpec::parse_flag(s)?, PotentialSpec::parse_flag(v)?), PathBuf::from("."))
        }
    };
    if let Some(t) = cfg.task {
        if t != cli.task {
            return Err(Error::Invalid(format!("config is for task '{}', not '{}'", t.name(), cli.task.name())));
        }
    }
    if cli.config.is_some() {
        if let Some(s) = &cli.surface {
            cfg.surface = SurfaceSpec::parse_flag(s)?;
        }
        if let Some(v) = &cli.potential {
            cfg.potential = PotentialSpec::parse_flag(v)?;
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(s) = &cli.s_end {
        let list = parse_list(s)?;
        match cli.task {
            Task::Sweep => cfg.sweep.s_list = list,
            _ if list.len() == 1 => {
                cfg.spectrum.s_end = list[0];
                cfg.geometry.s_end = list[0];
            }
            _ => return Err(Error::Invalid("--S takes a single value outside sweep".into())),
        }
    }
    for g in [&mut cfg.spectrum.grid, &mut cfg.sweep.grid] {
        if let Some(m) = cli.m {
            g.m = m;
        }
        if let Some(t) = cli.t_half {
            g.t_half = t;
        }
        if let Some(h) = cli.hs {
            g.h_s = h;
        }
        if let Some(h) = cli.ht {
            g.h_t = h;
        }
        if let Some(k) = cli.k {
            g.k = k;
        }
        if let Some(t) = cli.tol {
            g.tol = t;
        }
    }
    cfg.validate()?;
    Ok((cfg, base))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = if cli.task == Task::Report {
        let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
        report::merge(&dir).map(|rows| eprintln!("[softlayer] merged {} reports into {}", rows.len(), dir.display()))
    } else {
        configure(&cli).and_then(|(cfg, base)| {
            let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
            run::run(cli.task, &cfg, &base, &out)
        })
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("softlayer: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
