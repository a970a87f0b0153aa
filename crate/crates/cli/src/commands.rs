use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use gmgd::large_jumps::acceptance_rate;
use gmgd::process::{Component, Simulator};
use gmgd::spectral::AtomSet;
use gmgd::validation::{convergence_check, default_time_grid, moment_studies, write_convergence_csv, StudyTarget};
use gmgd::{GmgdSpec, RadialLaw, SimulationConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cli::{AcceptanceArgs, ComponentArg, ConvergenceArgs, Format, Preset, SimArgs, SimulateArgs, SpecArgs, StudyArgs, TargetArg};
use crate::manifest::RunManifest;
use crate::UsageError;

pub fn load_spec(args: &SpecArgs) -> Result<GmgdSpec> {
    match (&args.spec, args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read spec file {}: {e}", path.display())))?;
            serde_json::from_str(&text).with_context(|| format!("malformed spec file {}", path.display()))
        }
        (None, Some(Preset::PaperStudy) | None) => Ok(GmgdSpec::circle_study(30)?),
    }
}

fn config(sim: &SimArgs) -> SimulationConfig {
    SimulationConfig {
        epsilon: sim.epsilon,
        horizon: sim.horizon,
        shot_noise_k: sim.shot_noise_k,
        beta: sim.beta,
        seed: sim.seed,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn finish<P: Serialize>(
    command: &str,
    params: &P,
    spec: Option<&GmgdSpec>,
    seed: u64,
    started: Instant,
    dir: &Path,
    outputs: Vec<PathBuf>,
) -> Result<()> {
    let manifest = RunManifest {
        command: command.to_string(),
        parameters: serde_json::to_value(params)?,
        spec: spec.cloned(),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: started.elapsed().as_secs_f64(),
        outputs,
    };
    let path = manifest.write(dir)?;
    println!("manifest: {}", path.display());
    Ok(())
}

pub fn simulate(args: &SimulateArgs, spec: &GmgdSpec) -> Result<()> {
    let started = Instant::now();
    let sim = Simulator::new(spec, config(&args.sim))?;
    let component = match args.component {
        ComponentArg::Full => Component::Full,
        ComponentArg::LargeJumps => Component::LargeJumps,
        ComponentArg::SmallJumps => Component::SmallJumps,
    };
    if args.paths == 0 {
        return Err(UsageError("-N must be at least 1".into()).into());
    }
    let dir = &args.output.out;
    create_dir(dir)?;
    let ext = args.output.format.extension();
    let mut outputs = Vec::new();
    for rep in 0..args.paths {
        let path = sim.sample_path(rep, component)?;
        let name = if args.paths == 1 { format!("path.{ext}") } else { format!("path_{rep:05}.{ext}") };
        let file = dir.join(name);
        match args.output.format {
            Format::Csv => write_file(&file, |w| Ok(path.write_csv(w)?))?,
            Format::Json => write_json(&file, &path)?,
        }
        println!("{}: {} jumps", file.display(), path.num_jumps());
        outputs.push(file);
    }
    finish("simulate", args, Some(spec), args.sim.seed, started, dir, outputs)
}

pub fn study(args: &StudyArgs, spec: &GmgdSpec) -> Result<()> {
    let started = Instant::now();
    let cfg = config(&args.sim);
    cfg.validate()?;
    if args.times == 0 {
        return Err(UsageError("--times must be at least 1".into()).into());
    }
    let mut targets = vec![match args.target {
        TargetArg::LargeJumps => StudyTarget::LargeJumps,
        TargetArg::FullProcess => StudyTarget::FullProcess,
    }];
    if args.compare_drop_small_jumps {
        targets.push(StudyTarget::DropSmallJumps);
    }
    let times = default_time_grid(cfg.horizon, args.times);
    let reports = moment_studies(spec, &cfg, args.replications, &times, &targets)?;
    let dir = &args.output.out;
    create_dir(dir)?;
    let mut outputs = Vec::new();
    for report in &reports {
        let name = match report.target {
            StudyTarget::LargeJumps => "large-jumps",
            StudyTarget::FullProcess => "full-process",
            StudyTarget::DropSmallJumps => "drop-small-jumps",
        };
        let file = dir.join(format!("study_{name}.{}", args.output.format.extension()));
        match args.output.format {
            Format::Csv => write_file(&file, |w| Ok(report.write_csv(w)?))?,
            Format::Json => write_json(&file, report)?,
        }
        let last = report.rows.last().expect("nonempty time grid");
        println!("{name}: TotalError({}) = {:.6} ({})", last.t, last.total_error, file.display());
        outputs.push(file);
    }
    finish("study", args, Some(spec), args.sim.seed, started, dir, outputs)
}

pub fn parse_sector(text: &str) -> Result<AtomSet> {
    match text.trim() {
        "all" => Ok(AtomSet::All),
        "none" | "" => Ok(AtomSet::none()),
        list => {
            let indices = list
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| UsageError(format!("--sector expects none, all or atom indices, got {list:?}")))?;
            Ok(AtomSet::Indices(indices))
        }
    }
}

pub fn check_convergence(args: &ConvergenceArgs, spec: &GmgdSpec) -> Result<()> {
    let started = Instant::now();
    let sector = parse_sector(&args.sector)?;
    sector
        .validate(spec.spectral())
        .map_err(|e| UsageError(format!("--sector: {e}")))?;
    let p_test = args.p_test.unwrap_or(spec.p());
    let points = convergence_check(spec, &sector, p_test, &args.epsilons)?;
    let dir = &args.output.out;
    create_dir(dir)?;
    let file = dir.join(format!("convergence.{}", args.output.format.extension()));
    match args.output.format {
        Format::Csv => write_file(&file, |w| Ok(write_convergence_csv(&points, w)?))?,
        Format::Json => write_json(&file, &points)?,
    }
    for pt in &points {
        println!("epsilon {:e}: ratio {:.12}", pt.epsilon, pt.ratio);
    }
    finish("check-convergence", args, Some(spec), 0, started, dir, vec![file])
}

#[derive(Serialize)]
struct AcceptanceReport {
    a: f64,
    p: f64,
    beta: f64,
    trials: u64,
    sampler: &'static str,
    rate: f64,
    exact: f64,
}

pub fn acceptance(args: &AcceptanceArgs) -> Result<()> {
    let started = Instant::now();
    let law = RadialLaw::new(args.a, args.p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let rate = acceptance_rate(&law, args.beta, args.trials, &mut rng)?;
    let report = AcceptanceReport {
        a: args.a,
        p: args.p,
        beta: args.beta,
        trials: args.trials,
        sampler: if law.uses_shifted_proposal() { "shifted-weibull" } else { "mixture" },
        rate,
        exact: law.acceptance_probability(args.beta),
    };
    println!("acceptance rate {:.6} over {} rounds (exact {:.6}, {} proposal)", rate, args.trials, report.exact, report.sampler);
    if let Some(dir) = &args.out {
        create_dir(dir)?;
        let file = dir.join("acceptance.json");
        write_json(&file, &report)?;
        finish("acceptance", args, None, args.seed, started, dir, vec![file])?;
    }
    Ok(())
}

pub fn ensure_positive_threads(n: usize) -> Result<()> {
    if n == 0 {
        bail!(UsageError("--threads must be at least 1".into()));
    }
    Ok(())
}
