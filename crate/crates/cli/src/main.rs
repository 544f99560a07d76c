use clap::{Args, Parser, Subcommand};
use perforated::config::RunConfig;
use perforated::harness::{
    a_tag, background_for, equivalent_h, run_convergence_with, run_design, run_equivalent, run_simulate, sphere,
    validation_suite, OutputDir, RowArtifacts, RunManifest,
};
use perforated::{Error, Result};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "perforated", version, about = "Scattering by many small impedance holes in a heterogeneous medium")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Foldy-Lax far field for one configuration.
    Simulate(Common),
    /// Far field of the equivalent medium.
    Equivalent {
        #[command(flatten)]
        common: Common,
        /// Also evaluate the far field through the background reciprocity route.
        #[arg(long)]
        reciprocity: bool,
    },
    /// Convergence sweep over a.
    Converge(Common),
    /// Effective index and cloak schedule.
    Design(Common),
    /// Run the oracle suite.
    Validate {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated values of a; a single value for simulate.
    #[arg(long, value_delimiter = ',')]
    a: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::from_path(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(a) = &self.a {
            cfg.a_list = a.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// The single `a` of a one-shot run.
    fn single_a(&self, cfg: &RunConfig) -> Result<f64> {
        match self.a.as_deref() {
            None => Ok(cfg.regime.a),
            Some([a]) => Ok(*a),
            Some(v) => Err(Error::Config(format!("expected one value for --a, got {}", v.len()))),
        }
    }
}

fn set_threads(n: Option<usize>) -> Result<Option<usize>> {
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(n)
}

fn simulate(c: &Common) -> Result<()> {
    let threads = set_threads(c.threads)?;
    let base = c.load()?;
    let a = c.single_a(&base)?;
    let cfg = base.with_a(a);
    let sph = sphere(&cfg)?;
    let (bg, bg_h) = background_for(&cfg, a)?;
    let run = run_simulate(&cfg, &bg, &sph)?;
    let mut out = OutputDir::create(&c.out)?;
    let tag = a_tag(a);
    out.write(&format!("farfield_{tag}.csv"), |w| run.output.far_field.write_csv(w))?;
    out.write(&format!("placement_{tag}.csv"), |w| run.set.write_csv(w))?;
    out.json(
        "report.json",
        &json!({
            "a": a,
            "m": run.set.len(),
            "d": run.set.min_distance,
            "sup_far": run.output.far_field.sup_norm(),
            "invertibility": run.invertibility,
        }),
    )?;
    let mut manifest = RunManifest::new("simulate", &cfg);
    manifest.background_h = bg_h;
    manifest.threads = threads;
    out.finish(manifest)
}

fn equivalent(c: &Common, reciprocity: bool) -> Result<()> {
    let threads = set_threads(c.threads)?;
    let base = c.load()?;
    let a = c.single_a(&base)?;
    let cfg = base.with_a(a);
    let h = equivalent_h(&cfg, a);
    let run = run_equivalent(&cfg, h, &sphere(&cfg)?, reciprocity)?;
    let mut out = OutputDir::create(&c.out)?;
    out.write("farfield_equivalent.csv", |w| run.far_field.write_csv(w))?;
    out.json("report.json", &json!({ "run": run, "sup_far": run.far_field.sup_norm() }))?;
    let mut manifest = RunManifest::new("equivalent", &cfg);
    manifest.equivalent_h = Some(run.h);
    manifest.threads = threads;
    out.finish(manifest)
}

fn converge(c: &Common) -> Result<()> {
    let threads = set_threads(c.threads)?;
    let cfg = c.load()?;
    let mut out = OutputDir::create(&c.out)?;
    let report = run_convergence_with(&cfg, &cfg.a_list, |r: RowArtifacts<'_>| {
        let tag = a_tag(r.a);
        out.write(&format!("farfield_{tag}.csv"), |w| r.far_field.write_csv(w))?;
        out.write(&format!("placement_{tag}.csv"), |w| r.set.write_csv(w))
    })?;
    out.json("report.json", &report)?;
    for row in report.rows.iter().filter(|r| !r.is_ok()) {
        log::warn!("a = {}: {}", row.a, row.status);
    }
    let mut manifest = RunManifest::new("converge", &cfg);
    manifest.equivalent_h = report.equivalent_h;
    manifest.background_h = report.background_h;
    manifest.threads = threads;
    out.finish(manifest)
}

fn design(c: &Common) -> Result<()> {
    let threads = set_threads(c.threads)?;
    let base = c.load()?;
    let cfg = base.with_a(c.single_a(&base)?);
    let run = run_design(&cfg)?;
    let mut out = OutputDir::create(&c.out)?;
    out.write("index.csv", |w| run.index.write_csv(w))?;
    out.write("cloak_schedule.csv", |w| perforated::equivalent::write_schedule_csv(&run.set, &run.schedule, w))?;
    out.write(&format!("placement_{}.csv", a_tag(cfg.regime.a)), |w| run.set.write_csv(w))?;
    out.json("report.json", &run.summary)?;
    let mut manifest = RunManifest::new("design", &cfg);
    manifest.threads = threads;
    out.finish(manifest)
}

fn validate(out: &PathBuf, threads: Option<usize>) -> Result<bool> {
    let threads = set_threads(threads)?;
    let checks = validation_suite();
    for c in &checks {
        println!("{} {}: {:.3e} (tolerance {:.1e}) {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance, c.detail);
    }
    let mut dir = OutputDir::create(out)?;
    dir.json("report.json", &checks)?;
    let mut manifest = RunManifest::new("validate", &RunConfig::default());
    manifest.threads = threads;
    dir.finish(manifest)?;
    Ok(checks.iter().all(|c| c.passed))
}

/// 1 for problems with the input, 2 for numerical failures.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Geometry(_) => 1,
        e if e.is_config() => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Simulate(c) => simulate(c),
        Command::Equivalent { common, reciprocity } => equivalent(common, *reciprocity),
        Command::Converge(c) => converge(c),
        Command::Design(c) => design(c),
        Command::Validate { out, threads } => match validate(out, *threads) {
            Ok(true) => Ok(()),
            Ok(false) => {
                eprintln!("error: validation checks failed");
                return ExitCode::from(2);
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
