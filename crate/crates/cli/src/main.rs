use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wayfind::floorplan::{parse_scenario_bytes, Scenario, ScenarioError};
use wayfind::render::render_svg;
use wayfind::sim::{run_batch, Outcome, RunParams, RunResult, DEFAULT_DT, DEFAULT_STEP_LIMIT};

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUN: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "wayfind", version, about = "Deterministic wayfinding simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a scenario file.
    Validate { path: PathBuf },
    /// Simulate every agent and write a JSON dump and a CSV trajectory per agent.
    Run {
        path: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Draw the plan, goal ellipses and optionally a recorded run as SVG.
    Render {
        path: PathBuf,
        /// Run dump written by `wayfind run`.
        #[arg(long)]
        run: Option<PathBuf>,
        /// SVG file to write; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunOpts {
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
    step_limit: u64,
    /// Boundary samples per goal ellipse, for every agent.
    #[arg(long)]
    ellipse_samples: Option<usize>,
    #[arg(long)]
    no_circulation_preference: bool,
    /// Reserved; runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

/// Error carrying the process exit status.
struct Failure(u8, anyhow::Error);

trait ExitWith<T> {
    fn exit_with(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ExitWith<T> for Result<T, E> {
    fn exit_with(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure(code, e.into()))
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let bytes = fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .exit_with(EXIT_IO)?;
    parse_scenario_bytes(&bytes).map_err(|e| Failure(EXIT_VALIDATION, describe(path, &e)))
}

fn describe(path: &Path, e: &ScenarioError) -> anyhow::Error {
    match e {
        ScenarioError::Invalid(issues) => {
            let lines: Vec<String> = issues.iter().map(|i| format!("  {i}")).collect();
            anyhow::anyhow!("{} is invalid:\n{}", path.display(), lines.join("\n"))
        }
        other => anyhow::anyhow!("{}: {other}", path.display()),
    }
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, contents)
        .with_context(|| format!("cannot write {}", path.display()))
        .exit_with(EXIT_IO)
}

fn validate(path: &Path) -> Result<u8, Failure> {
    let sc = load(path)?;
    println!(
        "OK: {} rooms, {} doors, {} agents",
        sc.plan.rooms().len(),
        sc.plan.doors().len(),
        sc.agents.len()
    );
    Ok(0)
}

fn run(path: &Path, opts: &RunOpts, out: &Path) -> Result<u8, Failure> {
    let mut sc = load(path)?;
    if !(opts.dt > 0.0 && opts.dt.is_finite()) {
        return Err(Failure(EXIT_VALIDATION, anyhow::anyhow!("--dt must be positive, got {}", opts.dt)));
    }
    if opts.ellipse_samples.is_some_and(|n| n < 8) {
        return Err(Failure(EXIT_VALIDATION, anyhow::anyhow!("--ellipse-samples must be at least 8")));
    }
    for a in &mut sc.agents {
        if let Some(n) = opts.ellipse_samples {
            a.strategy.n_ellipse_samples = n;
        }
        if opts.no_circulation_preference {
            a.strategy.use_circulation_preference = false;
        }
    }
    let params = RunParams {
        dt: opts.dt,
        step_limit: opts.step_limit,
    };
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create {}", out.display()))
        .exit_with(EXIT_IO)?;
    let jobs: Vec<_> = sc.agents.iter().map(|a| (&sc.plan, a)).collect();
    let mut status = 0;
    for (res, spec) in run_batch(&jobs, &params).into_iter().zip(&sc.agents) {
        let res: RunResult = res
            .with_context(|| format!("agent {}", spec.id))
            .exit_with(EXIT_RUN)?;
        let dump = serde_json::to_string_pretty(&res).exit_with(EXIT_IO)? + "\n";
        write(&out.join(format!("{}.run.json", res.agent_id)), dump)?;
        write(&out.join(format!("{}.csv", res.agent_id)), res.trajectory_csv())?;
        println!("{}", res.summary_line());
        if res.outcome != Outcome::Exited {
            status = EXIT_RUN;
        }
    }
    Ok(status)
}

fn render(path: &Path, run: Option<&Path>, out: Option<&Path>) -> Result<u8, Failure> {
    let sc = load(path)?;
    let dump: Option<RunResult> = match run {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("cannot read {}", p.display()))
                .exit_with(EXIT_IO)?;
            Some(
                serde_json::from_str(&text)
                    .with_context(|| format!("{} is not a run dump", p.display()))
                    .exit_with(EXIT_VALIDATION)?,
            )
        }
        None => None,
    };
    // goals of the rendered agent, or of every agent for a plan-only figure
    let goals: Vec<_> = sc
        .agents
        .iter()
        .filter(|a| dump.as_ref().is_none_or(|d| d.agent_id == a.id))
        .flat_map(|a| a.goal_ellipses.iter().cloned())
        .collect();
    let svg = render_svg(&sc.plan, &goals, dump.as_ref());
    match out {
        Some(p) => write(p, svg)?,
        None => print!("{svg}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    // usage errors share the validation status so 2 always means a failed run
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_VALIDATION } else { 0 });
        }
    };
    let res = match &cli.cmd {
        Cmd::Validate { path } => validate(path),
        Cmd::Run { path, opts, out } => run(path, opts, out),
        Cmd::Render { path, run, out } => render(path, run.as_deref(), out.as_deref()),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
