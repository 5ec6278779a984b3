use clap::Parser;
use stargraph_cli::{run, Example, ProblemFile, RunOptions, Task};
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectral multiplicity of Schrödinger operators on star graphs.
#[derive(Parser, Debug)]
#[command(name = "stargraph", version)]
struct Args {
    /// What to compute.
    #[arg(value_enum)]
    task: Task,
    /// Problem file (JSON). Optional when a built-in example is named.
    problem: Option<PathBuf>,
    /// Built-in example system.
    #[arg(long, value_enum)]
    example: Option<Example>,
    /// Spectral window.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    window: Option<Vec<f64>>,
    /// Largest ε of the boundary-limit schedule; also the plot height.
    #[arg(long)]
    eps0: Option<f64>,
    /// Number of halvings of ε.
    #[arg(long)]
    eps_steps: Option<usize>,
    /// Grid size: sample points for tables, nodes per edge for the oracle.
    #[arg(long)]
    grid: Option<usize>,
    /// Require exact representations for every edge.
    #[arg(long)]
    exact: bool,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sampling.
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed of the built-in random suites.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let problem = match (&args.problem, args.example) {
        (Some(path), ex) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            };
            match ProblemFile::parse(&text) {
                Ok(mut p) => {
                    if ex.is_some() {
                        p.example = ex;
                    }
                    p
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
        }
        (None, Some(ex)) => ProblemFile::example(ex),
        (None, None) => ProblemFile::default(),
    };
    let opts = RunOptions {
        window: args.window.as_ref().map(|w| (w[0], w[1])),
        eps0: args.eps0,
        eps_steps: args.eps_steps,
        grid: args.grid,
        exact: args.exact,
        jobs: args.jobs,
        seed: args.seed,
    };
    match run(args.task, &problem, &opts, &args.out) {
        Ok(outcome) => {
            for a in &outcome.artifacts {
                println!("{}", a.display());
            }
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
