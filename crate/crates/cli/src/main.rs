//! Batch experiment driver: simulation runs, convergence studies,
//! Newton-vs-Picard comparisons, and snapshot metrics.

mod config;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{load_experiment, parse_method, Experiment, Overrides};
use surfdiff::flow2d::{self, EvolveOptions, SolverParams};
use surfdiff::flow3d::{self, EvolveOptions3D, PinchGuard};
use surfdiff::metrics;
use surfdiff::{Curve, Surface};

#[derive(Parser)]
#[command(
    name = "surfdiff",
    about = "Structure-preserving finite element simulation of surface diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Experiment description (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Nonlinear solver: newton or picard.
    #[arg(long)]
    method: Option<String>,
    /// Time step size.
    #[arg(long)]
    tau: Option<f64>,
    /// Final time.
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Comma-separated snapshot times.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment: trace CSV, snapshots and a summary.
    Simulate(RunArgs),
    /// Convergence study: run a sequence of refined resolutions and compare
    /// consecutive ones with the manifold distance.
    Converge {
        #[command(flatten)]
        run: RunArgs,
        /// Number of error rows; needs `levels + 1` runs.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Comparison times (default: t_end).
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Run Newton and Picard on the same experiment; emit per-step counts.
    CompareIters(RunArgs),
    /// Manifold distance between two snapshot files (both 2D or both 3D).
    Metrics { file_a: PathBuf, file_b: PathBuf },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(args) => simulate(&args),
        Command::Converge { run, levels, times } => converge(&run, levels, times),
        Command::CompareIters(args) => compare_iters(&args),
        Command::Metrics { file_a, file_b } => metrics_cmd(&file_a, &file_b),
    }
}

fn overrides(args: &RunArgs) -> Overrides {
    Overrides {
        out: args.out.clone(),
        method: args.method.clone(),
        tau: args.tau,
        t_end: args.t_end,
        snapshots: args.snapshots.clone(),
    }
}

fn solver_params(exp: &Experiment) -> SolverParams<f64> {
    let mut params = SolverParams::new(exp.tau);
    params.tol = exp.tol;
    params.max_iters = exp.max_iters;
    params.method = exp.method;
    params
}

fn snapshot_path(dir: &Path, t: f64, ext: &str) -> PathBuf {
    dir.join(format!("snapshot_t{t:.6}.{ext}"))
}

fn simulate(args: &RunArgs) -> Result<()> {
    let exp = load_experiment(&args.config, &overrides(args))?;
    fs::create_dir_all(&exp.output_dir)
        .with_context(|| format!("creating {}", exp.output_dir.display()))?;
    let params = solver_params(&exp);
    let mut summary = String::new();

    if exp.dimension == 2 {
        let curve = exp.shape.build_curve::<f64>()?;
        let options = EvolveOptions {
            t_end: exp.t_end,
            snapshot_times: exp.snapshot_times.clone(),
            stop_when_increment_below: None,
        };
        let run = flow2d::evolve(curve, &params, &options)?;
        let trace_path = exp.output_dir.join("trace.csv");
        run.trace.write_csv(fs::File::create(&trace_path)?)?;
        for (t, curve) in &run.snapshots {
            curve.save(snapshot_path(&exp.output_dir, *t, "curve"))?;
        }
        let first = run.trace.rows.first().expect("trace has the initial row");
        let last = run.trace.rows.last().expect("trace is nonempty");
        let mean_iters = mean_iterations(run.trace.rows.iter().map(|r| r.iterations));
        summary.push_str(&format!(
            "t_final = {:.6}\narea_final = {:.12e}\nperimeter_final = {:.12e}\n\
             rel_area_change = {:.3e}\nnormalized_perimeter = {:.12}\nmri_final = {:.6}\n\
             mean_iterations = {:.3}\n",
            last.t,
            last.area,
            last.perimeter,
            last.rel_area_loss,
            last.perimeter / first.perimeter,
            last.mri,
            mean_iters,
        ));
    } else {
        let surface = exp.shape.build_surface::<f64>()?;
        let guard = match exp.pinch_guard_ratio {
            Some(r) => Some(PinchGuard::new(r).map_err(anyhow::Error::from)?),
            None => Some(PinchGuard::default()),
        };
        let options = EvolveOptions3D {
            t_end: exp.t_end,
            snapshot_times: exp.snapshot_times.clone(),
            guard,
        };
        let run = flow3d::evolve_3d(surface, &params, &options)?;
        let trace_path = exp.output_dir.join("trace.csv");
        run.trace.write_csv(fs::File::create(&trace_path)?)?;
        for (t, surface) in &run.snapshots {
            surface.save(snapshot_path(&exp.output_dir, *t, "surf"))?;
        }
        let last = run.trace.rows.last().expect("trace is nonempty");
        let mean_iters = mean_iterations(run.trace.rows.iter().map(|r| r.iterations));
        summary.push_str(&format!(
            "t_final = {:.6}\nvolume_final = {:.12e}\nsurface_area_final = {:.12e}\n\
             rel_volume_change = {:.3e}\nmean_iterations = {:.3}\n",
            last.t, last.volume, last.surface_area, last.rel_volume_loss, mean_iters,
        ));
        match run.pinch_event {
            Some(e) => summary.push_str(&format!(
                "pinch_off_time = {:.6}\npinch_min_ratio = {:.3e}\n",
                e.time, e.ratio
            )),
            None => summary.push_str("pinch_off_time = none\n"),
        }
    }

    fs::write(exp.output_dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn mean_iterations(counts: impl Iterator<Item = usize>) -> f64 {
    let mut total = 0usize;
    let mut steps = 0usize;
    for c in counts {
        if c > 0 {
            total += c;
            steps += 1;
        }
    }
    if steps == 0 {
        0.0
    } else {
        total as f64 / steps as f64
    }
}

fn converge(args: &RunArgs, levels: usize, times: Option<Vec<f64>>) -> Result<()> {
    if levels < 1 {
        bail!("--levels must be at least 1");
    }
    let exp = load_experiment(&args.config, &overrides(args))?;
    fs::create_dir_all(&exp.output_dir)?;
    let times = times.unwrap_or_else(|| vec![exp.t_end]);
    let t_max = times.iter().cloned().fold(exp.t_end, f64::max);

    enum Snapshots {
        Curves(Vec<Curve>),
        Surfaces(Vec<Surface>),
    }
    let mut per_level: Vec<(f64, f64, Snapshots)> = Vec::new();

    for level in 0..=levels {
        let spec = exp.shape.refined(level);
        let tau = exp.tau / 4f64.powi(level as i32);
        let h = spec.mesh_size()?;
        let mut params = solver_params(&exp);
        params.tau = tau;
        eprintln!("level {level}: h = {h:.5}, tau = {tau:.5e}");
        let snaps = if exp.dimension == 2 {
            let options = EvolveOptions {
                t_end: t_max,
                snapshot_times: times.clone(),
                stop_when_increment_below: None,
            };
            let run = flow2d::evolve(spec.build_curve::<f64>()?, &params, &options)?;
            Snapshots::Curves(run.snapshots.into_iter().map(|(_, c)| c).collect())
        } else {
            let options = EvolveOptions3D {
                t_end: t_max,
                snapshot_times: times.clone(),
                guard: None,
            };
            let run = flow3d::evolve_3d(spec.build_surface::<f64>()?, &params, &options)?;
            Snapshots::Surfaces(run.snapshots.into_iter().map(|(_, s)| s).collect())
        };
        per_level.push((h, tau, snaps));
    }

    for (ti, &t) in times.iter().enumerate() {
        let mut rows = Vec::new();
        for l in 0..levels {
            let error = match (&per_level[l].2, &per_level[l + 1].2) {
                (Snapshots::Curves(a), Snapshots::Curves(b)) => {
                    metrics::manifold_distance_2d(&a[ti], &b[ti])?
                }
                (Snapshots::Surfaces(a), Snapshots::Surfaces(b)) => {
                    metrics::manifold_distance_3d(&a[ti], &b[ti])?
                }
                _ => unreachable!("levels share the dimension"),
            };
            rows.push((per_level[l].0, per_level[l].1, error));
        }
        let table = metrics::convergence_table(&rows)?;
        let path = exp.output_dir.join(format!("converge_t{t:.6}.csv"));
        metrics::write_convergence_csv(&table, fs::File::create(&path)?)?;
        let mut stdout = std::io::stdout().lock();
        writeln!(stdout, "# t = {t}")?;
        metrics::write_convergence_csv(&table, &mut stdout)?;
    }
    Ok(())
}

fn compare_iters(args: &RunArgs) -> Result<()> {
    let exp = load_experiment(&args.config, &overrides(args))?;
    fs::create_dir_all(&exp.output_dir)?;
    if exp.dimension != 2 && exp.dimension != 3 {
        bail!("unsupported dimension");
    }
    let mut columns: Vec<Vec<usize>> = Vec::new();
    for method in ["newton", "picard"] {
        let mut params = solver_params(&exp);
        params.method = parse_method(method)?;
        let counts = if exp.dimension == 2 {
            let run = flow2d::evolve(
                exp.shape.build_curve::<f64>()?,
                &params,
                &EvolveOptions::to_time(exp.t_end),
            )?;
            run.trace.rows.iter().skip(1).map(|r| r.iterations).collect::<Vec<_>>()
        } else {
            let run = flow3d::evolve_3d(
                exp.shape.build_surface::<f64>()?,
                &params,
                &EvolveOptions3D { t_end: exp.t_end, snapshot_times: vec![], guard: None },
            )?;
            run.trace.rows.iter().skip(1).map(|r| r.iterations).collect::<Vec<_>>()
        };
        columns.push(counts);
    }
    let path = exp.output_dir.join("iterations.csv");
    let mut file = fs::File::create(&path)?;
    writeln!(file, "step,newton_iterations,picard_iterations")?;
    for (i, (n, p)) in columns[0].iter().zip(&columns[1]).enumerate() {
        writeln!(file, "{},{},{}", i + 1, n, p)?;
    }
    let mean = |v: &[usize]| v.iter().sum::<usize>() as f64 / v.len().max(1) as f64;
    println!(
        "newton mean = {:.3}, picard mean = {:.3} ({} steps) -> {}",
        mean(&columns[0]),
        mean(&columns[1]),
        columns[0].len(),
        path.display()
    );
    Ok(())
}

fn metrics_cmd(file_a: &Path, file_b: &Path) -> Result<()> {
    let head = |p: &Path| -> Result<String> {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        Ok(text.split_whitespace().next().unwrap_or_default().to_string())
    };
    let (ka, kb) = (head(file_a)?, head(file_b)?);
    if ka != kb {
        bail!("snapshot kinds differ: {ka} vs {kb}");
    }
    let d = match ka.as_str() {
        "CURVE2D" => {
            metrics::manifold_distance_2d(&Curve::load(file_a)?, &Curve::load(file_b)?)?
        }
        "SURF3D" => {
            metrics::manifold_distance_3d(&Surface::load(file_a)?, &Surface::load(file_b)?)?
        }
        other => bail!("unknown snapshot header '{other}'"),
    };
    println!("{d:.16e}");
    Ok(())
}
