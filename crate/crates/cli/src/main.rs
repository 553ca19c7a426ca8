//! `noslip`: run no-slip billiard orbits and parameter sweeps, emit phase
//! portrait datasets and analysis reports, and run the acceptance suite.
//!
//! Exit codes: 0 success, 1 configuration error, 2 verification failure.

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use noslip_billiards::analysis::{
    circle_caustics, circle_ngon_velocity, escape_region, triangle_classify,
    triangle_cycle_matrices, wedge_spectrum, EscapeRegionKind, TRIANGLE_WORDS,
};
use noslip_billiards::collision::theta_for_alpha;
use noslip_billiards::config::{InitialSpec, OutputFormat, RunConfig, TableSpec};
use noslip_billiards::flow::{
    iterate_with, IterateOptions, PhasePoint, Termination,
};
use noslip_billiards::math::{Mat3, Vec2};
use noslip_billiards::portrait::{
    run_portrait, sample_boundary_start, PortraitRequest, Sampling,
};
use noslip_billiards::table::Table;
use noslip_billiards::trace::{
    svg_velocity_disk, termination_label, write_orbit_csv, write_orbit_jsonl, write_portrait_csv,
    write_portrait_jsonl, ORBIT_CSV_HEADER,
};
use noslip_billiards::{CollisionLaw, VelocityState};
use rand::SeedableRng;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "noslip", version, about = "Planar no-slip billiards simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one orbit (or a seeded batch) and write the event trace.
    Simulate(SimulateArgs),
    /// Sample initial conditions and emit a velocity phase portrait dataset.
    Portrait(PortraitArgs),
    /// Wedge spectrum queries: angle, inverse angle, or a sweep.
    Wedge(WedgeArgs),
    /// Circular-table caustic and polygon-orbit reports.
    Circle(CircleArgs),
    /// Equilateral-triangle periodicity batch.
    Triangle(TriangleArgs),
    /// Run the acceptance checks and exit 2 on any failure.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonRunArgs {
    /// Table description, e.g. `wedge:theta=1.0472` or `hexagon`.
    #[arg(long)]
    table: Option<String>,
    /// TOML run configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_collisions: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or jsonl.
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    /// Initial condition `px,py,v0,v1,v2`; velocity is normalized.
    #[arg(long)]
    initial: Option<String>,
    /// Run a batch of this many seeded random initial conditions.
    #[arg(long)]
    count: Option<usize>,
    /// Collision law: noslip or specular.
    #[arg(long, default_value = "noslip")]
    law: String,
}

#[derive(Args)]
struct PortraitArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    #[arg(long)]
    samples: Option<usize>,
    /// Also write a minimal SVG scatter of the velocity disk.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct WedgeArgs {
    /// Wedge angle in radians.
    #[arg(long)]
    theta: Option<f64>,
    /// Rotation angle to invert via the closed-form quadratic.
    #[arg(long)]
    alpha: Option<f64>,
    /// Sweep `lo:hi:step` over wedge angles.
    #[arg(long)]
    sweep: Option<String>,
    /// Monte Carlo samples for the non-escape area estimate (0 skips it).
    #[arg(long, default_value_t = 100_000)]
    area_samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CircleArgs {
    /// Post-collision velocity `v0,v1,v2` in the collision-local frame.
    #[arg(long)]
    velocity: Option<String>,
    /// Regular polygon order for the inscribed-orbit family.
    #[arg(long)]
    ngon: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    collisions: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TriangleArgs {
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    max_collisions: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only checks whose name contains this substring.
    #[arg(long)]
    only: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    let outcome = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Portrait(args) => cmd_portrait(args),
        Command::Wedge(args) => cmd_wedge(args),
        Command::Circle(args) => cmd_circle(args),
        Command::Triangle(args) => cmd_triangle(args),
        Command::Verify(args) => return cmd_verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Resolve table + run settings from the config file and flag overrides.
fn resolve_config(common: &CommonRunArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        RunConfig::from_toml(&text)?
    } else {
        let table_str = common
            .table
            .as_deref()
            .ok_or_else(|| anyhow!("either --table or --config is required"))?;
        RunConfig::from_table_spec(TableSpec::parse_compact(table_str)?)
    };
    if let Some(t) = &common.table {
        cfg.table = TableSpec::parse_compact(t)?;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(m) = common.max_collisions {
        cfg.max_collisions = m;
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    if let Some(j) = common.jobs {
        cfg.jobs = j;
    }
    Ok(cfg)
}

fn open_out(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn parse_initial(text: &str) -> anyhow::Result<PhasePoint> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| anyhow!("initial condition must be five numbers px,py,v0,v1,v2"))?;
    if parts.len() != 5 {
        bail!("initial condition must be five numbers px,py,v0,v1,v2");
    }
    Ok(PhasePoint::new(
        Vec2::new(parts[0], parts[1]),
        VelocityState::new(parts[2], parts[3], parts[4]),
    )
    .normalized())
}

fn initial_from_spec(spec: &InitialSpec) -> PhasePoint {
    let mut pp = PhasePoint::new(
        Vec2::new(spec.position[0], spec.position[1]),
        VelocityState::new(spec.velocity[0], spec.velocity[1], spec.velocity[2]),
    )
    .normalized();
    pp.x0 = spec.x0;
    pp
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let cfg = resolve_config(&args.common)?;
    let table = cfg.table.build()?;
    let law = match args.law.as_str() {
        "noslip" => CollisionLaw::NoSlip,
        "specular" => CollisionLaw::Specular,
        other => bail!("unknown law `{other}` (noslip|specular)"),
    };
    let starts: Vec<PhasePoint> = if let Some(count) = args.count {
        if !table.is_bounded() {
            bail!("--count sampling needs a bounded table");
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..count).map(|_| sample_boundary_start(&table, &mut rng)).collect()
    } else if let Some(text) = &args.initial {
        vec![parse_initial(text)?]
    } else if let Some(spec) = &cfg.initial {
        vec![initial_from_spec(spec)]
    } else {
        bail!("provide --initial, --count, or an [initial] block in the config");
    };

    let mut out = open_out(&args.common.out)?;
    if cfg.format == OutputFormat::Csv {
        writeln!(out, "{ORBIT_CSV_HEADER}")?;
    }
    let batch = starts.len() > 1;
    for (k, start) in starts.iter().enumerate() {
        let opts = IterateOptions::new(&table, cfg.max_collisions).with_law(law);
        let orbit = iterate_with(&table, *start, &opts);
        let label = batch.then_some(k);
        match cfg.format {
            OutputFormat::Csv => write_orbit_csv(&mut out, &orbit, label)?,
            OutputFormat::Jsonl => write_orbit_jsonl(&mut out, &orbit, label)?,
        }
        eprintln!(
            "orbit {k}: {} events, termination = {}{}",
            orbit.events.len(),
            termination_label(orbit.termination),
            if orbit.lemma_anomalies > 0 {
                format!(" [warning: {} repeated-velocity anomalies]", orbit.lemma_anomalies)
            } else {
                String::new()
            }
        );
    }
    out.flush()?;
    Ok(())
}

fn cmd_portrait(args: PortraitArgs) -> anyhow::Result<()> {
    let mut cfg = resolve_config(&args.common)?;
    if let Some(s) = args.samples {
        cfg.samples = s;
    }
    let table = cfg.table.build()?;
    if !table.is_bounded() {
        bail!("portraits need a bounded table");
    }
    let req = PortraitRequest {
        table_desc: cfg.table.describe(),
        samples: cfg.samples,
        max_collisions: cfg.max_collisions,
        seed: cfg.seed,
        jobs: cfg.jobs.max(1),
        sampling: Sampling::RandomBoundary,
    };
    let ds = run_portrait(&table, &req)?;
    ds.sanity_check()?;
    let mut out = open_out(&args.common.out)?;
    match cfg.format {
        OutputFormat::Csv => write_portrait_csv(&mut out, &ds)?,
        OutputFormat::Jsonl => write_portrait_jsonl(&mut out, &ds)?,
    }
    out.flush()?;
    if let Some(svg_path) = &args.svg {
        std::fs::write(svg_path, svg_velocity_disk(&ds, 800))
            .with_context(|| format!("writing {}", svg_path.display()))?;
    }
    eprintln!(
        "portrait: {} orbits x {} collisions (seed {})",
        ds.samples, ds.max_collisions, ds.seed
    );
    Ok(())
}

fn wedge_row(theta: f64, area_samples: usize, seed: u64) -> anyhow::Result<Value> {
    let row = wedge_spectrum(theta)?;
    let region = escape_region(theta)?;
    let kind = match &region.kind {
        EscapeRegionKind::Cap { angular_radius } => json!({
            "kind": "cap",
            "angular_radius": angular_radius,
        }),
        EscapeRegionKind::CurvilinearPolygon { vertices, order } => json!({
            "kind": "curvilinear_polygon",
            "order": order,
            "vertices": vertices,
        }),
    };
    let area = if area_samples > 0 {
        Some(region.nonescape_area(area_samples, seed, 1e-6))
    } else {
        None
    };
    Ok(json!({
        "theta": theta,
        "alpha": row.alpha,
        "periodic": row.cycle.is_some(),
        "cycle": row.cycle,
        "period": row.period,
        "non_escape": kind,
        "non_escape_area": area,
    }))
}

fn cmd_wedge(args: WedgeArgs) -> anyhow::Result<()> {
    let seed = args.seed.unwrap_or(0);
    let report: Value = if let Some(theta) = args.theta {
        wedge_row(theta, args.area_samples, seed)?
    } else if let Some(alpha) = args.alpha {
        let thetas = theta_for_alpha(alpha)?;
        let rows: anyhow::Result<Vec<Value>> = thetas
            .iter()
            .map(|t| wedge_row(*t, args.area_samples, seed))
            .collect();
        json!({ "alpha": alpha, "thetas": thetas, "rows": rows? })
    } else if let Some(sweep) = &args.sweep {
        let parts: Vec<f64> = sweep
            .split(':')
            .map(|p| p.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| anyhow!("sweep must be lo:hi:step"))?;
        if parts.len() != 3 || parts[2] <= 0.0 {
            bail!("sweep must be lo:hi:step with positive step");
        }
        let mut rows = Vec::new();
        let mut theta = parts[0];
        while theta <= parts[1] + 1e-12 {
            rows.push(wedge_row(theta, args.area_samples, seed)?);
            theta += parts[2];
        }
        json!({ "sweep": rows })
    } else {
        bail!("provide --theta, --alpha, or --sweep");
    };
    let mut out = open_out(&args.out)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn cmd_circle(args: CircleArgs) -> anyhow::Result<()> {
    let v = if let Some(n) = args.ngon {
        circle_ngon_velocity(n)?
    } else if let Some(text) = &args.velocity {
        let parts: Vec<f64> = text
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| anyhow!("velocity must be three numbers v0,v1,v2"))?;
        if parts.len() != 3 {
            bail!("velocity must be three numbers v0,v1,v2");
        }
        VelocityState::new(parts[0], parts[1], parts[2]).normalized()
    } else {
        bail!("provide --velocity or --ngon");
    };
    let caustics = circle_caustics(v)?;
    let table = noslip_billiards::table::circle(1.0)?;
    let p0 = Vec2::new(0.0, -1.0);
    let opts = IterateOptions::new(&table, args.collisions).without_period_detection();
    let orbit = iterate_with(&table, PhasePoint::new(p0, v), &opts);
    // Verify the alternating tangency along the simulated orbit.
    let mut prev = p0;
    let mut max_radius_err = 0.0f64;
    let mut max_midpoint_err = 0.0f64;
    for (k, e) in orbit.events.iter().enumerate() {
        let want = if k % 2 == 0 { caustics.r1.abs() } else { caustics.r2.abs() };
        let dir = (e.point - prev).normalized();
        let foot = prev + dir * (Vec2::ZERO - prev).dot(dir);
        max_radius_err = max_radius_err.max((foot.norm() - want).abs());
        max_midpoint_err = max_midpoint_err.max((foot - (prev + e.point) * 0.5).norm());
        prev = e.point;
    }
    let closure = args.ngon.and_then(|n| {
        orbit.events.get(n - 1).map(|e| (e.point - p0).norm())
    });
    let report = json!({
        "velocity": v.to_array(),
        "r1": caustics.r1,
        "r2": caustics.r2,
        "theta1": caustics.theta1,
        "theta2": caustics.theta2,
        "collisions": orbit.events.len(),
        "termination": termination_label(orbit.termination),
        "max_caustic_radius_error": max_radius_err,
        "max_midpoint_tangency_error": max_midpoint_err,
        "ngon_closure_error": closure,
    });
    let mut out = open_out(&args.out)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn cmd_triangle(args: TriangleArgs) -> anyhow::Result<()> {
    use rand::Rng;
    let table: Table = noslip_billiards::table::regular_polygon(3, 1.0)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let (lo, hi) = table.sample_box();
    let mut histogram: std::collections::BTreeMap<String, usize> = Default::default();
    let mut periodic = 0usize;
    let mut degenerate = 0usize;
    for _ in 0..args.count {
        let start = loop {
            let p = Vec2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
            if table.contains(p) {
                let v = noslip_billiards::analysis::sample_unit_sphere(&mut rng);
                if v.planar().norm() > 1e-3 {
                    break PhasePoint::new(p, v);
                }
            }
        };
        let orbit = noslip_billiards::flow::iterate(&table, start, args.max_collisions);
        match orbit.termination {
            Termination::PeriodDetected(p) => {
                periodic += 1;
                let word = triangle_classify(&orbit)
                    .map(|c| c.word)
                    .unwrap_or_else(|_| "?".into());
                *histogram.entry(format!("period {p} [{word}]")).or_insert(0) += 1;
            }
            _ => degenerate += 1,
        }
    }
    let (s1, s2) = triangle_cycle_matrices();
    let id = Mat3::identity();
    let report = json!({
        "count": args.count,
        "periodic": periodic,
        "degenerate": degenerate,
        "periodic_fraction": periodic as f64 / args.count as f64,
        "histogram": histogram,
        "allowed_words": TRIANGLE_WORDS,
        "identity_defects": {
            "s1_pow6": s1.powi(6).max_abs_diff(&id),
            "s1_s2cubed_s1squared": s1.mul_mat(&s2.powi(3)).mul_mat(&s1.powi(2)).max_abs_diff(&id),
        },
    });
    let mut out = open_out(&args.out)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let results = noslip_billiards::verify::run(args.only.as_deref());
    if results.is_empty() {
        eprintln!("no checks match the filter");
        return ExitCode::from(1);
    }
    let mut failed = 0usize;
    for r in &results {
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    let total: f64 = results.iter().map(|r| r.seconds).sum();
    println!(
        "{}/{} checks passed in {:.1}s total",
        results.len() - failed,
        results.len(),
        total
    );
    if failed > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_parser_accepts_five_numbers() {
        let pp = parse_initial("0,1, 0.3,0.4,0.5").unwrap();
        assert!((pp.velocity.speed() - 1.0).abs() < 1e-12);
        assert!(parse_initial("1,2,3").is_err());
        assert!(parse_initial("a,b,c,d,e").is_err());
    }
}
