#![allow(clippy::result_large_err)]

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pseudodyn::coarse::{bar_system, distortion_stats, orbit_correspondence};
use pseudodyn::equicont::{modulus_estimate, orbit_density, EquicontError};
use pseudodyn::exactnum::{Rational, Scalar};
use pseudodyn::folner::{averaging_measure, ball_sets, folner_ratios, segment_points, OrbitGraph, TestFn};
use pseudodyn::localmaps::{DomainSet, Interval, Space};
use pseudodyn::metrization::{glue_metric, random_atlas, Atlas, GlueMode};
use pseudodyn::pseudogroup::{orbit_ball, word_metric};
use pseudodyn::recurrence::{geometric_seeds, recurrence_profile};
use pseudodyn::scenario::{self, parse_scalar, Scenario};
use pseudodyn::{exactnum, repro};

mod svg;

const CSV_NOTE: &str = "Scalars p + q·√d are written as <name>_p and <name>_q exact rational \
columns; <name>_approx columns are decimal approximations and are the only inexact output.";

#[derive(Parser)]
#[command(name = "pseudodyn", version, about = "Orbit geometry of finitely generated pseudogroups on the line and circle", after_help = CSV_NOTE)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ScenarioArg {
    /// Bundled scenario name or path to a scenario JSON file
    #[arg(long)]
    scenario: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sequence {
    Ball,
    Segment,
    File,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Local,
    Quasilocal,
}

#[derive(Subcommand)]
enum Command {
    /// BFS orbit ball. CSV: index, point_p, point_q, point_approx, dist, parent, label
    Orbit {
        #[command(flatten)]
        sc: ScenarioArg,
        #[arg(long)]
        seed: String,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Word distance between two points, searched up to --rmax
    Metric {
        #[command(flatten)]
        sc: ScenarioArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 20)]
        rmax: usize,
    },
    /// Hitting distances to a window. CSV: seed_p, seed_q, seed_approx, nu, hit_dist, witness_p, witness_q
    Recur {
        #[command(flatten)]
        sc: ScenarioArg,
        /// Region name or "lo,hi" (open interval)
        #[arg(long, default_value = "V")]
        window: String,
        /// Comma-separated seeds; defaults to the scenario seeds
        #[arg(long, value_delimiter = ',', conflicts_with = "toward")]
        seeds: Vec<String>,
        /// Geometric sequence start + ratio^k (toward - start), k = 0..count
        #[arg(long, requires_all = ["start", "ratio", "count"])]
        toward: Option<String>,
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        ratio: Option<String>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 40)]
        rmax: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Growth plot of hitting distance against seed index
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Boundary ratios of a set sequence. CSV: n, r, boundary_size, set_size, ratio
    Folner {
        #[command(flatten)]
        sc: ScenarioArg,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long, value_enum, default_value = "ball")]
        sequence: Sequence,
        /// Sizes n of the sets (ball radius or segment length)
        #[arg(long, value_delimiter = ',', default_value = "1,2,5,10")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        r: Vec<usize>,
        /// Member stepping a segment; defaults to the first generator
        #[arg(long)]
        member: Option<String>,
        /// One set per line, whitespace-separated scalars (for --sequence file)
        #[arg(long)]
        file: Option<PathBuf>,
        /// JSON {"breakpoints": [[x, y], ...]}, piecewise linear and zero outside
        #[arg(long)]
        testfn: Option<PathBuf>,
        #[arg(long)]
        emit: Option<PathBuf>,
        /// CSV n, mu_p, mu_q, mu_approx of the averaging measures
        #[arg(long)]
        emit_mu: Option<PathBuf>,
    },
    /// Orbit correspondence audit. CSV: z_p, z_q, phi_p, phi_q, d_source, d_target. Stats JSON goes to stdout, or stderr when the CSV does
    Qi {
        #[command(flatten)]
        sc: ScenarioArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 10)]
        radius: usize,
        /// Region (name or "lo,hi") where the reverse constant is measured
        #[arg(long, default_value = "A")]
        window: String,
        /// Region containing both base points
        #[arg(long, default_value = "V")]
        domain: String,
        /// Stabilizer word length checked for trivial germs
        #[arg(long, default_value_t = 4)]
        germ_len: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Equicontinuity modulus. CSV: eps_p, eps_q, delta_p, delta_q, delta_approx, within_eps, shrinking
    Equicont {
        #[command(flatten)]
        sc: ScenarioArg,
        #[arg(long, default_value_t = 4)]
        maxlen: usize,
        #[arg(long, value_delimiter = ',', default_value = "1/100,1/10")]
        eps: Vec<String>,
        /// One pair per line, "x y"; defaults to consecutive scenario seeds
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Orbit density radius. CSV: dense, radius, max_gap_p, max_gap_q, max_gap_approx, points
    Density {
        #[command(flatten)]
        sc: ScenarioArg,
        #[arg(long)]
        seed: String,
        /// Region name or "lo,hi"; defaults to the whole circle
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 200)]
        rmax: usize,
    },
    /// Glued chain metric of a finite atlas. CSV: x, y, d, chained
    Glue {
        /// Atlas JSON file
        #[arg(long, required_unless_present = "random")]
        atlas: Option<PathBuf>,
        /// Generate a random atlas from this seed instead
        #[arg(long)]
        random: Option<u64>,
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long, default_value_t = 3)]
        patches: usize,
        #[arg(long, value_enum, default_value = "local")]
        mode: Mode,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Runs the acceptance checks
    Selftest {
        #[arg(long)]
        only: Option<u32>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Orbit { sc, seed, radius, emit } => orbit(&load(&sc)?, &seed, radius, emit),
        Command::Metric { sc, x, y, rmax } => {
            let sc = load(&sc)?;
            let d = word_metric(&sc.system, &scalar(&sc, &x)?, &scalar(&sc, &y)?, rmax).context("pseudogroup")?;
            match d {
                Some(d) => println!("{d}"),
                None => println!("none within {rmax}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Recur { sc, window, seeds, toward, start, ratio, count, rmax, emit, svg } => {
            let sc = load(&sc)?;
            let seeds = match toward {
                Some(t) => {
                    let ratio = exactnum::parse_rational(ratio.as_deref().unwrap_or_default()).map_err(|e| anyhow!("--ratio: {e}"))?;
                    let start = scalar(&sc, start.as_deref().unwrap_or_default())?;
                    geometric_seeds(&scalar(&sc, &t)?, &start, &ratio, count.unwrap_or(0))
                }
                None if seeds.is_empty() => sc.seeds.clone(),
                None => seeds.iter().map(|s| scalar(&sc, s)).collect::<Result<_>>()?,
            };
            recur(&sc, &window, &seeds, rmax, emit, svg)
        }
        Command::Folner { sc, seed, sequence, n, r, member, file, testfn, emit, emit_mu } => {
            let sc = load(&sc)?;
            folner(&sc, seed, sequence, &n, &r, member, file, testfn, emit, emit_mu)
        }
        Command::Qi { sc, x, y, radius, window, domain, germ_len, emit } => {
            let sc = load(&sc)?;
            qi(&sc, &x, &y, radius, &window, &domain, germ_len, emit)
        }
        Command::Equicont { sc, maxlen, eps, pairs, emit } => {
            let sc = load(&sc)?;
            equicont(&sc, maxlen, &eps, pairs, emit)
        }
        Command::Density { sc, seed, region, eps, rmax } => {
            let sc = load(&sc)?;
            density(&sc, &seed, region, &eps, rmax)
        }
        Command::Glue { atlas, random, points, patches, mode, emit } => {
            let mode = match mode {
                Mode::Local => GlueMode::Local,
                Mode::Quasilocal => GlueMode::Quasilocal,
            };
            let atlas = match (random, atlas) {
                (Some(seed), _) => random_atlas(seed, points, patches, mode),
                (None, Some(p)) => {
                    let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    Atlas::from_json(&text).context("metrization")?
                }
                (None, None) => bail!("--atlas or --random is required"),
            };
            glue(&atlas, mode, emit)
        }
        Command::Selftest { only } => selftest(only),
    }
}

fn load(arg: &ScenarioArg) -> Result<Scenario> {
    let sc = scenario::load(&arg.scenario).context("scenario")?;
    for note in &sc.notes {
        eprintln!("note: {note}");
    }
    Ok(sc)
}

fn scalar(sc: &Scenario, s: &str) -> Result<Scalar> {
    parse_scalar(s, sc.d).map_err(|e| anyhow!("bad scalar {s:?}: {e}"))
}

fn region(sc: &Scenario, s: &str) -> Result<Interval> {
    if let Some(iv) = sc.region(s) {
        return Ok(iv.clone());
    }
    let (lo, hi) = s.split_once(',').ok_or_else(|| anyhow!("unknown region {s:?} (not a scenario region or \"lo,hi\")"))?;
    Ok(Interval::open(scalar(sc, lo)?, scalar(sc, hi)?))
}

fn writer(path: &Option<PathBuf>) -> Result<csv::Writer<Box<dyn Write>>> {
    let out: Box<dyn Write> = match path {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout()),
    };
    Ok(csv::Writer::from_writer(out))
}

fn scalar_cols(name: &str) -> [String; 3] {
    [format!("{name}_p"), format!("{name}_q"), format!("{name}_approx")]
}

fn scalar_vals(x: &Scalar) -> [String; 3] {
    [x.p().to_string(), x.q().to_string(), x.approx(40)]
}

fn opt_vals(x: Option<&Scalar>) -> [String; 3] {
    x.map(scalar_vals).unwrap_or_default()
}

fn orbit(sc: &Scenario, seed: &str, radius: usize, emit: Option<PathBuf>) -> Result<ExitCode> {
    let ball = orbit_ball(&sc.system, &scalar(sc, seed)?, radius).context("pseudogroup")?;
    let mut w = writer(&emit)?;
    let mut head = vec!["index".to_string()];
    head.extend(scalar_cols("point"));
    head.extend(["dist", "parent", "label"].map(String::from));
    w.write_record(&head)?;
    for (k, node) in ball.nodes().iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(scalar_vals(&node.point));
        row.push(node.dist.to_string());
        row.push(node.parent.map(|(p, _)| p.to_string()).unwrap_or_default());
        row.push(sc.system.word_name(&ball.word_to(k)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn recur(sc: &Scenario, window: &str, seeds: &[Scalar], rmax: usize, emit: Option<PathBuf>, svg_path: Option<PathBuf>) -> Result<ExitCode> {
    let win = DomainSet::from_interval(region(sc, window)?);
    let prof = recurrence_profile(&sc.system, &win, seeds, rmax).context("recurrence")?;
    let mut w = writer(&emit)?;
    let mut head: Vec<String> = scalar_cols("seed").into();
    head.extend(["nu", "hit_dist", "witness_p", "witness_q"].map(String::from));
    w.write_record(&head)?;
    let mut plot = Vec::new();
    for e in &prof.entries {
        let nu = sc.nonrecurrent.as_ref().and_then(|ex| ex.nu(&e.seed));
        let mut row: Vec<String> = scalar_vals(&e.seed).into();
        row.push(nu.map(|v| v.to_string()).unwrap_or_default());
        row.push(e.hit.map(|v| v.to_string()).unwrap_or_default());
        let [wp, wq, _] = opt_vals(e.witness.as_ref());
        row.extend([wp, wq]);
        w.write_record(&row)?;
        plot.push((e.hit, nu));
    }
    w.flush()?;
    if let Some(p) = svg_path {
        fs::write(&p, svg::growth_plot(&plot)).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn read_sets(sc: &Scenario, path: &Path) -> Result<Vec<Vec<Scalar>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|s| scalar(sc, s)).collect())
        .collect()
}

fn read_testfn(sc: &Scenario, path: &Path) -> Result<TestFn> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: serde_json::Value = serde_json::from_str(&text).context("test function JSON")?;
    let bps = v["breakpoints"].as_array().ok_or_else(|| anyhow!("test function needs a \"breakpoints\" array"))?;
    let mut out = Vec::new();
    for bp in bps {
        let pair = bp.as_array().filter(|a| a.len() == 2).ok_or_else(|| anyhow!("breakpoint must be [x, y]"))?;
        let s = |v: &serde_json::Value| match v {
            serde_json::Value::String(s) => scalar(sc, s),
            other => scalar(sc, &other.to_string()),
        };
        out.push((s(&pair[0])?, s(&pair[1])?));
    }
    if out.windows(2).any(|w| w[0].0 >= w[1].0) {
        bail!("breakpoints must be strictly increasing");
    }
    Ok(TestFn::PiecewiseLinear(out))
}

#[allow(clippy::too_many_arguments)]
fn folner(
    sc: &Scenario,
    seed: Option<String>,
    sequence: Sequence,
    ns: &[usize],
    rs: &[usize],
    member: Option<String>,
    file: Option<PathBuf>,
    testfn: Option<PathBuf>,
    emit: Option<PathBuf>,
    emit_mu: Option<PathBuf>,
) -> Result<ExitCode> {
    let sys = &sc.system;
    let rmax = rs.iter().copied().max().unwrap_or(1);
    let seed = || -> Result<Scalar> {
        match &seed {
            Some(s) => scalar(sc, s),
            None => sc.seeds.first().cloned().ok_or_else(|| anyhow!("--seed is required (scenario has no seeds)")),
        }
    };
    let (g, sets, labels) = match sequence {
        Sequence::Ball => {
            let nmax = ns.iter().copied().max().unwrap_or(0);
            let g = OrbitGraph::build(sys, &[seed()?], nmax + rmax + 1).context("folner")?;
            let sets = ball_sets(&g, 0, ns);
            (g, sets, ns.to_vec())
        }
        Sequence::Segment => {
            let m = match member {
                Some(name) => sys.index_of(&name).ok_or_else(|| anyhow!("unknown member {name:?}"))?,
                None => 0,
            };
            let x0 = seed()?;
            let pts: Vec<Vec<Scalar>> = ns.iter().map(|&n| segment_points(sys, m, &x0, n)).collect::<Result<_, _>>().context("folner")?;
            let all: Vec<Scalar> = pts.iter().flatten().cloned().collect();
            let g = OrbitGraph::build(sys, &all, rmax + 1).context("folner")?;
            let sets = pts.iter().map(|p| g.ids(p)).collect::<Result<_, _>>().context("folner")?;
            (g, sets, ns.to_vec())
        }
        Sequence::File => {
            let path = file.ok_or_else(|| anyhow!("--sequence file needs --file"))?;
            let pts = read_sets(sc, &path)?;
            let all: Vec<Scalar> = pts.iter().flatten().cloned().collect();
            let g = OrbitGraph::build(sys, &all, rmax + 1).context("folner")?;
            let sets = pts.iter().map(|p| g.ids(p)).collect::<Result<_, _>>().context("folner")?;
            (g, sets, (1..=pts.len()).collect())
        }
    };
    let report = folner_ratios(&g, &sets, rs).context("folner")?;
    let mut w = writer(&emit)?;
    w.write_record(["n", "r", "boundary_size", "set_size", "ratio"])?;
    for row in &report.rows {
        w.write_record([labels[row.n].to_string(), row.r.to_string(), row.boundary_size.to_string(), row.set_size.to_string(), row.ratio.to_string()])?;
    }
    // the graph boundary S ∩ ∂₂S, tagged r = graph
    for row in &report.graph_rows {
        w.write_record([labels[row.n].to_string(), "graph".into(), row.boundary_size.to_string(), row.set_size.to_string(), row.ratio.to_string()])?;
    }
    w.flush()?;
    if let Some(path) = testfn {
        let f = read_testfn(sc, &path)?;
        let mut w = writer(&emit_mu)?;
        let mut head = vec!["n".to_string()];
        head.extend(scalar_cols("mu"));
        w.write_record(&head)?;
        for (k, s) in sets.iter().enumerate() {
            let pts: Vec<Scalar> = s.iter().map(|&v| g.point(v).clone()).collect();
            let mu = averaging_measure(&pts, &f).context("folner")?;
            let mut row = vec![labels[k].to_string()];
            row.extend(scalar_vals(&mu));
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn qi(sc: &Scenario, x: &str, y: &str, radius: usize, window: &str, domain: &str, germ_len: usize, emit: Option<PathBuf>) -> Result<ExitCode> {
    let sys = &sc.system;
    let (x, y) = (scalar(sc, x)?, scalar(sc, y)?);
    let v = region(sc, domain)?;
    let a = region(sc, window)?;
    let bars = bar_system(sys).context("coarse")?;
    let corr = orbit_correspondence(sys, &x, &y, radius, &v, germ_len).context("coarse")?;
    let target = orbit_ball(&bars, &y, 2 * radius).context("pseudogroup")?;
    let mut w = writer(&emit)?;
    w.write_record(["z_p", "z_q", "phi_p", "phi_q", "d_source", "d_target"])?;
    for p in &corr.pairs {
        let [zp, zq, _] = scalar_vals(&p.z);
        let [fp, fq, _] = scalar_vals(&p.phi_z);
        let dt = target.dist(&p.phi_z).map(|d| d.to_string()).unwrap_or_default();
        w.write_record([zp, zq, fp, fq, p.dist.to_string(), dt])?;
    }
    w.flush()?;
    let st = distortion_stats(&corr, sys, &bars, &a).context("coarse")?;
    let stats = serde_json::json!({
        "pairs": corr.pairs.len(),
        "node_pairs_checked": st.pairs_checked,
        "forward_ok": st.forward_ok,
        "forward_violations": st.forward_violations.len(),
        "injective": st.injective,
        "reverse_c": st.reverse_c.to_string(),
        "net_constant": st.net_constant,
    });
    let line = serde_json::to_string_pretty(&stats)?;
    if emit.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(ExitCode::SUCCESS)
}

fn equicont(sc: &Scenario, maxlen: usize, eps: &[String], pairs: Option<PathBuf>, emit: Option<PathBuf>) -> Result<ExitCode> {
    let eps: Vec<Scalar> = eps.iter().map(|e| scalar(sc, e)).collect::<Result<_>>()?;
    let pairs: Vec<(Scalar, Scalar)> = match pairs {
        Some(p) => read_sets(sc, &p)?
            .into_iter()
            .map(|v| match v.as_slice() {
                [a, b] => Ok((a.clone(), b.clone())),
                _ => Err(anyhow!("each pair line needs exactly two scalars")),
            })
            .collect::<Result<_>>()?,
        None => sc.seeds.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect(),
    };
    if pairs.is_empty() {
        bail!("no sample pairs (give --pairs or a scenario with at least two seeds)");
    }
    let table = modulus_estimate(&sc.system, maxlen, &eps, &pairs).context("equicont")?;
    let mut w = writer(&emit)?;
    let mut head = vec!["eps_p".to_string(), "eps_q".to_string()];
    head.extend(scalar_cols("delta"));
    head.extend(["within_eps", "shrinking"].map(String::from));
    w.write_record(&head)?;
    for row in &table.rows {
        let [ep, eq, _] = scalar_vals(&row.eps);
        let mut rec = vec![ep, eq];
        rec.extend(opt_vals(row.delta.as_ref()));
        rec.extend([row.within_eps.to_string(), row.shrinking.to_string()]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn density(sc: &Scenario, seed: &str, region_arg: Option<String>, eps: &str, rmax: usize) -> Result<ExitCode> {
    let reg = match region_arg {
        Some(r) => region(sc, &r)?,
        None if sc.space() == Space::Circle => Interval::unit(),
        None => bail!("--region is required on the line"),
    };
    let eps = scalar(sc, eps)?;
    let mut w = writer(&None)?;
    let mut head = vec!["dense".to_string(), "radius".to_string()];
    head.extend(scalar_cols("max_gap"));
    head.push("points".into());
    w.write_record(&head)?;
    let mut row = Vec::new();
    match orbit_density(&sc.system, &scalar(sc, seed)?, &reg, &eps, rmax) {
        Ok(d) => {
            row.extend(["true".into(), d.radius.to_string()]);
            row.extend(scalar_vals(&d.max_gap));
            row.push(d.points.to_string());
        }
        Err(EquicontError::NotDense { rmax, gap, .. }) => {
            row.extend(["false".into(), rmax.to_string()]);
            row.extend(scalar_vals(&gap));
            row.push(String::new());
        }
        Err(e) => return Err(e).context("equicont"),
    }
    w.write_record(&row)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn glue(atlas: &Atlas, mode: GlueMode, emit: Option<PathBuf>) -> Result<ExitCode> {
    let g = glue_metric(atlas, mode).context("metrization")?;
    let mut w = writer(&emit)?;
    w.write_record(["x", "y", "d", "chained"])?;
    for (i, row) in g.table.iter().enumerate() {
        for (j, d) in row.iter().enumerate() {
            w.write_record([atlas.points[i].clone(), atlas.points[j].clone(), rational_str(d), g.chained[i][j].to_string()])?;
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn rational_str(r: &Rational) -> String {
    r.to_string()
}

fn selftest(only: Option<u32>) -> Result<ExitCode> {
    let reports = match only {
        Some(id) => vec![repro::run(id).ok_or_else(|| anyhow!("no criterion {id}"))?],
        None => repro::run_all(),
    };
    let mut unexpected = 0;
    for r in &reports {
        println!("{}", r.line());
        let bad = r.unexpected_failures();
        if !bad.is_empty() {
            unexpected += 1;
        } else if !r.passed() {
            println!("     known failure, see README");
        }
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    println!("{passed}/{} criteria passed, {unexpected} unexpected failures", reports.len());
    Ok(if unexpected == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
