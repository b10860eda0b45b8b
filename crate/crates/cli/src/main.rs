use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mrcolloc::adaptive::{adaptive_interpolate, Criterion, Norm};
use mrcolloc::analysis::{convergence_csv, convergence_table, sampled_errors};
use mrcolloc::mra1d::{NestedFamily, CATALOGUE};
use mrcolloc::sparse_nd::integrate_nd;
use mrcolloc::transform1d::{surplus_to_values, values_to_surplus, Content, Grid1D, Mode};
use mrcolloc::uq::{elliptic_moments, ko_run, test_function, EllipticConfig, KoCase, KoConfig};

#[derive(Parser)]
#[command(name = "mrcolloc", version, about = "Adaptive sparse-grid collocation experiments")]
#[command(args_override_self = true)]
struct Cli {
    /// Flat `key=value` file; entries act as flags placed before the command line ones.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (1 keeps runs reproducible in timing as well as output).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the point-family catalogue.
    Families {
        #[arg(long)]
        verify: bool,
        /// Print the exact tables of one family.
        #[arg(long)]
        dump: Option<String>,
    },
    /// Random 1D surpluses pushed through the pyramid transforms.
    Transform1d {
        #[arg(long, default_value = "p2m0")]
        family: String,
        #[arg(long, default_value_t = 8)]
        levels: u32,
        #[arg(long, value_enum, default_value = "standard")]
        mode: ModeArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Fail if the round-trip error exceeds 1e-12.
        #[arg(long)]
        check_roundtrip: bool,
    },
    /// Errors and orders of sparse interpolation over a range of levels.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "6..10")]
        levels: String,
        #[arg(long, value_enum, default_value = "corrected")]
        mode: ModeArg,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Fail if the L1 error of the last row exceeds this.
        #[arg(long)]
        max_l1: Option<f64>,
    },
    /// Adaptive interpolation over a sweep of thresholds.
    Adapt {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        adapt: AdaptArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Write the hash table of the last run here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Adaptive quadrature over a sweep of thresholds.
    Quad {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        adapt: AdaptArgs,
        /// Fail if the error of the last run exceeds this.
        #[arg(long)]
        max_error: Option<f64>,
    },
    /// Mean and variance of the random diffusion problem.
    Elliptic {
        #[arg(long, default_value = "p3m0")]
        family: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        levels: i32,
        #[arg(long, default_value_t = 4.0)]
        sigma: f64,
        #[arg(long, value_enum, default_value = "corrected")]
        mode: ModeArg,
        /// Fail if any variance exceeds this.
        #[arg(long)]
        max_variance: Option<f64>,
    },
    /// Kraichnan-Orszag variance series.
    Ko {
        #[arg(long, default_value = "p2m0")]
        family: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        levels: i32,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, default_value = "l2")]
        criterion: Norm,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 30.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Fail unless this fraction of final points has |Y1| < 0.25.
        #[arg(long)]
        min_concentration: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "p2m0")]
    family: String,
    /// Test function f0..f4.
    #[arg(long = "fn", default_value = "f0")]
    function: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct AdaptArgs {
    /// Comma-separated thresholds.
    #[arg(long, default_value = "1e-2,1e-3,1e-4")]
    eps: String,
    /// Coarsening threshold; defaults to eps/10, 0 disables coarsening.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value = "l2")]
    criterion: Norm,
    /// Finest level.
    #[arg(long, default_value_t = 11)]
    levels: i32,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Standard,
    Corrected,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Standard => Mode::Standard,
            ModeArg::Corrected => Mode::Corrected,
        }
    }
}

enum Outcome {
    Pass(String),
    Fail(String, String),
}

fn family(id: &str) -> Result<Arc<NestedFamily>> {
    Ok(Arc::new(NestedFamily::catalogue(id)?))
}

fn parse_levels(s: &str) -> Result<Vec<i32>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (i32, i32) = (a.trim().parse()?, b.trim().parse()?);
        return Ok((a..=b).collect());
    }
    s.split(',').map(|v| Ok(v.trim().parse()?)).collect()
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse().with_context(|| format!("bad number {v:?}")))
        .collect()
}

fn criteria(a: &AdaptArgs) -> Result<Vec<(f64, Criterion, bool)>> {
    parse_list(&a.eps)?
        .into_iter()
        .map(|eps| {
            let c = Criterion::new(a.criterion, eps);
            Ok(match a.eta {
                None => (eps, c, true),
                Some(e) if e == 0.0 => (eps, c, false),
                Some(e) => (eps, Criterion::with_eta(a.criterion, eps, e)?, true),
            })
        })
        .collect()
}

fn families(verify: bool, dump: Option<String>) -> Result<Outcome> {
    if let Some(id) = dump {
        return Ok(Outcome::Pass(family(&id)?.dump()));
    }
    let mut out = String::from("id,P,M,K,anchors0,anchors1,verified\n");
    let mut failed = Vec::new();
    for id in CATALOGUE {
        let f = family(id)?;
        let pts = |a: &[mrcolloc::mra1d::SidedPoint]| {
            a.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
        };
        let status = if verify {
            match f.verify(6) {
                Ok(()) => "yes",
                Err(e) => {
                    failed.push(format!("{id}: {e}"));
                    "no"
                }
            }
        } else {
            ""
        };
        out += &format!(
            "{id},{},{},{},{},{},{status}\n",
            f.p(),
            f.m(),
            f.k(),
            pts(f.anchors0()),
            pts(f.anchors1())
        );
    }
    Ok(if failed.is_empty() {
        Outcome::Pass(out)
    } else {
        Outcome::Fail(out, failed.join("; "))
    })
}

fn transform1d(id: &str, levels: u32, mode: Mode, seed: u64, check: bool) -> Result<Outcome> {
    use rand::{Rng, SeedableRng};
    let f = family(id)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut s = Grid1D::zeros(f.clone(), levels, mode, Content::Surpluses);
    for n in mode.lowest_level()..=levels as i32 {
        for v in s.level_mut(n) {
            *v = rng.gen_range(-1.0..1.0);
        }
    }
    // Dead slots carry no data; clear them so the comparison is meaningful.
    for n in 0..=levels as i32 {
        for j in 0..NestedFamily::cells_at(n) {
            for i in 0..=f.p() {
                for l in 0..=f.m() {
                    if s.is_dead(n, i, l) {
                        *s.get_mut(n, j, i, l) = 0.0;
                    }
                }
            }
        }
    }
    let back = values_to_surplus(&surplus_to_values(&s)?)?;
    let err = back.max_abs_diff(&s);
    let out = format!("family,levels,roundtrip_error\n{id},{levels},{err:e}\n");
    Ok(if check && err > 1e-12 {
        Outcome::Fail(out, format!("round-trip error {err:e} above 1e-12"))
    } else {
        Outcome::Pass(out)
    })
}

fn converge(c: &Common, levels: &str, mode: Mode, samples: usize, max_l1: Option<f64>) -> Result<Outcome> {
    let f = test_function(&c.function, c.dim)?;
    let rows = convergence_table(&f, family(&c.family)?, mode, &parse_levels(levels)?, samples, c.seed)?;
    let out = convergence_csv(&rows);
    let last = rows.last().map(|r| r.errors.l1).unwrap_or(0.0);
    Ok(match max_l1 {
        Some(m) if !(last <= m) => Outcome::Fail(out, format!("final L1 {last:e} above {m:e}")),
        _ => Outcome::Pass(out),
    })
}

fn adapt(c: &Common, a: &AdaptArgs, samples: usize, dump: Option<PathBuf>) -> Result<Outcome> {
    let f = test_function(&c.function, c.dim)?;
    let fam = family(&c.family)?;
    let mut out = String::from("eps,dof,L1,L2,Linf\n");
    let mut runs = Vec::new();
    let mut last = None;
    for (eps, crit, coarsen) in criteria(a)? {
        let t = adaptive_interpolate(&f, fam.clone(), a.levels, crit, coarsen)?;
        let e = sampled_errors(&f, t.surpluses(0), samples, c.seed, false)?;
        out += &format!("{eps:e},{},{:.6e},{:.6e},{:.6e}\n", t.dof(), e.l1, e.l2, e.linf);
        runs.push((eps, t.dof()));
        last = Some(t);
    }
    if let (Some(path), Some(t)) = (dump, last) {
        fs::write(&path, t.table_dump()).with_context(|| format!("writing {}", path.display()))?;
    }
    let bad: Vec<String> = runs
        .iter()
        .flat_map(|a| runs.iter().map(move |b| (a, b)))
        .filter(|(a, b)| a.0 > b.0 && a.1 > b.1)
        .map(|(a, b)| format!("eps {:e} needs {} points, eps {:e} only {}", a.0, a.1, b.0, b.1))
        .collect();
    Ok(if bad.is_empty() {
        Outcome::Pass(out)
    } else {
        Outcome::Fail(out, bad.join("; "))
    })
}

fn quad(c: &Common, a: &AdaptArgs, max_error: Option<f64>) -> Result<Outcome> {
    let f = test_function(&c.function, c.dim)?;
    let exact = f.exact_integral().context("no closed-form integral for this function")?;
    let fam = family(&c.family)?;
    let mut out = String::from("eps,dof,integral,exact,error\n");
    let mut err = 0.0;
    for (eps, crit, coarsen) in criteria(a)? {
        let t = adaptive_interpolate(&f, fam.clone(), a.levels, crit, coarsen)?;
        let q = integrate_nd(t.surpluses(0));
        err = (q - exact).abs();
        out += &format!("{eps:e},{},{q:.16e},{exact:.16e},{err:.6e}\n", t.dof());
    }
    Ok(match max_error {
        Some(m) if !(err <= m) => Outcome::Fail(out, format!("error {err:e} above {m:e}")),
        _ => Outcome::Pass(out),
    })
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Families { verify, dump } => families(verify, dump),
        Command::Transform1d { family, levels, mode, seed, check_roundtrip } => {
            transform1d(&family, levels, mode.into(), seed, check_roundtrip)
        }
        Command::Converge { common, levels, mode, samples, max_l1 } => {
            converge(&common, &levels, mode.into(), samples, max_l1)
        }
        Command::Adapt { common, adapt: a, samples, dump } => adapt(&common, &a, samples, dump),
        Command::Quad { common, adapt: a, max_error } => quad(&common, &a, max_error),
        Command::Elliptic { family: id, dim, levels, sigma, mode, max_variance } => {
            let cfg = EllipticConfig::new(dim, sigma)?;
            let m = elliptic_moments(&cfg, family(&id)?, mode.into(), levels)?;
            let worst = m.variance.iter().cloned().fold(0.0f64, f64::max);
            let out = m.csv();
            Ok(match max_variance {
                Some(v) if !(worst <= v) => Outcome::Fail(out, format!("variance {worst:e} above {v:e}")),
                _ => Outcome::Pass(out),
            })
        }
        Command::Ko { family: id, dim, levels, eps, criterion, dt, t_end, stride, min_concentration } => {
            let cfg = KoConfig {
                case: KoCase::from_dim(dim)?,
                dt,
                t_end,
                criterion: Criterion::new(criterion, eps),
                n_max: levels,
                family: family(&id)?,
                stride,
            };
            let r = ko_run(&cfg)?;
            let out = r.csv();
            Ok(match min_concentration {
                Some(m) => {
                    let pts = r.points();
                    let near = pts.iter().filter(|p| p[0].abs() < 0.25).count();
                    let frac = near as f64 / pts.len().max(1) as f64;
                    if frac >= m {
                        Outcome::Pass(out)
                    } else {
                        Outcome::Fail(out, format!("{frac:.3} of points near Y1=0, need {m}"))
                    }
                }
                None => Outcome::Pass(out),
            })
        }
    }
}

/// Puts `key=value` lines from `--config` right after the subcommand, so
/// flags given on the command line take precedence.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = match args[pos].split_once('=') {
        Some((_, p)) => p.to_string(),
        None => args.get(pos + 1).cloned().context("--config needs a path")?,
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading {path}"))?;
    let mut flags = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{path}:{}: expected key=value", k + 1);
        };
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => flags.push(format!("--{key}={value}")),
        }
    }
    // The subcommand is the first bare word that is not the value of a global flag.
    let mut i = 1;
    let mut at = None;
    while i < args.len() {
        let a = &args[i];
        if matches!(a.as_str(), "--config" | "--threads" | "--out") {
            i += 2;
            continue;
        }
        if !a.starts_with('-') {
            at = Some(i);
            break;
        }
        i += 1;
    }
    let at = at.context("missing command")?;
    let mut out = args[..=at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let out_path = cli.out.clone();
    let (text, failure) = match run(cli) {
        Ok(Outcome::Pass(t)) => (t, None),
        Ok(Outcome::Fail(t, why)) => (t, Some(why)),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &out_path {
        Some(p) => fs::write(p, &text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match failure {
        Some(why) => {
            eprintln!("FAIL,{why}");
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}
