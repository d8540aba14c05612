use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use ietlab::combinatorics::{classify, find_good_word};
use ietlab::experiments::fixtures::{fixture, fixture_path, golden_interval};
use ietlab::experiments::{
    cesaro_decay, compare_models, dichotomy_run, golden_tower, lower_bound_construct, DichotomyConfig, LowerBoundConfig,
};
use ietlab::observable::Observable;
use ietlab::renormalize::{lyapunov_estimate, path_matrix, Induction, LebesgueSampler, RauzyPath};
use ietlab::runs::{self, RunDir};
use ietlab::scalar::{format_rational, parse_rational};
use ietlab::substitution::Substitution;
use ietlab::twisted::{empirical_spectral_mass, fejer_mass_bound, mainbound, max_phi, veech_frequency, SadicSequence};
use ietlab::{Error, Iet, Permutation, Result};

#[derive(Parser, Serialize)]
#[command(name = "ietlab", version, about = "Experiments with interval exchange transformations")]
struct Cli {
    /// Root directory for run folders.
    #[arg(long, global = true, default_value = "runs")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
enum Command {
    /// Rauzy class, genus, singularities and type W of a permutation.
    Classify { perm: String },
    /// Rauzy induction trajectory, Zorich blocks and path matrix.
    Induce {
        #[command(flatten)]
        iet: IetArgs,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Lyapunov exponents of the Zorich cocycle.
    Lyapunov {
        #[arg(long)]
        perm: String,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Shortest simple positive loop with unimodular good return words.
    GoodWord {
        #[arg(long)]
        perm: String,
        #[arg(long, default_value_t = 10_000_000)]
        budget: usize,
    },
    /// Twisted cocycle products and the contraction bound over an ω grid.
    Twisted {
        #[arg(long)]
        perm: String,
        /// Number of blocks `ζ_j`.
        #[arg(long, default_value_t = 4)]
        blocks: usize,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Tile lengths `s`, whitespace separated; defaults to all ones.
        #[arg(long)]
        s: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Windowed spectral mass estimate and the Fejér-kernel bound.
    Spectral {
        #[command(flatten)]
        iet: IetArgs,
        #[command(flatten)]
        obs: BumpArgs,
        #[arg(long, default_value_t = 0.0)]
        omega: f64,
        #[arg(long, default_value_t = 1e-3)]
        r: f64,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        base_points: usize,
        /// Constants `C₁, α, R₀` for the Fejér bound.
        #[arg(long, num_args = 3, value_names = ["C1", "ALPHA", "R0"])]
        bound: Option<Vec<f64>>,
    },
    /// Cesàro correlation decay of two bumps.
    Correlate {
        #[command(flatten)]
        iet: IetArgs,
        #[command(flatten)]
        obs: BumpArgs,
        /// Powers of two for the N grid, `lo..hi`.
        #[arg(long, default_value = "8..16")]
        grid: String,
    },
    /// Rotation-class versus non-rotation-class decay comparison.
    Dichotomy {
        /// JSON configuration; defaults are used when absent.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Lower-bound certificate for a golden-mean tower.
    LowerBound {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long)]
        c0: Option<f64>,
        /// Fibonacci index of the rotation number approximant.
        #[arg(long, default_value_t = 60)]
        fib: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Fraction of path times where `t·h` stays away from the integers.
    VeechFreq {
        #[arg(long, default_value = "sym4")]
        fixture: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value = "1/3 2/5 1/7")]
        t: String,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
}

#[derive(Args, Serialize)]
struct IetArgs {
    /// Named fixture: golden, golden2, rev3 or sym4.
    #[arg(long, conflicts_with_all = ["perm", "lengths"])]
    fixture: Option<String>,
    #[arg(long, requires = "lengths")]
    perm: Option<String>,
    /// Rational lengths, whitespace separated.
    #[arg(long, requires = "perm")]
    lengths: Option<String>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

impl IetArgs {
    fn resolve(&self, bits: u32) -> Result<(Iet, String)> {
        match (&self.fixture, &self.perm, &self.lengths) {
            (Some(name), _, _) if name == "golden" => Ok((golden_interval(bits)?, "golden".into())),
            (Some(name), _, _) => Ok((fixture(name, self.seed)?.iet, name.clone())),
            (None, Some(p), Some(l)) => Ok((Iet::parse(p, l)?, "custom".into())),
            _ => Err(Error::InvalidArgument("give --fixture or both --perm and --lengths".into())),
        }
    }
}

#[derive(Args, Serialize)]
struct BumpArgs {
    #[arg(long, default_value = "1/8")]
    f_at: String,
    #[arg(long, default_value = "9/16")]
    g_at: String,
    #[arg(long, default_value = "1/16")]
    width: String,
}

impl BumpArgs {
    fn build(&self) -> Result<(Observable, Observable)> {
        let w = parse_rational(&self.width)?;
        Ok((Observable::trapezoid(&parse_rational(&self.f_at)?, &w)?, Observable::trapezoid(&parse_rational(&self.g_at)?, &w)?))
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_perm(s: &str) -> Result<Permutation> {
    s.parse()
}

fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("grid must look like lo..hi, got {s:?}"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let (lo, hi): (u32, u32) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if lo < 2 || hi < lo || hi > 30 {
        return Err(bad());
    }
    Ok((lo..=hi).map(|k| 1usize << k).collect())
}

fn execute(cli: &Cli) -> Result<PathBuf> {
    let bits = runs::precision_bits()?;
    if let Some(t) = runs::threads()? {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let config = json!({ "args": serde_json::to_value(&cli.command).unwrap(), "precision_bits": bits });
    let name = match &cli.command {
        Command::Classify { .. } => "classify",
        Command::Induce { .. } => "induce",
        Command::Lyapunov { .. } => "lyapunov",
        Command::GoodWord { .. } => "good-word",
        Command::Twisted { .. } => "twisted",
        Command::Spectral { .. } => "spectral",
        Command::Correlate { .. } => "correlate",
        Command::Dichotomy { .. } => "dichotomy",
        Command::LowerBound { .. } => "lower-bound",
        Command::VeechFreq { .. } => "veech-freq",
    };
    // validate and compute before touching the file system
    let mut outputs: Vec<(String, Output)> = vec![];
    let mut stdout = None;
    match &cli.command {
        Command::Classify { perm } => {
            let c = classify(&parse_perm(perm)?)?;
            stdout = Some(serde_json::to_string(&c).unwrap());
            outputs.push(("classify.json".into(), Output::Json(serde_json::to_value(&c).unwrap())));
        }
        Command::Induce { iet, steps } => {
            let (t, _) = iet.resolve(bits)?;
            let mut st = Induction::new(&t);
            let done = st.run(*steps)?;
            let mut csv = String::from("step,kind,winner,loser\n");
            for (i, s) in done.iter().enumerate() {
                csv.push_str(&format!("{},{},{},{}\n", i + 1, s.kind.letter(), t.perm().label(s.winner), t.perm().label(s.loser)));
            }
            outputs.push(("steps.csv".into(), Output::Csv(csv)));
            let mut z = String::from("block,kind,length\n");
            let mut i = 0;
            let mut block = 0;
            while i < done.len() {
                let j = done[i..].iter().position(|s| s.kind != done[i].kind).map_or(done.len(), |p| i + p);
                block += 1;
                z.push_str(&format!("{block},{},{}\n", done[i].kind.letter(), j - i));
                i = j;
            }
            outputs.push(("zorich.csv".into(), Output::Csv(z)));
            let path = RauzyPath::from_kinds(t.perm(), &done.iter().map(|s| s.kind).collect::<Vec<_>>());
            let m = path_matrix(&path)?;
            let rows: Vec<Vec<String>> = m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
            outputs.push((
                "path.json".into(),
                Output::Json(json!({ "start": t.perm().to_string(), "end": st.perm.to_string(), "matrix": rows })),
            ));
        }
        Command::Lyapunov { perm, steps, samples, seed } => {
            let est = lyapunov_estimate(&parse_perm(perm)?, &LebesgueSampler { seed: *seed }, *steps, *samples)?;
            outputs.push(("lyapunov.json".into(), Output::Json(serde_json::to_value(&est).unwrap())));
        }
        Command::GoodWord { perm, budget } => {
            let g = find_good_word(&parse_perm(perm)?, *budget)?;
            outputs.push(("good_word.json".into(), Output::Json(serde_json::to_value(&g).unwrap())));
        }
        Command::Twisted { perm, blocks, grid, s, seed } => {
            let p = parse_perm(perm)?;
            let g = find_good_word(&p, 10_000_000)?;
            let zeta = g.substitution.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let middles: Vec<Substitution> = (0..*blocks)
                .map(|_| if rng.gen::<bool>() { zeta.clone() } else { Substitution::identity(zeta.labels().to_vec()) })
                .collect();
            let seq = SadicSequence::new(zeta, middles)?;
            let weights: Vec<f64> = match s {
                Some(text) => text
                    .split_whitespace()
                    .map(|x| x.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad weight {x:?}"))))
                    .collect::<Result<_>>()?,
                None => vec![1.0; p.d()],
            };
            if weights.len() != p.d() {
                return Err(Error::DimensionMismatch { expected: p.d(), found: weights.len() });
            }
            let mut csv = String::from("omega,max_phi,mainbound\n");
            for k in 0..*grid {
                let w = k as f64 / *grid as f64;
                let phi = max_phi(&seq, &weights, w, *blocks)?;
                let mb = mainbound(&seq, &weights, w, *blocks)?;
                csv.push_str(&format!("{},{},{}\n", fmt_f(w), fmt_f(phi), fmt_f(mb.bound)));
            }
            outputs.push(("twisted.csv".into(), Output::Csv(csv)));
            outputs.push(("good_word.json".into(), Output::Json(serde_json::to_value(&g).unwrap())));
        }
        Command::Spectral { iet, obs, omega, r, n, base_points, bound } => {
            let (t, _) = iet.resolve(bits)?;
            let (f, _) = obs.build()?;
            let m = empirical_spectral_mass(&t, &f.centered(), *omega, *r, *n, *base_points, iet.seed)?;
            let fejer = match bound {
                Some(b) => Some(fejer_mass_bound(b[0], b[1], b[2], *omega, *r)?),
                None => None,
            };
            outputs.push(("spectral.json".into(), Output::Json(json!({ "mass": m, "fejer_bound": fejer }))));
        }
        Command::Correlate { iet, obs, grid } => {
            let (t, id) = iet.resolve(bits)?;
            let (f, g) = obs.build()?;
            let series = cesaro_decay(&t, &id, &f, &g, &parse_grid(grid)?, iet.seed, ietlab::experiments::DEFAULT_PIECE_BUDGET)?;
            let fits = compare_models(&series.n_grid, &series.c).ok();
            outputs.push(("series.csv".into(), Output::Csv(series.to_csv())));
            outputs.push(("fits.json".into(), Output::Json(json!({ "series": series, "fits": fits }))));
        }
        Command::Dichotomy { config } => {
            let cfg: DichotomyConfig = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
                    serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))?
                }
                None => DichotomyConfig::default(),
            };
            let report = dichotomy_run(&cfg)?;
            outputs.push(("rotation_series.csv".into(), Output::Csv(report.rotation_arm.series.to_csv())));
            outputs.push(("other_series.csv".into(), Output::Csv(report.other_arm.series.to_csv())));
            outputs.push((
                "report.json".into(),
                Output::Json(json!({ "report": report, "verdict": report.verdict() })),
            ));
            stdout = Some(serde_json::to_string(&json!({ "verdict": report.verdict(), "ordering": report.ordering, "model_preference": report.model_preference })).unwrap());
        }
        Command::LowerBound { n, eps, c0, fib, seed } => {
            let rep = golden_tower(*fib)?;
            let mut cfg = LowerBoundConfig::new(*n, *eps);
            cfg.c0 = *c0;
            cfg.seed = *seed;
            let cert = lower_bound_construct(&rep, &cfg)?;
            let checks: serde_json::Map<String, serde_json::Value> =
                cert.checks().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            outputs.push(("certificate.json".into(), Output::Json(json!({ "certificate": cert, "checks": checks, "holds": cert.holds() }))));
        }
        Command::VeechFreq { fixture: name, seed, n, t, eps } => {
            let path = fixture_path(name, *seed, *n)?;
            let ts: Vec<BigRational> = t.split_whitespace().map(parse_rational).collect::<Result<_>>()?;
            let mut csv = String::from("t,fraction\n");
            for x in &ts {
                csv.push_str(&format!("{},{}\n", format_rational(x), fmt_f(veech_frequency(&path, x, *eps, *n)?)));
            }
            outputs.push(("veech.csv".into(), Output::Csv(csv)));
        }
    }
    let mut run = RunDir::create(&cli.out, name, config)?;
    for (file, out) in outputs {
        match out {
            Output::Csv(body) => run.write_csv(&file, &body)?,
            Output::Json(v) => run.write_json(&file, &v)?,
        };
    }
    let dir = run.finish()?;
    if let Some(s) = stdout {
        println!("{s}");
    }
    Ok(dir)
}

enum Output {
    Csv(String),
    Json(serde_json::Value),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(dir) => {
            eprintln!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
