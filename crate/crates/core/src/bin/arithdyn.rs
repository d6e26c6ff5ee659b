use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;

use arithdyn::archplaces::{green_grid, write_grid_csv, GridSpec, DEFAULT_DEPTH};
use arithdyn::divisor::divisor_points;
use arithdyn::dynmodel::{bad_reduction_primes, check_negativity_conditions, DEFAULT_NEGATIVITY_DEPTH};
use arithdyn::equilibrium::{build_tree, default_base_point, integrate_log};
use arithdyn::exact::arith::is_prime_u64;
use arithdyn::exact::form::HomogeneousForm;
use arithdyn::exact::parse::parse_binary_form;
use arithdyn::finiteplaces::finite_local_height;
use arithdyn::heights::{canonical_height_divisor, canonical_height_point, default_pushforward_depth};
use arithdyn::mahler::{corollary_check, mahler_report, EPolicy, LhsMethod, MahlerConfig, DEFAULT_TREE_DEPTH};
use arithdyn::{Error, MapModel, ProjectivePoint, Result};

#[derive(Parser)]
#[command(name = "arithdyn", version, about = "Canonical heights and the generalized Mahler formula")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct ModelArgs {
    /// Model JSON file: {"n", "degree", "variables", "lift"}.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    output: Output,
    /// Shorthand for --output json.
    #[arg(long)]
    json: bool,
}

impl ModelArgs {
    fn load(&self) -> Result<MapModel> {
        MapModel::load(&self.model)
    }

    fn mode(&self) -> Output {
        if self.json {
            Output::Json
        } else {
            self.output
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model and report its bad primes.
    Check {
        #[command(flatten)]
        m: ModelArgs,
    },
    /// Local height at a finite prime.
    Localheight {
        #[command(flatten)]
        m: ModelArgs,
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Target error in valuation units.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Canonical height of a point or of the divisor of a binary form.
    Height {
        #[command(flatten)]
        m: ModelArgs,
        #[arg(long, conflicts_with = "poly", allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Pushforward steps for --poly.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Integral of log |F(z, 1)| against the equilibrium measure.
    Measure {
        #[command(flatten)]
        m: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 12)]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Base point as "re,im" in the affine chart.
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
        /// Also write the preimage tree as CSV.
        #[arg(long)]
        tree_csv: Option<PathBuf>,
    },
    /// Green function G(z, 1) on a grid, as CSV.
    Grid {
        #[command(flatten)]
        m: ModelArgs,
        /// "re_min,re_max,im_min,im_max"
        #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
        window: String,
        /// "nx,ny" or a single count for both axes.
        #[arg(long, default_value = "101")]
        res: String,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Both sides of the Mahler formula for F, or of its difference form
    /// with --minus.
    Mahler {
        #[command(flatten)]
        m: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        minus: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TREE_DEPTH)]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        pushforward_depth: Option<u32>,
        #[arg(long, value_enum, default_value = "auto")]
        lhs: Lhs,
        /// Fail instead of falling back to residual mode for E.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Lhs {
    Auto,
    Split,
    Pushforward,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("--{name} must be a positive number, got {v}")))
    }
}

fn depth_range(name: &str, v: u32, max: u32) -> Result<()> {
    if (1..=max).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("--{name} must be in 1..={max}, got {v}")))
    }
}

fn floats(s: &str, name: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidInput(format!("--{name}: bad number '{t}'")))
        })
        .collect()
}

fn poly_arg(model: &MapModel, s: &str) -> Result<HomogeneousForm> {
    if model.n() != 1 {
        return Err(Error::Capability("binary forms need a model on P^1".into()));
    }
    parse_binary_form(s, model.variables())
}

fn emit(out: &mut impl Write, s: &str) -> Result<()> {
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn json_line(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Runs a command; the returned code is 0 or 1 (residual over budget).
fn run(cli: Cli, out: &mut impl Write) -> Result<u8> {
    match cli.command {
        Command::Check { m } => {
            let model = m.load()?;
            let report = bad_reduction_primes(&model);
            let neg = check_negativity_conditions(&model, DEFAULT_NEGATIVITY_DEPTH).ok();
            if m.mode() == Output::Json {
                let mut v = serde_json::json!({
                    "valid": true,
                    "n": model.n(),
                    "degree": model.degree(),
                    "reduction": report.to_json(),
                });
                if let Some(n) = &neg {
                    v["negativity"] = serde_json::to_value(n).expect("serializable");
                }
                emit(out, &json_line(&v))?;
            } else {
                let mut s = format!("valid, n = {}, degree {}\n", model.n(), model.degree());
                s += &format!("resultant {}\n", model.resultant());
                if report.good_everywhere() {
                    s += "good reduction everywhere\n";
                } else {
                    let primes: Vec<String> = report.bad_primes.iter().map(|(p, _)| p.to_string()).collect();
                    s += &format!("bad primes: {}\n", primes.join(", "));
                    if let Some(c) = &report.cofactor {
                        s += &format!("unfactored cofactor: {c}\n");
                    }
                    for (p, pts) in &report.indeterminacy {
                        let shown: Vec<String> = pts
                            .iter()
                            .map(|v| format!("({})", v.iter().map(u64::to_string).collect::<Vec<_>>().join(":")))
                            .collect();
                        s += &format!("  mod {p}: common zeros {}\n", shown.join(" "));
                    }
                }
                if let Some(n) = neg {
                    s += &format!(
                        "negativity conditions: {}\n",
                        if n.all_k {
                            "hold for all k".to_string()
                        } else if n.holds {
                            format!("hold for k <= {}", n.verified_up_to)
                        } else {
                            format!("fail at k = {}", n.first_failure.unwrap_or(0))
                        }
                    );
                }
                emit(out, &s)?;
            }
            Ok(0)
        }
        Command::Localheight { m, prime, point, tol } => {
            positive("tol", tol)?;
            if !is_prime_u64(prime) {
                return Err(Error::InvalidInput(format!("--prime {prime} is not prime")));
            }
            let point: ProjectivePoint = point.parse()?;
            let model = m.load()?;
            if point.dim() != model.n() {
                return Err(Error::DegreeMismatch(format!("point in P^{} for a map of P^{}", point.dim(), model.n())));
            }
            let target = BigRational::from_float(tol).expect("finite");
            let h = finite_local_height(&model, prime, &point, &target);
            let nats = h.value * (prime as f64).ln();
            if m.mode() == Output::Json {
                let mut v = h.to_json();
                v["prime"] = prime.into();
                v["nats"] = format!("{nats:.15}").into();
                emit(out, &json_line(&v))?;
            } else {
                let value = match h.exact_value() {
                    Some(q) => format!("{q} (exact)"),
                    None => format!("in [{}, {}] after {} steps", h.lower_bound, h.upper_bound, h.depth),
                };
                emit(out, &format!("h_{prime}({point}) = {value}\ncontribution {nats:.12} nats\n"))?;
            }
            Ok(0)
        }
        Command::Height { m, point, poly, tol, depth } => {
            positive("tol", tol)?;
            if let Some(k) = depth {
                depth_range("depth", k, 64)?;
            }
            let model = m.load()?;
            let h = match (point, poly) {
                (Some(p), None) => canonical_height_point(&model, &p.parse()?, tol)?,
                (None, Some(f)) => {
                    let f = poly_arg(&model, &f)?;
                    let f = f.primitive_part()?;
                    let k = depth.unwrap_or_else(|| default_pushforward_depth(model.degree()));
                    canonical_height_divisor(&model, &f, k)?
                }
                _ => return Err(Error::InvalidInput("give exactly one of --point and --poly".into())),
            };
            if m.mode() == Output::Json {
                emit(out, &json_line(&h.to_json()))?;
            } else {
                let mut s = format!("h = {:.12} +- {:.2e}\narch {:.12}\n", h.value, h.error_bound, h.arch);
                for (p, c) in &h.finite {
                    s += &format!("  {c} log {p}\n");
                }
                emit(out, &s)?;
            }
            Ok(0)
        }
        Command::Measure { m, poly, depth, seed, base, tree_csv } => {
            depth_range("depth", depth, 16)?;
            let base = match base {
                None => default_base_point(),
                Some(s) => {
                    let v = floats(&s, "base")?;
                    if v.len() != 2 {
                        return Err(Error::InvalidInput("--base takes \"re,im\"".into()));
                    }
                    [Complex64::new(v[0], v[1]), Complex64::new(1.0, 0.0)]
                }
            };
            let model = m.load()?;
            let f = poly_arg(&model, &poly)?;
            let tree = build_tree(&model, &base, depth, seed)?;
            let e = integrate_log(&tree, &f)?;
            if let Some(path) = tree_csv {
                let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
                tree.write_csv(&mut file)?;
            }
            if m.mode() == Output::Json {
                let v = serde_json::json!({
                    "value": format!("{:.15}", e.value),
                    "spread": format!("{:.3e}", e.spread),
                    "depth": depth,
                    "seed": seed,
                    "singular_leaves": e.singular_leaves,
                });
                emit(out, &json_line(&v))?;
            } else {
                emit(out, &format!("integral = {:.12} +- {:.2e} (depth {depth})\n", e.value, e.spread))?;
            }
            Ok(0)
        }
        Command::Grid { m, window, res, depth, out: path } => {
            depth_range("depth", depth, 200)?;
            let w = floats(&window, "window")?;
            if w.len() != 4 || w[0] >= w[1] || w[2] >= w[3] {
                return Err(Error::InvalidInput("--window takes re_min,re_max,im_min,im_max".into()));
            }
            let r: Vec<usize> = res
                .split(',')
                .map(|t| t.trim().parse::<usize>().ok().filter(|&n| (1..=4096).contains(&n)))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::InvalidInput(format!("--res: expected counts in 1..=4096, got '{res}'")))?;
            let (nx, ny) = match r.as_slice() {
                [n] => (*n, *n),
                [a, b] => (*a, *b),
                _ => return Err(Error::InvalidInput("--res takes n or nx,ny".into())),
            };
            let model = m.load()?;
            let spec = GridSpec {
                re_min: w[0],
                re_max: w[1],
                im_min: w[2],
                im_max: w[3],
                nx,
                ny,
            };
            let rows = green_grid(&model, &spec, depth)?;
            match path {
                Some(p) => {
                    let mut file = std::io::BufWriter::new(std::fs::File::create(p)?);
                    write_grid_csv(&mut file, &rows)?;
                }
                None => write_grid_csv(out, &rows)?,
            }
            Ok(0)
        }
        Command::Mahler {
            m,
            poly,
            minus,
            depth,
            seed,
            pushforward_depth,
            lhs,
            strict,
            tol,
        } => {
            depth_range("depth", depth, 16)?;
            positive("tol", tol)?;
            if let Some(k) = pushforward_depth {
                depth_range("pushforward-depth", k, 64)?;
            }
            let model = m.load()?;
            let cfg = MahlerConfig {
                tree_depth: depth,
                seed,
                pushforward_depth,
                lhs_method: match lhs {
                    Lhs::Auto => LhsMethod::Auto,
                    Lhs::Split => LhsMethod::Split,
                    Lhs::Pushforward => LhsMethod::Pushforward,
                },
                e_policy: if strict { EPolicy::Strict } else { EPolicy::Fallback },
                target_error: tol,
                ..MahlerConfig::default()
            };
            let f = poly_arg(&model, &poly)?;
            let passes = match minus {
                None => {
                    let r = mahler_report(&model, &f, &cfg)?;
                    if m.mode() == Output::Json {
                        emit(out, &json_line(&r.to_json()))?;
                    } else {
                        let div = divisor_points(&f)?;
                        emit(out, &format!("D has degree {} ({} rational points)\n", div.degree, div.rational.len()))?;
                        emit(out, &r.table())?;
                    }
                    r.passes
                }
                Some(g) => {
                    let g = poly_arg(&model, &g)?;
                    let r = corollary_check(&model, &f, &g, &cfg)?;
                    if m.mode() == Output::Json {
                        emit(out, &json_line(&r.to_json()))?;
                    } else {
                        emit(out, &r.table())?;
                    }
                    r.passes
                }
            };
            Ok(if passes { 0 } else { 1 })
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("ARITHDYN_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidInput(format!("ARITHDYN_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Capability(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut buf = Vec::new();
    let result = configure_threads().and_then(|_| run(cli, &mut buf));
    let _ = stdout.lock().write_all(&buf);
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
