use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qsmatch::basin::{self, RasterConfig, Region, Window};
use qsmatch::document::{self, format_real, parse_point, GateDocument, DEFAULT_DIGITS};
use qsmatch::gate::{contraction_gate, single_qubit_gate, synthesize_unitary};
use qsmatch::matcher::{DEFAULT_MAX_ITER, DEFAULT_TARGET_SQR};
use qsmatch::{protocol, Complex64, Error, ExtComplex, Matcher, MatcherSpec, Result, Verdict};

#[derive(Parser)]
#[command(name = "qsmatch", version, about = "Quantum state matching with measurement-induced nonlinear qubit maps")]
struct Cli {
    /// Significant digits in numeric output.
    #[arg(long, global = true, value_name = "D", default_value_t = DEFAULT_DIGITS)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// Reference state label as RE,IM or inf.
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true, value_parser = point)]
    z1: ExtComplex,
    /// Squared overlap threshold |s|².
    #[arg(long, value_name = "S2")]
    overlap2: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Build the matcher map and print its summary.
    Construct {
        #[command(flatten)]
        spec: SpecArgs,
        /// Also write the matcher document here.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Synthesize a gate realizing the matcher map.
    Synth {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Write the contraction gate and single-qubit rotation instead.
        #[arg(long)]
        decomposed: bool,
    },
    /// Run the protocol with a stored gate and print the trajectory.
    Simulate {
        #[arg(long, value_name = "PATH")]
        gate: PathBuf,
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true, value_parser = point)]
        z0: ExtComplex,
        #[arg(long, value_name = "N")]
        steps: usize,
        /// Draw measurement outcomes instead of conditioning on success.
        #[arg(long)]
        sample: bool,
        #[arg(long, value_name = "K", requires = "sample", default_value_t = 0)]
        seed: u64,
    },
    /// Decide whether a state matches the reference.
    Match {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true, value_parser = point)]
        z0: ExtComplex,
        /// Squared overlap with an attractor that ends the iteration.
        #[arg(long, value_name = "T", default_value_t = DEFAULT_TARGET_SQR)]
        target2: f64,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Render the basins of attraction as PGM images.
    Raster {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        #[arg(long, num_args = 2, value_names = ["NX", "NY"], default_values_t = [512, 512])]
        res: Vec<usize>,
        /// Window center and half-width; defaults to the Julia circle.
        #[arg(long, value_name = "CRE,CIM,HW", allow_hyphen_values = true, value_parser = window)]
        window: Option<Window>,
        #[arg(long, value_name = "T", default_value_t = DEFAULT_TARGET_SQR)]
        target2: f64,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Expected number of input qubits per surviving output qubit.
    Resources {
        #[arg(long, value_name = "PATH")]
        gate: PathBuf,
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true, value_parser = point)]
        z0: ExtComplex,
        #[arg(long, value_name = "N")]
        steps: usize,
        /// Also estimate the count by Monte Carlo with this many trials.
        #[arg(long, value_name = "N")]
        trials: Option<usize>,
        #[arg(long, value_name = "K", default_value_t = 0)]
        seed: u64,
    },
}

fn point(s: &str) -> std::result::Result<ExtComplex, String> {
    parse_point(s).map_err(|e| e.to_string())
}

fn window(s: &str) -> std::result::Result<Window, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("not a number: {p:?}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [re, im, hw] => Ok(Window { center: Complex64::new(re, im), half_width: hw }),
        _ => Err(format!("expected CRE,CIM,HW, got {s:?}")),
    }
}

fn fmt_point(z: &ExtComplex, d: usize) -> String {
    match z.finite() {
        Some(z) => format!("{},{}", format_real(z.re, d), format_real(z.im, d)),
        None => "inf".into(),
    }
}

fn matcher(spec: &SpecArgs) -> Result<Matcher> {
    Matcher::build(MatcherSpec::from_overlap_sqr(spec.z1, spec.overlap2)?)
}

fn io_err(e: io::Error) -> Error {
    Error::Io { path: "<stdout>".into(), source: e }
}

fn run(cli: Cli) -> Result<()> {
    let d = cli.precision;
    if !(1..=17).contains(&d) {
        return Err(Error::Domain(format!("precision must lie in 1..=17, got {d}")));
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Construct { spec, json } => {
            let m = matcher(&spec)?;
            let f = m.map();
            let j = m.julia_circle();
            let mut lines = vec![
                format!("reference: {}", fmt_point(&m.reference(), d)),
                format!("partner: {}", fmt_point(&m.partner(), d)),
                format!("s_eps: {}", format_real(m.spec().s_eps, d)),
                format!("epsilon: {}", format_real(m.spec().epsilon(), d)),
            ];
            for (name, c) in ["a0", "a1", "a2", "b0", "b1", "b2"].iter().zip(f.coefficients()) {
                lines.push(format!("{name}: {}", fmt_point(&ExtComplex::Finite(c), d)));
            }
            match (j.center(), j.radius()) {
                (Some(c), Some(r)) => {
                    lines.push(format!("julia_center: {}", fmt_point(&c.into(), d)));
                    lines.push(format!("julia_radius: {}", format_real(r, d)));
                }
                _ => {
                    let (a, b, c) = j.coefficients();
                    lines.push(format!(
                        "julia_line: {} |z|^2 + 2 Re(conj({}) z) + {} = 0",
                        format_real(a, d),
                        fmt_point(&b.into(), d),
                        format_real(c, d)
                    ));
                }
            }
            lines.push(format!("repelling_point: {}", fmt_point(&m.repelling_point(), d)));
            for l in lines {
                writeln!(out, "{l}").map_err(io_err)?;
            }
            if let Some(path) = json {
                document::save_matcher(&m, &path)?;
            }
        }
        Command::Synth { spec, out: path, decomposed } => {
            let m = matcher(&spec)?;
            let (doc, gate) = if decomposed {
                let eps = m.spec().epsilon();
                let u = contraction_gate(eps)?;
                let v = single_qubit_gate(m.unitary_part());
                (GateDocument::decomposed(eps, &u, &v), u.conjugated_by(&v))
            } else {
                let u = synthesize_unitary(m.map())?;
                (GateDocument::two_qubit(&u), u)
            };
            document::save_gate(&doc.with_matcher(&m), &path)?;
            let gap = gate.induced_map()?.projective_distance(m.map());
            writeln!(out, "unitarity_error: {}", format_real(gate.unitarity_error(), d)).map_err(io_err)?;
            writeln!(out, "map_mismatch: {}", format_real(gap, d)).map_err(io_err)?;
        }
        Command::Simulate { gate, z0, steps, sample, seed } => {
            let (doc, u) = document::load_gate(&gate)?;
            let reference = doc.reference.map(ExtComplex::from);
            let (zs, probs) = if sample {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let t = protocol::sample_trajectory(&u, &z0, steps, &mut rng)?;
                if let Some(k) = t.aborted_at {
                    eprintln!("discarded at step {k}");
                }
                (t.zs, t.probs)
            } else {
                let t = protocol::simulate_trajectory(&u, &z0, steps)?;
                (t.zs, t.probs)
            };
            document::write_trajectory(&mut out, &zs, &probs, reference.as_ref(), d).map_err(io_err)?;
        }
        Command::Match { spec, z0, target2, max_iter } => {
            let m = matcher(&spec)?;
            if !(target2 > 0.0 && target2 < 1.0) {
                return Err(Error::Domain(format!("target² must lie in (0, 1), got {target2}")));
            }
            let line = match m.match_state(&z0, target2.sqrt(), max_iter)? {
                Verdict::Reference(k) => format!("MATCH k={k}"),
                Verdict::Partner(k) => format!("NOMATCH k={k}"),
                Verdict::Undecided => "UNDECIDED".to_string(),
            };
            writeln!(out, "{line}").map_err(io_err)?;
        }
        Command::Raster { spec, out: path, res, window, target2, max_iter, csv } => {
            let m = matcher(&spec)?;
            let (nx, ny) = (res[0], res[1]);
            let cfg = match window {
                Some(w) => RasterConfig::new(w, nx, ny)?,
                None => RasterConfig::default_for(&m, nx, ny)?,
            }
            .with_threshold_sq(target2)?
            .with_max_iter(max_iter)?;
            let grid = basin::rasterize(&m, &cfg)?;
            basin::write_image(&grid, &path)?;
            if let Some(csv) = csv {
                basin::write_csv(&grid, &csv, d)?;
            }
            let count = |r: Region| grid.pixels.iter().filter(|p| p.region == r).count();
            writeln!(
                out,
                "reference: {} partner: {} undecided: {}",
                count(Region::Reference),
                count(Region::Partner),
                count(Region::Undecided)
            )
            .map_err(io_err)?;
        }
        Command::Resources { gate, z0, steps, trials, seed } => {
            let (_, u) = document::load_gate(&gate)?;
            let t = protocol::simulate_trajectory(&u, &z0, steps)?;
            let expected = protocol::expected_resources(&t.probs, steps)?;
            writeln!(out, "expected_inputs: {}", format_real(expected, d)).map_err(io_err)?;
            if let Some(trials) = trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mc = protocol::sample_resources(&u, &z0, steps, trials, &mut rng)?;
                writeln!(out, "sampled_inputs: {}", format_real(mc, d)).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let numerical = matches!(
                e,
                Error::Degenerate(_) | Error::Parabolic(_) | Error::PostSelectionImpossible { .. }
            );
            ExitCode::from(if numerical { 3 } else { 2 })
        }
    }
}
