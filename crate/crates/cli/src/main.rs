use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use metaplectic_core::error::{Error, Result};
use metaplectic_core::matcore::{c, CMat, C64};
use metaplectic_core::poly::Poly;
use metaplectic_core::suites::{self, SuiteConfig};
use metaplectic_core::sympgroup::{self, SpLieReal, SuBlocks, SuLie};
use metaplectic_core::weyl::QuadForm2n;
use metaplectic_core::{json as mjson, metaplectic, moyal, quadrature, weyl};

#[derive(Parser)]
#[command(name = "metaplectic", version, about = "Metaplectic kernels, Weyl symbols and star exponentials")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Dimension, used when no input matrix fixes it.
    #[arg(long, global = true, default_value_t = 1)]
    n: usize,
    #[arg(long, global = true, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Decide the phase of c_n by quadrature.
    #[arg(long, global = true)]
    adjudicate_phase: bool,
    /// Gauss-Hermite nodes per axis.
    #[arg(long, global = true)]
    nodes: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the kernel of σ(k) at (z, w).
    Kernel {
        #[arg(long)]
        k: String,
        /// z then w, each as re/im pairs.
        #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
        at: Vec<f64>,
    },
    /// Compare σ(k1)σ(k2) with σ(k1 k2).
    Cocycle {
        #[arg(long)]
        k1: String,
        #[arg(long)]
        k2: String,
    },
    #[command(subcommand)]
    Weyl(WeylCmd),
    #[command(subcommand)]
    Moyal(MoyalCmd),
    /// Evaluate a symbol or kernel at a point.
    Eval {
        kind: Kind,
        #[command(flatten)]
        input: EvalInput,
    },
    /// Run a verification suite.
    Suite { name: String },
}

#[derive(Subcommand)]
enum WeylCmd {
    /// W₀(σ(k)) at z.
    W0 {
        #[arg(long)]
        k: String,
        #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
        at: Vec<f64>,
    },
    /// W₁(σ(g)) at (x, y).
    W1 {
        #[arg(long)]
        g: String,
        #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
        at: Vec<f64>,
    },
    /// Run one of the Weyl-symbol suites.
    Verify {
        #[arg(long, value_enum)]
        suite: WeylSuite,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WeylSuite {
    W0,
    W1,
    Polar,
    Phase,
}

#[derive(Subcommand)]
enum MoyalCmd {
    /// Moyal product of two polynomials.
    Star {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// exp_∗(-i q_M) at a phase-space point.
    StarExp {
        #[arg(long = "M")]
        m: String,
        #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
        point: Vec<f64>,
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[arg(long)]
        closed: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    W0Sigma,
    W0Dsigma,
    W1Sigma,
    W1Exp,
    W1Dsigma,
    BerezinSigma,
    BerezinDsigma,
    StarExp,
    Hormander,
    Kernel,
}

#[derive(Args)]
struct EvalInput {
    /// Element of S.
    #[arg(long)]
    k: Option<String>,
    /// Element of Sp(n,R).
    #[arg(long)]
    g: Option<String>,
    /// Lie algebra element.
    #[arg(long)]
    x: Option<String>,
    /// Symmetric matrix, or `<s>I` for s times the identity.
    #[arg(long = "M")]
    m: Option<String>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    at: Vec<f64>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    point: Vec<f64>,
    #[arg(long, default_value_t = 40)]
    order: usize,
    #[arg(long)]
    closed: bool,
}

enum Outcome {
    Done,
    SuiteFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::SuiteFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::AmbiguousPhase => {
                    eprintln!("hint: rerun with --adjudicate-phase");
                    ExitCode::from(3)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let o = &cli.opts;
    if !(o.lambda > 0.0 && o.lambda.is_finite()) {
        return Err(Error::BadConfig(format!("λ must be positive, got {}", o.lambda)));
    }
    match &cli.cmd {
        Cmd::Kernel { k, at } => {
            let input = EvalInput { k: Some(k.clone()), ..EvalInput::empty(at) };
            print_value(o, eval(Kind::Kernel, &input, o)?);
        }
        Cmd::Cocycle { k1, k2 } => {
            let k1 = read_su(k1)?;
            let k2 = read_su(k2)?;
            let r = metaplectic::sigma_cocycle_sign(&k1, &k2, o.lambda)?;
            match o.format {
                Format::Json => println!(
                    "{}",
                    json!({
                        "sign": r.sign,
                        "scalar": [r.scalar.re, r.scalar.im],
                        "param_residual": r.param_residual,
                        "predicted_sign": r.predicted_sign,
                        "via_quadrature": r.via_quadrature,
                    })
                ),
                Format::Csv => {
                    println!("sign,scalar_re,scalar_im,param_residual,predicted_sign,via_quadrature");
                    println!(
                        "{},{:e},{:e},{:e},{},{}",
                        r.sign, r.scalar.re, r.scalar.im, r.param_residual, r.predicted_sign, r.via_quadrature
                    );
                }
            }
        }
        Cmd::Weyl(WeylCmd::W0 { k, at }) => {
            let input = EvalInput { k: Some(k.clone()), ..EvalInput::empty(at) };
            print_value(o, eval(Kind::W0Sigma, &input, o)?);
        }
        Cmd::Weyl(WeylCmd::W1 { g, at }) => {
            let input = EvalInput { g: Some(g.clone()), ..EvalInput::empty(at) };
            print_value(o, eval(Kind::W1Sigma, &input, o)?);
        }
        Cmd::Weyl(WeylCmd::Verify { suite }) => {
            let name = match suite {
                WeylSuite::W0 => "w0-quadrature",
                WeylSuite::W1 => "w1-bridge",
                WeylSuite::Polar => "polar",
                WeylSuite::Phase => "phase",
            };
            return run_suite(name, o);
        }
        Cmd::Moyal(MoyalCmd::Star { f, g }) => {
            let f = Poly::from_json(&read_json(f)?)?;
            let g = Poly::from_json(&read_json(g)?)?;
            if f.nvars() != g.nvars() || f.nvars() % 2 != 0 {
                return Err(Error::Shape("both polynomials need the same even number of variables".into()));
            }
            println!("{}", moyal::moyal_mul(&f, &g).to_json());
        }
        Cmd::Moyal(MoyalCmd::StarExp { m, point, order, closed }) => {
            let (value, last) = star_exp(m, point, *order, *closed, o)?;
            match o.format {
                Format::Json => println!("{}", json!({ "value": [value.re, value.im], "last_term": last })),
                Format::Csv => {
                    println!("re,im,last_term");
                    println!("{:e},{:e},{}", value.re, value.im, last.map_or(String::new(), |l| format!("{l:e}")));
                }
            }
        }
        Cmd::Eval { kind, input } => print_value(o, eval(*kind, input, o)?),
        Cmd::Suite { name } => return run_suite(name, o),
    }
    Ok(Outcome::Done)
}

impl EvalInput {
    fn empty(at: &[f64]) -> Self {
        EvalInput { k: None, g: None, x: None, m: None, at: at.to_vec(), point: vec![], order: 40, closed: false }
    }
}

fn run_suite(name: &str, o: &Opts) -> Result<Outcome> {
    let cfg = SuiteConfig { n: o.n, lambda: o.lambda, trials: o.trials, seed: o.seed, tol: o.tol, nodes: o.nodes };
    let report = suites::run_suite(name, &cfg)?;
    match o.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => print!("{}", report.to_csv()),
    }
    eprintln!(
        "{}: {} of {} cases failed, max residual {:.3e} (tol {:e})",
        report.suite,
        report.failures,
        report.records.len(),
        report.max_residual,
        report.tol
    );
    Ok(if report.passed() { Outcome::Done } else { Outcome::SuiteFailed })
}

fn print_value(o: &Opts, z: C64) {
    match o.format {
        Format::Json => println!("{}", mjson::complex_to_value(z)),
        Format::Csv => {
            println!("re,im");
            println!("{:e},{:e}", z.re, z.im);
        }
    }
}

fn read_json(path: &str) -> Result<Value> {
    let text = fs::read_to_string(Path::new(path)).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

fn read_su(path: &str) -> Result<SuBlocks> {
    mjson::su_from_value(&read_json(path)?)
}

/// `0.15I` means 0.15 times the identity of size 2n.
fn read_quad_form(arg: &str, n: usize) -> Result<QuadForm2n> {
    if let Some(s) = arg.strip_suffix('I') {
        if let Ok(s) = s.parse::<f64>() {
            return QuadForm2n::new(CMat::scalar(2 * n, c(s, 0.0)));
        }
    }
    QuadForm2n::new(mjson::matrix_from_value(&read_json(arg)?)?)
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::BadConfig(format!("this evaluation needs --{flag}")))
}

fn complex_point(at: &[f64], n: usize) -> Result<Vec<C64>> {
    if at.len() != 2 * n {
        return Err(Error::Shape(format!("expected {} reals (re/im pairs), got {}", 2 * n, at.len())));
    }
    Ok(at.chunks(2).map(|p| c(p[0], p[1])).collect())
}

fn real_point(at: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let z = complex_point(at, n)?;
    Ok((z.iter().map(|w| w.re).collect(), z.iter().map(|w| w.im).collect()))
}

fn quadrature_nodes(o: &Opts, n: usize) -> Result<usize> {
    if n > 2 {
        return Err(Error::BadConfig("phase adjudication needs n ≤ 2".into()));
    }
    Ok(o.nodes.unwrap_or(quadrature::default_nodes(n)))
}

fn w0_value(k: &SuBlocks, z: &[C64], o: &Opts) -> Result<C64> {
    if o.adjudicate_phase {
        let adj = weyl::adjudicate_phase(k, z, o.lambda, quadrature_nodes(o, k.n())?)?;
        eprintln!("phase {:+.6}{:+.6}i, quadrature rel error {:.3e}", adj.phase.re, adj.phase.im, adj.rel_error);
        return Ok(adj.closed_value);
    }
    weyl::w0_sigma_closed(k, z, o.lambda)
}

fn star_exp(m: &str, point: &[f64], order: usize, closed: bool, o: &Opts) -> Result<(C64, Option<f64>)> {
    let q = read_quad_form(m, o.n)?;
    if point.len() != 2 * q.n {
        return Err(Error::Shape(format!("expected {} coordinates, got {}", 2 * q.n, point.len())));
    }
    if closed {
        return Ok((moyal::star_exp_quadratic_closed(&q, point)?, None));
    }
    let s = moyal::star_exp_series(&q, c(0.0, -1.0), order, point)?;
    Ok((s.value, Some(s.last_term)))
}

fn eval(kind: Kind, input: &EvalInput, o: &Opts) -> Result<C64> {
    let lambda = o.lambda;
    let sp_lie = || -> Result<SpLieReal> {
        let m = mjson::matrix_from_value(&read_json(need(&input.x, "x")?)?)?;
        if m.max_imag() > 0.0 {
            return Err(Error::Parse("Lie algebra element must be real".into()));
        }
        SpLieReal::from_matrix(&m)
    };
    let su_lie = || -> Result<SuLie> { SuLie::from_matrix(&mjson::matrix_from_value(&read_json(need(&input.x, "x")?)?)?) };
    match kind {
        Kind::Kernel => {
            let k = read_su(need(&input.k, "k")?)?;
            let n = k.n();
            if input.at.len() != 4 * n {
                return Err(Error::Shape(format!("kernel needs z and w: {} reals", 4 * n)));
            }
            let z = complex_point(&input.at[..2 * n], n)?;
            let w = complex_point(&input.at[2 * n..], n)?;
            Ok(metaplectic::sigma_kernel(&k, lambda)?.eval(&z, &w))
        }
        Kind::W0Sigma => {
            let k = read_su(need(&input.k, "k")?)?;
            let z = complex_point(&input.at, k.n())?;
            w0_value(&k, &z, o)
        }
        Kind::W0Dsigma => {
            let x = su_lie()?;
            weyl::w0_dsigma_closed(&x, &complex_point(&input.at, x.n())?, lambda)
        }
        Kind::W1Sigma => {
            let g = mjson::sp_from_value(&read_json(need(&input.g, "g")?)?)?;
            let (xs, ys) = real_point(&input.at, g.n())?;
            if o.adjudicate_phase {
                let z = complex_point(&input.at, g.n())?;
                return w0_value(&sympgroup::su_from_sp(&g)?, &z, o);
            }
            weyl::w1_sigma_closed(&g, &xs, &ys, lambda)
        }
        Kind::W1Exp => {
            let x = sp_lie()?;
            let (xs, ys) = real_point(&input.at, x.n())?;
            weyl::w1_exp_closed(&x, &xs, &ys, lambda)
        }
        Kind::W1Dsigma => {
            let x = sp_lie()?;
            let (xs, ys) = real_point(&input.at, x.n())?;
            Ok(weyl::w1_dsigma_closed(&x, &xs, &ys, lambda))
        }
        Kind::BerezinSigma => {
            let k = read_su(need(&input.k, "k")?)?;
            metaplectic::berezin_symbol_sigma(&k, &complex_point(&input.at, k.n())?, lambda)
        }
        Kind::BerezinDsigma => {
            let x = su_lie()?;
            metaplectic::berezin_symbol_dsigma(&x, &complex_point(&input.at, x.n())?, lambda)
        }
        Kind::StarExp => {
            let point = if input.point.is_empty() { &input.at } else { &input.point };
            Ok(star_exp(need(&input.m, "M")?, point, input.order, input.closed, o)?.0)
        }
        Kind::Hormander => {
            let q = read_quad_form(need(&input.m, "M")?, o.n)?;
            let (xs, ys) = real_point(&input.at, q.n)?;
            weyl::hormander_exp_symbol(&q, &xs, &ys)
        }
    }
}
