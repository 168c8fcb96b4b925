//! `pvi`: verification suites, Backlund transformations, numeric integration
//! and Lax matrices from the command line.
//!
//! Exit status is 0 on success, 1 when a check fails or a computation hits a
//! pole, and 2 on usage errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use pvi_core::backlund::{self, generator_map, word_eval, BirationalMap};
use pvi_core::hamiltonian::ParamVec;
use pvi_core::lax;
use pvi_core::numeric::{backlund_round_trip, integrate, PhasePoint};
use pvi_core::suites::{corruptions, run_suite, seeded_corruption, SUITES};
use pvi_core::weyl::{apply_word, translation_word, AffineRootVec, Generator, GroupWord};
use pvi_field::{Rational, RationalFunction, Substitution, Var};
use serde_json::json;

#[derive(Parser)]
#[command(name = "pvi", version, about = "Sixth Painleve equation: symmetries, Lax pair and numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(clap::Args, Clone)]
struct Params {
    /// alpha1 alpha2 alpha3 alpha4 as exact rationals; alpha0 follows.
    #[arg(long, num_args = 4, value_parser = parse_rational, allow_hyphen_values = true,
          default_values = ["1/5", "1/10", "1/8", "1/40"])]
    alpha: Vec<Rational>,
}

impl Params {
    fn tail(&self) -> [Rational; 4] {
        std::array::from_fn(|i| self.alpha[i].clone())
    }

    fn param_vec(&self) -> ParamVec {
        ParamVec::from_alpha_tail(self.tail())
    }
}

#[derive(clap::Args, Clone)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite, or `all`.
    Verify {
        suite: String,
        /// Corrupt one constant, chosen by this seed, and run the suite against it.
        #[arg(long)]
        mutate: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Apply a group word, symbolically or at exact values of q, p, t.
    Apply {
        word: String,
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        q: Option<Rational>,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        p: Option<Rational>,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        t: Option<Rational>,
        #[command(flatten)]
        output: Output,
    },
    /// Integrate the Hamiltonian system along the segment from t to t-end.
    Integrate {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        start: Start,
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Compare a transported trajectory with direct re-integration.
    BtCheck {
        #[arg(long, value_parser = parse_generator)]
        gen: Generator,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        start: Start,
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
        /// Accepted endpoint deviation and residual.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Restart points along the segment.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Parameter orbit under repeated application of a word.
    Orbit {
        /// `T1`..`T4` or an explicit word.
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 3)]
        steps: usize,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        output: Output,
    },
    /// Print a Lax or gauge matrix: M, B, G0..G4 or Gamma1, Gamma3, Gamma4.
    Matrices {
        #[arg(long)]
        which: String,
        /// Keep parameters and (q, p, t) as symbols.
        #[arg(long)]
        symbolic: bool,
        #[command(flatten)]
        params: Params,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "2/5")]
        q: Rational,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "1/2")]
        p: Rational,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "2")]
        t: Rational,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(clap::Args, Clone)]
struct Start {
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "2/5")]
    q: Rational,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "1/2")]
    p: Rational,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "2")]
    t: Rational,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "3")]
    t_end: Rational,
}

impl Start {
    fn point(&self) -> PhasePoint {
        PhasePoint::new(complex(&self.t), complex(&self.q), complex(&self.p))
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    s.parse::<Rational>()
        .map_err(|_| format!("`{s}` is not an exact rational of the form num/den"))
}

fn parse_generator(s: &str) -> Result<Generator, String> {
    s.parse().map_err(|e: pvi_core::CoreError| e.to_string())
}

fn complex(r: &Rational) -> Complex64 {
    RationalFunction::constant(r.clone())
        .eval_complex(&pvi_field::Point::new())
        .expect("constants evaluate")
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<pvi_core::CoreError> for Failure {
    fn from(e: pvi_core::CoreError) -> Self {
        Failure::Check(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn emit(output: &Output, text: String) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Check(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn no_csv(output: &Output, what: &str) -> Result<(), Failure> {
    if output.format == Format::Csv {
        return Err(Failure::Usage(format!("{what} has no CSV form; use json or text")));
    }
    Ok(())
}

fn parse_word(text: &str) -> Result<GroupWord, Failure> {
    let named = match text.trim() {
        "T1" => Some(1),
        "T2" => Some(2),
        "T3" => Some(3),
        "T4" => Some(4),
        _ => None,
    };
    match named {
        Some(i) => Ok(translation_word(i)),
        None => text.parse().map_err(|e: pvi_core::CoreError| Failure::Usage(e.to_string())),
    }
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

fn alphas_of(tail: &[Rational; 4]) -> [Rational; 5] {
    let one = Rational::from_integer(1.into());
    let two = Rational::from_integer(2.into());
    let a0 = one - &tail[0] - &two * &tail[1] - &tail[2] - &tail[3];
    [a0, tail[0].clone(), tail[1].clone(), tail[2].clone(), tail[3].clone()]
}

fn verify(suite: &str, mutate: Option<u64>, output: &Output) -> Outcome {
    no_csv(output, "verify")?;
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Failure::Usage(format!(
            "unknown suite `{suite}`; expected all or one of {}",
            SUITES.join(", ")
        )));
    };
    let mut text = String::new();
    let mut pass = true;
    for name in names {
        let corruption = mutate.map(|seed| seeded_corruption(name, seed)).transpose()?;
        let report = run_suite(name, corruption)?;
        pass &= report.passed();
        match output.format {
            Format::Json => text.push_str(&report.to_json_lines()),
            _ => {
                if let Some(i) = corruption {
                    text.push_str(&format!("# {name} corrupted: {}\n", corruptions(name)?[i]));
                }
                for c in &report.checks {
                    let tag = if c.pass { "PASS" } else { "FAIL" };
                    text.push_str(&format!("{tag} [{}] {}: {}\n", c.suite, c.name, c.detail));
                }
            }
        }
    }
    emit(output, text)?;
    Ok(pass)
}

fn apply(
    word: &str,
    params: &Params,
    at: [&Option<Rational>; 3],
    output: &Output,
) -> Outcome {
    no_csv(output, "apply")?;
    let w = parse_word(word)?;
    let roots = apply_word(&w, &AffineRootVec::identity());
    let shifts = roots.shifts().map(|s| strings(&s));
    let value = match at {
        [None, None, None] => {
            let map = backlund::word_map(&w)?;
            let mut v = map.to_json();
            v["word"] = json!(w.to_string());
            v["shifts"] = json!(shifts);
            v
        }
        [Some(q), Some(p), Some(t)] => {
            let tail = params.tail();
            let point = [
                tail[0].clone(),
                tail[1].clone(),
                tail[2].clone(),
                tail[3].clone(),
                q.clone(),
                p.clone(),
                t.clone(),
            ];
            let gens = |g: Generator| -> pvi_core::Result<BirationalMap> { generator_map(g) };
            let image = word_eval(&w, &gens, &point)?;
            let tail_out: [Rational; 4] = std::array::from_fn(|i| image[i].clone());
            json!({
                "word": w.to_string(),
                "alpha": strings(&alphas_of(&tail_out)),
                "q": image[4].to_string(),
                "p": image[5].to_string(),
                "t": image[6].to_string(),
                "shifts": shifts,
            })
        }
        _ => return Err(Failure::Usage("give all of --q, --p and --t, or none".into())),
    };
    let text = match output.format {
        Format::Json => format!("{value}\n"),
        _ => format!("{}\n", serde_json::to_string_pretty(&value).expect("json")),
    };
    emit(output, text)?;
    Ok(true)
}

fn integrate_cmd(params: &Params, start: &Start, rel_tol: f64, output: &Output) -> Outcome {
    let traj = integrate(&params.param_vec(), start.point(), complex(&start.t_end), rel_tol)?;
    let text = match output.format {
        Format::Json => format!("{}\n", traj.to_json()),
        Format::Csv => traj.to_csv(),
        Format::Text => traj
            .samples
            .iter()
            .map(|s| format!("t = {}  q = {}  p = {}\n", s.t, s.q, s.p))
            .collect(),
    };
    emit(output, text)?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn bt_check(
    gen: Generator,
    params: &Params,
    start: &Start,
    rel_tol: f64,
    tol: f64,
    grid: usize,
    output: &Output,
) -> Outcome {
    no_csv(output, "bt-check")?;
    let map = generator_map(gen)?;
    let c = backlund_round_trip(&map, &params.param_vec(), start.point(), complex(&start.t_end), rel_tol, grid)?;
    let residual = c.residual_original.max(c.residual_transformed);
    let pass = c.endpoint_error < tol && residual < tol;
    let value = json!({
        "generator": gen.to_string(),
        "endpoint_error": c.endpoint_error,
        "residual_original": c.residual_original,
        "residual_transformed": c.residual_transformed,
        "tol": tol,
        "pass": pass,
    });
    let text = match output.format {
        Format::Json => format!("{value}\n"),
        _ => format!(
            "{} {gen}: endpoint error {:.3e}, residuals {:.3e} / {:.3e}, tolerance {tol:e}\n",
            if pass { "PASS" } else { "FAIL" },
            c.endpoint_error,
            c.residual_original,
            c.residual_transformed
        ),
    };
    emit(output, text)?;
    Ok(pass)
}

fn orbit(word: &str, steps: usize, params: &Params, output: &Output) -> Outcome {
    let w = parse_word(word)?;
    let eps: [Rational; 4] = {
        let e = params.param_vec().epsilons();
        let mut out: [Rational; 4] = std::array::from_fn(|_| Rational::from_integer(0.into()));
        for (slot, f) in out.iter_mut().zip(e.iter()) {
            *slot = f.as_constant().ok_or_else(|| Failure::Usage("parameters must be numeric".into()))?;
        }
        out
    };
    let mut roots = AffineRootVec::identity();
    let mut rows = vec![roots.eval(&eps)];
    for _ in 0..steps {
        roots = apply_word(&w, &roots);
        rows.push(roots.eval(&eps));
    }
    let text: String = match output.format {
        Format::Json => rows
            .iter()
            .enumerate()
            .map(|(n, a)| format!("{}\n", json!({"step": n, "alpha": strings(a)})))
            .collect(),
        Format::Csv => std::iter::once("step,alpha0,alpha1,alpha2,alpha3,alpha4\n".to_string())
            .chain(rows.iter().enumerate().map(|(n, a)| format!("{n},{}\n", strings(a).join(","))))
            .collect(),
        Format::Text => rows
            .iter()
            .enumerate()
            .map(|(n, a)| format!("{n}: ({})\n", strings(a).join(", ")))
            .collect(),
    };
    emit(output, text)?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn matrices(
    which: &str,
    symbolic: bool,
    params: &Params,
    q: &Rational,
    p: &Rational,
    t: &Rational,
    output: &Output,
) -> Outcome {
    no_csv(output, "matrices")?;
    let render = |text: String, value: serde_json::Value| match output.format {
        Format::Json => format!("{value}\n"),
        _ => text,
    };
    if let Some(k) = which.strip_prefix("Gamma") {
        let k: usize = k.parse().map_err(|_| Failure::Usage(format!("unknown matrix `{which}`")))?;
        if ![1, 3, 4].contains(&k) {
            return Err(Failure::Usage(format!("Gamma{k} does not exist; use 1, 3 or 4")));
        }
        if !symbolic {
            return Err(Failure::Usage("Gamma matrices are printed with --symbolic only".into()));
        }
        let g = lax::gamma_explicit(k);
        return emit(output, render(g.to_text(), g.to_json())).map(|_| true);
    }
    let m = match which {
        "M" => lax::build_m(),
        "B" => lax::build_b(),
        _ => match which.strip_prefix('G').and_then(|k| k.parse::<usize>().ok()) {
            Some(k) if k <= 4 => lax::gauge_g(k),
            _ => return Err(Failure::Usage(format!("unknown matrix `{which}`"))),
        },
    };
    let m = if symbolic {
        m
    } else {
        let tail = params.tail();
        let mut sub = Substitution::new();
        for (v, x) in [Var::A1, Var::A2, Var::A3, Var::A4].into_iter().zip(tail) {
            sub.set(v, RationalFunction::constant(x));
        }
        for (v, x) in [(Var::Q, q), (Var::P, p), (Var::T, t)] {
            sub.set(v, RationalFunction::constant(x.clone()));
        }
        m.try_map_into(|e| e.substitute(&sub))
            .map_err(|e| Failure::Check(e.to_string()))?
    };
    emit(output, render(m.to_text(), m.to_json()))?;
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Verify { suite, mutate, output } => verify(&suite, mutate, &output),
        Command::Apply { word, params, q, p, t, output } => apply(&word, &params, [&q, &p, &t], &output),
        Command::Integrate { params, start, rel_tol, output } => integrate_cmd(&params, &start, rel_tol, &output),
        Command::BtCheck { gen, params, start, rel_tol, tol, grid, output } => {
            bt_check(gen, &params, &start, rel_tol, tol, grid, &output)
        }
        Command::Orbit { word, steps, params, output } => orbit(&word, steps, &params, &output),
        Command::Matrices { which, symbolic, params, q, p, t, output } => {
            matrices(&which, symbolic, &params, &q, &p, &t, &output)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
