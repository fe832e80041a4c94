//! `beamsplit`: decide and certify whether a real beamsplitter is universal.
//!
//! Every command prints one JSON document (see `beamsplit schema`). `check`
//! exits 0, 1 or 2 for universal, not universal and inconclusive; parse
//! errors exit 3 and computation errors exit 4.

mod config;
mod document;
mod error;
mod literal;
mod report;

use std::io::Write;
use std::path::PathBuf;

use beamsplit_core::angle::dense_in_one_param;
use beamsplit_core::engine::{check_m_mode, resolve_angle, AngleSpec, VerdictKind};
use beamsplit_core::exact::parse_surd;
use beamsplit_core::lie::{build_generating_set, build_generating_set_exact, closure_with_tol, exact_closure};
use beamsplit_core::lie::{generating_set_determinant, generating_set_matrix};
use beamsplit_core::matrix::so_dim;
use beamsplit_core::orbit::{all_embeddings, orbit_with};
use beamsplit_core::words::{
    covering_profile, generator_order, identity_word_search, projected_word_count, ExponentPolicy, WordOptions,
};
use beamsplit_core::{RotationMatrix, SkewMatrix};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::Settings;
use document::{MatrixDocument, Mode};
use error::{CliError, CliResult, EXIT_PARSE};
use report::{render, rotation_value, Kind};

#[derive(Parser)]
#[command(name = "beamsplit", version, about = "Universality checks for real beamsplitters")]
struct Cli {
    /// TOML file with tolerances, caps and the geodetic table path.
    #[arg(long, global = true, env = "BEAMSPLIT_CONFIG")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct ModeFlags {
    /// Read entries in the exact grammar regardless of the file header.
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Read entries as floating point regardless of the file header.
    #[arg(long)]
    float: bool,
}

impl ModeFlags {
    fn force(self) -> Option<Mode> {
        match (self.exact, self.float) {
            (true, _) => Some(Mode::Exact),
            (_, true) => Some(Mode::Float),
            _ => None,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct NumericFlags {
    /// Largest denominator tried when recognising pπ/q numerically.
    #[arg(long)]
    q_max: Option<u64>,
    /// Tolerance for numeric angle recognition.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Clone, Copy)]
struct WordFlags {
    /// `orders` (exponents up to the generator order) or `symmetric:K`.
    #[arg(long, default_value = "orders", value_parser = parse_policy)]
    policy: ExponentPolicy,
}

#[derive(Subcommand)]
enum Command {
    /// Decide universality of a rotation on N modes.
    Check {
        file: String,
        /// Number of modes N; defaults to max(m, 3).
        #[arg(long)]
        modes: Option<usize>,
        #[command(flatten)]
        mode: ModeFlags,
        #[command(flatten)]
        numeric: NumericFlags,
    },
    /// Classify an angle as a rational or irrational multiple of π.
    ClassifyAngle {
        /// Exact cosine such as `-1/4+1/4*sqrt(5)`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "theta", required_unless_present = "theta")]
        cos: Option<String>,
        /// Radians or a multiple of π such as `3π/4`.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[command(flatten)]
        numeric: NumericFlags,
    },
    /// List the distinct permutation conjugates of a rotation.
    Orbit {
        file: String,
        /// Also write each conjugate as a matrix file into this directory.
        #[arg(long)]
        write: Option<PathBuf>,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Dimension of the Lie algebra generated by skew matrices.
    Closure {
        #[arg(required = true)]
        files: Vec<String>,
        /// Embed every generator on every mode subset of this many modes.
        #[arg(long)]
        embed: Option<usize>,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Build the generating set of products of two-mode rotations.
    Genset {
        #[arg(long)]
        modes: usize,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
    },
    /// Density of each generator and covering radius of the generated words.
    Density {
        #[arg(required = true)]
        files: Vec<String>,
        /// One or more word lengths, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        max_len: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        words: WordFlags,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Shortest nontrivial word equal to the identity.
    SearchIdentity {
        #[arg(required = true)]
        files: Vec<String>,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        words: WordFlags,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Print the JSON schema of the output documents.
    Schema,
}

fn parse_policy(s: &str) -> Result<ExponentPolicy, String> {
    if s == "orders" {
        return Ok(ExponentPolicy::Orders);
    }
    let k = s
        .strip_prefix("symmetric:")
        .ok_or_else(|| format!("expected 'orders' or 'symmetric:K', found '{s}'"))?;
    match k.parse::<u32>() {
        Ok(k) if k > 0 => Ok(ExponentPolicy::Symmetric(k)),
        _ => Err(format!("exponent bound must be a positive integer, found '{k}'")),
    }
}

fn policy_name(p: ExponentPolicy) -> String {
    match p {
        ExponentPolicy::Orders => "orders".into(),
        ExponentPolicy::Symmetric(k) => format!("symmetric:{k}"),
    }
}

fn rotations(files: &[String], force: Option<Mode>) -> CliResult<Vec<RotationMatrix>> {
    files.iter().map(|f| document::load(f, force)?.to_rotation(f)).collect()
}

fn apply(settings: &mut Settings, n: NumericFlags) {
    if let Some(q) = n.q_max {
        settings.engine.q_max = q;
    }
    if let Some(t) = n.tol {
        settings.engine.angle_tol = t;
    }
}

fn pair_label(p: (usize, usize)) -> String {
    format!("O{}{}", p.0 + 1, p.1 + 1)
}

fn cos_spec(src: &str) -> CliResult<AngleSpec> {
    match parse_surd(src) {
        Ok(c) => {
            if c.to_f64().abs() > 1.0 {
                return Err(CliError::Argument(format!("cosine {c} lies outside [−1, 1]")));
            }
            Ok(AngleSpec::exact_cos(c))
        }
        Err(e) => match src.trim().parse::<f64>() {
            Ok(x) if x.abs() <= 1.0 => Ok(AngleSpec::radians(x.acos())),
            _ => {
                let offset = match e {
                    beamsplit_core::Error::Parse { offset, .. } => offset,
                    _ => 0,
                };
                Err(CliError::Syntax {
                    path: "--cos".into(),
                    line: 1,
                    column: src[..offset.min(src.len())].chars().count() + 1,
                    message: e.to_string(),
                })
            }
        },
    }
}

/// Runs one command, returning the document and the exit status.
fn run(cli: Cli) -> CliResult<(String, i32)> {
    let mut settings = Settings::load(cli.config.as_deref())?;
    let word_opts = |s: &Settings, w: WordFlags| WordOptions { policy: w.policy, budget: s.word_budget as u128 };
    match cli.command {
        Command::Check { file, modes, mode, numeric } => {
            apply(&mut settings, numeric);
            let doc = document::load(&file, mode.force())?;
            let r = doc.to_rotation(&file)?;
            let n = modes.unwrap_or(doc.modes().max(3));
            let verdict = check_m_mode(&r, n, &settings.engine)?;
            let code = match verdict.kind {
                VerdictKind::Universal => 0,
                VerdictKind::NotUniversal { .. } => 1,
                VerdictKind::Inconclusive { .. } => 2,
            };
            let body = json!({
                "input": { "file": file, "modes": doc.modes(), "mode": doc.mode().to_string(), "target_modes": n },
                "verdict": verdict,
            });
            Ok((render(Kind::Verdict, &settings, body), code))
        }
        Command::ClassifyAngle { cos, theta, numeric } => {
            apply(&mut settings, numeric);
            let spec = match (cos, theta) {
                (Some(c), _) => cos_spec(&c)?,
                (None, Some(t)) => literal::parse_angle(&t).map_err(CliError::Argument)?,
                (None, None) => return Err(CliError::Argument("give --cos or --theta".into())),
            };
            let r = resolve_angle(&spec, settings.engine.numeric())?;
            let order = r.kind().rotation_order();
            let body = json!({
                "input": spec,
                "theta": r.theta,
                "cos": r.cos,
                "sin": r.sin,
                "display": r.kind().to_string(),
                "class": r.class,
                "rotation_order": order,
            });
            Ok((render(Kind::AngleClass, &settings, body), 0))
        }
        Command::Orbit { file, write, mode } => {
            let r = document::load(&file, mode.force())?.to_rotation(&file)?;
            let o = orbit_with(&r, settings.engine.orbit_cap, settings.engine.dedup_tol)?;
            if let Some(dir) = &write {
                for (k, e) in o.elements.iter().enumerate() {
                    let path = dir.join(format!("conjugate_{k}.txt"));
                    let text = format!("# conjugate by {}\n{}", o.conjugators[k], MatrixDocument::from_matrix(e.matrix(), e.exact()));
                    std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })?;
                }
            }
            let elements: Vec<_> = o
                .elements
                .iter()
                .zip(&o.conjugators)
                .map(|(e, p)| json!({ "permutation": p.mapping(), "rotation": rotation_value(e) }))
                .collect();
            let body = json!({
                "modes": r.dim(),
                "size": o.len(),
                "trivial": o.trivial,
                "dedup_tol": settings.engine.dedup_tol,
                "elements": elements,
            });
            Ok((render(Kind::Orbit, &settings, body), 0))
        }
        Command::Closure { files, embed, mode } => {
            let mut gens: Vec<SkewMatrix> = Vec::new();
            for f in &files {
                let s = document::load(f, mode.force())?.to_skew(f)?;
                match embed {
                    Some(n) => gens.extend(all_embeddings(&s, n)?),
                    None => gens.push(s),
                }
            }
            let n = gens[0].dim();
            if let Some(g) = gens.iter().find(|g| g.dim() != n) {
                return Err(CliError::Argument(format!("generators act on {n} and {} modes", g.dim())));
            }
            let numeric = closure_with_tol(&gens, settings.engine.rank_tol)?;
            let exact = if gens.iter().all(|g| g.exact().is_some()) { Some(exact_closure(&gens)?) } else { None };
            let dim = exact.as_ref().map_or(numeric.dim(), |e| e.dim());
            let body = json!({
                "modes": n,
                "generators": gens.len(),
                "embedded_into": embed,
                "exact": exact.is_some(),
                "dim": dim,
                "numeric_dim": numeric.dim(),
                "so_dim": so_dim(n),
                "full": dim == so_dim(n),
                "rank_tol": settings.engine.rank_tol,
                "basis": numeric.basis_coords(),
            });
            Ok((render(Kind::Closure, &settings, body), 0))
        }
        Command::Genset { modes, theta } => {
            let spec = literal::parse_angle(&theta).map_err(CliError::Argument)?;
            let r = resolve_angle(&spec, settings.engine.numeric())?;
            let set = match (&r.cos, &r.sin) {
                (Some(c), Some(s)) => build_generating_set_exact(modes, c, s)?,
                _ => build_generating_set(modes, r.theta)?,
            };
            let determinant = generating_set_matrix(modes, r.theta)?.determinant();
            let closed_form = generating_set_determinant(modes, r.theta);
            let products: Vec<_> = set
                .iter()
                .map(|g| {
                    json!({
                        "label": format!("{}·{}", pair_label(g.first), pair_label(g.second)),
                        "first": [g.first.0, g.first.1],
                        "second": [g.second.0, g.second.1],
                        "rotation": rotation_value(&g.rotation),
                    })
                })
                .collect();
            let body = json!({
                "modes": modes,
                "theta": { "input": spec, "radians": r.theta, "class": r.class },
                "count": products.len(),
                "products": products,
                "determinant": determinant,
                "closed_form": closed_form,
                "spanning": closed_form.abs() > settings.engine.determinant_tol,
            });
            Ok((render(Kind::GeneratingSet, &settings, body), 0))
        }
        Command::Density { files, max_len, samples, seed, words, mode } => {
            let gens = rotations(&files, mode.force())?;
            let params = settings.engine.numeric();
            let mut per_gen = Vec::new();
            for (f, g) in files.iter().zip(&gens) {
                let d = dense_in_one_param(g, params)?;
                per_gen.push(json!({ "file": f, "order": generator_order(g), "density": d }));
            }
            let reports = covering_profile(&gens, &max_len, samples, seed, &word_opts(&settings, words))?;
            let body = json!({
                "seed": seed,
                "samples": samples,
                "policy": policy_name(words.policy),
                "generators": per_gen,
                "reports": reports,
            });
            Ok((render(Kind::Density, &settings, body), 0))
        }
        Command::SearchIdentity { files, max_len, tol, words, mode } => {
            let gens = rotations(&files, mode.force())?;
            let opts = word_opts(&settings, words);
            let projected = projected_word_count(&gens, max_len, words.policy)?;
            let found = identity_word_search(&gens, max_len, tol, &opts)?;
            let word = found.map(|w| {
                json!({ "text": w.to_string(), "letters": w.letters(), "length": w.len(), "weight": w.weight() })
            });
            let body = json!({
                "max_len": max_len,
                "tol": tol,
                "policy": policy_name(words.policy),
                "exact": gens.iter().all(|g| g.exact().is_some()),
                "projected_words": projected,
                "found": word.is_some(),
                "word": word,
            });
            Ok((render(Kind::IdentitySearch, &settings, body), 0))
        }
        Command::Schema => Ok((report::SCHEMA.to_string(), 0)),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush());
            code
        }
        Err(e) => {
            eprintln!("beamsplit: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

