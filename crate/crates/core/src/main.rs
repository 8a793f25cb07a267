use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use sl4coh::classify::LevelReport;
use sl4coh::complex::Ring;
use sl4coh::coset::is_prime;
use sl4coh::forms::FormsData;
use sl4coh::pipeline::{self, Cache, CACHE_ENV};
use sl4coh::Error;

#[derive(Parser)]
#[command(name = "sl4coh", version, about = "Cohomology and Hecke eigenclasses of Γ₀(N) ⊂ SL(4,Z)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args)]
struct Options {
    /// Levels: `11`, `2..20`, `2-20`, or comma-separated combinations.
    #[arg(long = "levels", visible_alias = "level", global = true, default_value = "", value_parser = pipeline::parse_levels)]
    levels: std::vec::Vec<u64>,
    /// Coefficients: zp:31991, zp:12379 or z.
    #[arg(long, global = true, default_value = "zp:31991", value_parser = parse_ring)]
    ring: Ring,
    /// Hecke primes, comma-separated.
    #[arg(long, global = true, value_delimiter = ',')]
    ell: Vec<u64>,
    /// Hecke operator indices `k` in `T(ℓ,k)`, comma-separated.
    #[arg(long, global = true, value_delimiter = ',', default_value = "1,2,3")]
    k: Vec<usize>,
    /// Cache directory (no caching when unset).
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Cap on sharbly reduction steps per Hecke image.
    #[arg(long, global = true, default_value_t = 50_000_000)]
    max_reduction_steps: usize,
    /// Additional eigenvalue records (see the forms module for the format).
    #[arg(long, global = true)]
    forms: Vec<PathBuf>,
    /// Write the structured report to this file.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers of H⁵.
    Betti,
    /// Hecke matrices T(ℓ,k) on H⁵.
    Hecke,
    /// Eigenspace decomposition and Eisenstein/cuspidal labels.
    Classify,
    /// Predicted Eisenstein dimensions at prime levels.
    Predict,
    /// Reconcile computed, predicted and reference values.
    Verify {
        /// Skip the Hecke classification.
        #[arg(long)]
        betti_only: bool,
    },
}

fn parse_ring(s: &str) -> Result<Ring, String> {
    Ring::parse(s).ok_or_else(|| format!("unknown ring {s:?}; use zp:<prime> or z"))
}

/// Plain-text table with left-aligned columns.
struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Table {
        Table { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self) -> String {
        let n = self.headers.len();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (i, c) in r.iter().enumerate().take(n) {
                widths[i] = widths[i].max(c.chars().count());
            }
        }
        let line = |cells: &[String]| -> String {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate() {
                if i + 1 == cells.len() {
                    s.push_str(c);
                } else {
                    let pad = widths[i] - c.chars().count();
                    write!(s, "{c}{}  ", " ".repeat(pad)).unwrap();
                }
            }
            s.trim_end().to_string()
        };
        let mut out = line(&self.headers);
        out.push('\n');
        out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

fn fmt_poly(c: &[i64]) -> String {
    let mut s = String::new();
    for (k, &x) in c.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let sign = if x < 0 { "-" } else if s.is_empty() { "" } else { "+" };
        let mag = x.unsigned_abs();
        let body = match k {
            0 => mag.to_string(),
            _ => {
                let var = if k == 1 { "T".to_string() } else { format!("T^{k}") };
                if mag == 1 {
                    var
                } else {
                    format!("{mag}{var}")
                }
            }
        };
        write!(s, "{sign}{body}").unwrap();
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

fn fmt_packet(a: &[i64; 3]) -> String {
    format!("({},{},{})", a[0], a[1], a[2])
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or("-".into(), |v| v.to_string())
}

fn classification_table(r: &LevelReport) -> String {
    let mut t = Table::new(&["dim", "packet", "lifted", "polynomial (mod p)", "label", "provenance"]);
    for s in &r.spaces {
        t.push(vec![
            s.dim.to_string(),
            s.residues.as_ref().map_or("unsplit".into(), fmt_packet),
            s.lifted.as_ref().map_or("-".into(), fmt_packet),
            fmt_poly(&s.poly),
            s.label.to_string(),
            opt(s.provenance.clone()),
        ]);
    }
    let mut out = format!(
        "level {}  ℓ = {}  mod {}  Betti {}  Eisenstein {}  cuspidal {}  unidentified {}\n",
        r.level, r.ell, r.modulus, r.betti, r.eisenstein, r.cuspidal, r.unidentified
    );
    out.push_str(&t.render());
    if !r.unmatched_templates.is_empty() {
        writeln!(out, "unmatched templates: {}", r.unmatched_templates.join(", ")).unwrap();
    }
    out
}

#[derive(Serialize)]
struct Sidecar<T: Serialize> {
    command: &'static str,
    ring: String,
    rows: Vec<T>,
    errors: Vec<(u64, String)>,
}

fn write_json<T: Serialize>(path: &Option<PathBuf>, command: &'static str, ring: Ring, rows: Vec<T>, errors: &[(u64, String)]) -> Result<(), Error> {
    if let Some(p) = path {
        let s = Sidecar { command, ring: ring.to_string(), rows, errors: errors.to_vec() };
        std::fs::write(p, serde_json::to_string_pretty(&s)?)?;
    }
    Ok(())
}

/// Runs `f` over the levels in parallel; results come back in level order.
fn per_level<T: Send>(levels: &[u64], f: impl Fn(u64) -> Result<T, Error> + Sync) -> (Vec<T>, Vec<(u64, String)>) {
    let results: Vec<(u64, Result<T, Error>)> = levels.par_iter().map(|&n| (n, f(n))).collect();
    let mut ok = Vec::new();
    let mut errors = Vec::new();
    for (n, r) in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => errors.push((n, e.to_string())),
        }
    }
    (ok, errors)
}

fn print_errors(errors: &[(u64, String)]) {
    for (n, e) in errors {
        println!("level {n}: error: {e}");
    }
}

fn load_forms(paths: &[PathBuf]) -> Result<FormsData, Error> {
    let mut data = FormsData::builtin();
    for p in paths {
        data.merge(FormsData::load(p)?);
    }
    Ok(data)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let o = cli.opts;
    if let Some(j) = o.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global().map_err(|e| Error::Resource(e.to_string()))?;
    }
    let cache = Cache::new(o.cache_dir.clone());
    let data = load_forms(&o.forms)?;
    let ells = if o.ell.is_empty() { vec![2] } else { o.ell.clone() };
    let failure = |errors: &[(u64, String)]| if errors.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) };
    match cli.command {
        Command::Betti => {
            let (rows, errors) = per_level(&o.levels, |n| pipeline::betti(n, o.ring, &cache));
            let mut t = Table::new(&["level", "ring", "rank", "reference", "diff", "torsion"]);
            for r in &rows {
                let reference = pipeline::reference_betti(r.level);
                let diff = reference.map_or("-".into(), |x| (r.rank as i64 - x as i64).to_string());
                let torsion = r.torsion.as_ref().map_or("-".into(), |t| if t.is_empty() { "none".into() } else { t.join(" ") });
                t.push(vec![r.level.to_string(), r.ring.to_string(), r.rank.to_string(), opt(reference), diff, torsion]);
            }
            print!("{}", t.render());
            print_errors(&errors);
            write_json(&o.json, "betti", o.ring, rows, &errors)?;
            Ok(failure(&errors))
        }
        Command::Hecke => {
            #[derive(Serialize)]
            struct Row {
                level: u64,
                ell: u64,
                k: usize,
                matrix: Vec<Vec<i64>>,
            }
            let Ring::Fp(p) = o.ring else { return Err(Error::NeedsField) };
            let f = sl4coh::linalg::Fp::new(p)?;
            let (rows, errors) = per_level(&o.levels, |n| {
                let mut out = Vec::new();
                for &ell in &ells {
                    let ms = pipeline::hecke_matrices(n, o.ring, ell, &o.k, o.max_reduction_steps, &cache)?;
                    for (&k, m) in o.k.iter().zip(ms) {
                        let matrix = m.iter().map(|r| r.iter().map(|&x| f.symmetric(x)).collect()).collect();
                        out.push(Row { level: n, ell, k, matrix });
                    }
                }
                Ok(out)
            });
            let rows: Vec<Row> = rows.into_iter().flatten().collect();
            for r in &rows {
                println!("level {}  T({},{})  mod {p}  dim {}", r.level, r.ell, r.k, r.matrix.len());
                let mut t = Table::new(&vec![""; r.matrix.len()]);
                t.rows = r.matrix.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect();
                let text = t.render();
                for line in text.lines().skip(2) {
                    println!("  {line}");
                }
            }
            print_errors(&errors);
            write_json(&o.json, "hecke", o.ring, rows, &errors)?;
            Ok(failure(&errors))
        }
        Command::Classify => {
            let (rows, errors) = per_level(&o.levels, |n| {
                ells.iter().map(|&ell| pipeline::classify(n, o.ring, ell, &data, o.max_reduction_steps, &cache)).collect::<Result<Vec<_>, _>>()
            });
            let rows: Vec<LevelReport> = rows.into_iter().flatten().collect();
            for r in &rows {
                println!("{}", classification_table(r));
            }
            print_errors(&errors);
            write_json(&o.json, "classify", o.ring, rows, &errors)?;
            Ok(failure(&errors))
        }
        Command::Predict => {
            let primes: Vec<u64> = o.levels.iter().copied().filter(|&n| is_prime(n)).collect();
            let composite: Vec<String> = o.levels.iter().filter(|&&n| !is_prime(n)).map(|n| n.to_string()).collect();
            let (rows, errors) = per_level(&primes, |n| pipeline::predict(n, &data));
            let mut t = Table::new(&["level", "weight 2", "weight 4", "GL(3)", "predicted", "reference", "residual"]);
            for r in &rows {
                let residual = r.reference.map_or("-".into(), |x| (x as i64 - r.predicted as i64).to_string());
                t.push(vec![
                    r.level.to_string(),
                    r.prediction.weight2.to_string(),
                    r.prediction.weight4.to_string(),
                    r.prediction.gl3.to_string(),
                    r.predicted.to_string(),
                    opt(r.reference),
                    residual,
                ]);
            }
            print!("{}", t.render());
            if !composite.is_empty() {
                println!("not predicted (composite): {}", composite.join(" "));
            }
            print_errors(&errors);
            write_json(&o.json, "predict", o.ring, rows, &errors)?;
            Ok(failure(&errors))
        }
        Command::Verify { betti_only } => {
            let ell = (!betti_only).then_some(ells[0]);
            let (rows, errors) = per_level(&o.levels, |n| pipeline::verify(n, o.ring, ell, &data, o.max_reduction_steps, &cache));
            let mut t = Table::new(&["level", "computed", "reference", "predicted", "residual", "status", "notes"]);
            for r in &rows {
                t.push(vec![
                    r.level.to_string(),
                    r.computed.to_string(),
                    opt(r.reference),
                    opt(r.predicted),
                    opt(r.residual),
                    if r.ok { "ok".into() } else { "FAIL".into() },
                    r.notes.join("; "),
                ]);
            }
            print!("{}", t.render());
            for r in rows.iter().filter_map(|r| r.classification.as_ref()) {
                println!();
                print!("{}", classification_table(r));
            }
            print_errors(&errors);
            let in_scope_error = errors.iter().any(|(n, _)| pipeline::reference_betti(*n).is_some());
            let disagree = rows.iter().any(|r| !r.ok && r.reference.is_some());
            write_json(&o.json, "verify", o.ring, rows, &errors)?;
            Ok(if disagree || in_scope_error { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
