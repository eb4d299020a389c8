// SPDX-License-Identifier: Apache-2.0

//! `pisot-disc`: pure discreteness checks for Pisot substitutions.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pisot_core::automata::{Automaton, DigitAlphabet};
use pisot_core::error::{Error, Result};
use pisot_core::families::{eigenvalue_bounds, family_sk_row, family_slk_rows, verify_sk_certificate};
use pisot_core::geometry::{cut_and_project_word, project_cloud, render, sample_disjointness, ImageFormat};
use pisot_core::interior::{
    decide_pure_discreteness, default_extended_alphabet, interior_language, AlphabetPreset, InteriorOptions, Status,
};
use pisot_core::numberfield::{classify_polynomial, make_field, parse_int_poly, FieldElement, MonicIntPoly, START_PRECISION};
use pisot_core::par;
use pisot_core::relations::{build_zero_automaton, DEFAULT_STATE_BUDGET};
use pisot_core::sadic::{all_prefixes, parse_directives, SAdic};
use pisot_core::substitution::{parse_substitution, prepare, Substitution, DEFAULT_POINT_BUDGET};

const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "pisot-disc", version, about = "Pure discrete spectrum of Pisot substitutions via interior languages")]
struct Cli {
    /// Run every parallel section on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Seed recorded in the output; no command currently draws random numbers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Omit timings and run metadata from JSON output.
    #[arg(long, global = true)]
    no_meta: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide pure discreteness through the interior language.
    Check(CheckArgs),
    /// Compute the interior language of one letter and export it.
    Interior(InteriorArgs),
    /// Project the discrete line and draw the point cloud.
    Render(RenderArgs),
    /// Letters of a cut-and-project sequence.
    Cutproject(CutArgs),
    /// Run one of the substitution families.
    Family {
        #[command(subcommand)]
        which: FamilyCommand,
    },
    /// Build the S-adic languages and search for inclusion certificates.
    Sadic(SadicArgs),
    /// Build the automaton of the digit words of value zero.
    Zeroauto(ZeroArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Lattice,
    Digits,
    Small,
}

#[derive(Args, Debug)]
struct AlphabetArgs {
    /// Radius of the lattice ball added to the substitution digits.
    #[arg(long, default_value_t = 1)]
    radius: u32,
    #[arg(long, value_enum, default_value_t = Preset::Lattice)]
    preset: Preset,
    /// State budget for determinisation.
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    budget: usize,
}

impl AlphabetArgs {
    fn preset(&self) -> AlphabetPreset {
        match self.preset {
            Preset::Lattice => AlphabetPreset::Lattice { radius: self.radius },
            Preset::Digits => AlphabetPreset::SubstitutionDigits,
            Preset::Small => AlphabetPreset::SmallIntegers,
        }
    }
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Substitution such as "a->ab;b->ac;c->a".
    substitution: String,
    #[command(flatten)]
    alphabet: AlphabetArgs,
    /// Compute the interior language of every letter.
    #[arg(long)]
    all_letters: bool,
    /// Write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write one DOT file per computed letter into this directory.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InteriorArgs {
    substitution: String,
    /// Target letter; defaults to the seed letter.
    #[arg(long)]
    letter: Option<char>,
    #[command(flatten)]
    alphabet: AlphabetArgs,
    /// Write the automaton in the JSON automaton schema.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    substitution: String,
    #[arg(long, default_value_t = 10)]
    depth: u32,
    /// Output image; `.ppm` selects PPM, anything else SVG.
    #[arg(long)]
    out: PathBuf,
    /// Mark the points whose digit word is in the interior language.
    #[arg(long)]
    interior: bool,
    /// Also report the sampled overlap of the exchanged pieces at this ε.
    #[arg(long)]
    overlap: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_POINT_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct CutArgs {
    /// Direction of the line, comma separated.
    #[arg(long = "dir", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    dir: Vec<f64>,
    /// Offset of the line, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    offset: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum FamilyCommand {
    /// a -> a^k b c, b -> c, c -> a.
    Sk {
        /// Range such as `0..8` (inclusive) or a single value.
        #[arg(long)]
        k: String,
        /// Half-width of the translation window of the disk certificate.
        #[arg(long, default_value_t = 3)]
        window: i64,
        /// Print the full certificate checks and eigenvalue bounds.
        #[arg(long)]
        details: bool,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// a -> a^l b a^(k-l), b -> c, c -> a.
    Slk {
        #[arg(long)]
        k: String,
        /// Every l with 1 <= l <= k-2.
        #[arg(long)]
        all_l: bool,
        #[arg(long)]
        l: Option<u32>,
        /// Also run the interior computation on s_{l,k}.
        #[arg(long)]
        interior: bool,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SadicArgs {
    /// Write state counts and certificates as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Directive prefixes to certify, such as "sstt"; default is all of length 6.
    #[arg(long = "prefix")]
    prefixes: Vec<String>,
    /// Length of the prefixes when none are given.
    #[arg(long, default_value_t = 6)]
    length: usize,
    /// Largest power of β tried by the certificate search.
    #[arg(long, default_value_t = 6)]
    max_k: usize,
}

#[derive(Args, Debug)]
struct ZeroArgs {
    /// Minimal polynomial of the base, "X^3 - X^2 - X - 1" or "[-1, -1, -1, 1]".
    #[arg(long)]
    poly: String,
    /// Digits separated by ';', each a polynomial in X such as "-1", "X - 2" or "[0, 1]".
    #[arg(long, allow_hyphen_values = true)]
    digits: String,
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    budget: usize,
    /// Print the accepted words up to this length.
    #[arg(long, default_value_t = 0)]
    list: usize,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
}

fn main() -> ExitCode {
    // A closed stdout (`| head`) ends the process quietly instead of panicking.
    let default_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(move |info| {
        let msg = info
            .payload()
            .downcast_ref::<String>()
            .map(String::as_str)
            .or_else(|| info.payload().downcast_ref::<&str>().copied())
            .unwrap_or("");
        if msg.contains("Broken pipe") {
            std::process::exit(0);
        }
        default_hook(info);
    }));
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.sequential {
        par::set_parallel(false);
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(m) | Error::InvalidSubstitution(m) | Error::InvalidPolynomial(m) => Failure::Usage(m),
            e => Failure::Core(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn run(cli: &Cli) -> Run<u8> {
    match &cli.command {
        Command::Check(a) => check(cli, a),
        Command::Interior(a) => interior(a),
        Command::Render(a) => render_cmd(a),
        Command::Cutproject(a) => cutproject(a),
        Command::Family { which } => family(cli, which),
        Command::Sadic(a) => sadic(cli, a),
        Command::Zeroauto(a) => zeroauto(a),
    }
}

fn write_json(path: &Path, v: &Value) -> Run<()> {
    let mut text = serde_json::to_string_pretty(v).expect("json value");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn meta(cli: &Cli) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cli.seed,
        "parallel": par::is_parallel(),
    })
}

fn with_meta(cli: &Cli, mut v: Value) -> Value {
    if !cli.no_meta {
        if let Some(o) = v.as_object_mut() {
            o.insert("meta".into(), meta(cli));
        }
    }
    v
}

fn substitution(text: &str) -> Run<Substitution> {
    Ok(parse_substitution(text)?)
}

fn check(cli: &Cli, a: &CheckArgs) -> Run<u8> {
    let s = substitution(&a.substitution)?;
    let opts = InteriorOptions {
        preset: a.alphabet.preset(),
        all_letters: a.all_letters,
        state_budget: a.alphabet.budget,
    };
    let r = decide_pure_discreteness(&s, &opts);
    println!("substitution: {}", r.substitution);
    println!("status: {}", status_name(r.status));
    for reason in &r.reasons {
        println!("reason: {reason}");
    }
    for l in &r.letters {
        let w = match &l.witness {
            Some(w) if w.is_empty() => "(empty word)".to_string(),
            Some(w) => w.join(" "),
            None => "-".into(),
        };
        println!("letter {}: {} states, witness {}", l.letter, l.states, w);
    }
    if let Some(s) = &r.suggestion {
        println!("suggestion: {s}");
    }
    if let Some(e) = &r.error {
        eprintln!("error: {e}");
    }
    if let Some(path) = &a.json {
        write_json(path, &with_meta(cli, r.to_json(!cli.no_meta)))?;
    }
    if let Some(dir) = &a.dot {
        fs::create_dir_all(dir)?;
        for l in &r.letters {
            let name = format!("interior_{}", l.letter);
            fs::write(dir.join(format!("{name}.dot")), l.automaton.to_dot(&name))?;
        }
    }
    if r.error.is_some() {
        return Ok(1);
    }
    Ok(r.status.exit_code() as u8)
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::PureDiscrete => "PURE_DISCRETE",
        Status::NotDetected => "NOT_DETECTED",
        Status::PreconditionFailed => "PRECONDITION_FAILED",
    }
}

fn interior(a: &InteriorArgs) -> Run<u8> {
    let s = substitution(&a.substitution)?;
    let p = match prepare(&s) {
        Ok(p) => p,
        Err(Error::Precondition(m)) => {
            println!("status: PRECONDITION_FAILED");
            println!("reason: {m}");
            return Ok(2);
        }
        Err(e) => return Err(e.into()),
    };
    let letter = match a.letter {
        Some(c) => s
            .letter_index(c)
            .ok_or_else(|| Failure::Usage(format!("letter {c:?} is not in the alphabet")))?,
        None => p.seed,
    };
    let sigma = default_extended_alphabet(&p, a.alphabet.preset())?;
    let int = interior_language(&p, letter, &sigma, a.alphabet.budget)?;
    println!("letter: {}", s.alphabet()[letter]);
    println!("states: {}", int.state_count());
    println!("transitions: {}", int.transition_count());
    match int.shortest_word() {
        Some(w) => {
            let names: Vec<&str> = w.iter().map(|&d| int.alphabet().digit(d as usize).name.as_str()).collect();
            println!("witness: {}", names.join(" "));
        }
        None => println!("witness: -"),
    }
    if let Some(path) = &a.json {
        write_json(path, &int.to_json())?;
    }
    if let Some(path) = &a.dot {
        fs::write(path, int.to_dot("interior"))?;
    }
    Ok(0)
}

fn render_cmd(a: &RenderArgs) -> Run<u8> {
    let s = substitution(&a.substitution)?;
    let p = prepare(&s)?;
    let flags: Option<Vec<(usize, Automaton)>> = if a.interior {
        let sigma = default_extended_alphabet(&p, AlphabetPreset::default())?;
        let langs = par::map_range(s.size(), |b| interior_language(&p, b, &sigma, DEFAULT_STATE_BUDGET));
        Some(langs.into_iter().enumerate().map(|(b, l)| l.map(|l| (b, l))).collect::<Result<_>>()?)
    } else {
        None
    };
    let cloud = project_cloud(&p, a.depth, a.budget, flags.as_deref())?;
    render(&cloud, &a.out, ImageFormat::from_path(&a.out))?;
    println!("points: {}", cloud.points.len());
    if a.interior {
        let n = cloud.points.iter().filter(|q| q.interior).count();
        println!("interior points: {n}");
    }
    if let Some(eps) = a.overlap {
        let r = sample_disjointness(&p, &cloud, eps);
        println!("exchange overlap: {}", r.exchange_overlap);
        println!("translate overlap: {}", r.translate_overlap);
        println!("(sampled, heuristic)");
    }
    println!("wrote {}", a.out.display());
    Ok(0)
}

fn cutproject(a: &CutArgs) -> Run<u8> {
    if a.dir.len() != a.offset.len() {
        return Err(Failure::Usage("--dir and --offset need the same number of entries".into()));
    }
    let w = cut_and_project_word(&a.dir, &a.offset, a.n)?;
    let text: String = w
        .iter()
        .map(|&i| char::from_u32('a' as u32 + i as u32 - 1).unwrap_or('?'))
        .collect();
    println!("{text}");
    Ok(0)
}

fn parse_range(text: &str) -> Run<RangeInclusive<u32>> {
    let bad = || Failure::Usage(format!("bad range {text:?}; expected `n` or `a..b`"));
    match text.split_once("..") {
        Some((lo, hi)) => {
            let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            Ok(lo..=hi)
        }
        None => {
            let k: u32 = text.trim().parse().map_err(|_| bad())?;
            Ok(k..=k)
        }
    }
}

fn family(cli: &Cli, which: &FamilyCommand) -> Run<u8> {
    match which {
        FamilyCommand::Sk { k, window, details, json } => {
            let ks: Vec<u32> = parse_range(k)?.collect();
            let rows = par::map(&ks, |&k| family_sk_row(k, *window));
            let mut ok = true;
            println!("{:>5} {:>12} {:>8} {:>7}", "k", "method", "verdict", "states");
            for r in &rows {
                let states = r.states.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
                println!("{:>5} {:>12} {:>8} {:>7}", r.k, r.method, r.verdict, states);
                if let Some(e) = &r.error {
                    println!("      error: {e}");
                }
                ok &= r.verdict;
            }
            let mut extra = Vec::new();
            if *details {
                for &k in &ks {
                    if k >= 1 {
                        let b = eigenvalue_bounds(k)?;
                        println!("k={k} eigenvalue bounds: {}", serde_json::to_string(&b).expect("json"));
                        extra.push(json!({"k": k, "eigenvalue_bounds": b}));
                    }
                    if k >= 2 {
                        let c = verify_sk_certificate(k, *window)?;
                        for ch in &c.checks {
                            println!("k={k} {:<16} {:<5} margin {:.6}", ch.name, ch.passed, ch.margin);
                        }
                        extra.push(json!({"k": k, "certificate": c}));
                    }
                }
            }
            if let Some(path) = json {
                let v = json!({"schema": "pisot-disc/family-sk/1", "rows": rows, "details": extra});
                write_json(path, &with_meta(cli, v))?;
            }
            Ok(if ok { 0 } else { 3 })
        }
        FamilyCommand::Slk { k, all_l, l, interior, json } => {
            let mut pairs = Vec::new();
            for k in parse_range(k)? {
                match (l, all_l) {
                    (Some(l), _) => pairs.push((*l, k)),
                    (None, true) => pairs.extend((1..k.saturating_sub(1)).map(|l| (l, k))),
                    (None, false) => {
                        return Err(Failure::Usage("give --l or --all-l".into()));
                    }
                }
            }
            let rows = family_slk_rows(&pairs, *interior);
            let mut ok = true;
            println!("{:>3} {:>3} {:>10} {:>14}", "l", "k", "inclusion", "pure_discrete");
            for r in &rows {
                let show = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_else(|| "-".into());
                println!("{:>3} {:>3} {:>10} {:>14}", r.l, r.k, show(r.inclusion), show(r.pure_discrete));
                if let Some(e) = &r.error {
                    println!("        error: {e}");
                }
                ok &= r.inclusion == Some(true) && r.pure_discrete != Some(false);
            }
            if let Some(path) = json {
                let v = json!({"schema": "pisot-disc/family-slk/1", "rows": rows});
                write_json(path, &with_meta(cli, v))?;
            }
            Ok(if ok { 0 } else { 3 })
        }
    }
}

fn sadic(cli: &Cli, a: &SadicArgs) -> Run<u8> {
    let s = SAdic::build()?;
    let prefixes = if a.prefixes.is_empty() {
        all_prefixes(a.length)
    } else {
        a.prefixes
            .iter()
            .map(|p| parse_directives(p))
            .collect::<Result<Vec<_>>>()?
    };
    let found = s.certificates(&prefixes, a.max_k);
    let pairs: Vec<_> = prefixes.into_iter().zip(found).collect();
    let report = s.report(&pairs);
    println!("prefix automaton transitions: {}", report.prefix_automaton_transitions);
    println!("L states: {}", report.l_states);
    println!("L_sigma states: {}", report.l_sigma_states);
    println!("L0 states: {}", report.l0_states);
    println!("L_* states: {}", report.l_star_states);
    let mut missing = 0;
    for row in &report.certificates {
        match (&row.certificate, &row.error) {
            (Some(c), _) => println!("{}: t = {}, k = {}", row.prefix, c.t, c.k),
            (None, Some(e)) => {
                missing += 1;
                println!("{}: error {e}", row.prefix)
            }
            (None, None) => {
                missing += 1;
                println!("{}: no certificate up to k = {}", row.prefix, a.max_k)
            }
        }
    }
    if let Some(path) = &a.report {
        let v = serde_json::to_value(&report).expect("report serialises");
        write_json(path, &with_meta(cli, v))?;
    }
    Ok(if missing == 0 { 0 } else { 3 })
}

fn zeroauto(a: &ZeroArgs) -> Run<u8> {
    let poly = MonicIntPoly::parse(&a.poly)?;
    let class = classify_polynomial(&poly);
    if !class.irreducible || !class.pisot {
        println!("status: PRECONDITION_FAILED");
        println!("reason: the polynomial must be irreducible with a Pisot root");
        return Ok(2);
    }
    let field = make_field(&poly, START_PRECISION)?;
    let digits = a
        .digits
        .split(';')
        .map(|d| parse_int_poly(d).map(|c| FieldElement::from_i64s(&field, &c)))
        .collect::<Result<Vec<_>>>()?;
    let alphabet = DigitAlphabet::from_scalars(digits);
    let beta = FieldElement::beta(&field);
    let z = build_zero_automaton(&alphabet, &beta, a.budget)?;
    println!("states: {}", z.state_count());
    println!("transitions: {}", z.transition_count());
    if a.list > 0 {
        let names: Vec<&str> = alphabet.digits().iter().map(|d| d.name.as_str()).collect();
        let mut words = vec![Vec::<u32>::new()];
        let mut frontier = vec![(Vec::<u32>::new(), z.initial()[0])];
        for _ in 0..a.list {
            let mut next = Vec::new();
            for (w, q) in &frontier {
                for &(d, r) in z.transitions_from(*q) {
                    let mut w2 = w.clone();
                    w2.push(d);
                    if z.is_final(r) {
                        words.push(w2.clone());
                    }
                    next.push((w2, r));
                }
            }
            frontier = next;
        }
        for w in words {
            let text: Vec<&str> = w.iter().map(|&d| names[d as usize]).collect();
            println!("[{}]", text.join(" "));
        }
    }
    if let Some(path) = &a.json {
        write_json(path, &z.to_json())?;
    }
    if let Some(path) = &a.dot {
        fs::write(path, z.to_dot("zero"))?;
    }
    Ok(0)
}
