use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hybrid_tableau::fragment::classify;
use hybrid_tableau::generators::{
    frame_property, random_fragment, tiling_at, tiling_conv, tiny_corpus, FrameAxiom, FrameKind, Tile, TileSet, Vocab,
};
use hybrid_tableau::parser::{parse_with, print_problem, ParseOptions, Problem};
use hybrid_tableau::preprocess::{preprocess, PreprocessError};
use hybrid_tableau::semantics::{
    bounded_sat, check_assertions, eval_sentence, extract_model, parse_model, print_model, validate_pseudo_saturation,
};
use hybrid_tableau::syntax::{Formula, RelSym};
use hybrid_tableau::tableau::{render_graph, render_text, solve_parallel, Limits, SolveConfig, SolveResult, Verdict};

const EXIT_SAT: u8 = 0;
const EXIT_UNSAT: u8 = 1;
const EXIT_LIMIT: u8 = 2;
const EXIT_FRAGMENT: u8 = 3;
const EXIT_INPUT: u8 = 4;
const EXIT_INVALID: u8 = 5;

#[derive(Parser)]
#[command(name = "hytab", version, about = "Tableau satisfiability for hybrid logic with binders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess and decide a problem.
    Solve(SolveArgs),
    /// Report which fragment a problem belongs to.
    CheckFragment(InputArgs),
    /// Print the problem after graded expansion and binder translation.
    Preprocess(InputArgs),
    /// Evaluate a problem on a model file, or search for a small model.
    ModelCheck(ModelCheckArgs),
    /// Write generated problems.
    Gen(GenArgs),
    /// Solve, then check the open branch for pseudo-saturation and the extracted model.
    Validate(SolveArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Problem file; stdin when absent or `-`.
    input: Option<PathBuf>,
    /// Accept `_`-prefixed names, as printed by `preprocess`.
    #[arg(long)]
    allow_reserved: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceFormat {
    None,
    Text,
    Graph,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    node_cap: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    branch_cap: u64,
    /// Seconds.
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
    time_cap: u64,
    #[arg(long, value_enum, default_value_t = TraceFormat::None)]
    trace: TraceFormat,
    /// Print the model extracted from an open branch.
    #[arg(long)]
    model: bool,
    /// Worker threads exploring branches.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
}

#[derive(Args)]
struct ModelCheckArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Model file; without it a model with at most --max-states states is searched for.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Evaluate only at this state.
    #[arg(long)]
    state: Option<usize>,
    #[arg(long, default_value_t = 3)]
    max_states: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Tiny,
    Random,
    TilingAt,
    TilingConv,
    Frame,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FrameChoice {
    Transitivity,
    Symmetry,
    Reflexivity,
    AtMost,
    Sibling,
    AtLeast,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    /// Directory for one file per problem; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random problems, using seeds seed, seed+1, …
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Tiles as `name:left,right,top,bottom` separated by `;`.
    #[arg(long, default_value = "t1:c0,c1,c0,c1;t2:c1,c0,c1,c0")]
    tiles: String,
    #[arg(long, value_enum, default_value_t = FrameChoice::Reflexivity)]
    frame: FrameChoice,
    #[arg(long, default_value = "r")]
    rel: String,
    /// Count for the at-most and at-least frame properties.
    #[arg(long, default_value_t = 2)]
    n: u32,
}

/// Failures that map to an exit code other than the verdict codes.
#[derive(Debug)]
enum Failure {
    Input(anyhow::Error),
    Fragment(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => run_solve(&a, false),
        Command::Validate(a) => run_solve(&a, true),
        Command::CheckFragment(a) => run_check_fragment(&a),
        Command::Preprocess(a) => run_preprocess(&a),
        Command::ModelCheck(a) => run_model_check(&a),
        Command::Gen(a) => run_gen(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Fragment(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FRAGMENT)
        }
    }
}

fn read_text(path: Option<&Path>) -> anyhow::Result<String> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

fn load(a: &InputArgs) -> Result<Problem, Failure> {
    let text = read_text(a.input.as_deref())?;
    let (p, _) = parse_with(&text, ParseOptions { allow_reserved: a.allow_reserved })?;
    Ok(p)
}

fn prepare(p: &Problem) -> Result<Problem, Failure> {
    preprocess(p).map_err(|e| match e {
        PreprocessError::Fragment(_) => Failure::Fragment(e.to_string()),
        other => Failure::Input(other.into()),
    })
}

fn run_solve(a: &SolveArgs, validate: bool) -> Outcome {
    let p = prepare(&load(&a.input)?)?;
    let config = SolveConfig {
        limits: Limits {
            node_cap: a.node_cap as usize,
            branch_cap: a.branch_cap as usize,
            time_cap: Duration::from_secs(a.time_cap),
        },
        record_trace: a.trace != TraceFormat::None,
    };
    let res: SolveResult = solve_parallel(&p, &config, a.jobs as usize)?;
    let mut code = match &res.verdict {
        Verdict::Sat(_) => {
            println!("RESULT: SAT");
            EXIT_SAT
        }
        Verdict::Unsat => {
            println!("RESULT: UNSAT");
            EXIT_UNSAT
        }
        Verdict::ResourceLimit(kind) => {
            println!("RESULT: LIMIT");
            println!("resource limit: {kind}");
            EXIT_LIMIT
        }
    };
    println!(
        "branches {} closed {} rule applications {} largest branch {} nodes",
        res.stats.branches, res.stats.closed, res.stats.rule_applications, res.stats.max_nodes
    );
    if let Verdict::Sat(b) = &res.verdict {
        if validate {
            let violations = validate_pseudo_saturation(b);
            if violations.is_empty() {
                println!("pseudo-saturation: ok");
            } else {
                println!("pseudo-saturation: {} violations", violations.len());
                for v in &violations {
                    println!("  {v}");
                }
                code = EXIT_INVALID;
            }
        }
        if a.model || validate {
            let (m, report) = extract_model(b, &p);
            if report.passes() {
                println!("extraction: ok");
            } else {
                println!("extraction: failed");
                for f in &report.failures {
                    println!("  {f}");
                }
                if validate {
                    code = EXIT_INVALID;
                }
            }
            if a.model {
                println!("model:");
                print!("{}", print_model(&m));
            }
        }
    }
    if let Some(t) = &res.trace {
        match a.trace {
            TraceFormat::Text => print!("{}", render_text(t)),
            TraceFormat::Graph => print!("{}", render_graph(t)),
            TraceFormat::None => {}
        }
    }
    Ok(code)
}

fn run_check_fragment(a: &InputArgs) -> Outcome {
    let p = load(a)?;
    let v = classify(&p);
    let label = if !v.accepted() {
        "rejected"
    } else if v.has_down_box {
        "accepted after translation"
    } else {
        "accepted"
    };
    println!("FRAGMENT: {label}");
    println!("down-box: {}", v.has_down_box);
    println!("box-down-box: {}", v.has_box_down_box);
    println!("graded restrictions: {}", if v.graded_ok { "ok" } else { "violated" });
    for w in &v.witnesses {
        println!("  {w}");
    }
    Ok(if v.accepted() { EXIT_SAT } else { EXIT_FRAGMENT })
}

fn run_preprocess(a: &InputArgs) -> Outcome {
    let p = prepare(&load(a)?)?;
    print!("{}", print_problem(&p));
    Ok(EXIT_SAT)
}

fn run_model_check(a: &ModelCheckArgs) -> Outcome {
    let p = load(&a.input)?;
    let m = match &a.model {
        Some(path) => parse_model(&read_text(Some(path))?)?,
        None => match bounded_sat(&p, a.max_states)? {
            Some(m) => {
                println!("MODEL: found");
                print!("{}", print_model(&m));
                m
            }
            None => {
                println!("MODEL: none within {} states", a.max_states);
                return Ok(EXIT_UNSAT);
            }
        },
    };
    let states: Vec<usize> = match a.state {
        Some(w) if w < m.states => vec![w],
        Some(w) => return Err(Failure::Input(anyhow!("state {w} is outside the model's {} states", m.states))),
        None => (0..m.states).collect(),
    };
    let mut at = Vec::new();
    for &w in &states {
        if eval_sentence(&m, w, &p.formula)? {
            at.push(w.to_string());
        }
    }
    let assertions = check_assertions(&m, &p.assertions);
    let holds = assertions && !at.is_empty();
    println!("CHECK: {}", if holds { "holds" } else { "fails" });
    println!("assertions: {}", if assertions { "hold" } else { "fail" });
    println!("formula true at: {}", if at.is_empty() { "none".to_string() } else { at.join(" ") });
    Ok(if holds { EXIT_SAT } else { EXIT_UNSAT })
}

fn parse_tiles(spec: &str) -> anyhow::Result<TileSet> {
    let mut tiles = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, colours) = part.split_once(':').ok_or_else(|| anyhow!("tile `{part}` has no `:`"))?;
        let c: Vec<&str> = colours.split(',').map(str::trim).collect();
        let [l, r, t, b] = c.as_slice() else { bail!("tile `{name}` needs four colours, got {}", c.len()) };
        tiles.push(Tile::new(name.trim(), l, r, t, b));
    }
    Ok(TileSet::new(tiles)?)
}

fn frame_problem(a: &GenArgs) -> anyhow::Result<Problem> {
    let kind = match a.frame {
        FrameChoice::Transitivity => FrameKind::Transitivity,
        FrameChoice::Symmetry => FrameKind::Symmetry,
        FrameChoice::Reflexivity => FrameKind::Reflexivity,
        FrameChoice::AtMost => FrameKind::AtMost(a.n),
        FrameChoice::Sibling => FrameKind::Sibling,
        FrameChoice::AtLeast => FrameKind::AtLeastSuccessors(a.n),
    };
    Ok(match frame_property(kind, &RelSym::new(&a.rel))? {
        FrameAxiom::Assertion(x) => Problem::new(vec![x], Formula::tt()),
        FrameAxiom::Formula(f) => Problem::new(vec![], f),
    })
}

fn run_gen(a: &GenArgs) -> Outcome {
    let problems: Vec<Problem> = match a.kind {
        GenKind::Tiny => tiny_corpus(),
        GenKind::Random => (0..a.count).map(|i| random_fragment(a.seed + i, a.depth, &Vocab::default())).collect(),
        GenKind::TilingAt => vec![tiling_at(&parse_tiles(&a.tiles)?)],
        GenKind::TilingConv => vec![tiling_conv(&parse_tiles(&a.tiles)?)],
        GenKind::Frame => vec![frame_problem(a)?],
    };
    let name = GenKind::to_possible_value(&a.kind).map(|v| v.get_name().to_string()).unwrap_or_default();
    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (i, p) in problems.iter().enumerate() {
                let path = dir.join(format!("{name}-{i:04}.hyb"));
                fs::write(&path, print_problem(p)).with_context(|| format!("writing {}", path.display()))?;
            }
            eprintln!("wrote {} problems to {}", problems.len(), dir.display());
        }
        None => {
            for (i, p) in problems.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                if problems.len() > 1 {
                    println!("# {name} {i}");
                }
                print!("{}", print_problem(p));
            }
        }
    }
    Ok(EXIT_SAT)
}
