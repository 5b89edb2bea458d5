//! Command-line surface for the combinatorial substitution library.
//!
//! Exit codes: 0 when the checked property holds or output was produced,
//! 1 when a checked property fails (a re-verified witness is printed),
//! 2 on usage or parse errors. All reports are plain `key: value` lines
//! and byte-identical across runs on identical inputs.

use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use combsub::decide::{
    check_consistency_domino_complete, check_consistency_restricted, decide_overlap,
    extract_structure, DecideError, OverlapDecision, SquareConsistency,
};
use combsub::format::{
    parse_pattern, parse_patterns, parse_substitution, parse_tile_set, serialize_pattern,
    serialize_patterns, serialize_substitution, SubstitutionFileError,
};
use combsub::geom::{Cell, Coord, LatticeVector, Pattern, Symbol};
use combsub::substitution::{
    check_consistent_on, check_nonoverlapping_on, cover_graph, image_vector, iterate, C0Policy,
    ConsistencyVerdict, IterateError, OverlapVerdict, Substitution,
};
use combsub::svg::{render_svg, RenderStyle};
use combsub::wang::{build_consistency_reduction, build_overlap_reduction, find_cycle};

#[derive(Parser)]
#[command(
    name = "combsub",
    about = "Multidimensional combinatorial substitutions: checkers, decision procedures, rendering",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a substitution file against all structural invariants.
    Validate { subst: PathBuf },
    /// Check that a pattern is covered by the substitution's starting patterns.
    Coverage { subst: PathBuf, pattern: PathBuf },
    /// Consistency checks: per-pattern, global 2x2, or restricted to a square set.
    Consistency {
        subst: PathBuf,
        #[command(flatten)]
        mode: ConsistencyMode,
    },
    /// Overlap checks: per-pattern or the global decision procedure.
    Overlap {
        subst: PathBuf,
        #[command(flatten)]
        mode: OverlapMode,
    },
    /// Extract the structure data (alpha, beta, v) of a consistent
    /// domino-complete substitution.
    Structure { subst: PathBuf },
    /// Apply the substitution to a pattern, optionally iterated.
    Apply {
        subst: PathBuf,
        pattern: PathBuf,
        /// Start cell position "x,y" (default: the least cell).
        #[arg(long)]
        origin: Option<String>,
        /// Number of applications.
        #[arg(long, default_value_t = 1)]
        iterations: usize,
        /// Write the final pattern here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a pattern file to SVG.
    Render {
        pattern: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long, default_value_t = 20)]
        cell_size: u32,
    },
    /// Wang-tile reductions.
    #[command(subcommand)]
    Wang(WangCommand),
    /// Print or export a built-in example by name.
    Corpus {
        name: String,
        /// Write the example's fixture files into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ConsistencyMode {
    /// Check consistency on this pattern file.
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Decide global consistency via the 2x2 squares.
    #[arg(long)]
    domino_complete: bool,
    /// Decide consistency restricted to the squares in this pattern file.
    #[arg(long)]
    restricted: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct OverlapMode {
    /// Check non-overlap on this pattern file.
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Decide global non-overlap via the structure equations.
    #[arg(long)]
    global: bool,
}

#[derive(Subcommand)]
enum WangCommand {
    /// Build the consistency reduction (or, with --overlap, the overlap
    /// reduction for a horizontally matching tile pair).
    Reduce {
        tiles: PathBuf,
        /// Two tile names forming the replaced horizontal pair.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        overlap: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a non-self-overlapping matching cycle.
    Cycle {
        tiles: PathBuf,
        #[arg(long)]
        max_cells: usize,
    },
}

/// Usage/parse-level failure: message on stderr, exit 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Outcome = Result<ExitCode, UsageError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(UsageError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &FsPath) -> Result<String, UsageError> {
    std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load_substitution(path: &FsPath) -> Result<Substitution, UsageError> {
    let text = read(path)?;
    parse_substitution(&text).map_err(|e| match e {
        SubstitutionFileError::Syntax(e) => UsageError(format!("{}: {e}", path.display())),
        SubstitutionFileError::Invalid(violations) => {
            let mut msg = format!("{}: invalid substitution", path.display());
            for v in violations {
                let _ = write!(msg, "\nviolation: {v}");
            }
            UsageError(msg)
        }
    })
}

fn load_pattern(path: &FsPath) -> Result<Pattern, UsageError> {
    let text = read(path)?;
    parse_pattern(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Validate { subst } => validate(&subst),
        Command::Coverage { subst, pattern } => coverage(&subst, &pattern),
        Command::Consistency { subst, mode } => consistency(&subst, mode),
        Command::Overlap { subst, mode } => overlap(&subst, mode),
        Command::Structure { subst } => structure(&subst),
        Command::Apply {
            subst,
            pattern,
            origin,
            iterations,
            out,
        } => apply_cmd(&subst, &pattern, origin.as_deref(), iterations, out.as_deref()),
        Command::Render {
            pattern,
            svg,
            cell_size,
        } => render(&pattern, &svg, cell_size),
        Command::Wang(cmd) => wang(cmd),
        Command::Corpus { name, out_dir } => corpus(&name, out_dir.as_deref()),
    }
}

fn validate(path: &FsPath) -> Outcome {
    let text = read(path)?;
    let data = combsub::format::parse_substitution_data(&text)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let violations = data.validate();
    if violations.is_empty() {
        let s = data.build().expect("no violations");
        println!("valid: true");
        println!("alphabet: {}", s.alphabet().len());
        println!("rules: {}", s.rules().len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("valid: false");
        for v in &violations {
            println!("violation: {v}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn coverage(subst: &FsPath, pattern: &FsPath) -> Outcome {
    let s = load_substitution(subst)?;
    let p = load_pattern(pattern)?;
    let graph = cover_graph(&s, &p);
    let components = graph.components();
    if components.len() <= 1 {
        println!("covered: true");
        println!("cells: {}", p.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("covered: false");
        println!("components: {}", components.len());
        for component in &components {
            println!("component: {}", graph.cells[component[0]]);
        }
        Ok(ExitCode::FAILURE)
    }
}

fn consistency(subst: &FsPath, mode: ConsistencyMode) -> Outcome {
    let s = load_substitution(subst)?;
    if let Some(pattern) = &mode.pattern {
        let p = load_pattern(pattern)?;
        match check_consistent_on(&s, &p)? {
            ConsistencyVerdict::Consistent { .. } => {
                println!("consistent: true");
                Ok(ExitCode::SUCCESS)
            }
            ConsistencyVerdict::Inconsistent {
                witness,
                image_vector: w,
            } => {
                assert_eq!(image_vector(&s, &witness)?, w, "witness must re-verify");
                println!("consistent: false");
                println!("loop: {witness}");
                println!("image_vector: {w}");
                Ok(ExitCode::FAILURE)
            }
        }
    } else {
        let verdict = if mode.domino_complete {
            check_consistency_domino_complete(&s)
        } else {
            let text = read(mode.restricted.as_ref().expect("clap group"))?;
            let squares: Vec<Pattern> = parse_patterns(&text)?
                .into_iter()
                .map(|(_, p)| p)
                .collect();
            check_consistency_restricted(&s, &squares)
        };
        match verdict {
            Ok(SquareConsistency::Consistent) => {
                println!("consistent: true");
                Ok(ExitCode::SUCCESS)
            }
            Ok(SquareConsistency::Inconsistent {
                witness,
                image_vector: w,
            }) => {
                println!("consistent: false");
                println!("square: {witness}");
                println!("image_vector: {w}");
                Ok(ExitCode::FAILURE)
            }
            Err(DecideError::NotDominoComplete { missing }) => {
                let mut msg = String::from("substitution is not domino-complete");
                for m in missing {
                    let _ = write!(msg, "\nmissing: {m}");
                }
                Err(UsageError(msg))
            }
            Err(e) => Err(e.into()),
        }
    }
}

fn overlap(subst: &FsPath, mode: OverlapMode) -> Outcome {
    let s = load_substitution(subst)?;
    if let Some(pattern) = &mode.pattern {
        let p = load_pattern(pattern)?;
        match check_nonoverlapping_on(&s, &p)? {
            OverlapVerdict::NonOverlapping => {
                println!("non_overlapping: true");
                Ok(ExitCode::SUCCESS)
            }
            OverlapVerdict::Overlapping {
                first,
                second,
                path,
                collision_vector,
            } => {
                println!("non_overlapping: false");
                println!("first: {first}");
                println!("second: {second}");
                println!("path: {path}");
                println!("collision_vector: {collision_vector}");
                Ok(ExitCode::FAILURE)
            }
        }
    } else {
        match decide_overlap(&s)? {
            OverlapDecision::NonOverlapping => {
                println!("non_overlapping: true");
                Ok(ExitCode::SUCCESS)
            }
            OverlapDecision::Overlapping {
                t,
                t_prime,
                a,
                b,
                xy,
            } => {
                println!("non_overlapping: false");
                println!("t: {t}");
                println!("t_prime: {t_prime}");
                println!("a: {a}");
                println!("b: {b}");
                println!("xy: {xy}");
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn structure(subst: &FsPath) -> Outcome {
    let s = load_substitution(subst)?;
    let data = extract_structure(&s)?;
    println!("t0: {}", data.t0);
    println!("alpha: {}", data.alpha);
    println!("beta: {}", data.beta);
    for (t, v) in &data.v {
        println!("v({t}): {v}");
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_origin(text: &str) -> Result<LatticeVector, UsageError> {
    let parts: Vec<&str> = text.split(',').collect();
    let [x, y] = parts.as_slice() else {
        return Err(UsageError(format!("origin `{text}` is not of the form x,y")));
    };
    let x: Coord = x.trim().parse().map_err(|_| UsageError(format!("bad origin x `{x}`")))?;
    let y: Coord = y.trim().parse().map_err(|_| UsageError(format!("bad origin y `{y}`")))?;
    Ok(combsub::geom::v2(x, y))
}

fn apply_cmd(
    subst: &FsPath,
    pattern: &FsPath,
    origin: Option<&str>,
    iterations: usize,
    out: Option<&FsPath>,
) -> Outcome {
    let s = load_substitution(subst)?;
    let p = load_pattern(pattern)?;
    let policy = match origin {
        None => C0Policy::LexLeast,
        Some(text) => {
            let v = parse_origin(text)?;
            let symbol = p
                .symbol_at(&v)
                .ok_or_else(|| UsageError(format!("no cell at origin {v}")))?;
            C0Policy::Start(Cell::new(v, symbol.clone()))
        }
    };
    match iterate(&s, &p, iterations, policy) {
        Ok(images) => {
            let result = images.last().expect("k+1 patterns");
            println!("iterations: {iterations}");
            println!("cells: {}", result.len());
            let text = serialize_pattern(None, result);
            match out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| UsageError(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(IterateError { index, source }) => {
            use combsub::substitution::ApplyError;
            match source {
                ApplyError::Collision {
                    first,
                    second,
                    vector,
                } => {
                    println!("collision: true");
                    println!("iteration: {index}");
                    println!("first: {first}");
                    println!("second: {second}");
                    println!("position: {vector}");
                    Ok(ExitCode::FAILURE)
                }
                other => Err(UsageError(format!("iteration {index}: {other}"))),
            }
        }
    }
}

fn render(pattern: &FsPath, svg: &FsPath, cell_size: u32) -> Outcome {
    if cell_size == 0 {
        return Err(UsageError("cell size must be positive".into()));
    }
    let p = load_pattern(pattern)?;
    let style = RenderStyle {
        cell_size,
        ..RenderStyle::default()
    };
    let document = render_svg(&p, &style);
    std::fs::write(svg, document).map_err(|e| UsageError(format!("{}: {e}", svg.display())))?;
    println!("svg: {}", svg.display());
    println!("cells: {}", p.len());
    Ok(ExitCode::SUCCESS)
}

fn wang(cmd: WangCommand) -> Outcome {
    match cmd {
        WangCommand::Reduce { tiles, overlap, out } => {
            let text = read(&tiles)?;
            let set = parse_tile_set(&text)?;
            let reduction = match overlap {
                None => build_consistency_reduction(&set),
                Some(names) => {
                    let index = |name: &str| {
                        let symbol = Symbol::new(name)
                            .map_err(|e| UsageError(e.to_string()))?;
                        set.index_of(&symbol)
                            .ok_or_else(|| UsageError(format!("no tile named `{name}`")))
                    };
                    let (a, b) = (index(&names[0])?, index(&names[1])?);
                    build_overlap_reduction(&set, a, b)?
                }
            };
            println!("alphabet: {}", reduction.alphabet().len());
            println!("rules: {}", reduction.rules().len());
            let text = serialize_substitution(&reduction);
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| UsageError(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        WangCommand::Cycle { tiles, max_cells } => {
            let text = read(&tiles)?;
            let set = parse_tile_set(&text)?;
            match find_cycle(&set, max_cells) {
                Some(cycle) => {
                    assert!(cycle.verify(&set), "found cycle must re-verify");
                    println!("cycle_found: true");
                    println!("length: {}", cycle.len());
                    println!("cycle: {cycle}");
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("cycle_found: false");
                    println!("max_cells: {max_cells}");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
    }
}

fn corpus(name: &str, out_dir: Option<&FsPath>) -> Outcome {
    let ex = combsub::corpus::example(name)?;
    println!("name: {}", ex.name);
    println!("alphabet: {}", ex.substitution.alphabet().len());
    println!("rules: {}", ex.substitution.rules().len());
    for (pname, p) in &ex.patterns {
        println!("pattern: {pname} ({} cells)", p.len());
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| UsageError(format!("{}: {e}", dir.display())))?;
        let base = ex.name.replace('(', "_").replace(')', "");
        let subst_path = dir.join(format!("{base}.subst"));
        std::fs::write(&subst_path, serialize_substitution(&ex.substitution))
            .map_err(|e| UsageError(format!("{}: {e}", subst_path.display())))?;
        println!("wrote: {}", subst_path.display());
        if !ex.patterns.is_empty() {
            let patterns_path = dir.join(format!("{base}.patterns"));
            let blocks = ex
                .patterns
                .iter()
                .map(|(n, p)| (Some(n.as_str()), p));
            std::fs::write(&patterns_path, serialize_patterns(blocks))
                .map_err(|e| UsageError(format!("{}: {e}", patterns_path.display())))?;
            println!("wrote: {}", patterns_path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
