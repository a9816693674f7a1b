//! `sftkit`: batch front end for the sftkit library.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use sftkit::codes::SlidingBlockCode;
use sftkit::constructions as cons;
use sftkit::entropy::entropy_upper_bound;
use sftkit::format::{self, Report, SftFile};
use sftkit::tm::TuringMachine;
use sftkit::verdict::EXIT_INPUT_ERROR;
use sftkit::verify::{self, ConjugacyCertificate, Placement, SearchBudget};
use sftkit::wang::{sft_to_wang, wang_to_sft};
use sftkit::{blocks, Alphabet, Block, BoxRegion, Pattern, PeriodicConfig, SftError, SftSpec, Verdict};

/// Environment variable holding the default worker count.
const THREADS_VAR: &str = "SFTKIT_THREADS";

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (formats: sftkit 1, sbc 1, tm 1)");

#[derive(Parser, Debug)]
#[command(name = "sftkit", version = VERSION, about = "Subshifts of finite type: budgeted verifiers, constructions and rendering")]
struct Cli {
    /// Worker threads (default: $SFTKIT_THREADS, else one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Whether a pattern contains a forbidden pattern.
    Admissible {
        sft: PathBuf,
        #[arg(long)]
        pattern: String,
    },
    /// Enumerate the admissible B_r blocks.
    Blocks {
        sft: PathBuf,
        #[arg(long)]
        radius: usize,
        /// Print at most this many blocks (the count is always exact).
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Try to prove that no configuration exists.
    Empty {
        sft: PathBuf,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[command(flatten)]
        deepen: Deepen,
    },
    /// Try to prove that a configuration exists via a periodic one.
    Nonempty {
        sft: PathBuf,
        #[arg(long, default_value_t = 4)]
        period_budget: usize,
        #[command(flatten)]
        deepen: Deepen,
    },
    /// Bounded extensibility of a pattern.
    Extend {
        sft: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long, default_value_t = 4)]
        period_budget: usize,
        #[command(flatten)]
        deepen: Deepen,
    },
    /// Entropy upper bounds as CSV rows `n,count,value` (log base 2).
    Entropy {
        sft: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Check a conjugacy certificate.
    VerifyConj {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        forward: PathBuf,
        #[arg(long)]
        backward: PathBuf,
        /// Block radius; defaults to the least legal value.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Search for a conjugacy certificate.
    SearchConj {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_radius: usize,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        #[arg(long, default_value_t = verify::DEFAULT_NODE_LIMIT)]
        node_limit: u64,
        /// Write forward.sbc and backward.sbc here when a certificate is found.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Bounded check that a code maps the source into the target.
    VerifyFactorIncl {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value_t = PlacementArg::Centered)]
        placement: PlacementArg,
    },
    /// Per-block surjectivity test.
    VerifySurj {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        ext_radius: usize,
        #[arg(long, default_value_t = 2)]
        period_budget: usize,
        /// Print the class of every block.
        #[arg(long)]
        blocks: bool,
    },
    /// Emit a constructed SFT or tileset.
    Build {
        #[command(subcommand)]
        what: BuildCmd,
        #[command(flatten)]
        out: Output,
    },
    /// Draw the first admissible block (or torus) as ASCII or SVG.
    Render {
        sft: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Cells to pin, in pattern syntax.
        #[arg(long)]
        pattern: Option<String>,
        /// Render the first periodic configuration with periods up to this.
        #[arg(long)]
        torus: Option<usize>,
        #[arg(long, value_enum, default_value_t = RenderFormat::Ascii)]
        format: RenderFormat,
    },
    /// Convert between tilesets and SFTs.
    Convert {
        #[command(subcommand)]
        what: ConvertCmd,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand, Debug)]
enum BuildCmd {
    /// Full shift on `k` numbered symbols or on named symbols.
    Full {
        #[arg(long, conflicts_with = "alphabet")]
        k: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        alphabet: Option<Vec<String>>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// The canonical empty SFT.
    Empty {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// One symbol, one configuration.
    Singleton {
        #[arg(long, default_value = "0")]
        symbol: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    Product { left: PathBuf, right: PathBuf },
    Union { left: PathBuf, right: PathBuf },
    Lift {
        sft: PathBuf,
        #[arg(long)]
        dim: usize,
    },
    /// Robinson's aperiodic tileset.
    Robinson,
    /// Computation tiles of a machine; the seed is tile 0.
    TmStrip { machine: PathBuf },
    /// `x` next to the Robinson-anchored computation SFT times a full shift.
    Hardness { sft: PathBuf, machine: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ConvertCmd {
    Wang2sft {
        wang: PathBuf,
    },
    /// Also writes the certificate codes when `--certificate-dir` is given.
    Sft2wang {
        sft: PathBuf,
        #[arg(long)]
        certificate_dir: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Output {
    /// Write here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    /// Compare with a frozen file instead of writing; exit 1 on mismatch.
    #[arg(long, global = true, conflicts_with = "output")]
    golden: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Deepen {
    /// Raise the budget from 0 until a verdict or this many seconds pass.
    #[arg(long, value_name = "SECONDS")]
    deepen: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlacementArg {
    Centered,
    Margin,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RenderFormat {
    Ascii,
    Svg,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
}

impl From<SftError> for CliError {
    fn from(e: SftError) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: sftkit::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_sft(path: &Path) -> CliResult<SftSpec> {
    Ok(with_path(path, format::parse_sft(&read(path)?))?.into_sft())
}

fn load_file(path: &Path) -> CliResult<SftFile> {
    with_path(path, format::parse_sft(&read(path)?))
}

fn load_code(path: &Path) -> CliResult<SlidingBlockCode> {
    with_path(path, format::parse_code(&read(path)?))
}

fn load_tm(path: &Path) -> CliResult<TuringMachine> {
    with_path(path, format::parse_tm(&read(path)?))
}

fn block_syntax(b: &Block, a: &Alphabet) -> String {
    b.to_pattern().to_syntax(a)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn torus_fields(r: &mut Report, c: &PeriodicConfig, a: &Alphabet) {
    r.field("periods", join(c.periods()));
    r.field("witness", block_syntax(&c.block(&c.domain()), a));
}

fn emit(report: &Report) {
    print!("{}", report.render());
}

/// Runs `step(b)` for b = 0, 1, ... until a definite verdict or the deadline.
fn deepen<P, R>(secs: f64, mut step: impl FnMut(usize) -> Verdict<P, R>) -> (usize, Verdict<P, R>) {
    let deadline = Instant::now() + Duration::from_secs_f64(secs.max(0.0));
    let mut b = 0;
    loop {
        let v = step(b);
        if !v.is_unknown() || Instant::now() >= deadline {
            return (b, v);
        }
        eprintln!("deepen: budget {b} inconclusive");
        b += 1;
    }
}

fn write_out(out: &Output, text: &str) -> CliResult<i32> {
    if let Some(g) = &out.golden {
        let frozen = read(g)?;
        if frozen == text {
            eprintln!("golden: match {}", g.display());
            return Ok(0);
        }
        eprintln!("golden: mismatch {}", g.display());
        return Ok(1);
    }
    match &out.output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn write_file(dir: &Path, name: &str, text: &str) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    fs::write(&p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.cmd {
        Cmd::Admissible { sft, pattern } => {
            let x = load_sft(&sft)?;
            let p = Pattern::parse(&pattern, x.alphabet(), x.dim())?;
            let ok = x.is_admissible(&p)?;
            let v: Verdict<(), ()> = if ok { Verdict::Proven(()) } else { Verdict::Refuted(()) };
            emit(&Report::new(&v));
            Ok(v.exit_code())
        }
        Cmd::Blocks { sft, radius, limit } => {
            let x = load_sft(&sft)?;
            let mut n = 0usize;
            let mut shown = String::new();
            for b in blocks::enumerate_admissible_blocks(&x, radius) {
                if limit.map_or(true, |l| n < l) {
                    shown.push_str(&block_syntax(&b, x.alphabet()));
                    shown.push('\n');
                }
                n += 1;
                if n % 100_000 == 0 {
                    eprintln!("blocks: {n} so far");
                }
            }
            println!("radius: {radius}\ncount: {n}");
            print!("{shown}");
            Ok(0)
        }
        Cmd::Empty { sft, n_max, deepen: d } => {
            let x = load_sft(&sft)?;
            let v = match d.deepen {
                Some(s) => deepen(s, |n| verify::prove_empty(&x, n)).1,
                None => verify::prove_empty(&x, n_max),
            };
            let mut r = Report::new(&v);
            if let Verdict::Proven(n) = &v {
                r.field("n", n);
            }
            emit(&r);
            Ok(v.exit_code())
        }
        Cmd::Nonempty { sft, period_budget, deepen: d } => {
            let x = load_sft(&sft)?;
            let v = match d.deepen {
                Some(s) => deepen(s, |p| verify::prove_nonempty(&x, p.max(1))).1,
                None => verify::prove_nonempty(&x, period_budget),
            };
            let mut r = Report::new(&v);
            if let Verdict::Proven(c) = &v {
                torus_fields(&mut r, c, x.alphabet());
            }
            emit(&r);
            Ok(v.exit_code())
        }
        Cmd::Extend { sft, pattern, radius, period_budget, deepen: d } => {
            let x = load_sft(&sft)?;
            let p = Pattern::parse(&pattern, x.alphabet(), x.dim())?;
            let v = match d.deepen {
                Some(s) => {
                    let mut err = None;
                    let (_, v) = deepen(s, |b| match blocks::check_extensibility(&p, &x, b, b) {
                        Ok(v) => v,
                        Err(e) => {
                            err = Some(e);
                            Verdict::Refuted(blocks::NonExtensible::Inadmissible)
                        }
                    });
                    if let Some(e) = err {
                        return Err(e.into());
                    }
                    v
                }
                None => blocks::check_extensibility(&p, &x, radius, period_budget)?,
            };
            let mut r = Report::new(&v);
            match &v {
                Verdict::Proven(c) => torus_fields(&mut r, c, x.alphabet()),
                Verdict::Refuted(blocks::NonExtensible::Inadmissible) => {
                    r.field("reason", "inadmissible");
                }
                Verdict::Refuted(blocks::NonExtensible::NoBlock { radius }) => {
                    r.field("reason", "no admissible block").field("radius", radius);
                }
                Verdict::Unknown(_) => {}
            }
            emit(&r);
            Ok(v.exit_code())
        }
        Cmd::Entropy { sft, n } => {
            let x = load_sft(&sft)?;
            eprintln!("entropy upper bounds, log base 2");
            println!("n,count,value");
            for n in n {
                let e = entropy_upper_bound(&x, n)?;
                let value = e.value.map_or_else(|| "empty".to_string(), |v| format!("{v}"));
                println!("{},{},{}", e.n, e.count, value);
            }
            Ok(0)
        }
        Cmd::VerifyConj { source, target, forward, backward, k } => {
            let x = load_sft(&source)?;
            let y = load_sft(&target)?;
            let f = load_code(&forward)?;
            let g = load_code(&backward)?;
            let k = match k {
                Some(k) => k,
                None => verify::min_legal_k(&x, &y, &f, &g)?,
            };
            let cert = ConjugacyCertificate { forward: f, backward: g, k };
            let v = verify::verify_conjugacy_certificate(&x, &y, &cert)?;
            let mut r = Report::new(&v);
            r.field("k", k);
            match &v {
                Verdict::Proven(p) => {
                    r.field("source-checks", p.source_checks).field("target-checks", p.target_checks);
                }
                Verdict::Refuted(c) => {
                    let (space, a) = match c.space {
                        verify::Space::Source => ("source", x.alphabet()),
                        verify::Space::Target => ("target", y.alphabet()),
                    };
                    r.field("space", space).field("expected", a.name(c.expected));
                    r.field("got", c.got.map_or("*", |s| a.name(s)));
                    r.field("witness", block_syntax(&c.block, a));
                }
                Verdict::Unknown(_) => {}
            }
            emit(&r);
            Ok(v.exit_code())
        }
        Cmd::SearchConj { source, target, max_radius, max_k, node_limit, out_dir } => {
            let x = load_sft(&source)?;
            let y = load_sft(&target)?;
            let v = verify::search_conjugacy_with(&x, &y, SearchBudget { max_radius, max_k, node_limit })?;
            let mut r = Report::new(&v);
            if let Verdict::Proven(c) = &v {
                r.field("forward-radius", c.forward.radius()).field("backward-radius", c.backward.radius()).field("k", c.k);
                if let Some(dir) = &out_dir {
                    write_file(dir, "forward.sbc", &format::write_code(&c.forward))?;
                    write_file(dir, "backward.sbc", &format::write_code(&c.backward))?;
                }
            }
            emit(&r);
            Ok(v.exit_code())
        }
        Cmd::VerifyFactorIncl { code, source, target, r, placement } => {
            let f = load_code(&code)?;
            let x = load_sft(&source)?;
            let y = load_sft(&target)?;
            let placement = match placement {
                PlacementArg::Centered => Placement::Centered,
                PlacementArg::Margin => Placement::Margin,
            };
            let v = verify::check_factor_inclusion_placed(&f, &x, &y, r, placement)?;
            let mut rep = Report::new(&v);
            match &v {
                Verdict::Proven(p) => {
                    rep.field("r", p.r).field("checks", p.checks);
                }
                Verdict::Unknown(b) => {
                    if let Some(s) = &b.suspect {
                        rep.field("witness", block_syntax(s, x.alphabet()));
                        rep.field("image", block_syntax(&f.apply_to_block(s)?, y.alphabet()));
                    }
                }
                Verdict::Refuted(never) => match *never {},
            }
            emit(&rep);
            Ok(v.exit_code())
        }
        Cmd::VerifySurj { code, source, target, n, ext_radius, period_budget, blocks: show } => {
            let f = load_code(&code)?;
            let x = load_sft(&source)?;
            let y = load_sft(&target)?;
            let rep = verify::check_surjectivity(&f, &x, &y, n, ext_radius, period_budget)?;
            let mut r = Report::new(&rep.verdict);
            match &rep.verdict {
                Verdict::Proven(e) => {
                    r.field("evidence", format!("all {} blocks satisfied at n={} radius={}; not a proof", e.blocks, e.n, e.ext_radius));
                }
                Verdict::Refuted(c) => {
                    r.field("block", block_syntax(&c.block, y.alphabet()));
                    torus_fields(&mut r, &c.witness, y.alphabet());
                }
                Verdict::Unknown(_) => {}
            }
            if show {
                for (b, c) in &rep.blocks {
                    let class = match c {
                        verify::BlockClass::SatisfiedByPreimage(_) => "preimage".to_string(),
                        verify::BlockClass::SatisfiedByNonExtensibility(r0) => format!("non-extensible at {r0}"),
                        verify::BlockClass::RefutedBlock(_) => "refuted".to_string(),
                        verify::BlockClass::Undetermined => "undetermined".to_string(),
                    };
                    r.field("class", format!("{} {class}", block_syntax(b, y.alphabet())));
                }
            }
            emit(&r);
            Ok(rep.verdict.exit_code())
        }
        Cmd::Build { what, out } => {
            let text = match what {
                BuildCmd::Full { k, alphabet, dim } => {
                    let a = match (k, alphabet) {
                        (_, Some(names)) => Alphabet::new(names)?,
                        (Some(k), None) if k >= 1 => Alphabet::numbered(k),
                        (None, None) => Alphabet::numbered(2),
                        _ => return Err(CliError::Usage("--k must be at least 1".into())),
                    };
                    format::write_sft(&cons::full_shift(&a, dim))
                }
                BuildCmd::Empty { k, dim } => {
                    if k == 0 {
                        return Err(CliError::Usage("--k must be at least 1".into()));
                    }
                    format::write_sft(&cons::empty_sft(&Alphabet::numbered(k), dim))
                }
                BuildCmd::Singleton { symbol, dim } => format::write_sft(&cons::singleton_sft(&symbol, dim)?),
                BuildCmd::Product { left, right } => format::write_sft(&cons::product(&load_sft(&left)?, &load_sft(&right)?)?),
                BuildCmd::Union { left, right } => {
                    format::write_sft(&cons::disjoint_union(&load_sft(&left)?, &load_sft(&right)?)?)
                }
                BuildCmd::Lift { sft, dim } => format::write_sft(&cons::lift_dimension(&load_sft(&sft)?, dim)?),
                BuildCmd::Robinson => format::write_wang(&cons::robinson_tileset()),
                BuildCmd::TmStrip { machine } => format::write_wang(&cons::tm_strip_tileset(&load_tm(&machine)?)?.0),
                BuildCmd::Hardness { sft, machine } => {
                    format::write_sft(&cons::conj_hardness_instance(&load_sft(&sft)?, &load_tm(&machine)?)?)
                }
            };
            write_out(&out, &text)
        }
        Cmd::Render { sft, radius, pattern, torus, format } => {
            let x = load_sft(&sft)?;
            let pins = match &pattern {
                Some(p) => Pattern::parse(p, x.alphabet(), x.dim())?,
                None => Pattern::new(x.dim()),
            };
            let block = match torus {
                Some(budget) => blocks::find_periodic(&x, budget, &pins).map(|c| c.block(&c.domain())),
                None => blocks::first_block_with(&x, &BoxRegion::cube(x.dim(), radius), &pins),
            };
            let Some(b) = block else {
                eprintln!("nothing to render: no admissible block or torus within the budget");
                return Ok(2);
            };
            let text = match format {
                RenderFormat::Ascii => render::ascii(&b, x.alphabet()),
                RenderFormat::Svg => render::svg(&b, x.alphabet()),
            };
            print!("{text}");
            Ok(0)
        }
        Cmd::Convert { what, out } => match what {
            ConvertCmd::Wang2sft { wang } => match load_file(&wang)? {
                SftFile::Wang(t) => write_out(&out, &format::write_sft(&wang_to_sft(&t))),
                SftFile::Sft(_) => Err(CliError::Input(format!("{}: not a Wang tileset", wang.display()))),
            },
            ConvertCmd::Sft2wang { sft, certificate_dir } => {
                let x = load_sft(&sft)?;
                let (t, f, g) = sft_to_wang(&x)?;
                if let Some(dir) = &certificate_dir {
                    write_file(dir, "forward.sbc", &format::write_code(&f))?;
                    write_file(dir, "backward.sbc", &format::write_code(&g))?;
                }
                write_out(&out, &format::write_wang(&t))
            }
        },
    }
}

fn threads(flag: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(n) = flag {
        return if n >= 1 { Ok(Some(n)) } else { Err(CliError::Usage("--threads must be at least 1".into())) };
    }
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_VAR} must be an integer >= 1, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = threads(cli.threads).and_then(|n| {
        if let Some(n) = n {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        run(cli)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
        Err(CliError::Input(m)) => {
            eprintln!("input error: {m}");
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}
