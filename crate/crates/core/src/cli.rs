//! Command-line front end. Exit codes: 0 success, 1 a check failed or a
//! search budget ran out, 2 usage, parse or precondition error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::boolfn::{gap_search, measures, uc1_dnf, DnfFile, TruthTable};
use crate::entropy::{
    find_dense_restriction, fiber_distribution, is_delta_dense, uniformity_gap,
};
use crate::error::{Error, Result};
use crate::gadget::{
    compose, discrepancy_exact, discrepancy_sample, gadget_gl, gadget_ip, hadamard,
    is_strongly_unbiased, lifted_partition, lindsey_check, within_discrepancy_bound, Gadget,
    EXACT_SIDE_CAP,
};
use crate::graph::{bp_exact, canonical_json, chromatic_number, verify_covering, BicliqueCovering, Graph};
use crate::matrix::{random_regular, BoolMatrix, Rectangle};
use crate::rank::{
    binary_rank, boolean_rank, verify_rectangles, RectangleSet, DEFAULT_NODE_BUDGET,
};
use crate::transform::{transform, verify_output, Budgets, TransformOutput};
use crate::{ExactDistribution, Rational};

#[derive(Parser, Debug)]
#[command(name = "regrank", version, about = "Rank, gadget and graph tools for 0,1 matrices")]
struct Cli {
    /// Use parallel modes where available (results are unchanged).
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Real, binary or Boolean rank of a matrix file.
    Rank {
        #[arg(long, value_enum)]
        mode: RankMode,
        matrix: PathBuf,
        /// Search-node budget; 0 means unlimited.
        #[arg(long)]
        budget: Option<u64>,
        /// Write the rectangle certificate here.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Matrix of a truth table composed with a gadget.
    Compose {
        #[arg(long = "f")]
        f: PathBuf,
        #[arg(long, value_enum)]
        gadget: GadgetKind,
        #[arg(long)]
        ell: usize,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Checks on a gadget.
    Gadget {
        #[arg(long)]
        ell: usize,
        #[arg(long, value_enum, default_value = "gl")]
        gadget: GadgetKind,
        #[arg(long, value_enum)]
        check: GadgetCheck,
        /// Local-search trials when the exact discrepancy is out of reach.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Boolean function tools.
    Boolfn {
        #[command(subcommand)]
        tool: BoolfnTool,
    },
    /// Rectangle partition lifted from an unambiguous DNF.
    LiftPartition {
        #[arg(long)]
        dnf: PathBuf,
        #[arg(long, value_enum)]
        gadget: GadgetKind,
        #[arg(long)]
        ell: usize,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Regular matrix to regular graph with certificates.
    Transform {
        matrix: PathBuf,
        /// Boolean rank of the complement, if already known.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Re-check a certificate file.
    Verify {
        #[arg(long, value_enum)]
        what: VerifyWhat,
        /// rectangles: MATRIX CERT; covering: GRAPH COVERING; transform: MATRIX OUTPUT.
        #[arg(num_args = 2)]
        args: Vec<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Graph solvers.
    Graph {
        #[arg(value_enum)]
        tool: GraphTool,
        graph: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Random d-regular n x n matrix.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Distributions on gadget fibers.
    Entropy {
        #[command(subcommand)]
        tool: EntropyTool,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum RankMode {
    Real,
    Binary,
    Boolean,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum GadgetKind {
    Gl,
    Ip,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum GadgetCheck {
    Unbiased,
    Disc,
    Lindsey,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum VerifyWhat {
    Rectangles,
    Covering,
    Transform,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum GraphTool {
    Chi,
    Bp,
}

#[derive(Subcommand, Debug)]
enum BoolfnTool {
    /// C1, C0 and UC1 of a truth table.
    Measures {
        tt: PathBuf,
        /// Write a minimum-width unambiguous DNF here.
        #[arg(long)]
        dnf: Option<PathBuf>,
    },
    /// Largest C0 - UC1 gap on n variables.
    Gap {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1 << 16)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct FiberArgs {
    #[arg(long, value_enum, default_value = "gl")]
    gadget: GadgetKind,
    #[arg(long)]
    ell: usize,
    /// Target outputs as a bit string `z_1 ... z_n`.
    #[arg(long)]
    z: String,
    /// Restrict to a rectangle given as `{"rows":[...],"cols":[...]}`.
    #[arg(long)]
    rect: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum EntropyTool {
    /// Support size and min-entropy of a fiber distribution.
    Fiber {
        #[command(flatten)]
        src: FiberArgs,
    },
    /// Delta-density of a fiber distribution.
    Density {
        #[command(flatten)]
        src: FiberArgs,
        #[arg(long)]
        delta: String,
    },
    /// Deviation of gadget outputs on a block set from uniform.
    Uniformity {
        #[command(flatten)]
        src: FiberArgs,
        /// Comma-separated 1-based blocks.
        #[arg(long)]
        blocks: String,
    },
    /// Block restriction that makes the rest dense.
    Restrict {
        #[command(flatten)]
        src: FiberArgs,
        #[arg(long)]
        delta: String,
    },
}

/// Runs the tool on `argv` and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Verification(_) | Error::Budget { .. } => 1,
                _ => 2,
            }
        }
    }
}

fn budget(b: Option<u64>, default: u64, err: &mut dyn Write) -> u64 {
    match b {
        Some(0) => {
            let _ = writeln!(err, "warning: unlimited budget, the search may take very long");
            u64::MAX
        }
        Some(v) => v,
        None => default,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_line(s: String) -> String {
    s + "\n"
}

fn make_gadget(kind: GadgetKind, ell: usize) -> Result<Gadget> {
    match kind {
        GadgetKind::Gl => gadget_gl(ell),
        GadgetKind::Ip => gadget_ip(ell),
    }
}

fn parse_ratio(s: &str) -> Result<Rational> {
    let bad = || Error::param(format!("cannot parse {s:?} as a fraction p/q"));
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: i64 = p.trim().parse().map_err(|_| bad())?;
    let q: i64 = q.trim().parse().map_err(|_| bad())?;
    if q <= 0 {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

fn exit_for(ok: bool) -> i32 {
    if ok {
        0
    } else {
        1
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Rank {
            mode,
            matrix,
            budget: b,
            cert,
        } => {
            let m = BoolMatrix::parse(&read(&matrix)?)?;
            let b = budget(b, DEFAULT_NODE_BUDGET, err);
            let res = match mode {
                RankMode::Real => {
                    if cert.is_some() {
                        return Err(Error::param("real rank has no rectangle certificate"));
                    }
                    writeln!(out, "{}", m.real_rank())?;
                    return Ok(0);
                }
                RankMode::Binary => binary_rank(&m, b),
                RankMode::Boolean => boolean_rank(&m, b),
            };
            writeln!(out, "{}", res.value)?;
            if let Some(p) = cert {
                fs::write(p, json_line(res.certificate.to_json()))?;
            }
            if !res.optimal {
                writeln!(err, "budget exhausted after {} nodes; value is an upper bound", res.nodes)?;
                return Ok(1);
            }
            Ok(0)
        }
        Command::Compose { f, gadget, ell, o } => {
            let f = TruthTable::parse(&read(&f)?)?;
            let g = make_gadget(gadget, ell)?;
            let m = compose(&f, &g, f.n())?;
            emit(o.as_deref(), &m.to_text(), out)?;
            Ok(0)
        }
        Command::Gadget {
            ell,
            gadget,
            check,
            trials,
            seed,
        } => {
            let g = make_gadget(gadget, ell)?;
            match check {
                GadgetCheck::Unbiased => {
                    let ok = is_strongly_unbiased(&g);
                    writeln!(out, "{ok}")?;
                    Ok(exit_for(ok))
                }
                GadgetCheck::Disc => {
                    let (d, how) = if g.side() <= EXACT_SIDE_CAP {
                        (discrepancy_exact(&g)?, "exact")
                    } else {
                        (discrepancy_sample(&g, trials, seed)?, "sampled lower bound")
                    };
                    let ok = within_discrepancy_bound(&d, ell);
                    writeln!(out, "{d}")?;
                    let e = Rational::new(ell as i64 + 3, 2);
                    writeln!(out, "bound 2^-{e}")?;
                    writeln!(out, "{how}, within bound: {ok}")?;
                    Ok(exit_for(ok))
                }
                GadgetCheck::Lindsey => {
                    let ok = lindsey_check(&hadamard(ell)?)?;
                    writeln!(out, "{ok}")?;
                    Ok(exit_for(ok))
                }
            }
        }
        Command::Boolfn { tool } => match tool {
            BoolfnTool::Measures { tt, dnf } => {
                let f = TruthTable::parse(&read(&tt)?)?;
                let ms = measures(&f)?;
                writeln!(out, "C1 {}\nC0 {}\nUC1 {}", ms.c1, ms.c0, ms.uc1)?;
                if let Some(p) = dnf {
                    let d = uc1_dnf(&f)?;
                    fs::write(p, json_line(canonical_json(&DnfFile::from_dnf(f.n(), &d))))?;
                }
                Ok(0)
            }
            BoolfnTool::Gap { n, budget: b, seed } => {
                let b = budget(Some(b), 0, err);
                let r = gap_search(n, b, seed, cli.parallel)?;
                writeln!(out, "{}", r.f.to_text().trim_end())?;
                writeln!(out, "UC1 {}\nC0 {}\ngap {}", r.uc1, r.c0, r.gap())?;
                writeln!(
                    out,
                    "examined {}{}",
                    r.examined,
                    if r.exhaustive { " (all functions)" } else { "" }
                )?;
                if r.partial {
                    writeln!(err, "budget exhausted before all functions were examined")?;
                    return Ok(1);
                }
                Ok(0)
            }
        },
        Command::LiftPartition { dnf, gadget, ell, o } => {
            let file: DnfFile = serde_json::from_str(&read(&dnf)?)?;
            let d = file.to_dnf()?;
            let g = make_gadget(gadget, ell)?;
            let p = lifted_partition(&d, &g, file.n)?;
            writeln!(err, "{} rectangles", p.len())?;
            emit(o.as_deref(), &json_line(p.to_json()), out)?;
            Ok(0)
        }
        Command::Transform {
            matrix,
            m,
            budget: b,
            o,
        } => {
            let mat = BoolMatrix::parse(&read(&matrix)?)?;
            let b = budget(b, DEFAULT_NODE_BUDGET, err);
            let res = transform(&mat, m, Budgets { rank: b, graph: b.max(crate::graph::DEFAULT_GRAPH_BUDGET) })?;
            writeln!(
                err,
                "case {}, {} vertices, degree {}, {} bicliques, chi threshold {}",
                res.case_tag,
                res.graph.n(),
                res.degree,
                res.bp_certificate.len(),
                res.chi_threshold
            )?;
            emit(o.as_deref(), &json_line(res.to_json()), out)?;
            Ok(0)
        }
        Command::Verify { what, args, budget: b } => {
            let b = budget(b, DEFAULT_NODE_BUDGET, err);
            let ok = match what {
                VerifyWhat::Rectangles => {
                    let m = BoolMatrix::parse(&read(&args[0])?)?;
                    let set = RectangleSet::from_json(&read(&args[1])?)?;
                    verify_rectangles(&m, &set)?
                }
                VerifyWhat::Covering => {
                    let g = Graph::from_json(&read(&args[0])?)?;
                    let c = BicliqueCovering::from_json(&read(&args[1])?)?;
                    verify_covering(&g, &c)?
                }
                VerifyWhat::Transform => {
                    let m = BoolMatrix::parse(&read(&args[0])?)?;
                    let t = TransformOutput::from_json(&read(&args[1])?)?;
                    let report = verify_output(&m, &t, Budgets { rank: b, graph: b.max(crate::graph::DEFAULT_GRAPH_BUDGET) });
                    write!(out, "{report}")?;
                    report.passed()
                }
            };
            writeln!(out, "{}", if ok { "valid" } else { "invalid" })?;
            Ok(exit_for(ok))
        }
        Command::Graph {
            tool,
            graph,
            budget: b,
            cert,
        } => {
            let g = Graph::from_json(&read(&graph)?)?;
            match tool {
                GraphTool::Chi => {
                    if cert.is_some() {
                        return Err(Error::param("--cert applies to bp only"));
                    }
                    let c = chromatic_number(&g)?;
                    writeln!(out, "{}", c.count)?;
                    Ok(0)
                }
                GraphTool::Bp => {
                    let b = budget(b, crate::graph::DEFAULT_GRAPH_BUDGET, err);
                    let r = bp_exact(&g, b)?;
                    writeln!(out, "{}", r.value)?;
                    if let Some(p) = cert {
                        fs::write(p, json_line(r.covering.to_json()))?;
                    }
                    if !r.optimal {
                        writeln!(err, "budget exhausted; value is an upper bound")?;
                        return Ok(1);
                    }
                    Ok(0)
                }
            }
        }
        Command::Gen { n, d, seed, o } => {
            let m = random_regular(n, d, seed)?;
            emit(o.as_deref(), &m.to_text(), out)?;
            Ok(0)
        }
        Command::Entropy { tool } => run_entropy(tool, out),
    }
}

fn fiber(src: &FiberArgs) -> Result<ExactDistribution> {
    let g = make_gadget(src.gadget, src.ell)?;
    if src.z.is_empty() || !src.z.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::param("--z must be a nonempty bit string"));
    }
    let n = src.z.len();
    let z = usize::from_str_radix(&src.z, 2).map_err(|_| Error::param("--z too long"))?;
    let rect: Option<Rectangle> = match &src.rect {
        Some(p) => {
            let r: Rectangle = serde_json::from_str(&read(p)?)?;
            Some(Rectangle::new(r.rows, r.cols)?)
        }
        None => None,
    };
    fiber_distribution(&g, n, z, rect.as_ref())
}

fn run_entropy(tool: EntropyTool, out: &mut dyn Write) -> Result<i32> {
    match tool {
        EntropyTool::Fiber { src } => {
            let d = fiber(&src)?;
            let h = d.min_entropy()?;
            writeln!(out, "support {}", d.support_size())?;
            writeln!(out, "max probability {}", h.max_prob)?;
            writeln!(out, "min-entropy {:.6}", h.bits.0)?;
            Ok(0)
        }
        EntropyTool::Density { src, delta } => {
            let d = fiber(&src)?;
            let r = is_delta_dense(&d, &parse_ratio(&delta)?)?;
            match r.witness {
                None => writeln!(out, "dense")?,
                Some(w) => writeln!(out, "not dense, violating blocks {w:?}")?,
            }
            Ok(exit_for(r.dense))
        }
        EntropyTool::Uniformity { src, blocks } => {
            let d = fiber(&src)?;
            let g = make_gadget(src.gadget, src.ell)?;
            let blocks = blocks
                .split(',')
                .map(|b| b.trim().parse::<usize>().map_err(|_| Error::param(format!("bad block {b:?}"))))
                .collect::<Result<Vec<_>>>()?;
            writeln!(out, "{}", uniformity_gap(&d, &g, &blocks)?)?;
            Ok(0)
        }
        EntropyTool::Restrict { src, delta } => {
            let d = fiber(&src)?;
            let r = find_dense_restriction(&d, &parse_ratio(&delta)?)?;
            writeln!(out, "fixed blocks {:?}", r.blocks)?;
            writeln!(out, "assignment x={} y={}", r.alpha.0, r.alpha.1)?;
            writeln!(out, "support {}", r.conditioned.support_size())?;
            Ok(0)
        }
    }
}
