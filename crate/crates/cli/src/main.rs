mod demo;
mod input;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use convalg_core::complex::rel_image;
use convalg_core::convolution::conv_op;
use convalg_core::etale::{verify_main_iso, verify_main_iso_exhaustive, MainIsoReport};
use convalg_core::lattice::{check_heyting_laws, LawCheckOptions};
use convalg_core::terms::{random_equation, same_equations_report, EquationShape};
use convalg_core::type2::{crosscheck, t2_join, t2_meet, t2_neg};
use convalg_core::{FiniteTopology, HeytingLattice, LatticeMap, DEFAULT_MAX_ENUM};

use crate::input::{load, load_lattice, load_structure, load_topology};
use crate::report::{Format, Report};

#[derive(Parser)]
#[command(
    name = "convalg",
    version,
    about = "Convolution algebras over finite Heyting lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output style: prose for humans or `key=value` records.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of randomized trials.
    #[arg(long, global = true, default_value_t = 100)]
    trials: u64,
    /// Upper bound on exhaustive enumerations.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ENUM, value_parser = positive)]
    max_enum: u128,
}

fn positive(s: &str) -> Result<u128, String> {
    match s.parse::<u128>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Heyting law checks on finite lattices.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Operations of the convolution algebra L^X.
    #[command(subcommand)]
    Conv(ConvCmd),
    /// Operations of the complex algebra of subsets.
    #[command(subcommand)]
    Complex(ComplexCmd),
    /// Subobjects of constant étalé spaces.
    #[command(subcommand)]
    Etale(EtaleCmd),
    /// Equational agreement between L^X and the complex algebra.
    #[command(subcommand)]
    Equations(EquationsCmd),
    /// Type-2 truth values on step functions.
    #[command(subcommand)]
    Type2(Type2Cmd),
    /// Runs the four-point worked example through all three routes.
    PaperDemo,
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Check the Heyting laws on one lattice, or on every topology on n points.
    Check {
        /// `chain:n` or a topology file.
        #[arg(long, required_unless_present = "all_topologies")]
        lattice: Option<String>,
        /// Enumerate every topology on this many points (at most 4).
        #[arg(long, conflicts_with = "lattice")]
        all_topologies: Option<usize>,
        /// Largest subset size for the joinAll/meetAll bound checks.
        #[arg(long, default_value_t = 2)]
        subset_size: usize,
    },
}

#[derive(Args)]
struct RelationArgs {
    #[arg(long)]
    structure: PathBuf,
    /// Relation symbol to apply.
    #[arg(long)]
    relation: String,
}

#[derive(Subcommand)]
enum ConvCmd {
    /// Apply one operation to lattice-valued maps.
    Eval {
        /// `chain:n` or a topology file.
        #[arg(long)]
        lattice: String,
        #[command(flatten)]
        rel: RelationArgs,
        /// Map files, one per argument slot.
        #[arg(long = "arg")]
        args: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ComplexCmd {
    /// Relational image of subsets such as `{x1 x3}`.
    Eval {
        #[command(flatten)]
        rel: RelationArgs,
        #[arg(long = "arg")]
        args: Vec<String>,
    },
}

#[derive(Subcommand)]
enum EtaleCmd {
    /// Check that Φ: L^X → X̂⁺ is an isomorphism.
    VerifyIso {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        topology: PathBuf,
        /// Check every argument tuple instead of random trials.
        #[arg(long)]
        exhaustive: bool,
    },
}

#[derive(Subcommand)]
enum EquationsCmd {
    /// Decide each equation in L^X and in the complex algebra.
    Check {
        /// `chain:n` or a topology file.
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        eqs: Option<PathBuf>,
        /// Additional random equations drawn with `--seed`.
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Type2Op {
    Join,
    Meet,
    Neg,
}

#[derive(Subcommand)]
enum Type2Cmd {
    /// Apply ⊔, ⊓ or ¬ to step functions.
    Eval {
        #[arg(long, value_enum)]
        op: Type2Op,
        #[arg(short)]
        a: PathBuf,
        #[arg(short)]
        b: Option<PathBuf>,
    },
    /// Compare the closed forms with the brute-force grid oracle.
    Crosscheck {
        /// Grid size; must be even.
        #[arg(long, default_value_t = 8)]
        n: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Lattice(LatticeCmd::Check {
            lattice,
            all_topologies,
            subset_size,
        }) => lattice_check(lattice.as_deref(), *all_topologies, *subset_size),
        Command::Conv(ConvCmd::Eval { lattice, rel, args }) => conv_eval(lattice, rel, args),
        Command::Complex(ComplexCmd::Eval { rel, args }) => complex_eval(rel, args),
        Command::Etale(EtaleCmd::VerifyIso {
            structure,
            topology,
            exhaustive,
        }) => verify_iso(cli, structure, topology, *exhaustive),
        Command::Equations(EquationsCmd::Check {
            lattice,
            structure,
            eqs,
            random,
        }) => equations_check(cli, lattice, structure, eqs.as_ref(), *random),
        Command::Type2(Type2Cmd::Eval { op, a, b }) => type2_eval(*op, a, b.as_ref()),
        Command::Type2(Type2Cmd::Crosscheck { n }) => {
            let r = crosscheck(*n, cli.trials, cli.seed)?;
            let mut out = Report::new();
            out.field("n", r.n);
            out.field("seed", cli.seed);
            out.field("trials", r.trials);
            out.field("checks", r.checks);
            if let Some(f) = &r.failure {
                out.fail(f);
            }
            Ok(out.finish())
        }
        Command::PaperDemo => demo::run(),
    }
}

fn lattice_check(spec: Option<&str>, all: Option<usize>, subset_size: usize) -> Result<Report> {
    let opts = LawCheckOptions {
        max_subset_size: subset_size,
    };
    let mut out = Report::new();
    let lattices: Vec<(String, HeytingLattice)> = match (spec, all) {
        (Some(spec), _) => vec![(spec.to_string(), load_lattice(spec)?)],
        (None, Some(n)) => {
            let points = (1..=n).map(|i| format!("p{i}")).collect();
            FiniteTopology::all_on(points)?
                .iter()
                .map(|t| {
                    let opens: Vec<String> = t.opens().iter().map(|&m| t.format_set(m)).collect();
                    (opens.join(" "), HeytingLattice::open_sets(t))
                })
                .collect()
        }
        (None, None) => bail!("one of --lattice or --all-topologies is required"),
    };
    out.field("lattices", lattices.len());
    let mut instances = 0;
    for (name, l) in &lattices {
        let r = check_heyting_laws(l, &opts);
        instances += r.instances;
        if let Some(v) = &r.violation {
            out.fail(format!("{name}: {v}"));
            break;
        }
    }
    out.field("instances", instances);
    Ok(out.finish())
}

fn conv_eval(spec: &str, rel: &RelationArgs, args: &[PathBuf]) -> Result<Report> {
    let l = load_lattice(spec)?;
    let s = load_structure(&rel.structure)?;
    let j = s.symbol(&rel.relation)?;
    let maps: Vec<LatticeMap> = args
        .iter()
        .map(|p| {
            load(p, |text| {
                convalg_core::text::parse_lattice_map(&l, &s, text)
            })
        })
        .collect::<Result<_>>()?;
    let refs: Vec<&LatticeMap> = maps.iter().collect();
    let result = conv_op(&l, &s, j, &refs)?;
    let mut out = Report::new();
    out.map_lines(&result.display(&l, s.carrier()).to_string());
    Ok(out)
}

fn complex_eval(rel: &RelationArgs, args: &[String]) -> Result<Report> {
    let s = load_structure(&rel.structure)?;
    let j = s.symbol(&rel.relation)?;
    let subsets = args
        .iter()
        .map(|a| convalg_core::text::parse_subset(&s, a).with_context(|| format!("argument `{a}`")))
        .collect::<Result<Vec<_>>>()?;
    let image = rel_image(&s, j, &subsets.iter().collect::<Vec<_>>())?;
    let mut out = Report::new();
    out.field("image", image.display(s.carrier()));
    Ok(out)
}

fn verify_iso(cli: &Cli, structure: &Path, topology: &Path, exhaustive: bool) -> Result<Report> {
    let s = load_structure(structure)?;
    let t = load_topology(topology)?;
    let l = HeytingLattice::open_sets(&t);
    let r: MainIsoReport = if exhaustive {
        verify_main_iso_exhaustive(&l, &s, cli.max_enum)?
    } else {
        verify_main_iso(&l, &s, cli.trials, cli.seed)?
    };
    let mut out = Report::new();
    out.field("mode", if exhaustive { "exhaustive" } else { "random" });
    if !exhaustive {
        out.field("seed", cli.seed);
    }
    out.field("trials", r.trials);
    out.field("checks", r.checks);
    if let Some(c) = &r.counterexample {
        out.fail(format!("trial {} {}: {}", c.trial, c.check, c.detail));
    }
    Ok(out.finish())
}

fn equations_check(
    cli: &Cli,
    spec: &str,
    structure: &Path,
    eqs: Option<&PathBuf>,
    random: usize,
) -> Result<Report> {
    let l = load_lattice(spec)?;
    let s = load_structure(structure)?;
    let mut equations = match eqs {
        Some(p) => load(p, convalg_core::text::parse_equations)?,
        None => Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    equations.extend(
        (0..random).map(|_| random_equation(s.signature(), &mut rng, &EquationShape::default())),
    );
    for (i, eq) in equations.iter().enumerate() {
        eq.check(s.signature())
            .with_context(|| format!("equation {}", i + 1))?;
    }
    let r = same_equations_report(&l, &s, &equations, cli.max_enum)?;
    let mut out = Report::new();
    out.field("equations", r.outcomes.len());
    let verdict = |b: bool| if b { "holds" } else { "fails" };
    for o in &r.outcomes {
        out.record(
            "equation",
            format!(
                "{} | convolution={} complex={} agree={}",
                o.equation,
                verdict(o.in_convolution),
                verdict(o.in_complex),
                o.agrees()
            ),
        );
        if let Some(w) = &o.convolution_witness {
            out.note(format!("  convolution counterexample: {w}"));
        }
        if let Some(w) = &o.complex_witness {
            out.note(format!("  complex counterexample: {w}"));
        }
        if !o.agrees() {
            out.fail(format!("the algebras disagree on {}", o.equation));
        }
    }
    Ok(out.finish())
}

fn type2_eval(op: Type2Op, a: &Path, b: Option<&PathBuf>) -> Result<Report> {
    let fa = load(a, convalg_core::text::parse_step_function)?;
    let fb = match (op, b) {
        (Type2Op::Neg, None) => None,
        (Type2Op::Neg, Some(_)) => bail!("neg takes a single argument"),
        (_, Some(b)) => Some(load(b, convalg_core::text::parse_step_function)?),
        (_, None) => bail!("join and meet need -b"),
    };
    let result = match (op, &fb) {
        (Type2Op::Join, Some(fb)) => t2_join(&fa, fb),
        (Type2Op::Meet, Some(fb)) => t2_meet(&fa, fb),
        _ => t2_neg(&fa),
    };
    let mut out = Report::new();
    for line in result.to_text().lines() {
        out.record("piece", line);
    }
    Ok(out)
}
