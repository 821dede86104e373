use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use taut_core::gwi::{format_document, format_graph, parse_document, parse_graph};
use taut_core::operators::apply_r;
use taut_core::relations::registry::file_name;
use taut_core::relations::Registry;
use taut_core::solver::{
    ambient_label, check_invariance, default_lmax, enumerate, find_equations, search_classes, EnumerateOptions,
};
use taut_core::strata::Decorations;
use taut_core::{symmetrize, FormalSum, TautError};

#[derive(Parser)]
#[command(name = "taut", version, about = "Search for and verify tautological equations on moduli of stable curves")]
struct Cli {
    /// Directory of stored relations, one `g<g>n<n>k<k>.gwi` file per ambient.
    #[arg(long, global = true, env = "TAUT_REGISTRY_DIR")]
    registry: Option<PathBuf>,

    /// Print progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Ambient {
    #[arg(short = 'g')]
    genus: u32,
    #[arg(short = 'n')]
    points: u32,
    #[arg(short = 'k')]
    codim: u32,
}

#[derive(Args, Clone, Copy)]
struct DecorationFlags {
    /// Undecorated boundary strata only.
    #[arg(long, conflicts_with = "psi_only")]
    boundary_only: bool,
    /// Strata decorated by ψ classes but not κ classes.
    #[arg(long)]
    psi_only: bool,
}

impl DecorationFlags {
    fn kind(self) -> Decorations {
        if self.boundary_only {
            Decorations::None
        } else if self.psi_only {
            Decorations::Psi
        } else {
            Decorations::PsiKappa
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the classes of codimension k on M̄_{g,n}.
    Enumerate {
        #[command(flatten)]
        ambient: Ambient,
        #[command(flatten)]
        decorations: DecorationFlags,
        /// One representative per orbit of the markings.
        #[arg(long)]
        symmetrize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for invariant equations among the classes of codimension k.
    Find {
        #[command(flatten)]
        ambient: Ambient,
        #[command(flatten)]
        decorations: DecorationFlags,
        /// Search the full space instead of the orbit sums of the markings.
        #[arg(long)]
        unsymmetrized: bool,
        #[arg(long)]
        lmax: Option<u32>,
        /// Use the graphs in this file, one per line, as the classes c1, c2, …
        #[arg(long)]
        classes: Option<PathBuf>,
        /// Directory for candidate equation files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check 𝔯_l(E) = 0 modulo the known relations.
    Check {
        file: PathBuf,
        #[arg(long)]
        lmax: Option<u32>,
    },
    /// Print the normal form of an expression.
    Reduce {
        file: PathBuf,
        /// Express the result in these classes instead, separated by blank lines.
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// Apply 𝔯_l and print the result without reducing it.
    Apply {
        file: PathBuf,
        #[arg(short = 'l')]
        l: u32,
    },
    /// Report the relations and basis of a connected ambient.
    Rank {
        #[command(flatten)]
        ambient: Ambient,
    },
}

enum Failure {
    Check,
    Input(anyhow::Error),
    Missing(TautError),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<TautError>() {
            Ok(t @ TautError::InductiveDataMissing { .. }) => Failure::Missing(t),
            Ok(t) => Failure::Input(t.into()),
            Err(e) => Failure::Input(e),
        }
    }
}

impl From<TautError> for Failure {
    fn from(e: TautError) -> Self {
        Failure::from(anyhow::Error::from(e))
    }
}

type Outcome = Result<(), Failure>;

fn registry(cli: &Cli) -> anyhow::Result<Registry> {
    match &cli.registry {
        None => Ok(Registry::new()),
        Some(dir) if dir.is_dir() => Ok(Registry::load(dir)?),
        Some(dir) => Err(anyhow!("registry directory {} does not exist", dir.display())),
    }
}

fn read_expression(path: &Path) -> anyhow::Result<FormalSum> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_document(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Expressions separated by blank lines.
fn read_classes(path: &Path) -> anyhow::Result<Vec<FormalSum>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for block in text.split("\n\n") {
        let body: Vec<&str> = block.lines().filter(|l| !l.trim_start().starts_with('#')).collect();
        if body.iter().any(|l| !l.trim().is_empty()) {
            out.push(parse_document(&body.join("\n")).with_context(|| format!("parsing {}", path.display()))?);
        }
    }
    Ok(out)
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_enumerate(a: Ambient, d: DecorationFlags, symmetrize: bool, out: Option<&Path>) -> Outcome {
    let points = if symmetrize { (1..=a.points).collect() } else { Vec::new() };
    let opts = EnumerateOptions { decorations: d.kind(), symmetrize_points: points };
    let classes = enumerate(a.genus, a.points, a.codim, &opts)?;
    let mut text = String::new();
    for c in &classes {
        writeln!(text, "{}", format_graph(c)).unwrap();
    }
    writeln!(text, "# {} classes", classes.len()).unwrap();
    emit(out, &text)?;
    Ok(())
}

struct FindOptions<'a> {
    decorations: DecorationFlags,
    unsymmetrized: bool,
    lmax: Option<u32>,
    classes: Option<&'a Path>,
}

fn cmd_find(cli: &Cli, a: Ambient, f: &FindOptions, out: &Path) -> Outcome {
    let reg = registry(cli)?;
    let points: Vec<u32> = if f.unsymmetrized { Vec::new() } else { (1..=a.points).collect() };
    let report = match f.classes {
        None => {
            let opts = EnumerateOptions { decorations: f.decorations.kind(), symmetrize_points: points };
            find_equations(a.genus, a.points, a.codim, &opts, f.lmax, &reg)?
        }
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut classes = Vec::new();
            for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
                let g = parse_graph(line).with_context(|| format!("parsing {}", path.display()))?;
                classes.push(if points.len() < 2 { FormalSum::from_graph(&g) } else { symmetrize(&g, &points)? });
            }
            search_classes(a.genus, a.points, a.codim, classes, f.lmax, &reg)?
        }
    };
    for (i, c) in report.classes.iter().enumerate() {
        let rep = c.iter().next().map(|(k, _)| format_graph(k)).unwrap_or_default();
        println!("CLASS c{} {}", i + 1, rep);
    }
    if report.system.rows.is_empty() && report.nullspace.is_empty() {
        println!("NOTE top codimension: no invariance conditions, classes here are inductive data");
        println!("CANDIDATES 0");
        return Ok(());
    }
    for row in &report.system.rows {
        println!("ROW {} {}", row.ambient, row.form);
    }
    println!("SYSTEM rows={} unknowns={} rank={}", report.system.rows.len(), report.system.num_unknowns, report.system.rank());
    println!("NULLSPACE dim={}", report.nullspace.len());
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut written = 0;
    for cand in &report.candidates {
        let coeffs: Vec<String> = cand.coefficients.iter().map(ToString::to_string).collect();
        if cand.trivial {
            println!("TRIVIAL {}", coeffs.join(","));
            continue;
        }
        written += 1;
        let key = (a.genus, a.points, a.codim);
        let name = file_name(key).replace(".gwi", &format!("-candidate{written}.gwi"));
        let path = out.join(name);
        let mut text = String::from("# convention: glued-half-edges\n# kappa: arbarello-cornalba\n# provenance: generated\n");
        writeln!(text, "# coefficients: {}", coeffs.join(",")).unwrap();
        text.push_str(&format_document(&cand.equation));
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        println!("CANDIDATE {}", path.display());
    }
    println!("CANDIDATES {written}");
    Ok(())
}

fn cmd_check(cli: &Cli, file: &Path, lmax: Option<u32>) -> Outcome {
    let reg = registry(cli)?;
    let e = read_expression(file)?;
    let lmax = match lmax {
        Some(l) => l,
        None => default_lmax(&e)?,
    };
    if lmax == 0 {
        println!("VACUOUS no l in range, top codimension");
        return Ok(());
    }
    let mut ok = true;
    for rep in check_invariance(&e, lmax, &reg)? {
        if rep.holds() {
            println!("l={} ZERO", rep.l);
            continue;
        }
        ok = false;
        println!("l={} NONZERO", rep.l);
        for (k, c) in rep.residual.iter() {
            println!("  RESIDUAL {} {}*{}", ambient_label(k), c, format_graph(k));
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_reduce(cli: &Cli, file: &Path, basis: Option<&Path>) -> Outcome {
    let reg = registry(cli)?;
    let e = read_expression(file)?;
    let Some(basis) = basis else {
        let nf = reg.normal_form(&e)?;
        if nf.is_zero() {
            println!("ZERO");
        } else {
            print!("{}", format_document(&nf));
        }
        return Ok(());
    };
    let classes = read_classes(basis)?;
    let chosen = reg.class_basis(&classes)?;
    println!("BASIS {}", chosen.iter().map(|i| format!("c{}", i + 1)).collect::<Vec<_>>().join(" "));
    match reg.express(&classes, &e)? {
        Some(form) if form.is_zero() => println!("ZERO"),
        Some(form) => println!("{form}"),
        None => {
            println!("NOT-IN-SPAN");
            return Err(Failure::Check);
        }
    }
    Ok(())
}

fn cmd_apply(file: &Path, l: u32) -> Outcome {
    let e = read_expression(file)?;
    let out = apply_r(&e, l)?;
    if out.is_zero() {
        println!("0");
    } else {
        print!("{}", format_document(&out));
    }
    Ok(())
}

fn cmd_rank(cli: &Cli, a: Ambient) -> Outcome {
    let reg = registry(cli)?;
    if 2 * a.genus + a.points < 3 {
        return Err(TautError::InvalidAmbient { g: a.genus as i64, n: a.points as usize, k: a.codim as i64 }.into());
    }
    let basis = reg.relation_basis(a.genus, a.points, a.codim)?;
    println!("STRATA {}", basis.columns().len());
    println!("RELATIONS seen={} rank={}", basis.relations_seen(), basis.relation_rank());
    let b = basis.basis();
    println!("BASIS {}", b.len());
    for g in &b {
        println!("{}", format_graph(g));
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Enumerate { ambient, decorations, symmetrize, out } => {
            cmd_enumerate(*ambient, *decorations, *symmetrize, out.as_deref())
        }
        Command::Find { ambient, decorations, unsymmetrized, lmax, classes, out } => {
            let search = FindOptions { decorations: *decorations, unsymmetrized: *unsymmetrized, lmax: *lmax, classes: classes.as_deref() };
            cmd_find(cli, *ambient, &search, out)
        }
        Command::Check { file, lmax } => cmd_check(cli, file, *lmax),
        Command::Reduce { file, basis } => cmd_reduce(cli, file, basis.as_deref()),
        Command::Apply { file, l } => cmd_apply(file, *l),
        Command::Rank { ambient } => cmd_rank(cli, *ambient),
    }
}

/// Exits quietly when stdout is closed early, as when piping into `head`.
fn quiet_broken_pipe() {
    let default = std::panic::take_hook();
    std::panic::set_hook(Box::new(move |info| {
        let msg = info
            .payload()
            .downcast_ref::<String>()
            .map(String::as_str)
            .or_else(|| info.payload().downcast_ref::<&str>().copied())
            .unwrap_or("");
        if msg.contains("failed printing to stdout") && msg.contains("Broken pipe") {
            std::process::exit(0);
        }
        default(info);
    }));
}

fn main() -> ExitCode {
    quiet_broken_pipe();
    let cli = Cli::parse();
    if cli.verbose {
        if let Some(dir) = &cli.registry {
            eprintln!("registry: {}", dir.display());
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Missing(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
