use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lapmahler::lehmer::{
    center_palindrome, palindrome_decompose, realize_periodic_graph, search_small_measure,
};
use lapmahler::mahler::{self, MahlerResult};
use lapmahler::oracles::oracle_check;
use lapmahler::quotient::{growth_series, quotient_graph, LatticeFamily};
use lapmahler::report::{self, fmt_real, Format};
use lapmahler::{complexity, ErrorKind, LatticeSpec, LaurentPoly, PeriodicGraph};

#[derive(Parser)]
#[command(
    name = "lapmahler",
    version,
    about = "Laplacian polynomials, graph complexity and Mahler measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Laplacian polynomial D_G of a graph file.
    Poly(InputArgs),
    /// Torsion complexity of a finite graph or of a quotient.
    Kappa(QuotientArgs),
    /// Tree complexity of a finite graph or of a quotient.
    Tau(QuotientArgs),
    /// Growth series of quotients, compared against log M(D_G).
    Growth(GrowthArgs),
    /// Mahler measure of a polynomial or of D_G.
    Mahler(MahlerArgs),
    /// Realize a palindromic polynomial vanishing at 1 as a 1-periodic graph.
    /// Inputs are first shifted so their exponents are symmetric about 0.
    Realize(RealizeArgs),
    /// Emit the grid graph of dimension d.
    Grid(GridArgs),
    /// Search single-orbit 1-periodic graphs for small Mahler measure.
    Search(SearchArgs),
    /// Check the CRSF and spanning-tree enumerations against the determinant.
    OracleCheck(InputArgs),
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Text => Format::Text,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Graph file (JSON).
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct QuotientArgs {
    #[arg(long)]
    input: PathBuf,
    /// Quotient by r * Z^d.
    #[arg(long, conflicts_with = "basis")]
    r: Option<u64>,
    /// Quotient by the lattice spanned by these columns, e.g. "2,0;1,3".
    #[arg(long)]
    basis: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GrowthArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    r_min: u64,
    /// Defaults to 64 for d = 1, 16 for d = 2 and 6 above.
    #[arg(long)]
    r_max: Option<u64>,
    /// Quadrature grid size for the comparison when d >= 2.
    #[arg(long = "N", alias = "grid", default_value_t = mahler::DEFAULT_GRID)]
    grid: usize,
    /// Agreement tolerance between the last normalized rate and log M(D_G).
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Jensen,
    Quadrature,
}

#[derive(Args)]
struct MahlerArgs {
    /// Inline polynomial, e.g. "4 - x1 - x1^-1 - x2 - x2^-1".
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    poly: Option<String>,
    /// Graph file; its Laplacian polynomial is measured.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Number of variables of the inline polynomial (inferred if omitted).
    #[arg(long)]
    dim: Option<usize>,
    /// Jensen for one variable, quadrature otherwise, unless given.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long = "N", alias = "grid", default_value_t = mahler::DEFAULT_GRID)]
    grid: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RealizeArgs {
    #[arg(long)]
    poly: String,
    /// Where to write the graph file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 4)]
    max_edges: usize,
    #[arg(long, default_value_t = 6)]
    max_winding: i64,
    /// Comma-separated edge weights.
    #[arg(long, default_value = "1,-1", allow_hyphen_values = true)]
    weights: String,
    /// Keep only the best this many results.
    #[arg(long)]
    limit: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] lapmahler::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::SizeRefusal => 3,
                ErrorKind::Internal => 4,
            },
            CliError::Io { .. } => 2,
            CliError::Mismatch(_) => 4,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_graph(path: &PathBuf) -> CliResult<PeriodicGraph> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(PeriodicGraph::from_json(&text)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_basis(s: &str) -> CliResult<LatticeSpec> {
    let columns = s
        .split(';')
        .map(|col| {
            col.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|_| lapmahler::Error::Parse(format!("bad basis entry `{x}`")))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LatticeSpec::from_columns(&columns)?)
}

fn quotient_report(args: &QuotientArgs) -> CliResult<()> {
    let g = read_graph(&args.input)?;
    let finite = match (&args.r, &args.basis) {
        (None, None) if g.is_finite() => g,
        (None, None) => {
            return Err(lapmahler::Error::InvalidArgument(
                "periodic graph needs --r or --basis to pick a quotient".into(),
            )
            .into())
        }
        (Some(r), _) => quotient_graph(&g, &LatticeSpec::scaled(g.dim(), *r)?)?.graph,
        (None, Some(b)) => quotient_graph(&g, &parse_basis(b)?)?.graph,
    };
    let rep = complexity(&finite)?;
    emit(
        &args.output.out,
        &report::complexity(&rep, args.output.format.into()),
    )
}

fn growth(args: &GrowthArgs) -> CliResult<()> {
    let g = read_graph(&args.input)?;
    let r_max = args.r_max.unwrap_or(match g.dim() {
        1 => 64,
        2 => 16,
        _ => 6,
    });
    let family = if g.dim() == 1 {
        LatticeFamily::Cyclic {
            r_min: args.r_min,
            r_max,
        }
    } else {
        LatticeFamily::Scaled {
            n_min: args.r_min,
            n_max: r_max,
        }
    };
    let series = growth_series(&g, family)?;
    let mut text = report::growth_series(&series, args.output.format.into());
    let d = g.laplacian_polynomial()?;
    if d.is_zero() {
        text.push_str("# log_mahler_measure: undefined (D_G = 0)\n");
    } else {
        let m = if g.dim() == 1 {
            mahler::mahler_jensen(&d)?
        } else {
            mahler::mahler_quadrature(&d, args.grid)?
        };
        let last = series.last().map(|e| e.normalized_rate).unwrap_or(f64::NAN);
        text.push_str(&format!("# laplacian_polynomial: {d}\n"));
        text.push_str(&format!(
            "# log_mahler_measure: {}\n",
            fmt_real(m.log_value)
        ));
        text.push_str(&format!("# mahler_method: {}\n", m.method.name()));
        text.push_str(&format!(
            "# last_minus_log_mahler: {}\n",
            fmt_real(last - m.log_value)
        ));
        text.push_str(&format!(
            "# within_tolerance: {}\n",
            series.agrees_with(m.log_value, args.tolerance + m.error_estimate)
        ));
    }
    emit(&args.output.out, &text)
}

fn mahler_cmd(args: &MahlerArgs) -> CliResult<()> {
    let f: LaurentPoly = match (&args.poly, &args.input) {
        (Some(p), _) => match args.dim {
            Some(d) => LaurentPoly::parse_with_dim(p, d)?,
            None => p.parse()?,
        },
        (None, Some(path)) => read_graph(path)?.laplacian_polynomial()?,
        (None, None) => unreachable!("clap requires one of --poly, --input"),
    };
    let r: MahlerResult = match args.method {
        Some(MethodArg::Jensen) => mahler::mahler_jensen(&f)?,
        Some(MethodArg::Quadrature) => mahler::mahler_quadrature(&f, args.grid)?,
        None if f.dim() <= 1 => mahler::mahler_jensen(&f)?,
        None => mahler::mahler_quadrature(&f, args.grid)?,
    };
    emit(
        &args.output.out,
        &report::mahler(&r, args.output.format.into()),
    )
}

fn realize(args: &RealizeArgs) -> CliResult<()> {
    let p = center_palindrome(&LaurentPoly::parse_with_dim(&args.poly, 1)?)?;
    let g = realize_periodic_graph(&palindrome_decompose(&p)?)?;
    emit(&args.out, &(g.to_json() + "\n"))
}

fn search(args: &SearchArgs) -> CliResult<()> {
    let weights = args
        .weights
        .split(',')
        .map(|w| {
            w.trim()
                .parse::<i64>()
                .map_err(|_| lapmahler::Error::Parse(format!("bad weight `{w}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut hits = search_small_measure(args.max_edges, args.max_winding, &weights)?;
    if let Some(k) = args.limit {
        hits.truncate(k);
    }
    emit(
        &args.output.out,
        &report::search_results(&hits, args.output.format.into()),
    )
}

fn oracle(args: &InputArgs) -> CliResult<()> {
    let g = read_graph(&args.input)?;
    let r = oracle_check(&g)?;
    let verdict = |ok: bool| if ok { "OK" } else { "MISMATCH" };
    let mut text = format!(
        "CRSF = det: {}; trees = minor: {}\n",
        verdict(r.crsf_agrees),
        verdict(r.trees_agree)
    );
    if matches!(args.output.format, FormatArg::Text) {
        text.push_str(&format!("crsf_polynomial: {}\n", r.crsf));
        text.push_str(&format!("laplacian_polynomial: {}\n", r.determinant));
        for (k, (trees, minor)) in r.tree_counts.iter().enumerate() {
            text.push_str(&format!("component {k}: trees {trees}, minor {minor}\n"));
        }
    }
    emit(&args.output.out, &text)?;
    if !r.all_agree() {
        return Err(CliError::Mismatch(
            "oracle disagrees with determinant pipeline".into(),
        ));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Poly(a) => {
            let g = read_graph(&a.input)?;
            emit(&a.output.out, &format!("{}\n", g.laplacian_polynomial()?))
        }
        Command::Kappa(a) | Command::Tau(a) => quotient_report(&a),
        Command::Growth(a) => growth(&a),
        Command::Mahler(a) => mahler_cmd(&a),
        Command::Realize(a) => realize(&a),
        Command::Grid(a) => {
            if a.dim == 0 {
                return Err(lapmahler::Error::InvalidArgument(
                    "grid dimension must be at least 1".into(),
                )
                .into());
            }
            emit(&a.out, &(PeriodicGraph::grid(a.dim).to_json() + "\n"))
        }
        Command::Search(a) => search(&a),
        Command::OracleCheck(a) => oracle(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lapmahler: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
