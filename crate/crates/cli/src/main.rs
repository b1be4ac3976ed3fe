//! `trofey`: command-line access to the integral, cover and Fock space routes
//! and to quasimodular fitting.

mod input;
mod report;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use trofey_core::covers::{cover_count, descendant_contribution, invariant};
use trofey_core::fock::{check_fock_graph, connected_hurwitz_series, double_hurwitz, elliptic_hurwitz_disconnected, labeled_matrix_sum, labeled_series_product_check};
use trofey_core::graph::{enumerate_graphs, validate, GenusFunction, KVector, Order};
use trofey_core::integral::{compositions, integral_series_all_orders, integral_series_q, mirror_total_series, refined_coeff, IntegralQuery};
use trofey_core::partition::Partition;
use trofey_core::quasimodular::{basis_monomials, fit, weight_bound, FIT_MARGIN};
use trofey_core::series::QSeries;
use trofey_core::{Error, Rational};

use input::{load_graph, parse_list, parse_order, parse_rational, series_from_report, LoadedGraph};
use report::{Format, Report, Row};

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Validation(String),
    Mismatch(String),
    Fit(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Mismatch(_) => 4,
            CliError::Fit(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Validation(m) | CliError::Mismatch(m) | CliError::Fit(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Underdetermined(_) => CliError::Fit(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "trofey", version, about = "Exact tropical descendant invariants of the elliptic curve")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "plain", global = true)]
    format: Format,
    /// Worker threads (TROFEY_THREADS takes precedence).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Refined coefficients or q-series of a Feynman integral.
    Integral(IntegralArgs),
    /// Descendant invariants by degree.
    Invariant(InvariantArgs),
    /// Hurwitz numbers and labeled operator checks in the Fock space.
    #[command(subcommand)]
    Fock(FockCommand),
    /// Express a q-series as a polynomial in E2, E4, E6.
    Fit(FitArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("what").required(true).args(["a", "q_order"])))]
struct IntegralArgs {
    /// Graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Psi powers; when given, the graph and genus function are validated against them.
    #[arg(long)]
    k: Option<String>,
    /// Genus function; defaults to the file's "genus" entry, then to zero.
    #[arg(long)]
    gf: Option<String>,
    /// `id`, `all` (summed over every order) or 1-based positions of the vertices.
    #[arg(long, default_value = "id")]
    order: String,
    /// Multidegree, one entry per edge in file order.
    #[arg(long)]
    a: Option<String>,
    /// Total degree bound for the q-series.
    #[arg(long)]
    q_order: Option<usize>,
    /// Leak vector, one entry per vertex.
    #[arg(long, requires = "a")]
    leak: Option<String>,
    /// Drop the vertex S-function factors.
    #[arg(long)]
    plain: bool,
    /// Restrict edge EDGE (1-based, file order) to expansion factor W, as EDGE:W.
    #[arg(long, requires = "a")]
    winding: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Covers,
    Integral,
}

#[derive(Args)]
struct InvariantArgs {
    /// Psi powers k_1,..,k_n.
    #[arg(long)]
    k: String,
    /// Largest degree.
    #[arg(long)]
    dmax: u32,
    #[arg(long, value_enum, default_value = "covers")]
    route: Route,
    /// Run both routes and fail on any difference.
    #[arg(long)]
    compare: bool,
}

#[derive(Subcommand)]
enum FockCommand {
    /// Double Hurwitz number <mu| M^n |nu> / (|Aut mu| |Aut nu|).
    Double {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        n: u32,
    },
    /// Hurwitz numbers of the elliptic curve in genus g and degree d.
    Elliptic {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        d: u32,
        /// Number of branch points; defaults to 2g-2.
        #[arg(long)]
        n: Option<u32>,
        /// Connected covers only.
        #[arg(long)]
        connected: bool,
    },
    /// Compare labeled matrix elements with cover counts on a 3-valent loop-free graph.
    Check {
        #[arg(long)]
        graph: PathBuf,
        /// Largest total multidegree.
        #[arg(long, default_value_t = 3)]
        amax: u32,
        #[arg(long, default_value = "all")]
        order: String,
        /// Also check the formal product identity with every weight at most CAP.
        #[arg(long)]
        cap: Option<u32>,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "coeffs"])))]
struct FitArgs {
    /// JSON report with `d`-labeled rows (`-` for stdin).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Inline coefficients of q^0, q^1, ..; higher ones are zero.
    #[arg(long)]
    coeffs: Option<String>,
    /// Defaults to the weight bound recorded in the input report.
    #[arg(long)]
    max_weight: Option<u32>,
    /// Number of coefficients used is q_order + 1.
    #[arg(long)]
    q_order: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads(cli.threads)?;
    let report = match cli.command {
        Command::Integral(a) => cmd_integral(a)?,
        Command::Invariant(a) => cmd_invariant(a)?,
        Command::Fock(f) => cmd_fock(f)?,
        Command::Fit(a) => cmd_fit(a)?,
    };
    print!("{}", report.render(cli.format));
    Ok(())
}

fn configure_threads(flag: Option<usize>) -> CliResult<()> {
    let env = match std::env::var("TROFEY_THREADS") {
        Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| CliError::Parse(format!("TROFEY_THREADS: cannot parse '{s}'")))?),
        Err(_) => None,
    };
    if let Some(n) = env.or(flag) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Parse(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn parse_k(s: &str) -> CliResult<KVector> {
    let k: Vec<u32> = parse_list("--k", s)?;
    Ok(KVector::new(k)?)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn relabeling_meta(report: &mut Report, loaded: &LoadedGraph) {
    if let Some(p) = &loaded.relabeling {
        let one_based: Vec<usize> = p.iter().map(|i| i + 1).collect();
        report.meta.insert("edge_relabeling".into(), json!(one_based));
    }
}

fn cmd_integral(args: IntegralArgs) -> CliResult<Report> {
    let loaded = load_graph(&args.graph)?;
    let graph = &loaded.graph;
    let n = graph.vertex_count();
    let gf = match &args.gf {
        Some(s) => GenusFunction(parse_list("--gf", s)?),
        None => loaded.genus.clone().unwrap_or_else(|| GenusFunction::zero(n)),
    };
    if gf.0.len() != n {
        return Err(CliError::Validation(format!("genus function has {} entries for {n} vertices", gf.0.len())));
    }
    if let Some(k) = &args.k {
        let k = parse_k(k)?;
        validate(graph, &gf, &k).map_err(|f| CliError::Validation(format!("graph does not match k=({}): {f}", join(k.powers()))))?;
    }
    if args.plain && !gf.is_zero() {
        return Err(Error::NonzeroGenusPlain.into());
    }
    let order = parse_order(&args.order, n)?;
    let mut query = Map::new();
    query.insert("command".into(), json!("integral"));
    query.insert("graph".into(), json!(args.graph.display().to_string()));
    query.insert("gf".into(), json!(join(&gf.0)));
    if let Some(k) = &args.k {
        query.insert("k".into(), json!(k));
    }
    query.insert("order".into(), json!(order.label()));
    query.insert("plain".into(), json!(args.plain));

    if let Some(q_order) = args.q_order {
        query.insert("q_order".into(), json!(q_order));
        let series = match &order {
            input::OrderArg::One(o) => integral_series_q(graph, &gf, o, q_order)?,
            input::OrderArg::All => integral_series_all_orders(graph, &gf, q_order)?,
        };
        let mut report = Report::new(query);
        for d in 0..=q_order {
            report.results.push(Row::new(vec![("order", order.label()), ("d", d.to_string())], series.coeff(d)));
        }
        report.meta.insert("weight_bound".into(), json!(weight_bound(graph, &gf)));
        report.plain_text = Some(format!("{series}\n"));
        relabeling_meta(&mut report, &loaded);
        return Ok(report);
    }

    let a_file: Vec<u32> = parse_list("--a", args.a.as_deref().unwrap_or_default())?;
    if a_file.len() != graph.edge_count() {
        return Err(CliError::Validation(format!("--a has {} entries for {} edges", a_file.len(), graph.edge_count())));
    }
    let a = loaded.to_internal(&a_file);
    let leak: Vec<i32> = match &args.leak {
        Some(s) => parse_list("--leak", s)?,
        None => vec![0; n],
    };
    if leak.len() != n {
        return Err(CliError::Validation(format!("--leak has {} entries for {n} vertices", leak.len())));
    }
    let mut windings = Vec::new();
    for w in &args.winding {
        let (e, v) = w.split_once(':').ok_or_else(|| CliError::Parse(format!("--winding: expected EDGE:W, got '{w}'")))?;
        let e: usize = e.trim().parse().map_err(|_| CliError::Parse(format!("--winding: bad edge '{e}'")))?;
        let v: u32 = v.trim().parse().map_err(|_| CliError::Parse(format!("--winding: bad factor '{v}'")))?;
        if e == 0 || e > graph.edge_count() {
            return Err(CliError::Validation(format!("--winding: no edge q{e}")));
        }
        windings.push((loaded.internal_edge(e - 1), v));
    }
    query.insert("a".into(), json!(join(&a_file)));
    query.insert("leak".into(), json!(join(&leak)));
    if !args.winding.is_empty() {
        query.insert("winding".into(), json!(args.winding));
    }
    let orders = order.orders(n);
    let values: Vec<Rational> = orders
        .par_iter()
        .map(|o| {
            let mut q = if args.plain { IntegralQuery::plain(graph, o, &a) } else { IntegralQuery::new(graph, &gf, o, &a) }.with_leak(&leak);
            for &(e, w) in &windings {
                q = q.with_winding(e, w);
            }
            refined_coeff(&q)
        })
        .collect::<Result<_, _>>()?;
    let total = values.into_iter().fold(Rational::zero(), |acc, v| acc + v);
    let mut report = Report::new(query);
    report.results.push(Row::new(vec![("order", order.label()), ("a", join(&a_file))], total));
    relabeling_meta(&mut report, &loaded);
    Ok(report)
}

fn cmd_invariant(args: InvariantArgs) -> CliResult<Report> {
    let k = parse_k(&args.k)?;
    let mut query = Map::new();
    query.insert("command".into(), json!("invariant"));
    query.insert("k".into(), json!(join(k.powers())));
    query.insert("genus".into(), json!(k.genus()));
    query.insert("dmax".into(), json!(args.dmax));
    let routes: Vec<Route> = if args.compare { vec![Route::Covers, Route::Integral] } else { vec![args.route] };
    query.insert(
        "route".into(),
        json!(if args.compare { "compare" } else if args.route == Route::Covers { "covers" } else { "integral" }),
    );
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    for route in &routes {
        let col = match route {
            Route::Covers => (0..=args.dmax).map(|d| invariant(&k, d)).collect::<Result<Vec<_>, _>>()?,
            Route::Integral => {
                let s = mirror_total_series(&k, args.dmax as usize)?;
                (0..=args.dmax as usize).map(|d| s.coeff(d)).collect()
            }
        };
        columns.push(col);
    }
    if args.compare {
        if let Some(d) = (0..=args.dmax as usize).find(|&d| columns[0][d] != columns[1][d]) {
            return Err(CliError::Mismatch(mismatch_witness(&k, d as u32, &columns[0][d], &columns[1][d])));
        }
    }
    let mut report = Report::new(query);
    for d in 0..=args.dmax as usize {
        report.results.push(Row::new(vec![("d", d.to_string())], columns[0][d].clone()));
    }
    report.meta.insert("weight_bound".into(), json!(2 * (k.genus() + k.len() as u32 - 1)));
    let mut text: String = report.results.iter().map(|r| format!("d={}\t{}\n", r.labels[0].1, r.value)).collect();
    if args.compare {
        text.push_str("routes agree\n");
    }
    report.plain_text = Some(text);
    Ok(report)
}

/// The first (graph, order, multidegree) at which the two routes differ.
fn mismatch_witness(k: &KVector, d: u32, covers: &Rational, integral: &Rational) -> String {
    for (graph, gf) in enumerate_graphs(k) {
        for order in Order::all(k.len()) {
            for a in compositions(d, graph.edge_count()) {
                let c = descendant_contribution(&graph, &gf, &order, &a, k);
                let i = refined_coeff(&IntegralQuery::new(&graph, &gf, &order, &a));
                if c != i {
                    let show = |r: Result<Rational, Error>| r.map(|v| v.to_string()).unwrap_or_else(|e| format!("error ({e})"));
                    return format!(
                        "routes differ at d={d}: graph {graph}, gf ({}), order {order}, a ({}): covers {}, integral {}",
                        join(&gf.0),
                        join(&a),
                        show(c),
                        show(i)
                    );
                }
            }
        }
    }
    format!("routes differ at d={d} (covers {covers}, integral {integral}) although every graph term agrees")
}

fn cmd_fock(cmd: FockCommand) -> CliResult<Report> {
    let mut query = Map::new();
    match cmd {
        FockCommand::Double { mu, nu, n } => {
            let mu = Partition::new(parse_list("--mu", &mu)?);
            let nu = Partition::new(parse_list("--nu", &nu)?);
            query.insert("command".into(), json!("fock double"));
            query.insert("mu".into(), json!(join(mu.parts())));
            query.insert("nu".into(), json!(join(nu.parts())));
            query.insert("n".into(), json!(n));
            let value = double_hurwitz(&mu, &nu, n)?;
            let mut report = Report::new(query);
            report.results.push(Row::new(vec![("mu", join(mu.parts())), ("nu", join(nu.parts()))], value));
            Ok(report)
        }
        FockCommand::Elliptic { g, d, n, connected } => {
            let n = n.unwrap_or(2 * g.saturating_sub(1));
            query.insert("command".into(), json!("fock elliptic"));
            query.insert("g".into(), json!(g));
            query.insert("n".into(), json!(n));
            query.insert("d".into(), json!(d));
            query.insert("connected".into(), json!(connected));
            let value = if connected {
                if n != 2 * g.saturating_sub(1) || g < 2 {
                    return Err(Error::PointCountMismatch { g, n }.into());
                }
                connected_hurwitz_series(n, d as usize)?.coeff(d as usize)
            } else {
                elliptic_hurwitz_disconnected(g, n, d)?
            };
            let mut report = Report::new(query);
            report.results.push(Row::new(vec![("d", d.to_string())], value));
            Ok(report)
        }
        FockCommand::Check { graph, amax, order, cap } => {
            let loaded = load_graph(&graph)?;
            let g = &loaded.graph;
            check_fock_graph(g)?;
            let order_arg = parse_order(&order, g.vertex_count())?;
            query.insert("command".into(), json!("fock check"));
            query.insert("graph".into(), json!(graph.display().to_string()));
            query.insert("amax".into(), json!(amax));
            query.insert("order".into(), json!(order_arg.label()));
            query.insert("cap".into(), json!(cap));
            let mut tasks = Vec::new();
            for o in order_arg.orders(g.vertex_count()) {
                for d in 0..=amax {
                    for a in compositions(d, g.edge_count()) {
                        tasks.push((o.clone(), a));
                    }
                }
            }
            let zero = vec![0; g.vertex_count()];
            let rows: Vec<Row> = tasks
                .par_iter()
                .map(|(o, a)| {
                    let fock = labeled_matrix_sum(g, o, a)?;
                    let covers = cover_count(g, o, a, &zero)?;
                    // report multidegrees in file order
                    let mut a_file = vec![0; a.len()];
                    for (new, &v) in a.iter().enumerate() {
                        a_file[loaded.relabeling.as_ref().map_or(new, |p| p[new])] = v;
                    }
                    if fock != covers {
                        return Err(CliError::Mismatch(format!("order {o}, a ({}): Fock {fock}, covers {covers}", join(&a_file))));
                    }
                    if let Some(cap) = cap {
                        if !labeled_series_product_check(g, o, a, cap)? {
                            return Err(CliError::Mismatch(format!("order {o}, a ({}): product identity fails at cap {cap}", join(&a_file))));
                        }
                    }
                    Ok(Row::new(vec![("order", o.to_string()), ("a", join(&a_file))], fock))
                })
                .collect::<CliResult<_>>()?;
            let mut report = Report::new(query);
            report.plain_text = Some(format!("{} cases agree\n", rows.len()));
            report.results = rows;
            relabeling_meta(&mut report, &loaded);
            Ok(report)
        }
    }
}

fn cmd_fit(args: FitArgs) -> CliResult<Report> {
    let mut query = Map::new();
    query.insert("command".into(), json!("fit"));
    let (series, bound, exact) = if let Some(path) = &args.input {
        let text = if path.as_os_str() == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Parse(format!("stdin: {e}")))?;
            s
        } else {
            std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
        };
        query.insert("input".into(), json!(path.display().to_string()));
        let (s, b) = series_from_report(&text)?;
        (s, b, false)
    } else {
        let coeffs = args.coeffs.as_deref().unwrap_or_default();
        query.insert("coeffs".into(), json!(coeffs));
        let values = coeffs.split(',').map(parse_rational).collect::<CliResult<Vec<_>>>()?;
        (QSeries::from_coeffs(values), None, true)
    };
    let max_weight = args
        .max_weight
        .or(bound)
        .ok_or_else(|| CliError::Parse("--max-weight is required when the input records no weight bound".into()))?;
    if max_weight % 2 == 1 {
        return Err(CliError::Parse(format!("--max-weight must be even, got {max_weight}")));
    }
    let needed = basis_monomials(max_weight).len() + FIT_MARGIN;
    let q_order = match args.q_order {
        Some(q) => q,
        None if exact => needed.max(series.order()),
        None => series.order(),
    };
    let series = if exact && series.order() < q_order {
        let mut padded = QSeries::zero(q_order);
        for d in 0..=series.order() {
            padded.set(d, series.coeff(d));
        }
        padded
    } else {
        series
    };
    query.insert("max_weight".into(), json!(max_weight));
    query.insert("q_order".into(), json!(q_order));
    let result = fit(&series, max_weight, q_order)?;
    if !result.residual_ok {
        return Err(CliError::Fit(format!(
            "no exact solution in weight <= {max_weight} through q^{q_order}; try a larger --max-weight"
        )));
    }
    let mut report = Report::new(query);
    let mut terms: Vec<_> = result.coefficients.iter().collect();
    terms.sort_by_key(|(m, _)| (m.weight(), std::cmp::Reverse(m.e2), std::cmp::Reverse(m.e4)));
    for (m, c) in terms {
        report.results.push(Row::new(vec![("monomial", m.to_string()), ("weight", m.weight().to_string())], c.clone()));
    }
    let weights: Vec<u32> = result.weight_profile.iter().copied().collect();
    let kind = if result.is_homogeneous() { "homogeneous" } else { "mixed" };
    report.meta.insert("polynomial".into(), json!(result.to_string()));
    report.meta.insert("weight_profile".into(), Value::from(weights.clone()));
    report.meta.insert("homogeneous".into(), json!(result.is_homogeneous()));
    let weight_text = if weights.is_empty() { "none".to_string() } else { join(&weights) };
    report.plain_text = Some(format!("{result}\nweights {weight_text} ({kind})\n"));
    Ok(report)
}
