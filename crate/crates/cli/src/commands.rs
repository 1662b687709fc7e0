use std::path::Path;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use spinmix_core::density::{
    class_density_bound, class_params, decompose, decompose_graph, kappa_matrix, max_density,
    max_density_enumerate, ClassBound, Graph, Provenance, RationalMatrix,
};
use spinmix_core::depmat::{
    coloring_dependency, example1_matrix, facilitated_dependency, random_update_matrix,
    scan_update_matrix, DependencyMatrix, ScanOrder,
};
use spinmix_core::glauber::{
    coupled_run, delta_contraction_check, greedy_coloring, influence_matrix_enumerated,
    influence_matrix_exact, ChainSpec, CouplingStats, System, UpdateRule, DEFAULT_CAP,
};
use spinmix_core::mixbounds::{
    best_certificate, coloring_certificates, improved_scan_time, lambda_bound_class,
    optimal_eta_improved, spectral_density_bound, Certificate, CertificateReport, ColoringTarget,
    NormSummary,
};
use spinmix_core::norms::{
    matrix_norm, numerical_radius, perron_left_vector, spectral_radius, NormKind,
    PerronCertificate, DEFAULT_TOL,
};
use spinmix_core::{Error, Matrix};

use crate::args::{Cli, Command, Format, InputArgs};
use crate::error::{CliError, CliResult};
use crate::parse::{parse_graph, parse_matrix, parse_order, ClassArg};

/// What a successful invocation prints and the code it exits with.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, exit_code: 0 }
    }
}

/// A loaded input.
#[derive(Debug, Clone)]
pub enum Input {
    Graph(Graph),
    Matrix(Matrix),
    Facilitated { n: usize, delta: f64 },
    Example1 { n: usize },
}

impl Input {
    pub fn n(&self) -> usize {
        match self {
            Input::Graph(g) => g.n(),
            Input::Matrix(m) => m.n(),
            Input::Facilitated { n, .. } | Input::Example1 { n } => *n,
        }
    }
}

pub fn load(args: &InputArgs) -> CliResult<Input> {
    match args.input.as_str() {
        "facilitated" => Ok(Input::Facilitated {
            n: args.n.unwrap_or(20),
            delta: args.delta.unwrap_or(7.0 / 27.0),
        }),
        "example1" => {
            if args.delta.is_some() {
                return Err(CliError::Usage("--delta applies to `facilitated` only".into()));
            }
            Ok(Input::Example1 { n: args.n.unwrap_or(10) })
        }
        path => {
            if args.n.is_some() || args.delta.is_some() {
                return Err(CliError::Usage("--n and --delta apply to built-in inputs only".into()));
            }
            let path = Path::new(path);
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            if is_matrix_file(path, &text) {
                Ok(Input::Matrix(parse_matrix(&text)?))
            } else {
                Ok(Input::Graph(parse_graph(&text, args.multigraph)?))
            }
        }
    }
}

/// Matrix files are `.csv`/`.json`, or anything that looks like either.
fn is_matrix_file(path: &Path, text: &str) -> bool {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv" | "json") => true,
        _ => {
            let body = text.trim_start();
            body.starts_with('{') || body.lines().any(|l| !l.trim_start().starts_with('#') && l.contains(','))
        }
    }
}

fn source_label(args: &InputArgs) -> String {
    args.input.clone()
}

/// The dependency matrix the certificates are computed for.
fn dependency(input: &Input, q: Option<usize>) -> CliResult<DependencyMatrix> {
    match (input, q) {
        (Input::Graph(g), Some(q)) => Ok(coloring_dependency(g, q)?),
        (Input::Graph(_), None) => Err(CliError::Usage("graph inputs need --q".into())),
        (_, Some(_)) => Err(CliError::Usage("--q applies to graph inputs only".into())),
        (Input::Matrix(m), None) => Ok(DependencyMatrix::new(m.clone())?),
        (Input::Facilitated { n, delta }, None) => Ok(facilitated_dependency(*n, *delta)?),
        (Input::Example1 { n }, None) => Ok(example1_matrix(*n)?),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Norms { input, q } => norms(&input, q),
        Command::Density { input, class } => density(&input, class),
        Command::Bounds {
            input,
            q,
            eps,
            eta,
            class,
        } => bounds(&input, q, eps, eta, class),
        Command::Simulate {
            input,
            q,
            seed,
            trials,
            steps,
            order,
            format,
            threads,
            out,
        } => simulate(&input, q, seed, trials, steps, order.as_deref(), format, threads, out.as_deref()),
        Command::Verify {
            input,
            q,
            eps,
            class,
            seed,
            trials,
        } => verify(&input, q, eps, class, seed, trials),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormsReport {
    pub source: String,
    pub n: usize,
    pub one: f64,
    pub infinity: f64,
    pub two: f64,
    pub frobenius: f64,
    pub max_one_inf: f64,
    pub lambda: f64,
    pub numerical_radius: f64,
    /// Present when the matrix is irreducible.
    pub perron: Option<PerronCertificate>,
}

fn norms(args: &InputArgs, q: Option<usize>) -> CliResult<Outcome> {
    let input = load(args)?;
    let m = match (&input, q) {
        (Input::Graph(g), None) => g.adjacency_matrix(),
        (Input::Matrix(m), None) => m.clone(),
        _ => dependency(&input, q)?.into_inner(),
    };
    let report = NormsReport {
        source: source_label(args),
        n: m.n(),
        one: matrix_norm(&m, &NormKind::One)?,
        infinity: matrix_norm(&m, &NormKind::Infinity)?,
        two: matrix_norm(&m, &NormKind::Two)?,
        frobenius: matrix_norm(&m, &NormKind::Frobenius)?,
        max_one_inf: matrix_norm(&m, &NormKind::MaxOneInf)?,
        lambda: spectral_radius(&m, DEFAULT_TOL)?.lambda,
        numerical_radius: numerical_radius(&m)?,
        perron: perron_left_vector(&m, DEFAULT_TOL).ok(),
    };
    Ok(Outcome::ok(json(&report)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub provenance: Provenance,
    pub bound: ClassBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub source: String,
    pub n: usize,
    pub num: i64,
    pub den: i64,
    pub value: f64,
    /// Densest set, 1-indexed.
    pub witness: Vec<usize>,
    pub alpha: Rational64,
    pub col_max_exact: Rational64,
    pub row_max_exact: Rational64,
    pub col_max: f64,
    pub row_max: f64,
    pub class: Option<ClassReport>,
}

fn class_report(class: Option<ClassArg>, input: &Input) -> CliResult<Option<ClassReport>> {
    let Some(class) = class else { return Ok(None) };
    let Input::Graph(g) = input else {
        return Err(CliError::Usage("--class applies to graph inputs only".into()));
    };
    let provenance = class.provenance(g.max_degree());
    Ok(Some(ClassReport {
        provenance,
        bound: class_density_bound(&class_params(provenance), g.n()),
    }))
}

fn density(args: &InputArgs, class: Option<ClassArg>) -> CliResult<Outcome> {
    let input = load(args)?;
    let (d, dec) = match &input {
        Input::Graph(g) => (max_density(g)?, decompose_graph(g)?),
        _ => {
            let m = dependency(&input, None)?.into_inner();
            (kappa_matrix(&m)?, decompose(&m)?)
        }
    };
    let report = DensityReport {
        source: source_label(args),
        n: input.n(),
        num: d.num,
        den: d.den,
        value: d.value(),
        witness: d.witness.iter().map(|v| v + 1).collect(),
        alpha: dec.alpha,
        col_max_exact: dec.col_max_exact,
        row_max_exact: dec.row_max_exact,
        col_max: dec.col_max,
        row_max: dec.row_max,
        class: class_report(class, &input)?,
    };
    Ok(Outcome::ok(json(&report)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub source: String,
    pub n: usize,
    /// Cheapest certificate overall, in site updates.
    pub best: Certificate,
    /// Norm-based certificates for the dependency matrix.
    pub general: Option<CertificateReport>,
    /// Coloring certificates from the graph's spectrum and density.
    pub coloring: Vec<Certificate>,
    /// Coloring certificates valid for the whole class given by --class.
    pub class: Vec<Certificate>,
    /// Improved scan bound, for symmetric zero-diagonal input.
    pub improved: Option<Certificate>,
    /// Routes that produced nothing, with the reason.
    pub notes: Vec<String>,
}

fn is_symmetric_zero_diagonal(m: &Matrix) -> bool {
    m.is_symmetric() && (0..m.n()).all(|i| m[(i, i)] == 0.0)
}

fn bounds(
    args: &InputArgs,
    q: Option<usize>,
    eps: f64,
    eta: Option<f64>,
    class: Option<ClassArg>,
) -> CliResult<Outcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Usage(format!("--eps {eps} must lie in (0, 1)")));
    }
    let input = load(args)?;
    let r = dependency(&input, q)?;
    let n = r.n();
    let mut notes = Vec::new();
    let mut note = |route: &str, e: &Error| notes.push(format!("{route}: {e}"));

    let general = match best_certificate(&r, eps) {
        Ok(rep) => Some(rep),
        Err(e @ Error::NoCertificate(_)) => {
            note("norms", &e);
            None
        }
        Err(e) => return Err(e.into()),
    };

    let mut coloring = Vec::new();
    let mut class_certs = Vec::new();
    if let (Input::Graph(g), Some(q)) = (&input, q) {
        match coloring_certificates(ColoringTarget::Graph(g), q, eps) {
            Ok(c) => coloring = c,
            Err(e) => note("coloring", &e),
        }
        if let Some(class) = class {
            let params = class_params(class.provenance(g.max_degree()));
            let target = ColoringTarget::Class {
                params,
                max_degree: g.max_degree(),
                n: g.n(),
            };
            match coloring_certificates(target, q, eps) {
                Ok(c) => class_certs = c,
                Err(e) => note("class", &e),
            }
        }
    } else if class.is_some() {
        return Err(CliError::Usage("--class applies to graph inputs only".into()));
    }

    let m = r.matrix();
    let improved = if is_symmetric_zero_diagonal(m) {
        let lambda = spectral_radius(m, DEFAULT_TOL)?.lambda;
        if lambda < 1.0 {
            let eta = eta.unwrap_or_else(|| optimal_eta_improved(lambda, n, eps));
            Some(improved_scan_time(lambda, n, eps, Some(eta))?)
        } else {
            note("improved scan", &Error::NoCertificate(format!("lambda = {lambda} >= 1")));
            None
        }
    } else {
        if eta.is_some() {
            return Err(CliError::Usage(
                "--eta needs a symmetric zero-diagonal dependency matrix".into(),
            ));
        }
        None
    };

    let best = general
        .iter()
        .map(|g| &g.best)
        .chain(&coloring)
        .chain(&class_certs)
        .chain(&improved)
        .min_by(|a, b| a.site_updates().total_cmp(&b.site_updates()))
        .cloned()
        .ok_or_else(|| CliError::NoCertificate(notes.join("; ")))?;

    let report = BoundsReport {
        source: source_label(args),
        n,
        best,
        general,
        coloring,
        class: class_certs,
        improved,
        notes,
    };
    Ok(Outcome::ok(json(&report)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub source: String,
    pub update: String,
    /// Scan order, 1-indexed, when the update is a scan.
    pub order: Option<Vec<usize>>,
    pub threads: usize,
    pub x0: Vec<usize>,
    pub y0: Vec<usize>,
    pub mean_coupling_time: Option<f64>,
    pub stats: CouplingStats,
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    args: &InputArgs,
    q: Option<usize>,
    seed: u64,
    trials: usize,
    steps: usize,
    order: Option<&str>,
    format: Format,
    threads: usize,
    out: Option<&Path>,
) -> CliResult<Outcome> {
    if threads == 0 || trials == 0 {
        return Err(CliError::Usage("--threads and --trials must be positive".into()));
    }
    let input = load(args)?;
    let system = match (&input, q) {
        (Input::Graph(g), Some(q)) => System::Coloring { graph: g.clone(), q },
        (Input::Facilitated { n, delta }, None) => System::Facilitated { n: *n, delta: *delta },
        (Input::Graph(_), None) => return Err(CliError::Usage("graph inputs need --q".into())),
        _ => {
            return Err(CliError::Usage(
                "simulate needs a graph with --q or the facilitated model".into(),
            ))
        }
    };
    let (x0, y0) = match &system {
        System::Coloring { graph, q } => {
            // relabelling colors keeps a coloring proper and moves every site
            let x0 = greedy_coloring(graph, *q)?;
            let y0 = x0.iter().map(|c| (c + 1) % q).collect();
            (x0, y0)
        }
        System::Facilitated { n, .. } => (vec![0; *n], vec![1; *n]),
    };
    let order = order.map(|s| parse_order(s, input.n())).transpose()?;
    let update = match &order {
        Some(o) => UpdateRule::Scan(o.clone()),
        None => UpdateRule::RandomUpdate,
    };
    let spec = ChainSpec::new(system, update, seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?;
    let stats = pool.install(|| coupled_run(&spec, &x0, &y0, steps, trials))?;
    let csv = stats.to_csv();
    if let Some(path) = out {
        std::fs::write(path, &csv).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    } else if format == Format::Csv {
        return Ok(Outcome::ok(csv));
    }
    let report = SimulateReport {
        source: source_label(args),
        update: if order.is_some() { "scan" } else { "random" }.into(),
        order: order.map(|o| o.as_slice().iter().map(|j| j + 1).collect()),
        threads,
        x0,
        y0,
        mean_coupling_time: stats.mean_coupling_time(),
        stats,
    };
    Ok(Outcome::ok(json(&report)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub source: String,
    pub n: usize,
    pub norms: Option<NormSummary>,
    pub norm_facts: Option<NormFacts>,
    pub certificate_exists: Option<bool>,
    pub checks: Vec<Check>,
}

/// Which of the usual contraction conditions hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormFacts {
    pub one_at_least_one: bool,
    pub infinity_at_least_one: bool,
    pub two_at_least_one: bool,
    pub lambda_below_one: bool,
}

impl From<&NormSummary> for NormFacts {
    fn from(s: &NormSummary) -> Self {
        NormFacts {
            one_at_least_one: s.one >= 1.0,
            infinity_at_least_one: s.infinity >= 1.0,
            two_at_least_one: s.two >= 1.0,
            lambda_below_one: s.lambda < 1.0,
        }
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.0.push(Check {
            name: name.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            detail,
        });
    }

    fn skip(&mut self, name: &str, detail: String) {
        self.0.push(Check {
            name: name.into(),
            status: Status::Skip,
            detail,
        });
    }
}

const SLACK: f64 = 1e-9;

/// Norm and certificate invariants of a dependency matrix.
fn matrix_checks(
    r: &DependencyMatrix,
    eps: f64,
    out: &mut Checks,
) -> CliResult<(NormSummary, bool)> {
    let m = r.matrix();
    let n = r.n() as f64;
    let s = NormSummary {
        one: matrix_norm(m, &NormKind::One)?,
        infinity: matrix_norm(m, &NormKind::Infinity)?,
        two: matrix_norm(m, &NormKind::Two)?,
        lambda: spectral_radius(m, DEFAULT_TOL)?.lambda,
        numerical_radius: numerical_radius(m)?,
    };
    out.check(
        "radius chain",
        s.lambda <= s.numerical_radius + SLACK && s.numerical_radius <= s.two + SLACK,
        format!("lambda {} <= nu {} <= ||R||_2 {}", s.lambda, s.numerical_radius, s.two),
    );
    out.check(
        "radius below operator norms",
        s.lambda <= s.one.min(s.infinity).min(s.two) + SLACK,
        format!("lambda {} vs ||R||_1 {} ||R||_inf {}", s.lambda, s.one, s.infinity),
    );
    out.check(
        "two-norm interpolation",
        s.two * s.two <= s.one * s.infinity + SLACK,
        format!("||R||_2^2 = {} <= {}", s.two * s.two, s.one * s.infinity),
    );
    let rd = spectral_radius(&random_update_matrix(r), DEFAULT_TOL)?.lambda;
    let shifted = (n - 1.0 + s.lambda) / n;
    out.check(
        "random-update radius",
        (rd - shifted).abs() <= 1e-8,
        format!("lambda(R_rd) = {rd}, (n - 1 + lambda) / n = {shifted}"),
    );
    if s.lambda <= 1.0 {
        let scan = spectral_radius(&scan_update_matrix(r, &ScanOrder::identity(r.n()))?, DEFAULT_TOL)?.lambda;
        out.check(
            "scan radius",
            scan <= s.lambda + 1e-8,
            format!("lambda(scan) = {scan} <= lambda = {}", s.lambda),
        );
    } else {
        out.skip("scan radius", format!("lambda = {} > 1", s.lambda));
    }

    let exists = match best_certificate(r, eps) {
        Ok(rep) => {
            let bitwise = rep
                .candidates
                .iter()
                .chain([&rep.best])
                .all(|c| c.bound.to_bits() == c.recompute().to_bits());
            out.check(
                "certificate",
                rep.best.mu < 1.0 && bitwise,
                format!(
                    "{} via {} with mu = {}, {} site updates",
                    rep.best.formula,
                    rep.best.norm,
                    rep.best.mu,
                    rep.best.site_updates()
                ),
            );
            true
        }
        Err(Error::NoCertificate(why)) => {
            out.check("certificate", s.lambda >= 1.0, format!("none: {why}"));
            false
        }
        Err(e) => return Err(e.into()),
    };

    if is_symmetric_zero_diagonal(m) {
        match kappa_matrix(m) {
            Ok(kappa) => {
                let bound = spectral_density_bound(kappa.value(), s.one)?;
                out.check(
                    "density sandwich",
                    kappa.value() <= s.lambda + SLACK && s.lambda <= bound + 1e-8,
                    format!("kappa {} <= lambda {} <= {bound}", kappa.value(), s.lambda),
                );
                let dec = decompose(m)?;
                let exact = RationalMatrix::from_matrix(m)?;
                let sum = dec.b_exact.add(&dec.b_exact.transpose())?;
                out.check(
                    "decomposition",
                    sum.value_eq(&exact) && dec.col_max_exact == kappa.ratio(),
                    format!("||B||_1 = {}, ||B||_inf = {}", dec.col_max_exact, dec.row_max_exact),
                );
            }
            Err(e @ Error::IrrationalEntries { .. }) => out.skip("density sandwich", e.to_string()),
            Err(e) => return Err(e.into()),
        }
    }
    Ok((s, exists))
}

/// Graph invariants: density, decomposition and eigenvalue bounds.
fn graph_checks(g: &Graph, class: Option<ClassArg>, out: &mut Checks) -> CliResult<()> {
    let flow = max_density(g)?;
    if g.n() <= 20 {
        let brute = max_density_enumerate(g)?;
        out.check(
            "density by flow",
            flow.ratio() == brute.ratio(),
            format!("flow {}, enumeration {}", flow.ratio(), brute.ratio()),
        );
    } else {
        out.skip("density by flow", format!("n = {} is too large to enumerate", g.n()));
    }
    let dec = decompose_graph(g)?;
    let sum = dec.b_exact.add(&dec.b_exact.transpose())?.to_matrix();
    let delta = Rational64::from_integer(g.max_degree() as i64);
    out.check(
        "decomposition",
        sum == g.adjacency_matrix()
            && dec.col_max_exact == flow.ratio()
            && dec.row_max_exact == delta - flow.ratio(),
        format!("||B||_1 = {}, ||B||_inf = {}", dec.col_max_exact, dec.row_max_exact),
    );
    let lambda = spectral_radius(&g.adjacency_matrix(), DEFAULT_TOL)?.lambda;
    let kappa = flow.value();
    let upper = spectral_density_bound(kappa, g.max_degree() as f64)?;
    out.check(
        "eigenvalue sandwich",
        2.0 * kappa <= lambda + SLACK && lambda <= upper + 1e-8,
        format!("2 kappa {} <= lambda(G) {lambda} <= {upper}", 2.0 * kappa),
    );
    if let Some(class) = class {
        let params = class_params(class.provenance(g.max_degree()));
        let cb = class_density_bound(&params, g.n());
        out.check(
            "class density",
            flow.ratio() <= cb.kappa_exact,
            format!("kappa {} <= class bound {}", flow.ratio(), cb.kappa_exact),
        );
        match lambda_bound_class(&params, g.max_degree(), g.n()) {
            Ok(b) => out.check(
                "class eigenvalue",
                lambda <= b.bound + 1e-8,
                format!("lambda(G) {lambda} <= {}", b.bound),
            ),
            Err(e @ Error::DeltaTooSmall { .. }) => out.skip("class eigenvalue", e.to_string()),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

/// Compares exactly computed influences with the dependency matrix.
fn influence_check(exact: spinmix_core::Result<Matrix>, r: &Matrix, off_diagonal: bool, out: &mut Checks) -> CliResult<()> {
    match exact {
        Ok(rho) => {
            let n = r.n();
            let excess = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !off_diagonal || i != j)
                .map(|(i, j)| rho[(i, j)] - r[(i, j)])
                .fold(f64::NEG_INFINITY, f64::max);
            out.check(
                "influences",
                excess <= 1e-12,
                format!("largest excess of exact influence over R: {excess:e}"),
            );
        }
        Err(e @ (Error::CapExceeded { .. } | Error::StateSpaceTooLarge { .. })) => {
            out.skip("influences", e.to_string())
        }
        Err(Error::PreconditionFailed(why)) => out.check("influences", false, why),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn verify(
    args: &InputArgs,
    q: Option<usize>,
    eps: f64,
    class: Option<ClassArg>,
    seed: Option<u64>,
    trials: usize,
) -> CliResult<Outcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Usage(format!("--eps {eps} must lie in (0, 1)")));
    }
    let input = load(args)?;
    if class.is_some() && !matches!(input, Input::Graph(_)) {
        return Err(CliError::Usage("--class applies to graph inputs only".into()));
    }
    let mut checks = Checks::default();
    if let Input::Graph(g) = &input {
        graph_checks(g, class, &mut checks)?;
    }
    let (mut norms, mut exists) = (None, None);
    if !matches!(input, Input::Graph(_)) || q.is_some() {
        let r = dependency(&input, q)?;
        let (s, e) = matrix_checks(&r, eps, &mut checks)?;
        norms = Some(s);
        exists = Some(e);
        match &input {
            Input::Graph(g) => {
                let q = q.expect("graph dependency needs q");
                influence_check(influence_matrix_exact(g, q, DEFAULT_CAP), r.matrix(), false, &mut checks)?;
                let system = System::Coloring { graph: g.clone(), q };
                delta_check(system, seed, trials, &mut checks)?;
            }
            Input::Facilitated { n, delta } => {
                let system = System::Facilitated { n: *n, delta: *delta };
                // a blocked site keeps its spin, so the diagonal is 1 - delta
                let exact = influence_matrix_enumerated(&system, DEFAULT_CAP);
                influence_check(exact, r.matrix(), true, &mut checks)?;
                delta_check(system, seed, trials, &mut checks)?;
            }
            _ => {}
        }
    }
    let failed = checks.0.iter().filter(|c| c.status == Status::Fail).count();
    let report = VerifyReport {
        source: source_label(args),
        n: input.n(),
        norm_facts: norms.as_ref().map(NormFacts::from),
        norms,
        certificate_exists: exists,
        checks: checks.0,
    };
    Ok(Outcome {
        stdout: json(&report),
        exit_code: if failed == 0 { 0 } else { 3 },
    })
}

fn delta_check(system: System, seed: Option<u64>, trials: usize, out: &mut Checks) -> CliResult<()> {
    let Some(seed) = seed else {
        out.skip("delta contraction", "needs --seed".into());
        return Ok(());
    };
    let spec = ChainSpec::new(system, UpdateRule::RandomUpdate, seed)?;
    match delta_contraction_check(&spec, trials) {
        Ok(rep) => {
            let worst = rep
                .max_violation_site
                .max(rep.max_violation_random)
                .max(rep.max_violation_scan);
            out.check(
                "delta contraction",
                rep.passed,
                format!("{} functions on {} states, worst violation {worst:e}", rep.trials, rep.statespace),
            );
        }
        Err(e @ (Error::CapExceeded { .. } | Error::StateSpaceTooLarge { .. })) => {
            out.skip("delta contraction", e.to_string())
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}
