use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::{dualize, duality_failures, euler_check, load_algebra};
use crate::bar::audit_component;
use crate::dilie::{cobracket_from_killing, dilie_relations_check, hadamard_check, load_lie, tensor_action};
use crate::error::{Error, Result};
use crate::exact::fmt_scalar;
use crate::frob::{frob_compose, reduce_to_normal_form, FrobBasisElement, FrobGenerator};
use crate::graph::{enumerate_graphs, graft, DirectedGraph, GraftingPattern};
use crate::obstruct::{run_resolution, Target};

pub const REPORT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "frobres", version, about = "Exact computations with Frobenius props, their resolutions and diLie algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report layout.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    /// Line-delimited `kind key=value ...` records after a versioned header.
    Structured,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normal form of a graph of Frobenius generators.
    Reduce {
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: i64,
    },
    /// Grafts upper graphs onto a lower graph and checks the composite's
    /// normal form against composition of normal forms.
    Compose {
        lower: PathBuf,
        #[arg(long = "upper", required = true)]
        uppers: Vec<PathBuf>,
        /// Lower input fed by each upper output, comma separated.
        #[arg(long, value_delimiter = ',')]
        matching: Option<Vec<usize>>,
        #[arg(long, default_value_t = 2)]
        n: i64,
    },
    /// Audits `(d + ∂)² = 0` on one truncated component of the cobar complex.
    Dsq {
        j: usize,
        k: usize,
        #[arg(default_value_t = 2)]
        max_weight: usize,
        #[arg(long, default_value_t = 1)]
        max_genus: usize,
        #[arg(long, default_value_t = 2)]
        n: i64,
    },
    /// Builds the resolution morphism into an algebra's endomorphism prop.
    Resolve {
        algebra: String,
        #[arg(long, default_value_t = 2)]
        max_weight: usize,
        #[arg(long, default_value_t = 1)]
        max_genus: usize,
    },
    /// Euler characteristic via the genus-one operation.
    Euler { algebra: String },
    /// The dual algebra and the duality check on genus operations.
    Dualize {
        algebra: String,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        #[arg(long, default_value_t = 1)]
        max_genus: usize,
    },
    /// Relations of the diLie structure built from the Killing form.
    Dilie { lie: String },
    /// Dimension comparison of diLie components with the Hadamard product,
    /// optionally with the induced structure on `A ⊗ g`.
    TensorCheck {
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        /// Degree parameter; all of 1, 2 and 3 when omitted.
        #[arg(long)]
        n: Option<i64>,
        #[arg(long, requires = "lie")]
        algebra: Option<String>,
        #[arg(long, requires = "algebra")]
        lie: Option<String>,
    },
    /// Enumerates graphs of Frobenius generators up to isomorphism.
    Graphs {
        j: usize,
        k: usize,
        #[arg(long, default_value_t = 3)]
        max_vertices: usize,
        #[arg(long, default_value_t = 2)]
        n: i64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Reduce { .. } => "reduce",
            Command::Compose { .. } => "compose",
            Command::Dsq { .. } => "dsq",
            Command::Resolve { .. } => "resolve",
            Command::Euler { .. } => "euler",
            Command::Dualize { .. } => "dualize",
            Command::Dilie { .. } => "dilie",
            Command::TensorCheck { .. } => "tensor-check",
            Command::Graphs { .. } => "graphs",
        }
    }
}

/// Collected output of one command. `ok` is false on a mathematical failure.
#[derive(Debug)]
pub struct Report {
    command: &'static str,
    human: Vec<String>,
    records: Vec<String>,
    pub ok: bool,
}

impl Report {
    fn new(command: &'static str) -> Self {
        Report { command, human: Vec::new(), records: Vec::new(), ok: true }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.human.push(s.into());
    }

    fn record(&mut self, kind: &str, fields: &[(&str, String)]) {
        let mut s = kind.to_string();
        for (k, v) in fields {
            write!(s, " {k}={}", quote(v)).expect("writing to a String");
        }
        self.records.push(s);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => self.human.iter().map(|l| format!("{l}\n")).collect(),
            Format::Structured => {
                let mut s = format!("frobres-report v{REPORT_VERSION} command={}\n", self.command);
                for r in &self.records {
                    s.push_str(r);
                    s.push('\n');
                }
                s.push_str(&format!("status result={}\n", if self.ok { "ok" } else { "fail" }));
                s
            }
        }
    }
}

/// Values are bare unless they contain whitespace, quotes or `=`.
fn quote(v: &str) -> String {
    if !v.is_empty() && !v.chars().any(|c| c.is_whitespace() || c == '"' || c == '=' || c == '\\') {
        return v.to_string();
    }
    let mut s = String::from("\"");
    for c in v.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            '\t' => s.push_str("\\t"),
            c => s.push(c),
        }
    }
    s.push('"');
    s
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn read_graph(path: &PathBuf) -> Result<DirectedGraph<FrobGenerator>> {
    DirectedGraph::from_text(&read(path)?).map_err(|e| match e {
        Error::Invariant(m) | Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn element_fields(e: &FrobBasisElement) -> Vec<(&'static str, String)> {
    vec![("j", e.j.to_string()), ("k", e.k.to_string()), ("g", e.g.to_string()), ("degree", e.degree.to_string())]
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let mut r = Report::new(cli.command.name());
    match &cli.command {
        Command::Reduce { graph, n } => {
            let nf = reduce_to_normal_form(&read_graph(graph)?, *n)?;
            r.line(nf.to_string());
            r.record("normal_form", &element_fields(&nf));
        }
        Command::Compose { lower, uppers, matching, n } => compose(&mut r, lower, uppers, matching.as_deref(), *n)?,
        Command::Dsq { j, k, max_weight, max_genus, n } => {
            let audit = audit_component(*j, *k, *max_weight, *max_genus, *n)?;
            r.ok = audit.failures.is_empty();
            let verdict = if r.ok { "PASS" } else { "FAIL" };
            r.line(format!("component ({j},{k}), weight <= {max_weight}, genus <= {max_genus}"));
            r.line(format!("basis size = {}", audit.checked));
            r.line(format!("d^2 = 0: {verdict}"));
            r.record(
                "dsq",
                &[
                    ("j", j.to_string()),
                    ("k", k.to_string()),
                    ("max_weight", max_weight.to_string()),
                    ("max_genus", max_genus.to_string()),
                    ("n", n.to_string()),
                    ("basis_size", audit.checked.to_string()),
                    ("result", verdict.to_string()),
                ],
            );
            for f in &audit.failures {
                r.line(format!("  {f}"));
                r.record("failure", &[("detail", f.clone())]);
            }
        }
        Command::Resolve { algebra, max_weight, max_genus } => resolve(&mut r, algebra, *max_weight, *max_genus)?,
        Command::Euler { algebra } => {
            let file = load_algebra(algebra)?;
            let chi = fmt_scalar(&euler_check(&file.algebra)?);
            r.line(format!("chi = {chi}"));
            r.record("euler", &[("algebra", file.name.clone()), ("chi", chi)]);
        }
        Command::Dualize { algebra, max_arity, max_genus } => {
            let file = load_algebra(algebra)?;
            let dual = dualize(&file.algebra)?;
            r.line(format!("dual of {} (n = {})", file.name, dual.n));
            for i in 0..dual.dim() {
                r.line(format!("  {} in degree {}", dual.space.name(i), dual.space.degree(i)));
                r.record("basis", &[("name", dual.space.name(i).to_string()), ("degree", dual.space.degree(i).to_string())]);
            }
            let failures = duality_failures(&file.algebra, *max_arity, *max_genus)?;
            r.ok = failures.is_empty();
            for (j, k, g) in &failures {
                r.line(format!("  duality fails on ({j},{k}) genus {g}"));
                r.record("failure", &[("j", j.to_string()), ("k", k.to_string()), ("g", g.to_string())]);
            }
            let verdict = if r.ok { "PASS" } else { "FAIL" };
            r.line(format!("duality (j + k <= {max_arity}, genus <= {max_genus}): {verdict}"));
            r.record("duality", &[("max_arity", max_arity.to_string()), ("max_genus", max_genus.to_string()), ("result", verdict.into())]);
        }
        Command::Dilie { lie } => {
            let l = load_lie(lie)?;
            let d = cobracket_from_killing(&l)?;
            let report = dilie_relations_check(&d)?;
            r.ok = report.all_zero();
            r.line(format!("diLie structure on a Lie algebra of dimension {}", l.dim()));
            for (name, v) in &report.defects {
                r.line(format!("  {name}: defect {}", fmt_scalar(v)));
                r.record("relation", &[("name", name.to_string()), ("defect", fmt_scalar(v))]);
            }
            r.line(format!("relations: {}", if r.ok { "PASS" } else { "FAIL" }));
        }
        Command::TensorCheck { max_arity, n, algebra, lie } => {
            let ns = match n {
                Some(n) => vec![*n],
                None => vec![1, 2, 3],
            };
            for n in ns {
                for row in hadamard_check(*max_arity, n)? {
                    let fmt = |m: &std::collections::BTreeMap<i64, usize>| {
                        m.iter().map(|(d, c)| format!("{c}@{d}")).collect::<Vec<_>>().join(",")
                    };
                    let (p, q) = (fmt(&row.product), fmt(&row.dilie_n));
                    r.ok &= row.matches();
                    r.line(format!("n={n} ({},{}): product {p} vs diLie {q}", row.j, row.k));
                    r.record(
                        "hadamard",
                        &[
                            ("n", n.to_string()),
                            ("j", row.j.to_string()),
                            ("k", row.k.to_string()),
                            ("product", p),
                            ("dilie", q),
                            ("match", row.matches().to_string()),
                        ],
                    );
                }
            }
            if let (Some(a), Some(l)) = (algebra, lie) {
                let file = load_algebra(a)?;
                let t = tensor_action(&file.algebra, &load_lie(l)?)?;
                r.ok &= t.report.all_zero();
                for (name, v) in &t.report.defects {
                    r.line(format!("{} ⊗ {l}: {name} defect {}", file.name, fmt_scalar(v)));
                    r.record("tensor_relation", &[("name", name.to_string()), ("defect", fmt_scalar(v))]);
                }
            }
            r.line(format!("tensor check (j + k <= {max_arity}): {}", if r.ok { "PASS" } else { "FAIL" }));
        }
        Command::Graphs { j, k, max_vertices, n } => {
            let graphs = enumerate_graphs(*j, *k, *max_vertices, &FrobGenerator::ALL)?;
            r.line(format!("{} graphs with ({j},{k}) legs and at most {max_vertices} vertices", graphs.len()));
            for (i, g) in graphs.iter().enumerate() {
                let nf = reduce_to_normal_form(g, *n)?;
                r.line(format!("graph {i}: {} vertices, normal form {nf}", g.num_vertices()));
                for l in g.to_text().lines() {
                    r.line(format!("  {l}"));
                }
                let mut fields = vec![("index", i.to_string()), ("vertices", g.num_vertices().to_string())];
                fields.extend(element_fields(&nf));
                fields.push(("text", g.to_text().trim_end().to_string()));
                r.record("graph", &fields);
            }
        }
    }
    Ok(r)
}

fn compose(r: &mut Report, lower: &PathBuf, uppers: &[PathBuf], matching: Option<&[usize]>, n: i64) -> Result<()> {
    let lower_g = read_graph(lower)?;
    let upper_g = uppers.iter().map(read_graph).collect::<Result<Vec<_>>>()?;
    let outs: usize = upper_g.iter().map(|g| g.outputs().len()).sum();
    let matching = matching.map(<[usize]>::to_vec).unwrap_or_else(|| (0..outs).collect());
    let composite = graft(&GraftingPattern { upper: upper_g.clone(), lower: lower_g.clone(), matching })?;
    let nf = reduce_to_normal_form(&composite, n)?;
    r.line("composite:");
    for l in composite.to_text().lines() {
        r.line(format!("  {l}"));
    }
    r.line(format!("normal form {nf}"));
    let mut fields = element_fields(&nf);
    fields.push(("text", composite.to_text().trim_end().to_string()));
    r.record("composite", &fields);
    let parts = upper_g.iter().map(|g| reduce_to_normal_form(g, n)).collect::<Result<Vec<_>>>()?;
    let low = reduce_to_normal_form(&lower_g, n)?;
    if parts.iter().chain(std::iter::once(&low)).all(|e| !e.is_boundary()) {
        let expected = frob_compose(&parts, &low)?;
        if expected != nf {
            return Err(Error::Inconsistent(format!("graph reduction gives {nf} but composing normal forms gives {expected}")));
        }
        r.line(format!("agrees with composition of normal forms: {expected}"));
        r.record("check", &[("composed", expected.to_string()), ("result", "PASS".into())]);
    }
    Ok(())
}

fn resolve(r: &mut Report, algebra: &str, max_weight: usize, max_genus: usize) -> Result<()> {
    let file = load_algebra(algebra)?;
    let res = run_resolution(Target::from_file(&file)?, max_weight, max_genus)?;
    r.ok = res.all_filled() && res.audit.passed();
    for line in res.report_text().lines() {
        r.line(line);
    }
    r.record(
        "target",
        &[("name", file.name.clone()), ("max_weight", max_weight.to_string()), ("max_genus", max_genus.to_string())],
    );
    for o in res.reports() {
        let (j, k) = (o.element.inputs.len(), o.element.outputs.len());
        let mut fields = vec![
            ("weight", o.weight.to_string()),
            ("j", j.to_string()),
            ("k", k.to_string()),
            ("genus", crate::bar::total_genus(&o.element).to_string()),
            ("element", crate::bar::Oriented::standard(o.element.clone()).to_string()),
            ("cycle_nnz", o.cycle.nnz().to_string()),
        ];
        match &o.filler {
            Some(h) => {
                fields.push(("status", "filled".into()));
                fields.push(("filler_nnz", h.nnz().to_string()));
            }
            None => {
                fields.push(("status", "unfillable".into()));
                fields.push(("homology_dim", o.homology_dim.unwrap_or(0).to_string()));
            }
        }
        r.record("obstruction", &fields);
    }
    r.record(
        "summary",
        &[
            ("obstructions", res.reports().len().to_string()),
            ("nonzero_fillers", res.nonzero_fillers().to_string()),
            ("all_filled", res.all_filled().to_string()),
        ],
    );
    r.record(
        "audit",
        &[
            ("chain_checked", res.audit.chain_checked.to_string()),
            ("equivariance_checked", res.audit.equivariance_checked.to_string()),
            ("failures", res.audit.failures.len().to_string()),
        ],
    );
    Ok(())
}

/// Runs the parsed command, writes the report and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(report) => {
            let text = report.render(cli.format);
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
                None => print!("{text}"),
            }
            if report.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
