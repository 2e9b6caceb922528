//! The Frobenius properad: one-dimensional components indexed by arity and
//! genus, composition along graphs, and normal forms of generator graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{enumerate_graphs, enumerate_skeletons, Decoration, DirectedGraph, Edge, Port, Skeleton};

/// Largest generator graph accepted by the presentation audit.
pub const MAX_PRESENTATION_VERTICES: usize = 5;

/// Basis element of `Frob(j,k)` at genus `g`.
///
/// Every connected generator graph has degree `n(k - 1 + g)`; `degree` is
/// stored explicitly so that leg-less components carry their own value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrobBasisElement {
    pub j: usize,
    pub k: usize,
    pub g: usize,
    pub n: i64,
    pub degree: i64,
}

impl FrobBasisElement {
    /// Component with both arities positive.
    pub fn new(j: usize, k: usize, g: usize, n: i64) -> Result<Self> {
        let degree = frob_degree(j, k, g, n)?;
        Ok(FrobBasisElement { j, k, g, n, degree })
    }

    /// Leg-less component (`j = 0` or `k = 0`) with an explicit degree,
    /// which must lie in the table `{0, n, .., kn}` or `{-jn, .., 0}`.
    pub fn boundary(j: usize, k: usize, g: usize, n: i64, degree: i64) -> Result<Self> {
        if j > 0 && k > 0 {
            return Err(Error::Input("boundary components need j = 0 or k = 0".into()));
        }
        if !boundary_degrees(j, k, n)?.contains(&degree) {
            return Err(Error::OutOfRange(format!(
                "Frob({j},{k}) has no class in degree {degree} for n = {n}"
            )));
        }
        Ok(FrobBasisElement { j, k, g, n, degree })
    }

    pub fn identity(n: i64) -> Self {
        FrobBasisElement { j: 1, k: 1, g: 0, n, degree: 0 }
    }

    pub fn is_boundary(&self) -> bool {
        self.j == 0 || self.k == 0
    }

    /// Whether the degree lies in the tabulated range of its component.
    pub fn in_table(&self) -> bool {
        if self.is_boundary() {
            boundary_degrees(self.j, self.k, self.n).is_ok_and(|d| d.contains(&self.degree))
        } else {
            frob_degree(self.j, self.k, self.g, self.n) == Ok(self.degree)
        }
    }
}

impl fmt::Display for FrobBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},g={},deg={})", self.j, self.k, self.g, self.degree)
    }
}

impl Decoration for FrobBasisElement {
    fn arity(&self) -> (usize, usize) {
        (self.j, self.k)
    }
    fn label(&self) -> String {
        format!("F.g{}.n{}.d{}", self.g, self.n, self.degree)
    }
    fn from_label(label: &str, ins: usize, outs: usize) -> Result<Self> {
        let bad = || Error::Input(format!("bad Frob label `{label}`"));
        let rest = label.strip_prefix("F.g").ok_or_else(bad)?;
        let (g, rest) = rest.split_once(".n").ok_or_else(bad)?;
        let (n, d) = rest.split_once(".d").ok_or_else(bad)?;
        let g: usize = g.parse().map_err(|_| bad())?;
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        let e = FrobBasisElement { j: ins, k: outs, g, n, degree: d };
        if ins + outs == 0 || !e.in_table() {
            return Err(bad());
        }
        Ok(e)
    }
}

/// `(k-1)n + gn` for `j, k > 0`.
pub fn frob_degree(j: usize, k: usize, g: usize, n: i64) -> Result<i64> {
    if j == 0 || k == 0 {
        return Err(Error::OutOfRange(format!(
            "Frob({j},{k}) is a boundary component; use its degree table"
        )));
    }
    Ok((k as i64 - 1 + g as i64) * n)
}

/// Tabulated degrees of a leg-less component.
pub fn boundary_degrees(j: usize, k: usize, n: i64) -> Result<Vec<i64>> {
    match (j, k) {
        (0, 0) => Err(Error::Input("Frob(0,0) is not a component".into())),
        (0, k) => Ok((0..=k as i64).map(|m| m * n).collect()),
        (j, 0) => Ok((-(j as i64)..=0).map(|m| m * n).collect()),
        _ => Err(Error::Input("not a boundary component".into())),
    }
}

/// Composition along `r` upper elements whose outputs all feed `lower`.
///
/// The structure maps are the canonical isomorphisms, so the coefficient
/// is always one and only the indices need computing.
pub fn frob_compose(uppers: &[FrobBasisElement], lower: &FrobBasisElement) -> Result<FrobBasisElement> {
    if uppers.is_empty() {
        return Err(Error::Composition("no upper elements".into()));
    }
    if uppers.iter().chain(std::iter::once(lower)).any(|e| e.is_boundary()) {
        return Err(Error::Composition("boundary components are composed by graph reduction".into()));
    }
    if uppers.iter().any(|e| e.n != lower.n) {
        return Err(Error::Composition("mixed degree parameters".into()));
    }
    let k: usize = uppers.iter().map(|e| e.k).sum();
    if k != lower.j {
        return Err(Error::Composition(format!("{k} outputs cannot feed {} inputs", lower.j)));
    }
    let j = uppers.iter().map(|e| e.j).sum();
    let g = uppers.iter().map(|e| e.g).sum::<usize>() + lower.g + k - uppers.len();
    FrobBasisElement::new(j, lower.k, g, lower.n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrobGenerator {
    /// Product, arity (2,1), degree 0.
    Mu,
    /// Unit, arity (0,1), degree 0.
    Eta,
    /// Coproduct, arity (1,2), degree n.
    Delta,
    /// Counit, arity (1,0), degree -n.
    Eps,
}

impl FrobGenerator {
    pub const ALL: [FrobGenerator; 4] = [FrobGenerator::Mu, FrobGenerator::Eta, FrobGenerator::Delta, FrobGenerator::Eps];

    pub fn degree(self, n: i64) -> i64 {
        match self {
            FrobGenerator::Mu | FrobGenerator::Eta => 0,
            FrobGenerator::Delta => n,
            FrobGenerator::Eps => -n,
        }
    }

    pub fn element(self, n: i64) -> FrobBasisElement {
        let (j, k) = self.arity();
        FrobBasisElement { j, k, g: 0, n, degree: self.degree(n) }
    }
}

impl Decoration for FrobGenerator {
    fn arity(&self) -> (usize, usize) {
        match self {
            FrobGenerator::Mu => (2, 1),
            FrobGenerator::Eta => (0, 1),
            FrobGenerator::Delta => (1, 2),
            FrobGenerator::Eps => (1, 0),
        }
    }
    fn label(&self) -> String {
        match self {
            FrobGenerator::Mu => "mu",
            FrobGenerator::Eta => "eta",
            FrobGenerator::Delta => "delta",
            FrobGenerator::Eps => "eps",
        }
        .to_string()
    }
    fn from_label(label: &str, _ins: usize, _outs: usize) -> Result<Self> {
        match label {
            "mu" => Ok(FrobGenerator::Mu),
            "eta" => Ok(FrobGenerator::Eta),
            "delta" => Ok(FrobGenerator::Delta),
            "eps" => Ok(FrobGenerator::Eps),
            other => Err(Error::Input(format!("unknown Frobenius generator `{other}`"))),
        }
    }
}

/// Merges vertices `u` and `v` (with `v` fed only by edges from `u` along
/// the chosen pair) into one element of genus `g_u + g_v + m - 1`, where
/// `m` is the number of edges between them.
fn contract_pair(s: &Skeleton<FrobBasisElement>, u: usize, v: usize) -> Skeleton<FrobBasisElement> {
    let m = s.edges.iter().filter(|&&e| e == (u, v)).count();
    let (a, b) = (s.decos[u], s.decos[v]);
    let merged = FrobBasisElement {
        j: a.j + b.j - m,
        k: a.k + b.k - m,
        g: a.g + b.g + m - 1,
        n: a.n,
        degree: a.degree + b.degree,
    };
    // new index: u's slot keeps the merged vertex, v is removed
    let map = |x: usize| -> usize {
        let x = if x == v { u } else { x };
        if x > v { x - 1 } else { x }
    };
    let mut decos = s.decos.clone();
    decos[u] = merged;
    decos.remove(v);
    let mut edges: Vec<_> = s
        .edges
        .iter()
        .filter(|&&e| e != (u, v))
        .map(|&(x, y)| (map(x), map(y)))
        .collect();
    edges.sort();
    Skeleton {
        decos,
        edges,
        inputs: s.inputs.iter().map(|&x| map(x)).collect(),
        outputs: s.outputs.iter().map(|&x| map(x)).collect(),
        blocks: None,
    }
}

/// Pairs `(u, v)` joined by an edge with no other directed path from `u`
/// to `v`; contracting such a pair keeps the graph acyclic.
pub fn contractible_pairs<D: Decoration>(s: &Skeleton<D>) -> Vec<(usize, usize)> {
    let pairs: BTreeSet<(usize, usize)> = s.edges.iter().copied().collect();
    pairs
        .into_iter()
        .filter(|&(u, v)| {
            let without = Skeleton {
                decos: s.decos.clone(),
                edges: s.edges.iter().copied().filter(|&e| e != (u, v)).collect(),
                inputs: vec![],
                outputs: vec![],
                blocks: None,
            };
            !without.reaches(u, v)
        })
        .collect()
}

fn lift(g: &DirectedGraph<FrobGenerator>, n: i64) -> Skeleton<FrobBasisElement> {
    let s = g.skeleton();
    Skeleton {
        decos: s.decos.iter().map(|d| d.element(n)).collect(),
        edges: s.edges,
        inputs: s.inputs,
        outputs: s.outputs,
        blocks: None,
    }
}

fn check_result(e: FrobBasisElement) -> Result<FrobBasisElement> {
    if e.j == 0 && e.k == 0 {
        return Err(Error::OutOfRange("graph evaluates into Frob(0,0)".into()));
    }
    if !e.in_table() {
        return Err(Error::OutOfRange(format!(
            "graph evaluates to {e}, outside the degree table of Frob({},{})",
            e.j, e.k
        )));
    }
    Ok(e)
}

/// Evaluates a generator graph in `Frob`, contracting the first available
/// pair in index order until one vertex remains.
pub fn reduce_to_normal_form(g: &DirectedGraph<FrobGenerator>, n: i64) -> Result<FrobBasisElement> {
    let mut s = lift(g, n);
    while s.num_vertices() > 1 {
        let (u, v) = contractible_pairs(&s)[0];
        s = contract_pair(&s, u, v);
    }
    check_result(s.decos[0])
}

/// Results over every reduction order. Confluence means one element.
pub fn reduce_all_orders(g: &DirectedGraph<FrobGenerator>, n: i64) -> BTreeSet<FrobBasisElement> {
    fn go(
        s: Skeleton<FrobBasisElement>,
        memo: &mut BTreeMap<Skeleton<FrobBasisElement>, BTreeSet<FrobBasisElement>>,
    ) -> BTreeSet<FrobBasisElement> {
        if s.num_vertices() == 1 {
            return BTreeSet::from([s.decos[0]]);
        }
        let key = s.canonize(false).skeleton;
        if let Some(r) = memo.get(&key) {
            return r.clone();
        }
        let mut out = BTreeSet::new();
        for (u, v) in contractible_pairs(&s) {
            out.extend(go(contract_pair(&s, u, v), memo));
        }
        memo.insert(key, out.clone());
        out
    }
    go(lift(g, n), &mut BTreeMap::new())
}

/// One side of a generator relation after rewriting, or the bare identity
/// wire when a unit or counit relation removes every vertex.
#[derive(Clone, Debug)]
enum Rewritten {
    Graph(DirectedGraph<FrobGenerator>),
    Identity,
}

/// Outcome of checking the relations on all small generator graphs.
#[derive(Clone, Debug, Default)]
pub struct PresentationReport {
    /// Leg-permutation orbits checked for confluence.
    pub orbits: usize,
    /// Leg-ordered graphs checked against every relation instance.
    pub graphs: usize,
    pub rewrites: usize,
    pub by_relation: BTreeMap<String, usize>,
    pub violations: Vec<String>,
    pub confluence_failures: Vec<String>,
}

impl PresentationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.confluence_failures.is_empty()
    }
}

/// Endpoint of a wire in a port-level graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Src {
    Leg(usize),
    Out(usize, usize),
}
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Dst {
    Leg(usize),
    In(usize, usize),
}

/// Port-level graph as a list of wires with removable vertices.
#[derive(Clone, Debug)]
struct Wiring {
    verts: Vec<Option<FrobGenerator>>,
    wires: Vec<(Src, Dst)>,
}

impl Wiring {
    fn from_graph(g: &DirectedGraph<FrobGenerator>) -> Self {
        let mut wires: Vec<(Src, Dst)> = g
            .edges()
            .iter()
            .map(|e| (Src::Out(e.from.vertex, e.from.port), Dst::In(e.to.vertex, e.to.port)))
            .collect();
        for (i, p) in g.inputs().iter().enumerate() {
            wires.push((Src::Leg(i), Dst::In(p.vertex, p.port)));
        }
        for (i, p) in g.outputs().iter().enumerate() {
            wires.push((Src::Out(p.vertex, p.port), Dst::Leg(i)));
        }
        Wiring { verts: g.vertices().iter().map(|&d| Some(d)).collect(), wires }
    }

    fn source_of(&self, v: usize, port: usize) -> Src {
        self.wires.iter().find(|w| w.1 == Dst::In(v, port)).unwrap().0
    }
    fn target_of(&self, v: usize, port: usize) -> Dst {
        self.wires.iter().find(|w| w.0 == Src::Out(v, port)).unwrap().1
    }
    fn drop_vertex(&mut self, v: usize) {
        self.verts[v] = None;
        self.wires.retain(|w| !matches!(w.0, Src::Out(x, _) if x == v) && !matches!(w.1, Dst::In(x, _) if x == v));
    }
    fn add_vertex(&mut self, d: FrobGenerator) -> usize {
        self.verts.push(Some(d));
        self.verts.len() - 1
    }

    fn to_graph(&self) -> Result<Rewritten> {
        let live: Vec<usize> = (0..self.verts.len()).filter(|&v| self.verts[v].is_some()).collect();
        if live.is_empty() {
            return Ok(Rewritten::Identity);
        }
        let idx = |v: usize| live.iter().position(|&x| x == v).unwrap();
        let mut edges = Vec::new();
        let mut inputs = BTreeMap::new();
        let mut outputs = BTreeMap::new();
        for &(s, d) in &self.wires {
            match (s, d) {
                (Src::Out(a, p), Dst::In(b, q)) => edges.push(Edge { from: Port::new(idx(a), p), to: Port::new(idx(b), q) }),
                (Src::Leg(i), Dst::In(b, q)) => {
                    inputs.insert(i, Port::new(idx(b), q));
                }
                (Src::Out(a, p), Dst::Leg(i)) => {
                    outputs.insert(i, Port::new(idx(a), p));
                }
                (Src::Leg(_), Dst::Leg(_)) => {
                    return Err(Error::Invariant("bare wire next to vertices".into()));
                }
            }
        }
        let g = DirectedGraph::new(
            live.iter().map(|&v| self.verts[v].unwrap()).collect(),
            edges,
            inputs.into_values().collect(),
            outputs.into_values().collect(),
        )?;
        Ok(Rewritten::Graph(g))
    }
}

/// Every single-relation rewrite of `g`, tagged with the relation name.
fn rewrites(g: &DirectedGraph<FrobGenerator>) -> Vec<(&'static str, Result<Rewritten>)> {
    use FrobGenerator::*;
    let w0 = Wiring::from_graph(g);
    let mut out = Vec::new();
    for e in g.edges() {
        let (a, b) = (e.from.vertex, e.to.vertex);
        let (da, db) = (g.vertices()[a], g.vertices()[b]);
        let other = |p: usize| 1 - p;
        match (da, db) {
            (Mu, Mu) => {
                // ((x0 x1) y) -> (x0 (x1 y)): rebracket
                let mut w = w0.clone();
                let x0 = w.source_of(a, 0);
                let x1 = w.source_of(a, 1);
                let y = w.source_of(b, other(e.to.port));
                let z = w.target_of(b, 0);
                w.drop_vertex(a);
                w.drop_vertex(b);
                let inner = w.add_vertex(Mu);
                let outer = w.add_vertex(Mu);
                w.wires.extend([
                    (x1, Dst::In(inner, 0)),
                    (y, Dst::In(inner, 1)),
                    (x0, Dst::In(outer, 0)),
                    (Src::Out(inner, 0), Dst::In(outer, 1)),
                    (Src::Out(outer, 0), z),
                ]);
                out.push(("associativity", w.to_graph()));
            }
            (Delta, Delta) => {
                let mut w = w0.clone();
                let x = w.source_of(a, 0);
                let y = w.target_of(a, other(e.from.port));
                let z0 = w.target_of(b, 0);
                let z1 = w.target_of(b, 1);
                w.drop_vertex(a);
                w.drop_vertex(b);
                let outer = w.add_vertex(Delta);
                let inner = w.add_vertex(Delta);
                w.wires.extend([
                    (x, Dst::In(outer, 0)),
                    (Src::Out(outer, 0), z0),
                    (Src::Out(outer, 1), Dst::In(inner, 0)),
                    (Src::Out(inner, 0), z1),
                    (Src::Out(inner, 1), y),
                ]);
                out.push(("coassociativity", w.to_graph()));
            }
            (Eta, Mu) => {
                let mut w = w0.clone();
                let x = w.source_of(b, other(e.to.port));
                let z = w.target_of(b, 0);
                w.drop_vertex(a);
                w.drop_vertex(b);
                w.wires.push((x, z));
                out.push(("unit", w.to_graph()));
            }
            (Delta, Eps) => {
                let mut w = w0.clone();
                let x = w.source_of(a, 0);
                let z = w.target_of(a, other(e.from.port));
                w.drop_vertex(a);
                w.drop_vertex(b);
                w.wires.push((x, z));
                out.push(("counit", w.to_graph()));
            }
            (Mu, Delta) => {
                // delta(x0 x1) -> (x0 delta'(x1)) with the first output of
                // delta' fed back through a product
                let mut w = w0.clone();
                let x0 = w.source_of(a, 0);
                let x1 = w.source_of(a, 1);
                let z0 = w.target_of(b, 0);
                let z1 = w.target_of(b, 1);
                w.drop_vertex(a);
                w.drop_vertex(b);
                let d = w.add_vertex(Delta);
                let m = w.add_vertex(Mu);
                w.wires.extend([
                    (x1, Dst::In(d, 0)),
                    (x0, Dst::In(m, 0)),
                    (Src::Out(d, 0), Dst::In(m, 1)),
                    (Src::Out(m, 0), z0),
                    (Src::Out(d, 1), z1),
                ]);
                out.push(("frobenius", w.to_graph()));
            }
            _ => {}
        }
    }
    for (v, &d) in g.vertices().iter().enumerate() {
        // commutativity: swap the two inputs of a product / outputs of a coproduct
        let mut w = w0.clone();
        match d {
            Mu => {
                for wire in w.wires.iter_mut() {
                    if let Dst::In(x, p) = wire.1 {
                        if x == v {
                            wire.1 = Dst::In(x, 1 - p);
                        }
                    }
                }
                out.push(("commutativity", w.to_graph()));
            }
            Delta => {
                for wire in w.wires.iter_mut() {
                    if let Src::Out(x, p) = wire.0 {
                        if x == v {
                            wire.0 = Src::Out(x, 1 - p);
                        }
                    }
                }
                out.push(("cocommutativity", w.to_graph()));
            }
            _ => {}
        }
    }
    out
}

/// Checks confluence of the reduction on every generator graph with at most
/// `max_vertices` vertices, and every relation instance inside those graphs
/// with `j + k <= max_legs`.
pub fn verify_presentation(max_vertices: usize, max_legs: usize, n: i64) -> Result<PresentationReport> {
    if max_vertices > MAX_PRESENTATION_VERTICES {
        return Err(Error::Resource(format!(
            "presentation audit is limited to {MAX_PRESENTATION_VERTICES} vertices"
        )));
    }
    let mut report = PresentationReport::default();
    // Confluence does not depend on leg order, so one graph per orbit of
    // leg permutations covers every arity reachable with this many vertices.
    let leg_cap = max_vertices + 2;
    for j in 0..=leg_cap {
        for k in 0..=leg_cap - j {
            if j + k == 0 {
                continue;
            }
            for s in enumerate_skeletons(j, k, max_vertices, &FrobGenerator::ALL, false)? {
                report.orbits += 1;
                let g = s.to_graph()?;
                let all = reduce_all_orders(&g, n);
                if all.len() != 1 {
                    report.confluence_failures.push(format!("{} orders disagree: {all:?}", g.to_text()));
                }
            }
        }
    }
    for j in 0..=max_legs {
        for k in 0..=max_legs - j {
            if j + k == 0 {
                continue;
            }
            for g in enumerate_graphs(j, k, max_vertices, &FrobGenerator::ALL)? {
                report.graphs += 1;
                let lhs = reduce_to_normal_form(&g, n);
                for (name, rhs) in rewrites(&g) {
                    report.rewrites += 1;
                    *report.by_relation.entry(name.to_string()).or_default() += 1;
                    let rhs = match rhs {
                        Ok(Rewritten::Graph(h)) => reduce_to_normal_form(&h, n),
                        Ok(Rewritten::Identity) => Ok(FrobBasisElement::identity(n)),
                        Err(e) => Err(e),
                    };
                    if lhs != rhs {
                        report.violations.push(format!("{name} on\n{}: {lhs:?} vs {rhs:?}", g.to_text()));
                    }
                }
            }
        }
    }
    Ok(report)
}
