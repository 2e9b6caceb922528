//! Lie di-algebras with module compatibility: Killing-form cobrackets,
//! relation checks in `End(V)`, component dimensions from the presentation,
//! and the tensor structure on `A ⊗ g`.
//!
//! Relations are kept as formal combinations of two-vertex generator graphs
//! (`b` the bracket, `d` the cobracket). The same combinations are evaluated
//! in `End(V)` and substituted into trees when counting dimensions, so the
//! two computations share one sign convention. In degree `n` the cobracket
//! has degree `n`, swapping its outputs multiplies it by `-(-1)^n`, and
//! reordering vertices carries the Koszul sign of the cobrackets when `n` is
//! odd.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::{coproduct_from_pairing, FrobeniusAlgebraData};
use crate::endo::{evaluate_network, MultiMap};
use crate::error::{Error, Result};
use crate::exact::{invert_matrix, parse_scalar, GradedSpace, RowEchelon, Scalar};
use crate::graph::{enumerate_graphs, permutation_sign, permutations, DirectedGraph, Edge, Label, Port, Skeleton};

pub const MAX_HADAMARD_ARITY: usize = 5;

const BUILTIN_LIE: [(&str, &str); 3] = [
    ("sl2", include_str!("../fixtures/sl2.lie")),
    ("so3", include_str!("../fixtures/so3.lie")),
    ("heisenberg3", include_str!("../fixtures/heisenberg3.lie")),
];

pub fn builtin_lie_names() -> Vec<&'static str> {
    BUILTIN_LIE.iter().map(|(n, _)| *n).collect()
}

/// A Lie algebra in degree zero: `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraData {
    pub names: Vec<String>,
    pub c: Vec<Vec<Vec<Scalar>>>,
}

/// Loads a shipped Lie algebra by name or reads a file.
pub fn load_lie(name_or_path: &str) -> Result<LieAlgebraData> {
    if let Some((_, text)) = BUILTIN_LIE.iter().find(|(n, _)| *n == name_or_path) {
        return parse_lie(text);
    }
    let text = std::fs::read_to_string(name_or_path)
        .map_err(|e| Error::Input(format!("cannot read Lie algebra {name_or_path}: {e}")))?;
    parse_lie(&text)
}

/// Lines `dim N`, `names a b ...` and `bracket a b c coeff` (meaning
/// `[a,b]` has coefficient `coeff` on `c`; the partner `[b,a]` is implied).
pub fn parse_lie(text: &str) -> Result<LieAlgebraData> {
    let mut dim = None;
    let mut names: Vec<String> = Vec::new();
    let mut triples = Vec::new();
    for line in text.lines().map(|l| l.split('#').next().unwrap().trim()).filter(|l| !l.is_empty()) {
        let p: Vec<&str> = line.split_whitespace().collect();
        match (p[0], p.len()) {
            ("dim", 2) => dim = Some(p[1].parse::<usize>().map_err(|_| Error::Input(format!("bad dim: {line}")))?),
            ("names", _) => names = p[1..].iter().map(|s| s.to_string()).collect(),
            ("bracket", 5) => triples.push((p[1].to_string(), p[2].to_string(), p[3].to_string(), parse_scalar(p[4])?)),
            _ => return Err(Error::Input(format!("unrecognized line: {line}"))),
        }
    }
    let dim = dim.ok_or_else(|| Error::Input("missing dim".into()))?;
    if names.is_empty() {
        names = (0..dim).map(|i| format!("e{i}")).collect();
    }
    if names.len() != dim || dim == 0 {
        return Err(Error::Dimension { expected: dim, got: names.len() });
    }
    let idx = |s: &str| names.iter().position(|n| n == s).ok_or_else(|| Error::Input(format!("unknown basis name {s}")));
    let mut c = vec![vec![vec![Scalar::zero(); dim]; dim]; dim];
    for (a, b, t, v) in triples {
        let (a, b, t) = (idx(&a)?, idx(&b)?, idx(&t)?);
        if a == b && !v.is_zero() {
            return Err(Error::Invariant(format!("[{0},{0}] must vanish", names[a])));
        }
        c[a][b][t] = v.clone();
        c[b][a][t] = -v;
    }
    let l = LieAlgebraData { names, c };
    l.check()?;
    Ok(l)
}

impl LieAlgebraData {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    fn bracket_vec(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim();
        let mut out = vec![Scalar::zero(); n];
        for i in 0..n {
            for j in 0..n {
                let s = &x[i] * &y[j];
                if s.is_zero() {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += &s * &self.c[i][j][k];
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<Scalar> {
        (0..self.dim()).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect()
    }

    /// Antisymmetry and Jacobi on all basis triples.
    pub fn check(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.c[i][j][k] != -self.c[j][i][k].clone() {
                        return Err(Error::Invariant("bracket is not antisymmetric".into()));
                    }
                    let (a, b, c) = (self.unit(i), self.unit(j), self.unit(k));
                    let t1 = self.bracket_vec(&self.bracket_vec(&a, &b), &c);
                    let t2 = self.bracket_vec(&self.bracket_vec(&b, &c), &a);
                    let t3 = self.bracket_vec(&self.bracket_vec(&c, &a), &b);
                    if t1.iter().zip(&t2).zip(&t3).any(|((x, y), z)| !(x + y + z).is_zero()) {
                        return Err(Error::Invariant(format!(
                            "Jacobi fails on ({}, {}, {})",
                            self.names[i], self.names[j], self.names[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn bracket_map(&self) -> MultiMap {
        let space = Arc::new(lie_space(self));
        let n = self.dim();
        let mut m = MultiMap::zero(space, 2, 1, 0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    m.add_entry(vec![k], vec![i, j], self.c[i][j][k].clone());
                }
            }
        }
        m
    }
}

fn lie_space(l: &LieAlgebraData) -> GradedSpace {
    GradedSpace::new(l.names.iter().map(|s| (s.clone(), 0)).collect()).expect("names are distinct")
}

/// `K[a][b] = tr(ad_a ∘ ad_b)`.
pub fn killing_form(l: &LieAlgebraData) -> Vec<Vec<Scalar>> {
    let n = l.dim();
    let mut k = vec![vec![Scalar::zero(); n]; n];
    for (a, row) in k.iter_mut().enumerate() {
        for (b, e) in row.iter_mut().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    *e += &l.c[a][i][j] * &l.c[b][j][i];
                }
            }
        }
    }
    k
}

/// A bracket of degree 0 and a cobracket of degree `n` on one space.
#[derive(Clone, Debug)]
pub struct DiLieData {
    pub space: Arc<GradedSpace>,
    pub n: i64,
    pub bracket: MultiMap,
    pub cobracket: MultiMap,
}

/// `δ_k^{ij} = Σ K⁻¹[i][a] K⁻¹[j][b] K[k][c] c[a][b][c]`; the relations are
/// then checked exactly.
pub fn cobracket_from_killing(l: &LieAlgebraData) -> Result<DiLieData> {
    let n = l.dim();
    let k = killing_form(l);
    let kinv = invert_matrix(&k).ok_or_else(|| {
        Error::DegenerateKilling("the algebra is not semisimple, so its bracket cannot be inverted".into())
    })?;
    // lowered[k][a][b] = Σ_c K[k][c] c[a][b][c]
    let mut lowered = vec![vec![vec![Scalar::zero(); n]; n]; n];
    for (kk, slab) in lowered.iter_mut().enumerate() {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    slab[a][b] += &k[kk][c] * &l.c[a][b][c];
                }
            }
        }
    }
    let bracket = l.bracket_map();
    let mut cob = MultiMap::zero(bracket.space().clone(), 1, 2, 0);
    for kk in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = Scalar::zero();
                for a in 0..n {
                    for b in 0..n {
                        v += &kinv[i][a] * &kinv[j][b] * &lowered[kk][a][b];
                    }
                }
                cob.add_entry(vec![i, j], vec![kk], v);
            }
        }
    }
    let d = DiLieData { space: bracket.space().clone(), n: 0, bracket, cobracket: cob };
    let report = dilie_relations_check(&d)?;
    if !report.all_zero() {
        return Err(Error::Inconsistent(format!("Killing-form cobracket fails its relations: {report:?}")));
    }
    Ok(d)
}

/// Formal combination of generator graphs.
pub type Formal = Vec<(Scalar, DirectedGraph<Label>)>;

pub fn bracket_label() -> Label {
    Label::new("b", 2, 1)
}

pub fn cobracket_label() -> Label {
    Label::new("d", 1, 2)
}

fn parity(n: i64) -> Scalar {
    if n.rem_euclid(2) == 0 { Scalar::one() } else { -Scalar::one() }
}

fn graph(verts: [Label; 2], edges: &[((usize, usize), (usize, usize))], ins: &[(usize, usize)], outs: &[(usize, usize)]) -> DirectedGraph<Label> {
    let p = |(v, q): (usize, usize)| Port::new(v, q);
    DirectedGraph::new(
        verts.to_vec(),
        edges.iter().map(|&(a, b)| Edge { from: p(a), to: p(b) }).collect(),
        ins.iter().map(|&x| p(x)).collect(),
        outs.iter().map(|&x| p(x)).collect(),
    )
    .expect("relation graphs are well formed")
}

fn corolla_with(l: Label, ins: &[usize], outs: &[usize]) -> DirectedGraph<Label> {
    DirectedGraph::new(
        vec![l],
        vec![],
        ins.iter().map(|&q| Port::new(0, q)).collect(),
        outs.iter().map(|&q| Port::new(0, q)).collect(),
    )
    .expect("corolla")
}

/// The five defining relations in degree `n`, each a formal combination
/// that must vanish. Two-vertex graphs list the upper vertex first.
pub fn dilie_relations(n: i64) -> Vec<(&'static str, Formal)> {
    let (b, d) = (bracket_label(), cobracket_label());
    let one = Scalar::one();
    let anti = vec![(one.clone(), corolla_with(b.clone(), &[0, 1], &[0])), (one.clone(), corolla_with(b.clone(), &[1, 0], &[0]))];
    let coanti = vec![
        (one.clone(), corolla_with(d.clone(), &[0], &[0, 1])),
        (parity(n), corolla_with(d.clone(), &[0], &[1, 0])),
    ];
    let cyc = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
    // [[x,y],z]: leg x -> (0,0), y -> (0,1), z -> (1,1)
    let jacobi = cyc
        .iter()
        .map(|&[x, y, z]| {
            let mut ins = [(0, 0); 3];
            ins[x] = (0, 0);
            ins[y] = (0, 1);
            ins[z] = (1, 1);
            (one.clone(), graph([b.clone(), b.clone()], &[((0, 0), (1, 0))], &ins, &[(1, 0)]))
        })
        .collect();
    // (δ ⊗ 1) δ: outputs p, q from the lower cobracket, r from the upper
    let cojacobi = cyc
        .iter()
        .map(|&[p, q, r]| {
            let mut outs = [(0, 0); 3];
            outs[p] = (1, 0);
            outs[q] = (1, 1);
            outs[r] = (0, 1);
            (one.clone(), graph([d.clone(), d.clone()], &[((0, 0), (1, 0))], &[(0, 0)], &outs))
        })
        .collect();
    // δ is a map of modules: δ[x,y] = x·δ(y) = [x,y₁]⊗y₂ + y₁⊗[x,y₂]
    let m = -one.clone();
    let module = vec![
        (one.clone(), graph([b.clone(), d.clone()], &[((0, 0), (1, 0))], &[(0, 0), (0, 1)], &[(1, 0), (1, 1)])),
        (m.clone(), graph([d.clone(), b.clone()], &[((0, 0), (1, 1))], &[(1, 0), (0, 0)], &[(1, 0), (0, 1)])),
        (m, graph([d.clone(), b.clone()], &[((0, 1), (1, 1))], &[(1, 0), (0, 0)], &[(0, 0), (1, 0)])),
    ];
    vec![("antisymmetry", anti), ("co-antisymmetry", coanti), ("Jacobi", jacobi), ("co-Jacobi", cojacobi), ("module", module)]
}

/// Largest absolute defect of each relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiLieReport {
    pub defects: Vec<(&'static str, Scalar)>,
}

impl DiLieReport {
    pub fn all_zero(&self) -> bool {
        self.defects.iter().all(|(_, v)| v.is_zero())
    }
}

/// Evaluates a formal combination with `b ↦ bracket`, `d ↦ cobracket`.
pub fn evaluate_formal(d: &DiLieData, f: &Formal) -> Result<MultiMap> {
    let mut acc: Option<MultiMap> = None;
    for (c, g) in f {
        let maps: Vec<&MultiMap> =
            g.vertices().iter().map(|l| if l.name == "b" { &d.bracket } else { &d.cobracket }).collect();
        let v = evaluate_network(g, &maps)?.scale(c);
        acc = Some(match acc {
            None => v,
            Some(a) => a.add(&v)?,
        });
    }
    acc.ok_or_else(|| Error::Input("empty relation".into()))
}

pub fn dilie_relations_check(d: &DiLieData) -> Result<DiLieReport> {
    if d.bracket.arity() != (2, 1) || d.cobracket.arity() != (1, 2) || d.bracket.degree() != 0 || d.cobracket.degree() != d.n {
        return Err(Error::Invariant("bracket must be (2,1) of degree 0 and cobracket (1,2) of degree n".into()));
    }
    let mut defects = Vec::new();
    for (name, f) in dilie_relations(d.n) {
        defects.push((name, evaluate_formal(d, &f)?.max_abs()));
    }
    Ok(DiLieReport { defects })
}

/// Ordered sources of the in-ports (or targets of the out-ports) of `v`:
/// `Ok(w)` for another vertex, `Err(i)` for leg `i`.
fn port_neighbors(g: &DirectedGraph<Label>, v: usize, incoming: bool) -> Vec<std::result::Result<usize, usize>> {
    let (ar_in, ar_out) = (g.vertices()[v].ins, g.vertices()[v].outs);
    let mut out = vec![Err(usize::MAX); if incoming { ar_in } else { ar_out }];
    for e in g.edges() {
        if incoming && e.to.vertex == v {
            out[e.to.port] = Ok(e.from.vertex);
        }
        if !incoming && e.from.vertex == v {
            out[e.from.port] = Ok(e.to.vertex);
        }
    }
    let legs = if incoming { g.inputs() } else { g.outputs() };
    for (i, p) in legs.iter().enumerate() {
        if p.vertex == v {
            out[p.port] = Err(i);
        }
    }
    out
}

/// `g = sign · (canonical tree read with its canonical ports and vertex
/// order)`, or `None` when a symmetry forces `g = -g`. Only trees are
/// handled, so port neighbors are distinct.
pub fn canonical_with_sign(g: &DirectedGraph<Label>, n: i64) -> Option<(Skeleton<Label>, i64)> {
    let canon = g.skeleton().canonize(true);
    let reference = canon.skeleton.to_graph().expect("canonical skeleton rebuilds");
    let odd_d = n.rem_euclid(2) == 1;
    let swap_d: i64 = if odd_d { 1 } else { -1 };
    let mut sign = None;
    for perm in &canon.relabelings {
        let h = g.relabel_vertices(perm).expect("relabeling");
        let mut s = 1;
        if odd_d {
            let odd: Vec<usize> = (0..perm.len()).filter(|&v| g.vertices()[v].name == "d").map(|v| perm[v]).collect();
            let mut sorted = odd.clone();
            sorted.sort();
            let ranks: Vec<usize> = odd.iter().map(|x| sorted.iter().position(|y| y == x).unwrap()).collect();
            s *= permutation_sign(&ranks);
        }
        for v in 0..h.num_vertices() {
            let is_b = h.vertices()[v].name == "b";
            let mine = port_neighbors(&h, v, is_b);
            let theirs = port_neighbors(&reference, v, is_b);
            if mine != theirs {
                debug_assert_eq!(mine.iter().rev().cloned().collect::<Vec<_>>(), theirs);
                s *= if is_b { -1 } else { swap_d };
            }
        }
        match sign {
            None => sign = Some(s),
            Some(t) if t != s => return None,
            _ => {}
        }
    }
    Some((canon.skeleton, sign.expect("at least one relabeling")))
}

/// Replaces the two endpoints of `edge` in `g` by each term of `rel`,
/// matching the piece's external legs to the relation's legs in port order.
fn substitute(g: &DirectedGraph<Label>, edge: Edge, rel: &Formal) -> Formal {
    let (u, v) = (edge.from.vertex, edge.to.vertex);
    let keep: Vec<usize> = (0..g.num_vertices()).filter(|&w| w != u && w != v).collect();
    let m = keep.len();
    let renum = |w: usize| keep.iter().position(|&x| x == w).unwrap();
    // piece in-ports / out-ports other than the internal edge
    let mut piece_in = Vec::new();
    let mut piece_out = Vec::new();
    for w in [u, v] {
        let l = &g.vertices()[w];
        piece_in.extend((0..l.ins).map(|q| Port::new(w, q)).filter(|&p| p != edge.to));
        piece_out.extend((0..l.outs).map(|q| Port::new(w, q)).filter(|&p| p != edge.from));
    }
    let mut out = Vec::new();
    for (c, h) in rel {
        let hp = |p: Port| Port::new(m + p.vertex, p.port);
        let mut verts: Vec<Label> = keep.iter().map(|&w| g.vertices()[w].clone()).collect();
        verts.extend(h.vertices().iter().cloned());
        let mut edges: Vec<Edge> = h.edges().iter().map(|e| Edge { from: hp(e.from), to: hp(e.to) }).collect();
        let mut inputs = g.inputs().to_vec();
        let mut outputs = g.outputs().to_vec();
        for e in g.edges() {
            let (a, b) = (e.from.vertex, e.to.vertex);
            let (a_in, b_in) = (a == u || a == v, b == u || b == v);
            match (a_in, b_in) {
                (false, false) => edges.push(Edge { from: Port::new(renum(a), e.from.port), to: Port::new(renum(b), e.to.port) }),
                (false, true) => {
                    let i = piece_in.iter().position(|&p| p == e.to).unwrap();
                    edges.push(Edge { from: Port::new(renum(a), e.from.port), to: hp(h.inputs()[i]) });
                }
                (true, false) => {
                    let i = piece_out.iter().position(|&p| p == e.from).unwrap();
                    edges.push(Edge { from: hp(h.outputs()[i]), to: Port::new(renum(b), e.to.port) });
                }
                (true, true) => {}
            }
        }
        for p in inputs.iter_mut() {
            *p = match piece_in.iter().position(|q| q == p) {
                Some(i) => hp(h.inputs()[i]),
                None => Port::new(renum(p.vertex), p.port),
            };
        }
        for p in outputs.iter_mut() {
            *p = match piece_out.iter().position(|q| q == p) {
                Some(i) => hp(h.outputs()[i]),
                None => Port::new(renum(p.vertex), p.port),
            };
        }
        let g2 = DirectedGraph::new(verts, edges, inputs, outputs).expect("substitution keeps a tree");
        out.push((c.clone(), g2));
    }
    out
}

/// Degree and dimension of the genus-zero part of `diLie(j, k)` in degree
/// `n`, computed as trees modulo the relations.
pub fn dilie_component(j: usize, k: usize, n: i64) -> Result<BTreeMap<i64, usize>> {
    if j == 0 || k == 0 {
        return Err(Error::OutOfRange("diLie components need j, k > 0".into()));
    }
    if j + k > MAX_HADAMARD_ARITY {
        return Err(Error::Resource(format!("diLie components are limited to j + k <= {MAX_HADAMARD_ARITY}")));
    }
    if (j, k) == (1, 1) {
        return Ok(BTreeMap::from([(0, 1)]));
    }
    // trees with j - 1 brackets and k - 1 cobrackets
    let w = j + k - 2;
    let trees: Vec<DirectedGraph<Label>> = enumerate_graphs(j, k, w, &[bracket_label(), cobracket_label()])?
        .into_iter()
        .filter(|g| g.num_vertices() == w && g.loop_genus() == 0)
        .collect();
    let mut basis = BTreeSet::new();
    for g in &trees {
        if let Some((key, _)) = canonical_with_sign(g, n) {
            basis.insert(key);
        }
    }
    let basis: Vec<Skeleton<Label>> = basis.into_iter().collect();
    let index: BTreeMap<&Skeleton<Label>, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let rels = dilie_relations(n);
    let mut ech = RowEchelon::new();
    for key in &basis {
        let g = key.to_graph()?;
        for &e in g.edges() {
            let kinds = (g.vertices()[e.from.vertex].name.as_str(), g.vertices()[e.to.vertex].name.as_str());
            let rel = match kinds {
                ("b", "b") => &rels[2].1,
                ("d", "d") => &rels[3].1,
                ("b", "d") => &rels[4].1,
                _ => continue,
            };
            // relations are not invariant under relabeling the piece's legs
            let (rj, rk) = (rel[0].1.inputs().len(), rel[0].1.outputs().len());
            for sigma in permutations(rj) {
                for tau in permutations(rk) {
                    let moved: Formal =
                        rel.iter().map(|(c, h)| (c.clone(), h.permute_legs(&sigma, &tau).expect("leg permutation"))).collect();
                    let mut row: BTreeMap<usize, Scalar> = BTreeMap::new();
                    for (c, t) in substitute(&g, e, &moved) {
                        if let Some((tk, s)) = canonical_with_sign(&t, n) {
                            let slot = row.entry(index[&tk]).or_insert_with(Scalar::zero);
                            *slot += c * Scalar::from_integer(s.into());
                        }
                    }
                    row.retain(|_, v| !v.is_zero());
                    if !row.is_empty() {
                        ech.insert(row, Scalar::zero());
                    }
                }
            }
        }
    }
    let dim = basis.len() - ech.rank();
    let degree = n * (k as i64 - 1);
    Ok(if dim == 0 { BTreeMap::new() } else { BTreeMap::from([(degree, dim)]) })
}

/// Degrees and dimensions of `Frob(j,k)` at genus 0 in degree `n`.
pub fn frob0_component(j: usize, k: usize, n: i64) -> Result<BTreeMap<i64, usize>> {
    Ok(BTreeMap::from([(crate::frob::frob_degree(j, k, 0, n)?, 1)]))
}

/// Componentwise tensor: degrees add, dimensions multiply.
pub fn hadamard_component(p: &BTreeMap<i64, usize>, q: &BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for (dp, np) in p {
        for (dq, nq) in q {
            *out.entry(dp + dq).or_insert(0) += np * nq;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct HadamardRow {
    pub j: usize,
    pub k: usize,
    pub n: i64,
    pub product: BTreeMap<i64, usize>,
    pub dilie_n: BTreeMap<i64, usize>,
}

impl HadamardRow {
    pub fn matches(&self) -> bool {
        self.product == self.dilie_n
    }
}

/// Compares `Frob₀ ⊗ diLie₀` with `diLie_n` for every `j + k <= max_arity`.
pub fn hadamard_check(max_arity: usize, n: i64) -> Result<Vec<HadamardRow>> {
    if max_arity > MAX_HADAMARD_ARITY {
        return Err(Error::Resource(format!("Hadamard check is limited to j + k <= {MAX_HADAMARD_ARITY}")));
    }
    let mut rows = Vec::new();
    for total in 2..=max_arity {
        for j in 1..total {
            let k = total - j;
            let product = hadamard_component(&frob0_component(j, k, n)?, &dilie_component(j, k, 0)?);
            rows.push(HadamardRow { j, k, n, product, dilie_n: dilie_component(j, k, n)? });
        }
    }
    Ok(rows)
}

/// Bracket and cobracket induced on `A ⊗ g`, with the relation check.
#[derive(Clone, Debug)]
pub struct TensorAction {
    pub data: DiLieData,
    pub report: DiLieReport,
    /// Nonzero fillers found when resolving `A` through weight 2 at genus 0;
    /// `None` when the degree parameter is odd and no resolution is built.
    pub nonzero_homotopies: Option<usize>,
}

pub fn tensor_action(a: &FrobeniusAlgebraData, l: &LieAlgebraData) -> Result<TensorAction> {
    let g = cobracket_from_killing(l)?;
    let (da, dg) = (a.dim(), l.dim());
    let mut basis = Vec::new();
    for x in 0..da {
        for y in 0..dg {
            basis.push((format!("{}⊗{}", a.space.name(x), l.names[y]), a.space.degree(x)));
        }
    }
    let space = Arc::new(GradedSpace::new(basis)?);
    let at = |x: usize, y: usize| x * dg + y;
    // g sits in degree 0, so interleaving the factors costs no sign
    let mut bracket = MultiMap::zero(space.clone(), 2, 1, 0);
    for ((o, i), v) in a.mult.entries() {
        for ((go, gi), w) in g.bracket.entries() {
            bracket.add_entry(vec![at(o[0], go[0])], vec![at(i[0], gi[0]), at(i[1], gi[1])], v * w);
        }
    }
    let delta = coproduct_from_pairing(a)?;
    let mut cobracket = MultiMap::zero(space.clone(), 1, 2, a.n);
    for ((o, i), v) in delta.entries() {
        for ((go, gi), w) in g.cobracket.entries() {
            cobracket.add_entry(vec![at(o[0], go[0]), at(o[1], go[1])], vec![at(i[0], gi[0])], v * w);
        }
    }
    let data = DiLieData { space, n: a.n, bracket, cobracket };
    let report = dilie_relations_check(&data)?;
    let nonzero_homotopies = if a.n.rem_euclid(2) == 0 {
        let target = crate::obstruct::Target::strict("A", a)?;
        Some(crate::obstruct::run_resolution(target, 2, 0)?.nonzero_fillers())
    } else {
        None
    };
    Ok(TensorAction { data, report, nonzero_homotopies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::load_algebra;
    use crate::exact::{q, qf};

    fn idx(l: &LieAlgebraData, s: &str) -> usize {
        l.names.iter().position(|n| n == s).unwrap()
    }

    #[test]
    fn killing_forms_of_shipped_algebras() {
        let sl2 = load_lie("sl2").unwrap();
        let k = killing_form(&sl2);
        let (e, f, h) = (idx(&sl2, "e"), idx(&sl2, "f"), idx(&sl2, "h"));
        assert_eq!(k[h][h], q(8));
        assert_eq!(k[e][f], q(4));
        assert_eq!(k[f][e], q(4));
        for (a, b) in [(e, e), (f, f), (e, h), (f, h)] {
            assert!(k[a][b].is_zero());
        }
        let so3 = load_lie("so3").unwrap();
        let k = killing_form(&so3);
        for (a, row) in k.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                assert_eq!(*v, if a == b { q(-2) } else { q(0) });
            }
        }
        let heis = load_lie("heisenberg3").unwrap();
        assert!(killing_form(&heis).iter().flatten().all(|v| v.is_zero()));
    }

    #[test]
    fn killing_form_is_invariant() {
        for name in ["sl2", "so3"] {
            let l = load_lie(name).unwrap();
            let k = killing_form(&l);
            let n = l.dim();
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        // K([a,b],c) = K(a,[b,c])
                        let lhs: Scalar = (0..n).map(|t| &l.c[a][b][t] * &k[t][c]).sum();
                        let rhs: Scalar = (0..n).map(|t| &k[a][t] * &l.c[b][c][t]).sum();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn killing_cobrackets_satisfy_relations() {
        for name in ["sl2", "so3"] {
            let d = cobracket_from_killing(&load_lie(name).unwrap()).unwrap();
            assert!(dilie_relations_check(&d).unwrap().all_zero());
        }
        let so3 = load_lie("so3").unwrap();
        let kinv = invert_matrix(&killing_form(&so3)).unwrap();
        assert_eq!(kinv[0][0], qf(-1, 2));
    }

    #[test]
    fn heisenberg_is_rejected() {
        let err = cobracket_from_killing(&load_lie("heisenberg3").unwrap()).unwrap_err();
        assert!(matches!(err, Error::DegenerateKilling(_)));
        assert!(err.to_string().contains("Killing form degenerate"));
    }

    #[test]
    fn perturbed_cobracket_breaks_co_jacobi() {
        let mut d = cobracket_from_killing(&load_lie("sl2").unwrap()).unwrap();
        let (e, h) = (0, 2);
        d.cobracket.add_entry(vec![e, h], vec![e], Scalar::one());
        let report = dilie_relations_check(&d).unwrap();
        let cj = report.defects.iter().find(|(n, _)| *n == "co-Jacobi").unwrap();
        assert!(!cj.1.is_zero());
    }

    #[test]
    fn abelian_zero_cobracket_is_trivially_fine() {
        let l = parse_lie("dim 2\nnames x y\n").unwrap();
        for n in 0..4 {
            let d = DiLieData {
                space: l.bracket_map().space().clone(),
                n,
                bracket: l.bracket_map(),
                cobracket: MultiMap::zero(l.bracket_map().space().clone(), 1, 2, n),
            };
            assert!(dilie_relations_check(&d).unwrap().all_zero());
        }
    }

    #[test]
    fn malformed_lie_files_are_rejected() {
        assert!(matches!(parse_lie("dim 2\nnames x\n"), Err(Error::Dimension { .. })));
        assert!(matches!(parse_lie("names x\n"), Err(Error::Input(_))));
        // [x,y] = x, [x,z] = y, [y,z] = 0 violates Jacobi
        assert!(matches!(
            parse_lie("dim 3\nnames x y z\nbracket x y x 1\nbracket x z y 1\n"),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn degree_zero_components_match_lie_operads() {
        // diLie(j,1) and diLie(1,k) are the Lie operad and cooperad
        for (m, dim) in [(2, 1), (3, 2), (4, 6)] {
            assert_eq!(dilie_component(m, 1, 0).unwrap(), BTreeMap::from([(0, dim)]));
            assert_eq!(dilie_component(1, m, 0).unwrap(), BTreeMap::from([(0, dim)]));
        }
        // five trees; δ∘b equals both x·δ(y) and -y·δ(x), leaving three
        assert_eq!(dilie_component(2, 2, 0).unwrap(), BTreeMap::from([(0, 3)]));
    }

    #[test]
    fn hadamard_matches_for_small_degrees() {
        for n in 1..=3 {
            for row in hadamard_check(5, n).unwrap() {
                assert!(row.matches(), "{row:?}");
            }
        }
        assert!(matches!(hadamard_check(6, 1), Err(Error::Resource(_))));
    }

    #[test]
    fn tensor_actions_are_strict() {
        for (alg, lie) in [("s2", "sl2"), ("t2", "so3"), ("s3", "sl2"), ("cp2", "so3")] {
            let a = load_algebra(alg).unwrap().algebra;
            let t = tensor_action(&a, &load_lie(lie).unwrap()).unwrap();
            assert!(t.report.all_zero(), "{alg} ⊗ {lie}: {:?}", t.report);
            if let Some(h) = t.nonzero_homotopies {
                assert_eq!(h, 0);
            }
        }
    }

    #[test]
    fn point_tensor_recovers_killing_cobracket() {
        let l = load_lie("sl2").unwrap();
        let t = tensor_action(&load_algebra("pt").unwrap().algebra, &l).unwrap();
        let g = cobracket_from_killing(&l).unwrap();
        let strip = |m: &MultiMap| m.entries().iter().map(|(k, v)| (k.clone(), v.clone())).collect::<Vec<_>>();
        assert_eq!(strip(&t.data.cobracket), strip(&g.cobracket));
        assert_eq!(strip(&t.data.bracket), strip(&g.bracket));
    }
}
