//! The endomorphism properad of a finite graded space: multilinear maps
//! `V^⊗j -> V^⊗k`, composition along graphs, symmetric actions and the
//! commutator differential.
//!
//! Composition is evaluated as a contraction of super tensors. A map `f`
//! with entry `c` at outputs `(b_1..b_k)` and inputs `(a_1..a_j)` is the
//! word `c · e_{b_1} .. e_{b_k} e*_{a_j} .. e*_{a_1}` in which `e*_a` has
//! the parity of `e_a`. A network concatenates the words of its vertices
//! in vertex order, contracts every internal edge by moving `e*` next to
//! the matching `e` (Koszul sign) and pairing `e* e = 1`, then reorders
//! the remaining letters into the same standard shape. With vertex order
//! `(g, f)` this is plain composition `g ∘ f`; with order `(f, g)` and no
//! edges it is the Koszul tensor product `f ⊗ g`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{fmt_scalar, koszul_tensor, parse_scalar, GradedSpace, LinearMap, Scalar};
use crate::graph::{is_permutation, Decoration, DirectedGraph, Edge, Label, Port};

/// Tensor basis element of `V^⊗m`, one basis index per factor.
pub type Word = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMap {
    space: Arc<GradedSpace>,
    j: usize,
    k: usize,
    degree: i64,
    /// `(outputs, inputs) -> coefficient`; no stored zeros.
    entries: BTreeMap<(Word, Word), Scalar>,
}

pub fn tensor_degree(space: &GradedSpace, w: &[usize]) -> i64 {
    w.iter().map(|&i| space.degree(i)).sum()
}

/// Lexicographic index of a tensor basis element.
pub fn flatten(w: &[usize], dim: usize) -> usize {
    w.iter().fold(0, |acc, &i| acc * dim + i)
}

pub fn unflatten(mut idx: usize, len: usize, dim: usize) -> Word {
    let mut w = vec![0; len];
    for slot in w.iter_mut().rev() {
        *slot = idx % dim;
        idx /= dim;
    }
    w
}

/// All tensor basis elements of `V^⊗m` in lexicographic order.
pub fn all_words(dim: usize, m: usize) -> Vec<Word> {
    (0..dim.pow(m as u32)).map(|i| unflatten(i, m, dim)).collect()
}

impl MultiMap {
    pub fn new(
        space: Arc<GradedSpace>,
        j: usize,
        k: usize,
        degree: i64,
        entries: impl IntoIterator<Item = ((Word, Word), Scalar)>,
    ) -> Result<Self> {
        let mut m = MultiMap::zero(space, j, k, degree);
        for ((outs, ins), v) in entries {
            if outs.len() != k || ins.len() != j {
                return Err(Error::Dimension { expected: k + j, got: outs.len() + ins.len() });
            }
            if outs.iter().chain(&ins).any(|&i| i >= m.space.dim()) {
                return Err(Error::Input("basis index out of range".into()));
            }
            let d = tensor_degree(&m.space, &outs) - tensor_degree(&m.space, &ins);
            if d != degree && !v.is_zero() {
                return Err(Error::Invariant(format!("entry of degree {d} in a map of degree {degree}")));
            }
            m.add_entry(outs, ins, v);
        }
        Ok(m)
    }

    pub fn zero(space: Arc<GradedSpace>, j: usize, k: usize, degree: i64) -> Self {
        MultiMap { space, j, k, degree, entries: BTreeMap::new() }
    }

    pub fn identity(space: Arc<GradedSpace>) -> Self {
        let entries = (0..space.dim()).map(|i| ((vec![i], vec![i]), Scalar::from_integer(1.into())));
        MultiMap::new(space, 1, 1, 0, entries).expect("identity is homogeneous")
    }

    /// Map with a single entry one at `(outs, ins)`.
    pub fn elementary(space: Arc<GradedSpace>, outs: Word, ins: Word) -> Self {
        let degree = tensor_degree(&space, &outs) - tensor_degree(&space, &ins);
        let (j, k) = (ins.len(), outs.len());
        let mut m = MultiMap::zero(space, j, k, degree);
        m.add_entry(outs, ins, Scalar::from_integer(1.into()));
        m
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }
    pub fn arity(&self) -> (usize, usize) {
        (self.j, self.k)
    }
    pub fn degree(&self) -> i64 {
        self.degree
    }
    pub fn entries(&self) -> &BTreeMap<(Word, Word), Scalar> {
        &self.entries
    }
    pub fn entry(&self, outs: &[usize], ins: &[usize]) -> Scalar {
        self.entries.get(&(outs.to_vec(), ins.to_vec())).cloned().unwrap_or_else(Scalar::zero)
    }
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
    pub fn max_abs(&self) -> Scalar {
        self.entries.values().map(|v| v.abs()).max().unwrap_or_else(Scalar::zero)
    }

    pub fn add_entry(&mut self, outs: Word, ins: Word, v: Scalar) {
        if v.is_zero() {
            return;
        }
        let key = (outs, ins);
        let slot = self.entries.entry(key.clone()).or_insert_with(Scalar::zero);
        *slot += v;
        if slot.is_zero() {
            self.entries.remove(&key);
        }
    }

    fn check_same_shape(&self, other: &MultiMap) -> Result<()> {
        if self.space != other.space || (self.j, self.k) != (other.j, other.k) {
            return Err(Error::Composition("maps live in different components".into()));
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::Composition(format!("adding degrees {} and {}", self.degree, other.degree)));
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiMap) -> Result<MultiMap> {
        self.check_same_shape(other)?;
        let mut out = if self.is_zero() { other.clone() } else { self.clone() };
        if !self.is_zero() {
            for ((o, i), v) in &other.entries {
                out.add_entry(o.clone(), i.clone(), v.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiMap) -> Result<MultiMap> {
        self.add(&other.scale(&-Scalar::from_integer(1.into())))
    }

    pub fn scale(&self, s: &Scalar) -> MultiMap {
        let mut out = MultiMap::zero(self.space.clone(), self.j, self.k, self.degree);
        if !s.is_zero() {
            out.entries = self.entries.iter().map(|(key, v)| (key.clone(), v * s)).collect();
        }
        out
    }

    /// Matrix on the lexicographic tensor bases.
    pub fn to_linear(&self) -> LinearMap {
        let dim = self.space.dim();
        let mut lm = LinearMap::zero(self.space.tensor_power(self.j), self.space.tensor_power(self.k), self.degree);
        for ((o, i), v) in &self.entries {
            lm.add_entry(flatten(o, dim), flatten(i, dim), v.clone());
        }
        lm
    }

    pub fn from_linear(space: Arc<GradedSpace>, j: usize, k: usize, lm: &LinearMap) -> Result<MultiMap> {
        let dim = space.dim();
        let entries: Vec<_> = lm
            .entries()
            .map(|(&(r, c), v)| ((unflatten(r, k, dim), unflatten(c, j, dim)), v.clone()))
            .collect();
        MultiMap::new(space, j, k, lm.degree, entries)
    }

    /// Text form: a header line `multimap j k degree` and one line per
    /// entry `outs ins coefficient`, with tuples comma separated and `-`
    /// for the empty tuple.
    pub fn to_text(&self) -> String {
        let tup = |w: &Word| {
            if w.is_empty() {
                "-".to_string()
            } else {
                w.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
            }
        };
        let mut s = format!("multimap {} {} {}\n", self.j, self.k, self.degree);
        for ((o, i), v) in &self.entries {
            s.push_str(&format!("{} {} {}\n", tup(o), tup(i), fmt_scalar(v)));
        }
        s
    }

    pub fn from_text(space: Arc<GradedSpace>, text: &str) -> Result<MultiMap> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Input("empty multimap".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 || h[0] != "multimap" {
            return Err(Error::Input(format!("bad multimap header `{header}`")));
        }
        let num = |s: &str| s.parse::<i64>().map_err(|_| Error::Input(format!("bad number `{s}`")));
        let (j, k, degree) = (num(h[1])? as usize, num(h[2])? as usize, num(h[3])?);
        let tup = |s: &str| -> Result<Word> {
            if s == "-" {
                return Ok(vec![]);
            }
            s.split(',').map(|x| x.parse().map_err(|_| Error::Input(format!("bad index `{x}`")))).collect()
        };
        let mut entries = Vec::new();
        for l in lines {
            let p: Vec<&str> = l.split_whitespace().collect();
            if p.len() != 3 {
                return Err(Error::Input(format!("bad multimap entry `{l}`")));
            }
            entries.push(((tup(p[0])?, tup(p[1])?), parse_scalar(p[2])?));
        }
        MultiMap::new(space, j, k, degree, entries)
    }
}

impl fmt::Display for MultiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |w: &Word| {
            if w.is_empty() {
                "1".to_string()
            } else {
                w.iter().map(|&i| self.space.name(i)).collect::<Vec<_>>().join("⊗")
            }
        };
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .entries
            .iter()
            .map(|((o, i), v)| format!("{}·[{} <- {}]", fmt_scalar(v), name(o), name(i)))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// One letter of a super word: `e_b` or `e*_b`, tagged by its wire.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Letter {
    wire: usize,
    dual: bool,
    basis: usize,
}

/// Evaluates the network given by `graph` whose vertex `v` carries
/// `maps[v]`. Vertices are concatenated in index order.
pub fn evaluate_network<D: Decoration>(graph: &DirectedGraph<D>, maps: &[&MultiMap]) -> Result<MultiMap> {
    if maps.len() != graph.num_vertices() {
        return Err(Error::Dimension { expected: graph.num_vertices(), got: maps.len() });
    }
    let space = maps
        .first()
        .map(|m| m.space.clone())
        .ok_or_else(|| Error::Composition("empty network".into()))?;
    for (v, m) in maps.iter().enumerate() {
        if m.space != space {
            return Err(Error::Composition("maps on different spaces".into()));
        }
        if m.arity() != graph.vertices()[v].arity() {
            return Err(Error::Composition(format!(
                "vertex {v} has arity {:?} but its map has {:?}",
                graph.vertices()[v].arity(),
                m.arity()
            )));
        }
    }
    contract_network(graph.edges(), graph.inputs(), graph.outputs(), maps, space)
}

/// Contraction of a possibly disconnected network; arities are assumed to
/// match the ports used.
fn contract_network(
    edges: &[Edge],
    inputs: &[Port],
    outputs: &[Port],
    maps: &[&MultiMap],
    space: Arc<GradedSpace>,
) -> Result<MultiMap> {
    let (j, k) = (inputs.len(), outputs.len());
    let degree: i64 = maps.iter().map(|m| m.degree).sum();
    let parity = |b: usize| space.degree(b).rem_euclid(2) as usize;

    // Wires: internal edges first, then input legs, then output legs.
    let ne = edges.len();
    let mut in_wire: BTreeMap<Port, usize> = BTreeMap::new();
    let mut out_wire: BTreeMap<Port, usize> = BTreeMap::new();
    for (w, e) in edges.iter().enumerate() {
        out_wire.insert(e.from, w);
        in_wire.insert(e.to, w);
    }
    for (i, &p) in inputs.iter().enumerate() {
        in_wire.insert(p, ne + i);
    }
    for (i, &p) in outputs.iter().enumerate() {
        out_wire.insert(p, ne + j + i);
    }

    let one = Scalar::from_integer(1.into());
    let mut states: BTreeMap<Vec<Letter>, Scalar> = BTreeMap::from([(vec![], one)]);
    for (v, m) in maps.iter().enumerate() {
        let (vj, vk) = m.arity();
        let outs_w: Vec<usize> = (0..vk).map(|p| out_wire[&Port::new(v, p)]).collect();
        let ins_w: Vec<usize> = (0..vj).map(|p| in_wire[&Port::new(v, p)]).collect();
        let mut next: BTreeMap<Vec<Letter>, Scalar> = BTreeMap::new();
        for (word, c) in &states {
            'entry: for ((o, i), val) in &m.entries {
                // Letters already open on this vertex's wires fix the basis.
                for l in word {
                    let clash = if l.dual {
                        outs_w.iter().position(|&w| w == l.wire).is_some_and(|p| o[p] != l.basis)
                    } else {
                        ins_w.iter().position(|&w| w == l.wire).is_some_and(|p| i[p] != l.basis)
                    };
                    if clash {
                        continue 'entry;
                    }
                }
                let mut w = word.clone();
                for (p, &b) in o.iter().enumerate() {
                    w.push(Letter { wire: outs_w[p], dual: false, basis: b });
                }
                for (p, &a) in i.iter().enumerate().rev() {
                    w.push(Letter { wire: ins_w[p], dual: true, basis: a });
                }
                let mut odd = false;
                for wire in (0..ne).filter(|&e| outs_w.contains(&e) || ins_w.contains(&e)) {
                    let pe = w.iter().position(|l| l.wire == wire && !l.dual);
                    let pd = w.iter().position(|l| l.wire == wire && l.dual);
                    let (Some(pe), Some(pd)) = (pe, pd) else { continue };
                    // move e* to just before e, then drop the pair
                    let jumped: usize = if pd > pe {
                        w[pe..pd].iter().map(|l| parity(l.basis)).sum()
                    } else {
                        w[pd + 1..pe].iter().map(|l| parity(l.basis)).sum()
                    };
                    odd ^= (parity(w[pd].basis) * jumped) % 2 == 1;
                    let (hi, lo) = if pd > pe { (pd, pe) } else { (pe, pd) };
                    w.remove(hi);
                    w.remove(lo);
                }
                let mut val = c * val;
                if odd {
                    val = -val;
                }
                let slot = next.entry(w).or_insert_with(Scalar::zero);
                *slot += val;
            }
        }
        next.retain(|_, v| !v.is_zero());
        states = next;
    }

    let mut out = MultiMap::zero(space.clone(), j, k, degree);
    for (word, c) in states {
        // target: outputs in leg order, then inputs in reverse leg order
        let rank = |l: &Letter| -> usize {
            if l.dual {
                let leg = l.wire - ne;
                k + (j - 1 - leg)
            } else {
                l.wire - ne - j
            }
        };
        let mut odd = false;
        for a in 0..word.len() {
            for b in a + 1..word.len() {
                if rank(&word[a]) > rank(&word[b]) && parity(word[a].basis) * parity(word[b].basis) == 1 {
                    odd = !odd;
                }
            }
        }
        let mut outs = vec![0; k];
        let mut ins = vec![0; j];
        for l in &word {
            if l.dual {
                ins[l.wire - ne] = l.basis;
            } else {
                outs[l.wire - ne - j] = l.basis;
            }
        }
        out.add_entry(outs, ins, if odd { -c } else { c });
    }
    Ok(out)
}

/// `lower ∘ (uppers)` where `matching[t]` is the input of `lower` fed by
/// the `t`-th output of the uppers (in order).
pub fn end_compose(uppers: &[&MultiMap], lower: &MultiMap, matching: &[usize]) -> Result<MultiMap> {
    let ktot: usize = uppers.iter().map(|m| m.k).sum();
    if ktot != lower.j {
        return Err(Error::Composition(format!("{ktot} outputs cannot feed {} inputs", lower.j)));
    }
    if !is_permutation(matching, ktot) {
        return Err(Error::Composition("matching is not a bijection".into()));
    }
    let mut verts = vec![Label::new("lower", lower.j, lower.k)];
    verts.extend(uppers.iter().map(|m| Label::new("upper", m.j, m.k)));
    let mut edges = Vec::new();
    let mut inputs = Vec::new();
    let mut t = 0;
    for (u, m) in uppers.iter().enumerate() {
        inputs.extend((0..m.j).map(|p| Port::new(u + 1, p)));
        for p in 0..m.k {
            edges.push(Edge { from: Port::new(u + 1, p), to: Port::new(0, matching[t]) });
            t += 1;
        }
    }
    let outputs = (0..lower.k).map(|p| Port::new(0, p)).collect();
    let graph = DirectedGraph::new(verts, edges, inputs, outputs).map_err(|e| Error::Composition(e.to_string()))?;
    let mut maps = vec![lower];
    maps.extend(uppers.iter().copied());
    evaluate_network(&graph, &maps)
}

/// Koszul tensor product `f ⊗ g`.
pub fn end_tensor(f: &MultiMap, g: &MultiMap) -> Result<MultiMap> {
    if f.space != g.space {
        return Err(Error::Composition("maps on different spaces".into()));
    }
    let inputs: Vec<Port> = (0..f.j).map(|p| Port::new(0, p)).chain((0..g.j).map(|p| Port::new(1, p))).collect();
    let outputs: Vec<Port> = (0..f.k).map(|p| Port::new(0, p)).chain((0..g.k).map(|p| Port::new(1, p))).collect();
    contract_network(&[], &inputs, &outputs, &[f, g], f.space.clone())
}

/// Permutes legs: new input `i` is old input `sigma[i]`, new output `i` is
/// old output `tau[i]`, with the Koszul sign of the reordering.
pub fn sym_act(sigma: &[usize], f: &MultiMap, tau: &[usize]) -> Result<MultiMap> {
    let g = DirectedGraph::corolla(Label::new("f", f.j, f.k)).permute_legs(sigma, tau)?;
    evaluate_network(&g, &[f])
}

/// The differential of `V^⊗m` built from `d` by Koszul tensoring with
/// identities.
pub fn tensor_differential(d: &LinearMap, m: usize) -> LinearMap {
    let space = &d.source;
    if m == 0 {
        let one = space.tensor_power(0);
        return LinearMap::zero(one.clone(), one, d.degree);
    }
    let id = LinearMap::identity(space);
    let mut total: Option<LinearMap> = None;
    for pos in 0..m {
        let mut acc: Option<LinearMap> = None;
        for t in 0..m {
            let factor = if t == pos { d } else { &id };
            acc = Some(match acc {
                None => factor.clone(),
                Some(a) => koszul_tensor(&a, factor),
            });
        }
        let term = acc.unwrap();
        total = Some(match total {
            None => term,
            Some(t) => t.add(&term).expect("same shape"),
        });
    }
    total.unwrap()
}

/// `d ∘ f - (-1)^{|f|} f ∘ d` on `End(V^⊗j, V^⊗k)`.
pub fn end_differential(f: &MultiMap, d: &LinearMap) -> Result<MultiMap> {
    if d.source != *f.space || d.target != *f.space || d.degree != 1 {
        return Err(Error::Composition("differential must be a degree +1 endomorphism of V".into()));
    }
    let lf = f.to_linear();
    let dk = tensor_differential(d, f.k);
    let dj = tensor_differential(d, f.j);
    let left = dk.compose(&lf)?;
    let right = lf.compose(&dj)?;
    let right = if f.degree.rem_euclid(2) == 1 { right } else { right.scale(&-Scalar::from_integer(1.into())) };
    let total = left.add(&right)?;
    MultiMap::from_linear(f.space.clone(), f.j, f.k, &total)
}

/// Basis pairs `(outs, ins)` of `End(V^⊗j, V^⊗k)` in the given degree.
pub fn basis_in_degree(space: &GradedSpace, j: usize, k: usize, degree: i64) -> Vec<(Word, Word)> {
    let ins = all_words(space.dim(), j);
    let outs = all_words(space.dim(), k);
    let mut out = Vec::new();
    for o in &outs {
        let od = tensor_degree(space, o);
        for i in &ins {
            if od - tensor_degree(space, i) == degree {
                out.push((o.clone(), i.clone()));
            }
        }
    }
    out
}
