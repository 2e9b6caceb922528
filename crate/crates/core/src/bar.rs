//! The cobar construction on the bar construction of the positive-arity
//! Frobenius properad, as a complex spanned by two-level graphs.
//!
//! A basis element is an inner graph decorated by Frobenius basis elements
//! (both arities positive, identity excluded) together with a partition of
//! its vertices into blocks. Each block is a connected inner graph, an
//! element of the bar construction, and the blocks form the outer graph.
//! Degrees are cohomological: every inner vertex carries an odd symbol of
//! degree -1 and every block an odd symbol of degree +1, so
//! `degree = Σ deg(v) - weight + #blocks`. An orientation is an ordering of
//! these symbols; reordering multiplies by the sign of the permutation.
//!
//! The bar part `d` contracts two adjacent vertices of a block (all edges
//! between them at once) after moving `s_u s_v` to the front and replacing
//! it by `s_uv`. The cobar part `∂` splits a block into an upper and a lower
//! connected piece after moving `s_B` to the front and replacing it by
//! `s_lower s_upper`. The degree parameter must be even, so decorations
//! never contribute signs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{homology, ChainComplex, GradedSpace, LinearMap, Scalar};
use crate::frob::{contractible_pairs, FrobBasisElement};
use crate::graph::{connected_subset, normalize_blocks, permutation_sign, Skeleton};

pub const MAX_TRUNCATION_WEIGHT: usize = 3;
pub const MAX_TRUNCATION_LEGS: usize = 4;

/// Odd symbol of an orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    /// Inner vertex, degree -1.
    V(usize),
    /// Block, degree +1.
    B(usize),
}

/// Inner graph with blocks and an explicit orientation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Oriented {
    pub sk: Skeleton<FrobBasisElement>,
    pub orient: Vec<Sym>,
}

/// Canonical key: canonical skeleton with blocks, read with the standard
/// orientation.
pub type CobarKey = Skeleton<FrobBasisElement>;

fn blocks_of(sk: &Skeleton<FrobBasisElement>) -> &[usize] {
    sk.blocks.as_deref().expect("cobar skeletons carry blocks")
}

pub fn num_blocks(sk: &Skeleton<FrobBasisElement>) -> usize {
    blocks_of(sk).iter().max().map_or(0, |m| m + 1)
}

/// Block symbol followed by its vertices, blocks in id order.
pub fn standard_orientation(sk: &Skeleton<FrobBasisElement>) -> Vec<Sym> {
    let b = blocks_of(sk);
    let mut out = Vec::new();
    for id in 0..num_blocks(sk) {
        out.push(Sym::B(id));
        out.extend((0..b.len()).filter(|&v| b[v] == id).map(Sym::V));
    }
    out
}

/// Sign of the permutation taking `from` to `to` (both orderings of the
/// same odd symbols).
fn reorder_sign(from: &[Sym], to: &[Sym]) -> i64 {
    let pos: BTreeMap<Sym, usize> = to.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let perm: Vec<usize> = from.iter().map(|s| pos[s]).collect();
    permutation_sign(&perm)
}

pub fn total_genus(sk: &Skeleton<FrobBasisElement>) -> usize {
    sk.decos.iter().map(|d| d.g).sum::<usize>() + sk.loop_genus()
}

pub fn weight(sk: &Skeleton<FrobBasisElement>) -> usize {
    sk.num_vertices()
}

pub fn cobar_degree(sk: &Skeleton<FrobBasisElement>) -> i64 {
    let dec: i64 = sk.decos.iter().map(|d| d.degree).sum();
    dec - sk.num_vertices() as i64 + num_blocks(sk) as i64
}

impl Oriented {
    pub fn standard(sk: Skeleton<FrobBasisElement>) -> Self {
        let orient = standard_orientation(&sk);
        Oriented { sk, orient }
    }

    /// Single-block element of the bar construction.
    pub fn bar(mut sk: Skeleton<FrobBasisElement>) -> Self {
        sk.blocks = Some(vec![0; sk.num_vertices()]);
        Oriented::standard(sk)
    }

    pub fn degree(&self) -> i64 {
        cobar_degree(&self.sk)
    }

    /// Relabels legs: new input `i` is old input `sigma[i]`, likewise outputs.
    pub fn permute_legs(&self, sigma: &[usize], tau: &[usize]) -> Oriented {
        let mut x = self.clone();
        x.sk.inputs = sigma.iter().map(|&i| self.sk.inputs[i]).collect();
        x.sk.outputs = tau.iter().map(|&i| self.sk.outputs[i]).collect();
        x
    }

    /// Applies a vertex relabeling `old -> new`, carrying the orientation.
    pub fn relabel(&self, perm: &[usize]) -> Oriented {
        let sk = self.sk.relabel(perm);
        let old_blocks = blocks_of(&self.sk);
        let new_blocks = blocks_of(&sk);
        let orient = self
            .orient
            .iter()
            .map(|s| match *s {
                Sym::V(v) => Sym::V(perm[v]),
                Sym::B(b) => {
                    let v = old_blocks.iter().position(|&x| x == b).expect("blocks are nonempty");
                    Sym::B(new_blocks[perm[v]])
                }
            })
            .collect();
        Oriented { sk, orient }
    }

    /// `self = sign · (key read with the standard orientation)`, or `None`
    /// when an automorphism reverses the orientation (the element is zero).
    pub fn canonicalize(&self, legs_ordered: bool) -> Option<(CobarKey, i64)> {
        let canon = self.sk.canonize(legs_ordered);
        let mut sign = None;
        for perm in &canon.relabelings {
            let mut r = self.relabel(perm);
            if !legs_ordered {
                r.sk.inputs.sort();
                r.sk.outputs.sort();
            }
            debug_assert_eq!(r.sk, canon.skeleton);
            let s = reorder_sign(&r.orient, &standard_orientation(&r.sk));
            match sign {
                None => sign = Some(s),
                Some(t) if t != s => return None,
                _ => {}
            }
        }
        Some((canon.skeleton, sign.expect("identity-like relabeling exists")))
    }
}

impl fmt::Display for Oriented {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = blocks_of(&self.sk);
        for id in 0..num_blocks(&self.sk) {
            let vs: Vec<String> = (0..b.len())
                .filter(|&v| b[v] == id)
                .map(|v| format!("v{v}{}", self.sk.decos[v]))
                .collect();
            write!(f, "[{}]", vs.join(" "))?;
        }
        write!(f, " edges {:?} in {:?} out {:?}", self.sk.edges, self.sk.inputs, self.sk.outputs)
    }
}

/// Formal combination of canonical basis elements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CobarElement {
    pub terms: BTreeMap<CobarKey, Scalar>,
}

impl CobarElement {
    pub fn basis(key: CobarKey) -> Self {
        CobarElement { terms: BTreeMap::from([(key, Scalar::from_integer(1.into()))]) }
    }

    pub fn from_oriented(x: &Oriented) -> Self {
        let mut e = CobarElement::default();
        e.add_oriented(x, 1);
        e
    }

    pub fn add_oriented(&mut self, x: &Oriented, coef: i64) {
        if let Some((key, s)) = x.canonicalize(true) {
            self.add(key, Scalar::from_integer((s * coef).into()));
        }
    }

    pub fn add(&mut self, key: CobarKey, v: Scalar) {
        if v.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *slot += v;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &CobarElement, s: &Scalar) {
        for (k, v) in &other.terms {
            self.add(k.clone(), v * s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `coefficient` then the blocks and inner graph of each term, in
    /// canonical order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.terms {
            s.push_str(&format!("{} {}\n", crate::exact::fmt_scalar(v), Oriented::standard(k.clone())));
        }
        s
    }
}

/// Contracts adjacent `u -> v` (same block) into one vertex kept at `u`'s
/// index with `v` removed.
fn contract(x: &Oriented, u: usize, v: usize) -> Oriented {
    let s = &x.sk;
    let m = s.edges.iter().filter(|&&e| e == (u, v)).count();
    let (a, b) = (s.decos[u], s.decos[v]);
    let merged = FrobBasisElement {
        j: a.j + b.j - m,
        k: a.k + b.k - m,
        g: a.g + b.g + m - 1,
        n: a.n,
        degree: a.degree + b.degree,
    };
    let map = |w: usize| -> usize {
        let w = if w == v { u } else { w };
        if w > v { w - 1 } else { w }
    };
    let mut decos = s.decos.clone();
    decos[u] = merged;
    decos.remove(v);
    let mut edges: Vec<_> = s.edges.iter().filter(|&&e| e != (u, v)).map(|&(p, q)| (map(p), map(q))).collect();
    edges.sort();
    let mut blocks = blocks_of(s).to_vec();
    blocks.remove(v);
    let sk = Skeleton {
        decos,
        edges,
        inputs: s.inputs.iter().map(|&w| map(w)).collect(),
        outputs: s.outputs.iter().map(|&w| map(w)).collect(),
        blocks: Some(blocks),
    };
    let mut orient = x.orient.clone();
    orient.retain(|&t| t != Sym::V(u) && t != Sym::V(v));
    let orient = std::iter::once(Sym::V(map(u)))
        .chain(orient.into_iter().map(|t| match t {
            Sym::V(w) => Sym::V(map(w)),
            b => b,
        }))
        .collect();
    Oriented { sk, orient }
}

/// Sign of moving `s_u s_v` (in that order) to the front.
fn front_pair_sign(orient: &[Sym], a: Sym, b: Sym) -> i64 {
    let pa = orient.iter().position(|&s| s == a).unwrap();
    let pb = orient.iter().position(|&s| s == b).unwrap();
    // after moving a to the front, b sits at pb + 1 if it was before a
    let pb_after = if pb < pa { pb + 1 } else { pb };
    let e = pa + (pb_after - 1);
    if e % 2 == 0 { 1 } else { -1 }
}

/// Bar part of the differential: all contractions inside blocks.
pub fn bar_terms(x: &Oriented) -> Vec<(Oriented, i64)> {
    let blocks = blocks_of(&x.sk);
    contractible_pairs(&x.sk)
        .into_iter()
        .filter(|&(u, v)| blocks[u] == blocks[v])
        .map(|(u, v)| (contract(x, u, v), front_pair_sign(&x.orient, Sym::V(u), Sym::V(v))))
        .collect()
}

fn quotient_is_acyclic(sk: &Skeleton<FrobBasisElement>, blocks: &[usize]) -> bool {
    let nb = blocks.iter().max().map_or(0, |m| m + 1);
    let q = Skeleton::<FrobBasisElement> {
        decos: vec![sk.decos[0]; nb],
        edges: sk
            .edges
            .iter()
            .filter(|&&(s, t)| blocks[s] != blocks[t])
            .map(|&(s, t)| (blocks[s], blocks[t]))
            .collect(),
        inputs: vec![],
        outputs: vec![],
        blocks: None,
    };
    q.is_acyclic()
}

/// Cobar part of the differential: all splittings of one block into an
/// upper and a lower connected piece.
pub fn cobar_terms(x: &Oriented) -> Vec<(Oriented, i64)> {
    let blocks = blocks_of(&x.sk);
    let nb = num_blocks(&x.sk);
    let mut out = Vec::new();
    for b in 0..nb {
        let members: Vec<usize> = (0..blocks.len()).filter(|&v| blocks[v] == b).collect();
        if members.len() < 2 {
            continue;
        }
        for mask in 1..(1u32 << members.len()) - 1 {
            let upper: Vec<usize> = members.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
            let lower: Vec<usize> = members.iter().copied().filter(|v| !upper.contains(v)).collect();
            if !connected_subset(&x.sk.edges, &upper) || !connected_subset(&x.sk.edges, &lower) {
                continue;
            }
            if x.sk.edges.iter().any(|&(s, t)| lower.contains(&s) && upper.contains(&t)) {
                continue;
            }
            let mut nbk: Vec<usize> = blocks.to_vec();
            for &v in &lower {
                nbk[v] = nb;
            }
            if !quotient_is_acyclic(&x.sk, &nbk) {
                continue;
            }
            let normalized = normalize_blocks(&nbk);
            let id = |old: usize| -> usize {
                let v = nbk.iter().position(|&t| t == old).unwrap();
                normalized[v]
            };
            let pos = x.orient.iter().position(|&s| s == Sym::B(b)).unwrap();
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            let mut orient = vec![Sym::B(id(nb)), Sym::B(id(b))];
            orient.extend(x.orient.iter().filter(|&&s| s != Sym::B(b)).map(|&s| match s {
                Sym::B(c) => Sym::B(id(c)),
                v => v,
            }));
            let mut sk = x.sk.clone();
            sk.blocks = Some(normalized);
            out.push((Oriented { sk, orient }, sign));
        }
    }
    out
}

fn collect(terms: Vec<(Oriented, i64)>) -> CobarElement {
    let mut e = CobarElement::default();
    for (t, s) in terms {
        e.add_oriented(&t, s);
    }
    e
}

fn linear(x: &CobarElement, f: impl Fn(&Oriented) -> Vec<(Oriented, i64)>) -> CobarElement {
    let mut out = CobarElement::default();
    for (k, v) in &x.terms {
        out.add_scaled(&collect(f(&Oriented::standard(k.clone()))), v);
    }
    out
}

/// Edge-contraction part `d`.
pub fn bar_differential(x: &CobarElement) -> CobarElement {
    linear(x, bar_terms)
}

/// Splitting part `∂`.
pub fn cobar_differential(x: &CobarElement) -> CobarElement {
    linear(x, cobar_terms)
}

/// `d_P + d + ∂`; the internal differential of the Frobenius properad is zero.
pub fn total_differential(x: &CobarElement) -> CobarElement {
    linear(x, |o| {
        let mut t = bar_terms(o);
        t.extend(cobar_terms(o));
        t
    })
}

fn check_even(n: i64) -> Result<()> {
    if n.rem_euclid(2) != 0 {
        return Err(Error::OutOfRange(format!(
            "the cobar complex is built for even degree parameters; n = {n} is odd"
        )));
    }
    Ok(())
}

/// Every inner graph with `weight` vertices, `j` inputs, `k` outputs and
/// total genus `genus`, decorated by positive-arity Frobenius elements
/// other than the identity; one per isomorphism class (legs ordered, or
/// up to leg permutations when `legs_ordered` is false).
pub fn enumerate_inner(
    j: usize,
    k: usize,
    weight: usize,
    genus: usize,
    n: i64,
    legs_ordered: bool,
) -> Result<Vec<Skeleton<FrobBasisElement>>> {
    if weight == 0 || weight > crate::graph::MAX_ENUMERATION_VERTICES {
        return Err(Error::Resource(format!("inner weight {weight} out of range")));
    }
    let w = weight;
    let mut found = BTreeSet::new();
    let leg_lists = |m: usize| -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|t: Vec<usize>| {
                    let lo = if legs_ordered { 0 } else { t.last().copied().unwrap_or(0) };
                    (lo..w).map(move |v| {
                        let mut t2 = t.clone();
                        t2.push(v);
                        t2
                    })
                })
                .collect();
        }
        out
    };
    let pairs: Vec<(usize, usize)> = (0..w).flat_map(|a| (0..w).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let ins_all = leg_lists(j);
    let outs_all = leg_lists(k);
    for loops in 0..=genus {
        let ne = w - 1 + loops;
        for edges in multisets_of(&pairs, ne) {
            let shape = Skeleton::<FrobBasisElement> {
                decos: vec![FrobBasisElement::identity(n); w],
                edges: edges.clone(),
                inputs: vec![],
                outputs: vec![],
                blocks: None,
            };
            if !shape.is_connected() || !shape.is_acyclic() {
                continue;
            }
            for ins in &ins_all {
                for outs in &outs_all {
                    let arity: Vec<(usize, usize)> = (0..w)
                        .map(|v| {
                            let jv = ins.iter().filter(|&&x| x == v).count() + edges.iter().filter(|e| e.1 == v).count();
                            let kv = outs.iter().filter(|&&x| x == v).count() + edges.iter().filter(|e| e.0 == v).count();
                            (jv, kv)
                        })
                        .collect();
                    if arity.iter().any(|&(a, b)| a == 0 || b == 0) {
                        continue;
                    }
                    for gs in compositions(genus - loops, w) {
                        if (0..w).any(|v| arity[v] == (1, 1) && gs[v] == 0) {
                            continue;
                        }
                        let decos = (0..w)
                            .map(|v| FrobBasisElement::new(arity[v].0, arity[v].1, gs[v], n).expect("positive arity"))
                            .collect();
                        let sk = Skeleton { decos, edges: edges.clone(), inputs: ins.clone(), outputs: outs.clone(), blocks: None };
                        found.insert(sk.canonize(legs_ordered).skeleton);
                    }
                }
            }
        }
    }
    Ok(found.into_iter().collect())
}

fn multisets_of<T: Clone>(items: &[T], m: usize) -> Vec<Vec<T>> {
    fn go<T: Clone>(items: &[T], m: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            go(items, m, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, m, 0, &mut Vec::new(), &mut out);
    out
}

/// All ways to write `total` as an ordered sum of `parts` non-negative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Partitions of the vertices into connected blocks with an acyclic
/// quotient, as normalized block labelings.
pub fn block_partitions(sk: &Skeleton<FrobBasisElement>) -> Vec<Vec<usize>> {
    fn go(v: usize, n: usize, cur: &mut Vec<usize>, nb: usize, out: &mut Vec<Vec<usize>>) {
        if v == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=nb {
            cur.push(b);
            go(v + 1, n, cur, nb.max(b + 1), out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    go(0, sk.num_vertices(), &mut Vec::new(), 0, &mut all);
    all.into_iter()
        .filter(|p| {
            let nb = p.iter().max().map_or(0, |m| m + 1);
            (0..nb).all(|b| {
                let members: Vec<usize> = (0..p.len()).filter(|&v| p[v] == b).collect();
                connected_subset(&sk.edges, &members)
            }) && quotient_is_acyclic(sk, p)
        })
        .collect()
}

/// Canonical basis of the component `(j, k)` at total genus `genus`, up
/// to `max_weight` inner vertices, excluding elements killed by an
/// orientation-reversing automorphism.
pub fn cobar_basis(j: usize, k: usize, genus: usize, max_weight: usize, n: i64) -> Result<Vec<CobarKey>> {
    check_even(n)?;
    let mut keys = BTreeSet::new();
    for w in 1..=max_weight {
        for inner in enumerate_inner(j, k, w, genus, n, true)? {
            for p in block_partitions(&inner) {
                let mut sk = inner.clone();
                sk.blocks = Some(p);
                if let Some((key, _)) = Oriented::standard(sk).canonicalize(true) {
                    keys.insert(key);
                }
            }
        }
    }
    Ok(keys.into_iter().collect())
}

/// A weight-truncated component with its differential matrix.
#[derive(Clone, Debug)]
pub struct TruncatedComplex {
    pub j: usize,
    pub k: usize,
    pub max_weight: usize,
    pub max_genus: usize,
    pub basis: Vec<CobarKey>,
    pub complex: ChainComplex,
    /// Genera whose whole component fits under the weight bound; homology
    /// is only meaningful there.
    pub complete_genera: Vec<usize>,
}

/// Largest inner weight in the component `(j, k)` at genus `g`.
pub fn max_weight_of(j: usize, k: usize, g: usize) -> usize {
    j + k + 2 * g - 2
}

/// Assembles `Ω(B(Frob⁺))(j,k)` for genera `0..=max_genus` and weights up
/// to `max_weight`. Weight truncation is a subcomplex because `d` lowers
/// weight and `∂` keeps it.
pub fn truncated_complex(j: usize, k: usize, max_weight: usize, max_genus: usize, n: i64) -> Result<TruncatedComplex> {
    check_bounds(j, k, max_weight)?;
    let mut basis = Vec::new();
    for g in 0..=max_genus {
        basis.extend(cobar_basis(j, k, g, max_weight, n)?);
    }
    basis.sort_by_key(cobar_degree);
    let index: BTreeMap<&CobarKey, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let space = GradedSpace::from_degrees(&basis.iter().map(cobar_degree).collect::<Vec<_>>());
    let mut entries = Vec::new();
    for (c, b) in basis.iter().enumerate() {
        for (t, v) in total_differential(&CobarElement::basis(b.clone())).terms {
            let r = *index
                .get(&t)
                .ok_or_else(|| Error::Invariant("differential left the truncation".into()))?;
            entries.push(((r, c), v));
        }
    }
    let d = LinearMap::new(space.clone(), space.clone(), 1, entries)?;
    let complex = ChainComplex::new(space, d)?;
    let complete_genera = (0..=max_genus).filter(|&g| max_weight >= max_weight_of(j, k, g)).collect();
    Ok(TruncatedComplex { j, k, max_weight, max_genus, basis, complex, complete_genera })
}

impl TruncatedComplex {
    /// Betti numbers by degree restricted to one genus.
    pub fn betti_by_degree(&self, genus: usize) -> BTreeMap<i64, usize> {
        // The differential preserves genus, so restrict to that block.
        let idx: Vec<usize> = (0..self.basis.len()).filter(|&i| total_genus(&self.basis[i]) == genus).collect();
        let pos: BTreeMap<usize, usize> = idx.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let degs: Vec<i64> = idx.iter().map(|&i| cobar_degree(&self.basis[i])).collect();
        let space = GradedSpace::from_degrees(&degs);
        let entries: Vec<_> = self
            .complex
            .differential()
            .entries()
            .filter_map(|(&(r, c), v)| Some(((*pos.get(&r)?, *pos.get(&c)?), v.clone())))
            .collect();
        let d = LinearMap::new(space.clone(), space.clone(), 1, entries).expect("restriction is homogeneous");
        let cx = ChainComplex::new(space, d).expect("restriction of a complex");
        let mut out = BTreeMap::new();
        for deg in degs.iter().copied().collect::<BTreeSet<_>>() {
            let b = homology(&cx, deg).betti;
            if b > 0 {
                out.insert(deg, b);
            }
        }
        out
    }
}

/// Result of checking `(d + ∂)² = 0` basis element by basis element.
#[derive(Clone, Debug, Default)]
pub struct SquareAudit {
    pub checked: usize,
    pub failures: Vec<String>,
}

fn check_bounds(j: usize, k: usize, max_weight: usize) -> Result<()> {
    if max_weight > MAX_TRUNCATION_WEIGHT || j + k > MAX_TRUNCATION_LEGS {
        return Err(Error::Resource(format!(
            "truncation is limited to weight {MAX_TRUNCATION_WEIGHT} and j + k <= {MAX_TRUNCATION_LEGS}"
        )));
    }
    if j == 0 || k == 0 {
        return Err(Error::OutOfRange("components need j, k > 0".into()));
    }
    Ok(())
}

/// Checks `(d + ∂)²`, `d²`, `∂²` and the weight statements on every basis
/// element with `j + k <= max_legs`, weight up to `max_weight` and total
/// genus up to `max_genus`.
pub fn audit_square(max_legs: usize, max_weight: usize, max_genus: usize, n: i64) -> Result<SquareAudit> {
    let mut audit = SquareAudit::default();
    for j in 1..max_legs {
        for k in 1..=max_legs - j {
            let part = audit_component(j, k, max_weight, max_genus, n)?;
            audit.checked += part.checked;
            audit.failures.extend(part.failures);
        }
    }
    Ok(audit)
}

/// The same audit restricted to the single component `(j, k)`.
pub fn audit_component(j: usize, k: usize, max_weight: usize, max_genus: usize, n: i64) -> Result<SquareAudit> {
    check_bounds(j, k, max_weight)?;
    check_even(n)?;
    let mut audit = SquareAudit::default();
    for g in 0..=max_genus {
        for b in cobar_basis(j, k, g, max_weight, n)? {
            audit.checked += 1;
            let x = CobarElement::basis(b.clone());
            let (w, nb) = (weight(&b), num_blocks(&b));
            let dx = bar_differential(&x);
            let px = cobar_differential(&x);
            for t in dx.terms.keys() {
                if weight(t) + 1 != w || num_blocks(t) != nb {
                    audit.failures.push(format!("d changed weights wrongly on {}", Oriented::standard(b.clone())));
                }
            }
            for t in px.terms.keys() {
                if weight(t) != w || num_blocks(t) != nb + 1 {
                    audit.failures.push(format!("∂ changed weights wrongly on {}", Oriented::standard(b.clone())));
                }
            }
            for (name, sq) in [
                ("(d+∂)²", total_differential(&total_differential(&x))),
                ("d²", bar_differential(&dx)),
                ("∂²", cobar_differential(&px)),
            ] {
                if !sq.is_zero() {
                    audit.failures.push(format!("{name} ≠ 0 on {}", Oriented::standard(b.clone())));
                }
            }
        }
    }
    Ok(audit)
}
