//! Connected directed acyclic graphs with ordered legs and decorated vertices.
//!
//! A [`DirectedGraph`] is the port-level object: every vertex has numbered
//! in-ports and out-ports, each used exactly once by an internal edge or a
//! global leg. Isomorphism and canonical forms are computed on the
//! [`Skeleton`], which forgets which port of a vertex an edge uses. All
//! decorations in this crate have symmetric ports (their components are one
//! dimensional), so the skeleton is the right level for isomorphism.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Largest vertex count accepted by [`enumerate_graphs`].
pub const MAX_ENUMERATION_VERTICES: usize = 6;

/// A vertex label with a fixed arity.
pub trait Decoration: Clone + Ord + Eq + Hash + Debug {
    /// `(inputs, outputs)`.
    fn arity(&self) -> (usize, usize);
    /// Name used in the text serialization.
    fn label(&self) -> String;
    fn from_label(label: &str, ins: usize, outs: usize) -> Result<Self>;
}

/// An opaque named decoration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub name: String,
    pub ins: usize,
    pub outs: usize,
}

impl Label {
    pub fn new(name: &str, ins: usize, outs: usize) -> Self {
        Label { name: name.to_string(), ins, outs }
    }
}

impl Decoration for Label {
    fn arity(&self) -> (usize, usize) {
        (self.ins, self.outs)
    }
    fn label(&self) -> String {
        self.name.clone()
    }
    fn from_label(label: &str, ins: usize, outs: usize) -> Result<Self> {
        Ok(Label::new(label, ins, outs))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port {
    pub vertex: usize,
    pub port: usize,
}

impl Port {
    pub fn new(vertex: usize, port: usize) -> Self {
        Port { vertex, port }
    }
}

/// Internal edge from an out-port to an in-port.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: Port,
    pub to: Port,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectedGraph<D> {
    vertices: Vec<D>,
    edges: Vec<Edge>,
    inputs: Vec<Port>,
    outputs: Vec<Port>,
}

impl<D: Decoration> DirectedGraph<D> {
    pub fn new(vertices: Vec<D>, edges: Vec<Edge>, inputs: Vec<Port>, outputs: Vec<Port>) -> Result<Self> {
        let g = DirectedGraph { vertices, edges, inputs, outputs };
        g.validate()?;
        Ok(g)
    }

    /// A single vertex with its legs in port order.
    pub fn corolla(d: D) -> Self {
        let (i, o) = d.arity();
        DirectedGraph {
            vertices: vec![d],
            edges: vec![],
            inputs: (0..i).map(|p| Port::new(0, p)).collect(),
            outputs: (0..o).map(|p| Port::new(0, p)).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::Invariant("graph has no vertices".into()));
        }
        let nv = self.vertices.len();
        let mut in_used: Vec<Vec<bool>> = self.vertices.iter().map(|d| vec![false; d.arity().0]).collect();
        let mut out_used: Vec<Vec<bool>> = self.vertices.iter().map(|d| vec![false; d.arity().1]).collect();
        let mark = |used: &mut Vec<Vec<bool>>, p: Port, kind: &str| -> Result<()> {
            if p.vertex >= nv || p.port >= used[p.vertex].len() {
                return Err(Error::Invariant(format!("{kind}-port v{}.{} does not exist", p.vertex, p.port)));
            }
            if std::mem::replace(&mut used[p.vertex][p.port], true) {
                return Err(Error::Invariant(format!("{kind}-port v{}.{} used twice", p.vertex, p.port)));
            }
            Ok(())
        };
        for e in &self.edges {
            mark(&mut out_used, e.from, "out")?;
            mark(&mut in_used, e.to, "in")?;
        }
        for &p in &self.inputs {
            mark(&mut in_used, p, "in")?;
        }
        for &p in &self.outputs {
            mark(&mut out_used, p, "out")?;
        }
        for (kind, used) in [("in", &in_used), ("out", &out_used)] {
            for (v, ports) in used.iter().enumerate() {
                if let Some(p) = ports.iter().position(|u| !u) {
                    return Err(Error::Invariant(format!("dangling {kind}-port v{v}.{p}")));
                }
            }
        }
        let sk = self.skeleton();
        if !sk.is_acyclic() {
            return Err(Error::Invariant("graph has a directed cycle".into()));
        }
        if !sk.is_connected() {
            return Err(Error::Invariant("graph is disconnected".into()));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[D] {
        &self.vertices
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn inputs(&self) -> &[Port] {
        &self.inputs
    }
    pub fn outputs(&self) -> &[Port] {
        &self.outputs
    }
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// First Betti number `E - V + 1` of the (connected) underlying graph.
    pub fn loop_genus(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn skeleton(&self) -> Skeleton<D> {
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.from.vertex, e.to.vertex)).collect();
        edges.sort();
        Skeleton {
            decos: self.vertices.clone(),
            edges,
            inputs: self.inputs.iter().map(|p| p.vertex).collect(),
            outputs: self.outputs.iter().map(|p| p.vertex).collect(),
            blocks: None,
        }
    }

    /// Relabels the global legs: new input `i` is old input `sigma[i]`,
    /// new output `i` is old output `tau[i]`.
    pub fn permute_legs(&self, sigma: &[usize], tau: &[usize]) -> Result<Self> {
        if !is_permutation(sigma, self.inputs.len()) || !is_permutation(tau, self.outputs.len()) {
            return Err(Error::Input("leg permutation has the wrong size".into()));
        }
        let mut g = self.clone();
        g.inputs = sigma.iter().map(|&i| self.inputs[i]).collect();
        g.outputs = tau.iter().map(|&i| self.outputs[i]).collect();
        Ok(g)
    }

    /// Renumbers vertices `old -> perm[old]`, keeping ports and legs.
    pub fn relabel_vertices(&self, perm: &[usize]) -> Result<Self> {
        if !is_permutation(perm, self.vertices.len()) {
            return Err(Error::Input("vertex relabeling is not a permutation".into()));
        }
        let mut vertices = self.vertices.clone();
        for (old, d) in self.vertices.iter().enumerate() {
            vertices[perm[old]] = d.clone();
        }
        let mv = |p: Port| Port::new(perm[p.vertex], p.port);
        Ok(DirectedGraph {
            vertices,
            edges: self.edges.iter().map(|e| Edge { from: mv(e.from), to: mv(e.to) }).collect(),
            inputs: self.inputs.iter().map(|&p| mv(p)).collect(),
            outputs: self.outputs.iter().map(|&p| mv(p)).collect(),
        })
    }

    /// Same graph with vertices numbered from the outputs upwards (reverse
    /// topological order), the order in which a network evaluates to plain
    /// composition.
    pub fn lower_first(&self) -> Self {
        let order = self.skeleton().topological_order();
        let n = order.len();
        let mut perm = vec![0; n];
        for (pos, &v) in order.iter().enumerate() {
            perm[v] = n - 1 - pos;
        }
        self.relabel_vertices(&perm).expect("topological order is a permutation")
    }

    /// Line-oriented text form; [`DirectedGraph::from_text`] inverts it exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, d) in self.vertices.iter().enumerate() {
            let (a, b) = d.arity();
            out.push_str(&format!("v{i}:{}({a},{b})\n", d.label()));
        }
        for e in &self.edges {
            out.push_str(&format!("e:v{}.{}->v{}.{}\n", e.from.vertex, e.from.port, e.to.vertex, e.to.port));
        }
        let legs = |ps: &[Port]| ps.iter().map(|p| format!("v{}.{}", p.vertex, p.port)).collect::<Vec<_>>().join(",");
        out.push_str(&format!("in:{}\n", legs(&self.inputs)));
        out.push_str(&format!("out:{}\n", legs(&self.outputs)));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut inputs = None;
        let mut outputs = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| Error::Input(format!("line {}: {m}: `{line}`", lineno + 1));
            if let Some(rest) = line.strip_prefix("in:") {
                inputs = Some(parse_ports(rest).map_err(|_| err("bad input legs"))?);
            } else if let Some(rest) = line.strip_prefix("out:") {
                outputs = Some(parse_ports(rest).map_err(|_| err("bad output legs"))?);
            } else if let Some(rest) = line.strip_prefix("e:") {
                let (a, b) = rest.split_once("->").ok_or_else(|| err("edge needs `->`"))?;
                let from = parse_port(a).map_err(|_| err("bad edge source"))?;
                let to = parse_port(b).map_err(|_| err("bad edge target"))?;
                edges.push(Edge { from, to });
            } else if let Some(rest) = line.strip_prefix('v') {
                let (idx, spec) = rest.split_once(':').ok_or_else(|| err("vertex needs `:`"))?;
                let idx: usize = idx.parse().map_err(|_| err("bad vertex index"))?;
                if idx != vertices.len() {
                    return Err(err("vertices must be listed in order"));
                }
                let (name, ar) = spec.split_once('(').ok_or_else(|| err("vertex needs an arity"))?;
                let ar = ar.strip_suffix(')').ok_or_else(|| err("unclosed arity"))?;
                let (i, o) = ar.split_once(',').ok_or_else(|| err("arity needs two numbers"))?;
                let i: usize = i.trim().parse().map_err(|_| err("bad in-arity"))?;
                let o: usize = o.trim().parse().map_err(|_| err("bad out-arity"))?;
                let d = D::from_label(name, i, o)?;
                if d.arity() != (i, o) {
                    return Err(err("arity does not match the decoration"));
                }
                vertices.push(d);
            } else {
                return Err(err("unrecognized line"));
            }
        }
        let inputs = inputs.ok_or_else(|| Error::Input("missing `in:` line".into()))?;
        let outputs = outputs.ok_or_else(|| Error::Input("missing `out:` line".into()))?;
        DirectedGraph::new(vertices, edges, inputs, outputs)
    }
}

fn parse_port(s: &str) -> std::result::Result<Port, ()> {
    let s = s.trim().strip_prefix('v').ok_or(())?;
    let (v, p) = s.split_once('.').ok_or(())?;
    Ok(Port::new(v.parse().map_err(|_| ())?, p.parse().map_err(|_| ())?))
}

fn parse_ports(s: &str) -> std::result::Result<Vec<Port>, ()> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(',').map(parse_port).collect()
}

pub fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    p.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Sign of a permutation given as a list.
pub fn permutation_sign(p: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 { 1 } else { -1 }
}

/// Port-forgetting view of a graph: decorations, the multiset of vertex
/// pairs joined by edges, the vertex carrying each leg and, optionally, a
/// partition of the vertices into blocks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Skeleton<D> {
    pub decos: Vec<D>,
    /// Sorted `(source, target)` pairs, one per edge.
    pub edges: Vec<(usize, usize)>,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub blocks: Option<Vec<usize>>,
}

/// Result of canonizing a skeleton.
#[derive(Clone, Debug)]
pub struct Canonical<D> {
    pub skeleton: Skeleton<D>,
    /// Every relabeling `old -> new` that produces `skeleton`. Their
    /// pairwise quotients form the automorphism group.
    pub relabelings: Vec<Vec<usize>>,
}

type CanonKey = (Vec<(usize, usize)>, Vec<usize>, Vec<usize>, Vec<usize>);

impl<D: Decoration> Skeleton<D> {
    pub fn num_vertices(&self) -> usize {
        self.decos.len()
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.decos.len();
        let mut indeg = vec![0usize; n];
        for &(_, t) in &self.edges {
            indeg[t] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop_front() {
            seen += 1;
            for &(s, t) in &self.edges {
                if s == v {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        queue.push_back(t);
                    }
                }
            }
        }
        seen == n
    }

    pub fn is_connected(&self) -> bool {
        connected_subset(&self.edges, &(0..self.decos.len()).collect::<Vec<_>>())
    }

    /// Vertices in a topological order (ties by index).
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.decos.len();
        let mut indeg = vec![0usize; n];
        for &(_, t) in &self.edges {
            indeg[t] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &(s, t) in &self.edges {
                if s == v {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        ready.insert(t);
                    }
                }
            }
        }
        order
    }

    /// Whether a directed path leads from `a` to `b`.
    pub fn reaches(&self, a: usize, b: usize) -> bool {
        let mut seen = vec![false; self.decos.len()];
        let mut stack = vec![a];
        while let Some(v) = stack.pop() {
            if v == b {
                return true;
            }
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            stack.extend(self.edges.iter().filter(|e| e.0 == v).map(|e| e.1));
        }
        false
    }

    pub fn loop_genus(&self) -> usize {
        self.edges.len() + 1 - self.decos.len()
    }

    /// Applies a relabeling `old -> new`.
    pub fn relabel(&self, perm: &[usize]) -> Skeleton<D> {
        let n = self.decos.len();
        let mut decos = vec![None; n];
        for (old, d) in self.decos.iter().enumerate() {
            decos[perm[old]] = Some(d.clone());
        }
        let mut edges: Vec<_> = self.edges.iter().map(|&(s, t)| (perm[s], perm[t])).collect();
        edges.sort();
        Skeleton {
            decos: decos.into_iter().map(Option::unwrap).collect(),
            edges,
            inputs: self.inputs.iter().map(|&v| perm[v]).collect(),
            outputs: self.outputs.iter().map(|&v| perm[v]).collect(),
            blocks: self.blocks.as_ref().map(|b| {
                let mut nb = vec![0; n];
                for old in 0..n {
                    nb[perm[old]] = b[old];
                }
                normalize_blocks(&nb)
            }),
        }
    }

    fn invariant(&self, v: usize) -> (D, usize, usize, usize, usize, usize) {
        let ins = self.inputs.iter().filter(|&&x| x == v).count();
        let outs = self.outputs.iter().filter(|&&x| x == v).count();
        let indeg = self.edges.iter().filter(|e| e.1 == v).count();
        let outdeg = self.edges.iter().filter(|e| e.0 == v).count();
        let bsize = self
            .blocks
            .as_ref()
            .map(|b| b.iter().filter(|&&x| x == b[v]).count())
            .unwrap_or(0);
        (self.decos[v].clone(), ins, outs, indeg, outdeg, bsize)
    }

    fn key(&self, perm: &[usize], legs_ordered: bool) -> CanonKey {
        let mut edges: Vec<_> = self.edges.iter().map(|&(s, t)| (perm[s], perm[t])).collect();
        edges.sort();
        let mut inputs: Vec<_> = self.inputs.iter().map(|&v| perm[v]).collect();
        let mut outputs: Vec<_> = self.outputs.iter().map(|&v| perm[v]).collect();
        if !legs_ordered {
            inputs.sort();
            outputs.sort();
        }
        let blocks = self
            .blocks
            .as_ref()
            .map(|b| {
                let mut nb = vec![0; b.len()];
                for old in 0..b.len() {
                    nb[perm[old]] = b[old];
                }
                normalize_blocks(&nb)
            })
            .unwrap_or_default();
        (edges, inputs, outputs, blocks)
    }

    /// Minimal relabeling under the order (vertex invariants, edges, legs,
    /// blocks). With `legs_ordered = false` the legs are compared as
    /// multisets, which canonizes the orbit under leg permutations.
    pub fn canonize(&self, legs_ordered: bool) -> Canonical<D> {
        let n = self.decos.len();
        let mut order: Vec<usize> = (0..n).collect();
        let inv: Vec<_> = (0..n).map(|v| self.invariant(v)).collect();
        order.sort_by(|&a, &b| inv[a].cmp(&inv[b]));
        // Runs of equal invariants may be permuted among their positions.
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (pos, &v) in order.iter().enumerate() {
            if pos > 0 && inv[order[pos - 1]] == inv[v] {
                groups.last_mut().unwrap().push(v);
            } else {
                groups.push(vec![v]);
            }
        }
        let mut best: Option<CanonKey> = None;
        let mut relabelings = Vec::new();
        let mut perm = vec![0usize; n];
        let mut visit = |perm: &[usize]| {
            let k = self.key(perm, legs_ordered);
            match &best {
                Some(b) if k > *b => {}
                Some(b) if k == *b => relabelings.push(perm.to_vec()),
                _ => {
                    best = Some(k);
                    relabelings.clear();
                    relabelings.push(perm.to_vec());
                }
            }
        };
        assign_groups(&groups, 0, 0, &mut perm, &mut visit);
        let skeleton = self.relabel(&relabelings[0]);
        let skeleton = if legs_ordered {
            skeleton
        } else {
            let mut s = skeleton;
            s.inputs.sort();
            s.outputs.sort();
            s
        };
        Canonical { skeleton, relabelings }
    }

    /// Rebuilds a port-level graph. In-ports list incoming edges (by source)
    /// before input legs; out-ports list outgoing edges (by target) before
    /// output legs.
    pub fn to_graph(&self) -> Result<DirectedGraph<D>> {
        let n = self.decos.len();
        let mut next_in = vec![0usize; n];
        let mut next_out = vec![0usize; n];
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut sorted_in = self.edges.clone();
        sorted_in.sort_by_key(|&(s, t)| (t, s));
        // Assign in-ports in (target, source) order and out-ports in
        // (source, target) order; both are determined by the edge multiset.
        let mut in_port_of = std::collections::BTreeMap::new();
        for &(s, t) in &sorted_in {
            in_port_of.entry((s, t)).or_insert_with(Vec::new).push(next_in[t]);
            next_in[t] += 1;
        }
        for &(s, t) in &self.edges {
            let from = Port::new(s, next_out[s]);
            next_out[s] += 1;
            let to = Port::new(t, in_port_of.get_mut(&(s, t)).unwrap().remove(0));
            edges.push(Edge { from, to });
        }
        let inputs = self
            .inputs
            .iter()
            .map(|&v| {
                next_in[v] += 1;
                Port::new(v, next_in[v] - 1)
            })
            .collect();
        let outputs = self
            .outputs
            .iter()
            .map(|&v| {
                next_out[v] += 1;
                Port::new(v, next_out[v] - 1)
            })
            .collect();
        DirectedGraph::new(self.decos.clone(), edges, inputs, outputs)
    }
}

fn assign_groups(
    groups: &[Vec<usize>],
    g: usize,
    offset: usize,
    perm: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if g == groups.len() {
        visit(perm);
        return;
    }
    let group = &groups[g];
    for p in permutations(group.len()) {
        for (i, &v) in group.iter().enumerate() {
            perm[v] = offset + p[i];
        }
        assign_groups(groups, g + 1, offset + group.len(), perm, visit);
    }
}

/// Renames block ids by first appearance.
pub fn normalize_blocks(b: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    b.iter()
        .map(|x| {
            let next = map.len();
            *map.entry(*x).or_insert(next)
        })
        .collect()
}

/// Whether the given vertices induce a connected subgraph (edges between
/// them, ignoring direction).
pub fn connected_subset(edges: &[(usize, usize)], verts: &[usize]) -> bool {
    if verts.is_empty() {
        return false;
    }
    let inside = |v: usize| verts.contains(&v);
    let mut seen = vec![verts[0]];
    let mut stack = vec![verts[0]];
    while let Some(v) = stack.pop() {
        for &(s, t) in edges {
            let other = if s == v && inside(t) {
                t
            } else if t == v && inside(s) {
                s
            } else {
                continue;
            };
            if !seen.contains(&other) {
                seen.push(other);
                stack.push(other);
            }
        }
    }
    seen.len() == verts.len()
}

/// Canonical representative of the isomorphism class (vertex relabelings
/// and port permutations at each vertex; leg orders are preserved).
pub fn canonical_form<D: Decoration>(g: &DirectedGraph<D>) -> DirectedGraph<D> {
    g.skeleton()
        .canonize(true)
        .skeleton
        .to_graph()
        .expect("relabeling preserves graph invariants")
}

pub fn isomorphic<D: Decoration>(a: &DirectedGraph<D>, b: &DirectedGraph<D>) -> bool {
    a.inputs.len() == b.inputs.len()
        && a.outputs.len() == b.outputs.len()
        && canonical_form(a) == canonical_form(b)
}

/// Grafts the outputs of `upper` graphs onto the inputs of `lower`.
///
/// `matching[t]` is the input leg of `lower` that receives the `t`-th
/// output, counting outputs of the upper graphs in order.
#[derive(Clone, Debug)]
pub struct GraftingPattern<D> {
    pub upper: Vec<DirectedGraph<D>>,
    pub lower: DirectedGraph<D>,
    pub matching: Vec<usize>,
}

pub fn graft<D: Decoration>(p: &GraftingPattern<D>) -> Result<DirectedGraph<D>> {
    let k: usize = p.upper.iter().map(|g| g.outputs.len()).sum();
    if k != p.lower.inputs.len() {
        return Err(Error::Composition(format!(
            "upper graphs have {k} outputs but the lower graph has {} inputs",
            p.lower.inputs.len()
        )));
    }
    if !is_permutation(&p.matching, k) {
        return Err(Error::Composition("matching is not a bijection".into()));
    }
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut inputs = Vec::new();
    let mut upper_outputs = Vec::new();
    for g in &p.upper {
        let off = vertices.len();
        let shift = |q: Port| Port::new(q.vertex + off, q.port);
        vertices.extend(g.vertices.iter().cloned());
        edges.extend(g.edges.iter().map(|e| Edge { from: shift(e.from), to: shift(e.to) }));
        inputs.extend(g.inputs.iter().map(|&q| shift(q)));
        upper_outputs.extend(g.outputs.iter().map(|&q| shift(q)));
    }
    let off = vertices.len();
    let shift = |q: Port| Port::new(q.vertex + off, q.port);
    vertices.extend(p.lower.vertices.iter().cloned());
    edges.extend(p.lower.edges.iter().map(|e| Edge { from: shift(e.from), to: shift(e.to) }));
    for (t, &leg) in p.matching.iter().enumerate() {
        edges.push(Edge { from: upper_outputs[t], to: shift(p.lower.inputs[leg]) });
    }
    let outputs = p.lower.outputs.iter().map(|&q| shift(q)).collect();
    DirectedGraph::new(vertices, edges, inputs, outputs).map_err(|e| match e {
        Error::Invariant(m) => Error::Composition(m),
        other => other,
    })
}

/// Every connected acyclic graph with `j` inputs, `k` outputs and at most
/// `max_vertices` vertices decorated from `decorations`, one per
/// isomorphism class, in canonical order.
pub fn enumerate_graphs<D: Decoration>(
    j: usize,
    k: usize,
    max_vertices: usize,
    decorations: &[D],
) -> Result<Vec<DirectedGraph<D>>> {
    Ok(enumerate_skeletons(j, k, max_vertices, decorations, true)?
        .into_iter()
        .map(|s| s.to_graph().expect("enumerated skeletons are valid"))
        .collect())
}

/// Skeleton-level enumeration. With `legs_ordered = false` one
/// representative per orbit under leg permutations is returned.
pub fn enumerate_skeletons<D: Decoration>(
    j: usize,
    k: usize,
    max_vertices: usize,
    decorations: &[D],
    legs_ordered: bool,
) -> Result<Vec<Skeleton<D>>> {
    if max_vertices > MAX_ENUMERATION_VERTICES {
        return Err(Error::Resource(format!(
            "enumeration is limited to {MAX_ENUMERATION_VERTICES} vertices, asked for {max_vertices}"
        )));
    }
    let mut decs: Vec<D> = decorations.to_vec();
    decs.sort();
    decs.dedup();
    let mut found = BTreeSet::new();
    for w in 1..=max_vertices {
        let mut choice = Vec::new();
        multisets(&decs, w, 0, &mut choice, &mut |ds: &[D]| {
            for_each_attachment(ds, j, k, legs_ordered, &mut |ins, outs, caps_in, caps_out| {
                for_each_edge_matrix(caps_in, caps_out, &mut |edges| {
                    let sk = Skeleton {
                        decos: ds.to_vec(),
                        edges: edges.to_vec(),
                        inputs: ins.to_vec(),
                        outputs: outs.to_vec(),
                        blocks: None,
                    };
                    if sk.is_acyclic() && sk.is_connected() {
                        found.insert(sk.canonize(legs_ordered).skeleton);
                    }
                });
            });
        });
    }
    Ok(found.into_iter().collect())
}

fn multisets<D: Clone>(decs: &[D], w: usize, start: usize, cur: &mut Vec<D>, f: &mut impl FnMut(&[D])) {
    if cur.len() == w {
        f(cur);
        return;
    }
    for i in start..decs.len() {
        cur.push(decs[i].clone());
        multisets(decs, w, i, cur, f);
        cur.pop();
    }
}

/// Attaches legs to vertices within their arity and reports the remaining
/// port capacities that internal edges have to fill.
fn for_each_attachment<D: Decoration>(
    ds: &[D],
    j: usize,
    k: usize,
    legs_ordered: bool,
    f: &mut impl FnMut(&[usize], &[usize], &[usize], &[usize]),
) {
    let w = ds.len();
    let cap_in: Vec<usize> = ds.iter().map(|d| d.arity().0).collect();
    let cap_out: Vec<usize> = ds.iter().map(|d| d.arity().1).collect();
    let total_in: usize = cap_in.iter().sum();
    let total_out: usize = cap_out.iter().sum();
    // Internal edges consume one in-port and one out-port each.
    if total_in < j || total_out < k || total_in - j != total_out - k {
        return;
    }
    let ins_choices = leg_tuples(w, j, legs_ordered);
    let outs_choices = leg_tuples(w, k, legs_ordered);
    for ins in &ins_choices {
        let mut ci = cap_in.clone();
        if !consume(&mut ci, ins) {
            continue;
        }
        for outs in &outs_choices {
            let mut co = cap_out.clone();
            if !consume(&mut co, outs) {
                continue;
            }
            f(ins, outs, &ci, &co);
        }
    }
}

fn consume(caps: &mut [usize], legs: &[usize]) -> bool {
    for &v in legs {
        if caps[v] == 0 {
            return false;
        }
        caps[v] -= 1;
    }
    true
}

fn leg_tuples(w: usize, n: usize, ordered: bool) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &out {
            for v in 0..w {
                if !ordered && t.last().is_some_and(|&l| v < l) {
                    continue;
                }
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// All edge multisets (no self-loops) filling the remaining capacities exactly.
fn for_each_edge_matrix(cap_in: &[usize], cap_out: &[usize], f: &mut impl FnMut(&[(usize, usize)])) {
    fn go(
        s: usize,
        t: usize,
        ci: &mut Vec<usize>,
        co: &mut Vec<usize>,
        edges: &mut Vec<(usize, usize)>,
        f: &mut dyn FnMut(&[(usize, usize)]),
    ) {
        let n = ci.len();
        if s == n {
            if ci.iter().all(|&c| c == 0) {
                f(edges);
            }
            return;
        }
        if t == n {
            if co[s] == 0 {
                go(s + 1, 0, ci, co, edges, f);
            }
            return;
        }
        if t == s {
            return go(s, t + 1, ci, co, edges, f);
        }
        let max = co[s].min(ci[t]);
        for m in 0..=max {
            co[s] -= m;
            ci[t] -= m;
            for _ in 0..m {
                edges.push((s, t));
            }
            go(s, t + 1, ci, co, edges, f);
            for _ in 0..m {
                edges.pop();
            }
            co[s] += m;
            ci[t] += m;
        }
    }
    let mut ci = cap_in.to_vec();
    let mut co = cap_out.to_vec();
    go(0, 0, &mut ci, &mut co, &mut Vec::new(), f);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(name: &str, i: usize, o: usize) -> Label {
        Label::new(name, i, o)
    }

    fn theta(swap: bool) -> DirectedGraph<Label> {
        // a (1,3) over b (3,1) with three parallel edges.
        let (a, b) = if swap { (1, 0) } else { (0, 1) };
        let mut verts = vec![l("b", 3, 1), l("a", 1, 3)];
        if !swap {
            verts.swap(0, 1);
        }
        let edges = (0..3).map(|p| Edge { from: Port::new(a, p), to: Port::new(b, p) }).collect();
        DirectedGraph::new(verts, edges, vec![Port::new(a, 0)], vec![Port::new(b, 0)]).unwrap()
    }

    #[test]
    fn genus_of_basic_shapes() {
        assert_eq!(DirectedGraph::corolla(l("x", 2, 1)).loop_genus(), 0);
        let two = DirectedGraph::new(
            vec![l("d", 1, 2), l("m", 2, 1)],
            vec![
                Edge { from: Port::new(0, 0), to: Port::new(1, 0) },
                Edge { from: Port::new(0, 1), to: Port::new(1, 1) },
            ],
            vec![Port::new(0, 0)],
            vec![Port::new(1, 0)],
        )
        .unwrap();
        assert_eq!(two.loop_genus(), 1);
        assert_eq!(theta(false).loop_genus(), 2);
    }

    #[test]
    fn invalid_graphs_rejected() {
        // dangling port
        let r = DirectedGraph::new(vec![l("m", 2, 1)], vec![], vec![Port::new(0, 0)], vec![Port::new(0, 0)]);
        assert!(matches!(r, Err(Error::Invariant(m)) if m.contains("dangling")));
        // disconnected
        let r = DirectedGraph::new(
            vec![l("i", 1, 1), l("i", 1, 1)],
            vec![],
            vec![Port::new(0, 0), Port::new(1, 0)],
            vec![Port::new(0, 0), Port::new(1, 0)],
        );
        assert!(matches!(r, Err(Error::Invariant(m)) if m.contains("disconnected")));
        // directed cycle
        let r = DirectedGraph::new(
            vec![l("x", 2, 2), l("y", 1, 1)],
            vec![
                Edge { from: Port::new(0, 0), to: Port::new(1, 0) },
                Edge { from: Port::new(1, 0), to: Port::new(0, 0) },
            ],
            vec![Port::new(0, 1)],
            vec![Port::new(0, 1)],
        );
        assert!(matches!(r, Err(Error::Invariant(m)) if m.contains("cycle")));
    }

    #[test]
    fn handle_from_grafting_two_outputs() {
        let p = GraftingPattern {
            upper: vec![DirectedGraph::corolla(l("d", 1, 2))],
            lower: DirectedGraph::corolla(l("m", 2, 1)),
            matching: vec![0, 1],
        };
        let g = graft(&p).unwrap();
        assert_eq!(g.loop_genus(), 1);
        assert_eq!(g.inputs().len(), 1);
    }

    #[test]
    fn grafting_trees_stays_genus_zero() {
        let p = GraftingPattern {
            upper: vec![DirectedGraph::corolla(l("i", 1, 1))],
            lower: DirectedGraph::corolla(l("i", 1, 1)),
            matching: vec![0],
        };
        let g = graft(&p).unwrap();
        assert_eq!((g.num_vertices(), g.loop_genus()), (2, 0));
        let p = GraftingPattern {
            upper: vec![DirectedGraph::corolla(l("u", 1, 1)), DirectedGraph::corolla(l("u", 1, 1))],
            lower: DirectedGraph::corolla(l("m", 2, 1)),
            matching: vec![1, 0],
        };
        let g = graft(&p).unwrap();
        assert_eq!(g.loop_genus(), 0);
        assert_eq!(g.inputs().len(), 2);
    }

    #[test]
    fn graft_rejects_bad_matching() {
        let p = GraftingPattern {
            upper: vec![DirectedGraph::corolla(l("d", 1, 2))],
            lower: DirectedGraph::corolla(l("m", 2, 1)),
            matching: vec![0, 0],
        };
        assert!(matches!(graft(&p), Err(Error::Composition(_))));
        let p = GraftingPattern {
            upper: vec![DirectedGraph::corolla(l("d", 1, 1))],
            lower: DirectedGraph::corolla(l("m", 2, 1)),
            matching: vec![0],
        };
        assert!(matches!(graft(&p), Err(Error::Composition(_))));
    }

    #[test]
    fn theta_canonical_form_ignores_vertex_ids() {
        let a = theta(false);
        let b = theta(true);
        assert_ne!(a, b);
        assert_eq!(canonical_form(&a), canonical_form(&b));
        // brute force over the two vertex orders
        let perms = permutations(2);
        let keys: BTreeSet<_> = perms.iter().map(|p| a.skeleton().relabel(p)).collect();
        assert!(keys.contains(&b.skeleton()));
    }

    #[test]
    fn canonical_form_is_idempotent() {
        for g in enumerate_graphs(2, 2, 3, &[l("m", 2, 1), l("d", 1, 2)]).unwrap() {
            let c = canonical_form(&g);
            assert_eq!(canonical_form(&c), c);
            let n = g.num_vertices();
            for p in permutations(n) {
                let relabeled = g.skeleton().relabel(&p).to_graph().unwrap();
                assert_eq!(canonical_form(&relabeled), c);
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let g = theta(true);
        let text = g.to_text();
        assert_eq!(DirectedGraph::<Label>::from_text(&text).unwrap().to_text(), text);
        assert!(text.starts_with("v0:b(3,1)\n"));
    }

    #[test]
    fn text_reports_dangling_port() {
        let text = "v0:m(2,1)\nin:v0.0\nout:v0.0\n";
        let err = DirectedGraph::<Label>::from_text(text).unwrap_err();
        assert!(err.to_string().contains("v0.1"), "{err}");
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_graphs(1, 1, 1, &[l("i", 1, 1)]).unwrap().len(), 1);
        assert_eq!(enumerate_graphs(2, 1, 1, &[l("m", 2, 1)]).unwrap().len(), 1);
        assert!(matches!(enumerate_graphs(1, 1, 7, &[l("i", 1, 1)]), Err(Error::Resource(_))));
    }

    #[test]
    fn leg_permutation_round_trip() {
        let g = enumerate_graphs(2, 2, 2, &[l("m", 2, 1), l("d", 1, 2)]).unwrap().pop().unwrap();
        let h = g.permute_legs(&[1, 0], &[1, 0]).unwrap();
        assert_eq!(h.permute_legs(&[1, 0], &[1, 0]).unwrap(), g);
        assert!(g.permute_legs(&[0], &[0, 1]).is_err());
    }
}

#[cfg(test)]
mod oracle {
    //! Independent port-level generator: every bijection from sources
    //! (input legs, out-ports) to sinks (in-ports, output legs), then a
    //! quotient by brute-force vertex and port relabeling.
    use super::*;

    fn relabeled_text(g: &DirectedGraph<Label>, vperm: &[usize], pin: &[Vec<usize>], pout: &[Vec<usize>]) -> String {
        let n = g.num_vertices();
        let mut verts = vec![None; n];
        for (v, d) in g.vertices().iter().enumerate() {
            verts[vperm[v]] = Some(d.clone());
        }
        let mapi = |p: Port| Port::new(vperm[p.vertex], pin[p.vertex][p.port]);
        let mapo = |p: Port| Port::new(vperm[p.vertex], pout[p.vertex][p.port]);
        let mut edges: Vec<Edge> = g.edges().iter().map(|e| Edge { from: mapo(e.from), to: mapi(e.to) }).collect();
        edges.sort();
        DirectedGraph {
            vertices: verts.into_iter().map(Option::unwrap).collect(),
            edges,
            inputs: g.inputs().iter().map(|&p| mapi(p)).collect(),
            outputs: g.outputs().iter().map(|&p| mapo(p)).collect(),
        }
        .to_text()
    }

    fn port_perm_choices(arities: &[usize]) -> Vec<Vec<Vec<usize>>> {
        let mut out = vec![vec![]];
        for &a in arities {
            let mut next = Vec::new();
            for prefix in &out {
                for p in permutations(a) {
                    let mut q = prefix.clone();
                    q.push(p);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    fn naive_key(g: &DirectedGraph<Label>) -> String {
        let n = g.num_vertices();
        let ins: Vec<usize> = g.vertices().iter().map(|d| d.ins).collect();
        let outs: Vec<usize> = g.vertices().iter().map(|d| d.outs).collect();
        let mut best: Option<String> = None;
        for vp in permutations(n) {
            for pin in port_perm_choices(&ins) {
                for pout in port_perm_choices(&outs) {
                    let t = relabeled_text(g, &vp, &pin, &pout);
                    if best.as_ref().is_none_or(|b| t < *b) {
                        best = Some(t);
                    }
                }
            }
        }
        best.unwrap()
    }

    fn naive_count(j: usize, k: usize, max_vertices: usize, decs: &[Label]) -> usize {
        let mut classes = BTreeSet::new();
        for w in 1..=max_vertices {
            let mut seqs = vec![vec![]];
            for _ in 0..w {
                seqs = seqs
                    .into_iter()
                    .flat_map(|s: Vec<Label>| {
                        decs.iter().map(move |d| {
                            let mut s2 = s.clone();
                            s2.push(d.clone());
                            s2
                        })
                    })
                    .collect();
            }
            for verts in seqs {
                // sources: Err(i) input leg i, Ok(port) an out-port
                let mut sources: Vec<std::result::Result<Port, usize>> = (0..j).map(Err).collect();
                let mut sinks: Vec<std::result::Result<Port, usize>> = Vec::new();
                for (v, d) in verts.iter().enumerate() {
                    sources.extend((0..d.outs).map(|p| Ok(Port::new(v, p))));
                    sinks.extend((0..d.ins).map(|p| Ok(Port::new(v, p))));
                }
                sinks.extend((0..k).map(Err));
                if sources.len() != sinks.len() {
                    continue;
                }
                for b in permutations(sources.len()) {
                    let mut edges = Vec::new();
                    let mut inputs = vec![Port::new(0, 0); j];
                    let mut outputs = vec![Port::new(0, 0); k];
                    let mut ok = true;
                    for (s, &t) in b.iter().enumerate() {
                        match (sources[s], sinks[t]) {
                            (Err(_), Err(_)) => ok = false,
                            (Err(i), Ok(p)) => inputs[i] = p,
                            (Ok(p), Err(o)) => outputs[o] = p,
                            (Ok(from), Ok(to)) => edges.push(Edge { from, to }),
                        }
                    }
                    if !ok {
                        continue;
                    }
                    if let Ok(g) = DirectedGraph::new(verts.clone(), edges, inputs, outputs) {
                        classes.insert(naive_key(&g));
                    }
                }
            }
        }
        classes.len()
    }

    #[test]
    fn enumeration_matches_naive_search() {
        let decs = [Label::new("mu", 2, 1), Label::new("delta", 1, 2)];
        let fast = enumerate_graphs(2, 2, 2, &decs).unwrap().len();
        assert_eq!(fast, naive_count(2, 2, 2, &decs));
        let fast = enumerate_graphs(1, 1, 2, &decs).unwrap().len();
        assert_eq!(fast, naive_count(1, 1, 2, &decs));
        let fast = enumerate_graphs(2, 1, 3, &decs).unwrap().len();
        assert_eq!(fast, naive_count(2, 1, 3, &decs));
    }
}
