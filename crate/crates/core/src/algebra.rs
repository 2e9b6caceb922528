//! Finite-dimensional graded Frobenius algebras: structure constants,
//! the coproduct dual to the pairing, genus operations, the Euler class and
//! dualization.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::endo::{evaluate_network, MultiMap};
use crate::error::{Error, Result};
use crate::exact::{fmt_scalar, invert_matrix, parse_scalar, q, sign, GradedSpace, Scalar};
use crate::frob::{reduce_to_normal_form, FrobGenerator};
use crate::graph::{enumerate_graphs, DirectedGraph, Edge, Port};

#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusAlgebraData {
    pub space: Arc<GradedSpace>,
    /// Top degree.
    pub n: i64,
    pub unit: usize,
    /// Product, arity (2,1), degree 0.
    pub mult: MultiMap,
    /// Pairing `⟨a, b⟩`, arity (2,0), degree `-n`.
    pub pairing: MultiMap,
}

/// Parsed algebra file: the algebra plus optional data describing a target
/// complex `A ⊕ C` and perturbations of the product.
#[derive(Clone, Debug)]
pub struct AlgebraFile {
    pub name: String,
    pub algebra: FrobeniusAlgebraData,
    pub extras: Vec<(String, i64)>,
    /// `d a = coeff · b` entries of the differential.
    pub differential: Vec<(String, String, Scalar)>,
    /// `(a, b, c, coeff)`: a degree -1 map `a ⊗ b -> coeff · c` whose
    /// boundary is added to the product.
    pub homotopy: Vec<(String, String, String, Scalar)>,
    /// `(a, b, c, coeff)`: added directly to the product.
    pub defect: Vec<(String, String, String, Scalar)>,
}

const BUILTIN_ALGEBRAS: [(&str, &str); 7] = [
    ("s2", include_str!("../fixtures/s2.alg")),
    ("s3", include_str!("../fixtures/s3.alg")),
    ("t2", include_str!("../fixtures/t2.alg")),
    ("cp2", include_str!("../fixtures/cp2.alg")),
    ("pt", include_str!("../fixtures/pt.alg")),
    ("s2_perturbed", include_str!("../fixtures/s2_perturbed.alg")),
    ("s2_broken", include_str!("../fixtures/s2_broken.alg")),
];

pub fn builtin_algebra_names() -> Vec<&'static str> {
    BUILTIN_ALGEBRAS.iter().map(|(n, _)| *n).collect()
}

/// Loads a shipped algebra by name, or else reads the argument as a path.
pub fn load_algebra(name_or_path: &str) -> Result<AlgebraFile> {
    if let Some((name, text)) = BUILTIN_ALGEBRAS.iter().find(|(n, _)| *n == name_or_path) {
        return parse_algebra(name, text);
    }
    let text = std::fs::read_to_string(name_or_path)
        .map_err(|e| Error::Input(format!("cannot read algebra `{name_or_path}`: {e}")))?;
    parse_algebra(name_or_path, &text)
}

/// Parses the line format `n`, `basis name deg`, `unit`, `mult a b c coeff`,
/// `pair a b coeff`, `extra name deg`, `d a b coeff`, `homotopy a b c coeff`
/// and `defect a b c coeff`. Products with the unit and graded-commuted
/// partners of listed products and pairings are filled in.
pub fn parse_algebra(name: &str, text: &str) -> Result<AlgebraFile> {
    let mut n = None;
    let mut basis: Vec<(String, i64)> = Vec::new();
    let mut unit = None;
    let mut mult_lines = Vec::new();
    let mut pair_lines = Vec::new();
    let mut extras = Vec::new();
    let mut differential = Vec::new();
    let mut homotopy = Vec::new();
    let mut defect = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p: Vec<&str> = line.split_whitespace().collect();
        let err = |m: &str| Error::Input(format!("{name}:{}: {m}: `{line}`", no + 1));
        let int = |s: &str| s.parse::<i64>().map_err(|_| err("expected an integer"));
        let want = |k: usize| if p.len() == k { Ok(()) } else { Err(err(&format!("expected {} fields", k - 1))) };
        match p[0] {
            "n" => {
                want(2)?;
                n = Some(int(p[1])?);
            }
            "basis" => {
                want(3)?;
                basis.push((p[1].to_string(), int(p[2])?));
            }
            "unit" => {
                want(2)?;
                unit = Some(p[1].to_string());
            }
            "mult" => {
                want(5)?;
                mult_lines.push((p[1].to_string(), p[2].to_string(), p[3].to_string(), parse_scalar(p[4])?));
            }
            "pair" => {
                want(4)?;
                pair_lines.push((p[1].to_string(), p[2].to_string(), parse_scalar(p[3])?));
            }
            "extra" => {
                want(3)?;
                extras.push((p[1].to_string(), int(p[2])?));
            }
            "d" => {
                want(4)?;
                differential.push((p[1].to_string(), p[2].to_string(), parse_scalar(p[3])?));
            }
            "homotopy" | "defect" => {
                want(5)?;
                let t = (p[1].to_string(), p[2].to_string(), p[3].to_string(), parse_scalar(p[4])?);
                if p[0] == "homotopy" { homotopy.push(t) } else { defect.push(t) }
            }
            _ => return Err(err("unknown keyword")),
        }
    }
    let n = n.ok_or_else(|| Error::Input(format!("{name}: missing `n`")))?;
    let unit_name = unit.ok_or_else(|| Error::Input(format!("{name}: missing `unit`")))?;
    let space = Arc::new(GradedSpace::new(basis)?);
    let idx = |s: &str| space.index_of(s).ok_or_else(|| Error::Input(format!("{name}: unknown basis element `{s}`")));
    let unit = idx(&unit_name)?;
    if space.degree(unit) != 0 {
        return Err(Error::Invariant(format!("{name}: unit must have degree 0")));
    }

    let mut mult: BTreeMap<(usize, usize), BTreeMap<usize, Scalar>> = BTreeMap::new();
    let set = |mult: &mut BTreeMap<(usize, usize), BTreeMap<usize, Scalar>>, a, b, c, v: Scalar| -> Result<()> {
        let slot = mult.entry((a, b)).or_default();
        match slot.get(&c) {
            Some(old) if *old != v => Err(Error::Invariant(format!(
                "{name}: conflicting products {}·{}",
                space.name(a),
                space.name(b)
            ))),
            _ => {
                slot.insert(c, v);
                Ok(())
            }
        }
    };
    let given: BTreeSet<(usize, usize)> = mult_lines
        .iter()
        .map(|(a, b, _, _)| Ok((idx(a)?, idx(b)?)))
        .collect::<Result<_>>()?;
    for (a, b, c, v) in &mult_lines {
        set(&mut mult, idx(a)?, idx(b)?, idx(c)?, v.clone())?;
    }
    for (a, b, c, v) in &mult_lines {
        let (a, b, c) = (idx(a)?, idx(b)?, idx(c)?);
        if !given.contains(&(b, a)) {
            let s = sign(space.degree(a) * space.degree(b));
            set(&mut mult, b, a, c, v * s)?;
        }
    }
    for a in 0..space.dim() {
        if !given.contains(&(unit, a)) {
            set(&mut mult, unit, a, a, Scalar::one())?;
        }
        if !given.contains(&(a, unit)) {
            set(&mut mult, a, unit, a, Scalar::one())?;
        }
    }
    let entries = mult
        .into_iter()
        .flat_map(|((a, b), row)| row.into_iter().map(move |(c, v)| ((vec![c], vec![a, b]), v)));
    let mult = MultiMap::new(space.clone(), 2, 1, 0, entries)?;

    let mut pairing = MultiMap::zero(space.clone(), 2, 0, -n);
    let mut pair_given = BTreeMap::new();
    for (a, b, v) in &pair_lines {
        pair_given.insert((idx(a)?, idx(b)?), v.clone());
    }
    for (&(a, b), v) in &pair_given {
        if space.degree(a) + space.degree(b) != n {
            return Err(Error::Invariant(format!(
                "{name}: pairing ⟨{}, {}⟩ outside degree n",
                space.name(a),
                space.name(b)
            )));
        }
        pairing.add_entry(vec![], vec![a, b], v.clone());
        let partner = v * sign(space.degree(a) * space.degree(b));
        match pair_given.get(&(b, a)) {
            Some(w) if *w != partner => {
                return Err(Error::Invariant(format!("{name}: pairing is not graded symmetric")));
            }
            Some(_) => {}
            None => pairing.add_entry(vec![], vec![b, a], partner),
        }
    }
    let algebra = FrobeniusAlgebraData { space, n, unit, mult, pairing };
    algebra.check_invariants()?;
    Ok(AlgebraFile { name: name.to_string(), algebra, extras, differential, homotopy, defect })
}

impl FrobeniusAlgebraData {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn product(&self, a: usize, b: usize) -> Vec<Scalar> {
        (0..self.dim()).map(|c| self.mult.entry(&[c], &[a, b])).collect()
    }

    pub fn pair(&self, a: usize, b: usize) -> Scalar {
        self.pairing.entry(&[], &[a, b])
    }

    /// `pairing[a][b]` as a dense matrix.
    pub fn pairing_matrix(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim()).map(|a| (0..self.dim()).map(|b| self.pair(a, b)).collect()).collect()
    }

    /// Counit `ε(a) = ⟨a, 1⟩`, arity (1,0), degree `-n`.
    pub fn counit(&self) -> MultiMap {
        let mut m = MultiMap::zero(self.space.clone(), 1, 0, -self.n);
        for a in 0..self.dim() {
            m.add_entry(vec![], vec![a], self.pair(a, self.unit));
        }
        m
    }

    /// Unit as a map from the ground field, arity (0,1).
    pub fn unit_map(&self) -> MultiMap {
        MultiMap::elementary(self.space.clone(), vec![self.unit], vec![])
    }

    pub fn check_invariants(&self) -> Result<()> {
        let d = self.dim();
        let deg = |a: usize| self.space.degree(a);
        for a in 0..d {
            for b in 0..d {
                let ab = self.product(a, b);
                let ba = self.product(b, a);
                let s = sign(deg(a) * deg(b));
                if ab.iter().zip(&ba).any(|(x, y)| *x != y * &s) {
                    return Err(Error::Invariant(format!(
                        "product not graded commutative on {}, {}",
                        self.space.name(a),
                        self.space.name(b)
                    )));
                }
            }
            let mut e = vec![Scalar::zero(); d];
            e[a] = Scalar::one();
            if self.product(self.unit, a) != e || self.product(a, self.unit) != e {
                return Err(Error::Invariant(format!("unit fails on {}", self.space.name(a))));
            }
        }
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let left: Vec<Scalar> = (0..d)
                        .map(|t| (0..d).map(|m| self.mult.entry(&[m], &[a, b]) * self.mult.entry(&[t], &[m, c])).sum())
                        .collect();
                    let right: Vec<Scalar> = (0..d)
                        .map(|t| (0..d).map(|m| self.mult.entry(&[m], &[b, c]) * self.mult.entry(&[t], &[a, m])).sum())
                        .collect();
                    if left != right {
                        return Err(Error::Invariant(format!(
                            "product not associative on {}, {}, {}",
                            self.space.name(a),
                            self.space.name(b),
                            self.space.name(c)
                        )));
                    }
                    // ⟨ab, c⟩ = ⟨a, bc⟩
                    let l: Scalar = (0..d).map(|m| self.mult.entry(&[m], &[a, b]) * self.pair(m, c)).sum();
                    let r: Scalar = (0..d).map(|m| self.mult.entry(&[m], &[b, c]) * self.pair(a, m)).sum();
                    if l != r {
                        return Err(Error::Invariant(format!(
                            "pairing not invariant on {}, {}, {}",
                            self.space.name(a),
                            self.space.name(b),
                            self.space.name(c)
                        )));
                    }
                }
            }
        }
        if invert_matrix(&self.pairing_matrix()).is_none() {
            return Err(Error::DegeneratePairing("pairing matrix is singular".into()));
        }
        Ok(())
    }
}

/// `Δ` with `⟨⟨Δa, x ⊗ y⟩⟩ = ⟨a, xy⟩`, where
/// `⟨⟨b ⊗ c, x ⊗ y⟩⟩ = (-1)^{|c||x|} ⟨b, x⟩⟨c, y⟩`.
pub fn coproduct_from_pairing(a: &FrobeniusAlgebraData) -> Result<MultiMap> {
    let d = a.dim();
    let pinv = invert_matrix(&a.pairing_matrix()).ok_or_else(|| Error::DegeneratePairing("pairing matrix is singular".into()))?;
    let deg = |i: usize| a.space.degree(i);
    let mut delta = MultiMap::zero(a.space.clone(), 1, 2, a.n);
    // Solving the adjunction: D^{bc}_e = Σ_{x,y} pinv[x][b] pinv[y][c] (-1)^{(n-|y|)|x|} ⟨e, xy⟩.
    for e in 0..d {
        for x in 0..d {
            for y in 0..d {
                let r: Scalar = (0..d).map(|m| a.mult.entry(&[m], &[x, y]) * a.pair(e, m)).sum();
                if r.is_zero() {
                    continue;
                }
                let s = sign((a.n - deg(y)) * deg(x));
                for b in 0..d {
                    if pinv[x][b].is_zero() {
                        continue;
                    }
                    for c in 0..d {
                        let v = &pinv[x][b] * &pinv[y][c] * &s * &r;
                        delta.add_entry(vec![b, c], vec![e], v);
                    }
                }
            }
        }
    }
    Ok(delta)
}

/// The four generator images in `End(A)`.
#[derive(Clone, Debug)]
pub struct GeneratorImages {
    pub mu: MultiMap,
    pub eta: MultiMap,
    pub delta: MultiMap,
    pub eps: MultiMap,
}

impl GeneratorImages {
    pub fn of(a: &FrobeniusAlgebraData) -> Result<Self> {
        Ok(GeneratorImages { mu: a.mult.clone(), eta: a.unit_map(), delta: coproduct_from_pairing(a)?, eps: a.counit() })
    }

    pub fn get(&self, g: FrobGenerator) -> &MultiMap {
        match g {
            FrobGenerator::Mu => &self.mu,
            FrobGenerator::Eta => &self.eta,
            FrobGenerator::Delta => &self.delta,
            FrobGenerator::Eps => &self.eps,
        }
    }

    /// Value of a generator graph, evaluated lower vertices first.
    pub fn evaluate(&self, g: &DirectedGraph<FrobGenerator>) -> Result<MultiMap> {
        let g = g.lower_first();
        let maps: Vec<&MultiMap> = g.vertices().iter().map(|&d| self.get(d)).collect();
        evaluate_network(&g, &maps)
    }
}

/// A graph realizing `(j, k, g)`: a product chain on the inputs, `g`
/// handles, then a coproduct chain to the outputs. `None` for the identity.
pub fn standard_graph(j: usize, k: usize, g: usize) -> Option<DirectedGraph<FrobGenerator>> {
    if j == 0 || k == 0 || (j, k, g) == (1, 1, 0) {
        return None;
    }
    let mut verts = Vec::new();
    let mut edges = Vec::new();
    let mut inputs = vec![];
    let mut outputs = vec![None; k];
    // `cur` is the out-port (or input leg) carrying the running value.
    enum Cur {
        Leg,
        Out(Port),
    }
    let mut cur = Cur::Leg;
    let attach = |cur: &Cur, to: Port, edges: &mut Vec<Edge>, inputs: &mut Vec<Port>| match cur {
        Cur::Leg => inputs.insert(0, to),
        Cur::Out(p) => edges.push(Edge { from: *p, to }),
    };
    for _ in 1..j {
        let v = verts.len();
        verts.push(FrobGenerator::Mu);
        attach(&cur, Port::new(v, 0), &mut edges, &mut inputs);
        inputs.push(Port::new(v, 1));
        cur = Cur::Out(Port::new(v, 0));
    }
    for _ in 0..g {
        let d = verts.len();
        verts.push(FrobGenerator::Delta);
        let m = verts.len();
        verts.push(FrobGenerator::Mu);
        attach(&cur, Port::new(d, 0), &mut edges, &mut inputs);
        edges.push(Edge { from: Port::new(d, 0), to: Port::new(m, 0) });
        edges.push(Edge { from: Port::new(d, 1), to: Port::new(m, 1) });
        cur = Cur::Out(Port::new(m, 0));
    }
    for t in 0..k - 1 {
        let d = verts.len();
        verts.push(FrobGenerator::Delta);
        attach(&cur, Port::new(d, 0), &mut edges, &mut inputs);
        outputs[t] = Some(Port::new(d, 0));
        cur = Cur::Out(Port::new(d, 1));
    }
    match cur {
        Cur::Out(p) => outputs[k - 1] = Some(p),
        Cur::Leg => unreachable!("some vertex exists"),
    }
    let outputs = outputs.into_iter().map(Option::unwrap).collect();
    Some(DirectedGraph::new(verts, edges, inputs, outputs).expect("standard graph is valid"))
}

/// The genus-`g` operation `A^⊗j -> A^⊗k`, evaluated on [`standard_graph`].
pub fn genus_operation(a: &FrobeniusAlgebraData, j: usize, k: usize, g: usize) -> Result<MultiMap> {
    genus_operation_with(&GeneratorImages::of(a)?, j, k, g)
}

pub fn genus_operation_with(images: &GeneratorImages, j: usize, k: usize, g: usize) -> Result<MultiMap> {
    if j == 0 || k == 0 {
        return Err(Error::OutOfRange("genus operations need j, k > 0".into()));
    }
    match standard_graph(j, k, g) {
        None => Ok(MultiMap::identity(images.mu.space().clone())),
        Some(graph) => images.evaluate(&graph),
    }
}

/// Alternating sum of graded dimensions, checked against the top-class
/// coefficient `⟨1, μΔ(1)⟩` of the genus-one operation on the unit.
pub fn euler_check(a: &FrobeniusAlgebraData) -> Result<Scalar> {
    let chi: i64 = (0..a.dim()).map(|i| if a.space.degree(i).rem_euclid(2) == 0 { 1 } else { -1 }).sum();
    let handle = genus_operation(a, 1, 1, 1)?;
    let coef = handle_coefficient(a, &handle);
    if coef != q(chi) {
        return Err(Error::Inconsistent(format!(
            "genus-one operation gives {} but the Euler characteristic is {chi}",
            fmt_scalar(&coef)
        )));
    }
    Ok(coef)
}

/// `⟨1, h(1)⟩` for a (1,1) map `h`.
pub fn handle_coefficient(a: &FrobeniusAlgebraData, h: &MultiMap) -> Scalar {
    (0..a.dim()).map(|m| h.entry(&[m], &[a.unit]) * a.pair(a.unit, m)).sum()
}

/// The dual algebra on `A*` with `a*` in degree `n - |a|`. Its product is
/// the transpose of `Δ` with sign `(-1)^{|b||c| + n|c|}` on `b* ⊗ c*`, its
/// pairing is the inverse pairing and its unit is the counit.
pub fn dualize(a: &FrobeniusAlgebraData) -> Result<FrobeniusAlgebraData> {
    let d = a.dim();
    let n = a.n;
    let deg = |i: usize| a.space.degree(i);
    let space = Arc::new(GradedSpace::new(
        (0..d).map(|i| (format!("{}*", a.space.name(i)), n - deg(i))).collect(),
    )?);
    let delta = coproduct_from_pairing(a)?;
    let mut mult = MultiMap::zero(space.clone(), 2, 1, 0);
    for ((outs, ins), v) in delta.entries() {
        let (b, c, e) = (outs[0], outs[1], ins[0]);
        mult.add_entry(vec![e], vec![b, c], v * sign(deg(b) * deg(c) + n * deg(c)));
    }
    let pinv = invert_matrix(&a.pairing_matrix()).ok_or_else(|| Error::DegeneratePairing("pairing matrix is singular".into()))?;
    let mut pairing = MultiMap::zero(space.clone(), 2, 0, -n);
    for b in 0..d {
        for c in 0..d {
            pairing.add_entry(vec![], vec![b, c], pinv[c][b].clone());
        }
    }
    // The unit is ψ(1) = Σ_b ⟨1, b⟩ b*, which must be a single dual basis vector.
    let row: Vec<Scalar> = (0..d).map(|b| a.pair(a.unit, b)).collect();
    let unit = (0..d)
        .find(|&i| row[i].is_one() && row.iter().enumerate().all(|(t, x)| t == i || x.is_zero()))
        .ok_or_else(|| Error::Invariant("the counit is not a dual basis vector".into()))?;
    let dual = FrobeniusAlgebraData { space, n, unit, mult, pairing };
    dual.check_invariants()?;
    Ok(dual)
}

/// `ψ(a) = Σ_b ⟨a, b⟩ b*` as a (1,1) map from `A` to the dual, written on
/// the shared index set.
pub fn pairing_isomorphism(a: &FrobeniusAlgebraData) -> Vec<Vec<Scalar>> {
    a.pairing_matrix()
}

/// Outcome of the relation checks in `End(A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationStatus {
    Holds,
    /// Holds after multiplying one side by -1.
    HoldsUpToSign,
    Fails,
}

fn compare(x: &MultiMap, y: &MultiMap) -> RelationStatus {
    if x == y {
        RelationStatus::Holds
    } else if x.add(y).is_ok_and(|s| s.is_zero()) {
        RelationStatus::HoldsUpToSign
    } else {
        RelationStatus::Fails
    }
}

const RELATIONS: [(&str, &str, &str); 9] = [
    (
        "associativity",
        "v0:mu(2,1)\nv1:mu(2,1)\ne:v0.0->v1.0\nin:v0.0,v0.1,v1.1\nout:v1.0\n",
        "v0:mu(2,1)\nv1:mu(2,1)\ne:v0.0->v1.1\nin:v1.0,v0.0,v0.1\nout:v1.0\n",
    ),
    ("commutativity", "v0:mu(2,1)\nin:v0.0,v0.1\nout:v0.0\n", "v0:mu(2,1)\nin:v0.1,v0.0\nout:v0.0\n"),
    ("left unit", "v0:eta(0,1)\nv1:mu(2,1)\ne:v0.0->v1.0\nin:v1.1\nout:v1.0\n", "id"),
    ("right unit", "v0:eta(0,1)\nv1:mu(2,1)\ne:v0.0->v1.1\nin:v1.0\nout:v1.0\n", "id"),
    (
        "coassociativity",
        "v0:delta(1,2)\nv1:delta(1,2)\ne:v0.0->v1.0\nin:v0.0\nout:v1.0,v1.1,v0.1\n",
        "v0:delta(1,2)\nv1:delta(1,2)\ne:v0.1->v1.0\nin:v0.0\nout:v0.0,v1.0,v1.1\n",
    ),
    ("cocommutativity", "v0:delta(1,2)\nin:v0.0\nout:v0.0,v0.1\n", "v0:delta(1,2)\nin:v0.0\nout:v0.1,v0.0\n"),
    ("left counit", "v0:delta(1,2)\nv1:eps(1,0)\ne:v0.0->v1.0\nin:v0.0\nout:v0.1\n", "id"),
    ("right counit", "v0:delta(1,2)\nv1:eps(1,0)\ne:v0.1->v1.0\nin:v0.0\nout:v0.0\n", "id"),
    (
        "frobenius",
        "v0:mu(2,1)\nv1:delta(1,2)\ne:v0.0->v1.0\nin:v0.0,v0.1\nout:v1.0,v1.1\n",
        "v0:delta(1,2)\nv1:mu(2,1)\ne:v0.0->v1.1\nin:v1.0,v0.0\nout:v1.0,v0.1\n",
    ),
];

/// Checks each presentation relation on all basis elements.
pub fn verify_relations(a: &FrobeniusAlgebraData) -> Result<Vec<(&'static str, RelationStatus)>> {
    let images = GeneratorImages::of(a)?;
    let eval = |text: &str| -> Result<MultiMap> {
        if text == "id" {
            return Ok(MultiMap::identity(a.space.clone()));
        }
        images.evaluate(&DirectedGraph::from_text(text)?)
    };
    RELATIONS.iter().map(|(name, l, r)| Ok((*name, compare(&eval(l)?, &eval(r)?)))).collect()
}

/// For each `(j, k, g)` the number of distinct values (and whether they
/// agree up to sign) over all generator graphs with at most
/// `max_vertices` vertices realizing it.
pub fn well_definedness(
    a: &FrobeniusAlgebraData,
    max_legs: usize,
    max_vertices: usize,
) -> Result<BTreeMap<(usize, usize, usize), (usize, RelationStatus)>> {
    let images = GeneratorImages::of(a)?;
    let mut values: BTreeMap<(usize, usize, usize), Vec<MultiMap>> = BTreeMap::new();
    for j in 1..max_legs {
        for k in 1..=max_legs - j {
            for graph in enumerate_graphs(j, k, max_vertices, &FrobGenerator::ALL)? {
                let Ok(e) = reduce_to_normal_form(&graph, a.n) else { continue };
                let v = images.evaluate(&graph)?;
                let list = values.entry((j, k, e.g)).or_default();
                if !list.contains(&v) {
                    list.push(v);
                }
            }
        }
    }
    Ok(values
        .into_iter()
        .map(|(key, vals)| {
            let status = if vals.len() == 1 {
                RelationStatus::Holds
            } else if vals.len() == 2 && compare(&vals[0], &vals[1]) == RelationStatus::HoldsUpToSign {
                RelationStatus::HoldsUpToSign
            } else {
                RelationStatus::Fails
            };
            (key, (vals.len(), status))
        })
        .collect())
}

/// Checks `ψ^{⊗k} ∘ op_A = op_{A*} ∘ ψ^{⊗j}` for every genus operation with
/// `j + k <= max_legs` and genus at most `max_genus`. Returns the failures.
pub fn duality_failures(a: &FrobeniusAlgebraData, max_legs: usize, max_genus: usize) -> Result<Vec<(usize, usize, usize)>> {
    let dual = dualize(a)?;
    let ia = GeneratorImages::of(a)?;
    let id = GeneratorImages::of(&dual)?;
    let p = pairing_isomorphism(a);
    let d = a.dim();
    // ψ is not homogeneous as a map between the two gradings' index sets,
    // so it is applied to basis words directly.
    let apply_psi = |w: &[usize]| -> Vec<(Vec<usize>, Scalar)> {
        let mut acc = vec![(vec![], Scalar::one())];
        for &x in w {
            let mut next = Vec::new();
            for (pre, c) in &acc {
                for b in 0..d {
                    if !p[x][b].is_zero() {
                        let mut t = pre.clone();
                        t.push(b);
                        next.push((t, c * &p[x][b]));
                    }
                }
            }
            acc = next;
        }
        acc
    };
    let mut failures = Vec::new();
    for j in 1..max_legs {
        for k in 1..=max_legs - j {
            for g in 0..=max_genus {
                let oa = genus_operation_with(&ia, j, k, g)?;
                let od = genus_operation_with(&id, j, k, g)?;
                // compare ψ(op_A(x)) with op_{A*}(ψ(x)) for every input word x
                let mut ok = true;
                for x in crate::endo::all_words(d, j) {
                    let mut lhs: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
                    for ((outs, ins), v) in oa.entries() {
                        if *ins == x {
                            for (t, c) in apply_psi(outs) {
                                *lhs.entry(t).or_insert_with(Scalar::zero) += v * c;
                            }
                        }
                    }
                    let mut rhs: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
                    for (y, c) in apply_psi(&x) {
                        for ((outs, ins), v) in od.entries() {
                            if *ins == y {
                                *rhs.entry(outs.clone()).or_insert_with(Scalar::zero) += v * &c;
                            }
                        }
                    }
                    lhs.retain(|_, v| !v.is_zero());
                    rhs.retain(|_, v| !v.is_zero());
                    if lhs != rhs {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    failures.push((j, k, g));
                }
            }
        }
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(name: &str) -> FrobeniusAlgebraData {
        load_algebra(name).unwrap().algebra
    }

    /// The defining adjunction, checked entrywise.
    fn adjunction_holds(a: &FrobeniusAlgebraData, delta: &MultiMap) -> bool {
        let d = a.dim();
        let deg = |i: usize| a.space.degree(i);
        for e in 0..d {
            for x in 0..d {
                for y in 0..d {
                    let lhs: Scalar = delta
                        .entries()
                        .iter()
                        .filter(|((_, ins), _)| ins[0] == e)
                        .map(|((outs, _), v)| v * sign(deg(outs[1]) * deg(x)) * a.pair(outs[0], x) * a.pair(outs[1], y))
                        .sum();
                    let rhs: Scalar = (0..d).map(|m| a.mult.entry(&[m], &[x, y]) * a.pair(e, m)).sum();
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn sphere_coproduct() {
        let a = alg("s2");
        let delta = coproduct_from_pairing(&a).unwrap();
        let (one, v) = (0, 1);
        assert_eq!(delta.nnz(), 3);
        assert_eq!(delta.entry(&[one, v], &[one]), q(1));
        assert_eq!(delta.entry(&[v, one], &[one]), q(1));
        assert_eq!(delta.entry(&[v, v], &[v]), q(1));
        assert!(adjunction_holds(&a, &delta));
    }

    #[test]
    fn point_coproduct() {
        let a = alg("pt");
        let delta = coproduct_from_pairing(&a).unwrap();
        assert_eq!(delta.nnz(), 1);
        assert_eq!(delta.entry(&[0, 0], &[0]), q(1));
    }

    #[test]
    fn torus_coproduct_has_signed_middle_terms() {
        let a = alg("t2");
        let delta = coproduct_from_pairing(&a).unwrap();
        let (one, ea, eb, v) = (0, 1, 2, 3);
        assert_eq!(delta.entry(&[one, v], &[one]), q(1));
        assert_eq!(delta.entry(&[v, one], &[one]), q(1));
        assert_eq!(delta.entry(&[ea, eb], &[one]), q(-1));
        assert_eq!(delta.entry(&[eb, ea], &[one]), q(1));
        assert!(adjunction_holds(&a, &delta));
        for name in ["s3", "cp2"] {
            let a = alg(name);
            assert!(adjunction_holds(&a, &coproduct_from_pairing(&a).unwrap()), "{name}");
        }
    }

    #[test]
    fn genus_operations() {
        let a = alg("s2");
        assert_eq!(genus_operation(&a, 2, 1, 0).unwrap(), a.mult);
        let h = genus_operation(&a, 1, 1, 1).unwrap();
        assert_eq!(h.entry(&[1], &[0]), q(2));
        assert_eq!(h.nnz(), 1);
        let t = alg("t2");
        assert!(genus_operation(&t, 1, 1, 1).unwrap().is_zero());
    }

    #[test]
    fn euler_characteristics() {
        for (name, chi) in [("s2", 2), ("t2", 0), ("s3", 0), ("cp2", 3), ("pt", 1)] {
            assert_eq!(euler_check(&alg(name)).unwrap(), q(chi), "{name}");
        }
        let cp2 = alg("cp2");
        let h = genus_operation(&cp2, 1, 1, 1).unwrap();
        assert_eq!(h.entry(&[2], &[0]), q(3));
    }

    #[test]
    fn relations_hold_for_even_n() {
        for name in ["s2", "t2", "cp2", "pt"] {
            for (rel, status) in verify_relations(&alg(name)).unwrap() {
                assert_eq!(status, RelationStatus::Holds, "{name}: {rel}");
            }
        }
    }

    #[test]
    fn odd_sphere_relations_hold_up_to_sign() {
        for (rel, status) in verify_relations(&alg("s3")).unwrap() {
            assert_ne!(status, RelationStatus::Fails, "{rel}");
        }
    }

    #[test]
    fn genus_operations_are_well_defined() {
        for name in ["s2", "t2"] {
            for (key, (count, status)) in well_definedness(&alg(name), 3, 4).unwrap() {
                assert_eq!((count, status), (1, RelationStatus::Holds), "{name} {key:?}");
            }
        }
        for (key, (_, status)) in well_definedness(&alg("s3"), 3, 4).unwrap() {
            assert_ne!(status, RelationStatus::Fails, "s3 {key:?}");
        }
    }

    #[test]
    fn dual_algebra() {
        for name in ["s2", "t2", "s3", "cp2", "pt"] {
            let a = alg(name);
            let dual = dualize(&a).unwrap();
            assert_eq!(euler_check(&dual).unwrap(), euler_check(&a).unwrap(), "{name}");
            assert!(duality_failures(&a, 4, 2).unwrap().is_empty(), "{name}");
            let back = dualize(&dual).unwrap();
            assert_eq!(back.mult.entries(), a.mult.entries(), "{name}");
            assert_eq!(back.pairing.entries(), a.pairing.entries(), "{name}");
        }
        let dual = dualize(&alg("s2")).unwrap();
        assert_eq!(dual.space.name(dual.unit), "v*");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_algebra("x", "n 2\nbasis 1 0\nunit 1\nfoo\n"), Err(Error::Input(_))));
        let degenerate = "n 2\nbasis 1 0\nbasis v 2\nunit 1\n";
        assert!(matches!(parse_algebra("x", degenerate), Err(Error::DegeneratePairing(_))));
        let bad_deg = "n 2\nbasis 1 0\nbasis v 2\nunit 1\npair 1 1 1\n";
        assert!(matches!(parse_algebra("x", bad_deg), Err(Error::Invariant(_))));
    }
}
