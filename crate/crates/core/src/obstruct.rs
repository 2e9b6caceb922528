//! Weight-by-weight construction of a morphism from the cobar-bar
//! resolution of the Frobenius properad into `End(V)`.
//!
//! The morphism is determined by its values `φ(x)` on single-block bar
//! graphs. Values are stored on one representative per orbit of the leg
//! permutations and transported to the rest of the orbit by `sym_act`.
//! On a two-block element the value is the network of the two block
//! values, blocks in id order. For a bar graph `x` of weight `w + 1` the
//! chain-map condition reads `∂_End φ(x) = φ(d x) + φ(∂ x)`; the right side
//! is the obstruction cycle and `φ(x)` is any solution, chosen by the
//! deterministic solver and then averaged over the stabilizer of `x`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::One;

use crate::algebra::{genus_operation_with, AlgebraFile, FrobeniusAlgebraData, GeneratorImages};
use crate::bar::{
    cobar_degree, enumerate_inner, num_blocks, total_differential, total_genus, weight, CobarElement, CobarKey,
    Oriented, MAX_TRUNCATION_LEGS, MAX_TRUNCATION_WEIGHT,
};
use crate::endo::{basis_in_degree, end_differential, evaluate_network, sym_act, MultiMap, Word};
use crate::error::{Error, Result};
use crate::exact::{fmt_scalar, solve_linear, ChainComplex, GradedSpace, LinearMap, Scalar};
use crate::frob::FrobGenerator;
use crate::graph::{permutations, DirectedGraph, Edge, Label, Port, Skeleton};

/// A finite complex `V` with images of the four generators in `End(V)`.
#[derive(Clone, Debug)]
pub struct Target {
    pub name: String,
    pub n: i64,
    pub space: Arc<GradedSpace>,
    pub d: LinearMap,
    pub images: GeneratorImages,
}

fn embed(m: &MultiMap, space: &Arc<GradedSpace>) -> Result<MultiMap> {
    MultiMap::new(space.clone(), m.arity().0, m.arity().1, m.degree(), m.entries().iter().map(|(k, v)| (k.clone(), v.clone())))
}

impl Target {
    /// `A` itself with zero differential.
    pub fn strict(name: &str, a: &FrobeniusAlgebraData) -> Result<Target> {
        let space = a.space.clone();
        let d = LinearMap::zero((*space).clone(), (*space).clone(), 1);
        Ok(Target { name: name.to_string(), n: a.n, space, d, images: GeneratorImages::of(a)? })
    }

    /// `A ⊕ C` from an algebra file: the generators act through the
    /// projection to `A`, and the product is changed by the boundary of the
    /// homotopy plus the defect.
    pub fn from_file(file: &AlgebraFile) -> Result<Target> {
        let a = &file.algebra;
        let mut basis: Vec<(String, i64)> =
            (0..a.dim()).map(|i| (a.space.name(i).to_string(), a.space.degree(i))).collect();
        basis.extend(file.extras.iter().cloned());
        let space = Arc::new(GradedSpace::new(basis)?);
        let idx = |name: &str| space.index_of(name).ok_or_else(|| Error::Input(format!("unknown basis element {name}")));
        let mut entries = Vec::new();
        for (from, to, c) in &file.differential {
            entries.push(((idx(to)?, idx(from)?), c.clone()));
        }
        let d = LinearMap::new((*space).clone(), (*space).clone(), 1, entries)?;
        ChainComplex::new((*space).clone(), d.clone())?;
        let base = GeneratorImages::of(a)?;
        let mut mu = embed(&base.mu, &space)?;
        let triple = |t: &[(String, String, String, Scalar)], deg: i64| -> Result<MultiMap> {
            let mut e = Vec::new();
            for (x, y, z, c) in t {
                e.push(((vec![idx(z)?], vec![idx(x)?, idx(y)?]), c.clone()));
            }
            MultiMap::new(space.clone(), 2, 1, deg, e)
        };
        if !file.homotopy.is_empty() {
            mu = mu.add(&end_differential(&triple(&file.homotopy, -1)?, &d)?)?;
        }
        if !file.defect.is_empty() {
            mu = mu.add(&triple(&file.defect, 0)?)?;
        }
        let images = GeneratorImages {
            mu,
            eta: embed(&base.eta, &space)?,
            delta: embed(&base.delta, &space)?,
            eps: embed(&base.eps, &space)?,
        };
        Ok(Target { name: file.name.clone(), n: a.n, space, d, images })
    }

    pub fn has_zero_differential(&self) -> bool {
        self.d.is_zero()
    }

    fn zero(&self, j: usize, k: usize, degree: i64) -> MultiMap {
        MultiMap::zero(self.space.clone(), j, k, degree)
    }
}

/// Outcome of extending over one orbit representative.
#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub element: CobarKey,
    pub weight: usize,
    pub cycle: MultiMap,
    pub filled: bool,
    pub filler: Option<MultiMap>,
    /// Dimension of the homology of `End(V)(j,k)` in the cycle's degree,
    /// recorded when the cycle is not a boundary.
    pub homology_dim: Option<usize>,
}

impl fmt::Display for ObstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (j, k) = (self.element.inputs.len(), self.element.outputs.len());
        write!(
            f,
            "weight {} ({j},{k}) genus {} {}: cycle nnz {}, ",
            self.weight,
            total_genus(&self.element),
            Oriented::standard(self.element.clone()),
            self.cycle.nnz()
        )?;
        match (&self.filler, self.homology_dim) {
            (Some(h), _) => write!(f, "filled, filler nnz {}", h.nnz()),
            (None, d) => write!(f, "NOT fillable, homology dim {}", d.unwrap_or(0)),
        }
    }
}

/// Leg permutation taking the representative to a member of its orbit:
/// `member = sign · rep.permute_legs(sigma, tau)`.
#[derive(Clone, Debug)]
struct OrbitLink {
    rep: CobarKey,
    sigma: Vec<usize>,
    tau: Vec<usize>,
    sign: i64,
}

/// `(sigma, tau, sign)` with `rep = sign · rep.permute_legs(sigma, tau)`.
type LegSymmetry = (Vec<usize>, Vec<usize>, i64);

/// Values on orbit representatives of single-block bar graphs.
#[derive(Clone, Debug)]
pub struct PartialMorphism {
    pub target: Target,
    pub assignments: BTreeMap<CobarKey, MultiMap>,
    pub current_weight: usize,
    links: BTreeMap<CobarKey, OrbitLink>,
    stabilizers: BTreeMap<CobarKey, Vec<LegSymmetry>>,
    reports: Vec<ObstructionReport>,
    halted: bool,
}

/// Checks the generator images and sets up the weight-one values, which
/// are the genus operations built from the generators.
pub fn init_weight_zero(target: Target) -> Result<PartialMorphism> {
    if target.n.rem_euclid(2) != 0 {
        return Err(Error::OutOfRange(format!("resolution needs an even degree parameter, got {}", target.n)));
    }
    for g in FrobGenerator::ALL {
        let m = target.images.get(g);
        let e = g.element(target.n);
        if m.arity() != (e.j, e.k) || m.degree() != e.degree {
            return Err(Error::Invariant(format!(
                "image of {} has arity {:?} and degree {}, expected ({},{}) and {}",
                crate::graph::Decoration::label(&g),
                m.arity(),
                m.degree(),
                e.j,
                e.k,
                e.degree
            )));
        }
        let comm = end_differential(m, &target.d)?;
        if !comm.is_zero() {
            return Err(Error::Invariant(format!("image of {} is not a chain map: [d, f] = {comm}", crate::graph::Decoration::label(&g))));
        }
    }
    Ok(PartialMorphism {
        target,
        assignments: BTreeMap::new(),
        current_weight: 1,
        links: BTreeMap::new(),
        stabilizers: BTreeMap::new(),
        reports: Vec::new(),
        halted: false,
    })
}

/// Splits a multi-block element into its blocks, as bar graphs, and the
/// outer network whose vertex `b` is block `b`. Block legs list global legs
/// first, then crossing edges in edge order.
fn split_blocks(sk: &Skeleton<crate::frob::FrobBasisElement>) -> Result<(Vec<Oriented>, DirectedGraph<Label>)> {
    let blocks = sk.blocks.as_ref().expect("cobar element");
    let nb = num_blocks(sk);
    let mut pieces = Vec::new();
    // (0, leg) or (1, crossing edge) -> port on the outer network
    let mut ports_in: BTreeMap<(usize, usize), Port> = BTreeMap::new();
    let mut ports_out: BTreeMap<(usize, usize), Port> = BTreeMap::new();
    for b in 0..nb {
        let members: Vec<usize> = (0..blocks.len()).filter(|&v| blocks[v] == b).collect();
        let local = |v: usize| members.iter().position(|&m| m == v).unwrap();
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for (i, &v) in sk.inputs.iter().enumerate() {
            if blocks[v] == b {
                ports_in.insert((0, i), Port::new(b, inputs.len()));
                inputs.push(local(v));
            }
        }
        for (i, &v) in sk.outputs.iter().enumerate() {
            if blocks[v] == b {
                ports_out.insert((0, i), Port::new(b, outputs.len()));
                outputs.push(local(v));
            }
        }
        for (e, &(s, t)) in sk.edges.iter().enumerate() {
            if blocks[s] != blocks[t] {
                if blocks[t] == b {
                    ports_in.insert((1, e), Port::new(b, inputs.len()));
                    inputs.push(local(t));
                }
                if blocks[s] == b {
                    ports_out.insert((1, e), Port::new(b, outputs.len()));
                    outputs.push(local(s));
                }
            }
        }
        let mut edges: Vec<(usize, usize)> = sk
            .edges
            .iter()
            .filter(|&&(s, t)| blocks[s] == b && blocks[t] == b)
            .map(|&(s, t)| (local(s), local(t)))
            .collect();
        edges.sort();
        let inner = Skeleton {
            decos: members.iter().map(|&v| sk.decos[v]).collect(),
            edges,
            inputs,
            outputs,
            blocks: None,
        };
        pieces.push(Oriented::bar(inner));
    }
    let labels: Vec<Label> = pieces
        .iter()
        .map(|p| Label::new("block", p.sk.inputs.len(), p.sk.outputs.len()))
        .collect();
    let edges: Vec<Edge> = sk
        .edges
        .iter()
        .enumerate()
        .filter(|(_, &(s, t))| blocks[s] != blocks[t])
        .map(|(e, _)| Edge { from: ports_out[&(1, e)], to: ports_in[&(1, e)] })
        .collect();
    let inputs = (0..sk.inputs.len()).map(|i| ports_in[&(0, i)]).collect();
    let outputs = (0..sk.outputs.len()).map(|i| ports_out[&(0, i)]).collect();
    let net = DirectedGraph::new(labels, edges, inputs, outputs).map_err(|e| Error::Inconsistent(e.to_string()))?;
    Ok((pieces, net))
}

impl PartialMorphism {
    pub fn reports(&self) -> &[ObstructionReport] {
        &self.reports
    }

    pub fn halted(&self) -> bool {
        self.halted
    }

    fn link(&mut self, key: &CobarKey) -> OrbitLink {
        if let Some(l) = self.links.get(key) {
            return l.clone();
        }
        let unordered = key.canonize(false).skeleton;
        let (rep, _) = Oriented::standard(unordered)
            .canonicalize(true)
            .expect("orbit of a nonzero element is nonzero");
        let (j, k) = (key.inputs.len(), key.outputs.len());
        let base = Oriented::standard(rep.clone());
        let mut found = None;
        let mut stab = Vec::new();
        for sigma in permutations(j) {
            for tau in permutations(k) {
                if let Some((img, s)) = base.permute_legs(&sigma, &tau).canonicalize(true) {
                    if img == *key && found.is_none() {
                        found = Some(OrbitLink { rep: rep.clone(), sigma: sigma.clone(), tau: tau.clone(), sign: s });
                    }
                    if img == rep && !self.stabilizers.contains_key(&rep) {
                        stab.push((sigma.clone(), tau.clone(), s));
                    }
                }
            }
        }
        if !self.stabilizers.contains_key(&rep) {
            self.stabilizers.insert(rep.clone(), stab);
        }
        let l = found.expect("every ordering of the legs is reached");
        self.links.insert(key.clone(), l.clone());
        l
    }

    /// Orbit representative of a single-block key.
    pub fn representative(&mut self, key: &CobarKey) -> CobarKey {
        self.link(key).rep
    }

    /// `φ` on a canonical single-block key, extending as needed.
    pub fn value(&mut self, key: &CobarKey) -> Result<MultiMap> {
        let l = self.link(key);
        if !self.assignments.contains_key(&l.rep) {
            self.extend(&l.rep)?;
        }
        let base = &self.assignments[&l.rep];
        let m = sym_act(&l.sigma, base, &l.tau)?;
        Ok(if l.sign < 0 { m.scale(&-Scalar::one()) } else { m })
    }

    /// `φ` on a cobar basis element (one or two blocks here).
    pub fn value_on(&mut self, key: &CobarKey) -> Result<MultiMap> {
        match num_blocks(key) {
            1 => self.value(key),
            _ => {
                let (pieces, net) = split_blocks(key)?;
                let mut maps = Vec::new();
                for p in &pieces {
                    let (k, s) = p.canonicalize(true).expect("blocks of a nonzero element are nonzero");
                    let v = self.value(&k)?;
                    maps.push(if s < 0 { v.scale(&-Scalar::one()) } else { v });
                }
                let refs: Vec<&MultiMap> = maps.iter().collect();
                evaluate_network(&net, &refs)
            }
        }
    }

    /// `φ` applied to a combination.
    pub fn value_on_element(&mut self, x: &CobarElement, j: usize, k: usize, degree: i64) -> Result<MultiMap> {
        let mut acc = self.target.zero(j, k, degree);
        for (t, c) in &x.terms {
            acc = acc.add(&self.value_on(t)?.scale(c))?;
        }
        Ok(acc)
    }

    /// `φ(d x) + φ(∂ x)`, checked to be a cycle.
    pub fn obstruction_cycle(&mut self, rep: &CobarKey) -> Result<MultiMap> {
        let (j, k) = (rep.inputs.len(), rep.outputs.len());
        let dx = total_differential(&CobarElement::basis(rep.clone()));
        let c = self.value_on_element(&dx, j, k, cobar_degree(rep) + 1)?;
        let dc = end_differential(&c, &self.target.d)?;
        if !dc.is_zero() {
            return Err(Error::Inconsistent(format!(
                "obstruction for {} is not a cycle",
                Oriented::standard(rep.clone())
            )));
        }
        Ok(c)
    }

    fn average(&self, rep: &CobarKey, h: &MultiMap) -> Result<MultiMap> {
        let stab = &self.stabilizers[rep];
        if stab.len() <= 1 {
            return Ok(h.clone());
        }
        let mut acc = self.target.zero(h.arity().0, h.arity().1, h.degree());
        for (sigma, tau, s) in stab {
            let m = sym_act(sigma, h, tau)?;
            acc = acc.add(&if *s < 0 { m.scale(&-Scalar::one()) } else { m })?;
        }
        Ok(acc.scale(&Scalar::from_integer((stab.len() as i64).into()).recip()))
    }

    /// Assigns `φ(rep)`. Weight one takes the genus operation; higher
    /// weights solve against the obstruction cycle and record a report.
    pub fn extend(&mut self, rep: &CobarKey) -> Result<()> {
        if self.halted {
            return Err(Error::Inconsistent("resolution halted at an unfillable obstruction".into()));
        }
        let (j, k) = (rep.inputs.len(), rep.outputs.len());
        let degree = cobar_degree(rep);
        self.link(rep);
        if weight(rep) == 1 {
            let e = rep.decos[0];
            let m = genus_operation_with(&self.target.images, e.j, e.k, e.g)?;
            if m.degree() != degree {
                return Err(Error::Inconsistent(format!("genus operation {e} has degree {}", m.degree())));
            }
            let m = self.average(rep, &m)?;
            self.assignments.insert(rep.clone(), m);
            return Ok(());
        }
        let c = self.obstruction_cycle(rep)?;
        let filler = if c.is_zero() { Some(self.target.zero(j, k, degree)) } else { self.solve(&c, degree)? };
        let filler = match filler {
            Some(h) => {
                let h = self.average(rep, &h)?;
                if end_differential(&h, &self.target.d)?.sub(&c)?.is_zero() {
                    Some(h)
                } else {
                    return Err(Error::Inconsistent("averaged filler does not bound the cycle".into()));
                }
            }
            None => None,
        };
        let report = ObstructionReport {
            element: rep.clone(),
            weight: weight(rep),
            cycle: c.clone(),
            filled: filler.is_some(),
            filler: filler.clone(),
            homology_dim: if filler.is_none() { Some(self.homology_dim(j, k, degree + 1)?) } else { None },
        };
        self.reports.push(report);
        self.current_weight = self.current_weight.max(weight(rep));
        match filler {
            Some(h) => {
                self.assignments.insert(rep.clone(), h);
                Ok(())
            }
            None => {
                self.halted = true;
                Err(Error::Inconsistent(format!(
                    "obstruction for {} is not a boundary",
                    Oriented::standard(rep.clone())
                )))
            }
        }
    }

    /// The matrix of `∂_End` from degree `deg` to `deg + 1` in `(j, k)`.
    fn end_matrix(&self, j: usize, k: usize, deg: i64) -> Result<(Vec<(Word, Word)>, LinearMap)> {
        let cols = basis_in_degree(&self.target.space, j, k, deg);
        let rows = basis_in_degree(&self.target.space, j, k, deg + 1);
        let row_index: BTreeMap<&(Vec<usize>, Vec<usize>), usize> = rows.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let mut entries = Vec::new();
        for (c, (o, i)) in cols.iter().enumerate() {
            let e = MultiMap::elementary(self.target.space.clone(), o.clone(), i.clone());
            for (key, v) in end_differential(&e, &self.target.d)?.entries() {
                entries.push(((row_index[key], c), v.clone()));
            }
        }
        let map = LinearMap::new(
            GradedSpace::from_degrees(&vec![0; cols.len()]),
            GradedSpace::from_degrees(&vec![0; rows.len()]),
            0,
            entries,
        )?;
        Ok((cols, map))
    }

    fn solve(&self, c: &MultiMap, degree: i64) -> Result<Option<MultiMap>> {
        if self.target.has_zero_differential() {
            return Ok(None);
        }
        let (j, k) = c.arity();
        let (cols, map) = self.end_matrix(j, k, degree)?;
        let rows = basis_in_degree(&self.target.space, j, k, degree + 1);
        let rhs: Vec<Scalar> = rows.iter().map(|(o, i)| c.entry(o, i)).collect();
        Ok(solve_linear(&map, &rhs)?.map(|x| {
            let mut h = self.target.zero(j, k, degree);
            for (v, (o, i)) in x.into_iter().zip(cols) {
                h.add_entry(o, i, v);
            }
            h
        }))
    }

    fn homology_dim(&self, j: usize, k: usize, deg: i64) -> Result<usize> {
        let here = basis_in_degree(&self.target.space, j, k, deg).len();
        let (_, into) = self.end_matrix(j, k, deg - 1)?;
        let (_, out) = self.end_matrix(j, k, deg)?;
        Ok(here - into.rank() - out.rank())
    }

    /// Re-checks the chain-map condition on every assigned representative
    /// and equivariance on every leg ordering of it.
    pub fn audit(&mut self) -> Result<ResolutionAudit> {
        let mut audit = ResolutionAudit::default();
        let reps: Vec<CobarKey> = self.assignments.keys().cloned().collect();
        for rep in reps {
            let (j, k) = (rep.inputs.len(), rep.outputs.len());
            let lhs = end_differential(&self.assignments[&rep].clone(), &self.target.d)?;
            let dx = total_differential(&CobarElement::basis(rep.clone()));
            let rhs = self.value_on_element(&dx, j, k, cobar_degree(&rep) + 1)?;
            audit.chain_checked += 1;
            if !lhs.sub(&rhs)?.is_zero() {
                audit.failures.push(format!("chain condition fails on {}", Oriented::standard(rep.clone())));
            }
            if j + k > MAX_TRUNCATION_LEGS {
                continue;
            }
            let phi = self.assignments[&rep].clone();
            let base = Oriented::standard(rep.clone());
            for sigma in permutations(j) {
                for tau in permutations(k) {
                    let Some((img, s)) = base.permute_legs(&sigma, &tau).canonicalize(true) else { continue };
                    let expected = sym_act(&sigma, &phi, &tau)?;
                    let got = self.value(&img)?;
                    let got = if s < 0 { got.scale(&-Scalar::one()) } else { got };
                    audit.equivariance_checked += 1;
                    if !got.sub(&expected)?.is_zero() {
                        audit.failures.push(format!("equivariance fails on {}", Oriented::standard(rep.clone())));
                    }
                }
            }
        }
        Ok(audit)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ResolutionAudit {
    pub chain_checked: usize,
    pub equivariance_checked: usize,
    pub failures: Vec<String>,
}

impl ResolutionAudit {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Orbit representatives with `j + k <= MAX_TRUNCATION_LEGS`, weight up to
/// `max_weight` and genus up to `max_genus`, in weight order then
/// canonical order.
pub fn representatives(max_weight: usize, max_genus: usize, n: i64) -> Result<Vec<CobarKey>> {
    let mut by_weight: BTreeMap<usize, Vec<CobarKey>> = BTreeMap::new();
    for j in 1..MAX_TRUNCATION_LEGS {
        for k in 1..=MAX_TRUNCATION_LEGS - j {
            for g in 0..=max_genus {
                for w in 1..=max_weight {
                    for u in enumerate_inner(j, k, w, g, n, false)? {
                        if let Some((key, _)) = Oriented::bar(u).canonicalize(true) {
                            by_weight.entry(w).or_default().push(key);
                        }
                    }
                }
            }
        }
    }
    Ok(by_weight
        .into_values()
        .flat_map(|mut v| {
            v.sort();
            v.dedup();
            v
        })
        .collect())
}

/// Result of a full run.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub morphism: PartialMorphism,
    pub audit: ResolutionAudit,
}

impl Resolution {
    pub fn reports(&self) -> &[ObstructionReport] {
        self.morphism.reports()
    }

    pub fn all_filled(&self) -> bool {
        !self.morphism.halted() && self.reports().iter().all(|r| r.filled)
    }

    pub fn first_unfilled(&self) -> Option<&ObstructionReport> {
        self.reports().iter().find(|r| !r.filled)
    }

    pub fn nonzero_fillers(&self) -> usize {
        self.reports().iter().filter(|r| r.filler.as_ref().is_some_and(|h| !h.is_zero())).count()
    }

    /// Per-record lines followed by a summary.
    pub fn report_text(&self) -> String {
        let mut s = format!("target {}\n", self.morphism.target.name);
        for r in self.reports() {
            s.push_str(&format!("{r}\n"));
            if let Some(h) = r.filler.as_ref().filter(|h| !h.is_zero()) {
                for line in h.to_text().lines() {
                    s.push_str(&format!("  {line}\n"));
                }
            }
        }
        let zero = self.reports().iter().filter(|r| r.filled).count() - self.nonzero_fillers();
        s.push_str(&format!(
            "summary: {} obstructions, {} zero fillers, {} nonzero fillers, {}\n",
            self.reports().len(),
            zero,
            self.nonzero_fillers(),
            match self.first_unfilled() {
                Some(r) => format!("halted at weight {}", r.weight),
                None => "all filled".to_string(),
            }
        ));
        s.push_str(&format!(
            "audit: {} chain conditions, {} equivariance checks, {}\n",
            self.audit.chain_checked,
            self.audit.equivariance_checked,
            if self.audit.passed() { "pass".to_string() } else { format!("{} failures", self.audit.failures.len()) }
        ));
        s
    }
}

/// Extends over every representative in weight order, stopping at the
/// first obstruction that is not a boundary, then audits what was built.
pub fn run_resolution(target: Target, max_weight: usize, max_genus: usize) -> Result<Resolution> {
    if max_weight > MAX_TRUNCATION_WEIGHT {
        return Err(Error::Resource(format!("resolution is limited to weight {MAX_TRUNCATION_WEIGHT}")));
    }
    let n = target.n;
    let mut phi = init_weight_zero(target)?;
    for rep in representatives(max_weight, max_genus, n)? {
        if phi.assignments.contains_key(&rep) {
            continue;
        }
        match phi.extend(&rep) {
            Ok(()) => {}
            Err(_) if phi.halted() => break,
            Err(e) => return Err(e),
        }
    }
    let audit = phi.audit()?;
    Ok(Resolution { morphism: phi, audit })
}

/// Formats a scalar-valued summary of a filler for quick inspection.
pub fn describe_filler(h: &MultiMap) -> String {
    if h.is_zero() {
        return "0".into();
    }
    h.entries().iter().map(|((o, i), v)| format!("{}·{:?}<-{:?}", fmt_scalar(v), o, i)).collect::<Vec<_>>().join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::load_algebra;

    fn target(name: &str) -> Target {
        let f = load_algebra(name).unwrap();
        if f.extras.is_empty() && f.homotopy.is_empty() && f.defect.is_empty() {
            Target::strict(name, &f.algebra).unwrap()
        } else {
            Target::from_file(&f).unwrap()
        }
    }

    #[test]
    fn generator_images_are_checked() {
        let mut t = target("s2");
        assert!(init_weight_zero(t.clone()).is_ok());
        t.images.mu = MultiMap::zero(t.space.clone(), 2, 1, 1);
        assert!(matches!(init_weight_zero(t), Err(Error::Invariant(_))));
    }

    #[test]
    fn non_chain_map_image_is_rejected() {
        // 1 ⊗ x -> x alone does not commute with x -> y
        let mut t = target("s2_perturbed");
        let (one, x) = (t.space.index_of("1").unwrap(), t.space.index_of("x").unwrap());
        t.images.mu.add_entry(vec![x], vec![one, x], Scalar::one());
        assert!(matches!(init_weight_zero(t), Err(Error::Invariant(_))));
    }

    #[test]
    fn strict_associativity_obstruction_vanishes() {
        let mut phi = init_weight_zero(target("s2")).unwrap();
        let n = 2;
        let two = enumerate_inner(3, 1, 2, 0, n, false).unwrap();
        assert!(!two.is_empty());
        for u in two {
            let (key, _) = Oriented::bar(u).canonicalize(true).unwrap();
            let rep = phi.representative(&key);
            assert!(phi.obstruction_cycle(&rep).unwrap().is_zero());
        }
    }

    #[test]
    fn perturbed_product_is_not_associative() {
        let t = target("s2_perturbed");
        let mu = &t.images.mu;
        let left = crate::endo::end_compose(&[mu, &MultiMap::identity(t.space.clone())], mu, &[0, 1]).unwrap();
        let right = crate::endo::end_compose(&[&MultiMap::identity(t.space.clone()), mu], mu, &[0, 1]).unwrap();
        assert!(!left.sub(&right).unwrap().is_zero());
    }

    #[test]
    fn broken_target_halts_at_weight_two() {
        let r = run_resolution(target("s2_broken"), 3, 0).unwrap();
        let bad = r.first_unfilled().expect("an unfillable obstruction");
        assert_eq!(bad.weight, 2);
        assert!(bad.homology_dim.unwrap() > 0);
        assert!(!bad.cycle.is_zero());
        assert!(r.audit.passed(), "{:?}", r.audit.failures);
    }

    #[test]
    fn strict_genus_zero_run() {
        let r = run_resolution(target("s2"), 3, 0).unwrap();
        assert!(r.all_filled());
        assert_eq!(r.nonzero_fillers(), 0);
        assert!(r.audit.passed(), "{:?}", r.audit.failures);
    }

    #[test]
    fn perturbed_genus_zero_run() {
        let r = run_resolution(target("s2_perturbed"), 3, 0).unwrap();
        assert!(r.all_filled(), "{}", r.report_text());
        assert!(r.nonzero_fillers() > 0);
        assert!(r.audit.passed(), "{:?}", r.audit.failures);
    }

    #[test]
    fn deterministic_fillers() {
        let a = run_resolution(target("s2_perturbed"), 2, 0).unwrap();
        let b = run_resolution(target("s2_perturbed"), 2, 0).unwrap();
        assert_eq!(a.report_text(), b.report_text());
    }

    #[test]
    fn weight_bound_is_enforced() {
        assert!(matches!(run_resolution(target("s2"), 4, 0), Err(Error::Resource(_))));
    }
}
