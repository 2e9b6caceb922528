//! Exact linear algebra over the rationals.
//!
//! Graded vector spaces with named bases, sparse degree-homogeneous linear
//! maps, chain complexes, deterministic linear solving and homology. Every
//! sign that arises from moving graded symbols past each other is decided by
//! [`koszul_sign`] and [`koszul_tensor`]; the rest of the crate routes its
//! sign bookkeeping through these two.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar, always normalized (lowest terms, positive denominator).
pub type Scalar = BigRational;

/// Integer scalar shorthand.
pub fn q(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Fraction shorthand. Panics on a zero denominator.
pub fn qf(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `(-1)^e` as a scalar.
pub fn sign(e: i64) -> Scalar {
    if e.rem_euclid(2) == 0 {
        q(1)
    } else {
        q(-1)
    }
}

/// Koszul sign for transposing symbols of degrees `a` and `b`.
pub fn koszul_sign(a: i64, b: i64) -> i64 {
    if a.rem_euclid(2) == 1 && b.rem_euclid(2) == 1 {
        -1
    } else {
        1
    }
}

/// Prints a scalar as `p` or `p/q`.
pub fn fmt_scalar(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let bad = || Error::Input(format!("malformed rational `{s}`"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

/// Finite graded vector space given by an ordered basis of named, graded elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    names: Vec<String>,
    degrees: Vec<i64>,
}

impl GradedSpace {
    pub fn new(basis: Vec<(String, i64)>) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, (name, _)) in basis.iter().enumerate() {
            if seen.insert(name.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate basis name `{name}`")));
            }
        }
        let (names, degrees) = basis.into_iter().unzip();
        Ok(Self { names, degrees })
    }

    /// Space with anonymous basis names `e0, e1, ...`.
    pub fn from_degrees(degrees: &[i64]) -> Self {
        Self {
            names: (0..degrees.len()).map(|i| format!("e{i}")).collect(),
            degrees: degrees.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Number of basis elements in the given degree.
    pub fn dim_in_degree(&self, degree: i64) -> usize {
        self.degrees.iter().filter(|&&d| d == degree).count()
    }

    /// Indices of basis elements of the given degree, in basis order.
    pub fn indices_in_degree(&self, degree: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == degree).collect()
    }

    /// Tensor product with lexicographic basis `(i, j) -> i * other.dim() + j`.
    pub fn tensor(&self, other: &GradedSpace) -> GradedSpace {
        let mut names = Vec::with_capacity(self.dim() * other.dim());
        let mut degrees = Vec::with_capacity(self.dim() * other.dim());
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                names.push(format!("{}⊗{}", self.names[i], other.names[j]));
                degrees.push(self.degrees[i] + other.degrees[j]);
            }
        }
        GradedSpace { names, degrees }
    }

    /// `k`-fold tensor power; the zeroth power is the ground field in degree 0.
    pub fn tensor_power(&self, k: usize) -> GradedSpace {
        let mut acc = GradedSpace { names: vec!["1".into()], degrees: vec![0] };
        for i in 0..k {
            acc = if i == 0 { self.clone() } else { acc.tensor(self) };
        }
        acc
    }

    /// Same basis with every degree moved by `by`.
    pub fn shifted(&self, by: i64) -> GradedSpace {
        GradedSpace {
            names: self.names.clone(),
            degrees: self.degrees.iter().map(|d| d + by).collect(),
        }
    }
}

/// Sparse degree-homogeneous linear map. Entries are keyed by
/// `(target index, source index)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub source: GradedSpace,
    pub target: GradedSpace,
    pub degree: i64,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl LinearMap {
    pub fn new(
        source: GradedSpace,
        target: GradedSpace,
        degree: i64,
        entries: impl IntoIterator<Item = ((usize, usize), Scalar)>,
    ) -> Result<Self> {
        let mut map = LinearMap::zero(source, target, degree);
        for ((r, c), v) in entries {
            if r >= map.target.dim() || c >= map.source.dim() {
                return Err(Error::Input(format!("entry ({r},{c}) outside the map's shape")));
            }
            map.add_entry(r, c, v);
        }
        for &(r, c) in map.entries.keys() {
            if map.target.degree(r) - map.source.degree(c) != degree {
                return Err(Error::Invariant(format!(
                    "entry {} <- {} does not have degree {degree}",
                    map.target.name(r),
                    map.source.name(c)
                )));
            }
        }
        Ok(map)
    }

    pub fn zero(source: GradedSpace, target: GradedSpace, degree: i64) -> Self {
        LinearMap { source, target, degree, entries: BTreeMap::new() }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        let entries = (0..space.dim()).map(|i| ((i, i), q(1))).collect();
        LinearMap { source: space.clone(), target: space.clone(), degree: 0, entries }
    }

    pub fn entry(&self, row: usize, col: usize) -> Scalar {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_entry(&mut self, r: usize, c: usize, v: Scalar) {
        if v.is_zero() {
            return;
        }
        let slot = self.entries.entry((r, c)).or_insert_with(Scalar::zero);
        *slot += v;
        if slot.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.source.dim() {
            return Err(Error::Dimension { expected: self.source.dim(), got: v.len() });
        }
        let mut out = vec![Scalar::zero(); self.target.dim()];
        for (&(r, c), a) in &self.entries {
            if !v[c].is_zero() {
                out[r] += a * &v[c];
            }
        }
        Ok(out)
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &LinearMap) -> Result<LinearMap> {
        if rhs.target.dim() != self.source.dim() {
            return Err(Error::Dimension { expected: self.source.dim(), got: rhs.target.dim() });
        }
        let mut by_row: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for (&(r, c), v) in &rhs.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = LinearMap::zero(rhs.source.clone(), self.target.clone(), self.degree + rhs.degree);
        for (&(r, m), a) in &self.entries {
            if let Some(row) = by_row.get(&m) {
                for &(c, b) in row {
                    out.add_entry(r, c, a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &LinearMap) -> Result<LinearMap> {
        if self.source.dim() != rhs.source.dim() || self.target.dim() != rhs.target.dim() {
            return Err(Error::Dimension { expected: self.source.dim(), got: rhs.source.dim() });
        }
        let mut out = self.clone();
        if rhs.degree != self.degree && !rhs.is_zero() && !self.is_zero() {
            return Err(Error::Invariant("adding maps of different degrees".into()));
        }
        if self.is_zero() {
            out.degree = rhs.degree;
        }
        for (&(r, c), v) in &rhs.entries {
            out.add_entry(r, c, v.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> LinearMap {
        let mut out = LinearMap::zero(self.source.clone(), self.target.clone(), self.degree);
        for (&(r, c), v) in &self.entries {
            out.add_entry(r, c, v * s);
        }
        out
    }

    /// Sparse rows (one per target element) for the solver.
    fn rows(&self) -> Vec<BTreeMap<usize, Scalar>> {
        let mut rows = vec![BTreeMap::new(); self.target.dim()];
        for (&(r, c), v) in &self.entries {
            rows[r].insert(c, v.clone());
        }
        rows
    }

    pub fn rank(&self) -> usize {
        let mut ech = RowEchelon::new();
        for row in self.rows() {
            ech.insert(row, Scalar::zero());
        }
        ech.rank()
    }
}

/// Incremental row echelon form over sparse rows with right-hand sides.
///
/// Pivots are keyed by their leading column. The pivot columns of a matrix
/// do not depend on the insertion order, so neither does [`RowEchelon::solution`].
#[derive(Clone, Debug, Default)]
pub struct RowEchelon {
    pivots: BTreeMap<usize, (BTreeMap<usize, Scalar>, Scalar)>,
    inconsistent: bool,
}

impl RowEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = &usize> {
        self.pivots.keys()
    }

    /// Reduces a row against the current pivots. Returns true when it
    /// introduced a new pivot.
    pub fn insert(&mut self, mut row: BTreeMap<usize, Scalar>, mut rhs: Scalar) -> bool {
        row.retain(|_, v| !v.is_zero());
        loop {
            let Some((&lead, lead_val)) = row.iter().next() else {
                if !rhs.is_zero() {
                    self.inconsistent = true;
                }
                return false;
            };
            let lead_val = lead_val.clone();
            match self.pivots.get(&lead) {
                Some((prow, prhs)) => {
                    for (c, v) in prow {
                        let e = row.entry(*c).or_insert_with(Scalar::zero);
                        *e -= &lead_val * v;
                        if e.is_zero() {
                            row.remove(c);
                        }
                    }
                    rhs -= &lead_val * prhs;
                }
                None => {
                    let inv = lead_val.recip();
                    for v in row.values_mut() {
                        *v *= &inv;
                    }
                    rhs *= &inv;
                    self.pivots.insert(lead, (row, rhs));
                    return true;
                }
            }
        }
    }

    /// Solution with every free variable set to zero, or `None` when inconsistent.
    pub fn solution(&self, ncols: usize) -> Option<Vec<Scalar>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Scalar::zero(); ncols];
        for (&col, (row, rhs)) in self.pivots.iter().rev() {
            let mut val = rhs.clone();
            for (c, v) in row.range(col + 1..) {
                if !x[*c].is_zero() {
                    val -= v * &x[*c];
                }
            }
            x[col] = val;
        }
        Some(x)
    }

    /// Basis of the null space of the inserted (homogeneous) rows, one
    /// vector per free column in increasing order.
    pub fn kernel(&self, ncols: usize) -> Vec<Vec<Scalar>> {
        let mut out = Vec::new();
        for free in (0..ncols).filter(|c| !self.pivots.contains_key(c)) {
            let mut x = vec![Scalar::zero(); ncols];
            x[free] = q(1);
            for (&col, (row, _)) in self.pivots.iter().rev() {
                let mut val = Scalar::zero();
                for (c, v) in row.range(col + 1..) {
                    if !x[*c].is_zero() {
                        val -= v * &x[*c];
                    }
                }
                x[col] = val;
            }
            out.push(x);
        }
        out
    }
}

/// Solves `map(v) = target` deterministically: reduced row echelon with
/// pivots taken in column order and free variables pinned to zero.
pub fn solve_linear(map: &LinearMap, target: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    if target.len() != map.target.dim() {
        return Err(Error::Dimension { expected: map.target.dim(), got: target.len() });
    }
    let mut ech = RowEchelon::new();
    for (row, rhs) in map.rows().into_iter().zip(target) {
        ech.insert(row, rhs.clone());
    }
    Ok(ech.solution(map.source.dim()))
}

/// A finite chain complex on a single graded space. `diff_degree` is +1
/// (cohomological) or -1 (homological).
#[derive(Clone, Debug)]
pub struct ChainComplex {
    space: GradedSpace,
    differential: LinearMap,
    diff_degree: i64,
}

impl ChainComplex {
    pub fn new(space: GradedSpace, differential: LinearMap) -> Result<Self> {
        let diff_degree = differential.degree;
        if diff_degree != 1 && diff_degree != -1 {
            return Err(Error::Invariant(format!("differential of degree {diff_degree}")));
        }
        if differential.source != space || differential.target != space {
            return Err(Error::Invariant("differential must be an endomorphism of the space".into()));
        }
        let sq = differential.compose(&differential)?;
        if let Some((&(r, c), _)) = sq.entries().next() {
            return Err(Error::Invariant(format!(
                "d∘d ≠ 0: nonzero at {} <- {}",
                space.name(r),
                space.name(c)
            )));
        }
        Ok(Self { space, differential, diff_degree })
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn differential(&self) -> &LinearMap {
        &self.differential
    }

    pub fn diff_degree(&self) -> i64 {
        self.diff_degree
    }

    /// Shift all degrees by `by`; the differential picks up `(-1)^by`.
    pub fn shifted(&self, by: i64) -> ChainComplex {
        let space = self.space.shifted(by);
        let s = sign(by);
        let entries: Vec<_> = self.differential.entries().map(|(&k, v)| (k, v * &s)).collect();
        let mut differential = LinearMap::zero(space.clone(), space.clone(), self.diff_degree);
        for ((r, c), v) in entries {
            differential.add_entry(r, c, v);
        }
        ChainComplex { space, differential, diff_degree: self.diff_degree }
    }

    /// The differential restricted to `degree -> degree + diff_degree`, as
    /// sparse rows over the local column indices of `degree`.
    fn block(&self, degree: i64) -> (Vec<usize>, Vec<usize>, Vec<BTreeMap<usize, Scalar>>) {
        let cols = self.space.indices_in_degree(degree);
        let rows = self.space.indices_in_degree(degree + self.diff_degree);
        let col_pos: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let row_pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut out = vec![BTreeMap::new(); rows.len()];
        for (&(r, c), v) in self.differential.entries() {
            if let (Some(&ri), Some(&ci)) = (row_pos.get(&r), col_pos.get(&c)) {
                out[ri].insert(ci, v.clone());
            }
        }
        (cols, rows, out)
    }
}

/// Homology in one degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Homology {
    pub betti: usize,
    /// Cycles (as full-length coordinate vectors) spanning a complement of the boundaries.
    pub representatives: Vec<Vec<Scalar>>,
}

pub fn homology(complex: &ChainComplex, degree: i64) -> Homology {
    let dim = complex.space.dim();
    let (cols, _, rows) = complex.block(degree);
    let mut ech = RowEchelon::new();
    for row in rows {
        ech.insert(row, Scalar::zero());
    }
    let cycles = ech.kernel(cols.len());

    // Boundaries landing in `degree`, in local coordinates.
    let (in_cols, in_rows, _) = complex.block(degree - complex.diff_degree);
    debug_assert_eq!(in_rows, cols);
    let pos: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut span = RowEchelon::new();
    let mut boundary_cols: BTreeMap<usize, BTreeMap<usize, Scalar>> = BTreeMap::new();
    for (&(r, c), v) in complex.differential.entries() {
        if in_cols.contains(&c) {
            if let Some(&ri) = pos.get(&r) {
                boundary_cols.entry(c).or_default().insert(ri, v.clone());
            }
        }
    }
    for (_, b) in boundary_cols {
        span.insert(b, Scalar::zero());
    }
    let mut representatives = Vec::new();
    for z in cycles {
        let row: BTreeMap<usize, Scalar> =
            z.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect();
        if span.insert(row, Scalar::zero()) {
            let mut full = vec![Scalar::zero(); dim];
            for (i, v) in z.into_iter().enumerate() {
                full[cols[i]] = v;
            }
            representatives.push(full);
        }
    }
    Homology { betti: representatives.len(), representatives }
}

/// `(f ⊗ g)(x ⊗ y) = (-1)^{|g||x|} f(x) ⊗ g(y)` on lexicographic tensor bases.
pub fn koszul_tensor(f: &LinearMap, g: &LinearMap) -> LinearMap {
    let source = f.source.tensor(&g.source);
    let target = f.target.tensor(&g.target);
    let (gs, gt) = (g.source.dim(), g.target.dim());
    let mut out = LinearMap::zero(source, target, f.degree + g.degree);
    for (&(fr, fc), a) in &f.entries {
        let s = koszul_sign(g.degree, f.source.degree(fc));
        for (&(gr, gc), b) in &g.entries {
            let v = if s < 0 { -(a * b) } else { a * b };
            out.add_entry(fr * gt + gr, fc * gs + gc, v);
        }
    }
    out
}

impl fmt::Display for GradedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.names.iter().zip(&self.degrees).map(|(n, d)| format!("{n}:{d}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// True when every coordinate is zero.
pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Largest absolute value among the coordinates, zero for the empty vector.
pub fn max_abs(v: impl IntoIterator<Item = Scalar>) -> Scalar {
    v.into_iter().map(|x| x.abs()).fold(Scalar::zero(), |a, b| if b > a { b } else { a })
}

pub fn is_one(s: &Scalar) -> bool {
    s.is_one()
}

/// Inverse of a square matrix by Gauss-Jordan elimination; `None` when singular.
pub fn invert_matrix(m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(deg: i64) -> GradedSpace {
        GradedSpace::from_degrees(&[deg])
    }

    #[test]
    fn matrix_inverse() {
        let m = vec![vec![q(0), q(1)], vec![q(2), q(3)]];
        let inv = invert_matrix(&m).unwrap();
        assert_eq!(inv, vec![vec![qf(-3, 2), qf(1, 2)], vec![q(1), q(0)]]);
        assert!(invert_matrix(&[vec![q(1), q(2)], vec![q(2), q(4)]]).is_none());
    }

    #[test]
    fn scalars_are_normalized() {
        let a = qf(6, -4);
        assert_eq!(a.numer(), &BigInt::from(-3));
        assert_eq!(a.denom(), &BigInt::from(2));
        assert_eq!(&a * a.recip(), q(1));
        assert_eq!(parse_scalar("-3/2").unwrap(), a);
        assert_eq!(fmt_scalar(&a), "-3/2");
        assert!(parse_scalar("1/0").is_err());
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(GradedSpace::new(vec![("a".into(), 0), ("a".into(), 1)]).is_err());
    }

    #[test]
    fn solve_identity_returns_target() {
        let v = GradedSpace::from_degrees(&[0, 0, 1]);
        let b = vec![q(3), qf(1, 2), q(-1)];
        assert_eq!(solve_linear(&LinearMap::identity(&v), &b).unwrap(), Some(b));
    }

    #[test]
    fn solve_zero_map_has_no_solution() {
        let v = GradedSpace::from_degrees(&[0, 0]);
        let z = LinearMap::zero(v.clone(), v, 0);
        assert_eq!(solve_linear(&z, &[q(1), q(0)]).unwrap(), None);
    }

    #[test]
    fn solve_pins_free_variable_to_zero() {
        // [[1,2],[2,4]] x = (1,2): hand elimination leaves x2 free.
        let v = GradedSpace::from_degrees(&[0, 0]);
        let m = LinearMap::new(
            v.clone(),
            v,
            0,
            [((0, 0), q(1)), ((0, 1), q(2)), ((1, 0), q(2)), ((1, 1), q(4))],
        )
        .unwrap();
        assert_eq!(solve_linear(&m, &[q(1), q(2)]).unwrap(), Some(vec![q(1), q(0)]));
        assert_eq!(solve_linear(&m, &[q(1), q(3)]).unwrap(), None);
    }

    #[test]
    fn solve_rejects_wrong_length() {
        let v = GradedSpace::from_degrees(&[0, 0]);
        assert!(matches!(
            solve_linear(&LinearMap::identity(&v), &[q(1)]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn entries_must_respect_degree() {
        let s = GradedSpace::from_degrees(&[0, 1]);
        assert!(LinearMap::new(s.clone(), s.clone(), 1, [((1, 0), q(1))]).is_ok());
        assert!(LinearMap::new(s.clone(), s, 1, [((0, 1), q(1))]).is_err());
    }

    #[test]
    fn zero_differential_has_all_cycles() {
        let v = line(0);
        let c = ChainComplex::new(v.clone(), LinearMap::zero(v.clone(), v, 1)).unwrap();
        assert_eq!(homology(&c, 0).betti, 1);
    }

    #[test]
    fn acyclic_two_term_complex() {
        let v = GradedSpace::from_degrees(&[0, 1]);
        let d = LinearMap::new(v.clone(), v.clone(), 1, [((1, 0), q(1))]).unwrap();
        let c = ChainComplex::new(v, d).unwrap();
        assert_eq!(homology(&c, 0).betti, 0);
        assert_eq!(homology(&c, 1).betti, 0);
    }

    #[test]
    fn simplicial_style_top_degree() {
        // two edges in degree 1 mapping to one vertex in degree 0, d = [[1,1]].
        let v = GradedSpace::from_degrees(&[1, 1, 0]);
        let d = LinearMap::new(v.clone(), v.clone(), -1, [((2, 0), q(1)), ((2, 1), q(1))]).unwrap();
        let c = ChainComplex::new(v, d).unwrap();
        let h = homology(&c, 1);
        assert_eq!(h.betti, 1);
        let z = &h.representatives[0];
        assert_eq!(c.differential().apply(z).unwrap(), vec![q(0); 3]);
        assert_eq!(homology(&c, 0).betti, 0);
    }

    #[test]
    fn non_square_zero_rejected() {
        let v = GradedSpace::from_degrees(&[0, 0]);
        let d = LinearMap::zero(v.clone(), v.clone(), 1);
        assert!(ChainComplex::new(v.clone(), d).is_ok());
        let w = GradedSpace::from_degrees(&[0, 1, 2]);
        let bad = LinearMap::new(w.clone(), w.clone(), 1, [((1, 0), q(1)), ((2, 1), q(1))]).unwrap();
        assert!(matches!(ChainComplex::new(w, bad), Err(Error::Invariant(_))));
    }

    #[test]
    fn even_tensor_is_kronecker() {
        let v = GradedSpace::from_degrees(&[0, 0]);
        let f = LinearMap::new(v.clone(), v.clone(), 0, [((0, 1), q(2)), ((1, 1), q(3))]).unwrap();
        let g = LinearMap::new(v.clone(), v.clone(), 0, [((0, 0), q(5)), ((1, 0), q(7))]).unwrap();
        let t = koszul_tensor(&f, &g);
        for (fr, fc) in [(0, 1), (1, 1)] {
            for (gr, gc) in [(0, 0), (1, 0)] {
                assert_eq!(t.entry(fr * 2 + gr, fc * 2 + gc), f.entry(fr, fc) * g.entry(gr, gc));
            }
        }
        assert_eq!(t.nnz(), 4);
    }

    #[test]
    fn odd_past_odd_picks_up_sign() {
        let odd = GradedSpace::from_degrees(&[1, 2]);
        let id = LinearMap::identity(&odd);
        let g = LinearMap::new(odd.clone(), odd.clone(), 1, [((1, 0), q(1))]).unwrap();
        let t = koszul_tensor(&id, &g);
        // x = basis 0 (degree 1), y = basis 0: sign (-1)^{1*1}
        assert_eq!(t.entry(1, 0), q(-1));
        // x = basis 1 (degree 2): no sign
        assert_eq!(t.entry(2 + 1, 2), q(1));
    }

    fn two_term(deg: i64) -> LinearMap {
        let v = GradedSpace::from_degrees(&[deg, deg + 1]);
        LinearMap::new(v.clone(), v, 1, [((1, 0), q(1))]).unwrap()
    }

    #[test]
    fn tensor_differential_squares_to_zero() {
        let d1 = two_term(0);
        let d2 = two_term(1);
        let id1 = LinearMap::identity(&d1.source);
        let id2 = LinearMap::identity(&d2.source);
        let d = koszul_tensor(&d1, &id2).add(&koszul_tensor(&id1, &d2)).unwrap();
        assert!(!d.is_zero());
        assert!(d.compose(&d).unwrap().is_zero());
        let c = ChainComplex::new(d.source.clone(), d).unwrap();
        for deg in 0..4 {
            assert_eq!(homology(&c, deg).betti, 0);
        }
    }

    #[test]
    fn shift_preserves_homology() {
        let v = GradedSpace::from_degrees(&[0, 1, 1, 2]);
        let d = LinearMap::new(v.clone(), v.clone(), 1, [((1, 0), q(1)), ((3, 2), q(1))]).unwrap();
        let c = ChainComplex::new(v, d).unwrap();
        let s = c.shifted(3);
        for deg in -1..4 {
            assert_eq!(homology(&c, deg).betti, homology(&s, deg + 3).betti);
        }
    }

    fn arb_map(dim: usize) -> impl Strategy<Value = LinearMap> {
        proptest::collection::vec(-3i64..4, dim * dim).prop_map(move |vals| {
            let v = GradedSpace::from_degrees(&vec![0; dim]);
            let entries = vals
                .iter()
                .enumerate()
                .map(|(i, &x)| ((i / dim, i % dim), q(x)))
                .collect::<Vec<_>>();
            LinearMap::new(v.clone(), v, 0, entries).unwrap()
        })
    }

    proptest! {
        #[test]
        fn solve_recovers_image(m in arb_map(4), x in proptest::collection::vec(-5i64..6, 4)) {
            let x: Vec<Scalar> = x.into_iter().map(q).collect();
            let b = m.apply(&x).unwrap();
            let sol = solve_linear(&m, &b).unwrap().expect("consistent by construction");
            prop_assert_eq!(m.apply(&sol).unwrap(), b);
        }

        #[test]
        fn tensor_is_associative(f in arb_map(2), g in arb_map(2), h in arb_map(2)) {
            let a = koszul_tensor(&koszul_tensor(&f, &g), &h);
            let b = koszul_tensor(&f, &koszul_tensor(&g, &h));
            prop_assert_eq!(a.entries().collect::<Vec<_>>(), b.entries().collect::<Vec<_>>());
        }
    }

    #[test]
    fn tensor_associative_with_odd_degrees() {
        let s = GradedSpace::from_degrees(&[0, 1]);
        let f = LinearMap::new(s.clone(), s.clone(), 1, [((1, 0), q(2))]).unwrap();
        let g = LinearMap::new(s.clone(), s.clone(), 0, [((1, 1), q(3)), ((0, 0), q(1))]).unwrap();
        let h = LinearMap::new(s.clone(), s.clone(), 1, [((1, 0), q(-1))]).unwrap();
        let a = koszul_tensor(&koszul_tensor(&f, &g), &h);
        let b = koszul_tensor(&f, &koszul_tensor(&g, &h));
        assert_eq!(a.entries().collect::<Vec<_>>(), b.entries().collect::<Vec<_>>());
    }
}
