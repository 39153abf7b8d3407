//! ADE root lattices, enumeration of (-2)-vectors and Dynkin classification.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::{rank, IntMatrix};
use crate::lattice::Lattice;

pub type Root = Vec<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    D,
    E,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::D => 'D',
            Family::E => 'E',
        }
    }
}

pub fn valid_component(f: Family, n: usize) -> bool {
    match f {
        Family::A => n >= 1,
        Family::D => n >= 4,
        Family::E => (6..=8).contains(&n),
    }
}

/// Edges of the Dynkin diagram with the node numbering used by [`ade_lattice`].
pub fn dynkin_edges(f: Family, n: usize) -> Vec<(usize, usize)> {
    match f {
        Family::A => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        Family::D => {
            // path 0..n-2, node n-1 attached to n-3
            let mut e: Vec<_> = (0..n - 2).map(|i| (i, i + 1)).collect();
            e.push((n - 3, n - 1));
            e
        }
        Family::E => {
            let mut e = vec![(0, 2), (1, 3)];
            e.extend((2..n - 1).map(|i| (i, i + 1)));
            e.sort_unstable();
            e
        }
    }
}

/// Negative definite Gram matrix of A_n, D_n or E_n.
pub fn ade_gram(f: Family, n: usize) -> Result<IntMatrix> {
    if !valid_component(f, n) {
        return Err(Error::InvalidRootSystem(format!("{}{}", f.letter(), n)));
    }
    let mut g = IntMatrix::zeros(n, n);
    for i in 0..n {
        g.set(i, i, BigInt::from(-2));
    }
    for (i, j) in dynkin_edges(f, n) {
        g.set(i, j, BigInt::one());
        g.set(j, i, BigInt::one());
    }
    Ok(g)
}

pub fn ade_lattice(f: Family, n: usize) -> Result<Lattice> {
    Ok(Lattice::new(ade_gram(f, n)?)?.with_name(format!("{}{}", f.letter(), n)))
}

/// A multiset of irreducible ADE components.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootSystemType {
    components: Vec<(Family, usize)>,
}

impl RootSystemType {
    pub fn new(mut components: Vec<(Family, usize)>) -> Result<Self> {
        for &(f, n) in &components {
            if !valid_component(f, n) {
                return Err(Error::InvalidRootSystem(format!("{}{}", f.letter(), n)));
            }
        }
        components.sort_unstable();
        Ok(RootSystemType { components })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn components(&self) -> &[(Family, usize)] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Total rank, which is also the number of Dynkin vertices.
    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.1).sum()
    }

    pub fn num_roots(&self) -> usize {
        self.components.iter().map(|&(f, n)| component_root_count(f, n)).sum()
    }

    pub fn sum(&self, other: &RootSystemType) -> RootSystemType {
        let mut c = self.components.clone();
        c.extend(&other.components);
        c.sort_unstable();
        RootSystemType { components: c }
    }

    /// Orthogonal sum of the component root lattices.
    pub fn lattice(&self) -> Lattice {
        let mut l = Lattice::zero();
        for &(f, n) in &self.components {
            l = l.direct_sum(&ade_lattice(f, n).expect("validated"));
        }
        l.with_name(self.to_string())
    }
}

pub fn component_root_count(f: Family, n: usize) -> usize {
    match (f, n) {
        (Family::A, n) => n * (n + 1),
        (Family::D, n) => 2 * n * (n - 1),
        (Family::E, 6) => 72,
        (Family::E, 7) => 126,
        (Family::E, _) => 240,
    }
}

impl fmt::Display for RootSystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let mut counts: BTreeMap<(Family, usize), usize> = BTreeMap::new();
        for c in &self.components {
            *counts.entry(*c).or_default() += 1;
        }
        let parts: Vec<String> = counts
            .into_iter()
            .map(|((fam, n), k)| if k == 1 { format!("{}{}", fam.letter(), n) } else { format!("{}{}{}", k, fam.letter(), n) })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Parses one `COUNT? FAMILY RANK` token.
pub fn parse_component(tok: &str) -> Result<(usize, Family, usize)> {
    let tok = tok.trim();
    let bad = || Error::InvalidRootSystem(format!("bad component {tok:?}"));
    let pos = tok.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(bad)?;
    let count = if pos == 0 { 1 } else { tok[..pos].parse::<usize>().map_err(|_| bad())? };
    let fam = match &tok[pos..pos + 1] {
        "A" => Family::A,
        "D" => Family::D,
        "E" => Family::E,
        _ => return Err(bad()),
    };
    let n: usize = tok[pos + 1..].parse().map_err(|_| bad())?;
    if count == 0 || !valid_component(fam, n) {
        return Err(bad());
    }
    Ok((count, fam, n))
}

impl FromStr for RootSystemType {
    type Err = Error;

    /// Accepts `0` for the empty system, otherwise `+`-joined components such as `2A1+A3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Self::empty());
        }
        let mut comps = Vec::new();
        for tok in s.split('+') {
            let (k, f, n) = parse_component(tok)?;
            comps.extend(std::iter::repeat((f, n)).take(k));
        }
        RootSystemType::new(comps)
    }
}

fn gram_i64(g: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    (0..g.rows())
        .map(|i| {
            (0..g.cols())
                .map(|j| g.get(i, j).to_i64().ok_or_else(|| Error::Overflow("gram entry".into())))
                .collect()
        })
        .collect()
}

fn pair(g: &[Vec<i64>], x: &[i64], y: &[i64]) -> i128 {
    let mut s: i128 = 0;
    for i in 0..x.len() {
        if x[i] == 0 {
            continue;
        }
        let mut t: i128 = 0;
        for j in 0..y.len() {
            if y[j] != 0 {
                t += g[i][j] as i128 * y[j] as i128;
            }
        }
        s += x[i] as i128 * t;
    }
    s
}

/// All v with v·v = -2, sorted lexicographically. Exact Fincke–Pohst search on -G.
pub fn enumerate_roots(l: &Lattice) -> Result<Vec<Root>> {
    vectors_of_norm(l, 2)
}

/// All v with v·v = -norm in a negative definite lattice, sorted lexicographically.
pub fn vectors_of_norm(l: &Lattice, norm: i64) -> Result<Vec<Root>> {
    if !l.is_negative_definite() {
        return Err(Error::NotNegativeDefinite);
    }
    let n = l.rank();
    if n == 0 {
        return Ok(vec![]);
    }
    // Q(x) = Σ d_i (x_i + Σ_{j>i} mu_ij x_j)^2 for the positive form -G
    let mut q: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(-l.gram().get(i, j).clone())).collect())
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j].clone();
            let v = &q[i][j] / &q[i][i];
            q[i][j] = v;
        }
        for k in i + 1..n {
            for m in k..n {
                let v = &q[k][i] * &q[i][m];
                q[k][m] -= v;
            }
        }
    }
    let gram = gram_i64(l.gram())?;
    let bound = BigRational::from_integer(BigInt::from(norm));
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    descend(&q, n - 1, &bound, &mut x, &mut out)?;
    out.retain(|v| v.iter().any(|&c| c != 0) && pair(&gram, v, v) == -(norm as i128));
    out.sort();
    Ok(out)
}

fn descend(q: &[Vec<BigRational>], i: usize, rem: &BigRational, x: &mut Vec<i64>, out: &mut Vec<Root>) -> Result<()> {
    let n = q.len();
    let mut c = BigRational::zero();
    for j in i + 1..n {
        if x[j] != 0 {
            c -= &q[i][j] * BigRational::from_integer(BigInt::from(x[j]));
        }
    }
    let d = &q[i][i];
    let cf = c.to_f64().unwrap_or(0.0);
    let r = (rem / d).to_f64().unwrap_or(0.0).max(0.0).sqrt();
    let lo = (cf - r).floor() as i64 - 1;
    let hi = (cf + r).ceil() as i64 + 1;
    for v in lo..=hi {
        let diff = BigRational::from_integer(BigInt::from(v)) - &c;
        let used = d * &diff * &diff;
        if &used > rem {
            continue;
        }
        x[i] = v;
        if i == 0 {
            out.push(x.clone());
        } else {
            let next = rem - used;
            descend(q, i - 1, &next, x, out)?;
        }
    }
    x[i] = 0;
    Ok(())
}

/// Positive roots of one ADE component in simple-root coordinates, sorted.
///
/// Grows the set from the simple roots: β + α_i is a root exactly when β·α_i = 1.
pub fn positive_roots(f: Family, n: usize) -> Result<Vec<Root>> {
    let g = gram_i64(&ade_gram(f, n)?)?;
    let mut seen: HashSet<Root> = HashSet::new();
    let mut layer: Vec<Root> = (0..n)
        .map(|i| {
            let mut v = vec![0i64; n];
            v[i] = 1;
            v
        })
        .collect();
    seen.extend(layer.iter().cloned());
    while !layer.is_empty() {
        let mut next = Vec::new();
        for b in &layer {
            for i in 0..n {
                // b·α_i = Σ_j b_j g[j][i]
                let p: i64 = (0..n).map(|j| b[j] * g[j][i]).sum();
                if p == 1 {
                    let mut c = b.clone();
                    c[i] += 1;
                    if seen.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
        }
        layer = next;
    }
    let mut out: Vec<Root> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Roots with a chosen base and the resulting Dynkin type.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub root_type: RootSystemType,
    pub roots: Vec<Root>,
    pub simple_roots: Vec<Root>,
}

impl RootSystem {
    /// Basis of the lattice generated by the roots (the simple roots).
    pub fn root_sublattice_basis(&self) -> Vec<Root> {
        self.simple_roots.clone()
    }
}

fn is_positive(v: &[i64]) -> bool {
    v.iter().rev().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Classifies an explicit root set closed under negation, with pairings from `gram`.
pub fn classify_roots(gram: &IntMatrix, roots: &[Root]) -> Result<RootSystem> {
    let g = gram_i64(gram)?;
    let positive: Vec<&Root> = roots.iter().filter(|r| is_positive(r)).collect();
    let pos_set: HashSet<&[i64]> = positive.iter().map(|r| r.as_slice()).collect();
    let mut simple: Vec<Root> = Vec::new();
    for a in &positive {
        let decomposable = positive.iter().any(|b| {
            let diff: Vec<i64> = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
            pos_set.contains(diff.as_slice())
        });
        if !decomposable {
            simple.push((*a).clone());
        }
    }
    let m = simple.len();
    if m > 0 {
        let span = IntMatrix::from_big_rows(
            &simple.iter().map(|r| r.iter().map(|&c| BigInt::from(c)).collect()).collect::<Vec<_>>(),
            simple[0].len(),
        )?;
        if rank(&span) != m {
            return Err(Error::NotSimplyLaced("simple roots are dependent".into()));
        }
    }
    let mut adj = vec![Vec::new(); m];
    for i in 0..m {
        for j in i + 1..m {
            match pair(&g, &simple[i], &simple[j]) {
                0 => {}
                1 => {
                    adj[i].push(j);
                    adj[j].push(i);
                }
                v => return Err(Error::NotSimplyLaced(format!("simple roots pair to {v}"))),
            }
        }
    }
    let mut seen = vec![false; m];
    let mut comps = Vec::new();
    for s in 0..m {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        let mut nodes = Vec::new();
        seen[s] = true;
        while let Some(v) = stack.pop() {
            nodes.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comps.push(name_component(&nodes, &adj)?);
    }
    Ok(RootSystem { root_type: RootSystemType::new(comps)?, roots: roots.to_vec(), simple_roots: simple })
}

fn name_component(nodes: &[usize], adj: &[Vec<usize>]) -> Result<(Family, usize)> {
    let n = nodes.len();
    let edges: usize = nodes.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
    if edges != n - 1 {
        return Err(Error::NotSimplyLaced("Dynkin graph has a cycle".into()));
    }
    let branch: Vec<usize> = nodes.iter().copied().filter(|&v| adj[v].len() >= 3).collect();
    if branch.is_empty() {
        return Ok((Family::A, n));
    }
    if branch.len() > 1 || adj[branch[0]].len() > 3 {
        return Err(Error::NotSimplyLaced("not an ADE diagram".into()));
    }
    let c = branch[0];
    let mut arms: Vec<usize> = adj[c]
        .iter()
        .map(|&start| {
            let (mut prev, mut cur, mut len) = (c, start, 1);
            while let Some(&next) = adj[cur].iter().find(|&&w| w != prev) {
                prev = cur;
                cur = next;
                len += 1;
            }
            len
        })
        .collect();
    arms.sort_unstable();
    match (arms[0], arms[1], arms[2]) {
        (1, 1, m) => Ok((Family::D, m + 3)),
        (1, 2, 2) => Ok((Family::E, 6)),
        (1, 2, 3) => Ok((Family::E, 7)),
        (1, 2, 4) => Ok((Family::E, 8)),
        _ => Err(Error::NotSimplyLaced(format!("arms {arms:?}"))),
    }
}

/// Enumerates the roots of a negative definite lattice and names their Dynkin type.
pub fn classify_root_system(l: &Lattice) -> Result<RootSystem> {
    let roots = enumerate_roots(l)?;
    classify_roots(l.gram(), &roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn determinants() {
        let det = |f, n| ade_lattice(f, n).unwrap().determinant().abs();
        assert_eq!(det(Family::A, 5), BigInt::from(6));
        assert_eq!(det(Family::D, 4), BigInt::from(4));
        assert_eq!(det(Family::D, 7), BigInt::from(4));
        assert_eq!(det(Family::E, 6), BigInt::from(3));
        assert_eq!(det(Family::E, 7), BigInt::from(2));
        assert_eq!(det(Family::E, 8), BigInt::from(1));
        assert!(ade_lattice(Family::E, 9).is_err());
        assert!(ade_lattice(Family::D, 3).is_err());
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_roots(&ade_lattice(Family::A, 1).unwrap()).unwrap().len(), 2);
        assert_eq!(enumerate_roots(&ade_lattice(Family::A, 2).unwrap()).unwrap().len(), 6);
        assert_eq!(enumerate_roots(&ade_lattice(Family::E, 8).unwrap()).unwrap().len(), 240);
    }

    #[test]
    fn closure_counts() {
        for (f, n) in [(Family::A, 7), (Family::D, 9), (Family::E, 6), (Family::E, 7), (Family::E, 8)] {
            assert_eq!(2 * positive_roots(f, n).unwrap().len(), component_root_count(f, n));
        }
    }

    #[test]
    fn classification() {
        let l = ade_lattice(Family::D, 4).unwrap();
        assert_eq!(classify_root_system(&l).unwrap().root_type.to_string(), "D4");
        let t: RootSystemType = "A1+A2+A1".parse().unwrap();
        assert_eq!(t.to_string(), "2A1+A2");
        assert_eq!(classify_root_system(&t.lattice()).unwrap().root_type, t);
        let six = Lattice::from_rows(&[[-6]]).unwrap();
        assert!(classify_root_system(&six).unwrap().root_type.is_empty());
        assert!(enumerate_roots(&Lattice::from_rows(&[[2]]).unwrap()).is_err());
    }

    #[test]
    fn type_text() {
        assert_eq!("0".parse::<RootSystemType>().unwrap().to_string(), "0");
        assert_eq!("E6+A3+2A1".parse::<RootSystemType>().unwrap().to_string(), "2A1+A3+E6");
        assert!("E9".parse::<RootSystemType>().is_err());
    }
}
