//! The 23 Niemeier lattices with roots, built as glued overlattices of their root sums.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact_linalg::{hnf_rows, rational_inverse, IntMatrix};
use crate::lattice::{orthogonal_complement, primitive_closure, Lattice, Sublattice};
use crate::qforms::{lattice_symbol, symbols_equivalent, GenusSymbol};
use crate::roots::{ade_gram, classify_roots, positive_roots, Family, Root, RootSystemType};

const GLUE_FILE: &str = "glue.txt";
const JMAP_FILE: &str = "jmap.txt";
static SHIPPED_GLUE: &str = include_str!("../data/glue.txt");

/// One line of the glue file: components in lattice order and generating glue words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueEntry {
    pub name: String,
    pub root_system: RootSystemType,
    pub components: Vec<(Family, usize)>,
    pub words: Vec<Vec<u8>>,
}

/// Order of the discriminant group of one component, which bounds its class labels.
fn class_count(f: Family, n: usize) -> u8 {
    match (f, n) {
        (Family::A, n) => (n + 1) as u8,
        (Family::D, _) => 4,
        (Family::E, 6) => 3,
        (Family::E, 7) => 2,
        (Family::E, _) => 1,
    }
}

fn add_class(f: Family, n: usize, a: u8, b: u8) -> u8 {
    match f {
        // classes 1, 2, 3: spinor, vector, spinor. Z/4 for odd n, Klein four for even n.
        Family::D if n % 2 == 0 => a ^ b,
        _ => (a + b) % class_count(f, n),
    }
}

/// Minimal norm (absolute value) of a vector in the given class of the dual.
fn min_norm(f: Family, n: usize, c: u8) -> BigRational {
    let r = |a: usize, b: usize| BigRational::new(BigInt::from(a), BigInt::from(b));
    match (f, c) {
        (_, 0) => BigRational::zero(),
        (Family::A, i) => {
            let i = i as usize;
            r(i * (n + 1 - i), n + 1)
        }
        (Family::D, 2) => BigRational::one(),
        (Family::D, _) => r(n, 4),
        (Family::E, _) if n == 6 => r(4, 3),
        (Family::E, _) => r(3, 2),
    }
}

/// Index of the simple root whose dual vector represents class `c`.
fn class_node(f: Family, n: usize, c: u8) -> usize {
    match (f, c) {
        (Family::A, i) => i as usize - 1,
        (Family::D, 1) => n - 1,
        (Family::D, 3) => n - 2,
        (Family::D, _) => 0,
        (Family::E, 1) if n == 6 => 0,
        (Family::E, _) if n == 6 => 5,
        (Family::E, _) => 6,
    }
}

/// Parses glue-file text. Lines are `NAME | COMPONENTS | WORD; WORD; …`.
pub fn parse_glue(text: &str, file: &str) -> Result<BTreeMap<String, GlueEntry>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::data(file, line_no, "expected NAME | COMPONENTS | WORDS"));
        }
        let root_system: RootSystemType =
            fields[0].parse().map_err(|e: Error| Error::data(file, line_no, e.to_string()))?;
        let mut components = Vec::new();
        for tok in fields[1].split_whitespace() {
            let (k, f, n) = crate::roots::parse_component(tok).map_err(|e| Error::data(file, line_no, e.to_string()))?;
            if k != 1 {
                return Err(Error::data(file, line_no, "components must be listed one by one"));
            }
            components.push((f, n));
        }
        if RootSystemType::new(components.clone())? != root_system {
            return Err(Error::data(file, line_no, "components do not match the name"));
        }
        if root_system.rank() != 24 {
            return Err(Error::data(file, line_no, format!("rank {} instead of 24", root_system.rank())));
        }
        let mut words = Vec::new();
        for w in fields[2].split(';').map(str::trim).filter(|w| !w.is_empty()) {
            let word: Vec<u8> = w
                .split_whitespace()
                .map(|c| c.parse::<u8>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::data(file, line_no, format!("bad glue word {w:?}")))?;
            if word.len() != components.len() {
                return Err(Error::data(file, line_no, format!("glue word {w:?} has wrong length")));
            }
            for (&c, &(f, n)) in word.iter().zip(&components) {
                if c >= class_count(f, n) {
                    return Err(Error::data(file, line_no, format!("class {c} out of range for {}{n}", f.letter())));
                }
            }
            words.push(word);
        }
        let name = root_system.to_string();
        if out.contains_key(&name) {
            return Err(Error::data(file, line_no, format!("duplicate root system {name}")));
        }
        out.insert(name.clone(), GlueEntry { name, root_system, components, words });
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Loads `glue.txt` from a data directory.
pub fn load_glue(dir: &Path) -> Result<BTreeMap<String, GlueEntry>> {
    parse_glue(&read(&dir.join(GLUE_FILE))?, GLUE_FILE)
}

/// The glue codes compiled into the library.
pub fn shipped_glue() -> BTreeMap<String, GlueEntry> {
    parse_glue(SHIPPED_GLUE, GLUE_FILE).expect("shipped glue file parses")
}

/// Loads the editable map from the index j to a root-system name (`Leech` for the root-free one).
pub fn load_jmap(dir: &Path) -> Result<BTreeMap<u32, String>> {
    let text = read(&dir.join(JMAP_FILE))?;
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(j), Some(name), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::data(JMAP_FILE, idx + 1, "expected `j NAME`"));
        };
        let j: u32 = j.parse().map_err(|_| Error::data(JMAP_FILE, idx + 1, "bad index"))?;
        let name = if name == "Leech" {
            name.to_string()
        } else {
            name.parse::<RootSystemType>().map_err(|e| Error::data(JMAP_FILE, idx + 1, e.to_string()))?.to_string()
        };
        if out.insert(j, name).is_some() {
            return Err(Error::data(JMAP_FILE, idx + 1, format!("duplicate index {j}")));
        }
    }
    Ok(out)
}

/// An even unimodular negative definite lattice of rank 24 with a nonempty root system.
#[derive(Clone, Debug)]
pub struct NiemeierLattice {
    pub root_system: RootSystemType,
    /// Components of the root sum R in coordinate order.
    pub components: Vec<(Family, usize)>,
    /// Glue generators in the simple-root coordinates of R.
    pub glue: Vec<Vec<BigRational>>,
    pub code_size: usize,
    pub lattice: Lattice,
    /// Rows: the basis of N in R coordinates.
    basis: Vec<Vec<BigRational>>,
    basis_inv: Vec<Vec<BigRational>>,
    roots: Vec<Root>,
}

impl NiemeierLattice {
    pub fn name(&self) -> String {
        self.root_system.to_string()
    }

    /// Basis of N in the simple-root coordinates of R.
    pub fn basis(&self) -> &[Vec<BigRational>] {
        &self.basis
    }

    /// All roots of N in N coordinates, sorted.
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// Converts a vector of R ⊗ Q in simple-root coordinates to N coordinates.
    pub fn from_root_coords(&self, v: &[BigRational]) -> Result<Vec<BigInt>> {
        if v.len() != 24 {
            return Err(Error::NotInLattice(format!("vector of length {}", v.len())));
        }
        let mut out = Vec::with_capacity(24);
        for j in 0..24 {
            let mut s = BigRational::zero();
            for (i, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    s += x * &self.basis_inv[i][j];
                }
            }
            if !s.is_integer() {
                return Err(Error::NotInLattice("vector is not in the Niemeier lattice".into()));
            }
            out.push(s.to_integer());
        }
        Ok(out)
    }

    /// Converts N coordinates back to simple-root coordinates of R.
    pub fn to_root_coords(&self, v: &[BigInt]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); 24];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let x = BigRational::from_integer(x.clone());
            for (o, b) in out.iter_mut().zip(&self.basis[i]) {
                *o += &x * b;
            }
        }
        out
    }
}

/// All codewords generated by the glue words.
fn glue_code(entry: &GlueEntry) -> Vec<Vec<u8>> {
    let comps = &entry.components;
    let zero = vec![0u8; comps.len()];
    let mut seen: BTreeSet<Vec<u8>> = BTreeSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(w) = frontier.pop() {
        for g in &entry.words {
            let s: Vec<u8> = w.iter().zip(g).zip(comps).map(|((&a, &b), &(f, n))| add_class(f, n, a, b)).collect();
            if seen.insert(s.clone()) {
                frontier.push(s);
            }
        }
    }
    seen.into_iter().collect()
}

/// Builds a Niemeier lattice from a glue entry, with the full battery of self-checks.
pub fn build_from_glue(entry: &GlueEntry) -> Result<NiemeierLattice> {
    let fail = |msg: String| Error::Niemeier(format!("{}: {msg}", entry.name));
    let comps = &entry.components;
    let mut offsets = Vec::with_capacity(comps.len());
    let mut gram = IntMatrix::zeros(0, 0);
    let mut inverses = Vec::new();
    for &(f, n) in comps {
        offsets.push(gram.rows());
        let g = ade_gram(f, n)?;
        inverses.push(rational_inverse(&g)?.ok_or_else(|| fail("singular component".into()))?);
        gram = gram.block_diag(&g);
    }
    let dim = gram.rows();

    // no glue vector may create new roots: every nonzero codeword needs minimal norm above 2
    let code = glue_code(entry);
    let two = BigRational::from_integer(BigInt::from(2));
    for w in code.iter().filter(|w| w.iter().any(|&c| c != 0)) {
        let m: BigRational = w.iter().zip(comps).map(|(&c, &(f, n))| min_norm(f, n, c)).sum();
        if m <= two {
            return Err(fail(format!("codeword {w:?} has minimal norm {m}")));
        }
    }

    let glue: Vec<Vec<BigRational>> = entry
        .words
        .iter()
        .map(|w| {
            let mut v = vec![BigRational::zero(); dim];
            for (c, (&cls, &(f, n))) in w.iter().zip(comps).enumerate() {
                if cls == 0 {
                    continue;
                }
                let row = &inverses[c][class_node(f, n, cls)];
                for (k, x) in row.iter().enumerate() {
                    v[offsets[c] + k] = x.clone();
                }
            }
            v
        })
        .collect();

    // HNF of d·[I; glue], divided by d
    let d = glue.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut rows: Vec<Vec<BigInt>> =
        (0..dim).map(|i| (0..dim).map(|j| if i == j { d.clone() } else { BigInt::zero() }).collect()).collect();
    for v in &glue {
        rows.push(v.iter().map(|x| (x * BigRational::from_integer(d.clone())).to_integer()).collect());
    }
    let h = hnf_rows(&IntMatrix::from_big_rows(&rows, dim)?);
    if h.rows() != dim {
        return Err(fail("overlattice has the wrong rank".into()));
    }
    let hg = h.mul(&gram)?.mul(&h.transpose())?;
    let d2 = &d * &d;
    let mut ng = IntMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let (q, r) = hg.get(i, j).div_rem(&d2);
            if !r.is_zero() {
                return Err(fail("glue is not integral".into()));
            }
            ng.set(i, j, q);
        }
    }
    let lattice = Lattice::new(ng)?.with_name(entry.name.clone());
    if !lattice.is_even() {
        return Err(fail("overlattice is not even".into()));
    }
    if !lattice.determinant().abs().is_one() {
        return Err(fail(format!("determinant {} instead of ±1", lattice.determinant())));
    }
    let basis: Vec<Vec<BigRational>> = (0..dim)
        .map(|i| (0..dim).map(|j| BigRational::new(h.get(i, j).clone(), d.clone())).collect())
        .collect();
    let hinv = rational_inverse(&h)?.ok_or_else(|| fail("singular basis".into()))?;
    let scale = BigRational::from_integer(d.clone());
    let basis_inv: Vec<Vec<BigRational>> = hinv.into_iter().map(|r| r.into_iter().map(|x| x * &scale).collect()).collect();

    let mut n = NiemeierLattice {
        root_system: entry.root_system.clone(),
        components: comps.clone(),
        glue,
        code_size: code.len(),
        lattice,
        basis,
        basis_inv,
        roots: Vec::new(),
    };
    let mut roots = Vec::new();
    for (c, &(f, rk)) in comps.iter().enumerate() {
        for r in positive_roots(f, rk)? {
            for sgn in [1i64, -1] {
                let mut v = vec![BigRational::zero(); dim];
                for (k, &x) in r.iter().enumerate() {
                    v[offsets[c] + k] = BigRational::from_integer(BigInt::from(sgn * x));
                }
                let nv = n.from_root_coords(&v)?;
                let small: Option<Root> = nv.iter().map(|x| x.to_i64()).collect();
                roots.push(small.ok_or_else(|| Error::Overflow("root coordinates".into()))?);
            }
        }
    }
    roots.sort();
    let found = classify_roots(n.lattice.gram(), &roots)?.root_type;
    if found != entry.root_system {
        return Err(fail(format!("roots classify as {found}")));
    }
    n.roots = roots;
    Ok(n)
}

/// Builds the Niemeier lattice with the given root system from the shipped glue codes.
pub fn build_niemeier(root_system_name: &str) -> Result<NiemeierLattice> {
    build_niemeier_from(&shipped_glue(), root_system_name)
}

pub fn build_niemeier_from(glue: &BTreeMap<String, GlueEntry>, root_system_name: &str) -> Result<NiemeierLattice> {
    let key = root_system_name
        .parse::<RootSystemType>()
        .map_err(|_| Error::Niemeier(format!("unknown root system {root_system_name:?}")))?
        .to_string();
    let entry = glue.get(&key).ok_or_else(|| Error::Niemeier(format!("unknown root system {root_system_name:?}")))?;
    build_from_glue(entry)
}

/// Builds every entry in parallel; results keep the order of the map.
pub fn build_all(glue: &BTreeMap<String, GlueEntry>) -> Vec<(String, Result<NiemeierLattice>)> {
    let entries: Vec<&GlueEntry> = glue.values().collect();
    entries.par_iter().map(|e| (e.name.clone(), build_from_glue(e))).collect()
}

/// Invariants of S = primitive closure of the span of some vectors and of T = S^⊥ in N.
#[derive(Clone, Debug)]
pub struct ComplementReport {
    pub s_rank: usize,
    pub s_qsymbol: GenusSymbol,
    pub t_rank: usize,
    pub t_qsymbol: GenusSymbol,
    pub t_root_type: RootSystemType,
    /// Bases in N coordinates.
    pub s_basis: IntMatrix,
    pub t_basis: IntMatrix,
    pub ranks_add_up: bool,
    /// Whether q_T and -q_S have equal canonical keys.
    pub forms_dual: bool,
}

impl ComplementReport {
    pub fn consistent(&self) -> bool {
        self.ranks_add_up && self.forms_dual
    }
}

fn sub_symbol(s: &Sublattice<'_>) -> Result<GenusSymbol> {
    if s.rank() == 0 {
        return Ok(GenusSymbol::empty());
    }
    lattice_symbol(&s.lattice()?)
}

/// Complement data for the sublattice generated by `generators` (N coordinates).
pub fn complement_report(n: &NiemeierLattice, generators: &[Vec<BigInt>]) -> Result<ComplementReport> {
    let dim = n.lattice.rank();
    if let Some(v) = generators.iter().find(|v| v.len() != dim) {
        return Err(Error::NotInLattice(format!("vector of length {} in a lattice of rank {dim}", v.len())));
    }
    let span = Sublattice::spanned_by(&n.lattice, generators)?;
    let s = primitive_closure(&span);
    let t = orthogonal_complement(&n.lattice, &s);
    let s_qsymbol = sub_symbol(&s)?;
    let t_qsymbol = sub_symbol(&t)?;

    let gram = n.lattice.gram();
    let sg: Vec<Vec<BigInt>> = s.basis().mul(gram)?.row_vecs();
    let orth: Vec<Root> = n
        .roots
        .iter()
        .filter(|r| {
            sg.iter().all(|row| row.iter().zip(r.iter()).map(|(a, &b)| a * BigInt::from(b)).sum::<BigInt>().is_zero())
        })
        .cloned()
        .collect();
    let t_root_type = classify_roots(gram, &orth)?.root_type;

    Ok(ComplementReport {
        s_rank: s.rank(),
        t_rank: t.rank(),
        ranks_add_up: s.rank() + t.rank() == dim,
        forms_dual: symbols_equivalent(&t_qsymbol, &s_qsymbol.negated()),
        s_qsymbol,
        t_qsymbol,
        t_root_type,
        s_basis: s.basis().clone(),
        t_basis: t.basis().clone(),
    })
}

/// Whether two bases span the same sublattice.
pub fn same_span(a: &IntMatrix, b: &IntMatrix) -> bool {
    if a.rows() != b.rows() {
        return false;
    }
    if a.rows() == 0 {
        return true;
    }
    hnf_rows(a) == hnf_rows(b)
}

/// Vectors of R ⊗ Q given as text, one per line, entries separated by whitespace or commas.
/// Entries may be fractions such as `1/2`.
pub fn parse_vectors(text: &str) -> Result<Vec<Vec<BigRational>>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: Vec<BigRational> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<BigRational>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::data("vectors", idx + 1, "bad rational entry"))?;
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_and_norms() {
        assert_eq!(add_class(Family::D, 5, 1, 1), 2);
        assert_eq!(add_class(Family::D, 6, 1, 3), 2);
        assert_eq!(min_norm(Family::A, 1, 1), BigRational::new(1.into(), 2.into()));
        assert_eq!(min_norm(Family::D, 8, 1), BigRational::from_integer(2.into()));
    }

    #[test]
    fn small_builds() {
        let e = build_niemeier("3E8").unwrap();
        assert_eq!(e.code_size, 1);
        assert_eq!(e.roots().len(), 720);
        let d = build_niemeier("D24").unwrap();
        assert_eq!(d.code_size, 2);
        assert_eq!(d.roots().len(), 1104);
        assert!(build_niemeier("A24+E8").is_err());
        assert!(build_niemeier("Leech").is_err());
    }

    #[test]
    fn one_root_in_3e8() {
        let n = build_niemeier("3E8").unwrap();
        let r: Vec<BigInt> = n.roots()[0].iter().map(|&x| BigInt::from(x)).collect();
        let rep = complement_report(&n, &[r]).unwrap();
        assert_eq!((rep.s_rank, rep.t_rank), (1, 23));
        assert_eq!(rep.s_qsymbol.to_string(), "2_7^+1");
        assert_eq!(rep.t_root_type.to_string(), "E7+2E8");
        assert!(rep.consistent());
    }

    #[test]
    fn whole_lattice() {
        let n = build_niemeier("D24").unwrap();
        let all: Vec<Vec<BigInt>> = IntMatrix::identity(24).row_vecs();
        let rep = complement_report(&n, &all).unwrap();
        assert_eq!((rep.s_rank, rep.t_rank), (24, 0));
        assert!(rep.s_qsymbol.is_empty() && rep.t_qsymbol.is_empty());
        assert!(rep.t_root_type.is_empty());
    }
}
