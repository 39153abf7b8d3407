//! Integral lattices given by Gram matrices, and sublattices in basis form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact_linalg::{hnf_rows, invariant_factors, rank, right_kernel, saturate, smith_normal_form, IntMatrix};

/// A nondegenerate integral symmetric bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: IntMatrix,
    name: Option<String>,
}

impl Lattice {
    /// Checks symmetry and nondegeneracy. Evenness is a separate query, see [`Lattice::is_even`].
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() || !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if gram.determinant()?.is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(Lattice { gram, name: None })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows))
    }

    /// The zero lattice.
    pub fn zero() -> Self {
        Lattice { gram: IntMatrix::zeros(0, 0), name: None }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.determinant().expect("gram is square")
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.get(i, i).is_even())
    }

    pub fn inner(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        self.gram.bilinear(x, y)
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.gram.bilinear(x, x)
    }

    /// Orthogonal sum.
    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        Lattice { gram: self.gram.block_diag(&other.gram), name: None }
    }

    /// `k` copies of `self`.
    pub fn multiple(&self, k: usize) -> Lattice {
        let mut out = Lattice::zero();
        for _ in 0..k {
            out = out.direct_sum(self);
        }
        out
    }

    /// Lattice with the Gram matrix multiplied by -1.
    pub fn negated(&self) -> Lattice {
        let n = self.rank();
        let mut g = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, -self.gram.get(i, j).clone());
            }
        }
        Lattice { gram: g, name: None }
    }

    /// (n_plus, n_minus) by exact rational congruence diagonalization.
    pub fn signature(&self) -> Result<(usize, usize)> {
        let pivots = congruence_diagonal(&self.gram)?;
        let plus = pivots.iter().filter(|p| p.is_positive()).count();
        Ok((plus, pivots.len() - plus))
    }

    pub fn is_negative_definite(&self) -> bool {
        matches!(self.signature(), Ok((0, _)))
    }

    /// The discriminant group L*/L with its induced forms.
    pub fn discriminant_group(&self) -> DiscriminantGroup {
        let (d, _u, v) = smith_normal_form(&self.gram);
        let n = self.rank();
        let mut orders = Vec::new();
        let mut generators = Vec::new();
        for i in 0..n {
            let di = d.get(i, i).abs();
            if di > BigInt::one() {
                let col: Vec<BigRational> =
                    (0..n).map(|r| BigRational::new(v.get(r, i).clone(), di.clone())).collect();
                orders.push(di);
                generators.push(col);
            }
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let one = BigRational::one();
        let pair = |x: &[BigRational], y: &[BigRational]| -> BigRational {
            let mut s = BigRational::zero();
            for i in 0..n {
                if x[i].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let g = self.gram.get(i, j);
                    if !g.is_zero() && !y[j].is_zero() {
                        s += &x[i] * &y[j] * BigRational::from_integer(g.clone());
                    }
                }
            }
            s
        };
        let k = generators.len();
        let q = generators.iter().map(|g| rat_mod(&pair(g, g), &two)).collect();
        let mut b = vec![vec![BigRational::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                b[i][j] = rat_mod(&pair(&generators[i], &generators[j]), &one);
            }
        }
        DiscriminantGroup { orders, generators, q, b }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&LatticeRecord::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Lattice> {
        let rec: LatticeRecord = serde_json::from_str(s)?;
        rec.try_into()
    }
}

/// Free-function form of [`Lattice::direct_sum`].
pub fn direct_sum(l1: &Lattice, l2: &Lattice) -> Lattice {
    l1.direct_sum(l2)
}

/// Reduces `x` into `[0, m)`.
pub(crate) fn rat_mod(x: &BigRational, m: &BigRational) -> BigRational {
    let k = (x / m).floor();
    x - k * m
}

/// Pivots of a congruence diagonalization; errors on a degenerate form.
fn congruence_diagonal(g: &IntMatrix) -> Result<Vec<BigRational>> {
    let n = g.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(g.get(i, j).clone())).collect())
        .collect();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        if let Some(p) = (k..n).find(|&i| !a[i][i].is_zero()) {
            a.swap(k, p);
            for row in a.iter_mut() {
                row.swap(k, p);
            }
        } else {
            let Some((i, j)) = (k..n)
                .flat_map(|i| (k..n).map(move |j| (i, j)))
                .find(|&(i, j)| i != j && !a[i][j].is_zero())
            else {
                return Err(Error::Degenerate);
            };
            // e_i += e_j makes the diagonal entry 2·a_ij
            for c in 0..n {
                let v = a[j][c].clone();
                a[i][c] += v;
            }
            for row in a.iter_mut() {
                let v = row[j].clone();
                row[i] += v;
            }
            a.swap(k, i);
            for row in a.iter_mut() {
                row.swap(k, i);
            }
        }
        let piv = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for c in k..n {
                let v = &f * &a[k][c];
                a[i][c] -= v;
            }
            for row in a.iter_mut().skip(k) {
                let v = &f * &row[k];
                row[i] -= v;
            }
        }
        pivots.push(piv);
    }
    Ok(pivots)
}

/// L*/L presented by SNF generators, with q in [0,2) and b in [0,1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantGroup {
    pub orders: Vec<BigInt>,
    /// Generators in the rational coordinates of the lattice basis.
    pub generators: Vec<Vec<BigRational>>,
    pub q: Vec<BigRational>,
    pub b: Vec<Vec<BigRational>>,
}

impl DiscriminantGroup {
    pub fn order(&self) -> BigInt {
        self.orders.iter().product()
    }
}

/// A sublattice of an ambient lattice; basis rows are ambient coordinates.
#[derive(Clone, Debug)]
pub struct Sublattice<'a> {
    ambient: &'a Lattice,
    basis: IntMatrix,
}

impl<'a> Sublattice<'a> {
    /// Fails if the rows are linearly dependent or have the wrong length.
    pub fn new(ambient: &'a Lattice, basis: IntMatrix) -> Result<Self> {
        if basis.rows() > 0 && basis.cols() != ambient.rank() {
            return Err(Error::NotInLattice(format!(
                "basis has {} columns, ambient rank {}",
                basis.cols(),
                ambient.rank()
            )));
        }
        if rank(&basis) != basis.rows() {
            return Err(Error::Degenerate);
        }
        let basis = if basis.rows() == 0 { IntMatrix::zeros(0, ambient.rank()) } else { basis };
        Ok(Sublattice { ambient, basis })
    }

    /// Sublattice spanned by arbitrary vectors, reduced to a basis.
    pub fn spanned_by(ambient: &'a Lattice, vectors: &[Vec<BigInt>]) -> Result<Self> {
        let n = ambient.rank();
        if vectors.is_empty() {
            return Ok(Sublattice { ambient, basis: IntMatrix::zeros(0, n) });
        }
        let m = IntMatrix::from_big_rows(vectors, n)?;
        Ok(Sublattice { ambient, basis: hnf_rows(&m) })
    }

    pub fn ambient(&self) -> &'a Lattice {
        self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// B·G·Bᵀ.
    pub fn gram(&self) -> IntMatrix {
        let bg = self.basis.mul(self.ambient.gram()).expect("dims");
        bg.mul(&self.basis.transpose()).expect("dims")
    }

    /// The induced form as a lattice; fails when it is degenerate.
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.gram()).map_err(|e| match e {
            Error::Degenerate => Error::DegenerateSublattice,
            e => e,
        })
    }

    /// Index of this sublattice in its primitive closure.
    pub fn index_in_closure(&self) -> BigInt {
        invariant_factors(&self.basis).into_iter().filter(|d| !d.is_zero()).product()
    }

    pub fn is_primitive(&self) -> bool {
        self.index_in_closure().is_one()
    }
}

/// Saturation of `s` in its ambient lattice.
pub fn primitive_closure<'a>(s: &Sublattice<'a>) -> Sublattice<'a> {
    let basis = saturate(&s.basis.row_vecs(), s.ambient.rank()).expect("consistent dims");
    Sublattice { ambient: s.ambient, basis }
}

/// {x ∈ ambient : x·s = 0 for all s ∈ S}, always primitive.
pub fn orthogonal_complement<'a>(ambient: &'a Lattice, s: &Sublattice<'_>) -> Sublattice<'a> {
    let n = ambient.rank();
    if s.rank() == 0 {
        return Sublattice { ambient, basis: IntMatrix::identity(n) };
    }
    let bg = s.basis.mul(ambient.gram()).expect("dims");
    let k = right_kernel(&bg);
    let basis = if k.rows() == 0 { IntMatrix::zeros(0, n) } else { k };
    Sublattice { ambient, basis }
}

#[derive(Serialize, Deserialize)]
struct LatticeRecord {
    #[serde(default)]
    name: Option<String>,
    rank: usize,
    gram: Vec<Vec<Value>>,
}

impl From<&Lattice> for LatticeRecord {
    fn from(l: &Lattice) -> Self {
        let gram = l
            .gram
            .row_vecs()
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| match x.to_i64() {
                        Some(v) => Value::from(v),
                        None => Value::from(x.to_string()),
                    })
                    .collect()
            })
            .collect();
        LatticeRecord { name: l.name.clone(), rank: l.rank(), gram }
    }
}

impl TryFrom<LatticeRecord> for Lattice {
    type Error = Error;

    fn try_from(rec: LatticeRecord) -> Result<Lattice> {
        let bad = |m: String| Error::data("lattice json", 0, m);
        if rec.gram.len() != rec.rank {
            return Err(bad(format!("rank {} but {} rows", rec.rank, rec.gram.len())));
        }
        let mut rows = Vec::with_capacity(rec.rank);
        for r in rec.gram {
            let row = r
                .into_iter()
                .map(|v| match v {
                    Value::Number(n) => n
                        .as_i64()
                        .map(BigInt::from)
                        .ok_or_else(|| bad(format!("non-integer entry {n}"))),
                    Value::String(s) => {
                        s.trim().parse::<BigInt>().map_err(|_| bad(format!("bad integer {s:?}")))
                    }
                    other => Err(bad(format!("bad entry {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let gram = IntMatrix::from_big_rows(&rows, rec.rank)?;
        let l = Lattice::new(gram)?;
        Ok(match rec.name {
            Some(n) => l.with_name(n),
            None => l,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> Lattice {
        Lattice::from_rows(&[[-2]]).unwrap()
    }

    fn a2() -> Lattice {
        Lattice::from_rows(&[[-2, 1], [1, -2]]).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn sums_and_signature() {
        let s = a1().direct_sum(&a1());
        assert_eq!(s.determinant(), BigInt::from(4));
        assert_eq!(a1().multiple(3).rank(), 3);
        assert_eq!(a1().signature().unwrap(), (0, 1));
        let u = Lattice::from_rows(&[[0, 1], [1, 0]]).unwrap();
        assert_eq!(u.signature().unwrap(), (1, 1));
        assert!(Lattice::from_rows(&[[1, 1], [1, 1]]).is_err());
    }

    #[test]
    fn discriminant_a1_a2() {
        let d = a1().discriminant_group();
        assert_eq!(d.orders, vec![BigInt::from(2)]);
        // -1/2 mod 2
        assert_eq!(d.q[0], BigRational::new(BigInt::from(3), BigInt::from(2)));
        let d = a2().discriminant_group();
        assert_eq!(d.orders, vec![BigInt::from(3)]);
        assert_eq!(d.q[0], BigRational::new(BigInt::from(4), BigInt::from(3)));
    }

    #[test]
    fn complement_of_root_in_a2() {
        let l = a2();
        let s = Sublattice::spanned_by(&l, &[big(&[1, 0])]).unwrap();
        let t = orthogonal_complement(&l, &s);
        assert_eq!(t.gram(), IntMatrix::from_rows(&[[-6]]));
        let full = Sublattice::new(&l, IntMatrix::identity(2)).unwrap();
        assert_eq!(orthogonal_complement(&l, &full).rank(), 0);
    }

    #[test]
    fn closure_of_multiple() {
        let l = a1().direct_sum(&a1());
        let s = Sublattice::spanned_by(&l, &[big(&[2, 2])]).unwrap();
        assert_eq!(s.index_in_closure(), BigInt::from(2));
        let c = primitive_closure(&s);
        assert_eq!(c.basis().row(0), &big(&[1, 1])[..]);
        assert!(primitive_closure(&c).is_primitive());
    }

    #[test]
    fn json_round_trip() {
        let mut g = IntMatrix::from_rows(&[[-2, 1], [1, -2]]);
        g.set(0, 0, BigInt::from(-4) * BigInt::from(i64::MAX));
        let l = Lattice::new(g).unwrap().with_name("big");
        let back = Lattice::from_json(&l.to_json()).unwrap();
        assert_eq!(back, l);
    }
}
