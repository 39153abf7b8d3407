//! Finite quadratic forms stored as integer numerators over a common level.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::qforms::symbol::{prime_power, valid_oddity, Constituent, GenusSymbol, TwoType};

/// A finite abelian group ⊕ Z/m_i with a Q/2Z-valued quadratic form.
///
/// With level `N` (a common multiple of the orders), the value on generator i is
/// `q[i] / N mod 2` and the bilinear value is `b[i][j] / N mod 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    level: i64,
    orders: Vec<i64>,
    q: Vec<i64>,
    b: Vec<Vec<i64>>,
}

fn ovf(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

fn to_i64(x: &BigInt, what: &str) -> Result<i64> {
    x.to_i64().ok_or_else(|| ovf(what))
}

impl FiniteQuadraticForm {
    pub fn trivial() -> Self {
        FiniteQuadraticForm { level: 1, orders: vec![], q: vec![], b: vec![] }
    }

    /// Validates the axioms of a discriminant form on the given presentation.
    pub fn new(level: i64, orders: Vec<i64>, q: Vec<i64>, b: Vec<Vec<i64>>) -> Result<Self> {
        let r = orders.len();
        let bad = Error::InvalidForm;
        if level < 1 || q.len() != r || b.len() != r || b.iter().any(|row| row.len() != r) {
            return Err(bad("shape".into()));
        }
        let n = level as i128;
        for i in 0..r {
            let m = orders[i] as i128;
            if m < 2 || n % m != 0 {
                return Err(bad(format!("order {} does not divide level {}", orders[i], level)));
            }
            if (q[i] as i128 - b[i][i] as i128).rem_euclid(n) != 0 {
                return Err(bad(format!("q and b disagree on generator {i}")));
            }
            if (q[i] as i128 * m * m).rem_euclid(2 * n) != 0 {
                return Err(bad(format!("q(order·g_{i}) is not 0")));
            }
            for j in 0..r {
                if (b[i][j] as i128 - b[j][i] as i128).rem_euclid(n) != 0 {
                    return Err(bad("b not symmetric".into()));
                }
                if (b[i][j] as i128 * m).rem_euclid(n) != 0 {
                    return Err(bad(format!("order(g_{i})·b(g_{i},g_{j}) is not 0")));
                }
            }
        }
        let mut f = FiniteQuadraticForm { level, orders, q, b };
        f.normalize();
        Ok(f)
    }

    fn normalize(&mut self) {
        let n = self.level;
        for v in self.q.iter_mut() {
            *v = v.rem_euclid(2 * n);
        }
        for row in self.b.iter_mut() {
            for v in row.iter_mut() {
                *v = v.rem_euclid(n);
            }
        }
    }

    /// Discriminant form of an even lattice.
    pub fn from_lattice(l: &Lattice) -> Result<Self> {
        if !l.is_even() {
            return Err(Error::NotEven);
        }
        let d = l.discriminant_group();
        if d.orders.is_empty() {
            return Ok(Self::trivial());
        }
        let mut level = BigInt::from(1);
        for o in &d.orders {
            level = level.lcm(o);
        }
        let lv = level.clone();
        let num = |x: &num_rational::BigRational| -> Result<i64> {
            let v = x * num_rational::BigRational::from_integer(lv.clone());
            if !v.is_integer() {
                return Err(ovf("discriminant value not over level"));
            }
            to_i64(&v.to_integer(), "discriminant value")
        };
        let q = d.q.iter().map(num).collect::<Result<Vec<_>>>()?;
        let b = d.b.iter().map(|row| row.iter().map(num).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        let orders = d.orders.iter().map(|o| to_i64(o, "group order")).collect::<Result<Vec<_>>>()?;
        Self::new(to_i64(&level, "level")?, orders, q, b)
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    /// Group order, `None` on overflow.
    pub fn order(&self) -> Option<u64> {
        self.orders.iter().try_fold(1u64, |acc, &m| acc.checked_mul(m as u64))
    }

    /// Numerator of q on generator i over the level.
    pub fn q_num(&self, i: usize) -> i64 {
        self.q[i]
    }

    pub fn b_num(&self, i: usize, j: usize) -> i64 {
        self.b[i][j]
    }

    /// q(Σ c_i g_i) as a numerator over the level, in [0, 2N).
    pub fn q_of(&self, c: &[i64]) -> i64 {
        let n2 = 2 * self.level as i128;
        let mut s: i128 = 0;
        for i in 0..c.len() {
            if c[i] == 0 {
                continue;
            }
            let ci = c[i] as i128;
            s = (s + ci * ci % n2 * self.q[i] as i128) % n2;
            for j in i + 1..c.len() {
                if c[j] != 0 {
                    s = (s + 2 * (ci * c[j] as i128 % n2) * self.b[i][j] as i128) % n2;
                }
            }
        }
        s.rem_euclid(n2) as i64
    }

    /// b(Σ c_i g_i, Σ d_j g_j) as a numerator over the level, in [0, N).
    pub fn b_of(&self, c: &[i64], d: &[i64]) -> i64 {
        let n = self.level as i128;
        let mut s: i128 = 0;
        for i in 0..c.len() {
            if c[i] == 0 {
                continue;
            }
            for j in 0..d.len() {
                if d[j] != 0 {
                    s = (s + (c[i] as i128 * d[j] as i128 % n) * self.b[i][j] as i128) % n;
                }
            }
        }
        s.rem_euclid(n) as i64
    }

    /// Orthogonal sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let level = self.level.checked_mul(other.level / self.level.gcd(&other.level)).ok_or_else(|| ovf("level"))?;
        let (f1, f2) = (level / self.level, level / other.level);
        let r1 = self.orders.len();
        let r = r1 + other.orders.len();
        let mut orders = self.orders.clone();
        orders.extend(&other.orders);
        let mut q = Vec::with_capacity(r);
        q.extend(self.q.iter().map(|&x| x * f1));
        q.extend(other.q.iter().map(|&x| x * f2));
        let mut b = vec![vec![0i64; r]; r];
        for i in 0..r1 {
            for j in 0..r1 {
                b[i][j] = self.b[i][j] * f1;
            }
        }
        for i in 0..other.orders.len() {
            for j in 0..other.orders.len() {
                b[r1 + i][r1 + j] = other.b[i][j] * f2;
            }
        }
        let mut f = FiniteQuadraticForm { level, orders, q, b };
        f.normalize();
        Ok(f)
    }

    /// The form -q.
    pub fn negate(&self) -> Self {
        let mut f = self.clone();
        for v in f.q.iter_mut() {
            *v = -*v;
        }
        for row in f.b.iter_mut() {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        f.normalize();
        f
    }

    /// The form c·q on the same group.
    pub fn rescale(&self, c: i64) -> Self {
        let mut f = self.clone();
        let n2 = 2 * self.level as i128;
        for v in f.q.iter_mut() {
            *v = ((*v as i128 * c as i128).rem_euclid(n2)) as i64;
        }
        for row in f.b.iter_mut() {
            for v in row.iter_mut() {
                *v = ((*v as i128 * c as i128).rem_euclid(self.level as i128)) as i64;
            }
        }
        f
    }

    /// Primes dividing the group order.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = Vec::new();
        for &m in &self.orders {
            let mut m = m as u64;
            let mut p = 2;
            while m > 1 {
                if p * p > m {
                    p = m;
                }
                if m % p == 0 {
                    if !ps.contains(&p) {
                        ps.push(p);
                    }
                    while m % p == 0 {
                        m /= p;
                    }
                }
                p += 1;
            }
        }
        ps.sort_unstable();
        ps
    }

    /// The p-primary part, with every generator of prime-power order and level p^e.
    pub fn p_part(&self, p: u64) -> Self {
        let p = p as i64;
        let mut gens: Vec<(i64, usize, i64)> = Vec::new(); // (order, source generator, multiplier)
        for (i, &m) in self.orders.iter().enumerate() {
            let mut pe = 1;
            while m % (pe * p) == 0 {
                pe *= p;
            }
            if pe > 1 {
                gens.push((pe, i, m / pe));
            }
        }
        let mut level = 1;
        while self.level % (level * p) == 0 {
            level *= p;
        }
        // values on p-power-order elements have denominators dividing the p-part of the level
        let sub = (self.level / level) as i128;
        let r = gens.len();
        let mut q = Vec::with_capacity(r);
        let mut b = vec![vec![0i64; r]; r];
        let n = self.level as i128;
        for (a, &(_, i, ci)) in gens.iter().enumerate() {
            let mut c = vec![0i64; self.orders.len()];
            c[i] = ci;
            let qa = self.q_of(&c) as i128;
            debug_assert_eq!(qa % sub, 0);
            q.push((qa / sub) as i64);
            for (bidx, &(_, j, cj)) in gens.iter().enumerate() {
                let v = (ci as i128 * cj as i128 % n * self.b[i][j] as i128).rem_euclid(n);
                b[a][bidx] = (v / sub) as i64;
            }
        }
        if r == 0 {
            level = 1;
        }
        let mut f = FiniteQuadraticForm { level, orders: gens.iter().map(|g| g.0).collect(), q, b };
        f.normalize();
        f
    }

    /// Builds a form in the class of the given symbol.
    pub fn from_symbol(s: &GenusSymbol) -> Result<Self> {
        let mut out = Self::trivial();
        for c in s.constituents() {
            out = out.direct_sum(&constituent_form(c)?)?;
        }
        Ok(out)
    }
}

fn legendre(a: i64, p: i64) -> i8 {
    let pm = p as i128;
    let (mut base, mut e, mut acc) = ((a as i128).rem_euclid(pm), (p - 1) / 2, 1i128);
    if base == 0 {
        return 0;
    }
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % pm;
        }
        base = base * base % pm;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

pub(crate) fn legendre_symbol(a: i64, p: u64) -> i8 {
    legendre(a, p as i64)
}

/// 2-adic units in {1,3,5,7} with the requested determinant class and oddity.
fn two_adic_units(n: u64, sign: i8, t: u8) -> Option<Vec<i64>> {
    let free = n.min(3) as usize;
    let fixed = n as usize - free;
    let units = [1i64, 3, 5, 7];
    let mut choice = vec![0usize; free];
    loop {
        let tail: Vec<i64> = choice.iter().map(|&i| units[i]).collect();
        let sum = fixed as i64 + tail.iter().sum::<i64>();
        let prod = tail.iter().product::<i64>().rem_euclid(8);
        let s = if prod == 1 || prod == 7 { 1 } else { -1 };
        if sum.rem_euclid(8) == t as i64 && s == sign {
            let mut v = vec![1i64; fixed];
            v.extend(tail);
            return Some(v);
        }
        let mut pos = 0;
        loop {
            if pos == free {
                return None;
            }
            choice[pos] += 1;
            if choice[pos] < 4 {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

fn constituent_form(c: &Constituent) -> Result<FiniteQuadraticForm> {
    let scale = i64::try_from(c.scale()).map_err(|_| ovf("scale"))?;
    let n = c.rank as usize;
    let bad = |m: &str| Error::SymbolParse { offset: 0, msg: format!("{c}: {m}") };
    match c.two {
        None => {
            let p = c.p as i64;
            let nonres = (2..p).find(|&a| legendre(a, p) == -1).unwrap_or(1);
            let mut units = vec![1i64; n];
            if c.sign < 0 {
                units[n - 1] = nonres;
            }
            let q: Vec<i64> = units.iter().map(|&u| if u % 2 == 0 { u } else { u + scale }).collect();
            let mut b = vec![vec![0; n]; n];
            for i in 0..n {
                b[i][i] = units[i];
            }
            FiniteQuadraticForm::new(scale, vec![scale; n], q, b)
        }
        Some(TwoType::Odd(t)) => {
            if !valid_oddity(c.rank, c.sign, t) {
                return Err(bad("no such odd 2-adic constituent"));
            }
            let units = two_adic_units(c.rank, c.sign, t).ok_or_else(|| bad("no unit diagonal"))?;
            let mut b = vec![vec![0; n]; n];
            for i in 0..n {
                b[i][i] = units[i];
            }
            FiniteQuadraticForm::new(scale, vec![scale; n], units, b)
        }
        Some(TwoType::Even) => {
            let blocks = n / 2;
            let mut q = vec![0i64; n];
            let mut b = vec![vec![0; n]; n];
            for k in 0..blocks {
                let (x, y) = (2 * k, 2 * k + 1);
                b[x][y] = 1;
                b[y][x] = 1;
                if c.sign < 0 && k == 0 {
                    q[x] = 2;
                    q[y] = 2;
                    b[x][x] = 2;
                    b[y][y] = 2;
                }
            }
            FiniteQuadraticForm::new(scale, vec![scale; n], q, b)
        }
    }
}

/// Checks that a symbol's scales are prime powers and that it is realizable.
pub fn realizable(s: &GenusSymbol) -> bool {
    s.constituents().iter().all(|c| prime_power(c.scale()).is_some()) && FiniteQuadraticForm::from_symbol(s).is_ok()
}

impl Default for FiniteQuadraticForm {
    fn default() -> Self {
        Self::trivial()
    }
}

/// Free-function forms of the sum and negation.
pub fn fqf_direct_sum(q1: &FiniteQuadraticForm, q2: &FiniteQuadraticForm) -> Result<FiniteQuadraticForm> {
    q1.direct_sum(q2)
}

pub fn fqf_negate(q: &FiniteQuadraticForm) -> FiniteQuadraticForm {
    q.negate()
}

pub fn fqf_from_lattice(l: &Lattice) -> Result<FiniteQuadraticForm> {
    FiniteQuadraticForm::from_lattice(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a1_a3_e8() {
        let a1 = Lattice::from_rows(&[[-2]]).unwrap();
        let f = FiniteQuadraticForm::from_lattice(&a1).unwrap();
        assert_eq!((f.level(), f.orders().to_vec(), f.q_num(0)), (2, vec![2], 3));
        let a3 = Lattice::from_rows(&[[-2, 1, 0], [1, -2, 1], [0, 1, -2]]).unwrap();
        let f = FiniteQuadraticForm::from_lattice(&a3).unwrap();
        assert_eq!(f.orders(), &[4]);
        // -3/4 mod 2 = 5/4
        assert_eq!(f.q_num(0), 5);
        assert!(FiniteQuadraticForm::from_lattice(&Lattice::from_rows(&[[1]]).unwrap()).is_err());
    }

    #[test]
    fn sums_and_negation() {
        let a1 = FiniteQuadraticForm::from_lattice(&Lattice::from_rows(&[[-2]]).unwrap()).unwrap();
        let s = a1.direct_sum(&a1).unwrap();
        assert_eq!(s.orders(), &[2, 2]);
        assert_eq!((s.q_num(0), s.q_num(1)), (3, 3));
        assert_eq!(a1.direct_sum(&FiniteQuadraticForm::trivial()).unwrap(), a1);
        assert_eq!(s.negate().negate(), s);
    }

    #[test]
    fn p_parts_split_orders() {
        // Z/6 from A5
        let mut rows = vec![vec![0i64; 5]; 5];
        for i in 0..5 {
            rows[i][i] = -2;
            if i + 1 < 5 {
                rows[i][i + 1] = 1;
                rows[i + 1][i] = 1;
            }
        }
        let f = FiniteQuadraticForm::from_lattice(&Lattice::from_rows(&rows).unwrap()).unwrap();
        assert_eq!(f.primes(), vec![2, 3]);
        let f2 = f.p_part(2);
        assert_eq!((f2.level(), f2.orders().to_vec()), (2, vec![2]));
        let f3 = f.p_part(3);
        assert_eq!((f3.level(), f3.orders().to_vec()), (3, vec![3]));
    }

    #[test]
    fn symbol_forms_build() {
        for s in ["2_II^-2,3^+5", "2_7^+1", "4_1^-5", "2_2^+2,4_II^+4", "3^-1,5^-1", "16_5^-1"] {
            let sym: GenusSymbol = s.parse().unwrap();
            let f = FiniteQuadraticForm::from_symbol(&sym).unwrap();
            assert_eq!(f.order().unwrap() as u128, sym.group_order().unwrap(), "{s}");
        }
        assert!(FiniteQuadraticForm::from_symbol(&"2_3^+1".parse().unwrap()).is_err());
    }
}
