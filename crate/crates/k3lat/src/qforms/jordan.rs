//! Jordan splitting of a finite quadratic form into homogeneous constituents.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qforms::canonical::canonical;
use crate::qforms::fqf::{legendre_symbol, FiniteQuadraticForm};
use crate::qforms::symbol::{Constituent, GenusSymbol, TwoType};

fn mod_inv(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

#[derive(Default)]
struct Acc {
    rank: u64,
    sign: i8,
    odd: bool,
    oddity: u64,
}

/// Splits one p-part. `f` must have prime-power generator orders and level p^e.
fn split_p_part(f: &FiniteQuadraticForm, p: i64, acc: &mut BTreeMap<u32, Acc>) -> Result<()> {
    let r = f.num_generators();
    let level = f.level() as i128;
    let orders: Vec<i64> = f.orders().to_vec();
    let exp_of = |m: i64| -> u32 {
        let (mut m, mut e) = (m, 0);
        while m > 1 {
            m /= p;
            e += 1;
        }
        e
    };
    let mut basis: Vec<(Vec<i64>, u32)> = (0..r)
        .map(|i| {
            let mut v = vec![0i64; r];
            v[i] = 1;
            (v, exp_of(orders[i]))
        })
        .collect();
    let reduce = |v: &mut Vec<i64>| {
        for (c, &m) in v.iter_mut().zip(&orders) {
            *c = c.rem_euclid(m);
        }
    };
    let pi = p as i128;
    while !basis.is_empty() {
        let k = basis.iter().map(|b| b.1).max().unwrap();
        let pk = pi.pow(k);
        // b·p^k and q·p^k as integers mod p^k and mod 2p^k
        let sb = |x: &[i64], y: &[i64]| (f.b_of(x, y) as i128 * pk / level).rem_euclid(pk);
        let sq = |x: &[i64]| (f.q_of(x) as i128 * pk / level).rem_euclid(2 * pk);
        let top: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].1 == k).collect();
        let entry = acc.entry(k).or_insert(Acc { sign: 1, ..Default::default() });
        if let Some(&i) = top.iter().find(|&&i| sb(&basis[i].0, &basis[i].0) % pi != 0) {
            let (x, _) = basis.remove(i);
            split_one(&x, p, pk, &sb, &sq, entry);
            project_one(&x, pk, &sb, &mut basis, &orders);
            continue;
        }
        let pair = top
            .iter()
            .flat_map(|&i| top.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i < j && sb(&basis[i].0, &basis[j].0) % pi != 0);
        let Some((i, j)) = pair else {
            return Err(Error::InvalidForm("degenerate bilinear form".into()));
        };
        if p != 2 {
            let mut x: Vec<i64> = basis[i].0.iter().zip(&basis[j].0).map(|(a, b)| a + b).collect();
            reduce(&mut x);
            basis.remove(i);
            split_one(&x, p, pk, &sb, &sq, entry);
            project_one(&x, pk, &sb, &mut basis, &orders);
        } else {
            let (y, _) = basis.remove(j);
            let (x, _) = basis.remove(i);
            let (a, d) = (sq(&x) / 2, sq(&y) / 2);
            entry.rank += 2;
            if (a * d) % 2 != 0 {
                entry.sign = -entry.sign;
            }
            let m11 = sb(&x, &x);
            let m12 = sb(&x, &y);
            let m22 = sb(&y, &y);
            let det = (m11 * m22 - m12 * m12).rem_euclid(pk);
            let dinv = mod_inv(det, pk).ok_or_else(|| Error::InvalidForm("singular 2-adic block".into()))?;
            for (z, _) in basis.iter_mut() {
                let (rx, ry) = (sb(z, &x), sb(z, &y));
                // [α β] = [rx ry] · M^{-1}
                let alpha = ((rx * m22 - ry * m12) % pk * dinv).rem_euclid(pk);
                let beta = ((ry * m11 - rx * m12) % pk * dinv).rem_euclid(pk);
                for t in 0..z.len() {
                    z[t] = ((z[t] as i128 - alpha * x[t] as i128 - beta * y[t] as i128)
                        .rem_euclid(orders[t] as i128)) as i64;
                }
            }
        }
    }
    Ok(())
}

fn split_one(
    x: &[i64],
    p: i64,
    pk: i128,
    sb: &dyn Fn(&[i64], &[i64]) -> i128,
    sq: &dyn Fn(&[i64]) -> i128,
    entry: &mut Acc,
) {
    entry.rank += 1;
    if p == 2 {
        let u = sq(x).rem_euclid(8);
        entry.odd = true;
        entry.oddity += u as u64;
        if u == 3 || u == 5 {
            entry.sign = -entry.sign;
        }
    } else {
        let u = sb(x, x).rem_euclid(pk);
        entry.sign *= legendre_symbol(u as i64, p as u64);
    }
}

fn project_one(
    x: &[i64],
    pk: i128,
    sb: &dyn Fn(&[i64], &[i64]) -> i128,
    basis: &mut [(Vec<i64>, u32)],
    orders: &[i64],
) {
    let u = sb(x, x);
    let uinv = mod_inv(u, pk).expect("unit");
    for (z, _) in basis.iter_mut() {
        let c = (sb(z, x) * uinv).rem_euclid(pk);
        if c != 0 {
            for t in 0..z.len() {
                z[t] = (z[t] as i128 - c * x[t] as i128).rem_euclid(orders[t] as i128) as i64;
            }
        }
    }
}

/// Jordan constituents as computed, before any 2-adic normalization.
pub fn jordan_constituents(q: &FiniteQuadraticForm) -> Result<GenusSymbol> {
    let mut out = Vec::new();
    for p in q.primes() {
        let part = q.p_part(p);
        let mut acc: BTreeMap<u32, Acc> = BTreeMap::new();
        split_p_part(&part, p as i64, &mut acc)?;
        for (k, a) in acc {
            if a.rank == 0 {
                continue;
            }
            let two = (p == 2).then(|| if a.odd { TwoType::Odd((a.oddity % 8) as u8) } else { TwoType::Even });
            out.push(Constituent { p, k, rank: a.rank, sign: a.sign, two });
        }
    }
    GenusSymbol::new(out)
}

/// The canonical genus symbol of a finite quadratic form.
pub fn jordan_normal_form(q: &FiniteQuadraticForm) -> GenusSymbol {
    let raw = jordan_constituents(q).expect("discriminant forms are nondegenerate");
    canonical(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    fn form(rows: &[&[i64]]) -> FiniteQuadraticForm {
        FiniteQuadraticForm::from_lattice(&Lattice::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn small_lattices() {
        assert_eq!(jordan_normal_form(&form(&[&[-2]])).to_string(), "2_7^+1");
        assert_eq!(jordan_normal_form(&form(&[&[-2, 1], &[1, -2]])).to_string(), "3^+1");
        assert_eq!(jordan_normal_form(&FiniteQuadraticForm::trivial()).to_string(), "");
        // D4: (Z/2)^2 even, q values 1,1,1
        let d4 = form(&[&[-2, 1, 0, 0], &[1, -2, 1, 1], &[0, 1, -2, 0], &[0, 1, 0, -2]]);
        assert_eq!(jordan_normal_form(&d4).to_string(), "2_II^-2");
    }
}
