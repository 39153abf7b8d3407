//! Exhaustive isomorphism test for small finite quadratic forms.
//!
//! Independent of the symbol machinery: per prime it compares the multisets of
//! (element order, q-value) and then searches for an isometry by backtracking.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::qforms::fqf::FiniteQuadraticForm;

pub const DEFAULT_BOUND: u64 = 1 << 12;
const NODE_BUDGET: u64 = 20_000_000;

struct Enumerated {
    elems: Vec<Vec<i64>>,
    /// (order, q numerator at the common level)
    keys: Vec<(i64, i64)>,
}

fn element_order(c: &[i64], orders: &[i64]) -> i64 {
    let mut o: i64 = 1;
    for (&x, &m) in c.iter().zip(orders) {
        if x != 0 {
            let g = num_integer::gcd(x, m);
            o = num_integer::lcm(o, m / g);
        }
    }
    o
}

fn enumerate(f: &FiniteQuadraticForm, scale: i64) -> Enumerated {
    let orders = f.orders();
    let mut elems = Vec::new();
    let mut keys = Vec::new();
    let mut c = vec![0i64; orders.len()];
    loop {
        keys.push((element_order(&c, orders), f.q_of(&c) * scale));
        elems.push(c.clone());
        let mut i = 0;
        loop {
            if i == c.len() {
                return Enumerated { elems, keys };
            }
            c[i] += 1;
            if c[i] < orders[i] {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

/// Decides whether `q1` and `q2` are isomorphic; both groups must have order at most `bound`.
pub fn brute_force_isomorphic(q1: &FiniteQuadraticForm, q2: &FiniteQuadraticForm, bound: u64) -> Result<bool> {
    let o1 = q1.order().unwrap_or(u64::MAX);
    let o2 = q2.order().unwrap_or(u64::MAX);
    for o in [o1, o2] {
        if o > bound {
            return Err(Error::OracleBound { order: o, bound });
        }
    }
    if o1 != o2 {
        return Ok(false);
    }
    let primes = q1.primes();
    if primes != q2.primes() {
        return Ok(false);
    }
    let mut nodes = 0u64;
    for p in primes {
        if !p_parts_isomorphic(&q1.p_part(p), &q2.p_part(p), &mut nodes)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn p_parts_isomorphic(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm, nodes: &mut u64) -> Result<bool> {
    let level = num_integer::lcm(a.level(), b.level());
    let (sa, sb) = (level / a.level(), level / b.level());
    let ea = enumerate(a, sa);
    let eb = enumerate(b, sb);
    let mut ka = ea.keys.clone();
    let mut kb = eb.keys.clone();
    ka.sort_unstable();
    kb.sort_unstable();
    if ka != kb {
        return Ok(false);
    }
    // candidates in b for each generator of a, by (order, q)
    let mut by_key: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, k) in eb.keys.iter().enumerate() {
        by_key.entry(*k).or_default().push(i);
    }
    let r = a.num_generators();
    let gens: Vec<Vec<i64>> = (0..r)
        .map(|i| {
            let mut v = vec![0i64; r];
            v[i] = 1;
            v
        })
        .collect();
    let gen_keys: Vec<(i64, i64)> = gens.iter().map(|g| (element_order(g, a.orders()), a.q_of(g) * sa)).collect();
    let target_b: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| a.b_of(&gens[i], &gens[j]) * sa).collect()).collect();
    let cands: Vec<&[usize]> = gen_keys.iter().map(|k| by_key.get(k).map(|v| v.as_slice()).unwrap_or(&[])).collect();
    let mut image: Vec<usize> = Vec::with_capacity(r);
    search(&eb, b, sb, &cands, &target_b, &mut image, nodes)
}

fn search(
    eb: &Enumerated,
    b: &FiniteQuadraticForm,
    sb: i64,
    cands: &[&[usize]],
    target_b: &[Vec<i64>],
    image: &mut Vec<usize>,
    nodes: &mut u64,
) -> Result<bool> {
    let depth = image.len();
    if depth == cands.len() {
        return Ok(true);
    }
    for &h in cands[depth] {
        *nodes += 1;
        if *nodes > NODE_BUDGET {
            return Err(Error::OracleBudget(*nodes));
        }
        let ok = image.iter().enumerate().all(|(j, &hj)| b.b_of(&eb.elems[h], &eb.elems[hj]) * sb == target_b[depth][j]);
        if ok {
            image.push(h);
            if search(eb, b, sb, cands, target_b, image, nodes)? {
                return Ok(true);
            }
            image.pop();
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(order: i64, q: i64) -> FiniteQuadraticForm {
        FiniteQuadraticForm::new(order, vec![order], vec![q], vec![vec![q % order]]).unwrap()
    }

    #[test]
    fn cyclic_three() {
        // -2/3 vs -4/3
        let a = cyc(3, 4);
        let b = cyc(3, 2);
        assert!(brute_force_isomorphic(&a, &a, DEFAULT_BOUND).unwrap());
        assert!(!brute_force_isomorphic(&a, &b, DEFAULT_BOUND).unwrap());
    }

    #[test]
    fn bound_is_enforced() {
        let a = cyc(3, 4);
        assert!(matches!(brute_force_isomorphic(&a, &a, 2), Err(Error::OracleBound { .. })));
    }

    #[test]
    fn two_adic_fusion() {
        // <1/2> ⊕ <3/2> in either order, against <1/2> ⊕ <1/2>
        let x = cyc(2, 1).direct_sum(&cyc(2, 3)).unwrap();
        let y = cyc(2, 3).direct_sum(&cyc(2, 1)).unwrap();
        assert!(brute_force_isomorphic(&x, &y, DEFAULT_BOUND).unwrap());
        let z = cyc(2, 1).direct_sum(&cyc(2, 1)).unwrap();
        assert!(!brute_force_isomorphic(&x, &z, DEFAULT_BOUND).unwrap());
    }
}
