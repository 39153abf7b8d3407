//! Canonical 2-adic data: oddity fusion within compartments and sign walking along trains.
//!
//! A discriminant form sees only the constituents at scales p^k with k ≥ 1. The unimodular
//! 2-adic constituent of the lattice is even and its sign is not determined by the form,
//! so it is modelled as a phantom even constituent at scale 2^0 whose sign is free.

use std::collections::{BTreeSet, VecDeque};

use crate::qforms::symbol::{valid_oddity, Constituent, GenusSymbol, TwoType};

/// Equivalence key: two symbols denote isomorphic forms iff their keys are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    odd: Vec<Constituent>,
    /// (k, rank, odd?) for each 2-adic constituent.
    two_profile: Vec<(u32, u64, bool)>,
    /// Signs (0 for +, 1 for -) and compartment oddity totals of the least reachable state.
    state: (Vec<u8>, Vec<u8>),
}

struct TwoAdic {
    /// Index 0 is the phantom.
    cons: Vec<Constituent>,
    /// Compartment index of each constituent, `None` for even ones.
    comp_of: Vec<Option<usize>>,
    comps: Vec<Vec<usize>>,
    /// Pairs (i, i+1) of list-adjacent constituents in the same train.
    walks: Vec<(usize, usize)>,
}

impl TwoAdic {
    fn new(sym: &GenusSymbol) -> Self {
        let mut cons = vec![Constituent { p: 2, k: 0, rank: 0, sign: 1, two: Some(TwoType::Even) }];
        cons.extend(sym.part(2).copied());
        let odd_at = |k: u32| cons.iter().any(|c| c.k == k && c.is_odd_two());
        let mut comp_of: Vec<Option<usize>> = vec![None; cons.len()];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for i in 1..cons.len() {
            if !cons[i].is_odd_two() {
                continue;
            }
            let joins_prev = i > 1 && cons[i - 1].is_odd_two() && cons[i - 1].k + 1 == cons[i].k;
            if joins_prev {
                let c = comp_of[i - 1].unwrap();
                comps[c].push(i);
                comp_of[i] = Some(c);
            } else {
                comps.push(vec![i]);
                comp_of[i] = Some(comps.len() - 1);
            }
        }
        // scales k and k+1 are linked when either carries an odd constituent
        let linked = |a: u32, b: u32| (a..b).all(|k| odd_at(k) || odd_at(k + 1));
        let walks = (0..cons.len() - 1).filter(|&i| linked(cons[i].k, cons[i + 1].k)).map(|i| (i, i + 1)).collect();
        TwoAdic { cons, comp_of, comps, walks }
    }

    fn initial(&self) -> (Vec<i8>, Vec<u8>) {
        let signs = self.cons.iter().map(|c| c.sign).collect();
        let totals = self.comps.iter().map(|m| (m.iter().map(|&i| self.cons[i].oddity() as u32).sum::<u32>() % 8) as u8).collect();
        (signs, totals)
    }

    /// All states reachable from either phantom sign, projected away from the phantom.
    fn reachable(&self) -> BTreeSet<(Vec<u8>, Vec<u8>)> {
        let (signs, totals) = self.initial();
        let mut seen: BTreeSet<(Vec<i8>, Vec<u8>)> = BTreeSet::new();
        let mut queue = VecDeque::new();
        for ph in [1i8, -1] {
            let mut s = signs.clone();
            s[0] = ph;
            if seen.insert((s.clone(), totals.clone())) {
                queue.push_back((s, totals.clone()));
            }
        }
        while let Some((s, t)) = queue.pop_front() {
            for &(i, j) in &self.walks {
                let mut s2 = s.clone();
                s2[i] = -s2[i];
                s2[j] = -s2[j];
                let mut t2 = t.clone();
                let mut touched: Vec<usize> = [self.comp_of[i], self.comp_of[j]].into_iter().flatten().collect();
                touched.dedup();
                for c in touched {
                    t2[c] = (t2[c] + 4) % 8;
                }
                if seen.insert((s2.clone(), t2.clone())) {
                    queue.push_back((s2, t2));
                }
            }
        }
        seen.into_iter()
            .map(|(s, t)| (s[1..].iter().map(|&x| u8::from(x < 0)).collect(), t))
            .collect()
    }

    /// Smallest per-constituent oddities realizing the compartment totals, if any.
    fn distribute(&self, signs: &[u8], totals: &[u8]) -> Option<Vec<u8>> {
        let mut odd = vec![0u8; self.cons.len()];
        for (c, members) in self.comps.iter().enumerate() {
            let mut pick = vec![0u8; members.len()];
            if !fill(&self.cons, members, signs, totals[c], 0, 0, &mut pick) {
                return None;
            }
            for (m, &i) in members.iter().enumerate() {
                odd[i] = pick[m];
            }
        }
        Some(odd)
    }
}

fn fill(cons: &[Constituent], members: &[usize], signs: &[u8], total: u8, pos: usize, acc: u32, pick: &mut [u8]) -> bool {
    if pos == members.len() {
        return acc % 8 == total as u32;
    }
    let c = &cons[members[pos]];
    let sign = if signs[members[pos] - 1] == 0 { 1 } else { -1 };
    for t in 0..8u8 {
        if valid_oddity(c.rank, sign, t) {
            pick[pos] = t;
            if fill(cons, members, signs, total, pos + 1, acc + t as u32, pick) {
                return true;
            }
        }
    }
    false
}

/// Equivalence key of a symbol.
pub fn canonical_key(s: &GenusSymbol) -> CanonicalKey {
    let two = TwoAdic::new(s);
    let state = two.reachable().into_iter().next().expect("nonempty");
    CanonicalKey {
        odd: s.constituents().iter().filter(|c| c.p != 2).copied().collect(),
        two_profile: two.cons[1..].iter().map(|c| (c.k, c.rank, c.is_odd_two())).collect(),
        state,
    }
}

/// Printable canonical representative: the first reachable state (signs `+` first, then
/// ascending compartment oddities) admitting valid per-constituent oddities, with the
/// smallest oddities assigned first.
pub fn canonical(s: &GenusSymbol) -> GenusSymbol {
    let two = TwoAdic::new(s);
    for (signs, totals) in two.reachable() {
        if let Some(odd) = two.distribute(&signs, &totals) {
            let mut out: Vec<Constituent> = Vec::with_capacity(s.constituents().len());
            for (i, c) in two.cons.iter().enumerate().skip(1) {
                let mut c = *c;
                c.sign = if signs[i - 1] == 0 { 1 } else { -1 };
                if c.is_odd_two() {
                    c.two = Some(TwoType::Odd(odd[i]));
                }
                out.push(c);
            }
            out.extend(s.constituents().iter().filter(|c| c.p != 2).copied());
            return GenusSymbol::new(out).expect("same scales");
        }
    }
    s.clone()
}

/// Whether two symbols denote isomorphic finite quadratic forms.
pub fn symbols_equivalent(s1: &GenusSymbol, s2: &GenusSymbol) -> bool {
    canonical_key(s1) == canonical_key(s2)
}
