//! Genus symbols in ASCII notation, e.g. `2_II^-2,3^+5`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Type of a 2-adic constituent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TwoType {
    /// Even, written `_II`.
    Even,
    /// Odd with oddity in 0..8.
    Odd(u8),
}

/// One Jordan constituent at scale p^k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constituent {
    pub p: u64,
    pub k: u32,
    pub rank: u64,
    /// +1 or -1.
    pub sign: i8,
    /// `Some` exactly when p = 2.
    pub two: Option<TwoType>,
}

impl Constituent {
    pub fn scale(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn is_odd_two(&self) -> bool {
        matches!(self.two, Some(TwoType::Odd(_)))
    }

    pub fn oddity(&self) -> u8 {
        match self.two {
            Some(TwoType::Odd(t)) => t,
            _ => 0,
        }
    }
}

/// Whether an odd 2-adic constituent with rank `n`, sign `sign` and oddity `t` exists.
pub fn valid_oddity(n: u64, sign: i8, t: u8) -> bool {
    let t = t % 8;
    match n {
        0 => false,
        1 => {
            if sign > 0 {
                t == 1 || t == 7
            } else {
                t == 3 || t == 5
            }
        }
        2 => {
            if sign > 0 {
                matches!(t, 0 | 2 | 6)
            } else {
                matches!(t, 2 | 4 | 6)
            }
        }
        _ => (t as u64) % 2 == n % 2,
    }
}

/// An ordered list of Jordan constituents, sorted by (p, k).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenusSymbol {
    constituents: Vec<Constituent>,
}

impl GenusSymbol {
    pub fn empty() -> Self {
        GenusSymbol::default()
    }

    /// Sorts and rejects two constituents at the same scale.
    pub fn new(mut constituents: Vec<Constituent>) -> Result<Self> {
        constituents.sort_by_key(|c| (c.p, c.k));
        for w in constituents.windows(2) {
            if (w[0].p, w[0].k) == (w[1].p, w[1].k) {
                return Err(Error::SymbolParse {
                    offset: 0,
                    msg: format!("two constituents at scale {}", w[0].scale()),
                });
            }
        }
        for c in &constituents {
            check_constituent(c).map_err(|msg| Error::SymbolParse { offset: 0, msg })?;
        }
        Ok(GenusSymbol { constituents })
    }

    /// Combines constituents at equal scales: ranks add, signs multiply, oddities add.
    pub fn merged(constituents: impl IntoIterator<Item = Constituent>) -> Self {
        let mut by_scale: BTreeMap<(u64, u32), Constituent> = BTreeMap::new();
        for c in constituents {
            if c.rank == 0 {
                continue;
            }
            by_scale
                .entry((c.p, c.k))
                .and_modify(|e| {
                    e.rank += c.rank;
                    e.sign *= c.sign;
                    e.two = match (e.two, c.two) {
                        (Some(TwoType::Even), Some(TwoType::Even)) => Some(TwoType::Even),
                        (Some(a), Some(b)) => Some(TwoType::Odd((oddity_of(a) + oddity_of(b)) % 8)),
                        _ => None,
                    };
                })
                .or_insert(c);
        }
        GenusSymbol { constituents: by_scale.into_values().collect() }
    }

    pub fn constituents(&self) -> &[Constituent] {
        &self.constituents
    }

    pub fn is_empty(&self) -> bool {
        self.constituents.is_empty()
    }

    /// Primes occurring in the symbol, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.constituents.iter().map(|c| c.p).collect();
        ps.dedup();
        ps
    }

    /// Constituents with the given prime.
    pub fn part(&self, p: u64) -> impl Iterator<Item = &Constituent> {
        self.constituents.iter().filter(move |c| c.p == p)
    }

    /// Number of generators of the p-part, i.e. the sum of its ranks.
    pub fn p_length(&self, p: u64) -> u64 {
        self.part(p).map(|c| c.rank).sum()
    }

    /// log_p of the order of the p-part.
    pub fn p_valuation(&self, p: u64) -> u64 {
        self.part(p).map(|c| c.rank * c.k as u64).sum()
    }

    /// Order of the discriminant group, if it fits in u128.
    pub fn group_order(&self) -> Option<u128> {
        let mut o: u128 = 1;
        for c in &self.constituents {
            let s = (c.p as u128).checked_pow(c.k)?;
            o = o.checked_mul(s.checked_pow(u32::try_from(c.rank).ok()?)?)?;
        }
        Some(o)
    }

    /// Per-scale merge of two symbols.
    pub fn sum(&self, other: &GenusSymbol) -> GenusSymbol {
        GenusSymbol::merged(self.constituents.iter().chain(other.constituents.iter()).copied())
    }

    /// Signature mod 8 of any even lattice with this discriminant form.
    pub fn signature_mod8(&self) -> u8 {
        let mut s: i64 = 0;
        for c in &self.constituents {
            let antisquare = c.k % 2 == 1 && c.sign < 0;
            if c.p == 2 {
                s += c.oddity() as i64;
                if antisquare {
                    s += 4;
                }
            } else {
                let pk = (0..c.k).fold(1i64, |acc, _| acc * (c.p % 8) as i64 % 8);
                s -= (c.rank as i64 % 8) * (pk - 1);
                if antisquare {
                    s -= 4;
                }
            }
        }
        s.rem_euclid(8) as u8
    }

    /// Same symbol with every form multiplied by -1.
    pub fn negated(&self) -> GenusSymbol {
        let constituents = self
            .constituents
            .iter()
            .map(|c| {
                let mut c = *c;
                match c.two {
                    // units u -> -u: oddity negates, the class of the determinant mod ±1 is kept
                    Some(TwoType::Odd(t)) => c.two = Some(TwoType::Odd((8 - t) % 8)),
                    Some(TwoType::Even) => {}
                    None => {
                        if c.rank % 2 == 1 && c.p % 4 == 3 {
                            c.sign = -c.sign;
                        }
                    }
                }
                c
            })
            .collect();
        GenusSymbol { constituents }
    }
}

fn oddity_of(t: TwoType) -> u8 {
    match t {
        TwoType::Even => 0,
        TwoType::Odd(x) => x,
    }
}

fn check_constituent(c: &Constituent) -> std::result::Result<(), String> {
    if c.k == 0 || c.rank == 0 {
        return Err("scale and rank must exceed 1 and 0".into());
    }
    if c.sign != 1 && c.sign != -1 {
        return Err("sign must be + or -".into());
    }
    match (c.p, c.two) {
        (2, None) => Err("2-adic constituent needs a subscript".into()),
        (2, Some(TwoType::Even)) if c.rank % 2 == 1 => Err("type II constituent of odd rank".into()),
        (2, Some(TwoType::Odd(t))) if t > 7 => Err("oddity out of range".into()),
        (2, _) => Ok(()),
        (_, Some(TwoType::Even)) => Err("II subscript on an odd prime".into()),
        (_, Some(_)) => Err("subscript on an odd prime".into()),
        (_, None) => Ok(()),
    }
}

/// Returns (p, k) when n = p^k with k ≥ 1.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            break;
        }
        p += 1;
    }
    if n % p != 0 {
        p = n;
    }
    let (mut m, mut k) = (n, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

impl fmt::Display for Constituent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.scale())?;
        match self.two {
            Some(TwoType::Even) => write!(f, "_II")?,
            Some(TwoType::Odd(t)) => write!(f, "_{t}")?,
            None => {}
        }
        write!(f, "^{}{}", if self.sign > 0 { '+' } else { '-' }, self.rank)
    }
}

impl fmt::Display for GenusSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.constituents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::SymbolParse { offset: self.pos, msg: msg.into() }
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", ch as char)))
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        let mut v: u64 = 0;
        while let Some(&d) = self.s.get(self.pos) {
            if !d.is_ascii_digit() {
                break;
            }
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((d - b'0') as u64))
                .ok_or_else(|| self.err("number too large"))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        Ok(v)
    }
}

/// Parses the comma-separated atom grammar; whitespace is ignored.
pub fn parse_symbol(text: &str) -> Result<GenusSymbol> {
    let mut cur = Cursor { s: text.as_bytes(), pos: 0 };
    let mut out = Vec::new();
    if cur.peek().is_none() {
        return Ok(GenusSymbol::empty());
    }
    loop {
        let atom_start = {
            cur.skip_ws();
            cur.pos
        };
        let scale = cur.number()?;
        let (p, k) = prime_power(scale)
            .ok_or_else(|| Error::SymbolParse { offset: atom_start, msg: format!("{scale} is not a prime power") })?;
        let mut two = None;
        if cur.peek() == Some(b'_') {
            cur.pos += 1;
            let sub_at = cur.pos;
            if cur.peek() == Some(b'I') {
                cur.expect(b'I')?;
                cur.expect(b'I')?;
                two = Some(TwoType::Even);
            } else {
                let t = cur.number()?;
                if t > 7 {
                    return Err(Error::SymbolParse { offset: sub_at, msg: "oddity must be 0..7".into() });
                }
                two = Some(TwoType::Odd(t as u8));
            }
            if p != 2 {
                return Err(Error::SymbolParse {
                    offset: sub_at,
                    msg: format!("subscript on odd prime scale {scale}"),
                });
            }
        } else if p == 2 {
            return Err(cur.err("2-adic atom needs a subscript"));
        }
        cur.expect(b'^')?;
        let sign = match cur.peek() {
            Some(b'+') => 1,
            Some(b'-') => -1,
            _ => return Err(cur.err("expected sign")),
        };
        cur.pos += 1;
        let rank_at = cur.pos;
        let rank = cur.number()?;
        let c = Constituent { p, k, rank, sign, two };
        check_constituent(&c).map_err(|msg| Error::SymbolParse { offset: rank_at, msg })?;
        if out.iter().any(|o: &Constituent| (o.p, o.k) == (p, k)) {
            return Err(Error::SymbolParse { offset: atom_start, msg: format!("repeated scale {scale}") });
        }
        out.push(c);
        match cur.peek() {
            None => break,
            Some(b',') => cur.pos += 1,
            Some(_) => return Err(cur.err("expected ',' or end")),
        }
    }
    out.sort_by_key(|c| (c.p, c.k));
    Ok(GenusSymbol { constituents: out })
}

impl FromStr for GenusSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_symbol(s)
    }
}

pub fn symbol_to_string(s: &GenusSymbol) -> String {
    s.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let s = parse_symbol("2_II^-2,3^+5").unwrap();
        assert_eq!(
            s.constituents(),
            &[
                Constituent { p: 2, k: 1, rank: 2, sign: -1, two: Some(TwoType::Even) },
                Constituent { p: 3, k: 1, rank: 5, sign: 1, two: None },
            ]
        );
        let s = parse_symbol("16_5^-1").unwrap();
        assert_eq!(s.constituents()[0], Constituent { p: 2, k: 4, rank: 1, sign: -1, two: Some(TwoType::Odd(5)) });
        assert!(parse_symbol("").unwrap().is_empty());
        assert_eq!(parse_symbol(" 2_7 ^ +1 ").unwrap().to_string(), "2_7^+1");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_symbol("3_II^+2"), Err(Error::SymbolParse { .. })));
        assert!(parse_symbol("6^+1").is_err());
        assert!(parse_symbol("2^+1").is_err());
        assert!(parse_symbol("2_II^+3").is_err());
        assert!(parse_symbol("2_7^+1,2_1^+1").is_err());
        assert!(parse_symbol("2_8^+1").is_err());
        match parse_symbol("3^+5,x") {
            Err(Error::SymbolParse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn signature_examples() {
        assert_eq!(parse_symbol("2_II^-2,3^+5").unwrap().signature_mod8(), 2);
        assert_eq!(parse_symbol("2_7^-3,3^+5").unwrap().signature_mod8(), 1);
        assert_eq!(parse_symbol("2_7^+1").unwrap().signature_mod8(), 7);
        assert_eq!(GenusSymbol::empty().signature_mod8(), 0);
    }

    #[test]
    fn sum_merges() {
        let a = parse_symbol("2_7^+1").unwrap();
        let b = parse_symbol("2_II^-2,3^+5").unwrap();
        assert_eq!(a.sum(&b).to_string(), "2_7^-3,3^+5");
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
