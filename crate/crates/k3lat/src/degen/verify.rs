//! The verification battery over loaded tables.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::degen::tables::{DegenerationRecord, MarkingKind, MarkingRecord, OldCaseRecord, Source, Tables};
use crate::error::{Error, Result};
use crate::qforms::symbol::prime_power;
use crate::qforms::{canonical_key, lattice_symbol, symbols_equivalent, GenusSymbol};
use crate::roots::{Family, RootSystemType};

/// Table holding the group orders used by the old-case lists.
pub const CODIM1_TABLE: &str = "codim1";

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportLine {
    pub key: String,
    pub check: String,
    pub pass: bool,
    /// Set for checks that depend on an assumption outside the tables (the j mapping);
    /// a failed advisory line prints WARN and does not count as a failure.
    pub advisory: bool,
    pub details: String,
}

impl ReportLine {
    fn new(key: &str, check: &str, pass: bool, details: String) -> Self {
        ReportLine { key: key.to_string(), check: check.to_string(), pass, advisory: false, details }
    }

    fn advisory(mut self) -> Self {
        self.advisory = true;
        self
    }

    pub fn is_failure(&self) -> bool {
        !self.pass && !self.advisory
    }

    pub fn status(&self) -> &'static str {
        match (self.pass, self.advisory) {
            (true, _) => "PASS",
            (false, true) => "WARN",
            (false, false) => "FAIL",
        }
    }

    /// Tab-separated `key check PASS|FAIL|WARN details`.
    pub fn to_text(&self) -> String {
        format!("{}\t{}\t{}\t{}", self.key, self.check, self.status(), self.details)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}

fn with_tex(pass: bool, details: String, src: &Source) -> String {
    match (&src.tex, pass) {
        (Some(t), false) => format!("{details}; {}:{} tex: {t}", src.file, src.line),
        (None, false) => format!("{details}; {}:{}", src.file, src.line),
        _ => details,
    }
}

fn neg_mod8(r: usize) -> u8 {
    ((8 - (r % 8)) % 8) as u8
}

/// Rank law, Milgram congruences for S and S_G, length bounds and prime-power scales.
pub fn verify_record(r: &DegenerationRecord) -> Vec<ReportLine> {
    let key = r.key();
    let mut out = Vec::new();
    let mut push = |check: &str, pass: bool, details: String| {
        out.push(ReportLine::new(&key, check, pass, with_tex(pass, details, &r.source)));
    };
    let t = r.orbit_count();
    push("rank_law", r.rk_s == r.rk_sg + t, format!("rk S = {}, rk S_G + t = {} + {}", r.rk_s, r.rk_sg, t));
    for (name, q, rk) in [("milgram_S", &r.q_s, r.rk_s), ("milgram_SG", &r.q_sg, r.rk_sg)] {
        let sig = q.signature_mod8();
        push(name, sig == neg_mod8(rk), format!("signature {} vs -{} = {} mod 8", sig, rk, neg_mod8(rk)));
    }
    for (name, q, rk) in [("p_length_S", &r.q_s, r.rk_s), ("p_length_SG", &r.q_sg, r.rk_sg)] {
        let worst = q.primes().into_iter().map(|p| (p, q.p_length(p))).max_by_key(|&(_, l)| l);
        let pass = worst.map_or(true, |(_, l)| l as usize <= rk);
        let details = worst.map_or("trivial group".to_string(), |(p, l)| format!("max length {l} at p={p}, rank {rk}"));
        push(name, pass, details);
    }
    let bad: Vec<u64> = r
        .q_s
        .constituents()
        .iter()
        .chain(r.q_sg.constituents())
        .map(|c| c.scale())
        .filter(|&s| prime_power(s).is_none())
        .collect();
    push("prime_power_scales", bad.is_empty(), format!("non prime-power scales {bad:?}"));
    if let Some(d) = &r.deg {
        let (o, a) = (d.orbits().iter().map(|x| x.vertices()).sum::<usize>(), d.ambient().vertices());
        push("vertex_count", o == a, format!("orbits {o}, ambient {a}"));
    }
    out
}

fn summand_symbol(r: &RootSystemType) -> Result<GenusSymbol> {
    if r.is_empty() {
        return Ok(GenusSymbol::empty());
    }
    lattice_symbol(&r.lattice())
}

/// Checks S = R ⊕ S(ref): ranks add and q(R) ⊕ q_S(ref) is equivalent to q_S.
pub fn verify_reduction(tables: &Tables, m: &MarkingRecord) -> Result<bool> {
    Ok(reduction_line(tables, m)?.pass)
}

fn reduction_line(tables: &Tables, m: &MarkingRecord) -> Result<ReportLine> {
    let MarkingKind::Reduction { summand, reference } = &m.kind else {
        return Err(Error::DegenParse("not a reduction line".into()));
    };
    let missing = |k: &str| Error::data(&m.source.file, m.source.line, format!("no record {k}"));
    let this = tables.record(&m.target).ok_or_else(|| missing(&m.target))?;
    let base = tables.record(reference).ok_or_else(|| missing(reference))?;
    let sum = summand_symbol(summand)?.sum(&base.q_s);
    let ranks = summand.rank() + base.rk_s == this.rk_s;
    let forms = symbols_equivalent(&sum, &this.q_s);
    let pass = ranks && forms;
    let details = format!(
        "{} + S({}) : rank {} + {} vs {}, q {} vs {}",
        summand,
        base.deg.as_ref().map_or("-".to_string(), |d| d.to_string()),
        summand.rank(),
        base.rk_s,
        this.rk_s,
        sum,
        this.q_s
    );
    Ok(ReportLine::new(&m.key(), "reduction", pass, with_tex(pass, details, &m.source)))
}

/// Whether an irreducible root system of type `a` can sit inside one of type `b`, by rank.
fn fits(a: (Family, usize), b: (Family, usize)) -> bool {
    use Family::*;
    match (a.0, b.0) {
        (A, A) | (D, D) | (E, E) => a.1 <= b.1,
        (A, D) => a.1 < b.1,
        (A, E) => a.1 <= [5, 7, 8][b.1 - 6],
        (D, E) => a.1 <= [5, 6, 8][b.1 - 6],
        _ => false,
    }
}

/// Assigns components of `small` to components of `big` so that each fits and ranks are not exceeded.
pub fn packs_into(small: &RootSystemType, big: &RootSystemType) -> bool {
    let mut items: Vec<(Family, usize)> = small.components().to_vec();
    items.sort_by(|x, y| y.1.cmp(&x.1));
    let bins: Vec<(Family, usize)> = big.components().to_vec();
    let mut room: Vec<usize> = bins.iter().map(|b| b.1).collect();
    fn go(i: usize, items: &[(Family, usize)], bins: &[(Family, usize)], room: &mut [usize]) -> bool {
        if i == items.len() {
            return true;
        }
        let mut tried: Vec<((Family, usize), usize)> = Vec::new();
        for b in 0..bins.len() {
            if !fits(items[i], bins[b]) || room[b] < items[i].1 || tried.contains(&(bins[b], room[b])) {
                continue;
            }
            tried.push((bins[b], room[b]));
            room[b] -= items[i].1;
            if go(i + 1, items, bins, room) {
                return true;
            }
            room[b] += items[i].1;
        }
        false
    }
    go(0, &items, &bins, &mut room)
}

/// Rank bound for the complement roots, plus a packing check when the j map is known.
pub fn verify_marking_bounds(
    tables: &Tables,
    m: &MarkingRecord,
    jmap: Option<&BTreeMap<u32, String>>,
) -> Result<Vec<ReportLine>> {
    let MarkingKind::Mark { j, complement_roots, .. } = &m.kind else {
        return Ok(Vec::new());
    };
    let this = tables
        .record(&m.target)
        .ok_or_else(|| Error::data(&m.source.file, m.source.line, format!("no record {}", m.target)))?;
    let key = m.key();
    let bound = 24usize.saturating_sub(this.rk_s);
    let rk = complement_roots.rank();
    let pass = rk <= bound;
    let mut out = vec![ReportLine::new(
        &key,
        "marking_rank_bound",
        pass,
        with_tex(pass, format!("rank {complement_roots} = {rk} <= 24 - {} = {bound}", this.rk_s), &m.source),
    )];
    if let Some(name) = jmap.and_then(|jm| jm.get(j)) {
        let ambient: RootSystemType = if name == "Leech" { RootSystemType::empty() } else { name.parse()? };
        let pass = packs_into(complement_roots, &ambient);
        out.push(ReportLine::new(
            &key,
            "marking_packs_into_N_j",
            pass,
            with_tex(pass, format!("{complement_roots} into {name} (conditional on mapping j={j})"), &m.source),
        )
        .advisory());
    }
    Ok(out)
}

/// The three old-case checks.
pub fn verify_old_case(tables: &Tables, o: &OldCaseRecord) -> Vec<ReportLine> {
    let key = o.key();
    let mut out = Vec::new();
    let mut push = |check: &str, pass: bool, details: String| {
        out.push(ReportLine::new(&key, check, pass, with_tex(pass, details, &o.source)));
    };
    let left = o.target.as_deref().and_then(|k| tables.record(k));
    push(
        "old_left_flagged",
        left.is_some_and(|r| r.old_flag && r.group_n == o.small_n),
        match left {
            Some(r) => format!("{} old flag {}", r.key(), r.old_flag),
            None => format!("no record for {}", o.deg),
        },
    );
    let small = tables.groups.get(&o.table).and_then(|g| g.get(&o.small_n));
    let big = tables.groups.get(CODIM1_TABLE).and_then(|g| g.get(&o.big_n));
    let pass = matches!((small, big), (Some(s), Some(b)) if b.order > s.order);
    let show = |g: Option<&crate::degen::tables::GroupInfo>| g.map_or("?".to_string(), |g| format!("{} ({})", g.order, g.name));
    push("old_group_order", pass, format!("|G| {} -> {}", show(small), show(big)));
    let (a, b) = (o.deg.orbit_count(), o.big_deg.orbit_count());
    push("old_orbits_decrease", b < a, format!("orbits {a} -> {b}"));
    out
}

/// Records with the given rank and an equivalent q_S; rows flagged `o` only when `include_old`.
pub fn genus_lookup<'a>(tables: &'a Tables, rk: usize, q: &GenusSymbol, include_old: bool) -> Vec<&'a DegenerationRecord> {
    let key = canonical_key(q);
    tables
        .records
        .iter()
        .enumerate()
        .filter(|(i, r)| r.rk_s == rk && (include_old || !r.old_flag) && *tables.q_key(*i) == key)
        .map(|(_, r)| r)
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Restrict to one table (`d6`, `c4`, `codim1`).
    pub only: Option<String>,
    /// Include rows flagged `o` in lookup checks.
    pub include_old: bool,
    pub jmap: Option<BTreeMap<u32, String>>,
}

/// Runs every check and returns the lines sorted by key, stable in check order.
pub fn verify_all(tables: &Tables, opts: &VerifyOptions) -> Result<Vec<ReportLine>> {
    let keep = |t: &str| opts.only.as_deref().map_or(true, |o| o == t);
    let mut lines: Vec<ReportLine> = tables
        .records
        .par_iter()
        .filter(|r| keep(&r.table))
        .flat_map_iter(|r| {
            let mut v = verify_record(r);
            let found = genus_lookup(tables, r.rk_s, &r.q_s, opts.include_old).iter().any(|x| x.key() == r.key());
            let expect = opts.include_old || !r.old_flag;
            v.push(ReportLine::new(
                &r.key(),
                "lookup_self",
                found == expect,
                format!("found {found}, expected {expect}"),
            ));
            v
        })
        .collect();
    let marks: Vec<Result<Vec<ReportLine>>> = tables
        .markings
        .par_iter()
        .filter(|m| keep(&m.table))
        .map(|m| match m.kind {
            MarkingKind::Reduction { .. } => reduction_line(tables, m).map(|l| vec![l]),
            MarkingKind::Mark { .. } => verify_marking_bounds(tables, m, opts.jmap.as_ref()),
        })
        .collect();
    for m in marks {
        lines.extend(m?);
    }
    lines.extend(tables.old_cases.iter().filter(|o| keep(&o.table)).flat_map(|o| verify_old_case(tables, o)));
    lines.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing() {
        let t = |s: &str| s.parse::<RootSystemType>().unwrap();
        assert!(packs_into(&t("A1+2A2"), &t("12A2")));
        assert!(packs_into(&t("A5"), &t("D6+A9")));
        assert!(!packs_into(&t("E6"), &t("24A1")));
        assert!(!packs_into(&t("A4"), &t("D4")));
        assert!(packs_into(&t("0"), &t("0")));
        assert!(!packs_into(&t("A1"), &t("0")));
    }
}
