//! Ingestion of the table transcriptions into a cross-linked model.
//!
//! Every non-comment line starts with a keyword:
//!
//! ```text
//! @table NAME
//! @group N ORDER NAME
//! n=N NAME RK_SG Q_SG | DEG RK_S Q_S [*] [o]        (DEG is `-` for the base row)
//! reduce DEG | R | REF                               (REF is `-` for the base row)
//! mark DEG | J [*] | H | ORBIT_LABELS | COMPLEMENT
//! old N | DEG | BIG_N | BIG_DEG
//! ```
//!
//! A `# tex:` comment is attached to the row that follows it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::degen::grammar::{parse_degeneration, DegenerationType};
use crate::error::{Error, Result};
use crate::qforms::{canonical_key, parse_symbol, CanonicalKey, GenusSymbol};
use crate::roots::RootSystemType;

/// Files read by [`load_tables`], in order.
pub const TABLE_FILES: [&str; 7] =
    ["codim1.tbl", "d6.tbl", "c4.tbl", "d6_markings.tbl", "c4_markings.tbl", "d6_old.tbl", "c4_old.tbl"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupInfo {
    pub order: u64,
    pub name: String,
}

/// Where a line came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Source {
    pub file: String,
    pub line: usize,
    pub tex: Option<String>,
}

#[derive(Clone, Debug)]
pub struct DegenerationRecord {
    pub table: String,
    pub group_n: u32,
    pub group_name: String,
    pub rk_sg: usize,
    pub q_sg: GenusSymbol,
    /// `None` for the base row.
    pub deg: Option<DegenerationType>,
    pub rk_s: usize,
    pub q_s: GenusSymbol,
    pub unique_flag: bool,
    pub old_flag: bool,
    pub source: Source,
}

impl DegenerationRecord {
    pub fn key(&self) -> String {
        record_key(&self.table, self.group_n, self.deg.as_ref())
    }

    /// Number t of orbits; zero for the base row.
    pub fn orbit_count(&self) -> usize {
        self.deg.as_ref().map_or(0, DegenerationType::orbit_count)
    }
}

fn record_key(table: &str, n: u32, deg: Option<&DegenerationType>) -> String {
    format!("{table}/n={n}/{}", deg.map_or("-".to_string(), |d| d.key()))
}

#[derive(Clone, Debug)]
pub enum MarkingKind {
    /// S = R ⊕ S(reference).
    Reduction { summand: RootSystemType, reference: String },
    Mark { j: u32, unique: bool, action: String, orbit_labels: Vec<String>, complement_roots: RootSystemType },
}

#[derive(Clone, Debug)]
pub struct MarkingRecord {
    pub table: String,
    pub deg: DegenerationType,
    /// Key of the degeneration record this line refers to.
    pub target: String,
    pub kind: MarkingKind,
    pub source: Source,
}

impl MarkingRecord {
    pub fn key(&self) -> String {
        match &self.kind {
            MarkingKind::Reduction { .. } => format!("{}#reduce", self.target),
            MarkingKind::Mark { j, action, .. } => format!("{}#mark:j={j}:{action}", self.target),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OldCaseRecord {
    pub table: String,
    pub small_n: u32,
    pub deg: DegenerationType,
    /// Resolved key of the left-hand record, if it exists.
    pub target: Option<String>,
    pub big_n: u32,
    pub big_deg: DegenerationType,
    pub source: Source,
}

impl OldCaseRecord {
    pub fn key(&self) -> String {
        format!("{}/old/n={}/{}<=n={}/{}", self.table, self.small_n, self.deg.key(), self.big_n, self.big_deg.key())
    }
}

/// The loaded, cross-linked tables.
#[derive(Clone, Debug, Default)]
pub struct Tables {
    pub records: Vec<DegenerationRecord>,
    pub groups: BTreeMap<String, BTreeMap<u32, GroupInfo>>,
    pub markings: Vec<MarkingRecord>,
    pub old_cases: Vec<OldCaseRecord>,
    index: BTreeMap<String, usize>,
    q_keys: Vec<CanonicalKey>,
    pending: Vec<Pending>,
}

#[derive(Clone, Debug)]
enum Pending {
    Marking { table: String, deg: DegenerationType, reference: Option<String>, kind: MarkingKind, source: Source },
    Old(OldCaseRecord),
}

impl Tables {
    pub fn record(&self, key: &str) -> Option<&DegenerationRecord> {
        self.index.get(key).map(|&i| &self.records[i])
    }

    pub(crate) fn q_key(&self, i: usize) -> &CanonicalKey {
        &self.q_keys[i]
    }

    pub fn table_names(&self) -> Vec<String> {
        let mut t: Vec<String> = self.records.iter().map(|r| r.table.clone()).collect();
        t.dedup();
        t
    }

    pub fn base_record(&self, table: &str) -> Option<&DegenerationRecord> {
        self.records.iter().find(|r| r.table == table && r.deg.is_none())
    }

    /// Finds the record of `table` with this degeneration type: by exact key, else by a unique
    /// record with the same orbits, ambient and variant where exactly one side has a matrix.
    pub fn resolve(&self, table: &str, deg: &DegenerationType) -> Option<&DegenerationRecord> {
        let in_table = || self.records.iter().filter(move |r| r.table == table);
        let exact: Vec<_> = in_table().filter(|r| r.deg.as_ref() == Some(deg)).collect();
        if exact.len() == 1 {
            return Some(exact[0]);
        }
        if !exact.is_empty() {
            return None;
        }
        let loose = deg.loose_key();
        let near: Vec<_> = in_table()
            .filter(|r| r.deg.as_ref().is_some_and(|d| d.loose_key() == loose && d.has_matrix() != deg.has_matrix()))
            .collect();
        (near.len() == 1).then(|| near[0])
    }

    /// Reads one file's text. References between files are resolved by [`Tables::link`].
    pub fn ingest(&mut self, text: &str, file: &str) -> Result<()> {
        let mut table: Option<String> = None;
        let mut tex: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if let Some(t) = line.strip_prefix("# tex:") {
                tex = Some(t.trim().to_string());
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::data(file, line_no, msg);
            let source = Source { file: file.to_string(), line: line_no, tex: tex.take() };
            if let Some(rest) = line.strip_prefix("@table") {
                table = Some(rest.trim().to_string());
                continue;
            }
            let current = || table.clone().ok_or_else(|| bad("row before any @table line".into()));
            if let Some(rest) = line.strip_prefix("@group") {
                let f: Vec<&str> = rest.split_whitespace().collect();
                let [n, order, name] = f.as_slice() else {
                    return Err(bad("expected @group N ORDER NAME".into()));
                };
                let n: u32 = n.parse().map_err(|_| bad("bad group number".into()))?;
                let order: u64 = order.parse().map_err(|_| bad("bad group order".into()))?;
                let info = GroupInfo { order, name: name.to_string() };
                if self.groups.entry(current()?).or_default().insert(n, info).is_some() {
                    return Err(bad(format!("duplicate @group {n}")));
                }
            } else if line.starts_with("n=") {
                let rec = parse_row(line, current()?, source).map_err(|e| bad(e.to_string()))?;
                let key = rec.key();
                if self.index.contains_key(&key) {
                    return Err(bad(format!("duplicate record {key}")));
                }
                self.index.insert(key, self.records.len());
                self.q_keys.push(canonical_key(&rec.q_s));
                self.records.push(rec);
            } else if let Some(rest) = line.strip_prefix("reduce ") {
                let f: Vec<&str> = rest.split('|').map(str::trim).collect();
                let [deg, summand, reference] = f.as_slice() else {
                    return Err(bad("expected reduce DEG | R | REF".into()));
                };
                let deg = parse_degeneration(deg).map_err(|e| bad(e.to_string()))?;
                let summand: RootSystemType = summand.parse().map_err(|e: Error| bad(e.to_string()))?;
                let reference = if *reference == "-" {
                    None
                } else {
                    Some(reference.to_string())
                };
                let kind = MarkingKind::Reduction { summand, reference: String::new() };
                self.pending.push(Pending::Marking { table: current()?, deg, reference, kind, source });
            } else if let Some(rest) = line.strip_prefix("mark ") {
                let f: Vec<&str> = rest.split('|').map(str::trim).collect();
                let [deg, j, action, labels, complement] = f.as_slice() else {
                    return Err(bad("expected mark DEG | J [*] | H | ORBITS | COMPLEMENT".into()));
                };
                let deg = parse_degeneration(deg).map_err(|e| bad(e.to_string()))?;
                let mut jt = j.split_whitespace();
                let j: u32 = jt.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad Niemeier index".into()))?;
                let unique = match jt.next() {
                    None => false,
                    Some("*") => true,
                    Some(t) => return Err(bad(format!("unexpected {t:?} after j"))),
                };
                let complement_roots: RootSystemType = complement.parse().map_err(|e: Error| bad(e.to_string()))?;
                let kind = MarkingKind::Mark {
                    j,
                    unique,
                    action: action.to_string(),
                    orbit_labels: split_labels(labels),
                    complement_roots,
                };
                self.pending.push(Pending::Marking { table: current()?, deg, reference: None, kind, source });
            } else if let Some(rest) = line.strip_prefix("old ") {
                let f: Vec<&str> = rest.split('|').map(str::trim).collect();
                let [n, deg, big_n, big_deg] = f.as_slice() else {
                    return Err(bad("expected old N | DEG | BIG_N | BIG_DEG".into()));
                };
                let old = OldCaseRecord {
                    table: current()?,
                    small_n: n.parse().map_err(|_| bad("bad group number".into()))?,
                    deg: parse_degeneration(deg).map_err(|e| bad(e.to_string()))?,
                    target: None,
                    big_n: big_n.parse().map_err(|_| bad("bad group number".into()))?,
                    big_deg: parse_degeneration(big_deg).map_err(|e| bad(e.to_string()))?,
                    source,
                };
                self.pending.push(Pending::Old(old));
            } else {
                return Err(bad(format!("unrecognised line {line:?}")));
            }
        }
        Ok(())
    }

    /// Resolves references of marking and old-case lines against the loaded records.
    pub fn link(&mut self) -> Result<()> {
        for p in std::mem::take(&mut self.pending) {
            match p {
                Pending::Marking { table, deg, reference, mut kind, source } => {
                    let missing = |what: String| Error::data(&source.file, source.line, format!("no record {what}"));
                    let target = self.resolve(&table, &deg).ok_or_else(|| missing(format!("{table}/{deg}")))?.key();
                    if let MarkingKind::Reduction { reference: r, .. } = &mut kind {
                        *r = match &reference {
                            None => self.base_record(&table).ok_or_else(|| missing(format!("{table}/-")))?.key(),
                            Some(text) => {
                                let d = parse_degeneration(text)
                                    .map_err(|e| Error::data(&source.file, source.line, e.to_string()))?;
                                self.resolve(&table, &d).ok_or_else(|| missing(format!("{table}/{d}")))?.key()
                            }
                        };
                    }
                    self.markings.push(MarkingRecord { table, deg, target, kind, source });
                }
                Pending::Old(mut o) => {
                    o.target = self.resolve(&o.table, &o.deg).map(|r| r.key());
                    self.old_cases.push(o);
                }
            }
        }
        Ok(())
    }
}

/// Splits `(a_{4,1},a_{3,1})` into its labels, respecting braces.
fn split_labels(text: &str) -> Vec<String> {
    let t = text.trim();
    let t = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(t);
    let mut out = Vec::new();
    let (mut depth, mut cur) = (0i32, String::new());
    for c in t.chars() {
        match c {
            '{' | '(' => depth += 1,
            '}' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn parse_q(tok: &str) -> Result<GenusSymbol> {
    if tok == "1" {
        return Ok(GenusSymbol::empty());
    }
    parse_symbol(tok)
}

fn parse_row(line: &str, table: String, source: Source) -> Result<DegenerationRecord> {
    let (left, right) = line.split_once('|').ok_or_else(|| Error::DegenParse("missing '|'".into()))?;
    let l: Vec<&str> = left.split_whitespace().collect();
    let [n, name, rk_sg, q_sg] = l.as_slice() else {
        return Err(Error::DegenParse("expected n=N NAME RK_SG Q_SG".into()));
    };
    let group_n: u32 = n[2..].parse().map_err(|_| Error::DegenParse(format!("bad group {n:?}")))?;
    let r: Vec<&str> = right.split_whitespace().collect();
    if r.len() < 3 {
        return Err(Error::DegenParse("expected DEG RK_S Q_S [*] [o]".into()));
    }
    let (mut unique_flag, mut old_flag) = (false, false);
    for flag in &r[3..] {
        match *flag {
            "*" if !unique_flag => unique_flag = true,
            "o" if !old_flag => old_flag = true,
            f => return Err(Error::DegenParse(format!("unexpected flag {f:?}"))),
        }
    }
    let deg = if r[0] == "-" { None } else { Some(parse_degeneration(r[0])?) };
    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::DegenParse(format!("bad rank {s:?}")));
    Ok(DegenerationRecord {
        table,
        group_n,
        group_name: name.to_string(),
        rk_sg: num(rk_sg)?,
        q_sg: parse_q(q_sg)?,
        deg,
        rk_s: num(r[1])?,
        q_s: parse_q(r[2])?,
        unique_flag,
        old_flag,
        source,
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Loads the given files in order and links them.
pub fn load_table_files(paths: &[PathBuf]) -> Result<Tables> {
    let mut t = Tables::default();
    for p in paths {
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| p.display().to_string());
        t.ingest(&read(p)?, &name)?;
    }
    t.link()?;
    Ok(t)
}

/// Loads the shipped set of table files from a data directory.
pub fn load_tables(dir: &Path) -> Result<Tables> {
    let paths: Vec<PathBuf> = TABLE_FILES.iter().map(|f| dir.join(f)).collect();
    load_table_files(&paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "@table t\n@group 1 2 C2\n# tex: row\nn=1 C2 8 2_II^+8 | A1 9 2_7^+9\n";

    #[test]
    fn one_row() {
        let mut t = Tables::default();
        t.ingest(SAMPLE, "sample").unwrap();
        t.link().unwrap();
        assert_eq!(t.records.len(), 1);
        let r = &t.records[0];
        assert_eq!((r.rk_sg, r.rk_s, r.orbit_count()), (8, 9, 1));
        assert_eq!(r.source.tex.as_deref(), Some("row"));
        assert_eq!(r.key(), "t/n=1/A1");
    }

    #[test]
    fn empty_and_errors() {
        let mut t = Tables::default();
        t.ingest("", "empty").unwrap();
        t.link().unwrap();
        assert!(t.records.is_empty());
        let mut t = Tables::default();
        let dup = format!("{SAMPLE}n=1 C2 8 2_II^+8 | A1 9 2_7^+9\n");
        assert!(matches!(t.ingest(&dup, "dup"), Err(Error::Data { line: 5, .. })));
        let mut t = Tables::default();
        t.ingest(&format!("{SAMPLE}reduce A1 | A1 | 2A1\n"), "dangling").unwrap();
        let err = t.link().unwrap_err().to_string();
        assert!(err.contains("t/2A1"), "{err}");
    }

    #[test]
    fn labels() {
        assert_eq!(split_labels("(a_{4,1},a_{3,1})"), vec!["a_{4,1}", "a_{3,1}"]);
        assert_eq!(split_labels("a_{16}"), vec!["a_{16}"]);
    }
}
