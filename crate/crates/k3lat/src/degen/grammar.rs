//! Degeneration types: orbit diagrams inside an ambient Dynkin diagram.
//!
//! ```text
//! part        := COUNT? FAMILY RANK | "(" COUNT? FAMILY RANK ")" variant
//! diagram     := part ("+" part)*
//! item        := diagram | "(" item ("," item)* ")" variant? | "matrix[" rows "]" variant?
//! rows        := "(" item ("," item)* ")" (";" "(" item ("," item)* ")")*
//! degeneration:= "(" item ("," item)* ")" "<" diagram variant?
//!              | "matrix[" rows "]" "<" diagram variant?
//!              | item                                   (one orbit, ambient = the item)
//!              | "(" degeneration ")" variant
//! variant     := "_" (DIGITS | "I" | "II")
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::roots::{parse_component, Family, RootSystemType};

/// `COUNT` copies of one ADE component, optionally tagged with an opaque label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Part {
    pub family: Family,
    pub rank: usize,
    pub label: Option<String>,
    pub count: usize,
}

impl Part {
    pub fn vertices(&self) -> usize {
        self.count * self.rank
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = if self.count == 1 {
            format!("{}{}", self.family.letter(), self.rank)
        } else {
            format!("{}{}{}", self.count, self.family.letter(), self.rank)
        };
        match &self.label {
            Some(l) => write!(f, "({body})_{l}"),
            None => write!(f, "{body}"),
        }
    }
}

/// A Dynkin diagram as an ordered sum of parts. Adjacent unlabeled copies of one component
/// are merged; the order is otherwise kept, since tables distinguish `6A1+3A3` from `3A3+6A1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    parts: Vec<Part>,
}

impl Diagram {
    pub fn new(parts: Vec<Part>) -> Self {
        let mut merged: Vec<Part> = Vec::new();
        for p in parts {
            if let Some(q) = merged.last_mut() {
                if p.label.is_none() && q.label.is_none() && q.family == p.family && q.rank == p.rank {
                    q.count += p.count;
                    continue;
                }
            }
            merged.push(p);
        }
        Diagram { parts: merged }
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn vertices(&self) -> usize {
        self.parts.iter().map(Part::vertices).sum()
    }

    /// The underlying root system, labels dropped.
    pub fn root_type(&self) -> RootSystemType {
        let comps = self
            .parts
            .iter()
            .flat_map(|p| std::iter::repeat((p.family, p.rank)).take(p.count))
            .collect();
        RootSystemType::new(comps).expect("validated at parse time")
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(Part::to_string).collect();
        write!(f, "{}", s.join("+"))
    }
}

/// Upper triangular matrix of subdiagrams; row i lists entries (i, i), (i, i+1), ….
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: Vec<Vec<Item>>,
}

impl Matrix {
    pub fn rows(&self) -> &[Vec<Item>] {
        &self.rows
    }

    pub fn diagonal(&self) -> impl Iterator<Item = &Item> {
        self.rows.iter().map(|r| &r[0])
    }

    pub fn entry(&self, i: usize, j: usize) -> &Item {
        &self.rows[i][j - i]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|r| format!("({})", join(r))).collect();
        write!(f, "matrix[{}]", rows.join(";"))
    }
}

/// One entry of an orbit list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Item {
    /// A single orbit.
    Orbit(Diagram),
    /// Several orbits bracketed together, e.g. `(4A1,4A1)_1`.
    Group(Vec<Item>, Option<String>),
    /// Orbits given with their subdiagram matrix.
    Matrix(Matrix, Option<String>),
}

impl Item {
    pub fn orbit_count(&self) -> usize {
        match self {
            Item::Orbit(_) => 1,
            Item::Group(items, _) => items.iter().map(Item::orbit_count).sum(),
            Item::Matrix(m, _) => m.diagonal().map(Item::orbit_count).sum(),
        }
    }

    pub fn vertices(&self) -> usize {
        match self {
            Item::Orbit(d) => d.vertices(),
            Item::Group(items, _) => items.iter().map(Item::vertices).sum(),
            Item::Matrix(m, _) => m.diagonal().map(Item::vertices).sum(),
        }
    }

    fn collect_orbits<'a>(&'a self, out: &mut Vec<&'a Diagram>) {
        match self {
            Item::Orbit(d) => out.push(d),
            Item::Group(items, _) => items.iter().for_each(|i| i.collect_orbits(out)),
            Item::Matrix(m, _) => m.diagonal().for_each(|i| i.collect_orbits(out)),
        }
    }
}

fn join(items: &[Item]) -> String {
    items.iter().map(Item::to_string).collect::<Vec<_>>().join(",")
}

fn suffix(v: &Option<String>) -> String {
    v.as_ref().map(|v| format!("_{v}")).unwrap_or_default()
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Orbit(d) => write!(f, "{d}"),
            Item::Group(items, v) => write!(f, "({}){}", join(items), suffix(v)),
            Item::Matrix(m, v) => write!(f, "{m}{}", suffix(v)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Shape {
    /// `(items)<ambient`
    Tuple,
    /// `matrix[...]<ambient`
    Matrix,
    /// a bare codimension-one item
    Single,
}

/// A degeneration type. Equality is equality of the canonical printed form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegenerationType {
    items: Vec<Item>,
    pairwise: Option<Matrix>,
    ambient: Diagram,
    variant: Option<String>,
    shape: Shape,
}

impl DegenerationType {
    /// Top-level entries of the orbit list (the diagonal for the matrix form).
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    /// Orbit diagrams in order, with brackets and matrices flattened.
    pub fn orbits(&self) -> Vec<&Diagram> {
        let mut out = Vec::new();
        for it in &self.items {
            it.collect_orbits(&mut out);
        }
        out
    }

    /// The number t of orbits.
    pub fn orbit_count(&self) -> usize {
        self.items.iter().map(Item::orbit_count).sum()
    }

    pub fn ambient(&self) -> &Diagram {
        &self.ambient
    }

    pub fn pairwise(&self) -> Option<&Matrix> {
        self.pairwise.as_ref()
    }

    pub fn variant(&self) -> Option<&str> {
        self.variant.as_deref()
    }

    /// Canonical text, used as the lookup key.
    pub fn key(&self) -> String {
        self.to_string()
    }

    /// Orbits, ambient and variant without any matrix or bracket structure.
    pub fn loose_key(&self) -> String {
        let orbits: Vec<String> = self.orbits().iter().map(|d| d.to_string()).collect();
        format!("[{}]<{}{}", orbits.join(","), self.ambient, suffix(&self.variant))
    }

    pub fn has_matrix(&self) -> bool {
        fn any(items: &[Item]) -> bool {
            items.iter().any(|i| match i {
                Item::Matrix(..) => true,
                Item::Group(inner, _) => any(inner),
                Item::Orbit(_) => false,
            })
        }
        self.pairwise.is_some() || any(&self.items)
    }
}

impl fmt::Display for DegenerationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shape {
            Shape::Single => write!(f, "{}", self.items[0]),
            Shape::Tuple => write!(f, "({})<{}{}", join(&self.items), self.ambient, suffix(&self.variant)),
            Shape::Matrix => write!(
                f,
                "{}<{}{}",
                self.pairwise.as_ref().expect("matrix shape"),
                self.ambient,
                suffix(&self.variant)
            ),
        }
    }
}

impl FromStr for DegenerationType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_degeneration(s)
    }
}

struct Parser<'a> {
    src: &'a str,
    s: Vec<u8>,
    i: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl fmt::Display) -> Error {
        Error::DegenParse(format!("{msg} at offset {} in {:?}", self.i, self.src))
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected {:?}", c as char)))
        }
    }

    fn starts(&self, t: &str) -> bool {
        self.s[self.i..].starts_with(t.as_bytes())
    }

    fn at_end(&self) -> bool {
        self.i == self.s.len()
    }

    fn variant(&mut self) -> Result<Option<String>> {
        if !self.eat(b'_') {
            return Ok(None);
        }
        let start = self.i;
        if self.starts("II") {
            self.i += 2;
        } else if self.starts("I") {
            self.i += 1;
        } else {
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.i += 1;
            }
        }
        if self.i == start {
            return Err(self.err("empty variant"));
        }
        Ok(Some(String::from_utf8_lossy(&self.s[start..self.i]).into_owned()))
    }

    fn component(&mut self) -> Result<Part> {
        let start = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        if self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            self.i += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        let tok = String::from_utf8_lossy(&self.s[start..self.i]).into_owned();
        let (count, family, rank) = parse_component(&tok).map_err(|_| {
            self.i = start;
            self.err(format!("unknown component {tok:?}"))
        })?;
        Ok(Part { family, rank, label: None, count })
    }

    fn part(&mut self) -> Result<Part> {
        if self.eat(b'(') {
            let mut p = self.component()?;
            self.expect(b')')?;
            p.label = Some(self.variant()?.ok_or_else(|| self.err("labeled component needs a variant"))?);
            Ok(p)
        } else {
            self.component()
        }
    }

    /// Continues a diagram whose first part is already parsed.
    fn diagram_from(&mut self, first: Part) -> Result<Diagram> {
        let mut parts = vec![first];
        while self.eat(b'+') {
            parts.push(self.part()?);
        }
        Ok(Diagram::new(parts))
    }

    fn diagram(&mut self) -> Result<Diagram> {
        let first = self.part()?;
        self.diagram_from(first)
    }

    fn item_list(&mut self) -> Result<Vec<Item>> {
        let mut items = vec![self.item()?];
        while self.eat(b',') {
            items.push(self.item()?);
        }
        Ok(items)
    }

    fn item(&mut self) -> Result<Item> {
        if self.starts("matrix[") {
            let m = self.matrix()?;
            let v = self.variant()?;
            return Ok(Item::Matrix(m, v));
        }
        if self.eat(b'(') {
            let inner = self.item_list()?;
            self.expect(b')')?;
            let v = self.variant()?;
            // `(8A1)_I` is a labeled component, possibly continued by `+…`
            if let (Some(label), [Item::Orbit(d)]) = (&v, inner.as_slice()) {
                if let [p] = d.parts() {
                    if p.label.is_none() {
                        let mut p = p.clone();
                        p.label = Some(label.clone());
                        return Ok(Item::Orbit(self.diagram_from(p)?));
                    }
                }
            }
            return Ok(Item::Group(inner, v));
        }
        Ok(Item::Orbit(self.diagram()?))
    }

    fn matrix(&mut self) -> Result<Matrix> {
        if !self.starts("matrix[") {
            return Err(self.err("expected matrix["));
        }
        self.i += "matrix[".len();
        let mut rows = Vec::new();
        loop {
            self.expect(b'(')?;
            rows.push(self.item_list()?);
            self.expect(b')')?;
            if !self.eat(b';') {
                break;
            }
        }
        self.expect(b']')?;
        let t = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != t - i {
                return Err(self.err(format!("matrix row {} has {} entries, expected {}", i + 1, r.len(), t - i)));
            }
        }
        let m = Matrix { rows };
        for i in 0..t {
            for j in i + 1..t {
                let (vi, vj, vij) = (m.entry(i, i).vertices(), m.entry(j, j).vertices(), m.entry(i, j).vertices());
                if vij != vi + vj {
                    return Err(self.err(format!("matrix entry ({},{}) has {vij} vertices, expected {}", i + 1, j + 1, vi + vj)));
                }
            }
        }
        Ok(m)
    }

    fn degeneration(&mut self) -> Result<DegenerationType> {
        let start = self.i;
        // `((…)<amb)_V`
        if self.starts("((") || self.starts("(matrix[") {
            self.i += 1;
            if let Ok(mut inner) = self.degeneration_body() {
                if self.eat(b')') {
                    let v = self.variant()?;
                    if v.is_some() && inner.variant.is_none() && inner.shape != Shape::Single {
                        inner.variant = v;
                        return Ok(inner);
                    }
                }
            }
            self.i = start;
        }
        self.degeneration_body()
    }

    fn degeneration_body(&mut self) -> Result<DegenerationType> {
        if self.starts("matrix[") {
            let m = self.matrix()?;
            if !self.eat(b'<') {
                let v = self.variant()?;
                return self.single(Item::Matrix(m, v));
            }
            let ambient = self.diagram()?;
            let variant = self.variant()?;
            let items: Vec<Item> = m.diagonal().cloned().collect();
            return Ok(DegenerationType { items, pairwise: Some(m), ambient, variant, shape: Shape::Matrix });
        }
        let it = self.item()?;
        if self.eat(b'<') {
            let items = match it {
                Item::Group(items, None) => items,
                _ => return Err(self.err("orbit list must be a bracketed tuple")),
            };
            let ambient = self.diagram()?;
            let variant = self.variant()?;
            return Ok(DegenerationType { items, pairwise: None, ambient, variant, shape: Shape::Tuple });
        }
        self.single(it)
    }

    fn single(&self, it: Item) -> Result<DegenerationType> {
        let ambient = match &it {
            Item::Orbit(d) => d.clone(),
            _ => return Err(self.err("a single orbit must be a diagram")),
        };
        Ok(DegenerationType { items: vec![it], pairwise: None, ambient, variant: None, shape: Shape::Single })
    }
}

/// Parses a degeneration string and enforces the vertex-count identity.
pub fn parse_degeneration(text: &str) -> Result<DegenerationType> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { src: text, s: compact.into_bytes(), i: 0 };
    if p.at_end() {
        return Err(p.err("empty degeneration"));
    }
    let d = p.degeneration()?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    let orbits: usize = d.orbits().iter().map(|o| o.vertices()).sum();
    if orbits != d.ambient.vertices() {
        return Err(Error::VertexMismatch {
            orbits,
            ambient: d.ambient.to_string(),
            ambient_count: d.ambient.vertices(),
        });
    }
    Ok(d)
}

/// Parses a diagram such as `2A2+8A1` or `(8A1)_I+2A2`.
pub fn parse_diagram(text: &str) -> Result<Diagram> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { src: text, s: compact.into_bytes(), i: 0 };
    let d = p.diagram()?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(s: &str) -> DegenerationType {
        parse_degeneration(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn simple_tuples() {
        let d = deg("(A1,3A1)<D4");
        assert_eq!(d.orbit_count(), 2);
        assert_eq!(d.ambient().to_string(), "D4");
        assert_eq!(deg("(2A1,2A1)<2A2").orbit_count(), 2);
        assert!(matches!(parse_degeneration("(A1,A1)<3A1"), Err(Error::VertexMismatch { orbits: 2, ambient_count: 3, .. })));
    }

    #[test]
    fn canonical_ambient() {
        assert_eq!(deg("(A2,A2,(4A1,4A1)_1)<A2+A2+8A1").to_string(), "(A2,A2,(4A1,4A1)_1)<2A2+8A1");
        assert_eq!(deg("(A1,3A1,A1,3A1)<D4+D4").ambient().to_string(), "2D4");
        assert_ne!(deg("(3A1,3A1,3A1,6A1)<6A1+3A3"), deg("(3A1,3A1,3A1,6A1)<3A3+6A1"));
    }

    #[test]
    fn variants_and_labels() {
        let d = deg("(2A1)_II");
        assert_eq!((d.orbit_count(), d.to_string()), (1, "(2A1)_II".to_string()));
        let d = deg("((A1,A1)<2A1)_2");
        assert_eq!(d.to_string(), "(A1,A1)<2A1_2");
        assert_eq!(d.variant(), Some("2"));
        assert_eq!(deg("(2A1,6A1)<8A1_II").variant(), Some("II"));
        let d = deg("(4A1,4A1,2A2)<(8A1)_I+2A2");
        assert_eq!(d.ambient().to_string(), "(8A1)_I+2A2");
        assert_eq!(deg("(A1,(4A1,4A1)_1)<9A1").orbit_count(), 3);
    }

    #[test]
    fn matrices() {
        let d = deg("matrix[(2A1,2A3,6A1);(4A1,(8A1)_1);(4A1)]<2A3+4A1");
        assert_eq!(d.orbit_count(), 3);
        assert!(d.has_matrix());
        assert_eq!(d.pairwise().unwrap().entry(0, 1).to_string(), "2A3");
        let d = deg("(A1,matrix[(2A1,6A1,6A1,6A1);(4A1,4A2,(8A1)_2);(4A1,4A2);(4A1)]_1)<A1+2A1+4A3");
        assert_eq!(d.orbit_count(), 5);
        assert_eq!(d.ambient().to_string(), "3A1+4A3");
        assert!(parse_degeneration("matrix[(2A1,2A3);(4A1)]<2A3").is_ok());
        assert!(parse_degeneration("matrix[(2A1,2A3);(4A1)]<3A3").is_err());
        assert!(parse_degeneration("matrix[(2A1,5A1);(4A1)]<6A1").is_err());
    }

    #[test]
    fn errors() {
        assert!(parse_degeneration("").is_err());
        assert!(parse_degeneration("(A1,B2)<A1+B2").is_err());
        assert!(parse_degeneration("(A1,A1)<2A1 junk").is_err());
        assert!(parse_degeneration("(A1,A1<2A1").is_err());
    }

    #[test]
    fn round_trip() {
        for s in ["A1", "(2A1)_I", "(A1,A1)<2A1_1", "matrix[(A1,3A1);(2A1)]<3A1", "(A1,(4A1,4A1)_1)<9A1"] {
            let d = deg(s);
            assert_eq!(deg(&d.to_string()), d);
        }
    }
}
