use k3lat::degen::{
    genus_lookup, load_tables, parse_degeneration, verify_all, verify_marking_bounds, verify_old_case, verify_record,
    ReportLine, Tables, VerifyOptions,
};
use k3lat::qforms::{
    brute_force_isomorphic, jordan_normal_form, parse_symbol, signature_mod8, symbols_equivalent, FiniteQuadraticForm,
};
use k3lat::roots::{ade_lattice, Family};
use k3lat::{Error, GenusSymbol};

fn shipped() -> Tables {
    load_tables(&k3lat::default_data_dir()).unwrap()
}

fn sym(s: &str) -> GenusSymbol {
    parse_symbol(s).unwrap()
}

fn synthetic(text: &str) -> Tables {
    let mut t = Tables::default();
    t.ingest(text, "synthetic").unwrap();
    t.link().unwrap();
    t
}

fn check<'a>(lines: &'a [ReportLine], name: &str) -> &'a ReportLine {
    lines.iter().find(|l| l.check == name).unwrap_or_else(|| panic!("no {name} line"))
}

#[test]
fn degeneration_strings() {
    let d = parse_degeneration("(A1,3A1)<D4").unwrap();
    let orbits: Vec<String> = d.orbits().iter().map(|o| o.to_string()).collect();
    assert_eq!(orbits, ["A1", "3A1"]);
    assert_eq!(d.ambient().to_string(), "D4");
    let d = parse_degeneration("(2A1,2A1)<2A2").unwrap();
    assert_eq!(d.orbit_count(), 2);
    assert_eq!(d.ambient().to_string(), "2A2");
    assert!(matches!(
        parse_degeneration("(A1,A1)<3A1"),
        Err(Error::VertexMismatch { orbits: 2, ambient_count: 3, .. })
    ));
}

#[test]
fn table_one_first_row() {
    let t = synthetic("@table codim1\nn=1 C2 8 2_II^+8 | A1 9 2_7^+9\n");
    assert_eq!(t.records.len(), 1);
    let lines = verify_record(&t.records[0]);
    assert!(lines.iter().all(|l| l.pass), "{lines:?}");
    // 2_7^+1 from the new A1 orbit on top of S_G.
    assert!(symbols_equivalent(&sym("2_7^+1").sum(&sym("2_II^+8")), &sym("2_7^+9")));
    assert!(synthetic("").records.is_empty());
}

#[test]
fn rank_law_violation_is_reported() {
    let t = synthetic("@table x\nn=1 C2 8 2_II^+8 | (A1,A1)<2A1 9 2_7^+9\n");
    let lines = verify_record(&t.records[0]);
    assert!(!check(&lines, "rank_law").pass);
}

#[test]
fn d6_base_row() {
    let t = shipped();
    let base = t.base_record("d6").unwrap();
    assert_eq!((base.rk_s, base.q_s.to_string()), (14, "2_II^-2,3^+5".to_string()));
    assert_eq!(signature_mod8(&base.q_s), 2);
    assert!(verify_record(base).iter().all(|l| l.pass));
}

#[test]
fn c4_two_a1_row() {
    let t = shipped();
    let r = t.record("c4/n=4/2A1").unwrap();
    assert_eq!((r.rk_s, r.q_s.to_string()), (15, "4_1^-5".to_string()));
    assert_eq!(signature_mod8(&r.q_s), 1);
    assert_eq!(r.q_s.p_length(2), 5);
    let lines = verify_record(r);
    assert!(lines.iter().all(|l| l.pass));
    assert!(check(&lines, "p_length_S").details.contains("max length 5 at p=2, rank 15"));
}

#[test]
fn synthetic_milgram_failure() {
    let t = synthetic("@table x\nn=1 C2 8 2_II^+8 | A1 9 2_II^+8\n");
    let line = verify_record(&t.records[0]).into_iter().find(|l| l.check == "milgram_S").unwrap();
    assert!(!line.pass);
    assert!(line.details.contains("signature 0 vs -9 = 7 mod 8"), "{}", line.details);
}

#[test]
fn marking_bounds() {
    let t = shipped();
    let lines = |key: &str| {
        let m = t.markings.iter().find(|m| m.key() == key).unwrap_or_else(|| panic!("{key}"));
        verify_marking_bounds(&t, m, None).unwrap()
    };
    let d6 = lines("d6/n=6/2A1#mark:j=23:H_{6,1}");
    assert!(d6[0].pass && d6[0].details.contains("= 4 <= 24 - 15 = 9"));
    let c4 = lines("c4/n=4/A2#mark:j=22:H_{4,1}");
    assert!(c4[0].pass && c4[0].details.contains("A1+2A2 = 5 <= 24 - 15 = 9"), "{}", c4[0].details);

    let bad = synthetic("@table x\nn=1 C2 14 2_II^+8 | A1 15 2_7^+9\nmark A1 | 23 | H | a_{1} | 10A1\n");
    let l = verify_marking_bounds(&bad, &bad.markings[0], None).unwrap();
    assert!(!l[0].pass);
}

#[test]
fn old_cases() {
    let t = shipped();
    let find = |table: &str, n: u32, deg: &str| {
        let d = parse_degeneration(deg).unwrap();
        t.old_cases.iter().find(|o| o.table == table && o.small_n == n && o.deg == d).unwrap()
    };
    let d6 = verify_old_case(&t, find("d6", 6, "(A1,A1,3A1,3A1)<8A1"));
    assert!(d6.iter().all(|l| l.pass));
    assert_eq!(check(&d6, "old_orbits_decrease").details, "orbits 4 -> 2");
    assert!(check(&d6, "old_group_order").details.starts_with("|G| 6 (D6) -> 12"));
    let c4 = verify_old_case(&t, find("c4", 4, "(A1,A1)<2A1"));
    assert!(c4.iter().all(|l| l.pass));
    assert_eq!(check(&c4, "old_orbits_decrease").details, "orbits 2 -> 1");
    assert!(check(&c4, "old_group_order").details.starts_with("|G| 4 (C4) -> 8"));

    let text = "@table codim1\n@group 1 2 C2\n@group 2 4 C4\nn=1 C2 8 2_II^+8 | (A1,A1)<2A1 10 2_II^+8 o\n\
                old 1 | (A1,A1)<2A1 | 2 | (A1,A1)<2A1\n";
    let s = synthetic(text);
    let l = verify_old_case(&s, &s.old_cases[0]);
    assert!(!check(&l, "old_orbits_decrease").pass);
}

#[test]
fn lookups() {
    let t = shipped();
    let keys = |rk, q: &str| -> Vec<String> {
        genus_lookup(&t, rk, &sym(q), false).iter().map(|r| r.key()).collect()
    };
    // The codimension-one table repeats some rows of the D6 and C4 tables.
    assert!(keys(15, "2_7^-3,3^+5").contains(&"d6/n=6/A1".to_string()));
    assert!(keys(14, "2_2^+2,4_II^+4").contains(&"c4/n=4/-".to_string()));
    assert!(keys(15, "4_1^-5").contains(&"c4/n=4/2A1".to_string()));
    assert!(keys(15, "4_1^-5").iter().all(|k| !k.starts_with("d6/")));
    assert!(genus_lookup(&t, 9, &GenusSymbol::empty(), true).is_empty());
}

#[test]
fn six_a2_and_the_two_a2_row() {
    let a2 = FiniteQuadraticForm::from_lattice(&ade_lattice(Family::A, 2).unwrap()).unwrap();
    assert_eq!(jordan_normal_form(&a2).to_string(), "3^+1");
    let mut six = FiniteQuadraticForm::trivial();
    for _ in 0..6 {
        six = six.direct_sum(&a2).unwrap();
    }
    assert_eq!(jordan_normal_form(&six).to_string(), "3^+6");
    let t = shipped();
    let row = t.record("d6/n=6/(2A1,2A1)<2A2").unwrap();
    assert_eq!(row.q_s.to_string(), "3^-6");
    let printed = FiniteQuadraticForm::from_symbol(&row.q_s).unwrap();
    assert_eq!(jordan_normal_form(&printed), row.q_s);
    assert!(!brute_force_isomorphic(&printed, &six, 1 << 12).unwrap());
}

#[test]
fn shipped_tables_pass() {
    let t = shipped();
    let jmap = k3lat::niemeier::load_jmap(&k3lat::default_data_dir()).unwrap();
    let lines = verify_all(&t, &VerifyOptions { jmap: Some(jmap), ..Default::default() }).unwrap();
    let failures: Vec<String> = lines.iter().filter(|l| l.is_failure()).map(ReportLine::to_text).collect();
    assert!(failures.is_empty(), "{failures:#?}");
    let warns: Vec<&ReportLine> = lines.iter().filter(|l| !l.pass).collect();
    assert_eq!(warns.len(), 1);
    assert_eq!(warns[0].key, "d6/n=6/(A1,3A1,3A1,6A1)<D4+9A1#mark:j=19:H_{6,2}");
    let mut keys: Vec<&str> = lines.iter().map(|l| l.key.as_str()).collect();
    let sorted = {
        let mut k = keys.clone();
        k.sort();
        k
    };
    assert_eq!(keys, sorted);
    keys.dedup();
    assert!(keys.len() > 400);
}

#[test]
fn only_filter() {
    let t = shipped();
    let lines = verify_all(&t, &VerifyOptions { only: Some("codim1".into()), ..Default::default() }).unwrap();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l.key.starts_with("codim1/")));
}
