use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn k3lat(args: &[&str]) -> Output {
    k3lat_with(args, None)
}

fn k3lat_with(args: &[&str], data_dir: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_k3lat"));
    c.args(args).env_remove("K3LAT_DATA_DIR");
    if let Some(d) = data_dir {
        c.env("K3LAT_DATA_DIR", d);
    }
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("k3lat-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

/// A copy of the shipped data directory with `file` replaced by `text`.
fn data_with(name: &str, file: &str, text: &str) -> PathBuf {
    let d = scratch(name);
    for e in std::fs::read_dir(k3lat::default_data_dir()).unwrap() {
        let e = e.unwrap();
        std::fs::copy(e.path(), d.join(e.file_name())).unwrap();
    }
    std::fs::write(d.join(file), text).unwrap();
    d
}

#[test]
fn qform_examples() {
    let o = k3lat(&["qform", "sum", "2_7^+1", "2_II^-2,3^+5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2_7^-3,3^+5\n");
    let o = k3lat(&["qform", "eq", "2_7^+1", "2_7^+1"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "true\n"));
    let o = k3lat(&["qform", "eq", "3^+1", "3^-1"]);
    assert_eq!(stdout(&o), "false\n");
    let o = k3lat(&["qform", "eq", "2_7^+1,2_1^+1", "2_0^+2"]);
    assert_eq!(o.status.code(), Some(1), "repeated scale is a data error");
    let o = k3lat(&["qform", "eq", "2_6^+2", "2_0^+2"]);
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn lookup_examples() {
    let o = k3lat(&["lookup", "15", "4_1^-5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("c4/n=4/2A1\t")));
    let o = k3lat(&["lookup", "15", "2_7^-3,3^+5"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("d6/n=6/A1\t")));
    let o = k3lat(&["lookup", "9", "1"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), ""));
}

#[test]
fn usage_errors_exit_2() {
    for args in [&["frobnicate"][..], &["--oracle-bound", "3", "qform", "eq", "1", "1"], &["verify", "tables", "--only", "x"], &[]] {
        let o = k3lat(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn data_errors_exit_1_with_location() {
    let d = data_with("bad-row", "codim1.tbl", "@table codim1\nn=1 C2 8 2_II^+8 | A1 9 2_7^+9\nn=2 nonsense\n");
    let o = k3lat_with(&["verify", "tables"], Some(&d));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("codim1.tbl:3:"), "{}", stderr(&o));
    let o = k3lat_with(&["lookup", "15", "4_1^-5"], Some(Path::new("/nonexistent/k3lat")));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not exist"));
}

#[test]
fn verify_tables_exit_status() {
    let o = k3lat(&["verify", "tables"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).lines().all(|l| !l.contains("\tFAIL\t")));

    // One Milgram violation is enough for a nonzero exit.
    let shipped = std::fs::read_to_string(k3lat::default_data_dir().join("codim1.tbl")).unwrap();
    let broken = shipped.replacen("| A1 9 2_7^+9", "| A1 9 2_II^+8", 1);
    assert_ne!(broken, shipped);
    let d = data_with("milgram", "codim1.tbl", &broken);
    let o = k3lat_with(&["verify", "tables", "--only", "codim1"], Some(&d));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.contains("\tmilgram_S\tFAIL\t")));
}

#[test]
fn verify_json_matches_text() {
    let args = ["verify", "tables", "--only", "c4"];
    let text = stdout(&k3lat(&args));
    let json = stdout(&k3lat(&[&["--output", "json"][..], &args].concat()));
    let (t, j): (Vec<&str>, Vec<&str>) = (text.lines().collect(), json.lines().collect());
    assert_eq!(t.len(), j.len());
    assert!(!t.is_empty());
    for (t, j) in t.iter().zip(&j) {
        let v: Value = serde_json::from_str(j).unwrap();
        let status = match (v["pass"].as_bool().unwrap(), v["advisory"].as_bool().unwrap()) {
            (true, _) => "PASS",
            (false, true) => "WARN",
            (false, false) => "FAIL",
        };
        let fields: Vec<&str> = t.splitn(4, '\t').collect();
        assert_eq!(fields, [v["key"].as_str().unwrap(), v["check"].as_str().unwrap(), status, v["details"].as_str().unwrap()]);
    }
}

#[test]
fn lattice_commands_and_parity() {
    let d = scratch("lattice");
    let file = d.join("a2.json");
    std::fs::write(&file, r#"{"name": "A2", "rank": 2, "gram": [[-2, 1], [1, -2]]}"#).unwrap();
    let f = file.to_str().unwrap();

    let text = stdout(&k3lat(&["lattice", "info", f]));
    let json: Value = serde_json::from_str(&stdout(&k3lat(&["--output", "json", "lattice", "info", f]))).unwrap();
    let obj = json.as_object().unwrap();
    assert_eq!(text.lines().count(), obj.len());
    for line in text.lines() {
        let (k, v) = line.split_once(": ").unwrap();
        let j = &obj[k];
        let shown = match j {
            Value::String(s) => s.clone(),
            Value::Array(a) => a.iter().map(|x| x.as_str().unwrap().to_string()).collect::<Vec<_>>().join(" "),
            other => other.to_string(),
        };
        assert_eq!(v, shown, "{k}");
    }
    assert_eq!(obj["determinant"], "3");
    assert_eq!(obj["signature"], "(0,2)");
    assert_eq!(obj["qform"], "3^+1");

    assert_eq!(stdout(&k3lat(&["qform", "symbol", f])), "3^+1\n");
    let roots = stdout(&k3lat(&["roots", "classify", f]));
    assert!(roots.contains("root_type: A2\n") && roots.contains("roots: 6\n"), "{roots}");
}

#[test]
fn niemeier_commands() {
    let o = k3lat(&["--output", "json", "niemeier", "build", "D24"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["rank"].as_u64(), v["roots"].as_u64(), v["determinant"].as_str()), (Some(24), Some(1104), Some("1")));

    let d = scratch("vectors");
    let vecs = d.join("one_root.txt");
    let mut row = vec!["0"; 24];
    row[0] = "1";
    std::fs::write(&vecs, format!("# first simple root of the first E8\n{}\n", row.join(" "))).unwrap();
    let o = k3lat(&["niemeier", "complement", "3E8", vecs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    for want in ["s_rank: 1", "s_qform: 2_7^+1", "t_rank: 23", "t_root_type: E7+2E8", "forms_dual: true"] {
        assert!(s.contains(want), "{want} in {s}");
    }
    let o = k3lat(&["niemeier", "build", "Leech"]);
    assert_eq!(o.status.code(), Some(1));
}
