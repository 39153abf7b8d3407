use num_bigint::BigInt;
use num_traits::Signed;

use k3lat::niemeier::{build_all, build_niemeier, complement_report, same_span, shipped_glue};

#[test]
fn all_twenty_three_build() {
    let glue = shipped_glue();
    assert_eq!(glue.len(), 23);
    for (name, res) in build_all(&glue) {
        let n = res.unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(n.lattice.rank(), 24);
        assert!(n.lattice.is_even());
        assert!(n.lattice.is_negative_definite());
        assert_eq!(n.lattice.determinant().abs(), BigInt::from(1));
        assert_eq!(n.roots().len(), n.root_system.num_roots(), "{name}");
        let det_r = n.root_system.lattice().determinant().abs();
        assert_eq!(BigInt::from(n.code_size).pow(2), det_r, "{name}");
    }
}

#[test]
fn four_orthogonal_roots_in_24a1() {
    let n = build_niemeier("24A1").unwrap();
    let gram = n.lattice.gram();
    let mut picked: Vec<Vec<BigInt>> = Vec::new();
    for r in n.roots() {
        let v: Vec<BigInt> = r.iter().map(|&x| BigInt::from(x)).collect();
        if picked.iter().all(|p| gram.bilinear(p, &v) == BigInt::from(0)) {
            picked.push(v);
        }
        if picked.len() == 4 {
            break;
        }
    }
    let rep = complement_report(&n, &picked).unwrap();
    assert_eq!(rep.s_rank, 4);
    assert!(rep.t_root_type.rank() <= 20);
    assert!(rep.consistent());
}

#[test]
fn double_complement() {
    let n = build_niemeier("A11+D7+E6").unwrap();
    let gens: Vec<Vec<BigInt>> = n.roots()[..3].iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let rep = complement_report(&n, &gens).unwrap();
    let back = complement_report(&n, &rep.t_basis.row_vecs()).unwrap();
    assert!(same_span(&back.t_basis, &rep.s_basis));
    assert_eq!(back.s_qsymbol, rep.t_qsymbol);
}

#[test]
fn unknown_names() {
    assert!(build_niemeier("Leech").is_err());
    assert!(build_niemeier("A1").is_err());
    assert!(build_niemeier("frog").is_err());
}
