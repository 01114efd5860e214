use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gmx_core::gmf::write_gmf;
use gmx_core::model::ModelBuilder;

fn gmx(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmx"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run gmx")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn k23() -> String {
    let gm = ModelBuilder::new()
        .visible("V1")
        .hidden("S1", 1)
        .hidden("S2", 1)
        .hidden("S3", 1)
        .hidden("S4", 1)
        .hidden("S5", 1)
        .hidden("S6", 1)
        .constraint(1, &["v:V1", "h:S1", "h:S2", "h:S3"], &["1111"])
        .constraint(2, &["h:S4", "h:S5", "h:S6"], &["111"])
        .constraint(3, &["h:S1", "h:S4"], &["11"])
        .constraint(4, &["h:S2", "h:S5"], &["11"])
        .constraint(5, &["h:S3", "h:S6"], &["11"])
        .build()
        .unwrap();
    write_gmf(&gm)
}

#[test]
fn version_and_usage() {
    let d = tempfile::tempdir().unwrap();
    let v = gmx(d.path(), &["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("gmf 1"));
    assert_eq!(gmx(d.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(gmx(d.path(), &["count-cycles"]).status.code(), Some(1));
    assert_eq!(gmx(d.path(), &["count-cycles", "--in", "fixture:nope"]).status.code(), Some(2));
    assert_eq!(gmx(d.path(), &["sim", "--in", "fixture:hamming7", "--snr", "a:b"]).status.code(), Some(1));
}

#[test]
fn count_cycles_on_complete_bipartite() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("k23.gmf"), k23()).unwrap();
    let o = gmx(d.path(), &["count-cycles", "--in", "k23.gmf", "--max-len", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "4,3,0\n");
}

#[test]
fn extract_verify_and_replay() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    let o = gmx(p, &["extract", "tg", "--in", "fixture:ebch32_21", "--out", "h1.alist", "--trace", "t.log"]);
    assert_eq!(o.status.code(), Some(0));
    let c = gmx(p, &["count-cycles", "--in", "h1.alist"]);
    assert_eq!(stdout(&c), "4,453,11152,260170\n");
    let r = gmx(p, &["transform", "--in", "fixture:ebch32_21", "--replay", "t.log", "--out", "h1b.alist"]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(fs::read(p.join("h1.alist")).unwrap(), fs::read(p.join("h1b.alist")).unwrap());

    let g = gmx(p, &["extract", "gtg", "--in", "fixture:hamming7", "--out", "hx.alist", "--ext-meta", "ext.txt", "--trace", "g.log"]);
    assert_eq!(g.status.code(), Some(0));
    let r = gmx(p, &["transform", "--in", "fixture:hamming7", "--replay", "g.log", "--out", "hy.alist", "--ext-out", "ext2.txt"]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(fs::read(p.join("hx.alist")).unwrap(), fs::read(p.join("hy.alist")).unwrap());
    assert_eq!(fs::read(p.join("ext.txt")).unwrap(), fs::read(p.join("ext2.txt")).unwrap());

    let m = gmx(p, &["extract", "gm", "--in", "fixture:hamming7", "--max-m", "2", "--out", "m.gmf"]);
    assert_eq!(m.status.code(), Some(0));
    let v = gmx(p, &["verify", "--model", "m.gmf", "--code", "fixture:hamming7"]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout(&v), "realized code matches\n");
    let bad = gmx(p, &["verify", "--model", "m.gmf", "--code", "fixture:ehamming8"]);
    assert_eq!(bad.status.code(), Some(2));
    let cap = gmx(p, &["--dim-cap", "1", "verify", "--model", "m.gmf", "--code", "fixture:hamming7"]);
    assert_eq!(cap.status.code(), Some(3));
}

#[test]
fn bounds_report() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("k23.gmf"), k23()).unwrap();
    let o = gmx(d.path(), &["bounds", "--in", "k23.gmf", "--t-lower", "4", "--r", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("x_t=3\n") && s.contains("root_m_min=2\n"), "{s}");
}

#[test]
fn outputs_are_reproducible_across_workers() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    let sim = |w: &str, out: &str| {
        let o = gmx(
            p,
            &["--workers", w, "--seed", "7", "sim", "--in", "fixture:hamming7", "--snr", "2:1:4", "--iters", "10", "--max-bits", "2e4", "--out", out],
        );
        assert_eq!(o.status.code(), Some(0));
        fs::read(p.join(out)).unwrap()
    };
    let a = sim("1", "a.csv");
    assert_eq!(a, sim("1", "b.csv"));
    assert_eq!(a, sim("3", "c.csv"));
    assert!(String::from_utf8(a).unwrap().starts_with("snr_db,bits,bit_errors,ber,frames,frame_errors\n"));
    let ex = |w: &str| stdout(&gmx(p, &["--workers", w, "extract", "tg", "--in", "fixture:bch31_21"]));
    assert_eq!(ex("1"), ex("2"));
}

#[test]
fn table1_row() {
    let d = tempfile::tempdir().unwrap();
    let o = gmx(d.path(), &["table1", "--code", "bch31_21"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "code,measured,pub_sv,pub_km,pub_hc,band\nbch31_21,15,47,19,12,PASS\n");
}
