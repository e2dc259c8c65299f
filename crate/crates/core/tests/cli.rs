use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn gom(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gom")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn check_corpus_files() {
    for name in ["boolean.gom", "struct.gom", "nat.gom"] {
        assert_eq!(gom(&["check", &corpus(name)]), (0, String::new(), String::new()));
    }
}

#[test]
fn check_reports_diagnostics() {
    let path = fixture("bad_sort.gom");
    let (code, out, err) = gom(&["check", &path]);
    assert_eq!(code, 1);
    assert_eq!(out, "");
    assert_eq!(err, format!("{path}:5:5: UnknownSort: unknown sort Unknown in operator f\n"));
}

#[test]
fn check_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.gom");
    std::fs::write(&path, "module M sorts A abstract syntax f(x:A -> A\n").unwrap();
    let path = path.to_string_lossy().into_owned();
    let (code, _, err) = gom(&["check", &path]);
    assert_eq!(code, 2);
    assert_eq!(err, format!("{path}:1:40: SyntaxError: expected `)`, found `->`\n"));
    let missing = dir.path().join("missing.gom").to_string_lossy().into_owned();
    assert_eq!(gom(&["check", &missing]).0, 2);
}

#[test]
fn norm() {
    assert_eq!(
        gom(&["norm", "struct", "--expr", "par(concPar(a,par(concPar(b,c))))"]),
        (0, "par(concPar(a,b,c))\n".into(), String::new())
    );
    assert_eq!(gom(&["norm", "struct", "--expr", "par(concPar(a))"]).1, "a\n");
    assert_eq!(gom(&["norm", "boolean", "--expr", "not(not(True))"]).1, "True\n");
    assert_eq!(gom(&["norm", &corpus("boolean.gom"), "--expr", "not(and(True,False))"]).1, "or(not(True),not(False))\n");
}

#[test]
fn norm_errors() {
    // ill-sorted
    let (code, out, err) = gom(&["norm", "struct", "--expr", "par(a)"]);
    assert_eq!((code, out.as_str()), (1, ""));
    assert!(err.contains("sort"), "{err}");
    // wrong arity
    assert_eq!(gom(&["norm", "boolean", "--expr", "and(True)"]).0, 1);
    // syntax
    assert_eq!(gom(&["norm", "boolean", "--expr", "and(True,"]).0, 2);
    // divergence
    let (code, _, err) = gom(&["norm", &fixture("looping.gom"), "--expr", "f(z)", "--budget", "500"]);
    assert_eq!(code, 3);
    assert!(err.contains("did not terminate"), "{err}");
    // module that does not validate
    assert_eq!(gom(&["norm", &fixture("bad_sort.gom"), "--expr", "True"]).0, 2);
}

#[test]
fn match_command() {
    assert_eq!(
        gom(&["match", "nat", "--pattern", "conc(X1*,zero,X2*)", "--expr", "conc(zero)"]),
        (0, "X1*=[] X2*=[]\n".into(), String::new())
    );
    assert_eq!(
        gom(&["match", "nat", "--pattern", "conc(X1*,zero,X2*)", "--expr", "conc(suc(zero))"]),
        (1, "no match\n".into(), String::new())
    );
    assert_eq!(gom(&["match", "boolean", "--pattern", "x", "--expr", "True"]).1, "x=True\n");
    assert_eq!(
        gom(&["match", "nat", "--pattern", "conc(X*,zero,Y*)", "--expr", "conc(zero,suc(zero),zero)", "--all"]),
        (
            0,
            "X*=[] Y*=[suc(zero),zero]\nX*=[zero,suc(zero)] Y*=[]\n2 solutions\n".into(),
            String::new()
        )
    );
    assert_eq!(
        gom(&["match", "nat", "--pattern", "conc(x,x)", "--expr", "conc(zero,suc(zero))", "--all"]),
        (1, "0 solutions\n".into(), String::new())
    );
    assert_eq!(gom(&["match", "nat", "--pattern", "conc(X*", "--expr", "conc()"]).0, 2);
    assert_eq!(gom(&["match", "nat", "--pattern", "suc(X*)", "--expr", "zero"]).0, 2);
}

#[test]
fn prove() {
    assert_eq!(
        gom(&["prove", "--expr", "par(concPar(a,neg(a)))"]),
        (0, "ai_down @ root : par(concPar(a,neg(a))) ==> o\nPROVED in 1 steps\n".into(), String::new())
    );
    assert_eq!(
        gom(&["prove", "--expr", "par(concPar(seq(concSeq(a,b)),seq(concSeq(neg(a),neg(b)))))"]).1,
        "q_down @ root : par(concPar(seq(concSeq(a,b)),seq(concSeq(neg(a),neg(b))))) ==> seq(concSeq(par(concPar(a,neg(a))),par(concPar(b,neg(b)))))\n\
         ai_down @ 0.0 : seq(concSeq(par(concPar(a,neg(a))),par(concPar(b,neg(b))))) ==> par(concPar(b,neg(b)))\n\
         ai_down @ root : par(concPar(b,neg(b))) ==> o\n\
         PROVED in 3 steps\n"
    );
    assert_eq!(gom(&["prove", "--expr", "par(concPar(a,b))"]), (1, "REFUTED (exhausted 3 states)\n".into(), String::new()));
    assert_eq!(gom(&["prove", "--expr", "a"]), (1, "REFUTED (exhausted 1 states)\n".into(), String::new()));
    let deep = "par(concPar(seq(concSeq(a,b)),seq(concSeq(neg(a),neg(b)))))";
    assert_eq!(gom(&["prove", "--expr", deep, "--depth", "1"]), (4, "NOT PROVED (bound)\n".into(), String::new()));
    assert_eq!(gom(&["prove", "--expr", deep, "--dfs", "--no-pruning"]).0, 0);
    assert_eq!(gom(&["prove", "--expr", "concPar(a)"]).0, 2);
    assert_eq!(gom(&["prove", "--expr", "par(concPar(a"]).0, 2);
}

#[test]
fn output_is_deterministic() {
    let args = ["prove", "--expr", "par(concPar(a,neg(a),b,neg(b)))"];
    let first = gom(&args);
    for _ in 0..3 {
        assert_eq!(gom(&args), first);
    }
}

#[test]
fn usage() {
    assert_eq!(gom(&[]).0, 2);
    assert_eq!(gom(&["prove"]).0, 2);
    let (code, out, _) = gom(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("prove"));
}
