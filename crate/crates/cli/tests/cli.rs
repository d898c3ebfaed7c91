use std::path::PathBuf;
use std::process::Command;

use curvcone::exactmath::{int, RatMatrix, Rat};
use curvcone::fixtures::{diag4, zoltek, zoltek_form};
use curvcone::tensorspace::{g_wedge_g, wedge2_lift, CurvOp, ModCurvOp, Signature};
use curvcone_cli::opfile::OperatorFile;
use num_traits::{One, Zero};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_curvcone"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, f: &OperatorFile) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, f.to_json()).unwrap();
    p
}

fn op_file(dir: &TempDir, name: &str, op: &ModCurvOp) -> String {
    write(dir, name, &OperatorFile::from_op(op)).display().to_string()
}

fn verdict(stdout: &str) -> &str {
    let lines: Vec<&str> = stdout.lines().filter(|l| l.starts_with("VERDICT: ")).collect();
    assert_eq!(lines.len(), 1, "exactly one verdict line in {stdout:?}");
    lines[0]
}

#[test]
fn check4_examples() {
    let dir = TempDir::new().unwrap();
    let id = op_file(&dir, "id.json", &ModCurvOp::identity(4));
    let cert = dir.path().join("ft.txt");
    let r = run(&["check4", &id, "--bound", "0", "--lower", "--strict", "--cert", cert.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert_eq!(verdict(&r.stdout), "VERDICT: TRUE");
    let text = std::fs::read_to_string(&cert).unwrap();
    assert!(text.contains("point 0\n") && text.contains("strict true"), "{text}");

    let neg = op_file(&dir, "neg.json", CurvOp::identity(4).neg().as_mod());
    let r = run(&["check4", &neg, "--bound", "0", "--lower"]);
    assert_eq!((r.code, verdict(&r.stdout)), (1, "VERDICT: FALSE"));

    let d = op_file(&dir, "d.json", diag4([0, 1, 1, 1, 1, 0]).as_mod());
    assert_eq!(run(&["check4", &d, "--bound", "0", "--lower", "--strict"]).code, 1);
    assert_eq!(run(&["check4", &d, "--bound", "0", "--lower"]).code, 0);

    // upper bounds and negative bound values
    assert_eq!(run(&["check4", &id, "--bound", "1", "--upper"]).code, 0);
    assert_eq!(run(&["check4", &id, "--bound", "1", "--upper", "--strict"]).code, 1);
    assert_eq!(run(&["check4", &neg, "--bound", "-1", "--lower"]).code, 0);
    assert_eq!(run(&["check4", &neg, "--bound", "-1/2", "--lower"]).code, 1);
}

#[test]
fn check4_low_dimensions() {
    let dir = TempDir::new().unwrap();
    let mut d = vec![Rat::one(); 3];
    d[2] = int(-1);
    let f = op_file(&dir, "n3.json", &ModCurvOp::diag(3, &d).unwrap());
    assert_eq!(run(&["check4", &f]).code, 1);
    assert_eq!(run(&["check4", &f, "--bound", "-1"]).code, 0);
    assert_eq!(run(&["check4", &f, "--bound", "-1", "--strict"]).code, 1);
}

#[test]
fn defpoly_examples() {
    let dir = TempDir::new().unwrap();
    let id = op_file(&dir, "id.json", &ModCurvOp::identity(4));
    let r = run(&["defpoly", &id]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "0\n"));
    let zero = op_file(&dir, "zero.json", &ModCurvOp::zero(4));
    assert_eq!(run(&["defpoly", &zero]).stdout, "0\n");
    let d = op_file(&dir, "d.json", diag4([1, 2, 3, 4, 5, 6]).as_mod());
    let v = curvcone::exactmath::parse_rat(run(&["defpoly", &d]).stdout.trim()).unwrap();
    assert!(v > Rat::zero());
}

#[test]
fn input_errors() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["check4", bad.to_str().unwrap()]).code, 64);
    let short = dir.path().join("short.json");
    std::fs::write(&short, r#"{"n": 4, "basis": "plucker-lex", "entries": [["1"]]}"#).unwrap();
    assert_eq!(run(&["check4", short.to_str().unwrap()]).code, 65);
    let five = op_file(&dir, "five.json", &ModCurvOp::identity(5));
    assert_eq!(run(&["check4", &five]).code, 65);
    assert_eq!(run(&["defpoly", &five]).code, 65);
    let raw = op_file(&dir, "zol.json", &zoltek_form());
    assert_eq!(run(&["relax", &raw, "--max-m", "0"]).code, 66);
    assert_eq!(run(&["check4", "/nonexistent/file.json"]).code, 74);
    assert_eq!(run(&["check4"]).code, 64);
}

#[test]
fn project_flag() {
    let dir = TempDir::new().unwrap();
    // star is not Bianchi; its projection is zero
    let star = op_file(&dir, "star.json", &curvcone::tensorspace::hodge_star());
    assert_eq!(run(&["check4", &star]).code, 66);
    let r = run(&["defpoly", &star, "--project"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "0\n"));
    // a no-op on valid operators
    let id = op_file(&dir, "id.json", &ModCurvOp::identity(4));
    assert_eq!(run(&["defpoly", &id, "--project"]).stdout, run(&["defpoly", &id]).stdout);
}

#[test]
fn relax_examples() {
    let dir = TempDir::new().unwrap();
    let id = op_file(&dir, "id.json", &ModCurvOp::identity(5));
    let r = run(&["relax", &id, "--max-m", "0"]);
    assert_eq!(r.code, 0);
    assert_eq!(verdict(&r.stdout), "VERDICT: TRUE level=0");

    let neg = op_file(&dir, "neg.json", CurvOp::identity(5).neg().as_mod());
    let r = run(&["relax", &neg, "--max-m", "0"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("outer FALSE at p=1"));

    let zol = op_file(&dir, "zol.json", zoltek().as_mod());
    let cert = dir.path().join("sos.txt");
    let prefix = dir.path().join("dump");
    let r = run(&[
        "relax",
        &zol,
        "--max-m",
        "1",
        "--cert",
        cert.to_str().unwrap(),
        "--dump-sdp",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("m=0: inner NO_CERTIFICATE, outer TRUE\nm=1: inner YES\n"), "{}", r.stdout);
    let text = std::fs::read_to_string(&cert).unwrap();
    assert!(text.starts_with("sos-certificate\nn 5\nm 1\nbasis 55\n"));
    assert!(text.contains("residual 0\n"));
    let dump = std::fs::read_to_string(prefix.with_extension("m1.txt")).unwrap();
    let p = curvcone::sdp::read_triplets(&dump).unwrap();
    assert_eq!((p.block_dims.clone(), p.constraints.len()), (vec![50], 490));

    let r = run(&["relax", &zol, "--max-m", "0"]);
    assert_eq!((r.code, verdict(&r.stdout)), (2, "VERDICT: UNDECIDED level=0"));
}

#[test]
fn relax_size_cap() {
    let dir = TempDir::new().unwrap();
    let zol = op_file(&dir, "zol.json", zoltek().as_mod());
    let out = Command::new(env!("CARGO_BIN_EXE_curvcone"))
        .args(["relax", &zol, "--max-m", "1"])
        .env("CURVCONE_MAX_PROBLEM_DIM", "20")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let r = run(&["gen", "--n", "4", "--seed", "1", "--magnitude", "2", "--out", p.to_str().unwrap()]);
        assert_eq!(r.code, 0);
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    // output passes the Bianchi validation
    assert!(run(&["check4", a.to_str().unwrap()]).code <= 1);
    let r = run(&["gen", "--n", "2"]);
    let f = OperatorFile::parse(&r.stdout).unwrap();
    assert_eq!((f.entries.len(), f.entries[0].len()), (1, 1));
    assert_ne!(run(&["gen", "--n", "4", "--seed", "2"]).stdout, run(&["gen", "--n", "4", "--seed", "1"]).stdout);
}

fn semi_file(dir: &TempDir, name: &str, m: &RatMatrix, n: usize, nu: usize) -> String {
    write(dir, name, &OperatorFile::from_matrix(n, m, Some(nu))).display().to_string()
}

#[test]
fn semiriem_examples() {
    let dir = TempDir::new().unwrap();
    // R = G∧G maps to the identity
    let gg = g_wedge_g(&Signature::new(4, 1).unwrap());
    let f = semi_file(&dir, "gg.json", &gg.matrix().as_matrix(), 4, 1);
    assert_eq!(run(&["semiriem", "check4", &f, "--bound", "0", "--lower"]).code, 0);

    // ν = 0 is the Riemannian command
    for seed in 0..4 {
        let r = curvcone::tensorspace::random_curvop(4, seed, 2);
        let riem = op_file(&dir, "r.json", r.as_mod());
        let semi = semi_file(&dir, "s.json", &r.matrix().as_matrix(), 4, 0);
        assert_eq!(run(&["semiriem", "check4", &semi]).code, run(&["check4", &riem]).code);
    }

    // ν and n − ν agree on inputs matched by the coordinate reversal
    let n = 4;
    let rev = RatMatrix::from_fn(n, n, |i, j| if i + j == n - 1 { Rat::one() } else { Rat::zero() });
    let lift = wedge2_lift(&rev).unwrap();
    for seed in 0..4 {
        let r = curvcone::tensorspace::random_curvop(4, 100 + seed, 2);
        for nu in 0..=n {
            // Q-symmetric input for signature ν: (G∧G)·R with R symmetric
            let gg = g_wedge_g(&Signature::new(n, nu).unwrap());
            let q = gg.matrix().as_matrix().mul(&r.matrix().as_matrix()).unwrap();
            let matched = lift.mul(&q).unwrap().mul(&lift.transpose()).unwrap();
            let a = semi_file(&dir, "a.json", &q, n, nu);
            let b = semi_file(&dir, "b.json", &matched, n, n - nu);
            assert_eq!(
                run(&["semiriem", "check4", &a]).code,
                run(&["semiriem", "check4", &b]).code,
                "seed {seed} nu {nu}"
            );
        }
    }

    // Q-symmetry violation
    let mut m = RatMatrix::zeros(6, 6);
    // pairs 01 and 23 have opposite signs under G∧G for ν = 1
    m.set(0, 5, Rat::one());
    m.set(5, 0, Rat::one());
    let bad = semi_file(&dir, "bad.json", &m, 4, 1);
    assert_eq!(run(&["semiriem", "check4", &bad]).code, 66);
    // the signature is required
    let plain = op_file(&dir, "plain.json", &ModCurvOp::identity(4));
    assert_eq!(run(&["semiriem", "check4", &plain]).code, 64);
}

#[test]
fn semiriem_relax_delegates() {
    let dir = TempDir::new().unwrap();
    let gg = g_wedge_g(&Signature::new(5, 2).unwrap());
    let f = semi_file(&dir, "gg.json", &gg.matrix().as_matrix(), 5, 2);
    let r = run(&["semiriem", "relax", &f, "--max-m", "0"]);
    assert_eq!((r.code, verdict(&r.stdout)), (0, "VERDICT: TRUE level=0"));
}
