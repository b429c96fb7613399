use std::path::PathBuf;
use std::process::{Command, Output};

fn tc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tc"))
        .args(args)
        .env_remove("TC_DEPTH_CAP")
        .output()
        .expect("run tc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_line(o: &Output) -> String {
    stdout(o).lines().last().unwrap_or("").to_string()
}

fn write(name: &str, body: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn twenty_points() -> String {
    let mut s = String::from("points 20\n");
    let xs: Vec<i64> = (0..20).map(|k| k * k % 41).collect();
    for i in 0..20 {
        for j in i + 1..20 {
            s += &format!("dist {i} {j} {}/7\n", (xs[i] - xs[j]).abs());
        }
    }
    let order: Vec<String> = (0..20).map(|k| ((k * 7) % 20).to_string()).collect();
    s + "order " + &order.join(" ") + "\n"
}

const TWO_POINTS: &str = "points 2\ndist 0 1 1/1\norder 0 1\n";

#[test]
fn embed_omega_squared() {
    let o = tc(&["embed", "--ordinal", "w^(2)", "--pairs", "200", "--depth", "32"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(last_line(&o), "CHECKED 200 FAILED 0");
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PAIR ")).count(), 200);
}

#[test]
fn embed_zero_is_empty() {
    let o = tc(&["embed", "--ordinal", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "CHECKED 0 FAILED 0\n");
}

#[test]
fn embed_into_a_custom_interval() {
    let o = tc(&["embed", "--ordinal", "w+3", "--interval", "union(ap(4,0),diff(ap(1,1),ap(1,2))),ap(2,0)", "--pairs", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(last_line(&o), "CHECKED 30 FAILED 0");
    let bad = tc(&["embed", "--ordinal", "w", "--interval", "ap(2,0),ap(2,2)"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).starts_with("FAIL interval"));
}

#[test]
fn reports_are_deterministic() {
    let a = tc(&["embed", "--ordinal", "w^(w)", "--pairs", "40", "--seed", "7"]);
    let b = tc(&["embed", "--ordinal", "w^(w)", "--pairs", "40", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let c = tc(&["baire", "--ordinal", "w*2", "--pairs", "20", "--seed", "3"]);
    let d = tc(&["baire", "--ordinal", "w*2", "--pairs", "20", "--seed", "3"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn cont_two_point_value() {
    let space = write("two.space", TWO_POINTS);
    let o = tc(&["cont", "--space", space.to_str().unwrap(), "--eval", "1,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "f 1 at 0 = 2/1 (+/- 0)\n");
    let t = tc(&["cont", "--space", space.to_str().unwrap(), "--eval", "1,0", "--truncate", "2"]);
    assert_eq!(stdout(&t), "f 1 at 0 = 3/2 (+/- 1/2)\n");
}

#[test]
fn cont_check_all_on_twenty_points() {
    let space = write("twenty.space", &twenty_points());
    let o = tc(&["cont", "--space", space.to_str().unwrap(), "--check-all"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "CHECKED 190 FAILED 0\n");
}

#[test]
fn cont_rejects_non_metrics() {
    let space = write("asym.space", "points 2\ndist 0 1 1/1\ndist 1 0 2/1\norder 0 1\n");
    let o = tc(&["cont", "--space", space.to_str().unwrap(), "--check-all"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "FAIL symmetry 0 1\n");
    let tri = write("tri.space", "points 3\ndist 0 1 1/1\ndist 1 2 1/1\ndist 0 2 3/1\norder 0 1 2\n");
    let o = tc(&["cont", "--space", tri.to_str().unwrap(), "--check-all"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL triangle"));
}

#[test]
fn baire_reports() {
    let o = tc(&["baire", "--ordinal", "w*2", "--pairs", "50"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(last_line(&o), "CHECKED 50 FAILED 0");
    let z = tc(&["baire", "--ordinal", "w*2", "--pairs", "0"]);
    assert_eq!(z.status.code(), Some(0));
    assert_eq!(stdout(&z), "CHECKED 0 FAILED 0\n");
}

#[test]
fn baire_pinpoints_a_corrupted_snapshot() {
    let good = "cert{m=0, lower=rows(1), upper=rows(2)}\ncert{m=0, lower=rows(2), upper=rows(3)}\n";
    let path = write("good.family", good);
    let o = tc(&["baire", "--family", path.to_str().unwrap(), "--pairs", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    // the second link runs downwards: rows(3) is not almost contained in rows(2)
    let bad = "cert{m=0, lower=rows(1), upper=rows(3)}\ncert{m=0, lower=rows(3), upper=rows(2)}\n";
    let path = write("bad.family", bad);
    let o = tc(&["baire", "--family", path.to_str().unwrap(), "--pairs", "6", "--points", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("PAIR 1 2 FAIL")), "{out}");
}

#[test]
fn verify_certificates() {
    let ok = write("ok.cert", "cert{m=0, lower=rows(1), upper=rows(2)}\n");
    let o = tc(&["verify", "--cert", ok.to_str().unwrap(), "--depth", "64"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "OK\n".to_string()));
    let bad = write("bad.cert", "cert{m=0, lower=ap(2,0), upper=ap(2,2)}\n");
    let o = tc(&["verify", "--cert", bad.to_str().unwrap()]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(1), "FAIL element 0\n".to_string()));
    let o = tc(&["verify", "--cert", ok.to_str().unwrap(), "--depth", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn split_and_tree() {
    let o = tc(&["split", "--members", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("z1 = piece(piece(ap(1,0),0),0)\n  elements 0 4 8 12 16 20 24 28\n"), "{out}");
    assert!(out.ends_with("CHECKED 4 FAILED 0\n"));
    let o = tc(&["tree", "--address", "0,1", "--show", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "node (0,1) = piece(piece(ap(1,0),0),0)\n  elements 0 4 8 12 16\ninterval (0,1) (0,2) OK\n"
    );
}

#[test]
fn depth_cap_from_environment() {
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_tc"))
            .args(["tree", "--address", "0,3,3,3"])
            .env("TC_DEPTH_CAP", cap)
            .output()
            .unwrap()
    };
    assert_eq!(run("10000").status.code(), Some(0));
    assert_eq!(run("4").status.code(), Some(2));
    assert_eq!(run("many").status.code(), Some(2));
}

#[test]
fn malformed_inputs_exit_with_two() {
    let missing = write("missing.space", "points 3\ndist 0 1 1/1\ndist 1 2 1/1\norder 0 1 2\n");
    let garbage_cert = write("garbage.cert", "cert{m=0, lower=rows(1)}\n");
    let bad_family = write("broken.family", "cert{m=0, lower=rows(1), upper=rows(2)}\ncert{m=0, lower=rows(3), upper=rows(4)}\n");
    let cases: Vec<Vec<&str>> = vec![
        vec![],
        vec!["frobnicate"],
        vec!["embed"],
        vec!["embed", "--ordinal", "w^("],
        vec!["embed", "--ordinal", "w", "--bogus"],
        vec!["embed", "--ordinal", "w", "--interval", "rows(1)"],
        vec!["embed", "--ordinal", "w", "--interval", "rows(1),nope(2)"],
        vec!["embed", "--ordinal", "w", "--pairs", "-3"],
        vec!["cont", "--space", missing.to_str().unwrap()],
        vec!["cont", "--space", "/nonexistent/space"],
        vec!["verify", "--cert", garbage_cert.to_str().unwrap()],
        vec!["baire", "--family", bad_family.to_str().unwrap()],
        vec!["baire"],
        vec!["tree", "--address", ""],
        vec!["tree", "--address", "1,x"],
    ];
    for args in cases {
        assert_eq!(tc(&args).status.code(), Some(2), "{args:?}");
    }
}
