use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn loopcoh(args: &[&str], cache: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_loopcoh"));
    c.env_remove("LOOPCOH_CACHE_DIR").args(args);
    if let Some(d) = cache {
        c.arg("--cache-dir").arg(d);
    }
    c.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exit_codes() {
    let cases = [
        ("localize", "a1_z2.ini", 0),
        ("localize", "a2_w12_zm1.ini", 0),
        ("fixed-fiber", "a2_w12_zm1.ini", 0),
        ("fixed-fiber", "a2_w12_z3.ini", 0),
        ("hh", "pt_trivial.ini", 0),
        ("stabilizers", "a1_z1.ini", 0),
        ("localize", "corrupted.ini", 1),
        ("localize", "inhomogeneous.ini", 2),
        ("localize", "mixed_conductors.ini", 3),
        ("localize", "too_small.ini", 4),
    ];
    for (verb, f, want) in cases {
        let o = loopcoh(&[verb, fixture(f).to_str().unwrap()], None);
        assert_eq!(code(&o), want, "{verb} {f}\n{}{}", stdout(&o), stderr(&o));
    }
    let o = loopcoh(&["hh", "/nonexistent/file.ini"], None);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&loopcoh(&["unipotent-check"], None)), 0);
}

#[test]
fn corrupted_names_a_bin() {
    let o = loopcoh(&["hh", fixture("corrupted.ini").to_str().unwrap()], None);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("reason") && l.contains(';')), "{out}");
    assert!(out.ends_with("overall FAIL\n"));
}

#[test]
fn cache_hits_misses_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let work = tempfile::tempdir().unwrap();
    let inst = work.path().join("a.ini");
    let text = std::fs::read_to_string(fixture("a1_z2.ini")).unwrap();
    std::fs::write(&inst, &text).unwrap();
    let args = ["hh", inst.to_str().unwrap()];

    let first = loopcoh(&args, Some(dir.path()));
    assert_eq!(code(&first), 0);
    assert!(stderr(&first).contains("cache miss"), "{}", stderr(&first));
    let second = loopcoh(&args, Some(dir.path()));
    assert!(stderr(&second).contains("cache hit"));
    assert_eq!(first.stdout, second.stdout);

    // comments do not change the key
    std::fs::write(&inst, format!("; edited note\n{text}\n# trailing\n")).unwrap();
    assert!(stderr(&loopcoh(&args, Some(dir.path()))).contains("cache hit"));

    // truncation does
    std::fs::write(&inst, text.replace("aux_max = 4", "aux_max = 3")).unwrap();
    assert!(stderr(&loopcoh(&args, Some(dir.path()))).contains("cache miss"));
    std::fs::write(&inst, &text).unwrap();
    let mut wargs = args.to_vec();
    wargs.extend(["--window", "aux_max=3"]);
    assert!(stderr(&loopcoh(&wargs, Some(dir.path()))).contains("cache miss"));

    // flip a byte in every entry
    for e in std::fs::read_dir(dir.path()).unwrap() {
        let p = e.unwrap().path();
        let s = std::fs::read_to_string(&p).unwrap().replacen("PASS", "PASZ", 1);
        std::fs::write(&p, s).unwrap();
    }
    let again = loopcoh(&args, Some(dir.path()));
    assert_eq!(code(&again), 0);
    assert!(stderr(&again).contains("warning: corrupt cache entry"), "{}", stderr(&again));
    assert_eq!(again.stdout, first.stdout);
    assert!(stderr(&loopcoh(&args, Some(dir.path()))).contains("cache hit"));
}

#[test]
fn report_file_and_window_override() {
    let work = tempfile::tempdir().unwrap();
    let rep = work.path().join("r.txt");
    let o = loopcoh(&["fixed-fiber", fixture("a1_z2.ini").to_str().unwrap(), "--report", rep.to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(&rep).unwrap(), o.stdout);
    assert!(stdout(&o).starts_with("loopcoh report v1\n"));

    // shrinking the window can only lose conclusions
    let small = loopcoh(
        &["hp", fixture("a1_z2.ini").to_str().unwrap(), "--window", "u_window=0", "--window", "cohdeg_min=2", "--window", "cohdeg_max=3"],
        None,
    );
    assert_eq!(code(&small), 4, "{}", stdout(&small));
    let bad = loopcoh(&["hh", fixture("a1_z2.ini").to_str().unwrap(), "--window", "depth=3"], None);
    assert_eq!(code(&bad), 2);
}
