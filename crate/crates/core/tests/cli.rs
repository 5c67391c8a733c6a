use std::process::Command;

use exset::assembler::Problem;
use exset::scalar::int;
use exset::verify::{build_artifacts, verify_artifacts, Artifacts};

fn exset(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_exset"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_then_verify_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("problem.txt");
    std::fs::write(
        &problem,
        "# one variable\nM 1\nRHO 1\nHEIGHT 2\nSTAGE 2\nS 0 2\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let b = exset(&[
        "build",
        problem.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    assert!(stdout(&b).contains("theta_2"));
    for f in [
        "series.txt",
        "bundle.txt",
        "certificate.txt",
        "classification.txt",
        "witnesses.txt",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let class = std::fs::read_to_string(out.join("classification.txt")).unwrap();
    assert_eq!(
        class
            .lines()
            .map(|l| l.ends_with(" IN"))
            .collect::<Vec<_>>(),
        vec![true, false, true]
    );

    let v = exset(&["verify", out.to_str().unwrap()]);
    assert!(v.status.success(), "{}", stdout(&v));
    assert!(stdout(&v).contains(" 0 failed"));

    let series = out.join("series.txt");
    let text = std::fs::read_to_string(&series).unwrap();
    std::fs::write(&series, text.replacen("\n1 1\n", "\n1 2\n", 1)).unwrap();
    let v = exset(&["verify", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(3), "{}", stdout(&v));
}

#[test]
fn rebuilding_is_byte_identical() {
    let p = Problem {
        m: 1,
        rho: vec![int(1)],
        height: 3,
        stage: 2,
        degree: 12,
        seed: 4,
        s: vec![0, 1],
        lambda_level: 3,
        paper_faithful: false,
    };
    let (_, _, a) = build_artifacts(&p).unwrap();
    let (_, _, b) = build_artifacts(&p).unwrap();
    assert_eq!(a.series, b.series);
    assert_eq!(a.bundle, b.bundle);
    assert_eq!(a.certificate, b.certificate);
    assert_eq!(a.classification, b.classification);
    assert_eq!(a.witnesses, b.witnesses);
    let dir = tempfile::tempdir().unwrap();
    a.write_dir(dir.path()).unwrap();
    let back = Artifacts::read_dir(dir.path()).unwrap();
    assert!(verify_artifacts(&back).unwrap().all_pass());
}

#[test]
fn small_problems_round_trip() {
    for (m, n, s, seed) in [
        (1, 0, vec![0], 0),
        (1, 1, vec![0, 1], 1),
        (1, 1, vec![0], 2),
        (2, 1, vec![0], 0),
        (2, 1, vec![0, 1], 3),
    ] {
        let p = Problem {
            m,
            rho: vec![int(1); m],
            height: 2,
            stage: n,
            degree: 10,
            seed,
            s,
            lambda_level: 3,
            paper_faithful: false,
        };
        let (_, cert, a) = build_artifacts(&p).unwrap();
        assert!(cert.all_pass(), "{p:?}");
        let r = verify_artifacts(&a).unwrap();
        assert!(r.all_pass(), "{p:?}: {:?}", r.failures());
    }
}

#[test]
fn paper_faithful_build_skips_classification() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.txt");
    std::fs::write(&problem, "M 1\nRHO 1\nHEIGHT 2\nSTAGE 2\nS 0\n").unwrap();
    let out = dir.path().join("out");
    let b = exset(&[
        "build",
        problem.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--paper-faithful",
    ]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    assert_eq!(
        std::fs::read_to_string(out.join("classification.txt")).unwrap(),
        ""
    );
    assert!(exset(&["verify", out.to_str().unwrap()]).status.success());
}

#[test]
fn direct_subcommands() {
    let e = exset(&["enumerate", "--m", "1", "--rho", "1", "--height", "2"]);
    assert!(e.status.success());
    let text = stdout(&e);
    assert_eq!(text.lines().next(), Some("0 (0)"));
    assert_eq!(text.lines().filter(|l| l.contains("partner")).count(), 3);

    let dir = tempfile::tempdir().unwrap();
    let nodes = dir.path().join("nodes.txt");
    std::fs::write(&nodes, "(1/2) 1/3\n").unwrap();
    let i = exset(&["interpolate", nodes.to_str().unwrap(), "--degree", "4"]);
    assert!(i.status.success());
    let text = stdout(&i);
    let coeffs: Vec<&str> = text
        .lines()
        .filter(|l| l.split(' ').count() == 2 && !l.contains('='))
        .map(|l| l.trim())
        .collect();
    assert_eq!(coeffs[..4], ["1 1", "2 -1", "3 1", "4 -1"]);

    let v = exset(&[
        "vanish", "--alpha", "(1/2)", "--stage", "2", "--degree", "12",
    ]);
    assert!(v.status.success(), "{}", String::from_utf8_lossy(&v.stderr));
    assert!(stdout(&v).contains("CERTIFICATE v1"));
    assert!(!stdout(&v).contains(" FAIL\n"));

    let r = exset(&["radius", "--rho", "2/3", "--degree", "3"]);
    assert!(r.status.success());
    assert!(stdout(&r).contains("\n1 2\n2 3\n3 4\n"), "{}", stdout(&r));
}

#[test]
fn exit_codes() {
    assert_eq!(
        exset(&["enumerate", "--m", "1", "--rho", "0", "--height", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        exset(&["enumerate", "--m", "0", "--height", "2"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "M 1\nRHO 3/2\nHEIGHT 2\n").unwrap();
    let o = exset(&[
        "build",
        bad.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
