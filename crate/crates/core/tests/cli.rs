use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projmeasure"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    let prefix = format!("{key}: ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

fn num(text: &str, key: &str) -> f64 {
    field(text, key).parse().unwrap()
}

fn write_spectrum(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn psi_examples() {
    let o = run(&["psi", "--m", "128", "--n", "256", "--delta", "0.25"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!((num(&s, "log10") - (-41.72)).abs() < 0.005);
    assert_eq!(field(&s, "value"), "1.89563E-42");
    assert_eq!(field(&s, "method"), "even-polynomial");

    let s = stdout(&run(&["psi", "--m", "2", "--n", "4", "--delta", "0.5"]));
    assert_eq!(field(&s, "value"), "2.5E-1");

    let s = stdout(&run(&["psi", "--m", "2", "--n", "4", "--delta", "0"]));
    assert_eq!(field(&s, "value"), "0");
    assert_eq!(field(&s, "log10"), "-inf");
}

#[test]
fn psi_methods_agree() {
    let auto = stdout(&run(&["psi", "--m", "3", "--n", "8", "--delta", "0.6"]));
    let odd = stdout(&run(&[
        "psi", "--m", "3", "--n", "8", "--delta", "0.6", "--method", "odd",
    ]));
    let quad = stdout(&run(&[
        "psi",
        "--m",
        "3",
        "--n",
        "8",
        "--delta",
        "0.6",
        "--method",
        "quadrature",
    ]));
    assert_eq!(field(&auto, "value"), field(&odd, "value"));
    assert_eq!(field(&auto, "value"), field(&quad, "value"));
    assert_eq!(field(&quad, "method"), "quadrature");
    let wrong = run(&["psi", "--m", "3", "--n", "8", "--delta", "0.6", "--method", "even"]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn psi_domain_errors_exit_2() {
    for args in [
        &["psi", "--m", "2", "--n", "4", "--delta", "1.5"][..],
        &["psi", "--m", "4", "--n", "4", "--delta", "0.5"],
        &["psi", "--m", "0", "--n", "4", "--delta", "0.5"],
        &["psi", "--m", "2", "--n", "4", "--delta", "-0.1"],
        &["psi", "--m", "2"],
        &["nonsense"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = run(&["psi", "--m", "2", "--n", "4", "--delta", "1.5"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta"));
}

#[test]
fn bound_examples() {
    let s = stdout(&run(&[
        "bound", "--m", "2", "--n", "4", "--kappa", "1", "--delta", "0.5", "--kind", "chernoff",
    ]));
    assert_eq!(field(&s, "bound"), "7.5E-1");
    assert_eq!(field(&s, "condition_holds"), "true");
    assert!((num(&s, "t_star") - 4.0 / 3.0).abs() < 1e-9);

    let s = stdout(&run(&[
        "bound", "--kind", "tail", "--m", "2", "--n", "4", "--delta", "0.9",
    ]));
    let b = 10f64.powf(num(&s, "log10"));
    assert!((b - 0.871).abs() < 1e-3);

    let s = stdout(&run(&[
        "bound",
        "--kind",
        "clustered",
        "--m",
        "12",
        "--n",
        "30",
        "--m0",
        "3",
        "--delta",
        "0.3",
    ]));
    // I_{0.09}(9/2, 21/2)
    assert!((10f64.powf(num(&s, "log10")) / 0.01411465545914923 - 1.0).abs() < 1e-10);

    let s = stdout(&run(&[
        "bound", "--kind", "kappa", "--m", "4", "--n", "9", "--kappa", "2", "--delta", "0.3",
    ]));
    assert!(num(&s, "lower_log10") <= num(&s, "upper_log10"));

    let s = stdout(&run(&[
        "bound", "--kind", "phi", "--m", "4", "--n", "16", "--kappa", "1.5", "--delta", "0.2",
    ]));
    assert!(num(&s, "log10") < 0.0);
}

#[test]
fn unusable_preconditions_give_trivial_bound() {
    for kind in ["chernoff", "phi", "tail"] {
        let o = run(&[
            "bound", "--kind", kind, "--m", "2", "--n", "4", "--kappa", "3", "--delta", "0.6",
        ]);
        assert!(o.status.success(), "{kind}");
        assert_eq!(field(&stdout(&o), "bound"), "1E0", "{kind}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("warning:"), "{kind}");
    }
    let o = run(&["bound", "--kind", "chernoff", "--m", "2", "--n", "4", "--delta", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bound_from_spectrum_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spectrum(
        dir.path(),
        "s.toml",
        "n = 30\n[[singular_values]]\nvalue = 1.0\ncount = 3\n[[singular_values]]\nvalue = 2.23606797749979\ncount = 9\n",
    );
    let s = stdout(&run(&[
        "bound",
        "--spectrum",
        &path,
        "--kind",
        "clustered",
        "--delta",
        "0.3",
    ]));
    assert_eq!(field(&s, "m0"), "3");
    assert!((10f64.powf(num(&s, "log10")) / 0.01411465545914923 - 1.0).abs() < 1e-10);

    let s = stdout(&run(&[
        "bound",
        "--spectrum",
        &path,
        "--kind",
        "chernoff",
        "--delta",
        "0.1",
    ]));
    assert_eq!(field(&s, "condition_holds"), "true");
}

#[test]
fn bad_spectrum_files() {
    let dir = tempfile::tempdir().unwrap();
    let unsorted = write_spectrum(
        dir.path(),
        "u.toml",
        "n = 10\n[[singular_values]]\nvalue = 2.0\ncount = 1\n[[singular_values]]\nvalue = 1.0\ncount = 1\n",
    );
    let full = write_spectrum(
        dir.path(),
        "f.toml",
        "n = 3\n[[singular_values]]\nvalue = 1.0\ncount = 3\n",
    );
    let junk = write_spectrum(dir.path(), "j.toml", "this is not toml [");
    for p in [&unsorted, &full, &junk] {
        let o = run(&["mc", "--spectrum", p, "--delta", "0.3", "--samples", "10"]);
        assert_eq!(o.status.code(), Some(2), "{p}");
    }
    let missing = dir.path().join("missing.toml");
    let o = run(&["mc", "--spectrum", missing.to_str().unwrap(), "--delta", "0.3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn mc_reports_exact_and_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spectrum(
        dir.path(),
        "id.toml",
        "n = 16\n[[singular_values]]\nvalue = 1.0\ncount = 8\n",
    );
    let one = run(&[
        "mc",
        "--spectrum",
        &path,
        "--delta",
        "0.4",
        "--samples",
        "200000",
        "--seed",
        "5",
        "--workers",
        "1",
    ]);
    let eight = run(&[
        "mc",
        "--spectrum",
        &path,
        "--delta",
        "0.4",
        "--samples",
        "200000",
        "--seed",
        "5",
        "--workers",
        "8",
    ]);
    assert_eq!(one.stdout, eight.stdout);
    let s = stdout(&one);
    assert!((num(&s, "exact") - 0.0152502796).abs() < 1e-9);
    assert!((num(&s, "p_hat") - 0.01525).abs() < 0.001);
    assert_eq!(field(&s, "in_ci"), "true");

    let s = stdout(&run(&[
        "mc",
        "--m",
        "8",
        "--n",
        "16",
        "--delta",
        "0",
        "--samples",
        "1000",
    ]));
    assert_eq!(field(&s, "hits"), "0");

    let o = run(&["mc", "--m", "8", "--n", "16", "--delta", "0.4", "--workers", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rpt_examples() {
    let s = stdout(&run(&["rpt", "--m", "2", "--n", "4", "--epsilon", "0.2"]));
    assert!((num(&s, "exact") - 0.40).abs() < 1e-12);
    assert!((num(&s, "c") - 0.806853).abs() < 1e-6);

    let s = stdout(&run(&["rpt", "--m", "1024", "--n", "2048", "--epsilon", "0.1"]));
    assert!(num(&s, "exact") >= num(&s, "lower_bound"));

    assert_eq!(
        run(&["rpt", "--m", "2", "--n", "4", "--epsilon", "1.5"]).status.code(),
        Some(2)
    );
}

#[test]
fn figures_write_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1");
    let o = run(&["fig1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 16);

    let k1 = std::fs::read_to_string(out.join("fig1_k01_m2_n4.csv")).unwrap();
    let row = k1.lines().find(|l| l.starts_with("0.5,")).unwrap();
    assert!(row.starts_with("0.5,2.5E-1,"));

    let k16 = std::fs::read_to_string(out.join("fig1_k16_m65536_n131072.csv")).unwrap();
    let row = k16.lines().find(|l| l.starts_with("0.5,")).unwrap();
    let log10: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    // exact big-integer binomial sum: -4096.49884261884...
    assert!((log10 - (-4096.4988426188)).abs() < 1e-6);

    let out2 = dir.path().join("fig2");
    let o = run(&["fig2", "--out", out2.to_str().unwrap()]);
    assert!(o.status.success());
    let n4 = std::fs::read_to_string(out2.join("fig2_N04.csv")).unwrap();
    let n32 = std::fs::read_to_string(out2.join("fig2_N32.csv")).unwrap();
    let at = |t: &str, d: &str| -> f64 {
        let row = t.lines().find(|l| l.starts_with(&format!("{d},"))).unwrap();
        row.split(',').nth(2).unwrap().parse().unwrap()
    };
    assert!((10f64.powf(at(&n4, "0.3")) / 0.01411465545914923 - 1.0).abs() < 1e-10);
    assert!(at(&n32, "0.05") < at(&n4, "0.05") - 10.0);
}

#[test]
fn figure_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run(&["fig2", "--out", a.to_str().unwrap()]);
    run(&["fig2", "--out", b.to_str().unwrap()]);
    for entry in std::fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            std::fs::read(a.join(&name)).unwrap(),
            std::fs::read(b.join(&name)).unwrap()
        );
    }
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = run(&["fig1", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}
