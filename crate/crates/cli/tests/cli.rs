use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_complaints"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_corpus(dir: &Path) -> PathBuf {
    let complaint = ["my order is still not here", "why is my refund not working", "still no reply from support", "app not loading again"];
    let happy = ["thanks so much love it", "great service thanks", "love this new phone", "had a great day lol"];
    let domains = ["Retail", "Software", "Cars"];
    let mut text = String::from("id\ttext\tdomain\tlabel\n");
    for i in 0..48 {
        let (t, l) = if i % 2 == 0 { (complaint[i / 2 % 4], 1) } else { (happy[i / 2 % 4], 0) };
        text.push_str(&format!("t{i}\t@acme {t} #{i}\t{}\t{l}\n", domains[i % 3]));
    }
    let p = dir.join("corpus.tsv");
    std::fs::write(&p, text).unwrap();
    p
}

fn cv_args<'a>(corpus: &'a str, out: &'a str, jobs: &'a str) -> Vec<&'a str> {
    vec!["cv", "--corpus", corpus, "--out", out, "--features", "bow", "--folds", "4", "--inner", "2", "--alpha", "0.01", "--rho", "0.5", "--jobs", jobs]
}

#[test]
fn cv_writes_report_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let out = dir.path().join("report.tsv");
    let o = run(&cv_args(corpus.to_str().unwrap(), out.to_str().unwrap(), "1"));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.lines().any(|l| l.starts_with("mean")), "{report}");
    let config = std::fs::read_to_string(dir.path().join("report.tsv.config")).unwrap();
    assert!(config.lines().any(|l| l.starts_with("features") && l.ends_with("bow")));
}

#[test]
fn output_identical_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let c = corpus.to_str().unwrap();
    let mut reports = Vec::new();
    for (name, jobs) in [("a", "1"), ("b", "1"), ("c", "4")] {
        let out = dir.path().join(name);
        let o = run(&cv_args(c, out.to_str().unwrap(), jobs));
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        reports.push(std::fs::read(out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
}

#[test]
fn user_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let c = corpus.to_str().unwrap();
    assert_eq!(code(&run(&["cv", "--corpus", c, "--features", ""])), 1);
    assert_eq!(code(&run(&["cv", "--corpus", c, "--no-such-flag"])), 1);
    assert_eq!(code(&run(&["cv", "--corpus", dir.path().join("missing.tsv").to_str().unwrap()])), 1);
    assert_eq!(code(&run(&["cv", "--corpus", c, "--jobs", "0"])), 1);
}

#[test]
fn config_file_with_unknown_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, format!("corpus = {}\nfeaturez = bow\n", corpus.display())).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "cv"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("featurez"));
}

#[test]
fn config_file_values_are_used() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("r.tsv");
    std::fs::write(
        &cfg,
        format!("corpus = {}\nout = {}\nfeatures = bow\nfolds = 3\ninner = 2\nmodel = mfc\n", corpus.display(), out.display()),
    )
    .unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "cv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(&out).unwrap();
    assert_eq!(report.lines().filter(|l| !l.starts_with('#')).count(), 5, "{report}");
}

#[test]
fn version_flag() {
    let o = run(&["--version"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn dry_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let out = dir.path().join("report.tsv");
    let mut args = cv_args(corpus.to_str().unwrap(), out.to_str().unwrap(), "1");
    args.push("--dry-run");
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
    assert!(!dir.path().join("report.tsv.config").exists());
}

#[test]
fn kappa_of_two_annotators() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.tsv");
    let b = dir.path().join("b.tsv");
    std::fs::write(&a, "x1\t1\nx2\t1\nx3\t0\nx4\t0\n").unwrap();
    std::fs::write(&b, "x1\t1\nx2\t0\nx3\t0\nx4\t0\n").unwrap();
    let o = run(&["kappa", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // po = 0.75, pe = 0.5 * 0.25 + 0.5 * 0.75 = 0.5
    assert!(String::from_utf8_lossy(&o.stdout).contains("0.5"), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn analyze_ranks_complaint_words() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path());
    let out = dir.path().join("corr.tsv");
    let o = run(&["analyze", "--corpus", corpus.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains("not"), "{text}");
}
