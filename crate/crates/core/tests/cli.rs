mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

use common::{ar4_signal, write_pcm16, RATE};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tfinpaint"));
    c.env("RUST_LOG", "warn");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn corpus(dir: &Path, n_signals: usize, len: usize) -> PathBuf {
    let c = dir.join("corpus");
    fs::create_dir_all(&c).unwrap();
    for i in 0..n_signals {
        write_pcm16(&c.join(format!("ar{i}.wav")), &ar4_signal(len, 100 + i as u64, 0.5), RATE);
    }
    c
}

/// Small-STFT configuration so a run takes seconds.
fn config(dir: &Path, corpus: &Path, out: &str, extra: &str) -> PathBuf {
    let path = dir.join(format!("{out}.cfg"));
    fs::write(
        &path,
        format!(
            "# test run\ncorpus_dir = {}\noutput_dir = {}\n\
             win_len = 256\nhop = 64\nn_channels = 256\n\
             ar_order = 16\nbaseline_order = 16\nbaseline_context = 1024\n\
             n_gaps = 3\nn_resamples = 500\n{extra}",
            corpus.display(),
            dir.join(out).display()
        ),
    )
    .unwrap();
    path
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn version_subcommand() {
    let out = run(&["version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn one_signal_one_gap_two_methods() {
    let tmp = TempDir::new().unwrap();
    let c = corpus(tmp.path(), 1, 16_000);
    let cfg = config(
        tmp.path(),
        &c,
        "out",
        "methods = janssen_tf_raw, gapwise_janssen\ngap_lengths = 2\n",
    );
    let out = run(&["run-experiment", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let o = tmp.path().join("out");
    let results = fs::read_to_string(o.join("results.csv")).unwrap();
    let lines: Vec<&str> = results.lines().collect();
    assert_eq!(lines[0], "signal_id,method,gap_len,snr_db,runtime_s");
    assert_eq!(lines.len(), 3);
    assert_eq!(files_in(&o.join("reconstructions")).len(), 2);
    assert_eq!(files_in(&o.join("masks")).len(), 1);
    let agg = fs::read_to_string(o.join("aggregate.csv")).unwrap();
    assert!(agg.starts_with("method,gap_len,mean_snr_db,ci_lo,ci_hi,n\n"));
    assert_eq!(files_in(&o.join("plots")), ["gapwise_janssen.dat", "janssen_tf_raw.dat"]);

    // Each row keys exactly one reconstruction file.
    let recs = files_in(&o.join("reconstructions"));
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        let prefix = format!("{}__{}__g{}__s", f[0], f[1], f[2]);
        assert_eq!(recs.iter().filter(|r| r.starts_with(&prefix)).count(), 1, "{line}");
    }

    // The results table aggregates through the evaluate subcommand too.
    let ev = run(&["evaluate", "--results", o.join("results.csv").to_str().unwrap(), "--n-resamples", "100"]);
    assert!(ev.status.success());
    assert_eq!(String::from_utf8_lossy(&ev.stdout).lines().count(), 3);
}

#[test]
fn repeated_runs_are_byte_identical_and_leave_corpus_alone() {
    let tmp = TempDir::new().unwrap();
    let c = corpus(tmp.path(), 2, 12_000);
    let before: Vec<Vec<u8>> = files_in(&c).iter().map(|f| fs::read(c.join(f)).unwrap()).collect();
    let extra = "gap_lengths = 1, 2\nseed = 5\nouter_iters = 3\n";
    for (name, workers) in [("a", "1"), ("b", "2")] {
        let cfg = config(tmp.path(), &c, name, extra);
        let out = run(&["run-experiment", "--config", cfg.to_str().unwrap(), "--workers", workers]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for f in ["results.csv", "aggregate.csv", "aggregate.json", "gap_snr.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let masks = files_in(&a.join("masks"));
    assert_eq!(masks, files_in(&b.join("masks")));
    for m in &masks {
        assert_eq!(fs::read(a.join("masks").join(m)).unwrap(), fs::read(b.join("masks").join(m)).unwrap());
    }
    let after: Vec<Vec<u8>> = files_in(&c).iter().map(|f| fs::read(c.join(f)).unwrap()).collect();
    assert_eq!(before, after);
}

#[test]
fn ar4_corpus_shorter_gaps_score_higher() {
    let tmp = TempDir::new().unwrap();
    let c = corpus(tmp.path(), 4, 16_000);
    let cfg = config(tmp.path(), &c, "out", "methods = janssen_tf_raw\ngap_lengths = 1, 3\n");
    let out = run(&["run-experiment", "--config", cfg.to_str().unwrap(), "--workers", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let agg = fs::read_to_string(tmp.path().join("out").join("aggregate.csv")).unwrap();
    let mean = |g: &str| -> f64 {
        agg.lines()
            .map(|l| l.split(',').collect::<Vec<_>>())
            .find(|f| f[0] == "janssen_tf_raw" && f[1] == g)
            .map(|f| f[2].parse().unwrap())
            .unwrap()
    };
    assert!(mean("1") > mean("3"), "{agg}");
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let c = corpus(tmp.path(), 1, 12_000);

    let bad = config(tmp.path(), &c, "bad", "no_such_key = 1\n");
    assert_eq!(run(&["run-experiment", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let good = config(tmp.path(), &c, "ovr", "gap_lengths = 1\nmethods = janssen_tf_raw\n");
    let out = run(&["run-experiment", "--config", good.to_str().unwrap(), "--set", "gap_lengths=zero"]);
    assert_eq!(out.status.code(), Some(2));

    // A signal too short to hold the gaps fails on its own; the rest runs.
    write_pcm16(&c.join("tiny.wav"), &ar4_signal(600, 3, 0.5), RATE);
    let out = run(&["run-experiment", "--config", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let results = fs::read_to_string(tmp.path().join("ovr").join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 2);
    assert!(results.contains("ar0,janssen_tf_raw,1,"));
}

#[test]
fn degrade_inpaint_evaluate_pipeline() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("x.wav");
    write_pcm16(&input, &ar4_signal(12_000, 9, 0.5), RATE);
    let mask = tmp.path().join("mask.json");
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let stft = ["--win-len", "256", "--hop", "64", "--n-channels", "256"];

    let mut args = vec!["degrade".to_string(), "--input".into(), s(&input), "--gap-len".into(), "2".into()];
    args.extend(["--n-gaps", "2", "--seed", "3", "--mask"].map(String::from));
    args.push(s(&mask));
    args.extend(["--output".to_string(), s(&tmp.path().join("cor.wav"))]);
    args.extend(stft.map(String::from));
    let out = bin().args(&args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&mask).unwrap()).unwrap();
    assert_eq!(doc["gap_length"], 2);
    assert_eq!(doc["starts"].as_array().unwrap().len(), 2);
    assert_eq!(doc["stft"]["hop"], 64);

    let est = tmp.path().join("y.wav");
    let out = run(&[
        "inpaint", "--input", &s(&input), "--mask", &s(&mask), "--method", "janssen_tf_raw", "--output", &s(&est),
        "--ar-order", "16", "--outer-iters", "4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&["evaluate", "--reference", &s(&input), "--estimate", &s(&est), "--mask", &s(&mask)]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let val = |key: &str| -> f64 {
        text.lines().find_map(|l| l.strip_prefix(key)).unwrap().trim().parse().unwrap()
    };
    assert!(val("snr_db") > 20.0, "{text}");
    assert!(val("gap_snr_db") < val("snr_db"), "{text}");

    let out = run(&["inpaint", "--input", &s(&input), "--mask", &s(&mask), "--output", &s(&est), "--rho", "-1"]);
    assert!(!out.status.success());
}
