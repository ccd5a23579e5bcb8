use std::fs;
use std::path::Path;

use polyest::adaptive::AdaptResult;
use polyest::cli::cli_dispatch;
use polyest::estimator::{criterion, FitResult};
use polyest::model::read_sample;

fn run(args: &[&str]) -> i32 {
    cli_dispatch(std::iter::once("polyest").chain(args.iter().copied()))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("s.csv");
    let fit = dir.path().join("fit.json");
    assert_eq!(
        run(&[
            "gen",
            "--n",
            "100",
            "--d",
            "2",
            "--sigma",
            "0.5",
            "--seed",
            "7",
            "--out",
            path(&data)
        ]),
        0
    );
    let sample = read_sample(&data).unwrap();
    assert_eq!(sample.len(), 100);
    assert_eq!(
        run(&[
            "estimate",
            "--data",
            path(&data),
            "--r",
            "3",
            "--m",
            "6",
            "--strategy",
            "exact",
            "--out",
            path(&fit)
        ]),
        0
    );
    let res: FitResult = serde_json::from_str(&fs::read_to_string(&fit).unwrap()).unwrap();
    assert_eq!(res.estimate.resolution(), 6);
    let recomputed = criterion(res.estimate.base(), &sample).unwrap();
    assert!((recomputed - res.criterion_value).abs() < 1e-9);

    let again = dir.path().join("fit2.json");
    run(&[
        "estimate",
        "--data",
        path(&data),
        "--r",
        "3",
        "--m",
        "6",
        "--strategy",
        "exact",
        "--out",
        path(&again),
    ]);
    assert_eq!(fs::read(&fit).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run(&[
        "gen",
        "--n",
        "50",
        "--seed",
        "3",
        "--noise",
        "rademacher",
        "--out",
        path(&a),
    ]);
    run(&[
        "gen",
        "--n",
        "50",
        "--seed",
        "3",
        "--noise",
        "rademacher",
        "--out",
        path(&b),
    ]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("s.csv");
    run(&["gen", "--n", "30", "--out", path(&data)]);
    assert_eq!(run(&["estimate", "--data", path(&data), "--r", "2"]), 2);
    assert_eq!(run(&["estimate", "--data", path(&data), "--r", "3", "--bogus"]), 2);
    assert_eq!(run(&["no-such-command"]), 2);
    assert_eq!(run(&["gen", "--n", "10", "--sigma=-1", "--out", path(&data)]), 2);
    assert_eq!(
        run(&["estimate", "--data", path(&dir.path().join("missing.csv")), "--r", "3"]),
        1
    );
}

#[test]
fn adapt_writes_a_replayable_table() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("s.csv");
    let out = dir.path().join("adapt.json");
    run(&["gen", "--n", "200", "--seed", "2", "--out", path(&data)]);
    assert_eq!(
        run(&[
            "adapt",
            "--data",
            path(&data),
            "--m",
            "8",
            "--seed",
            "1",
            "--out",
            path(&out)
        ]),
        0
    );
    let res: AdaptResult = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(res.r_hat <= res.r_max);
    assert_eq!(res.replay(1.0), res.r_hat);
}

#[test]
fn risk_and_tail_studies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.json");
    fs::write(
        &cfg,
        r#"{
  "dim": 2,
  "sigma": 0.5,
  "truth": {"variant": "poly", "dim": 2, "vertices": [[0.2, 0.2], [0.7, 0.2], [0.35, 0.8]]},
  "ns": [40, 80, 160],
  "replicates": 3,
  "r_policy": {"policy": "fixed", "r": 3},
  "grid": {"policy": "fixed", "m": 6},
  "search": {"strategy": "anneal", "anneal": {"restarts": 2}, "seed": 0},
  "seed": 9,
  "mc_samples": 20000
}"#,
    )
    .unwrap();
    let csv = dir.path().join("risk.csv");
    let svg = dir.path().join("risk.svg");
    assert_eq!(
        run(&[
            "risk-study",
            "--config",
            path(&cfg),
            "--out",
            path(&csv),
            "--svg",
            path(&svg)
        ]),
        0
    );
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("n,mean,ci,replicates\n40,"));
    assert_eq!(text.lines().count(), 4);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let tail = dir.path().join("tail.csv");
    assert_eq!(
        run(&[
            "tail-study",
            "--config",
            path(&cfg),
            "--r",
            "3",
            "--x",
            "0,100,1000",
            "--out",
            path(&tail)
        ]),
        0
    );
    assert_eq!(fs::read_to_string(&tail).unwrap().lines().count(), 4);
}

#[test]
fn approx_study_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("approx.csv");
    assert_eq!(run(&["approx-study", "--r", "8,16,32", "--out", path(&out)]), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("r,error"));
    assert_eq!(text.lines().count(), 4);
}
