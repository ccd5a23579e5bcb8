use std::fs;

use polyest::geometry::ConvexBody;
use polyest::harness::reference_truth;
use polyest::model::{generate_sample, read_sample, write_sample, ModelConfig, NoiseKind};
use polyest::Error;

fn config(dim: usize, n: usize, noise: NoiseKind) -> ModelConfig {
    ModelConfig {
        dim,
        n,
        truth: reference_truth(dim),
        sigma: 0.5,
        noise,
        seed: 17,
    }
}

#[test]
fn round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    for noise in [NoiseKind::Gaussian, NoiseKind::ScaledRademacher] {
        let s = generate_sample(&config(2, 300, noise)).unwrap();
        let p = dir.path().join("s.csv");
        write_sample(&s, &p).unwrap();
        let back = read_sample(&p).unwrap();
        assert_eq!(back.config, s.config);
        assert_eq!(back.rows, s.rows);
        let first = fs::read(&p).unwrap();
        write_sample(&back, &p).unwrap();
        assert_eq!(fs::read(&p).unwrap(), first);
    }
}

#[test]
fn three_dimensional_layout() {
    let dir = tempfile::tempdir().unwrap();
    let s = generate_sample(&config(3, 50, NoiseKind::Gaussian)).unwrap();
    assert!(matches!(s.config.truth, ConvexBody::Ball { .. }));
    let p = dir.path().join("s.csv");
    write_sample(&s, &p).unwrap();
    let text = fs::read_to_string(&p).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# polyest-sample {"));
    assert_eq!(lines[1], "x1,x2,x3,y");
    assert_eq!(lines.len(), 52);
    assert!(lines[2..].iter().all(|l| l.split(',').count() == 4));
    assert!(!text.contains('\r'));
}

#[test]
fn wrong_column_count_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let s = generate_sample(&config(2, 10, NoiseKind::Gaussian)).unwrap();
    let p = dir.path().join("s.csv");
    write_sample(&s, &p).unwrap();
    let text = fs::read_to_string(&p).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[5].push_str(",0.5");
    fs::write(&p, lines.join("\n") + "\n").unwrap();
    match read_sample(&p) {
        Err(Error::Parse { line, msg }) => {
            assert_eq!(line, 6);
            assert!(msg.contains("columns"), "{msg}");
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn bad_number_and_truncation_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let s = generate_sample(&config(2, 10, NoiseKind::Gaussian)).unwrap();
    let p = dir.path().join("s.csv");
    write_sample(&s, &p).unwrap();
    let text = fs::read_to_string(&p).unwrap();

    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[3] = "0.1,abc,0.3".into();
    fs::write(&p, lines.join("\n") + "\n").unwrap();
    assert!(matches!(read_sample(&p), Err(Error::Parse { line: 4, .. })));

    let lines: Vec<&str> = text.lines().take(8).collect();
    fs::write(&p, lines.join("\n") + "\n").unwrap();
    assert!(matches!(read_sample(&p), Err(Error::Parse { .. })));

    fs::write(&p, "x1,x2,y\n0.1,0.2,1\n").unwrap();
    assert!(matches!(read_sample(&p), Err(Error::Parse { line: 1, .. })));
}

#[test]
fn missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        read_sample(&dir.path().join("none.csv")),
        Err(Error::Io { .. })
    ));
}
