use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn quadlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadlat"))
        .args(args)
        .env_remove("QUADLAT_PRECISION")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn k3_isogeny_degree_four() {
    let out = quadlat(&["k3-isogeny", "--d", "1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["q_xi"], 4);
    assert_eq!(doc["lattice"]["rank"], 22);
    assert_eq!(doc["xi"].as_array().unwrap().len(), 22);
}

#[test]
fn quadric_lines_on_two_planes() {
    let out = quadlat(&["quadric", "lines", "H⊥H", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["count"], 16);
    assert_eq!(doc["closed_form_count"], "16");
    assert_eq!(doc["lines"].as_array().unwrap().len(), 16);
    assert_eq!(doc["witt_type"], "split");
}

#[test]
fn quadric_lines_from_space_document() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("space.json");
    fs::write(
        &path,
        r#"{"p": 3, "dim": 2, "half_gram": [[1, 0], [0, 1]]}"#,
    )
    .unwrap();
    let doc = json_of(&quadlat(&[
        "quadric",
        "lines",
        path.to_str().unwrap(),
        "--p",
        "3",
    ]));
    // x² + y² is anisotropic over F_3.
    assert_eq!(doc["count"], 0);
    assert_eq!(doc["witt_type"], "non-split");
    let out = quadlat(&["quadric", "lines", path.to_str().unwrap(), "--p", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lattice_standard_then_info() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("k3.json");
    let out = quadlat(&["lattice", "standard", "h^3+e8^2"]);
    assert_eq!(out.status.code(), Some(0));
    fs::write(&path, &out.stdout).unwrap();
    let doc = json_of(&quadlat(&[
        "lattice",
        "info",
        path.to_str().unwrap(),
        "--bound",
        "12",
    ]));
    assert_eq!(doc["rank"], 22);
    assert_eq!(doc["det"].as_i64().unwrap().abs(), 1);
    assert_eq!(doc["discriminant_group"]["torsion"], serde_json::json!([]));
    assert_eq!(
        doc["self_dual_primes"]["primes"],
        serde_json::json!([2, 3, 5, 7, 11])
    );

    let doc = json_of(&quadlat(&["lattice", "info", "rank1(6)", "--bound", "10"]));
    assert_eq!(
        doc["discriminant_group"]["torsion"],
        serde_json::json!([12])
    );
    assert_eq!(doc["self_dual_primes"]["primes"], serde_json::json!([5, 7]));
}

#[test]
fn neighbors_count_and_precision_independence() {
    let a = quadlat(&["neighbors", "H⊥H", "--p", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json_of(&a)["count"], 9);
    let b = Command::new(env!("CARGO_BIN_EXE_quadlat"))
        .args(["neighbors", "H⊥H", "--p", "2"])
        .env("QUADLAT_PRECISION", "4")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn shrink_then_grow_recovers_the_start() {
    let dir = TempDir::new().unwrap();
    let emb = dir.path().join("emb.json");
    let pair = dir.path().join("pair.json");
    let nt = dir.path().join("nt.json");
    fs::write(&emb, "[[1],[1],[0],[0],[0],[0]]").unwrap();
    fs::write(
        &pair,
        r#"{"lambda": {"rank": 1, "half_gram": [[1]]}, "tilde_basis": [[3]]}"#,
    )
    .unwrap();
    let (emb, pair) = (emb.to_str().unwrap(), pair.to_str().unwrap());

    let out = quadlat(&["shrink", "h^3", emb, pair, "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    let fiber = doc["fiber"].as_array().unwrap();
    assert!(!fiber.is_empty());
    assert_eq!(doc["count"].as_u64().unwrap() as usize, fiber.len());

    let start = json_of(&quadlat(&["lattice", "standard", "h^3"]));
    for member in fiber.iter().step_by(17) {
        fs::write(&nt, member.to_string()).unwrap();
        let out = quadlat(&["grow", nt.to_str().unwrap(), emb, pair, "--p", "3"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let grown = &json_of(&out)["lattice"];
        assert_eq!(grown["power"], 0);
        assert_eq!(grown["ambient"], start);
        assert_eq!(
            grown["numerator"],
            serde_json::to_value(identity(6)).unwrap()
        );
    }
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

#[test]
fn shrink_rejects_rank_too_large() {
    let dir = TempDir::new().unwrap();
    let emb = dir.path().join("emb.json");
    let pair = dir.path().join("pair.json");
    fs::write(&emb, "[[1],[1],[0],[0]]").unwrap();
    fs::write(
        &pair,
        r#"{"lambda": {"rank": 1, "half_gram": [[1]]}, "tilde_basis": [[3]], "p": 3}"#,
    )
    .unwrap();
    let out = quadlat(&[
        "shrink",
        "h^2",
        emb.to_str().unwrap(),
        pair.to_str().unwrap(),
        "--p",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn verify_nice_cochar_passes() {
    let out = quadlat(&["verify", "nice-cochar", "--p", "2", "--max-rank", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["failures"], 0);
    assert!(doc["instances"].as_u64().unwrap() > 0);
}

#[test]
fn verify_failure_exits_one_with_report() {
    // Over F_2, x² ⊥ H has a polar radical no isometry can move.
    let out = quadlat(&["verify", "witt-extension", "--p", "2", "--max-rank", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json_of(&out);
    assert!(doc["failures"].as_u64().unwrap() > 0);
    assert!(!doc["details"].as_array().unwrap().is_empty());
}

#[test]
fn verify_is_deterministic_per_seed() {
    let run = |seed: &str| {
        quadlat(&[
            "verify",
            "cokernel-m",
            "--p",
            "2,3",
            "--max-rank",
            "5",
            "--seed",
            seed,
        ])
    };
    let (a, b) = (run("7"), run("7"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = quadlat(&["verify", "nice-cochar", "--p", "3", "--seed", "11"]);
    let d = quadlat(&["verify", "nice-cochar", "--p", "3", "--seed", "11"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"rank": 2, "half_gram": [[0, 1], [1, 0]]}"#).unwrap();
    for args in [
        vec!["lattice", "info", bad.to_str().unwrap()],
        vec!["lattice", "info", "not-a-lattice"],
        vec!["verify", "no-such-suite"],
        vec!["k3-isogeny", "--d", "1", "--p", "4"],
        vec!["neighbors", "H", "--p", "4"],
    ] {
        let out = quadlat(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}
