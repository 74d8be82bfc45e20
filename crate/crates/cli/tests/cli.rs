use std::collections::BTreeMap;
use std::path::PathBuf;

use linmonad::stability::replay;
use linmonad::Certificate;
use linmonad_cli::document::{MonadDocument, SpaceBlock, TermsBlock};
use linmonad_cli::{run, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK};
use proptest::prelude::*;
use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.display().to_string()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("linmonad").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn human_verdict(text: &str) -> String {
    text.lines()
        .filter_map(|l| l.strip_prefix("verdict: "))
        .next()
        .expect("verdict line")
        .to_string()
}

#[test]
fn stable_certificate_matches_the_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p2xp1.cert.json");
    let (code, _, _) = cli(&["stability", &fixture("p2xp1.monad.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let golden = std::fs::read(fixture("p2xp1.stable.cert.json")).unwrap();
    assert_eq!(std::fs::read(&out).unwrap(), golden);
    let cert = Certificate::from_json(std::str::from_utf8(&golden).unwrap()).unwrap();
    let monad = MonadDocument::load(&fixture("p2xp1.monad.json"))
        .unwrap()
        .monad(&BTreeMap::new())
        .unwrap();
    replay(&cert, &monad).unwrap();
}

#[test]
fn fixtures_round_trip() {
    for name in [
        "p2xp1.monad.json",
        "p2xp1_planted.monad.json",
        "p3_family.monad.json",
        "trivial.monad.json",
        "instanton2.monad.json",
        "hirzebruch.monad.json",
    ] {
        let doc = MonadDocument::load(&fixture(name)).unwrap();
        let again = MonadDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(again, doc, "{name}");
        assert_eq!(again.to_json(), doc.to_json());
    }
}

proptest! {
    #[test]
    fn parameter_blocks_round_trip(
        params in prop::collection::btree_map("[a-w][a-z_]{0,6}", "-?[0-9]{1,3}(/[1-9][0-9]{0,2})?", 0..4),
    ) {
        let doc = MonadDocument {
            space: SpaceBlock { kind: "P".into(), params: vec![3] },
            terms: TermsBlock { m0: vec![], m1: vec![], m2: vec![] },
            maps: Default::default(),
            parameters: params,
        };
        prop_assert_eq!(MonadDocument::from_json(&doc.to_json()).unwrap(), doc);
    }
}

#[test]
fn same_command_line_same_bytes() {
    let file = fixture("p3_family.monad.json");
    let args = ["classify", &file, "--param", "lambda=0", "--samples", "20000", "--seed", "11", "--json"];
    let (c1, a, _) = cli(&args);
    let (c2, b, _) = cli(&args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["seed"], 11);
    let runs = &v["class"]["alpha_locus"]["monte_carlo"]["runs"];
    assert_eq!(runs.as_array().unwrap().len(), 2);
    assert_eq!(runs[0]["prime"], 101);
    assert_eq!(runs[1]["prime"], 10007);
    assert_eq!(runs[0]["samples"], 20000);

    let (_, c, _) = cli(&["limit", &file, "--param", "lambda=1", "--samples", "5000", "--seed", "3", "--json"]);
    let (_, d, _) = cli(&["limit", &file, "--param", "lambda=1", "--samples", "5000", "--seed", "3", "--json"]);
    assert_eq!(c, d);
    let cert: Value = serde_json::from_str(&c).unwrap();
    assert_eq!(cert["seed"], 3);
}

#[test]
fn json_and_human_modes_agree() {
    let fam = fixture("p3_family.monad.json");
    let p2 = fixture("p2xp1.monad.json");
    let triv = fixture("trivial.monad.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["validate", &p2],
        vec!["validate", &triv],
        vec!["invariants", &p2],
        vec!["cohomology", "--space", "PxP:2,1", "--degree=-1,-1"],
        vec!["classify", &fam, "--param", "lambda=0"],
        vec!["classify", &fam],
        vec!["stability", &p2],
        vec!["stability", &triv],
        vec!["asymptotic", &p2, "--divisor", "2,3"],
        vec!["asymptotic", &fam, "--assume-cyclic"],
        vec!["limit", &fam, "--param", "lambda=0"],
        vec!["sweep", &fam, "--param", "lambda=1,0"],
    ];
    for args in cases {
        let (c1, human, _) = cli(&args);
        let mut with_json = args.clone();
        with_json.push("--json");
        let (c2, json, _) = cli(&with_json);
        assert_eq!(c1, c2, "{args:?}");
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["verdict"].as_str().unwrap(), human_verdict(&human), "{args:?}");
    }
}

#[test]
fn worked_examples_through_the_cli() {
    let (code, out, _) = cli(&["validate", &fixture("p2xp1.monad.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(human_verdict(&out), "valid");

    let (code, out, _) = cli(&["cohomology", "--space", "PxP:2,1", "--degree=-1,-1", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["h"], serde_json::json!([0, 0, 0, 0]));

    let (code, out, _) = cli(&["sweep", &fixture("p3_family.monad.json"), "--param", "lambda=1,0.5,10,0", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    for r in &rows[..3] {
        assert_eq!(r["class"], "locally_free");
        assert_eq!(r["stable"], "stable");
    }
    assert_eq!(rows[3]["class"], "torsion_free");
    assert_eq!(rows[3]["stable"], Value::Null);
    assert_eq!(rows[3]["limit"], "asymptotically_semistable");
}

#[test]
fn exit_codes() {
    let fam = fixture("p3_family.monad.json");
    let missing = fixture("no_such.monad.json");
    assert_eq!(cli(&["validate", &missing]).0, EXIT_INPUT);
    assert_eq!(cli(&["validate", &fam, "--param", "lambda=abc"]).0, EXIT_INPUT);
    assert_eq!(cli(&["validate", &fam, "--param", "z1=2"]).0, EXIT_INPUT);
    assert_eq!(cli(&["asymptotic", &fam, "--divisor", "0"]).0, EXIT_INPUT);
    assert_eq!(cli(&["asymptotic", &fam, "--divisor", "4,1"]).0, EXIT_INPUT);
    assert_eq!(cli(&["limit", &fixture("p2xp1.monad.json")]).0, EXIT_INPUT);
    assert_eq!(cli(&["cohomology", "--space", "P:3", "--degree", "1,1"]).0, EXIT_INPUT);
    assert_eq!(cli(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(cli(&["stability", &fixture("hirzebruch.monad.json")]).0, EXIT_INPUT);

    let (code, out, _) = cli(&["stability", &fixture("trivial.monad.json"), "--json"]);
    assert_eq!(code, EXIT_INCONCLUSIVE);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "inconclusive");
    assert!(v["failure"].as_str().unwrap().contains("h^0"));
    assert_eq!(v["steps"].as_array().unwrap().last().unwrap()["operation"], "h0_cohomology_bundle");

    assert_eq!(cli(&["stability", &fixture("p2xp1_planted.monad.json")]).0, EXIT_INCONCLUSIVE);
    assert_eq!(cli(&["classify", &fam, "--param", "lambda=0"]).0, EXIT_OK);
    assert_eq!(cli(&["invariants", &fixture("hirzebruch.monad.json")]).0, EXIT_OK);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_linmonad");
    let status = std::process::Command::new(bin)
        .args(["validate", &fixture("p2xp1.monad.json")])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    let status = std::process::Command::new(bin)
        .args(["validate", "/nonexistent.monad.json"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_INPUT));
    assert!(String::from_utf8_lossy(&status.stderr).contains("cannot read"));
}
