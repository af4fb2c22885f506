mod common;

use common::oracle::{read_publisher_csv, Truth};
use common::{cli, start};
use fedwalk_core::doi::canonical_xml;
use fedwalk_mockinfra::corpus::SHOWCASE_QUERY;
use fedwalk_mockinfra::{canonical_fixtures_dir, MockService};
use serde_json::Value as Json;

const PAPER: &str = "10.1101/2020.03.08.20030643";
const VARS: &str = r#"{"doi": "10.1101/2020.03.08.20030643"}"#;

#[test]
fn query_prints_the_merged_response() {
    let env = start();
    let o = cli(&["query", SHOWCASE_QUERY, "--variables", VARS, "--endpoint", &env.endpoint()]);
    assert_eq!(o.code, 0, "{o:?}");
    let v: Json = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["data"]["work"]["citationCount"], 12);
    assert!(v["extensions"]["provenance"].is_object());
}

#[test]
fn query_reads_files_and_writes_csv() {
    let env = start();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("q.graphql");
    std::fs::write(&file, r#"{ comparisonByDoi(doi: "10.48366/r44930") { studies { id r0 } } }"#).unwrap();
    let o = cli(&["query", file.to_str().unwrap(), "--output", "csv", "--endpoint", &env.endpoint()]);
    assert_eq!(o.code, 0, "{o:?}");
    let mut lines = o.stdout.lines();
    assert_eq!(lines.next(), Some("id,r0"));
    assert_eq!(lines.count(), 10);
}

#[test]
fn invalid_query_exits_2() {
    let env = start();
    let o = cli(&["query", "{ work(id: \"x\") { nope } }", "--endpoint", &env.endpoint()]);
    assert_eq!(o.code, 2, "{o:?}");
    assert!(o.stderr.contains("nope"), "{o:?}");
    let o = cli(&["query", "{ work(", "--endpoint", &env.endpoint()]);
    assert_eq!(o.code, 2, "{o:?}");
}

#[test]
fn bad_variables_are_a_usage_error() {
    let o = cli(&["query", "{ a }", "--variables", "[1]", "--endpoint", "http://127.0.0.1:9"]);
    assert_eq!(o.code, 2, "{o:?}");
}

#[test]
fn unreachable_gateway_exits_1() {
    let o = cli(&["query", "{ a }", "--endpoint", "http://127.0.0.1:9/graphql"]);
    assert_eq!(o.code, 1, "{o:?}");
    assert!(o.stderr.contains("unreachable"), "{o:?}");
}

#[test]
fn gazetteer_down_is_partial() {
    let mut env = start();
    env.mocks.stop(MockService::Gazetteer);
    let o = cli(&["query", SHOWCASE_QUERY, "--variables", VARS, "--endpoint", &env.endpoint()]);
    assert_eq!(o.code, 2, "{o:?}");
    let v: Json = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["data"]["work"]["citationCount"], 12);
    assert!(v["data"]["work"]["comparison"]["studies"][0]["location"].is_null());
}

#[test]
fn analyze_r0_matches_fixture_truth() {
    let env = start();
    let truth = Truth::load(&canonical_fixtures_dir(), "R44930");
    for region in [None, Some("AS"), Some("EU"), Some("NA")] {
        let dir = tempfile::tempdir().unwrap();
        let mut args = vec!["analyze-r0", PAPER, "--output", "json", "--endpoint"];
        let ep = env.endpoint();
        args.push(&ep);
        let out_dir = dir.path().to_str().unwrap().to_string();
        args.extend(["--out-dir", &out_dir]);
        if let Some(r) = region {
            args.extend(["--region", r]);
        }
        let o = cli(&args);
        assert_eq!(o.code, 0, "{o:?}");
        let report: Json = serde_json::from_str(&o.stdout).unwrap();
        let expected = truth.mean_r0(region).unwrap();
        assert!((report["meanR0"].as_f64().unwrap() - expected).abs() < 1e-9, "{region:?}");
        assert_eq!(read_publisher_csv(&dir.path().join("publisher_distribution.csv")), truth.publishers(region));
        let rows = std::fs::read_to_string(dir.path().join("r0_values.csv")).unwrap();
        assert_eq!(rows.lines().next(), Some("study_id,r0,country_code"));
        assert_eq!(rows.lines().count() - 1, truth.in_region(region).iter().filter(|s| s.r0.is_some()).count());
    }
}

#[test]
fn analyze_r0_accepts_the_comparison_doi() {
    let env = start();
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["analyze-r0", "10.48366/r44930", "--endpoint", &env.endpoint(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.code, 0, "{o:?}");
    assert!(o.stdout.contains("meanR0: 3.02"), "{o:?}");
}

#[test]
fn analyze_r0_errors() {
    let env = start();
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = cli(&["analyze-r0", "10.9999/none", "--endpoint", &env.endpoint(), "--out-dir", d]);
    assert_eq!(o.code, 1, "{o:?}");
    assert!(o.stderr.contains("not found"), "{o:?}");
    let o = cli(&["analyze-r0", PAPER, "--region", "XX", "--endpoint", &env.endpoint(), "--out-dir", d]);
    assert_eq!(o.code, 2, "{o:?}");
}

#[test]
fn publish_writes_golden_xml_and_registers() {
    let env = start();
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let fixtures = canonical_fixtures_dir();
    let registry = env.mocks.base_url(MockService::Metadata);
    let base = ["publish", "R44930", "10.48366/r44930", "--fixtures", fixtures.to_str().unwrap(), "--registry", &registry, "--out-dir", d];
    let o = cli(&base);
    assert_eq!(o.code, 0, "{o:?}");
    assert!(o.stdout.contains("is draft"), "{o:?}");
    let mut publish = base.to_vec();
    publish.push("--publish");
    let o = cli(&publish);
    assert_eq!(o.code, 0, "{o:?}");
    assert!(o.stdout.contains("is findable"), "{o:?}");

    let written = std::fs::read_to_string(dir.path().join("r44930.xml")).unwrap();
    let golden = include_str!("../../core/tests/golden/r44930.xml");
    assert_eq!(canonical_xml(&written).unwrap(), canonical_xml(golden).unwrap());
}

#[test]
fn publish_conflict_exits_1() {
    let env = start();
    let dir = tempfile::tempdir().unwrap();
    let fixtures = canonical_fixtures_dir();
    let registry = env.mocks.base_url(MockService::Metadata);
    let d = dir.path().to_str().unwrap();
    let args = |cmp: &'static str| {
        vec!["publish", cmp, "10.48366/r44930", "--fixtures", fixtures.to_str().unwrap(), "--registry", &registry, "--out-dir", d]
    };
    assert_eq!(cli(&args("R44930")).code, 0);
    // Same DOI for a different comparison.
    let o = cli(&args("R50001"));
    assert_eq!(o.code, 1, "{o:?}");
    assert!(o.stderr.contains("already registered"), "{o:?}");
}

#[test]
fn publish_uses_config_registry() {
    let env = start();
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("gw.conf");
    std::fs::write(&conf, env.mocks.gateway_config()).unwrap();
    let fixtures = canonical_fixtures_dir();
    let o = cli(&[
        "publish", "10.48366/r44930", "10.48366/r44930", "--fixtures", fixtures.to_str().unwrap(), "--config",
        conf.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{o:?}");
    let o = cli(&["publish", "R44930", "10.48366/r44930", "--fixtures", fixtures.to_str().unwrap()]);
    assert_eq!(o.code, 2, "{o:?}");
}

#[test]
fn live_smoke_needs_the_flag() {
    let o = cli(&["live-smoke"]);
    assert_eq!(o.code, 2, "{o:?}");
    assert!(o.stderr.contains("--live"));
}

#[test]
fn live_smoke_reports_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("live.conf");
    std::fs::write(
        &conf,
        "source.METADATA_GRAPH.endpoint = http://127.0.0.1:9/graphql\nsource.METADATA_GRAPH.kind = graphql\n",
    )
    .unwrap();
    let o = cli(&["live-smoke", "--live", "--config", conf.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{o:?}");
    assert!(o.stdout.contains("UNREACHABLE"), "{o:?}");
}

#[test]
fn shipped_configs_parse() {
    for f in ["mock.conf", "live.conf"] {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(f);
        fedwalk_gateway::GatewayConfig::load(&path).unwrap_or_else(|e| panic!("{f}: {e}"));
    }
}

#[test]
fn help_and_unknown_commands() {
    assert_eq!(cli(&["--help"]).code, 0);
    assert_eq!(cli(&["frobnicate"]).code, 2);
}
