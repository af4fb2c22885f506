use std::fs;

use fedwalk_mockinfra::{
    canonical_fixtures_dir, load_fixtures, serve_all, FixtureIntegrityError, FixtureSet, MockPorts, MockService, ServeError,
};
use serde_json::{json, Value};

fn get(url: &str) -> (u16, Value) {
    let mut resp = ureq::get(url).config().http_status_as_error(false).build().call().unwrap();
    let status = resp.status().as_u16();
    (status, serde_json::from_str(&resp.body_mut().read_to_string().unwrap()).unwrap())
}

fn post(url: &str, body: &Value) -> Value {
    let mut resp = ureq::post(url).header("content-type", "application/json").send(body.to_string()).unwrap();
    serde_json::from_str(&resp.body_mut().read_to_string().unwrap()).unwrap()
}

#[test]
fn every_mock_answers() {
    let fixtures = FixtureSet::canonical().unwrap();
    let infra = serve_all(&fixtures, MockPorts::ephemeral()).unwrap();
    for s in [MockService::Statement, MockService::Metadata, MockService::Gazetteer, MockService::Ontology] {
        let (status, body) = get(&format!("{}/health", infra.base_url(s)));
        assert_eq!(status, 200, "{s:?}");
        assert_eq!(body["status"], json!("ok"));
    }
    let r = post(
        &infra.graphql_url(MockService::Statement),
        &json!({"query": "{ comparisonByDoi(doi: \"10.48366/r44930\") { title } }"}),
    );
    assert_eq!(r["data"]["comparisonByDoi"]["title"], json!("COVID-19 Reproductive Number Estimates"));
    let r = post(
        &infra.graphql_url(MockService::Metadata),
        &json!({"query": "query ($d: ID) { work(id: $d) { citationCount } }", "variables": {"d": "10.1101/2020.03.08.20030643"}}),
    );
    assert_eq!(r["data"]["work"]["citationCount"], json!(12));

    let base = infra.base_url(MockService::Gazetteer);
    let (_, kids) = get(&format!("{base}/childrenJSON?geonameId=6255147"));
    assert_eq!(kids["totalResultsCount"], json!(7));
    let (_, missing) = get(&format!("{base}/getJSON?geonameId=42"));
    assert_eq!(missing["status"]["value"], json!(15));
    let (_, found) = get(&format!("{base}/searchJSON?name_startsWith=Iran&maxRows=5"));
    assert_eq!(found["geonames"][0]["geonameId"], json!(130758));

    let (_, hits) = get(&format!("{}/search?q=confidence%20interval", infra.base_url(MockService::Ontology)));
    assert_eq!(hits["response"]["docs"][0]["obo_id"], json!("STATO:0000196"));
}

#[test]
fn second_start_on_same_port_is_refused() {
    let fixtures = FixtureSet::canonical().unwrap();
    let first = serve_all(&fixtures, MockPorts::ephemeral()).unwrap();
    let taken = first.addr(MockService::Statement).port();
    let ports = MockPorts { statement: taken, metadata: 0, gazetteer: 0, ontology: 0 };
    match serve_all(&fixtures, ports) {
        Err(ServeError::PortInUse(p)) => assert_eq!(p, taken),
        other => panic!("expected PortInUse, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn stopped_mock_refuses_connections() {
    let fixtures = FixtureSet::canonical().unwrap();
    let mut infra = serve_all(&fixtures, MockPorts::ephemeral()).unwrap();
    let url = format!("{}/health", infra.base_url(MockService::Gazetteer));
    infra.stop(MockService::Gazetteer);
    assert!(!infra.is_running(MockService::Gazetteer));
    assert!(ureq::get(&url).call().is_err());
}

fn copy_fixtures() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(canonical_fixtures_dir()).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    dir
}

#[test]
fn empty_directory_is_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_fixtures(dir.path()), Err(FixtureIntegrityError::MissingFile(_))));
}

#[test]
fn study_with_unknown_geoname_is_dangling() {
    let dir = copy_fixtures();
    let path = dir.path().join("statements.tsv");
    let text = fs::read_to_string(&path).unwrap().replace("https://www.geonames.org/130758", "https://www.geonames.org/9999999");
    fs::write(&path, text).unwrap();
    assert!(matches!(load_fixtures(dir.path()), Err(FixtureIntegrityError::Dangling(_))));
}

#[test]
fn malformed_json_is_reported_with_file() {
    let dir = copy_fixtures();
    fs::write(dir.path().join("gazetteer.json"), "{ not json").unwrap();
    match load_fixtures(dir.path()) {
        Err(FixtureIntegrityError::Malformed { file, .. }) => assert!(file.ends_with("gazetteer.json")),
        other => panic!("{:?}", other.map(|_| ())),
    }
}

#[test]
fn copied_fixtures_load_identically() {
    let dir = copy_fixtures();
    let a = load_fixtures(dir.path()).unwrap();
    let b = FixtureSet::canonical().unwrap();
    assert_eq!(a.works, b.works);
    assert_eq!(a.gazetteer, b.gazetteer);
}
