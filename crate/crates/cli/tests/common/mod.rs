#![allow(dead_code)]

pub mod oracle;

use std::sync::Arc;

use fedwalk_gateway::server::{spawn, GatewayHandle};
use fedwalk_gateway::{Gateway, GatewayConfig};
use fedwalk_mockinfra::{serve_all, FixtureSet, MockInfra, MockPorts};

pub struct Env {
    pub mocks: MockInfra,
    pub gateway: GatewayHandle,
    pub config: GatewayConfig,
    pub fixtures: FixtureSet,
}

impl Env {
    pub fn endpoint(&self) -> String {
        self.gateway.graphql_url()
    }
}

/// Mocks on the canonical fixtures plus a gateway over HTTP, all on
/// ephemeral ports.
pub fn start() -> Env {
    let fixtures = FixtureSet::canonical().expect("canonical fixtures load");
    let mocks = serve_all(&fixtures, MockPorts::ephemeral()).expect("mocks start");
    let config = GatewayConfig::parse(&mocks.gateway_config()).expect("mock config parses");
    let gateway = Arc::new(Gateway::from_config(&config).expect("gateway builds"));
    let gateway = spawn(gateway, "127.0.0.1:0").expect("gateway listens");
    Env { mocks, gateway, config, fixtures }
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl std::fmt::Debug for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}\n--- stdout\n{}\n--- stderr\n{}", self.code, self.stdout, self.stderr)
    }
}

pub fn cli(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("fedwalk").chain(args.iter().copied());
    let code = fedwalk_cli::run(argv, &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}
