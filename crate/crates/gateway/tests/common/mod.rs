#![allow(dead_code)]

use fedwalk_gateway::{Gateway, GatewayConfig};
use fedwalk_mockinfra::{serve_all, FixtureSet, MockInfra, MockPorts, Monolith};

pub struct Env {
    pub mocks: MockInfra,
    pub gateway: Gateway,
    pub config: GatewayConfig,
    pub fixtures: FixtureSet,
}

pub fn start() -> Env {
    let fixtures = FixtureSet::canonical().expect("canonical fixtures load");
    let mocks = serve_all(&fixtures, MockPorts::ephemeral()).expect("mocks start");
    let config = GatewayConfig::parse(&mocks.gateway_config()).expect("mock config parses");
    let gateway = Gateway::from_config(&config).expect("gateway builds");
    Env { mocks, gateway, config, fixtures }
}

pub fn monolith(env: &Env) -> Monolith {
    Monolith::new(&env.fixtures)
}
