//! Mock upstreams for the fedwalk gateway: a statement graph, a metadata
//! graph with a DOI registry, a GeoNames-style gazetteer and an ontology
//! lookup service, all seeded from a fixture directory.

pub mod corpus;
pub mod fixtures;
pub mod gazetteer;
pub mod metadata;
pub mod ontology;
pub mod oracle;
pub mod registry;
pub mod server;

pub use fixtures::{canonical_fixtures_dir, load_fixtures, FixtureIntegrityError, FixtureSet};
pub use oracle::Monolith;
pub use server::{serve_all, spawn_router, spawn_status_server, MockInfra, MockPorts, MockService, ServeError, ServerHandle};
