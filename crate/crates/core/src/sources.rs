//! Bundled schemas of the three federated sources.

use crate::graphql::Schema;

pub const STATEMENT_GRAPH_SDL: &str = crate::store::STATEMENT_GRAPH_SDL;
pub const METADATA_GRAPH_SDL: &str = include_str!("../schemas/metadata_graph.graphql");
pub const GAZETTEER_SDL: &str = include_str!("../schemas/gazetteer.graphql");

/// GeoNames feature ids of the continents, keyed by continent code.
pub const CONTINENTS: [(&str, u64); 7] = [
    ("AF", 6255146),
    ("AS", 6255147),
    ("EU", 6255148),
    ("NA", 6255149),
    ("OC", 6255151),
    ("SA", 6255150),
    ("AN", 6255152),
];

pub const EARTH_GEONAME_ID: u64 = 6295630;

pub fn continent_id(code: &str) -> Option<u64> {
    CONTINENTS.iter().find(|(c, _)| c.eq_ignore_ascii_case(code.trim())).map(|(_, id)| *id)
}

pub fn statement_graph_schema() -> Schema {
    Schema::parse_sdl(STATEMENT_GRAPH_SDL).expect("bundled schema is valid")
}

pub fn metadata_graph_schema() -> Schema {
    Schema::parse_sdl(METADATA_GRAPH_SDL).expect("bundled schema is valid")
}

pub fn gazetteer_schema() -> Schema {
    Schema::parse_sdl(GAZETTEER_SDL).expect("bundled schema is valid")
}

#[cfg(test)]
mod tests {
    #[test]
    fn bundled_schemas_parse() {
        super::statement_graph_schema();
        super::metadata_graph_schema();
        super::gazetteer_schema();
    }
}
