//! Ontology lookup over the fixture classes.

use serde_json::{json, Value as Json};

use crate::fixtures::OntologyClass;

/// Label matches ranked exact first, then prefix, then substring; ties keep
/// fixture order.
pub fn search<'a>(classes: &'a [OntologyClass], text: &str) -> Vec<&'a OntologyClass> {
    let needle = text.trim().to_lowercase();
    if needle.is_empty() {
        return Vec::new();
    }
    let mut hits: Vec<(u8, usize, &OntologyClass)> = classes
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let label = c.label.to_lowercase();
            let rank = if label == needle {
                0
            } else if label.starts_with(&needle) {
                1
            } else if label.contains(&needle) {
                2
            } else {
                return None;
            };
            Some((rank, i, c))
        })
        .collect();
    hits.sort_by_key(|(rank, i, _)| (*rank, *i));
    hits.into_iter().map(|(_, _, c)| c).collect()
}

/// `{"response": {"numFound": n, "docs": [...]}}`
pub fn search_json(hits: &[&OntologyClass]) -> Json {
    json!({
        "response": {
            "numFound": hits.len(),
            "docs": hits.iter().map(|c| json!({
                "iri": c.iri,
                "label": c.label,
                "ontology_name": c.ontology_name,
                "ontology_prefix": c.ontology_prefix,
                "obo_id": c.obo_id,
                "description": c.description,
            })).collect::<Vec<_>>(),
        }
    })
}
