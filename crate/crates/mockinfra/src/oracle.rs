//! Reference executor: one schema over the union of all fixtures, the two
//! cross-source fields resolved by reading the fixtures directly.

use std::sync::{Arc, RwLock};

use fedwalk_core::graphql::{run_request, FieldDef, FieldError, ResolveInfo, ResponseDocument, Resolvers, Schema, TypeRef};
use fedwalk_core::sources::{continent_id, gazetteer_schema};
use fedwalk_core::store::{comparison_by_doi, serve_statement_graph, StatementStore};
use fedwalk_core::Pid;
use serde_json::{json, Map, Value as Json};

use crate::fixtures::{FixtureSet, GazetteerEntry};
use crate::gazetteer::Gazetteer;
use crate::metadata::{serve_metadata_graph, MetadataGraph};

fn non_empty(s: &str) -> Json {
    if s.is_empty() {
        Json::Null
    } else {
        Json::String(s.to_string())
    }
}

fn place(r: &GazetteerEntry) -> Json {
    json!({
        "geonameId": r.geoname_id.to_string(),
        "name": r.name,
        "countryCode": non_empty(&r.country_code),
        "continentCode": non_empty(&r.continent_code),
        "featureClass": non_empty(&r.fcl),
    })
}

fn gazetteer_resolvers(g: Arc<Gazetteer>) -> Resolvers {
    let mut r = Resolvers::new();
    let gz = g.clone();
    r.insert("Query", "continent", move |info: &ResolveInfo<'_>| {
        let code = info.arg_str("code").unwrap_or_default();
        let id = continent_id(&code).ok_or_else(|| FieldError::new(format!("unknown continent code `{code}`")))?;
        gz.get(id).map(place).ok_or_else(|| FieldError::new(format!("unknown geonameId {id}")))
    });
    let gz = g.clone();
    r.insert("Query", "countriesOf", move |info: &ResolveInfo<'_>| {
        let code = info.arg_str("continentCode").unwrap_or_default();
        let id = continent_id(&code).ok_or_else(|| FieldError::new(format!("unknown continent code `{code}`")))?;
        let kids = gz.children(id).ok_or_else(|| FieldError::new(format!("unknown geonameId {id}")))?;
        Ok(Json::Array(kids.into_iter().map(place).collect()))
    });
    let gz = g.clone();
    r.insert("Query", "place", move |info: &ResolveInfo<'_>| {
        let id = info.arg_i64("geonameId").filter(|i| *i > 0).ok_or_else(|| FieldError::new("bad geonameId"))?;
        gz.get(id as u64).map(place).ok_or_else(|| FieldError::new(format!("unknown geonameId {id}")))
    });
    let gz = g.clone();
    r.insert("Query", "places", move |info: &ResolveInfo<'_>| {
        let ids = match info.arg("geonameIds") {
            Some(Json::Array(a)) => a.clone(),
            Some(one) => vec![one.clone()],
            None => Vec::new(),
        };
        Ok(Json::Array(
            ids.iter()
                .map(|v| {
                    let id = match v {
                        Json::String(s) => s.parse::<u64>().ok(),
                        Json::Number(n) => n.as_u64(),
                        _ => None,
                    };
                    id.and_then(|i| gz.get(i)).map(place).unwrap_or(Json::Null)
                })
                .collect(),
        ))
    });
    r.insert("Query", "searchPlace", move |info: &ResolveInfo<'_>| {
        let name = info.arg_str("name").unwrap_or_default();
        let max = info.arg_i64("maxRows").unwrap_or(10).clamp(1, 100) as usize;
        Ok(Json::Array(g.search(&name, max).into_iter().map(place).collect()))
    });
    r
}

/// The merged schema the gateway is expected to compose.
pub fn merged_schema() -> Schema {
    let parts = [
        fedwalk_core::sources::metadata_graph_schema(),
        fedwalk_core::sources::statement_graph_schema(),
        gazetteer_schema(),
    ];
    let mut merged = parts[0].clone();
    for part in &parts[1..] {
        for (name, t) in &part.types {
            match merged.types.get_mut(name) {
                Some(existing) => existing.fields.extend(t.fields.clone()),
                None => {
                    merged.types.insert(name.clone(), t.clone());
                }
            }
        }
    }
    let add = |s: &mut Schema, on: &str, field: &str, ty: &str| {
        let t = s.types.get_mut(on).expect("linked type exists");
        t.fields.insert(field.to_string(), FieldDef::new(field, TypeRef::named(ty)));
    };
    add(&mut merged, "Work", "comparison", "Comparison");
    add(&mut merged, "Study", "location", "Place");
    merged.check().expect("merged schema is consistent");
    merged
}

pub struct Monolith {
    schema: Schema,
    resolvers: Resolvers,
}

impl Monolith {
    pub fn new(fixtures: &FixtureSet) -> Monolith {
        let store = Arc::new(fixtures.statements.clone());
        let graph = Arc::new(RwLock::new(MetadataGraph::new(&fixtures.works)));
        let gazetteer = Arc::new(Gazetteer::new(fixtures.gazetteer.clone()));
        let mut resolvers = serve_metadata_graph(graph).1;
        resolvers.extend(serve_statement_graph(store.clone()).1);
        resolvers.extend(gazetteer_resolvers(gazetteer.clone()));
        resolvers.insert("Work", "comparison", link_comparison(store));
        let gz = gazetteer;
        resolvers.insert("Study", "location", move |info: &ResolveInfo<'_>| {
            let Some(id) = key(info.parent, "locationGeonameId").and_then(|k| k.parse::<u64>().ok()) else {
                return Ok(Json::Null);
            };
            Ok(gz.get(id).map(place).unwrap_or(Json::Null))
        });
        Monolith { schema: merged_schema(), resolvers }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn execute(&self, query: &str, variables: &Map<String, Json>) -> ResponseDocument {
        run_request(&self.schema, &self.resolvers, query, variables)
    }
}

fn key(parent: &Json, field: &str) -> Option<String> {
    match parent.get(field)? {
        Json::String(s) => Some(s.clone()),
        Json::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn link_comparison(store: Arc<StatementStore>) -> impl Fn(&ResolveInfo<'_>) -> Result<Json, FieldError> + Send + Sync {
    move |info: &ResolveInfo<'_>| {
        let Some(doi) = key(info.parent, "comparisonDoi").and_then(|d| Pid::doi(&d).ok()) else {
            return Ok(Json::Null);
        };
        Ok(comparison_by_doi(&store, &doi)
            .map(|c| fedwalk_core::store::comparison_json(&store, &c))
            .unwrap_or(Json::Null))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn showcase_query_against_the_monolith() {
        let m = Monolith::new(&FixtureSet::canonical().unwrap());
        let q = r#"{ work(id: "10.1101/2020.03.08.20030643") { citationCount comparison { title studies { r0 location { countryCode } } } } }"#;
        let r = m.execute(q, &Map::new());
        assert!(r.errors.is_empty(), "{:?}", r.errors);
        let data = r.data.unwrap();
        assert_eq!(data["work"]["citationCount"], 12);
        let studies = data["work"]["comparison"]["studies"].as_array().unwrap();
        assert_eq!(studies.len(), 10);
        assert_eq!(studies[0]["location"]["countryCode"], "CN");
    }
}
