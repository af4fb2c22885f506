//! Federated query corpus: hand-written queries plus seeded random ones
//! drawn from the merged schema.

use fedwalk_core::graphql::{print_query, Document, Field, Operation, Schema, SelectionSet, TypeRef, Value, VariableDef};
use indexmap::IndexMap;
use rand::rngs::StdRng;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use serde_json::{json, Map, Value as Json};

use crate::oracle::merged_schema;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusQuery {
    pub name: String,
    pub query: String,
    pub variables: Map<String, Json>,
}

impl CorpusQuery {
    fn new(name: &str, query: &str, variables: Json) -> CorpusQuery {
        let variables = match variables {
            Json::Object(m) => m,
            _ => Map::new(),
        };
        CorpusQuery { name: name.into(), query: query.into(), variables }
    }
}

pub const SHOWCASE_QUERY: &str = "query ($doi: ID) { work(id: $doi) { doi citationCount comparison { doi title studies { id label r0 countryCode paper { id doi publisher publicationYear } location { geonameId name countryCode continentCode } } } } }";

pub const ASIA_QUERY: &str = "query ($region: String) { countriesOf(continentCode: $region) { geonameId countryCode name } }";

pub fn hand_written() -> Vec<CorpusQuery> {
    let paper = json!({"doi": "10.1101/2020.03.08.20030643"});
    vec![
        CorpusQuery::new("showcase", SHOWCASE_QUERY, paper.clone()),
        CorpusQuery::new("asia-countries", ASIA_QUERY, json!({"region": "AS"})),
        CorpusQuery::new("citation-only", r#"{ work(id: "10.1101/2020.03.08.20030643") { citationCount publisher } }"#, json!({})),
        CorpusQuery::new("link-key-only", r#"{ work(id: "10.1101/2020.03.08.20030643") { doi comparisonDoi } }"#, json!({})),
        CorpusQuery::new(
            "aliased-link",
            r#"{ w: work(id: "10.5555/inc.2020.002") { t: title cmp: comparison { title studies { label location { name } } } } }"#,
            json!({}),
        ),
        CorpusQuery::new(
            "no-comparison",
            r#"{ work(id: "10.5555/unlinked.2019.7") { title comparison { title } } }"#,
            json!({}),
        ),
        CorpusQuery::new("unknown-work", r#"{ work(id: "10.9999/none") { title comparison { title } } }"#, json!({})),
        CorpusQuery::new(
            "statement-only",
            r#"{ comparisonByDoi(doi: "10.48366/r44930") { title researchField creators { name orcid } studies { r0 confidenceIntervalLow confidenceIntervalHigh } } }"#,
            json!({}),
        ),
        CorpusQuery::new(
            "case-varied-doi",
            r#"{ comparisonByDoi(doi: "10.48366/R44930") { id doi papers { publisher } } }"#,
            json!({}),
        ),
        CorpusQuery::new(
            "studies-to-gazetteer",
            r#"{ comparisonByDoi(doi: "10.48366/r50001") { studies { label locationGeonameId location { name continentCode featureClass } } } }"#,
            json!({}),
        ),
        CorpusQuery::new(
            "three-roots",
            r#"query ($d: ID, $c: String) { work(id: $d) { title } paperByDoi(doi: $d) { publisher } continent(code: $c) { name geonameId } }"#,
            json!({"d": "10.1101/2020.03.08.20030643", "c": "AS"}),
        ),
        CorpusQuery::new(
            "batched-works",
            r#"{ works(ids: ["10.5555/inc.2020.001", "10.9999/none", "10.5555/inc.2020.002"]) { doi citationCount comparison { doi } } }"#,
            json!({}),
        ),
        CorpusQuery::new("search-iran", r#"{ searchPlace(name: "Iran", maxRows: 5) { name countryCode } }"#, json!({})),
        CorpusQuery::new("places", r#"{ places(geonameIds: ["130758", "1", "1791247"]) { name } }"#, json!({})),
        CorpusQuery::new(
            "typename",
            r#"{ __typename work(id: "10.48366/r44930") { __typename doi comparison { __typename title } } }"#,
            json!({}),
        ),
        CorpusQuery::new(
            "same-comparison-twice",
            r#"{ a: work(id: "10.5555/inc.2020.001") { comparison { title } } b: work(id: "10.5555/inc.2020.002") { comparison { title } } }"#,
            json!({}),
        ),
    ]
}

fn string_pool(field: &str) -> &'static [&'static str] {
    match field {
        "work" | "works" | "paperByDoi" => &[
            "10.1101/2020.03.08.20030643",
            "10.5555/inc.2020.001",
            "10.5555/inc.2020.002",
            "10.5555/unlinked.2019.7",
            "10.48366/r44930",
            "10.48366/r50001",
            "10.9999/none",
        ],
        "comparisonByDoi" | "comparisonsByDoi" => &["10.48366/r44930", "10.48366/r50001", "10.48366/R44930", "10.9999/none"],
        "comparison" => &["R44930", "R50001", "NOPE"],
        "paper" => &["PAP2", "PAP11", "PAP5", "NOPE"],
        "continent" | "countriesOf" => &["AS", "EU", "OC", "XX"],
        "place" | "places" => &["130758", "1791247", "6255147", "2921044", "1"],
        "searchPlace" => &["Iran", "I", "ch", "zzzz"],
        _ => &["x"],
    }
}

struct Generator<'a> {
    schema: &'a Schema,
    rng: StdRng,
    variables: Vec<VariableDef>,
    values: Map<String, Json>,
}

fn to_json(v: &Value) -> Json {
    match v {
        Value::String(s) => Json::String(s.clone()),
        Value::Int(i) => Json::from(*i),
        Value::List(items) => Json::Array(items.iter().map(to_json).collect()),
        _ => Json::Null,
    }
}

impl Generator<'_> {
    fn arg_value(&mut self, root: &str, arg: &str, ty: &TypeRef) -> Value {
        if arg == "maxRows" {
            return Value::Int(self.rng.random_range(1..=4));
        }
        let pool = string_pool(root);
        if matches!(ty.nullable(), TypeRef::List(_)) {
            let n = self.rng.random_range(1..=3);
            let picked: Vec<Value> = pool.choose_multiple(&mut self.rng, n).map(|s| Value::String(s.to_string())).collect();
            return Value::List(picked);
        }
        Value::String(pool.choose(&mut self.rng).expect("non-empty pool").to_string())
    }

    fn selection(&mut self, type_name: &str, depth: usize) -> SelectionSet {
        let t = &self.schema.types[type_name];
        let mut fields: Vec<_> = t.fields.values().cloned().collect();
        fields.shuffle(&mut self.rng);
        if self.rng.random_bool(0.7) {
            // nested fields first, so cross-source links show up often
            fields.sort_by_key(|f| f.is_leaf());
        }
        let want = self.rng.random_range(1..=fields.len().min(5));
        let mut out = Vec::new();
        for def in fields {
            if out.len() >= want {
                break;
            }
            let leaf = def.is_leaf();
            if !leaf && depth == 0 {
                continue;
            }
            let alias = self.rng.random_bool(0.1).then(|| format!("a_{}", def.name));
            let selection_set = (!leaf).then(|| self.selection(def.ty.base(), depth - 1));
            out.push(Field { alias, name: def.name.clone(), arguments: IndexMap::new(), selection_set });
        }
        if out.is_empty() || self.rng.random_bool(0.05) {
            out.push(Field { alias: None, name: "__typename".into(), arguments: IndexMap::new(), selection_set: None });
        }
        SelectionSet::new(out)
    }

    fn root_field(&mut self, name: &str, index: usize) -> Field {
        let def = self.schema.root().fields[name].clone();
        let mut arguments = IndexMap::new();
        for (arg, ty) in &def.args {
            let value = self.arg_value(name, arg, ty);
            if self.rng.random_bool(0.3) {
                let var = format!("v{index}_{arg}");
                self.values.insert(var.clone(), to_json(&value));
                self.variables.push(VariableDef { name: var.clone(), ty: ty.clone(), default: None });
                arguments.insert(arg.clone(), Value::Variable(var));
            } else {
                arguments.insert(arg.clone(), value);
            }
        }
        let selection_set = Some(self.selection(def.ty.base(), 4));
        Field { alias: Some(format!("q{index}")), name: name.to_string(), arguments, selection_set }
    }
}

/// `count` random queries over the merged schema, reproducible from `seed`.
pub fn generated(seed: u64, count: usize) -> Vec<CorpusQuery> {
    let schema = merged_schema();
    let roots: Vec<String> = schema.root().fields.keys().cloned().collect();
    let linked: Vec<String> = ["work", "works", "comparisonByDoi", "comparisonsByDoi", "comparison"].map(String::from).to_vec();
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut g = Generator { schema: &schema, rng: StdRng::seed_from_u64(rng.random()), variables: Vec::new(), values: Map::new() };
            let n = g.rng.random_range(1..=3);
            let fields: Vec<Field> = (0..n)
                .map(|k| {
                    let pool: &[String] = if g.rng.random_bool(0.6) { &linked } else { &roots };
                    let root = pool.choose(&mut g.rng).expect("roots").clone();
                    g.root_field(&root, k)
                })
                .collect();
            let operation = Operation { name: None, variables: g.variables.clone(), selection_set: SelectionSet::new(fields) };
            CorpusQuery { name: format!("generated-{i}"), query: print_query(&Document { operation }), variables: g.values }
        })
        .collect()
}

/// The full corpus used by the oracle-equivalence checks.
pub fn corpus() -> Vec<CorpusQuery> {
    let mut all = hand_written();
    all.extend(generated(0x0f3d_3a1c, 24));
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use fedwalk_core::graphql::{parse_query, validate};

    #[test]
    fn every_corpus_query_is_valid() {
        let schema = merged_schema();
        let all = corpus();
        assert!(all.len() >= 25);
        for q in &all {
            let doc = parse_query(&q.query).unwrap_or_else(|e| panic!("{}: {e}\n{}", q.name, q.query));
            assert_eq!(validate(&doc, &schema), vec![], "{}", q.query);
        }
        assert_eq!(generated(7, 5), generated(7, 5));
    }
}
