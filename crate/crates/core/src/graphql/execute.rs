use std::collections::HashMap;
use std::sync::Arc;

use serde_json::{Map, Value as Json};
use thiserror::Error;

use super::ast::*;
use super::response::{GraphQLError, PathSegment, ResponseDocument};
use super::schema::{is_scalar, Schema};

/// Context handed to a field resolver.
pub struct ResolveInfo<'a> {
    pub parent_type: &'a str,
    pub field: &'a Field,
    pub parent: &'a Json,
    pub args: &'a Map<String, Json>,
    pub path: &'a [PathSegment],
}

impl ResolveInfo<'_> {
    pub fn arg(&self, name: &str) -> Option<&Json> {
        self.args.get(name).filter(|v| !v.is_null())
    }

    /// Argument as a string; integers are rendered in decimal so ID
    /// arguments accept both forms.
    pub fn arg_str(&self, name: &str) -> Option<String> {
        match self.arg(name)? {
            Json::String(s) => Some(s.clone()),
            Json::Number(n) => Some(n.to_string()),
            _ => None,
        }
    }

    pub fn arg_i64(&self, name: &str) -> Option<i64> {
        match self.arg(name)? {
            Json::Number(n) => n.as_i64(),
            Json::String(s) => s.parse().ok(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct FieldError {
    pub message: String,
    /// Copied into the `extensions` of the reported error.
    pub extensions: Option<Map<String, Json>>,
}

impl FieldError {
    pub fn new(message: impl Into<String>) -> FieldError {
        FieldError { message: message.into(), extensions: None }
    }

    pub fn with_extension(mut self, key: &str, value: impl Into<Json>) -> FieldError {
        self.extensions.get_or_insert_with(Map::new).insert(key.to_string(), value.into());
        self
    }
}

pub trait Resolver: Send + Sync {
    fn resolve(&self, info: &ResolveInfo<'_>) -> Result<Json, FieldError>;
}

impl<F> Resolver for F
where
    F: Fn(&ResolveInfo<'_>) -> Result<Json, FieldError> + Send + Sync,
{
    fn resolve(&self, info: &ResolveInfo<'_>) -> Result<Json, FieldError> {
        self(info)
    }
}

/// Resolver table keyed by `(type, field)`. Fields without an entry read the
/// same-named key of the parent object.
#[derive(Clone, Default)]
pub struct Resolvers {
    table: HashMap<(String, String), Arc<dyn Resolver>>,
}

impl Resolvers {
    pub fn new() -> Resolvers {
        Resolvers::default()
    }

    pub fn insert<R: Resolver + 'static>(&mut self, type_name: &str, field: &str, resolver: R) -> &mut Self {
        self.table.insert((type_name.to_string(), field.to_string()), Arc::new(resolver));
        self
    }

    pub fn insert_arc(&mut self, type_name: &str, field: &str, resolver: Arc<dyn Resolver>) -> &mut Self {
        self.table.insert((type_name.to_string(), field.to_string()), resolver);
        self
    }

    pub fn get(&self, type_name: &str, field: &str) -> Option<&Arc<dyn Resolver>> {
        self.table.get(&(type_name.to_string(), field.to_string()))
    }

    /// Adds every entry of `other`, replacing existing ones.
    pub fn extend(&mut self, other: Resolvers) {
        self.table.extend(other.table);
    }
}

impl std::fmt::Debug for Resolvers {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut keys: Vec<_> = self.table.keys().map(|(t, f)| format!("{t}.{f}")).collect();
        keys.sort();
        f.debug_struct("Resolvers").field("fields", &keys).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("variable `${0}` has no value and no default")]
    VariableMissing(String),
}

/// Resolves a validated document depth-first. Resolver failures null the
/// field and add an error; siblings still resolve.
pub fn execute(doc: &Document, schema: &Schema, resolvers: &Resolvers, variables: &Map<String, Json>) -> Result<ResponseDocument, ExecError> {
    let mut vars = Map::new();
    for def in &doc.operation.variables {
        let value = match variables.get(&def.name) {
            Some(v) => v.clone(),
            None => match &def.default {
                Some(d) => literal_to_json(d, &Map::new()),
                None => return Err(ExecError::VariableMissing(def.name.clone())),
            },
        };
        vars.insert(def.name.clone(), value);
    }
    let mut run = Run { schema, resolvers, vars, errors: Vec::new() };
    let root = Json::Object(Map::new());
    let mut path = Vec::new();
    let data = run.select(&schema.query_root, &root, doc.selection_set(), &mut path);
    Ok(ResponseDocument { data: Some(Json::Object(data)), errors: run.errors })
}

pub fn literal_to_json(value: &Value, vars: &Map<String, Json>) -> Json {
    match value {
        Value::Variable(v) => vars.get(v).cloned().unwrap_or(Json::Null),
        Value::Int(i) => Json::from(*i),
        Value::Float(f) => serde_json::Number::from_f64(*f).map(Json::Number).unwrap_or(Json::Null),
        Value::String(s) | Value::Enum(s) => Json::String(s.clone()),
        Value::Boolean(b) => Json::Bool(*b),
        Value::Null => Json::Null,
        Value::List(items) => Json::Array(items.iter().map(|i| literal_to_json(i, vars)).collect()),
    }
}

struct Run<'a> {
    schema: &'a Schema,
    resolvers: &'a Resolvers,
    vars: Map<String, Json>,
    errors: Vec<GraphQLError>,
}

impl Run<'_> {
    fn select(&mut self, type_name: &str, parent: &Json, set: &SelectionSet, path: &mut Vec<PathSegment>) -> Map<String, Json> {
        let mut out = Map::new();
        for field in &set.fields {
            path.push(PathSegment::Key(field.response_key().to_string()));
            let value = self.field(type_name, parent, field, path);
            path.pop();
            out.insert(field.response_key().to_string(), value);
        }
        out
    }

    fn field(&mut self, type_name: &str, parent: &Json, field: &Field, path: &mut Vec<PathSegment>) -> Json {
        if field.name == "__typename" {
            return Json::String(type_name.to_string());
        }
        let Some(def) = self.schema.field(type_name, &field.name) else {
            self.errors.push(GraphQLError::new(format!("unknown field `{type_name}.{}`", field.name), path.clone()));
            return Json::Null;
        };
        let args: Map<String, Json> = field
            .arguments
            .iter()
            .map(|(k, v)| (k.clone(), literal_to_json(v, &self.vars)))
            .collect();
        let resolved = match self.resolvers.get(type_name, &field.name) {
            Some(r) => r.resolve(&ResolveInfo { parent_type: type_name, field, parent, args: &args, path }),
            None => Ok(parent.get(&field.name).cloned().unwrap_or(Json::Null)),
        };
        match resolved {
            Ok(v) => {
                let ty = def.ty.clone();
                self.complete(&ty, v, field, path)
            }
            Err(e) => {
                self.errors.push(GraphQLError { message: e.message, path: path.clone(), extensions: e.extensions });
                Json::Null
            }
        }
    }

    fn complete(&mut self, ty: &TypeRef, value: Json, field: &Field, path: &mut Vec<PathSegment>) -> Json {
        if value.is_null() {
            return Json::Null;
        }
        match ty.nullable() {
            TypeRef::List(inner) => {
                let Json::Array(items) = value else {
                    self.errors.push(GraphQLError::new(format!("expected a list for `{}`", field.name), path.clone()));
                    return Json::Null;
                };
                let mut out = Vec::with_capacity(items.len());
                for (i, item) in items.into_iter().enumerate() {
                    path.push(PathSegment::Index(i));
                    out.push(self.complete(inner, item, field, path));
                    path.pop();
                }
                Json::Array(out)
            }
            TypeRef::Named(name) if is_scalar(name) => match coerce_scalar(name, value) {
                Ok(v) => v,
                Err(msg) => {
                    self.errors.push(GraphQLError::new(msg, path.clone()));
                    Json::Null
                }
            },
            TypeRef::Named(name) => {
                if !value.is_object() {
                    self.errors.push(GraphQLError::new(format!("expected an object of type `{name}`"), path.clone()));
                    return Json::Null;
                }
                let set = field.selection_set.as_ref().expect("validated composite field has a selection");
                Json::Object(self.select(name, &value, set, path))
            }
            TypeRef::NonNull(_) => unreachable!("nullable() strips non-null"),
        }
    }
}

fn coerce_scalar(name: &str, value: Json) -> Result<Json, String> {
    match (name, value) {
        ("ID", Json::String(s)) => Ok(Json::String(s)),
        ("ID", Json::Number(n)) if n.is_i64() || n.is_u64() => Ok(Json::String(n.to_string())),
        ("String", Json::String(s)) => Ok(Json::String(s)),
        ("Boolean", Json::Bool(b)) => Ok(Json::Bool(b)),
        ("Int", Json::Number(n)) => {
            if let Some(i) = n.as_i64() {
                Ok(Json::from(i))
            } else {
                match n.as_f64() {
                    Some(f) if f.fract() == 0.0 && f.abs() < 9.0e15 => Ok(Json::from(f as i64)),
                    _ => Err(format!("`{n}` is not a 64-bit integer")),
                }
            }
        }
        ("Float", Json::Number(n)) => n
            .as_f64()
            .and_then(serde_json::Number::from_f64)
            .map(Json::Number)
            .ok_or_else(|| format!("`{n}` is not a float")),
        (ty, other) => Err(format!("cannot represent `{other}` as {ty}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphql::parse_query;
    use serde_json::json;

    fn schema() -> Schema {
        Schema::parse_sdl(
            "type Query { work(id: ID): Work broken: Int fine: Int }
             type Work { doi: ID citationCount: Int tags: [String] }",
        )
        .unwrap()
    }

    fn resolvers() -> Resolvers {
        let mut r = Resolvers::new();
        r.insert("Query", "work", |info: &ResolveInfo<'_>| {
            Ok(json!({"doi": info.arg_str("id"), "citationCount": 12, "tags": ["a", "b"]}))
        });
        r.insert("Query", "broken", |_: &ResolveInfo<'_>| Err(FieldError::new("upstream exploded")));
        r.insert("Query", "fine", |_: &ResolveInfo<'_>| Ok(json!(7)));
        r
    }

    fn run(src: &str, vars: Json) -> ResponseDocument {
        let doc = parse_query(src).unwrap();
        let vars = vars.as_object().cloned().unwrap_or_default();
        execute(&doc, &schema(), &resolvers(), &vars).unwrap()
    }

    #[test]
    fn resolves_citation_count() {
        let r = run(r#"{ work(id: "10.1101/2020.03.08.20030643") { citationCount } }"#, json!({}));
        assert_eq!(r.data, Some(json!({"work": {"citationCount": 12}})));
        assert!(r.errors.is_empty());
    }

    #[test]
    fn partial_results() {
        let r = run("{ broken fine }", json!({}));
        assert_eq!(r.data, Some(json!({"broken": null, "fine": 7})));
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.errors[0].path, vec![PathSegment::from("broken")]);
    }

    #[test]
    fn alias_is_response_key() {
        let r = run(r#"{ work(id: "x") { n: citationCount } }"#, json!({}));
        assert_eq!(r.data, Some(json!({"work": {"n": 12}})));
    }

    #[test]
    fn request_order_is_kept() {
        let r = run(r#"{ fine work(id: 5) { tags doi } }"#, json!({}));
        assert_eq!(r.to_string_compact(), r#"{"data":{"fine":7,"work":{"tags":["a","b"],"doi":"5"}}}"#);
    }

    #[test]
    fn variables_and_defaults() {
        let r = run("query ($d: ID = \"dflt\") { work(id: $d) { doi } }", json!({}));
        assert_eq!(r.data, Some(json!({"work": {"doi": "dflt"}})));
        let r = run("query ($d: ID) { work(id: $d) { doi } }", json!({"d": "given"}));
        assert_eq!(r.data, Some(json!({"work": {"doi": "given"}})));
        let doc = parse_query("query ($d: ID) { work(id: $d) { doi } }").unwrap();
        assert_eq!(
            execute(&doc, &schema(), &resolvers(), &Map::new()),
            Err(ExecError::VariableMissing("d".into()))
        );
    }

    #[test]
    fn typename_and_scalar_coercion() {
        let r = run(r#"{ __typename work(id: 3) { __typename doi } }"#, json!({}));
        assert_eq!(r.data, Some(json!({"__typename": "Query", "work": {"__typename": "Work", "doi": "3"}})));
    }

    #[test]
    fn wrong_shape_nulls_field() {
        let mut res = resolvers();
        res.insert("Work", "citationCount", |_: &ResolveInfo<'_>| Ok(json!("many")));
        let doc = parse_query(r#"{ work(id: 1) { doi citationCount } }"#).unwrap();
        let r = execute(&doc, &schema(), &res, &Map::new()).unwrap();
        assert_eq!(r.data, Some(json!({"work": {"doi": "1", "citationCount": null}})));
        assert_eq!(r.errors[0].path, vec![PathSegment::from("work"), PathSegment::from("citationCount")]);
    }
}
