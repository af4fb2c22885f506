use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value as Json};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathSegment {
    Key(String),
    Index(usize),
}

impl fmt::Display for PathSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathSegment::Key(k) => f.write_str(k),
            PathSegment::Index(i) => write!(f, "{i}"),
        }
    }
}

impl From<&str> for PathSegment {
    fn from(s: &str) -> Self {
        PathSegment::Key(s.to_string())
    }
}

impl From<usize> for PathSegment {
    fn from(i: usize) -> Self {
        PathSegment::Index(i)
    }
}

pub fn path_to_string(path: &[PathSegment]) -> String {
    path.iter().map(ToString::to_string).collect::<Vec<_>>().join(".")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphQLError {
    pub message: String,
    #[serde(default)]
    pub path: Vec<PathSegment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extensions: Option<Map<String, Json>>,
}

impl GraphQLError {
    pub fn new(message: impl Into<String>, path: Vec<PathSegment>) -> GraphQLError {
        GraphQLError { message: message.into(), path, extensions: None }
    }

    pub fn with_extension(mut self, key: &str, value: impl Into<Json>) -> GraphQLError {
        self.extensions.get_or_insert_with(Map::new).insert(key.to_string(), value.into());
        self
    }
}

/// `{"data": ..., "errors": [...]}` as exchanged over GraphQL-over-HTTP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseDocument {
    pub data: Option<Json>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<GraphQLError>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed GraphQL response: {0}")]
pub struct MalformedResponse(pub String);

impl ResponseDocument {
    pub fn data(data: Json) -> ResponseDocument {
        ResponseDocument { data: Some(data), errors: Vec::new() }
    }

    pub fn failure(errors: Vec<GraphQLError>) -> ResponseDocument {
        ResponseDocument { data: None, errors }
    }

    /// Parses a response envelope; at least one of `data` and `errors` must
    /// be present.
    pub fn from_json(value: Json) -> Result<ResponseDocument, MalformedResponse> {
        let Json::Object(mut obj) = value else {
            return Err(MalformedResponse("response is not a JSON object".into()));
        };
        let has_data = obj.contains_key("data");
        let has_errors = obj.contains_key("errors");
        if !has_data && !has_errors {
            return Err(MalformedResponse("response has neither `data` nor `errors`".into()));
        }
        let data = match obj.remove("data") {
            None | Some(Json::Null) => None,
            Some(d @ Json::Object(_)) => Some(d),
            Some(other) => return Err(MalformedResponse(format!("`data` must be an object, found {other}"))),
        };
        let errors = match obj.remove("errors") {
            None | Some(Json::Null) => Vec::new(),
            Some(e) => serde_json::from_value(e).map_err(|e| MalformedResponse(format!("bad `errors`: {e}")))?,
        };
        Ok(ResponseDocument { data, errors })
    }

    pub fn to_json(&self) -> Json {
        let mut obj = Map::new();
        obj.insert("data".into(), self.data.clone().unwrap_or(Json::Null));
        if !self.errors.is_empty() {
            obj.insert("errors".into(), serde_json::to_value(&self.errors).unwrap_or(Json::Null));
        }
        Json::Object(obj)
    }

    pub fn to_string_compact(&self) -> String {
        self.to_json().to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn errors_only_response() {
        let r = ResponseDocument::from_json(json!({"errors": [{"message": "boom", "path": ["a", 0]}]})).unwrap();
        assert_eq!(r.data, None);
        assert_eq!(r.errors[0].path, vec![PathSegment::Key("a".into()), PathSegment::Index(0)]);
    }

    #[test]
    fn envelope_without_data_or_errors() {
        assert!(ResponseDocument::from_json(json!({"result": 1})).is_err());
        assert!(ResponseDocument::from_json(json!([1])).is_err());
    }

    #[test]
    fn serializes_without_empty_errors() {
        let r = ResponseDocument::data(json!({"a": 1}));
        assert_eq!(r.to_string_compact(), r#"{"data":{"a":1}}"#);
    }
}
