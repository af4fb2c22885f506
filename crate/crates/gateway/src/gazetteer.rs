//! GeoNames-style REST gazetteer: a typed client and its GraphQL wrapping.

use std::collections::HashMap;
use std::sync::Arc;

use fedwalk_core::graphql::{execute, Document, FieldError, ResolveInfo, ResponseDocument, Resolvers, Schema, GraphQLError};
use fedwalk_core::sources::{continent_id, CONTINENTS, EARTH_GEONAME_ID};
use fedwalk_core::template::{PlaceHit, PlaceSearch, TemplateError};
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::adapter::{AdapterError, UpstreamAdapter};
use crate::http::{HttpClient, Method};
use crate::source::SourceBinding;

/// GeoNames status code for "no result found".
const STATUS_NOT_FOUND: u64 = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GazetteerError {
    #[error(transparent)]
    Upstream(#[from] AdapterError),
    #[error("unknown geonameId {0}")]
    UnknownGeonameId(i64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("gazetteer error {value}: {message}")]
    Status { message: String, value: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GazetteerRecord {
    pub geoname_id: u64,
    pub name: String,
    /// ISO 3166 alpha-2, empty for features outside any country.
    pub country_code: String,
    pub continent_code: Option<String>,
    pub feature_class: String,
}

impl GazetteerRecord {
    pub fn from_json(v: &Json) -> Result<GazetteerRecord, String> {
        let id = match v.get("geonameId") {
            Some(Json::Number(n)) => n.as_u64(),
            Some(Json::String(s)) => s.parse().ok(),
            _ => None,
        }
        .filter(|i| *i > 0)
        .ok_or_else(|| format!("record without a positive geonameId: {v}"))?;
        let text = |k: &str| v.get(k).and_then(Json::as_str).unwrap_or_default().to_string();
        let continent = Some(text("continentCode")).filter(|c| !c.is_empty());
        if let Some(c) = &continent {
            if !CONTINENTS.iter().any(|(code, _)| code == c) {
                return Err(format!("geonameId {id} has continent code `{c}`"));
            }
        }
        Ok(GazetteerRecord {
            geoname_id: id,
            name: text("name"),
            country_code: text("countryCode"),
            continent_code: continent,
            feature_class: text("fcl"),
        })
    }

    /// The record as a `Place` of the gazetteer schema.
    pub fn to_place(&self) -> Json {
        let opt = |s: &str| if s.is_empty() { Json::Null } else { Json::String(s.to_string()) };
        json!({
            "geonameId": self.geoname_id.to_string(),
            "name": self.name,
            "countryCode": opt(&self.country_code),
            "continentCode": self.continent_code,
            "featureClass": opt(&self.feature_class),
        })
    }
}

fn rank_key(r: &GazetteerRecord, needle: &str) -> (bool, bool, usize, u64) {
    let name = r.name.to_lowercase();
    (name != needle, !name.starts_with(needle), r.name.chars().count(), r.geoname_id)
}

pub struct GazetteerClient {
    binding: SourceBinding,
    http: HttpClient,
}

impl GazetteerClient {
    pub fn new(binding: SourceBinding) -> GazetteerClient {
        let http = HttpClient::for_binding(&binding);
        GazetteerClient { binding, http }
    }

    pub fn binding(&self) -> &SourceBinding {
        &self.binding
    }

    fn call(&self, service: &str, mut query: Vec<(&str, String)>) -> Result<Json, GazetteerError> {
        if let Some(u) = &self.binding.username {
            query.push(("username", u.clone()));
        }
        let url = format!("{}/{service}", self.binding.endpoint.trim_end_matches('/'));
        let body = self.http.send_ok(&Method::Get, &url, &query).map_err(AdapterError::from)?;
        let malformed = |message: String| AdapterError::Malformed { upstream: self.binding.source.to_string(), message };
        let value: Json = serde_json::from_str(&body).map_err(|e| malformed(e.to_string()))?;
        if let Some(status) = value.get("status") {
            return Err(GazetteerError::Status {
                message: status.get("message").and_then(Json::as_str).unwrap_or_default().to_string(),
                value: status.get("value").and_then(Json::as_u64).unwrap_or(0),
            });
        }
        Ok(value)
    }

    fn records(&self, value: &Json) -> Result<Vec<GazetteerRecord>, GazetteerError> {
        let malformed = |message: String| AdapterError::Malformed { upstream: self.binding.source.to_string(), message };
        let items = value.get("geonames").and_then(Json::as_array).ok_or_else(|| malformed("no `geonames` array".into()))?;
        items.iter().map(|i| GazetteerRecord::from_json(i).map_err(|m| malformed(m).into())).collect()
    }

    fn not_found(e: GazetteerError, id: i64) -> GazetteerError {
        match e {
            GazetteerError::Status { value: STATUS_NOT_FOUND, .. } => GazetteerError::UnknownGeonameId(id),
            other => other,
        }
    }

    pub fn children(&self, parent: i64) -> Result<Vec<GazetteerRecord>, GazetteerError> {
        if parent <= 0 {
            return Err(GazetteerError::InvalidArgument(format!("geonameId {parent} is not positive")));
        }
        let value = self.call("childrenJSON", vec![("geonameId", parent.to_string())]).map_err(|e| Self::not_found(e, parent))?;
        self.records(&value)
    }

    pub fn search(&self, text: &str, max_rows: usize) -> Result<Vec<GazetteerRecord>, GazetteerError> {
        let needle = text.trim().to_lowercase();
        if needle.is_empty() {
            return Err(GazetteerError::InvalidArgument("search text is empty".into()));
        }
        if !(1..=100).contains(&max_rows) {
            return Err(GazetteerError::InvalidArgument(format!("maxRows {max_rows} outside 1..=100")));
        }
        let value = self.call("searchJSON", vec![("name_startsWith", text.trim().to_string()), ("maxRows", max_rows.to_string())])?;
        let mut records = self.records(&value)?;
        records.sort_by_key(|r| rank_key(r, &needle));
        records.truncate(max_rows);
        Ok(records)
    }

    pub fn get(&self, id: i64) -> Result<GazetteerRecord, GazetteerError> {
        if id <= 0 {
            return Err(GazetteerError::InvalidArgument(format!("geonameId {id} is not positive")));
        }
        let value = self.call("getJSON", vec![("geonameId", id.to_string())]).map_err(|e| Self::not_found(e, id))?;
        GazetteerRecord::from_json(&value)
            .map_err(|m| AdapterError::Malformed { upstream: self.binding.source.to_string(), message: m }.into())
    }
}

impl PlaceSearch for GazetteerClient {
    fn search_places(&self, name: &str) -> Result<Vec<PlaceHit>, TemplateError> {
        let found = self.search(name, 10).map_err(|e| match e {
            GazetteerError::InvalidArgument(_) => TemplateError::EmptyQuery,
            other => TemplateError::UpstreamUnreachable(other.to_string()),
        })?;
        Ok(found
            .into_iter()
            .map(|r| PlaceHit {
                geoname_id: r.geoname_id,
                name: r.name,
                country_code: Some(r.country_code).filter(|c| !c.is_empty()),
            })
            .collect())
    }
}

fn field_error(e: GazetteerError) -> FieldError {
    let f = FieldError::new(e.to_string());
    match &e {
        GazetteerError::Upstream(a) => {
            f.with_extension("source", crate::source::SourceId::Gazetteer.as_str()).with_extension("attempts", a.attempts())
        }
        _ => f,
    }
}

fn id_of(v: &Json) -> Option<i64> {
    match v {
        Json::String(s) => s.trim().parse().ok(),
        Json::Number(n) => n.as_i64(),
        _ => None,
    }
}

/// GraphQL view of the REST gazetteer; every resolver maps one REST reply
/// through `GazetteerRecord::to_place`.
pub fn wrap_rest_as_source(client: Arc<GazetteerClient>) -> (Schema, Resolvers) {
    let mut r = Resolvers::new();
    let c = client.clone();
    r.insert("Query", "continent", move |info: &ResolveInfo<'_>| {
        let code = info.arg_str("code").unwrap_or_default();
        let id = continent_id(&code).ok_or_else(|| FieldError::new(format!("unknown continent code `{code}`")))?;
        c.get(id as i64).map(|p| p.to_place()).map_err(field_error)
    });
    let c = client.clone();
    r.insert("Query", "countriesOf", move |info: &ResolveInfo<'_>| {
        let code = info.arg_str("continentCode").unwrap_or_default();
        let id = continent_id(&code).ok_or_else(|| FieldError::new(format!("unknown continent code `{code}`")))?;
        let kids = c.children(id as i64).map_err(field_error)?;
        Ok(Json::Array(kids.iter().map(GazetteerRecord::to_place).collect()))
    });
    let c = client.clone();
    r.insert("Query", "place", move |info: &ResolveInfo<'_>| {
        let id = info.arg("geonameId").and_then(id_of).ok_or_else(|| FieldError::new("argument `geonameId` is required"))?;
        c.get(id).map(|p| p.to_place()).map_err(field_error)
    });
    let c = client.clone();
    r.insert("Query", "places", move |info: &ResolveInfo<'_>| {
        let ids: Vec<Json> = match info.arg("geonameIds") {
            Some(Json::Array(a)) => a.clone(),
            Some(one) => vec![one.clone()],
            None => Vec::new(),
        };
        // unknown ids are null entries; a transport failure fails the list
        let mut seen: HashMap<i64, Json> = HashMap::new();
        let mut out = Vec::with_capacity(ids.len());
        for v in &ids {
            let Some(id) = id_of(v).filter(|i| *i > 0) else {
                out.push(Json::Null);
                continue;
            };
            if let Some(hit) = seen.get(&id) {
                out.push(hit.clone());
                continue;
            }
            let place = match c.get(id) {
                Ok(p) => p.to_place(),
                Err(GazetteerError::UnknownGeonameId(_)) => Json::Null,
                Err(e) => return Err(field_error(e)),
            };
            seen.insert(id, place.clone());
            out.push(place);
        }
        Ok(Json::Array(out))
    });
    r.insert("Query", "searchPlace", move |info: &ResolveInfo<'_>| {
        let name = info.arg_str("name").unwrap_or_default();
        let max = info.arg_i64("maxRows").unwrap_or(10).clamp(1, 100) as usize;
        let hits = client.search(&name, max).map_err(field_error)?;
        Ok(Json::Array(hits.iter().map(GazetteerRecord::to_place).collect()))
    });
    (fedwalk_core::sources::gazetteer_schema(), r)
}

/// A REST source exposed through its GraphQL wrapping.
pub struct RestAdapter {
    binding: SourceBinding,
    schema: Schema,
    resolvers: Resolvers,
    client: Arc<GazetteerClient>,
}

impl RestAdapter {
    pub fn new(binding: SourceBinding, schema: Schema) -> RestAdapter {
        let client = Arc::new(GazetteerClient::new(binding.clone()));
        let (_, resolvers) = wrap_rest_as_source(client.clone());
        RestAdapter { binding, schema, resolvers, client }
    }

    pub fn client(&self) -> &GazetteerClient {
        &self.client
    }
}

impl UpstreamAdapter for RestAdapter {
    fn binding(&self) -> &SourceBinding {
        &self.binding
    }

    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn fetch(&self, doc: &Document, variables: &Map<String, Json>) -> Result<ResponseDocument, AdapterError> {
        Ok(execute(doc, &self.schema, &self.resolvers, variables)
            .unwrap_or_else(|e| ResponseDocument::failure(vec![GraphQLError::new(e.to_string(), Vec::new())])))
    }

    fn ping(&self) -> Result<(), AdapterError> {
        match self.client.get(EARTH_GEONAME_ID as i64) {
            Ok(_) | Err(GazetteerError::UnknownGeonameId(_)) | Err(GazetteerError::Status { .. }) => Ok(()),
            Err(GazetteerError::Upstream(e)) => Err(e),
            Err(GazetteerError::InvalidArgument(m)) => {
                Err(AdapterError::Malformed { upstream: self.binding.source.to_string(), message: m })
            }
        }
    }
}
