//! GraphQL view over the statement store.

use std::sync::Arc;

use serde_json::{json, Value as Json};

use super::comparison::{Comparison, Paper, Study};
use super::{comparison_by_doi, StatementStore};
use crate::graphql::{FieldError, ResolveInfo, Resolvers, Schema};
use crate::pid::Pid;

pub const STATEMENT_GRAPH_SDL: &str = include_str!("../../schemas/statement_graph.graphql");

pub fn paper_json(p: &Paper) -> Json {
    json!({
        "id": p.id,
        "title": p.title,
        "doi": p.doi.as_ref().map(|d| d.value().to_string()),
        "publisher": p.publisher,
        "publicationYear": p.publication_year,
    })
}

pub fn study_json(s: &Study) -> Json {
    json!({
        "id": s.id,
        "label": s.label,
        "r0": s.r0,
        "confidenceIntervalLow": s.confidence_interval_low,
        "confidenceIntervalHigh": s.confidence_interval_high,
        "confidenceLevel": s.confidence_level,
        "locationLabel": s.location_label,
        "locationGeonameId": s.location_geoname_id.map(|g| g.to_string()),
        "countryCode": s.country_code,
        "paperDoi": s.paper.as_ref().and_then(|p| p.doi.as_ref()).map(|d| d.value().to_string()),
        "paper": s.paper.as_ref().map(paper_json),
    })
}

pub fn comparison_json(store: &StatementStore, c: &Comparison) -> Json {
    json!({
        "id": c.id,
        "doi": c.doi.as_ref().map(|d| d.value().to_string()),
        "title": c.title,
        "description": c.description,
        "researchField": c.research_field,
        "publicationYear": c.publication_year,
        "creators": c.creators.iter().map(|cr| json!({
            "name": cr.name,
            "orcid": cr.orcid.as_ref().map(|o| o.value().to_string()),
        })).collect::<Vec<_>>(),
        "properties": c.properties.iter().map(|p| json!({
            "id": p,
            "label": store.resource(p).map(|r| r.label.clone()).unwrap_or_else(|| p.clone()),
        })).collect::<Vec<_>>(),
        "studies": c.contributions.iter().map(|id| study_json(&Study::load(store, id))).collect::<Vec<_>>(),
        "papers": c.papers(store).iter().map(paper_json).collect::<Vec<_>>(),
    })
}

fn doi_arg(info: &ResolveInfo<'_>, name: &str) -> Result<Pid, FieldError> {
    let raw = info.arg_str(name).ok_or_else(|| FieldError::new(format!("argument `{name}` is required")))?;
    Pid::doi(&raw).map_err(|e| FieldError::new(e.to_string()))
}

/// Schema and resolvers serving comparisons, studies and papers.
pub fn serve_statement_graph(store: Arc<StatementStore>) -> (Schema, Resolvers) {
    let schema = Schema::parse_sdl(STATEMENT_GRAPH_SDL).expect("bundled statement graph schema is valid");
    let mut r = Resolvers::new();

    let s = store.clone();
    r.insert("Query", "comparisonByDoi", move |info: &ResolveInfo<'_>| {
        let doi = doi_arg(info, "doi")?;
        let c = comparison_by_doi(&s, &doi).map_err(|e| FieldError::new(e.to_string()))?;
        Ok(comparison_json(&s, &c))
    });
    let s = store.clone();
    r.insert("Query", "comparisonsByDoi", move |info: &ResolveInfo<'_>| {
        let items = match info.arg("dois") {
            Some(Json::Array(items)) => items.clone(),
            Some(single) => vec![single.clone()],
            None => Vec::new(),
        };
        Ok(Json::Array(
            items
                .iter()
                .map(|d| {
                    let text = match d {
                        Json::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    Pid::doi(&text)
                        .ok()
                        .and_then(|doi| comparison_by_doi(&s, &doi).ok())
                        .map(|c| comparison_json(&s, &c))
                        .unwrap_or(Json::Null)
                })
                .collect(),
        ))
    });
    let s = store.clone();
    r.insert("Query", "comparison", move |info: &ResolveInfo<'_>| {
        let id = info.arg_str("id").ok_or_else(|| FieldError::new("argument `id` is required"))?;
        let c = Comparison::load(&s, &id).map_err(|e| FieldError::new(e.to_string()))?;
        Ok(comparison_json(&s, &c))
    });
    let s = store.clone();
    r.insert("Query", "paperByDoi", move |info: &ResolveInfo<'_>| {
        let doi = doi_arg(info, "doi")?;
        Paper::by_doi(&s, &doi)
            .map(|p| paper_json(&p))
            .ok_or_else(|| FieldError::new(format!("no paper with DOI `{doi}`")))
    });
    let s = store;
    r.insert("Query", "paper", move |info: &ResolveInfo<'_>| {
        let id = info.arg_str("id").ok_or_else(|| FieldError::new("argument `id` is required"))?;
        Paper::load(&s, &id)
            .map(|p| paper_json(&p))
            .ok_or_else(|| FieldError::new(format!("no paper `{id}`")))
    });
    (schema, r)
}
