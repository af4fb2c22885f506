//! External class providers and gazetteer linking.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use super::{looks_like_iri, TemplateError};
use crate::model::{Literal, Object, Resource};
use crate::pid::Pid;
use crate::store::{vocab, StatementStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProviderKind {
    OntologyLookup,
    Gazetteer,
}

impl ProviderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProviderKind::OntologyLookup => "ontology-lookup",
            ProviderKind::Gazetteer => "gazetteer",
        }
    }
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalClassRef {
    pub provider: ProviderKind,
    pub iri: String,
    pub label: String,
    pub source_ontology: Option<String>,
}

impl ExternalClassRef {
    pub fn new(
        provider: ProviderKind,
        iri: impl Into<String>,
        label: impl Into<String>,
        source_ontology: Option<String>,
    ) -> Result<ExternalClassRef, TemplateError> {
        let iri = iri.into();
        if !looks_like_iri(&iri) {
            return Err(TemplateError::BadIri(iri));
        }
        Ok(ExternalClassRef { provider, iri, label: label.into(), source_ontology })
    }
}

/// A search service returning candidate classes, best match first.
pub trait ClassProvider: Send + Sync {
    fn kind(&self) -> ProviderKind;
    fn search(&self, text: &str) -> Result<Vec<ExternalClassRef>, TemplateError>;
}

/// Class providers registered by name.
#[derive(Default, Clone)]
pub struct ClassProviderRegistry {
    providers: IndexMap<String, Arc<dyn ClassProvider>>,
}

impl ClassProviderRegistry {
    pub fn new() -> ClassProviderRegistry {
        ClassProviderRegistry::default()
    }

    pub fn register(&mut self, name: impl Into<String>, provider: Arc<dyn ClassProvider>) -> &mut Self {
        self.providers.insert(name.into(), provider);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn ClassProvider>> {
        self.providers.get(name)
    }

    /// First provider of the given kind.
    pub fn of_kind(&self, kind: ProviderKind) -> Option<&Arc<dyn ClassProvider>> {
        self.providers.values().find(|p| p.kind() == kind)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.providers.keys().map(String::as_str)
    }
}

impl fmt::Debug for ClassProviderRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.providers.keys()).finish()
    }
}

pub fn lookup_external_class(
    registry: &ClassProviderRegistry,
    provider: ProviderKind,
    text: &str,
) -> Result<Vec<ExternalClassRef>, TemplateError> {
    if text.trim().is_empty() {
        return Err(TemplateError::EmptyQuery);
    }
    let p = registry.of_kind(provider).ok_or_else(|| TemplateError::UnknownProvider(provider.to_string()))?;
    p.search(text.trim())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceHit {
    pub geoname_id: u64,
    pub name: String,
    pub country_code: Option<String>,
}

/// Gazetteer name search, best match first.
pub trait PlaceSearch: Send + Sync {
    fn search_places(&self, name: &str) -> Result<Vec<PlaceHit>, TemplateError>;
}

/// Exposes a gazetteer as a class provider whose candidates are record URLs.
pub struct GazetteerClasses<P>(pub P);

impl<P: PlaceSearch> ClassProvider for GazetteerClasses<P> {
    fn kind(&self) -> ProviderKind {
        ProviderKind::Gazetteer
    }

    fn search(&self, text: &str) -> Result<Vec<ExternalClassRef>, TemplateError> {
        self.0
            .search_places(text)?
            .into_iter()
            .map(|h| {
                ExternalClassRef::new(
                    ProviderKind::Gazetteer,
                    Pid::geonames(h.geoname_id)?.to_url(),
                    h.name,
                    Some("GeoNames".to_string()),
                )
            })
            .collect()
    }
}

/// Creates, or finds, the location resource for the top gazetteer match of
/// `name` and links it to the gazetteer record.
pub fn link_location(store: &mut StatementStore, gazetteer: &dyn PlaceSearch, name: &str) -> Result<Resource, TemplateError> {
    let name = name.trim();
    if name.is_empty() {
        return Err(TemplateError::EmptyQuery);
    }
    let hit = gazetteer
        .search_places(name)?
        .into_iter()
        .next()
        .ok_or_else(|| TemplateError::NoMatch(name.to_string()))?;
    let pid = Pid::geonames(hit.geoname_id)?;
    let url = pid.to_url();

    let existing = store
        .resources_of_class(vocab::DC_LOCATION)
        .find(|r| {
            r.same_as.as_ref() == Some(&pid) || store.objects(&r.id, vocab::SAME_AS).any(|o| o.as_literal().map(|l| l.lexical()) == Some(url.as_str()))
        })
        .cloned();
    if let Some(r) = existing {
        return Ok(r);
    }

    let id = store.mint_id("LOC");
    store.declare(Resource::new(id.clone(), hit.name.clone(), [vocab::DC_LOCATION]))?;
    store.add(&id, vocab::SAME_AS, Object::Literal(Literal::string(url)))?;
    if let Some(cc) = &hit.country_code {
        store.add(&id, vocab::COUNTRY_CODE, Object::Literal(Literal::string(cc.clone())))?;
    }
    Ok(store.resource(&id).expect("just declared").clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::{location_template, validate_instance};

    struct Fixed(Vec<PlaceHit>);

    impl PlaceSearch for Fixed {
        fn search_places(&self, name: &str) -> Result<Vec<PlaceHit>, TemplateError> {
            Ok(self.0.iter().filter(|h| h.name.to_lowercase().contains(&name.to_lowercase())).cloned().collect())
        }
    }

    fn gazetteer() -> Fixed {
        Fixed(vec![
            PlaceHit { geoname_id: 130758, name: "Iran".into(), country_code: Some("IR".into()) },
            PlaceHit { geoname_id: 1160939, name: "Iranshahr".into(), country_code: Some("IR".into()) },
        ])
    }

    #[test]
    fn links_once() {
        let mut store = StatementStore::new();
        let g = gazetteer();
        let first = link_location(&mut store, &g, "Iran").unwrap();
        for _ in 0..2 {
            assert_eq!(link_location(&mut store, &g, "Iran").unwrap().id, first.id);
        }
        assert_eq!(store.resources_of_class(vocab::DC_LOCATION).count(), 1);
        assert_eq!(first.label, "Iran");
        assert_eq!(store.first_literal(&first.id, vocab::SAME_AS), Some("https://www.geonames.org/130758"));
        assert!(validate_instance(&store, &first.id, &location_template()).is_empty());
    }

    #[test]
    fn no_match() {
        let mut store = StatementStore::new();
        assert!(matches!(link_location(&mut store, &gazetteer(), "Xyzzy"), Err(TemplateError::NoMatch(_))));
        assert!(store.is_empty());
    }

    #[test]
    fn gazetteer_as_class_provider() {
        let mut reg = ClassProviderRegistry::new();
        reg.register("geonames", Arc::new(GazetteerClasses(gazetteer())));
        let hits = lookup_external_class(&reg, ProviderKind::Gazetteer, "Iran").unwrap();
        assert_eq!(hits[0].iri, "https://www.geonames.org/130758");
        assert!(matches!(
            lookup_external_class(&reg, ProviderKind::OntologyLookup, "x"),
            Err(TemplateError::UnknownProvider(_))
        ));
    }
}
