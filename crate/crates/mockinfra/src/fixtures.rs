//! Loading and cross-checking the fixture directory.
//!
//! | file | content |
//! |------|---------|
//! | `statements.tsv` | statement graph in the store's line format |
//! | `metadata_graph.json` | `{"works": [...]}` scholarly works |
//! | `gazetteer.json` | `{"records": [...]}` GeoNames-style features with `parentId` |
//! | `ontology.json` | `{"classes": [...]}` ontology lookup entries |
//! | `templates.txt` | template declarations |

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use fedwalk_core::model::Object;
use fedwalk_core::sources::CONTINENTS;
use fedwalk_core::store::{vocab, Comparison, StatementStore, Study};
use fedwalk_core::template::TemplateCatalog;
use fedwalk_core::Pid;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const STATEMENTS_FILE: &str = "statements.tsv";
pub const METADATA_FILE: &str = "metadata_graph.json";
pub const GAZETTEER_FILE: &str = "gazetteer.json";
pub const ONTOLOGY_FILE: &str = "ontology.json";
pub const TEMPLATES_FILE: &str = "templates.txt";

/// A fixture directory that cannot be used as-is.
#[derive(Debug, Error)]
pub enum FixtureIntegrityError {
    #[error("fixture file `{}` is missing", .0.display())]
    MissingFile(PathBuf),
    #[error("{file}: {message}")]
    Malformed { file: String, message: String },
    #[error("dangling reference: {0}")]
    Dangling(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkCreator {
    pub name: String,
    #[serde(default)]
    pub orcid: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WorkRecord {
    pub doi: String,
    pub title: String,
    pub publisher: String,
    #[serde(default)]
    pub publication_year: Option<i64>,
    #[serde(default)]
    pub citation_count: Option<i64>,
    #[serde(default)]
    pub resource_type_general: Option<String>,
    #[serde(default)]
    pub resource_type: Option<String>,
    #[serde(default)]
    pub creators: Vec<WorkCreator>,
    /// DOIs this work references.
    #[serde(default)]
    pub references: Vec<String>,
}

impl WorkRecord {
    pub fn is_comparison(&self) -> bool {
        self.resource_type.as_deref() == Some("Comparison")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GazetteerEntry {
    pub geoname_id: u64,
    pub name: String,
    #[serde(default)]
    pub country_code: String,
    #[serde(default)]
    pub continent_code: String,
    pub fcl: String,
    pub fcode: String,
    #[serde(default)]
    pub parent_id: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyClass {
    pub iri: String,
    pub label: String,
    pub ontology_name: String,
    pub ontology_prefix: String,
    #[serde(default)]
    pub obo_id: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
}

#[derive(Debug, Clone)]
pub struct FixtureSet {
    pub statements: StatementStore,
    pub works: Vec<WorkRecord>,
    pub gazetteer: Vec<GazetteerEntry>,
    pub ontology: Vec<OntologyClass>,
    pub templates: TemplateCatalog,
}

#[derive(Deserialize)]
struct WorksFile {
    works: Vec<WorkRecord>,
}

#[derive(Deserialize)]
struct GazetteerFile {
    records: Vec<GazetteerEntry>,
}

#[derive(Deserialize)]
struct OntologyFile {
    classes: Vec<OntologyClass>,
}

/// The fixture directory shipped with this crate.
pub fn canonical_fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn read(dir: &Path, name: &str) -> Result<String, FixtureIntegrityError> {
    let path = dir.join(name);
    if !path.is_file() {
        return Err(FixtureIntegrityError::MissingFile(path));
    }
    fs::read_to_string(&path)
        .map_err(|e| FixtureIntegrityError::Malformed { file: name.to_string(), message: e.to_string() })
}

fn json<T: for<'de> Deserialize<'de>>(dir: &Path, name: &str) -> Result<T, FixtureIntegrityError> {
    serde_json::from_str(&read(dir, name)?)
        .map_err(|e| FixtureIntegrityError::Malformed { file: name.to_string(), message: e.to_string() })
}

pub fn load_fixtures(dir: impl AsRef<Path>) -> Result<FixtureSet, FixtureIntegrityError> {
    let dir = dir.as_ref();
    let statements = StatementStore::parse(&read(dir, STATEMENTS_FILE)?)
        .map_err(|e| FixtureIntegrityError::Malformed { file: STATEMENTS_FILE.into(), message: e.to_string() })?;
    let works: WorksFile = json(dir, METADATA_FILE)?;
    let gazetteer: GazetteerFile = json(dir, GAZETTEER_FILE)?;
    let ontology: OntologyFile = json(dir, ONTOLOGY_FILE)?;
    let mut templates = TemplateCatalog::new();
    templates
        .load_text(&read(dir, TEMPLATES_FILE)?)
        .map_err(|e| FixtureIntegrityError::Malformed { file: TEMPLATES_FILE.into(), message: e.to_string() })?;
    let set = FixtureSet {
        statements,
        works: works.works,
        gazetteer: gazetteer.records,
        ontology: ontology.classes,
        templates,
    };
    set.check()?;
    Ok(set)
}

impl FixtureSet {
    pub fn canonical() -> Result<FixtureSet, FixtureIntegrityError> {
        load_fixtures(canonical_fixtures_dir())
    }

    pub fn gazetteer_entry(&self, id: u64) -> Option<&GazetteerEntry> {
        self.gazetteer.iter().find(|g| g.geoname_id == id)
    }

    fn check(&self) -> Result<(), FixtureIntegrityError> {
        self.check_gazetteer()?;
        self.check_works()?;
        self.check_statements()?;
        if !self.ontology.iter().any(|c| c.ontology_prefix == "STATO") {
            return Err(FixtureIntegrityError::InvalidValue("ontology fixture has no STATO class".into()));
        }
        for c in &self.ontology {
            if !c.iri.starts_with("http://") && !c.iri.starts_with("https://") {
                return Err(FixtureIntegrityError::InvalidValue(format!("ontology IRI `{}` is not absolute", c.iri)));
            }
        }
        Ok(())
    }

    fn check_gazetteer(&self) -> Result<(), FixtureIntegrityError> {
        let mut ids = HashSet::new();
        for g in &self.gazetteer {
            if g.geoname_id == 0 || !ids.insert(g.geoname_id) {
                return Err(FixtureIntegrityError::InvalidValue(format!("geonameId {} is zero or repeated", g.geoname_id)));
            }
            if !g.continent_code.is_empty() && !CONTINENTS.iter().any(|(c, _)| *c == g.continent_code) {
                return Err(FixtureIntegrityError::InvalidValue(format!(
                    "geonameId {} has continent code `{}`",
                    g.geoname_id, g.continent_code
                )));
            }
        }
        for g in &self.gazetteer {
            if let Some(p) = g.parent_id.filter(|p| !ids.contains(p)) {
                return Err(FixtureIntegrityError::Dangling(format!("geonameId {} has unknown parent {p}", g.geoname_id)));
            }
        }
        Ok(())
    }

    fn check_works(&self) -> Result<(), FixtureIntegrityError> {
        let mut seen = HashSet::new();
        for w in &self.works {
            let doi = Pid::doi(&w.doi).map_err(|e| FixtureIntegrityError::InvalidValue(format!("work DOI `{}`: {e}", w.doi)))?;
            if !seen.insert(doi.clone()) {
                return Err(FixtureIntegrityError::InvalidValue(format!("work {doi} listed twice")));
            }
            for r in &w.references {
                Pid::doi(r).map_err(|e| FixtureIntegrityError::InvalidValue(format!("reference `{r}` of {doi}: {e}")))?;
            }
            if w.is_comparison() && fedwalk_core::store::comparison_by_doi(&self.statements, &doi).is_err() {
                return Err(FixtureIntegrityError::Dangling(format!(
                    "comparison DOI {doi} of the metadata graph is not in the statement graph"
                )));
            }
        }
        Ok(())
    }

    fn check_statements(&self) -> Result<(), FixtureIntegrityError> {
        for st in self.statements.statements().iter().filter(|s| s.predicate() == vocab::R0) {
            let value = match st.object() {
                Object::Literal(l) => l.as_number(),
                Object::Resource(_) => None,
            };
            if !value.is_some_and(|v| v.is_finite() && v > 0.0) {
                return Err(FixtureIntegrityError::InvalidValue(format!(
                    "R0 of `{}` is not a finite positive number",
                    st.subject()
                )));
            }
        }
        for cmp in Comparison::all(&self.statements) {
            for c in &cmp.contributions {
                if let Some(id) = Study::load(&self.statements, c).location_geoname_id {
                    if self.gazetteer_entry(id).is_none() {
                        return Err(FixtureIntegrityError::Dangling(format!(
                            "study `{c}` points at geonameId {id}, absent from the gazetteer"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
