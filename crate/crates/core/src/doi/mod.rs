//! DataCite kernel-4 metadata for comparisons.

mod xml;

use std::fmt;

use thiserror::Error;

use crate::pid::{Pid, PidError, PidScheme};
use crate::store::{Comparison, StatementStore, StoreError};

pub use xml::{canonical_xml, parse_kernel4, serialize_kernel4, ParsedRecord, KERNEL4_NS, SCHEMA_LOCATION};

pub const ORKG_PUBLISHER: &str = "Open Research Knowledge Graph";
pub const ORCID_SCHEME_URI: &str = "http://orcid.org/";

#[derive(Debug, Error)]
pub enum DoiError {
    #[error("comparison `{0}` does not exist")]
    MissingComparison(String),
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("bad identifier in <{element}>: {source}")]
    BadPid {
        element: String,
        #[source]
        source: PidError,
    },
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error(transparent)]
    Store(StoreError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LangText {
    pub text: String,
    pub lang: Option<String>,
}

impl LangText {
    pub fn en(text: impl Into<String>) -> LangText {
        LangText { text: text.into(), lang: Some("en".into()) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameType {
    Personal,
    Organizational,
}

impl NameType {
    pub fn as_str(self) -> &'static str {
        match self {
            NameType::Personal => "Personal",
            NameType::Organizational => "Organizational",
        }
    }

    pub fn parse(s: &str) -> Option<NameType> {
        match s {
            "Personal" => Some(NameType::Personal),
            "Organizational" => Some(NameType::Organizational),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordCreator {
    pub name: String,
    pub name_type: NameType,
    pub orcid: Option<Pid>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceType {
    pub general: String,
    pub value: String,
}

impl ResourceType {
    pub fn comparison() -> ResourceType {
        ResourceType { general: "Dataset".into(), value: "Comparison".into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelatedIdentifierType {
    Doi,
    Url,
}

impl RelatedIdentifierType {
    pub fn as_str(self) -> &'static str {
        match self {
            RelatedIdentifierType::Doi => "DOI",
            RelatedIdentifierType::Url => "URL",
        }
    }

    pub fn parse(s: &str) -> Option<RelatedIdentifierType> {
        match s {
            "DOI" => Some(RelatedIdentifierType::Doi),
            "URL" => Some(RelatedIdentifierType::Url),
            _ => None,
        }
    }

    pub fn scheme(self) -> PidScheme {
        match self {
            RelatedIdentifierType::Doi => PidScheme::Doi,
            RelatedIdentifierType::Url => PidScheme::Url,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatedIdentifier {
    pub pid: Pid,
    pub identifier_type: RelatedIdentifierType,
    pub relation_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Description {
    pub text: String,
    pub description_type: String,
}

/// Kernel-4 metadata. Text values are whitespace-normalized: no leading or
/// trailing whitespace and single inner spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataCiteRecord {
    pub identifier: Pid,
    pub creators: Vec<RecordCreator>,
    pub titles: Vec<LangText>,
    pub publisher: LangText,
    pub publication_year: i32,
    pub subjects: Vec<LangText>,
    pub language: String,
    pub resource_type: ResourceType,
    pub related_identifiers: Vec<RelatedIdentifier>,
    pub descriptions: Vec<Description>,
}

impl DataCiteRecord {
    pub fn check(&self) -> Result<(), DoiError> {
        let bad = |m: &str| Err(DoiError::InvalidRecord(m.to_string()));
        if self.identifier.scheme() != PidScheme::Doi {
            return bad("identifier must be a DOI");
        }
        if self.creators.is_empty() {
            return bad("at least one creator is required");
        }
        if self.titles.is_empty() {
            return bad("at least one title is required");
        }
        if !(1000..=9999).contains(&self.publication_year) {
            return bad("publicationYear must have four digits");
        }
        if self.creators.iter().any(|c| c.orcid.as_ref().is_some_and(|o| o.scheme() != PidScheme::Orcid)) {
            return bad("creator name identifiers must be ORCIDs");
        }
        for r in &self.related_identifiers {
            if r.pid.scheme() != r.identifier_type.scheme() {
                return Err(DoiError::InvalidRecord(format!(
                    "related identifier {} is not a {}",
                    r.pid,
                    r.identifier_type.as_str()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoiState {
    Draft,
    Findable,
}

impl DoiState {
    pub fn as_str(self) -> &'static str {
        match self {
            DoiState::Draft => "draft",
            DoiState::Findable => "findable",
        }
    }

    pub fn parse(s: &str) -> Option<DoiState> {
        match s.to_ascii_lowercase().as_str() {
            "draft" => Some(DoiState::Draft),
            "findable" => Some(DoiState::Findable),
            _ => None,
        }
    }
}

impl fmt::Display for DoiState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistrationState {
    pub doi: Pid,
    pub state: DoiState,
    /// RFC 3339 timestamp.
    pub registered_at: String,
}

pub(crate) fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Assembles the registration metadata of a comparison.
pub fn build_metadata(store: &StatementStore, comparison: &str, doi: &Pid) -> Result<DataCiteRecord, DoiError> {
    if doi.scheme() != PidScheme::Doi {
        return Err(DoiError::InvalidRecord(format!("`{doi}` is not a DOI")));
    }
    let cmp = match Comparison::load(store, comparison) {
        Ok(c) => c,
        Err(StoreError::MissingComparison(id)) => return Err(DoiError::MissingComparison(id)),
        Err(e) => return Err(DoiError::Store(e)),
    };
    let year = cmp
        .publication_year
        .and_then(|y| i32::try_from(y).ok())
        .ok_or_else(|| DoiError::InvalidRecord(format!("comparison `{comparison}` has no publication year")))?;
    let mut related: Vec<RelatedIdentifier> = Vec::new();
    for paper in cmp.papers(store) {
        if let Some(pid) = paper.doi {
            if !related.iter().any(|r| r.pid == pid) {
                related.push(RelatedIdentifier {
                    pid,
                    identifier_type: RelatedIdentifierType::Doi,
                    relation_type: "References".into(),
                });
            }
        }
    }
    let record = DataCiteRecord {
        identifier: doi.clone(),
        creators: cmp
            .creators
            .iter()
            .map(|c| RecordCreator { name: normalize_ws(&c.name), name_type: NameType::Personal, orcid: c.orcid.clone() })
            .collect(),
        titles: vec![LangText::en(normalize_ws(&cmp.title))],
        publisher: LangText::en(ORKG_PUBLISHER),
        publication_year: year,
        subjects: Some(normalize_ws(&cmp.research_field)).filter(|f| !f.is_empty()).map(LangText::en).into_iter().collect(),
        language: "en".into(),
        resource_type: ResourceType::comparison(),
        related_identifiers: related,
        descriptions: Some(normalize_ws(&cmp.description))
            .filter(|d| !d.is_empty())
            .map(|text| Description { text, description_type: "Abstract".into() })
            .into_iter()
            .collect(),
    };
    record.check()?;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
@resource CMP\tCOVID-19 Reproductive Number Estimates\tComparison
@resource A1\tHaris, Muhammad\tAuthor
@resource PA\tPaper A\tPaper
@resource PB\tPaper B\tPaper
@resource C1\tone\tContribution
@resource C2\ttwo\tContribution
CMP\tdescription\tstring\tComparison of published reproductive number estimates for the COVID-19 infectious disease
CMP\tresearchField\tstring\tVirology
CMP\tpublicationYear\tnumber\t2020
CMP\tcreator\tresource\tA1
A1\torcid\tstring\t0000-0002-5071-1658
CMP\tcompareContribution\tresource\tC1
CMP\tcompareContribution\tresource\tC2
PA\thasContribution\tresource\tC1
PB\thasContribution\tresource\tC2
PA\tdoi\tstring\t10.1101/2020.03.08.20030643
";

    #[test]
    fn builds_comparison_record() {
        let store = StatementStore::parse(FIXTURE).unwrap();
        let r = build_metadata(&store, "CMP", &Pid::doi("10.48366/r44930").unwrap()).unwrap();
        assert_eq!(r.creators[0].name, "Haris, Muhammad");
        assert_eq!(r.creators[0].orcid.as_ref().unwrap().value(), "0000-0002-5071-1658");
        assert_eq!(r.titles[0].text, "COVID-19 Reproductive Number Estimates");
        assert_eq!(r.publisher.text, ORKG_PUBLISHER);
        assert_eq!(r.publication_year, 2020);
        assert_eq!(r.subjects[0].text, "Virology");
        assert_eq!(r.related_identifiers.len(), 1);
        assert_eq!(r.related_identifiers[0].pid.value(), "10.1101/2020.03.08.20030643");
    }

    #[test]
    fn no_dois_no_related() {
        let text = FIXTURE.replace("PA\tdoi\tstring\t10.1101/2020.03.08.20030643\n", "");
        let store = StatementStore::parse(&text).unwrap();
        let r = build_metadata(&store, "CMP", &Pid::doi("10.48366/r1").unwrap()).unwrap();
        assert!(r.related_identifiers.is_empty());
    }

    #[test]
    fn missing_comparison() {
        let store = StatementStore::parse(FIXTURE).unwrap();
        assert!(matches!(
            build_metadata(&store, "NOPE", &Pid::doi("10.48366/r1").unwrap()),
            Err(DoiError::MissingComparison(id)) if id == "NOPE"
        ));
    }
}
