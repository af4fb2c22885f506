//! In-memory statement graph holding papers, contributions and comparisons.

mod comparison;
mod format;
mod graph;
pub mod vocab;

use std::collections::{HashMap, HashSet};
use std::path::Path;

use indexmap::IndexMap;
use thiserror::Error;

use crate::model::{ModelError, Object, Resource, Statement};
use crate::pid::{parse_pid, Pid, PidScheme};

pub use comparison::{
    assign_doi, build_comparison, comparison_by_doi, Column, Comparison, ComparisonTable, Creator, Paper, Row, Study,
};
pub use graph::{comparison_json, paper_json, serve_statement_graph, study_json, STATEMENT_GRAPH_SDL};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("statement subject `{0}` was never declared")]
    UnknownSubject(String),
    #[error("resource `{0}` declared twice")]
    DuplicateResource(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("comparison `{0}` does not exist")]
    MissingComparison(String),
    #[error("comparison `{id}` has {count} contribution(s); at least 2 are required")]
    TooFewContributions { id: String, count: usize },
    #[error("no comparison carries DOI `{0}`")]
    NotFound(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default)]
pub struct StatementStore {
    resources: IndexMap<String, Resource>,
    statements: Vec<Statement>,
    present: HashSet<Statement>,
    by_subject: HashMap<String, Vec<usize>>,
    minted: u64,
}

impl StatementStore {
    pub fn new() -> StatementStore {
        StatementStore::default()
    }

    pub fn declare(&mut self, resource: Resource) -> Result<(), StoreError> {
        if self.resources.contains_key(&resource.id) {
            return Err(StoreError::DuplicateResource(resource.id));
        }
        self.resources.insert(resource.id.clone(), resource);
        Ok(())
    }

    /// Allocates an unused resource id with the given prefix.
    pub fn mint_id(&mut self, prefix: &str) -> String {
        loop {
            self.minted += 1;
            let id = format!("{prefix}{}", self.minted);
            if !self.resources.contains_key(&id) {
                return id;
            }
        }
    }

    pub fn resource(&self, id: &str) -> Option<&Resource> {
        self.resources.get(id)
    }

    pub fn resources(&self) -> impl Iterator<Item = &Resource> {
        self.resources.values()
    }

    pub fn resources_of_class<'a>(&'a self, class: &'a str) -> impl Iterator<Item = &'a Resource> + 'a {
        self.resources.values().filter(move |r| r.has_class(class))
    }

    /// Adds statements with set semantics and returns how many were new.
    /// Nothing is added when any subject is undeclared.
    pub fn add_statements(&mut self, statements: &[Statement]) -> Result<usize, StoreError> {
        if let Some(s) = statements.iter().find(|s| !self.resources.contains_key(s.subject())) {
            return Err(StoreError::UnknownSubject(s.subject().to_string()));
        }
        let mut added = 0;
        for s in statements {
            if self.present.contains(s) {
                continue;
            }
            if s.predicate() == vocab::SAME_AS {
                if let Some(pid) = same_as_pid(s.object()) {
                    if let Some(r) = self.resources.get_mut(s.subject()) {
                        r.same_as = Some(pid);
                    }
                }
            }
            self.by_subject.entry(s.subject().to_string()).or_default().push(self.statements.len());
            self.present.insert(s.clone());
            self.statements.push(s.clone());
            added += 1;
        }
        Ok(added)
    }

    pub fn add(&mut self, subject: &str, predicate: &str, object: Object) -> Result<usize, StoreError> {
        let st = Statement::new(subject, predicate, object)?;
        self.add_statements(&[st])
    }

    /// Drops every statement with the given subject and predicate.
    pub fn remove(&mut self, subject: &str, predicate: &str) -> usize {
        let before = self.statements.len();
        self.statements.retain(|s| !(s.subject() == subject && s.predicate() == predicate));
        let removed = before - self.statements.len();
        if removed > 0 {
            self.reindex();
        }
        removed
    }

    fn reindex(&mut self) {
        self.present = self.statements.iter().cloned().collect();
        self.by_subject.clear();
        for (i, s) in self.statements.iter().enumerate() {
            self.by_subject.entry(s.subject().to_string()).or_default().push(i);
        }
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    /// Statements with the given subject, in insertion order, paired with
    /// their insertion index.
    pub fn about<'a>(&'a self, subject: &str) -> impl Iterator<Item = (usize, &'a Statement)> + 'a {
        self.by_subject
            .get(subject)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(move |i| (*i, &self.statements[*i]))
    }

    pub fn objects<'a>(&'a self, subject: &str, predicate: &'a str) -> impl Iterator<Item = &'a Object> + 'a {
        self.about(subject).filter(move |(_, s)| s.predicate() == predicate).map(|(_, s)| s.object())
    }

    pub fn first_literal<'a>(&'a self, subject: &str, predicate: &'a str) -> Option<&'a str> {
        self.objects(subject, predicate).find_map(|o| o.as_literal()).map(|l| l.lexical())
    }

    pub fn first_resource<'a>(&'a self, subject: &str, predicate: &'a str) -> Option<&'a str> {
        self.objects(subject, predicate).find_map(|o| o.as_resource())
    }

    /// Subjects of statements `(?, predicate, Resource(object))`.
    pub fn subjects_pointing_to<'a>(&'a self, predicate: &'a str, object: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.statements
            .iter()
            .filter(move |s| s.predicate() == predicate && s.object().as_resource() == Some(object))
            .map(|s| s.subject())
    }

    /// Adds a class to a resource; returns whether it was new.
    pub fn add_class(&mut self, id: &str, class: &str) -> Result<bool, StoreError> {
        let r = self.resources.get_mut(id).ok_or_else(|| StoreError::UnknownSubject(id.to_string()))?;
        Ok(r.classes.insert(class.to_string()))
    }

    pub fn parse(text: &str) -> Result<StatementStore, StoreError> {
        format::parse(text)
    }

    pub fn to_text(&self) -> String {
        format::render(self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<StatementStore, StoreError> {
        let text = std::fs::read_to_string(path)?;
        StatementStore::parse(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn same_as_pid(object: &Object) -> Option<Pid> {
    let lit = object.as_literal()?;
    parse_pid(lit.lexical(), None)
        .ok()
        .filter(|p| p.scheme() != PidScheme::Url)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Literal;

    fn store() -> StatementStore {
        let mut s = StatementStore::new();
        s.declare(Resource::new("C1", "contribution", ["Contribution"])).unwrap();
        s
    }

    #[test]
    fn set_semantics() {
        let mut s = store();
        let sts = vec![
            Statement::new("C1", "P_R0", Object::Literal(Literal::number(2.68).unwrap())).unwrap(),
            Statement::new("C1", "label", Object::Literal(Literal::string("x"))).unwrap(),
        ];
        assert_eq!(s.add_statements(&sts).unwrap(), 2);
        assert_eq!(s.add_statements(&sts).unwrap(), 0);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn unknown_subject_adds_nothing() {
        let mut s = store();
        let sts = vec![
            Statement::new("C1", "p", Object::Literal(Literal::string("ok"))).unwrap(),
            Statement::new("ghost", "p", Object::Literal(Literal::string("x"))).unwrap(),
        ];
        assert!(matches!(s.add_statements(&sts), Err(StoreError::UnknownSubject(id)) if id == "ghost"));
        assert!(s.is_empty());
    }

    #[test]
    fn same_as_sets_pid() {
        let mut s = store();
        s.add("C1", vocab::SAME_AS, Object::Literal(Literal::string("https://www.geonames.org/130758"))).unwrap();
        assert_eq!(s.resource("C1").unwrap().same_as.as_ref().and_then(|p| p.geonames_id()), Some(130758));
    }

    #[test]
    fn remove_reindexes() {
        let mut s = store();
        s.add("C1", "doi", Object::Literal(Literal::string("10.1/a"))).unwrap();
        s.add("C1", "other", Object::Literal(Literal::string("keep"))).unwrap();
        assert_eq!(s.remove("C1", "doi"), 1);
        assert_eq!(s.about("C1").count(), 1);
        assert_eq!(s.add("C1", "doi", Object::Literal(Literal::string("10.1/a"))).unwrap(), 1);
    }
}
