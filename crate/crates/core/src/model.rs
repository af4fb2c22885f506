//! Graph vocabulary shared by the store, templates and publisher.

use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pid::Pid;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("statement subject must not be empty")]
    EmptySubject,
    #[error("statement predicate must not be empty")]
    EmptyPredicate,
    #[error("number literal `{0}` is not a finite decimal")]
    BadNumber(String),
    #[error("boolean literal `{0}` must be `true` or `false`")]
    BadBoolean(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Datatype {
    String,
    Number,
    Boolean,
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Datatype::String => "string",
            Datatype::Number => "number",
            Datatype::Boolean => "boolean",
        })
    }
}

/// A typed literal kept in lexical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    lexical: String,
    datatype: Datatype,
}

impl Literal {
    pub fn new(lexical: impl Into<String>, datatype: Datatype) -> Result<Literal, ModelError> {
        let lexical = lexical.into();
        match datatype {
            Datatype::Number => {
                let ok = lexical.trim() == lexical
                    && lexical.parse::<f64>().map(f64::is_finite).unwrap_or(false)
                    && !lexical.eq_ignore_ascii_case("inf")
                    && !lexical.to_ascii_lowercase().contains("nan");
                if !ok {
                    return Err(ModelError::BadNumber(lexical));
                }
            }
            Datatype::Boolean => {
                if lexical != "true" && lexical != "false" {
                    return Err(ModelError::BadBoolean(lexical));
                }
            }
            Datatype::String => {}
        }
        Ok(Literal { lexical, datatype })
    }

    pub fn string(text: impl Into<String>) -> Literal {
        Literal { lexical: text.into(), datatype: Datatype::String }
    }

    pub fn number(value: f64) -> Result<Literal, ModelError> {
        Literal::new(format!("{value}"), Datatype::Number)
    }

    pub fn boolean(value: bool) -> Literal {
        Literal { lexical: value.to_string(), datatype: Datatype::Boolean }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Datatype {
        self.datatype
    }

    pub fn as_number(&self) -> Option<f64> {
        match self.datatype {
            Datatype::Number => self.lexical.parse().ok(),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.datatype {
            Datatype::Boolean => Some(self.lexical == "true"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Object {
    Resource(String),
    Literal(Literal),
}

impl Object {
    pub fn as_resource(&self) -> Option<&str> {
        match self {
            Object::Resource(id) => Some(id),
            Object::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Object::Literal(l) => Some(l),
            Object::Resource(_) => None,
        }
    }

    /// JSON rendering used when graph values surface through GraphQL.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Object::Resource(id) => serde_json::Value::String(id.clone()),
            Object::Literal(l) => match l.datatype {
                Datatype::String => serde_json::Value::String(l.lexical.clone()),
                Datatype::Boolean => serde_json::Value::Bool(l.lexical == "true"),
                Datatype::Number => l
                    .as_number()
                    .and_then(serde_json::Number::from_f64)
                    .map(serde_json::Value::Number)
                    .unwrap_or(serde_json::Value::Null),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Statement {
    subject: String,
    predicate: String,
    object: Object,
}

impl Statement {
    pub fn new(subject: impl Into<String>, predicate: impl Into<String>, object: Object) -> Result<Statement, ModelError> {
        let subject = subject.into();
        let predicate = predicate.into();
        if subject.is_empty() {
            return Err(ModelError::EmptySubject);
        }
        if predicate.is_empty() {
            return Err(ModelError::EmptyPredicate);
        }
        Ok(Statement { subject, predicate, object })
    }

    pub fn subject(&self) -> &str {
        &self.subject
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn object(&self) -> &Object {
        &self.object
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resource {
    pub id: String,
    pub label: String,
    pub classes: IndexSet<String>,
    pub same_as: Option<Pid>,
}

impl Resource {
    pub fn new<I, S>(id: impl Into<String>, label: impl Into<String>, classes: I) -> Resource
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Resource {
            id: id.into(),
            label: label.into(),
            classes: classes.into_iter().map(Into::into).collect(),
            same_as: None,
        }
    }

    pub fn has_class(&self, class: &str) -> bool {
        self.classes.contains(class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_literals_are_finite() {
        assert!(Literal::new("2.68", Datatype::Number).is_ok());
        assert!(Literal::new("-1e3", Datatype::Number).is_ok());
        assert!(Literal::new("NaN", Datatype::Number).is_err());
        assert!(Literal::new("inf", Datatype::Number).is_err());
        assert!(Literal::new("1e400", Datatype::Number).is_err());
        assert!(Literal::new(" 2", Datatype::Number).is_err());
        assert!(Literal::number(f64::INFINITY).is_err());
    }

    #[test]
    fn statements_need_subject_and_predicate() {
        let o = Object::Literal(Literal::string("x"));
        assert_eq!(Statement::new("", "p", o.clone()), Err(ModelError::EmptySubject));
        assert_eq!(Statement::new("s", "", o), Err(ModelError::EmptyPredicate));
    }

    #[test]
    fn resource_classes_dedupe() {
        let r = Resource::new("R1", "Iran", ["DCLocation", "DCLocation", "Place"]);
        assert_eq!(r.classes.len(), 2);
    }
}
