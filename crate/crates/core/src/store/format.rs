//! Line-oriented statement file.
//!
//! ```text
//! # comment
//! @resource <id>\t<label>\t<class>,<class>
//! <subject>\t<predicate>\t<resource|string|number|boolean>\t<value>
//! ```
//!
//! Fields may contain `\t`, `\n` and `\\` escapes.

use super::{StatementStore, StoreError};
use crate::model::{Datatype, Literal, Object, Resource, Statement};

pub(super) fn parse(text: &str) -> Result<StatementStore, StoreError> {
    let mut store = StatementStore::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let err = |message: String| StoreError::Parse { line: line_no, message };
        if let Some(rest) = line.strip_prefix("@resource ") {
            let parts: Vec<String> = rest.split('\t').map(unescape).collect();
            if parts.is_empty() || parts[0].is_empty() || parts.len() > 3 {
                return Err(err("expected `@resource id<TAB>label<TAB>classes`".into()));
            }
            let label = parts.get(1).cloned().unwrap_or_default();
            let classes: Vec<String> = parts
                .get(2)
                .map(|c| c.split(',').map(str::trim).filter(|c| !c.is_empty()).map(String::from).collect())
                .unwrap_or_default();
            store
                .declare(Resource::new(parts[0].clone(), label, classes))
                .map_err(|e| err(e.to_string()))?;
            continue;
        }
        let parts: Vec<String> = line.split('\t').map(unescape).collect();
        if parts.len() != 4 {
            return Err(err(format!("expected 4 tab-separated fields, found {}", parts.len())));
        }
        let object = match parts[2].as_str() {
            "resource" => Object::Resource(parts[3].clone()),
            "string" => Object::Literal(Literal::string(parts[3].clone())),
            "number" => Object::Literal(Literal::new(parts[3].clone(), Datatype::Number).map_err(|e| err(e.to_string()))?),
            "boolean" => Object::Literal(Literal::new(parts[3].clone(), Datatype::Boolean).map_err(|e| err(e.to_string()))?),
            other => return Err(err(format!("unknown object kind `{other}`"))),
        };
        let st = Statement::new(parts[0].clone(), parts[1].clone(), object).map_err(|e| err(e.to_string()))?;
        store.add_statements(&[st]).map_err(|e| err(e.to_string()))?;
    }
    Ok(store)
}

pub(super) fn render(store: &StatementStore) -> String {
    let mut out = String::new();
    for r in store.resources() {
        let classes: Vec<&str> = r.classes.iter().map(String::as_str).collect();
        out.push_str(&format!("@resource {}\t{}\t{}\n", escape(&r.id), escape(&r.label), escape(&classes.join(","))));
    }
    for s in store.statements() {
        let (kind, value) = match s.object() {
            Object::Resource(id) => ("resource", id.as_str()),
            Object::Literal(l) => (
                match l.datatype() {
                    Datatype::String => "string",
                    Datatype::Number => "number",
                    Datatype::Boolean => "boolean",
                },
                l.lexical(),
            ),
        };
        out.push_str(&format!("{}\t{}\t{}\t{}\n", escape(s.subject()), escape(s.predicate()), kind, escape(value)));
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n")
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_resources_and_statements() {
        let text = "# demo\n@resource C1\tStudy one\tContribution\n@resource L1\tIran\tDCLocation, Place\nC1\tP_LOCATION\tresource\tL1\nC1\tP_R0\tnumber\t4.85\nL1\tnote\tstring\ta\\tb\n";
        let store = parse(text).unwrap();
        assert_eq!(store.len(), 3);
        assert_eq!(store.resource("L1").unwrap().classes.len(), 2);
        assert_eq!(store.first_literal("L1", "note"), Some("a\tb"));
        let again = parse(&render(&store)).unwrap();
        assert_eq!(again.statements(), store.statements());
    }

    #[test]
    fn reports_line_numbers() {
        match parse("@resource C1\tx\t\nC1\tP\tnumber\tabc\n") {
            Err(StoreError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse("C9\tP\tstring\tx\n") {
            Err(StoreError::Parse { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("C9"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
