use std::fmt::Write;

use super::ast::*;

/// Canonical text form; `parse_query(&print_query(d))` reproduces `d`.
pub fn print_query(doc: &Document) -> String {
    let op = &doc.operation;
    let mut out = String::new();
    if op.name.is_some() || !op.variables.is_empty() {
        out.push_str("query");
        if let Some(name) = &op.name {
            out.push(' ');
            out.push_str(name);
        }
        if !op.variables.is_empty() {
            if op.name.is_none() {
                out.push(' ');
            }
            out.push('(');
            for (i, v) in op.variables.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "${}: {}", v.name, v.ty);
                if let Some(d) = &v.default {
                    out.push_str(" = ");
                    print_value(d, &mut out);
                }
            }
            out.push(')');
        }
        out.push(' ');
    }
    print_selection(&op.selection_set, 0, &mut out);
    out
}

fn print_selection(set: &SelectionSet, depth: usize, out: &mut String) {
    out.push_str("{\n");
    for field in &set.fields {
        indent(depth + 1, out);
        if let Some(alias) = &field.alias {
            out.push_str(alias);
            out.push_str(": ");
        }
        out.push_str(&field.name);
        if !field.arguments.is_empty() {
            out.push('(');
            for (i, (name, value)) in field.arguments.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(name);
                out.push_str(": ");
                print_value(value, out);
            }
            out.push(')');
        }
        if let Some(sub) = &field.selection_set {
            out.push(' ');
            print_selection(sub, depth + 1, out);
        }
        out.push('\n');
    }
    indent(depth, out);
    out.push('}');
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

pub(crate) fn print_value(value: &Value, out: &mut String) {
    match value {
        Value::Variable(v) => {
            out.push('$');
            out.push_str(v);
        }
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        // Debug formatting is the shortest representation that parses back
        // to the same f64 and always carries a `.` or an exponent.
        Value::Float(f) => {
            let _ = write!(out, "{f:?}");
        }
        Value::String(s) => print_string(s, out),
        Value::Boolean(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Null => out.push_str("null"),
        Value::Enum(e) => out.push_str(e),
        Value::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                print_value(item, out);
            }
            out.push(']');
        }
    }
}

fn print_string(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphql::parse_query;

    #[test]
    fn canonical_single_field() {
        let doc = Document::new(SelectionSet::new(vec![Field::leaf("a")]));
        assert_eq!(print_query(&doc), "{\n  a\n}");
    }

    #[test]
    fn alias_survives_round_trip() {
        let doc = parse_query("{ study { r0: reproductiveNumber } }").unwrap();
        let text = print_query(&doc);
        assert!(text.contains("r0: reproductiveNumber"));
        assert_eq!(parse_query(&text).unwrap(), doc);
    }

    #[test]
    fn header_with_variables() {
        let doc = parse_query("query ($doi: ID!, $l: [String] = [\"AS\"]) { work(id: $doi) { a } }").unwrap();
        let text = print_query(&doc);
        assert!(text.starts_with("query ($doi: ID!, $l: [String] = [\"AS\"]) {\n"), "{text}");
        assert_eq!(parse_query(&text).unwrap(), doc);
    }

    #[test]
    fn floats_and_escapes_round_trip() {
        let doc = parse_query(r#"{ f(a: 3.0, b: 1e300, c: -0.000001, s: "tab\tquote\"ctl\u0001") }"#).unwrap();
        assert_eq!(parse_query(&print_query(&doc)).unwrap(), doc);
    }
}
