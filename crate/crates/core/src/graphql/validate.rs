use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::ast::*;
use super::schema::{is_scalar, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ValidationErrorKind {
    UnknownField,
    UnknownArgument,
    ArgumentKindMismatch,
    SelectionOnLeaf,
    MissingSelection,
    UndeclaredVariable,
    UnknownVariableType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationError {
    pub kind: ValidationErrorKind,
    /// Response keys from the root down to the offending field.
    pub path: Vec<String>,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at {})", self.message, self.path.join("."))
    }
}

/// Checks a document against a schema. An empty result means it is safe to
/// execute or plan.
pub fn validate(doc: &Document, schema: &Schema) -> Vec<ValidationError> {
    let mut errors = Vec::new();
    let mut vars = HashMap::new();
    for v in &doc.operation.variables {
        if !is_scalar(v.ty.base()) {
            errors.push(ValidationError {
                kind: ValidationErrorKind::UnknownVariableType,
                path: Vec::new(),
                message: format!("variable `${}` has non-scalar type `{}`", v.name, v.ty),
            });
        }
        vars.insert(v.name.as_str(), &v.ty);
    }
    let mut path = Vec::new();
    check_set(schema, &schema.query_root, doc.selection_set(), &vars, &mut path, &mut errors);
    errors
}

fn check_set(
    schema: &Schema,
    type_name: &str,
    set: &SelectionSet,
    vars: &HashMap<&str, &TypeRef>,
    path: &mut Vec<String>,
    errors: &mut Vec<ValidationError>,
) {
    for field in &set.fields {
        path.push(field.response_key().to_string());
        check_field(schema, type_name, field, vars, path, errors);
        path.pop();
    }
}

fn check_field(
    schema: &Schema,
    type_name: &str,
    field: &Field,
    vars: &HashMap<&str, &TypeRef>,
    path: &mut Vec<String>,
    errors: &mut Vec<ValidationError>,
) {
    let mut push = |kind, message: String| errors.push(ValidationError { kind, path: path.clone(), message });
    if field.name == "__typename" {
        if !field.arguments.is_empty() {
            push(ValidationErrorKind::UnknownArgument, "`__typename` takes no arguments".into());
        }
        if field.selection_set.is_some() {
            push(ValidationErrorKind::SelectionOnLeaf, "`__typename` is a leaf".into());
        }
        return;
    }
    let Some(def) = schema.field(type_name, &field.name) else {
        push(ValidationErrorKind::UnknownField, format!("type `{type_name}` has no field `{}`", field.name));
        return;
    };
    for (arg, value) in &field.arguments {
        match def.args.get(arg) {
            None => push(
                ValidationErrorKind::UnknownArgument,
                format!("field `{type_name}.{}` has no argument `{arg}`", field.name),
            ),
            Some(expected) => {
                if let Err(why) = value_fits(value, expected, vars) {
                    push(
                        ValidationErrorKind::ArgumentKindMismatch,
                        format!("argument `{arg}` of `{type_name}.{}`: {why}", field.name),
                    );
                }
            }
        }
    }
    let leaf = is_scalar(def.ty.base());
    match (&field.selection_set, leaf) {
        (Some(_), true) => push(
            ValidationErrorKind::SelectionOnLeaf,
            format!("leaf field `{type_name}.{}` cannot have a selection set", field.name),
        ),
        (None, false) => push(
            ValidationErrorKind::MissingSelection,
            format!("field `{type_name}.{}` of type `{}` needs a selection set", field.name, def.ty),
        ),
        (Some(sub), false) => {
            let target = def.ty.base().to_string();
            check_set(schema, &target, sub, vars, path, errors);
        }
        (None, true) => {}
    }
}

/// Whether a literal or variable may be passed where `expected` is declared.
fn value_fits(value: &Value, expected: &TypeRef, vars: &HashMap<&str, &TypeRef>) -> Result<(), String> {
    let expected = expected.nullable();
    match value {
        Value::Null => Ok(()),
        Value::Variable(name) => {
            let declared = vars.get(name.as_str()).ok_or_else(|| format!("variable `${name}` is not declared"))?;
            if types_compatible(declared.nullable(), expected) {
                Ok(())
            } else {
                Err(format!("variable `${name}` of type `{declared}` cannot be used as `{expected}`"))
            }
        }
        Value::List(items) => match expected {
            TypeRef::List(inner) => items.iter().try_for_each(|i| value_fits(i, inner, vars)),
            _ => Err(format!("list given where `{expected}` is expected")),
        },
        // a single value is accepted for a list-typed argument and treated as a one-element list
        scalar => match expected {
            TypeRef::List(inner) => value_fits(scalar, inner, vars),
            TypeRef::Named(name) => {
                let ok = matches!(
                    (scalar, name.as_str()),
                    (Value::Int(_), "Int" | "Float" | "ID")
                        | (Value::Float(_), "Float")
                        | (Value::String(_), "String" | "ID")
                        | (Value::Boolean(_), "Boolean")
                        | (Value::Enum(_), "String" | "ID")
                );
                if ok {
                    Ok(())
                } else {
                    Err(format!("{} given where `{name}` is expected", kind_name(scalar)))
                }
            }
            TypeRef::NonNull(_) => unreachable!("nullable() strips non-null"),
        },
    }
}

fn types_compatible(declared: &TypeRef, expected: &TypeRef) -> bool {
    match (declared.nullable(), expected.nullable()) {
        (TypeRef::List(a), TypeRef::List(b)) => types_compatible(a, b),
        (TypeRef::Named(a), TypeRef::Named(b)) => {
            a == b || matches!((a.as_str(), b.as_str()), ("String", "ID") | ("ID", "String") | ("Int", "Float") | ("Int", "ID"))
        }
        (TypeRef::Named(_), TypeRef::List(b)) => types_compatible(declared, b),
        _ => false,
    }
}

fn kind_name(v: &Value) -> &'static str {
    match v {
        Value::Int(_) => "Int",
        Value::Float(_) => "Float",
        Value::String(_) => "String",
        Value::Boolean(_) => "Boolean",
        Value::Enum(_) => "enum value",
        Value::Null => "null",
        Value::List(_) => "list",
        Value::Variable(_) => "variable",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphql::parse_query;

    fn schema() -> Schema {
        Schema::parse_sdl(
            "type Query { work(id: ID): Work works(ids: [ID]): [Work] }
             type Work { doi: ID citationCount: Int title: String related: [Work] }",
        )
        .unwrap()
    }

    fn kinds(src: &str) -> Vec<ValidationErrorKind> {
        validate(&parse_query(src).unwrap(), &schema()).into_iter().map(|e| e.kind).collect()
    }

    #[test]
    fn valid_document() {
        assert!(kinds(r#"{ work(id: "10.1/x") { doi citationCount related { doi } __typename } }"#).is_empty());
        assert!(kinds("query ($d: String) { work(id: $d) { doi } }").is_empty());
        assert!(kinds("query ($d: [ID]) { works(ids: $d) { doi } }").is_empty());
        assert!(kinds(r#"{ works(ids: ["a", 1]) { doi } }"#).is_empty());
    }

    #[test]
    fn unknown_field_path() {
        let errs = validate(&parse_query("{ frobnicate }").unwrap(), &schema());
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ValidationErrorKind::UnknownField);
        assert_eq!(errs[0].path, ["frobnicate"]);
    }

    #[test]
    fn leaf_and_composite_selection_rules() {
        assert_eq!(kinds("{ work(id: 1) { doi { x } } }"), [ValidationErrorKind::SelectionOnLeaf]);
        assert_eq!(kinds("{ work(id: 1) }"), [ValidationErrorKind::MissingSelection]);
    }

    #[test]
    fn argument_rules() {
        assert_eq!(kinds("{ work(nope: 1) { doi } }"), [ValidationErrorKind::UnknownArgument]);
        assert_eq!(kinds("{ work(id: true) { doi } }"), [ValidationErrorKind::ArgumentKindMismatch]);
        assert_eq!(kinds("{ work(id: 1.5) { doi } }"), [ValidationErrorKind::ArgumentKindMismatch]);
        assert_eq!(kinds("query ($b: Boolean) { work(id: $b) { doi } }"), [ValidationErrorKind::ArgumentKindMismatch]);
    }
}
