//! The GraphQL subset spoken by the gateway and the upstream mocks.

pub mod ast;
mod execute;
mod lexer;
mod parser;
mod printer;
mod response;
pub mod schema;
mod validate;

use serde::Deserialize;
use serde_json::{Map, Value as Json};
use thiserror::Error;

pub use ast::{Document, Field, Operation, SelectionSet, TypeRef, Value, VariableDef};
pub use execute::{execute, literal_to_json, ExecError, FieldError, ResolveInfo, Resolver, Resolvers};
pub use parser::parse_query;
pub use printer::print_query;
pub use response::{path_to_string, GraphQLError, MalformedResponse, PathSegment, ResponseDocument};
pub use schema::{FieldDef, ObjectType, Schema, SchemaError};
pub use validate::{validate, ValidationError, ValidationErrorKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported feature at {line}:{column}: {feature}")]
    Unsupported { line: usize, column: usize, feature: String },
    #[error("invalid document: {0}")]
    Invalid(String),
}

/// Body of a GraphQL-over-HTTP POST.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct GraphQLRequest {
    pub query: String,
    #[serde(default)]
    pub variables: Option<Map<String, Json>>,
    #[serde(default, rename = "operationName")]
    pub operation_name: Option<String>,
}

/// Parses, validates and executes one request. Failures before execution
/// come back as an errors-only response.
pub fn run_request(schema: &Schema, resolvers: &Resolvers, query: &str, variables: &Map<String, Json>) -> ResponseDocument {
    let doc = match parse_query(query) {
        Ok(d) => d,
        Err(e) => return ResponseDocument::failure(vec![GraphQLError::new(e.to_string(), Vec::new())]),
    };
    let problems = validate(&doc, schema);
    if !problems.is_empty() {
        return ResponseDocument::failure(
            problems.into_iter().map(|p| GraphQLError::new(p.to_string(), Vec::new())).collect(),
        );
    }
    execute(&doc, schema, resolvers, variables)
        .unwrap_or_else(|e| ResponseDocument::failure(vec![GraphQLError::new(e.to_string(), Vec::new())]))
}
