//! Object-type schemas and a small SDL reader/writer.
//!
//! The SDL subset is `type Name { field(arg: Type): Type }` with `[T]` list
//! markers and `#` comments. All fields are nullable.

use std::fmt::Write;

use indexmap::IndexMap;
use thiserror::Error;

use super::ast::TypeRef;
use super::lexer::{tokenize, Tok};
use super::parser::Cursor;
use super::ParseError;

pub const SCALARS: [&str; 5] = ["String", "Int", "Float", "Boolean", "ID"];

pub fn is_scalar(name: &str) -> bool {
    SCALARS.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("query root type `{0}` is not declared")]
    MissingRoot(String),
    #[error("`{owner}.{field}` refers to undeclared type `{ty}`")]
    UndeclaredType { owner: String, field: String, ty: String },
    #[error("argument `{owner}.{field}({arg})` must be a scalar or list of scalars, found `{ty}`")]
    NonScalarArgument { owner: String, field: String, arg: String, ty: String },
    #[error("type `{0}` declared twice")]
    DuplicateType(String),
    #[error("field `{owner}.{field}` declared twice")]
    DuplicateField { owner: String, field: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDef {
    pub name: String,
    pub args: IndexMap<String, TypeRef>,
    pub ty: TypeRef,
    /// Name of the upstream that serves this field, when known.
    pub source: Option<String>,
}

impl FieldDef {
    pub fn new(name: impl Into<String>, ty: TypeRef) -> FieldDef {
        FieldDef { name: name.into(), args: IndexMap::new(), ty, source: None }
    }

    pub fn with_arg(mut self, name: impl Into<String>, ty: TypeRef) -> FieldDef {
        self.args.insert(name.into(), ty);
        self
    }

    pub fn is_leaf(&self) -> bool {
        is_scalar(self.ty.base())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectType {
    pub name: String,
    pub fields: IndexMap<String, FieldDef>,
}

impl ObjectType {
    pub fn new(name: impl Into<String>) -> ObjectType {
        ObjectType { name: name.into(), fields: IndexMap::new() }
    }

    pub fn field(mut self, def: FieldDef) -> ObjectType {
        self.fields.insert(def.name.clone(), def);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub types: IndexMap<String, ObjectType>,
    pub query_root: String,
}

impl Schema {
    /// Builds a schema and checks that every referenced type exists.
    pub fn new(types: Vec<ObjectType>, query_root: impl Into<String>) -> Result<Schema, SchemaError> {
        let mut map = IndexMap::new();
        for t in types {
            let name = t.name.clone();
            if map.insert(name.clone(), t).is_some() {
                return Err(SchemaError::DuplicateType(name));
            }
        }
        let schema = Schema { types: map, query_root: query_root.into() };
        schema.check()?;
        Ok(schema)
    }

    pub fn check(&self) -> Result<(), SchemaError> {
        if !self.types.contains_key(&self.query_root) {
            return Err(SchemaError::MissingRoot(self.query_root.clone()));
        }
        for t in self.types.values() {
            for f in t.fields.values() {
                let base = f.ty.base();
                if !is_scalar(base) && !self.types.contains_key(base) {
                    return Err(SchemaError::UndeclaredType { owner: t.name.clone(), field: f.name.clone(), ty: base.into() });
                }
                for (arg, ty) in &f.args {
                    if !is_scalar(ty.base()) {
                        return Err(SchemaError::NonScalarArgument {
                            owner: t.name.clone(),
                            field: f.name.clone(),
                            arg: arg.clone(),
                            ty: ty.to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn root(&self) -> &ObjectType {
        &self.types[&self.query_root]
    }

    pub fn object(&self, name: &str) -> Option<&ObjectType> {
        self.types.get(name)
    }

    pub fn field(&self, type_name: &str, field: &str) -> Option<&FieldDef> {
        self.types.get(type_name)?.fields.get(field)
    }

    /// Tags every field with the given source name.
    pub fn with_source(mut self, source: &str) -> Schema {
        for t in self.types.values_mut() {
            for f in t.fields.values_mut() {
                f.source = Some(source.to_string());
            }
        }
        self
    }

    /// Reads the SDL subset. The root is `Query` unless a
    /// `schema { query: Name }` block says otherwise.
    pub fn parse_sdl(text: &str) -> Result<Schema, SchemaError> {
        let mut cur = Cursor::new(tokenize(text)?);
        let mut types = Vec::new();
        let mut root = "Query".to_string();
        while !cur.at_eof() {
            match cur.peek_name() {
                Some("type") => {
                    cur.next();
                    let name = cur.name()?;
                    cur.expect_punct('{')?;
                    let mut obj = ObjectType::new(name.clone());
                    while !cur.eat_punct('}') {
                        if cur.at_eof() {
                            return Err(cur.syntax("unterminated type body").into());
                        }
                        let field = cur.name()?;
                        let mut def = FieldDef::new(field.clone(), TypeRef::named("String"));
                        if cur.eat_punct('(') {
                            while !cur.eat_punct(')') {
                                let arg = cur.name()?;
                                cur.expect_punct(':')?;
                                let ty = cur.type_ref(false)?;
                                def.args.insert(arg, ty);
                            }
                        }
                        cur.expect_punct(':')?;
                        def.ty = cur.type_ref(false)?;
                        if obj.fields.insert(field.clone(), def).is_some() {
                            return Err(SchemaError::DuplicateField { owner: name, field });
                        }
                    }
                    types.push(obj);
                }
                Some("schema") => {
                    cur.next();
                    cur.expect_punct('{')?;
                    while !cur.eat_punct('}') {
                        let op = cur.name()?;
                        cur.expect_punct(':')?;
                        let ty = cur.name()?;
                        if op != "query" {
                            return Err(cur.unsupported("operations other than query").into());
                        }
                        root = ty;
                    }
                }
                _ => {
                    let found = match &cur.peek().tok {
                        Tok::Name(n) => n.clone(),
                        other => format!("{other:?}"),
                    };
                    return Err(cur.syntax(format!("expected `type`, found `{found}`")).into());
                }
            }
        }
        Schema::new(types, root)
    }

    pub fn to_sdl(&self) -> String {
        let mut out = String::new();
        if self.query_root != "Query" {
            let _ = writeln!(out, "schema {{\n  query: {}\n}}\n", self.query_root);
        }
        for (i, t) in self.types.values().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "type {} {{", t.name);
            for f in t.fields.values() {
                out.push_str("  ");
                out.push_str(&f.name);
                if !f.args.is_empty() {
                    out.push('(');
                    let args: Vec<String> = f.args.iter().map(|(n, t)| format!("{n}: {t}")).collect();
                    out.push_str(&args.join(", "));
                    out.push(')');
                }
                let _ = writeln!(out, ": {}", f.ty);
            }
            out.push_str("}\n");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SDL: &str = "
        # gazetteer
        type Query {
          place(geonameId: ID): Place
          countriesOf(continentCode: String): [Place]
        }
        type Place { geonameId: ID name: String }
    ";

    #[test]
    fn parses_and_prints_sdl() {
        let schema = Schema::parse_sdl(SDL).unwrap();
        assert_eq!(schema.query_root, "Query");
        let f = schema.field("Query", "countriesOf").unwrap();
        assert!(f.ty.is_list());
        assert_eq!(f.args["continentCode"], TypeRef::named("String"));
        let again = Schema::parse_sdl(&schema.to_sdl()).unwrap();
        assert_eq!(again, schema);
    }

    #[test]
    fn undeclared_return_type() {
        let err = Schema::parse_sdl("type Query { a: Missing }").unwrap_err();
        assert!(matches!(err, SchemaError::UndeclaredType { .. }));
    }

    #[test]
    fn missing_root() {
        assert!(matches!(Schema::parse_sdl("type Foo { a: Int }"), Err(SchemaError::MissingRoot(_))));
    }

    #[test]
    fn non_null_is_rejected_in_sdl() {
        assert!(Schema::parse_sdl("type Query { a: Int! }").is_err());
    }

    #[test]
    fn custom_root() {
        let s = Schema::parse_sdl("schema { query: Root } type Root { a: Int }").unwrap();
        assert_eq!(s.query_root, "Root");
        assert!(s.to_sdl().starts_with("schema {"));
    }
}
