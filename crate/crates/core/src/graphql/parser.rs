use indexmap::{IndexMap, IndexSet};

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Parses the supported query subset: one `query` operation, fields,
/// aliases, arguments and nested selections.
pub fn parse_query(text: &str) -> Result<Document, ParseError> {
    let mut cur = Cursor::new(tokenize(text)?);
    let operation = cur.operation()?;
    match &cur.peek().tok {
        Tok::Eof => {}
        Tok::Punct('{') => return Err(cur.unsupported("multiple operations")),
        Tok::Name(n) if matches!(n.as_str(), "query" | "mutation" | "subscription" | "fragment") => {
            let feature = if n == "fragment" { "fragments" } else { "multiple operations" };
            return Err(cur.unsupported(feature));
        }
        _ => return Err(cur.syntax("expected end of document")),
    }
    let doc = Document { operation };
    check_variables(&doc)?;
    Ok(doc)
}

fn check_variables(doc: &Document) -> Result<(), ParseError> {
    let mut declared = IndexSet::new();
    for v in &doc.operation.variables {
        if !declared.insert(v.name.as_str()) {
            return Err(ParseError::Invalid(format!("variable `${}` declared twice", v.name)));
        }
        if let Some(d) = &v.default {
            let mut used = Vec::new();
            d.collect_variables(&mut used);
            if !used.is_empty() {
                return Err(ParseError::Invalid(format!("default of `${}` must be constant", v.name)));
            }
        }
    }
    for name in doc.referenced_variables() {
        if !declared.contains(name.as_str()) {
            return Err(ParseError::Invalid(format!("variable `${name}` is used but not declared")));
        }
    }
    Ok(())
}

pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(tokens: Vec<Token>) -> Cursor {
        Cursor { tokens, pos: 0 }
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    pub(crate) fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub(crate) fn syntax(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::Syntax { line: t.line, column: t.column, message: message.into() }
    }

    pub(crate) fn unsupported(&self, feature: &str) -> ParseError {
        let t = self.peek();
        ParseError::Unsupported { line: t.line, column: t.column, feature: feature.into() }
    }

    pub(crate) fn is_punct(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    pub(crate) fn eat_punct(&mut self, c: char) -> bool {
        if self.is_punct(c) {
            self.next();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`, found {}", describe(&self.peek().tok))))
        }
    }

    pub(crate) fn name(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Name(n) => {
                let n = n.clone();
                self.next();
                Ok(n)
            }
            other => Err(self.syntax(format!("expected a name, found {}", describe(other)))),
        }
    }

    pub(crate) fn peek_name(&self) -> Option<&str> {
        match &self.peek().tok {
            Tok::Name(n) => Some(n),
            _ => None,
        }
    }

    fn reject_extensions(&self) -> Result<(), ParseError> {
        match &self.peek().tok {
            Tok::Punct('@') => Err(self.unsupported("directives")),
            Tok::Spread => Err(self.unsupported("fragments")),
            _ => Ok(()),
        }
    }

    fn operation(&mut self) -> Result<Operation, ParseError> {
        let mut name = None;
        let mut variables = Vec::new();
        match self.peek_name() {
            Some("query") => {
                self.next();
                if self.peek_name().is_some() {
                    name = Some(self.name()?);
                }
                if self.is_punct('(') {
                    variables = self.variable_defs()?;
                }
                self.reject_extensions()?;
            }
            Some("mutation") => return Err(self.unsupported("mutations")),
            Some("subscription") => return Err(self.unsupported("subscriptions")),
            Some("fragment") => return Err(self.unsupported("fragments")),
            Some(_) => return Err(self.syntax("expected `query` or `{`")),
            None => {}
        }
        if !self.is_punct('{') {
            return Err(self.syntax(format!("expected `{{`, found {}", describe(&self.peek().tok))));
        }
        let selection_set = self.selection_set()?;
        Ok(Operation { name, variables, selection_set })
    }

    fn variable_defs(&mut self) -> Result<Vec<VariableDef>, ParseError> {
        self.expect_punct('(')?;
        let mut defs = Vec::new();
        while !self.eat_punct(')') {
            self.expect_punct('$')?;
            let name = self.name()?;
            self.expect_punct(':')?;
            let ty = self.type_ref(true)?;
            let default = if self.eat_punct('=') { Some(self.value(true)?) } else { None };
            self.reject_extensions()?;
            defs.push(VariableDef { name, ty, default });
        }
        if defs.is_empty() {
            return Err(self.syntax("empty variable list"));
        }
        Ok(defs)
    }

    pub(crate) fn type_ref(&mut self, allow_non_null: bool) -> Result<TypeRef, ParseError> {
        let base = if self.eat_punct('[') {
            let inner = self.type_ref(allow_non_null)?;
            self.expect_punct(']')?;
            TypeRef::List(Box::new(inner))
        } else {
            TypeRef::Named(self.name()?)
        };
        if self.is_punct('!') {
            if !allow_non_null {
                return Err(self.unsupported("non-null markers in schema definitions"));
            }
            self.next();
            return Ok(TypeRef::NonNull(Box::new(base)));
        }
        Ok(base)
    }

    fn selection_set(&mut self) -> Result<SelectionSet, ParseError> {
        self.expect_punct('{')?;
        let mut fields: Vec<Field> = Vec::new();
        let mut keys = IndexSet::new();
        while !self.eat_punct('}') {
            if self.at_eof() {
                return Err(self.syntax("unterminated selection set"));
            }
            self.reject_extensions()?;
            let (line, column) = (self.peek().line, self.peek().column);
            let field = self.field()?;
            if !keys.insert(field.response_key().to_string()) {
                return Err(ParseError::Syntax {
                    line,
                    column,
                    message: format!("duplicate response key `{}`", field.response_key()),
                });
            }
            fields.push(field);
        }
        if fields.is_empty() {
            return Err(self.syntax("empty selection set"));
        }
        Ok(SelectionSet { fields })
    }

    fn field(&mut self) -> Result<Field, ParseError> {
        let first = self.name()?;
        let (alias, name) = if self.eat_punct(':') { (Some(first), self.name()?) } else { (None, first) };
        let mut arguments = IndexMap::new();
        if self.eat_punct('(') {
            while !self.eat_punct(')') {
                let arg = self.name()?;
                self.expect_punct(':')?;
                let value = self.value(false)?;
                if arguments.insert(arg.clone(), value).is_some() {
                    return Err(self.syntax(format!("duplicate argument `{arg}`")));
                }
            }
            if arguments.is_empty() {
                return Err(self.syntax("empty argument list"));
            }
        }
        self.reject_extensions()?;
        let selection_set = if self.is_punct('{') { Some(self.selection_set()?) } else { None };
        Ok(Field { alias, name, arguments, selection_set })
    }

    fn value(&mut self, constant: bool) -> Result<Value, ParseError> {
        let t = self.next();
        Ok(match t.tok {
            Tok::Punct('$') => {
                if constant {
                    return Err(ParseError::Syntax { line: t.line, column: t.column, message: "variables are not allowed here".into() });
                }
                Value::Variable(self.name()?)
            }
            Tok::Int(i) => Value::Int(i),
            Tok::Float(f) => Value::Float(f),
            Tok::Str(s) => Value::String(s),
            Tok::Name(n) => match n.as_str() {
                "true" => Value::Boolean(true),
                "false" => Value::Boolean(false),
                "null" => Value::Null,
                _ => Value::Enum(n),
            },
            Tok::Punct('[') => {
                let mut items = Vec::new();
                while !self.eat_punct(']') {
                    if self.at_eof() {
                        return Err(self.syntax("unterminated list"));
                    }
                    items.push(self.value(constant)?);
                }
                Value::List(items)
            }
            Tok::Punct('{') => {
                return Err(ParseError::Unsupported { line: t.line, column: t.column, feature: "input objects".into() })
            }
            other => {
                return Err(ParseError::Syntax { line: t.line, column: t.column, message: format!("expected a value, found {}", describe(&other)) })
            }
        })
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Punct(c) => format!("`{c}`"),
        Tok::Spread => "`...`".into(),
        Tok::Name(n) => format!("`{n}`"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::Float(f) => format!("`{f}`"),
        Tok::Str(_) => "a string".into(),
        Tok::Eof => "end of input".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_work_query() {
        let doc = parse_query(r#"{ work(id: "10.1101/2020.03.08.20030643") { citationCount } }"#).unwrap();
        let root = &doc.operation.selection_set.fields;
        assert_eq!(root.len(), 1);
        assert_eq!(root[0].name, "work");
        assert_eq!(root[0].arguments.len(), 1);
        assert_eq!(root[0].arguments["id"], Value::String("10.1101/2020.03.08.20030643".into()));
        let sub = root[0].selection_set.as_ref().unwrap();
        assert_eq!(sub.fields[0].name, "citationCount");
    }

    #[test]
    fn sibling_fields() {
        let doc = parse_query("{ a b }").unwrap();
        let names: Vec<_> = doc.operation.selection_set.fields.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["a", "b"]);
    }

    #[test]
    fn rejects_unsupported_features() {
        for src in [
            "mutation { x }",
            "subscription { x }",
            "fragment F on T { x }",
            "{ a { ...F } }",
            "{ a @skip(if: true) }",
            "{ a } { b }",
            "query A { a } query B { b }",
            r#"{ a(x: """block""") }"#,
            "{ a(x: {k: 1}) }",
        ] {
            assert!(matches!(parse_query(src), Err(ParseError::Unsupported { .. })), "{src}");
        }
    }

    #[test]
    fn syntax_errors_carry_location() {
        match parse_query("{\n  a(x: )\n}") {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 8)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn variables_and_comments() {
        let src = "# leading comment\nquery Q($doi: ID!, $n: Int = 3) {\n  work(id: $doi) { n: citationCount } # trailing\n}";
        let doc = parse_query(src).unwrap();
        assert_eq!(doc.operation.name.as_deref(), Some("Q"));
        assert_eq!(doc.operation.variables.len(), 2);
        assert_eq!(doc.operation.variables[1].default, Some(Value::Int(3)));
        let work = &doc.operation.selection_set.fields[0];
        assert_eq!(work.selection_set.as_ref().unwrap().fields[0].response_key(), "n");
    }

    #[test]
    fn undeclared_variable_is_rejected() {
        assert!(matches!(parse_query("{ work(id: $doi) { a } }"), Err(ParseError::Invalid(_))));
    }

    #[test]
    fn duplicate_keys_and_arguments_are_rejected() {
        assert!(parse_query("{ a a }").is_err());
        assert!(parse_query("{ x: a x: b }").is_err());
        assert!(parse_query("{ a(x: 1, x: 2) }").is_err());
        assert!(parse_query("{ a b: a }").is_ok());
    }

    #[test]
    fn scalar_values() {
        let doc = parse_query(r#"{ f(a: -12, b: 2.5e-3, c: "q\"é\n", d: true, e: null, g: ASIA, h: [1, 2]) }"#).unwrap();
        let args = &doc.operation.selection_set.fields[0].arguments;
        assert_eq!(args["a"], Value::Int(-12));
        assert_eq!(args["b"], Value::Float(2.5e-3));
        assert_eq!(args["c"], Value::String("q\"é\n".into()));
        assert_eq!(args["d"], Value::Boolean(true));
        assert_eq!(args["e"], Value::Null);
        assert_eq!(args["g"], Value::Enum("ASIA".into()));
        assert_eq!(args["h"], Value::List(vec![Value::Int(1), Value::Int(2)]));
    }

    #[test]
    fn int_overflow_is_a_syntax_error() {
        assert!(matches!(parse_query("{ f(a: 99999999999999999999) }"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_query("{ f(a: 007) }"), Err(ParseError::Syntax { .. })));
    }
}
