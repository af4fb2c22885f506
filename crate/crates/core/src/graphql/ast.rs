use indexmap::IndexMap;

/// A single-operation query document.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub operation: Operation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    pub name: Option<String>,
    pub variables: Vec<VariableDef>,
    pub selection_set: SelectionSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableDef {
    pub name: String,
    pub ty: TypeRef,
    pub default: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Named(String),
    List(Box<TypeRef>),
    NonNull(Box<TypeRef>),
}

impl TypeRef {
    pub fn named(name: impl Into<String>) -> TypeRef {
        TypeRef::Named(name.into())
    }

    pub fn list_of(inner: TypeRef) -> TypeRef {
        TypeRef::List(Box::new(inner))
    }

    /// Innermost named type.
    pub fn base(&self) -> &str {
        match self {
            TypeRef::Named(n) => n,
            TypeRef::List(inner) | TypeRef::NonNull(inner) => inner.base(),
        }
    }

    pub fn nullable(&self) -> &TypeRef {
        match self {
            TypeRef::NonNull(inner) => inner.nullable(),
            other => other,
        }
    }

    pub fn is_list(&self) -> bool {
        matches!(self.nullable(), TypeRef::List(_))
    }

    /// Element type of a list, `None` for non-list types.
    pub fn element(&self) -> Option<&TypeRef> {
        match self.nullable() {
            TypeRef::List(inner) => Some(inner),
            _ => None,
        }
    }

    pub fn list_depth(&self) -> usize {
        match self {
            TypeRef::Named(_) => 0,
            TypeRef::List(inner) => 1 + inner.list_depth(),
            TypeRef::NonNull(inner) => inner.list_depth(),
        }
    }
}

impl std::fmt::Display for TypeRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TypeRef::Named(n) => f.write_str(n),
            TypeRef::List(inner) => write!(f, "[{inner}]"),
            TypeRef::NonNull(inner) => write!(f, "{inner}!"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelectionSet {
    pub fields: Vec<Field>,
}

impl SelectionSet {
    pub fn new(fields: Vec<Field>) -> SelectionSet {
        SelectionSet { fields }
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub alias: Option<String>,
    pub name: String,
    pub arguments: IndexMap<String, Value>,
    pub selection_set: Option<SelectionSet>,
}

impl Field {
    pub fn leaf(name: impl Into<String>) -> Field {
        Field { alias: None, name: name.into(), arguments: IndexMap::new(), selection_set: None }
    }

    pub fn object(name: impl Into<String>, fields: Vec<Field>) -> Field {
        Field {
            alias: None,
            name: name.into(),
            arguments: IndexMap::new(),
            selection_set: Some(SelectionSet::new(fields)),
        }
    }

    pub fn with_alias(mut self, alias: impl Into<String>) -> Field {
        self.alias = Some(alias.into());
        self
    }

    pub fn with_arg(mut self, name: impl Into<String>, value: Value) -> Field {
        self.arguments.insert(name.into(), value);
        self
    }

    /// Alias if present, otherwise the field name.
    pub fn response_key(&self) -> &str {
        self.alias.as_deref().unwrap_or(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Variable(String),
    Int(i64),
    Float(f64),
    String(String),
    Boolean(bool),
    Null,
    Enum(String),
    List(Vec<Value>),
}

impl Value {
    pub fn collect_variables<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Value::Variable(v) => out.push(v),
            Value::List(items) => items.iter().for_each(|i| i.collect_variables(out)),
            _ => {}
        }
    }
}

impl Document {
    pub fn new(selection_set: SelectionSet) -> Document {
        Document { operation: Operation { name: None, variables: Vec::new(), selection_set } }
    }

    pub fn selection_set(&self) -> &SelectionSet {
        &self.operation.selection_set
    }

    /// Names of all variables referenced anywhere in the selection set, in
    /// first-use order.
    pub fn referenced_variables(&self) -> Vec<String> {
        fn walk<'a>(set: &'a SelectionSet, out: &mut Vec<&'a str>) {
            for f in &set.fields {
                f.arguments.values().for_each(|v| v.collect_variables(out));
                if let Some(s) = &f.selection_set {
                    walk(s, out);
                }
            }
        }
        let mut names = Vec::new();
        walk(&self.operation.selection_set, &mut names);
        let mut seen = indexmap::IndexSet::new();
        for n in names {
            seen.insert(n.to_string());
        }
        seen.into_iter().collect()
    }
}
