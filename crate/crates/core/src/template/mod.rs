//! Class-bound templates: property shapes, instance validation and
//! linking of values to third-party resources.

mod format;
mod lookup;

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::model::{Datatype, Object};
use crate::pid::GEONAMES_URL_PREFIX;
use crate::store::{StatementStore, StoreError};

pub use format::parse_templates;
pub use lookup::{
    link_location, lookup_external_class, ClassProvider, ClassProviderRegistry, ExternalClassRef, GazetteerClasses,
    PlaceHit, PlaceSearch, ProviderKind,
};

/// Identifier of the confidence-interval class in the statistics ontology.
pub const STATO_CONFIDENCE_INTERVAL: &str = "http://purl.obolibrary.org/obo/STATO_0000196";
/// Class attributed to gazetteer records referenced by URL.
pub const GAZETTEER_FEATURE: &str = "GeoNamesFeature";

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("property `{0}` has more than one shape")]
    DuplicateShapeProperty(String),
    #[error("shape `{property}`: {detail}")]
    BadBounds { property: String, detail: String },
    #[error("template `{0}` has no property shapes")]
    NoShapes(String),
    #[error("`{0}` is not an absolute IRI")]
    BadIri(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("resource `{0}` does not exist")]
    UnknownResource(String),
    #[error("instance violates {} constraint(s)", .0.len())]
    ValidationFailed(Vec<Violation>),
    #[error("search text is empty")]
    EmptyQuery,
    #[error("no gazetteer match for `{0}`")]
    NoMatch(String),
    #[error("provider `{0}` is not registered")]
    UnknownProvider(String),
    #[error("upstream unreachable: {0}")]
    UpstreamUnreachable(String),
    #[error(transparent)]
    Pid(#[from] crate::pid::PidError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeDatatype {
    Number,
    String,
    Boolean,
    Resource,
}

impl ShapeDatatype {
    pub fn as_str(self) -> &'static str {
        match self {
            ShapeDatatype::Number => "Number",
            ShapeDatatype::String => "String",
            ShapeDatatype::Boolean => "Boolean",
            ShapeDatatype::Resource => "Resource",
        }
    }

    pub fn parse(s: &str) -> Option<ShapeDatatype> {
        Some(match s {
            "Number" => ShapeDatatype::Number,
            "String" => ShapeDatatype::String,
            "Boolean" => ShapeDatatype::Boolean,
            "Resource" => ShapeDatatype::Resource,
            _ => return None,
        })
    }
}

impl fmt::Display for ShapeDatatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyShape {
    pub property: String,
    pub datatype: ShapeDatatype,
    pub min_count: usize,
    pub max_count: Option<usize>,
    pub min_value: Option<f64>,
    pub max_value: Option<f64>,
    pub range_class: Option<String>,
}

impl PropertyShape {
    pub fn new(property: impl Into<String>, datatype: ShapeDatatype) -> PropertyShape {
        PropertyShape {
            property: property.into(),
            datatype,
            min_count: 0,
            max_count: None,
            min_value: None,
            max_value: None,
            range_class: None,
        }
    }

    pub fn count(mut self, min: usize, max: Option<usize>) -> PropertyShape {
        self.min_count = min;
        self.max_count = max;
        self
    }

    pub fn range(mut self, min: Option<f64>, max: Option<f64>) -> PropertyShape {
        self.min_value = min;
        self.max_value = max;
        self
    }

    pub fn class(mut self, class: impl Into<String>) -> PropertyShape {
        self.range_class = Some(class.into());
        self
    }

    fn check(&self) -> Result<(), TemplateError> {
        let bad = |detail: String| TemplateError::BadBounds { property: self.property.clone(), detail };
        if let Some(max) = self.max_count {
            if max < self.min_count {
                return Err(bad(format!("maxCount {max} is below minCount {}", self.min_count)));
            }
        }
        if self.datatype != ShapeDatatype::Number && (self.min_value.is_some() || self.max_value.is_some()) {
            return Err(bad("value range only applies to Number".into()));
        }
        if let (Some(lo), Some(hi)) = (self.min_value, self.max_value) {
            if lo > hi {
                return Err(bad(format!("minValue {lo} exceeds maxValue {hi}")));
            }
        }
        if self.datatype != ShapeDatatype::Resource && self.range_class.is_some() {
            return Err(bad("range class only applies to Resource".into()));
        }
        Ok(())
    }
}

/// Unchecked template description, turned into a [`Template`] by
/// [`define_template`].
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateSpec {
    pub id: String,
    pub label: String,
    pub target_class: String,
    pub shapes: Vec<PropertyShape>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    id: String,
    label: String,
    target_class: String,
    shapes: Vec<PropertyShape>,
}

impl Template {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn target_class(&self) -> &str {
        &self.target_class
    }

    pub fn shapes(&self) -> &[PropertyShape] {
        &self.shapes
    }

    pub fn shape(&self, property: &str) -> Option<&PropertyShape> {
        self.shapes.iter().find(|s| s.property == property)
    }
}

pub fn define_template(spec: TemplateSpec) -> Result<Template, TemplateError> {
    if spec.shapes.is_empty() {
        return Err(TemplateError::NoShapes(spec.id));
    }
    if spec.target_class.is_empty() || (spec.target_class.contains(':') && !looks_like_iri(&spec.target_class)) {
        return Err(TemplateError::BadIri(spec.target_class));
    }
    let mut seen = std::collections::HashSet::new();
    for shape in &spec.shapes {
        if !seen.insert(shape.property.as_str()) {
            return Err(TemplateError::DuplicateShapeProperty(shape.property.clone()));
        }
        shape.check()?;
    }
    Ok(Template { id: spec.id, label: spec.label, target_class: spec.target_class, shapes: spec.shapes })
}

/// Templates keyed by id.
#[derive(Debug, Clone, Default)]
pub struct TemplateCatalog {
    templates: IndexMap<String, Template>,
}

impl TemplateCatalog {
    pub fn new() -> TemplateCatalog {
        TemplateCatalog::default()
    }

    pub fn define(&mut self, spec: TemplateSpec) -> Result<&Template, TemplateError> {
        let t = define_template(spec)?;
        let id = t.id.clone();
        self.templates.insert(id.clone(), t);
        Ok(&self.templates[&id])
    }

    pub fn load_text(&mut self, text: &str) -> Result<usize, TemplateError> {
        let specs = parse_templates(text)?;
        let n = specs.len();
        for spec in specs {
            self.define(spec)?;
        }
        Ok(n)
    }

    pub fn get(&self, id: &str) -> Option<&Template> {
        self.templates.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Template> {
        self.templates.values()
    }
}

/// Template for a confidence interval with mandatory bounds and an optional
/// level in `[0, 1]`.
pub fn confidence_interval_template() -> Template {
    define_template(TemplateSpec {
        id: "confidence-interval".into(),
        label: "Confidence interval".into(),
        target_class: STATO_CONFIDENCE_INTERVAL.into(),
        shapes: vec![
            PropertyShape::new(crate::store::vocab::LOWER_BOUND, ShapeDatatype::Number).count(1, Some(1)),
            PropertyShape::new(crate::store::vocab::UPPER_BOUND, ShapeDatatype::Number).count(1, Some(1)),
            PropertyShape::new(crate::store::vocab::LEVEL, ShapeDatatype::Number).range(Some(0.0), Some(1.0)),
        ],
    })
    .expect("built-in template is valid")
}

pub fn location_template() -> Template {
    define_template(TemplateSpec {
        id: "location".into(),
        label: "Location".into(),
        target_class: crate::store::vocab::DC_LOCATION.into(),
        shapes: vec![PropertyShape::new(crate::store::vocab::SAME_AS, ShapeDatatype::Resource)
            .count(0, Some(1))
            .class(GAZETTEER_FEATURE)],
    })
    .expect("built-in template is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    MissingProperty,
    TooMany,
    WrongDatatype,
    OutOfRange,
    WrongClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub property: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({}): {}", self.kind, self.property, self.detail)
    }
}

/// Classes attributed to external IRIs by their namespace.
pub fn external_classes(iri: &str) -> &'static [&'static str] {
    let geonames_http = "http://www.geonames.org/";
    if iri.starts_with(GEONAMES_URL_PREFIX) || iri.starts_with(geonames_http) || iri.starts_with("https://sws.geonames.org/") {
        &[GAZETTEER_FEATURE]
    } else {
        &[]
    }
}

pub(crate) fn looks_like_iri(s: &str) -> bool {
    let Some((scheme, rest)) = s.split_once(':') else { return false };
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        && !rest.is_empty()
        && !s.chars().any(char::is_whitespace)
}

enum Value<'a> {
    Number(f64),
    Other,
    Resource(&'a str),
    Iri(&'a str),
}

fn classify(object: &Object, datatype: ShapeDatatype) -> Option<Value<'_>> {
    match (datatype, object) {
        (ShapeDatatype::Resource, Object::Resource(id)) => Some(Value::Resource(id)),
        (ShapeDatatype::Resource, Object::Literal(l))
            if l.datatype() == Datatype::String && looks_like_iri(l.lexical()) =>
        {
            Some(Value::Iri(l.lexical()))
        }
        (ShapeDatatype::Number, Object::Literal(l)) if l.datatype() == Datatype::Number => l.as_number().map(Value::Number),
        (ShapeDatatype::String, Object::Literal(l)) if l.datatype() == Datatype::String => Some(Value::Other),
        (ShapeDatatype::Boolean, Object::Literal(l)) if l.datatype() == Datatype::Boolean => Some(Value::Other),
        _ => None,
    }
}

fn describe(object: &Object) -> String {
    match object {
        Object::Resource(id) => format!("resource {id}"),
        Object::Literal(l) => format!("{:?} literal {:?}", l.datatype(), l.lexical()),
    }
}

/// Checks the statements of `root` against each shape of `template`.
pub fn validate_instance(store: &StatementStore, root: &str, template: &Template) -> Vec<Violation> {
    let mut out = Vec::new();
    for shape in &template.shapes {
        let values: Vec<&Object> = store.objects(root, &shape.property).collect();
        let violation = |kind, detail: String| Violation { kind, property: shape.property.clone(), detail };
        if values.len() < shape.min_count {
            out.push(violation(
                ViolationKind::MissingProperty,
                format!("expected at least {} value(s), found {}", shape.min_count, values.len()),
            ));
        }
        if let Some(max) = shape.max_count {
            if values.len() > max {
                out.push(violation(ViolationKind::TooMany, format!("expected at most {max} value(s), found {}", values.len())));
            }
        }
        for object in values {
            match classify(object, shape.datatype) {
                None => out.push(violation(
                    ViolationKind::WrongDatatype,
                    format!("expected {}, found {}", shape.datatype, describe(object)),
                )),
                Some(Value::Number(n)) => {
                    let below = shape.min_value.is_some_and(|lo| n < lo);
                    let above = shape.max_value.is_some_and(|hi| n > hi);
                    if below || above {
                        out.push(violation(
                            ViolationKind::OutOfRange,
                            format!(
                                "{n} outside [{}, {}]",
                                shape.min_value.map_or("-inf".into(), |v| v.to_string()),
                                shape.max_value.map_or("inf".into(), |v| v.to_string())
                            ),
                        ));
                    }
                }
                Some(Value::Resource(id)) => {
                    if let Some(class) = &shape.range_class {
                        if !store.resource(id).is_some_and(|r| r.has_class(class)) {
                            out.push(violation(ViolationKind::WrongClass, format!("{id} is not a {class}")));
                        }
                    }
                }
                Some(Value::Iri(iri)) => {
                    if let Some(class) = &shape.range_class {
                        if !external_classes(iri).contains(&class.as_str()) {
                            out.push(violation(ViolationKind::WrongClass, format!("{iri} is not a {class}")));
                        }
                    }
                }
                Some(Value::Other) => {}
            }
        }
    }
    out
}

/// Asserts the template's class on a conforming instance. Returns 1 when the
/// class was added and 0 when it was already present.
pub fn apply_template(store: &mut StatementStore, root: &str, template: &Template) -> Result<usize, TemplateError> {
    if store.resource(root).is_none() {
        return Err(TemplateError::UnknownResource(root.to_string()));
    }
    let violations = validate_instance(store, root, template);
    if !violations.is_empty() {
        return Err(TemplateError::ValidationFailed(violations));
    }
    Ok(store.add_class(root, &template.target_class)? as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Literal, Resource};
    use crate::store::vocab;

    fn ci_store(lower: Option<Object>, upper: Option<Object>, level: Option<Object>) -> StatementStore {
        let mut s = StatementStore::new();
        s.declare(Resource::new("CI1", "interval", Vec::<String>::new())).unwrap();
        for (p, o) in [(vocab::LOWER_BOUND, lower), (vocab::UPPER_BOUND, upper), (vocab::LEVEL, level)] {
            if let Some(o) = o {
                s.add("CI1", p, o).unwrap();
            }
        }
        s
    }

    fn num(n: f64) -> Option<Object> {
        Some(Object::Literal(Literal::number(n).unwrap()))
    }

    #[test]
    fn conforming_interval() {
        let s = ci_store(num(2.1), num(3.9), num(0.95));
        assert!(validate_instance(&s, "CI1", &confidence_interval_template()).is_empty());
    }

    #[test]
    fn single_defects() {
        let t = confidence_interval_template();
        let cases = [
            (ci_store(num(2.1), None, num(0.95)), ViolationKind::MissingProperty, vocab::UPPER_BOUND),
            (ci_store(num(2.1), num(3.9), num(1.5)), ViolationKind::OutOfRange, vocab::LEVEL),
            (
                ci_store(Some(Object::Literal(Literal::string("low"))), num(3.9), num(0.95)),
                ViolationKind::WrongDatatype,
                vocab::LOWER_BOUND,
            ),
        ];
        for (s, kind, property) in cases {
            let v = validate_instance(&s, "CI1", &t);
            assert_eq!(v.len(), 1, "{v:?}");
            assert_eq!((v[0].kind, v[0].property.as_str()), (kind, property));
        }
    }

    #[test]
    fn bad_bounds() {
        let spec = TemplateSpec {
            id: "t".into(),
            label: "t".into(),
            target_class: "C".into(),
            shapes: vec![PropertyShape::new("p", ShapeDatatype::Number).count(2, Some(1))],
        };
        assert!(matches!(define_template(spec.clone()), Err(TemplateError::BadBounds { .. })));
        let mut dup = spec;
        dup.shapes = vec![PropertyShape::new("p", ShapeDatatype::Number), PropertyShape::new("p", ShapeDatatype::String)];
        assert!(matches!(define_template(dup), Err(TemplateError::DuplicateShapeProperty(p)) if p == "p"));
    }

    #[test]
    fn apply_is_idempotent_and_refuses_invalid() {
        let t = confidence_interval_template();
        let mut s = ci_store(num(2.1), num(3.9), None);
        assert_eq!(apply_template(&mut s, "CI1", &t).unwrap(), 1);
        assert!(s.resource("CI1").unwrap().has_class(STATO_CONFIDENCE_INTERVAL));
        assert_eq!(apply_template(&mut s, "CI1", &t).unwrap(), 0);

        let mut bad = ci_store(num(2.1), None, None);
        let before = bad.clone().to_text();
        assert!(matches!(apply_template(&mut bad, "CI1", &t), Err(TemplateError::ValidationFailed(v)) if v.len() == 1));
        assert_eq!(bad.to_text(), before);
    }

    #[test]
    fn location_same_as_class() {
        let t = location_template();
        let mut s = StatementStore::new();
        s.declare(Resource::new("L1", "Iran", [vocab::DC_LOCATION])).unwrap();
        s.add("L1", vocab::SAME_AS, Object::Literal(Literal::string("https://www.geonames.org/130758"))).unwrap();
        assert!(validate_instance(&s, "L1", &t).is_empty());
        s.add("L1", vocab::SAME_AS, Object::Literal(Literal::string("https://example.org/x"))).unwrap();
        let kinds: Vec<_> = validate_instance(&s, "L1", &t).into_iter().map(|v| v.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::TooMany, ViolationKind::WrongClass]);
    }
}
