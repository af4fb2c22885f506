//! Declarative template files.
//!
//! ```text
//! # comment
//! template confidence-interval
//!   label = Confidence interval
//!   class = http://purl.obolibrary.org/obo/STATO_0000196
//!   shape lowerBound : Number [1..1]
//!   shape level : Number [0..1] range 0..1
//!   shape sameAs : Resource [0..*] class GeoNamesFeature
//! end
//! ```
//!
//! Cardinality defaults to `[0..*]`. Either side of `range` may be `*`.

use super::{PropertyShape, ShapeDatatype, TemplateError, TemplateSpec};

pub fn parse_templates(text: &str) -> Result<Vec<TemplateSpec>, TemplateError> {
    let mut out = Vec::new();
    let mut current: Option<TemplateSpec> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| TemplateError::Parse { line: line_no, message };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).map_or((line, ""), |(k, r)| (k, r.trim()));
        match (keyword, current.as_mut()) {
            ("template", None) => {
                if rest.is_empty() {
                    return Err(err("template id missing".into()));
                }
                current = Some(TemplateSpec {
                    id: rest.to_string(),
                    label: rest.to_string(),
                    target_class: String::new(),
                    shapes: Vec::new(),
                });
            }
            ("template", Some(_)) => return Err(err("nested `template`; missing `end`".into())),
            ("end", Some(_)) => out.push(current.take().expect("checked")),
            ("shape", Some(t)) => t.shapes.push(parse_shape(rest).map_err(err)?),
            (_, Some(t)) if line.contains('=') => {
                let (key, value) = line.split_once('=').expect("checked");
                match key.trim() {
                    "label" => t.label = value.trim().to_string(),
                    "class" => t.target_class = value.trim().to_string(),
                    other => return Err(err(format!("unknown key `{other}`"))),
                }
            }
            (other, _) => return Err(err(format!("unexpected `{other}`"))),
        }
    }
    if let Some(t) = current {
        return Err(TemplateError::Parse {
            line: text.lines().count(),
            message: format!("template `{}` is missing `end`", t.id),
        });
    }
    Ok(out)
}

fn parse_shape(rest: &str) -> Result<PropertyShape, String> {
    let (property, spec) = rest.split_once(':').ok_or("expected `shape <property> : <Datatype> ...`")?;
    let property = property.trim();
    if property.is_empty() {
        return Err("shape property missing".into());
    }
    let mut words = spec.split_whitespace();
    let dt = words.next().ok_or("datatype missing")?;
    let datatype = ShapeDatatype::parse(dt).ok_or_else(|| format!("unknown datatype `{dt}`"))?;
    let mut shape = PropertyShape::new(property, datatype);
    while let Some(w) = words.next() {
        if let Some(card) = w.strip_prefix('[').and_then(|w| w.strip_suffix(']')) {
            let (lo, hi) = card.split_once("..").ok_or_else(|| format!("bad cardinality `{w}`"))?;
            shape.min_count = lo.parse().map_err(|_| format!("bad minCount `{lo}`"))?;
            shape.max_count = match hi {
                "*" => None,
                n => Some(n.parse().map_err(|_| format!("bad maxCount `{n}`"))?),
            };
        } else if w == "range" {
            let r = words.next().ok_or("range bounds missing")?;
            let (lo, hi) = r.split_once("..").ok_or_else(|| format!("bad range `{r}`"))?;
            let bound = |b: &str| -> Result<Option<f64>, String> {
                match b {
                    "*" => Ok(None),
                    n => n.parse::<f64>().map(Some).map_err(|_| format!("bad bound `{n}`")),
                }
            };
            shape.min_value = bound(lo)?;
            shape.max_value = bound(hi)?;
        } else if w == "class" {
            shape.range_class = Some(words.next().ok_or("range class missing")?.to_string());
        } else {
            return Err(format!("unexpected `{w}` in shape"));
        }
    }
    Ok(shape)
}
