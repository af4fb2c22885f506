//! Kernel-4 XML writer and reader.

use quick_xml::escape::{escape, resolve_predefined_entity};
use quick_xml::events::Event;
use quick_xml::Reader;

use super::{
    normalize_ws, DataCiteRecord, Description, DoiError, LangText, NameType, RecordCreator, RelatedIdentifier,
    RelatedIdentifierType, ResourceType, ORCID_SCHEME_URI,
};
use crate::pid::{parse_pid, Pid, PidScheme};

pub const KERNEL4_NS: &str = "http://datacite.org/schema/kernel-4";
pub const XSI_NS: &str = "http://www.w3.org/2001/XMLSchema-instance";
pub const SCHEMA_LOCATION: &str =
    "http://datacite.org/schema/kernel-4 http://schema.datacite.org/meta/kernel-4.3/metadata.xsd";

struct Out {
    buf: String,
}

impl Out {
    fn line(&mut self, depth: usize, s: &str) {
        for _ in 0..depth {
            self.buf.push_str("  ");
        }
        self.buf.push_str(s);
        self.buf.push('\n');
    }

    fn element(&mut self, depth: usize, name: &str, attrs: &[(&str, &str)], text: &str) {
        let line = format!("<{name}{}>{}</{name}>", attributes(attrs), escape(text));
        self.line(depth, &line);
    }
}

fn attributes(attrs: &[(&str, &str)]) -> String {
    attrs.iter().map(|(k, v)| format!(" {k}=\"{}\"", escape(*v))).collect()
}

fn lang_attr(t: &LangText) -> Vec<(&str, &str)> {
    t.lang.as_deref().map(|l| vec![("xml:lang", l)]).unwrap_or_default()
}

/// Writes the record with the element and attribute order of the DataCite
/// registration example.
pub fn serialize_kernel4(record: &DataCiteRecord) -> String {
    let mut o = Out { buf: String::new() };
    o.line(0, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    o.line(
        0,
        &format!(
            "<resource{}>",
            attributes(&[("xmlns", KERNEL4_NS), ("xmlns:xsi", XSI_NS), ("xsi:schemaLocation", SCHEMA_LOCATION)])
        ),
    );
    o.element(1, "identifier", &[("identifierType", "DOI")], record.identifier.value());
    o.line(1, "<creators>");
    for c in &record.creators {
        o.line(2, "<creator>");
        o.element(3, "creatorName", &[("nameType", c.name_type.as_str())], &c.name);
        if let Some(orcid) = &c.orcid {
            o.element(
                3,
                "nameIdentifier",
                &[("schemeURI", ORCID_SCHEME_URI), ("nameIdentifierScheme", "ORCID")],
                orcid.value(),
            );
        }
        o.line(2, "</creator>");
    }
    o.line(1, "</creators>");
    o.line(1, "<titles>");
    for t in &record.titles {
        o.element(2, "title", &lang_attr(t), &t.text);
    }
    o.line(1, "</titles>");
    o.element(1, "publisher", &lang_attr(&record.publisher), &record.publisher.text);
    o.element(1, "publicationYear", &[], &record.publication_year.to_string());
    if !record.subjects.is_empty() {
        o.line(1, "<subjects>");
        for s in &record.subjects {
            o.element(2, "subject", &lang_attr(s), &s.text);
        }
        o.line(1, "</subjects>");
    }
    if !record.language.is_empty() {
        o.element(1, "language", &[], &record.language);
    }
    o.element(
        1,
        "resourceType",
        &[("resourceTypeGeneral", &record.resource_type.general)],
        &record.resource_type.value,
    );
    if !record.related_identifiers.is_empty() {
        o.line(1, "<relatedIdentifiers>");
        for r in &record.related_identifiers {
            o.element(
                2,
                "relatedIdentifier",
                &[("relationType", &r.relation_type), ("relatedIdentifierType", r.identifier_type.as_str())],
                r.pid.value(),
            );
        }
        o.line(1, "</relatedIdentifiers>");
    }
    if !record.descriptions.is_empty() {
        o.line(1, "<descriptions>");
        for d in &record.descriptions {
            o.element(2, "description", &[("descriptionType", &d.description_type)], &d.text);
        }
        o.line(1, "</descriptions>");
    }
    o.line(0, "</resource>");
    o.buf
}

#[derive(Debug, Clone, PartialEq)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Element(Element),
    Text(String),
}

impl Element {
    fn local_name(&self) -> &str {
        self.name.rsplit(':').next().unwrap_or(&self.name)
    }

    fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    fn child(&self, name: &str) -> Option<&Element> {
        self.elements().find(|e| e.local_name() == name)
    }

    fn children_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Element> + 'a {
        self.elements().filter(move |e| e.local_name() == name)
    }

    fn text(&self) -> String {
        let raw: String = self
            .children
            .iter()
            .filter_map(|n| match n {
                Node::Text(t) => Some(t.as_str()),
                Node::Element(_) => None,
            })
            .collect();
        normalize_ws(&raw)
    }

    fn push_text(&mut self, text: &str) {
        match self.children.last_mut() {
            Some(Node::Text(t)) => t.push_str(text),
            _ => self.children.push(Node::Text(text.to_string())),
        }
    }
}

fn xml_err(e: impl std::fmt::Display) -> DoiError {
    DoiError::Xml(e.to_string())
}

fn read_dom(xml: &str) -> Result<Element, DoiError> {
    let mut reader = Reader::from_str(xml);
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;
    let open = |e: &quick_xml::events::BytesStart<'_>| -> Result<Element, DoiError> {
        let name = String::from_utf8(e.name().as_ref().to_vec()).map_err(xml_err)?;
        let mut attrs = Vec::new();
        for a in e.attributes() {
            let a = a.map_err(xml_err)?;
            let key = String::from_utf8(a.key.as_ref().to_vec()).map_err(xml_err)?;
            let value = a.unescape_value().map_err(xml_err)?.into_owned();
            attrs.push((key, value));
        }
        Ok(Element { name, attrs, children: Vec::new() })
    };
    loop {
        match reader.read_event().map_err(xml_err)? {
            Event::Start(e) => stack.push(open(&e)?),
            Event::Empty(e) => {
                let el = open(&e)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Element(el)),
                    None if root.is_none() => root = Some(el),
                    None => return Err(DoiError::Xml("content after the root element".into())),
                }
            }
            Event::End(_) => {
                let el = stack.pop().ok_or_else(|| DoiError::Xml("unbalanced end tag".into()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Element(el)),
                    None if root.is_none() => root = Some(el),
                    None => return Err(DoiError::Xml("more than one root element".into())),
                }
            }
            Event::Text(t) => {
                let text = t.decode().map_err(xml_err)?;
                match stack.last_mut() {
                    Some(el) => el.push_text(&text),
                    None if text.trim().is_empty() => {}
                    None => return Err(DoiError::Xml("text outside the root element".into())),
                }
            }
            Event::CData(t) => {
                let text = t.decode().map_err(xml_err)?;
                if let Some(el) = stack.last_mut() {
                    el.push_text(&text);
                }
            }
            Event::GeneralRef(r) => {
                let resolved = match r.resolve_char_ref().map_err(xml_err)? {
                    Some(c) => c.to_string(),
                    None => {
                        let name = r.decode().map_err(xml_err)?;
                        resolve_predefined_entity(&name)
                            .ok_or_else(|| DoiError::Xml(format!("unknown entity `&{name};`")))?
                            .to_string()
                    }
                };
                if let Some(el) = stack.last_mut() {
                    el.push_text(&resolved);
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(DoiError::Xml(format!("unclosed element <{}>", stack[stack.len() - 1].name)));
    }
    root.ok_or_else(|| DoiError::Xml("document has no root element".into()))
}

fn canonical_into(el: &Element, out: &mut Vec<String>) {
    let attrs: String = el.attrs.iter().map(|(k, v)| format!(" {k}=\"{}\"", escape(normalize_ws(v)))).collect();
    out.push(format!("<{}{attrs}>", el.name));
    for n in &el.children {
        match n {
            Node::Text(t) => {
                let t = normalize_ws(t);
                if !t.is_empty() {
                    out.push(escape(t).into_owned());
                }
            }
            Node::Element(c) => canonical_into(c, out),
        }
    }
    out.push(format!("</{}>", el.name));
}

/// Whitespace-normalized form of an XML document: one tag or text node per
/// line, runs of whitespace in text and attribute values collapsed.
pub fn canonical_xml(xml: &str) -> Result<String, DoiError> {
    let root = read_dom(xml)?;
    let mut lines = Vec::new();
    canonical_into(&root, &mut lines);
    Ok(lines.join("\n"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRecord {
    pub record: DataCiteRecord,
    /// Elements that were skipped.
    pub warnings: Vec<String>,
}

fn missing(what: &str) -> DoiError {
    DoiError::SchemaViolation(format!("missing <{what}>"))
}

fn lang_text(el: &Element) -> LangText {
    LangText { text: el.text(), lang: el.attr("xml:lang").map(String::from) }
}

const RECORD_ELEMENTS: &[&str] = &[
    "identifier",
    "creators",
    "titles",
    "publisher",
    "publicationYear",
    "subjects",
    "language",
    "resourceType",
    "relatedIdentifiers",
    "descriptions",
];

pub fn parse_kernel4(xml: &str) -> Result<ParsedRecord, DoiError> {
    let root = read_dom(xml)?;
    if root.local_name() != "resource" {
        return Err(DoiError::SchemaViolation(format!("root element is <{}>, expected <resource>", root.name)));
    }
    if root.attr("xmlns") != Some(KERNEL4_NS) {
        return Err(DoiError::SchemaViolation(format!("root namespace is not {KERNEL4_NS}")));
    }
    let mut warnings: Vec<String> = root
        .elements()
        .filter(|e| !RECORD_ELEMENTS.contains(&e.local_name()))
        .map(|e| format!("ignored element <{}>", e.name))
        .collect();

    let id_el = root.child("identifier").ok_or_else(|| missing("identifier"))?;
    if let Some(t) = id_el.attr("identifierType").filter(|t| *t != "DOI") {
        return Err(DoiError::SchemaViolation(format!("identifierType `{t}` is not DOI")));
    }
    let identifier = Pid::doi(&id_el.text()).map_err(|source| DoiError::BadPid { element: "identifier".into(), source })?;

    let mut creators = Vec::new();
    for c in root.child("creators").ok_or_else(|| missing("creators"))?.children_named("creator") {
        let name_el = c.child("creatorName").ok_or_else(|| missing("creatorName"))?;
        let name_type = match name_el.attr("nameType") {
            None => NameType::Personal,
            Some(t) => NameType::parse(t).ok_or_else(|| DoiError::SchemaViolation(format!("unknown nameType `{t}`")))?,
        };
        let mut orcid = None;
        for ni in c.children_named("nameIdentifier") {
            match ni.attr("nameIdentifierScheme") {
                Some(s) if s.eq_ignore_ascii_case("ORCID") => {
                    orcid = Some(
                        parse_pid(&ni.text(), Some(PidScheme::Orcid))
                            .map_err(|source| DoiError::BadPid { element: "nameIdentifier".into(), source })?,
                    );
                }
                other => warnings.push(format!("ignored nameIdentifier with scheme {}", other.unwrap_or("(none)"))),
            }
        }
        creators.push(RecordCreator { name: name_el.text(), name_type, orcid });
    }
    if creators.is_empty() {
        return Err(missing("creator"));
    }

    let titles: Vec<LangText> = root.child("titles").ok_or_else(|| missing("titles"))?.children_named("title").map(lang_text).collect();
    if titles.is_empty() {
        return Err(missing("title"));
    }
    let publisher = lang_text(root.child("publisher").ok_or_else(|| missing("publisher"))?);
    let year_text = root.child("publicationYear").ok_or_else(|| missing("publicationYear"))?.text();
    let publication_year: i32 = year_text
        .parse()
        .ok()
        .filter(|y| (1000..=9999).contains(y))
        .ok_or_else(|| DoiError::SchemaViolation(format!("publicationYear `{year_text}` is not a four-digit year")))?;
    let subjects = root.child("subjects").map(|s| s.children_named("subject").map(lang_text).collect()).unwrap_or_default();
    let language = root.child("language").map(|l| l.text()).unwrap_or_default();
    let rt = root.child("resourceType").ok_or_else(|| missing("resourceType"))?;
    let resource_type = ResourceType {
        general: rt
            .attr("resourceTypeGeneral")
            .ok_or_else(|| DoiError::SchemaViolation("resourceType lacks resourceTypeGeneral".into()))?
            .to_string(),
        value: rt.text(),
    };

    let mut related_identifiers = Vec::new();
    if let Some(list) = root.child("relatedIdentifiers") {
        for r in list.children_named("relatedIdentifier") {
            let ty = r
                .attr("relatedIdentifierType")
                .ok_or_else(|| DoiError::SchemaViolation("relatedIdentifier lacks relatedIdentifierType".into()))?;
            let identifier_type = RelatedIdentifierType::parse(ty)
                .ok_or_else(|| DoiError::SchemaViolation(format!("unsupported relatedIdentifierType `{ty}`")))?;
            let relation_type = r
                .attr("relationType")
                .ok_or_else(|| DoiError::SchemaViolation("relatedIdentifier lacks relationType".into()))?
                .to_string();
            let pid = parse_pid(&r.text(), Some(identifier_type.scheme()))
                .ok()
                .filter(|p| p.scheme() == identifier_type.scheme())
                .ok_or_else(|| DoiError::BadPid {
                    element: "relatedIdentifier".into(),
                    source: crate::pid::PidError::Malformed(r.text()),
                })?;
            related_identifiers.push(RelatedIdentifier { pid, identifier_type, relation_type });
        }
    }

    let descriptions = root
        .child("descriptions")
        .map(|d| {
            d.children_named("description")
                .map(|e| Description {
                    text: e.text(),
                    description_type: e.attr("descriptionType").unwrap_or("Other").to_string(),
                })
                .collect()
        })
        .unwrap_or_default();

    Ok(ParsedRecord {
        record: DataCiteRecord {
            identifier,
            creators,
            titles,
            publisher,
            publication_year,
            subjects,
            language,
            resource_type,
            related_identifiers,
            descriptions,
        },
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> DataCiteRecord {
        DataCiteRecord {
            identifier: Pid::doi("10.48366/r44930").unwrap(),
            creators: vec![RecordCreator {
                name: "Haris, Muhammad".into(),
                name_type: NameType::Personal,
                orcid: Some(parse_pid("0000-0002-5071-1658", None).unwrap()),
            }],
            titles: vec![LangText::en("COVID-19 Reproductive Number Estimates")],
            publisher: LangText::en("Open Research Knowledge Graph"),
            publication_year: 2020,
            subjects: vec![LangText::en("Virology")],
            language: "en".into(),
            resource_type: ResourceType::comparison(),
            related_identifiers: vec![RelatedIdentifier {
                pid: Pid::doi("10.1101/2020.03.08.20030643").unwrap(),
                identifier_type: RelatedIdentifierType::Doi,
                relation_type: "References".into(),
            }],
            descriptions: vec![Description {
                text: "Comparison of published reproductive number estimates for the COVID-19 infectious disease".into(),
                description_type: "Abstract".into(),
            }],
        }
    }

    #[test]
    fn round_trip() {
        let r = record();
        let parsed = parse_kernel4(&serialize_kernel4(&r)).unwrap();
        assert_eq!(parsed.record, r);
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn no_orcid_no_name_identifier() {
        let mut r = record();
        r.creators[0].orcid = None;
        assert!(!serialize_kernel4(&r).contains("nameIdentifier"));
    }

    #[test]
    fn canonical_ignores_layout() {
        let a = "<a x=\"1\">\n  <b>  hello\n  world </b>\n</a>";
        let b = "<?xml version=\"1.0\"?><a x=\"1\"><b>hello world</b></a>";
        assert_eq!(canonical_xml(a).unwrap(), canonical_xml(b).unwrap());
        assert_ne!(canonical_xml(a).unwrap(), canonical_xml("<a x=\"2\"><b>hello world</b></a>").unwrap());
    }

    #[test]
    fn entities_and_unknown_elements() {
        let mut r = record();
        r.titles[0].text = "R0 & <friends>".into();
        let xml = serialize_kernel4(&r).replace("</resource>", "<version>1</version></resource>");
        let parsed = parse_kernel4(&xml).unwrap();
        assert_eq!(parsed.record, r);
        assert_eq!(parsed.warnings, vec!["ignored element <version>".to_string()]);
    }

    #[test]
    fn missing_identifier() {
        let xml = serialize_kernel4(&record()).replace("<identifier identifierType=\"DOI\">10.48366/r44930</identifier>", "");
        assert!(matches!(parse_kernel4(&xml), Err(DoiError::SchemaViolation(_))));
    }

    #[test]
    fn bad_related_doi() {
        let xml = serialize_kernel4(&record()).replace("10.1101/2020.03.08.20030643", "not-a-doi");
        assert!(matches!(parse_kernel4(&xml), Err(DoiError::BadPid { element, .. }) if element == "relatedIdentifier"));
    }
}
