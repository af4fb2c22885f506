//! Proptest generators shared by the property suites.
#![allow(dead_code)]

use fedwalk_core::doi::{
    DataCiteRecord, Description, LangText, NameType, RecordCreator, RelatedIdentifier, RelatedIdentifierType,
    ResourceType,
};
use fedwalk_core::graphql::{Document, Field, Operation, SelectionSet, TypeRef, Value, VariableDef};
use fedwalk_core::{parse_pid, Pid, PidScheme};
use indexmap::IndexMap;
use proptest::prelude::*;

const KEYWORDS: &[&str] = &["true", "false", "null", "query", "mutation", "subscription", "fragment", "on"];

pub fn name() -> impl Strategy<Value = String> {
    "[a-zA-Z_][a-zA-Z0-9_]{0,6}".prop_filter("keyword", |n| !KEYWORDS.contains(&n.as_str()))
}

fn string_lit() -> impl Strategy<Value = String> {
    prop_oneof![
        "[ -~]{0,10}",
        "\\PC{0,6}",
        proptest::collection::vec(
            prop_oneof![Just('\n'), Just('\t'), Just('"'), Just('\\'), Just('\u{1}'), Just('\u{1F600}'), Just('é')],
            0..5
        )
        .prop_map(|cs| cs.into_iter().collect()),
    ]
}

fn scalar_value() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<i64>().prop_map(Value::Int),
        any::<f64>().prop_filter("finite", |f| f.is_finite()).prop_map(Value::Float),
        (-1000i32..1000, 0u32..4).prop_map(|(m, e)| Value::Float(m as f64 / 10f64.powi(e as i32))),
        string_lit().prop_map(Value::String),
        any::<bool>().prop_map(Value::Boolean),
        Just(Value::Null),
        name().prop_map(Value::Enum),
    ]
}

/// Constant value, or one that may reference the given variables.
pub fn value(vars: Vec<String>) -> BoxedStrategy<Value> {
    let leaf = if vars.is_empty() {
        scalar_value().boxed()
    } else {
        prop_oneof![4 => scalar_value(), 1 => proptest::sample::select(vars).prop_map(Value::Variable)].boxed()
    };
    leaf.prop_recursive(2, 8, 3, |inner| proptest::collection::vec(inner, 0..3).prop_map(Value::List)).boxed()
}

fn type_ref() -> impl Strategy<Value = TypeRef> {
    let named = prop_oneof![
        Just("Int"),
        Just("Float"),
        Just("String"),
        Just("Boolean"),
        Just("ID"),
    ]
    .prop_map(TypeRef::named);
    let nullable = named.prop_recursive(2, 4, 1, |inner| {
        (inner, any::<bool>()).prop_map(|(t, nn)| {
            let t = if nn { TypeRef::NonNull(Box::new(t)) } else { t };
            TypeRef::list_of(t)
        })
    });
    (nullable, any::<bool>()).prop_map(|(t, nn)| if nn { TypeRef::NonNull(Box::new(t)) } else { t })
}

fn unique_by_key(fields: Vec<Field>) -> Vec<Field> {
    let mut seen = std::collections::HashSet::new();
    fields.into_iter().filter(|f| seen.insert(f.response_key().to_string())).collect()
}

fn field(vars: Vec<String>) -> BoxedStrategy<Field> {
    let args = proptest::collection::vec((name(), value(vars.clone())), 0..3)
        .prop_map(|kv| kv.into_iter().collect::<IndexMap<_, _>>())
        .boxed();
    let leaf = (proptest::option::weighted(0.2, name()), name(), args.clone()).prop_map(|(alias, name, arguments)| {
        Field { alias, name, arguments, selection_set: None }
    });
    leaf.prop_recursive(3, 24, 4, move |inner| {
        (
            proptest::option::weighted(0.2, name()),
            name(),
            args.clone(),
            proptest::collection::vec(inner, 1..4),
        )
            .prop_map(|(alias, name, arguments, children)| Field {
                alias,
                name,
                arguments,
                selection_set: Some(SelectionSet::new(unique_by_key(children))),
            })
    })
    .boxed()
}

pub fn document() -> impl Strategy<Value = Document> {
    let var_names = proptest::collection::btree_set(name(), 0..3);
    (var_names, proptest::option::of(name())).prop_flat_map(|(names, op_name)| {
        let names: Vec<String> = names.into_iter().collect();
        let defs = names
            .iter()
            .map(|n| {
                (Just(n.clone()), type_ref(), proptest::option::weighted(0.3, value(Vec::new())))
                    .prop_map(|(name, ty, default)| VariableDef { name, ty, default })
            })
            .collect::<Vec<_>>();
        let anonymous_without_vars = op_name.is_none() && names.is_empty();
        (defs, proptest::collection::vec(field(names.clone()), 1..4), Just(op_name), any::<bool>()).prop_map(
            move |(variables, fields, name, shorthand)| {
                // `{ ... }` shorthand only when nothing needs a header
                let name = if anonymous_without_vars && shorthand { None } else { name };
                Document { operation: Operation { name, variables, selection_set: SelectionSet::new(unique_by_key(fields)) } }
            },
        )
    })
}

/// Independent ISO 7064 mod 11-2 check character.
pub fn orcid_check(digits: &[u8]) -> char {
    let mut total: u32 = 0;
    for d in digits {
        total = (total + *d as u32) * 2;
    }
    let result = (12 - total % 11) % 11;
    if result == 10 {
        'X'
    } else {
        char::from_digit(result, 10).unwrap()
    }
}

pub fn format_orcid(digits: &[u8], check: char) -> String {
    let mut s: String = digits.iter().map(|d| char::from_digit(*d as u32, 10).unwrap()).collect();
    s.push(check);
    format!("{}-{}-{}-{}", &s[0..4], &s[4..8], &s[8..12], &s[12..16])
}

pub fn orcid_base() -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0u8..10, 15)
}

/// Raw DOI strings in the spellings found in the wild.
pub fn doi_text() -> impl Strategy<Value = String> {
    let registrant = ("[1-9][0-9]{3,5}", proptest::option::weighted(0.2, "[0-9]{1,3}"))
        .prop_map(|(a, b)| match b {
            Some(b) => format!("{a}.{b}"),
            None => a,
        });
    let suffix = "[A-Za-z0-9._;()/:-]{1,20}".prop_filter("non-blank", |s| !s.trim().is_empty());
    let prefix = prop_oneof![
        Just(""),
        Just("doi:"),
        Just("DOI:"),
        Just("https://doi.org/"),
        Just("http://dx.doi.org/"),
        Just("https://DOI.org/"),
    ];
    (prefix, registrant, suffix, any::<bool>(), any::<bool>()).prop_map(|(p, r, s, upper, pad)| {
        let s = if upper { s.to_uppercase() } else { s };
        let d = format!("{p}10.{r}/{s}");
        if pad {
            format!("  {d} ")
        } else {
            d
        }
    })
}

fn words() -> impl Strategy<Value = String> {
    proptest::collection::vec("[A-Za-z0-9&<>'\",.é-]{1,8}", 1..5).prop_map(|w| w.join(" "))
}

fn lang() -> impl Strategy<Value = Option<String>> {
    proptest::option::of(prop_oneof![Just("en".to_string()), Just("de".to_string())])
}

fn doi_pid() -> impl Strategy<Value = Pid> {
    ("[1-9][0-9]{3,5}", "[a-z0-9.]{1,12}").prop_map(|(r, s)| Pid::doi(&format!("10.{r}/{s}")).unwrap())
}

pub fn record() -> impl Strategy<Value = DataCiteRecord> {
    let creator = (words(), any::<bool>(), proptest::option::of(orcid_base())).prop_map(|(name, personal, orcid)| {
        RecordCreator {
            name,
            name_type: if personal { NameType::Personal } else { NameType::Organizational },
            orcid: orcid.map(|d| parse_pid(&format_orcid(&d, orcid_check(&d)), Some(PidScheme::Orcid)).unwrap()),
        }
    });
    let lang_text = (words(), lang()).prop_map(|(text, lang)| LangText { text, lang }).boxed();
    let related = (doi_pid(), prop_oneof![Just("References"), Just("IsSupplementTo"), Just("Cites")]).prop_map(|(pid, rel)| {
        RelatedIdentifier { pid, identifier_type: RelatedIdentifierType::Doi, relation_type: rel.to_string() }
    });
    let description = (words(), prop_oneof![Just("Abstract"), Just("Other")])
        .prop_map(|(text, t)| Description { text, description_type: t.to_string() });
    (
        doi_pid(),
        proptest::collection::vec(creator, 1..4),
        proptest::collection::vec(lang_text.clone(), 1..3),
        lang_text.clone(),
        1000i32..=9999,
        proptest::collection::vec(lang_text, 0..3),
        prop_oneof![Just(String::new()), Just("en".to_string())],
        proptest::collection::vec(related, 0..4),
        proptest::collection::vec(description, 0..3),
    )
        .prop_map(
            |(identifier, creators, titles, publisher, publication_year, subjects, language, related_identifiers, descriptions)| {
                DataCiteRecord {
                    identifier,
                    creators,
                    titles,
                    publisher,
                    publication_year,
                    subjects,
                    language,
                    resource_type: ResourceType::comparison(),
                    related_identifiers,
                    descriptions,
                }
            },
        )
}
