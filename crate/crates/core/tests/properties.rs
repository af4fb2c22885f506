#[path = "common/gen.rs"]
mod gen;

use fedwalk_core::doi::{parse_kernel4, serialize_kernel4};
use fedwalk_core::graphql::{parse_query, print_query};
use fedwalk_core::model::{Datatype, Literal, Object, Resource};
use fedwalk_core::store::StatementStore;
use fedwalk_core::template::{
    define_template, validate_instance, PropertyShape, ShapeDatatype, TemplateSpec, GAZETTEER_FEATURE,
};
use fedwalk_core::{parse_pid, pids_equal, Pid, PidScheme};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(doc in gen::document()) {
        let text = print_query(&doc);
        let back = parse_query(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, doc, "{}", text);
    }

    #[test]
    fn doi_normalization_is_idempotent(raw in gen::doi_text()) {
        let once = Pid::doi(&raw).unwrap();
        let twice = Pid::doi(once.value()).unwrap();
        prop_assert_eq!(&once, &twice);
        let via_url = parse_pid(&once.to_url(), None).unwrap();
        prop_assert!(pids_equal(&once, &via_url));
        prop_assert_eq!(Pid::doi(&raw.to_lowercase()).unwrap(), once);
    }

    #[test]
    fn kernel4_round_trip(record in gen::record()) {
        let xml = serialize_kernel4(&record);
        let parsed = parse_kernel4(&xml).map_err(|e| TestCaseError::fail(format!("{e}\n{xml}")))?;
        prop_assert!(parsed.warnings.is_empty());
        prop_assert_eq!(parsed.record, record);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn orcid_check_digit(base in gen::orcid_base()) {
        let check = gen::orcid_check(&base);
        let valid = gen::format_orcid(&base, check);
        let pid = parse_pid(&valid, Some(PidScheme::Orcid)).unwrap();
        prop_assert_eq!(pid.value(), valid.as_str());
        let mut rejected = 0;
        for wrong in "0123456789X".chars().filter(|c| *c != check) {
            let bad = gen::format_orcid(&base, wrong);
            prop_assert!(parse_pid(&bad, Some(PidScheme::Orcid)).is_err(), "{} accepted", bad);
            rejected += 1;
        }
        prop_assert_eq!(rejected, 10);
    }
}

#[derive(Debug, Clone)]
enum Gen {
    Num(f64),
    Text(&'static str),
    Bool(bool),
    Res(&'static str),
}

fn gen_value() -> impl Strategy<Value = Gen> {
    prop_oneof![
        (-20i32..=20).prop_map(|n| Gen::Num(n as f64 / 10.0)),
        prop_oneof![
            Just("plain"),
            Just("https://www.geonames.org/130758"),
            Just("https://example.org/x"),
        ]
        .prop_map(Gen::Text),
        any::<bool>().prop_map(Gen::Bool),
        prop_oneof![Just("FEATURE"), Just("OTHER"), Just("GHOST")].prop_map(Gen::Res),
    ]
}

fn gen_shape(property: &'static str) -> impl Strategy<Value = PropertyShape> {
    let datatype = prop_oneof![
        Just(ShapeDatatype::Number),
        Just(ShapeDatatype::String),
        Just(ShapeDatatype::Boolean),
        Just(ShapeDatatype::Resource),
    ];
    (datatype, 0usize..3, proptest::option::of(0usize..3), proptest::option::of(-10i32..=10), proptest::option::of(0i32..=10), any::<bool>())
        .prop_map(move |(dt, min, extra, lo, width, class)| {
            let mut s = PropertyShape::new(property, dt).count(min, extra.map(|e| min + e));
            if dt == ShapeDatatype::Number {
                let lo = lo.map(|l| l as f64 / 10.0);
                let hi = width.map(|w| lo.unwrap_or(0.0) + w as f64 / 10.0);
                s = s.range(lo, hi);
            }
            if dt == ShapeDatatype::Resource && class {
                s = s.class(GAZETTEER_FEATURE);
            }
            s
        })
}

/// Direct reading of each constraint, written without the engine's helpers.
fn brute_force_accepts(shapes: &[PropertyShape], instance: &[(&str, Gen)]) -> bool {
    shapes.iter().all(|shape| {
        let values: Vec<&Gen> = instance.iter().filter(|(p, _)| *p == shape.property).map(|(_, v)| v).collect();
        let n = values.len();
        if n < shape.min_count || shape.max_count.is_some_and(|m| n > m) {
            return false;
        }
        values.iter().all(|v| match (shape.datatype, v) {
            (ShapeDatatype::Number, Gen::Num(x)) => {
                shape.min_value.is_none_or(|lo| *x >= lo) && shape.max_value.is_none_or(|hi| *x <= hi)
            }
            (ShapeDatatype::String, Gen::Text(_)) => true,
            (ShapeDatatype::Boolean, Gen::Bool(_)) => true,
            (ShapeDatatype::Resource, Gen::Res(id)) => match &shape.range_class {
                None => true,
                Some(_) => *id == "FEATURE",
            },
            (ShapeDatatype::Resource, Gen::Text(t)) if t.starts_with("https://") => match &shape.range_class {
                None => true,
                Some(_) => t.starts_with("https://www.geonames.org/"),
            },
            _ => false,
        })
    })
}

const PROPS: [&str; 3] = ["p0", "p1", "p2"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn validation_matches_brute_force(
        shapes in (gen_shape(PROPS[0]), gen_shape(PROPS[1]), gen_shape(PROPS[2])),
        instance in proptest::collection::vec((proptest::sample::select(PROPS.to_vec()), gen_value()), 0..7),
    ) {
        let shapes = vec![shapes.0, shapes.1, shapes.2];
        let template = define_template(TemplateSpec {
            id: "t".into(),
            label: "t".into(),
            target_class: "Target".into(),
            shapes: shapes.clone(),
        }).unwrap();
        let mut store = StatementStore::new();
        store.declare(Resource::new("ROOT", "root", Vec::<String>::new())).unwrap();
        store.declare(Resource::new("FEATURE", "f", [GAZETTEER_FEATURE])).unwrap();
        store.declare(Resource::new("OTHER", "o", ["Other"])).unwrap();
        // Set semantics would collapse duplicates, so the oracle sees what the store holds.
        let mut held: Vec<(&str, Gen)> = Vec::new();
        for (p, v) in &instance {
            let object = match v {
                Gen::Num(x) => Object::Literal(Literal::number(*x).unwrap()),
                Gen::Text(t) => Object::Literal(Literal::string(*t)),
                Gen::Bool(b) => Object::Literal(Literal::new(b.to_string(), Datatype::Boolean).unwrap()),
                Gen::Res(id) => Object::Resource(id.to_string()),
            };
            if store.add("ROOT", p, object).unwrap() == 1 {
                held.push((p, v.clone()));
            }
        }
        let violations = validate_instance(&store, "ROOT", &template);
        prop_assert_eq!(violations.is_empty(), brute_force_accepts(&shapes, &held), "{:?}", violations);
    }
}
