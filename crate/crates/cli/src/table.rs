//! Flattening GraphQL results into CSV rows.

use serde_json::{Map, Value as Json};

/// First list of objects found in document order, searching depth first.
pub fn first_object_list(value: &Json) -> Option<&Vec<Json>> {
    match value {
        Json::Array(items) if !items.is_empty() && items.iter().all(|i| i.is_object() || i.is_null()) => Some(items),
        Json::Array(items) => items.iter().find_map(first_object_list),
        Json::Object(map) => map.values().find_map(first_object_list),
        _ => None,
    }
}

/// Dotted-key view of one object; lists of scalars are joined with `;`.
pub fn flatten(value: &Json) -> Vec<(String, String)> {
    let mut out = Vec::new();
    flatten_into("", value, &mut out);
    out
}

fn flatten_into(prefix: &str, value: &Json, out: &mut Vec<(String, String)>) {
    match value {
        Json::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_into(&key, v, out);
            }
        }
        Json::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            out.push((prefix.to_string(), items.iter().map(scalar).collect::<Vec<_>>().join(";")));
        }
        Json::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_into(&format!("{prefix}.{i}"), v, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn scalar(v: &Json) -> String {
    match v {
        Json::Null => String::new(),
        Json::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// CSV of `data`: one row per element of its first object list, or a single
/// row when there is none. Columns appear in first-seen order.
pub fn to_csv(data: &Json) -> Result<String, csv::Error> {
    let empty = Map::new();
    let rows: Vec<Vec<(String, String)>> = match first_object_list(data) {
        Some(items) => items.iter().map(flatten).collect(),
        None => vec![flatten(data.as_object().map(|_| data).unwrap_or(&Json::Object(empty)))],
    };
    let mut columns: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&columns)?;
    for row in &rows {
        w.write_record(columns.iter().map(|c| row.iter().find(|(k, _)| k == c).map(|(_, v)| v.as_str()).unwrap_or("")))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
