//! GeoNames-style gazetteer over the fixture records.

use serde_json::{json, Value as Json};

use crate::fixtures::GazetteerEntry;

/// GeoNames status code for "no result found".
pub const STATUS_NOT_FOUND: u64 = 15;
pub const STATUS_INVALID_PARAMETER: u64 = 14;

#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    records: Vec<GazetteerEntry>,
}

impl Gazetteer {
    pub fn new(records: Vec<GazetteerEntry>) -> Gazetteer {
        Gazetteer { records }
    }

    pub fn get(&self, id: u64) -> Option<&GazetteerEntry> {
        self.records.iter().find(|r| r.geoname_id == id)
    }

    /// Direct children in fixture order; `None` when the parent is unknown.
    pub fn children(&self, id: u64) -> Option<Vec<&GazetteerEntry>> {
        self.get(id)?;
        Some(self.records.iter().filter(|r| r.parent_id == Some(id)).collect())
    }

    /// Case-insensitive substring matches ranked exact first, then prefix,
    /// then shorter names, then lower ids.
    pub fn search(&self, text: &str, max_rows: usize) -> Vec<&GazetteerEntry> {
        let needle = text.trim().to_lowercase();
        if needle.is_empty() {
            return Vec::new();
        }
        let mut hits: Vec<&GazetteerEntry> =
            self.records.iter().filter(|r| r.name.to_lowercase().contains(&needle)).collect();
        hits.sort_by_key(|r| {
            let name = r.name.to_lowercase();
            (name != needle, !name.starts_with(&needle), r.name.chars().count(), r.geoname_id)
        });
        hits.truncate(max_rows);
        hits
    }
}

/// One feature as the GeoNames JSON services spell it.
pub fn geonames_json(r: &GazetteerEntry) -> Json {
    json!({
        "geonameId": r.geoname_id,
        "name": r.name,
        "toponymName": r.name,
        "countryCode": r.country_code,
        "continentCode": r.continent_code,
        "fcl": r.fcl,
        "fcode": r.fcode,
    })
}

pub fn geonames_list(records: &[&GazetteerEntry]) -> Json {
    json!({
        "totalResultsCount": records.len(),
        "geonames": records.iter().map(|r| geonames_json(r)).collect::<Vec<_>>(),
    })
}

pub fn status_json(message: &str, value: u64) -> Json {
    json!({"status": {"message": message, "value": value}})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::FixtureSet;

    fn gazetteer() -> Gazetteer {
        Gazetteer::new(FixtureSet::canonical().unwrap().gazetteer)
    }

    #[test]
    fn iran_ranks_before_iranshahr() {
        let g = gazetteer();
        let hits = g.search("iran", 5);
        assert_eq!(hits[0].name, "Iran");
        assert_eq!(hits[1].name, "Iranshahr");
        assert!(g.search("zzzz", 5).is_empty());
        assert_eq!(g.search("I", 2).len(), 2);
    }

    #[test]
    fn asia_has_iran_and_china() {
        let g = gazetteer();
        let kids = g.children(6255147).unwrap();
        let codes: Vec<&str> = kids.iter().map(|k| k.country_code.as_str()).collect();
        assert!(codes.contains(&"IR") && codes.contains(&"CN"));
        assert!(kids.len() >= 6);
        assert_eq!(g.children(1791247).unwrap().len(), 0);
        assert!(g.children(42).is_none());
    }
}
