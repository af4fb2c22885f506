//! Fixture truth read straight from the files, sharing no code with the
//! store or the gateway.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde_json::Value as Json;

#[derive(Debug, Clone)]
pub struct TruthStudy {
    pub contribution: String,
    pub r0: Option<f64>,
    pub paper: Option<String>,
    pub publisher: Option<String>,
    pub country: Option<String>,
    pub continent: Option<String>,
}

pub struct Truth {
    pub studies: Vec<TruthStudy>,
}

struct Triples(Vec<[String; 4]>);

impl Triples {
    fn objects<'a>(&'a self, s: &'a str, p: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.0.iter().filter(move |t| t[0] == s && t[1] == p).map(|t| t[3].as_str())
    }

    fn first(&self, s: &str, p: &str) -> Option<String> {
        self.objects(s, p).next().map(String::from)
    }

    fn subject_of(&self, p: &str, o: &str) -> Option<String> {
        self.0.iter().find(|t| t[1] == p && t[3] == o).map(|t| t[0].clone())
    }
}

fn triples(text: &str) -> Triples {
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() || line.starts_with('#') || line.starts_with('@') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() == 4 {
            out.push([cols[0].into(), cols[1].into(), cols[2].into(), cols[3].into()]);
        }
    }
    Triples(out)
}

impl Truth {
    pub fn load(dir: &Path, comparison: &str) -> Truth {
        let t = triples(&std::fs::read_to_string(dir.join("statements.tsv")).unwrap());
        let gaz: Json = serde_json::from_str(&std::fs::read_to_string(dir.join("gazetteer.json")).unwrap()).unwrap();
        let places: HashMap<String, (String, String)> = gaz["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| {
                (
                    r["geonameId"].to_string(),
                    (r["countryCode"].as_str().unwrap().to_string(), r["continentCode"].as_str().unwrap().to_string()),
                )
            })
            .collect();
        let studies = t
            .objects(comparison, "compareContribution")
            .map(|c| {
                let paper = t.subject_of("hasContribution", c);
                let place = t
                    .first(c, "P_LOCATION")
                    .and_then(|l| t.first(&l, "sameAs"))
                    .and_then(|url| url.rsplit('/').next().map(String::from))
                    .and_then(|id| places.get(&id).cloned());
                TruthStudy {
                    contribution: c.to_string(),
                    r0: t.first(c, "P_R0").map(|v| v.parse().unwrap()),
                    publisher: paper.as_ref().and_then(|p| t.first(p, "publisher")),
                    paper,
                    country: place.as_ref().map(|p| p.0.clone()),
                    continent: place.map(|p| p.1),
                }
            })
            .collect();
        Truth { studies }
    }

    pub fn in_region(&self, region: Option<&str>) -> Vec<&TruthStudy> {
        self.studies.iter().filter(|s| region.is_none() || s.continent.as_deref() == region).collect()
    }

    pub fn mean_r0(&self, region: Option<&str>) -> Option<f64> {
        let vals: Vec<f64> = self.in_region(region).iter().filter_map(|s| s.r0).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    pub fn publishers(&self, region: Option<&str>) -> BTreeMap<String, usize> {
        let mut seen = BTreeSet::new();
        let mut out = BTreeMap::new();
        for s in self.in_region(region) {
            if let Some(p) = &s.paper {
                if seen.insert(p.clone()) {
                    *out.entry(s.publisher.clone().unwrap_or_else(|| "unknown".into())).or_insert(0) += 1;
                }
            }
        }
        out
    }

    pub fn paper_count(&self) -> usize {
        self.studies.iter().filter_map(|s| s.paper.as_ref()).collect::<BTreeSet<_>>().len()
    }
}

pub fn read_publisher_csv(path: &Path) -> BTreeMap<String, usize> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| {
        let rec = rec.unwrap();
        (rec[0].to_string(), rec[1].parse().unwrap())
    }).collect()
}
