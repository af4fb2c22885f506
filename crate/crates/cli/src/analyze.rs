//! Reproductive-number analysis over one comparison, optionally restricted
//! to a continent.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use fedwalk_core::sources::continent_id;
use fedwalk_gateway::filter_by_membership;
use serde::Serialize;
use serde_json::{json, Map, Value as Json};

use crate::client::{error_lines, GatewayClient};
use crate::CliError;

pub const ANALYSIS_QUERY: &str = "query ($doi: ID) { work(id: $doi) { doi comparison { id doi title studies { id label r0 countryCode \
     paper { id doi publisher } location { geonameId countryCode continentCode } } } } }";

const COMPARISON_QUERY: &str = "query ($doi: ID) { comparisonByDoi(doi: $doi) { id doi title studies { id label r0 countryCode \
     paper { id doi publisher } location { geonameId countryCode continentCode } } } }";

const REGION_QUERY: &str = "query ($region: String) { countriesOf(continentCode: $region) { countryCode } }";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct R0Value {
    pub study_id: String,
    pub r0: f64,
    pub country_code: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisReport {
    pub doi: String,
    pub comparison_id: String,
    pub comparison_title: Option<String>,
    pub region: Option<String>,
    pub studies: usize,
    pub mean_r0: Option<f64>,
    pub r0_values: Vec<R0Value>,
    /// Distinct papers per publisher.
    pub publisher_distribution: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

fn study_country(study: &Json) -> Option<String> {
    study["location"]["countryCode"].as_str().or_else(|| study["countryCode"].as_str()).map(String::from)
}

/// Pure part of the analysis: restricts `studies` to `allowed` countries
/// (when given) and aggregates.
pub fn summarize(
    doi: &str,
    comparison: &Json,
    region: Option<&str>,
    allowed: Option<&HashSet<String>>,
    warnings: Vec<String>,
) -> AnalysisReport {
    let all: Vec<Json> = comparison["studies"].as_array().cloned().unwrap_or_default();
    let studies = match allowed {
        Some(set) => filter_by_membership(&all, "location.countryCode", set),
        None => all,
    };
    let r0_values: Vec<R0Value> = studies
        .iter()
        .filter_map(|s| {
            Some(R0Value {
                study_id: s["id"].as_str()?.to_string(),
                r0: s["r0"].as_f64()?,
                country_code: study_country(s),
            })
        })
        .collect();
    let mean_r0 = (!r0_values.is_empty()).then(|| r0_values.iter().map(|v| v.r0).sum::<f64>() / r0_values.len() as f64);
    let mut seen = BTreeSet::new();
    let mut publisher_distribution = BTreeMap::new();
    for s in &studies {
        let paper = &s["paper"];
        let Some(id) = paper["id"].as_str() else { continue };
        if seen.insert(id.to_string()) {
            let publisher = paper["publisher"].as_str().unwrap_or("unknown").to_string();
            *publisher_distribution.entry(publisher).or_insert(0) += 1;
        }
    }
    AnalysisReport {
        doi: doi.to_string(),
        comparison_id: comparison["id"].as_str().unwrap_or_default().to_string(),
        comparison_title: comparison["title"].as_str().map(String::from),
        region: region.map(String::from),
        studies: studies.len(),
        mean_r0,
        r0_values,
        publisher_distribution,
        warnings,
    }
}

/// Runs the analysis against a gateway. Upstream errors that still leave a
/// comparison to work with end up in `warnings`.
pub fn analyze(client: &GatewayClient, doi: &str, region: Option<&str>) -> Result<AnalysisReport, CliError> {
    let region = region.map(|r| r.trim().to_ascii_uppercase());
    if let Some(r) = &region {
        if continent_id(r).is_none() {
            return Err(CliError::Usage(format!("unknown continent code `{r}` (expected one of AF AS EU NA OC SA AN)")));
        }
    }
    let mut vars = Map::new();
    vars.insert("doi".into(), json!(doi));
    let response = client.request(ANALYSIS_QUERY, &vars)?;
    let mut warnings = error_lines(&response);
    let work = &response["data"]["work"];
    let mut comparison = work["comparison"].clone();
    if comparison.is_null() {
        // The DOI may name the comparison itself.
        let direct = client.request(COMPARISON_QUERY, &vars)?;
        comparison = direct["data"]["comparisonByDoi"].clone();
        if comparison.is_null() {
            if !warnings.is_empty() && !work.is_null() {
                return Err(CliError::Partial(warnings));
            }
            return Err(CliError::NotFound(if work.is_null() {
                format!("no work with DOI {doi}")
            } else {
                format!("work {doi} is not linked to a comparison")
            }));
        }
        warnings.clear();
    }
    let allowed = match &region {
        None => None,
        Some(r) => {
            let mut v = Map::new();
            v.insert("region".into(), json!(r));
            let reply = client.request(REGION_QUERY, &v)?;
            let errs = error_lines(&reply);
            let Some(countries) = reply["data"]["countriesOf"].as_array() else {
                return Err(CliError::Partial(errs));
            };
            warnings.extend(errs);
            Some(countries.iter().filter_map(|c| c["countryCode"].as_str().map(String::from)).collect::<HashSet<_>>())
        }
    };
    Ok(summarize(doi, &comparison, region.as_deref(), allowed.as_ref(), warnings))
}

pub fn format_r0(v: f64) -> String {
    format!("{v}")
}

/// Writes `publisher_distribution.csv` and `r0_values.csv` into `dir`.
pub fn write_csvs(report: &AnalysisReport, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let publishers = dir.join("publisher_distribution.csv");
    let mut w = csv::Writer::from_path(&publishers)?;
    w.write_record(["publisher", "count"])?;
    for (p, n) in &report.publisher_distribution {
        w.write_record([p.as_str(), &n.to_string()])?;
    }
    w.flush().map_err(|e| CliError::io(&publishers, e))?;
    let values = dir.join("r0_values.csv");
    let mut w = csv::Writer::from_path(&values)?;
    w.write_record(["study_id", "r0", "country_code"])?;
    for v in &report.r0_values {
        w.write_record([v.study_id.as_str(), &format_r0(v.r0), v.country_code.as_deref().unwrap_or("")])?;
    }
    w.flush().map_err(|e| CliError::io(&values, e))?;
    Ok(vec![publishers, values])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comparison() -> Json {
        json!({"id": "R1", "title": "t", "studies": [
            {"id": "S1", "r0": 2.0, "countryCode": "IR", "paper": {"id": "P1", "publisher": "A"}, "location": {"countryCode": "IR"}},
            {"id": "S2", "r0": 4.0, "countryCode": "IT", "paper": {"id": "P2", "publisher": "B"}, "location": {"countryCode": "IT"}},
            {"id": "S3", "r0": null, "countryCode": "CN", "paper": {"id": "P1", "publisher": "A"}, "location": null}
        ]})
    }

    #[test]
    fn whole_comparison() {
        let r = summarize("d", &comparison(), None, None, vec![]);
        assert_eq!(r.studies, 3);
        assert_eq!(r.mean_r0, Some(3.0));
        assert_eq!(r.publisher_distribution, BTreeMap::from([("A".into(), 1), ("B".into(), 1)]));
        assert_eq!(r.r0_values.len(), 2);
    }

    #[test]
    fn region_drops_unlocated_studies() {
        let allowed: HashSet<String> = ["IR".to_string(), "CN".to_string()].into();
        let r = summarize("d", &comparison(), Some("AS"), Some(&allowed), vec![]);
        assert_eq!(r.studies, 1);
        assert_eq!(r.mean_r0, Some(2.0));
    }

    #[test]
    fn no_values_means_no_mean() {
        let r = summarize("d", &json!({"id": "R", "studies": []}), None, None, vec![]);
        assert_eq!(r.mean_r0, None);
    }
}
