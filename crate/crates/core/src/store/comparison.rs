use std::collections::{HashSet, VecDeque};

use super::{vocab, StatementStore, StoreError};
use crate::model::{Object, Statement};
use crate::pid::{parse_pid, Pid, PidScheme};

/// Statements whose subject lies at most this many hops below a
/// contribution root contribute to its comparison cells.
const CELL_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Creator {
    pub name: String,
    pub orcid: Option<Pid>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Paper {
    pub id: String,
    pub title: String,
    pub doi: Option<Pid>,
    pub publisher: String,
    pub publication_year: Option<i64>,
    pub contributions: Vec<String>,
}

impl Paper {
    pub fn load(store: &StatementStore, id: &str) -> Option<Paper> {
        let r = store.resource(id).filter(|r| r.has_class(vocab::PAPER))?;
        Some(Paper {
            id: r.id.clone(),
            title: r.label.clone(),
            doi: store.first_literal(id, vocab::DOI).and_then(|d| Pid::doi(d).ok()),
            publisher: store.first_literal(id, vocab::PUBLISHER).unwrap_or_default().to_string(),
            publication_year: store.first_literal(id, vocab::PUBLICATION_YEAR).and_then(parse_year),
            contributions: store
                .objects(id, vocab::HAS_CONTRIBUTION)
                .filter_map(Object::as_resource)
                .map(String::from)
                .collect(),
        })
    }

    /// The paper a contribution belongs to.
    pub fn of_contribution(store: &StatementStore, contribution: &str) -> Option<Paper> {
        let id = store.subjects_pointing_to(vocab::HAS_CONTRIBUTION, contribution).next()?.to_string();
        Paper::load(store, &id)
    }

    pub fn by_doi(store: &StatementStore, doi: &Pid) -> Option<Paper> {
        store
            .resources_of_class(vocab::PAPER)
            .find(|r| store.first_literal(&r.id, vocab::DOI).and_then(|d| Pid::doi(d).ok()).as_ref() == Some(doi))
            .and_then(|r| Paper::load(store, &r.id))
    }
}

fn parse_year(text: &str) -> Option<i64> {
    text.parse::<f64>().ok().filter(|f| f.fract() == 0.0).map(|f| f as i64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub id: String,
    pub title: String,
    pub description: String,
    pub research_field: String,
    pub creators: Vec<Creator>,
    pub doi: Option<Pid>,
    pub publication_year: Option<i64>,
    pub contributions: Vec<String>,
    pub properties: Vec<String>,
}

impl Comparison {
    pub fn load(store: &StatementStore, id: &str) -> Result<Comparison, StoreError> {
        let r = store
            .resource(id)
            .filter(|r| r.has_class(vocab::COMPARISON))
            .ok_or_else(|| StoreError::MissingComparison(id.to_string()))?;
        let creators = store
            .objects(id, vocab::CREATOR)
            .filter_map(Object::as_resource)
            .filter_map(|a| store.resource(a))
            .map(|a| Creator {
                name: a.label.clone(),
                orcid: store.first_literal(&a.id, vocab::ORCID).and_then(|o| Pid::orcid(o).ok()),
            })
            .collect();
        Ok(Comparison {
            id: r.id.clone(),
            title: r.label.clone(),
            description: store.first_literal(id, vocab::DESCRIPTION).unwrap_or_default().to_string(),
            research_field: store.first_literal(id, vocab::RESEARCH_FIELD).unwrap_or_default().to_string(),
            creators,
            doi: store.first_literal(id, vocab::DOI).and_then(|d| Pid::doi(d).ok()),
            publication_year: store.first_literal(id, vocab::PUBLICATION_YEAR).and_then(parse_year),
            contributions: store
                .objects(id, vocab::COMPARES)
                .filter_map(Object::as_resource)
                .map(String::from)
                .collect(),
            properties: store
                .objects(id, vocab::COMPARE_PROPERTY)
                .map(|o| match o {
                    Object::Resource(p) => p.clone(),
                    Object::Literal(l) => l.lexical().to_string(),
                })
                .collect(),
        })
    }

    pub fn all(store: &StatementStore) -> Vec<Comparison> {
        store
            .resources_of_class(vocab::COMPARISON)
            .filter_map(|r| Comparison::load(store, &r.id).ok())
            .collect()
    }

    /// Papers owning the compared contributions, first-seen order, deduplicated.
    pub fn papers(&self, store: &StatementStore) -> Vec<Paper> {
        let mut seen = HashSet::new();
        self.contributions
            .iter()
            .filter_map(|c| Paper::of_contribution(store, c))
            .filter(|p| seen.insert(p.id.clone()))
            .collect()
    }
}

/// Points the comparison at a new DOI, replacing any previous one.
pub fn assign_doi(store: &mut StatementStore, comparison: &str, doi: &Pid) -> Result<(), StoreError> {
    Comparison::load(store, comparison)?;
    store.remove(comparison, vocab::DOI);
    store.add(comparison, vocab::DOI, Object::Literal(crate::model::Literal::string(doi.value())))?;
    Ok(())
}

pub fn comparison_by_doi(store: &StatementStore, doi: &Pid) -> Result<Comparison, StoreError> {
    if doi.scheme() != PidScheme::Doi {
        return Err(StoreError::NotFound(doi.to_string()));
    }
    Comparison::all(store)
        .into_iter()
        .find(|c| c.doi.as_ref() == Some(doi))
        .ok_or_else(|| StoreError::NotFound(doi.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub contribution: String,
    pub label: String,
    pub paper: Option<Paper>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub property: String,
    pub label: String,
}

/// Contributions as columns, properties as rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub comparison: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    /// `cells[row][column]`, values in statement insertion order.
    pub cells: Vec<Vec<Vec<Object>>>,
}

impl ComparisonTable {
    pub fn cell(&self, property: &str, contribution: &str) -> Option<&[Object]> {
        let r = self.rows.iter().position(|r| r.property == property)?;
        let c = self.columns.iter().position(|c| c.contribution == contribution)?;
        Some(&self.cells[r][c])
    }
}

/// Statements reachable from `root` whose subject is within
/// `CELL_DEPTH - 1` hops, in insertion order.
pub(crate) fn reachable_statements<'a>(store: &'a StatementStore, root: &str) -> Vec<(usize, &'a Statement)> {
    let mut seen: HashSet<String> = HashSet::from([root.to_string()]);
    let mut queue = VecDeque::from([(root.to_string(), 0usize)]);
    let mut out = Vec::new();
    while let Some((subject, dist)) = queue.pop_front() {
        for (idx, st) in store.about(&subject) {
            out.push((idx, st));
            if let Some(next) = st.object().as_resource() {
                if dist + 1 < CELL_DEPTH && seen.insert(next.to_string()) {
                    queue.push_back((next.to_string(), dist + 1));
                }
            }
        }
    }
    out.sort_by_key(|(i, _)| *i);
    out
}

pub(crate) fn reachable_values(store: &StatementStore, root: &str, predicate: &str) -> Vec<Object> {
    reachable_statements(store, root)
        .into_iter()
        .filter(|(_, s)| s.predicate() == predicate)
        .map(|(_, s)| s.object().clone())
        .collect()
}

pub fn build_comparison(store: &StatementStore, comparison: &str) -> Result<ComparisonTable, StoreError> {
    let cmp = Comparison::load(store, comparison)?;
    if cmp.contributions.len() < 2 {
        return Err(StoreError::TooFewContributions { id: cmp.id, count: cmp.contributions.len() });
    }
    let columns: Vec<Column> = cmp
        .contributions
        .iter()
        .map(|c| Column {
            contribution: c.clone(),
            label: store.resource(c).map(|r| r.label.clone()).unwrap_or_default(),
            paper: Paper::of_contribution(store, c),
        })
        .collect();
    let rows: Vec<Row> = cmp
        .properties
        .iter()
        .map(|p| Row {
            property: p.clone(),
            label: store.resource(p).map(|r| r.label.clone()).unwrap_or_else(|| p.clone()),
        })
        .collect();
    let reach: Vec<Vec<(usize, &Statement)>> = columns.iter().map(|c| reachable_statements(store, &c.contribution)).collect();
    let cells = rows
        .iter()
        .map(|row| {
            reach
                .iter()
                .map(|sts| {
                    sts.iter()
                        .filter(|(_, s)| s.predicate() == row.property)
                        .map(|(_, s)| s.object().clone())
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(ComparisonTable { comparison: cmp.id, columns, rows, cells })
}

/// One compared contribution flattened for the reproductive-number view.
#[derive(Debug, Clone, PartialEq)]
pub struct Study {
    pub id: String,
    pub label: String,
    pub paper: Option<Paper>,
    pub r0: Option<f64>,
    pub confidence_interval_low: Option<f64>,
    pub confidence_interval_high: Option<f64>,
    pub confidence_level: Option<f64>,
    pub location_label: Option<String>,
    pub location_geoname_id: Option<u64>,
    pub country_code: Option<String>,
}

impl Study {
    pub fn load(store: &StatementStore, contribution: &str) -> Study {
        let first_number = |predicate: &str| {
            reachable_values(store, contribution, predicate)
                .iter()
                .find_map(|o| o.as_literal().and_then(|l| l.as_number()))
        };
        let location = reachable_values(store, contribution, vocab::LOCATION)
            .into_iter()
            .find_map(|o| o.as_resource().map(String::from));
        let location_res = location.as_deref().and_then(|l| store.resource(l));
        let geoname = location_res.and_then(|r| {
            r.same_as.as_ref().and_then(Pid::geonames_id).or_else(|| {
                store
                    .first_literal(&r.id, vocab::SAME_AS)
                    .and_then(|u| parse_pid(u, Some(PidScheme::Geonames)).ok())
                    .and_then(|p| p.geonames_id())
            })
        });
        Study {
            id: contribution.to_string(),
            label: store.resource(contribution).map(|r| r.label.clone()).unwrap_or_default(),
            paper: Paper::of_contribution(store, contribution),
            r0: first_number(vocab::R0),
            confidence_interval_low: first_number(vocab::LOWER_BOUND),
            confidence_interval_high: first_number(vocab::UPPER_BOUND),
            confidence_level: first_number(vocab::LEVEL),
            location_label: location_res.map(|r| r.label.clone()),
            location_geoname_id: geoname,
            country_code: location_res
                .and_then(|r| store.first_literal(&r.id, vocab::COUNTRY_CODE))
                .map(String::from),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
@resource CMP\tDemo comparison\tComparison
@resource P_R0\tbasic reproductive number\tProperty
@resource P_CI\tconfidence interval\tProperty
@resource PAPER1\tFirst paper\tPaper
@resource PAPER2\tSecond paper\tPaper
@resource C1\tStudy one\tContribution
@resource C2\tStudy two\tContribution
@resource CI1\tinterval\tConfidenceInterval
@resource DEEP1\tdeep\t
@resource DEEP2\tdeeper\t
CMP\tdoi\tstring\t10.48366/R1
CMP\tcompareContribution\tresource\tC1
CMP\tcompareContribution\tresource\tC2
CMP\tcompareProperty\tresource\tP_R0
CMP\tcompareProperty\tresource\tP_CI
CMP\tcompareProperty\tresource\tlowerBound
CMP\tcompareProperty\tresource\tmarker
PAPER1\thasContribution\tresource\tC1
PAPER2\thasContribution\tresource\tC2
PAPER1\tdoi\tstring\t10.1/ONE
C1\tP_R0\tnumber\t2.5
C1\tP_R0\tnumber\t2.7
C1\tP_CI\tresource\tCI1
CI1\tlowerBound\tnumber\t2.1
CI1\tupperBound\tnumber\t3.9
CI1\tnext\tresource\tDEEP1
DEEP1\tmarker\tstring\tdepth3
DEEP1\tnext\tresource\tDEEP2
DEEP2\tmarker\tstring\tdepth4
C2\tP_R0\tnumber\t3.1
";

    fn store() -> StatementStore {
        StatementStore::parse(FIXTURE).unwrap()
    }

    #[test]
    fn table_dimensions_and_cells() {
        let s = store();
        let t = build_comparison(&s, "CMP").unwrap();
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.columns.len(), 2);
        assert_eq!(t.rows[0].label, "basic reproductive number");
        let r0: Vec<f64> = t.cell("P_R0", "C1").unwrap().iter().filter_map(|o| o.as_literal()?.as_number()).collect();
        assert_eq!(r0, [2.5, 2.7]);
        // property absent from a contribution leaves an empty cell
        assert!(t.cell("P_CI", "C2").unwrap().is_empty());
        assert_eq!(t.cell("lowerBound", "C1").unwrap().len(), 1);
        assert_eq!(t.columns[0].paper.as_ref().unwrap().id, "PAPER1");
    }

    #[test]
    fn traversal_stops_at_depth_three() {
        let t = build_comparison(&store(), "CMP").unwrap();
        let marker = t.cell("marker", "C1").unwrap();
        assert_eq!(marker.len(), 1);
        assert_eq!(marker[0].as_literal().unwrap().lexical(), "depth3");
    }

    #[test]
    fn comparison_errors() {
        let mut s = store();
        assert!(matches!(build_comparison(&s, "nope"), Err(StoreError::MissingComparison(_))));
        s.remove("CMP", vocab::COMPARES);
        s.add("CMP", vocab::COMPARES, Object::Resource("C1".into())).unwrap();
        assert!(matches!(build_comparison(&s, "CMP"), Err(StoreError::TooFewContributions { count: 1, .. })));
    }

    #[test]
    fn lookup_by_doi_with_reassignment() {
        let mut s = store();
        let doi = Pid::doi("10.48366/r1").unwrap();
        assert_eq!(comparison_by_doi(&s, &doi).unwrap().id, "CMP");
        assert_eq!(comparison_by_doi(&s, &Pid::doi("10.48366/R1").unwrap()).unwrap().id, "CMP");
        assert!(matches!(comparison_by_doi(&s, &Pid::doi("10.1/none").unwrap()), Err(StoreError::NotFound(_))));
        let fresh = Pid::doi("10.48366/fresh").unwrap();
        assign_doi(&mut s, "CMP", &fresh).unwrap();
        let before = Comparison::load(&s, "CMP").unwrap();
        assert_eq!(comparison_by_doi(&s, &fresh).unwrap(), before);
        assert!(comparison_by_doi(&s, &doi).is_err());
    }

    #[test]
    fn study_projection() {
        let s = store();
        let st = Study::load(&s, "C1");
        assert_eq!(st.r0, Some(2.5));
        assert_eq!(st.confidence_interval_low, Some(2.1));
        assert_eq!(st.confidence_interval_high, Some(3.9));
        assert_eq!(st.paper.unwrap().doi.unwrap().value(), "10.1/one");
    }
}
