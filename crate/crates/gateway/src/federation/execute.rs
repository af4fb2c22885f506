use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use fedwalk_core::graphql::{print_query, GraphQLError, PathSegment, ResponseDocument, SelectionSet};
use serde_json::{json, Map, Value as Json};

use super::plan::{Graft, PlanNode, QueryPlan, KEY_VARIABLE};
use super::FederatedSchema;
use crate::adapter::{AdapterError, UpstreamAdapter};
use crate::source::SourceId;

/// Upper bound on in-flight upstream requests per plan level.
pub const FETCH_CONCURRENCY: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct MergedResponse {
    pub data: Option<Json>,
    pub errors: Vec<GraphQLError>,
    /// Dotted response path of every non-null leaf to the source that
    /// produced it.
    pub provenance: BTreeMap<String, SourceId>,
}

impl MergedResponse {
    pub fn failure(errors: Vec<GraphQLError>) -> MergedResponse {
        MergedResponse { data: None, errors, provenance: BTreeMap::new() }
    }

    pub fn to_response_document(&self) -> ResponseDocument {
        ResponseDocument { data: self.data.clone(), errors: self.errors.clone() }
    }

    /// The response envelope with provenance under `extensions`.
    pub fn to_json(&self) -> Json {
        let mut out = self.to_response_document().to_json();
        if !self.provenance.is_empty() {
            let prov: Map<String, Json> =
                self.provenance.iter().map(|(k, v)| (k.clone(), Json::String(v.to_string()))).collect();
            out["extensions"] = json!({ "provenance": prov });
        }
        out
    }
}

type Adapters = HashMap<SourceId, Arc<dyn UpstreamAdapter>>;
type Outcome = Result<ResponseDocument, AdapterError>;
/// A node of the current level with its graft sites and one memo key per fetch.
type Pending<'a> = (&'a PlanNode, Vec<Site>, Vec<Option<FetchKey>>);

#[derive(Clone, PartialEq, Eq, Hash)]
struct FetchKey {
    source: SourceId,
    document: String,
    variables: String,
}

struct Fetch<'a> {
    key: FetchKey,
    node: &'a PlanNode,
    variables: Map<String, Json>,
}

/// A graft-site parent object: concrete path plus its join key.
struct Site {
    path: Vec<PathSegment>,
    key: Option<String>,
}

/// Runs a plan level by level. Upstream failures become null subtrees and
/// error entries; nothing here aborts the whole request.
pub fn execute_plan(
    plan: &QueryPlan,
    fed: &FederatedSchema,
    adapters: &Adapters,
    variables: &Map<String, Json>,
) -> MergedResponse {
    let mut merged = Json::Object(Map::new());
    let mut errors: Vec<GraphQLError> = Vec::new();
    let mut memo: HashMap<FetchKey, Outcome> = HashMap::new();
    for level in plan.levels() {
        let mut fetches: Vec<Fetch> = Vec::new();
        let mut work: Vec<Pending> = Vec::new();
        for id in level {
            let node = &plan.nodes[id];
            let sites = match &node.graft {
                None => Vec::new(),
                Some(g) => collect_sites(&merged, g),
            };
            if node.graft.is_some() && sites.is_empty() {
                continue;
            }
            if let Some(missing) = missing_variable(node, variables) {
                let message = format!("variable `${missing}` has no value; {} request skipped", node.source);
                skip_node(&mut merged, &mut errors, node, &sites, &message);
                continue;
            }
            let base = user_variables(node, variables);
            let mut keys = Vec::new();
            match &node.graft {
                None => keys.push(Some(push_fetch(&mut fetches, node, base))),
                Some(g) if g.link.batched => {
                    let distinct = distinct_keys(&sites);
                    if distinct.is_empty() {
                        keys.push(None);
                    } else {
                        let mut vars = base;
                        vars.insert(KEY_VARIABLE.into(), Json::Array(distinct.into_iter().map(Json::String).collect()));
                        keys.push(Some(push_fetch(&mut fetches, node, vars)));
                    }
                }
                Some(_) => {
                    for k in distinct_keys(&sites) {
                        let mut vars = base.clone();
                        vars.insert(KEY_VARIABLE.into(), Json::String(k));
                        keys.push(Some(push_fetch(&mut fetches, node, vars)));
                    }
                }
            }
            work.push((node, sites, keys));
        }
        run_fetches(fetches, adapters, &mut memo);
        for (node, sites, keys) in work {
            match &node.graft {
                None => graft_root(&mut merged, &mut errors, node, &memo[keys[0].as_ref().expect("root fetch")]),
                Some(g) => graft_link(&mut merged, &mut errors, node, g, &sites, &keys, &memo),
            }
        }
    }
    let data = project_object(&merged, plan.document.selection_set(), &fed.merged.query_root, fed);
    let mut provenance = BTreeMap::new();
    provenance_of(&data, plan.document.selection_set(), &fed.merged.query_root, fed, &mut Vec::new(), &mut provenance);
    MergedResponse { data: Some(data), errors, provenance }
}

fn push_fetch<'a>(fetches: &mut Vec<Fetch<'a>>, node: &'a PlanNode, variables: Map<String, Json>) -> FetchKey {
    let key = FetchKey {
        source: node.source,
        document: print_query(&node.document),
        variables: Json::Object(variables.clone()).to_string(),
    };
    fetches.push(Fetch { key: key.clone(), node, variables });
    key
}

fn run_fetches(fetches: Vec<Fetch>, adapters: &Adapters, memo: &mut HashMap<FetchKey, Outcome>) {
    let mut seen = HashSet::new();
    let pending: Vec<Fetch> =
        fetches.into_iter().filter(|f| !memo.contains_key(&f.key) && seen.insert(f.key.clone())).collect();
    for chunk in pending.chunks(FETCH_CONCURRENCY) {
        let results: Vec<Outcome> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|f| {
                    s.spawn(move || match adapters.get(&f.node.source) {
                        Some(a) => a.fetch(&f.node.document, &f.variables),
                        None => Err(AdapterError::Malformed {
                            upstream: f.node.source.to_string(),
                            message: "no adapter bound".into(),
                        }),
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("adapter panicked")).collect()
        });
        for (f, r) in chunk.iter().zip(results) {
            memo.insert(f.key.clone(), r);
        }
    }
}

fn missing_variable<'a>(node: &'a PlanNode, variables: &Map<String, Json>) -> Option<&'a str> {
    node.document
        .operation
        .variables
        .iter()
        .find(|v| v.name != KEY_VARIABLE && v.default.is_none() && !variables.contains_key(&v.name))
        .map(|v| v.name.as_str())
}

fn user_variables(node: &PlanNode, variables: &Map<String, Json>) -> Map<String, Json> {
    node.document
        .operation
        .variables
        .iter()
        .filter_map(|v| variables.get(&v.name).map(|x| (v.name.clone(), x.clone())))
        .collect()
}

fn distinct_keys(sites: &[Site]) -> Vec<String> {
    let mut seen = HashSet::new();
    sites.iter().filter_map(|s| s.key.clone()).filter(|k| seen.insert(k.clone())).collect()
}

fn key_string(v: Option<&Json>) -> Option<String> {
    match v? {
        Json::String(s) => Some(s.clone()),
        Json::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn collect_sites(merged: &Json, graft: &Graft) -> Vec<Site> {
    fn walk(v: &Json, rest: &[String], path: &mut Vec<PathSegment>, alias: &str, out: &mut Vec<Site>) {
        match v {
            Json::Array(items) => {
                for (i, item) in items.iter().enumerate() {
                    path.push(PathSegment::Index(i));
                    walk(item, rest, path, alias, out);
                    path.pop();
                }
            }
            Json::Object(obj) => match rest.split_first() {
                None => out.push(Site { path: path.clone(), key: key_string(obj.get(alias)) }),
                Some((k, tail)) => {
                    if let Some(child) = obj.get(k) {
                        path.push(PathSegment::Key(k.clone()));
                        walk(child, tail, path, alias, out);
                        path.pop();
                    }
                }
            },
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(merged, &graft.site_path, &mut Vec::new(), &graft.key_alias, &mut out);
    out
}

fn object_at<'a>(root: &'a mut Json, path: &[PathSegment]) -> Option<&'a mut Map<String, Json>> {
    let mut cur = root;
    for seg in path {
        cur = match seg {
            PathSegment::Key(k) => cur.get_mut(k.as_str())?,
            PathSegment::Index(i) => cur.get_mut(*i)?,
        };
    }
    cur.as_object_mut()
}

fn set_at(merged: &mut Json, site: &[PathSegment], key: &str, value: Json) {
    if let Some(obj) = object_at(merged, site) {
        obj.insert(key.to_string(), value);
    }
}

fn with_key(path: &[PathSegment], key: &str) -> Vec<PathSegment> {
    let mut p = path.to_vec();
    p.push(PathSegment::Key(key.to_string()));
    p
}

fn tag(mut e: GraphQLError, source: SourceId) -> GraphQLError {
    if e.extensions.as_ref().is_none_or(|x| !x.contains_key("source")) {
        e = e.with_extension("source", source.to_string());
    }
    e
}

fn adapter_error(e: &AdapterError, source: SourceId, path: Vec<PathSegment>) -> GraphQLError {
    GraphQLError::new(e.to_string(), path)
        .with_extension("source", source.to_string())
        .with_extension("attempts", e.attempts())
}

fn skip_node(merged: &mut Json, errors: &mut Vec<GraphQLError>, node: &PlanNode, sites: &[Site], message: &str) {
    match &node.graft {
        None => {
            for f in &node.document.selection_set().fields {
                let rk = f.response_key();
                set_at(merged, &[], rk, Json::Null);
                errors.push(tag(GraphQLError::new(message, vec![PathSegment::Key(rk.into())]), node.source));
            }
        }
        Some(g) => {
            for s in sites {
                set_at(merged, &s.path, &g.response_key, Json::Null);
                errors.push(tag(GraphQLError::new(message, with_key(&s.path, &g.response_key)), node.source));
            }
        }
    }
}

fn graft_root(merged: &mut Json, errors: &mut Vec<GraphQLError>, node: &PlanNode, outcome: &Outcome) {
    let fields = &node.document.selection_set().fields;
    match outcome {
        Ok(resp) => {
            for f in fields {
                let rk = f.response_key();
                let v = resp.data.as_ref().and_then(|d| d.get(rk)).cloned().unwrap_or(Json::Null);
                set_at(merged, &[], rk, v);
            }
            errors.extend(resp.errors.iter().cloned().map(|e| tag(e, node.source)));
        }
        Err(e) => {
            for f in fields {
                let rk = f.response_key();
                set_at(merged, &[], rk, Json::Null);
                errors.push(adapter_error(e, node.source, vec![PathSegment::Key(rk.into())]));
            }
        }
    }
}

fn graft_link(
    merged: &mut Json,
    errors: &mut Vec<GraphQLError>,
    node: &PlanNode,
    graft: &Graft,
    sites: &[Site],
    keys: &[Option<FetchKey>],
    memo: &HashMap<FetchKey, Outcome>,
) {
    let rk = &graft.response_key;
    let root = &graft.link.link.target_root_field;
    for s in sites.iter().filter(|s| s.key.is_none()) {
        set_at(merged, &s.path, rk, Json::Null);
        let message = format!("join key `{}` is null", graft.link.link.join_key);
        errors.push(tag(GraphQLError::new(message, with_key(&s.path, rk)), node.source));
    }
    let distinct = distinct_keys(sites);
    // Per key: the value to graft and the errors to attach below each site.
    let mut answers: Vec<(Json, Vec<GraphQLError>)> = vec![(Json::Null, Vec::new()); distinct.len()];
    if graft.link.batched {
        match keys.first().and_then(|k| k.as_ref()).map(|k| &memo[k]) {
            None => {}
            Some(Err(e)) => {
                for a in &mut answers {
                    a.1.push(adapter_error(e, node.source, Vec::new()));
                }
            }
            Some(Ok(resp)) => {
                match resp.data.as_ref().and_then(|d| d.get(root)) {
                    Some(Json::Array(items)) if items.len() == distinct.len() => {
                        for (a, v) in answers.iter_mut().zip(items) {
                            a.0 = v.clone();
                        }
                    }
                    Some(Json::Array(items)) => {
                        let message = format!("batched `{root}` returned {} items for {} keys", items.len(), distinct.len());
                        for a in &mut answers {
                            a.1.push(GraphQLError::new(message.clone(), Vec::new()));
                        }
                    }
                    _ => {}
                }
                for e in &resp.errors {
                    match e.path.as_slice() {
                        [PathSegment::Key(r), PathSegment::Index(i), rest @ ..] if r == root && *i < answers.len() => {
                            answers[*i].1.push(GraphQLError { path: rest.to_vec(), ..e.clone() });
                        }
                        _ => {
                            for a in &mut answers {
                                a.1.push(GraphQLError { path: Vec::new(), ..e.clone() });
                            }
                        }
                    }
                }
            }
        }
    } else {
        for (a, k) in answers.iter_mut().zip(keys.iter().flatten()) {
            match &memo[k] {
                Err(e) => a.1.push(adapter_error(e, node.source, Vec::new())),
                Ok(resp) => {
                    a.0 = resp.data.as_ref().and_then(|d| d.get(root)).cloned().unwrap_or(Json::Null);
                    for e in &resp.errors {
                        let rest = match e.path.split_first() {
                            Some((PathSegment::Key(r), rest)) if r == root => rest.to_vec(),
                            _ => Vec::new(),
                        };
                        a.1.push(GraphQLError { path: rest, ..e.clone() });
                    }
                }
            }
        }
    }
    let index: HashMap<&str, usize> = distinct.iter().enumerate().map(|(i, k)| (k.as_str(), i)).collect();
    for s in sites {
        let Some(k) = &s.key else { continue };
        let (value, errs) = &answers[index[k.as_str()]];
        set_at(merged, &s.path, rk, value.clone());
        for e in errs {
            let mut path = with_key(&s.path, rk);
            path.extend(e.path.iter().cloned());
            errors.push(tag(GraphQLError { path, ..e.clone() }, node.source));
        }
    }
}

/// Reshapes the merged tree to the user's selection: request key order,
/// hidden key fields removed, `__typename` answered from the merged schema.
fn project_object(value: &Json, set: &SelectionSet, type_name: &str, fed: &FederatedSchema) -> Json {
    let mut out = Map::new();
    for f in &set.fields {
        let rk = f.response_key();
        if f.name == "__typename" {
            out.insert(rk.into(), Json::String(type_name.into()));
            continue;
        }
        let v = value.get(rk).unwrap_or(&Json::Null);
        let projected = match (&f.selection_set, fed.merged.field(type_name, &f.name)) {
            (Some(sel), Some(def)) => project_value(v, sel, def.ty.base(), fed),
            _ => v.clone(),
        };
        out.insert(rk.into(), projected);
    }
    Json::Object(out)
}

fn project_value(v: &Json, set: &SelectionSet, type_name: &str, fed: &FederatedSchema) -> Json {
    match v {
        Json::Array(items) => Json::Array(items.iter().map(|i| project_value(i, set, type_name, fed)).collect()),
        Json::Object(_) => project_object(v, set, type_name, fed),
        other => other.clone(),
    }
}

fn provenance_of(
    value: &Json,
    set: &SelectionSet,
    type_name: &str,
    fed: &FederatedSchema,
    path: &mut Vec<String>,
    out: &mut BTreeMap<String, SourceId>,
) {
    for f in &set.fields {
        if f.name == "__typename" {
            continue;
        }
        let rk = f.response_key();
        let Some(v) = value.get(rk) else { continue };
        path.push(rk.to_string());
        match (&f.selection_set, fed.merged.field(type_name, &f.name)) {
            (Some(sel), Some(def)) => each_object(v, path, &mut |obj, p| provenance_of(obj, sel, def.ty.base(), fed, p, out)),
            _ => {
                if let Some(origin) = fed.origin(type_name, &f.name) {
                    leaves(v, path, origin, out);
                }
            }
        }
        path.pop();
    }
}

fn each_object(v: &Json, path: &mut Vec<String>, visit: &mut dyn FnMut(&Json, &mut Vec<String>)) {
    match v {
        Json::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                path.push(i.to_string());
                each_object(item, path, visit);
                path.pop();
            }
        }
        Json::Object(_) => visit(v, path),
        _ => {}
    }
}

fn leaves(v: &Json, path: &mut Vec<String>, origin: SourceId, out: &mut BTreeMap<String, SourceId>) {
    match v {
        Json::Null => {}
        Json::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                path.push(i.to_string());
                leaves(item, path, origin, out);
                path.pop();
            }
        }
        _ => {
            out.insert(path.join("."), origin);
        }
    }
}

/// Keeps the rows whose value at the dotted `key` is in `allowed`, in order.
/// Rows with a null or missing key are dropped.
pub fn filter_by_membership(rows: &[Json], key: &str, allowed: &HashSet<String>) -> Vec<Json> {
    rows.iter()
        .filter(|row| {
            let v = key.split('.').try_fold(*row, |cur, k| cur.get(k));
            key_string(v).is_some_and(|k| allowed.contains(&k))
        })
        .cloned()
        .collect()
}
