use std::collections::HashMap;
use std::fmt;

use fedwalk_core::graphql::{
    print_query, validate, Document, Field, Operation, SelectionSet, TypeRef, Value, VariableDef,
};

use super::{FederatedSchema, FederationError, ResolvedLink};
use crate::source::SourceId;

/// Variable through which a dependent node receives its join key(s).
pub const KEY_VARIABLE: &str = "_fedKey";
/// Prefix of the hidden alias that selects a link's join key on the parent.
pub const KEY_ALIAS_PREFIX: &str = "_fedKey_";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanInput {
    pub from_node: usize,
    /// Response keys from the merged root to the hidden key alias. Lists are
    /// traversed implicitly.
    pub extraction_path: Vec<String>,
    pub variable: String,
}

/// Where a dependent node's answers go.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graft {
    /// Response keys from the merged root to the parent objects.
    pub site_path: Vec<String>,
    pub response_key: String,
    pub key_alias: String,
    pub link: ResolvedLink,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanNode {
    pub id: usize,
    pub source: SourceId,
    pub document: Document,
    pub inputs: Vec<PlanInput>,
    pub graft: Option<Graft>,
}

impl PlanNode {
    pub fn depends_on(&self) -> Option<usize> {
        self.inputs.first().map(|i| i.from_node)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryPlan {
    /// The user document the plan answers.
    pub document: Document,
    pub nodes: Vec<PlanNode>,
}

impl QueryPlan {
    /// `(from, to)` pairs implied by node inputs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.nodes.iter().flat_map(|n| n.inputs.iter().map(move |i| (i.from_node, n.id))).collect()
    }

    /// Nodes grouped by dependency depth; every node's inputs come from an
    /// earlier level.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let mut depth: HashMap<usize, usize> = HashMap::new();
        let mut levels: Vec<Vec<usize>> = Vec::new();
        for n in &self.nodes {
            let d = n.depends_on().map(|p| depth[&p] + 1).unwrap_or(0);
            depth.insert(n.id, d);
            if levels.len() <= d {
                levels.resize(d + 1, Vec::new());
            }
            levels[d].push(n.id);
        }
        levels
    }
}

impl fmt::Display for QueryPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            write!(f, "#{} {}", n.id, n.source)?;
            if let Some(g) = &n.graft {
                write!(f, " <- #{} at {}.{}", n.depends_on().unwrap_or(0), g.site_path.join("."), g.response_key)?;
                if g.link.batched {
                    f.write_str(" (batched)")?;
                }
            }
            writeln!(f, "\n  {}", print_query(&n.document))?;
        }
        Ok(())
    }
}

/// Partitions a query by field origin. Cross-source links become dependent
/// nodes fed by a hidden key selection on the parent.
pub fn plan(doc: &Document, fed: &FederatedSchema) -> Result<QueryPlan, FederationError> {
    let errors = validate(doc, &fed.merged);
    if !errors.is_empty() {
        return Err(FederationError::InvalidQuery(
            errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        ));
    }
    let mut planner = Planner { fed, user_vars: &doc.operation.variables, nodes: Vec::new() };
    let root = &fed.merged.query_root;
    // Top-level fields are grouped per source so each source gets one root node.
    let mut groups: Vec<(SourceId, Vec<&Field>)> = Vec::new();
    for field in &doc.selection_set().fields {
        if field.name == "__typename" {
            continue;
        }
        let source = fed.origin(root, &field.name).ok_or_else(|| unplannable(&[field.response_key().to_string()], "no origin"))?;
        match groups.iter_mut().find(|(s, _)| *s == source) {
            Some((_, fs)) => fs.push(field),
            None => groups.push((source, vec![field])),
        }
    }
    for (source, fields) in groups {
        let id = planner.reserve();
        let mut selected = Vec::new();
        for field in fields {
            let mut path = vec![field.response_key().to_string()];
            selected.push(planner.split_field(id, source, root, field, &mut path)?);
        }
        planner.finish(id, SelectionSet::new(selected), Vec::new(), None);
    }
    Ok(QueryPlan { document: doc.clone(), nodes: planner.nodes.into_iter().map(|n| n.expect("every reserved node is finished")).collect() })
}

fn unplannable(path: &[String], reason: &str) -> FederationError {
    FederationError::UnplannableQuery { path: path.join("."), reason: reason.to_string() }
}

struct Planner<'a> {
    fed: &'a FederatedSchema,
    user_vars: &'a [VariableDef],
    nodes: Vec<Option<PlanNode>>,
}

impl Planner<'_> {
    /// Ids are handed out before children are planned so parents precede
    /// their dependents.
    fn reserve(&mut self) -> usize {
        self.nodes.push(None);
        self.nodes.len() - 1
    }

    fn finish(&mut self, id: usize, set: SelectionSet, mut extra_vars: Vec<VariableDef>, dep: Option<(PlanInput, Graft)>) {
        let probe = Document::new(set.clone());
        for name in probe.referenced_variables() {
            if let Some(def) = self.user_vars.iter().find(|v| v.name == name) {
                extra_vars.push(def.clone());
            }
        }
        let source = match &dep {
            Some((_, g)) => g.link.link.target_source,
            None => self
                .fed
                .origin(&self.fed.merged.query_root, &set.fields[0].name)
                .expect("root fields have an origin"),
        };
        let (inputs, graft) = match dep {
            Some((i, g)) => (vec![i], Some(g)),
            None => (Vec::new(), None),
        };
        let document = Document { operation: Operation { name: None, variables: extra_vars, selection_set: set } };
        self.nodes[id] = Some(PlanNode { id, source, document, inputs, graft });
    }

    /// Returns the part of `field` answered by `source`; links below it
    /// become dependent nodes.
    fn split_field(
        &mut self,
        node: usize,
        source: SourceId,
        parent_type: &str,
        field: &Field,
        path: &mut Vec<String>,
    ) -> Result<Field, FederationError> {
        let def = self
            .fed
            .merged
            .field(parent_type, &field.name)
            .ok_or_else(|| unplannable(path, "unknown field"))?;
        let Some(children) = &field.selection_set else {
            return Ok(field.clone());
        };
        let child_type = def.ty.base().to_string();
        let mut kept = Vec::new();
        for child in &children.fields {
            if child.name == "__typename" {
                kept.push(child.clone());
                continue;
            }
            let rk = child.response_key().to_string();
            if let Some(link) = self.fed.link(&child_type, &child.name) {
                let alias = format!("{KEY_ALIAS_PREFIX}{rk}");
                kept.push(Field::leaf(link.link.join_key.clone()).with_alias(alias.clone()));
                if child.selection_set.as_ref().is_some_and(|s| !s.is_empty()) {
                    self.plan_link(node, link.clone(), child, path.clone(), rk, alias)?;
                }
                continue;
            }
            let origin = self.fed.origin(&child_type, &child.name);
            if origin != Some(source) {
                path.push(rk);
                let e = unplannable(path, &format!("field of {} used inside a {} subtree without a link",
                    origin.map(|o| o.to_string()).unwrap_or_else(|| "no source".into()), source));
                return Err(e);
            }
            path.push(rk);
            kept.push(self.split_field(node, source, &child_type, child, path)?);
            path.pop();
        }
        if kept.is_empty() {
            kept.push(Field::leaf("__typename"));
        }
        Ok(Field { selection_set: Some(SelectionSet::new(kept)), ..field.clone() })
    }

    fn plan_link(
        &mut self,
        parent: usize,
        link: ResolvedLink,
        field: &Field,
        site_path: Vec<String>,
        response_key: String,
        key_alias: String,
    ) -> Result<(), FederationError> {
        let target = link.link.target_source;
        let id = self.reserve();
        let root_type = self.fed.merged.query_root.clone();
        let root_field = Field::leaf(link.link.target_root_field.clone())
            .with_arg(link.argument.clone(), Value::Variable(KEY_VARIABLE.into()));
        let root_field = Field { selection_set: field.selection_set.clone(), ..root_field };
        let mut path = site_path.clone();
        path.push(response_key.clone());
        let split = self.split_field(id, target, &root_type, &root_field, &mut path)?;
        let key_var = VariableDef { name: KEY_VARIABLE.into(), ty: strip_non_null(&link.argument_type), default: None };
        let mut extraction_path = site_path.clone();
        extraction_path.push(key_alias.clone());
        let input = PlanInput { from_node: parent, extraction_path, variable: KEY_VARIABLE.into() };
        let graft = Graft { site_path, response_key, key_alias, link };
        self.finish(id, SelectionSet::new(vec![split]), vec![key_var], Some((input, graft)));
        Ok(())
    }
}

fn strip_non_null(t: &TypeRef) -> TypeRef {
    match t {
        TypeRef::NonNull(inner) => strip_non_null(inner),
        TypeRef::List(inner) => TypeRef::list_of(strip_non_null(inner)),
        named => named.clone(),
    }
}
