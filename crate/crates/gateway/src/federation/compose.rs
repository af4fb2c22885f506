use std::collections::HashMap;

use fedwalk_core::graphql::{FieldDef, ObjectType, Schema};
use indexmap::IndexMap;

use super::{CrossWalkLink, FederatedSchema, FederationError, ResolvedLink};
use crate::source::{SourceBinding, SourceId};

const ROOT: &str = "Query";

/// Merges the source schemas under one `Query` root and adds every link
/// field to its parent type.
pub fn compose(sources: &[(SourceBinding, Schema)], links: &[CrossWalkLink]) -> Result<FederatedSchema, FederationError> {
    let mut types: IndexMap<String, ObjectType> = IndexMap::new();
    types.insert(ROOT.into(), ObjectType::new(ROOT));
    let mut origin: HashMap<(String, String), SourceId> = HashMap::new();
    let mut by_source: HashMap<SourceId, &Schema> = HashMap::new();
    for (binding, schema) in sources {
        if by_source.insert(binding.source, schema).is_some() {
            return Err(FederationError::DuplicateSource(binding.source));
        }
        for (name, t) in &schema.types {
            let merged_name = if *name == schema.query_root { ROOT } else { name.as_str() };
            let target = types.entry(merged_name.to_string()).or_insert_with(|| ObjectType::new(merged_name));
            for (fname, def) in &t.fields {
                let key = (merged_name.to_string(), fname.clone());
                if let Some(first) = origin.get(&key) {
                    return Err(FederationError::NameCollision {
                        type_name: merged_name.into(),
                        field: fname.clone(),
                        first: *first,
                        second: binding.source,
                    });
                }
                origin.insert(key, binding.source);
                target.fields.insert(fname.clone(), def.clone());
            }
        }
    }
    let mut resolved = Vec::new();
    for link in links {
        let from = format!("{}.{}", link.from_type, link.from_field);
        let dangling = |reason: String| FederationError::DanglingLink { from: from.clone(), reason };
        let parent = types.get(&link.from_type).ok_or_else(|| dangling(format!("type `{}` does not exist", link.from_type)))?;
        let key = parent
            .fields
            .get(&link.join_key)
            .ok_or_else(|| dangling(format!("key field `{}` does not exist", link.join_key)))?;
        if key.ty.is_list() || !matches!(key.ty.base(), "ID" | "String") {
            return Err(dangling(format!("key field `{}` must be ID or String, found {}", link.join_key, key.ty)));
        }
        if let Some(first) = origin.get(&(link.from_type.clone(), link.from_field.clone())) {
            return Err(FederationError::NameCollision {
                type_name: link.from_type.clone(),
                field: link.from_field.clone(),
                first: *first,
                second: link.target_source,
            });
        }
        let target = by_source
            .get(&link.target_source)
            .ok_or_else(|| dangling(format!("source {} is not bound", link.target_source)))?;
        let root = target
            .root()
            .fields
            .get(&link.target_root_field)
            .ok_or_else(|| dangling(format!("{} has no root field `{}`", link.target_source, link.target_root_field)))?;
        let [(argument, argument_type)] = root.args.iter().collect::<Vec<_>>()[..] else {
            return Err(dangling(format!("root field `{}` must take exactly one argument", root.name)));
        };
        let batched = argument_type.is_list() && root.ty.is_list();
        let ty = if batched { root.ty.element().cloned().unwrap_or_else(|| root.ty.clone()) } else { root.ty.clone() };
        types
            .get_mut(&link.from_type)
            .expect("checked above")
            .fields
            .insert(link.from_field.clone(), FieldDef::new(link.from_field.clone(), ty));
        origin.insert((link.from_type.clone(), link.from_field.clone()), link.target_source);
        resolved.push(ResolvedLink { link: link.clone(), argument: argument.clone(), argument_type: argument_type.clone(), batched });
    }
    let merged = Schema { types, query_root: ROOT.into() };
    merged.check().map_err(|e| FederationError::DanglingLink { from: "schema".into(), reason: e.to_string() })?;
    Ok(FederatedSchema { merged, field_origin: origin, links: resolved })
}
