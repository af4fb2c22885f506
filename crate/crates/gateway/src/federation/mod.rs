//! Schema composition, query planning and plan execution.

mod compose;
mod execute;
mod plan;

use std::collections::HashMap;

use fedwalk_core::graphql::Schema;
use thiserror::Error;

use crate::source::SourceId;

pub use compose::compose;
pub use execute::{execute_plan, filter_by_membership, MergedResponse, FETCH_CONCURRENCY};
pub use plan::{plan, Graft, PlanInput, PlanNode, QueryPlan, KEY_ALIAS_PREFIX, KEY_VARIABLE};

/// A field whose value lives in another source, reached through a key on
/// the parent object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossWalkLink {
    pub from_type: String,
    pub from_field: String,
    pub join_key: String,
    pub target_source: SourceId,
    pub target_root_field: String,
}

/// A link after composition, with what the planner needs to know about its
/// target root field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedLink {
    pub link: CrossWalkLink,
    pub argument: String,
    pub argument_type: fedwalk_core::graphql::TypeRef,
    /// The root takes a list of keys and answers a positionally aligned list.
    pub batched: bool,
}

#[derive(Debug, Clone)]
pub struct FederatedSchema {
    pub merged: Schema,
    pub field_origin: HashMap<(String, String), SourceId>,
    pub links: Vec<ResolvedLink>,
}

impl FederatedSchema {
    pub fn origin(&self, type_name: &str, field: &str) -> Option<SourceId> {
        self.field_origin.get(&(type_name.to_string(), field.to_string())).copied()
    }

    pub fn link(&self, type_name: &str, field: &str) -> Option<&ResolvedLink> {
        self.links.iter().find(|l| l.link.from_type == type_name && l.link.from_field == field)
    }

    pub fn sources(&self) -> Vec<SourceId> {
        let mut s: Vec<SourceId> = self.field_origin.values().copied().collect();
        s.sort();
        s.dedup();
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FederationError {
    #[error("`{type_name}.{field}` is defined by both {first} and {second}")]
    NameCollision { type_name: String, field: String, first: SourceId, second: SourceId },
    #[error("link {from}: {reason}")]
    DanglingLink { from: String, reason: String },
    #[error("source {0} is bound twice")]
    DuplicateSource(SourceId),
    #[error("cannot plan `{path}`: {reason}")]
    UnplannableQuery { path: String, reason: String },
    #[error("query is invalid: {0}")]
    InvalidQuery(String),
}
