//! Building blocks of the fedwalk scholarly federation gateway.

pub mod doi;
pub mod graphql;
pub mod model;
pub mod pid;
pub mod sources;
pub mod store;
pub mod template;

pub use model::{Datatype, Literal, Object, Resource, Statement};
pub use pid::{parse_pid, pids_equal, Pid, PidError, PidScheme};
