//! The `fedwalk` command line: run the gateway, query it, analyse a
//! comparison's reproductive numbers and publish comparison DOIs.

pub mod analyze;
pub mod client;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fedwalk_core::doi::{build_metadata, serialize_kernel4, DoiError};
use fedwalk_core::store::{comparison_by_doi, StatementStore, StoreError};
use fedwalk_core::{Pid, PidError};
use fedwalk_gateway::http::TransportError;
use fedwalk_gateway::live::{live_config, live_smoke};
use fedwalk_gateway::publish::{RegisterError, RegistryClient};
use fedwalk_gateway::server::{spawn, ServeError};
use fedwalk_gateway::{ConfigError, Gateway, GatewayConfig, GatewayError};
use serde_json::{Map, Value as Json};
use thiserror::Error;

use crate::client::{error_lines, GatewayClient, DEFAULT_ENDPOINT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
/// Partial results, invalid queries and usage errors.
pub const EXIT_PARTIAL: i32 = 2;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:4000";
pub const LANDING_PAGE_BASE: &str = "https://orkg.org/comparison/";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("incomplete answer: {}", .0.join("; "))]
    Partial(Vec<String>),
    #[error("gateway unreachable: {0}")]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Serve(#[from] ServeError),
    #[error(transparent)]
    Register(#[from] RegisterError),
    #[error(transparent)]
    Doi(#[from] DoiError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Pid(#[from] PidError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Partial(_) | CliError::Pid(_) => EXIT_PARTIAL,
            _ => EXIT_FAILURE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fedwalk", version, about = "Federated queries over scholarly knowledge graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct EndpointArg {
    /// Gateway GraphQL URL.
    #[arg(long, env = "FEDWALK_ENDPOINT", default_value = DEFAULT_ENDPOINT)]
    pub endpoint: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the gateway.
    Serve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `gateway.listen`.
        #[arg(long)]
        listen: Option<String>,
    },
    /// Send one query to a running gateway.
    Query {
        /// Query text, or a file containing it.
        query: String,
        /// Variables as a JSON object.
        #[arg(long)]
        variables: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        output: OutputFormat,
        #[command(flatten)]
        endpoint: EndpointArg,
    },
    /// Reproductive-number summary of the comparison linked to a DOI.
    #[command(name = "analyze-r0")]
    AnalyzeR0 {
        doi: String,
        /// Continent code, e.g. AS.
        #[arg(long)]
        region: Option<String>,
        /// Directory for the CSV files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        output: OutputFormat,
        #[command(flatten)]
        endpoint: EndpointArg,
    },
    /// Build DataCite metadata for a comparison and register its DOI.
    Publish {
        /// Comparison resource id (R44930) or its DOI.
        comparison: String,
        doi: String,
        /// Make the DOI findable instead of leaving a draft.
        #[arg(long)]
        publish: bool,
        /// Directory holding statements.tsv.
        #[arg(long, env = "FEDWALK_FIXTURES")]
        fixtures: PathBuf,
        /// Gateway config; its `registry.endpoint` is used.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Registry base URL, overriding the config.
        #[arg(long)]
        registry: Option<String>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// One read-only request per public upstream.
    #[command(name = "live-smoke")]
    LiveSmoke {
        /// Required: confirms talking to the public services.
        #[arg(long)]
        live: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command, writing to
/// `out` and `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARTIAL } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Serve { config, listen } => serve(&config, listen, out),
        Command::Query { query, variables, output, endpoint } => {
            query_cmd(&query, variables.as_deref(), output, &endpoint.endpoint, out, err)
        }
        Command::AnalyzeR0 { doi, region, out_dir, output, endpoint } => {
            analyze_cmd(&doi, region.as_deref(), &out_dir, output, &endpoint.endpoint, out, err)
        }
        Command::Publish { comparison, doi, publish, fixtures, config, registry, out_dir } => {
            publish_cmd(&comparison, &doi, publish, &fixtures, config.as_deref(), registry, &out_dir, out)
        }
        Command::LiveSmoke { live, config } => {
            if !live {
                return Err(CliError::Usage(
                    "live-smoke sends requests to public services; pass --live to run it".into(),
                ));
            }
            let cfg = match config {
                Some(p) => GatewayConfig::load(p)?,
                None => live_config(std::env::var("GEONAMES_USERNAME").ok()),
            };
            writeln!(out, "{}", live_smoke(&cfg)).ok();
            Ok(EXIT_OK)
        }
    }
}

fn serve(config: &Path, listen: Option<String>, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = GatewayConfig::load(config)?;
    let gateway = Arc::new(Gateway::from_config(&cfg)?);
    let health = gateway.health();
    for (id, h) in &health.sources {
        match &h.error {
            None => writeln!(out, "{:<16} {:<12} {}", id.as_str(), h.status, h.endpoint),
            Some(e) => writeln!(out, "{:<16} {:<12} {} ({e})", id.as_str(), h.status, h.endpoint),
        }
        .ok();
    }
    let listen = listen.or(cfg.listen.clone()).unwrap_or_else(|| DEFAULT_LISTEN.to_string());
    let handle = spawn(gateway, &listen)?;
    writeln!(out, "gateway {} listening on {}", health.status, handle.graphql_url()).ok();
    out.flush().ok();
    handle.wait();
    Ok(EXIT_OK)
}

fn parse_variables(text: Option<&str>) -> Result<Map<String, Json>, CliError> {
    let Some(text) = text else { return Ok(Map::new()) };
    match serde_json::from_str::<Json>(text) {
        Ok(Json::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::Usage("--variables must be a JSON object".into())),
        Err(e) => Err(CliError::Usage(format!("--variables is not valid JSON: {e}"))),
    }
}

fn query_text(arg: &str) -> Result<String, CliError> {
    let path = Path::new(arg);
    if !arg.contains('{') && path.is_file() {
        return std::fs::read_to_string(path).map_err(|e| CliError::io(path, e));
    }
    Ok(arg.to_string())
}

fn query_cmd(
    query: &str,
    variables: Option<&str>,
    output: OutputFormat,
    endpoint: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let text = query_text(query)?;
    let vars = parse_variables(variables)?;
    let response = GatewayClient::new(endpoint).request(&text, &vars)?;
    match output {
        OutputFormat::Csv => write!(out, "{}", table::to_csv(&response["data"])?).ok(),
        _ => writeln!(out, "{}", serde_json::to_string_pretty(&response).expect("json serializes")).ok(),
    };
    let errors = error_lines(&response);
    for e in &errors {
        writeln!(err, "error: {e}").ok();
    }
    Ok(if errors.is_empty() { EXIT_OK } else { EXIT_PARTIAL })
}

fn analyze_cmd(
    doi: &str,
    region: Option<&str>,
    out_dir: &Path,
    output: OutputFormat,
    endpoint: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let report = analyze::analyze(&GatewayClient::new(endpoint), doi, region)?;
    let written = analyze::write_csvs(&report, out_dir)?;
    match output {
        OutputFormat::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json serializes")).ok();
        }
        OutputFormat::Csv => {
            write!(out, "{}", std::fs::read_to_string(&written[1]).map_err(|e| CliError::io(&written[1], e))?).ok();
        }
        OutputFormat::Text => {
            let title = report.comparison_title.as_deref().unwrap_or("untitled");
            writeln!(out, "comparison {} ({title})", report.comparison_id).ok();
            writeln!(out, "region: {}", report.region.as_deref().unwrap_or("all")).ok();
            writeln!(out, "studies: {}", report.studies).ok();
            match report.mean_r0 {
                Some(m) => writeln!(out, "meanR0: {m:.4}"),
                None => writeln!(out, "meanR0: n/a"),
            }
            .ok();
            for p in &written {
                writeln!(out, "wrote {}", p.display()).ok();
            }
        }
    }
    for w in &report.warnings {
        writeln!(err, "warning: {w}").ok();
    }
    Ok(if report.warnings.is_empty() { EXIT_OK } else { EXIT_PARTIAL })
}

#[allow(clippy::too_many_arguments)]
fn publish_cmd(
    comparison: &str,
    doi: &str,
    publish: bool,
    fixtures: &Path,
    config: Option<&Path>,
    registry: Option<String>,
    out_dir: &Path,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let registry = match registry {
        Some(r) => r,
        None => config
            .map(GatewayConfig::load)
            .transpose()?
            .and_then(|c| c.registry_endpoint)
            .ok_or_else(|| CliError::Usage("no registry: pass --registry or a --config with registry.endpoint".into()))?,
    };
    let statements = fixtures.join("statements.tsv");
    let text = std::fs::read_to_string(&statements).map_err(|e| CliError::io(&statements, e))?;
    let store = StatementStore::parse(&text)?;
    let id = match Pid::doi(comparison) {
        Ok(pid) => comparison_by_doi(&store, &pid)?.id,
        Err(_) => comparison.to_string(),
    };
    let pid = Pid::doi(doi)?;
    let record = build_metadata(&store, &id, &pid)?;
    let xml = serialize_kernel4(&record);
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let xml_path = out_dir.join(format!("{}.xml", id.to_ascii_lowercase()));
    std::fs::write(&xml_path, &xml).map_err(|e| CliError::io(&xml_path, e))?;
    let client = RegistryClient::new(registry, Duration::from_secs(10), 1);
    let state = client.register(&record, &format!("{LANDING_PAGE_BASE}{id}"), publish)?;
    writeln!(out, "DOI {} is {} (registered {})", state.doi.value(), state.state, state.registered_at).ok();
    writeln!(out, "metadata: {}", xml_path.display()).ok();
    Ok(EXIT_OK)
}
