use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fedwalk_mockinfra::{load_fixtures, serve_all, MockPorts, MockService};

#[derive(Parser)]
#[command(name = "mockinfra", about = "Mock statement graph, metadata graph, gazetteer and ontology lookup")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve all four mocks until interrupted.
    Serve {
        #[arg(long)]
        fixtures: PathBuf,
        /// statement,metadata,gazetteer,ontology
        #[arg(long, default_value = "4101,4102,4103,4104")]
        ports: String,
    },
}

fn main() -> ExitCode {
    let Command::Serve { fixtures, ports } = Cli::parse().command;
    let ports = match MockPorts::parse(&ports) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let set = match load_fixtures(&fixtures) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let infra = match serve_all(&set, ports) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    println!("statement graph  {}", infra.graphql_url(MockService::Statement));
    println!("metadata graph   {}", infra.graphql_url(MockService::Metadata));
    println!("doi registry     {}/dois", infra.base_url(MockService::Metadata));
    println!("gazetteer        {}", infra.base_url(MockService::Gazetteer));
    println!("ontology lookup  {}/search", infra.base_url(MockService::Ontology));
    let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().expect("runtime");
    let _ = rt.block_on(tokio::signal::ctrl_c());
    infra.shutdown();
    ExitCode::SUCCESS
}
