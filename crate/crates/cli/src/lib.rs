//! The `skoo` command-line tool and its HTTP API.
//!
//! Exit codes: 0 on success, 1 when the data fails a check (inconsistent,
//! invalid, bad rules, dangling edges), 2 on usage and I/O problems.

use std::path::{Path, PathBuf};

use skoo::model::{ModelError, Ontology};
use skoo::reasoner::{check_consistency, subsumption_closure};
use skoo::schema::{schema_file, verify_schema_dir, SchemaBundle, SchemaError};
use skoo::transform::{apply_rules, default_rules, parse_ruleset, TransformError};
use skoo::turtle::{parse_turtle, ParseError};
use skoo::visual::{to_dot, to_json, VisualError, VisualModel};
use thiserror::Error;

mod config;
pub mod server;

pub use config::{
    Cli, Command, CommonArgs, Format, PipelineConfig, RuleSource, ServeArgs, ValidateArgs, VizArgs,
};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod guide {}

/// Overrides the embedded schema directory; its files must match exactly.
pub const SCHEMA_DIR_VAR: &str = "SKOO_SCHEMA_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("cannot merge inputs: {0}")]
    Model(#[from] ModelError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Visual(#[from] VisualError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Transform(_) | CliError::Visual(_) => 1,
            _ => 2,
        }
    }
}

/// What a command prints and whether the data passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub success: bool,
    pub output: String,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.success {
            0
        } else {
            1
        }
    }
}

/// The schema bundle, after checking `SKOO_SCHEMA_DIR` when it is set.
pub fn schema_bundle() -> Result<&'static SchemaBundle, CliError> {
    if let Some(dir) = std::env::var_os(SCHEMA_DIR_VAR) {
        verify_schema_dir(Path::new(&dir))?;
    }
    Ok(SchemaBundle::embedded())
}

/// Reads an input file. A relative path that does not exist is looked up
/// among the shipped schema files, so `fixtures/wille-ch3.ttl` works from
/// any directory.
fn read_input(path: &Path) -> Result<String, CliError> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound && path.is_relative() => {
            let shipped = path.to_str().and_then(schema_file);
            shipped.map(|f| f.contents.to_owned()).ok_or(CliError::Io {
                path: path.to_path_buf(),
                source: e,
            })
        }
        Err(source) => Err(CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// Parses and merges the input files.
pub fn load_inputs(inputs: &[PathBuf]) -> Result<Ontology, CliError> {
    let mut graph = Ontology::new();
    for path in inputs {
        let text = read_input(path)?;
        let parsed = parse_turtle(&text).map_err(|source| CliError::Parse {
            path: path.clone(),
            source,
        })?;
        graph = graph.merge(&parsed)?;
    }
    Ok(graph)
}

fn merged_with_schema(config: &PipelineConfig) -> Result<Ontology, CliError> {
    let bundle = schema_bundle()?;
    let inputs = load_inputs(&config.inputs)?;
    Ok(bundle
        .merged(&config.fragments, config.alignment)?
        .merge(&inputs)?)
}

/// Merges SKOO, the selected fragments, the alignment and the inputs, then
/// reports on consistency.
pub fn cmd_check(config: &PipelineConfig) -> Result<Outcome, CliError> {
    let report = check_consistency(&merged_with_schema(config)?);
    Ok(Outcome {
        success: report.consistent,
        output: report.to_json() + "\n",
    })
}

/// Validates the inputs, taken together as one instance graph.
pub fn cmd_validate(config: &PipelineConfig) -> Result<Outcome, CliError> {
    let bundle = schema_bundle()?;
    let graph = load_inputs(&config.inputs)?;
    let report = skoo::schema::validate_instance_graph(&graph, bundle);
    Ok(Outcome {
        success: report.is_valid(),
        output: report.to_json() + "\n",
    })
}

/// Runs parse, closure and the rules, returning the visual model.
pub fn build_model(config: &PipelineConfig) -> Result<(Ontology, VisualModel), CliError> {
    let rules = match &config.ruleset {
        RuleSource::Default => default_rules(),
        RuleSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_ruleset(&text)?
        }
    };
    let graph = merged_with_schema(config)?;
    let closure = subsumption_closure(&graph);
    let model = apply_rules(&graph, &closure, &rules)?;
    Ok((graph, model))
}

/// The visual model as DOT or JSON. JSON output has no trailing newline, so
/// it is byte-identical to `GET /api/model`.
pub fn cmd_viz(config: &PipelineConfig) -> Result<Outcome, CliError> {
    let (_, model) = build_model(config)?;
    let output = match config.format {
        Format::Dot => to_dot(&model)?,
        Format::Json => to_json(&model)?,
    };
    Ok(Outcome {
        success: true,
        output,
    })
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, &outcome.output).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.output.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> Result<u8, CliError> {
    let outcome = match cli.command {
        Command::Check(args) => cmd_check(&PipelineConfig::new(&args))?,
        Command::Validate(args) => cmd_validate(&PipelineConfig::new(&CommonArgs {
            fragments: None,
            alignment: false,
            inputs: args.inputs,
        }))?,
        Command::Viz(args) => {
            let config = PipelineConfig::new(&args.common)
                .with_rules(&args.rules)
                .with_output(args.out.as_deref(), args.format)?;
            let outcome = cmd_viz(&config)?;
            emit(&outcome, config.output.as_deref())?;
            return Ok(outcome.exit_code());
        }
        Command::Serve(args) => {
            let config = PipelineConfig::new(&args.common).with_rules(&args.rules);
            let snapshot = server::Snapshot::load(&config)?;
            server::serve_blocking(snapshot, args.port, args.assets)?;
            return Ok(0);
        }
    };
    emit(&outcome, None)?;
    Ok(outcome.exit_code())
}
