use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use skoo::schema::Fragment;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "skoo",
    version,
    about = "Check, validate and visualize SKOO knowledge graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge the schema with the inputs and check consistency
    Check(CommonArgs),
    /// Validate instance graphs against SKOO, all fragments and the alignment
    Validate(ValidateArgs),
    /// Turn instance graphs into a visual model (DOT or JSON)
    Viz(VizArgs),
    /// Serve the visual model over a read-only HTTP API
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Fragments to include: `all` or a comma-separated subset of dolce, wordnet, omdoc
    #[arg(long, value_name = "LIST", value_parser = parse_fragments)]
    pub fragments: Option<BTreeSet<Fragment>>,
    /// Include the alignment axioms
    #[arg(long)]
    pub alignment: bool,
    /// Turtle files
    #[arg(value_name = "INPUT")]
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Turtle files, validated together as one graph
    #[arg(value_name = "INPUT")]
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VizArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Rule file, or `default` for the bundled rules
    #[arg(long, value_name = "FILE", default_value = "default")]
    pub rules: String,
    /// Output format; inferred from --out when omitted, otherwise dot
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write here instead of standard output
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Rule file, or `default` for the bundled rules
    #[arg(long, value_name = "FILE", default_value = "default")]
    pub rules: String,
    /// Port on 127.0.0.1; 0 picks a free one
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory holding the viewer bundle
    #[arg(long, value_name = "DIR")]
    pub assets: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
    Json,
}

fn parse_fragments(s: &str) -> Result<BTreeSet<Fragment>, String> {
    if s == "all" {
        return Ok(Fragment::ALL.into_iter().collect());
    }
    s.split(',')
        .map(|f| f.trim().parse::<Fragment>().map_err(|e| e.to_string()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleSource {
    Default,
    File(PathBuf),
}

/// Everything a pipeline run needs, after argument checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub ruleset: RuleSource,
    pub fragments: BTreeSet<Fragment>,
    pub alignment: bool,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl PipelineConfig {
    pub fn new(common: &CommonArgs) -> Self {
        PipelineConfig {
            inputs: common.inputs.clone(),
            ruleset: RuleSource::Default,
            fragments: common.fragments.clone().unwrap_or_default(),
            alignment: common.alignment,
            output: None,
            format: Format::Dot,
        }
    }

    pub fn with_rules(mut self, rules: &str) -> Self {
        self.ruleset = match rules {
            "default" => RuleSource::Default,
            path => RuleSource::File(PathBuf::from(path)),
        };
        self
    }

    /// Sets the output, rejecting a format that disagrees with the extension.
    pub fn with_output(
        mut self,
        out: Option<&Path>,
        format: Option<Format>,
    ) -> Result<Self, CliError> {
        let implied = out
            .and_then(|p| p.extension())
            .and_then(|e| match e.to_str()? {
                "dot" | "gv" => Some(Format::Dot),
                "json" => Some(Format::Json),
                _ => None,
            });
        self.format = match (format, implied) {
            (Some(f), Some(i)) if f != i => {
                return Err(CliError::Usage(format!(
                    "--format {} does not match output file {}",
                    f.to_possible_value()
                        .expect("no skipped variants")
                        .get_name(),
                    out.expect("implied format needs a path").display()
                )))
            }
            (Some(f), _) => f,
            (None, Some(i)) => i,
            (None, None) => Format::Dot,
        };
        self.output = out.map(Path::to_path_buf);
        Ok(self)
    }
}
