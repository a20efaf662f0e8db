use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gogtk::HalfInt;

#[derive(Parser, Debug)]
#[command(name = "gogtk", version, about = "Finite-scale experiments with graphs of groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Check a graph-of-groups document and list every structural check.
    Validate,
    /// Presentation of the fundamental group.
    Presentation,
    /// Bass-Serre tree ball around the base vertex.
    Tree,
    /// Tree-of-spaces ball around the base point, with D0.
    Space,
    /// Ladder over a base-fiber segment, with retraction and quasiconvexity measurements.
    Ladder,
    /// Flaring probe for two lifts of a tree geodesic through the base.
    Flare,
    /// Flow probes, limit-set proxies and the intersection defect table.
    Limitset,
    /// Witness extraction along the path stabilizer of adjacent base vertices.
    Witness,
    /// Glue a new vertex along a subgroup of the base vertex group.
    Attach,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Presentation => "presentation",
            Command::Tree => "tree",
            Command::Space => "space",
            Command::Ladder => "ladder",
            Command::Flare => "flare",
            Command::Limitset => "limitset",
            Command::Witness => "witness",
            Command::Attach => "attach",
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct Options {
    /// Graph-of-groups JSON document, or the name of a bundled example.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<String>,
    /// Directory for reports and artifacts.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Seed for sampled measurements (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Radius of the command's main construction (see the README).
    #[arg(long, global = true)]
    pub radius: Option<usize>,
    /// Word budget per fiber, or coset budget for `tree`.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Override the computed D0, e.g. `3/2`.
    #[arg(long, global = true, value_name = "X")]
    pub d0: Option<HalfInt>,
    /// Ladder admission diameter (default 2·D0).
    #[arg(long, global = true, value_name = "X")]
    pub d1: Option<HalfInt>,
    /// Fellow-traveling threshold (default 2·(1 + D0)).
    #[arg(long, global = true, value_name = "X")]
    pub dconfig: Option<HalfInt>,
    /// Repeat the command over a list of values for one parameter.
    #[arg(long, global = true, value_name = "KEY=V1,V2,...")]
    pub sweep: Option<String>,
    /// Also write the DOT rendering.
    #[arg(long, global = true)]
    pub dot: bool,
    /// Also write CSV series.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Ladder depth.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Central separation threshold of the flare probe.
    #[arg(long, global = true)]
    pub mk: Option<usize>,
    /// Subgroup to attach, as words separated by commas.
    #[arg(long, global = true, value_name = "WORDS")]
    pub subgroup: Option<String>,
}
