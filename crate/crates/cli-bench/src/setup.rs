use congest_sim::{Mode, ModelConfig};
use graph_core::{assign_ids, default_id_bits, generate, load_graph, Graph, GraphError, GraphSpec, IdAssignment, IdScheme};

use crate::{CliError, GraphArgs, ModeArg, NetArgs, SchemeArg};

/// Families whose output depends on the seed.
const RANDOM_FAMILIES: [&str; 2] = ["gnp", "tree"];

pub struct Network {
    pub g: Graph,
    pub ids: IdAssignment,
    pub cfg: ModelConfig,
}

fn graph_error(e: GraphError) -> CliError {
    match e {
        GraphError::Io { path, source } => CliError::File { path, msg: source.to_string() },
        GraphError::Spec(_) => CliError::Usage(e.to_string()),
        e => CliError::Format(e.to_string()),
    }
}

/// Generates `gen:<spec>` or loads a file.
pub fn load_graph_arg(a: &GraphArgs) -> Result<Graph, CliError> {
    match a.graph.strip_prefix("gen:") {
        Some(spec) => {
            let family = spec.split(':').next().unwrap_or("");
            if RANDOM_FAMILIES.contains(&family) && a.seed.is_none() {
                return Err(CliError::Usage(format!("random family `{family}` needs --seed")));
            }
            let spec = GraphSpec::parse(spec, a.seed.unwrap_or(0)).map_err(graph_error)?;
            generate(&spec).map_err(graph_error)
        }
        None => load_graph(&a.graph).map_err(graph_error),
    }
}

pub(crate) fn parse_bandwidth(s: &str) -> Result<Option<u32>, CliError> {
    if s == "local" {
        return Ok(None);
    }
    match s.parse::<u32>() {
        Ok(b) if b >= 1 => Ok(Some(b)),
        _ => Err(CliError::Usage(format!("--bandwidth expects a positive bit count or `local`, got `{s}`"))),
    }
}

pub(crate) fn model(mode: ModeArg, bandwidth: &str) -> Result<ModelConfig, CliError> {
    let mode = match mode {
        ModeArg::Logical => Mode::Logical,
        ModeArg::Faithful => Mode::Faithful,
    };
    ModelConfig::new(parse_bandwidth(bandwidth)?, mode).map_err(|e| CliError::Usage(e.to_string()))
}

pub(crate) fn identifiers(g: &Graph, bits: Option<u32>, scheme: SchemeArg, seed: Option<u64>) -> Result<IdAssignment, CliError> {
    let b = bits.unwrap_or_else(|| default_id_bits(g.n()));
    let scheme = match scheme {
        SchemeArg::Sequential => IdScheme::Sequential,
        SchemeArg::Padded => IdScheme::Padded,
        SchemeArg::Shuffled => IdScheme::Shuffled(seed.unwrap_or(0)),
    };
    assign_ids(g, b, scheme).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn load_network(a: &NetArgs) -> Result<Network, CliError> {
    let g = load_graph_arg(&a.graph)?;
    let ids = identifiers(&g, a.id_bits, a.id_scheme, a.graph.seed)?;
    let cfg = model(a.mode, &a.bandwidth)?;
    Ok(Network { g, ids, cfg })
}
