use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use trapmark::{parse_bnet, BooleanNetwork, InfluenceGraph, NameIndex, PartialAssignment};

pub fn read_network(path: &Path) -> Result<BooleanNetwork> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_bnet(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_graph(path: &Path) -> Result<InfluenceGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    InfluenceGraph::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

/// A marker given inline as a JSON object, or as the path of a file
/// holding one.
pub fn read_marker(arg: &str, names: &[String], base: Option<&Path>) -> Result<PartialAssignment> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        let path = match base {
            Some(dir) => dir.join(arg),
            None => Path::new(arg).to_path_buf(),
        };
        fs::read_to_string(&path).with_context(|| format!("reading marker {}", path.display()))?
    };
    let index = NameIndex::new(names.to_vec())?;
    PartialAssignment::from_json(&index, &text).context("parsing marker")
}

pub fn name_list(arg: Option<&str>, names: &[String]) -> Result<Vec<usize>> {
    let Some(arg) = arg else { return Ok(Vec::new()) };
    arg.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| anyhow::anyhow!("unknown component `{s}`"))
        })
        .collect()
}
