//! The on-disk network description: a JSON document with top-level key
//! "kind" ("builtin" or "explicit"). Builtin files name a family plus its
//! parameters; explicit files carry raw processor tables. Parsing yields a
//! `NetworkSpec`, and every network can be exported back in explicit form.

use crate::core::{Digraph, Network};
use crate::error::NetError;
use crate::zoo::{ExplicitProcessor, Family, InverseProcessor, NetworkSpec};
use serde::{Deserialize, Serialize};

/// Hard cap on per-processor state counts accepted from files, so that a
/// hostile document cannot request giant table allocations.
pub const MAX_FILE_STATES: usize = 1 << 20;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NetworkFile {
    Builtin { digraph: DigraphFile, family: String, #[serde(default)] params: ParamsFile },
    Explicit { digraph: DigraphFile, processors: Vec<ProcessorFile> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DigraphFile {
    pub vertices: Vec<String>,
    /// (source, target) pairs in cyclic order per source
    pub edges: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sinks: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inverse: Option<Vec<InverseFile>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InverseFile {
    pub modulus: usize,
    /// (vertex name, "a" or "b")
    pub c: (String, String),
    pub d: (String, String),
    pub choices: Vec<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProcessorFile {
    pub letters: Vec<String>,
    pub states: usize,
    pub next: Vec<Vec<usize>>,
    /// emit[state][local letter] = list of (letter name, count)
    pub emit: Vec<Vec<Vec<(String, u64)>>>,
}

fn vertex_index(dg: &DigraphFile, name: &str) -> Result<usize, NetError> {
    dg.vertices
        .iter()
        .position(|v| v == name)
        .ok_or_else(|| NetError::InvalidSpec(format!("unknown vertex {:?}", name)))
}

fn digraph_from_file(dg: &DigraphFile) -> Result<Digraph, NetError> {
    let mut seen = std::collections::BTreeSet::new();
    for v in &dg.vertices {
        if !seen.insert(v) {
            return Err(NetError::InvalidSpec(format!("duplicate vertex {:?}", v)));
        }
    }
    let mut edges = Vec::with_capacity(dg.edges.len());
    for (src, tgt) in &dg.edges {
        edges.push((vertex_index(dg, src)?, vertex_index(dg, tgt)?));
    }
    Digraph::from_edges(dg.vertices.len(), &edges)
}

fn check_state_count(n: usize) -> Result<(), NetError> {
    if n > MAX_FILE_STATES {
        Err(NetError::InvalidSpec(format!("state count {} exceeds the file limit", n)))
    } else {
        Ok(())
    }
}

/// Turn a parsed document into a build-ready spec.
pub fn spec_from_file(doc: &NetworkFile) -> Result<NetworkSpec, NetError> {
    match doc {
        NetworkFile::Builtin { digraph, family, params } => {
            let g = digraph_from_file(digraph)?;
            let nv = g.num_vertices();
            let thresholds = || -> Result<Vec<usize>, NetError> {
                let t = params
                    .thresholds
                    .clone()
                    .ok_or_else(|| NetError::InvalidSpec("family needs \"thresholds\"".into()))?;
                if t.len() != nv {
                    return Err(NetError::InvalidSpec("one threshold per vertex required".into()));
                }
                for &x in &t {
                    check_state_count(x)?;
                }
                Ok(t)
            };
            let fam = match family.as_str() {
                "rotor" => Family::Rotor,
                "sandpile" => Family::Sandpile,
                "branching_rotor" => Family::BranchingRotor,
                "height_arrow" => Family::HeightArrow { thresholds: thresholds()? },
                "height_arrow_sinked" | "sandpile_sinked" => {
                    let sink_names = params
                        .sinks
                        .clone()
                        .ok_or_else(|| NetError::InvalidSpec("family needs \"sinks\"".into()))?;
                    let sinks = sink_names
                        .iter()
                        .map(|s| vertex_index(digraph, s))
                        .collect::<Result<Vec<_>, _>>()?;
                    let thresholds = if family == "sandpile_sinked" {
                        (0..nv).map(|v| g.outdeg(v)).collect()
                    } else {
                        thresholds()?
                    };
                    Family::HeightArrowSinked { thresholds, sinks }
                }
                "toppling" => Family::Toppling { thresholds: thresholds()? },
                "arithmetical" => {
                    let diag = params
                        .diag
                        .clone()
                        .ok_or_else(|| NetError::InvalidSpec("family needs \"diag\"".into()))?;
                    for &x in &diag {
                        check_state_count(x)?;
                    }
                    let b = params
                        .b
                        .clone()
                        .ok_or_else(|| NetError::InvalidSpec("family needs \"b\"".into()))?;
                    Family::Arithmetical { diag, b }
                }
                "inverse" => {
                    let files = params
                        .inverse
                        .clone()
                        .ok_or_else(|| NetError::InvalidSpec("family needs \"inverse\"".into()))?;
                    let mut vertices = Vec::with_capacity(files.len());
                    for f in &files {
                        check_state_count(f.modulus)?;
                        let role = |r: &str| match r {
                            "a" => Ok(0usize),
                            "b" => Ok(1usize),
                            other => Err(NetError::InvalidSpec(format!(
                                "letter role must be \"a\" or \"b\", got {:?}",
                                other
                            ))),
                        };
                        vertices.push(InverseProcessor {
                            modulus: f.modulus,
                            target_c: (vertex_index(digraph, &f.c.0)?, role(&f.c.1)?),
                            target_d: (vertex_index(digraph, &f.d.0)?, role(&f.d.1)?),
                            choices: f.choices.clone(),
                        });
                    }
                    Family::Inverse { vertices }
                }
                other => {
                    return Err(NetError::InvalidSpec(format!("unknown family {:?}", other)));
                }
            };
            Ok(NetworkSpec { digraph: g, family: fam })
        }
        NetworkFile::Explicit { digraph, processors } => {
            let g = digraph_from_file(digraph)?;
            let mut specs = Vec::with_capacity(processors.len());
            for p in processors {
                check_state_count(p.states)?;
                for row in &p.emit {
                    for entry in row {
                        for (_, c) in entry {
                            if *c > 1_000_000_000 {
                                return Err(NetError::InvalidSpec(
                                    "emission count exceeds the file limit".into(),
                                ));
                            }
                        }
                    }
                }
                specs.push(ExplicitProcessor {
                    letters: p.letters.clone(),
                    num_states: p.states,
                    next: p.next.clone(),
                    emit: p.emit.clone(),
                });
            }
            Ok(NetworkSpec::explicit(g, specs))
        }
    }
}

/// Parse a JSON document into a spec; malformed JSON and semantic problems
/// both surface as `InvalidSpec` with a location-bearing message.
pub fn parse_network_file(text: &str) -> Result<NetworkSpec, NetError> {
    let doc: NetworkFile = serde_json::from_str(text)
        .map_err(|e| NetError::InvalidSpec(format!("parse error: {}", e)))?;
    spec_from_file(&doc)
}

/// Export any network in the explicit file form; re-importing rebuilds an
/// identical network.
pub fn network_to_file(net: &Network) -> NetworkFile {
    let vertices: Vec<String> = (0..net.num_vertices()).map(|v| format!("v{}", v)).collect();
    let pairs = net.digraph.edge_pairs();
    let edges: Vec<(String, String)> =
        pairs.iter().map(|&(s, t)| (vertices[s].clone(), vertices[t].clone())).collect();
    let processors = net
        .processors
        .iter()
        .map(|p| ProcessorFile {
            letters: p.letters.iter().map(|&l| net.letter_name(l).to_string()).collect(),
            states: p.num_states,
            next: p.next.clone(),
            emit: p
                .emit
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|em| {
                            em.iter().map(|&(l, c)| (net.letter_name(l).to_string(), c)).collect()
                        })
                        .collect()
                })
                .collect(),
        })
        .collect();
    NetworkFile::Explicit { digraph: DigraphFile { vertices, edges }, processors }
}

pub fn to_json(doc: &NetworkFile) -> String {
    serde_json::to_string_pretty(doc).expect("network documents serialize")
}

/// Comma-separated integer vector, e.g. "2,1,0" or "-1, 3".
pub fn parse_count_vector(text: &str) -> Result<Vec<i64>, NetError> {
    if text.trim().is_empty() {
        return Ok(vec![]);
    }
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map_err(|e| NetError::InvalidSpec(format!("bad count {:?}: {}", part.trim(), e)))
        })
        .collect()
}

/// Comma-separated local state indices, e.g. "0,1,1".
pub fn parse_state_vector(text: &str) -> Result<Vec<usize>, NetError> {
    if text.trim().is_empty() {
        return Ok(vec![]);
    }
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|e| NetError::InvalidSpec(format!("bad state {:?}: {}", part.trim(), e)))
        })
        .collect()
}
