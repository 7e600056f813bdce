//! Execution engine: networks, configurations, legal executions,
//! removal/exchange machinery, and stabilization.

use crate::error::NetError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Vertex index into `Digraph::out_edges`.
pub type VertexId = usize;
/// Global edge index; list position inside an out-edge list defines the
/// cyclic order used by the rotor-like builders.
pub type EdgeId = usize;
/// Canonical index into the total alphabet.
pub type Letter = usize;
/// Index into a processor's local state set.
pub type LocalState = usize;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub target: VertexId,
}

/// Directed multigraph with ordered out-edge lists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Digraph {
    out_edges: Vec<Vec<Edge>>,
}

impl Digraph {
    /// Build from (src, tgt) pairs; edges are numbered in input order and
    /// appended to their source's out-list in input order.
    pub fn from_edges(num_vertices: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, NetError> {
        let mut out_edges = vec![Vec::new(); num_vertices];
        for (id, &(src, tgt)) in edges.iter().enumerate() {
            if src >= num_vertices || tgt >= num_vertices {
                return Err(NetError::InvalidSpec(format!(
                    "edge {} ({} -> {}) references a vertex out of range (n = {})",
                    id, src, tgt, num_vertices
                )));
            }
            out_edges[src].push(Edge { id, target: tgt });
        }
        Ok(Digraph { out_edges })
    }

    /// Bidirected cycle C_n: each vertex v has edges to v-1 and v+1 (mod n),
    /// listed in that order.
    pub fn bidirected_cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut edges = Vec::new();
        for k in 0..n {
            edges.push((k, (k + n - 1) % n));
            edges.push((k, (k + 1) % n));
        }
        Digraph::from_edges(n, &edges).unwrap()
    }

    pub fn num_vertices(&self) -> usize {
        self.out_edges.len()
    }

    pub fn num_edges(&self) -> usize {
        self.out_edges.iter().map(|l| l.len()).sum()
    }

    pub fn out_edges(&self, v: VertexId) -> &[Edge] {
        &self.out_edges[v]
    }

    pub fn outdeg(&self, v: VertexId) -> usize {
        self.out_edges[v].len()
    }

    pub fn indeg(&self, v: VertexId) -> usize {
        self.out_edges
            .iter()
            .map(|l| l.iter().filter(|e| e.target == v).count())
            .sum()
    }

    pub fn edge_pairs(&self) -> Vec<(VertexId, VertexId)> {
        let mut pairs = vec![(0, 0); self.num_edges()];
        for (src, list) in self.out_edges.iter().enumerate() {
            for e in list {
                pairs[e.id] = (src, e.target);
            }
        }
        pairs
    }

    pub fn is_strongly_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        let reach = |start: usize, flip: bool| -> usize {
            let mut seen = vec![false; n];
            let mut stack = vec![start];
            seen[start] = true;
            let mut count = 1;
            while let Some(v) = stack.pop() {
                for u in 0..n {
                    let connected = if flip {
                        self.out_edges[u].iter().any(|e| e.target == v)
                    } else {
                        self.out_edges[v].iter().any(|e| e.target == u)
                    };
                    if connected && !seen[u] {
                        seen[u] = true;
                        count += 1;
                        stack.push(u);
                    }
                }
            }
            count
        };
        reach(0, false) == n && reach(0, true) == n
    }
}

/// Message emitted when a processor consumes one letter: sparse letter counts.
pub type Emission = Vec<(Letter, u64)>;

/// One vertex's automaton. `emit` stores the aggregated message vector over
/// the total alphabet, computed from the state before the transition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Processor {
    pub vertex: VertexId,
    /// Global ids of this vertex's letters, in local order.
    pub letters: Vec<Letter>,
    pub num_states: usize,
    /// next[state][local letter] -> state
    pub next: Vec<Vec<LocalState>>,
    /// emit[state][local letter] -> sparse counts over the total alphabet
    pub emit: Vec<Vec<Emission>>,
}

/// A finite abelian network: digraph plus one processor per vertex over a
/// disjoint total alphabet.
///
/// Networks are treated as immutable once built; derived invariants are
/// memoized in `cache`, so mutating `processors` in place afterwards gives
/// stale analysis results (rebuild through `Network::new` instead).
#[derive(Clone, Debug)]
pub struct Network {
    pub digraph: Digraph,
    pub processors: Vec<Processor>,
    /// letter -> (owner vertex, local index)
    letter_owner: Vec<(VertexId, usize)>,
    letter_names: Vec<String>,
    pub(crate) cache: crate::cache::AnalysisCache,
}

impl Network {
    pub fn new(
        digraph: Digraph,
        processors: Vec<Processor>,
        letter_names: Vec<String>,
    ) -> Result<Self, NetError> {
        if processors.len() != digraph.num_vertices() {
            return Err(NetError::InvalidSpec(format!(
                "expected {} processors, got {}",
                digraph.num_vertices(),
                processors.len()
            )));
        }
        let total: usize = processors.iter().map(|p| p.letters.len()).sum();
        let mut letter_owner = vec![None; total];
        for (v, p) in processors.iter().enumerate() {
            if p.vertex != v {
                return Err(NetError::InvalidSpec(format!(
                    "processor at position {} claims vertex {}",
                    v, p.vertex
                )));
            }
            if p.num_states == 0 {
                return Err(NetError::InvalidSpec(format!("vertex {} has an empty state set", v)));
            }
            if p.next.len() != p.num_states || p.emit.len() != p.num_states {
                return Err(NetError::InvalidSpec(format!("vertex {} tables have wrong height", v)));
            }
            for q in 0..p.num_states {
                if p.next[q].len() != p.letters.len() || p.emit[q].len() != p.letters.len() {
                    return Err(NetError::InvalidSpec(format!("vertex {} tables have wrong width", v)));
                }
                for &s in &p.next[q] {
                    if s >= p.num_states {
                        return Err(NetError::InvalidSpec(format!(
                            "vertex {} transition target {} out of range",
                            v, s
                        )));
                    }
                }
                for em in &p.emit[q] {
                    for &(l, _) in em {
                        if l >= total {
                            return Err(NetError::InvalidSpec(format!(
                                "vertex {} emits unknown letter {}",
                                v, l
                            )));
                        }
                    }
                }
            }
            for (local, &l) in p.letters.iter().enumerate() {
                if l >= total {
                    return Err(NetError::InvalidSpec(format!("letter id {} out of range", l)));
                }
                if letter_owner[l].is_some() {
                    return Err(NetError::InvalidSpec(format!("letter id {} claimed twice", l)));
                }
                letter_owner[l] = Some((v, local));
            }
        }
        if letter_owner.iter().any(|o| o.is_none()) {
            return Err(NetError::InvalidSpec("letter ids are not contiguous".into()));
        }
        if letter_names.len() != total {
            return Err(NetError::InvalidSpec("letter name list has wrong length".into()));
        }
        Ok(Network {
            digraph,
            processors,
            letter_owner: letter_owner.into_iter().map(|o| o.unwrap()).collect(),
            letter_names,
            cache: crate::cache::AnalysisCache::new(),
        })
    }

    pub fn num_letters(&self) -> usize {
        self.letter_owner.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.digraph.num_vertices()
    }

    pub fn letter_owner(&self, a: Letter) -> VertexId {
        self.letter_owner[a].0
    }

    pub fn letter_local_index(&self, a: Letter) -> usize {
        self.letter_owner[a].1
    }

    pub fn letter_name(&self, a: Letter) -> &str {
        &self.letter_names[a]
    }

    pub fn letter_by_name(&self, name: &str) -> Option<Letter> {
        self.letter_names.iter().position(|n| n == name)
    }

    pub fn total_states(&self) -> u64 {
        self.processors.iter().map(|p| p.num_states as u64).product()
    }

    /// Iterate over the full total state space (product of local state sets).
    pub fn all_states(&self) -> Vec<TotalState> {
        let mut states = vec![vec![]];
        for p in &self.processors {
            let mut next = Vec::with_capacity(states.len() * p.num_states);
            for s in &states {
                for q in 0..p.num_states {
                    let mut s2 = s.clone();
                    s2.push(q);
                    next.push(s2);
                }
            }
            states = next;
        }
        states
    }

    fn check_letter(&self, a: Letter) -> Result<(), NetError> {
        if a < self.num_letters() {
            Ok(())
        } else {
            Err(NetError::UnknownLetter(a))
        }
    }
}

pub type TotalState = Vec<LocalState>;

/// A configuration x.q: waiting letter counts (may be negative) plus one
/// local state per vertex.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Configuration {
    pub x: Vec<i64>,
    pub q: TotalState,
}

impl Configuration {
    pub fn new(net: &Network, x: Vec<i64>, q: TotalState) -> Result<Self, NetError> {
        if x.len() != net.num_letters() {
            return Err(NetError::InvalidSpec(format!(
                "letter-count vector has length {}, expected {}",
                x.len(),
                net.num_letters()
            )));
        }
        if q.len() != net.num_vertices() {
            return Err(NetError::InvalidSpec(format!(
                "state vector has length {}, expected {}",
                q.len(),
                net.num_vertices()
            )));
        }
        for (v, (&s, p)) in q.iter().zip(&net.processors).enumerate() {
            if s >= p.num_states {
                return Err(NetError::InvalidSpec(format!("state {} out of range at vertex {}", s, v)));
            }
        }
        Ok(Configuration { x, q })
    }

    pub fn is_stable(&self) -> bool {
        self.x.iter().all(|&c| c <= 0)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs: Vec<String> = self.x.iter().map(|c| c.to_string()).collect();
        let qs: Vec<String> = self.q.iter().map(|s| s.to_string()).collect();
        write!(f, "({}).({})", xs.join(","), qs.join(","))
    }
}

/// Multiset of letters prescribing an execution, as counts in N^A.
pub type FiringVector = Vec<u64>;
/// A finite sequence of letters.
pub type Word = Vec<Letter>;

pub fn word_count_vector(num_letters: usize, w: &[Letter]) -> FiringVector {
    let mut n = vec![0u64; num_letters];
    for &a in w {
        n[a] += 1;
    }
    n
}

/// Process one letter: x' = x + N_a(q) - e_a, q' = t_a q. Legality is not
/// required (x(a) may be <= 0).
pub fn step(net: &Network, cfg: &Configuration, a: Letter) -> Result<Configuration, NetError> {
    net.check_letter(a)?;
    let (v, local) = net.letter_owner[a];
    let p = &net.processors[v];
    let state = cfg.q[v];
    let mut out = cfg.clone();
    for &(b, c) in &p.emit[state][local] {
        out.x[b] += c as i64;
    }
    out.x[a] -= 1;
    out.q[v] = p.next[state][local];
    Ok(out)
}

/// Run a word; returns the final configuration and whether every prefix was
/// legal (x had a positive count for each processed letter).
pub fn execute_word(net: &Network, cfg: &Configuration, w: &[Letter]) -> Result<(Configuration, bool), NetError> {
    let mut cur = cfg.clone();
    let mut legal = true;
    for &a in w {
        net.check_letter(a)?;
        if cur.x[a] < 1 {
            legal = false;
        }
        cur = step(net, &cur, a)?;
    }
    Ok((cur, legal))
}

/// Accumulated emissions N_w(q) of running `w` from state `q` (input counts
/// play no role).
pub fn emissions(net: &Network, q: &TotalState, w: &[Letter]) -> Result<Vec<u64>, NetError> {
    let mut totals = vec![0u64; net.num_letters()];
    let mut state = q.clone();
    for &a in w {
        net.check_letter(a)?;
        let (v, local) = net.letter_owner[a];
        let p = &net.processors[v];
        for &(b, c) in &p.emit[state[v]][local] {
            totals[b] += c;
        }
        state[v] = p.next[state[v]][local];
    }
    Ok(totals)
}

/// The word "letters in ascending canonical index, each repeated n(a) times".
pub fn canonical_word(n: &[u64]) -> Word {
    let mut w = Vec::new();
    for (a, &c) in n.iter().enumerate() {
        for _ in 0..c {
            w.push(a);
        }
    }
    w
}

/// Apply pi_n in canonical letter order; by the abelian property the result
/// is order-independent.
pub fn execute_vector(net: &Network, cfg: &Configuration, n: &[u64]) -> Result<Configuration, NetError> {
    if n.len() != net.num_letters() {
        return Err(NetError::InvalidSpec("firing vector has wrong length".into()));
    }
    Ok(execute_word(net, cfg, &canonical_word(n))?.0)
}

/// Delete the first n(a) occurrences of each letter a from w (all of them if
/// fewer than n(a) appear).
pub fn remove(w: &[Letter], n: &[u64]) -> Word {
    let mut left: Vec<u64> = n.to_vec();
    let mut out = Vec::with_capacity(w.len());
    for &a in w {
        let budget = left.get_mut(a).expect("letter outside removal vector");
        if *budget > 0 {
            *budget -= 1;
        } else {
            out.push(a);
        }
    }
    out
}

pub fn is_legal(net: &Network, cfg: &Configuration, w: &[Letter]) -> Result<bool, NetError> {
    Ok(execute_word(net, cfg, w)?.1)
}

/// Pluggable letter-choice policy for `stabilize`.
pub trait Policy {
    fn choose(&mut self, net: &Network, cfg: &Configuration) -> Option<Letter>;
}

/// Lowest canonical index among letters with x(a) >= 1.
pub struct LowestIndexPolicy;

impl Policy for LowestIndexPolicy {
    fn choose(&mut self, _net: &Network, cfg: &Configuration) -> Option<Letter> {
        cfg.x.iter().position(|&c| c >= 1)
    }
}

/// Highest canonical index among letters with x(a) >= 1; used to confirm that
/// stabilization does not depend on the greedy policy.
pub struct HighestIndexPolicy;

impl Policy for HighestIndexPolicy {
    fn choose(&mut self, _net: &Network, cfg: &Configuration) -> Option<Letter> {
        cfg.x.iter().rposition(|&c| c >= 1)
    }
}

#[derive(Clone, Debug)]
pub enum Stabilization {
    /// Unique by confluence.
    Stable { cfg: Configuration, word: Word },
    /// The step cap ran out; carries the trace so far.
    NonHalting { cfg: Configuration, trace: Word },
}

impl Stabilization {
    pub fn stable(&self) -> Option<&Configuration> {
        match self {
            Stabilization::Stable { cfg, .. } => Some(cfg),
            Stabilization::NonHalting { .. } => None,
        }
    }
}

pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

/// Greedily run legal steps until stable or the cap is exhausted.
pub fn stabilize(net: &Network, cfg: &Configuration, step_cap: u64) -> Stabilization {
    stabilize_with(net, cfg, step_cap, &mut LowestIndexPolicy)
}

pub fn stabilize_with(
    net: &Network,
    cfg: &Configuration,
    step_cap: u64,
    policy: &mut dyn Policy,
) -> Stabilization {
    assert!(step_cap > 0, "step_cap must be positive");
    let mut cur = cfg.clone();
    let mut trace = Vec::new();
    for _ in 0..step_cap {
        match policy.choose(net, &cur) {
            None => return Stabilization::Stable { cfg: cur, word: trace },
            Some(a) => {
                debug_assert!(cur.x[a] >= 1);
                cur = step(net, &cur, a).expect("policy returned an unknown letter");
                trace.push(a);
            }
        }
    }
    if cur.is_stable() {
        Stabilization::Stable { cfg: cur, word: trace }
    } else {
        Stabilization::NonHalting { cfg: cur, trace }
    }
}

/// Exchange lemma join: for legal w1, w2 returns w = w2 \ |w1| such that
/// w1 w is legal and |w1 w| = max(|w1|, |w2|) coordinatewise.
pub fn exchange_join(
    net: &Network,
    cfg: &Configuration,
    w1: &[Letter],
    w2: &[Letter],
) -> Result<Word, NetError> {
    if !is_legal(net, cfg, w1)? {
        return Err(NetError::IllegalInput("first word is not legal for the configuration".into()));
    }
    if !is_legal(net, cfg, w2)? {
        return Err(NetError::IllegalInput("second word is not legal for the configuration".into()));
    }
    Ok(remove(w2, &word_count_vector(net.num_letters(), w1)))
}
