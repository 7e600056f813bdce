//! Recurrence tests (critical burning test, subcritical burning test, cycle
//! test for agent networks) and the capacity / level / stoppable-level
//! machinery.

use crate::algebra::{
    classify, exchange_rate, is_locally_recurrent, loc_permutation, locally_recurrent_states,
    period_vector, production_matrix, total_kernel, Criticality,
};
use crate::core::{
    step, Configuration, FiringVector, Letter, Network, Stabilization, TotalState, Word,
};
use crate::error::NetError;
use crate::mat::{Int, Rat};
use num_traits::ToPrimitive;
use std::collections::{BTreeSet, HashMap};

/// Functional digraph on letters: successor(a) is the letter produced when
/// the network in state t_a^{-1}(q) processes a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotorDigraph {
    pub successor: Vec<Letter>,
}

impl RotorDigraph {
    /// The directed cycles of the functional digraph, each as a letter list.
    pub fn cycles(&self) -> Vec<Vec<Letter>> {
        let n = self.successor.len();
        // 0 = unvisited, 1 = on the current walk, 2 = done
        let mut color = vec![0u8; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if color[start] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut cur = start;
            while color[cur] == 0 {
                color[cur] = 1;
                path.push(cur);
                cur = self.successor[cur];
            }
            if color[cur] == 1 {
                let pos = path.iter().position(|&x| x == cur).unwrap();
                cycles.push(path[pos..].to_vec());
            }
            for &x in &path {
                color[x] = 2;
            }
        }
        cycles
    }
}

/// Outcome of the critical burning test. When `verdict` holds, the witness
/// is an r-maximal legal execution with |witness| = r and t_witness q = q.
#[derive(Clone, Debug)]
pub struct RecurrenceCertificate {
    pub verdict: bool,
    pub witness: Word,
    pub state_returned: bool,
}

fn require_critical_strongly_connected(net: &Network) -> Result<(), NetError> {
    let class = classify(net)?;
    if !class.strongly_connected {
        return Err(NetError::NotStronglyConnected);
    }
    if class.overall != Criticality::Critical {
        return Err(NetError::NotCritical);
    }
    Ok(())
}

fn period_vector_u64(net: &Network) -> Result<FiringVector, NetError> {
    Ok(period_vector(net)?
        .iter()
        .map(|c| c.to_u64().expect("period vector entry exceeds u64"))
        .collect())
}

/// Burning test: build an r-maximal legal execution greedily; recurrent iff
/// |w| = r and the state returns to itself.
pub fn burning_test_critical(net: &Network, cfg: &Configuration) -> Result<RecurrenceCertificate, NetError> {
    burning_test_critical_with(net, cfg, false)
}

/// Same test with the eligible-letter preference flipped; the verdict does
/// not depend on this choice.
pub fn burning_test_critical_with(
    net: &Network,
    cfg: &Configuration,
    prefer_highest: bool,
) -> Result<RecurrenceCertificate, NetError> {
    require_critical_strongly_connected(net)?;
    let r = period_vector_u64(net)?;
    let mut fired = vec![0u64; net.num_letters()];
    let mut cur = cfg.clone();
    let mut witness = Vec::new();
    loop {
        let eligible = |a: &usize| fired[*a] < r[*a] && cur.x[*a] >= 1;
        let pick = if prefer_highest {
            (0..net.num_letters()).rev().find(eligible)
        } else {
            (0..net.num_letters()).find(eligible)
        };
        let Some(a) = pick else { break };
        cur = step(net, &cur, a)?;
        fired[a] += 1;
        witness.push(a);
    }
    let state_returned = cur.q == cfg.q;
    Ok(RecurrenceCertificate { verdict: fired == r && state_returned, witness, state_returned })
}

/// Subcritical burning test: q is recurrent iff (I - P)k . q stabilizes to
/// exactly 0 . q, for any witness k in K with k >= 1 and Pk <= k.
pub fn burning_test_subcritical(net: &Network, q: &TotalState, k: &[Int]) -> Result<bool, NetError> {
    let class = classify(net)?;
    if class.overall != Criticality::Subcritical {
        return Err(NetError::BadWitnessVector("network is not subcritical".into()));
    }
    if k.len() != net.num_letters() {
        return Err(NetError::BadWitnessVector("witness vector has wrong length".into()));
    }
    if k.iter().any(|c| c < &Int::from(1)) {
        return Err(NetError::BadWitnessVector("witness vector must be >= 1".into()));
    }
    let kernel = total_kernel(net)?;
    if !kernel.contains(k) {
        return Err(NetError::BadWitnessVector("witness vector must lie in the total kernel".into()));
    }
    let p = production_matrix(net)?;
    let kq: Vec<Rat> = k.iter().map(|c| Rat::from_integer(c.clone())).collect();
    let pk = p.mul_vec(&kq);
    if pk.iter().zip(&kq).any(|(pkc, kc)| pkc > kc) {
        return Err(NetError::BadWitnessVector("witness vector must satisfy Pk <= k".into()));
    }
    let x0: Vec<i64> = kq
        .iter()
        .zip(&pk)
        .map(|(kc, pkc)| {
            let d = kc - pkc;
            assert!(d.is_integer());
            d.to_integer().to_i64().expect("witness vector too large")
        })
        .collect();
    let cap = bound_for_subcritical(net, &x0).unwrap_or(crate::core::DEFAULT_STEP_CAP);
    let start = Configuration::new(net, x0, q.clone())?;
    match crate::core::stabilize(net, &start, cap) {
        Stabilization::Stable { cfg, .. } => Ok(cfg.x.iter().all(|&c| c == 0) && &cfg.q == q),
        Stabilization::NonHalting { .. } => Ok(false),
    }
}

/// ceil(sum((I - P)^{-1} x0)) + |A| + 1; the least action principle bounds
/// every legal execution by the complete one, and subcritical networks make
/// I - P inverse-nonnegative.
fn bound_for_subcritical(net: &Network, x0: &[i64]) -> Option<u64> {
    let p = production_matrix(net).ok()?;
    let n = p.rows();
    let m = crate::mat::QMat::identity(n).sub(&p);
    let inv = m.inverse()?;
    if !inv.is_nonnegative() {
        return None;
    }
    let xp: Vec<Rat> = x0.iter().map(|&c| Rat::from_integer(Int::from(c.max(0)))).collect();
    let total: Rat = inv.mul_vec(&xp).into_iter().sum();
    Some(total.ceil().to_integer().to_u64()? + n as u64 + 1)
}

/// A valid witness for the subcritical burning test, found automatically:
/// scale (I - P)^{-1} 1 (positive since I - P is inverse-nonnegative) to a
/// primitive integer vector, then to its minimal positive multiple in K.
pub fn subcritical_witness(net: &Network) -> Result<Vec<Int>, NetError> {
    let class = classify(net)?;
    if class.overall != Criticality::Subcritical {
        return Err(NetError::BadWitnessVector("network is not subcritical".into()));
    }
    let p = production_matrix(net)?;
    let n = p.rows();
    let m = crate::mat::QMat::identity(n).sub(&p);
    let inv = m.inverse().expect("I - P is invertible for subcritical networks");
    let ones = vec![Rat::from_integer(Int::from(1)); n];
    let k0 = inv.mul_vec(&ones);
    let k1 = crate::mat::primitive_integer_vector(&k0);
    let kernel = total_kernel(net)?;
    let c = kernel
        .minimal_positive_multiple(&k1)
        .ok_or_else(|| NetError::BadWitnessVector("kernel basis is singular".into()))?;
    Ok(k1.into_iter().map(|x| x * &c).collect())
}

/// Every processed letter produces exactly one letter of output, over all
/// letters and all local states.
pub fn is_agent(net: &Network) -> bool {
    net.processors.iter().all(|p| {
        p.emit
            .iter()
            .all(|row| row.iter().all(|em| em.iter().map(|&(_, c)| c).sum::<u64>() == 1))
    })
}

/// Rotor digraph of a locally recurrent state of an agent network.
pub fn rotor_digraph(net: &Network, q: &TotalState) -> Result<RotorDigraph, NetError> {
    if !is_agent(net) {
        return Err(NetError::NotAgentNetwork);
    }
    if !is_locally_recurrent(net, q) {
        return Err(NetError::NotLocallyRecurrent);
    }
    let loc = locally_recurrent_states(net);
    let mut successor = Vec::with_capacity(net.num_letters());
    for a in 0..net.num_letters() {
        let v = net.letter_owner(a);
        let local = net.letter_local_index(a);
        let lv = &loc[v];
        let perm = loc_permutation(net, a, lv);
        let qi = lv.binary_search(&q[v]).expect("state is locally recurrent");
        // invert t_a on Loc
        let pre = perm.iter().position(|&img| img == qi).expect("permutation");
        let state_before = lv[pre];
        let em = &net.processors[v].emit[state_before][local];
        debug_assert_eq!(em.iter().map(|&(_, c)| c).sum::<u64>(), 1);
        successor.push(em.iter().find(|&&(_, c)| c > 0).unwrap().0);
    }
    Ok(RotorDigraph { successor })
}

/// Cycle test: x.q is recurrent iff x >= 0, q is locally recurrent, and
/// every directed cycle of the rotor digraph meets supp(x).
pub fn cycle_test(net: &Network, cfg: &Configuration) -> Result<bool, NetError> {
    if !is_agent(net) {
        return Err(NetError::NotAgentNetwork);
    }
    if !classify(net)?.strongly_connected {
        return Err(NetError::NotStronglyConnected);
    }
    if cfg.x.iter().any(|&c| c < 0) {
        return Ok(false);
    }
    if !is_locally_recurrent(net, &cfg.q) {
        return Ok(false);
    }
    let rho = rotor_digraph(net, &cfg.q)?;
    Ok(rho.cycles().iter().all(|cycle| cycle.iter().any(|&a| cfg.x[a] != 0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Capacity {
    Bounded(i64),
    Unbounded,
}

const HALTING_BUDGET: u64 = 10_000_000;

/// Exact halting decision by greedy simulation with pumping detection: if
/// the run revisits a state q with letter counts coordinatewise at least an
/// earlier visit, the connecting segment stays legal after the shift and
/// can be repeated forever, which rules out halting by the least action
/// principle. Letter counts are bounded below along legal executions, so by
/// Dickson's lemma one of the two outcomes always occurs; the budget is a
/// safety net only.
fn halts(net: &Network, cfg: &Configuration, budget: u64) -> Result<bool, NetError> {
    let mut seen: HashMap<TotalState, Vec<Vec<i64>>> = HashMap::new();
    let mut cur = cfg.clone();
    for _ in 0..budget {
        if cur.is_stable() {
            return Ok(true);
        }
        let visits = seen.entry(cur.q.clone()).or_default();
        if visits.iter().any(|x0| x0.iter().zip(&cur.x).all(|(a, b)| a <= b)) {
            return Ok(false);
        }
        visits.push(cur.x.clone());
        let a = cur.x.iter().position(|&c| c >= 1).unwrap();
        cur = step(net, &cur, a)?;
    }
    Err(NetError::PreconditionViolated(format!("halting search budget {} exhausted", budget)))
}

/// Capacity of the state q: max s^T z over z in [-box, box]^A with z.q
/// halting. Subcritical networks have unbounded capacity; critical agent
/// networks have capacity 0 at every state (each processed letter emits one,
/// so positive weighted input never halts); everything else goes through the
/// bounded search, which is exact when some maximizer is interior to the
/// box.
pub fn capacity(net: &Network, q: &TotalState, box_bound: u64) -> Result<Capacity, NetError> {
    let class = classify(net)?;
    if !class.strongly_connected {
        return Err(NetError::NotStronglyConnected);
    }
    if class.overall == Criticality::Subcritical {
        return Ok(Capacity::Unbounded);
    }
    if class.overall == Criticality::Critical && is_agent(net) {
        return Ok(Capacity::Bounded(0));
    }
    capacity_by_search(net, q, box_bound)
}

/// The raw bounded search, without the agent shortcut.
pub fn capacity_by_search(net: &Network, q: &TotalState, box_bound: u64) -> Result<Capacity, NetError> {
    let class = classify(net)?;
    if !class.strongly_connected {
        return Err(NetError::NotStronglyConnected);
    }
    if class.overall == Criticality::Subcritical {
        return Ok(Capacity::Unbounded);
    }
    net.cache
        .memo_map(
            |c| &mut c.state_capacity,
            (q.clone(), box_bound),
            || capacity_search(net, q, box_bound),
        )
        .map(Capacity::Bounded)
}

fn capacity_search(net: &Network, q: &TotalState, box_bound: u64) -> Result<i64, NetError> {
    let s = exchange_rate(net)?;
    let s: Vec<i64> = s.iter().map(|c| c.to_i64().expect("exchange rate too large")).collect();
    let n = net.num_letters();
    let b = box_bound as i64;

    let mut best: Option<i64> = None;
    let mut best_interior = false;
    let mut z = vec![-b; n];
    loop {
        let value: i64 = z.iter().zip(&s).map(|(&zi, &si)| zi * si).sum();
        if best.is_none_or(|m| value >= m) {
            let cfg = Configuration::new(net, z.clone(), q.clone())?;
            if halts(net, &cfg, HALTING_BUDGET)? {
                let interior = z.iter().all(|&zi| zi.abs() < b);
                match best {
                    Some(m) if value == m => best_interior = best_interior || interior,
                    _ => {
                        best = Some(value);
                        best_interior = interior;
                    }
                }
            }
        }
        // odometer over the box
        let mut i = 0;
        loop {
            if i == n {
                let value = best.expect("the all -box vector halts");
                if !best_interior && b > 0 {
                    return Err(NetError::BoxTooSmall(format!(
                        "every maximizer of value {} touches the box [-{}, {}]",
                        value, b, b
                    )));
                }
                return Ok(value);
            }
            if z[i] < b {
                z[i] += 1;
                break;
            }
            z[i] = -b;
            i += 1;
        }
    }
}

/// Capacity of the network: the maximum state capacity over the full state
/// space.
pub fn network_capacity(net: &Network, box_bound: u64) -> Result<Capacity, NetError> {
    let class = classify(net)?;
    if !class.strongly_connected {
        return Err(NetError::NotStronglyConnected);
    }
    if class.overall == Criticality::Subcritical {
        return Ok(Capacity::Unbounded);
    }
    net.cache
        .memo_map(
            |c| &mut c.network_capacity,
            box_bound,
            || {
                let mut best: Option<i64> = None;
                for q in net.all_states() {
                    match capacity(net, &q, box_bound)? {
                        Capacity::Unbounded => unreachable!("handled above"),
                        Capacity::Bounded(c) => best = Some(best.map_or(c, |b| b.max(c))),
                    }
                }
                Ok(best.expect("network has at least one state"))
            },
        )
        .map(Capacity::Bounded)
}

/// Suggested search box: ||r||_inf plus the total locker slack of the state
/// spaces, which covers the closed-form capacities of the built-in families.
/// Capped so the box never holds more than about 10^5 probe points.
pub fn default_capacity_box(net: &Network) -> u64 {
    let slack: u64 = net.processors.iter().map(|p| p.num_states as u64 - 1).sum();
    let rmax = period_vector(net)
        .map(|r| r.iter().map(|c| c.to_u64().unwrap_or(1)).max().unwrap_or(1))
        .unwrap_or(1);
    let wanted = rmax + slack.max(1);
    let mut cap = 1;
    while cap < wanted && ((2 * (cap + 1) + 1) as f64).powi(net.num_letters() as i32) <= 1e5 {
        cap += 1;
    }
    wanted.min(cap)
}

/// Level of a configuration of a critical network: cpt(N) - cpt(q) + s^T x.
pub fn level(net: &Network, cfg: &Configuration, box_bound: u64) -> Result<i64, NetError> {
    require_critical_strongly_connected(net)?;
    let s = exchange_rate(net)?;
    let Capacity::Bounded(total) = network_capacity(net, box_bound)? else {
        unreachable!("critical networks have finite capacity")
    };
    let Capacity::Bounded(of_state) = capacity(net, &cfg.q, box_bound)? else { unreachable!() };
    let weighted: i64 = cfg
        .x
        .iter()
        .zip(&s)
        .map(|(&xi, si)| xi * si.to_i64().expect("exchange rate too large"))
        .sum();
    Ok(total - of_state + weighted)
}

/// Stoppable levels: the nonnegative levels attainable with x <= 0 and q
/// locally recurrent, computed exactly as N cap union_q (lvl(q) - S(s)) with
/// S(s) the numerical semigroup generated by the entries of s.
pub fn stoppable_levels(net: &Network, box_bound: u64) -> Result<BTreeSet<u64>, NetError> {
    require_critical_strongly_connected(net)?;
    let s = exchange_rate(net)?;
    let s: Vec<u64> = s.iter().map(|c| c.to_u64().expect("exchange rate too large")).collect();
    let Capacity::Bounded(total) = network_capacity(net, box_bound)? else { unreachable!() };
    let total = total.max(0) as u64;
    let mut semigroup = vec![false; total as usize + 1];
    semigroup[0] = true;
    for &gen in &s {
        for v in gen..=total {
            if semigroup[(v - gen) as usize] {
                semigroup[v as usize] = true;
            }
        }
    }
    let mut state_levels = BTreeSet::new();
    for q in locally_recurrent_total_states(net) {
        let Capacity::Bounded(of_state) = capacity(net, &q, box_bound)? else { unreachable!() };
        state_levels.insert((total as i64 - of_state) as u64);
    }
    let mut stop = BTreeSet::new();
    for lvl in state_levels {
        for sigma in 0..=lvl.min(total) {
            if semigroup[sigma as usize] {
                stop.insert(lvl - sigma);
            }
        }
    }
    Ok(stop)
}

/// All total states with each vertex restricted to the given local choices.
pub fn cartesian(per_vertex: &[Vec<usize>]) -> Vec<TotalState> {
    let mut out = vec![vec![]];
    for choices in per_vertex {
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for partial in &out {
            for &c in choices {
                let mut p = partial.clone();
                p.push(c);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// All locally recurrent total states.
pub fn locally_recurrent_total_states(net: &Network) -> Vec<TotalState> {
    cartesian(&locally_recurrent_states(net))
}
