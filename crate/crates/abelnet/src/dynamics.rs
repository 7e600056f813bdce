//! Update rules, activity vectors, component equivalence at desk scale, and
//! the quantitative execution-balance machinery.

use crate::algebra::{
    classify, exchange_rate, is_locally_recurrent, letter_order, period_vector,
    production_matrix, Criticality,
};
use crate::core::{
    canonical_word, emissions, execute_word, step, Configuration, Letter, Network, VertexId, Word,
};
use crate::error::NetError;
use crate::mat::{Int, QMat, Rat};
use crate::recurrence::{default_capacity_box, level};
use num_traits::{One, Zero};
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

/// An update rule assigns to each configuration a legal word to process.
pub trait UpdateRule {
    fn update_word(&self, net: &Network, cfg: &Configuration) -> Result<Word, NetError>;
    fn name(&self) -> &str;
}

fn require_unary(net: &Network) -> Result<(), NetError> {
    if net.processors.iter().all(|p| p.letters.len() == 1) {
        Ok(())
    } else {
        Err(NetError::RuleNotApplicable("rule is defined for unary networks".into()))
    }
}

/// Full-round threshold of a unary vertex: the order of its transition on
/// the locally recurrent states (the outdegree, for sandpile networks).
fn round_threshold(net: &Network, v: VertexId) -> u64 {
    letter_order(net, net.processors[v].letters[0]) as u64
}

fn clamped(x: i64, cap: u64) -> u64 {
    x.max(0).min(cap as i64) as u64
}

/// Fire every letter min(x(v), threshold) times, all at once.
pub struct ParallelUpdate;

impl UpdateRule for ParallelUpdate {
    fn update_word(&self, net: &Network, cfg: &Configuration) -> Result<Word, NetError> {
        require_unary(net)?;
        let counts: Vec<u64> = (0..net.num_vertices())
            .map(|v| clamped(cfg.x[net.processors[v].letters[0]], round_threshold(net, v)))
            .collect();
        Ok(canonical_word(&counts))
    }

    fn name(&self) -> &str {
        "parallel"
    }
}

/// Check vertices in a fixed order, firing min(current x, threshold) when
/// each is reached.
pub struct SequentialUpdate {
    pub order: Vec<VertexId>,
}

impl SequentialUpdate {
    pub fn vertex_order(net: &Network) -> Self {
        SequentialUpdate { order: (0..net.num_vertices()).collect() }
    }
}

impl UpdateRule for SequentialUpdate {
    fn update_word(&self, net: &Network, cfg: &Configuration) -> Result<Word, NetError> {
        require_unary(net)?;
        if self.order.len() != net.num_vertices() {
            return Err(NetError::RuleNotApplicable("sequential order must list every vertex".into()));
        }
        let mut cur = cfg.clone();
        let mut word = Vec::new();
        for &v in &self.order {
            let a = net.processors[v].letters[0];
            let k = clamped(cur.x[a], round_threshold(net, v));
            for _ in 0..k {
                cur = step(net, &cur, a)?;
                word.push(a);
            }
        }
        Ok(word)
    }

    fn name(&self) -> &str {
        "sequential"
    }
}

/// Vertices in `savings` act as reserve accounts: apply the parallel update
/// on the other vertices whenever one of them has letters waiting, otherwise
/// on the reserve set.
pub struct SavingsUpdate {
    pub savings: BTreeSet<VertexId>,
}

impl UpdateRule for SavingsUpdate {
    fn update_word(&self, net: &Network, cfg: &Configuration) -> Result<Word, NetError> {
        require_unary(net)?;
        if self.savings.is_empty() {
            return Err(NetError::RuleNotApplicable("savings set must be nonempty".into()));
        }
        let waiting = |v: &VertexId| cfg.x[net.processors[*v].letters[0]] >= 1;
        let spend: Vec<VertexId> =
            (0..net.num_vertices()).filter(|v| !self.savings.contains(v)).collect();
        let active: Vec<VertexId> = if spend.iter().any(waiting) {
            spend
        } else {
            self.savings.iter().copied().collect()
        };
        let mut counts = vec![0u64; net.num_letters()];
        for v in active {
            let a = net.processors[v].letters[0];
            counts[a] = clamped(cfg.x[a], round_threshold(net, v));
        }
        Ok(canonical_word(&counts))
    }

    fn name(&self) -> &str {
        "savings"
    }
}

/// Long-run average number of firings per letter per update step, from the
/// exactly detected period of the update orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActivityVector {
    pub rates: Vec<Rat>,
}

pub const DEFAULT_ORBIT_CAP: u64 = 100_000;

/// Iterate the update function until a configuration repeats and average the
/// update words over the detected period.
pub fn activity_vector(
    net: &Network,
    cfg: &Configuration,
    rule: &dyn UpdateRule,
    orbit_cap: u64,
) -> Result<ActivityVector, NetError> {
    let class = classify(net)?;
    if !class.strongly_connected {
        return Err(NetError::NotStronglyConnected);
    }
    if class.overall != Criticality::Critical {
        return Err(NetError::NotCritical);
    }
    let mut seen: HashMap<Configuration, usize> = HashMap::new();
    let mut counts: Vec<Vec<u64>> = Vec::new();
    let mut cur = cfg.clone();
    for i in 0..orbit_cap as usize {
        if let Some(&start) = seen.get(&cur) {
            let period = i - start;
            let mut totals = vec![Rat::zero(); net.num_letters()];
            for step_counts in &counts[start..i] {
                for (t, &c) in totals.iter_mut().zip(step_counts) {
                    *t += Rat::from_integer(Int::from(c));
                }
            }
            let p = Rat::from_integer(Int::from(period as u64));
            return Ok(ActivityVector { rates: totals.into_iter().map(|t| t / &p).collect() });
        }
        seen.insert(cur.clone(), i);
        let u = rule.update_word(net, &cur)?;
        let (next, legal) = execute_word(net, &cur, &u)?;
        if !legal {
            return Err(NetError::IllegalInput(format!(
                "rule {} produced an illegal update word",
                rule.name()
            )));
        }
        counts.push(crate::core::word_count_vector(net.num_letters(), &u));
        cur = next;
    }
    Err(NetError::OrbitCapExceeded(orbit_cap))
}

/// Falsification search for the two update-rule hypotheses: (H1) nonempty
/// update word on any nonzero nonnegative input, (H2) |u| <= |a| + |u'| one
/// step later.
#[derive(Clone, Debug, Default)]
pub struct HypothesisReport {
    pub h1_violations: Vec<Configuration>,
    pub h2_violations: Vec<(Configuration, Letter)>,
}

impl HypothesisReport {
    pub fn is_ok(&self) -> bool {
        self.h1_violations.is_empty() && self.h2_violations.is_empty()
    }
}

pub fn check_h1_h2(
    net: &Network,
    rule: &dyn UpdateRule,
    max_count: i64,
    sample_budget: usize,
) -> Result<HypothesisReport, NetError> {
    let mut report = HypothesisReport::default();
    let na = net.num_letters();
    let mut budget = sample_budget;
    let mut states = net.all_states();
    states.truncate(4096);
    'outer: for q in &states {
        let mut x = vec![0i64; na];
        loop {
            if budget == 0 {
                break 'outer;
            }
            budget -= 1;
            let cfg = Configuration::new(net, x.clone(), q.clone())?;
            check_one(net, rule, &cfg, &mut report)?;
            // odometer over [0, max_count]^A
            let mut i = 0;
            while i < na {
                if x[i] < max_count {
                    x[i] += 1;
                    break;
                }
                x[i] = 0;
                i += 1;
            }
            if i == na {
                break;
            }
        }
    }
    // a sprinkle of larger inputs (deterministic xorshift)
    let mut rng = 0x2545f4914f6cdd1du64;
    for _ in 0..sample_budget.min(200) {
        let q = &states[(rng % states.len() as u64) as usize];
        let x: Vec<i64> = (0..na)
            .map(|_| {
                rng ^= rng << 13;
                rng ^= rng >> 7;
                rng ^= rng << 17;
                (rng % (3 * max_count as u64 + 1)) as i64
            })
            .collect();
        let cfg = Configuration::new(net, x, q.clone())?;
        check_one(net, rule, &cfg, &mut report)?;
    }
    Ok(report)
}

fn check_one(
    net: &Network,
    rule: &dyn UpdateRule,
    cfg: &Configuration,
    report: &mut HypothesisReport,
) -> Result<(), NetError> {
    let u = rule.update_word(net, cfg)?;
    let nonneg = cfg.x.iter().all(|&c| c >= 0);
    let nonzero = cfg.x.iter().any(|&c| c != 0);
    if nonneg && nonzero && u.is_empty() {
        report.h1_violations.push(cfg.clone());
    }
    let u_counts = crate::core::word_count_vector(net.num_letters(), &u);
    for a in 0..net.num_letters() {
        if cfg.x[a] < 1 {
            continue;
        }
        let stepped = step(net, cfg, a)?;
        let u2 = rule.update_word(net, &stepped)?;
        let mut bound = crate::core::word_count_vector(net.num_letters(), &u2);
        bound[a] += 1;
        if u_counts.iter().zip(&bound).any(|(c, b)| c > b) {
            report.h2_violations.push((cfg.clone(), a));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SameComponent {
    Yes,
    No,
    Inconclusive,
}

/// Decide the legal relation at desk scale: grow the forward legal closures
/// of both configurations until they intersect, both close, or the budget
/// runs out. A conserved level difference settles the answer immediately.
pub fn same_component(
    net: &Network,
    a: &Configuration,
    b: &Configuration,
    budget: usize,
) -> Result<SameComponent, NetError> {
    if a == b {
        return Ok(SameComponent::Yes);
    }
    if let Ok(class) = classify(net) {
        if class.strongly_connected
            && class.overall == Criticality::Critical
            && is_locally_recurrent(net, &a.q)
            && is_locally_recurrent(net, &b.q)
        {
            let bx = default_capacity_box(net);
            if let (Ok(la), Ok(lb)) = (level(net, a, bx), level(net, b, bx)) {
                if la != lb {
                    return Ok(SameComponent::No);
                }
            }
        }
    }

    let mut seen_a: HashSet<Configuration> = HashSet::new();
    let mut seen_b: HashSet<Configuration> = HashSet::new();
    let mut queue_a: VecDeque<Configuration> = VecDeque::new();
    let mut queue_b: VecDeque<Configuration> = VecDeque::new();
    seen_a.insert(a.clone());
    queue_a.push_back(a.clone());
    seen_b.insert(b.clone());
    queue_b.push_back(b.clone());
    let mut spent = 0usize;
    while !(queue_a.is_empty() && queue_b.is_empty()) {
        if spent >= budget {
            return Ok(SameComponent::Inconclusive);
        }
        spent += 1;
        let (queue, seen, other) =
            if !queue_a.is_empty() && (queue_a.len() <= queue_b.len() || queue_b.is_empty()) {
                (&mut queue_a, &mut seen_a, &seen_b)
            } else {
                (&mut queue_b, &mut seen_b, &seen_a)
            };
        let Some(cur) = queue.pop_front() else { continue };
        for l in 0..net.num_letters() {
            if cur.x[l] < 1 {
                continue;
            }
            let next = step(net, &cur, l)?;
            if other.contains(&next) {
                return Ok(SameComponent::Yes);
            }
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(SameComponent::No)
}

/// Markov transition matrix p(a, b) = s(b) P(b, a) / s(a) on letters.
fn letter_markov(net: &Network) -> Result<QMat, NetError> {
    let p = production_matrix(net)?;
    let s = exchange_rate(net)?;
    let n = p.rows();
    let mut m = QMat::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let val =
                Rat::from_integer(s[b].clone()) * p.get(b, a) / Rat::from_integer(s[a].clone());
            m.set(a, b, val);
        }
    }
    Ok(m)
}

/// Voltage vector v_{a,z}: scaled Green function of the letter Markov chain
/// absorbed at z; v_{a,a} is the zero vector.
pub fn voltage_vector(net: &Network, a: Letter, z: Letter) -> Result<Vec<Rat>, NetError> {
    let class = classify(net)?;
    if !class.strongly_connected {
        return Err(NetError::NotStronglyConnected);
    }
    if class.overall != Criticality::Critical {
        return Err(NetError::NotCritical);
    }
    let n = net.num_letters();
    if a >= n {
        return Err(NetError::UnknownLetter(a));
    }
    if z >= n {
        return Err(NetError::UnknownLetter(z));
    }
    if a == z {
        return Ok(vec![Rat::zero(); n]);
    }
    Ok(net.cache.memo_map(
        |c| &mut c.voltage,
        (a, z),
        || {
            let p = letter_markov(net).expect("checked above");
            let keep: Vec<usize> = (0..n).filter(|&i| i != z).collect();
            let sub = p.submatrix(&keep, &keep);
            let m = QMat::identity(n - 1).sub(&sub);
            // column a of the Green function: (I - p~) g = e_a
            let a_pos = keep.iter().position(|&i| i == a).unwrap();
            let mut rhs = vec![Rat::zero(); n - 1];
            rhs[a_pos] = Rat::one();
            let g = m
                .solve(&rhs)
                .expect("absorbed chain of a strongly connected critical network is substochastic");
            let s = exchange_rate(net).expect("checked above");
            let mut v = vec![Rat::zero(); n];
            for (pos, &b) in keep.iter().enumerate() {
                v[b] = Rat::from_integer(s[b].clone()) * &g[pos] / Rat::from_integer(s[a].clone());
            }
            v
        },
    ))
}

/// Connecting exponent vector: n with t_n q = q', found per vertex by
/// breadth-first search over the local orbit.
fn connecting_vector(net: &Network, q: &[usize], q2: &[usize]) -> Result<Vec<u64>, NetError> {
    let mut n = vec![0u64; net.num_letters()];
    for (v, p) in net.processors.iter().enumerate() {
        if q[v] == q2[v] {
            continue;
        }
        let mut seen: HashMap<usize, Vec<u64>> = HashMap::new();
        let mut queue = VecDeque::new();
        seen.insert(q[v], vec![0; p.letters.len()]);
        queue.push_back(q[v]);
        while let Some(state) = queue.pop_front() {
            if state == q2[v] {
                break;
            }
            let counts = seen[&state].clone();
            for local in 0..p.letters.len() {
                let next = p.next[state][local];
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(next) {
                    let mut c = counts.clone();
                    c[local] += 1;
                    e.insert(c);
                    queue.push_back(next);
                }
            }
        }
        let counts = seen.get(&q2[v]).ok_or_else(|| {
            NetError::PreconditionViolated(format!("states at vertex {} are not connected", v))
        })?;
        for (local, &a) in p.letters.iter().enumerate() {
            n[a] = counts[local];
        }
    }
    Ok(n)
}

/// diff_{a,z}(q, q') = v_{a,z}^T (P n - N_n(q)) for any n with t_n q = q'.
pub fn state_difference(
    net: &Network,
    v_az: &[Rat],
    q: &[usize],
    q2: &[usize],
) -> Result<Rat, NetError> {
    let n = connecting_vector(net, q, q2)?;
    let p = production_matrix(net)?;
    let nq: Vec<Rat> = n.iter().map(|&c| Rat::from_integer(Int::from(c))).collect();
    let pn = p.mul_vec(&nq);
    let emitted = emissions(net, &q.to_vec(), &canonical_word(&n))?;
    let mut diff = Rat::zero();
    for b in 0..net.num_letters() {
        diff += &v_az[b] * (&pn[b] - Rat::from_integer(Int::from(emitted[b])));
    }
    Ok(diff)
}

/// Per-letter balance data for one legal execution.
#[derive(Clone, Debug)]
pub struct BalanceReport {
    /// c(a) = max_z (v_{a,z}^T (x - x') + diff_{a,z}(q', q))
    pub c: Vec<Rat>,
    /// |w|(a) - (len / ||r||) r(a)
    pub deviation: Vec<Rat>,
    /// distance of each deviation from the nearer bound (positive iff ok)
    pub slack: Vec<Rat>,
    pub within_bounds: bool,
    /// the per-(a,z) exchange identity held exactly
    pub resistance_identity: bool,
}

/// Check the two-sided balance bound on |w|(a) - (len/||r||) r(a) for a legal
/// execution between locally recurrent states, and the underlying exact
/// exchange identity.
pub fn balance_check(
    net: &Network,
    cfg_start: &Configuration,
    cfg_end: &Configuration,
    w: &[Letter],
) -> Result<BalanceReport, NetError> {
    if !is_locally_recurrent(net, &cfg_start.q) || !is_locally_recurrent(net, &cfg_end.q) {
        return Err(NetError::PreconditionViolated("states must be locally recurrent".into()));
    }
    let (reached, legal) = execute_word(net, cfg_start, w)?;
    if !legal || &reached != cfg_end {
        return Err(NetError::PreconditionViolated(
            "word must be a legal execution from start to end".into(),
        ));
    }
    let n = net.num_letters();
    let r = period_vector(net)?;
    let rq: Vec<Rat> = r.iter().map(|c| Rat::from_integer(c.clone())).collect();
    let r_sum: Rat = rq.iter().sum();
    let counts = crate::core::word_count_vector(n, w);
    let len = Rat::from_integer(Int::from(w.len() as u64));

    let dx: Vec<Rat> = cfg_start
        .x
        .iter()
        .zip(&cfg_end.x)
        .map(|(&x0, &x1)| Rat::from_integer(Int::from(x0 - x1)))
        .collect();

    let mut c = vec![Rat::zero(); n];
    let mut resistance_identity = true;
    for a in 0..n {
        let mut best: Option<Rat> = None;
        for z in 0..n {
            let v = voltage_vector(net, a, z)?;
            let mut term: Rat = (0..n).map(|b| &v[b] * &dx[b]).sum();
            term += state_difference(net, &v, &cfg_end.q, &cfg_start.q)?;
            // exact identity: |w|(a) = term + (r(a)/r(z)) |w|(z)
            let lhs = Rat::from_integer(Int::from(counts[a]));
            let rhs = &term + &rq[a] / &rq[z] * Rat::from_integer(Int::from(counts[z]));
            if lhs != rhs {
                resistance_identity = false;
            }
            best = Some(match best {
                None => term,
                Some(b) if term > b => term,
                Some(b) => b,
            });
        }
        c[a] = best.unwrap();
    }
    let c_sum: Rat = c.iter().sum();

    let mut deviation = Vec::with_capacity(n);
    let mut slack = Vec::with_capacity(n);
    let mut within = true;
    for a in 0..n {
        let dev = Rat::from_integer(Int::from(counts[a])) - &len / &r_sum * &rq[a];
        let upper = &rq[a] + &c[a];
        let lower = -(&c_sum / &r_sum * &rq[a]) - &rq[a];
        if !(dev < upper && dev > lower) {
            within = false;
        }
        let s = std::cmp::min(&upper - &dev, &dev - &lower);
        slack.push(s);
        deviation.push(dev);
    }
    Ok(BalanceReport { c, deviation, slack, within_bounds: within, resistance_identity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::mat::rat;
    use crate::testnets::{rotor_cn, sandpile_c3};

    fn cfg(net: &Network, x: Vec<i64>, q: Vec<usize>) -> Configuration {
        Configuration::new(net, x, q).unwrap()
    }

    #[test]
    fn parallel_update_word_on_stable_configuration_is_empty() {
        let net = sandpile_c3();
        let c = cfg(&net, vec![0, 0, -2], vec![1, 0, 1]);
        assert!(ParallelUpdate.update_word(&net, &c).unwrap().is_empty());
    }

    #[test]
    fn parallel_update_fires_each_letter_up_to_the_threshold() {
        let net = sandpile_c3();
        let c = cfg(&net, vec![3, 1, 0], vec![0, 0, 0]);
        let u = ParallelUpdate.update_word(&net, &c).unwrap();
        assert_eq!(crate::core::word_count_vector(3, &u), vec![2, 1, 0]);
    }

    #[test]
    fn parallel_activity_on_the_figure_configuration() {
        let net = sandpile_c3();
        let c = cfg(&net, vec![2, 1, 1], vec![0, 0, 0]);
        let act = activity_vector(&net, &c, &ParallelUpdate, 10_000).unwrap();
        assert_eq!(act.rates, vec![rat(1, 1), rat(1, 1), rat(1, 1)]);
    }

    #[test]
    fn parallel_orbit_is_two_periodic_firing_every_letter_twice() {
        let net = sandpile_c3();
        let mut cur = cfg(&net, vec![2, 1, 1], vec![0, 0, 0]);
        let mut orbit = vec![cur.clone()];
        let mut fired = Vec::new();
        for _ in 0..8 {
            let u = ParallelUpdate.update_word(&net, &cur).unwrap();
            fired.push(crate::core::word_count_vector(3, &u));
            cur = execute_word(&net, &cur, &u).unwrap().0;
            orbit.push(cur.clone());
        }
        // the figure configuration is itself on the 2-cycle
        assert_eq!(orbit[2], orbit[0]);
        let per_period: Vec<u64> = (0..3).map(|a| fired[0][a] + fired[1][a]).collect();
        assert_eq!(per_period, vec![2, 2, 2]);
    }

    #[test]
    fn savings_activity_on_the_figure_configuration() {
        let net = sandpile_c3();
        let c = cfg(&net, vec![2, 1, 1], vec![0, 0, 0]);
        let rule = SavingsUpdate { savings: [0].into_iter().collect() };
        // the first update withholds v0 even though it has letters waiting
        let u = rule.update_word(&net, &c).unwrap();
        assert_eq!(crate::core::word_count_vector(3, &u), vec![0, 1, 1]);
        let act = activity_vector(&net, &c, &rule, 10_000).unwrap();
        assert_eq!(act.rates, vec![rat(2, 3), rat(2, 3), rat(2, 3)]);
    }

    #[test]
    fn stable_configuration_has_zero_activity() {
        let net = sandpile_c3();
        let c = cfg(&net, vec![0, 0, 0], vec![1, 1, 0]);
        let seq = SequentialUpdate::vertex_order(&net);
        for rule in [&ParallelUpdate as &dyn UpdateRule, &seq] {
            let act = activity_vector(&net, &c, rule, 100).unwrap();
            assert!(act.rates.iter().all(|r| r.is_zero()));
        }
    }

    #[test]
    fn parallel_and_sequential_satisfy_h1_h2() {
        let net = sandpile_c3();
        assert!(check_h1_h2(&net, &ParallelUpdate, 3, 2000).unwrap().is_ok());
        assert!(check_h1_h2(&net, &SequentialUpdate::vertex_order(&net), 3, 2000).unwrap().is_ok());
    }

    #[test]
    fn savings_satisfies_h1() {
        let net = sandpile_c3();
        for reserves in [vec![0], vec![0, 1]] {
            let rule = SavingsUpdate { savings: reserves.into_iter().collect() };
            let report = check_h1_h2(&net, &rule, 3, 2000).unwrap();
            assert!(report.h1_violations.is_empty());
        }
    }

    #[test]
    fn savings_with_two_reserves_violates_h2() {
        let net = sandpile_c3();
        let rule = SavingsUpdate { savings: [0, 1].into_iter().collect() };
        let report = check_h1_h2(&net, &rule, 3, 4000).unwrap();
        assert!(report.h1_violations.is_empty());
        assert!(!report.h2_violations.is_empty());
    }

    /// Fires twice every vertex holding at least two letters, falling back
    /// to the parallel rule when no vertex does.
    struct DoubleOrParallel;

    impl UpdateRule for DoubleOrParallel {
        fn update_word(&self, net: &Network, cfg: &Configuration) -> Result<Word, NetError> {
            let mut counts = vec![0u64; net.num_letters()];
            let mut any = false;
            for a in 0..net.num_letters() {
                if cfg.x[a] >= 2 {
                    counts[a] = 2;
                    any = true;
                }
            }
            if any {
                Ok(canonical_word(&counts))
            } else {
                ParallelUpdate.update_word(net, cfg)
            }
        }

        fn name(&self) -> &str {
            "double-or-parallel"
        }
    }

    #[test]
    fn h2_failure_permits_activity_to_differ_within_a_component() {
        let net = sandpile_c3();
        let rule = DoubleOrParallel;
        let report = check_h1_h2(&net, &rule, 3, 4000).unwrap();
        assert!(!report.h2_violations.is_empty());
        let a = cfg(&net, vec![2, 2, 2], vec![0, 0, 0]);
        let b = step(&net, &a, 0).unwrap();
        assert_eq!(same_component(&net, &a, &b, 10_000).unwrap(), SameComponent::Yes);
        let act_a = activity_vector(&net, &a, &rule, 10_000).unwrap();
        let act_b = activity_vector(&net, &b, &rule, 10_000).unwrap();
        assert_ne!(act_a, act_b);
    }

    #[test]
    fn activity_is_invariant_across_components_for_parallel() {
        let net = sandpile_c3();
        // all inputs with at most 4 chips over the zero state
        let mut observed: Vec<(Configuration, ActivityVector)> = Vec::new();
        for x0 in 0..=4i64 {
            for x1 in 0..=4 - x0 {
                for x2 in 0..=4 - x0 - x1 {
                    let c = cfg(&net, vec![x0, x1, x2], vec![0, 0, 0]);
                    let act = activity_vector(&net, &c, &ParallelUpdate, 10_000).unwrap();
                    observed.push((c, act));
                }
            }
        }
        for (c1, a1) in &observed {
            for (c2, a2) in &observed {
                if a1 != a2 {
                    assert_eq!(
                        same_component(&net, c1, c2, 20_000).unwrap(),
                        SameComponent::No,
                        "{} vs {}",
                        c1,
                        c2
                    );
                }
            }
        }
    }

    #[test]
    fn component_equivalence_matches_the_shifted_kernel_lattice() {
        // for recurrent configurations, (x+n).q and (x+n').q share a
        // component exactly when n - n' lies in (I - P)K
        let net = sandpile_c3();
        let base = cfg(&net, vec![2, 1, 0], vec![0, 0, 0]);
        let p = production_matrix(&net).unwrap();
        let k = crate::algebra::total_kernel(&net).unwrap();
        let shifted = p.mul(&k.basis.to_rational());
        let mut lattice = crate::mat::IMat::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let v = Rat::from_integer(k.basis.get(i, j).clone()) - shifted.get(i, j);
                assert!(v.is_integer());
                lattice.set(i, j, v.to_integer());
            }
        }
        // membership in the (rank-deficient) lattice via Smith normal form:
        // d in L Z^3 iff U d lies in S Z^3
        let (u, s, _) = crate::mat::smith_normal_form(&lattice);
        let in_lattice = |d: &[i64]| {
            let ud: Vec<Int> = (0..3)
                .map(|i| (0..3).map(|j| u.get(i, j) * Int::from(d[j])).sum())
                .collect();
            (0..3).all(|i| {
                let div = s.get(i, i);
                if num_traits::Zero::is_zero(div) {
                    num_traits::Zero::is_zero(&ud[i])
                } else {
                    num_traits::Zero::is_zero(&(&ud[i] % div))
                }
            })
        };
        let shifts: Vec<Vec<i64>> = (0..3i64)
            .flat_map(|a| (0..3i64).flat_map(move |b| (0..3i64).map(move |c| vec![a, b, c])))
            .collect();
        for n in &shifts {
            for n2 in &shifts {
                if n.iter().sum::<i64>() != n2.iter().sum::<i64>() {
                    continue; // different levels, trivially different
                }
                let c1 = cfg(&net, vec![2 + n[0], 1 + n[1], n[2]], vec![0, 0, 0]);
                let c2 = cfg(&net, vec![2 + n2[0], 1 + n2[1], n2[2]], vec![0, 0, 0]);
                let diff: Vec<i64> = n.iter().zip(n2).map(|(a, b)| a - b).collect();
                let expected = in_lattice(&diff);
                let got = same_component(&net, &c1, &c2, 50_000).unwrap();
                assert_eq!(
                    got,
                    if expected { SameComponent::Yes } else { SameComponent::No },
                    "n = {:?}, n' = {:?}",
                    n,
                    n2
                );
            }
        }
        let _ = base;
    }

    #[test]
    fn one_step_neighbors_share_a_component() {
        let net = sandpile_c3();
        let a = cfg(&net, vec![2, 1, 0], vec![0, 0, 0]);
        let b = step(&net, &a, 0).unwrap();
        assert_eq!(same_component(&net, &a, &b, 10_000).unwrap(), SameComponent::Yes);
    }

    #[test]
    fn negative_entry_configuration_joins_its_recurrent_neighbor() {
        let net = sandpile_c3();
        let a = cfg(&net, vec![1, 2, -1], vec![0, 1, 0]);
        let b = cfg(&net, vec![2, 1, 0], vec![0, 0, 0]);
        assert_eq!(same_component(&net, &a, &b, 10_000).unwrap(), SameComponent::Yes);
    }

    #[test]
    fn different_chip_counts_live_in_different_components() {
        let net = rotor_cn(3);
        let a = cfg(&net, vec![1, 0, 0], vec![0, 0, 0]);
        let b = cfg(&net, vec![1, 1, 0], vec![0, 0, 0]);
        assert_eq!(same_component(&net, &a, &b, 10_000).unwrap(), SameComponent::No);
    }

    #[test]
    fn voltage_vector_at_equal_letters_is_zero() {
        let net = rotor_cn(3);
        let v = voltage_vector(&net, 1, 1).unwrap();
        assert!(v.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn voltage_vector_satisfies_the_defining_identity() {
        // (I - P^T) v_{a,z} = e_a - (r(a)/r(z)) e_z
        for net in [rotor_cn(3), sandpile_c3(), crate::testnets::row_chip_firing()] {
            let p = production_matrix(&net).unwrap();
            let r = period_vector(&net).unwrap();
            let n = net.num_letters();
            for a in 0..n {
                for z in 0..n {
                    if a == z {
                        continue;
                    }
                    let v = voltage_vector(&net, a, z).unwrap();
                    let pv = p.transpose().mul_vec(&v);
                    for b in 0..n {
                        let lhs = &v[b] - &pv[b];
                        let expected = if b == a {
                            Rat::one()
                        } else if b == z {
                            -Rat::new(r[a].clone(), r[z].clone())
                        } else {
                            Rat::zero()
                        };
                        assert_eq!(lhs, expected, "a={} z={} b={}", a, z, b);
                    }
                }
            }
        }
    }

    /// Effective resistance between vertices at distance d on the cycle C_n
    /// with unit resistors: series-parallel reduction gives d (n - d) / n.
    fn cycle_effective_resistance(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(d * (n - d)), Int::from(n))
    }

    #[test]
    fn sandpile_voltage_recovers_effective_resistance_on_c3() {
        let net = sandpile_c3();
        for a in 0..3usize {
            for z in 0..3usize {
                if a == z {
                    continue;
                }
                let v = voltage_vector(&net, a, z).unwrap();
                let r_eff = &v[a] / rat(2, 1); // deg(a) = 2
                assert_eq!(r_eff, cycle_effective_resistance(3, 1));
            }
        }
    }

    fn random_legal_word(
        net: &Network,
        cfg: &Configuration,
        len: usize,
        seed: &mut u64,
    ) -> (Word, Configuration) {
        let mut cur = cfg.clone();
        let mut w = Vec::new();
        for _ in 0..len {
            let avail: Vec<usize> = (0..net.num_letters()).filter(|&a| cur.x[a] >= 1).collect();
            if avail.is_empty() {
                break;
            }
            *seed ^= *seed << 13;
            *seed ^= *seed >> 7;
            *seed ^= *seed << 17;
            let a = avail[(*seed % avail.len() as u64) as usize];
            cur = step(net, &cur, a).unwrap();
            w.push(a);
        }
        (w, cur)
    }

    #[test]
    fn balance_bound_holds_on_random_rotor_executions() {
        let net = rotor_cn(3);
        let start = cfg(&net, vec![2, 1, 0], vec![0, 0, 0]);
        let mut seed = 0xdeadbeefu64;
        for len in [0usize, 1, 5, 50, 200] {
            let (w, end) = random_legal_word(&net, &start, len, &mut seed);
            let report = balance_check(&net, &start, &end, &w).unwrap();
            assert!(report.within_bounds, "execution of length {} broke the bound", w.len());
            assert!(report.resistance_identity);
            assert!(report.slack.iter().all(|s| s.is_positive()));
        }
    }

    #[test]
    fn balance_check_rejects_illegal_words() {
        let net = rotor_cn(3);
        let start = cfg(&net, vec![1, 0, 0], vec![0, 0, 0]);
        let end = start.clone();
        assert!(matches!(
            balance_check(&net, &start, &end, &[2]),
            Err(NetError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn level_is_conserved_along_update_orbits() {
        let net = sandpile_c3();
        let c0 = cfg(&net, vec![2, 1, 1], vec![0, 0, 0]);
        let expected = level(&net, &c0, 4).unwrap();
        let mut cur = c0;
        for _ in 0..12 {
            let u = ParallelUpdate.update_word(&net, &cur).unwrap();
            cur = execute_word(&net, &cur, &u).unwrap().0;
            assert_eq!(level(&net, &cur, 4).unwrap(), expected);
        }
    }

    #[test]
    fn exchange_identity_for_sandpile_words() {
        let net = sandpile_c3();
        let start = cfg(&net, vec![2, 1, 0], vec![0, 0, 0]);
        let mut seed = 31u64;
        let (w, end) = random_legal_word(&net, &start, 40, &mut seed);
        let report = balance_check(&net, &start, &end, &w).unwrap();
        assert!(report.resistance_identity);
        assert!(report.c.iter().all(|c| !c.is_negative()));
    }
}
