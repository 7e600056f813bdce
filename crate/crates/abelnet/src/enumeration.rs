//! Counting recurrent configurations and components, the determinantal
//! generating-function identities, and the bidirected-cycle weight classes.

use crate::algebra::{production_matrix, torsion_group, total_kernel};
use crate::core::{Configuration, Digraph, Network, VertexId};
use crate::dynamics::{same_component, SameComponent};
use crate::error::NetError;
use crate::mat::{Int, QMat, Rat};
use crate::recurrence::{
    burning_test_critical, cycle_test, is_agent, locally_recurrent_total_states,
};
use crate::series::{exponents_up_to, poly_det, SeriesTable, TruncPoly};
use crate::zoo::{build, NetworkSpec};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

fn require_agent(net: &Network) -> Result<(), NetError> {
    if !is_agent(net) {
        return Err(NetError::NotAgentNetwork);
    }
    if !crate::algebra::classify(net)?.strongly_connected {
        return Err(NetError::NotStronglyConnected);
    }
    Ok(())
}

/// Number of states q with n.q recurrent, by the cycle test over Loc(N).
pub fn count_recurrent_for_input(net: &Network, n: &[u64]) -> Result<u64, NetError> {
    require_agent(net)?;
    if n.iter().all(|&c| c == 0) {
        return Ok(0);
    }
    let x: Vec<i64> = n.iter().map(|&c| c as i64).collect();
    let mut count = 0;
    for q in locally_recurrent_total_states(net) {
        let cfg = Configuration::new(net, x.clone(), q)?;
        if cycle_test(net, &cfg)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Brute-force side of the determinantal identity: the coefficient of z^n is
/// |Rec(N, n)| for every n of total degree <= maxdeg.
pub fn series_bruteforce(net: &Network, maxdeg: u32) -> Result<SeriesTable, NetError> {
    require_agent(net)?;
    let na = net.num_letters();
    let exps = exponents_up_to(na, maxdeg);
    let counts: Result<Vec<(Vec<u32>, u64)>, NetError> = exps
        .into_par_iter()
        .map(|e| {
            let n: Vec<u64> = e.iter().map(|&c| c as u64).collect();
            Ok((e, count_recurrent_for_input(net, &n)?))
        })
        .collect();
    let mut table = SeriesTable::new(na, maxdeg);
    for (e, c) in counts? {
        table.insert(e, Int::from(c));
    }
    Ok(table)
}

/// Determinant side: |Z^A/K| det(I(z) - P) expanded as a truncated series
/// with exact integer coefficients.
pub fn series_determinant(net: &Network, maxdeg: u32) -> Result<SeriesTable, NetError> {
    require_agent(net)?;
    let p = production_matrix(net)?;
    let kernel_index = total_kernel(net)?.index();
    let na = net.num_letters();
    let mut entries = vec![vec![TruncPoly::zero(na, maxdeg); na]; na];
    for i in 0..na {
        for j in 0..na {
            let mut e = TruncPoly::constant(na, maxdeg, -p.get(i, j).clone());
            if i == j {
                e.add_assign(&TruncPoly::geometric(na, maxdeg, i));
            }
            entries[i][j] = e;
        }
    }
    let det = poly_det(&entries).scale(&Rat::from_integer(kernel_index));
    Ok(SeriesTable::from_poly(&det))
}

/// Report of the master determinantal identity at an integer edge-weight
/// assignment: both sides as series over the vertex variables.
#[derive(Clone, Debug)]
pub struct MasterReport {
    pub determinant_side: SeriesTable,
    pub combinatorial_side: SeriesTable,
    pub agree: bool,
}

/// Evaluate det(D_G(y,z) - A_G(y)) and the recurrent-configuration sum
/// sum z^x prod_v y_{q(v)} for the rotor network on `digraph`, comparing all
/// coefficients up to total degree maxdeg.
pub fn master_identity_check(
    digraph: &Digraph,
    y: &[i64],
    maxdeg: u32,
) -> Result<MasterReport, NetError> {
    if y.len() != digraph.num_edges() {
        return Err(NetError::InvalidSpec("one y value per edge required".into()));
    }
    if !digraph.is_strongly_connected() {
        return Err(NetError::NotStronglyConnected);
    }
    let nv = digraph.num_vertices();
    // determinant side
    let mut entries = vec![vec![TruncPoly::zero(nv, maxdeg); nv]; nv];
    for v in 0..nv {
        let out_weight: i64 = digraph.out_edges(v).iter().map(|e| y[e.id]).sum();
        for u in 0..nv {
            let adj: i64 =
                digraph.out_edges(v).iter().filter(|e| e.target == u).map(|e| y[e.id]).sum();
            let mut e = TruncPoly::constant(nv, maxdeg, Rat::from_integer(Int::from(-adj)));
            if u == v {
                let geo = TruncPoly::geometric(nv, maxdeg, v)
                    .scale(&Rat::from_integer(Int::from(out_weight)));
                e.add_assign(&geo);
            }
            entries[u][v] = e;
        }
    }
    let determinant_side = SeriesTable::from_poly(&poly_det(&entries));

    // combinatorial side: rotor network recurrent configurations
    let net = build(&NetworkSpec::rotor(digraph.clone()))?;
    let mut combinatorial = SeriesTable::new(nv, maxdeg);
    for e in exponents_up_to(nv, maxdeg) {
        let x: Vec<i64> = e.iter().map(|&c| c as i64).collect();
        let mut total = Int::zero();
        for q in net.all_states() {
            let cfg = Configuration::new(&net, x.clone(), q.clone())?;
            if cycle_test(&net, &cfg)? {
                let mut weight = Int::from(1);
                for (v, &state) in q.iter().enumerate() {
                    weight *= Int::from(y[digraph.out_edges(v)[state].id]);
                }
                total += weight;
            }
        }
        combinatorial.insert(e, total);
    }
    let agree = determinant_side == combinatorial;
    Ok(MasterReport { determinant_side, combinatorial_side: combinatorial, agree })
}

/// Number of directed forests of `digraph` rooted at S, weighted by y: the
/// determinant of the weighted Laplacian with the rows and columns of S
/// removed.
pub fn forests_rooted_at(digraph: &Digraph, roots: &[VertexId], y: &[i64]) -> Result<Int, NetError> {
    if y.len() != digraph.num_edges() {
        return Err(NetError::InvalidSpec("one y value per edge required".into()));
    }
    let nv = digraph.num_vertices();
    if roots.iter().any(|&v| v >= nv) {
        return Err(NetError::InvalidSpec("root vertex out of range".into()));
    }
    let keep: Vec<usize> = (0..nv).filter(|v| !roots.contains(v)).collect();
    if keep.is_empty() {
        return Ok(Int::from(1));
    }
    let mut lap = QMat::zeros(nv, nv);
    for v in 0..nv {
        let mut diag = 0i64;
        for e in digraph.out_edges(v) {
            diag += y[e.id];
            let cur = lap.get(e.target, v) - Rat::from_integer(Int::from(y[e.id]));
            lap.set(e.target, v, cur);
        }
        let cur = lap.get(v, v) + Rat::from_integer(Int::from(diag));
        lap.set(v, v, cur);
    }
    let d = lap.submatrix(&keep, &keep).det();
    assert!(d.is_integer());
    Ok(d.to_integer())
}

/// Brute-force oracle for `forests_rooted_at`: enumerate all out-edge
/// choices of the non-root vertices and keep the acyclic ones.
pub fn forests_rooted_at_bruteforce(
    digraph: &Digraph,
    roots: &[VertexId],
    y: &[i64],
) -> Result<Int, NetError> {
    let nv = digraph.num_vertices();
    let free: Vec<usize> = (0..nv).filter(|v| !roots.contains(v)).collect();
    if free.is_empty() {
        return Ok(Int::from(1));
    }
    let mut total = Int::zero();
    let mut choice = vec![0usize; free.len()];
    'outer: loop {
        // every free vertex must reach a root through the chosen edges
        let mut ok = true;
        for &v in &free {
            let mut cur = v;
            let mut steps = 0;
            loop {
                if roots.contains(&cur) {
                    break;
                }
                let pos = free.iter().position(|&w| w == cur).unwrap();
                cur = digraph.out_edges(cur)[choice[pos]].target;
                steps += 1;
                if steps > nv {
                    ok = false;
                    break;
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            let mut weight = Int::from(1);
            for (i, &v) in free.iter().enumerate() {
                weight *= Int::from(y[digraph.out_edges(v)[choice[i]].id]);
            }
            total += weight;
        }
        let mut i = 0;
        loop {
            if i == free.len() {
                break 'outer;
            }
            if choice[i] + 1 < digraph.outdeg(free[i]) {
                choice[i] += 1;
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
    Ok(total)
}

/// Component count of the recurrent configurations at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelClasses {
    pub classes: u64,
    /// |Tor(N)| when the network is an agent network (the predicted count
    /// for every level m >= 1)
    pub torsion_prediction: Option<Int>,
    pub inconclusive: bool,
}

/// Enumerate the recurrent configurations of level m (x is bounded because s
/// is positive), partition them by the legal relation, and count the
/// classes.
pub fn components_per_level(net: &Network, m: u64, budget: usize) -> Result<LevelClasses, NetError> {
    let class = crate::algebra::classify(net)?;
    if !class.strongly_connected || class.overall != crate::algebra::Criticality::Critical {
        return Err(NetError::NotCritical);
    }
    let s = crate::algebra::exchange_rate(net)?;
    let s: Vec<u64> = s.iter().map(|c| c.to_u64().expect("exchange rate too large")).collect();
    let agent = is_agent(net);
    let box_bound = crate::recurrence::default_capacity_box(net);

    let mut recurrent: Vec<Configuration> = Vec::new();
    for q in locally_recurrent_total_states(net) {
        let cfg0 = Configuration::new(net, vec![0; net.num_letters()], q.clone())?;
        let state_level = crate::recurrence::level(net, &cfg0, box_bound)?;
        let want = m as i64 - state_level;
        if want < 0 {
            continue;
        }
        for x in weighted_compositions(&s, want as u64) {
            let cfg = Configuration::new(net, x, q.clone())?;
            let is_rec = if agent {
                cycle_test(net, &cfg)?
            } else {
                burning_test_critical(net, &cfg)?.verdict
            };
            if is_rec {
                recurrent.push(cfg);
            }
        }
    }

    let mut representatives: Vec<Configuration> = Vec::new();
    let mut inconclusive = false;
    'next: for cfg in recurrent {
        for rep in &representatives {
            match same_component(net, rep, &cfg, budget)? {
                SameComponent::Yes => continue 'next,
                SameComponent::No => {}
                SameComponent::Inconclusive => {
                    inconclusive = true;
                }
            }
        }
        representatives.push(cfg);
    }
    let torsion_prediction = if agent { Some(torsion_group(net)?.torsion_order()) } else { None };
    Ok(LevelClasses { classes: representatives.len() as u64, torsion_prediction, inconclusive })
}

/// All x >= 0 with sum s(a) x(a) = target.
fn weighted_compositions(s: &[u64], target: u64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; s.len()];
    fn walk(s: &[u64], pos: usize, left: u64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if pos == s.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut used = 0u64;
        let mut count = 0i64;
        loop {
            cur[pos] = count;
            walk(s, pos + 1, left - used, cur, out);
            used += s[pos];
            count += 1;
            if used > left {
                break;
            }
        }
        cur[pos] = 0;
    }
    walk(s, 0, target, &mut cur, &mut out);
    out
}

/// Weight of a configuration of the rotor network on the bidirected cycle
/// C_n: sum_k k x(v_k) plus the number of counterclockwise rotor edges,
/// mod n. Invariant under executions.
pub fn cycle_weight(n: usize, cfg: &Configuration) -> Result<u64, NetError> {
    if cfg.x.len() != n || cfg.q.len() != n {
        return Err(NetError::InvalidSpec(format!(
            "configuration does not live on the rotor network over C_{}",
            n
        )));
    }
    let m = n as i64;
    let mut w = 0i64;
    for (k, (&x, &q)) in cfg.x.iter().zip(&cfg.q).enumerate() {
        w = (w + (k as i64 % m) * (x % m)) % m;
        // local state 0 is the edge (v_k, v_{k-1}), the weight-1 direction
        if q == 0 {
            w = (w + 1) % m;
        }
    }
    Ok(w.rem_euclid(m) as u64)
}

/// Counts of recurrent rotor configurations on the bidirected cycle C_n with
/// m chips, bucketed by weight class.
pub fn weight_class_counts(n: usize, m: u64) -> Result<Vec<u64>, NetError> {
    let net = build(&NetworkSpec::rotor(Digraph::bidirected_cycle(n)))?;
    let exps: Vec<Vec<u32>> = exponents_up_to(n, m as u32)
        .into_iter()
        .filter(|e| e.iter().sum::<u32>() == m as u32)
        .collect();
    let states = net.all_states();
    let buckets: Result<Vec<Vec<u64>>, NetError> = exps
        .into_par_iter()
        .map(|e| {
            let x: Vec<i64> = e.iter().map(|&c| c as i64).collect();
            let mut local = vec![0u64; n];
            for q in &states {
                let cfg = Configuration::new(&net, x.clone(), q.clone())?;
                if cycle_test(&net, &cfg)? {
                    local[cycle_weight(n, &cfg)? as usize] += 1;
                }
            }
            Ok(local)
        })
        .collect();
    let mut counts = vec![0u64; n];
    for local in buckets? {
        for (c, l) in counts.iter_mut().zip(local) {
            *c += l;
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{execute_word, step};
    use crate::mat::int;
    use crate::testnets::{inverse_c3_m6, rotor_cn};

    #[test]
    fn zero_input_has_no_recurrent_states() {
        let net = rotor_cn(3);
        assert_eq!(count_recurrent_for_input(&net, &[0, 0, 0]).unwrap(), 0);
    }

    #[test]
    fn single_chip_counts_rotor_states_whose_cycles_pass_the_vertex() {
        let net = rotor_cn(3);
        // brute force over the 8 rotor states
        let mut expected = 0;
        for q in net.all_states() {
            let cfg = Configuration::new(&net, vec![1, 0, 0], q).unwrap();
            if cycle_test(&net, &cfg).unwrap() {
                expected += 1;
            }
        }
        assert_eq!(count_recurrent_for_input(&net, &[1, 0, 0]).unwrap(), expected);
        assert!(expected > 0);
    }

    #[test]
    fn counts_depend_only_on_the_support() {
        let net = rotor_cn(3);
        assert_eq!(
            count_recurrent_for_input(&net, &[1, 2, 0]).unwrap(),
            count_recurrent_for_input(&net, &[3, 1, 0]).unwrap()
        );
    }

    #[test]
    fn determinant_and_bruteforce_sides_agree_on_rotor_c3() {
        let net = rotor_cn(3);
        let a = series_bruteforce(&net, 5).unwrap();
        let b = series_determinant(&net, 5).unwrap();
        assert_eq!(a, b);
        // univariate z^3 coefficient is 74 = 26 + 24 + 24
        assert_eq!(b.univariate().get(&[3]), int(74));
        // constant term vanishes
        assert_eq!(b.get(&[0, 0, 0]), int(0));
    }

    #[test]
    fn determinant_and_bruteforce_sides_agree_on_rotor_c4_and_inverse() {
        let net = rotor_cn(4);
        assert_eq!(series_bruteforce(&net, 5).unwrap(), series_determinant(&net, 5).unwrap());
        let net = inverse_c3_m6();
        assert_eq!(series_bruteforce(&net, 5).unwrap(), series_determinant(&net, 5).unwrap());
    }

    #[test]
    fn univariate_series_denominator_recovers_the_characteristic_polynomial() {
        // (sum r_n z^n)(1-z)^|V| equals det(D - (1-z)A) as a polynomial,
        // which is det(D) (1-z)^|V| chi(1/(1-z)) for chi the characteristic
        // polynomial of A D^{-1}
        let net = rotor_cn(3);
        let series = series_determinant(&net, 8).unwrap().univariate();
        let nv = 3u32;
        let p = production_matrix(&net).unwrap(); // A D^{-1}
        let chi_tail = crate::algebra::char_poly(&p);
        let mut chi = vec![Rat::from_integer(int(1))];
        chi.extend(chi_tail);
        // expected polynomial: det(D) sum_k chi_k (1-z)^k
        let det_d = Rat::from_integer(int(8));
        let mut expected = vec![Rat::zero(); nv as usize + 1];
        for (k, c) in chi.iter().enumerate() {
            let mut binom = Int::from(1);
            for j in 0..=k {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                expected[j] += &det_d * c * Rat::from_integer(&binom * Int::from(sign));
                binom = &binom * Int::from((k - j) as u64) / Int::from(j as u64 + 1);
            }
        }
        // series * (1-z)^3, coefficient by coefficient up to degree 5
        for d in 0..=5u32 {
            let mut acc = Rat::zero();
            let mut binom = Int::from(1);
            for j in 0..=(nv.min(d)) {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                acc += Rat::from_integer(series.get(&[d - j]) * &binom * Int::from(sign));
                binom = &binom * Int::from((nv - j) as u64) / Int::from(j as u64 + 1);
            }
            let want = expected.get(d as usize).cloned().unwrap_or_else(Rat::zero);
            assert_eq!(acc, want, "coefficient of z^{}", d);
        }
    }

    #[test]
    fn master_identity_with_unit_weights_and_random_weights() {
        let c3 = Digraph::bidirected_cycle(3);
        let ones = vec![1i64; 6];
        let rep = master_identity_check(&c3, &ones, 4).unwrap();
        assert!(rep.agree);
        // unit weights specialize to the plain counting series
        let net = rotor_cn(3);
        assert_eq!(rep.determinant_side, series_bruteforce(&net, 4).unwrap());

        // 20 random assignments spread over C3, C4, and the two-vertex
        // multigraph
        let mut seed = 99u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed % 5 + 1) as i64
        };
        for _ in 0..7 {
            let y: Vec<i64> = (0..6).map(|_| next()).collect();
            assert!(master_identity_check(&c3, &y, 4).unwrap().agree, "y = {:?}", y);
        }
        let c4 = Digraph::bidirected_cycle(4);
        for _ in 0..7 {
            let y: Vec<i64> = (0..8).map(|_| next()).collect();
            assert!(master_identity_check(&c4, &y, 3).unwrap().agree, "y = {:?}", y);
        }
        let two = crate::testnets::two_vertex_multigraph();
        for _ in 0..6 {
            let y: Vec<i64> = (0..5).map(|_| next()).collect();
            assert!(master_identity_check(&two, &y, 5).unwrap().agree, "y = {:?}", y);
        }
    }

    #[test]
    fn single_vertex_coefficient_counts_unicycles() {
        // specializing z to one vertex r: the coefficient of z_r equals
        // outdeg(r) t(G, r)
        let c4 = Digraph::bidirected_cycle(4);
        let rep = master_identity_check(&c4, &vec![1; 8], 1).unwrap();
        for r in 0..4usize {
            let mut e = vec![0u32; 4];
            e[r] = 1;
            let trees = forests_rooted_at(&c4, &[r], &vec![1; 8]).unwrap();
            assert_eq!(rep.determinant_side.get(&e), int(2) * trees);
        }
    }

    #[test]
    fn forest_counts_match_brute_force() {
        let c3 = Digraph::bidirected_cycle(3);
        assert_eq!(forests_rooted_at(&c3, &[0], &vec![1; 6]).unwrap(), int(3));
        assert_eq!(forests_rooted_at(&c3, &[0, 1, 2], &vec![1; 6]).unwrap(), int(1));
        let mut seed = 7u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed % 4 + 1) as i64
        };
        let digraphs = [
            Digraph::bidirected_cycle(3),
            Digraph::bidirected_cycle(4),
            crate::testnets::two_vertex_multigraph(),
        ];
        for g in &digraphs {
            let y: Vec<i64> = (0..g.num_edges()).map(|_| next()).collect();
            for roots in [vec![0], vec![0, 1]] {
                assert_eq!(
                    forests_rooted_at(g, &roots, &y).unwrap(),
                    forests_rooted_at_bruteforce(g, &roots, &y).unwrap(),
                    "roots {:?} on {} vertices",
                    roots,
                    g.num_vertices()
                );
            }
        }
    }

    #[test]
    fn component_counts_per_level_on_rotor_c3() {
        let net = rotor_cn(3);
        let zero = components_per_level(&net, 0, 50_000).unwrap();
        assert_eq!(zero.classes, 0);
        for m in 1..=3 {
            let r = components_per_level(&net, m, 50_000).unwrap();
            assert!(!r.inconclusive);
            assert_eq!(r.classes, 3, "level {}", m);
            assert_eq!(r.torsion_prediction, Some(int(3)));
        }
    }

    #[test]
    fn component_counts_match_torsion_on_a_non_agent_network() {
        // row chip-firing has s = (3,2), Stop = {0..5, 7}, and a trivial
        // torsion group, so every unstoppable level carries exactly one
        // recurrent component
        let net = crate::testnets::row_chip_firing();
        let tor = torsion_group(&net).unwrap();
        assert_eq!(tor.torsion_order(), int(1));
        for m in [6u64, 8, 9] {
            let r = components_per_level(&net, m, 400_000).unwrap();
            assert!(!r.inconclusive);
            assert_eq!(r.classes, 1, "level {}", m);
            assert_eq!(r.torsion_prediction, None);
        }
    }

    #[test]
    fn inverse_network_component_count_matches_its_torsion_order() {
        // the six-letter inverse network on C3: 76 recurrent components at
        // level 1, equal to |Z2 x Z38| from the Smith normal form route
        let net = inverse_c3_m6();
        let tor = torsion_group(&net).unwrap();
        assert_eq!(tor.divisors, vec![int(2), int(38)]);
        let r = components_per_level(&net, 1, 2_000_000).unwrap();
        assert!(!r.inconclusive);
        assert_eq!(Int::from(r.classes), tor.torsion_order());
        assert_eq!(r.torsion_prediction, Some(int(76)));
    }

    #[test]
    fn determinant_identity_on_a_non_cycle_multigraph() {
        let net = build(&NetworkSpec::rotor(crate::testnets::two_vertex_multigraph())).unwrap();
        assert_eq!(series_bruteforce(&net, 6).unwrap(), series_determinant(&net, 6).unwrap());
    }

    #[test]
    fn component_counts_per_level_on_critical_toppling() {
        let net = crate::testnets::sandpile_c3();
        let at3 = components_per_level(&net, 3, 400_000).unwrap();
        assert!(!at3.inconclusive);
        assert_eq!(at3.classes, 2);
        for m in [4u64, 5] {
            let r = components_per_level(&net, m, 400_000).unwrap();
            assert!(!r.inconclusive);
            assert_eq!(r.classes, 3, "level {}", m);
        }
    }

    #[test]
    fn cycle_weight_examples() {
        let net = rotor_cn(4);
        // all chips at v0, all rotors clockwise (state 1, weight 0): weight 0
        let cfg = Configuration::new(&net, vec![3, 0, 0, 0], vec![1, 1, 1, 1]).unwrap();
        assert_eq!(cycle_weight(4, &cfg).unwrap(), 0);
        // two counterclockwise rotors, chip at v0
        let cfg = Configuration::new(&net, vec![1, 0, 0, 0], vec![0, 0, 1, 1]).unwrap();
        assert_eq!(cycle_weight(4, &cfg).unwrap(), 2);
        // one chip at v3, all rotors clockwise
        let cfg = Configuration::new(&net, vec![0, 0, 0, 1], vec![1, 1, 1, 1]).unwrap();
        assert_eq!(cycle_weight(4, &cfg).unwrap(), 3);
    }

    #[test]
    fn cycle_weight_is_invariant_under_legal_steps() {
        let net = rotor_cn(4);
        let mut cfg = Configuration::new(&net, vec![2, 1, 0, 1], vec![0, 1, 0, 1]).unwrap();
        let expected = cycle_weight(4, &cfg).unwrap();
        let mut seed = 5u64;
        for _ in 0..1000 {
            let avail: Vec<usize> = (0..4).filter(|&a| cfg.x[a] >= 1).collect();
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            let a = avail[(seed % avail.len() as u64) as usize];
            cfg = step(&net, &cfg, a).unwrap();
            assert_eq!(cycle_weight(4, &cfg).unwrap(), expected);
        }
        // a full period returns the configuration and so also the weight
        let back = execute_word(&net, &cfg, &[0, 0, 1, 1, 2, 2, 3, 3]).unwrap().0;
        assert_eq!(cycle_weight(4, &back).unwrap(), expected);
    }

    #[test]
    fn weight_class_row_n3() {
        assert_eq!(weight_class_counts(3, 3).unwrap(), vec![26, 24, 24]);
    }

    #[test]
    fn weight_class_row_n6() {
        assert_eq!(weight_class_counts(6, 6).unwrap(), vec![3630, 3624, 3624, 3630, 3624, 3624]);
    }

    #[test]
    #[ignore = "about a minute in debug builds"]
    fn weight_class_rows_n7_n8() {
        assert_eq!(
            weight_class_counts(7, 7).unwrap(),
            vec![21394, 21392, 21392, 21392, 21392, 21392, 21392]
        );
        assert_eq!(
            weight_class_counts(8, 8).unwrap(),
            vec![130090, 130080, 130072, 130080, 130086, 130080, 130072, 130080]
        );
    }

    #[test]
    fn conjecture_data_gcd_symmetry() {
        // the class sizes coincide whenever gcd(n, m, i) = gcd(n, m, j)
        for n in 3..=5usize {
            for m in 1..=6u64 {
                let counts = weight_class_counts(n, m).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let gi = num_integer::gcd(num_integer::gcd(n as u64, m), i as u64);
                        let gj = num_integer::gcd(num_integer::gcd(n as u64, m), j as u64);
                        if gi == gj {
                            assert_eq!(counts[i], counts[j], "n={} m={} i={} j={}", n, m, i, j);
                        }
                    }
                }
            }
        }
    }
}
