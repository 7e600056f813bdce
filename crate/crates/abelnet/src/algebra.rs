//! Exact algebraic invariants: locally recurrent states, total kernel,
//! production matrix, Perron classification, period and exchange-rate
//! vectors, and group invariants via Smith normal form.

use crate::core::{FiringVector, Letter, LocalState, Network, TotalState, VertexId};
use crate::error::NetError;
use crate::mat::{divisors_of_snf, primitive_integer_vector, IMat, Int, QMat, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub use crate::mat::smith_normal_form;

/// Basis matrix of a finite-index sublattice of Z^A (columns span it).
#[derive(Clone, Debug)]
pub struct IntegerLattice {
    pub basis: IMat,
}

impl IntegerLattice {
    /// |Z^A / K| = |det(basis)|.
    pub fn index(&self) -> Int {
        self.basis.det().abs()
    }

    /// Rational coordinates of x in the basis, if the basis is invertible.
    fn coordinates(&self, x: &[Int]) -> Option<Vec<Rat>> {
        let b: Vec<Rat> = x.iter().map(|v| Rat::from_integer(v.clone())).collect();
        self.basis.to_rational().solve(&b)
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        self.coordinates(x).is_some_and(|y| y.iter().all(|c| c.is_integer()))
    }

    /// Smallest positive c with c*x in the lattice.
    pub fn minimal_positive_multiple(&self, x: &[Int]) -> Option<Int> {
        let y = self.coordinates(x)?;
        let mut lcm = Int::one();
        for c in &y {
            lcm = lcm.lcm(c.denom());
        }
        Some(lcm)
    }
}

/// Free rank plus elementary divisors d_1 | d_2 | ... (entries > 1) of a
/// finitely generated abelian group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupInvariants {
    pub free_rank: usize,
    pub divisors: Vec<Int>,
}

impl GroupInvariants {
    pub fn torsion_order(&self) -> Int {
        self.divisors.iter().product()
    }

    pub fn torsion_part(&self) -> GroupInvariants {
        GroupInvariants { free_rank: 0, divisors: self.divisors.clone() }
    }
}

impl fmt::Display for GroupInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.divisors.iter().map(|d| format!("Z{}", d)).collect();
        for _ in 0..self.free_rank {
            parts.push("Z".to_string());
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Criticality {
    Subcritical,
    Critical,
    Supercritical,
}

impl fmt::Display for Criticality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criticality::Subcritical => write!(f, "subcritical"),
            Criticality::Critical => write!(f, "critical"),
            Criticality::Supercritical => write!(f, "supercritical"),
        }
    }
}

/// Classification of the whole network together with the classification of
/// each strong component of the production digraph.
#[derive(Clone, Debug)]
pub struct NetworkClass {
    pub overall: Criticality,
    pub strongly_connected: bool,
    pub components: Vec<(Vec<Letter>, Criticality)>,
}

// ---------------------------------------------------------------------------
// per-vertex transition monoid machinery

fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    // (f then g)(x) = g(f(x))
    f.iter().map(|&y| g[y]).collect()
}

fn identity_map(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Local transition map of one letter on the full local state set.
fn local_map(net: &Network, a: Letter) -> Vec<usize> {
    let v = net.letter_owner(a);
    let local = net.letter_local_index(a);
    let p = &net.processors[v];
    (0..p.num_states).map(|q| p.next[q][local]).collect()
}

/// Product of all of a vertex's letter maps (one application of each).
fn round_map(net: &Network, v: VertexId) -> Vec<usize> {
    let p = &net.processors[v];
    let mut f = identity_map(p.num_states);
    for &a in &p.letters {
        f = compose(&f, &local_map(net, a));
    }
    f
}

/// Preperiod and period of the sequence f, f^2, f^3, ...
fn map_preperiod_period(f: &[usize]) -> (usize, usize) {
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut cur = f.to_vec();
    let mut k = 1;
    loop {
        if let Some(&first) = seen.get(&cur) {
            return (first, k - first);
        }
        seen.insert(cur.clone(), k);
        cur = compose(&cur, f);
        k += 1;
    }
}

/// Smallest k with f^(2k) = f^k.
fn idempotent_power(f: &[usize]) -> usize {
    let (pre, period) = map_preperiod_period(f);
    let mut k = period;
    while k < pre.max(1) {
        k += period;
    }
    k
}

fn map_power(f: &[usize], k: usize) -> Vec<usize> {
    let mut out = identity_map(f.len());
    let mut base = f.to_vec();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            out = compose(&out, &base);
        }
        base = compose(&base, &base);
        e >>= 1;
    }
    out
}

/// Returns the all-ones vector times the smallest k for which t_{k*1} is
/// idempotent on the total state space. t_{k1} acts per vertex as f_v^k, so
/// k must clear every preperiod and be a multiple of every period.
pub fn idempotent_vector(net: &Network) -> FiringVector {
    let mut lcm = 1usize;
    let mut max_pre = 1usize;
    for v in 0..net.num_vertices() {
        let (pre, period) = map_preperiod_period(&round_map(net, v));
        lcm = lcm.lcm(&period);
        max_pre = max_pre.max(pre);
    }
    let mut k = lcm;
    while k < max_pre {
        k += lcm;
    }
    vec![k as u64; net.num_letters()]
}

/// Per-vertex image of the minimal idempotent: Loc(N) is the product of
/// these local state sets.
pub fn locally_recurrent_states(net: &Network) -> Vec<Vec<LocalState>> {
    net.cache.memo(
        |c| &mut c.loc,
        || {
            (0..net.num_vertices())
                .map(|v| {
                    let f = round_map(net, v);
                    let e = map_power(&f, idempotent_power(&f));
                    let mut img: Vec<usize> = e.to_vec();
                    img.sort_unstable();
                    img.dedup();
                    img
                })
                .collect()
        },
    )
}

/// One locally recurrent total state (first local choice per vertex).
pub fn some_locally_recurrent_state(net: &Network) -> TotalState {
    locally_recurrent_states(net).iter().map(|loc| loc[0]).collect()
}

pub fn is_locally_recurrent(net: &Network, q: &TotalState) -> bool {
    locally_recurrent_states(net)
        .iter()
        .zip(q)
        .all(|(loc, s)| loc.binary_search(s).is_ok())
}

/// Restriction of a letter's transition to the locally recurrent states of
/// its owner, as a permutation of indices into `loc`.
pub(crate) fn loc_permutation(net: &Network, a: Letter, loc: &[LocalState]) -> Vec<usize> {
    let f = local_map(net, a);
    loc.iter()
        .map(|&q| loc.binary_search(&f[q]).expect("letter does not preserve Loc"))
        .collect()
}

fn permutation_order(p: &[usize]) -> usize {
    let mut order = 1usize;
    let mut seen = vec![false; p.len()];
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = p[cur];
            len += 1;
        }
        order = order.lcm(&len);
    }
    order
}

/// Order of t_a restricted to the locally recurrent states of its owner.
pub fn letter_order(net: &Network, a: Letter) -> usize {
    net.cache.memo_map(
        |c| &mut c.letter_order,
        a,
        || {
            let loc = &locally_recurrent_states(net)[net.letter_owner(a)];
            permutation_order(&loc_permutation(net, a, loc))
        },
    )
}

/// Check local irreducibility: at every vertex the group generated by the
/// restricted transitions must act transitively on the locally recurrent
/// local states.
pub fn check_locally_irreducible(net: &Network) -> Result<(), NetError> {
    net.cache.memo(|c| &mut c.irreducible, || check_locally_irreducible_uncached(net))
}

fn check_locally_irreducible_uncached(net: &Network) -> Result<(), NetError> {
    let loc = locally_recurrent_states(net);
    for v in 0..net.num_vertices() {
        let lv = &loc[v];
        let gens: Vec<Vec<usize>> =
            net.processors[v].letters.iter().map(|&a| loc_permutation(net, a, lv)).collect();
        let mut reached = vec![false; lv.len()];
        let mut stack = vec![0usize];
        reached[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for g in &gens {
                if !reached[g[i]] {
                    reached[g[i]] = true;
                    count += 1;
                    stack.push(g[i]);
                }
            }
        }
        if count != lv.len() {
            return Err(NetError::NotLocallyIrreducible(format!(
                "vertex {}: transition orbit covers {} of {} locally recurrent states",
                v,
                count,
                lv.len()
            )));
        }
    }
    Ok(())
}

pub fn is_locally_irreducible(net: &Network) -> bool {
    check_locally_irreducible(net).is_ok()
}

/// Basis of the lattice spanned by integer generator columns (must have full
/// rank).
fn lattice_from_generators(dim: usize, gens: &[Vec<Int>]) -> IMat {
    let mut g = IMat::zeros(dim, gens.len());
    for (j, col) in gens.iter().enumerate() {
        for i in 0..dim {
            g.set(i, j, col[i].clone());
        }
    }
    let (u, s, _v) = smith_normal_form(&g);
    let uinv = u
        .to_rational()
        .inverse()
        .expect("unimodular matrix is invertible");
    let mut basis = IMat::zeros(dim, dim);
    for j in 0..dim {
        let d = s.get(j, j);
        assert!(!d.is_zero(), "generators do not span a finite-index sublattice");
        for i in 0..dim {
            let val = uinv.get(i, j) * Rat::from_integer(d.clone());
            assert!(val.is_integer());
            basis.set(i, j, val.to_integer());
        }
    }
    basis
}

/// Total kernel K of the network, computed vertex by vertex: K_v is the
/// kernel of Z^{A_v} -> (group of restricted transitions on Loc_v).
pub fn total_kernel(net: &Network) -> Result<IntegerLattice, NetError> {
    net.cache.memo(|c| &mut c.kernel, || total_kernel_uncached(net))
}

fn total_kernel_uncached(net: &Network) -> Result<IntegerLattice, NetError> {
    check_locally_irreducible(net)?;
    let loc = locally_recurrent_states(net);
    let na = net.num_letters();
    let mut basis = IMat::zeros(na, na);
    for v in 0..net.num_vertices() {
        let lv = &loc[v];
        let letters = &net.processors[v].letters;
        let k = letters.len();
        let gens: Vec<Vec<usize>> = letters.iter().map(|&a| loc_permutation(net, a, lv)).collect();

        // explore the (finite abelian) permutation group, keeping one
        // exponent-vector representative per element
        let mut reps: BTreeMap<Vec<usize>, Vec<Int>> = BTreeMap::new();
        let id = identity_map(lv.len());
        reps.insert(id.clone(), vec![Int::zero(); k]);
        let mut frontier = vec![id];
        while let Some(g) = frontier.pop() {
            let rep = reps[&g].clone();
            for (i, gen) in gens.iter().enumerate() {
                let h = compose(&g, gen);
                if !reps.contains_key(&h) {
                    let mut r = rep.clone();
                    r[i] += 1;
                    reps.insert(h.clone(), r);
                    frontier.push(h);
                }
            }
        }

        // kernel generators: rep(g) + e_i - rep(g * gen_i)
        let mut kernel_gens: Vec<Vec<Int>> = Vec::new();
        for (g, rep) in &reps {
            for (i, gen) in gens.iter().enumerate() {
                let h = compose(g, gen);
                let mut vec = rep.clone();
                vec[i] += 1;
                for (x, y) in vec.iter_mut().zip(&reps[&h]) {
                    *x -= y;
                }
                if vec.iter().any(|x| !x.is_zero()) {
                    kernel_gens.push(vec);
                }
            }
        }
        if kernel_gens.is_empty() {
            // trivial group: K_v = Z^{A_v}
            for i in 0..k {
                let mut e = vec![Int::zero(); k];
                e[i] = Int::one();
                kernel_gens.push(e);
            }
        }
        let local_basis = lattice_from_generators(k, &kernel_gens);
        for i in 0..k {
            for j in 0..k {
                basis.set(letters[i], letters[j], local_basis.get(i, j).clone());
            }
        }
    }
    Ok(IntegerLattice { basis })
}

/// Production matrix: column a is N_{m_a |a|}(q) / m_a for q locally
/// recurrent, where m_a is the order of t_a on Loc.
pub fn production_matrix(net: &Network) -> Result<QMat, NetError> {
    net.cache.memo(|c| &mut c.production, || production_matrix_uncached(net))
}

fn production_matrix_uncached(net: &Network) -> Result<QMat, NetError> {
    check_locally_irreducible(net)?;
    let loc = locally_recurrent_states(net);
    let na = net.num_letters();
    let mut p = QMat::zeros(na, na);
    for a in 0..na {
        let v = net.letter_owner(a);
        let local = net.letter_local_index(a);
        let proc = &net.processors[v];
        let lv = &loc[v];
        let m = permutation_order(&loc_permutation(net, a, lv));
        let mut totals = vec![0u64; na];
        let mut state = lv[0];
        for _ in 0..m {
            for &(b, c) in &proc.emit[state][local] {
                totals[b] += c;
            }
            state = proc.next[state][local];
        }
        debug_assert_eq!(state, lv[0]);
        for b in 0..na {
            p.set(b, a, Rat::new(Int::from(totals[b]), Int::from(m as u64)));
        }
    }
    Ok(p)
}

/// Strong components of the production digraph (edge a -> b iff P(b,a) > 0),
/// in topological order is not guaranteed; letters within a component are
/// sorted.
fn strong_components(p: &QMat) -> Vec<Vec<Letter>> {
    let n = p.rows();
    let mut reach = vec![vec![false; n]; n];
    for a in 0..n {
        reach[a][a] = true;
        for b in 0..n {
            if p.get(b, a).is_positive() {
                reach[a][b] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut comps = Vec::new();
    for a in 0..n {
        if assigned[a] {
            continue;
        }
        let mut comp = Vec::new();
        for b in 0..n {
            if reach[a][b] && reach[b][a] && !assigned[b] {
                assigned[b] = true;
                comp.push(b);
            }
        }
        comps.push(comp);
    }
    comps
}

fn classify_irreducible(p_sub: &QMat) -> Criticality {
    let n = p_sub.rows();
    let i = QMat::identity(n);
    let m = i.sub(p_sub);
    // critical iff (I - P) has a positive kernel vector
    let kernel = m.kernel_basis();
    if kernel.len() == 1 {
        let v = &kernel[0];
        if v.iter().all(|c| c.is_positive()) || v.iter().all(|c| c.is_negative()) {
            return Criticality::Critical;
        }
    }
    // subcritical iff (I - P) is inverse-positive
    if let Some(inv) = m.inverse() {
        if inv.is_nonnegative() {
            return Criticality::Subcritical;
        }
    }
    Criticality::Supercritical
}

/// Exact classification, per strong component and overall, with no
/// floating-point decisions.
pub fn classify(net: &Network) -> Result<NetworkClass, NetError> {
    net.cache.memo(|c| &mut c.classify, || classify_uncached(net))
}

fn classify_uncached(net: &Network) -> Result<NetworkClass, NetError> {
    let p = production_matrix(net)?;
    let comps = strong_components(&p);
    let mut classified = Vec::new();
    let mut overall = Criticality::Subcritical;
    for comp in comps {
        let sub = p.submatrix(&comp, &comp);
        let tag = classify_irreducible(&sub);
        match (tag, overall) {
            (Criticality::Supercritical, _) => overall = Criticality::Supercritical,
            (Criticality::Critical, Criticality::Subcritical) => overall = Criticality::Critical,
            _ => {}
        }
        classified.push((comp, tag));
    }
    Ok(NetworkClass {
        overall,
        strongly_connected: classified.len() == 1,
        components: classified,
    })
}

pub fn is_strongly_connected(net: &Network) -> Result<bool, NetError> {
    Ok(classify(net)?.strongly_connected)
}

/// Period vector: primitive positive generator of Eig(P, 1) scaled to the
/// minimal positive multiple lying in the total kernel.
pub fn period_vector(net: &Network) -> Result<Vec<Int>, NetError> {
    net.cache.memo(|c| &mut c.period, || period_vector_uncached(net))
}

fn period_vector_uncached(net: &Network) -> Result<Vec<Int>, NetError> {
    let class = classify(net)?;
    if !class.strongly_connected {
        return Err(NetError::NotStronglyConnected);
    }
    if class.overall != Criticality::Critical {
        return Err(NetError::NotCritical);
    }
    let p = production_matrix(net)?;
    let n = p.rows();
    let m = QMat::identity(n).sub(&p);
    let kernel = m.kernel_basis();
    assert_eq!(kernel.len(), 1, "critical strongly connected networks have a one-dimensional eigenline");
    let mut r0 = primitive_integer_vector(&kernel[0]);
    if r0.iter().any(|c| c.is_negative()) {
        for c in &mut r0 {
            *c = -c.clone();
        }
    }
    assert!(r0.iter().all(|c| c.is_positive()));
    let k = total_kernel(net)?;
    let c = k
        .minimal_positive_multiple(&r0)
        .expect("kernel basis is invertible");
    Ok(r0.into_iter().map(|x| x * &c).collect())
}

/// Integer divisors of a BigInt by trial division (desk scale).
fn divisors(n: &Int) -> Option<Vec<Int>> {
    let n = n.abs().to_u64()?;
    if n == 0 {
        return Some(vec![]);
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(Int::from(d));
            out.push(Int::from(n / d));
        }
        d += 1;
    }
    Some(out)
}

/// Characteristic polynomial of a rational matrix via Faddeev-LeVerrier:
/// returns c with det(xI - M) = x^n + c[0] x^(n-1) + ... + c[n-1].
pub(crate) fn char_poly(m: &QMat) -> Vec<Rat> {
    let n = m.rows();
    let mut coeffs = Vec::with_capacity(n);
    let mut aux = QMat::identity(n);
    for k in 1..=n {
        aux = m.mul(&aux);
        let trace: Rat = (0..n).map(|i| aux.get(i, i).clone()).sum();
        let c = -trace / Rat::from_integer(Int::from(k as u64));
        for i in 0..n {
            let v = aux.get(i, i) + &c;
            aux.set(i, i, v);
        }
        coeffs.push(c);
    }
    coeffs
}

/// All nonnegative rational eigenvalue candidates of a rational matrix, in
/// descending order. None if the integer content is too large to factor.
fn nonnegative_rational_eigenvalues(m: &QMat) -> Option<Vec<Rat>> {
    let coeffs = char_poly(m);
    // clear denominators: integer polynomial a_n x^n + ... + a_0
    let mut lcm = Int::one();
    for c in &coeffs {
        lcm = lcm.lcm(c.denom());
    }
    let mut int_coeffs = vec![lcm.clone()]; // leading, degree n
    for c in &coeffs {
        int_coeffs.push(c.numer() * &lcm / c.denom());
    }
    // strip zero roots
    while int_coeffs.last().is_some_and(|c| c.is_zero()) && int_coeffs.len() > 1 {
        int_coeffs.pop();
    }
    let lead = int_coeffs.first().unwrap().clone();
    let tail = int_coeffs.last().unwrap().clone();
    let mut candidates = vec![Rat::zero()];
    for p in divisors(&tail)? {
        for q in divisors(&lead)? {
            candidates.push(Rat::new(p.clone(), q.clone()));
        }
    }
    candidates.sort();
    candidates.dedup();
    candidates.reverse();
    let eval = |x: &Rat| -> Rat {
        let mut acc = Rat::zero();
        for c in &int_coeffs {
            acc = acc * x + Rat::from_integer(c.clone());
        }
        acc
    };
    Some(candidates.into_iter().filter(|x| eval(x).is_zero()).collect())
}

/// Exchange rate vector: the primitive positive integer left eigenvector of P
/// for the spectral radius, with entry gcd 1. Errors if the network is not
/// strongly connected or the spectral radius is irrational.
pub fn exchange_rate(net: &Network) -> Result<Vec<Int>, NetError> {
    net.cache.memo(|c| &mut c.exchange, || exchange_rate_uncached(net))
}

fn exchange_rate_uncached(net: &Network) -> Result<Vec<Int>, NetError> {
    let class = classify(net)?;
    if !class.strongly_connected {
        return Err(NetError::NotStronglyConnected);
    }
    let p = production_matrix(net)?;
    let pt = p.transpose();
    let n = pt.rows();
    if class.overall == Criticality::Critical {
        return positive_left_eigenvector(&pt, &Rat::one()).ok_or(NetError::IrrationalSpectralRadius);
    }
    let _ = n;
    let candidates = nonnegative_rational_eigenvalues(&pt).ok_or(NetError::IrrationalSpectralRadius)?;
    for lambda in candidates {
        if let Some(s) = positive_left_eigenvector(&pt, &lambda) {
            // a positive eigenvector certifies lambda = lambda(P)
            return Ok(s);
        }
    }
    Err(NetError::IrrationalSpectralRadius)
}

fn positive_left_eigenvector(pt: &QMat, lambda: &Rat) -> Option<Vec<Int>> {
    let n = pt.rows();
    let mut m = QMat::identity(n);
    for i in 0..n {
        m.set(i, i, lambda.clone());
    }
    let kernel = m.sub(pt).kernel_basis();
    if kernel.len() != 1 {
        return None;
    }
    let mut s = primitive_integer_vector(&kernel[0]);
    if s.iter().any(|c| c.is_negative()) {
        for c in &mut s {
            *c = -c.clone();
        }
    }
    if s.iter().all(|c| c.is_positive()) {
        Some(s)
    } else {
        None
    }
}

/// Integer matrix whose columns are (I - P) applied to the kernel basis.
fn shifted_kernel_matrix(net: &Network) -> Result<IMat, NetError> {
    let p = production_matrix(net)?;
    let k = total_kernel(net)?;
    let n = p.rows();
    let kq = k.basis.to_rational();
    let prod = p.mul(&kq);
    let mut m = IMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let val = kq.get(i, j) - prod.get(i, j);
            assert!(val.is_integer(), "P must map K into Z^A");
            m.set(i, j, val.to_integer());
        }
    }
    Ok(m)
}

/// Invariants of the Grothendieck group Z^A / (I - P)K.
pub fn grothendieck_invariants(net: &Network) -> Result<GroupInvariants, NetError> {
    net.cache.memo(
        |c| &mut c.grothendieck,
        || {
            let m = shifted_kernel_matrix(net)?;
            let (_, s, _) = smith_normal_form(&m);
            let (divisors, free_rank) = divisors_of_snf(&s);
            Ok(GroupInvariants { free_rank, divisors })
        },
    )
}

/// Torsion group of the network. For critical strongly connected networks
/// this is Z^A_0 / (I - P)K computed inside the rank-(|A|-1) lattice
/// Z^A_0 = { z : s^T z = 0 }; otherwise it is the torsion part of the
/// Grothendieck group.
pub fn torsion_group(net: &Network) -> Result<GroupInvariants, NetError> {
    net.cache.memo(|c| &mut c.torsion, || torsion_group_uncached(net))
}

fn torsion_group_uncached(net: &Network) -> Result<GroupInvariants, NetError> {
    let class = classify(net)?;
    if !(class.overall == Criticality::Critical && class.strongly_connected) {
        return Ok(grothendieck_invariants(net)?.torsion_part());
    }
    let s = exchange_rate(net)?;
    let n = s.len();
    let mut srow = IMat::zeros(1, n);
    for (j, c) in s.iter().enumerate() {
        srow.set(0, j, c.clone());
    }
    let (_, snf_s, v) = smith_normal_form(&srow);
    assert!(snf_s.get(0, 0).is_one(), "gcd of exchange rates must be 1");
    // columns 1.. of v form a basis of Z^A_0
    let vinv = v.to_rational().inverse().expect("unimodular");
    let m = shifted_kernel_matrix(net)?;
    let mut coords = IMat::zeros(n - 1, n);
    for j in 0..n {
        let col: Vec<Rat> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|t| vinv.get(i, t) * Rat::from_integer(m.get(t, j).clone()))
                    .sum()
            })
            .collect();
        assert!(col[0].is_zero(), "(I-P)K must lie inside Z^A_0");
        for i in 1..n {
            assert!(col[i].is_integer());
            coords.set(i - 1, j, col[i].to_integer());
        }
    }
    let (_, snf_m, _) = smith_normal_form(&coords);
    let (divisors, free_rank) = divisors_of_snf(&snf_m);
    assert_eq!(free_rank, 0, "torsion group of a critical network is finite");
    Ok(GroupInvariants { free_rank: 0, divisors })
}
