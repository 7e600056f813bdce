//! Per-network memoization of the exact invariants. Networks are immutable
//! after construction, so every derived quantity can be computed once and
//! shared; clones share the same cache.

use crate::algebra::{GroupInvariants, IntegerLattice, NetworkClass};
use crate::core::{LocalState, TotalState};
use crate::error::NetError;
use crate::mat::{Int, QMat, Rat};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

#[derive(Default, Debug)]
pub(crate) struct CacheInner {
    pub loc: Option<Vec<Vec<LocalState>>>,
    pub irreducible: Option<Result<(), NetError>>,
    pub production: Option<Result<QMat, NetError>>,
    pub classify: Option<Result<NetworkClass, NetError>>,
    pub kernel: Option<Result<IntegerLattice, NetError>>,
    pub period: Option<Result<Vec<Int>, NetError>>,
    pub exchange: Option<Result<Vec<Int>, NetError>>,
    pub grothendieck: Option<Result<GroupInvariants, NetError>>,
    pub torsion: Option<Result<GroupInvariants, NetError>>,
    pub letter_order: HashMap<usize, usize>,
    pub state_capacity: HashMap<(TotalState, u64), Result<i64, NetError>>,
    pub network_capacity: HashMap<u64, Result<i64, NetError>>,
    pub voltage: HashMap<(usize, usize), Vec<Rat>>,
}

#[derive(Clone, Default, Debug)]
pub(crate) struct AnalysisCache {
    inner: Arc<Mutex<CacheInner>>,
}

impl AnalysisCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fetch the cached value in `slot` or compute and store it.
    pub fn memo<T, F>(&self, slot: impl Fn(&mut CacheInner) -> &mut Option<T>, compute: F) -> T
    where
        T: Clone,
        F: FnOnce() -> T,
    {
        {
            let mut inner = self.inner.lock().unwrap();
            if let Some(v) = slot(&mut inner) {
                return v.clone();
            }
        }
        // compute outside the lock so nested lookups do not deadlock
        let value = compute();
        let mut inner = self.inner.lock().unwrap();
        slot(&mut inner).get_or_insert(value).clone()
    }

    pub fn memo_map<K, T, F>(
        &self,
        map: impl Fn(&mut CacheInner) -> &mut HashMap<K, T>,
        key: K,
        compute: F,
    ) -> T
    where
        K: std::hash::Hash + Eq + Clone,
        T: Clone,
        F: FnOnce() -> T,
    {
        {
            let mut inner = self.inner.lock().unwrap();
            if let Some(v) = map(&mut inner).get(&key) {
                return v.clone();
            }
        }
        let value = compute();
        let mut inner = self.inner.lock().unwrap();
        map(&mut inner).entry(key).or_insert(value).clone()
    }
}
