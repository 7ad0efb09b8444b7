//! Policy slots keyed by interaction-graph rows, with shared storage for
//! slots whose rows coincide.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graphs::{is_zero_row, l1_distance, rows_equal, InteractionGraph};
use crate::Matrix;

/// Handle into a population's policy store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolicyKey(pub u32);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub sigma: Vec<f64>,
    pub frozen: bool,
    pub key: PolicyKey,
}

/// Initial policies for a new population.
#[derive(Debug, Clone)]
pub struct PopulationInit<P> {
    /// Policy held by non-frozen all-zero rows.
    pub sink: P,
    /// Pre-trained policies pinned to slot indices.
    pub frozen: BTreeMap<usize, P>,
    /// Starting policies for specific learner slots; a group of slots sharing
    /// a row uses the override of its lowest slot.
    pub overrides: BTreeMap<usize, P>,
}

impl<P> PopulationInit<P> {
    pub fn with_sink(sink: P) -> Self {
        Self { sink, frozen: BTreeMap::new(), overrides: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population<P> {
    slots: Vec<Slot>,
    store: BTreeMap<PolicyKey, P>,
    next_key: u32,
}

impl<P: Clone + PartialEq> Population<P> {
    /// Builds one slot per graph row. Learner groups that have no override
    /// get their policy from `fresh`, called once per group in slot order.
    pub fn from_graph(graph: &InteractionGraph, init: PopulationInit<P>, mut fresh: impl FnMut() -> P) -> Result<Self> {
        let n = graph.size();
        if let Some(i) = init.frozen.keys().find(|i| **i >= n) {
            return invalid(format!("frozen slot {i} out of range for {n} slots"));
        }
        let mut pop = Population { slots: Vec::with_capacity(n), store: BTreeMap::new(), next_key: 0 };
        let mut overrides = init.overrides;
        let mut frozen = init.frozen;
        let mut sink_key = None;
        for i in 0..n {
            let sigma = graph.row(i);
            if let Some(policy) = frozen.remove(&i) {
                let key = pop.insert(policy);
                pop.slots.push(Slot { sigma, frozen: true, key });
                continue;
            }
            let key = if is_zero_row(&sigma) {
                *sink_key.get_or_insert_with(|| pop.insert(init.sink.clone()))
            } else if let Some(shared) = pop.shared_key(&sigma) {
                shared
            } else {
                let policy = overrides.remove(&i).unwrap_or_else(&mut fresh);
                pop.insert(policy)
            };
            pop.slots.push(Slot { sigma, frozen: false, key });
        }
        Ok(pop)
    }

    /// A population of fixed policies, each in its own frozen slot.
    pub fn from_frozen(rows: Vec<Vec<f64>>, policies: Vec<P>) -> Result<Self> {
        if rows.len() != policies.len() {
            return invalid("one row per policy required");
        }
        let mut pop = Population { slots: Vec::new(), store: BTreeMap::new(), next_key: 0 };
        for (sigma, policy) in rows.into_iter().zip(policies) {
            let key = pop.insert(policy);
            pop.slots.push(Slot { sigma, frozen: true, key });
        }
        Ok(pop)
    }

    /// A population with all-zero rows where each policy is its own slot.
    pub fn from_policies(policies: Vec<P>) -> Self {
        let n = policies.len();
        Self::from_frozen(vec![vec![0.0; n]; n], policies).expect("lengths match")
    }

    /// Reassembles a population from stored slots and policies, checking the
    /// storage invariants.
    pub fn from_parts(slots: Vec<Slot>, store: BTreeMap<PolicyKey, P>) -> Result<Self> {
        let n = slots.len();
        if let Some(i) = slots.iter().position(|s| s.sigma.len() != n) {
            return invalid(format!("slot {i} has a row of length {} for {n} slots", slots[i].sigma.len()));
        }
        let next_key = store.keys().map(|k| k.0 + 1).max().unwrap_or(0);
        let pop = Population { slots, store, next_key };
        pop.check_sharing()?;
        if pop.store.keys().any(|k| !pop.slots.iter().any(|s| s.key == *k)) {
            return invalid("stored policy not referenced by any slot");
        }
        Ok(pop)
    }

    fn insert(&mut self, policy: P) -> PolicyKey {
        let key = PolicyKey(self.next_key);
        self.next_key += 1;
        self.store.insert(key, policy);
        key
    }

    fn shared_key(&self, sigma: &[f64]) -> Option<PolicyKey> {
        self.slots.iter().find(|s| !s.frozen && !is_zero_row(&s.sigma) && rows_equal(&s.sigma, sigma)).map(|s| s.key)
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, i: usize) -> &Slot {
        &self.slots[i]
    }

    pub fn store(&self) -> &BTreeMap<PolicyKey, P> {
        &self.store
    }

    pub fn policy(&self, i: usize) -> &P {
        &self.store[&self.slots[i].key]
    }

    pub fn policies(&self) -> Vec<&P> {
        (0..self.len()).map(|i| self.policy(i)).collect()
    }

    pub fn is_sink(&self, i: usize) -> bool {
        let s = &self.slots[i];
        !s.frozen && is_zero_row(&s.sigma)
    }

    pub fn is_learner(&self, i: usize) -> bool {
        let s = &self.slots[i];
        !s.frozen && !is_zero_row(&s.sigma)
    }

    /// The interaction graph formed by the slots' rows.
    pub fn graph(&self) -> Result<InteractionGraph> {
        let n = self.len();
        InteractionGraph::new(Matrix::from_fn(n, n, |i, j| self.slots[i].sigma[j]))
    }

    /// Lowest slot index of each trainable policy, in slot order.
    pub fn learner_groups(&self) -> Vec<usize> {
        let mut seen = Vec::new();
        let mut groups = Vec::new();
        for i in 0..self.len() {
            if self.is_learner(i) && !seen.contains(&self.slots[i].key) {
                seen.push(self.slots[i].key);
                groups.push(i);
            }
        }
        groups
    }

    /// Replaces the policy trained through slot `i` (and every slot sharing it).
    pub fn set_policy(&mut self, i: usize, policy: P) -> Result<()> {
        if !self.is_learner(i) {
            return invalid(format!("slot {i} is frozen or the sink and cannot be trained"));
        }
        self.store.insert(self.slots[i].key, policy);
        Ok(())
    }

    /// Rebinds learner slots to the rows of a new graph.
    ///
    /// Slots whose row is unchanged keep their policy. A new row is bound to
    /// the policy of the slot whose old row is L1-nearest (reusing its key if
    /// no other slot still claims it, cloning otherwise); when `fresh` is
    /// given, new rows take a fresh policy instead. Frozen slots keep their
    /// policies and only record the new row.
    pub fn rebind(&mut self, graph: &InteractionGraph, mut fresh: Option<&mut dyn FnMut() -> P>) -> Result<()> {
        let n = self.len();
        if graph.size() != n {
            return invalid(format!("graph has {} rows but population has {n} slots", graph.size()));
        }
        let old = self.slots.clone();
        let sink_key = old.iter().find(|s| !s.frozen && is_zero_row(&s.sigma)).map(|s| s.key);
        let mut claimed: Vec<PolicyKey> = Vec::new();
        let mut slots: Vec<Slot> = Vec::with_capacity(n);
        let mut pending = Vec::new();

        for (i, slot) in old.iter().enumerate() {
            let sigma = graph.row(i);
            if slot.frozen {
                claimed.push(slot.key);
                slots.push(Slot { sigma, frozen: true, key: slot.key });
                continue;
            }
            if is_zero_row(&sigma) {
                let key = match sink_key {
                    Some(k) => k,
                    None => return invalid("graph introduces a sink but the population has no sink policy"),
                };
                claimed.push(key);
                slots.push(Slot { sigma, frozen: false, key });
                continue;
            }
            // Keep the policy of any old slot that already trained on this row.
            let kept = old.iter().find(|s| !s.frozen && !is_zero_row(&s.sigma) && rows_equal(&s.sigma, &sigma)).map(|s| s.key);
            match kept {
                Some(key) => {
                    claimed.push(key);
                    slots.push(Slot { sigma, frozen: false, key });
                }
                None => {
                    pending.push(i);
                    slots.push(Slot { sigma, frozen: false, key: PolicyKey(u32::MAX) });
                }
            }
        }

        for i in pending {
            let sigma = slots[i].sigma.clone();
            if let Some(j) = pending_shared(&slots, i) {
                slots[i].key = slots[j].key;
                continue;
            }
            let key = match fresh.as_mut() {
                Some(make) => {
                    let policy = make();
                    self.insert(policy)
                }
                None => {
                    let nearest = old
                        .iter()
                        .filter(|s| !s.frozen && !is_zero_row(&s.sigma))
                        .min_by(|a, b| l1_distance(&a.sigma, &sigma).total_cmp(&l1_distance(&b.sigma, &sigma)));
                    match nearest {
                        Some(s) if !claimed.contains(&s.key) => s.key,
                        Some(s) => {
                            let policy = self.store[&s.key].clone();
                            self.insert(policy)
                        }
                        // Only sinks and frozen slots existed before: start from the sink.
                        None => match sink_key.and_then(|k| self.store.get(&k).cloned()) {
                            Some(policy) => self.insert(policy),
                            None => return invalid("no policy to initialize a new learner from"),
                        },
                    }
                }
            };
            claimed.push(key);
            slots[i].key = key;
        }

        self.slots = slots;
        self.store.retain(|k, _| claimed.contains(k));
        Ok(())
    }

    /// Checks the storage invariants: equal non-frozen rows share a key,
    /// distinct learner rows do not, and frozen slots own their keys.
    pub fn check_sharing(&self) -> Result<()> {
        for i in 0..self.len() {
            let a = &self.slots[i];
            if !self.store.contains_key(&a.key) {
                return invalid(format!("slot {i} refers to a missing policy"));
            }
            for j in (i + 1)..self.len() {
                let b = &self.slots[j];
                let same_row = rows_equal(&a.sigma, &b.sigma);
                if a.frozen || b.frozen {
                    if a.key == b.key {
                        return invalid(format!("frozen slots {i} and {j} share a policy"));
                    }
                } else if same_row != (a.key == b.key) {
                    return invalid(format!("slots {i} and {j}: equal rows must share exactly one policy"));
                }
            }
        }
        Ok(())
    }
}

fn pending_shared(slots: &[Slot], i: usize) -> Option<usize> {
    (0..i).find(|&j| !slots[j].frozen && slots[j].key != PolicyKey(u32::MAX) && rows_equal(&slots[j].sigma, &slots[i].sigma))
}
