//! Finite policy classes and the offline value oracle.
//!
//! A policy maps each context of a finite universe to an action. The class
//! is stored as an explicit `N × U` table, so the value oracle is exact
//! enumeration. Learners never see the table: they hand the oracle a
//! weighted example sequence and get back `min_π Σ loss(π(x))`.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::types::{Action, Context, CostVector, EstimatedCost, SignVector, MAX_ACTIONS};

/// Attempts at drawing a random class that covers every action.
const MAX_COVERAGE_ATTEMPTS: usize = 10_000;

// ── Policy classes ──────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyClass {
    num_actions: usize,
    universe: usize,
    /// Row-major: `table[p * universe + x]` is policy `p`'s action at `x`.
    table: Vec<Action>,
}

/// A two-action threshold rule: `below` for contexts `< threshold`, `above`
/// from there on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdPolicy {
    pub threshold: u32,
    pub below: Action,
    pub above: Action,
}

impl ThresholdPolicy {
    pub fn act(&self, context: Context) -> Action {
        if context.0 < self.threshold {
            self.below
        } else {
            self.above
        }
    }
}

impl PolicyClass {
    /// Builds a class from one row of actions per policy (one entry per context).
    pub fn from_table(num_actions: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        check_actions(num_actions)?;
        let universe = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::domain("policy class must contain at least one policy"))?;
        if universe == 0 {
            return Err(Error::domain("context universe must be non-empty"));
        }
        let mut table = Vec::with_capacity(rows.len() * universe);
        for (p, row) in rows.iter().enumerate() {
            if row.len() != universe {
                return Err(Error::domain(format!(
                    "policy {p} covers {} contexts, expected {universe}",
                    row.len()
                )));
            }
            for (x, &a) in row.iter().enumerate() {
                if a >= num_actions {
                    return Err(Error::domain(format!(
                        "policy {p} maps context {x} to action {a}, but K = {num_actions}"
                    )));
                }
                table.push(Action(a));
            }
        }
        Ok(Self {
            num_actions,
            universe,
            table,
        })
    }

    /// `N` policies with i.i.d. uniform actions per context, redrawn until
    /// every action is chosen by some policy somewhere.
    pub fn random<R: RngCore + ?Sized>(
        num_policies: usize,
        universe: usize,
        num_actions: usize,
        rng: &mut R,
    ) -> Result<Self> {
        check_actions(num_actions)?;
        if num_policies == 0 || universe == 0 {
            return Err(Error::domain("random policy class needs N >= 1 and U >= 1"));
        }
        if num_policies * universe < num_actions {
            return Err(Error::domain(format!(
                "N * U = {} table cells cannot cover K = {num_actions} actions",
                num_policies * universe
            )));
        }
        for _ in 0..MAX_COVERAGE_ATTEMPTS {
            let table: Vec<Action> = (0..num_policies * universe)
                .map(|_| Action(rng.random_range(0..num_actions)))
                .collect();
            let mut seen = vec![false; num_actions];
            for a in &table {
                seen[a.index()] = true;
            }
            if seen.iter().all(|s| *s) {
                return Ok(Self {
                    num_actions,
                    universe,
                    table,
                });
            }
        }
        Err(Error::domain("could not draw a policy class covering every action"))
    }

    /// All constant policies plus every threshold rule `(θ, a, b)` with
    /// `1 ≤ θ < U` and `a ≠ b`, expanded into a table.
    pub fn thresholds(universe: usize, num_actions: usize) -> Result<Self> {
        check_actions(num_actions)?;
        if universe == 0 {
            return Err(Error::domain("context universe must be non-empty"));
        }
        let mut rules = Vec::new();
        for a in 0..num_actions {
            rules.push(ThresholdPolicy {
                threshold: 0,
                below: Action(a),
                above: Action(a),
            });
        }
        for threshold in 1..universe as u32 {
            for below in 0..num_actions {
                for above in (0..num_actions).filter(|b| *b != below) {
                    rules.push(ThresholdPolicy {
                        threshold,
                        below: Action(below),
                        above: Action(above),
                    });
                }
            }
        }
        let table: Vec<Action> = rules
            .iter()
            .flat_map(|r| (0..universe as u32).map(move |x| r.act(Context(x))))
            .collect();
        let class = Self {
            num_actions,
            universe,
            table,
        };
        for (p, rule) in rules.iter().enumerate() {
            for x in 0..universe as u32 {
                assert_eq!(class.action(p, Context(x)), rule.act(Context(x)));
            }
        }
        Ok(class)
    }

    pub fn len(&self) -> usize {
        self.table.len() / self.universe
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn action(&self, policy: usize, context: Context) -> Action {
        self.table[policy * self.universe + context.index()]
    }

    pub fn policy(&self, policy: usize) -> &[Action] {
        &self.table[policy * self.universe..(policy + 1) * self.universe]
    }

    /// Cumulative loss of one policy, summed example by example.
    pub fn cumulative_loss(&self, policy: usize, examples: &[WeightedExample]) -> f64 {
        examples
            .iter()
            .map(|ex| ex.loss.value(self.action(policy, ex.context)))
            .sum()
    }

    /// Whether the class can represent the given context.
    pub fn contains_context(&self, context: Context) -> bool {
        context.index() < self.universe
    }
}

fn check_actions(num_actions: usize) -> Result<()> {
    if !(1..=MAX_ACTIONS).contains(&num_actions) {
        return Err(Error::domain(format!(
            "action count {num_actions} outside 1..={MAX_ACTIONS}"
        )));
    }
    Ok(())
}

// ── Weighted examples ───────────────────────────────────────────────────

/// A loss vector fed to the oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum LossVector {
    Zero,
    /// `value · e_action`.
    Basis { action: Action, value: f64 },
    /// `magnitude · ε` for a sign vector `ε`.
    Signed { signs: SignVector, magnitude: f64 },
    Dense(Vec<f64>),
}

impl LossVector {
    pub fn value(&self, action: Action) -> f64 {
        match self {
            LossVector::Zero => 0.0,
            LossVector::Basis { action: a, value } => {
                if *a == action {
                    *value
                } else {
                    0.0
                }
            }
            LossVector::Signed { signs, magnitude } => magnitude * signs.sign(action),
            LossVector::Dense(v) => v[action.index()],
        }
    }

    fn check(&self, num_actions: usize) -> Result<()> {
        let ok = match self {
            LossVector::Zero => true,
            LossVector::Basis { action, value } => {
                action.index() < num_actions && value.is_finite()
            }
            LossVector::Signed { magnitude, .. } => magnitude.is_finite(),
            LossVector::Dense(v) => v.len() == num_actions && v.iter().all(|x| x.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "loss vector {self:?} is not a finite {num_actions}-vector"
            )))
        }
    }
}

impl From<&EstimatedCost> for LossVector {
    fn from(est: &EstimatedCost) -> Self {
        match est.coordinate() {
            Some(action) => LossVector::Basis {
                action,
                value: est.scale(),
            },
            None => LossVector::Zero,
        }
    }
}

impl From<&CostVector> for LossVector {
    fn from(c: &CostVector) -> Self {
        LossVector::Dense(c.as_slice().to_vec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedExample {
    pub context: Context,
    pub loss: LossVector,
}

impl WeightedExample {
    pub fn new(context: Context, loss: LossVector) -> Self {
        Self { context, loss }
    }
}

// ── Aggregated losses ───────────────────────────────────────────────────

/// Summed losses per (context, action) cell.
///
/// A policy's cumulative loss on an example sequence only depends on these
/// sums, so an oracle query can be posed on the table instead of the raw
/// sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct LossTable {
    universe: usize,
    num_actions: usize,
    cells: Vec<f64>,
}

impl LossTable {
    pub fn new(universe: usize, num_actions: usize) -> Self {
        Self {
            universe,
            num_actions,
            cells: vec![0.0; universe * num_actions],
        }
    }

    pub fn from_examples(
        universe: usize,
        num_actions: usize,
        examples: &[WeightedExample],
    ) -> Result<Self> {
        let mut table = Self::new(universe, num_actions);
        for ex in examples {
            table.add(ex.context, &ex.loss)?;
        }
        Ok(table)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn get(&self, context: Context, action: Action) -> f64 {
        self.cells[context.index() * self.num_actions + action.index()]
    }

    pub fn add(&mut self, context: Context, loss: &LossVector) -> Result<()> {
        if context.index() >= self.universe {
            return Err(Error::domain(format!(
                "context {} outside universe of size {}",
                context.0, self.universe
            )));
        }
        loss.check(self.num_actions)?;
        let row = context.index() * self.num_actions;
        match loss {
            LossVector::Zero => {}
            LossVector::Basis { action, value } => self.cells[row + action.index()] += value,
            LossVector::Signed { .. } | LossVector::Dense(_) => {
                for a in 0..self.num_actions {
                    self.cells[row + a] += loss.value(Action(a));
                }
            }
        }
        Ok(())
    }

    /// Adds `value` to one cell. The caller guarantees indices are in range.
    pub fn add_at(&mut self, context: Context, action: Action, value: f64) {
        self.cells[context.index() * self.num_actions + action.index()] += value;
    }

    /// Elementwise sum with another table of the same shape.
    pub fn merge(&mut self, other: &LossTable) {
        assert_eq!(self.cells.len(), other.cells.len(), "loss table shape mismatch");
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a += b;
        }
    }

    pub fn policy_loss(&self, class: &PolicyClass, policy: usize) -> f64 {
        class
            .policy(policy)
            .iter()
            .enumerate()
            .map(|(x, a)| self.cells[x * self.num_actions + a.index()])
            .sum()
    }
}

// ── Oracle ──────────────────────────────────────────────────────────────

/// Counts oracle invocations.
#[derive(Debug, Default)]
pub struct OracleStats {
    calls: AtomicU64,
}

impl OracleStats {
    pub fn record(&self) {
        self.calls.fetch_add(1, Ordering::Relaxed);
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

/// Returns the minimum cumulative loss over a policy class.
pub trait ValueOracle {
    fn num_actions(&self) -> usize;

    fn universe(&self) -> usize;

    fn num_policies(&self) -> usize;

    /// `min_π Σ_x table[x, π(x)]`. One call.
    fn value(&self, losses: &LossTable) -> Result<f64>;

    fn stats(&self) -> &OracleStats;

    /// `min_π Σ_τ loss_τ(π(x_τ))` over an example sequence. One call.
    fn value_of_examples(&self, examples: &[WeightedExample]) -> Result<f64> {
        let table = LossTable::from_examples(self.universe(), self.num_actions(), examples)?;
        self.value(&table)
    }

    fn calls(&self) -> u64 {
        self.stats().calls()
    }
}

impl<T: ValueOracle + ?Sized> ValueOracle for &T {
    fn num_actions(&self) -> usize {
        (**self).num_actions()
    }

    fn universe(&self) -> usize {
        (**self).universe()
    }

    fn num_policies(&self) -> usize {
        (**self).num_policies()
    }

    fn value(&self, losses: &LossTable) -> Result<f64> {
        (**self).value(losses)
    }

    fn stats(&self) -> &OracleStats {
        (**self).stats()
    }
}

/// Exact oracle: enumerates every policy in the table.
#[derive(Debug)]
pub struct EnumerationOracle {
    class: Arc<PolicyClass>,
    stats: OracleStats,
}

impl EnumerationOracle {
    pub fn new(class: Arc<PolicyClass>) -> Self {
        Self {
            class,
            stats: OracleStats::default(),
        }
    }

    pub fn class(&self) -> &PolicyClass {
        &self.class
    }
}

impl ValueOracle for EnumerationOracle {
    fn num_actions(&self) -> usize {
        self.class.num_actions()
    }

    fn universe(&self) -> usize {
        self.class.universe()
    }

    fn num_policies(&self) -> usize {
        self.class.len()
    }

    fn value(&self, losses: &LossTable) -> Result<f64> {
        if losses.universe() != self.class.universe()
            || losses.num_actions() != self.class.num_actions()
        {
            return Err(Error::domain(format!(
                "loss table is {}x{}, policy class expects {}x{}",
                losses.universe(),
                losses.num_actions(),
                self.class.universe(),
                self.class.num_actions()
            )));
        }
        if self.class.is_empty() {
            return Err(Error::domain("empty policy class"));
        }
        self.stats.record();
        Ok((0..self.class.len())
            .map(|p| losses.policy_loss(&self.class, p))
            .fold(f64::INFINITY, f64::min))
    }

    fn stats(&self) -> &OracleStats {
        &self.stats
    }
}

/// `min_π Σ_t c_t(π(x_t))` by direct enumeration; the regret comparator.
/// Does not go through (or count against) any oracle.
pub fn best_policy_loss(
    class: &PolicyClass,
    contexts: &[Context],
    costs: &[CostVector],
) -> Result<f64> {
    if contexts.len() != costs.len() {
        return Err(Error::domain(format!(
            "{} contexts but {} cost vectors",
            contexts.len(),
            costs.len()
        )));
    }
    if let Some(x) = contexts.iter().find(|x| !class.contains_context(**x)) {
        return Err(Error::domain(format!("context {} outside the policy universe", x.0)));
    }
    if let Some(c) = costs.iter().find(|c| c.len() != class.num_actions()) {
        return Err(Error::domain(format!(
            "cost vector of length {} for K = {}",
            c.len(),
            class.num_actions()
        )));
    }
    Ok((0..class.len())
        .map(|p| {
            contexts
                .iter()
                .zip(costs)
                .map(|(x, c)| c.get(class.action(p, *x)))
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min))
}
