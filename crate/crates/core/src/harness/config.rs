//! Experiment config: JSON parsing and field-level validation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::environment::{AdversarySpec, ContextDistribution, MAX_UNIVERSE};
use crate::error::{Error, FieldError, Result};
use crate::policy::PolicyClass;
use crate::rng::{self, Consumer};
use crate::types::{SIMPLEX_TOLERANCE, MAX_ACTIONS};

pub const MAX_HORIZON: usize = 1_000_000;
pub const MAX_POLICIES: usize = 100_000;
pub const MAX_REPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    #[default]
    Relax,
    Exp4,
    Uniform,
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LearnerKind::Relax => "relax",
            LearnerKind::Exp4 => "exp4",
            LearnerKind::Uniform => "uniform",
        })
    }
}

impl std::str::FromStr for LearnerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "relax" => Ok(LearnerKind::Relax),
            "exp4" => Ok(LearnerKind::Exp4),
            "uniform" => Ok(LearnerKind::Uniform),
            other => Err(format!("unknown learner {other:?} (expected relax, exp4 or uniform)")),
        }
    }
}

/// `L`: a number, or `"auto"` for horizon-based tuning.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ScaleSetting {
    #[default]
    Auto,
    Fixed(f64),
}

impl Serialize for ScaleSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ScaleSetting::Auto => s.serialize_str("auto"),
            ScaleSetting::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for ScaleSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ScaleSetting::Fixed(v)),
            Raw::Str(s) if s == "auto" => Ok(ScaleSetting::Auto),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "L must be a number or \"auto\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PolicyClassSpec {
    /// Random table of `N` policies over `U` contexts.
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(rename = "N")]
        num_policies: usize,
        #[serde(rename = "U")]
        universe: usize,
        #[serde(rename = "K")]
        num_actions: usize,
    },
    /// One row per policy, one zero-based action per context.
    Explicit { table: Vec<Vec<usize>> },
    /// Constant and single-threshold policies over `U` contexts.
    Threshold {
        #[serde(rename = "U")]
        universe: usize,
        #[serde(rename = "K")]
        num_actions: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    #[serde(rename = "U")]
    pub universe: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<bool>,
    /// Pins the context sequence across replications.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    StochasticGap,
    Drifting,
    PolicyTargeted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversaryConfig {
    #[serde(rename = "type")]
    pub kind: AdversaryKind,
    #[serde(default, alias = "Δ", skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    /// Pins the cost schedule across replications.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSpec {
    pub context: ContextSpec,
    pub adversary: AdversaryConfig,
    #[serde(default)]
    pub transductive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "K")]
    pub num_actions: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "L", default)]
    pub scale: ScaleSetting,
    #[serde(default)]
    pub learner: LearnerKind,
    #[serde(rename = "policyClass")]
    pub policy_class: PolicyClassSpec,
    pub environment: EnvironmentSpec,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Multiplier on Exp4's exploration rate.
    #[serde(rename = "exp4GammaScale", default, skip_serializing_if = "Option::is_none")]
    pub exp4_gamma_scale: Option<f64>,
}

fn default_reps() -> usize {
    1
}

impl ExperimentConfig {
    /// Parses and validates.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(s)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self> {
        let config: Self = serde_json::from_slice(bytes)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn exp4_gamma_scale(&self) -> f64 {
        self.exp4_gamma_scale.unwrap_or(1.0)
    }

    /// Checks every field, reporting all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let k = self.num_actions;
        if !(2..=MAX_ACTIONS).contains(&k) {
            errs.push(FieldError::new("K", format!("must be in 2..={MAX_ACTIONS}, got {k}")));
        }
        if !(1..=MAX_HORIZON).contains(&self.horizon) {
            errs.push(FieldError::new(
                "T",
                format!("must be in 1..={MAX_HORIZON}, got {}", self.horizon),
            ));
        }
        if !(1..=MAX_REPS).contains(&self.reps) {
            errs.push(FieldError::new("reps", format!("must be in 1..={MAX_REPS}, got {}", self.reps)));
        }
        if let ScaleSetting::Fixed(l) = self.scale {
            if !l.is_finite() || l < k as f64 {
                errs.push(FieldError::new("L", format!("must be \"auto\" or a number >= K = {k}, got {l}")));
            }
        }
        if let Some(g) = self.exp4_gamma_scale {
            if !g.is_finite() || g < 0.0 {
                errs.push(FieldError::new("exp4GammaScale", "must be a non-negative number"));
            }
        }

        let universe = self.environment.context.universe;
        if !(1..=MAX_UNIVERSE).contains(&universe) {
            errs.push(FieldError::new(
                "environment.context.U",
                format!("must be in 1..={MAX_UNIVERSE}, got {universe}"),
            ));
        }
        self.validate_context(&mut errs);
        self.validate_adversary(&mut errs);
        let n = self.validate_policy_class(universe, &mut errs);

        if self.learner == LearnerKind::Relax && self.scale == ScaleSetting::Auto && n == Some(1) {
            errs.push(FieldError::new("L", "\"auto\" needs at least two policies (ln N > 0)"));
        }
        if self.environment.transductive && self.learner != LearnerKind::Relax {
            errs.push(FieldError::new(
                "environment.transductive",
                "only the relax learner uses the known context sequence",
            ));
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    fn validate_context(&self, errs: &mut Vec<FieldError>) {
        let ctx = &self.environment.context;
        match (&ctx.probs, ctx.uniform) {
            (Some(_), Some(true)) => errs.push(FieldError::new(
                "environment.context",
                "give either probs or uniform: true, not both",
            )),
            (None, Some(false)) => errs.push(FieldError::new(
                "environment.context.probs",
                "required when uniform is false",
            )),
            _ => {}
        }
        if let Some(probs) = &ctx.probs {
            if probs.len() != ctx.universe {
                errs.push(FieldError::new(
                    "environment.context.probs",
                    format!("has {} entries, expected U = {}", probs.len(), ctx.universe),
                ));
            } else if probs.iter().any(|p| !p.is_finite() || *p < 0.0)
                || (probs.iter().sum::<f64>() - 1.0).abs() > SIMPLEX_TOLERANCE
            {
                errs.push(FieldError::new(
                    "environment.context.probs",
                    "must be non-negative and sum to 1",
                ));
            }
        }
    }

    fn validate_adversary(&self, errs: &mut Vec<FieldError>) {
        let adv = &self.environment.adversary;
        let needs_delta = matches!(adv.kind, AdversaryKind::StochasticGap | AdversaryKind::PolicyTargeted);
        let needs_period = matches!(adv.kind, AdversaryKind::Drifting | AdversaryKind::PolicyTargeted);
        match adv.delta {
            None if needs_delta => errs.push(FieldError::new(
                "environment.adversary.delta",
                "required for this adversary type",
            )),
            Some(d) if !(0.0..=1.0).contains(&d) => errs.push(FieldError::new(
                "environment.adversary.delta",
                format!("must be in [0, 1], got {d}"),
            )),
            _ => {}
        }
        match adv.period {
            None if needs_period => errs.push(FieldError::new(
                "environment.adversary.period",
                "required for this adversary type",
            )),
            Some(0) => errs.push(FieldError::new("environment.adversary.period", "must be at least 1")),
            _ => {}
        }
    }

    /// Returns `N` when the spec is well-formed.
    fn validate_policy_class(&self, universe: usize, errs: &mut Vec<FieldError>) -> Option<usize> {
        let k = self.num_actions;
        match &self.policy_class {
            PolicyClassSpec::Table {
                num_policies,
                universe: u,
                num_actions,
                ..
            } => {
                let before = errs.len();
                if *num_actions != k {
                    errs.push(FieldError::new("policyClass.K", format!("{num_actions} differs from K = {k}")));
                }
                if *u != universe {
                    errs.push(FieldError::new(
                        "policyClass.U",
                        format!("{u} differs from environment.context.U = {universe}"),
                    ));
                }
                if !(1..=MAX_POLICIES).contains(num_policies) {
                    errs.push(FieldError::new("policyClass.N", format!("must be in 1..={MAX_POLICIES}")));
                } else if num_policies.saturating_mul(*u) < k {
                    errs.push(FieldError::new("policyClass.N", "N * U table cells cannot cover every action"));
                }
                (errs.len() == before).then_some(*num_policies)
            }
            PolicyClassSpec::Explicit { table } => {
                let before = errs.len();
                if table.is_empty() || table.len() > MAX_POLICIES {
                    errs.push(FieldError::new(
                        "policyClass.table",
                        format!("must list 1..={MAX_POLICIES} policies"),
                    ));
                }
                for (p, row) in table.iter().enumerate() {
                    if row.len() != universe {
                        errs.push(FieldError::new(
                            format!("policyClass.table[{p}]"),
                            format!("has {} entries, expected U = {universe}", row.len()),
                        ));
                    } else if let Some(a) = row.iter().find(|a| **a >= k) {
                        errs.push(FieldError::new(
                            format!("policyClass.table[{p}]"),
                            format!("action {a} outside 0..{k}"),
                        ));
                    }
                }
                (errs.len() == before).then_some(table.len())
            }
            PolicyClassSpec::Threshold { universe: u, num_actions } => {
                let before = errs.len();
                if *num_actions != k {
                    errs.push(FieldError::new("policyClass.K", format!("{num_actions} differs from K = {k}")));
                }
                if *u != universe {
                    errs.push(FieldError::new(
                        "policyClass.U",
                        format!("{u} differs from environment.context.U = {universe}"),
                    ));
                }
                (errs.len() == before).then(|| k + universe.saturating_sub(1) * k * (k - 1))
            }
        }
    }

    /// Builds the policy class. Random tables without their own seed draw
    /// from the master seed's policy-class stream.
    pub fn build_policy_class(&self) -> Result<Arc<PolicyClass>> {
        let class = match &self.policy_class {
            PolicyClassSpec::Table {
                seed,
                num_policies,
                universe,
                num_actions,
            } => {
                let mut rng = match seed {
                    Some(s) => rng::seeded(*s),
                    None => rng::stream(self.seed, 0, Consumer::PolicyClass),
                };
                PolicyClass::random(*num_policies, *universe, *num_actions, &mut rng)?
            }
            PolicyClassSpec::Explicit { table } => PolicyClass::from_table(self.num_actions, table.clone())?,
            PolicyClassSpec::Threshold { universe, num_actions } => {
                PolicyClass::thresholds(*universe, *num_actions)?
            }
        };
        Ok(Arc::new(class))
    }

    pub fn build_context_distribution(&self) -> Result<ContextDistribution> {
        let ctx = &self.environment.context;
        match &ctx.probs {
            Some(p) => ContextDistribution::new(p.clone()),
            None => ContextDistribution::uniform(ctx.universe),
        }
    }

    pub fn adversary_spec(&self) -> Result<AdversarySpec> {
        let adv = &self.environment.adversary;
        let delta = || {
            adv.delta
                .ok_or_else(|| Error::Config(vec![FieldError::new("environment.adversary.delta", "missing")]))
        };
        let period = || {
            adv.period
                .ok_or_else(|| Error::Config(vec![FieldError::new("environment.adversary.period", "missing")]))
        };
        Ok(match adv.kind {
            AdversaryKind::StochasticGap => AdversarySpec::StochasticGap { gap: delta()? },
            AdversaryKind::Drifting => AdversarySpec::Drifting { period: period()? },
            AdversaryKind::PolicyTargeted => AdversarySpec::PolicyTargeted {
                gap: delta()?,
                period: period()?,
            },
        })
    }
}
