//! Comparison settings: parameter-shared ablations, fixed wiring, and the
//! SymLA baseline.

pub mod symla;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::ArchConfig;
use crate::model::{ModelSpec, Wiring};

pub use symla::{SymlaConfig, SymlaNet, SymlaParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Standard,
    SingleType,
    FullyConnected,
    FixedAdjacency,
    Symla,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSpec {
    pub kind: VariantKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_adjacency_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symla: Option<SymlaConfig>,
}

impl Default for VariantSpec {
    fn default() -> Self {
        Self::new(VariantKind::Standard)
    }
}

impl VariantSpec {
    pub fn new(kind: VariantKind) -> Self {
        Self {
            kind,
            fixed_adjacency_seed: None,
            symla: None,
        }
    }

    pub fn fixed(seed: u64) -> Self {
        Self {
            kind: VariantKind::FixedAdjacency,
            fixed_adjacency_seed: Some(seed),
            symla: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.fixed_adjacency_seed) {
            (VariantKind::FixedAdjacency, None) => Err(Error::Config(
                "variant fixed_adjacency requires fixed_adjacency_seed".into(),
            )),
            (VariantKind::FixedAdjacency, Some(_)) => Ok(()),
            (_, Some(_)) => Err(Error::Config(
                "fixed_adjacency_seed is only valid for the fixed_adjacency variant".into(),
            )),
            _ => Ok(()),
        }?;
        if self.symla.is_some() && self.kind != VariantKind::Symla {
            return Err(Error::Config(
                "symla settings are only valid for the symla variant".into(),
            ));
        }
        Ok(())
    }
}

/// What a variant resolves to: the model layout and the wiring rule for lifetimes.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveConfig {
    pub model: ModelSpec,
    pub wiring: Wiring,
}

pub fn apply_variant(variant: &VariantSpec, base: &ArchConfig) -> Result<EffectiveConfig> {
    variant.validate()?;
    base.validate()?;
    let arch = base.clone();
    let (model, wiring) = match variant.kind {
        VariantKind::Standard => (ModelSpec::Sfnn(arch), Wiring::PerLifetime),
        VariantKind::SingleType => (
            ModelSpec::Sfnn(ArchConfig {
                n_neuron_types: 1,
                n_synapse_types: 1,
                ..arch
            }),
            Wiring::PerLifetime,
        ),
        VariantKind::FullyConnected => (
            ModelSpec::Sfnn(ArchConfig {
                sparsity: 0.0,
                ..arch
            }),
            Wiring::PerLifetime,
        ),
        VariantKind::FixedAdjacency => (
            ModelSpec::Sfnn(arch),
            Wiring::Fixed(variant.fixed_adjacency_seed.expect("validated")),
        ),
        VariantKind::Symla => (
            ModelSpec::Symla(variant.symla.clone().unwrap_or_default()),
            Wiring::PerLifetime,
        ),
    };
    Ok(EffectiveConfig { model, wiring })
}
