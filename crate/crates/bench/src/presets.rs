//! Named scenarios.

use crate::config::{AdversarySpec, Algorithm, DomainSpec, ExperimentConfig, HSpec, Params, SeedSpec};

pub struct Preset {
    pub name: &'static str,
    pub about: &'static str,
    build: fn() -> ExperimentConfig,
}

impl Preset {
    pub fn config(&self) -> ExperimentConfig {
        (self.build)()
    }
}

fn shortcut(name: &str, algorithm: Algorithm, params: Params) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        algorithm,
        horizons: vec![2000],
        seeds: SeedSpec::Count(50),
        rng: swapcomb_core::rng::RNG_NAME.into(),
        stride: None,
        audit: false,
        domain: DomainSpec::ShortcutDag { n: 8, leveled: true },
        adversary: AdversarySpec::Shortcut,
        params,
    }
}

fn counterexample() -> ExperimentConfig {
    shortcut("counterexample", Algorithm::CombexpReplica, Params::default())
}

fn counterexample_fixed() -> ExperimentConfig {
    shortcut(
        "counterexample-fixed",
        Algorithm::SwapCombcp,
        Params {
            eta_scale: 1000.0,
            ..Params::default()
        },
    )
}

/// Four blocks, each favouring a different pair.
pub fn switching_blocks() -> Vec<Vec<f64>> {
    vec![
        vec![1.0, 1.0, 0.0, 0.0, 0.2, 0.2],
        vec![0.0, 0.2, 1.0, 1.0, 0.0, 0.2],
        vec![0.2, 0.0, 0.2, 0.0, 1.0, 1.0],
        vec![1.0, 0.0, 0.0, 1.0, 0.2, 0.0],
    ]
}

fn trend() -> ExperimentConfig {
    ExperimentConfig {
        name: "trend".into(),
        algorithm: Algorithm::SwapCombcp,
        horizons: vec![1000, 2000, 4000, 8000],
        seeds: SeedSpec::Count(10),
        rng: swapcomb_core::rng::RNG_NAME.into(),
        stride: None,
        audit: false,
        domain: DomainSpec::MSets { d: 6, m: 2 },
        adversary: AdversarySpec::Switching {
            blocks: switching_blocks(),
        },
        params: Params {
            eta_scale: 6.0,
            ..Params::default()
        },
    }
}

fn audit() -> ExperimentConfig {
    ExperimentConfig {
        name: "audit".into(),
        algorithm: Algorithm::SwapCombcp,
        horizons: vec![81],
        seeds: SeedSpec::Count(10),
        rng: swapcomb_core::rng::RNG_NAME.into(),
        stride: Some(1),
        audit: true,
        domain: DomainSpec::MSets { d: 3, m: 2 },
        adversary: AdversarySpec::Iid {
            means: vec![0.9, 0.5, 0.1],
        },
        params: Params {
            h: HSpec::Fixed(3),
            k: Some(3),
            ..Params::default()
        },
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "counterexample",
        about: "CombEXP replica on the shortcut DAG (n=8, T=2000): exploration never finds the shortcut",
        build: counterexample,
    },
    Preset {
        name: "counterexample-fixed",
        about: "swap_combcp on the same instance: spanner exploration finds the shortcut",
        build: counterexample_fixed,
    },
    Preset {
        name: "trend",
        about: "swap_combcp on 2-sets of 6 against a 4-block switching adversary, T = 1k..8k",
        build: trend,
    },
    Preset {
        name: "audit",
        about: "instrumented run on 2-sets of 3 (T=81, H=3, K=3) checking the decomposition bound",
        build: audit,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
