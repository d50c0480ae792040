//! Oblivious reward sequences. Rewards are specified in the set's reward
//! coordinates, lifted into action coordinates, and scaled so that every
//! realized reward `R_t · M` lies in `[0, 1]`.

use std::io::Read;

use rand::Rng;

use crate::domains::{ActionSet, Domain};
use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng};

pub trait RewardSequence: Send {
    /// The reward vector of day `t` (1-based), in action coordinates.
    fn reward(&mut self, t: u64) -> Result<Vec<f64>>;
}

fn check_unit(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::invalid(format!("{what}: rewards must lie in [0, 1]")));
    }
    Ok(())
}

fn check_len(values: &[f64], set: &ActionSet, what: &str) -> Result<()> {
    if values.len() != set.reward_dim() {
        return Err(Error::invalid(format!(
            "{what}: expected {} reward coordinates, got {}",
            set.reward_dim(),
            values.len()
        )));
    }
    Ok(())
}

/// Lifts and scales `r` so that `max_M r · M ≤ 1`; returns the factor used.
fn lift_scaled(set: &ActionSet, r: &[f64]) -> Result<(Vec<f64>, f64)> {
    let lifted = set.lift_reward(r);
    let best = set.max_value(&lifted)?;
    let scale = if best > 1.0 { 1.0 / best } else { 1.0 };
    Ok((lifted.into_iter().map(|v| v * scale).collect(), scale))
}

/// Independent Bernoulli coordinates, scaled by `1 / max_M ‖M‖₁`.
pub struct IidStochastic {
    means: Vec<f64>,
    scale: f64,
    rng: StreamRng,
    lift: ActionSet,
}

impl IidStochastic {
    pub fn new(set: &ActionSet, means: Vec<f64>, seed: u64) -> Result<Self> {
        check_len(&means, set, "iid means")?;
        check_unit(&means, "iid means")?;
        let ones = vec![1.0; set.dim()];
        let scale = 1.0 / set.max_value(&ones)?.max(1.0);
        Ok(IidStochastic {
            means,
            scale,
            rng: stream(seed, "adversary/iid"),
            lift: set.clone(),
        })
    }
}

impl RewardSequence for IidStochastic {
    fn reward(&mut self, _t: u64) -> Result<Vec<f64>> {
        let raw: Vec<f64> = self
            .means
            .iter()
            .map(|&p| if self.rng.gen::<f64>() < p { self.scale } else { 0.0 })
            .collect();
        Ok(self.lift.lift_reward(&raw))
    }
}

/// Constant reward vectors on `B` equal-length blocks of the horizon.
pub struct PiecewiseSwitching {
    blocks: Vec<Vec<f64>>,
    horizon: u64,
}

impl PiecewiseSwitching {
    pub fn new(set: &ActionSet, blocks: Vec<Vec<f64>>, horizon: u64) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("switching adversary needs at least one block"));
        }
        let mut lifted = Vec::with_capacity(blocks.len());
        for b in &blocks {
            check_len(b, set, "switching block")?;
            check_unit(b, "switching block")?;
            lifted.push(lift_scaled(set, b)?.0);
        }
        Ok(PiecewiseSwitching {
            blocks: lifted,
            horizon: horizon.max(1),
        })
    }

    /// Block index of day `t`.
    pub fn block_of(&self, t: u64) -> usize {
        let b = self.blocks.len() as u64;
        (((t.max(1) - 1) * b / self.horizon).min(b - 1)) as usize
    }
}

impl RewardSequence for PiecewiseSwitching {
    fn reward(&mut self, t: u64) -> Result<Vec<f64>> {
        Ok(self.blocks[self.block_of(t)].clone())
    }
}

/// Reward 1 on the shortcut edge of the shortcut DAG every day.
pub struct ShortcutAdversary {
    r: Vec<f64>,
}

impl ShortcutAdversary {
    /// `set` must be the (possibly leveled) shortcut DAG with `n` ladder rungs.
    pub fn new(set: &ActionSet, n: usize) -> Result<Self> {
        let ok = match set.domain() {
            Domain::DagPaths(lv) => lv.original_dim == 4 * n + 1 && lv.original_of.contains(&Some(0)),
            _ => false,
        };
        if !ok {
            return Err(Error::invalid("shortcut adversary needs the shortcut DAG with matching n"));
        }
        let mut raw = vec![0.0; 4 * n + 1];
        raw[0] = 1.0;
        Ok(ShortcutAdversary { r: set.lift_reward(&raw) })
    }
}

impl RewardSequence for ShortcutAdversary {
    fn reward(&mut self, _t: u64) -> Result<Vec<f64>> {
        Ok(self.r.clone())
    }
}

/// Rewards read from a CSV file: one row per day, one column per reward
/// coordinate, no header.
pub struct CustomRewards {
    rows: Vec<Vec<f64>>,
    scale: f64,
}

impl CustomRewards {
    pub fn from_reader(set: &ActionSet, reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut raw = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::invalid(format!("reward file row {}: {e}", i + 1)))?;
            let row: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let row = row.map_err(|e| Error::invalid(format!("reward file row {}: {e}", i + 1)))?;
            check_len(&row, set, &format!("reward file row {}", i + 1))?;
            check_unit(&row, &format!("reward file row {}", i + 1))?;
            raw.push(set.lift_reward(&row));
        }
        if raw.is_empty() {
            return Err(Error::invalid("reward file has no rows"));
        }
        let mut best: f64 = 0.0;
        for r in &raw {
            best = best.max(set.max_value(r)?);
        }
        let scale = if best > 1.0 { 1.0 / best } else { 1.0 };
        if scale != 1.0 {
            log::info!("reward file rescaled by {scale} so realized rewards stay in [0, 1]");
        }
        let rows = raw
            .into_iter()
            .map(|r| r.into_iter().map(|v| v * scale).collect())
            .collect();
        Ok(CustomRewards { rows, scale })
    }

    /// Factor applied to every reward.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

impl RewardSequence for CustomRewards {
    fn reward(&mut self, t: u64) -> Result<Vec<f64>> {
        self.rows
            .get((t.max(1) - 1) as usize)
            .cloned()
            .ok_or_else(|| Error::invalid(format!("reward file has {} rows, day {t} requested", self.rows.len())))
    }
}
