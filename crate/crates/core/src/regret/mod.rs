//! Reward sequences, run ledgers, and exact regret evaluation.

mod adversary;
mod eval;
mod ledger;

pub use adversary::{CustomRewards, IidStochastic, PiecewiseSwitching, RewardSequence, ShortcutAdversary};
pub use eval::{
    brute_force_swap, decomposition_audit, external_regret, prefix_regrets, swap_regret, AuditReport, RegretTracker,
    AUDIT_TOL,
};
pub use ledger::{DayRecord, IntervalRecord, RegretLedger};

#[cfg(test)]
mod tests;
