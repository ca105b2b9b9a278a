//! Gap computation, sweeps over system grids, regime classification, curve
//! data and worked examples.

pub mod case_study;
pub mod curve;
pub mod gap;
pub mod regime;
pub mod sweep;
pub mod verify;

pub use case_study::{case_study, IdentityCheck, Preset};
pub use curve::{curve, CurveData, CurveRow};
pub use gap::{gap_at, gap_record, GapRecord};
pub use regime::{classify_regime, regime_boundaries, regime_classify, RegimeConstants, RegimeFamily, RegimeLabel};
pub use sweep::{m_grid, summarize, sweep, sweep_records, CheckStatus, DemandCount, SweepGrid, SweepResult, SweepSummary};
pub use verify::{verify, CheckOutcome, VerifyLevel, VerifyReport};
