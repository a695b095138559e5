//! Update/hold schedules, the forecasting online RL loop and regret traces.

mod forl;
mod schedule;
mod trace;

pub use forl::{run_forl, ForecastConfig, ForlConfig, QSource};
pub use schedule::{
    schedule_diagnostic, schedule_from_blocks, validate_schedule, Phase, ScheduleEntry, SchedulePolicyParams,
    UpdateSchedule,
};
pub use trace::{decompose_regret, dynamic_regret, IntervalRecord, IntervalRegret, RegretTrace, TickRecord};
