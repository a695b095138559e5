use crate::{Error, Result};

/// One `(t_m, G_m, N_m)` triple: `G_m` update ticks from `t_m`, then `N_m` hold ticks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub t: usize,
    pub g: usize,
    pub n: usize,
}

impl ScheduleEntry {
    pub fn end(&self) -> usize {
        self.t + self.g + self.n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Update,
    Hold,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Update => "update",
            Phase::Hold => "hold",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UpdateSchedule {
    pub entries: Vec<ScheduleEntry>,
}

impl UpdateSchedule {
    pub fn from_triples(triples: &[(usize, usize, usize)]) -> Self {
        UpdateSchedule { entries: triples.iter().map(|&(t, g, n)| ScheduleEntry { t, g, n }).collect() }
    }

    /// `t_M + G_M + N_M`, or 0 for an empty schedule.
    pub fn end(&self) -> usize {
        self.entries.last().map_or(0, ScheduleEntry::end)
    }

    /// The 0-based interval index and phase of tick `t`.
    pub fn locate(&self, t: usize) -> Option<(usize, Phase)> {
        let m = self.entries.partition_point(|e| e.t <= t).checked_sub(1)?;
        let e = &self.entries[m];
        if t < e.t + e.g {
            Some((m, Phase::Update))
        } else if t < e.end() {
            Some((m, Phase::Hold))
        } else {
            None
        }
    }
}

/// Block schedule with block length `l_f` and update fraction `γ_f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchedulePolicyParams {
    pub block_len: usize,
    pub update_fraction: f64,
}

/// `t_m = l_f (m - 1)`, `G_m = ⌊l_f γ_f⌋`, `N_m = l_f - G_m`. A final partial
/// block is truncated at `T`, keeping its update ticks first.
pub fn schedule_from_blocks(params: &SchedulePolicyParams, total_time: usize) -> Result<UpdateSchedule> {
    let SchedulePolicyParams { block_len, update_fraction } = *params;
    if block_len == 0 {
        return Err(Error::arg("block length must be positive"));
    }
    if !(update_fraction > 0.0 && update_fraction <= 1.0) {
        return Err(Error::arg(format!("update fraction {update_fraction} outside (0, 1]")));
    }
    let g = ((block_len as f64 * update_fraction).floor() as usize).min(block_len);
    let entries = (0..total_time)
        .step_by(block_len)
        .map(|t| {
            let len = block_len.min(total_time - t);
            let g = g.min(len);
            ScheduleEntry { t, g, n: len - g }
        })
        .collect();
    Ok(UpdateSchedule { entries })
}

/// `None` when the schedule is valid for horizon `T`, otherwise what is wrong.
pub fn schedule_diagnostic(schedule: &UpdateSchedule, total_time: usize) -> Option<String> {
    let first = match schedule.entries.first() {
        None => return Some("schedule has no entries".into()),
        Some(e) => e,
    };
    if first.t != 0 {
        return Some(format!("first update time is {}, expected 0", first.t));
    }
    for (m, w) in schedule.entries.windows(2).enumerate() {
        if w[1].t != w[0].end() {
            return Some(format!("entry {} starts at {} but entry {} ends at {}", m + 2, w[1].t, m + 1, w[0].end()));
        }
    }
    if let Some(m) = schedule.entries.iter().position(|e| e.g + e.n == 0) {
        return Some(format!("entry {} is empty", m + 1));
    }
    if schedule.end() > total_time {
        return Some(format!("schedule ends at {} beyond T = {total_time}", schedule.end()));
    }
    None
}

pub fn validate_schedule(schedule: &UpdateSchedule, total_time: usize) -> bool {
    schedule_diagnostic(schedule, total_time).is_none()
}
