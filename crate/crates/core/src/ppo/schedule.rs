use serde::{Deserialize, Serialize};

/// Actor learning-rate schedule over environment timesteps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LrSchedule {
    Fixed {
        lr: f64,
    },
    /// `lr_t = (start − end) / 2^(t / half_life) + end`
    ExpDecay {
        start: f64,
        end: f64,
        half_life: f64,
    },
}

impl LrSchedule {
    pub fn lr_at(&self, t: u64) -> f64 {
        match *self {
            LrSchedule::Fixed { lr } => lr,
            LrSchedule::ExpDecay { start, end, half_life } => (start - end) / 2f64.powf(t as f64 / half_life) + end,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let ok = match *self {
            LrSchedule::Fixed { lr } => lr.is_finite() && lr >= 0.0,
            LrSchedule::ExpDecay { start, end, half_life } => {
                start.is_finite() && end.is_finite() && end >= 0.0 && half_life.is_finite() && half_life > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(format!("invalid learning-rate schedule {self:?}"))
        }
    }
}
