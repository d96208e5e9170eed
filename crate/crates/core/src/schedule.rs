//! Noise schedules beta(t) with closed-form integrals Lambda(t).

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ScheduleKind {
    /// beta(t) = beta.
    Constant { beta: f64 },
    /// beta(t) = beta0 + (beta1 - beta0) t / T.
    Linear { beta0: f64, beta1: f64 },
    /// beta(t) = beta_min + (beta_max - beta_min) (1 - cos(pi t / T)) / 2.
    Cosine { beta_min: f64, beta_max: f64 },
}

/// A noise rate on [0, T] with strictly increasing integral Lambda.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schedule {
    kind: ScheduleKind,
    horizon: f64,
}

impl Schedule {
    pub fn constant(beta: f64, horizon: f64) -> Result<Self> {
        if beta <= 0.0 {
            return Err(Error::Config("beta must be positive".into()));
        }
        Self::checked(ScheduleKind::Constant { beta }, horizon)
    }

    /// beta0 = 0 is allowed (the rate may vanish at t = 0 only).
    pub fn linear(beta0: f64, beta1: f64, horizon: f64) -> Result<Self> {
        if beta0 < 0.0 || beta1 <= 0.0 {
            return Err(Error::Config("beta must be positive".into()));
        }
        Self::checked(ScheduleKind::Linear { beta0, beta1 }, horizon)
    }

    pub fn cosine(beta_min: f64, beta_max: f64, horizon: f64) -> Result<Self> {
        if beta_min <= 0.0 || beta_max < beta_min {
            return Err(Error::Config(
                "cosine schedule needs 0 < beta_min <= beta_max".into(),
            ));
        }
        Self::checked(ScheduleKind::Cosine { beta_min, beta_max }, horizon)
    }

    fn checked(kind: ScheduleKind, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
        }
        Ok(Self { kind, horizon })
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// beta(t); callers must keep t within [0, T].
    pub fn beta(&self, t: f64) -> f64 {
        match self.kind {
            ScheduleKind::Constant { beta } => beta,
            ScheduleKind::Linear { beta0, beta1 } => beta0 + (beta1 - beta0) * t / self.horizon,
            ScheduleKind::Cosine { beta_min, beta_max } => {
                let phase = std::f64::consts::PI * t / self.horizon;
                beta_min + 0.5 * (beta_max - beta_min) * (1.0 - phase.cos())
            }
        }
    }

    /// Lambda(t) = integral of beta over [0, t], in closed form.
    pub fn lambda(&self, t: f64) -> f64 {
        match self.kind {
            ScheduleKind::Constant { beta } => beta * t,
            ScheduleKind::Linear { beta0, beta1 } => {
                beta0 * t + 0.5 * (beta1 - beta0) * t * t / self.horizon
            }
            ScheduleKind::Cosine { beta_min, beta_max } => {
                let t_over = self.horizon / std::f64::consts::PI;
                let phase = std::f64::consts::PI * t / self.horizon;
                beta_min * t + 0.5 * (beta_max - beta_min) * (t - t_over * phase.sin())
            }
        }
    }

    pub fn lambda_total(&self) -> f64 {
        self.lambda(self.horizon)
    }

    /// (beta(t), Lambda(t)); errors when t lies outside [0, T].
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.horizon * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::TimeOutOfRange { t, horizon: self.horizon });
        }
        Ok((self.beta(t), self.lambda(t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_schedule() {
        let s = Schedule::constant(1.0, 2.0).unwrap();
        let t = 2.0f64.ln();
        let (b, l) = s.eval(t).unwrap();
        assert_eq!(b, 1.0);
        assert!((l - t).abs() < 1e-15);
        let (b0, l0) = s.eval(0.0).unwrap();
        assert_eq!((b0, l0), (1.0, 0.0));
    }

    #[test]
    fn linear_schedule_beta_equals_t() {
        // beta(t) = t on [0, 2]: Lambda(2) = 2.
        let s = Schedule::linear(0.0, 2.0, 2.0).unwrap();
        let (b, l) = s.eval(2.0).unwrap();
        assert!((b - 2.0).abs() < 1e-15);
        assert!((l - 2.0).abs() < 1e-15);
        assert!((s.lambda(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cosine_schedule_monotone_lambda() {
        let s = Schedule::cosine(0.1, 2.0, 3.0).unwrap();
        let mut prev = 0.0;
        for i in 1..=30 {
            let l = s.lambda(3.0 * i as f64 / 30.0);
            assert!(l > prev);
            prev = l;
        }
        // Lambda(T) = (beta_min + beta_max) T / 2 for the half-cosine ramp.
        assert!((s.lambda_total() - 0.5 * (0.1 + 2.0) * 3.0).abs() < 1e-12);
    }

    #[test]
    fn eval_rejects_out_of_range() {
        let s = Schedule::constant(1.0, 1.0).unwrap();
        assert!(matches!(s.eval(-0.1), Err(Error::TimeOutOfRange { .. })));
        assert!(matches!(s.eval(1.5), Err(Error::TimeOutOfRange { .. })));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Schedule::constant(-1.0, 1.0).is_err());
        assert!(Schedule::constant(0.0, 1.0).is_err());
        assert!(Schedule::constant(1.0, 0.0).is_err());
        assert!(Schedule::linear(-0.1, 1.0, 1.0).is_err());
        assert!(Schedule::cosine(0.0, 1.0, 1.0).is_err());
    }
}
