//! Least-squares extrapolation of Q tables over time.
//!
//! Each `(s, a)` entry is fitted independently as `Q_t(s,a) ≈ φ(t)ᵀ w(s,a)`
//! over the last `l_p` snapshots. Times are shifted to the newest snapshot and
//! divided by the window span before evaluating `φ`, which keeps the normal
//! equations well conditioned for large tick values; the fitted function of
//! `t` is unchanged by this reparametrisation for the polynomial bases here.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::mdp::QTable;
use crate::{fmt_f64, Error, Result};

/// Ridge term added to `ΦᵀΦ` when it is singular.
pub const RIDGE_LAMBDA: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// `[x, 1]`
    Identity,
    /// `[x^d, .., x, 1]`
    Polynomial(usize),
    /// `[1]`
    Constant,
}

impl Basis {
    pub fn dim(self) -> usize {
        match self {
            Basis::Identity => 2,
            Basis::Polynomial(d) => d + 1,
            Basis::Constant => 1,
        }
    }

    fn degree(self) -> usize {
        self.dim() - 1
    }

    pub fn features(self, x: f64) -> Vec<f64> {
        (0..=self.degree()).rev().map(|k| x.powi(k as i32)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForecastModel {
    pub basis: Basis,
    pub window: usize,
    /// Times of the snapshots the model was fitted on.
    pub fitted_times: Vec<f64>,
    num_states: usize,
    num_actions: usize,
    origin: f64,
    scale: f64,
    /// Row-major `(s, a)` blocks of `basis.dim()` weights, in normalised time.
    weights: Vec<f64>,
}

impl ForecastModel {
    pub fn weights(&self, s: usize, a: usize) -> &[f64] {
        let d = self.basis.dim();
        let i = (s * self.num_actions + a) * d;
        &self.weights[i..i + d]
    }

    fn normalise(&self, t: f64) -> f64 {
        (t - self.origin) / self.scale
    }

    /// `s,a,w_0..w_{d-1}` rows, one per state-action pair.
    pub fn to_csv(&self) -> String {
        let d = self.basis.dim();
        let mut out = String::from("s,a");
        for j in 0..d {
            let _ = write!(out, ",w_{j}");
        }
        out.push('\n');
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                let _ = write!(out, "{s},{a}");
                for w in self.weights(s, a) {
                    let _ = write!(out, ",{}", fmt_f64(*w));
                }
                out.push('\n');
            }
        }
        out
    }
}

fn window_frame(times: &[f64]) -> (f64, f64) {
    let origin = *times.last().unwrap();
    let span = origin - times[0];
    (origin, if span > 0.0 { span } else { 1.0 })
}

fn design(basis: Basis, xs: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(xs.len(), basis.dim(), |i, j| basis.features(xs[i])[j])
}

/// `(ΦᵀΦ)⁻¹`, falling back to `(ΦᵀΦ + λI)⁻¹` when the window cannot determine
/// all `d` coefficients.
fn gram_inverse(phi: &DMatrix<f64>, xs: &[f64]) -> DMatrix<f64> {
    let d = phi.ncols();
    let gram = phi.transpose() * phi;
    let mut distinct = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() >= d {
        if let Some(ch) = gram.clone().cholesky() {
            return ch.inverse();
        }
    }
    let ridged = gram + DMatrix::identity(d, d) * RIDGE_LAMBDA;
    ridged.cholesky().expect("ridged Gram matrix is positive definite").inverse()
}

fn check_history(history: &[(f64, QTable)], window: usize) -> Result<()> {
    if window == 0 {
        return Err(Error::arg("forecast window must be positive"));
    }
    if history.len() < window {
        return Err(Error::arg(format!("history has {} snapshots, window needs {window}", history.len())));
    }
    if history.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::arg("snapshot times must be strictly increasing"));
    }
    let first = &history[0].1;
    if history.iter().any(|(_, q)| !q.same_shape(first)) {
        return Err(Error::arg("snapshots disagree in shape"));
    }
    Ok(())
}

/// Fits the model on the last `window` snapshots of `history`.
pub fn fit_forecaster(history: &[(f64, QTable)], basis: Basis, window: usize) -> Result<ForecastModel> {
    check_history(history, window)?;
    let recent = &history[history.len() - window..];
    let times: Vec<f64> = recent.iter().map(|(t, _)| *t).collect();
    let (origin, scale) = window_frame(&times);
    let xs: Vec<f64> = times.iter().map(|t| (t - origin) / scale).collect();
    let phi = design(basis, &xs);
    let solve = gram_inverse(&phi, &xs) * phi.transpose();

    let (ns, na) = (recent[0].1.num_states(), recent[0].1.num_actions());
    let targets = DMatrix::from_fn(window, ns * na, |i, k| recent[i].1.values()[k]);
    let w = solve * targets;
    let weights = (0..ns * na).flat_map(|k| w.column(k).iter().copied().collect::<Vec<_>>()).collect();
    Ok(ForecastModel { basis, window, fitted_times: times, num_states: ns, num_actions: na, origin, scale, weights })
}

/// `Q̃(s,a) = φ(t_target)ᵀ w(s,a)`.
pub fn forecast_q(model: &ForecastModel, t_target: f64) -> QTable {
    let phi = model.basis.features(model.normalise(t_target));
    let values = (0..model.num_states * model.num_actions)
        .map(|k| {
            let w = &model.weights[k * phi.len()..(k + 1) * phi.len()];
            w.iter().zip(&phi).map(|(w, p)| w * p).sum()
        })
        .collect();
    QTable::from_vec(model.num_states, model.num_actions, values).expect("forecast of finite snapshots is finite")
}

/// The weights `c = Φ (ΦᵀΦ)⁻¹ φ(t_target)` for which the least-squares
/// forecast equals `Σ_i c_i Q_{t_i}`.
pub fn combination_weights(times: &[f64], basis: Basis, t_target: f64) -> Result<Vec<f64>> {
    if times.is_empty() {
        return Err(Error::arg("no snapshot times"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg("snapshot times must be strictly increasing"));
    }
    let (origin, scale) = window_frame(times);
    let xs: Vec<f64> = times.iter().map(|t| (t - origin) / scale).collect();
    let phi = design(basis, &xs);
    let target = DVector::from_vec(basis.features((t_target - origin) / scale));
    let c = &phi * (gram_inverse(&phi, &xs) * target);
    Ok(c.iter().copied().collect())
}

/// `Σ_i w_i Q_i`.
pub fn linear_combination_forecast(history: &[QTable], w: &[f64]) -> Result<QTable> {
    if history.len() != w.len() || history.is_empty() {
        return Err(Error::arg(format!("{} tables but {} weights", history.len(), w.len())));
    }
    let first = &history[0];
    if history.iter().any(|q| !q.same_shape(first)) {
        return Err(Error::arg("tables disagree in shape"));
    }
    let mut values = vec![0.0; first.values().len()];
    for (q, wi) in history.iter().zip(w) {
        values.iter_mut().zip(q.values()).for_each(|(v, x)| *v += wi * x);
    }
    QTable::from_vec(first.num_states(), first.num_actions(), values)
}
