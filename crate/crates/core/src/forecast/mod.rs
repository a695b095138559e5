//! Future-Q forecasting and forecasting-error bounds.

mod error_bounds;
mod least_squares;

pub use error_bounds::{
    compute_u, forecast_error_bound, max_forecast_error_bound, sample_complexity_threshold,
    schedule_satisfies_complexity, ForecastErrorInputs,
};
pub use least_squares::{
    combination_weights, fit_forecaster, forecast_q, linear_combination_forecast, Basis, ForecastModel, RIDGE_LAMBDA,
};
