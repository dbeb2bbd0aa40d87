//! Scaled Conjugate Gradient minimization (Møller, 1993).
//!
//! SCG combines conjugate directions with a model-trust-region scale
//! `lambda` instead of a line search. Curvature along the current direction
//! is estimated by forward-differencing the gradient with step
//! `sigma / |p|`; when the estimate is not positive definite, `lambda` is
//! raised until it is. A comparison parameter (predicted vs actual loss
//! reduction) accepts or rejects each step and adapts `lambda`. The search
//! direction restarts to steepest descent every `n` iterations
//! (`n` = parameter count).
//!
//! Two function/gradient evaluations per iteration, no line search, loss
//! non-increasing over accepted steps.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tunables for [`scg_minimize`]. Defaults follow Møller's published
/// constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScgOptions {
    pub max_iterations: usize,
    /// Terminate when the gradient 2-norm drops below this.
    pub gradient_tolerance: f64,
    /// Terminate when an accepted step changes the loss by less than this.
    pub loss_tolerance: f64,
    /// Initial trust-region scale (Møller's lambda_1).
    pub initial_lambda: f64,
    /// Step used for the directional second-derivative estimate.
    pub sigma: f64,
}

impl Default for ScgOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            gradient_tolerance: 1e-5,
            loss_tolerance: 1e-9,
            initial_lambda: 1e-6,
            sigma: 1e-4,
        }
    }
}

impl ScgOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        for (name, v) in [
            ("gradient_tolerance", self.gradient_tolerance),
            ("loss_tolerance", self.loss_tolerance),
            ("initial_lambda", self.initial_lambda),
            ("sigma", self.sigma),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        if self.initial_lambda == 0.0 || self.sigma == 0.0 {
            return Err(Error::Config("initial_lambda and sigma must be positive".into()));
        }
        Ok(())
    }
}

/// Why the optimizer stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    GradientTolerance,
    LossTolerance,
    MaxIterations,
    /// The trust region collapsed (lambda diverged without progress).
    Stalled,
}

/// Run statistics, including the loss at every accepted step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScgDiagnostics {
    pub iterations: usize,
    pub final_loss: f64,
    pub final_gradient_norm: f64,
    pub reason: StopReason,
    /// Loss sequence: initial value followed by each accepted step.
    pub accepted_losses: Vec<f64>,
}

/// Minimizes `objective` from `theta0`.
///
/// `objective` returns the loss and its gradient at a point. A non-finite
/// loss or gradient anywhere aborts with [`Error::Numerical`] carrying the
/// iteration index.
pub fn scg_minimize<F>(
    mut objective: F,
    theta0: Array1<f64>,
    opts: &ScgOptions,
) -> Result<(Array1<f64>, ScgDiagnostics)>
where
    F: FnMut(&Array1<f64>) -> Result<(f64, Array1<f64>)>,
{
    opts.validate()?;
    let n = theta0.len();
    if n == 0 {
        return Err(Error::Config("empty parameter vector".into()));
    }

    let check = |loss: f64, grad: &Array1<f64>, iteration: usize| -> Result<()> {
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Numerical {
                iteration,
                message: "non-finite loss or gradient".into(),
            });
        }
        Ok(())
    };

    let mut theta = theta0;
    let (mut loss, mut grad) = objective(&theta)?;
    check(loss, &grad, 0)?;

    let mut residual = -grad.clone();
    let mut direction = residual.clone();
    let mut lambda = opts.initial_lambda;
    let mut lambda_bar = 0.0f64;
    let mut success = true;
    let mut raw_curvature = 0.0f64;
    let mut dir_sq = 0.0f64;
    let mut mu = 0.0f64;
    let mut accepted_losses = vec![loss];
    let mut reason = StopReason::MaxIterations;
    let mut iterations = 0;

    if residual.dot(&residual).sqrt() <= opts.gradient_tolerance {
        // Already converged at the starting point.
        let norm = residual.dot(&residual).sqrt();
        return Ok((
            theta,
            ScgDiagnostics {
                iterations: 0,
                final_loss: loss,
                final_gradient_norm: norm,
                reason: StopReason::GradientTolerance,
                accepted_losses,
            },
        ));
    }

    for k in 1..=opts.max_iterations {
        iterations = k;
        if success {
            mu = direction.dot(&residual);
            if mu <= 0.0 {
                // Not a descent direction; restart at steepest descent.
                direction = residual.clone();
                mu = direction.dot(&residual);
            }
            dir_sq = direction.dot(&direction);
            if dir_sq == 0.0 {
                reason = StopReason::GradientTolerance;
                break;
            }
            let sigma_k = opts.sigma / dir_sq.sqrt();
            let probe = &theta + &(sigma_k * &direction);
            let (probe_loss, probe_grad) = objective(&probe)?;
            check(probe_loss, &probe_grad, k)?;
            raw_curvature = direction.dot(&(&probe_grad - &grad)) / sigma_k;
        }

        // Scale the curvature with the trust-region term and force it
        // positive definite if needed.
        let mut curvature = raw_curvature + (lambda - lambda_bar) * dir_sq;
        if curvature <= 0.0 {
            lambda_bar = 2.0 * (lambda - curvature / dir_sq);
            curvature = -curvature + lambda * dir_sq;
            lambda = lambda_bar;
        }

        let alpha = mu / curvature;
        let candidate = &theta + &(alpha * &direction);
        let (new_loss, new_grad) = objective(&candidate)?;
        check(new_loss, &new_grad, k)?;
        let comparison = 2.0 * curvature * (loss - new_loss) / (mu * mu);

        if comparison >= 0.0 {
            let loss_drop = loss - new_loss;
            theta = candidate;
            grad = new_grad;
            let residual_old = std::mem::replace(&mut residual, -grad.clone());
            loss = new_loss;
            lambda_bar = 0.0;
            success = true;
            accepted_losses.push(loss);

            if k % n == 0 {
                direction = residual.clone();
            } else {
                let beta = (residual.dot(&residual) - residual.dot(&residual_old)) / mu;
                direction = &residual + &(beta * &direction);
            }
            if comparison >= 0.75 {
                lambda *= 0.25;
            }

            let grad_norm = residual.dot(&residual).sqrt();
            if grad_norm <= opts.gradient_tolerance {
                reason = StopReason::GradientTolerance;
                break;
            }
            if loss_drop.abs() <= opts.loss_tolerance {
                reason = StopReason::LossTolerance;
                break;
            }
        } else {
            lambda_bar = lambda;
            success = false;
        }

        if comparison < 0.25 {
            lambda += curvature * (1.0 - comparison) / dir_sq;
        }
        if !lambda.is_finite() || lambda > 1e120 {
            reason = StopReason::Stalled;
            break;
        }
    }

    let final_gradient_norm = residual.dot(&residual).sqrt();
    Ok((
        theta,
        ScgDiagnostics {
            iterations,
            final_loss: loss,
            final_gradient_norm,
            reason,
            accepted_losses,
        },
    ))
}
