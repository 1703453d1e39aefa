//! Amplification averaged over Gaussian spurious couplings.
//!
//! Extra couplings along one or two axes other than the base axis are drawn
//! from independent normal distributions and applied to the LM and MR bonds.
//! The ratio of the averaged to the unperturbed `α_L` is `ζ`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::analysis::Transistor;
use crate::error::{Error, Result};
use crate::model::SpinRingParams;
use crate::qop::{eig_hermitian, Axis, Operator};

/// Largest fraction of the probability weight that failed nodes may carry.
pub const MAX_LOST_WEIGHT: f64 = 0.05;

pub const DEFAULT_TM_EVAL: f64 = 0.650;
pub const DEFAULT_QUADRATURE_ORDER: usize = 9;
pub const DEFAULT_SIGMA_RATIO: f64 = 0.1;

/// How the configured spread of a coupling is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpreadReading {
    /// The spread is a standard deviation.
    #[default]
    StdDev,
    /// The spread is a variance; its square root is the deviation.
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integration {
    /// Tensor-product Gauss–Hermite rule with this many nodes per axis.
    GaussHermite(usize),
    /// Plain Monte Carlo with a fixed seed.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    /// Unperturbed parameters; exactly one polarization weight is nonzero.
    pub base: SpinRingParams,
    /// One or two distinct axes, none equal to the base axis.
    pub axes: Vec<Axis>,
    pub mean: Vec<f64>,
    pub spread: Vec<f64>,
    pub reading: SpreadReading,
    pub tm_eval: f64,
    pub integration: Integration,
    /// Finite-difference step for `α`; `None` picks the analysis default.
    pub fd_step: Option<f64>,
}

impl PerturbationSpec {
    /// Equal mean coupling on every axis with the default 10% spread.
    pub fn new(base: &SpinRingParams, axes: &[Axis], mean: f64) -> Self {
        Self {
            base: *base,
            axes: axes.to_vec(),
            mean: vec![mean; axes.len()],
            spread: vec![DEFAULT_SIGMA_RATIO * mean; axes.len()],
            reading: SpreadReading::StdDev,
            tm_eval: DEFAULT_TM_EVAL,
            integration: Integration::GaussHermite(DEFAULT_QUADRATURE_ORDER),
            fd_step: None,
        }
    }

    pub fn with_integration(mut self, integration: Integration) -> Self {
        self.integration = integration;
        self
    }

    pub fn with_reading(mut self, reading: SpreadReading) -> Self {
        self.reading = reading;
        self
    }

    pub fn with_spread(mut self, spread: &[f64]) -> Self {
        self.spread = spread.to_vec();
        self
    }

    pub fn with_tm_eval(mut self, tm: f64) -> Self {
        self.tm_eval = tm;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Error::Validation {
            key: key.into(),
            msg,
        };
        self.base.validate()?;
        let base_axis = base_axis(&self.base)?;
        let n = self.axes.len();
        if !(1..=2).contains(&n) {
            return Err(bad("axes", format!("need one or two axes, got {n}")));
        }
        if n == 2 && self.axes[0] == self.axes[1] {
            return Err(bad("axes", "axes must differ".into()));
        }
        if self.axes.contains(&base_axis) {
            return Err(bad("axes", format!("cannot perturb the base axis {}", base_axis.label())));
        }
        if self.mean.len() != n || self.spread.len() != n {
            return Err(bad("mean", "one mean and one spread per axis".into()));
        }
        if self.mean.iter().chain(&self.spread).any(|v| !v.is_finite()) {
            return Err(bad("mean", "non-finite mean or spread".into()));
        }
        if self.spread.iter().any(|s| *s < 0.0) {
            return Err(bad("sigma", "spread must be non-negative".into()));
        }
        if self.tm_eval.is_nan() || self.tm_eval < 0.0 {
            return Err(bad("tm_eval", "must be >= 0".into()));
        }
        match self.integration {
            Integration::GaussHermite(0) => Err(bad("quad_order", "must be >= 1".into())),
            Integration::MonteCarlo { samples: 0, .. } => Err(bad("samples", "must be >= 1".into())),
            _ => Ok(()),
        }
    }

    /// Standard deviations per axis under the chosen reading.
    pub fn deviations(&self) -> Vec<f64> {
        self.spread
            .iter()
            .map(|&s| match self.reading {
                SpreadReading::StdDev => s,
                SpreadReading::Variance => s.sqrt(),
            })
            .collect()
    }

    /// Sample points as `(couplings per axis, weight)`, weights summing to 1.
    pub fn nodes(&self) -> Result<Vec<(Vec<f64>, f64)>> {
        let dev = self.deviations();
        match self.integration {
            Integration::GaussHermite(order) => {
                let rule = gauss_hermite(order)?;
                let mut nodes = vec![(Vec::new(), 1.0)];
                for (axis, &sd) in dev.iter().enumerate() {
                    let mean = self.mean[axis];
                    // a vanishing spread collapses the rule to one node
                    let axis_rule: Vec<(f64, f64)> = if sd == 0.0 {
                        vec![(mean, 1.0)]
                    } else {
                        rule.iter().map(|&(x, w)| (mean + sd * x, w)).collect()
                    };
                    nodes = nodes
                        .into_iter()
                        .flat_map(|(point, weight)| {
                            axis_rule.iter().map(move |&(x, w)| {
                                let mut p: Vec<f64> = point.clone();
                                p.push(x);
                                (p, weight * w)
                            })
                        })
                        .collect();
                }
                Ok(nodes)
            }
            Integration::MonteCarlo { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let w = 1.0 / samples as f64;
                Ok((0..samples)
                    .map(|_| {
                        let point = dev
                            .iter()
                            .zip(&self.mean)
                            .map(|(&sd, &m)| {
                                let z: f64 = StandardNormal.sample(&mut rng);
                                m + sd * z
                            })
                            .collect();
                        (point, w)
                    })
                    .collect())
            }
        }
    }
}

/// The single axis carrying a nonzero polarization weight.
pub fn base_axis(p: &SpinRingParams) -> Result<Axis> {
    let nonzero: Vec<Axis> = Axis::ALL.into_iter().filter(|a| p.lambda[a.index()] != 0.0).collect();
    match nonzero[..] {
        [axis] => Ok(axis),
        _ => Err(Error::Validation {
            key: "lambda".into(),
            msg: "the unperturbed model needs exactly one nonzero polarization weight".into(),
        }),
    }
}

/// Gauss–Hermite rule for the standard normal density: nodes are the
/// eigenvalues of the Jacobi matrix with off-diagonal `√k`, weights the
/// squared first components of its eigenvectors.
pub fn gauss_hermite(order: usize) -> Result<Vec<(f64, f64)>> {
    if order == 0 {
        return Err(Error::Validation {
            key: "quad_order".into(),
            msg: "must be >= 1".into(),
        });
    }
    let jacobi = Operator::from_fn(order, |r, c| {
        if r.abs_diff(c) == 1 {
            (r.max(c) as f64).sqrt().into()
        } else {
            0.0.into()
        }
    });
    let spec = eig_hermitian(&jacobi)?;
    let mut rule: Vec<(f64, f64)> = (0..order)
        .map(|k| (spec.eigenvalues[k], spec.vector(k)[0].norm_sqr()))
        .collect();
    let total: f64 = rule.iter().map(|r| r.1).sum();
    rule.iter_mut().for_each(|r| r.1 /= total);
    Ok(rule)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedAlpha {
    pub alpha_l: f64,
    pub alpha_r: f64,
    pub failed: usize,
    pub total: usize,
    /// Probability weight of the failed nodes.
    pub lost_weight: f64,
}

/// `α_L, α_R` with the given couplings added on the perturbed axes.
pub fn perturbed_alpha(spec: &PerturbationSpec, couplings: &[f64]) -> Result<(f64, f64)> {
    let mut p = spec.base;
    for (axis, &value) in spec.axes.iter().zip(couplings) {
        p.lambda[axis.index()] += value;
    }
    let a = Transistor::new(&p)?.amplification(spec.tm_eval, spec.fd_step)?;
    Ok((a.alpha_l, a.alpha_r))
}

/// Unperturbed `α_L, α_R` of the base model at the evaluation temperature.
pub fn unperturbed_alpha(base: &SpinRingParams, tm_eval: f64, fd_step: Option<f64>) -> Result<(f64, f64)> {
    let a = Transistor::new(base)?.amplification(tm_eval, fd_step)?;
    Ok((a.alpha_l, a.alpha_r))
}

/// Weighted average of `α` over the coupling distribution. Failed nodes are
/// dropped and the remaining weight renormalized; losing more than
/// [`MAX_LOST_WEIGHT`] is an error.
pub fn averaged_alpha(spec: &PerturbationSpec) -> Result<AveragedAlpha> {
    spec.validate()?;
    let nodes = spec.nodes()?;
    let values: Vec<(f64, Option<(f64, f64)>)> = nodes
        .par_iter()
        .map(|(point, w)| (*w, perturbed_alpha(spec, point).ok()))
        .collect();

    let (mut sum_l, mut sum_r, mut kept, mut lost, mut failed) = (0.0, 0.0, 0.0, 0.0, 0);
    for (w, value) in values {
        match value {
            Some((l, r)) => {
                sum_l += w * l;
                sum_r += w * r;
                kept += w;
            }
            None => {
                lost += w;
                failed += 1;
            }
        }
    }
    let total = nodes.len();
    if lost > MAX_LOST_WEIGHT || kept == 0.0 {
        return Err(Error::NodeFailure {
            failed,
            total,
            lost_weight: lost,
        });
    }
    Ok(AveragedAlpha {
        alpha_l: sum_l / kept,
        alpha_r: sum_r / kept,
        failed,
        total,
        lost_weight: lost,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zeta {
    pub zeta: f64,
    pub averaged: AveragedAlpha,
    pub unperturbed_alpha_l: f64,
}

/// `ζ = ᾱ_L / α_L` with both evaluated at the same control temperature.
pub fn zeta(spec: &PerturbationSpec) -> Result<Zeta> {
    let (unperturbed, _) = unperturbed_alpha(&spec.base, spec.tm_eval, spec.fd_step)?;
    zeta_against(spec, unperturbed)
}

fn zeta_against(spec: &PerturbationSpec, unperturbed_alpha_l: f64) -> Result<Zeta> {
    if !unperturbed_alpha_l.is_finite() || unperturbed_alpha_l == 0.0 {
        return Err(Error::Divergent {
            slope: unperturbed_alpha_l,
        });
    }
    let averaged = averaged_alpha(spec)?;
    Ok(Zeta {
        zeta: averaged.alpha_l / unperturbed_alpha_l,
        averaged,
        unperturbed_alpha_l,
    })
}

/// `ζ` over a grid of mean couplings, each spread `spread_ratio` times its mean.
pub fn zeta_curve(
    template: &PerturbationSpec,
    means: &[f64],
    spread_ratio: f64,
) -> Result<Vec<(f64, Result<Zeta>)>> {
    let (unperturbed, _) = unperturbed_alpha(&template.base, template.tm_eval, template.fd_step)?;
    Ok(means
        .iter()
        .map(|&m| {
            let n = template.axes.len();
            let spec = PerturbationSpec {
                mean: vec![m; n],
                spread: vec![spread_ratio * m; n],
                ..template.clone()
            };
            (m, zeta_against(&spec, unperturbed))
        })
        .collect())
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    crate::analysis::uniform_grid(lo.log10(), hi.log10(), n)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect()
}
