//! Nonequilibrium steady state, heat currents, and a time-evolution oracle.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lindblad::Liouvillian;
use crate::qop::{devectorize, eig_hermitian, trace_functional, vectorize, Operator, Site, C64, ONE, ZERO};

/// Singular values below this fraction of the largest count as null directions.
pub const NULLSPACE_REL_TOL: f64 = 1e-10;

const IMAG_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct SteadyReport {
    pub rho: Operator,
    /// `J_L, J_M, J_R`, positive when the bath injects energy.
    pub currents: [f64; 3],
    /// `‖L vec(ρ)‖₂`.
    pub residual: f64,
    pub nullspace_dim: usize,
    /// Smallest eigenvalue of the (Hermitian part of the) steady state.
    pub positivity_floor: f64,
}

impl SteadyReport {
    pub fn current(&self, bath: Site) -> f64 {
        self.currents[bath.index()]
    }
}

/// Number of singular values of `m` below `NULLSPACE_REL_TOL · σ_max`.
pub fn nullspace_dim(m: &Operator) -> usize {
    let sv = m.to_nalgebra().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    sv.iter().filter(|&&s| s < NULLSPACE_REL_TOL * max).count()
}

/// Solves `L x = 0` with the first row replaced by the trace functional.
pub fn solve_steady(liou: &Liouvillian) -> Result<Operator> {
    let n = liou.matrix.dim();
    let dim = (n as f64).sqrt().round() as usize;
    let trace = trace_functional(dim);
    let a = DMatrix::from_fn(n, n, |r, c| if r == 0 { trace[c] } else { liou.matrix[(r, c)] });
    let mut b = DVector::from_element(n, ZERO);
    b[0] = ONE;
    let x = a.lu().solve(&b).ok_or(Error::SolveFailed)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SolveFailed);
    }
    devectorize(x.as_slice())
}

/// `Tr{L_p[ρ] H_S}`.
pub fn heat_current(liou: &Liouvillian, bath: Site, rho: &Operator) -> Result<f64> {
    let d = liou.dissipate(bath, rho);
    let j = (&d * &liou.hamiltonian).trace();
    if j.im.abs() > IMAG_TOL * j.re.abs().max(1.0) {
        return Err(Error::NonRealCurrent { imag: j.im });
    }
    Ok(j.re)
}

pub fn currents(liou: &Liouvillian, rho: &Operator) -> Result<[f64; 3]> {
    Ok([
        heat_current(liou, Site::L, rho)?,
        heat_current(liou, Site::M, rho)?,
        heat_current(liou, Site::R, rho)?,
    ])
}

/// Steady state and currents without the singular-value diagnostics.
pub fn steady_currents(liou: &Liouvillian) -> Result<(Operator, [f64; 3])> {
    let rho = solve_steady(liou)?;
    let j = currents(liou, &rho)?;
    Ok((rho, j))
}

/// Full steady-state report; fails if the null space is not one-dimensional.
pub fn steady_state(liou: &Liouvillian) -> Result<SteadyReport> {
    let dim = nullspace_dim(&liou.matrix);
    if dim > 1 {
        return Err(Error::DegenerateSteadyState { dim });
    }
    let rho = solve_steady(liou)?;
    let currents = currents(liou, &rho)?;
    let residual = liou
        .matrix
        .apply(&vectorize(&rho))
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let herm = Operator::from_fn(rho.dim(), |r, c| 0.5 * (rho[(r, c)] + rho[(c, r)].conj()));
    let positivity_floor = eig_hermitian(&herm)?.eigenvalues[0];
    Ok(SteadyReport {
        rho,
        currents,
        residual,
        nullspace_dim: dim,
        positivity_floor,
    })
}

/// Spectral-radius estimate of the generator by power iteration.
pub fn spectral_radius_estimate(m: &Operator, iterations: usize) -> f64 {
    let n = m.dim();
    // fixed, non-symmetric start vector keeps the estimate reproducible
    let mut v: Vec<C64> = (0..n)
        .map(|k| C64::new(1.0 + 0.37 * k as f64, 0.11 * (k % 7) as f64))
        .collect();
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        let w = m.apply(&v);
        estimate = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = w;
    }
    estimate
}

/// One classic Runge–Kutta step `ρ -> M ρ` of a linear generator:
/// `M = I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24`.
pub fn rk4_step_map(m: &Operator, h: f64) -> Operator {
    let n = m.dim();
    let hl = m.scale_re(h);
    let id = Operator::identity(n);
    let mut acc = &id + &hl.scale_re(0.25);
    acc = &id + &(&hl * &acc).scale_re(1.0 / 3.0);
    acc = &id + &(&hl * &acc).scale_re(0.5);
    &id + &(&hl * &acc)
}

/// Default step: `0.01 / |λ|_max` with the largest generator eigenvalue
/// estimated by power iteration.
pub fn default_step(liou: &Liouvillian) -> f64 {
    let radius = spectral_radius_estimate(&liou.matrix, 30);
    if radius > 0.0 {
        0.01 / radius
    } else {
        0.01
    }
}

/// Integrates `dρ/dt = L[ρ]` with fixed-step RK4 from `rho0` to `t_final`.
///
/// The step count is `ceil(t_final / dt)`; the N-step propagator is formed by
/// repeated squaring of the one-step map, which is the same product of steps.
pub fn evolve(liou: &Liouvillian, rho0: &Operator, t_final: f64, dt: Option<f64>) -> Result<Operator> {
    const DRIFT_TOL: f64 = 1e-6;
    let dt = dt.unwrap_or_else(|| default_step(liou));
    if t_final <= 0.0 {
        return Ok(rho0.clone());
    }
    let steps = (t_final / dt).ceil().max(1.0) as u64;
    let h = t_final / steps as f64;

    let mut power = rk4_step_map(&liou.matrix, h);
    let mut v = vectorize(rho0);
    let mut remaining = steps;
    while remaining > 0 {
        if remaining & 1 == 1 {
            v = power.apply(&v);
        }
        remaining >>= 1;
        if remaining > 0 {
            power = &power * &power;
        }
    }
    let rho = devectorize(&v)?;

    let trace_drift = (rho.trace() - rho0.trace()).norm();
    if !trace_drift.is_finite() || trace_drift > DRIFT_TOL {
        return Err(Error::StepUnstable {
            what: "trace",
            drift: trace_drift,
        });
    }
    let herm_drift = rho.hermiticity_defect();
    if herm_drift > DRIFT_TOL {
        return Err(Error::StepUnstable {
            what: "hermiticity",
            drift: herm_drift,
        });
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{build_liouvillian, DressedSystem};
    use crate::model::{bath_rate, thermal_state, Canonical};
    use crate::qop::{pauli, Axis};

    #[test]
    fn powered_propagator_equals_stepping() {
        let liou = build_liouvillian(&Canonical::XAxis.params().with_tm(0.6)).unwrap();
        let mut rho0 = Operator::zeros(8);
        rho0[(7, 7)] = ONE;
        let h = 1e-3;
        let step = rk4_step_map(&liou.matrix, h);
        let mut v = vectorize(&rho0);
        for _ in 0..37 {
            v = step.apply(&v);
        }
        let stepped = devectorize(&v).unwrap();
        let powered = evolve(&liou, &rho0, 37.0 * h, Some(h)).unwrap();
        assert!(stepped.max_diff(&powered) < 1e-13);
    }

    #[test]
    fn equilibrium_currents_vanish() {
        let p = Canonical::XAxis.params().with_temps([1.0, 1.0, 1.0]);
        let system = DressedSystem::new(&p).unwrap();
        let liou = system.liouvillian(p.kappa, p.temp);
        let report = steady_state(&liou).unwrap();
        let gibbs = thermal_state(system.spectrum(), 1.0);
        assert!(report.rho.max_diff(&gibbs) < 1e-9);
        for j in report.currents {
            assert!(j.abs() < 1e-10);
        }
        assert_eq!(report.nullspace_dim, 1);
    }

    #[test]
    fn two_level_current_matches_rate_equation() {
        // a single qubit in contact with one bath, driven out of equilibrium by
        // holding its state fixed: J = ω (γ↑ ρ_ground - γ↓ ρ_excited)
        let omega = 0.8;
        let (kappa, temp) = (1.3, 0.5);
        let h = pauli(Axis::Z).scale_re(0.5 * omega);
        let z = Operator::zeros(2);
        let system =
            DressedSystem::with_couplings(h.clone(), eig_hermitian(&h).unwrap(), [pauli(Axis::X), z.clone(), z]);
        let d = crate::lindblad::build_dissipator(&system.decomposition(Site::L, kappa, temp));
        let liou = Liouvillian::from_parts(
            h.clone(),
            crate::lindblad::hamiltonian_superop(&h),
            [d, Operator::zeros(4), Operator::zeros(4)],
        );
        let rho = Operator::from_diag(&[0.35, 0.65]);
        let j = heat_current(&liou, Site::L, &rho).unwrap();
        let down = bath_rate(kappa, temp, omega);
        let up = bath_rate(kappa, temp, -omega);
        let expected = omega * (up * 0.65 - down * 0.35);
        assert!((j - expected).abs() < 1e-14);
    }

    #[test]
    fn degenerate_null_space_is_rejected() {
        // no dissipation at all: every diagonal state is stationary
        let liou = build_liouvillian(&Canonical::XAxis.params()).unwrap();
        let bare = Liouvillian::from_parts(
            liou.hamiltonian.clone(),
            liou.hamiltonian_part.clone(),
            [Operator::zeros(64), Operator::zeros(64), Operator::zeros(64)],
        );
        assert!(matches!(
            steady_state(&bare),
            Err(Error::DegenerateSteadyState { .. })
        ));
    }

    #[test]
    fn zero_time_is_identity() {
        let liou = build_liouvillian(&Canonical::XAxis.params()).unwrap();
        let rho = Operator::identity(8).scale_re(0.125);
        assert_eq!(evolve(&liou, &rho, 0.0, None).unwrap(), rho);
    }
}
