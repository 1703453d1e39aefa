//! Spin-ring Hamiltonian, Ohmic bath rates and the canonical parameter sets.
//!
//! All frequencies and temperatures are in units of Δ = ω_L, bath slopes
//! in units of κ = κ_L. The computational basis follows the Kronecker order
//! L, M, R with `σ^z = diag(1, -1)`: basis index 0 is the state with every
//! qubit excited (σ^z = +1), index 7 the state with every qubit in its ground
//! level.

use std::fmt;

use crate::error::{Error, Result};
use crate::qop::{pauli_on_site, Axis, Operator, Site, Spectrum};

/// Hamiltonian and bath parameters of the three-qubit ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinRingParams {
    /// Qubit frequencies ω_L, ω_M, ω_R.
    pub omega: [f64; 3],
    pub eta_lm: f64,
    pub eta_mr: f64,
    pub eta_lr: f64,
    /// Polarization weights λ^x, λ^y, λ^z shared by every bond.
    pub lambda: [f64; 3],
    /// Ohmic slopes κ_L, κ_M, κ_R.
    pub kappa: [f64; 3],
    /// Bath temperatures T_L, T_M, T_R.
    pub temp: [f64; 3],
}

impl SpinRingParams {
    pub fn eta(&self, p: Site, q: Site) -> f64 {
        use Site::*;
        match (p, q) {
            (L, M) | (M, L) => self.eta_lm,
            (M, R) | (R, M) => self.eta_mr,
            (L, R) | (R, L) => self.eta_lr,
            _ => 0.0,
        }
    }

    pub fn with_tm(mut self, tm: f64) -> Self {
        self.temp[Site::M.index()] = tm;
        self
    }

    pub fn with_temps(mut self, temp: [f64; 3]) -> Self {
        self.temp = temp;
        self
    }

    pub fn with_lambda(mut self, lambda: [f64; 3]) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_kappa(mut self, kappa: [f64; 3]) -> Self {
        self.kappa = kappa;
        self
    }

    /// Checks finiteness, κ_p > 0, T_p ≥ 0 and the ω_L = 1 unit convention.
    pub fn validate(&self) -> Result<()> {
        let named: [(&str, f64); 15] = [
            ("omega_L", self.omega[0]),
            ("omega_M", self.omega[1]),
            ("omega_R", self.omega[2]),
            ("eta_LM", self.eta_lm),
            ("eta_MR", self.eta_mr),
            ("eta_LR", self.eta_lr),
            ("lambda_x", self.lambda[0]),
            ("lambda_y", self.lambda[1]),
            ("lambda_z", self.lambda[2]),
            ("kappa_L", self.kappa[0]),
            ("kappa_M", self.kappa[1]),
            ("kappa_R", self.kappa[2]),
            ("T_L", self.temp[0]),
            ("T_M", self.temp[1]),
            ("T_R", self.temp[2]),
        ];
        for (key, v) in named {
            if !v.is_finite() {
                return Err(invalid(key, "must be finite"));
            }
        }
        if self.omega[0] != 1.0 {
            return Err(invalid("omega_L", "is the unit of frequency and must equal 1"));
        }
        for (i, site) in Site::ALL.iter().enumerate() {
            if self.kappa[i] <= 0.0 {
                return Err(invalid(&format!("kappa_{site}"), "must be > 0"));
            }
            if self.temp[i] < 0.0 {
                return Err(invalid(&format!("T_{site}"), "must be >= 0"));
            }
        }
        Ok(())
    }
}

fn invalid(key: &str, msg: &str) -> Error {
    Error::Validation {
        key: key.to_string(),
        msg: msg.to_string(),
    }
}

/// The two reference configurations: transverse (x-axis) and longitudinal
/// (z-axis) Ising coupling with the same frequencies, baths and temperatures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Canonical {
    XAxis,
    ZAxis,
}

impl Canonical {
    pub fn name(self) -> &'static str {
        match self {
            Canonical::XAxis => "x_axis",
            Canonical::ZAxis => "z_axis",
        }
    }

    /// Axis carrying the main Ising coupling.
    pub fn axis(self) -> Axis {
        match self {
            Canonical::XAxis => Axis::X,
            Canonical::ZAxis => Axis::Z,
        }
    }

    pub fn params(self) -> SpinRingParams {
        let lambda = match self {
            Canonical::XAxis => [1.0, 0.0, 0.0],
            Canonical::ZAxis => [0.0, 0.0, 1.0],
        };
        SpinRingParams {
            omega: [1.0, 0.1, 0.2],
            eta_lm: 1.0,
            eta_mr: 1.0,
            eta_lr: 0.0,
            lambda,
            kappa: [1.0, 1.0, 100.0],
            temp: [10.0, 0.0, 0.01],
        }
    }
}

impl fmt::Display for Canonical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `H_S = ½ Σ_p ω_p σ^z_p + ½ Σ_{p<q} η_pq Σ_i λ^i σ^i_p σ^i_q`.
///
/// Each bond enters with weight `η_pq λ^i / 2`, the normalization under which
/// the transverse-field matrix carries `Λ^x_pq / 2` off the diagonal.
pub fn build_hamiltonian(p: &SpinRingParams) -> Operator {
    let mut h = Operator::zeros(8);
    for site in Site::ALL {
        h.add_scaled(
            (0.5 * p.omega[site.index()]).into(),
            &pauli_on_site(site, Axis::Z),
        );
    }
    let bonds = [(Site::L, Site::M), (Site::M, Site::R), (Site::L, Site::R)];
    for (a, b) in bonds {
        let eta = p.eta(a, b);
        if eta == 0.0 {
            continue;
        }
        for axis in Axis::ALL {
            let w = 0.5 * eta * p.lambda[axis.index()];
            if w == 0.0 {
                continue;
            }
            let term = &pauli_on_site(a, axis) * &pauli_on_site(b, axis);
            h.add_scaled(w.into(), &term);
        }
    }
    h
}

/// Bose–Einstein occupation `1 / (e^{ω/T} - 1)`; zero at `T = 0`.
pub fn occupation(omega: f64, temp: f64) -> f64 {
    if temp == 0.0 {
        0.0
    } else {
        1.0 / (omega / temp).exp_m1()
    }
}

/// Transition rate of an Ohmic bath (`J(ω) = κω`) at Bohr frequency ω.
/// Positive ω is emission into the bath, negative ω absorption.
pub fn bath_rate(kappa: f64, temp: f64, omega: f64) -> f64 {
    if omega == 0.0 {
        kappa * temp
    } else if omega > 0.0 {
        kappa * omega * (1.0 + occupation(omega, temp))
    } else {
        let w = -omega;
        kappa * w * occupation(w, temp)
    }
}

/// `P = σ^z_L σ^z_M σ^z_R`.
pub fn parity_operator() -> Operator {
    let d: Vec<f64> = (0..8u32)
        .map(|i| if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    Operator::from_diag(&d)
}

/// Gibbs state `e^{-H/T} / Z` from a precomputed spectrum. At `T = 0` the
/// ground manifold is mixed uniformly.
pub fn thermal_state(spectrum: &Spectrum, temp: f64) -> Operator {
    let e0 = spectrum.eigenvalues[0];
    let scale = spectrum
        .eigenvalues
        .iter()
        .fold(0.0_f64, |m, e| m.max(e.abs()))
        .max(1.0);
    let weights: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .map(|&e| {
            if temp == 0.0 {
                if e - e0 <= 1e-10 * scale {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-(e - e0) / temp).exp()
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
    spectrum.from_eigenbasis(&Operator::from_diag(&probs))
}
