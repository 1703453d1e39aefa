//! Global (dressed-state) Lindblad generator.
//!
//! Each coupling operator `σ^x_p` is split into Bohr-frequency components
//! `A_p(ω)` in the eigenbasis of `H_S`; gaps that agree within
//! [`BOHR_CLUSTER_TOL`] share one jump operator, which keeps the secular
//! generator independent of the eigenvector gauge inside degenerate levels.

use crate::error::{Error, Result};
use crate::model::{bath_rate, build_hamiltonian, SpinRingParams};
use crate::qop::{
    eig_hermitian, kron, pauli_on_site, superop_of, trace_functional, vectorize, Axis, Operator,
    Site, Spectrum, C64, I, ONE,
};
use crate::steady;

/// Relative tolerance for grouping Bohr frequencies.
pub const BOHR_CLUSTER_TOL: f64 = 1e-9;

/// Matrix elements below this modulus are treated as absent transitions.
pub const MATRIX_ELEMENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct JumpTerm {
    pub omega: f64,
    pub op: Operator,
    pub rate: f64,
}

/// Bohr-frequency components of one bath coupling, with their rates.
#[derive(Debug, Clone)]
pub struct JumpDecomposition {
    pub bath: Site,
    pub terms: Vec<JumpTerm>,
}

/// One dressed-state transition `|ε_i⟩ -> |ε_j⟩` (column `from`, row `to`).
#[derive(Debug, Clone, Copy)]
struct Transition {
    omega: f64,
    from: usize,
    to: usize,
    element: C64,
}

fn same_cluster(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1.0_f64.max(a.abs()).max(b.abs())
}

/// Splits `coupling` into `A(ω) = Σ_{ε_i - ε_j ≈ ω} ⟨ε_j|coupling|ε_i⟩ |ε_j⟩⟨ε_i|`,
/// returned in the original basis and sorted by ascending ω.
///
/// Gaps are grouped by single linkage with relative tolerance `tol`; a group
/// whose mean gap lies within `tol` of zero is pinned to ω = 0.
pub fn bohr_decompose(spec: &Spectrum, coupling: &Operator, tol: f64) -> Vec<(f64, Operator)> {
    let n = spec.dim();
    let x = spec.to_eigenbasis(coupling);
    let mut transitions = Vec::new();
    for from in 0..n {
        for to in 0..n {
            let element = x[(to, from)];
            if element.norm() < MATRIX_ELEMENT_FLOOR {
                continue;
            }
            transitions.push(Transition {
                omega: spec.eigenvalues[from] - spec.eigenvalues[to],
                from,
                to,
                element,
            });
        }
    }
    transitions.sort_by(|a, b| a.omega.total_cmp(&b.omega));

    let mut clusters: Vec<Vec<Transition>> = Vec::new();
    for t in transitions {
        match clusters.last_mut() {
            Some(cluster) if same_cluster(cluster.last().unwrap().omega, t.omega, tol) => {
                cluster.push(t)
            }
            _ => clusters.push(vec![t]),
        }
    }

    clusters
        .into_iter()
        .map(|cluster| {
            let mean = cluster.iter().map(|t| t.omega).sum::<f64>() / cluster.len() as f64;
            let omega = if mean.abs() <= tol { 0.0 } else { mean };
            let mut a = Operator::zeros(n);
            for t in &cluster {
                a[(t.to, t.from)] += t.element;
            }
            (omega, spec.from_eigenbasis(&a))
        })
        .collect()
}

/// `A ρ A† - ½{A†A, ρ}` as a superoperator on row-major `vec(ρ)`.
pub fn unit_dissipator(a: &Operator) -> Operator {
    let n = a.dim();
    let id = Operator::identity(n);
    let ada = &a.adjoint() * a;
    let mut out = kron(a, &a.conj());
    out.add_scaled((-0.5).into(), &kron(&ada, &id));
    out.add_scaled((-0.5).into(), &kron(&id, &ada.transpose()));
    out
}

/// `Σ_ω γ(ω) [A⊗Ā - ½(A†A⊗I + I⊗(A†A)ᵀ)]`.
pub fn build_dissipator(jd: &JumpDecomposition) -> Operator {
    let n = jd.terms.first().map(|t| t.op.dim()).unwrap_or(8);
    let mut out = Operator::zeros(n * n);
    for term in &jd.terms {
        if term.rate != 0.0 {
            out.add_scaled(term.rate.into(), &unit_dissipator(&term.op));
        }
    }
    out
}

/// Superoperator of `ρ -> -i[H, ρ]`.
pub fn hamiltonian_superop(h: &Operator) -> Operator {
    let id = Operator::identity(h.dim());
    let mut out = superop_of(h, &id);
    out.add_scaled(-ONE, &superop_of(&id, h));
    out.scale(-I)
}

/// `max_k |Σ_i L[(i,i), k]|`: how far the generator is from preserving the trace.
pub fn trace_defect(superop: &Operator) -> f64 {
    let dim = (superop.dim() as f64).sqrt().round() as usize;
    superop
        .apply_left(&trace_functional(dim))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Full generator acting on `vectorize(ρ)`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub matrix: Operator,
    pub hamiltonian_part: Operator,
    /// Dissipators of the L, M and R baths.
    pub parts: [Operator; 3],
    /// The system Hamiltonian, needed to evaluate heat currents.
    pub hamiltonian: Operator,
}

impl Liouvillian {
    pub fn from_parts(hamiltonian: Operator, hamiltonian_part: Operator, parts: [Operator; 3]) -> Self {
        let mut matrix = hamiltonian_part.clone();
        for part in &parts {
            matrix += part;
        }
        Self {
            matrix,
            hamiltonian_part,
            parts,
            hamiltonian,
        }
    }

    pub fn apply(&self, rho: &Operator) -> Operator {
        Operator::from_rows(rho.dim(), self.matrix.apply(&vectorize(rho)))
            .expect("Liouvillian and state dimensions agree")
    }

    /// `L_p[ρ]` for a single bath.
    pub fn dissipate(&self, bath: Site, rho: &Operator) -> Operator {
        Operator::from_rows(rho.dim(), self.parts[bath.index()].apply(&vectorize(rho)))
            .expect("Liouvillian and state dimensions agree")
    }

    /// Adds `-i[h, ·]` to the coherent part.
    pub fn with_extra_hamiltonian(&self, h: &Operator) -> Self {
        let mut hp = self.hamiltonian_part.clone();
        hp += &hamiltonian_superop(h);
        Self::from_parts(self.hamiltonian.clone(), hp, self.parts.clone())
    }
}

#[derive(Debug, Clone)]
struct Channel {
    omega: f64,
    op: Operator,
    unit: Operator,
}

/// The temperature-independent part of the generator: Hamiltonian, its
/// spectrum and every bath's Bohr decomposition with unit-rate dissipators.
/// Rebuilding the Liouvillian for new temperatures or slopes only rescales
/// these pieces.
#[derive(Debug, Clone)]
pub struct DressedSystem {
    hamiltonian: Operator,
    spectrum: Spectrum,
    hamiltonian_part: Operator,
    couplings: [Operator; 3],
    channels: [Vec<Channel>; 3],
}

impl DressedSystem {
    pub fn new(p: &SpinRingParams) -> Result<Self> {
        let h = build_hamiltonian(p);
        let spectrum = eig_hermitian(&h)?;
        Ok(Self::from_spectrum(h, spectrum))
    }

    /// Builds from an explicit eigenbasis of `hamiltonian`, with the ring's
    /// `σ^x_p` bath couplings.
    pub fn from_spectrum(hamiltonian: Operator, spectrum: Spectrum) -> Self {
        let couplings = Site::ALL.map(|site| pauli_on_site(site, Axis::X));
        Self::with_couplings(hamiltonian, spectrum, couplings)
    }

    /// Builds with arbitrary system-side bath operators, one per bath slot.
    /// A zero coupling yields a bath that never acts.
    pub fn with_couplings(hamiltonian: Operator, spectrum: Spectrum, couplings: [Operator; 3]) -> Self {
        let channels = couplings.clone().map(|coupling| {
            bohr_decompose(&spectrum, &coupling, BOHR_CLUSTER_TOL)
                .into_iter()
                .map(|(omega, op)| Channel {
                    omega,
                    unit: unit_dissipator(&op),
                    op,
                })
                .collect()
        });
        Self {
            hamiltonian_part: hamiltonian_superop(&hamiltonian),
            hamiltonian,
            spectrum,
            couplings,
            channels,
        }
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn decomposition(&self, bath: Site, kappa: f64, temp: f64) -> JumpDecomposition {
        let terms = self.channels[bath.index()]
            .iter()
            .map(|c| JumpTerm {
                omega: c.omega,
                op: c.op.clone(),
                rate: bath_rate(kappa, temp, c.omega),
            })
            .collect();
        JumpDecomposition { bath, terms }
    }

    fn dissipator(&self, bath: Site, kappa: f64, temp: f64) -> Operator {
        let mut out = Operator::zeros(self.hamiltonian_part.dim());
        for c in &self.channels[bath.index()] {
            let rate = bath_rate(kappa, temp, c.omega);
            if rate != 0.0 {
                out.add_scaled(rate.into(), &c.unit);
            }
        }
        out
    }

    pub fn liouvillian(&self, kappa: [f64; 3], temp: [f64; 3]) -> Liouvillian {
        let parts = Site::ALL.map(|s| self.dissipator(s, kappa[s.index()], temp[s.index()]));
        Liouvillian::from_parts(self.hamiltonian.clone(), self.hamiltonian_part.clone(), parts)
    }

    /// Positive-frequency transitions through each bath coupling. Row `k`
    /// lists, per bath, the lower states reachable from the `k`-th highest
    /// level; states are numbered from 1 (highest) to `dim` (lowest).
    pub fn transition_table(&self) -> Vec<[Vec<usize>; 3]> {
        let n = self.spectrum.dim();
        let label = |ascending: usize| n - ascending;
        let dressed = self.couplings.clone().map(|c| self.spectrum.to_eigenbasis(&c));
        (0..n)
            .rev()
            .map(|from| {
                Site::ALL.map(|site| {
                    let a = &dressed[site.index()];
                    let mut to: Vec<usize> = (0..n)
                        .filter(|&j| self.spectrum.eigenvalues[from] - self.spectrum.eigenvalues[j] > BOHR_CLUSTER_TOL)
                        .filter(|&j| a[(j, from)].norm() > MATRIX_ELEMENT_FLOOR)
                        .map(label)
                        .collect();
                    to.sort_unstable();
                    to
                })
            })
            .collect()
    }

    /// `Σ_p Σ_ω s_p(ω) A_p(ω)† A_p(ω)`.
    pub fn lamb_shift(&self, mut s: impl FnMut(Site, f64) -> f64) -> Operator {
        let mut h = Operator::zeros(self.hamiltonian.dim());
        for site in Site::ALL {
            for c in &self.channels[site.index()] {
                let coeff = s(site, c.omega);
                if coeff != 0.0 {
                    h.add_scaled(coeff.into(), &(&c.op.adjoint() * &c.op));
                }
            }
        }
        h
    }
}

/// Generator for the parameters' own slopes and temperatures.
pub fn build_liouvillian(p: &SpinRingParams) -> Result<Liouvillian> {
    Ok(DressedSystem::new(p)?.liouvillian(p.kappa, p.temp))
}

/// Adds a Lamb-shift Hamiltonian with coefficients `s_p(ω)` and verifies
/// that it commutes with `H_S` and leaves the steady state unchanged.
/// Returns the largest steady-state entry change.
pub fn lamb_shift_invariance_check(
    p: &SpinRingParams,
    s: impl FnMut(Site, f64) -> f64,
) -> Result<f64> {
    const STATE_TOL: f64 = 1e-9;
    let system = DressedSystem::new(p)?;
    let h_ls = system.lamb_shift(s);
    let scale = 1.0_f64.max(h_ls.max_abs()) * 1.0_f64.max(system.hamiltonian.max_abs());
    let comm = h_ls.commutator(&system.hamiltonian).max_abs();
    if comm > 1e-10 * scale {
        return Err(Error::CheckFailed {
            what: "Lamb shift does not commute with H_S".into(),
            norm: comm,
        });
    }
    let liou = system.liouvillian(p.kappa, p.temp);
    let base = steady::steady_state(&liou)?;
    let shifted = steady::steady_state(&liou.with_extra_hamiltonian(&h_ls))?;
    let change = base.rho.max_diff(&shifted.rho);
    if change > STATE_TOL {
        return Err(Error::CheckFailed {
            what: "Lamb shift changes the steady state".into(),
            norm: change,
        });
    }
    Ok(change)
}
