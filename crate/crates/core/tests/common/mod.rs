#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinring::lindblad::Liouvillian;
use spinring::model::SpinRingParams;
use spinring::qop::{Operator, C64};
use spinring::steady::evolve;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parameters with generic frequencies, couplings, slopes and temperatures.
pub fn random_params(rng: &mut impl Rng) -> SpinRingParams {
    SpinRingParams {
        omega: [1.0, rng.random_range(0.05..2.0), rng.random_range(0.05..2.0)],
        eta_lm: rng.random_range(0.1..1.5),
        eta_mr: rng.random_range(0.1..1.5),
        eta_lr: rng.random_range(0.0..0.5),
        lambda: [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ],
        kappa: [
            rng.random_range(0.2..5.0),
            rng.random_range(0.2..5.0),
            rng.random_range(0.2..100.0),
        ],
        temp: [
            rng.random_range(0.05..10.0),
            rng.random_range(0.05..10.0),
            rng.random_range(0.05..10.0),
        ],
    }
}

pub fn random_matrix(rng: &mut impl Rng, dim: usize) -> Operator {
    Operator::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> Operator {
    let a = random_matrix(rng, dim);
    (&a + &a.adjoint()).scale_re(0.5)
}

/// A full-rank density matrix `M M† / Tr(M M†)`.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> Operator {
    let m = random_matrix(rng, dim);
    let rho = &m * &m.adjoint();
    let tr = rho.trace().re;
    rho.scale_re(1.0 / tr)
}

/// Integrates from the maximally mixed state, doubling the final time until
/// two successive states agree to `tol`. Once relaxation is exponential the
/// change from `t` to `2t` bounds the distance to the limit; `tol` should sit
/// above the rounding floor of the propagator powers (about 1e-10).
pub fn evolve_to_fixed_point(liou: &Liouvillian, tol: f64) -> Operator {
    let n = liou.hamiltonian.dim();
    let rho0 = Operator::identity(n).scale_re(1.0 / n as f64);
    let mut t = 10.0;
    let mut prev = evolve(liou, &rho0, t, None).expect("evolution");
    for _ in 0..30 {
        t *= 2.0;
        let next = evolve(liou, &rho0, t, None).expect("evolution");
        if next.max_diff(&prev) < tol {
            return next;
        }
        prev = next;
    }
    panic!("time evolution did not settle by t = {t}");
}

/// Prints the one-line verdict for an acceptance criterion and fails the
/// test when it does not hold.
pub fn verdict(id: &str, pass: bool, detail: String) {
    println!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}
