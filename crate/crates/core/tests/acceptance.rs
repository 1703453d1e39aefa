//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `cargo test --test acceptance -- --nocapture --test-threads 1`
//! to see the verdicts in order.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use common::{evolve_to_fixed_point, random_params, rng, verdict};
use rand::Rng;
use spinring::analysis::{local_model_currents, local_temperature, uniform_grid, SweepResult, Transistor};
use spinring::lindblad::{lamb_shift_invariance_check, DressedSystem};
use spinring::model::{parity_operator, thermal_state, Canonical};
use spinring::qop::{Axis, Site};
use spinring::robustness::{zeta_curve, PerturbationSpec, DEFAULT_SIGMA_RATIO};
use spinring::steady::{steady_currents, steady_state};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn x_axis() -> &'static Transistor {
    static MODEL: OnceLock<Transistor> = OnceLock::new();
    MODEL.get_or_init(|| Transistor::new(&Canonical::XAxis.params()).unwrap())
}

fn canonical_grid() -> Vec<f64> {
    uniform_grid(0.0, 10.0, 500)
}

fn x_axis_sweep() -> &'static SweepResult {
    static SWEEP: OnceLock<SweepResult> = OnceLock::new();
    SWEEP.get_or_init(|| x_axis().sweep(&canonical_grid(), None).unwrap())
}

#[test]
fn criterion_01_jm_minimum() {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let sweep = pool.install(|| x_axis().sweep(&canonical_grid(), None).unwrap());
    let elapsed = start.elapsed().as_secs_f64();
    let lm = x_axis().find_landmarks(&sweep).unwrap();
    let pass = (lm.tm_jm_min - 0.600).abs() <= 0.02 && rel(lm.jm_min, -2.90e-3) <= 0.10 && elapsed < 5.0;
    verdict(
        "1",
        pass,
        format!(
            "J_M minimum {:.4e} at T_M = {:.4} (want -2.90e-3 ±10% at 0.600 ±0.02); 500-point single-thread sweep {elapsed:.2} s (< 5 s)",
            lm.jm_min, lm.tm_jm_min
        ),
    );
}

#[test]
fn criterion_02_jm_zero_crossing() {
    let lm = x_axis().find_landmarks(x_axis_sweep()).unwrap();
    let [jl, _, jr] = lm.currents_at_zero;
    let pass = (lm.tm_jm_zero - 4.17).abs() <= 0.05
        && rel(lm.alpha_at_zero, 18.3) <= 0.05
        && rel(jl, 0.179) <= 0.05
        && rel(-jr, 0.179) <= 0.05;
    verdict(
        "2",
        pass,
        format!(
            "J_M = 0 at T_M = {:.4} (want 4.17 ±0.05), alpha_L = {:.3} (want 18.3 ±5%), J_L = {jl:.4}, -J_R = {:.4} (want 0.179 ±5%)",
            lm.tm_jm_zero, lm.alpha_at_zero, -jr
        ),
    );
}

#[test]
fn criterion_03_alpha_at_0650() {
    let a = x_axis().amplification(0.650, None).unwrap();
    let half = x_axis().amplification(0.650, Some(0.5 * a.step())).unwrap();
    let double = x_axis().amplification(0.650, Some(2.0 * a.step())).unwrap();
    let pass = rel(a.alpha_l, 1.42e3) <= 0.15;
    verdict(
        "3",
        pass,
        format!(
            "alpha_L(0.650) = {:.2} with step {:.1e} ({:.2} at half step, {:.2} at double step); want 1.42e3 ±15%",
            a.alpha_l,
            a.step(),
            half.alpha_l,
            double.alpha_l
        ),
    );
}

#[test]
fn criterion_04_local_temperatures() {
    let p = Canonical::XAxis.params();
    let report = x_axis().report_at(4.17).unwrap();
    let t_loc_m = local_temperature(&report.rho, &p.with_tm(4.17), Site::M).unwrap();
    let middle_ok = (t_loc_m - 4.17).abs() <= 0.05;

    let mut min_gap_l = f64::INFINITY;
    let mut min_gap_r = f64::INFINITY;
    for point in &x_axis_sweep().points {
        let [l, _, r] = point.t_loc;
        min_gap_l = min_gap_l.min((l.unwrap() - p.temp[0]).abs());
        min_gap_r = min_gap_r.min((r.unwrap() - p.temp[2]).abs());
    }
    let lateral_ok = min_gap_l > 1e-3 && min_gap_r > 1e-3;
    verdict(
        "4",
        middle_ok && lateral_ok,
        format!(
            "T_loc_M(4.17) = {t_loc_m:.4} (want 4.17 ±0.05: {}); min |T_loc_L - T_L| = {min_gap_l:.3}, min |T_loc_R - T_R| = {min_gap_r:.3} (want > 1e-3: {})",
            if middle_ok { "ok" } else { "miss" },
            if lateral_ok { "ok" } else { "miss" },
        ),
    );
}

#[test]
fn criterion_05_z_axis_window() {
    let model = Transistor::new(&Canonical::ZAxis.params()).unwrap();
    let sweep = model.sweep(&canonical_grid(), None).unwrap();
    let above: Vec<(f64, f64)> = sweep
        .points
        .iter()
        .filter(|p| p.tm > 0.3)
        .filter_map(|p| p.alpha.map(|a| (p.tm, a[0].abs())))
        .collect();
    let (worst_tm, worst) = above.iter().cloned().fold((0.0, 0.0), |m, x| if x.1 > m.1 { x } else { m });
    let last_amplifying = above.iter().filter(|x| x.1 > 2.0).map(|x| x.0).fold(0.0, f64::max);
    verdict(
        "5",
        worst <= 2.0,
        format!(
            "z-axis: max |alpha_L| above T_M = 0.3 is {worst:.3} at T_M = {worst_tm:.3}; |alpha_L| > 2 persists up to T_M = {last_amplifying:.3} (want none above 0.3)"
        ),
    );
}

#[test]
fn criterion_06_robustness() {
    let means = [0.0, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 0.3];
    let mut unit_at_zero = true;
    let mut lines = Vec::new();

    let mut x_small = true;
    let mut x_decays = true;
    for axes in [vec![Axis::Y], vec![Axis::Z], vec![Axis::Y, Axis::Z]] {
        let template = PerturbationSpec::new(&Canonical::XAxis.params(), &axes, 0.0);
        let curve = zeta_curve(&template, &means, DEFAULT_SIGMA_RATIO).unwrap();
        let z: Vec<f64> = curve.iter().map(|(_, z)| z.as_ref().unwrap().zeta).collect();
        unit_at_zero &= z[0] == 1.0;
        x_small &= z[1] > 0.5;
        x_decays &= z[6].abs() < 0.05;
        lines.push(format!("x-base {axes:?}: zeta(1e-6) = {:.4}, zeta(0.3) = {:.2e}", z[1], z[6]));
    }

    let mut z_suppressed = true;
    for axes in [vec![Axis::X], vec![Axis::Y], vec![Axis::X, Axis::Y]] {
        let template = PerturbationSpec::new(&Canonical::ZAxis.params(), &axes, 0.0);
        let curve = zeta_curve(&template, &means, DEFAULT_SIGMA_RATIO).unwrap();
        let z: Vec<f64> = curve.iter().map(|(_, z)| z.as_ref().unwrap().zeta).collect();
        unit_at_zero &= z[0] == 1.0;
        let worst = z[2..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        z_suppressed &= worst < 0.05;
        lines.push(format!(
            "z-base {axes:?}: zeta(1e-4) = {:.4}, max zeta over means >= 1e-4 = {worst:.4}",
            z[2]
        ));
    }
    verdict(
        "6",
        unit_at_zero && x_small && x_decays && z_suppressed,
        format!(
            "zeta(0) == 1: {unit_at_zero}; x-base zeta > 0.5 at small mean: {x_small}; x-base |zeta| < 0.05 at mean 0.3: {x_decays}; z-base zeta < 0.05 for mean >= 1e-4: {z_suppressed} [{}]",
            lines.join("; ")
        ),
    );
}

#[test]
fn criterion_07_local_model() {
    let p = Canonical::XAxis.params();
    let mut dev = [0.0f64; 3];
    let mut local_jm = Vec::new();
    for point in &x_axis_sweep().points {
        let t_loc = point.t_loc.map(|t| t.unwrap());
        let local = local_model_currents(&p.with_tm(point.tm), t_loc);
        for i in [0, 2] {
            dev[i] = dev[i].max(rel(local[i], point.currents[i]));
        }
        local_jm.push(local[1]);
    }
    let interior_min = local_jm.windows(3).any(|w| w[1] < w[0] && w[1] < w[2]);
    verdict(
        "7",
        dev[0] < dev[2] && !interior_min,
        format!(
            "max relative deviation of local J_L = {:.3e}, of local J_R = {:.3e}; local J_M interior minimum: {interior_min}",
            dev[0], dev[2]
        ),
    );
}

#[test]
fn criterion_08_equilibrium() {
    let mut worst_state = 0.0f64;
    let mut worst_current = 0.0f64;
    for base in [Canonical::XAxis, Canonical::ZAxis] {
        for t in [0.1, 1.0, 5.0] {
            let p = base.params().with_temps([t; 3]);
            let system = DressedSystem::new(&p).unwrap();
            let report = steady_state(&system.liouvillian(p.kappa, p.temp)).unwrap();
            worst_state = worst_state.max(report.rho.max_diff(&thermal_state(system.spectrum(), t)));
            worst_current = report.currents.iter().fold(worst_current, |m, j| m.max(j.abs()));
        }
    }
    verdict(
        "8",
        worst_state <= 1e-9 && worst_current <= 1e-10,
        format!("max |rho_ss - Gibbs| = {worst_state:.2e} (<= 1e-9), max |J_p| = {worst_current:.2e} (<= 1e-10)"),
    );
}

#[test]
fn criterion_09_conservation() {
    let mut r = rng(9);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let p = random_params(&mut r);
        let (_, j) = steady_currents(&DressedSystem::new(&p).unwrap().liouvillian(p.kappa, p.temp)).unwrap();
        let scale = j.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        worst = worst.max(j.iter().sum::<f64>().abs() / scale);
    }
    verdict("9", worst <= 1e-9, format!("max |sum J_p| / max |J_p| over 200 draws = {worst:.2e} (<= 1e-9)"));
}

#[test]
fn criterion_10_sum_rule() {
    let mut r = rng(10);
    let mut worst = 0.0f64;
    let mut used = 0;
    while used < 50 {
        let tm = r.random_range(0.01..10.0);
        let Ok(a) = x_axis().amplification(tm, None) else {
            continue;
        };
        used += 1;
        worst = worst.max((a.alpha_l + a.alpha_r + 1.0).abs());
    }
    verdict("10", worst <= 1e-6, format!("max |alpha_L + alpha_R + 1| over 50 points = {worst:.2e} (<= 1e-6)"));
}

#[test]
fn criterion_11_kappa_linearity() {
    let mut worst = 0.0f64;
    for base in [Canonical::XAxis, Canonical::ZAxis] {
        let model = Transistor::new(&base.params()).unwrap();
        for tm in [0.3, 1.0, 2.5, 6.0] {
            let p = base.params().with_tm(tm);
            let j = model.currents_at(tm).unwrap();
            for c in [0.1, 10.0] {
                let scaled = p.with_kappa(p.kappa.map(|k| c * k));
                let jc = steady_currents(&model.system().liouvillian(scaled.kappa, scaled.temp)).unwrap().1;
                for i in 0..3 {
                    worst = worst.max(((jc[i] / j[i]) - c).abs() / c);
                }
            }
        }
    }
    verdict("11", worst <= 1e-9, format!("max |J(c kappa)/J(kappa) - c| / c = {worst:.2e} (<= 1e-9)"));
}

#[test]
fn criterion_12_time_evolution_oracle() {
    let mut params: Vec<_> = vec![Canonical::XAxis.params().with_tm(0.65), Canonical::ZAxis.params().with_tm(0.1)];
    let mut r = rng(12);
    params.extend((0..20).map(|_| random_params(&mut r)));
    let mut worst = 0.0f64;
    for p in &params {
        let liou = DressedSystem::new(p).unwrap().liouvillian(p.kappa, p.temp);
        let fixed = evolve_to_fixed_point(&liou, 1e-9);
        let report = steady_state(&liou).unwrap();
        worst = worst.max(fixed.max_diff(&report.rho));
    }
    verdict(
        "12",
        worst <= 1e-8,
        format!("max |rho(t -> inf) - rho_ss| over 2 canonical + 20 random configs = {worst:.2e} (<= 1e-8)"),
    );
}

#[test]
fn criterion_13_structure() {
    let system = x_axis().system();
    let spec = system.spectrum();
    let n = spec.dim();
    let pairing = (0..n).map(|k| (spec.eigenvalues[k] + spec.eigenvalues[n - 1 - k]).abs()).fold(0.0, f64::max);
    let parity = spec.to_eigenbasis(&parity_operator());
    let signs: Vec<f64> = (0..n).map(|k| parity[(k, k)].re.signum()).collect();
    let well_defined = (0..n).all(|k| (parity[(k, k)].re.abs() - 1.0).abs() < 1e-10);
    let split = signs.iter().filter(|s| **s > 0.0).count() == 4;
    let pairs_opposite = (0..n / 2).all(|k| signs[k] != signs[n - 1 - k]);

    // levels numbered from the highest; per bath L, M, R
    let expected: Vec<[Vec<usize>; 3]> = vec![
        [vec![2, 3, 5], vec![2, 3, 5, 8], vec![2, 3, 5]],
        [vec![4, 6], vec![4, 6, 7], vec![4, 6]],
        [vec![4, 7], vec![4, 6, 7], vec![4, 7]],
        [vec![8], vec![5, 8], vec![8]],
        [vec![6, 7], vec![6, 7], vec![6, 7]],
        [vec![8], vec![8], vec![8]],
        [vec![8], vec![8], vec![8]],
        [vec![], vec![], vec![]],
    ];
    let table = system.transition_table();
    let table_ok = table == expected;
    verdict(
        "13",
        pairing < 1e-10 && well_defined && split && pairs_opposite && table_ok,
        format!(
            "max |e_k + e_(9-k)| = {pairing:.1e}; parity well defined {well_defined}, 4/4 split {split}, opposite within pairs {pairs_opposite}; transition table matches {table_ok}"
        ),
    );
}

#[test]
fn criterion_14_lamb_shift() {
    let mut r = rng(14);
    let mut worst = 0.0f64;
    for base in [Canonical::XAxis, Canonical::ZAxis] {
        for tm in [0.1, 0.65, 4.17] {
            for _ in 0..3 {
                let change = lamb_shift_invariance_check(&base.params().with_tm(tm), |_, _| r.random_range(-1.0..1.0))
                    .unwrap();
                worst = worst.max(change);
            }
        }
    }
    for _ in 0..6 {
        let p = random_params(&mut r);
        worst = worst.max(lamb_shift_invariance_check(&p, |_, _| r.random_range(-1.0..1.0)).unwrap());
    }
    verdict("14", worst <= 1e-9, format!("max steady-state change under random Lamb shifts = {worst:.2e} (<= 1e-9)"));
}
