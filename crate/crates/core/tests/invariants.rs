use std::f64::consts::PI;

use proptest::prelude::*;
use sngqc::config::SweepKind;
use sngqc::experiment::{SweepResult, SweepRow};
use sngqc::gates::ideal_propagator;
use sngqc::prelude::*;

fn scheme() -> impl Strategy<Value = Scheme> {
    prop_oneof![
        Just(Scheme::Sngqc),
        Just(Scheme::NgqcA),
        Just(Scheme::NgqcB)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn every_scheme_realizes_its_rotation(theta in 0.0..PI, phi in -PI..PI, angle in -PI..PI, s in scheme()) {
        let gp = GateParams::for_rotation(theta, phi, angle, s).unwrap();
        let sched = schedule_for(&gp, TWO_PI * 20e6, TWO_PI * 20e6).unwrap();
        let u = ideal_propagator(&sched, 1e-11).unwrap();
        let target = ideal_single_gate(&gp.with_scheme(Scheme::Sngqc)).matrix;
        let overlap = u.dagger().matmul(&target).trace().norm() / 2.0;
        prop_assert!((overlap - 1.0).abs() < 1e-9, "overlap {}", overlap);
    }

    #[test]
    fn durations_follow_the_areas(theta in 0.0..PI, phi in -PI..PI, angle in -PI..PI) {
        let om = TWO_PI * 20e6;
        let s = schedule_for(&GateParams::for_rotation(theta, phi, angle, Scheme::Sngqc).unwrap(), om, om).unwrap();
        let n = schedule_for(&GateParams::for_rotation(theta, phi, angle, Scheme::NgqcA).unwrap(), om, om).unwrap();
        let short = 2.0 * ((PI / 2.0 - theta).abs() + PI / 2.0 + theta) / om + angle.abs() / om;
        prop_assert!((s.total_duration() - short).abs() < 1e-9 * short);
        prop_assert!((n.total_duration() - 4.0 * PI / om).abs() < 1e-18);
        // short path wins whenever the detour through the free segment is cheaper than the extra area
        if theta <= PI / 2.0 && angle.abs() < PI {
            prop_assert!(s.total_duration() < n.total_duration());
        }
    }

    #[test]
    fn open_evolution_stays_physical(k1 in 0.0..2e6, k2 in 0.0..2e6, v in 0.0..PI, chi in -PI..PI) {
        let tp = TransmonParams { kappa1: k1, kappa2: k2, ..TransmonParams::default() };
        let gp = GateParams::for_rotation(PI / 2.0, 0.0, PI / 2.0, Scheme::Sngqc).unwrap();
        let opts = SimOptions { dt: 2e-11, ..SimOptions::default() };
        let (rho, f) = sngqc::gates::simulate_single_state(&gp, &tp, &QuantumState::qubit(v, chi), &opts).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-9);
        prop_assert!(rho.matrix().hermiticity_error() < 1e-12);
        prop_assert!(rho.min_eigenvalue() > -1e-9);
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn sweep_csv_round_trips(rows in prop::collection::vec((-1e6..1e6f64, scheme(), 0.0..1.0f64, 0.0..1e-2f64, 1e-8..1e-6f64), 0..12)) {
        let res = SweepResult {
            kind: SweepKind::DetuningDelta,
            rows: rows.into_iter().map(|(value, scheme, fidelity, leakage, duration)| SweepRow { value, scheme, fidelity, leakage, duration }).collect(),
        };
        let csv = res.to_csv();
        let back = SweepResult::from_csv(&csv).unwrap();
        prop_assert_eq!(back.to_csv(), csv);
        for (a, b) in back.rows.iter().zip(&res.rows) {
            prop_assert!((a.value - b.value).abs() <= 1e-8 * b.value.abs());
            prop_assert_eq!(a.scheme, b.scheme);
        }
    }
}

#[test]
fn zero_rates_give_unitary_dynamics_on_the_pair() {
    let cp = CoupledParams::default();
    let sched = coupling_schedule(&sngqc::device::CphaseSpec::default(), &cp).unwrap();
    let traj = coupled_trajectory(&cp, &sched);
    let psi = QuantumState::qubit(0.4, 0.0).tensor(&QuantumState::qubit(1.1, 0.3));
    let psi = psi.embed_at(9, &sngqc::device::COMPUTATIONAL_PAIR);
    let rho = lindblad_evolve(&DensityMatrix::pure(&psi), &traj, &[], 5e-12).unwrap();
    // the midpoint propagator is second order, so it needs the finer step
    let u = propagate_unitary(&traj, 0.0, traj.total_duration(), 2e-13).unwrap();
    assert!(rho.matrix().max_abs_diff(&psi.evolve(&u).projector()) < 1e-8);
}

#[test]
fn worse_coherence_never_helps() {
    let gp = GateParams::for_rotation(0.0, 0.0, PI / 4.0, Scheme::Sngqc).unwrap();
    let opts = SimOptions::default();
    let f: Vec<f64> = [0.0, 4e3, 8e3]
        .iter()
        .map(|k| {
            let tp = TransmonParams::default().with_kappa(TWO_PI * k);
            gate_fidelity_single(&gp, &tp, 101, &opts)
                .unwrap()
                .gate_fidelity
        })
        .collect();
    assert!(f[0] > f[1] && f[1] > f[2], "{f:?}");
}
