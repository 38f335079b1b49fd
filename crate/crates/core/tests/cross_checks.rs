//! Cross-validation between independent formulations: the general pipeline
//! against closed forms, classical rate equations, and direct integration.

use neqheat::bath::BathModel;
use neqheat::floquet::{
    evolve, lab_frame_state, stationary_state, thermo_report, BathCoupling, FloquetMachine,
    GeneratorDecomposition, PeriodicHamiltonian,
};
use neqheat::linalg::{hermitian_eigen, hermiticity_defect, re, trace_distance, CMat};
use neqheat::oracle::{integrate_trajectory, RateSystem};
use neqheat::verify::{random_driven_pair, random_three_level_engine};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn sigma_x() -> CMat {
    let mut m = CMat::zeros(2, 2);
    m[(0, 1)] = re(1.0);
    m[(1, 0)] = re(1.0);
    m
}

fn build(machine: &FloquetMachine, samples: usize, q_max: u32) -> GeneratorDecomposition {
    let decomposition = machine.decompose(samples).unwrap();
    machine.generator(&decomposition, q_max).unwrap()
}

/// An undriven machine in contact with one thermal bath must settle into the
/// Gibbs state of that bath at the system gap.
#[test]
fn static_machine_settles_into_bath_gibbs_state() {
    let gap = 1.7;
    let temperature = 2.3;
    // Shift the spectrum to {gap, 0} so no quasi-energy folds across the
    // drive zone and the sorted Floquet order is ground-first.
    let mut h0 = CMat::zeros(2, 2);
    h0[(0, 0)] = re(gap);
    let hamiltonian = PeriodicHamiltonian::static_hamiltonian(5.0, h0).unwrap();
    let machine = FloquetMachine::new(
        hamiltonian,
        vec![BathCoupling {
            label: "bath".to_string(),
            operator: sigma_x(),
            bath: BathModel::thermal(temperature, 0.4),
        }],
    )
    .unwrap();
    let generator = build(&machine, 256, 0);
    let rho = stationary_state(&generator).unwrap();

    let boltzmann = (-gap / temperature).exp();
    let ground = 1.0 / (1.0 + boltzmann);
    let mut gibbs = CMat::zeros(2, 2);
    // Quasi-energies sort ascending, so index 0 is the ground state.
    gibbs[(0, 0)] = re(ground);
    gibbs[(1, 1)] = re(1.0 - ground);
    assert!(
        trace_distance(&rho, &gibbs) < 1e-10,
        "stationary state must be the bath Gibbs state"
    );
}

/// In any stationary state the averaged-Hamiltonian energy is constant, so
/// the quanta flux weighted by quasi-energy gaps must vanish, and each
/// channel frequency must sit an integer number of drive quanta away from
/// its gap.
#[test]
fn stationary_energy_bookkeeping_closes() {
    let mut rng = ChaCha12Rng::seed_from_u64(41);
    for trial in 0..4 {
        let (machine, run) = if trial % 2 == 0 {
            random_driven_pair(&mut rng)
        } else {
            random_three_level_engine(&mut rng)
        };
        let generator = build(&machine, run.samples, run.q_max);
        let rho = stationary_state(&generator).unwrap();

        let mut weighted = 0.0;
        let mut scale = 0.0;
        for block in &generator.blocks {
            let quanta_rate = block.current(&rho) / block.frequency;
            weighted += quanta_rate * block.quasi_gap;
            scale += (quanta_rate * block.quasi_gap).abs();

            let offset = (block.frequency - block.quasi_gap) / generator.omega;
            assert!(
                (offset - offset.round()).abs() <= 1e-8,
                "trial {trial}: channel frequency {} is not gap {} plus an integer \
                 number of drive quanta",
                block.frequency,
                block.quasi_gap
            );
        }
        // The identity holds up to Tr[H̄ · (residual of the null-space
        // solve)], so the floor scales with the generator, not the currents.
        assert!(
            weighted.abs() <= 1e-9 * scale + 1e-12 * (1.0 + generator.rate_scale()),
            "trial {trial}: quasi-energy flux {weighted:.3e} must vanish (scale {scale:.3e})"
        );
    }
}

/// In the Floquet basis the stationary populations obey a classical Markov
/// jump process whose rates come straight from the channel operators.
#[test]
fn stationary_populations_match_classical_rate_equations() {
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    let (machine, run) = random_three_level_engine(&mut rng);
    let generator = build(&machine, run.samples, run.q_max);
    let dim = generator.dim;

    let mut rates = vec![vec![0.0f64; dim]; dim];
    for block in &generator.blocks {
        for k in 0..dim {
            for l in 0..dim {
                let weight = block.operator[(k, l)].norm_sqr();
                if weight > 0.0 {
                    // S carries |k⟩⟨l|: emission jumps l → k, absorption k → l.
                    rates[l][k] += block.emission * weight;
                    rates[k][l] += block.absorption * weight;
                }
            }
        }
    }
    let classical = RateSystem::new(rates).unwrap();
    let populations = classical.fixed_point().unwrap();

    let rho = stationary_state(&generator).unwrap();
    for (k, &p) in populations.iter().enumerate() {
        assert!(
            (rho[(k, k)].re - p).abs() < 1e-9,
            "population {k}: pipeline {} vs rate equation {p}",
            rho[(k, k)].re
        );
    }
    // Coherences between non-degenerate quasi-levels must vanish.
    for k in 0..dim {
        for l in 0..dim {
            if k != l {
                assert!(
                    rho[(k, l)].norm() < 1e-9,
                    "stationary coherence ({k},{l}) = {}",
                    rho[(k, l)]
                );
            }
        }
    }
}

/// The matrix-exponential evolution agrees with direct Runge–Kutta
/// integration of the same generator.
#[test]
fn evolution_matches_direct_integration() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let (machine, run) = random_driven_pair(&mut rng);
    let generator = build(&machine, run.samples, run.q_max);

    let mut rho0 = CMat::zeros(2, 2);
    rho0[(0, 0)] = re(0.8);
    rho0[(1, 1)] = re(0.2);
    rho0[(0, 1)] = re(0.2);
    rho0[(1, 0)] = re(0.2);

    let t_end = 3.0;
    let direct = evolve(&generator, &rho0, t_end).unwrap();
    let integrated = integrate_trajectory(&generator.total, &rho0, t_end, 6000).unwrap();
    let (_, last) = integrated.last().unwrap();
    assert!(
        trace_distance(&direct, last) < 1e-9,
        "matrix exponential and Runge-Kutta disagree by {}",
        trace_distance(&direct, last)
    );
}

/// Lab-frame snapshots remain physical density matrices at every sample
/// through several periods and reproduce the basis-rotated state for an
/// undriven machine.
#[test]
fn lab_frame_snapshots_stay_physical() {
    let mut rng = ChaCha12Rng::seed_from_u64(23);
    let (machine, run) = random_three_level_engine(&mut rng);
    let decomposition = machine.decompose(run.samples).unwrap();
    let generator = machine.generator(&decomposition, run.q_max).unwrap();
    let rho = stationary_state(&generator).unwrap();

    for periods in [0u64, 1, 5] {
        for j in [0usize, run.samples / 4, run.samples / 2, run.samples - 1] {
            let lab = lab_frame_state(&decomposition, &rho, j, periods).unwrap();
            let trace: f64 = (0..3).map(|k| lab[(k, k)].re).sum();
            assert!((trace - 1.0).abs() < 1e-10, "trace drift {trace}");
            assert!(hermiticity_defect(&lab) < 1e-10);
            let (eigenvalues, _) = hermitian_eigen(&lab);
            assert!(
                eigenvalues.iter().all(|&e| e > -1e-10),
                "negative population in the lab frame: {eigenvalues:?}"
            );
        }
    }
}

/// The thermodynamic report's aggregates are consistent with its own
/// channel table: intake/outflow split, efficiency, and the position of the
/// effective inverse temperatures inside the contributing range.
#[test]
fn report_aggregates_are_consistent_with_channel_table() {
    let mut rng = ChaCha12Rng::seed_from_u64(61);
    let (machine, run) = random_three_level_engine(&mut rng);
    let generator = build(&machine, run.samples, run.q_max);
    let rho = stationary_state(&generator).unwrap();
    let report = thermo_report(&generator, &rho).unwrap();

    let intake: f64 = report
        .channels
        .iter()
        .map(|c| c.current.max(0.0))
        .sum();
    let outflow: f64 = report
        .channels
        .iter()
        .map(|c| c.current.min(0.0))
        .sum();
    assert!((report.intake - intake).abs() < 1e-12 * (1.0 + intake));
    assert!((report.outflow - outflow).abs() < 1e-12 * (1.0 + outflow.abs()));
    assert!(
        (report.power - (intake + outflow)).abs() < 1e-12 * (1.0 + report.power.abs()),
        "power must equal the net current"
    );

    let efficiency = report.efficiency.expect("engine draw");
    assert!((efficiency - report.power / report.intake).abs() < 1e-12);

    let absorbing: Vec<f64> = report
        .channels
        .iter()
        .filter(|c| c.current > 0.0)
        .map(|c| c.inv_temperature)
        .collect();
    let emitting: Vec<f64> = report
        .channels
        .iter()
        .filter(|c| c.current < 0.0)
        .map(|c| c.inv_temperature)
        .collect();
    let bounds = |xs: &[f64]| {
        (
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    };
    let (lo_plus, hi_plus) = bounds(&absorbing);
    let (lo_minus, hi_minus) = bounds(&emitting);
    assert!(
        report.inv_t_plus >= lo_plus - 1e-12 && report.inv_t_plus <= hi_plus + 1e-12,
        "intake-side inverse temperature {} outside contributing range [{lo_plus}, {hi_plus}]",
        report.inv_t_plus
    );
    assert!(
        report.inv_t_minus >= lo_minus - 1e-12 && report.inv_t_minus <= hi_minus + 1e-12,
        "outflow-side inverse temperature {} outside contributing range [{lo_minus}, {hi_minus}]",
        report.inv_t_minus
    );
    assert_eq!(report.within_bound, Some(true));
}
