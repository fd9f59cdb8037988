//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use quantum_seal::adversary::{attack_collective, Strategy, ONE_SUBSPACE, ZERO_SUBSPACE};
use quantum_seal::cli;
use quantum_seal::montecarlo::{run_trials, run_trials_with, three_sigma, Execution, GrantSpec, MessageSpec, TrialConfig};
use quantum_seal::protocol::{encode, encode_with_choices, public_read, swap_test, QuantumMemory, SwapVerdict, CONTROL_STATES};
use quantum_seal::qsim::{self, Basis, QubitSpec, StateRegister, TOLERANCE};
use quantum_seal::RandomSource;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Uniform point on the Bloch sphere, built directly from angles.
fn random_qubit(rng: &mut RandomSource) -> [Complex64; 2] {
    let cos_theta = 2.0 * rng.uniform() - 1.0;
    let theta = cos_theta.acos();
    let phi = 2.0 * PI * rng.uniform();
    [
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

fn register(v: [Complex64; 2]) -> StateRegister {
    StateRegister::from_amplitudes(v.to_vec(), 1e-12).unwrap()
}

fn overlap_sqr(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

fn ac1_error_free_reading() -> Outcome {
    let start = Instant::now();
    let mut rng = RandomSource::new(0xac01);
    let trials = 10_000;
    let mut errors = 0;
    for _ in 0..trials {
        let len = 1 + rng.below(64);
        let bits: Vec<u8> = (0..len).map(|_| rng.bit()).collect();
        let (_, mut memory) = encode(&bits, &mut rng).map_err(|e| e.to_string())?;
        let read = public_read(&mut memory, Basis::Z, &mut rng).map_err(|e| e.to_string())?;
        if read.bits != bits {
            errors += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        errors == 0 && elapsed < Duration::from_secs(10),
        format!("{errors} errors in {trials} messages, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn ac2_alice_half() -> Outcome {
    let config = TrialConfig::new(MessageSpec::Length(1), Some(Strategy::SingleQubit), 100_000, 0xac02);
    let report = run_trials(&config, false).map_err(|e| e.to_string())?;
    let rate = report.aggregates.alice_detection_rate;
    check((rate - 0.5).abs() <= 0.005, format!("rate {rate:.5}, target 0.5 ± 0.005"))
}

fn ac3_swap_quarter() -> Outcome {
    let mut rng = RandomSource::new(0xac03);
    let n = 100_000;
    let mut fails = 0;
    for _ in 0..n {
        let control = CONTROL_STATES[rng.below(4)];
        let mut memory = QuantumMemory::from_specs([control]);
        memory.measure(0, Basis::Z, &mut rng).map_err(|e| e.to_string())?;
        let copy = qsim::prepare(control);
        if swap_test(&copy, &mut memory, 0, &mut rng).map_err(|e| e.to_string())? == SwapVerdict::Fail {
            fails += 1;
        }
    }
    let rate = fails as f64 / n as f64;
    check((rate - 0.25).abs() <= 0.005, format!("fail rate {rate:.5}, target 0.25 ± 0.005"))
}

fn ac4_swap_soundness() -> Outcome {
    let mut rng = RandomSource::new(0xac04);
    let n = 100_000;
    let mut fails = 0;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let state = random_qubit(&mut rng);
        let seal = register(state);
        let mut memory = QuantumMemory::from_registers(vec![(vec![Some(0)], seal.clone())]).map_err(|e| e.to_string())?;
        if swap_test(&seal, &mut memory, 0, &mut rng).map_err(|e| e.to_string())? == SwapVerdict::Fail {
            fails += 1;
        }
        let f = memory.qubit_fidelity(0, &seal).map_err(|e| e.to_string())?;
        worst = worst.max((1.0 - f).abs());
    }
    check(
        fails == 0 && worst < TOLERANCE,
        format!("{fails} failures in {n}; max |1 − fidelity| = {worst:.2e}"),
    )
}

fn ac5_collective_undetectable() -> Outcome {
    let config = TrialConfig::new(MessageSpec::Length(20), Some(Strategy::Collective), 10_000, 0xac05);
    let report = run_trials(&config, false).map_err(|e| e.to_string())?;
    let a = &report.aggregates;

    let mut rng = RandomSource::new(0xac05);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let bits: Vec<u8> = (0..20).map(|_| rng.bit()).collect();
        let (sealed, mut memory) = encode(&bits, &mut rng).map_err(|e| e.to_string())?;
        attack_collective(&mut memory, &mut rng).map_err(|e| e.to_string())?;
        for (k, block) in sealed.blocks().iter().enumerate() {
            let pre: Vec<StateRegister> = block.qubit_specs().iter().map(|&s| qsim::prepare(s)).collect();
            let post: Vec<StateRegister> = (0..3)
                .map(|p| {
                    let (reg, _) = memory.slot(3 * k + p).unwrap();
                    assert_eq!(reg.num_qubits(), 1, "triplet left entangled");
                    reg.clone()
                })
                .collect();
            let f = qsim::fidelity(&qsim::merge(&pre).unwrap(), &qsim::merge(&post).unwrap()).unwrap();
            worst = worst.max(1.0 - f);
        }
    }
    check(
        a.message_errors == 0 && a.alice_detections == 0 && a.bob_detections == 0 && worst < 1e-12,
        format!(
            "message errors {}, alice {}, bob {} of {}; max disturbance {worst:.2e}",
            a.message_errors, a.alice_detections, a.bob_detections, a.trials
        ),
    )
}

fn triplet_amplitudes(specs: [QubitSpec; 3]) -> Vec<Complex64> {
    let v: Vec<[Complex64; 2]> = specs.iter().map(|s| s.basis.vector(s.bit)).collect();
    (0..8)
        .map(|i| v[0][(i >> 2) & 1] * v[1][(i >> 1) & 1] * v[2][i & 1])
        .collect()
}

fn encodings(bit: u8) -> Vec<[QubitSpec; 3]> {
    let message = QubitSpec::new(Basis::Z, bit).unwrap();
    let mut all = Vec::new();
    for position in 0..3 {
        for control in CONTROL_STATES {
            let mut specs = [message; 3];
            specs[position] = control;
            all.push(specs);
        }
    }
    all
}

fn ac6_orthogonality() -> Outcome {
    let zeros = encodings(0);
    let ones = encodings(1);
    let mut worst = 0.0f64;
    for z in &zeros {
        for o in &ones {
            worst = worst.max(overlap_sqr(&triplet_amplitudes(*z), &triplet_amplitudes(*o)));
        }
    }
    // Each encoding also sits wholly inside its projector's span.
    let weight = |amps: &[Complex64], set: &[usize]| set.iter().map(|&i| amps[i].norm_sqr()).sum::<f64>();
    let spans = zeros.iter().all(|s| (weight(&triplet_amplitudes(*s), &ZERO_SUBSPACE) - 1.0).abs() < TOLERANCE)
        && ones.iter().all(|s| (weight(&triplet_amplitudes(*s), &ONE_SUBSPACE) - 1.0).abs() < TOLERANCE);
    check(
        zeros.len() == 12 && ones.len() == 12 && worst < TOLERANCE && spans,
        format!("{}×{} pairs, max fidelity {worst:.2e}", zeros.len(), ones.len()),
    )
}

fn ac7_oracle_equivalence() -> Outcome {
    let mut rng = RandomSource::new(0xac07);
    let pairs = 100;
    let samples = 10_000;
    let mut swap_outliers = 0;
    let mut born_outliers = 0;
    for _ in 0..pairs {
        let t = random_qubit(&mut rng);
        let s = random_qubit(&mut rng);
        let expected = 0.5 - 0.5 * overlap_sqr(&t, &s);
        let test = register(t);
        let seal = register(s);
        let mut fails = 0;
        for _ in 0..samples {
            let mut memory = QuantumMemory::from_registers(vec![(vec![Some(0)], seal.clone())]).unwrap();
            if swap_test(&test, &mut memory, 0, &mut rng).unwrap() == SwapVerdict::Fail {
                fails += 1;
            }
        }
        let f = fails as f64 / samples as f64;
        if (f - expected).abs() > three_sigma(expected, samples as u64) {
            swap_outliers += 1;
        }

        let basis = Basis::ALL[rng.below(3)];
        let expected = overlap_sqr(&basis.vector(0), &s);
        let mut zeros = 0;
        for _ in 0..samples {
            if qsim::measure(&seal, 0, basis, &mut rng).unwrap().value == 0 {
                zeros += 1;
            }
        }
        let f = zeros as f64 / samples as f64;
        if (f - expected).abs() > three_sigma(expected, samples as u64) {
            born_outliers += 1;
        }
    }
    check(
        swap_outliers == 0 && born_outliers == 0,
        format!("{pairs} pairs × {samples}: {swap_outliers} SWAP and {born_outliers} Born outliers beyond 3σ"),
    )
}

fn ac8_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = TrialConfig::new(MessageSpec::Length(12), Some(Strategy::Partial), 2_000, 0xac08)
        .with_grant(GrantSpec::Fraction(0.25));
    let path = dir.path().join("config.json");
    std::fs::write(&path, serde_json::to_string(&config).unwrap()).map_err(|e| e.to_string())?;
    let path = path.to_str().unwrap().to_owned();
    let simulate = |extra: &[&str]| {
        let mut args = vec!["qseal", "--format", "json", "simulate", "--config", path.as_str(), "--per-trial"];
        args.extend_from_slice(extra);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cli::dispatch(args, &mut out, &mut err);
        (code, out)
    };
    let (c1, first) = simulate(&[]);
    let (c2, second) = simulate(&[]);
    let (c3, serial) = simulate(&["--serial"]);
    let in_process = run_trials_with(&config, Execution::Serial, true).unwrap();
    let mut expected = serde_json::to_vec_pretty(&in_process).unwrap();
    expected.push(b'\n');
    check(
        [c1, c2, c3] == [0, 0, 0] && first == second && first == serial && first == expected,
        format!("{} bytes; parallel, parallel, serial and in-process reports identical", first.len()),
    )
}

/// Exhaustive single-block enumeration of the partial reader: control
/// position and skipped position are uniform over 3 each; an observed
/// control collapses to Z outcome o with probability 1/2; Alice then
/// measures in the control's preparation basis.
fn partial_oracle() -> f64 {
    let mut detection = 0.0;
    for control in CONTROL_STATES {
        let prepared = control.basis.vector(control.bit);
        let wrong = control.basis.vector(1 - control.bit);
        for control_pos in 0..3 {
            for skipped in 0..3 {
                let weight = 1.0 / 4.0 / 9.0;
                if skipped == control_pos {
                    continue;
                }
                for o in 0..2u8 {
                    let collapsed = Basis::Z.vector(o);
                    let p_outcome = overlap_sqr(&collapsed, &prepared);
                    detection += weight * p_outcome * overlap_sqr(&wrong, &collapsed);
                }
            }
        }
    }
    detection
}

fn ac9_partial_rate() -> Outcome {
    let oracle = partial_oracle();
    let n = 100_000;
    let config = TrialConfig::new(MessageSpec::Length(1), Some(Strategy::Partial), n, 0xac09);
    let report = run_trials(&config, false).map_err(|e| e.to_string())?;
    let rate = report.aggregates.alice_detection_rate;
    let band = three_sigma(1.0 / 3.0, n);

    // The simulated reader on a fixed block, against the same enumeration.
    let mut rng = RandomSource::new(0xac19);
    let control = QubitSpec::new(Basis::Y, 1).unwrap();
    let (sealed, _) = encode_with_choices(&[0], &[(1, control)]).unwrap();
    let mut detected = 0;
    for _ in 0..n {
        let mut memory = sealed.prepare_memory();
        quantum_seal::adversary::attack_partial(&mut memory, &mut rng).unwrap();
        let report = quantum_seal::protocol::alice_verify(&mut memory, &sealed, &mut rng).unwrap();
        detected += usize::from(report.mismatches > 0);
    }
    let fixed = detected as f64 / n as f64;
    check(
        (oracle - 1.0 / 3.0).abs() < TOLERANCE && (rate - 1.0 / 3.0).abs() <= band && (fixed - oracle).abs() <= band,
        format!("oracle {oracle:.12}, harness {rate:.5}, fixed block {fixed:.5}, band ±{band:.5}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1 error-free public reading", ac1_error_free_reading),
        ("AC2 Alice per-control detection 1/2", ac2_alice_half),
        ("AC3 SWAP failure 1/4 on disturbed control", ac3_swap_quarter),
        ("AC4 SWAP soundness on intact seals", ac4_swap_soundness),
        ("AC5 collective attack undetectable", ac5_collective_undetectable),
        ("AC6 0/1 triplet subspaces orthogonal", ac6_orthogonality),
        ("AC7 sampled vs analytic probabilities", ac7_oracle_equivalence),
        ("AC8 simulate reports byte-identical", ac8_determinism),
        ("AC9 partial-attack detection 1/3", ac9_partial_rate),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {name:<44} {detail} ({secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name:<44} {detail} ({secs:.2}s)");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
