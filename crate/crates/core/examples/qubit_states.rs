//! The simulator on its own: the six basis states, Born-rule statistics and
//! the SWAP test that intended readers use.
use quantum_seal::qsim::{self, Basis, QubitSpec, StateRegister};
use quantum_seal::RandomSource;

fn main() -> quantum_seal::Result<()> {
    let mut rand = RandomSource::new(1);

    println!("overlap |<a|b>|^2 between the six states:");
    let specs: Vec<QubitSpec> = Basis::ALL
        .iter()
        .flat_map(|&b| [QubitSpec::new(b, 0), QubitSpec::new(b, 1)])
        .collect::<quantum_seal::Result<_>>()?;
    for a in &specs {
        let row: Vec<String> = specs
            .iter()
            .map(|b| format!("{:.2}", qsim::fidelity(&qsim::prepare(*a), &qsim::prepare(*b)).unwrap()))
            .collect();
        println!("  {}{} {}", a.basis, a.bit, row.join(" "));
    }

    // |0_x> measured in Z: heads or tails.
    let plus = qsim::prepare(QubitSpec::new(Basis::X, 0)?);
    let shots = 10_000;
    let ones: u32 = (0..shots)
        .map(|_| qsim::measure(&plus, 0, Basis::Z, &mut rand).map(|m| u32::from(m.value)))
        .sum::<quantum_seal::Result<u32>>()?;
    println!("|0_x> in Z: P(1) ~ {:.4}", f64::from(ones) / f64::from(shots));

    // SWAP test by hand: ancilla, H, controlled swap, H, measure ancilla.
    for (label, a, b) in [
        ("same state ", QubitSpec::new(Basis::Y, 0)?, QubitSpec::new(Basis::Y, 0)?),
        ("Y0 vs Z1   ", QubitSpec::new(Basis::Y, 0)?, QubitSpec::new(Basis::Z, 1)?),
    ] {
        let mut fails = 0;
        for _ in 0..shots {
            let joint = qsim::merge(&[StateRegister::basis_state(1, 0)?, qsim::prepare(a), qsim::prepare(b)])?;
            let joint = qsim::apply_hadamard(&joint, 0)?;
            let joint = qsim::apply_cswap(&joint, 0, 1, 2)?;
            let joint = qsim::apply_hadamard(&joint, 0)?;
            fails += qsim::measure(&joint, 0, Basis::Z, &mut rand)?.value as u32;
        }
        println!("SWAP test {label}: fail rate {:.4}", f64::from(fails) / f64::from(shots));
    }
    Ok(())
}
