//! The three reading strategies: what each recovers and what it leaves for
//! the sealer to find.
use quantum_seal::adversary::{run_attack, Strategy};
use quantum_seal::protocol::{alice_verify, encode, Verdict};
use quantum_seal::RandomSource;

fn main() -> quantum_seal::Result<()> {
    let bits = [0, 1, 1, 0, 1];
    let trials = 2_000;
    println!("{:<14} {:>10} {:>12}", "strategy", "correct", "alice broke");
    for strategy in Strategy::ALL {
        let (mut correct, mut broken) = (0, 0);
        for trial in 0..trials {
            let mut rand = RandomSource::new(17).fork(trial);
            let (sealed, mut memory) = encode(&bits, &mut rand)?;
            let outcome = run_attack(strategy, &mut memory, &mut rand)?;
            correct += (outcome.recovered_bits == bits) as u32;
            broken += (alice_verify(&mut memory, &sealed, &mut rand)?.verdict == Verdict::Broken) as u32;
        }
        println!("{:<14} {:>10} {:>12}", strategy.name(), correct, broken);
    }
    Ok(())
}
