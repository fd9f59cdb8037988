//! The sealer checks her seal: an untouched memory always verifies, a read
//! one is caught with probability 1 - 2^-k for k bits.
use quantum_seal::protocol::{alice_verify, encode, public_read, Verdict};
use quantum_seal::RandomSource;

fn main() -> quantum_seal::Result<()> {
    let bits: Vec<u8> = (0..8).map(|i| (i % 3 == 0) as u8).collect();
    let trials = 2_000;
    let (mut untouched, mut read) = (0, 0);
    for trial in 0..trials {
        let mut rand = RandomSource::new(99).fork(trial);
        let (sealed, memory) = encode(&bits, &mut rand)?;

        let mut clean = memory.clone();
        untouched += (alice_verify(&mut clean, &sealed, &mut rand)?.verdict == Verdict::Broken) as u32;

        let mut opened = memory;
        public_read(&mut opened, sealed.reading_basis(), &mut rand)?;
        read += (alice_verify(&mut opened, &sealed, &mut rand)?.verdict == Verdict::Broken) as u32;
    }
    println!("untouched seals broken: {untouched}/{trials}");
    println!("read seals broken:      {read}/{trials} (expect ~{:.4})", 1.0 - 0.5f64.powi(bits.len() as i32));
    Ok(())
}
