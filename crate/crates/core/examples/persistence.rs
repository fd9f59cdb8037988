//! Save the public memory, the sealer's private record and a grant to JSON,
//! load them back and verify.
use quantum_seal::persist::{read_grant, read_seal_document, write_json, GrantDocument, SealDocument};
use quantum_seal::protocol::{alice_verify, bob_verify, default_grant_indices, encode, grant_subset};
use quantum_seal::RandomSource;

fn main() -> quantum_seal::Result<()> {
    let dir = std::env::temp_dir().join(format!("qseal-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let mut rand = RandomSource::new(5);

    let (sealed, memory) = encode(&[1, 1, 0, 1, 0, 0, 1, 1, 0, 1], &mut rand)?;
    let indices = default_grant_indices(&sealed, &mut rand);
    let grant = grant_subset(&sealed, "bob", &indices)?;

    write_json(&dir.join("memory.json"), &SealDocument::public(&memory, sealed.reading_basis()))?;
    write_json(&dir.join("alice.json"), &SealDocument::record(&sealed))?;
    write_json(&dir.join("grant.json"), &GrantDocument::from_grant(&grant))?;
    println!("wrote {}", dir.display());

    let public = read_seal_document(&dir.join("memory.json"))?;
    let loaded = public.to_memory()?;
    assert_eq!(SealDocument::public(&loaded, public.reading_basis), public, "round trip is bit-exact");
    let record = read_seal_document(&dir.join("alice.json"))?.to_sealed()?;
    let grant = read_grant(&dir.join("grant.json"))?;

    println!("grant covers qubits {:?}", grant.indices());
    let alice = alice_verify(&mut loaded.clone(), &record, &mut rand)?;
    let bob = bob_verify(grant, &mut loaded.clone(), &mut rand)?;
    println!("alice: {:?}, bob: {:?}", alice.verdict, bob.verdict);

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
