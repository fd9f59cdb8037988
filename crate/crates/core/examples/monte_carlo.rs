//! Seeded Monte Carlo estimates next to the closed-form rates.
use quantum_seal::adversary::Strategy;
use quantum_seal::montecarlo::{render_table, run_trials, theoretical_rates, GrantSpec, MessageSpec, TrialConfig};

fn main() -> quantum_seal::Result<()> {
    let strategies = [None, Some(Strategy::SingleQubit), Some(Strategy::Partial), Some(Strategy::Collective)];
    for strategy in strategies {
        let config = TrialConfig::new(MessageSpec::Length(4), strategy, 20_000, 2024)
            .with_grant(GrantSpec::Fraction(0.5));
        let report = run_trials(&config, false)?;
        let theory = theoretical_rates(&config)?;
        println!("{}", render_table(&report, Some(&theory)));
    }
    Ok(())
}
