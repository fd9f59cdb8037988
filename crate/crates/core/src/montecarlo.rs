//! Seeded trial runner and detection statistics.
//!
//! Trial `i` of a run seeded with `s` draws every random number from streams
//! derived from `(s, i, role)`, so serial and parallel runs agree exactly.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{run_attack, Strategy};
use crate::error::{Result, SealError};
use crate::protocol::{
    alice_verify, bob_verify, encode, grant_size, grant_subset, sample_grant_indices, Verdict, BLOCK_SIZE,
};
use crate::rng::{RandomSource, Role};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageSpec {
    /// Fresh uniformly random bits of this length in every trial.
    Length(usize),
    Bits(Vec<u8>),
}

impl MessageSpec {
    pub fn len(&self) -> usize {
        match self {
            MessageSpec::Length(n) => *n,
            MessageSpec::Bits(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrantSpec {
    Indices(Vec<usize>),
    /// Uniform sample of this fraction of the seal qubits, redrawn per trial.
    Fraction(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub message: MessageSpec,
    #[serde(with = "strategy_or_none")]
    pub strategy: Option<Strategy>,
    pub grant: GrantSpec,
    pub trials: u64,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(message: MessageSpec, strategy: Option<Strategy>, trials: u64, seed: u64) -> Self {
        Self {
            message,
            strategy,
            grant: GrantSpec::Fraction(crate::protocol::DEFAULT_GRANT_FRACTION),
            trials,
            seed,
        }
    }

    pub fn with_grant(mut self, grant: GrantSpec) -> Self {
        self.grant = grant;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.message.len() * BLOCK_SIZE
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(SealError::InvalidConfig("trials must be at least 1".into()));
        }
        if self.message.is_empty() {
            return Err(SealError::EmptyMessage);
        }
        if let MessageSpec::Bits(bits) = &self.message {
            if let Some(&b) = bits.iter().find(|&&b| b > 1) {
                return Err(SealError::InvalidBit(b));
            }
        }
        let n = self.num_qubits();
        match &self.grant {
            GrantSpec::Fraction(f) => {
                grant_size(n, *f)?;
            }
            GrantSpec::Indices(idx) => {
                if idx.is_empty() {
                    return Err(SealError::EmptyGrant);
                }
                for (k, &i) in idx.iter().enumerate() {
                    if i >= n {
                        return Err(SealError::IndexOutOfRange { index: i, len: n });
                    }
                    if idx[..k].contains(&i) {
                        return Err(SealError::DuplicateIndex(i));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Serializes `Option<Strategy>` as its name, with `"none"` for no attack.
pub mod strategy_or_none {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::adversary::Strategy;

    pub fn serialize<S: Serializer>(value: &Option<Strategy>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(value.map_or("none", Strategy::name))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Strategy>, D::Error> {
        let name = String::deserialize(d)?;
        parse(&name).map_err(D::Error::custom)
    }

    pub fn parse(name: &str) -> crate::Result<Option<Strategy>> {
        if name == "none" {
            Ok(None)
        } else {
            name.parse().map(Some)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Whether the attacker recovered the message; `None` when no attack ran.
    pub message_ok: Option<bool>,
    pub alice_mismatches: usize,
    pub alice_verdict: Verdict,
    pub bob_failures: usize,
    pub bob_verdict: Verdict,
    /// Control qubits among the reader's granted copies.
    pub control_copies: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub trials: u64,
    pub message_errors: u64,
    pub alice_detections: u64,
    pub alice_detection_rate: f64,
    pub alice_wilson_95: [f64; 2],
    pub bob_detections: u64,
    pub bob_detection_rate: f64,
    pub bob_wilson_95: [f64; 2],
    pub mean_control_copies: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub config: TrialConfig,
    pub aggregates: Aggregates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_trial: Option<Vec<TrialRecord>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// Runs `config.trials` independent encode → attack → verify trials in parallel.
pub fn run_trials(config: &TrialConfig, keep_per_trial: bool) -> Result<TrialReport> {
    run_trials_with(config, Execution::Parallel, keep_per_trial)
}

pub fn run_trials_with(config: &TrialConfig, execution: Execution, keep_per_trial: bool) -> Result<TrialReport> {
    config.validate()?;
    let records: Vec<TrialRecord> = match execution {
        Execution::Serial => (0..config.trials)
            .map(|i| run_one(config, i))
            .collect::<Result<_>>()?,
        Execution::Parallel => (0..config.trials)
            .into_par_iter()
            .map(|i| run_one(config, i))
            .collect::<Result<_>>()?,
    };
    let aggregates = aggregate(&records);
    Ok(TrialReport {
        config: config.clone(),
        aggregates,
        per_trial: keep_per_trial.then_some(records),
    })
}

/// One trial. Alice and Bob each verify their own copy of the post-attack memory.
pub fn run_one(config: &TrialConfig, trial: u64) -> Result<TrialRecord> {
    let stream = |role| RandomSource::for_role(config.seed, trial, role);
    let bits = match &config.message {
        MessageSpec::Bits(b) => b.clone(),
        MessageSpec::Length(n) => {
            let mut rand = stream(Role::Message);
            (0..*n).map(|_| rand.bit()).collect()
        }
    };
    let (sealed, mut memory) = encode(&bits, &mut stream(Role::Encode))?;
    let indices = match &config.grant {
        GrantSpec::Indices(idx) => idx.clone(),
        GrantSpec::Fraction(f) => sample_grant_indices(sealed.num_qubits(), *f, &mut stream(Role::Grant))?,
    };
    let grant = grant_subset(&sealed, "bob", &indices)?;
    let control_copies = indices.iter().filter(|&&i| sealed.is_control(i)).count();

    let message_ok = match config.strategy {
        Some(strategy) => Some(run_attack(strategy, &mut memory, &mut stream(Role::Attack))?.recovered_bits == bits),
        None => None,
    };
    let mut alice_memory = memory.clone();
    let alice = alice_verify(&mut alice_memory, &sealed, &mut stream(Role::AliceVerify))?;
    let bob = bob_verify(grant, &mut memory, &mut stream(Role::BobVerify))?;
    Ok(TrialRecord {
        message_ok,
        alice_mismatches: alice.mismatches,
        alice_verdict: alice.verdict,
        bob_failures: bob.mismatches,
        bob_verdict: bob.verdict,
        control_copies,
    })
}

fn aggregate(records: &[TrialRecord]) -> Aggregates {
    let n = records.len() as u64;
    let count = |f: &dyn Fn(&TrialRecord) -> bool| records.iter().filter(|r| f(r)).count() as u64;
    let message_errors = count(&|r| r.message_ok == Some(false));
    let alice_detections = count(&|r| r.alice_verdict == Verdict::Broken);
    let bob_detections = count(&|r| r.bob_verdict == Verdict::Broken);
    let copies: usize = records.iter().map(|r| r.control_copies).sum();
    Aggregates {
        trials: n,
        message_errors,
        alice_detections,
        alice_detection_rate: alice_detections as f64 / n as f64,
        alice_wilson_95: wilson_interval(alice_detections, n),
        bob_detections,
        bob_detection_rate: bob_detections as f64 / n as f64,
        bob_wilson_95: wilson_interval(bob_detections, n),
        mean_control_copies: copies as f64 / n as f64,
    }
}

/// Wilson score interval at 95% confidence, widened if needed so that it
/// always contains the point estimate.
pub fn wilson_interval(successes: u64, trials: u64) -> [f64; 2] {
    if trials == 0 {
        return [0.0, 1.0];
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    [(center - half).clamp(0.0, p), (center + half).clamp(p, 1.0)]
}

/// Half-width of the 3σ binomial band for `trials` draws at probability `p`.
pub fn three_sigma(p: f64, trials: u64) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalRates {
    pub alice_detection: f64,
    pub bob_detection: f64,
}

/// Probability that an attack leaves a block's control qubit measured in Z.
pub fn control_disturbance(strategy: Option<Strategy>) -> f64 {
    match strategy {
        None | Some(Strategy::Collective) => 0.0,
        Some(Strategy::SingleQubit) => 1.0,
        // The pair read first contains the control with probability 2/3;
        // the disagree branch only reads a message qubit.
        Some(Strategy::Partial) => 2.0 / 3.0,
    }
}

/// Closed-form detection probabilities for a config.
///
/// A disturbed control qubit mismatches Alice's check with probability 1/2
/// and fails a SWAP test against a fresh copy with probability 1/4. Per
/// block, the granted copies include the control with probability m/3 for
/// m granted positions. Blocks are independent.
pub fn theoretical_rates(config: &TrialConfig) -> Result<TheoreticalRates> {
    config.validate()?;
    let q = control_disturbance(config.strategy);
    let k = config.message.len();
    let alice_detection = 1.0 - (1.0 - q / 2.0).powi(k as i32);
    let block_pass = |m: usize| 1.0 - m as f64 * q / 12.0;
    let bob_pass = match &config.grant {
        GrantSpec::Indices(idx) => {
            let mut per_block = vec![0usize; k];
            for &i in idx {
                per_block[i / BLOCK_SIZE] += 1;
            }
            per_block.into_iter().map(block_pass).product()
        }
        GrantSpec::Fraction(f) => {
            // Average over uniform g-subsets of the 3k qubits: weights[j]
            // sums Π C(3, m_b)·pass(m_b) over block counts totalling j.
            let g = grant_size(config.num_qubits(), *f)?;
            let mut weights = vec![0.0f64; g + 1];
            weights[0] = 1.0;
            for _ in 0..k {
                let mut next = vec![0.0f64; g + 1];
                for (j, &w) in weights.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    for m in 0..=BLOCK_SIZE.min(g - j) {
                        next[j + m] += w * binomial(BLOCK_SIZE, m) * block_pass(m);
                    }
                }
                weights = next;
            }
            weights[g] / binomial(config.num_qubits(), g)
        }
    };
    Ok(TheoreticalRates {
        alice_detection,
        bob_detection: 1.0 - bob_pass,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Fixed-width terminal summary of a report.
pub fn render_table(report: &TrialReport, theory: Option<&TheoreticalRates>) -> String {
    let c = &report.config;
    let a = &report.aggregates;
    let grant = match &c.grant {
        GrantSpec::Fraction(f) => format!("fraction {f}"),
        GrantSpec::Indices(idx) => format!("{} indices", idx.len()),
    };
    let mut out = String::new();
    let _ = writeln!(out, "{:<16}{}", "strategy", c.strategy.map_or("none", Strategy::name));
    let _ = writeln!(out, "{:<16}{}", "message bits", c.message.len());
    let _ = writeln!(out, "{:<16}{}", "grant", grant);
    let _ = writeln!(out, "{:<16}{}", "trials", c.trials);
    let _ = writeln!(out, "{:<16}{}", "seed", c.seed);
    let _ = writeln!(out, "{:<16}{}", "message errors", a.message_errors);
    let _ = writeln!(
        out,
        "{:<8}{:>12}{:>10}{:>24}{:>10}",
        "", "detections", "rate", "wilson 95%", "theory"
    );
    let rows = [
        ("alice", a.alice_detections, a.alice_detection_rate, a.alice_wilson_95, theory.map(|t| t.alice_detection)),
        ("bob", a.bob_detections, a.bob_detection_rate, a.bob_wilson_95, theory.map(|t| t.bob_detection)),
    ];
    for (name, hits, rate, ci, th) in rows {
        let interval = format!("[{:.5}, {:.5}]", ci[0], ci[1]);
        let th = th.map_or_else(|| "-".to_owned(), |t| format!("{t:.5}"));
        let _ = writeln!(out, "{name:<8}{hits:>12}{rate:>10.5}{interval:>24}{th:>10}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(bits: usize, strategy: Option<Strategy>, trials: u64) -> TrialConfig {
        TrialConfig::new(MessageSpec::Length(bits), strategy, trials, 17)
    }

    #[test]
    fn no_attack_no_detection() {
        let report = run_trials(&cfg(6, None, 300), false).unwrap();
        assert_eq!(report.aggregates.alice_detections, 0);
        assert_eq!(report.aggregates.bob_detections, 0);
        assert_eq!(report.aggregates.message_errors, 0);
    }

    #[test]
    fn serial_and_parallel_agree() {
        let c = cfg(5, Some(Strategy::Partial), 400);
        let a = run_trials_with(&c, Execution::Serial, true).unwrap();
        let b = run_trials_with(&c, Execution::Parallel, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        assert!(cfg(3, None, 0).validate().is_err());
        assert!(cfg(0, None, 1).validate().is_err());
        assert!(cfg(3, None, 1).with_grant(GrantSpec::Fraction(0.0)).validate().is_err());
        assert!(cfg(3, None, 1).with_grant(GrantSpec::Fraction(1.2)).validate().is_err());
        assert!(cfg(3, None, 1).with_grant(GrantSpec::Indices(vec![9])).validate().is_err());
        assert!(cfg(3, None, 1).with_grant(GrantSpec::Indices(vec![1, 1])).validate().is_err());
        let bad_bits = TrialConfig::new(MessageSpec::Bits(vec![0, 2]), None, 1, 0);
        assert!(matches!(bad_bits.validate(), Err(SealError::InvalidBit(2))));
    }

    #[test]
    fn strategy_names_in_config_json() {
        let c = cfg(4, Some(Strategy::SingleQubit), 10);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"strategy\":\"single-qubit\""));
        let none = serde_json::to_string(&cfg(4, None, 10)).unwrap();
        assert!(none.contains("\"strategy\":\"none\""));
        let back: TrialConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        let bad = json.replace("single-qubit", "telepathy");
        assert!(serde_json::from_str::<TrialConfig>(&bad).is_err());
    }

    #[test]
    fn wilson_contains_estimate() {
        for (s, n) in [(0, 10), (10, 10), (3, 7), (0, 100_000), (50_000, 100_000)] {
            let [lo, hi] = wilson_interval(s, n);
            let p = s as f64 / n as f64;
            assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }
        // Reference value for 5 of 10 successes.
        let [lo, hi] = wilson_interval(5, 10);
        assert!((lo - 0.236_593).abs() < 1e-6 && (hi - 0.763_407).abs() < 1e-6);
    }

    #[test]
    fn theory_closed_forms() {
        let single = theoretical_rates(&cfg(1, Some(Strategy::SingleQubit), 1)).unwrap();
        assert!((single.alice_detection - 0.5).abs() < 1e-15);
        for k in [1, 5, 20] {
            let t = theoretical_rates(&cfg(k, Some(Strategy::Collective), 1)).unwrap();
            assert_eq!((t.alice_detection, t.bob_detection), (0.0, 0.0));
        }
        let partial = theoretical_rates(&cfg(2, Some(Strategy::Partial), 1)).unwrap();
        assert!((partial.alice_detection - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn bob_theory_with_all_controls_granted() {
        // Granting every qubit of 16 blocks includes exactly 16 control copies.
        let all: Vec<usize> = (0..48).collect();
        let c = cfg(16, Some(Strategy::SingleQubit), 1).with_grant(GrantSpec::Indices(all));
        let t = theoretical_rates(&c).unwrap();
        assert!((t.bob_detection - (1.0 - 0.75f64.powi(16))).abs() < 1e-12);
    }

    #[test]
    fn fraction_dp_matches_enumeration() {
        // 2 blocks, 6 qubits, grant of 2: enumerate all 15 subsets.
        let c = cfg(2, Some(Strategy::SingleQubit), 1).with_grant(GrantSpec::Fraction(2.0 / 6.0));
        let t = theoretical_rates(&c).unwrap();
        let mut total = 0.0;
        let mut count = 0;
        for a in 0..6 {
            for b in a + 1..6 {
                let same_block = a / 3 == b / 3;
                let pass = if same_block { 1.0 - 2.0 / 12.0 } else { (1.0 - 1.0 / 12.0f64).powi(2) };
                total += pass;
                count += 1;
            }
        }
        assert!((t.bob_detection - (1.0 - total / count as f64)).abs() < 1e-12);
    }

    #[test]
    fn table_lists_both_rates() {
        let report = run_trials(&cfg(2, Some(Strategy::SingleQubit), 50), false).unwrap();
        let theory = theoretical_rates(&report.config).unwrap();
        let table = render_table(&report, Some(&theory));
        assert!(table.contains("alice") && table.contains("bob") && table.contains("single-qubit"));
    }
}
