use crate::error::{Result, SealError};
use crate::qsim::{self, Basis, QubitSpec, StateRegister, MAX_QUBITS};
use crate::rng::RandomSource;

/// Label of one qubit inside a stored register: a public seal index, or
/// `None` for a reader's test qubit left entangled with the seal after a
/// SWAP test.
pub type QubitLabel = Option<usize>;

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    labels: Vec<QubitLabel>,
    state: StateRegister,
}

/// Public quantum memory holding the sealed qubits.
///
/// Each seal index resolves to exactly one slot: a register plus the
/// qubit's position inside it. Untouched qubits live in their own 1-qubit
/// registers; joint operations merge registers, and any qubit that ends up
/// in a product state is split back out afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumMemory {
    entries: Vec<Entry>,
    slots: Vec<(usize, usize)>,
}

impl QuantumMemory {
    /// Prepares one fresh register per spec, in order.
    pub fn from_specs<I: IntoIterator<Item = QubitSpec>>(specs: I) -> Self {
        let entries = specs
            .into_iter()
            .enumerate()
            .map(|(i, spec)| Entry {
                labels: vec![Some(i)],
                state: qsim::prepare(spec),
            })
            .collect();
        let mut memory = Self {
            entries,
            slots: Vec::new(),
        };
        memory.reindex();
        memory
    }

    /// Rebuilds a memory from stored registers, checking that the seal
    /// indices cover `0..N` exactly once.
    pub fn from_registers(registers: Vec<(Vec<QubitLabel>, StateRegister)>) -> Result<Self> {
        let mut seen = Vec::new();
        let mut entries = Vec::with_capacity(registers.len());
        for (labels, state) in registers {
            if labels.len() != state.num_qubits() {
                return Err(SealError::Malformed(format!(
                    "register lists {} qubit labels for {} qubits",
                    labels.len(),
                    state.num_qubits()
                )));
            }
            if labels.iter().all(Option::is_none) {
                return Err(SealError::Malformed("register holds no seal qubit".into()));
            }
            for &index in labels.iter().flatten() {
                if seen.len() <= index {
                    seen.resize(index + 1, false);
                }
                if seen[index] {
                    return Err(SealError::DuplicateIndex(index));
                }
                seen[index] = true;
            }
            entries.push(Entry { labels, state });
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(SealError::Malformed(format!("seal qubit {missing} is missing")));
        }
        if seen.is_empty() {
            return Err(SealError::Malformed("memory is empty".into()));
        }
        let mut memory = Self {
            entries,
            slots: Vec::new(),
        };
        memory.reindex();
        Ok(memory)
    }

    /// Number of seal qubits.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Stored registers with their labels, ordered by lowest seal index.
    pub fn registers(&self) -> impl Iterator<Item = (&[QubitLabel], &StateRegister)> {
        self.entries.iter().map(|e| (e.labels.as_slice(), &e.state))
    }

    pub fn register_count(&self) -> usize {
        self.entries.len()
    }

    /// The register holding seal qubit `index`, and the qubit's position in it.
    pub fn slot(&self, index: usize) -> Result<(&StateRegister, usize)> {
        let (entry, pos) = self.resolve(index)?;
        Ok((&self.entries[entry].state, pos))
    }

    fn resolve(&self, index: usize) -> Result<(usize, usize)> {
        self.slots
            .get(index)
            .copied()
            .ok_or(SealError::IndexOutOfRange {
                index,
                len: self.slots.len(),
            })
    }

    /// Measures seal qubit `index` in `basis`, replacing the stored state
    /// with the collapsed one.
    pub fn measure(&mut self, index: usize, basis: Basis, rand: &mut RandomSource) -> Result<u8> {
        let (entry, pos) = self.resolve(index)?;
        let outcome = qsim::measure(&self.entries[entry].state, pos, basis, rand)?;
        self.entries[entry].state = outcome.post_state;
        self.tidy(entry)?;
        Ok(outcome.value)
    }

    /// ⟨φ|ρ|φ⟩ for the reduced state ρ of seal qubit `index`.
    pub fn qubit_fidelity(&self, index: usize, target: &StateRegister) -> Result<f64> {
        let (state, pos) = self.slot(index)?;
        state.reduced_fidelity(pos, target)
    }

    /// Merges the registers holding `indices` into one register with room
    /// for `reserve` more qubits. Reader test qubits are discarded (measured
    /// and forgotten) when that is the only way to make room. Returns the
    /// entry id.
    pub(crate) fn gather(
        &mut self,
        indices: &[usize],
        reserve: usize,
        rand: &mut RandomSource,
    ) -> Result<usize> {
        loop {
            let mut ids = Vec::new();
            for &i in indices {
                let (entry, _) = self.resolve(i)?;
                if !ids.contains(&entry) {
                    ids.push(entry);
                }
            }
            let total: usize = ids.iter().map(|&e| self.entries[e].labels.len()).sum();
            if total + reserve > MAX_QUBITS {
                let foreign = ids.iter().find_map(|&e| {
                    self.entries[e]
                        .labels
                        .iter()
                        .position(Option::is_none)
                        .map(|pos| (e, pos))
                });
                let Some((entry, pos)) = foreign else {
                    return Err(SealError::CapacityExceeded {
                        requested: total + reserve,
                        max: MAX_QUBITS,
                    });
                };
                self.discard(entry, pos, rand)?;
                continue;
            }
            if ids.len() == 1 {
                return Ok(ids[0]);
            }
            let states: Vec<StateRegister> =
                ids.iter().map(|&e| self.entries[e].state.clone()).collect();
            let labels: Vec<QubitLabel> = ids
                .iter()
                .flat_map(|&e| self.entries[e].labels.iter().copied())
                .collect();
            let merged = Entry {
                labels,
                state: qsim::merge(&states)?,
            };
            let first = ids[0];
            self.entries[first] = merged;
            let mut rest: Vec<usize> = ids[1..].to_vec();
            rest.sort_unstable_by(|a, b| b.cmp(a));
            for e in rest {
                self.entries.remove(e);
            }
            self.reindex();
            return Ok(self.slots[indices[0]].0);
        }
    }

    pub(crate) fn state(&self, entry: usize) -> &StateRegister {
        &self.entries[entry].state
    }

    pub(crate) fn labels(&self, entry: usize) -> &[QubitLabel] {
        &self.entries[entry].labels
    }

    pub(crate) fn position(&self, entry: usize, index: usize) -> Option<usize> {
        self.entries[entry].labels.iter().position(|&l| l == Some(index))
    }

    /// Replaces a register's state and labels, then splits out product qubits.
    pub(crate) fn replace(
        &mut self,
        entry: usize,
        labels: Vec<QubitLabel>,
        state: StateRegister,
    ) -> Result<()> {
        debug_assert_eq!(labels.len(), state.num_qubits());
        self.entries[entry] = Entry { labels, state };
        self.tidy(entry)
    }

    /// Measures a reader qubit in Z and drops it. Averaged over outcomes this
    /// leaves the remaining qubits in the same reduced state as tracing the
    /// reader qubit out.
    fn discard(&mut self, entry: usize, pos: usize, rand: &mut RandomSource) -> Result<()> {
        let outcome = qsim::measure(&self.entries[entry].state, pos, Basis::Z, rand)?;
        let e = &mut self.entries[entry];
        e.state = outcome.post_state.drop_collapsed(pos, outcome.value)?;
        e.labels.remove(pos);
        self.tidy(entry)
    }

    /// Splits every qubit that is in a product state with the rest of its
    /// register into its own register; product reader qubits are dropped.
    fn tidy(&mut self, entry: usize) -> Result<()> {
        let mut split_off = Vec::new();
        let mut pos = 0;
        while pos < self.entries[entry].labels.len() && self.entries[entry].labels.len() > 1 {
            let e = &self.entries[entry];
            match e.state.factor_out(pos)? {
                Some((single, rest)) => {
                    let label = e.labels[pos];
                    let e = &mut self.entries[entry];
                    e.state = rest;
                    e.labels.remove(pos);
                    if label.is_some() {
                        split_off.push(Entry {
                            labels: vec![label],
                            state: single,
                        });
                    }
                }
                None => pos += 1,
            }
        }
        let structural = !split_off.is_empty() || self.entries[entry].labels.iter().all(Option::is_none);
        if self.entries[entry].labels.iter().all(Option::is_none) {
            // Only reader qubits left: they no longer touch the seal.
            self.entries.remove(entry);
        }
        self.entries.extend(split_off);
        if structural {
            self.reindex();
        } else {
            self.refresh_slots(entry);
        }
        Ok(())
    }

    fn refresh_slots(&mut self, entry: usize) {
        for (pos, label) in self.entries[entry].labels.iter().enumerate() {
            if let Some(i) = label {
                self.slots[*i] = (entry, pos);
            }
        }
    }

    fn reindex(&mut self) {
        self.entries
            .sort_by_key(|e| e.labels.iter().flatten().copied().min().unwrap_or(usize::MAX));
        let n = self
            .entries
            .iter()
            .flat_map(|e| e.labels.iter().flatten())
            .count();
        self.slots = vec![(0, 0); n];
        for (id, e) in self.entries.iter().enumerate() {
            for (pos, label) in e.labels.iter().enumerate() {
                if let Some(i) = label {
                    self.slots[*i] = (id, pos);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{prepare, TOLERANCE};

    fn specs() -> Vec<QubitSpec> {
        vec![
            QubitSpec::new(Basis::Z, 0).unwrap(),
            QubitSpec::new(Basis::Z, 0).unwrap(),
            QubitSpec::new(Basis::Y, 0).unwrap(),
        ]
    }

    #[test]
    fn fresh_memory_is_all_single_qubits() {
        let m = QuantumMemory::from_specs(specs());
        assert_eq!(m.len(), 3);
        assert_eq!(m.register_count(), 3);
        for i in 0..3 {
            let (r, pos) = m.slot(i).unwrap();
            assert_eq!((r.num_qubits(), pos), (1, 0));
        }
        assert!(m.slot(3).is_err());
    }

    #[test]
    fn gather_then_product_splits_back() {
        let mut m = QuantumMemory::from_specs(specs());
        let mut rng = RandomSource::new(0);
        let entry = m.gather(&[0, 1, 2], 0, &mut rng).unwrap();
        assert_eq!(m.state(entry).num_qubits(), 3);
        let state = m.state(entry).clone();
        let labels = vec![Some(0), Some(1), Some(2)];
        m.replace(entry, labels, state).unwrap();
        assert_eq!(m.register_count(), 3);
        let y0 = prepare(specs()[2]);
        assert!((m.qubit_fidelity(2, &y0).unwrap() - 1.0).abs() < TOLERANCE);
    }

    #[test]
    fn from_registers_validates_coverage() {
        let z = prepare(QubitSpec::new(Basis::Z, 0).unwrap());
        assert!(QuantumMemory::from_registers(vec![(vec![Some(1)], z.clone())]).is_err());
        assert!(matches!(
            QuantumMemory::from_registers(vec![(vec![Some(0)], z.clone()), (vec![Some(0)], z.clone())]),
            Err(SealError::DuplicateIndex(0))
        ));
        assert!(QuantumMemory::from_registers(vec![(vec![None], z.clone())]).is_err());
        assert!(QuantumMemory::from_registers(vec![(vec![Some(0)], z)]).is_ok());
    }
}
