//! Ancestries, detector probes and syndromes.
//!
//! A detector is a measurement whose operator already lies in the ISG just
//! before it. Its probe is a spacetime Pauli `D` such that an error `E` flips
//! the detector exactly when `sum_j lambda(E_j, D_j) = 1`.
//!
//! Windowed probes (the default) compare the outcome with a prediction made
//! from measurements within `mu` rounds; full probes follow the stabilizer's
//! ancestry back to the start of the schedule.

use crate::dynamics::{Dynamics, IsgState};
use crate::error::{Error, Result};
use crate::f2::{BitVec, Echelon};
use crate::pauli::Pauli;
use crate::spacetime::{BenignGenerator, GeneratorSpace, SpacetimeError};

/// Fine-step ancestry of a stabilizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ancestry {
    pub target_time: usize,
    pub target: Pauli,
    /// `(j, A_j)` for `j = target_time` down to `base_time + 1`; `A_j` is the
    /// identity or the measurement at fine step `j`.
    pub entries: Vec<(usize, Pauli)>,
    pub base_time: usize,
    pub base: Pauli,
}

impl Ancestry {
    /// `[A_j]_j` and `[base]_tau` as a fine-step indexed error.
    pub fn as_error(&self) -> SpacetimeError {
        let n = self.target.num_qubits();
        let mut e = SpacetimeError::new(n);
        for (j, a) in &self.entries {
            e.mul_slice(*j, a);
        }
        e.mul_slice(self.base_time, &self.base);
        e
    }
}

/// ISGs after fine steps `0..=upto`.
fn fine_history(dynamics: &Dynamics, upto: usize) -> Vec<IsgState> {
    let schedule = dynamics.schedule();
    let mut out = Vec::with_capacity(upto + 1);
    let mut st = IsgState::trivial(schedule.num_qubits());
    out.push(st.clone());
    for s in 1..=upto {
        st.measure(schedule.measurement_at_fine(s), s)
            .expect("validated schedule");
        out.push(st.clone());
    }
    out
}

fn ancestry_with(history: &[IsgState], dynamics: &Dynamics, s: &Pauli, t: usize, tau: usize) -> Result<Ancestry> {
    if tau > t {
        return Err(Error::InvalidParameter(format!("base time {tau} after target {t}")));
    }
    if !history[t].contains(s) {
        return Err(Error::NotInIsg(t));
    }
    let schedule = dynamics.schedule();
    let mut cur = s.sign_free();
    let mut entries = Vec::new();
    for j in (tau + 1..=t).rev() {
        if history[j - 1].contains(&cur) {
            entries.push((j, Pauli::identity(s.num_qubits())));
        } else {
            let m = schedule.measurement_at_fine(j);
            cur.mul_assign(m);
            entries.push((j, m.clone()));
        }
    }
    Ok(Ancestry {
        target_time: t,
        target: s.sign_free(),
        entries,
        base_time: tau,
        base: cur,
    })
}

/// Ancestry of `s` (an element of the ISG after fine step `t`) down to fine step `tau`.
pub fn ancestry(dynamics: &Dynamics, s: &Pauli, t: usize, tau: usize) -> Result<Ancestry> {
    let history = fine_history(dynamics, t);
    ancestry_with(&history, dynamics, s, t, tau)
}

/// `ance(A B) == ance(A) ance(B)` for every pair of basis rows of the ISG at fine step `t`.
pub fn ancestry_linearity_check(dynamics: &Dynamics, t: usize, tau: usize) -> Result<bool> {
    let history = fine_history(dynamics, t);
    let basis = history[t].basis().to_vec();
    let ances: Vec<SpacetimeError> = basis
        .iter()
        .map(|b| ancestry_with(&history, dynamics, b, t, tau).map(|a| a.as_error()))
        .collect::<Result<_>>()?;
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let prod = basis[i].multiply(&basis[j])?;
            let joint = ancestry_with(&history, dynamics, &prod, t, tau)?.as_error();
            if joint != ances[i].product(&ances[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A detector and its probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectorProbe {
    pub fine_step: usize,
    pub round: usize,
    pub index: usize,
    pub measurement: Pauli,
    /// Coarse-slot probe; support lies in `[0, round - 1]`.
    pub probe: SpacetimeError,
}

impl DetectorProbe {
    pub fn triggered_by(&self, e: &SpacetimeError) -> bool {
        let (small, big) = if e.slots().len() <= self.probe.slots().len() {
            (e, &self.probe)
        } else {
            (&self.probe, e)
        };
        let mut bit = false;
        for (t, p) in small.slices() {
            if let Some(q) = big.get(t) {
                bit ^= p.anticommutes_unchecked(q);
            }
        }
        bit
    }
}

/// Probes for all detectors in a range of rounds.
#[derive(Clone, Debug)]
pub struct ProbeSet {
    pub probes: Vec<DetectorProbe>,
    pub first_round: usize,
    pub last_round: usize,
    mu: usize,
}

impl ProbeSet {
    /// Slots on which every probe able to see an error is included.
    pub fn covered_slots(&self) -> (usize, usize) {
        (
            self.first_round.saturating_sub(1),
            (self.last_round + 1).saturating_sub(self.mu + 2),
        )
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }
}

/// Windowed probe of measurement `index` in round `round`, if it is a
/// nontrivial detector. `space` must span `[round - 1 - mu, round - 1]`.
fn windowed_probe(
    dynamics: &Dynamics,
    space: Option<&GeneratorSpace>,
    round: usize,
    index: usize,
) -> Option<DetectorProbe> {
    let schedule = dynamics.schedule();
    let n = schedule.num_qubits();
    let ms = schedule.measurements_at(round);
    let m = &ms[index];
    let prev = dynamics.isg(round - 1);
    // m = (product of earlier same-round measurements) * K with K in ISG(round-1)
    let rows: Vec<&Pauli> = ms[..index].iter().chain(prev.basis()).collect();
    let mut ech = Echelon::new(Pauli::symplectic_len(n), rows.len());
    for (i, r) in rows.iter().enumerate() {
        ech.insert_with_combo(r.symplectic().clone(), BitVec::unit(rows.len(), i));
    }
    let combo = ech.solve(m.symplectic())?;
    let mut k = m.clone();
    for i in combo.iter_ones().filter(|&i| i < index) {
        k.mul_assign(rows[i]);
    }
    if k.is_identity() {
        return None;
    }
    let target = SpacetimeError::single(round - 1, k.clone());
    let gens = space
        .and_then(|s| s.solve(&target))
        .or_else(|| GeneratorSpace::new(schedule, 0, round - 1).solve(&target))
        .expect("stabilizers are benign");
    let mut probe = SpacetimeError::single(round - 1, k);
    for g in gens {
        if let BenignGenerator::Sandwich { slot, op } = g {
            probe.mul_slice(slot, &op);
        }
    }
    Some(DetectorProbe {
        fine_step: schedule.fine_index(round, index),
        round,
        index,
        measurement: m.clone(),
        probe,
    })
}

/// Windowed probes for every detector in rounds `first..=last` (rounds are 1-based).
pub fn enumerate_detectors(dynamics: &Dynamics, first: usize, last: usize) -> ProbeSet {
    let schedule = dynamics.schedule();
    let mu = dynamics.mu();
    let mut probes = Vec::new();
    for r in first.max(1)..=last {
        let ms = schedule.measurements_at(r);
        if ms.is_empty() {
            continue;
        }
        let space = GeneratorSpace::new(schedule, (r - 1).saturating_sub(mu), r - 1);
        for i in 0..ms.len() {
            if let Some(p) = windowed_probe(dynamics, Some(&space), r, i) {
                probes.push(p);
            }
        }
    }
    ProbeSet {
        probes,
        first_round: first.max(1),
        last_round: last,
        mu,
    }
}

/// Probes built from the full ancestry of each detector (support reaches slot 0).
pub fn enumerate_full_detectors(dynamics: &Dynamics, first: usize, last: usize) -> ProbeSet {
    let schedule = dynamics.schedule();
    let n = schedule.num_qubits();
    let history = fine_history(dynamics, schedule.round_end(last));
    let mut probes = Vec::new();
    for r in first.max(1)..=last {
        for (i, m) in schedule.measurements_at(r).iter().enumerate() {
            let s = schedule.fine_index(r, i);
            if !history[s - 1].contains(m) {
                continue;
            }
            // running operator at each fine step, sampled at round ends
            let mut cur = m.sign_free();
            let mut probe = SpacetimeError::new(n);
            let mut slot = r - 1;
            for j in (1..s).rev() {
                if j == schedule.round_end(slot) {
                    probe.mul_slice(slot, &cur);
                    slot = slot.saturating_sub(1);
                }
                if !history[j - 1].contains(&cur) {
                    cur.mul_assign(schedule.measurement_at_fine(j));
                }
            }
            debug_assert!(cur.is_identity());
            if probe.is_identity() {
                continue;
            }
            probes.push(DetectorProbe {
                fine_step: s,
                round: r,
                index: i,
                measurement: m.clone(),
                probe,
            });
        }
    }
    ProbeSet {
        probes,
        first_round: first.max(1),
        last_round: last,
        mu: usize::MAX / 4,
    }
}

/// One bit per probe.
pub fn syndrome(probes: &ProbeSet, e: &SpacetimeError) -> Result<BitVec> {
    if let (Some(a), Some(b)) = (e.min_slot(), e.max_slot()) {
        let (lo, hi) = probes.covered_slots();
        if a < lo || b > hi {
            return Err(Error::OutsideWindow { start: lo, end: hi });
        }
    }
    Ok(BitVec::from_bits(
        &probes.probes.iter().map(|p| p.triggered_by(e)).collect::<Vec<_>>(),
    ))
}

/// Rounds whose windowed detectors can see an error on slots `[a, b]`.
pub(crate) fn relevant_rounds(dynamics: &Dynamics, a: usize, b: usize) -> (usize, usize) {
    let hi = (b + dynamics.mu() + 1).max(dynamics.mu_base() + 1);
    (a + 1, hi)
}

/// Earliest windowed detector triggered by `e`.
pub fn first_triggered(dynamics: &Dynamics, e: &SpacetimeError) -> Option<DetectorProbe> {
    let (a, b) = (e.min_slot()?, e.max_slot()?);
    let (lo, hi) = relevant_rounds(dynamics, a, b);
    let schedule = dynamics.schedule();
    let mu = dynamics.mu();
    for r in lo..=hi {
        let ms = schedule.measurements_at(r);
        if ms.is_empty() {
            continue;
        }
        let space = GeneratorSpace::new(schedule, (r - 1).saturating_sub(mu), r - 1);
        for i in 0..ms.len() {
            if let Some(p) = windowed_probe(dynamics, Some(&space), r, i) {
                if p.triggered_by(e) {
                    return Some(p);
                }
            }
        }
    }
    None
}

/// Fine steps of every windowed detector triggered by `e`.
pub fn triggered_detectors(dynamics: &Dynamics, e: &SpacetimeError) -> Vec<usize> {
    let (Some(a), Some(b)) = (e.min_slot(), e.max_slot()) else {
        return Vec::new();
    };
    let (lo, hi) = relevant_rounds(dynamics, a, b);
    enumerate_detectors(dynamics, lo, hi)
        .probes
        .into_iter()
        .filter(|p| p.triggered_by(e))
        .map(|p| p.fine_step)
        .collect()
}

/// For a CSS schedule: `e` undetectable iff both its X and Z parts are.
pub fn css_split_check(dynamics: &Dynamics, e: &SpacetimeError) -> Result<bool> {
    let schedule = dynamics.schedule();
    for r in schedule.prelude().iter().chain(schedule.cycle()) {
        if let Some(m) = r.measurements().iter().find(|m| !m.is_x_type() && !m.is_z_type()) {
            return Err(Error::NotCss(schedule.format_pauli(m)));
        }
    }
    let undetected = |x: &SpacetimeError| first_triggered(dynamics, x).is_none();
    Ok(undetected(e) == (undetected(&e.x_part()) && undetected(&e.z_part())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::run_dynamics;
    use crate::schedule::Schedule;

    fn example() -> Dynamics {
        let s = Schedule::parse("qubits 2\nround X0\nround X1\nround X0 X1\nround Z0 Z1\n").unwrap();
        run_dynamics(&s, None).unwrap()
    }

    #[test]
    fn ancestry_of_yy() {
        let d = example();
        let yy = Pauli::parse(2, "Y0 Y1").unwrap();
        let a = ancestry(&d, &yy, 4, 0).unwrap();
        let want = ["Z0 Z1", "I", "X1", "X0"];
        for ((j, got), (k, w)) in a.entries.iter().zip([4, 3, 2, 1].iter().zip(want)) {
            assert_eq!(j, k);
            assert_eq!(*got, Pauli::parse(2, w).unwrap());
        }
        assert!(a.base.is_identity());
    }

    #[test]
    fn ancestry_base_case_and_errors() {
        let d = example();
        let zz = Pauli::parse(2, "Z0 Z1").unwrap();
        let a = ancestry(&d, &zz, 4, 4).unwrap();
        assert!(a.entries.is_empty());
        assert_eq!(a.base, zz);
        assert!(matches!(
            ancestry(&d, &Pauli::parse(2, "X0").unwrap(), 4, 0),
            Err(Error::NotInIsg(4))
        ));
    }

    #[test]
    fn remeasured_xx_is_the_only_detector() {
        let d = example();
        let probes = enumerate_detectors(&d, 1, 4);
        assert_eq!(probes.len(), 1);
        assert_eq!(probes.probes[0].fine_step, 3);
    }
}
