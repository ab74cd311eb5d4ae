//! Spacetime Pauli errors, benign generators, pushing and classification.
//!
//! An error component at coarse slot `t` acts after every measurement of round
//! `t` and before round `t + 1`. Slot `0` precedes the first round.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::detectors;
use crate::dynamics::Dynamics;
use crate::error::{Error, Result};
use crate::f2::{BitVec, Echelon};
use crate::pauli::{centralizer_basis, Pauli, Pauli1};
use crate::schedule::Schedule;

/// Finitely supported map from coarse slot to Pauli (sign-free, identities dropped).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpacetimeError {
    n: usize,
    slices: BTreeMap<usize, Pauli>,
}

impl SpacetimeError {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            slices: BTreeMap::new(),
        }
    }

    pub fn single(slot: usize, p: Pauli) -> Self {
        let mut e = Self::new(p.num_qubits());
        e.mul_slice(slot, &p);
        e
    }

    pub fn from_slices(n: usize, slices: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let mut e = Self::new(n);
        for (t, p) in slices {
            e.mul_slice(t, &p);
        }
        e
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, slot: usize) -> Option<&Pauli> {
        self.slices.get(&slot)
    }

    /// Component at `slot`, identity if absent.
    pub fn at(&self, slot: usize) -> Pauli {
        self.slices
            .get(&slot)
            .cloned()
            .unwrap_or_else(|| Pauli::identity(self.n))
    }

    pub fn slices(&self) -> impl Iterator<Item = (usize, &Pauli)> {
        self.slices.iter().map(|(&t, p)| (t, p))
    }

    pub fn slots(&self) -> Vec<usize> {
        self.slices.keys().copied().collect()
    }

    pub fn min_slot(&self) -> Option<usize> {
        self.slices.keys().next().copied()
    }

    pub fn max_slot(&self) -> Option<usize> {
        self.slices.keys().next_back().copied()
    }

    pub fn is_identity(&self) -> bool {
        self.slices.is_empty()
    }

    /// Total number of non-identity single-qubit factors.
    pub fn weight(&self) -> usize {
        self.slices.values().map(Pauli::weight).sum()
    }

    /// Multiply `p` into the component at `slot`.
    pub fn mul_slice(&mut self, slot: usize, p: &Pauli) {
        assert_eq!(p.num_qubits(), self.n, "qubit count mismatch");
        let entry = self
            .slices
            .entry(slot)
            .or_insert_with(|| Pauli::identity(p.num_qubits()));
        entry.mul_assign(p);
        if entry.is_identity() {
            self.slices.remove(&slot);
        }
    }

    pub fn mul_assign(&mut self, other: &SpacetimeError) {
        for (t, p) in other.slices() {
            self.mul_slice(t, p);
        }
    }

    pub fn product(&self, other: &SpacetimeError) -> SpacetimeError {
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }

    /// Same error moved `delta` slots later (earlier if negative); `None` if it would leave slot 0.
    pub fn translated(&self, delta: i64) -> Option<SpacetimeError> {
        let mut out = Self::new(self.n);
        for (t, p) in self.slices() {
            let nt = t as i64 + delta;
            if nt < 0 {
                return None;
            }
            out.slices.insert(nt as usize, p.clone());
        }
        Some(out)
    }

    /// Pointwise X part.
    pub fn x_part(&self) -> SpacetimeError {
        Self::from_slices(self.n, self.slices().map(|(t, p)| (t, p.x_part())))
    }

    /// Pointwise Z part.
    pub fn z_part(&self) -> SpacetimeError {
        Self::from_slices(self.n, self.slices().map(|(t, p)| (t, p.z_part())))
    }

    /// Parse `at <t>: <pauli>` lines; repeated slots multiply.
    pub fn parse(schedule: &Schedule, text: &str) -> Result<SpacetimeError> {
        let mut e = Self::new(schedule.num_qubits());
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let rest = line
                .strip_prefix("at")
                .ok_or_else(|| err(format!("expected `at <t>: <pauli>`, found `{line}`")))?;
            let (t, p) = rest
                .split_once(':')
                .ok_or_else(|| err("missing `:` after the slot".into()))?;
            let t: usize = t.trim().parse().map_err(|_| err(format!("bad slot `{}`", t.trim())))?;
            let p = schedule.parse_pauli(p).map_err(err)?;
            e.mul_slice(t, &p.sign_free());
        }
        Ok(e)
    }

    /// Render in the error-file format with the schedule's labels.
    pub fn render(&self, schedule: &Schedule) -> String {
        let mut out = String::new();
        for (t, p) in self.slices() {
            let _ = writeln!(out, "at {t}: {}", schedule.format_pauli(p));
        }
        out
    }
}

impl std::fmt::Debug for SpacetimeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.slices.iter()).finish()
    }
}

/// Elementary benign error.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BenignGenerator {
    /// Measurement `index` of round `slot`, inserted at slot `slot`.
    Vacuous { slot: usize, index: usize, op: Pauli },
    /// `op` at `slot` and `slot + 1`; `op` commutes with every measurement of round `slot + 1`.
    Sandwich { slot: usize, op: Pauli },
}

impl BenignGenerator {
    pub fn to_error(&self) -> SpacetimeError {
        match self {
            BenignGenerator::Vacuous { slot, op, .. } => SpacetimeError::single(*slot, op.clone()),
            BenignGenerator::Sandwich { slot, op } => {
                SpacetimeError::from_slices(op.num_qubits(), [(*slot, op.clone()), (*slot + 1, op.clone())])
            }
        }
    }

    pub fn render(&self, schedule: &Schedule) -> String {
        match self {
            BenignGenerator::Vacuous { slot, op, .. } => format!("vacuous @{slot}: {}", schedule.format_pauli(op)),
            BenignGenerator::Sandwich { slot, op } => {
                format!("sandwich @{slot}|{}: {}", slot + 1, schedule.format_pauli(op))
            }
        }
    }

    /// Check the generator's defining property against the schedule.
    pub fn is_valid(&self, schedule: &Schedule) -> bool {
        match self {
            BenignGenerator::Vacuous { slot, index, op } => {
                schedule.measurements_at(*slot).get(*index).is_some_and(|m| m == op)
            }
            BenignGenerator::Sandwich { slot, op } => {
                !op.is_identity()
                    && schedule
                        .measurements_at(slot + 1)
                        .iter()
                        .all(|m| !m.anticommutes_unchecked(op))
            }
        }
    }
}

/// Product of a list of generators.
pub fn generator_product(n: usize, gens: &[BenignGenerator]) -> SpacetimeError {
    let mut e = SpacetimeError::new(n);
    for g in gens {
        e.mul_assign(&g.to_error());
    }
    e
}

/// Vacuous generators of rounds in `[a, b]` and a sandwich basis for each
/// boundary `t|t+1` with `a <= t < b`.
pub fn enumerate_benign_generators(schedule: &Schedule, a: usize, b: usize) -> Vec<BenignGenerator> {
    let n = schedule.num_qubits();
    let mut out = Vec::new();
    for t in a..=b {
        for (index, m) in schedule.measurements_at(t).iter().enumerate() {
            out.push(BenignGenerator::Vacuous {
                slot: t,
                index,
                op: m.clone(),
            });
        }
        if t < b {
            for op in centralizer_basis(n, schedule.measurements_at(t + 1)) {
                out.push(BenignGenerator::Sandwich { slot: t, op });
            }
        }
    }
    out
}

/// Span of benign generators on a slot window, ready for membership solves.
pub(crate) struct GeneratorSpace {
    n: usize,
    start: usize,
    end: usize,
    slice_len: usize,
    gens: Vec<BenignGenerator>,
    ech: Echelon,
}

impl GeneratorSpace {
    pub(crate) fn new(schedule: &Schedule, start: usize, end: usize) -> Self {
        let n = schedule.num_qubits();
        let slice_len = Pauli::symplectic_len(n);
        let gens = enumerate_benign_generators(schedule, start, end);
        let mut ech = Echelon::new(slice_len * (end - start + 1), gens.len());
        let mut me = Self {
            n,
            start,
            end,
            slice_len,
            gens: Vec::new(),
            ech: Echelon::new(0, 0),
        };
        for (i, g) in gens.iter().enumerate() {
            let v = me.embed(&g.to_error()).expect("generator inside window");
            ech.insert_with_combo(v, BitVec::unit(gens.len(), i));
        }
        me.gens = gens;
        me.ech = ech;
        me
    }

    fn embed(&self, e: &SpacetimeError) -> Option<BitVec> {
        let mut v = BitVec::zeros(self.slice_len * (self.end - self.start + 1));
        for (t, p) in e.slices() {
            if t < self.start || t > self.end {
                return None;
            }
            let off = (t - self.start) * self.slice_len;
            for i in p.symplectic().iter_ones() {
                v.set(off + i, true);
            }
        }
        Some(v)
    }

    pub(crate) fn solve(&self, e: &SpacetimeError) -> Option<Vec<BenignGenerator>> {
        let v = self.embed(e)?;
        let combo = self.ech.solve(&v)?;
        Some(combo.iter_ones().map(|i| self.gens[i].clone()).collect())
    }

    pub(crate) fn contains_slice(&self, t: usize, p: &Pauli) -> bool {
        debug_assert_eq!(p.num_qubits(), self.n);
        match self.embed(&SpacetimeError::single(t, p.clone())) {
            Some(v) => self.ech.contains(&v),
            None => false,
        }
    }
}

/// Decompose `[s]_t` (an `ISG(t)` element) into generators, preferring the
/// window `[t - mu, t]` and falling back to `[0, t]`.
pub(crate) fn decompose_stabilizer(dynamics: &Dynamics, t: usize, s: &Pauli) -> Option<Vec<BenignGenerator>> {
    let e = SpacetimeError::single(t, s.clone());
    let narrow = GeneratorSpace::new(dynamics.schedule(), t.saturating_sub(dynamics.mu()), t);
    narrow
        .solve(&e)
        .or_else(|| GeneratorSpace::new(dynamics.schedule(), 0, t).solve(&e))
}

/// Outcome of [`classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// The detector measured at `fine_step` (round `round`) is triggered.
    Detectable { fine_step: usize, round: usize },
    /// `certificate` multiplies to the error exactly.
    Benign { certificate: Vec<BenignGenerator> },
    /// The error equals `[logical]_slot` times the product of `certificate`.
    LogicalFailure {
        logical: Pauli,
        slot: usize,
        certificate: Vec<BenignGenerator>,
    },
}

impl Classification {
    pub fn is_benign(&self) -> bool {
        matches!(self, Classification::Benign { .. })
    }

    pub fn is_logical_failure(&self) -> bool {
        matches!(self, Classification::LogicalFailure { .. })
    }

    pub fn is_detectable(&self) -> bool {
        matches!(self, Classification::Detectable { .. })
    }
}

fn check_steady(dynamics: &Dynamics, e: &SpacetimeError) -> Result<()> {
    if let Some(a) = e.min_slot() {
        if a < dynamics.steady_start() {
            return Err(Error::InitialStage {
                slot: a,
                init_time: dynamics.steady_start(),
            });
        }
    }
    Ok(())
}

/// Benign certificate of `e` from generators on `[a - mu, b + mu]`, if any.
pub fn is_benign(dynamics: &Dynamics, e: &SpacetimeError) -> Result<Option<Vec<BenignGenerator>>> {
    let (Some(a), Some(b)) = (e.min_slot(), e.max_slot()) else {
        return Ok(Some(Vec::new()));
    };
    check_steady(dynamics, e)?;
    let mu = dynamics.mu();
    Ok(GeneratorSpace::new(dynamics.schedule(), a.saturating_sub(mu), b + mu).solve(e))
}

/// Result of [`push`]: `error` lives on the target slot only and
/// `original * error` is the product of `certificate`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pushed {
    pub error: SpacetimeError,
    pub certificate: Vec<BenignGenerator>,
}

/// Slot-by-slot pushing without a detectability precheck. `Ok(Err(slot))`
/// means no stabilizer could make the component at `slot` commute with the
/// next round, i.e. the error is detectable.
pub(crate) fn push_raw(
    dynamics: &Dynamics,
    e: &SpacetimeError,
    target: usize,
) -> Result<std::result::Result<Pushed, usize>> {
    let schedule = dynamics.schedule();
    let n = schedule.num_qubits();
    let mut cur = e.clone();
    let mut cert = Vec::new();
    let Some(a) = e.min_slot() else {
        return Ok(Ok(Pushed {
            error: cur,
            certificate: cert,
        }));
    };
    for t0 in a..target {
        let Some(f) = cur.get(t0).cloned() else { continue };
        let next = schedule.measurements_at(t0 + 1);
        let mut f = f;
        if next.iter().any(|m| m.anticommutes_unchecked(&f)) {
            // S in ISG(t0) with the same commutation pattern against round t0+1
            let isg = dynamics.isg(t0);
            let candidates: Vec<&Pauli> = schedule.measurements_at(t0).iter().chain(isg.basis()).collect();
            let pattern =
                |p: &Pauli| BitVec::from_bits(&next.iter().map(|m| m.anticommutes_unchecked(p)).collect::<Vec<_>>());
            // vacuous errors of round t0 first, then the rest of ISG(t0)
            let k = schedule.measurements_at(t0).len();
            let Some(mut s) = fixing_stabilizer(&candidates[..k], &f, &pattern, n)
                .or_else(|| fixing_stabilizer(&candidates, &f, &pattern, n))
            else {
                return Ok(Err(t0));
            };
            s = s.sign_free();
            let gens = decompose_stabilizer(dynamics, t0, &s)
                .ok_or_else(|| Error::Invariant(format!("stabilizer at slot {t0} has no benign decomposition")))?;
            cur.mul_slice(t0, &s);
            cert.extend(gens);
            f.mul_assign(&s);
        }
        if !f.is_identity() {
            cur.mul_slice(t0, &f);
            cur.mul_slice(t0 + 1, &f);
            cert.push(BenignGenerator::Sandwich { slot: t0, op: f });
        }
    }
    Ok(Ok(Pushed {
        error: cur,
        certificate: cert,
    }))
}

/// Product `S` of `candidates` with the same commutation `pattern` as `f`,
/// chosen greedily so that `S f` has low weight, then low support indices.
fn fixing_stabilizer(candidates: &[&Pauli], f: &Pauli, pattern: &impl Fn(&Pauli) -> BitVec, n: usize) -> Option<Pauli> {
    let m = candidates.len();
    let product = |combo: &BitVec| {
        let mut p = Pauli::identity(n);
        for i in combo.iter_ones() {
            p.mul_assign(candidates[i]);
        }
        p
    };
    let mut ech = Echelon::new(pattern(f).len(), m);
    let mut kernel = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let v = pattern(c);
        match ech.solve(&v) {
            Some(combo) => kernel.push(product(&combo.xor(&BitVec::unit(m, i)))),
            None => {
                ech.insert_with_combo(v, BitVec::unit(m, i));
            }
        }
    }
    let key = |s: &Pauli| {
        let r = s.multiply(f).expect("same size");
        (r.weight(), r.support())
    };
    let mut s = product(&ech.solve(&pattern(f))?);
    let mut best = key(&s);
    loop {
        let better = kernel
            .iter()
            .map(|z| s.multiply(z).expect("same size"))
            .map(|t| (key(&t), t))
            .filter(|(k, _)| *k < best)
            .min_by(|a, b| a.0.cmp(&b.0));
        match better {
            Some((k, t)) => (s, best) = (t, k),
            None => return Some(s),
        }
    }
}

/// Push an undetectable steady-stage error onto the single slot `target`.
pub fn push(dynamics: &Dynamics, e: &SpacetimeError, target: usize) -> Result<Pushed> {
    let Some(b) = e.max_slot() else {
        return push_raw(dynamics, e, target).map(|r| r.expect("empty error"));
    };
    if target < b {
        return Err(Error::InvalidParameter(format!(
            "push target {target} precedes the latest error slot {b}"
        )));
    }
    check_steady(dynamics, e)?;
    if let Some(p) = detectors::first_triggered(dynamics, e) {
        return Err(Error::Detectable {
            probe: p.fine_step,
            fine_step: p.fine_step,
        });
    }
    match push_raw(dynamics, e, target)? {
        Ok(p) => Ok(p),
        Err(slot) => Err(Error::Invariant(format!(
            "no probe fired but pushing is stuck at slot {slot}"
        ))),
    }
}

/// Detectable, benign, or logical failure.
pub fn classify(dynamics: &Dynamics, e: &SpacetimeError) -> Result<Classification> {
    let Some(b) = e.max_slot() else {
        return Ok(Classification::Benign {
            certificate: Vec::new(),
        });
    };
    check_steady(dynamics, e)?;
    if let Some(p) = detectors::first_triggered(dynamics, e) {
        return Ok(Classification::Detectable {
            fine_step: p.fine_step,
            round: p.round,
        });
    }
    classify_undetected(dynamics, e, b)
}

/// Classification of an error already known to trigger no detector.
pub(crate) fn classify_undetected(dynamics: &Dynamics, e: &SpacetimeError, b: usize) -> Result<Classification> {
    let t = b + dynamics.mu() + 1;
    let pushed = match push_raw(dynamics, e, t)? {
        Ok(p) => p,
        Err(slot) => {
            return Err(Error::Invariant(format!(
                "no probe fired but pushing is stuck at slot {slot}"
            )))
        }
    };
    let logical = pushed.error.at(t);
    let isg = dynamics.isg(t);
    if !isg.commutes_with_all(&logical) {
        return Err(Error::Invariant(format!(
            "pushed error at slot {t} does not commute with the stabilizer group"
        )));
    }
    let mut certificate = pushed.certificate;
    if isg.contains(&logical) {
        let gens = decompose_stabilizer(dynamics, t, &logical)
            .ok_or_else(|| Error::Invariant("stabilizer without benign decomposition".into()))?;
        certificate.extend(gens);
        Ok(Classification::Benign { certificate })
    } else {
        Ok(Classification::LogicalFailure {
            logical,
            slot: t,
            certificate,
        })
    }
}

/// `[l1 l2]_t` is benign exactly when `l1 l2` is a stabilizer of `ISG(t)`.
pub fn equivalent_logicals_check(dynamics: &Dynamics, t: usize, l1: &Pauli, l2: &Pauli) -> Result<bool> {
    let isg = dynamics.isg(t);
    if !isg.commutes_with_all(l1) || !isg.commutes_with_all(l2) {
        return Err(Error::InvalidParameter(
            "operators must commute with the stabilizer group".into(),
        ));
    }
    let prod = l1.multiply(l2)?;
    let benign = is_benign(dynamics, &SpacetimeError::single(t, prod.clone()))?.is_some();
    Ok(benign == isg.contains(&prod))
}

/// Measurement error on measurement `index` of round `round`, as the
/// single-qubit conjugating Pauli at slots `round - 1` and `round`.
pub fn measurement_error_as_pauli(schedule: &Schedule, round: usize, index: usize) -> Result<SpacetimeError> {
    let ms = schedule.measurements_at(round);
    let m = ms
        .get(index)
        .ok_or_else(|| Error::InvalidParameter(format!("round {round} has no measurement {index}")))?;
    if round == 0 {
        return Err(Error::InvalidParameter("rounds start at 1".into()));
    }
    for (i, a) in ms.iter().enumerate() {
        for b in &ms[i + 1..] {
            if a.support().iter().any(|q| b.get(*q) != Pauli1::I) {
                return Err(Error::OverlappingSupports { round });
            }
        }
    }
    let (q, f) = m.factors().next().expect("non-identity measurement");
    let flip = if f == Pauli1::X { Pauli1::Z } else { Pauli1::X };
    let p = Pauli::single(schedule.num_qubits(), q, flip);
    Ok(SpacetimeError::from_slices(
        schedule.num_qubits(),
        [(round - 1, p.clone()), (round, p)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_step_window_has_only_vacuous() {
        let s = Schedule::parse("qubits 2\ncycle\nround Z0 Z1\n").unwrap();
        let g = enumerate_benign_generators(&s, 3, 3);
        assert_eq!(g.len(), 1);
        assert!(matches!(g[0], BenignGenerator::Vacuous { slot: 3, .. }));
    }

    #[test]
    fn sandwich_across_z_step_is_z() {
        let s = Schedule::parse("qubits 1\nround X0\nround Z0\n").unwrap();
        let g = enumerate_benign_generators(&s, 1, 2);
        let sandwiches: Vec<_> = g
            .iter()
            .filter_map(|g| match g {
                BenignGenerator::Sandwich { op, .. } => Some(op.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(sandwiches, vec![Pauli::parse(1, "Z0").unwrap()]);
    }

    #[test]
    fn error_file_round_trip() {
        let s = Schedule::parse("qubits 3\nlabels 1 2 3\ncycle\nround Z1 Z2 ; Z2 Z3\n").unwrap();
        let e = SpacetimeError::parse(&s, "# two slots\nat 4: X1\nat 6: Y2 Z3\nat 4: Z1\n").unwrap();
        assert_eq!(e.weight(), 3);
        assert_eq!(s.format_pauli(e.get(4).unwrap()), "Y1");
        assert_eq!(SpacetimeError::parse(&s, &e.render(&s)).unwrap(), e);
        assert!(SpacetimeError::parse(&s, "at x: X1").is_err());
        assert!(SpacetimeError::parse(&s, "on 3: X1").is_err());
    }

    #[test]
    fn measurement_error_shape() {
        let s = Schedule::parse("qubits 2\ncycle\nround Z0 Z1\n").unwrap();
        let e = measurement_error_as_pauli(&s, 3, 0).unwrap();
        assert_eq!(e.slots(), vec![2, 3]);
        assert_eq!(e.at(2), Pauli::parse(2, "X0").unwrap());
        let bad = Schedule::parse("qubits 3\ncycle\nround Z0 Z1 ; Z1 Z2\n").unwrap();
        assert!(matches!(
            measurement_error_as_pauli(&bad, 1, 0),
            Err(Error::OverlappingSupports { .. })
        ));
    }
}
