//! Instantaneous and spacetime code distances, and a brute-force corrector.

use rayon::prelude::*;

use crate::detectors::{enumerate_detectors, ProbeSet};
use crate::dynamics::{Dynamics, IsgState};
use crate::error::{Error, Result};
use crate::f2::BitVec;
use crate::pauli::{centralizer_basis, Pauli, Pauli1};
use crate::spacetime::{classify_undetected, Classification, SpacetimeError};

/// Default cap on the number of Paulis examined by [`instantaneous_distance`].
pub const DEFAULT_CAP: u64 = 200_000_000;

/// Single-qubit alphabet used by searches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sector {
    #[default]
    All,
    XOnly,
    ZOnly,
}

impl Sector {
    pub fn alphabet(self) -> &'static [Pauli1] {
        match self {
            Sector::All => &Pauli1::NON_IDENTITY,
            Sector::XOnly => &[Pauli1::X],
            Sector::ZOnly => &[Pauli1::Z],
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut r: u64 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Minimum weight of a Pauli commuting with the group but outside it.
pub fn instantaneous_distance(isg: &IsgState, cap: u64) -> Result<usize> {
    let n = isg.num_qubits();
    if isg.rank() >= n {
        return Err(Error::NoLogicals);
    }
    // signature: anticommutation with stabilizers, then with the centralizer
    let cent = centralizer_basis(n, isg.basis());
    let checks: Vec<&Pauli> = isg.basis().iter().chain(&cent).collect();
    let r = isg.rank();
    let sig = |q: usize, p: Pauli1| {
        let single = Pauli::single(n, q, p);
        BitVec::from_bits(
            &checks
                .iter()
                .map(|c| c.anticommutes_unchecked(&single))
                .collect::<Vec<_>>(),
        )
    };
    let sigs: Vec<[BitVec; 3]> = (0..n)
        .map(|q| [sig(q, Pauli1::X), sig(q, Pauli1::Y), sig(q, Pauli1::Z)])
        .collect();
    let mut stab_mask = BitVec::zeros(checks.len());
    for i in 0..r {
        stab_mask.set(i, true);
    }
    let is_logical = |v: &BitVec| !v.intersects(&stab_mask) && !v.is_zero();

    fn dfs(
        sigs: &[[BitVec; 3]],
        start: usize,
        left: usize,
        acc: &BitVec,
        is_logical: &dyn Fn(&BitVec) -> bool,
    ) -> bool {
        if left == 0 {
            return is_logical(acc);
        }
        for q in start..=sigs.len() - left {
            for s in &sigs[q] {
                if dfs(sigs, q + 1, left - 1, &acc.xor(s), is_logical) {
                    return true;
                }
            }
        }
        false
    }

    let mut spent: u64 = 0;
    for w in 1..=n {
        spent = spent.saturating_add(binomial(n as u64, w as u64).saturating_mul(3u64.saturating_pow(w as u32)));
        if spent > cap {
            return Err(Error::SearchTooLarge(format!(
                "more than {cap} Paulis up to weight {w} on {n} qubits"
            )));
        }
        if dfs(&sigs, 0, w, &BitVec::zeros(checks.len()), &is_logical) {
            return Ok(w);
        }
    }
    Err(Error::Invariant("no logical operator found despite k > 0".into()))
}

/// Options for [`spacetime_distance`].
#[derive(Clone, Debug, Default)]
pub struct DistanceOptions {
    /// Largest weight searched; defaults to the instantaneous distance `d0`.
    pub max_weight: Option<usize>,
    /// Explicit slot window `[a, b]`; the earliest support slot ranges over `[a, a + P - 1]`.
    pub window: Option<(usize, usize)>,
    pub threads: Option<usize>,
    pub sector: Sector,
    /// Use this `d0` instead of computing it.
    pub d0: Option<usize>,
    pub cap: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Complete candidates reached (all probes satisfied or not).
    pub candidates: u64,
    pub undetectable: u64,
    pub benign: u64,
    /// Partial candidates cut by a probe that can no longer change.
    pub pruned: u64,
}

impl SearchStats {
    fn add(&mut self, o: &SearchStats) {
        self.candidates += o.candidates;
        self.undetectable += o.undetectable;
        self.benign += o.benign;
        self.pruned += o.pruned;
    }
}

/// Outcome of [`spacetime_distance`].
#[derive(Clone, Debug)]
pub struct DistanceResult {
    /// `None` when no nonbenign undetectable error exists up to `max_weight`.
    pub distance: Option<usize>,
    pub witness: Option<SpacetimeError>,
    /// Equivalent single-slot logical of the witness.
    pub logical: Option<(Pauli, usize)>,
    pub search_window: (usize, usize),
    pub max_weight: usize,
    pub d0: usize,
    pub stats: SearchStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Location {
    slot: usize,
    qubit: usize,
    pauli: Pauli1,
}

struct SearchSpace {
    locs: Vec<Location>,
    sigs: Vec<BitVec>,
    /// `closed[s]`: probes whose support ends before slot `window.0 + s`.
    closed: Vec<BitVec>,
    start: usize,
}

impl SearchSpace {
    fn new(n: usize, probes: &ProbeSet, start: usize, end: usize, sector: Sector) -> Self {
        let mut locs = Vec::new();
        for slot in start..=end {
            for qubit in 0..n {
                for &pauli in sector.alphabet() {
                    locs.push(Location { slot, qubit, pauli });
                }
            }
        }
        let np = probes.len();
        let index = |l: &Location| {
            ((l.slot - start) * n + l.qubit) * sector.alphabet().len()
                + sector.alphabet().iter().position(|&p| p == l.pauli).unwrap()
        };
        let mut sigs = vec![BitVec::zeros(np); locs.len()];
        for (pi, p) in probes.probes.iter().enumerate() {
            for (t, d) in p.probe.slices() {
                if t < start || t > end {
                    continue;
                }
                for (q, f) in d.factors() {
                    for &pauli in sector.alphabet() {
                        if pauli != f {
                            let li = index(&Location {
                                slot: t,
                                qubit: q,
                                pauli,
                            });
                            sigs[li].set(pi, true);
                        }
                    }
                }
            }
        }
        let closed = (start..=end + 1)
            .map(|s| {
                BitVec::from_bits(
                    &probes
                        .probes
                        .iter()
                        .map(|p| p.probe.max_slot().is_none_or(|m| m < s))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        Self {
            locs,
            sigs,
            closed,
            start,
        }
    }

    fn error(&self, n: usize, chosen: &[usize]) -> SpacetimeError {
        let mut e = SpacetimeError::new(n);
        for &i in chosen {
            let l = self.locs[i];
            e.mul_slice(l.slot, &Pauli::single(n, l.qubit, l.pauli));
        }
        e
    }

    fn closed_at(&self, slot: usize) -> &BitVec {
        &self.closed[slot - self.start]
    }
}

/// An undetectable error with its logical action and the slot it acts at.
type Witness = (SpacetimeError, Pauli, usize);

struct Dfs<'a> {
    dynamics: &'a Dynamics,
    space: &'a SearchSpace,
    mu: usize,
    stats: SearchStats,
    chosen: Vec<usize>,
}

impl Dfs<'_> {
    /// Depth-first over location indices after `from`, connected in time.
    fn run(&mut self, from: usize, left: usize, acc: &BitVec, last_slot: usize) -> Result<Option<Witness>> {
        let n = self.dynamics.num_qubits();
        if left == 0 {
            self.stats.candidates += 1;
            if !acc.is_zero() {
                return Ok(None);
            }
            self.stats.undetectable += 1;
            let e = self.space.error(n, &self.chosen);
            return match classify_undetected(self.dynamics, &e, e.max_slot().unwrap())? {
                Classification::LogicalFailure { logical, slot, .. } => Ok(Some((e, logical, slot))),
                Classification::Benign { .. } => {
                    self.stats.benign += 1;
                    Ok(None)
                }
                Classification::Detectable { .. } => Err(Error::Invariant("pushing hit a detector".into())),
            };
        }
        let prev = self.space.locs[from];
        for i in from + 1..self.space.locs.len() {
            let l = self.space.locs[i];
            if l.slot > last_slot + self.mu {
                break;
            }
            if l.slot == prev.slot && l.qubit == prev.qubit {
                continue;
            }
            if acc.intersects(self.space.closed_at(l.slot)) {
                self.stats.pruned += 1;
                // every later location has a slot at least as large
                break;
            }
            let next = acc.xor(&self.space.sigs[i]);
            self.chosen.push(i);
            let found = self.run(i, left - 1, &next, l.slot.max(last_slot))?;
            self.chosen.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

/// Minimum weight of a nonbenign undetectable steady-stage error with
/// time-connected support, searched up to `max_weight`.
pub fn spacetime_distance(dynamics: &Dynamics, opts: &DistanceOptions) -> Result<DistanceResult> {
    let n = dynamics.num_qubits();
    let p = dynamics.period();
    let mu = dynamics.mu();
    if dynamics.k() == 0 {
        return Err(Error::NoLogicals);
    }
    if !dynamics.schedule().is_periodic() {
        return Err(Error::InvalidParameter(
            "distance search needs a periodic schedule".into(),
        ));
    }
    let base = dynamics.steady_start() + p;
    let d0 = match opts.d0 {
        Some(d) => d,
        None => {
            let cap = opts.cap.unwrap_or(DEFAULT_CAP);
            let mut best = usize::MAX;
            for j in 0..p {
                best = best.min(instantaneous_distance(dynamics.isg(base + j), cap)?);
            }
            best
        }
    };
    let max_weight = opts.max_weight.unwrap_or(d0);
    if max_weight == 0 {
        return Err(Error::InvalidParameter("max weight must be at least 1".into()));
    }
    let (first_lo, first_hi, end) = match opts.window {
        Some((a, b)) => {
            if a < dynamics.steady_start() || b < a {
                return Err(Error::InvalidParameter(format!(
                    "window {a}:{b} is not inside the steady stage"
                )));
            }
            (a, b.min(a + p - 1), b)
        }
        None => (base, base + p - 1, base + p - 1 + (max_weight - 1) * mu),
    };
    let probes = enumerate_detectors(dynamics, first_lo + 1, (end + mu + 1).max(dynamics.mu_base() + 1));
    let space = SearchSpace::new(n, &probes, first_lo, end, opts.sector);
    let firsts: Vec<usize> = (0..space.locs.len())
        .filter(|&i| space.locs[i].slot <= first_hi)
        .collect();

    let search = || -> Result<DistanceResult> {
        let mut stats = SearchStats::default();
        for w in 1..=max_weight {
            let results: Vec<Result<(Option<Witness>, SearchStats)>> = firsts
                .par_iter()
                .map(|&i| {
                    let mut dfs = Dfs {
                        dynamics,
                        space: &space,
                        mu,
                        stats: SearchStats::default(),
                        chosen: vec![i],
                    };
                    let l = space.locs[i];
                    let found = dfs.run(i, w - 1, &space.sigs[i], l.slot)?;
                    Ok((found, dfs.stats))
                })
                .collect();
            let mut witness = None;
            for r in results {
                let (found, st) = r?;
                stats.add(&st);
                if witness.is_none() {
                    witness = found;
                }
            }
            if let Some((e, logical, slot)) = witness {
                return Ok(DistanceResult {
                    distance: Some(w),
                    witness: Some(e),
                    logical: Some((logical, slot)),
                    search_window: (first_lo, end),
                    max_weight,
                    d0,
                    stats,
                });
            }
        }
        Ok(DistanceResult {
            distance: None,
            witness: None,
            logical: None,
            search_window: (first_lo, end),
            max_weight,
            d0,
            stats,
        })
    };

    match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(search),
        None => search(),
    }
}

/// Minimum-weight error reproducing the given unhappy detectors (identified
/// by fine step), searched in a window of `mu * max_weight` slots around them.
pub fn correct(
    dynamics: &Dynamics,
    unhappy: &[usize],
    max_weight: usize,
    sector: Sector,
) -> Result<Option<SpacetimeError>> {
    let n = dynamics.num_qubits();
    if unhappy.is_empty() {
        return Ok(Some(SpacetimeError::new(n)));
    }
    let schedule = dynamics.schedule();
    let mu = dynamics.mu();
    let rounds: Vec<usize> = unhappy.iter().map(|&s| schedule.round_of_fine(s).0).collect();
    let t0 = *rounds.iter().min().unwrap();
    let t1 = *rounds.iter().max().unwrap();
    let lo = (t0 - 1)
        .saturating_sub(mu * (max_weight + 1))
        .max(dynamics.steady_start());
    let hi = (t1 - 1 + mu * max_weight).max(lo);
    let probes = enumerate_detectors(dynamics, lo + 1, (hi + mu + 1).max(dynamics.mu_base() + 1));
    let mut target = BitVec::zeros(probes.len());
    for &s in unhappy {
        let i =
            probes.probes.iter().position(|p| p.fine_step == s).ok_or_else(|| {
                Error::InvalidParameter(format!("fine step {s} is not a detector in the search window"))
            })?;
        target.set(i, true);
    }
    let space = SearchSpace::new(n, &probes, lo, hi, sector);

    fn dfs(
        space: &SearchSpace,
        from: usize,
        left: usize,
        acc: &BitVec,
        target: &BitVec,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if left == 0 {
            return acc == target;
        }
        for i in from..space.locs.len() {
            if let Some(&last) = chosen.last() {
                let (a, b) = (space.locs[last], space.locs[i]);
                if a.slot == b.slot && a.qubit == b.qubit {
                    continue;
                }
            }
            chosen.push(i);
            if dfs(space, i + 1, left - 1, &acc.xor(&space.sigs[i]), target, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    for w in 0..=max_weight {
        let mut chosen = Vec::new();
        if dfs(&space, 0, w, &BitVec::zeros(probes.len()), &target, &mut chosen) {
            return Ok(Some(space.error(n, &chosen)));
        }
    }
    Ok(None)
}

/// Finite checks behind the `d - 1` spacetime distance of the Floquet
/// Bacon-Shor code at a given size.
#[derive(Clone, Debug)]
pub struct FbsCertificate {
    pub d: usize,
    /// Far left and right columns, without the right end of the x-axis.
    pub far_set: Vec<usize>,
    /// Every single-qubit `X` after an `X` round equals, up to that round's
    /// measurements, the identity or a single `X` on `far_set`.
    pub normal_form: bool,
    /// `X`-type errors on `far_set` of weight below `d - 1` examined.
    pub stuck_cases: u64,
    /// None of them can be made to commute with the next round by an ISG element.
    pub stuck: bool,
    /// Minimum instantaneous distance over one period.
    pub instantaneous: usize,
    /// Undetectable logical failure of weight `d - 1`.
    pub witness: SpacetimeError,
    pub witness_fails: bool,
}

impl FbsCertificate {
    pub fn passes(&self) -> bool {
        let bound = self.d - 1;
        self.normal_form
            && self.stuck
            && self.instantaneous >= bound
            && self.witness.weight() == bound
            && self.witness_fails
    }

    pub fn distance(&self) -> Option<usize> {
        self.passes().then_some(self.d - 1)
    }
}

/// Checks the lemmas bounding the Floquet Bacon-Shor distance from below at
/// size `d` and classifies a weight-`(d - 1)` witness bounding it from above.
pub fn fbs_distance_certificate(d: usize) -> Result<FbsCertificate> {
    let schedule = crate::library::floquet_bacon_shor(d)?;
    let dynamics = crate::dynamics::run_dynamics(&schedule, None)?;
    let n = d * d;
    let c = (d / 2) as i64;
    let q = |x: i64, y: i64| ((y + c) * d as i64 + x + c) as usize;
    let mut far_set: Vec<usize> = (-c..=c).map(|y| q(-c, y)).collect();
    far_set.extend((-c..=c).filter(|&y| y != 0).map(|y| q(c, y)));
    let xbits = |p: &Pauli| BitVec::from_bits(&(0..n).map(|i| p.x_bit(i)).collect::<Vec<_>>());

    let mut base = dynamics.steady_start().max(5);
    while base % 4 != 1 {
        base += 1;
    }
    let x_slots = [base, base + 2];

    let mut normal_form = true;
    for &t in &x_slots {
        let span = crate::f2::F2Matrix::from_rows(n, schedule.measurements_at(t).iter().map(xbits).collect());
        for v in 0..n {
            let reachable = std::iter::once(None).chain(far_set.iter().map(Some)).any(|u| {
                let mut bits = BitVec::unit(n, v);
                if let Some(&u) = u {
                    bits.flip(u);
                }
                span.contains(&bits)
            });
            normal_form &= reachable;
        }
    }

    let mut stuck_cases = 0u64;
    let mut stuck = true;
    for &t in &x_slots {
        let next = schedule.measurements_at(t + 1);
        let syn = |p: &Pauli| BitVec::from_bits(&next.iter().map(|m| m.anticommutes_unchecked(p)).collect::<Vec<_>>());
        let mut ech = crate::f2::Echelon::new(next.len(), 0);
        for s in dynamics.isg(t).basis() {
            ech.insert(syn(s));
        }
        for w in 1..d - 1 {
            for subset in combinations(far_set.len(), w) {
                let e = Pauli::uniform(n, &subset.iter().map(|&i| far_set[i]).collect::<Vec<_>>(), Pauli1::X);
                let s = syn(&e);
                if s.is_zero() {
                    continue;
                }
                stuck_cases += 1;
                stuck &= !ech.contains(&s);
            }
        }
    }

    let mut instantaneous = usize::MAX;
    for t in base..base + 4 {
        instantaneous = instantaneous.min(instantaneous_distance(dynamics.isg(t), DEFAULT_CAP)?);
    }

    let slot = base + 3;
    let mut op = Pauli::identity(n);
    for y in -c..0 {
        op.mul_assign(&Pauli::uniform(n, &[q(-c, y), q(c, y)], Pauli1::X));
    }
    let witness = SpacetimeError::single(slot, op);
    let witness_fails = crate::detectors::first_triggered(&dynamics, &witness).is_none()
        && matches!(
            crate::spacetime::classify(&dynamics, &witness)?,
            Classification::LogicalFailure { .. }
        );

    Ok(FbsCertificate {
        d,
        far_set,
        normal_form,
        stuck_cases,
        stuck,
        instantaneous,
        witness,
        witness_fails,
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}
