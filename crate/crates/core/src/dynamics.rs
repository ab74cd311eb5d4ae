//! Instantaneous stabilizer group evolution.
//!
//! [`run_dynamics`] steps the sign-free ISG through a schedule round by round,
//! certifies the steady stage of a Floquet schedule by span equality one period
//! apart, and measures the inference window width `mu`.

use crate::error::{Error, Result};
use crate::f2::Echelon;
use crate::pauli::{symplectic_form, Pauli};
use crate::schedule::Schedule;
use crate::spacetime::GeneratorSpace;

/// Sign-free stabilizer group after some fine step.
#[derive(Clone, Debug)]
pub struct IsgState {
    n: usize,
    time: usize,
    basis: Vec<Pauli>,
    provenance: Vec<usize>,
    ech: Echelon,
}

impl IsgState {
    pub fn trivial(n: usize) -> Self {
        Self {
            n,
            time: 0,
            basis: Vec::new(),
            provenance: Vec::new(),
            ech: Echelon::new(Pauli::symplectic_len(n), 0),
        }
    }

    /// Group generated by pairwise commuting operators (dependent ones are dropped).
    pub fn from_commuting(n: usize, generators: &[Pauli]) -> Result<Self> {
        let mut s = Self::trivial(n);
        for (i, g) in generators.iter().enumerate() {
            if g.num_qubits() != n {
                return Err(Error::SizeMismatch {
                    left: g.num_qubits(),
                    right: n,
                });
            }
            if !s.commutes_with_all(g) {
                return Err(Error::InvalidParameter(format!(
                    "generator {i} ({g}) does not commute with the others"
                )));
            }
            if !s.contains(g) {
                s.basis.push(g.sign_free());
                s.provenance.push(0);
                s.rebuild();
            }
        }
        Ok(s)
    }

    fn rebuild(&mut self) {
        let mut ech = Echelon::new(Pauli::symplectic_len(self.n), self.basis.len());
        for (i, b) in self.basis.iter().enumerate() {
            let mut c = crate::f2::BitVec::zeros(self.basis.len());
            c.set(i, true);
            ech.insert_with_combo(b.symplectic().clone(), c);
        }
        self.ech = ech;
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Fine step after which this group holds.
    pub fn time(&self) -> usize {
        self.time
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Pauli] {
        &self.basis
    }

    /// Fine step of the measurement that introduced or last refreshed each row.
    pub fn provenance(&self) -> &[usize] {
        &self.provenance
    }

    pub fn contains(&self, p: &Pauli) -> bool {
        self.ech.contains(p.symplectic())
    }

    /// Indices of basis rows whose product is `p`.
    pub fn decompose(&self, p: &Pauli) -> Option<Vec<usize>> {
        self.ech.solve(p.symplectic()).map(|c| c.iter_ones().collect())
    }

    pub fn commutes_with_all(&self, p: &Pauli) -> bool {
        self.basis.iter().all(|b| !b.anticommutes_unchecked(p))
    }

    /// Span of `other` is contained in span of `self`.
    pub fn includes(&self, other: &IsgState) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    pub fn same_span(&self, other: &IsgState) -> bool {
        self.rank() == other.rank() && self.includes(other)
    }

    /// Measure `m` in place as fine step `time`.
    pub fn measure(&mut self, m: &Pauli, time: usize) -> Result<()> {
        if m.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: m.num_qubits(),
                right: self.n,
            });
        }
        if m.is_identity() {
            return Err(Error::IdentityMeasurement { round: time });
        }
        self.time = time;
        if self.contains(m) {
            return Ok(());
        }
        let anti: Vec<usize> = (0..self.basis.len())
            .filter(|&i| symplectic_form(self.basis[i].symplectic(), m.symplectic()))
            .collect();
        if let Some((&pivot, rest)) = anti.split_first() {
            let r = self.basis[pivot].clone();
            for &s in rest {
                self.basis[s].mul_assign(&r);
                self.provenance[s] = self.provenance[s].max(self.provenance[pivot]);
            }
            self.basis.remove(pivot);
            self.provenance.remove(pivot);
        }
        self.basis.push(m.sign_free());
        self.provenance.push(time);
        self.rebuild();
        Ok(())
    }
}

/// One measurement update, returning the new state at the next fine step.
pub fn step_isg(state: &IsgState, m: &Pauli) -> Result<IsgState> {
    let mut next = state.clone();
    next.measure(m, state.time + 1)?;
    Ok(next)
}

/// Summary of a dynamics run.
#[derive(Clone, Debug)]
pub struct DynamicsReport {
    pub n: usize,
    pub period: usize,
    pub prelude_len: usize,
    pub k: usize,
    /// Initialization time `T` in coarse rounds.
    pub init_time: usize,
    /// First coarse slot treated as steady for spacetime analysis: `max(T, prelude length)`.
    pub steady_start: usize,
    /// Fine step at which round `T` ends.
    pub init_time_fine: usize,
    /// Ranks of `ISG(t)` for `t = 0..ranks.len()`.
    pub ranks: Vec<usize>,
    /// `mu(t)` for `t = mu_base + j`, `j = 0..period`.
    pub mu_by_position: Vec<usize>,
    pub mu_base: usize,
    pub mu: usize,
    /// `ISG(mu_base + j)` for each cycle position `j`.
    pub steady_isgs: Vec<IsgState>,
}

/// Evolved ISGs of a schedule together with the derived steady-stage data.
#[derive(Clone, Debug)]
pub struct Dynamics {
    schedule: Schedule,
    coarse: Vec<IsgState>,
    repeat_from: usize,
    init_time: usize,
    mu_base: usize,
    mu_by_position: Vec<usize>,
    mu: usize,
}

/// Smallest horizon accepted for a periodic schedule.
pub fn required_horizon(schedule: &Schedule) -> usize {
    schedule.prelude_len() + (schedule.num_qubits() + 1) * schedule.period()
}

/// Evolve the ISG along `schedule`.
///
/// Periodic schedules need `horizon >= required_horizon(schedule)`; the run
/// stops as soon as `span ISG(t) == span ISG(t + P)` for some `t` past the
/// prelude. `None` uses the required horizon. For finite schedules the horizon
/// is ignored and rounds past the end are empty.
pub fn run_dynamics(schedule: &Schedule, horizon: Option<usize>) -> Result<Dynamics> {
    let n = schedule.num_qubits();
    let mut coarse = vec![IsgState::trivial(n)];
    let step_round = |prev: &IsgState, t: usize| -> Result<IsgState> {
        let mut s = prev.clone();
        for (i, m) in schedule.measurements_at(t).iter().enumerate() {
            s.measure(m, schedule.fine_index(t, i))?;
        }
        s.time = schedule.round_end(t);
        Ok(s)
    };

    let repeat_from;
    if schedule.is_periodic() {
        let required = required_horizon(schedule);
        let horizon = horizon.unwrap_or(required);
        if horizon < required {
            return Err(Error::HorizonTooShort { horizon, required });
        }
        let p = schedule.period();
        let l = schedule.prelude_len();
        let mut found = None;
        for t in 1..=horizon {
            let next = step_round(coarse.last().unwrap(), t)?;
            coarse.push(next);
            if t >= p && t - p >= l && coarse[t - p].same_span(&coarse[t]) {
                found = Some(t - p);
                break;
            }
        }
        repeat_from = found.ok_or(Error::SteadyStageNotReached(horizon))?;
    } else {
        for t in 1..=schedule.finite_len() {
            let next = step_round(coarse.last().unwrap(), t)?;
            coarse.push(next);
        }
        repeat_from = schedule.finite_len();
    }

    let final_rank = coarse[repeat_from].rank();
    let init_time = (0..=repeat_from).find(|&t| coarse[t].rank() == final_rank).unwrap();
    let mut d = Dynamics {
        schedule: schedule.clone(),
        coarse,
        repeat_from,
        init_time,
        mu_base: 0,
        mu_by_position: Vec::new(),
        mu: 0,
    };
    d.compute_mu();
    Ok(d)
}

impl Dynamics {
    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn num_qubits(&self) -> usize {
        self.schedule.num_qubits()
    }

    pub fn period(&self) -> usize {
        self.schedule.period()
    }

    pub fn init_time(&self) -> usize {
        self.init_time
    }

    /// First slot from which spacetime analysis is supported.
    pub fn steady_start(&self) -> usize {
        self.init_time.max(self.schedule.prelude_len())
    }

    pub fn k(&self) -> usize {
        self.num_qubits() - self.coarse[self.repeat_from].rank()
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn mu_by_position(&self) -> &[usize] {
        &self.mu_by_position
    }

    /// Coarse time at which `mu` positions start; a full period past `steady_start`.
    pub fn mu_base(&self) -> usize {
        self.mu_base
    }

    /// Coarse ISG after round `t`, extended periodically (or held constant
    /// past the end of a finite schedule). The returned state's `time` is
    /// that of the stored representative.
    pub fn isg(&self, t: usize) -> &IsgState {
        if t < self.coarse.len() {
            return &self.coarse[t];
        }
        if !self.schedule.is_periodic() {
            return self.coarse.last().unwrap();
        }
        let p = self.period();
        &self.coarse[self.repeat_from + (t - self.repeat_from) % p]
    }

    /// ISG after fine step `s`.
    pub fn isg_fine(&self, s: usize) -> IsgState {
        if s == 0 {
            return self.coarse[0].clone();
        }
        let (r, i) = self.schedule.round_of_fine(s);
        let mut st = self.isg(r - 1).clone();
        st.time = self.schedule.round_end(r - 1);
        for (j, m) in self.schedule.measurements_at(r).iter().take(i + 1).enumerate() {
            st.measure(m, self.schedule.fine_index(r, j))
                .expect("validated schedule");
        }
        st
    }

    /// `mu(t)`: least `w` with every `ISG(t)` basis row, as a single-slot error
    /// at `t`, generated by benign generators on `[t - w, t]`.
    pub fn inference_window_at(&self, t: usize) -> usize {
        let isg = self.isg(t);
        for w in 0..t {
            let space = GeneratorSpace::new(&self.schedule, t - w, t);
            if isg.basis().iter().all(|s| space.contains_slice(t, s)) {
                return w;
            }
        }
        t
    }

    fn compute_mu(&mut self) {
        if self.schedule.is_periodic() {
            let base = self.schedule.prelude_len() + self.init_time + self.period();
            self.mu_base = base;
            self.mu_by_position = (base..base + self.period())
                .map(|t| self.inference_window_at(t))
                .collect();
        } else {
            let start = self.init_time.max(1);
            self.mu_base = start;
            self.mu_by_position = (start..=self.schedule.finite_len())
                .map(|t| self.inference_window_at(t))
                .collect();
        }
        self.mu = self.mu_by_position.iter().copied().max().unwrap_or(0);
    }

    /// Rank of `ISG(t)` for `t = 0..=max(t_max, computed range)`.
    pub fn ranks(&self, t_max: usize) -> Vec<usize> {
        (0..=t_max).map(|t| self.isg(t).rank()).collect()
    }

    pub fn report(&self) -> DynamicsReport {
        let init_time_fine = self.schedule.round_end(self.init_time);
        DynamicsReport {
            n: self.num_qubits(),
            period: self.period(),
            prelude_len: self.schedule.prelude_len(),
            k: self.k(),
            init_time: self.init_time,
            steady_start: self.steady_start(),
            init_time_fine,
            ranks: self.coarse.iter().map(|s| s.rank()).collect(),
            mu_by_position: self.mu_by_position.clone(),
            mu_base: self.mu_base,
            mu: self.mu,
            steady_isgs: (0..self.mu_by_position.len().max(1))
                .map(|j| self.isg(self.mu_base + j).clone())
                .collect(),
        }
    }
}
