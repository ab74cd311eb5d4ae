//! Measurement schedules and their text format.
//!
//! Coarse time `t >= 1` indexes rounds; round `t` is measured between error
//! slots `t - 1` and `t`. Within a round, measurements are serialized in their
//! listed order into fine steps: the `i`-th measurement (0-based) of round `t`
//! is fine step `round_end(t - 1) + i + 1`, and `ISG` after fine step
//! `round_end(t)` is the coarse `ISG(t)`.
//!
//! File format (line oriented, `#` comments):
//!
//! ```text
//! qubits 2
//! labels 1 2          # optional; default labels are 0..n
//! round X1
//! cycle               # rounds below repeat forever
//! round X1 X2 ; Z1 Z2 # hypothetical: terms separated by `;`
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// One time step's worth of mutually commuting measurements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    measurements: Vec<Pauli>,
}

impl Round {
    pub fn new(measurements: Vec<Pauli>) -> Self {
        Self { measurements }
    }

    pub fn measurements(&self) -> &[Pauli] {
        &self.measurements
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    fn validate(&self, n: usize, round: usize, labels: &[usize]) -> Result<()> {
        if self.measurements.is_empty() {
            return Err(Error::InvalidParameter(format!("round {round} is empty")));
        }
        for m in &self.measurements {
            if m.num_qubits() != n {
                return Err(Error::SizeMismatch {
                    left: m.num_qubits(),
                    right: n,
                });
            }
            if m.is_identity() {
                return Err(Error::IdentityMeasurement { round });
            }
        }
        for (i, a) in self.measurements.iter().enumerate() {
            for b in &self.measurements[i + 1..] {
                if a.anticommutes_unchecked(b) {
                    return Err(Error::NonCommutingRound {
                        round,
                        first: a.to_label_string(labels),
                        second: b.to_label_string(labels),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    Finite,
    Periodic,
}

/// A validated measurement schedule: a finite prelude followed by an optional
/// repeating cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    n: usize,
    labels: Vec<usize>,
    prelude: Vec<Round>,
    cycle: Vec<Round>,
    // prefix[i] = number of measurements in prelude rounds [0, i)
    prelude_prefix: Vec<usize>,
    cycle_prefix: Vec<usize>,
}

impl Schedule {
    pub fn new(n: usize, prelude: Vec<Round>, cycle: Vec<Round>) -> Result<Self> {
        Self::with_labels(n, (0..n).collect(), prelude, cycle)
    }

    pub fn periodic(n: usize, cycle: Vec<Round>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidParameter(
                "periodic schedule needs a nonempty cycle".into(),
            ));
        }
        Self::new(n, Vec::new(), cycle)
    }

    pub fn finite(n: usize, rounds: Vec<Round>) -> Result<Self> {
        Self::new(n, rounds, Vec::new())
    }

    pub fn with_labels(n: usize, labels: Vec<usize>, prelude: Vec<Round>, cycle: Vec<Round>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("schedule needs at least one qubit".into()));
        }
        if labels.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} labels given for {n} qubits",
                labels.len()
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != n {
            return Err(Error::InvalidParameter("qubit labels must be distinct".into()));
        }
        for (i, r) in prelude.iter().chain(&cycle).enumerate() {
            r.validate(n, i + 1, &labels)?;
        }
        let prefix = |rounds: &[Round]| {
            let mut p = vec![0];
            for r in rounds {
                p.push(p.last().unwrap() + r.len());
            }
            p
        };
        Ok(Self {
            n,
            labels,
            prelude_prefix: prefix(&prelude),
            cycle_prefix: prefix(&cycle),
            prelude,
            cycle,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn index_of_label(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn prelude(&self) -> &[Round] {
        &self.prelude
    }

    pub fn cycle(&self) -> &[Round] {
        &self.cycle
    }

    pub fn kind(&self) -> ScheduleKind {
        if self.cycle.is_empty() {
            ScheduleKind::Finite
        } else {
            ScheduleKind::Periodic
        }
    }

    pub fn is_periodic(&self) -> bool {
        !self.cycle.is_empty()
    }

    /// Cycle length `P`; finite schedules report 1 (empty rounds repeat).
    pub fn period(&self) -> usize {
        self.cycle.len().max(1)
    }

    /// Number of explicitly listed rounds before repetition starts.
    pub fn prelude_len(&self) -> usize {
        self.prelude.len()
    }

    /// Round `t >= 1`, or `None` past the end of a finite schedule.
    pub fn round(&self, t: usize) -> Option<&Round> {
        assert!(t >= 1, "rounds are 1-based");
        if t <= self.prelude.len() {
            Some(&self.prelude[t - 1])
        } else if self.cycle.is_empty() {
            None
        } else {
            Some(&self.cycle[(t - self.prelude.len() - 1) % self.cycle.len()])
        }
    }

    /// Measurements of round `t`; empty for `t == 0` or past a finite end.
    pub fn measurements_at(&self, t: usize) -> &[Pauli] {
        if t == 0 {
            return &[];
        }
        self.round(t).map(|r| r.measurements()).unwrap_or(&[])
    }

    /// Fine step at which round `t` ends (0 for `t == 0`).
    pub fn round_end(&self, t: usize) -> usize {
        let l = self.prelude.len();
        if t <= l {
            return self.prelude_prefix[t];
        }
        let base = self.prelude_prefix[l];
        if self.cycle.is_empty() {
            return base;
        }
        let p = self.cycle.len();
        let k = t - l;
        base + (k / p) * self.cycle_prefix[p] + self.cycle_prefix[k % p]
    }

    /// Fine step of measurement `i` (0-based) in round `t`.
    pub fn fine_index(&self, t: usize, i: usize) -> usize {
        debug_assert!(i < self.measurements_at(t).len());
        self.round_end(t - 1) + i + 1
    }

    /// Inverse of [`Schedule::fine_index`].
    pub fn round_of_fine(&self, s: usize) -> (usize, usize) {
        assert!(s >= 1);
        // binary search over t on round_end
        let (mut lo, mut hi) = (1usize, 2usize);
        while self.round_end(hi) < s {
            if !self.is_periodic() && hi > self.prelude.len() {
                panic!("fine step {s} past the end of a finite schedule");
            }
            lo = hi;
            hi *= 2;
        }
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.round_end(mid) >= s {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        (lo, s - self.round_end(lo - 1) - 1)
    }

    /// Measurement performed at fine step `s`.
    pub fn measurement_at_fine(&self, s: usize) -> &Pauli {
        let (t, i) = self.round_of_fine(s);
        &self.measurements_at(t)[i]
    }

    /// Number of rounds a finite schedule lists (prelude length for periodic ones).
    pub fn finite_len(&self) -> usize {
        self.prelude.len()
    }

    /// Every measurement is X-type or Z-type.
    pub fn is_css(&self) -> bool {
        self.prelude
            .iter()
            .chain(&self.cycle)
            .flat_map(|r| r.measurements())
            .all(|m| m.is_x_type() || m.is_z_type())
    }

    /// Rebuild with each round transformed (e.g. reordered); revalidates.
    pub fn map_rounds(&self, mut f: impl FnMut(usize, &Round) -> Round) -> Result<Schedule> {
        let prelude = self.prelude.iter().enumerate().map(|(i, r)| f(i + 1, r)).collect();
        let l = self.prelude.len();
        let cycle = self.cycle.iter().enumerate().map(|(i, r)| f(l + i + 1, r)).collect();
        Schedule::with_labels(self.n, self.labels.clone(), prelude, cycle)
    }

    pub fn format_pauli(&self, p: &Pauli) -> String {
        p.to_label_string(&self.labels)
    }

    pub fn parse_pauli(&self, text: &str) -> std::result::Result<Pauli, String> {
        Pauli::parse_with(self.n, text, |l| self.index_of_label(l))
    }

    /// Parse the schedule file format.
    pub fn parse(text: &str) -> Result<Schedule> {
        let mut n: Option<usize> = None;
        let mut labels: Option<Vec<usize>> = None;
        let mut prelude: Vec<(usize, Round)> = Vec::new();
        let mut cycle: Vec<(usize, Round)> = Vec::new();
        let mut in_cycle = false;
        let err = |line: usize, msg: String| Error::Parse { line, msg };

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = match line.split_once(char::is_whitespace) {
                Some((h, r)) => (h, r.trim()),
                None => (line, ""),
            };
            match head {
                "qubits" => {
                    if n.is_some() {
                        return Err(err(line_no, "duplicate `qubits` header".into()));
                    }
                    let v: usize = rest
                        .parse()
                        .map_err(|_| err(line_no, format!("bad qubit count `{rest}`")))?;
                    if v == 0 {
                        return Err(err(line_no, "qubit count must be positive".into()));
                    }
                    n = Some(v);
                }
                "labels" => {
                    let Some(nq) = n else {
                        return Err(err(line_no, "`labels` before `qubits`".into()));
                    };
                    let ls: std::result::Result<Vec<usize>, _> =
                        rest.split_whitespace().map(str::parse::<usize>).collect();
                    let ls = ls.map_err(|_| err(line_no, "labels must be non-negative integers".into()))?;
                    if ls.len() != nq {
                        return Err(err(line_no, format!("expected {nq} labels, found {}", ls.len())));
                    }
                    labels = Some(ls);
                }
                "cycle" => {
                    if !rest.is_empty() {
                        return Err(err(line_no, "`cycle` takes no arguments".into()));
                    }
                    if in_cycle {
                        return Err(err(line_no, "duplicate `cycle` marker".into()));
                    }
                    in_cycle = true;
                }
                "round" => {
                    let Some(nq) = n else {
                        return Err(err(line_no, "`round` before `qubits` header".into()));
                    };
                    let ls: Vec<usize> = labels.clone().unwrap_or_else(|| (0..nq).collect());
                    let lookup = |l: usize| ls.iter().position(|&x| x == l);
                    let mut ms = Vec::new();
                    for term in rest.split(';') {
                        let term = term.trim();
                        if term.is_empty() {
                            return Err(err(line_no, "empty measurement term".into()));
                        }
                        let p = Pauli::parse_with(nq, term, lookup).map_err(|m| err(line_no, m))?;
                        if p.is_identity() {
                            return Err(err(line_no, "identity measurement".into()));
                        }
                        ms.push(p.with_sign(None));
                    }
                    let target = if in_cycle { &mut cycle } else { &mut prelude };
                    target.push((line_no, Round::new(ms)));
                }
                other => return Err(err(line_no, format!("unknown directive `{other}`"))),
            }
        }
        let Some(n) = n else {
            return Err(err(0, "missing `qubits` header".into()));
        };
        if in_cycle && cycle.is_empty() {
            return Err(err(0, "empty cycle body".into()));
        }
        let labels = labels.unwrap_or_else(|| (0..n).collect());
        // validate per round, keeping line numbers in the report
        for (line, r) in prelude.iter().chain(&cycle) {
            for (i, a) in r.measurements().iter().enumerate() {
                for b in &r.measurements()[i + 1..] {
                    if a.anticommutes_unchecked(b) {
                        return Err(err(
                            *line,
                            format!(
                                "measurements `{}` and `{}` do not commute",
                                a.to_label_string(&labels),
                                b.to_label_string(&labels)
                            ),
                        ));
                    }
                }
            }
        }
        Schedule::with_labels(
            n,
            labels,
            prelude.into_iter().map(|(_, r)| r).collect(),
            cycle.into_iter().map(|(_, r)| r).collect(),
        )
    }

    /// Render to the text format; `parse(render(s)) == s`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qubits {}", self.n);
        if self.labels.iter().enumerate().any(|(i, &l)| i != l) {
            let ls: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(out, "labels {}", ls.join(" "));
        }
        let render_round = |out: &mut String, r: &Round| {
            let terms: Vec<String> = r.measurements().iter().map(|m| self.format_pauli(m)).collect();
            let _ = writeln!(out, "round {}", terms.join(" ; "));
        };
        for r in &self.prelude {
            render_round(&mut out, r);
        }
        if self.is_periodic() {
            out.push_str("cycle\n");
            for r in &self.cycle {
                render_round(&mut out, r);
            }
        }
        out
    }
}
