//! Brute-force oracles: a dense state-vector simulator checked against the
//! symplectic machinery, plus exhaustive distance enumeration on small codes.

use dyncode::distance::{spacetime_distance, DistanceOptions};
use dyncode::pauli::centralizer_basis;
use dyncode::spacetime::enumerate_benign_generators;
use dyncode::{
    classify, first_triggered, library, push, run_dynamics, triggered_detectors, Classification, Dynamics, Pauli,
    Pauli1, Schedule, SpacetimeError,
};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

/// `P |b> = i^ny (-1)^(z.b) |b ^ x>`.
struct Op {
    x: usize,
    z: usize,
    ny: u32,
}

impl Op {
    fn new(p: &Pauli) -> Self {
        let (mut x, mut z, mut ny) = (0, 0, 0);
        for (q, f) in p.factors() {
            let (bx, bz) = f.bits();
            if bx {
                x |= 1 << q;
            }
            if bz {
                z |= 1 << q;
            }
            if bx && bz {
                ny += 1;
            }
        }
        Op { x, z, ny }
    }

    fn phase(&self, b: usize) -> C {
        let i_pow = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)][(self.ny % 4) as usize];
        if (self.z & b).count_ones() % 2 == 1 {
            -i_pow
        } else {
            i_pow
        }
    }
}

/// Pure state vector. A random pure start is stabilized by exactly the
/// ISG elements at every later time, with probability one.
#[derive(Clone)]
struct Sv(Vec<C>);

impl Sv {
    fn random(n: usize, rng: &mut impl Rng) -> Self {
        let v: Vec<C> = (0..1usize << n)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        Sv(v.into_iter().map(|c| c / norm).collect())
    }

    fn apply(&self, p: &Op) -> Vec<C> {
        let mut out = vec![C::new(0.0, 0.0); self.0.len()];
        for (b, v) in self.0.iter().enumerate() {
            out[b ^ p.x] = p.phase(b) * v;
        }
        out
    }

    fn conjugate(&mut self, p: &Pauli) {
        self.0 = self.apply(&Op::new(p));
    }

    fn expect(&self, p: &Pauli) -> f64 {
        self.0
            .iter()
            .zip(self.apply(&Op::new(p)))
            .map(|(a, b)| a.conj() * b)
            .sum::<C>()
            .re
    }

    /// Project onto outcome `s` of `p`; returns the outcome probability.
    fn project(&mut self, p: &Pauli, s: f64) -> f64 {
        let pv = self.apply(&Op::new(p));
        for (v, w) in self.0.iter_mut().zip(pv) {
            *v = (*v + s * w) / 2.0;
        }
        let prob: f64 = self.0.iter().map(|c| c.norm_sqr()).sum();
        if prob > TOL {
            let norm = prob.sqrt();
            for v in &mut self.0 {
                *v /= norm;
            }
        }
        prob
    }

    /// `1 - |<self|other>|`: zero iff the states agree up to phase.
    fn distance(&self, other: &Sv) -> f64 {
        1.0 - self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum::<C>().norm()
    }
}

/// Outcome record of one simulated history.
struct History {
    /// `(fine step, sign)` of each measurement whose outcome was forced by the state.
    deterministic: Vec<(usize, f64)>,
    state: Sv,
}

/// Run rounds `1..=rounds`, inserting `e` at its slots; random outcomes come
/// from `coins` in order.
fn simulate(s: &Schedule, init: &Sv, e: &SpacetimeError, rounds: usize, coins: &[bool]) -> History {
    let mut rho = init.clone();
    let mut det = Vec::new();
    let mut coin = coins.iter();
    if let Some(p) = e.get(0) {
        rho.conjugate(p);
    }
    for t in 1..=rounds {
        for (i, m) in s.measurements_at(t).iter().enumerate() {
            let ev = rho.expect(m);
            if (ev.abs() - 1.0).abs() < 1e-7 {
                det.push((s.fine_index(t, i), ev.signum()));
            } else {
                let sign = if *coin.next().expect("enough coins") { 1.0 } else { -1.0 };
                let prob = rho.project(m, sign);
                assert!(prob > 1e-6, "forced outcome has probability {prob}");
            }
        }
        if let Some(p) = e.get(t) {
            rho.conjugate(p);
        }
    }
    History {
        deterministic: det,
        state: rho,
    }
}

fn flipped(clean: &History, noisy: &History) -> Vec<usize> {
    assert_eq!(clean.deterministic.len(), noisy.deterministic.len());
    clean
        .deterministic
        .iter()
        .zip(&noisy.deterministic)
        .filter(|(a, b)| {
            assert_eq!(a.0, b.0);
            a.1 != b.1
        })
        .map(|(a, _)| a.0)
        .collect()
}

/// Library codes small enough for the simulator, with a case budget each.
fn small_codes() -> Vec<(&'static str, Schedule, usize)> {
    vec![
        (
            "static-rep",
            library::promote_static_code(library::repetition_generators(3)).unwrap(),
            150,
        ),
        (
            "static-513",
            library::promote_static_code(library::five_qubit_generators()).unwrap(),
            150,
        ),
        ("ladder-2", library::ladder(2).unwrap(), 150),
        ("ladder-3", library::ladder(3).unwrap(), 100),
        ("worstcase", library::worstcase_init(4).unwrap(), 150),
        ("fbs", library::floquet_bacon_shor(3).unwrap(), 100),
        ("honeycomb", library::honeycomb(3).unwrap(), 12),
    ]
}

fn all_paulis(n: usize) -> impl Iterator<Item = Pauli> {
    (0..4usize.pow(n as u32)).map(move |mut code| {
        let mut p = Pauli::identity(n);
        for q in 0..n {
            p.set(q, Pauli1::from_bits(code & 1 == 1, code & 2 == 2));
            code >>= 2;
        }
        p
    })
}

#[test]
fn isg_matches_simulation() {
    let mut codes = small_codes();
    codes.push((
        "two-qubit",
        Schedule::parse("qubits 2\nround X0\nround X1\nround X0 X1\nround Z0 Z1\n").unwrap(),
        0,
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (name, s, _) in codes {
        let n = s.num_qubits();
        let d = run_dynamics(&s, None).unwrap();
        let last = d.steady_start() + 2 * d.period().max(1);
        let coins: Vec<bool> = (0..10_000).map(|_| rng.gen()).collect();
        let mut rho = Sv::random(n, &mut rng);
        let mut coin = coins.iter();
        for t in 0..=last {
            if t > 0 {
                for m in s.measurements_at(t) {
                    if (rho.expect(m).abs() - 1.0).abs() > 1e-7 {
                        let sign = if *coin.next().unwrap() { 1.0 } else { -1.0 };
                        rho.project(m, sign);
                    }
                }
            }
            let isg = d.isg(t);
            let in_state = |p: &Pauli| (rho.expect(p).abs() - 1.0).abs() < 1e-7;
            if n <= 5 {
                let members = all_paulis(n).filter(|p| in_state(p)).count();
                assert_eq!(members, 1 << isg.rank(), "{name} rank at t={t}");
                for p in all_paulis(n) {
                    assert_eq!(in_state(&p), isg.contains(&p), "{name} t={t} {p:?}");
                }
            } else {
                for b in isg.basis() {
                    assert!(in_state(b), "{name} t={t}");
                }
                for _ in 0..if n > 12 { 30 } else { 300 } {
                    let mut p = Pauli::identity(n);
                    for b in isg.basis() {
                        if rng.gen() {
                            p.mul_assign(b);
                        }
                    }
                    let q = rng.gen_range(0..n);
                    let f = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z][rng.gen_range(0..4)];
                    let mut p2 = p.clone();
                    p2.set(
                        q,
                        Pauli1::from_bits(p.get(q).bits().0 ^ f.bits().0, p.get(q).bits().1 ^ f.bits().1),
                    );
                    assert_eq!(in_state(&p2), isg.contains(&p2), "{name} t={t}");
                }
            }
        }
    }
}

fn random_location_error(n: usize, slots: (usize, usize), weight: usize, rng: &mut impl Rng) -> SpacetimeError {
    let mut e = SpacetimeError::new(n);
    for _ in 0..weight {
        let t = rng.gen_range(slots.0..=slots.1);
        let f = [Pauli1::X, Pauli1::Y, Pauli1::Z][rng.gen_range(0..3)];
        e.mul_slice(t, &Pauli::single(n, rng.gen_range(0..n), f));
    }
    e
}

/// Random undetectable error: benign generators times, sometimes, a logical.
fn random_undetectable(d: &Dynamics, rng: &mut impl Rng) -> SpacetimeError {
    let s = d.schedule();
    let n = s.num_qubits();
    let a = d.steady_start() + d.mu() + rng.gen_range(0..d.period());
    let b = a + rng.gen_range(0..=d.period() + 1);
    let gens = enumerate_benign_generators(s, a, b);
    let mut e = SpacetimeError::new(n);
    for g in &gens {
        if rng.gen_bool(0.3) {
            e.mul_assign(&g.to_error());
        }
    }
    if rng.gen() {
        let t = rng.gen_range(a..=b);
        let isg = d.isg(t);
        let mut l = Pauli::identity(n);
        for c in centralizer_basis(n, isg.basis()) {
            if rng.gen() {
                l.mul_assign(&c);
            }
        }
        e.mul_slice(t, &l);
    }
    e
}

#[test]
fn detector_flips_match_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (name, s, cases) in small_codes() {
        let n = s.num_qubits();
        let d = run_dynamics(&s, None).unwrap();
        let p = d.period();
        for case in 0..cases {
            let e = if case % 2 == 0 {
                let a = d.steady_start() + rng.gen_range(0..p);
                random_location_error(n, (a, a + p + 1), rng.gen_range(1..=3), &mut rng)
            } else {
                random_undetectable(&d, &mut rng)
            };
            let Some(b) = e.max_slot() else { continue };
            let _a = e.min_slot().unwrap();
            let rounds = b + d.mu() + 2 * p + 1;
            let coins: Vec<bool> = (0..10_000).map(|_| rng.gen()).collect();
            let init = Sv::random(n, &mut rng);
            let clean = simulate(&s, &init, &SpacetimeError::new(n), rounds, &coins);
            let noisy = simulate(&s, &init, &e, rounds, &coins);
            let flips = flipped(&clean, &noisy);
            let first = first_triggered(&d, &e).map(|p| p.fine_step);
            assert_eq!(first, flips.iter().min().copied(), "{name}: {e:?}");
            let all = triggered_detectors(&d, &e);
            assert_eq!(all.is_empty(), flips.is_empty(), "{name}: {e:?}");
            if let Some(f) = first {
                assert!(all.contains(&f));
            }
        }
    }
}

#[test]
fn classification_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, s, cases) in small_codes() {
        let n = s.num_qubits();
        let d = run_dynamics(&s, None).unwrap();
        let (mut benign, mut failures) = (0, 0);
        for _ in 0..cases {
            let e = random_undetectable(&d, &mut rng);
            let Some(b) = e.max_slot() else { continue };
            let cls = classify(&d, &e).unwrap();
            assert!(!cls.is_detectable(), "{name}");
            let rounds = b + d.mu() + d.period() + 2;
            let coins: Vec<bool> = (0..10_000).map(|_| rng.gen()).collect();
            let init = Sv::random(n, &mut rng);
            let clean = simulate(&s, &init, &SpacetimeError::new(n), rounds, &coins);
            let noisy = simulate(&s, &init, &e, rounds, &coins);
            assert!(flipped(&clean, &noisy).is_empty());
            let same = clean.state.distance(&noisy.state) < 1e-6;
            assert_eq!(cls.is_benign(), same, "{name}: {e:?}");
            if same {
                benign += 1;
            } else {
                failures += 1;
            }

            let target = b + d.mu() + 1;
            let pushed = push(&d, &e, target).unwrap();
            let moved = simulate(&s, &init, &pushed.error, rounds, &coins);
            assert!(
                noisy.state.distance(&moved.state) < 1e-6,
                "{name}: push changed the action"
            );
        }
        assert!(benign > 0, "{name}");
        if d.k() > 0 {
            assert!(failures > 0, "{name}");
        }
    }
}

/// Minimum logical-failure weight by plain enumeration over all location sets
/// whose earliest slot lies in one period.
fn brute_force_distance(d: &Dynamics, window: (usize, usize), max_weight: usize) -> Option<usize> {
    let n = d.num_qubits();
    let mut locs = Vec::new();
    for t in window.0..=window.1 {
        for q in 0..n {
            for f in [Pauli1::X, Pauli1::Y, Pauli1::Z] {
                locs.push((t, q, f));
            }
        }
    }
    let first_period = window.0 + d.period();
    fn rec(
        d: &Dynamics,
        locs: &[(usize, usize, Pauli1)],
        first_period: usize,
        from: usize,
        left: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if left == 0 {
            let n = d.num_qubits();
            let mut e = SpacetimeError::new(n);
            for &i in chosen.iter() {
                let (t, q, f) = locs[i];
                e.mul_slice(t, &Pauli::single(n, q, f));
            }
            return first_triggered(d, &e).is_none()
                && matches!(classify(d, &e).unwrap(), Classification::LogicalFailure { .. });
        }
        for i in from..locs.len() {
            if chosen.is_empty() && locs[i].0 >= first_period {
                break;
            }
            if let Some(&j) = chosen.last() {
                if locs[j].0 == locs[i].0 && locs[j].1 == locs[i].1 {
                    continue;
                }
            }
            chosen.push(i);
            if rec(d, locs, first_period, i + 1, left - 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    (1..=max_weight).find(|&w| rec(d, &locs, first_period, 0, w, &mut Vec::new()))
}

#[test]
fn distance_search_matches_enumeration() {
    let cases = [
        library::promote_static_code(library::repetition_generators(3)).unwrap(),
        library::promote_static_code(library::five_qubit_generators()).unwrap(),
        library::ladder(2).unwrap(),
        library::floquet_bacon_shor(3).unwrap(),
    ];
    for s in cases {
        let d = run_dynamics(&s, None).unwrap();
        let r = spacetime_distance(&d, &DistanceOptions::default()).unwrap();
        let want = brute_force_distance(&d, r.search_window, r.max_weight);
        assert_eq!(r.distance, want);
        let w = r.witness.unwrap();
        assert_eq!(w.weight(), want.unwrap());
        assert!(classify(&d, &w).unwrap().is_logical_failure());
    }
}
