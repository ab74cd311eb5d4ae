//! Random generators and invariant checks shared by the property and
//! acceptance suites.
#![allow(dead_code)]

use std::sync::LazyLock;

use dyncode::spacetime::{enumerate_benign_generators, generator_product};
use dyncode::{
    ancestry, classify, enumerate_detectors, first_triggered, is_benign, library, push, run_dynamics, syndrome,
    Classification, Dynamics, Pauli, Pauli1, Round, SpacetimeError,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub static CODES: LazyLock<Vec<(&'static str, Dynamics)>> = LazyLock::new(|| {
    let build = |name: &str, p: library::Params| run_dynamics(&library::build(name, p).unwrap(), None).unwrap();
    let d = |x| library::Params {
        d: Some(x),
        ..Default::default()
    };
    let m = |x| library::Params {
        m: Some(x),
        ..Default::default()
    };
    vec![
        ("ladder-2", build("ladder", m(2))),
        ("ladder-3", build("ladder", m(3))),
        ("honeycomb", build("honeycomb", library::Params::default())),
        ("vuillot", build("vuillot-min", library::Params::default())),
        ("fbs-3", build("fbs", d(3))),
        ("fbs-5", build("fbs", d(5))),
        ("worstcase", build("worstcase-init", library::Params::default())),
        ("static-rep", build("static-rep", library::Params::default())),
        ("static-513", build("static-513", library::Params::default())),
    ]
});

/// Indices of the Bacon-Shor entries in [`CODES`].
pub const BACON_SHOR: [usize; 2] = [4, 5];

/// A steady-stage slot window `[a, b]` of at most two periods.
pub fn window(d: &Dynamics, rng: &mut impl Rng) -> (usize, usize) {
    let a = d.steady_start() + d.mu() + rng.gen_range(0..d.period());
    (a, a + rng.gen_range(0..=2 * d.period()))
}

pub fn random_benign(d: &Dynamics, rng: &mut impl Rng) -> SpacetimeError {
    let (a, b) = window(d, rng);
    let gens = enumerate_benign_generators(d.schedule(), a, b);
    let chosen: Vec<_> = gens.into_iter().filter(|_| rng.gen_bool(0.2)).collect();
    generator_product(d.num_qubits(), &chosen)
}

pub fn random_stabilizer(d: &Dynamics, t: usize, rng: &mut impl Rng) -> Pauli {
    let mut s = Pauli::identity(d.num_qubits());
    for b in d.isg(t).basis() {
        if rng.gen() {
            s.mul_assign(b);
        }
    }
    s
}

pub fn random_logical(d: &Dynamics, t: usize, rng: &mut impl Rng) -> Pauli {
    let n = d.num_qubits();
    let mut l = Pauli::identity(n);
    for c in dyncode::pauli::centralizer_basis(n, d.isg(t).basis()) {
        if rng.gen() {
            l.mul_assign(&c);
        }
    }
    l
}

pub fn random_sparse(d: &Dynamics, rng: &mut impl Rng) -> SpacetimeError {
    let n = d.num_qubits();
    let (a, b) = window(d, rng);
    let mut e = SpacetimeError::new(n);
    for _ in 0..rng.gen_range(1..=3) {
        let f = [Pauli1::X, Pauli1::Y, Pauli1::Z][rng.gen_range(0..3)];
        e.mul_slice(rng.gen_range(a..=b), &Pauli::single(n, rng.gen_range(0..n), f));
    }
    e
}

/// Undetectable error: a benign product, possibly times a single-slot logical.
pub fn random_undetectable(d: &Dynamics, rng: &mut impl Rng) -> SpacetimeError {
    let mut e = random_benign(d, rng);
    if rng.gen() {
        let (a, b) = window(d, rng);
        let t = rng.gen_range(a..=b);
        e.mul_slice(t, &random_logical(d, t, rng));
    }
    e
}

/// Same logical class at a common later slot.
pub fn same_logical(d: &Dynamics, e1: &SpacetimeError, e2: &SpacetimeError) -> bool {
    let t = e1.max_slot().unwrap_or(0).max(e2.max_slot().unwrap_or(0)) + d.mu() + 1;
    let p1 = push(d, e1, t).unwrap().error.at(t);
    let p2 = push(d, e2, t).unwrap().error.at(t);
    d.isg(t).contains(&p1.multiply(&p2).unwrap())
}

pub fn benign_is_undetectable(d: &Dynamics, rng: &mut impl Rng) -> Check {
    let e = random_benign(d, rng);
    ensure!(
        first_triggered(d, &e).is_none(),
        "benign error triggered a detector: {e:?}"
    );
    if let (Some(a), Some(b)) = (e.min_slot(), e.max_slot()) {
        let probes = enumerate_detectors(d, a + 1, b + d.mu() + 1);
        ensure!(syndrome(&probes, &e).unwrap().is_zero(), "nonzero syndrome: {e:?}");
        ensure!(classify(d, &e).unwrap().is_benign(), "not classified benign: {e:?}");
    }
    Ok(())
}

pub fn stabilizers_are_benign(d: &Dynamics, rng: &mut impl Rng) -> Check {
    let t = window(d, rng).1;
    let e = SpacetimeError::single(t, random_stabilizer(d, t, rng));
    let Some(cert) = is_benign(d, &e).unwrap() else {
        return Err(format!("no certificate for {e:?}"));
    };
    ensure!(
        cert.iter().all(|g| g.is_valid(d.schedule())),
        "invalid generator in certificate"
    );
    ensure!(
        generator_product(d.num_qubits(), &cert) == e,
        "certificate does not multiply to {e:?}"
    );
    ensure!(classify(d, &e).unwrap().is_benign(), "not classified benign: {e:?}");
    Ok(())
}

pub fn ancestry_is_linear(d: &Dynamics, rng: &mut impl Rng) -> Check {
    let s = d.schedule();
    let t = window(d, rng).1;
    let fine = s.round_end(t);
    let tau = s.round_end(t.saturating_sub(rng.gen_range(0..=d.mu() + 1)));
    let (x, y) = (random_stabilizer(d, t, rng), random_stabilizer(d, t, rng));
    let ax = ancestry(d, &x, fine, tau).unwrap().as_error();
    let ay = ancestry(d, &y, fine, tau).unwrap().as_error();
    let axy = ancestry(d, &x.multiply(&y).unwrap(), fine, tau).unwrap().as_error();
    ensure!(axy == ax.product(&ay), "ancestry not additive at t={t}, tau={tau}");
    Ok(())
}

pub fn css_parts_independent(d: &Dynamics, rng: &mut impl Rng) -> Check {
    let e = random_sparse(d, rng).product(&random_undetectable(d, rng));
    ensure!(
        dyncode::detectors::css_split_check(d, &e).unwrap(),
        "split check failed: {e:?}"
    );
    let (a, b) = (e.min_slot().unwrap(), e.max_slot().unwrap());
    let probes = enumerate_detectors(d, a + 1, b + d.mu() + 1);
    let whole = syndrome(&probes, &e).unwrap();
    let parts = syndrome(&probes, &e.x_part())
        .unwrap()
        .xor(&syndrome(&probes, &e.z_part()).unwrap());
    ensure!(whole == parts, "syndrome not additive over X and Z parts: {e:?}");
    Ok(())
}

pub fn steady_isg_repeats(d: &Dynamics, rng: &mut impl Rng) -> Check {
    let p = d.period();
    let t = d.steady_start() + rng.gen_range(0..p);
    ensure!(
        d.isg(t).includes(d.isg(t + p)) && d.isg(t + p).includes(d.isg(t)),
        "ISG({t}) != ISG({t}+P)"
    );
    ensure!(d.isg(t).same_span(d.isg(t + 2 * p)), "ISG({t}) != ISG({t}+2P)");
    Ok(())
}

pub fn push_recombines(d: &Dynamics, rng: &mut impl Rng) -> Check {
    let e = random_undetectable(d, rng);
    let Some(b) = e.max_slot() else { return Ok(()) };
    let target = b + rng.gen_range(0..4);
    let pushed = push(d, &e, target).unwrap();
    ensure!(
        pushed.error.slots().iter().all(|&t| t == target),
        "pushed error leaves slot {target}"
    );
    ensure!(
        pushed.certificate.iter().all(|g| g.is_valid(d.schedule())),
        "invalid generator"
    );
    ensure!(
        e.product(&pushed.error) == generator_product(d.num_qubits(), &pushed.certificate),
        "certificate does not recombine for {e:?}"
    );
    Ok(())
}

pub fn classify_ignores_benign(d: &Dynamics, rng: &mut impl Rng) -> Check {
    let e = if rng.gen() {
        random_sparse(d, rng)
    } else {
        random_undetectable(d, rng)
    };
    let eb = e.product(&random_benign(d, rng));
    let (c1, c2) = (classify(d, &e).unwrap(), classify(d, &eb).unwrap());
    match (&c1, &c2) {
        (Classification::Detectable { .. }, Classification::Detectable { .. })
        | (Classification::Benign { .. }, Classification::Benign { .. }) => Ok(()),
        (Classification::LogicalFailure { .. }, Classification::LogicalFailure { .. }) => {
            ensure!(same_logical(d, &e, &eb), "logical class changed for {e:?}");
            Ok(())
        }
        _ => Err(format!("{c1:?} vs {c2:?}")),
    }
}

pub fn round_order_irrelevant(d: &Dynamics, rng: &mut impl Rng) -> Check {
    let s = d.schedule();
    let shuffled = s
        .map_rounds(|_, r| {
            let mut ms = r.measurements().to_vec();
            ms.shuffle(rng);
            Round::new(ms)
        })
        .unwrap();
    let d2 = run_dynamics(&shuffled, None).unwrap();
    let (r1, r2) = (d.report(), d2.report());
    ensure!(
        (
            r1.n,
            r1.period,
            r1.prelude_len,
            r1.k,
            r1.init_time,
            r1.steady_start,
            r1.init_time_fine
        ) == (
            r2.n,
            r2.period,
            r2.prelude_len,
            r2.k,
            r2.init_time,
            r2.steady_start,
            r2.init_time_fine
        ),
        "report header changed"
    );
    ensure!(
        (&r1.ranks, &r1.mu_by_position, r1.mu_base, r1.mu) == (&r2.ranks, &r2.mu_by_position, r2.mu_base, r2.mu),
        "ranks or windows changed"
    );
    ensure!(
        r1.steady_isgs.iter().zip(&r2.steady_isgs).all(|(a, b)| a.same_span(b)),
        "steady ISGs changed"
    );
    let e = if rng.gen() {
        random_sparse(d, rng)
    } else {
        random_undetectable(d, rng)
    };
    let (c1, c2) = (classify(d, &e).unwrap(), classify(&d2, &e).unwrap());
    ensure!(
        (c1.is_detectable(), c1.is_benign()) == (c2.is_detectable(), c2.is_benign()),
        "verdict changed for {e:?}"
    );
    Ok(())
}
