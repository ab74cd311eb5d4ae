//! Built-in schedules.
//!
//! Ladder and worst-case-initialization codes use 1-based qubit labels so
//! operators can be written as in the usual figures (`Y5 Y6 Y7 Y8`). The
//! honeycomb torus uses labels `0..n`.

use crate::error::{Error, Result};
use crate::pauli::{Pauli, Pauli1};
use crate::schedule::{Round, Schedule};

fn pairs(n: usize, list: &[(usize, usize)], p: Pauli1) -> Round {
    Round::new(list.iter().map(|&(a, b)| Pauli::uniform(n, &[a, b], p)).collect())
}

fn singles(n: usize, list: &[usize], p: Pauli1) -> Round {
    Round::new(list.iter().map(|&a| Pauli::single(n, a, p)).collect())
}

/// Ladder code on `4m` qubits with labels `1..=4m`.
///
/// Rungs join labels `(2k-1, 2k)`; odd labels form one leg and even labels the
/// other. The leg segments between rung `k` and rung `k+1` are `(2k-1, 2k+1)`
/// and `(2k, 2k+2)` (wrapping around), measured as `XX` for odd `k` and `YY`
/// for even `k`. The cycle is rungs `ZZ`, segments `XX`, rungs `ZZ`,
/// segments `YY`.
pub fn ladder(m: usize) -> Result<Schedule> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("ladder needs m >= 2, got {m}")));
    }
    let n = 4 * m;
    let idx = |label: usize| (label - 1) % n;
    let rungs: Vec<_> = (1..=2 * m).map(|k| (idx(2 * k - 1), idx(2 * k))).collect();
    let mut xx = Vec::new();
    let mut yy = Vec::new();
    for k in 1..=2 * m {
        let segs = [(idx(2 * k - 1), idx(2 * k + 1)), (idx(2 * k), idx(2 * k + 2))];
        if k % 2 == 1 {
            xx.extend(segs);
        } else {
            yy.extend(segs);
        }
    }
    Schedule::with_labels(
        n,
        (1..=n).collect(),
        Vec::new(),
        vec![
            pairs(n, &rungs, Pauli1::Z),
            pairs(n, &xx, Pauli1::X),
            pairs(n, &rungs, Pauli1::Z),
            pairs(n, &yy, Pauli1::Y),
        ],
    )
}

/// Honeycomb code on an `l x l` torus of hexagonal plaquettes (`2 l^2` qubits).
///
/// Plaquette `(i, j)` has color `(i + j) mod 3`; vertices are the up and down
/// triangles of the dual triangular lattice, qubit `2 (l i + j)` being the up
/// triangle `(i,j),(i+1,j),(i+1,j+1)` and qubit `2 (l i + j) + 1` the down
/// triangle `(i,j),(i,j+1),(i+1,j+1)`. An edge has the color of the two
/// plaquettes it joins; colors 0, 1, 2 are measured as `XX`, `YY`, `ZZ` in
/// that order.
pub fn honeycomb(l: usize) -> Result<Schedule> {
    if l < 3 || !l.is_multiple_of(3) {
        return Err(Error::InvalidParameter(format!(
            "honeycomb torus size must be a positive multiple of 3, got {l}"
        )));
    }
    let n = 2 * l * l;
    let tri = |v: usize| -> [(usize, usize); 3] {
        let (cell, down) = (v / 2, v % 2 == 1);
        let (i, j) = (cell / l, cell % l);
        let (i1, j1) = ((i + 1) % l, (j + 1) % l);
        if down {
            [(i, j), (i, j1), (i1, j1)]
        } else {
            [(i, j), (i1, j), (i1, j1)]
        }
    };
    let color = |p: (usize, usize)| (p.0 + p.1) % 3;
    let mut edges: [Vec<(usize, usize)>; 3] = Default::default();
    for a in 0..n {
        let ta = tri(a);
        for b in a + 1..n {
            let tb = tri(b);
            let shared = ta.iter().filter(|p| tb.contains(p)).count();
            if shared == 2 {
                let third = ta.iter().find(|p| !tb.contains(p)).unwrap();
                edges[color(*third)].push((a, b));
            }
        }
    }
    let kinds = [Pauli1::X, Pauli1::Y, Pauli1::Z];
    let cycle = (0..3).map(|c| pairs(n, &edges[c], kinds[c])).collect();
    Schedule::periodic(n, cycle)
}

/// Planar honeycomb patch with corners, cycling `XX`, `ZZ`, `YY`.
///
/// Plaquettes are the points `(i, j)` of the triangular lattice satisfying
/// `2i - j - 1`, `i + j - 1`, `2j - i`, `1 - 2i + j`, `1 - i - j`, `i - 2j`
/// all at most `h = 3 (d - 5) / 2 + 5`: a hexagon with three long and three
/// short sides. Qubits are the lattice triangles inside the region and
/// plaquette `(i, j)` has color `(i + j) mod 3`; colors 0, 1, 2 are measured
/// as `X`, `Z`, `Y`.
///
/// Walking around the boundary, every boundary plaquette either stays open
/// or is closed by an extra two-qubit check joining the ends of its broken
/// hexagon. The midpoint of each short side stays open and the two boundary
/// qubits next to it become corners, measured alone in their own color. The
/// other boundary plaquettes alternate closed and open, so each round has
/// two corner measurements.
///
/// Labels `1..=5` mark the path `X1X2`, `Z2Z3`, `X3X4`, `Z4Z5`, corner `X5`;
/// the rest are numbered `6..` in lattice order. `d = 5` gives 40 qubits.
pub fn vuillot(d: usize) -> Result<Schedule> {
    if d < 5 || d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "planar honeycomb needs odd d >= 5, got {d}"
        )));
    }
    let h = 3 * (d as i64 - 5) / 2 + 5;
    let inside = |(i, j): (i64, i64)| {
        [2 * i - j - 1, i + j - 1, 2 * j - i, 1 - 2 * i + j, 1 - i - j, i - 2 * j]
            .iter()
            .all(|&v| v <= h)
    };
    let span = h + 2;
    let mut points = Vec::new();
    for i in -span..=span {
        for j in -span..=span {
            if inside((i, j)) {
                points.push((i, j));
            }
        }
    }
    let color = |p: (i64, i64)| (p.0 + p.1).rem_euclid(3) as usize;
    let mut tris: Vec<[(i64, i64); 3]> = Vec::new();
    for &(i, j) in &points {
        for t in [
            [(i, j), (i + 1, j), (i + 1, j + 1)],
            [(i, j), (i, j + 1), (i + 1, j + 1)],
        ] {
            if t.iter().all(|&p| inside(p)) {
                tris.push(t);
            }
        }
    }
    let n = tris.len();
    let mut edges: [Vec<(usize, usize)>; 3] = Default::default();
    for a in 0..n {
        for b in a + 1..n {
            let shared = tris[a].iter().filter(|p| tris[b].contains(p)).count();
            if shared == 2 {
                let third = tris[a].iter().find(|p| !tris[b].contains(p)).unwrap();
                edges[color(*third)].push((a, b));
            }
        }
    }
    const NB: [(i64, i64); 6] = [(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)];
    let neighbors = |p: (i64, i64)| NB.iter().filter(|d| inside((p.0 + d.0, p.1 + d.1))).count();
    let cart = |p: (i64, i64)| (p.0 as f64 - 0.5 * p.1 as f64, p.1 as f64 * 3f64.sqrt() / 2.0);
    let (cx, cy) = points
        .iter()
        .fold((0.0, 0.0), |acc, &p| (acc.0 + cart(p).0, acc.1 + cart(p).1));
    let (cx, cy) = (cx / points.len() as f64, cy / points.len() as f64);
    let mut ring: Vec<(i64, i64)> = points.iter().copied().filter(|&p| neighbors(p) < 6).collect();
    let angle = |p: (i64, i64)| (cart(p).1 - cy).atan2(cart(p).0 - cx);
    ring.sort_by(|a, b| angle(*a).total_cmp(&angle(*b)));
    let m = ring.len();
    let tri_on = |p, q| tris.iter().position(|t| t.contains(&p) && t.contains(&q)).unwrap();
    let third_color = |p, q| 3 - color(p) - color(q);
    let mids: Vec<usize> = (0..m).filter(|&k| neighbors(ring[k]) == 4).collect();
    let mut singles: [Vec<usize>; 3] = Default::default();
    for &k in &mids {
        for e in [(k + m - 1) % m, k] {
            let (p, q) = (ring[e], ring[(e + 1) % m]);
            singles[third_color(p, q)].push(tri_on(p, q));
        }
        let next = mids.iter().copied().find(|&x| x > k).unwrap_or(mids[0] + m);
        for x in (k + 2..next - 1).step_by(2) {
            let (prev, cur, nxt) = (ring[(x - 1) % m], ring[x % m], ring[(x + 1) % m]);
            edges[third_color(prev, cur)].push((tri_on(prev, cur), tri_on(cur, nxt)));
        }
    }
    let partner = |c: usize, q: usize| {
        edges[c].iter().find_map(|&(a, b)| match () {
            _ if a == q => Some(b),
            _ if b == q => Some(a),
            _ => None,
        })
    };
    let path = singles[0]
        .iter()
        .find_map(|&q5| {
            let q4 = partner(1, q5)?;
            let q3 = partner(0, q4)?;
            let q2 = partner(1, q3)?;
            let q1 = partner(0, q2)?;
            Some([q1, q2, q3, q4, q5])
        })
        .ok_or_else(|| Error::Invariant("no corner path in planar honeycomb patch".into()))?;
    let mut order: Vec<usize> = path.to_vec();
    order.extend((0..n).filter(|q| !path.contains(q)));
    let mut labels = vec![0; n];
    for (l, &q) in order.iter().enumerate() {
        labels[q] = l + 1;
    }
    let kinds = [Pauli1::X, Pauli1::Z, Pauli1::Y];
    let cycle = (0..3)
        .map(|c| {
            let mut r = pairs(n, &edges[c], kinds[c]).measurements().to_vec();
            r.extend(singles[c].iter().map(|&q| Pauli::single(n, q, kinds[c])));
            Round::new(r)
        })
        .collect();
    Schedule::with_labels(n, labels, Vec::new(), cycle)
}

/// Floquet Bacon-Shor code on a `d x d` grid, `d = 2c + 1`.
///
/// Vertex `(x, y)` with `x, y` in `-c..=c` is qubit `(y + c) d + (x + c)`.
/// Rounds 1 and 3 measure `XX` on horizontal edges and rounds 2 and 4 `ZZ`
/// on vertical edges. The x-axis row is measured whole in both `X` rounds;
/// every other row omits the edge `(0, y)-(1, y)` in round 1 and
/// `(-1, y)-(0, y)` in round 3. The `Z` rounds are the transpose: the y-axis
/// column is whole, other columns omit `(x, 0)-(x, 1)` in round 2 and
/// `(x, -1)-(x, 0)` in round 4.
pub fn floquet_bacon_shor(d: usize) -> Result<Schedule> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "Bacon-Shor grid needs odd d >= 3, got {d}"
        )));
    }
    let n = d * d;
    let c = (d / 2) as i64;
    let q = |x: i64, y: i64| ((y + c) * d as i64 + x + c) as usize;
    let round = |gap: i64, p: Pauli1| {
        let mut list = Vec::new();
        for line in -c..=c {
            for s in -c..c {
                if line == 0 || s != gap {
                    list.push(match p {
                        Pauli1::X => (q(s, line), q(s + 1, line)),
                        _ => (q(line, s), q(line, s + 1)),
                    });
                }
            }
        }
        pairs(n, &list, p)
    };
    Schedule::periodic(
        n,
        vec![
            round(0, Pauli1::X),
            round(0, Pauli1::Z),
            round(-1, Pauli1::X),
            round(-1, Pauli1::Z),
        ],
    )
}

/// Two-row `Z` and two-column `X` stabilizers of the Bacon-Shor code on the same grid.
pub fn bacon_shor_stabilizers(d: usize) -> Vec<Pauli> {
    let n = d * d;
    let mut out = Vec::new();
    for a in 0..d.saturating_sub(1) {
        let rows: Vec<usize> = (0..d).flat_map(|x| [a * d + x, (a + 1) * d + x]).collect();
        out.push(Pauli::uniform(n, &rows, Pauli1::Z));
        let cols: Vec<usize> = (0..d).flat_map(|y| [y * d + a, y * d + a + 1]).collect();
        out.push(Pauli::uniform(n, &cols, Pauli1::X));
    }
    out
}

/// Period-4 code on `n` qubits (labels `1..=n`) whose initialization time is `2n`.
///
/// Cycle: `Z_j Z_{j+1}` for odd `j`; `X_j` for even `j`; `Z_j Z_{j+1}` for even
/// `j <= n-2`; `X_j` for odd `j`.
pub fn worstcase_init(n: usize) -> Result<Schedule> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "worst-case code needs even n >= 4, got {n}"
        )));
    }
    let odd_pairs: Vec<_> = (1..n).step_by(2).map(|j| (j - 1, j)).collect();
    let even_pairs: Vec<_> = (2..n - 1).step_by(2).map(|j| (j - 1, j)).collect();
    let even_sites: Vec<_> = (2..=n).step_by(2).map(|j| j - 1).collect();
    let odd_sites: Vec<_> = (1..n).step_by(2).map(|j| j - 1).collect();
    Schedule::with_labels(
        n,
        (1..=n).collect(),
        Vec::new(),
        vec![
            pairs(n, &odd_pairs, Pauli1::Z),
            singles(n, &even_sites, Pauli1::X),
            pairs(n, &even_pairs, Pauli1::Z),
            singles(n, &odd_sites, Pauli1::X),
        ],
    )
}

/// Period-1 schedule measuring every generator each round.
pub fn promote_static_code(generators: Vec<Pauli>) -> Result<Schedule> {
    let Some(first) = generators.first() else {
        return Err(Error::InvalidParameter("no stabilizer generators given".into()));
    };
    let n = first.num_qubits();
    Schedule::periodic(
        n,
        vec![Round::new(generators.into_iter().map(|g| g.sign_free()).collect())],
    )
}

/// `Z_i Z_{i+1}` checks of the bit-flip repetition code.
pub fn repetition_generators(n: usize) -> Vec<Pauli> {
    (0..n.saturating_sub(1))
        .map(|i| Pauli::uniform(n, &[i, i + 1], Pauli1::Z))
        .collect()
}

/// Cyclic `XZZXI` generators of the five-qubit code.
pub fn five_qubit_generators() -> Vec<Pauli> {
    let base = [Pauli1::X, Pauli1::Z, Pauli1::Z, Pauli1::X, Pauli1::I];
    (0..4)
        .map(|s| Pauli::from_factors(5, (0..5).map(|q| ((q + s) % 5, base[q]))))
        .collect()
}

/// Size parameters accepted by [`build`]; unset fields take each entry's default.
#[derive(Clone, Copy, Debug, Default)]
pub struct Params {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub l: Option<usize>,
}

/// Library entries as `(name, parameters, description)`.
pub const ENTRIES: &[(&str, &str, &str)] = &[
    ("ladder", "--m (default 3)", "ladder code on 4m qubits, period 4"),
    (
        "honeycomb",
        "--l (default 3)",
        "honeycomb code on an l x l torus, period 3",
    ),
    (
        "vuillot",
        "--d (default 5)",
        "planar honeycomb patch with corners, period 3",
    ),
    ("vuillot-min", "", "smallest planar honeycomb patch (40 qubits)"),
    (
        "fbs",
        "--d (default 3)",
        "Floquet Bacon-Shor code on a d x d grid, period 4",
    ),
    (
        "worstcase-init",
        "--n (default 4)",
        "period-4 code with initialization time 2n",
    ),
    ("static-rep", "--n (default 3)", "repetition code measured every round"),
    ("static-513", "", "five-qubit code measured every round"),
];

/// Builds the library schedule called `name`.
pub fn build(name: &str, p: Params) -> Result<Schedule> {
    match name {
        "ladder" => ladder(p.m.unwrap_or(3)),
        "honeycomb" => honeycomb(p.l.unwrap_or(3)),
        "vuillot" => vuillot(p.d.unwrap_or(5)),
        "vuillot-min" => vuillot(5),
        "fbs" => floquet_bacon_shor(p.d.unwrap_or(3)),
        "worstcase-init" => worstcase_init(p.n.unwrap_or(4)),
        "static-rep" => {
            let n = p.n.unwrap_or(3);
            if n < 2 {
                return Err(Error::InvalidParameter(format!(
                    "repetition code needs n >= 2, got {n}"
                )));
            }
            promote_static_code(repetition_generators(n))
        }
        "static-513" => promote_static_code(five_qubit_generators()),
        _ => Err(Error::InvalidParameter(format!("unknown library code '{name}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_small_sizes_validate() {
        for m in 2..6 {
            let s = ladder(m).unwrap();
            assert_eq!(s.num_qubits(), 4 * m);
            assert_eq!(s.period(), 4);
        }
        assert!(ladder(1).is_err());
    }

    #[test]
    fn ladder_labels_follow_figure() {
        let s = ladder(3).unwrap();
        let fmt: Vec<String> = s.measurements_at(2).iter().map(|m| s.format_pauli(m)).collect();
        assert!(fmt.contains(&"X1 X3".to_string()));
        assert!(fmt.contains(&"X2 X4".to_string()));
        let fmt: Vec<String> = s.measurements_at(4).iter().map(|m| s.format_pauli(m)).collect();
        assert!(fmt.contains(&"Y3 Y5".to_string()));
        assert!(fmt.contains(&"Y11 Y1".to_string()) || fmt.contains(&"Y1 Y11".to_string()));
    }

    #[test]
    fn honeycomb_edges_partition_qubits() {
        let s = honeycomb(3).unwrap();
        assert_eq!(s.num_qubits(), 18);
        for t in 1..=3 {
            let mut seen = [0; 18];
            for m in s.measurements_at(t) {
                assert_eq!(m.weight(), 2);
                for q in m.support() {
                    seen[q] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1));
        }
        assert!(honeycomb(4).is_err());
    }

    #[test]
    fn worstcase_rounds() {
        let s = worstcase_init(6).unwrap();
        assert_eq!(s.measurements_at(1).len(), 3);
        assert_eq!(s.measurements_at(2).len(), 3);
        assert_eq!(s.measurements_at(3).len(), 2);
        assert!(worstcase_init(5).is_err());
    }

    #[test]
    fn static_promotion() {
        let s = promote_static_code(five_qubit_generators()).unwrap();
        assert_eq!(s.period(), 1);
        assert_eq!(s.measurements_at(7).len(), 4);
        assert!(promote_static_code(Vec::new()).is_err());
        let bad = vec![Pauli::single(1, 0, Pauli1::X), Pauli::single(1, 0, Pauli1::Z)];
        assert!(promote_static_code(bad).is_err());
    }
}
