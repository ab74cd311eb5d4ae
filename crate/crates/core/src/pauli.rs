//! n-qubit Pauli operators in binary symplectic form.
//!
//! A [`Pauli`] keeps its X part in the first `w` words of a packed vector and
//! its Z part in the next `w` words, where `w = ceil(n / 64)`. The packed
//! vector is exactly the row that goes into stabilizer matrices, so ISG and
//! spacetime code never convert between layouts.

use std::fmt;

use crate::error::{Error, Result};
use crate::f2::{words_for, BitVec, F2Matrix};

/// Overall ±1 annotation. Group-level analysis ignores it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn flip_if(self, cond: bool) -> Sign {
        match (self, cond) {
            (s, false) => s,
            (Sign::Plus, true) => Sign::Minus,
            (Sign::Minus, true) => Sign::Plus,
        }
    }
}

/// Single-qubit factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    pub const NON_IDENTITY: [Pauli1; 3] = [Pauli1::X, Pauli1::Y, Pauli1::Z];

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::I => (false, false),
            Pauli1::X => (true, false),
            Pauli1::Y => (true, true),
            Pauli1::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli1::I => 'I',
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli operator, sign-free unless `sign` is set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pauli {
    n: usize,
    bits: BitVec,
    sign: Option<Sign>,
}

impl Pauli {
    /// Width in bits of the packed symplectic vector for `n` qubits.
    pub fn symplectic_len(n: usize) -> usize {
        2 * 64 * words_for(n)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            bits: BitVec::zeros(Self::symplectic_len(n)),
            sign: None,
        }
    }

    pub fn single(n: usize, qubit: usize, p: Pauli1) -> Self {
        let mut out = Self::identity(n);
        out.set(qubit, p);
        out
    }

    /// Build from `(qubit, factor)` pairs; repeated qubits multiply (sign-free).
    pub fn from_factors(n: usize, factors: impl IntoIterator<Item = (usize, Pauli1)>) -> Self {
        let mut out = Self::identity(n);
        for (q, p) in factors {
            assert!(q < n, "qubit {q} out of range for n={n}");
            let (x, z) = p.bits();
            if x {
                out.bits.flip(q);
            }
            if z {
                out.bits.flip(out.z_offset() + q);
            }
        }
        out
    }

    /// Same operator on every listed qubit, e.g. `uniform(n, &[0, 1], X)` is `X0 X1`.
    pub fn uniform(n: usize, qubits: &[usize], p: Pauli1) -> Self {
        Self::from_factors(n, qubits.iter().map(|&q| (q, p)))
    }

    pub fn from_symplectic(n: usize, bits: BitVec) -> Self {
        assert_eq!(bits.len(), Self::symplectic_len(n));
        Self { n, bits, sign: None }
    }

    #[inline]
    fn z_offset(&self) -> usize {
        64 * words_for(self.n)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn symplectic(&self) -> &BitVec {
        &self.bits
    }

    pub fn into_symplectic(self) -> BitVec {
        self.bits
    }

    pub fn sign(&self) -> Option<Sign> {
        self.sign
    }

    pub fn with_sign(mut self, sign: Option<Sign>) -> Self {
        self.sign = sign;
        self
    }

    pub fn sign_free(&self) -> Self {
        self.clone().with_sign(None)
    }

    pub fn get(&self, q: usize) -> Pauli1 {
        Pauli1::from_bits(self.bits.get(q), self.bits.get(self.z_offset() + q))
    }

    pub fn set(&mut self, q: usize, p: Pauli1) {
        let (x, z) = p.bits();
        let off = self.z_offset();
        self.bits.set(q, x);
        self.bits.set(off + q, z);
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.bits.get(q)
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.bits.get(self.z_offset() + q)
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.bits.is_zero()
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        let w = words_for(self.n);
        let words = self.bits.words();
        (0..w).map(|i| (words[i] | words[w + i]).count_ones() as usize).sum()
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli1::I).collect()
    }

    pub fn factors(&self) -> impl Iterator<Item = (usize, Pauli1)> + '_ {
        (0..self.n).filter_map(|q| {
            let p = self.get(q);
            (p != Pauli1::I).then_some((q, p))
        })
    }

    pub fn is_x_type(&self) -> bool {
        (0..self.n).all(|q| !self.z_bit(q))
    }

    pub fn is_z_type(&self) -> bool {
        (0..self.n).all(|q| !self.x_bit(q))
    }

    /// X part only (every Y becomes X, every Z dropped).
    pub fn x_part(&self) -> Pauli {
        Pauli::from_factors(self.n, (0..self.n).filter(|&q| self.x_bit(q)).map(|q| (q, Pauli1::X)))
    }

    /// Z part only.
    pub fn z_part(&self) -> Pauli {
        Pauli::from_factors(self.n, (0..self.n).filter(|&q| self.z_bit(q)).map(|q| (q, Pauli1::Z)))
    }

    fn check_size(&self, other: &Pauli) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Symplectic form: `true` when the operators anticommute.
    #[inline]
    pub fn anticommutes_unchecked(&self, other: &Pauli) -> bool {
        symplectic_form(&self.bits, &other.bits)
    }

    pub fn commutes(&self, other: &Pauli) -> Result<bool> {
        self.check_size(other)?;
        Ok(!self.anticommutes_unchecked(other))
    }

    /// Product; the sign is kept only when both inputs are signed and commute.
    pub fn multiply(&self, other: &Pauli) -> Result<Pauli> {
        self.check_size(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Pauli) -> Pauli {
        let sign = match (self.sign, other.sign) {
            (Some(a), Some(b)) => {
                let exp = self.phase_exponent(other);
                if exp % 2 != 0 {
                    None
                } else {
                    let neg = (a == Sign::Minus) ^ (b == Sign::Minus) ^ (exp == 2);
                    Some(Sign::Plus.flip_if(neg))
                }
            }
            _ => None,
        };
        Pauli {
            n: self.n,
            bits: self.bits.xor(&other.bits),
            sign,
        }
    }

    /// In-place sign-free product.
    #[inline]
    pub fn mul_assign(&mut self, other: &Pauli) {
        debug_assert_eq!(self.n, other.n);
        self.bits.xor_assign(&other.bits);
        self.sign = None;
    }

    /// Exponent `e` (mod 4) with `P Q = i^e R` for Hermitian `P`, `Q`, `R`.
    fn phase_exponent(&self, other: &Pauli) -> i32 {
        let mut e = 0i32;
        for q in 0..self.n {
            let (x1, z1) = (self.x_bit(q) as i32, self.z_bit(q) as i32);
            let (x2, z2) = (other.x_bit(q) as i32, other.z_bit(q) as i32);
            e += match (x1, z1) {
                (0, 0) => 0,
                (1, 1) => z2 - x2,
                (1, 0) => z2 * (2 * x2 - 1),
                _ => x2 * (1 - 2 * z2),
            };
        }
        e.rem_euclid(4)
    }

    /// Render with the given qubit labels, e.g. `X1 Y4`. Identity renders as `I`.
    pub fn to_label_string(&self, labels: &[usize]) -> String {
        let mut factors: Vec<(usize, Pauli1)> = self.factors().map(|(q, p)| (labels[q], p)).collect();
        factors.sort_unstable_by_key(|f| f.0);
        let mut parts: Vec<String> = factors.iter().map(|(l, p)| format!("{}{l}", p.symbol())).collect();
        if parts.is_empty() {
            parts.push("I".to_string());
        }
        let body = parts.join(" ");
        match self.sign {
            Some(Sign::Minus) => format!("-{body}"),
            _ => body,
        }
    }

    /// Parse the `X0 Y3` text form with a label lookup.
    pub fn parse_with(
        n: usize,
        text: &str,
        lookup: impl Fn(usize) -> Option<usize>,
    ) -> std::result::Result<Pauli, String> {
        let mut text = text.trim();
        let mut sign = None;
        if let Some(rest) = text.strip_prefix('-') {
            sign = Some(Sign::Minus);
            text = rest.trim_start();
        } else if let Some(rest) = text.strip_prefix('+') {
            sign = Some(Sign::Plus);
            text = rest.trim_start();
        }
        let mut out = Pauli::identity(n);
        for tok in text.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let p = match chars.next() {
                Some('X') => Pauli1::X,
                Some('Y') => Pauli1::Y,
                Some('Z') => Pauli1::Z,
                Some('I') => Pauli1::I,
                _ => return Err(format!("bad Pauli factor `{tok}`")),
            };
            let digits = chars.as_str();
            let label: usize = digits.parse().map_err(|_| format!("bad qubit index in `{tok}`"))?;
            let q = lookup(label).ok_or_else(|| format!("unknown qubit {label} in `{tok}`"))?;
            if out.get(q) != Pauli1::I {
                return Err(format!("qubit {label} repeated in `{text}`"));
            }
            out.set(q, p);
        }
        Ok(out.with_sign(sign))
    }

    /// Parse with labels `0..n`.
    pub fn parse(n: usize, text: &str) -> Result<Pauli> {
        Self::parse_with(n, text, |l| (l < n).then_some(l)).map_err(|msg| Error::Parse { line: 0, msg })
    }
}

/// Basis of the Paulis commuting with every operator in `ops` (sign-free).
pub fn centralizer_basis(n: usize, ops: &[Pauli]) -> Vec<Pauli> {
    // row for op o is (o_z | o_x) so that row . (v_x | v_z) is the symplectic form
    let rows = ops
        .iter()
        .map(|o| {
            let mut r = BitVec::zeros(2 * n);
            for q in 0..n {
                r.set(q, o.z_bit(q));
                r.set(n + q, o.x_bit(q));
            }
            r
        })
        .collect();
    F2Matrix::from_rows(2 * n, rows)
        .kernel()
        .into_iter()
        .map(|v| Pauli::from_factors(n, (0..n).map(|q| (q, Pauli1::from_bits(v.get(q), v.get(n + q))))))
        .collect()
}

/// Anticommutation indicator of two packed symplectic vectors of equal layout.
#[inline]
pub(crate) fn symplectic_form(a: &BitVec, b: &BitVec) -> bool {
    let aw = a.words();
    let bw = b.words();
    let w = aw.len() / 2;
    let mut acc = 0u64;
    for i in 0..w {
        acc ^= (aw[i] & bw[w + i]) ^ (aw[w + i] & bw[i]);
    }
    acc.count_ones() & 1 == 1
}

impl fmt::Debug for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<usize> = (0..self.n).collect();
        write!(f, "Pauli({})", self.to_label_string(&labels))
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<usize> = (0..self.n).collect();
        f.write_str(&self.to_label_string(&labels))
    }
}
