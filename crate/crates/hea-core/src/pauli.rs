//! Pauli-string observables: text parsing, supports, the cluster
//! decomposition of a support, the trivial value and the eta deviation
//! measure.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)] // float math in no_std graphs; std builds shadow it with inherent methods
use num_traits::Float;

use crate::linalg::{CMatrix, C_I, C_ONE, C_ZERO};
use crate::qstate::QubitSet;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub fn matrix(self) -> CMatrix {
        let e = match self {
            PauliLetter::I => [C_ONE, C_ZERO, C_ZERO, C_ONE],
            PauliLetter::X => [C_ZERO, C_ONE, C_ONE, C_ZERO],
            PauliLetter::Y => [C_ZERO, -C_I, C_I, C_ZERO],
            PauliLetter::Z => [C_ONE, C_ZERO, C_ZERO, -C_ONE],
        };
        CMatrix::from_row_major(2, 2, &e)
    }

    fn symbol(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// A length-n word over {I, X, Y, Z}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PauliString {
    letters: Vec<PauliLetter>,
}

impl PauliString {
    pub fn new(letters: Vec<PauliLetter>) -> Self {
        PauliString { letters }
    }

    pub fn identity(num_qubits: usize) -> Self {
        PauliString { letters: vec![PauliLetter::I; num_qubits] }
    }

    pub fn single_site(num_qubits: usize, qubit: usize, letter: PauliLetter) -> Result<Self> {
        if qubit >= num_qubits {
            return Err(Error::QubitOutOfRange { index: qubit, num_qubits });
        }
        let mut s = Self::identity(num_qubits);
        s.letters[qubit] = letter;
        Ok(s)
    }

    /// The same letter on every qubit of `set` (e.g. the all-Z symmetry P_A).
    pub fn uniform_on(num_qubits: usize, set: &QubitSet, letter: PauliLetter) -> Result<Self> {
        set.validate_for(num_qubits)?;
        let mut s = Self::identity(num_qubits);
        for &q in set.indices() {
            s.letters[q] = letter;
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    pub fn letter(&self, qubit: usize) -> PauliLetter {
        self.letters[qubit]
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&l| l == PauliLetter::I)
    }

    /// Indices of the non-identity letters, in increasing order.
    pub fn support(&self) -> QubitSet {
        let idx: Vec<usize> = self
            .letters
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != PauliLetter::I)
            .map(|(q, _)| q)
            .collect();
        QubitSet::new(idx).expect("enumerate yields sorted unique indices")
    }

    /// Bit masks controlling how the string acts on computational basis
    /// states: `flip` marks X/Y qubits, `sign` marks Y/Z qubits, and the
    /// overall prefactor is `i^(#Y)`.
    pub(crate) fn action_masks(&self) -> PauliAction {
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut y_count = 0u32;
        for (q, &l) in self.letters.iter().enumerate() {
            match l {
                PauliLetter::I => {}
                PauliLetter::X => flip |= 1 << q,
                PauliLetter::Y => {
                    flip |= 1 << q;
                    sign |= 1 << q;
                    y_count += 1;
                }
                PauliLetter::Z => sign |= 1 << q,
            }
        }
        let prefactor = match y_count % 4 {
            0 => C_ONE,
            1 => C_I,
            2 => -C_ONE,
            _ => -C_I,
        };
        PauliAction { flip, sign, prefactor }
    }
}

pub(crate) struct PauliAction {
    pub flip: usize,
    pub sign: usize,
    pub prefactor: Complex64,
}

impl PauliAction {
    #[inline]
    pub fn phase(&self, index: usize) -> Complex64 {
        if (index & self.sign).count_ones().is_multiple_of(2) {
            self.prefactor
        } else {
            -self.prefactor
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for (q, &l) in self.letters.iter().enumerate() {
            if l == PauliLetter::I {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            write!(f, "{}{}", l.symbol(), q)?;
            first = false;
        }
        Ok(())
    }
}

/// A real-weighted sum of Pauli strings. Duplicate strings are merged (and
/// dropped when they cancel) on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    num_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl Observable {
    pub fn new(num_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<PauliLetter>, f64> = BTreeMap::new();
        for (c, s) in terms {
            if s.num_qubits() != num_qubits {
                return Err(Error::DimensionMismatch {
                    expected: num_qubits,
                    got: s.num_qubits(),
                });
            }
            *merged.entry(s.letters).or_insert(0.0) += c;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(l, c)| (c, PauliString::new(l)))
            .collect();
        Ok(Observable { num_qubits, terms })
    }

    pub fn single(coefficient: f64, string: PauliString) -> Self {
        let num_qubits = string.num_qubits();
        Observable::new(num_qubits, vec![(coefficient, string)]).expect("consistent length")
    }

    /// O = sum_i Z_i.
    pub fn total_z(num_qubits: usize) -> Self {
        let terms = (0..num_qubits)
            .map(|q| {
                (1.0, PauliString::single_site(num_qubits, q, PauliLetter::Z).expect("q < n"))
            })
            .collect();
        Observable::new(num_qubits, terms).expect("consistent length")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the all-identity string (0 when absent).
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .find(|(_, s)| s.is_identity())
            .map(|(c, _)| *c)
            .unwrap_or(0.0)
    }

    pub fn is_traceless(&self) -> bool {
        self.identity_coefficient() == 0.0
    }

    /// Union of the supports of all terms.
    pub fn support(&self) -> QubitSet {
        let mut present = vec![false; self.num_qubits];
        for (_, s) in &self.terms {
            for &q in s.support().indices() {
                present[q] = true;
            }
        }
        let idx = present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(q, _)| q)
            .collect();
        QubitSet::new(idx).expect("sorted unique")
    }

    /// Dense matrix of the observable restricted to the union support
    /// (local bit 0 = lowest support qubit). An empty support yields the
    /// 1x1 matrix holding the identity coefficient.
    pub fn block_on_support(&self) -> (QubitSet, CMatrix) {
        let support = self.support();
        let side = 1usize << support.len();
        let mut block = CMatrix::zeros(side, side);
        for (c, s) in &self.terms {
            let mut factor = CMatrix::identity(1);
            for &q in support.indices().iter().rev() {
                factor = factor.kron(&s.letter(q).matrix());
            }
            for col in 0..side {
                for row in 0..side {
                    *block.at_mut(row, col) += Complex64::new(*c, 0.0) * factor.at(row, col);
                }
            }
        }
        (support, block)
    }

    /// Dense 2^n x 2^n matrix; intended for small-n oracles and fixtures.
    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.num_qubits > 12 {
            return Err(Error::BudgetExceeded("dense observable limited to 12 qubits"));
        }
        let dim = 1usize << self.num_qubits;
        let mut out = CMatrix::zeros(dim, dim);
        for (c, s) in &self.terms {
            let action = s.action_masks();
            for col in 0..dim {
                let row = col ^ action.flip;
                *out.at_mut(row, col) += Complex64::new(*c, 0.0) * action.phase(col);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, s)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if s.is_identity() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{s}")?;
            }
        }
        Ok(())
    }
}

/// Parse the observable grammar `term ("+" term)*` with
/// `term := float ("*" pauli)*` and `pauli := [XYZ][0-9]+`.
/// Whitespace is ignored; errors carry the byte offset in `text`.
pub fn parse_observable(text: &str, num_qubits: usize) -> Result<Observable> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut terms: Vec<(f64, PauliString)> = Vec::new();

    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(Error::Parse { position: pos, message: String::from("empty observable") });
    }
    loop {
        skip_ws(&mut pos);
        let (coeff, next) = parse_float(bytes, pos)?;
        pos = next;
        let mut letters = vec![PauliLetter::I; num_qubits];
        let mut touched = vec![false; num_qubits];
        loop {
            skip_ws(&mut pos);
            if pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1;
                skip_ws(&mut pos);
                let (letter, qubit, next) = parse_pauli_factor(bytes, pos)?;
                if qubit >= num_qubits {
                    return Err(Error::Parse {
                        position: pos,
                        message: format!("qubit index {qubit} out of range (n = {num_qubits})"),
                    });
                }
                if touched[qubit] {
                    return Err(Error::Parse {
                        position: pos,
                        message: format!("qubit {qubit} appears twice in one term"),
                    });
                }
                touched[qubit] = true;
                letters[qubit] = letter;
                pos = next;
            } else {
                break;
            }
        }
        terms.push((coeff, PauliString::new(letters)));
        skip_ws(&mut pos);
        if pos == bytes.len() {
            break;
        }
        if bytes[pos] != b'+' {
            return Err(Error::Parse {
                position: pos,
                message: format!("expected '+', found {:?}", bytes[pos] as char),
            });
        }
        pos += 1;
    }
    Observable::new(num_qubits, terms)
}

fn parse_float(bytes: &[u8], start: usize) -> Result<(f64, usize)> {
    let mut pos = start;
    if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
        pos += 1;
    }
    let digits_start = pos;
    while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
        pos += 1;
    }
    if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
        pos += 1;
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            pos += 1;
        }
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
    }
    if pos == digits_start {
        return Err(Error::Parse {
            position: start,
            message: String::from("expected a coefficient"),
        });
    }
    let text = core::str::from_utf8(&bytes[start..pos]).expect("ascii slice");
    match text.parse::<f64>() {
        Ok(v) => Ok((v, pos)),
        Err(_) => Err(Error::Parse {
            position: start,
            message: format!("invalid coefficient {text:?}"),
        }),
    }
}

fn parse_pauli_factor(bytes: &[u8], start: usize) -> Result<(PauliLetter, usize, usize)> {
    if start >= bytes.len() {
        return Err(Error::Parse {
            position: start,
            message: String::from("expected a Pauli factor"),
        });
    }
    let letter = match bytes[start] {
        b'X' | b'x' => PauliLetter::X,
        b'Y' | b'y' => PauliLetter::Y,
        b'Z' | b'z' => PauliLetter::Z,
        other => {
            return Err(Error::Parse {
                position: start,
                message: format!("expected X, Y or Z, found {:?}", other as char),
            })
        }
    };
    let mut pos = start + 1;
    let digits_start = pos;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos == digits_start {
        return Err(Error::Parse {
            position: pos,
            message: String::from("expected a qubit index"),
        });
    }
    let text = core::str::from_utf8(&bytes[digits_start..pos]).expect("ascii slice");
    let qubit: usize = text.parse().map_err(|_| Error::Parse {
        position: digits_start,
        message: format!("invalid qubit index {text:?}"),
    })?;
    Ok((letter, qubit, pos))
}

/// Whether a gap exactly equal to the threshold keeps two qubits in the same
/// cluster. `Inclusive` matches the recursion `l <= 2D`; `Strict` matches the
/// prose `l < 2D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapRule {
    Inclusive,
    Strict,
}

/// Disjoint clusters of a support, split wherever the gap between consecutive
/// qubits exceeds the threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterSet {
    clusters: Vec<QubitSet>,
    threshold: usize,
}

impl ClusterSet {
    pub fn clusters(&self) -> &[QubitSet] {
        &self.clusters
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

pub fn clusterize(support: &QubitSet, threshold: usize) -> ClusterSet {
    clusterize_with(support, threshold, GapRule::Inclusive)
}

pub fn clusterize_with(support: &QubitSet, threshold: usize, rule: GapRule) -> ClusterSet {
    let mut clusters: Vec<QubitSet> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for &q in support.indices() {
        match current.last() {
            None => current.push(q),
            Some(&prev) => {
                let gap = q - prev;
                let joins = match rule {
                    GapRule::Inclusive => gap <= threshold,
                    GapRule::Strict => gap < threshold,
                };
                if joins {
                    current.push(q);
                } else {
                    clusters.push(QubitSet::new(core::mem::take(&mut current)).expect("sorted"));
                    current.push(q);
                }
            }
        }
    }
    if !current.is_empty() {
        clusters.push(QubitSet::new(current).expect("sorted"));
    }
    ClusterSet { clusters, threshold }
}

/// f_trv = Tr[O] / 2^n: only the all-identity term survives the trace.
pub fn trivial_value(obs: &Observable) -> f64 {
    obs.identity_coefficient()
}

/// Sum of absolute coefficients.
pub fn coefficient_l1(obs: &Observable) -> f64 {
    obs.terms().iter().map(|(c, _)| c.abs()).sum()
}

const ETA_HERMITIAN_TOL: f64 = 1e-8;

/// Squared Hilbert-Schmidt deviation of `m` from its trace-matched multiple
/// of the identity: Tr[(M - Tr[M] I / d)^2] = Tr[M^2] - Tr[M]^2/d.
/// The squared convention makes eta(P) = d for a traceless Pauli on d
/// dimensions (4 for a two-qubit Pauli).
pub fn eta(m: &CMatrix) -> Result<f64> {
    let dev = m.hermitian_deviation();
    if dev > ETA_HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let d = m.rows() as f64;
    let tr = m.trace().re;
    Ok(m.frobenius_sq() - tr * tr / d)
}

/// Non-squared companion of [`eta`]: the Hilbert-Schmidt norm itself.
pub fn hs_deviation(m: &CMatrix) -> Result<f64> {
    Ok(eta(m)?.max(0.0).sqrt())
}
