//! Power-sum neighborhood codec.
//!
//! A neighborhood `N` of a vertex with identifier `id` in a graph of `n`
//! vertices is summarized as `(id, |N|, b_1..b_k)` with
//! `b_p = sum_{w in N} w^p`. Summaries of degree at most `k` determine the
//! neighbor set uniquely; decoding runs Newton's identities to obtain the
//! elementary symmetric values and then finds the integer roots of the
//! resulting monic polynomial. All arithmetic is exact: big integers
//! internally, fixed-width fields only on the wire.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::graph::VertexId;
use crate::sim::{id_field_width, BitReader, BitWriter, Message, ProtocolError};

/// Decoded message content: identifier, degree, and the first `k` power
/// sums of the neighbor identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSumSummary {
    pub id: VertexId,
    pub degree: usize,
    pub b: Vec<BigUint>,
}

impl PowerSumSummary {
    /// Cheap range invariants: `b_p <= degree * n^p`, `b_1 >= degree`,
    /// and a zero vector exactly when the degree is zero.
    pub fn check_ranges(&self, n: usize) -> bool {
        let n_big = BigUint::from(n);
        let mut pow = BigUint::one();
        for b_p in &self.b {
            pow *= &n_big;
            if *b_p > BigUint::from(self.degree) * &pow {
                return false;
            }
        }
        if self.degree == 0 && self.b.iter().any(|b_p| !b_p.is_zero()) {
            return false;
        }
        if let Some(b1) = self.b.first() {
            if *b1 < BigUint::from(self.degree) {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodecError {
    SelfLoop { id: VertexId },
    IdOutOfRange { id: u64, n: usize },
    NeighborOutOfRange { id: VertexId, n: usize },
    DegreeExceedsK { degree: usize, k: usize },
    ArityMismatch { expected: usize, got: usize },
    NonExactDivision { index: usize },
    MissingRoots { found: usize, degree: usize },
    RepeatedRoot { root: VertexId },
    NoSolution,
    PowerSumMismatch { p: usize },
    FieldOverflow { field: &'static str },
    LengthMismatch { expected: usize, got: usize },
    FieldRange { field: &'static str },
}

impl CodecError {
    /// Whether this is a decode failure (corrupted summary or violated
    /// precondition) as opposed to a usage error.
    pub fn is_decode_failure(&self) -> bool {
        matches!(
            self,
            CodecError::NonExactDivision { .. }
                | CodecError::MissingRoots { .. }
                | CodecError::RepeatedRoot { .. }
                | CodecError::NoSolution
                | CodecError::PowerSumMismatch { .. }
        )
    }
}

impl fmt::Display for CodecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodecError::SelfLoop { id } => write!(f, "vertex {id} lists itself as neighbor"),
            CodecError::IdOutOfRange { id, n } => write!(f, "id {id} out of range 1..={n}"),
            CodecError::NeighborOutOfRange { id, n } => {
                write!(f, "neighbor {id} out of range 1..={n}")
            }
            CodecError::DegreeExceedsK { degree, k } => {
                write!(f, "degree {degree} exceeds bound {k}")
            }
            CodecError::ArityMismatch { expected, got } => {
                write!(f, "expected {expected} power sums, got {got}")
            }
            CodecError::NonExactDivision { index } => {
                write!(f, "power sums are not integral at e_{index}")
            }
            CodecError::MissingRoots { found, degree } => {
                write!(f, "only {found} of {degree} integer roots in range")
            }
            CodecError::RepeatedRoot { root } => write!(f, "repeated root {root}"),
            CodecError::NoSolution => write!(f, "no subset matches the power sums"),
            CodecError::PowerSumMismatch { p } => {
                write!(f, "decoded set disagrees with power sum b_{p}")
            }
            CodecError::FieldOverflow { field } => write!(f, "field {field} exceeds its width"),
            CodecError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} wire bits, got {got}")
            }
            CodecError::FieldRange { field } => write!(f, "field {field} outside schema range"),
        }
    }
}

impl std::error::Error for CodecError {}

impl From<CodecError> for ProtocolError {
    fn from(e: CodecError) -> Self {
        ProtocolError(e.to_string())
    }
}

/// Exact wire size of a serialized summary:
/// `W(n,k) = (2 + k(k+1)) * ceil(log2(n+1))` bits.
pub fn wire_bits(n: usize, k: usize) -> usize {
    (2 + k * (k + 1)) * id_field_width(n)
}

/// Summarizes `neighborhood` as its first `k` power sums.
pub fn encode(
    id: VertexId,
    neighborhood: &BTreeSet<VertexId>,
    n: usize,
    k: usize,
) -> Result<PowerSumSummary, CodecError> {
    if id == 0 || id as usize > n {
        return Err(CodecError::IdOutOfRange { id: id as u64, n });
    }
    if neighborhood.contains(&id) {
        return Err(CodecError::SelfLoop { id });
    }
    let mut b = vec![BigUint::zero(); k];
    for &w in neighborhood {
        if w == 0 || w as usize > n {
            return Err(CodecError::NeighborOutOfRange { id: w, n });
        }
        let w_big = BigUint::from(w);
        let mut pow = BigUint::one();
        for b_p in b.iter_mut() {
            pow *= &w_big;
            *b_p += &pow;
        }
    }
    Ok(PowerSumSummary { id, degree: neighborhood.len(), b })
}

/// Newton's identities: power sums `p_1..p_d` to elementary symmetric
/// values `e_1..e_d`, via `i*e_i = sum_{j=1..i} (-1)^(j-1) e_{i-j} p_j`.
/// Every division by `i` must be exact; otherwise the input is not the
/// power-sum vector of any integer multiset.
pub fn power_sums_to_elementary(p: &[BigInt]) -> Result<Vec<BigInt>, CodecError> {
    let d = p.len();
    let mut e: Vec<BigInt> = Vec::with_capacity(d + 1);
    e.push(BigInt::one());
    for i in 1..=d {
        let mut acc = BigInt::zero();
        for j in 1..=i {
            let term = &e[i - j] * &p[j - 1];
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let (q, r) = acc.div_rem(&BigInt::from(i));
        if !r.is_zero() {
            return Err(CodecError::NonExactDivision { index: i });
        }
        e.push(q);
    }
    Ok(e.split_off(1))
}

const SCAN_MODULUS: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % SCAN_MODULUS as u128) as u64
}

fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= SCAN_MODULUS {
        s - SCAN_MODULUS
    } else {
        s
    }
}

fn to_residue(v: &BigInt) -> u64 {
    let r = v.mod_floor(&BigInt::from(SCAN_MODULUS));
    r.to_u64().unwrap()
}

/// Forward-difference table of a polynomial modulo the scan prime,
/// advancing one evaluation point per step with additions only.
struct DiffTable {
    delta: Vec<u64>,
}

impl DiffTable {
    /// Table for `coeffs` (leading first) starting at point `x0`.
    fn new(coeffs: &[BigInt], x0: u64) -> Self {
        let residues: Vec<u64> = coeffs.iter().map(to_residue).collect();
        let d = residues.len() - 1;
        let horner = |x: u64| {
            let xm = x % SCAN_MODULUS;
            residues.iter().fold(0u64, |acc, &c| addmod(mulmod(acc, xm), c))
        };
        let mut delta: Vec<u64> = (0..=d as u64).map(|j| horner(x0 + j)).collect();
        for level in 1..=d {
            for j in (level..=d).rev() {
                delta[j] = addmod(delta[j], SCAN_MODULUS - delta[j - 1]);
            }
        }
        DiffTable { delta }
    }

    fn value(&self) -> u64 {
        self.delta[0]
    }

    fn advance(&mut self) {
        for j in 0..self.delta.len() - 1 {
            self.delta[j] = addmod(self.delta[j], self.delta[j + 1]);
        }
    }
}

fn horner_exact(coeffs: &[BigInt], x: u64) -> BigInt {
    let x_big = BigInt::from(x);
    coeffs.iter().fold(BigInt::zero(), |acc, c| acc * &x_big + c)
}

/// Synthetic division of `coeffs` by `(x - r)`; remainder must be zero.
fn peel_root(coeffs: &[BigInt], r: u64) -> Vec<BigInt> {
    let r_big = BigInt::from(r);
    let mut q = Vec::with_capacity(coeffs.len() - 1);
    let mut carry = BigInt::zero();
    for c in &coeffs[..coeffs.len() - 1] {
        carry = carry * &r_big + c;
        q.push(carry.clone());
    }
    debug_assert!((carry * &r_big + coeffs.last().unwrap()).is_zero());
    q
}

/// Roots in `1..=n` of the monic polynomial
/// `x^d - e_1 x^(d-1) + e_2 x^(d-2) - ... (+-) e_d`.
///
/// Every candidate is screened by direct evaluation modulo a 61-bit prime
/// (forward differences, so one step costs `d` additions), confirmed with
/// exact big-integer evaluation, and divided out before the scan resumes.
/// Fails unless exactly `d` distinct roots lie in range.
pub fn integer_roots(e: &[BigInt], n: usize) -> Result<BTreeSet<VertexId>, CodecError> {
    let d = e.len();
    if d == 0 {
        return Ok(BTreeSet::new());
    }
    if d == 1 {
        // x - e_1
        let root = &e[0];
        if root.is_positive() && *root <= BigInt::from(n) {
            return Ok(BTreeSet::from([root.to_u32().unwrap()]));
        }
        return Err(CodecError::MissingRoots { found: 0, degree: 1 });
    }

    let mut coeffs: Vec<BigInt> = Vec::with_capacity(d + 1);
    coeffs.push(BigInt::one());
    for (i, e_i) in e.iter().enumerate() {
        coeffs.push(if i % 2 == 0 { -e_i.clone() } else { e_i.clone() });
    }

    let mut roots = BTreeSet::new();
    let mut table = DiffTable::new(&coeffs, 1);
    let mut x = 1u64;
    while x <= n as u64 && coeffs.len() > 1 {
        if table.value() == 0 && horner_exact(&coeffs, x).is_zero() {
            coeffs = peel_root(&coeffs, x);
            if coeffs.len() > 1 && horner_exact(&coeffs, x).is_zero() {
                return Err(CodecError::RepeatedRoot { root: x as VertexId });
            }
            roots.insert(x as VertexId);
            if coeffs.len() == 1 {
                break;
            }
            x += 1;
            if x <= n as u64 {
                table = DiffTable::new(&coeffs, x);
            }
        } else {
            table.advance();
            x += 1;
        }
    }
    if roots.len() != d {
        return Err(CodecError::MissingRoots { found: roots.len(), degree: d });
    }
    Ok(roots)
}

/// Recovers the unique neighbor set of a degree-`<= k` summary.
///
/// Only the first `degree` power sums drive the solve; the remaining
/// entries are recomputed from the result and must agree, which catches
/// corrupted summaries cheaply.
pub fn decode(summary: &PowerSumSummary, n: usize) -> Result<BTreeSet<VertexId>, CodecError> {
    let k = summary.b.len();
    if summary.degree > k {
        return Err(CodecError::DegreeExceedsK { degree: summary.degree, k });
    }
    let p: Vec<BigInt> = summary.b[..summary.degree].iter().map(|b| BigInt::from(b.clone())).collect();
    let e = power_sums_to_elementary(&p)?;
    let roots = integer_roots(&e, n)?;
    verify_power_sums(&roots, &summary.b)?;
    Ok(roots)
}

fn verify_power_sums(set: &BTreeSet<VertexId>, b: &[BigUint]) -> Result<(), CodecError> {
    let mut sums = vec![BigUint::zero(); b.len()];
    for &w in set {
        let w_big = BigUint::from(w);
        let mut pow = BigUint::one();
        for s in sums.iter_mut() {
            pow *= &w_big;
            *s += &pow;
        }
    }
    for (p, (got, want)) in sums.iter().zip(b).enumerate() {
        if got != want {
            return Err(CodecError::PowerSumMismatch { p: p + 1 });
        }
    }
    Ok(())
}

/// Exhaustive subset search for the set matching a summary — the decode
/// oracle. Candidates are explored largest-element-first; a branch is cut
/// only when the remaining power sums provably cannot be met, so the search
/// still visits every feasible subset. Results are identical to [`decode`],
/// but the search space makes this feasible only for small `n` (or very
/// small degrees); it exists as a test oracle, not a decoder.
pub fn decode_bruteforce(
    summary: &PowerSumSummary,
    n: usize,
) -> Result<BTreeSet<VertexId>, CodecError> {
    let k = summary.b.len();
    if summary.degree > k {
        return Err(CodecError::DegreeExceedsK { degree: summary.degree, k });
    }
    let mut chosen: Vec<VertexId> = Vec::with_capacity(summary.degree);
    let mut remaining: Vec<BigUint> = summary.b.clone();
    if search_subset(summary.degree, n as u64, &mut remaining, &mut chosen) {
        Ok(chosen.into_iter().collect())
    } else {
        Err(CodecError::NoSolution)
    }
}

/// Finds `left` distinct values in `1..=cap` whose power sums equal
/// `remaining`, writing them into `chosen`. Returns true on success.
fn search_subset(left: usize, cap: u64, remaining: &mut Vec<BigUint>, chosen: &mut Vec<VertexId>) -> bool {
    let k = remaining.len();
    if left == 0 {
        return remaining.iter().all(Zero::is_zero);
    }
    // The largest remaining element w satisfies, for every p:
    //   w^p <= b_p  and  b_p <= left * w^p,
    // plus the linear bounds from distinctness.
    let left_big = BigUint::from(left);
    let min_linear_sum = BigUint::from(left * (left + 1) / 2);
    if remaining[0] < min_linear_sum {
        return false;
    }
    let mut hi = cap.min(nth_root_u64(&remaining[k - 1], k as u32));
    let lin_hi = &remaining[0] - BigUint::from(left * (left - 1) / 2);
    hi = hi.min(lin_hi.to_u64().unwrap_or(u64::MAX));
    let lo_pow = nth_root_ceil_u64(&remaining[k - 1].div_ceil(&left_big), k as u32);
    let lo_lin = remaining[0].div_ceil(&left_big).to_u64().unwrap_or(u64::MAX);
    let lo = (left as u64).max(lo_pow).max(lo_lin);

    let mut w = hi;
    while w >= lo {
        let w_big = BigUint::from(w);
        let mut powers = Vec::with_capacity(k);
        let mut pow = BigUint::one();
        let mut feasible = true;
        for b_p in remaining.iter() {
            pow *= &w_big;
            if pow > *b_p {
                feasible = false;
                break;
            }
            powers.push(pow.clone());
        }
        if feasible {
            for (b_p, pw) in remaining.iter_mut().zip(&powers) {
                *b_p -= pw;
            }
            chosen.push(w as VertexId);
            if child_feasible(left - 1, w - 1, remaining)
                && search_subset(left - 1, w - 1, remaining, chosen)
            {
                return true;
            }
            chosen.pop();
            for (b_p, pw) in remaining.iter_mut().zip(&powers) {
                *b_p += pw;
            }
        }
        w -= 1;
    }
    false
}

/// Necessary condition for `left` distinct values `<= cap` to reach the
/// remaining sums: their largest element is at least the linear mean and
/// its k-th power must fit under b_k.
fn child_feasible(left: usize, cap: u64, remaining: &[BigUint]) -> bool {
    let k = remaining.len();
    if left == 0 {
        return remaining.iter().all(Zero::is_zero);
    }
    if cap < left as u64 {
        return false;
    }
    let mean = remaining[0].div_ceil(&BigUint::from(left));
    if mean > BigUint::from(cap) {
        return false;
    }
    mean.pow(k as u32) <= remaining[k - 1]
}

fn nth_root_u64(v: &BigUint, p: u32) -> u64 {
    v.nth_root(p).to_u64().unwrap_or(u64::MAX)
}

fn nth_root_ceil_u64(v: &BigUint, p: u32) -> u64 {
    let r = v.nth_root(p);
    let r64 = match r.to_u64() {
        Some(x) => x,
        None => return u64::MAX,
    };
    if r.pow(p) == *v {
        r64
    } else {
        r64 + 1
    }
}

/// Serializes a summary to its exact `W(n,k)`-bit wire form:
/// `id`, `degree`, then each `b_p`, big-endian, no padding. The ID and
/// degree take `ceil(log2(n+1))` bits; every power sum takes
/// `(k+1) * ceil(log2(n+1))` bits.
pub fn serialize(summary: &PowerSumSummary, n: usize, k: usize) -> Result<Message, CodecError> {
    if summary.b.len() != k {
        return Err(CodecError::ArityMismatch { expected: k, got: summary.b.len() });
    }
    if summary.id == 0 || summary.id as usize > n {
        return Err(CodecError::IdOutOfRange { id: summary.id as u64, n });
    }
    if summary.degree >= n {
        return Err(CodecError::FieldRange { field: "degree" });
    }
    let width = id_field_width(n);
    let entry_width = (k + 1) * width;
    let mut w = BitWriter::new();
    w.write_u64(summary.id as u64, width);
    w.write_u64(summary.degree as u64, width);
    for b_p in &summary.b {
        if b_p.bits() as usize > entry_width {
            return Err(CodecError::FieldOverflow { field: "b" });
        }
        w.write_big(b_p, entry_width);
    }
    let msg = w.finish();
    debug_assert_eq!(msg.len_bits(), wire_bits(n, k));
    Ok(msg)
}

/// Inverse of [`serialize`]; the message must be exactly `W(n,k)` bits.
pub fn deserialize(msg: &Message, n: usize, k: usize) -> Result<PowerSumSummary, CodecError> {
    let expected = wire_bits(n, k);
    if msg.len_bits() != expected {
        return Err(CodecError::LengthMismatch { expected, got: msg.len_bits() });
    }
    let mut r = BitReader::new(msg);
    read_summary(&mut r, n, k)
}

/// Reads one `W(n,k)`-bit summary from the current reader position;
/// used for messages that concatenate several summaries.
pub(crate) fn read_summary(
    r: &mut BitReader<'_>,
    n: usize,
    k: usize,
) -> Result<PowerSumSummary, CodecError> {
    let width = id_field_width(n);
    let entry_width = (k + 1) * width;
    let expected = wire_bits(n, k);
    if r.remaining() < expected {
        return Err(CodecError::LengthMismatch { expected, got: r.remaining() });
    }
    let id = r.read_u64(width).unwrap();
    if id == 0 || id > n as u64 {
        return Err(CodecError::IdOutOfRange { id, n });
    }
    let degree = r.read_u64(width).unwrap();
    if degree >= n as u64 {
        return Err(CodecError::FieldRange { field: "degree" });
    }
    let mut b = Vec::with_capacity(k);
    for _ in 0..k {
        b.push(r.read_big(entry_width).unwrap());
    }
    Ok(PowerSumSummary { id: id as VertexId, degree: degree as usize, b })
}
