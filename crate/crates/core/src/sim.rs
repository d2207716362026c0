//! One-round referee model: a protocol is a local function evaluated at
//! every node plus a global function evaluated once by the referee on the
//! collected message vector. The framework records transcripts and measures
//! message sizes; it never enforces frugality itself.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::graph::{LabelledGraph, VertexId};

/// A finite bit string, packed MSB-first. Content is opaque to the framework.
#[derive(Clone, PartialEq, Eq)]
pub struct Message {
    nbits: usize,
    data: Vec<u8>,
}

impl Message {
    pub fn empty() -> Self {
        Message { nbits: 0, data: Vec::new() }
    }

    pub fn len_bits(&self) -> usize {
        self.nbits
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.nbits);
        self.data[i / 8] >> (7 - i % 8) & 1 == 1
    }

    /// Lowercase hex of the packed bytes; `-` for the empty message.
    pub fn to_hex(&self) -> String {
        if self.data.is_empty() {
            return "-".into();
        }
        self.data.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Rebuilds a message from its hex dump and exact bit length.
    /// Pad bits past `nbits` must be zero.
    pub fn from_hex(hex: &str, nbits: usize) -> Option<Message> {
        if nbits == 0 {
            return (hex == "-").then(Message::empty);
        }
        if hex.len() % 2 != 0 || hex.len() / 2 != nbits.div_ceil(8) {
            return None;
        }
        let mut data = Vec::with_capacity(hex.len() / 2);
        for i in (0..hex.len()).step_by(2) {
            data.push(u8::from_str_radix(&hex[i..i + 2], 16).ok()?);
        }
        let msg = Message { nbits, data };
        let pad = msg.data.len() * 8 - nbits;
        if pad > 0 && msg.data.last().unwrap() & ((1 << pad) - 1) != 0 {
            return None;
        }
        Some(msg)
    }

    /// Concatenation, bit-exact.
    pub fn concat(parts: &[&Message]) -> Message {
        let mut w = BitWriter::new();
        for part in parts {
            for i in 0..part.nbits {
                w.push_bit(part.bit(i));
            }
        }
        w.finish()
    }

    /// The bits `[start, start+len)` as a new message.
    pub fn slice(&self, start: usize, len: usize) -> Message {
        assert!(start + len <= self.nbits);
        let mut w = BitWriter::new();
        for i in start..start + len {
            w.push_bit(self.bit(i));
        }
        w.finish()
    }
}

impl fmt::Debug for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Message({} bits, {})", self.nbits, self.to_hex())
    }
}

/// Appends fixed-width big-endian fields to a bit string.
pub struct BitWriter {
    nbits: usize,
    data: Vec<u8>,
}

impl BitWriter {
    pub fn new() -> Self {
        BitWriter { nbits: 0, data: Vec::new() }
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.nbits % 8 == 0 {
            self.data.push(0);
        }
        if bit {
            *self.data.last_mut().unwrap() |= 1 << (7 - self.nbits % 8);
        }
        self.nbits += 1;
    }

    pub fn write_u64(&mut self, value: u64, width: usize) {
        assert!(width >= 64 - value.leading_zeros() as usize, "value {value} exceeds {width} bits");
        for pos in (0..width).rev() {
            self.push_bit(pos < 64 && value >> pos & 1 == 1);
        }
    }

    pub fn write_big(&mut self, value: &BigUint, width: usize) {
        assert!(value.bits() as usize <= width, "value exceeds {width} bits");
        for pos in (0..width as u64).rev() {
            self.push_bit(value.bit(pos));
        }
    }

    pub fn finish(self) -> Message {
        Message { nbits: self.nbits, data: self.data }
    }
}

impl Default for BitWriter {
    fn default() -> Self {
        Self::new()
    }
}

/// Reads fixed-width big-endian fields back out of a message.
pub struct BitReader<'a> {
    msg: &'a Message,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(msg: &'a Message) -> Self {
        BitReader { msg, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.msg.nbits - self.pos
    }

    pub fn read_u64(&mut self, width: usize) -> Option<u64> {
        assert!(width <= 64);
        if self.remaining() < width {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = v << 1 | self.msg.bit(self.pos) as u64;
            self.pos += 1;
        }
        Some(v)
    }

    pub fn read_big(&mut self, width: usize) -> Option<BigUint> {
        if self.remaining() < width {
            return None;
        }
        let mut v = BigUint::zero();
        for _ in 0..width {
            v = v << 1u8;
            if self.msg.bit(self.pos) {
                v += 1u8;
            }
            self.pos += 1;
        }
        Some(v)
    }
}

/// What the referee produced. Exactly one variant per run; `Raw` is the
/// escape hatch for protocols whose output is not structured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Output {
    Verdict(bool),
    Graph(LabelledGraph),
    Rejected(String),
    Raw(Message),
}

impl Output {
    fn export_line(&self) -> String {
        match self {
            Output::Verdict(b) => format!("output verdict {b}"),
            Output::Graph(g) => {
                let edges: String =
                    g.edges().map(|(u, v)| format!(" {u}-{v}")).collect();
                format!("output graph n {} m {}{edges}", g.n(), g.edge_count())
            }
            Output::Rejected(reason) => format!("output rejected {reason}"),
            Output::Raw(m) => format!("output raw bits {} hex {}", m.len_bits(), m.to_hex()),
        }
    }
}

/// Full record of one protocol run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub n: usize,
    /// `messages[i-1]` is the message sent by node `i`.
    pub messages: Vec<Message>,
    /// `max_i |m_i|` in bits.
    pub max_bits: usize,
    pub output: Output,
}

impl Transcript {
    /// Stable text form: one `id <i> bits <len> hex <payload>` line per node,
    /// then one `output <...>` line.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (i, m) in self.messages.iter().enumerate() {
            out.push_str(&format!("id {} bits {} hex {}\n", i + 1, m.len_bits(), m.to_hex()));
        }
        out.push_str(&self.output.export_line());
        out.push('\n');
        out
    }
}

/// Failure inside a protocol's own functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolError(pub String);

impl fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ProtocolError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunError {
    Local { id: VertexId, source: ProtocolError },
    Referee { source: ProtocolError },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Local { id, source } => write!(f, "node {id}: {source}"),
            RunError::Referee { source } => write!(f, "referee: {source}"),
        }
    }
}

impl std::error::Error for RunError {}

/// A one-round protocol. `local_fn` must depend only on `(n, id, neighborhood)`
/// and be evaluable on any such pair, whether or not it arises from a graph;
/// `global_fn` sees the message vector indexed by ID and nothing else.
pub trait OneRoundProtocol: Send + Sync {
    fn local_fn(
        &self,
        n: usize,
        id: VertexId,
        neighborhood: &BTreeSet<VertexId>,
    ) -> Result<Message, ProtocolError>;

    fn global_fn(&self, n: usize, messages: &[Message]) -> Result<Output, ProtocolError>;
}

/// Runs `protocol` on `g`: evaluates the local function at every node,
/// hands the message vector to the referee, records everything.
pub fn run(protocol: &dyn OneRoundProtocol, g: &LabelledGraph) -> Result<Transcript, RunError> {
    let n = g.n();
    let mut messages = Vec::with_capacity(n);
    for id in g.vertices() {
        let m = protocol
            .local_fn(n, id, g.neighborhood(id))
            .map_err(|source| RunError::Local { id, source })?;
        messages.push(m);
    }
    let max_bits = messages.iter().map(Message::len_bits).max().unwrap_or(0);
    let output = protocol
        .global_fn(n, &messages)
        .map_err(|source| RunError::Referee { source })?;
    Ok(Transcript { n, messages, max_bits, output })
}

/// Observed message sizes over a graph sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FrugalityReport {
    /// Per vertex count: the largest `max_bits` observed at that size.
    pub per_n: std::collections::BTreeMap<usize, usize>,
    /// Smallest `c` with `max_bits <= c * log2(n+1)` over all observations.
    pub fitted_c: f64,
    /// Whether the caller-supplied bound dominated every observation.
    pub bound_holds: Option<bool>,
}

impl FrugalityReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (n, bits) in &self.per_n {
            out.push_str(&format!("n {n} max_bits {bits}\n"));
        }
        out.push_str(&format!("fitted_c {:.4}\n", self.fitted_c));
        if let Some(holds) = self.bound_holds {
            out.push_str(&format!("bound_holds {holds}\n"));
        }
        out
    }
}

/// Measures `max_bits` of `protocol` across `graphs`, grouped by size, and
/// fits the least constant `c` against `log2(n+1)`. An optional bound
/// function is checked against every observation.
pub fn frugality_report(
    protocol: &dyn OneRoundProtocol,
    graphs: &[LabelledGraph],
    bound: Option<&dyn Fn(usize) -> usize>,
) -> Result<FrugalityReport, RunError> {
    assert!(!graphs.is_empty(), "frugality measurement needs at least one graph");
    let mut per_n = std::collections::BTreeMap::new();
    let mut fitted_c = 0.0f64;
    let mut bound_holds = bound.map(|_| true);
    for g in graphs {
        let t = run(protocol, g)?;
        let entry = per_n.entry(g.n()).or_insert(0);
        *entry = (*entry).max(t.max_bits);
        fitted_c = fitted_c.max(t.max_bits as f64 / ((g.n() + 1) as f64).log2());
        if let (Some(holds), Some(b)) = (bound_holds.as_mut(), bound) {
            *holds = *holds && t.max_bits <= b(g.n());
        }
    }
    Ok(FrugalityReport { per_n, fitted_c, bound_holds })
}

/// Width of one ID field for graphs of `n` vertices: `ceil(log2(n+1))`.
pub fn id_field_width(n: usize) -> usize {
    assert!(n >= 1);
    (usize::BITS - n.leading_zeros()) as usize
}

/// Every node stays silent; the referee accepts.
pub struct EmptyProtocol;

impl OneRoundProtocol for EmptyProtocol {
    fn local_fn(
        &self,
        _n: usize,
        _id: VertexId,
        _neighborhood: &BTreeSet<VertexId>,
    ) -> Result<Message, ProtocolError> {
        Ok(Message::empty())
    }

    fn global_fn(&self, _n: usize, _messages: &[Message]) -> Result<Output, ProtocolError> {
        Ok(Output::Verdict(true))
    }
}

/// Every node ships its whole neighbor list (count + sorted IDs, each
/// `ceil(log2(n+1))` bits); the referee rebuilds the graph. Deliberately
/// non-frugal: a high-degree node sends `Theta(n log n)` bits.
pub struct AdjacencyProtocol;

impl OneRoundProtocol for AdjacencyProtocol {
    fn local_fn(
        &self,
        n: usize,
        id: VertexId,
        neighborhood: &BTreeSet<VertexId>,
    ) -> Result<Message, ProtocolError> {
        let width = id_field_width(n);
        if !(1..=n as u64).contains(&(id as u64)) {
            return Err(ProtocolError(format!("node id {id} out of range 1..={n}")));
        }
        let mut w = BitWriter::new();
        w.write_u64(neighborhood.len() as u64, width);
        for &v in neighborhood {
            if !(1..=n as u64).contains(&(v as u64)) {
                return Err(ProtocolError(format!("neighbor {v} out of range 1..={n}")));
            }
            w.write_u64(v as u64, width);
        }
        Ok(w.finish())
    }

    fn global_fn(&self, n: usize, messages: &[Message]) -> Result<Output, ProtocolError> {
        if messages.len() != n {
            return Err(ProtocolError(format!("expected {n} messages, got {}", messages.len())));
        }
        let width = id_field_width(n);
        let mut g = LabelledGraph::new(n);
        for (idx, m) in messages.iter().enumerate() {
            let id = (idx + 1) as VertexId;
            let mut r = BitReader::new(m);
            let count = r
                .read_u64(width)
                .ok_or_else(|| ProtocolError(format!("message {id} truncated")))?;
            for _ in 0..count {
                let v = r
                    .read_u64(width)
                    .ok_or_else(|| ProtocolError(format!("message {id} truncated")))?;
                if v == 0 || v > n as u64 || v == id as u64 {
                    return Err(ProtocolError(format!("message {id} lists bad neighbor {v}")));
                }
                let v = v as VertexId;
                if !g.has_edge(id, v) {
                    g.add_edge(id, v).map_err(|e| ProtocolError(e.to_string()))?;
                }
            }
            if r.remaining() != 0 {
                return Err(ProtocolError(format!("message {id} has trailing bits")));
            }
        }
        Ok(Output::Graph(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;
    use proptest::prelude::*;

    #[test]
    fn bit_round_trip_u64() {
        let mut w = BitWriter::new();
        w.write_u64(5, 3);
        w.write_u64(0, 4);
        w.write_u64(1023, 10);
        let m = w.finish();
        assert_eq!(m.len_bits(), 17);
        let mut r = BitReader::new(&m);
        assert_eq!(r.read_u64(3), Some(5));
        assert_eq!(r.read_u64(4), Some(0));
        assert_eq!(r.read_u64(10), Some(1023));
        assert_eq!(r.remaining(), 0);
        assert_eq!(r.read_u64(1), None);
    }

    #[test]
    fn hex_round_trip() {
        let mut w = BitWriter::new();
        w.write_u64(0xa4, 8);
        w.write_u64(2, 3);
        let m = w.finish();
        assert_eq!(m.to_hex(), "a440");
        assert_eq!(Message::from_hex("a440", 11), Some(m));
        // nonzero padding is rejected
        assert_eq!(Message::from_hex("a441", 11), None);
        assert_eq!(Message::from_hex("-", 0), Some(Message::empty()));
        assert_eq!(Message::empty().to_hex(), "-");
    }

    #[test]
    fn concat_and_slice_are_inverses() {
        let mut w = BitWriter::new();
        w.write_u64(0b10110, 5);
        let a = w.finish();
        let mut w = BitWriter::new();
        w.write_u64(0b0011, 4);
        let b = w.finish();
        let joined = Message::concat(&[&a, &b]);
        assert_eq!(joined.len_bits(), 9);
        assert_eq!(joined.slice(0, 5), a);
        assert_eq!(joined.slice(5, 4), b);
    }

    #[test]
    fn trivial_protocol_on_any_graph() {
        let g = graph::gen_k_degenerate(9, 2, 3);
        let t = run(&EmptyProtocol, &g).unwrap();
        assert_eq!(t.output, Output::Verdict(true));
        assert_eq!(t.max_bits, 0);
        assert!(t.messages.iter().all(|m| m.len_bits() == 0));
    }

    #[test]
    fn adjacency_protocol_reconstructs() {
        let g = graph::gen_k_degenerate(17, 3, 5);
        let t = run(&AdjacencyProtocol, &g).unwrap();
        assert_eq!(t.output, Output::Graph(g));
    }

    #[test]
    fn runs_are_deterministic() {
        let g = graph::gen_k_degenerate(12, 2, 8);
        assert_eq!(run(&AdjacencyProtocol, &g).unwrap(), run(&AdjacencyProtocol, &g).unwrap());
    }

    #[test]
    fn max_bits_matches_recount() {
        let g = graph::LabelledGraph::star(9);
        let t = run(&AdjacencyProtocol, &g).unwrap();
        assert_eq!(t.max_bits, t.messages.iter().map(Message::len_bits).max().unwrap());
        // star center lists n-1 neighbors
        assert_eq!(t.max_bits, (1 + 8) * id_field_width(9));
    }

    #[test]
    fn transcript_export_is_stable() {
        let g = graph::LabelledGraph::path(2);
        let t = run(&EmptyProtocol, &g).unwrap();
        assert_eq!(t.export(), "id 1 bits 0 hex -\nid 2 bits 0 hex -\noutput verdict true\n");
    }

    #[test]
    fn frugality_report_flags_non_frugal_protocols() {
        let stars: Vec<_> =
            [8usize, 64, 512].iter().map(|&n| graph::LabelledGraph::star(n)).collect();
        let report = frugality_report(&AdjacencyProtocol, &stars, Some(&|n| 100 * id_field_width(n)))
            .unwrap();
        assert_eq!(report.bound_holds, Some(false));
        let small = frugality_report(&AdjacencyProtocol, &stars[..1], None).unwrap();
        assert!(report.fitted_c > small.fitted_c, "fitted constant must grow with n");

        let empty = frugality_report(&EmptyProtocol, &stars, Some(&|_| 0)).unwrap();
        assert_eq!(empty.bound_holds, Some(true));
        assert_eq!(empty.fitted_c, 0.0);
    }

    proptest! {
        #[test]
        fn prop_write_read_big(bytes in proptest::collection::vec(any::<u8>(), 0..20), extra in 0usize..16) {
            let value = num_bigint::BigUint::from_bytes_be(&bytes);
            let width = value.bits() as usize + extra;
            let mut w = BitWriter::new();
            w.write_big(&value, width);
            let m = w.finish();
            prop_assert_eq!(m.len_bits(), width);
            let mut r = BitReader::new(&m);
            prop_assert_eq!(r.read_big(width), Some(value));
        }
    }
}
