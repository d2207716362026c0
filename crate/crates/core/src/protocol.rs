//! The bounded-degeneracy reconstruction protocol.
//!
//! Every node ships the power-sum summary of its neighborhood (plus, in
//! generalized mode, the summary of its non-neighborhood). The referee
//! repeatedly prunes the lowest live ID whose live degree — or, in
//! generalized mode, live co-degree — is at most `k`, decodes that side,
//! records the incident edges and updates the remaining summaries, exactly
//! as if the vertex had been deleted from the graph.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::codec::{self, PowerSumSummary};
use crate::graph::{LabelledGraph, VertexId};
use crate::sim::{BitReader, Message, OneRoundProtocol, Output, ProtocolError};

pub const REASON_DEGENERACY: &str = "degeneracy exceeds k";
pub const REASON_GENERALIZED: &str = "generalized degeneracy exceeds k";
pub const REASON_INCONSISTENT: &str = "inconsistent messages";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolMode {
    /// Referee outputs the reconstructed graph.
    Reconstruct,
    /// Referee outputs `verdict true` instead of the graph; rejections keep
    /// their reason either way.
    Recognize,
}

/// Protocol configuration. `k` is known to all parties and never
/// transmitted. `k <= n-1` is the sensible regime (no graph exceeds it);
/// larger `k` still works, the messages are just wider than useful.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegeneracyConfig {
    pub k: usize,
    pub mode: ProtocolMode,
    pub generalized: bool,
}

impl DegeneracyConfig {
    pub fn new(k: usize) -> Self {
        DegeneracyConfig { k, mode: ProtocolMode::Reconstruct, generalized: false }
    }

    pub fn generalized(k: usize) -> Self {
        DegeneracyConfig { k, mode: ProtocolMode::Reconstruct, generalized: true }
    }

    pub fn recognizing(mut self) -> Self {
        self.mode = ProtocolMode::Recognize;
        self
    }
}

pub struct DegeneracyProtocol {
    config: DegeneracyConfig,
    /// Cached `sum_{i=1..n} i^p` for p = 1..k, keyed by n; used to derive
    /// complement power sums without touching every non-neighbor.
    totals: Mutex<HashMap<usize, Vec<BigUint>>>,
}

impl DegeneracyProtocol {
    pub fn new(config: DegeneracyConfig) -> Self {
        DegeneracyProtocol { config, totals: Mutex::new(HashMap::new()) }
    }

    pub fn plain(k: usize) -> Self {
        Self::new(DegeneracyConfig::new(k))
    }

    pub fn config(&self) -> DegeneracyConfig {
        self.config
    }

    /// Message width for graphs of `n` vertices: `W(n,k)`, doubled in
    /// generalized mode.
    pub fn message_bits(&self, n: usize) -> usize {
        let w = codec::wire_bits(n, self.config.k);
        if self.config.generalized {
            2 * w
        } else {
            w
        }
    }

    fn power_totals(&self, n: usize) -> Vec<BigUint> {
        let mut cache = self.totals.lock().unwrap();
        cache
            .entry(n)
            .or_insert_with(|| {
                let k = self.config.k;
                let mut totals = vec![BigUint::zero(); k];
                for i in 1..=n as u64 {
                    let i_big = BigUint::from(i);
                    let mut pow = BigUint::one();
                    for t in totals.iter_mut() {
                        pow *= &i_big;
                        *t += &pow;
                    }
                }
                totals
            })
            .clone()
    }

    /// True iff the referee reconstructs without rejection, i.e. iff the
    /// sender graph has (generalized) degeneracy at most `k`.
    pub fn recognize(&self, n: usize, messages: &[Message]) -> Result<bool, ProtocolError> {
        Ok(matches!(self.reconstruct(n, messages)?, Output::Graph(_)))
    }

    fn reconstruct(&self, n: usize, messages: &[Message]) -> Result<Output, ProtocolError> {
        if messages.len() != n {
            return Err(ProtocolError(format!("expected {n} messages, got {}", messages.len())));
        }
        let summaries = match self.parse_messages(n, messages) {
            Ok(s) => s,
            Err(_) => return Ok(Output::Rejected(REASON_INCONSISTENT.into())),
        };
        let result = if self.config.generalized {
            prune_generalized(n, self.config.k, summaries)
        } else {
            prune_plain(n, self.config.k, summaries)
        };
        Ok(match result {
            Ok(g) => Output::Graph(g),
            Err(reason) => Output::Rejected(reason.into()),
        })
    }

    /// Per-node summaries; in generalized mode the pair (neighborhood,
    /// complement neighborhood).
    fn parse_messages(
        &self,
        n: usize,
        messages: &[Message],
    ) -> Result<Vec<(PowerSumSummary, Option<PowerSumSummary>)>, ()> {
        let k = self.config.k;
        let expect = self.message_bits(n);
        let mut out = Vec::with_capacity(n);
        for (idx, m) in messages.iter().enumerate() {
            if m.len_bits() != expect {
                return Err(());
            }
            let mut r = BitReader::new(m);
            let nb = codec::read_summary(&mut r, n, k).map_err(|_| ())?;
            if nb.id as usize != idx + 1 {
                return Err(());
            }
            let co = if self.config.generalized {
                let co = codec::read_summary(&mut r, n, k).map_err(|_| ())?;
                if co.id != nb.id || co.degree != n - 1 - nb.degree {
                    return Err(());
                }
                Some(co)
            } else {
                None
            };
            out.push((nb, co));
        }
        Ok(out)
    }
}

impl OneRoundProtocol for DegeneracyProtocol {
    fn local_fn(
        &self,
        n: usize,
        id: VertexId,
        neighborhood: &BTreeSet<VertexId>,
    ) -> Result<Message, ProtocolError> {
        let k = self.config.k;
        let nb = codec::encode(id, neighborhood, n, k)?;
        let msg = codec::serialize(&nb, n, k)?;
        if !self.config.generalized {
            return Ok(msg);
        }
        // Complement power sums: total over 1..=n minus self minus neighbors.
        let totals = self.power_totals(n);
        let mut co_b = totals;
        let id_big = BigUint::from(id);
        let mut pow = BigUint::one();
        for (p, t) in co_b.iter_mut().enumerate() {
            pow *= &id_big;
            *t -= &pow;
            *t -= &nb.b[p];
        }
        let co = PowerSumSummary { id, degree: n - 1 - nb.degree, b: co_b };
        let co_msg = codec::serialize(&co, n, k)?;
        Ok(Message::concat(&[&msg, &co_msg]))
    }

    fn global_fn(&self, n: usize, messages: &[Message]) -> Result<Output, ProtocolError> {
        let out = self.reconstruct(n, messages)?;
        Ok(match (self.config.mode, out) {
            (ProtocolMode::Recognize, Output::Graph(_)) => Output::Verdict(true),
            (_, out) => out,
        })
    }
}

/// One live summary under referee-side updates.
struct LiveEntry {
    degree: usize,
    b: Vec<BigUint>,
}

fn subtract_powers(entry: &mut LiveEntry, x: VertexId) -> Result<(), ()> {
    if entry.degree == 0 {
        return Err(());
    }
    entry.degree -= 1;
    let x_big = BigUint::from(x);
    let mut pow = BigUint::one();
    for b_p in entry.b.iter_mut() {
        pow *= &x_big;
        if *b_p < pow {
            return Err(());
        }
        *b_p -= &pow;
    }
    Ok(())
}

fn prune_plain(
    n: usize,
    k: usize,
    summaries: Vec<(PowerSumSummary, Option<PowerSumSummary>)>,
) -> Result<LabelledGraph, &'static str> {
    let mut live: Vec<Option<LiveEntry>> = std::iter::once(None)
        .chain(summaries.into_iter().map(|(s, _)| Some(LiveEntry { degree: s.degree, b: s.b })))
        .collect();
    let mut ready: BTreeSet<VertexId> = (1..=n as VertexId)
        .filter(|&v| live[v as usize].as_ref().unwrap().degree <= k)
        .collect();
    let mut remaining = n;
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();

    while remaining > 0 {
        let x = match ready.pop_first() {
            Some(x) => x,
            None => return Err(REASON_DEGENERACY),
        };
        let entry = live[x as usize].take().unwrap();
        let summary = PowerSumSummary { id: x, degree: entry.degree, b: entry.b };
        let neighbors = codec::decode(&summary, n).map_err(|_| REASON_INCONSISTENT)?;
        for &w in &neighbors {
            if w == x {
                return Err(REASON_INCONSISTENT);
            }
            let peer = live[w as usize].as_mut().ok_or(REASON_INCONSISTENT)?;
            subtract_powers(peer, x).map_err(|_| REASON_INCONSISTENT)?;
            if peer.degree <= k {
                ready.insert(w);
            }
            edges.push((x.min(w), x.max(w)));
        }
        remaining -= 1;
    }
    LabelledGraph::from_edges(n, edges).map_err(|_| REASON_INCONSISTENT)
}

/// Generalized pruning: a vertex may be retired when its live degree or its
/// live co-degree is at most `k` (neighborhood side preferred). Complement
/// summaries are not updated eagerly; the live complement sums are derived
/// as `initial - (retired totals - retired neighbors)`, which equals the
/// eager update after every removal.
fn prune_generalized(
    n: usize,
    k: usize,
    summaries: Vec<(PowerSumSummary, Option<PowerSumSummary>)>,
) -> Result<LabelledGraph, &'static str> {
    struct GenEntry {
        nb: LiveEntry,
        co_init: Vec<BigUint>,
        /// Power sums of this vertex's already-retired neighbors.
        retired_nb: Vec<BigUint>,
    }

    let mut live: Vec<Option<GenEntry>> = std::iter::once(None)
        .chain(summaries.into_iter().map(|(nb, co)| {
            let co = co.expect("generalized messages carry both summaries");
            Some(GenEntry {
                nb: LiveEntry { degree: nb.degree, b: nb.b },
                co_init: co.b,
                retired_nb: vec![BigUint::zero(); k],
            })
        }))
        .collect();
    let mut retired_totals = vec![BigUint::zero(); k];
    let mut remaining = n;
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();

    while remaining > 0 {
        let live_ids: Vec<VertexId> =
            (1..=n as VertexId).filter(|&v| live[v as usize].is_some()).collect();
        let pick = live_ids.iter().copied().find_map(|v| {
            let e = live[v as usize].as_ref().unwrap();
            let co_degree = remaining - 1 - e.nb.degree;
            if e.nb.degree <= k {
                Some((v, false))
            } else if co_degree <= k {
                Some((v, true))
            } else {
                None
            }
        });
        let (x, via_complement) = match pick {
            Some(p) => p,
            None => return Err(REASON_GENERALIZED),
        };
        let entry = live[x as usize].take().unwrap();

        let neighbors: BTreeSet<VertexId> = if via_complement {
            // Live complement sums, then invert within the live set.
            let co_degree = remaining - 1 - entry.nb.degree;
            let mut co_b = entry.co_init.clone();
            for (p, c) in co_b.iter_mut().enumerate() {
                let gone = &retired_totals[p] - &entry.retired_nb[p];
                if *c < gone {
                    return Err(REASON_INCONSISTENT);
                }
                *c -= gone;
            }
            let summary = PowerSumSummary { id: x, degree: co_degree, b: co_b };
            let co_live = codec::decode(&summary, n).map_err(|_| REASON_INCONSISTENT)?;
            for &w in &co_live {
                if w == x || live[w as usize].is_none() {
                    return Err(REASON_INCONSISTENT);
                }
            }
            live_ids.iter().copied().filter(|&w| w != x && !co_live.contains(&w)).collect()
        } else {
            let summary =
                PowerSumSummary { id: x, degree: entry.nb.degree, b: entry.nb.b.clone() };
            codec::decode(&summary, n).map_err(|_| REASON_INCONSISTENT)?
        };

        let x_big = BigUint::from(x);
        for &w in &neighbors {
            if w == x {
                return Err(REASON_INCONSISTENT);
            }
            let peer = live[w as usize].as_mut().ok_or(REASON_INCONSISTENT)?;
            subtract_powers(&mut peer.nb, x).map_err(|_| REASON_INCONSISTENT)?;
            let mut pow = BigUint::one();
            for r in peer.retired_nb.iter_mut() {
                pow *= &x_big;
                *r += &pow;
            }
            edges.push((x.min(w), x.max(w)));
        }
        let mut pow = BigUint::one();
        for t in retired_totals.iter_mut() {
            pow *= &x_big;
            *t += &pow;
        }
        remaining -= 1;
    }
    LabelledGraph::from_edges(n, edges).map_err(|_| REASON_INCONSISTENT)
}

/// A protocol named on the command line: `degen:k=<K>[,generalized]`,
/// `adjacency`, or `empty`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolSpec {
    Degeneracy(DegeneracyConfig),
    Adjacency,
    Empty,
}

impl ProtocolSpec {
    pub fn parse(spec: &str) -> Result<Self, String> {
        match spec {
            "empty" => return Ok(ProtocolSpec::Empty),
            "adjacency" => return Ok(ProtocolSpec::Adjacency),
            _ => {}
        }
        let rest = spec.strip_prefix("degen:").ok_or_else(|| {
            format!("unknown protocol `{spec}` (expected degen:k=<K>[,generalized], adjacency, empty)")
        })?;
        let mut k: Option<usize> = None;
        let mut generalized = false;
        for part in rest.split(',') {
            if let Some(v) = part.strip_prefix("k=") {
                k = Some(v.parse().map_err(|_| format!("bad k value `{v}`"))?);
            } else if part == "generalized" {
                generalized = true;
            } else {
                return Err(format!("unknown protocol option `{part}`"));
            }
        }
        let k = k.ok_or("degen protocol needs k=<K>")?;
        let config =
            if generalized { DegeneracyConfig::generalized(k) } else { DegeneracyConfig::new(k) };
        Ok(ProtocolSpec::Degeneracy(config))
    }

    pub fn build(self) -> Box<dyn OneRoundProtocol> {
        match self {
            ProtocolSpec::Degeneracy(config) => Box::new(DegeneracyProtocol::new(config)),
            ProtocolSpec::Adjacency => Box::new(crate::sim::AdjacencyProtocol),
            ProtocolSpec::Empty => Box::new(crate::sim::EmptyProtocol),
        }
    }
}

/// Convenience wrapper over [`ProtocolSpec::parse`] + [`ProtocolSpec::build`].
pub fn parse_protocol_spec(spec: &str) -> Result<Box<dyn OneRoundProtocol>, String> {
    Ok(ProtocolSpec::parse(spec)?.build())
}
