//! Temporal network data model and event-file ingestion.
//!
//! A temporal network is a sequence of undirected, instantaneous interaction
//! events `(u, v, t)` over dense node ids `[0, n)`. Events are kept in
//! chronological order; ties are legal and keep their stored order, which is
//! the order every algorithm in this crate processes them in.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = u32;

/// One interaction between `u` and `v` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub u: NodeId,
    pub v: NodeId,
    pub t: f64,
}

impl Event {
    pub fn new(u: NodeId, v: NodeId, t: f64) -> Self {
        Event { u, v, t }
    }

    pub fn touches(&self, node: NodeId) -> bool {
        self.u == node || self.v == node
    }

    fn shares_node(&self, other: &Event) -> bool {
        self.touches(other.u) || self.touches(other.v)
    }
}

/// Whether `later` can continue a time-respecting path ending with `earlier`:
/// the events share a node, `later` is strictly later, and, when a window is
/// given, the gap does not exceed it.
pub fn adjacent(earlier: &Event, later: &Event, delta_t: Option<f64>) -> bool {
    let gap = later.t - earlier.t;
    earlier.shares_node(later) && gap > 0.0 && delta_t.is_none_or(|w| gap <= w)
}

/// Order in which a network's events are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDirection {
    Forward,
    Reversed,
}

/// An immutable, validated event sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalNetwork {
    n: usize,
    events: Vec<Event>,
    direction: TimeDirection,
}

impl TemporalNetwork {
    /// Builds a forward network over `n` nodes. Events must already be in
    /// chronological order.
    pub fn new(n: usize, events: Vec<Event>) -> Result<Self> {
        let mut prev = f64::NEG_INFINITY;
        for (i, e) in events.iter().enumerate() {
            if !e.t.is_finite() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("non-finite timestamp {}", e.t),
                });
            }
            if e.t < prev {
                return Err(Error::OutOfOrder {
                    line: i + 1,
                    t: e.t,
                    prev,
                });
            }
            prev = e.t;
            let hi = e.u.max(e.v) as usize;
            if hi >= n {
                return Err(Error::NodeOutOfRange {
                    node: hi as u64,
                    n,
                });
            }
        }
        Ok(TemporalNetwork {
            n,
            events,
            direction: TimeDirection::Forward,
        })
    }

    /// Stable-sorts `events` by time and sizes the node set to fit them.
    pub fn from_unsorted(mut events: Vec<Event>) -> Result<Self> {
        events.sort_by(|a, b| a.t.total_cmp(&b.t));
        let n = node_count(&events);
        Self::new(n, events)
    }

    /// A network with `n` nodes and no events.
    pub fn empty(n: usize) -> Self {
        TemporalNetwork {
            n,
            events: Vec::new(),
            direction: TimeDirection::Forward,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.events.len()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn direction(&self) -> TimeDirection {
        self.direction
    }

    /// Difference between the latest and earliest timestamp.
    pub fn time_span(&self) -> f64 {
        let (Some(a), Some(b)) = (self.events.first(), self.events.last()) else {
            return 0.0;
        };
        (b.t - a.t).abs()
    }

    /// The same events in the opposite time direction. Involutive.
    pub fn reverse(&self) -> TemporalNetwork {
        let mut events = self.events.clone();
        events.reverse();
        TemporalNetwork {
            n: self.n,
            events,
            direction: match self.direction {
                TimeDirection::Forward => TimeDirection::Reversed,
                TimeDirection::Reversed => TimeDirection::Forward,
            },
        }
    }

    /// Appends a later event, growing the node set to include its endpoints.
    pub fn push(&mut self, e: Event) -> Result<()> {
        if !e.t.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite timestamp {}", e.t)));
        }
        if let Some(last) = self.events.last() {
            let ordered = match self.direction {
                TimeDirection::Forward => e.t >= last.t,
                TimeDirection::Reversed => e.t <= last.t,
            };
            if !ordered {
                return Err(Error::OutOfOrder {
                    line: self.events.len() + 1,
                    t: e.t,
                    prev: last.t,
                });
            }
        }
        self.n = self.n.max(e.u.max(e.v) as usize + 1);
        self.events.push(e);
        Ok(())
    }

    /// Appends an event between labelled nodes; unseen labels get the next
    /// free ids, so `n` grows by exactly the number of new labels.
    pub fn push_labeled(&mut self, labels: &mut LabelMap, a: &str, b: &str, t: f64) -> Result<()> {
        if labels.len() < self.n {
            return Err(Error::InvalidParameter(format!(
                "label map covers {} nodes, network has {}",
                labels.len(),
                self.n
            )));
        }
        let u = labels.intern(a);
        let v = labels.intern(b);
        self.push(Event::new(u, v, t))?;
        self.n = self.n.max(labels.len());
        Ok(())
    }

    /// The first `ceil(fraction * m)` events, with the node set shrunk to the
    /// ids they use.
    pub fn prefix(&self, fraction: f64) -> Result<TemporalNetwork> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "prefix fraction must be in (0, 1], got {fraction}"
            )));
        }
        let keep = ((self.m() as f64) * fraction).ceil() as usize;
        let events = self.events[..keep.min(self.m())].to_vec();
        Ok(TemporalNetwork {
            n: node_count(&events),
            events,
            direction: self.direction,
        })
    }

    /// Writes the `u,v,t` text format.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for e in &self.events {
            writeln!(w, "{},{},{}", e.u, e.v, e.t)?;
        }
        w.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))?;
        Ok(())
    }
}

fn node_count(events: &[Event]) -> usize {
    events
        .iter()
        .map(|e| e.u.max(e.v) as usize + 1)
        .max()
        .unwrap_or(0)
}

/// Bidirectional mapping between string labels and dense node ids.
#[derive(Debug, Clone, Default)]
pub struct LabelMap {
    labels: Vec<String>,
    ids: HashMap<String, NodeId>,
}

impl LabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.labels.len() as NodeId;
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }

    pub fn id_of(&self, label: &str) -> Option<NodeId> {
        self.ids.get(label).copied()
    }

    pub fn label_of(&self, id: NodeId) -> Option<&str> {
        self.labels.get(id as usize).map(String::as_str)
    }
}

/// Options for reading an event file.
#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Stable-sort by timestamp instead of rejecting out-of-order input.
    pub sort: bool,
    /// Keep only this leading fraction of the (chronological) events.
    pub prefix_fraction: Option<f64>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            sort: true,
            prefix_fraction: None,
        }
    }
}

/// A parsed event file. `labels` is set when the file used non-numeric ids.
#[derive(Debug, Clone)]
pub struct LoadedNetwork {
    pub network: TemporalNetwork,
    pub labels: Option<LabelMap>,
}

enum RawId {
    Int(u64),
    Label(String),
}

struct RawEvent {
    u: RawId,
    v: RawId,
    t: f64,
    line: usize,
}

/// Reads `u,v,t` records. Fields may be separated by commas or whitespace;
/// blank lines and lines starting with `#` are skipped, and columns after
/// the third are ignored.
pub fn read_events<R: BufRead>(reader: R, opts: &LoadOptions) -> Result<LoadedNetwork> {
    let mut raw = Vec::new();
    let mut has_labels = false;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut fields = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty());
        let (Some(a), Some(b), Some(t)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `u,v,t`, got {body:?}"),
            });
        };
        let u = parse_id(a, lineno)?;
        let v = parse_id(b, lineno)?;
        has_labels |= matches!(u, RawId::Label(_)) || matches!(v, RawId::Label(_));
        let t: f64 = t.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad timestamp {t:?}"),
        })?;
        if !t.is_finite() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("non-finite timestamp {t}"),
            });
        }
        raw.push(RawEvent {
            u,
            v,
            t,
            line: lineno,
        });
    }

    if opts.sort {
        raw.sort_by(|a, b| a.t.total_cmp(&b.t));
    } else {
        for pair in raw.windows(2) {
            if pair[1].t < pair[0].t {
                return Err(Error::OutOfOrder {
                    line: pair[1].line,
                    t: pair[1].t,
                    prev: pair[0].t,
                });
            }
        }
    }

    let (events, labels) = if has_labels {
        let mut labels = LabelMap::new();
        let events = raw
            .iter()
            .map(|r| Event::new(labels.intern(&r.u.text()), labels.intern(&r.v.text()), r.t))
            .collect();
        (events, Some(labels))
    } else {
        let events = raw
            .iter()
            .map(|r| Ok(Event::new(r.u.int(r.line)?, r.v.int(r.line)?, r.t)))
            .collect::<Result<Vec<_>>>()?;
        (events, None)
    };
    let n = labels.as_ref().map_or_else(|| node_count(&events), LabelMap::len);
    let mut network = TemporalNetwork::new(n, events)?;
    if let Some(f) = opts.prefix_fraction {
        network = network.prefix(f)?;
    }
    Ok(LoadedNetwork { network, labels })
}

/// Loads an event file from disk.
pub fn load_events(path: impl AsRef<Path>, sort_if_needed: bool) -> Result<TemporalNetwork> {
    let opts = LoadOptions {
        sort: sort_if_needed,
        prefix_fraction: None,
    };
    Ok(load_with(path, &opts)?.network)
}

pub fn load_with(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<LoadedNetwork> {
    let f = File::open(path)?;
    read_events(BufReader::new(f), opts)
}

fn parse_id(tok: &str, line: usize) -> Result<RawId> {
    match tok.parse::<i64>() {
        Ok(x) if x < 0 => Err(Error::NegativeNode { line }),
        Ok(x) if x > NodeId::MAX as i64 => Err(Error::Parse {
            line,
            msg: format!("node-id {x} exceeds {}", NodeId::MAX),
        }),
        Ok(x) => Ok(RawId::Int(x as u64)),
        Err(_) => Ok(RawId::Label(tok.to_owned())),
    }
}

impl RawId {
    fn text(&self) -> String {
        match self {
            RawId::Int(x) => x.to_string(),
            RawId::Label(s) => s.clone(),
        }
    }

    fn int(&self, line: usize) -> Result<NodeId> {
        match self {
            RawId::Int(x) => Ok(*x as NodeId),
            RawId::Label(s) => Err(Error::Parse {
                line,
                msg: format!("unexpected label {s:?}"),
            }),
        }
    }
}
