//! Input model: a Hamilton cycle given as a vertex order plus a chord set,
//! with cycle-relative geometry and the single trusted witness checker.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Vertex identifier as it appears in instance files. Arbitrary non-negative.
pub type VertexId = u32;
/// Index into the Hamilton order. All internal work is positional.
pub type Pos = u32;

/// A graph presented as a Hamilton cycle (fixed direction) plus chords.
///
/// Immutable after construction; operations are pure and the value can be
/// shared freely across threads.
#[derive(Debug, Clone)]
pub struct HamGraph {
    n: u32,
    ham_order: Vec<VertexId>,
    position: HashMap<VertexId, Pos>,
    /// Canonical chord set keyed by vertex ids, `u < v`. Kept sorted so the
    /// serializer is byte-stable.
    chords: BTreeSet<(VertexId, VertexId)>,
    /// Same set keyed by positions, `p < q`.
    chord_pos: HashSet<(Pos, Pos)>,
    /// Chord partners per position, sorted ascending.
    adj: Vec<Vec<Pos>>,
}

impl HamGraph {
    /// Builds a graph from a Hamilton order and chord list, checking the
    /// structural invariants (permutation order, no cycle-edge chords,
    /// no self-loops, no duplicates).
    pub fn new(ham_order: Vec<VertexId>, chords: Vec<(VertexId, VertexId)>) -> Result<Self> {
        let n = ham_order.len() as u32;
        if n < 3 {
            return Err(Error::Validation(vec![format!(
                "need at least 3 vertices, got {n}"
            )]));
        }
        let mut position = HashMap::with_capacity(ham_order.len());
        for (i, &v) in ham_order.iter().enumerate() {
            if position.insert(v, i as Pos).is_some() {
                return Err(Error::Validation(vec![format!(
                    "duplicate vertex {v} in Hamilton order"
                )]));
            }
        }
        let mut set = BTreeSet::new();
        let mut chord_pos = HashSet::new();
        let mut adj = vec![Vec::new(); n as usize];
        for (a, b) in chords {
            if a == b {
                return Err(Error::Validation(vec![format!("self-loop at {a}")]));
            }
            let pa = *position
                .get(&a)
                .ok_or_else(|| Error::Validation(vec![format!("chord references unknown vertex {a}")]))?;
            let pb = *position
                .get(&b)
                .ok_or_else(|| Error::Validation(vec![format!("chord references unknown vertex {b}")]))?;
            let d = pos_gap(pa, pb, n);
            if d == 1 {
                return Err(Error::Validation(vec![format!(
                    "chord {{{a},{b}}} duplicates a cycle edge"
                )]));
            }
            let key = (a.min(b), a.max(b));
            if !set.insert(key) {
                return Err(Error::Validation(vec![format!("duplicate chord {{{a},{b}}}")]));
            }
            chord_pos.insert((pa.min(pb), pa.max(pb)));
            adj[pa as usize].push(pb);
            adj[pb as usize].push(pa);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(HamGraph {
            n,
            ham_order,
            position,
            chords: set,
            chord_pos,
            adj,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ham_order(&self) -> &[VertexId] {
        &self.ham_order
    }

    pub fn vertex_at(&self, p: Pos) -> VertexId {
        self.ham_order[p as usize]
    }

    pub fn pos_of(&self, v: VertexId) -> Option<Pos> {
        self.position.get(&v).copied()
    }

    /// Chords as canonical vertex-id pairs, sorted.
    pub fn chords(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.chords.iter().copied()
    }

    pub fn chord_count(&self) -> usize {
        self.chords.len()
    }

    pub fn has_chord_pos(&self, p: Pos, q: Pos) -> bool {
        self.chord_pos.contains(&(p.min(q), p.max(q)))
    }

    /// Positions of chord partners of the vertex at position `p`, ascending.
    pub fn chord_partners(&self, p: Pos) -> &[Pos] {
        &self.adj[p as usize]
    }

    /// Number of edges of the shorter cycle arc between two positions.
    pub fn cycle_dist(&self, p: Pos, q: Pos) -> u32 {
        pos_gap(p, q, self.n)
    }

    /// Length of a chord: the shorter of the two paths along the cycle
    /// between its endpoints. Always in `[2, floor(n/2)]`.
    pub fn cycle_chord_length(&self, chord: (VertexId, VertexId)) -> Result<u64> {
        let key = (chord.0.min(chord.1), chord.0.max(chord.1));
        if !self.chords.contains(&key) {
            return Err(Error::Precondition(format!(
                "unknown chord {{{},{}}}",
                chord.0, chord.1
            )));
        }
        let p = self.position[&chord.0];
        let q = self.position[&chord.1];
        Ok(pos_gap(p, q, self.n) as u64)
    }

    /// Canonical text serialization; `load_instance . serialize == identity`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {}\n", self.n, self.chords.len()));
        let order: Vec<String> = self.ham_order.iter().map(|v| v.to_string()).collect();
        out.push_str(&order.join(" "));
        out.push('\n');
        for &(a, b) in &self.chords {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }
}

fn pos_gap(p: Pos, q: Pos, n: u32) -> u32 {
    let d = if p > q { p - q } else { q - p };
    d.min(n - d)
}

/// Parses the instance file format: `n m`, a line with the Hamilton order,
/// then `m` chord lines `u v`. Lines starting with `#` are comments.
pub fn load_instance(text: &str) -> Result<HamGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });

    let (hline, header) = lines
        .next()
        .ok_or(Error::Parse { line: 0, msg: "empty input".into() })?;
    let mut it = header.split_whitespace();
    let n: u32 = parse_tok(it.next(), hline, "vertex count")?;
    let m: usize = parse_tok(it.next(), hline, "chord count")?;
    if it.next().is_some() {
        return Err(Error::Parse { line: hline, msg: "trailing tokens after header".into() });
    }

    let (oline, order_line) = lines
        .next()
        .ok_or(Error::Parse { line: hline, msg: "missing Hamilton order line".into() })?;
    let order: Vec<VertexId> = order_line
        .split_whitespace()
        .map(|t| {
            t.parse::<VertexId>().map_err(|_| Error::Parse {
                line: oline,
                msg: format!("bad vertex id '{t}'"),
            })
        })
        .collect::<Result<_>>()?;
    if order.len() != n as usize {
        return Err(Error::Parse {
            line: oline,
            msg: format!("expected {n} vertices, got {}", order.len()),
        });
    }

    let mut chords = Vec::with_capacity(m);
    for _ in 0..m {
        let (cline, chord_line) = lines
            .next()
            .ok_or(Error::Parse { line: oline, msg: format!("expected {m} chord lines") })?;
        let mut it = chord_line.split_whitespace();
        let a: VertexId = parse_tok(it.next(), cline, "chord endpoint")?;
        let b: VertexId = parse_tok(it.next(), cline, "chord endpoint")?;
        if it.next().is_some() {
            return Err(Error::Parse { line: cline, msg: "trailing tokens on chord line".into() });
        }
        chords.push((a, b));
    }
    if let Some((l, _)) = lines.next() {
        return Err(Error::Parse { line: l, msg: "unexpected extra line".into() });
    }
    HamGraph::new(order, chords)
}

fn parse_tok<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let t = tok.ok_or_else(|| Error::Parse { line, msg: format!("missing {what}") })?;
    t.parse::<T>().map_err(|_| Error::Parse { line, msg: format!("bad {what} '{t}'") })
}

/// Checks instance invariants; with `theorem_grade`, additionally requires
/// minimum degree 3 (the cycle gives 2, so every vertex must touch a chord).
/// Every violated invariant is reported individually.
pub fn validate_instance(g: &HamGraph, theorem_grade: bool) -> Result<()> {
    let mut violations = Vec::new();
    if theorem_grade {
        for p in 0..g.n() {
            if g.chord_partners(p).is_empty() {
                violations.push(format!(
                    "vertex {} has degree 2 (needs a chord)",
                    g.vertex_at(p)
                ));
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(violations))
    }
}

/// Traversal direction along the fixed Hamilton-cycle orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Fwd,
    Bwd,
}

/// A compressed route step: a contiguous cycle arc or a single chord hop.
/// Arc endpoints are inclusive positions; an arc with `from == to` denotes a
/// full wrap around the cycle (`n` edges).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteStep {
    Arc { from: Pos, to: Pos, dir: Dir },
    Chord { from: Pos, to: Pos },
}

impl RouteStep {
    pub fn start(&self) -> Pos {
        match *self {
            RouteStep::Arc { from, .. } | RouteStep::Chord { from, .. } => from,
        }
    }

    pub fn end(&self) -> Pos {
        match *self {
            RouteStep::Arc { to, .. } | RouteStep::Chord { to, .. } => to,
        }
    }
}

/// Compressed path/cycle representation: alternating arcs and chords. Size is
/// proportional to the number of chords used, independent of `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteDescriptor {
    pub steps: Vec<RouteStep>,
    pub closed: bool,
}

impl RouteDescriptor {
    pub fn open(steps: Vec<RouteStep>) -> Self {
        RouteDescriptor { steps, closed: false }
    }

    pub fn closed(steps: Vec<RouteStep>) -> Self {
        RouteDescriptor { steps, closed: true }
    }

    /// The Hamilton cycle itself.
    pub fn full_cycle() -> Self {
        RouteDescriptor::closed(vec![RouteStep::Arc { from: 0, to: 0, dir: Dir::Fwd }])
    }
}

/// A certified length together with the route realizing it.
#[derive(Debug, Clone)]
pub struct Witness {
    pub length: u64,
    pub route: RouteDescriptor,
}

/// Expands a route to its explicit position sequence, checking step
/// connectivity, chord membership, and simplicity. This is the single trusted
/// checker: every length the pipeline reports passes through here.
pub fn expand_route(g: &HamGraph, r: &RouteDescriptor) -> Result<Vec<Pos>> {
    let n = g.n();
    if r.steps.is_empty() {
        return Err(Error::InvalidRoute("route has no steps".into()));
    }
    for s in &r.steps {
        if s.start() >= n || s.end() >= n {
            return Err(Error::InvalidRoute(format!(
                "step references position out of range (n={n})"
            )));
        }
    }
    let start = r.steps[0].start();
    let mut seq: Vec<Pos> = vec![start];
    let mut visited = vec![false; n as usize];
    visited[start as usize] = true;

    let total_steps = r.steps.len();
    for (si, step) in r.steps.iter().enumerate() {
        let cur = *seq.last().unwrap();
        if step.start() != cur {
            return Err(Error::InvalidRoute(format!(
                "step {si} starts at {} but route is at {cur}",
                step.start()
            )));
        }
        let last_step = si + 1 == total_steps;
        match *step {
            RouteStep::Chord { from, to } => {
                if !g.has_chord_pos(from, to) {
                    return Err(Error::InvalidRoute(format!(
                        "chord step ({},{}) not in chord set",
                        g.vertex_at(from),
                        g.vertex_at(to)
                    )));
                }
                push_vertex(&mut seq, &mut visited, to, start, last_step, r.closed)?;
            }
            RouteStep::Arc { from, to, dir } => {
                let edges = match dir {
                    Dir::Fwd => {
                        let d = (to + n - from) % n;
                        if d == 0 { n } else { d }
                    }
                    Dir::Bwd => {
                        let d = (from + n - to) % n;
                        if d == 0 { n } else { d }
                    }
                };
                let mut p = from;
                for k in 0..edges {
                    p = match dir {
                        Dir::Fwd => (p + 1) % n,
                        Dir::Bwd => (p + n - 1) % n,
                    };
                    let final_vertex = last_step && k + 1 == edges;
                    push_vertex(&mut seq, &mut visited, p, start, final_vertex, r.closed)?;
                }
            }
        }
    }

    let end = *seq.last().unwrap();
    if r.closed {
        if end != start {
            return Err(Error::InvalidRoute(format!(
                "route flagged closed but ends at {} (started at {})",
                g.vertex_at(end),
                g.vertex_at(start)
            )));
        }
        if seq.len() < 4 {
            return Err(Error::InvalidRoute("closed route shorter than 3 edges".into()));
        }
    } else if end == start && seq.len() > 1 {
        return Err(Error::InvalidRoute("open route returns to its start".into()));
    }
    Ok(seq)
}

fn push_vertex(
    seq: &mut Vec<Pos>,
    visited: &mut [bool],
    p: Pos,
    start: Pos,
    final_vertex: bool,
    closed: bool,
) -> Result<()> {
    if visited[p as usize] {
        if closed && final_vertex && p == start {
            seq.push(p);
            return Ok(());
        }
        return Err(Error::InvalidRoute(format!("revisited vertex position {p}")));
    }
    visited[p as usize] = true;
    seq.push(p);
    Ok(())
}

/// Realizes a route into a [`Witness`], verifying simplicity and closure and
/// returning the exact edge count.
pub fn realize_route(g: &HamGraph, r: &RouteDescriptor) -> Result<Witness> {
    let seq = expand_route(g, r)?;
    Ok(Witness {
        length: (seq.len() - 1) as u64,
        route: r.clone(),
    })
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dir::Fwd => write!(f, "+"),
            Dir::Bwd => write!(f, "-"),
        }
    }
}
