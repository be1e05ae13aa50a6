//! Section-pairs: two oriented vertex-disjoint paths with chords between
//! them. All structural work happens in side-index coordinates; each side
//! carries the underlying graph positions so any path found here lifts to a
//! graph route in one pass.

use std::collections::HashMap;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::graph::{Dir, HamGraph, Pos, RouteDescriptor, RouteStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    X,
    Y,
}

/// Relation between two distinct chords of one section-pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChordRel {
    Parallel,
    Interlacing,
    SharesVertex,
}

/// Classifies two chords given as `(xi, yi)` side-index pairs.
pub fn classify_pair(a: (u32, u32), b: (u32, u32)) -> ChordRel {
    if a.0 == b.0 || a.1 == b.1 {
        ChordRel::SharesVertex
    } else if (a.0 < b.0) == (a.1 < b.1) {
        ChordRel::Parallel
    } else {
        ChordRel::Interlacing
    }
}

/// Two oriented disjoint paths X, Y with chords between them. Index 0 on each
/// side is the top. Chords are `(xi, yi)` pairs of side indices, sorted and
/// deduplicated.
#[derive(Debug, Clone)]
pub struct SectionPair {
    x: Vec<Pos>,
    y: Vec<Pos>,
    chords: Vec<(u32, u32)>,
}

impl SectionPair {
    /// Builds a pair from explicit side position lists. Sides must be
    /// vertex-disjoint; chord indices must be in range.
    pub fn from_sides(x: Vec<Pos>, y: Vec<Pos>, mut chords: Vec<(u32, u32)>) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::Precondition("empty section side".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &p in x.iter().chain(y.iter()) {
            if !seen.insert(p) {
                return Err(Error::Precondition(format!(
                    "sides share vertex position {p}"
                )));
            }
        }
        chords.sort_unstable();
        chords.dedup();
        for &(xi, yi) in &chords {
            if xi as usize >= x.len() || yi as usize >= y.len() {
                return Err(Error::Precondition(format!(
                    "chord ({xi},{yi}) out of side range"
                )));
            }
        }
        Ok(SectionPair { x, y, chords })
    }

    pub fn x_len(&self) -> u32 {
        self.x.len() as u32
    }

    pub fn y_len(&self) -> u32 {
        self.y.len() as u32
    }

    pub fn x_positions(&self) -> &[Pos] {
        &self.x
    }

    pub fn y_positions(&self) -> &[Pos] {
        &self.y
    }

    pub fn side_pos(&self, side: Side, idx: u32) -> Pos {
        match side {
            Side::X => self.x[idx as usize],
            Side::Y => self.y[idx as usize],
        }
    }

    pub fn chords(&self) -> &[(u32, u32)] {
        &self.chords
    }

    pub fn chord(&self, ci: usize) -> (u32, u32) {
        self.chords[ci]
    }

    pub fn chord_count(&self) -> usize {
        self.chords.len()
    }

    pub fn find_chord(&self, xi: u32, yi: u32) -> Option<usize> {
        self.chords.binary_search(&(xi, yi)).ok()
    }

    /// Chord length within the pair: index distance from both tops. One less
    /// than the length of the chord's trivial path.
    pub fn pair_chord_length(&self, ci: usize) -> Result<u64> {
        let &(xi, yi) = self
            .chords
            .get(ci)
            .ok_or_else(|| Error::Precondition(format!("unknown chord index {ci}")))?;
        Ok(xi as u64 + yi as u64)
    }

    pub fn classify_chords(&self, c1: usize, c2: usize) -> ChordRel {
        assert_ne!(c1, c2, "classify_chords needs distinct chords");
        classify_pair(self.chords[c1], self.chords[c2])
    }

    /// The trivial path of a chord: X[top..x], the chord, Y[y..top].
    pub fn trivial_path(&self, ci: usize) -> PairRoute {
        let (xi, yi) = self.chords[ci];
        let mut steps = Vec::with_capacity(3);
        if xi > 0 {
            steps.push(PairStep::Side { side: Side::X, from: 0, to: xi });
        }
        steps.push(PairStep::Chord(ci));
        if yi > 0 {
            steps.push(PairStep::Side { side: Side::Y, from: yi, to: 0 });
        }
        PairRoute { steps }
    }

    /// Restricts to index ranges, optionally reversing a side's orientation.
    /// Chords with an endpoint outside the ranges are dropped; the rest are
    /// re-indexed.
    pub fn subpair(
        &self,
        x_range: Range<u32>,
        y_range: Range<u32>,
        flip_x: bool,
        flip_y: bool,
    ) -> Result<SectionPair> {
        if x_range.is_empty() || y_range.is_empty() {
            return Err(Error::Precondition("empty subpair range".into()));
        }
        if x_range.end > self.x_len() || y_range.end > self.y_len() {
            return Err(Error::Precondition("subpair range out of bounds".into()));
        }
        let mut x: Vec<Pos> = self.x[x_range.start as usize..x_range.end as usize].to_vec();
        let mut y: Vec<Pos> = self.y[y_range.start as usize..y_range.end as usize].to_vec();
        if flip_x {
            x.reverse();
        }
        if flip_y {
            y.reverse();
        }
        let remap = |idx: u32, r: &Range<u32>, flip: bool| -> u32 {
            if flip {
                r.end - 1 - idx
            } else {
                idx - r.start
            }
        };
        let chords = self
            .chords
            .iter()
            .filter(|&&(xi, yi)| x_range.contains(&xi) && y_range.contains(&yi))
            .map(|&(xi, yi)| (remap(xi, &x_range, flip_x), remap(yi, &y_range, flip_y)))
            .collect();
        SectionPair::from_sides(x, y, chords)
    }

    /// Keeps at most one chord per x-index, choosing by the given key
    /// (smaller wins). The y-side may retain multiplicity.
    pub fn prune_matching_x_by<K: Ord>(&self, key: impl Fn(usize) -> K) -> SectionPair {
        let mut best: HashMap<u32, usize> = HashMap::new();
        for ci in 0..self.chords.len() {
            let (xi, _) = self.chords[ci];
            match best.entry(xi) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(ci);
                }
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    if key(ci) < key(*e.get()) {
                        e.insert(ci);
                    }
                }
            }
        }
        let chords: Vec<(u32, u32)> = best.values().map(|&ci| self.chords[ci]).collect();
        SectionPair {
            x: self.x.clone(),
            y: self.y.clone(),
            chords: {
                let mut c = chords;
                c.sort_unstable();
                c
            },
        }
    }

    /// Default priority: smallest pair length, then lexicographic `(xi, yi)`.
    pub fn prune_matching_x(&self) -> SectionPair {
        self.prune_matching_x_by(|ci| {
            let (xi, yi) = self.chords[ci];
            (xi as u64 + yi as u64, xi, yi)
        })
    }

    /// True when no x-index carries two chords.
    pub fn is_x_matching(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.chords.iter().all(|&(xi, _)| seen.insert(xi))
    }

    pub fn max_degree(&self) -> u64 {
        let mut dx = vec![0u64; self.x.len()];
        let mut dy = vec![0u64; self.y.len()];
        for &(xi, yi) in &self.chords {
            dx[xi as usize] += 1;
            dy[yi as usize] += 1;
        }
        dx.iter().chain(dy.iter()).copied().max().unwrap_or(0)
    }

    /// Indices of chords whose endpoints fall inside both ranges.
    pub fn chords_in(&self, x_range: &Range<u32>, y_range: &Range<u32>) -> Vec<usize> {
        (0..self.chords.len())
            .filter(|&ci| {
                let (xi, yi) = self.chords[ci];
                x_range.contains(&xi) && y_range.contains(&yi)
            })
            .collect()
    }

    /// Keeps only the chords at the given indices.
    pub fn restrict_chords(&self, keep: &[usize]) -> SectionPair {
        let mut chords: Vec<(u32, u32)> = keep.iter().map(|&ci| self.chords[ci]).collect();
        chords.sort_unstable();
        chords.dedup();
        SectionPair { x: self.x.clone(), y: self.y.clone(), chords }
    }
}

/// Builds a section-pair from two cycle arcs of a host graph. Chords are all
/// graph chords with one endpoint per arc that pass `chord_filter`.
pub fn make_section_pair(
    g: &HamGraph,
    x_arc: (Pos, Pos, Dir),
    y_arc: (Pos, Pos, Dir),
    chord_filter: impl Fn(Pos, Pos) -> bool,
) -> Result<SectionPair> {
    let x = expand_arc(g, x_arc);
    let y = expand_arc(g, y_arc);
    let xset: std::collections::HashSet<Pos> = x.iter().copied().collect();
    for &p in &y {
        if xset.contains(&p) {
            return Err(Error::Precondition(format!(
                "arcs overlap at position {p}"
            )));
        }
    }
    let y_index: HashMap<Pos, u32> = y.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
    let mut chords = Vec::new();
    for (xi, &px) in x.iter().enumerate() {
        for &py in g.chord_partners(px) {
            if let Some(&yi) = y_index.get(&py) {
                if chord_filter(px, py) {
                    chords.push((xi as u32, yi));
                }
            }
        }
    }
    SectionPair::from_sides(x, y, chords)
}

fn expand_arc(g: &HamGraph, (from, to, dir): (Pos, Pos, Dir)) -> Vec<Pos> {
    let n = g.n();
    let edges = match dir {
        Dir::Fwd => (to + n - from) % n,
        Dir::Bwd => (from + n - to) % n,
    };
    let mut out = Vec::with_capacity(edges as usize + 1);
    let mut p = from;
    out.push(p);
    for _ in 0..edges {
        p = match dir {
            Dir::Fwd => (p + 1) % n,
            Dir::Bwd => (p + n - 1) % n,
        };
        out.push(p);
    }
    out
}

/// A step of a path expressed in side-index coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStep {
    /// Walk along one side between two indices (inclusive, either direction).
    Side { side: Side, from: u32, to: u32 },
    /// Cross the chord with this index.
    Chord(usize),
}

/// A path inside a section-pair, as alternating side walks and chord hops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRoute {
    pub steps: Vec<PairStep>,
}

/// A side-coordinate vertex.
pub type PairVertex = (Side, u32);

impl PairRoute {
    pub fn new(steps: Vec<PairStep>) -> Self {
        PairRoute { steps }
    }

    /// Concatenates two routes sharing an endpoint vertex.
    pub fn join(&self, other: &PairRoute) -> PairRoute {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().copied());
        PairRoute { steps }
    }

    /// The route traversed in the opposite direction.
    pub fn reversed(&self) -> PairRoute {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| match *s {
                PairStep::Side { side, from, to } => PairStep::Side { side, from: to, to: from },
                PairStep::Chord(ci) => PairStep::Chord(ci),
            })
            .collect();
        PairRoute { steps }
    }

    fn step_ends(&self, pair: &SectionPair, s: &PairStep) -> (PairVertex, PairVertex) {
        match *s {
            PairStep::Side { side, from, to } => ((side, from), (side, to)),
            PairStep::Chord(ci) => {
                let (xi, yi) = pair.chord(ci);
                ((Side::X, xi), (Side::Y, yi))
            }
        }
    }

    /// Expands to the explicit side-coordinate vertex sequence, verifying
    /// index bounds, connectivity, and simplicity.
    pub fn expand(&self, pair: &SectionPair) -> Result<Vec<PairVertex>> {
        if self.steps.is_empty() {
            return Err(Error::InvalidRoute("pair route has no steps".into()));
        }
        let side_len = |side: Side| match side {
            Side::X => pair.x_len(),
            Side::Y => pair.y_len(),
        };
        // Chord steps are undirected; orient each step to continue the walk.
        let mut seq: Vec<PairVertex> = Vec::new();
        let mut seen_x = vec![false; pair.x_len() as usize];
        let mut seen_y = vec![false; pair.y_len() as usize];
        let mut visit = move |(side, i): PairVertex| -> bool {
            let slot = match side {
                Side::X => &mut seen_x[i as usize],
                Side::Y => &mut seen_y[i as usize],
            };
            let fresh = !*slot;
            *slot = true;
            fresh
        };
        for (si, step) in self.steps.iter().enumerate() {
            if let PairStep::Side { side, from, to } = *step {
                if from >= side_len(side) || to >= side_len(side) {
                    return Err(Error::InvalidRoute(format!(
                        "side step {si} out of range"
                    )));
                }
            }
            if let PairStep::Chord(ci) = *step {
                if ci >= pair.chord_count() {
                    return Err(Error::InvalidRoute(format!("chord index {ci} out of range")));
                }
            }
            let (a, b) = self.step_ends(pair, step);
            let (start, end) = if seq.is_empty() {
                // First step: orient so later steps can connect. A lone step
                // keeps its natural order.
                if self.steps.len() > 1 {
                    let (na, nb) = self.step_ends(pair, &self.steps[1]);
                    if b == na || b == nb {
                        (a, b)
                    } else {
                        (b, a)
                    }
                } else {
                    (a, b)
                }
            } else {
                let cur = *seq.last().unwrap();
                if a == cur {
                    (a, b)
                } else if b == cur {
                    (b, a)
                } else {
                    return Err(Error::InvalidRoute(format!(
                        "step {si} does not continue the walk"
                    )));
                }
            };
            if seq.is_empty() {
                visit(start);
                seq.push(start);
            }
            match *step {
                PairStep::Chord(_) => {
                    if !visit(end) {
                        return Err(Error::InvalidRoute("revisited pair vertex".into()));
                    }
                    seq.push(end);
                }
                PairStep::Side { side, .. } => {
                    let (_, i0) = start;
                    let (_, i1) = end;
                    let mut i = i0;
                    while i != i1 {
                        i = if i1 > i0 { i + 1 } else { i - 1 };
                        if !visit((side, i)) {
                            return Err(Error::InvalidRoute("revisited pair vertex".into()));
                        }
                        seq.push((side, i));
                    }
                }
            }
        }
        Ok(seq)
    }

    /// Edge count of the expanded route.
    pub fn length(&self, pair: &SectionPair) -> Result<u64> {
        Ok(self.expand(pair)?.len() as u64 - 1)
    }

    pub fn endpoints(&self, pair: &SectionPair) -> Result<(PairVertex, PairVertex)> {
        let seq = self.expand(pair)?;
        Ok((seq[0], *seq.last().unwrap()))
    }

    /// Lifts the route to a graph-level [`RouteDescriptor`] through the
    /// pair's origin positions. Consecutive cycle positions merge into arcs;
    /// every other hop becomes a chord step.
    pub fn lift(&self, pair: &SectionPair, g: &HamGraph) -> Result<RouteDescriptor> {
        let seq = self.expand(pair)?;
        let positions: Vec<Pos> = seq.iter().map(|&(s, i)| pair.side_pos(s, i)).collect();
        Ok(compress_positions(&positions, g.n()))
    }
}

/// Compresses an explicit position walk into arc/chord steps. Hops between
/// cycle-adjacent positions become arcs (chords never duplicate cycle edges,
/// so the classification is unambiguous).
pub fn compress_positions(positions: &[Pos], n: u32) -> RouteDescriptor {
    let mut steps: Vec<RouteStep> = Vec::new();
    let mut i = 0;
    while i + 1 < positions.len() {
        let p = positions[i];
        let q = positions[i + 1];
        if (p + 1) % n == q || (q + 1) % n == p {
            let dir = if (p + 1) % n == q { Dir::Fwd } else { Dir::Bwd };
            let mut j = i + 1;
            while j + 1 < positions.len() {
                let a = positions[j];
                let b = positions[j + 1];
                let cont = match dir {
                    Dir::Fwd => (a + 1) % n == b,
                    Dir::Bwd => (b + 1) % n == a,
                };
                if cont {
                    j += 1;
                } else {
                    break;
                }
            }
            steps.push(RouteStep::Arc { from: p, to: positions[j], dir });
            i = j;
        } else {
            steps.push(RouteStep::Chord { from: p, to: q });
            i += 1;
        }
    }
    RouteDescriptor::open(steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectionMode {
    Parallel,
    Interlacing,
}

/// An ordered list of disjoint subsection pairs inside a parent pair.
/// Pairs are listed bottom-to-top on the x-side (larger indices first).
#[derive(Debug, Clone)]
pub struct PairCollection {
    pub pairs: Vec<(Range<u32>, Range<u32>)>,
    pub mode: CollectionMode,
}

impl PairCollection {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Verifies the ordering invariants against a parent pair.
    pub fn check(&self, parent: &SectionPair) -> Result<()> {
        for (xr, yr) in &self.pairs {
            if xr.end > parent.x_len() || yr.end > parent.y_len() {
                return Err(Error::Precondition("collection range out of bounds".into()));
            }
            if xr.is_empty() || yr.is_empty() {
                return Err(Error::Precondition("collection has empty range".into()));
            }
        }
        for w in self.pairs.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            // Bottom-to-top on X: earlier pair sits strictly below.
            if x1.end > x0.start {
                return Err(Error::Precondition(
                    "x-ranges not disjoint bottom-to-top".into(),
                ));
            }
            match self.mode {
                CollectionMode::Parallel => {
                    if y1.end > y0.start {
                        return Err(Error::Precondition(
                            "parallel collection: y-ranges not bottom-to-top".into(),
                        ));
                    }
                }
                CollectionMode::Interlacing => {
                    if y0.end > y1.start {
                        return Err(Error::Precondition(
                            "interlacing collection: y-ranges not top-to-bottom".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_instance;

    fn grid_pair(lx: u32, ly: u32, chords: Vec<(u32, u32)>) -> SectionPair {
        let x: Vec<Pos> = (0..lx).collect();
        let y: Vec<Pos> = (lx..lx + ly).collect();
        SectionPair::from_sides(x, y, chords).unwrap()
    }

    #[test]
    fn chord_length_is_index_sum() {
        let sp = grid_pair(6, 6, vec![(2, 3), (0, 0)]);
        let ci = sp.find_chord(2, 3).unwrap();
        assert_eq!(sp.pair_chord_length(ci).unwrap(), 5);
        let c0 = sp.find_chord(0, 0).unwrap();
        assert_eq!(sp.pair_chord_length(c0).unwrap(), 0);
    }

    #[test]
    fn classification_cases() {
        assert_eq!(classify_pair((1, 1), (2, 2)), ChordRel::Parallel);
        assert_eq!(classify_pair((1, 2), (2, 1)), ChordRel::Interlacing);
        assert_eq!(classify_pair((1, 1), (2, 1)), ChordRel::SharesVertex);
        assert_eq!(classify_pair((2, 2), (1, 1)), ChordRel::Parallel);
    }

    #[test]
    fn trivial_path_length() {
        let sp = grid_pair(6, 6, vec![(2, 3), (0, 0)]);
        let ci = sp.find_chord(2, 3).unwrap();
        assert_eq!(sp.trivial_path(ci).length(&sp).unwrap(), 6);
        let c0 = sp.find_chord(0, 0).unwrap();
        assert_eq!(sp.trivial_path(c0).length(&sp).unwrap(), 1);
    }

    #[test]
    fn subpair_identity_and_flip() {
        let sp = grid_pair(5, 5, vec![(1, 1), (2, 4), (4, 2)]);
        let id = sp.subpair(0..5, 0..5, false, false).unwrap();
        assert_eq!(id.chords(), sp.chords());
        let flipped = sp.subpair(0..5, 0..5, false, true).unwrap();
        let back = flipped.subpair(0..5, 0..5, false, true).unwrap();
        assert_eq!(back.chords(), sp.chords());
        // Flip swaps parallel and interlacing for vertex-disjoint chords.
        let a = sp.find_chord(1, 1).unwrap();
        let b = sp.find_chord(2, 4).unwrap();
        let rel = sp.classify_chords(a, b);
        let fa = flipped.find_chord(1, 3).unwrap();
        let fb = flipped.find_chord(2, 0).unwrap();
        let frel = flipped.classify_chords(fa, fb);
        assert_eq!(rel, ChordRel::Parallel);
        assert_eq!(frel, ChordRel::Interlacing);
    }

    #[test]
    fn subpair_preserves_length_offsets() {
        let sp = grid_pair(8, 8, vec![(3, 4), (5, 6)]);
        let sub = sp.subpair(2..8, 3..8, false, false).unwrap();
        for &(xi, yi) in sub.chords() {
            let child = xi as u64 + yi as u64;
            assert_eq!(child + 2 + 3, (xi + 2) as u64 + (yi + 3) as u64);
        }
        assert_eq!(sub.chord_count(), 2);
    }

    #[test]
    fn prune_keeps_one_chord_per_x() {
        let sp = grid_pair(4, 6, vec![(1, 0), (1, 3), (1, 5), (2, 2)]);
        let pruned = sp.prune_matching_x();
        assert_eq!(pruned.chord_count(), 2);
        assert!(pruned.is_x_matching());
        assert!(pruned.find_chord(1, 0).is_some());
        let again = pruned.prune_matching_x();
        assert_eq!(again.chords(), pruned.chords());
    }

    #[test]
    fn make_pair_from_block_halves() {
        let g = load_instance("8 2\n0 1 2 3 4 5 6 7\n1 6\n2 5\n").unwrap();
        // Block = whole cycle: X = 0..4 (top at 0), Y = 7..4 (top at 7).
        let sp = make_section_pair(&g, (0, 3, Dir::Fwd), (7, 4, Dir::Bwd), |_, _| true).unwrap();
        assert_eq!(sp.x_len(), 4);
        assert_eq!(sp.y_len(), 4);
        assert_eq!(sp.chord_count(), 2);
        // Chord {1,6}: x index 1, y index 1 (position 6 is one below the y-top 7).
        assert!(sp.find_chord(1, 1).is_some());
        assert!(sp.find_chord(2, 2).is_some());
        let overlap = make_section_pair(&g, (0, 4, Dir::Fwd), (7, 4, Dir::Bwd), |_, _| true);
        assert!(overlap.is_err());
    }

    #[test]
    fn chain_block_pair_chord_count() {
        // One complete-bipartite block split at its midpoint: the k(k-2)
        // within-block chords all cross the halves.
        let g = crate::testbed::gen_chain_extremal(24, 3).unwrap();
        let sp = make_section_pair(&g, (0, 2, Dir::Fwd), (5, 3, Dir::Bwd), |_, _| true).unwrap();
        assert_eq!(sp.chord_count(), 3);
    }

    #[test]
    fn lift_trivial_path_realizes() {
        let g = load_instance("8 2\n0 1 2 3 4 5 6 7\n1 6\n2 5\n").unwrap();
        let sp = make_section_pair(&g, (0, 3, Dir::Fwd), (7, 4, Dir::Bwd), |_, _| true).unwrap();
        for ci in 0..sp.chord_count() {
            let tp = sp.trivial_path(ci);
            let lifted = tp.lift(&sp, &g).unwrap();
            let w = crate::graph::realize_route(&g, &lifted).unwrap();
            assert_eq!(w.length, sp.pair_chord_length(ci).unwrap() + 1);
        }
    }

    #[test]
    fn collection_check_orders() {
        let sp = grid_pair(10, 10, vec![]);
        let par = PairCollection {
            pairs: vec![(7..10, 6..9), (3..6, 2..5)],
            mode: CollectionMode::Parallel,
        };
        assert!(par.check(&sp).is_ok());
        let inter = PairCollection {
            pairs: vec![(7..10, 1..4), (3..6, 5..8)],
            mode: CollectionMode::Interlacing,
        };
        assert!(inter.check(&sp).is_ok());
        let bad = PairCollection {
            pairs: vec![(3..6, 2..5), (7..10, 6..9)],
            mode: CollectionMode::Parallel,
        };
        assert!(bad.check(&sp).is_err());
    }
}
