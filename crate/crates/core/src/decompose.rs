//! Structural decomposition of a chord-rich section-pair: monotone chord
//! families, the segment-partition/matching initial split, the recursive
//! bisection into heavy-vertex or interlacer pairs, and the greedy
//! extraction of mutually interlacing chord pairs.

use std::ops::Range;

use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::section::{classify_pair, ChordRel, CollectionMode, PairCollection, SectionPair, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneRelation {
    AllParallel,
    AllInterlacing,
}

/// Chord indices (into the pair) that are pairwise parallel or pairwise
/// interlacing, sorted by x-index from the top.
#[derive(Debug, Clone)]
pub struct MonotoneFamily {
    pub chords: Vec<usize>,
    pub relation: MonotoneRelation,
}

/// Longest strictly increasing subsequence via patience sorting; returns the
/// positions of one witness subsequence.
fn lis_indices(vals: &[u64]) -> Vec<usize> {
    let mut tails: Vec<usize> = Vec::new();
    let mut parent: Vec<Option<usize>> = vec![None; vals.len()];
    for i in 0..vals.len() {
        let pos = tails.partition_point(|&j| vals[j] < vals[i]);
        if pos > 0 {
            parent[i] = Some(tails[pos - 1]);
        }
        if pos == tails.len() {
            tails.push(i);
        } else {
            tails[pos] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        out.push(i);
        cur = parent[i];
    }
    out.reverse();
    out
}

/// Finds `k` chords that are pairwise parallel or pairwise interlacing among
/// at least `(k-1)^2 + 1` vertex-disjoint chords, via longest increasing or
/// decreasing subsequence of the y-order indexed by x-order.
pub fn monotone_chord_family(
    sp: &SectionPair,
    chord_indices: &[usize],
    k: usize,
) -> Result<MonotoneFamily> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let mut xs = std::collections::HashSet::new();
    let mut ys = std::collections::HashSet::new();
    for &ci in chord_indices {
        let (xi, yi) = sp.chord(ci);
        if !xs.insert(xi) || !ys.insert(yi) {
            return Err(Error::Precondition(format!(
                "chords share a vertex at ({xi},{yi})"
            )));
        }
    }
    let mut sorted: Vec<usize> = chord_indices.to_vec();
    sorted.sort_by_key(|&ci| sp.chord(ci).0);
    let yvals: Vec<u64> = sorted.iter().map(|&ci| sp.chord(ci).1 as u64).collect();

    let inc = lis_indices(&yvals);
    if inc.len() >= k {
        return Ok(MonotoneFamily {
            chords: inc[..k].iter().map(|&i| sorted[i]).collect(),
            relation: MonotoneRelation::AllParallel,
        });
    }
    let neg: Vec<u64> = yvals.iter().map(|&v| u64::MAX - v).collect();
    let dec = lis_indices(&neg);
    if dec.len() >= k {
        return Ok(MonotoneFamily {
            chords: dec[..k].iter().map(|&i| sorted[i]).collect(),
            relation: MonotoneRelation::AllInterlacing,
        });
    }
    // With (k-1)^2 + 1 vertex-disjoint chords a run of length k always
    // exists, so reaching this point means the input was too small.
    assert!(chord_indices.len() < (k - 1) * (k - 1) + 1);
    Err(Error::Precondition(format!(
        "need at least {} chords for k = {k}, got {} with no monotone run",
        (k - 1) * (k - 1) + 1,
        chord_indices.len()
    )))
}

fn degrees(sp: &SectionPair, chords: &[usize]) -> (Vec<u64>, Vec<u64>) {
    let mut dx = vec![0u64; sp.x_len() as usize];
    let mut dy = vec![0u64; sp.y_len() as usize];
    for &ci in chords {
        let (xi, yi) = sp.chord(ci);
        dx[xi as usize] += 1;
        dy[yi as usize] += 1;
    }
    (dx, dy)
}

/// Partitions one side into minimal segments each touching at least
/// `m / (10 k^2)` chords (and, by the degree precondition, at most
/// `m / (5 k^2)`). Returns the complete segment ranges; the final partial one
/// touches fewer chords and is flagged.
fn greedy_segments(deg: &[u64], m: u64, k: u64) -> (Vec<Range<u32>>, Option<Range<u32>>) {
    let mut segs = Vec::new();
    let mut start = 0u32;
    let mut cum = 0u64;
    for (i, &d) in deg.iter().enumerate() {
        cum += d;
        // cum >= m / (10 k^2), in integers.
        if cum * 10 * k * k >= m {
            segs.push(start..(i as u32 + 1));
            start = i as u32 + 1;
            cum = 0;
        }
    }
    let partial = if start < deg.len() as u32 {
        Some(start..deg.len() as u32)
    } else {
        None
    };
    (segs, partial)
}

/// Kuhn's augmenting-path maximum matching on a bipartite adjacency list.
fn max_matching(adj: &[Vec<usize>], right_len: usize) -> Vec<(usize, usize)> {
    let mut matched_right: Vec<Option<usize>> = vec![None; right_len];

    fn try_augment(
        v: usize,
        adj: &[Vec<usize>],
        used: &mut [bool],
        matched_right: &mut [Option<usize>],
    ) -> bool {
        for &to in &adj[v] {
            if used[to] {
                continue;
            }
            used[to] = true;
            if matched_right[to].is_none()
                || try_augment(matched_right[to].unwrap(), adj, used, matched_right)
            {
                matched_right[to] = Some(v);
                return true;
            }
        }
        false
    }

    for v in 0..adj.len() {
        let mut used = vec![false; right_len];
        try_augment(v, adj, &mut used, &mut matched_right);
    }
    let mut out = Vec::new();
    for (r, l) in matched_right.iter().enumerate() {
        if let Some(l) = l {
            out.push((*l, r));
        }
    }
    out.sort_unstable();
    out
}

/// Carves a section-pair with `m` chords into `k` disjoint subsection pairs,
/// all parallel or all interlacing, each holding at least `c_split * m / k^4`
/// chords. Follows the proof: greedy side partition, an auxiliary bipartite
/// graph over segments, an exact maximum matching, then a monotone family
/// over one representative chord per matched segment pair.
pub fn initial_split(sp: &SectionPair, k: u32, cfg: &EngineConfig) -> Result<PairCollection> {
    let m = sp.chord_count() as u64;
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    if m < cfg.min_m {
        return Err(Error::Precondition(format!(
            "need at least {} chords, got {m}",
            cfg.min_m
        )));
    }
    let all: Vec<usize> = (0..sp.chord_count()).collect();
    let (dx, dy) = degrees(sp, &all);
    let k64 = k as u64;
    let limit = m as f64 / (10.0 * (k64 * k64) as f64);
    for (side, deg) in [(Side::X, &dx), (Side::Y, &dy)] {
        for (i, &d) in deg.iter().enumerate() {
            if d * 10 * k64 * k64 > m {
                return Err(Error::HeavyVertex { side, index: i as u32, degree: d, limit });
            }
        }
    }

    let (x_segs, _x_partial) = greedy_segments(&dx, m, k64);
    let (y_segs, y_partial) = greedy_segments(&dy, m, k64);
    let mut y_all = y_segs;
    if let Some(p) = y_partial {
        y_all.push(p);
    }

    // Auxiliary bipartite graph: segment pair (i, j) is an edge when it holds
    // at least c_split * m / k^4 chords.
    let edge_floor = (cfg.c_split * m as f64 / (k64 * k64 * k64 * k64) as f64).max(1.0);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); x_segs.len()];
    let mut counts: Vec<Vec<u64>> = vec![vec![0; y_all.len()]; x_segs.len()];
    for ci in 0..sp.chord_count() {
        let (xi, yi) = sp.chord(ci);
        let si = x_segs.iter().position(|r| r.contains(&xi));
        let sj = y_all.iter().position(|r| r.contains(&yi));
        if let (Some(si), Some(sj)) = (si, sj) {
            counts[si][sj] += 1;
        }
    }
    for si in 0..x_segs.len() {
        for sj in 0..y_all.len() {
            if counts[si][sj] as f64 >= edge_floor {
                adj[si].push(sj);
            }
        }
    }

    let matching = max_matching(&adj, y_all.len());
    let needed = (k * k) as usize;
    if crate::verbose() && (matching.len() as f64) < cfg.c_hall * x_segs.len() as f64 {
        eprintln!(
            "initial_split: matching {} below c_hall * s = {:.1}",
            matching.len(),
            cfg.c_hall * x_segs.len() as f64
        );
    }
    if matching.len() < needed {
        return Err(Error::MatchingTooSmall { found: matching.len(), needed });
    }

    // One representative chord per matched segment pair; the segments are
    // disjoint so representatives are vertex-disjoint.
    let mut reps = Vec::with_capacity(matching.len());
    let mut rep_to_segs = std::collections::HashMap::new();
    for &(si, sj) in &matching {
        let mut best: Option<usize> = None;
        for ci in 0..sp.chord_count() {
            let (xi, yi) = sp.chord(ci);
            if x_segs[si].contains(&xi) && y_all[sj].contains(&yi) {
                if best.map_or(true, |b| sp.chord(ci) < sp.chord(b)) {
                    best = Some(ci);
                }
            }
        }
        let ci = best.expect("matched segment pair has a chord");
        reps.push(ci);
        rep_to_segs.insert(ci, (si, sj));
    }

    let fam = monotone_chord_family(sp, &reps, k as usize)?;
    let mode = match fam.relation {
        MonotoneRelation::AllParallel => CollectionMode::Parallel,
        MonotoneRelation::AllInterlacing => CollectionMode::Interlacing,
    };
    let mut pairs: Vec<(Range<u32>, Range<u32>)> = fam
        .chords
        .iter()
        .map(|ci| {
            let (si, sj) = rep_to_segs[ci];
            (x_segs[si].clone(), y_all[sj].clone())
        })
        .collect();
    // Bottom-to-top on X: larger indices first.
    pairs.sort_by(|a, b| b.0.start.cmp(&a.0.start));
    let coll = PairCollection { pairs, mode };
    coll.check(sp)?;
    Ok(coll)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitCase {
    HighDegreeVertex,
    InterlacerChord,
}

#[derive(Debug, Clone)]
pub enum PairEvidence {
    /// A vertex incident to at least `e / (6 log m)` chords of its pair.
    Vertex { side: Side, index: u32, degree: u64 },
    /// A chord interlacing at least `e / (6 log m)` chords of its pair.
    Chord { index: usize, interlaced: u64 },
}

#[derive(Debug, Clone)]
pub struct SplitPair {
    pub x_range: Range<u32>,
    pub y_range: Range<u32>,
    /// Chord indices of the parent pair that live inside this pair.
    pub chords: Vec<usize>,
    pub evidence: PairEvidence,
    /// Length of the binary split string that produced this pair.
    pub depth: u32,
}

#[derive(Debug, Clone)]
pub struct SplitOutcome {
    /// Kept pairs, bottom-to-top; the ranges always form a parallel collection.
    pub pairs: Vec<SplitPair>,
    pub case: SplitCase,
    /// Total chords over the kept pairs.
    pub kept_chords: u64,
}

impl SplitOutcome {
    pub fn collection(&self) -> PairCollection {
        PairCollection {
            pairs: self
                .pairs
                .iter()
                .map(|p| (p.x_range.clone(), p.y_range.clone()))
                .collect(),
            mode: CollectionMode::Parallel,
        }
    }
}

struct TerminalPair {
    x_range: Range<u32>,
    y_range: Range<u32>,
    chords: Vec<usize>,
    depth: u32,
    vertex_evidence: Option<(Side, u32, u64)>,
    chord_evidence: Option<(usize, u64)>,
}

/// Recursive bisection: while some pair violates both the heavy-vertex and
/// interlacer conditions, split its x-side into balanced halves at a pivot
/// chord and split the y-side at the pivot's partner. Terminal pairs form a
/// parallel collection; the majority condition is kept.
pub fn splitting_process(sp: &SectionPair) -> Result<SplitOutcome> {
    let m = sp.chord_count() as u64;
    if m < 2 {
        return Err(Error::Precondition(format!("need at least 2 chords, got {m}")));
    }
    // Thresholds are e / (6 log2 m), clamped to 1 below m = 4 where the
    // heavy-vertex condition holds trivially.
    let log_m = (m as f64).log2();
    let tau = |e: u64| -> f64 {
        if m < 4 {
            1.0
        } else {
            e as f64 / (6.0 * log_m)
        }
    };

    let mut terminals: Vec<TerminalPair> = Vec::new();
    let mut queue: Vec<(Range<u32>, Range<u32>, Vec<usize>, u32)> = vec![(
        0..sp.x_len(),
        0..sp.y_len(),
        (0..sp.chord_count()).collect(),
        0,
    )];

    while let Some((xr, yr, chords, depth)) = queue.pop() {
        let e = chords.len() as u64;
        let t = tau(e);

        let mut vertex_evidence = None;
        {
            let mut dx: std::collections::HashMap<u32, u64> = std::collections::HashMap::new();
            let mut dy: std::collections::HashMap<u32, u64> = std::collections::HashMap::new();
            for &ci in &chords {
                let (xi, yi) = sp.chord(ci);
                *dx.entry(xi).or_default() += 1;
                *dy.entry(yi).or_default() += 1;
            }
            let best = |map: &std::collections::HashMap<u32, u64>, side: Side| {
                map.iter()
                    .map(|(&i, &d)| (d, std::cmp::Reverse((side == Side::Y) as u8), std::cmp::Reverse(i)))
                    .max()
                    .map(|(d, _, std::cmp::Reverse(i))| (side, i, d))
            };
            let cand = [best(&dx, Side::X), best(&dy, Side::Y)]
                .into_iter()
                .flatten()
                .max_by_key(|&(side, i, d)| (d, std::cmp::Reverse((side == Side::Y) as u8), std::cmp::Reverse(i)));
            if let Some((side, i, d)) = cand {
                if d as f64 >= t {
                    vertex_evidence = Some((side, i, d));
                }
            }
        }

        let mut chord_evidence = None;
        {
            let mut best: Option<(u64, (u32, u32), usize)> = None;
            for (ai, &ca) in chords.iter().enumerate() {
                let a = sp.chord(ca);
                let mut cnt = 0u64;
                for (bi, &cb) in chords.iter().enumerate() {
                    if ai != bi && classify_pair(a, sp.chord(cb)) == ChordRel::Interlacing {
                        cnt += 1;
                    }
                }
                let key = (cnt, (u32::MAX - a.0, u32::MAX - a.1), ca);
                if best.map_or(true, |b| key > (b.0, b.1, b.2)) {
                    best = Some(key);
                }
            }
            if let Some((cnt, _, ci)) = best {
                if cnt as f64 >= t {
                    chord_evidence = Some((ci, cnt));
                }
            }
        }

        if vertex_evidence.is_some() || chord_evidence.is_some() {
            terminals.push(TerminalPair {
                x_range: xr,
                y_range: yr,
                chords,
                depth,
                vertex_evidence,
                chord_evidence,
            });
            continue;
        }

        // Both conditions failed; split. Every vertex here has degree < tau,
        // so a prefix touching at least (1/2 - 1/(6 log m)) e exists and
        // cannot overshoot (1/2 + 1/(6 log m)) e.
        let lo = (0.5 - 1.0 / (6.0 * log_m)) * e as f64;
        let mut dx_local: std::collections::HashMap<u32, u64> = std::collections::HashMap::new();
        for &ci in &chords {
            *dx_local.entry(sp.chord(ci).0).or_default() += 1;
        }
        let mut cut = xr.start;
        let mut cum = 0u64;
        for xi in xr.clone() {
            cum += dx_local.get(&xi).copied().unwrap_or(0);
            if cum as f64 >= lo {
                cut = xi + 1;
                break;
            }
        }
        // Pivot: lowest upper-half vertex with a chord, and its lowest partner.
        let pivot_x = chords
            .iter()
            .map(|&ci| sp.chord(ci).0)
            .filter(|&xi| xi < cut)
            .max();
        let (pivot_x, pivot_y) = match pivot_x {
            Some(px) => {
                let py = chords
                    .iter()
                    .map(|&ci| sp.chord(ci))
                    .filter(|&(xi, _)| xi == px)
                    .map(|(_, yi)| yi)
                    .max()
                    .unwrap();
                (px, py)
            }
            None => {
                // Degenerate split; keep the pair with its strongest witness.
                terminals.push(fallback_terminal(sp, xr, yr, chords, depth));
                continue;
            }
        };
        let _ = pivot_x;
        let y_cut = pivot_y + 1;
        if cut <= xr.start || cut >= xr.end || y_cut <= yr.start || y_cut >= yr.end {
            terminals.push(fallback_terminal(sp, xr, yr, chords, depth));
            continue;
        }
        let mut upper_chords = Vec::new();
        let mut lower_chords = Vec::new();
        for &ci in &chords {
            let (xi, yi) = sp.chord(ci);
            let in_upper_x = xi < cut;
            let in_upper_y = yi < y_cut;
            if in_upper_x && in_upper_y {
                upper_chords.push(ci);
            } else if !in_upper_x && !in_upper_y {
                lower_chords.push(ci);
            }
            // Crossing chords are discarded; they interlace the pivot chord
            // and there are few of them.
        }
        queue.push((xr.start..cut, yr.start..y_cut, upper_chords, depth + 1));
        queue.push((cut..xr.end, y_cut..yr.end, lower_chords, depth + 1));
    }

    let sum_for = |case: SplitCase| -> u64 {
        terminals
            .iter()
            .filter(|t| match case {
                SplitCase::HighDegreeVertex => t.vertex_evidence.is_some(),
                SplitCase::InterlacerChord => t.chord_evidence.is_some(),
            })
            .map(|t| t.chords.len() as u64)
            .sum()
    };
    let s1 = sum_for(SplitCase::HighDegreeVertex);
    let s2 = sum_for(SplitCase::InterlacerChord);
    // Either case covers at least half the kept chords; prefer the
    // interlacer case on ties since it feeds the constructive pipeline.
    let case = if s2 >= s1 {
        SplitCase::InterlacerChord
    } else {
        SplitCase::HighDegreeVertex
    };

    let mut pairs: Vec<SplitPair> = terminals
        .into_iter()
        .filter_map(|t| {
            let evidence = match case {
                SplitCase::HighDegreeVertex => t
                    .vertex_evidence
                    .map(|(side, index, degree)| PairEvidence::Vertex { side, index, degree }),
                SplitCase::InterlacerChord => t
                    .chord_evidence
                    .map(|(index, interlaced)| PairEvidence::Chord { index, interlaced }),
            }?;
            Some(SplitPair {
                x_range: t.x_range,
                y_range: t.y_range,
                chords: t.chords,
                evidence,
                depth: t.depth,
            })
        })
        .collect();
    pairs.sort_by(|a, b| b.x_range.start.cmp(&a.x_range.start));
    let kept_chords = pairs.iter().map(|p| p.chords.len() as u64).sum();
    let outcome = SplitOutcome { pairs, case, kept_chords };
    outcome.collection().check(sp)?;
    Ok(outcome)
}

fn fallback_terminal(
    sp: &SectionPair,
    x_range: Range<u32>,
    y_range: Range<u32>,
    chords: Vec<usize>,
    depth: u32,
) -> TerminalPair {
    let mut dy: std::collections::HashMap<(Side, u32), u64> = std::collections::HashMap::new();
    for &ci in &chords {
        let (xi, yi) = sp.chord(ci);
        *dy.entry((Side::X, xi)).or_default() += 1;
        *dy.entry((Side::Y, yi)).or_default() += 1;
    }
    let best = dy
        .into_iter()
        .max_by_key(|&((side, i), d)| (d, std::cmp::Reverse((side == Side::Y) as u8), std::cmp::Reverse(i)));
    TerminalPair {
        x_range,
        y_range,
        vertex_evidence: best.map(|((side, i), d)| (side, i, d)),
        chord_evidence: None,
        chords,
        depth,
    }
}

/// One extracted parallel-or-sharing chord pair with its x-side span.
#[derive(Debug, Clone)]
pub struct ExtractedPair {
    /// Chord with the higher (closer to top) x endpoint.
    pub upper: usize,
    pub lower: usize,
    pub d_x: u64,
}

#[derive(Debug, Clone)]
pub enum Extraction {
    /// At least half of the chords are pairwise interlacing.
    InterlacingFamily(MonotoneFamily),
    /// Pairs are parallel-or-sharing within, mutually interlacing across,
    /// with x-spans summing to at least m/4.
    PairSequence(Vec<ExtractedPair>),
}

/// Greedy process: repeatedly pick the non-interlacing chord pair with the
/// widest x-span, delete every chord whose x endpoint lies in that span, and
/// stop when the residue is pairwise interlacing.
pub fn interlacing_pair_extraction(sp: &SectionPair) -> Result<Extraction> {
    if !sp.is_x_matching() {
        return Err(Error::Precondition(
            "extraction needs each x-vertex on at most one chord".into(),
        ));
    }
    let m = sp.chord_count() as u64;
    let mut alive: Vec<usize> = (0..sp.chord_count()).collect();
    let mut pairs: Vec<ExtractedPair> = Vec::new();

    loop {
        // Best parallel-or-sharing pair by x-span, ties by lowest x-index.
        let mut best: Option<(u64, (u32, u32), usize, usize)> = None;
        for i in 0..alive.len() {
            for j in i + 1..alive.len() {
                let (ca, cb) = (alive[i], alive[j]);
                let (a, b) = (sp.chord(ca), sp.chord(cb));
                if classify_pair(a, b) == ChordRel::Interlacing {
                    continue;
                }
                let (upper, lower) = if a.0 < b.0 { (ca, cb) } else { (cb, ca) };
                let (u, l) = (sp.chord(upper), sp.chord(lower));
                let d = (l.0 - u.0) as u64;
                let key = (d, (u32::MAX - u.0, u32::MAX - u.1));
                if best.map_or(true, |(bd, bk, _, _)| (key.0, key.1) > (bd, bk)) {
                    best = Some((d, key.1, upper, lower));
                }
            }
        }
        let Some((d, _, upper, lower)) = best else {
            break;
        };
        let (u, l) = (sp.chord(upper), sp.chord(lower));
        alive.retain(|&ci| {
            let (xi, _) = sp.chord(ci);
            xi < u.0 || xi > l.0
        });
        pairs.push(ExtractedPair { upper, lower, d_x: d });
    }

    if 2 * alive.len() as u64 >= m {
        let mut chords = alive;
        chords.sort_by_key(|&ci| sp.chord(ci).0);
        Ok(Extraction::InterlacingFamily(MonotoneFamily {
            chords,
            relation: MonotoneRelation::AllInterlacing,
        }))
    } else {
        Ok(Extraction::PairSequence(pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Pos;

    fn grid_pair(lx: u32, ly: u32, chords: Vec<(u32, u32)>) -> SectionPair {
        let x: Vec<Pos> = (0..lx).collect();
        let y: Vec<Pos> = (lx..lx + ly).collect();
        SectionPair::from_sides(x, y, chords).unwrap()
    }

    #[test]
    fn monotone_family_from_permutation() {
        // x-order 1..5 mapped to y positions (2,4,1,5,3); k=3 expects the
        // parallel triple with y values 2 < 4 < 5 at x indices {1,2,4}.
        let sp = grid_pair(6, 6, vec![(1, 2), (2, 4), (3, 1), (4, 5), (5, 3)]);
        let fam = monotone_chord_family(&sp, &(0..5).collect::<Vec<_>>(), 3).unwrap();
        assert_eq!(fam.relation, MonotoneRelation::AllParallel);
        let picked: Vec<(u32, u32)> = fam.chords.iter().map(|&ci| sp.chord(ci)).collect();
        assert_eq!(picked, vec![(1, 2), (2, 4), (4, 5)]);
    }

    #[test]
    fn monotone_family_identity_and_reverse() {
        let n = 5u32;
        let ident = grid_pair(n, n, (0..n).map(|i| (i, i)).collect());
        let fam = monotone_chord_family(&ident, &(0..n as usize).collect::<Vec<_>>(), n as usize)
            .unwrap();
        assert_eq!(fam.relation, MonotoneRelation::AllParallel);
        assert_eq!(fam.chords.len(), n as usize);

        let rev = grid_pair(n, n, (0..n).map(|i| (i, n - 1 - i)).collect());
        let fam = monotone_chord_family(&rev, &(0..n as usize).collect::<Vec<_>>(), n as usize)
            .unwrap();
        assert_eq!(fam.relation, MonotoneRelation::AllInterlacing);
    }

    #[test]
    fn monotone_family_rejects_small_or_sharing() {
        let sp = grid_pair(4, 4, vec![(0, 0), (1, 1), (1, 2)]);
        assert!(monotone_chord_family(&sp, &[0, 1], 3).is_err());
        assert!(monotone_chord_family(&sp, &[0, 1, 2], 2).is_err());
    }

    #[test]
    fn initial_split_uniform_grid_parallel() {
        let n = 400u32;
        let sp = grid_pair(n, n, (0..n).map(|i| (i, i)).collect());
        let cfg = EngineConfig::default();
        let coll = initial_split(&sp, 2, &cfg).unwrap();
        assert_eq!(coll.mode, CollectionMode::Parallel);
        assert_eq!(coll.len(), 2);
        for (xr, yr) in &coll.pairs {
            let cnt = sp.chords_in(xr, yr).len() as u64;
            // Greedy segments touch between m/(10k^2) and m/(5k^2) chords.
            assert!(cnt >= 10, "pair has {cnt} chords");
        }
    }

    #[test]
    fn initial_split_mirror_grid_interlacing() {
        let n = 400u32;
        let sp = grid_pair(n, n, (0..n).map(|i| (i, n - 1 - i)).collect());
        let coll = initial_split(&sp, 2, &EngineConfig::default()).unwrap();
        assert_eq!(coll.mode, CollectionMode::Interlacing);
        assert_eq!(coll.len(), 2);
    }

    #[test]
    fn initial_split_heavy_vertex_gate() {
        let mut chords: Vec<(u32, u32)> = (0..40).map(|i| (i, 0)).collect();
        chords.extend((0..10).map(|i| (40 + i, 1 + i)));
        let sp = grid_pair(60, 60, chords);
        match initial_split(&sp, 2, &EngineConfig::default()) {
            Err(Error::HeavyVertex { side, index, degree, .. }) => {
                assert_eq!(side, Side::Y);
                assert_eq!(index, 0);
                assert_eq!(degree, 40);
            }
            other => panic!("expected heavy-vertex error, got {other:?}"),
        }
    }

    #[test]
    fn splitting_star_is_high_degree() {
        let sp = grid_pair(20, 5, (0..20).map(|i| (i, 2)).collect());
        let out = splitting_process(&sp).unwrap();
        assert_eq!(out.case, SplitCase::HighDegreeVertex);
        assert_eq!(out.pairs.len(), 1);
        match &out.pairs[0].evidence {
            PairEvidence::Vertex { side, index, degree } => {
                assert_eq!((*side, *index, *degree), (Side::Y, 2, 20));
            }
            other => panic!("unexpected evidence {other:?}"),
        }
    }

    #[test]
    fn splitting_crossed_is_interlacer() {
        let n = 16u32;
        let sp = grid_pair(n, n, (0..n).map(|i| (i, n - 1 - i)).collect());
        let out = splitting_process(&sp).unwrap();
        assert_eq!(out.case, SplitCase::InterlacerChord);
        assert_eq!(out.pairs.len(), 1);
        assert_eq!(out.kept_chords, n as u64);
    }

    #[test]
    fn splitting_parallel_matching_bisects() {
        let n = 64u32;
        let sp = grid_pair(n, n, (0..n).map(|i| (i, i)).collect());
        let out = splitting_process(&sp).unwrap();
        assert_eq!(out.case, SplitCase::HighDegreeVertex);
        assert!(out.pairs.len() > 1);
        assert!(out.kept_chords >= 64 / 24);
        for p in &out.pairs {
            assert!(p.depth <= 2 * 6);
            match &p.evidence {
                PairEvidence::Vertex { degree, .. } => {
                    let tau = p.chords.len() as f64 / (6.0 * 6.0);
                    assert!(*degree as f64 >= tau);
                }
                other => panic!("unexpected evidence {other:?}"),
            }
        }
        out.collection().check(&sp).unwrap();
    }

    #[test]
    fn extraction_fully_interlacing() {
        let n = 10u32;
        let sp = grid_pair(n, n, (0..n).map(|i| (i, n - 1 - i)).collect());
        match interlacing_pair_extraction(&sp).unwrap() {
            Extraction::InterlacingFamily(f) => assert_eq!(f.chords.len(), n as usize),
            other => panic!("expected family, got {other:?}"),
        }
    }

    #[test]
    fn extraction_fully_parallel() {
        let n = 12u32;
        let sp = grid_pair(n, n, (0..n).map(|i| (i, i)).collect());
        match interlacing_pair_extraction(&sp).unwrap() {
            Extraction::PairSequence(ps) => {
                assert_eq!(ps.len(), 1);
                assert_eq!(ps[0].d_x, (n - 1) as u64);
                assert!(ps[0].d_x >= n as u64 / 4);
            }
            other => panic!("expected pairs, got {other:?}"),
        }
    }

    #[test]
    fn extraction_three_chord_trace() {
        let sp = grid_pair(6, 6, vec![(1, 1), (2, 2), (0, 3)]);
        match interlacing_pair_extraction(&sp).unwrap() {
            Extraction::PairSequence(ps) => {
                assert_eq!(ps.len(), 1);
                assert_eq!(sp.chord(ps[0].upper), (1, 1));
                assert_eq!(sp.chord(ps[0].lower), (2, 2));
                assert!(ps[0].d_x >= 1);
            }
            other => panic!("expected pairs, got {other:?}"),
        }
    }

    #[test]
    fn extraction_cross_relations_hold() {
        // Two parallel clusters far apart in x, crossing in y.
        let mut chords = vec![(0, 8), (1, 8), (2, 9)];
        chords.extend([(8, 0), (9, 0), (10, 1)]);
        let sp = grid_pair(12, 12, chords);
        match interlacing_pair_extraction(&sp).unwrap() {
            Extraction::PairSequence(ps) => {
                assert!(ps.iter().map(|p| p.d_x).sum::<u64>() >= 6 / 4);
                for i in 0..ps.len() {
                    for j in i + 1..ps.len() {
                        for a in [ps[i].upper, ps[i].lower] {
                            for b in [ps[j].upper, ps[j].lower] {
                                assert_eq!(sp.classify_chords(a, b), ChordRel::Interlacing);
                            }
                        }
                    }
                }
            }
            Extraction::InterlacingFamily(_) => {}
        }
    }

    #[test]
    fn extraction_requires_matching() {
        let sp = grid_pair(4, 4, vec![(0, 0), (0, 2)]);
        assert!(interlacing_pair_extraction(&sp).is_err());
    }
}
