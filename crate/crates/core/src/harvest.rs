//! The iterated harvest over a parallel collection of chord-rich subsection
//! pairs. Each level either ends early with a large family (star harvest,
//! many distinct trivial lengths, or widely spaced path-pair lengths) or
//! extends the running below-path family through the next pair via
//! close-length harvesting, gap-preserving sum-sets, thinning, and the
//! spread-times-close product.

use std::ops::Range;

use crate::decompose::{splitting_process, MonotoneFamily, MonotoneRelation, PairEvidence, SplitCase};
use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::pathforge::{close_length_paths, rung_ladder_paths, PathFamily};
use crate::section::{PairCollection, PairRoute, PairStep, SectionPair, Side};
use crate::sumset::{combine_gapped, spread_close_product, thin_to_spacing, LengthSet, WitnessRef};

/// Outcome of the minimal-interval-cover step on one flipped subsection pair
/// holding exactly `k` chords.
#[derive(Debug, Clone)]
pub enum Dichotomy {
    /// Picked chord lengths, one from every second cover interval, pairwise
    /// more than `k^(i*eps)` apart. Entries are `(pair length, chord index)`.
    Spaced(Vec<(u64, usize)>),
    /// An interval of size `k^(i*eps)` holding at least `k^((i+1)*eps) / 4`
    /// chord lengths.
    Dense { lo: u64, hi: u64, chords: Vec<usize> },
}

/// Greedy minimal cover of the sorted chord lengths by disjoint intervals of
/// size `k^(i*eps)`: returns the first interval holding `k^((i+1)*eps)/4`
/// lengths, or one length from every second interval.
pub fn dichotomy_step(sub: &SectionPair, k: u64, paper_i: u32, eps: f64) -> Result<Dichotomy> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    if sub.chord_count() as u64 != k {
        return Err(Error::Precondition(format!(
            "pair must be trimmed to exactly {k} chords, has {}",
            sub.chord_count()
        )));
    }
    let w = (k as f64)
        .powf(paper_i as f64 * eps)
        .ceil()
        .max(1.0) as u64;
    let dense_floor = (k as f64).powf((paper_i as f64 + 1.0) * eps) / 4.0;

    let mut by_len: Vec<(u64, usize)> = (0..sub.chord_count())
        .map(|ci| (sub.pair_chord_length(ci).unwrap(), ci))
        .collect();
    by_len.sort_unstable();

    let mut intervals: Vec<(u64, Vec<(u64, usize)>)> = Vec::new();
    for &(l, ci) in &by_len {
        match intervals.last_mut() {
            Some((start, members)) if l <= *start + (w - 1) => members.push((l, ci)),
            _ => intervals.push((l, vec![(l, ci)])),
        }
    }
    for (start, members) in &intervals {
        if members.len() as f64 >= dense_floor {
            return Ok(Dichotomy::Dense {
                lo: *start,
                hi: *start + (w - 1),
                chords: members.iter().map(|&(_, ci)| ci).collect(),
            });
        }
    }
    let picked: Vec<(u64, usize)> = intervals
        .iter()
        .step_by(2)
        .map(|(_, members)| members[0])
        .collect();
    Ok(Dichotomy::Spaced(picked))
}

fn side_walk(side: Side, from: u32, to: u32) -> Option<PairStep> {
    if from == to {
        None
    } else {
        Some(PairStep::Side { side, from, to })
    }
}

fn oriented(sp: &SectionPair, route: &PairRoute, from: (Side, u32)) -> Result<PairRoute> {
    let seq = route.expand(sp)?;
    if seq[0] == from {
        Ok(route.clone())
    } else if *seq.last().unwrap() == from {
        Ok(route.reversed())
    } else {
        Err(Error::InvalidRoute(format!("route does not touch {from:?}")))
    }
}

/// Maps a route on `child = parent.subpair(x_range, y_range, flip_x, flip_y)`
/// back to parent coordinates.
fn remap_from_subpair(
    route: &PairRoute,
    child: &SectionPair,
    parent: &SectionPair,
    x_range: &Range<u32>,
    y_range: &Range<u32>,
    flip_x: bool,
    flip_y: bool,
) -> Result<PairRoute> {
    let m = |side: Side, i: u32| -> u32 {
        let (r, flip) = match side {
            Side::X => (x_range, flip_x),
            Side::Y => (y_range, flip_y),
        };
        if flip {
            r.end - 1 - i
        } else {
            r.start + i
        }
    };
    let steps = route
        .steps
        .iter()
        .map(|s| match *s {
            PairStep::Side { side, from, to } => Ok(PairStep::Side {
                side,
                from: m(side, from),
                to: m(side, to),
            }),
            PairStep::Chord(ci) => {
                let (xi, yi) = child.chord(ci);
                parent
                    .find_chord(m(Side::X, xi), m(Side::Y, yi))
                    .map(PairStep::Chord)
                    .ok_or_else(|| Error::InvalidRoute("chord missing in parent".into()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PairRoute::new(steps))
}

/// One distinct-length trivial path per length over the given chords.
fn distinct_trivial_family(sp: &SectionPair, chords: &[usize]) -> Result<PathFamily> {
    let mut items = Vec::with_capacity(chords.len());
    for &ci in chords {
        items.push((sp.pair_chord_length(ci)? + 1, sp.trivial_path(ci)));
    }
    Ok(PathFamily {
        from: (Side::X, 0),
        to: (Side::Y, 0),
        set: LengthSet::from_unsorted(items)?.certified(),
        degraded: false,
    })
}

/// A below-path family between the tops of `coll.pairs[level]`, with routes
/// in the coordinates of the parent pair.
struct LevelFamily {
    set: LengthSet<PairRoute>,
    level: usize,
}

fn extend_to_tops(
    sp: &SectionPair,
    coll: &PairCollection,
    fam: &LevelFamily,
) -> Result<PathFamily> {
    let (xr, yr) = &coll.pairs[fam.level];
    let mut entries = Vec::with_capacity(fam.set.len());
    for (_, route) in fam.set.entries() {
        let inner = oriented(sp, route, (Side::X, xr.start))?;
        let mut steps: Vec<PairStep> = side_walk(Side::X, 0, xr.start).into_iter().collect();
        steps.extend(inner.steps.iter().copied());
        steps.extend(side_walk(Side::Y, yr.start, 0));
        let r = PairRoute::new(steps);
        entries.push((r.length(sp)?, r));
    }
    Ok(PathFamily {
        from: (Side::X, 0),
        to: (Side::Y, 0),
        set: LengthSet::new(entries)?.certified(),
        degraded: false,
    })
}

/// Which of the two symmetric interlacer types the pair uses: the inner
/// section sits above the special chord on X (and below on Y), or the mirror.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InnerSide {
    AboveX,
    BelowX,
}

/// A splitting pair prepared for path-pair construction.
struct PreparedPair {
    x_range: Range<u32>,
    y_range: Range<u32>,
    evidence: usize,
    side: InnerSide,
    inner_x: Range<u32>,
    inner_y: Range<u32>,
    flipped: SectionPair,
}

/// One selectable option: the pair's two crossing routes and their combined
/// length.
struct PairOption {
    total: u64,
    /// Connects (X, x_range.start) to (Y, y_range.end - 1).
    tb: PairRoute,
    /// Connects (X, x_range.end - 1) to (Y, y_range.start).
    bt: PairRoute,
}

fn build_option(
    sub: &SectionPair,
    pp: &PreparedPair,
    inner_flipped: &PairRoute,
    flipped_host: &SectionPair,
) -> Result<PairOption> {
    let (ex, ey) = sub.chord(pp.evidence);
    let (xs, xe) = (pp.x_range.start, pp.x_range.end);
    let (ys, ye) = (pp.y_range.start, pp.y_range.end);
    let inner = remap_from_subpair(
        inner_flipped,
        flipped_host,
        sub,
        &pp.inner_x,
        &pp.inner_y,
        pp.side == InnerSide::BelowX,
        pp.side == InnerSide::AboveX,
    )?;
    let (tb, bt) = match pp.side {
        InnerSide::AboveX => {
            // Fixed route: pair bottom on X, over the special chord, to the
            // pair top on Y. Variable route: top on X through the inner
            // section to the bottom on Y.
            let mut fixed: Vec<PairStep> = side_walk(Side::X, xe - 1, ex).into_iter().collect();
            fixed.push(PairStep::Chord(pp.evidence));
            fixed.extend(side_walk(Side::Y, ey, ys));
            let inner = oriented(sub, &inner, (Side::X, pp.inner_x.start))?;
            let mut var: Vec<PairStep> = side_walk(Side::X, xs, pp.inner_x.start).into_iter().collect();
            var.extend(inner.steps.iter().copied());
            var.extend(side_walk(Side::Y, pp.inner_y.end - 1, ye - 1));
            (PairRoute::new(var), PairRoute::new(fixed))
        }
        InnerSide::BelowX => {
            let mut fixed: Vec<PairStep> = side_walk(Side::X, xs, ex).into_iter().collect();
            fixed.push(PairStep::Chord(pp.evidence));
            fixed.extend(side_walk(Side::Y, ey, ye - 1));
            let inner = oriented(sub, &inner, (Side::X, pp.inner_x.end - 1))?;
            let mut var: Vec<PairStep> = side_walk(Side::X, xe - 1, pp.inner_x.end - 1)
                .into_iter()
                .collect();
            var.extend(inner.steps.iter().copied());
            var.extend(side_walk(Side::Y, pp.inner_y.start, ys));
            (PairRoute::new(fixed), PairRoute::new(var))
        }
    };
    let total = tb.length(sub)? + bt.length(sub)?;
    Ok(PairOption { total, tb, bt })
}

/// Chains the chosen option per used pair into the two crossing paths of a
/// top-bottom path-pair for `sub`: one from the x-top, one from the y-top,
/// ending at the two bottoms.
fn chain_paths(
    sub: &SectionPair,
    used: &[(&PreparedPair, &PairOption)],
) -> Result<(PairRoute, PairRoute)> {
    let build = |start_on_x: bool| -> Result<PairRoute> {
        let mut steps: Vec<PairStep> = Vec::new();
        let mut at: (Side, u32) = if start_on_x { (Side::X, 0) } else { (Side::Y, 0) };
        for (idx, (pp, opt)) in used.iter().enumerate() {
            let take_tb = (idx % 2 == 0) == start_on_x;
            if take_tb {
                steps.extend(side_walk(Side::X, at.1, pp.x_range.start));
                let r = oriented(sub, &opt.tb, (Side::X, pp.x_range.start))?;
                steps.extend(r.steps.iter().copied());
                at = (Side::Y, pp.y_range.end - 1);
            } else {
                steps.extend(side_walk(Side::Y, at.1, pp.y_range.start));
                let r = oriented(sub, &opt.bt, (Side::Y, pp.y_range.start))?;
                steps.extend(r.steps.iter().copied());
                at = (Side::X, pp.x_range.end - 1);
            }
        }
        match at.0 {
            Side::X => steps.extend(side_walk(Side::X, at.1, sub.x_len() - 1)),
            Side::Y => steps.extend(side_walk(Side::Y, at.1, sub.y_len() - 1)),
        }
        Ok(PairRoute::new(steps))
    };
    Ok((build(true)?, build(false)?))
}

enum Leaf {
    Choice { slot: usize, option: usize },
    Below { entry: usize },
}

/// Assembles a below-path between the tops of `coll.pairs[next]` from chosen
/// pair options and a below-path of the previous level.
#[allow(clippy::too_many_arguments)]
fn assemble(
    sp: &SectionPair,
    sub: &SectionPair,
    next_ranges: (&Range<u32>, &Range<u32>),
    prev_ranges: (&Range<u32>, &Range<u32>),
    used: &[(&PreparedPair, &PairOption)],
    below: &PairRoute,
) -> Result<PairRoute> {
    let (xr, yr) = next_ranges;
    let (pxr, pyr) = prev_ranges;
    let (p, q) = chain_paths(sub, used)?;
    let remap = |r: &PairRoute| -> PairRoute {
        PairRoute::new(
            r.steps
                .iter()
                .map(|s| match *s {
                    PairStep::Side { side, from, to } => {
                        let off = match side {
                            Side::X => xr.start,
                            Side::Y => yr.start,
                        };
                        PairStep::Side { side, from: from + off, to: to + off }
                    }
                    PairStep::Chord(ci) => {
                        let (xi, yi) = sub.chord(ci);
                        PairStep::Chord(
                            sp.find_chord(xi + xr.start, yi + yr.start)
                                .expect("subpair chord exists in parent"),
                        )
                    }
                })
                .collect(),
        )
    };
    let p_sp = remap(&p);
    let q_sp = remap(&q);
    let xb = xr.end - 1;
    let yb = yr.end - 1;

    // Extension through the spine to the previous level's tops and back.
    let below = oriented(sp, below, (Side::X, pxr.start))?;
    let mut ext: Vec<PairStep> = side_walk(Side::X, xb, pxr.start).into_iter().collect();
    ext.extend(below.steps.iter().copied());
    ext.extend(side_walk(Side::Y, pyr.start, yb));
    let ext = PairRoute::new(ext); // connects (X, xb) -> (Y, yb)

    let p_end = p_sp.expand(sp)?.last().copied().unwrap();
    let mut steps = p_sp.steps.clone();
    if p_end == (Side::X, xb) {
        steps.extend(ext.steps.iter().copied());
    } else {
        steps.extend(ext.reversed().steps.iter().copied());
    }
    steps.extend(q_sp.reversed().steps.iter().copied());
    Ok(PairRoute::new(steps))
}

/// Runs the induction over a parallel collection whose pairs each hold many
/// chords, producing top-to-top paths of the parent pair. Every early branch
/// returns its family directly; the caller gets whichever candidate is
/// largest, with a tag naming the branch taken.
pub fn many_lengths_over_parallel(
    sp: &SectionPair,
    coll: &PairCollection,
    cfg: &EngineConfig,
) -> Result<(PathFamily, String)> {
    if coll.is_empty() {
        return Err(Error::Precondition("empty collection".into()));
    }
    coll.check(sp)?;
    let pair_chords: Vec<Vec<usize>> = coll
        .pairs
        .iter()
        .map(|(xr, yr)| sp.chords_in(xr, yr))
        .collect();
    if pair_chords.iter().any(|c| c.is_empty()) {
        return Err(Error::Precondition("collection pair without chords".into()));
    }
    let m = pair_chords.iter().map(|c| c.len() as u64).min().unwrap();
    let t = coll.len();

    let fallback = distinct_trivial_family(sp, &pair_chords[0])?;
    if m < cfg.min_m || (t as f64) < (m.max(2) as f64).log2().sqrt() {
        return Ok((fallback, "fallback-trivial-pair1".into()));
    }

    let eps = cfg.eps_for(m);
    let imax = ((1.0 / eps).floor() as usize).max(1);
    let mf = m as f64;

    // Base level: pigeonhole over the trivial-path lengths of the bottom pair.
    let mut groups: std::collections::BTreeMap<u64, Vec<usize>> = std::collections::BTreeMap::new();
    for &ci in &pair_chords[0] {
        groups.entry(sp.pair_chord_length(ci)?).or_default().push(ci);
    }
    if groups.len() as f64 >= mf.powf(1.0 - eps) {
        // Enough distinct trivial lengths already.
        return Ok((fallback, "pigeonhole-trivial".into()));
    }
    let (_, best_group) = groups
        .iter()
        .max_by_key(|(l, v)| (v.len(), std::cmp::Reverse(**l)))
        .map(|(l, v)| (*l, v.clone()))
        .unwrap();

    let mut candidates: Vec<(PathFamily, String)> = vec![(fallback, "fallback-trivial-pair1".into())];

    let (xr0, yr0) = &coll.pairs[0];
    let sub0 = sp.subpair(xr0.clone(), yr0.clone(), false, false)?;
    let group0: Vec<usize> = best_group
        .iter()
        .filter_map(|&ci| {
            let (xi, yi) = sp.chord(ci);
            sub0.find_chord(xi - xr0.start, yi - yr0.start)
        })
        .collect();

    // Full ladder over the heaviest equal-length group, as a final candidate.
    if group0.len() >= 3 {
        let mut fam_chords = group0.clone();
        fam_chords.sort_by_key(|&ci| sub0.chord(ci).0);
        let fam = MonotoneFamily { chords: fam_chords, relation: MonotoneRelation::AllInterlacing };
        if let Ok(ladder) = rung_ladder_paths(&sub0, &fam, 1) {
            let lf = LevelFamily {
                set: remap_set(&ladder.set, &sub0, sp, xr0, yr0)?,
                level: 0,
            };
            candidates.push((extend_to_tops(sp, coll, &lf)?, "ladder-full".into()));
        }
    }

    let mut current: Option<LevelFamily> = None;
    if group0.len() >= 3 {
        // Short ladder so the base family stays inside an interval of size
        // m^eps.
        let t_base = ((mf.powf(eps) / 3.0).floor() as usize).max(1);
        let take = (3 * t_base).min(group0.len() - group0.len() % 3);
        let mut fam_chords = group0[..take].to_vec();
        fam_chords.sort_by_key(|&ci| sub0.chord(ci).0);
        let fam = MonotoneFamily { chords: fam_chords, relation: MonotoneRelation::AllInterlacing };
        if let Ok(ladder) = rung_ladder_paths(&sub0, &fam, 1) {
            current = Some(LevelFamily {
                set: remap_set(&ladder.set, &sub0, sp, xr0, yr0)?,
                level: 0,
            });
        }
    }

    if let Some(mut fam) = current {
        let mut paper_i = 1u32;
        let mut consumed = false;
        while fam.level + 1 < t && (paper_i as usize) < imax {
            let next = fam.level + 1;
            match induction_step(sp, coll, next, paper_i, eps, mf, &fam, cfg)? {
                StepOutcome::Early(f, early_tag) => {
                    candidates.push((f, early_tag));
                    consumed = true;
                    break;
                }
                StepOutcome::Continue(next_fam) => {
                    fam = next_fam;
                    paper_i += 1;
                }
                StepOutcome::Stuck => break,
            }
        }
        if !consumed {
            candidates.push((extend_to_tops(sp, coll, &fam)?, format!("induction-{paper_i}")));
        }
    }

    if crate::verbose() {
        for (f, tag) in &candidates {
            eprintln!("many_lengths candidate {tag}: {} lengths", f.set.len());
        }
    }
    let (family, tag) = candidates
        .into_iter()
        .max_by_key(|(f, _)| f.set.len())
        .unwrap();
    Ok((family, tag))
}

fn remap_set(
    set: &LengthSet<PairRoute>,
    child: &SectionPair,
    parent: &SectionPair,
    xr: &Range<u32>,
    yr: &Range<u32>,
) -> Result<LengthSet<PairRoute>> {
    let entries = set
        .entries()
        .iter()
        .map(|(l, r)| {
            remap_from_subpair(r, child, parent, xr, yr, false, false).map(|nr| (*l, nr))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LengthSet::new(entries)?.certified())
}

enum StepOutcome {
    Early(PathFamily, String),
    Continue(LevelFamily),
    Stuck,
}

#[allow(clippy::too_many_arguments)]
fn induction_step(
    sp: &SectionPair,
    coll: &PairCollection,
    next: usize,
    paper_i: u32,
    eps: f64,
    mf: f64,
    below: &LevelFamily,
    cfg: &EngineConfig,
) -> Result<StepOutcome> {
    let (xr, yr) = &coll.pairs[next];
    let (pxr, pyr) = &coll.pairs[below.level];
    let sub = sp.subpair(xr.clone(), yr.clone(), false, false)?;

    let outcome = splitting_process(&sub)?;
    if outcome.case == SplitCase::HighDegreeVertex {
        // Star harvest: all the heavy vertices' chords have distinct trivial
        // lengths within this pair.
        let mut items = Vec::new();
        for p in &outcome.pairs {
            if let PairEvidence::Vertex { side, index, .. } = p.evidence {
                for &ci in &p.chords {
                    let (xi, yi) = sub.chord(ci);
                    let hit = match side {
                        Side::X => xi == index,
                        Side::Y => yi == index,
                    };
                    if hit {
                        items.push((sub.pair_chord_length(ci)? + 1, sub.trivial_path(ci)));
                    }
                }
            }
        }
        if items.is_empty() {
            return Ok(StepOutcome::Stuck);
        }
        let set = LengthSet::from_unsorted(items)?;
        let lf = LevelFamily { set: remap_set(&set, &sub, sp, xr, yr)?, level: next };
        return Ok(StepOutcome::Early(extend_to_tops(sp, coll, &lf)?, "star-harvest".into()));
    }

    // Interlacer case: carve the typed inner section per splitting pair.
    let mut prepared: Vec<PreparedPair> = Vec::new();
    for p in &outcome.pairs {
        let PairEvidence::Chord { index: ev, .. } = p.evidence else {
            continue;
        };
        let (ex, ey) = sub.chord(ev);
        let mut above: Vec<(u32, u32)> = Vec::new();
        let mut below_t: Vec<(u32, u32)> = Vec::new();
        for &ci in &p.chords {
            let (xi, yi) = sub.chord(ci);
            if xi < ex && yi > ey {
                above.push((xi, yi));
            } else if xi > ex && yi < ey {
                below_t.push((xi, yi));
            }
        }
        let (side, list) = if above.len() >= below_t.len() {
            (InnerSide::AboveX, above)
        } else {
            (InnerSide::BelowX, below_t)
        };
        if list.is_empty() {
            continue;
        }
        let inner_x = list.iter().map(|c| c.0).min().unwrap()
            ..list.iter().map(|c| c.0).max().unwrap() + 1;
        let inner_y = list.iter().map(|c| c.1).min().unwrap()
            ..list.iter().map(|c| c.1).max().unwrap() + 1;
        let flipped = sub.subpair(
            inner_x.clone(),
            inner_y.clone(),
            side == InnerSide::BelowX,
            side == InnerSide::AboveX,
        )?;
        if flipped.chord_count() == 0 {
            continue;
        }
        prepared.push(PreparedPair {
            x_range: p.x_range.clone(),
            y_range: p.y_range.clone(),
            evidence: ev,
            side,
            inner_x,
            inner_y,
            flipped,
        });
    }
    if prepared.is_empty() {
        return Ok(StepOutcome::Stuck);
    }

    // Dyadic bucket over the inner chord counts; trim each member to exactly
    // k chords of smallest pair length.
    let bucket_of = |e: usize| -> u32 { (e as f64).log2().floor() as u32 };
    let mut buckets: std::collections::BTreeMap<u32, Vec<usize>> = std::collections::BTreeMap::new();
    for (i, pp) in prepared.iter().enumerate() {
        buckets.entry(bucket_of(pp.flipped.chord_count())).or_default().push(i);
    }
    let (_, members) = buckets
        .iter()
        .map(|(b, v)| {
            let sum: usize = v.iter().map(|&i| prepared[i].flipped.chord_count()).sum();
            (sum, (*b, v.clone()))
        })
        .max_by_key(|(sum, (b, _))| (*sum, std::cmp::Reverse(*b)))
        .map(|(_, bv)| bv)
        .unwrap();
    let k_val = 1u64 << buckets
        .iter()
        .find(|(_, v)| **v == members)
        .map(|(b, _)| *b)
        .unwrap();

    let mut used_slots: Vec<usize> = members;
    used_slots.sort_by_key(|&i| prepared[i].x_range.start); // top-down
    let trimmed: Vec<SectionPair> = used_slots
        .iter()
        .map(|&i| {
            let f = &prepared[i].flipped;
            let mut order: Vec<usize> = (0..f.chord_count()).collect();
            order.sort_by_key(|&ci| {
                let (xi, yi) = f.chord(ci);
                (xi as u64 + yi as u64, xi, yi)
            });
            order.truncate(k_val as usize);
            f.restrict_chords(&order)
        })
        .collect();

    // Dichotomy per member.
    let mut spaced: Vec<(usize, Vec<(u64, usize)>)> = Vec::new();
    let mut dense: Vec<(usize, u64, u64, Vec<usize>)> = Vec::new();
    for (slot, tr) in trimmed.iter().enumerate() {
        match dichotomy_step(tr, k_val, paper_i, eps)? {
            Dichotomy::Spaced(v) => spaced.push((slot, v)),
            Dichotomy::Dense { lo, hi, chords } => dense.push((slot, lo, hi, chords)),
        }
    }

    let w = (k_val as f64).powf(paper_i as f64 * eps).ceil().max(1.0) as u64;
    let below_span = below.set.span() + 1;
    let thin_target = (mf.powf(paper_i as f64 * eps).ceil() as u64).max(below_span).max(1);

    // Shared leaf bookkeeping for witness assembly.
    let mut leaves: Vec<Leaf> = Vec::new();
    let mut options: Vec<Vec<PairOption>> =
        (0..used_slots.len()).map(|_| Vec::new()).collect();

    let build_sets =
        |entries_per_slot: Vec<(usize, Vec<(u64, PairRoute)>)>,
         options: &mut Vec<Vec<PairOption>>,
         leaves: &mut Vec<Leaf>|
         -> Result<Vec<LengthSet<WitnessRef>>> {
            let mut sets = Vec::new();
            for (slot, inners) in entries_per_slot {
                let pp = &prepared[used_slots[slot]];
                let mut items = Vec::new();
                for (_, inner_route) in inners {
                    let opt = build_option(&sub, pp, &inner_route, &trimmed[slot])?;
                    let option_idx = options[slot].len();
                    options[slot].push(opt);
                    let leaf_idx = leaves.len();
                    leaves.push(Leaf::Choice { slot, option: option_idx });
                    items.push((options[slot][option_idx].total, WitnessRef::Leaf(leaf_idx)));
                }
                sets.push(LengthSet::from_unsorted(items)?.certified());
            }
            Ok(sets)
        };

    let take_spread = spaced.len() >= dense.len();
    let combined = if take_spread {
        if spaced.is_empty() {
            return Ok(StepOutcome::Stuck);
        }
        let per_slot: Vec<(usize, Vec<(u64, PairRoute)>)> = spaced
            .iter()
            .map(|(slot, picks)| {
                let inners = picks
                    .iter()
                    .map(|&(_, ci)| {
                        let r = trimmed[*slot].trivial_path(ci);
                        Ok((0u64, r))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((*slot, inners))
            })
            .collect::<Result<Vec<_>>>()?;
        let sets = build_sets(per_slot, &mut options, &mut leaves)?;
        combine_gapped(&sets, w.max(1), u64::MAX, WitnessRef::cat)?
    } else {
        let per_slot: Vec<(usize, Vec<(u64, PairRoute)>)> = dense
            .iter()
            .map(|(slot, lo, hi, chords)| {
                let family = close_length_paths(&trimmed[*slot], chords, *lo, *hi, cfg)?;
                let inners = family
                    .set
                    .entries()
                    .iter()
                    .map(|(l, r)| (*l, r.clone()))
                    .collect();
                Ok((*slot, inners))
            })
            .collect::<Result<Vec<_>>>()?;
        let a = ((cfg.theta_lo * w as f64).ceil() as u64).max(1);
        let b = ((cfg.theta_hi * w as f64).floor() as u64).max(a);
        let sets = build_sets(per_slot, &mut options, &mut leaves)?;
        combine_gapped(&sets, a, b, WitnessRef::cat)?
    };

    let thinned = thin_to_spacing(&combined, thin_target)?;

    // Pair path-pair lengths with the below family.
    let below_base = leaves.len();
    let below_entries: Vec<(u64, WitnessRef)> = below
        .set
        .entries()
        .iter()
        .enumerate()
        .map(|(i, (l, _))| {
            leaves.push(Leaf::Below { entry: i });
            (*l, WitnessRef::Leaf(below_base + i))
        })
        .collect();
    let below_set = LengthSet::new(below_entries)?.certified();
    let ell1 = thinned.span() + 1;
    let ell2 = below_set.span() + 1;
    let product = spread_close_product(&thinned, &below_set, ell1, ell2, WitnessRef::cat)?;

    // Realize each product entry as an explicit below-path for the next pair.
    let mut entries: Vec<(u64, PairRoute)> = Vec::new();
    for (_, wit) in product.entries() {
        let mut choice: Vec<Option<usize>> = vec![None; used_slots.len()];
        let mut below_route: Option<&PairRoute> = None;
        for leaf in wit.leaves() {
            match leaves[leaf] {
                Leaf::Choice { slot, option } => choice[slot] = Some(option),
                Leaf::Below { entry } => below_route = Some(&below.set.entries()[entry].1),
            }
        }
        let participating: Vec<(&PreparedPair, &PairOption)> = (0..used_slots.len())
            .filter_map(|slot| {
                choice[slot].map(|o| (&prepared[used_slots[slot]], &options[slot][o]))
            })
            .collect();
        if participating.is_empty() {
            continue;
        }
        let below_route = below_route.expect("product entry carries a below leaf");
        let route = assemble(
            sp,
            &sub,
            (xr, yr),
            (pxr, pyr),
            &participating,
            below_route,
        )?;
        let len = route.length(sp)?;
        entries.push((len, route));
    }
    if entries.is_empty() {
        return Ok(StepOutcome::Stuck);
    }
    let set = LengthSet::from_unsorted(entries)?.certified();

    if take_spread {
        let lf = LevelFamily { set, level: next };
        Ok(StepOutcome::Early(extend_to_tops(sp, coll, &lf)?, "spread-early".into()))
    } else {
        // Cap the interval so the invariant for the next level holds.
        let win = (mf.powf((paper_i as f64 + 1.0) * eps).ceil() as u64).max(1);
        let set = if set.span() + 1 > win {
            let min = set.min();
            let kept: Vec<(u64, PairRoute)> = set
                .entries()
                .iter()
                .filter(|(l, _)| *l < min + win)
                .cloned()
                .collect();
            LengthSet::new(kept)?.certified()
        } else {
            set
        };
        Ok(StepOutcome::Continue(LevelFamily { set, level: next }))
    }
}
