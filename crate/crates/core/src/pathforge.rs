//! Constructive path families inside a section-pair: the interlacing-ladder
//! construction, stitching over an interlacing collection of subsection
//! pairs, two far-apart paths, and close-length chord harvesting. Every
//! returned route is re-expanded and checked; certified gap bounds are
//! computed from the actual lengths.

use std::ops::Range;

use crate::decompose::{
    interlacing_pair_extraction, Extraction, ExtractedPair, MonotoneFamily, MonotoneRelation,
};
use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::section::{
    ChordRel, CollectionMode, PairCollection, PairRoute, PairStep, PairVertex, SectionPair, Side,
};
use crate::sumset::{thin_to_spacing, LengthSet};

/// Paths sharing two declared endpoints, with certified gap bounds.
#[derive(Debug, Clone)]
pub struct PathFamily {
    pub from: PairVertex,
    pub to: PairVertex,
    pub set: LengthSet<PairRoute>,
    /// Set when the machinery fell back to a trivial family.
    pub degraded: bool,
}

impl PathFamily {
    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}

/// Validates routes (simple, correct endpoints), keeping construction order,
/// which must be strictly increasing in length.
fn family_from_ordered(
    sp: &SectionPair,
    from: PairVertex,
    to: PairVertex,
    routes: Vec<PairRoute>,
) -> Result<PathFamily> {
    let mut entries = Vec::with_capacity(routes.len());
    for r in routes {
        let seq = r.expand(sp)?;
        let (s, e) = (seq[0], *seq.last().unwrap());
        if (s, e) != (from, to) && (e, s) != (from, to) {
            return Err(Error::InvalidRoute(format!(
                "path endpoints {s:?}..{e:?} do not match {from:?}..{to:?}"
            )));
        }
        entries.push((seq.len() as u64 - 1, r));
    }
    Ok(PathFamily { from, to, set: LengthSet::new(entries)?.certified(), degraded: false })
}

fn side_walk(side: Side, from: u32, to: u32) -> Option<PairStep> {
    if from == to {
        None
    } else {
        Some(PairStep::Side { side, from, to })
    }
}

fn cat(parts: &[&[PairStep]]) -> PairRoute {
    PairRoute::new(parts.iter().flat_map(|p| p.iter().copied()).collect())
}

/// Reorients a route so it starts at `from`.
fn oriented(sp: &SectionPair, route: &PairRoute, from: PairVertex) -> Result<PairRoute> {
    let seq = route.expand(sp)?;
    if seq[0] == from {
        Ok(route.clone())
    } else if *seq.last().unwrap() == from {
        Ok(route.reversed())
    } else {
        Err(Error::InvalidRoute(format!("route does not touch {from:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RungPolicy {
    /// First candidate pair with distinct lengths, candidates in fixed order.
    LexFirst,
    /// The candidate pair with the largest length difference.
    Widest,
}

/// Ladder construction over pairwise-interlacing chords whose pair lengths
/// lie in an interval of size `d_interval`: `floor(count/3)` paths from the
/// x-top to the y-top with consecutive differences in `[1, 2D]`.
pub fn rung_ladder_paths(
    sp: &SectionPair,
    fam: &MonotoneFamily,
    d_interval: u64,
) -> Result<PathFamily> {
    rung_ladder_with_policy(sp, fam, d_interval, RungPolicy::LexFirst)
}

fn rung_ladder_with_policy(
    sp: &SectionPair,
    fam: &MonotoneFamily,
    d_interval: u64,
    policy: RungPolicy,
) -> Result<PathFamily> {
    if fam.relation != MonotoneRelation::AllInterlacing {
        return Err(Error::Precondition("ladder needs an interlacing family".into()));
    }
    if fam.chords.len() < 3 {
        return Err(Error::Precondition(format!(
            "ladder needs at least 3 chords, got {}",
            fam.chords.len()
        )));
    }
    let mut chords = fam.chords.clone();
    chords.sort_by_key(|&ci| sp.chord(ci).0);
    for w in chords.windows(2) {
        if sp.classify_chords(w[0], w[1]) != ChordRel::Interlacing {
            return Err(Error::Precondition("chords not pairwise interlacing".into()));
        }
    }
    let d = d_interval.max(1);
    let lens: Vec<u64> = chords
        .iter()
        .map(|&ci| sp.pair_chord_length(ci))
        .collect::<Result<_>>()?;
    let spread = lens.iter().max().unwrap() - lens.iter().min().unwrap();
    if spread + 1 > d {
        return Err(Error::Precondition(format!(
            "chord length spread {spread} exceeds interval size {d}"
        )));
    }
    let t = chords.len() / 3;
    let routes = ladder_build(sp, &chords[..3 * t], 0, policy)?;
    let family = family_from_ordered(sp, (Side::X, 0), (Side::Y, 0), routes)?;
    if family.set.len() > 1 {
        let lo = family.set.gap_lo.unwrap();
        let hi = family.set.gap_hi.unwrap();
        if lo < 1 || hi > 2 * d {
            return Err(Error::InvalidRoute(format!(
                "ladder gaps [{lo},{hi}] escape [1,{}]",
                2 * d
            )));
        }
    }
    Ok(family)
}

fn ladder_build(
    sp: &SectionPair,
    chords: &[usize],
    x_top: u32,
    policy: RungPolicy,
) -> Result<Vec<PairRoute>> {
    let (x1, y1) = sp.chord(chords[0]);
    if chords.len() < 6 {
        // Base: the trivial path of the first chord, entered from x_top.
        let mut steps = Vec::new();
        steps.extend(side_walk(Side::X, x_top, x1));
        steps.push(PairStep::Chord(chords[0]));
        steps.extend(side_walk(Side::Y, y1, 0));
        return Ok(vec![PairRoute::new(steps)]);
    }
    let (x2, y2) = sp.chord(chords[1]);
    let (x3, y3) = sp.chord(chords[2]);
    let (x4, _) = sp.chord(chords[3]);

    // Four candidate connectors between x1 and x3, staying above x3 on X and
    // below y3 on Y.
    let cands: Vec<PairRoute> = vec![
        cat(&[&[PairStep::Side { side: Side::X, from: x1, to: x3 }]]),
        PairRoute::new(
            side_walk(Side::X, x1, x2)
                .into_iter()
                .chain([PairStep::Chord(chords[1])])
                .chain(side_walk(Side::Y, y2, y3))
                .chain([PairStep::Chord(chords[2])])
                .collect(),
        ),
        PairRoute::new(
            [PairStep::Chord(chords[0])]
                .into_iter()
                .chain(side_walk(Side::Y, y1, y2))
                .chain([PairStep::Chord(chords[1])])
                .chain(side_walk(Side::X, x2, x3))
                .collect(),
        ),
        PairRoute::new(
            [PairStep::Chord(chords[0])]
                .into_iter()
                .chain(side_walk(Side::Y, y1, y3))
                .chain([PairStep::Chord(chords[2])])
                .collect(),
        ),
    ];
    let lens: Vec<u64> = cands
        .iter()
        .map(|r| r.length(sp))
        .collect::<Result<_>>()?;

    let pick: (usize, usize) = match policy {
        RungPolicy::LexFirst => {
            let mut found = None;
            'outer: for i in 0..4 {
                for j in i + 1..4 {
                    if lens[i] != lens[j] {
                        found = Some((i, j));
                        break 'outer;
                    }
                }
            }
            found.expect("the four candidate lengths cannot all coincide")
        }
        RungPolicy::Widest => {
            let imin = (0..4).min_by_key(|&i| (lens[i], i)).unwrap();
            let imax = (0..4).max_by_key(|&i| (lens[i], std::cmp::Reverse(i))).unwrap();
            assert_ne!(lens[imin], lens[imax], "candidate lengths cannot all coincide");
            (imin, imax)
        }
    };
    let (qa, qb) = if lens[pick.0] <= lens[pick.1] {
        (&cands[pick.0], &cands[pick.1])
    } else {
        (&cands[pick.1], &cands[pick.0])
    };

    let q_short = oriented(sp, qa, (Side::X, x1))?;
    let q_long = oriented(sp, qb, (Side::X, x1))?;
    let mut prefix_short: Vec<PairStep> = side_walk(Side::X, x_top, x1).into_iter().collect();
    prefix_short.extend(q_short.steps.iter().copied());
    prefix_short.extend(side_walk(Side::X, x3, x4));
    let mut prefix_long: Vec<PairStep> = side_walk(Side::X, x_top, x1).into_iter().collect();
    prefix_long.extend(q_long.steps.iter().copied());
    prefix_long.extend(side_walk(Side::X, x3, x4));

    let subs = ladder_build(sp, &chords[3..], x4, policy)?;
    let mut out = Vec::with_capacity(subs.len() + 1);
    for r in &subs {
        out.push(cat(&[&prefix_short, &r.steps]));
    }
    out.push(cat(&[&prefix_long, &subs.last().unwrap().steps]));
    Ok(out)
}

/// A two-path gadget for one subsection pair: the short and long inner path.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub short: PairRoute,
    pub long: PairRoute,
}

/// Stitches per-pair gadgets over an interlacing collection (odd length) into
/// `(t+3)/2` top-to-top paths whose spread is at least the sum of the gadget
/// gaps, with consecutive differences in `[1, 2D]`.
///
/// `gadgets[j]` belongs to `coll.pairs[j]` (bottom-to-top). Counting pairs
/// from the top, odd-numbered pairs take their gadget between the pair tops
/// and even-numbered pairs between the pair bottoms; with odd `t` this means
/// even bottom-to-top indices connect tops.
pub fn stitched_paths(
    sp: &SectionPair,
    coll: &PairCollection,
    gadgets: &[Gadget],
    big_d: u64,
) -> Result<PathFamily> {
    let t = coll.len();
    if t % 2 == 0 {
        return Err(Error::Precondition(format!("stitching needs odd t, got {t}")));
    }
    if coll.mode != CollectionMode::Interlacing {
        return Err(Error::Precondition("stitching needs an interlacing collection".into()));
    }
    coll.check(sp)?;
    if gadgets.len() != t {
        return Err(Error::Precondition("one gadget per pair required".into()));
    }

    // Reorder to the top-down view used by the construction.
    let mut pairs_td: Vec<(Range<u32>, Range<u32>)> = coll.pairs.clone();
    pairs_td.reverse();
    let mut gadgets_td: Vec<&Gadget> = gadgets.iter().collect();
    gadgets_td.reverse();

    let mut d_sum = 0u64;
    let mut span_max = 0u64;
    let mut oriented_gadgets: Vec<(PairRoute, PairRoute, u64)> = Vec::with_capacity(t);
    for (i, ((xr, yr), g)) in pairs_td.iter().zip(&gadgets_td).enumerate() {
        let (want_x, want_y) = if i % 2 == 0 {
            ((Side::X, xr.start), (Side::Y, yr.start))
        } else {
            ((Side::X, xr.end - 1), (Side::Y, yr.end - 1))
        };
        for r in [&g.short, &g.long] {
            for &(side, idx) in r.expand(sp)?.iter() {
                let ok = match side {
                    Side::X => xr.contains(&idx),
                    Side::Y => yr.contains(&idx),
                };
                if !ok {
                    return Err(Error::Precondition(format!(
                        "gadget {i} escapes its pair at {side:?} index {idx}"
                    )));
                }
            }
        }
        let short = oriented(sp, &g.short, want_x)?;
        let long = oriented(sp, &g.long, want_x)?;
        let (s_ends, l_ends) = (short.endpoints(sp)?, long.endpoints(sp)?);
        if s_ends != (want_x, want_y) || l_ends != (want_x, want_y) {
            return Err(Error::Precondition(format!(
                "gadget {i} endpoints {s_ends:?}/{l_ends:?} do not match {want_x:?}..{want_y:?}"
            )));
        }
        let (ls, ll) = (short.length(sp)?, long.length(sp)?);
        if ll <= ls {
            return Err(Error::Precondition(format!(
                "gadget {i} long path ({ll}) not longer than short ({ls})"
            )));
        }
        d_sum += ll - ls;
        span_max = span_max.max((xr.end - xr.start - 1) as u64 + (yr.end - yr.start - 1) as u64);
        oriented_gadgets.push((short, long, ll - ls));
    }
    if big_d < span_max {
        return Err(Error::Precondition(format!(
            "D = {big_d} smaller than the widest pair span {span_max}"
        )));
    }

    let routes = stitch_build(&pairs_td, &oriented_gadgets, 0)?;
    let family = family_from_ordered(sp, (Side::X, 0), (Side::Y, 0), routes)?;
    let spread = family.set.span();
    if spread < d_sum {
        return Err(Error::InvalidRoute(format!(
            "stitched spread {spread} below gadget sum {d_sum}"
        )));
    }
    if family.set.len() > 1 && family.set.gap_hi.unwrap() > 2 * big_d {
        return Err(Error::InvalidRoute("stitched gap exceeds 2D".into()));
    }
    Ok(family)
}

fn stitch_build(
    pairs_td: &[(Range<u32>, Range<u32>)],
    gadgets: &[(PairRoute, PairRoute, u64)],
    x_top: u32,
) -> Result<Vec<PairRoute>> {
    let (xr1, yr1) = &pairs_td[0];
    if pairs_td.len() == 1 {
        let mk = |g: &PairRoute| {
            let mut steps: Vec<PairStep> =
                side_walk(Side::X, x_top, xr1.start).into_iter().collect();
            steps.extend(g.steps.iter().copied());
            steps.extend(side_walk(Side::Y, yr1.start, 0));
            PairRoute::new(steps)
        };
        return Ok(vec![mk(&gadgets[0].0), mk(&gadgets[0].1)]);
    }
    let (xr2, yr2) = &pairs_td[1];
    let connector = |g1: &PairRoute, g2: &PairRoute| -> Vec<PairStep> {
        let mut steps: Vec<PairStep> = side_walk(Side::X, x_top, xr1.start).into_iter().collect();
        steps.extend(g1.steps.iter().copied());
        steps.extend(side_walk(Side::Y, yr1.start, yr2.end - 1));
        // Second gadget runs bottom-to-bottom; traverse it from the y end.
        steps.extend(g2.reversed().steps.iter().copied());
        steps
    };
    let q_short = connector(&gadgets[0].0, &gadgets[1].0);
    let q_long = connector(&gadgets[0].1, &gadgets[1].1);

    let subs = stitch_build(&pairs_td[2..], &gadgets[2..], xr2.end - 1)?;
    let mut out = Vec::with_capacity(subs.len() + 1);
    for r in &subs {
        out.push(cat(&[&q_short, &r.steps]));
    }
    out.push(cat(&[&q_long, &subs.last().unwrap().steps]));
    Ok(out)
}

/// Two paths with far-apart lengths anchored at each end of the pair.
#[derive(Debug, Clone)]
pub struct DistantPaths {
    /// (shorter, longer, difference) between the two tops.
    pub top: (PairRoute, PairRoute, u64),
    /// Same between the two bottoms.
    pub bottom: (PairRoute, PairRoute, u64),
}

/// Finds two top-to-top paths whose lengths differ by `Omega(m)` (and, by
/// flipping the pair, two bottom-to-bottom paths). Dispatches on the greedy
/// extraction: an interlacing residue feeds the ladder, extracted pairs feed
/// the stitching construction with chord-versus-detour gadgets.
pub fn distant_paths(sp: &SectionPair, cfg: &EngineConfig) -> Result<DistantPaths> {
    let m = sp.chord_count() as u64;
    if m < 12 {
        return Err(Error::Precondition(format!("need at least 12 chords, got {m}")));
    }
    let top = distant_top(sp, cfg)?;

    let flipped = sp.subpair(0..sp.x_len(), 0..sp.y_len(), true, true)?;
    let ft = distant_top(&flipped, cfg)?;
    let bottom = (
        unflip_route(&ft.0, sp, &flipped)?,
        unflip_route(&ft.1, sp, &flipped)?,
        ft.2,
    );
    Ok(DistantPaths { top, bottom })
}

fn distant_top(sp: &SectionPair, cfg: &EngineConfig) -> Result<(PairRoute, PairRoute, u64)> {
    let m = sp.chord_count() as u64;
    let mut candidates: Vec<(PairRoute, PairRoute, u64)> = Vec::new();

    // Widest pair of trivial paths.
    let lens: Vec<u64> = (0..sp.chord_count())
        .map(|ci| sp.pair_chord_length(ci))
        .collect::<Result<_>>()?;
    let imin = (0..lens.len()).min_by_key(|&i| (lens[i], i)).unwrap();
    let imax = (0..lens.len()).max_by_key(|&i| (lens[i], std::cmp::Reverse(i))).unwrap();
    if lens[imax] > lens[imin] {
        candidates.push((
            sp.trivial_path(imin),
            sp.trivial_path(imax),
            lens[imax] - lens[imin],
        ));
    }

    match interlacing_pair_extraction(sp)? {
        Extraction::InterlacingFamily(fam) => {
            let flens: Vec<u64> = fam
                .chords
                .iter()
                .map(|&ci| sp.pair_chord_length(ci))
                .collect::<Result<_>>()?;
            let spread = flens.iter().max().unwrap() - flens.iter().min().unwrap();
            let family = rung_ladder_with_policy(sp, &fam, spread + 1, RungPolicy::Widest)?;
            if family.set.len() > 1 {
                let first = family.set.entries().first().unwrap().clone();
                let last = family.set.entries().last().unwrap().clone();
                candidates.push((first.1, last.1, last.0 - first.0));
            }
        }
        Extraction::PairSequence(mut pairs) => {
            if pairs.len() % 2 == 0 {
                let min_i = (0..pairs.len())
                    .min_by_key(|&i| (pairs[i].d_x, i))
                    .unwrap();
                pairs.remove(min_i);
            }
            if !pairs.is_empty() {
                let (coll, gadgets, big_d) = gadgets_from_extracted(sp, &pairs)?;
                let family = stitched_paths(sp, &coll, &gadgets, big_d)?;
                let first = family.set.entries().first().unwrap().clone();
                let last = family.set.entries().last().unwrap().clone();
                candidates.push((first.1, last.1, last.0 - first.0));
            }
        }
    }

    let best = candidates
        .into_iter()
        .max_by_key(|c| c.2)
        .ok_or_else(|| Error::Precondition("no distant path pair found".into()))?;
    if crate::verbose() && (best.2 as f64) < cfg.c_distant * m as f64 {
        eprintln!(
            "distant_paths: achieved gap {} below c_distant*m = {:.2}",
            best.2,
            cfg.c_distant * m as f64
        );
    }
    Ok(best)
}

/// Builds the interlacing collection and chord-versus-detour gadgets from
/// extracted pairs: the short path is one chord, the long path walks the
/// block and crosses the other chord.
fn gadgets_from_extracted(
    sp: &SectionPair,
    pairs: &[ExtractedPair],
) -> Result<(PairCollection, Vec<Gadget>, u64)> {
    // Blocks bottom-to-top on X.
    let mut order: Vec<&ExtractedPair> = pairs.iter().collect();
    order.sort_by(|a, b| sp.chord(b.upper).0.cmp(&sp.chord(a.upper).0));
    let t = order.len();
    let mut ranges = Vec::with_capacity(t);
    let mut gadgets = Vec::with_capacity(t);
    let mut span_max = 0u64;
    for (j, p) in order.iter().enumerate() {
        let (ux, uy) = sp.chord(p.upper);
        let (lx, ly) = sp.chord(p.lower);
        let (ylo, yhi) = (uy.min(ly), uy.max(ly));
        let xr = ux..lx + 1;
        let yr = ylo..yhi + 1;
        span_max = span_max.max((lx - ux) as u64 + (yhi - ylo) as u64);
        // Top-down index i = t-1-j; tops for even i, which with odd t is
        // even j as well.
        let top_anchored = (t - 1 - j) % 2 == 0;
        let (short, long) = if top_anchored {
            // Anchor (X, ux)-(Y, uy): chord vs walk-around through the lower chord.
            let short = PairRoute::new(vec![PairStep::Chord(p.upper)]);
            let mut steps = vec![PairStep::Side { side: Side::X, from: ux, to: lx }];
            steps.push(PairStep::Chord(p.lower));
            steps.extend(side_walk(Side::Y, ly, uy));
            (short, PairRoute::new(steps))
        } else {
            let short = PairRoute::new(vec![PairStep::Chord(p.lower)]);
            let mut steps = vec![PairStep::Side { side: Side::X, from: lx, to: ux }];
            steps.push(PairStep::Chord(p.upper));
            steps.extend(side_walk(Side::Y, uy, ly));
            (short, PairRoute::new(steps))
        };
        ranges.push((xr, yr));
        gadgets.push(Gadget { short, long });
    }
    let coll = PairCollection { pairs: ranges, mode: CollectionMode::Interlacing };
    coll.check(sp)?;
    Ok((coll, gadgets, span_max))
}

/// Maps a route on a fully flipped pair back to the original coordinates.
fn unflip_route(route: &PairRoute, orig: &SectionPair, flipped: &SectionPair) -> Result<PairRoute> {
    let lx = orig.x_len();
    let ly = orig.y_len();
    let steps = route
        .steps
        .iter()
        .map(|s| match *s {
            PairStep::Side { side, from, to } => {
                let l = match side {
                    Side::X => lx,
                    Side::Y => ly,
                };
                Ok(PairStep::Side { side, from: l - 1 - from, to: l - 1 - to })
            }
            PairStep::Chord(ci) => {
                let (fx, fy) = flipped.chord(ci);
                let (xi, yi) = (lx - 1 - fx, ly - 1 - fy);
                orig.find_chord(xi, yi)
                    .map(PairStep::Chord)
                    .ok_or_else(|| Error::InvalidRoute("chord lost in unflip".into()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PairRoute::new(steps))
}

/// Close-length harvest: given chords whose pair lengths all lie in the
/// interval `[j_lo, j_hi]`, produces top-to-top paths with consecutive gaps
/// of order `|J|`, certified inside `[theta_lo*|J|, theta_hi*|J|]`. Returns a
/// one-path degraded family when the input is too thin to certify.
pub fn close_length_paths(
    sp: &SectionPair,
    chord_subset: &[usize],
    j_lo: u64,
    j_hi: u64,
    cfg: &EngineConfig,
) -> Result<PathFamily> {
    if j_hi < j_lo {
        return Err(Error::Precondition("empty length interval".into()));
    }
    if chord_subset.is_empty() {
        return Err(Error::Precondition("no chords supplied".into()));
    }
    let j_size = j_hi - j_lo + 1;
    let work = sp.restrict_chords(chord_subset);
    if !work.is_x_matching() {
        return Err(Error::Precondition("x-side must be a matching".into()));
    }
    for ci in 0..work.chord_count() {
        let l = work.pair_chord_length(ci)?;
        if l < j_lo || l > j_hi {
            return Err(Error::Precondition(format!(
                "chord {:?} has length {l} outside [{j_lo},{j_hi}]",
                work.chord(ci)
            )));
        }
    }
    let e_total = work.chord_count() as u64;

    let fallback = |work: &SectionPair| -> Result<PathFamily> {
        let mut fam = family_from_ordered(
            work,
            (Side::X, 0),
            (Side::Y, 0),
            vec![work.trivial_path(0)],
        )?;
        fam.degraded = true;
        Ok(fam)
    };

    let finish = |work: &SectionPair, family: PathFamily| -> Result<PathFamily> {
        let target = ((cfg.theta_lo * j_size as f64).ceil() as u64).max(1);
        let thinned = thin_to_spacing(&family.set, target)?;
        let lo_bound = target;
        let hi_bound = (cfg.theta_hi * j_size as f64).floor() as u64;
        let ok = match (thinned.actual_gap_lo(), thinned.actual_gap_hi()) {
            (Some(lo), Some(hi)) => lo >= lo_bound && hi <= hi_bound,
            _ => true,
        };
        if !ok || thinned.is_empty() {
            return fallback(work);
        }
        Ok(PathFamily {
            from: (Side::X, 0),
            to: (Side::Y, 0),
            set: thinned.certified(),
            degraded: false,
        })
    };

    let result = if e_total <= j_size {
        fallback(&work)
    } else {
        close_length_inner(&work, j_size, cfg).and_then(|family| match family {
            Some(f) => finish(&work, f),
            None => fallback(&work),
        })
    }?;

    // Re-key chord steps to the caller's pair.
    let entries = result
        .set
        .entries()
        .iter()
        .map(|(l, r)| {
            let steps = r
                .steps
                .iter()
                .map(|s| match *s {
                    PairStep::Chord(ci) => {
                        let (xi, yi) = work.chord(ci);
                        PairStep::Chord(sp.find_chord(xi, yi).expect("chord exists in parent"))
                    }
                    other => other,
                })
                .collect();
            (*l, PairRoute::new(steps))
        })
        .collect::<Vec<_>>();
    Ok(PathFamily {
        from: result.from,
        to: result.to,
        set: LengthSet::new(entries)?.certified(),
        degraded: result.degraded,
    })
}

fn close_length_inner(
    work: &SectionPair,
    j_size: u64,
    cfg: &EngineConfig,
) -> Result<Option<PathFamily>> {
    let lx = work.x_len();
    let js = j_size as u32;

    // Blocks of |J| x-vertices, numbered from the bottom of X.
    let block_of = |xi: u32| -> u32 { (lx - 1 - xi) / js };
    let nblocks = (lx + js - 1) / js;
    let mut block_chords: Vec<Vec<usize>> = vec![Vec::new(); nblocks as usize];
    for ci in 0..work.chord_count() {
        block_chords[block_of(work.chord(ci).0) as usize].push(ci);
    }
    let sum_parity = |p: u32| -> u64 {
        (0..nblocks)
            .filter(|b| b % 2 == p)
            .map(|b| block_chords[b as usize].len() as u64)
            .sum()
    };
    let parity = if sum_parity(0) >= sum_parity(1) { 0 } else { 1 };

    struct Block {
        x_range: Range<u32>,
        y_range: Range<u32>,
        chords: Vec<usize>,
    }
    let mut blocks: Vec<Block> = Vec::new();
    for b in (0..nblocks).filter(|b| b % 2 == parity) {
        let chords = &block_chords[b as usize];
        if chords.is_empty() {
            continue;
        }
        let x_hi = lx - b * js;
        let x_lo = x_hi.saturating_sub(js);
        let ylo = chords.iter().map(|&ci| work.chord(ci).1).min().unwrap();
        let yhi = chords.iter().map(|&ci| work.chord(ci).1).max().unwrap();
        blocks.push(Block {
            x_range: x_lo..x_hi,
            y_range: ylo..yhi + 1,
            chords: chords.clone(),
        });
    }
    if blocks.is_empty() {
        return Ok(None);
    }
    // Blocks are already bottom-to-top (b ascending = x ranges descending).
    blocks.sort_by(|a, b| b.x_range.start.cmp(&a.x_range.start));

    let sparse: Vec<&Block> = blocks.iter().filter(|b| b.chords.len() < 12).collect();
    let dense: Vec<&Block> = blocks.iter().filter(|b| b.chords.len() >= 12).collect();
    let sparse_sum: u64 = sparse.iter().map(|b| b.chords.len() as u64).sum();
    let dense_sum: u64 = dense.iter().map(|b| b.chords.len() as u64).sum();

    if sparse_sum >= dense_sum || dense.is_empty() {
        // One chord per sparse block; same-parity blocks interlace pairwise.
        let mut reps: Vec<usize> = sparse
            .iter()
            .map(|b| *b.chords.iter().min_by_key(|&&ci| work.chord(ci)).unwrap())
            .collect();
        reps.sort_by_key(|&ci| work.chord(ci).0);
        if reps.len() < 3 {
            return Ok(None);
        }
        for w in reps.windows(2) {
            if work.classify_chords(w[0], w[1]) != ChordRel::Interlacing {
                return Err(Error::Precondition(
                    "same-parity block chords fail to interlace".into(),
                ));
            }
        }
        let fam = MonotoneFamily { chords: reps, relation: MonotoneRelation::AllInterlacing };
        let family = rung_ladder_with_policy(work, &fam, j_size, RungPolicy::LexFirst)?;
        Ok(Some(family))
    } else {
        let mut used: Vec<&Block> = dense;
        if used.len() % 2 == 0 {
            // Drop the topmost (its chord count is at most |J| anyway).
            used.pop();
        }
        if used.is_empty() {
            return Ok(None);
        }
        let t = used.len();
        let mut ranges = Vec::with_capacity(t);
        let mut gadgets = Vec::with_capacity(t);
        let mut span_max = 0u64;
        for (j, b) in used.iter().enumerate() {
            let sub = work.subpair(b.x_range.clone(), b.y_range.clone(), false, false)?;
            let dp = distant_paths(&sub, cfg)?;
            let top_anchored = (t - 1 - j) % 2 == 0;
            let (s, l, _) = if top_anchored { dp.top } else { dp.bottom };
            let offset = |r: &PairRoute| -> PairRoute {
                PairRoute::new(
                    r.steps
                        .iter()
                        .map(|st| match *st {
                            PairStep::Side { side, from, to } => {
                                let off = match side {
                                    Side::X => b.x_range.start,
                                    Side::Y => b.y_range.start,
                                };
                                PairStep::Side { side, from: from + off, to: to + off }
                            }
                            PairStep::Chord(ci) => {
                                let (xi, yi) = sub.chord(ci);
                                PairStep::Chord(
                                    work.find_chord(xi + b.x_range.start, yi + b.y_range.start)
                                        .expect("block chord exists in parent"),
                                )
                            }
                        })
                        .collect(),
                )
            };
            span_max = span_max.max(
                (b.x_range.end - b.x_range.start - 1) as u64
                    + (b.y_range.end - b.y_range.start - 1) as u64,
            );
            ranges.push((b.x_range.clone(), b.y_range.clone()));
            gadgets.push(Gadget { short: offset(&s), long: offset(&l) });
        }
        let coll = PairCollection { pairs: ranges, mode: CollectionMode::Interlacing };
        coll.check(work)?;
        let family = stitched_paths(work, &coll, &gadgets, span_max)?;
        Ok(Some(family))
    }
}
