//! The spectrum driver: scale selection with a derandomized block offset,
//! good-vertex bookkeeping, rerouting of interlacing collections, and the
//! per-block harvest that assembles a cycle-length spectrum with witnesses.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::graph::{
    expand_route, realize_route, Dir, HamGraph, Pos, RouteDescriptor, RouteStep,
};
use crate::harvest::many_lengths_over_parallel;
use crate::section::{
    make_section_pair, CollectionMode, PairCollection, SectionPair, Side,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KRule {
    /// ceil(sqrt(log2 n))
    SqrtLogN,
    Fixed(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsRule {
    /// sqrt(log2 log2 m / log2 m)
    SqrtLogLogOverLog,
    Fixed(f64),
}

/// Tunable constants of the pipeline. The defaults are the constants
/// extractable from the underlying arguments; acceptance tests treat them as
/// configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub c_split: f64,
    pub c_distant: f64,
    pub c_close: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub c_hall: f64,
    pub min_m: u64,
    pub min_n: u64,
    pub k_rule: KRule,
    pub eps_rule: EpsRule,
    pub c_induction: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            c_split: 1.0 / 400.0,
            c_distant: 1.0 / 8.0,
            c_close: 1.0 / 400.0,
            theta_lo: 0.25,
            theta_hi: 7.0,
            c_hall: 0.25,
            min_m: 12,
            min_n: 4,
            k_rule: KRule::SqrtLogN,
            eps_rule: EpsRule::SqrtLogLogOverLog,
            c_induction: 4.0,
        }
    }
}

impl EngineConfig {
    pub fn k_for(&self, n: u64) -> u32 {
        match self.k_rule {
            KRule::Fixed(k) => k.max(1),
            KRule::SqrtLogN => {
                let l = (n.max(2) as f64).log2();
                (l.sqrt().ceil() as u32).max(1)
            }
        }
    }

    pub fn eps_for(&self, m: u64) -> f64 {
        match self.eps_rule {
            EpsRule::Fixed(e) => e.max(1e-6),
            EpsRule::SqrtLogLogOverLog => {
                let lm = (m.max(4) as f64).log2();
                (lm.log2() / lm).sqrt().clamp(1e-6, 1.0)
            }
        }
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<EngineConfig> {
        let mut cfg = EngineConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::Parse {
                line: lineno + 1,
                msg: format!("expected key=value, got '{line}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Parse {
                line: lineno + 1,
                msg: format!("bad value '{value}' for {what}"),
            };
            match key {
                "c_split" => cfg.c_split = value.parse().map_err(|_| bad(key))?,
                "c_distant" => cfg.c_distant = value.parse().map_err(|_| bad(key))?,
                "c_close" => cfg.c_close = value.parse().map_err(|_| bad(key))?,
                "theta_lo" => cfg.theta_lo = value.parse().map_err(|_| bad(key))?,
                "theta_hi" => cfg.theta_hi = value.parse().map_err(|_| bad(key))?,
                "c_hall" => cfg.c_hall = value.parse().map_err(|_| bad(key))?,
                "min_m" => cfg.min_m = value.parse().map_err(|_| bad(key))?,
                "min_n" => cfg.min_n = value.parse().map_err(|_| bad(key))?,
                "c_induction" => cfg.c_induction = value.parse().map_err(|_| bad(key))?,
                "k_fn" => {
                    cfg.k_rule = if value == "sqrt_log" {
                        KRule::SqrtLogN
                    } else if let Some(v) = value.strip_prefix("fixed:") {
                        KRule::Fixed(v.parse().map_err(|_| bad(key))?)
                    } else {
                        return Err(bad(key));
                    };
                }
                "eps_fn" => {
                    cfg.eps_rule = if value == "sqrt_loglog" {
                        EpsRule::SqrtLogLogOverLog
                    } else if let Some(v) = value.strip_prefix("fixed:") {
                        EpsRule::Fixed(v.parse().map_err(|_| bad(key))?)
                    } else {
                        return Err(bad(key));
                    };
                }
                _ => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("unknown config key '{key}'"),
                    })
                }
            }
        }
        if cfg.theta_lo >= cfg.theta_hi {
            return Err(Error::Precondition("theta_lo must be below theta_hi".into()));
        }
        Ok(cfg)
    }

    pub fn serialize(&self) -> String {
        let k = match self.k_rule {
            KRule::SqrtLogN => "sqrt_log".to_string(),
            KRule::Fixed(v) => format!("fixed:{v}"),
        };
        let e = match self.eps_rule {
            EpsRule::SqrtLogLogOverLog => "sqrt_loglog".to_string(),
            EpsRule::Fixed(v) => format!("fixed:{v}"),
        };
        format!(
            "c_split = {}\nc_distant = {}\nc_close = {}\ntheta_lo = {}\ntheta_hi = {}\nc_hall = {}\nmin_m = {}\nmin_n = {}\nk_fn = {}\neps_fn = {}\nc_induction = {}\n",
            self.c_split,
            self.c_distant,
            self.c_close,
            self.theta_lo,
            self.theta_hi,
            self.c_hall,
            self.min_m,
            self.min_n,
            k,
            e,
            self.c_induction
        )
    }
}

/// Scale, blocks, and good vertices for one instance at the chosen offset.
#[derive(Debug, Clone)]
pub struct ScaleSelection {
    pub ell: u64,
    /// Chosen chord partner per position (minimum cycle length, then smaller
    /// partner position).
    pub chosen: Vec<Pos>,
    /// Positions whose chosen chord length falls in the selected class.
    pub heavy: Vec<Pos>,
    pub offset: Pos,
    /// Number of full blocks of 4*ell vertices.
    pub blocks: u32,
    pub good_count: u64,
    /// Good vertices per block index.
    pub good_by_block: Vec<Vec<Pos>>,
    /// Block indices holding at least ell / (4 log2 n) good vertices.
    pub selected: Vec<u32>,
}

impl ScaleSelection {
    pub fn block_size(&self) -> u64 {
        4 * self.ell
    }

    pub fn block_start(&self, n: u32, index: u32) -> Pos {
        ((self.offset as u64 + self.block_size() * index as u64) % n as u64) as Pos
    }
}

fn chord_gap(n: u32, p: Pos, q: Pos) -> u32 {
    let d = p.abs_diff(q);
    d.min(n - d)
}

/// Picks the chord per vertex, the dyadic scale, and a block offset whose
/// good-vertex count meets the expectation bound (the random offset of the
/// argument is derandomized by maximizing over all start positions).
pub fn select_scale_and_blocks(g: &HamGraph, cfg: &EngineConfig) -> Result<ScaleSelection> {
    crate::graph::validate_instance(g, true)?;
    let n = g.n();
    if (n as u64) < cfg.min_n {
        return Err(Error::InstanceTooSmall(format!(
            "n = {n} below configured floor {}",
            cfg.min_n
        )));
    }
    let log_n = (n as f64).log2();

    let chosen: Vec<Pos> = (0..n)
        .map(|p| {
            *g.chord_partners(p)
                .iter()
                .min_by_key(|&&q| (chord_gap(n, p, q), q))
                .expect("theorem-grade instance has a chord at every vertex")
        })
        .collect();

    // Dyadic classes [ell, 2 ell]; the top class is stretched to n/2 so every
    // chord length lands somewhere.
    let mut classes: Vec<(u64, u64, u64)> = Vec::new();
    let mut ell = 1u64;
    while 4 * ell <= n as u64 {
        classes.push((ell, ell, 2 * ell));
        ell *= 2;
    }
    if classes.is_empty() {
        return Err(Error::InstanceTooSmall("no dyadic class fits".into()));
    }
    let top = classes.len() - 1;
    classes[top].2 = classes[top].2.max(n as u64 / 2);

    let (ell, heavy) = classes
        .iter()
        .map(|&(ell, lo, hi)| {
            let heavy: Vec<Pos> = (0..n)
                .filter(|&p| {
                    let l = chord_gap(n, p, chosen[p as usize]) as u64;
                    l >= lo && l <= hi
                })
                .collect();
            (ell, heavy)
        })
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .unwrap();
    if (heavy.len() as f64) * log_n < n as f64 {
        return Err(Error::InstanceTooSmall(format!(
            "largest chord-length class holds {} vertices, below n/log2(n)",
            heavy.len()
        )));
    }

    let block = 4 * ell;
    let s = (n as u64 / block) as u32;

    // Good-offset windows: vertex v with chord endpoints (first, first+gap)
    // in one block and in different halves contributes, for every block slot,
    // a contiguous window of offsets.
    let mut diff = vec![0i64; n as usize + 1];
    let mut add_window = |first: Pos, gap: u32| {
        let gap = gap as u64;
        if gap == 0 || gap >= block {
            return;
        }
        let r0 = (2 * ell).saturating_sub(gap);
        let r1 = (2 * ell).min(block - gap);
        if r0 >= r1 {
            return;
        }
        for j in 0..s as u64 {
            // Offsets (first - 4*ell*j - r) mod n for r in [r0, r1).
            let base = (first as u64 + 2 * n as u64 - block * j) % n as u64;
            let o_lo = (base + n as u64 - (r1 - 1)) % n as u64;
            let len = r1 - r0;
            // Interval [o_lo, o_lo + len) modulo n.
            let a = o_lo as usize;
            let b = o_lo + len;
            if b <= n as u64 {
                diff[a] += 1;
                diff[b as usize] -= 1;
            } else {
                diff[a] += 1;
                diff[n as usize] -= 1;
                diff[0] += 1;
                diff[(b - n as u64) as usize] -= 1;
            }
        }
    };
    for &p in &heavy {
        let q = chosen[p as usize];
        let fwd = (q + n - p) % n;
        add_window(p, fwd);
        add_window(q, n - fwd);
    }
    let mut best_offset = 0u32;
    let mut best_count = i64::MIN;
    let mut acc = 0i64;
    for o in 0..n {
        acc += diff[o as usize];
        if acc > best_count {
            best_count = acc;
            best_offset = o;
        }
    }
    let needed = (n as f64 / (8.0 * log_n)).ceil() as i64;
    if best_count < needed {
        return Err(Error::InstanceTooSmall(format!(
            "best offset yields {best_count} good vertices, below {needed}"
        )));
    }

    // Recompute good vertices directly at the chosen offset.
    let offset = best_offset;
    let mut good_by_block: Vec<Vec<Pos>> = vec![Vec::new(); s as usize];
    let mut good_count = 0u64;
    for p in 0..n {
        let q = chosen[p as usize];
        let rel_p = (p as u64 + n as u64 - offset as u64) % n as u64;
        let rel_q = (q as u64 + n as u64 - offset as u64) % n as u64;
        let (bp, bq) = (rel_p / block, rel_q / block);
        if bp != bq || bp >= s as u64 {
            continue;
        }
        if (rel_p % block < 2 * ell) != (rel_q % block < 2 * ell) {
            good_by_block[bp as usize].push(p);
            good_count += 1;
        }
    }
    debug_assert!(good_count as i64 >= best_count);

    let block_floor = ell as f64 / (4.0 * log_n);
    let selected: Vec<u32> = (0..s)
        .filter(|&b| good_by_block[b as usize].len() as f64 >= block_floor)
        .collect();

    Ok(ScaleSelection {
        ell,
        chosen,
        heavy,
        offset,
        blocks: s,
        good_count,
        good_by_block,
        selected,
    })
}

/// Turns an interlacing collection parallel by rerouting the pair spine over
/// one chord from each of the two bottom pairs. The remaining pairs, indexed
/// from the third, become a parallel collection of the new pair; the tops are
/// preserved. Needs at least 3 interlacing pairs and a spine edge between the
/// two side bottoms.
pub fn reroute_if_interlacing(
    g: &HamGraph,
    sp: &SectionPair,
    coll: &PairCollection,
) -> Result<(SectionPair, PairCollection)> {
    if coll.mode == CollectionMode::Parallel {
        return Ok((sp.clone(), coll.clone()));
    }
    if coll.len() < 3 {
        return Err(Error::Precondition(format!(
            "rerouting needs at least 3 interlacing pairs, got {}",
            coll.len()
        )));
    }
    let bottom_x = *sp.x_positions().last().unwrap();
    let bottom_y = *sp.y_positions().last().unwrap();
    if chord_gap(g.n(), bottom_x, bottom_y) != 1 {
        return Err(Error::Precondition(
            "side bottoms are not joined by a spine edge".into(),
        ));
    }

    let pick = |pair: &(Range<u32>, Range<u32>)| -> Result<(u32, u32)> {
        sp.chords_in(&pair.0, &pair.1)
            .into_iter()
            .map(|ci| sp.chord(ci))
            .min()
            .ok_or_else(|| Error::Precondition("collection pair has no chord".into()))
    };
    let (x1, y1) = pick(&coll.pairs[0])?;
    let (x2, y2) = pick(&coll.pairs[1])?;

    let xs = sp.x_positions();
    let ys = sp.y_positions();
    let x_len = sp.x_len();
    let y_len = sp.y_len();

    let new_x: Vec<Pos> = xs[..=x2 as usize].to_vec();
    let mut new_y: Vec<Pos> = ys[..=y1 as usize].to_vec();
    new_y.extend_from_slice(&xs[x1 as usize..]);
    new_y.extend(ys[y2 as usize..].iter().rev());

    // Remap a y-index that survives in the reversed tail segment.
    let y_remap = |yi: u32| -> u32 { (y1 + 1) + (x_len - x1) + (y_len - 1 - yi) };

    let mut chords = Vec::new();
    for (xr, yr) in &coll.pairs[2..] {
        for ci in sp.chords_in(xr, yr) {
            let (xi, yi) = sp.chord(ci);
            chords.push((xi, y_remap(yi)));
        }
    }
    let new_sp = SectionPair::from_sides(new_x, new_y, chords)?;

    let pairs: Vec<(Range<u32>, Range<u32>)> = coll.pairs[2..]
        .iter()
        .map(|(xr, yr)| (xr.clone(), y_remap(yr.end - 1)..y_remap(yr.start) + 1))
        .collect();
    let new_coll = PairCollection { pairs, mode: CollectionMode::Parallel };
    new_coll.check(&new_sp)?;
    Ok((new_sp, new_coll))
}

/// Per-block diagnostics.
#[derive(Debug, Clone)]
pub struct BlockStat {
    pub index: u32,
    pub chords: u64,
    pub family: usize,
    pub branch: String,
}

#[derive(Debug, Clone, Default)]
pub struct EngineStats {
    pub n: u32,
    pub ell: u64,
    pub heavy: u64,
    pub offset: Pos,
    pub good: u64,
    pub blocks: u32,
    pub blocks_selected: u32,
    pub block_stats: Vec<BlockStat>,
    pub degraded: Option<String>,
}

/// The final product: distinct cycle lengths with realized witnesses.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub lengths: Vec<(u64, RouteDescriptor)>,
    pub stats: EngineStats,
    pub config: EngineConfig,
}

impl SpectrumReport {
    pub fn lengths_only(&self) -> Vec<u64> {
        self.lengths.iter().map(|e| e.0).collect()
    }
}

struct BlockWork {
    index: u32,
    start: Pos,
    end: Pos,
    entries: BTreeMap<u64, RouteDescriptor>,
}

/// Computes the cycle-length spectrum: scale and block selection, per-block
/// path families between the block endpoints, and a staircase combination of
/// one path choice per selected block through the fixed remainder of the
/// cycle. Every emitted length carries a realized witness.
pub fn full_spectrum(g: &HamGraph, cfg: &EngineConfig) -> Result<SpectrumReport> {
    crate::graph::validate_instance(g, true)?;
    let n = g.n();
    let mut stats = EngineStats { n, ..EngineStats::default() };

    let sel = match select_scale_and_blocks(g, cfg) {
        Ok(sel) => sel,
        Err(Error::InstanceTooSmall(msg)) => {
            stats.degraded = Some(msg);
            let w = realize_route(g, &RouteDescriptor::full_cycle())?;
            return Ok(SpectrumReport {
                lengths: vec![(w.length, w.route)],
                stats,
                config: cfg.clone(),
            });
        }
        Err(e) => return Err(e),
    };
    stats.ell = sel.ell;
    stats.heavy = sel.heavy.len() as u64;
    stats.offset = sel.offset;
    stats.good = sel.good_count;
    stats.blocks = sel.blocks;
    stats.blocks_selected = sel.selected.len() as u32;

    let block = sel.block_size() as u32;
    let half = block / 2;
    let mut works: Vec<BlockWork> = Vec::new();
    for &bi in &sel.selected {
        let start = sel.block_start(n, bi);
        let end = ((start as u64 + block as u64 - 1) % n as u64) as Pos;
        let mid = ((start as u64 + half as u64 - 1) % n as u64) as Pos;
        let rel = |p: Pos| (p as u64 + n as u64 - start as u64) % n as u64;

        let good = &sel.good_by_block[bi as usize];
        let good_first: Vec<Pos> = good
            .iter()
            .copied()
            .filter(|&p| rel(p) < half as u64)
            .collect();
        let good_second: Vec<Pos> =
            good.iter().copied().filter(|&p| rel(p) >= half as u64).collect();
        let x_is_first = good_first.len() >= good_second.len();
        let good_x = if x_is_first { &good_first } else { &good_second };

        let kept: std::collections::HashSet<(Pos, Pos)> = good_x
            .iter()
            .map(|&p| {
                let q = sel.chosen[p as usize];
                (p.min(q), p.max(q))
            })
            .collect();
        let (x_arc, y_arc) = if x_is_first {
            ((start, mid, Dir::Fwd), (end, ((mid as u64 + 1) % n as u64) as Pos, Dir::Bwd))
        } else {
            ((end, ((mid as u64 + 1) % n as u64) as Pos, Dir::Bwd), (start, mid, Dir::Fwd))
        };
        // Good chords give each x-vertex at most one chord already; the
        // pruning pass keeps that contract explicit.
        let sp = make_section_pair(g, x_arc, y_arc, |a, b| {
            kept.contains(&(a.min(b), a.max(b)))
        })?
        .prune_matching_x();
        debug_assert!(sp.is_x_matching());
        let m = sp.chord_count() as u64;

        let mut entries: BTreeMap<u64, RouteDescriptor> = BTreeMap::new();
        let insert = |entries: &mut BTreeMap<u64, RouteDescriptor>,
                          route: RouteDescriptor|
         -> Result<()> {
            let w = realize_route(g, &route)?;
            let seq = expand_route(g, &route)?;
            let (s0, e0) = (seq[0], *seq.last().unwrap());
            if !(s0 == start && e0 == end || s0 == end && e0 == start) {
                return Err(Error::InvalidRoute("block path endpoints drifted".into()));
            }
            let route = if s0 == start {
                route
            } else {
                reverse_descriptor(&route)
            };
            entries.entry(w.length).or_insert(route);
            Ok(())
        };

        // Block spine.
        insert(
            &mut entries,
            RouteDescriptor::open(vec![RouteStep::Arc { from: start, to: end, dir: Dir::Fwd }]),
        )?;
        // Every kept chord's trivial path.
        for ci in 0..sp.chord_count() {
            insert(&mut entries, sp.trivial_path(ci).lift(&sp, g)?)?;
        }
        // The structural machinery, when the block is rich enough.
        let mut branch = String::from("trivial");
        if m >= cfg.min_m {
            match block_machinery(g, &sp, cfg) {
                Ok((routes, tag)) => {
                    for r in routes {
                        insert(&mut entries, r)?;
                    }
                    branch = tag;
                }
                Err(e) => {
                    branch = format!("degraded({e})");
                }
            }
        }
        stats.block_stats.push(BlockStat {
            index: bi,
            chords: m,
            family: entries.len(),
            branch,
        });
        works.push(BlockWork { index: bi, start, end, entries });
    }

    // Staircase-combine one path choice per block; the remainder of the
    // Hamilton cycle is fixed.
    let mut lengths: BTreeMap<u64, RouteDescriptor> = BTreeMap::new();
    if !works.is_empty() {
        works.sort_by_key(|w| w.index);
        let sets: Vec<crate::sumset::LengthSet<Vec<(usize, RouteDescriptor)>>> = works
            .iter()
            .enumerate()
            .map(|(wi, w)| {
                crate::sumset::LengthSet::new(
                    w.entries
                        .iter()
                        .map(|(l, r)| (*l, vec![(wi, r.clone())]))
                        .collect(),
                )
                .expect("block entries are sorted")
            })
            .collect();
        let combined = crate::sumset::combine_gapped(&sets, 1, u64::MAX, |a, b| {
            let mut v = a.clone();
            v.extend(b.iter().cloned());
            v
        })?;
        for (total, choice) in combined.entries() {
            let mut steps: Vec<RouteStep> = Vec::new();
            for (wi, w) in works.iter().enumerate() {
                let route = &choice
                    .iter()
                    .find(|(i, _)| *i == wi)
                    .expect("one choice per block")
                    .1;
                steps.extend(route.steps.iter().copied());
                let next_start = works[(wi + 1) % works.len()].start;
                steps.push(RouteStep::Arc { from: w.end, to: next_start, dir: Dir::Fwd });
            }
            let route = RouteDescriptor::closed(steps);
            let w = realize_route(g, &route)?;
            let connectors = n as u64 - works.len() as u64 * (block as u64 - 1);
            debug_assert_eq!(w.length, total + connectors);
            lengths.entry(w.length).or_insert(route);
        }
    }
    // The Hamilton cycle itself is always available.
    let ham = realize_route(g, &RouteDescriptor::full_cycle())?;
    lengths.entry(ham.length).or_insert(ham.route);

    Ok(SpectrumReport {
        lengths: lengths.into_iter().collect(),
        stats,
        config: cfg.clone(),
    })
}

fn reverse_descriptor(r: &RouteDescriptor) -> RouteDescriptor {
    let steps = r
        .steps
        .iter()
        .rev()
        .map(|s| match *s {
            RouteStep::Arc { from, to, dir } => RouteStep::Arc {
                from: to,
                to: from,
                dir: match dir {
                    Dir::Fwd => Dir::Bwd,
                    Dir::Bwd => Dir::Fwd,
                },
            },
            RouteStep::Chord { from, to } => RouteStep::Chord { from: to, to: from },
        })
        .collect();
    RouteDescriptor { steps, closed: r.closed }
}

/// Runs the structural pipeline on one block pair: initial split, rerouting
/// when the collection interlaces, then the iterated parallel-collection
/// harvest. A heavy vertex short-circuits into its star of distinct trivial
/// lengths.
fn block_machinery(
    g: &HamGraph,
    sp: &SectionPair,
    cfg: &EngineConfig,
) -> Result<(Vec<RouteDescriptor>, String)> {
    let k = cfg.k_for(g.n() as u64);
    match crate::decompose::initial_split(sp, k, cfg) {
        Err(Error::HeavyVertex { side, index, .. }) => {
            let mut out = Vec::new();
            let mut seen = std::collections::HashSet::new();
            for ci in 0..sp.chord_count() {
                let (xi, yi) = sp.chord(ci);
                let hit = match side {
                    Side::X => xi == index,
                    Side::Y => yi == index,
                };
                if hit && seen.insert(sp.pair_chord_length(ci)?) {
                    out.push(sp.trivial_path(ci).lift(sp, g)?);
                }
            }
            Ok((out, "star".into()))
        }
        Err(e) => Err(e),
        Ok(coll) => {
            let (sp2, coll2) = reroute_if_interlacing(g, sp, &coll)?;
            let (family, tag) = many_lengths_over_parallel(&sp2, &coll2, cfg)?;
            let mut out = Vec::new();
            for (_, route) in family.set.entries() {
                out.push(route.lift(&sp2, g)?);
            }
            Ok((out, tag))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_instance;
    use crate::testbed::{
        complete_k4, cube_q3, gen_chain_extremal, gen_random_min_deg3, gen_random_regular,
        oracle_cycle_spectrum, OracleLimits,
    };

    #[test]
    fn config_parse_round_trip() {
        let cfg = EngineConfig::default();
        let text = cfg.serialize();
        let parsed = EngineConfig::parse(&text).unwrap();
        assert_eq!(parsed, cfg);
        assert!(EngineConfig::parse("nonsense").is_err());
        assert!(EngineConfig::parse("theta_lo = 9\ntheta_hi = 1\n").is_err());
        let fixed = EngineConfig::parse("k_fn = fixed:5\n").unwrap();
        assert_eq!(fixed.k_for(1 << 20), 5);
    }

    #[test]
    fn scale_selection_on_chain() {
        let g = gen_chain_extremal(48, 3).unwrap();
        let sel = select_scale_and_blocks(&g, &EngineConfig::default()).unwrap();
        // Within-block chord lengths are at most 2k - 1 = 5, so the scale
        // stays small.
        assert!(sel.ell <= 4, "ell = {}", sel.ell);
        let needed = (48.0 / (8.0 * (48.0f64).log2())).ceil() as u64;
        assert!(sel.good_count >= needed);
        for &b in &sel.selected {
            assert!(!sel.good_by_block[b as usize].is_empty());
        }
    }

    #[test]
    fn scale_selection_heavy_class_floor() {
        let g = gen_random_min_deg3(10_000, 0, 1).unwrap();
        let sel = select_scale_and_blocks(&g, &EngineConfig::default()).unwrap();
        let floor = (10_000f64 / (10_000f64).log2()).ceil() as usize;
        assert!(sel.heavy.len() >= floor, "heavy {} < {floor}", sel.heavy.len());
    }

    #[test]
    fn scale_selection_rejects_tiny() {
        let g = complete_k4();
        let cfg = EngineConfig { min_n: 10, ..EngineConfig::default() };
        assert!(matches!(
            select_scale_and_blocks(&g, &cfg),
            Err(Error::InstanceTooSmall(_))
        ));
    }

    #[test]
    fn reroute_identity_on_parallel() {
        let g = load_instance("12 2\n0 1 2 3 4 5 6 7 8 9 10 11\n1 10\n3 8\n").unwrap();
        let sp = make_section_pair(&g, (0, 5, Dir::Fwd), (11, 6, Dir::Bwd), |_, _| true).unwrap();
        let coll = PairCollection {
            pairs: vec![(3..4, 3..4), (1..2, 1..2)],
            mode: CollectionMode::Parallel,
        };
        let (sp2, coll2) = reroute_if_interlacing(&g, &sp, &coll).unwrap();
        assert_eq!(sp2.chords(), sp.chords());
        assert_eq!(coll2.len(), 2);
    }

    #[test]
    fn reroute_interlacing_fixture() {
        // Five interlacing chords in a 22-cycle block; x side 0..10,
        // y side 21..11, chord i joins x-index 2i to y-index 2(4-i)+1.
        let mut lines = String::from("22 5\n");
        lines.push_str(&(0..22).map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
        lines.push('\n');
        let mut pairs = Vec::new();
        for i in 0..5u32 {
            let xi = 2 * i;
            let yi = 2 * (4 - i) + 1;
            let xpos = xi;
            let ypos = 21 - yi;
            pairs.push((xi, yi));
            lines.push_str(&format!("{xpos} {ypos}\n"));
        }
        let g = load_instance(&lines).unwrap();
        let sp = make_section_pair(&g, (0, 10, Dir::Fwd), (21, 11, Dir::Bwd), |_, _| true).unwrap();
        for &(xi, yi) in &pairs {
            assert!(sp.find_chord(xi, yi).is_some());
        }
        let coll = PairCollection {
            pairs: (0..5u32)
                .map(|i| {
                    let xi = 2 * (4 - i);
                    let yi = 2 * i + 1;
                    (xi..xi + 1, yi..yi + 1)
                })
                .collect(),
            mode: CollectionMode::Interlacing,
        };
        coll.check(&sp).unwrap();
        let (sp2, coll2) = reroute_if_interlacing(&g, &sp, &coll).unwrap();
        assert_eq!(coll2.mode, CollectionMode::Parallel);
        assert_eq!(coll2.len(), 3);
        coll2.check(&sp2).unwrap();
        assert_eq!(sp2.chord_count(), 3);
        // Tops preserved: lifted trivial paths still realize on g.
        for ci in 0..sp2.chord_count() {
            let lifted = sp2.trivial_path(ci).lift(&sp2, &g).unwrap();
            crate::graph::realize_route(&g, &lifted).unwrap();
        }
        let few = PairCollection {
            pairs: coll.pairs[..2].to_vec(),
            mode: CollectionMode::Interlacing,
        };
        assert!(reroute_if_interlacing(&g, &sp, &few).is_err());
    }

    fn assert_sound(g: &HamGraph, rep: &SpectrumReport, lim: &OracleLimits) {
        let oracle = oracle_cycle_spectrum(g, lim).unwrap();
        for (l, route) in &rep.lengths {
            assert!(oracle.contains(l), "length {l} not in oracle");
            let w = realize_route(g, route).unwrap();
            assert_eq!(w.length, *l);
            assert!(route.closed);
        }
    }

    #[test]
    fn spectrum_of_k4_matches_oracle() {
        let g = complete_k4();
        let rep = full_spectrum(&g, &EngineConfig::default()).unwrap();
        assert_sound(&g, &rep, &OracleLimits::default());
        assert_eq!(rep.lengths_only(), vec![3, 4]);
    }

    #[test]
    fn spectrum_of_cube_within_oracle() {
        let g = cube_q3();
        let rep = full_spectrum(&g, &EngineConfig::default()).unwrap();
        assert_sound(&g, &rep, &OracleLimits::default());
        assert!(rep.lengths_only().contains(&8));
    }

    #[test]
    fn spectrum_of_chain_24_in_characterized_set() {
        let g = gen_chain_extremal(24, 3).unwrap();
        let rep = full_spectrum(&g, &EngineConfig::default()).unwrap();
        let allowed: Vec<u64> = vec![4, 6, 16, 18, 20, 22, 24];
        for (l, _) in &rep.lengths {
            assert!(allowed.contains(l), "length {l} outside the extremal set");
        }
        assert!(rep.lengths_only().len() >= 2);
    }

    #[test]
    fn spectrum_of_random_regular_sound() {
        for seed in [1, 2, 3] {
            let g = gen_random_regular(14, 3, seed).unwrap();
            let rep = full_spectrum(&g, &EngineConfig::default()).unwrap();
            assert_sound(&g, &rep, &OracleLimits::default());
        }
    }

    #[test]
    fn spectrum_reroutes_antipodal_matching() {
        // Every chord is a diameter, so the block pair is fully interlacing
        // and the engine must reroute before harvesting. The rerouted spine
        // turns the equal-length chords into distinct trivial lengths.
        let half = 256u32;
        let chords: Vec<(u32, u32)> = (0..half).map(|i| (i, i + half)).collect();
        let g = HamGraph::new((0..2 * half).collect(), chords).unwrap();
        let rep = full_spectrum(&g, &EngineConfig::default()).unwrap();
        for b in &rep.stats.block_stats {
            assert!(
                b.branch != "star" && !b.branch.starts_with("degraded"),
                "block {} took branch {}",
                b.index,
                b.branch
            );
        }
        assert!(rep.lengths.len() >= 3, "lengths {:?}", rep.lengths_only());
        for (l, route) in &rep.lengths {
            assert_eq!(realize_route(&g, route).unwrap().length, *l);
        }
        let text = crate::report::write_report(&rep, &g);
        assert_eq!(crate::report::verify_report(&g, &text).unwrap(), rep.lengths.len());
    }

    #[test]
    fn spectrum_grows_with_n() {
        let small = gen_random_regular(256, 3, 5).unwrap();
        let big = gen_random_regular(2048, 3, 5).unwrap();
        let cfg = EngineConfig::default();
        let a = full_spectrum(&small, &cfg).unwrap().lengths_only().len();
        let b = full_spectrum(&big, &cfg).unwrap().lengths_only().len();
        assert!(b > a, "spectrum did not grow: {a} vs {b}");
    }
}
