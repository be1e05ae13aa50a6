//! Ground truth and instance sources: brute-force cycle/path spectra, the
//! chained complete-bipartite extremal construction, and seeded random
//! Hamiltonian generators.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::graph::{HamGraph, Pos, VertexId};
use crate::section::{PairVertex, SectionPair, Side};

/// Caps for exhaustive searches. Results are all-or-nothing: a blown cap is
/// an error, never a partial answer.
#[derive(Debug, Clone)]
pub struct OracleLimits {
    pub max_vertices: u32,
    pub max_steps: u64,
    pub time_budget: Duration,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vertices: 18,
            max_steps: 200_000_000,
            time_budget: Duration::from_secs(120),
        }
    }
}

struct Budget {
    steps: u64,
    max_steps: u64,
    deadline: Instant,
}

impl Budget {
    fn new(lim: &OracleLimits) -> Self {
        Budget {
            steps: 0,
            max_steps: lim.max_steps,
            deadline: Instant::now() + lim.time_budget,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(Error::CapExceeded(format!(
                "oracle work cap {} exceeded",
                self.max_steps
            )));
        }
        if self.steps % 8192 == 0 && Instant::now() > self.deadline {
            return Err(Error::CapExceeded("oracle time budget exceeded".into()));
        }
        Ok(())
    }
}

/// Exact set of simple-cycle lengths, by exhaustive backtracking over
/// canonical representations (lowest position as root, fixed direction).
pub fn oracle_cycle_spectrum(g: &HamGraph, lim: &OracleLimits) -> Result<BTreeSet<u64>> {
    if g.n() > lim.max_vertices {
        return Err(Error::CapExceeded(format!(
            "instance has {} vertices, oracle cap is {}",
            g.n(),
            lim.max_vertices
        )));
    }
    let n = g.n() as usize;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for p in 0..g.n() {
        adj[p as usize].push((p + 1) % g.n());
        adj[p as usize].push((p + g.n() - 1) % g.n());
        adj[p as usize].extend_from_slice(g.chord_partners(p));
    }
    let mut budget = Budget::new(lim);
    let mut lengths = BTreeSet::new();
    let mut visited = vec![false; n];
    let mut path: Vec<u32> = Vec::with_capacity(n);

    fn dfs(
        cur: u32,
        root: u32,
        adj: &[Vec<u32>],
        visited: &mut [bool],
        path: &mut Vec<u32>,
        lengths: &mut BTreeSet<u64>,
        budget: &mut Budget,
    ) -> Result<()> {
        for &nb in &adj[cur as usize] {
            budget.tick()?;
            if nb == root && path.len() >= 3 {
                // Count each cycle once: fixed root (minimum position) and
                // direction chosen so the second vertex beats the last.
                if path[1] < cur {
                    lengths.insert(path.len() as u64);
                }
                continue;
            }
            if nb <= root || visited[nb as usize] {
                continue;
            }
            visited[nb as usize] = true;
            path.push(nb);
            dfs(nb, root, adj, visited, path, lengths, budget)?;
            path.pop();
            visited[nb as usize] = false;
        }
        Ok(())
    }

    for root in 0..g.n() {
        visited[root as usize] = true;
        path.push(root);
        dfs(root, root, &adj, &mut visited, &mut path, &mut lengths, &mut budget)?;
        path.pop();
        visited[root as usize] = false;
    }
    Ok(lengths)
}

/// Exact set of simple-path lengths between two pair vertices, using only the
/// pair's side edges and chords.
pub fn oracle_section_paths(
    sp: &SectionPair,
    from: PairVertex,
    to: PairVertex,
    lim: &OracleLimits,
) -> Result<BTreeSet<u64>> {
    let total = sp.x_len() + sp.y_len();
    if total > lim.max_vertices {
        return Err(Error::CapExceeded(format!(
            "section pair has {total} vertices, oracle cap is {}",
            lim.max_vertices
        )));
    }
    let code = |(s, i): PairVertex| -> usize {
        match s {
            Side::X => i as usize,
            Side::Y => (sp.x_len() + i) as usize,
        }
    };
    let nv = total as usize;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for i in 0..sp.x_len().saturating_sub(1) {
        adj[code((Side::X, i))].push(code((Side::X, i + 1)));
        adj[code((Side::X, i + 1))].push(code((Side::X, i)));
    }
    for i in 0..sp.y_len().saturating_sub(1) {
        adj[code((Side::Y, i))].push(code((Side::Y, i + 1)));
        adj[code((Side::Y, i + 1))].push(code((Side::Y, i)));
    }
    for &(xi, yi) in sp.chords() {
        adj[code((Side::X, xi))].push(code((Side::Y, yi)));
        adj[code((Side::Y, yi))].push(code((Side::X, xi)));
    }

    let src = code(from);
    let dst = code(to);
    let mut budget = Budget::new(lim);
    let mut lengths = BTreeSet::new();
    let mut visited = vec![false; nv];

    fn dfs(
        cur: usize,
        dst: usize,
        depth: u64,
        adj: &[Vec<usize>],
        visited: &mut [bool],
        lengths: &mut BTreeSet<u64>,
        budget: &mut Budget,
    ) -> Result<()> {
        if cur == dst {
            lengths.insert(depth);
            return Ok(());
        }
        for &nb in &adj[cur] {
            budget.tick()?;
            if visited[nb] {
                continue;
            }
            visited[nb] = true;
            dfs(nb, dst, depth + 1, adj, visited, lengths, budget)?;
            visited[nb] = false;
        }
        Ok(())
    }

    visited[src] = true;
    dfs(src, dst, 0, &adj, &mut visited, &mut lengths, &mut budget)?;
    Ok(lengths)
}

/// Instance family selector for the generator CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenSpec {
    ChainExtremal { n: u32, k: u32 },
    RandomMinDeg3 { n: u32, extra_chords: u32, seed: u64 },
    RandomRegularHam { n: u32, k: u32, seed: u64 },
}

pub fn gen_instance(spec: GenSpec) -> Result<HamGraph> {
    match spec {
        GenSpec::ChainExtremal { n, k } => gen_chain_extremal(n, k),
        GenSpec::RandomMinDeg3 { n, extra_chords, seed } => {
            gen_random_min_deg3(n, extra_chords, seed)
        }
        GenSpec::RandomRegularHam { n, k, seed } => gen_random_regular(n, k, seed),
    }
}

/// The extremal chain: `n/(2k)` complete bipartite blocks `K_{k,k}` ordered
/// in a cycle, one edge removed per block and consecutive blocks joined so
/// the result is k-regular with an explicit Hamilton cycle. Its cycle
/// spectrum is exactly the even integers in `[4, 2k]` and `[2n/k, n]`.
pub fn gen_chain_extremal(n: u32, k: u32) -> Result<HamGraph> {
    if k < 3 {
        return Err(Error::Precondition(format!("k must be at least 3, got {k}")));
    }
    if n % (2 * k) != 0 {
        return Err(Error::Precondition(format!("2k = {} must divide n = {n}", 2 * k)));
    }
    let copies = n / (2 * k);
    if copies < 2 {
        return Err(Error::Precondition(format!(
            "need at least two blocks: n must be at least {}",
            4 * k
        )));
    }
    // Vertices are labeled by Hamilton position. Block c spans positions
    // [2kc, 2k(c+1)); its internal Hamilton path alternates the two sides:
    // a_1 b_1 a_2 b_2 ... a_k b_k, with a_i at offset 2(i-1) and b_i at
    // 2(i-1)+1. Path edges and the removed edge (a_1, b_k) are excluded;
    // everything else of K_{k,k} becomes a chord.
    let mut chords = Vec::new();
    for c in 0..copies {
        let base = 2 * k * c;
        for i in 1..=k {
            for j in 1..=k {
                if j == i || j + 1 == i || (i == 1 && j == k) {
                    continue;
                }
                let a = base + 2 * (i - 1);
                let b = base + 2 * (j - 1) + 1;
                chords.push((a, b));
            }
        }
    }
    HamGraph::new((0..n).collect(), chords)
}

/// Samples a uniform value in `[0, bound)` by rejection; stable across
/// platforms and releases given the same stream.
pub fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}

fn shuffle<T>(rng: &mut ChaCha8Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_below(rng, (i + 1) as u64) as usize;
        items.swap(i, j);
    }
}

/// Hamilton cycle `0..n-1` plus one uniform chord per degree-2 vertex, then
/// `extra_chords` additional uniform chords. Reproducible from the seed.
pub fn gen_random_min_deg3(n: u32, extra_chords: u32, seed: u64) -> Result<HamGraph> {
    if n < 5 {
        return Err(Error::Precondition("need n >= 5 for random chords".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut deg = vec![0u32; n as usize];
    let add = |set: &mut BTreeSet<(u32, u32)>, deg: &mut [u32], a: u32, b: u32| -> bool {
        if a == b {
            return false;
        }
        let gap = {
            let d = a.abs_diff(b);
            d.min(n - d)
        };
        if gap <= 1 {
            return false;
        }
        if set.insert((a.min(b), a.max(b))) {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
            true
        } else {
            false
        }
    };
    for v in 0..n {
        if deg[v as usize] > 0 {
            continue;
        }
        let mut tries = 0u64;
        loop {
            let u = uniform_below(&mut rng, n as u64) as u32;
            if add(&mut set, &mut deg, v, u) {
                break;
            }
            tries += 1;
            if tries > 64 * n as u64 {
                return Err(Error::Precondition("chord sampling stalled".into()));
            }
        }
    }
    let mut placed = 0;
    let mut tries = 0u64;
    while placed < extra_chords {
        let a = uniform_below(&mut rng, n as u64) as u32;
        let b = uniform_below(&mut rng, n as u64) as u32;
        if add(&mut set, &mut deg, a, b) {
            placed += 1;
        }
        tries += 1;
        if tries > 64 * (n as u64) * (extra_chords as u64 + 1) {
            return Err(Error::Precondition("extra chord sampling stalled".into()));
        }
    }
    HamGraph::new((0..n).collect(), set.into_iter().collect())
}

/// Hamilton cycle plus a random `(k-2)`-regular chord graph avoiding cycle
/// edges (configuration model with whole-sample retries).
pub fn gen_random_regular(n: u32, k: u32, seed: u64) -> Result<HamGraph> {
    if k < 3 {
        return Err(Error::Precondition("k must be at least 3".into()));
    }
    let r = k - 2;
    if (n as u64 * r as u64) % 2 == 1 {
        return Err(Error::Precondition(format!(
            "infeasible parity: n*(k-2) = {} is odd",
            n as u64 * r as u64
        )));
    }
    if n < 2 * k {
        return Err(Error::Precondition("n too small for the chord degree".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..10_000 {
        let mut points: Vec<u32> = (0..n).flat_map(|v| std::iter::repeat(v).take(r as usize)).collect();
        shuffle(&mut rng, &mut points);
        let mut set: BTreeSet<(u32, u32)> = BTreeSet::new();
        for pair in points.chunks(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b {
                continue 'attempt;
            }
            let gap = {
                let d = a.abs_diff(b);
                d.min(n - d)
            };
            if gap <= 1 {
                continue 'attempt;
            }
            if !set.insert((a.min(b), a.max(b))) {
                continue 'attempt;
            }
        }
        return HamGraph::new((0..n).collect(), set.into_iter().collect());
    }
    Err(Error::Precondition(format!(
        "could not realize a {r}-regular chord graph on {n} vertices"
    )))
}

/// The 3-cube with an explicit Hamilton order; spectrum {4, 6, 8}.
pub fn cube_q3() -> HamGraph {
    let order: Vec<VertexId> = vec![0, 1, 3, 2, 6, 7, 5, 4];
    HamGraph::new(order, vec![(0, 2), (1, 5), (3, 7), (4, 6)]).unwrap()
}

/// K4 presented on its Hamilton cycle.
pub fn complete_k4() -> HamGraph {
    HamGraph::new(vec![0, 1, 2, 3], vec![(0, 2), (1, 3)]).unwrap()
}

/// A random section-pair embedded in a host cycle, shaped like a block: the
/// x-side runs forward from position 0, the y-side runs backward from the far
/// end, and two buffer vertices keep pair chords off the cycle edges.
/// With `x_matching`, each x-index carries at most one chord.
pub fn gen_random_section_pair(
    rng: &mut ChaCha8Rng,
    max_side: u32,
    x_matching: bool,
) -> (HamGraph, SectionPair) {
    let lx = 2 + uniform_below(rng, (max_side - 1) as u64) as u32;
    let ly = 2 + uniform_below(rng, (max_side - 1) as u64) as u32;
    let n = lx + ly + 2;
    let x: Vec<Pos> = (0..lx).collect();
    let y: Vec<Pos> = (0..ly).map(|i| lx + ly - i).collect();

    let mut chords: BTreeSet<(u32, u32)> = BTreeSet::new();
    if x_matching {
        for xi in 0..lx {
            if uniform_below(rng, 4) < 3 {
                let yi = uniform_below(rng, ly as u64) as u32;
                chords.insert((xi, yi));
            }
        }
    } else {
        let m = 1 + uniform_below(rng, (lx * 2) as u64);
        for _ in 0..m {
            let xi = uniform_below(rng, lx as u64) as u32;
            let yi = uniform_below(rng, ly as u64) as u32;
            chords.insert((xi, yi));
        }
    }

    let graph_chords: Vec<(VertexId, VertexId)> = chords
        .iter()
        .map(|&(xi, yi)| (x[xi as usize], y[yi as usize]))
        .collect();
    let host = HamGraph::new((0..n).collect(), graph_chords).unwrap();
    let pair = SectionPair::from_sides(x, y, chords.into_iter().collect()).unwrap();
    (host, pair)
}
