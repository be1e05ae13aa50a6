//! Arithmetic over certified length sets: gap-preserving sum-set selection,
//! the spread-times-close product, and greedy thinning to a target spacing.
//! Precondition checks are always on, so certified fields can be trusted
//! downstream.

use std::rc::Rc;

use crate::error::{Error, Result};

/// A lazily composed witness: a leaf id into some caller-side table, or the
/// concatenation of two child references. Expansion walks leaves in order.
#[derive(Debug, Clone)]
pub enum WitnessRef {
    Leaf(usize),
    Cat(Rc<WitnessRef>, Rc<WitnessRef>),
}

impl WitnessRef {
    pub fn cat(a: &WitnessRef, b: &WitnessRef) -> WitnessRef {
        WitnessRef::Cat(Rc::new(a.clone()), Rc::new(b.clone()))
    }

    /// In-order leaf ids.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        fn walk(w: &WitnessRef, out: &mut Vec<usize>) {
            match w {
                WitnessRef::Leaf(i) => out.push(*i),
                WitnessRef::Cat(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }
}

/// A set of integer lengths, strictly increasing, each carrying a witness
/// payload, with optional certified gap and covering-interval bounds.
#[derive(Debug, Clone)]
pub struct LengthSet<W> {
    entries: Vec<(u64, W)>,
    /// Certified lower/upper bounds on consecutive gaps, when known.
    pub gap_lo: Option<u64>,
    pub gap_hi: Option<u64>,
    /// Certified bound: `max - min < interval_size`.
    pub interval_size: Option<u64>,
}

impl<W> LengthSet<W> {
    pub fn new(entries: Vec<(u64, W)>) -> Result<Self> {
        for w in entries.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Precondition(format!(
                    "lengths not strictly increasing: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        if entries.is_empty() {
            return Err(Error::Precondition("empty length set".into()));
        }
        Ok(LengthSet { entries, gap_lo: None, gap_hi: None, interval_size: None })
    }

    /// Builds from possibly unsorted, possibly duplicated items, keeping the
    /// first witness seen per length.
    pub fn from_unsorted(items: Vec<(u64, W)>) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        for (l, w) in items {
            map.entry(l).or_insert(w);
        }
        Self::new(map.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u64, W)] {
        &self.entries
    }

    pub fn lengths(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn min(&self) -> u64 {
        self.entries[0].0
    }

    pub fn max(&self) -> u64 {
        self.entries[self.entries.len() - 1].0
    }

    pub fn span(&self) -> u64 {
        self.max() - self.min()
    }

    /// Actual smallest consecutive gap; `None` for singletons.
    pub fn actual_gap_lo(&self) -> Option<u64> {
        self.entries.windows(2).map(|w| w[1].0 - w[0].0).min()
    }

    pub fn actual_gap_hi(&self) -> Option<u64> {
        self.entries.windows(2).map(|w| w[1].0 - w[0].0).max()
    }

    /// Recomputes gap and interval certificates from the entries.
    pub fn certified(mut self) -> Self {
        self.gap_lo = self.actual_gap_lo();
        self.gap_hi = self.actual_gap_hi();
        self.interval_size = Some(self.span() + 1);
        self
    }

    /// Shifts every length by a constant.
    pub fn translate(mut self, delta: u64) -> Self {
        for e in &mut self.entries {
            e.0 += delta;
        }
        self
    }

    pub fn map_witness<V>(self, f: impl Fn(W) -> V) -> LengthSet<V> {
        LengthSet {
            entries: self.entries.into_iter().map(|(l, w)| (l, f(w))).collect(),
            gap_lo: self.gap_lo,
            gap_hi: self.gap_hi,
            interval_size: self.interval_size,
        }
    }
}

fn check_gaps<W>(set: &LengthSet<W>, a: u64, b: u64, which: usize) -> Result<()> {
    for w in set.entries.windows(2) {
        let gap = w[1].0 - w[0].0;
        if gap < a || gap > b {
            return Err(Error::Precondition(format!(
                "set {which}: consecutive lengths {} and {} have gap {gap} outside [{a},{b}]",
                w[0].0, w[1].0
            )));
        }
    }
    Ok(())
}

/// Selects a subset of the sum-set of size `1 + sum(|L_i| - 1)` whose
/// consecutive gaps stay in `[a, b]`, by the staircase walk: all of the
/// accumulated set paired with the new minimum, then the accumulated maximum
/// paired with the rest. Witnesses compose by concatenation.
pub fn combine_gapped<W: Clone>(
    sets: &[LengthSet<W>],
    a: u64,
    b: u64,
    compose: impl Fn(&W, &W) -> W,
) -> Result<LengthSet<W>> {
    if sets.is_empty() {
        return Err(Error::Precondition("combine_gapped needs at least one set".into()));
    }
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::Precondition(format!("set {i} is empty")));
        }
        check_gaps(s, a, b, i)?;
    }
    let mut acc: Vec<(u64, W)> = sets[0].entries.to_vec();
    for s in &sets[1..] {
        let (y0, w0) = &s.entries[0];
        let mut next: Vec<(u64, W)> =
            acc.iter().map(|(x, wx)| (x + y0, compose(wx, w0))).collect();
        let (x_last, wx_last) = acc.last().unwrap().clone();
        for (y, wy) in &s.entries[1..] {
            next.push((x_last + y, compose(&wx_last, wy)));
        }
        acc = next;
    }
    let expected = 1 + sets.iter().map(|s| s.len() - 1).sum::<usize>();
    let out = LengthSet::new(acc)?.certified();
    debug_assert_eq!(out.len(), expected);
    Ok(out)
}

/// Full sum-set of a spread set and a close set: `|L1| * |L2|` distinct
/// elements inside an interval of size `ell1 + ell2`. Requires `L1` inside an
/// interval of size `ell1` with pairwise gaps at least `ell2`, and `L2`
/// inside an interval of size `ell2`.
pub fn spread_close_product<W: Clone>(
    l1: &LengthSet<W>,
    l2: &LengthSet<W>,
    ell1: u64,
    ell2: u64,
    compose: impl Fn(&W, &W) -> W,
) -> Result<LengthSet<W>> {
    if l1.span() + 1 > ell1 {
        return Err(Error::Precondition(format!(
            "first set spans [{}, {}], larger than interval size {ell1}",
            l1.min(),
            l1.max()
        )));
    }
    if l2.span() + 1 > ell2 {
        return Err(Error::Precondition(format!(
            "second set spans [{}, {}], larger than interval size {ell2}",
            l2.min(),
            l2.max()
        )));
    }
    for w in l1.entries.windows(2) {
        let gap = w[1].0 - w[0].0;
        if gap < ell2 {
            return Err(Error::Precondition(format!(
                "first-set elements {} and {} are only {gap} apart, need at least {ell2}",
                w[0].0, w[1].0
            )));
        }
    }
    let mut items = Vec::with_capacity(l1.len() * l2.len());
    for (x, wx) in &l1.entries {
        for (y, wy) in &l2.entries {
            items.push((x + y, compose(wx, wy)));
        }
    }
    let expected = l1.len() * l2.len();
    let out = LengthSet::from_unsorted(items)?;
    assert_eq!(out.len(), expected, "product elements must be distinct");
    let mut out = out.certified();
    out.interval_size = Some(ell1 + ell2);
    Ok(out)
}

/// Greedy thinning: keep the smallest element, then repeatedly the first
/// element at least `target` beyond the last kept one. Keeps at least
/// `floor((|L|-1) / ceil(target/gap_lo)) + 1` elements, with gaps in
/// `[max(target, gap_lo), target - 1 + gap_hi]`.
pub fn thin_to_spacing<W: Clone>(l: &LengthSet<W>, target: u64) -> Result<LengthSet<W>> {
    if target == 0 {
        return Err(Error::Precondition("thinning target must be positive".into()));
    }
    let gap_lo = l.actual_gap_lo().unwrap_or(u64::MAX);
    if target <= gap_lo {
        return Ok(l.clone());
    }
    let mut kept: Vec<(u64, W)> = vec![l.entries[0].clone()];
    for e in &l.entries[1..] {
        if e.0 >= kept.last().unwrap().0 + target {
            kept.push(e.clone());
        }
    }
    Ok(LengthSet::new(kept)?.certified())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare(v: &[u64]) -> LengthSet<()> {
        LengthSet::new(v.iter().map(|&l| (l, ())).collect()).unwrap()
    }

    fn u(_: &(), _: &()) -> () {}

    /// Independent oracle: the exact sum-set by full enumeration.
    fn brute_sumset(sets: &[Vec<u64>]) -> std::collections::BTreeSet<u64> {
        let mut acc: std::collections::BTreeSet<u64> = [0u64].into_iter().collect();
        for s in sets {
            acc = acc
                .iter()
                .flat_map(|&x| s.iter().map(move |&y| x + y))
                .collect();
        }
        acc
    }

    #[test]
    fn combine_staircase_example() {
        let out = combine_gapped(&[bare(&[0, 3, 6]), bare(&[0, 4])], 3, 4, u).unwrap();
        assert_eq!(out.lengths().collect::<Vec<_>>(), vec![0, 3, 6, 10]);
        assert_eq!(out.gap_lo, Some(3));
        assert_eq!(out.gap_hi, Some(4));
        let brute = brute_sumset(&[vec![0, 3, 6], vec![0, 4]]);
        assert!(out.lengths().all(|l| brute.contains(&l)));
    }

    #[test]
    fn combine_single_set_unchanged() {
        let out = combine_gapped(&[bare(&[2, 5, 9])], 3, 4, u).unwrap();
        assert_eq!(out.lengths().collect::<Vec<_>>(), vec![2, 5, 9]);
    }

    #[test]
    fn combine_uniform_progression() {
        let sets: Vec<_> = (0..5).map(|_| bare(&[0, 7])).collect();
        let out = combine_gapped(&sets, 7, 7, u).unwrap();
        assert_eq!(out.lengths().collect::<Vec<_>>(), vec![0, 7, 14, 21, 28, 35]);
    }

    #[test]
    fn combine_rejects_bad_gaps() {
        assert!(combine_gapped(&[bare(&[0, 2, 9])], 3, 4, u).is_err());
    }

    #[test]
    fn product_example() {
        let out =
            spread_close_product(&bare(&[0, 7, 14]), &bare(&[0, 2, 5]), 15, 7, u).unwrap();
        assert_eq!(
            out.lengths().collect::<Vec<_>>(),
            vec![0, 2, 5, 7, 9, 12, 14, 16, 19]
        );
        assert_eq!(out.interval_size, Some(22));
        assert_eq!(
            brute_sumset(&[vec![0, 7, 14], vec![0, 2, 5]]),
            out.lengths().collect()
        );
    }

    #[test]
    fn product_with_singleton_translates() {
        let out = spread_close_product(&bare(&[1, 9]), &bare(&[4]), 10, 1, u).unwrap();
        assert_eq!(out.lengths().collect::<Vec<_>>(), vec![5, 13]);
    }

    #[test]
    fn product_rejects_close_spread_set() {
        let err = spread_close_product(&bare(&[0, 5]), &bare(&[0, 2, 5]), 10, 7, u).unwrap_err();
        assert!(err.to_string().contains("5 apart"));
    }

    #[test]
    fn thin_uniform() {
        let v: Vec<u64> = (0..100).collect();
        let out = thin_to_spacing(&bare(&v), 10).unwrap();
        assert_eq!(
            out.lengths().collect::<Vec<_>>(),
            (0..10).map(|i| i * 10).collect::<Vec<_>>()
        );
    }

    #[test]
    fn thin_step_three() {
        let v: Vec<u64> = (0..100).map(|i| i * 3).collect();
        let out = thin_to_spacing(&bare(&v), 10).unwrap();
        // Kept gaps are multiples of 3 that reach the target, so exactly 12.
        assert_eq!(out.gap_lo, Some(12));
        assert_eq!(out.gap_hi, Some(12));
        let floor = (v.len() as u64 - 1) / (10u64.div_ceil(3)) + 1;
        assert!(out.len() as u64 >= floor);
        assert_eq!(out.len(), 25);
    }

    #[test]
    fn thin_below_gap_is_noop() {
        let out = thin_to_spacing(&bare(&[0, 5, 10, 15]), 4).unwrap();
        assert_eq!(out.len(), 4);
        assert!(thin_to_spacing(&bare(&[0, 5]), 0).is_err());
    }

    #[test]
    fn witness_ref_leaf_order() {
        let a = WitnessRef::Leaf(1);
        let b = WitnessRef::Leaf(2);
        let c = WitnessRef::cat(&WitnessRef::cat(&a, &b), &WitnessRef::Leaf(3));
        assert_eq!(c.leaves(), vec![1, 2, 3]);
    }
}
