//! Last-mile search over a sorted array, seeded by a model's position estimate.
//!
//! All searches answer `upper_bound`: the first position whose key is `>=` the
//! query, or `n` if there is none. Window searches look only inside
//! `[lo, hi]` and report when the answer sits on a window boundary they
//! cannot vouch for; [`search_with_widening`] resolves those cases by probing
//! the neighbour and, if needed, re-searching on windows that grow by powers
//! of two away from the violated boundary.

use serde::{Deserialize, Serialize};

/// Counts key comparisons. `()` counts nothing.
pub trait ProbeCounter {
    fn probe(&mut self);
}

impl ProbeCounter for () {
    #[inline(always)]
    fn probe(&mut self) {}
}

impl ProbeCounter for u64 {
    #[inline(always)]
    fn probe(&mut self) {
        *self += 1;
    }
}

/// Predicted position with the inclusive range the answer is expected in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchWindow {
    pub pos: usize,
    pub lo: usize,
    pub hi: usize,
    /// Spread used for the outer probes of quaternary search.
    pub sigma: f64,
}

impl SearchWindow {
    pub fn new(pos: usize, lo: usize, hi: usize, sigma: f64) -> Self {
        assert!(lo <= pos && pos <= hi, "window must satisfy lo <= pos <= hi ({lo}, {pos}, {hi})");
        assert!(sigma >= 0.0, "sigma must be non-negative");
        Self { pos, lo, hi, sigma }
    }

    pub fn width(&self) -> usize {
        self.hi - self.lo + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// The answer may lie below `lo`.
    Low,
    /// The answer may lie above `hi + 1`.
    High,
}

/// Result of a window search: the in-window upper bound (in `lo..=hi + 1`)
/// and whether it touches an unverified window edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowOutcome {
    pub pos: usize,
    pub boundary: Option<Boundary>,
}

impl WindowOutcome {
    fn classify(pos: usize, lo: usize, hi: usize, n: usize) -> Self {
        let boundary = if pos == lo && lo > 0 {
            Some(Boundary::Low)
        } else if pos == hi + 1 && hi + 1 < n {
            Some(Boundary::High)
        } else {
            None
        };
        Self { pos, boundary }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    ModelBiasedBinary,
    BiasedQuaternary,
    Exponential,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::ModelBiasedBinary,
        Strategy::BiasedQuaternary,
        Strategy::Exponential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::ModelBiasedBinary => "model-biased-binary",
            Strategy::BiasedQuaternary => "biased-quaternary",
            Strategy::Exponential => "exponential",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| crate::Error::InvalidArgument(format!("unknown search strategy {s:?}")))
    }
}

/// Textbook binary search over the whole array.
pub fn reference_upper_bound<K: Ord>(array: &[K], key: &K) -> usize {
    let (mut lo, mut hi) = (0usize, array.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if array[mid] < *key {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Binary search of `[l, r)` for the first element `>= key`.
#[inline]
fn binary_in<K: Ord, C: ProbeCounter>(array: &[K], key: &K, mut l: usize, mut r: usize, c: &mut C) -> usize {
    while l < r {
        let mid = l + (r - l) / 2;
        c.probe();
        if array[mid] >= *key {
            r = mid;
        } else {
            l = mid + 1;
        }
    }
    l
}

/// Binary search whose first midpoint is the predicted position.
pub fn model_biased_binary<K: Ord, C: ProbeCounter>(
    array: &[K],
    key: &K,
    window: &SearchWindow,
    counter: &mut C,
) -> WindowOutcome {
    let (mut l, mut r) = (window.lo, window.hi + 1);
    counter.probe();
    if array[window.pos] >= *key {
        r = window.pos;
    } else {
        l = window.pos + 1;
    }
    let pos = binary_in(array, key, l, r, counter);
    WindowOutcome::classify(pos, window.lo, window.hi, array.len())
}

/// Narrows `[l, r)` with ascending probe points, stopping at the first
/// element `>= key`.
#[inline]
fn narrow<K: Ord, C: ProbeCounter>(array: &[K], key: &K, points: [usize; 3], l: &mut usize, r: &mut usize, c: &mut C) {
    let mut last = usize::MAX;
    for p in points {
        if p == last || p < *l || p >= *r {
            continue;
        }
        last = p;
        c.probe();
        if array[p] >= *key {
            *r = p;
            return;
        }
        *l = p + 1;
    }
}

/// Quaternary search whose first three probes are `pos - σ`, `pos`,
/// `pos + σ` (clamped into the window); later rounds split evenly.
pub fn biased_quaternary<K: Ord, C: ProbeCounter>(
    array: &[K],
    key: &K,
    window: &SearchWindow,
    counter: &mut C,
) -> WindowOutcome {
    let (mut l, mut r) = (window.lo, window.hi + 1);
    let spread = if window.sigma.is_finite() {
        window.sigma.ceil().min(array.len() as f64) as usize
    } else {
        array.len()
    };
    let first = [
        window.pos.saturating_sub(spread).max(window.lo),
        window.pos,
        window.pos.saturating_add(spread).min(window.hi),
    ];
    narrow(array, key, first, &mut l, &mut r, counter);
    while r - l >= 4 {
        let q = (r - l) / 4;
        narrow(array, key, [l + q, l + 2 * q, l + 3 * q], &mut l, &mut r, counter);
    }
    let pos = binary_in(array, key, l, r, counter);
    WindowOutcome::classify(pos, window.lo, window.hi, array.len())
}

/// Gallops away from `start_pos` in doubling steps to bracket the answer,
/// then binary searches the bracket. Needs no error bounds.
pub fn exponential_search<K: Ord, C: ProbeCounter>(array: &[K], key: &K, start_pos: usize, counter: &mut C) -> usize {
    let n = array.len();
    if n == 0 {
        return 0;
    }
    let start = start_pos.min(n - 1);
    counter.probe();
    let (l, r) = if array[start] >= *key {
        // answer in [0, start]
        let (mut l, mut r) = (0, start);
        let mut step = 1usize;
        loop {
            if r < step {
                break;
            }
            let i = r - step;
            counter.probe();
            if array[i] < *key {
                l = i + 1;
                break;
            }
            r = i;
            step = step.saturating_mul(2);
        }
        (l, r)
    } else {
        // answer in [start + 1, n]
        let (mut l, mut r) = (start + 1, n);
        let mut step = 1usize;
        loop {
            let i = start.saturating_add(step);
            if i >= n {
                break;
            }
            counter.probe();
            if array[i] >= *key {
                r = i;
                break;
            }
            l = i + 1;
            step = step.saturating_mul(2);
        }
        (l, r)
    };
    binary_in(array, key, l, r, counter)
}

/// Runs `strategy` on `window` and widens until the answer is verified.
/// The result always equals [`reference_upper_bound`].
pub fn search_with_widening<K: Ord, C: ProbeCounter>(
    array: &[K],
    key: &K,
    window: &SearchWindow,
    strategy: Strategy,
    counter: &mut C,
) -> usize {
    let n = array.len();
    if n == 0 {
        return 0;
    }
    let search = |w: &SearchWindow, c: &mut C| match strategy {
        Strategy::ModelBiasedBinary => model_biased_binary(array, key, w, c),
        Strategy::BiasedQuaternary => biased_quaternary(array, key, w, c),
        Strategy::Exponential => {
            let pos = exponential_search(array, key, w.pos, c);
            WindowOutcome { pos, boundary: None }
        }
    };
    let mut w = *window;
    let mut out = search(&w, counter);
    let mut step = 1usize;
    loop {
        match out.boundary {
            None => return out.pos,
            Some(Boundary::Low) => {
                counter.probe();
                if array[w.lo - 1] < *key {
                    return w.lo;
                }
                // answer <= lo - 1
                let hi = w.lo - 1;
                let lo = hi.saturating_sub(step - 1);
                w = SearchWindow::new(hi, lo, hi, w.sigma);
            }
            Some(Boundary::High) => {
                counter.probe();
                if array[w.hi + 1] >= *key {
                    return w.hi + 1;
                }
                // answer >= hi + 2
                let lo = w.hi + 2;
                if lo >= n {
                    return n;
                }
                let hi = lo.saturating_add(step - 1).min(n - 1);
                w = SearchWindow::new(lo, lo, hi, w.sigma);
            }
        }
        step = step.saturating_mul(2);
        out = search(&w, counter);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use super::Strategy;

    #[test]
    fn reference_examples() {
        let a = [1u64, 3, 5];
        assert_eq!(reference_upper_bound(&a, &3), 1);
        assert_eq!(reference_upper_bound(&a, &4), 2);
        assert_eq!(reference_upper_bound(&a, &9), 3);
        assert_eq!(reference_upper_bound(&a, &0), 0);
        assert_eq!(reference_upper_bound::<u64>(&[], &0), 0);
    }

    #[test]
    fn perfect_prediction_one_probe() {
        let a: Vec<u64> = (0..100).collect();
        let mut probes = 0u64;
        let w = SearchWindow::new(50, 50, 50, 0.0);
        let out = model_biased_binary(&a, &50, &w, &mut probes);
        assert_eq!(out.pos, 50);
        assert_eq!(probes, 1);
    }

    #[test]
    fn absent_key_upper_bound() {
        let a: Vec<u64> = (0..20).map(|i| i * 10).collect();
        let b: Vec<u64> = vec![0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 30, 40];
        let w = SearchWindow::new(10, 8, 12, 1.0);
        assert_eq!(model_biased_binary(&b, &25, &w, &mut ()).pos, 11);
        assert_eq!(biased_quaternary(&b, &25, &w, &mut ()).pos, 11);
        assert_eq!(exponential_search(&b, &25, 10, &mut ()), 11);
        assert_eq!(search_with_widening(&a, &1000, &SearchWindow::new(0, 0, 3, 0.0), Strategy::ModelBiasedBinary, &mut ()), 20);
    }

    #[test]
    fn quaternary_sigma_zero_matches_biased_binary() {
        let a: Vec<u64> = (0..500).map(|i| i * 3).collect();
        for key in [0u64, 1, 299, 300, 301, 1497, 2000] {
            for pos in [0usize, 10, 100, 250, 499] {
                let w = SearchWindow::new(pos, pos.saturating_sub(40), (pos + 40).min(499), 0.0);
                let b = model_biased_binary(&a, &key, &w, &mut ());
                let q = biased_quaternary(&a, &key, &w, &mut ());
                assert_eq!(b, q, "key {key} pos {pos}");
            }
        }
    }

    #[test]
    fn quaternary_perfect_prediction_single_round() {
        let a: Vec<u64> = (0..1000).collect();
        let mut probes = 0u64;
        let w = SearchWindow::new(400, 300, 500, 1.0);
        let out = biased_quaternary(&a, &400, &w, &mut probes);
        assert_eq!(out.pos, 400);
        // pos - σ and pos, both inside the first round
        assert!(probes <= 3, "{probes}");
    }

    #[test]
    fn exponential_examples() {
        let a: Vec<u64> = (0..1000).map(|i| i * 2).collect();
        let mut probes = 0u64;
        assert_eq!(exponential_search(&a, &800, 400, &mut probes), 400);
        assert!(probes <= 2, "{probes}");
        assert_eq!(exponential_search(&a, &10_000, 0, &mut ()), 1000);
        assert_eq!(exponential_search(&a, &0, 999, &mut ()), 0);
    }

    fn sorted_unique(v: Vec<u32>) -> Vec<u32> {
        let mut v = v;
        v.sort_unstable();
        v.dedup();
        v
    }

    proptest! {
        #[test]
        fn all_strategies_match_reference(
            raw in prop::collection::vec(0u32..5000, 1..400),
            key in 0u32..5200,
            a in any::<prop::sample::Index>(),
            b in any::<prop::sample::Index>(),
            c in any::<prop::sample::Index>(),
            sigma in 0f64..64.0,
        ) {
            let arr = sorted_unique(raw);
            let n = arr.len();
            let mut pts = [a.index(n), b.index(n), c.index(n)];
            pts.sort_unstable();
            let w = SearchWindow::new(pts[1], pts[0], pts[2], sigma);
            let expect = reference_upper_bound(&arr, &key);
            for s in Strategy::ALL {
                prop_assert_eq!(search_with_widening(&arr, &key, &w, s, &mut ()), expect, "{:?}", s);
            }
            prop_assert_eq!(exponential_search(&arr, &key, pts[1], &mut ()), expect);
        }

        #[test]
        fn in_window_answers_are_exact(
            raw in prop::collection::vec(0u32..5000, 1..400),
            key in 0u32..5200,
            a in any::<prop::sample::Index>(),
            b in any::<prop::sample::Index>(),
            sigma in 0f64..16.0,
        ) {
            let arr = sorted_unique(raw);
            let n = arr.len();
            let expect = reference_upper_bound(&arr, &key);
            let (mut lo, mut hi) = (a.index(n), b.index(n));
            if lo > hi { std::mem::swap(&mut lo, &mut hi); }
            let pos = expect.clamp(lo, hi);
            let w = SearchWindow::new(pos, lo, hi, sigma);
            for out in [model_biased_binary(&arr, &key, &w, &mut ()), biased_quaternary(&arr, &key, &w, &mut ())] {
                if (lo..=hi + 1).contains(&expect) {
                    prop_assert_eq!(out.pos, expect);
                }
            }
        }

        #[test]
        fn biased_binary_probe_bound(
            raw in prop::collection::vec(0u32..100_000, 2..3000),
            k in any::<prop::sample::Index>(),
            a in any::<prop::sample::Index>(),
            b in any::<prop::sample::Index>(),
            p in any::<prop::sample::Index>(),
        ) {
            let arr = sorted_unique(raw);
            let n = arr.len();
            let key = arr[k.index(n)];
            let answer = reference_upper_bound(&arr, &key);
            let (x, y) = (a.index(n), b.index(n));
            let lo = x.min(y).min(answer);
            let hi = x.max(y).max(answer);
            let pos = lo + p.index(hi - lo + 1);
            let w = SearchWindow::new(pos, lo, hi, 0.0);
            let mut probes = 0u64;
            let out = model_biased_binary(&arr, &key, &w, &mut probes);
            prop_assert_eq!(out.pos, answer);
            let width = w.width() as f64;
            prop_assert!(probes as f64 <= width.log2().ceil() + 1.0, "probes {} width {}", probes, width);
        }
    }
}
