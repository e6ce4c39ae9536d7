//! Ordinal patterns of sliding windows: rank extraction, Lehmer-code
//! integer encoding, pattern counting and the minimal-spread diagnostic.
//!
//! A window `x = (x_1, ..., x_d)` is mapped to the permutation
//! `pi = (pi_1, ..., pi_d)` with `pi_j < pi_k` iff `x_j < x_k`, ties broken
//! in favor of the earlier index. Patterns are encoded as integers in
//! `0..d!-1` so they can be counted in a flat histogram.

use std::collections::BTreeMap;

use crate::error::{Result, SciError};

/// Smallest supported pattern order.
pub const MIN_ORDER: usize = 2;
/// Largest supported pattern order. 10! still fits comfortably in 64 bits
/// and bounds the memory of count storage.
pub const MAX_ORDER: usize = 10;

/// `d!` for `d <= 20`.
pub fn factorial(d: usize) -> u64 {
    (1..=d as u64).product()
}

fn check_order(d: usize) -> Result<()> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&d) {
        return Err(SciError::InvalidInput(format!(
            "pattern order d={d} outside supported range [{MIN_ORDER}, {MAX_ORDER}]"
        )));
    }
    Ok(())
}

fn check_finite(x: &[f64]) -> Result<()> {
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(SciError::InvalidInput(format!(
            "non-finite value {} at position {i}",
            x[i]
        )));
    }
    Ok(())
}

/// The ordinal pattern of a window: its rank vector together with the
/// Lehmer code of that vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalPattern {
    ranks: Vec<u8>,
    code: u64,
}

impl OrdinalPattern {
    /// Build a pattern from an explicit rank vector (must be a permutation
    /// of `1..=d`).
    pub fn from_ranks(ranks: &[u8]) -> Result<Self> {
        let d = ranks.len();
        check_order(d)?;
        let mut seen = vec![false; d];
        for &r in ranks {
            let r = r as usize;
            if r < 1 || r > d || seen[r - 1] {
                return Err(SciError::InvalidInput(format!(
                    "rank vector {ranks:?} is not a permutation of 1..={d}"
                )));
            }
            seen[r - 1] = true;
        }
        let code = lehmer_encode(ranks);
        Ok(Self {
            ranks: ranks.to_vec(),
            code,
        })
    }

    /// Inverse of [`OrdinalPattern::code`].
    pub fn decode(code: u64, d: usize) -> Result<Self> {
        check_order(d)?;
        if code >= factorial(d) {
            return Err(SciError::InvalidInput(format!(
                "code {code} out of range 0..{}",
                factorial(d)
            )));
        }
        let ranks = lehmer_decode(code, d);
        Ok(Self { ranks, code })
    }

    pub fn order(&self) -> usize {
        self.ranks.len()
    }

    /// Rank vector `(pi_1, ..., pi_d)`, each entry in `1..=d`.
    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    /// Integer code in `0..d!-1`; the identity permutation maps to 0.
    pub fn code(&self) -> u64 {
        self.code
    }
}

/// Rank vector of a window under the first-index tie rule: the earlier
/// index receives the smaller rank when values are equal.
pub fn ordinal_pattern(x: &[f64]) -> Result<OrdinalPattern> {
    let d = x.len();
    check_order(d)?;
    check_finite(x)?;
    let ranks = rank_vector(x);
    let code = lehmer_encode(&ranks);
    Ok(OrdinalPattern { ranks, code })
}

// O(d^2) pairwise comparison; d <= 10 so this beats sorting overhead and
// transcribes the defining relation directly.
fn rank_vector(x: &[f64]) -> Vec<u8> {
    let d = x.len();
    let mut ranks = vec![0u8; d];
    for j in 0..d {
        let mut below = 0u8;
        for (k, &v) in x.iter().enumerate() {
            if v < x[j] || (v == x[j] && k < j) {
                below += 1;
            }
        }
        ranks[j] = below + 1;
    }
    ranks
}

/// Lehmer (factorial number system) code of a rank vector; identity -> 0.
fn lehmer_encode(ranks: &[u8]) -> u64 {
    let d = ranks.len();
    let mut code = 0u64;
    let mut weight = factorial(d - 1);
    for j in 0..d - 1 {
        let smaller_after = ranks[j + 1..].iter().filter(|&&r| r < ranks[j]).count() as u64;
        code += smaller_after * weight;
        weight /= (d - 1 - j) as u64;
    }
    code
}

fn lehmer_decode(code: u64, d: usize) -> Vec<u8> {
    let mut remaining: Vec<u8> = (1..=d as u8).collect();
    let mut ranks = Vec::with_capacity(d);
    let mut code = code;
    let mut weight = factorial(d - 1);
    for j in 0..d {
        let digit = (code / weight) as usize;
        code %= weight;
        ranks.push(remaining.remove(digit));
        if j + 1 < d {
            weight /= (d - 1 - j) as u64;
        }
    }
    ranks
}

/// Integer code of a pattern; bijective on `S_d` and stable across runs.
pub fn encode_pattern(p: &OrdinalPattern) -> u64 {
    p.code()
}

/// Minimal spread `ms(x) = min_{j<k} |x_j - x_k|`; zero iff `x` has a tie.
pub fn minimal_spread(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(SciError::InvalidInput(
            "minimal spread needs at least 2 values".into(),
        ));
    }
    check_finite(x)?;
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ms = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok(ms)
}

// Dense array for d <= 8 (8! = 40320 entries); sparse map above.
const DENSE_ORDER_LIMIT: usize = 8;

#[derive(Debug, Clone)]
enum CountStorage {
    Dense(Vec<u64>),
    Sparse(BTreeMap<u64, u64>),
}

/// Histogram of pattern codes over all sliding windows of a series.
#[derive(Debug, Clone)]
pub struct PatternCounts {
    d: usize,
    window_count: usize,
    storage: CountStorage,
}

impl PatternCounts {
    fn new(d: usize) -> Self {
        let storage = if d <= DENSE_ORDER_LIMIT {
            CountStorage::Dense(vec![0u64; factorial(d) as usize])
        } else {
            CountStorage::Sparse(BTreeMap::new())
        };
        Self {
            d,
            window_count: 0,
            storage,
        }
    }

    fn add(&mut self, code: u64) {
        match &mut self.storage {
            CountStorage::Dense(v) => v[code as usize] += 1,
            CountStorage::Sparse(m) => *m.entry(code).or_insert(0) += 1,
        }
        self.window_count += 1;
    }

    pub fn order(&self) -> usize {
        self.d
    }

    /// Number of windows counted (`m - d + 1`).
    pub fn window_count(&self) -> usize {
        self.window_count
    }

    pub fn count(&self, code: u64) -> u64 {
        match &self.storage {
            CountStorage::Dense(v) => v.get(code as usize).copied().unwrap_or(0),
            CountStorage::Sparse(m) => m.get(&code).copied().unwrap_or(0),
        }
    }

    /// Iterate over `(code, count)` pairs with nonzero count, in code order.
    pub fn nonzero(&self) -> Vec<(u64, u64)> {
        match &self.storage {
            CountStorage::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (i as u64, c))
                .collect(),
            CountStorage::Sparse(m) => m.iter().map(|(&k, &v)| (k, v)).collect(),
        }
    }

    /// Dense relative-frequency vector of length `d!`, zero-count patterns
    /// included so entropies are comparable across series. Only available
    /// for orders with dense storage.
    pub fn to_probabilities(&self) -> Result<Vec<f64>> {
        if self.d > DENSE_ORDER_LIMIT {
            return Err(SciError::InvalidInput(format!(
                "dense probability vector not available for d={} (> {DENSE_ORDER_LIMIT})",
                self.d
            )));
        }
        if self.window_count == 0 {
            return Err(SciError::InsufficientData("no windows counted".into()));
        }
        let n = self.window_count as f64;
        match &self.storage {
            CountStorage::Dense(v) => Ok(v.iter().map(|&c| c as f64 / n).collect()),
            CountStorage::Sparse(_) => unreachable!(),
        }
    }
}

/// Codes of all sliding windows of `series`, stride 1, in window order.
pub(crate) fn window_codes(series: &[f64], d: usize) -> Result<Vec<u64>> {
    check_order(d)?;
    check_finite(series)?;
    let m = series.len();
    if m < d {
        return Err(SciError::InsufficientData(format!(
            "series length {m} shorter than pattern order {d}"
        )));
    }
    Ok(series
        .windows(d)
        .map(|w| lehmer_encode(&rank_vector(w)))
        .collect())
}

/// Count patterns over all sliding windows (stride 1) of `series`.
pub fn pattern_counts(series: &[f64], d: usize) -> Result<PatternCounts> {
    let codes = window_codes(series, d)?;
    let mut counts = PatternCounts::new(d);
    for code in codes {
        counts.add(code);
    }
    Ok(counts)
}

pub(crate) fn counts_from_codes(codes: &[u64], d: usize) -> PatternCounts {
    let mut counts = PatternCounts::new(d);
    for &code in codes {
        counts.add(code);
    }
    counts
}

/// Add deterministic uniform jitter in `[-magnitude, magnitude]` to each
/// value; intended for heavily quantized data where ties are artifacts of
/// rounding. Off by default everywhere.
pub fn apply_jitter(series: &mut [f64], magnitude: f64, rng: &mut crate::rng::CounterRng) {
    for v in series.iter_mut() {
        *v += magnitude * (2.0 * rng.next_uniform() - 1.0);
    }
}
