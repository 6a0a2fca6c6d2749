//! Verification-path size bounds and a brute-force oracle that checks them.
//!
//! For a message of `n` tokens and a quote of `t` tokens the path holds at
//! most `t(⌈log n⌉ − ⌈log t⌉ − 1) + 2^⌈log t⌉` hashes, at most
//! `2⌈log n⌉ − 2` when the quote is contiguous (`n > 2`), and never more than
//! `⌈n/2⌉`. Logarithms are base 2 and `⌈log 1⌉ = 0`.
//!
//! The oracle builds the tree for a fixed `n`-token message once and runs
//! the real quoting machinery over every candidate index set, keeping the
//! largest path seen.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hash::{CountingHash, Sha256Hash};
use crate::index_set::IndexSet;
use crate::merkle::{build_tree, MerkleTree};
use crate::quoter::{collect_required, mark_flags, quote_with, sign_with};
use crate::sigscheme::{keygen, ED25519};
use crate::tokenizer::{TokenSequence, WHITESPACE_V1};
use crate::verifier::count_verify_hashes;

pub const DEFAULT_ARBITRARY_LIMIT: usize = 16;
pub const DEFAULT_CONTIGUOUS_LIMIT: usize = 256;

/// `⌈log₂ x⌉` for `x ≥ 1`.
pub fn ceil_log2(x: usize) -> u32 {
    assert!(x >= 1, "log of zero");
    x.next_power_of_two().trailing_zeros()
}

fn check_domain(n: usize, t: usize) -> Result<()> {
    if t == 0 || t > n {
        return Err(Error::Domain(format!(
            "need 1 <= t <= n, got n = {n}, t = {t}"
        )));
    }
    Ok(())
}

/// Worst-case path size for an arbitrary `t`-token quote.
pub fn bound_arbitrary(n: usize, t: usize) -> Result<u64> {
    check_domain(n, t)?;
    let (ln, lt) = (i128::from(ceil_log2(n)), i128::from(ceil_log2(t)));
    let value = t as i128 * (ln - lt - 1) + (1i128 << lt);
    Ok(u64::try_from(value).expect("bound is non-negative"))
}

/// Worst-case path size for a contiguous quote, defined for `n > 2`.
pub fn bound_contiguous(n: usize) -> Result<u64> {
    if n <= 2 {
        return Err(Error::Domain(format!(
            "contiguous bound needs n > 2, got n = {n}"
        )));
    }
    Ok(2 * u64::from(ceil_log2(n)) - 2)
}

/// Worst-case path size over all quotes: `⌈n/2⌉`.
pub fn bound_halfmessage(n: usize) -> u64 {
    n.div_ceil(2) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub arbitrary: usize,
    pub contiguous: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            arbitrary: DEFAULT_ARBITRARY_LIMIT,
            contiguous: DEFAULT_CONTIGUOUS_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub n: usize,
    pub t: usize,
    pub contiguous: bool,
    pub bound: u64,
    pub observed_max: u64,
    /// An index set achieving `observed_max`.
    pub witness: IndexSet,
    /// False when `observed_max` comes from sampling and is only a lower
    /// bound on the true worst case.
    pub exhaustive: bool,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "n,t,contiguous,bound,observed_max,witness";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.t,
            self.contiguous,
            self.bound,
            self.observed_max,
            self.witness.display_ranges(";")
        )
    }

    pub fn slack(&self) -> i64 {
        self.bound as i64 - self.observed_max as i64
    }
}

/// The bound a report is checked against: the contiguous bound for
/// contiguous quotes when `n > 2`, the arbitrary bound otherwise.
pub fn applicable_bound(n: usize, t: usize, contiguous: bool) -> Result<u64> {
    check_domain(n, t)?;
    if contiguous && n > 2 {
        bound_contiguous(n)
    } else {
        bound_arbitrary(n, t)
    }
}

/// Computes path sizes for quotes of a fixed `n`-token message.
pub struct PathSizer {
    tree: MerkleTree,
}

impl PathSizer {
    pub fn new(n: usize) -> Result<Self> {
        let message = TokenSequence::from_parts((0..n).map(|i| format!("t{i}")))?;
        Ok(PathSizer {
            tree: build_tree(&message, &Sha256Hash),
        })
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    /// Number of hashes in the quote signature for `indices`.
    pub fn path_len(&self, indices: &IndexSet) -> Result<u64> {
        let flags = mark_flags(self.tree.shape(), indices)?;
        Ok(collect_required(&self.tree, &flags)?.len() as u64)
    }
}

// Larger path wins; ties go to the lexicographically smaller index list.
fn better(a: (u64, Vec<usize>), b: (u64, Vec<usize>)) -> (u64, Vec<usize>) {
    match a.0.cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if a.1 <= b.1 {
                a
            } else {
                b
            }
        }
    }
}

/// Advance `c` to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn worst_subset(sizer: &PathSizer, t: usize) -> Result<(u64, Vec<usize>)> {
    let n = sizer.n();
    // Split the work on the smallest quoted index.
    (0..=n - t)
        .into_par_iter()
        .map(|first| -> Result<(u64, Vec<usize>)> {
            let mut best: Option<(u64, Vec<usize>)> = None;
            let rest = n - first - 1;
            let mut comb: Vec<usize> = (0..t - 1).collect();
            loop {
                let mut idx = Vec::with_capacity(t);
                idx.push(first);
                idx.extend(comb.iter().map(|&c| c + first + 1));
                let size = sizer.path_len(&IndexSet::from_indices(idx.iter().copied())?)?;
                best = Some(match best {
                    None => (size, idx),
                    Some(b) => better(b, (size, idx)),
                });
                if !next_combination(&mut comb, rest) {
                    break;
                }
            }
            Ok(best.expect("at least one combination"))
        })
        .try_reduce_with(|a, b| Ok(better(a, b)))
        .expect("non-empty range")
}

fn worst_window(sizer: &PathSizer, t: usize) -> Result<(u64, Vec<usize>)> {
    let n = sizer.n();
    (0..=n - t)
        .into_par_iter()
        .map(|start| -> Result<(u64, Vec<usize>)> {
            let idx: Vec<usize> = (start..start + t).collect();
            let size = sizer.path_len(&IndexSet::from_range(start..start + t)?)?;
            Ok((size, idx))
        })
        .try_reduce_with(|a, b| Ok(better(a, b)))
        .expect("non-empty range")
}

/// Exhaustive worst case over all `t`-subsets (or all `t`-windows when
/// `contiguous_only`) of an `n`-token message, with the default limits.
pub fn oracle_worst_case(n: usize, t: usize, contiguous_only: bool) -> Result<BoundReport> {
    oracle_worst_case_with(n, t, contiguous_only, OracleLimits::default())
}

pub fn oracle_worst_case_with(
    n: usize,
    t: usize,
    contiguous_only: bool,
    limits: OracleLimits,
) -> Result<BoundReport> {
    check_domain(n, t)?;
    let limit = if contiguous_only {
        limits.contiguous
    } else {
        limits.arbitrary
    };
    if n > limit {
        return Err(Error::LimitExceeded { n, limit });
    }
    let sizer = PathSizer::new(n)?;
    let (observed_max, witness) = if contiguous_only {
        worst_window(&sizer, t)?
    } else {
        worst_subset(&sizer, t)?
    };
    Ok(BoundReport {
        n,
        t,
        contiguous: contiguous_only,
        bound: applicable_bound(n, t, contiguous_only)?,
        observed_max,
        witness: IndexSet::from_indices(witness)?,
        exhaustive: true,
    })
}

/// Seeded random search for large `n`. The result is a lower bound on the
/// true worst case.
pub fn oracle_sampled(
    n: usize,
    t: usize,
    contiguous_only: bool,
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    check_domain(n, t)?;
    let sizer = PathSizer::new(n)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut best: Option<(u64, Vec<usize>)> = None;
    for _ in 0..samples.max(1) {
        let mut idx: Vec<usize> = if contiguous_only {
            let start = rng.gen_range(0..=n - t);
            (start..start + t).collect()
        } else {
            sample(&mut rng, n, t).into_vec()
        };
        idx.sort_unstable();
        let size = sizer.path_len(&IndexSet::from_indices(idx.iter().copied())?)?;
        best = Some(match best {
            None => (size, idx),
            Some(b) => better(b, (size, idx)),
        });
    }
    let (observed_max, witness) = best.expect("at least one sample");
    Ok(BoundReport {
        n,
        t,
        contiguous: contiguous_only,
        bound: applicable_bound(n, t, contiguous_only)?,
        observed_max,
        witness: IndexSet::from_indices(witness)?,
        exhaustive: false,
    })
}

/// How much the arbitrary-quote bound overcounts the exhaustive worst case.
/// Fails if the bound is violated or overcounts by more than `t`.
pub fn slack_check(n: usize, t: usize) -> Result<u64> {
    let report = oracle_worst_case(n, t, false)?;
    if report.observed_max > report.bound {
        return Err(Error::BoundViolated {
            n,
            t,
            bound: report.bound,
            observed: report.observed_max,
        });
    }
    let slack = report.bound - report.observed_max;
    if slack > t as u64 {
        return Err(Error::SlackExceeded { n, t, slack });
    }
    Ok(slack)
}

/// Largest path over every non-empty quote of an `n`-token message.
pub fn worst_over_all_quotes(n: usize) -> Result<(u64, IndexSet)> {
    let limit = DEFAULT_ARBITRARY_LIMIT;
    if n == 0 || n > limit {
        return Err(Error::LimitExceeded { n, limit });
    }
    let mut best: Option<(u64, Vec<usize>)> = None;
    for t in 1..=n {
        let report = oracle_worst_case(n, t, false)?;
        let cand = (report.observed_max, report.witness.iter().collect());
        best = Some(match best {
            None => cand,
            Some(b) => better(b, cand),
        });
    }
    let (size, idx) = best.expect("n >= 1");
    Ok((size, IndexSet::from_indices(idx)?))
}

/// Hash evaluations spent by each party for an `n`-token message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashCounts {
    pub sign: u64,
    pub quote: u64,
    /// Verifying a quote of the first token, the deepest leaf.
    pub verify_single: u64,
    /// Verifying a quote that drops only the last token; `None` for `n = 1`.
    pub verify_all_but_one: Option<u64>,
    pub verify_full: u64,
}

/// Measure hash counts with an instrumented backend, running the real
/// signing, quoting and verification code paths.
pub fn measure_hash_counts(n: usize) -> Result<HashCounts> {
    let message = TokenSequence::from_parts((0..n).map(|i| format!("t{i}")))?;
    let mut rng = ChaCha20Rng::seed_from_u64(n as u64);
    let key = keygen(ED25519, &mut rng)?;
    let counting = CountingHash::new(Sha256Hash);

    let full = sign_with(&counting, &message, &key.secret, WHITESPACE_V1)?;
    let sign = counting.take();

    let single = IndexSet::from_indices([0])?;
    let single_sig = quote_with(&counting, &message, &single, &full)?;
    let quote = counting.take();

    let verify_single = count_verify_hashes(&message.select(&single)?, &single_sig)?;
    let verify_full = count_verify_hashes(&message, &full)?;
    let verify_all_but_one = if n > 1 {
        let most = IndexSet::from_range(0..n - 1)?;
        let sig = quote_with(&counting, &message, &most, &full)?;
        Some(count_verify_hashes(&message.select(&most)?, &sig)?)
    } else {
        None
    };
    Ok(HashCounts {
        sign,
        quote,
        verify_single,
        verify_all_but_one,
        verify_full,
    })
}
