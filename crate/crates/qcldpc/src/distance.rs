//! Minimum-distance machinery: a girth-based tree lower bound, exact search
//! over disjoint information sets with a running lower bound, and a
//! randomized information-set upper bound for codes too large to finish
//! exactly.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycles::{girth, Girth};
use crate::error::{Error, Result};
use crate::lifting::{LiftedCode, SparseBinaryMatrix};

/// Where a reported lower bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LowerBoundKind {
    TreeBound,
    Exhaustive,
}

/// Outcome of a distance computation. `exact` is set only when the lower and
/// upper bounds meet; a `witness` is the support of a verified codeword whose
/// weight equals `upper_bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub lower_bound: u32,
    pub lower_provenance: LowerBoundKind,
    pub upper_bound: Option<u32>,
    pub witness: Option<Vec<u32>>,
    pub exact: bool,
    /// True when the enumeration budget ran out before the bounds met.
    pub exhausted: bool,
    pub seed: Option<u64>,
    pub rounds: u64,
}

impl DistanceReport {
    /// Distance is proven to be at least this value.
    pub fn proven_at_least(&self, d: u32) -> bool {
        self.lower_bound >= d
    }
}

/// Tree (girth-based) lower bound on the minimum distance for a code whose
/// minimum column weight is `d_v`:
/// girth 6 gives `d_v + 1`, girth 8 gives `2 d_v`, girth 10 or more gives
/// `d_v^2 + 1`. Falls back to 2 when the girth is 4 or the column weight is
/// below 2.
pub fn tree_lower_bound(code: &LiftedCode) -> u32 {
    let h = code.matrix();
    let d_v = h.column_degrees().into_iter().min().unwrap_or(0) as u32;
    if d_v == 0 {
        return 1;
    }
    if d_v == 1 {
        return 2;
    }
    let g = match girth(h, 10) {
        Girth::Finite(g) => g,
        Girth::GreaterThan(cap) => cap + 2,
    };
    match g {
        0..=5 => 2,
        6..=7 => d_v + 1,
        8..=9 => 2 * d_v,
        _ => d_v * d_v + 1,
    }
}

// ---------------------------------------------------------------------------
// Bit-packed code basis
// ---------------------------------------------------------------------------

/// Generator rows of the code (a basis of the null space of H), bit-packed.
struct CodeBasis {
    n: usize,
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl CodeBasis {
    fn from_parity_check(h: &SparseBinaryMatrix) -> Self {
        let n = h.cols();
        let words = n.div_ceil(64);
        // Reduced row echelon form of H. Rows are kept fully reduced, so a
        // pivot column is set in exactly one stored row; a stored row never
        // contains another row's pivot, which makes one reduction pass enough.
        let mut reduced: Vec<(usize, Vec<u64>)> = Vec::new(); // (pivot col, row)
        for i in 0..h.rows() {
            let mut cur = vec![0u64; words];
            for &j in h.row(i) {
                cur[(j as usize) / 64] |= 1 << (j % 64);
            }
            for (p, row) in &reduced {
                if get_bit(&cur, *p) {
                    xor_into(&mut cur, row);
                }
            }
            if let Some(lead) = lead_bit(&cur) {
                for (_, row) in reduced.iter_mut() {
                    if get_bit(row, lead) {
                        xor_into(row, &cur);
                    }
                }
                reduced.push((lead, cur));
            }
        }
        let mut is_pivot = vec![false; n];
        for (p, _) in &reduced {
            is_pivot[*p] = true;
        }
        // One basis codeword per free column: x_free = 1, pivots follow.
        let mut rows = Vec::with_capacity(n - reduced.len());
        for f in 0..n {
            if is_pivot[f] {
                continue;
            }
            let mut v = vec![0u64; words];
            set_bit(&mut v, f);
            for (p, row) in &reduced {
                if get_bit(row, f) {
                    set_bit(&mut v, *p);
                }
            }
            rows.push(v);
        }
        Self { n, words, rows }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

#[inline]
fn lead_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

#[inline]
fn get_bit(words: &[u64], i: usize) -> bool {
    words[i / 64] >> (i % 64) & 1 == 1
}

#[inline]
fn set_bit(words: &mut [u64], i: usize) {
    words[i / 64] |= 1 << (i % 64);
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
fn weight(words: &[u64]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}

fn support(words: &[u64], n: usize) -> Vec<u32> {
    (0..n).filter(|&i| get_bit(words, i)).map(|i| i as u32).collect()
}

/// Best (lightest, then lexicographically smallest support) codeword seen.
#[derive(Clone, PartialEq, Eq)]
struct Candidate {
    weight: u32,
    support: Vec<u32>,
}

impl Candidate {
    fn better_than(&self, other: &Option<Candidate>) -> bool {
        match other {
            None => true,
            Some(o) => (self.weight, &self.support) < (o.weight, &o.support),
        }
    }
}

fn merge(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x.better_than(&Some(y.clone())) { x } else { y }),
        (x, None) => x,
        (None, y) => y,
    }
}

// ---------------------------------------------------------------------------
// Exact search (disjoint information sets)
// ---------------------------------------------------------------------------

/// One reduction of the basis, systematic on a set of pivot columns disjoint
/// from all earlier sets. `deficiency` is `dim - rank` on those columns.
struct InfoSet {
    rows: Vec<Vec<u64>>,
    deficiency: u32,
}

/// Gauss-Jordan over the allowed columns; returns the transformed basis
/// (same row space) and the pivot columns it is systematic on.
fn reduce_on(basis: &[Vec<u64>], allowed: &[usize]) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut rows: Vec<Vec<u64>> = basis.to_vec();
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for &col in allowed {
        if next_row >= rows.len() {
            break;
        }
        let Some(r) = (next_row..rows.len()).find(|&r| get_bit(&rows[r], col)) else {
            continue;
        };
        rows.swap(next_row, r);
        let pivot_row = rows[next_row].clone();
        for (idx, row) in rows.iter_mut().enumerate() {
            if idx != next_row && get_bit(row, col) {
                xor_into(row, &pivot_row);
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    (rows, pivots)
}

fn build_info_sets(basis: &CodeBasis) -> Vec<InfoSet> {
    let k = basis.dim();
    let mut used = vec![false; basis.n];
    let mut sets = Vec::new();
    loop {
        let allowed: Vec<usize> = (0..basis.n).filter(|&j| !used[j]).collect();
        if allowed.is_empty() {
            break;
        }
        let (rows, pivots) = reduce_on(&basis.rows, &allowed);
        if pivots.is_empty() {
            break;
        }
        for &p in &pivots {
            used[p] = true;
        }
        sets.push(InfoSet {
            rows,
            deficiency: (k - pivots.len()) as u32,
        });
    }
    sets
}

fn binomial_capped(k: u64, w: u64, cap: u64) -> u64 {
    let mut acc: u128 = 1;
    for i in 0..w {
        acc = acc * u128::from(k - i) / u128::from(i + 1);
        if acc > u128::from(cap) {
            return cap.saturating_add(1);
        }
    }
    acc as u64
}

/// Enumerates all sums of exactly `w` rows, reporting the best candidate and
/// the number of codewords visited. Returns None without doing any work when
/// the combination count would exceed `budget`.
fn enumerate_weight(
    rows: &[Vec<u64>],
    w: usize,
    n: usize,
    budget: u64,
) -> Option<(Option<Candidate>, u64)> {
    let k = rows.len();
    if w > k {
        return Some((None, 0));
    }
    if binomial_capped(k as u64, w as u64, budget) > budget {
        return None;
    }
    let words = rows[0].len();
    // Work is split over the first index; each task enumerates combinations
    // of the remaining w-1 rows above it.
    let results: Vec<(Option<Candidate>, u64)> = (0..=(k - w))
        .into_par_iter()
        .map(|first| {
            let mut best: Option<Candidate> = None;
            let mut visited = 0u64;
            let mut acc = vec![0u64; words * w];
            let (head, _) = acc.split_at_mut(words);
            head.copy_from_slice(&rows[first]);
            let mut idx = vec![first; w];
            // depth-first combination walk with prefix XOR accumulators
            fn walk(
                rows: &[Vec<u64>],
                acc: &mut Vec<u64>,
                idx: &mut Vec<usize>,
                depth: usize,
                w: usize,
                words: usize,
                n: usize,
                best: &mut Option<Candidate>,
                visited: &mut u64,
            ) {
                if depth == w {
                    *visited += 1;
                    let cur = &acc[(w - 1) * words..w * words];
                    let wt = weight(cur);
                    let beats = match best {
                        None => true,
                        Some(b) => wt <= b.weight,
                    };
                    if beats {
                        let cand = Candidate {
                            weight: wt,
                            support: support(cur, n),
                        };
                        if cand.better_than(best) {
                            *best = Some(cand);
                        }
                    }
                    return;
                }
                let start = idx[depth - 1] + 1;
                for next in start..=(rows.len() - (w - depth)) {
                    idx[depth] = next;
                    let (prev, cur) = acc.split_at_mut(depth * words);
                    let prev = &prev[(depth - 1) * words..];
                    let cur = &mut cur[..words];
                    cur.copy_from_slice(prev);
                    xor_into(cur, &rows[next]);
                    walk(rows, acc, idx, depth + 1, w, words, n, best, visited);
                }
            }
            if w == 1 {
                visited = 1;
                let cur = &acc[..words];
                best = Some(Candidate {
                    weight: weight(cur),
                    support: support(cur, n),
                });
            } else {
                walk(
                    rows, &mut acc, &mut idx, 1, w, words, n, &mut best, &mut visited,
                );
            }
            (best, visited)
        })
        .collect();
    let mut best = None;
    let mut visited = 0u64;
    for (b, v) in results {
        best = merge(best, b);
        visited += v;
    }
    Some((best, visited))
}

/// Exact minimum distance by information-set enumeration with a running
/// lower bound.
///
/// Messages of increasing weight `w` are expanded against every disjoint
/// information set; after finishing weight `w` the distance is at least
/// `sum_s max(0, w + 1 - deficiency_s)`. The search stops when that bound
/// meets the best codeword found (exact), exceeds `d_cap` (the distance is
/// proven larger than the cap), or the enumeration `budget` (codewords
/// visited) runs out, in which case the report keeps both partial bounds.
pub fn exact_min_distance(code: &LiftedCode, d_cap: u32, budget: u64) -> Result<DistanceReport> {
    if d_cap == 0 {
        return Err(Error::Domain("distance cap must be positive".into()));
    }
    let h = code.matrix();
    let basis = CodeBasis::from_parity_check(h);
    let n = basis.n;
    if basis.dim() == 0 {
        return Ok(DistanceReport {
            lower_bound: n as u32 + 1,
            lower_provenance: LowerBoundKind::Exhaustive,
            upper_bound: None,
            witness: None,
            exact: true,
            exhausted: false,
            seed: None,
            rounds: 0,
        });
    }
    let sets = build_info_sets(&basis);
    let mut best: Option<Candidate> = None;
    let mut lower = 1u32;
    let mut spent = 0u64;
    let mut exhausted = false;
    let mut rounds = 0u64;
    'outer: for w in 1..=basis.dim() {
        for set in &sets {
            // A set whose deficiency exceeds w cannot raise the bound yet.
            if set.deficiency > w as u32 && best.is_some() {
                continue;
            }
            match enumerate_weight(&set.rows, w, n, budget.saturating_sub(spent)) {
                Some((cand, visited)) => {
                    spent += visited;
                    rounds += 1;
                    if let Some(c) = cand {
                        if c.better_than(&best) {
                            best = Some(c);
                        }
                    }
                }
                None => {
                    exhausted = true;
                    break 'outer;
                }
            }
        }
        lower = sets
            .iter()
            .map(|s| (w as u32 + 1).saturating_sub(s.deficiency))
            .sum::<u32>()
            .max(1);
        let ub = best.as_ref().map(|c| c.weight).unwrap_or(u32::MAX);
        if lower >= ub || lower > d_cap {
            break;
        }
    }
    let (upper, witness) = match &best {
        Some(c) => {
            debug_assert!(h.is_codeword_support(&c.support));
            if !h.is_codeword_support(&c.support) {
                return Err(Error::Domain(
                    "internal error: candidate fails the parity check".into(),
                ));
            }
            (Some(c.weight), Some(c.support.clone()))
        }
        None => (None, None),
    };
    let exact = matches!(upper, Some(u) if lower >= u);
    let lower = match upper {
        Some(u) => lower.min(u),
        None => lower,
    };
    Ok(DistanceReport {
        lower_bound: lower,
        lower_provenance: LowerBoundKind::Exhaustive,
        upper_bound: upper,
        witness,
        exact,
        exhausted,
        seed: None,
        rounds,
    })
}

// ---------------------------------------------------------------------------
// Randomized information-set upper bound
// ---------------------------------------------------------------------------

fn mix(seed: u64, round: u64) -> u64 {
    let mut z = seed ^ round.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn one_isd_round(basis: &CodeBasis, seed: u64, round: u64) -> Option<Candidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, round));
    let mut order: Vec<usize> = (0..basis.n).collect();
    order.shuffle(&mut rng);
    let (rows, _) = reduce_on(&basis.rows, &order);
    let mut best: Option<Candidate> = None;
    let consider = |bits: &[u64], best: &mut Option<Candidate>| {
        let wt = weight(bits);
        if best.as_ref().map_or(true, |b| wt <= b.weight) {
            let cand = Candidate {
                weight: wt,
                support: support(bits, basis.n),
            };
            if cand.better_than(best) {
                *best = Some(cand);
            }
        }
    };
    // single rows, then row pairs
    for r in &rows {
        consider(r, &mut best);
    }
    let mut acc = vec![0u64; basis.words];
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            acc.copy_from_slice(&rows[i]);
            xor_into(&mut acc, &rows[j]);
            consider(&acc, &mut best);
        }
    }
    best
}

/// Randomized search for light codewords: every round re-systematizes the
/// generator on a fresh random information set and inspects all message
/// patterns of weight 1 and 2. Monotonically non-increasing in `iterations`
/// and deterministic given the seed. Stops early once `target` is reached.
pub fn upper_bound_min_distance(
    code: &LiftedCode,
    iterations: u64,
    seed: u64,
    target: Option<u32>,
) -> Result<DistanceReport> {
    let h = code.matrix();
    let basis = CodeBasis::from_parity_check(h);
    if basis.dim() == 0 {
        return Ok(DistanceReport {
            lower_bound: basis.n as u32 + 1,
            lower_provenance: LowerBoundKind::Exhaustive,
            upper_bound: None,
            witness: None,
            exact: true,
            exhausted: false,
            seed: Some(seed),
            rounds: 0,
        });
    }
    let tree = tree_lower_bound(code);
    let mut best: Option<Candidate> = None;
    let mut done = 0u64;
    const CHUNK: u64 = 64;
    while done < iterations {
        let upto = (done + CHUNK).min(iterations);
        let chunk_best = (done..upto)
            .into_par_iter()
            .map(|round| one_isd_round(&basis, seed, round))
            .reduce(|| None, merge);
        best = merge(best, chunk_best);
        done = upto;
        if let (Some(t), Some(b)) = (target, &best) {
            if b.weight <= t {
                break;
            }
        }
    }
    let best = best.expect("dim > 0 always yields a candidate");
    if !h.is_codeword_support(&best.support) {
        return Err(Error::Domain(
            "internal error: candidate fails the parity check".into(),
        ));
    }
    Ok(DistanceReport {
        lower_bound: tree.min(best.weight),
        lower_provenance: LowerBoundKind::TreeBound,
        upper_bound: Some(best.weight),
        witness: Some(best.support),
        exact: false,
        exhausted: false,
        seed: Some(seed),
        rounds: done,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::exponent::{standard_plan, ExponentMatrix, PlanKind};
    use crate::lifting::lift;

    fn c1(k: usize, t: usize) -> ExponentMatrix {
        ExponentMatrix::construction1(&catalog::lookup(k, t).unwrap().family)
    }

    #[test]
    fn tree_bound_girth6() {
        let code = lift(&c1(3, 6), 37).unwrap();
        assert_eq!(tree_lower_bound(&code), 4);
        let code4 = lift(&c1(4, 5), 61).unwrap();
        assert_eq!(tree_lower_bound(&code4), 5);
    }

    #[test]
    fn exact_distance_of_k4_t1() {
        // One circulant of weight 4 over 13 columns: dim 1, the all-ones word.
        let code = lift(&c1(4, 1), 13).unwrap();
        let report = exact_min_distance(&code, 20, 1_000_000).unwrap();
        assert!(report.exact);
        assert_eq!(report.upper_bound, Some(13));
        assert_eq!(report.witness.as_deref(), Some((0..13u32).collect::<Vec<_>>().as_slice()));
    }

    #[test]
    fn exact_distance_of_k3_t2() {
        let code = lift(&c1(3, 2), 13).unwrap();
        let report = exact_min_distance(&code, 20, 10_000_000).unwrap();
        assert!(report.exact);
        assert_eq!(report.upper_bound, Some(4));
    }

    #[test]
    fn exact_distance_of_dispersed_p2_at_20() {
        let p = c1(3, 6);
        let plan = standard_plan(&p, 3, PlanKind::OnePerLevelAscending).unwrap();
        let d = p.column_disperse(&plan).unwrap();
        let code = lift(&d, 20).unwrap();
        let report = exact_min_distance(&code, 20, 2_000_000_000).unwrap();
        assert!(report.exact);
        assert_eq!(report.upper_bound, Some(8));
    }

    #[test]
    fn cap_proves_strict_lower_bound() {
        // d_min of this code is 8; a cap of 5 must prove d > 5 without
        // finding the distance.
        let p = c1(3, 6);
        let plan = standard_plan(&p, 3, PlanKind::OnePerLevelAscending).unwrap();
        let d = p.column_disperse(&plan).unwrap();
        let code = lift(&d, 20).unwrap();
        let report = exact_min_distance(&code, 5, 100_000_000).unwrap();
        assert!(!report.exact);
        assert!(report.lower_bound >= 6);
    }

    #[test]
    fn witness_satisfies_parity_check() {
        let code = lift(&c1(3, 4), 25).unwrap();
        let report = exact_min_distance(&code, 10, 100_000_000).unwrap();
        assert!(report.exact);
        assert_eq!(report.upper_bound, Some(4));
        assert!(code
            .matrix()
            .is_codeword_support(report.witness.as_ref().unwrap()));
    }

    #[test]
    fn isd_on_tiny_repetition_code() {
        // H = [1 1]: the weight-2 repetition codeword.
        let p = ExponentMatrix::from_rows(vec![vec![Some(vec![0]), Some(vec![0])]]).unwrap();
        let code = lift(&p, 1).unwrap();
        let report = upper_bound_min_distance(&code, 4, 7, None).unwrap();
        assert_eq!(report.upper_bound, Some(2));
        assert_eq!(report.witness, Some(vec![0, 1]));
    }

    #[test]
    fn isd_finds_exact_weight_on_small_code() {
        let code = lift(&c1(3, 2), 13).unwrap();
        let report = upper_bound_min_distance(&code, 50, 42, None).unwrap();
        assert_eq!(report.upper_bound, Some(4));
        assert!(!report.exact);
    }

    #[test]
    fn isd_monotone_in_iterations() {
        let code = lift(&c1(4, 4), 49).unwrap();
        let few = upper_bound_min_distance(&code, 2, 1, None).unwrap();
        let many = upper_bound_min_distance(&code, 40, 1, None).unwrap();
        assert!(many.upper_bound.unwrap() <= few.upper_bound.unwrap());
    }

    #[test]
    fn isd_deterministic_given_seed() {
        let code = lift(&c1(4, 2), 26).unwrap();
        let a = upper_bound_min_distance(&code, 30, 9, None).unwrap();
        let b = upper_bound_min_distance(&code, 30, 9, None).unwrap();
        assert_eq!(a.upper_bound, b.upper_bound);
        assert_eq!(a.witness, b.witness);
    }
}
