//! Difference families over the cyclic group `Z_v`.
//!
//! A collection of `t` blocks, each a `k`-subset of `Z_v`, is a `(v, k, 1)`
//! difference family (DF) when every nonzero residue of `Z_v` occurs exactly
//! once among the pairwise differences `b - b'` taken over all blocks. When
//! `v = k(k-1)t + 1`, the family is *perfect* (PDF) if the positive integer
//! differences cover `{1, ..., (v-1)/2}` exactly, and *quasi-perfect* (QPDF)
//! if they cover `{1, ..., (v-3)/2} ∪ {(v+1)/2}` exactly.
//!
//! Blocks double as the shift-value source for circulant-based parity-check
//! matrices, which is why the positive-difference structure controls the
//! girth of the lifted code.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classification of a difference family, most specific label first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyClass {
    /// Perfect difference family.
    Pdf,
    /// Quasi-perfect difference family.
    Qpdf,
    /// Plain difference family (λ = 1) that is neither perfect nor quasi-perfect.
    Df,
    /// Not a difference family at all.
    None,
}

impl FamilyClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyClass::Pdf => "PDF",
            FamilyClass::Qpdf => "QPDF",
            FamilyClass::Df => "DF",
            FamilyClass::None => "None",
        }
    }

    /// PDF and QPDF imply DF; `None` implies nothing.
    pub fn is_df(&self) -> bool {
        !matches!(self, FamilyClass::None)
    }
}

impl std::fmt::Display for FamilyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Wire format for JSON import/export: `{"v": u32, "k": usize, "blocks": [[u32,...],...]}`.
#[derive(Serialize, Deserialize)]
struct FamilyJson {
    v: u32,
    k: usize,
    blocks: Vec<Vec<u32>>,
}

/// `t` blocks of size `k` over `Z_v`, normalized so each block is sorted
/// ascending and the blocks themselves are in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceFamily {
    v: u32,
    k: usize,
    blocks: Vec<Vec<u32>>,
}

impl DifferenceFamily {
    /// Builds a family from raw blocks, validating and normalizing them.
    ///
    /// Requirements: at least one block, all blocks the same size `k >= 2`,
    /// elements distinct within a block and in `[0, v)`.
    pub fn new(v: u32, blocks: Vec<Vec<u32>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidFamily("family has no blocks".into()));
        }
        let k = blocks[0].len();
        if k < 2 {
            return Err(Error::InvalidFamily(format!(
                "block size {k} too small, need k >= 2"
            )));
        }
        let mut norm = Vec::with_capacity(blocks.len());
        for b in &blocks {
            if b.len() != k {
                return Err(Error::InvalidFamily(format!(
                    "blocks have mixed sizes: {} vs {}",
                    b.len(),
                    k
                )));
            }
            let mut s = b.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != k {
                return Err(Error::InvalidFamily(format!(
                    "block {b:?} has repeated elements"
                )));
            }
            if let Some(&max) = s.last() {
                if max >= v {
                    return Err(Error::InvalidFamily(format!(
                        "block {b:?} has element {max} outside [0, {v})"
                    )));
                }
            }
            norm.push(s);
        }
        norm.sort();
        Ok(Self { v, k, blocks: norm })
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    /// Block size.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of blocks.
    pub fn t(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// All ordered differences `b_m - b_n mod v` (`m != n`), over all blocks.
    ///
    /// The multiset has `t * k * (k-1)` elements in `[1, v)` and is closed
    /// under `d -> v - d` with equal multiplicity.
    pub fn forward_differences(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.t() * self.k * (self.k - 1));
        for block in &self.blocks {
            for (i, &a) in block.iter().enumerate() {
                for (j, &b) in block.iter().enumerate() {
                    if i != j {
                        out.push((a + self.v - b) % self.v);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Positive differences `b_m - b_n` for `m > n` within each sorted block,
    /// taken over the integers (not reduced mod v). These are what the
    /// perfect/quasi-perfect covering conditions are stated on.
    pub fn positive_differences(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.t() * self.k * (self.k - 1) / 2);
        for block in &self.blocks {
            for n in 0..block.len() {
                for m in (n + 1)..block.len() {
                    out.push(block[m] - block[n]);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// How many times each residue `1..v` appears in `forward_differences`.
    pub fn difference_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.v as usize];
        for d in self.forward_differences() {
            counts[d as usize] += 1;
        }
        counts
    }

    /// Most specific applicable label: PDF, then QPDF, then DF, then None.
    pub fn classify(&self) -> FamilyClass {
        let v = self.v;
        let k = self.k as u64;
        let t = self.t() as u64;
        if u64::from(v) == k * (k - 1) * t + 1 && v >= 3 {
            let pos = self.positive_differences();
            // Sorted covering check against {1..=(v-1)/2}.
            let half = (v - 1) / 2;
            let is_pdf = pos.len() as u64 == u64::from(half)
                && pos.iter().enumerate().all(|(i, &d)| d == i as u32 + 1);
            if is_pdf {
                return FamilyClass::Pdf;
            }
            // {1..=(v-3)/2} ∪ {(v+1)/2}, only meaningful for odd v.
            if v % 2 == 1 {
                let is_qpdf = pos.len() as u64 == u64::from(half)
                    && pos[..pos.len() - 1]
                        .iter()
                        .enumerate()
                        .all(|(i, &d)| d == i as u32 + 1)
                    && *pos.last().unwrap() == (v + 1) / 2;
                if is_qpdf {
                    return FamilyClass::Qpdf;
                }
            }
        }
        if self.difference_counts()[1..].iter().all(|&c| c == 1) {
            return FamilyClass::Df;
        }
        FamilyClass::None
    }

    /// Serializes to the JSON wire format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FamilyJson {
            v: self.v,
            k: self.k,
            blocks: self.blocks.clone(),
        })
        .expect("family serialization cannot fail")
    }

    /// Parses the JSON wire format, validating structure. A `k` field that
    /// disagrees with the block sizes is rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: FamilyJson = serde_json::from_str(text)?;
        let fam = Self::new(raw.v, raw.blocks)?;
        if fam.k != raw.k {
            return Err(Error::InvalidFamily(format!(
                "declared k={} but blocks have size {}",
                raw.k, fam.k
            )));
        }
        Ok(fam)
    }
}

/// Tri-state answer from the existence theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Existence {
    Exists,
    NotExists,
    Unknown,
}

/// What the known existence results say about a `(k(k-1)t+1, k, 1)` DF
/// (`perfect = false`) or PDF (`perfect = true`).
///
/// Covered ranges:
/// - DF, k=3: exists for all t >= 1.
/// - DF, k=4: exists for 1 <= t <= 1000 except t = 2.
/// - DF, k=5: exists for 1 <= t <= 50 except t in {16, 25, 31, 34, 40, 45}
///   (those six are open, not ruled out).
/// - PDF, k=3: exists iff t ≡ 0 or 1 (mod 4).
/// - PDF, k=4: exists for t = 1 and 4 <= t <= 1000; none for t = 2, 3.
/// - PDF, k=5: known only for t in {6, 8, 10}; other t <= 50 open.
/// - PDF, k >= 6: never exists.
///
/// Everything else is `Unknown`.
pub fn existence_expected(k: usize, t: usize, perfect: bool) -> Existence {
    use Existence::*;
    if k < 3 || t == 0 {
        return Unknown;
    }
    if perfect {
        match k {
            3 => {
                if t % 4 == 0 || t % 4 == 1 {
                    Exists
                } else {
                    NotExists
                }
            }
            4 => match t {
                1 => Exists,
                2 | 3 => NotExists,
                4..=1000 => Exists,
                _ => Unknown,
            },
            5 => match t {
                6 | 8 | 10 => Exists,
                _ => Unknown,
            },
            _ => NotExists,
        }
    } else {
        match k {
            3 => Exists,
            4 => match t {
                2 => NotExists,
                1..=1000 => Exists,
                _ => Unknown,
            },
            5 => match t {
                16 | 25 | 31 | 34 | 40 | 45 => Unknown,
                1..=50 => Exists,
                _ => Unknown,
            },
            _ => Unknown,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(v: u32, blocks: &[&[u32]]) -> DifferenceFamily {
        DifferenceFamily::new(v, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn forward_differences_of_fano_block() {
        // (7,3,1) PDF: every nonzero residue exactly once.
        let f = fam(7, &[&[0, 1, 3]]);
        assert_eq!(f.forward_differences(), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn forward_differences_of_13_4_block() {
        let f = fam(13, &[&[0, 2, 5, 6]]);
        assert_eq!(
            f.forward_differences(),
            (1..13).collect::<Vec<u32>>()
        );
    }

    #[test]
    fn forward_differences_single_pair() {
        let f = fam(5, &[&[0, 1]]);
        assert_eq!(f.forward_differences(), vec![1, 4]);
    }

    #[test]
    fn classify_pdf() {
        assert_eq!(fam(7, &[&[0, 1, 3]]).classify(), FamilyClass::Pdf);
    }

    #[test]
    fn classify_qpdf() {
        let f = fam(13, &[&[0, 1, 4], &[0, 2, 7]]);
        assert_eq!(f.classify(), FamilyClass::Qpdf);
    }

    #[test]
    fn classify_none() {
        let f = fam(26, &[&[0, 1, 3, 9], &[0, 4, 11, 16]]);
        assert_eq!(f.classify(), FamilyClass::None);
    }

    #[test]
    fn classify_plain_df() {
        let f = fam(
            37,
            &[&[0, 12, 19, 20], &[0, 2, 13, 16], &[0, 5, 9, 15]],
        );
        assert_eq!(f.classify(), FamilyClass::Df);
    }

    #[test]
    fn blocks_are_normalized() {
        let f = fam(13, &[&[7, 0, 2], &[4, 1, 0]]);
        assert_eq!(f.blocks(), &[vec![0, 1, 4], vec![0, 2, 7]]);
    }

    #[test]
    fn rejects_repeated_elements() {
        assert!(DifferenceFamily::new(7, vec![vec![0, 1, 1]]).is_err());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(DifferenceFamily::new(7, vec![vec![0, 1, 7]]).is_err());
    }

    #[test]
    fn rejects_mixed_sizes() {
        assert!(DifferenceFamily::new(13, vec![vec![0, 1, 4], vec![0, 2]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = fam(13, &[&[0, 1, 4], &[0, 2, 7]]);
        let parsed = DifferenceFamily::from_json(&f.to_json()).unwrap();
        assert_eq!(parsed, f);
    }

    #[test]
    fn json_rejects_wrong_k() {
        let text = r#"{"v": 7, "k": 4, "blocks": [[0, 1, 3]]}"#;
        assert!(DifferenceFamily::from_json(text).is_err());
    }

    #[test]
    fn existence_pdf_k3() {
        assert_eq!(existence_expected(3, 5, true), Existence::Exists);
        assert_eq!(existence_expected(3, 4, true), Existence::Exists);
        assert_eq!(existence_expected(3, 2, true), Existence::NotExists);
        assert_eq!(existence_expected(3, 3, true), Existence::NotExists);
    }

    #[test]
    fn existence_df_k4_exception() {
        assert_eq!(existence_expected(4, 2, false), Existence::NotExists);
        assert_eq!(existence_expected(4, 3, false), Existence::Exists);
        assert_eq!(existence_expected(4, 1001, false), Existence::Unknown);
    }

    #[test]
    fn existence_no_pdf_for_large_k() {
        assert_eq!(existence_expected(7, 3, true), Existence::NotExists);
        assert_eq!(existence_expected(6, 1, true), Existence::NotExists);
    }

    #[test]
    fn existence_k5_gaps_are_open() {
        assert_eq!(existence_expected(5, 16, false), Existence::Unknown);
        assert_eq!(existence_expected(5, 17, false), Existence::Exists);
        assert_eq!(existence_expected(5, 8, true), Existence::Exists);
        assert_eq!(existence_expected(5, 7, true), Existence::Unknown);
    }
}
