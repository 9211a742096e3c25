//! Built-in catalog of `(v, k, 1)` difference families for `k = 3` and `k = 4`,
//! together with the accurate lifting degrees, dimension and minimum distance of
//! the girth-6 single-row-of-circulants code each family produces at its
//! smallest accurate lifting degree.
//!
//! The `k = 4`, `t = 2` entry is not a difference family (no such DF exists);
//! it is the smallest shift-value set that still yields girth 6 and is kept in
//! the catalog because the construction accepts it unchanged.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{DifferenceFamily, FamilyClass};

/// The set of lifting degrees for which a family's code reaches girth 6:
/// a few exceptional values below a threshold, plus every `N >= all_from`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccurateLiftingDegrees {
    /// Admissible values strictly below `all_from`, in increasing order.
    pub exceptional: Vec<u32>,
    /// Every lifting degree at or above this is admissible.
    pub all_from: u32,
}

impl AccurateLiftingDegrees {
    pub fn contains(&self, n: u32) -> bool {
        n >= self.all_from || self.exceptional.contains(&n)
    }

    /// Smallest admissible lifting degree.
    pub fn smallest(&self) -> u32 {
        self.exceptional.first().copied().unwrap_or(self.all_from)
    }

    /// Inadmissible degrees between the smallest admissible one and `all_from`.
    pub fn excluded(&self) -> Vec<u32> {
        (self.smallest()..self.all_from)
            .filter(|n| !self.exceptional.contains(n))
            .collect()
    }
}

impl std::fmt::Display for AccurateLiftingDegrees {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for e in &self.exceptional {
            write!(f, "{e},")?;
        }
        write!(f, "{},{},...", self.all_from, self.all_from + 1)
    }
}

/// A reported minimum distance: exact, or only an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportedDistance {
    Exact(u32),
    UpperBound(u32),
}

impl ReportedDistance {
    pub fn value(&self) -> u32 {
        match self {
            ReportedDistance::Exact(d) | ReportedDistance::UpperBound(d) => *d,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ReportedDistance::Exact(_))
    }
}

impl std::fmt::Display for ReportedDistance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReportedDistance::Exact(d) => write!(f, "{d}"),
            ReportedDistance::UpperBound(d) => write!(f, "<={d}"),
        }
    }
}

/// One catalog row: the family plus the parameters reported for the code it
/// generates at the smallest accurate lifting degree.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub family: DifferenceFamily,
    pub class: FamilyClass,
    pub lifting: AccurateLiftingDegrees,
    pub dim: u64,
    pub dmin: ReportedDistance,
}

impl CatalogEntry {
    pub fn k(&self) -> usize {
        self.family.k()
    }

    pub fn t(&self) -> usize {
        self.family.t()
    }
}

struct RawEntry {
    k: usize,
    v: u32,
    exceptional: &'static [u32],
    all_from: u32,
    dim: u64,
    dmin: ReportedDistance,
    class: FamilyClass,
    blocks: &'static [&'static [u32]],
}

use FamilyClass::{Df, None as NotDf, Pdf, Qpdf};
use ReportedDistance::{Exact, UpperBound};

const RAW: &[RawEntry] = &[
    // k = 3
    RawEntry { k: 3, v: 7, exceptional: &[], all_from: 7, dim: 3, dmin: Exact(4), class: Pdf,
        blocks: &[&[0, 1, 3]] },
    RawEntry { k: 3, v: 13, exceptional: &[13], all_from: 15, dim: 13, dmin: Exact(4), class: Qpdf,
        blocks: &[&[0, 1, 4], &[0, 2, 7]] },
    RawEntry { k: 3, v: 19, exceptional: &[19], all_from: 21, dim: 38, dmin: Exact(6), class: Qpdf,
        blocks: &[&[0, 1, 5], &[0, 3, 10], &[0, 6, 8]] },
    RawEntry { k: 3, v: 25, exceptional: &[], all_from: 25, dim: 75, dmin: Exact(4), class: Pdf,
        blocks: &[&[0, 1, 6], &[0, 4, 12], &[0, 7, 10], &[0, 9, 11]] },
    RawEntry { k: 3, v: 31, exceptional: &[], all_from: 31, dim: 124, dmin: Exact(6), class: Pdf,
        blocks: &[&[0, 1, 7], &[0, 5, 15], &[0, 8, 11], &[0, 9, 13], &[0, 12, 14]] },
    RawEntry { k: 3, v: 37, exceptional: &[37], all_from: 39, dim: 185, dmin: Exact(4), class: Qpdf,
        blocks: &[&[0, 1, 8], &[0, 6, 19], &[0, 9, 12], &[0, 10, 14], &[0, 11, 16], &[0, 15, 17]] },
    RawEntry { k: 3, v: 43, exceptional: &[43], all_from: 45, dim: 258, dmin: Exact(6), class: Qpdf,
        blocks: &[&[0, 1, 9], &[0, 7, 22], &[0, 10, 12], &[0, 11, 16], &[0, 13, 19], &[0, 14, 18],
            &[0, 17, 20]] },
    RawEntry { k: 3, v: 49, exceptional: &[], all_from: 49, dim: 343, dmin: Exact(4), class: Pdf,
        blocks: &[&[0, 1, 10], &[0, 8, 24], &[0, 11, 13], &[0, 12, 17], &[0, 14, 20], &[0, 15, 22],
            &[0, 18, 21], &[0, 19, 23]] },
    RawEntry { k: 3, v: 55, exceptional: &[], all_from: 55, dim: 440, dmin: Exact(4), class: Pdf,
        blocks: &[&[0, 1, 27], &[0, 2, 14], &[0, 4, 24], &[0, 5, 15], &[0, 6, 23], &[0, 7, 18],
            &[0, 8, 21], &[0, 9, 25], &[0, 19, 22]] },
    RawEntry { k: 3, v: 61, exceptional: &[61], all_from: 63, dim: 549, dmin: Exact(6), class: Qpdf,
        blocks: &[&[0, 2, 3], &[0, 10, 17], &[0, 14, 26], &[0, 15, 28], &[0, 16, 24], &[0, 18, 29],
            &[0, 19, 23], &[0, 20, 25], &[0, 21, 27], &[0, 22, 31]] },
    RawEntry { k: 3, v: 73, exceptional: &[], all_from: 73, dim: 803, dmin: Exact(4), class: Pdf,
        blocks: &[&[0, 1, 36], &[0, 11, 26], &[0, 6, 29], &[0, 12, 30], &[0, 7, 21], &[0, 9, 22],
            &[0, 8, 33], &[0, 10, 34], &[0, 3, 31], &[0, 5, 32], &[0, 2, 19], &[0, 4, 20]] },
    // k = 4
    RawEntry { k: 4, v: 13, exceptional: &[], all_from: 13, dim: 1, dmin: Exact(13), class: Pdf,
        blocks: &[&[0, 2, 5, 6]] },
    RawEntry { k: 4, v: 26, exceptional: &[26, 29, 30, 31], all_from: 33, dim: 27, dmin: Exact(8),
        class: NotDf, blocks: &[&[0, 1, 3, 9], &[0, 4, 11, 16]] },
    RawEntry { k: 4, v: 37, exceptional: &[37], all_from: 41, dim: 75, dmin: Exact(6), class: Df,
        blocks: &[&[0, 12, 19, 20], &[0, 2, 13, 16], &[0, 5, 9, 15]] },
    RawEntry { k: 4, v: 49, exceptional: &[], all_from: 49, dim: 148, dmin: Exact(8), class: Pdf,
        blocks: &[&[0, 1, 7, 23], &[0, 2, 14, 19], &[0, 3, 13, 21], &[0, 4, 15, 24]] },
    RawEntry { k: 4, v: 61, exceptional: &[], all_from: 61, dim: 245, dmin: Exact(7), class: Pdf,
        blocks: &[&[0, 1, 8, 28], &[0, 2, 14, 24], &[0, 3, 18, 29], &[0, 4, 17, 23],
            &[0, 5, 21, 30]] },
    RawEntry { k: 4, v: 73, exceptional: &[], all_from: 73, dim: 366, dmin: Exact(6), class: Pdf,
        blocks: &[&[0, 1, 34, 36], &[0, 3, 18, 30], &[0, 4, 20, 28], &[0, 5, 22, 31],
            &[0, 6, 19, 29], &[0, 7, 21, 32]] },
    RawEntry { k: 4, v: 85, exceptional: &[], all_from: 85, dim: 511, dmin: Exact(8), class: Pdf,
        blocks: &[&[0, 2, 41, 42], &[0, 5, 30, 33], &[0, 11, 31, 35], &[0, 12, 26, 34],
            &[0, 13, 29, 36], &[0, 17, 32, 38], &[0, 18, 27, 37]] },
    RawEntry { k: 4, v: 97, exceptional: &[], all_from: 97, dim: 680, dmin: Exact(8), class: Pdf,
        blocks: &[&[0, 2, 47, 48], &[0, 6, 33, 38], &[0, 8, 37, 44], &[0, 11, 35, 39],
            &[0, 15, 31, 41], &[0, 17, 30, 42], &[0, 19, 22, 40], &[0, 20, 34, 43]] },
    RawEntry { k: 4, v: 97, exceptional: &[97], all_from: 99, dim: 680, dmin: Exact(8), class: Qpdf,
        blocks: &[&[0, 2, 3, 49], &[0, 4, 27, 40], &[0, 5, 26, 43], &[0, 6, 25, 39],
            &[0, 7, 31, 42], &[0, 8, 30, 45], &[0, 9, 29, 41], &[0, 10, 28, 44]] },
    RawEntry { k: 4, v: 109, exceptional: &[], all_from: 109, dim: 873, dmin: Exact(7), class: Pdf,
        blocks: &[&[0, 2, 53, 54], &[0, 7, 39, 43], &[0, 9, 42, 50], &[0, 11, 38, 48],
            &[0, 15, 35, 49], &[0, 16, 40, 46], &[0, 19, 31, 44], &[0, 23, 28, 45],
            &[0, 26, 29, 47]] },
    RawEntry { k: 4, v: 121, exceptional: &[], all_from: 121, dim: 1090, dmin: UpperBound(8),
        class: Pdf,
        blocks: &[&[0, 2, 59, 60], &[0, 7, 43, 49], &[0, 10, 47, 56], &[0, 12, 45, 53],
            &[0, 15, 40, 54], &[0, 16, 35, 48], &[0, 17, 44, 55], &[0, 24, 29, 50],
            &[0, 28, 31, 51], &[0, 30, 34, 52]] },
    RawEntry { k: 4, v: 145, exceptional: &[], all_from: 145, dim: 1596, dmin: UpperBound(8),
        class: Pdf,
        blocks: &[&[0, 2, 71, 72], &[0, 9, 51, 58], &[0, 12, 57, 68], &[0, 14, 54, 67],
            &[0, 18, 50, 66], &[0, 19, 55, 65], &[0, 23, 47, 62], &[0, 25, 52, 60],
            &[0, 30, 34, 63], &[0, 31, 37, 59], &[0, 38, 43, 64], &[0, 41, 44, 61]] },
];

fn build() -> Vec<CatalogEntry> {
    RAW.iter()
        .map(|r| CatalogEntry {
            family: {
                let fam =
                    DifferenceFamily::new(r.v, r.blocks.iter().map(|b| b.to_vec()).collect())
                        .expect("catalog row is structurally valid");
                assert_eq!(fam.k(), r.k, "catalog row block size disagrees");
                fam
            },
            class: r.class,
            lifting: AccurateLiftingDegrees {
                exceptional: r.exceptional.to_vec(),
                all_from: r.all_from,
            },
            dim: r.dim,
            dmin: r.dmin,
        })
        .collect()
}

/// All 23 catalog entries, k = 3 rows first, then k = 4, by increasing `t`.
pub fn all_entries() -> &'static [CatalogEntry] {
    static ENTRIES: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    ENTRIES.get_or_init(build)
}

/// All entries with the given block size and count. `(4, 8)` has two
/// (a perfect and a quasi-perfect family over the same group).
pub fn lookup_all(k: usize, t: usize) -> Vec<&'static CatalogEntry> {
    all_entries()
        .iter()
        .filter(|e| e.k() == k && e.t() == t)
        .collect()
}

/// The catalog row for `(k, t)`; the perfect family when two exist.
pub fn lookup(k: usize, t: usize) -> Result<&'static CatalogEntry> {
    lookup_all(k, t)
        .into_iter()
        .next()
        .ok_or(Error::NotInCatalog { k, t })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn has_23_rows() {
        assert_eq!(all_entries().len(), 23);
    }

    #[test]
    fn lookup_k3_t6() {
        let e = lookup(3, 6).unwrap();
        assert_eq!(e.family.v(), 37);
        assert_eq!(e.class, FamilyClass::Qpdf);
        assert_eq!(
            e.family.blocks(),
            &[
                vec![0, 1, 8],
                vec![0, 6, 19],
                vec![0, 9, 12],
                vec![0, 10, 14],
                vec![0, 11, 16],
                vec![0, 15, 17]
            ]
        );
    }

    #[test]
    fn lookup_k4_t5() {
        let e = lookup(4, 5).unwrap();
        assert_eq!(e.family.v(), 61);
        assert_eq!(e.class, FamilyClass::Pdf);
        assert_eq!(e.dim, 245);
    }

    #[test]
    fn lookup_absent_row() {
        assert!(matches!(
            lookup(3, 11),
            Err(Error::NotInCatalog { k: 3, t: 11 })
        ));
    }

    #[test]
    fn two_entries_for_k4_t8() {
        let both = lookup_all(4, 8);
        assert_eq!(both.len(), 2);
        assert_eq!(both[0].class, FamilyClass::Pdf);
        assert_eq!(both[1].class, FamilyClass::Qpdf);
    }

    #[test]
    fn classification_matches_type_column() {
        for e in all_entries() {
            assert_eq!(
                e.family.classify(),
                e.class,
                "class mismatch for k={} t={}",
                e.k(),
                e.t()
            );
        }
    }

    #[test]
    fn pdf_rows_admit_every_degree_from_v() {
        for e in all_entries() {
            if e.class == FamilyClass::Pdf {
                assert_eq!(e.lifting.smallest(), e.family.v());
                assert!(e.lifting.exceptional.is_empty());
            }
        }
    }

    #[test]
    fn excluded_degrees_for_k3_t2() {
        let e = lookup(3, 2).unwrap();
        assert_eq!(e.lifting.excluded(), vec![14]);
        assert!(e.lifting.contains(13));
        assert!(!e.lifting.contains(14));
        assert!(e.lifting.contains(15));
        assert!(e.lifting.contains(100));
    }

    #[test]
    fn excluded_degrees_for_k4_t2() {
        let e = lookup(4, 2).unwrap();
        assert_eq!(e.lifting.excluded(), vec![27, 28, 32]);
    }
}
