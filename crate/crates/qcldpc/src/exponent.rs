//! Exponent matrices for circulant-based QC-LDPC codes.
//!
//! An `m x n` exponent matrix holds, in each cell, either a set of distinct
//! CPM shift values or the distinguished ABSENT marker (a zero block in the
//! lifted parity-check matrix). A cell with `l` shifts lifts to a sum of `l`
//! circulant permutation matrices.
//!
//! Two transformations are provided:
//! - `construction1`: a difference family's blocks become the cells of a
//!   single-row matrix;
//! - `column_disperse`: partitions each cell of a single-row matrix across
//!   `m` levels (column dispersion), which can only preserve or raise girth
//!   and minimum distance;
//! plus `mask`, which blanks cells selected by a 0/1 pattern.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::DifferenceFamily;

/// A cell of the exponent matrix: some distinct shift values, or none at all.
///
/// ABSENT is a dedicated variant so shift arithmetic can never silently pick
/// up a placeholder value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShiftVector {
    Absent,
    /// Strictly increasing, nonempty shift values.
    Finite(Vec<u32>),
}

impl ShiftVector {
    /// Builds a finite cell, sorting the values and rejecting duplicates.
    pub fn finite(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidShiftVector(
                "finite cell needs at least one shift".into(),
            ));
        }
        let mut v = values;
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidShiftVector(format!(
                "duplicate shift in {v:?}"
            )));
        }
        Ok(ShiftVector::Finite(v))
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, ShiftVector::Absent)
    }

    /// Shift values of the cell; empty for ABSENT.
    pub fn shifts(&self) -> &[u32] {
        match self {
            ShiftVector::Absent => &[],
            ShiftVector::Finite(v) => v,
        }
    }

    pub fn len(&self) -> usize {
        self.shifts().len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts().is_empty()
    }
}

/// An `m x n` grid of shift vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentMatrix {
    m: usize,
    n: usize,
    cells: Vec<ShiftVector>,
}

/// Wire format: `{"m":..,"n":..,"cells":[[[1,2],null,...],...]}`, null = ABSENT.
#[derive(Serialize, Deserialize)]
struct ExponentJson {
    m: usize,
    n: usize,
    cells: Vec<Vec<Option<Vec<u32>>>>,
}

impl ExponentMatrix {
    /// Builds a matrix from row-major cells; `cells.len()` must equal `m * n`.
    pub fn new(m: usize, n: usize, cells: Vec<ShiftVector>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Shape("exponent matrix must be nonempty".into()));
        }
        if cells.len() != m * n {
            return Err(Error::Shape(format!(
                "expected {} cells for a {m}x{n} matrix, got {}",
                m * n,
                cells.len()
            )));
        }
        Ok(Self { m, n, cells })
    }

    /// Convenience constructor from per-row lists of optional shift sets.
    pub fn from_rows(rows: Vec<Vec<Option<Vec<u32>>>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let mut cells = Vec::with_capacity(m * n);
        for row in rows {
            for cell in row {
                cells.push(match cell {
                    None => ShiftVector::Absent,
                    Some(values) => ShiftVector::finite(values)?,
                });
            }
        }
        Self::new(m, n, cells)
    }

    /// Number of levels (row blocks).
    pub fn levels(&self) -> usize {
        self.m
    }

    /// Number of column blocks.
    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn cell(&self, i: usize, j: usize) -> &ShiftVector {
        &self.cells[i * self.n + j]
    }

    /// Maximum number of shifts in any one cell (the matrix "Type").
    pub fn max_type(&self) -> usize {
        self.cells.iter().map(|c| c.len()).max().unwrap_or(0)
    }

    /// Largest finite shift anywhere, or None if every cell is ABSENT.
    pub fn max_shift(&self) -> Option<u32> {
        self.cells
            .iter()
            .flat_map(|c| c.shifts().iter().copied())
            .max()
    }

    /// Total number of finite shifts (edges of the base graph).
    pub fn total_shifts(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum()
    }

    /// All finite shifts of column `j` across levels, sorted.
    pub fn column_shifts(&self, j: usize) -> Vec<u32> {
        let mut v: Vec<u32> = (0..self.m)
            .flat_map(|i| self.cell(i, j).shifts().iter().copied())
            .collect();
        v.sort_unstable();
        v
    }

    /// True when no column repeats a shift value across its levels. Holds by
    /// construction for dispersed matrices; worth checking on hand-entered ones.
    pub fn columns_have_distinct_shifts(&self) -> bool {
        (0..self.n).all(|j| {
            let col = self.column_shifts(j);
            col.windows(2).all(|w| w[0] != w[1])
        })
    }

    /// Single-row matrix whose cell `j` holds the `(j+1)`-th block of the family.
    ///
    /// Lifting the result with degree `N` greater than every block element
    /// gives a `(k, tk)`-regular code of length `tN`.
    pub fn construction1(family: &DifferenceFamily) -> Self {
        let cells = family
            .blocks()
            .iter()
            .map(|b| ShiftVector::Finite(b.clone()))
            .collect();
        Self {
            m: 1,
            n: family.t(),
            cells,
        }
    }

    /// Applies an `m`-column dispersion to a single-row matrix.
    ///
    /// Every cell's shifts are redistributed over `plan.m` levels within the
    /// same column; empty assignments become ABSENT cells.
    pub fn column_disperse(&self, plan: &DispersionPlan) -> Result<Self> {
        if self.m != 1 {
            return Err(Error::Shape(format!(
                "column dispersion applies to single-level matrices, got {} levels",
                self.m
            )));
        }
        if plan.m < 2 {
            return Err(Error::PlanMismatch("plan must have m > 1 levels".into()));
        }
        if plan.columns.len() != self.n {
            return Err(Error::PlanMismatch(format!(
                "plan covers {} columns, matrix has {}",
                plan.columns.len(),
                self.n
            )));
        }
        let mut cells = vec![ShiftVector::Absent; plan.m * self.n];
        for (j, col_plan) in plan.columns.iter().enumerate() {
            let source = self.cell(0, j);
            if col_plan.len() != plan.m {
                return Err(Error::PlanMismatch(format!(
                    "column {j}: plan has {} levels, expected {}",
                    col_plan.len(),
                    plan.m
                )));
            }
            let mut seen = vec![false; source.len()];
            for (level, idxs) in col_plan.iter().enumerate() {
                if idxs.is_empty() {
                    continue;
                }
                let mut values = Vec::with_capacity(idxs.len());
                for &idx in idxs {
                    if idx >= source.len() {
                        return Err(Error::PlanMismatch(format!(
                            "column {j}: entry index {idx} out of range (cell has {})",
                            source.len()
                        )));
                    }
                    if seen[idx] {
                        return Err(Error::PlanMismatch(format!(
                            "column {j}: entry index {idx} assigned twice"
                        )));
                    }
                    seen[idx] = true;
                    values.push(source.shifts()[idx]);
                }
                cells[level * self.n + j] = ShiftVector::finite(values)?;
            }
            if !seen.iter().all(|&s| s) {
                return Err(Error::PlanMismatch(format!(
                    "column {j}: plan assigns {} of {} entries",
                    seen.iter().filter(|&&s| s).count(),
                    source.len()
                )));
            }
        }
        Self::new(plan.m, self.n, cells)
    }

    /// Blanks every cell where the pattern has a 0; pattern must be the same
    /// shape, with entries in {0, 1}.
    pub fn mask(&self, pattern: &[Vec<u8>]) -> Result<Self> {
        if pattern.len() != self.m || pattern.iter().any(|r| r.len() != self.n) {
            return Err(Error::Shape(format!(
                "mask shape mismatch, matrix is {}x{}",
                self.m, self.n
            )));
        }
        let mut cells = self.cells.clone();
        for (i, row) in pattern.iter().enumerate() {
            for (j, &keep) in row.iter().enumerate() {
                match keep {
                    1 => {}
                    0 => cells[i * self.n + j] = ShiftVector::Absent,
                    other => {
                        return Err(Error::Shape(format!(
                            "mask entry must be 0 or 1, got {other}"
                        )))
                    }
                }
            }
        }
        Self::new(self.m, self.n, cells)
    }

    pub fn to_json(&self) -> String {
        let cells = (0..self.m)
            .map(|i| {
                (0..self.n)
                    .map(|j| match self.cell(i, j) {
                        ShiftVector::Absent => None,
                        ShiftVector::Finite(v) => Some(v.clone()),
                    })
                    .collect()
            })
            .collect();
        serde_json::to_string_pretty(&ExponentJson {
            m: self.m,
            n: self.n,
            cells,
        })
        .expect("exponent serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ExponentJson = serde_json::from_str(text)?;
        if raw.cells.len() != raw.m {
            return Err(Error::Shape(format!(
                "declared m={} but {} rows given",
                raw.m,
                raw.cells.len()
            )));
        }
        if raw.cells.iter().any(|r| r.len() != raw.n) {
            return Err(Error::Shape("row length disagrees with declared n".into()));
        }
        Self::from_rows(raw.cells)
    }
}

/// How a dispersion distributes each column's shifts over target levels:
/// `columns[j][level]` lists the source entry indices placed at that level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispersionPlan {
    pub m: usize,
    pub columns: Vec<Vec<Vec<usize>>>,
}

/// The two dispersion recipes used by the tabulated constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanKind {
    /// The j-th smallest shift of each cell goes to level j; trailing levels
    /// are left empty when the cell has fewer shifts than there are levels.
    OnePerLevelAscending,
    /// Two levels: the smaller half of each cell stays in level 1, the larger
    /// half moves to level 2.
    SplitLowHigh,
}

impl PlanKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "one-per-level" | "one_per_level_ascending" => Ok(PlanKind::OnePerLevelAscending),
            "split-low-high" | "split_low_high" => Ok(PlanKind::SplitLowHigh),
            other => Err(Error::PlanMismatch(format!("unknown plan kind: {other}"))),
        }
    }
}

/// Builds the deterministic plan of the given kind for a single-row matrix.
pub fn standard_plan(matrix: &ExponentMatrix, m: usize, kind: PlanKind) -> Result<DispersionPlan> {
    if matrix.levels() != 1 {
        return Err(Error::Shape(
            "standard plans apply to single-level matrices".into(),
        ));
    }
    let mut columns = Vec::with_capacity(matrix.cols());
    for j in 0..matrix.cols() {
        let len = matrix.cell(0, j).len();
        let mut levels = vec![Vec::new(); m];
        match kind {
            PlanKind::OnePerLevelAscending => {
                if len > m {
                    return Err(Error::Shape(format!(
                        "column {j} has {len} shifts, cannot place one per level over {m}"
                    )));
                }
                for idx in 0..len {
                    levels[idx].push(idx);
                }
            }
            PlanKind::SplitLowHigh => {
                if m != 2 {
                    return Err(Error::Shape(format!(
                        "split-low-high needs exactly 2 levels, got {m}"
                    )));
                }
                let cut = len.div_ceil(2);
                for idx in 0..len {
                    levels[usize::from(idx >= cut)].push(idx);
                }
            }
        }
        columns.push(levels);
    }
    Ok(DispersionPlan { m, columns })
}

/// Hand-tabulated exponent matrices used by the reference constructions.
pub mod fixtures {
    use super::ExponentMatrix;

    fn rows(spec: &[&[i64]]) -> ExponentMatrix {
        let rows = spec
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| if x < 0 { None } else { Some(vec![x as u32]) })
                    .collect()
            })
            .collect();
        ExponentMatrix::from_rows(rows).expect("fixture is well formed")
    }

    /// 4x12 single-shift matrix obtained by dispersing the k=3, t=12 catalog
    /// family over four levels with a staggered empty-cell pattern; lifts to a
    /// (3,9)-regular code. Designed for lifting degree 330.
    pub fn p_star_4() -> ExponentMatrix {
        rows(&[
            &[0, -1, 0, -1, 0, -1, 0, 0, 0, 0, 0, 0],
            &[-1, 0, -1, 0, -1, 0, 8, 10, 3, 5, 2, 4],
            &[1, 11, 6, 12, 7, 9, 33, -1, 31, -1, 19, -1],
            &[36, 26, 29, 30, 21, 22, -1, 34, -1, 32, -1, 20],
        ])
    }

    /// 4x12 single-shift matrix obtained by dispersing the k=4, t=12 catalog
    /// family one shift per level and masking one level per column; lifts to a
    /// (3,9)-regular code. Designed for lifting degree 330.
    pub fn p_star_m() -> ExponentMatrix {
        rows(&[
            &[0, -1, 0, -1, 0, -1, 0, 0, 0, 0, 0, 0],
            &[-1, 9, -1, 14, -1, 19, 23, 25, 30, 31, 38, 41],
            &[71, 51, 57, 54, 50, 55, 47, -1, 34, -1, 43, -1],
            &[72, 58, 68, 67, 66, 65, -1, 60, -1, 59, -1, 61],
        ])
    }

    /// The 4x12 keep/blank pattern shared by the two fixtures above: each
    /// column blanks exactly one level, leaving column weight 3.
    pub fn mask_4x12() -> Vec<Vec<u8>> {
        vec![
            vec![1, 0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1],
            vec![0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1],
            vec![1, 1, 1, 1, 1, 1, 1, 0, 1, 0, 1, 0],
            vec![1, 1, 1, 1, 1, 1, 0, 1, 0, 1, 0, 1],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn one_row(cells: &[&[u32]]) -> ExponentMatrix {
        ExponentMatrix::from_rows(vec![cells.iter().map(|c| Some(c.to_vec())).collect()]).unwrap()
    }

    #[test]
    fn construction1_from_k3_t6() {
        let fam = &catalog::lookup(3, 6).unwrap().family;
        let p = ExponentMatrix::construction1(fam);
        assert_eq!(p.levels(), 1);
        assert_eq!(p.cols(), 6);
        assert_eq!(p.max_type(), 3);
        assert_eq!(p.cell(0, 0).shifts(), &[0, 1, 8]);
        assert_eq!(p.cell(0, 5).shifts(), &[0, 15, 17]);
    }

    #[test]
    fn construction1_single_block() {
        let fam = DifferenceFamily::new(7, vec![vec![0, 1, 3]]).unwrap();
        let p = ExponentMatrix::construction1(&fam);
        assert_eq!((p.levels(), p.cols()), (1, 1));
        assert_eq!(p.cell(0, 0).shifts(), &[0, 1, 3]);
    }

    #[test]
    fn disperse_with_explicit_plan() {
        // One cell with five shifts split over five levels, one level empty.
        let p = one_row(&[&[0, 3, 4, 11, 17]]);
        let plan = DispersionPlan {
            m: 5,
            columns: vec![vec![vec![0], vec![1, 3], vec![], vec![4], vec![2]]],
        };
        let d = p.column_disperse(&plan).unwrap();
        assert_eq!(d.cell(0, 0).shifts(), &[0]);
        assert_eq!(d.cell(1, 0).shifts(), &[3, 11]);
        assert!(d.cell(2, 0).is_absent());
        assert_eq!(d.cell(3, 0).shifts(), &[17]);
        assert_eq!(d.cell(4, 0).shifts(), &[4]);
    }

    #[test]
    fn three_level_dispersion_of_k3_t6() {
        let fam = &catalog::lookup(3, 6).unwrap().family;
        let p = ExponentMatrix::construction1(fam);
        let plan = standard_plan(&p, 3, PlanKind::OnePerLevelAscending).unwrap();
        let d = p.column_disperse(&plan).unwrap();
        let row = |i: usize| -> Vec<u32> {
            (0..d.cols()).map(|j| d.cell(i, j).shifts()[0]).collect()
        };
        assert_eq!(row(0), vec![0, 0, 0, 0, 0, 0]);
        assert_eq!(row(1), vec![1, 6, 9, 10, 11, 15]);
        assert_eq!(row(2), vec![8, 19, 12, 14, 16, 17]);
    }

    #[test]
    fn split_low_high_of_k4_t5() {
        let fam = &catalog::lookup(4, 5).unwrap().family;
        let p = ExponentMatrix::construction1(fam);
        let plan = standard_plan(&p, 2, PlanKind::SplitLowHigh).unwrap();
        let d = p.column_disperse(&plan).unwrap();
        assert_eq!(d.cell(0, 0).shifts(), &[0, 1]);
        assert_eq!(d.cell(1, 0).shifts(), &[8, 28]);
        assert_eq!(d.cell(0, 4).shifts(), &[0, 5]);
        assert_eq!(d.cell(1, 4).shifts(), &[21, 30]);
    }

    #[test]
    fn one_per_level_with_spare_levels() {
        let p = one_row(&[&[5]]);
        let plan = standard_plan(&p, 2, PlanKind::OnePerLevelAscending).unwrap();
        let d = p.column_disperse(&plan).unwrap();
        assert_eq!(d.cell(0, 0).shifts(), &[5]);
        assert!(d.cell(1, 0).is_absent());
    }

    #[test]
    fn dispersion_preserves_column_multisets() {
        let fam = &catalog::lookup(4, 5).unwrap().family;
        let p = ExponentMatrix::construction1(fam);
        let plan = standard_plan(&p, 2, PlanKind::SplitLowHigh).unwrap();
        let d = p.column_disperse(&plan).unwrap();
        for j in 0..p.cols() {
            assert_eq!(p.column_shifts(j), d.column_shifts(j));
        }
        assert!(d.columns_have_distinct_shifts());
    }

    #[test]
    fn plan_mismatch_is_rejected() {
        let p = one_row(&[&[0, 1, 8]]);
        let plan = DispersionPlan {
            m: 2,
            columns: vec![vec![vec![0], vec![1]]],
        };
        assert!(matches!(
            p.column_disperse(&plan),
            Err(Error::PlanMismatch(_))
        ));
    }

    #[test]
    fn mask_all_ones_is_identity() {
        let p = fixtures::p_star_4();
        let ones = vec![vec![1u8; p.cols()]; p.levels()];
        assert_eq!(p.mask(&ones).unwrap(), p);
    }

    #[test]
    fn mask_is_idempotent() {
        let fam = &catalog::lookup(4, 12).unwrap().family;
        let p = ExponentMatrix::construction1(fam);
        let plan = standard_plan(&p, 4, PlanKind::OnePerLevelAscending).unwrap();
        let d = p.column_disperse(&plan).unwrap();
        let mask = fixtures::mask_4x12();
        let once = d.mask(&mask).unwrap();
        let twice = once.mask(&mask).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn p_star_m_is_masked_dispersion_of_k4_t12() {
        let fam = &catalog::lookup(4, 12).unwrap().family;
        let p = ExponentMatrix::construction1(fam);
        let plan = standard_plan(&p, 4, PlanKind::OnePerLevelAscending).unwrap();
        let d = p.column_disperse(&plan).unwrap();
        let masked = d.mask(&fixtures::mask_4x12()).unwrap();
        assert_eq!(masked, fixtures::p_star_m());
    }

    #[test]
    fn p_star_4_columns_hold_the_k3_t12_blocks() {
        let p = fixtures::p_star_4();
        let mut cols: Vec<Vec<u32>> = (0..p.cols()).map(|j| p.column_shifts(j)).collect();
        cols.sort();
        let fam = &catalog::lookup(3, 12).unwrap().family;
        let mut blocks: Vec<Vec<u32>> = fam.blocks().to_vec();
        blocks.sort();
        assert_eq!(cols, blocks);
    }

    #[test]
    fn fixture_shapes_and_regularity() {
        for p in [fixtures::p_star_4(), fixtures::p_star_m()] {
            assert_eq!((p.levels(), p.cols()), (4, 12));
            assert_eq!(p.max_type(), 1);
            for j in 0..p.cols() {
                assert_eq!(p.column_shifts(j).len(), 3);
            }
            for i in 0..p.levels() {
                let row_weight: usize = (0..p.cols()).map(|j| p.cell(i, j).len()).sum();
                assert_eq!(row_weight, 9);
            }
        }
    }

    #[test]
    fn json_round_trip_with_absent_cells() {
        let p = fixtures::p_star_m();
        let parsed = ExponentMatrix::from_json(&p.to_json()).unwrap();
        assert_eq!(parsed, p);
    }
}
