//! Finite 1-D, 2-D and 3-D occupancy lattices.
//!
//! Sites are addressed by 0-based `[x, y, z]` coordinates (unused axes are
//! zero). A *row* is the line of sites along x at fixed `(y, z)`; the
//! compacting axis is always x. Sublattice views use the 1-based inclusive
//! row ranges `S(i,j)` / `S(i,j;k,l)` of the balancing algorithms and
//! convert at construction.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Coord = [usize; 3];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("lattice dimension must be 1, 2 or 3, got {0}")]
    InvalidDims(usize),
    #[error("every extent must be at least 1")]
    ZeroExtent,
    #[error("occupancy has {got} entries, extents require {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("row range ({first}, {last}) is not within 1..={max}")]
    InvalidRange { first: usize, last: usize, max: usize },
    #[error("occupation probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
}

/// Lattice principal axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        match i {
            0 => Some(Axis::X),
            1 => Some(Axis::Y),
            2 => Some(Axis::Z),
            _ => None,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Boolean site occupancy of a finite orthorhombic lattice.
///
/// Storage is flat with x varying fastest: `index = x + nx * (y + ny * z)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupancyGrid {
    dims: usize,
    extents: [usize; 3],
    occupied: Vec<bool>,
}

impl OccupancyGrid {
    /// An empty lattice with the given per-axis site counts.
    pub fn empty(extents: &[usize]) -> Result<Self, LatticeError> {
        let (dims, ext) = check_extents(extents)?;
        Ok(Self {
            dims,
            extents: ext,
            occupied: vec![false; ext.iter().product()],
        })
    }

    pub fn from_occupancy(extents: &[usize], occupied: Vec<bool>) -> Result<Self, LatticeError> {
        let (dims, ext) = check_extents(extents)?;
        let expected: usize = ext.iter().product();
        if occupied.len() != expected {
            return Err(LatticeError::LengthMismatch {
                expected,
                got: occupied.len(),
            });
        }
        Ok(Self {
            dims,
            extents: ext,
            occupied,
        })
    }

    /// Convenience for tests and examples: a 1-D lattice from 0/1 values.
    pub fn line(bits: &[u8]) -> Self {
        let occ = bits.iter().map(|&b| b != 0).collect::<Vec<_>>();
        Self::from_occupancy(&[bits.len().max(1)], if occ.is_empty() { vec![false] } else { occ })
            .expect("a 1-D line is always a valid lattice")
    }

    /// A 2-D lattice from rows of 0/1 values; `rows[y][x]`.
    pub fn plane(rows: &[&[u8]]) -> Result<Self, LatticeError> {
        let ny = rows.len();
        let nx = rows.first().map_or(0, |r| r.len());
        let mut occ = Vec::with_capacity(nx * ny);
        for row in rows {
            if row.len() != nx {
                return Err(LatticeError::LengthMismatch {
                    expected: nx,
                    got: row.len(),
                });
            }
            occ.extend(row.iter().map(|&b| b != 0));
        }
        Self::from_occupancy(&[nx, ny], occ)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Per-axis site counts, one entry per lattice dimension.
    pub fn extents(&self) -> &[usize] {
        &self.extents[..self.dims]
    }

    /// Extent along `axis`; 1 for axes beyond the lattice dimension.
    pub fn extent(&self, axis: Axis) -> usize {
        self.extents[axis.index()]
    }

    pub fn total_sites(&self) -> usize {
        self.occupied.len()
    }

    pub fn atom_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn filling_factor(&self) -> f64 {
        self.atom_count() as f64 / self.total_sites() as f64
    }

    /// Flat occupancy, x fastest.
    pub fn occupancy(&self) -> &[bool] {
        &self.occupied
    }

    pub fn contains(&self, c: Coord) -> bool {
        c.iter().zip(self.extents.iter()).all(|(&ci, &n)| ci < n)
    }

    pub fn index(&self, c: Coord) -> usize {
        debug_assert!(self.contains(c));
        c[0] + self.extents[0] * (c[1] + self.extents[1] * c[2])
    }

    pub fn coord(&self, index: usize) -> Coord {
        let nx = self.extents[0];
        let ny = self.extents[1];
        [index % nx, (index / nx) % ny, index / (nx * ny)]
    }

    /// Occupancy at `c`; sites outside the lattice read as vacant.
    pub fn is_occupied(&self, c: Coord) -> bool {
        self.contains(c) && self.occupied[self.index(c)]
    }

    /// Flat-index distance between neighbours along `axis`.
    pub fn stride(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => 1,
            Axis::Y => self.extents[0],
            Axis::Z => self.extents[0] * self.extents[1],
        }
    }

    pub(crate) fn occupancy_mut(&mut self) -> &mut [bool] {
        &mut self.occupied
    }

    pub fn set(&mut self, c: Coord, value: bool) {
        let i = self.index(c);
        self.occupied[i] = value;
    }

    /// Number of rows (x-lines): 1, `ny`, or `ny * nz`.
    pub fn row_total(&self) -> usize {
        self.extents[1] * self.extents[2]
    }

    /// Occupancy of the row at `(y, z)`.
    pub fn row(&self, y: usize, z: usize) -> &[bool] {
        let nx = self.extents[0];
        let start = nx * (y + self.extents[1] * z);
        &self.occupied[start..start + nx]
    }

    pub fn row_count(&self, y: usize, z: usize) -> usize {
        self.row(y, z).iter().filter(|&&o| o).count()
    }

    /// Atom counts of every row, indexed `y + ny * z`.
    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = Vec::with_capacity(self.row_total());
        for z in 0..self.extents[2] {
            for y in 0..self.extents[1] {
                counts.push(self.row_count(y, z));
            }
        }
        counts
    }

    /// Coordinates of every occupied site, in storage order.
    pub fn atoms(&self) -> impl Iterator<Item = Coord> + '_ {
        self.occupied
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(move |(i, _)| self.coord(i))
    }

    /// View covering the whole lattice.
    pub fn full_view(&self) -> SublatticeView<'_> {
        SublatticeView {
            grid: self,
            y: (0, self.extents[1] - 1),
            z: (0, self.extents[2] - 1),
        }
    }
}

fn check_extents(extents: &[usize]) -> Result<(usize, [usize; 3]), LatticeError> {
    let dims = extents.len();
    if !(1..=3).contains(&dims) {
        return Err(LatticeError::InvalidDims(dims));
    }
    if extents.contains(&0) {
        return Err(LatticeError::ZeroExtent);
    }
    let mut ext = [1usize; 3];
    ext[..dims].copy_from_slice(extents);
    Ok((dims, ext))
}

/// A block of whole rows: y in `i..=j` and (3-D) z in `k..=l`, 1-based.
#[derive(Debug, Clone, Copy)]
pub struct SublatticeView<'g> {
    grid: &'g OccupancyGrid,
    // 0-based inclusive
    y: (usize, usize),
    z: (usize, usize),
}

impl<'g> SublatticeView<'g> {
    /// `rows = (i, j)` selects y-rows, `planes = (k, l)` selects z-planes;
    /// both 1-based and inclusive. Axes the lattice lacks must be `(1, 1)`
    /// or omitted.
    pub fn new(
        grid: &'g OccupancyGrid,
        rows: (usize, usize),
        planes: Option<(usize, usize)>,
    ) -> Result<Self, LatticeError> {
        let y = to_zero_based(rows, grid.extents[1])?;
        let z = to_zero_based(planes.unwrap_or((1, grid.extents[2])), grid.extents[2])?;
        Ok(Self { grid, y, z })
    }

    pub fn grid(&self) -> &'g OccupancyGrid {
        self.grid
    }

    /// 1-based inclusive y-row range.
    pub fn rows(&self) -> (usize, usize) {
        (self.y.0 + 1, self.y.1 + 1)
    }

    /// 1-based inclusive z-plane range.
    pub fn planes(&self) -> (usize, usize) {
        (self.z.0 + 1, self.z.1 + 1)
    }

    pub fn row_total(&self) -> usize {
        (self.y.1 - self.y.0 + 1) * (self.z.1 - self.z.0 + 1)
    }

    /// Number of atoms in the view, N(S).
    pub fn count_atoms(&self) -> usize {
        let mut n = 0;
        for z in self.z.0..=self.z.1 {
            for y in self.y.0..=self.y.1 {
                n += self.grid.row_count(y, z);
            }
        }
        n
    }
}

fn to_zero_based(range: (usize, usize), max: usize) -> Result<(usize, usize), LatticeError> {
    let (first, last) = range;
    if first < 1 || first > last || last > max {
        return Err(LatticeError::InvalidRange { first, last, max });
    }
    Ok((first - 1, last - 1))
}

pub fn count_atoms(view: &SublatticeView<'_>) -> usize {
    view.count_atoms()
}

/// True when every row is left-justified and row counts differ by at most one.
pub fn is_compacted(grid: &OccupancyGrid) -> bool {
    let mut min = usize::MAX;
    let mut max = 0;
    for z in 0..grid.extent(Axis::Z) {
        for y in 0..grid.extent(Axis::Y) {
            let row = grid.row(y, z);
            let count = row.iter().take_while(|&&o| o).count();
            if row[count..].iter().any(|&o| o) {
                return false;
            }
            min = min.min(count);
            max = max.max(count);
        }
    }
    max - min <= 1
}

/// Independent Bernoulli(`p_occ`) occupancy, reproducible for a fixed seed.
pub fn random_fill(extents: &[usize], p_occ: f64, seed: u64) -> Result<OccupancyGrid, LatticeError> {
    if !(0.0..=1.0).contains(&p_occ) {
        return Err(LatticeError::InvalidProbability(p_occ));
    }
    let mut grid = OccupancyGrid::empty(extents)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for site in grid.occupied.iter_mut() {
        *site = rng.gen::<f64>() < p_occ;
    }
    Ok(grid)
}
