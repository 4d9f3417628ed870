//! File formats: grids, schedules, execution reports, tables, trajectories
//! and wavefunction snapshots.

use std::io::{Read, Write};

use latcomp_core::lattice::is_compacted;
use latcomp_core::planner::{worst_case_bound, CompactionStep, MobileRun, Schedule};
use latcomp_core::simulator::StepRecord;
use latcomp_core::spectral::{SpatialGrid, TrajectoryPoint, Wavefunction};
use latcomp_core::units::joule_to_microkelvin;
use latcomp_core::{Axis, ExecutionReport, OccupancyGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};
use crate::header::Header;

/// Grid document: `dims`, `extents` and the row-major 0/1 `occupied` array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub dims: usize,
    pub extents: Vec<usize>,
    pub occupied: Vec<u8>,
}

impl GridDoc {
    pub fn from_grid(grid: &OccupancyGrid) -> Self {
        Self {
            dims: grid.dims(),
            extents: grid.extents().to_vec(),
            occupied: grid.occupancy().iter().map(|&o| o as u8).collect(),
        }
    }

    pub fn to_grid(&self) -> Result<OccupancyGrid> {
        if self.dims != self.extents.len() {
            return Err(CliError::parse(format!("dims is {} but {} extents given", self.dims, self.extents.len())));
        }
        let mut bits = Vec::with_capacity(self.occupied.len());
        for &v in &self.occupied {
            match v {
                0 => bits.push(false),
                1 => bits.push(true),
                other => return Err(CliError::parse(format!("occupancy values must be 0 or 1, found {other}"))),
            }
        }
        OccupancyGrid::from_occupancy(&self.extents, bits).map_err(CliError::parse)
    }
}

pub fn grid_to_json(grid: &OccupancyGrid) -> String {
    serde_json::to_string(&GridDoc::from_grid(grid)).expect("grid serializes")
}

pub fn grid_from_json(text: &str) -> Result<OccupancyGrid> {
    let doc: GridDoc = serde_json::from_str(text)?;
    doc.to_grid()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunDoc {
    /// First site of the run, one entry per grid dimension.
    pub start: Vec<usize>,
    /// Sites covered along the step axis.
    pub len: usize,
}

/// One step. `runs` is the mobile coordinate list, run-length encoded along
/// `axis`: every occupied site in a run moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub axis: String,
    pub direction: i8,
    pub atoms: usize,
    pub runs: Vec<RunDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostDoc {
    pub shift_cost: usize,
    pub flip_cost: usize,
    pub balance_shift_cost: usize,
    pub row_shift_cost: usize,
    pub balance_depth: Option<usize>,
    pub fallback: bool,
    /// Worst-case bound for a cube or square of the longest extent.
    pub worst_case_bound: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub header: Value,
    pub dims: usize,
    pub extents: Vec<usize>,
    pub steps: Vec<StepDoc>,
    pub cost: CostDoc,
}

fn axis_from_name(name: &str) -> Result<Axis> {
    match name {
        "x" => Ok(Axis::X),
        "y" => Ok(Axis::Y),
        "z" => Ok(Axis::Z),
        other => Err(CliError::parse(format!("unknown axis {other:?}"))),
    }
}

impl ScheduleDoc {
    pub fn new(header: &Header, grid: &OccupancyGrid, schedule: &Schedule) -> Self {
        let dims = grid.dims();
        let steps = schedule
            .steps()
            .iter()
            .map(|s| StepDoc {
                axis: s.axis.name().to_string(),
                direction: s.direction,
                atoms: s.atoms,
                runs: s
                    .runs
                    .iter()
                    .map(|r| RunDoc {
                        start: r.start[..dims].to_vec(),
                        len: r.len,
                    })
                    .collect(),
            })
            .collect();
        let balance_shift_cost = schedule.balance().map_or(0, |b| b.shift_cost);
        let n = grid.extents().iter().copied().max().unwrap_or(0);
        Self {
            header: serde_json::to_value(header).expect("header serializes"),
            dims,
            extents: grid.extents().to_vec(),
            steps,
            cost: CostDoc {
                shift_cost: schedule.shift_cost(),
                flip_cost: schedule.flip_cost(),
                balance_shift_cost,
                row_shift_cost: schedule.shift_cost() - balance_shift_cost,
                balance_depth: schedule.balance().map(|b| b.depth),
                fallback: schedule.balance().is_some_and(|b| b.fallback),
                worst_case_bound: worst_case_bound(dims, n),
            },
        }
    }

    /// Rebuilds the step list. Balance metadata is not stored in the file.
    pub fn to_schedule(&self) -> Result<Schedule> {
        let mut out = Schedule::new();
        for s in &self.steps {
            let axis = axis_from_name(&s.axis)?;
            let mut runs = Vec::with_capacity(s.runs.len());
            for r in &s.runs {
                if r.start.len() != self.dims {
                    return Err(CliError::parse("run start has the wrong number of coordinates"));
                }
                let mut start = [0usize; 3];
                start[..self.dims].copy_from_slice(&r.start);
                runs.push(MobileRun { start, len: r.len });
            }
            out.push(CompactionStep {
                axis,
                direction: s.direction,
                runs,
                atoms: s.atoms,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDoc {
    pub header: Value,
    pub shift_cost: usize,
    pub flip_cost: usize,
    pub atom_count: usize,
    pub is_compacted: bool,
    /// Physical time at a fixed duration per step, s.
    pub modeled_time_s: f64,
    pub final_grid: GridDoc,
}

impl ReportDoc {
    pub fn new(header: &Header, report: &ExecutionReport, seconds_per_step: f64) -> Self {
        Self {
            header: serde_json::to_value(header).expect("header serializes"),
            shift_cost: report.shift_cost,
            flip_cost: report.flip_cost,
            atom_count: report.final_grid.atom_count(),
            is_compacted: is_compacted(&report.final_grid),
            modeled_time_s: report.shift_cost as f64 * seconds_per_step,
            final_grid: GridDoc::from_grid(&report.final_grid),
        }
    }
}

/// `step,axis,direction,mobile`.
pub fn write_trace_csv<W: Write>(mut w: W, header: &Header, trace: &[StepRecord]) -> Result<()> {
    w.write_all(header.comment_lines().as_bytes())?;
    let mut c = csv::Writer::from_writer(w);
    c.write_record(["step", "axis", "direction", "mobile"])?;
    for (i, r) in trace.iter().enumerate() {
        c.write_record([i.to_string(), r.axis.name().to_string(), r.direction.to_string(), r.mobile.to_string()])?;
    }
    c.flush()?;
    Ok(())
}

/// `time_ms,E_uK,norm,overlap`.
pub fn write_trajectory_csv<W: Write>(mut w: W, header: &Header, points: &[TrajectoryPoint]) -> Result<()> {
    w.write_all(header.comment_lines().as_bytes())?;
    let mut c = csv::Writer::from_writer(w);
    c.write_record(["time_ms", "E_uK", "norm", "overlap"])?;
    for p in points {
        c.write_record([
            (p.time * 1e3).to_string(),
            joule_to_microkelvin(p.energy).to_string(),
            p.norm.to_string(),
            p.overlap.to_string(),
        ])?;
    }
    c.flush()?;
    Ok(())
}

/// Rows of JSON scalars under named columns, written as CSV or JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W, header: &Header) -> Result<()> {
        w.write_all(header.comment_lines().as_bytes())?;
        let mut c = csv::Writer::from_writer(w);
        c.write_record(&self.columns)?;
        for row in &self.rows {
            c.write_record(row.iter().map(cell_text))?;
        }
        c.flush()?;
        Ok(())
    }

    pub fn to_json(&self, header: &Header) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, Value> = self.columns.iter().cloned().zip(r.iter().cloned()).collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::json!({ "header": header, "columns": self.columns, "rows": rows })
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Binary wavefunction snapshot, little-endian:
///
/// | bytes | content |
/// |-------|---------|
/// | 8     | magic `LATCWF01` |
/// | 32    | SHA-256 of the configuration |
/// | 8     | N_g, u64 |
/// | 8     | box length L in metres, f64 |
/// | 16 N_g | re, im of each amplitude, f64 pairs |
pub const SNAPSHOT_MAGIC: &[u8; 8] = b"LATCWF01";

pub fn write_snapshot<W: Write>(mut w: W, header: &Header, psi: &Wavefunction) -> Result<()> {
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&header.digest())?;
    w.write_all(&(psi.grid().len() as u64).to_le_bytes())?;
    w.write_all(&psi.grid().length().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * psi.grid().len());
    for a in psi.amplitudes() {
        buf.extend_from_slice(&a.re.to_le_bytes());
        buf.extend_from_slice(&a.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Returns the stored configuration digest and the state.
pub fn read_snapshot<R: Read>(mut r: R) -> Result<([u8; 32], Wavefunction)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(CliError::parse("not a wavefunction snapshot"));
    }
    let mut digest = [0u8; 32];
    r.read_exact(&mut digest)?;
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let length = f64::from_le_bytes(word);
    let grid = SpatialGrid::new(length, n).map_err(CliError::parse)?;
    let mut data = vec![0u8; 16 * n];
    r.read_exact(&mut data)?;
    let amps = data
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok((digest, Wavefunction::from_amplitudes(grid, amps).map_err(CliError::parse)?))
}
