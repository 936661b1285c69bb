use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Radial profile sampled on an increasing grid starting at `h0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub grid: Vec<f64>,
    /// `values[i][m]` is `w_m(grid[i])`.
    pub values: Vec<Vec<f64>>,
    /// `derivs[i][m]` is `w_m'(grid[i])`.
    pub derivs: Vec<Vec<f64>>,
    /// Shooting vector. Trajectories read back from CSV carry the first
    /// sample instead, which differs from `α` by `O(h0²)`.
    pub alpha: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum TrajectoryIoError {
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed trajectory header: {0}")]
    Header(String),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn num_components(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn r_end(&self) -> Option<f64> {
        self.grid.last().copied()
    }

    pub(crate) fn push(&mut self, r: f64, w: &[f64], dw: &[f64]) {
        self.grid.push(r);
        self.values.push(w.to_vec());
        self.derivs.push(dw.to_vec());
    }

    /// One component as a column.
    pub fn component(&self, m: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[m]).collect()
    }

    pub fn derivative(&self, m: usize) -> Vec<f64> {
        self.derivs.iter().map(|v| v[m]).collect()
    }

    /// Header `r,w_1,...,w_L,dw_1,...,dw_L`, then one row per grid point with
    /// 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), TrajectoryIoError> {
        let len = self.num_components();
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["r".to_string()];
        header.extend((1..=len).map(|m| format!("w_{m}")));
        header.extend((1..=len).map(|m| format!("dw_{m}")));
        wtr.write_record(&header)?;
        for ((r, w), dw) in self.grid.iter().zip(&self.values).zip(&self.derivs) {
            let record = std::iter::once(r)
                .chain(w.iter())
                .chain(dw.iter())
                .map(|x| format!("{x:.16e}"));
            wtr.write_record(record)?;
        }
        wtr.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, TrajectoryIoError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let header = rdr.headers()?.clone();
        let cols = header.len();
        if cols < 3 || cols % 2 == 0 || &header[0] != "r" {
            return Err(TrajectoryIoError::Header(format!(
                "expected `r,w_1..w_L,dw_1..dw_L`, got {} columns",
                cols
            )));
        }
        let len = (cols - 1) / 2;
        for m in 0..len {
            if header[1 + m] != format!("w_{}", m + 1)
                || header[1 + len + m] != format!("dw_{}", m + 1)
            {
                return Err(TrajectoryIoError::Header(format!(
                    "unexpected column names near component {}",
                    m + 1
                )));
            }
        }
        let mut traj = Trajectory::default();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let nums: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let nums = nums.map_err(|e| TrajectoryIoError::Row {
                row,
                message: e.to_string(),
            })?;
            if nums.len() != cols {
                return Err(TrajectoryIoError::Row {
                    row,
                    message: format!("expected {cols} fields, got {}", nums.len()),
                });
            }
            if let Some(&prev) = traj.grid.last() {
                if nums[0] <= prev {
                    return Err(TrajectoryIoError::Row {
                        row,
                        message: "radii must be strictly increasing".into(),
                    });
                }
            }
            traj.push(nums[0], &nums[1..=len], &nums[1 + len..]);
        }
        traj.alpha = traj.values.first().cloned().unwrap_or_default();
        Ok(traj)
    }
}
