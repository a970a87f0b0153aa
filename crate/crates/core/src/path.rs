//! Càdlàg jump-path skeletons: a drift plus finitely many time-stamped jumps.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};

/// A finite-activity path on `[0, T]`: `X_t = drift·t + Σ_{t_i ≤ t} j_i`.
///
/// Jumps are stored flat (`jump_values[i*d..(i+1)*d]` belongs to
/// `jump_times[i]`) and kept sorted by time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathRepr", into = "PathRepr")]
pub struct PathSkeleton {
    horizon: f64,
    drift: Vec<f64>,
    jump_times: Vec<f64>,
    jump_values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct JumpRepr {
    t: f64,
    jump: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PathRepr {
    horizon: f64,
    drift: Vec<f64>,
    jumps: Vec<JumpRepr>,
}

impl From<PathSkeleton> for PathRepr {
    fn from(p: PathSkeleton) -> Self {
        let jumps = p.jumps().map(|(t, j)| JumpRepr { t, jump: j.to_vec() }).collect();
        PathRepr { horizon: p.horizon, drift: p.drift, jumps }
    }
}

impl TryFrom<PathRepr> for PathSkeleton {
    type Error = crate::Error;

    fn try_from(r: PathRepr) -> Result<Self> {
        let d = r.drift.len();
        let mut jumps = Vec::with_capacity(r.jumps.len());
        for j in r.jumps {
            if j.jump.len() != d {
                return Err(invalid("jump dimension does not match drift dimension"));
            }
            jumps.push((j.t, j.jump));
        }
        PathSkeleton::from_jumps(r.horizon, r.drift, jumps)
    }
}

impl PathSkeleton {
    /// A path with drift and no jumps.
    pub fn new(horizon: f64, drift: Vec<f64>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(domain(format!("horizon must be finite and positive, got {horizon}")));
        }
        if drift.is_empty() {
            return Err(invalid("path dimension must be at least 1"));
        }
        Ok(Self { horizon, drift, jump_times: Vec::new(), jump_values: Vec::new() })
    }

    /// Builds a path from unsorted `(time, jump)` pairs. Equal times keep
    /// their input order.
    pub fn from_jumps(horizon: f64, drift: Vec<f64>, jumps: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let mut path = Self::new(horizon, drift)?;
        let d = path.dim();
        let mut jumps = jumps;
        for (t, j) in &jumps {
            if !(0.0..=horizon).contains(t) {
                return Err(domain(format!("jump time {t} outside [0, {horizon}]")));
            }
            if j.len() != d {
                return Err(invalid(format!("jump of length {} in a {d}-dimensional path", j.len())));
            }
        }
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (t, j) in jumps {
            path.jump_times.push(t);
            path.jump_values.extend_from_slice(&j);
        }
        Ok(path)
    }

    /// Appends jumps already known to be valid; the caller re-sorts afterwards.
    pub(crate) fn push_jump_unsorted(&mut self, t: f64, jump: &[f64]) {
        self.jump_times.push(t);
        self.jump_values.extend_from_slice(jump);
    }

    /// Stable sort by time, so earlier-pushed jumps win ties.
    pub(crate) fn sort_jumps(&mut self) {
        let d = self.dim();
        let mut order: Vec<usize> = (0..self.jump_times.len()).collect();
        order.sort_by(|&a, &b| self.jump_times[a].total_cmp(&self.jump_times[b]));
        let times = order.iter().map(|&i| self.jump_times[i]).collect();
        let mut values = Vec::with_capacity(self.jump_values.len());
        for &i in &order {
            values.extend_from_slice(&self.jump_values[i * d..(i + 1) * d]);
        }
        self.jump_times = times;
        self.jump_values = values;
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.drift.len()
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn num_jumps(&self) -> usize {
        self.jump_times.len()
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn jump(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.jump_values[i * d..(i + 1) * d]
    }

    pub fn jumps(&self) -> impl Iterator<Item = (f64, &[f64])> + '_ {
        self.jump_times
            .iter()
            .copied()
            .zip(self.jump_values.chunks_exact(self.dim()))
    }

    /// Euclidean norms of all jumps, in time order.
    pub fn jump_magnitudes(&self) -> Vec<f64> {
        self.jump_values
            .chunks_exact(self.dim())
            .map(euclidean_norm)
            .collect()
    }

    /// Value of the path at a single time.
    pub fn value_at(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.evaluate(&[t])?.pop().unwrap())
    }

    /// Values at a non-decreasing list of times, with càdlàg convention
    /// (jumps at `t_i ≤ t` are included).
    pub fn evaluate(&self, times: &[f64]) -> Result<Vec<Vec<f64>>> {
        if let Some(t) = times.iter().find(|t| !(0.0..=self.horizon).contains(*t)) {
            return Err(domain(format!("time {t} outside [0, {}]", self.horizon)));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(domain("evaluation times must be sorted"));
        }
        let d = self.dim();
        let mut cumulative = vec![0.0; d];
        let mut next = 0;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            while next < self.jump_times.len() && self.jump_times[next] <= t {
                for (c, j) in cumulative.iter_mut().zip(self.jump(next)) {
                    *c += j;
                }
                next += 1;
            }
            out.push(
                cumulative
                    .iter()
                    .zip(&self.drift)
                    .map(|(c, g)| c + g * t)
                    .collect(),
            );
        }
        Ok(out)
    }

    /// Writes `t, x_1, ..., x_d` with one row at 0, one per jump time and one
    /// at the horizon. Numbers use 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.dim();
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=d).map(|i| format!("x_{i}")))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        let mut times = Vec::with_capacity(self.jump_times.len() + 2);
        times.push(0.0);
        times.extend_from_slice(&self.jump_times);
        times.push(self.horizon);
        let values = self.evaluate(&times)?;
        for (t, x) in times.iter().zip(values) {
            write!(w, "{}", format_number(*t))?;
            for v in x {
                write!(w, ",{}", format_number(v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
    }
}

/// Euclidean norm, rescaled so that subnormal components do not square to zero.
pub fn euclidean_norm(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

/// Round-trip-safe decimal rendering (17 significant digits).
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}
