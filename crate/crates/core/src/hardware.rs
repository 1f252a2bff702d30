//! Zoned-array hardware model: geometry, timing, fidelity parameters, and the
//! closed-form duration models for remote CZ execution and AOD motion.
//!
//! The array has two zones stacked vertically. The storage zone is a regular
//! SLM grid with a single pitch; y grows downward and the entanglement zone
//! sits below the storage zone, separated by an empty gap. Entanglement-zone
//! sites exist only in columns admitted by a modulus rule on the column
//! coordinate (the column index doubles as the x position in column-pitch
//! units). Vertical spacing inside a column cycles through a pitch profile.
//!
//! Transport-chain adjacency ("facilitation pitch" adjacency) is lattice
//! adjacency in the entanglement zone: two sites are chain neighbors when
//! they are in the same admitted column one row apart, or in the same row one
//! admitted column apart. Within an admitted column, rows alternate between
//! gate rows (where data qubits may sit) and relay rows (chain sites that
//! serve the gate rows on either side).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Array zone an atom can occupy.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    Storage,
    Entanglement,
}

/// A trap site addressed by zone, column, and row.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Site {
    pub zone: Zone,
    pub col: u32,
    pub row: u32,
}

impl Site {
    pub fn storage(col: u32, row: u32) -> Self {
        Site {
            zone: Zone::Storage,
            col,
            row,
        }
    }

    pub fn ent(col: u32, row: u32) -> Self {
        Site {
            zone: Zone::Entanglement,
            col,
            row,
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.zone {
            Zone::Storage => 'S',
            Zone::Entanglement => 'E',
        };
        write!(f, "{}{}.{}", tag, self.col, self.row)
    }
}

/// Geometry of the zoned array.
///
/// `ent_cols` is the exclusive upper bound on entanglement-zone column
/// indices; only columns with `col % ent_col_modulus == ent_col_residue`
/// host sites. `ent_first_row` is the first row where data qubits may be
/// placed; gate rows repeat every second row below it so that each pair of
/// stacked qubits shares the relay row between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    /// Storage SLM pitch in um (both axes).
    pub storage_pitch: f64,
    /// Repeating vertical spacing pattern inside an entanglement column, um.
    pub ent_pitch_profile: Vec<f64>,
    /// Empty vertical gap between the zones, um.
    pub zone_gap: f64,
    /// Horizontal extent of one entanglement column index, um.
    pub ent_col_pitch: f64,
    /// Column admission rule: usable iff col % modulus == residue.
    pub ent_col_modulus: u32,
    pub ent_col_residue: u32,
    /// First row usable for data-qubit gate sites.
    pub ent_first_row: u32,
    pub storage_cols: u32,
    pub storage_rows: u32,
    pub ent_cols: u32,
    pub ent_rows: u32,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec {
            storage_pitch: 6.0,
            ent_pitch_profile: vec![4.0, 8.0, 5.0, 7.0],
            zone_gap: 10.0,
            ent_col_pitch: 1.0,
            ent_col_modulus: 12,
            ent_col_residue: 4,
            ent_first_row: 1,
            storage_cols: 4,
            storage_rows: 4,
            ent_cols: 53,
            ent_rows: 5,
        }
    }
}

impl GeometrySpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.storage_pitch, "storage_pitch")?;
        positive(self.zone_gap, "zone_gap")?;
        positive(self.ent_col_pitch, "ent_col_pitch")?;
        if self.ent_pitch_profile.is_empty() {
            return Err(Error::Config("ent_pitch_profile must be non-empty".into()));
        }
        for &p in &self.ent_pitch_profile {
            positive(p, "ent_pitch_profile entry")?;
        }
        if self.ent_col_residue >= self.ent_col_modulus {
            return Err(Error::Config(format!(
                "ent_col_residue {} must be below ent_col_modulus {}",
                self.ent_col_residue, self.ent_col_modulus
            )));
        }
        if self.storage_cols == 0 || self.storage_rows == 0 {
            return Err(Error::Config("storage grid must be non-empty".into()));
        }
        if self.ent_cols == 0 || self.ent_rows == 0 {
            return Err(Error::Config("entanglement grid must be non-empty".into()));
        }
        Ok(())
    }

    pub fn is_usable_col(&self, col: u32) -> bool {
        col < self.ent_cols && col % self.ent_col_modulus == self.ent_col_residue
    }

    /// Admitted entanglement-zone columns, ascending.
    pub fn usable_cols(&self) -> Vec<u32> {
        (self.ent_col_residue..self.ent_cols)
            .step_by(self.ent_col_modulus as usize)
            .collect()
    }

    /// Index of an admitted column in the chain lattice (0-based, left to right).
    pub fn lattice_col(&self, col: u32) -> Option<u32> {
        if self.is_usable_col(col) {
            Some((col - self.ent_col_residue) / self.ent_col_modulus)
        } else {
            None
        }
    }

    /// Physical column of the k-th admitted column.
    pub fn col_at_lattice(&self, k: u32) -> u32 {
        self.ent_col_residue + k * self.ent_col_modulus
    }

    pub fn usable_col_count(&self) -> u32 {
        if self.ent_cols > self.ent_col_residue {
            (self.ent_cols - self.ent_col_residue - 1) / self.ent_col_modulus + 1
        } else {
            0
        }
    }

    /// Rows where data qubits may sit: every second row from `ent_first_row`.
    pub fn gate_rows(&self) -> Vec<u32> {
        (self.ent_first_row..self.ent_rows).step_by(2).collect()
    }

    pub fn contains(&self, site: Site) -> bool {
        match site.zone {
            Zone::Storage => site.col < self.storage_cols && site.row < self.storage_rows,
            Zone::Entanglement => self.is_usable_col(site.col) && site.row < self.ent_rows,
        }
    }

    /// Cumulative vertical offset of an entanglement row below row 0, um.
    pub fn ent_row_offset(&self, row: u32) -> f64 {
        let n = self.ent_pitch_profile.len();
        (0..row as usize)
            .map(|i| self.ent_pitch_profile[i % n])
            .sum()
    }

    pub fn storage_bottom_y(&self) -> f64 {
        (self.storage_rows.saturating_sub(1)) as f64 * self.storage_pitch
    }

    pub fn ent_top_y(&self) -> f64 {
        self.storage_bottom_y() + self.zone_gap
    }

    /// y coordinate of the empty traffic lane between the zones.
    pub fn gap_lane_y(&self) -> f64 {
        self.storage_bottom_y() + 0.5 * self.zone_gap
    }

    /// Lateral offset used when an AOD tweezer travels vertically: half of
    /// the local column spacing, which keeps the trajectory clear of every
    /// parked atom in that zone.
    pub fn lane_offset(&self, zone: Zone) -> f64 {
        match zone {
            Zone::Storage => 0.5 * self.storage_pitch,
            Zone::Entanglement => 0.5 * self.ent_col_modulus as f64 * self.ent_col_pitch,
        }
    }

    /// Physical position of a site in um.
    pub fn position(&self, site: Site) -> (f64, f64) {
        match site.zone {
            Zone::Storage => (
                site.col as f64 * self.storage_pitch,
                site.row as f64 * self.storage_pitch,
            ),
            Zone::Entanglement => (
                site.col as f64 * self.ent_col_pitch,
                self.ent_top_y() + self.ent_row_offset(site.row),
            ),
        }
    }

    /// Straight-line distance between two sites, um.
    pub fn distance(&self, a: Site, b: Site) -> f64 {
        let (ax, ay) = self.position(a);
        let (bx, by) = self.position(b);
        ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
    }

    /// All storage sites in (col, row) order.
    pub fn storage_sites(&self) -> Vec<Site> {
        let mut v = Vec::with_capacity((self.storage_cols * self.storage_rows) as usize);
        for col in 0..self.storage_cols {
            for row in 0..self.storage_rows {
                v.push(Site::storage(col, row));
            }
        }
        v
    }

    /// All entanglement sites (admitted columns only) in (col, row) order.
    pub fn ent_sites(&self) -> Vec<Site> {
        let mut v = Vec::new();
        for col in self.usable_cols() {
            for row in 0..self.ent_rows {
                v.push(Site::ent(col, row));
            }
        }
        v
    }

    /// Data-qubit candidate sites in (col, row) order.
    pub fn ent_gate_sites(&self) -> Vec<Site> {
        let rows = self.gate_rows();
        let mut v = Vec::new();
        for col in self.usable_cols() {
            for &row in &rows {
                v.push(Site::ent(col, row));
            }
        }
        v
    }

    /// Chain adjacency between entanglement sites.
    pub fn lattice_adjacent(&self, a: Site, b: Site) -> bool {
        if a.zone != Zone::Entanglement || b.zone != Zone::Entanglement {
            return false;
        }
        let (Some(ka), Some(kb)) = (self.lattice_col(a.col), self.lattice_col(b.col)) else {
            return false;
        };
        let dc = ka.abs_diff(kb);
        let dr = a.row.abs_diff(b.row);
        dc + dr == 1
    }

    /// Manhattan distance in chain-lattice steps between entanglement sites.
    pub fn lattice_steps(&self, a: Site, b: Site) -> Option<u32> {
        let ka = self.lattice_col(a.col)?;
        let kb = self.lattice_col(b.col)?;
        if a.zone != Zone::Entanglement || b.zone != Zone::Entanglement {
            return None;
        }
        Some(ka.abs_diff(kb) + a.row.abs_diff(b.row))
    }

    pub fn storage_capacity(&self) -> u32 {
        self.storage_cols * self.storage_rows
    }

    /// Admitted column whose x position is nearest to `x`; ties go left.
    pub fn usable_col_nearest_x(&self, x: f64) -> u32 {
        let mut best = self.ent_col_residue;
        let mut best_d = f64::INFINITY;
        for col in self.usable_cols() {
            let d = (col as f64 * self.ent_col_pitch - x).abs();
            if d < best_d {
                best_d = d;
                best = col;
            }
        }
        best
    }
}

/// Ancilla slots provisioned alongside `n` data qubits.
pub fn ancilla_margin(n_qubits: u32) -> u32 {
    n_qubits.div_ceil(2)
}

/// Size the grids for a circuit of `n_qubits` qubits.
///
/// Storage gets `ceil(sqrt(n))` columns and enough rows to hold the qubits
/// plus the ancilla margin. The entanglement zone gets one admitted column
/// per two qubits (each admitted column stacks two gate rows around a shared
/// relay row) and two spare rows for branch construction.
pub fn crop_grid(n_qubits: u32, template: &GeometrySpec) -> GeometrySpec {
    let n = n_qubits.max(1);
    let mut g = template.clone();
    g.storage_cols = (n as f64).sqrt().ceil() as u32;
    let need = n + ancilla_margin(n);
    g.storage_rows = need.div_ceil(g.storage_cols);
    let usable_needed = n.div_ceil(2);
    g.ent_cols = g.ent_col_residue + g.ent_col_modulus * (usable_needed - 1) + 1;
    g.ent_rows = g.ent_first_row + 4;
    g
}

/// Pulse and motion timing, all durations in us.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingParams {
    /// Map-in / map-out pi-pulse duration.
    pub t_pi: f64,
    /// Conditional 2pi pulse duration on the target.
    pub t_2pi: f64,
    /// Per-hop transport time along the chain.
    pub t_hop: f64,
    /// Detuning-switch time per hop; folded into `t_hop` by default.
    pub tau_sw: f64,
    /// Single-qubit gate duration.
    pub t_1q: f64,
    /// AOD acceleration, um/us^2.
    pub aod_accel: f64,
    /// Trap transfer time per pickup or drop-off.
    pub t_xfer: f64,
}

impl Default for TimingParams {
    fn default() -> Self {
        TimingParams {
            t_pi: 0.167,
            t_2pi: 0.334,
            t_hop: 0.256,
            tau_sw: 0.0,
            t_1q: 0.1,
            aod_accel: 0.02,
            t_xfer: 15.0,
        }
    }
}

impl TimingParams {
    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.t_pi, "t_pi"),
            (self.t_2pi, "t_2pi"),
            (self.t_hop, "t_hop"),
            (self.t_1q, "t_1q"),
            (self.aod_accel, "aod_accel"),
            (self.t_xfer, "t_xfer"),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.tau_sw >= 0.0 && self.tau_sw.is_finite()) {
            return Err(Error::Config(format!(
                "tau_sw must be non-negative, got {}",
                self.tau_sw
            )));
        }
        Ok(())
    }
}

/// Duration of a remote CZ over `hops` chain hops:
/// map-in pi, `hops` transport hops, conditional 2pi, `hops` return hops,
/// map-out pi.
pub fn remote_cz_duration(hops: u32, tp: &TimingParams) -> f64 {
    2.0 * tp.t_pi + 2.0 * hops as f64 * (tp.t_hop + tp.tau_sw) + tp.t_2pi
}

/// AOD flight time over a straight-line distance, bang-bang kinematics.
pub fn aod_flight_time(distance: f64, tp: &TimingParams) -> f64 {
    2.0 * (distance.max(0.0) / tp.aod_accel).sqrt()
}

/// Full AOD move duration: pickup, flight, drop-off.
pub fn aod_move_duration(distance: f64, tp: &TimingParams) -> f64 {
    2.0 * tp.t_xfer + aod_flight_time(distance, tp)
}

/// Multiplicative error-model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityParams {
    pub f_2q: f64,
    pub f_1q: f64,
    /// Per-hop transport fidelity.
    pub f_hop: f64,
    /// Per trap pickup or drop-off.
    pub f_xfer: f64,
    /// Idle coherence time, us.
    pub t2: f64,
    /// Per idle entanglement-zone qubit, per entangling pulse event.
    pub f_xtalk: f64,
}

impl Default for FidelityParams {
    fn default() -> Self {
        FidelityParams {
            f_2q: 0.995,
            f_1q: 0.9999,
            f_hop: 0.999,
            f_xfer: 0.999,
            t2: 1.5e6,
            f_xtalk: 0.998,
        }
    }
}

impl FidelityParams {
    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.f_2q, "f_2q"),
            (self.f_1q, "f_1q"),
            (self.f_hop, "f_hop"),
            (self.f_xfer, "f_xfer"),
            (self.f_xtalk, "f_xtalk"),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!(
                    "{name} must be in (0, 1], got {v}"
                )));
            }
        }
        if !(self.t2 > 0.0 && self.t2.is_finite()) {
            return Err(Error::Config(format!("t2 must be positive, got {}", self.t2)));
        }
        Ok(())
    }
}

/// Planner knobs. All distances in chain-lattice steps unless noted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningParams {
    /// Column-mismatch weight in the storage placement cost (per um of x).
    pub w_col: f64,
    /// Row-alignment weight (per row).
    pub w_row: f64,
    /// Weight on vertical distance to the first gate row (per um).
    pub w_ent: f64,
    /// A pair endpoint at most this far from the chain counts as on-chain.
    pub r_near: u32,
    /// Maximum branch length grown toward an off-chain endpoint.
    pub c_max: u32,
    /// Cost penalty for drafting a fresh ancilla out of storage, um-equivalent.
    pub lambda_new: f64,
    /// Keep the previous anchor column while its cost is within this factor
    /// of the best candidate.
    pub anchor_hysteresis: f64,
    /// Minimum approach distance between a tweezer path and any parked atom, um.
    pub clearance: f64,
}

impl Default for TuningParams {
    fn default() -> Self {
        TuningParams {
            w_col: 1000.0,
            w_row: 10.0,
            w_ent: 1.0,
            r_near: 1,
            c_max: 3,
            lambda_new: 10.0,
            anchor_hysteresis: 0.05,
            clearance: 2.0,
        }
    }
}

impl TuningParams {
    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.w_col, "w_col"),
            (self.w_row, "w_row"),
            (self.w_ent, "w_ent"),
            (self.lambda_new, "lambda_new"),
            (self.clearance, "clearance"),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if !(self.anchor_hysteresis >= 0.0 && self.anchor_hysteresis.is_finite()) {
            return Err(Error::Config("anchor_hysteresis must be non-negative".into()));
        }
        Ok(())
    }
}

/// Complete machine description used by every compilation pass.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HardwareConfig {
    pub geometry: GeometrySpec,
    pub timing: TimingParams,
    pub fidelity: FidelityParams,
    pub tuning: TuningParams,
}

impl HardwareConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.timing.validate()?;
        self.fidelity.validate()?;
        self.tuning.validate()
    }

    /// Parse a flat `key = value` config. Blank lines and `#`/`//` comments
    /// are ignored; unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut hw = HardwareConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find("//") {
                Some(i) => &raw[..i],
                None => raw,
            };
            let line = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            hw.apply(key, value).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("line {}: {msg}", lineno + 1)),
                other => other,
            })?;
        }
        hw.validate()?;
        Ok(hw)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn f(value: &str, key: &str) -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("key `{key}`: bad float `{value}`")))
        }
        fn u(value: &str, key: &str) -> Result<u32> {
            value
                .parse::<u32>()
                .map_err(|_| Error::Config(format!("key `{key}`: bad integer `{value}`")))
        }
        match key {
            "storage_pitch" => self.geometry.storage_pitch = f(value, key)?,
            "ent_pitch_profile" => {
                let mut profile = Vec::new();
                for part in value.split(',') {
                    profile.push(f(part.trim(), key)?);
                }
                self.geometry.ent_pitch_profile = profile;
            }
            "zone_gap" => self.geometry.zone_gap = f(value, key)?,
            "ent_col_pitch" => self.geometry.ent_col_pitch = f(value, key)?,
            "ent_col_modulus" => self.geometry.ent_col_modulus = u(value, key)?,
            "ent_col_residue" => self.geometry.ent_col_residue = u(value, key)?,
            "ent_first_row" => self.geometry.ent_first_row = u(value, key)?,
            "storage_cols" => self.geometry.storage_cols = u(value, key)?,
            "storage_rows" => self.geometry.storage_rows = u(value, key)?,
            "ent_cols" => self.geometry.ent_cols = u(value, key)?,
            "ent_rows" => self.geometry.ent_rows = u(value, key)?,
            "t_pi" => self.timing.t_pi = f(value, key)?,
            "t_2pi" => self.timing.t_2pi = f(value, key)?,
            "t_hop" => self.timing.t_hop = f(value, key)?,
            "tau_sw" => self.timing.tau_sw = f(value, key)?,
            "t_1q" => self.timing.t_1q = f(value, key)?,
            "aod_accel" => self.timing.aod_accel = f(value, key)?,
            "t_xfer" => self.timing.t_xfer = f(value, key)?,
            "f_2q" => self.fidelity.f_2q = f(value, key)?,
            "f_1q" => self.fidelity.f_1q = f(value, key)?,
            "f_hop" => self.fidelity.f_hop = f(value, key)?,
            "f_xfer" => self.fidelity.f_xfer = f(value, key)?,
            "t2" => self.fidelity.t2 = f(value, key)?,
            "f_xtalk" => self.fidelity.f_xtalk = f(value, key)?,
            "w_col" => self.tuning.w_col = f(value, key)?,
            "w_row" => self.tuning.w_row = f(value, key)?,
            "w_ent" => self.tuning.w_ent = f(value, key)?,
            "r_near" => self.tuning.r_near = u(value, key)?,
            "c_max" => self.tuning.c_max = u(value, key)?,
            "lambda_new" => self.tuning.lambda_new = f(value, key)?,
            "anchor_hysteresis" => self.tuning.anchor_hysteresis = f(value, key)?,
            "clearance" => self.tuning.clearance = f(value, key)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex-encoded.
    pub fn hash_hex(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

/// Read a config file from disk.
pub fn load_config(path: &std::path::Path) -> Result<HardwareConfig> {
    let text = std::fs::read_to_string(path)?;
    HardwareConfig::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eq1_values_at_defaults() {
        let tp = TimingParams::default();
        assert!((remote_cz_duration(0, &tp) - 0.668).abs() < 1e-9);
        assert!((remote_cz_duration(1, &tp) - 1.180).abs() < 1e-9);
        assert!((remote_cz_duration(5, &tp) - 3.228).abs() < 1e-9);
    }

    #[test]
    fn eq1_affine_with_hop_slope() {
        let tp = TimingParams::default();
        for hops in 0..=100u32 {
            let expect = 2.0 * tp.t_pi + 2.0 * hops as f64 * tp.t_hop + tp.t_2pi;
            assert!((remote_cz_duration(hops, &tp) - expect).abs() < 1e-9);
        }
        let slope = remote_cz_duration(1, &tp) - remote_cz_duration(0, &tp);
        assert!((slope - 0.512).abs() < 1e-9);
    }

    #[test]
    fn aod_move_examples() {
        let tp = TimingParams::default();
        assert!((aod_move_duration(0.0, &tp) - 30.0).abs() < 1e-9);
        assert!((aod_move_duration(2.0, &tp) - 50.0).abs() < 1e-9);
        let expect = 30.0 + 2.0 * (110.0f64 / 0.02).sqrt();
        assert!((aod_move_duration(110.0, &tp) - expect).abs() < 1e-9);
        assert!((aod_move_duration(110.0, &tp) - 178.323).abs() < 1e-2);
    }

    #[test]
    fn aod_move_monotone() {
        let tp = TimingParams::default();
        let mut prev = -1.0;
        for i in 0..400 {
            let d = i as f64 * 0.7;
            let t = aod_move_duration(d, &tp);
            assert!(t >= prev);
            prev = t;
        }
    }

    #[test]
    fn crop_minimum_case() {
        let g = crop_grid(1, &GeometrySpec::default());
        assert_eq!(g.storage_cols, 1);
        assert_eq!(g.storage_rows, 2);
        assert!(g.usable_col_count() >= 1);
    }

    #[test]
    fn crop_capacity_examples() {
        let g = crop_grid(10, &GeometrySpec::default());
        assert!(g.storage_capacity() >= 15);
        assert!(g.usable_col_count() >= 5);
        let g = crop_grid(100, &GeometrySpec::default());
        assert!(g.storage_capacity() >= 150);
        assert!(g.usable_col_count() >= 50);
        // gate sites must hold every qubit
        assert!(g.ent_gate_sites().len() >= 100);
    }

    #[test]
    fn crop_deterministic() {
        let a = crop_grid(37, &GeometrySpec::default());
        let b = crop_grid(37, &GeometrySpec::default());
        assert_eq!(a, b);
    }

    #[test]
    fn site_positions_injective() {
        let g = crop_grid(10, &GeometrySpec::default());
        let mut seen = std::collections::BTreeSet::new();
        for site in g.storage_sites().into_iter().chain(g.ent_sites()) {
            let (x, y) = g.position(site);
            assert!(seen.insert((x.to_bits(), y.to_bits())), "collision at {site}");
        }
    }

    #[test]
    fn one_hop_cz_beats_shortest_aod_round_trip() {
        let g = crop_grid(4, &GeometrySpec::default());
        let tp = TimingParams::default();
        let sites: Vec<Site> = g.storage_sites().into_iter().chain(g.ent_sites()).collect();
        let mut min_d = f64::INFINITY;
        for (i, &a) in sites.iter().enumerate() {
            for &b in &sites[i + 1..] {
                min_d = min_d.min(g.distance(a, b));
            }
        }
        assert!(min_d > 0.0);
        let round_trip = 2.0 * aod_move_duration(min_d, &tp);
        let cz = remote_cz_duration(1, &tp);
        assert!(round_trip >= 25.0 * cz, "{round_trip} vs {cz}");
    }

    #[test]
    fn lattice_adjacency() {
        let g = GeometrySpec::default();
        assert!(g.lattice_adjacent(Site::ent(4, 1), Site::ent(4, 2)));
        assert!(g.lattice_adjacent(Site::ent(4, 2), Site::ent(16, 2)));
        assert!(!g.lattice_adjacent(Site::ent(4, 1), Site::ent(16, 2)));
        assert!(!g.lattice_adjacent(Site::ent(4, 1), Site::ent(4, 3)));
        assert!(!g.lattice_adjacent(Site::storage(0, 0), Site::ent(4, 0)));
    }

    #[test]
    fn config_defaults_and_overrides() {
        let hw = HardwareConfig::parse("").unwrap();
        assert_eq!(hw, HardwareConfig::default());

        let hw = HardwareConfig::parse("t_pi = 0.2\n// comment\nf_2q = 0.99\n").unwrap();
        assert!((hw.timing.t_pi - 0.2).abs() < 1e-12);
        assert!((hw.fidelity.f_2q - 0.99).abs() < 1e-12);
    }

    #[test]
    fn config_rejects_bad_input() {
        assert!(HardwareConfig::parse("f_2q = 1.5").is_err());
        assert!(HardwareConfig::parse("no_such_key = 1").is_err());
        assert!(HardwareConfig::parse("t_pi 0.2").is_err());
        assert!(HardwareConfig::parse("t_pi = -1").is_err());
    }

    #[test]
    fn config_hash_stable() {
        let a = HardwareConfig::default().hash_hex();
        let b = HardwareConfig::default().hash_hex();
        assert_eq!(a, b);
        let c = HardwareConfig::parse("t_pi = 0.2").unwrap().hash_hex();
        assert_ne!(a, c);
    }
}
