//! Scenario files.
//!
//! Files use TOML syntax with one table per section. Every physical quantity
//! carries its unit in the key name, unknown keys are rejected, and missing
//! keys take the library defaults. Overlays are merged key by key on top of a
//! base file before the result is interpreted.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::actuator::SmaParams;
use crate::beam::{BeamCurve, BeamPreset, BistableSwitch, SwitchState};
use crate::calibrate::Calibration;
use crate::engine::{Circuit, ClawSettings, Scenario, SimSettings, Supply};
use crate::error::{Error, Result};
use crate::locomotion::Orientation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SupplySection {
    #[serde(rename = "voltage_V")]
    pub voltage_v: f64,
    #[serde(rename = "current_A")]
    pub current_a: f64,
}

impl Default for SupplySection {
    fn default() -> Self {
        let s = Supply::default();
        Self {
            voltage_v: s.voltage_v,
            current_a: s.current_a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmaSection {
    pub n_coils: u32,
    pub wire_diameter_mm: f64,
    pub mandrel_diameter_mm: f64,
    #[serde(rename = "T_ambient_C")]
    pub t_ambient_c: f64,
    #[serde(rename = "T_transition_C")]
    pub t_transition_c: f64,
    #[serde(rename = "T_full_C")]
    pub t_full_c: f64,
    #[serde(rename = "F_block_N")]
    pub f_block_n: f64,
    #[serde(rename = "k_sma_N_per_mm")]
    pub k_sma_n_per_mm: f64,
    #[serde(rename = "C_th_J_per_C")]
    pub c_th_j_per_c: f64,
    #[serde(rename = "h_th_W_per_C")]
    pub h_th_w_per_c: f64,
}

impl Default for SmaSection {
    fn default() -> Self {
        let p = SmaParams::default();
        Self {
            n_coils: p.n_coils,
            wire_diameter_mm: p.wire_diameter_mm,
            mandrel_diameter_mm: p.mandrel_diameter_mm,
            t_ambient_c: p.t_ambient_c,
            t_transition_c: p.t_transition_c,
            t_full_c: p.t_full_c,
            f_block_n: p.f_block_n,
            k_sma_n_per_mm: p.k_sma_n_per_mm,
            c_th_j_per_c: p.c_th_j_per_c,
            h_th_w_per_c: p.h_th_w_per_c,
        }
    }
}

/// A preset with optional per-knot overrides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamSection {
    pub preset: BeamPreset,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_peak_mm: Option<f64>,
    #[serde(rename = "F_peak_N", skip_serializing_if = "Option::is_none")]
    pub f_peak_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_valley_mm: Option<f64>,
    #[serde(rename = "F_valley_N", skip_serializing_if = "Option::is_none")]
    pub f_valley_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_stop_mm: Option<f64>,
    #[serde(rename = "F_stop_N", skip_serializing_if = "Option::is_none")]
    pub f_stop_n: Option<f64>,
}

impl Default for BeamSection {
    fn default() -> Self {
        Self {
            preset: BeamPreset::Theoretical,
            d_peak_mm: None,
            f_peak_n: None,
            d_valley_mm: None,
            f_valley_n: None,
            d_stop_mm: None,
            f_stop_n: None,
        }
    }
}

impl BeamSection {
    pub fn curve(&self) -> BeamCurve {
        let b = BeamCurve::preset(self.preset);
        BeamCurve {
            d_peak_mm: self.d_peak_mm.unwrap_or(b.d_peak_mm),
            f_peak_n: self.f_peak_n.unwrap_or(b.f_peak_n),
            d_valley_mm: self.d_valley_mm.unwrap_or(b.d_valley_mm),
            f_valley_n: self.f_valley_n.unwrap_or(b.f_valley_n),
            d_stop_mm: self.d_stop_mm.unwrap_or(b.d_stop_mm),
            f_stop_n: self.f_stop_n.unwrap_or(b.f_stop_n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwitchSection {
    #[serde(rename = "F_snap_N")]
    pub f_snap_n: f64,
    #[serde(rename = "L_switch_mm")]
    pub l_switch_mm: f64,
}

impl Default for SwitchSection {
    fn default() -> Self {
        let s = BistableSwitch::default();
        Self {
            f_snap_n: s.f_snap_n,
            l_switch_mm: s.length_mm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitSection {
    pub stroke_mm: f64,
    pub d_reset_mm: f64,
    pub stick_prob: f64,
    #[serde(rename = "stick_release_N")]
    pub stick_release_n: f64,
    pub seed: u64,
}

impl Default for CircuitSection {
    fn default() -> Self {
        let c = Circuit::default();
        Self {
            stroke_mm: c.stroke_mm,
            d_reset_mm: c.d_reset_mm,
            stick_prob: c.stick_prob,
            stick_release_n: c.stick_release_n,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConnectorSection {
    pub initial_state: SwitchState,
}

impl Default for ConnectorSection {
    fn default() -> Self {
        Self {
            initial_state: SwitchState::S1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClawsSection {
    pub fwd_resistance: f64,
    pub bwd_resistance_single: f64,
    pub bwd_resistance_dual: f64,
    pub module1_orientation: Orientation,
    pub module2_orientation: Orientation,
    pub transmission_ratio: f64,
    pub module_length_mm: f64,
}

impl Default for ClawsSection {
    fn default() -> Self {
        let c = ClawSettings::default();
        Self {
            fwd_resistance: c.fwd_resistance,
            bwd_resistance_single: c.bwd_resistance_single,
            bwd_resistance_dual: c.bwd_resistance_dual,
            module1_orientation: c.module1_orientation,
            module2_orientation: c.module2_orientation,
            transmission_ratio: c.transmission_ratio,
            module_length_mm: c.module_length_mm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub module_count: usize,
    pub duration_s: f64,
    pub dt_max_s: f64,
    pub event_tol_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manual_cutoff_s: Option<f64>,
}

impl Default for SimSection {
    fn default() -> Self {
        let s = SimSettings::default();
        Self {
            module_count: 1,
            duration_s: s.duration_s,
            dt_max_s: s.dt_max_s,
            event_tol_s: s.event_tol_s,
            manual_cutoff_s: s.manual_cutoff_s,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub supply: SupplySection,
    pub sma: SmaSection,
    pub beam: BeamSection,
    pub switch: SwitchSection,
    pub circuit: CircuitSection,
    pub connector: ConnectorSection,
    pub claws: ClawsSection,
    pub sim: SimSection,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string().trim_end().to_string())
}

/// Reads a file as a raw TOML table.
pub fn read_table(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    text.parse::<toml::Table>()
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Merges `overlay` into `base`, recursing into tables.
pub fn merge_tables(base: &mut toml::Table, overlay: toml::Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge_tables(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Sets a numeric `section.key` in a raw table, keeping integer keys integral.
pub fn set_number(table: &mut toml::Table, key: &str, value: f64) -> Result<()> {
    let (section, name) = key.split_once('.').ok_or_else(|| {
        Error::Config(format!(
            "parameter key `{key}` must have the form section.key"
        ))
    })?;
    let sec = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()))
        .as_table_mut()
        .ok_or_else(|| Error::Config(format!("`{section}` is not a section")))?;
    let integral = matches!(key, "sma.n_coils" | "circuit.seed" | "sim.module_count");
    let v = if integral {
        toml::Value::Integer(value.round() as i64)
    } else {
        toml::Value::Float(value)
    };
    sec.insert(name.to_string(), v);
    // Reject keys the schema does not know.
    ConfigFile::from_table(table.clone())?;
    Ok(())
}

impl ConfigFile {
    pub fn from_table(table: toml::Table) -> Result<Self> {
        toml::Value::Table(table).try_into().map_err(parse_err)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(parse_err)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::load_with_overlays::<&Path>(path, &[])
    }

    pub fn load_with_overlays<P: AsRef<Path>>(path: &Path, overlays: &[P]) -> Result<Self> {
        let mut table = read_table(path)?;
        for o in overlays {
            merge_tables(&mut table, read_table(o.as_ref())?);
        }
        Self::from_table(table).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(parse_err)
    }

    pub fn to_scenario(&self) -> Scenario {
        let s = &self.sma;
        Scenario {
            module_count: self.sim.module_count,
            supply: Supply {
                voltage_v: self.supply.voltage_v,
                current_a: self.supply.current_a,
            },
            sma: SmaParams {
                n_coils: s.n_coils,
                wire_diameter_mm: s.wire_diameter_mm,
                mandrel_diameter_mm: s.mandrel_diameter_mm,
                t_ambient_c: s.t_ambient_c,
                t_transition_c: s.t_transition_c,
                t_full_c: s.t_full_c,
                f_block_n: s.f_block_n,
                k_sma_n_per_mm: s.k_sma_n_per_mm,
                c_th_j_per_c: s.c_th_j_per_c,
                h_th_w_per_c: s.h_th_w_per_c,
            },
            beam: self.beam.curve(),
            switch: BistableSwitch {
                f_snap_n: self.switch.f_snap_n,
                length_mm: self.switch.l_switch_mm,
                state: self.connector.initial_state,
            },
            circuit: Circuit {
                stroke_mm: self.circuit.stroke_mm,
                d_reset_mm: self.circuit.d_reset_mm,
                stick_prob: self.circuit.stick_prob,
                stick_release_n: self.circuit.stick_release_n,
                seed: self.circuit.seed,
            },
            claws: ClawSettings {
                fwd_resistance: self.claws.fwd_resistance,
                bwd_resistance_single: self.claws.bwd_resistance_single,
                bwd_resistance_dual: self.claws.bwd_resistance_dual,
                module1_orientation: self.claws.module1_orientation,
                module2_orientation: self.claws.module2_orientation,
                transmission_ratio: self.claws.transmission_ratio,
                module_length_mm: self.claws.module_length_mm,
            },
            sim: SimSettings {
                duration_s: self.sim.duration_s,
                dt_max_s: self.sim.dt_max_s,
                event_tol_s: self.sim.event_tol_s,
                manual_cutoff_s: self.sim.manual_cutoff_s,
            },
        }
    }
}

/// Overlay holding only the fitted values.
pub fn calibration_overlay(cal: &Calibration) -> toml::Table {
    let mut out = toml::Table::new();
    let mut put = |section: &str, key: &str, v: f64| {
        out.entry(section.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .expect("sections are tables")
            .insert(key.to_string(), toml::Value::Float(v));
    };
    if let Some(t) = cal.thermal {
        put("sma", "C_th_J_per_C", t.c_th_j_per_c);
        put("sma", "h_th_W_per_C", t.h_th_w_per_c);
        put("circuit", "d_reset_mm", t.d_reset_mm);
    }
    if let Some(c) = cal.single {
        put("claws", "fwd_resistance", 1.0);
        put("claws", "bwd_resistance_single", c.bwd_resistance);
    }
    if let Some(c) = cal.dual {
        put("claws", "fwd_resistance", 1.0);
        put("claws", "bwd_resistance_dual", c.bwd_resistance);
    }
    out
}
