//! Trace CSV and summary JSON.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{Summary, Trace};
use crate::error::{Error, Result};

pub const TRACE_HEADER: [&str; 10] = [
    "t_s",
    "module",
    "T_C",
    "phase",
    "d_mm",
    "current_on",
    "switch_state",
    "x_front_mm",
    "x_rear_mm",
    "event",
];

/// One row per module per record; an event appears only on the row of the
/// module it concerns. Floats use the shortest text that reads back exactly.
pub fn write_trace_csv<W: Write>(trace: &Trace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in &trace.records {
        let switch = r.switch.map(|s| s.to_string()).unwrap_or_default();
        for (i, m) in r.modules.iter().enumerate() {
            let event = r
                .event
                .filter(|e| e.module == i + 1)
                .map(|e| e.kind.label())
                .unwrap_or("");
            w.write_record([
                r.t_s.to_string(),
                (i + 1).to_string(),
                m.temperature_c.to_string(),
                m.phase.label().to_string(),
                m.d_mm.to_string(),
                m.current_on.to_string(),
                switch.clone(),
                r.x_front_mm.to_string(),
                r.x_rear_mm.to_string(),
                event.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_file(trace: &Trace, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_trace_csv(trace, std::io::BufWriter::new(f))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventEntry {
    pub t_s: f64,
    pub tag: String,
    pub module: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryDocument {
    pub cycles: usize,
    pub cycle_periods_s: Vec<f64>,
    pub first_cycle_s: Option<f64>,
    pub mean_period_s: Option<f64>,
    pub steady_period_s: Option<f64>,
    pub stdev_period_s: Option<f64>,
    pub net_displacement_mm: f64,
    pub total_displacement_mm: f64,
    pub mm_per_cycle: Option<f64>,
    pub events: Vec<EventEntry>,
    pub feasibility: Vec<String>,
}

impl From<&Summary> for SummaryDocument {
    fn from(s: &Summary) -> Self {
        Self {
            cycles: s.cycles,
            cycle_periods_s: s.cycle_periods_s.clone(),
            first_cycle_s: s.first_cycle_s,
            mean_period_s: s.mean_period_s,
            steady_period_s: s.steady_period_s,
            stdev_period_s: s.stdev_period_s,
            net_displacement_mm: s.net_displacement_mm,
            total_displacement_mm: s.total_displacement_mm,
            mm_per_cycle: s.mm_per_cycle,
            events: s
                .events
                .iter()
                .map(|&(t_s, kind, module)| EventEntry {
                    t_s,
                    tag: kind.label().to_string(),
                    module,
                })
                .collect(),
            feasibility: s.feasibility.clone(),
        }
    }
}

impl SummaryDocument {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}
