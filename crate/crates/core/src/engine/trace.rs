use serde::{Deserialize, Serialize};

use super::equilibrium::Branch;
use crate::beam::SwitchState;
use crate::control::Phase;
use crate::locomotion::cycle_boundaries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Snap,
    ReverseSnap,
    CutOff,
    Reconnect,
    Toggle,
    FeasibilityWarning,
}

impl EventKind {
    pub fn label(self) -> &'static str {
        match self {
            EventKind::Snap => "Snap",
            EventKind::ReverseSnap => "ReverseSnap",
            EventKind::CutOff => "CutOff",
            EventKind::Reconnect => "Reconnect",
            EventKind::Toggle => "Toggle",
            EventKind::FeasibilityWarning => "FeasibilityWarning",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    /// One-based module number.
    pub module: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModuleSnapshot {
    pub temperature_c: f64,
    pub d_mm: f64,
    pub branch: Branch,
    pub phase: Phase,
    pub current_on: bool,
}

/// State after everything that happened at `t_s`. Records produced by a chain
/// of events at one instant share the same time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t_s: f64,
    pub modules: Vec<ModuleSnapshot>,
    pub switch: Option<SwitchState>,
    pub x_front_mm: f64,
    pub x_rear_mm: f64,
    pub event: Option<Event>,
}

impl TraceRecord {
    pub fn centroid_mm(&self) -> f64 {
        0.5 * (self.x_front_mm + self.x_rear_mm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub module_count: usize,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn events(&self) -> impl Iterator<Item = (f64, Event)> + '_ {
        self.records
            .iter()
            .filter_map(|r| r.event.map(|e| (r.t_s, e)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cycles: usize,
    pub cycle_periods_s: Vec<f64>,
    pub first_cycle_s: Option<f64>,
    pub mean_period_s: Option<f64>,
    /// Mean period excluding the first cycle.
    pub steady_period_s: Option<f64>,
    pub stdev_period_s: Option<f64>,
    /// Centroid displacement over the complete cycles.
    pub net_displacement_mm: f64,
    pub mm_per_cycle: Option<f64>,
    /// Centroid displacement from the first to the last record.
    pub total_displacement_mm: f64,
    pub events: Vec<(f64, EventKind, usize)>,
    pub feasibility: Vec<String>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn summarize(trace: &Trace) -> Summary {
    let bounds = cycle_boundaries(trace);
    let times: Vec<f64> = bounds.iter().map(|&i| trace.records[i].t_s).collect();
    let periods: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let cycles = periods.len();
    let mean_period_s = mean(&periods);
    let stdev_period_s = mean_period_s.map(|m| {
        (periods.iter().map(|p| (p - m) * (p - m)).sum::<f64>() / periods.len() as f64).sqrt()
    });
    let net_displacement_mm = if cycles > 0 {
        trace.records[*bounds.last().unwrap()].centroid_mm() - trace.records[0].centroid_mm()
    } else {
        0.0
    };
    let total_displacement_mm = match (trace.records.first(), trace.records.last()) {
        (Some(a), Some(b)) => b.centroid_mm() - a.centroid_mm(),
        _ => 0.0,
    };
    let events: Vec<(f64, EventKind, usize)> =
        trace.events().map(|(t, e)| (t, e.kind, e.module)).collect();
    let feasibility = events
        .iter()
        .filter(|(_, k, _)| *k == EventKind::FeasibilityWarning)
        .map(|(t, _, m)| format!("module {m} stalled at its stroke end at t = {t} s: push cannot reach the switch snap force"))
        .collect();
    Summary {
        cycles,
        first_cycle_s: periods.first().copied(),
        mean_period_s,
        steady_period_s: if cycles > 1 {
            mean(&periods[1..])
        } else {
            None
        },
        stdev_period_s,
        cycle_periods_s: periods,
        net_displacement_mm,
        mm_per_cycle: (cycles > 0).then(|| net_displacement_mm / cycles as f64),
        total_displacement_mm,
        events,
        feasibility,
    }
}
