//! Two-foot anchor model of crawling on directional claws.
//!
//! A length change is shared between the front and rear foot in inverse
//! proportion to how hard each foot resists the motion it would need to make.
//! Stretching pushes the front foot forward and the rear foot back; shrinking
//! does the opposite.

use serde::{Deserialize, Serialize};

use crate::engine::{EventKind, Trace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Reversed,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Reversed,
            Orientation::Reversed => Orientation::Forward,
        }
    }
}

/// Sliding resistance of one foot, in the frame of the module it is fixed to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Claw {
    pub r_fwd: f64,
    pub r_bwd: f64,
    pub orientation: Orientation,
}

impl Claw {
    pub fn new(r_fwd: f64, r_bwd: f64, orientation: Orientation) -> Result<Self> {
        if !(r_fwd > 0.0 && r_bwd > 0.0) || !r_fwd.is_finite() || !r_bwd.is_finite() {
            return Err(Error::InvalidParams(format!(
                "claw resistances must be positive and finite (got r_fwd = {r_fwd}, r_bwd = {r_bwd})"
            )));
        }
        Ok(Self {
            r_fwd,
            r_bwd,
            orientation,
        })
    }

    /// Resistances to moving along +x and -x in the world frame.
    pub fn world(&self) -> (f64, f64) {
        match self.orientation {
            Orientation::Forward => (self.r_fwd, self.r_bwd),
            Orientation::Reversed => (self.r_bwd, self.r_fwd),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClawPair {
    pub front: Claw,
    pub rear: Claw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyState {
    pub x_front_mm: f64,
    pub x_rear_mm: f64,
    /// One entry per module segment.
    pub lengths_mm: Vec<f64>,
}

impl BodyState {
    pub fn new(lengths_mm: Vec<f64>) -> Self {
        let total: f64 = lengths_mm.iter().sum();
        Self {
            x_front_mm: total,
            x_rear_mm: 0.0,
            lengths_mm,
        }
    }

    pub fn total_length_mm(&self) -> f64 {
        self.lengths_mm.iter().sum()
    }

    pub fn centroid_mm(&self) -> f64 {
        0.5 * (self.x_front_mm + self.x_rear_mm)
    }
}

/// Applies per-segment signed length changes `dl_mm`.
pub fn ground_step(b: &BodyState, dl_mm: &[f64], claws: &ClawPair) -> BodyState {
    debug_assert_eq!(dl_mm.len(), b.lengths_mm.len());
    let lengths_mm: Vec<f64> = b
        .lengths_mm
        .iter()
        .zip(dl_mm)
        .map(|(l, dl)| l + dl)
        .collect();
    let total: f64 = lengths_mm.iter().sum();
    let dl_total = total - b.total_length_mm();
    let (front_fwd, front_bwd) = claws.front.world();
    let (rear_fwd, rear_bwd) = claws.rear.world();
    let x_rear_mm = if dl_total >= 0.0 {
        // Front goes forward, rear goes back.
        let (rf, rr) = (front_fwd, rear_bwd);
        b.x_rear_mm - dl_total * rf / (rf + rr)
    } else {
        // Front comes back, rear comes forward.
        let (rf, rr) = (front_bwd, rear_fwd);
        b.x_rear_mm - dl_total * rf / (rf + rr)
    };
    BodyState {
        x_front_mm: x_rear_mm + total,
        x_rear_mm,
        lengths_mm,
    }
}

/// Centroid displacement per complete cycle.
pub fn net_cycle_displacement(trace: &Trace) -> Result<f64> {
    let (cycles, net) = complete_cycle_displacement(trace);
    if cycles == 0 {
        return Err(Error::InsufficientTrace);
    }
    Ok(net / cycles as f64)
}

/// Cycle boundaries are Reconnect events for a single module and the
/// S2 -> S1 toggles for a pair; the trace start is the first boundary.
pub(crate) fn cycle_boundaries(trace: &Trace) -> Vec<usize> {
    let mut out = Vec::new();
    if trace.records.is_empty() {
        return out;
    }
    out.push(0);
    for (i, r) in trace.records.iter().enumerate() {
        let Some(ev) = r.event else { continue };
        let boundary = match ev.kind {
            EventKind::Reconnect => trace.module_count == 1,
            EventKind::Toggle => {
                trace.module_count == 2 && r.switch == Some(crate::beam::SwitchState::S1)
            }
            _ => false,
        };
        if boundary {
            out.push(i);
        }
    }
    out
}

fn complete_cycle_displacement(trace: &Trace) -> (usize, f64) {
    let b = cycle_boundaries(trace);
    if b.len() < 2 {
        return (0, 0.0);
    }
    let first = &trace.records[b[0]];
    let last = &trace.records[*b.last().unwrap()];
    let c = |r: &crate::engine::TraceRecord| 0.5 * (r.x_front_mm + r.x_rear_mm);
    (b.len() - 1, c(last) - c(first))
}
