//! Mechanical switching logic.
//!
//! A single module closes its own circuit through a slider that the bearing
//! knocks out of its slot at the stroke end and pulls back in near the rest
//! position. Two modules share one supply through a bistable switch that the
//! powered module flips when it reaches its stroke end.

use serde::{Deserialize, Serialize};

use crate::beam::{switch_toggle, BistableSwitch, SwitchState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayState {
    /// Slider seated in its slot, circuit closed.
    pub engaged: bool,
    pub stroke_mm: f64,
    pub d_reset_mm: f64,
}

impl RelayState {
    pub fn new(stroke_mm: f64, d_reset_mm: f64) -> Result<Self> {
        let r = Self {
            engaged: true,
            stroke_mm,
            d_reset_mm,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.d_reset_mm && self.d_reset_mm < self.stroke_mm) {
            return Err(Error::Config(format!(
                "relay thresholds must satisfy 0 < d_reset < stroke (got d_reset = {} mm, stroke = {} mm)",
                self.d_reset_mm, self.stroke_mm
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    P1HeatPreSnap,
    P2HeatPostSnap,
    P3CutOff,
    P4CoolingReturn,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::P1HeatPreSnap => "P1",
            Phase::P2HeatPostSnap => "P2",
            Phase::P3CutOff => "P3",
            Phase::P4CoolingReturn => "P4",
        }
    }

    pub fn next(self) -> Phase {
        match self {
            Phase::P1HeatPreSnap => Phase::P2HeatPostSnap,
            Phase::P2HeatPostSnap => Phase::P3CutOff,
            Phase::P3CutOff => Phase::P4CoolingReturn,
            Phase::P4CoolingReturn => Phase::P1HeatPreSnap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ControlEvent {
    CutOff,
    Reconnect,
    Toggle,
}

/// Displacements within this distance of the stroke count as stopper contact.
pub const STROKE_CONTACT_TOL_MM: f64 = 1e-9;

/// Thresholds are level-triggered: the engaged flag carries the hysteresis, so
/// reaching the stroke while engaged cuts off and reaching `d_reset` while
/// disengaged reconnects, whatever the previous sample was.
pub fn relay_update(r: RelayState, d_mm: f64) -> Result<(RelayState, bool, Vec<ControlEvent>)> {
    r.validate()?;
    if d_mm < 0.0 || d_mm.is_nan() {
        return Err(Error::Domain {
            what: "relay displacement must be >= 0 mm",
            value: d_mm,
        });
    }
    let mut next = r;
    let mut events = Vec::new();
    if r.engaged && d_mm >= r.stroke_mm {
        next.engaged = false;
        events.push(ControlEvent::CutOff);
    } else if !r.engaged && d_mm <= r.d_reset_mm {
        next.engaged = true;
        events.push(ControlEvent::Reconnect);
    }
    Ok((next, next.engaged, events))
}

/// `engaged` doubles as "powered" for modules that are not relay-driven.
pub fn phase_of(relay: RelayState, d_mm: f64, snapped: bool) -> Phase {
    match (relay.engaged, snapped) {
        (true, false) => Phase::P1HeatPreSnap,
        (true, true) => Phase::P2HeatPostSnap,
        (false, _) if d_mm >= relay.stroke_mm - STROKE_CONTACT_TOL_MM => Phase::P3CutOff,
        (false, _) => Phase::P4CoolingReturn,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectorState {
    pub switch: BistableSwitch,
    /// Kept for reporting; guards fire at the module stroke end.
    pub middle_stopper_gap_mm: f64,
    pub stroke_mm: f64,
}

impl ConnectorState {
    pub fn new(switch: BistableSwitch, stroke_mm: f64) -> Self {
        Self {
            switch,
            middle_stopper_gap_mm: 1.5 * switch.length_mm,
            stroke_mm,
        }
    }

    /// Zero-based index of the module the switch currently routes power to.
    pub fn routed(&self) -> usize {
        match self.switch.state {
            SwitchState::S1 => 0,
            SwitchState::S2 => 1,
        }
    }
}

/// Snapshot of one module as seen by the connector. `push_n` is the margin by
/// which the coil force exceeds the beam force at the stroke end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModuleMotion {
    pub d_mm: f64,
    pub push_n: f64,
}

/// Module 1 pushes the long slider toward S2, module 2 pushes it back. Only
/// the routed module can act, and only once its bearing is at the stroke end.
pub fn connector_update(
    cs: ConnectorState,
    m1: ModuleMotion,
    m2: ModuleMotion,
) -> (ConnectorState, usize, Vec<ControlEvent>) {
    let routed = cs.routed();
    let (m, sign) = if routed == 0 { (m1, 1.0) } else { (m2, -1.0) };
    let mut next = cs;
    let mut events = Vec::new();
    if m.d_mm >= cs.stroke_mm - STROKE_CONTACT_TOL_MM {
        let sw = switch_toggle(cs.switch, sign * m.push_n);
        if sw.state != cs.switch.state {
            next.switch = sw;
            events.push(ControlEvent::Toggle);
        }
    }
    (next, next.routed(), events)
}

pub fn toggle_feasibility(margin_force_n: f64, sw: &BistableSwitch) -> bool {
    margin_force_n >= sw.f_snap_n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relay() -> RelayState {
        RelayState::new(25.0, 2.0).unwrap()
    }

    #[test]
    fn cutoff_at_stroke() {
        let (r, on, ev) = relay_update(relay(), 24.9).unwrap();
        assert!(r.engaged && on && ev.is_empty());
        let (r, on, ev) = relay_update(r, 25.1).unwrap();
        assert!(!r.engaged && !on);
        assert_eq!(ev, vec![ControlEvent::CutOff]);
    }

    #[test]
    fn stays_open_above_reset() {
        let r = RelayState {
            engaged: false,
            ..relay()
        };
        let (r, on, ev) = relay_update(r, 10.0).unwrap();
        let (r, on2, ev2) = relay_update(r, 9.0).unwrap();
        assert!(!r.engaged && !on && !on2 && ev.is_empty() && ev2.is_empty());
        let (r, on, ev) = relay_update(r, 1.5).unwrap();
        assert!(r.engaged && on);
        assert_eq!(ev, vec![ControlEvent::Reconnect]);
    }

    #[test]
    fn hysteresis_band_is_silent() {
        for engaged in [true, false] {
            let mut r = RelayState { engaged, ..relay() };
            for i in 0..1000 {
                let d = 13.5 + 11.0 * (i as f64 * 0.37).sin();
                let (next, _, ev) = relay_update(r, d).unwrap();
                assert!(ev.is_empty());
                r = next;
            }
            assert_eq!(r.engaged, engaged);
        }
    }

    #[test]
    fn relay_rejects_bad_thresholds() {
        assert!(matches!(RelayState::new(25.0, 30.0), Err(Error::Config(_))));
        assert!(RelayState::new(25.0, 0.0).is_err());
        let r = RelayState {
            d_reset_mm: 25.0,
            ..relay()
        };
        assert!(relay_update(r, 1.0).is_err());
    }

    #[test]
    fn phase_examples() {
        let on = relay();
        let off = RelayState {
            engaged: false,
            ..on
        };
        assert_eq!(phase_of(on, 3.0, false), Phase::P1HeatPreSnap);
        assert_eq!(phase_of(on, 22.0, true), Phase::P2HeatPostSnap);
        assert_eq!(phase_of(off, 25.0, true), Phase::P3CutOff);
        assert_eq!(phase_of(off, 20.0, true), Phase::P4CoolingReturn);
        assert_eq!(phase_of(off, 1.0, false), Phase::P4CoolingReturn);
        let mut p = Phase::P1HeatPreSnap;
        for _ in 0..4 {
            p = p.next();
        }
        assert_eq!(p, Phase::P1HeatPreSnap);
    }

    fn connector() -> ConnectorState {
        ConnectorState::new(BistableSwitch::default(), 25.0)
    }

    #[test]
    fn connector_routes_and_toggles() {
        let cs = connector();
        assert_eq!(cs.routed(), 0);
        assert_eq!(cs.middle_stopper_gap_mm, 15.0);
        let idle = ModuleMotion {
            d_mm: 0.0,
            push_n: -4.8,
        };
        let (cs, powered, ev) = connector_update(
            cs,
            ModuleMotion {
                d_mm: 25.0,
                push_n: 0.5,
            },
            idle,
        );
        assert_eq!((cs.switch.state, powered), (SwitchState::S2, 1));
        assert_eq!(ev, vec![ControlEvent::Toggle]);
        let (cs, powered, ev) = connector_update(
            cs,
            idle,
            ModuleMotion {
                d_mm: 25.0,
                push_n: 0.46,
            },
        );
        assert_eq!((cs.switch.state, powered), (SwitchState::S1, 0));
        assert_eq!(ev, vec![ControlEvent::Toggle]);
    }

    #[test]
    fn unrouted_module_cannot_toggle() {
        let cs = connector();
        for d2 in [0.0, 10.0, 24.0, 25.0] {
            let (next, powered, ev) = connector_update(
                cs,
                ModuleMotion {
                    d_mm: 3.0,
                    push_n: -4.0,
                },
                ModuleMotion {
                    d_mm: d2,
                    push_n: 3.0,
                },
            );
            assert_eq!((next.switch.state, powered), (SwitchState::S1, 0));
            assert!(ev.is_empty());
        }
    }

    #[test]
    fn weak_push_stalls() {
        let cs = connector();
        let (next, _, ev) = connector_update(
            cs,
            ModuleMotion {
                d_mm: 25.0,
                push_n: 0.44,
            },
            ModuleMotion {
                d_mm: 0.0,
                push_n: 0.0,
            },
        );
        assert_eq!(next.switch.state, SwitchState::S1);
        assert!(ev.is_empty());
    }

    #[test]
    fn feasibility_threshold() {
        let sw = BistableSwitch::default();
        assert!(toggle_feasibility(0.5, &sw));
        assert!(!toggle_feasibility(0.0, &sw));
        assert!(toggle_feasibility(0.45, &sw));
    }
}
