//! Quasi-static hybrid simulation.
//!
//! Between discrete events the heating power of every coil is constant, so
//! temperatures advance by the exact exponential update and each bearing sits
//! at the equilibrium of beam and coil on its current branch. Events (folds,
//! relay thresholds, switch toggles) are located by bisection in time and
//! applied one per committed sub-step.

mod equilibrium;
mod trace;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use equilibrium::{branch_bracket, solve_equilibrium, Branch, Equilibrium, EQUILIBRIUM_TOL_MM};
pub use trace::{summarize, Event, EventKind, ModuleSnapshot, Summary, Trace, TraceRecord};

use crate::actuator::{sma_force_unchecked, temperature_after, SmaParams};
use crate::beam::{BeamCurve, BistableSwitch, SwitchState};
use crate::control::{
    connector_update, phase_of, relay_update, toggle_feasibility, ConnectorState, ControlEvent,
    ModuleMotion, RelayState,
};
use crate::error::{Error, Result};
use crate::locomotion::{ground_step, BodyState, Claw, ClawPair, Orientation};

/// Runaway guard on the number of discrete events in one run.
pub const MAX_EVENTS: usize = 1_000_000;

/// Bisection in time stops at this fraction of the event tolerance.
const LOCATE_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Supply {
    pub voltage_v: f64,
    pub current_a: f64,
}

impl Supply {
    pub fn power_w(&self) -> f64 {
        self.voltage_v * self.current_a
    }
}

impl Default for Supply {
    fn default() -> Self {
        Self {
            voltage_v: 3.5,
            current_a: 2.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub stroke_mm: f64,
    pub d_reset_mm: f64,
    /// Chance that the slider sticks in its slot when the bearing arrives.
    pub stick_prob: f64,
    /// Push margin at the stroke end that frees a stuck slider.
    pub stick_release_n: f64,
    pub seed: u64,
}

impl Default for Circuit {
    fn default() -> Self {
        Self {
            stroke_mm: 25.0,
            d_reset_mm: 0.05,
            stick_prob: 0.0,
            stick_release_n: 0.3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClawSettings {
    pub fwd_resistance: f64,
    pub bwd_resistance_single: f64,
    pub bwd_resistance_dual: f64,
    pub module1_orientation: Orientation,
    /// Relative to module 2, which is itself mounted back to front.
    pub module2_orientation: Orientation,
    /// Body length change per mm of bearing travel.
    pub transmission_ratio: f64,
    pub module_length_mm: f64,
}

impl Default for ClawSettings {
    fn default() -> Self {
        Self {
            fwd_resistance: 1.0,
            bwd_resistance_single: 1.400922120581243,
            bwd_resistance_dual: 1.5333333329282346,
            module1_orientation: Orientation::Forward,
            module2_orientation: Orientation::Reversed,
            transmission_ratio: 1.0,
            module_length_mm: 66.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    pub duration_s: f64,
    pub dt_max_s: f64,
    pub event_tol_s: f64,
    /// Bench mode: power stays on until this time, bypassing the relay.
    pub manual_cutoff_s: Option<f64>,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            duration_s: 240.0,
            dt_max_s: 1e-2,
            event_tol_s: 1e-6,
            manual_cutoff_s: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub module_count: usize,
    pub supply: Supply,
    pub sma: SmaParams,
    pub beam: BeamCurve,
    pub switch: BistableSwitch,
    pub circuit: Circuit,
    pub claws: ClawSettings,
    pub sim: SimSettings,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            module_count: 1,
            supply: Supply::default(),
            sma: SmaParams::default(),
            beam: BeamCurve::default(),
            switch: BistableSwitch::default(),
            circuit: Circuit::default(),
            claws: ClawSettings::default(),
            sim: SimSettings::default(),
        }
    }
}

impl Scenario {
    pub fn dual() -> Self {
        Self {
            module_count: 2,
            sim: SimSettings {
                duration_s: 142.0,
                ..SimSettings::default()
            },
            ..Self::default()
        }
    }

    /// World-frame claws: the front foot belongs to module 1, the rear foot to
    /// the last module.
    pub fn claw_pair(&self) -> Result<ClawPair> {
        let c = &self.claws;
        let r_bwd = if self.module_count == 1 {
            c.bwd_resistance_single
        } else {
            c.bwd_resistance_dual
        };
        let front = Claw::new(c.fwd_resistance, r_bwd, c.module1_orientation)?;
        let rear = if self.module_count == 1 {
            front
        } else {
            Claw::new(c.fwd_resistance, r_bwd, c.module2_orientation.flipped())?
        };
        Ok(ClawPair { front, rear })
    }

    /// Body length change per mm of bearing travel, per module. Heating
    /// module 1 shortens the body; module 2 is mounted reversed.
    fn length_gain(&self, module: usize) -> f64 {
        let sign = if module == 0 { -1.0 } else { 1.0 };
        sign * self.claws.transmission_ratio
    }

    /// Largest push margin at the stroke end, reached once fully activated.
    pub fn max_push_margin_n(&self) -> f64 {
        self.sma.f_block_n
            - self.sma.k_sma_n_per_mm * self.circuit.stroke_mm
            - self.beam.eval(self.circuit.stroke_mm)
    }
}

/// Validates the scenario. Hard violations are returned as a
/// [`Error::Feasibility`] listing every broken invariant; soft issues come
/// back as warnings.
pub fn check_feasibility(sc: &Scenario) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    let mut warn = Vec::new();
    let stroke = sc.circuit.stroke_mm;

    if !(sc.module_count == 1 || sc.module_count == 2) {
        bad.push(format!(
            "module_count must be 1 or 2 (got {})",
            sc.module_count
        ));
    }
    if !(sc.supply.voltage_v > 0.0 && sc.supply.current_a > 0.0) {
        bad.push(format!(
            "supply voltage and current must be positive (got {} V, {} A)",
            sc.supply.voltage_v, sc.supply.current_a
        ));
    }
    let sma_ok = match sc.sma.validate(stroke) {
        Ok(()) => true,
        Err(e) => {
            bad.push(e.to_string());
            false
        }
    };
    let beam_ok = match sc.beam.validate() {
        Ok(()) => true,
        Err(e) => {
            bad.push(e.to_string());
            false
        }
    };
    if !(0.0 < sc.circuit.d_reset_mm && sc.circuit.d_reset_mm < stroke) {
        bad.push(format!(
            "relay thresholds must satisfy 0 < d_reset_mm < stroke_mm (got d_reset_mm = {}, stroke_mm = {})",
            sc.circuit.d_reset_mm, stroke
        ));
    }
    if beam_ok && !(sc.beam.d_valley_mm < stroke && stroke <= sc.beam.d_max_mm()) {
        bad.push(format!(
            "stroke_mm = {stroke} must lie past the beam valley ({} mm) and within {} mm",
            sc.beam.d_valley_mm,
            sc.beam.d_max_mm()
        ));
    }
    if !(0.0..=1.0).contains(&sc.circuit.stick_prob) {
        bad.push(format!(
            "stick_prob must lie in [0, 1] (got {})",
            sc.circuit.stick_prob
        ));
    }
    if sc.circuit.stick_prob > 0.0 && !(sc.circuit.stick_release_n > 0.0) {
        bad.push(format!(
            "stick_release_N must be positive (got {})",
            sc.circuit.stick_release_n
        ));
    }
    if !(sc.switch.f_snap_n > 0.0 && sc.switch.length_mm > 0.0) {
        bad.push(format!(
            "switch F_snap and length must be positive (got {} N, {} mm)",
            sc.switch.f_snap_n, sc.switch.length_mm
        ));
    }
    if let Err(e) = sc.claw_pair() {
        bad.push(e.to_string());
    }
    let c = &sc.claws;
    if !(c.transmission_ratio > 0.0) {
        bad.push(format!(
            "transmission_ratio must be positive (got {})",
            c.transmission_ratio
        ));
    }
    if !(c.module_length_mm > c.transmission_ratio * stroke) {
        bad.push(format!(
            "module_length_mm = {} must exceed the body travel per stroke ({} mm)",
            c.module_length_mm,
            c.transmission_ratio * stroke
        ));
    }
    let s = &sc.sim;
    if !(s.duration_s >= 0.0 && s.duration_s.is_finite()) {
        bad.push(format!(
            "duration_s must be finite and >= 0 (got {})",
            s.duration_s
        ));
    }
    if !(s.dt_max_s > 0.0) {
        bad.push(format!("dt_max_s must be positive (got {})", s.dt_max_s));
    }
    if !(s.event_tol_s > 0.0) {
        bad.push(format!(
            "event_tol_s must be positive (got {})",
            s.event_tol_s
        ));
    }
    if let Some(tm) = s.manual_cutoff_s {
        if !(tm >= 0.0) {
            bad.push(format!("manual_cutoff_s must be >= 0 (got {tm})"));
        }
        if sc.module_count != 1 {
            bad.push("manual_cutoff_s is only supported with module_count = 1".into());
        }
    }

    if sma_ok && beam_ok && sc.supply.power_w() > 0.0 {
        let p = &sc.sma;
        let t_ss = p.steady_state_c(sc.supply.power_w());
        if !(t_ss > p.t_full_c) {
            bad.push(format!(
                "supply cannot reach full activation: steady-state temperature {t_ss:.3} C <= T_full {} C",
                p.t_full_c
            ));
        }
        let f_snap_max = sma_force_unchecked(p.t_full_c, sc.beam.d_peak_mm, p);
        if !(f_snap_max > sc.beam.f_peak_n) {
            bad.push(format!(
                "snap-through unreachable: maximum coil force at d_peak is {f_snap_max:.4} N, not above F_peak = {} N",
                sc.beam.f_peak_n
            ));
        }
        if stroke <= sc.beam.d_max_mm() {
            let margin = sc.max_push_margin_n();
            let needs_stroke = sc.module_count == 2 || s.manual_cutoff_s.is_none();
            if needs_stroke && margin < 0.0 {
                bad.push(format!(
                    "stroke end unreachable: fully activated coil is {:.4} N short of the beam force at {stroke} mm",
                    -margin
                ));
            }
            if sc.module_count == 2 && margin >= 0.0 && !toggle_feasibility(margin, &sc.switch) {
                warn.push(format!(
                    "switch toggle infeasible: maximum push margin {margin:.4} N is below F_snap = {} N",
                    sc.switch.f_snap_n
                ));
            }
            if sc.module_count == 1
                && sc.circuit.stick_prob > 0.0
                && margin < sc.circuit.stick_release_n
            {
                warn.push(format!(
                    "a stuck slider can never release: maximum push margin {margin:.4} N is below stick_release_N = {}",
                    sc.circuit.stick_release_n
                ));
            }
        }
    }

    if bad.is_empty() {
        Ok(warn)
    } else {
        Err(Error::Feasibility(bad))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Module {
    t_c: f64,
    d_mm: f64,
    branch: Branch,
    stuck: bool,
    warned: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct Probe {
    t_c: f64,
    d_mm: f64,
    fold: bool,
    push_n: f64,
}

type Probes = [Probe; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Guard {
    Manual,
    Snap(usize),
    ReverseSnap(usize),
    CutOff(usize),
    StickRelease(usize),
    Reconnect(usize),
    Toggle(usize),
    Stall(usize),
}

#[derive(Debug, Clone)]
pub struct Simulator {
    sc: Scenario,
    power_w: f64,
    t_s: f64,
    n: usize,
    modules: [Module; 2],
    relay: RelayState,
    connector: ConnectorState,
    body: BodyState,
    claws: ClawPair,
    rng: ChaCha8Rng,
    events: usize,
    cycles: usize,
    manual_done: bool,
    locate_tol_s: f64,
}

impl Simulator {
    pub fn new(sc: Scenario) -> Result<Self> {
        check_feasibility(&sc)?;
        let n = sc.module_count;
        let m = Module {
            t_c: sc.sma.t_ambient_c,
            d_mm: 0.0,
            branch: Branch::Near,
            stuck: false,
            warned: false,
        };
        let lengths = (0..n).map(|_| sc.claws.module_length_mm).collect();
        Ok(Self {
            power_w: sc.supply.power_w(),
            t_s: 0.0,
            n,
            modules: [m; 2],
            relay: RelayState {
                engaged: true,
                stroke_mm: sc.circuit.stroke_mm,
                d_reset_mm: sc.circuit.d_reset_mm,
            },
            connector: ConnectorState::new(sc.switch, sc.circuit.stroke_mm),
            body: BodyState::new(lengths),
            claws: sc.claw_pair()?,
            rng: ChaCha8Rng::seed_from_u64(sc.circuit.seed),
            events: 0,
            cycles: 0,
            manual_done: false,
            locate_tol_s: sc.sim.event_tol_s * LOCATE_FRACTION,
            sc,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.sc
    }

    pub fn time_s(&self) -> f64 {
        self.t_s
    }

    pub fn cycles_completed(&self) -> usize {
        self.cycles
    }

    pub fn body(&self) -> &BodyState {
        &self.body
    }

    fn manual(&self) -> bool {
        self.sc.sim.manual_cutoff_s.is_some()
    }

    fn powered(&self, i: usize) -> bool {
        if self.n == 2 {
            self.connector.routed() == i
        } else if self.manual() {
            !self.manual_done
        } else {
            self.relay.engaged
        }
    }

    fn probe(&self, tau: f64) -> Result<Probes> {
        let p = &self.sc.sma;
        let c = &self.sc.beam;
        let stroke = self.sc.circuit.stroke_mm;
        let beam_at_stroke = c.eval(stroke);
        let mut out = Probes::default();
        for (i, m) in self.modules.iter().enumerate().take(self.n) {
            let power = if self.powered(i) { self.power_w } else { 0.0 };
            let t_c = if tau == 0.0 {
                m.t_c
            } else {
                temperature_after(m.t_c, power, tau, p)
            };
            let push_n = sma_force_unchecked(t_c, stroke, p) - beam_at_stroke;
            let (d_mm, fold) = match m.branch {
                Branch::Near => match solve_equilibrium(t_c, Branch::Near, c, p)? {
                    Equilibrium::Root(d) => (d, false),
                    Equilibrium::Fold => (c.d_peak_mm, true),
                },
                Branch::Far if push_n >= 0.0 => (stroke, false),
                Branch::Far => match solve_equilibrium(t_c, Branch::Far, c, p)? {
                    Equilibrium::Root(d) => (d.min(stroke), false),
                    Equilibrium::Fold => (c.d_valley_mm, true),
                },
            };
            out[i] = Probe {
                t_c,
                d_mm,
                fold,
                push_n,
            };
        }
        Ok(out)
    }

    /// Highest-priority guard that holds in the probed state. Every guard is
    /// monotone in time within a sub-step because temperatures are.
    fn guard(&self, pr: &Probes) -> Option<Guard> {
        for (i, pb) in pr.iter().enumerate().take(self.n) {
            if pb.fold {
                return Some(match self.modules[i].branch {
                    Branch::Near => Guard::Snap(i),
                    Branch::Far => Guard::ReverseSnap(i),
                });
            }
        }
        let stroke = self.sc.circuit.stroke_mm;
        if self.n == 1 {
            if self.manual() {
                return None;
            }
            let (m, pb) = (&self.modules[0], &pr[0]);
            if self.relay.engaged && m.branch == Branch::Far && pb.d_mm >= stroke {
                if !m.stuck {
                    return Some(Guard::CutOff(0));
                }
                if pb.push_n >= self.sc.circuit.stick_release_n {
                    return Some(Guard::StickRelease(0));
                }
            }
            if !self.relay.engaged && m.branch == Branch::Near && pb.d_mm <= self.relay.d_reset_mm {
                return Some(Guard::Reconnect(0));
            }
            return None;
        }
        let r = self.connector.routed();
        let (m, pb) = (&self.modules[r], &pr[r]);
        if m.branch == Branch::Far && pb.d_mm >= stroke {
            let sign = if r == 0 { 1.0 } else { -1.0 };
            let flipped = crate::beam::switch_toggle(self.connector.switch, sign * pb.push_n);
            if flipped.state != self.connector.switch.state {
                return Some(Guard::Toggle(r));
            }
            if !m.warned && !toggle_feasibility(self.sc.max_push_margin_n(), &self.sc.switch) {
                return Some(Guard::Stall(r));
            }
        }
        None
    }

    /// Moves the continuous state to the probed values.
    fn commit(&mut self, dt: f64, pr: &Probes) {
        self.t_s += dt;
        let mut dl = [0.0; 2];
        for i in 0..self.n {
            let m = &mut self.modules[i];
            dl[i] = self.sc.length_gain(i) * (pr[i].d_mm - m.d_mm);
            m.t_c = pr[i].t_c;
            m.d_mm = pr[i].d_mm;
        }
        self.body = ground_step(&self.body, &dl[..self.n], &self.claws);
    }

    fn jump(&mut self, i: usize, d_mm: f64) {
        let mut dl = [0.0; 2];
        dl[i] = self.sc.length_gain(i) * (d_mm - self.modules[i].d_mm);
        self.modules[i].d_mm = d_mm;
        self.body = ground_step(&self.body, &dl[..self.n], &self.claws);
    }

    fn apply(&mut self, g: Guard, pr: &Probes) -> Result<Option<Event>> {
        let p = self.sc.sma;
        let c = self.sc.beam;
        let stroke = self.sc.circuit.stroke_mm;
        let ev = |kind, i: usize| {
            Some(Event {
                kind,
                module: i + 1,
            })
        };
        let out = match g {
            Guard::Manual => {
                self.manual_done = true;
                ev(EventKind::CutOff, 0)
            }
            Guard::Snap(i) => {
                self.modules[i].branch = Branch::Far;
                let d = if pr[i].push_n >= 0.0 {
                    stroke
                } else {
                    let root = solve_equilibrium(pr[i].t_c, Branch::Far, &c, &p)?
                        .root()
                        .ok_or_else(|| {
                            Error::Bracket(format!(
                                "no far-branch equilibrium after snap at T = {} C",
                                pr[i].t_c
                            ))
                        })?;
                    root.min(stroke)
                };
                self.jump(i, d);
                ev(EventKind::Snap, i)
            }
            Guard::ReverseSnap(i) => {
                self.modules[i].branch = Branch::Near;
                let d = solve_equilibrium(pr[i].t_c, Branch::Near, &c, &p)?
                    .root()
                    .ok_or_else(|| {
                        Error::Bracket(format!(
                            "no near-branch equilibrium after reverse snap at T = {} C",
                            pr[i].t_c
                        ))
                    })?;
                self.jump(i, d);
                ev(EventKind::ReverseSnap, i)
            }
            Guard::CutOff(i) => {
                let prob = self.sc.circuit.stick_prob;
                if prob > 0.0 && self.rng.random::<f64>() < prob {
                    self.modules[i].stuck = true;
                    None
                } else {
                    self.relay_transition(i)?
                }
            }
            Guard::StickRelease(i) => {
                self.modules[i].stuck = false;
                self.relay_transition(i)?
            }
            Guard::Reconnect(i) => self.relay_transition(i)?,
            Guard::Toggle(i) => {
                let motion = |k: usize| ModuleMotion {
                    d_mm: self.modules[k].d_mm,
                    push_n: pr[k].push_n,
                };
                let (next, _, events) = connector_update(self.connector, motion(0), motion(1));
                self.connector = next;
                if events.contains(&ControlEvent::Toggle) {
                    for m in &mut self.modules {
                        m.warned = false;
                    }
                    if next.switch.state == SwitchState::S1 {
                        self.cycles += 1;
                    }
                    ev(EventKind::Toggle, i)
                } else {
                    None
                }
            }
            Guard::Stall(i) => {
                self.modules[i].warned = true;
                ev(EventKind::FeasibilityWarning, i)
            }
        };
        if out.is_some() {
            self.events += 1;
            if self.events > MAX_EVENTS {
                return Err(Error::Watchdog {
                    events: self.events,
                    t_s: self.t_s,
                });
            }
        }
        Ok(out)
    }

    fn relay_transition(&mut self, i: usize) -> Result<Option<Event>> {
        let (next, _, events) = relay_update(self.relay, self.modules[i].d_mm)?;
        self.relay = next;
        Ok(events.first().map(|e| {
            let kind = match e {
                ControlEvent::CutOff => EventKind::CutOff,
                ControlEvent::Reconnect => {
                    self.cycles += 1;
                    EventKind::Reconnect
                }
                ControlEvent::Toggle => EventKind::Toggle,
            };
            Event {
                kind,
                module: i + 1,
            }
        }))
    }

    /// Applies an event that is due at the current instant, if any.
    pub fn instant_event(&mut self) -> Result<Option<TraceRecord>> {
        let pr = self.probe(0.0)?;
        let manual_due = self.manual()
            && !self.manual_done
            && self.t_s >= self.sc.sim.manual_cutoff_s.unwrap_or(f64::INFINITY);
        let guard = if manual_due {
            Some(Guard::Manual)
        } else {
            self.guard(&pr)
        };
        let Some(g) = guard else { return Ok(None) };
        self.commit(0.0, &pr);
        let event = self.apply(g, &pr)?;
        Ok(Some(self.record(event)))
    }

    /// Advances by at most `dt_s`. When a guard fires inside the interval the
    /// step stops at the located event time and applies it.
    pub fn step(&mut self, dt_s: f64) -> Result<TraceRecord> {
        if let Some(rec) = self.instant_event()? {
            return Ok(rec);
        }
        if !(dt_s > 0.0) || dt_s > self.sc.sim.dt_max_s * (1.0 + 1e-12) {
            return Err(Error::Domain {
                what: "step size must lie in (0, dt_max]",
                value: dt_s,
            });
        }
        let mut dt = dt_s;
        let mut land_on = None;
        if let (Some(tm), false) = (self.sc.sim.manual_cutoff_s, self.manual_done) {
            if self.t_s < tm && self.t_s + dt >= tm {
                dt = tm - self.t_s;
                land_on = Some(tm);
            }
        }
        let end = self.probe(dt)?;
        if self.guard(&end).is_none() {
            self.commit(dt, &end);
            if let Some(tm) = land_on {
                self.t_s = tm;
            }
            return Ok(self.record(None));
        }
        let (mut lo, mut hi) = (0.0, dt);
        let mut at_hi = end;
        while hi - lo > self.locate_tol_s {
            let mid = 0.5 * (lo + hi);
            let pr = self.probe(mid)?;
            if self.guard(&pr).is_some() {
                hi = mid;
                at_hi = pr;
            } else {
                lo = mid;
            }
        }
        self.commit(hi, &at_hi);
        let g = self
            .guard(&at_hi)
            .expect("guard holds at the upper bisection bound");
        let event = self.apply(g, &at_hi)?;
        Ok(self.record(event))
    }

    pub fn record(&self, event: Option<Event>) -> TraceRecord {
        let modules = (0..self.n)
            .map(|i| {
                let m = &self.modules[i];
                let on = self.powered(i);
                ModuleSnapshot {
                    temperature_c: m.t_c,
                    d_mm: m.d_mm,
                    branch: m.branch,
                    phase: phase_of(
                        RelayState {
                            engaged: on,
                            ..self.relay
                        },
                        m.d_mm,
                        m.branch == Branch::Far,
                    ),
                    current_on: on,
                }
            })
            .collect();
        TraceRecord {
            t_s: self.t_s,
            modules,
            switch: (self.n == 2).then_some(self.connector.switch.state),
            x_front_mm: self.body.x_front_mm,
            x_rear_mm: self.body.x_rear_mm,
            event,
        }
    }
}

/// Runs a scenario to its duration.
pub fn run(sc: &Scenario) -> Result<(Trace, Summary)> {
    let warnings = check_feasibility(sc)?;
    let trace = simulate(sc)?;
    let mut summary = summarize(&trace);
    let mut feasibility = warnings;
    feasibility.append(&mut summary.feasibility);
    summary.feasibility = feasibility;
    Ok((trace, summary))
}

/// Produces the trace only.
pub fn simulate(sc: &Scenario) -> Result<Trace> {
    let mut sim = Simulator::new(*sc)?;
    let mut records = Vec::new();
    let duration = sc.sim.duration_s;
    if duration > 0.0 {
        records.push(sim.record(None));
        loop {
            let remaining = duration - sim.time_s();
            if remaining <= 1e-12 {
                while let Some(rec) = sim.instant_event()? {
                    records.push(rec);
                }
                break;
            }
            records.push(sim.step(remaining.min(sc.sim.dt_max_s))?);
        }
    }
    Ok(Trace {
        module_count: sc.module_count,
        records,
    })
}
