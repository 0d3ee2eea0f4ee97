//! Fitting model parameters to observed timing and travel.
//!
//! Thermal constants are fitted in two nested one-dimensional problems: for a
//! given loss coefficient `h` the capacitance follows in closed form from the
//! heat-up time, and `h` itself is found by bisection with the simulator in
//! the loop. Claw anisotropy is a bisection in `log R` per scenario.

use serde::{Deserialize, Serialize};

use crate::actuator::heat_up_time;
use crate::engine::{EventKind, Scenario, Simulator};
use crate::error::{Error, Result};

/// Default reference horizon in cycles for each module count.
pub const REFERENCE_CYCLES_SINGLE: usize = 12;
pub const REFERENCE_CYCLES_DUAL: usize = 5;

/// Accepted relative error of a fitted travel rate.
pub const CLAW_REL_TOL: f64 = 0.05;

const THERMAL_SCAN_POINTS: usize = 40;
const THERMAL_RESIDUAL_TOL_S: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationTargets {
    pub heat_time_s: Option<f64>,
    pub cycle_period_s: Option<f64>,
    pub mm_per_cycle_single: Option<f64>,
    pub mm_per_cycle_dual: Option<f64>,
    pub reference_cycles_single: Option<usize>,
    pub reference_cycles_dual: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalFit {
    pub c_th_j_per_c: f64,
    pub h_th_w_per_c: f64,
    /// Passed through unchanged.
    pub d_reset_mm: f64,
    pub heat_time_s: f64,
    pub first_cycle_s: f64,
    pub steady_period_s: f64,
    /// Time of the last reference cycle end plus a quarter steady period,
    /// minus the reference horizon.
    pub residual_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClawFit {
    pub module_count: usize,
    pub bwd_resistance: f64,
    pub mm_per_cycle: f64,
    pub target_mm_per_cycle: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub thermal: Option<ThermalFit>,
    pub single: Option<ClawFit>,
    pub dual: Option<ClawFit>,
}

impl Calibration {
    /// Applies the fitted values to a scenario.
    pub fn apply(&self, sc: &mut Scenario) {
        if let Some(t) = self.thermal {
            sc.sma.c_th_j_per_c = t.c_th_j_per_c;
            sc.sma.h_th_w_per_c = t.h_th_w_per_c;
            sc.circuit.d_reset_mm = t.d_reset_mm;
        }
        if let Some(c) = self.single {
            sc.claws.bwd_resistance_single = c.bwd_resistance;
        }
        if let Some(c) = self.dual {
            sc.claws.bwd_resistance_dual = c.bwd_resistance;
        }
    }
}

/// Capacitance that makes heating from ambient to full activation take
/// `heat_time_s` at loss coefficient `h`.
pub fn capacitance_for_heat_time(sc: &Scenario, heat_time_s: f64, h: f64) -> Result<f64> {
    let p = &sc.sma;
    let a = sc.supply.power_w() / h;
    let rise = p.t_full_c - p.t_ambient_c;
    if !(a > rise) {
        return Err(Error::InfeasibleTarget(format!(
            "h_th = {h} W/C cannot reach T_full at {} W",
            sc.supply.power_w()
        )));
    }
    Ok(heat_time_s * h / (a / (a - rise)).ln())
}

/// Start time plus the end time and centroid of each of the first `n` cycles.
fn cycle_marks(sc: &Scenario, n: usize, max_time_s: f64) -> Result<Vec<(f64, f64)>> {
    let mut sc = *sc;
    sc.sim.manual_cutoff_s = None;
    let mut sim = Simulator::new(sc)?;
    let mut marks = vec![(0.0, sim.body().centroid_mm())];
    while marks.len() <= n && sim.time_s() < max_time_s {
        let rec = sim.step(sc.sim.dt_max_s)?;
        if let Some(e) = rec.event {
            let boundary = match e.kind {
                EventKind::Reconnect => sc.module_count == 1,
                EventKind::Toggle => sc.module_count == 2 && sim.cycles_completed() == marks.len(),
                _ => false,
            };
            if boundary {
                marks.push((rec.t_s, rec.centroid_mm()));
            }
        }
    }
    Ok(marks)
}

/// First period and mean later period over `n` cycles; `None` if the run
/// does not finish them within `max_time_s`.
fn cycle_timing(sc: &Scenario, n: usize, max_time_s: f64) -> Result<Option<(f64, f64, f64)>> {
    let marks = cycle_marks(sc, n, max_time_s)?;
    if marks.len() <= n {
        return Ok(None);
    }
    let first = marks[1].0;
    let steady = if n > 1 {
        (marks[n].0 - first) / (n - 1) as f64
    } else {
        first
    };
    Ok(Some((marks[n].0, first, steady)))
}

fn cycle_stats(sc: &Scenario, n: usize, max_time_s: f64) -> Result<(f64, f64)> {
    let (_, first, steady) = cycle_timing(sc, n, max_time_s)?.ok_or(Error::InsufficientTrace)?;
    Ok((first, steady))
}

fn period_residual(sc: &Scenario, t_cycle: f64, n: usize) -> Result<(f64, f64, f64)> {
    let horizon = 4.0 * n as f64 * t_cycle;
    Ok(match cycle_timing(sc, n, horizon)? {
        Some((end, first, steady)) => (end + 0.25 * steady - n as f64 * t_cycle, first, steady),
        // Too slow to finish the horizon: strongly positive.
        None => (horizon, f64::NAN, f64::NAN),
    })
}

/// Fits `C_th` and `h_th` so that heating from ambient to full activation
/// takes `heat_time_s` and the single-module rhythm fits `n` cycles of
/// `cycle_period_s` with a quarter period to spare.
pub fn calibrate_thermal(
    sc: &Scenario,
    heat_time_s: f64,
    cycle_period_s: f64,
    n: usize,
) -> Result<ThermalFit> {
    if !(heat_time_s > 0.0 && cycle_period_s > 0.0) || n == 0 {
        return Err(Error::InfeasibleTarget(format!(
            "thermal targets must be positive (heat {heat_time_s} s, period {cycle_period_s} s, {n} cycles)"
        )));
    }
    let mut base = *sc;
    base.module_count = 1;
    let h_max = base.supply.power_w() / (base.sma.t_full_c - base.sma.t_ambient_c);
    if !(h_max > 0.0) {
        return Err(Error::InfeasibleTarget(
            "supply power must be positive".into(),
        ));
    }
    let eval = |h: f64| -> Result<(f64, f64, f64)> {
        let mut s = base;
        s.sma.h_th_w_per_c = h;
        s.sma.c_th_j_per_c = capacitance_for_heat_time(&s, heat_time_s, h)?;
        period_residual(&s, cycle_period_s, n)
    };

    let grid: Vec<f64> = (1..THERMAL_SCAN_POINTS)
        .map(|k| h_max * k as f64 / THERMAL_SCAN_POINTS as f64)
        .collect();
    let mut best = f64::INFINITY;
    let mut bracket = None;
    let mut prev: Option<(f64, f64)> = None;
    for &h in &grid {
        let r = eval(h)?.0;
        best = best.min(r.abs());
        if let Some((hp, rp)) = prev {
            if rp > 0.0 && r <= 0.0 {
                bracket = Some((hp, h));
                break;
            }
        }
        prev = Some((h, r));
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Err(Error::NoConvergence {
            what: "thermal calibration (no sign change in the h_th scan)".into(),
            best_residual: best,
        });
    };
    let mut fit = eval(hi)?;
    let mut h_fit = hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = eval(mid)?;
        if r.0.abs() < fit.0.abs() {
            fit = r;
            h_fit = mid;
        }
        if r.0 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if fit.0.abs() < 1e-9 {
            break;
        }
    }
    if !(fit.0.abs() <= THERMAL_RESIDUAL_TOL_S) {
        return Err(Error::NoConvergence {
            what: "thermal calibration".into(),
            best_residual: fit.0.abs(),
        });
    }
    let mut s = base;
    s.sma.h_th_w_per_c = h_fit;
    s.sma.c_th_j_per_c = capacitance_for_heat_time(&s, heat_time_s, h_fit)?;
    let heat_time = heat_up_time(
        &s.sma,
        s.supply.power_w(),
        s.sma.t_ambient_c,
        s.sma.t_full_c,
    )
    .unwrap_or(f64::INFINITY);
    Ok(ThermalFit {
        c_th_j_per_c: s.sma.c_th_j_per_c,
        h_th_w_per_c: h_fit,
        d_reset_mm: base.circuit.d_reset_mm,
        heat_time_s: heat_time,
        first_cycle_s: fit.1,
        steady_period_s: fit.2,
        residual_s: fit.0,
    })
}

/// Mean centroid travel per cycle over the first `n` cycles.
pub fn mm_per_cycle(sc: &Scenario, n: usize) -> Result<f64> {
    let marks = cycle_marks(sc, n, 1e5)?;
    if marks.len() <= n {
        return Err(Error::InsufficientTrace);
    }
    Ok((marks[n].1 - marks[0].1) / n as f64)
}

/// Fits the backward resistance `R` of the `(1, R)` claw family so that the
/// scenario travels `target` mm per cycle over its first `n` cycles.
pub fn calibrate_claws(sc: &Scenario, target: f64, n: usize) -> Result<ClawFit> {
    let bound = sc.module_count as f64 * sc.circuit.stroke_mm * sc.claws.transmission_ratio;
    if !target.is_finite() || target.abs() > bound {
        return Err(Error::InfeasibleTarget(format!(
            "{target} mm per cycle exceeds the {bound} mm a {}-module body can cover per cycle",
            sc.module_count
        )));
    }
    let eval = |log_r: f64| -> Result<f64> {
        let mut s = *sc;
        let r = log_r.exp();
        s.claws.fwd_resistance = 1.0;
        if s.module_count == 1 {
            s.claws.bwd_resistance_single = r;
        } else {
            s.claws.bwd_resistance_dual = r;
        }
        mm_per_cycle(&s, n)
    };
    let (mut lo, mut hi) = (1e-6f64.ln(), 1e6f64.ln());
    let tol = 1e-9 * target.abs().max(1.0);
    let mut best = (f64::INFINITY, 0.0, f64::NAN);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = eval(mid)?;
        let err = (v - target).abs();
        if err < best.0 {
            best = (err, mid, v);
        }
        if err <= tol || hi - lo < 1e-15 {
            break;
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (err, log_r, v) = best;
    let ok = if target == 0.0 {
        err <= tol
    } else {
        err <= CLAW_REL_TOL * target.abs()
    };
    if !ok {
        return Err(Error::NoConvergence {
            what: format!("claw calibration for {} module(s)", sc.module_count),
            best_residual: err,
        });
    }
    Ok(ClawFit {
        module_count: sc.module_count,
        bwd_resistance: log_r.exp(),
        mm_per_cycle: v,
        target_mm_per_cycle: target,
    })
}

/// Runs every calibration the targets ask for. Thermal constants are fitted
/// first and feed the claw fits.
pub fn calibrate(sc: &Scenario, targets: &CalibrationTargets) -> Result<Calibration> {
    let mut base = *sc;
    base.sim.manual_cutoff_s = None;
    let n_single = targets
        .reference_cycles_single
        .unwrap_or(REFERENCE_CYCLES_SINGLE);
    let n_dual = targets
        .reference_cycles_dual
        .unwrap_or(REFERENCE_CYCLES_DUAL);
    let mut out = Calibration::default();

    if targets.heat_time_s.is_some() || targets.cycle_period_s.is_some() {
        let power = base.supply.power_w();
        let p = &base.sma;
        let thermal = match (targets.heat_time_s, targets.cycle_period_s) {
            (Some(heat), Some(period)) => calibrate_thermal(&base, heat, period, n_single)?,
            (Some(heat), None) => {
                let mut s = base;
                s.sma.c_th_j_per_c = capacitance_for_heat_time(&s, heat, p.h_th_w_per_c)?;
                let (first, steady) = cycle_stats(
                    &Scenario {
                        module_count: 1,
                        ..s
                    },
                    n_single,
                    1e5,
                )?;
                ThermalFit {
                    c_th_j_per_c: s.sma.c_th_j_per_c,
                    h_th_w_per_c: p.h_th_w_per_c,
                    d_reset_mm: base.circuit.d_reset_mm,
                    heat_time_s: heat,
                    first_cycle_s: first,
                    steady_period_s: steady,
                    residual_s: 0.0,
                }
            }
            (None, Some(period)) => {
                let heat = heat_up_time(p, power, p.t_ambient_c, p.t_full_c).ok_or_else(|| {
                    Error::InfeasibleTarget("current parameters never reach T_full".into())
                })?;
                calibrate_thermal(&base, heat, period, n_single)?
            }
            (None, None) => unreachable!(),
        };
        out.thermal = Some(thermal);
        out.apply(&mut base);
    }
    if let Some(target) = targets.mm_per_cycle_single {
        let fit = calibrate_claws(
            &Scenario {
                module_count: 1,
                ..base
            },
            target,
            n_single,
        )?;
        out.single = Some(fit);
    }
    if let Some(target) = targets.mm_per_cycle_dual {
        let fit = calibrate_claws(
            &Scenario {
                module_count: 2,
                ..base
            },
            target,
            n_dual,
        )?;
        out.dual = Some(fit);
    }
    Ok(out)
}
