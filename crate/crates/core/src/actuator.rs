//! Lumped thermo-mechanical model of the SMA coil.
//!
//! Temperature follows a first-order Joule-heating / Newton-cooling law,
//! `C dT/dt = P - h (T - T_ambient)`, which is integrated exactly because the
//! heating power is piecewise constant between switching events. The tensile
//! force is an activation fraction (linear ramp between the transition
//! temperature and full activation) times a linearly fading blocked force.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmaParams {
    pub n_coils: u32,
    pub wire_diameter_mm: f64,
    pub mandrel_diameter_mm: f64,
    pub t_ambient_c: f64,
    /// Activation starts here.
    pub t_transition_c: f64,
    /// Activation saturates here.
    pub t_full_c: f64,
    /// Force at full activation and zero contraction.
    pub f_block_n: f64,
    /// Force fade per mm of contraction.
    pub k_sma_n_per_mm: f64,
    /// Lumped thermal capacitance, J/°C.
    pub c_th_j_per_c: f64,
    /// Lumped heat-loss coefficient, W/°C.
    pub h_th_w_per_c: f64,
}

impl Default for SmaParams {
    fn default() -> Self {
        Self {
            n_coils: 5,
            wire_diameter_mm: 0.5,
            mandrel_diameter_mm: 4.75,
            t_ambient_c: 25.0,
            t_transition_c: 45.0,
            t_full_c: 100.0,
            f_block_n: 6.8,
            k_sma_n_per_mm: 0.06,
            c_th_j_per_c: 0.7707979109042351,
            h_th_w_per_c: 0.09641825329694256,
        }
    }
}

impl SmaParams {
    /// Checks the parameter invariants; `stroke_max_mm` is the largest
    /// contraction the coil will see.
    pub fn validate(&self, stroke_max_mm: f64) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.t_ambient_c < self.t_transition_c && self.t_transition_c < self.t_full_c) {
            bad.push(format!(
                "temperatures must satisfy T_ambient < T_transition < T_full (got {} / {} / {})",
                self.t_ambient_c, self.t_transition_c, self.t_full_c
            ));
        }
        if !(self.f_block_n > 0.0) {
            bad.push(format!("F_block must be positive (got {})", self.f_block_n));
        }
        if !(self.k_sma_n_per_mm >= 0.0) {
            bad.push(format!(
                "k_sma must be non-negative (got {})",
                self.k_sma_n_per_mm
            ));
        }
        if !(self.c_th_j_per_c > 0.0) {
            bad.push(format!("C_th must be positive (got {})", self.c_th_j_per_c));
        }
        if !(self.h_th_w_per_c > 0.0) {
            bad.push(format!("h_th must be positive (got {})", self.h_th_w_per_c));
        }
        if !(self.f_block_n - self.k_sma_n_per_mm * stroke_max_mm > 0.0) {
            bad.push(format!(
                "F_block - k_sma * stroke must stay positive over the {stroke_max_mm} mm stroke"
            ));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(bad.join("; ")))
        }
    }

    /// Time constant `C/h` in seconds.
    pub fn time_constant_s(&self) -> f64 {
        self.c_th_j_per_c / self.h_th_w_per_c
    }

    /// Asymptotic temperature under constant heating power.
    pub fn steady_state_c(&self, power_w: f64) -> f64 {
        self.t_ambient_c + power_w / self.h_th_w_per_c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmaState {
    pub temperature_c: f64,
    pub powered: bool,
}

impl SmaState {
    pub fn at_ambient(p: &SmaParams) -> Self {
        Self {
            temperature_c: p.t_ambient_c,
            powered: false,
        }
    }
}

pub fn activation_fraction(temperature_c: f64, p: &SmaParams) -> f64 {
    if temperature_c <= p.t_transition_c {
        0.0
    } else if temperature_c >= p.t_full_c {
        1.0
    } else {
        (temperature_c - p.t_transition_c) / (p.t_full_c - p.t_transition_c)
    }
}

/// Tensile force of the coil at temperature `temperature_c` after contracting
/// by `contraction_mm`.
pub fn sma_force(temperature_c: f64, contraction_mm: f64, p: &SmaParams) -> Result<f64> {
    if contraction_mm < 0.0 || contraction_mm.is_nan() {
        return Err(Error::Domain {
            what: "SMA contraction must be >= 0 mm",
            value: contraction_mm,
        });
    }
    Ok(sma_force_unchecked(temperature_c, contraction_mm, p))
}

#[inline]
pub(crate) fn sma_force_unchecked(temperature_c: f64, contraction_mm: f64, p: &SmaParams) -> f64 {
    let f =
        activation_fraction(temperature_c, p) * (p.f_block_n - p.k_sma_n_per_mm * contraction_mm);
    f.max(0.0)
}

/// Advances the coil temperature by `dt_s` under constant heating power
/// `power_w`, using the exact solution of the linear ODE.
pub fn thermal_step(s: SmaState, power_w: f64, dt_s: f64, p: &SmaParams) -> Result<SmaState> {
    if !(p.h_th_w_per_c > 0.0) || !(p.c_th_j_per_c > 0.0) {
        return Err(Error::InvalidParams(
            "thermal step needs C_th > 0 and h_th > 0".into(),
        ));
    }
    if !(dt_s > 0.0) {
        return Err(Error::Domain {
            what: "thermal step dt must be > 0",
            value: dt_s,
        });
    }
    if power_w < 0.0 {
        return Err(Error::Domain {
            what: "heating power must be >= 0",
            value: power_w,
        });
    }
    Ok(SmaState {
        temperature_c: temperature_after(s.temperature_c, power_w, dt_s, p),
        powered: s.powered,
    })
}

#[inline]
pub(crate) fn temperature_after(t0_c: f64, power_w: f64, dt_s: f64, p: &SmaParams) -> f64 {
    let t_ss = p.steady_state_c(power_w);
    t_ss + (t0_c - t_ss) * (-dt_s * p.h_th_w_per_c / p.c_th_j_per_c).exp()
}

/// Closed-form time to heat from `from_c` to `to_c` under `power_w`; `None`
/// when the target lies at or beyond the steady-state temperature.
pub fn heat_up_time(p: &SmaParams, power_w: f64, from_c: f64, to_c: f64) -> Option<f64> {
    let t_ss = p.steady_state_c(power_w);
    if to_c <= from_c {
        return Some(0.0);
    }
    if to_c >= t_ss {
        return None;
    }
    Some(p.time_constant_s() * ((t_ss - from_c) / (t_ss - to_c)).ln())
}

/// Temperature at which the activation fraction equals `phi`.
pub fn temperature_for_fraction(phi: f64, p: &SmaParams) -> f64 {
    p.t_transition_c + phi.clamp(0.0, 1.0) * (p.t_full_c - p.t_transition_c)
}
