//! Force-deflection laws for the monostable curved beam and the bistable
//! routing switch.
//!
//! The beam curve is a piecewise cubic Hermite interpolant through four knots
//! `(0,0)`, `(d_peak,F_peak)`, `(d_valley,F_valley)`, `(d_stop,F_stop)`. Slopes
//! are zero at the two interior knots, so those knots are exactly the fold
//! points. The outer end slopes are `1.5 x` the secant slope of their segment,
//! which keeps the first segment rising all the way to the peak and lets the
//! last segment be extrapolated past `d_stop` without turning over.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extrapolation allowance past `d_stop`, as a fraction of the last segment.
const END_MARGIN_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamPreset {
    Theoretical,
    Measured,
}

impl BeamPreset {
    pub fn peak_force_n(self) -> f64 {
        match self {
            BeamPreset::Theoretical => 4.92,
            BeamPreset::Measured => 4.82,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamCurve {
    pub d_peak_mm: f64,
    pub f_peak_n: f64,
    pub d_valley_mm: f64,
    pub f_valley_n: f64,
    pub d_stop_mm: f64,
    pub f_stop_n: f64,
}

impl Default for BeamCurve {
    fn default() -> Self {
        Self::preset(BeamPreset::Theoretical)
    }
}

impl BeamCurve {
    pub fn preset(preset: BeamPreset) -> Self {
        Self {
            d_peak_mm: 5.0,
            f_peak_n: preset.peak_force_n(),
            d_valley_mm: 18.0,
            f_valley_n: 1.0,
            d_stop_mm: 25.0,
            f_stop_n: 4.8,
        }
    }

    pub fn new(
        d_peak_mm: f64,
        f_peak_n: f64,
        d_valley_mm: f64,
        f_valley_n: f64,
        d_stop_mm: f64,
        f_stop_n: f64,
    ) -> Result<Self> {
        let c = Self {
            d_peak_mm,
            f_peak_n,
            d_valley_mm,
            f_valley_n,
            d_stop_mm,
            f_stop_n,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let all = [
            self.d_peak_mm,
            self.f_peak_n,
            self.d_valley_mm,
            self.f_valley_n,
            self.d_stop_mm,
            self.f_stop_n,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("knots must be finite".into()));
        }
        if !(0.0 < self.d_peak_mm
            && self.d_peak_mm < self.d_valley_mm
            && self.d_valley_mm < self.d_stop_mm)
        {
            bad.push(format!(
                "knot positions must satisfy 0 < d_peak < d_valley < d_stop (got {} / {} / {})",
                self.d_peak_mm, self.d_valley_mm, self.d_stop_mm
            ));
        }
        if !(self.f_peak_n > self.f_valley_n) {
            bad.push(format!(
                "F_peak must exceed F_valley (got {} <= {})",
                self.f_peak_n, self.f_valley_n
            ));
        }
        if !(self.f_valley_n > 0.0) {
            bad.push(format!(
                "F_valley must be positive for a monostable beam (got {})",
                self.f_valley_n
            ));
        }
        if !(self.f_stop_n > self.f_valley_n) {
            bad.push(format!(
                "F_stop must exceed F_valley (got {} <= {})",
                self.f_stop_n, self.f_valley_n
            ));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCurve(bad.join("; ")))
        }
    }

    /// Upper end of the evaluation domain.
    pub fn d_max_mm(&self) -> f64 {
        self.d_stop_mm + END_MARGIN_FRACTION * (self.d_stop_mm - self.d_valley_mm)
    }

    /// Hermite data `(x0, x1, y0, y1, m0, m1)` of segment `k`.
    pub(crate) fn segment(&self, k: usize) -> (f64, f64, f64, f64, f64, f64) {
        match k {
            0 => (
                0.0,
                self.d_peak_mm,
                0.0,
                self.f_peak_n,
                1.5 * self.f_peak_n / self.d_peak_mm,
                0.0,
            ),
            1 => (
                self.d_peak_mm,
                self.d_valley_mm,
                self.f_peak_n,
                self.f_valley_n,
                0.0,
                0.0,
            ),
            _ => (
                self.d_valley_mm,
                self.d_stop_mm,
                self.f_valley_n,
                self.f_stop_n,
                0.0,
                1.5 * (self.f_stop_n - self.f_valley_n) / (self.d_stop_mm - self.d_valley_mm),
            ),
        }
    }

    #[inline]
    pub(crate) fn eval(&self, d: f64) -> f64 {
        let k = if d <= self.d_peak_mm {
            0
        } else if d <= self.d_valley_mm {
            1
        } else {
            2
        };
        let (x0, x1, y0, y1, m0, m1) = self.segment(k);
        let h = x1 - x0;
        let s = (d - x0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1
    }
}

/// Beam reaction force at transverse deflection `d_mm`.
pub fn beam_force(d_mm: f64, c: &BeamCurve) -> Result<f64> {
    if d_mm < 0.0 || d_mm.is_nan() {
        return Err(Error::Domain {
            what: "beam deflection must be >= 0 mm",
            value: d_mm,
        });
    }
    if d_mm > c.d_max_mm() + 1e-9 {
        return Err(Error::Domain {
            what: "beam deflection beyond the extrapolation limit",
            value: d_mm,
        });
    }
    Ok(c.eval(d_mm))
}

/// `(d_peak, F_peak, d_valley, F_valley)`.
pub fn fold_points(c: &BeamCurve) -> Result<(f64, f64, f64, f64)> {
    c.validate()?;
    Ok((c.d_peak_mm, c.f_peak_n, c.d_valley_mm, c.f_valley_n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SwitchState {
    S1,
    S2,
}

impl std::fmt::Display for SwitchState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SwitchState::S1 => "S1",
            SwitchState::S2 => "S2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BistableSwitch {
    pub f_snap_n: f64,
    pub length_mm: f64,
    pub state: SwitchState,
}

impl Default for BistableSwitch {
    fn default() -> Self {
        Self {
            f_snap_n: 0.45,
            length_mm: 10.0,
            state: SwitchState::S1,
        }
    }
}

/// Positive push drives S1 -> S2, negative push drives S2 -> S1.
pub fn switch_toggle(sw: BistableSwitch, push_n: f64) -> BistableSwitch {
    let state = match sw.state {
        SwitchState::S1 if push_n >= sw.f_snap_n => SwitchState::S2,
        SwitchState::S2 if -push_n >= sw.f_snap_n => SwitchState::S1,
        s => s,
    };
    BistableSwitch { state, ..sw }
}
