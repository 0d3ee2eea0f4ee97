use serde::{Deserialize, Serialize};

use crate::actuator::{sma_force_unchecked, SmaParams};
use crate::beam::BeamCurve;
use crate::error::{Error, Result};

/// Root tolerance for the branch bisection.
pub const EQUILIBRIUM_TOL_MM: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Near,
    Far,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equilibrium {
    Root(f64),
    /// No equilibrium left on the requested branch.
    Fold,
}

impl Equilibrium {
    pub fn root(self) -> Option<f64> {
        match self {
            Equilibrium::Root(d) => Some(d),
            Equilibrium::Fold => None,
        }
    }
}

/// Bracket `[lo, hi]` searched on each branch.
pub fn branch_bracket(branch: Branch, c: &BeamCurve) -> (f64, f64) {
    match branch {
        Branch::Near => (0.0, c.d_peak_mm),
        Branch::Far => (c.d_valley_mm, c.d_max_mm()),
    }
}

/// Solves `beam(d) = sma(T, d)` on one stable branch. On either branch the
/// beam force rises and the coil force does not, so the residual is strictly
/// increasing and the root is unique when it exists.
pub fn solve_equilibrium(
    t_c: f64,
    branch: Branch,
    c: &BeamCurve,
    p: &SmaParams,
) -> Result<Equilibrium> {
    let g = |d: f64| c.eval(d) - sma_force_unchecked(t_c, d, p);
    let (lo, hi) = branch_bracket(branch, c);
    let (g_lo, g_hi) = (g(lo), g(hi));
    if g_lo.is_nan() || g_hi.is_nan() {
        return Err(Error::Domain {
            what: "temperature for equilibrium",
            value: t_c,
        });
    }
    match branch {
        Branch::Near => {
            if g_lo >= 0.0 {
                return Ok(Equilibrium::Root(lo));
            }
            if g_hi < 0.0 {
                return Ok(Equilibrium::Fold);
            }
        }
        Branch::Far => {
            if g_lo > 0.0 {
                return Ok(Equilibrium::Fold);
            }
            if g_hi < 0.0 {
                return Err(Error::Bracket(format!(
                    "far-branch root at T = {t_c} C lies beyond the extrapolation limit {hi} mm"
                )));
            }
        }
    }
    Ok(Equilibrium::Root(bisect(g, lo, hi)))
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= EQUILIBRIUM_TOL_MM {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
