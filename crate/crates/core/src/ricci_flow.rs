//! Ricci flow restricted to the three-parameter diagonal family.
//!
//! The metric g with g(X_i, X_i) = l_i^2 stays in the family because the
//! Ricci tensor is diagonal in this frame, so d g / dt = -2 Ric reduces to
//! d(l_i^2)/dt = -2 l_i^2 R_ii, i.e. dl_i/dt = -l_i R_ii. Integration is
//! fixed-step classical Runge-Kutta; adaptive stepping is unnecessary at
//! this scale and would complicate the order-of-convergence checks.

use crate::berger::{self, BergerParams};
use crate::{CsError, Result};

/// Flow halts before any scaling reaches this threshold.
pub const EXTINCTION_THRESHOLD: f64 = 1e-6;

/// One sample along a flow trajectory with recomputable diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct FlowState {
    pub t: f64,
    pub params: BergerParams,
    pub ricci: [f64; 3],
    pub scalar_curvature: f64,
    pub cs_density: f64,
}

impl FlowState {
    /// Builds the state at time `t`, recomputing all diagnostics.
    pub fn compute(t: f64, params: BergerParams) -> FlowState {
        let ricci = berger::ricci(&params);
        let cs_density = berger::cs_density(&params);
        FlowState {
            t,
            params,
            ricci,
            scalar_curvature: ricci[0] + ricci[1] + ricci[2],
            cs_density,
        }
    }

    /// cs_density integrated over the manifold.
    pub fn cs_integral(&self) -> f64 {
        self.cs_density * self.params.volume()
    }
}

/// An RK4 trajectory: states at strictly increasing times, adjacent states
/// one integration step apart.
#[derive(Clone, Debug)]
pub struct FlowTrajectory {
    pub states: Vec<FlowState>,
    pub step: f64,
    pub method: &'static str,
    pub normalized: bool,
    /// True when the extinction guard halted integration early.
    pub truncated: bool,
}

/// dl_i/dt = -l_i R_ii.
pub fn ode_rhs(params: &BergerParams) -> [f64; 3] {
    rhs_raw(params.lambdas(), false)
}

/// Volume-preserving variant: dl_i/dt = -l_i R_ii + (sum_p R_pp / 3) l_i,
/// which fixes l1 l2 l3 to first order.
pub fn ode_rhs_normalized(params: &BergerParams) -> [f64; 3] {
    rhs_raw(params.lambdas(), true)
}

fn rhs_raw(l: [f64; 3], normalized: bool) -> [f64; 3] {
    let r = berger::ricci_raw(l);
    let correction = if normalized { (r[0] + r[1] + r[2]) / 3.0 } else { 0.0 };
    [
        l[0] * (correction - r[0]),
        l[1] * (correction - r[1]),
        l[2] * (correction - r[2]),
    ]
}

fn rk4_step(l: [f64; 3], h: f64, normalized: bool) -> [f64; 3] {
    let k1 = rhs_raw(l, normalized);
    let k2 = rhs_raw(advance(l, &k1, h / 2.0), normalized);
    let k3 = rhs_raw(advance(l, &k2, h / 2.0), normalized);
    let k4 = rhs_raw(advance(l, &k3, h), normalized);
    let mut out = l;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn advance(l: [f64; 3], k: &[f64; 3], h: f64) -> [f64; 3] {
    [l[0] + h * k[0], l[1] + h * k[1], l[2] + h * k[2]]
}

/// Integrates the flow from `start` to `t_end` with step `h`. The final
/// step is shortened to land exactly on `t_end`. If any scaling would
/// drop to [`EXTINCTION_THRESHOLD`] or below, the trajectory is truncated
/// at the last valid state and flagged.
pub fn integrate(
    start: BergerParams,
    t_end: f64,
    h: f64,
    normalized: bool,
) -> Result<FlowTrajectory> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(CsError::InvalidParameter(format!("step size h = {h} must be positive")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(CsError::InvalidParameter(format!("t_end = {t_end} must be positive")));
    }
    let mut states = vec![FlowState::compute(0.0, start)];
    let mut l = start.lambdas();
    let mut t = 0.0;
    let mut truncated = false;
    while t < t_end - 1e-12 * t_end {
        let step = h.min(t_end - t);
        let next = rk4_step(l, step, normalized);
        t += step;
        let ok = next
            .iter()
            .all(|v| v.is_finite() && *v > EXTINCTION_THRESHOLD && *v < berger::PARAM_MAX);
        if !ok {
            truncated = true;
            break;
        }
        l = next;
        let params = BergerParams::new(l[0], l[1], l[2])
            .expect("guarded against extinction and overflow");
        states.push(FlowState::compute(t, params));
    }
    Ok(FlowTrajectory { states, step: h, method: "rk4", normalized, truncated })
}

/// One entry of the Chern-Simons series along a trajectory.
#[derive(Clone, Copy, Debug)]
pub struct CsSample {
    pub t: f64,
    pub cs_density: f64,
    pub cs_integral: f64,
}

/// The Chern-Simons density and its integral over the manifold at each
/// state of the trajectory. Empty trajectories yield an empty series.
pub fn cs_along_flow(traj: &FlowTrajectory) -> Vec<CsSample> {
    traj.states
        .iter()
        .map(|s| CsSample { t: s.t, cs_density: s.cs_density, cs_integral: s.cs_integral() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(l1: f64, l2: f64, l3: f64) -> BergerParams {
        BergerParams::new(l1, l2, l3).unwrap()
    }

    #[test]
    fn round_sphere_rhs() {
        assert_eq!(ode_rhs(&p(1.0, 1.0, 1.0)), [-2.0, -2.0, -2.0]);
    }

    #[test]
    fn normalized_rhs_vanishes_at_round() {
        let r = ode_rhs_normalized(&p(1.0, 1.0, 1.0));
        assert_eq!(r, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn round_flow_matches_closed_form() {
        // l(t) = sqrt(1 - 4t)
        let traj = integrate(p(1.0, 1.0, 1.0), 0.2, 1e-3, false).unwrap();
        assert!(!traj.truncated);
        let last = traj.states.last().unwrap();
        assert!((last.t - 0.2).abs() < 1e-12);
        let exact = (1.0 - 4.0 * last.t).sqrt();
        for i in 0..3 {
            assert!(
                (last.params.lambda(i) - exact).abs() < 1e-8,
                "lambda{} = {} vs {}",
                i,
                last.params.lambda(i),
                exact
            );
        }
    }

    #[test]
    fn halving_step_raises_accuracy_by_rk4_order() {
        let err = |h: f64| {
            let traj = integrate(p(1.0, 1.0, 1.0), 0.2, h, false).unwrap();
            let last = traj.states.last().unwrap();
            (last.params.lambda(0) - (1.0 - 4.0 * last.t).sqrt()).abs()
        };
        let (e1, e2) = (err(2e-3), err(1e-3));
        assert!(e1 / e2 >= 12.0, "order ratio {}", e1 / e2);
    }

    #[test]
    fn extinction_guard_truncates() {
        // round extinction at t = 1/4; request integration past it
        let traj = integrate(p(1.0, 1.0, 1.0), 0.5, 1e-3, false).unwrap();
        assert!(traj.truncated);
        let last = traj.states.last().unwrap();
        // the integrator overshoots the exact extinction time slightly
        assert!(last.t < 0.3);
        assert!(last.params.lambda(0) > EXTINCTION_THRESHOLD);
    }

    #[test]
    fn volume_shrinks_on_positive_ricci_start() {
        let start = p(1.1, 1.0, 0.95);
        assert!(berger::ricci(&start).iter().all(|r| *r > 0.0));
        let traj = integrate(start, 0.05, 1e-3, false).unwrap();
        let vols: Vec<f64> = traj.states.iter().map(|s| s.params.volume()).collect();
        for w in vols.windows(2) {
            assert!(w[1] < w[0], "volume not strictly decreasing: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn normalized_flow_preserves_volume_and_converges() {
        let start = p(2.0, 1.0, 1.0);
        let traj = integrate(start, 4.0, 1e-3, true).unwrap();
        assert!(!traj.truncated);
        let v0 = start.volume();
        for s in &traj.states {
            assert!((s.params.volume() - v0).abs() / v0 < 1e-7);
        }
        let last = traj.states.last().unwrap().params.lambdas();
        let mut spread: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                spread = spread.max((last[i] / last[j] - 1.0).abs());
            }
        }
        assert!(spread < 1e-6, "ratio spread {spread}");
    }

    #[test]
    fn permuting_start_permutes_trajectory_exactly() {
        let a = integrate(p(1.9, 0.7, 1.3), 0.03, 1e-3, false).unwrap();
        let b = integrate(p(0.7, 1.3, 1.9), 0.03, 1e-3, false).unwrap();
        assert_eq!(a.states.len(), b.states.len());
        for (sa, sb) in a.states.iter().zip(&b.states) {
            let la = sa.params.lambdas();
            let lb = sb.params.lambdas();
            assert_eq!([la[1], la[2], la[0]], lb);
        }
    }

    #[test]
    fn round_start_keeps_cs_integral_constant() {
        let traj = integrate(p(1.0, 1.0, 1.0), 0.2, 1e-3, false).unwrap();
        let series = cs_along_flow(&traj);
        let first = series[0].cs_integral;
        for s in &series {
            assert!(
                (s.cs_integral - first).abs() / first.abs() < 1e-9,
                "cs integral drifted: {} vs {first}",
                s.cs_integral
            );
        }
        // frozen value: -8 for any round start
        assert!((first + 8.0).abs() < 1e-12);
    }

    #[test]
    fn empty_series_from_empty_trajectory() {
        let traj = FlowTrajectory {
            states: vec![],
            step: 1e-3,
            method: "rk4",
            normalized: false,
            truncated: false,
        };
        assert!(cs_along_flow(&traj).is_empty());
    }

    #[test]
    fn integrate_rejects_bad_config() {
        assert!(integrate(p(1.0, 1.0, 1.0), 0.1, 0.0, false).is_err());
        assert!(integrate(p(1.0, 1.0, 1.0), -0.1, 1e-3, false).is_err());
    }
}
