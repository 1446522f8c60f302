//! Spare capacity percentage, restoration-time models and quality of recovery.
//!
//! All times are seconds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plan::{ProtectionPlan, Scheme};
use crate::routing::FIBER_KM_PER_S;

/// Switch configuration times evaluated by default, seconds.
pub const DEFAULT_SWITCH_TIMES: [f64; 4] = [0.5e-3, 1e-3, 5e-3, 10e-3];

/// Restoration-time model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtParams {
    /// Failure detection time F.
    pub detect: f64,
    /// Per-node message processing time D.
    pub process: f64,
    /// Switch configuration time C.
    pub switch: f64,
    /// Signal propagation speed, km/s.
    pub km_per_s: f64,
}

impl Default for RtParams {
    fn default() -> Self {
        RtParams {
            detect: 100e-6,
            process: 100e-6,
            switch: 1e-3,
            km_per_s: FIBER_KM_PER_S,
        }
    }
}

impl RtParams {
    pub fn with_switch(self, switch: f64) -> Self {
        RtParams { switch, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("detection time", self.detect),
            ("processing time", self.process),
            ("switch time", self.switch),
            ("propagation speed", self.km_per_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Metric(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Where a failure sits relative to one affected flow.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FailureGeometry {
    /// Hops of the backup or detour route (m).
    pub backup_hops: usize,
    /// Hops from the failed link's upstream node back to the source (n).
    pub hops_to_source: usize,
    /// Propagation time over the protection route (P).
    pub protection_delay: f64,
    /// Propagation time of the failure notice back to the source (nP).
    pub notify_delay: f64,
    /// Propagation time from the failure to the closest node (EP).
    pub edge_delay: f64,
    /// Delay difference between parity/duplicate and working stream (PD).
    pub path_skew: f64,
}

/// Source rerouting: F + nP + (n+1)D + (m+1)C + 3P + 3(m+1)D + EP.
pub fn rt_sr(g: &FailureGeometry, p: &RtParams) -> f64 {
    let n = g.hops_to_source as f64;
    let m = g.backup_hops as f64;
    p.detect
        + g.notify_delay
        + (n + 1.0) * p.process
        + (m + 1.0) * p.switch
        + 3.0 * g.protection_delay
        + 3.0 * (m + 1.0) * p.process
        + g.edge_delay
}

/// p-cycles: F + (n+1)D + 2C + P + EP. Here n counts detour hops.
pub fn rt_pc(g: &FailureGeometry, p: &RtParams) -> f64 {
    let n = g.hops_to_source as f64;
    p.detect + (n + 1.0) * p.process + 2.0 * p.switch + g.protection_delay + g.edge_delay
}

/// Diversity coding: F + 2D + PD. No switching, so C never enters.
pub fn rt_dc(g: &FailureGeometry, p: &RtParams) -> f64 {
    p.detect + 2.0 * p.process + g.path_skew
}

pub fn restoration_time(scheme: Scheme, g: &FailureGeometry, p: &RtParams) -> f64 {
    match scheme {
        Scheme::DiversityCoding => rt_dc(g, p),
        Scheme::SourceRerouting => rt_sr(g, p),
        Scheme::PCycles => rt_pc(g, p),
    }
}

/// Percentage of capacity-distance beyond shortest-path-only routing.
pub fn scp_from_totals(total: f64, shortest_working: f64) -> Result<f64> {
    if !(shortest_working > 0.0) {
        return Err(Error::Metric("shortest working capacity must be positive".into()));
    }
    Ok(100.0 * (total - shortest_working) / shortest_working)
}

pub fn scp(plan: &ProtectionPlan, topo: &crate::topology::Topology, shortest_working: f64) -> Result<f64> {
    scp_from_totals(plan.total_capacity(topo), shortest_working)
}

/// 1 / (1 + 400 RT²): one half at 50 ms.
pub fn q_rt(rt: f64) -> f64 {
    1.0 / (1.0 + 400.0 * rt * rt)
}

/// 1 / (1 + (SCP/100)³): one half at 100 %.
pub fn q_scp(scp: f64) -> f64 {
    let x = scp / 100.0;
    1.0 / (1.0 + x * x * x)
}

/// (2·Q_RT + Q_SCP) / 3. The doubled weight stands for data loss, which
/// grows with RT.
pub fn qor(scp: f64, rt: f64) -> f64 {
    (2.0 * q_rt(rt) + q_scp(scp)) / 3.0
}

/// Worst-case restoration time and QoR at one switch time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchPoint {
    /// Switch configuration time C, seconds.
    pub switch: f64,
    pub rt: f64,
    pub qor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub scheme: Scheme,
    /// Spare capacity percentage.
    pub scp: f64,
    pub points: Vec<SwitchPoint>,
    /// Failures where some affected flow was not restored.
    pub failed_recoveries: usize,
}

impl SchemeResult {
    pub fn rt_at(&self, switch: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| (p.switch - switch).abs() < 1e-12)
            .map(|p| p.rt)
    }

    pub fn qor_at(&self, switch: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| (p.switch - switch).abs() < 1e-12)
            .map(|p| p.qor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c: f64) -> RtParams {
        RtParams {
            detect: 100e-6,
            process: 1e-3,
            switch: c,
            km_per_s: FIBER_KM_PER_S,
        }
    }

    #[test]
    fn sr_zero_geometry() {
        let rt = rt_sr(&FailureGeometry::default(), &params(1e-3));
        assert!((rt - 5.1e-3).abs() < 1e-15);
    }

    #[test]
    fn sr_linear_in_switch_time() {
        let g = FailureGeometry {
            backup_hops: 3,
            hops_to_source: 2,
            protection_delay: 1e-3,
            notify_delay: 2e-4,
            edge_delay: 1e-5,
            path_skew: 0.0,
        };
        let a = rt_sr(&g, &params(1e-3));
        let b = rt_sr(&g, &params(2e-3));
        assert!((b - a - 4.0 * 1e-3).abs() < 1e-15);
    }

    #[test]
    fn pc_zero_geometry_and_m_irrelevant() {
        let g = FailureGeometry::default();
        assert!((rt_pc(&g, &params(1e-3)) - 3.1e-3).abs() < 1e-15);
        let g2 = FailureGeometry {
            backup_hops: 9,
            ..g
        };
        assert_eq!(rt_pc(&g, &params(1e-3)), rt_pc(&g2, &params(1e-3)));
    }

    #[test]
    fn dc_is_three_hundred_microseconds_when_equalized() {
        let p = RtParams::default();
        assert!((rt_dc(&FailureGeometry::default(), &p) - 300e-6).abs() < 1e-15);
        let skewed = FailureGeometry {
            path_skew: 1e-3,
            ..Default::default()
        };
        assert!((rt_dc(&skewed, &p) - 1.3e-3).abs() < 1e-15);
        assert_eq!(rt_dc(&skewed, &p), rt_dc(&skewed, &p.with_switch(10e-3)));
    }

    #[test]
    fn anchor_points() {
        assert!((q_rt(0.05) - 0.5).abs() < 1e-12);
        assert!((q_scp(100.0) - 0.5).abs() < 1e-12);
        assert_eq!(qor(0.0, 0.0), 1.0);
    }

    #[test]
    fn scp_values() {
        assert_eq!(scp_from_totals(200.0, 100.0).unwrap(), 100.0);
        assert_eq!(scp_from_totals(100.0, 100.0).unwrap(), 0.0);
        assert!(scp_from_totals(1.0, 0.0).is_err());
    }

    #[test]
    fn params_must_be_positive() {
        assert!(RtParams::default().validate().is_ok());
        assert!(RtParams::default().with_switch(0.0).validate().is_err());
    }
}
