//! Pseudorapidity/azimuth binning of energy deposits.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::Point3;

use super::SceneError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDeposit {
    pub position: Point3<f64>,
    pub energy: f64,
}

impl EnergyDeposit {
    pub fn new(x: f64, y: f64, z: f64, energy: f64) -> Self {
        Self {
            position: Point3::new(x, y, z),
            energy,
        }
    }
}

/// η = −ln tan(θ/2). `None` on the beam axis, where η is unbounded.
pub fn pseudorapidity(p: &Point3<f64>) -> Option<f64> {
    if p.x == 0.0 && p.y == 0.0 {
        return None;
    }
    let r = p.coords.norm();
    let theta = (p.z / r).clamp(-1.0, 1.0).acos();
    Some(-(theta / 2.0).tan().ln())
}

/// Azimuth in (−π, π].
pub fn azimuth(p: &Point3<f64>) -> f64 {
    let phi = p.y.atan2(p.x);
    if phi <= -PI {
        PI
    } else {
        phi
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EtaPhiMap {
    pub eta_bin: f64,
    pub phi_bin: f64,
    /// Summed energy keyed by (floor(η/Δη), floor(φ/Δφ)).
    pub bins: BTreeMap<(i64, i64), f64>,
    /// Indices of deposits on the beam axis.
    pub rejected: Vec<usize>,
}

impl EtaPhiMap {
    pub fn total_energy(&self) -> f64 {
        self.bins.values().sum()
    }

    /// One `OnAxisDeposit` per rejected deposit.
    pub fn rejections(&self) -> Vec<SceneError> {
        self.rejected.iter().map(|&index| SceneError::OnAxisDeposit { index }).collect()
    }

    pub fn bin_of(&self, eta: f64, phi: f64) -> (i64, i64) {
        ((eta / self.eta_bin).floor() as i64, (phi / self.phi_bin).floor() as i64)
    }
}

pub fn eta_phi_project(
    deposits: &[EnergyDeposit],
    eta_bin: f64,
    phi_bin: f64,
) -> Result<EtaPhiMap, SceneError> {
    if !(eta_bin > 0.0) || !(phi_bin > 0.0) {
        return Err(SceneError::BadBinWidth);
    }
    let mut map = EtaPhiMap {
        eta_bin,
        phi_bin,
        ..EtaPhiMap::default()
    };
    for (index, dep) in deposits.iter().enumerate() {
        let Some(eta) = pseudorapidity(&dep.position) else {
            map.rejected.push(index);
            continue;
        };
        let key = map.bin_of(eta, azimuth(&dep.position));
        *map.bins.entry(key).or_insert(0.0) += dep.energy;
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle_eta(p: &Point3<f64>) -> f64 {
        (p.z / p.x.hypot(p.y)).asinh()
    }

    #[test]
    fn diagonal_point() {
        let p = Point3::new(1.0, 1.0, 1.0);
        let eta = pseudorapidity(&p).unwrap();
        assert!((eta - oracle_eta(&p)).abs() < 1e-12);
        assert!((eta - 0.658478948).abs() < 1e-9);
        assert!((azimuth(&p) - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn matches_oracle_over_grid() {
        for i in -5..=5 {
            for j in -5..=5 {
                for k in -5..=5 {
                    let p = Point3::new(i as f64 * 0.7 + 0.1, j as f64 * 1.3, k as f64 * 2.1);
                    let eta = pseudorapidity(&p).unwrap();
                    assert!((eta - oracle_eta(&p)).abs() < 1e-9, "{p:?}");
                }
            }
        }
    }

    #[test]
    fn transverse_plane_has_zero_eta() {
        assert!(pseudorapidity(&Point3::new(3.0, -4.0, 0.0)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn negative_pi_maps_to_pi() {
        assert_eq!(azimuth(&Point3::new(-1.0, -0.0, 0.0)), PI);
        assert_eq!(azimuth(&Point3::new(-1.0, 0.0, 0.0)), PI);
    }

    #[test]
    fn energy_is_conserved_and_axis_rejected() {
        let deposits = [
            EnergyDeposit::new(1.0, 1.0, 1.0, 2.0),
            EnergyDeposit::new(0.0, 0.0, 5.0, 9.0),
            EnergyDeposit::new(1.0, 1.0, 1.01, 3.0),
            EnergyDeposit::new(-2.0, 0.5, -3.0, 1.5),
        ];
        let map = eta_phi_project(&deposits, 0.1, 0.1).unwrap();
        assert_eq!(map.rejected, vec![1]);
        assert!(matches!(map.rejections()[..], [SceneError::OnAxisDeposit { index: 1 }]));
        assert!((map.total_energy() - 6.5).abs() < 1e-12);
        assert_eq!(map.bins[&(6, 7)], 5.0);
    }

    #[test]
    fn bad_bins() {
        assert!(matches!(eta_phi_project(&[], 0.0, 0.1), Err(SceneError::BadBinWidth)));
        assert!(matches!(eta_phi_project(&[], 0.1, -1.0), Err(SceneError::BadBinWidth)));
        assert!(matches!(eta_phi_project(&[], f64::NAN, 0.1), Err(SceneError::BadBinWidth)));
    }
}
