use serde::{Deserialize, Serialize};

/// Running mean of the packing fraction of all completed episodes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningBaseline {
    sum: f64,
    count: u64,
}

impl RunningBaseline {
    pub fn value(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn record(&mut self, pfrac: f64) {
        self.sum += pfrac;
        self.count += 1;
    }
}

/// Packed volume over the volume of the bins used.
pub fn packing_fraction(packed_volume: usize, bins_used: usize, bin_volume: usize) -> f64 {
    packed_volume as f64 / (bins_used * bin_volume) as f64
}

/// Terminal reward `zeta = pfrac - tau` and per-step rewards
/// `r_t = rho^(N - t) * zeta` for `t = 1..=N`. The baseline absorbs `pfrac`
/// after `zeta` is computed.
pub fn episode_rewards(pfrac: f64, steps: usize, baseline: &mut RunningBaseline, rho: f64) -> (f64, Vec<f64>) {
    let zeta = pfrac - baseline.value();
    baseline.record(pfrac);
    let rewards = (1..=steps).map(|t| rho.powi((steps - t) as i32) * zeta).collect();
    (zeta, rewards)
}
