use crate::error::{domain, Result};
use crate::model::DriveParams;

/// Accumulated drive area `a(τ) = κ1* κ2 ∫_0^τ |E_s|²` [1/m].
///
/// Stored as a piecewise-linear table; exact for piecewise-constant drive
/// envelopes. Past the last knot the area grows at `tail_rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseArea {
    /// `(τ [s], a [1/m])`, starting at `(0, 0)`, strictly increasing in τ.
    knots: Vec<(f64, f64)>,
    tail_rate: f64,
}

impl PulseArea {
    /// Drive held on forever at coupling density `g`: `a(τ) = g τ`.
    pub fn constant(g: f64) -> Self {
        Self { knots: vec![(0.0, 0.0)], tail_rate: g }
    }

    /// No drive at all.
    pub fn off() -> Self {
        Self::constant(0.0)
    }

    /// Piecewise-constant envelope: `segments` are `(duration [s], relative power)`
    /// at full-power coupling density `g`. The drive is off after the last segment.
    pub fn from_profile(g: f64, segments: &[(f64, f64)]) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(domain(format!("coupling density must be >= 0, got {g}")));
        }
        let mut knots = vec![(0.0, 0.0)];
        let (mut tau, mut area) = (0.0, 0.0);
        for (i, &(duration, power)) in segments.iter().enumerate() {
            if !(duration.is_finite() && duration > 0.0) {
                return Err(domain(format!("profile segment {i}: duration must be > 0, got {duration}")));
            }
            if !(power.is_finite() && power >= 0.0) {
                return Err(domain(format!("profile segment {i}: power must be >= 0, got {power}")));
            }
            tau += duration;
            area += g * power * duration;
            knots.push((tau, area));
        }
        Ok(Self { knots, tail_rate: 0.0 })
    }

    /// Area of the drive described by `drive`; an empty profile means constant drive.
    pub fn from_drive(drive: &DriveParams) -> Result<Self> {
        if drive.profile.is_empty() {
            if !(drive.coupling_density.is_finite() && drive.coupling_density >= 0.0) {
                return Err(domain("coupling density must be >= 0"));
            }
            Ok(Self::constant(drive.coupling_density))
        } else {
            Self::from_profile(drive.coupling_density, &drive.profile)
        }
    }

    /// `a(τ)`; zero for `τ <= 0`.
    pub fn at(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        let idx = self.knots.partition_point(|&(t, _)| t <= tau);
        let (t0, a0) = self.knots[idx - 1];
        match self.knots.get(idx) {
            Some(&(t1, a1)) => a0 + (a1 - a0) * (tau - t0) / (t1 - t0),
            None => a0 + self.tail_rate * (tau - t0),
        }
    }

    /// Right derivative `da/dτ` (the instantaneous coupling density).
    pub fn rate_at(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        let idx = self.knots.partition_point(|&(t, _)| t <= tau);
        let (t0, a0) = self.knots[idx - 1];
        match self.knots.get(idx) {
            Some(&(t1, a1)) => (a1 - a0) / (t1 - t0),
            None => self.tail_rate,
        }
    }

    /// Times at which the drive switches level.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots.iter().skip(1).map(|&(t, _)| t)
    }
}

/// Dimensionless view of a pulse area: time `t = Γτ`, area `A(t) = L a(t/Γ)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledArea<'a> {
    pub area: &'a PulseArea,
    pub length: f64,
    pub gamma: f64,
}

impl ScaledArea<'_> {
    pub fn value(&self, t: f64) -> f64 {
        self.length * self.area.at(t / self.gamma)
    }

    /// Local optical depth rate `dA/dt`.
    pub fn rate(&self, t: f64) -> f64 {
        self.length * self.area.rate_at(t / self.gamma) / self.gamma
    }

    /// Switching times inside the open interval `(lo, hi)`, in dimensionless time.
    pub fn breaks_within(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.area.breakpoints().map(|t| t * self.gamma).filter(|&t| t > lo && t < hi).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_drive_is_linear() {
        let a = PulseArea::constant(3.0);
        assert_eq!(a.at(0.0), 0.0);
        assert_eq!(a.at(2.5), 7.5);
        assert_eq!(a.rate_at(100.0), 3.0);
        assert_eq!(a.breakpoints().count(), 0);
    }

    #[test]
    fn profile_is_exact_and_monotone() {
        let a = PulseArea::from_profile(2.0, &[(1.0, 1.0), (0.5, 0.0), (2.0, 0.5)]).unwrap();
        assert_eq!(a.at(1.0), 2.0);
        assert_eq!(a.at(1.25), 2.0);
        assert_eq!(a.at(2.5), 3.0);
        assert_eq!(a.at(10.0), 4.0);
        assert_eq!(a.rate_at(0.5), 2.0);
        assert_eq!(a.rate_at(1.2), 0.0);
        assert_eq!(a.rate_at(3.0), 1.0);
        assert_eq!(a.rate_at(3.5), 0.0);
        let samples: Vec<f64> = (0..100).map(|i| a.at(i as f64 * 0.05)).collect();
        assert!(samples.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_bad_segments() {
        assert!(PulseArea::from_profile(1.0, &[(0.0, 1.0)]).is_err());
        assert!(PulseArea::from_profile(1.0, &[(1.0, -1.0)]).is_err());
        assert!(PulseArea::from_profile(-1.0, &[]).is_err());
    }
}
