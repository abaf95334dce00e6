//! Global microwave steps in the rotating frame.
//!
//! A constant-amplitude drive of strength Ω held for time T rotates the
//! resonant bin by `θ = Ω·T`. A qubit detuned by `Δ = m·δ` instead evolves
//! under `exp(-iT(Ω·σ_axis + Δ·Z)/2)`. If `√(Ω² + Δ²)·T` is a multiple of
//! 2π that evolution is `±I`, so choosing Ω per bin offset nulls crosstalk
//! exactly; `Ω = δθ/(2ℓπ)` does so asymptotically for every offset at once.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::su2::{rotation_unchecked, trace_gate_fidelity, Axis, Mat2};

/// In-plane drive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriveAxis {
    X,
    Y,
}

impl DriveAxis {
    pub fn axis(self) -> Axis {
        match self {
            DriveAxis::X => Axis::X,
            DriveAxis::Y => Axis::Y,
        }
    }
}

/// One microwave step.
///
/// A negative `rotation_angle` is realized by flipping the drive phase: the
/// same `rabi` and `duration` with the rotation axis negated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams<T: Real = f64> {
    pub rabi: T,
    pub axis: DriveAxis,
    pub rotation_angle: T,
    pub duration: T,
    pub target_bin: i64,
    pub ell: u32,
}

impl<T: Real> DriveParams<T> {
    /// Bin-independent strength `Ω = δ|θ|/(2ℓπ)`, duration `2ℓπ/δ`. A zero
    /// angle yields an empty (Ω = 0, T = 0) step.
    pub fn optimal(delta: T, theta: T, ell: u32, axis: DriveAxis, target_bin: i64) -> Result<Self> {
        if theta == T::zero() {
            return Ok(Self {
                rabi: T::zero(),
                axis,
                rotation_angle: theta,
                duration: T::zero(),
                target_bin,
                ell,
            });
        }
        let rabi = optimal_drive_strength(delta, theta.abs(), ell)?;
        Ok(Self {
            rabi,
            axis,
            rotation_angle: theta,
            duration: theta.abs() / rabi,
            target_bin,
            ell,
        })
    }

    /// Strength from the exact synchronization condition for bin offset `m`
    /// and winding number `n`.
    pub fn exact_sync(m: i64, delta: T, theta: T, n: i64, axis: DriveAxis, target_bin: i64) -> Result<Self> {
        let rabi = exact_sync_strength(m, delta, theta.abs(), n)?;
        let ell = (n / m.abs()).max(1) as u32;
        Ok(Self {
            rabi,
            axis,
            rotation_angle: theta,
            duration: theta.abs() / rabi,
            target_bin,
            ell,
        })
    }

    /// Drive amplitude with the sign of the rotation folded in.
    pub fn signed_rabi(&self) -> T {
        if self.rotation_angle < T::zero() {
            -self.rabi
        } else {
            self.rabi
        }
    }

    /// Rotating-frame evolution of a qubit detuned by `detuning` from the
    /// driven bin.
    pub fn unitary_at(&self, detuning: T) -> Mat2<T> {
        off_resonant_unitary(self.signed_rabi(), detuning, self.duration, self.axis)
    }

    /// `|½Tr U|²` for a qubit detuned by `detuning`.
    pub fn idle_fidelity(&self, detuning: T) -> T {
        trace_gate_fidelity(&Mat2::identity(), &self.unitary_at(detuning))
    }
}

/// `Ω = δθ/(2ℓπ)`.
pub fn optimal_drive_strength<T: Real>(delta: T, theta: T, ell: u32) -> Result<T> {
    if !(delta > T::zero()) {
        return Err(Error::invalid("delta", "must be positive"));
    }
    if !(theta > T::zero()) || !theta.is_finite() {
        return Err(Error::invalid("theta", format!("must be positive and finite, got {theta}")));
    }
    let ell_t = T::from_u32(ell).unwrap();
    if ell == 0 || !(ell_t > theta / T::TAU()) {
        return Err(Error::SyncIntegerTooSmall {
            n: ell as i64,
            theta: theta.to_f64_lossy(),
        });
    }
    Ok(delta * theta / (T::TAU() * ell_t))
}

/// Positive root of `Ω = mδθ/√((2nπ)² − θ²)`.
pub fn exact_sync_strength<T: Real>(m: i64, delta: T, theta: T, n: i64) -> Result<T> {
    if m == 0 {
        return Err(Error::invalid("m", "bin offset must be nonzero"));
    }
    if !(theta > T::zero()) || !theta.is_finite() {
        return Err(Error::invalid("theta", format!("must be positive and finite, got {theta}")));
    }
    let two_n_pi = T::TAU() * T::from_i64(n).unwrap();
    let disc = two_n_pi * two_n_pi - theta * theta;
    if n <= 0 || !(disc > T::zero()) {
        return Err(Error::SyncIntegerTooSmall {
            n,
            theta: theta.to_f64_lossy(),
        });
    }
    Ok(T::from_i64(m.abs()).unwrap() * delta.abs() * theta / disc.sqrt())
}

/// `T = |θ|/Ω`.
pub fn rotation_step_duration<T: Real>(drive: &DriveParams<T>) -> T {
    if drive.rabi == T::zero() {
        return T::zero();
    }
    drive.rotation_angle.abs() / drive.rabi
}

/// `exp(-i·T·(Ω·σ_axis + Δ·Z)/2)`; `rabi` may be negative (phase-flipped drive).
pub fn off_resonant_unitary<T: Real>(rabi: T, detuning: T, duration: T, axis: DriveAxis) -> Mat2<T> {
    let w = rabi.hypot(detuning);
    if w == T::zero() {
        return Mat2::identity();
    }
    let n = match axis {
        DriveAxis::X => [rabi / w, T::zero(), detuning / w],
        DriveAxis::Y => [T::zero(), rabi / w, detuning / w],
    };
    rotation_unchecked(n, w * duration)
}
