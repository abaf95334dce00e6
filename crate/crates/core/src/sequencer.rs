//! Eight-step addressing sequence.
//!
//! 1. rotate the target's bin by `X_θ`;
//! 2. swap the target with a partner in another bin;
//! 3. rotate the partner's bin by `Y_φ` (this now hits the target's state);
//! 4. swap back.
//!
//! Steps 5 to 8 repeat with `X_{-θ}` and `Y_{-φ}`.
//!
//! Every other qubit sees a rotation followed later by its inverse, so only
//! the target acquires `U = Y_{-φ} X_{-θ} Y_φ X_θ`. At `φ = θ` that is
//! `Z_λ X_β Z_ν`, and virtual z-rotations around one or two sequences
//! reach any single-qubit gate.

use std::fmt;

use crate::drive::{DriveAxis, DriveParams};
use crate::error::{Error, Result};
use crate::scalar::wrap_angle;
use crate::spectrum::ArrayConfig;
use crate::su2::{compose, rotation, Axis, ZxzAngles};
use crate::swap_synth::{calibrated_alpha_total, quarter_turn_swap_plan, plan_swap, ExchangeLink, SwapPlan};
use crate::{EulerZXZ, Unitary2};

const BISECTION_TOL: f64 = 1e-12;
const BISECTION_MAX_ITERS: usize = 200;
// Below this β a request is treated as a pure z-rotation.
const BETA_EPS: f64 = 1e-12;

/// How the drive strength of each rotation step is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveStrategy {
    /// `Ω = δ|θ|/(2ℓπ)`.
    Optimal { ell: u32 },
    /// Exact synchronization for bin offset `m` with winding `n`.
    ExactSync { m: i64, n: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceOptions {
    pub drive: DriveStrategy,
    /// Exchange strength used for every swap (rad/µs).
    pub j_max: f64,
    /// Total su(2) rotation requested from each swap synthesis.
    pub alpha_total: f64,
    /// Smallest `|bin(partner) − bin(target)|` accepted.
    pub min_bin_separation: i64,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        Self {
            drive: DriveStrategy::Optimal { ell: 4 },
            j_max: 50.0,
            alpha_total: calibrated_alpha_total(),
            min_bin_separation: 1,
        }
    }
}

impl SequenceOptions {
    pub fn with_ell(ell: u32) -> Self {
        Self {
            drive: DriveStrategy::Optimal { ell },
            ..Self::default()
        }
    }

    fn drive(&self, delta: f64, angle: f64, axis: DriveAxis, bin: i64) -> Result<DriveParams> {
        match self.drive {
            DriveStrategy::Optimal { ell } => DriveParams::optimal(delta, angle, ell, axis, bin),
            DriveStrategy::ExactSync { m, n } => {
                if angle == 0.0 {
                    DriveParams::optimal(delta, 0.0, 1, axis, bin)
                } else {
                    DriveParams::exact_sync(m, delta, angle, n, axis, bin)
                }
            }
        }
    }
}

/// Swap of sites `(left, left + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapLeg {
    pub left: usize,
    pub link: ExchangeLink,
    /// Executable synthesis.
    pub plan: SwapPlan,
    /// Closed-form accounting duration (α = π/2, no pads).
    pub nominal_duration: f64,
}

impl SwapLeg {
    pub fn sites(&self) -> (usize, usize) {
        (self.left, self.left + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceStep {
    /// Global drive resonant with `bin`; the angle and axis live in `drive`.
    Rotation { bin: i64, drive: DriveParams },
    /// Adjacent swaps applied in order.
    Swap { legs: Vec<SwapLeg> },
}

impl SequenceStep {
    pub fn duration(&self) -> f64 {
        match self {
            SequenceStep::Rotation { drive, .. } => drive.duration,
            SequenceStep::Swap { legs } => legs.iter().map(|l| l.plan.total_duration).sum(),
        }
    }

    pub fn nominal_duration(&self) -> f64 {
        match self {
            SequenceStep::Rotation { drive, .. } => drive.duration,
            SequenceStep::Swap { legs } => legs.iter().map(|l| l.nominal_duration).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequencePlan {
    pub steps: Vec<SequenceStep>,
    pub target_site: usize,
    pub partner_site: usize,
    /// Sites from target to partner, inclusive.
    pub path: Vec<usize>,
    pub target_bin: i64,
    pub partner_bin: i64,
    pub theta: f64,
    pub phi: f64,
    /// Virtual z applied to the target before / after the sequence.
    pub virtual_z_pre: f64,
    pub virtual_z_post: f64,
    /// Sum of executable step durations.
    pub total_duration: f64,
    /// `4T + 4T_SWAP` with closed-form swap durations.
    pub nominal_duration: f64,
}

impl SequencePlan {
    /// `Y_{-φ} X_{-θ} Y_φ X_θ`, without the virtual z frame.
    pub fn sequence_unitary(&self) -> Unitary2 {
        sequence_unitary(self.theta, self.phi)
    }

    /// Sequence including the virtual z before and after.
    pub fn target_unitary(&self) -> Unitary2 {
        rotation(Axis::Z, self.virtual_z_post) * self.sequence_unitary() * rotation(Axis::Z, self.virtual_z_pre)
    }

    /// Human-readable schedule, one line per step.
    pub fn schedule(&self) -> Schedule<'_> {
        Schedule(self)
    }
}

/// Display adapter for [`SequencePlan::schedule`].
pub struct Schedule<'a>(&'a SequencePlan);

impl fmt::Display for Schedule<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.0;
        writeln!(f, "step  kind      where          angle/π    Ω (rad/µs)   duration (µs)")?;
        for (i, step) in p.steps.iter().enumerate() {
            match step {
                SequenceStep::Rotation { bin, drive } => {
                    let axis = match drive.axis {
                        DriveAxis::X => "rot-x",
                        DriveAxis::Y => "rot-y",
                    };
                    writeln!(
                        f,
                        "{:<5} {:<9} {:<14} {:>9.5} {:>12.6} {:>15.6}",
                        i + 1,
                        axis,
                        format!("bin {bin}"),
                        drive.rotation_angle / std::f64::consts::PI,
                        drive.rabi,
                        drive.duration
                    )?;
                }
                SequenceStep::Swap { legs } => {
                    let sites: Vec<String> = legs.iter().map(|l| format!("{}-{}", l.left, l.left + 1)).collect();
                    writeln!(
                        f,
                        "{:<5} {:<9} {:<14} {:>9} {:>12} {:>15.6}",
                        i + 1,
                        "swap",
                        format!("sites {}", sites.join(",")),
                        "-",
                        "-",
                        step.duration()
                    )?;
                }
            }
        }
        writeln!(f, "total duration {:.6} µs (closed-form accounting {:.6} µs)", p.total_duration, p.nominal_duration)
    }
}

/// Sites from the target to the nearest qubit whose bin differs by at least
/// `min_bin_separation`. Ties go to the lower site index.
pub fn choose_partner(config: &ArrayConfig, target_site: usize, min_bin_separation: i64) -> Result<Vec<usize>> {
    config.check_site(target_site)?;
    let sep = min_bin_separation.max(1);
    let tb = config.qubits[target_site].bin;
    let ok = |s: usize| (config.qubits[s].bin - tb).abs() >= sep;
    for d in 1..config.len() {
        if target_site >= d && ok(target_site - d) {
            return Ok((target_site - d..=target_site).rev().collect());
        }
        if target_site + d < config.len() && ok(target_site + d) {
            return Ok((target_site..=target_site + d).collect());
        }
    }
    Err(Error::NoPartner { site: target_site })
}

fn swap_leg(config: &ArrayConfig, left: usize, options: &SequenceOptions) -> Result<SwapLeg> {
    let (a, b) = (&config.qubits[left], &config.qubits[left + 1]);
    let link = ExchangeLink::new(options.j_max, b.tuned_larmor - a.tuned_larmor, 0.5 * (a.tuned_larmor + b.tuned_larmor))?;
    Ok(SwapLeg {
        left,
        link,
        plan: plan_swap(&link, options.alpha_total)?,
        nominal_duration: quarter_turn_swap_plan(&link)?.total_duration,
    })
}

/// Build the eight-step plan for `target_site`.
pub fn plan_sequence(
    config: &ArrayConfig,
    target_site: usize,
    theta: f64,
    phi: f64,
    options: &SequenceOptions,
) -> Result<SequencePlan> {
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::invalid("theta", "rotation angles must be finite"));
    }
    let path = choose_partner(config, target_site, options.min_bin_separation)?;
    let partner_site = *path.last().expect("path has two or more sites");
    let target_bin = config.qubits[target_site].bin;
    let partner_bin = config.qubits[partner_site].bin;
    let delta = config.params.delta;

    // Legs that carry the target state from `path[0]` to the partner site.
    let mut out = Vec::with_capacity(path.len() - 1);
    for w in path.windows(2) {
        out.push(swap_leg(config, w[0].min(w[1]), options)?);
    }
    let back: Vec<SwapLeg> = out.iter().rev().copied().collect();

    let rot = |angle: f64, axis: DriveAxis, bin: i64| -> Result<SequenceStep> {
        Ok(SequenceStep::Rotation {
            bin,
            drive: options.drive(delta, angle, axis, bin)?,
        })
    };
    let steps = vec![
        rot(theta, DriveAxis::X, target_bin)?,
        SequenceStep::Swap { legs: out.clone() },
        rot(phi, DriveAxis::Y, partner_bin)?,
        SequenceStep::Swap { legs: back.clone() },
        rot(-theta, DriveAxis::X, target_bin)?,
        SequenceStep::Swap { legs: out },
        rot(-phi, DriveAxis::Y, partner_bin)?,
        SequenceStep::Swap { legs: back },
    ];
    let total_duration = steps.iter().map(SequenceStep::duration).sum();
    let nominal_duration = steps.iter().map(SequenceStep::nominal_duration).sum();
    Ok(SequencePlan {
        steps,
        target_site,
        partner_site,
        path,
        target_bin,
        partner_bin,
        theta,
        phi,
        virtual_z_pre: 0.0,
        virtual_z_post: 0.0,
        total_duration,
        nominal_duration,
    })
}

/// `Y_{-φ} X_{-θ} Y_φ X_θ`.
pub fn sequence_unitary(theta: f64, phi: f64) -> Unitary2 {
    compose(&[
        rotation(Axis::X, theta),
        rotation(Axis::Y, phi),
        rotation(Axis::X, -theta),
        rotation(Axis::Y, -phi),
    ])
    .expect("non-empty")
}

/// Closed-form `(λ, β, ν)` of the `φ = θ` sequence, valid for `θ ∈ [0, 2π/3]`.
///
/// The arctangent is taken with `atan2` so that the branch stays continuous
/// where `sin²θ + 2cos θ` changes sign.
pub fn sequence_euler(theta: f64) -> EulerZXZ {
    let s2 = theta.sin().powi(2);
    let r = s2.atan2(s2 + 2.0 * theta.cos());
    ZxzAngles::new(
        -std::f64::consts::FRAC_PI_4 - r,
        sequence_beta(theta),
        std::f64::consts::FRAC_PI_4 - r,
    )
}

/// `β(θ) = 2 asin(√2 sin²(θ/2) sin θ)`.
pub fn sequence_beta(theta: f64) -> f64 {
    let x = std::f64::consts::SQRT_2 * (theta / 2.0).sin().powi(2) * theta.sin();
    2.0 * x.clamp(-1.0, 1.0).asin()
}

/// `2 asin(3√3/(4√2))`, reached at `θ = 2π/3`.
pub fn beta_max() -> f64 {
    2.0 * (3.0 * 3f64.sqrt() / (4.0 * std::f64::consts::SQRT_2)).asin()
}

/// Invert [`sequence_beta`] on `[0, 2π/3]` by bisection.
pub fn theta_for_beta(beta: f64) -> Result<f64> {
    if !(0.0..=beta_max() + BISECTION_TOL).contains(&beta) {
        return Err(Error::invalid("beta", format!("{beta} outside [0, β_max]")));
    }
    let (mut lo, mut hi) = (0.0, 2.0 * std::f64::consts::FRAC_PI_3);
    for _ in 0..BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        let b = sequence_beta(mid);
        if (b - beta).abs() <= BISECTION_TOL * 1e-3 || (hi - lo).abs() < f64::EPSILON {
            return Ok(mid);
        }
        if b < beta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A single-qubit gate to realize on one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateRequest {
    pub euler: EulerZXZ,
    pub target_site: usize,
}

/// Plans and virtual z-angles realizing a gate.
///
/// In time order: `Z(virtual_z[0])`, `plans[0]`, `Z(virtual_z[1])`, … ,
/// `Z(virtual_z[plans.len()])`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSynthesis {
    pub plans: Vec<SequencePlan>,
    pub virtual_z: Vec<f64>,
}

impl GateSynthesis {
    /// Ideal target unitary of the whole synthesis.
    pub fn ideal_unitary(&self) -> Unitary2 {
        let mut u = rotation(Axis::Z, self.virtual_z[0]);
        for (plan, &z) in self.plans.iter().zip(&self.virtual_z[1..]) {
            u = rotation(Axis::Z, z) * plan.sequence_unitary() * u;
        }
        u
    }

    pub fn total_duration(&self) -> f64 {
        self.plans.iter().map(|p| p.total_duration).sum()
    }
}

/// Realize `Z_α X_β Z_γ` on the requested site.
///
/// Up to `β_max` one `φ = θ` sequence suffices; beyond it the gate is
/// split as `Z_{α-π/2} X_{π/2} Z_{π-β} X_{π/2} Z_{γ-π/2}` and each `X_{π/2}`
/// comes from a `θ = π/2` sequence.
pub fn synthesize_gate(request: &GateRequest, config: &ArrayConfig, options: &SequenceOptions) -> Result<GateSynthesis> {
    let ZxzAngles { alpha, beta, gamma } = request.euler;
    if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
        return Err(Error::invalid("euler", "angles must be finite"));
    }
    if !(-BETA_EPS..=std::f64::consts::PI + BETA_EPS).contains(&beta) {
        return Err(Error::invalid("euler", format!("β = {beta} outside [0, π]")));
    }
    config.check_site(request.target_site)?;
    let site = request.target_site;

    if beta.abs() <= BETA_EPS {
        return Ok(GateSynthesis {
            plans: Vec::new(),
            virtual_z: vec![wrap_angle(alpha + gamma)],
        });
    }

    if beta <= beta_max() {
        let theta = theta_for_beta(beta)?;
        let e = sequence_euler(theta);
        let pre = wrap_angle(gamma - e.gamma);
        let post = wrap_angle(alpha - e.alpha);
        let mut plan = plan_sequence(config, site, theta, theta, options)?;
        plan.virtual_z_pre = pre;
        plan.virtual_z_post = post;
        return Ok(GateSynthesis {
            plans: vec![plan],
            virtual_z: vec![pre, post],
        });
    }

    let half = std::f64::consts::FRAC_PI_2;
    let e0 = sequence_euler(half);
    let pre = wrap_angle(gamma - half - e0.gamma);
    let mid = wrap_angle(std::f64::consts::PI - beta - e0.alpha - e0.gamma);
    let post = wrap_angle(alpha - half - e0.alpha);
    let mut first = plan_sequence(config, site, half, half, options)?;
    first.virtual_z_pre = pre;
    first.virtual_z_post = mid;
    let mut second = first.clone();
    second.virtual_z_pre = 0.0;
    second.virtual_z_post = post;
    Ok(GateSynthesis {
        plans: vec![first, second],
        virtual_z: vec![pre, mid, post],
    })
}

/// Net unitary of every logical qubit (indexed by starting site) under
/// ideal bin rotations and ideal swaps.
pub fn ideal_bookkeeping(plan: &SequencePlan, config: &ArrayConfig) -> Vec<Unitary2> {
    let n = config.len();
    let mut at_site: Vec<usize> = (0..n).collect();
    let mut net = vec![Unitary2::identity(); n];
    for step in &plan.steps {
        match step {
            SequenceStep::Rotation { bin, drive } => {
                let r = rotation(drive.axis.axis(), drive.rotation_angle);
                for (site, &q) in at_site.iter().enumerate() {
                    if config.qubits[site].bin == *bin {
                        net[q] = r * net[q];
                    }
                }
            }
            SequenceStep::Swap { legs } => {
                for leg in legs {
                    at_site.swap(leg.left, leg.left + 1);
                }
            }
        }
    }
    net
}

/// One symbolic factor: axis and sign of its angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Factor {
    axis: DriveAxis,
    negative: bool,
}

impl Factor {
    fn render(&self) -> String {
        let (a, label) = match self.axis {
            DriveAxis::X => ('X', "θ"),
            DriveAxis::Y => ('Y', "φ"),
        };
        let sign = if self.negative { "-" } else { "" };
        format!("{a}_{{{sign}{label}}}")
    }
}

/// Symbolic per-site state after each step, e.g. `I_2 (Y_{φ} X_{θ})_1 …`.
///
/// X steps are labelled θ and Y steps φ. Qubits are numbered from 1 and
/// each row lists sites left to right. A factor followed by its inverse
/// cancels.
pub fn bookkeeping_rows(plan: &SequencePlan, config: &ArrayConfig) -> Vec<String> {
    let n = config.len();
    let mut at_site: Vec<usize> = (0..n).collect();
    let mut words: Vec<Vec<Factor>> = vec![Vec::new(); n];
    let mut rows = Vec::with_capacity(plan.steps.len());
    for step in &plan.steps {
        match step {
            SequenceStep::Rotation { bin, drive } => {
                if drive.rotation_angle != 0.0 {
                    let f = Factor {
                        axis: drive.axis,
                        negative: drive.rotation_angle < 0.0,
                    };
                    for (site, &q) in at_site.iter().enumerate() {
                        if config.qubits[site].bin == *bin {
                            let w = &mut words[q];
                            match w.last() {
                                Some(last) if last.axis == f.axis && last.negative != f.negative => {
                                    w.pop();
                                }
                                _ => w.push(f),
                            }
                        }
                    }
                }
            }
            SequenceStep::Swap { legs } => {
                for leg in legs {
                    at_site.swap(leg.left, leg.left + 1);
                }
            }
        }
        let cells: Vec<String> = at_site
            .iter()
            .map(|&q| {
                let w = &words[q];
                let label = q + 1;
                match w.len() {
                    0 => format!("I_{label}"),
                    1 => {
                        let r = w[0].render();
                        format!("{},{label}}}", &r[..r.len() - 1])
                    }
                    _ => {
                        let inner: Vec<String> = w.iter().rev().map(Factor::render).collect();
                        format!("({})_{label}", inner.join(" "))
                    }
                }
            })
            .collect();
        rows.push(cells.join(" "));
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::SpectrumParams;
    use crate::su2::{euler_zxz, trace_gate_fidelity};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    // Sites 1..6 in bins 1, 3, 4, 3, 1, 2.
    fn fixture() -> ArrayConfig {
        ArrayConfig::from_bins(SpectrumParams::default(), &[1, 3, 4, 3, 1, 2]).unwrap()
    }

    fn opts() -> SequenceOptions {
        SequenceOptions {
            alpha_total: PI,
            ..SequenceOptions::with_ell(4)
        }
    }

    fn is_identity(u: &Unitary2, tol: f64) -> bool {
        u.phase_aligned_diff(&Unitary2::identity()) < tol
    }

    #[test]
    fn partner_examples() {
        let cfg = fixture();
        assert_eq!(choose_partner(&cfg, 0, 1).unwrap(), vec![0, 1]);
        let p = SpectrumParams::default();
        let cfg = ArrayConfig::from_bins(p, &[2, 2, 5]).unwrap();
        assert_eq!(choose_partner(&cfg, 0, 1).unwrap(), vec![0, 1, 2]);
        let cfg = ArrayConfig::from_bins(p, &[0, 1]).unwrap();
        assert_eq!(choose_partner(&cfg, 1, 1).unwrap(), vec![1, 0]);
        // Equal distance both ways: lower index wins.
        let cfg = ArrayConfig::from_bins(p, &[3, 0, 4]).unwrap();
        assert_eq!(choose_partner(&cfg, 1, 1).unwrap(), vec![1, 0]);
        // Separation requirement skips the adjacent bin.
        let cfg = ArrayConfig::from_bins(p, &[0, 1, 5]).unwrap();
        assert_eq!(choose_partner(&cfg, 0, 2).unwrap(), vec![0, 1, 2]);
        let cfg = ArrayConfig::from_bins(p, &[7, 7, 7]).unwrap();
        assert_eq!(choose_partner(&cfg, 1, 1), Err(Error::NoPartner { site: 1 }));
        assert!(matches!(choose_partner(&cfg, 9, 1), Err(Error::SiteOutOfRange { .. })));
    }

    #[test]
    fn fixture_bookkeeping_rows() {
        let cfg = fixture();
        let plan = plan_sequence(&cfg, 0, 1.0, 1.0, &opts()).unwrap();
        let expected = [
            "X_{θ,1} I_2 I_3 I_4 X_{θ,5} I_6",
            "I_2 X_{θ,1} I_3 I_4 X_{θ,5} I_6",
            "I_2 (Y_{φ} X_{θ})_1 I_3 Y_{φ,4} X_{θ,5} I_6",
            "(Y_{φ} X_{θ})_1 I_2 I_3 Y_{φ,4} X_{θ,5} I_6",
            "(X_{-θ} Y_{φ} X_{θ})_1 I_2 I_3 Y_{φ,4} I_5 I_6",
            "I_2 (X_{-θ} Y_{φ} X_{θ})_1 I_3 Y_{φ,4} I_5 I_6",
            "I_2 (Y_{-φ} X_{-θ} Y_{φ} X_{θ})_1 I_3 I_4 I_5 I_6",
            "(Y_{-φ} X_{-θ} Y_{φ} X_{θ})_1 I_2 I_3 I_4 I_5 I_6",
        ];
        assert_eq!(bookkeeping_rows(&plan, &cfg), expected);
    }

    #[test]
    fn plan_shape() {
        let cfg = fixture();
        let plan = plan_sequence(&cfg, 0, FRAC_PI_2, FRAC_PI_2, &opts()).unwrap();
        assert_eq!(plan.steps.len(), 8);
        for (i, s) in plan.steps.iter().enumerate() {
            assert_eq!(matches!(s, SequenceStep::Rotation { .. }), i % 2 == 0);
        }
        let sites = |i: usize| match &plan.steps[i] {
            SequenceStep::Swap { legs } => legs.iter().map(SwapLeg::sites).collect::<Vec<_>>(),
            _ => unreachable!(),
        };
        assert_eq!(sites(1), sites(3));
        assert_eq!(sites(5), sites(7));
        assert_eq!(sites(1), vec![(0, 1)]);
        // 4T + 4T_SWAP.
        let t_rot = 8.0 * PI / 10.0;
        let t_swap = plan.steps[1].nominal_duration();
        assert!((plan.nominal_duration - (4.0 * t_rot + 4.0 * t_swap)).abs() < 1e-12);
        assert!(plan.total_duration >= 4.0 * t_rot);
        let text = plan.schedule().to_string();
        assert_eq!(text.lines().count(), 10);
    }

    #[test]
    fn bookkeeping_identities() {
        let cfg = fixture();
        for &(t, p) in &[(FRAC_PI_2, FRAC_PI_2), (0.3, 1.9), (0.0, 0.0)] {
            let plan = plan_sequence(&cfg, 0, t, p, &opts()).unwrap();
            let net = ideal_bookkeeping(&plan, &cfg);
            assert!(net[0].max_abs_diff(&sequence_unitary(t, p)) < 1e-14);
            for u in &net[1..] {
                assert!(u.max_abs_diff(&Unitary2::identity()) < 1e-12);
            }
        }
        let plan = plan_sequence(&cfg, 0, 0.0, 0.0, &opts()).unwrap();
        assert!(is_identity(&ideal_bookkeeping(&plan, &cfg)[0], 1e-15));
        assert!(bookkeeping_rows(&plan, &cfg).iter().all(|r| !r.contains('X') && !r.contains('Y')));
    }

    #[test]
    fn quarter_turn_sequence_decomposition() {
        let e = euler_zxz(&sequence_unitary(FRAC_PI_2, FRAC_PI_2)).angles;
        assert!((e.alpha + FRAC_PI_2).abs() < 1e-12);
        assert!((e.beta - FRAC_PI_2).abs() < 1e-12);
        assert!(e.gamma.abs() < 1e-12);
        let c = sequence_euler(FRAC_PI_2);
        assert!((c.alpha + FRAC_PI_2).abs() < 1e-15 && (c.beta - FRAC_PI_2).abs() < 1e-15 && c.gamma.abs() < 1e-15);
    }

    #[test]
    fn beta_max_value() {
        let direct = sequence_beta(2.0 * PI / 3.0);
        assert!((direct - beta_max()).abs() < 1e-12);
        assert!((beta_max() / PI - 0.74129).abs() < 1e-5);
        let mut prev = 0.0;
        for k in 1..=1000 {
            let b = sequence_beta(2.0 * PI / 3.0 * k as f64 / 1000.0);
            assert!(b > prev);
            prev = b;
        }
    }

    #[test]
    fn synthesis_examples() {
        let cfg = fixture();
        let x90 = GateRequest {
            euler: ZxzAngles::new(0.0, FRAC_PI_2, 0.0),
            target_site: 0,
        };
        let s = synthesize_gate(&x90, &cfg, &opts()).unwrap();
        assert_eq!(s.plans.len(), 1);
        assert!((s.plans[0].theta - FRAC_PI_2).abs() < 1e-10);
        // Post-correction undoes λ = −π/2.
        assert!((s.virtual_z[1] - FRAC_PI_2).abs() < 1e-9);
        assert!(s.virtual_z[0].abs() < 1e-9);
        assert!((trace_gate_fidelity(&s.ideal_unitary(), &rotation(Axis::X, FRAC_PI_2)) - 1.0).abs() < 1e-12);

        let big = GateRequest {
            euler: ZxzAngles::new(0.3, 0.9 * PI, -1.1),
            target_site: 0,
        };
        let s = synthesize_gate(&big, &cfg, &opts()).unwrap();
        assert_eq!(s.plans.len(), 2);
        assert!(s.ideal_unitary().phase_aligned_diff(&big.euler.to_unitary()) < 1e-9);

        let id = GateRequest {
            euler: ZxzAngles::new(0.0, 0.0, 0.0),
            target_site: 0,
        };
        let s = synthesize_gate(&id, &cfg, &opts()).unwrap();
        assert!(s.plans.is_empty());
        assert_eq!(s.virtual_z, vec![0.0]);
    }

    #[test]
    fn multi_hop_restores_spectators() {
        let p = SpectrumParams::default();
        let cfg = ArrayConfig::from_bins(p, &[0, 0, 0, 2, 0]).unwrap();
        let plan = plan_sequence(&cfg, 1, 1.2, 0.7, &opts()).unwrap();
        assert_eq!(plan.path, vec![1, 2, 3]);
        let net = ideal_bookkeeping(&plan, &cfg);
        assert!(net[1].max_abs_diff(&sequence_unitary(1.2, 0.7)) < 1e-14);
        for (q, u) in net.iter().enumerate() {
            if q != 1 {
                assert!(u.max_abs_diff(&Unitary2::identity()) < 1e-12, "qubit {q}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn closed_form_euler_matches(theta in 1e-3f64..(2.0 * PI / 3.0)) {
            let e = euler_zxz(&sequence_unitary(theta, theta)).angles;
            let c = sequence_euler(theta);
            prop_assert!((wrap_angle(e.alpha - c.alpha)).abs() < 1e-9, "λ {} vs {}", e.alpha, c.alpha);
            prop_assert!((e.beta - c.beta).abs() < 1e-9);
            prop_assert!((wrap_angle(e.gamma - c.gamma)).abs() < 1e-9);
            prop_assert!((theta_for_beta(c.beta).unwrap() - theta).abs() < 1e-8);
        }

        #[test]
        fn synthesis_round_trip(a in -PI..PI, b in 0.0..PI, c in -PI..PI, site in 0usize..6) {
            let cfg = fixture();
            let req = GateRequest { euler: ZxzAngles::new(a, b, c), target_site: site };
            let s = synthesize_gate(&req, &cfg, &opts()).unwrap();
            prop_assert!(s.ideal_unitary().phase_aligned_diff(&req.euler.to_unitary()) < 1e-9);
            prop_assert_eq!(s.plans.len(), if b > beta_max() { 2 } else { 1 });
        }

        #[test]
        fn spectators_return_to_identity(bins in prop::collection::vec(-3i64..4, 2..9), target in 0usize..8, t in -3.0f64..3.0, p in -3.0f64..3.0) {
            let cfg = ArrayConfig::from_bins(SpectrumParams::default(), &bins).unwrap();
            let target = target % cfg.len();
            match plan_sequence(&cfg, target, t, p, &opts()) {
                Err(Error::NoPartner { .. }) => prop_assert!(bins.iter().all(|&b| b == bins[0])),
                Err(e) => prop_assert!(false, "{e}"),
                Ok(plan) => {
                    let net = ideal_bookkeeping(&plan, &cfg);
                    for (q, u) in net.iter().enumerate() {
                        let want = if q == target { sequence_unitary(t, p) } else { Unitary2::identity() };
                        prop_assert!(u.max_abs_diff(&want) < 1e-12);
                    }
                }
            }
        }
    }
}
