//! Brute-force checks of the planner and the analytic fidelity model.
//!
//! Sequences are propagated qubit by qubit with the exact rotating-frame
//! unitary of every step, following each logical qubit as swaps move it
//! between sites. Swap plans are checked against closed-form 4×4 segment
//! propagators, built here independently of the series exponential used in
//! [`crate::swap_synth`].

use std::collections::HashMap;

use num_complex::Complex;

use crate::drive::off_resonant_unitary;
use crate::error::Result;
use crate::fidelity::{IdleTable, SequenceModel};
use crate::rng::{splitmix64, substream_seed};
use crate::sequencer::{plan_sequence, SequenceOptions, SequencePlan, SequenceStep};
use crate::spectrum::{occupancy, sample_config, ArrayConfig, SpectrumParams};
use crate::su2::{rotation, trace_gate_fidelity, z_tracked_fidelity, Axis};
use crate::swap_synth::{ExchangeLink, SwapPlan};
use crate::two_qubit::{equivalent_up_to_local_z, Mat4};
use crate::{Unitary2, Unitary4};

/// How rotation steps act on off-resonant qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RotationMode {
    /// Full off-resonant evolution at the qubit's current detuning.
    Exact,
    /// Driven bin rotates exactly; everyone else is left alone.
    Ideal,
}

/// How swap steps are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SwapMode {
    /// Perfect permutation.
    Ideal,
    /// Permutation after local-z correction of the synthesized gate; its
    /// residual distance from SWAP enters as a fidelity factor.
    Synthesized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSequenceResult {
    /// Net unitary of each logical qubit, indexed by starting site.
    pub net: Vec<Unitary2>,
    /// Intended unitary of each logical qubit.
    pub intended: Vec<Unitary2>,
    /// `|½Tr(intended† net)|²` per logical qubit.
    pub site_fidelity: Vec<f64>,
    /// Same with a free final z frame per qubit.
    pub site_fidelity_z: Vec<f64>,
    /// Product of the synthesized swaps' SWAP-equivalence fidelities (1 for
    /// ideal swaps).
    pub swap_factor: f64,
    /// `swap_factor · Π site_fidelity`.
    pub fidelity: f64,
    /// `swap_factor · Π site_fidelity_z`.
    pub fidelity_z: f64,
}

impl ExactSequenceResult {
    pub fn site_infidelity(&self) -> Vec<f64> {
        self.site_fidelity.iter().map(|f| 1.0 - f).collect()
    }
}

/// Exact per-qubit propagation with off-resonant rotations.
pub fn simulate_sequence_exact(plan: &SequencePlan, config: &ArrayConfig, swaps: SwapMode) -> ExactSequenceResult {
    simulate_sequence(plan, config, RotationMode::Exact, swaps)
}

pub fn simulate_sequence(
    plan: &SequencePlan,
    config: &ArrayConfig,
    rotations: RotationMode,
    swaps: SwapMode,
) -> ExactSequenceResult {
    let n = config.len();
    let params = &config.params;
    let mut at_site: Vec<usize> = (0..n).collect();
    let mut net = vec![Unitary2::identity(); n];
    net[plan.target_site] = rotation(Axis::Z, plan.virtual_z_pre);
    let mut swap_factor = 1.0;
    let mut leg_cache: HashMap<usize, f64> = HashMap::new();

    for step in &plan.steps {
        match step {
            SequenceStep::Rotation { bin, drive } => {
                let center = params.bin_center(*bin);
                for (site, &q) in at_site.iter().enumerate() {
                    let u = match rotations {
                        RotationMode::Exact => {
                            let detuning = config.qubits[site].tuned_larmor - center;
                            off_resonant_unitary(drive.signed_rabi(), detuning, drive.duration, drive.axis)
                        }
                        RotationMode::Ideal if config.qubits[site].bin == *bin => {
                            rotation(drive.axis.axis(), drive.rotation_angle)
                        }
                        RotationMode::Ideal => Unitary2::identity(),
                    };
                    net[q] = u * net[q];
                }
            }
            SequenceStep::Swap { legs } => {
                for leg in legs {
                    if swaps == SwapMode::Synthesized {
                        swap_factor *= *leg_cache
                            .entry(leg.left)
                            .or_insert_with(|| verify_swap_plan(&leg.plan, &leg.link).fidelity);
                    }
                    at_site.swap(leg.left, leg.left + 1);
                }
            }
        }
    }
    let t = plan.target_site;
    net[t] = rotation(Axis::Z, plan.virtual_z_post) * net[t];

    let mut intended = vec![Unitary2::identity(); n];
    intended[t] = plan.target_unitary();
    let site_fidelity: Vec<f64> = intended.iter().zip(&net).map(|(w, u)| trace_gate_fidelity(w, u)).collect();
    let site_fidelity_z: Vec<f64> = intended.iter().zip(&net).map(|(w, u)| z_tracked_fidelity(w, u)).collect();
    let fidelity = swap_factor * site_fidelity.iter().product::<f64>();
    let fidelity_z = swap_factor * site_fidelity_z.iter().product::<f64>();
    ExactSequenceResult {
        net,
        intended,
        site_fidelity,
        site_fidelity_z,
        swap_factor,
        fidelity,
        fidelity_z,
    }
}

/// The analytic term `F_SWAP⁴ F_loc(t)² F_loc(k)²` for the plan's own
/// target and partner bins and drives.
pub fn bound_for_plan(plan: &SequencePlan, config: &ArrayConfig, f_swap: f64) -> f64 {
    let drive_of = |i: usize| match &plan.steps[i] {
        SequenceStep::Rotation { drive, .. } => *drive,
        SequenceStep::Swap { .. } => unreachable!("steps 1 and 3 are rotations"),
    };
    let occ = occupancy(config);
    let span = occ.iter().map(|(b, _)| b).max().unwrap_or(0) - occ.iter().map(|(b, _)| b).min().unwrap_or(0);
    let delta = config.params.delta;
    let model = SequenceModel {
        x: IdleTable::new(drive_of(0), delta, span),
        y: IdleTable::new(drive_of(2), delta, span),
        f_swap,
    };
    model.pair_fidelity(&occ, plan.target_bin, plan.partner_bin)
}

/// Exact sequence fidelity next to the analytic term for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundComparison {
    pub target_site: usize,
    pub exact: f64,
    pub exact_z: f64,
    pub bound: f64,
}

/// Sample `n_configs` arrays, pick a target per array from the same seed,
/// and compare the exact sequence fidelity with the analytic term.
/// Non-addressable draws are skipped.
pub fn survey_exact_vs_bound(
    params: &SpectrumParams,
    n_qubits: usize,
    n_configs: usize,
    seed: u64,
    theta: f64,
    options: &SequenceOptions,
) -> Result<Vec<BoundComparison>> {
    let mut out = Vec::with_capacity(n_configs);
    for i in 0..n_configs as u64 {
        let s = substream_seed(seed, i);
        let config = sample_config(*params, n_qubits, s)?;
        if !occupancy(&config).is_addressable() {
            continue;
        }
        let target = (splitmix64(s) % n_qubits as u64) as usize;
        let plan = plan_sequence(&config, target, theta, theta, options)?;
        let r = simulate_sequence_exact(&plan, &config, SwapMode::Ideal);
        out.push(BoundComparison {
            target_site: target,
            exact: r.fidelity,
            exact_z: r.fidelity_z,
            bound: bound_for_plan(&plan, &config, 1.0),
        });
    }
    Ok(out)
}

/// `u(1)` and `su(2)` parts of the exchange Hamiltonian at exchange `j`:
/// `J/4·ZZ + Ē_z(IZ + ZI)` and `J/4(XX + YY) + ΔE_z/2(IZ − ZI)`.
pub fn hamiltonian_split(link: &ExchangeLink, j: f64) -> (Unitary4, Unitary4) {
    let pp = |a, b| Mat4::pauli_pair(a, b);
    let (x, y, z) = (Some(Axis::X), Some(Axis::Y), Some(Axis::Z));
    let u1 = pp(z, z).scale_real(j / 4.0) + (pp(None, z) + pp(z, None)).scale_real(link.ez_bar);
    let su2 = (pp(x, x) + pp(y, y)).scale_real(j / 4.0) + (pp(None, z) - pp(z, None)).scale_real(link.delta_ez / 2.0);
    (u1, su2)
}

/// Closed-form `exp(-itH)` for one segment. The even states only pick up
/// phases; the odd block is a 2×2 rotation.
pub fn segment_propagator_closed_form(link: &ExchangeLink, j: f64, t: f64) -> Unitary4 {
    let c = |re: f64, im: f64| Complex::new(re, im);
    let mut u = Mat4::zeros();
    u.m[0][0] = Complex::from_polar(1.0, -t * (j / 4.0 + 2.0 * link.ez_bar));
    u.m[3][3] = Complex::from_polar(1.0, -t * (j / 4.0 - 2.0 * link.ez_bar));
    // Odd block: -J/4·I + [[-ΔE_z, J/2], [J/2, ΔE_z]].
    let (a, b) = (-link.delta_ez, j / 2.0);
    let w = a.hypot(b);
    let phase = Complex::from_polar(1.0, t * j / 4.0);
    let (cw, sw) = ((w * t).cos(), (w * t).sin());
    let (na, nb) = if w > 0.0 { (a / w, b / w) } else { (0.0, 0.0) };
    u.m[1][1] = phase * c(cw, -sw * na);
    u.m[2][2] = phase * c(cw, sw * na);
    u.m[1][2] = phase * c(0.0, -sw * nb);
    u.m[2][1] = phase * c(0.0, -sw * nb);
    u
}

/// Result of checking one swap plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapVerification {
    /// SWAP-equivalence fidelity up to local z.
    pub fidelity: f64,
    /// Local z after (`post`) and before (`pre`) the gate, per qubit.
    pub post: [f64; 2],
    pub pre: [f64; 2],
    pub gate: Unitary4,
}

pub fn verify_swap_plan(plan: &SwapPlan, link: &ExchangeLink) -> SwapVerification {
    let gate = plan
        .segments()
        .iter()
        .fold(Mat4::identity(), |u, s| segment_propagator_closed_form(link, s.exchange, s.duration) * u);
    let eq = equivalent_up_to_local_z(&gate, &Mat4::swap());
    SwapVerification {
        fidelity: eq.fidelity,
        post: eq.post,
        pre: eq.pre,
        gate,
    }
}

/// First time at which a pure Heisenberg pulse at `j` is SWAP up to phase,
/// found by scanning the overlap and refining the first peak.
pub fn heisenberg_swap_time(j: f64) -> f64 {
    let link = ExchangeLink {
        j_max: j,
        delta_ez: 0.0,
        ez_bar: 0.0,
    };
    let overlap = |t: f64| {
        let u = segment_propagator_closed_form(&link, j, t);
        let f = (Mat4::swap().dagger() * u).trace().norm() / 4.0;
        f * f
    };
    let horizon = 4.0 * std::f64::consts::PI / j;
    let steps = 4000;
    let dt = horizon / steps as f64;
    let mut k = 1;
    while k < steps && !(overlap(k as f64 * dt) > 0.99 && overlap((k + 1) as f64 * dt) < overlap(k as f64 * dt)) {
        k += 1;
    }
    let (mut lo, mut hi) = ((k as f64 - 1.0) * dt, (k as f64 + 1.0) * dt);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-14 * horizon {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if overlap(x1) < overlap(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    0.5 * (lo + hi)
}
