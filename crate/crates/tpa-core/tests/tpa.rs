mod common;

use common::simpson;
use proptest::prelude::*;
use std::f64::consts::PI;
use tpa_core::constants::{wavelength_span_to_omega, wavelength_to_omega, ELEMENTARY_CHARGE};
use tpa_core::fiber::FiberSpec;
use tpa_core::tpa::{
    amplitude_entangled_continuum, amplitude_entangled_discrete, matrix_elements, microtoroid_rate, rate_per_atom,
    rate_ratio_factor, AtomicLadder, EntangledParams, FrequencyGrid, PairKind, PhotonPairSpec, ToroidSpec, TpaEngine,
    TpaError, VaporSpec, VelocityModel,
};

const LAMBDA: f64 = 778e-9;

fn nm_to_omega(span_nm: f64) -> f64 {
    wavelength_span_to_omega(span_nm * 1e-9, LAMBDA)
}

struct Bench {
    fiber: FiberSpec,
    atom: AtomicLadder,
    pair: PhotonPairSpec,
    vapor: VaporSpec,
}

fn bench(kind: PairKind, detuning_nm: f64, sigma_nm: f64) -> Bench {
    let w = wavelength_to_omega(LAMBDA);
    let atom = AtomicLadder::resonant_with(
        w,
        w,
        nm_to_omega(detuning_nm),
        0.223e-9 * ELEMENTARY_CHARGE,
        0.0492e-9 * ELEMENTARY_CHARGE,
        1e9,
        1e9,
    );
    Bench {
        fiber: FiberSpec::new(350e-9, 5e-3, 1.4537).unwrap(),
        atom,
        pair: PhotonPairSpec { omega_s0: w, omega_i0: w, sigma: nm_to_omega(sigma_nm), kind, velocity: VelocityModel::Group },
        vapor: VaporSpec { density: 1e18 },
    }
}

impl Bench {
    fn engine(&self) -> TpaEngine {
        TpaEngine::for_pair(&self.fiber, &self.pair).unwrap()
    }

    fn rate(&self) -> f64 {
        self.engine().total_rate(&self.atom, &self.pair, &self.vapor).unwrap().rate
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `ρ·L·∫∫ R(r, φ) r dr dφ` from point amplitudes on a dense grid.
fn rate_from_point_amplitudes(b: &Bench) -> f64 {
    let engine = b.engine();
    let a = b.fiber.radius();
    let q = engine.mode_signal.profile.w() / a;
    let ring = |r: f64| {
        let m = 16;
        (0..m)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / m as f64;
                rate_per_atom(engine.amplitude_at(&b.atom, &b.pair, r, phi, 0.0).unwrap(), &b.atom)
            })
            .sum::<f64>()
            * 2.0
            * PI
            / m as f64
            * r
    };
    b.vapor.density * b.fiber.length * simpson(ring, a, a + 25.0 / q, 20000)
}

#[test]
fn total_rate_equals_integrated_point_rates() {
    for kind in [PairKind::Entangled, PairKind::Monochromatic] {
        let b = bench(kind, 2.1, 1.0);
        let oracle = rate_from_point_amplitudes(&b);
        assert!(rel(b.rate(), oracle) < 1e-6, "{kind:?}: {} vs {oracle}", b.rate());
    }
}

#[test]
fn continuum_matches_discrete_superposition() {
    let b = bench(PairKind::Entangled, 2.1, 1.0);
    let engine = b.engine();
    let (m1c, m2c) = matrix_elements(&engine.mode_signal, &engine.mode_idler, &b.atom, b.fiber.radius(), 0.0, 0.0).unwrap();
    let delta = nm_to_omega(2.1);
    for ratio in [0.1, 0.5, 1.0, 2.0] {
        let params = EntangledParams { detuning: delta, sigma: ratio * delta, length: b.fiber.length, velocity: engine.velocity() };
        let cont = amplitude_entangled_continuum(m1c, m2c, &params, &b.atom).unwrap();
        let grid = FrequencyGrid::resolving(params.sigma, b.atom.gamma1);
        let disc = amplitude_entangled_discrete(m1c, m2c, &params, &b.atom, &grid);
        let err = (cont - disc).norm() / cont.norm();
        assert!(err < 1e-5, "σ/Δ = {ratio}: relative deviation {err:e}");
    }
}

#[test]
fn narrow_band_limit_and_algebraic_ratio() {
    let b = bench(PairKind::Entangled, 2.1, 0.21);
    let engine = b.engine();
    let full = engine.total_rate(&b.atom, &b.pair, &b.vapor).unwrap().rate;
    let asym = engine.rate_asymptotic(&b.atom, &b.pair, &b.vapor).unwrap();
    assert!(rel(asym, full) < 0.05, "asymptotic {asym:e} vs full {full:e}");

    let mono_pair = PhotonPairSpec { kind: PairKind::Monochromatic, ..b.pair };
    let mono = engine.total_rate(&b.atom, &mono_pair, &b.vapor).unwrap().rate;
    let factor = rate_ratio_factor(b.fiber.length, engine.velocity(), b.pair.sigma);
    assert!(rel(asym / mono, factor) < 1e-6);
}

#[test]
fn rate_scales_with_density_and_dipoles() {
    for kind in [PairKind::Entangled, PairKind::Monochromatic] {
        for (det, sig) in [(2.1, 1.0), (3.5, 0.6)] {
            let b = bench(kind, det, sig);
            let engine = b.engine();
            let base = engine.total_rate(&b.atom, &b.pair, &b.vapor).unwrap().rate;
            let dense = VaporSpec { density: 3.0 * b.vapor.density };
            assert!(rel(engine.total_rate(&b.atom, &b.pair, &dense).unwrap().rate, 3.0 * base) < 1e-6);
            let strong = AtomicLadder { d1: 2.0 * b.atom.d1, d2: 0.5 * b.atom.d2, ..b.atom };
            assert!(rel(engine.total_rate(&strong, &b.pair, &b.vapor).unwrap().rate, base) < 1e-6);
            let stronger = AtomicLadder { d1: 2.0 * b.atom.d1, d2: 3.0 * b.atom.d2, ..b.atom };
            assert!(rel(engine.total_rate(&stronger, &b.pair, &b.vapor).unwrap().rate, 36.0 * base) < 1e-6);
        }
    }
}

#[test]
fn length_dependence_by_kind() {
    for (det, sig) in [(2.1, 1.0), (3.5, 0.6)] {
        let mut short = bench(PairKind::Monochromatic, det, sig);
        let base = short.rate();
        short.fiber.length *= 4.0;
        assert!(rel(short.rate(), base / 4.0) < 1e-6, "monochromatic rate must scale as 1/L");

        let mut ent = bench(PairKind::Entangled, det, sig);
        let base = ent.rate();
        ent.fiber.length *= 4.0;
        assert!(rel(ent.rate(), base) < 1e-6, "entangled rate must not depend on L");
    }
}

#[test]
fn rate_is_even_in_detuning() {
    for kind in [PairKind::Entangled, PairKind::Monochromatic] {
        let plus = bench(kind, 2.1, 1.0).rate();
        let minus = bench(kind, -2.1, 1.0).rate();
        assert!(rel(minus, plus) < 1e-9, "{kind:?}");
    }
}

#[test]
fn phase_velocity_model_only_changes_entangled_kernel() {
    let mut b = bench(PairKind::Entangled, 2.1, 1.0);
    let group = b.engine();
    let g_rate = group.total_rate(&b.atom, &b.pair, &b.vapor).unwrap().rate;
    b.pair.velocity = VelocityModel::Phase;
    let phase = b.engine();
    let p_rate = phase.total_rate(&b.atom, &b.pair, &b.vapor).unwrap().rate;
    assert!(phase.velocity() > group.velocity());
    assert!(rel(p_rate * phase.velocity(), g_rate * group.velocity()) < 1e-12);
}

#[test]
fn accuracy_domain_is_enforced() {
    let b = bench(PairKind::Entangled, 2.1, 1e-4);
    let err = b.engine().total_rate(&b.atom, &b.pair, &b.vapor).unwrap_err();
    assert!(matches!(err, TpaError::Numerics(_)), "{err}");
}

#[test]
fn toroid_geometry_checks() {
    let b = bench(PairKind::Monochromatic, 2.1, 1.0);
    let w = wavelength_to_omega(LAMBDA);
    let fat = ToroidSpec { principal_diameter: 3e-6, minor_diameter: 350e-9 };
    assert!(matches!(microtoroid_rate(&fat, &b.fiber, &b.atom, &b.vapor, w), Err(TpaError::AspectRatioViolation { .. })));

    let small = ToroidSpec { principal_diameter: 19e-6, minor_diameter: 350e-9 };
    let large = ToroidSpec { principal_diameter: 38e-6, ..small };
    let rs = microtoroid_rate(&small, &b.fiber, &b.atom, &b.vapor, w).unwrap().rate;
    let rl = microtoroid_rate(&large, &b.fiber, &b.atom, &b.vapor, w).unwrap().rate;
    assert!(rel(rs, 2.0 * rl) < 1e-6);
    // same cross-section as the straight benchmark fiber, shorter ring
    let fiber = b.rate();
    assert!(rel(rs, fiber * b.fiber.length / small.circumference()) < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rates_are_positive_and_entangled_beats_mono_when_narrow(det in 1.0f64..6.0, frac in 0.1f64..0.3) {
        let ent = bench(PairKind::Entangled, det, det * frac);
        let engine = ent.engine();
        let e = engine.total_rate(&ent.atom, &ent.pair, &ent.vapor).unwrap();
        prop_assert!(e.rate > 0.0 && e.rate_azimuthal_average > 0.0);
        let mono = PhotonPairSpec { kind: PairKind::Monochromatic, ..ent.pair };
        let m = engine.total_rate(&ent.atom, &mono, &ent.vapor).unwrap().rate;
        let factor = rate_ratio_factor(ent.fiber.length, engine.velocity(), ent.pair.sigma);
        // Lσ/(u√π) ≫ 1 here, so the entangled rate wins
        prop_assert!(factor > 1.0);
        prop_assert!(e.rate > m);
    }

    #[test]
    fn per_atom_rate_falls_off_radially(det in 0.5f64..6.0) {
        let b = bench(PairKind::Monochromatic, det, 1.0);
        let report = b.engine().total_rate(&b.atom, &b.pair, &b.vapor).unwrap();
        for phi_idx in 0..3 {
            let col: Vec<f64> = report.per_atom_rate_map.iter().skip(phi_idx).step_by(3).map(|s| s.rate).collect();
            prop_assert!(col.windows(2).all(|w| w[1] < w[0]));
        }
    }
}
