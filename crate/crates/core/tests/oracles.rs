mod common;

use approx::assert_relative_eq;
use common::{exact_star, random_riemann, rng, Primitive};
use kinrel::endstate::ConeDirection;
use kinrel::eos::EosSpec;
use kinrel::riemann::hugoniot::{kinetic_hugoniot, HugoniotOptions};
use kinrel::riemann::kinetic::{Side, TravelingWaveKinetic, ZeroKinetic};
use kinrel::riemann::mp_euler::{sample, solve_riemann_mp_euler, FluidState, RiemannOptions, WaveKind};
use kinrel::riemann::system::{ClassicalEuler, MultiPressureEuler};

fn state(eos: &EosSpec, k: Primitive) -> FluidState {
    FluidState::from_pressures(eos, k.rho, k.u, &[k.p]).unwrap()
}

/// Classical 1-shock behind `(ρ0, u0, p0)` moving at `Λ`.
fn classical_shock(gamma: f64, k: Primitive, lambda: f64) -> Primitive {
    let c = (gamma * k.p / k.rho).sqrt();
    let mach = (k.u - lambda) / c;
    let ratio = ((gamma - 1.0) * mach * mach + 2.0) / ((gamma + 1.0) * mach * mach);
    let m = k.rho * (k.u - lambda);
    let (t0, t1) = (1.0 / k.rho, ratio / k.rho);
    Primitive { rho: 1.0 / t1, u: k.u - m * (t0 - t1), p: k.p + m * m * (t0 - t1) }
}

#[test]
fn exact_oracle_reproduces_sod() {
    let l = Primitive { rho: 1.0, u: 0.0, p: 1.0 };
    let r = Primitive { rho: 0.125, u: 0.0, p: 0.1 };
    let (p, u) = exact_star(1.4, l, r);
    assert_relative_eq!(p, 0.303_130_178_050_64, max_relative = 1e-12);
    assert_relative_eq!(u, 0.927_452_620_048_95, max_relative = 1e-12);
}

#[test]
fn single_species_matches_exact_euler_solver() {
    let mut g = rng(11);
    let eos = EosSpec::uniform(1, 1.4, 1.0).unwrap();
    let a = ConeDirection::new(vec![1.0]).unwrap();
    for _ in 0..4 {
        let (l, r) = random_riemann(&mut g, 1.4);
        let fan =
            solve_riemann_mp_euler(&eos, &state(&eos, l), &state(&eos, r), &a, &a, &RiemannOptions::default()).unwrap();
        let (p, u) = exact_star(1.4, l, r);
        assert_relative_eq!(fan.p_star, p, max_relative = 1e-9);
        assert!((fan.u_star - u).abs() <= 1e-9 * u.abs().max(1e-3), "{} vs {u}", fan.u_star);
        // Star densities follow from the wave type on each side.
        for (w, k, star) in [(&fan.waves[0], l, &fan.star_left), (&fan.waves[2], r, &fan.star_right)] {
            let expected = match w.kind {
                WaveKind::Shock => {
                    let (g1, q) = (2.4 / 0.4, p / k.p);
                    k.rho * (q + 1.0 / g1) / (q / g1 + 1.0)
                }
                _ => k.rho * (p / k.p).powf(1.0 / 1.4),
            };
            assert_relative_eq!(star.rho, expected, max_relative = 1e-9);
        }
    }
}

#[test]
fn sampled_fan_is_piecewise_consistent() {
    let eos = EosSpec::uniform(1, 1.4, 1.0).unwrap();
    let a = ConeDirection::new(vec![1.0]).unwrap();
    let l = Primitive { rho: 1.0, u: 0.0, p: 1.0 };
    let r = Primitive { rho: 0.125, u: 0.0, p: 0.1 };
    let fan =
        solve_riemann_mp_euler(&eos, &state(&eos, l), &state(&eos, r), &a, &a, &RiemannOptions::default()).unwrap();
    // Inside the rarefaction the 1-Riemann invariant u + 2c/(γ-1) is constant.
    let inv = |st: &FluidState| st.u + 5.0 * st.sound_speed(&eos);
    let w = &fan.waves[0];
    for k in 1..10 {
        let xi = w.speed_tail + (w.speed_head - w.speed_tail) * k as f64 / 10.0;
        let st = sample(&eos, &fan, xi).unwrap();
        assert_relative_eq!(inv(&st), inv(&w.left), max_relative = 1e-10);
    }
    assert_eq!(sample(&eos, &fan, -10.0).unwrap(), w.left);
    assert_eq!(sample(&eos, &fan, 10.0).unwrap(), fan.waves[2].right);
}

#[test]
fn zero_kinetic_function_gives_classical_shocks() {
    let sys = ClassicalEuler { gamma: 1.4 };
    let kin = ZeroKinetic::first(3);
    let k = Primitive { rho: 1.3, u: 0.2, p: 0.8 };
    let u0 = sys.conserved(k.rho, k.u, k.p);
    let c = (1.4 * k.p / k.rho).sqrt();
    for d in [0.01, 0.1, 0.5, 1.0] {
        let lambda = k.u - c - d;
        let pt = kinetic_hugoniot(&sys, &kin, &u0, lambda, &HugoniotOptions::default()).unwrap();
        let want = classical_shock(1.4, k, lambda);
        let got = sys.conserved(want.rho, want.u, want.p);
        for i in 0..3 {
            assert!((pt.u1[i] - got[i]).abs() <= 1e-10 * got.norm(), "component {i}");
        }
    }
}

#[test]
fn traveling_wave_kinetics_conserve_energy_for_one_species() {
    // With one species the kinetic relation is exactly energy conservation.
    let eos = EosSpec::uniform(1, 1.4, 1.0).unwrap();
    let sys = MultiPressureEuler::new(eos.clone());
    let kin = TravelingWaveKinetic::new(eos.clone(), ConeDirection::new(vec![1.0]).unwrap(), Side::First);
    let k = Primitive { rho: 1.0, u: 0.0, p: 1.0 };
    let st = state(&eos, k);
    let u0 = st.conserved();
    let c = st.sound_speed(&eos);
    for d in [0.02, 0.2, 0.8] {
        let lambda = -c - d;
        let pt = kinetic_hugoniot(&sys, &kin, &u0, lambda, &HugoniotOptions::default()).unwrap();
        let (rho, u, w) = sys.decode(&nalgebra::DVector::from_vec(pt.u1.clone()));
        let want = classical_shock(1.4, k, lambda);
        assert_relative_eq!(rho, want.rho, max_relative = 1e-10);
        assert_relative_eq!(u, want.u, max_relative = 1e-10);
        assert_relative_eq!(eos.pressure(&w), want.p, max_relative = 1e-10);
    }
}
