use proptest::prelude::*;
use rfim_lab::exec::Execution;
use rfim_lab::field::{sample_field, ExternalField, Site, SiteSet};
use rfim_lab::ising::{
    delta_free_energy, gamma, gibbs_exact, ground_state, hamiltonian, magnetization_samples, Bc, Beta, Region,
    SpinConfig,
};

/// `H^{bc}` written out pair by pair.
fn energy(sites: &[Site], spins: &[i8], bc: f64, f: &dyn Fn(Site) -> f64) -> f64 {
    let spin = |v: Site| sites.iter().position(|&u| u == v).map(|i| f64::from(spins[i]));
    let mut h = 0.0;
    for (i, &u) in sites.iter().enumerate() {
        let s = f64::from(spins[i]);
        for v in u.neighbors() {
            h -= match spin(v) {
                Some(t) => 0.5 * s * t,
                None => bc * s,
            };
        }
        h -= f(u) * s;
    }
    h
}

fn configs(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0u32..1 << n).map(move |m| (0..n).map(|i| if m >> i & 1 == 1 { 1 } else { -1 }).collect())
}

/// `(F, ⟨σ_v⟩)` from the partition function, accumulated with log-sum-exp.
fn gibbs_oracle(sites: &[Site], bc: f64, beta: f64, f: &dyn Fn(Site) -> f64) -> (f64, Vec<f64>) {
    let all: Vec<(Vec<i8>, f64)> = configs(sites.len()).map(|s| {
        let e = energy(sites, &s, bc, f);
        (s, e)
    }).collect();
    let min = all.iter().map(|(_, e)| *e).fold(f64::INFINITY, f64::min);
    let z: f64 = all.iter().map(|(_, e)| (-beta * (e - min)).exp()).sum();
    let mags = (0..sites.len())
        .map(|i| all.iter().map(|(s, e)| f64::from(s[i]) * (-beta * (e - min)).exp()).sum::<f64>() / z)
        .collect();
    (min - z.ln() / beta, mags)
}

fn domain() -> impl Strategy<Value = SiteSet> {
    prop::collection::btree_set((-2i64..=2, -2i64..=2), 1..9)
        .prop_map(|s| s.into_iter().map(|(x, y)| Site::new(x, y)).collect())
}

fn beta_grid() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.3, 1.0, 2.5])
}

#[test]
fn zero_field_plus_ground_state_is_all_plus() {
    let zero = |_: Site| 0.0;
    for bc in [Bc::Plus, Bc::Minus] {
        let gs = ground_state(&Region::square(3, bc), &zero);
        assert!(gs.spins().iter().all(|&s| f64::from(s) == bc.sign()));
        assert_eq!(gs.energy(), -(2.0 * 7.0 * 6.0 + 4.0 * 7.0));
    }
}

#[test]
fn magnetizations_do_not_depend_on_workers() {
    let seq = magnetization_samples(3, 0.8, Beta::Infinite, 12, 9, Execution::Sequential).unwrap();
    for workers in [0, 2, 4] {
        let par = magnetization_samples(3, 0.8, Beta::Infinite, 12, 9, Execution::with_workers(workers)).unwrap();
        assert_eq!(par, seq);
    }
    let exact = magnetization_samples(1, 0.8, Beta::Finite(1.0), 4, 9, Execution::Sequential).unwrap();
    assert!(exact.iter().all(|s| s.m_plus >= s.m_minus));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ground_state_is_the_enumerated_minimum(omega in domain(), seed in any::<u64>(), eps in 0.0f64..3.0) {
        let field = sample_field(2, seed, eps);
        let f = |v: Site| field.f(v);
        let sites: Vec<Site> = omega.iter().collect();
        for bc in [Bc::Plus, Bc::Minus] {
            let region = Region::new(omega.clone(), bc);
            let gs = ground_state(&region, &field);
            let min = configs(sites.len()).map(|s| energy(&sites, &s, bc.sign(), &f)).fold(f64::INFINITY, f64::min);
            prop_assert!((gs.energy() - min).abs() < 1e-9);
            prop_assert!((hamiltonian(&gs, &region, &field).unwrap() - min).abs() < 1e-9);
        }
    }

    #[test]
    fn hamiltonian_matches_pairwise_sum(omega in domain(), seed in any::<u64>(), mask in any::<u32>()) {
        let field = sample_field(2, seed, 1.3);
        let f = |v: Site| field.f(v);
        let sites: Vec<Site> = omega.iter().collect();
        let spins: Vec<i8> = (0..sites.len()).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
        for bc in [Bc::Plus, Bc::Minus] {
            let region = Region::new(omega.clone(), bc);
            let cfg = SpinConfig::from_fn(&region, &field, |v| spins[sites.iter().position(|&u| u == v).unwrap()]);
            prop_assert!((cfg.energy() - energy(&sites, &spins, bc.sign(), &f)).abs() < 1e-9);
            // Global flip with reversed field and boundary leaves H unchanged.
            let flipped = energy(&sites, &spins.iter().map(|s| -s).collect::<Vec<_>>(), -bc.sign(), &|v| -f(v));
            prop_assert!((cfg.energy() - flipped).abs() < 1e-9);
        }
    }

    #[test]
    fn gibbs_matches_partition_function(omega in domain(), seed in any::<u64>(), beta in beta_grid()) {
        let field = sample_field(2, seed, 1.0);
        let f = |v: Site| field.f(v);
        let g = gibbs_exact(Beta::Finite(beta), &omega, &field).unwrap();
        let sites: Vec<Site> = omega.iter().collect();
        let (fp, mp) = gibbs_oracle(&sites, 1.0, beta, &f);
        let (fm, mm) = gibbs_oracle(&sites, -1.0, beta, &f);
        prop_assert!((g.free_energy_plus - fp).abs() < 1e-9);
        prop_assert!((g.free_energy_minus - fm).abs() < 1e-9);
        for (i, &v) in sites.iter().enumerate() {
            prop_assert!((g.magnetization_plus_at(v).unwrap() - mp[i]).abs() < 1e-9);
            prop_assert!((g.magnetization_minus_at(v).unwrap() - mm[i]).abs() < 1e-9);
            prop_assert!(mp[i] >= mm[i] - 1e-12);
        }
    }

    #[test]
    fn free_energy_difference_is_odd_and_bounded(omega in domain(), seed in any::<u64>(), beta in beta_grid()) {
        let field = sample_field(2, seed, 1.5);
        let neg = |v: Site| -field.f(v);
        for b in [Beta::Finite(beta), Beta::Infinite] {
            let d = delta_free_energy(b, &omega, &field).unwrap();
            let d_neg = delta_free_energy(b, &omega, &neg).unwrap();
            prop_assert!((d + d_neg).abs() < 1e-9);
            prop_assert!(d.abs() <= 2.0 * omega.boundary_size() as f64 + 1e-9);
        }
    }

    #[test]
    fn low_temperature_approaches_ground_energies(omega in domain(), seed in any::<u64>()) {
        let field = sample_field(2, seed, 1.0);
        let cold = delta_free_energy(Beta::Finite(200.0), &omega, &field).unwrap();
        let ground = delta_free_energy(Beta::Infinite, &omega, &field).unwrap();
        // |F_β − E_min| ≤ ln(2^n)/β for each boundary condition.
        prop_assert!((cold - ground).abs() <= 2.0 * omega.len() as f64 * 2f64.ln() / 200.0 + 1e-9);
    }

    #[test]
    fn gamma_of_everything_is_zero(omega in domain(), seed in any::<u64>()) {
        let field = sample_field(2, seed, 1.0);
        prop_assert_eq!(gamma(&omega, &omega, &field, Beta::Finite(1.0)).unwrap(), 0.0);
        let outside: SiteSet = [Site::new(5, 5)].into_iter().collect();
        prop_assert!(gamma(&outside, &omega, &field, Beta::Infinite).is_err());
    }
}
