use std::collections::HashMap;

use proptest::prelude::*;
use rfim_lab::field::{GaussianSource, LazyField, Site};
use rfim_lab::polygrow::{
    accept, decode_flags, init_growth, replay, run, validate, GrowthMode, GrowthParams, GrowthState, ViolationKind,
};
use rfim_lab::Execution;

struct Overlay {
    base: LazyField,
    shift: HashMap<Site, f64>,
}

impl GaussianSource for Overlay {
    fn h(&self, v: Site) -> f64 {
        self.base.h(v) + self.shift.get(&v).copied().unwrap_or(0.0)
    }
}

fn wide(n: i64, seed: u64, delta: f64) -> GrowthParams {
    GrowthParams::new(n, 1.0, 0.5, seed, GrowthMode::LatticeSimplified).unwrap().with_delta(delta)
}

fn grown(params: GrowthParams, field: &impl GaussianSource) -> GrowthState {
    let mut s = init_growth(params);
    s.grow(field).unwrap();
    s
}

#[test]
fn honest_runs_at_default_delta_have_no_violations() {
    for seed in 0..20 {
        for eps in [0.2, 0.5, 1.0] {
            let p = GrowthParams::new(256, eps, 0.5, seed, GrowthMode::LatticeSimplified).unwrap();
            let r = run(&mut init_growth(p), &LazyField { seed }).unwrap();
            assert_eq!(r.sides(), 16);
            assert!(r.lattice_boundary as f64 <= 2f64.sqrt() * r.perimeter + 32.0);
        }
    }
}

#[test]
fn wide_triangles_get_accepted_and_stay_valid() {
    let mut accepted = 0;
    for seed in 0..30 {
        // Validate stage by stage; the full report would sum the field over the whole polygon.
        let field = LazyField { seed };
        let mut s = init_growth(wide(4096, seed, 0.1));
        while !s.is_finished() {
            let stage = s.stage();
            while s.stage() == stage {
                s.step(&field).unwrap();
            }
            assert_eq!(validate(&s), vec![]);
        }
        accepted += s.decisions().iter().filter(|d| d.z).count();
        let p = s.polygon();
        let n = p.len();
        assert!((0..n).all(|i| p[i].dist(p[(i + 1) % n]) >= 1.0));
    }
    assert!(accepted > 0);
}

#[test]
fn flag_replay_reconstructs_the_polygon() {
    for seed in 0..100 {
        let s = grown(wide(4096, seed, 0.1), &LazyField { seed });
        let flags: Vec<bool> = s.decisions().iter().map(|d| d.z).collect();
        assert_eq!(replay(&s.params, &flags).polygon(), s.polygon());
        assert_eq!(decode_flags(&s.params, &s.polygon(), flags.len()), flags);
    }
}

#[test]
fn forced_overlap_is_reported() {
    let p = wide(64, 0, 8.0).with_n_star(3);
    let mut s = init_growth(p);
    let field = LazyField { seed: 0 };
    for k in 0..20 {
        s.force(k != 2 && k != 3, &field);
    }
    let kinds: Vec<ViolationKind> = validate(&s).iter().map(|v| v.kind).collect();
    assert!(kinds.contains(&ViolationKind::TriangleOverlap));
    assert!(kinds.contains(&ViolationKind::OutsideBox));
}

#[test]
fn continuum_stage_gain_is_positive_on_average() {
    let (eps, n, seeds) = (0.5, 4096, 500);
    let stats = Execution::default().map(seeds, |seed| {
        let p = GrowthParams::new(n, eps, 0.5, seed as u64, GrowthMode::Continuum).unwrap();
        grown(p, &LazyField { seed: seed as u64 }).stage_stats().to_vec()
    });
    for k in 0..2 {
        let diffs: Vec<f64> = stats
            .iter()
            .map(|s| eps * (s[k + 1].field_gain - s[k].field_gain) - (s[k + 1].perimeter - s[k].perimeter))
            .collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        assert!(mean > 0.0, "stage {} mean increment {mean}", k + 1);
    }
}

#[test]
fn continuum_runs_validate() {
    for seed in 0..4 {
        let p = GrowthParams::new(4096, 0.5, 0.5, seed, GrowthMode::Continuum).unwrap();
        assert!(run(&mut init_growth(p), &LazyField { seed }).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decision_only_reads_the_inner_triangle(seed in 0u64..1000, noise in prop::collection::vec((-600i64..600, -600i64..600, -5.0f64..5.0), 1..40)) {
        let state = init_growth(wide(256, seed, 0.1));
        let pair = state.propose();
        let base = LazyField { seed };
        let shift: HashMap<Site, f64> = noise
            .into_iter()
            .map(|(x, y, d)| (Site::new(x, y), d))
            .filter(|(v, _)| !pair.t_star.contains(rfim_lab::geom::Point::new(v.x as f64, v.y as f64)))
            .collect();
        let z0 = accept(&state, &pair, &base).unwrap();
        let z1 = accept(&state, &pair, &Overlay { base, shift }).unwrap();
        prop_assert_eq!(z0, z1);
    }

    #[test]
    fn monotone_coupling(seed in 0u64..1000, picks in prop::collection::vec((0usize..64, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..3.0), 1..30)) {
        let base = LazyField { seed };
        let s = grown(wide(4096, seed, 0.1), &base);
        let flags: Vec<bool> = s.decisions().iter().map(|d| d.z).collect();
        let mut shift = HashMap::new();
        for (k, u, w, amount) in picks {
            let d = &s.decisions()[k % flags.len()];
            let [a, b, c] = d.pair.t_star.0;
            let (u, w) = if u + w > 1.0 { (1.0 - u, 1.0 - w) } else { (u, w) };
            let q = a + (b - a) * u + (c - a) * w;
            let v = Site::new(q.x.round() as i64, q.y.round() as i64);
            if d.pair.t_star.contains(rfim_lab::geom::Point::new(v.x as f64, v.y as f64)) {
                shift.insert(v, if d.z { amount } else { -amount });
            }
        }
        let again = grown(wide(4096, seed, 0.1), &Overlay { base, shift });
        let flags2: Vec<bool> = again.decisions().iter().map(|d| d.z).collect();
        prop_assert_eq!(flags, flags2);
    }
}
