use std::sync::Arc;

use proptest::prelude::*;
use replicax_core::objectives::{
    finite_difference_gradient, make_gaussian_mixture, make_griewank, make_kde_objective, make_quadratic,
    make_rastrigin, regularize_quadratic, GaussianMixtureSpec, Objective, SharedObjective,
};
use replicax_core::optimizers::{
    exchange_offline, exchange_online, gd_step, run_seeded, ExchangeRule, Mode, RunConfig, Target,
};
use replicax_core::{Point, RngStream};

fn objectives() -> Vec<SharedObjective> {
    let mixture = GaussianMixtureSpec::grid25(11).unwrap();
    let (kde, _) = make_kde_objective(&mixture, 0.01, 10).unwrap();
    let quad: SharedObjective = Arc::new(make_quadratic(3).unwrap());
    vec![
        quad.clone(),
        Arc::new(make_rastrigin(2).unwrap()),
        Arc::new(make_rastrigin(5).unwrap()),
        Arc::new(make_griewank(4).unwrap()),
        Arc::new(make_gaussian_mixture(mixture).unwrap()),
        Arc::new(kde),
        Arc::new(regularize_quadratic(quad, 0.3).unwrap()),
    ]
}

fn point_in(obj: &dyn Objective, rng: &mut RngStream) -> Vec<f64> {
    let (lo, hi) = obj.region().unwrap_or((vec![-5.0; obj.dim()], vec![5.0; obj.dim()]));
    lo.iter().zip(&hi).map(|(l, h)| rng.uniform_in(l - 0.5, h + 0.5)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradients_match_central_differences(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        for obj in objectives() {
            let x = point_in(obj.as_ref(), &mut rng);
            let g = obj.gradient(&x);
            let fd = finite_difference_gradient(obj.as_ref(), &x, 1e-6);
            let scale = g.iter().map(|v| v.abs()).fold(1.0, f64::max);
            for (a, b) in g.iter().zip(&fd) {
                prop_assert!((a - b).abs() <= 1e-5 * scale, "{}: {a} vs {b}", obj.name());
            }
        }
    }

    #[test]
    fn offline_exchange_never_raises_the_exploiter(
        fx in -10.0f64..10.0, fy in -10.0f64..10.0, t0 in 0.0f64..1.0, copy in any::<bool>()
    ) {
        let rule = if copy { ExchangeRule::Copy } else { ExchangeRule::Swap };
        let e = exchange_offline(fx, fy, t0, rule, ("x", fx), ("y", fy));
        prop_assert!(e.x.1 <= fx);
        prop_assert_eq!(e.swapped, fy < fx - t0 || fx - fy > t0);
        match (e.swapped, rule) {
            (false, _) => prop_assert_eq!((e.x.0, e.y.0), ("x", "y")),
            (true, ExchangeRule::Swap) => prop_assert_eq!((e.x.0, e.y.0), ("y", "x")),
            (true, ExchangeRule::Copy) => prop_assert_eq!((e.x.0, e.y.0), ("y", "y")),
        }
    }

    #[test]
    fn online_exchange_respects_the_radius(
        fx in -1.0f64..1.0, fy in -1.0f64..1.0, ax in 0.0f64..10.0, ay in 0.0f64..10.0
    ) {
        let x = vec![ax, 0.0];
        let y = vec![0.0, ay];
        let e = exchange_online(fx, fy, 0.05, Some(5.0), ExchangeRule::Swap, x, y);
        if ax > 5.0 || ay > 5.0 {
            prop_assert!(!e.swapped);
        } else {
            prop_assert_eq!(e.swapped, fx - fy > 0.05);
        }
    }

    #[test]
    fn gd_contracts_the_quadratic_exactly(x in prop::collection::vec(-5.0f64..5.0, 1..6), h in 0.01f64..1.0) {
        let q = make_quadratic(x.len()).unwrap();
        let p = Point::new(x.clone()).unwrap();
        let next = gd_step(&q, &p, h).unwrap();
        for (a, b) in next.coords().iter().zip(&x) {
            prop_assert!((a - (1.0 - h) * b).abs() <= 1e-15 * b.abs().max(1.0));
        }
    }

    #[test]
    fn coupled_offline_runs_descend_monotonically(seed in 0u64..1000, noswap in any::<bool>()) {
        let obj = make_gaussian_mixture(GaussianMixtureSpec::grid25(seed % 40).unwrap()).unwrap();
        let mode = if noswap { Mode::Ngdxld } else { Mode::Gdxld };
        let cfg = RunConfig::new(mode, 0.05, 1.0, 400, Point::new(vec![0.0, 0.0]).unwrap())
            .with_y0(Point::new(vec![1.0, 1.0]).unwrap())
            .with_seed(seed);
        let t = run_seeded(Target::Exact(&obj), &cfg).unwrap();
        let mut prev = t.start_f;
        for r in &t.records {
            prop_assert!(r.f_x <= prev, "rise at n={}: {} > {}", r.n, r.f_x, prev);
            prev = r.f_x;
        }
    }
}

#[test]
fn runs_are_reproducible_and_seed_sensitive() {
    let obj = make_rastrigin(3).unwrap();
    let cfg = RunConfig::new(Mode::Gdxld, 0.001, 5.0, 300, Point::new(vec![2.0, -1.0, 0.5]).unwrap()).with_seed(4);
    let a = run_seeded(Target::Exact(&obj), &cfg).unwrap();
    let b = run_seeded(Target::Exact(&obj), &cfg).unwrap();
    assert_eq!(a, b);
    let c = run_seeded(Target::Exact(&obj), &cfg.clone().with_seed(5)).unwrap();
    assert_ne!(a.records, c.records);
}
