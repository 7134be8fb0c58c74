use proptest::prelude::*;

use busyloss::analytic::{self, MarkovSpec};
use busyloss::simulator::{self, EventKind};
use busyloss::stats;
use busyloss::{ArrivalSource, RngStream, ServiceDistribution, SystemSpec};

fn service() -> impl Strategy<Value = ServiceDistribution> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|rate| ServiceDistribution::Exponential { rate }),
        (1u32..6, 0.2f64..5.0).prop_map(|(shape, rate)| ServiceDistribution::Erlang { shape, rate }),
        (0.1f64..3.0).prop_map(|value| ServiceDistribution::Deterministic { value }),
        (0.0f64..=1.0, 0.2f64..5.0, 0.2f64..5.0)
            .prop_map(|(p, rate1, rate2)| ServiceDistribution::HyperExponential { p, rate1, rate2 }),
    ]
}

fn representable() -> impl Strategy<Value = ServiceDistribution> {
    service().prop_filter("phase-type form", |d| {
        !matches!(d, ServiceDistribution::Deterministic { .. })
    })
}

fn system() -> impl Strategy<Value = SystemSpec> {
    (service(), 1u32..5, 0u32..5, 0.3f64..1.5).prop_map(|(s, m, n, rho)| {
        let rate = rho * m as f64 / s.mean().unwrap();
        SystemSpec::new(rate, s, m, n).unwrap()
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn analytic_identities(lambda in 0.05f64..6.0, mu in 0.05f64..4.0, m in 1u32..9, n in 0u32..9) {
        let spec = MarkovSpec::new(lambda, mu, m, n).unwrap();
        for j in 0..=m + n {
            let f = analytic::expected_level_crossings(&spec, j).unwrap();
            let b = analytic::expected_state_time(&spec, j).unwrap();
            prop_assert!(close(lambda * b, f, 1e-12));
            prop_assert!(close(analytic::martingale_normalisation(&spec, j).unwrap(), 1.0, 1e-10));
        }
        let inner = if m >= 2 {
            analytic::expected_busy_period(&MarkovSpec::new(lambda, mu, m - 1, 0).unwrap()).unwrap()
        } else {
            0.0
        };
        let t = analytic::expected_busy_period(&spec).unwrap();
        let kz = analytic::expected_orbital_count(&spec).unwrap()
            * analytic::expected_orbital_busy_period(&spec).unwrap();
        prop_assert!(close(t - inner, kz, 1e-10));
        // E T = sum_j E B(j)
        let sum: f64 = (0..=m + n).map(|j| analytic::expected_state_time(&spec, j).unwrap()).sum();
        prop_assert!(close(t, sum - 1.0 / lambda, 1e-10));
    }

    #[test]
    fn critical_losses_constant(m in 1u32..12, n in 0u32..30, mu in 0.1f64..5.0) {
        let spec = MarkovSpec::new(m as f64 * mu, mu, m, n).unwrap();
        let l = analytic::expected_losses_markov(&spec).unwrap();
        prop_assert!(close(l, analytic::critical_loss_constant(m), 1e-12));
    }

    #[test]
    fn phase_type_mean_agrees(d in representable()) {
        let ph = d.as_phase_type().unwrap();
        prop_assert!((ph.mean().unwrap() - d.mean().unwrap()).abs() <= 1e-10 * d.mean().unwrap().max(1.0));
    }

    #[test]
    fn sampling_is_pure(d in service(), seed in any::<u64>(), idx in any::<u64>()) {
        let s = RngStream::new(seed, idx);
        let (mut a, mut b) = (s.generator(), s.generator());
        for _ in 0..8 {
            let x = d.sample(&mut a);
            prop_assert!(x > 0.0 && x.is_finite());
            prop_assert_eq!(x.to_bits(), d.sample(&mut b).to_bits());
        }
    }

    #[test]
    fn mean_ci_permutation_invariant(xs in prop::collection::vec(-1e6f64..1e6, 2..200), seed in any::<u64>()) {
        let mut shuffled = xs.clone();
        // Fisher-Yates with a SplitMix sequence
        let mut state = seed;
        for i in (1..shuffled.len()).rev() {
            let j = (busyloss::rng::splitmix64(&mut state) % (i as u64 + 1)) as usize;
            shuffled.swap(i, j);
        }
        let a = stats::mean_ci(&xs, 0.99).unwrap();
        let b = stats::mean_ci(&shuffled, 0.99).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a.variance >= 0.0);
        prop_assert!((a.half_width - stats::z_value(0.99).unwrap() * (a.variance / a.count as f64).sqrt()).abs() <= 1e-12 * a.half_width.max(1.0));
    }

    #[test]
    fn dominance_reflexive(xs in prop::collection::vec(-100f64..100.0, 1..300)) {
        let v = stats::stochastic_dominance(&xs, &xs, 0.0);
        prop_assert!(v.holds);
        prop_assert!(v.max_violation <= 0.0);
    }

    #[test]
    fn dominance_implies_mean_order(
        a in prop::collection::vec(-10f64..10.0, 1..100),
        b in prop::collection::vec(-10f64..10.0, 1..100),
        shift in 0f64..5.0,
    ) {
        let upper: Vec<f64> = a.iter().map(|x| x + shift).collect();
        let v = stats::stochastic_dominance(&upper, &b, 0.0);
        prop_assert_eq!(v.holds, v.max_violation <= 0.0);
        if v.holds {
            let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
            prop_assert!(mean(&upper) >= mean(&b) - 1e-9);
        }
    }

    #[test]
    fn busy_period_record_invariants(spec in system(), seed in any::<u64>(), idx in 0u64..1000) {
        let source = ArrivalSource::Poisson { rate: spec.arrival_rate };
        let mut trace = Vec::new();
        let r = simulator::simulate_busy_period_traced(&spec, &source, &RngStream::new(seed, idx), &mut trace).unwrap();
        let m = spec.servers as usize;
        let cap = spec.capacity();
        prop_assert_eq!(r.level_crossings.len(), cap + 1);
        prop_assert_eq!(r.time_in_state.len(), cap + 1);

        let total: f64 = r.time_in_state.iter().sum();
        prop_assert!((total - r.duration).abs() <= 1e-9 * r.duration.max(1.0));
        prop_assert_eq!(r.time_in_state[0], 0.0);
        prop_assert!(r.time_in_state[m - 1] <= r.duration);
        prop_assert_eq!(r.crossings(1), 1);
        prop_assert_eq!(r.losses, r.crossings(cap + 1));
        prop_assert_eq!(r.served + r.losses, r.arrivals());
        prop_assert_eq!(r.orbital_count, r.crossings(m));
        prop_assert_eq!(r.orbital_losses.iter().sum::<u64>(), r.losses);
        prop_assert_eq!(r.orbital_losses.len() as u64, r.orbital_count);
        prop_assert_eq!(r.orbital_durations.len() as u64, r.orbital_count);
        let orbital: f64 = r.orbital_durations.iter().sum();
        prop_assert!(orbital <= r.duration * (1.0 + 1e-12));
        if spec.waiting_places > 0 {
            prop_assert_eq!(r.queueing_period_count, r.crossings(m + 1));
        } else {
            prop_assert_eq!(r.queueing_period_count, 0);
        }

        // Up and down crossings of every level balance.
        let mut up = vec![0u64; cap + 1];
        let mut down = vec![0u64; cap + 1];
        for e in &trace {
            match e.kind {
                EventKind::Arrival => up[e.occupancy] += 1,
                EventKind::Departure => down[e.occupancy + 1] += 1,
                EventKind::Loss => prop_assert_eq!(e.occupancy, cap),
            }
        }
        prop_assert_eq!(&up[1..], &down[1..]);
        for j in 1..=cap {
            prop_assert_eq!(up[j], r.crossings(j));
        }
        prop_assert_eq!(trace.last().map(|e| e.occupancy), Some(0));
    }

    #[test]
    fn replications_ignore_worker_count(spec in system(), seed in any::<u64>()) {
        let one = simulator::with_workers(1, || simulator::run_replications(&spec, 64, seed)).unwrap().unwrap();
        let four = simulator::with_workers(4, || simulator::run_replications(&spec, 64, seed)).unwrap().unwrap();
        prop_assert_eq!(&one, &four);
        let first = simulator::simulate_busy_period(&spec, &ArrivalSource::Poisson { rate: spec.arrival_rate }, &RngStream::new(seed, 0)).unwrap();
        prop_assert_eq!(&one[0], &first);
    }
}

#[test]
fn ks_distance_of_closed_form_variants() {
    let variants = [
        ServiceDistribution::Exponential { rate: 1.7 },
        ServiceDistribution::Erlang { shape: 3, rate: 2.0 },
        ServiceDistribution::HyperExponential { p: 0.3, rate1: 1.0, rate2: 5.0 },
        ServiceDistribution::HyperExponential { p: 0.9, rate1: 1.8, rate2: 0.2 },
        ServiceDistribution::Deterministic { value: 1.3 },
        ServiceDistribution::PhaseType(busyloss::PhaseType {
            initial: vec![0.6, 0.4],
            subgenerator: vec![vec![-2.0, 1.0], vec![0.5, -1.5]],
        }),
    ];
    for (i, d) in variants.iter().enumerate() {
        let mut rng = RngStream::new(2024, i as u64).generator();
        let xs: Vec<f64> = (0..100_000).map(|_| d.sample(&mut rng)).collect();
        let ks = stats::ks_distance(&xs, |x| d.cdf(x));
        assert!(ks <= 0.01, "{d}: KS {ks}");
    }
}

#[test]
fn erlang_sample_mean() {
    let d = ServiceDistribution::Erlang { shape: 2, rate: 4.0 };
    let mut rng = RngStream::new(5, 0).generator();
    let n = 1_000_000;
    let mean = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
    assert!((mean - 0.5).abs() < 0.002, "{mean}");
}
