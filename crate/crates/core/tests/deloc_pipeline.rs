use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treewave_core::deloc::{
    correlation, greedy_mass_set, obstruction_report, pointwise_budget, spectral_lower_bound,
};
use treewave_core::eigen::{eigendecompose, EigenConfig, EigenSelection};
use treewave_core::graph::kernel_apply;
use treewave_core::synth::synthesize;
use treewave_core::treekernel::{cheby_to_radial, spherical_transform};
use treewave_core::{
    EigenPair, RegularGraph, SpectralPoint, SynthesisConfig, SynthesisParams, TreeBall,
};

// Shortest cycle through some vertex, as one of its edges, if shorter than `limit`.
fn short_cycle_edge(g: &[Vec<usize>], limit: usize) -> Option<(usize, usize)> {
    let n = g.len();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    for s in 0..n {
        let mut touched = vec![s];
        let mut queue = std::collections::VecDeque::from([s]);
        dist[s] = 0;
        let mut found = None;
        'bfs: while let Some(u) = queue.pop_front() {
            if 2 * dist[u] + 1 >= limit {
                break;
            }
            for &w in &g[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    touched.push(w);
                    queue.push_back(w);
                } else if parent[u] != w && dist[u] + dist[w] + 1 < limit {
                    found = Some((u, w));
                    break 'bfs;
                }
            }
        }
        for v in touched {
            dist[v] = usize::MAX;
            parent[v] = usize::MAX;
        }
        if found.is_some() {
            return found;
        }
    }
    None
}

// Random 3-regular graph with girth at least `girth`, by repeated edge switches.
fn high_girth_graph(n: usize, girth: usize, seed: u64) -> RegularGraph {
    let g0 = RegularGraph::random_regular(2, n, seed).unwrap();
    let mut nbrs: Vec<Vec<usize>> = (0..n)
        .map(|v| g0.adjacency().neighbors(v).to_vec())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100_000 {
        let Some((a, b)) = short_cycle_edge(&nbrs, girth) else {
            let edges: Vec<_> = (0..n)
                .flat_map(|u| {
                    nbrs[u]
                        .iter()
                        .filter(move |&&w| u < w)
                        .map(move |&w| (u, w))
                })
                .collect();
            return RegularGraph::from_edges(n, &edges).unwrap();
        };
        let c = rng.gen_range(0..n);
        let d = nbrs[c][rng.gen_range(0..3)];
        if [a, b].contains(&c)
            || [a, b].contains(&d)
            || nbrs[a].contains(&c)
            || nbrs[b].contains(&d)
        {
            continue;
        }
        // ab, cd -> ac, bd
        let swap = |list: &mut Vec<usize>, old: usize, new: usize| {
            *list.iter_mut().find(|x| **x == old).unwrap() = new;
        };
        swap(&mut nbrs[a], b, c);
        swap(&mut nbrs[b], a, d);
        swap(&mut nbrs[c], d, a);
        swap(&mut nbrs[d], c, b);
    }
    panic!("edge switching did not reach girth {girth}");
}

#[test]
fn obstruction_within_girth() {
    let g = high_girth_graph(600, 9, 1);
    assert!(g.girth().unwrap() >= 9);
    let pairs = eigendecompose(&g, EigenSelection::Largest(1), &EigenConfig::default()).unwrap();
    let top = &pairs[0];
    assert!(top.spectral.at_trivial_endpoint());
    let config = SynthesisConfig::default();
    let report = obstruction_report(&g, top, 0.6, 6, &config).unwrap();
    assert_eq!(report.certificate.support_radius, 4);
    assert!(report.girth_ok);
    assert!(report.hypothesis_met);
    assert_eq!(report.obstruction_holds, Some(true));
    assert_eq!(report.c_pair, 1.0);
    let lower = report.spectral_lower.unwrap();
    assert!(lower > 0.36);
    assert!(report.pair_weight * report.sup_bound >= lower - 1e-8);
    assert!(report.squeeze_holds);
    assert_eq!(report.cells_ok, Some(true));
}

#[test]
fn correlation_matches_spectral_expansion() {
    let g = RegularGraph::random_regular(2, 150, 9).unwrap();
    let pairs = eigendecompose(&g, EigenSelection::All, &EigenConfig::default()).unwrap();
    let config = SynthesisConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let idx = rng.gen_range(1..150);
        let phi = &pairs[idx].vector;
        let (k, _) = synthesize(
            &SynthesisParams {
                p: 2,
                depth: 40,
                eta: 0.5,
                target: SpectralPoint::tempered(2, 0.0).unwrap(),
            },
            &config,
        )
        .unwrap();
        let set = greedy_mass_set(phi, 0.5).unwrap();
        let f = set.mask(phi);
        let expansion: f64 = pairs
            .iter()
            .map(|q| {
                let c: f64 = f.iter().zip(&q.vector).map(|(a, b)| a * b).sum();
                spherical_transform(&k, &q.spectral) * c * c
            })
            .sum();
        let direct = correlation(&g, &k, phi, &set).unwrap();
        assert!((direct - expansion).abs() < 1e-8, "{direct} vs {expansion}");
    }
}

#[test]
fn greedy_set_is_minimal_on_large_graph() {
    let g = RegularGraph::random_regular(2, 1000, 3).unwrap();
    let pairs = eigendecompose(&g, EigenSelection::Largest(40), &EigenConfig::default()).unwrap();
    let phi = &pairs[37].vector;
    let set = greedy_mass_set(phi, 0.5).unwrap();
    assert!(set.mass > 0.5);
    // No set of size |E|−1 can carry more than the |E|−1 largest squares.
    let mut sq: Vec<f64> = phi.iter().map(|x| x * x).collect();
    sq.sort_by(|a, b| b.total_cmp(a));
    assert!(sq[..set.len() - 1].iter().sum::<f64>() <= 0.5);
}

#[test]
fn tree_ball_pipeline() {
    // Not a regular graph, so the report is assembled by hand on the ball.
    let ball = TreeBall::new(2, 6);
    let basis: Vec<(f64, Vec<f64>)> = ball.eigenpairs().collect();
    let adj = ball.adjacency();
    // At η = 0.9 the default window constant leaves no room below the support cap.
    let config = SynthesisConfig {
        window_c: 0.05,
        ..SynthesisConfig::default()
    };
    let eta = 0.9;
    let mut checked = 0;
    for (lambda, v) in &basis {
        let s = SpectralPoint::from_eigenvalue(2, *lambda).unwrap();
        let Ok((k, cert)) = synthesize(
            &SynthesisParams {
                p: 2,
                depth: 60,
                eta,
                target: s,
            },
            &config,
        ) else {
            continue;
        };
        let set = greedy_mass_set(v, eta).unwrap();
        let f = set.mask(v);
        let kf = kernel_apply(adj, 2, (&k).into(), &f).unwrap();
        let corr: f64 = kf.iter().zip(&f).map(|(a, b)| a * b).sum();
        let expansion: f64 = basis
            .iter()
            .map(|(mu, w)| {
                let c: f64 = f.iter().zip(w).map(|(a, b)| a * b).sum();
                spherical_transform(&k, &SpectralPoint::from_eigenvalue(2, *mu).unwrap()) * c * c
            })
            .sum();
        assert!((corr - expansion).abs() < 1e-8);
        let lower = spectral_lower_bound(cert.target_value, set.mass, eta).unwrap();
        assert!(corr >= lower - 1e-8, "λ={lambda}: {corr} < {lower}");
        assert!(lower > eta * eta);
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn localized_vector_is_flagged() {
    let g = RegularGraph::random_regular(2, 300, 4).unwrap();
    let mut v = vec![0.0; 300];
    v[10] = 1.0;
    for &w in g.adjacency().neighbors(10) {
        v[w] = 0.3;
    }
    let pair = EigenPair::from_rayleigh(&g, v).unwrap();
    let report = obstruction_report(&g, &pair, 0.5, 40, &SynthesisConfig::default()).unwrap();
    assert!(!report.hypothesis_met);
    assert!(report.spectral_lower.is_none());
    assert!(report.cell_bound.is_none());
    assert!(report.eigen_residual > 1e-3);
    assert!(report.correlation.abs() <= report.pointwise_budget + 1e-8);
}

#[test]
fn budget_bounds_correlation_for_random_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = RegularGraph::random_regular(3, 120, 6).unwrap();
    let pairs = eigendecompose(&g, EigenSelection::All, &EigenConfig::default()).unwrap();
    for _ in 0..10 {
        let coeffs: Vec<f64> = (0..=12)
            .map(|n| {
                if n % 2 == 0 {
                    rng.gen_range(-1.0..1.0)
                } else {
                    0.0
                }
            })
            .collect();
        let k = treewave_core::ChebyKernel::new(3, coeffs).unwrap();
        let radial = cheby_to_radial(&k, 12).unwrap();
        let phi = &pairs[rng.gen_range(0..120)].vector;
        let set = greedy_mass_set(phi, rng.gen_range(0.1..0.9)).unwrap();
        let b = pointwise_budget(&g, &radial, phi, &set).unwrap();
        let c = correlation(&g, &k, phi, &set).unwrap();
        assert!(c.abs() <= b.value + 1e-10, "{c} > {}", b.value);
    }
}
