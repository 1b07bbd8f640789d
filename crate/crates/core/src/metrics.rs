//! Topology measurements.
//!
//! The interesting structure of a grown (and possibly attacked) network
//! lives in a handful of observables: the degree distribution and its
//! power-law exponent gamma, the average degree, the cluster-size
//! distribution of the fragments outside the giant cluster and its exponent
//! tau, the average clustering coefficient, and the giant-cluster fraction.
//!
//! Exponents come from least squares on log-log points. A fit is reported
//! with its standard error and r squared and is marked invalid rather than
//! guessed when fewer than three distinct abscissae survive the fitting
//! window.

use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};
use crate::stats::linear_regression;

/// Degree counts of the live nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHistogram {
    counts: BTreeMap<usize, usize>,
    nodes: usize,
}

impl DegreeHistogram {
    pub fn from_graph(g: &Graph) -> Result<Self> {
        if g.node_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for v in g.nodes() {
            *counts.entry(g.degree(v).unwrap()).or_insert(0) += 1;
        }
        Ok(DegreeHistogram {
            counts,
            nodes: g.node_count(),
        })
    }

    /// Number of nodes of degree `k`.
    pub fn count(&self, k: usize) -> usize {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    /// `(k, count)` pairs, ascending in `k`, zero counts omitted.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn max_degree(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Empirical probability of degree `k`.
    pub fn pk(&self, k: usize) -> f64 {
        self.count(k) as f64 / self.nodes as f64
    }

    /// `(k, P(k))` points with positive mass.
    pub fn points(&self) -> Vec<(usize, f64)> {
        self.iter().map(|(k, c)| (k, c as f64 / self.nodes as f64)).collect()
    }
}

pub fn degree_distribution(g: &Graph) -> Result<DegreeHistogram> {
    DegreeHistogram::from_graph(g)
}

/// Mean degree `2 E / N`.
pub fn average_degree(g: &Graph) -> Result<f64> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(2.0 * g.edge_count() as f64 / g.node_count() as f64)
}

/// Mean of the local clustering coefficient over all live nodes; nodes of
/// degree below 2 contribute 0.
pub fn average_clustering(g: &Graph) -> Result<f64> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let sum: f64 = g.nodes().map(|v| g.local_clustering(v).unwrap()).sum();
    Ok(sum / g.node_count() as f64)
}

/// Giant cluster size plus the multiset of the remaining cluster sizes.
///
/// The giant cluster is the largest connected component; among equals the
/// one containing the smallest node id wins. It is excluded from the
/// fragment statistics by identity, not by size, so a tie leaves the other
/// equally large component in `rest`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSizes {
    pub giant: usize,
    /// Non-giant cluster sizes, ascending.
    pub rest: Vec<usize>,
}

impl ClusterSizes {
    pub fn component_count(&self) -> usize {
        1 + self.rest.len()
    }

    /// `n(S)`: how many non-giant clusters have size `S`.
    pub fn size_counts(&self) -> BTreeMap<usize, usize> {
        let mut n = BTreeMap::new();
        for &s in &self.rest {
            *n.entry(s).or_insert(0) += 1;
        }
        n
    }
}

pub fn cluster_size_distribution(g: &Graph) -> Result<ClusterSizes> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let labels = connected_components(g);
    let giant_id = labels.giant().expect("nonempty graph has a giant");
    let giant = labels.sizes()[giant_id as usize];
    let mut rest: Vec<usize> = labels
        .sizes()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i as u32 != giant_id)
        .map(|(_, &s)| s)
        .collect();
    rest.sort_unstable();
    Ok(ClusterSizes { giant, rest })
}

/// Giant cluster size over live node count.
pub fn giant_fraction(g: &Graph) -> Result<f64> {
    let c = cluster_size_distribution(g)?;
    Ok(c.giant as f64 / g.node_count() as f64)
}

/// A power-law exponent estimate `y ~ x^(-exponent)` from least squares on
/// log-log points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub stderr: f64,
    pub r_squared: f64,
    /// Smallest and largest x actually used.
    pub fit_range: (usize, usize),
    pub n_points: usize,
    pub valid: bool,
}

impl PowerLawFit {
    pub fn invalid() -> Self {
        PowerLawFit {
            exponent: f64::NAN,
            stderr: f64::NAN,
            r_squared: f64::NAN,
            fit_range: (0, 0),
            n_points: 0,
            valid: false,
        }
    }
}

/// Fits `y ~ x^(-exponent)` to the points with `x_min <= x <= x_max` and
/// positive y. The x values are assumed distinct (histogram abscissae are).
/// Fewer than three usable points make the fit invalid.
pub fn fit_power_law(points: &[(usize, f64)], x_min: usize, x_max: usize) -> PowerLawFit {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x >= x_min.max(1) && x <= x_max && y > 0.0)
        .map(|&(x, y)| ((x as f64).ln(), y.ln()))
        .collect();
    if used.len() < 3 {
        return PowerLawFit::invalid();
    }
    let fit = match linear_regression(&used) {
        Some(f) => f,
        None => return PowerLawFit::invalid(),
    };
    let lo = used.iter().map(|&(x, _)| x).fold(f64::INFINITY, f64::min);
    let hi = used.iter().map(|&(x, _)| x).fold(f64::NEG_INFINITY, f64::max);
    PowerLawFit {
        exponent: -fit.slope,
        stderr: fit.slope_stderr,
        r_squared: fit.r_squared,
        fit_range: (lo.exp().round() as usize, hi.exp().round() as usize),
        n_points: used.len(),
        valid: true,
    }
}

/// Fitting windows for the two exponents.
///
/// Gamma is fitted on `P(k)` for `k` from the attachment count `m` up to
/// the largest degree still backed by at least `gamma_count_floor` nodes;
/// beyond that the histogram tail is single-sample noise. Tau is fitted on
/// the fragment-size counts `n(S)` from `S = 2` up to the largest size with
/// at least `tau_count_floor` fragments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsConfig {
    pub gamma_k_min: usize,
    pub gamma_k_max: Option<usize>,
    pub gamma_count_floor: usize,
    pub tau_s_min: usize,
    pub tau_s_max: Option<usize>,
    pub tau_count_floor: usize,
}

impl MetricsConfig {
    pub fn for_m(m: usize) -> Self {
        MetricsConfig {
            gamma_k_min: m,
            gamma_k_max: None,
            gamma_count_floor: 5,
            tau_s_min: 2,
            tau_s_max: None,
            tau_count_floor: 3,
        }
    }
}

/// Everything measured on one network.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub n: usize,
    pub avg_degree: f64,
    pub avg_clustering: f64,
    pub giant_fraction: f64,
    pub cluster_count: usize,
    pub gamma: PowerLawFit,
    pub tau: PowerLawFit,
    pub degree_histogram: DegreeHistogram,
    pub cluster_sizes: ClusterSizes,
}

pub fn compute_metrics(g: &Graph, cfg: &MetricsConfig) -> Result<MetricsReport> {
    let hist = degree_distribution(g)?;
    let clusters = cluster_size_distribution(g)?;

    let k_max = cfg.gamma_k_max.unwrap_or_else(|| {
        hist.iter()
            .filter(|&(_, c)| c >= cfg.gamma_count_floor)
            .map(|(k, _)| k)
            .last()
            .unwrap_or(0)
    });
    let gamma = fit_power_law(&hist.points(), cfg.gamma_k_min, k_max);

    let size_counts = clusters.size_counts();
    let tau_points: Vec<(usize, f64)> =
        size_counts.iter().map(|(&s, &c)| (s, c as f64)).collect();
    let s_max = cfg.tau_s_max.unwrap_or_else(|| {
        size_counts
            .iter()
            .filter(|&(_, &c)| c >= cfg.tau_count_floor)
            .map(|(&s, _)| s)
            .last()
            .unwrap_or(0)
    });
    let tau = fit_power_law(&tau_points, cfg.tau_s_min, s_max);

    Ok(MetricsReport {
        n: g.node_count(),
        avg_degree: average_degree(g)?,
        avg_clustering: average_clustering(g)?,
        giant_fraction: clusters.giant as f64 / g.node_count() as f64,
        cluster_count: clusters.component_count(),
        gamma,
        tau,
        degree_histogram: hist,
        cluster_sizes: clusters,
    })
}

/// Rescales `P(k)` by `2 m^2`: degree distributions grown with different
/// `m` then land on a common master curve.
pub fn collapse_degree_distribution(
    hist: &DegreeHistogram,
    m: usize,
) -> Result<Vec<(usize, f64)>> {
    if m == 0 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    let scale = 2.0 * (m * m) as f64;
    Ok(hist
        .points()
        .into_iter()
        .map(|(k, pk)| (k, pk / scale))
        .collect())
}

/// Kolmogorov-Smirnov distance between two positive curves, compared as
/// distributions over their shared x range.
///
/// Each curve is restricted to `[max(min_x), min(max_x)]`, normalized to
/// unit mass there, and the maximal absolute difference of the cumulative
/// sums is returned. `None` if the ranges do not overlap or either curve
/// has no mass on the overlap.
pub fn ks_distance(a: &[(usize, f64)], b: &[(usize, f64)]) -> Option<f64> {
    let range = |pts: &[(usize, f64)]| {
        let xs: Vec<usize> = pts.iter().filter(|&&(_, y)| y > 0.0).map(|&(x, _)| x).collect();
        Some((*xs.iter().min()?, *xs.iter().max()?))
    };
    let (alo, ahi) = range(a)?;
    let (blo, bhi) = range(b)?;
    let lo = alo.max(blo);
    let hi = ahi.min(bhi);
    if lo > hi {
        return None;
    }
    let restrict = |pts: &[(usize, f64)]| -> BTreeMap<usize, f64> {
        pts.iter()
            .filter(|&&(x, y)| x >= lo && x <= hi && y > 0.0)
            .map(|&(x, y)| (x, y))
            .collect()
    };
    let ra = restrict(a);
    let rb = restrict(b);
    let ma: f64 = ra.values().sum();
    let mb: f64 = rb.values().sum();
    if ma <= 0.0 || mb <= 0.0 {
        return None;
    }
    let mut xs: Vec<usize> = ra.keys().chain(rb.keys()).copied().collect();
    xs.sort_unstable();
    xs.dedup();
    let (mut ca, mut cb, mut d) = (0.0f64, 0.0f64, 0.0f64);
    for x in xs {
        ca += ra.get(&x).copied().unwrap_or(0.0) / ma;
        cb += rb.get(&x).copied().unwrap_or(0.0) / mb;
        d = d.max((ca - cb).abs());
    }
    Some(d)
}

/// Logarithmically binned degree density, plot-ready: x is the geometric
/// mean of a bin's integer span and y the per-unit-degree probability, so
/// total mass over bins equals the mass at k >= 1.
pub fn log_binned(hist: &DegreeHistogram, bins_per_decade: usize) -> Vec<(f64, f64)> {
    if bins_per_decade == 0 {
        return Vec::new();
    }
    let lb = 10f64.powf(1.0 / bins_per_decade as f64).ln();
    let mut bins: BTreeMap<i64, (usize, usize, usize)> = BTreeMap::new();
    for (k, c) in hist.iter() {
        if k == 0 {
            continue;
        }
        let b = ((k as f64).ln() / lb).floor() as i64;
        let e = bins.entry(b).or_insert((usize::MAX, 0, 0));
        e.0 = e.0.min(k);
        e.1 = e.1.max(k);
        e.2 += c;
    }
    bins.values()
        .map(|&(lo, hi, c)| {
            let width = (hi - lo + 1) as f64;
            let x = ((lo * hi) as f64).sqrt();
            (x, c as f64 / (hist.nodes() as f64 * width))
        })
        .collect()
}

/// CSV: `k,count,pk` ascending in `k`.
pub fn write_degree_histogram_csv<W: Write>(hist: &DegreeHistogram, mut w: W) -> io::Result<()> {
    writeln!(w, "k,count,pk")?;
    for (k, c) in hist.iter() {
        writeln!(w, "{k},{c},{:.6e}", c as f64 / hist.nodes() as f64)?;
    }
    Ok(())
}

/// CSV: `S,count` of the non-giant cluster sizes, ascending in `S`.
pub fn write_cluster_sizes_csv<W: Write>(clusters: &ClusterSizes, mut w: W) -> io::Result<()> {
    writeln!(w, "S,count")?;
    for (s, c) in clusters.size_counts() {
        writeln!(w, "{s},{c}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{grow, GenerationParams};
    use crate::rng::rng_from_seed;

    fn star(leaves: usize) -> Graph {
        let mut g = Graph::new();
        let hub = g.add_node(0.5).unwrap();
        for _ in 0..leaves {
            let v = g.add_node(0.5).unwrap();
            g.add_edge(hub, v).unwrap();
        }
        g
    }

    fn ring(n: usize) -> Graph {
        let mut g = Graph::new();
        let ids: Vec<_> = (0..n).map(|_| g.add_node(0.5).unwrap()).collect();
        for i in 0..n {
            g.add_edge(ids[i], ids[(i + 1) % n]).unwrap();
        }
        g
    }

    #[test]
    fn histogram_of_star() {
        let h = degree_distribution(&star(3)).unwrap();
        assert_eq!(h.count(1), 3);
        assert_eq!(h.count(3), 1);
        assert_eq!(h.count(2), 0);
        assert_eq!(h.nodes(), 4);
        assert_eq!(h.max_degree(), 3);
        assert_eq!(h.pk(1), 0.75);
        assert_eq!(h.points(), vec![(1, 0.75), (3, 0.25)]);
    }

    #[test]
    fn histogram_total_is_node_count() {
        let g = grow(&GenerationParams::new(300, 2, 0.5).unwrap(), &mut rng_from_seed(1)).unwrap();
        let h = degree_distribution(&g).unwrap();
        assert_eq!(h.iter().map(|(_, c)| c).sum::<usize>(), 300);
    }

    #[test]
    fn empty_graph_has_no_metrics() {
        let g = Graph::new();
        assert!(degree_distribution(&g).is_err());
        assert!(average_degree(&g).is_err());
        assert!(average_clustering(&g).is_err());
        assert!(cluster_size_distribution(&g).is_err());
        assert!(giant_fraction(&g).is_err());
    }

    #[test]
    fn average_degree_examples() {
        assert_eq!(average_degree(&ring(3)).unwrap(), 2.0);
        assert_eq!(average_degree(&star(3)).unwrap(), 1.5);
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(average_clustering(&ring(3)).unwrap(), 1.0);
        assert_eq!(average_clustering(&star(5)).unwrap(), 0.0);
        // triangle with a pendant on one corner: (1/3 + 1 + 1 + 0) / 4
        let mut g = ring(3);
        let a = g.nodes().next().unwrap();
        let d = g.add_node(0.5).unwrap();
        g.add_edge(a, d).unwrap();
        assert!((average_clustering(&g).unwrap() - 7.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn cluster_sizes_ring_plus_isolated() {
        let mut g = ring(5);
        g.add_node(0.5).unwrap();
        let c = cluster_size_distribution(&g).unwrap();
        assert_eq!(c.giant, 5);
        assert_eq!(c.rest, vec![1]);
        assert_eq!(c.component_count(), 2);
        assert!((giant_fraction(&g).unwrap() - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn tied_giant_excluded_once() {
        // two triangles: the giant is the component of the smallest id; the
        // other size-3 component stays in the fragment statistics
        let mut g = ring(3);
        let a = g.add_node(0.5).unwrap();
        let b = g.add_node(0.5).unwrap();
        let c = g.add_node(0.5).unwrap();
        g.add_edge(a, b).unwrap();
        g.add_edge(b, c).unwrap();
        g.add_edge(a, c).unwrap();
        let cs = cluster_size_distribution(&g).unwrap();
        assert_eq!(cs.giant, 3);
        assert_eq!(cs.rest, vec![3]);
        assert_eq!(cs.size_counts().get(&3), Some(&1));
    }

    #[test]
    fn exact_power_law_recovered() {
        for gamma in [2.5, 3.0] {
            let pts: Vec<(usize, f64)> =
                (2..=40).map(|k| (k, 7.0 * (k as f64).powf(-gamma))).collect();
            let fit = fit_power_law(&pts, 2, 40);
            assert!(fit.valid);
            assert!((fit.exponent - gamma).abs() < 1e-9, "gamma {gamma}");
            assert!(fit.stderr < 1e-9);
            assert!((fit.r_squared - 1.0).abs() < 1e-12);
            assert_eq!(fit.fit_range, (2, 40));
            assert_eq!(fit.n_points, 39);
        }
    }

    #[test]
    fn fit_window_is_respected() {
        let pts: Vec<(usize, f64)> =
            (1..=50).map(|k| (k, (k as f64).powf(-2.0))).collect();
        let fit = fit_power_law(&pts, 3, 20);
        assert!(fit.valid);
        assert_eq!(fit.fit_range, (3, 20));
        assert_eq!(fit.n_points, 18);
    }

    #[test]
    fn underdetermined_fit_is_invalid() {
        let fit = fit_power_law(&[(2, 0.5), (3, 0.2)], 1, 10);
        assert!(!fit.valid);
        assert!(fit.exponent.is_nan());
        let fit = fit_power_law(&[(2, 0.5), (3, 0.2), (4, 0.1)], 5, 10);
        assert!(!fit.valid);
    }

    #[test]
    fn zero_mass_points_ignored() {
        let pts = vec![(1, 0.5), (2, 0.0), (3, 0.25), (4, 0.1), (9, 0.01)];
        let fit = fit_power_law(&pts, 1, 9);
        assert!(fit.valid);
        assert_eq!(fit.n_points, 4);
    }

    #[test]
    fn metrics_report_is_consistent() {
        let g = grow(&GenerationParams::new(3000, 3, 1.0).unwrap(), &mut rng_from_seed(2)).unwrap();
        let r = compute_metrics(&g, &MetricsConfig::for_m(3)).unwrap();
        assert_eq!(r.n, 3000);
        assert_eq!(r.cluster_count, 1);
        assert_eq!(r.giant_fraction, 1.0);
        assert!((r.avg_degree - average_degree(&g).unwrap()).abs() < 1e-12);
        assert!(r.gamma.valid);
        assert!(r.gamma.exponent > 2.0 && r.gamma.exponent < 3.6);
        // pure growth leaves a single cluster: no fragments, no tau
        assert!(!r.tau.valid);
    }

    #[test]
    fn collapse_rescales_by_two_m_squared() {
        let h = degree_distribution(&star(3)).unwrap();
        let c = collapse_degree_distribution(&h, 2).unwrap();
        assert_eq!(c, vec![(1, 0.75 / 8.0), (3, 0.25 / 8.0)]);
        assert!(collapse_degree_distribution(&h, 0).is_err());
    }

    #[test]
    fn ks_distance_cases() {
        let a = vec![(1, 0.5), (2, 0.5)];
        assert_eq!(ks_distance(&a, &a), Some(0.0));
        let b = vec![(1, 0.25), (2, 0.75)];
        let d = ks_distance(&a, &b).unwrap();
        assert!((d - 0.25).abs() < 1e-12);
        // scale invariance: counts vs frequencies
        let b10 = vec![(1, 2.5), (2, 7.5)];
        assert!((ks_distance(&a, &b10).unwrap() - 0.25).abs() < 1e-12);
        let disjoint = vec![(10, 1.0), (11, 1.0)];
        assert_eq!(ks_distance(&a, &disjoint), None);
    }

    #[test]
    fn log_binning_coarse_and_fine() {
        // star(3): degrees 1 (x3) and 3 (x1). one bin per decade puts both
        // in bin 0: span 1..=3, width 3, density 4 / (4 * 3), x = sqrt(3)
        let h = degree_distribution(&star(3)).unwrap();
        let coarse = log_binned(&h, 1);
        assert_eq!(coarse.len(), 1);
        assert!((coarse[0].0 - 3f64.sqrt()).abs() < 1e-12);
        assert!((coarse[0].1 - 1.0 / 3.0).abs() < 1e-12);
        // very fine bins degenerate to the histogram itself
        let fine = log_binned(&h, 1000);
        assert_eq!(fine.len(), 2);
        assert!((fine[0].0 - 1.0).abs() < 1e-12 && (fine[0].1 - 0.75).abs() < 1e-12);
        assert!((fine[1].0 - 3.0).abs() < 1e-12 && (fine[1].1 - 0.25).abs() < 1e-12);
        assert!(log_binned(&h, 0).is_empty());
    }

    #[test]
    fn log_binning_on_grown_graph() {
        let g = grow(&GenerationParams::new(2000, 3, 0.5).unwrap(), &mut rng_from_seed(3)).unwrap();
        let h = degree_distribution(&g).unwrap();
        let bins = log_binned(&h, 10);
        assert!(!bins.is_empty());
        assert!(bins.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(bins.iter().all(|&(_, d)| d > 0.0));
    }

    #[test]
    fn histogram_csv_format() {
        let h = degree_distribution(&star(3)).unwrap();
        let mut buf = Vec::new();
        write_degree_histogram_csv(&h, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k,count,pk\n1,3,7.500000e-1\n3,1,2.500000e-1\n"
        );
    }

    #[test]
    fn cluster_csv_format() {
        let mut g = ring(5);
        g.add_node(0.5).unwrap();
        g.add_node(0.5).unwrap();
        let c = cluster_size_distribution(&g).unwrap();
        let mut buf = Vec::new();
        write_cluster_sizes_csv(&c, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "S,count\n1,2\n");
    }
}
