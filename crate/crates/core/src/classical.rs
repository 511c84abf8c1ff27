//! Classical random-walk baselines on the simplex: the exact lumped
//! absorbing chain, seeded Monte Carlo with query-every-k-steps accounting,
//! and log-log scaling fits for the query-complexity claims.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::simplex::SimplexParams;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Class-level aggregation of the walk: a is absorbing, b sits one external
/// edge away from the marked clique, c is everything else.
#[derive(Clone, Copy, Debug)]
pub struct LumpedChain {
    m: usize,
}

impl LumpedChain {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!(
                "clique size M must be ≥ 2, got {m}"
            )));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Row-stochastic transition matrix over the class order (a, b, c).
    /// From b: the single external edge reaches the marked clique, the other
    /// M−1 neighbors are class c. From c: exactly one neighbor (the in-clique
    /// b vertex) is class b; the external edge and the remaining in-clique
    /// neighbors are class c.
    pub fn transition_matrix(&self) -> [[f64; 3]; 3] {
        let mf = self.m as f64;
        [
            [1.0, 0.0, 0.0],
            [1.0 / mf, 0.0, (mf - 1.0) / mf],
            [0.0, 1.0 / mf, (mf - 1.0) / mf],
        ]
    }
}

/// Expected steps to reach the marked clique from class b and from class c,
/// obtained by solving the absorbing-chain system
///   h_b − ((M−1)/M)·h_c = 1
///   −(1/M)·h_b + (1/M)·h_c = 1
/// numerically (the closed-form solution is (M², M²+M)).
pub fn exact_hitting_steps(m: usize) -> Result<(f64, f64)> {
    let chain = LumpedChain::new(m)?;
    let t = chain.transition_matrix();
    // (I − Q) h = 1 restricted to the transient classes (b, c)
    let a11 = 1.0 - t[1][1];
    let a12 = -t[1][2];
    let a21 = -t[2][1];
    let a22 = 1.0 - t[2][2];
    let det = a11 * a22 - a12 * a21;
    let h_b = (a22 + (-a12)) / det;
    let h_c = (a11 + (-a21)) / det;
    Ok((h_b, h_c))
}

/// Expected steps from a uniformly random unmarked start:
/// (h_b + (M−1)·h_c)/M, weighting the M class-b and M(M−1) class-c vertices.
pub fn expected_steps_uniform(m: usize) -> Result<f64> {
    let (h_b, h_c) = exact_hitting_steps(m)?;
    let mf = m as f64;
    Ok((h_b + (mf - 1.0) * h_c) / mf)
}

/// Outcome of one seeded walk trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkTrialResult {
    /// Walk steps taken up to and including the affirmative query.
    pub steps_to_hit: u64,
    /// Oracle queries consumed (one at step 0, one after each k-step leg).
    pub queries_used: u64,
    pub seed: u64,
}

/// One random-walk trial on the actual graph: start uniformly on the
/// unmarked vertices, query at step 0 and after every k-th step, stop at the
/// first affirmative answer. The trial stream is derived from (seed, trial)
/// so results do not depend on scheduling.
pub fn single_trial(
    params: &SimplexParams,
    steps_per_query: u64,
    seed: u64,
    trial: u64,
) -> Result<WalkTrialResult> {
    if steps_per_query == 0 {
        return Err(Error::InvalidParameter(
            "steps per query must be ≥ 1".into(),
        ));
    }
    let m = params.m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    // unmarked vertices are exactly the indices M..M+M² (cliques 1..=M)
    let mut vertex = params.vertex_from_index(m + rng.random_range(0..m * m));
    let mut steps = 0u64;
    let mut queries = 1u64; // the step-0 query, always negative
    loop {
        for _ in 0..steps_per_query {
            let d = rng.random_range(0..m);
            vertex = params.neighbor_by_direction(vertex, d)?;
        }
        steps += steps_per_query;
        queries += 1;
        if params.is_marked(vertex) {
            return Ok(WalkTrialResult { steps_to_hit: steps, queries_used: queries, seed });
        }
    }
}

/// Aggregate of a Monte Carlo run.
#[derive(Clone, Copy, Debug)]
pub struct McSummary {
    pub m: usize,
    pub steps_per_query: u64,
    pub trials: u64,
    pub mean_queries: f64,
    /// Standard error of the query mean (sample std / √trials).
    pub std_error: f64,
    /// k·(mean_queries − 1): average walk steps consumed.
    pub mean_steps: f64,
}

/// Seeded Monte Carlo estimate of the expected query count. Aggregation is
/// by exact integer sums, so the result is identical under any execution
/// order or degree of parallelism.
pub fn monte_carlo_queries(
    m: usize,
    steps_per_query: u64,
    trials: u64,
    seed: u64,
) -> Result<McSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
    }
    let params = SimplexParams::new(m)?;
    if steps_per_query == 0 {
        return Err(Error::InvalidParameter(
            "steps per query must be ≥ 1".into(),
        ));
    }
    let (sum, sum_sq) = trial_sums(&params, steps_per_query, trials, seed)?;
    let n = trials as f64;
    let mean = sum as f64 / n;
    let std_error = if trials > 1 {
        let var = (sum_sq as f64 - n * mean * mean) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(McSummary {
        m,
        steps_per_query,
        trials,
        mean_queries: mean,
        std_error,
        mean_steps: steps_per_query as f64 * (mean - 1.0),
    })
}

#[cfg(feature = "parallel")]
fn trial_sums(
    params: &SimplexParams,
    steps_per_query: u64,
    trials: u64,
    seed: u64,
) -> Result<(u128, u128)> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            single_trial(params, steps_per_query, seed, t).map(|r| {
                let q = r.queries_used as u128;
                (q, q * q)
            })
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
}

#[cfg(not(feature = "parallel"))]
fn trial_sums(
    params: &SimplexParams,
    steps_per_query: u64,
    trials: u64,
    seed: u64,
) -> Result<(u128, u128)> {
    let mut sum = 0u128;
    let mut sum_sq = 0u128;
    for t in 0..trials {
        let r = single_trial(params, steps_per_query, seed, t)?;
        let q = r.queries_used as u128;
        sum += q;
        sum_sq += q * q;
    }
    Ok((sum, sum_sq))
}

/// Least-squares fit of log(value) against log(M).
#[derive(Clone, Copy, Debug)]
pub struct ScalingFit {
    pub exponent: f64,
    /// Fitted log-log intercept: value ≈ e^intercept · M^exponent.
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fit a power law through (M, value) points; needs ≥ 3 strictly positive
/// points. Constant data fits exponent 0 with r² defined as 1.
pub fn scaling_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "scaling fit needs ≥ 3 points, got {}",
            points.len()
        )));
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(m, v)| {
            if m > 0.0 && v > 0.0 {
                Ok((m.ln(), v.ln()))
            } else {
                Err(Error::InvalidParameter(format!(
                    "scaling fit needs positive points, got ({m}, {v})"
                )))
            }
        })
        .collect::<Result<_>>()?;
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "scaling fit needs at least two distinct M values".into(),
        ));
    }
    let exponent = sxy / sxx;
    let intercept = mean_y - exponent * mean_x;
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - (intercept + exponent * p.0)).powi(2))
        .sum();
    let r_squared = if ss_tot <= f64::EPSILON * n {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(ScalingFit { exponent, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::VertexClass;

    #[test]
    fn hitting_steps_closed_form() {
        for m in [2, 10, 100] {
            let (h_b, h_c) = exact_hitting_steps(m).unwrap();
            let mf = m as f64;
            assert!((h_b - mf * mf).abs() < 1e-9, "h_b = {h_b}");
            assert!((h_c - (mf * mf + mf)).abs() < 1e-9, "h_c = {h_c}");
        }
        let (h_b, h_c) = exact_hitting_steps(2).unwrap();
        assert!((h_b - 4.0).abs() < 1e-12 && (h_c - 6.0).abs() < 1e-12);
    }

    #[test]
    fn hitting_steps_satisfy_their_system() {
        for m in [2, 7, 33, 100] {
            let mf = m as f64;
            let (h_b, h_c) = exact_hitting_steps(m).unwrap();
            let r1 = h_b - 1.0 - (mf - 1.0) / mf * h_c;
            let r2 = h_c - 1.0 - h_b / mf - (mf - 1.0) / mf * h_c;
            assert!(r1.abs() <= 1e-12 * h_b && r2.abs() <= 1e-12 * h_c, "{r1} {r2}");
        }
    }

    #[test]
    fn chain_rows_are_stochastic() {
        let t = LumpedChain::new(17).unwrap().transition_matrix();
        for row in t {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            assert!(row.iter().all(|&p| (0.0..=1.0).contains(&p)));
        }
    }

    #[test]
    fn monte_carlo_matches_exact_hitting_time() {
        let m = 50;
        let trials = 10_000;
        let s = monte_carlo_queries(m, 1, trials, 42).unwrap();
        // with k=1, queries = 1 + steps, so compare against the uniform-start
        // expectation
        let expect = 1.0 + expected_steps_uniform(m).unwrap();
        let dev = (s.mean_queries - expect).abs();
        assert!(
            dev <= 3.0 * s.std_error,
            "mean {} vs {expect} (3σ = {})",
            s.mean_queries,
            3.0 * s.std_error
        );
        assert!((s.mean_steps - (s.mean_queries - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn deterministic_across_repeat_runs() {
        let a = monte_carlo_queries(20, 4, 500, 7).unwrap();
        let b = monte_carlo_queries(20, 4, 500, 7).unwrap();
        assert_eq!(a.mean_queries.to_bits(), b.mean_queries.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = monte_carlo_queries(20, 4, 500, 8).unwrap();
        assert_ne!(a.mean_queries.to_bits(), c.mean_queries.to_bits());
    }

    #[test]
    fn trial_streams_are_stable() {
        let params = SimplexParams::new(12).unwrap();
        let r1 = single_trial(&params, 3, 99, 41).unwrap();
        let r2 = single_trial(&params, 3, 99, 41).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.steps_to_hit, 3 * (r1.queries_used - 1));
    }

    #[test]
    fn lumping_matches_empirical_transition_frequencies() {
        // count class transitions along a long trajectory and compare with
        // the lumped probabilities
        let m = 10;
        let params = SimplexParams::new(m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut v = params.vertex_from_index(m); // a b-class vertex
        let mut from_b = (0u64, 0u64); // (to a, total)
        let mut from_c = (0u64, 0u64); // (to b, total)
        for _ in 0..200_000 {
            let class = params.classify(v);
            let next = params
                .neighbor_by_direction(v, rng.random_range(0..m))
                .unwrap();
            let next_class = params.classify(next);
            match class {
                VertexClass::B => {
                    from_b.1 += 1;
                    if next_class == VertexClass::A {
                        from_b.0 += 1;
                    }
                }
                VertexClass::C => {
                    from_c.1 += 1;
                    if next_class == VertexClass::B {
                        from_c.0 += 1;
                    }
                }
                VertexClass::A => {}
            }
            v = next;
        }
        let p = 1.0 / m as f64;
        for (hits, total) in [from_b, from_c] {
            assert!(total > 1_000);
            let freq = hits as f64 / total as f64;
            let se = (p * (1.0 - p) / total as f64).sqrt();
            assert!((freq - p).abs() <= 3.0 * se, "freq {freq} vs {p} (se {se})");
        }
    }

    #[test]
    fn scaling_fit_exact_power_laws() {
        let quad: Vec<(f64, f64)> =
            [4.0, 8.0, 16.0, 32.0].iter().map(|&m| (m, m * m)).collect();
        let fit = scaling_fit(&quad).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let flat: Vec<(f64, f64)> = [4.0, 8.0, 16.0].iter().map(|&m| (m, 7.5)).collect();
        let fit = scaling_fit(&flat).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let sqrt_like: Vec<(f64, f64)> = [64.0f64, 100.0, 144.0, 196.0]
            .iter()
            .map(|&m| (m, (std::f64::consts::PI * m.sqrt() / 4.0).round()))
            .collect();
        let fit = scaling_fit(&sqrt_like).unwrap();
        assert!((fit.exponent - 0.5).abs() <= 0.1, "exponent {}", fit.exponent);
    }

    #[test]
    fn scaling_fit_rejections() {
        assert!(scaling_fit(&[(2.0, 1.0), (4.0, 2.0)]).is_err());
        assert!(scaling_fit(&[(2.0, 1.0), (4.0, -2.0), (8.0, 3.0)]).is_err());
        assert!(scaling_fit(&[(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn monte_carlo_rejections() {
        assert!(monte_carlo_queries(10, 1, 0, 1).is_err());
        assert!(monte_carlo_queries(10, 0, 10, 1).is_err());
        assert!(monte_carlo_queries(1, 1, 10, 1).is_err());
    }
}
