//! Grover search with a single marked item under exact, faulty, robust and
//! phase-oracle regimes, plus the operator facts used for the phase-oracle
//! variant.

use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::circuit::{diffusion, Gate, QueryAlgorithm, Target, INPUT, OUTPUT};
use crate::error::{out_of_range, Error, Result};
use crate::layout::RegisterLayout;
use crate::measure::{register_probabilities, sample_register};
use crate::oracle::{apply_phase_oracle, sample_fault, FaultTrace, FaultyOracleConfig, OraclePlan, TruthTable};
use crate::rng::{from_seed, splitmix64, substream_seed};
use crate::robust::{evolve_query, robustify, OracleMode, RobustAlgorithm};
use crate::state::StateVector;

/// Search space of `2^n` items with marked item `k`, run for `iterations`
/// Grover iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroverInstance {
    n: usize,
    k: u64,
    iterations: u64,
}

impl GroverInstance {
    pub fn new(n: usize, k: u64, iterations: u64) -> Result<Self> {
        if n == 0 || n > 20 {
            return Err(out_of_range("n", "must be in 1..=20"));
        }
        if k >> n != 0 {
            return Err(Error::IndexOutOfRange {
                index: k as usize,
                len: 1 << n,
            });
        }
        Ok(Self { n, k, iterations })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u64 {
        1 << self.n
    }

    pub fn marked(&self) -> u64 {
        self.k
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn oracle(&self) -> TruthTable {
        TruthTable::single_marked(self.n, self.k).expect("validated instance")
    }
}

/// `U_η` on `register`.
pub fn diffusion_apply(state: &mut StateVector, register: &str) -> Result<()> {
    diffusion(state, register)
}

/// `sin²((2r+1)·asin(1/√N))`.
pub fn grover_success_prob(size: u64, r: u64) -> Result<f64> {
    if size < 2 {
        return Err(out_of_range("N", "must be at least 2"));
    }
    let theta = (1.0 / (size as f64).sqrt()).asin();
    Ok(((2 * r + 1) as f64 * theta).sin().powi(2))
}

/// Grover as a query algorithm: `U_0` prepares `|η⟩|−⟩`, each later `U_i`
/// is the diffusion on `Z`, and `Z` is measured.
pub fn grover_algorithm(n: usize, iterations: usize) -> Result<QueryAlgorithm> {
    let z = Target::Register(INPUT.into());
    let b = Target::Register(OUTPUT.into());
    let mut segments = vec![vec![Gate::H(z), Gate::X(b.clone()), Gate::H(b)]];
    for _ in 0..iterations {
        segments.push(vec![Gate::Diffusion(INPUT.into())]);
    }
    QueryAlgorithm::new(n, 1, 0, segments, INPUT)
}

/// Success probability of the fault-free algorithm read off the final
/// amplitudes.
pub fn exact_success_probability(instance: &GroverInstance) -> Result<f64> {
    let algo = grover_algorithm(instance.n, instance.iterations as usize)?;
    let mut state = StateVector::basis_index(algo.layout().clone(), 0);
    evolve_query(&algo, &instance.oracle(), &mut state, OracleMode::Exact, &mut FaultTrace::replay(Vec::new()))?;
    Ok(register_probabilities(&state, INPUT)?[instance.k as usize])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroverMode {
    Exact,
    /// Bit oracle failing with probability `p` at every call.
    Faulty { p: f64 },
    /// Every oracle call replaced by `G_f^t` with `t` for budget `(γ, δ)`.
    Robust { gamma: f64, delta: f64, p: f64 },
    /// Each marker replaced by a round of noisy `O^{k,1/r}` applications.
    Phase { r_phase: u64, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub success: bool,
    pub queries: u64,
}

/// Noisy phase applications per round: `⌈r/(1−p)⌉`, so that `r` of them
/// succeed on average.
pub fn phase_round_length(r_phase: u64, p: f64) -> Result<u64> {
    if r_phase == 0 {
        return Err(out_of_range("r_phase", "must be at least 1"));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(out_of_range("p", "must be in [0, 1)"));
    }
    Ok((r_phase as f64 / (1.0 - p)).ceil() as u64)
}

#[derive(Debug, Clone)]
enum Engine {
    Plain {
        algo: QueryAlgorithm,
        mode: OracleMode,
    },
    Robust {
        algo: RobustAlgorithm,
        config: FaultyOracleConfig,
    },
    Phase {
        r_phase: u64,
        round: u64,
        config: FaultyOracleConfig,
        layout: RegisterLayout,
    },
}

/// A Grover configuration compiled once and sampled per trial.
#[derive(Debug, Clone)]
pub struct GroverRunner {
    instance: GroverInstance,
    f: TruthTable,
    engine: Engine,
}

impl GroverRunner {
    pub fn new(instance: GroverInstance, mode: GroverMode) -> Result<Self> {
        let f = instance.oracle();
        let algo = || grover_algorithm(instance.n, instance.iterations as usize);
        let engine = match mode {
            GroverMode::Exact => Engine::Plain {
                algo: algo()?,
                mode: OracleMode::Exact,
            },
            GroverMode::Faulty { p } => Engine::Plain {
                algo: algo()?,
                mode: OracleMode::Faulty(FaultyOracleConfig::unreduced(p)?),
            },
            GroverMode::Robust { gamma, delta, p } => Engine::Robust {
                algo: robustify(&algo()?, gamma, delta)?,
                config: FaultyOracleConfig::new(p)?,
            },
            GroverMode::Phase { r_phase, p } => Engine::Phase {
                r_phase,
                round: phase_round_length(r_phase, p)?,
                config: FaultyOracleConfig::unreduced(p)?,
                layout: RegisterLayout::new([(INPUT, instance.n)])?,
            },
        };
        Ok(Self { instance, f, engine })
    }

    pub fn instance(&self) -> &GroverInstance {
        &self.instance
    }

    /// `t` of the robust blocks, if any.
    pub fn robust_t(&self) -> Option<u64> {
        match &self.engine {
            Engine::Robust { algo, .. } => Some(algo.params().t),
            _ => None,
        }
    }

    /// Faulty-oracle invocations of one trial.
    pub fn queries_per_trial(&self) -> u64 {
        let r = self.instance.iterations;
        match &self.engine {
            Engine::Plain { .. } => r,
            Engine::Robust { algo, .. } => algo.oracle_invocations(),
            Engine::Phase { round, .. } => r * round,
        }
    }

    /// One seeded trial: evolve, measure `Z`, compare with the marked item.
    pub fn trial(&self, master: u64, index: u64) -> Result<TrialOutcome> {
        let seed = substream_seed(master, index);
        let mut trace = FaultTrace::seeded(splitmix64(seed));
        let mut measure_rng = from_seed(splitmix64(seed ^ 0x6d65_6173_7572_6521));
        let state = match &self.engine {
            Engine::Plain { algo, mode } => {
                let mut state = StateVector::basis_index(algo.layout().clone(), 0);
                evolve_query(algo, &self.f, &mut state, *mode, &mut trace)?;
                state
            }
            Engine::Robust { algo, config } => {
                let mut state = StateVector::basis_index(algo.layout().clone(), 0);
                algo.evolve(&self.f, &mut state, config, &mut trace)?;
                state
            }
            Engine::Phase {
                r_phase,
                round,
                config,
                layout,
            } => {
                let mut state = StateVector::basis_index(layout.clone(), 0);
                Gate::H(Target::Register(INPUT.into())).apply(&mut state)?;
                for _ in 0..self.instance.iterations {
                    for _ in 0..*round {
                        let applied = sample_fault(config, &mut trace)?;
                        apply_phase_oracle(&mut state, INPUT, self.instance.k, *r_phase, applied)?;
                    }
                    diffusion(&mut state, INPUT)?;
                }
                state
            }
        };
        let queries = match &self.engine {
            Engine::Plain {
                mode: OracleMode::Exact,
                ..
            } => self.instance.iterations,
            _ => trace.invocations() as u64,
        };
        let outcome = sample_register(&state, INPUT, &mut measure_rng)?;
        Ok(TrialOutcome {
            success: outcome == self.instance.k,
            queries,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GroverStats {
    pub trials: u64,
    pub successes: u64,
    pub total_queries: u64,
}

impl GroverStats {
    pub fn record(&mut self, outcome: TrialOutcome) {
        self.trials += 1;
        self.successes += u64::from(outcome.success);
        self.total_queries += outcome.queries;
    }

    pub fn success_freq(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn mean_queries(&self) -> f64 {
        self.total_queries as f64 / self.trials as f64
    }
}

/// Runs `trials` seeded trials in order.
pub fn run_grover(instance: GroverInstance, mode: GroverMode, seed: u64, trials: u64) -> Result<GroverStats> {
    if trials == 0 {
        return Err(Error::EmptySamples);
    }
    let runner = GroverRunner::new(instance, mode)?;
    let mut stats = GroverStats::default();
    for i in 0..trials {
        stats.record(runner.trial(seed, i)?);
    }
    Ok(stats)
}

/// Successful applications in each of `rounds` rounds of
/// `⌈r/(1−p)⌉` noisy phase applications.
pub fn phase_round_counts<R: Rng + ?Sized>(r_phase: u64, p: f64, rounds: u64, rng: &mut R) -> Result<Vec<u64>> {
    let len = phase_round_length(r_phase, p)?;
    Ok((0..rounds)
        .map(|_| (0..len).filter(|_| rng.random::<f64>() >= p).count() as u64)
        .collect())
}

/// Sample moments of the cumulative application count after round `i`,
/// with the binomial values they should match.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountMoments {
    pub round: u64,
    pub mean: f64,
    pub variance: f64,
    pub expected_mean: f64,
    pub expected_variance: f64,
}

/// Cumulative counts `Σ_{j≤i} X_j` over `trials` seeded runs; the expected
/// law is `Binomial(i·⌈r/(1−p)⌉, 1−p)`.
pub fn phase_count_moments(r_phase: u64, p: f64, rounds: u64, trials: u64, seed: u64) -> Result<Vec<CountMoments>> {
    if trials < 2 {
        return Err(out_of_range("trials", "need at least 2"));
    }
    let len = phase_round_length(r_phase, p)? as f64;
    let mut sum = vec![0.0f64; rounds as usize];
    let mut sum_sq = vec![0.0f64; rounds as usize];
    for trial in 0..trials {
        let mut rng = from_seed(substream_seed(seed, trial));
        let mut acc = 0u64;
        for (i, x) in phase_round_counts(r_phase, p, rounds, &mut rng)?.into_iter().enumerate() {
            acc += x;
            sum[i] += acc as f64;
            sum_sq[i] += (acc * acc) as f64;
        }
    }
    let n = trials as f64;
    Ok((0..rounds as usize)
        .map(|i| {
            let mean = sum[i] / n;
            let variance = (sum_sq[i] - n * mean * mean) / (n - 1.0);
            let draws = (i + 1) as f64 * len;
            CountMoments {
                round: i as u64 + 1,
                mean,
                variance,
                expected_mean: draws * (1.0 - p),
                expected_variance: draws * p * (1.0 - p),
            }
        })
        .collect())
}

fn check_commutator_args(size: u64, r_phase: u64) -> Result<()> {
    if size < 2 {
        return Err(out_of_range("N", "must be at least 2"));
    }
    if r_phase == 0 {
        return Err(out_of_range("r_phase", "must be at least 1"));
    }
    Ok(())
}

/// `‖[U_η, O^{k,1/r}]‖` as `(closed form, largest singular value)`, the
/// latter computed from the 2×2 restriction to `span{|k⟩, |η'⟩}`.
pub fn commutator_norm(size: u64, r_phase: u64) -> Result<(f64, f64)> {
    check_commutator_args(size, r_phase)?;
    let n = size as f64;
    let w = Complex64::from_polar(1.0, PI / r_phase as f64);
    let one = Complex64::new(1.0, 0.0);
    let closed = 2.0 * (n - 1.0).sqrt() * (one - w).norm() / n;

    let off = 2.0 * (n - 1.0).sqrt() / n;
    let u = Matrix2::new(
        Complex64::new(-1.0 + 2.0 / n, 0.0),
        Complex64::new(off, 0.0),
        Complex64::new(off, 0.0),
        Complex64::new(1.0 - 2.0 / n, 0.0),
    );
    let o = Matrix2::new(w, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), one);
    let c = u * o - o * u;
    let h = c.adjoint() * c;
    let (a, d, b) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)].norm());
    let top = 0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b * b).sqrt();
    Ok((closed, top.max(0.0).sqrt()))
}

/// Largest singular value of the full `N × N` commutator.
pub fn commutator_norm_dense(size: u64, r_phase: u64) -> Result<f64> {
    check_commutator_args(size, r_phase)?;
    let n = size as usize;
    let eta = Complex64::new(2.0 / size as f64, 0.0);
    let u = DMatrix::from_fn(n, n, |i, j| if i == j { eta - 1.0 } else { eta });
    let w = Complex64::from_polar(1.0, PI / r_phase as f64);
    let o = DMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => w,
        _ if i == j => Complex64::new(1.0, 0.0),
        _ => Complex64::new(0.0, 0.0),
    });
    let c = &u * &o - &o * &u;
    let sv = c.singular_values();
    Ok(sv.iter().copied().fold(0.0, f64::max))
}

/// `|θ − π| − |e^{iθ} + 1|`, non-negative for every real `θ`.
pub fn angle_inequality_gap(theta: f64) -> f64 {
    (theta - PI).abs() - (Complex64::from_polar(1.0, theta) + 1.0).norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortRunConfig {
    /// Number of runs is `⌈c·p²·N⌉`.
    pub c: f64,
    /// One-sided faulty queries spent checking each candidate.
    pub verify_queries: u32,
}

impl Default for ShortRunConfig {
    fn default() -> Self {
        Self { c: 8.0, verify_queries: 7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShortRunOutcome {
    pub success: bool,
    pub queries: u64,
    pub runs: u64,
}

/// Repeats short Grover runs of `⌈1/p⌉` faulty iterations, checking each
/// measured candidate with repeated faulty queries, until one checks out.
pub fn repeat_short_runs(n: usize, k: u64, p: f64, config: ShortRunConfig, seed: u64) -> Result<ShortRunOutcome> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(out_of_range("p", "must be in (0, 1/2]"));
    }
    if !(config.c > 0.0 && config.c.is_finite()) {
        return Err(out_of_range("c", "must be positive"));
    }
    let instance = GroverInstance::new(n, k, (1.0 / p).ceil() as u64)?;
    let f = instance.oracle();
    let max_runs = (config.c * p * p * instance.size() as f64).ceil() as u64;
    let algo = grover_algorithm(n, instance.iterations as usize)?;
    let plan = OraclePlan::new(algo.layout(), &f, INPUT, OUTPUT)?;
    let faulty = FaultyOracleConfig::unreduced(p)?;
    let mut trace = FaultTrace::seeded(splitmix64(seed));
    let mut rng = from_seed(splitmix64(seed ^ 0x7368_6f72_7472_756e));
    let mut queries = 0u64;
    for run in 1..=max_runs {
        let mut state = StateVector::basis_index(algo.layout().clone(), 0);
        for (i, seg) in algo.segments().iter().enumerate() {
            if i > 0 {
                plan.apply_faulty(&mut state, &faulty, &mut trace)?;
                queries += 1;
            }
            crate::circuit::apply_all(seg, &mut state)?;
        }
        let candidate = sample_register(&state, INPUT, &mut rng)?;
        for _ in 0..config.verify_queries {
            queries += 1;
            if sample_fault(&faulty, &mut trace)? && f.eval(candidate) == 1 {
                return Ok(ShortRunOutcome {
                    success: candidate == k,
                    queries,
                    runs: run,
                });
            }
        }
    }
    Ok(ShortRunOutcome {
        success: false,
        queries,
        runs: max_runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::from_seed;

    #[test]
    fn closed_form_examples() {
        assert!((grover_success_prob(4, 1).unwrap() - 1.0).abs() < 1e-15);
        for size in [2u64, 4, 16, 1024] {
            assert!((grover_success_prob(size, 0).unwrap() - 1.0 / size as f64).abs() < 1e-15);
        }
        // sin²(7·asin(1/4)), evaluated to 40 digits
        assert!((grover_success_prob(16, 3).unwrap() - 0.961_318_969_726_562_5).abs() < 1e-12);
        assert!(grover_success_prob(1, 1).is_err());
    }

    #[test]
    fn state_vector_matches_closed_form() {
        for n in [2usize, 4, 6] {
            for r in 0..=10 {
                for k in [0u64, (1 << n) - 1] {
                    let inst = GroverInstance::new(n, k, r).unwrap();
                    let amp = exact_success_probability(&inst).unwrap();
                    let closed = grover_success_prob(1 << n, r).unwrap();
                    assert!((amp - closed).abs() < 1e-9, "n={n} r={r}");
                }
            }
        }
    }

    #[test]
    fn diffusion_examples() {
        let layout = RegisterLayout::new([("Z", 3)]).unwrap();
        let mut eta = StateVector::basis_index(layout.clone(), 0);
        Gate::H(Target::Register("Z".into())).apply(&mut eta).unwrap();
        let mut s = eta.clone();
        diffusion_apply(&mut s, "Z").unwrap();
        assert!(crate::metrics::l2_distance(&s, &eta).unwrap() < 1e-12);

        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[1] = Complex64::new(0.5f64.sqrt(), 0.0);
        amps[2] = Complex64::new(-(0.5f64.sqrt()), 0.0);
        let orth = StateVector::from_amplitudes(layout, amps).unwrap();
        let mut s = orth.clone();
        diffusion_apply(&mut s, "Z").unwrap();
        for (a, b) in s.amplitudes().iter().zip(orth.amplitudes()) {
            assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn exact_runner_is_seeded() {
        let inst = GroverInstance::new(4, 5, 3).unwrap();
        let a = run_grover(inst, GroverMode::Exact, 3, 300).unwrap();
        let b = run_grover(inst, GroverMode::Exact, 3, 300).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total_queries, 900);
    }

    #[test]
    fn zero_fault_rate_matches_exact() {
        let inst = GroverInstance::new(3, 2, 2).unwrap();
        let exact = run_grover(inst, GroverMode::Exact, 11, 200).unwrap();
        let faulty = run_grover(inst, GroverMode::Faulty { p: 0.0 }, 11, 200).unwrap();
        assert_eq!(exact.successes, faulty.successes);
    }

    #[test]
    fn phase_mode_with_reliable_oracle_is_grover() {
        // p = 0: every round applies e^{iπ/r} exactly r times, i.e. the −1 marker.
        let inst = GroverInstance::new(4, 9, 3).unwrap();
        let runner = GroverRunner::new(inst, GroverMode::Phase { r_phase: 4, p: 0.0 }).unwrap();
        assert_eq!(runner.queries_per_trial(), 12);
        let stats = run_grover(inst, GroverMode::Phase { r_phase: 4, p: 0.0 }, 2, 2000).unwrap();
        let p0 = grover_success_prob(16, 3).unwrap();
        let sigma = (p0 * (1.0 - p0) / 2000.0).sqrt();
        assert!((stats.success_freq() - p0).abs() <= 3.0 * sigma);
    }

    #[test]
    fn phase_power_is_marker() {
        let layout = RegisterLayout::new([("Z", 3)]).unwrap();
        let mut rng = from_seed(4);
        for r in 1..=8u64 {
            let amps = (0..8).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let mut s = StateVector::from_amplitudes(layout.clone(), amps).unwrap();
            s.normalize();
            let mut expected = s.clone();
            apply_phase_oracle(&mut expected, "Z", 5, 1, true).unwrap();
            for _ in 0..r {
                apply_phase_oracle(&mut s, "Z", 5, r, true).unwrap();
            }
            for (a, b) in s.amplitudes().iter().zip(expected.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn phase_counts_are_binomial() {
        for (r, p) in [(4u64, 0.5), (3, 0.25)] {
            let trials = 4000;
            for m in phase_count_moments(r, p, 5, trials, 8).unwrap() {
                let se = (m.expected_variance / trials as f64).sqrt();
                assert!((m.mean - m.expected_mean).abs() <= 4.0 * se, "{m:?}");
                // sample variance of a binomial: sd ≈ σ²·√(2/n)
                let var_se = m.expected_variance * (2.0 / trials as f64).sqrt();
                assert!((m.variance - m.expected_variance).abs() <= 4.0 * var_se, "{m:?}");
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let (c, n) = commutator_norm(4, 8).unwrap();
        assert!((c - 0.337_906_349_796_907).abs() < 1e-12);
        assert!((c - n).abs() < 1e-9);
        let (c, _) = commutator_norm(4, 1).unwrap();
        assert!((c - 3f64.sqrt()).abs() < 1e-12);
        let (c, _) = commutator_norm(1024, 32).unwrap();
        let asym = 2.0 * PI / (32.0 * 1024f64.sqrt());
        assert!(c <= 1.1 * asym && c >= asym / 1.1);
        assert!(commutator_norm(1, 2).is_err());
        assert!(commutator_norm(4, 0).is_err());
    }

    #[test]
    fn commutator_dense_route_agrees() {
        for size in [2u64, 3, 4, 8, 16] {
            for r in [1u64, 2, 5, 32] {
                let (closed, two) = commutator_norm(size, r).unwrap();
                let dense = commutator_norm_dense(size, r).unwrap();
                assert!((dense - closed).abs() < 1e-9 && (two - closed).abs() < 1e-9, "N={size} r={r}");
            }
        }
    }

    #[test]
    fn angle_inequality_on_grid() {
        for i in 0..=10_000 {
            let theta = -2.0 * PI + 4.0 * PI * i as f64 / 10_000.0;
            assert!(angle_inequality_gap(theta) >= -1e-12, "θ = {theta}");
        }
    }

    #[test]
    fn short_runs_basic() {
        assert_eq!((1.0f64 - 0.5).powf(1.0 / 0.5), 0.25);
        let a = repeat_short_runs(5, 3, 0.5, ShortRunConfig::default(), 1).unwrap();
        let b = repeat_short_runs(5, 3, 0.5, ShortRunConfig::default(), 1).unwrap();
        assert_eq!(a, b);
        assert!(a.runs >= 1 && a.queries >= 2);
        assert!(repeat_short_runs(5, 3, 0.7, ShortRunConfig::default(), 1).is_err());
    }

    #[test]
    fn instance_validation() {
        assert!(GroverInstance::new(2, 4, 1).is_err());
        assert!(GroverInstance::new(0, 0, 1).is_err());
        let inst = GroverInstance::new(3, 7, 2).unwrap();
        assert_eq!(inst.oracle().eval(7), 1);
    }
}
