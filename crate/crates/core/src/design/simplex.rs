//! Bounded Nelder–Mead: reflect/expand/contract/shrink over the repaired
//! feasible set, with a complete evaluation trace and parallel restarts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::design::surrogate::DesignEvaluator;
use crate::design::vector::{DesignBounds, DesignVector, N_DESIGN_PARAMS};
use crate::design::{evaluate, scale_to_target_wavelength, EvalStatus, FitnessEvaluation,
    DEFAULT_Q_THRESHOLD};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Tuning knobs for one simplex run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Evaluation budget (every candidate evaluation counts, including
    /// shrink steps and post-rescale re-evaluations).
    pub max_evals: usize,
    /// Convergence threshold on the relative spread of the per-iteration
    /// best fitness over the trailing window of `2 (n + 1)` iterations.
    /// Non-positive disables the fitness test.
    pub tol_f: f64,
    /// Convergence threshold on the simplex diameter, nm. Non-positive
    /// disables the diameter test.
    pub tol_x: f64,
    /// Quality-factor filter threshold applied to every evaluation.
    pub q_threshold: f64,
    /// Initial simplex edge length as a fraction of each box span.
    pub initial_step: f64,
    /// When set, every successful evaluation is rescaled to put its optical
    /// mode at this frequency (rad/s) and re-evaluated there; candidates
    /// whose rescaled geometry leaves the feasible set score zero.
    pub target_omega_o: Option<f64>,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            tol_f: 1e-4,
            tol_x: 0.0,
            q_threshold: DEFAULT_Q_THRESHOLD,
            initial_step: 0.10,
            target_omega_o: None,
        }
    }
}

/// One evaluated candidate in the search history.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// Restart this evaluation belongs to.
    pub restart: usize,
    /// Zero-based evaluation counter within the restart.
    pub eval_index: usize,
    /// The evaluation itself (its design is always feasible).
    pub evaluation: FitnessEvaluation,
}

/// Simplex geometry at the top of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSnapshot {
    /// Restart this snapshot belongs to.
    pub restart: usize,
    /// Zero-based iteration counter within the restart.
    pub iteration: usize,
    /// Vertices ordered best to worst.
    pub vertices: Vec<DesignVector>,
    /// Fitness per vertex, same order.
    pub fitnesses: Vec<f64>,
}

/// Append-only history of a search: every evaluation plus per-iteration
/// simplex snapshots.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchTrace {
    /// Every evaluation, ordered by (restart, evaluation index).
    pub records: Vec<TraceRecord>,
    /// Simplex snapshots, ordered by (restart, iteration).
    pub snapshots: Vec<SimplexSnapshot>,
}

impl SearchTrace {
    /// Total number of evaluations across all restarts.
    pub fn n_evaluations(&self) -> usize {
        self.records.len()
    }

    /// The best successful evaluation, i.e. the record with the most
    /// negative fitness among `Ok` statuses. Earlier records win ties.
    pub fn best(&self) -> Option<&TraceRecord> {
        self.records
            .iter()
            .filter(|r| r.evaluation.status == EvalStatus::Ok)
            .reduce(|best, r| {
                if r.evaluation.fitness < best.evaluation.fitness {
                    r
                } else {
                    best
                }
            })
    }

    /// Running best fitness over successful evaluations, in record order:
    /// one entry per `Ok` record, non-increasing by construction.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.records
            .iter()
            .filter(|r| r.evaluation.status == EvalStatus::Ok)
            .map(|r| {
                best = best.min(r.evaluation.fitness);
                best
            })
            .collect()
    }
}

/// Search state for one restart: counters, trace, and the evaluation
/// pipeline (repair, evaluate, optional rescale-and-re-evaluate).
struct Run<'a> {
    evaluator: &'a dyn DesignEvaluator,
    bounds: &'a DesignBounds,
    options: &'a NelderMeadOptions,
    rng: ChaCha8Rng,
    trace: SearchTrace,
    restart: usize,
    evals: usize,
}

impl<'a> Run<'a> {
    fn budget_left(&self) -> bool {
        self.evals < self.options.max_evals
    }

    /// Repair a candidate and push its evaluation onto the trace. With a
    /// wavelength target set, a successful evaluation is rescaled onto the
    /// target and re-evaluated there (one extra budget unit); a rescale that
    /// leaves the feasible set keeps the pre-scale modal data but scores
    /// zero with `EvalFailed`.
    fn eval_candidate(&mut self, raw: &DesignVector) -> FitnessEvaluation {
        let repaired = self.bounds.repair(raw);
        let mut record = evaluate(
            &repaired,
            self.evaluator,
            self.options.q_threshold,
            &mut self.rng,
        );
        self.push(record.clone());
        if let Some(target) = self.options.target_omega_o {
            if record.status == EvalStatus::Ok && self.budget_left() {
                match scale_to_target_wavelength(
                    &record.design,
                    record.omega_o,
                    target,
                    self.bounds,
                ) {
                    Ok(scaled) => {
                        record = evaluate(
                            &scaled,
                            self.evaluator,
                            self.options.q_threshold,
                            &mut self.rng,
                        );
                    }
                    Err(_) => {
                        record.status = EvalStatus::EvalFailed;
                        record.fitness = 0.0;
                    }
                }
                self.push(record.clone());
            }
        }
        record
    }

    fn push(&mut self, evaluation: FitnessEvaluation) {
        self.trace.records.push(TraceRecord {
            restart: self.restart,
            eval_index: self.evals,
            evaluation,
        });
        self.evals += 1;
    }
}

/// Minimize the fitness from `start` with a bounded Nelder–Mead simplex
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5). Every
/// candidate is projected into the feasible set by [`DesignBounds::repair`]
/// before evaluation, so the whole trace satisfies the constraints.
///
/// Terminates when the trailing-window fitness spread drops below `tol_f`,
/// the simplex diameter drops below `tol_x`, or the evaluation budget runs
/// out. Returns the best successful evaluation and the full trace.
pub fn nelder_mead(
    start: &DesignVector,
    evaluator: &dyn DesignEvaluator,
    bounds: &DesignBounds,
    options: &NelderMeadOptions,
    seed: u64,
) -> Result<(FitnessEvaluation, SearchTrace)> {
    bounds.check(start)?;
    run_simplex(start, evaluator, bounds, options, seed, 0)
}

fn run_simplex(
    start: &DesignVector,
    evaluator: &dyn DesignEvaluator,
    bounds: &DesignBounds,
    options: &NelderMeadOptions,
    seed: u64,
    restart: usize,
) -> Result<(FitnessEvaluation, SearchTrace)> {
    if options.max_evals < N_DESIGN_PARAMS + 2 {
        return Err(Error::NonPositive {
            name: "max_evals - (n + 1)",
            value: options.max_evals as f64 - (N_DESIGN_PARAMS + 1) as f64,
        });
    }
    Error::check_fraction("initial_step", options.initial_step)?;

    let mut run = Run {
        evaluator,
        bounds,
        options,
        rng: ChaCha8Rng::seed_from_u64(seed),
        trace: SearchTrace::default(),
        restart,
        evals: 0,
    };

    // Initial simplex: the start plus one step along each coordinate,
    // flipped inward when repair would collapse the vertex onto the start.
    let mut vertices: Vec<(DesignVector, f64)> = Vec::with_capacity(N_DESIGN_PARAMS + 1);
    let f0 = run.eval_candidate(start).fitness;
    vertices.push((*start, f0));
    for j in 0..N_DESIGN_PARAMS {
        let span = bounds.upper[j] - bounds.lower[j];
        let mut a = start.to_array();
        a[j] += options.initial_step * span;
        let mut vertex = bounds.repair(&DesignVector::from_array(a));
        if vertex.distance(start) < 1e-12 * span {
            a[j] -= 2.0 * options.initial_step * span;
            vertex = bounds.repair(&DesignVector::from_array(a));
        }
        let f = run.eval_candidate(&vertex).fitness;
        vertices.push((vertex, f));
    }

    let window = 2 * (N_DESIGN_PARAMS + 1);
    let mut recent_best: Vec<f64> = Vec::new();
    let mut iteration = 0usize;
    while run.budget_left() {
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
        run.trace.snapshots.push(SimplexSnapshot {
            restart,
            iteration,
            vertices: vertices.iter().map(|v| v.0).collect(),
            fitnesses: vertices.iter().map(|v| v.1).collect(),
        });
        iteration += 1;

        // Convergence: sustained-flat best fitness or a collapsed simplex.
        recent_best.push(vertices[0].1);
        if recent_best.len() > window {
            recent_best.remove(0);
        }
        if options.tol_f > 0.0 && recent_best.len() == window {
            let lo = recent_best.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = recent_best.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo <= options.tol_f * lo.abs().max(1e-300) {
                break;
            }
        }
        if options.tol_x > 0.0 {
            let diameter = vertices[1..]
                .iter()
                .map(|v| v.0.distance(&vertices[0].0))
                .fold(0.0f64, f64::max);
            if diameter <= options.tol_x {
                break;
            }
        }

        // Centroid of all but the worst vertex.
        let mut centroid = [0.0; N_DESIGN_PARAMS];
        for (v, _) in &vertices[..N_DESIGN_PARAMS] {
            for (c, x) in centroid.iter_mut().zip(v.to_array()) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= N_DESIGN_PARAMS as f64;
        }
        let worst = vertices[N_DESIGN_PARAMS].0.to_array();
        let blend = |t: f64| {
            let mut a = [0.0; N_DESIGN_PARAMS];
            for i in 0..N_DESIGN_PARAMS {
                a[i] = centroid[i] + t * (centroid[i] - worst[i]);
            }
            DesignVector::from_array(a)
        };

        let f_best = vertices[0].1;
        let f_second_worst = vertices[N_DESIGN_PARAMS - 1].1;
        let f_worst = vertices[N_DESIGN_PARAMS].1;

        let reflected = blend(1.0);
        let fr = run.eval_candidate(&reflected).fitness;
        let reflected = run.bounds.repair(&reflected);

        if fr < f_best && run.budget_left() {
            let expanded = blend(2.0);
            let fe = run.eval_candidate(&expanded).fitness;
            let expanded = run.bounds.repair(&expanded);
            vertices[N_DESIGN_PARAMS] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < f_second_worst {
            vertices[N_DESIGN_PARAMS] = (reflected, fr);
            continue;
        }
        if !run.budget_left() {
            break;
        }
        // Contract toward the better of the worst vertex and its reflection.
        let (contracted, f_compare) = if fr < f_worst {
            (blend(0.5), fr)
        } else {
            (blend(-0.5), f_worst)
        };
        let fc = run.eval_candidate(&contracted).fitness;
        let contracted = run.bounds.repair(&contracted);
        if fc <= f_compare {
            vertices[N_DESIGN_PARAMS] = (contracted, fc);
            continue;
        }
        // Shrink everything toward the best vertex.
        let best = vertices[0].0.to_array();
        for k in 1..=N_DESIGN_PARAMS {
            if !run.budget_left() {
                break;
            }
            let v = vertices[k].0.to_array();
            let mut a = [0.0; N_DESIGN_PARAMS];
            for i in 0..N_DESIGN_PARAMS {
                a[i] = best[i] + 0.5 * (v[i] - best[i]);
            }
            let shrunk = DesignVector::from_array(a);
            let fs = run.eval_candidate(&shrunk).fitness;
            vertices[k] = (run.bounds.repair(&shrunk), fs);
        }
    }

    let best = run
        .trace
        .best()
        .map(|r| r.evaluation.clone())
        .unwrap_or_else(|| run.trace.records[0].evaluation.clone());
    Ok((best, run.trace))
}

/// Repeat the search from `n_restarts` uniformly drawn feasible starts and
/// return the best result with the merged trace. Restart `r` draws its
/// start from substream `r` of `seed` and runs with a seed derived from
/// `(seed, r)`, so `n_restarts = 1` reproduces a single [`nelder_mead`] run
/// from that sampled start, and results are independent of how restarts are
/// scheduled across threads.
pub fn multi_restart(
    evaluator: &(dyn DesignEvaluator + Sync),
    bounds: &DesignBounds,
    n_restarts: usize,
    options: &NelderMeadOptions,
    seed: u64,
) -> Result<(FitnessEvaluation, SearchTrace)> {
    if n_restarts == 0 {
        return Err(Error::NonPositive {
            name: "n_restarts",
            value: 0.0,
        });
    }
    let runs: Vec<Result<(FitnessEvaluation, SearchTrace)>> = (0..n_restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let start = bounds.sample_feasible(&mut rng);
            run_simplex(
                &start,
                evaluator,
                bounds,
                options,
                derive_seed(seed, r as u64),
                r,
            )
        })
        .collect();

    let mut merged = SearchTrace::default();
    let mut best: Option<FitnessEvaluation> = None;
    for run in runs {
        let (candidate, trace) = run?;
        merged.records.extend(trace.records);
        merged.snapshots.extend(trace.snapshots);
        let better = match &best {
            None => true,
            Some(current) => {
                candidate.status == EvalStatus::Ok
                    && (current.status != EvalStatus::Ok || candidate.fitness < current.fitness)
            }
        };
        if better {
            best = Some(candidate);
        }
    }
    Ok((best.expect("at least one restart"), merged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::surrogate::{BoundarySurrogate, MultiWellSurrogate, QuadraticSurrogate};

    fn tight_options() -> NelderMeadOptions {
        NelderMeadOptions {
            max_evals: 2000,
            tol_f: 0.0,
            tol_x: 1e-3,
            ..NelderMeadOptions::default()
        }
    }

    #[test]
    fn convex_bowl_is_found_from_the_box_center() {
        let bounds = DesignBounds::reference();
        let surrogate = QuadraticSurrogate::reference(&bounds);
        let (opt, f_opt) = surrogate.known_optimum().unwrap();
        let (best, trace) =
            nelder_mead(&bounds.center(), &surrogate, &bounds, &tight_options(), 7).unwrap();
        assert!(
            (best.fitness - f_opt).abs() < 1e-6 * f_opt.abs(),
            "fitness {} vs optimum {} after {} evals",
            best.fitness,
            f_opt,
            trace.n_evaluations()
        );
        assert!(best.design.distance(&opt) < 1e-6 * bounds.diameter());
        assert!(trace.n_evaluations() < 2000);
    }

    #[test]
    fn boundary_optimum_lands_on_the_gap_face() {
        let bounds = DesignBounds::reference();
        let surrogate = BoundarySurrogate::reference(&bounds);
        let (best, _) =
            nelder_mead(&bounds.center(), &surrogate, &bounds, &tight_options(), 3).unwrap();
        let gap = best.design.h_oc - best.design.h_ic;
        assert!(
            (gap - bounds.min_gap).abs() < 1e-3,
            "best gap = {gap} nm, expected the {} nm face",
            bounds.min_gap
        );
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let bounds = DesignBounds::reference();
        let surrogate = QuadraticSurrogate::reference(&bounds);
        let mut bad = bounds.center();
        bad.h_i = bad.h_o - 10.0; // violates the 60 nm gap
        assert!(matches!(
            nelder_mead(&bad, &surrogate, &bounds, &NelderMeadOptions::default(), 0),
            Err(Error::InfeasibleStart(_))
        ));
    }

    #[test]
    fn every_trace_row_is_feasible_and_best_is_monotone() {
        let bounds = DesignBounds::reference();
        let surrogate = MultiWellSurrogate::reference(&bounds).with_noise(0.01);
        let (_, trace) =
            nelder_mead(&bounds.center(), &surrogate, &bounds, &NelderMeadOptions::default(), 5)
                .unwrap();
        assert!(trace.n_evaluations() > 0);
        for record in &trace.records {
            assert!(bounds.is_feasible(&record.evaluation.design));
        }
        let series = trace.best_so_far();
        for pair in series.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
    }

    #[test]
    fn traces_are_reproducible_for_a_fixed_seed() {
        let bounds = DesignBounds::reference();
        let surrogate = MultiWellSurrogate::reference(&bounds).with_noise(0.02);
        let opts = NelderMeadOptions {
            max_evals: 300,
            ..NelderMeadOptions::default()
        };
        let (a_best, a) = nelder_mead(&bounds.center(), &surrogate, &bounds, &opts, 11).unwrap();
        let (b_best, b) = nelder_mead(&bounds.center(), &surrogate, &bounds, &opts, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a_best, b_best);
        let (_, c) = nelder_mead(&bounds.center(), &surrogate, &bounds, &opts, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_restart_reduces_to_a_plain_run() {
        let bounds = DesignBounds::reference();
        let surrogate = QuadraticSurrogate::reference(&bounds);
        let opts = NelderMeadOptions {
            max_evals: 200,
            ..NelderMeadOptions::default()
        };
        let (multi_best, multi_trace) =
            multi_restart(&surrogate, &bounds, 1, &opts, 99).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        rng.set_stream(0);
        let start = bounds.sample_feasible(&mut rng);
        let (plain_best, plain_trace) =
            nelder_mead(&start, &surrogate, &bounds, &opts, derive_seed(99, 0)).unwrap();
        assert_eq!(multi_best, plain_best);
        assert_eq!(multi_trace, plain_trace);
    }

    #[test]
    fn restarts_merge_in_order_and_count_every_evaluation() {
        let bounds = DesignBounds::reference();
        let surrogate = MultiWellSurrogate::reference(&bounds);
        let opts = NelderMeadOptions {
            max_evals: 60,
            ..NelderMeadOptions::default()
        };
        let (_, trace) = multi_restart(&surrogate, &bounds, 4, &opts, 123).unwrap();
        let mut expected_restart = 0;
        let mut expected_index = 0;
        for record in &trace.records {
            if record.restart != expected_restart {
                assert_eq!(record.restart, expected_restart + 1, "restarts out of order");
                expected_restart = record.restart;
                expected_index = 0;
            }
            assert_eq!(record.eval_index, expected_index);
            expected_index += 1;
        }
        assert_eq!(expected_restart, 3);
        assert_eq!(trace.n_evaluations(), trace.records.len());
    }
}
