//! Binary particle swarm optimization for wrapper feature selection.
//!
//! Particles carry a bit mask over the feature columns and a real velocity
//! per bit. Velocities move toward each particle's local best and the swarm
//! global best (no inertia term) and are clamped to `[-vmax, vmax]`; bits
//! resample with probability `sigmoid(velocity)`. The fitness of a mask is,
//! by default, the mean stratified cross-validation accuracy of an
//! alternating decision tree trained on the masked features.
//!
//! Randomness is partitioned per particle per iteration (one stream each),
//! so runs reproduce exactly regardless of evaluation concurrency.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adtree::train_adtree_with_positive;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::eval::folds::{stratified_folds, FoldPlan};

/// Swarm parameters. Defaults: 50 particles, 100 iterations, cognitive and
/// social factors 2, velocity clamp 4.
#[derive(Debug, Clone)]
pub struct SwarmConfig {
    pub particles: usize,
    pub iterations: usize,
    pub c1: f64,
    pub c2: f64,
    pub vmax: f64,
    pub seed: u64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        SwarmConfig {
            particles: 50,
            iterations: 100,
            c1: 2.0,
            c2: 2.0,
            vmax: 4.0,
            seed: 0,
        }
    }
}

impl SwarmConfig {
    fn validate(&self) -> Result<()> {
        if self.particles < 1 {
            return Err(Error::InvalidArgument("swarm needs at least 1 particle".into()));
        }
        if self.iterations < 1 {
            return Err(Error::InvalidArgument("swarm needs at least 1 iteration".into()));
        }
        if self.c1 < 0.0 || self.c2 < 0.0 {
            return Err(Error::InvalidArgument(
                "cognitive and social factors must be nonnegative".into(),
            ));
        }
        if !(self.vmax > 0.0) {
            return Err(Error::InvalidArgument("vmax must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Particle {
    pub position: Vec<bool>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<bool>,
    pub best_fitness: f64,
}

/// Outcome of a swarm run.
#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub best_mask: Vec<bool>,
    pub best_fitness: f64,
    /// Global best fitness after initialization and after each iteration;
    /// nondecreasing by construction.
    pub history: Vec<f64>,
    /// Distinct masks actually evaluated (cache misses).
    pub evaluations: usize,
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Swarm state, advanced one iteration at a time.
pub struct Swarm {
    config: SwarmConfig,
    n_features: usize,
    particles: Vec<Particle>,
    global_best: Vec<bool>,
    global_fitness: f64,
    iteration: usize,
    history: Vec<f64>,
    cache: HashMap<Vec<bool>, f64>,
    evaluations: usize,
}

impl Swarm {
    /// Initialize positions from the seed's stream 0 and evaluate them.
    pub fn new<F>(n_features: usize, config: SwarmConfig, fitness: &F) -> Result<Swarm>
    where
        F: Fn(&[bool]) -> f64 + Sync,
    {
        config.validate()?;
        if n_features == 0 {
            return Err(Error::InvalidArgument("no features to select from".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let particles: Vec<Particle> = (0..config.particles)
            .map(|_| {
                let position: Vec<bool> = (0..n_features).map(|_| rng.gen_bool(0.5)).collect();
                Particle {
                    best_position: position.clone(),
                    position,
                    velocity: vec![0.0; n_features],
                    best_fitness: f64::NEG_INFINITY,
                }
            })
            .collect();
        let mut swarm = Swarm {
            config,
            n_features,
            particles,
            global_best: Vec::new(),
            global_fitness: f64::NEG_INFINITY,
            iteration: 0,
            history: Vec::new(),
            cache: HashMap::new(),
            evaluations: 0,
        };
        swarm.evaluate_and_update(fitness);
        swarm.history.push(swarm.global_fitness);
        Ok(swarm)
    }

    fn evaluate_and_update<F>(&mut self, fitness: &F)
    where
        F: Fn(&[bool]) -> f64 + Sync,
    {
        // Deduplicate uncached masks, evaluate them in parallel, then update
        // bests in particle order so tie handling stays deterministic.
        let mut pending: Vec<Vec<bool>> = Vec::new();
        for p in &self.particles {
            if !self.cache.contains_key(&p.position) && !pending.contains(&p.position) {
                pending.push(p.position.clone());
            }
        }
        let scores: Vec<f64> = pending.par_iter().map(|mask| fitness(mask)).collect();
        self.evaluations += pending.len();
        for (mask, score) in pending.into_iter().zip(scores) {
            self.cache.insert(mask, score);
        }
        for p in &mut self.particles {
            let f = self.cache[&p.position];
            if f > p.best_fitness {
                p.best_fitness = f;
                p.best_position = p.position.clone();
            }
            if f > self.global_fitness {
                self.global_fitness = f;
                self.global_best = p.position.clone();
            }
        }
    }

    /// One iteration: velocity update toward local and global bests, clamp,
    /// sigmoid resampling, evaluation, best bookkeeping.
    pub fn step<F>(&mut self, fitness: &F)
    where
        F: Fn(&[bool]) -> f64 + Sync,
    {
        self.iteration += 1;
        let z = self.config.particles as u64;
        for (pi, p) in self.particles.iter_mut().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
            rng.set_stream(1 + self.iteration as u64 * z + pi as u64);
            for f in 0..self.n_features {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                let x = p.position[f] as u8 as f64;
                let local = p.best_position[f] as u8 as f64;
                let global = self.global_best[f] as u8 as f64;
                let mut v = p.velocity[f]
                    + self.config.c1 * r1 * (local - x)
                    + self.config.c2 * r2 * (global - x);
                v = v.clamp(-self.config.vmax, self.config.vmax);
                p.velocity[f] = v;
                let u: f64 = rng.gen();
                p.position[f] = u < sigmoid(v);
            }
        }
        self.evaluate_and_update(fitness);
        self.history.push(self.global_fitness);
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn global_best(&self) -> (&[bool], f64) {
        (&self.global_best, self.global_fitness)
    }

    pub fn result(&self) -> SelectionResult {
        SelectionResult {
            best_mask: self.global_best.clone(),
            best_fitness: self.global_fitness,
            history: self.history.clone(),
            evaluations: self.evaluations,
        }
    }
}

/// Run a full swarm optimization of an arbitrary mask fitness function.
pub fn optimize<F>(n_features: usize, config: SwarmConfig, fitness: F) -> Result<SelectionResult>
where
    F: Fn(&[bool]) -> f64 + Sync,
{
    let iterations = config.iterations;
    let mut swarm = Swarm::new(n_features, config, &fitness)?;
    for _ in 0..iterations {
        swarm.step(&fitness);
    }
    Ok(swarm.result())
}

/// Mask fitness backed by the downstream classifier: mean stratified k-fold
/// accuracy of an alternating decision tree trained on the masked features.
/// The fold plan is fixed up front (row stratification does not depend on
/// the mask), so repeated masks score identically. The empty mask scores 0.
pub struct SubsetAccuracy<'a> {
    data: &'a Dataset,
    plan: FoldPlan,
    positive: String,
    adt_iterations: usize,
}

impl<'a> SubsetAccuracy<'a> {
    pub fn new(
        data: &'a Dataset,
        folds: usize,
        adt_iterations: usize,
        seed: u64,
    ) -> Result<SubsetAccuracy<'a>> {
        if data.missing_count() > 0 {
            return Err(Error::InvalidArgument(
                "fitness evaluation needs an imputed dataset".into(),
            ));
        }
        let plan = stratified_folds(data, folds, seed)?;
        let positive = data.decision_label(0).to_string();
        Ok(SubsetAccuracy {
            data,
            plan,
            positive,
            adt_iterations,
        })
    }

    pub fn evaluate(&self, mask: &[bool]) -> f64 {
        if mask.iter().all(|b| !b) {
            return 0.0;
        }
        let projected = self.data.project(mask).expect("mask length checked by caller");
        let mut fold_accuracies = Vec::with_capacity(self.plan.folds.len());
        for fold in &self.plan.folds {
            let train = projected.subset_rows(&fold.train);
            let tree = match train_adtree_with_positive(&train, self.adt_iterations, &self.positive)
            {
                Ok(t) => t,
                Err(_) => return 0.0,
            };
            let correct = fold
                .test
                .iter()
                .filter(|&&i| {
                    tree.score(projected.feature_row(i)).label == projected.decision_label(i)
                })
                .count();
            fold_accuracies.push(correct as f64 / fold.test.len().max(1) as f64);
        }
        fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64
    }
}

/// Feature subset chosen for a dataset.
#[derive(Debug, Clone)]
pub struct FeatureSelection {
    pub result: SelectionResult,
    /// Names of the selected features, in schema order.
    pub selected_names: Vec<String>,
}

/// Wrapper selection over an imputed dataset: swarm search with the
/// classifier-accuracy fitness.
pub fn run_selection(
    data: &Dataset,
    config: SwarmConfig,
    fitness_folds: usize,
    adt_iterations: usize,
    fitness_seed: u64,
) -> Result<FeatureSelection> {
    let fitness = SubsetAccuracy::new(data, fitness_folds, adt_iterations, fitness_seed)?;
    let result = optimize(data.n_features(), config, |mask: &[bool]| {
        fitness.evaluate(mask)
    })?;
    let selected_names = data
        .schema()
        .iter()
        .take(data.n_features())
        .zip(&result.best_mask)
        .filter(|(_, keep)| **keep)
        .map(|(c, _)| c.name.clone())
        .collect();
    Ok(FeatureSelection {
        result,
        selected_names,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn onemax(mask: &[bool]) -> f64 {
        mask.iter().filter(|b| **b).count() as f64 / mask.len() as f64
    }

    fn small_config(seed: u64) -> SwarmConfig {
        SwarmConfig {
            particles: 20,
            iterations: 50,
            seed,
            ..SwarmConfig::default()
        }
    }

    #[test]
    fn onemax_reaches_optimum() {
        let result = optimize(8, small_config(1), onemax).unwrap();
        assert_eq!(result.best_fitness, 1.0);
        assert!(result.best_mask.iter().all(|b| *b));
    }

    #[test]
    fn history_is_monotone_and_bounded() {
        let result = optimize(8, small_config(2), onemax).unwrap();
        assert_eq!(result.history.len(), 51);
        for w in result.history.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(result.evaluations <= 20 * 50 + 20);
    }

    #[test]
    fn fixed_seed_reproduces_trajectory() {
        let a = optimize(10, small_config(7), onemax).unwrap();
        let b = optimize(10, small_config(7), onemax).unwrap();
        assert_eq!(a.best_mask, b.best_mask);
        assert_eq!(a.history, b.history);
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn velocities_stay_clamped() {
        let fitness = onemax;
        let config = SwarmConfig {
            particles: 10,
            iterations: 1,
            vmax: 2.5,
            seed: 3,
            ..SwarmConfig::default()
        };
        let mut swarm = Swarm::new(6, config, &fitness).unwrap();
        for _ in 0..30 {
            swarm.step(&fitness);
            for p in swarm.particles() {
                assert!(p.velocity.iter().all(|v| v.abs() <= 2.5));
            }
        }
    }

    #[test]
    fn particle_at_global_best_keeps_zero_velocity() {
        // Single particle: local best equals global best equals position on
        // a constant fitness, so the update terms vanish.
        let constant = |_: &[bool]| 0.5;
        let config = SwarmConfig {
            particles: 1,
            iterations: 1,
            seed: 5,
            ..SwarmConfig::default()
        };
        let mut swarm = Swarm::new(4, config, &constant).unwrap();
        let before = swarm.particles()[0].position.clone();
        swarm.step(&constant);
        // Velocity never left zero, so sigmoid(0) = 0.5 resampling ran; the
        // velocity itself must still be exactly zero.
        assert!(swarm.particles()[0].velocity.iter().all(|v| *v == 0.0));
        let _ = before;
    }

    #[test]
    fn sigmoid_at_vmax() {
        assert!((sigmoid(4.0) - 0.9820137900379085).abs() < 1e-12);
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn degenerate_single_particle_single_iteration() {
        let config = SwarmConfig {
            particles: 1,
            iterations: 1,
            seed: 11,
            ..SwarmConfig::default()
        };
        let result = optimize(5, config, onemax).unwrap();
        // The best can only improve on the initial evaluation.
        assert!(result.best_fitness >= result.history[0]);
        assert_eq!(result.history.len(), 2);
    }

    #[test]
    fn best_mask_was_actually_evaluated() {
        let result = optimize(8, small_config(9), onemax).unwrap();
        assert_eq!(onemax(&result.best_mask), result.best_fitness);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(optimize(4, SwarmConfig { particles: 0, ..Default::default() }, onemax).is_err());
        assert!(optimize(4, SwarmConfig { vmax: 0.0, ..Default::default() }, onemax).is_err());
        assert!(optimize(0, SwarmConfig::default(), onemax).is_err());
    }

    #[test]
    fn empty_mask_scores_zero_through_dataset_fitness() {
        let data = crate::dataset::generate_synthetic(40, 4, 0.0, 2).unwrap();
        let fitness = SubsetAccuracy::new(&data, 3, 3, 0).unwrap();
        assert_eq!(fitness.evaluate(&[false, false, false]), 0.0);
        let full = fitness.evaluate(&[true, true, true]);
        assert!(full > 0.0 && full <= 1.0);
        assert_eq!(full, fitness.evaluate(&[true, true, true]));
    }

    #[test]
    fn selection_finds_predictive_feature() {
        // Feature 0 of the generator is class-shifted; with a strong shift
        // any mask containing it beats chance, so the best mask keeps it.
        let data = crate::dataset::generate_synthetic(60, 4, 0.0, 12).unwrap();
        let config = SwarmConfig {
            particles: 8,
            iterations: 6,
            seed: 4,
            ..SwarmConfig::default()
        };
        let sel = run_selection(&data, config, 3, 3, 99).unwrap();
        assert!(sel.result.best_mask[0]);
        assert!(sel.selected_names.contains(&"f0".to_string()));
    }
}
