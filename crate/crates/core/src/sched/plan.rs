use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::inr::MlpArchitecture;

use super::SchedError;

/// The (background, object) network shapes of one encoded image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArchKey {
    pub background: MlpArchitecture,
    pub object: MlpArchitecture,
}

impl ArchKey {
    pub fn new(background: MlpArchitecture, object: MlpArchitecture) -> Self {
        Self { background, object }
    }

    /// Total parameters of both networks; the default decode cost.
    pub fn parameter_count(&self) -> u64 {
        (self.background.parameter_count() + self.object.parameter_count()) as u64
    }
}

impl fmt::Display for ArchKey {
    /// `10x30+3x10`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.background, self.object)
    }
}

impl FromStr for ArchKey {
    type Err = SchedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |detail: String| SchedError::InvalidArchKey(format!("`{s}`: {detail}"));
        let (bg, obj) = s
            .split_once('+')
            .ok_or_else(|| bad("expected `BGxH+OBJxH`".to_owned()))?;
        Ok(Self {
            background: bg
                .parse()
                .map_err(|e: crate::inr::InrError| bad(e.to_string()))?,
            object: obj
                .parse()
                .map_err(|e: crate::inr::InrError| bad(e.to_string()))?,
        })
    }
}

/// What the planner needs to know about a decode job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanJob {
    pub image_id: String,
    pub arch_key: ArchKey,
    /// Positive decode cost, by default the parameter count.
    pub cost: u64,
}

impl PlanJob {
    pub fn new(image_id: impl Into<String>, arch_key: ArchKey) -> Self {
        Self {
            image_id: image_id.into(),
            cost: arch_key.parameter_count(),
            arch_key,
        }
    }

    pub fn with_cost(mut self, cost: u64) -> Result<Self, SchedError> {
        if cost == 0 {
            return Err(SchedError::InvalidPlan(format!(
                "job {} has zero cost",
                self.image_id
            )));
        }
        self.cost = cost;
        Ok(self)
    }
}

/// Batches of job indices (into the job slice the plan was built from).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchPlan {
    pub batch_size: usize,
    pub batches: Vec<Vec<usize>>,
}

impl BatchPlan {
    /// Checks that every one of `job_count` jobs appears exactly once and
    /// that batches are non-empty and within `batch_size`.
    pub fn validate(&self, job_count: usize) -> Result<(), SchedError> {
        if self.batch_size == 0 {
            return Err(SchedError::InvalidBatchSize);
        }
        let mut seen = vec![false; job_count];
        for batch in &self.batches {
            if batch.is_empty() {
                return Err(SchedError::EmptyBatch);
            }
            if batch.len() > self.batch_size {
                return Err(SchedError::InvalidPlan(format!(
                    "batch of {} exceeds size {}",
                    batch.len(),
                    self.batch_size
                )));
            }
            for &j in batch {
                match seen.get_mut(j) {
                    Some(s) if !*s => *s = true,
                    Some(_) => {
                        return Err(SchedError::InvalidPlan(format!("job {j} appears twice")))
                    }
                    None => {
                        return Err(SchedError::InvalidPlan(format!(
                            "job index {j} out of range"
                        )))
                    }
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(SchedError::InvalidPlan(format!(
                "job {missing} is not scheduled"
            )));
        }
        Ok(())
    }
}

/// Decode time as an affine function of cost: `a + b·cost`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyModel {
    a: f64,
    b: f64,
}

impl LatencyModel {
    pub fn new(a: f64, b: f64) -> Result<Self, SchedError> {
        if !(a.is_finite() && a >= 0.0 && b.is_finite() && b > 0.0) {
            return Err(SchedError::InvalidLatencyModel(format!(
                "need a >= 0 and b > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// `time = cost`.
    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn time(&self, cost: u64) -> f64 {
        self.a + self.b * cost as f64
    }
}

impl Default for LatencyModel {
    fn default() -> Self {
        Self::unit()
    }
}

/// What to do with the jobs left over when a group does not fill its last batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RemainderPolicy {
    /// Pool the leftovers of all groups, sort by cost and batch them together.
    /// Yields a plan of minimum total latency.
    #[default]
    Merge,
    /// One undersized batch per group; every batch stays single-architecture.
    Isolate,
}

/// Groups jobs by architecture so batches are uniform in decode latency.
///
/// Each group's members are shuffled by `seed` and cut into full batches.
/// Leftovers follow `policy`. Batch emission order is shuffled by `seed` too.
pub fn group_by_arch(
    jobs: &[PlanJob],
    batch_size: usize,
    seed: u64,
    policy: RemainderPolicy,
) -> Result<BatchPlan, SchedError> {
    if batch_size == 0 {
        return Err(SchedError::InvalidBatchSize);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups: BTreeMap<ArchKey, Vec<usize>> = BTreeMap::new();
    for (i, job) in jobs.iter().enumerate() {
        groups.entry(job.arch_key).or_default().push(i);
    }

    let mut batches = Vec::with_capacity(jobs.len().div_ceil(batch_size));
    let mut leftovers = Vec::new();
    for members in groups.values_mut() {
        members.shuffle(&mut rng);
        let full = members.len() / batch_size * batch_size;
        batches.extend(members[..full].chunks(batch_size).map(<[usize]>::to_vec));
        match policy {
            RemainderPolicy::Merge => leftovers.extend_from_slice(&members[full..]),
            RemainderPolicy::Isolate if full < members.len() => {
                batches.push(members[full..].to_vec())
            }
            RemainderPolicy::Isolate => {}
        }
    }
    // Stable sort keeps same-cost leftovers in group order.
    leftovers.sort_by(|&x, &y| jobs[y].cost.cmp(&jobs[x].cost));
    batches.extend(leftovers.chunks(batch_size).map(<[usize]>::to_vec));
    batches.shuffle(&mut rng);
    Ok(BatchPlan {
        batch_size,
        batches,
    })
}

/// Cuts `order` into consecutive batches of `batch_size`: an ungrouped plan.
pub fn sequential_plan(order: &[usize], batch_size: usize) -> Result<BatchPlan, SchedError> {
    if batch_size == 0 {
        return Err(SchedError::InvalidBatchSize);
    }
    Ok(BatchPlan {
        batch_size,
        batches: order.chunks(batch_size).map(<[usize]>::to_vec).collect(),
    })
}

/// Ungrouped plan over a seeded random permutation of `job_count` jobs.
pub fn random_plan(
    job_count: usize,
    batch_size: usize,
    seed: u64,
) -> Result<BatchPlan, SchedError> {
    let mut order: Vec<usize> = (0..job_count).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    sequential_plan(&order, batch_size)
}

/// A batch finishes when its slowest member does.
pub fn batch_latency(
    batch: &[usize],
    jobs: &[PlanJob],
    model: &LatencyModel,
) -> Result<f64, SchedError> {
    let mut worst: Option<u64> = None;
    for &j in batch {
        let job = jobs
            .get(j)
            .ok_or_else(|| SchedError::InvalidPlan(format!("job index {j} out of range")))?;
        worst = Some(worst.map_or(job.cost, |w| w.max(job.cost)));
    }
    // Monotone model: the max cost gives the max time.
    worst.map(|c| model.time(c)).ok_or(SchedError::EmptyBatch)
}

/// Batches run back to back; the plan takes the sum of batch latencies.
pub fn plan_latency(
    plan: &BatchPlan,
    jobs: &[PlanJob],
    model: &LatencyModel,
) -> Result<f64, SchedError> {
    plan.validate(jobs.len())?;
    plan.batches
        .iter()
        .map(|b| batch_latency(b, jobs, model))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(obj_hidden: usize) -> ArchKey {
        ArchKey::new(
            MlpArchitecture::new(10, 30).unwrap(),
            MlpArchitecture::new(3, obj_hidden).unwrap(),
        )
    }

    /// `s` jobs cost 1 and `l` jobs cost 4.
    fn jobs(spec: &str) -> Vec<PlanJob> {
        spec.chars()
            .enumerate()
            .map(|(i, c)| {
                let (k, cost) = if c == 's' { (key(10), 1) } else { (key(15), 4) };
                PlanJob::new(format!("{c}{i}"), k).with_cost(cost).unwrap()
            })
            .collect()
    }

    fn costs(plan: &BatchPlan, jobs: &[PlanJob]) -> Vec<Vec<u64>> {
        let mut v: Vec<Vec<u64>> = plan
            .batches
            .iter()
            .map(|b| {
                let mut c: Vec<u64> = b.iter().map(|&j| jobs[j].cost).collect();
                c.sort();
                c
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn two_by_two_groups() {
        let j = jobs("ssll");
        let plan = group_by_arch(&j, 2, 0, RemainderPolicy::Merge).unwrap();
        assert_eq!(costs(&plan, &j), vec![vec![1, 1], vec![4, 4]]);
        let model = LatencyModel::unit();
        assert_eq!(plan_latency(&plan, &j, &model).unwrap(), 5.0);
        let mixed = sequential_plan(&[0, 2, 1, 3], 2).unwrap();
        assert_eq!(plan_latency(&mixed, &j, &model).unwrap(), 8.0);
    }

    #[test]
    fn isolated_remainders() {
        let j = jobs("sssl");
        let plan = group_by_arch(&j, 2, 3, RemainderPolicy::Isolate).unwrap();
        assert_eq!(costs(&plan, &j), vec![vec![1], vec![1, 1], vec![4]]);
        // Merging the two leftovers saves one batch leader.
        let merged = group_by_arch(&j, 2, 3, RemainderPolicy::Merge).unwrap();
        assert_eq!(costs(&merged, &j), vec![vec![1, 1], vec![1, 4]]);
        let m = LatencyModel::unit();
        assert_eq!(plan_latency(&plan, &j, &m).unwrap(), 6.0);
        assert_eq!(plan_latency(&merged, &j, &m).unwrap(), 5.0);
    }

    #[test]
    fn single_arch_uses_minimum_batches() {
        let j = jobs("sssss");
        let plan = group_by_arch(&j, 2, 9, RemainderPolicy::Merge).unwrap();
        assert_eq!(plan.batches.len(), 3);
        plan.validate(5).unwrap();
    }

    #[test]
    fn seed_determinism() {
        let j = jobs("slslsslls");
        let a = group_by_arch(&j, 3, 42, RemainderPolicy::Merge).unwrap();
        assert_eq!(a, group_by_arch(&j, 3, 42, RemainderPolicy::Merge).unwrap());
    }

    #[test]
    fn latency_examples() {
        let j = vec![
            PlanJob::new("a", key(10)).with_cost(100).unwrap(),
            PlanJob::new("b", key(15)).with_cost(400).unwrap(),
        ];
        let m = LatencyModel::unit();
        assert_eq!(batch_latency(&[0, 1], &j, &m).unwrap(), 400.0);
        assert_eq!(batch_latency(&[0], &j, &m).unwrap(), 100.0);
        assert_eq!(batch_latency(&[], &j, &m), Err(SchedError::EmptyBatch));
        let affine = LatencyModel::new(2.0, 0.5).unwrap();
        assert_eq!(batch_latency(&[0, 1], &j, &affine).unwrap(), 202.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(group_by_arch(&jobs("s"), 0, 0, RemainderPolicy::Merge).is_err());
        assert!(LatencyModel::new(-1.0, 1.0).is_err());
        assert!(LatencyModel::new(0.0, 0.0).is_err());
        assert!(PlanJob::new("x", key(10)).with_cost(0).is_err());
        let j = jobs("ss");
        let dup = BatchPlan {
            batch_size: 2,
            batches: vec![vec![0, 0]],
        };
        assert!(plan_latency(&dup, &j, &LatencyModel::unit()).is_err());
        let missing = BatchPlan {
            batch_size: 2,
            batches: vec![vec![0]],
        };
        assert!(missing.validate(2).is_err());
        let oversize = BatchPlan {
            batch_size: 1,
            batches: vec![vec![0, 1]],
        };
        assert!(oversize.validate(2).is_err());
    }

    #[test]
    fn arch_key_text() {
        let k: ArchKey = "10x30+3x10".parse().unwrap();
        assert_eq!(k, key(10));
        assert_eq!(k.to_string(), "10x30+3x10");
        assert_eq!(k.parameter_count(), 7623 + 173);
        assert!("10x30".parse::<ArchKey>().is_err());
        assert!("10x30+3".parse::<ArchKey>().is_err());
    }
}
