//! Memory-resident batch decoding. Nothing here touches storage: jobs hold
//! their weights behind an `Arc` and results come back in job order.

use std::sync::Arc;

use rayon::prelude::*;

use crate::codec::{decode, EncodedImage, Image};

use super::{ArchKey, BatchPlan, PlanJob, SchedError};

/// An encoded image ready to decode, weights already in memory.
#[derive(Debug, Clone)]
pub struct DecodeJob {
    pub image_id: String,
    pub encoded: Arc<EncodedImage>,
}

impl DecodeJob {
    pub fn new(image_id: impl Into<String>, encoded: Arc<EncodedImage>) -> Self {
        Self {
            image_id: image_id.into(),
            encoded,
        }
    }

    pub fn arch_key(&self) -> ArchKey {
        ArchKey::new(self.encoded.bg_arch, self.encoded.obj_arch)
    }

    /// Planner view with cost = total parameter count.
    pub fn plan_job(&self) -> PlanJob {
        PlanJob::new(self.image_id.clone(), self.arch_key())
    }
}

fn pool(thread_budget: usize) -> Result<rayon::ThreadPool, SchedError> {
    if thread_budget == 0 {
        return Err(SchedError::InvalidThreadBudget);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_budget)
        .build()
        .map_err(|e| SchedError::ThreadPool(e.to_string()))
}

fn decode_one(job: &DecodeJob) -> Result<Image, SchedError> {
    decode(&job.encoded).map_err(|source| SchedError::Decode {
        image_id: job.image_id.clone(),
        source,
    })
}

/// Decodes every job on at most `thread_budget` threads.
///
/// Output `i` is bit-identical to decoding job `i` alone, whatever the budget.
/// On failure, the error of the first failing job (in job order) is returned.
pub fn decode_batch(jobs: &[DecodeJob], thread_budget: usize) -> Result<Vec<Image>, SchedError> {
    let pool = pool(thread_budget)?;
    pool.install(|| jobs.par_iter().map(decode_one).collect())
}

/// Decodes batch by batch in plan order; results are returned in job order.
pub fn decode_planned(
    jobs: &[DecodeJob],
    plan: &BatchPlan,
    thread_budget: usize,
) -> Result<Vec<Image>, SchedError> {
    plan.validate(jobs.len())?;
    let pool = pool(thread_budget)?;
    let mut out: Vec<Option<Image>> = vec![None; jobs.len()];
    for batch in &plan.batches {
        let images: Vec<Image> = pool.install(|| {
            batch
                .par_iter()
                .map(|&j| decode_one(&jobs[j]))
                .collect::<Result<_, _>>()
        })?;
        for (&j, img) in batch.iter().zip(images) {
            out[j] = Some(img);
        }
    }
    Ok(out
        .into_iter()
        .map(|o| o.expect("validated plan covers every job"))
        .collect())
}
