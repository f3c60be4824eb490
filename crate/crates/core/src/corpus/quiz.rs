use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Entity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuizConfig {
    pub buckets: usize,
    pub size: usize,
}

impl Default for QuizConfig {
    fn default() -> Self {
        QuizConfig { buckets: 10, size: 15 }
    }
}

/// Samples the entities shown in the pre-dialog knowledge quiz.
///
/// Entities are sorted by descending view count (ties by id) and cut into
/// `buckets` rank deciles. Passes then visit the buckets from most to least
/// popular, drawing one remaining entity uniformly from each non-empty bucket,
/// until `size` entities are drawn or none remain. Returned in draw order.
pub fn sample_knowledge_quiz(related: &[Entity], seed: u64, config: &QuizConfig) -> Vec<String> {
    let mut sorted: Vec<&Entity> = related.iter().collect();
    sorted.sort_by(|a, b| b.view_count.cmp(&a.view_count).then_with(|| a.id.cmp(&b.id)));
    sorted.dedup_by(|a, b| a.id == b.id);

    let n = sorted.len();
    let k = config.buckets.max(1);
    let mut buckets: Vec<Vec<&Entity>> = vec![Vec::new(); k];
    for (rank, e) in sorted.into_iter().enumerate() {
        buckets[rank * k / n].push(e);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(config.size.min(n));
    while out.len() < config.size && buckets.iter().any(|b| !b.is_empty()) {
        for bucket in buckets.iter_mut().filter(|b| !b.is_empty()) {
            if out.len() == config.size {
                break;
            }
            let pick = rng.gen_range(0..bucket.len());
            out.push(bucket.remove(pick).id.clone());
        }
    }
    out
}
