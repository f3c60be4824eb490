use serde::{Deserialize, Serialize};

use crate::data::{Dialog, NUM_ACTS};
use crate::{Error, Result};

/// Predicts each act and the like flag by training-set majority.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityBaseline {
    pub utterance_acts: [bool; NUM_ACTS],
    pub policy_acts: [bool; NUM_ACTS],
    pub liked: bool,
}

fn majority(count: usize, total: usize) -> bool {
    2 * count > total
}

impl MajorityBaseline {
    /// Utterance acts use every message, policy acts and likes use assistant
    /// messages. An exact 50% split predicts absent.
    pub fn fit<'a>(dialogs: impl IntoIterator<Item = &'a Dialog>) -> Result<Self> {
        let mut utt = [0usize; NUM_ACTS];
        let mut pol = [0usize; NUM_ACTS];
        let (mut n_all, mut n_asst, mut liked) = (0usize, 0usize, 0usize);
        for d in dialogs {
            for m in &d.messages {
                n_all += 1;
                for a in &m.acts {
                    utt[a.index()] += 1;
                }
                if m.is_assistant() {
                    n_asst += 1;
                    liked += m.liked as usize;
                    for a in &m.acts {
                        pol[a.index()] += 1;
                    }
                }
            }
        }
        if n_all == 0 {
            return Err(Error::EmptyInput("majority baseline training labels"));
        }
        Ok(MajorityBaseline {
            utterance_acts: utt.map(|c| majority(c, n_all)),
            policy_acts: pol.map(|c| majority(c, n_asst)),
            liked: majority(liked, n_asst),
        })
    }

    pub fn act_probs(acts: &[bool; NUM_ACTS]) -> Vec<f64> {
        acts.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}
