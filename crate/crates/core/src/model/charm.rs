//! The CHARM network: shared BiLSTM text encoder, dialog-level LSTM and
//! four task heads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::CharmConfig;
use super::features::{EncodedText, PreparedDialog, PreparedTurn};
use super::params::{ParamId, Params};
use super::tape::{sigmoid, softmax, Grads, Tape, Var};
use crate::data::NUM_ACTS;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Lstm {
    w: ParamId,
    b: ParamId,
    hidden: usize,
}

impl Lstm {
    fn new(p: &mut Params, name: &str, input: usize, hidden: usize, rng: &mut ChaCha8Rng) -> Self {
        let w = p.add_matrix(&format!("{name}.w"), 4 * hidden, input + hidden, rng);
        let b = p.add_bias(&format!("{name}.b"), 4 * hidden);
        // forget-gate bias starts at 1
        p.get_mut(b).data[hidden..2 * hidden].iter_mut().for_each(|x| *x = 1.0);
        Lstm { w, b, hidden }
    }

    /// Returns `(h, c)` after one step.
    fn step(&self, tape: &mut Tape, x: Var, h: Var, c: Var) -> (Var, Var) {
        let xh = tape.concat(&[x, h]);
        let gates = tape.affine(self.w, Some(self.b), xh);
        let out = tape.lstm_cell(gates, c);
        (tape.slice(out, 0, self.hidden), tape.slice(out, self.hidden, self.hidden))
    }
}

/// Parameter handles of a CHARM network.
#[derive(Debug, Clone, PartialEq)]
pub struct CharmParameters {
    pub params: Params,
    word_emb: ParamId,
    entity_emb: ParamId,
    act_emb: ParamId,
    speaker_emb: ParamId,
    enc_fwd: Lstm,
    enc_bwd: Lstm,
    context: Lstm,
    ablation_w: ParamId,
    ablation_b: ParamId,
    fact_w: ParamId,
    fact_b: ParamId,
    fact_bilinear: ParamId,
    fact_out_w: ParamId,
    fact_out_b: ParamId,
    policy_w: ParamId,
    policy_b: ParamId,
    utter_w: ParamId,
    utter_b: ParamId,
    like_w: ParamId,
    like_b: ParamId,
}

impl CharmParameters {
    pub fn new(config: &CharmConfig, n_words: usize, n_entities: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.init_seed);
        let mut p = Params::new();
        let c = config;
        let word_emb = p.add("embed.word", n_words, c.word_dim, 0.1, &mut rng);
        // padding row stays zero
        p.get_mut(word_emb).data[..c.word_dim].iter_mut().for_each(|x| *x = 0.0);
        let entity_emb = p.add("embed.entity", n_entities, c.entity_dim, 0.1, &mut rng);
        let act_emb = p.add("embed.act", NUM_ACTS, c.act_dim, 0.1, &mut rng);
        let speaker_emb = p.add("embed.speaker", 2, c.speaker_dim, 0.1, &mut rng);
        let enc_in = c.word_dim + c.entity_dim;
        let enc_fwd = Lstm::new(&mut p, "encoder.fwd", enc_in, c.encoder_hidden, &mut rng);
        let enc_bwd = Lstm::new(&mut p, "encoder.bwd", enc_in, c.encoder_hidden, &mut rng);
        let turn = c.turn_dim();
        let context = Lstm::new(&mut p, "context", turn, c.context_hidden, &mut rng);
        let ablation_w = p.add_matrix("ablation.w", c.context_hidden, turn, &mut rng);
        let ablation_b = p.add_bias("ablation.b", c.context_hidden);
        let fact_w = p.add_matrix("fact.w", c.fact_context_dim, c.context_hidden, &mut rng);
        let fact_b = p.add_bias("fact.b", c.fact_context_dim);
        let feat = c.fact_context_dim + c.text_dim();
        let fact_bilinear = p.add_matrix("fact.bilinear", c.fact_context_dim, c.text_dim(), &mut rng);
        let fact_out_w = p.add_matrix("fact.out.w", 1, feat, &mut rng);
        let fact_out_b = p.add_bias("fact.out.b", 1);
        let policy_w = p.add_matrix("policy.w", NUM_ACTS, c.context_hidden, &mut rng);
        let policy_b = p.add_bias("policy.b", NUM_ACTS);
        let utter_w = p.add_matrix("utterance.w", NUM_ACTS, c.context_hidden + turn, &mut rng);
        let utter_b = p.add_bias("utterance.b", NUM_ACTS);
        let like_w = p.add_matrix("like.w", 2, c.context_hidden, &mut rng);
        let like_b = p.add_bias("like.b", 2);
        CharmParameters {
            params: p,
            word_emb,
            entity_emb,
            act_emb,
            speaker_emb,
            enc_fwd,
            enc_bwd,
            context,
            ablation_w,
            ablation_b,
            fact_w,
            fact_b,
            fact_bilinear,
            fact_out_w,
            fact_out_b,
            policy_w,
            policy_b,
            utter_w,
            utter_b,
            like_w,
            like_b,
        }
    }

    pub fn n_words(&self) -> usize {
        self.params.get(self.word_emb).rows
    }

    pub fn n_entities(&self) -> usize {
        self.params.get(self.entity_emb).rows
    }

    pub fn entity_embedding(&self, id: u32) -> &[f64] {
        self.params.get(self.entity_emb).row(id as usize)
    }

    pub fn act_embedding(&self, act: usize) -> &[f64] {
        self.params.get(self.act_emb).row(act)
    }

    /// Replaces the values, keeping handles. The layouts must agree.
    pub fn load_values(&mut self, values: Params) -> Result<()> {
        if !self.params.same_layout(&values) {
            return Err(Error::CheckpointMismatch("parameter layout differs from the configuration".into()));
        }
        if !values.all_finite() {
            return Err(Error::CheckpointMismatch("parameters contain non-finite values".into()));
        }
        self.params = values;
        Ok(())
    }
}

/// The per-turn components of `c^i`.
#[derive(Debug, Clone, Copy)]
pub struct TurnInput {
    pub text: Var,
    pub acts: Var,
    pub topic: Var,
    pub known: Var,
    pub speaker: Var,
    /// `[text; acts; topic; known; speaker]`
    pub concat: Var,
}

/// One task's loss terms over a dialog, kept on the tape.
#[derive(Debug, Clone, Default)]
pub struct TaskTerms {
    pub fact: Vec<Var>,
    pub policy: Vec<Var>,
    pub utterance: Vec<Var>,
    pub like: Vec<Var>,
}

/// Graph handles for one dialog.
#[derive(Debug, Clone)]
pub struct DialogGraph {
    /// `h^0..h^T`; index `i` is the state after `i` turns.
    pub states: Vec<Var>,
    pub inputs: Vec<TurnInput>,
    pub fact_scores: Vec<Option<Var>>,
    pub policy_logits: Vec<Var>,
    pub utterance_logits: Vec<Var>,
    pub like_logits: Vec<Option<Var>>,
    pub terms: TaskTerms,
}

/// Predictions for one turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnOutput {
    pub candidate_ids: Vec<String>,
    pub fact_scores: Vec<f64>,
    pub fact_probs: Vec<f64>,
    pub policy_logits: Vec<f64>,
    pub policy_probs: Vec<f64>,
    pub utterance_logits: Vec<f64>,
    pub utterance_probs: Vec<f64>,
    pub like_prob: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOutput {
    pub dialog_id: String,
    pub turns: Vec<TurnOutput>,
}

/// Mean losses per task and their sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MultiTaskLosses {
    pub fact: f64,
    pub policy: f64,
    pub utterance: f64,
    pub like: f64,
    pub total: f64,
}

impl MultiTaskLosses {
    pub fn from_parts(fact: f64, policy: f64, utterance: f64, like: f64) -> Self {
        MultiTaskLosses { fact, policy, utterance, like, total: ((fact + like) + policy) + utterance }
    }

    pub fn is_finite(&self) -> bool {
        [self.fact, self.policy, self.utterance, self.like, self.total].iter().all(|x| x.is_finite())
    }
}

/// Number of loss units per task.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TaskCounts {
    pub fact: usize,
    pub policy: usize,
    pub utterance: usize,
    pub like: usize,
}

impl TaskCounts {
    pub fn of(dialog: &PreparedDialog) -> Self {
        let mut c = TaskCounts::default();
        for t in &dialog.turns {
            c.utterance += 1;
            if t.is_assistant() {
                c.policy += 1;
                c.like += 1;
                if !t.candidates.is_empty() {
                    c.fact += 1;
                }
            }
        }
        c
    }

    pub fn add(&mut self, o: TaskCounts) {
        self.fact += o.fact;
        self.policy += o.policy;
        self.utterance += o.utterance;
        self.like += o.like;
    }
}

/// Per-turn fact loss `(1/k) sum_j w_j y_j (-ln p_j)` as softmax coefficients.
pub fn fact_loss_coefficients(used: &[bool], positive_weight: f64) -> Vec<f64> {
    let k = used.len() as f64;
    used.iter().map(|&u| if u { positive_weight / k } else { 0.0 }).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Charm {
    pub config: CharmConfig,
    pub params: CharmParameters,
}

impl Charm {
    pub fn new(config: CharmConfig, n_words: usize, n_entities: usize) -> Result<Self> {
        config.validate()?;
        let params = CharmParameters::new(&config, n_words, n_entities);
        Ok(Charm { config, params })
    }

    fn p(&self) -> &CharmParameters {
        &self.params
    }

    fn entity_mean(&self, tape: &mut Tape, ids: &[u32]) -> Var {
        if ids.is_empty() {
            return tape.zeros(self.config.entity_dim);
        }
        let rows: Vec<Var> = ids.iter().map(|&e| tape.lookup(self.p().entity_emb, e as usize)).collect();
        if rows.len() == 1 {
            rows[0]
        } else {
            tape.mean(&rows)
        }
    }

    /// `E(t)`: final forward state and first backward state of the BiLSTM.
    pub fn encode_text(&self, tape: &mut Tape, text: &EncodedText) -> Var {
        let pad = [super::vocab::Vocab::PAD_ID];
        let tokens: &[u32] = if text.tokens.is_empty() { &pad } else { &text.tokens };
        let ent = self.entity_mean(tape, &text.entities);
        let inputs: Vec<Var> = tokens
            .iter()
            .map(|&w| {
                let e = tape.lookup(self.p().word_emb, w as usize);
                tape.concat(&[e, ent])
            })
            .collect();
        let h = self.config.encoder_hidden;
        let run = |tape: &mut Tape, lstm: &Lstm, order: &mut dyn Iterator<Item = &Var>| {
            let mut hs = tape.zeros(h);
            let mut cs = tape.zeros(h);
            for &x in order {
                (hs, cs) = lstm.step(tape, x, hs, cs);
            }
            hs
        };
        let fwd = run(tape, &self.p().enc_fwd, &mut inputs.iter());
        let bwd = run(tape, &self.p().enc_bwd, &mut inputs.iter().rev());
        tape.concat(&[fwd, bwd])
    }

    /// Turn input `c^i`; the act mean is zero when `mask_acts` or no acts.
    pub fn build_turn_input(&self, tape: &mut Tape, dialog: &PreparedDialog, turn: &PreparedTurn, mask_acts: bool) -> TurnInput {
        let text = self.encode_text(tape, &turn.text);
        self.turn_input_from_text(tape, dialog, turn, text, mask_acts)
    }

    fn turn_input_from_text(
        &self,
        tape: &mut Tape,
        dialog: &PreparedDialog,
        turn: &PreparedTurn,
        text: Var,
        mask_acts: bool,
    ) -> TurnInput {
        let acts = if mask_acts || turn.acts.is_empty() {
            tape.zeros(self.config.act_dim)
        } else {
            let rows: Vec<Var> = turn.acts.iter().map(|&a| tape.lookup(self.p().act_emb, a)).collect();
            tape.mean(&rows)
        };
        let topic = tape.lookup(self.p().entity_emb, dialog.topic as usize);
        let known = self.entity_mean(tape, &dialog.known);
        let speaker = tape.lookup(self.p().speaker_emb, turn.speaker.index());
        let concat = tape.concat(&[text, acts, topic, known, speaker]);
        TurnInput { text, acts, topic, known, speaker, concat }
    }

    /// States `h^0..h^T` for turn inputs `c^1..c^T`.
    pub fn contextualize(&self, tape: &mut Tape, inputs: &[Var]) -> Vec<Var> {
        let hd = self.config.context_hidden;
        let mut states = vec![tape.zeros(hd)];
        if self.config.use_context {
            let mut c = tape.zeros(hd);
            for &x in inputs {
                let (h, c2) = self.p().context.step(tape, x, *states.last().unwrap(), c);
                c = c2;
                states.push(h);
            }
        } else {
            for &x in inputs {
                let z = tape.affine(self.p().ablation_w, Some(self.p().ablation_b), x);
                states.push(tape.tanh(z));
            }
        }
        states
    }

    /// Candidate scores `s^f` from the previous state and encoded facts.
    ///
    /// Each candidate's features are `g = GELU([W^f h + b^f; E(f)])`. The
    /// score is a linear read-out of `g` plus a bilinear term between its
    /// context half and its fact half.
    pub fn score_facts(&self, tape: &mut Tape, h_prev: Var, facts: &[Var]) -> Result<Var> {
        if facts.is_empty() {
            return Err(Error::NoCandidates);
        }
        let p = self.p();
        let (cd, td) = (self.config.fact_context_dim, self.config.text_dim());
        let q = tape.affine(p.fact_w, Some(p.fact_b), h_prev);
        let scores: Vec<Var> = facts
            .iter()
            .map(|&f| {
                let cat = tape.concat(&[q, f]);
                let g = tape.gelu(cat);
                let linear = tape.affine(p.fact_out_w, Some(p.fact_out_b), g);
                let gc = tape.slice(g, 0, cd);
                let gf = tape.slice(g, cd, td);
                let mg = tape.affine(p.fact_bilinear, None, gf);
                let bilinear = tape.dot(gc, mg);
                tape.add(linear, bilinear)
            })
            .collect();
        Ok(tape.concat(&scores))
    }

    /// Policy logits from `h^{i-1}` and utterance-act logits from `d^i`.
    pub fn act_heads(&self, tape: &mut Tape, h_prev: Var, turn_input: Var) -> (Var, Var) {
        let p = self.p();
        let sp = tape.affine(p.policy_w, Some(p.policy_b), h_prev);
        let sp = tape.gelu(sp);
        let d = tape.concat(&[h_prev, turn_input]);
        let su = tape.affine(p.utter_w, Some(p.utter_b), d);
        (sp, tape.gelu(su))
    }

    /// Two-way like logits from `h^i`.
    pub fn like_head(&self, tape: &mut Tape, h: Var) -> Var {
        let z = tape.affine(self.p().like_w, Some(self.p().like_b), h);
        tape.gelu(z)
    }

    /// Builds the full graph for a dialog, including per-turn loss terms.
    pub fn build_graph(&self, tape: &mut Tape, dialog: &PreparedDialog) -> DialogGraph {
        let mask = self.config.mask_current_acts_for_utterance_head;
        let facts: Vec<Var> = dialog.facts.iter().map(|f| self.encode_text(tape, f)).collect();
        let mut inputs = Vec::with_capacity(dialog.turns.len());
        let mut head_inputs = Vec::with_capacity(dialog.turns.len());
        for turn in &dialog.turns {
            let text = self.encode_text(tape, &turn.text);
            let full = self.turn_input_from_text(tape, dialog, turn, text, false);
            let head = if mask { self.turn_input_from_text(tape, dialog, turn, text, true).concat } else { full.concat };
            inputs.push(full);
            head_inputs.push(head);
        }
        let concat: Vec<Var> = inputs.iter().map(|t| t.concat).collect();
        let states = self.contextualize(tape, &concat);

        let mut g = DialogGraph {
            states: states.clone(),
            inputs,
            fact_scores: Vec::new(),
            policy_logits: Vec::new(),
            utterance_logits: Vec::new(),
            like_logits: Vec::new(),
            terms: TaskTerms::default(),
        };
        for (i, turn) in dialog.turns.iter().enumerate() {
            let h_prev = states[i];
            let (sp, su) = self.act_heads(tape, h_prev, head_inputs[i]);
            let labels = turn.act_labels();
            g.terms.utterance.push(tape.sigmoid_bce(su, &labels));
            g.policy_logits.push(sp);
            g.utterance_logits.push(su);
            if turn.is_assistant() {
                g.terms.policy.push(tape.sigmoid_bce(sp, &labels));
                let sl = self.like_head(tape, states[i + 1]);
                let y = if turn.liked { [0.0, 1.0] } else { [1.0, 0.0] };
                g.terms.like.push(tape.softmax_xent(sl, &y));
                g.like_logits.push(Some(sl));
                if turn.candidates.is_empty() {
                    g.fact_scores.push(None);
                } else {
                    let cand: Vec<Var> = turn.candidates.iter().map(|&c| facts[c]).collect();
                    let s = self.score_facts(tape, h_prev, &cand).expect("non-empty candidates");
                    let coef = fact_loss_coefficients(&turn.used, self.config.positive_weight);
                    g.terms.fact.push(tape.softmax_xent(s, &coef));
                    g.fact_scores.push(Some(s));
                }
            } else {
                g.like_logits.push(None);
                g.fact_scores.push(None);
            }
        }
        g
    }

    /// Forward pass in evaluation mode.
    pub fn predict(&self, dialog: &PreparedDialog) -> ModelOutput {
        let mut tape = Tape::new(&self.params.params);
        let g = self.build_graph(&mut tape, dialog);
        let turns = dialog
            .turns
            .iter()
            .enumerate()
            .map(|(i, turn)| {
                let (fact_scores, fact_probs) = match g.fact_scores[i] {
                    Some(s) => {
                        let s = tape.value(s).to_vec();
                        let p = softmax(&s);
                        (s, p)
                    }
                    None => (Vec::new(), Vec::new()),
                };
                let pl = tape.value(g.policy_logits[i]).to_vec();
                let ul = tape.value(g.utterance_logits[i]).to_vec();
                TurnOutput {
                    candidate_ids: turn.candidate_ids.clone(),
                    fact_scores,
                    fact_probs,
                    policy_probs: pl.iter().map(|&z| sigmoid(z)).collect(),
                    policy_logits: pl,
                    utterance_probs: ul.iter().map(|&z| sigmoid(z)).collect(),
                    utterance_logits: ul,
                    like_prob: g.like_logits[i].map(|v| softmax(tape.value(v))[1]),
                }
            })
            .collect();
        ModelOutput { dialog_id: dialog.id.clone(), turns }
    }

    /// Task loss sums for one dialog, without gradients.
    pub fn dialog_loss_sums(&self, dialog: &PreparedDialog) -> [f64; 4] {
        let mut tape = Tape::new(&self.params.params);
        let g = self.build_graph(&mut tape, dialog);
        let sum = |vs: &[Var]| vs.iter().map(|&v| tape.scalar(v)).sum::<f64>();
        [sum(&g.terms.fact), sum(&g.terms.policy), sum(&g.terms.utterance), sum(&g.terms.like)]
    }

    /// Mean task losses over a set of dialogs.
    pub fn losses(&self, dialogs: &[PreparedDialog]) -> MultiTaskLosses {
        let mut sums = [0.0; 4];
        let mut counts = TaskCounts::default();
        for d in dialogs {
            let s = self.dialog_loss_sums(d);
            for k in 0..4 {
                sums[k] += s[k];
            }
            counts.add(TaskCounts::of(d));
        }
        let mean = |s: f64, n: usize| if n == 0 { 0.0 } else { s / n as f64 };
        MultiTaskLosses::from_parts(
            mean(sums[0], counts.fact),
            mean(sums[1], counts.policy),
            mean(sums[2], counts.utterance),
            mean(sums[3], counts.like),
        )
    }

    /// Accumulates gradients of the batch objective for one dialog, where
    /// each task's terms are divided by that task's batch-wide count.
    /// `tasks` selects which of fact, policy, utterance, like contribute.
    /// Returns the dialog's task loss sums.
    pub fn accumulate_gradients(
        &self,
        dialog: &PreparedDialog,
        batch: TaskCounts,
        tasks: [bool; 4],
        grads: &mut Grads,
    ) -> [f64; 4] {
        let mut tape = Tape::new(&self.params.params);
        let g = self.build_graph(&mut tape, dialog);
        let groups = [(&g.terms.fact, batch.fact), (&g.terms.policy, batch.policy), (&g.terms.utterance, batch.utterance), (&g.terms.like, batch.like)];
        let mut sums = [0.0; 4];
        let mut parts = Vec::new();
        for (k, (terms, n)) in groups.iter().enumerate() {
            sums[k] = terms.iter().map(|&v| tape.scalar(v)).sum();
            if tasks[k] && !terms.is_empty() && *n > 0 {
                let s = tape.sum(terms);
                parts.push(tape.scale(s, 1.0 / *n as f64));
            }
        }
        if !parts.is_empty() {
            let root = tape.sum(&parts);
            tape.backward(root, grads);
        }
        sums
    }
}
