use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::acts::DialogAct;
use crate::corpus::FactBank;
use crate::error::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sender {
    User,
    Assistant,
}

impl Sender {
    pub fn index(self) -> usize {
        match self {
            Sender::User => 0,
            Sender::Assistant => 1,
        }
    }

    pub fn other(self) -> Sender {
        match self {
            Sender::User => Sender::Assistant,
            Sender::Assistant => Sender::User,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub sender: Sender,
    pub text: String,
    #[serde(default)]
    pub acts: BTreeSet<DialogAct>,
    /// Only meaningful on assistant messages.
    #[serde(default)]
    pub liked: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shown_facts: Option<FactBank>,
    #[serde(default)]
    pub used_fact_ids: BTreeSet<String>,
}

impl Message {
    pub fn user(text: impl Into<String>, acts: impl IntoIterator<Item = DialogAct>) -> Self {
        Message {
            sender: Sender::User,
            text: text.into(),
            acts: acts.into_iter().collect(),
            liked: false,
            shown_facts: None,
            used_fact_ids: BTreeSet::new(),
        }
    }

    pub fn assistant(text: impl Into<String>, acts: impl IntoIterator<Item = DialogAct>) -> Self {
        Message { sender: Sender::Assistant, ..Message::user(text, acts) }
    }

    pub fn is_assistant(&self) -> bool {
        self.sender == Sender::Assistant
    }

    pub fn has_inform(&self) -> bool {
        self.acts.iter().any(|a| a.is_inform())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dialog {
    pub id: String,
    /// Entity id of the dialog topic.
    pub topic: String,
    /// The two aspects assigned to the user, in discussion order.
    pub aspects: Vec<String>,
    #[serde(default)]
    pub known_entities: BTreeSet<String>,
    pub messages: Vec<Message>,
}

impl Dialog {
    /// All invariant violations, empty when the dialog is well formed.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut push = |field: String, reason: String| {
            out.push(Diagnostic { dialog: self.id.clone(), field, reason });
        };
        if self.id.is_empty() {
            push("id".into(), "empty id".into());
        }
        if self.topic.is_empty() {
            push("topic".into(), "empty topic".into());
        }
        if self.aspects.len() != 2 {
            push("aspects".into(), format!("expected exactly 2 aspects, found {}", self.aspects.len()));
        }
        if self.messages.is_empty() {
            push("messages".into(), "dialog has no messages".into());
        }
        let mut expected = Sender::User;
        for (i, m) in self.messages.iter().enumerate() {
            if m.sender != expected {
                push(format!("messages[{i}].sender"), format!("expected {expected:?}, speakers must alternate starting with User"));
            }
            expected = m.sender.other();
            if m.sender == Sender::User {
                if m.liked {
                    push(format!("messages[{i}].liked"), "user messages cannot be liked".into());
                }
                if m.shown_facts.is_some() {
                    push(format!("messages[{i}].shown_facts"), "only assistant messages carry fact banks".into());
                }
            }
            let shown: BTreeSet<&str> = m.shown_facts.iter().flat_map(|b| b.ids()).collect();
            for id in &m.used_fact_ids {
                if !shown.contains(id.as_str()) {
                    push(format!("messages[{i}].used_fact_ids"), format!("used fact `{id}` was not shown"));
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.diagnostics().is_empty()
    }

    pub fn assistant_messages(&self) -> impl Iterator<Item = &Message> {
        self.messages.iter().filter(|m| m.is_assistant())
    }
}
