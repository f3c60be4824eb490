use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use serde_json::Value;

use super::acts::DialogAct;
use super::dialog::{Dialog, Message, Sender};
use crate::corpus::{FactBank, FactCategory, FactSlot, SlotGroup};
use crate::error::Diagnostic;
use crate::{Error, Result};

/// Source layout of a dialog file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adapter {
    /// One canonical [`Dialog`] JSON object per line.
    Canonical,
    /// The public dataset release: one JSON document with a `dialogs` array.
    Released,
}

impl FromStr for Adapter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Adapter::Canonical),
            "released" => Ok(Adapter::Released),
            other => Err(Error::UnknownAdapter(other.to_string())),
        }
    }
}

/// Reads and validates dialogs. Every malformed dialog is reported; nothing is
/// dropped silently.
pub fn ingest_dialogs(path: &Path, adapter: Adapter) -> Result<Vec<Dialog>> {
    let (dialogs, mut diags) = match adapter {
        Adapter::Canonical => read_canonical(path)?,
        Adapter::Released => read_released(path)?,
    };
    let mut seen = BTreeSet::new();
    for d in &dialogs {
        diags.extend(d.diagnostics());
        if !seen.insert(d.id.as_str()) {
            diags.push(Diagnostic { dialog: d.id.clone(), field: "id".into(), reason: "duplicate dialog id".into() });
        }
    }
    if diags.is_empty() {
        Ok(dialogs)
    } else {
        Err(Error::Schema(diags))
    }
}

pub fn write_dialogs(path: &Path, dialogs: &[Dialog]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for d in dialogs {
        serde_json::to_writer(&mut w, d)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn id_hint(v: &Value, key: &str, fallback: String) -> String {
    match v.get(key) {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => fallback,
    }
}

fn field_of(err: &serde_json::Error) -> String {
    let msg = err.to_string();
    msg.split('`').nth(1).map(str::to_string).unwrap_or_else(|| "<record>".into())
}

fn read_canonical(path: &Path) -> Result<(Vec<Dialog>, Vec<Diagnostic>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut dialogs = Vec::new();
    let mut diags = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|source| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            source,
        })?;
        let hint = id_hint(&value, "id", format!("line {}", n + 1));
        match serde_json::from_value::<Dialog>(value) {
            Ok(d) => dialogs.push(d),
            Err(e) => diags.push(Diagnostic { dialog: hint, field: field_of(&e), reason: e.to_string() }),
        }
    }
    Ok((dialogs, diags))
}

#[derive(Deserialize)]
struct ReleasedDialog {
    dialog_id: Value,
    focus_entity: String,
    first_aspect: String,
    second_aspect: String,
    #[serde(default)]
    known_entities: Vec<String>,
    messages: Vec<ReleasedMessage>,
}

#[derive(Deserialize)]
struct ReleasedMessage {
    message: String,
    sender: String,
    #[serde(default)]
    liked: bool,
    #[serde(default)]
    dialog_acts: Vec<String>,
    #[serde(default)]
    facts: Vec<ReleasedFact>,
}

#[derive(Deserialize)]
struct ReleasedFact {
    fid: Value,
    #[serde(default)]
    used: bool,
    #[serde(default)]
    source: Option<String>,
}

fn value_id(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn convert_released(raw: ReleasedDialog, diags: &mut Vec<Diagnostic>) -> Dialog {
    let id = value_id(&raw.dialog_id);
    let mut messages = Vec::with_capacity(raw.messages.len());
    for (i, m) in raw.messages.into_iter().enumerate() {
        let sender = match m.sender.as_str() {
            "user" => Sender::User,
            "assistant" | "teacher" => Sender::Assistant,
            other => {
                diags.push(Diagnostic {
                    dialog: id.clone(),
                    field: format!("messages[{i}].sender"),
                    reason: format!("unknown sender `{other}`"),
                });
                Sender::User
            }
        };
        let mut acts = BTreeSet::new();
        for a in &m.dialog_acts {
            match a.parse::<DialogAct>() {
                Ok(act) => {
                    acts.insert(act);
                }
                Err(reason) => diags.push(Diagnostic {
                    dialog: id.clone(),
                    field: format!("messages[{i}].dialog_acts"),
                    reason,
                }),
            }
        }
        let shown_facts = if m.facts.is_empty() || sender == Sender::User {
            None
        } else {
            let slots = m
                .facts
                .iter()
                .map(|f| {
                    let group = match f.source.as_deref() {
                        Some("known") => SlotGroup::Rooted,
                        Some("section") => SlotGroup::Aspect,
                        _ => SlotGroup::General,
                    };
                    FactSlot {
                        fact_id: value_id(&f.fid),
                        group,
                        category: if group == SlotGroup::Aspect { FactCategory::Aspect } else { FactCategory::General },
                        rooted: group == SlotGroup::Rooted,
                        score: 0.0,
                        backfilled: false,
                    }
                })
                .collect();
            Some(FactBank { turn_index: i, slots })
        };
        let used_fact_ids = m.facts.iter().filter(|f| f.used).map(|f| value_id(&f.fid)).collect();
        messages.push(Message {
            sender,
            text: m.message,
            acts,
            liked: m.liked && sender == Sender::Assistant,
            shown_facts,
            used_fact_ids,
        });
    }
    Dialog {
        id,
        topic: raw.focus_entity,
        aspects: vec![raw.first_aspect, raw.second_aspect],
        known_entities: raw.known_entities.into_iter().collect(),
        messages,
    }
}

fn read_released(path: &Path) -> Result<(Vec<Dialog>, Vec<Diagnostic>)> {
    let root: Value = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    let items = match root {
        Value::Object(mut map) => match map.remove("dialogs") {
            Some(Value::Array(items)) => items,
            _ => {
                return Err(Error::schema("<file>", "dialogs", "expected a `dialogs` array"));
            }
        },
        Value::Array(items) => items,
        _ => return Err(Error::schema("<file>", "<root>", "expected an object or array")),
    };
    let mut dialogs = Vec::with_capacity(items.len());
    let mut diags = Vec::new();
    for (n, item) in items.into_iter().enumerate() {
        let hint = id_hint(&item, "dialog_id", format!("#{n}"));
        match serde_json::from_value::<ReleasedDialog>(item) {
            Ok(raw) => dialogs.push(convert_released(raw, &mut diags)),
            Err(e) => diags.push(Diagnostic { dialog: hint, field: field_of(&e), reason: e.to_string() }),
        }
    }
    Ok((dialogs, diags))
}
