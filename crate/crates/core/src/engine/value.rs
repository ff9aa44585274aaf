use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

/// Everything the developer records is text, a list of texts, or nothing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum Value {
    Text(String),
    List(Vec<String>),
    Nothing,
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn list<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Value::List(
            items
                .into_iter()
                .map(Into::into)
                .filter(|s: &String| !s.is_empty())
                .collect(),
        )
    }

    /// Interprets free text typed by the developer: comma-separated entries
    /// become a list, the word `nothing` is [`Value::Nothing`], anything else
    /// is kept as text.
    pub fn from_entry(entry: &str) -> Self {
        let trimmed = entry.trim();
        if trimmed.eq_ignore_ascii_case("nothing") {
            Value::Nothing
        } else if trimmed.contains(',') {
            Value::list(trimmed.split(',').map(str::trim))
        } else {
            Value::Text(trimmed.to_string())
        }
    }

    /// The elements a `FOR EACH` walks: a list's items, a text as a single
    /// element, nothing as no elements.
    pub fn items(&self) -> Vec<String> {
        match self {
            Value::Text(t) => vec![t.clone()],
            Value::List(items) => items.clone(),
            Value::Nothing => Vec::new(),
        }
    }

    /// JSON as exchanged with clients: string, array of strings, or null.
    pub fn to_wire(&self) -> Json {
        match self {
            Value::Text(t) => Json::String(t.clone()),
            Value::List(items) => Json::Array(items.iter().cloned().map(Json::String).collect()),
            Value::Nothing => Json::Null,
        }
    }

    /// Inverse of [`Value::to_wire`], except that strings go through the
    /// same entry rule as typed text.
    pub fn from_wire(json: &Json) -> Result<Self, String> {
        match json {
            Json::Null => Ok(Value::Nothing),
            Json::String(s) => Ok(Value::from_entry(s)),
            Json::Array(items) => items
                .iter()
                .map(|i| {
                    i.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| "list elements must be strings".to_string())
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Value::list),
            _ => Err("expected a string, an array of strings, or null".into()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Text(t) => f.write_str(t),
            Value::List(items) => write!(f, "[{}]", items.join(", ")),
            Value::Nothing => f.write_str("nothing"),
        }
    }
}

/// What the developer supplies to move past the current statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum HumanInput {
    Decision(bool),
    Answer(Value),
    Ack,
}

impl HumanInput {
    pub fn answer(entry: &str) -> Self {
        HumanInput::Answer(Value::from_entry(entry))
    }

    /// `{"decision": bool}`, `{"answer": "text" | [..] | null}` or
    /// `{"ack": true}`.
    pub fn from_wire(json: &Json) -> Result<Self, String> {
        let obj = json
            .as_object()
            .ok_or_else(|| "input must be a JSON object".to_string())?;
        if obj.len() != 1 {
            return Err("input must have exactly one of decision, answer, ack".into());
        }
        let (key, value) = obj.iter().next().unwrap();
        match key.as_str() {
            "decision" => value
                .as_bool()
                .map(HumanInput::Decision)
                .ok_or_else(|| "decision must be a boolean".into()),
            "answer" => Value::from_wire(value).map(HumanInput::Answer),
            "ack" if value == &Json::Bool(true) => Ok(HumanInput::Ack),
            "ack" => Err("ack must be true".into()),
            other => Err(format!("unknown input field `{other}`")),
        }
    }

    pub fn to_wire(&self) -> Json {
        match self {
            HumanInput::Decision(b) => serde_json::json!({ "decision": b }),
            HumanInput::Answer(v) => serde_json::json!({ "answer": v.to_wire() }),
            HumanInput::Ack => serde_json::json!({ "ack": true }),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            HumanInput::Decision(_) => "decision",
            HumanInput::Answer(_) => "answer",
            HumanInput::Ack => "ack",
        }
    }
}
