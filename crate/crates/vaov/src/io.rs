//! On-disk JSON formats for instances and transcripts. Outcome labels are
//! strings and map to dense ids by their position in `outcomes`; the core
//! types never see labels.

use crate::protocol::{Action, Event, Transcript};
use crate::types::{Instance, Outcome, Party, PreferenceOrder};
use serde::{Deserialize, Serialize};

#[derive(thiserror::Error, Debug)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("outcomes: duplicate label {label:?}")]
    DuplicateLabel { label: String },
    #[error("outcomes: at least one outcome is required")]
    NoOutcomes,
    #[error("{field}: unknown label {label:?}")]
    UnknownLabel { field: &'static str, label: String },
    #[error("{field}: expected {expected} labels, found {found}")]
    WrongLength {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Instance(#[from] crate::types::InstanceError),
}

/// Label table for one instance; index = outcome id.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Labels(pub Vec<String>);

impl Labels {
    /// Default labels o1..om.
    pub fn numbered(m: usize) -> Labels {
        Labels((1..=m).map(|i| format!("o{i}")).collect())
    }

    pub fn label(&self, o: Outcome) -> &str {
        &self.0[o.index()]
    }

    fn id_of(&self, field: &'static str, label: &str) -> Result<Outcome, FormatError> {
        self.0
            .iter()
            .position(|l| l == label)
            .map(|i| Outcome(i as u32))
            .ok_or_else(|| FormatError::UnknownLabel {
                field,
                label: label.to_string(),
            })
    }
}

/// The instance file schema.
#[derive(Serialize, Deserialize, Debug)]
pub struct InstanceFile {
    pub outcomes: Vec<String>,
    pub p1: Vec<String>,
    pub p2: Vec<String>,
    pub first_mover: Party,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance, labels: &Labels) -> InstanceFile {
        let to_labels = |party: Party| {
            instance
                .order(party)
                .ranking()
                .iter()
                .map(|&o| labels.label(o).to_string())
                .collect()
        };
        InstanceFile {
            outcomes: labels.0.clone(),
            p1: to_labels(Party::P1),
            p2: to_labels(Party::P2),
            first_mover: instance.first_mover(),
        }
    }

    pub fn into_instance(self) -> Result<(Instance, Labels), FormatError> {
        if self.outcomes.is_empty() {
            return Err(FormatError::NoOutcomes);
        }
        for (i, label) in self.outcomes.iter().enumerate() {
            if self.outcomes[..i].contains(label) {
                return Err(FormatError::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        let labels = Labels(self.outcomes);
        let parse_order = |field: &'static str, raw: &[String]| {
            if raw.len() != labels.0.len() {
                return Err(FormatError::WrongLength {
                    field,
                    expected: labels.0.len(),
                    found: raw.len(),
                });
            }
            let ranking = raw
                .iter()
                .map(|l| labels.id_of(field, l))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PreferenceOrder::with_field(ranking, field)?)
        };
        let order1 = parse_order("p1", &self.p1)?;
        let order2 = parse_order("p2", &self.p2)?;
        let instance = Instance::new(order1, order2, self.first_mover)?;
        Ok((instance, labels))
    }
}

/// Parses and validates an instance file.
pub fn parse_instance(bytes: &[u8]) -> Result<(Instance, Labels), FormatError> {
    let file: InstanceFile = serde_json::from_slice(bytes)?;
    file.into_instance()
}

pub fn instance_to_json(instance: &Instance, labels: &Labels) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceFile::from_instance(instance, labels))
        .expect("instance files always serialize");
    s.push('\n');
    s
}

#[derive(Serialize, Deserialize, Debug)]
pub struct TranscriptEventFile {
    pub round: u32,
    pub actor: Party,
    pub action: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
}

/// The transcript file schema.
#[derive(Serialize, Deserialize, Debug)]
pub struct TranscriptFile {
    pub events: Vec<TranscriptEventFile>,
    pub result: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TranscriptFile {
    pub fn from_transcript(transcript: &Transcript, labels: &Labels) -> TranscriptFile {
        let events = transcript
            .events
            .iter()
            .map(|e| {
                let (action, outcome) = match e.action {
                    Action::Offer(o) => ("offer", Some(labels.label(o).to_string())),
                    Action::Accept => ("accept", None),
                    Action::Reject => ("reject", None),
                };
                TranscriptEventFile {
                    round: e.round,
                    actor: e.actor,
                    action: action.to_string(),
                    outcome,
                }
            })
            .collect();
        TranscriptFile {
            events,
            result: labels.label(transcript.result).to_string(),
            seed: transcript.seed,
        }
    }

    pub fn into_transcript(self, labels: &Labels) -> Result<Transcript, FormatError> {
        let events = self
            .events
            .iter()
            .map(|e| {
                let action = match e.action.as_str() {
                    "offer" => {
                        let label = e.outcome.as_deref().ok_or(FormatError::UnknownLabel {
                            field: "events.outcome",
                            label: String::new(),
                        })?;
                        Action::Offer(labels.id_of("events.outcome", label)?)
                    }
                    "accept" => Action::Accept,
                    "reject" => Action::Reject,
                    other => {
                        return Err(FormatError::UnknownLabel {
                            field: "events.action",
                            label: other.to_string(),
                        })
                    }
                };
                Ok(Event {
                    round: e.round,
                    actor: e.actor,
                    action,
                })
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(Transcript {
            events,
            result: labels.id_of("result", &self.result)?,
            seed: self.seed,
        })
    }
}

/// Parses a transcript file against a known label table.
pub fn parse_transcript(bytes: &[u8], labels: &Labels) -> Result<Transcript, FormatError> {
    let file: TranscriptFile = serde_json::from_slice(bytes)?;
    file.into_transcript(labels)
}

pub fn transcript_to_json(transcript: &Transcript, labels: &Labels) -> String {
    let mut s = serde_json::to_string_pretty(&TranscriptFile::from_transcript(transcript, labels))
        .expect("transcript files always serialize");
    s.push('\n');
    s
}
