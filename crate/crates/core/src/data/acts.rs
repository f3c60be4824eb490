use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The sixteen dialog act labels of the annotation schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DialogAct {
    RequestTopic,
    RequestAspect,
    RequestFollowup,
    RequestOther,
    InformResponse,
    InformRelated,
    InformUnrelated,
    FeedbackPositive,
    FeedbackNegative,
    FeedbackAsk,
    OfferTopic,
    OfferAspect,
    OfferFollowup,
    OfferOther,
    OfferAccept,
    OfferDecline,
}

pub const NUM_ACTS: usize = 16;

impl DialogAct {
    pub const ALL: [DialogAct; NUM_ACTS] = [
        DialogAct::RequestTopic,
        DialogAct::RequestAspect,
        DialogAct::RequestFollowup,
        DialogAct::RequestOther,
        DialogAct::InformResponse,
        DialogAct::InformRelated,
        DialogAct::InformUnrelated,
        DialogAct::FeedbackPositive,
        DialogAct::FeedbackNegative,
        DialogAct::FeedbackAsk,
        DialogAct::OfferTopic,
        DialogAct::OfferAspect,
        DialogAct::OfferFollowup,
        DialogAct::OfferOther,
        DialogAct::OfferAccept,
        DialogAct::OfferDecline,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<DialogAct> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            DialogAct::RequestTopic => "request_topic",
            DialogAct::RequestAspect => "request_aspect",
            DialogAct::RequestFollowup => "request_followup",
            DialogAct::RequestOther => "request_other",
            DialogAct::InformResponse => "inform_response",
            DialogAct::InformRelated => "inform_related",
            DialogAct::InformUnrelated => "inform_unrelated",
            DialogAct::FeedbackPositive => "feedback_positive",
            DialogAct::FeedbackNegative => "feedback_negative",
            DialogAct::FeedbackAsk => "feedback_ask",
            DialogAct::OfferTopic => "offer_topic",
            DialogAct::OfferAspect => "offer_aspect",
            DialogAct::OfferFollowup => "offer_followup",
            DialogAct::OfferOther => "offer_other",
            DialogAct::OfferAccept => "offer_accept",
            DialogAct::OfferDecline => "offer_decline",
        }
    }

    /// `inform response`, `inform related` and `inform unrelated`.
    pub fn is_inform(self) -> bool {
        matches!(self, DialogAct::InformResponse | DialogAct::InformRelated | DialogAct::InformUnrelated)
    }
}

impl fmt::Display for DialogAct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name().replace('_', " "))
    }
}

impl FromStr for DialogAct {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.trim().to_lowercase().replace([' ', '-'], "_");
        DialogAct::ALL
            .iter()
            .copied()
            .find(|a| a.name() == norm)
            .ok_or_else(|| format!("unknown dialog act `{s}`"))
    }
}
