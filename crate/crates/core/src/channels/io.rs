//! QCH-JSON: `{"din": n, "dout": m, "kraus": [entries, ...]}`, each entry list in the
//! row-major `[[re, im], ...]` layout used for operators.

use serde::{Deserialize, Serialize};

use super::QuantumChannel;
use crate::error::Result;
use crate::operator::{entries_to_matrix, matrix_to_entries};

/// Serialisable form of a channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub din: usize,
    pub dout: usize,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl ChannelRecord {
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        Self {
            din: ch.din(),
            dout: ch.dout(),
            kraus: ch.kraus().iter().map(matrix_to_entries).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        crate::json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("channel records always serialise")
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let kraus = self
            .kraus
            .iter()
            .map(|k| entries_to_matrix(k, self.dout, self.din))
            .collect::<Result<Vec<_>>>()?;
        QuantumChannel::new(self.din, self.dout, kraus)
    }
}
