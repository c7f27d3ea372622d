//! JSON form of a merge tree.
//!
//! The document lists every cluster (leaves first, then one per merge) and
//! the event log with raw distances and monotone levels. Serialising a parsed
//! document reproduces the original text byte for byte.

use serde::{Deserialize, Serialize};

use crate::agglomerate::Hierarchy;
use crate::error::{Error, Result};
use crate::graph::NOT_CONNECTED;
use crate::hierarchy::UcmLevels;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDocument {
    pub width: usize,
    pub height: usize,
    pub atom_count: usize,
    pub root: u32,
    pub clusters: Vec<ClusterRecord>,
    pub events: Vec<EventRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterRecord {
    pub id: u32,
    pub parent: Option<u32>,
    pub children: Option<[u32; 2]>,
    pub area: u64,
    pub mean: [f64; 3],
    pub sigma: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventRecord {
    pub time: u32,
    pub left: u32,
    pub right: u32,
    pub parent: u32,
    pub distance: f64,
    pub level: f64,
}

impl TreeDocument {
    pub fn new(h: &Hierarchy, levels: &UcmLevels) -> Self {
        let link = |id: u32| (id != NOT_CONNECTED).then_some(id);
        let clusters = h
            .graph
            .clusters
            .iter()
            .enumerate()
            .map(|(id, c)| ClusterRecord {
                id: id as u32,
                parent: link(c.parent),
                children: link(c.left).map(|l| [l, c.right]),
                area: c.area,
                mean: c.stats.mean,
                sigma: c.stats.sigma,
            })
            .collect();
        let events = h
            .events
            .iter()
            .zip(&levels.level)
            .map(|(e, &level)| EventRecord {
                time: e.time,
                left: e.left,
                right: e.right,
                parent: e.parent,
                distance: e.distance,
                level,
            })
            .collect();
        TreeDocument {
            width: h.graph.width(),
            height: h.graph.height(),
            atom_count: h.atom_count(),
            root: h.root,
            clusters,
            events,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tree documents hold only finite numbers");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_name_the_position_and_field() {
        let text = "{\n  \"width\": 5,\n  \"height\": 5\n}";
        match TreeDocument::parse(text) {
            Err(Error::Document { line, message, .. }) => {
                assert_eq!(line, 4);
                assert!(message.contains("atom_count"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        match TreeDocument::parse("{\n  \"width\": \"five\"") {
            Err(Error::Document { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
