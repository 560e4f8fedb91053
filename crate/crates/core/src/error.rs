use core::fmt;

use crate::graph::{EdgeId, NodeId, SrlgId};

/// Structural problems found while assembling a [`Network`](crate::Network).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    NoNodes,
    DanglingNode { edge: EdgeId, node: NodeId },
    NonPositiveWeight { edge: EdgeId },
    DanglingEdge { srlg: SrlgId, edge: EdgeId },
    EmptySrlg { srlg: SrlgId },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoNodes => write!(f, "network has no nodes"),
            Self::DanglingNode { edge, node } => {
                write!(f, "edge {edge} references unknown node {node}")
            }
            Self::NonPositiveWeight { edge } => {
                write!(f, "edge {edge} has a zero cost or delay")
            }
            Self::DanglingEdge { srlg, edge } => {
                write!(f, "srlg {srlg} references unknown edge {edge}")
            }
            Self::EmptySrlg { srlg } => write!(f, "srlg {srlg} has no edges"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathError {
    Empty,
    UnknownEdge(EdgeId),
    /// Edge at this position does not start where the previous one ended.
    Broken { position: usize },
    RepeatedNode(NodeId),
}

impl fmt::Display for PathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "path has no edges"),
            Self::UnknownEdge(e) => write!(f, "path uses unknown edge {e}"),
            Self::Broken { position } => write!(f, "path is not chained at edge #{position}"),
            Self::RepeatedNode(n) => write!(f, "path visits node {n} twice"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskError {
    SameEndpoints(NodeId),
    InvertedWindow { d_low: u64, d_up: u64 },
    UnknownNode(NodeId),
}

impl fmt::Display for TaskError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SameEndpoints(n) => write!(f, "source and target are both node {n}"),
            Self::InvertedWindow { d_low, d_up } => {
                write!(f, "delay window [{d_low}, {d_up}] is empty")
            }
            Self::UnknownNode(n) => write!(f, "task references unknown node {n}"),
        }
    }
}

impl core::error::Error for GraphError {}
impl core::error::Error for PathError {}
impl core::error::Error for TaskError {}
