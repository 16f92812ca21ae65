use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Node {
    R1,
    R2,
    R3,
    CS,
    J1,
    J2,
    J3,
    J4,
}

pub const ALL_NODES: [Node; 8] = [
    Node::R1,
    Node::R2,
    Node::R3,
    Node::CS,
    Node::J1,
    Node::J2,
    Node::J3,
    Node::J4,
];

pub const ROOMS: [Node; 3] = [Node::R1, Node::R2, Node::R3];

/// Undirected hallway edges with their lengths.
pub const EDGES: [(Node, Node, u32); 7] = [
    (Node::R1, Node::J1, 1),
    (Node::R2, Node::J2, 1),
    (Node::R3, Node::J3, 1),
    (Node::CS, Node::J4, 1),
    (Node::J1, Node::J4, 2),
    (Node::J4, Node::J2, 2),
    (Node::J2, Node::J3, 1),
];

impl Node {
    fn index(self) -> usize {
        self as usize
    }

    pub fn is_room(self) -> bool {
        ROOMS.contains(&self)
    }

    /// Rooms and the charging station; junctions are only passed through.
    pub fn is_endpoint(self) -> bool {
        self.is_room() || self == Node::CS
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Node {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_NODES
            .iter()
            .copied()
            .find(|n| n.to_string() == s)
            .ok_or_else(|| format!("unknown facility node `{s}`"))
    }
}

/// All-pairs shortest distances, computed once.
fn distances() -> &'static [[u32; 8]; 8] {
    static TABLE: std::sync::OnceLock<[[u32; 8]; 8]> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        const INF: u32 = u32::MAX / 4;
        let mut d = [[INF; 8]; 8];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for (a, b, w) in EDGES {
            d[a.index()][b.index()] = w;
            d[b.index()][a.index()] = w;
        }
        for k in 0..8 {
            for i in 0..8 {
                for j in 0..8 {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    })
}

/// Shortest hallway distance; one unit of distance costs one unit of energy.
pub fn shortest_distance(from: Node, to: Node) -> u32 {
    distances()[from.index()][to.index()]
}
