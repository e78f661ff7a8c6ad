// SPDX-License-Identifier: Apache-2.0

//! Hash-consed propositional circuits, evaluated either as truth tables or by
//! backtracking search over partial assignments.

use std::collections::HashMap;

pub(crate) type NodeId = usize;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) enum Node {
    Var(usize),
    Const(bool),
    /// A value supplied from outside, e.g. a guessed box.
    Hole(usize),
    Not(NodeId),
    And(NodeId, NodeId),
    Implies(NodeId, NodeId),
    Iff(NodeId, NodeId),
}

/// Children always precede their parents, so evaluation can run in id order.
#[derive(Default, Debug)]
pub(crate) struct Circuit {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
}

impl Circuit {
    pub fn new() -> Self {
        Circuit::default()
    }

    pub fn add(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node);
        self.index.insert(node, id);
        id
    }

    pub fn var(&mut self, v: usize) -> NodeId {
        self.add(Node::Var(v))
    }

    pub fn constant(&mut self, b: bool) -> NodeId {
        self.add(Node::Const(b))
    }

    pub fn not(&mut self, a: NodeId) -> NodeId {
        match self.nodes[a] {
            Node::Const(b) => self.constant(!b),
            Node::Not(x) => x,
            _ => self.add(Node::Not(a)),
        }
    }

    pub fn and(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.nodes[a], self.nodes[b]) {
            (Node::Const(false), _) | (_, Node::Const(false)) => self.constant(false),
            (Node::Const(true), _) => b,
            (_, Node::Const(true)) => a,
            _ if a == b => a,
            _ => self.add(Node::And(a, b)),
        }
    }

    pub fn implies(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.add(Node::Implies(a, b))
    }

    pub fn iff(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.add(Node::Iff(a, b))
    }

    pub fn and_all(&mut self, items: impl IntoIterator<Item = NodeId>) -> NodeId {
        let t = self.constant(true);
        items.into_iter().fold(t, |acc, x| self.and(acc, x))
    }

    /// Ids of the nodes `root` depends on, in evaluation order.
    pub fn cone(&self, root: NodeId) -> Vec<NodeId> {
        let mut mark = vec![false; root + 1];
        mark[root] = true;
        for id in (0..=root).rev() {
            if !mark[id] {
                continue;
            }
            match self.nodes[id] {
                Node::Not(a) => mark[a] = true,
                Node::And(a, b) | Node::Implies(a, b) | Node::Iff(a, b) => {
                    mark[a] = true;
                    mark[b] = true;
                }
                _ => {}
            }
        }
        (0..=root).filter(|&i| mark[i]).collect()
    }

    /// Kleene evaluation of every node up to `upto` under a partial assignment.
    fn eval_partial(&self, upto: NodeId, assign: &[Option<bool>], holes: &[bool], out: &mut Vec<Option<bool>>) {
        out.clear();
        for id in 0..=upto {
            let v = match self.nodes[id] {
                Node::Var(v) => assign[v],
                Node::Const(b) => Some(b),
                Node::Hole(h) => Some(holes[h]),
                Node::Not(a) => out[a].map(|x| !x),
                Node::And(a, b) => match (out[a], out[b]) {
                    (Some(false), _) | (_, Some(false)) => Some(false),
                    (Some(true), Some(true)) => Some(true),
                    _ => None,
                },
                Node::Implies(a, b) => match (out[a], out[b]) {
                    (Some(false), _) | (_, Some(true)) => Some(true),
                    (Some(true), Some(false)) => Some(false),
                    _ => None,
                },
                Node::Iff(a, b) => match (out[a], out[b]) {
                    (Some(x), Some(y)) => Some(x == y),
                    _ => None,
                },
            };
            out.push(v);
        }
    }

    /// An assignment of `vars` variables making every root true, by backtracking.
    pub fn solve(&self, roots: &[NodeId], vars: usize, holes: &[bool]) -> Option<Vec<bool>> {
        let upto = roots.iter().copied().max()?;
        let mut assign = vec![None; vars];
        let mut scratch = Vec::with_capacity(upto + 1);
        if self.search(roots, upto, 0, &mut assign, holes, &mut scratch) {
            Some(assign.into_iter().map(|v| v.unwrap_or(false)).collect())
        } else {
            None
        }
    }

    fn search(
        &self,
        roots: &[NodeId],
        upto: NodeId,
        next: usize,
        assign: &mut Vec<Option<bool>>,
        holes: &[bool],
        scratch: &mut Vec<Option<bool>>,
    ) -> bool {
        self.eval_partial(upto, assign, holes, scratch);
        let mut open = false;
        for &r in roots {
            match scratch[r] {
                Some(false) => return false,
                None => open = true,
                Some(true) => {}
            }
        }
        if !open {
            return true;
        }
        if next == assign.len() {
            return false;
        }
        for value in [true, false] {
            assign[next] = Some(value);
            if self.search(roots, upto, next + 1, assign, holes, scratch) {
                return true;
            }
        }
        assign[next] = None;
        false
    }

    /// Truth table of `root` over all assignments of `vars` variables; bit `v` of the
    /// table holds the value under the assignment whose variable `i` is bit `i` of `v`.
    pub fn table(&self, cone: &[NodeId], vars: usize, holes: &[bool], scratch: &mut Tables) -> Vec<u64> {
        scratch.reset(self.nodes.len(), vars);
        let w = scratch.words;
        for &id in cone {
            match self.nodes[id] {
                Node::Var(v) => {
                    for k in 0..w {
                        scratch.buf[id * w + k] = column(v, k) & scratch.valid(k);
                    }
                }
                Node::Const(_) | Node::Hole(_) => {
                    let b = match self.nodes[id] {
                        Node::Hole(h) => holes[h],
                        Node::Const(b) => b,
                        _ => unreachable!(),
                    };
                    for k in 0..w {
                        scratch.buf[id * w + k] = if b { scratch.valid(k) } else { 0 };
                    }
                }
                Node::Not(a) => {
                    for k in 0..w {
                        scratch.buf[id * w + k] = !scratch.buf[a * w + k] & scratch.valid(k);
                    }
                }
                Node::And(a, b) => {
                    for k in 0..w {
                        scratch.buf[id * w + k] = scratch.buf[a * w + k] & scratch.buf[b * w + k];
                    }
                }
                Node::Implies(a, b) => {
                    for k in 0..w {
                        scratch.buf[id * w + k] = (!scratch.buf[a * w + k] | scratch.buf[b * w + k]) & scratch.valid(k);
                    }
                }
                Node::Iff(a, b) => {
                    for k in 0..w {
                        scratch.buf[id * w + k] = !(scratch.buf[a * w + k] ^ scratch.buf[b * w + k]) & scratch.valid(k);
                    }
                }
            }
        }
        let root = *cone.last().expect("non-empty cone");
        scratch.buf[root * w..(root + 1) * w].to_vec()
    }
}

fn column(var: usize, word: usize) -> u64 {
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    if var < 6 {
        PATTERNS[var]
    } else if (word >> (var - 6)) & 1 == 1 {
        u64::MAX
    } else {
        0
    }
}

/// Scratch space for table evaluation.
#[derive(Default)]
pub(crate) struct Tables {
    buf: Vec<u64>,
    words: usize,
    last_mask: u64,
}

impl Tables {
    fn reset(&mut self, nodes: usize, vars: usize) {
        let bits = 1usize << vars;
        self.words = bits.div_ceil(64);
        self.last_mask = if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
        let need = nodes * self.words;
        if self.buf.len() < need {
            self.buf.resize(need, 0);
        }
    }

    fn valid(&self, word: usize) -> u64 {
        if word + 1 == self.words {
            self.last_mask
        } else {
            u64::MAX
        }
    }
}

pub(crate) fn is_zero(t: &[u64]) -> bool {
    t.iter().all(|&w| w == 0)
}

pub(crate) fn and_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d &= s;
    }
}

pub(crate) fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

pub(crate) fn first_common(a: &[u64], b: &[u64]) -> Option<usize> {
    a.iter()
        .zip(b)
        .enumerate()
        .find(|(_, (x, y))| *x & *y != 0)
        .map(|(k, (x, y))| k * 64 + (x & y).trailing_zeros() as usize)
}
