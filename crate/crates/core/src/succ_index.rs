//! Numbering of successor sets `Succ(w,a) = {δ(w,a,b) : b ∈ P2(w)}`.
//!
//! Every successor set is inserted into a binary trie of depth `|W|` as its
//! characteristic vector (left = absent, right = present). A left-first
//! depth-first traversal numbers the leaves, so ids follow the lexicographic
//! order of characteristic vectors. The trie is dropped once the member lists
//! (`g`) and the `(state, action) -> id` table (`h`) are filled.

use crate::error::{Error, Result};
use crate::systems::Ats;

const NONE: u32 = u32::MAX;

/// Bijection between the successor sets of one ATS and `0..count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccIndex {
    num_states: usize,
    num_actions1: usize,
    /// `h[w * |A1| + a]`, defined where `a ∈ P1(w)`.
    h: Vec<Option<usize>>,
    /// `g[id]`: ascending member states.
    g: Vec<Vec<usize>>,
    trie_nodes: usize,
}

struct Trie {
    children: Vec<[u32; 2]>,
    parent: Vec<(u32, u8)>,
}

impl Trie {
    fn new() -> Self {
        Trie { children: vec![[NONE, NONE]], parent: vec![(NONE, 0)] }
    }

    fn insert(&mut self, bits: &[bool]) -> u32 {
        let mut node = 0u32;
        for &b in bits {
            let side = b as usize;
            let next = self.children[node as usize][side];
            node = if next == NONE {
                let id = self.children.len() as u32;
                self.children.push([NONE, NONE]);
                self.parent.push((node, side as u8));
                self.children[node as usize][side] = id;
                id
            } else {
                next
            };
        }
        node
    }

    fn find(&self, bits: &[bool]) -> u32 {
        let mut node = 0u32;
        for &b in bits {
            node = self.children[node as usize][b as usize];
            debug_assert_ne!(node, NONE);
        }
        node
    }
}

impl SuccIndex {
    /// Builds the index in `O(|W|·|A1|·(|W| + |A2|))`.
    pub fn build(k: &Ats) -> Result<Self> {
        k.ensure_valid()?;
        let n = k.num_states();
        let na1 = k.actions1.len();
        let mut trie = Trie::new();
        let mut bits = vec![false; n];

        let fill = |bits: &mut [bool], w: usize, a: usize| {
            bits.iter_mut().for_each(|b| *b = false);
            for &b in &k.enabled2[w] {
                bits[k.step(w, a, b)] = true;
            }
        };

        for w in 0..n {
            for &a in &k.enabled1[w] {
                fill(&mut bits, w, a);
                trie.insert(&bits);
            }
        }

        // Left-first DFS; leaves are exactly the nodes at depth n.
        let mut leaf_id = vec![NONE; trie.children.len()];
        let mut g: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
        while let Some((node, depth)) = stack.pop() {
            if depth == n {
                leaf_id[node as usize] = g.len() as u32;
                // leaf-to-root walk collects members in descending order
                let mut members = Vec::new();
                let mut cur = node;
                let mut level = n;
                while cur != 0 {
                    let (parent, side) = trie.parent[cur as usize];
                    level -= 1;
                    if side == 1 {
                        members.push(level);
                    }
                    cur = parent;
                }
                members.reverse();
                g.push(members);
                continue;
            }
            let [left, right] = trie.children[node as usize];
            if right != NONE {
                stack.push((right, depth + 1));
            }
            if left != NONE {
                stack.push((left, depth + 1));
            }
        }

        let mut h = vec![None; n * na1];
        for w in 0..n {
            for &a in &k.enabled1[w] {
                fill(&mut bits, w, a);
                let leaf = trie.find(&bits);
                h[w * na1 + a] = Some(leaf_id[leaf as usize] as usize);
            }
        }

        Ok(SuccIndex {
            num_states: n,
            num_actions1: na1,
            h,
            g,
            trie_nodes: trie.children.len(),
        })
    }

    /// `|Succ(K)|`.
    pub fn count(&self) -> usize {
        self.g.len()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Member states of set `id`, ascending.
    pub fn members(&self, id: usize) -> Result<&[usize]> {
        self.g
            .get(id)
            .map(Vec::as_slice)
            .ok_or(Error::SetIdOutOfRange { id, count: self.g.len() })
    }

    /// `h(w,a)`; fails when `a ∉ P1(w)`.
    pub fn succ_of(&self, w: usize, a: usize) -> Result<usize> {
        if w >= self.num_states || a >= self.num_actions1 {
            return Err(Error::DisabledAction { state: w, action: a });
        }
        self.h[w * self.num_actions1 + a].ok_or(Error::DisabledAction { state: w, action: a })
    }

    /// Unchecked `h(w,a)` for enabled pairs.
    #[inline]
    pub fn id(&self, w: usize, a: usize) -> usize {
        self.h[w * self.num_actions1 + a].expect("action not enabled")
    }

    /// Unchecked `g(id)`.
    #[inline]
    pub fn set(&self, id: usize) -> &[usize] {
        &self.g[id]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.g
    }

    /// Sum of set sizes, `Σ_T |T|`.
    pub fn total_members(&self) -> usize {
        self.g.iter().map(Vec::len).sum()
    }

    /// Node count of the (already dropped) trie, root included.
    pub fn trie_nodes(&self) -> usize {
        self.trie_nodes
    }

    /// Cells kept after the build: the `h` table plus all member lists.
    pub fn cells(&self) -> usize {
        self.h.len() + self.total_members() + self.g.len()
    }

    /// Checks that this index was built from `k`.
    pub fn check_matches(&self, k: &Ats) -> Result<()> {
        if self.num_states != k.num_states() || self.num_actions1 != k.actions1.len() {
            return Err(Error::IndexMismatch);
        }
        for w in 0..k.num_states() {
            for a in 0..k.actions1.len() {
                if self.h[w * self.num_actions1 + a].is_some() != k.is_enabled1(w, a) {
                    return Err(Error::IndexMismatch);
                }
            }
        }
        Ok(())
    }
}
