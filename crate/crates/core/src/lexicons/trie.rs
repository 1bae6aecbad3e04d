use std::collections::BTreeMap;

#[derive(Clone, Debug, Default, PartialEq)]
struct Node {
    children: BTreeMap<char, usize>,
    /// pattern ids ending exactly here
    exact: Vec<usize>,
    /// prefix (`*`) pattern ids ending here
    prefix: Vec<usize>,
}

/// Character trie over lexicon patterns; wildcard patterns mark their node as
/// a prefix terminal.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct PatternTrie {
    nodes: Vec<Node>,
}

impl Default for PatternTrie {
    fn default() -> Self {
        PatternTrie {
            nodes: vec![Node::default()],
        }
    }
}

impl PatternTrie {
    pub(crate) fn insert(&mut self, stem: &str, wildcard: bool, id: usize) {
        let mut cur = 0;
        for c in stem.chars() {
            cur = match self.nodes[cur].children.get(&c) {
                Some(&n) => n,
                None => {
                    self.nodes.push(Node::default());
                    let n = self.nodes.len() - 1;
                    self.nodes[cur].children.insert(c, n);
                    n
                }
            };
        }
        let node = &mut self.nodes[cur];
        if wildcard {
            node.prefix.push(id);
        } else {
            node.exact.push(id);
        }
    }

    /// Pattern ids matching `word`, shortest prefix patterns first and exact
    /// matches last.
    pub(crate) fn matches(&self, word: &str) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = 0;
        out.extend_from_slice(&self.nodes[0].prefix);
        for c in word.chars() {
            match self.nodes[cur].children.get(&c) {
                Some(&n) => {
                    cur = n;
                    out.extend_from_slice(&self.nodes[cur].prefix);
                }
                None => return out,
            }
        }
        out.extend_from_slice(&self.nodes[cur].exact);
        out
    }
}
