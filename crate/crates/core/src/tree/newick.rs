//! Newick reading and writing.
//!
//! Parsing tolerates branch lengths, internal node labels and quoted names.
//! Emission writes topology and leaf names only.

use thiserror::Error;

use super::{unroot, RootedNode, RootedPhylogeny, TreeError, UnrootedPhylogeny};
use crate::model::TaxonSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NewickError {
    #[error("newick parse error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("newick tree: {0}")]
    Tree(#[from] TreeError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewickNode {
    pub name: Option<String>,
    pub children: Vec<NewickNode>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, NewickError> {
        Err(NewickError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() {
            match self.src[self.pos] {
                b' ' | b'\t' | b'\n' | b'\r' => self.pos += 1,
                b'[' => {
                    // bracketed comment
                    while self.pos < self.src.len() && self.src[self.pos] != b']' {
                        self.pos += 1;
                    }
                    self.pos += 1;
                }
                _ => break,
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn label(&mut self) -> Result<Option<String>, NewickError> {
        match self.peek() {
            Some(b'\'') => {
                self.pos += 1;
                let mut out = String::new();
                loop {
                    match self.src.get(self.pos) {
                        None => return self.err("unterminated quoted label"),
                        Some(b'\'') if self.src.get(self.pos + 1) == Some(&b'\'') => {
                            out.push('\'');
                            self.pos += 2;
                        }
                        Some(b'\'') => {
                            self.pos += 1;
                            return Ok(Some(out));
                        }
                        Some(&c) => {
                            out.push(c as char);
                            self.pos += 1;
                        }
                    }
                }
            }
            _ => {
                let start = self.pos;
                while let Some(&c) = self.src.get(self.pos) {
                    if b"(),:;[] \t\r\n'".contains(&c) {
                        break;
                    }
                    self.pos += 1;
                }
                if start == self.pos {
                    return Ok(None);
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).map_err(|_| {
                    NewickError::Syntax {
                        position: start,
                        message: "invalid utf-8".into(),
                    }
                })?;
                Ok(Some(s.to_string()))
            }
        }
    }

    fn branch_length(&mut self) -> Result<(), NewickError> {
        if self.peek() == Some(b':') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while let Some(&c) = self.src.get(self.pos) {
                if c.is_ascii_digit() || b".eE+-".contains(&c) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if start == self.pos {
                return self.err("expected branch length");
            }
        }
        Ok(())
    }

    fn subtree(&mut self) -> Result<NewickNode, NewickError> {
        let mut children = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            loop {
                children.push(self.subtree()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => return self.err(format!("unexpected {:?}", c as char)),
                    None => return self.err("unexpected end of input"),
                }
            }
        }
        let name = self.label()?;
        self.branch_length()?;
        if children.is_empty() && name.is_none() {
            return match self.peek() {
                None => self.err("unexpected end of input"),
                Some(c) => self.err(format!("expected a leaf name, found {:?}", c as char)),
            };
        }
        Ok(NewickNode { name, children })
    }
}

/// Parses one `;`-terminated Newick tree.
pub fn parse(text: &str) -> Result<NewickNode, NewickError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let root = p.subtree()?;
    match p.peek() {
        Some(b';') => p.pos += 1,
        Some(c) => return p.err(format!("expected ';', found {:?}", c as char)),
        None => return p.err("unexpected end of input, expected ';'"),
    }
    if p.peek().is_some() {
        return p.err("trailing input after ';'");
    }
    Ok(root)
}

impl NewickNode {
    fn leaf_names<'a>(&'a self, out: &mut Vec<&'a str>) {
        if self.children.is_empty() {
            out.push(self.name.as_deref().unwrap_or(""));
        }
        for c in &self.children {
            c.leaf_names(out);
        }
    }

    /// Converts to a rooted phylogeny over `taxa` (or over the leaf names in
    /// order of appearance when `taxa` is `None`). Numeric internal names
    /// become labels; single-child nodes are collapsed.
    pub fn to_rooted(
        &self,
        taxa: Option<&TaxonSet>,
    ) -> Result<(RootedPhylogeny, TaxonSet), NewickError> {
        let taxa = match taxa {
            Some(t) => t.clone(),
            None => {
                let mut names = Vec::new();
                self.leaf_names(&mut names);
                TaxonSet::new(names).map_err(TreeError::from)?
            }
        };
        let mut nodes = Vec::new();
        let root = self.lower(&taxa, &mut nodes)?;
        let tree = RootedPhylogeny::new(nodes, root)?;
        if tree.leaf_count() != taxa.len() {
            return Err(TreeError::TaxaMismatch(tree.leaf_count(), taxa.len()).into());
        }
        Ok((tree, taxa))
    }

    fn lower(&self, taxa: &TaxonSet, nodes: &mut Vec<RootedNode>) -> Result<usize, NewickError> {
        if self.children.is_empty() {
            let name = self.name.as_deref().unwrap_or("");
            let idx = taxa
                .index_of(name)
                .ok_or_else(|| TreeError::Invalid(format!("unknown taxon {name:?}")))?;
            nodes.push(RootedNode::Leaf(idx));
            return Ok(nodes.len() - 1);
        }
        if let [only] = self.children.as_slice() {
            return only.lower(taxa, nodes);
        }
        let slot = nodes.len();
        let label = self.name.as_deref().and_then(|s| s.parse::<u32>().ok());
        nodes.push(RootedNode::Internal {
            children: Vec::new(),
            label,
        });
        let children = self
            .children
            .iter()
            .map(|c| c.lower(taxa, nodes))
            .collect::<Result<Vec<_>, _>>()?;
        nodes[slot] = RootedNode::Internal { children, label };
        Ok(slot)
    }
}

/// Parses a Newick tree as a rooted phylogeny.
pub fn parse_rooted(
    text: &str,
    taxa: Option<&TaxonSet>,
) -> Result<(RootedPhylogeny, TaxonSet), NewickError> {
    parse(text)?.to_rooted(taxa)
}

/// Parses a Newick tree and unroots it (resolving multifurcations).
pub fn parse_unrooted(
    text: &str,
    taxa: Option<&TaxonSet>,
) -> Result<(UnrootedPhylogeny, TaxonSet), NewickError> {
    let (rooted, taxa) = parse_rooted(text, taxa)?;
    Ok((unroot(&rooted)?, taxa))
}

/// Newick text of a rooted tree, children in stored order.
pub fn emit_rooted(t: &RootedPhylogeny, taxa: &TaxonSet) -> String {
    fn go(t: &RootedPhylogeny, v: usize, taxa: &TaxonSet, out: &mut String) {
        match t.node(v) {
            RootedNode::Leaf(x) => out.push_str(taxa.name(*x)),
            RootedNode::Internal { children, .. } => {
                out.push('(');
                for (k, &c) in children.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    go(t, c, taxa, out);
                }
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    go(t, t.root(), taxa, &mut out);
    out.push(';');
    out
}

/// Newick text of an unrooted tree, rooted at the internal node next to the
/// first taxon; subtrees are ordered by their smallest taxon.
pub fn emit_unrooted(t: &UnrootedPhylogeny, taxa: &TaxonSet) -> String {
    let n = t.leaf_count();
    if n == 2 {
        return format!("({},{});", taxa.name(0), taxa.name(1));
    }
    let min_leaf = min_leaves(t);
    fn go(
        t: &UnrootedPhylogeny,
        v: usize,
        parent: usize,
        taxa: &TaxonSet,
        min_leaf: &dyn Fn(usize, usize) -> usize,
        out: &mut String,
    ) {
        if v < t.leaf_count() {
            out.push_str(taxa.name(v));
            return;
        }
        let mut kids: Vec<usize> = t
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| w != parent)
            .collect();
        kids.sort_by_key(|&w| min_leaf(w, v));
        out.push('(');
        for (k, &w) in kids.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            go(t, w, v, taxa, min_leaf, out);
        }
        out.push(')');
    }
    let root = t.neighbors(0)[0];
    let mut out = String::new();
    // usize::MAX as parent: every neighbor of the root is a child
    go(t, root, usize::MAX, taxa, &min_leaf, &mut out);
    out.push(';');
    out
}

/// Smallest leaf in the subtree hanging from `w` when entered from `from`.
fn min_leaves(t: &UnrootedPhylogeny) -> impl Fn(usize, usize) -> usize + '_ {
    move |w, from| {
        let mut best = usize::MAX;
        let mut stack = vec![(w, from)];
        while let Some((x, p)) = stack.pop() {
            if x < t.leaf_count() {
                best = best.min(x);
            }
            for &y in t.neighbors(x) {
                if y != p {
                    stack.push((y, x));
                }
            }
        }
        best
    }
}
