use crate::error::{Error, Result};
use crate::model::{PhyloTree, TreeBuilder, VertexId};

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    builder: TreeBuilder,
}

fn parse_error(offset: usize, message: impl Into<String>) -> Error {
    Error::ParseError { offset, message: message.into() }
}

impl Parser<'_> {
    fn skip_blank(&mut self) {
        loop {
            while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.peek() != Some(b'[') {
                return;
            }
            while self.pos < self.text.len() && self.text[self.pos] != b']' {
                self.pos += 1;
            }
            if self.pos == self.text.len() {
                return;
            }
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_blank();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(parse_error(self.pos, format!("expected `{}`", c as char)))
        }
    }

    fn label(&mut self) -> Result<Option<String>> {
        self.skip_blank();
        if self.peek() == Some(b'\'') {
            let start = self.pos;
            self.pos += 1;
            let mut out = Vec::new();
            loop {
                match self.peek() {
                    None => return Err(parse_error(start, "unterminated quoted label")),
                    Some(b'\'') if self.text.get(self.pos + 1) == Some(&b'\'') => {
                        out.push(b'\'');
                        self.pos += 2;
                    }
                    Some(b'\'') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => {
                        out.push(c);
                        self.pos += 1;
                    }
                }
            }
            return String::from_utf8(out).map(Some).map_err(|_| parse_error(start, "label is not UTF-8"));
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if b"(),:;[".contains(&c) || c.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let raw = std::str::from_utf8(&self.text[start..self.pos]).map_err(|_| parse_error(start, "label is not UTF-8"))?;
        Ok(Some(raw.replace('_', " ")))
    }

    fn length(&mut self) -> Result<Option<(u64, usize)>> {
        self.skip_blank();
        if self.peek() != Some(b':') {
            return Ok(None);
        }
        self.pos += 1;
        self.skip_blank();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || b".+-eE".contains(&c) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.text[start..self.pos]).expect("ASCII digits");
        if text.is_empty() {
            return Err(parse_error(start, "missing branch length"));
        }
        if let Ok(w) = text.parse::<u64>() {
            return Ok(Some((w, start)));
        }
        let value: f64 = text.parse().map_err(|_| parse_error(start, format!("bad branch length `{text}`")))?;
        if value.fract() != 0.0 || value < 0.0 || value > u64::MAX as f64 {
            return Err(Error::NonIntegerWeight { offset: start, text: text.to_owned() });
        }
        Ok(Some((value as u64, start)))
    }

    fn subtree(&mut self, parent: VertexId) -> Result<()> {
        self.skip_blank();
        let start = self.pos;
        let v = self.builder.add_child(parent, 1, None);
        if self.peek() == Some(b'(') {
            self.pos += 1;
            self.subtree(v)?;
            loop {
                self.skip_blank();
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                        self.subtree(v)?;
                    }
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(parse_error(self.pos, "expected `,` or `)`")),
                }
            }
            if let Some(l) = self.label()? {
                self.builder.set_label(v, &l);
            }
        } else {
            let l = self.label()?.ok_or_else(|| parse_error(start, "leaf without a label"))?;
            self.builder.set_label(v, &l);
        }
        match self.length()? {
            Some((0, at)) => Err(parse_error(at, "branch length must be positive")),
            Some((w, _)) => {
                self.builder.set_weight(v, w);
                Ok(())
            }
            None => Err(parse_error(self.pos, "missing branch length")),
        }
    }
}

/// Parses a rooted Newick tree whose non-root branch lengths are positive
/// integers. Children keep their source order; `_` in bare labels reads as a space.
pub fn parse_newick(text: &str) -> Result<PhyloTree> {
    let mut p = Parser { text: text.as_bytes(), pos: 0, builder: TreeBuilder::new() };
    let root = p.builder.root();
    p.expect(b'(')?;
    p.subtree(root)?;
    loop {
        p.skip_blank();
        match p.peek() {
            Some(b',') => {
                p.pos += 1;
                p.subtree(root)?;
            }
            Some(b')') => {
                p.pos += 1;
                break;
            }
            _ => return Err(parse_error(p.pos, "expected `,` or `)`")),
        }
    }
    if let Some(l) = p.label()? {
        p.builder.set_label(root, &l);
    }
    p.length()?;
    p.expect(b';')?;
    p.skip_blank();
    if p.pos != p.text.len() {
        return Err(parse_error(p.pos, "trailing input after `;`"));
    }
    p.builder.build()
}

fn quote(label: &str) -> String {
    if label.bytes().any(|c| b"(),:;[]'_".contains(&c) || c.is_ascii_whitespace()) || label.is_empty() {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_owned()
    }
}

/// Newick text that [`parse_newick`] reads back to the same tree.
pub fn write_newick(tree: &PhyloTree) -> String {
    fn go(tree: &PhyloTree, v: VertexId, out: &mut String) {
        if !tree.is_leaf(v) {
            out.push('(');
            for (i, &c) in tree.children(v).iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                go(tree, c, out);
            }
            out.push(')');
        }
        if let Some(l) = tree.label(v) {
            out.push_str(&quote(l));
        }
        if v != tree.root() {
            out.push(':');
            out.push_str(&tree.weight(v).to_string());
        }
    }
    let mut out = String::new();
    go(tree, tree.root(), &mut out);
    out.push(';');
    out
}
