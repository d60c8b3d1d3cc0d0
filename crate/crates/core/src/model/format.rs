//! The line-oriented structure document format.
//!
//! ```text
//! # comment
//! structure K3
//! size 3
//! signature rel E/2; const C
//! rel E: (0,1); (1,2); (2,0)
//! const C = 0
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::{Elem, ModelError, Relation, Signature, Structure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("line {line}: {source}")]
    Semantic {
        line: usize,
        #[source]
        source: ModelError,
    },
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

/// Cursor over a single line that tracks byte columns for error messages.
struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { text, pos: 0, line }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), FormatError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(self.line, self.col(), format!("expected `{c}`")))
        }
    }

    /// A structure name: any run of non-space characters.
    fn word(&mut self) -> Result<&'a str, FormatError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.text[start..]
            .find(char::is_whitespace)
            .unwrap_or(self.text.len() - start);
        self.pos += len;
        if len == 0 {
            Err(syntax(self.line, self.col(), "expected a name"))
        } else {
            Ok(&self.text[start..self.pos])
        }
    }

    fn ident(&mut self) -> Result<&'a str, FormatError> {
        self.skip_ws();
        let start = self.pos;
        for (i, c) in self.text[start..].char_indices() {
            let ok = if i == 0 {
                c.is_alphabetic() || c == '_'
            } else {
                c.is_alphanumeric() || c == '_' || c == '\''
            };
            if !ok {
                break;
            }
            self.pos = start + i + c.len_utf8();
        }
        if self.pos == start {
            Err(syntax(self.line, self.col(), "expected a name"))
        } else {
            Ok(&self.text[start..self.pos])
        }
    }

    fn number(&mut self) -> Result<u64, FormatError> {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..]
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(syntax(self.line, self.col(), "expected a number"));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| syntax(self.line, start + 1, "number too large"))
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        if rest.starts_with(kw)
            && !rest[kw.len()..]
                .chars()
                .next()
                .is_some_and(|c| c.is_alphanumeric() || c == '_')
        {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn finish(&mut self) -> Result<(), FormatError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(syntax(self.line, self.col(), "unexpected trailing input"))
        }
    }
}

/// Parses and validates a structure document.
pub fn parse_structure(text: &str) -> Result<Structure, FormatError> {
    let mut name: Option<String> = None;
    let mut size: Option<(usize, usize)> = None;
    let mut signature: Option<Signature> = None;
    let mut rel_rows: Vec<Option<Vec<Elem>>> = Vec::new();
    let mut const_vals: Vec<Option<Elem>> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let mut cur = Cursor::new(content, lineno);
        if cur.at_end() {
            continue;
        }
        if name.is_none() {
            if !cur.keyword("structure") {
                return Err(syntax(
                    lineno,
                    cur.col(),
                    "expected `structure <name>` header",
                ));
            }
            name = Some(cur.word()?.to_string());
            cur.finish()?;
            continue;
        }
        if cur.keyword("size") {
            if size.is_some() {
                return Err(syntax(lineno, 1, "duplicate `size` line"));
            }
            let n = cur.number()? as usize;
            cur.finish()?;
            size = Some((n, lineno));
        } else if cur.keyword("signature") {
            if signature.is_some() {
                return Err(syntax(lineno, 1, "duplicate `signature` line"));
            }
            let mut rels = Vec::new();
            let mut consts = Vec::new();
            if !cur.at_end() {
                loop {
                    if cur.keyword("rel") {
                        let n = cur.ident()?.to_string();
                        cur.expect('/')?;
                        let arity = cur.number()? as usize;
                        rels.push((n, arity));
                    } else if cur.keyword("const") {
                        consts.push(cur.ident()?.to_string());
                    } else {
                        return Err(syntax(lineno, cur.col(), "expected `rel` or `const`"));
                    }
                    if cur.at_end() {
                        break;
                    }
                    cur.expect(';')?;
                }
            }
            let sig = Signature::new(rels, consts).map_err(|source| FormatError::Semantic {
                line: lineno,
                source,
            })?;
            rel_rows = vec![None; sig.relations().len()];
            const_vals = vec![None; sig.constants().len()];
            signature = Some(sig);
        } else if cur.keyword("rel") {
            let sig = signature
                .as_ref()
                .ok_or_else(|| syntax(lineno, 1, "`rel` line before `signature`"))?;
            let rel_name = cur.ident()?;
            let idx = sig.relation_index(rel_name).ok_or(FormatError::Semantic {
                line: lineno,
                source: ModelError::UnknownSymbol(rel_name.to_string()),
            })?;
            if rel_rows[idx].is_some() {
                return Err(syntax(
                    lineno,
                    1,
                    format!("duplicate `rel {rel_name}` line"),
                ));
            }
            let arity = sig.arity(idx);
            cur.expect(':')?;
            let mut flat = Vec::new();
            if !cur.at_end() {
                loop {
                    cur.expect('(')?;
                    let mut len = 0;
                    loop {
                        let v = cur.number()?;
                        flat.push(v.min(Elem::MAX as u64) as Elem);
                        len += 1;
                        if cur.eat(')') {
                            break;
                        }
                        cur.expect(',')?;
                    }
                    if len != arity {
                        return Err(FormatError::Semantic {
                            line: lineno,
                            source: ModelError::ArityMismatch {
                                name: rel_name.to_string(),
                                expected: arity,
                                got: len,
                            },
                        });
                    }
                    if cur.at_end() {
                        break;
                    }
                    cur.expect(';')?;
                }
            }
            rel_rows[idx] = Some(flat);
        } else if cur.keyword("const") {
            let sig = signature
                .as_ref()
                .ok_or_else(|| syntax(lineno, 1, "`const` line before `signature`"))?;
            let cname = cur.ident()?;
            let idx = sig.constant_index(cname).ok_or(FormatError::Semantic {
                line: lineno,
                source: ModelError::UnknownSymbol(cname.to_string()),
            })?;
            if const_vals[idx].is_some() {
                return Err(syntax(lineno, 1, format!("duplicate `const {cname}` line")));
            }
            cur.expect('=')?;
            let v = cur.number()?;
            cur.finish()?;
            const_vals[idx] = Some(v.min(Elem::MAX as u64) as Elem);
        } else {
            return Err(syntax(lineno, cur.col(), "unrecognised line"));
        }
    }

    let name = name.ok_or_else(|| syntax(last_line.max(1), 1, "missing `structure` header"))?;
    let (n, size_line) = size.ok_or_else(|| syntax(last_line.max(1), 1, "missing `size` line"))?;
    let sig = signature.unwrap_or_default();
    let semantic = |source| FormatError::Semantic {
        line: size_line,
        source,
    };
    if n < 2 {
        return Err(semantic(ModelError::TooSmall(n)));
    }
    let relations = sig
        .relations()
        .iter()
        .zip(rel_rows)
        .map(|((_, arity), flat)| Relation::from_flat(*arity, flat.unwrap_or_default()))
        .collect();
    let mut constants = Vec::with_capacity(const_vals.len());
    for (cname, v) in sig.constants().iter().zip(const_vals) {
        constants.push(v.ok_or_else(|| semantic(ModelError::MissingConstant(cname.clone())))?);
    }
    Structure::new(name, sig, n, relations, constants).map_err(semantic)
}

pub(super) fn serialize(s: &Structure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "structure {}", s.name());
    let _ = writeln!(out, "size {}", s.size());
    let sig = s.signature();
    let items: Vec<String> = sig
        .relations()
        .iter()
        .map(|(n, a)| format!("rel {n}/{a}"))
        .chain(sig.constants().iter().map(|c| format!("const {c}")))
        .collect();
    if items.is_empty() {
        out.push_str("signature\n");
    } else {
        let _ = writeln!(out, "signature {}", items.join("; "));
    }
    for ((rname, _), rel) in sig.relations().iter().zip(s.relations()) {
        let _ = write!(out, "rel {rname}:");
        for (i, t) in rel.iter().enumerate() {
            out.push_str(if i == 0 { " (" } else { "; (" });
            for (j, e) in t.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{e}");
            }
            out.push(')');
        }
        out.push('\n');
    }
    for (cname, v) in sig.constants().iter().zip(s.constants()) {
        let _ = writeln!(out, "const {cname} = {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_empty_relation() {
        let s = parse_structure("structure e\nsize 2\nsignature rel E/2\nrel E:\n").unwrap();
        assert_eq!(s.size(), 2);
        assert!(s.relation(0).is_empty());
    }

    #[test]
    fn missing_rel_line_means_empty() {
        let s = parse_structure("structure e\nsize 3\nsignature rel E/2\n").unwrap();
        assert!(s.relation(0).is_empty());
    }

    #[test]
    fn names_are_single_tokens() {
        let s = parse_structure("structure k4-net.v2\nsize 2\nsignature rel E/2\n").unwrap();
        assert_eq!(s.name(), "k4-net.v2");
        assert!(parse_structure("structure a b\nsize 2\nsignature rel E/2\n").is_err());
    }

    #[test]
    fn size_one_rejected() {
        let err = parse_structure("structure t\nsize 1\nsignature rel E/2\n").unwrap_err();
        assert!(err.to_string().contains("size at least 2"), "{err}");
    }

    #[test]
    fn k4_has_twelve_edges() {
        let mut doc = String::from("structure K4\nsize 4\nsignature rel E/2\nrel E:");
        let mut first = true;
        for u in 0..4 {
            for v in 0..4 {
                if u != v {
                    doc.push_str(if first { " " } else { "; " });
                    first = false;
                    doc.push_str(&format!("({u},{v})"));
                }
            }
        }
        let s = parse_structure(&doc).unwrap();
        assert_eq!(s.relation(0).len(), 12);
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_structure("structure x\nsize 3\nsignature rel E/2\nrel E: (0,1) (1,2)\n")
            .unwrap_err();
        match err {
            FormatError::Syntax { line, col, .. } => {
                assert_eq!(line, 4);
                assert_eq!(col, 14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let arity = parse_structure("structure x\nsize 3\nsignature rel E/2\nrel E: (0,1,2)\n");
        assert!(matches!(
            arity,
            Err(FormatError::Semantic {
                source: ModelError::ArityMismatch { .. },
                ..
            })
        ));
        let range = parse_structure("structure x\nsize 3\nsignature rel E/2\nrel E: (0,3)\n");
        assert!(matches!(
            range,
            Err(FormatError::Semantic {
                source: ModelError::OutOfRange { .. },
                ..
            })
        ));
        let missing = parse_structure("structure x\nsize 3\nsignature const C\n");
        assert!(matches!(
            missing,
            Err(FormatError::Semantic {
                source: ModelError::MissingConstant(_),
                ..
            })
        ));
    }

    #[test]
    fn comments_and_canonical_output() {
        let doc = "# a graph\nstructure g  # name\nsize 3\nsignature rel E/2; const C\nrel E: (1,2); (0,1); (0,1)\nconst C = 2\n";
        let s = parse_structure(doc).unwrap();
        assert_eq!(
            s.to_document(),
            "structure g\nsize 3\nsignature rel E/2; const C\nrel E: (0,1); (1,2)\nconst C = 2\n"
        );
    }
}
