use super::SchemeError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Slash,
    Assign,
    Eq,
    Neq,
    Not,
    And,
    Or,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn tokenize(src: &str, allow_reserved: bool) -> Result<Vec<Token>, SchemeError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let mut line = 1;
    let mut line_start = 0;
    while let Some(&(pos, c)) = chars.peek() {
        let col = src[line_start..pos].chars().count() + 1;
        let err = |msg: String| SchemeError::Syntax { line, col, msg };
        if c == '\n' {
            chars.next();
            line += 1;
            line_start = pos + 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '#' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '/' => Some(Tok::Slash),
            '=' => Some(Tok::Eq),
            '&' | '∧' => Some(Tok::And),
            '|' | '∨' => Some(Tok::Or),
            '¬' => Some(Tok::Not),
            '≠' => Some(Tok::Neq),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            out.push(Token { tok, line, col });
            continue;
        }
        match c {
            ':' => {
                chars.next();
                if chars.next_if(|&(_, c)| c == '=').is_some() {
                    out.push(Token {
                        tok: Tok::Assign,
                        line,
                        col,
                    });
                } else {
                    return Err(err("expected `:=`".into()));
                }
            }
            '!' => {
                chars.next();
                let tok = if chars.next_if(|&(_, c)| c == '=').is_some() {
                    Tok::Neq
                } else {
                    Tok::Not
                };
                out.push(Token { tok, line, col });
            }
            '0'..='9' => {
                let mut end = pos;
                while let Some(&(p, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        end = p + 1;
                        chars.next();
                    } else {
                        break;
                    }
                }
                let n = src[pos..end]
                    .parse()
                    .map_err(|_| err("number too large".into()))?;
                out.push(Token {
                    tok: Tok::Num(n),
                    line,
                    col,
                });
            }
            c if c.is_alphabetic() || c == '_' || c == '$' => {
                if c == '$' && !allow_reserved {
                    return Err(err("names starting with `$` are reserved".into()));
                }
                let mut end = pos + c.len_utf8();
                chars.next();
                while let Some(&(p, d)) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' || d == '\'' {
                        end = p + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token {
                    tok: Tok::Ident(src[pos..end].to_string()),
                    line,
                    col,
                });
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        }
    }
    let col = src[line_start..].chars().count() + 1;
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
