use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Ident(String),
    Bottom,
    And,
    Or,
    Implies,
    BoxOp,
    DiaOp,
    Forall,
    Exists,
    LParen,
    RParen,
    Comma,
    Dot,
    /// `R□` / `R◇` written with the unicode suffix.
    RelBox,
    RelDia,
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("`{s}`"),
            Token::Bottom => "`false`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Implies => "`->`".into(),
            Token::BoxOp => "`box`".into(),
            Token::DiaOp => "`dia`".into(),
            Token::Forall => "`forall`".into(),
            Token::Exists => "`exists`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Comma => "`,`".into(),
            Token::Dot => "`.`".into(),
            Token::RelBox => "`R□`".into(),
            Token::RelDia => "`R◇`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Token,
    pub pos: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, ch)) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
            continue;
        }
        let single = match ch {
            '&' | '∧' => Some(Token::And),
            '|' | '∨' => Some(Token::Or),
            '→' => Some(Token::Implies),
            '⊥' => Some(Token::Bottom),
            '□' => Some(Token::BoxOp),
            '◇' => Some(Token::DiaOp),
            '∀' => Some(Token::Forall),
            '∃' => Some(Token::Exists),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            ',' => Some(Token::Comma),
            '.' => Some(Token::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            out.push(Spanned { tok, pos });
            continue;
        }
        if ch == '-' {
            chars.next();
            match chars.peek() {
                Some(&(_, '>')) => {
                    chars.next();
                    out.push(Spanned {
                        tok: Token::Implies,
                        pos,
                    });
                    continue;
                }
                _ => return Err(ParseError::UnknownToken { pos, found: '-' }),
            }
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut word = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    word.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            let tok = match word.as_str() {
                "false" => Token::Bottom,
                "box" => Token::BoxOp,
                "dia" => Token::DiaOp,
                "forall" => Token::Forall,
                "exists" => Token::Exists,
                "R" => match chars.peek() {
                    Some(&(_, '□')) => {
                        chars.next();
                        Token::RelBox
                    }
                    Some(&(_, '◇')) => {
                        chars.next();
                        Token::RelDia
                    }
                    _ => Token::Ident(word),
                },
                _ => Token::Ident(word),
            };
            out.push(Spanned { tok, pos });
            continue;
        }
        return Err(ParseError::UnknownToken { pos, found: ch });
    }
    Ok(out)
}

/// Token cursor shared by both grammars.
pub(crate) struct Cursor {
    toks: Vec<Spanned>,
    idx: usize,
    end: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        let toks = tokenize(text)?;
        Ok(Cursor {
            toks,
            idx: 0,
            end: text.len(),
        })
    }

    pub(crate) fn peek(&self) -> Option<&Token> {
        self.toks.get(self.idx).map(|s| &s.tok)
    }

    pub(crate) fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |s| s.pos)
    }

    pub(crate) fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.idx).map(|s| s.tok.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: Token) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(crate) fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::Syntax {
                pos: self.pos(),
                message: format!("expected {expected}, found {}", t.describe()),
            },
            None => ParseError::Syntax {
                pos: self.pos(),
                message: format!("expected {expected}, found end of input"),
            },
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if self.idx == self.toks.len() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

/// Parses the digits after a one-letter prefix (`p12` -> 12). Index 0 is rejected.
pub(crate) fn indexed(word: &str, prefix: char) -> Option<u32> {
    let rest = word.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().filter(|&n| n >= 1)
}
