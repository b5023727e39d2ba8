use super::{ParseError, ParseErrorKind, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// `@prefix`
    PrefixKw,
    IriRef(String),
    PName {
        prefix: String,
        local: String,
    },
    Literal {
        value: String,
        language: Option<String>,
    },
    /// `^^`
    DatatypeMark,
    Universal(String),
    Blank(String),
    Bang(String),
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Implies,
    Arrow,
    Dot,
    Comma,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::PrefixKw => "`@prefix`".into(),
            Tok::IriRef(i) => format!("<{i}>"),
            Tok::PName { prefix, local } => format!("`{prefix}:{local}`"),
            Tok::Literal { value, .. } => format!("literal \"{value}\""),
            Tok::DatatypeMark => "`^^`".into(),
            Tok::Universal(n) => format!("`?{n}`"),
            Tok::Blank(n) => format!("`_:{n}`"),
            Tok::Bang(n) => format!("`!{n}`"),
            Tok::Ident(n) => format!("`{n}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dialect {
    N3,
    Rules,
}

pub(crate) fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c.is_ascii_digit()
}

pub(crate) fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

pub(crate) fn span_at(src: &str, start: usize, end: usize) -> SourceSpan {
    let before = &src[..start];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    SourceSpan {
        start,
        end,
        line,
        column,
    }
}

pub(crate) fn error(
    src: &str,
    start: usize,
    end: usize,
    kind: ParseErrorKind,
    message: impl Into<String>,
) -> ParseError {
    ParseError {
        span: span_at(src, start, end),
        message: message.into(),
        kind,
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    dialect: Dialect,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn lex_err(&self, start: usize, message: impl Into<String>) -> ParseError {
        let end = (self.pos)
            .max(start + self.peek().map_or(0, char::len_utf8))
            .min(self.src.len());
        error(self.src, start, end, ParseErrorKind::Lexical, message)
    }

    fn skip_trivia(&mut self) {
        let comment = match self.dialect {
            Dialect::N3 => '#',
            Dialect::Rules => '%',
        };
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == comment {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    /// Name characters; a `.` is taken only when followed by another name
    /// character, so `:tom.` still ends a statement.
    fn name(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if is_name_char(c) || (c == '.' && self.peek2().is_some_and(is_name_char)) {
                self.bump();
            } else {
                break;
            }
        }
        self.src[start..self.pos].to_string()
    }

    fn string(&mut self, start: usize) -> Result<String, ParseError> {
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.lex_err(start, "unterminated string literal")),
                Some('"') => return Ok(out),
                Some('\\') => {
                    let esc_start = self.pos - 1;
                    match self.bump() {
                        Some('"') => out.push('"'),
                        Some('\\') => out.push('\\'),
                        Some('n') => out.push('\n'),
                        Some('r') => out.push('\r'),
                        Some('t') => out.push('\t'),
                        Some('\'') => out.push('\''),
                        Some('u') => out.push(self.unicode_escape(esc_start, 4)?),
                        Some('U') => out.push(self.unicode_escape(esc_start, 8)?),
                        _ => return Err(self.lex_err(esc_start, "invalid escape sequence")),
                    }
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn unicode_escape(&mut self, start: usize, digits: usize) -> Result<char, ParseError> {
        let hex: String = (0..digits).filter_map(|_| self.bump()).collect();
        u32::from_str_radix(&hex, 16)
            .ok()
            .filter(|_| hex.len() == digits)
            .and_then(char::from_u32)
            .ok_or_else(|| self.lex_err(start, "invalid unicode escape"))
    }

    fn next_token(&mut self) -> Result<Option<Spanned>, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let tok = match c {
            '{' => {
                self.bump();
                Tok::LBrace
            }
            '}' => {
                self.bump();
                Tok::RBrace
            }
            '(' => {
                self.bump();
                Tok::LParen
            }
            ')' => {
                self.bump();
                Tok::RParen
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            '.' => {
                self.bump();
                Tok::Dot
            }
            '=' => {
                self.bump();
                if self.bump() != Some('>') {
                    return Err(self.lex_err(start, "expected `=>`"));
                }
                Tok::Implies
            }
            '-' if self.peek2() == Some('>') => {
                self.bump();
                self.bump();
                Tok::Arrow
            }
            '^' => {
                self.bump();
                if self.bump() != Some('^') {
                    return Err(self.lex_err(start, "expected `^^`"));
                }
                Tok::DatatypeMark
            }
            '<' => {
                self.bump();
                let body_start = self.pos;
                loop {
                    match self.bump() {
                        Some('>') => break,
                        Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                            return Err(self.lex_err(start, "invalid character in IRI"))
                        }
                        Some(_) => {}
                        None => return Err(self.lex_err(start, "unterminated IRI")),
                    }
                }
                Tok::IriRef(self.src[body_start..self.pos - 1].to_string())
            }
            '"' => {
                self.bump();
                let value = self.string(start)?;
                let language = if self.peek() == Some('@') {
                    self.bump();
                    let tag = self.name();
                    if tag.is_empty() {
                        return Err(self.lex_err(start, "empty language tag"));
                    }
                    Some(tag)
                } else {
                    None
                };
                Tok::Literal { value, language }
            }
            '@' => {
                self.bump();
                let kw = self.name();
                if kw != "prefix" {
                    return Err(self.lex_err(start, format!("unsupported directive `@{kw}`")));
                }
                Tok::PrefixKw
            }
            '?' => {
                self.bump();
                let n = self.name();
                if n.is_empty() {
                    return Err(self.lex_err(start, "variable name expected after `?`"));
                }
                Tok::Universal(n)
            }
            '!' if self.dialect == Dialect::Rules => {
                self.bump();
                let n = self.name();
                if n.is_empty() {
                    return Err(self.lex_err(start, "variable name expected after `!`"));
                }
                Tok::Bang(n)
            }
            '_' if self.peek2() == Some(':') => {
                self.bump();
                self.bump();
                let n = self.name();
                if n.is_empty() {
                    return Err(self.lex_err(start, "blank node label expected after `_:`"));
                }
                Tok::Blank(n)
            }
            ':' => {
                self.bump();
                Tok::PName {
                    prefix: String::new(),
                    local: self.name(),
                }
            }
            c if is_name_start(c) => {
                let word = self.name();
                if self.peek() == Some(':') {
                    self.bump();
                    Tok::PName {
                        prefix: word,
                        local: self.name(),
                    }
                } else {
                    Tok::Ident(word)
                }
            }
            c => return Err(self.lex_err(start, format!("unexpected character `{c}`"))),
        };
        Ok(Some(Spanned {
            tok,
            start,
            end: self.pos,
        }))
    }
}

pub(crate) fn tokenize(src: &str, dialect: Dialect) -> Result<Vec<Spanned>, ParseError> {
    let mut lexer = Lexer { src, pos: 0, dialect };
    let mut out = Vec::new();
    while let Some(t) = lexer.next_token()? {
        out.push(t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src, Dialect::N3).unwrap().into_iter().map(|s| s.tok).collect()
    }

    #[test]
    fn statement_dot_is_not_part_of_a_name() {
        assert_eq!(
            toks(":lucy :knows :tom."),
            vec![
                Tok::PName {
                    prefix: "".into(),
                    local: "lucy".into()
                },
                Tok::PName {
                    prefix: "".into(),
                    local: "knows".into()
                },
                Tok::PName {
                    prefix: "".into(),
                    local: "tom".into()
                },
                Tok::Dot,
            ]
        );
        assert_eq!(
            toks("ex:a.b"),
            vec![Tok::PName {
                prefix: "ex".into(),
                local: "a.b".into()
            }]
        );
    }

    #[test]
    fn literals_and_escapes() {
        assert_eq!(
            toks(r#""To\"m"@en"#),
            vec![Tok::Literal {
                value: "To\"m".into(),
                language: Some("en".into())
            }]
        );
        assert_eq!(
            toks(r#""A""#),
            vec![Tok::Literal {
                value: "A".into(),
                language: None
            }]
        );
    }

    #[test]
    fn comments_depend_on_dialect() {
        assert_eq!(toks("# hi\n."), vec![Tok::Dot]);
        let rules = tokenize("% hi\n.", Dialect::Rules).unwrap();
        assert_eq!(rules.len(), 1);
        assert!(tokenize("% hi", Dialect::N3).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let err = tokenize(":a :b \"open", Dialect::N3).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Lexical);
        assert_eq!(err.span.start, 6);
        assert_eq!((err.span.line, err.span.column), (1, 7));
        let err = tokenize(":a\n :b $", Dialect::N3).unwrap_err();
        assert_eq!((err.span.line, err.span.column), (2, 5));
    }
}
