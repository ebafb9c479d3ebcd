use super::{Diagnostic, Pos};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    /// `@level`, `@prio`.
    At(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Semi,
    Colon,
    Comma,
    Eq,
    Arrow,
    Lt,
    Star,
    DotDot,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Real(r) => format!("number {r:?}"),
            Tok::Str(_) => "string".into(),
            Tok::At(s) => format!("`@{s}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Star => "`*`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::Eof => "end of file".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
    /// Brace nesting depth before this token; used for error recovery.
    pub depth: usize,
}

pub(crate) const KEYWORDS: &[&str] = &[
    "import", "system", "data", "sort", "product", "env", "ctor", "rel", "axiom", "rank", "forbid",
    "require", "atmost", "morphism", "config", "of", "sequence", "component", "t", "from", "vary",
    "depth", "budget", "select", "min", "apply", "branch", "p", "scenario", "features", "rate", "in",
    "manufacturer", "params", "agent", "for", "at", "weber", "window", "expect", "functional",
    "adapt", "on", "off", "cluster", "tau",
];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.col,
        }
    }
}

/// Position of the last non-whitespace character, for end-of-file messages.
pub(crate) fn eof_pos(text: &str) -> Pos {
    let mut pos = Pos { line: 1, column: 1 };
    let (mut line, mut col) = (1, 1);
    for c in text.chars() {
        if !c.is_whitespace() {
            pos = Pos { line, column: col };
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    pos
}

pub(crate) fn lex(text: &str, diags: &mut Vec<Diagnostic>) -> Vec<Token> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    let mut depth = 0usize;
    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('/') {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let tok = if is_ident_start(c) {
            let mut s = String::new();
            while let Some(c) = cur.peek().filter(|c| is_ident_char(*c)) {
                s.push(c);
                cur.bump();
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() || (c == '-' && cur.peek2().is_some_and(|d| d.is_ascii_digit())) {
            lex_number(&mut cur, pos, diags)
        } else if c == '"' {
            cur.bump();
            let mut s = String::new();
            let mut closed = false;
            while let Some(c) = cur.bump() {
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => {
                        let esc_pos = cur.pos();
                        match cur.bump() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('r') => s.push('\r'),
                            Some(other) => {
                                diags.push(Diagnostic::error(
                                    "INVALID_ESCAPE",
                                    format!("unknown escape `\\{other}`"),
                                    esc_pos,
                                ));
                            }
                            None => break,
                        }
                    }
                    c => s.push(c),
                }
            }
            if !closed {
                diags.push(Diagnostic::error("UNTERMINATED_STRING", "string is never closed", pos));
            }
            Tok::Str(s)
        } else if c == '@' {
            cur.bump();
            let mut s = String::new();
            while let Some(c) = cur.peek().filter(|c| is_ident_char(*c)) {
                s.push(c);
                cur.bump();
            }
            if s.is_empty() {
                diags.push(Diagnostic::error("UNEXPECTED_CHAR", "`@` must be followed by a name", pos));
                continue;
            }
            Tok::At(s)
        } else {
            cur.bump();
            match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                ',' => Tok::Comma,
                '=' => Tok::Eq,
                '<' => Tok::Lt,
                '*' => Tok::Star,
                '-' if cur.peek() == Some('>') => {
                    cur.bump();
                    Tok::Arrow
                }
                '.' if cur.peek() == Some('.') => {
                    cur.bump();
                    Tok::DotDot
                }
                other => {
                    diags.push(Diagnostic::error(
                        "UNEXPECTED_CHAR",
                        format!("unexpected character {other:?}"),
                        pos,
                    ));
                    continue;
                }
            }
        };
        let before = depth;
        match tok {
            Tok::LBrace => depth += 1,
            Tok::RBrace => depth = depth.saturating_sub(1),
            _ => {}
        }
        out.push(Token {
            tok,
            pos,
            depth: before,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: eof_pos(text),
        depth: 0,
    });
    out
}

fn lex_number(cur: &mut Cursor<'_>, pos: Pos, diags: &mut Vec<Diagnostic>) -> Tok {
    let mut s = String::new();
    if cur.peek() == Some('-') {
        s.push('-');
        cur.bump();
    }
    let digits = |cur: &mut Cursor<'_>, s: &mut String| {
        while let Some(d) = cur.peek().filter(|d| d.is_ascii_digit()) {
            s.push(d);
            cur.bump();
        }
    };
    digits(cur, &mut s);
    let mut real = false;
    if cur.peek() == Some('.') && cur.peek2().is_some_and(|d| d.is_ascii_digit()) {
        real = true;
        s.push('.');
        cur.bump();
        digits(cur, &mut s);
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let next = cur.peek2();
        let exp_follows = next.is_some_and(|d| d.is_ascii_digit()) || {
            let mut it = cur.chars.clone();
            it.next();
            matches!(it.next(), Some('+' | '-')) && it.next().is_some_and(|d| d.is_ascii_digit())
        };
        if exp_follows {
            real = true;
            s.push('e');
            cur.bump();
            if let Some(sign @ ('+' | '-')) = cur.peek() {
                s.push(sign);
                cur.bump();
            }
            digits(cur, &mut s);
        }
    }
    if real {
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Tok::Real(x),
            _ => {
                diags.push(Diagnostic::error("INVALID_NUMBER", format!("`{s}` is out of range"), pos));
                Tok::Real(0.0)
            }
        }
    } else {
        match s.parse::<i64>() {
            Ok(i) => Tok::Int(i),
            Err(_) => {
                diags.push(Diagnostic::error("INVALID_NUMBER", format!("`{s}` is out of range"), pos));
                Tok::Int(0)
            }
        }
    }
}
