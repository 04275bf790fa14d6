use std::sync::Arc;

use super::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Plus,
    Minus,
    Tilde,
    Dot,
    At,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Eq,
    Bang,
    Arrow,
    Par,
    /// `◁` or `<|`
    CondOpen,
    /// `▷` or `|>`
    CondClose,
    Lambda,
    /// Text of a `%[ ... %]` comment, whitespace-normalized.
    Comment(String),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Comment(_) => "comment".to_string(),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Tilde => "~",
            Tok::Dot => ".",
            Tok::At => "@",
            Tok::Slash => "/",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Eq => "=",
            Tok::Bang => "!",
            Tok::Arrow => "->",
            Tok::Par => "||",
            Tok::CondOpen => "<|",
            Tok::CondClose => "|>",
            Tok::Lambda => "λ",
            _ => "?",
        }
    }
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn lex(file: &Arc<str>, text: &str) -> Result<Vec<(Tok, Span)>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let span = |line, col| Span::new(file.clone(), line, col);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let start = span(line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && next == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '%' {
            if next != Some('[') {
                let message = if next == Some(']') {
                    "`%]` without matching `%[`"
                } else {
                    "stray `%`; comments are written `%[ ... %]`"
                };
                return Err(Diagnostic::error(start, message));
            }
            bump!();
            bump!();
            let mut body = String::new();
            loop {
                if i >= chars.len() {
                    return Err(Diagnostic::error(start, "unterminated comment: missing `%]`"));
                }
                if chars[i] == '%' && chars.get(i + 1) == Some(&']') {
                    bump!();
                    bump!();
                    break;
                }
                body.push(chars[i]);
                bump!();
            }
            let text = body.split_whitespace().collect::<Vec<_>>().join(" ");
            out.push((Tok::Comment(text), start));
            continue;
        }
        if ident_start(c) {
            let mut s = String::new();
            while i < chars.len() {
                let c = chars[i];
                let joins_colon =
                    c == ':' && !s.is_empty() && chars.get(i + 1).is_some_and(|&n| ident_continue(n));
                if ident_continue(c) || joins_colon {
                    s.push(c);
                    bump!();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), start));
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                bump!();
            }
            let n = s
                .parse::<u64>()
                .map_err(|_| Diagnostic::error(start.clone(), format!("integer `{s}` is too large")))?;
            out.push((Tok::Int(n), start));
            continue;
        }
        let (tok, width) = match (c, next) {
            ('<', Some('|')) => (Tok::CondOpen, 2),
            ('|', Some('>')) => (Tok::CondClose, 2),
            ('|', Some('|')) => (Tok::Par, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('◁', _) => (Tok::CondOpen, 1),
            ('▷', _) => (Tok::CondClose, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-' | '−', _) => (Tok::Minus, 1),
            ('~' | '∼', _) => (Tok::Tilde, 1),
            ('.', _) => (Tok::Dot, 1),
            ('@', _) => (Tok::At, 1),
            ('/', _) => (Tok::Slash, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            (';', _) => (Tok::Semi, 1),
            ('=', _) => (Tok::Eq, 1),
            ('!' | '¬', _) => (Tok::Bang, 1),
            ('λ', _) => (Tok::Lambda, 1),
            _ => return Err(Diagnostic::error(start, format!("unexpected character `{c}`"))),
        };
        for _ in 0..width {
            bump!();
        }
        out.push((tok, start));
    }
    out.push((Tok::Eof, span(line, col)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<Tok> {
        lex(&Arc::from("t"), text)
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect()
    }

    #[test]
    fn identifiers_keep_inner_colons() {
        assert_eq!(
            toks("RIi:L:CSP:SE hmt:csla e1 : x"),
            vec![
                Tok::Ident("RIi:L:CSP:SE".into()),
                Tok::Ident("hmt:csla".into()),
                Tok::Ident("e1".into()),
                Tok::Colon,
                Tok::Ident("x".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn element_tokens() {
        assert_eq!(
            toks("~f.a(m)@g/TF"),
            vec![
                Tok::Tilde,
                Tok::Ident("f".into()),
                Tok::Dot,
                Tok::Ident("a".into()),
                Tok::LParen,
                Tok::Ident("m".into()),
                Tok::RParen,
                Tok::At,
                Tok::Ident("g".into()),
                Tok::Slash,
                Tok::Ident("TF".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn unicode_operators() {
        assert_eq!(
            toks("− ∼ ◁ ▷ ¬ λ <| |> || ->"),
            vec![
                Tok::Minus,
                Tok::Tilde,
                Tok::CondOpen,
                Tok::CondClose,
                Tok::Bang,
                Tok::Lambda,
                Tok::CondOpen,
                Tok::CondClose,
                Tok::Par,
                Tok::Arrow,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_are_normalized() {
        assert_eq!(
            toks("x %[ NC for\n   FH TS %] // dropped\n"),
            vec![
                Tok::Ident("x".into()),
                Tok::Comment("NC for FH TS".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comment_errors_carry_positions() {
        let err = lex(&Arc::from("f.fti"), "a +\n  %[ open").unwrap_err();
        assert_eq!(err.to_string(), "f.fti:2:3: error: unterminated comment: missing `%]`");
        let err = lex(&Arc::from("f.fti"), "a %] b").unwrap_err();
        assert!(err.message.contains("without matching"));
        assert!(lex(&Arc::from("f"), "a % b").is_err());
        assert!(lex(&Arc::from("f"), "a | b").is_err());
    }
}
