use super::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// `#word`, stored without the `#`.
    Keyword(String),
    Ident(String),
    Number(f64),
    /// Schematic `<...>` hole, stored without the brackets.
    Placeholder(String),
    /// `...` or `…` in a schematic list.
    Ellipsis,
    Colon,
    Eq,
    PlusEq,
    Star,
    Semi,
    LBrace,
    RBrace,
    Comma,
    Dot,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Keyword(k) => format!("`#{k}`"),
            Tok::Ident(i) => format!("`{i}`"),
            Tok::Number(n) => format!("number {n}"),
            Tok::Placeholder(p) => format!("`<{p}>`"),
            Tok::Ellipsis => "`...`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::PlusEq => "`+=`".into(),
            Tok::Star => "`*`".into(),
            Tok::Semi => "`;`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

/// `1`, `.5`, `-1`, `+.5`, but not `...`.
fn starts_number(rest: &[char]) -> bool {
    let digit = |k: usize| rest.get(k).is_some_and(char::is_ascii_digit);
    match rest.first() {
        Some(c) if c.is_ascii_digit() => true,
        Some('.') => digit(1),
        Some('-' | '+') => digit(1) || (rest.get(1) == Some(&'.') && digit(2)),
        _ => false,
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! advance {
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
        let span = Span { line, column: col };
        if c.is_whitespace() {
            advance!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance!();
            }
            continue;
        }
        let take_word = |i: &mut usize, col: &mut usize| {
            let start = *i;
            while *i < chars.len() && is_ident_char(chars[*i]) {
                *i += 1;
                *col += 1;
            }
            chars[start..*i].iter().collect::<String>()
        };
        let tok = match c {
            '#' => {
                advance!();
                if i >= chars.len() || !is_ident_start(chars[i]) {
                    return Err(Diagnostic::error(span, "expected a keyword after `#`"));
                }
                Tok::Keyword(take_word(&mut i, &mut col))
            }
            c if is_ident_start(c) => Tok::Ident(take_word(&mut i, &mut col)),
            _ if starts_number(&chars[i..]) => {
                let start = i;
                advance!();
                while i < chars.len() {
                    let d = chars[i];
                    let exp_sign = (d == '-' || d == '+') && matches!(chars[i - 1], 'e' | 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        advance!();
                    } else {
                        break;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| Diagnostic::error(span, format!("malformed number `{text}`")))?;
                if !v.is_finite() {
                    return Err(Diagnostic::error(span, format!("number `{text}` is not finite")));
                }
                Tok::Number(v)
            }
            '<' => {
                advance!();
                let start = i;
                while i < chars.len() && chars[i] != '>' && chars[i] != '\n' {
                    advance!();
                }
                if i >= chars.len() || chars[i] != '>' {
                    return Err(Diagnostic::error(span, "unterminated `<...>` placeholder"));
                }
                let text: String = chars[start..i].iter().collect();
                advance!();
                Tok::Placeholder(text)
            }
            '…' => {
                advance!();
                Tok::Ellipsis
            }
            '.' if chars.get(i + 1) == Some(&'.') && chars.get(i + 2) == Some(&'.') => {
                advance!();
                advance!();
                advance!();
                Tok::Ellipsis
            }
            '+' if chars.get(i + 1) == Some(&'=') => {
                advance!();
                advance!();
                Tok::PlusEq
            }
            ':' | '=' | '*' | ';' | '{' | '}' | ',' | '.' => {
                advance!();
                match c {
                    ':' => Tok::Colon,
                    '=' => Tok::Eq,
                    '*' => Tok::Star,
                    ';' => Tok::Semi,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    _ => Tok::Dot,
                }
            }
            other => return Err(Diagnostic::error(span, format!("unexpected character `{other}`"))),
        };
        out.push(Token { tok, span });
    }
    Ok(out)
}
