use super::ast::Pos;
use super::SpecError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Colon,
    Semi,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    /// `->` or `-->`
    Arrow,
    /// `->?` or `-->?`
    PartialArrow,
    Eq,
    /// `=>`
    Implies,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::PartialArrow => "`->?`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Splits source text into tokens. `//` starts a comment running to the end
/// of the line.
pub fn tokenize(src: &str) -> Result<Vec<Token>, SpecError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

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
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
            continue;
        }
        let single = match c {
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            _ => None,
        };
        if let Some(tok) = single {
            bump!();
            out.push(Token { tok, pos });
            continue;
        }
        if c == '=' {
            bump!();
            let tok = if i < chars.len() && chars[i] == '>' {
                bump!();
                Tok::Implies
            } else {
                Tok::Eq
            };
            out.push(Token { tok, pos });
            continue;
        }
        if c == '-' {
            bump!();
            if i < chars.len() && chars[i] == '-' {
                bump!();
            }
            if i < chars.len() && chars[i] == '>' {
                bump!();
                let tok = if i < chars.len() && chars[i] == '?' {
                    bump!();
                    Tok::PartialArrow
                } else {
                    Tok::Arrow
                };
                out.push(Token { tok, pos });
                continue;
            }
            return Err(SpecError::Syntax {
                pos,
                msg: "expected `->` or `-->`".into(),
            });
        }
        return Err(SpecError::Syntax {
            pos,
            msg: format!("unexpected character {c:?}"),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrows_and_comments() {
        let toks = tokenize("a: -> T; // c\nb: T -->? U").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::Colon,
                Tok::Arrow,
                Tok::Ident("T".into()),
                Tok::Semi,
                Tok::Ident("b".into()),
                Tok::Colon,
                Tok::Ident("T".into()),
                Tok::PartialArrow,
                Tok::Ident("U".into()),
                Tok::Eof,
            ]
        );
        assert_eq!(toks[5].pos.line, 2);
        assert_eq!(toks[5].pos.col, 1);
    }

    #[test]
    fn bad_character_has_location() {
        let err = tokenize("spec\n  $").unwrap_err();
        match err {
            SpecError::Syntax { pos, .. } => assert_eq!((pos.line, pos.col), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
