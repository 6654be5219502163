//! Hand-rolled lexer for `.ml0` sources.

use super::error::{Location, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    IntLit(i64),
    StrLit(String),
    KwFn,
    KwLet,
    KwIf,
    KwElse,
    KwWhile,
    KwReturn,
    KwFail,
    KwTrue,
    KwFalse,
    KwInt,
    KwBool,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Arrow,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::IntLit(n) => format!("integer `{n}`"),
            TokenKind::StrLit(_) => "string literal".to_string(),
            TokenKind::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            TokenKind::KwFn => "fn",
            TokenKind::KwLet => "let",
            TokenKind::KwIf => "if",
            TokenKind::KwElse => "else",
            TokenKind::KwWhile => "while",
            TokenKind::KwReturn => "return",
            TokenKind::KwFail => "fail",
            TokenKind::KwTrue => "true",
            TokenKind::KwFalse => "false",
            TokenKind::KwInt => "int",
            TokenKind::KwBool => "bool",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::Comma => ",",
            TokenKind::Colon => ":",
            TokenKind::Semi => ";",
            TokenKind::Arrow => "->",
            TokenKind::Assign => "=",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Percent => "%",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::Gt => ">",
            TokenKind::Ge => ">=",
            TokenKind::EqEq => "==",
            TokenKind::Ne => "!=",
            TokenKind::AndAnd => "&&",
            TokenKind::OrOr => "||",
            TokenKind::Bang => "!",
            _ => unreachable!("described separately"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
    pub loc: Location,
}

pub fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! push {
        ($kind:expr, $start:expr, $len:expr, $loc:expr) => {
            tokens.push(Token {
                kind: $kind,
                start: $start,
                end: $start + $len,
                loc: $loc,
            })
        };
    }

    while i < bytes.len() {
        let c = bytes[i] as char;
        let loc = Location { line, column: col };

        // whitespace and comments
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }

        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &source[start..i];
            let kind = match word {
                "fn" => TokenKind::KwFn,
                "let" => TokenKind::KwLet,
                "if" => TokenKind::KwIf,
                "else" => TokenKind::KwElse,
                "while" => TokenKind::KwWhile,
                "return" => TokenKind::KwReturn,
                "fail" => TokenKind::KwFail,
                "true" => TokenKind::KwTrue,
                "false" => TokenKind::KwFalse,
                "int" => TokenKind::KwInt,
                "bool" => TokenKind::KwBool,
                _ => TokenKind::Ident(word.to_string()),
            };
            push!(kind, start, i - start, loc);
            col += (i - start) as u32;
            continue;
        }

        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let text = &source[start..i];
            let value: i64 = text.parse().map_err(|_| ParseError::Syntax {
                location: loc,
                message: format!("integer literal `{text}` does not fit in 64 bits"),
            })?;
            push!(TokenKind::IntLit(value), start, i - start, loc);
            col += (i - start) as u32;
            continue;
        }

        if c == '"' {
            let start = i;
            i += 1;
            col += 1;
            let mut text = String::new();
            loop {
                if i >= bytes.len() || bytes[i] == b'\n' {
                    return Err(ParseError::Syntax {
                        location: loc,
                        message: "unterminated string literal".to_string(),
                    });
                }
                let b = bytes[i] as char;
                if b == '"' {
                    i += 1;
                    col += 1;
                    break;
                }
                if b == '\\' {
                    i += 1;
                    col += 1;
                    if i >= bytes.len() {
                        return Err(ParseError::Syntax {
                            location: loc,
                            message: "unterminated escape in string literal".to_string(),
                        });
                    }
                    match bytes[i] as char {
                        '"' => text.push('"'),
                        '\\' => text.push('\\'),
                        other => {
                            return Err(ParseError::Syntax {
                                location: Location { line, column: col },
                                message: format!("unknown escape `\\{other}`"),
                            })
                        }
                    }
                    i += 1;
                    col += 1;
                    continue;
                }
                text.push(b);
                i += 1;
                col += 1;
            }
            push!(TokenKind::StrLit(text), start, i - start, loc);
            continue;
        }

        let two = if i + 1 < bytes.len() {
            &source[i..i + 2]
        } else {
            ""
        };
        let (kind, len) = match two {
            "->" => (TokenKind::Arrow, 2),
            "<=" => (TokenKind::Le, 2),
            ">=" => (TokenKind::Ge, 2),
            "==" => (TokenKind::EqEq, 2),
            "!=" => (TokenKind::Ne, 2),
            "&&" => (TokenKind::AndAnd, 2),
            "||" => (TokenKind::OrOr, 2),
            _ => match c {
                '(' => (TokenKind::LParen, 1),
                ')' => (TokenKind::RParen, 1),
                '{' => (TokenKind::LBrace, 1),
                '}' => (TokenKind::RBrace, 1),
                ',' => (TokenKind::Comma, 1),
                ':' => (TokenKind::Colon, 1),
                ';' => (TokenKind::Semi, 1),
                '=' => (TokenKind::Assign, 1),
                '+' => (TokenKind::Plus, 1),
                '-' => (TokenKind::Minus, 1),
                '*' => (TokenKind::Star, 1),
                '/' => (TokenKind::Slash, 1),
                '%' => (TokenKind::Percent, 1),
                '<' => (TokenKind::Lt, 1),
                '>' => (TokenKind::Gt, 1),
                '!' => (TokenKind::Bang, 1),
                other => {
                    return Err(ParseError::Syntax {
                        location: loc,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            },
        };
        push!(kind, i, len, loc);
        i += len;
        col += len as u32;
    }

    tokens.push(Token {
        kind: TokenKind::Eof,
        start: source.len(),
        end: source.len(),
        loc: Location { line, column: col },
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_and_keywords() {
        let toks = lex("fn f(x:int)->bool { return x <= 10 && !false; }").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| &t.kind).collect();
        assert!(kinds.contains(&&TokenKind::Arrow));
        assert!(kinds.contains(&&TokenKind::Le));
        assert!(kinds.contains(&&TokenKind::AndAnd));
        assert!(kinds.contains(&&TokenKind::Bang));
        assert_eq!(*kinds.last().unwrap(), &TokenKind::Eof);
    }

    #[test]
    fn tracks_line_and_column() {
        let toks = lex("fn f()->int {\n  return 1;\n}").unwrap();
        let ret = toks
            .iter()
            .find(|t| t.kind == TokenKind::KwReturn)
            .unwrap();
        assert_eq!(ret.loc.line, 2);
        assert_eq!(ret.loc.column, 3);
    }

    #[test]
    fn comments_are_skipped() {
        let toks = lex("# a comment\nfn").unwrap();
        assert_eq!(toks[0].kind, TokenKind::KwFn);
    }

    #[test]
    fn rejects_oversized_literal() {
        let err = lex("99999999999999999999").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn string_escapes() {
        let toks = lex(r#""a\"b\\c""#).unwrap();
        assert_eq!(toks[0].kind, TokenKind::StrLit(r#"a"b\c"#.to_string()));
    }
}
