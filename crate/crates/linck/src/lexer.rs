//! Tokenizer for `.lq` source.
//!
//! ASCII tokens with Unicode aliases for the paper's symbols; `--`
//! comments run to end of line. There is no layout rule, but a token at
//! column 1 is flagged as a declaration start so the parser knows where
//! multi-line declarations end.

use std::sync::Arc;

use crate::span::Span;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Lower(String),
    Upper(String),
    Int(i64),
    Str(String),
    /// `@1` or `@w`
    MultAnn(crate::constraint::Mult),
    // keywords
    Class,
    Dup,
    Data,
    Constraint,
    Forall,
    Exists,
    Let,
    In,
    Case,
    Of,
    If,
    Then,
    Else,
    Pack,
    LinearlyDo,
    LinearlyReturn,
    // punctuation
    DoubleColon, // ::
    ArrowMany,   // ->
    ArrowOne,    // -o
    FatArrow,    // =>
    LollyArrow,  // =o
    Lambda,      // \
    Dot,
    Comma,
    Semi,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Equals,
    Pipe,
    Star,
    Bind, // <-
    Underscore,
    Op(String), // + - $ < <= > >= == /= && || div mod
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// True when the token starts at column 1: declarations begin here.
    pub decl_start: bool,
}

pub struct LexError {
    pub message: String,
    pub span: Span,
}

pub fn lex(file: &str, src: &str) -> Result<Vec<Token>, LexError> {
    let file: Arc<str> = Arc::from(file);
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! span_here {
        ($l:expr, $c:expr) => {
            Span::new(file.clone(), $l, $c, line, col)
        };
    }

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        // whitespace
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        // comments
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        let mut push = |tok: Tok, line_: u32, col_: u32, end_line: u32, end_col: u32| {
            out.push(Token {
                tok,
                span: Span::new(file.clone(), line_, col_, end_line, end_col),
                decl_start: col_ == 1,
            });
        };
        // identifiers and keywords
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
                col += 1;
            }
            let word: String = chars[start..i].iter().collect();
            // `Linearly.do` and `Linearly.return` are single tokens.
            if word == "Linearly" && chars.get(i) == Some(&'.') {
                let mut j = i + 1;
                let wstart = j;
                while j < chars.len() && chars[j].is_alphanumeric() {
                    j += 1;
                }
                let next: String = chars[wstart..j].iter().collect();
                if next == "do" || next == "return" {
                    col += 1 + next.len() as u32;
                    i = j;
                    let tok = if next == "do" { Tok::LinearlyDo } else { Tok::LinearlyReturn };
                    push(tok, tl, tc, line, col);
                    continue;
                }
            }
            let tok = match word.as_str() {
                "_" => Tok::Underscore,
                "class" => Tok::Class,
                "dup" => Tok::Dup,
                "data" => Tok::Data,
                "constraint" => Tok::Constraint,
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                "let" => Tok::Let,
                "in" => Tok::In,
                "case" => Tok::Case,
                "of" => Tok::Of,
                "if" => Tok::If,
                "then" => Tok::Then,
                "else" => Tok::Else,
                "pack" => Tok::Pack,
                "div" | "mod" => Tok::Op(word),
                _ => {
                    if word.chars().next().unwrap().is_uppercase() {
                        Tok::Upper(word)
                    } else {
                        Tok::Lower(word)
                    }
                }
            };
            push(tok, tl, tc, line, col);
            continue;
        }
        // numbers
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
                col += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n: i64 = text.parse().map_err(|_| LexError {
                message: format!("integer literal `{text}` out of range"),
                span: span_here!(tl, tc),
            })?;
            push(Tok::Int(n), tl, tc, line, col);
            continue;
        }
        // string literals
        if c == '"' {
            i += 1;
            col += 1;
            let mut text = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(LexError {
                            message: "unterminated string literal".into(),
                            span: span_here!(tl, tc),
                        })
                    }
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some('\\') => {
                        let esc = chars.get(i + 1).copied();
                        let ch = match esc {
                            Some('n') => '\n',
                            Some('\\') => '\\',
                            Some('"') => '"',
                            _ => {
                                return Err(LexError {
                                    message: "unknown escape in string literal".into(),
                                    span: span_here!(tl, tc),
                                })
                            }
                        };
                        text.push(ch);
                        i += 2;
                        col += 2;
                    }
                    Some(&ch) => {
                        text.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            push(Tok::Str(text), tl, tc, line, col);
            continue;
        }
        // multiplicity annotations
        if c == '@' {
            let next = chars.get(i + 1).copied();
            let mult = match next {
                Some('1') => crate::constraint::Mult::One,
                Some('w') => crate::constraint::Mult::Many,
                _ => {
                    return Err(LexError {
                        message: format!(
                            "unknown multiplicity `@{}`; only @1 and @w exist",
                            next.map(String::from).unwrap_or_default()
                        ),
                        span: span_here!(tl, tc),
                    })
                }
            };
            i += 2;
            col += 2;
            push(Tok::MultAnn(mult), tl, tc, line, col);
            continue;
        }
        // unicode aliases
        let alias = match c {
            '\u{22b8}' | '\u{22b6}' | '\u{2988}' | '\u{29bf}' => Some(Tok::ArrowOne), // lollipop-like
            '\u{2297}' => Some(Tok::Star),                                            // tensor
            '\u{2203}' => Some(Tok::Exists),
            '\u{2200}' => Some(Tok::Forall),
            '\u{25a1}' => Some(Tok::Pack), // white square
            '\u{2190}' => Some(Tok::Bind),
            '\u{03bb}' => Some(Tok::Lambda),
            '\u{2192}' => Some(Tok::ArrowMany),
            _ => None,
        };
        if let Some(tok) = alias {
            i += 1;
            col += 1;
            push(tok, tl, tc, line, col);
            continue;
        }
        if c == '\u{22a8}' || (c == '=' && chars.get(i + 1) == Some(&'\u{2218}')) {
            // `=∘` linear constraint arrow
            i += if c == '=' { 2 } else { 1 };
            col += if c == '=' { 2 } else { 1 };
            push(Tok::LollyArrow, tl, tc, line, col);
            continue;
        }
        // multi-char ASCII operators; longest match first
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let two = rest.as_str();
        let boundary = |j: usize| {
            chars
                .get(j)
                .map(|ch| !(ch.is_alphanumeric() || *ch == '_'))
                .unwrap_or(true)
        };
        let (tok, len) = match two {
            "::" => (Tok::DoubleColon, 2),
            "->" => (Tok::ArrowMany, 2),
            "-o" if boundary(i + 2) => (Tok::ArrowOne, 2),
            "=>" => (Tok::FatArrow, 2),
            "=o" if boundary(i + 2) => (Tok::LollyArrow, 2),
            "<-" => (Tok::Bind, 2),
            "<=" => (Tok::Op("<=".into()), 2),
            ">=" => (Tok::Op(">=".into()), 2),
            "==" => (Tok::Op("==".into()), 2),
            "/=" => (Tok::Op("/=".into()), 2),
            "&&" => (Tok::Op("&&".into()), 2),
            "||" => (Tok::Op("||".into()), 2),
            _ => {
                let single = match c {
                    '\\' => Tok::Lambda,
                    '.' => Tok::Dot,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '=' => Tok::Equals,
                    '|' => Tok::Pipe,
                    '*' => Tok::Star,
                    '+' => Tok::Op("+".into()),
                    '-' => Tok::Op("-".into()),
                    '$' => Tok::Op("$".into()),
                    '<' => Tok::Op("<".into()),
                    '>' => Tok::Op(">".into()),
                    other => {
                        return Err(LexError {
                            message: format!("unexpected character `{other}`"),
                            span: span_here!(tl, tc),
                        })
                    }
                };
                (single, 1)
            }
        };
        i += len;
        col += len as u32;
        push(tok, tl, tc, line, col);
    }
    Ok(out)
}
