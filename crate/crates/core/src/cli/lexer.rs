//! Tokens of the `.tdg` format. Newlines are insignificant; `#` starts a
//! comment running to the end of the line.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Sym(char),
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Sym(c) => write!(f, "`{c}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

const SYMBOLS: &str = "{}[];,:@+-=";

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '^' | '\'')
}

pub fn lex(text: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i);
            }
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '"' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                j += 1;
            }
            if j >= chars.len() || chars[j] != '"' {
                return Err(LexError { line: l0, col: c0, message: "unterminated string".into() });
            }
            let s: String = chars[start..j].iter().collect();
            advance(j + 1 - i, &mut i);
            out.push(Token { tok: Tok::Str(s), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j < chars.len() && ident_char(chars[j]) {
                return Err(LexError { line: l0, col: c0, message: "identifiers may not start with a digit".into() });
            }
            let s: String = chars[i..j].iter().collect();
            let n = s.parse().map_err(|_| LexError { line: l0, col: c0, message: format!("number `{s}` out of range") })?;
            advance(j - i, &mut i);
            out.push(Token { tok: Tok::Int(n), line: l0, col: c0 });
            continue;
        }
        if ident_char(c) {
            let mut j = i;
            loop {
                while j < chars.len() && ident_char(chars[j]) {
                    j += 1;
                }
                // `vertex-family`, `a-b`: a dash joins two identifier parts
                if j + 1 < chars.len() && chars[j] == '-' && chars[j + 1].is_alphabetic() {
                    j += 1;
                    continue;
                }
                break;
            }
            let s: String = chars[i..j].iter().collect();
            advance(j - i, &mut i);
            out.push(Token { tok: Tok::Ident(s), line: l0, col: c0 });
            continue;
        }
        if SYMBOLS.contains(c) {
            advance(1, &mut i);
            out.push(Token { tok: Tok::Sym(c), line: l0, col: c0 });
            continue;
        }
        return Err(LexError { line: l0, col: c0, message: format!("unexpected character `{c}`") });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn compound_keywords_and_indices() {
        assert_eq!(
            toks("vertex-family v rank 1 # note\n x@k-1"),
            vec![
                Tok::Ident("vertex-family".into()),
                Tok::Ident("v".into()),
                Tok::Ident("rank".into()),
                Tok::Int(1),
                Tok::Ident("x".into()),
                Tok::Sym('@'),
                Tok::Ident("k".into()),
                Tok::Sym('-'),
                Tok::Int(1),
            ]
        );
    }

    #[test]
    fn positions() {
        let t = lex("a\n  b").unwrap();
        assert_eq!((t[1].line, t[1].col), (2, 3));
        assert!(lex("a $").is_err());
        assert_eq!(toks("tip \"{name}^{r}\""), vec![Tok::Ident("tip".into()), Tok::Str("{name}^{r}".into())]);
    }
}
