//! Minimal s-expression reader for solver responses.

use std::fmt;

use crate::SmtError;

/// An s-expression: an atom or a parenthesized list. Atoms keep their
/// raw spelling, including `|...|` symbol quoting and `"..."` string
/// quotes; [`Sexpr::symbol`] strips symbol quoting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

impl Sexpr {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(s) => Some(s),
            Sexpr::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::Atom(_) => None,
            Sexpr::List(items) => Some(items),
        }
    }

    /// Atom with `|...|` quoting removed.
    pub fn symbol(&self) -> Option<&str> {
        let a = self.atom()?;
        if a.len() >= 2 && a.starts_with('|') && a.ends_with('|') {
            Some(&a[1..a.len() - 1])
        } else {
            Some(a)
        }
    }

    /// True when this is a list whose first element is the given atom.
    pub fn is_call(&self, head: &str) -> bool {
        self.list()
            .and_then(|items| items.first())
            .and_then(|h| h.atom())
            .is_some_and(|a| a == head)
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a) => write!(f, "{a}"),
            Sexpr::List(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Parses exactly one s-expression from `input`.
pub fn parse_one(input: &str) -> Result<Sexpr, SmtError> {
    let tokens = tokenize(input)?;
    let mut pos = 0;
    let expr = parse_tokens(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(SmtError::Parse(format!(
            "trailing tokens after s-expression: {input}"
        )));
    }
    Ok(expr)
}

fn parse_tokens(tokens: &[String], pos: &mut usize) -> Result<Sexpr, SmtError> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| SmtError::Parse("unexpected end of solver output".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexpr::List(items));
                    }
                    Some(_) => items.push(parse_tokens(tokens, pos)?),
                    None => return Err(SmtError::Parse("unbalanced parentheses".into())),
                }
            }
        }
        ")" => Err(SmtError::Parse("unexpected closing parenthesis".into())),
        _ => Ok(Sexpr::Atom(tok.clone())),
    }
}

fn tokenize(input: &str) -> Result<Vec<String>, SmtError> {
    let mut tokens = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' | ')' => {
                chars.next();
                tokens.push(c.to_string());
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '"' => {
                chars.next();
                let mut tok = String::from('"');
                loop {
                    match chars.next() {
                        Some('"') => {
                            // A doubled quote is an escaped quote inside the string.
                            if chars.peek() == Some(&'"') {
                                chars.next();
                                tok.push_str("\"\"");
                            } else {
                                tok.push('"');
                                break;
                            }
                        }
                        Some(c) => tok.push(c),
                        None => return Err(SmtError::Parse("unterminated string".into())),
                    }
                }
                tokens.push(tok);
            }
            '|' => {
                chars.next();
                let mut tok = String::from('|');
                loop {
                    match chars.next() {
                        Some('|') => {
                            tok.push('|');
                            break;
                        }
                        Some(c) => tok.push(c),
                        None => return Err(SmtError::Parse("unterminated quoted symbol".into())),
                    }
                }
                tokens.push(tok);
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut tok = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    tok.push(c);
                    chars.next();
                }
                tokens.push(tok);
            }
        }
    }
    Ok(tokens)
}
