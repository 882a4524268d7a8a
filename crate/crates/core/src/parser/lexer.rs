use super::{ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nominal(String),
    Number(u32),
    LParen,
    RParen,
    Lt,
    Gt,
    Le,
    LBracket,
    RBracket,
    Caret,
    Bang,
    Amp,
    Pipe,
    At,
    Dot,
    Minus,
    Semi,
    Colon,
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Nominal(s) => write!(f, "nominal `'{s}`"),
            Tok::Number(n) => write!(f, "number `{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Lt => f.write_str("`<`"),
            Tok::Gt => f.write_str("`>`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::At => f.write_str("`@`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn lex(text: &str, allow_reserved: bool) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |pos: Pos, kind| Err(ParseError { line: pos.line, col: pos.col, kind });
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
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
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let ident_at = |start: usize| {
            let mut j = start;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            j
        };
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '>' => Some(Tok::Gt),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '^' => Some(Tok::Caret),
            '!' => Some(Tok::Bang),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '@' => Some(Tok::At),
            '.' => Some(Tok::Dot),
            '-' => Some(Tok::Minus),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, pos });
            i += 1;
            col += 1;
        } else if c == '<' {
            if chars.get(i + 1) == Some(&'=') {
                out.push(Token { tok: Tok::Le, pos });
                i += 2;
                col += 2;
            } else {
                out.push(Token { tok: Tok::Lt, pos });
                i += 1;
                col += 1;
            }
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            let Ok(n) = digits.parse::<u32>() else {
                return err(pos, ParseErrorKind::BadGrade(digits));
            };
            out.push(Token { tok: Tok::Number(n), pos });
            col += j - i;
            i = j;
        } else if c == '\'' {
            let j = ident_at(i + 1);
            if j == i + 1 || chars[i + 1].is_ascii_digit() {
                return err(pos, ParseErrorKind::BadNominal);
            }
            let name: String = chars[i + 1..j].iter().collect();
            if name.starts_with('_') && !allow_reserved {
                return err(pos, ParseErrorKind::Reserved(name));
            }
            out.push(Token { tok: Tok::Nominal(name), pos });
            col += j - i;
            i = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let j = ident_at(i);
            let name: String = chars[i..j].iter().collect();
            if name.starts_with('_') && !allow_reserved {
                return err(pos, ParseErrorKind::Reserved(name));
            }
            out.push(Token { tok: Tok::Ident(name), pos });
            col += j - i;
            i = j;
        } else {
            return err(pos, ParseErrorKind::UnexpectedChar(c));
        }
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}
