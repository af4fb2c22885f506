use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Punct(char),
    Spread,
    Name(String),
    Int(i64),
    Float(f64),
    Str(String),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    Lexer { chars: src.chars().collect(), pos: 0, line: 1, column: 1 }.run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line, column, message: message.into() }
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_ignored();
            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek() else {
                out.push(Token { tok: Tok::Eof, line, column });
                return Ok(out);
            };
            let tok = match c {
                '{' | '}' | '(' | ')' | '[' | ']' | ':' | '$' | '=' | '!' | '@' | '|' | '&' => {
                    self.bump();
                    Tok::Punct(c)
                }
                '.' => {
                    if self.peek_at(1) == Some('.') && self.peek_at(2) == Some('.') {
                        self.bump();
                        self.bump();
                        self.bump();
                        Tok::Spread
                    } else {
                        return Err(self.err(line, column, "unexpected `.`"));
                    }
                }
                '"' => self.string(line, column)?,
                '-' | '0'..='9' => self.number(line, column)?,
                c if c == '_' || c.is_ascii_alphabetic() => {
                    let mut name = String::new();
                    while let Some(c) = self.peek() {
                        if c == '_' || c.is_ascii_alphanumeric() {
                            name.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Name(name)
                }
                other => return Err(self.err(line, column, format!("unexpected character `{other}`"))),
            };
            out.push(Token { tok, line, column });
        }
    }

    fn skip_ignored(&mut self) {
        while let Some(c) = self.peek() {
            match c {
                ' ' | '\t' | '\n' | '\r' | ',' | '\u{feff}' => {
                    self.bump();
                }
                '#' => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn number(&mut self, line: usize, column: usize) -> Result<Tok, ParseError> {
        let mut text = String::new();
        if self.peek() == Some('-') {
            text.push('-');
            self.bump();
        }
        let digits_start = text.len();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            text.push(c);
            self.bump();
        }
        let int_part = &text[digits_start..];
        if int_part.is_empty() {
            return Err(self.err(line, column, "expected digits"));
        }
        if int_part.len() > 1 && int_part.starts_with('0') {
            return Err(self.err(line, column, "leading zeros are not allowed"));
        }
        let mut is_float = false;
        if self.peek() == Some('.') {
            is_float = true;
            text.push('.');
            self.bump();
            let before = text.len();
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                text.push(c);
                self.bump();
            }
            if text.len() == before {
                return Err(self.err(line, column, "expected digits after `.`"));
            }
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            is_float = true;
            text.push('e');
            self.bump();
            if let Some(sign @ ('+' | '-')) = self.peek() {
                text.push(sign);
                self.bump();
            }
            let before = text.len();
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                text.push(c);
                self.bump();
            }
            if text.len() == before {
                return Err(self.err(line, column, "expected exponent digits"));
            }
        }
        if let Some(c) = self.peek() {
            if c == '_' || c == '.' || c.is_ascii_alphabetic() {
                return Err(self.err(line, column, format!("invalid number suffix `{c}`")));
            }
        }
        if is_float {
            let v: f64 = text.parse().map_err(|_| self.err(line, column, "invalid float"))?;
            if !v.is_finite() {
                return Err(self.err(line, column, "float out of range"));
            }
            Ok(Tok::Float(v))
        } else {
            text.parse::<i64>()
                .map(Tok::Int)
                .map_err(|_| self.err(line, column, "integer does not fit in 64 bits"))
        }
    }

    fn string(&mut self, line: usize, column: usize) -> Result<Tok, ParseError> {
        if self.peek_at(1) == Some('"') && self.peek_at(2) == Some('"') {
            return Err(ParseError::Unsupported { line, column, feature: "block strings".into() });
        }
        self.bump();
        let mut out = String::new();
        loop {
            let Some(c) = self.bump() else {
                return Err(self.err(line, column, "unterminated string"));
            };
            match c {
                '"' => return Ok(Tok::Str(out)),
                '\n' | '\r' => return Err(self.err(line, column, "line break inside string")),
                '\\' => {
                    let esc = self.bump().ok_or_else(|| self.err(line, column, "unterminated escape"))?;
                    match esc {
                        '"' => out.push('"'),
                        '\\' => out.push('\\'),
                        '/' => out.push('/'),
                        'b' => out.push('\u{8}'),
                        'f' => out.push('\u{c}'),
                        'n' => out.push('\n'),
                        'r' => out.push('\r'),
                        't' => out.push('\t'),
                        'u' => {
                            let hi = self.hex4(line, column)?;
                            let code = if (0xD800..0xDC00).contains(&hi) {
                                if self.bump() != Some('\\') || self.bump() != Some('u') {
                                    return Err(self.err(line, column, "unpaired surrogate"));
                                }
                                let lo = self.hex4(line, column)?;
                                if !(0xDC00..0xE000).contains(&lo) {
                                    return Err(self.err(line, column, "unpaired surrogate"));
                                }
                                0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00)
                            } else {
                                hi
                            };
                            let ch = char::from_u32(code)
                                .ok_or_else(|| self.err(line, column, "invalid unicode escape"))?;
                            out.push(ch);
                        }
                        other => return Err(self.err(line, column, format!("invalid escape `\\{other}`"))),
                    }
                }
                c => out.push(c),
            }
        }
    }

    fn hex4(&mut self, line: usize, column: usize) -> Result<u32, ParseError> {
        let mut v = 0u32;
        for _ in 0..4 {
            let c = self.bump().ok_or_else(|| self.err(line, column, "short unicode escape"))?;
            let d = c.to_digit(16).ok_or_else(|| self.err(line, column, "invalid hex digit"))?;
            v = v * 16 + d;
        }
        Ok(v)
    }
}
