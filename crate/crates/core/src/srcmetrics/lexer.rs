use serde::{Deserialize, Serialize};

use super::{LanguageProfile, SrcError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenClass {
    Identifier,
    Literal,
    Operator,
    Keyword,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub lexeme: String,
    pub class: TokenClass,
    /// 1-based source line.
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn lexemes(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.lexeme.as_str()).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct LineFlags {
    pub code: bool,
    pub comment: bool,
}

/// Result of a lenient scan. Line-level accounting stays usable even when
/// the scan hit an unterminated construct.
pub(crate) struct Scan {
    pub tokens: Vec<Token>,
    pub lines: Vec<LineFlags>,
    pub error: Option<SrcError>,
}

struct Scanner<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    profile: &'a LanguageProfile,
    lines: Vec<LineFlags>,
    tokens: Vec<Token>,
    in_directive: bool,
    line_has_token: bool,
}

impl<'a> Scanner<'a> {
    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        let mut i = self.pos;
        for c in s.chars() {
            if self.chars.get(i) != Some(&c) {
                return false;
            }
            i += 1;
        }
        true
    }

    fn flags(&mut self) -> &mut LineFlags {
        let idx = self.line - 1;
        if self.lines.len() <= idx {
            self.lines.resize(idx + 1, LineFlags::default());
        }
        &mut self.lines[idx]
    }

    fn mark_comment(&mut self) {
        self.flags().comment = true;
    }

    fn mark_code(&mut self) {
        self.flags().code = true;
    }

    fn newline(&mut self) {
        // touch the finished line so blank lines are represented
        self.flags();
        let continued = self.in_directive && self.pos > 0 && self.chars[self.pos - 1] == '\\';
        if !continued {
            self.in_directive = false;
        }
        self.line += 1;
        self.line_has_token = false;
        self.pos += 1;
    }

    fn push(&mut self, lexeme: String, class: TokenClass) {
        self.mark_code();
        self.line_has_token = true;
        if !self.in_directive {
            self.tokens.push(Token {
                lexeme,
                class,
                line: self.line,
            });
        }
    }

    fn run(&mut self) -> Option<SrcError> {
        while let Some(c) = self.peek(0) {
            if c == '\n' {
                self.newline();
                continue;
            }
            if c.is_whitespace() {
                self.pos += 1;
                continue;
            }
            if self.profile.line_comment.iter().any(|m| self.starts_with(m)) {
                self.mark_comment();
                while let Some(ch) = self.peek(0) {
                    if ch == '\n' {
                        break;
                    }
                    self.pos += 1;
                }
                continue;
            }
            if let Some(&(open, close)) = self
                .profile
                .block_comment
                .iter()
                .find(|(o, _)| self.starts_with(o))
            {
                let start_line = self.line;
                self.mark_comment();
                self.pos += open.chars().count();
                loop {
                    match self.peek(0) {
                        None => return Some(SrcError::UnterminatedComment { line: start_line }),
                        Some('\n') => {
                            self.newline();
                            self.mark_comment();
                        }
                        Some(_) if self.starts_with(close) => {
                            self.pos += close.chars().count();
                            break;
                        }
                        Some(_) => self.pos += 1,
                    }
                }
                continue;
            }
            if self.profile.preprocessor && c == '#' && !self.line_has_token {
                self.in_directive = true;
                self.mark_code();
                self.line_has_token = true;
                self.pos += 1;
                continue;
            }
            if self.profile.string_delims.contains(&c) || self.profile.char_delims.contains(&c) {
                let start_line = self.line;
                let mut lexeme = String::new();
                lexeme.push(c);
                self.pos += 1;
                loop {
                    match self.peek(0) {
                        None | Some('\n') => {
                            return Some(SrcError::UnterminatedString { line: start_line })
                        }
                        Some('\\') => {
                            lexeme.push('\\');
                            if let Some(n) = self.peek(1) {
                                if n == '\n' {
                                    return Some(SrcError::UnterminatedString { line: start_line });
                                }
                                lexeme.push(n);
                            }
                            self.pos += 2;
                        }
                        Some(ch) if ch == c => {
                            lexeme.push(ch);
                            self.pos += 1;
                            break;
                        }
                        Some(ch) => {
                            lexeme.push(ch);
                            self.pos += 1;
                        }
                    }
                }
                self.push(lexeme, TokenClass::Literal);
                continue;
            }
            if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) {
                let mut lexeme = String::new();
                while let Some(ch) = self.peek(0) {
                    let exp_sign = (ch == '+' || ch == '-')
                        && matches!(lexeme.chars().last(), Some('e' | 'E' | 'p' | 'P'))
                        && !lexeme.starts_with("0x")
                        && !lexeme.starts_with("0X");
                    let digit_sep = ch == '\'' && self.profile.name == "cpp";
                    if ch.is_ascii_alphanumeric() || ch == '.' || ch == '_' || digit_sep || exp_sign {
                        lexeme.push(ch);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.push(lexeme, TokenClass::Literal);
                continue;
            }
            if c.is_alphabetic() || c == '_' || c == '$' {
                let mut word = String::new();
                while let Some(ch) = self.peek(0) {
                    if ch.is_alphanumeric() || ch == '_' || ch == '$' {
                        word.push(ch);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let class = if self.profile.is_keyword(&word) {
                    TokenClass::Keyword
                } else if self.profile.literal_words.contains(&word.as_str()) {
                    TokenClass::Literal
                } else {
                    TokenClass::Identifier
                };
                self.push(word, class);
                continue;
            }
            if let Some((lexeme, class)) = self.match_symbol() {
                self.pos += lexeme.chars().count();
                self.push(lexeme, class);
                continue;
            }
            // stray character (e.g. a lone backslash): code, but not a token
            if c == '\\' && self.in_directive {
                self.pos += 1;
                continue;
            }
            self.mark_code();
            self.pos += 1;
        }
        None
    }

    fn match_symbol(&self) -> Option<(String, TokenClass)> {
        for len in (1..=4).rev() {
            let cand: String = self.chars[self.pos..].iter().take(len).collect();
            if cand.chars().count() < len {
                continue;
            }
            if self.profile.operators.contains(&cand.as_str()) {
                return Some((cand, TokenClass::Operator));
            }
            if self.profile.punctuation.contains(&cand.as_str()) {
                return Some((cand, TokenClass::Punctuation));
            }
        }
        None
    }
}

pub(crate) fn scan(source: &str, profile: &LanguageProfile) -> Scan {
    let mut s = Scanner {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        profile,
        lines: Vec::new(),
        tokens: Vec::new(),
        in_directive: false,
        line_has_token: false,
    };
    let error = s.run();
    let mut lines = s.lines;
    // physical line count: a trailing newline does not open a new line
    let physical = source.lines().count();
    lines.resize(physical, LineFlags::default());
    Scan {
        tokens: s.tokens,
        lines,
        error,
    }
}

/// Lexes source into tokens. Comment text and whitespace are dropped;
/// string and character literals become single literal tokens; operators
/// use maximal munch. Preprocessor directive lines produce no tokens.
pub fn tokenize(source: &str, profile: &LanguageProfile) -> Result<TokenStream, SrcError> {
    let scan = scan(source, profile);
    match scan.error {
        Some(e) => Err(e),
        None => Ok(TokenStream {
            tokens: scan.tokens,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex(s: &str) -> Vec<String> {
        tokenize(s, &LanguageProfile::c())
            .unwrap()
            .tokens
            .into_iter()
            .map(|t| t.lexeme)
            .collect()
    }

    #[test]
    fn direct_lexing() {
        assert_eq!(lex("a = b + c;"), vec!["a", "=", "b", "+", "c", ";"]);
    }

    #[test]
    fn comments_stripped() {
        assert_eq!(lex("/* x */ y = 1;"), vec!["y", "=", "1", ";"]);
        assert_eq!(lex("y = 1; // z + w"), vec!["y", "=", "1", ";"]);
    }

    #[test]
    fn literals_are_opaque() {
        let ts = tokenize("s = \"a+b\";", &LanguageProfile::c()).unwrap();
        assert_eq!(ts.lexemes(), vec!["s", "=", "\"a+b\"", ";"]);
        assert_eq!(ts.tokens[2].class, TokenClass::Literal);
        assert_eq!(lex("c = '\\'';"), vec!["c", "=", "'\\''", ";"]);
        assert_eq!(lex("x = 1.5e-3f;"), vec!["x", "=", "1.5e-3f", ";"]);
    }

    #[test]
    fn maximal_munch() {
        assert_eq!(lex("a <<= b >> c;"), vec!["a", "<<=", "b", ">>", "c", ";"]);
        assert_eq!(lex("p->q++"), vec!["p", "->", "q", "++"]);
        let java = tokenize("x >>>= 2;", &LanguageProfile::java()).unwrap();
        assert_eq!(java.lexemes(), vec!["x", ">>>=", "2", ";"]);
    }

    #[test]
    fn classes() {
        let ts = tokenize("if (x) return NULL;", &LanguageProfile::c()).unwrap();
        let classes: Vec<_> = ts.tokens.iter().map(|t| t.class).collect();
        assert_eq!(
            classes,
            vec![
                TokenClass::Keyword,
                TokenClass::Punctuation,
                TokenClass::Identifier,
                TokenClass::Punctuation,
                TokenClass::Keyword,
                TokenClass::Literal,
                TokenClass::Punctuation,
            ]
        );
    }

    #[test]
    fn directives_produce_no_tokens() {
        let src = "#include <stdio.h>\n#define MAX(a,b) \\\n  ((a)>(b)?(a):(b))\nint x;\n";
        let ts = tokenize(src, &LanguageProfile::c()).unwrap();
        assert_eq!(ts.lexemes(), vec!["int", "x", ";"]);
        assert_eq!(ts.tokens[0].line, 4);
    }

    #[test]
    fn unterminated_constructs_report_line() {
        assert_eq!(
            tokenize("a;\n/* open\n", &LanguageProfile::c()).unwrap_err(),
            SrcError::UnterminatedComment { line: 2 }
        );
        assert_eq!(
            tokenize("a;\nb;\ns = \"abc\n", &LanguageProfile::c()).unwrap_err(),
            SrcError::UnterminatedString { line: 3 }
        );
    }

    #[test]
    fn line_numbers_non_decreasing() {
        let ts = tokenize("a\n\n/* c\n */ b = c\n+ d;", &LanguageProfile::c()).unwrap();
        let lines: Vec<_> = ts.tokens.iter().map(|t| t.line).collect();
        assert_eq!(lines, vec![1, 4, 4, 4, 5, 5, 5]);
    }
}
