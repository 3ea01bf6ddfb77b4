/// Lexical description of a C-family language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageProfile {
    pub name: &'static str,
    pub extensions: &'static [&'static str],
    pub line_comment: &'static [&'static str],
    pub block_comment: &'static [(&'static str, &'static str)],
    pub string_delims: &'static [char],
    pub char_delims: &'static [char],
    /// Operator lexemes; matched longest-first.
    pub operators: &'static [&'static str],
    /// Non-operator punctuation (`;`, `,`, brackets).
    pub punctuation: &'static [&'static str],
    pub keywords: &'static [&'static str],
    /// Reserved words that behave as literal values (`true`, `null`, ...).
    pub literal_words: &'static [&'static str],
    pub decision_keywords: &'static [&'static str],
    pub short_circuit: &'static [&'static str],
    pub ternary: &'static str,
    /// `#` directive lines are recognised and excluded from token counts.
    pub preprocessor: bool,
}

const C_OPERATORS: &[&str] = &[
    "...", "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "+", "-", "*", "/", "%", "<", ">", "=", "!", "~",
    "&", "|", "^", "?", ":", ".", "[",
];

const CPP_OPERATORS: &[&str] = &[
    "<=>", "->*", "...", "<<=", ">>=", "::", "->", ".*", "++", "--", "<<", ">>", "<=", ">=", "==",
    "!=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "+", "-", "*", "/", "%",
    "<", ">", "=", "!", "~", "&", "|", "^", "?", ":", ".", "[",
];

const JAVA_OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "::", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "+", "-", "*", "/", "%", "<", ">",
    "=", "!", "~", "&", "|", "^", "?", ":", ".", "[", "@",
];

const PUNCTUATION: &[&str] = &[";", ",", "(", ")", "{", "}", "]"];

const C_KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while", "_Bool",
];

const CPP_KEYWORDS: &[&str] = &[
    "auto", "bool", "break", "case", "catch", "char", "class", "const", "const_cast",
    "constexpr", "continue", "default", "delete", "do", "double", "dynamic_cast", "else", "enum",
    "explicit", "extern", "float", "for", "friend", "goto", "if", "inline", "int", "long",
    "mutable", "namespace", "new", "noexcept", "operator", "private", "protected", "public",
    "register", "reinterpret_cast", "return", "short", "signed", "sizeof", "static",
    "static_cast", "struct", "switch", "template", "this", "throw", "try", "typedef", "typename",
    "union", "unsigned", "using", "virtual", "void", "volatile", "while",
];

const JAVA_KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while",
];

const DECISIONS: &[&str] = &["if", "while", "for", "case", "catch"];
const SHORT_CIRCUIT: &[&str] = &["&&", "||"];

impl LanguageProfile {
    pub fn c() -> Self {
        Self {
            name: "c",
            extensions: &["c", "h"],
            line_comment: &["//"],
            block_comment: &[("/*", "*/")],
            string_delims: &['"'],
            char_delims: &['\''],
            operators: C_OPERATORS,
            punctuation: PUNCTUATION,
            keywords: C_KEYWORDS,
            literal_words: &["NULL", "true", "false"],
            decision_keywords: DECISIONS,
            short_circuit: SHORT_CIRCUIT,
            ternary: "?",
            preprocessor: true,
        }
    }

    pub fn cpp() -> Self {
        Self {
            name: "cpp",
            extensions: &["cc", "cpp", "cxx", "hpp", "hh", "hxx"],
            operators: CPP_OPERATORS,
            keywords: CPP_KEYWORDS,
            literal_words: &["nullptr", "NULL", "true", "false"],
            ..Self::c()
        }
    }

    pub fn java() -> Self {
        Self {
            name: "java",
            extensions: &["java"],
            operators: JAVA_OPERATORS,
            keywords: JAVA_KEYWORDS,
            literal_words: &["null", "true", "false"],
            preprocessor: false,
            ..Self::c()
        }
    }

    pub fn all() -> [LanguageProfile; 3] {
        [Self::c(), Self::cpp(), Self::java()]
    }

    pub fn by_name(name: &str) -> Option<LanguageProfile> {
        match name.to_ascii_lowercase().as_str() {
            "c" => Some(Self::c()),
            "cpp" | "c++" | "cxx" => Some(Self::cpp()),
            "java" => Some(Self::java()),
            _ => None,
        }
    }

    pub fn for_extension(ext: &str) -> Option<LanguageProfile> {
        let ext = ext.to_ascii_lowercase();
        Self::all()
            .into_iter()
            .find(|p| p.extensions.contains(&ext.as_str()))
    }

    pub fn is_keyword(&self, word: &str) -> bool {
        self.keywords.contains(&word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_and_keyword_sets_are_not_identifiers() {
        for p in LanguageProfile::all() {
            for op in p.operators.iter().chain(p.punctuation) {
                assert!(
                    !op.chars().any(|c| c.is_alphanumeric() || c == '_'),
                    "{op} in {}",
                    p.name
                );
            }
            for kw in p.keywords {
                assert!(!p.literal_words.contains(kw));
            }
        }
    }

    #[test]
    fn lookup() {
        assert_eq!(LanguageProfile::for_extension("H").unwrap().name, "c");
        assert_eq!(LanguageProfile::for_extension("hpp").unwrap().name, "cpp");
        assert_eq!(LanguageProfile::by_name("Java").unwrap().name, "java");
        assert!(LanguageProfile::by_name("go").is_none());
    }
}
