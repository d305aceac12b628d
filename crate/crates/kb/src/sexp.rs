//! S-expressions: the concrete syntax of the command language.
//!
//! A source file is a sequence of forms.  A form is an atom — a maximal
//! run of characters other than whitespace, parentheses, and `;` — or a
//! parenthesized list of forms.  `;` starts a comment that runs to the
//! end of the line.  Every form remembers the line and column of its
//! first character, so later stages can report positions without keeping
//! the source around.
//!
//! Printing is canonical: atoms verbatim, lists with single spaces and no
//! line breaks.  Parsing a printed form yields a congruent form (equal up
//! to positions), and printing is injective on congruence classes, so the
//! printed string is a usable identity for expected-value comparisons.

use std::fmt;

// ---------------------------------------------------------------------
// Forms
// ---------------------------------------------------------------------

/// A parsed form with the 1-based source position of its first character.
#[derive(Clone, Debug)]
pub enum Sexp {
    Atom { text: String, line: usize, column: usize },
    List { items: Vec<Sexp>, line: usize, column: usize },
}

impl Sexp {
    pub fn line(&self) -> usize {
        match self {
            Sexp::Atom { line, .. } | Sexp::List { line, .. } => *line,
        }
    }

    pub fn column(&self) -> usize {
        match self {
            Sexp::Atom { column, .. } | Sexp::List { column, .. } => *column,
        }
    }

    /// The text, when the form is an atom.
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom { text, .. } => Some(text),
            Sexp::List { .. } => None,
        }
    }

    /// The items, when the form is a list.
    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::Atom { .. } => None,
            Sexp::List { items, .. } => Some(items),
        }
    }

    /// The head symbol of a list form `(head …)`.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|items| items.first()).and_then(Sexp::atom)
    }

    /// Structural equality, ignoring source positions.
    pub fn congruent(&self, other: &Sexp) -> bool {
        match (self, other) {
            (Sexp::Atom { text: a, .. }, Sexp::Atom { text: b, .. }) => a == b,
            (Sexp::List { items: a, .. }, Sexp::List { items: b, .. }) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.congruent(y))
            }
            _ => false,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom { text, .. } => f.write_str(text),
            Sexp::List { items, .. } => {
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

// ---------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------

/// A parse failure at a definite position, carrying the token classes
/// that would have been accepted there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    fn new(line: usize, column: usize, expected: &[&str], found: impl Into<String>) -> ParseError {
        ParseError {
            line,
            column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: expected {}, found {}",
            self.line,
            self.column,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

// ---------------------------------------------------------------------
// Lexing
// ---------------------------------------------------------------------

#[derive(Clone, Debug)]
enum Token {
    LParen { line: usize, column: usize },
    RParen { line: usize, column: usize },
    Atom { text: String, line: usize, column: usize },
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::LParen { .. } => "`(`".into(),
            Token::RParen { .. } => "`)`".into(),
            Token::Atom { text, .. } => format!("`{text}`"),
        }
    }

    fn position(&self) -> (usize, usize) {
        match self {
            Token::LParen { line, column }
            | Token::RParen { line, column }
            | Token::Atom { line, column, .. } => (*line, *column),
        }
    }
}

fn is_atom_char(c: char) -> bool {
    !c.is_whitespace() && c != '(' && c != ')' && c != ';'
}

fn lex(input: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c == ';' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                column += 1;
            }
        } else if c == '(' {
            tokens.push(Token::LParen { line, column });
            chars.next();
            column += 1;
        } else if c == ')' {
            tokens.push(Token::RParen { line, column });
            chars.next();
            column += 1;
        } else {
            let (l, col) = (line, column);
            let mut text = String::new();
            while let Some(&c) = chars.peek() {
                if !is_atom_char(c) {
                    break;
                }
                text.push(c);
                chars.next();
                column += 1;
            }
            tokens.push(Token::Atom { text, line: l, column: col });
        }
    }
    tokens
}

// ---------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_line: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn end_position(&self) -> (usize, usize) {
        (self.end_line, self.end_column)
    }

    fn form(&mut self) -> Result<Sexp, ParseError> {
        match self.peek().cloned() {
            None => {
                let (line, column) = self.end_position();
                Err(ParseError::new(line, column, &["atom", "`(`"], "end of input"))
            }
            Some(Token::RParen { line, column }) => {
                Err(ParseError::new(line, column, &["atom", "`(`"], "`)`"))
            }
            Some(Token::Atom { text, line, column }) => {
                self.pos += 1;
                Ok(Sexp::Atom { text, line, column })
            }
            Some(Token::LParen { line, column }) => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    match self.peek() {
                        None => {
                            let (l, c) = self.end_position();
                            return Err(ParseError::new(l, c, &["form", "`)`"], "end of input"));
                        }
                        Some(Token::RParen { .. }) => {
                            self.pos += 1;
                            return Ok(Sexp::List { items, line, column });
                        }
                        Some(_) => items.push(self.form()?),
                    }
                }
            }
        }
    }
}

fn parser_for(input: &str) -> Parser {
    let end_line = 1 + input.matches('\n').count();
    let end_column = 1 + input.lines().last().map_or(0, |l| l.chars().count());
    let end_column = if input.ends_with('\n') { 1 } else { end_column };
    Parser { tokens: lex(input), pos: 0, end_line, end_column }
}

/// Parses a whole source text into its sequence of top-level forms.
pub fn parse(input: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut p = parser_for(input);
    let mut forms = Vec::new();
    while p.peek().is_some() {
        forms.push(p.form()?);
    }
    Ok(forms)
}

/// Parses exactly one form; trailing content is an error.
pub fn parse_one(input: &str) -> Result<Sexp, ParseError> {
    let mut p = parser_for(input);
    let form = p.form()?;
    if let Some(extra) = p.peek() {
        let (line, column) = extra.position();
        return Err(ParseError::new(line, column, &["end of input"], extra.describe()));
    }
    Ok(form)
}

// ---------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_then_parsing_is_congruent() {
        let src = "(def a (and (gen x) top)) ; tail comment\n(leq a a)\n";
        let forms = parse(src).unwrap();
        assert_eq!(forms.len(), 2);
        let printed: Vec<String> = forms.iter().map(|f| f.to_string()).collect();
        assert_eq!(printed[0], "(def a (and (gen x) top))");
        assert_eq!(printed[1], "(leq a a)");
        for (form, text) in forms.iter().zip(&printed) {
            assert!(form.congruent(&parse_one(text).unwrap()));
        }
    }

    #[test]
    fn positions_point_at_first_characters() {
        let forms = parse("  (a\n b)\nc").unwrap();
        assert_eq!((forms[0].line(), forms[0].column()), (1, 3));
        let items = forms[0].list().unwrap();
        assert_eq!((items[1].line(), items[1].column()), (2, 2));
        assert_eq!((forms[1].line(), forms[1].column()), (3, 1));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let forms = parse("; header\n\n(a) ;; inline\n; trailing\n").unwrap();
        assert_eq!(forms.len(), 1);
        assert_eq!(forms[0].to_string(), "(a)");
    }

    #[test]
    fn empty_lists_round_trip() {
        let form = parse_one("(seq () top bot)").unwrap();
        assert_eq!(form.to_string(), "(seq () top bot)");
        assert_eq!(form.list().unwrap()[1].list().unwrap().len(), 0);
    }

    #[test]
    fn stray_and_unclosed_parens_are_reported_with_positions() {
        let err = parse("(a))").unwrap_err();
        assert_eq!((err.line, err.column), (1, 4));
        assert_eq!(err.found, "`)`");

        let err = parse("(a (b)").unwrap_err();
        assert_eq!((err.line, err.column), (1, 7));
        assert_eq!(err.found, "end of input");
        assert!(err.expected.contains(&"`)`".to_string()));

        let err = parse_one("a b").unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
        assert_eq!(err.expected, vec!["end of input".to_string()]);
    }
}
