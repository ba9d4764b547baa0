//! The small boolean language that decides, per locative, whether the scripted
//! addressee follows up: `full_hands | (explicit_goal & edit_distance <= 3)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::features::ContextFeatures;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Cmp {
    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
            Cmp::Gt => a > b,
            Cmp::Ge => a >= b,
            Cmp::Eq => a == b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
            Cmp::Eq => "==",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FollowupRule {
    Const(bool),
    FullHands,
    ExplicitGoal,
    EditDistance(Cmp, f64),
    Not(Box<FollowupRule>),
    And(Box<FollowupRule>, Box<FollowupRule>),
    Or(Box<FollowupRule>, Box<FollowupRule>),
}

pub const DEFAULT_RULE: &str = "full_hands | (explicit_goal & edit_distance <= 3)";

impl Default for FollowupRule {
    fn default() -> Self {
        DEFAULT_RULE.parse().expect("default rule parses")
    }
}

impl FollowupRule {
    pub fn eval(&self, f: &ContextFeatures) -> bool {
        match self {
            FollowupRule::Const(b) => *b,
            FollowupRule::FullHands => f.full_hands >= 0.5,
            FollowupRule::ExplicitGoal => f.explicit_goal >= 0.5,
            FollowupRule::EditDistance(cmp, k) => cmp.holds(f.edit_distance, *k),
            FollowupRule::Not(r) => !r.eval(f),
            FollowupRule::And(a, b) => a.eval(f) && b.eval(f),
            FollowupRule::Or(a, b) => a.eval(f) || b.eval(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Num(f64),
    And,
    Or,
    Not,
    Open,
    Close,
    Cmp(Cmp),
}

fn lex(s: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let (tok, width) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => (Token::Open, 1),
            ')' => (Token::Close, 1),
            '∧' => (Token::And, 1),
            '∨' => (Token::Or, 1),
            '¬' => (Token::Not, 1),
            '≤' => (Token::Cmp(Cmp::Le), 1),
            '≥' => (Token::Cmp(Cmp::Ge), 1),
            '&' => (Token::And, if next == Some('&') { 2 } else { 1 }),
            '|' => (Token::Or, if next == Some('|') { 2 } else { 1 }),
            '!' => (Token::Not, 1),
            '<' if next == Some('=') => (Token::Cmp(Cmp::Le), 2),
            '<' => (Token::Cmp(Cmp::Lt), 1),
            '>' if next == Some('=') => (Token::Cmp(Cmp::Ge), 2),
            '>' => (Token::Cmp(Cmp::Gt), 1),
            '=' => (Token::Cmp(Cmp::Eq), if next == Some('=') { 2 } else { 1 }),
            c if c.is_ascii_digit() || c == '.' || c == '-' => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                let text: String = chars[start..j].iter().collect();
                let n = text.parse::<f64>().map_err(|_| format!("bad number {text:?}"))?;
                (Token::Num(n), j - start)
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect::<String>().to_lowercase();
                let tok = match word.as_str() {
                    "and" => Token::And,
                    "or" => Token::Or,
                    "not" => Token::Not,
                    _ => Token::Ident(word),
                };
                (tok, j - start)
            }
            other => return Err(format!("unexpected character {other:?}")),
        };
        out.push(tok);
        i += width;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<FollowupRule, String> {
        let mut left = self.term()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            left = FollowupRule::Or(Box::new(left), Box::new(self.term()?));
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<FollowupRule, String> {
        let mut left = self.factor()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            left = FollowupRule::And(Box::new(left), Box::new(self.factor()?));
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<FollowupRule, String> {
        match self.bump() {
            Some(Token::Not) => Ok(FollowupRule::Not(Box::new(self.factor()?))),
            Some(Token::Open) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::Close) => Ok(inner),
                    _ => Err("missing ')'".into()),
                }
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "true" => Ok(FollowupRule::Const(true)),
                "false" => Ok(FollowupRule::Const(false)),
                "full_hands" => Ok(FollowupRule::FullHands),
                "explicit_goal" => Ok(FollowupRule::ExplicitGoal),
                "edit_distance" => match (self.bump(), self.bump()) {
                    (Some(Token::Cmp(cmp)), Some(Token::Num(k))) => Ok(FollowupRule::EditDistance(cmp, k)),
                    _ => Err("edit_distance needs a comparison such as `<= 3`".into()),
                },
                other => Err(format!("unknown feature {other:?}")),
            },
            Some(t) => Err(format!("unexpected {t:?}")),
            None => Err("unexpected end of rule".into()),
        }
    }
}

impl FromStr for FollowupRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { tokens: lex(s)?, pos: 0 };
        let rule = p.expr()?;
        match p.peek() {
            None => Ok(rule),
            Some(t) => Err(format!("trailing {t:?}")),
        }
    }
}

impl fmt::Display for FollowupRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Parenthesize a child unless it binds tighter than its parent, or is the
        // same operator on the left (both operators are left-associative).
        fn rank(r: &FollowupRule) -> u8 {
            match r {
                FollowupRule::Or(..) => 0,
                FollowupRule::And(..) => 1,
                _ => 2,
            }
        }
        let child = |f: &mut fmt::Formatter<'_>, r: &FollowupRule, min: u8| {
            if rank(r) < min {
                write!(f, "({r})")
            } else {
                write!(f, "{r}")
            }
        };
        match self {
            FollowupRule::Const(b) => write!(f, "{b}"),
            FollowupRule::FullHands => f.write_str("full_hands"),
            FollowupRule::ExplicitGoal => f.write_str("explicit_goal"),
            FollowupRule::EditDistance(cmp, k) => write!(f, "edit_distance {} {k}", cmp.symbol()),
            FollowupRule::Not(r) => {
                f.write_str("!")?;
                child(f, r, 2)
            }
            FollowupRule::And(a, b) => {
                child(f, a, 1)?;
                f.write_str(" & ")?;
                child(f, b, 2)
            }
            // Conjunctions under a disjunction are bracketed for readability.
            FollowupRule::Or(a, b) => {
                child(f, a, if matches!(**a, FollowupRule::Or(..)) { 0 } else { 2 })?;
                f.write_str(" | ")?;
                child(f, b, 2)
            }
        }
    }
}

impl Serialize for FollowupRule {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FollowupRule {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}
