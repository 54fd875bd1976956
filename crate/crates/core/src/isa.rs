//! PGLBbt / PGLBsbt instruction sequences: syntax, parsing, canonical
//! printing, and the syntactic transformations `swap`, `ftod`, `power`
//! and concatenation.
//!
//! The concrete grammar is ASCII: basic instructions `f.m`, tests `+f.m`
//! and `-f.m`, jumps `#n` and `\#n`, terminators `!`, `!t`, `!f`, separated
//! by `;`. A `#` that is not immediately followed by a digit starts a
//! comment running to the end of the line.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Unbounded natural number (jump offsets, unit states).
pub type Natural = BigUint;

/// Lower-case identifier: `[a-z][a-z0-9_]*`. Used for foci and method names.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(String);

impl Ident {
    /// Canonicalizes ASCII upper-case letters to lower-case, then validates.
    pub fn new(s: &str) -> Result<Self, IsaError> {
        let lowered: String = s.to_ascii_lowercase();
        let mut chars = lowered.chars();
        let ok = match chars.next() {
            Some(c) if c.is_ascii_lowercase() => {
                chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
            }
            _ => false,
        };
        if ok {
            Ok(Ident(lowered))
        } else {
            Err(IsaError::BadIdent(s.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shorthand for a known-good identifier; panics on invalid input.
pub fn ident(s: &str) -> Ident {
    Ident::new(s).expect("invalid identifier literal")
}

/// A basic instruction `focus.method`: a request to the named service to
/// process a method.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasicInstruction {
    pub focus: Ident,
    pub method: Ident,
}

impl BasicInstruction {
    pub fn new(focus: Ident, method: Ident) -> Self {
        BasicInstruction { focus, method }
    }
}

impl fmt::Display for BasicInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.focus, self.method)
    }
}

impl fmt::Debug for BasicInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.focus, self.method)
    }
}

/// Shorthand for a known-good basic instruction; panics on invalid input.
pub fn basic(focus: &str, method: &str) -> BasicInstruction {
    BasicInstruction::new(ident(focus), ident(method))
}

/// A primitive instruction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Instruction {
    /// Plain basic instruction `a`: execute, always proceed with the next
    /// instruction.
    Plain(BasicInstruction),
    /// Positive test `+a`: proceed with the next instruction on reply T,
    /// skip one on reply F.
    PosTest(BasicInstruction),
    /// Negative test `-a`: roles of the replies reversed.
    NegTest(BasicInstruction),
    /// Forward jump `#l`. Offset 0 means deadlock.
    FwdJump(Natural),
    /// Backward jump `\#l`. Offset 0 means deadlock.
    BwdJump(Natural),
    /// Plain termination `!`: terminate without delivering a value.
    Halt,
    /// Positive termination `!t`: terminate delivering T.
    HaltPos,
    /// Negative termination `!f`: terminate delivering F.
    HaltNeg,
}

impl Instruction {
    pub fn fwd(l: u64) -> Instruction {
        Instruction::FwdJump(Natural::from(l))
    }

    pub fn bwd(l: u64) -> Instruction {
        Instruction::BwdJump(Natural::from(l))
    }

    /// The basic instruction inside a plain/test instruction, if any.
    pub fn basic(&self) -> Option<&BasicInstruction> {
        match self {
            Instruction::Plain(a) | Instruction::PosTest(a) | Instruction::NegTest(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_terminator(&self) -> bool {
        matches!(
            self,
            Instruction::Halt | Instruction::HaltPos | Instruction::HaltNeg
        )
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Plain(a) => write!(f, "{a}"),
            Instruction::PosTest(a) => write!(f, "+{a}"),
            Instruction::NegTest(a) => write!(f, "-{a}"),
            Instruction::FwdJump(l) => write!(f, "#{l}"),
            Instruction::BwdJump(l) => write!(f, "\\#{l}"),
            Instruction::Halt => f.write_str("!"),
            Instruction::HaltPos => f.write_str("!t"),
            Instruction::HaltNeg => f.write_str("!f"),
        }
    }
}

/// Program notation dialect.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Dialect {
    /// PGLB with Boolean termination: all eight primitive instructions.
    Pglbbt,
    /// Strict Boolean termination: the plain termination instruction `!`
    /// does not occur.
    Pglbsbt,
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dialect::Pglbbt => f.write_str("pglbbt"),
            Dialect::Pglbsbt => f.write_str("pglbsbt"),
        }
    }
}

/// A non-empty instruction sequence together with its dialect.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstrSeq {
    dialect: Dialect,
    instructions: Vec<Instruction>,
}

impl InstrSeq {
    pub fn new(dialect: Dialect, instructions: Vec<Instruction>) -> Result<Self, IsaError> {
        if instructions.is_empty() {
            return Err(IsaError::EmptyProgram);
        }
        if dialect == Dialect::Pglbsbt && instructions.iter().any(|u| *u == Instruction::Halt) {
            return Err(IsaError::HaltInStrict);
        }
        Ok(InstrSeq {
            dialect,
            instructions,
        })
    }

    pub fn dialect(&self) -> Dialect {
        self.dialect
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Instruction at 1-based position `i`, if in range.
    pub fn at(&self, i: usize) -> Option<&Instruction> {
        if i >= 1 {
            self.instructions.get(i - 1)
        } else {
            None
        }
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// Canonical text form: single `;` separators, single spaces, lower-case
    /// identifiers. Injective on instruction lists.
    pub fn print(&self) -> String {
        let parts: Vec<String> = self.instructions.iter().map(|u| u.to_string()).collect();
        parts.join(" ; ")
    }

    /// Every `!t` exchanged with `!f`; everything else untouched.
    pub fn swap(&self) -> InstrSeq {
        let instructions = self
            .instructions
            .iter()
            .map(|u| match u {
                Instruction::HaltPos => Instruction::HaltNeg,
                Instruction::HaltNeg => Instruction::HaltPos,
                other => other.clone(),
            })
            .collect();
        InstrSeq {
            dialect: self.dialect,
            instructions,
        }
    }

    /// Every `!f` replaced by `#0`; turns negative termination into deadlock.
    pub fn ftod(&self) -> InstrSeq {
        let instructions = self
            .instructions
            .iter()
            .map(|u| match u {
                Instruction::HaltNeg => Instruction::FwdJump(Natural::zero()),
                other => other.clone(),
            })
            .collect();
        InstrSeq {
            dialect: self.dialect,
            instructions,
        }
    }

    /// Positional concatenation; jumps are not renumbered.
    pub fn concat(parts: &[InstrSeq]) -> Result<InstrSeq, IsaError> {
        let first = parts.first().ok_or(IsaError::EmptyProgram)?;
        let dialect = first.dialect;
        if parts.iter().any(|p| p.dialect != dialect) {
            return Err(IsaError::MixedDialects);
        }
        let mut instructions = Vec::new();
        for p in parts {
            instructions.extend(p.instructions.iter().cloned());
        }
        InstrSeq::new(dialect, instructions)
    }

    /// Parses the concrete grammar; positions in errors are 1-based.
    pub fn parse(text: &str, dialect: Dialect) -> Result<InstrSeq, ParseError> {
        parse_program(text, dialect)
    }
}

impl fmt::Display for InstrSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.print())
    }
}

impl fmt::Debug for InstrSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.dialect, self.print())
    }
}

/// `u^n`: `u^0 = #1`, `u^1 = u`, `u^(n+2) = u ; u^(n+1)`.
pub fn power(u: &Instruction, n: usize) -> InstrSeq {
    let dialect = if *u == Instruction::Halt {
        Dialect::Pglbbt
    } else {
        Dialect::Pglbsbt
    };
    let instructions = if n == 0 {
        vec![Instruction::FwdJump(Natural::one())]
    } else {
        vec![u.clone(); n]
    };
    InstrSeq::new(dialect, instructions).expect("power output is non-empty")
}

/// Structural errors on instruction sequences.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IsaError {
    /// Instruction sequences have length at least one.
    EmptyProgram,
    /// `!` occurred in a PGLBsbt sequence.
    HaltInStrict,
    /// Identifier does not match `[a-z][a-z0-9_]*`.
    BadIdent(String),
    /// Concatenation of sequences with different dialects.
    MixedDialects,
}

impl fmt::Display for IsaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsaError::EmptyProgram => f.write_str("instruction sequence must be non-empty"),
            IsaError::HaltInStrict => {
                f.write_str("plain termination instruction `!` is not allowed in pglbsbt")
            }
            IsaError::BadIdent(s) => write!(f, "invalid identifier `{s}`"),
            IsaError::MixedDialects => f.write_str("concatenation of mixed dialects"),
        }
    }
}

impl core::error::Error for IsaError {}

/// Syntax error with 1-based line and column.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl core::error::Error for ParseError {}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    column: usize,
}

#[derive(Debug)]
enum Token {
    Instr(Instruction),
    Semi,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.bump();
            } else if c == b'#' && !matches!(self.src.get(self.pos + 1), Some(d) if d.is_ascii_digit())
            {
                // `#` not followed by a digit: comment to end of line.
                while let Some(c) = self.peek() {
                    self.bump();
                    if c == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn lex_number(&mut self) -> Result<Natural, ParseError> {
        let mut digits = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c as char);
                self.bump();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(self.err("expected jump offset digits"));
        }
        Ok(digits.parse::<Natural>().expect("digits parse as natural"))
    }

    fn lex_ident(&mut self) -> Result<Ident, ParseError> {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphabetic() || c.is_ascii_digit() || c == b'_' {
                s.push(c as char);
                self.bump();
            } else {
                break;
            }
        }
        Ident::new(&s).map_err(|e| self.err(e.to_string()))
    }

    fn lex_basic(&mut self) -> Result<BasicInstruction, ParseError> {
        let focus = self.lex_ident()?;
        if self.peek() != Some(b'.') {
            return Err(self.err("expected `.` between focus and method"));
        }
        self.bump();
        let method = self.lex_ident()?;
        Ok(BasicInstruction::new(focus, method))
    }

    fn next_token(&mut self) -> Result<Option<Token>, ParseError> {
        self.skip_trivia();
        let c = match self.peek() {
            None => return Ok(None),
            Some(c) => c,
        };
        let tok = match c {
            b';' => {
                self.bump();
                Token::Semi
            }
            b'#' => {
                self.bump();
                Token::Instr(Instruction::FwdJump(self.lex_number()?))
            }
            b'\\' => {
                self.bump();
                if self.peek() != Some(b'#') {
                    return Err(self.err("expected `#` after `\\`"));
                }
                self.bump();
                Token::Instr(Instruction::BwdJump(self.lex_number()?))
            }
            b'+' => {
                self.bump();
                Token::Instr(Instruction::PosTest(self.lex_basic()?))
            }
            b'-' => {
                self.bump();
                Token::Instr(Instruction::NegTest(self.lex_basic()?))
            }
            b'!' => {
                self.bump();
                let instr = match self.peek() {
                    Some(b't') => {
                        self.bump();
                        Instruction::HaltPos
                    }
                    Some(b'f') => {
                        self.bump();
                        Instruction::HaltNeg
                    }
                    _ => Instruction::Halt,
                };
                if matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    return Err(self.err("unexpected identifier characters after terminator"));
                }
                Token::Instr(instr)
            }
            c if c.is_ascii_alphabetic() => Token::Instr(Instruction::Plain(self.lex_basic()?)),
            c => return Err(self.err(format!("unexpected character `{}`", c as char))),
        };
        Ok(Some(tok))
    }
}

fn parse_program(text: &str, dialect: Dialect) -> Result<InstrSeq, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut instructions = Vec::new();
    let mut expect_instr = true;
    loop {
        let (line, column) = (lexer.line, lexer.column);
        match lexer.next_token()? {
            None => break,
            Some(Token::Instr(u)) => {
                if !expect_instr {
                    return Err(ParseError {
                        line,
                        column,
                        message: "expected `;` between instructions".into(),
                    });
                }
                if dialect == Dialect::Pglbsbt && u == Instruction::Halt {
                    return Err(ParseError {
                        line,
                        column,
                        message: IsaError::HaltInStrict.to_string(),
                    });
                }
                instructions.push(u);
                expect_instr = false;
            }
            Some(Token::Semi) => {
                if expect_instr {
                    return Err(ParseError {
                        line,
                        column,
                        message: "unexpected `;`".into(),
                    });
                }
                expect_instr = true;
            }
        }
    }
    if instructions.is_empty() || expect_instr {
        return Err(ParseError {
            line: lexer.line,
            column: lexer.column,
            message: "expected an instruction".into(),
        });
    }
    Ok(InstrSeq {
        dialect,
        instructions,
    })
}

/// Parses a PGLBsbt program; panics on syntax errors. Test/construction aid.
pub fn sbt(text: &str) -> InstrSeq {
    InstrSeq::parse(text, Dialect::Pglbsbt).expect("invalid pglbsbt literal")
}

/// Parses a PGLBbt program; panics on syntax errors. Test/construction aid.
pub fn bt(text: &str) -> InstrSeq {
    InstrSeq::parse(text, Dialect::Pglbbt).expect("invalid pglbbt literal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{self, Rng};

    #[test]
    fn parses_grammar_instances() {
        let p = sbt("+f.m ; !t ; !f");
        assert_eq!(
            p.instructions(),
            &[
                Instruction::PosTest(basic("f", "m")),
                Instruction::HaltPos,
                Instruction::HaltNeg
            ]
        );
        assert_eq!(sbt("#0").instructions(), &[Instruction::fwd(0)]);
        assert_eq!(sbt("\\#3").instructions(), &[Instruction::bwd(3)]);
        assert_eq!(bt("!").instructions(), &[Instruction::Halt]);
    }

    #[test]
    fn halt_is_rejected_in_strict_dialect() {
        let err = InstrSeq::parse("!", Dialect::Pglbsbt).unwrap_err();
        assert!(err.message.contains("not allowed"));
        assert!(InstrSeq::new(Dialect::Pglbsbt, vec![Instruction::Halt]).is_err());
    }

    #[test]
    fn reports_line_and_column() {
        let err = InstrSeq::parse("+f.m ;\n !t ; ?", Dialect::Pglbsbt).unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.column, 7);
    }

    #[test]
    fn comments_and_whitespace_are_insensitive() {
        let p = sbt("+f.m ; # take the true branch\n  !t;!f");
        assert_eq!(p.print(), "+f.m ; !t ; !f");
    }

    #[test]
    fn canonical_printing() {
        assert_eq!(sbt("!t").print(), "!t");
        assert_eq!(sbt("#2;!f").print(), "#2 ; !f");
        assert_eq!(bt("F.M").print(), "f.m");
    }

    #[test]
    fn swap_examples() {
        assert_eq!(sbt("!t").swap().print(), "!f");
        assert_eq!(sbt("+f.m ; !t ; !f").swap().print(), "+f.m ; !f ; !t");
    }

    #[test]
    fn ftod_examples() {
        assert_eq!(sbt("!f").ftod().print(), "#0");
        assert_eq!(sbt("+f.m ; !t ; !f").ftod().print(), "+f.m ; !t ; #0");
    }

    #[test]
    fn power_examples() {
        let g2 = Instruction::Plain(basic("f", "g2"));
        assert_eq!(power(&g2, 0).print(), "#1");
        assert_eq!(power(&g2, 1).print(), "f.g2");
        assert_eq!(power(&g2, 3).print(), "f.g2 ; f.g2 ; f.g2");
        assert_eq!(power(&g2, 5).len(), 5);
    }

    #[test]
    fn concat_examples() {
        let joined = InstrSeq::concat(&[sbt("!t"), sbt("!f")]).unwrap();
        assert_eq!(joined.print(), "!t ; !f");
        let a = sbt("+f.m ; #2");
        let b = sbt("!t ; !f ; \\#1");
        assert_eq!(
            InstrSeq::concat(&[a.clone(), b.clone()]).unwrap().len(),
            a.len() + b.len()
        );
        assert!(InstrSeq::concat(&[]).is_err());
        assert!(InstrSeq::concat(&[sbt("!t"), bt("!")]).is_err());
    }

    #[test]
    fn setzero_for_two_registers() {
        let parts: Vec<InstrSeq> = (0..2)
            .map(|i| {
                InstrSeq::new(
                    Dialect::Pglbsbt,
                    vec![Instruction::Plain(basic(&format!("b{i}"), "set_t"))],
                )
                .unwrap()
            })
            .chain([sbt("!t")])
            .collect();
        let setzero = InstrSeq::concat(&parts).unwrap();
        assert_eq!(setzero.print(), "b0.set_t ; b1.set_t ; !t");
    }

    #[test]
    fn round_trip_and_transform_laws_on_random_programs() {
        let mut rng = Rng::new(0x15a_0001);
        for _ in 0..1000 {
            let p = gen::random_program(&mut rng, &gen::ProgramCfg::default());
            let reparsed = InstrSeq::parse(&p.print(), p.dialect()).unwrap();
            assert_eq!(reparsed, p, "round trip failed for `{}`", p.print());

            let strict = gen::random_program(
                &mut rng,
                &gen::ProgramCfg {
                    dialect: Dialect::Pglbsbt,
                    ..gen::ProgramCfg::default()
                },
            );
            assert_eq!(strict.swap().swap(), strict, "swap is an involution");
            assert_eq!(strict.ftod().ftod(), strict.ftod(), "ftod is idempotent");
            assert_eq!(strict.swap().len(), strict.len());
            assert_eq!(strict.ftod().len(), strict.len());
        }
    }
}
