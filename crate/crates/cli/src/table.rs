//! The bounded-counter reply table: a counter over `[0, 2^n - 1]` stored
//! in `n` Boolean registers `b0..b(n-1)` (true for bit 0, register order
//! from least significant), exercised by the four classic instruction
//! sequences and checked against their closed reply forms.

use std::fmt::Write as _;

use pglb_core::exec::{run, Budget, Reply, Verdict};
use pglb_core::isa::{basic, ident, Dialect, InstrSeq, Instruction};
use pglb_core::services::{Service, ServiceFamily};
use pglb_core::threads::extract;

fn seq(instructions: Vec<Instruction>) -> InstrSeq {
    InstrSeq::new(Dialect::Pglbbt, instructions).expect("non-empty")
}

fn reg(i: usize) -> String {
    format!("b{i}")
}

/// `SETZERO`: set every register to true, reply T.
pub fn setzero_program(n: usize) -> InstrSeq {
    let mut instrs: Vec<Instruction> = (0..n)
        .map(|i| Instruction::Plain(basic(&reg(i), "set_t")))
        .collect();
    instrs.push(Instruction::HaltPos);
    seq(instrs)
}

/// `SUCC`: increment modulo 2^n; replies F exactly on wrap-around.
pub fn succ_program(n: usize) -> InstrSeq {
    let mut instrs = Vec::with_capacity(5 * n + 1);
    for i in 0..n {
        instrs.extend([
            Instruction::NegTest(basic(&reg(i), "get")),
            Instruction::fwd(3),
            Instruction::Plain(basic(&reg(i), "set_f")),
            Instruction::HaltPos,
            Instruction::Plain(basic(&reg(i), "set_t")),
        ]);
    }
    instrs.push(Instruction::HaltNeg);
    seq(instrs)
}

/// `PRED`: decrement modulo 2^n; replies F exactly on wrap-around.
pub fn pred_program(n: usize) -> InstrSeq {
    let mut instrs = Vec::with_capacity(5 * n + 1);
    for i in 0..n {
        instrs.extend([
            Instruction::PosTest(basic(&reg(i), "get")),
            Instruction::fwd(3),
            Instruction::Plain(basic(&reg(i), "set_t")),
            Instruction::HaltPos,
            Instruction::Plain(basic(&reg(i), "set_f")),
        ]);
    }
    instrs.push(Instruction::HaltNeg);
    seq(instrs)
}

/// `ISZERO`: reply T iff every register holds true.
pub fn iszero_program(n: usize) -> InstrSeq {
    let mut instrs = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        instrs.extend([
            Instruction::NegTest(basic(&reg(i), "get")),
            Instruction::HaltNeg,
        ]);
    }
    instrs.push(Instruction::HaltPos);
    seq(instrs)
}

pub const PROGRAM_NAMES: [&str; 4] = ["setzero", "succ", "pred", "iszero"];

/// One register configuration with the four observed replies.
#[derive(Clone, Debug)]
pub struct CounterRow {
    /// Register contents, index 0 least significant; true prints as `T`.
    pub bits: Vec<bool>,
    pub replies: [Reply; 4],
}

#[derive(Clone, Debug)]
pub struct CounterTable {
    pub n: usize,
    pub rows: Vec<CounterRow>,
}

fn family_for(bits: &[bool]) -> ServiceFamily {
    let mut family = ServiceFamily::empty();
    for (i, &b) in bits.iter().enumerate() {
        family = family.compose(&ServiceFamily::singleton(
            ident(&reg(i)),
            Service::boolean_register(b),
        ));
    }
    family
}

/// Runs all four programs on every register configuration and checks the
/// replies against the closed forms: `SETZERO` always T; `SUCC` F iff all
/// registers false; `PRED` F iff all true; `ISZERO` T iff all true.
pub fn counter_table(n: usize) -> Result<CounterTable, String> {
    if !(1..=12).contains(&n) {
        return Err(format!("register count {n} outside 1..=12"));
    }
    let programs = [
        extract(&setzero_program(n)),
        extract(&succ_program(n)),
        extract(&pred_program(n)),
        extract(&iszero_program(n)),
    ];
    let budget = Budget::exact();
    let mut rows = Vec::with_capacity(1 << n);
    for config in 0..(1u32 << n) {
        let bits: Vec<bool> = (0..n).map(|i| config & (1 << i) == 0).collect();
        let family = family_for(&bits);
        let mut replies = [Reply::D; 4];
        for (slot, program) in programs.iter().enumerate() {
            let out = run(program, &family, &budget);
            match out.verdict {
                Verdict::Converged(reply) => replies[slot] = reply,
                other => {
                    return Err(format!(
                        "{} did not converge on {bits:?}: {other:?}",
                        PROGRAM_NAMES[slot]
                    ))
                }
            }
        }
        let all_true = bits.iter().all(|b| *b);
        let all_false = bits.iter().all(|b| !*b);
        let expected = [
            Reply::T,
            if all_false { Reply::F } else { Reply::T },
            if all_true { Reply::F } else { Reply::T },
            if all_true { Reply::T } else { Reply::F },
        ];
        if replies != expected {
            return Err(format!(
                "closed forms violated on {bits:?}: got {replies:?}, expected {expected:?}"
            ));
        }
        rows.push(CounterRow { bits, replies });
    }
    Ok(CounterTable { n, rows })
}

/// Plain-text rendering with one row per configuration.
pub fn render(table: &CounterTable) -> String {
    let mut out = String::new();
    let registers: Vec<String> = (0..table.n).map(reg).collect();
    let _ = writeln!(out, "n={} registers={}", table.n, registers.join(","));
    let _ = writeln!(out, "config setzero succ pred iszero");
    for row in &table.rows {
        let config: String = row
            .bits
            .iter()
            .map(|b| if *b { 'T' } else { 'F' })
            .collect();
        let _ = writeln!(
            out,
            "{config} {} {} {} {}",
            row.replies[0], row.replies[1], row.replies[2], row.replies[3]
        );
    }
    out.push_str("verdict=pass\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn succ_agrees_with_closed_form_for_two_registers() {
        let table = counter_table(2).unwrap();
        // All-true means zero; incrementing from zero succeeds.
        assert_eq!(table.rows[0].bits, vec![true, true]);
        assert_eq!(table.rows[0].replies[1], Reply::T);
        // All-false means 2^n - 1; incrementing wraps.
        assert_eq!(table.rows[3].bits, vec![false, false]);
        assert_eq!(table.rows[3].replies[1], Reply::F);
    }

    #[test]
    fn three_register_table_passes_all_rows() {
        let table = counter_table(3).unwrap();
        assert_eq!(table.rows.len(), 8);
    }

    #[test]
    fn counter_semantics_increments_and_decrements() {
        // Walk the counter up and down through the register encoding and
        // read the value back by repeated PRED.
        let n = 3;
        let budget = Budget::exact();
        let mut family = family_for(&vec![true; n]);
        // Increment five times.
        for _ in 0..5 {
            let out = run(&extract(&succ_program(n)), &family, &budget);
            family = out.final_family.unwrap();
        }
        // Count down to zero.
        let mut count = 0;
        loop {
            let probe = run(&extract(&iszero_program(n)), &family, &budget);
            if probe.reply() == Some(Reply::T) {
                break;
            }
            let out = run(&extract(&pred_program(n)), &family, &budget);
            assert_eq!(out.reply(), Some(Reply::T));
            family = out.final_family.unwrap();
            count += 1;
        }
        assert_eq!(count, 5);
    }
}
