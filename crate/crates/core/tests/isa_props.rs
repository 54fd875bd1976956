//! Grammar-level properties of the instruction sequence syntax.

use proptest::prelude::*;

use pglb_core::isa::{basic, Dialect, InstrSeq, Instruction, Natural};

fn arb_instruction(strict: bool) -> BoxedStrategy<Instruction> {
    let action = (
        prop_oneof![Just("f"), Just("g"), Just("b0"), Just("r2")],
        prop_oneof![Just("m"), Just("get"), Just("set_t"), Just("iszero1")],
    )
        .prop_map(|(f, m)| basic(f, m));
    let mut options = vec![
        action.clone().prop_map(Instruction::Plain).boxed(),
        action.clone().prop_map(Instruction::PosTest).boxed(),
        action.prop_map(Instruction::NegTest).boxed(),
        (0u64..20).prop_map(Instruction::fwd).boxed(),
        (0u64..20).prop_map(Instruction::bwd).boxed(),
        Just(Instruction::HaltPos).boxed(),
        Just(Instruction::HaltNeg).boxed(),
    ];
    if !strict {
        options.push(Just(Instruction::Halt).boxed());
    }
    proptest::strategy::Union::new(options).boxed()
}

fn arb_program(strict: bool) -> impl Strategy<Value = InstrSeq> {
    let dialect = if strict {
        Dialect::Pglbsbt
    } else {
        Dialect::Pglbbt
    };
    prop::collection::vec(arb_instruction(strict), 1..12)
        .prop_map(move |instrs| InstrSeq::new(dialect, instrs).expect("generated program"))
}

proptest! {
    #[test]
    fn print_parse_round_trip(p in arb_program(false)) {
        let reparsed = InstrSeq::parse(&p.print(), p.dialect()).unwrap();
        prop_assert_eq!(reparsed, p);
    }

    #[test]
    fn print_is_injective(a in arb_program(true), b in arb_program(true)) {
        if a.print() == b.print() {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn swap_is_an_involution(p in arb_program(true)) {
        prop_assert_eq!(p.swap().swap(), p);
    }

    #[test]
    fn ftod_is_idempotent(p in arb_program(true)) {
        prop_assert_eq!(p.ftod().ftod(), p.ftod());
    }

    #[test]
    fn transforms_touch_only_terminators(p in arb_program(true)) {
        let swapped = p.swap();
        let dived = p.ftod();
        prop_assert_eq!(swapped.len(), p.len());
        prop_assert_eq!(dived.len(), p.len());
        for (i, u) in p.instructions().iter().enumerate() {
            match u {
                Instruction::HaltPos | Instruction::HaltNeg => {}
                other => {
                    prop_assert_eq!(&swapped.instructions()[i], other);
                    prop_assert_eq!(&dived.instructions()[i], other);
                }
            }
        }
    }

    #[test]
    fn arbitrary_precision_offsets_survive(digits in "[1-9][0-9]{0,40}") {
        let text = format!("#{digits} ; !t");
        let p = InstrSeq::parse(&text, Dialect::Pglbsbt).unwrap();
        prop_assert_eq!(p.print(), text);
        let offset: Natural = digits.parse().unwrap();
        prop_assert_eq!(p.at(1), Some(&Instruction::FwdJump(offset)));
    }
}
