//! The `.fam` service family configuration format: one `focus = spec` line
//! per named service.
//!
//! Specs: `boolreg(T|F)`, `counter(n)`, `univ(n)`, `univ3(n)`,
//! `tape("v|w")` (the duplication unit at that tape state), `empty`, and
//! the general `funit(name, state)` with name one of `counter`,
//! `decrn(n)`, `univ`, `univ3`, `tape-dup`, `halting-oracle`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use pglb_core::funits::{FunctionalUnit, UnitKind, UnitState};
use pglb_core::isa::Ident;
use pglb_core::natunits::{counter_unit, decrn_unit, univ3_unit, univ_unit};
use pglb_core::services::{Service, ServiceFamily};
use pglb_core::tape::{dup_unit, halting_oracle_unit, TapeState};

/// Resolves a built-in unit name as used in `.fu` files and `funit(..)`.
pub fn builtin_unit(name: &str) -> Result<FunctionalUnit, String> {
    if let Some(args) = name.strip_prefix("decrn(").and_then(|s| s.strip_suffix(')')) {
        let n: u64 = args
            .trim()
            .parse()
            .map_err(|_| format!("bad decrn argument `{args}`"))?;
        return decrn_unit(n);
    }
    match name {
        "counter" => Ok(counter_unit()),
        "univ" => Ok(univ_unit()),
        "univ3" => Ok(univ3_unit()),
        "tape-dup" | "dup" => Ok(dup_unit()),
        "halting-oracle" => Ok(halting_oracle_unit()),
        other => Err(format!("unknown built-in unit `{other}`")),
    }
}

fn parse_nat(text: &str) -> Result<BigUint, String> {
    text.trim()
        .parse::<BigUint>()
        .map_err(|_| format!("bad natural `{text}`"))
}

fn parse_state(unit: &FunctionalUnit, text: &str) -> Result<UnitState, String> {
    let text = text.trim();
    let state = if let Some(quoted) = text.strip_prefix('"').and_then(|s| s.strip_suffix('"')) {
        UnitState::Tape(TapeState::parse(quoted).map_err(|e| e.to_string())?)
    } else {
        UnitState::Nat(parse_nat(text)?)
    };
    if unit.contains_state(&state) {
        Ok(state)
    } else {
        Err(format!("state `{text}` not in the unit's state space"))
    }
}

fn parse_service(spec: &str) -> Result<Service, String> {
    let spec = spec.trim();
    if spec == "empty" {
        return Ok(Service::Empty);
    }
    let (head, args) = match spec.find('(') {
        Some(open) if spec.ends_with(')') => {
            (&spec[..open], &spec[open + 1..spec.len() - 1])
        }
        _ => return Err(format!("bad service spec `{spec}`")),
    };
    match head {
        "boolreg" => match args.trim() {
            "T" | "t" => Ok(Service::boolean_register(true)),
            "F" | "f" => Ok(Service::boolean_register(false)),
            other => Err(format!("bad boolreg content `{other}`")),
        },
        "counter" | "univ" | "univ3" => {
            let unit = builtin_unit(head)?;
            let state = UnitState::Nat(parse_nat(args)?);
            pglb_core::funits::unit_service(&unit, &state).map_err(|e| e.to_string())
        }
        "tape" => {
            let unit = dup_unit();
            let state = parse_state(&unit, args)?;
            pglb_core::funits::unit_service(&unit, &state).map_err(|e| e.to_string())
        }
        "funit" => {
            // Split on the last comma so `decrn(3), 7` parses.
            let comma = args
                .rfind(',')
                .ok_or_else(|| format!("funit needs a name and a state: `{args}`"))?;
            let unit = builtin_unit(args[..comma].trim())?;
            let state = parse_state(&unit, &args[comma + 1..])?;
            pglb_core::funits::unit_service(&unit, &state).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown service `{other}`")),
    }
}

/// Parses a family file; every focus may occur at most once.
pub fn parse_family(text: &str) -> Result<ServiceFamily, String> {
    let mut family = ServiceFamily::empty();
    let mut seen: BTreeSet<Ident> = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let eq = line
            .find('=')
            .ok_or_else(|| format!("line {}: expected `focus = spec`", lineno + 1))?;
        let focus = Ident::new(line[..eq].trim())
            .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if !seen.insert(focus.clone()) {
            return Err(format!(
                "line {}: focus `{focus}` occurs twice; a family names each service once",
                lineno + 1
            ));
        }
        let service =
            parse_service(&line[eq + 1..]).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        family = family.compose(&ServiceFamily::singleton(focus, service));
    }
    Ok(family)
}

/// Renders a service in `.fam` spec syntax.
pub fn render_service(service: &Service) -> Result<String, String> {
    if service.is_empty_service() {
        return Ok("empty".to_string());
    }
    match service {
        Service::Empty => Ok("empty".to_string()),
        Service::BoolReg(b) => Ok(format!("boolreg({})", if *b { "T" } else { "F" })),
        Service::Unit(unit, state) => {
            let state_text = match state {
                UnitState::Nat(n) => n.to_string(),
                UnitState::Tape(t) => format!("\"{t}\""),
                UnitState::Fin(s) => s.to_string(),
            };
            match unit.kind() {
                UnitKind::Counter => Ok(format!("counter({state_text})")),
                UnitKind::Univ => Ok(format!("univ({state_text})")),
                UnitKind::Univ3 => Ok(format!("univ3({state_text})")),
                UnitKind::Dup => Ok(format!("tape({state_text})")),
                UnitKind::DecrN(n) => Ok(format!("funit(decrn({n}), {state_text})")),
                UnitKind::HaltingOracle => Ok(format!("funit(halting-oracle, {state_text})")),
                UnitKind::Finite(_) => {
                    Err("explicit finite units have no family spec syntax".to_string())
                }
            }
        }
    }
}

/// Renders a whole family, one line per entry, foci in order.
pub fn render_family(family: &ServiceFamily) -> Result<String, String> {
    let mut out = String::new();
    for (focus, service) in family.iter() {
        out.push_str(&format!("{focus} = {}\n", render_service(service)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pglb_core::isa::ident;

    #[test]
    fn parses_and_renders_round_trip() {
        let text = "b0 = boolreg(T)\nb1 = boolreg(F)\nf = counter(12)\ng = tape(\"10|1:\")\nh = funit(decrn(3), 7)\nz = empty\n";
        let family = parse_family(text).unwrap();
        assert_eq!(render_family(&family).unwrap(), text.replace("b0 = ", "b0 = "));
        let again = parse_family(&render_family(&family).unwrap()).unwrap();
        assert_eq!(family, again);
    }

    #[test]
    fn rejects_duplicate_focus() {
        let err = parse_family("f = boolreg(T)\nf = boolreg(F)\n").unwrap_err();
        assert!(err.contains("twice"));
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let family = parse_family("# registers\n\nb0 = boolreg(T) # set\n").unwrap();
        assert_eq!(family.foci(), BTreeSet::from([ident("b0")]));
    }
}
