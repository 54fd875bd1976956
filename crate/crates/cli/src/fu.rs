//! The `.fu` unit definition format (a built-in name or an explicit finite
//! table) and the `.map` witness format (`method = program` lines).

use std::collections::{BTreeMap, BTreeSet};

use pglb_core::funits::{FiniteOp, FiniteUnit, FunctionalUnit, UnitKind};
use pglb_core::isa::{Dialect, Ident, InstrSeq};

use crate::fam::builtin_unit;

fn meaningful_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = match raw.find('#') {
            Some(at) => &raw[..at],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

/// Parses a unit file: `builtin <name>` or an explicit table with one
/// `state, method -> reply, state` row per line. Tables must be total.
pub fn parse_unit(text: &str) -> Result<FunctionalUnit, String> {
    let mut lines = meaningful_lines(text).peekable();
    if let Some((_, first)) = lines.peek() {
        if let Some(name) = first.strip_prefix("builtin") {
            let name = name.trim();
            let rest: Vec<_> = lines.skip(1).collect();
            if !rest.is_empty() {
                return Err("builtin units take no table rows".to_string());
            }
            return builtin_unit(name);
        }
    }

    let mut rows: BTreeMap<(u8, Ident), (bool, u8)> = BTreeMap::new();
    let mut methods: BTreeSet<Ident> = BTreeSet::new();
    let mut max_state = 0u8;
    for (lineno, line) in lines {
        let arrow = line
            .find("->")
            .ok_or_else(|| format!("line {lineno}: expected `state, method -> reply, state`"))?;
        let (lhs, rhs) = (line[..arrow].trim(), line[arrow + 2..].trim());
        let split2 = |part: &str| -> Result<(String, String), String> {
            let comma = part
                .find(',')
                .ok_or_else(|| format!("line {lineno}: expected two comma-separated fields"))?;
            Ok((
                part[..comma].trim().to_string(),
                part[comma + 1..].trim().to_string(),
            ))
        };
        let (state_text, method_text) = split2(lhs)?;
        let (reply_text, next_text) = split2(rhs)?;
        let state: u8 = state_text
            .parse()
            .map_err(|_| format!("line {lineno}: bad state `{state_text}`"))?;
        let next: u8 = next_text
            .parse()
            .map_err(|_| format!("line {lineno}: bad state `{next_text}`"))?;
        let method =
            Ident::new(&method_text).map_err(|e| format!("line {lineno}: {e}"))?;
        let reply = match reply_text.as_str() {
            "T" | "t" => true,
            "F" | "f" => false,
            other => return Err(format!("line {lineno}: bad reply `{other}`")),
        };
        max_state = max_state.max(state).max(next);
        methods.insert(method.clone());
        if rows.insert((state, method.clone()), (reply, next)).is_some() {
            return Err(format!(
                "line {lineno}: duplicate row for state {state}, method `{method}`"
            ));
        }
    }
    if rows.is_empty() {
        return Err("empty unit file".to_string());
    }
    let size = max_state + 1;
    let mut unit = FiniteUnit::new(size);
    for method in &methods {
        let mut table = Vec::with_capacity(size as usize);
        for state in 0..size {
            let cell = rows.get(&(state, method.clone())).ok_or_else(|| {
                format!("method `{method}` has no row for state {state}; tables must be total")
            })?;
            table.push(*cell);
        }
        unit.insert(method.clone(), FiniteOp::new(table));
    }
    Ok(FunctionalUnit::new(UnitKind::Finite(unit)))
}

/// Parses a witness map: one `method = program` line per witness.
pub fn parse_witness_map(text: &str) -> Result<BTreeMap<Ident, InstrSeq>, String> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let eq = line
            .find('=')
            .ok_or_else(|| format!("line {}: expected `method = program`", lineno + 1))?;
        let method = Ident::new(line[..eq].trim())
            .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let program = InstrSeq::parse(&line[eq + 1..], Dialect::Pglbsbt)
            .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if map.insert(method.clone(), program).is_some() {
            return Err(format!("line {}: duplicate witness for `{method}`", lineno + 1));
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_builtin_units() {
        assert_eq!(parse_unit("builtin counter").unwrap().interface().len(), 4);
        assert_eq!(parse_unit("builtin decrn(3)").unwrap().interface().len(), 2);
        assert!(parse_unit("builtin nonsense").is_err());
    }

    #[test]
    fn parses_finite_tables() {
        let unit = parse_unit("0, m -> T, 1\n1, m -> F, 0\n").unwrap();
        assert_eq!(unit.interface().len(), 1);
        let err = parse_unit("0, m -> T, 1\n").unwrap_err();
        assert!(err.contains("total"), "{err}");
    }

    #[test]
    fn parses_witness_maps() {
        let map = parse_witness_map("decr1 = +f.decr ; !t ; !f\n# c\niszero = +f.iszero ; !t ; !f\n")
            .unwrap();
        assert_eq!(map.len(), 2);
    }
}
