//! Normal form, inlining and witness-composition behave as constructions:
//! every transformation is checked against the exhaustive derived-operation
//! oracle on small finite units.

use pglb_core::laws;

#[test]
fn normalize_preserves_derived_operations() {
    laws::check_normalize_preserves(60, 0x30f1).unwrap();
}

#[test]
fn inlining_preserves_derived_operations() {
    laws::check_inline_preserves(80, 0x30f2).unwrap();
}

#[test]
fn witness_composition_is_transitive() {
    laws::check_witness_transitivity(40, 0x30f3).unwrap();
}

#[test]
fn restrictions_sit_below_their_unit() {
    laws::check_restriction_below(60, 0x30f4).unwrap();
}

#[test]
fn derived_operation_sets_are_closures() {
    laws::check_enumeration_closure(60, 0x30f5).unwrap();
}
