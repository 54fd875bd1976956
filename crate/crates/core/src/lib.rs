//! Instruction sequence processing over service families.
//!
//! The crate implements the PGLBbt/PGLBsbt program notations, thread
//! extraction into regular behaviour graphs, service families with the
//! composition and encapsulation operators, the `use`/`apply`/`reply`
//! processing operators, functional units over pluggable state spaces
//! (naturals, finite spaces, Turing-tape contents), and the halting-problem
//! experiments built on top of them.
//!
//! Everything in here is pure and deterministic; IO, file formats and the
//! command line live in the companion `pglb-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod exec;
pub mod funits;
pub mod gen;
pub mod isa;
pub mod laws;
pub mod natunits;
pub mod services;
pub mod tape;
pub mod threads;

pub use isa::{BasicInstruction, Dialect, Ident, InstrSeq, Instruction, Natural};
pub use services::{Service, ServiceFamily, ServiceReply};
pub use threads::RegularThread;
