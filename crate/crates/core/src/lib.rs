//! Lock-free, ordered, linked-list sets with retry avoidance.
//!
//! The crate provides six implementation variants of the same concurrent
//! ordered-set interface (`add` / `remove` / `contains` over signed integer
//! keys), from the textbook lock-free list to versions that avoid full
//! retraversal after failed CAS operations by rereading pointers, keeping
//! approximate backward pointers, and starting searches from a per-thread
//! cursor. See [`Variant`] for the catalogue.
//!
//! Every operation runs through a [`ThreadContext`], which carries the
//! thread's cursor and event counters. Contexts borrow the list, so the
//! borrow checker enforces the lifetime contract: nodes are freed only when
//! the list is dropped, after all contexts are gone.
//!
//! ```
//! use lfol::{List, Variant};
//!
//! let list = List::new(Variant::DoublyCursor);
//! let mut ctx = list.context();
//! assert!(ctx.add(3).unwrap());
//! assert!(ctx.contains(3).unwrap());
//! assert!(ctx.remove(3).unwrap());
//! assert!(!ctx.contains(3).unwrap());
//! ```
//!
//! The [`bench`](mod@bench) module reproduces the deterministic worst-case and random
//! operation-mix experiments with their event counters; [`verify`] holds the
//! sequential oracle, structural checker, linearizability checker and stress
//! driver used by the test suite.

mod counters;
mod link;
mod list;
mod variant;

pub mod bench;
pub mod rng;
pub mod verify;

pub use counters::Counters;
pub use link::{KEY_MAX, KEY_MIN};
pub use list::{KeyOutOfRange, List, ThreadContext};
pub use variant::{fetch_or_is_native, UnknownVariant, Variant};
