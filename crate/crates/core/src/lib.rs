// SPDX-License-Identifier: Apache-2.0

//! A calculus of stack-passing terms with sequencing on named jumps, its
//! reduction, abstract machine and evaluation semantics, a type system
//! over choice types, encodings of control structures and call-by-value
//! lambda terms, and a randomized property checker.

pub mod encode;
pub mod machine;
pub mod propkit;
pub mod reduce;
pub mod syntax;
pub mod types;
