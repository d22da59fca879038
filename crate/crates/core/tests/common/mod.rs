// SPDX-License-Identifier: Apache-2.0

//! Oracles and corpora shared by the integration tests.

#![allow(dead_code)]

pub mod db;
pub mod lambda;
pub mod oracle;
