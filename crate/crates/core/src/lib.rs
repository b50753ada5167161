#![allow(clippy::needless_range_loop)]

pub mod classify;
pub mod error;
pub mod metric;
pub mod oracle;
pub mod picard;
pub mod polygon;
pub mod rational;
pub mod dynamics;
pub mod instance;
pub mod registry;
