//! Locate faulty methods in implementations of algebraic specifications by
//! comparing them against a finite model of the specification.

pub mod fixtures;
pub mod harness;
pub mod localizer;
pub mod mapping;
pub mod mock;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod spec;
