//! Acceptance suite: every criterion at the default grid, the negative
//! controls that must trip it, and end-to-end use of the library.

mod criteria;
mod negative_controls;
mod pipeline;
