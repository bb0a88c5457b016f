//! Continuous flow-field views.
//!
//! A [`FlowField`] yields a velocity state at an arbitrary point, or `None`
//! outside its domain. Residual evaluators in [`crate::charkern`] and the
//! diagnostics consume fields; computed nets provide one via
//! [`crate::diag::NetField`].

use crate::gas::FlowState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

pub trait FlowField {
    fn state_at(&self, p: Point) -> Option<FlowState>;
}

/// A field defined by a closure; handy for manufactured solutions in tests.
pub struct FnField<F: Fn(Point) -> Option<FlowState>>(pub F);

impl<F: Fn(Point) -> Option<FlowState>> FlowField for FnField<F> {
    fn state_at(&self, p: Point) -> Option<FlowState> {
        (self.0)(p)
    }
}
