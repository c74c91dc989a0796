//! Reference threads shared by tests, suites and the CLI.

use crate::exactnum::{q, OpenInterval, Rational};
use crate::thread::Thread;

/// `[0, 1]` with width 1: isometric to the unit segment.
pub fn t_line() -> Thread {
    Thread::segment(q(1, 1), q(1, 1)).expect("valid fixture")
}

/// Unit-length gapless thread of the given width.
pub fn t_line_width(width: Rational) -> Thread {
    Thread::segment(q(1, 1), width).expect("valid width")
}

/// Length 1, width 1/2, with the first three gaps of the half-bound construction.
pub fn t_a() -> Thread {
    let gaps = vec![
        OpenInterval::new(q(1, 3), q(19, 48)).expect("ordered"),
        OpenInterval::new(q(1, 2), q(5, 8)).expect("ordered"),
        OpenInterval::new(q(2, 3), q(67, 96)).expect("ordered"),
    ];
    Thread::new(q(1, 1), q(1, 2), gaps).expect("valid fixture")
}
