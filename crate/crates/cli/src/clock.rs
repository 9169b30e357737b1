use std::time::Instant;

use lastmile_core::tsp::Stopwatch;

/// Wall clock measured from construction.
#[derive(Debug, Clone, Copy)]
pub struct SystemStopwatch {
    start: Instant,
}

impl SystemStopwatch {
    pub fn start() -> Self {
        SystemStopwatch { start: Instant::now() }
    }
}

impl Stopwatch for SystemStopwatch {
    fn now_secs(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}
