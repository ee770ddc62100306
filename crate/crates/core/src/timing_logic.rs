//! Event-driven model of the switch, detector and gate chain.
//!
//! Switch K turns the source on at `t_on` and off at `t_off`. Light reaches
//! the splitter after `t0` and the slits after a further `t1 = n·p₁/c`
//! (short arm) or `t2 = n·p₂/c` (long arm). Detector D1 sits on a bright
//! fringe and D2 on a dark fringe, so while both beams overlap with
//! interference D1 = 1 and D2 = 0; with a single beam (or no interference)
//! the screen is uniformly lit and D1 = D2 = 1. The AND and XOR outputs are
//! the literal Boolean gates of D1 and D2.
//!
//! Time is continuous: events are computed exactly from the schedule, never
//! on a sampling grid.

use crate::error::{Error, Result};
use crate::interference_engine::PathConfig;

/// Switch timing of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSchedule {
    pub t_on: f64,
    pub t_off: f64,
    /// Source-to-splitter transit time.
    pub t0: f64,
    pub paths: PathConfig,
}

impl RunSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_on >= 0.0) || !self.t_on.is_finite() {
            return Err(Error::invalid("t_on must be >= 0"));
        }
        if !(self.t_off > self.t_on) || !self.t_off.is_finite() {
            return Err(Error::invalid(format!(
                "t_off {} must be later than t_on {}",
                self.t_off, self.t_on
            )));
        }
        if !(self.t0 >= 0.0) || !self.t0.is_finite() {
            return Err(Error::invalid("t0 must be >= 0"));
        }
        self.paths.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationDelays {
    pub t1: f64,
    pub t2: f64,
    pub delta_t: f64,
}

/// Arm transit times `n·p₁/c`, `n·p₂/c` and their difference `n·(p₂−p₁)/c`.
pub fn propagation_delays(paths: &PathConfig) -> Result<PropagationDelays> {
    paths.validate()?;
    Ok(PropagationDelays {
        t1: paths.short_delay(),
        t2: paths.long_delay(),
        delta_t: paths.delay_difference(),
    })
}

/// Detector and gate outputs from `time` until the next event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicEvent {
    pub time: f64,
    pub d1: bool,
    pub d2: bool,
    pub and_out: bool,
    pub xor_out: bool,
}

impl LogicEvent {
    fn new(time: f64, d1: bool, d2: bool) -> Self {
        Self {
            time,
            d1,
            d2,
            and_out: d1 & d2,
            xor_out: d1 ^ d2,
        }
    }

    fn same_outputs(&self, other: &Self) -> bool {
        (self.d1, self.d2) == (other.d1, other.d2)
    }

    pub fn is_dark(&self) -> bool {
        !(self.d1 || self.d2 || self.and_out || self.xor_out)
    }
}

/// Interval during which both beams reach the screen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamOverlap {
    pub start: f64,
    pub end: f64,
}

/// Time-ordered gate events of one run. The state before the first event is
/// dark, and the last event is dark.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicTrace {
    pub events: Vec<LogicEvent>,
    pub t1: f64,
    pub t2: f64,
    pub delta_t: f64,
    /// Set when the source is on for no longer than the arm delay, so the
    /// two beams never reach the screen together.
    pub degenerate: bool,
}

impl LogicTrace {
    /// Maximal intervals during which `pick` holds.
    fn intervals(&self, pick: impl Fn(&LogicEvent) -> bool) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut open: Option<f64> = None;
        for e in &self.events {
            match (open, pick(e)) {
                (None, true) => open = Some(e.time),
                (Some(start), false) => {
                    out.push((start, e.time));
                    open = None;
                }
                _ => {}
            }
        }
        out
    }

    pub fn and_intervals(&self) -> Vec<(f64, f64)> {
        self.intervals(|e| e.and_out)
    }

    pub fn xor_intervals(&self) -> Vec<(f64, f64)> {
        self.intervals(|e| e.xor_out)
    }

    /// Total time with light on the screen.
    pub fn lit_duration(&self) -> f64 {
        self.intervals(|e| e.d1 || e.d2)
            .iter()
            .map(|(a, b)| b - a)
            .sum()
    }
}

/// Simulates one switch cycle.
///
/// `interference_active` decides whether the overlapping beams form fringes
/// (it is consulted once, with the overlap interval).
pub fn simulate_run<F>(schedule: &RunSchedule, interference_active: F) -> Result<LogicTrace>
where
    F: Fn(&BeamOverlap) -> bool,
{
    schedule.validate()?;
    let delays = propagation_delays(&schedule.paths)?;
    let arm1 = (schedule.t_on + schedule.t0 + delays.t1, schedule.t_off + schedule.t0 + delays.t1);
    let arm2 = (schedule.t_on + schedule.t0 + delays.t2, schedule.t_off + schedule.t0 + delays.t2);

    let degenerate = arm2.0 >= arm1.1;
    let fringes = !degenerate
        && interference_active(&BeamOverlap {
            start: arm2.0,
            end: arm1.1,
        });

    let mut breaks = vec![arm1.0, arm1.1, arm2.0, arm2.1];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut events: Vec<LogicEvent> = Vec::with_capacity(breaks.len() + 1);
    if schedule.t_on < breaks[0] {
        events.push(LogicEvent::new(schedule.t_on, false, false));
    }
    for &t in &breaks {
        let beam1 = arm1.0 <= t && t < arm1.1;
        let beam2 = arm2.0 <= t && t < arm2.1;
        let event = match (beam1, beam2) {
            (false, false) => LogicEvent::new(t, false, false),
            (true, true) if fringes => LogicEvent::new(t, true, false),
            _ => LogicEvent::new(t, true, true),
        };
        match events.last() {
            Some(prev) if prev.same_outputs(&event) => {}
            _ if events.is_empty() && event.is_dark() => {}
            _ => events.push(event),
        }
    }

    Ok(LogicTrace {
        events,
        t1: delays.t1,
        t2: delays.t2,
        delta_t: delays.delta_t,
        degenerate,
    })
}

/// Durations of every maximal AND = 1 interval.
pub fn measure_delta_t(trace: &LogicTrace) -> Vec<f64> {
    trace.and_intervals().iter().map(|(a, b)| b - a).collect()
}

/// Total time with XOR = 1.
pub fn measure_interference_duration(trace: &LogicTrace) -> f64 {
    trace.xor_intervals().iter().map(|(a, b)| b - a).sum()
}
