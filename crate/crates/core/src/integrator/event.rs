//! Wall-event localization inside an accepted step.

/// A radius interval with a continuous state over it, typically one
/// accepted step's dense output.
pub trait Bracket {
    /// `(r_lo, r_hi)`, with every tracked component positive at `r_lo`.
    fn interval(&self) -> (f64, f64);
    fn num_components(&self) -> usize;
    fn component(&self, r: f64, m: usize) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallEvent {
    /// Positive-side end of the final bisection bracket.
    pub r0: f64,
    pub hit_index: usize,
}

/// Finds the first component to reach zero inside the bracket.
///
/// Every component that is `<= 0` at the right end is bisected until its
/// bracket is narrower than `eps_wall` (or cannot shrink further in floating
/// point). The smallest localized radius wins; exact ties go to the lower
/// index. Returns `None` when no component changes sign.
pub fn locate_wall_event<B: Bracket + ?Sized>(bracket: &B, eps_wall: f64) -> Option<WallEvent> {
    let (r_lo, r_hi) = bracket.interval();
    let mut best: Option<WallEvent> = None;
    for m in 0..bracket.num_components() {
        if bracket.component(r_hi, m) > 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (r_lo, r_hi);
        while hi - lo > eps_wall {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if bracket.component(mid, m) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if best.is_none_or(|b| lo < b.r0) {
            best = Some(WallEvent {
                r0: lo,
                hit_index: m,
            });
        }
    }
    best
}
