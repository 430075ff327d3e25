//! Exhaustive search over alternating bang schedules.
//!
//! For `n` switchings there are `n + 1` durations and three terminal
//! equations. The first `n - 2` durations (the prefix) are scanned on a grid;
//! for each prefix the last three arcs `(α, β, δ)` are solved from the
//! terminal conditions. In the complex coordinate `w = (x1 - x3) + i(x2 - u)`
//! an arc rotates `w` by `e^{-iτ}` and a switch away from `u` adds `2iu`.
//! Eliminating `β` with the `x3` condition leaves one real equation in `α`,
//! which is scanned at the coarse step and polished by bisection. Every
//! candidate is re-checked by closed-form propagation before it counts.
//!
//! Since `T = γ + 2·(time spent at u = -1)` for every feasible schedule, the
//! search is run under a growing budget on the negative-control time, which
//! prunes the prefix grid without discarding anything faster than the
//! incumbent.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{require_finite, require_positive, Error, Result};
use crate::model::{advance, propagate_schedule, Schedule, Sign, State};
use crate::root::bisect;

/// Euclidean endpoint tolerance for a schedule to count as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Coordinate-refinement rounds applied to the best grid candidates.
pub const REFINE_ROUNDS: usize = 40;

/// Prefixes longer than this use a grid ten times coarser.
const FINE_PREFIX_DIMS: usize = 2;

/// Slack on the negative-time budget so near-ties are never pruned.
const BUDGET_SLACK: f64 = 1e-3;

/// A later candidate replaces the incumbent only if faster by this much.
const TIE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceOptions {
    pub max_switchings: usize,
    pub coarse_step: f64,
    /// Also search schedules whose first arc is `u = -1`.
    pub allow_negative_start: bool,
}

impl BruteForceOptions {
    pub fn new(max_switchings: usize, coarse_step: f64) -> Self {
        Self {
            max_switchings,
            coarse_step,
            allow_negative_start: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceReport {
    pub gamma: f64,
    pub best_time: f64,
    pub best_schedule: Schedule,
    pub best_switchings: usize,
    /// Largest switching count searched.
    pub n_switchings_searched: usize,
    /// Duration step of the coarse scan.
    pub grid_resolution: f64,
    /// Prefix step used when more than two prefix durations are free.
    pub high_dim_resolution: f64,
    /// Euclidean endpoint error of the best schedule.
    pub best_residual: f64,
    /// Fastest feasible time found for each switching count, if any.
    pub best_time_by_switchings: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
struct Candidate {
    sign: Sign,
    durations: Vec<f64>,
    time: f64,
    residual: f64,
}

/// Searches `0..=max_switchings` switchings on a grid of `coarse_step`.
pub fn brute_force_min_time(
    gamma: f64,
    max_switchings: usize,
    coarse_step: f64,
) -> Result<BruteForceReport> {
    brute_force_search(gamma, &BruteForceOptions::new(max_switchings, coarse_step))
}

pub fn brute_force_search(gamma: f64, opts: &BruteForceOptions) -> Result<BruteForceReport> {
    require_finite("gamma", gamma)?;
    if gamma <= 0.0 {
        return Err(Error::Domain(format!("gamma must be > 0, got {gamma}")));
    }
    require_positive("coarse_step", opts.coarse_step)?;
    if opts.coarse_step >= 1.0 {
        return Err(Error::InvalidParameter {
            name: "coarse_step",
            reason: format!("must be < 1, got {}", opts.coarse_step),
        });
    }

    let search = Search::new(gamma, opts);
    let signs: &[Sign] = if opts.allow_negative_start {
        &[Sign::Plus, Sign::Minus]
    } else {
        &[Sign::Plus]
    };
    // At most ceil((n+1)/2) arcs at u = -1, each shorter than 2π.
    let budget_cap = ((opts.max_switchings + 2) / 2) as f64 * TAU + 1.0;

    let mut budget = 0.5;
    loop {
        let mut best_by_n: Vec<Option<Candidate>> = vec![None; opts.max_switchings + 1];
        let mut incumbent: Option<f64> = None;
        for n in 0..=opts.max_switchings {
            for &sign in signs {
                let bound = incumbent.map_or(budget, |t| ((t - gamma) / 2.0).min(budget));
                if let Some(c) = search.best_for(n, sign, bound) {
                    let slot = &mut best_by_n[n];
                    if slot.as_ref().is_none_or(|b| c.time < b.time) {
                        *slot = Some(c);
                    }
                }
            }
            if let Some(c) = &best_by_n[n] {
                incumbent = Some(incumbent.map_or(c.time, |t: f64| t.min(c.time)));
            }
        }
        if incumbent.is_some() {
            return Ok(search.finish(best_by_n));
        }
        if budget >= budget_cap {
            return Err(Error::Infeasible {
                max_switchings: opts.max_switchings,
                resolution: opts.coarse_step,
            });
        }
        budget *= 2.0;
    }
}

struct Search {
    gamma: f64,
    opts: BruteForceOptions,
    /// `(α, e^{-iα})` on the coarse grid.
    alpha_grid: Vec<(f64, Complex64)>,
}

impl Search {
    fn new(gamma: f64, opts: &BruteForceOptions) -> Self {
        let h = opts.coarse_step;
        let count = (TAU / h).ceil() as usize;
        let alpha_grid = (1..count)
            .map(|k| {
                let a = k as f64 * h;
                (a, Complex64::from_polar(1.0, -a))
            })
            .filter(|(a, _)| *a < TAU)
            .collect();
        Self {
            gamma,
            opts: *opts,
            alpha_grid,
        }
    }

    fn prefix_step(&self, dims: usize) -> f64 {
        if dims <= FINE_PREFIX_DIMS {
            self.opts.coarse_step
        } else {
            10.0 * self.opts.coarse_step
        }
    }

    fn target(&self) -> State {
        State::target(self.gamma)
    }

    fn check(&self, sign: Sign, durations: Vec<f64>) -> Option<Candidate> {
        if durations.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return None;
        }
        if durations.len() > 1 && durations.iter().any(|&d| d >= TAU) {
            return None;
        }
        let schedule = Schedule::new_unchecked(sign, durations);
        let residual = (propagate_schedule(&schedule) - self.target()).norm();
        if residual > FEASIBILITY_TOL {
            return None;
        }
        Some(Candidate {
            sign,
            time: schedule.total_time(),
            durations: schedule.durations().to_vec(),
            residual,
        })
    }

    /// Fastest feasible schedule with `n` switchings whose time at
    /// `u = -1` does not exceed `neg_budget` (plus slack).
    fn best_for(&self, n: usize, sign: Sign, neg_budget: f64) -> Option<Candidate> {
        let limit = neg_budget + BUDGET_SLACK;
        match n {
            0 => self.zero_switch(sign),
            1 => self.one_switch(sign, limit),
            _ => {
                let dims = n - 2;
                let step = self.prefix_step(dims);
                let mut best: Option<Candidate> = None;
                let mut prefix = Vec::with_capacity(n + 1);
                self.scan_prefix(
                    dims,
                    sign,
                    step,
                    State::ORIGIN,
                    0.0,
                    limit,
                    &mut prefix,
                    &mut best,
                );
                best.map(|c| self.refine(c, dims))
            }
        }
    }

    fn zero_switch(&self, sign: Sign) -> Option<Candidate> {
        if sign == Sign::Minus {
            return None;
        }
        self.check(sign, vec![self.gamma])
    }

    fn one_switch(&self, sign: Sign, neg_limit: f64) -> Option<Candidate> {
        // sign·(τ1 - τ2) = γ fixes τ2; scan τ1 for residual minima.
        let s = sign.value();
        let residual = |t1: f64| -> f64 {
            let t2 = t1 - s * self.gamma;
            if t2 <= 0.0 {
                return f64::INFINITY;
            }
            let x = advance(advance(State::ORIGIN, s, t1), -s, t2);
            (x - self.target()).norm()
        };
        let h = self.opts.coarse_step;
        let pts: Vec<(f64, f64)> = self
            .alpha_grid
            .iter()
            .map(|&(t, _)| (t, residual(t)))
            .collect();
        let mut best: Option<Candidate> = None;
        for w in pts.windows(3) {
            let (t, r) = w[1];
            if !(r.is_finite() && r <= w[0].1 && r <= w[2].1) {
                continue;
            }
            let t1 = golden_min(&residual, t - h, t + h);
            let t2 = t1 - s * self.gamma;
            let neg = if sign == Sign::Plus { t2 } else { t1 };
            if neg > neg_limit {
                continue;
            }
            if let Some(c) = self.check(sign, vec![t1, t2]) {
                if best.as_ref().is_none_or(|b| c.time < b.time) {
                    best = Some(c);
                }
            }
        }
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn scan_prefix(
        &self,
        remaining: usize,
        sign: Sign,
        step: f64,
        state: State,
        neg: f64,
        neg_limit: f64,
        prefix: &mut Vec<f64>,
        best: &mut Option<Candidate>,
    ) {
        let seg_sign = if prefix.len().is_multiple_of(2) { sign } else { sign.flip() };
        if remaining == 0 {
            for tail in self.solve_tail(state, seg_sign, neg, neg_limit) {
                let mut d = prefix.clone();
                d.extend_from_slice(&tail);
                if let Some(c) = self.check(sign, d) {
                    if best.as_ref().is_none_or(|b| c.time < b.time) {
                        *best = Some(c);
                    }
                }
            }
            return;
        }
        let negative = seg_sign == Sign::Minus;
        let mut k = 1;
        loop {
            let d = k as f64 * step;
            if d >= TAU || (negative && neg + d > neg_limit) {
                break;
            }
            prefix.push(d);
            let next = advance(state, seg_sign.value(), d);
            let next_neg = if negative { neg + d } else { neg };
            self.scan_prefix(remaining - 1, sign, step, next, next_neg, neg_limit, prefix, best);
            prefix.pop();
            k += 1;
        }
    }

    /// All `(α, β, δ)` completing a prefix that ends in `state`, with the
    /// first tail arc at control `sigma`.
    fn solve_tail(&self, state: State, sigma: Sign, neg: f64, neg_limit: f64) -> Vec<[f64; 3]> {
        let s = sigma.value();
        let w0 = Complex64::new(state.x1 - state.x3, state.x2 - s);
        // α - β + δ = g from the x3 condition.
        let g = s * (self.gamma - state.x3);
        let eg = Complex64::from_polar(1.0, g);
        let is = Complex64::new(0.0, s);
        let q_of = |a: Complex64| -> Complex64 {
            let l = eg * (a * a * w0 + 2.0 * is * a);
            Complex64::new(1.0, 0.0) + is * l
        };
        // |1 - sqrt(Q)| = 1 with the principal root.
        let h_of = |q: Complex64| -> f64 {
            let m = q.norm();
            m - (2.0 * (m + q.re)).max(0.0).sqrt()
        };
        let alpha_negative = sigma == Sign::Minus;
        let alpha_max = if alpha_negative { neg_limit - neg } else { TAU };

        let mut out = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for &(alpha, a) in &self.alpha_grid {
            if alpha > alpha_max {
                break;
            }
            let hv = h_of(q_of(a));
            if let Some((pa, ph)) = prev {
                if ph * hv <= 0.0 && ph != hv {
                    let f = |x: f64| h_of(q_of(Complex64::from_polar(1.0, -x)));
                    if let Ok(root) = bisect(f, pa, alpha, 1e-15) {
                        if let Some(tail) = self.tail_from_alpha(root, &q_of, g) {
                            let tail_neg = if alpha_negative { tail[0] + tail[2] } else { tail[1] };
                            if neg + tail_neg <= neg_limit {
                                out.push(tail);
                            }
                        }
                    }
                }
            }
            prev = Some((alpha, hv));
        }
        out
    }

    fn tail_from_alpha<F>(&self, alpha: f64, q_of: &F, g: f64) -> Option<[f64; 3]>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let q = q_of(Complex64::from_polar(1.0, -alpha));
        let d = Complex64::new(1.0, 0.0) - q.sqrt();
        let delta = d.arg().rem_euclid(TAU);
        let beta = alpha + delta - g;
        let ok = |x: f64| x > 0.0 && x < TAU;
        (ok(delta) && ok(beta)).then_some([alpha, beta, delta])
    }

    /// Fastest completion of a fixed prefix, over all tail roots.
    fn complete(&self, sign: Sign, prefix: &[f64]) -> Option<Candidate> {
        let mut state = State::ORIGIN;
        let mut neg = 0.0;
        for (k, &d) in prefix.iter().enumerate() {
            let u = if k % 2 == 0 { sign } else { sign.flip() };
            state = advance(state, u.value(), d);
            if u == Sign::Minus {
                neg += d;
            }
        }
        let seg_sign = if prefix.len().is_multiple_of(2) { sign } else { sign.flip() };
        let mut best: Option<Candidate> = None;
        for tail in self.solve_tail(state, seg_sign, neg, f64::INFINITY) {
            let mut d = prefix.to_vec();
            d.extend_from_slice(&tail);
            if let Some(c) = self.check(sign, d) {
                if best.as_ref().is_none_or(|b| c.time < b.time) {
                    best = Some(c);
                }
            }
        }
        best
    }

    /// Coordinate-shrink descent on the prefix durations, minimizing time.
    fn refine(&self, start: Candidate, dims: usize) -> Candidate {
        if dims == 0 {
            return start;
        }
        let mut best = start;
        let mut step = self.prefix_step(dims);
        for _ in 0..REFINE_ROUNDS {
            for i in 0..dims {
                for dir in [-1.0, 1.0] {
                    let mut prefix = best.durations[..dims].to_vec();
                    prefix[i] += dir * step;
                    if !(prefix[i] > 0.0 && prefix[i] < TAU) {
                        continue;
                    }
                    if let Some(c) = self.complete(best.sign, &prefix) {
                        if c.time < best.time {
                            best = c;
                        }
                    }
                }
            }
            step *= 0.5;
        }
        best
    }

    fn finish(&self, best_by_n: Vec<Option<Candidate>>) -> BruteForceReport {
        let mut best: Option<(usize, &Candidate)> = None;
        for (n, c) in best_by_n.iter().enumerate() {
            if let Some(c) = c {
                if best.is_none_or(|(_, b)| c.time < b.time - TIE_TOL) {
                    best = Some((n, c));
                }
            }
        }
        let (n, c) = best.expect("finish called with at least one candidate");
        BruteForceReport {
            gamma: self.gamma,
            best_time: c.time,
            best_schedule: Schedule::new_unchecked(c.sign, c.durations.clone()),
            best_switchings: n,
            n_switchings_searched: self.opts.max_switchings,
            grid_resolution: self.opts.coarse_step,
            high_dim_resolution: 10.0 * self.opts.coarse_step,
            best_residual: c.residual,
            best_time_by_switchings: best_by_n.iter().map(|c| c.as_ref().map(|c| c.time)).collect(),
        }
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if b - a < 1e-15 {
            break;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bang_target_needs_no_switch() {
        let r = brute_force_min_time(2.0 * PI, 4, 0.01).unwrap();
        assert_eq!(r.best_switchings, 0);
        assert!((r.best_time - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn tail_solver_recovers_a_known_schedule() {
        // Any feasible 2-switch schedule must be found from an empty prefix.
        let search = Search::new(PI, &BruteForceOptions::new(2, 0.01));
        let tails = search.solve_tail(State::ORIGIN, Sign::Plus, 0.0, f64::INFINITY);
        assert!(!tails.is_empty());
        for t in &tails {
            let s = Schedule::new(Sign::Plus, t.to_vec()).unwrap();
            let end = propagate_schedule(&s);
            assert!((end - State::target(PI)).norm() < 1e-9);
        }
    }

    #[test]
    fn option_validation() {
        assert!(brute_force_min_time(0.0, 2, 0.01).is_err());
        assert!(brute_force_min_time(1.0, 2, 0.0).is_err());
        assert!(brute_force_min_time(1.0, 2, 2.0).is_err());
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let x = golden_min(&|x: f64| (x - 0.3).powi(2), 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-7);
    }
}
