//! Parameter search and threshold solving.
//!
//! Rate maximization runs a coarse deterministic grid over the free
//! parameters followed by trust-window coordinate descent (golden-section
//! line searches whose window doubles when the optimum presses against its
//! edge and halves when it stays interior). Threshold solving bisects the
//! channel parameter, re-optimizing the nuisance parameters at every step
//! and warm-starting from the argmax on the positive side: near threshold
//! the positive-rate basin shrinks below coarse-grid visibility, and only
//! continuation tracks it.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::entropy::{BoundParams, EntropyBound};
use crate::error::{Error, Result};
use crate::math;
use crate::maxq::{self, EpsilonRate, MaxqBound};
use crate::models::{devetak_winter_prepared, ChannelModel, RateResult};
use crate::solve;

/// Which nuisance parameters a search is allowed to move.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OptimizeFlags {
    pub alpha: bool,
    pub q: bool,
    pub theta: bool,
    pub phi_a: bool,
}

/// Channel parameter a threshold is solved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelParameter {
    Delta,
    Eta,
}

/// A rate-maximization problem: a channel template, the set of free
/// parameters, and fixed values for the rest. With `maxq` the objective is
/// the eps^2 rate coefficient of the q -> 1/2 limit instead of a finite-q
/// rate (the q flag is then ignored).
#[derive(Debug, Clone)]
pub struct RateProblem {
    pub template: ChannelModel,
    pub flags: OptimizeFlags,
    pub q: f64,
    pub alpha: f64,
    pub maxq: bool,
}

/// Outcome of a rate maximization.
#[derive(Debug, Clone)]
pub struct OptimizedRate {
    /// Rate in bits (finite q) or eps^2 coefficient (maxq).
    pub objective: f64,
    pub alpha: f64,
    pub q: f64,
    pub theta: Option<f64>,
    pub phi_a: Option<f64>,
    pub detail: RateDetail,
}

#[derive(Debug, Clone)]
pub enum RateDetail {
    FiniteQ(RateResult),
    MaxQ(EpsilonRate),
}

/// Zero-rate threshold in the channel parameter.
#[derive(Debug, Clone)]
pub struct ThresholdResult {
    pub critical_value: f64,
    pub optimal_alpha: Option<f64>,
    pub optimal_q: Option<f64>,
    pub optimal_theta: Option<f64>,
    pub optimal_phi_a: Option<f64>,
    pub iterations: usize,
    /// Objective at the reported critical value with re-optimized
    /// nuisance parameters.
    pub residual_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coord {
    Alpha,
    Q,
    Theta,
    PhiA,
}

/// Coarse-grid sizes. Alpha spans the generous bracket around the optima
/// the family exhibits; q stops short of the degenerate 1/2.
const ALPHA_POINTS: usize = 64;
const Q_POINTS: usize = 32;
const THETA_POINTS: usize = 48;
const PHI_POINTS: usize = 48;
const TOP_K: usize = 8;

fn coord_range(c: Coord) -> (f64, f64) {
    match c {
        Coord::Alpha => crate::entropy::ALPHA_RANGE,
        Coord::Q => (0.0, 0.499_999),
        // lower edges stay off zero: theta = 0 and phi_a = 0 are separable
        // configurations handled by the closed-form boundary candidate
        Coord::Theta => (
            core::f64::consts::FRAC_PI_2 / THETA_POINTS as f64,
            core::f64::consts::FRAC_PI_2,
        ),
        Coord::PhiA => (
            core::f64::consts::PI / PHI_POINTS as f64,
            core::f64::consts::PI,
        ),
    }
}

fn coord_points(c: Coord) -> usize {
    match c {
        Coord::Alpha => ALPHA_POINTS,
        Coord::Q => Q_POINTS,
        Coord::Theta => THETA_POINTS,
        Coord::PhiA => PHI_POINTS,
    }
}

fn coord_grid_value(c: Coord, i: usize) -> f64 {
    let n = coord_points(c);
    match c {
        // half-open [0, 1/2): 0.5 i / n
        Coord::Q => 0.5 * i as f64 / n as f64,
        _ => {
            let (lo, hi) = coord_range(c);
            solve::grid_point(lo, hi, i, n)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    alpha: f64,
    q: f64,
    theta: f64,
    phi_a: f64,
}

impl Point {
    fn get(&self, c: Coord) -> f64 {
        match c {
            Coord::Alpha => self.alpha,
            Coord::Q => self.q,
            Coord::Theta => self.theta,
            Coord::PhiA => self.phi_a,
        }
    }

    fn set(&mut self, c: Coord, v: f64) {
        match c {
            Coord::Alpha => self.alpha = v,
            Coord::Q => self.q = v,
            Coord::Theta => self.theta = v,
            Coord::PhiA => self.phi_a = v,
        }
    }
}

/// Objective evaluator with per-(q, alpha) bound-family caching; the
/// tangent root-find runs once per family, not once per rate call.
type BoundCache = Rc<RefCell<BTreeMap<(u64, u64), Rc<EntropyBound>>>>;
type MaxqCache = Rc<RefCell<BTreeMap<u64, Rc<MaxqBound>>>>;

struct Evaluator<'a> {
    template: &'a ChannelModel,
    maxq: bool,
    channel: Option<(ChannelParameter, f64)>,
    bounds: BoundCache,
    maxq_bounds: MaxqCache,
}

impl<'a> Evaluator<'a> {
    fn new(template: &'a ChannelModel, maxq: bool) -> Self {
        Self {
            template,
            maxq,
            channel: None,
            bounds: Rc::new(RefCell::new(BTreeMap::new())),
            maxq_bounds: Rc::new(RefCell::new(BTreeMap::new())),
        }
    }

    fn with_channel(&self, param: ChannelParameter, value: f64) -> Evaluator<'a> {
        Evaluator {
            template: self.template,
            maxq: self.maxq,
            channel: Some((param, value)),
            // bound caches depend only on (q, alpha); share across channels
            bounds: Rc::clone(&self.bounds),
            maxq_bounds: Rc::clone(&self.maxq_bounds),
        }
    }

    fn model_at(&self, p: &Point) -> ChannelModel {
        let mut model = *self.template;
        if let Some((param, value)) = self.channel {
            match (&mut model, param) {
                (ChannelModel::Depolarizing { delta, .. }, ChannelParameter::Delta) => {
                    *delta = value;
                }
                (ChannelModel::LossMaxEntangled { eta, .. }, ChannelParameter::Eta) => {
                    *eta = value;
                }
                (ChannelModel::LossPartialEntangled { eta, .. }, ChannelParameter::Eta) => {
                    *eta = value;
                }
                _ => {}
            }
        }
        if let ChannelModel::LossPartialEntangled { theta, phi_a, .. } = &mut model {
            *theta = p.theta;
            *phi_a = p.phi_a;
        }
        model
    }

    /// Objective value; errors map to -inf so the search simply avoids
    /// infeasible assignments.
    fn eval(&self, p: &Point) -> f64 {
        let model = self.model_at(p);
        if model.validate().is_err() {
            return f64::NEG_INFINITY;
        }
        if self.maxq {
            let key = p.alpha.to_bits();
            let bound = {
                let mut cache = self.maxq_bounds.borrow_mut();
                match cache.get(&key) {
                    Some(b) => Rc::clone(b),
                    None => match MaxqBound::new(p.alpha) {
                        Ok(b) => {
                            let b = Rc::new(b);
                            cache.insert(key, Rc::clone(&b));
                            b
                        }
                        Err(_) => return f64::NEG_INFINITY,
                    },
                }
            };
            match maxq::maxq_rate_coeff_prepared(&model, &bound) {
                Ok(c) => c.coefficient,
                Err(_) => f64::NEG_INFINITY,
            }
        } else {
            let key = (p.q.to_bits(), p.alpha.to_bits());
            let bound = {
                let mut cache = self.bounds.borrow_mut();
                match cache.get(&key) {
                    Some(b) => Rc::clone(b),
                    None => {
                        let params = match BoundParams::new(p.q, p.alpha) {
                            Ok(p) => p,
                            Err(_) => return f64::NEG_INFINITY,
                        };
                        match EntropyBound::new(params) {
                            Ok(b) => {
                                let b = Rc::new(b);
                                cache.insert(key, Rc::clone(&b));
                                b
                            }
                            Err(_) => return f64::NEG_INFINITY,
                        }
                    }
                }
            };
            match devetak_winter_prepared(&model, &bound) {
                Ok(r) => r.rate,
                Err(_) => f64::NEG_INFINITY,
            }
        }
    }

    fn detail(&self, p: &Point) -> Result<RateDetail> {
        let model = self.model_at(p);
        model.validate()?;
        if self.maxq {
            Ok(RateDetail::MaxQ(maxq::maxq_rate_coeff(&model, p.alpha)?))
        } else {
            Ok(RateDetail::FiniteQ(crate::models::devetak_winter(
                &model, p.q, p.alpha,
            )?))
        }
    }
}

fn free_coords(problem: &RateProblem) -> Result<Vec<Coord>> {
    let partial = matches!(problem.template, ChannelModel::LossPartialEntangled { .. });
    if (problem.flags.theta || problem.flags.phi_a) && !partial {
        return Err(Error::Domain {
            what: "theta/phi_a can only be optimized for the partially entangled model",
            value: 0.0,
        });
    }
    let mut coords = Vec::new();
    if problem.flags.alpha {
        coords.push(Coord::Alpha);
    }
    if problem.flags.q && !problem.maxq {
        coords.push(Coord::Q);
    }
    if problem.flags.theta {
        coords.push(Coord::Theta);
    }
    if problem.flags.phi_a {
        coords.push(Coord::PhiA);
    }
    Ok(coords)
}

fn base_point(problem: &RateProblem) -> Point {
    let (theta, phi_a) = match problem.template {
        ChannelModel::LossPartialEntangled { theta, phi_a, .. } => (theta, phi_a),
        _ => (0.0, 0.0),
    };
    Point {
        alpha: problem.alpha,
        q: problem.q,
        theta,
        phi_a,
    }
}

/// Best points of the coarse grid, descending; at most `TOP_K`.
fn coarse_scan(ev: &Evaluator, coords: &[Coord], base: Point) -> Vec<(f64, Point)> {
    let mut top: Vec<(f64, Point)> = Vec::new();
    let mut push = |v: f64, p: Point| {
        if !v.is_finite() {
            return;
        }
        let pos = top.partition_point(|(tv, _)| *tv > v);
        if pos < TOP_K {
            top.insert(pos, (v, p));
            top.truncate(TOP_K);
        }
    };
    if coords.is_empty() {
        push(ev.eval(&base), base);
        return top;
    }
    let counts: Vec<usize> = coords.iter().map(|&c| coord_points(c)).collect();
    let mut idx = alloc::vec![0usize; coords.len()];
    loop {
        let mut p = base;
        for (k, &c) in coords.iter().enumerate() {
            p.set(c, coord_grid_value(c, idx[k]));
        }
        push(ev.eval(&p), p);
        // mixed-radix increment
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < counts[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == coords.len() {
                return top;
            }
        }
    }
}

/// Trust-window coordinate descent from `start`.
fn polish(ev: &Evaluator, coords: &[Coord], start: Point, max_passes: usize) -> (f64, Point) {
    let mut x = start;
    let mut fx = ev.eval(&x);
    if coords.is_empty() {
        return (fx, x);
    }
    let mut window: Vec<f64> = coords
        .iter()
        .map(|&c| {
            let (lo, hi) = coord_range(c);
            2.0 * (hi - lo) / (coord_points(c) - 1) as f64
        })
        .collect();
    for _ in 0..max_passes {
        let mut moved = 0.0f64;
        for (k, &c) in coords.iter().enumerate() {
            let (rlo, rhi) = coord_range(c);
            let lo = (x.get(c) - window[k]).max(rlo);
            let hi = (x.get(c) + window[k]).min(rhi);
            let (xk, fv) = solve::golden_max(
                |t| {
                    let mut y = x;
                    y.set(c, t);
                    ev.eval(&y)
                },
                lo,
                hi,
                1e-11,
            );
            if fv > fx {
                moved = moved.max(math::abs(xk - x.get(c)));
                x.set(c, xk);
                fx = fv;
            }
            if (xk - lo).min(hi - xk) < 0.1 * window[k] {
                window[k] = (2.0 * window[k]).min(rhi - rlo);
            } else {
                window[k] = (0.5 * window[k]).max(1e-10);
            }
        }
        let wmax = window.iter().cloned().fold(0.0f64, f64::max);
        if moved < 1e-10 && wmax <= 1e-8 {
            break;
        }
    }
    (fx, x)
}

fn maximize_with(ev: &Evaluator, coords: &[Coord], base: Point, passes: usize) -> (f64, Point) {
    let starts = coarse_scan(ev, coords, base);
    let mut best = (f64::NEG_INFINITY, base);
    for &(_, p) in &starts {
        let (v, x) = polish(ev, coords, p, passes);
        if v > best.0 {
            best = (v, x);
        }
    }
    best
}

/// Maximize the rate (or eps^2 coefficient) over the flagged parameters.
pub fn maximize_rate(problem: &RateProblem) -> Result<OptimizedRate> {
    problem.template.validate()?;
    let coords = free_coords(problem)?;
    let ev = Evaluator::new(&problem.template, problem.maxq);
    let (value, point) = maximize_with(&ev, &coords, base_point(problem), 400);
    if !value.is_finite() {
        return Err(Error::Infeasible {
            what: "no feasible parameter assignment in the search region",
        });
    }
    let detail = ev.detail(&point)?;
    let partial = matches!(problem.template, ChannelModel::LossPartialEntangled { .. });
    Ok(OptimizedRate {
        objective: value,
        alpha: point.alpha,
        q: if problem.maxq { 0.5 } else { point.q },
        theta: partial.then_some(point.theta),
        phi_a: partial.then_some(point.phi_a),
        detail,
    })
}

fn default_bracket(param: ChannelParameter) -> (f64, f64) {
    match param {
        ChannelParameter::Delta => (0.0, 0.25),
        ChannelParameter::Eta => (0.75, 1.0),
    }
}

/// theta -> 0 boundary candidate for the maxq objective: applies to the
/// partially entangled model at unit visibility, where the threshold is
/// attained in the separable limit and has the closed form root
/// sqrt(10/3) - 1.
fn boundary_candidate(problem: &RateProblem, param: ChannelParameter, value: f64) -> f64 {
    if !problem.maxq || param != ChannelParameter::Eta {
        return f64::NEG_INFINITY;
    }
    match problem.template {
        ChannelModel::LossPartialEntangled { visibility, .. } if visibility >= 1.0 => {
            maxq::partial_boundary_coeff(value)
        }
        _ => f64::NEG_INFINITY,
    }
}

/// Bisect the channel parameter for the zero of the optimized rate.
///
/// Nuisance parameters are re-optimized at every bisection step; the
/// search at each step is seeded with both a fresh (shortened) grid scan
/// and the argmax carried over from the positive side.
pub fn find_threshold(
    problem: &RateProblem,
    param: ChannelParameter,
    bracket: Option<(f64, f64)>,
) -> Result<ThresholdResult> {
    problem.template.validate()?;
    match (param, &problem.template) {
        (ChannelParameter::Delta, ChannelModel::Depolarizing { .. }) => {}
        (ChannelParameter::Eta, ChannelModel::LossMaxEntangled { .. }) => {}
        (ChannelParameter::Eta, ChannelModel::LossPartialEntangled { .. }) => {}
        _ => {
            return Err(Error::Domain {
                what: "channel parameter does not belong to the model",
                value: 0.0,
            });
        }
    }
    let coords = free_coords(problem)?;
    let base = base_point(problem);
    let ev_base = Evaluator::new(&problem.template, problem.maxq);
    let (b_lo, b_hi) = bracket.unwrap_or_else(|| default_bracket(param));

    let full_max = |value: f64| -> (f64, Point) {
        let ev = ev_base.with_channel(param, value);
        let (v, p) = maximize_with(&ev, &coords, base, 400);
        (v.max(boundary_candidate(problem, param, value)), p)
    };
    let (f_lo, x_lo) = full_max(b_lo);
    let (f_hi, x_hi) = full_max(b_hi);
    if !(f_lo.is_finite() || f_hi.is_finite()) || f_lo * f_hi > 0.0 {
        return Err(Error::NoSignChange {
            param: match param {
                ChannelParameter::Delta => "delta",
                ChannelParameter::Eta => "eta",
            },
        });
    }
    let (mut pos, mut neg, mut warm) = if f_lo > 0.0 {
        (b_lo, b_hi, x_lo)
    } else {
        (b_hi, b_lo, x_hi)
    };

    let mut iterations = 0usize;
    while math::abs(pos - neg) > 1e-10 && iterations < 200 {
        iterations += 1;
        let mid = 0.5 * (pos + neg);
        let ev = ev_base.with_channel(param, mid);
        // continuation first, global re-scan second
        let (v_warm, x_warm) = polish(&ev, &coords, warm, 400);
        let (v_grid, x_grid) = {
            let starts = coarse_scan(&ev, &coords, base);
            let mut best = (f64::NEG_INFINITY, base);
            for &(_, p) in &starts {
                let (v, x) = polish(&ev, &coords, p, 60);
                if v > best.0 {
                    best = (v, x);
                }
            }
            best
        };
        let (mut v, mut x) = if v_warm >= v_grid {
            (v_warm, x_warm)
        } else {
            (v_grid, x_grid)
        };
        let vb = boundary_candidate(problem, param, mid);
        if vb > v {
            v = vb;
            x = warm;
        }
        if v > 0.0 {
            pos = mid;
            warm = x;
        } else {
            neg = mid;
        }
    }

    let critical = 0.5 * (pos + neg);
    let ev = ev_base.with_channel(param, critical);
    let (v_final, x_final) = polish(&ev, &coords, warm, 400);
    let vb = boundary_candidate(problem, param, critical);
    let boundary_ruled = vb > v_final;
    let residual = if boundary_ruled { vb } else { v_final };
    let partial = matches!(problem.template, ChannelModel::LossPartialEntangled { .. });
    Ok(ThresholdResult {
        critical_value: critical,
        optimal_alpha: problem.flags.alpha.then_some(if boundary_ruled {
            1.0
        } else {
            x_final.alpha
        }),
        optimal_q: (problem.flags.q && !problem.maxq).then_some(x_final.q),
        optimal_theta: (partial && problem.flags.theta).then_some(if boundary_ruled {
            0.0
        } else {
            x_final.theta
        }),
        optimal_phi_a: (partial && problem.flags.phi_a).then_some(if boundary_ruled {
            0.0
        } else {
            x_final.phi_a
        }),
        iterations,
        residual_rate: residual,
    })
}

/// Swept parameter of a `SweepSpec`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Delta,
    Eta,
    S,
    Alpha,
    Q,
    Theta,
}

/// What each sweep row computes.
#[derive(Debug, Clone)]
pub enum SweepScenario {
    /// Entropy bound rows at fixed (q, alpha), swept over s or alpha or q.
    Bound { q: f64, alpha: f64, s: f64 },
    /// Best-alpha bound rows for symmetric correlations c1 = c2 = s/2,
    /// swept over s at fixed q.
    BestAlpha { q: f64 },
    /// Rate (or maxq coefficient) rows for a channel model.
    Rate(RateProblem),
    /// Critical detection efficiency as a function of the error rate
    /// delta, with visibility 1 - 2 delta (swept over delta).
    CriticalEta(RateProblem),
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub scenario: SweepScenario,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lo.is_nan() || self.hi.is_nan() || self.lo >= self.hi {
            return Err(Error::Domain {
                what: "sweep range must satisfy lo < hi",
                value: self.lo,
            });
        }
        if self.points < 2 {
            return Err(Error::Domain {
                what: "sweep needs at least 2 points",
                value: self.points as f64,
            });
        }
        Ok(())
    }
}

/// All quantities a sweep row can carry; unused fields stay None so the
/// emitted table schema is stable across scenarios.
#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub s_alpha: Option<f64>,
    pub bound_value: Option<f64>,
    pub branch: Option<crate::entropy::Branch>,
    pub s_star: Option<f64>,
    pub h_a_given_b: Option<f64>,
    pub rate: Option<f64>,
    pub coefficient: Option<f64>,
    pub alpha: Option<f64>,
    pub q: Option<f64>,
    pub theta: Option<f64>,
    pub phi_a: Option<f64>,
    pub critical_eta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    /// Value of the swept parameter at this row.
    pub value: f64,
    pub outcome: Result<SweepOutcome>,
}

/// Compute row `i` of a sweep. Rows are independent; callers may fan them
/// out and reassemble by index.
pub fn sweep_row(spec: &SweepSpec, i: usize) -> SweepRow {
    let value = solve::grid_point(spec.lo, spec.hi, i, spec.points);
    SweepRow {
        value,
        outcome: sweep_outcome(spec, value),
    }
}

/// Run the whole sweep serially.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    Ok((0..spec.points).map(|i| sweep_row(spec, i)).collect())
}

fn sweep_outcome(spec: &SweepSpec, value: f64) -> Result<SweepOutcome> {
    match &spec.scenario {
        SweepScenario::Bound { q, alpha, s } => {
            let (q, alpha, s) = match spec.parameter {
                SweepParameter::S => (*q, *alpha, value),
                SweepParameter::Alpha => (*q, value, *s),
                SweepParameter::Q => (value, *alpha, *s),
                _ => {
                    return Err(Error::Domain {
                        what: "bound sweeps support parameters s, alpha, q",
                        value,
                    });
                }
            };
            let params = BoundParams::new(q, alpha)?;
            let bound = EntropyBound::new(params)?;
            let ev = bound.evaluate(crate::entropy::BellValue(s))?;
            Ok(SweepOutcome {
                s_alpha: Some(s),
                bound_value: Some(ev.value),
                branch: Some(ev.branch),
                s_star: ev.s_star,
                alpha: Some(alpha),
                q: Some(q),
                ..SweepOutcome::default()
            })
        }
        SweepScenario::BestAlpha { q } => {
            if spec.parameter != SweepParameter::S {
                return Err(Error::Domain {
                    what: "best-alpha sweeps are over s",
                    value,
                });
            }
            let (alpha_opt, best) = crate::entropy::best_alpha_bound(*q, value / 2.0, value / 2.0)?;
            Ok(SweepOutcome {
                s_alpha: Some(value),
                bound_value: Some(best),
                alpha: Some(alpha_opt),
                q: Some(*q),
                ..SweepOutcome::default()
            })
        }
        SweepScenario::Rate(problem) => {
            let mut problem = problem.clone();
            match (spec.parameter, &mut problem.template) {
                (SweepParameter::Delta, ChannelModel::Depolarizing { delta, .. }) => {
                    *delta = value;
                }
                (SweepParameter::Eta, ChannelModel::LossMaxEntangled { eta, .. }) => {
                    *eta = value;
                }
                (SweepParameter::Eta, ChannelModel::LossPartialEntangled { eta, .. }) => {
                    *eta = value;
                }
                (SweepParameter::Theta, ChannelModel::LossPartialEntangled { theta, .. }) => {
                    *theta = value;
                }
                (SweepParameter::Q, _) => {
                    problem.q = value;
                }
                (SweepParameter::Alpha, _) => {
                    problem.alpha = value;
                }
                _ => {
                    return Err(Error::Domain {
                        what: "swept parameter does not belong to the model",
                        value,
                    });
                }
            }
            let opt = maximize_rate(&problem)?;
            let mut out = SweepOutcome {
                alpha: Some(opt.alpha),
                q: Some(opt.q),
                theta: opt.theta,
                phi_a: opt.phi_a,
                ..SweepOutcome::default()
            };
            match opt.detail {
                RateDetail::FiniteQ(r) => {
                    out.s_alpha = Some(r.s_alpha.value());
                    out.bound_value = Some(r.entropy_bound.value);
                    out.branch = Some(r.entropy_bound.branch);
                    out.s_star = r.entropy_bound.s_star;
                    out.h_a_given_b = Some(r.h_a_given_b);
                    out.rate = Some(r.rate);
                }
                RateDetail::MaxQ(c) => {
                    out.coefficient = Some(c.coefficient);
                    out.rate = Some(opt.objective);
                }
            }
            Ok(out)
        }
        SweepScenario::CriticalEta(problem) => {
            if spec.parameter != SweepParameter::Delta {
                return Err(Error::Domain {
                    what: "critical-eta sweeps are over delta",
                    value,
                });
            }
            let mut problem = problem.clone();
            if let ChannelModel::LossPartialEntangled { visibility, .. } = &mut problem.template {
                *visibility = 1.0 - 2.0 * value;
            } else {
                return Err(Error::Domain {
                    what: "critical-eta sweeps need the partially entangled model",
                    value,
                });
            }
            let th = find_threshold(&problem, ChannelParameter::Eta, None)?;
            Ok(SweepOutcome {
                critical_eta: Some(th.critical_value),
                alpha: th.optimal_alpha,
                q: th.optimal_q,
                theta: th.optimal_theta,
                phi_a: th.optimal_phi_a,
                ..SweepOutcome::default()
            })
        }
    }
}
