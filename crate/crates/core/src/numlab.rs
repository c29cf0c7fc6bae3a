//! Floating-point cross-validation: critical values, branch-point motion,
//! root-tracking monodromy, and the Hirzebruch degenerations.
//!
//! Roots are found by the Durand-Kerner simultanous iteration with a
//! deterministic perturbed-circle start and polished by Newton steps;
//! paths are tracked by a linear predictor with a Newton corrector and
//! adaptive step halving near collisions.  Sheets are labeled
//! counterclockwise through the small-|x| binomial approximation of the
//! fiber, anchored so that the branch point nearest the positive real axis
//! swaps the pair `(0, b)`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrackError {
    #[error("root finding did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error("roots collided during tracking (separation {0:e})")]
    Collision(f64),
    #[error("fiber labeling is ambiguous at the anchor")]
    AmbiguousLabels,
    #[error("no collision detected along the degeneration path")]
    NoCollision,
    #[error("tracked endpoints do not match the start fiber (distance {0:e})")]
    EndpointMismatch(f64),
}

/// Tolerances and step controls for path tracking.
#[derive(Clone, Debug, Serialize)]
pub struct TrackConfig {
    /// Initial number of steps per unit of path parameter.
    pub steps: usize,
    /// Newton residual tolerance at accepted points.
    pub newton_tol: f64,
    /// Minimal allowed root separation before refinement.
    pub collision_threshold: f64,
    pub max_refinements: u32,
}

impl Default for TrackConfig {
    fn default() -> Self {
        TrackConfig {
            steps: 256,
            newton_tol: 1e-12,
            collision_threshold: 1e-6,
            max_refinements: 12,
        }
    }
}

impl TrackConfig {
    fn validate(&self) {
        assert!(self.steps > 0);
        assert!(self.newton_tol > 0.0 && self.collision_threshold > 0.0);
        assert!(self.newton_tol < self.collision_threshold);
    }
}

/// Result of tracking a closed loop: the permutation of the fiber labels.
#[derive(Clone, Debug, Serialize)]
pub struct TrackResult {
    /// `permutation[q]` is the label at which the strand starting at label
    /// `q` arrives.
    pub permutation: Vec<usize>,
    pub max_residual: f64,
    pub min_separation: f64,
}

impl TrackResult {
    /// Cycle notation, e.g. `(0 2)(1)` omitted fixed points: `(0 2)`.
    pub fn cycles(&self) -> String {
        let n = self.permutation.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.permutation[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.permutation[start];
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.permutation[cur];
            }
            out.push('(');
            out.push_str(
                &cycle
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// All roots of the polynomial with the given coefficients
/// (`coeffs[k]` multiplies `z^k`), by Durand-Kerner iteration with a
/// deterministic perturbed-circle start.  Convergence is judged by the
/// backward error `|p(z)| / sum_k |p_k| |z|^k`, which stays meaningful
/// across large coefficient ranges.
pub fn all_roots(coeffs: &[Complex64], tol: f64) -> Result<Vec<Complex64>, TrackError> {
    let degree = coeffs.len() - 1;
    assert!(degree >= 1 && coeffs[degree].norm() > 0.0);
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / coeffs[degree]).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let backward_error = |z: Complex64| -> f64 {
        let mut scale = 0.0f64;
        let mut zk = 1.0f64;
        for c in &monic {
            scale += c.norm() * zk;
            zk *= z.norm();
        }
        scale += zk / z.norm().max(1e-300); // leading term |z|^degree
        eval(z).norm() / scale.max(f64::MIN_POSITIVE)
    };
    // Deterministic start: perturbed circle with radius from the
    // coefficient bound.
    let radius = 1.0
        + monic[..degree]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .powf(1.0 / degree as f64);
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64) / (degree as f64) + 0.41;
            radius * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();
    for _ in 0..600 {
        let mut worst = 0.0f64;
        for i in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            worst = worst.max(backward_error(roots[i]));
        }
        if worst < (tol * 1e-4).max(1e-15) {
            break;
        }
    }
    let worst = roots.iter().map(|&r| backward_error(r)).fold(0.0, f64::max);
    if worst > tol.max(1e-11) {
        return Err(TrackError::NoConvergence(worst));
    }
    Ok(roots)
}

/// Critical values of the plane superpotential: the `n` solutions of
/// `lambda^n = n^n / (a^a b^b c^c)`, counterclockwise from the positive
/// real one at index 0; index `j` sits at angle `-2*pi*j/n`.
pub fn critical_values_plane(a: u32, b: u32, c: u32) -> Vec<Complex64> {
    let n = (a + b + c) as f64;
    let log_l0 = (n.ln() * n - (a as f64) * (a as f64).ln() - (b as f64) * (b as f64).ln()
        - (c as f64) * (c as f64).ln())
        / n;
    let l0 = log_l0.exp();
    (0..(a + b + c))
        .map(|j| {
            let angle = -2.0 * std::f64::consts::PI * (j as f64) / n;
            l0 * Complex64::new(angle.cos(), angle.sin())
        })
        .collect()
}

/// Critical values of the line superpotential: solutions of
/// `lambda^(a+b) = (a+b)^(a+b) / (a^a b^b)`.
pub fn critical_values_line(a: u32, b: u32) -> Vec<Complex64> {
    let n = (a + b) as f64;
    let log_l0 =
        (n.ln() * n - (a as f64) * (a as f64).ln() - (b as f64) * (b as f64).ln()) / n;
    let l0 = log_l0.exp();
    (0..(a + b))
        .map(|j| {
            let angle = -2.0 * std::f64::consts::PI * (j as f64) / n;
            l0 * Complex64::new(angle.cos(), angle.sin())
        })
        .collect()
}

/// Coefficients of `x^a (lambda - x)^(b+c) - K` where
/// `K = (b+c)^(b+c) / (b^b c^c)`: the branch points of the fiber projection
/// at superpotential value `lambda`.
fn branch_polynomial(a: u32, b: u32, c: u32, lambda: Complex64) -> Vec<Complex64> {
    let m = b + c;
    let k_const = ((m as f64).ln() * m as f64
        - (b as f64) * (b as f64).ln()
        - (c as f64) * (c as f64).ln())
    .exp();
    let n = a + m;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (n + 1) as usize];
    // x^a * sum_k C(m, k) lambda^(m-k) (-x)^k
    for k in 0..=m {
        let binom = binomial(m, k) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[(a + k) as usize] += sign * binom * lambda.powu(m - k);
    }
    coeffs[0] -= k_const;
    coeffs
}

fn binomial(n: u32, k: u32) -> u64 {
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Branch points of the fiber projection at value `lambda`.
pub fn branch_points(
    a: u32,
    b: u32,
    c: u32,
    lambda: Complex64,
    config: &TrackConfig,
) -> Result<Vec<Complex64>, TrackError> {
    config.validate();
    all_roots(&branch_polynomial(a, b, c, lambda), config.newton_tol.max(1e-9))
}

/// The fiber equation `x^a y^b (-x-y)^c - 1` and its `y`-derivative.
fn fiber_eval(a: u32, b: u32, c: u32, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
    let w = -x - y;
    let value = x.powu(a) * y.powu(b) * w.powu(c) - 1.0;
    let deriv = x.powu(a)
        * ((b as f64) * y.powu(b - 1) * w.powu(c) - (c as f64) * y.powu(b) * w.powu(c - 1));
    (value, deriv)
}

/// The fiber over a small `x`, ordered by counterclockwise label: root `q`
/// has argument close to `(pi c + 2 pi q - a arg x) / (b + c)` by the
/// binomial approximation `y^(b+c) ~ (-1)^c x^(-a)`, refined by Newton.
fn anchor_fiber(
    a: u32,
    b: u32,
    c: u32,
    x: Complex64,
    config: &TrackConfig,
) -> Result<Vec<Complex64>, TrackError> {
    let m = (b + c) as f64;
    let modulus = x.norm().powf(-(a as f64) / m);
    let mut roots = Vec::with_capacity((b + c) as usize);
    for q in 0..(b + c) {
        let arg = (std::f64::consts::PI * c as f64 + 2.0 * std::f64::consts::PI * q as f64
            - a as f64 * x.arg())
            / m;
        let mut y = modulus * Complex64::new(arg.cos(), arg.sin());
        let mut residual = f64::INFINITY;
        for _ in 0..80 {
            let (value, deriv) = fiber_eval(a, b, c, x, y);
            residual = value.norm();
            if residual < config.newton_tol {
                break;
            }
            if deriv.norm() == 0.0 {
                break;
            }
            y -= value / deriv;
        }
        if residual > config.newton_tol {
            return Err(TrackError::NoConvergence(residual));
        }
        roots.push(y);
    }
    // Labels must be honest: the refined roots stay distinct.
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            if (roots[i] - roots[j]).norm() < config.collision_threshold {
                return Err(TrackError::AmbiguousLabels);
            }
        }
    }
    Ok(roots)
}

/// One accepted step of a tracked path.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub base: (f64, f64),
    pub roots: Vec<(f64, f64)>,
    pub residual: f64,
}

/// Track the fiber along a path in the base, by linear prediction and
/// Newton correction on every root, halving the step when roots approach.
fn track_fiber(
    a: u32,
    b: u32,
    c: u32,
    path: &dyn Fn(f64) -> Complex64,
    start_roots: &[Complex64],
    config: &TrackConfig,
    trace: &mut Vec<TraceRow>,
) -> Result<(Vec<Complex64>, f64, f64), TrackError> {
    config.validate();
    let mut roots = start_roots.to_vec();
    let mut t = 0.0f64;
    let mut step = 1.0 / config.steps as f64;
    let mut max_residual = 0.0f64;
    let mut min_separation = f64::INFINITY;
    let mut refinements = 0u32;
    while t < 1.0 {
        let t_next = (t + step).min(1.0);
        let x = path(t_next);
        let mut candidate = roots.clone();
        let mut ok = true;
        for root in candidate.iter_mut() {
            let mut y = *root;
            let mut converged = false;
            for _ in 0..60 {
                let (value, deriv) = fiber_eval(a, b, c, x, y);
                if value.norm() < config.newton_tol {
                    converged = true;
                    break;
                }
                if deriv.norm() == 0.0 {
                    break;
                }
                let delta = value / deriv;
                y -= delta;
                if delta.norm() > 1e6 {
                    break;
                }
            }
            let (value, _) = fiber_eval(a, b, c, x, y);
            if !converged || value.norm() > config.newton_tol {
                ok = false;
                break;
            }
            *root = y;
        }
        let separation = candidate
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                candidate
                    .iter()
                    .skip(i + 1)
                    .map(move |s| (r - s).norm())
            })
            .fold(f64::INFINITY, f64::min);
        if !ok || separation < config.collision_threshold {
            refinements += 1;
            if refinements > config.max_refinements {
                return Err(TrackError::Collision(separation));
            }
            step /= 2.0;
            continue;
        }
        let mut step_residual = 0.0f64;
        for root in &candidate {
            let (value, _) = fiber_eval(a, b, c, path(t_next), *root);
            step_residual = step_residual.max(value.norm());
        }
        max_residual = max_residual.max(step_residual);
        min_separation = min_separation.min(separation);
        roots = candidate;
        t = t_next;
        trace.push(TraceRow {
            t,
            base: (x.re, x.im),
            roots: roots.iter().map(|r| (r.re, r.im)).collect(),
            residual: step_residual,
        });
    }
    Ok((roots, max_residual, min_separation))
}

/// Loop specification for the monodromy tracker.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum LoopSpec {
    /// Counterclockwise circle around the origin at the anchor radius.
    Origin,
    /// Rotate counterclockwise from the anchor to the ray of branch point
    /// `m`, move outward, pass around it, and return.
    Branch(u32),
    /// A small contractible circle near the anchor.
    Contractible,
}

/// Track the monodromy permutation of the fiber labels along a loop, with
/// counterclockwise geometric labels anchored so that the branch point at
/// index 0 swaps `(0, b)`: the raw counterclockwise labeling is shifted by
/// whatever constant that takes (tracked once around branch 0).
pub fn track_monodromy(
    a: u32,
    b: u32,
    c: u32,
    loop_spec: LoopSpec,
    config: &TrackConfig,
) -> Result<TrackResult, TrackError> {
    Ok(track_monodromy_traced(a, b, c, loop_spec, config)?.0)
}

/// As [`track_monodromy`], also returning the accepted steps of the
/// requested loop for CSV/JSON traces.
pub fn track_monodromy_traced(
    a: u32,
    b: u32,
    c: u32,
    loop_spec: LoopSpec,
    config: &TrackConfig,
) -> Result<(TrackResult, Vec<TraceRow>), TrackError> {
    let mut discard = Vec::new();
    let raw0 = raw_track_monodromy(a, b, c, LoopSpec::Branch(0), config, &mut discard)?;
    let sheets = (b + c) as usize;
    let moved: Vec<usize> = (0..sheets).filter(|&q| raw0.permutation[q] != q).collect();
    let [p1, p2] = moved.as_slice() else {
        return Err(TrackError::AmbiguousLabels);
    };
    // The pair is {delta, delta + b}; pick the representative that makes it
    // so (either works when b = c).
    let delta = if (p1 + b as usize) % sheets == *p2 {
        *p1
    } else {
        *p2
    };
    let mut trace = Vec::new();
    let raw = raw_track_monodromy(a, b, c, loop_spec, config, &mut trace)?;
    let relabel = |q: usize| (q + sheets - delta) % sheets;
    let mut permutation = vec![0usize; sheets];
    for q in 0..sheets {
        permutation[relabel(q)] = relabel(raw.permutation[q]);
    }
    Ok((
        TrackResult {
            permutation,
            max_residual: raw.max_residual.max(raw0.max_residual),
            min_separation: raw.min_separation.min(raw0.min_separation),
        },
        trace,
    ))
}

fn raw_track_monodromy(
    a: u32,
    b: u32,
    c: u32,
    loop_spec: LoopSpec,
    config: &TrackConfig,
    trace: &mut Vec<TraceRow>,
) -> Result<TrackResult, TrackError> {
    config.validate();
    let branches = branch_points(a, b, c, Complex64::new(0.0, 0.0), config)?;
    let branch_radius = branches.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let n = (a + b + c) as usize;
    // Branch index m at angle theta0 + 2 pi m / n, counterclockwise.
    let theta0 = if (b + c).is_multiple_of(2) {
        0.0
    } else {
        std::f64::consts::PI / n as f64
    };
    let anchor_radius = 1e-3 * branch_radius;
    let anchor = Complex64::new(anchor_radius, 0.0);
    let start_roots = anchor_fiber(a, b, c, anchor, config)?;

    let path: Box<dyn Fn(f64) -> Complex64> = match loop_spec {
        LoopSpec::Origin => Box::new(move |t: f64| {
            let angle = 2.0 * std::f64::consts::PI * t;
            anchor_radius * Complex64::new(angle.cos(), angle.sin())
        }),
        LoopSpec::Contractible => Box::new(move |t: f64| {
            // Small circle through the anchor itself.
            let angle = 2.0 * std::f64::consts::PI * t;
            anchor + 0.05 * anchor_radius * (Complex64::new(angle.cos(), angle.sin()) - 1.0)
        }),
        LoopSpec::Branch(m) => {
            let access_angle =
                theta0 + 2.0 * std::f64::consts::PI * (m as f64) / (n as f64);
            let center = *branches
                .iter()
                .min_by(|p, q| {
                    let dp = angle_distance(p.arg(), access_angle);
                    let dq = angle_distance(q.arg(), access_angle);
                    dp.partial_cmp(&dq).unwrap()
                })
                .expect("nonempty branch set");
            let loop_radius = 0.4 * branch_radius * (std::f64::consts::PI / n as f64).sin();
            Box::new(move |t: f64| lollipop(anchor_radius, access_angle, center, loop_radius, t))
        }
    };
    let (end_roots, max_residual, min_separation) =
        track_fiber(a, b, c, path.as_ref(), &start_roots, config, trace)?;
    // Strand q ends at the position of the start root it maps to.
    let mut permutation = vec![usize::MAX; start_roots.len()];
    for (q, end) in end_roots.iter().enumerate() {
        let (j, dist) = start_roots
            .iter()
            .enumerate()
            .map(|(j, s)| (j, (end - s).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
            .expect("nonempty fiber");
        if dist > config.collision_threshold {
            return Err(TrackError::EndpointMismatch(dist));
        }
        if permutation.contains(&j) {
            return Err(TrackError::Collision(dist));
        }
        permutation[q] = j;
    }
    Ok(TrackResult {
        permutation,
        max_residual,
        min_separation,
    })
}

fn angle_distance(x: f64, y: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = (x - y).rem_euclid(two_pi);
    d.min(two_pi - d)
}

/// Piecewise loop: rotate counterclockwise from the anchor to the branch
/// ray, move radially out to just inside the branch point, wind once
/// counterclockwise around it, and retrace.
fn lollipop(
    anchor_radius: f64,
    access_angle: f64,
    center: Complex64,
    loop_radius: f64,
    t: f64,
) -> Complex64 {
    let polar = |r: f64, angle: f64| r * Complex64::new(angle.cos(), angle.sin());
    let stem_out = polar(anchor_radius, access_angle);
    let stem_end = center - polar(loop_radius, access_angle);
    if t < 0.2 {
        polar(anchor_radius, access_angle * (t / 0.2))
    } else if t < 0.4 {
        let s = (t - 0.2) / 0.2;
        stem_out + (stem_end - stem_out) * s
    } else if t < 0.8 {
        let s = (t - 0.4) / 0.4;
        let angle = access_angle + std::f64::consts::PI * (1.0 + 2.0 * s);
        center + polar(loop_radius, angle)
    } else if t < 0.9 {
        let s = (t - 0.8) / 0.1;
        stem_end + (stem_out - stem_end) * s
    } else {
        let s = (t - 0.9) / 0.1;
        polar(anchor_radius, access_angle * (1.0 - s))
    }
}

/// Track the line fiber as the superpotential value moves from 0 to the
/// positive real critical value; report the colliding pair of labels,
/// translation-normalized so the lower-half root is 0; the other label is
/// then the second weight.
pub fn line_vanishing_pair(a: u32, b: u32, config: &TrackConfig) -> Result<(usize, usize), TrackError> {
    config.validate();
    let total = a + b;
    let l0 = critical_values_line(a, b)[0];
    // Fiber x-coordinates solve x^a (lambda - x)^b = 1.
    let poly = |lambda: Complex64| -> Vec<Complex64> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (total + 1) as usize];
        for k in 0..=b {
            let binom = binomial(b, k) as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[(a + k) as usize] += binom * sign * lambda.powu(b - k);
        }
        coeffs[0] -= 1.0;
        coeffs
    };
    let start = all_roots(&poly(Complex64::new(0.0, 0.0)), config.newton_tol)?;
    // Counterclockwise labels by argument.
    let mut order: Vec<usize> = (0..start.len()).collect();
    order.sort_by(|&i, &j| start[i].arg().partial_cmp(&start[j].arg()).unwrap());
    let mut label_of = vec![0usize; start.len()];
    for (q, &i) in order.iter().enumerate() {
        label_of[i] = q;
    }
    // Newton-track every root toward the critical value, stopping short.
    let mut roots = start.clone();
    let steps = config.steps;
    let mut closest = (0usize, 1usize, f64::INFINITY);
    for s in 1..=steps {
        let t = 0.995 * (s as f64) / (steps as f64);
        let coeffs = poly(l0 * t);
        for root in roots.iter_mut() {
            let mut y = *root;
            for _ in 0..50 {
                let (value, deriv) = eval_with_deriv(&coeffs, y);
                if value.norm() < config.newton_tol {
                    break;
                }
                if deriv.norm() == 0.0 {
                    break;
                }
                y -= value / deriv;
            }
            *root = y;
        }
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                let d = (roots[i] - roots[j]).norm();
                if d < closest.2 {
                    closest = (i, j, d);
                }
            }
        }
    }
    if closest.2 == f64::INFINITY {
        return Err(TrackError::NoCollision);
    }
    let (i, j, _) = closest;
    // Order the pair (lower half-plane first at the start fiber) and
    // translation-normalize to (0, difference).
    let (lo, hi) = if start[i].im <= start[j].im {
        (label_of[i], label_of[j])
    } else {
        (label_of[j], label_of[i])
    };
    let diff = (hi as i64 - lo as i64).rem_euclid(total as i64) as usize;
    Ok((0, diff))
}

fn eval_with_deriv(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        deriv = deriv * z + value;
        value = value * z + c;
    }
    (value, deriv)
}

/// Track the branch points toward the critical value with index `j` and
/// report the colliding pair, converted into the combinatorial arc
/// convention (the endpoints of arc `delta_j`): geometric counterclockwise
/// index `m` corresponds to arc-convention index
/// `floor((b+c)/2) - m (mod n)`.
pub fn merge_pair(
    a: u32,
    b: u32,
    c: u32,
    j: u32,
    config: &TrackConfig,
) -> Result<(u32, u32), TrackError> {
    config.validate();
    let n = a + b + c;
    let lambda_j = critical_values_plane(a, b, c)[j as usize];
    let start = branch_points(a, b, c, Complex64::new(0.0, 0.0), config)?;
    let theta0 = if (b + c).is_multiple_of(2) {
        0.0
    } else {
        std::f64::consts::PI / n as f64
    };
    // Geometric counterclockwise labels.
    let geo_label = |z: Complex64| -> u32 {
        let rel = (z.arg() - theta0) * (n as f64) / (2.0 * std::f64::consts::PI);
        (rel.round() as i64).rem_euclid(n as i64) as u32
    };
    let mut roots = start.clone();
    let mut closest = (0usize, 1usize, f64::INFINITY);
    for s in 1..=config.steps {
        let t = 0.995 * (s as f64) / (config.steps as f64);
        let coeffs = branch_polynomial(a, b, c, lambda_j * t);
        for root in roots.iter_mut() {
            let mut y = *root;
            for _ in 0..50 {
                let (value, deriv) = eval_with_deriv(&coeffs, y);
                if value.norm() < config.newton_tol {
                    break;
                }
                if deriv.norm() == 0.0 {
                    break;
                }
                y -= value / deriv;
            }
            *root = y;
        }
        for i in 0..roots.len() {
            for k in (i + 1)..roots.len() {
                let d = (roots[i] - roots[k]).norm();
                if d < closest.2 {
                    closest = (i, k, d);
                }
            }
        }
    }
    if closest.2 == f64::INFINITY {
        return Err(TrackError::NoCollision);
    }
    let (p, q, _) = closest;
    let convert = |m: u32| -> u32 {
        let shift = ((b + c) / 2) as i64;
        (shift - m as i64).rem_euclid(n as i64) as u32
    };
    let mut pair = [convert(geo_label(start[p])), convert(geo_label(start[q]))];
    pair.sort_unstable();
    Ok((pair[0], pair[1]))
}

/// Hirzebruch degeneration report.
#[derive(Clone, Debug, Serialize)]
pub struct HirzebruchReport {
    pub n: u32,
    /// Critical values within tolerance of +2 or -2 (bounded family).
    pub bounded: Vec<(f64, f64)>,
    /// Critical values beyond the escape bound.
    pub escaped: Vec<(f64, f64)>,
    /// Values classified as neither; a nonzero count means the chosen
    /// tolerances do not separate the two families at this parameter.
    pub stray: usize,
    pub pass: bool,
}

/// Isotopy-bound check: on a grid of deformation parameters in [0, 1], the
/// critical equation `x^(n-2) (x^2 - s)^2 = n^2` keeps all roots in the
/// annulus `1 <= |x| <= sqrt(n+1)`, simple.
pub fn hirzebruch_isotopy(n: u32, grid: usize, config: &TrackConfig) -> Result<bool, TrackError> {
    for g in 0..=grid {
        let s = g as f64 / grid as f64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (n + 3) as usize];
        // x^(n-2) (x^2 - s)^2 - n^2 = x^(n+2) - 2 s x^n + s^2 x^(n-2) - n^2
        coeffs[(n + 2) as usize] = Complex64::new(1.0, 0.0);
        coeffs[n as usize] += Complex64::new(-2.0 * s, 0.0);
        coeffs[(n - 2) as usize] += Complex64::new(s * s, 0.0);
        coeffs[0] -= 1.0 * (n as f64) * (n as f64);
        let roots = all_roots(&coeffs, config.newton_tol.max(1e-10))?;
        let upper = ((n + 1) as f64).sqrt() + 1e-9;
        for (i, r) in roots.iter().enumerate() {
            if r.norm() < 1.0 - 1e-9 || r.norm() > upper {
                return Ok(false);
            }
            for other in roots.iter().skip(i + 1) {
                if (r - other).norm() < config.collision_threshold {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Degeneration check at a small deformation parameter: solve for the
/// critical points of the corner superpotential at `b_param`, evaluate the
/// critical values `W = ((n+2)/n) x + ((n-2)/n)/x`, and classify them as
/// bounded (near +-2) or escaped (beyond `escape_bound`).
pub fn hirzebruch_degeneration(
    n: u32,
    b_param: f64,
    near_tol: f64,
    escape_bound: f64,
    config: &TrackConfig,
) -> Result<HirzebruchReport, TrackError> {
    // x^(n-2) (x^2 - 1)^2 = n^2 b
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (n + 3) as usize];
    coeffs[(n + 2) as usize] = Complex64::new(1.0, 0.0);
    coeffs[n as usize] += Complex64::new(-2.0, 0.0);
    coeffs[(n - 2) as usize] += Complex64::new(1.0, 0.0);
    coeffs[0] -= (n as f64) * (n as f64) * b_param;
    let roots = all_roots(&coeffs, config.newton_tol.max(1e-10))?;
    let mut bounded = Vec::new();
    let mut escaped = Vec::new();
    let mut stray = 0usize;
    for x in roots {
        let w = Complex64::new((n as f64 + 2.0) / n as f64, 0.0) * x
            + Complex64::new((n as f64 - 2.0) / n as f64, 0.0) / x;
        if (w - 2.0).norm() < near_tol || (w + 2.0).norm() < near_tol {
            bounded.push((w.re, w.im));
        } else if w.norm() > escape_bound {
            escaped.push((w.re, w.im));
        } else {
            stray += 1;
        }
    }
    let pass = bounded.len() == 4 && escaped.len() == (n - 2) as usize && stray == 0;
    Ok(HirzebruchReport {
        n,
        bounded,
        escaped,
        stray,
        pass,
    })
}

/// Limit estimates for the four bounded critical values of the corner
/// degeneration: the leading deviation from the limit scales like the
/// square root of the parameter, so one Richardson step between `b` and
/// `b/4` cancels it, leaving an error of order `b`.
pub fn hirzebruch_limits(
    n: u32,
    b_param: f64,
    config: &TrackConfig,
) -> Result<Vec<Complex64>, TrackError> {
    let solve = |b: f64| -> Result<Vec<Complex64>, TrackError> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (n + 3) as usize];
        coeffs[(n + 2) as usize] = Complex64::new(1.0, 0.0);
        coeffs[n as usize] += Complex64::new(-2.0, 0.0);
        coeffs[(n - 2) as usize] += Complex64::new(1.0, 0.0);
        coeffs[0] -= (n as f64) * (n as f64) * b;
        let roots = all_roots(&coeffs, config.newton_tol.max(1e-10))?;
        let mut bounded: Vec<Complex64> = roots
            .iter()
            .map(|&x| {
                Complex64::new((n as f64 + 2.0) / n as f64, 0.0) * x
                    + Complex64::new((n as f64 - 2.0) / n as f64, 0.0) / x
            })
            .filter(|w| (w - 2.0).norm() < 0.5 || (w + 2.0).norm() < 0.5)
            .collect();
        bounded.sort_by(|p, q| {
            (p.re, p.im)
                .partial_cmp(&(q.re, q.im))
                .expect("finite values")
        });
        Ok(bounded)
    };
    let coarse = solve(b_param)?;
    let fine = solve(b_param / 4.0)?;
    if coarse.len() != 4 || fine.len() != 4 {
        return Err(TrackError::NoCollision);
    }
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(w1, w2)| 2.0 * w2 - w1)
        .collect())
}

/// Critical values of the doubled line superpotential with parameters
/// `(s, t)`: the four values `+-2 sqrt(s) +- 2 sqrt(t)`.
pub fn doubled_line_critical_values(s: f64, t: f64) -> Vec<f64> {
    let (rs, rt) = (2.0 * s.sqrt(), 2.0 * t.sqrt());
    vec![-rs - rt, -rs + rt, rs - rt, rs + rt]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_critical_values() {
        let values = critical_values_plane(1, 1, 1);
        assert!((values[0] - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        let line = critical_values_line(1, 1);
        assert!((line[0] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        // All moduli equal.
        for v in &values {
            assert!((v.norm() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn branch_points_on_a_circle() {
        let config = TrackConfig::default();
        let points = branch_points(4, 2, 1, Complex64::new(0.0, 0.0), &config).unwrap();
        assert_eq!(points.len(), 7);
        let r0 = points[0].norm();
        for p in &points {
            assert!((p.norm() - r0).abs() < 1e-9);
        }
        // Large value: a roots near the origin, b+c near the value itself.
        let far = branch_points(4, 2, 1, Complex64::new(100.0, 0.0), &config).unwrap();
        let near_zero = far.iter().filter(|p| p.norm() < 10.0).count();
        let near_lambda = far
            .iter()
            .filter(|p| (*p - Complex64::new(100.0, 0.0)).norm() < 10.0)
            .count();
        assert_eq!(near_zero, 4);
        assert_eq!(near_lambda, 3);
        // At the critical value the double root sits at a*lambda/n.
        let lambda0 = critical_values_plane(4, 2, 1)[0];
        let double = lambda0 * 4.0 / 7.0;
        let coeffs = branch_polynomial(4, 2, 1, lambda0);
        let (value, deriv) = eval_with_deriv(&coeffs, double);
        assert!(value.norm() < 1e-8, "value {}", value.norm());
        assert!(deriv.norm() < 1e-6, "deriv {}", deriv.norm());
    }

    #[test]
    fn origin_and_contractible_loops() {
        let config = TrackConfig::default();
        for (a, b, c) in [(1u32, 1, 1), (4, 2, 1), (1, 2, 3)] {
            let result = track_monodromy(a, b, c, LoopSpec::Origin, &config).unwrap();
            let m = (b + c) as usize;
            for q in 0..m {
                assert_eq!(
                    result.permutation[q],
                    (q + m - (a as usize) % m) % m,
                    "weights ({a},{b},{c})"
                );
            }
            assert!(result.max_residual < 1e-9);
            let id = track_monodromy(a, b, c, LoopSpec::Contractible, &config).unwrap();
            for q in 0..m {
                assert_eq!(id.permutation[q], q);
            }
        }
    }

    #[test]
    fn branch_loops_are_transpositions() {
        let config = TrackConfig::default();
        for (a, b, c) in [(1u32, 1, 1), (4, 2, 1), (1, 2, 3)] {
            let m = (b + c) as usize;
            for branch in 0..(a + b + c) {
                let result =
                    track_monodromy(a, b, c, LoopSpec::Branch(branch), &config).unwrap();
                let mut expected: Vec<usize> = (0..m).collect();
                let lo = (branch as usize) % m;
                let hi = (branch as usize + b as usize) % m;
                expected.swap(lo, hi);
                assert_eq!(
                    result.permutation, expected,
                    "weights ({a},{b},{c}), branch {branch}"
                );
                assert!(result.max_residual < 1e-9);
            }
        }
    }

    #[test]
    fn permutations_are_step_refinement_invariant() {
        let base = TrackConfig::default();
        for steps in [base.steps, base.steps * 2, base.steps * 4] {
            let config = TrackConfig { steps, ..base.clone() };
            let origin = track_monodromy(4, 2, 1, LoopSpec::Origin, &config).unwrap();
            assert_eq!(origin.permutation, vec![2, 0, 1]);
            let branch = track_monodromy(4, 2, 1, LoopSpec::Branch(1), &config).unwrap();
            assert_eq!(branch.permutation, vec![1, 0, 2]);
        }
    }

    #[test]
    fn merge_pairs_match_arc_endpoints() {
        let config = TrackConfig::default();
        for (a, b, c) in [(1u32, 1, 1), (4, 2, 1)] {
            let n = a + b + c;
            for j in 0..n {
                let pair = merge_pair(a, b, c, j, &config).unwrap();
                let mut expected = [j, (j + b + c) % n];
                expected.sort_unstable();
                assert_eq!(pair, (expected[0], expected[1]), "({a},{b},{c}) j={j}");
            }
        }
    }

    #[test]
    fn line_vanishing_pairs() {
        let config = TrackConfig::default();
        for (a, b) in [(4u32, 3u32), (1, 1), (2, 5), (3, 2), (5, 1)] {
            let pair = line_vanishing_pair(a, b, &config).unwrap();
            assert_eq!(pair, (0, b as usize), "({a},{b})");
        }
    }

    #[test]
    fn hirzebruch_checks() {
        let config = TrackConfig::default();
        for n in 3..=8 {
            assert!(hirzebruch_isotopy(n, 100, &config).unwrap(), "n = {n}");
        }
        // Raw critical values at b sit 2*sqrt(b) from the limit; the
        // Richardson limit estimates reach the tight tolerance.
        let report = hirzebruch_degeneration(3, 1e-8, 3e-4, 1e3, &config).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.escaped.len(), 1);
        let limits = hirzebruch_limits(3, 1e-8, &config).unwrap();
        assert_eq!(limits.len(), 4);
        for w in &limits {
            let dev = (w - 2.0).norm().min((w + 2.0).norm());
            assert!(dev < 1e-6, "limit {w} deviates {dev:e}");
        }
        let report = hirzebruch_degeneration(8, 1e-10, 1e-3, 1e1, &config).unwrap();
        assert_eq!(report.escaped.len(), 6, "{report:?}");
        assert!(report.pass, "{report:?}");
        // Doubled line sanity: +-2 sqrt(s) +- 2 sqrt(t).
        let values = doubled_line_critical_values(1.0, 1.0);
        assert_eq!(values, vec![-4.0, 0.0, 0.0, 4.0]);
    }
}
