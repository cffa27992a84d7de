// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Model parameters, kernels, the connection function and regime labels.

use std::fmt;
use std::str::FromStr;

use statrs::function::gamma::ln_gamma;

use crate::error::{Result, SirgError};

/// Tolerance used when deciding whether `beta` sits on a regime boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Long-range exponent of the connection function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Finite(f64),
    Infinite,
}

impl Alpha {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Alpha::Infinite)
    }

    /// `alpha / (alpha - 1)`, or 1 for the hard threshold.
    pub fn tail_factor(&self) -> f64 {
        match *self {
            Alpha::Finite(al) => al / (al - 1.0),
            Alpha::Infinite => 1.0,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(a) => write!(f, "{}", a),
            Alpha::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Alpha {
    type Err = SirgError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(Alpha::Infinite),
            _ => t
                .parse::<f64>()
                .map(|v| {
                    if v.is_infinite() && v > 0.0 {
                        Alpha::Infinite
                    } else {
                        Alpha::Finite(v)
                    }
                })
                .map_err(|_| SirgError::Parse(format!("alpha: cannot parse '{}'", s))),
        }
    }
}

/// Weight kernel `g(s, t)` inside the connection function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// `(s ∨ t)(s ∧ t)^a`.
    Interpolation,
    /// `(s + t)^d`.
    Boolean,
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Interpolation => write!(f, "interp"),
            Kernel::Boolean => write!(f, "boolean"),
        }
    }
}

impl FromStr for Kernel {
    type Err = SirgError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "interp" | "interpolation" => Ok(Kernel::Interpolation),
            "boolean" | "bool" => Ok(Kernel::Boolean),
            _ => Err(SirgError::Parse(format!("kernel: unknown value '{}'", s))),
        }
    }
}

/// Validated parameters `(d, alpha, beta, a, kernel)`.
///
/// Parameters built with [`ModelParams::new`] satisfy the conditions under
/// which the infinite model and its clustering limit exist: `d >= 1`,
/// `alpha > 1`, `beta > 2`, `a >= 0`, and `beta > d + 1` for the Boolean
/// kernel. [`ModelParams::new_finite`] relaxes `alpha` to `alpha > 0` for
/// finite-graph simulation only; theory routines reject such values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    d: u32,
    alpha: Alpha,
    beta: f64,
    a: f64,
    kernel: Kernel,
    finite_only: bool,
}

impl ModelParams {
    pub fn new(d: u32, alpha: Alpha, beta: f64, a: f64, kernel: Kernel) -> Result<Self> {
        let p = ModelParams {
            d,
            alpha,
            beta,
            a,
            kernel,
            finite_only: false,
        };
        p.check_common()?;
        if let Alpha::Finite(al) = alpha {
            if !(al > 1.0) {
                return Err(SirgError::InvalidParams(format!(
                    "alpha={} must exceed 1 (integrability of the connection function)",
                    al
                )));
            }
        }
        Ok(p)
    }

    /// Interpolation-kernel shorthand.
    pub fn interpolation(d: u32, alpha: Alpha, beta: f64, a: f64) -> Result<Self> {
        Self::new(d, alpha, beta, a, Kernel::Interpolation)
    }

    /// Boolean-kernel shorthand; `a` is unused and stored as 0.
    pub fn boolean(d: u32, alpha: Alpha, beta: f64) -> Result<Self> {
        Self::new(d, alpha, beta, 0.0, Kernel::Boolean)
    }

    /// Parameters accepted by the finite-graph generator only.
    pub fn new_finite(d: u32, alpha: Alpha, beta: f64, a: f64, kernel: Kernel) -> Result<Self> {
        let p = ModelParams {
            d,
            alpha,
            beta,
            a,
            kernel,
            finite_only: true,
        };
        p.check_common()?;
        if let Alpha::Finite(al) = alpha {
            if !(al > 0.0) {
                return Err(SirgError::InvalidParams(format!("alpha={} must be positive", al)));
            }
        }
        match Self::new(d, alpha, beta, a, kernel) {
            Ok(strict) => Ok(strict),
            Err(_) => Ok(p),
        }
    }

    fn check_common(&self) -> Result<()> {
        if self.d == 0 {
            return Err(SirgError::InvalidParams("dimension d must be at least 1".into()));
        }
        if !self.beta.is_finite() || !(self.beta > 2.0) {
            return Err(SirgError::InvalidParams(format!(
                "beta={} must exceed 2 (finite mean weight and locally finite graph)",
                self.beta
            )));
        }
        if !self.a.is_finite() || self.a < 0.0 {
            return Err(SirgError::InvalidParams(format!("a={} must be non-negative", self.a)));
        }
        if let Alpha::Finite(al) = self.alpha {
            if !al.is_finite() {
                return Err(SirgError::InvalidParams("alpha must be a number or inf".into()));
            }
        }
        if self.kernel == Kernel::Boolean && !(self.beta > self.d as f64 + 1.0) {
            return Err(SirgError::InvalidParams(format!(
                "beta={} must exceed d+1={} for the Boolean kernel (finite mean degree)",
                self.beta,
                self.d + 1
            )));
        }
        Ok(())
    }

    pub fn d(&self) -> u32 {
        self.d
    }
    pub fn alpha(&self) -> Alpha {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// True when the parameters only describe a finite graph (e.g. `alpha <= 1`).
    pub fn is_finite_only(&self) -> bool {
        self.finite_only
    }

    /// Errors unless the parameters support the infinite-model theory.
    pub fn require_limit(&self) -> Result<()> {
        if self.finite_only {
            return Err(SirgError::InvalidParams(format!(
                "alpha={} is only supported for finite-graph simulation",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Errors unless the kernel is the interpolation kernel.
    pub fn require_interpolation(&self, what: &str) -> Result<()> {
        if self.kernel != Kernel::Interpolation {
            return Err(SirgError::InvalidParams(format!(
                "{} is defined for the interpolation kernel only",
                what
            )));
        }
        Ok(())
    }

    /// Weight kernel `g(s, t)`.
    #[inline]
    pub fn g(&self, s: f64, t: f64) -> f64 {
        match self.kernel {
            Kernel::Interpolation => {
                let (lo, hi) = if s < t { (s, t) } else { (t, s) };
                hi * pow_a(lo, self.a)
            }
            Kernel::Boolean => (s + t).powi(self.d as i32),
        }
    }

    /// `h(w, w1, w2) = g(w1, w2) * min(g(w, w1), g(w, w2))`.
    pub fn h(&self, w: f64, w1: f64, w2: f64) -> f64 {
        self.g(w1, w2) * self.g(w, w1).min(self.g(w, w2))
    }

    /// Connection probability for distance `r` between weights `s` and `t`.
    #[inline]
    pub fn kappa(&self, r: f64, s: f64, t: f64) -> f64 {
        let rd = r.powi(self.d as i32);
        kappa_rd(rd, self.g(s, t), self.alpha)
    }

    /// Volume of the unit ball in dimension `d`.
    pub fn omega_d(&self) -> f64 {
        omega_d(self.d)
    }

    /// `xi_alpha`: mean degree prefactor.
    pub fn xi(&self) -> f64 {
        self.alpha.tail_factor() * self.omega_d() * (self.beta - 1.0)
    }

    /// Pareto density of the weight law.
    #[inline]
    pub fn weight_density(&self, w: f64) -> f64 {
        if w > 1.0 {
            (self.beta - 1.0) * w.powf(-self.beta)
        } else {
            0.0
        }
    }

    /// Regime label; the Boolean kernel always behaves like `k^{-1}`.
    pub fn regime(&self) -> Result<RegimeLabel> {
        match self.kernel {
            Kernel::Interpolation => classify_regime(self.a, self.beta),
            Kernel::Boolean => Ok(RegimeLabel {
                case: RegimeCase::InverseLinear,
                exponent: -1.0,
                infinite_mean_degree: false,
            }),
        }
    }

    /// Flat `key=value` form, one pair per line.
    pub fn to_kv(&self) -> String {
        format!(
            "d={}\nalpha={}\nbeta={}\na={}\nkernel={}\n",
            self.d, self.alpha, self.beta, self.a, self.kernel
        )
    }

    /// Parses the pairs written by [`ModelParams::to_kv`]; unknown keys are ignored.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut d = None;
        let mut alpha = None;
        let mut beta = None;
        let mut a = None;
        let mut kernel = Kernel::Interpolation;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| SirgError::Parse(format!("expected key=value, got '{}'", line)))?;
            let v = v.trim();
            match k.trim() {
                "d" => d = Some(v.parse::<u32>().map_err(|_| SirgError::Parse(format!("d: '{}'", v)))?),
                "alpha" => alpha = Some(v.parse::<Alpha>()?),
                "beta" => beta = Some(parse_f64("beta", v)?),
                "a" => a = Some(parse_f64("a", v)?),
                "kernel" => kernel = v.parse()?,
                _ => {}
            }
        }
        let d = d.ok_or_else(|| SirgError::Parse("missing key d".into()))?;
        let alpha = alpha.ok_or_else(|| SirgError::Parse("missing key alpha".into()))?;
        let beta = beta.ok_or_else(|| SirgError::Parse("missing key beta".into()))?;
        let a = match kernel {
            Kernel::Boolean => a.unwrap_or(0.0),
            Kernel::Interpolation => a.ok_or_else(|| SirgError::Parse("missing key a".into()))?,
        };
        ModelParams::new(d, alpha, beta, a, kernel)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| SirgError::Parse(format!("{}: cannot parse '{}'", key, v)))
}

#[inline]
fn pow_a(x: f64, a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else if a == 1.0 {
        x
    } else if a == 2.0 {
        x * x
    } else {
        x.powf(a)
    }
}

/// Connection probability given `r^d` and `g`.
#[inline]
pub fn kappa_rd(rd: f64, g: f64, alpha: Alpha) -> f64 {
    if rd < g {
        return 1.0;
    }
    match alpha {
        Alpha::Infinite => 0.0,
        Alpha::Finite(al) => {
            let q = g / rd;
            if al == 1.0 {
                q
            } else if al == 2.0 {
                q * q
            } else if al.fract() == 0.0 && al <= 16.0 {
                q.powi(al as i32)
            } else {
                q.powf(al)
            }
        }
    }
}

/// Volume of the unit ball in `R^d`.
pub fn omega_d(d: u32) -> f64 {
    use std::f64::consts::PI;
    match d {
        1 => return 2.0,
        2 => return PI,
        3 => return 4.0 * PI / 3.0,
        _ => {}
    }
    let h = d as f64 / 2.0;
    (h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0)).exp()
}

/// Scaling regimes of the clustering function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeCase {
    InverseLinear,
    CriticalLog,
    Polynomial,
    CriticalLogSquaredInverse,
    Constant,
}

impl RegimeCase {
    pub fn name(&self) -> &'static str {
        match self {
            RegimeCase::InverseLinear => "INVERSE_LINEAR",
            RegimeCase::CriticalLog => "CRITICAL_LOG",
            RegimeCase::Polynomial => "POLYNOMIAL",
            RegimeCase::CriticalLogSquaredInverse => "CRITICAL_LOGSQ_INV",
            RegimeCase::Constant => "CONSTANT",
        }
    }
}

impl fmt::Display for RegimeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Regime with the power of `k` in `S_k` (log factors are not part of it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeLabel {
    pub case: RegimeCase,
    pub exponent: f64,
    pub infinite_mean_degree: bool,
}

/// Classifies `(a, beta)`; points within [`BOUNDARY_TOL`] of a line count as on it.
pub fn classify_regime(a: f64, beta: f64) -> Result<RegimeLabel> {
    if !a.is_finite() || a < 0.0 {
        return Err(SirgError::InvalidParams(format!("a={} must be non-negative", a)));
    }
    if !beta.is_finite() || beta <= 2.0 {
        return Err(SirgError::InvalidParams(format!("beta={} must exceed 2", beta)));
    }
    let infinite_mean_degree = beta < (a + 3.0) / 2.0;
    let label = |case, exponent| {
        Ok(RegimeLabel {
            case,
            exponent,
            infinite_mean_degree,
        })
    };
    let crit = a + 1.5;
    if (beta - crit).abs() <= BOUNDARY_TOL {
        if a > 0.5 {
            return label(RegimeCase::CriticalLog, -1.0);
        }
        return Err(SirgError::UnsupportedRegime { a, beta });
    }
    if beta > crit {
        return label(RegimeCase::InverseLinear, -1.0);
    }
    if (beta - (a + 1.0)).abs() <= BOUNDARY_TOL {
        if a > 1.0 {
            return label(RegimeCase::CriticalLogSquaredInverse, 0.0);
        }
        return Err(SirgError::UnsupportedRegime { a, beta });
    }
    if beta > a + 1.0 {
        if a > 0.5 {
            return label(RegimeCase::Polynomial, 2.0 * a + 2.0 - 2.0 * beta);
        }
        return Err(SirgError::UnsupportedRegime { a, beta });
    }
    if a > 1.0 {
        return label(RegimeCase::Constant, 0.0);
    }
    Err(SirgError::UnsupportedRegime { a, beta })
}

/// `S_k(a, beta)`.
pub fn scaling_function(label: &RegimeLabel, k: f64) -> f64 {
    match label.case {
        RegimeCase::InverseLinear => 1.0 / k,
        RegimeCase::CriticalLog => k.ln() / k,
        RegimeCase::Polynomial => k.powf(label.exponent),
        RegimeCase::CriticalLogSquaredInverse => k.ln().powi(-2),
        RegimeCase::Constant => 1.0,
    }
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= BOUNDARY_TOL
}

/// Growth order `m(w)` of the mean degree.
pub fn m_scale(p: &ModelParams, w: f64) -> f64 {
    let (a, b) = (p.a, p.beta);
    if near(b, a + 1.0) {
        w * w.ln()
    } else if b > a + 1.0 {
        w
    } else {
        w.powf(2.0 + a - b)
    }
}

/// Growth order `m'(k)` of the inverse mean degree.
pub fn m_inv_scale(p: &ModelParams, k: f64) -> f64 {
    let (a, b) = (p.a, p.beta);
    if near(b, a + 1.0) {
        k / k.ln()
    } else if b > a + 1.0 {
        k
    } else {
        k.powf(1.0 / (2.0 + a - b))
    }
}

/// Growth order `sigma(w)` of the expected triangle count at weight `w`.
pub fn sigma_scale(p: &ModelParams, w: f64) -> f64 {
    let (a, b) = (p.a, p.beta);
    if near(b, a + 1.5) {
        w * w.ln()
    } else if b > a + 1.5 {
        w
    } else {
        w.powf(4.0 + 2.0 * a - 2.0 * b)
    }
}

/// `lim M(w) / m(w)`.
pub fn mean_degree_limit(p: &ModelParams) -> Result<f64> {
    p.require_interpolation("the mean-degree limit")?;
    let (a, b, xi) = (p.a, p.beta, p.xi());
    Ok(if near(b, a + 1.0) {
        xi
    } else if b > a + 1.0 {
        xi / (b - a - 1.0)
    } else {
        (a - 1.0) * xi / ((b - 2.0) * (a + 1.0 - b))
    })
}

/// `lim M^{-1}(k) / m'(k)`.
pub fn inverse_mean_degree_limit(p: &ModelParams) -> Result<f64> {
    p.require_interpolation("the inverse mean-degree limit")?;
    let (a, b, xi) = (p.a, p.beta, p.xi());
    Ok(if near(b, a + 1.0) {
        1.0 / xi
    } else if b > a + 1.0 {
        (b - a - 1.0) / xi
    } else {
        ((b - 2.0) * (a + 1.0 - b) / ((a - 1.0) * xi)).powf(1.0 / (2.0 + a - b))
    })
}

/// `lim sigma(M^{-1}(k)) / (k^2 S_k)`.
pub fn sigma_ratio_limit(p: &ModelParams) -> Result<f64> {
    p.require_interpolation("the sigma ratio limit")?;
    let label = p.regime()?;
    let (a, b, xi) = (p.a, p.beta, p.xi());
    Ok(match label.case {
        RegimeCase::InverseLinear => (b - a - 1.0) / xi,
        RegimeCase::CriticalLog => 1.0 / (2.0 * xi),
        RegimeCase::Polynomial => ((b - a - 1.0) / xi).powf(4.0 + 2.0 * a - 2.0 * b),
        RegimeCase::CriticalLogSquaredInverse => xi.powi(-2),
        RegimeCase::Constant => ((1.0 + a - b) * (b - 2.0) / ((a - 1.0) * xi)).powi(2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: u32, alpha: Alpha, beta: f64, a: f64) -> ModelParams {
        ModelParams::interpolation(d, alpha, beta, a).unwrap()
    }

    #[test]
    fn omega_values() {
        assert!((omega_d(1) - 2.0).abs() < 1e-14);
        assert!((omega_d(2) - std::f64::consts::PI).abs() < 1e-13);
        assert!((omega_d(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn xi_values() {
        assert!((p(1, Alpha::Infinite, 3.0, 0.0).xi() - 4.0).abs() < 1e-14);
        let q = p(2, Alpha::Finite(2.0), 4.0, 2.0);
        assert!((q.xi() - 6.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn kappa_threshold_and_tail() {
        let q = p(1, Alpha::Infinite, 3.0, 1.0);
        assert_eq!(q.kappa(0.0, 1.0, 1.0), 1.0);
        assert_eq!(q.kappa(1.0, 1.0, 1.0), 0.0);
        assert_eq!(q.kappa(5.9, 2.0, 3.0), 1.0);
        assert_eq!(q.kappa(6.1, 2.0, 3.0), 0.0);
        let q = p(2, Alpha::Finite(2.0), 3.0, 1.0);
        assert!((q.kappa(2.0, 1.0, 1.0) - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid() {
        assert!(ModelParams::interpolation(1, Alpha::Infinite, 1.5, 1.0).is_err());
        assert!(ModelParams::interpolation(1, Alpha::Finite(1.0), 3.0, 1.0).is_err());
        assert!(ModelParams::interpolation(0, Alpha::Infinite, 3.0, 1.0).is_err());
        assert!(ModelParams::interpolation(1, Alpha::Infinite, 3.0, -0.1).is_err());
        assert!(ModelParams::boolean(2, Alpha::Infinite, 2.5).is_err());
        let f = ModelParams::new_finite(2, Alpha::Finite(1.0), 4.0, 2.0, Kernel::Interpolation).unwrap();
        assert!(f.is_finite_only());
        assert!(f.require_limit().is_err());
    }

    #[test]
    fn regime_examples() {
        let r = classify_regime(1.0, 4.0).unwrap();
        assert_eq!(r.case, RegimeCase::InverseLinear);
        assert_eq!(r.exponent, -1.0);
        assert!(!r.infinite_mean_degree);
        let r = classify_regime(2.0, 3.25).unwrap();
        assert_eq!(r.case, RegimeCase::Polynomial);
        assert!((r.exponent + 0.5).abs() < 1e-12);
        let r = classify_regime(2.0, 3.0).unwrap();
        assert_eq!(r.case, RegimeCase::CriticalLogSquaredInverse);
        let r = classify_regime(2.0, 2.4).unwrap();
        assert_eq!(r.case, RegimeCase::Constant);
        assert!(r.infinite_mean_degree);
        let r = classify_regime(1.0, 2.5).unwrap();
        assert_eq!(r.case, RegimeCase::CriticalLog);
        let r = classify_regime(0.0, 2.5).unwrap();
        assert_eq!(r.case, RegimeCase::InverseLinear);
        assert!(classify_regime(1.0, 1.9).is_err());
    }

    #[test]
    fn kv_round_trip() {
        let q = p(2, Alpha::Finite(2.5), 3.01, 2.0);
        assert_eq!(ModelParams::from_kv(&q.to_kv()).unwrap(), q);
        let q = p(1, Alpha::Infinite, 4.0, 1.0);
        assert_eq!(ModelParams::from_kv(&q.to_kv()).unwrap(), q);
    }
}
