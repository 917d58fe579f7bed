use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::audit::richardson_derivative;

pub type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// `[0,1]`, endpoints fixed.
    Unit,
    Line,
    /// Lift of a circle map: `f(x+1) = f(x)+1`.
    CircleLift,
}

/// Increasing homeomorphism given by evaluators.
#[derive(Clone)]
pub struct IntervalMap {
    forward: Eval,
    inverse: Option<Eval>,
    derivative: Option<Eval>,
    domain: Domain,
    provenance: String,
}

impl fmt::Debug for IntervalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntervalMap")
            .field("domain", &self.domain)
            .field("provenance", &self.provenance)
            .field("exact_inverse", &self.inverse.is_some())
            .field("exact_derivative", &self.derivative.is_some())
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapCheck {
    pub monotone: bool,
    /// `max(|f(0)|, |f(1)-1|)` for unit-interval maps.
    pub endpoint_error: Option<f64>,
    /// `sup |f(x+1) - f(x) - 1|` for circle lifts.
    pub lift_error: Option<f64>,
    pub ok: bool,
}

impl IntervalMap {
    pub fn new(domain: Domain, provenance: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        IntervalMap { forward: Arc::new(f), inverse: None, derivative: None, domain, provenance: provenance.into() }
    }

    pub fn with_inverse(mut self, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(g));
        self
    }

    pub fn with_derivative(mut self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(df));
        self
    }

    pub fn identity(domain: Domain) -> Self {
        IntervalMap::new(domain, "identity", |x| x).with_inverse(|x| x).with_derivative(|_| 1.0)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.forward)(x)
    }

    pub fn has_exact_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn exact_derivative(&self, x: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(x))
    }

    /// Exact derivative when available, else Richardson-extrapolated central differences.
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(x),
            None => richardson_derivative(|z| self.eval(z), x, [1e-4, 5e-5, 2.5e-5]),
        }
    }

    /// Evaluates the inverse, by bisection when no closed form was supplied.
    pub fn eval_inverse(&self, y: f64) -> f64 {
        match &self.inverse {
            Some(g) => g(y),
            None => bisect_inverse(&*self.forward, self.domain, y),
        }
    }

    pub fn inverse(&self) -> IntervalMap {
        let f = self.forward.clone();
        let domain = self.domain;
        let inv: Eval = match &self.inverse {
            Some(g) => g.clone(),
            None => {
                let f = f.clone();
                Arc::new(move |y| bisect_inverse(&*f, domain, y))
            }
        };
        let derivative = self.derivative.as_ref().map(|d| {
            let d = d.clone();
            let inv = inv.clone();
            Arc::new(move |y: f64| 1.0 / d(inv(y))) as Eval
        });
        IntervalMap {
            forward: inv,
            inverse: Some(f),
            derivative,
            domain,
            provenance: format!("({})^-1", self.provenance),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &IntervalMap) -> IntervalMap {
        let (f, g) = (self.forward.clone(), other.forward.clone());
        let forward: Eval = Arc::new(move |x| f(g(x)));
        let inverse = match (&self.inverse, &other.inverse) {
            (Some(fi), Some(gi)) => {
                let (fi, gi) = (fi.clone(), gi.clone());
                Some(Arc::new(move |y| gi(fi(y))) as Eval)
            }
            _ => None,
        };
        let derivative = match (&self.derivative, &other.derivative) {
            (Some(df), Some(dg)) => {
                let (df, dg, g) = (df.clone(), dg.clone(), other.forward.clone());
                Some(Arc::new(move |x| df(g(x)) * dg(x)) as Eval)
            }
            _ => None,
        };
        IntervalMap {
            forward,
            inverse,
            derivative,
            domain: self.domain,
            provenance: format!("{} o {}", self.provenance, other.provenance),
        }
    }

    /// `f^n(x)` for any integer `n`.
    pub fn iterate(&self, n: i64, x: f64) -> f64 {
        let mut y = x;
        for _ in 0..n.unsigned_abs() {
            y = if n > 0 { self.eval(y) } else { self.eval_inverse(y) };
        }
        y
    }

    /// Monotonicity on an `n`-point grid plus the endpoint or lift condition.
    pub fn check(&self, n: usize) -> MapCheck {
        let (lo, hi) = match self.domain {
            Domain::Unit | Domain::CircleLift => (0.0, 1.0),
            Domain::Line => (-2.0, 2.0),
        };
        let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();
        let monotone = ys.windows(2).all(|w| w[1] > w[0]);
        let endpoint_error = (self.domain == Domain::Unit).then(|| self.eval(0.0).abs().max((self.eval(1.0) - 1.0).abs()));
        let lift_error = (self.domain == Domain::CircleLift)
            .then(|| xs.iter().zip(&ys).map(|(&x, &y)| (self.eval(x + 1.0) - y - 1.0).abs()).fold(0.0, f64::max));
        let ok = monotone && endpoint_error.is_none_or(|e| e <= 1e-12) && lift_error.is_none_or(|e| e <= 1e-10);
        MapCheck { monotone, endpoint_error, lift_error, ok }
    }
}

fn bisect_inverse(f: &(dyn Fn(f64) -> f64 + Send + Sync), domain: Domain, y: f64) -> f64 {
    let (mut lo, mut hi) = match domain {
        Domain::Unit => {
            if y <= 0.0 || y >= 1.0 {
                return y;
            }
            (0.0, 1.0)
        }
        Domain::Line | Domain::CircleLift => {
            let (mut lo, mut hi) = (y - 1.0, y + 1.0);
            let mut w = 1.0;
            while f(lo) > y {
                w *= 2.0;
                lo = y - w;
            }
            w = 1.0;
            while f(hi) < y {
                w *= 2.0;
                hi = y + w;
            }
            (lo, hi)
        }
    };
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if f(m) < y {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}
