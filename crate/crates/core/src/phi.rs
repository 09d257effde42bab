//! The scalar p-Laplacian map `phi_p(s) = |s|^{p-2} s` and its inverse.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PhiError {
    #[error("exponent p must be a finite real > 1, got {0}")]
    InvalidExponent(f64),
}

/// An exponent `p > 1` paired with its Hoelder conjugate `q = p/(p-1)`,
/// so that `1/p + 1/q = 1` and `(phi_p)^{-1} = phi_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PExponent {
    p: f64,
    q: f64,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self, PhiError> {
        if !p.is_finite() || p <= 1.0 {
            return Err(PhiError::InvalidExponent(p));
        }
        Ok(PExponent {
            p,
            q: p / (p - 1.0),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `phi_p(s) = |s|^{p-2} s`, with `phi_p(0) = 0` by continuity (the
    /// `|s|^{p-2}` factor is singular at 0 when p < 2).
    pub fn phi(&self, s: f64) -> f64 {
        phi_raw(self.p, s)
    }

    /// The inverse map `phi_q`.
    pub fn phi_inv(&self, s: f64) -> f64 {
        phi_raw(self.q, s)
    }
}

fn phi_raw(p: f64, s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.abs().powf(p - 2.0) * s
    }
}

/// Free-standing `phi_p(s)` with exponent validation.
pub fn phi(p: f64, s: f64) -> Result<f64, PhiError> {
    Ok(PExponent::new(p)?.phi(s))
}

/// Free-standing `phi_p^{-1}(s) = phi_q(s)`.
pub fn phi_inverse(p: f64, s: f64) -> Result<f64, PhiError> {
    Ok(PExponent::new(p)?.phi_inv(s))
}
