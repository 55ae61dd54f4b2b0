use crate::error::{CostEstimate, Error, Result};

/// Size guards for the exhaustive and exact procedures.
///
/// Every guarded operation refuses inputs above its limit instead of silently
/// running for hours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest n for which GL_n(F2) is swept exhaustively.
    pub gl_max_n: usize,
    /// Largest arity accepted by the approximate spectral norm LP.
    pub lp_max_n: usize,
    /// Largest arity solved with exact rational arithmetic; above this the
    /// LP runs in floating point.
    pub exact_lp_max_n: usize,
    /// Largest arity r for which linear-distance balls are materialized.
    pub ball_max_r: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            gl_max_n: 5,
            lp_max_n: 8,
            exact_lp_max_n: 4,
            ball_max_r: 4,
        }
    }
}

impl Limits {
    pub fn with_gl_max_n(mut self, n: usize) -> Self {
        self.gl_max_n = n;
        self
    }

    pub(crate) fn check_gl(&self, what: &'static str, n: usize) -> Result<()> {
        if n <= self.gl_max_n {
            return Ok(());
        }
        let order = crate::gf2::gl_order(n);
        Err(Error::GuardExceeded {
            what,
            n,
            guard: self.gl_max_n,
            estimate: format!(
                "|GL_{n}(F2)| = {order:.3e}; {}",
                CostEstimate(order * (1u64 << n.min(60)) as f64)
            ),
        })
    }

    pub(crate) fn check_lp(&self, n: usize) -> Result<()> {
        if n <= self.lp_max_n {
            return Ok(());
        }
        let size = 2f64.powi(n as i32);
        Err(Error::GuardExceeded {
            what: "approximate spectral norm LP",
            n,
            guard: self.lp_max_n,
            estimate: format!(
                "dense tableau of {} x {} entries per pivot",
                2.0 * size,
                4.0 * size
            ),
        })
    }

    pub(crate) fn check_ball(&self, r: usize) -> Result<()> {
        if r <= self.ball_max_r {
            return Ok(());
        }
        Err(Error::GuardExceeded {
            what: "linear-distance ball",
            n: r,
            guard: self.ball_max_r,
            estimate: format!("bitset over 2^(2^{r}) truth tables"),
        })
    }
}
