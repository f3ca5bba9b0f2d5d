//! Outcome of a single inequality check.

use alloc::string::String;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub check_id: String,
    pub fixture: String,
    /// Sweep coordinates, e.g. `t=1;seed_index=3`.
    pub sweep_key: String,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs/rhs, or the measured constant for checks that record one.
    pub ratio: f64,
    pub budget: f64,
    pub pass: bool,
    pub seed: u64,
    pub notes: String,
    /// Set when a numerical step failed; such a report never passes.
    pub errored: bool,
}

impl CheckReport {
    pub fn new(check_id: &str, lhs: f64, rhs: f64, budget: f64, pass: bool) -> Self {
        CheckReport {
            check_id: String::from(check_id),
            fixture: String::new(),
            sweep_key: String::new(),
            lhs,
            rhs,
            ratio: safe_ratio(lhs, rhs),
            budget,
            pass,
            seed: 0,
            notes: String::new(),
            errored: false,
        }
    }

    /// Report for an inequality `lhs <= budget * rhs` (up to `rel_tol`).
    pub fn bound(check_id: &str, lhs: f64, rhs: f64, budget: f64, rel_tol: f64) -> Self {
        let pass = lhs <= budget * rhs * (1.0 + rel_tol) + 1e-300;
        Self::new(check_id, lhs, rhs, budget, pass)
    }

    /// Report for a positivity witness `value >= -tol`; lhs holds the witness.
    pub fn witness(check_id: &str, value: f64, tol: f64) -> Self {
        let mut r = Self::new(check_id, value, -tol, tol, value >= -tol);
        r.ratio = value;
        r
    }

    /// Report for a residual `value <= tol`.
    pub fn residual(check_id: &str, value: f64, tol: f64) -> Self {
        let mut r = Self::new(check_id, value, tol, tol, value <= tol);
        r.ratio = value;
        r
    }

    pub fn errored(check_id: &str, message: &str) -> Self {
        let mut r = Self::new(check_id, f64::NAN, f64::NAN, f64::NAN, false);
        r.errored = true;
        r.notes = String::from(message);
        r
    }

    pub fn with_fixture(mut self, fixture: &str) -> Self {
        self.fixture = String::from(fixture);
        self
    }

    pub fn with_sweep(mut self, key: String) -> Self {
        self.sweep_key = key;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_notes(mut self, notes: String) -> Self {
        self.notes = notes;
        self
    }

    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.ratio = ratio;
        self
    }
}

/// lhs/rhs with 0/0 read as 0 and x/0 as infinity.
pub fn safe_ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lhs / rhs
    }
}
