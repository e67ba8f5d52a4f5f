//! Resource budgets. Operations that could blow up combinatorially
//! (hyperspace enumeration, product spaces, cover joins, traces) check
//! these limits and fail loudly with a resource error instead of
//! approximating.

#[derive(Debug, Clone, Copy)]
pub struct Budget {
    /// Cap on the number of points of any constructed space (hyperspace,
    /// product space).
    pub max_space_points: u64,
    /// Cap on the number of sets a cover join may produce.
    pub max_join_sets: u64,
    /// Cap on the number of composition steps recorded before a trace
    /// gives up.
    pub max_trace_steps: u64,
}

impl Default for Budget {
    /// Defaults, with `HYPERDYN_BUDGET` (a point count) overriding the
    /// space-size cap when set.
    fn default() -> Self {
        let max_space_points = std::env::var("HYPERDYN_BUDGET")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(1 << 17);
        Budget {
            max_space_points,
            max_join_sets: 1 << 20,
            max_trace_steps: 1 << 17,
        }
    }
}

impl Budget {
    pub fn with_space_points(mut self, n: u64) -> Self {
        self.max_space_points = n;
        self
    }
}
