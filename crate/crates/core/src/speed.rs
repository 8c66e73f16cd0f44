//! Per-arc decision speeds shared across the routing search.

/// Dense `(n+1) x (n+1)` speed table. Counts writes so callers can verify
/// that a phase left it untouched.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeedMatrix {
    size: usize,
    speeds: Vec<f64>,
    writes: u64,
}

impl SpeedMatrix {
    pub fn new(size: usize, initial: f64) -> Self {
        SpeedMatrix {
            size,
            speeds: vec![initial; size * size],
            writes: 0,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.speeds[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.speeds[i * self.size + j] = v;
        self.writes += 1;
    }

    /// Resets every arc to `v`.
    pub fn fill(&mut self, v: f64) {
        self.speeds.fill(v);
        self.writes += 1;
    }

    /// Writes one speed per arc of the depot-bounded `visits`.
    pub fn set_route(&mut self, visits: &[usize], speeds: &[f64]) {
        for (w, &v) in visits.windows(2).zip(speeds) {
            self.set(w[0], w[1], v);
        }
    }

    pub fn route_speeds(&self, visits: &[usize]) -> Vec<f64> {
        visits.windows(2).map(|w| self.get(w[0], w[1])).collect()
    }

    pub fn write_count(&self) -> u64 {
        self.writes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn route_writes_only_touch_its_arcs() {
        let mut m = SpeedMatrix::new(4, 25.0);
        m.set_route(&[0, 1, 2, 0], &[15.0, 16.0, 17.0]);
        assert_eq!(m.route_speeds(&[0, 1, 2, 0]), vec![15.0, 16.0, 17.0]);
        assert_eq!(m.get(1, 0), 25.0);
        assert_eq!(m.write_count(), 3);
        m.fill(25.0);
        assert_eq!(m.get(0, 1), 25.0);
    }
}
