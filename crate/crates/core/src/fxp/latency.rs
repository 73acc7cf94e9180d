/// Pipeline depth of the equalization datapath.
pub const PIPELINE_STAGES: u64 = 24;

/// Cycles until the first equalized output: `24 (K + 1) U + O`, where `O`
/// is the pipeline flush overhead.
pub fn latency_cycles(k: u64, u: u64, overhead: u64) -> u64 {
    PIPELINE_STAGES * (k + 1) * u + overhead
}

pub fn latency_seconds(cycles: u64, clock_hz: f64) -> f64 {
    cycles as f64 / clock_hz
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reported_design_points() {
        assert_eq!(latency_cycles(3, 8, 27), 795);
        assert!((latency_seconds(795, 258e6) * 1e6 - 3.08).abs() < 0.01);
        assert_eq!(latency_cycles(1, 8, 27), 411);
        assert!((latency_seconds(411, 261e6) * 1e6 - 1.58).abs() < 0.01);
    }

    #[test]
    fn linear_in_k_and_u() {
        for u in 1..16 {
            for k in 1..10 {
                assert_eq!(latency_cycles(k + 1, u, 26) - latency_cycles(k, u, 26), 24 * u);
                assert_eq!(latency_cycles(k, u + 1, 26) - latency_cycles(k, u, 26), 24 * (k + 1));
            }
        }
    }
}
