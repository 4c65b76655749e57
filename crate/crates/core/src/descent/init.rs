use super::DescentError;

/// Qubit count of the uniform initial state for the schedule `eta M T`.
///
/// The smallest `q` with `2^(-q/2) <= 1/2 - eta M T`, raised if needed so the
/// register holds all `n` coordinates.
pub fn uniform_qubits(eta: f64, m: f64, t: usize, n: usize) -> Result<u32, DescentError> {
    let budget = eta * m * t as f64;
    if !(budget < 0.5) {
        return Err(DescentError::InfeasibleSchedule { eta_m_t: budget });
    }
    let margin = 0.5 - budget;
    // the small offset keeps exact powers of two from rounding up
    let q = ((1.0 / (margin * margin)).log2() - 1e-12).ceil().max(0.0) as u32;
    let width = n.max(1).next_power_of_two().trailing_zeros();
    Ok(q.max(width))
}

/// First `n` amplitudes `2^(-q/2)` of the uniform `q`-qubit state.
pub fn initial_state_uniform(eta: f64, m: f64, t: usize, n: usize) -> Result<Vec<f64>, DescentError> {
    let q = uniform_qubits(eta, m, t, n)?;
    Ok(uniform_with_qubits(q, n))
}

pub fn uniform_with_qubits(q: u32, n: usize) -> Vec<f64> {
    vec![2f64.powf(-(q as f64) / 2.0); n]
}
