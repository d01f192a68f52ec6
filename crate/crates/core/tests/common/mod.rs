//! Independent reference computations shared by the integration tests.
//!
//! Everything here works in plain probability space and enumerates
//! explicitly, so it shares no arithmetic with the log-space library code.

#![allow(dead_code)]

use colcat_core::inference::InferenceConfig;
use colcat_core::machines::{MachineLabel, MachineSet, TypeMachine};
use colcat_core::types::{BaseType, RowKind};
use rand::Rng;

/// Probability of `s` under `m`, summed over every accepting state path.
pub fn path_probability(m: &TypeMachine, s: &str) -> f64 {
    fn walk(m: &TypeMachine, state: usize, rest: &[char]) -> f64 {
        let Some((&c, tail)) = rest.split_first() else {
            return m.stop_prob(state);
        };
        let mut total = 0.0;
        for t in m.transitions(state) {
            if t.class.contains(c) {
                total += t.prob / t.class.size() as f64 * walk(m, t.target, tail);
            }
        }
        total
    }
    let chars: Vec<char> = s.chars().collect();
    m.initial().iter().map(|&(q, p)| p * walk(m, q, &chars)).sum()
}

/// `p(t | x)` by enumerating all `3^N` row-type assignments of the raw cells.
pub fn brute_force_posterior(cells: &[&str], machines: &MachineSet, cfg: &InferenceConfig) -> [f64; 4] {
    let n = cells.len();
    let mut joint = [0.0; 4];
    for (ti, t) in BaseType::ALL.into_iter().enumerate() {
        let per_kind: Vec<[f64; 3]> = cells
            .iter()
            .map(|x| {
                [
                    path_probability(machines.machine(MachineLabel::from(t)), x),
                    path_probability(machines.machine(MachineLabel::Missing), x),
                    path_probability(machines.machine(MachineLabel::Anomaly), x),
                ]
            })
            .collect();
        let mut total = 0.0;
        for code in 0..3usize.pow(n as u32) {
            let mut rest = code;
            let mut product = 1.0;
            for cell in &per_kind {
                let k = rest % 3;
                rest /= 3;
                product *= cfg.row_weights.get(RowKind::ALL[k]) * cell[k];
            }
            total += product;
        }
        joint[ti] = cfg.type_prior.get(t) * total;
    }
    let z: f64 = joint.iter().sum();
    joint.map(|j| j / z)
}

/// Alphabet used by the small-string oracles: digits, numeric punctuation,
/// the letters of `NA`, date separators, a space and one plain letter.
pub const ALPHABET: [char; 12] = ['0', '1', '2', '-', '.', 'e', 'N', 'A', '/', ':', ' ', 'a'];

pub fn random_cell<R: Rng>(rng: &mut R, max_len: usize) -> String {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())]).collect()
}

/// Every string over [`ALPHABET`] of length at most `max_len`.
pub fn all_strings(max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for c in ALPHABET {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Two-sided Student-t tail by Simpson quadrature of the density.
pub fn t_tail_by_quadrature(t: f64, df: f64) -> f64 {
    let ln_gamma = |x: f64| -> f64 {
        // Lanczos approximation, g = 7, n = 9.
        const C: [f64; 9] = [
            0.999_999_999_999_809_9,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_1,
            -176.615_029_162_140_6,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_572e-6,
            1.505_632_735_149_311_6e-7,
        ];
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + 7.5;
        for (i, c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    };
    let log_norm = ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
    let pdf = |x: f64| (log_norm - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    // Central mass over [0, |t|], doubled; the tail is its complement.
    let steps = 200_000;
    let h = t.abs() / steps as f64;
    let mut sum = pdf(0.0) + pdf(t.abs());
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * pdf(i as f64 * h);
    }
    1.0 - 2.0 * sum * h / 3.0
}
