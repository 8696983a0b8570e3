//! Generic truncated fault enumeration, used for small circuits and for the
//! cost model. The gadget has a specialised loop in `gadget`.

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of configurations with at most `order` faulty sites among `n`.
pub fn config_count(n_sites: usize, order: usize) -> f64 {
    (0..=order.min(n_sites))
        .map(|k| binomial(n_sites, k) * 15f64.powi(k as i32))
        .sum()
}

/// Probability mass of all configurations of order `<= order` when every
/// site fails with total probability `p`.
pub fn truncated_mass(n_sites: usize, order: usize, p: f64) -> f64 {
    (0..=order.min(n_sites))
        .map(|k| binomial(n_sites, k) * p.powi(k as i32) * (1.0 - p).powi((n_sites - k) as i32))
        .sum()
}

/// Calls `f(config, weight)` for every configuration of order `<= order`.
/// `probs[site][pauli]` are per-site fault probabilities; a site is fault
/// free with probability `1 - sum(probs[site])`. Configurations are visited
/// in a fixed order (by order, then lexicographically by site, then Pauli).
pub fn for_each_config(
    probs: &[[f64; 15]],
    order: usize,
    mut f: impl FnMut(&[(usize, usize)], f64),
) {
    let n = probs.len();
    let idle: Vec<f64> = probs.iter().map(|p| 1.0 - p.iter().sum::<f64>()).collect();
    let mut config: Vec<(usize, usize)> = Vec::new();
    for k in 0..=order.min(n) {
        let mut sites: Vec<usize> = (0..k).collect();
        loop {
            // weight of the fault-free remainder
            let mut rest = 1.0;
            for (s, q) in idle.iter().enumerate() {
                if !sites.contains(&s) {
                    rest *= q;
                }
            }
            let mut paulis = vec![0usize; k];
            loop {
                config.clear();
                let mut w = rest;
                for (i, &s) in sites.iter().enumerate() {
                    config.push((s, paulis[i]));
                    w *= probs[s][paulis[i]];
                }
                f(&config, w);
                let mut carry = true;
                let mut i = k;
                while carry && i > 0 {
                    i -= 1;
                    paulis[i] += 1;
                    if paulis[i] == 15 {
                        paulis[i] = 0;
                    } else {
                        carry = false;
                    }
                }
                if carry {
                    break;
                }
            }
            // next k-subset
            let mut i = k;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if sites[i] < n - k + i {
                    sites[i] += 1;
                    for j in i + 1..k {
                        sites[j] = sites[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
}
