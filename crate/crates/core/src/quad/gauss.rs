use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussRule {
    /// `n`-point rule by Newton iteration on `P_n`, nodes ascending.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "gauss rule needs at least one node");
        if n == 1 {
            return GaussRule { nodes: vec![0.0], weights: vec![2.0] };
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Shared, memoised rule.
    pub fn cached(n: usize) -> Arc<GaussRule> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("gauss cache poisoned");
        guard.entry(n).or_insert_with(|| Arc::new(GaussRule::new(n))).clone()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| (mid + half * x, half * w)).collect()
    }

    /// Composite rule with `pieces` equal panels on `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, pieces: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / pieces as f64;
        (0..pieces)
            .flat_map(|i| {
                let lo = a + i as f64 * h;
                let hi = if i + 1 == pieces { b } else { lo + h };
                self.mapped(lo, hi)
            })
            .collect()
    }
}
