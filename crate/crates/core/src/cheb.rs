//! Chebyshev series on an interval: interpolation of a smooth function at
//! Chebyshev–Lobatto nodes, Clenshaw evaluation, and exact term-wise
//! antidifferentiation.
//!
//! Used to turn closed-form second derivatives (or mollified integrands) into
//! globally smooth, fast-to-evaluate values and first derivatives without
//! re-running quadrature per evaluation. Integration happens in coefficient
//! space, so a series and its antiderivative are consistent to rounding.

/// A truncated Chebyshev expansion `f(x) = sum_k c[k] T_k(t)` with
/// `t = (2x - a - b) / (b - a)` on `[a, b]`.
#[derive(Debug, Clone)]
pub struct ChebSeries {
    a: f64,
    b: f64,
    c: Vec<f64>,
}

impl ChebSeries {
    /// Interpolates `f` at `n + 1` Chebyshev–Lobatto nodes of `[a, b]`.
    ///
    /// The discrete cosine transform is done naively; fits happen once per
    /// profile construction, so `O(n^2)` is irrelevant.
    pub fn fit(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Self {
        assert!(n >= 2 && b > a);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let nodes: Vec<f64> = (0..=n)
            .map(|j| mid + half * (std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        let fv: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        let mut c = vec![0.0; n + 1];
        for (k, ck) in c.iter_mut().enumerate() {
            let mut acc = 0.5 * (fv[0] + if k % 2 == 0 { fv[n] } else { -fv[n] });
            for (j, &fj) in fv.iter().enumerate().take(n).skip(1) {
                acc += fj * (std::f64::consts::PI * (j * k) as f64 / n as f64).cos();
            }
            *ck = 2.0 * acc / n as f64;
        }
        c[0] *= 0.5;
        c[n] *= 0.5;
        ChebSeries { a, b, c }
    }

    /// Clenshaw evaluation at `x` (clamped to `[a, b]`).
    pub fn eval(&self, x: f64) -> f64 {
        let t = ((2.0 * x - self.a - self.b) / (self.b - self.a)).clamp(-1.0, 1.0);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &ck in self.c.iter().skip(1).rev() {
            let tmp = 2.0 * t * b1 - b2 + ck;
            b2 = b1;
            b1 = tmp;
        }
        t * b1 - b2 + self.c[0]
    }

    /// Term-wise antiderivative `F` with `F(a) = value_at_a`.
    pub fn antiderivative(&self, value_at_a: f64) -> ChebSeries {
        let half = 0.5 * (self.b - self.a);
        let n = self.c.len();
        let mut d = vec![0.0; n + 1];
        for k in 1..=n {
            // c[0] enters the k = 1 term with weight 2 (T_0 integrates to T_1
            // alone, without the 1/2 split of the higher recurrence).
            let lo = if k == 1 { 2.0 * self.c[0] } else { self.c[k - 1] };
            let hi = if k + 1 < n { self.c[k + 1] } else { 0.0 };
            d[k] = half * (lo - hi) / (2.0 * k as f64);
        }
        // T_k(-1) = (-1)^k pins the integration constant at the left endpoint.
        let mut at_a = 0.0;
        for (k, &dk) in d.iter().enumerate().skip(1) {
            at_a += if k % 2 == 0 { dk } else { -dk };
        }
        d[0] = value_at_a - at_a;
        ChebSeries {
            a: self.a,
            b: self.b,
            c: d,
        }
    }

    pub fn lo(&self) -> f64 {
        self.a
    }

    pub fn hi(&self) -> f64 {
        self.b
    }
}

/// Two Chebyshev pieces split at the interval midpoint.
///
/// The g-quotient steps used for gluing concentrate their rise symmetrically
/// around the midpoint; splitting there puts the node clustering of both
/// pieces exactly on the sharp feature, which keeps narrow mollifier widths
/// representable.
#[derive(Debug, Clone)]
pub struct ChebPair {
    left: ChebSeries,
    right: ChebSeries,
    mid: f64,
}

impl ChebPair {
    pub fn fit(f: impl Fn(f64) -> f64, a: f64, b: f64, n_per_piece: usize) -> Self {
        let mid = 0.5 * (a + b);
        ChebPair {
            left: ChebSeries::fit(&f, a, mid, n_per_piece),
            right: ChebSeries::fit(&f, mid, b, n_per_piece),
            mid,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.mid {
            self.left.eval(x)
        } else {
            self.right.eval(x)
        }
    }

    /// Antiderivative with value `value_at_a` at the left endpoint; the right
    /// piece is pinned to the left piece's value at the midpoint.
    pub fn antiderivative(&self, value_at_a: f64) -> ChebPair {
        let left = self.left.antiderivative(value_at_a);
        let right = self.right.antiderivative(left.eval(self.mid));
        ChebPair {
            left,
            right,
            mid: self.mid,
        }
    }
}
