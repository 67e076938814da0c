//! Confluent hypergeometric function with a non-positive integer first
//! argument, `1F1(-n; b; x)`, which is a polynomial of degree `n` in `x`.

/// Upper bound on `n` accepted by [`confluent_1f1_neg_int`].
pub const MAX_DEGREE: u64 = 1_000_000;

/// Above this largest-term magnitude the series loses more digits than
/// double-double arithmetic carries, and the three-term recurrence in `n`
/// is used instead.
const MAX_LN_TERM: f64 = 55.0;

/// `1F1(-n; b; x) = sum_{k=0}^{n} (-n)_k x^k / ((b)_k k!)`.
///
/// The finite series is summed in double-double arithmetic, which keeps full
/// double precision near the polynomial's zeros where the alternating terms
/// cancel. When the terms are too large for that (large `n x`), the stable
/// forward recurrence `(n+b) M_{n+1} = (2n+b-x) M_n - n M_{n-1}` is used.
///
/// # Panics
///
/// If `b == 0` or `n` exceeds [`MAX_DEGREE`].
pub fn confluent_1f1_neg_int(n: u64, b: u32, x: f64) -> f64 {
    assert!(b > 0, "1F1(-n; b; x) requires b >= 1");
    assert!(n <= MAX_DEGREE, "degree {n} exceeds {MAX_DEGREE}");
    if n == 0 || x == 0.0 {
        return 1.0;
    }
    if largest_ln_term(n, b, x) > MAX_LN_TERM {
        recurrence_in_degree(n, b, x)
    } else {
        series_double_double(n, b, x)
    }
}

fn term_ratio(k: u64, n: u64, b: u32, x: f64) -> f64 {
    (n - k) as f64 * x / ((b as f64 + k as f64) * (k as f64 + 1.0))
}

fn largest_ln_term(n: u64, b: u32, x: f64) -> f64 {
    let mut ln_t: f64 = 0.0;
    let mut ln_max: f64 = 0.0;
    for k in 0..n {
        let r = term_ratio(k, n, b, x);
        if r < 1.0 {
            break;
        }
        ln_t += r.ln();
        ln_max = ln_max.max(ln_t);
    }
    ln_max
}

fn series_double_double(n: u64, b: u32, x: f64) -> f64 {
    let mut term = DoubleDouble::from(1.0);
    let mut sum = DoubleDouble::from(1.0);
    let bf = b as f64;
    for k in 0..n {
        let kf = k as f64;
        // (k - n) and (b + k)(k + 1) are exact integers in f64 for n <= 1e6.
        term = term
            .mul_f64(kf - n as f64)
            .mul_f64(x)
            .div_f64((bf + kf) * (kf + 1.0));
        sum = sum.add(term);
        if term.hi == 0.0 {
            break;
        }
        if term_ratio(k + 1, n, b, x) < 1.0 && term.hi.abs() < 1e-34 * sum.hi.abs() {
            break;
        }
    }
    sum.hi + sum.lo
}

fn recurrence_in_degree(n: u64, b: u32, x: f64) -> f64 {
    let bf = b as f64;
    let mut prev = 1.0;
    let mut cur = 1.0 - x / bf;
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + bf - x) * cur - mf * prev) / (mf + bf);
        prev = cur;
        cur = next;
    }
    cur
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        // remainder self - q1 * b, exactly
        let (p, e) = two_prod(q1, b);
        let (s, f) = two_sum(self.hi, -p);
        let r = s + (f - e + self.lo);
        let q2 = r / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }
}
