//! Globally adaptive Gauss–Kronrod (7/15) quadrature over a union of segments.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Result;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Evaluations per panel.
pub(crate) const PANEL_EVALS: u64 = 15;

#[derive(Debug, Clone, Copy)]
struct Panel {
    tag: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    // Largest error first; ties broken by position so the schedule is deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.tag.cmp(&self.tag))
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone)]
pub(crate) struct Integration {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
    pub converged: bool,
    /// Every node evaluated, as `(tag, x, f(x))`, when sampling was requested.
    pub samples: Vec<(usize, f64, f64)>,
}

pub(crate) struct Integrator<'a> {
    f: &'a dyn Fn(usize, f64) -> Result<f64>,
    evaluations: u64,
    record: bool,
    samples: Vec<(usize, f64, f64)>,
}

impl<'a> Integrator<'a> {
    pub fn new(f: &'a dyn Fn(usize, f64) -> Result<f64>) -> Self {
        Self {
            f,
            evaluations: 0,
            record: false,
            samples: Vec::new(),
        }
    }

    pub fn recording(mut self) -> Self {
        self.record = true;
        self
    }

    fn panel(&mut self, tag: usize, a: f64, b: f64) -> Result<Panel> {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut fv = [0.0; 15];
        for (k, &x) in XGK.iter().enumerate() {
            if k == 7 {
                fv[7] = self.eval(tag, c)?;
            } else {
                fv[k] = self.eval(tag, c - h * x)?;
                fv[14 - k] = self.eval(tag, c + h * x)?;
            }
        }
        let mut kron = WGK[7] * fv[7];
        let mut gauss = WG[3] * fv[7];
        for k in 0..7 {
            let pair = fv[k] + fv[14 - k];
            kron += WGK[k] * pair;
            if k % 2 == 1 {
                gauss += WG[k / 2] * pair;
            }
        }
        Ok(Panel {
            tag,
            a,
            b,
            value: kron * h,
            error: ((kron - gauss) * h).abs(),
        })
    }

    fn eval(&mut self, tag: usize, x: f64) -> Result<f64> {
        self.evaluations += 1;
        let y = (self.f)(tag, x)?;
        if self.record {
            self.samples.push((tag, x, y));
        }
        Ok(y)
    }

    /// Integrates over `segments = [(tag, a, b)]` until the summed error estimate is at most `tol`
    /// or `budget` evaluations are spent. Returns the partition with the smallest error seen,
    /// so the reported error never grows with the budget.
    pub fn run(
        mut self,
        segments: &[(usize, f64, f64)],
        tol: f64,
        budget: u64,
    ) -> Result<Integration> {
        let mut heap = BinaryHeap::new();
        for &(tag, a, b) in segments {
            if b > a {
                heap.push(self.panel(tag, a, b)?);
            }
        }
        let totals = |heap: &BinaryHeap<Panel>| {
            // Sum in a fixed order so results do not depend on heap layout.
            let mut panels: Vec<&Panel> = heap.iter().collect();
            panels.sort_by(|p, q| p.tag.cmp(&q.tag).then(p.a.total_cmp(&q.a)));
            panels
                .iter()
                .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
        };
        let (mut value, mut error) = totals(&heap);
        let (mut best_value, mut best_error) = (value, error);
        while error > tol && self.evaluations + 2 * PANEL_EVALS <= budget {
            let worst = heap
                .pop()
                .expect("error is positive only with panels present");
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                // Panel cannot be split further in floating point.
                heap.push(Panel {
                    error: 0.0,
                    ..worst
                });
                break;
            }
            let left = self.panel(worst.tag, worst.a, mid)?;
            let right = self.panel(worst.tag, mid, worst.b)?;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            if heap.len() % 64 == 0 {
                (value, error) = totals(&heap);
            }
            if error < best_error {
                best_value = value;
                best_error = error;
            }
        }
        let (v, e) = totals(&heap);
        if e <= best_error {
            best_value = v;
            best_error = e;
        }
        Ok(Integration {
            value: best_value,
            error: best_error,
            evaluations: self.evaluations,
            converged: best_error <= tol,
            samples: self.samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let f = |_: usize, x: f64| Ok(x.powi(5) - 3.0 * x * x);
        let r = Integrator::new(&f)
            .run(&[(0, 0.0, 2.0)], 1e-12, 1000)
            .unwrap();
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-12);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn handles_kinks_by_subdivision() {
        let f = |_: usize, x: f64| Ok((x - 0.3).abs());
        let r = Integrator::new(&f)
            .run(&[(0, 0.0, 1.0)], 1e-10, 100_000)
            .unwrap();
        assert!(r.converged);
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-10);
    }

    #[test]
    fn reports_budget_exhaustion() {
        let f = |_: usize, x: f64| Ok(1.0 / x.sqrt());
        let r = Integrator::new(&f)
            .run(&[(0, 0.0, 1.0)], 1e-15, 60)
            .unwrap();
        assert!(!r.converged);
        assert!(r.evaluations <= 60);
    }
}
