use nalgebra::{DMatrix, DVector};

/// Least-squares fit through the pseudo-inverse, robust to rank deficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta: DVector<f64>,
    /// Standard errors; NaN for columns the design cannot identify.
    pub std_errors: DVector<f64>,
    pub rss: f64,
    pub rank: usize,
    pub nobs: usize,
    pub df_resid: usize,
}

impl OlsFit {
    pub fn t_value(&self, j: usize) -> f64 {
        self.beta[j] / self.std_errors[j]
    }

    pub fn sigma2(&self) -> f64 {
        self.rss / self.df_resid as f64
    }
}

/// Relative singular-value cutoff used for rank decisions.
const RANK_TOL: f64 = 1e-10;

/// Fits `y = X beta`; `x` has one row per observation.
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> OlsFit {
    let n = x.nrows();
    let p = x.ncols();
    if p == 0 {
        let rss = y.dot(y);
        return OlsFit {
            beta: DVector::zeros(0),
            std_errors: DVector::zeros(0),
            rss,
            rank: 0,
            nobs: n,
            df_resid: n,
        };
    }
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = RANK_TOL * smax * n.max(p) as f64;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");

    // beta = V S^+ U' y and (X'X)^+ = V S^-2 V'.
    let mut beta = DVector::zeros(p);
    let mut xtx_pinv = DMatrix::zeros(p, p);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol {
            continue;
        }
        let vk = v_t.row(k).transpose();
        let coef = u.column(k).dot(y) / s;
        beta += &vk * coef;
        xtx_pinv += &vk * vk.transpose() / (s * s);
    }
    let resid = y - x * &beta;
    let rss = resid.dot(&resid);
    let df_resid = n.saturating_sub(rank);
    let sigma2 = if df_resid > 0 { rss / df_resid as f64 } else { f64::NAN };
    let std_errors = DVector::from_iterator(p, (0..p).map(|j| (sigma2 * xtx_pinv[(j, j)]).sqrt()));
    OlsFit { beta, std_errors, rss, rank, nobs: n, df_resid }
}
