//! Butcher tableaux for explicit Runge–Kutta methods.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Tableau {
    pub name: &'static str,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub b_hat: Option<Vec<f64>>,
    pub c: Vec<f64>,
    pub order: usize,
    pub embedded_order: Option<usize>,
}

const CONSISTENCY_TOL: f64 = 1e-14;

impl Tableau {
    /// Builds and validates an explicit tableau. Row `i` of `a` holds the
    /// `i` coefficients below the diagonal; `c` is taken as the row sums.
    pub fn new(
        name: &'static str,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        b_hat: Option<Vec<f64>>,
        order: usize,
        embedded_order: Option<usize>,
    ) -> Result<Self> {
        let s = b.len();
        if s == 0 || a.len() != s {
            return Err(Error::Tableau(format!(
                "{} rows for {} weights",
                a.len(),
                s
            )));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != i {
                return Err(Error::Tableau(format!(
                    "row {i} has {} entries; explicit schemes need exactly {i}",
                    row.len()
                )));
            }
        }
        let sum: f64 = b.iter().sum();
        if (sum - 1.0).abs() > CONSISTENCY_TOL {
            return Err(Error::Tableau(format!("weights sum to {sum}")));
        }
        if let Some(bh) = &b_hat {
            let sum: f64 = bh.iter().sum();
            if bh.len() != s || (sum - 1.0).abs() > CONSISTENCY_TOL {
                return Err(Error::Tableau(format!("embedded weights sum to {sum}")));
            }
        }
        if b_hat.is_some() != embedded_order.is_some() {
            return Err(Error::Tableau(
                "embedded weights and order must come together".into(),
            ));
        }
        let c = a.iter().map(|row| row.iter().sum()).collect();
        Ok(Self {
            name,
            a,
            b,
            b_hat,
            c,
            order,
            embedded_order,
        })
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Kutta's third-order method.
    pub fn rk3() -> Self {
        Self::new(
            "rk3",
            vec![vec![], vec![0.5], vec![-1.0, 2.0]],
            vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
            None,
            3,
            None,
        )
        .expect("valid tableau")
    }

    /// The classical fourth-order method.
    pub fn rk4() -> Self {
        Self::new(
            "rk4",
            vec![vec![], vec![0.5], vec![0.0, 0.5], vec![0.0, 0.0, 1.0]],
            vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            None,
            4,
            None,
        )
        .expect("valid tableau")
    }

    /// Dormand–Prince 5(4).
    pub fn dopri54() -> Self {
        Self::new(
            "dopri54",
            dopri_a(),
            DOPRI_B.to_vec(),
            Some(DOPRI_B_HAT.to_vec()),
            5,
            Some(4),
        )
        .expect("valid tableau")
    }

    /// The fifth-order member of Dormand–Prince 5(4), without the estimate.
    pub fn dopri5() -> Self {
        Self::new("dopri5", dopri_a(), DOPRI_B.to_vec(), None, 5, None).expect("valid tableau")
    }
}

const DOPRI_B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

const DOPRI_B_HAT: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dopri_a() -> Vec<Vec<f64>> {
    vec![
        vec![],
        vec![1.0 / 5.0],
        vec![3.0 / 40.0, 9.0 / 40.0],
        vec![44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
        vec![
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
        ],
        vec![
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
        ],
        DOPRI_B[..6].to_vec(),
    ]
}
