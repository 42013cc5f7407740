//! The nine-parameter crystal geometry, its box bounds, and the three gap
//! constraints that keep the shape physically realizable.

use rand::Rng;

use crate::error::{Error, Result};

/// Number of free geometric parameters.
pub const N_DESIGN_PARAMS: usize = 9;

/// One candidate geometry. All lengths are in nanometers: the hole pitch
/// `d`, the inner/outer heights and widths of the main cut (`h_i`, `w_i`,
/// `h_o`, `w_o`), and the inner/outer heights and widths of the coupling cut
/// (`h_ic`, `w_ic`, `h_oc`, `w_oc`). The fixed lattice constant, rail width,
/// and slab thickness are not searched and live in the evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignVector {
    pub d: f64,
    pub h_i: f64,
    pub w_i: f64,
    pub h_o: f64,
    pub w_o: f64,
    pub h_ic: f64,
    pub w_ic: f64,
    pub h_oc: f64,
    pub w_oc: f64,
}

impl DesignVector {
    /// Parameter values in canonical order.
    pub fn to_array(&self) -> [f64; N_DESIGN_PARAMS] {
        [
            self.d, self.h_i, self.w_i, self.h_o, self.w_o, self.h_ic, self.w_ic, self.h_oc,
            self.w_oc,
        ]
    }

    /// Build from canonical-order values.
    pub fn from_array(a: [f64; N_DESIGN_PARAMS]) -> Self {
        Self {
            d: a[0],
            h_i: a[1],
            w_i: a[2],
            h_o: a[3],
            w_o: a[4],
            h_ic: a[5],
            w_ic: a[6],
            h_oc: a[7],
            w_oc: a[8],
        }
    }

    /// Canonical parameter names, matching [`DesignVector::to_array`] order.
    pub fn names() -> [&'static str; N_DESIGN_PARAMS] {
        [
            "d", "h_i", "w_i", "h_o", "w_o", "h_ic", "w_ic", "h_oc", "w_oc",
        ]
    }

    /// Every length multiplied by `factor` (uniform geometric scaling).
    pub fn scaled_by(&self, factor: f64) -> Self {
        let mut a = self.to_array();
        for v in &mut a {
            *v *= factor;
        }
        Self::from_array(a)
    }

    /// Euclidean distance to another design, nm.
    pub fn distance(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Box bounds plus the minimum realizable gap between paired edges. The
/// feasible set is the box intersected with
///
/// * `h_o - h_i >= min_gap`
/// * `w_o / 2 - w_i / 2 >= min_gap`
/// * `h_oc - h_ic >= min_gap`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignBounds {
    /// Lower box bounds, canonical order, nm.
    pub lower: [f64; N_DESIGN_PARAMS],
    /// Upper box bounds, canonical order, nm.
    pub upper: [f64; N_DESIGN_PARAMS],
    /// Minimum edge-to-edge gap, nm.
    pub min_gap: f64,
}

/// The gap-constrained index pairs `(inner, outer, gap multiplier)`: widths
/// are center-symmetric, so their edge gap doubles in the parameter.
const GAP_PAIRS: [(usize, usize, f64); 3] = [(1, 3, 1.0), (2, 4, 2.0), (5, 7, 1.0)];

impl DesignBounds {
    /// Build bounds, checking that the box is non-empty and wide enough to
    /// admit every gap constraint.
    pub fn new(
        lower: [f64; N_DESIGN_PARAMS],
        upper: [f64; N_DESIGN_PARAMS],
        min_gap: f64,
    ) -> Result<Self> {
        Error::check_positive("min_gap", min_gap)?;
        for i in 0..N_DESIGN_PARAMS {
            Error::check_positive(DesignVector::names()[i], lower[i])?;
            if !(upper[i] > lower[i]) || !upper[i].is_finite() {
                return Err(Error::InvalidBounds(format!(
                    "{}: upper bound {} must exceed lower bound {}",
                    DesignVector::names()[i],
                    upper[i],
                    lower[i]
                )));
            }
        }
        for (i, o, mult) in GAP_PAIRS {
            if upper[o] - lower[i] < mult * min_gap {
                return Err(Error::InvalidBounds(format!(
                    "no room for a {} nm gap between {} and {}",
                    min_gap,
                    DesignVector::names()[i],
                    DesignVector::names()[o]
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            min_gap,
        })
    }

    /// A generous default search box for sub-micron crystal geometries.
    pub fn reference() -> Self {
        Self::new(
            [50.0, 100.0, 100.0, 200.0, 250.0, 50.0, 50.0, 150.0, 50.0],
            [300.0, 500.0, 500.0, 700.0, 900.0, 400.0, 400.0, 600.0, 500.0],
            60.0,
        )
        .expect("reference bounds are feasible")
    }

    /// Half-open check of the box alone.
    pub fn in_box(&self, design: &DesignVector) -> bool {
        design
            .to_array()
            .iter()
            .enumerate()
            .all(|(i, &v)| v >= self.lower[i] && v <= self.upper[i])
    }

    /// Full feasibility: box and every gap constraint.
    pub fn is_feasible(&self, design: &DesignVector) -> bool {
        self.check(design).is_ok()
    }

    /// Detailed feasibility check naming the first violated constraint.
    pub fn check(&self, design: &DesignVector) -> Result<()> {
        let a = design.to_array();
        for (i, &v) in a.iter().enumerate() {
            if !v.is_finite() || v < self.lower[i] || v > self.upper[i] {
                return Err(Error::InfeasibleStart(format!(
                    "{} = {} nm is outside [{}, {}]",
                    DesignVector::names()[i],
                    v,
                    self.lower[i],
                    self.upper[i]
                )));
            }
        }
        for (i, o, mult) in GAP_PAIRS {
            let gap = mult * self.min_gap;
            if a[o] - a[i] < gap - 1e-9 {
                return Err(Error::InfeasibleStart(format!(
                    "{} - {} = {} nm is below the {} nm minimum",
                    DesignVector::names()[o],
                    DesignVector::names()[i],
                    a[o] - a[i],
                    gap
                )));
            }
        }
        Ok(())
    }

    /// Deterministic projection of an arbitrary point into the feasible set:
    /// clamp every coordinate into the box, then close each violated gap by
    /// pushing its two edges apart symmetrically about their midpoint
    /// (re-clamped so both stay in the box). The result always satisfies
    /// [`DesignBounds::check`].
    pub fn repair(&self, design: &DesignVector) -> DesignVector {
        let mut a = design.to_array();
        for (i, v) in a.iter_mut().enumerate() {
            if !v.is_finite() {
                *v = self.lower[i];
            }
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
        for (i, o, mult) in GAP_PAIRS {
            let gap = mult * self.min_gap;
            if a[o] - a[i] < gap {
                let mid = 0.5 * (a[i] + a[o]);
                // The inner edge may sit no higher than upper[o] - gap, which
                // bounds-construction guarantees is reachable.
                let inner_cap = self.upper[i].min(self.upper[o] - gap);
                a[i] = (mid - 0.5 * gap).clamp(self.lower[i], inner_cap);
                a[o] = (mid + 0.5 * gap).clamp((a[i] + gap).max(self.lower[o]), self.upper[o]);
            }
        }
        DesignVector::from_array(a)
    }

    /// Uniform sample of the box, repaired into the feasible set. Gap repair
    /// moves only the violating pairs, so the sample stays well spread.
    pub fn sample_feasible<R: Rng + ?Sized>(&self, rng: &mut R) -> DesignVector {
        let mut a = [0.0; N_DESIGN_PARAMS];
        for i in 0..N_DESIGN_PARAMS {
            a[i] = rng.random_range(self.lower[i]..=self.upper[i]);
        }
        self.repair(&DesignVector::from_array(a))
    }

    /// Length of the box diagonal, nm — the natural scale for `tol_x`.
    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(self.upper)
            .map(|(l, u)| (u - l) * (u - l))
            .sum::<f64>()
            .sqrt()
    }

    /// Center of the box, gap-repaired.
    pub fn center(&self) -> DesignVector {
        let mut a = [0.0; N_DESIGN_PARAMS];
        for i in 0..N_DESIGN_PARAMS {
            a[i] = 0.5 * (self.lower[i] + self.upper[i]);
        }
        self.repair(&DesignVector::from_array(a))
    }
}
