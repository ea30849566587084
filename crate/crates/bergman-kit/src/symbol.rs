//! Bounded symbols on the polydisc as evaluable black boxes.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// A bounded function on the polydisc: an evaluation closure plus the
/// claimed sup bound (callers assert boundedness; nothing certifies it).
#[derive(Clone)]
pub struct Symbol {
    pub name: String,
    pub sup_bound: f64,
    eval: Arc<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("name", &self.name)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

impl Symbol {
    pub fn new(
        name: impl Into<String>,
        sup_bound: f64,
        eval: impl Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Symbol {
            name: name.into(),
            sup_bound,
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        (self.eval)(z)
    }

    pub fn constant(c: Complex64) -> Self {
        Symbol::new(format!("const({c})"), c.norm(), move |_| c)
    }

    pub fn one() -> Self {
        Symbol::constant(Complex64::new(1.0, 0.0))
    }

    /// `z_axis` as a symbol.
    pub fn coordinate(axis: usize) -> Self {
        Symbol::new(format!("z{}", axis + 1), 1.0, move |z| z[axis])
    }

    /// `Re z_axis`.
    pub fn re_coordinate(axis: usize) -> Self {
        Symbol::new(format!("re_z{}", axis + 1), 1.0, move |z| {
            Complex64::new(z[axis].re, 0.0)
        })
    }

    /// `|z_axis|^2`.
    pub fn abs_sq(axis: usize) -> Self {
        Symbol::new(format!("abs_sq_z{}", axis + 1), 1.0, move |z| {
            Complex64::new(z[axis].norm_sqr(), 0.0)
        })
    }

    /// `prod_l (1 - |z_l|^2)`.
    pub fn one_minus_abs_sq_product() -> Self {
        Symbol::new("one_minus_abs_sq", 1.0, |z| {
            Complex64::new(z.iter().map(|c| 1.0 - c.norm_sqr()).product(), 0.0)
        })
    }

    /// Conjugated symbol.
    pub fn conj(&self) -> Self {
        let inner = self.eval.clone();
        Symbol {
            name: format!("conj({})", self.name),
            sup_bound: self.sup_bound,
            eval: Arc::new(move |z| inner(z).conj()),
        }
    }

    /// Pointwise scaling.
    pub fn scale(&self, factor: Complex64) -> Self {
        let inner = self.eval.clone();
        Symbol {
            name: format!("{} * {factor}", self.name),
            sup_bound: self.sup_bound * factor.norm(),
            eval: Arc::new(move |z| factor * inner(z)),
        }
    }
}

/// Serializable description of the symbols the experiment runner knows how
/// to build.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolSpec {
    One,
    Constant { re: f64, im: f64 },
    Coordinate { axis: usize },
    ReCoordinate { axis: usize },
    AbsSq { axis: usize },
    OneMinusAbsSqProduct,
}

impl SymbolSpec {
    pub fn build(&self, dim: usize) -> Result<Symbol> {
        let check_axis = |axis: usize| {
            if axis >= dim {
                Err(Error::Config(format!(
                    "symbol axis {axis} out of range for dimension {dim}"
                )))
            } else {
                Ok(())
            }
        };
        Ok(match *self {
            SymbolSpec::One => Symbol::one(),
            SymbolSpec::Constant { re, im } => Symbol::constant(Complex64::new(re, im)),
            SymbolSpec::Coordinate { axis } => {
                check_axis(axis)?;
                Symbol::coordinate(axis)
            }
            SymbolSpec::ReCoordinate { axis } => {
                check_axis(axis)?;
                Symbol::re_coordinate(axis)
            }
            SymbolSpec::AbsSq { axis } => {
                check_axis(axis)?;
                Symbol::abs_sq(axis)
            }
            SymbolSpec::OneMinusAbsSqProduct => Symbol::one_minus_abs_sq_product(),
        })
    }
}
