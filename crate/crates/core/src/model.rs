//! A validated model together with its dual constants, solver settings and a
//! per-`h` cache of dual slices and thresholds.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::dual::{self, CoefficientSet, DualConstants, DualSlice};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::params::{ModelParams, ValidatedParams, Variant};
use crate::thresholds::{self, ThresholdSet};

/// Numerical settings shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Largest habit level accepted; beyond it exponentials in the closed
    /// forms approach overflow.
    pub h_max: f64,
    /// Smallest habit level used when bracketing the bliss inverse.
    pub h_min: f64,
    /// Absolute wealth tolerance for inversions.
    pub abs_tol: f64,
    /// Relative wealth tolerance for inversions.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Tolerance on `ln y` in the dual inversion.
    pub y_tol: f64,
    /// Cached slices kept before the cache is flushed.
    pub cache_capacity: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            h_max: 200.0,
            h_min: 1e-6,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_iter: 200,
            y_tol: 1e-12,
            cache_capacity: 4096,
        }
    }
}

/// Dual solution and thresholds at one habit level.
#[derive(Debug, Clone, PartialEq)]
pub struct HSlice {
    pub dual: DualSlice<f64>,
    pub thresholds: ThresholdSet,
}

/// Entry point to every computation.
pub struct Model {
    params: ValidatedParams,
    consts: DualConstants,
    config: SolverConfig,
    cache: RwLock<HashMap<u64, Arc<HSlice>>>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("params", &self.params)
            .field("consts", &self.consts)
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl Clone for Model {
    fn clone(&self) -> Self {
        Self::from_validated(self.params, self.config).expect("constants already computed once")
    }
}

impl Model {
    pub fn new(params: &ModelParams) -> Result<Self> {
        Self::with_config(params, SolverConfig::default())
    }

    pub fn with_config(params: &ModelParams, config: SolverConfig) -> Result<Self> {
        Self::from_validated(params.validate()?, config)
    }

    pub fn from_validated(params: ValidatedParams, config: SolverConfig) -> Result<Self> {
        if !(config.h_max > 0.0 && config.h_min > 0.0 && config.h_min < config.h_max) {
            return Err(Error::ParamDomain(vec![format!(
                "solver requires 0 < h_min < h_max (got h_min = {}, h_max = {})",
                config.h_min, config.h_max
            )]));
        }
        let consts = dual::dual_constants(&params)?;
        Ok(Self {
            params,
            consts,
            config,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn params(&self) -> &ValidatedParams {
        &self.params
    }

    pub fn constants(&self) -> &DualConstants {
        &self.consts
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// True when the closed forms coincide with the `r = γ`, `φ ≡ 0` model.
    pub fn is_base_like(&self) -> bool {
        match self.params.variant {
            Variant::Base => true,
            Variant::GeneralRate => false,
            Variant::GeneralReference => self.params.phi.is_zero(),
        }
    }

    pub fn check_h(&self, h: f64) -> Result<()> {
        if h > 0.0 && h <= self.config.h_max {
            Ok(())
        } else {
            Err(Error::HRange {
                h,
                h_max: self.config.h_max,
            })
        }
    }

    /// Dual slice and thresholds at `h`, memoised.
    pub fn slice(&self, h: f64) -> Result<Arc<HSlice>> {
        self.check_h(h)?;
        let key = h.to_bits();
        if let Some(s) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(s));
        }
        let s = Arc::new(self.slice_uncached(h)?);
        let mut cache = self.cache.write().expect("cache lock");
        if cache.len() >= self.config.cache_capacity {
            cache.clear();
        }
        cache.insert(key, Arc::clone(&s));
        Ok(s)
    }

    /// Dual slice and thresholds at `h` without touching the cache.
    pub fn slice_uncached(&self, h: f64) -> Result<HSlice> {
        self.check_h(h)?;
        let dual = dual::dual_slice(&self.params, &self.consts, h)?;
        let thresholds = thresholds::thresholds_of_slice(&self.params, &self.consts, &dual);
        Ok(HSlice { dual, thresholds })
    }

    /// Dual slice carrying first and second derivatives in `h`.
    pub fn jet_slice(&self, h: f64) -> Result<DualSlice<Jet>> {
        self.check_h(h)?;
        dual::dual_slice(&self.params, &self.consts, Jet::variable(h))
    }

    pub fn coefficients(&self, h: f64) -> Result<CoefficientSet> {
        Ok(self.slice(h)?.dual.coefficient_set())
    }

    pub fn thresholds(&self, h: f64) -> Result<ThresholdSet> {
        Ok(self.slice(h)?.thresholds)
    }

    /// Number of cached slices, for diagnostics.
    pub fn cached_slices(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }
}
