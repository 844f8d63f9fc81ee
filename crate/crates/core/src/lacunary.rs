//! Lacunary sequences `θ = (k_r)` and their block decomposition.
//!
//! Blocks `J_r = (k_{r-1}, k_r]` are reported as inclusive index ranges
//! `[k_{r-1} + 1, k_r]`. The sequence entry at index 0 belongs to no `J_r`;
//! modulars that must account for it use [`LacunarySequence::layout`], which
//! prepends a synthetic block `r = 0` of length one.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Generator of `k_r`. In config form either `{"explicit": [...]}` or a
/// tagged rule such as `{"rule": "geometric", "q": 2.0, "c": 1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaRule {
    Explicit { explicit: Vec<u64> },
    Rule(GeneratedRule),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum GeneratedRule {
    /// `k_r = ceil(c q^r)` for `r >= 1`.
    Geometric { q: f64, c: f64 },
    /// `k_r = r^d`.
    Polynomial { d: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "ThetaRule")]
pub struct LacunarySequence {
    rule: ThetaRule,
}

impl From<LacunarySequence> for ThetaRule {
    fn from(t: LacunarySequence) -> Self {
        t.rule
    }
}

/// One block `J_r` as an inclusive index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub r: usize,
    pub start: usize,
    pub end: usize,
}

impl Block {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn range(&self) -> RangeInclusive<usize> {
        self.start..=self.end
    }
}

/// `k_r / k_{r-1}` as an unreduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthWarning {
    /// `h_r < h_{r-1}` past the check horizon.
    Decreasing { r: usize },
    /// `h_r` never grows past the check horizon, so `h_r -> infinity`
    /// is not evidenced.
    Constant { from: usize, to: usize },
}

impl LacunarySequence {
    pub fn new(rule: ThetaRule) -> Result<Self> {
        match &rule {
            ThetaRule::Explicit { explicit } => {
                if explicit.len() < 2 {
                    return Err(invalid("theta.explicit", "needs k_0 and at least one k_r"));
                }
                if explicit[0] != 0 {
                    return Err(Error::Lacunary {
                        r: 0,
                        reason: format!("k_0 must be 0, got {}", explicit[0]),
                    });
                }
                for r in 1..explicit.len() {
                    if explicit[r] <= explicit[r - 1] {
                        return Err(Error::Lacunary {
                            r,
                            reason: format!(
                                "k_r = {} is not greater than k_(r-1) = {}",
                                explicit[r],
                                explicit[r - 1]
                            ),
                        });
                    }
                }
            }
            ThetaRule::Rule(GeneratedRule::Geometric { q, c }) => {
                if !(q.is_finite() && *q > 1.0) {
                    return Err(invalid("theta.q", format!("must be > 1, got {q}")));
                }
                if !(c.is_finite() && *c > 0.0) {
                    return Err(invalid("theta.c", format!("must be > 0, got {c}")));
                }
            }
            ThetaRule::Rule(GeneratedRule::Polynomial { d }) => {
                if *d == 0 {
                    return Err(invalid("theta.d", "must be >= 1"));
                }
            }
        }
        Ok(Self { rule })
    }

    pub fn explicit(k: Vec<u64>) -> Result<Self> {
        Self::new(ThetaRule::Explicit { explicit: k })
    }

    pub fn geometric(q: f64, c: f64) -> Result<Self> {
        Self::new(ThetaRule::Rule(GeneratedRule::Geometric { q, c }))
    }

    pub fn polynomial(d: u32) -> Result<Self> {
        Self::new(ThetaRule::Rule(GeneratedRule::Polynomial { d }))
    }

    /// `k_r = 2^r`, the running example throughout the test suite.
    pub fn dyadic() -> Self {
        Self::geometric(2.0, 1.0).expect("valid rule")
    }

    /// `k_r = r`: every block is a singleton.
    pub fn singletons() -> Self {
        Self::polynomial(1).expect("valid rule")
    }

    pub fn rule(&self) -> &ThetaRule {
        &self.rule
    }

    fn raw_k(&self, r: usize) -> Result<u64> {
        if r == 0 {
            return Ok(0);
        }
        match &self.rule {
            ThetaRule::Explicit { explicit } => {
                explicit.get(r).copied().ok_or(Error::OutOfHorizon {
                    what: "theta",
                    index: r,
                    len: explicit.len(),
                })
            }
            ThetaRule::Rule(GeneratedRule::Geometric { q, c }) => {
                let v = (c * q.powi(r as i32)).ceil();
                if !(v.is_finite() && v < 2f64.powi(53)) {
                    return Err(Error::Lacunary {
                        r,
                        reason: format!("k_r = {v} overflows the index range"),
                    });
                }
                Ok(v as u64)
            }
            ThetaRule::Rule(GeneratedRule::Polynomial { d }) => (r as u64)
                .checked_pow(*d)
                .ok_or_else(|| Error::Lacunary {
                    r,
                    reason: "k_r overflows the index range".into(),
                }),
        }
    }

    /// `k_r`, checking strict increase against `k_{r-1}`.
    pub fn k(&self, r: usize) -> Result<usize> {
        let v = self.raw_k(r)?;
        if r > 0 {
            let prev = self.raw_k(r - 1)?;
            if v <= prev {
                return Err(Error::Lacunary {
                    r,
                    reason: format!("k_r = {v} is not greater than k_(r-1) = {prev}"),
                });
            }
        }
        Ok(v as usize)
    }

    /// Blocks `r = 1..=R`; their ranges tile `[1, k_R]`.
    pub fn blocks(&self, blocks: usize) -> Result<Vec<Block>> {
        if blocks == 0 {
            return Err(invalid("R", "block count must be >= 1"));
        }
        let mut out = Vec::with_capacity(blocks);
        let mut prev = 0usize;
        for r in 1..=blocks {
            let k = self.k(r)?;
            out.push(Block {
                r,
                start: prev + 1,
                end: k,
            });
            prev = k;
        }
        Ok(out)
    }

    /// Blocks used by modulars: the synthetic `r = 0` block `[0, 0]` when
    /// `include_k0` holds, followed by `J_1, ..., J_R`.
    pub fn layout(&self, blocks: usize, include_k0: bool) -> Result<Vec<Block>> {
        let mut out = Vec::with_capacity(blocks + 1);
        if include_k0 {
            out.push(Block {
                r: 0,
                start: 0,
                end: 0,
            });
        }
        out.extend(self.blocks(blocks)?);
        Ok(out)
    }

    pub fn h(&self, r: usize) -> Result<usize> {
        if r == 0 {
            return Err(invalid("r", "block lengths start at r = 1"));
        }
        Ok(self.k(r)? - self.k(r - 1)?)
    }

    /// `φ_r = k_r / k_{r-1}`, defined for `r >= 2`.
    pub fn ratio(&self, r: usize) -> Result<Ratio> {
        if r <= 1 {
            return Err(Error::UndefinedRatio(r));
        }
        Ok(Ratio {
            num: self.k(r)? as u64,
            den: self.k(r - 1)? as u64,
        })
    }

    /// Smallest `R` with `k_R >= index`, so that `index` lies in some block.
    pub fn blocks_covering(&self, index: usize) -> Result<usize> {
        let mut r = 1;
        while self.k(r)? < index {
            r += 1;
        }
        Ok(r)
    }

    /// Desk-scale proxy for `h_r -> infinity`: `h_r` should be
    /// nondecreasing for `r > check_from` and grow at least once.
    pub fn growth_warnings(&self, blocks: usize, check_from: usize) -> Result<Vec<GrowthWarning>> {
        let lens: Vec<usize> = self.blocks(blocks)?.iter().map(Block::len).collect();
        let start = check_from.max(1);
        let mut warnings = Vec::new();
        for r in start + 1..=blocks {
            if lens[r - 1] < lens[r - 2] {
                warnings.push(GrowthWarning::Decreasing { r });
            }
        }
        if start < blocks && lens[start - 1..].iter().all(|&h| h == lens[start - 1]) {
            warnings.push(GrowthWarning::Constant {
                from: start,
                to: blocks,
            });
        }
        Ok(warnings)
    }
}
