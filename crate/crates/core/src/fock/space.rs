use std::fmt;

use crate::error::{Error, Result};

pub const MODE_COUNT: usize = 4;

/// Default cap on the composite dimension accepted by [`HilbertSpace::new`].
pub const DEFAULT_DIMENSION_LIMIT: usize = 200_000;

/// The four bosonic modes, in the global ordering used by every module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Opt1,
    Opt2,
    Mec1,
    Mec2,
}

impl Mode {
    pub const ALL: [Mode; MODE_COUNT] = [Mode::Opt1, Mode::Opt2, Mode::Mec1, Mode::Mec2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::Opt1 => "opt1",
            Mode::Opt2 => "opt2",
            Mode::Mec1 => "mec1",
            Mode::Mec2 => "mec2",
        }
    }

    pub fn is_optical(self) -> bool {
        matches!(self, Mode::Opt1 | Mode::Opt2)
    }
}

impl TryFrom<usize> for Mode {
    type Error = Error;

    fn try_from(index: usize) -> Result<Self> {
        Mode::ALL
            .get(index)
            .copied()
            .ok_or(Error::InvalidMode(index))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One of the two nanobeams; each hosts one optical and one mechanical mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nanobeam {
    One,
    Two,
}

impl Nanobeam {
    pub const BOTH: [Nanobeam; 2] = [Nanobeam::One, Nanobeam::Two];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn optical(self) -> Mode {
        match self {
            Nanobeam::One => Mode::Opt1,
            Nanobeam::Two => Mode::Opt2,
        }
    }

    pub fn mechanical(self) -> Mode {
        match self {
            Nanobeam::One => Mode::Mec1,
            Nanobeam::Two => Mode::Mec2,
        }
    }
}

impl TryFrom<usize> for Nanobeam {
    type Error = Error;

    /// Accepts the physical labels 1 and 2.
    fn try_from(label: usize) -> Result<Self> {
        match label {
            1 => Ok(Nanobeam::One),
            2 => Ok(Nanobeam::Two),
            other => Err(Error::InvalidParameter(format!(
                "nanobeam label must be 1 or 2, got {other}"
            ))),
        }
    }
}

/// Occupation numbers of the four modes, ordered as [`Mode::ALL`].
pub type Occupations = [usize; MODE_COUNT];

/// Truncated Fock space of the four modes.
///
/// Composite indices are mixed-radix with `opt1` most significant, so the
/// vacuum is index 0 and `mec2` has unit stride.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    cutoffs: Occupations,
    strides: [usize; MODE_COUNT],
    dim: usize,
}

impl HilbertSpace {
    pub fn new(cutoffs: Occupations) -> Result<Self> {
        Self::with_limit(cutoffs, DEFAULT_DIMENSION_LIMIT)
    }

    pub fn with_limit(cutoffs: Occupations, limit: usize) -> Result<Self> {
        let product: u128 = cutoffs.iter().map(|&c| c as u128 + 1).product();
        if product > limit as u128 {
            return Err(Error::Capacity {
                cutoffs,
                product,
                limit,
            });
        }
        let mut strides = [0; MODE_COUNT];
        let mut stride = 1;
        for k in (0..MODE_COUNT).rev() {
            strides[k] = stride;
            stride *= cutoffs[k] + 1;
        }
        Ok(Self {
            cutoffs,
            strides,
            dim: product as usize,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoffs(&self) -> Occupations {
        self.cutoffs
    }

    pub fn cutoff(&self, mode: Mode) -> usize {
        self.cutoffs[mode.index()]
    }

    pub fn stride(&self, mode: Mode) -> usize {
        self.strides[mode.index()]
    }

    /// Occupation of `mode` in composite basis state `index`.
    pub fn occupation(&self, index: usize, mode: Mode) -> usize {
        let k = mode.index();
        (index / self.strides[k]) % (self.cutoffs[k] + 1)
    }

    pub fn occupations(&self, index: usize) -> Occupations {
        let mut occ = [0; MODE_COUNT];
        for (k, slot) in occ.iter_mut().enumerate() {
            *slot = (index / self.strides[k]) % (self.cutoffs[k] + 1);
        }
        occ
    }

    pub fn index_of(&self, occ: &Occupations) -> Result<usize> {
        let mut index = 0;
        for k in 0..MODE_COUNT {
            if occ[k] > self.cutoffs[k] {
                return Err(Error::InvalidState(format!(
                    "occupation {} of {} exceeds cutoff {}",
                    occ[k],
                    Mode::ALL[k],
                    self.cutoffs[k]
                )));
            }
            index += occ[k] * self.strides[k];
        }
        Ok(index)
    }

    /// A space whose cutoffs are at least those of `self` in every mode.
    pub fn contains(&self, other: &HilbertSpace) -> bool {
        self.cutoffs
            .iter()
            .zip(other.cutoffs.iter())
            .all(|(a, b)| a >= b)
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} (dim {})", self.cutoffs, self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dimensions() {
        assert_eq!(HilbertSpace::new([1, 1, 1, 1]).unwrap().dim(), 16);
        assert_eq!(HilbertSpace::new([3, 3, 2, 2]).unwrap().dim(), 144);
        assert_eq!(HilbertSpace::new([0, 0, 0, 0]).unwrap().dim(), 1);
    }

    #[test]
    fn capacity_error_names_product() {
        let err = HilbertSpace::new([100, 100, 100, 100]).unwrap_err();
        match err {
            Error::Capacity { product, limit, .. } => {
                assert_eq!(product, 101u128.pow(4));
                assert_eq!(limit, DEFAULT_DIMENSION_LIMIT);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(HilbertSpace::with_limit([3, 3, 3, 3], 255).is_err());
        assert!(HilbertSpace::with_limit([3, 3, 3, 3], 256).is_ok());
    }

    #[test]
    fn invalid_mode_index() {
        assert!(matches!(Mode::try_from(4), Err(Error::InvalidMode(4))));
        assert_eq!(Mode::try_from(2).unwrap(), Mode::Mec1);
    }

    #[test]
    fn vacuum_is_index_zero() {
        let space = HilbertSpace::new([2, 1, 3, 2]).unwrap();
        assert_eq!(space.index_of(&[0, 0, 0, 0]).unwrap(), 0);
        assert!(space.index_of(&[3, 0, 0, 0]).is_err());
    }

    proptest! {
        #[test]
        fn index_map_is_bijective(c in prop::array::uniform4(0usize..4)) {
            let space = HilbertSpace::new(c).unwrap();
            let mut seen = vec![false; space.dim()];
            for i in 0..space.dim() {
                let occ = space.occupations(i);
                for m in Mode::ALL {
                    prop_assert!(occ[m.index()] <= space.cutoff(m));
                    prop_assert_eq!(occ[m.index()], space.occupation(i, m));
                }
                let j = space.index_of(&occ).unwrap();
                prop_assert_eq!(i, j);
                prop_assert!(!seen[j]);
                seen[j] = true;
            }
        }
    }
}
