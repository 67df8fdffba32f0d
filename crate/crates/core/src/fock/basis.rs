use crate::prelude::*;

/// Default upper bound on the number of basis states.
pub const DEFAULT_DIMENSION_CAP: usize = 200_000;

/// Occupation-number basis of the symmetric `N`-boson space over `M`
/// modes, in descending lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    particles: usize,
    modes: usize,
    occ: Vec<u8>,
    // binom[r][c] = C(r, c)
    binom: Vec<Vec<u64>>,
}

/// `C(N + M − 1, N)`, exact.
pub fn sector_dimension(particles: usize, modes: usize) -> u128 {
    if modes == 0 {
        return u128::from(particles == 0);
    }
    let mut d: u128 = 1;
    for i in 1..=particles as u128 {
        d = d * (modes as u128 - 1 + i) / i;
    }
    d
}

/// Public constructor: requires `N ≥ 1`, `M ≥ 2`.
pub fn enumerate_basis(particles: usize, modes: usize) -> Result<FockBasis> {
    if particles < 1 || modes < 2 {
        return Err(Error::InvalidParameter(format!(
            "need N >= 1 and M >= 2, got N = {particles}, M = {modes}"
        )));
    }
    FockBasis::with_cap(particles, modes, DEFAULT_DIMENSION_CAP)
}

impl FockBasis {
    /// Any sector with `M ≥ 1`, including `N = 0`, under the default cap.
    pub fn new(particles: usize, modes: usize) -> Result<Self> {
        Self::with_cap(particles, modes, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(particles: usize, modes: usize, cap: usize) -> Result<Self> {
        if modes < 1 || particles > u8::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "unsupported sector N = {particles}, M = {modes}"
            )));
        }
        let dim = sector_dimension(particles, modes);
        if dim > cap as u128 {
            return Err(Error::DimensionCap {
                particles,
                modes,
                dim,
                cap,
            });
        }
        let rows = particles + modes + 1;
        let mut binom = vec![vec![0u64; rows]; rows];
        for r in 0..rows {
            binom[r][0] = 1;
            for c in 1..=r {
                binom[r][c] = binom[r - 1][c - 1] + if c < r { binom[r - 1][c] } else { 0 };
            }
        }
        let mut occ = Vec::with_capacity(dim as usize * modes);
        let mut cur = vec![0u8; modes];
        fill(&mut occ, &mut cur, 0, particles);
        debug_assert_eq!(occ.len(), dim as usize * modes);
        Ok(Self {
            particles,
            modes,
            occ,
            binom,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        if self.modes == 0 {
            return 1;
        }
        self.occ.len() / self.modes
    }

    /// Occupation numbers of state `i`.
    pub fn occupation(&self, i: usize) -> &[u8] {
        &self.occ[i * self.modes..(i + 1) * self.modes]
    }

    /// Index of an occupation vector; `None` if it does not belong to this
    /// sector.
    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        if occ.len() != self.modes
            || occ.iter().map(|&n| n as usize).sum::<usize>() != self.particles
        {
            return None;
        }
        Some(self.rank(occ))
    }

    // Number of states preceding `occ`: at each mode, count completions
    // with a larger occupation there (hockey-stick identity).
    pub(crate) fn rank(&self, occ: &[u8]) -> usize {
        let mut rem = self.particles;
        let mut r = 0usize;
        for i in 0..self.modes.saturating_sub(1) {
            let o = occ[i] as usize;
            let tail = self.modes - i - 1;
            if rem > o {
                r += self.binom[rem - o - 1 + tail][tail] as usize;
            }
            rem -= o;
        }
        r
    }
}

fn fill(out: &mut Vec<u8>, cur: &mut [u8], pos: usize, rem: usize) {
    let m = cur.len();
    if pos + 1 == m {
        cur[pos] = rem as u8;
        out.extend_from_slice(cur);
        return;
    }
    for v in (0..=rem).rev() {
        cur[pos] = v as u8;
        fill(out, cur, pos + 1, rem - v);
    }
    cur[pos] = 0;
}
