//! Reproducible sampling of Rayleigh channels and Haar-distributed
//! orthonormal precoder matrices.
//!
//! Every draw is a pure function of a [`StreamSeed`]. Substreams use the
//! ChaCha stream counter, so trial `t` of a run is reproducible in isolation
//! and independent of scheduling or thread count.

use ndarray::{s, Array2, ArrayView1, ArrayView2, ArrayViewMut1, ShapeBuilder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::config::ComplexScalar;

/// Identifies one deterministic random stream: a master seed shared by the
/// whole run plus a substream index (ChaCha stream counter).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamSeed {
    pub master_seed: u64,
    pub substream_index: u64,
}

impl StreamSeed {
    pub fn new(master_seed: u64, substream_index: u64) -> Self {
        Self {
            master_seed,
            substream_index,
        }
    }

    /// Generator for this substream. Distinct indices select distinct ChaCha
    /// streams under the same key, which are cryptographically independent.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.substream_index);
        rng
    }
}

/// Counter-based substream derivation: (master_seed, trial) -> stream.
pub fn substream(master_seed: u64, trial: u64) -> StreamSeed {
    StreamSeed::new(master_seed, trial)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot draw {n_cols} orthonormal columns in dimension {n_tx}")]
pub struct DimensionError {
    pub n_tx: usize,
    pub n_cols: usize,
}

/// One Rayleigh channel realization H with i.i.d. CN(0,1) entries,
/// rows indexed by receive antenna.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMatrix {
    entries: Array2<ComplexScalar>,
}

impl ChannelMatrix {
    /// Wraps an explicit realization (rows = receive antennas). Entries must
    /// be finite.
    pub fn from_entries(entries: Array2<ComplexScalar>) -> Self {
        assert!(
            entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            "channel entries must be finite"
        );
        Self { entries }
    }

    pub fn n_rx(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.entries.ncols()
    }

    /// Channel row of one receive antenna (length N_t).
    pub fn row(&self, r: usize) -> ArrayView1<'_, ComplexScalar> {
        self.entries.row(r)
    }

    pub fn entries(&self) -> ArrayView2<'_, ComplexScalar> {
        self.entries.view()
    }
}

/// N_t x (N*D) matrix of orthonormal precoding vectors, partitioned into D
/// groups of N columns (group d serves transmission slot d).
#[derive(Clone, Debug, PartialEq)]
pub struct PrecoderMatrix {
    columns: Array2<ComplexScalar>,
    n_beams: usize,
    n_slots: usize,
}

impl PrecoderMatrix {
    /// Wraps explicit precoding vectors. Panics if the column count is not
    /// `n_beams * n_slots` or the columns are not orthonormal to 1e-10.
    pub fn from_columns(columns: Array2<ComplexScalar>, n_beams: usize, n_slots: usize) -> Self {
        assert_eq!(columns.ncols(), n_beams * n_slots);
        let p = Self {
            columns,
            n_beams,
            n_slots,
        };
        let defect = p.orthonormality_defect();
        assert!(
            defect < 1e-10,
            "columns not orthonormal (defect {defect:.3e})"
        );
        p
    }

    pub fn n_tx(&self) -> usize {
        self.columns.nrows()
    }

    pub fn n_beams(&self) -> usize {
        self.n_beams
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn n_cols(&self) -> usize {
        self.columns.ncols()
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, ComplexScalar> {
        self.columns.column(j)
    }

    /// Columns of precoder group `d` (slot index, 0-based).
    pub fn group(&self, d: usize) -> ArrayView2<'_, ComplexScalar> {
        let lo = d * self.n_beams;
        self.columns.slice(s![.., lo..lo + self.n_beams])
    }

    pub fn columns(&self) -> ArrayView2<'_, ComplexScalar> {
        self.columns.view()
    }

    /// Max entrywise deviation of P*P from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.columns.ncols();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = cdot(&self.columns.column(i), &self.columns.column(j));
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d.re - target).abs()).max(d.im.abs());
            }
        }
        worst
    }
}

#[inline]
fn complex_gaussian<R: Rng>(rng: &mut R) -> ComplexScalar {
    // CN(0,1): real and imaginary parts each N(0, 1/2).
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    ComplexScalar::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Draws an N_r x N_t channel with i.i.d. CN(0,1) entries (row-major draw
/// order). Deterministic in `seed`.
pub fn sample_channel(n_rx: usize, n_tx: usize, seed: StreamSeed) -> ChannelMatrix {
    let mut rng = seed.rng();
    let data: Vec<ComplexScalar> = (0..n_rx * n_tx)
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    ChannelMatrix {
        entries: Array2::from_shape_vec((n_rx, n_tx), data).expect("shape matches draw count"),
    }
}

/// Draws `n_cols` columns distributed as the leading columns of a Haar-random
/// N_t x N_t unitary: fill columns with i.i.d. CN(0,1), then Gram-Schmidt
/// left to right. The triangular factor of this factorization has positive
/// real diagonal by construction, which is exactly the phase correction that
/// makes plain QR sampling Haar; orthonormalizing only the first `n_cols`
/// columns yields the same result as factoring the full square matrix and
/// truncating.
pub fn sample_precoder(
    n_tx: usize,
    n_cols: usize,
    seed: StreamSeed,
) -> Result<PrecoderMatrix, DimensionError> {
    sample_precoder_grouped(n_tx, n_cols, 1, seed)
}

/// As [`sample_precoder`] with the N*D columns partitioned into D groups.
pub fn sample_precoder_grouped(
    n_tx: usize,
    n_beams: usize,
    n_slots: usize,
    seed: StreamSeed,
) -> Result<PrecoderMatrix, DimensionError> {
    let n_cols = n_beams * n_slots;
    if n_cols > n_tx || n_cols == 0 {
        return Err(DimensionError { n_tx, n_cols });
    }
    let mut rng = seed.rng();
    // Column-major draw order: column j of the would-be square Gaussian
    // matrix consumes draws [j*n_tx, (j+1)*n_tx).
    let data: Vec<ComplexScalar> = (0..n_tx * n_cols)
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    let mut columns =
        Array2::from_shape_vec((n_tx, n_cols).f(), data).expect("shape matches draw count");
    gram_schmidt(&mut columns);
    Ok(PrecoderMatrix {
        columns,
        n_beams,
        n_slots,
    })
}

/// Conjugated dot product sum_i conj(a_i) b_i.
#[inline]
pub(crate) fn cdot(
    a: &ArrayView1<'_, ComplexScalar>,
    b: &ArrayView1<'_, ComplexScalar>,
) -> ComplexScalar {
    let mut acc = ComplexScalar::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

#[inline]
fn norm(v: &ArrayView1<'_, ComplexScalar>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram-Schmidt with conditional re-orthogonalization
/// (Kahan-Parlett "twice is enough": repeat the projection pass when a
/// column loses more than half its norm).
fn gram_schmidt(m: &mut Array2<ComplexScalar>) {
    let n_cols = m.ncols();
    for j in 0..n_cols {
        let mut norm_before = norm(&m.column(j));
        loop {
            for i in 0..j {
                let (left, mut right) = split_columns(m, i, j);
                let coeff = cdot(&left.view(), &right.view());
                right.zip_mut_with(&left, |r, l| *r -= coeff * l);
            }
            let norm_after = norm(&m.column(j));
            if norm_after > 0.5 * norm_before {
                break;
            }
            norm_before = norm_after;
        }
        let inv = 1.0 / norm(&m.column(j));
        m.column_mut(j).mapv_inplace(|z| z * inv);
    }
}

/// Disjoint (immutable, mutable) views of columns i < j.
fn split_columns(
    m: &mut Array2<ComplexScalar>,
    i: usize,
    j: usize,
) -> (
    ArrayViewMut1<'_, ComplexScalar>,
    ArrayViewMut1<'_, ComplexScalar>,
) {
    debug_assert!(i < j);
    m.multi_slice_mut((s![.., i], s![.., j]))
}
