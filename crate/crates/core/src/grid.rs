//! Sampled functions on a periodic box and their discrete Fourier transform.
//!
//! The continuous convention û(ξ) = ∫ u(y)e^{−iy·ξ} dy is carried over to the
//! torus: the forward transform is the FFT with sign e^{−iξ·x} scaled by the
//! cell volume ∏L_i/∏N_i, and the inverse divides by the box volume ∏L_i.
//! Grid frequencies are ξ_k = 2πk_i/L_i with k_i ∈ {−N_i/2, …, N_i/2 − 1}.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};

/// Upper bound on the number of samples accepted from untrusted input.
pub const MAX_SAMPLES: usize = 1 << 26;
pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq)]
struct Layout {
    shape: Vec<usize>,
    box_len: Vec<f64>,
}

impl Layout {
    fn new(shape: Vec<usize>, box_len: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > MAX_DIM {
            return Err(Error::Shape(format!("dimension must be in 1..={MAX_DIM}, got {}", shape.len())));
        }
        if shape.len() != box_len.len() {
            return Err(Error::Shape(format!("{} axes but {} box lengths", shape.len(), box_len.len())));
        }
        let mut total: usize = 1;
        for &n in &shape {
            if n == 0 || n % 2 != 0 {
                return Err(Error::Shape(format!("axis lengths must be positive and even, got {n}")));
            }
            total = total
                .checked_mul(n)
                .filter(|&t| t <= MAX_SAMPLES)
                .ok_or_else(|| Error::Shape(format!("more than {MAX_SAMPLES} samples")))?;
        }
        if let Some(l) = box_len.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::Shape(format!("box lengths must be positive and finite, got {l}")));
        }
        Ok(Layout { shape, box_len })
    }

    fn len(&self) -> usize {
        self.shape.iter().product()
    }

    fn cell_volume(&self) -> f64 {
        self.box_len.iter().zip(&self.shape).map(|(l, &n)| l / n as f64).product()
    }

    fn box_volume(&self) -> f64 {
        self.box_len.iter().product()
    }

    /// Row-major multi-index of a flat index.
    fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.shape.len()).rev() {
            out[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
    }
}

/// Signed wavenumber of FFT bin j on an axis of n samples.
pub fn wavenumber(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// FFT bin of signed wavenumber k, if representable on n samples.
pub fn bin_of(k: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if k < -half || k >= half {
        return None;
    }
    Some(if k >= 0 { k as usize } else { (k + n as i64) as usize })
}

/// Complex samples u(x_j), x_j = (j_i L_i / N_i)_i, in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    layout: Layout,
    data: Vec<Complex64>,
}

/// Fourier coefficients û_k in FFT bin order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    layout: Layout,
    coeffs: Vec<Complex64>,
}

macro_rules! layout_accessors {
    ($t:ty) => {
        impl $t {
            pub fn dim(&self) -> usize {
                self.layout.shape.len()
            }

            pub fn shape(&self) -> &[usize] {
                &self.layout.shape
            }

            pub fn box_len(&self) -> &[f64] {
                &self.layout.box_len
            }

            pub fn len(&self) -> usize {
                self.layout.len()
            }

            pub fn is_empty(&self) -> bool {
                false
            }
        }
    };
}

layout_accessors!(GridFunction);
layout_accessors!(Spectrum);

impl GridFunction {
    pub fn new(shape: Vec<usize>, box_len: Vec<f64>, data: Vec<Complex64>) -> Result<Self> {
        let layout = Layout::new(shape, box_len)?;
        if data.len() != layout.len() {
            return Err(Error::Shape(format!("{} samples for a grid of {}", data.len(), layout.len())));
        }
        Ok(GridFunction { layout, data })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(shape: Vec<usize>, box_len: Vec<f64>, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let layout = Layout::new(shape, box_len)?;
        let d = layout.shape.len();
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        let data = (0..layout.len())
            .map(|flat| {
                layout.unravel(flat, &mut idx);
                for a in 0..d {
                    x[a] = idx[a] as f64 * layout.box_len[a] / layout.shape[a] as f64;
                }
                f(&x)
            })
            .collect();
        Ok(GridFunction { layout, data })
    }

    /// Real-valued variant of [`GridFunction::from_fn`].
    pub fn from_real_fn(shape: Vec<usize>, box_len: Vec<f64>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::from_fn(shape, box_len, |x| Complex64::new(f(x), 0.0))
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// (∫_box |u|²)^{1/2} by the rectangle rule (exact for trigonometric
    /// polynomials resolved by the grid).
    pub fn l2_norm(&self) -> f64 {
        (self.layout.cell_volume() * self.data.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest |Im u| relative to the L∞ norm of Re u.
    pub fn imag_ratio(&self) -> f64 {
        let re = self.data.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        let im = self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if im == 0.0 {
            0.0
        } else {
            im / re
        }
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        GridFunction { layout: self.layout.clone(), data: self.data.iter().map(|z| z * c).collect() }
    }

    /// Pointwise a·self + b·other on the same grid.
    pub fn combine(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<GridFunction> {
        if self.layout != other.layout {
            return Err(Error::Shape("grids differ".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        Ok(GridFunction { layout: self.layout.clone(), data })
    }
}

impl Spectrum {
    pub fn new(shape: Vec<usize>, box_len: Vec<f64>, coeffs: Vec<Complex64>) -> Result<Self> {
        let layout = Layout::new(shape, box_len)?;
        if coeffs.len() != layout.len() {
            return Err(Error::Shape(format!("{} coefficients for a grid of {}", coeffs.len(), layout.len())));
        }
        Ok(Spectrum { layout, coeffs })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Signed wavenumbers k of a flat bin index.
    pub fn wavenumbers(&self, flat: usize) -> Vec<i64> {
        let mut idx = vec![0usize; self.dim()];
        self.layout.unravel(flat, &mut idx);
        idx.iter().zip(&self.layout.shape).map(|(&j, &n)| wavenumber(j, n)).collect()
    }

    /// ξ_k = 2πk_i/L_i.
    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        self.wavenumbers(flat).iter().zip(&self.layout.box_len).map(|(&k, l)| 2.0 * PI * k as f64 / l).collect()
    }

    /// |ξ_k|² for every bin, in bin order.
    pub fn xi_squared(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.frequency(i).iter().map(|x| x * x).sum()).collect()
    }

    /// Flat bin index of signed wavenumbers k.
    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim() {
            return None;
        }
        let mut flat = 0;
        for (a, &ka) in k.iter().enumerate() {
            flat = flat * self.layout.shape[a] + bin_of(ka, self.layout.shape[a])?;
        }
        Some(flat)
    }

    /// (1/∏L) Σ|û_k|², which equals ‖u‖²_{L²} by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.layout.box_volume()
    }

    /// Multiplies û_k by m(|ξ_k|²), stopping at the first failure.
    pub fn map_radial<E>(&self, mut m: impl FnMut(f64) -> Result<f64, E>) -> Result<Spectrum, E> {
        let xi2 = self.xi_squared();
        let coeffs = self.coeffs.iter().zip(xi2).map(|(c, x)| Ok(c * m(x)?)).collect::<Result<_, E>>()?;
        Ok(Spectrum { layout: self.layout.clone(), coeffs })
    }
}

fn fft_nd(layout: &Layout, data: &mut [Complex64], direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let d = layout.shape.len();
    for axis in 0..d {
        let n = layout.shape[axis];
        let stride: usize = layout.shape[axis + 1..].iter().product();
        let fft = planner.plan_fft(n, direction);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let block = n * stride;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
}

/// û_k = (∏L/∏N) Σ_j u(x_j) e^{−iξ_k·x_j}.
pub fn forward_transform(gf: &GridFunction) -> Spectrum {
    let mut coeffs = gf.data.clone();
    fft_nd(&gf.layout, &mut coeffs, FftDirection::Forward);
    let w = gf.layout.cell_volume();
    coeffs.iter_mut().for_each(|c| *c *= w);
    Spectrum { layout: gf.layout.clone(), coeffs }
}

/// u(x_j) = (1/∏L) Σ_k û_k e^{iξ_k·x_j}.
pub fn inverse_transform(sp: &Spectrum) -> GridFunction {
    let mut data = sp.coeffs.clone();
    fft_nd(&sp.layout, &mut data, FftDirection::Inverse);
    let w = 1.0 / sp.layout.box_volume();
    data.iter_mut().for_each(|c| *c *= w);
    GridFunction { layout: sp.layout.clone(), data }
}

const WORD: usize = 8;

/// Flat little-endian container: u64 d, d × u64 shape, d × f64 box lengths,
/// then re/im f64 pairs in row-major order.
pub fn encode(gf: &GridFunction) -> Vec<u8> {
    let d = gf.dim();
    let mut out = Vec::with_capacity(WORD * (1 + 2 * d + 2 * gf.len()));
    out.extend_from_slice(&(d as u64).to_le_bytes());
    for &n in gf.shape() {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for &l in gf.box_len() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for z in &gf.data {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn word(&mut self, what: &str) -> Result<[u8; WORD]> {
        let end = self.pos + WORD;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Decode { offset: self.pos, msg: format!("truncated while reading {what}") })?;
        self.pos = end;
        Ok(chunk.try_into().expect("slice of WORD bytes"))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.word(what)?))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.word(what)?))
    }
}

/// Inverse of [`encode`]. Rejects truncated or oversized input, trailing
/// bytes, odd or zero axis lengths, and non-positive box lengths.
pub fn decode(bytes: &[u8]) -> Result<GridFunction> {
    let mut r = Reader { bytes, pos: 0 };
    let d = r.u64("dimension")?;
    if d == 0 || d > MAX_DIM as u64 {
        return Err(Error::Decode { offset: 0, msg: format!("dimension {d} outside 1..={MAX_DIM}") });
    }
    let d = d as usize;
    let mut shape = Vec::with_capacity(d);
    for _ in 0..d {
        let at = r.pos;
        let n = r.u64("shape")?;
        let n = usize::try_from(n)
            .ok()
            .filter(|&n| n <= MAX_SAMPLES)
            .ok_or_else(|| Error::Decode { offset: at, msg: format!("axis length {n} too large") })?;
        shape.push(n);
    }
    let mut box_len = Vec::with_capacity(d);
    for _ in 0..d {
        box_len.push(r.f64("box length")?);
    }
    let header_end = r.pos;
    let layout = Layout::new(shape, box_len).map_err(|e| Error::Decode { offset: WORD, msg: e.to_string() })?;
    let expected = header_end + 2 * WORD * layout.len();
    if bytes.len() != expected {
        return Err(Error::Decode {
            offset: header_end,
            msg: format!("expected {expected} bytes, found {}", bytes.len()),
        });
    }
    let mut data = Vec::with_capacity(layout.len());
    for _ in 0..layout.len() {
        let re = r.f64("sample")?;
        let im = r.f64("sample")?;
        data.push(Complex64::new(re, im));
    }
    Ok(GridFunction { layout, data })
}
