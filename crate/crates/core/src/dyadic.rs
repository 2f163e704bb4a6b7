//! Dyadic field arithmetic and generalized Walsh analysis.
//!
//! A dyadic rational is a finite bit sequence (x_n) with value
//! |x| = sum x_n 2^(-n-1); bit index n = -1 is the ones place, index 0 the
//! halves place. Addition is bitwise XOR, multiplication is carryless
//! convolution z_n = sum_{i+j=n} x_i y_j, whose identity is the bit at
//! index 0. The Walsh character pairing is
//! Psi_y(t) = (-1)^(pi_{-1}(y*t)) = (-1)^(sum_i y_i t_{-1-i}).

use crate::error::{CoreError, Result};

/// Default fractional bit budget for Walsh grids.
pub const DEFAULT_M_FRAC: u32 = 10;
/// Default integer bit budget for Walsh grids.
pub const DEFAULT_M_INT: u32 = 8;

const MAX_WIDTH: u32 = 64;

/// Finite dyadic rational with bits at indices -m_int .. m_frac-1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    bits: u128,
    m_int: u32,
    m_frac: u32,
}

impl std::fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "DyadicRational({}, int {}, frac {})",
            self.value(),
            self.m_int,
            self.m_frac
        )
    }
}

impl DyadicRational {
    /// Zero with the given bit budget.
    pub fn zero(m_int: u32, m_frac: u32) -> Result<Self> {
        check_width(m_int, m_frac)?;
        Ok(DyadicRational {
            bits: 0,
            m_int,
            m_frac,
        })
    }

    /// Greatest dyadic rational on the (m_int, m_frac) grid not exceeding x.
    pub fn from_real(x: f64, m_int: u32, m_frac: u32) -> Result<Self> {
        check_width(m_int, m_frac)?;
        if !x.is_finite() || x < 0.0 {
            return Err(CoreError::ParameterOutOfRange(format!(
                "dyadic rationals represent finite nonnegative reals, got {x}"
            )));
        }
        if x >= (m_int as f64).exp2() {
            return Err(CoreError::Overflow(format!(
                "{x} needs more than {m_int} integer bits"
            )));
        }
        let scaled = (x * (m_frac as f64).exp2()).floor() as u128;
        let width = m_int + m_frac;
        let mut bits = 0u128;
        for j in 0..width {
            if scaled >> j & 1 == 1 {
                bits |= 1 << (width - 1 - j);
            }
        }
        Ok(DyadicRational {
            bits,
            m_int,
            m_frac,
        })
    }

    /// Builds from explicit bit indices.
    pub fn from_indices(indices: &[i32], m_int: u32, m_frac: u32) -> Result<Self> {
        check_width(m_int, m_frac)?;
        let mut bits = 0u128;
        for &n in indices {
            if n < -(m_int as i32) || n >= m_frac as i32 {
                return Err(CoreError::Overflow(format!(
                    "bit index {n} outside [-{m_int}, {m_frac})"
                )));
            }
            bits |= 1 << (n + m_int as i32) as u32;
        }
        Ok(DyadicRational {
            bits,
            m_int,
            m_frac,
        })
    }

    pub fn m_int(&self) -> u32 {
        self.m_int
    }

    pub fn m_frac(&self) -> u32 {
        self.m_frac
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Bit at index n (0 when outside the stored range).
    pub fn bit(&self, n: i32) -> bool {
        if n < -(self.m_int as i32) || n >= self.m_frac as i32 {
            return false;
        }
        self.bits >> (n + self.m_int as i32) as u32 & 1 == 1
    }

    /// Indices of the set bits, ascending.
    pub fn indices(&self) -> Vec<i32> {
        let mut out = Vec::new();
        for p in 0..(self.m_int + self.m_frac) {
            if self.bits >> p & 1 == 1 {
                out.push(p as i32 - self.m_int as i32);
            }
        }
        out
    }

    /// Real value sum 2^(-n-1) over set bits.
    pub fn value(&self) -> f64 {
        let mut acc = 0.0;
        for p in 0..(self.m_int + self.m_frac) {
            if self.bits >> p & 1 == 1 {
                let n = p as i32 - self.m_int as i32;
                acc += (-(n as f64) - 1.0).exp2();
            }
        }
        acc
    }

    fn widened(&self, m_int: u32, m_frac: u32) -> u128 {
        // Bits keep their index; storage position shifts by the extra
        // integer headroom.
        debug_assert!(m_int >= self.m_int && m_frac >= self.m_frac);
        self.bits << (m_int - self.m_int)
    }
}

fn check_width(m_int: u32, m_frac: u32) -> Result<()> {
    let total = m_int.saturating_add(m_frac);
    if total == 0 || total > MAX_WIDTH {
        return Err(CoreError::Overflow(format!(
            "bit budget {m_int}+{m_frac} outside (0, {MAX_WIDTH}]"
        )));
    }
    Ok(())
}

/// Dyadic sum (bitwise XOR) on the widened common bit range.
pub fn dyadic_add(x: &DyadicRational, y: &DyadicRational) -> DyadicRational {
    let m_int = x.m_int.max(y.m_int);
    let m_frac = x.m_frac.max(y.m_frac);
    DyadicRational {
        bits: x.widened(m_int, m_frac) ^ y.widened(m_int, m_frac),
        m_int,
        m_frac,
    }
}

/// Dyadic product by carryless convolution. The caller states the bit
/// capacity of the result; any product bit falling outside it is an error.
pub fn dyadic_mul(
    x: &DyadicRational,
    y: &DyadicRational,
    m_int_cap: u32,
    m_frac_cap: u32,
) -> Result<DyadicRational> {
    if m_int_cap + m_frac_cap > MAX_WIDTH {
        return Err(CoreError::Overflow(format!(
            "result capacity {m_int_cap}+{m_frac_cap} exceeds {MAX_WIDTH} bits"
        )));
    }
    // Product bit index n = i + j maps to offset position p_x + p_y < 127.
    let mut wide = 0u128;
    for p in 0..(x.m_int + x.m_frac) {
        if x.bits >> p & 1 == 1 {
            wide ^= y.bits << p;
        }
    }
    let base = -(x.m_int as i32) - y.m_int as i32;
    let mut bits = 0u128;
    for q in 0..128u32 {
        if wide >> q & 1 == 1 {
            let n = base + q as i32;
            if n < -(m_int_cap as i32) || n >= m_frac_cap as i32 {
                return Err(CoreError::Overflow(format!(
                    "product bit at index {n} outside capacity [-{m_int_cap}, {m_frac_cap})"
                )));
            }
            bits |= 1 << (n + m_int_cap as i32) as u32;
        }
    }
    Ok(DyadicRational {
        bits,
        m_int: m_int_cap,
        m_frac: m_frac_cap,
    })
}

/// Walsh character value Psi_y(t) in {-1, +1}.
pub fn walsh_eval(y: &DyadicRational, t: &DyadicRational) -> f64 {
    let mut parity = false;
    for p in 0..(y.m_int + y.m_frac) {
        if y.bits >> p & 1 == 1 {
            let i = p as i32 - y.m_int as i32;
            if t.bit(-1 - i) {
                parity = !parity;
            }
        }
    }
    if parity {
        -1.0
    } else {
        1.0
    }
}

/// Truncated finite-difference dyadic derivative
/// d_n f(x) = sum_{j<n} 2^(j-1) (f(x) - f(x (+) delta_j)), delta_j the bit
/// at index j. Walsh characters are eigenfunctions with eigenvalue
/// [`walsh_eigenvalue`].
pub fn dyadic_derivative_partial<F>(f: F, x: &DyadicRational, n: u32) -> Result<f64>
where
    F: Fn(&DyadicRational) -> f64,
{
    if n == 0 || n > 60 {
        return Err(CoreError::ParameterOutOfRange(format!(
            "difference order must be in [1, 60], got {n}"
        )));
    }
    let fx = f(x);
    let mut acc = 0.0;
    for j in 0..n {
        let delta = DyadicRational::from_indices(&[j as i32], x.m_int, x.m_frac.max(j + 1))?;
        let shifted = dyadic_add(x, &delta);
        acc += ((j as f64) - 1.0).exp2() * (fx - f(&shifted));
    }
    Ok(acc)
}

/// Eigenvalue of the order-n difference on Psi_y: sum_{j<n} 2^j y_{-1-j},
/// the integer bits of y up to place 2^(n-1).
pub fn walsh_eigenvalue(y: &DyadicRational, n: u32) -> f64 {
    let mut acc = 0.0;
    for j in 0..n {
        if y.bit(-1 - j as i32) {
            acc += (j as f64).exp2();
        }
    }
    acc
}

/// Value of the Walsh transform of `f` at one dyadic point, with a tail
/// estimate of the mass ignored beyond the grid box [0, 2^m_int).
#[derive(Debug, Clone, Copy)]
pub struct WalshTransformValue {
    pub value: f64,
    pub tail_estimate: f64,
}

/// Midpoint-cell Walsh transform over the box [0, 2^m_int) with cell width
/// 2^-m_frac. Exact for f constant on cells and t on the dual grid. The
/// tail of |f| over one further octave is estimated and must stay below
/// `tail_threshold` times the in-box l1 mass (plus a small absolute floor).
pub fn walsh_transform<F>(
    f: F,
    t: &DyadicRational,
    m_int: u32,
    m_frac: u32,
    tail_threshold: f64,
) -> Result<WalshTransformValue>
where
    F: Fn(f64) -> f64,
{
    let grid = DyadicGrid::new(m_int, m_frac)?;
    let width = grid.cell_width();
    let mut acc = 0.0;
    let mut l1 = 0.0;
    for r in 0..grid.cell_count() {
        let fv = f(grid.midpoint(r));
        let left = grid.left_point(r)?;
        acc += fv * walsh_eval(t, &left) * width;
        l1 += fv.abs() * width;
    }
    let box_hi = (m_int as f64).exp2();
    let mut tail = 0.0;
    let tail_cells = 512;
    let tail_width = box_hi / tail_cells as f64;
    for r in 0..tail_cells {
        tail += f(box_hi + (r as f64 + 0.5) * tail_width).abs() * tail_width;
    }
    let threshold = tail_threshold * l1.max(1e-12);
    if tail > threshold {
        return Err(CoreError::TailTooHeavy {
            tail,
            threshold,
        });
    }
    Ok(WalshTransformValue {
        value: acc,
        tail_estimate: tail,
    })
}

/// Regular dyadic grid on [0, 2^m_int) with 2^(m_int+m_frac) cells.
#[derive(Debug, Clone, Copy)]
pub struct DyadicGrid {
    pub m_int: u32,
    pub m_frac: u32,
}

impl DyadicGrid {
    pub fn new(m_int: u32, m_frac: u32) -> Result<Self> {
        if m_int + m_frac == 0 || m_int + m_frac > 22 {
            return Err(CoreError::Overflow(format!(
                "grid budget {m_int}+{m_frac} outside (0, 22]"
            )));
        }
        Ok(DyadicGrid { m_int, m_frac })
    }

    pub fn cell_count(&self) -> usize {
        1usize << (self.m_int + self.m_frac)
    }

    pub fn cell_width(&self) -> f64 {
        (-(self.m_frac as f64)).exp2()
    }

    /// Left endpoint of cell r as a real.
    pub fn left(&self, r: usize) -> f64 {
        r as f64 * self.cell_width()
    }

    pub fn midpoint(&self, r: usize) -> f64 {
        (r as f64 + 0.5) * self.cell_width()
    }

    /// Left endpoint of cell r as a dyadic rational.
    pub fn left_point(&self, r: usize) -> Result<DyadicRational> {
        DyadicRational::from_real(self.left(r), self.m_int, self.m_frac)
    }

    /// Dual-grid point t_r = r * 2^-m_int covering [0, 2^m_frac).
    pub fn dual_point(&self, r: usize) -> Result<DyadicRational> {
        DyadicRational::from_real(
            r as f64 * (-(self.m_int as f64)).exp2(),
            self.m_frac,
            self.m_int,
        )
    }

    /// Walsh transform of midpoint-cell samples at every dual-grid point,
    /// via the fast transform with bit reversal. Output index r corresponds
    /// to t = r * 2^-m_int.
    pub fn transform_all(&self, cells: &[f64]) -> Result<Vec<f64>> {
        let n = self.cell_count();
        if cells.len() != n {
            return Err(CoreError::ParameterOutOfRange(format!(
                "expected {n} cell values, got {}",
                cells.len()
            )));
        }
        let mut data = cells.to_vec();
        fwht(&mut data);
        let w = self.m_int + self.m_frac;
        let width = self.cell_width();
        let mut out = vec![0.0; n];
        for (r, slot) in out.iter_mut().enumerate() {
            *slot = data[bit_reverse(r, w)] * width;
        }
        Ok(out)
    }
}

fn bit_reverse(r: usize, width: u32) -> usize {
    let mut out = 0usize;
    for j in 0..width {
        if r >> j & 1 == 1 {
            out |= 1 << (width - 1 - j);
        }
    }
    out
}

fn fwht(data: &mut [f64]) {
    let n = data.len();
    let mut h = 1;
    while h < n {
        let mut i = 0;
        while i < n {
            for j in i..i + h {
                let a = data[j];
                let b = data[j + h];
                data[j] = a + b;
                data[j + h] = a - b;
            }
            i += 2 * h;
        }
        h *= 2;
    }
}
