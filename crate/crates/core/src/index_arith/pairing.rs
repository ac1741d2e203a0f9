use num_integer::Roots;

use super::IndexError;

/// A bijection `X × ℕ → ℕ` used to lay out the rows of a shift.
///
/// `RowMajor { rows: m }` pairs `{0..m-1} × ℕ` via `(r, k) ↦ k·m + r`;
/// `Cantor` pairs `ℕ × ℕ` via `(r, k) ↦ (r+k)(r+k+1)/2 + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingScheme {
    RowMajor { rows: u64 },
    Cantor,
}

impl PairingScheme {
    pub fn pair(&self, r: u64, k: u64) -> Result<u64, IndexError> {
        match *self {
            PairingScheme::RowMajor { rows: 0 } => Err(IndexError::NoRows),
            PairingScheme::RowMajor { rows } if r >= rows => {
                Err(IndexError::RowOutOfRange { row: r, rows })
            }
            PairingScheme::RowMajor { rows } => Ok(k * rows + r),
            PairingScheme::Cantor => Ok((r + k) * (r + k + 1) / 2 + k),
        }
    }

    pub fn unpair(&self, n: u64) -> Result<(u64, u64), IndexError> {
        match *self {
            PairingScheme::RowMajor { rows: 0 } => Err(IndexError::NoRows),
            PairingScheme::RowMajor { rows } => Ok((n % rows, n / rows)),
            PairingScheme::Cantor => {
                let w = ((8 * n as u128 + 1).sqrt() as u64 - 1) / 2;
                let t = w * (w + 1) / 2;
                let k = n - t;
                Ok((w - k, k))
            }
        }
    }
}
