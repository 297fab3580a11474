//! Dense row-major tensor helpers shared by the utility and gradient code.
//!
//! Axis 0 is the slowest-varying axis. Every contraction walks the buffer
//! once, so contracting all but one axis of a tensor with `P` entries costs
//! `O(P)` regardless of which axis is kept.

/// Row-major strides for `dims`.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for axis in (0..dims.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * dims[axis + 1];
    }
    strides
}

/// Contracts a single axis of a tensor with shape `(outer, len, inner)`
/// against `weights`, returning the `(outer, inner)` result.
fn contract_axis(tensor: &[f64], outer: usize, inner: usize, weights: &[f64]) -> Vec<f64> {
    let len = weights.len();
    debug_assert_eq!(tensor.len(), outer * len * inner);
    let mut out = vec![0.0; outer * inner];
    if inner == 1 {
        for (o, block) in tensor.chunks_exact(len).enumerate() {
            out[o] = block.iter().zip(weights).map(|(t, w)| t * w).sum();
        }
        return out;
    }
    for o in 0..outer {
        let dst = &mut out[o * inner..(o + 1) * inner];
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let start = (o * len + k) * inner;
            for (d, t) in dst.iter_mut().zip(&tensor[start..start + inner]) {
                *d += w * t;
            }
        }
    }
    out
}

/// Contracts every axis except `keep` and returns a vector of length
/// `dims[keep]`. With `keep == None` every axis is contracted and the result
/// has a single entry.
pub(crate) fn contract_except(
    tensor: &[f64],
    dims: &[usize],
    weights: &[&[f64]],
    keep: Option<usize>,
) -> Vec<f64> {
    debug_assert_eq!(dims.len(), weights.len());
    let mut current: Option<Vec<f64>> = None;
    // Remaining shape, shrinking from the fast end.
    let mut shape: Vec<usize> = dims.to_vec();
    for axis in (0..dims.len()).rev() {
        if Some(axis) == keep {
            continue;
        }
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let src = current.as_deref().unwrap_or(tensor);
        let next = contract_axis(src, outer, inner, weights[axis]);
        shape[axis] = 1;
        current = Some(next);
    }
    current.unwrap_or_else(|| tensor.to_vec())
}

/// Copies the sub-tensor with `axis` fixed at `index`; the result has the
/// shape of `dims` with that axis removed.
pub(crate) fn slice_axis(tensor: &[f64], dims: &[usize], axis: usize, index: usize) -> Vec<f64> {
    let outer: usize = dims[..axis].iter().product();
    let inner: usize = dims[axis + 1..].iter().product();
    let len = dims[axis];
    let mut out = Vec::with_capacity(outer * inner);
    for o in 0..outer {
        let start = (o * len + index) * inner;
        out.extend_from_slice(&tensor[start..start + inner]);
    }
    out
}

/// Index of the first maximum; ties go to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

pub(crate) fn max(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strides_are_row_major() {
        assert_eq!(strides(&[2, 3, 4]), vec![12, 4, 1]);
        assert_eq!(strides(&[5]), vec![1]);
    }

    #[test]
    fn contract_matches_loops() {
        let dims = [2, 3, 2];
        let tensor: Vec<f64> = (0..12).map(|x| x as f64).collect();
        let w0 = [0.3, 0.7];
        let w1 = [0.2, 0.5, 0.3];
        let w2 = [0.6, 0.4];
        let weights: [&[f64]; 3] = [&w0, &w1, &w2];
        for keep in 0..3 {
            let got = contract_except(&tensor, &dims, &weights, Some(keep));
            let mut want = vec![0.0; dims[keep]];
            for a in 0..2 {
                for b in 0..3 {
                    for c in 0..2 {
                        let idx = [a, b, c];
                        let mut w = 1.0;
                        for (axis, &i) in idx.iter().enumerate() {
                            if axis != keep {
                                w *= weights[axis][i];
                            }
                        }
                        want[idx[keep]] += w * tensor[a * 6 + b * 2 + c];
                    }
                }
            }
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn slice_middle_axis() {
        let tensor: Vec<f64> = (0..12).map(|x| x as f64).collect();
        assert_eq!(slice_axis(&tensor, &[2, 3, 2], 1, 2), vec![4.0, 5.0, 10.0, 11.0]);
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[2.0]), 0);
    }
}
