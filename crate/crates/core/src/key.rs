use std::fmt::Debug;

/// A key type that can live in a sorted array and be fed to a CDF model.
///
/// Integer keys are used as-is. Byte-string keys expose two views: a scalar
/// projection (their first eight bytes read big-endian) for scalar models and
/// the tokenized vector for feature-vector models.
pub trait IndexKey: Ord + Clone + Debug + Send + Sync + 'static {
    /// Scalar projection, non-decreasing in key order.
    fn to_f64(&self) -> f64;

    /// Writes the model input vector of length `dim` into `out`.
    fn write_features(&self, dim: usize, out: &mut Vec<f64>);

    /// Bytes needed to store this key as a separator.
    fn stored_size(&self) -> usize;
}

impl IndexKey for u64 {
    #[inline]
    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn write_features(&self, dim: usize, out: &mut Vec<f64>) {
        out.clear();
        out.resize(dim.max(1), 0.0);
        out[0] = *self as f64;
    }

    #[inline]
    fn stored_size(&self) -> usize {
        8
    }
}

impl IndexKey for Vec<u8> {
    fn to_f64(&self) -> f64 {
        let mut prefix = [0u8; 8];
        let len = self.len().min(8);
        prefix[..len].copy_from_slice(&self[..len]);
        u64::from_be_bytes(prefix) as f64
    }

    fn write_features(&self, dim: usize, out: &mut Vec<f64>) {
        crate::models::StringFeaturizer::new(dim).tokenize_into(self, out);
    }

    fn stored_size(&self) -> usize {
        // length prefix + bytes
        4 + self.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_projection_is_monotone() {
        let mut keys: Vec<Vec<u8>> = vec![
            b"".to_vec(),
            b"a".to_vec(),
            b"aa".to_vec(),
            b"ab".to_vec(),
            b"b".to_vec(),
            b"abcdefghij".to_vec(),
            b"abcdefghik".to_vec(),
            vec![0xff; 3],
        ];
        keys.sort();
        for w in keys.windows(2) {
            assert!(w[0].to_f64() <= w[1].to_f64(), "{:?} vs {:?}", w[0], w[1]);
        }
    }
}
