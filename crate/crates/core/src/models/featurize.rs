use serde::{Deserialize, Serialize};

/// Turns byte strings into fixed-length numeric vectors: one entry per byte
/// holding its value, truncated to `max_len` and zero-padded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringFeaturizer {
    max_len: usize,
}

impl StringFeaturizer {
    pub fn new(max_len: usize) -> Self {
        assert!(max_len >= 1, "featurizer needs at least one token");
        Self { max_len }
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn tokenize(&self, key: &[u8]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.max_len);
        self.tokenize_into(key, &mut out);
        out
    }

    pub fn tokenize_into(&self, key: &[u8], out: &mut Vec<f64>) {
        out.clear();
        out.extend(key.iter().take(self.max_len).map(|&b| f64::from(b)));
        out.resize(self.max_len, 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ascii_values_padding_and_truncation() {
        assert_eq!(StringFeaturizer::new(4).tokenize(b""), vec![0.0; 4]);
        assert_eq!(StringFeaturizer::new(4).tokenize(b"AB"), vec![65.0, 66.0, 0.0, 0.0]);
        assert_eq!(StringFeaturizer::new(3).tokenize(b"ABCDE"), vec![65.0, 66.0, 67.0]);
    }

    proptest! {
        #[test]
        fn length_exact(key in prop::collection::vec(any::<u8>(), 0..64), n in 1usize..48) {
            prop_assert_eq!(StringFeaturizer::new(n).tokenize(&key).len(), n);
        }
    }
}
