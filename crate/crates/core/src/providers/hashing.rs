use super::{EmbeddingProvider, EmbeddingRequest, ProviderError};

/// Deterministic test embedder: character 1- to 3-grams of the lowercased,
/// boundary-padded text hashed (FNV-1a) into a fixed number of buckets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashingEmbedder {
    pub dimension: usize,
}

impl Default for HashingEmbedder {
    fn default() -> Self {
        Self { dimension: 256 }
    }
}

fn fnv1a(chars: &[char]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for c in chars {
        let mut buf = [0u8; 4];
        for b in c.encode_utf8(&mut buf).bytes() {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    hash
}

impl HashingEmbedder {
    pub fn new(dimension: usize) -> Self {
        Self { dimension }
    }

    pub fn vector(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.dimension.max(1)];
        let padded: Vec<char> = std::iter::once('^')
            .chain(text.to_lowercase().chars())
            .chain(std::iter::once('$'))
            .collect();
        for n in 1..=3 {
            for gram in padded.windows(n) {
                let h = fnv1a(gram);
                let bucket = (h % v.len() as u64) as usize;
                let sign = if (h >> 63) == 0 { 1.0 } else { -1.0 };
                v[bucket] += sign;
            }
        }
        v
    }
}

impl EmbeddingProvider for HashingEmbedder {
    fn id(&self) -> String {
        format!("hashing-ngram-{}", self.dimension)
    }

    fn embed(&self, request: &EmbeddingRequest) -> Result<Vec<Vec<f64>>, ProviderError> {
        if request.texts.is_empty() {
            return Err(ProviderError::Precondition("no texts to embed".into()));
        }
        Ok(request.texts.iter().map(|t| self.vector(t)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::cosine_similarity;

    #[test]
    fn deterministic_and_discriminating() {
        let h = HashingEmbedder::default();
        assert_eq!(h.vector("나비가 날아와"), h.vector("나비가 날아와"));
        let c = cosine_similarity(&h.vector("abc"), &h.vector("abd")).unwrap();
        assert!(c < 1.0 && c > 0.0, "{c}");
        assert!((cosine_similarity(&h.vector("abc"), &h.vector("abc")).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(h.vector("x").len(), 256);
        assert!(h.vector("").iter().any(|&x| x != 0.0));
    }
}
