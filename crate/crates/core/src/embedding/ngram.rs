const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over the seed's little-endian bytes followed by `bytes`.
pub fn fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for b in seed.to_le_bytes().iter().chain(bytes) {
        h ^= *b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Character n-grams of `<token>` for n in `min..=max`, ordered by n and
/// then by start position. Repeated n-grams are kept.
pub fn ngrams(token: &str, min: usize, max: usize) -> Vec<String> {
    let chars: Vec<char> = std::iter::once('<').chain(token.chars()).chain(std::iter::once('>')).collect();
    let mut out = Vec::new();
    for n in min..=max {
        if n > chars.len() {
            break;
        }
        for start in 0..=chars.len() - n {
            out.push(chars[start..start + n].iter().collect());
        }
    }
    out
}

/// Bucket indices of the n-grams of `token`, in [`ngrams`] order.
pub fn bucket_ids(token: &str, min: usize, max: usize, buckets: u32, seed: u64) -> Vec<u32> {
    ngrams(token, min, max)
        .iter()
        .map(|g| (fnv1a(seed, g.as_bytes()) % buckets as u64) as u32)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        // With the seed bytes omitted this is plain FNV-1a; check the
        // published test vector for "a" by unrolling the seed prefix.
        let mut h = FNV_OFFSET;
        for b in b"a" {
            h ^= *b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
        assert_eq!(h, 0xaf63_dc4c_8601_ec8c);
        assert_ne!(fnv1a(0, b"a"), fnv1a(1, b"a"));
    }

    #[test]
    fn ngram_order() {
        let g = ngrams("ab", 3, 4);
        assert_eq!(g, ["<ab", "ab>", "<ab>"]);
        assert!(ngrams("", 3, 6).is_empty());
    }
}
