//! Seeded hashed character-trigram embedder. Serves as the offline provider
//! for tests and oracles: a pure function of (text, dim, seed), identical
//! across platforms.

use super::Vector;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const SIGN_SEED_MIX: u64 = 0x9e37_79b9_7f4a_7c15;

/// Start-of-text and end-of-text boundary sentinels. They guarantee at
/// least one trigram exists for any input, including the empty string.
const BOUNDARY_START: char = '\u{2}';
const BOUNDARY_END: char = '\u{3}';

fn fnv1a64(seed: u64, bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for b in seed.to_le_bytes().iter().chain(bytes) {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Embeds `text` as a signed bag of hashed character trigrams, L2-normalized.
///
/// Each trigram hashes (with the seed) into one of `dim` buckets; a second
/// hash picks the sign. Texts shorter than three characters are padded with
/// boundary sentinels rather than rejected.
pub fn deterministic_embed(text: &str, dim: usize, seed: u64) -> Vector {
    assert!(dim >= 2, "deterministic embedder needs dim >= 2");

    let mut chars: Vec<char> = Vec::with_capacity(text.chars().count() + 2);
    chars.push(BOUNDARY_START);
    chars.extend(text.chars());
    chars.push(BOUNDARY_END);
    while chars.len() < 3 {
        chars.push(BOUNDARY_END);
    }

    let mut acc = vec![0.0_f64; dim];
    let mut buf = [0_u8; 12];
    for window in chars.windows(3) {
        let mut len = 0;
        for ch in window {
            len += ch.encode_utf8(&mut buf[len..]).len();
        }
        let trigram = &buf[..len];
        let bucket = (fnv1a64(seed, trigram) % dim as u64) as usize;
        let sign = if fnv1a64(seed ^ SIGN_SEED_MIX, trigram) & 1 == 0 {
            1.0
        } else {
            -1.0
        };
        acc[bucket] += sign;
    }

    let norm = acc.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        // Signs can cancel exactly; fall back to a deterministic one-hot.
        let bucket = (fnv1a64(seed, text.as_bytes()) % dim as u64) as usize;
        acc[bucket] = 1.0;
    } else {
        for x in &mut acc {
            *x /= norm;
        }
    }
    Vector::from_normalized(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::cosine;

    #[test]
    fn identical_input_identical_output() {
        let a = deterministic_embed("xyzxyz", 256, 7);
        let b = deterministic_embed("xyzxyz", 256, 7);
        assert_eq!(a.components(), b.components());
    }

    #[test]
    fn output_has_unit_norm() {
        for text in ["", "a", "ab", "abc", "portable solar charger", "日本語テキスト"] {
            let v = deterministic_embed(text, 64, 7);
            assert!((v.norm() - 1.0).abs() < 1e-6, "norm off for {text:?}");
        }
    }

    #[test]
    fn different_seed_changes_vector() {
        let a = deterministic_embed("abc", 256, 7);
        let b = deterministic_embed("abc", 256, 8);
        assert_ne!(a.components(), b.components());
    }

    #[test]
    fn near_texts_score_strictly_inside_cosine_range() {
        let a = deterministic_embed("abc", 256, 7);
        let b = deterministic_embed("abd", 256, 7);
        let c = cosine(&a, &b).unwrap();
        assert!(c < 1.0 && c > -1.0, "cosine was {c}");
    }

    #[test]
    fn similar_text_scores_higher_than_unrelated_text() {
        let base = deterministic_embed("portable solar charger", 256, 7);
        let near = deterministic_embed("portable solar charger!", 256, 7);
        let far = deterministic_embed("memory foam cushion", 256, 7);
        let near_sim = cosine(&base, &near).unwrap();
        let far_sim = cosine(&base, &far).unwrap();
        assert!(
            near_sim > far_sim,
            "expected {near_sim} > {far_sim} under seed 7"
        );
    }
}
