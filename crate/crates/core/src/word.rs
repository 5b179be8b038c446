//! Double-word primitives. Everything is modulo 2^32.

/// Circular right rotation; `amount` is reduced modulo 32 first, so the key
/// schedule's `8 * phase` rotations can be passed straight through.
#[inline(always)]
pub fn rotate_right(w: u32, amount: u32) -> u32 {
    w.rotate_right(amount % 32)
}

#[inline(always)]
pub fn add_mod(a: u32, b: u32) -> u32 {
    a.wrapping_add(b)
}

#[inline(always)]
pub fn mul_mod(a: u32, b: u32) -> u32 {
    a.wrapping_mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rotate_examples() {
        assert_eq!(rotate_right(0x0000_0100, 8), 0x0000_0001);
        assert_eq!(rotate_right(0xDEAD_BEEF, 0), 0xDEAD_BEEF);
        assert_eq!(rotate_right(0x0000_0001, 33), 0x8000_0000);
        // key schedule phase 7 rotates by 56
        assert_eq!(rotate_right(0x1234_5678, 56), rotate_right(0x1234_5678, 24));
    }

    #[test]
    fn add_examples() {
        assert_eq!(add_mod(0xFFFF_FFFF, 1), 0);
        assert_eq!(add_mod(5, 7), 12);
        assert_eq!(add_mod(0x8000_0000, 0x8000_0000), 0);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(mul_mod(3, 3), 9);
        assert_eq!(mul_mod(0x10000, 0x10000), 0);
        assert_eq!(mul_mod(0xFFFF_FFFF, 2), 0xFFFF_FFFE);
    }

    #[test]
    fn odd_multiplier_is_bijective_at_byte_width() {
        // Reduced-width analogue of multiplication by an odd constant mod 2^32.
        for c in (1u16..256).step_by(2) {
            let mut seen = [false; 256];
            for w in 0u16..256 {
                let img = ((w * c) & 0xff) as usize;
                assert!(!seen[img], "collision for c={c}");
                seen[img] = true;
            }
        }
    }

    #[test]
    fn odd_multiplier_has_no_sampled_collisions() {
        let c = 0x9E37_79B9u32;
        let mut images: Vec<u32> = (0u32..1 << 16)
            .map(|w| mul_mod((w << 16) | (w ^ 0xA5A5), c)).collect();
        images.sort_unstable();
        images.dedup();
        assert_eq!(images.len(), 1 << 16);
    }

    proptest! {
        #[test]
        fn rotation_inverts(w: u32, k in 1u32..32) {
            prop_assert_eq!(rotate_right(rotate_right(w, k), 32 - k), w);
        }

        #[test]
        fn add_laws(a: u32, b: u32, c: u32) {
            prop_assert_eq!(add_mod(a, b), add_mod(b, a));
            prop_assert_eq!(add_mod(add_mod(a, b), c), add_mod(a, add_mod(b, c)));
            prop_assert_eq!(add_mod(a, 0), a);
        }

        #[test]
        fn mul_identities(a: u32) {
            prop_assert_eq!(mul_mod(a, 1), a);
            prop_assert_eq!(mul_mod(a, 0), 0);
        }

        #[test]
        fn odd_square_stays_odd(c: u32) {
            let c = c | 1;
            prop_assert_eq!(mul_mod(c, c) & 1, 1);
        }
    }
}
