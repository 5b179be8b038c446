//! A deliberately naive transcription of the cipher listing, checked
//! against the library and against vectors frozen from a separate
//! implementation. Buffers are physically copied on revolution and every
//! index is reduced explicitly.

use mv3::{initialize, KeyMaterial, StreamSession};

struct Naive {
    a: Vec<u32>,
    b: Vec<u32>,
    c_buf: Vec<u32>,
    t: Vec<u32>,
    u: u32,
    j: u32,
    c: u32,
    x: u32,
}

// Spelled out on purpose: the oracle avoids the library's word helpers.
#[allow(clippy::manual_rotate)]
fn rotr(w: u32, n: u32) -> u32 {
    let n = n % 32;
    if n == 0 {
        w
    } else {
        (w >> n) | (w << (32 - n))
    }
}

fn add(a: u32, b: u32) -> u32 {
    ((a as u64 + b as u64) % (1u64 << 32)) as u32
}

fn mul(a: u32, b: u32) -> u32 {
    ((a as u64 * b as u64) % (1u64 << 32)) as u32
}

impl Naive {
    fn block(&mut self) -> Vec<u32> {
        let mut out = Vec::with_capacity(32);
        for i in 0..32usize {
            self.j = (self.j + self.b[i] % 256) % 256;
            self.x = add(self.x, self.t[self.j as usize]);
            self.c_buf[i] = rotr(self.x, 8);
            out.push(mul(self.x, self.c) ^ self.a[(9 * i + 5) % 32] ^ rotr(self.b[(7 * i + 18) % 32], 16));
        }
        self.u = (self.u + 1) % 256;
        let tj = self.t[self.j as usize];
        self.t[self.u as usize] = add(self.t[self.u as usize], rotr(tj, 13));
        self.c = add(self.c, rotr(self.a[0], 16));
        self.c |= 1;
        self.c = mul(self.c, self.c);
        self.a = self.b.clone();
        self.b = self.c_buf.clone();
        // poison the recycled buffer: every slot must be rewritten before use
        self.c_buf = vec![0xA5A5_A5A5; 32];
        out
    }

    fn init(key: &[u32], iv: &[u32]) -> Naive {
        let fill = u32::from_le_bytes([0xEF; 4]);
        let mut s = Naive {
            a: vec![fill; 32],
            b: vec![fill; 32],
            c_buf: vec![fill; 32],
            t: vec![fill; 256],
            u: 0,
            j: 0,
            c: 1,
            x: 0,
        };
        for i in 0..8usize {
            let material = if i < 4 { key } else { iv };
            for l in 0..256usize {
                let idx = (i + l) % 256;
                s.t[idx] = add(add(s.t[idx], rotr(material[l % material.len()], 8 * i as u32)), l as u32);
            }
            let mut ks = Vec::new();
            for _ in 0..8 {
                ks.extend(s.block());
            }
            for (t, k) in s.t.iter_mut().zip(&ks) {
                *t ^= k;
            }
        }
        s
    }
}

const KEY: [u32; 4] = [0x0302_0100, 0x0706_0504, 0x0b0a_0908, 0x0f0e_0d0c];
const IV: [u32; 4] = [0x1312_1110, 0x1716_1514, 0x1b1a_1918, 0x1f1e_1d1c];

// First two blocks for KEY/IV above, frozen from the separate implementation.
const SEQ_BLOCKS: [u32; 64] = [
    0xc470eec3, 0xc05e897a, 0x68256313, 0x7b72519d, 0x0629051a, 0x1450301d, 0xbc79de00, 0x7d63d03e,
    0xc63b085c, 0x54f93bd3, 0xc4d44a00, 0x0db3a734, 0x74079f05, 0x4fbb3e87, 0xf07ffec0, 0xa3371f55,
    0x39def3e4, 0xfd4faaad, 0xb76d1350, 0xc8b2b9c8, 0x9d18e7f0, 0x46e67d61, 0xdc3a3750, 0xbdb5dfba,
    0x87f9ed4c, 0x7b46428b, 0x9958c42e, 0x476fd4de, 0xa1140622, 0x01d98f96, 0x07c98ed3, 0x96a2be60,
    0x14e10ca7, 0x6d07ff0d, 0xb8c41827, 0x6416e6c3, 0x05201cb7, 0x6217d19e, 0x28d79aed, 0x1cc4f7c3,
    0xefa8bedf, 0xecd690ee, 0xe3f273f9, 0x0416167a, 0xf1dc9590, 0x169755b7, 0xd6082a3f, 0x3bfc8365,
    0x18edc8e9, 0xbcda5e6f, 0x4c83a3a4, 0xa0fb0ba5, 0x4ce4a2c0, 0x3da6001d, 0x0be0057d, 0xb3914a82,
    0x33f950db, 0x28bbf42f, 0x0fcf7a58, 0x8e79e877, 0x8266a6cc, 0x821ef546, 0x02526c98, 0xbc508b18,
];

#[test]
fn naive_matches_frozen_vector() {
    let mut n = Naive::init(&KEY, &IV);
    let mut words = n.block();
    words.extend(n.block());
    assert_eq!(words, SEQ_BLOCKS.to_vec());
}

#[test]
fn library_matches_frozen_vector() {
    let km = KeyMaterial::new(KEY.to_vec(), IV.to_vec()).unwrap();
    let (mut s, _) = initialize(&km);
    let mut words = s.next_block().0.to_vec();
    words.extend(s.next_block().0);
    assert_eq!(words, SEQ_BLOCKS.to_vec());

    let bytes = StreamSession::new(&km).keystream_bytes(256);
    let expected: Vec<u8> = SEQ_BLOCKS.iter().flat_map(|w| w.to_le_bytes()).collect();
    assert_eq!(bytes, expected);
}

#[test]
fn library_matches_naive_across_key_sizes() {
    for words in [1usize, 3, 5, 8, 17, 64, 256] {
        let key: Vec<u32> = (0..words as u32).map(|k| k.wrapping_mul(0x0101_0101) ^ 0x5A5A_0000).collect();
        let iv: Vec<u32> = (0..words as u32).map(|k| !k.rotate_left(7)).collect();
        let mut naive = Naive::init(&key, &iv);
        let km = KeyMaterial::new(key, iv).unwrap();
        let (mut lib, _) = initialize(&km);
        for _ in 0..40 {
            assert_eq!(lib.next_block().0.to_vec(), naive.block(), "key of {words} words");
        }
    }
}
