use std::fmt;

/// A bit string whose length is tracked exactly, for bandwidth accounting.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn new() -> Self {
        Bits::default()
    }

    /// The low `width` bits of `value`, most significant first.
    pub fn from_uint(value: u64, width: u32) -> Self {
        let mut b = Bits::new();
        b.push_uint(value, width);
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: u32) {
        debug_assert!(width == 64 || value >> width == 0, "{value} does not fit {width} bits");
        for i in (0..width).rev() {
            self.push(value >> i & 1 == 1);
        }
    }

    /// Appends `x ≥ 1` in Elias-gamma code (`2⌊log2 x⌋ + 1` bits).
    pub fn push_gamma(&mut self, x: u64) {
        assert!(x >= 1, "gamma code needs x >= 1");
        let width = 64 - x.leading_zeros();
        for _ in 1..width {
            self.push(false);
        }
        self.push_uint(x, width);
    }

    pub fn extend(&mut self, other: &Bits) {
        for i in 0..other.len {
            self.push(other.get(i));
        }
    }

    /// Bits `start..end` as a new string.
    pub fn slice(&self, start: usize, end: usize) -> Bits {
        assert!(start <= end && end <= self.len);
        let mut out = Bits::new();
        for i in start..end {
            out.push(self.get(i));
        }
        out
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: self, pos: 0 }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits(")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut b = Bits::new();
        for bit in iter {
            b.push(bit);
        }
        b
    }
}

/// Length of the Elias-gamma code of `x ≥ 1`.
pub fn gamma_len(x: u64) -> usize {
    2 * (63 - x.leading_zeros() as usize) + 1
}

/// Sequential decoder over a [`Bits`]. Reads past the end panic: every
/// decoder in this workspace knows the layout it is reading.
pub struct BitReader<'a> {
    bits: &'a Bits,
    pos: usize,
}

impl BitReader<'_> {
    pub fn remaining(&self) -> usize {
        self.bits.len - self.pos
    }

    pub fn bit(&mut self) -> bool {
        let b = self.bits.get(self.pos);
        self.pos += 1;
        b
    }

    pub fn uint(&mut self, width: u32) -> u64 {
        (0..width).fold(0u64, |acc, _| acc << 1 | self.bit() as u64)
    }

    pub fn gamma(&mut self) -> u64 {
        let mut zeros = 0;
        while !self.bit() {
            zeros += 1;
        }
        let rest = self.uint(zeros);
        1u64 << zeros | rest
    }
}
