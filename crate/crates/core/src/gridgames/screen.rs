use std::collections::HashSet;

use crate::error::{Error, Result};

/// Channel-major boolean occupancy grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Screen {
    channels: usize,
    height: usize,
    width: usize,
    bits: Vec<bool>,
}

impl Screen {
    pub fn blank(channels: usize, height: usize, width: usize) -> Self {
        Screen {
            channels,
            height,
            width,
            bits: vec![false; channels * height * width],
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    fn index(&self, channel: usize, row: usize, col: usize) -> usize {
        assert!(
            channel < self.channels && row < self.height && col < self.width,
            "cell ({channel}, {row}, {col}) outside screen {:?}",
            self.shape()
        );
        (channel * self.height + row) * self.width + col
    }

    pub fn get(&self, channel: usize, row: usize, col: usize) -> bool {
        self.bits[self.index(channel, row, col)]
    }

    pub fn set(&mut self, channel: usize, row: usize, col: usize, on: bool) {
        let i = self.index(channel, row, col);
        self.bits[i] = on;
    }

    pub fn clear(&mut self) {
        self.bits.fill(false);
    }

    /// Bits in channel order, each channel row-major.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// The bit sequence packed into 64-bit words, lowest bit first. Two
    /// screens of one shape are equal exactly when their encodings are.
    pub fn encode(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.bits.len().div_ceil(64)];
        for (i, _) in self.bits.iter().enumerate().filter(|(_, b)| **b) {
            words[i / 64] |= 1 << (i % 64);
        }
        words
    }

    /// Writes the bits as 0/1 network inputs.
    pub fn write_inputs(&self, out: &mut [f64]) {
        for (slot, &b) in out.iter_mut().zip(&self.bits) {
            *slot = if b { 1.0 } else { 0.0 };
        }
    }

    /// One text line per row; each cell shows the glyph of its highest set
    /// channel, or `.` when empty.
    pub fn render(&self, glyphs: &[char]) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for r in 0..self.height {
            for c in 0..self.width {
                let glyph = (0..self.channels)
                    .rev()
                    .find(|&ch| self.get(ch, r, c))
                    .map_or('.', |ch| glyphs.get(ch).copied().unwrap_or('#'));
                out.push(glyph);
            }
            out.push('\n');
        }
        out
    }
}

/// Screens already produced during the current generation, shared by all
/// agents.
#[derive(Debug, Clone)]
pub struct ScreenArchive {
    shape: (usize, usize, usize),
    generation: usize,
    seen: HashSet<Vec<u64>>,
}

impl ScreenArchive {
    pub fn new(shape: (usize, usize, usize)) -> Self {
        ScreenArchive {
            shape,
            generation: 0,
            seen: HashSet::new(),
        }
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Moves to `generation`, forgetting every screen if it differs from the
    /// current one.
    pub fn begin_generation(&mut self, generation: usize) {
        if generation != self.generation {
            self.seen.clear();
            self.generation = generation;
        }
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    /// 1 the first time a screen is seen this generation, 0 afterwards.
    pub fn reward(&mut self, screen: &Screen) -> Result<u32> {
        if screen.shape() != self.shape {
            return Err(Error::Dimension(format!(
                "screen {:?} does not fit an archive of {:?}",
                screen.shape(),
                self.shape
            )));
        }
        Ok(u32::from(self.seen.insert(screen.encode())))
    }
}
