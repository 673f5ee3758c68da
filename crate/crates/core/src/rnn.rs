//! Elman recurrent network genomes.
//!
//! A genome stores every weight and bias of a single-hidden-layer Elman
//! network in one flat buffer, laid out row-major as
//! `input_to_hidden | hidden_to_hidden | hidden_to_output | hidden_bias | output_bias`.
//! The hidden layer uses ReLU and feeds back into itself on the next step;
//! outputs are linear and the caller picks the action by argmax.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ConfigError, Error, Result};

pub const DEFAULT_HIDDEN: usize = 32;

/// Layer sizes of an Elman network.
///
/// `inputs` may be zero: a blind agent has no inputs and acts from its
/// recurrent state alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkDims {
    inputs: usize,
    hidden: usize,
    outputs: usize,
}

impl NetworkDims {
    pub fn new(inputs: usize, hidden: usize, outputs: usize) -> Result<Self, ConfigError> {
        if hidden == 0 {
            return Err(ConfigError::invalid("hidden", "must be at least 1"));
        }
        if outputs == 0 {
            return Err(ConfigError::invalid("outputs", "must be at least 1"));
        }
        Ok(NetworkDims {
            inputs,
            hidden,
            outputs,
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn param_count(&self) -> usize {
        let (i, h, o) = (self.inputs, self.hidden, self.outputs);
        h * i + h * h + o * h + h + o
    }

    fn offsets(&self) -> [usize; 5] {
        let (i, h, o) = (self.inputs, self.hidden, self.outputs);
        let ih = 0;
        let hh = ih + h * i;
        let ho = hh + h * h;
        let hb = ho + o * h;
        let ob = hb + h;
        [ih, hh, ho, hb, ob]
    }
}

/// Recurrent activations carried between steps of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenState {
    activations: Vec<f64>,
}

impl HiddenState {
    pub fn zeros(dims: NetworkDims) -> Self {
        HiddenState {
            activations: vec![0.0; dims.hidden],
        }
    }

    pub fn from_vec(activations: Vec<f64>) -> Self {
        HiddenState { activations }
    }

    pub fn activations(&self) -> &[f64] {
        &self.activations
    }

    pub fn reset(&mut self) {
        self.activations.iter_mut().for_each(|a| *a = 0.0);
    }
}

/// All parameters of one Elman network; the unit of evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    dims: NetworkDims,
    params: Vec<f64>,
}

impl Genome {
    /// Every parameter drawn i.i.d. from N(0, 1).
    pub fn random<R: Rng + ?Sized>(dims: NetworkDims, rng: &mut R) -> Self {
        let params = (0..dims.param_count())
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        Genome { dims, params }
    }

    pub fn zeros(dims: NetworkDims) -> Self {
        Genome {
            dims,
            params: vec![0.0; dims.param_count()],
        }
    }

    pub fn from_params(dims: NetworkDims, params: Vec<f64>) -> Result<Self> {
        if params.len() != dims.param_count() {
            return Err(Error::Dimension(format!(
                "expected {} parameters, got {}",
                dims.param_count(),
                params.len()
            )));
        }
        if let Some(bad) = params.iter().position(|p| !p.is_finite()) {
            return Err(Error::Dimension(format!("parameter {bad} is not finite")));
        }
        Ok(Genome { dims, params })
    }

    pub fn dims(&self) -> NetworkDims {
        self.dims
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn input_to_hidden(&self) -> &[f64] {
        let o = self.dims.offsets();
        &self.params[o[0]..o[1]]
    }

    pub fn hidden_to_hidden(&self) -> &[f64] {
        let o = self.dims.offsets();
        &self.params[o[1]..o[2]]
    }

    pub fn hidden_to_output(&self) -> &[f64] {
        let o = self.dims.offsets();
        &self.params[o[2]..o[3]]
    }

    pub fn hidden_bias(&self) -> &[f64] {
        let o = self.dims.offsets();
        &self.params[o[3]..o[4]]
    }

    pub fn output_bias(&self) -> &[f64] {
        let o = self.dims.offsets();
        &self.params[o[4]..]
    }

    /// Mutable view of the output bias; handy for hand-built controllers.
    pub fn output_bias_mut(&mut self) -> &mut [f64] {
        let o = self.dims.offsets();
        &mut self.params[o[4]..]
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Returns a child with i.i.d. N(0, sigma²) noise added to every
    /// parameter, biases included.
    pub fn mutate<R: Rng + ?Sized>(&self, sigma: f64, rng: &mut R) -> Genome {
        let params = self
            .params
            .iter()
            .map(|&w| w + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Genome {
            dims: self.dims,
            params,
        }
    }

    /// One network step. Returns the raw outputs and the next hidden state.
    pub fn forward(&self, hidden: &HiddenState, input: &[f64]) -> Result<(Vec<f64>, HiddenState)> {
        self.check_shapes(hidden, input)?;
        let net = CompiledNetwork::new(self);
        let mut next = HiddenState::zeros(self.dims);
        let mut out = vec![0.0; self.dims.outputs];
        net.step(hidden.activations(), input, &mut next.activations, &mut out);
        Ok((out, next))
    }

    pub fn check_shapes(&self, hidden: &HiddenState, input: &[f64]) -> Result<()> {
        if input.len() != self.dims.inputs {
            return Err(Error::Dimension(format!(
                "network expects {} inputs, got {}",
                self.dims.inputs,
                input.len()
            )));
        }
        if hidden.activations.len() != self.dims.hidden {
            return Err(Error::Dimension(format!(
                "network has {} hidden units, state has {}",
                self.dims.hidden,
                hidden.activations.len()
            )));
        }
        Ok(())
    }

    /// Writes the three dims as little-endian `u64` followed by every
    /// parameter as a little-endian `f64`, in storage order.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for d in [self.dims.inputs, self.dims.hidden, self.dims.outputs] {
            w.write_all(&(d as u64).to_le_bytes())?;
        }
        for p in &self.params {
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Genome> {
        let mut buf = [0u8; 8];
        let mut dims = [0usize; 3];
        for d in dims.iter_mut() {
            r.read_exact(&mut buf)?;
            *d = u64::from_le_bytes(buf) as usize;
        }
        let dims = NetworkDims::new(dims[0], dims[1], dims[2])?;
        let mut params = Vec::with_capacity(dims.param_count());
        for _ in 0..dims.param_count() {
            r.read_exact(&mut buf)?;
            params.push(f64::from_le_bytes(buf));
        }
        Genome::from_params(dims, params)
    }
}

/// A genome rearranged for fast stepping: input and recurrent weights are
/// stored column-major so zero inputs and inactive hidden units can be
/// skipped. Every code path accumulates in the same order, so results are
/// bit-identical to [`Genome::forward`].
#[derive(Debug, Clone)]
pub(crate) struct CompiledNetwork {
    hidden: usize,
    input_cols: Vec<f64>,
    recurrent_cols: Vec<f64>,
    output_rows: Vec<f64>,
    hidden_bias: Vec<f64>,
    output_bias: Vec<f64>,
    #[cfg(target_arch = "x86_64")]
    avx2: bool,
}

impl CompiledNetwork {
    pub(crate) fn new(g: &Genome) -> Self {
        let (ni, nh) = (g.dims.inputs, g.dims.hidden);
        let transpose = |rows: &[f64], cols: usize| {
            let mut t = vec![0.0; rows.len()];
            for r in 0..nh {
                for c in 0..cols {
                    t[c * nh + r] = rows[r * cols + c];
                }
            }
            t
        };
        CompiledNetwork {
            hidden: nh,
            input_cols: transpose(g.input_to_hidden(), ni),
            recurrent_cols: transpose(g.hidden_to_hidden(), nh),
            output_rows: g.hidden_to_output().to_vec(),
            hidden_bias: g.hidden_bias().to_vec(),
            output_bias: g.output_bias().to_vec(),
            #[cfg(target_arch = "x86_64")]
            avx2: std::arch::is_x86_feature_detected!("avx2"),
        }
    }

    /// `next_hidden = ReLU(W_ih·input + W_hh·hidden + b_h)`,
    /// `out = W_ho·next_hidden + b_o`.
    pub(crate) fn step(
        &self,
        hidden: &[f64],
        input: &[f64],
        next_hidden: &mut [f64],
        out: &mut [f64],
    ) {
        #[cfg(target_arch = "x86_64")]
        if self.avx2 {
            // SAFETY: the CPU supports AVX2, checked at construction.
            unsafe { self.step_avx2(hidden, input, next_hidden, out) };
            return;
        }
        self.step_generic(hidden, input, next_hidden, out);
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn step_avx2(
        &self,
        hidden: &[f64],
        input: &[f64],
        next_hidden: &mut [f64],
        out: &mut [f64],
    ) {
        self.step_generic(hidden, input, next_hidden, out);
    }

    #[inline(always)]
    fn step_generic(
        &self,
        hidden: &[f64],
        input: &[f64],
        next_hidden: &mut [f64],
        out: &mut [f64],
    ) {
        let nh = self.hidden;
        next_hidden.copy_from_slice(&self.hidden_bias);
        for (col, &x) in self.input_cols.chunks_exact(nh).zip(input) {
            if x != 0.0 {
                axpy(next_hidden, col, x);
            }
        }
        for (col, &h) in self.recurrent_cols.chunks_exact(nh).zip(hidden) {
            if h != 0.0 {
                axpy(next_hidden, col, h);
            }
        }
        for v in next_hidden.iter_mut() {
            *v = v.max(0.0);
        }
        for ((slot, row), &b) in out
            .iter_mut()
            .zip(self.output_rows.chunks_exact(nh))
            .zip(&self.output_bias)
        {
            *slot = b + dot(row, next_hidden);
        }
    }
}

#[inline(always)]
fn axpy(acc: &mut [f64], col: &[f64], scale: f64) {
    for (a, &w) in acc.iter_mut().zip(col) {
        *a += w * scale;
    }
}

#[inline(always)]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Index of the largest value; the first one wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
