//! Feed-forward networks with hand-written backprop and Adam.
//!
//! Hidden layers use the rectifier, the output layer is linear. Weights are
//! stored input-major (`in x out`) so a batch `X` (rows are samples) maps to
//! `relu(X W + b)`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{s, Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng as _;

use crate::error::with_path;
use crate::seed;
use crate::{Error, Result};

/// Magic bytes at the start of a saved network.
pub const MAGIC: &[u8; 6] = b"SGMLP1";

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    pub(crate) weights: Vec<Array2<f64>>,
    pub(crate) biases: Vec<Array1<f64>>,
}

/// Parameter-shaped buffer: gradients, or optimizer moments.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Gradients {
    pub fn zeros_like(mlp: &Mlp) -> Gradients {
        Gradients {
            weights: mlp
                .weights
                .iter()
                .map(|w| Array2::zeros(w.raw_dim()))
                .collect(),
            biases: mlp
                .biases
                .iter()
                .map(|b| Array1::zeros(b.raw_dim()))
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            *a += b;
        }
    }

    pub fn scale(&mut self, k: f64) {
        self.weights.iter_mut().for_each(|w| *w *= k);
        self.biases.iter_mut().for_each(|b| *b *= k);
    }

    pub fn norm(&self) -> f64 {
        let sq: f64 = self
            .weights
            .iter()
            .map(|w| w.iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>()
            + self
                .biases
                .iter()
                .map(|b| b.iter().map(|x| x * x).sum::<f64>())
                .sum::<f64>();
        sq.sqrt()
    }

    /// Rescales so the global norm is at most `max_norm`.
    pub fn clip_norm(&mut self, max_norm: f64) {
        let n = self.norm();
        if n > max_norm && n > 0.0 {
            self.scale(max_norm / n);
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }
}

/// Layer inputs recorded by [`Mlp::forward_cached`] for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    inputs: Vec<Array2<f64>>,
    pub output: Array2<f64>,
}

/// Cache of [`Mlp::forward_pairs_cached`].
#[derive(Debug, Clone)]
pub struct PairCache {
    x: Array2<f64>,
    pairs: Vec<(usize, usize)>,
    inner: ForwardCache,
}

impl PairCache {
    pub fn output(&self) -> &Array2<f64> {
        &self.inner.output
    }
}

/// Builds a network with weights uniform in `±scale / sqrt(fan_in)` and zero biases.
pub fn mlp_init(sizes: &[usize], seed: u64, scale: f64) -> Result<Mlp> {
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(Error::Contract(format!("invalid layer sizes {sizes:?}")));
    }
    let mut rng = seed::rng(seed, 0x6d6c70);
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for w in sizes.windows(2) {
        let bound = scale / (w[0] as f64).sqrt();
        weights.push(Array2::from_shape_fn((w[0], w[1]), |_| {
            if bound > 0.0 {
                rng.gen_range(-bound..bound)
            } else {
                0.0
            }
        }));
        biases.push(Array1::zeros(w[1]));
    }
    Ok(Mlp {
        sizes: sizes.to_vec(),
        weights,
        biases,
    })
}

impl Mlp {
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_size(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn n_params(&self) -> usize {
        self.sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn biases_mut(&mut self) -> &mut [Array1<f64>] {
        &mut self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [Array2<f64>] {
        &mut self.weights
    }

    fn check_batch(&self, x: &ArrayView2<f64>) -> Result<()> {
        if x.ncols() != self.input_size() {
            return Err(Error::Contract(format!(
                "input has {} features, network expects {}",
                x.ncols(),
                self.input_size()
            )));
        }
        Ok(())
    }

    /// Batched forward pass; rows of `x` are samples.
    pub fn forward_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_batch(&x)?;
        let last = self.weights.len() - 1;
        let mut h = x.dot(&self.weights[0]) + &self.biases[0];
        for l in 1..=last {
            h.mapv_inplace(relu);
            h = h.dot(&self.weights[l]) + &self.biases[l];
        }
        Ok(h)
    }

    pub fn forward_cached(&self, x: ArrayView2<f64>) -> Result<ForwardCache> {
        self.check_batch(&x)?;
        let mut inputs = Vec::with_capacity(self.weights.len());
        let mut h = x.to_owned();
        for l in 0..self.weights.len() {
            let z = h.dot(&self.weights[l]) + &self.biases[l];
            inputs.push(h);
            h = if l + 1 < self.weights.len() {
                z.mapv(relu)
            } else {
                z
            };
        }
        Ok(ForwardCache { inputs, output: h })
    }

    /// Parameter gradients of `sum(upstream * output)` for the cached batch.
    pub fn backward_batch(
        &self,
        cache: &ForwardCache,
        upstream: ArrayView2<f64>,
    ) -> Result<Gradients> {
        if upstream.dim() != cache.output.dim() {
            return Err(Error::Contract(format!(
                "upstream gradient shape {:?} does not match output {:?}",
                upstream.dim(),
                cache.output.dim()
            )));
        }
        let mut grads = Gradients::zeros_like(self);
        let mut delta = upstream.to_owned();
        for l in (0..self.weights.len()).rev() {
            let input = &cache.inputs[l];
            grads.weights[l] = input.t().dot(&delta);
            grads.biases[l] = delta.sum_axis(Axis(0));
            if l > 0 {
                let mut back = delta.dot(&self.weights[l].t());
                // input[l] = relu(z[l-1]); the rectifier passes gradient where it is positive
                Zip::from(&mut back).and(input).for_each(|d, &a| {
                    if a <= 0.0 {
                        *d = 0.0;
                    }
                });
                delta = back;
            }
        }
        Ok(grads)
    }

    /// Forward pass over concatenated row pairs: sample `k` is
    /// `[x[pairs[k].0], x[pairs[k].1]]`. The first layer is split into the
    /// two halves so each row of `x` is multiplied once, however many pairs
    /// it appears in.
    pub fn forward_pairs_cached(
        &self,
        x: ArrayView2<f64>,
        pairs: &[(usize, usize)],
    ) -> Result<PairCache> {
        let d = x.ncols();
        if 2 * d != self.input_size() {
            return Err(Error::Contract(format!(
                "pair input has {} features, network expects {}",
                2 * d,
                self.input_size()
            )));
        }
        if pairs.iter().any(|&(a, b)| a >= x.nrows() || b >= x.nrows()) {
            return Err(Error::Contract("pair index out of range".into()));
        }
        let w0 = &self.weights[0];
        let left = x.dot(&w0.slice(s![..d, ..]));
        let right = x.dot(&w0.slice(s![d.., ..]));
        let width = w0.ncols();
        let mut z = Array2::zeros((pairs.len(), width));
        for (k, &(a, b)) in pairs.iter().enumerate() {
            let mut row = z.row_mut(k);
            row.assign(&self.biases[0]);
            row += &left.row(a);
            row += &right.row(b);
        }
        let mut inputs = Vec::with_capacity(self.weights.len());
        inputs.push(Array2::zeros((0, 0)));
        let mut h = z;
        for l in 1..self.weights.len() {
            h.mapv_inplace(relu);
            let next = h.dot(&self.weights[l]) + &self.biases[l];
            inputs.push(h);
            h = next;
        }
        Ok(PairCache {
            x: x.to_owned(),
            pairs: pairs.to_vec(),
            inner: ForwardCache { inputs, output: h },
        })
    }

    /// Parameter gradients of `sum(upstream * output)` for a pair batch.
    pub fn backward_pairs(
        &self,
        cache: &PairCache,
        upstream: ArrayView2<f64>,
    ) -> Result<Gradients> {
        let inner = &cache.inner;
        if upstream.dim() != inner.output.dim() {
            return Err(Error::Contract(format!(
                "upstream gradient shape {:?} does not match output {:?}",
                upstream.dim(),
                inner.output.dim()
            )));
        }
        let mut grads = Gradients::zeros_like(self);
        let mut delta = upstream.to_owned();
        for l in (1..self.weights.len()).rev() {
            let input = &inner.inputs[l];
            grads.weights[l] = input.t().dot(&delta);
            grads.biases[l] = delta.sum_axis(Axis(0));
            let mut back = delta.dot(&self.weights[l].t());
            Zip::from(&mut back).and(input).for_each(|d, &a| {
                if a <= 0.0 {
                    *d = 0.0;
                }
            });
            delta = back;
        }
        let (m, d) = cache.x.dim();
        let width = delta.ncols();
        let mut left = Array2::<f64>::zeros((m, width));
        let mut right = Array2::<f64>::zeros((m, width));
        for (k, &(a, b)) in cache.pairs.iter().enumerate() {
            let row = delta.row(k);
            let mut l = left.row_mut(a);
            l += &row;
            let mut r = right.row_mut(b);
            r += &row;
        }
        let xt = cache.x.t();
        grads.weights[0]
            .slice_mut(s![..d, ..])
            .assign(&xt.dot(&left));
        grads.weights[0]
            .slice_mut(s![d.., ..])
            .assign(&xt.dot(&right));
        grads.biases[0] = delta.sum_axis(Axis(0));
        Ok(grads)
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let view = ArrayView2::from_shape((1, x.len()), x).expect("row vector");
        Ok(self.forward_batch(view)?.into_raw_vec_and_offset().0)
    }

    /// Gradients of `upstream · forward(x)` with respect to every parameter.
    pub fn backward(&self, x: &[f64], upstream: &[f64]) -> Result<Gradients> {
        let view = ArrayView2::from_shape((1, x.len()), x).expect("row vector");
        let cache = self.forward_cached(view)?;
        let up = ArrayView2::from_shape((1, upstream.len()), upstream)
            .map_err(|e| Error::Contract(e.to_string()))?;
        self.backward_batch(&cache, up)
    }

    /// Parameters in layer order: weights (input-major) then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::Contract(format!(
                "{} parameters given, network has {}",
                params.len(),
                self.n_params()
            )));
        }
        let mut it = params.iter().copied();
        for (w, b) in self.weights.iter_mut().zip(&mut self.biases) {
            w.iter_mut().for_each(|x| *x = it.next().unwrap());
            b.iter_mut().for_each(|x| *x = it.next().unwrap());
        }
        Ok(())
    }

    /// Serializes as `SGMLP1`, a little-endian `u32` layer count, one `u32`
    /// per layer size, then every parameter as a little-endian `f64` in
    /// [`Mlp::params`] order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(10 + 4 * self.sizes.len() + 8 * self.n_params());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.sizes.len() as u32).to_le_bytes());
        for &s in &self.sizes {
            out.extend_from_slice(&(s as u32).to_le_bytes());
        }
        for p in self.params() {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Mlp> {
        let mut magic = [0u8; 6];
        bytes
            .read_exact(&mut magic)
            .map_err(|_| Error::Format("truncated header".into()))?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic bytes".into()));
        }
        let mut word = [0u8; 4];
        let mut read_u32 = |b: &mut &[u8]| -> Result<usize> {
            b.read_exact(&mut word)
                .map_err(|_| Error::Format("truncated header".into()))?;
            Ok(u32::from_le_bytes(word) as usize)
        };
        let n_layers = read_u32(&mut bytes)?;
        if n_layers > 64 {
            return Err(Error::Format(format!("implausible layer count {n_layers}")));
        }
        let sizes: Vec<usize> = (0..n_layers)
            .map(|_| read_u32(&mut bytes))
            .collect::<Result<_>>()?;
        let mut mlp = mlp_init(&sizes, 0, 0.0).map_err(|e| Error::Format(e.to_string()))?;
        if bytes.len() != 8 * mlp.n_params() {
            return Err(Error::Format(format!(
                "expected {} parameter bytes, found {}",
                8 * mlp.n_params(),
                bytes.len()
            )));
        }
        let params: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        mlp.set_params(&params)?;
        Ok(mlp)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path).map_err(with_path(path))?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Mlp> {
        Mlp::from_bytes(&fs::read(path).map_err(with_path(path))?)
    }
}

fn relu(x: f64) -> f64 {
    x.max(0.0)
}

/// Adam state for one network.
#[derive(Debug, Clone)]
pub struct OptState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    m: Gradients,
    v: Gradients,
}

impl OptState {
    pub fn new(mlp: &Mlp, lr: f64) -> OptState {
        OptState {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: Gradients::zeros_like(mlp),
            v: Gradients::zeros_like(mlp),
        }
    }
}

/// One bias-corrected Adam update.
pub fn opt_step(mlp: &mut Mlp, state: &mut OptState, grads: &Gradients) {
    state.step += 1;
    let t = state.step as i32;
    let (b1, b2) = (state.beta1, state.beta2);
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    let (lr, eps) = (state.lr, state.eps);
    let update = |p: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
    };
    for l in 0..mlp.weights.len() {
        Zip::from(&mut mlp.weights[l])
            .and(&mut state.m.weights[l])
            .and(&mut state.v.weights[l])
            .and(&grads.weights[l])
            .for_each(|p, m, v, &g| update(p, m, v, g));
        Zip::from(&mut mlp.biases[l])
            .and(&mut state.m.biases[l])
            .and(&mut state.v.biases[l])
            .and(&grads.biases[l])
            .for_each(|p, m, v, &g| update(p, m, v, g));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    /// Central finite differences of `upstream · forward(x)`.
    fn numeric_grad(mlp: &Mlp, x: &[f64], upstream: &[f64], h: f64) -> Vec<f64> {
        let base = mlp.params();
        let mut probe = mlp.clone();
        let objective = |m: &Mlp| -> f64 {
            m.forward(x)
                .unwrap()
                .iter()
                .zip(upstream)
                .map(|(y, g)| y * g)
                .sum()
        };
        (0..base.len())
            .map(|k| {
                let mut p = base.clone();
                p[k] += h;
                probe.set_params(&p).unwrap();
                let plus = objective(&probe);
                p[k] -= 2.0 * h;
                probe.set_params(&p).unwrap();
                let minus = objective(&probe);
                (plus - minus) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn init_is_seeded() {
        let a = mlp_init(&[4, 8, 3], 5, 1.0).unwrap();
        assert_eq!(a, mlp_init(&[4, 8, 3], 5, 1.0).unwrap());
        assert_ne!(a, mlp_init(&[4, 8, 3], 6, 1.0).unwrap());
        assert_eq!(a.n_params(), 67);
        assert!(mlp_init(&[4], 0, 1.0).is_err());
    }

    #[test]
    fn zero_scale_outputs_bias() {
        let mut m = mlp_init(&[3, 5, 2], 1, 0.0).unwrap();
        assert!(m.params().iter().all(|&p| p == 0.0));
        m.biases_mut()[1] = array![1.5, -0.5];
        assert_eq!(m.forward(&[0.3, -2.0, 7.0]).unwrap(), vec![1.5, -0.5]);
    }

    #[test]
    fn single_layer_is_affine() {
        let mut m = mlp_init(&[2, 2], 0, 0.0).unwrap();
        m.weights_mut()[0] = array![[1.0, 2.0], [3.0, 4.0]];
        m.biases_mut()[0] = array![0.5, -1.0];
        // y = W^T x + b with W input-major
        assert_eq!(
            m.forward(&[1.0, -1.0]).unwrap(),
            vec![1.0 - 3.0 + 0.5, 2.0 - 4.0 - 1.0]
        );
        let g = m.backward(&[1.0, -1.0], &[2.0, 3.0]).unwrap();
        assert_eq!(g.weights[0], array![[2.0, 3.0], [-2.0, -3.0]]);
        assert_eq!(g.biases[0], array![2.0, 3.0]);
    }

    #[test]
    fn forward_is_pure() {
        let m = mlp_init(&[6, 16, 16, 4], 3, 1.0).unwrap();
        let x = [0.1, -0.2, 0.3, 0.9, -1.0, 0.0];
        assert_eq!(m.forward(&x).unwrap(), m.forward(&x).unwrap());
        assert!(m.forward(&x[..5]).is_err());
    }

    #[test]
    fn dead_unit_blocks_gradient() {
        let mut m = mlp_init(&[1, 1, 1], 0, 0.0).unwrap();
        m.weights_mut()[0] = array![[1.0]];
        m.weights_mut()[1] = array![[2.0]];
        let g = m.backward(&[-3.0], &[1.0]).unwrap();
        assert_eq!(g.weights[0], array![[0.0]]);
        assert_eq!(g.biases[0], array![0.0]);
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = seed::rng(17, 0);
        for trial in 0..5 {
            let m = mlp_init(&[5, 7, 6, 3], trial, 1.5).unwrap();
            let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let up: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let analytic = m.backward(&x, &up).unwrap().flatten();
            let numeric = numeric_grad(&m, &x, &up, 1e-5);
            for (a, n) in analytic.iter().zip(&numeric) {
                assert!(
                    (a - n).abs() <= 1e-6 + 1e-4 * a.abs().max(n.abs()),
                    "{a} vs {n}"
                );
            }
        }
    }

    #[test]
    fn batch_gradients_sum_samples() {
        let m = mlp_init(&[3, 4, 2], 2, 1.0).unwrap();
        let x = array![[0.1, 0.2, 0.3], [-0.5, 0.4, 1.0]];
        let up = array![[1.0, -1.0], [0.5, 2.0]];
        let cache = m.forward_cached(x.view()).unwrap();
        let batch = m.backward_batch(&cache, up.view()).unwrap();
        let mut sum = m.backward(&[0.1, 0.2, 0.3], &[1.0, -1.0]).unwrap();
        sum.add_assign(&m.backward(&[-0.5, 0.4, 1.0], &[0.5, 2.0]).unwrap());
        for (a, b) in batch.flatten().iter().zip(sum.flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn adam_zero_gradient_is_noop() {
        let mut m = mlp_init(&[2, 3, 1], 4, 1.0).unwrap();
        let before = m.clone();
        let mut opt = OptState::new(&m, 1e-2);
        opt_step(&mut m, &mut opt, &Gradients::zeros_like(&before));
        assert_eq!(m, before);
    }

    #[test]
    fn adam_descends_quadratic() {
        // f(w) = w^2 through a bias-only network with zero weights.
        let mut m = mlp_init(&[1, 1], 0, 0.0).unwrap();
        m.biases_mut()[0] = array![1.0];
        let mut opt = OptState::new(&m, 0.1);
        let w = m.biases[0][0];
        let g = m.backward(&[0.0], &[2.0 * w]).unwrap();
        opt_step(&mut m, &mut opt, &g);
        assert!(m.biases[0][0].abs() < 1.0);
    }

    #[test]
    fn adam_fits_tiny_regression() {
        let mut m = mlp_init(&[2, 16, 1], 8, 1.0).unwrap();
        let mut opt = OptState::new(&m, 1e-2);
        let x = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let y = array![[0.0], [1.0], [1.0], [0.0]];
        let loss = |m: &Mlp| {
            let out = m.forward_batch(x.view()).unwrap();
            (&out - &y).mapv(|d| d * d).mean().unwrap()
        };
        for _ in 0..500 {
            let cache = m.forward_cached(x.view()).unwrap();
            let up = (&cache.output - &y) * (2.0 / 4.0);
            let g = m.backward_batch(&cache, up.view()).unwrap();
            opt_step(&mut m, &mut opt, &g);
        }
        assert!(loss(&m) < 1e-3, "loss {}", loss(&m));
    }

    #[test]
    fn pair_pass_matches_concatenation() {
        let m = mlp_init(&[6, 5, 4], 12, 1.0).unwrap();
        let x = array![[0.1, -0.4, 0.9], [1.0, 0.0, -1.0], [0.3, 0.3, 0.2]];
        let pairs = [(0, 1), (1, 0), (2, 2), (0, 2)];
        let cat = Array2::from_shape_fn((pairs.len(), 6), |(k, c)| {
            let (a, b) = pairs[k];
            if c < 3 {
                x[[a, c]]
            } else {
                x[[b, c - 3]]
            }
        });
        let pc = m.forward_pairs_cached(x.view(), &pairs).unwrap();
        let full = m.forward_cached(cat.view()).unwrap();
        for (a, b) in pc.output().iter().zip(full.output.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        let up = Array2::from_shape_fn((4, 4), |(i, j)| (i as f64 - j as f64) * 0.3);
        let gp = m.backward_pairs(&pc, up.view()).unwrap();
        let gf = m.backward_batch(&full, up.view()).unwrap();
        for (a, b) in gp.flatten().iter().zip(gf.flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(m.forward_pairs_cached(x.view(), &[(0, 3)]).is_err());
    }

    #[test]
    fn bytes_round_trip() {
        let m = mlp_init(&[3, 5, 2], 9, 1.0).unwrap();
        let bytes = m.to_bytes();
        assert_eq!(&bytes[..6], b"SGMLP1");
        assert_eq!(Mlp::from_bytes(&bytes).unwrap(), m);
        assert!(Mlp::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(Mlp::from_bytes(b"NOTMLP").is_err());
    }
}
