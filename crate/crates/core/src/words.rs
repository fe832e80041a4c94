//! Words in a finite generator set: enumeration, identity search and
//! covering-radius estimates on sampled rotations.

use std::f64::consts::PI;
use std::fmt;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{classify_numeric, spectrum_angles, AngleKind, DEFAULT_Q_MAX, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::matrix::RotationMatrix;

/// Default ceiling on the number of evaluated words.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Largest generator order that `generator_order` will certify.
pub const ORDER_CAP: u64 = 10_000;

pub const HISTOGRAM_BINS: usize = 16;

/// A freely reduced word `g_{i₁}^{e₁} g_{i₂}^{e₂} ⋯`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<(usize, i64)>,
}

impl Word {
    /// Freely reduces the letters: zero exponents are dropped and neighbours on the same generator merged.
    pub fn new(letters: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for (g, e) in letters {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.0 == g => {
                    last.1 += e;
                    if last.1 == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        Self { letters: out }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn letters(&self) -> &[(usize, i64)] {
        &self.letters
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Sum of the absolute exponents.
    pub fn weight(&self) -> u64 {
        self.letters.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.iter().all(|(_, e)| *e != 0) && self.letters.windows(2).all(|w| w[0].0 != w[1].0)
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.letters.iter().chain(&other.letters).copied())
    }

    pub fn inverse(&self) -> Word {
        Word::new(self.letters.iter().rev().map(|&(g, e)| (g, -e)))
    }

    /// Exponents reduced into `1..n` for generators of finite order `n`.
    pub fn reduce_mod(&self, orders: &[Option<u64>]) -> Word {
        Word::new(self.letters.iter().map(|&(g, e)| match orders.get(g).copied().flatten() {
            Some(n) => (g, e.rem_euclid(n as i64)),
            None => (g, e),
        }))
    }

    pub fn evaluate(&self, generators: &[RotationMatrix]) -> Result<RotationMatrix> {
        let n = generators.first().map_or(0, RotationMatrix::dim);
        let mut acc = RotationMatrix::identity(n);
        for &(g, e) in &self.letters {
            let m = generators.get(g).ok_or_else(|| Error::Index(format!("generator {g} of {}", generators.len())))?;
            acc = acc.mul(&power(m, e));
        }
        Ok(acc)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for (k, (g, e)) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, "·")?;
            }
            if *e == 1 {
                write!(f, "g{g}")?;
            } else {
                write!(f, "g{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Which exponents a letter may carry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "k", rename_all = "snake_case")]
pub enum ExponentPolicy {
    /// `1..n` for a generator of finite order `n`, otherwise `±1`.
    #[default]
    Orders,
    /// `±1, …, ±k` for every generator.
    Symmetric(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordOptions {
    pub policy: ExponentPolicy,
    pub budget: u128,
}

impl Default for WordOptions {
    fn default() -> Self {
        Self { policy: ExponentPolicy::Orders, budget: DEFAULT_BUDGET }
    }
}

/// Binary powering; keeps exact mirrors.
fn power(m: &RotationMatrix, e: i64) -> RotationMatrix {
    let mut base = if e < 0 { m.inverse() } else { m.clone() };
    let mut k = e.unsigned_abs();
    let mut acc = RotationMatrix::identity(m.dim());
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.mul(&base);
        }
    }
    acc
}

/// The order of a rotation, if finite and at most `ORDER_CAP`.
pub fn generator_order(r: &RotationMatrix) -> Option<u64> {
    let spectrum = spectrum_angles(r).ok()?;
    let mut order = 1u64;
    for &a in &spectrum.angles {
        if a < crate::angle::ZERO_ANGLE_TOL {
            continue;
        }
        let kind = classify_numeric(a, DEFAULT_Q_MAX, DEFAULT_TOL).kind;
        if !matches!(kind, AngleKind::RationalPi { .. }) {
            return None;
        }
        order = order.lcm(&kind.rotation_order()?);
        if order > ORDER_CAP {
            return None;
        }
    }
    power(r, order as i64).is_identity(1e-8).then_some(order)
}

fn exponent_set(order: Option<u64>, policy: ExponentPolicy) -> Vec<i64> {
    match (policy, order) {
        (ExponentPolicy::Orders, Some(n)) => (1..n as i64).collect(),
        (ExponentPolicy::Orders, None) => vec![1, -1],
        (ExponentPolicy::Symmetric(k), _) => (1..=k as i64).flat_map(|e| [e, -e]).collect(),
    }
}

/// Generator powers available as letters, grouped by generator.
struct Alphabet {
    letters: Vec<Vec<(i64, RotationMatrix)>>,
}

impl Alphabet {
    fn new(generators: &[RotationMatrix], policy: ExponentPolicy) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::Precondition("empty generator set".into()));
        };
        let n = first.dim();
        if let Some(bad) = generators.iter().find(|g| g.dim() != n) {
            return Err(Error::Dimension { expected: n, found: bad.dim() });
        }
        let letters = generators
            .iter()
            .map(|g| {
                let order = match policy {
                    ExponentPolicy::Orders => generator_order(g),
                    ExponentPolicy::Symmetric(_) => None,
                };
                exponent_set(order, policy).into_iter().map(|e| (e, power(g, e))).collect()
            })
            .collect();
        Ok(Self { letters })
    }

    /// Number of reduced words of each length `0..=max_len`.
    fn shell_counts(&self, max_len: usize) -> Vec<u128> {
        let sizes: Vec<u128> = self.letters.iter().map(|l| l.len() as u128).collect();
        let mut ending: Vec<u128> = sizes.clone();
        let mut counts = vec![1, ending.iter().sum()];
        for _ in 1..max_len {
            let total: u128 = ending.iter().sum();
            ending = sizes.iter().zip(&ending).map(|(s, e)| s.saturating_mul(total - e)).collect();
            counts.push(ending.iter().fold(0u128, |a, b| a.saturating_add(*b)));
        }
        counts.truncate(max_len + 1);
        counts
    }

    fn check_budget(&self, max_len: usize, budget: u128) -> Result<()> {
        let projected = self.shell_counts(max_len).iter().fold(0u128, |a, b| a.saturating_add(*b));
        if projected > budget {
            return Err(Error::Budget { projected, ceiling: budget });
        }
        Ok(())
    }

    /// Reduced one-letter extensions of every word in a shell.
    fn extend(&self, shell: &[(Word, RotationMatrix)]) -> Vec<(Word, RotationMatrix)> {
        shell
            .par_iter()
            .flat_map_iter(|(w, m)| {
                let last = w.letters.last().map(|l| l.0);
                self.letters.iter().enumerate().filter(move |(g, _)| Some(*g) != last).flat_map(move |(g, ls)| {
                    ls.iter().map(move |(e, p)| {
                        let mut letters = w.letters.clone();
                        letters.push((g, *e));
                        (Word { letters }, m.mul(p))
                    })
                })
            })
            .collect()
    }
}

/// Breadth-first stream of the nonempty reduced words of length at most `max_len`.
pub struct WordStream {
    alphabet: Alphabet,
    max_len: usize,
    len: usize,
    shell: Vec<(Word, RotationMatrix)>,
    next: usize,
}

impl Iterator for WordStream {
    type Item = (Word, RotationMatrix);

    fn next(&mut self) -> Option<Self::Item> {
        while self.next == self.shell.len() {
            if self.len == self.max_len || self.shell.is_empty() {
                return None;
            }
            self.shell = self.alphabet.extend(&self.shell);
            self.len += 1;
            self.next = 0;
        }
        self.next += 1;
        Some(self.shell[self.next - 1].clone())
    }
}

pub fn enumerate_words(generators: &[RotationMatrix], max_len: usize, options: &WordOptions) -> Result<WordStream> {
    if max_len == 0 {
        return Err(Error::Precondition("max_len must be at least 1".into()));
    }
    let alphabet = Alphabet::new(generators, options.policy)?;
    alphabet.check_budget(max_len, options.budget)?;
    let n = generators[0].dim();
    let shell = vec![(Word::empty(), RotationMatrix::identity(n))];
    // the empty word seeds the first shell but is not yielded
    Ok(WordStream { alphabet, max_len, len: 0, next: 1, shell })
}

/// Projected number of nonempty reduced words of length at most `max_len`.
pub fn projected_word_count(generators: &[RotationMatrix], max_len: usize, policy: ExponentPolicy) -> Result<u128> {
    let a = Alphabet::new(generators, policy)?;
    Ok(a.shell_counts(max_len).iter().skip(1).fold(0u128, |x, y| x.saturating_add(*y)))
}

/// The first nonempty reduced word, in breadth-first order, that evaluates to the identity.
/// Exact mirrors on every generator make the comparison exact and `tol` unused.
pub fn identity_word_search(
    generators: &[RotationMatrix],
    max_len: usize,
    tol: f64,
    options: &WordOptions,
) -> Result<Option<Word>> {
    if max_len == 0 {
        return Err(Error::Precondition("max_len must be at least 1".into()));
    }
    let alphabet = Alphabet::new(generators, options.policy)?;
    alphabet.check_budget(max_len, options.budget)?;
    let n = generators[0].dim();
    let mut shell = vec![(Word::empty(), RotationMatrix::identity(n))];
    for _ in 0..max_len {
        shell = alphabet.extend(&shell);
        if let Some(i) = shell.par_iter().position_first(|(_, m)| m.is_identity(tol)) {
            return Ok(Some(shell.swap_remove(i).0));
        }
        if shell.is_empty() {
            break;
        }
    }
    Ok(None)
}

/// Nearest-word distances of the sampled rotations at one word length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub max_len: usize,
    pub sample_count: usize,
    pub seed: u64,
    pub words: u128,
    /// Largest nearest-word distance, in radians.
    pub covering_radius: f64,
    pub mean_distance: f64,
    /// Counts of nearest-word distances in equal bins over `[0, π]`.
    pub histogram: Vec<usize>,
}

/// Haar-distributed rotations of dimension 3 (one unit quaternion) or 4 (a pair acting by `x ↦ p x q̄`).
pub fn haar_samples(n: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| match n {
            3 => Ok(quaternion_rotation(&random_quaternion(&mut rng))),
            4 => {
                let p = random_quaternion(&mut rng);
                let q = random_quaternion(&mut rng);
                Ok(left_right(&p, &q))
            }
            _ => Err(Error::Dimension { expected: 3, found: n }),
        })
        .collect()
}

/// Shoemake's uniform unit quaternion `(w, x, y, z)`.
fn random_quaternion(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (t2, t3) = (2.0 * PI * u2, 2.0 * PI * u3);
    [b * t3.cos(), a * t2.sin(), a * t2.cos(), b * t3.sin()]
}

fn quaternion_rotation(q: &[f64; 4]) -> Vec<f64> {
    let [w, x, y, z] = *q;
    vec![
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    ]
}

/// Matrix of `x ↦ p x q̄` on quaternions identified with R⁴.
fn left_right(p: &[f64; 4], q: &[f64; 4]) -> Vec<f64> {
    let [a, b, c, d] = *p;
    let left = [[a, -b, -c, -d], [b, a, -d, c], [c, d, a, -b], [d, -c, b, a]];
    let [w, x, y, z] = *q;
    // right multiplication by q̄
    let right = [[w, x, y, z], [-x, w, -z, y], [-y, z, w, -x], [-z, -y, x, w]];
    let mut out = vec![0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            out[i * 4 + j] = (0..4).map(|k| left[i][k] * right[k][j]).sum();
        }
    }
    out
}

/// Rotation-angle distance from the trace of `R Wᵀ`; exact for a rotation in one plane.
pub fn trace_distance(trace: f64, n: usize) -> f64 {
    ((trace - (n as f64 - 2.0)) / 2.0).clamp(-1.0, 1.0).acos()
}

fn flat(m: &RotationMatrix) -> Vec<f64> {
    let n = m.dim();
    (0..n * n).map(|k| m.matrix()[(k / n, k % n)]).collect()
}

fn mul_flat(a: &[f64], b: &[f64], n: usize, out: &mut [f64]) {
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| a[i * n + k] * b[k * n + j]).sum();
        }
    }
}

const CHUNK: usize = 4096;

/// Largest `tr(R Wᵀ)` per word length and sample, accumulated over chunks of words.
struct Best {
    nn: usize,
    samples: usize,
    by_len: Vec<f64>,
}

impl Best {
    fn new(nn: usize, samples: usize, max_len: usize) -> Self {
        Self { nn, samples, by_len: vec![f64::NEG_INFINITY; (max_len + 1) * samples] }
    }

    fn merge(mut self, other: Best) -> Best {
        for (a, b) in self.by_len.iter_mut().zip(other.by_len) {
            *a = a.max(b);
        }
        self
    }

    fn absorb(&mut self, samples: &[f64], words: &[f64], lens: &[usize]) {
        match self.nn {
            9 => self.absorb_n::<9>(samples, words, lens),
            16 => self.absorb_n::<16>(samples, words, lens),
            _ => unreachable!("samples exist only for 3 and 4 modes"),
        }
    }

    fn absorb_n<const NN: usize>(&mut self, samples: &[f64], words: &[f64], lens: &[usize]) {
        for s in 0..self.samples {
            let r: &[f64; NN] = samples[s * NN..(s + 1) * NN].try_into().unwrap();
            for (w, &len) in words.chunks_exact(NN).zip(lens) {
                let mut t = 0.0;
                for k in 0..NN {
                    t += r[k] * w[k];
                }
                let slot = &mut self.by_len[len * self.samples + s];
                if t > *slot {
                    *slot = t;
                }
            }
        }
    }
}

/// Depth-first enumeration below one prefix, flushing evaluated words in chunks.
struct Walker<'a> {
    n: usize,
    max_len: usize,
    letters: &'a [Vec<Vec<f64>>],
    samples: &'a [f64],
    words: Vec<f64>,
    lens: Vec<usize>,
    best: Best,
}

impl Walker<'_> {
    fn push(&mut self, m: &[f64], len: usize) {
        self.words.extend_from_slice(m);
        self.lens.push(len);
        if self.lens.len() == CHUNK {
            self.flush();
        }
    }

    fn flush(&mut self) {
        self.best.absorb(self.samples, &self.words, &self.lens);
        self.words.clear();
        self.lens.clear();
    }

    fn walk(&mut self, m: &[f64], last: usize, len: usize) {
        if len == self.max_len {
            return;
        }
        let nn = self.n * self.n;
        let mut next = vec![0.0; nn];
        for g in 0..self.letters.len() {
            if g == last {
                continue;
            }
            for p in &self.letters[g] {
                mul_flat(m, p, self.n, &mut next);
                self.push(&next, len + 1);
                let copy = next.clone();
                self.walk(&copy, g, len + 1);
            }
        }
    }
}

/// Coverage reports at each requested word length over one set of seeded samples.
pub fn covering_profile(
    generators: &[RotationMatrix],
    lengths: &[usize],
    samples: usize,
    seed: u64,
    options: &WordOptions,
) -> Result<Vec<CoverageReport>> {
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is required".into()));
    }
    let max_len = lengths.iter().copied().max().unwrap_or(0);
    let alphabet = Alphabet::new(generators, options.policy)?;
    alphabet.check_budget(max_len, options.budget)?;
    let n = generators[0].dim();
    let nn = n * n;
    let sample_data: Vec<f64> = haar_samples(n, samples, seed)?.concat();
    let letters: Vec<Vec<Vec<f64>>> =
        alphabet.letters.iter().map(|ls| ls.iter().map(|(_, m)| flat(m)).collect()).collect();
    let identity = flat(&RotationMatrix::identity(n));

    let mut roots: Vec<(usize, Vec<f64>)> = Vec::new();
    for (g, ls) in letters.iter().enumerate() {
        for m in ls {
            roots.push((g, m.clone()));
        }
    }
    let walker = |_: ()| Walker {
        n,
        max_len,
        letters: &letters,
        samples: &sample_data,
        words: Vec::with_capacity(CHUNK * nn),
        lens: Vec::with_capacity(CHUNK),
        best: Best::new(nn, samples, max_len),
    };
    let mut best = if max_len == 0 {
        Best::new(nn, samples, 0)
    } else {
        roots
            .par_iter()
            .map(|(g, m)| {
                let mut w = walker(());
                w.push(m, 1);
                w.walk(m, *g, 1);
                w.flush();
                w.best
            })
            .reduce(|| Best::new(nn, samples, max_len), Best::merge)
    };
    best.absorb(&sample_data, &identity, &[0]);

    let counts = alphabet.shell_counts(max_len);
    let mut reports = Vec::with_capacity(lengths.len());
    for &len in lengths {
        let mut distances = Vec::with_capacity(samples);
        for s in 0..samples {
            let t = (0..=len).map(|l| best.by_len[l * samples + s]).fold(f64::NEG_INFINITY, f64::max);
            distances.push(trace_distance(t, n));
        }
        let mut histogram = vec![0; HISTOGRAM_BINS];
        for d in &distances {
            let bin = ((d / PI) * HISTOGRAM_BINS as f64) as usize;
            histogram[bin.min(HISTOGRAM_BINS - 1)] += 1;
        }
        reports.push(CoverageReport {
            max_len: len,
            sample_count: samples,
            seed,
            words: counts[..=len].iter().sum(),
            covering_radius: distances.iter().copied().fold(0.0, f64::max),
            mean_distance: distances.iter().sum::<f64>() / samples as f64,
            histogram,
        });
    }
    Ok(reports)
}

pub fn covering_estimate(
    generators: &[RotationMatrix],
    max_len: usize,
    samples: usize,
    seed: u64,
    options: &WordOptions,
) -> Result<CoverageReport> {
    Ok(covering_profile(generators, &[max_len], samples, seed, options)?.remove(0))
}
