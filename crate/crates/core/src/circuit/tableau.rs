//! Stabilizer tableau with destabilizers.
//!
//! Rows `0..n` are destabilizers and rows `n..2n` stabilizers. Each row is a
//! signed Pauli with packed x and z parts. Row multiplication tracks the sign
//! with a word-parallel phase count, so a single rowsum costs O(n/64).

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector};
use crate::pauli::{Pauli, PauliOp, SignedPauli};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("generator {0} has length {1}, expected {2}")]
    Length(usize, usize, usize),
    #[error("generators {0} and {1} anticommute")]
    NonCommuting(usize, usize),
    #[error("generators are not independent")]
    Dependent,
    #[error("no Pauli correction realizes the requested signs")]
    Unsatisfiable,
}

/// Outcome of a Pauli measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    /// Outcome bit: `true` is the −1 eigenvalue.
    pub value: bool,
    /// Whether the outcome was random (and so taken from the supplied coin).
    pub random: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    w: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    signs: Vec<bool>,
}

impl Tableau {
    /// The all-zeros state `|0…0⟩`.
    pub fn new(n: usize) -> Self {
        let w = n.div_ceil(64).max(1);
        let mut t = Self { n, w, xs: vec![0; 2 * n * w], zs: vec![0; 2 * n * w], signs: vec![false; 2 * n] };
        for q in 0..n {
            t.xs[q * w + q / 64] |= 1 << (q % 64);
            t.zs[(n + q) * w + q / 64] |= 1 << (q % 64);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn xrow(&self, r: usize) -> &[u64] {
        &self.xs[r * self.w..(r + 1) * self.w]
    }

    #[inline]
    fn zrow(&self, r: usize) -> &[u64] {
        &self.zs[r * self.w..(r + 1) * self.w]
    }

    #[inline]
    fn bit(words: &[u64], q: usize) -> bool {
        (words[q / 64] >> (q % 64)) & 1 == 1
    }

    fn row_pauli(&self, r: usize) -> SignedPauli {
        let mut x = BitVector::zeros(self.n);
        let mut z = BitVector::zeros(self.n);
        for q in 0..self.n {
            if Self::bit(self.xrow(r), q) {
                x.set(q, true);
            }
            if Self::bit(self.zrow(r), q) {
                z.set(q, true);
            }
        }
        SignedPauli::new(PauliOp::new(x, z), self.signs[r])
    }

    /// The `n` stabilizer generators.
    pub fn stabilizers(&self) -> Vec<SignedPauli> {
        (self.n..2 * self.n).map(|r| self.row_pauli(r)).collect()
    }

    /// A stabilizer state reached from `|0…0⟩` by `gates` random H, S and CNOT gates.
    pub fn random_state<R: rand::Rng + ?Sized>(n: usize, gates: usize, rng: &mut R) -> Tableau {
        let mut t = Tableau::new(n);
        for _ in 0..gates {
            match rng.gen_range(0..3) {
                0 => t.h(rng.gen_range(0..n)),
                1 => t.s(rng.gen_range(0..n)),
                _ if n > 1 => {
                    let c = rng.gen_range(0..n);
                    let d = (c + rng.gen_range(1..n)) % n;
                    t.cnot(c, d);
                }
                _ => t.h(0),
            }
        }
        for q in 0..n {
            if rng.gen::<bool>() {
                t.apply_pauli1(q, Pauli::X);
            }
            if rng.gen::<bool>() {
                t.apply_pauli1(q, Pauli::Z);
            }
        }
        t
    }

    /// Phase exponent (mod 4) contributed by multiplying `(x1, z1)` into `(x2, z2)`.
    #[inline]
    fn phase_sum(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> i64 {
        let mut pos = 0i64;
        let mut neg = 0i64;
        for k in 0..x1.len() {
            let (a, b, c, d) = (x1[k], z1[k], x2[k], z2[k]);
            let y = a & b;
            let xo = a & !b;
            let zo = !a & b;
            let p = (y & d & !c) | (xo & d & c) | (zo & c & !d);
            let m = (y & c & !d) | (xo & d & !c) | (zo & c & d);
            pos += p.count_ones() as i64;
            neg += m.count_ones() as i64;
        }
        pos - neg
    }

    /// Row `h` ← row `i` · row `h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.w;
        let g = Self::phase_sum(
            &self.xs[i * w..(i + 1) * w],
            &self.zs[i * w..(i + 1) * w],
            &self.xs[h * w..(h + 1) * w],
            &self.zs[h * w..(h + 1) * w],
        );
        let total = 2 * self.signs[h] as i64 + 2 * self.signs[i] as i64 + g;
        self.signs[h] = total.rem_euclid(4) == 2;
        for k in 0..w {
            self.xs[h * w + k] ^= self.xs[i * w + k];
            self.zs[h * w + k] ^= self.zs[i * w + k];
        }
    }

    fn anticommutes_row(&self, r: usize, p: &PauliOp) -> bool {
        let px = p.x.words();
        let pz = p.z.words();
        let (xr, zr) = (self.xrow(r), self.zrow(r));
        let mut acc = 0u64;
        for k in 0..self.w.min(px.len()) {
            acc ^= (xr[k] & pz[k]) ^ (zr[k] & px[k]);
        }
        acc.count_ones() & 1 == 1
    }

    #[inline]
    fn for_rows(&mut self, mut f: impl FnMut(&mut [u64], &mut [u64], &mut bool)) {
        let w = self.w;
        for r in 0..2 * self.n {
            let (xs, zs) = (&mut self.xs[r * w..(r + 1) * w], &mut self.zs[r * w..(r + 1) * w]);
            f(xs, zs, &mut self.signs[r]);
        }
    }

    pub fn h(&mut self, q: usize) {
        let (k, m) = (q / 64, 1u64 << (q % 64));
        self.for_rows(|x, z, s| {
            let (xb, zb) = (x[k] & m != 0, z[k] & m != 0);
            *s ^= xb & zb;
            if xb != zb {
                x[k] ^= m;
                z[k] ^= m;
            }
        });
    }

    pub fn s(&mut self, q: usize) {
        let (k, m) = (q / 64, 1u64 << (q % 64));
        self.for_rows(|x, z, s| {
            let (xb, zb) = (x[k] & m != 0, z[k] & m != 0);
            *s ^= xb & zb;
            if xb {
                z[k] ^= m;
            }
        });
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        assert_ne!(c, t);
        let (kc, mc) = (c / 64, 1u64 << (c % 64));
        let (kt, mt) = (t / 64, 1u64 << (t % 64));
        self.for_rows(|x, z, s| {
            let xc = x[kc] & mc != 0;
            let zc = z[kc] & mc != 0;
            let xt = x[kt] & mt != 0;
            let zt = z[kt] & mt != 0;
            *s ^= xc & zt & !(xt ^ zc);
            if xc {
                x[kt] ^= mt;
            }
            if zt {
                z[kc] ^= mc;
            }
        });
    }

    /// Applies a single-qubit Pauli (conjugation flips signs of anticommuting rows).
    pub fn apply_pauli1(&mut self, q: usize, p: Pauli) {
        let (px, pz) = p.bits();
        let (k, m) = (q / 64, 1u64 << (q % 64));
        self.for_rows(|x, z, s| {
            let xb = x[k] & m != 0;
            let zb = z[k] & m != 0;
            *s ^= (xb & pz) ^ (zb & px);
        });
    }

    /// Applies an n-qubit Pauli.
    pub fn apply_pauli(&mut self, p: &PauliOp) {
        for r in 0..2 * self.n {
            if self.anticommutes_row(r, p) {
                self.signs[r] ^= true;
            }
        }
    }

    /// Measures a Pauli observable. A random outcome takes the value `coin`.
    pub fn measure_pauli(&mut self, p: &PauliOp, coin: bool) -> Measurement {
        assert_eq!(p.len(), self.n);
        let n = self.n;
        let w = self.w;
        if let Some(pr) = (n..2 * n).find(|&r| self.anticommutes_row(r, p)) {
            for r in 0..2 * n {
                if r != pr && self.anticommutes_row(r, p) {
                    self.rowsum(r, pr);
                }
            }
            // Destabilizer takes the old stabilizer; stabilizer becomes ±P.
            let d = pr - n;
            self.xs.copy_within(pr * w..(pr + 1) * w, d * w);
            self.zs.copy_within(pr * w..(pr + 1) * w, d * w);
            self.signs[d] = self.signs[pr];
            self.xs[pr * w..(pr + 1) * w].fill(0);
            self.zs[pr * w..(pr + 1) * w].fill(0);
            self.xs[pr * w..pr * w + p.x.words().len()].copy_from_slice(p.x.words());
            self.zs[pr * w..pr * w + p.z.words().len()].copy_from_slice(p.z.words());
            self.signs[pr] = coin;
            Measurement { value: coin, random: true }
        } else {
            Measurement { value: self.deterministic_sign(p), random: false }
        }
    }

    /// Sign of `p` as an element of the stabilizer group, assuming it commutes with every stabilizer.
    fn deterministic_sign(&self, p: &PauliOp) -> bool {
        let w = self.w;
        let n = self.n;
        let mut sx = vec![0u64; w];
        let mut sz = vec![0u64; w];
        let mut sign = false;
        for d in 0..n {
            if self.anticommutes_row(d, p) {
                let r = n + d;
                let g = Self::phase_sum(self.xrow(r), self.zrow(r), &sx, &sz);
                let total = 2 * sign as i64 + 2 * self.signs[r] as i64 + g;
                sign = total.rem_euclid(4) == 2;
                for k in 0..w {
                    sx[k] ^= self.xs[r * w + k];
                    sz[k] ^= self.zs[r * w + k];
                }
            }
        }
        debug_assert_eq!(&sx[..p.x.words().len()], p.x.words());
        sign
    }

    /// `Some(sign)` if ±p stabilizes the state, `None` if the outcome would be random.
    pub fn expectation(&self, p: &PauliOp) -> Option<bool> {
        if (self.n..2 * self.n).any(|r| self.anticommutes_row(r, p)) {
            None
        } else {
            Some(self.deterministic_sign(p))
        }
    }

    pub fn measure_z(&mut self, q: usize, coin: bool) -> Measurement {
        self.measure_pauli(&PauliOp::z_on(self.n, &[q]), coin)
    }

    /// Resets qubit `q` to `|0⟩`. `coin` resolves the intermediate measurement.
    pub fn reset(&mut self, q: usize, coin: bool) {
        if self.measure_z(q, coin).value {
            self.apply_pauli1(q, Pauli::X);
        }
    }

    /// Tensor product `a ⊗ b`; qubits of `b` follow those of `a`.
    pub fn tensor(a: &Tableau, b: &Tableau) -> Tableau {
        let n = a.n + b.n;
        let mut t = Tableau::new(n);
        let w = t.w;
        t.xs.fill(0);
        t.zs.fill(0);
        let place = |src: &Tableau, src_row: usize, dst_row: usize, offset: usize, t: &mut Tableau| {
            for q in 0..src.n {
                if Self::bit(src.xrow(src_row), q) {
                    let qq = q + offset;
                    t.xs[dst_row * w + qq / 64] |= 1 << (qq % 64);
                }
                if Self::bit(src.zrow(src_row), q) {
                    let qq = q + offset;
                    t.zs[dst_row * w + qq / 64] |= 1 << (qq % 64);
                }
            }
            t.signs[dst_row] = src.signs[src_row];
        };
        for i in 0..a.n {
            place(a, i, i, 0, &mut t);
            place(a, a.n + i, n + i, 0, &mut t);
        }
        for i in 0..b.n {
            place(b, i, a.n + i, a.n, &mut t);
            place(b, b.n + i, n + a.n + i, a.n, &mut t);
        }
        t
    }

    /// A state stabilized by the given commuting, independent signed generators.
    ///
    /// Fewer than `n` generators leave the remaining degrees of freedom in a
    /// fixed but unspecified stabilizer state.
    pub fn from_generators(n: usize, gens: &[SignedPauli]) -> Result<Tableau, TableauError> {
        for (i, g) in gens.iter().enumerate() {
            if g.op.len() != n {
                return Err(TableauError::Length(i, g.op.len(), n));
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if !gens[i].op.commutes_with(&gens[j].op) {
                    return Err(TableauError::NonCommuting(i, j));
                }
            }
        }
        let sym_rows: Vec<BitVector> = gens.iter().map(|g| g.op.x.concat(&g.op.z)).collect();
        let sym = BitMatrix::from_rows(2 * n, sym_rows).expect("consistent lengths");
        if sym.rank() != gens.len() {
            return Err(TableauError::Dependent);
        }
        let mut t = Tableau::new(n);
        let mut wrong = BitVector::zeros(gens.len());
        for (i, g) in gens.iter().enumerate() {
            let m = t.measure_pauli(&g.op, g.sign);
            if m.value != g.sign {
                wrong.set(i, true);
            }
        }
        if !wrong.is_zero() {
            // Find C with ⟨C, g_i⟩ = wrong_i; C = (cx | cz), ⟨C, g⟩ = cx·gz + cz·gx.
            let rows: Vec<BitVector> = gens.iter().map(|g| g.op.z.concat(&g.op.x)).collect();
            let a = BitMatrix::from_rows(2 * n, rows).expect("consistent lengths");
            let c = a.solve(&wrong).expect("dimensions agree").ok_or(TableauError::Unsatisfiable)?;
            let fix = PauliOp::new(c.slice(0, n), c.slice(n, 2 * n));
            t.apply_pauli(&fix);
        }
        debug_assert!(gens.iter().all(|g| t.expectation(&g.op) == Some(g.sign)));
        Ok(t)
    }

    /// Whether both tableaus describe the same stabilizer state.
    pub fn same_state(&self, other: &Tableau) -> bool {
        self.n == other.n && self.stabilizers().iter().all(|g| other.expectation(&g.op) == Some(g.sign))
    }
}
