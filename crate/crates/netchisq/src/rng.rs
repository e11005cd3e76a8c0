//! Seedable random numbers and exact binomial sampling.
//!
//! The generator is xoshiro256++ (Blackman & Vigna) with its state
//! expanded from a 64-bit seed by SplitMix64, the seeding procedure the
//! xoshiro authors recommend. Both are pure integer arithmetic, so a
//! given seed produces the same stream on every platform; seed 0 is
//! valid. Binomial draws use the BINV inversion algorithm for small
//! mean counts and the BTPE acceptance-rejection algorithm of
//! Kachitvichyanukul & Schmeiser (1988) otherwise. Both sample the exact
//! binomial distribution, not a normal approximation, and both take
//! their transcendentals from `libm` so the draws are reproducible
//! bit-for-bit across platforms.

use crate::{Error, Result};
use alloc::format;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function: one mixing step over a 64-bit state.
#[inline]
pub(crate) fn splitmix_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The i-th value of the SplitMix64 stream seeded with `seed`.
#[inline]
pub(crate) fn splitmix_stream(seed: u64, i: u64) -> u64 {
    splitmix_mix(seed.wrapping_add(i.wrapping_add(1).wrapping_mul(GAMMA)))
}

/// Deterministic xoshiro256++ generator.
///
/// Single-owner mutable state; clone it or derive fresh seeds to run
/// independent streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rng {
    state: [u64; 4],
}

impl Rng {
    /// Creates a generator whose state is the seed expanded through
    /// SplitMix64. Equal seeds give equal streams.
    pub fn new(seed: u64) -> Self {
        let state = [
            splitmix_stream(seed, 0),
            splitmix_stream(seed, 1),
            splitmix_stream(seed, 2),
            splitmix_stream(seed, 3),
        ];
        Rng { state }
    }

    /// Next 64 uniformly distributed bits.
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Exact draw from Binomial(`trials`, `p`).
    ///
    /// Errors with [`Error::InvalidArgument`] unless `p` lies in [0, 1].
    pub fn sample_binomial(&mut self, trials: u64, p: f64) -> Result<u64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "binomial probability must lie in [0, 1], got {p}"
            )));
        }
        if trials == 0 || p == 0.0 {
            return Ok(0);
        }
        if p == 1.0 {
            return Ok(trials);
        }
        // Sample with success probability <= 1/2 and reflect if needed.
        let flipped = p > 0.5;
        let q = if flipped { 1.0 - p } else { p };
        let mean = trials as f64 * q;
        let draw = if mean < 10.0 {
            self.binomial_inversion(trials, q)
        } else {
            self.binomial_btpe(trials, q)
        };
        Ok(if flipped { trials - draw } else { draw })
    }

    /// BINV: walk the CDF from 0 upward. Expected cost O(n p); used only
    /// while n p < 10.
    fn binomial_inversion(&mut self, n: u64, p: f64) -> u64 {
        let s = p / (1.0 - p);
        let a = (n as f64 + 1.0) * s;
        // (1-p)^n without intermediate underflow
        let mut r = libm::exp(n as f64 * libm::log1p(-p));
        let mut u = self.next_f64();
        let mut x: u64 = 0;
        while u > r {
            u -= r;
            x += 1;
            if x >= n {
                // support ends at n; float residue lands here
                return n;
            }
            r *= a / x as f64 - s;
        }
        x
    }

    /// BTPE: triangle / parallelogram / exponential-tails envelope with
    /// squeeze acceptance. Requires 0 < p <= 1/2 and n p >= 10.
    fn binomial_btpe(&mut self, n: u64, p: f64) -> u64 {
        let nf = n as f64;
        let r = p;
        let q = 1.0 - r;
        let nrq = nf * r * q;
        let fm = nf * r + r;
        let m = libm::floor(fm);
        let p1 = libm::floor(2.195 * libm::sqrt(nrq) - 4.6 * q) + 0.5;
        let xm = m + 0.5;
        let xl = xm - p1;
        let xr = xm + p1;
        let c = 0.134 + 20.5 / (15.3 + m);
        let al = (fm - xl) / (fm - xl * r);
        let lambda_l = al * (1.0 + 0.5 * al);
        let ar = (xr - fm) / (xr * q);
        let lambda_r = ar * (1.0 + 0.5 * ar);
        let p2 = p1 * (1.0 + 2.0 * c);
        let p3 = p2 + c / lambda_l;
        let p4 = p3 + c / lambda_r;

        loop {
            let u = self.next_f64() * p4;
            let mut v = self.next_f64();
            let y: f64;
            if u <= p1 {
                // central triangle: accept immediately
                return (xm - p1 * v + u) as u64;
            } else if u <= p2 {
                // parallelogram
                let x = xl + (u - p1) / c;
                v = v * c + 1.0 - libm::fabs(x - xm) / p1;
                if v > 1.0 || v <= 0.0 {
                    continue;
                }
                y = libm::floor(x);
            } else if u <= p3 {
                // left exponential tail
                y = libm::floor(xl + libm::log(v) / lambda_l);
                if y < 0.0 {
                    continue;
                }
                v = v * (u - p2) * lambda_l;
            } else {
                // right exponential tail
                y = libm::floor(xr - libm::log(v) / lambda_r);
                if y > nf {
                    continue;
                }
                v = v * (u - p3) * lambda_r;
            }

            // Accept y iff v <= f(y)/f(m).
            let k = libm::fabs(y - m);
            if k <= 20.0 || k >= nrq / 2.0 - 1.0 {
                // evaluate the pmf ratio by its recurrence
                let s = r / q;
                let a = s * (nf + 1.0);
                let mut f = 1.0;
                let mi = m as u64;
                let yi = y as u64;
                if mi < yi {
                    for i in (mi + 1)..=yi {
                        f *= a / i as f64 - s;
                    }
                } else if mi > yi {
                    for i in (yi + 1)..=mi {
                        f /= a / i as f64 - s;
                    }
                }
                if v <= f {
                    return yi;
                }
            } else {
                // squeeze on log scale, then full Stirling comparison
                let amp = libm::log(v);
                let rho = (k / nrq) * ((k * (k / 3.0 + 0.625) + 1.0 / 6.0) / nrq + 0.5);
                let t = -k * k / (2.0 * nrq);
                if amp < t - rho {
                    return y as u64;
                }
                if amp > t + rho {
                    continue;
                }
                let x1 = y + 1.0;
                let f1 = m + 1.0;
                let z = nf + 1.0 - m;
                let w = nf - y + 1.0;
                let z2 = z * z;
                let x2 = x1 * x1;
                let f2 = f1 * f1;
                let w2 = w * w;
                let bound = xm * libm::log(f1 / x1)
                    + (nf - m + 0.5) * libm::log(z / w)
                    + (y - m) * libm::log(w * r / (x1 * q))
                    + (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / f2) / f2) / f2) / f2)
                        / f1
                        / 166320.0
                    + (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / z2) / z2) / z2) / z2)
                        / z
                        / 166320.0
                    + (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / x2) / x2) / x2) / x2)
                        / x1
                        / 166320.0
                    + (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / w2) / w2) / w2) / w2)
                        / w
                        / 166320.0;
                if amp <= bound {
                    return y as u64;
                }
            }
        }
    }
}
