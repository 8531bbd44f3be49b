//! Real nonsymmetric eigensolver.
//!
//! Pipeline: balance the matrix, reduce to upper Hessenberg form with
//! Householder reflections, run Francis double-shift QR iteration to real
//! Schur form while accumulating the transformation, back-substitute for
//! eigenvectors, and undo the balancing. The QR stage follows the classic
//! Algol `hqr2` lineage (Martin & Wilkinson), with an iteration budget of
//! 100 per eigenvalue instead of an unbounded loop.

use num_complex::Complex64;

use super::{Matrix, Spectrum};
use crate::error::{Error, Result};

const ITERATION_BUDGET: usize = 100;

pub(super) fn solve(m: &Matrix) -> Result<Spectrum> {
    let n = m.rows();
    if n == 1 {
        return Ok(Spectrum {
            eigenvalues: vec![Complex64::new(m.get(0, 0), 0.0)],
            residual: 0.0,
        });
    }
    let mut h: Vec<f64> = m.data().to_vec();
    let mut scale = vec![1.0; n];
    balance(n, &mut h, &mut scale);
    let mut v = vec![0.0; n * n];
    orthes(n, &mut h, &mut v);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    hqr2(n, &mut h, &mut v, &mut d, &mut e)?;
    balbak(n, &mut v, &scale);

    let eigenvalues: Vec<Complex64> = d
        .iter()
        .zip(&e)
        .map(|(re, im)| Complex64::new(*re, *im))
        .collect();
    let residual = max_residual(m, &v, &d, &e);
    Ok(Spectrum {
        eigenvalues,
        residual,
    })
}

/// Iterative row/column norm balancing (radix-2 scaling, no permutations).
fn balance(n: usize, a: &mut [f64], scale: &mut [f64]) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                let mut c2 = c;
                while c2 < g {
                    f *= RADIX;
                    c2 *= SQRDX;
                }
                g = r * RADIX;
                while c2 > g {
                    f /= RADIX;
                    c2 /= SQRDX;
                }
                if (c2 + r) / f < 0.95 * s {
                    done = false;
                    let ginv = 1.0 / f;
                    scale[i] *= f;
                    for j in 0..n {
                        a[i * n + j] *= ginv;
                    }
                    for j in 0..n {
                        a[j * n + i] *= f;
                    }
                }
            }
        }
    }
}

/// Undo balancing on the eigenvector matrix.
fn balbak(n: usize, v: &mut [f64], scale: &[f64]) {
    for i in 0..n {
        for j in 0..n {
            v[i * n + j] *= scale[i];
        }
    }
}

/// Householder reduction to Hessenberg form, accumulating the orthogonal
/// similarity in `v`.
fn orthes(n: usize, h: &mut [f64], v: &mut [f64]) {
    let low = 0usize;
    let high = n - 1;
    let mut ort = vec![0.0; n];

    for m in (low + 1)..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += h[i * n + (m - 1)].abs();
        }
        if scale != 0.0 {
            let mut hh = 0.0;
            for i in (m..=high).rev() {
                ort[i] = h[i * n + (m - 1)] / scale;
                hh += ort[i] * ort[i];
            }
            let mut g = hh.sqrt();
            if ort[m] > 0.0 {
                g = -g;
            }
            hh -= ort[m] * g;
            ort[m] -= g;

            // apply the Householder similarity (I - u uᵀ/h) on both sides
            for j in m..n {
                let mut f = 0.0;
                for i in (m..=high).rev() {
                    f += ort[i] * h[i * n + j];
                }
                f /= hh;
                for i in m..=high {
                    h[i * n + j] -= f * ort[i];
                }
            }
            for i in 0..=high {
                let mut f = 0.0;
                for j in (m..=high).rev() {
                    f += ort[j] * h[i * n + j];
                }
                f /= hh;
                for j in m..=high {
                    h[i * n + j] -= f * ort[j];
                }
            }
            ort[m] *= scale;
            h[m * n + (m - 1)] = scale * g;
        }
    }

    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = if i == j { 1.0 } else { 0.0 };
        }
    }
    for m in ((low + 1)..high).rev() {
        if h[m * n + (m - 1)] != 0.0 {
            for i in (m + 1)..=high {
                ort[i] = h[i * n + (m - 1)];
            }
            for j in m..=high {
                let mut g = 0.0;
                for i in m..=high {
                    g += ort[i] * v[i * n + j];
                }
                // double division avoids possible underflow
                g = (g / ort[m]) / h[m * n + (m - 1)];
                for i in m..=high {
                    v[i * n + j] += g * ort[i];
                }
            }
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// Francis double-shift QR on a Hessenberg matrix, then eigenvector
/// back-substitution. `h` is destroyed; `v` accumulates eigenvectors.
#[allow(clippy::needless_range_loop)]
fn hqr2(size: usize, h: &mut [f64], v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let nn = size as isize;
    let mut n = nn - 1;
    let low: isize = 0;
    let high: isize = nn - 1;
    let eps: f64 = 2.0_f64.powi(-52);
    let mut exshift = 0.0;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut r = 0.0;
    let mut s = 0.0;
    let mut z = 0.0;
    let mut t;
    let mut w;
    let mut x;
    let mut y;

    let at = |i: isize, j: isize| (i * nn + j) as usize;

    let mut norm: f64 = 0.0;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += h[at(i, j)].abs();
        }
    }

    let mut iter = 0usize;
    while n >= low {
        // look for a single small sub-diagonal element
        let mut l = n;
        while l > low {
            s = h[at(l - 1, l - 1)].abs() + h[at(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[at(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // one root found
            h[at(n, n)] += exshift;
            d[n as usize] = h[at(n, n)];
            e[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // two roots found
            w = h[at(n, n - 1)] * h[at(n - 1, n)];
            p = (h[at(n - 1, n - 1)] - h[at(n, n)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[at(n, n)] += exshift;
            h[at(n - 1, n - 1)] += exshift;
            x = h[at(n, n)];

            if q >= 0.0 {
                // real pair
                z = if p >= 0.0 { p + z } else { p - z };
                d[(n - 1) as usize] = x + z;
                d[n as usize] = d[(n - 1) as usize];
                if z != 0.0 {
                    d[n as usize] = x - w / z;
                }
                e[(n - 1) as usize] = 0.0;
                e[n as usize] = 0.0;
                x = h[at(n, n - 1)];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;

                for j in (n - 1)..nn {
                    z = h[at(n - 1, j)];
                    h[at(n - 1, j)] = q * z + p * h[at(n, j)];
                    h[at(n, j)] = q * h[at(n, j)] - p * z;
                }
                for i in 0..=n {
                    z = h[at(i, n - 1)];
                    h[at(i, n - 1)] = q * z + p * h[at(i, n)];
                    h[at(i, n)] = q * h[at(i, n)] - p * z;
                }
                for i in low..=high {
                    z = v[at(i, n - 1)];
                    v[at(i, n - 1)] = q * z + p * v[at(i, n)];
                    v[at(i, n)] = q * v[at(i, n)] - p * z;
                }
            } else {
                // complex pair
                d[(n - 1) as usize] = x + p;
                d[n as usize] = x + p;
                e[(n - 1) as usize] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // no convergence yet: form shift
            x = h[at(n, n)];
            y = 0.0;
            w = 0.0;
            if l < n {
                y = h[at(n - 1, n - 1)];
                w = h[at(n, n - 1)] * h[at(n - 1, n)];
            }

            // Wilkinson's original ad hoc shift
            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    h[at(i, i)] -= x;
                }
                s = h[at(n, n - 1)].abs() + h[at(n - 1, n - 2)].abs();
                y = 0.75 * s;
                x = y;
                w = -0.4375 * s * s;
            }

            // MATLAB's new ad hoc shift
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        h[at(i, i)] -= s;
                    }
                    exshift += s;
                    w = 0.964;
                    y = w;
                    x = y;
                }
            }

            if iter >= ITERATION_BUDGET {
                let found = (nn - 1 - n) as usize;
                let partial = (n + 1..nn)
                    .map(|i| Complex64::new(d[i as usize], e[i as usize]))
                    .collect();
                return Err(Error::EigenNonConvergence {
                    budget: ITERATION_BUDGET,
                    found,
                    dim: size,
                    partial,
                });
            }
            iter += 1;

            // look for two consecutive small sub-diagonal elements
            let mut m = n - 2;
            while m >= l {
                z = h[at(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[at(m + 1, m)] + h[at(m, m + 1)];
                q = h[at(m + 1, m + 1)] - z - r - s;
                r = h[at(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[at(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs()
                            * (h[at(m - 1, m - 1)].abs() + z.abs() + h[at(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=n {
                h[at(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[at(i, i - 3)] = 0.0;
                }
            }

            // double QR step on rows l..n and columns m..n
            for k in m..n {
                let notlast = k != n - 1;
                if k != m {
                    p = h[at(k, k - 1)];
                    q = h[at(k + 1, k - 1)];
                    r = if notlast { h[at(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }

                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[at(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[at(k, k - 1)] = -h[at(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[at(k, j)] + q * h[at(k + 1, j)];
                        if notlast {
                            p += r * h[at(k + 2, j)];
                            h[at(k + 2, j)] -= p * z;
                        }
                        h[at(k, j)] -= p * x;
                        h[at(k + 1, j)] -= p * y;
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * h[at(i, k)] + y * h[at(i, k + 1)];
                        if notlast {
                            p += z * h[at(i, k + 2)];
                            h[at(i, k + 2)] -= p * r;
                        }
                        h[at(i, k)] -= p;
                        h[at(i, k + 1)] -= p * q;
                    }
                    for i in low..=high {
                        p = x * v[at(i, k)] + y * v[at(i, k + 1)];
                        if notlast {
                            p += z * v[at(i, k + 2)];
                            v[at(i, k + 2)] -= p * r;
                        }
                        v[at(i, k)] -= p;
                        v[at(i, k + 1)] -= p * q;
                    }
                }
            }
        }
    }

    // back-substitute eigenvectors of the quasi-triangular form
    if norm == 0.0 {
        return Ok(());
    }

    for n in (0..nn).rev() {
        p = d[n as usize];
        q = e[n as usize];

        if q == 0.0 {
            // real vector
            let mut l = n;
            h[at(n, n)] = 1.0;
            for i in (0..n).rev() {
                w = h[at(i, i)] - p;
                r = 0.0;
                for j in l..=n {
                    r += h[at(i, j)] * h[at(j, n)];
                }
                if e[i as usize] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        if w != 0.0 {
                            h[at(i, n)] = -r / w;
                        } else {
                            h[at(i, n)] = -r / (eps * norm);
                        }
                    } else {
                        // solve the 2x2 real block
                        x = h[at(i, i + 1)];
                        y = h[at(i + 1, i)];
                        q = (d[i as usize] - p) * (d[i as usize] - p)
                            + e[i as usize] * e[i as usize];
                        t = (x * s - z * r) / q;
                        h[at(i, n)] = t;
                        if x.abs() > z.abs() {
                            h[at(i + 1, n)] = (-r - w * t) / x;
                        } else {
                            h[at(i + 1, n)] = (-s - y * t) / z;
                        }
                    }

                    // overflow control
                    t = h[at(i, n)].abs();
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            h[at(j, n)] /= t;
                        }
                    }
                }
            }
        } else if q < 0.0 {
            // complex vector, processed at the second member of the pair
            let mut l = n - 1;

            if h[at(n, n - 1)].abs() > h[at(n - 1, n)].abs() {
                h[at(n - 1, n - 1)] = q / h[at(n, n - 1)];
                h[at(n - 1, n)] = -(h[at(n, n)] - p) / h[at(n, n - 1)];
            } else {
                let (re, im) = cdiv(0.0, -h[at(n - 1, n)], h[at(n - 1, n - 1)] - p, q);
                h[at(n - 1, n - 1)] = re;
                h[at(n - 1, n)] = im;
            }
            h[at(n, n - 1)] = 0.0;
            h[at(n, n)] = 1.0;
            for i in (0..(n - 1)).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                let mut vr;
                let vi;
                for j in l..=n {
                    ra += h[at(i, j)] * h[at(j, n - 1)];
                    sa += h[at(i, j)] * h[at(j, n)];
                }
                w = h[at(i, i)] - p;

                if e[i as usize] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        let (re, im) = cdiv(-ra, -sa, w, q);
                        h[at(i, n - 1)] = re;
                        h[at(i, n)] = im;
                    } else {
                        // solve complex 2x2 block
                        x = h[at(i, i + 1)];
                        y = h[at(i + 1, i)];
                        vr = (d[i as usize] - p) * (d[i as usize] - p)
                            + e[i as usize] * e[i as usize]
                            - q * q;
                        vi = (d[i as usize] - p) * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (re, im) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        h[at(i, n - 1)] = re;
                        h[at(i, n)] = im;
                        if x.abs() > z.abs() + q.abs() {
                            h[at(i + 1, n - 1)] = (-ra - w * h[at(i, n - 1)] + q * h[at(i, n)]) / x;
                            h[at(i + 1, n)] = (-sa - w * h[at(i, n)] - q * h[at(i, n - 1)]) / x;
                        } else {
                            let (re, im) =
                                cdiv(-r - y * h[at(i, n - 1)], -s - y * h[at(i, n)], z, q);
                            h[at(i + 1, n - 1)] = re;
                            h[at(i + 1, n)] = im;
                        }
                    }

                    // overflow control
                    t = h[at(i, n - 1)].abs().max(h[at(i, n)].abs());
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            h[at(j, n - 1)] /= t;
                            h[at(j, n)] /= t;
                        }
                    }
                }
            }
        }
    }

    // back-transform to eigenvectors of the original (balanced) matrix
    for j in (low..nn).rev() {
        for i in low..=high {
            z = 0.0;
            for k in low..=j.min(high) {
                z += v[at(i, k)] * h[at(k, j)];
            }
            v[at(i, j)] = z;
        }
    }

    Ok(())
}

/// Worst relative eigenpair residual `‖Av − λv‖₂ / ‖v‖₂`.
fn max_residual(m: &Matrix, v: &[f64], d: &[f64], e: &[f64]) -> f64 {
    let n = m.rows();
    let l2 = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut worst = 0.0f64;
    let mut j = 0;
    while j < n {
        if e[j] == 0.0 {
            let col: Vec<f64> = (0..n).map(|i| v[i * n + j]).collect();
            let norm = l2(&col);
            if norm > 0.0 {
                let av = m.matvec(&col).expect("square");
                let res = l2(&av
                    .iter()
                    .zip(&col)
                    .map(|(a, x)| a - d[j] * x)
                    .collect::<Vec<f64>>());
                worst = worst.max(res / norm);
            }
            j += 1;
        } else {
            // complex pair: columns j, j+1 hold Re v and Im v for λ = d[j] + i e[j]
            let vr: Vec<f64> = (0..n).map(|i| v[i * n + j]).collect();
            let vi: Vec<f64> = (0..n).map(|i| v[i * n + j + 1]).collect();
            let norm = (l2(&vr).powi(2) + l2(&vi).powi(2)).sqrt();
            if norm > 0.0 {
                let avr = m.matvec(&vr).expect("square");
                let avi = m.matvec(&vi).expect("square");
                let (dr, di) = (d[j], e[j]);
                let mut sq = 0.0;
                for i in 0..n {
                    let rr = avr[i] - (dr * vr[i] - di * vi[i]);
                    let ri = avi[i] - (di * vr[i] + dr * vi[i]);
                    sq += rr * rr + ri * ri;
                }
                worst = worst.max(sq.sqrt() / norm);
            }
            j += 2;
        }
    }
    worst
}
