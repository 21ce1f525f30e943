//! Independent reference implementations shared by the integration and
//! acceptance suites. Deliberately naive: nested loops, no shared code with
//! the library beyond plain data types.
#![allow(dead_code)]

use dcscn_core::data::RgbImage;
use dcscn_core::model::{backward, forward_train, init_params, ModelConfig, ModelParams};
use dcscn_core::tensor::{Plane, Shape, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Zero-padded stride-1 cross-correlation.
pub fn direct_conv(input: &Tensor<f64>, weights: &Tensor<f64>, bias: Option<&[f64]>) -> Tensor<f64> {
    let s = input.shape();
    let (co, ci, kh, kw) = (weights.batch(), weights.channels(), weights.height(), weights.width());
    assert_eq!(ci, s.channels);
    let (ph, pw) = (kh as i64 / 2, kw as i64 / 2);
    Tensor::from_fn(Shape::new(s.batch, co, s.height, s.width), |n, o, y, x| {
        let mut acc = bias.map_or(0.0, |b| b[o]);
        for c in 0..ci {
            for dy in 0..kh {
                for dx in 0..kw {
                    let (yy, xx) = (y as i64 + dy as i64 - ph, x as i64 + dx as i64 - pw);
                    if yy >= 0 && xx >= 0 && (yy as usize) < s.height && (xx as usize) < s.width {
                        acc += weights.at(o, c, dy, dx) * input.at(n, c, yy as usize, xx as usize);
                    }
                }
            }
        }
        acc
    })
}

fn shaved(p: &Plane<f64>, shave: usize) -> Vec<Vec<f64>> {
    (shave..p.height() - shave).map(|y| (shave..p.width() - shave).map(|x| p.get(y, x)).collect()).collect()
}

/// `10 log10(255² / MSE)` over the shaved interior.
pub fn direct_psnr(a: &Plane<f64>, b: &Plane<f64>, shave: usize) -> f64 {
    let (a, b) = (shaved(a, shave), shaved(b, shave));
    let mut sse = 0.0;
    let mut n = 0.0;
    for (ra, rb) in a.iter().zip(&b) {
        for (x, y) in ra.iter().zip(rb) {
            sse += (x - y) * (x - y);
            n += 1.0;
        }
    }
    10.0 * (255.0 * 255.0 / (sse / n)).log10()
}

/// Mean SSIM with an explicit 11×11 2-D Gaussian window at every valid position.
pub fn direct_ssim(a: &Plane<f64>, b: &Plane<f64>, shave: usize) -> f64 {
    let (a, b) = (shaved(a, shave), shaved(b, shave));
    let (h, w) = (a.len(), a[0].len());
    let mut win = [[0.0f64; 11]; 11];
    let mut total = 0.0;
    for (i, row) in win.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            *v = (-(di * di + dj * dj) / (2.0 * 1.5 * 1.5)).exp();
            total += *v;
        }
    }
    let (c1, c2) = ((0.01f64 * 255.0).powi(2), (0.03f64 * 255.0).powi(2));
    let mut sum = 0.0;
    let mut count = 0.0;
    for y in 0..=h - 11 {
        for x in 0..=w - 11 {
            let (mut mx, mut my) = (0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    let g = win[i][j] / total;
                    mx += g * a[y + i][x + j];
                    my += g * b[y + i][x + j];
                }
            }
            let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    let g = win[i][j] / total;
                    let (p, q) = (a[y + i][x + j] - mx, b[y + i][x + j] - my);
                    vx += g * p * p;
                    vy += g * q * q;
                    cxy += g * p * q;
                }
            }
            sum += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1.0;
        }
    }
    sum / count
}

fn keys(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        1.5 * x * x * x - 2.5 * x * x + 1.0
    } else if x < 2.0 {
        -0.5 * x * x * x + 2.5 * x * x - 4.0 * x + 2.0
    } else {
        0.0
    }
}

/// Direct 2-D Keys evaluation: every source pixel within the (possibly
/// stretched) support, indices clamped at the border, weights normalized.
pub fn direct_bicubic(p: &Plane<f64>, oh: usize, ow: usize) -> Plane<f64> {
    let (h, w) = (p.height(), p.width());
    let axis = |i: usize, n_in: usize, n_out: usize| -> Vec<(usize, f64)> {
        let scale = n_out as f64 / n_in as f64;
        let k = scale.min(1.0);
        let u = (i as f64 + 0.5) / scale - 0.5;
        let reach = (2.0 / k).ceil() as i64 + 1;
        let mut taps = Vec::new();
        let mut total = 0.0;
        for j in u.floor() as i64 - reach..=u.floor() as i64 + reach {
            let wt = keys((u - j as f64) * k);
            if wt != 0.0 {
                taps.push((j.clamp(0, n_in as i64 - 1) as usize, wt));
                total += wt;
            }
        }
        taps.into_iter().map(|(j, wt)| (j, wt / total)).collect()
    };
    Plane::from_fn(oh, ow, |y, x| {
        let (ty, tx) = (axis(y, h, oh), axis(x, w, ow));
        let mut acc = 0.0;
        for &(j, wy) in &ty {
            for &(i, wx) in &tx {
                acc += wy * wx * p.get(j, i);
            }
        }
        acc
    })
}

/// BT.601 studio-swing luma in 0..255.
pub fn luma(img: &RgbImage) -> Plane<f64> {
    Plane::from_fn(img.height(), img.width(), |y, x| {
        let [r, g, b] = img.pixel(y, x).map(f64::from);
        16.0 + (65.481 * r + 128.553 * g + 24.966 * b) / 255.0
    })
}

/// Bicubic baseline PSNR/SSIM for one image, computed without the library.
pub fn bicubic_baseline(img: &RgbImage, s: usize) -> (f64, f64) {
    let y = luma(img);
    let (h, w) = (y.height() - y.height() % s, y.width() - y.width() % s);
    let hr = Plane::from_fn(h, w, |r, c| y.get(r, c) / 255.0);
    let lr = direct_bicubic(&hr, h / s, w / s);
    let up = direct_bicubic(&lr, h, w);
    let up = Plane::from_fn(h, w, |r, c| up.get(r, c).clamp(0.0, 1.0) * 255.0);
    let hr = Plane::from_fn(h, w, |r, c| hr.get(r, c) * 255.0);
    (direct_psnr(&up, &hr, s), direct_ssim(&up, &hr, s))
}

/// Small graph with every structural feature of the full network.
pub fn tiny_config(scale: usize) -> ModelConfig {
    ModelConfig {
        scale,
        fe_filters: [4, 3, 3, 3, 2, 2, 2],
        a1_filters: 3,
        b1_filters: 2,
        b2_filters: 2,
        last_kernel: 1,
        dropout_keep: 0.8,
    }
}

/// Worst violation of `|analytic − numeric| ≤ rel·max(|a|, |n|) + floor`,
/// expressed as the ratio `|a − n| / (rel·max + floor)` (≤ 1 passes), over
/// every parameter of a randomly initialized tiny graph in training mode.
pub fn full_graph_fd_ratio(seed: u64, rel: f64) -> f64 {
    let cfg = tiny_config(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params: ModelParams<f64> = init_params(&cfg, seed).unwrap();
    for a in params.arrays_mut() {
        for v in a.iter_mut() {
            *v += rng.random_range(-0.1..0.1);
        }
    }
    let input = Tensor::from_fn(Shape::new(2, 1, 5, 6), |_, _, _, _| rng.random_range(0.0..1.0));
    let out_shape = Shape::new(2, 1, 10, 12);
    let g = Tensor::from_fn(out_shape, |_, _, _, _| rng.random_range(-1.0..1.0));
    let mask_seed = seed ^ 0x5eed;
    let objective = |p: &ModelParams<f64>| -> f64 {
        let mut r = ChaCha8Rng::seed_from_u64(mask_seed);
        let (out, _) = forward_train(p, &input, &mut r).unwrap();
        out.data().iter().zip(g.data()).map(|(a, b)| a * b).sum()
    };
    let mut r = ChaCha8Rng::seed_from_u64(mask_seed);
    let (_, trace) = forward_train(&params, &input, &mut r).unwrap();
    let grads = backward(&params, &trace, &g).unwrap();
    let analytic: Vec<Vec<f64>> = grads.arrays().iter().map(|a| a.to_vec()).collect();

    let h = 1e-6;
    let floor = 1e-7;
    let mut worst = 0.0f64;
    for (ai, arr) in analytic.iter().enumerate() {
        for (i, &a) in arr.iter().enumerate() {
            let orig = params.arrays()[ai][i];
            params.arrays_mut()[ai][i] = orig + h;
            let up = objective(&params);
            params.arrays_mut()[ai][i] = orig - h;
            let down = objective(&params);
            params.arrays_mut()[ai][i] = orig;
            let n = (up - down) / (2.0 * h);
            worst = worst.max((a - n).abs() / (rel * a.abs().max(n.abs()) + floor));
        }
    }
    worst
}
