use std::path::Path;

use image::{Rgb, RgbImage};
use plate_core::model::PlateRect;

const LONG_SIDE_PX: u32 = 480;
const LEVELS: usize = 12;

// Sequential map, dark blue to yellow.
const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

fn colour(t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let c = |k: usize| (STOPS[i][k] + f * (STOPS[i + 1][k] - STOPS[i][k])).round() as u8;
    Rgb([c(0), c(1), c(2)])
}

/// Filled colour map with black iso-lines; y grows upwards.
pub fn contour_png(g: &PlateRect, value: &dyn Fn(f64, f64) -> f64, path: &Path) -> Result<(), String> {
    let scale = LONG_SIDE_PX as f64 / g.longest_side();
    let w = ((g.lx * scale).round() as u32).max(2);
    let h = ((g.ly * scale).round() as u32).max(2);
    let mut vals = vec![0.0; (w * h) as usize];
    for py in 0..h {
        let y = g.ly * (1.0 - (py as f64 + 0.5) / h as f64);
        for px in 0..w {
            let x = g.lx * (px as f64 + 0.5) / w as f64;
            vals[(py * w + px) as usize] = value(x, y);
        }
    }
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let band = |v: f64| (((v - lo) / span) * LEVELS as f64).floor().min(LEVELS as f64 - 1.0) as i64;
    let mut img = RgbImage::new(w, h);
    for py in 0..h {
        for px in 0..w {
            let v = vals[(py * w + px) as usize];
            let b = band(v);
            let edge = (px + 1 < w && band(vals[(py * w + px + 1) as usize]) != b)
                || (py + 1 < h && band(vals[((py + 1) * w + px) as usize]) != b);
            let c = if edge { Rgb([0, 0, 0]) } else { colour((v - lo) / span) };
            img.put_pixel(px, py, c);
        }
    }
    img.save(path).map_err(|e| format!("{}: {e}", path.display()))
}
