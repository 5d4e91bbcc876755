//! WebAssembly bindings for the demo page in `www/`.

use ibf_core::data::{group_stats, SurvivalDataset};
use ibf_core::intrinsic::{IntrinsicFamily, IntrinsicPriorSpec};
use ibf_core::linear::{consistency_study, FindleyCovariate, StudyConfig, StudyKind, Weighting};
use ibf_core::selection::{gehan_arithmetic_ibf, gehan_ep_bf, twoexp_intrinsic_bf};
use wasm_bindgen::prelude::*;

fn family(label: &str) -> Result<IntrinsicFamily, String> {
    IntrinsicFamily::ALL
        .into_iter()
        .find(|f| f.label() == label)
        .ok_or_else(|| format!("unknown family {label:?}"))
}

/// `points` pairs `(θ, density)` laid out as `[θ0, d0, θ1, d1, ...]`, over
/// `(0, upper)` for positive families and `(0, 1)` otherwise.
pub fn density_curve(label: &str, theta0: f64, upper: f64, points: usize) -> Result<Vec<f64>, String> {
    let fam = family(label)?;
    let spec = IntrinsicPriorSpec::new(fam, theta0, Some(1.0)).map_err(|e| e.to_string())?;
    let hi = spec.support().1.min(upper);
    if hi.is_nan() || hi <= 0.0 || points < 2 {
        return Err("need a positive upper limit and at least two points".into());
    }
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let t = hi * (i as f64 + 0.5) / points as f64;
        out.push(t);
        out.push(spec.density(t).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// `[arithmetic IBF, EP BF, intrinsic-prior BF]` on the log scale for the
/// Gehan data with `L` sequential training samples.
pub fn gehan_log_bfs(l: usize, seed: u64) -> Result<Vec<f64>, String> {
    let d = SurvivalDataset::gehan();
    let stats = group_stats(&d).map_err(|e| e.to_string())?;
    let ar = gehan_arithmetic_ibf(&d, l, seed).map_err(|e| e.to_string())?;
    let ep = gehan_ep_bf(&d, l, seed).map_err(|e| e.to_string())?;
    let ip = twoexp_intrinsic_bf(&stats[0].1, &stats[1].1, 1e-8).map_err(|e| e.to_string())?;
    Ok(vec![ar.log_bf10, ep.log_bf10, ip.log_bf10])
}

/// Median log BF across `replicates` datasets at each `n` in `grid`,
/// laid out as `[n0, uniform0, information0, n1, ...]`.
pub fn findley_curves(theta: f64, grid: &[u32], replicates: usize, seed: u64) -> Result<Vec<f64>, String> {
    let grid: Vec<usize> = grid.iter().map(|&n| n as usize).collect();
    let run = |weighting| {
        consistency_study(&StudyConfig {
            kind: StudyKind::Findley {
                covariate: FindleyCovariate::InverseSqrt,
                theta,
                weighting,
                truncate: None,
            },
            grid: grid.clone(),
            seed,
            replicates,
        })
        .map_err(|e| e.to_string())
    };
    let (u, i) = (run(Weighting::Uniform)?, run(Weighting::Information)?);
    Ok(u.iter()
        .zip(&i)
        .flat_map(|(a, b)| [a.n_or_m as f64, a.median_log_bf, b.median_log_bf])
        .collect())
}

#[wasm_bindgen(js_name = densityCurve)]
pub fn density_curve_js(family: &str, theta0: f64, upper: f64, points: usize) -> Result<Vec<f64>, JsError> {
    density_curve(family, theta0, upper, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = gehanLogBfs)]
pub fn gehan_log_bfs_js(l: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    gehan_log_bfs(l, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = findleyCurves)]
pub fn findley_curves_js(theta: f64, grid: Vec<u32>, replicates: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    findley_curves(theta, &grid, replicates, seed as u64).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves() {
        let c = density_curve("poisson-imaginary", 1.0, 5.0, 50).unwrap();
        assert_eq!(c.len(), 100);
        assert!(c.chunks(2).all(|p| p[1] > 0.0));
        assert!(density_curve("bernoulli-smts", 0.3, 5.0, 10).unwrap()[18] < 1.0);
        assert!(density_curve("nope", 1.0, 1.0, 10).is_err());
    }

    #[test]
    fn gehan() {
        let v = gehan_log_bfs(84, 1).unwrap();
        assert!(v.iter().all(|x| *x > 5.0 && *x < 8.0), "{v:?}");
    }

    #[test]
    fn findley() {
        let v = findley_curves(0.5, &[100, 1000], 3, 1).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v[3], 1000.0);
    }
}
