//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mirrorlight::experiment::{
    blockage_maps, nlos_field, relative_error_point, shadowing_sweep, snr_series, ShadowingPoint, SnrSeries,
    ERROR_DEPTHS, MIRROR_SIZES, SHADOWING_DEPTHS, SWEEP_HEIGHTS,
};
use mirrorlight::geom::{mesh_surface, reflect_incident_direction, MeshResolution, MirrorShape, SurfaceMesh, Vec3};
use mirrorlight::metrics::{shadowing_probability, snr_db, EmpiricalCdf, LinkState, NoiseModel};
use mirrorlight::nlos::{exact_nlos_irradiance, RelativeErrorField};
use mirrorlight::radiometry::{los_irradiance, Photodetector, SourcePanel, SourceQuadrature};
use mirrorlight::scenario::{MeshPolicy, ScenarioConfig};

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, pass: bool, what: &str, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("[{}] {id:<6} {what}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn secs(t: Instant) -> String {
    format!("{:.1} s", t.elapsed().as_secs_f64())
}

fn sphere_zero_shadowing(cfg: &ScenarioConfig, r: &mut Report) {
    let grid = cfg.grid();
    let mut probs = Vec::new();
    let mut slowest = 0.0f64;
    for size in &MIRROR_SIZES {
        let t = Instant::now();
        let field = nlos_field(cfg, &size.semi_sphere(), &grid).unwrap();
        probs.push(shadowing_probability(&field.exact, cfg.zero_threshold).unwrap());
        slowest = slowest.max(t.elapsed().as_secs_f64());
    }
    let pass = probs.iter().all(|&p| p == 0.0) && slowest < 60.0;
    r.line(
        "1",
        pass,
        "semi-sphere shadowing = 0 (r = 0.1, 0.2236, 0.3162)",
        format!("P = {probs:?}, slowest radius {slowest:.1} s"),
    );
}

fn plane_floors(cfg: &ScenarioConfig, r: &mut Report) {
    let grid = cfg.grid();
    let expected = [0.86, 0.76, 0.68];
    let mut parts = Vec::new();
    let mut pass = true;
    for (size, want) in MIRROR_SIZES.iter().zip(expected) {
        let field = nlos_field(cfg, &size.plane(), &grid).unwrap();
        let p = shadowing_probability(&field.exact, cfg.zero_threshold).unwrap();
        pass &= (p - want).abs() <= 0.05;
        parts.push(format!("{} {p:.4} (want {want} ± 0.05)", size.name));
    }
    r.line("2", pass, "plane-mirror shadowing", parts.join(", "));
}

fn paraboloid_error(cfg: &ScenarioConfig, r: &mut Report) {
    let t = Instant::now();
    let mut worst = (0.0, None);
    for &height in &SWEEP_HEIGHTS {
        for &depth in &ERROR_DEPTHS {
            for i in 2..=10 {
                let shape = MirrorShape::paraboloid(i as f64 / 10.0, depth, height).unwrap();
                let point = relative_error_point(cfg, &shape).unwrap();
                if let Some(peak) = point.peak {
                    if peak > worst.0 {
                        worst = (peak, Some(shape));
                    }
                }
            }
        }
    }
    let shape = worst.1.map(|s| s.label()).unwrap_or_default();
    r.line(
        "3",
        worst.0 < 0.05,
        "paraboloid peak relative error < 5% (default mesh)",
        format!("worst {:.3}% at {shape}, {}", worst.0 * 100.0, secs(t)),
    );
}

/// Criterion 4 plus the sphere part of the shadowing invariant, sharing the
/// fields of the radius sweep.
fn sphere_error(cfg: &ScenarioConfig, r: &mut Report) {
    let t = Instant::now();
    let fine = ScenarioConfig {
        mesh: MeshPolicy::Auto {
            samples_per_patch: 24.0,
        },
        ..cfg.clone()
    };
    let grid = cfg.grid();
    let mut peaks = Vec::new();
    let mut shadowed = Vec::new();
    for i in 1..=10 {
        let radius = i as f64 / 10.0;
        let shape = MirrorShape::semi_sphere(radius).unwrap();
        let field = nlos_field(&fine, &shape, &grid).unwrap();
        let peak = RelativeErrorField::from_field(&field, radius).peak().unwrap();
        peaks.push((radius, peak));
        let p = shadowing_probability(&field.exact, cfg.zero_threshold).unwrap();
        if p > 0.0 {
            shadowed.push((radius, p));
        }
    }
    let worst = peaks.iter().map(|p| p.1).fold(0.0, f64::max);
    let listing: Vec<String> = peaks
        .iter()
        .map(|(rad, p)| format!("{rad}:{:.3}%", p * 100.0))
        .collect();
    r.line(
        "4",
        worst < 0.006,
        "semi-sphere peak relative error < 0.6% (r = 0.1..1, 24 samples per image)",
        format!("worst {:.3}% [{}], {}", worst * 100.0, listing.join(" "), secs(t)),
    );
    r.line(
        "inv-s",
        shadowed.is_empty(),
        "semi-sphere shadowing = 0 for r in (0, 1]",
        if shadowed.is_empty() {
            "all zero".to_string()
        } else {
            format!("nonzero at {shadowed:?}")
        },
    );
}

fn monotonicity(cfg: &ScenarioConfig, r: &mut Report) {
    let t = Instant::now();
    let points = shadowing_sweep(cfg).unwrap();
    let find = |h: f64, w: f64, l: f64| -> &ShadowingPoint {
        points
            .iter()
            .find(|p| p.height == h && p.depth == l && (p.width - w).abs() < 1e-12)
            .unwrap()
    };
    let widths: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let mut depth_breaks = Vec::new();
    let mut height_breaks = Vec::new();
    for &w in &widths {
        for &h in &SWEEP_HEIGHTS {
            for pair in SHADOWING_DEPTHS.windows(2) {
                let (a, b) = (find(h, w, pair[0]), find(h, w, pair[1]));
                if b.probability > a.probability {
                    depth_breaks.push(format!("w={w} h={h} l {}→{}", pair[0], pair[1]));
                }
            }
        }
        for &l in &SHADOWING_DEPTHS {
            for pair in SWEEP_HEIGHTS.windows(2) {
                let (a, b) = (find(pair[0], w, l), find(pair[1], w, l));
                if b.probability < a.probability {
                    height_breaks.push((l, format!("w={w} l={l} h {}→{}", pair[0], pair[1])));
                }
            }
        }
    }
    let pass = depth_breaks.is_empty() && height_breaks.is_empty();
    let flat = height_breaks.iter().filter(|(l, _)| *l == 0.0).count();
    let curved: Vec<&String> = height_breaks.iter().filter(|(l, _)| *l > 0.0).map(|(_, s)| s).collect();
    let detail = format!(
        "{} points; l-trend breaks {:?}; h-trend breaks: {flat} of 20 on flat rows (l = 0), curved rows {:?}; {}",
        points.len(),
        depth_breaks,
        curved,
        secs(t)
    );
    r.line("5", pass, "shadowing monotone in l_par and h_par", detail);
}

fn blockage_order(cfg: &ScenarioConfig, r: &mut Report) {
    let maps = blockage_maps(cfg).unwrap();
    let fractions: Vec<(f64, f64)> = maps.iter().map(|m| (m.side, m.map.shaded_fraction())).collect();
    let pass = fractions.len() == 3 && fractions[0].1 > fractions[1].1 && fractions[1].1 > fractions[2].1;
    r.line(
        "6",
        pass,
        "blockage shaded fraction 2 cm > 50 cm > 1 m panel",
        format!("{fractions:?} with {} users", cfg.blockage_users),
    );
}

fn snr_properties(cfg: &ScenarioConfig, r: &mut Report) {
    let t = Instant::now();
    let series = snr_series(cfg).unwrap();
    let cdf = |s: &SnrSeries| EmpiricalCdf::new(&s.snr_db).unwrap();
    let by_name = |name: &str| series.iter().find(|s| s.name == name).unwrap();

    let mut dominance_breaks = Vec::new();
    for family in ["paraboloid", "semi_sphere", "plane"] {
        let cdfs: Vec<EmpiricalCdf> = MIRROR_SIZES
            .iter()
            .map(|size| cdf(by_name(&format!("nlos/{family}/{}", size.name))))
            .collect();
        for q in [0.25, 0.5, 0.75] {
            for pair in cdfs.windows(2) {
                if pair[1].quantile(q) < pair[0].quantile(q) {
                    dominance_breaks.push(format!("{family} q={q}"));
                }
            }
        }
    }
    r.line(
        "7a",
        dominance_breaks.is_empty(),
        "larger mirror → larger NLoS SNR at quantiles 0.25/0.5/0.75",
        format!("breaks {dominance_breaks:?}"),
    );

    let mut median_breaks = Vec::new();
    for s in series.iter().filter(|s| s.link == LinkState::LosBlocked) {
        let both = by_name(&s.name.replacen("nlos/", "los+nlos/", 1));
        let (m_nlos, m_both) = (cdf(s).quantile(0.5), cdf(both).quantile(0.5));
        if m_both <= m_nlos {
            median_breaks.push(format!("{} ({m_both} vs {m_nlos})", s.name));
        }
    }
    r.line(
        "7b",
        median_breaks.is_empty(),
        "LoS+NLoS median SNR > NLoS-only median",
        format!("breaks {median_breaks:?}"),
    );

    let mut pass = true;
    let mut parts = Vec::new();
    for (size, want) in MIRROR_SIZES.iter().zip([0.86, 0.76, 0.68]) {
        let floor = cdf(by_name(&format!("nlos/plane/{}", size.name))).floor_mass();
        pass &= (floor - want).abs() <= 0.05;
        parts.push(format!("plane/{} {floor:.4} (want {want})", size.name));
    }
    for family in ["paraboloid", "semi_sphere"] {
        for size in &MIRROR_SIZES {
            let floor = cdf(by_name(&format!("nlos/{family}/{}", size.name))).floor_mass();
            pass &= floor == 0.0;
            parts.push(format!("{family}/{} {floor}", size.name));
        }
    }
    r.line(
        "7c",
        pass,
        "NLoS floor mass: plane per criterion 2, curved zero",
        format!("{}; {}", parts.join(", "), secs(t)),
    );
}

fn table_source() -> SourcePanel {
    SourcePanel::new(Vec3::new(0.0, 2.0, -1.0), 0.2, 0.2, 20.0, 80f64.to_radians()).unwrap()
}

/// Independent four-term sum of the mirror integral.
fn enumerate(d: Vec3, mesh: &SurfaceMesh, src: &SourcePanel, rho: f64) -> f64 {
    let m = -(2f64.ln()) / src.half_power_angle().cos().ln();
    let s = src.center();
    let mut sum = 0.0;
    for sample in &mesh.samples {
        let v = d - sample.point;
        let dist2 = v.dot(v);
        let u = v / dist2.sqrt();
        let c = sample.normal.dot(u);
        if d.y <= 0.0 || u.z <= 0.0 || c <= 0.0 {
            continue;
        }
        let inc = u - sample.normal * (2.0 * c);
        let t = (sample.point.z - s.z) / inc.z;
        if t <= 0.0 {
            continue;
        }
        let hit = sample.point - inc * t;
        if (hit.x - s.x).abs() > src.width() / 2.0 || (hit.y - s.y).abs() > src.length() / 2.0 || inc.z <= 0.0 {
            continue;
        }
        let radiance = (m + 1.0) * src.power() / (2.0 * PI * src.width() * src.length()) * inc.z.powf(m - 1.0);
        sum += rho * radiance * u.z * c * sample.area / dist2;
    }
    sum
}

fn oracle_enumeration(r: &mut Report) {
    let src = table_source();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for shape in [
        MirrorShape::paraboloid(0.4, 0.1, 0.5).unwrap(),
        MirrorShape::semi_sphere(0.2236).unwrap(),
        MirrorShape::plane(0.4, 0.5).unwrap(),
    ] {
        let mesh = mesh_surface(&shape, MeshResolution::square(2)).unwrap();
        for sample in &mesh.samples {
            // aim the detector along the specular ray from the source centre
            let incoming = (sample.point - src.center()).normalize();
            let out = incoming - sample.normal * (2.0 * sample.normal.dot(incoming));
            if out.z <= 0.0 || out.y <= 0.0 {
                continue;
            }
            let d = sample.point + out * ((1.0 - sample.point.z) / out.z);
            let exact = exact_nlos_irradiance(d, &mesh, &src, 0.99).unwrap();
            let oracle = enumerate(d, &mesh, &src, 0.99);
            assert!(oracle > 0.0);
            worst = worst.max((exact - oracle).abs() / oracle);
            cases += 1;
        }
    }
    r.line(
        "8i",
        cases > 0 && worst < 1e-14,
        "2×2 mesh integral equals explicit enumeration",
        format!("{cases} detectors, worst relative gap {worst:.2e}"),
    );
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

fn oracle_reflection(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut angle_gap, mut involution_gap) = (0.0f64, 0.0f64);
    let mut cases = 0;
    while cases < 10_000 {
        let n = random_unit(&mut rng);
        let mut d = random_unit(&mut rng);
        if n.dot(d) < 0.0 {
            d = -d;
        }
        let Some(inc) = reflect_incident_direction(d, n) else {
            continue;
        };
        let back = -inc;
        angle_gap = angle_gap.max((back.angle_to(n) - d.angle_to(n)).abs());
        // the reversed outgoing ray retraces the incident one
        let again = reflect_incident_direction(back, n).unwrap();
        involution_gap = involution_gap.max((-again - d).norm());
        cases += 1;
    }
    r.line(
        "8ii",
        angle_gap < 1e-9 && involution_gap < 1e-10,
        "law of reflection over 10^4 random cases",
        format!("angle gap {angle_gap:.2e} rad, involution gap {involution_gap:.2e}"),
    );
}

fn oracle_point_source(r: &mut Report) {
    let power = 20.0;
    let src = SourcePanel::new(Vec3::new(0.0, 2.0, -1.0), 1e-3, 1e-3, power, 80f64.to_radians()).unwrap();
    let m = src.order();
    let mut worst = 0.0f64;
    for d in [
        Vec3::new(0.0, 2.0, 1.0),
        Vec3::new(0.7, 1.2, 1.0),
        Vec3::new(-1.5, 3.5, 1.0),
        Vec3::new(1.9, 0.1, 1.0),
    ] {
        let v = d - src.center();
        let dist = v.norm();
        let cos = v.z / dist;
        let closed = (m + 1.0) * power / (2.0 * PI) * cos.powf(m) * cos / (dist * dist);
        let e = los_irradiance(d, &src, SourceQuadrature::square(50), None).unwrap();
        worst = worst.max((e - closed).abs() / closed);
    }
    r.line(
        "8iii",
        worst < 0.005,
        "point-source LoS limit",
        format!("worst relative gap {:.2e}", worst),
    );
}

/// Paraboloid surface area by midpoint integration in elliptic polar
/// coordinates, independent of the mesh parametrization.
fn paraboloid_area(width: f64, depth: f64, height: f64) -> f64 {
    let (a, b) = (-width * width / (4.0 * depth), -height * height / (4.0 * depth));
    let n = 2000;
    let (d_rho, d_theta) = (1.0 / n as f64, 2.0 * PI / n as f64);
    let mut sum = 0.0;
    for i in 0..n {
        let rho = (i as f64 + 0.5) * d_rho;
        for j in 0..n {
            let theta = (j as f64 + 0.5) * d_theta;
            let x = width / 2.0 * rho * theta.cos();
            let z = height / 2.0 * rho * theta.sin();
            let (gx, gz) = (2.0 * x / a, 2.0 * z / b);
            sum += (1.0 + gx * gx + gz * gz).sqrt() * rho;
        }
    }
    sum * width * height / 4.0 * d_rho * d_theta
}

fn oracle_mesh_area(r: &mut Report) {
    let cases = [
        (MirrorShape::plane(0.4, 0.5).unwrap(), 0.2),
        (MirrorShape::semi_sphere(0.3162).unwrap(), 2.0 * PI * 0.3162 * 0.3162),
        (
            MirrorShape::paraboloid(0.4, 0.1, 0.5).unwrap(),
            paraboloid_area(0.4, 0.1, 0.5),
        ),
        (
            MirrorShape::paraboloid(1.0, 0.2, 0.1).unwrap(),
            paraboloid_area(1.0, 0.2, 0.1),
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (shape, exact) in cases {
        let sizes = [32, 128, 512, 2048];
        let errs: Vec<f64> = sizes
            .iter()
            .map(|&n| {
                let area = mesh_surface(&shape, MeshResolution::square(n)).unwrap().total_area();
                (area - exact).abs() / exact
            })
            .collect();
        // rim cells are kept or dropped whole, so the error only follows a first-order envelope
        let converging = sizes
            .iter()
            .zip(&errs)
            .all(|(&n, &e)| e <= 2.0 * errs[0] * 32.0 / n as f64 + 1e-9);
        pass &= converging && errs[3] < 1e-3;
        let trail: Vec<String> = errs.iter().map(|e| format!("{e:.1e}")).collect();
        parts.push(format!("{} {}", shape.label(), trail.join("→")));
    }
    r.line(
        "8iv",
        pass,
        "mesh area converges to the analytic area",
        parts.join(", "),
    );
}

fn oracle_snr(r: &mut Report) {
    let pd = Photodetector {
        position: Vec3::ZERO,
        area: 4e-4,
        responsivity: 0.4,
    };
    let noise = NoiseModel::new(2.5e-20, 1e6).unwrap();
    let snr = snr_db(1e-6, 0.0, LinkState::LosPresent, &pd, &noise);
    let arithmetic = 10.0 * (0.4e-6f64 * 0.4e-6 / 2.5e-14).log10();
    r.line(
        "8v",
        (snr - 38.06).abs() < 0.01,
        "SNR arithmetic case (η = 0.4, P = 1 µW, N0·B = 2.5e-14) = 38.06 dB",
        format!("computed {snr:.4} dB; 10·log10((0.4e-6)²/2.5e-14) evaluates to {arithmetic:.4} dB"),
    );
}

fn main() -> ExitCode {
    let cfg = ScenarioConfig::default();
    let mut r = Report { failures: 0 };
    let t = Instant::now();

    sphere_zero_shadowing(&cfg, &mut r);
    plane_floors(&cfg, &mut r);
    paraboloid_error(&cfg, &mut r);
    sphere_error(&cfg, &mut r);
    monotonicity(&cfg, &mut r);
    blockage_order(&cfg, &mut r);
    snr_properties(&cfg, &mut r);
    oracle_enumeration(&mut r);
    oracle_reflection(&mut r);
    oracle_point_source(&mut r);
    oracle_mesh_area(&mut r);
    oracle_snr(&mut r);

    println!("acceptance: {} failing line(s), {}", r.failures, secs(t));
    if r.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
