//! Synthetic slides and clinical data with a known link between tumor
//! boundary irregularity and hazard.

use std::f64::consts::PI;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::raster::{CellClass, HeatMap};

use super::{io_err, ClinicalRecord, Result, SlideMap, Stage};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CohortSpec {
    pub n_patients: usize,
    pub max_slides_per_patient: usize,
    pub seed: u64,
    /// Log hazard ratio per unit of the latent irregularity score.
    pub effect: f64,
    /// Heat-map side length in cells.
    pub size: usize,
}

impl Default for CohortSpec {
    fn default() -> Self {
        Self {
            n_patients: 120,
            max_slides_per_patient: 2,
            seed: 7,
            effect: 1.0,
            size: 96,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCohort {
    /// `(slide_id, heat map)` sorted by id.
    pub slides: Vec<(String, HeatMap)>,
    pub map: SlideMap,
    pub clinical: Vec<ClinicalRecord>,
    /// Latent score per patient, in clinical order.
    pub latent: Vec<f64>,
}

/// Star-shaped region: radius `r0 * (1 + sum a_k cos(k t + phi_k))`.
#[derive(Debug, Clone)]
struct Star {
    row: f64,
    col: f64,
    r0: f64,
    harmonics: Vec<(f64, f64, f64)>,
}

impl Star {
    fn random(rng: &mut ChaCha8Rng, row: f64, col: f64, r0: f64, roughness: f64) -> Self {
        let harmonics = (2..=9)
            .map(|k| {
                let k = k as f64;
                let amp = roughness * rng.random_range(0.3..1.0) / k.sqrt();
                (k, amp, rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        Star { row, col, r0, harmonics }
    }

    fn contains(&self, r: usize, c: usize) -> bool {
        let (dy, dx) = (r as f64 - self.row, c as f64 - self.col);
        let t = dy.atan2(dx);
        let scale: f64 = 1.0 + self.harmonics.iter().map(|&(k, a, p)| a * (k * t + p).cos()).sum::<f64>();
        dx.hypot(dy) <= self.r0 * scale.max(0.2)
    }
}

fn paint(cells: &mut [CellClass], size: usize, shape: &Star, class: CellClass, inside: Option<CellClass>) {
    for r in 0..size {
        for c in 0..size {
            let cell = &mut cells[r * size + c];
            if shape.contains(r, c) && inside.is_none_or(|need| *cell == need) {
                *cell = class;
            }
        }
    }
}

/// One slide: a main tissue holding the primary tumor with holes and a few
/// satellite tumors, plus sometimes a second, smaller tissue piece.
pub fn synthetic_heatmap(rng: &mut ChaCha8Rng, size: usize, irregularity: f64) -> HeatMap {
    let s = size as f64;
    let mut cells = vec![CellClass::Empty; size * size];
    let main = Star::random(rng, 0.45 * s, 0.4 * s, 0.31 * s, 0.1);
    paint(&mut cells, size, &main, CellClass::NonMalignant, None);
    if rng.random_bool(0.5) {
        let side = Star::random(rng, 0.8 * s, 0.8 * s, 0.18 * s, 0.1);
        paint(&mut cells, size, &side, CellClass::NonMalignant, None);
        let tumor = Star::random(rng, 0.8 * s, 0.8 * s, 0.085 * s, 0.15);
        paint(&mut cells, size, &tumor, CellClass::Tumor, Some(CellClass::NonMalignant));
    }

    let r0 = rng.random_range(0.13..0.17) * s;
    let primary = Star::random(rng, 0.45 * s, 0.4 * s, r0, irregularity);
    paint(&mut cells, size, &primary, CellClass::Tumor, Some(CellClass::NonMalignant));
    for _ in 0..rng.random_range(0..=2) {
        let a = rng.random_range(0.0..2.0 * PI);
        let d = 0.35 * r0;
        let hole = Star {
            row: 0.45 * s + d * a.sin(),
            col: 0.4 * s + d * a.cos(),
            r0: rng.random_range(1.0..2.2),
            harmonics: Vec::new(),
        };
        paint(&mut cells, size, &hole, CellClass::NonMalignant, Some(CellClass::Tumor));
    }
    for k in 0..rng.random_range(1..=2) {
        let a = PI * (0.3 + 0.9 * k as f64) + rng.random_range(-0.3..0.3);
        let d = 0.24 * s;
        let radius = rng.random_range(0.065..0.095) * s;
        let sat = Star::random(rng, 0.45 * s + d * a.sin(), 0.4 * s + d * a.cos(), radius, 0.1);
        // satellites must not touch the primary
        let mut mask = vec![CellClass::Empty; size * size];
        paint(&mut mask, size, &sat, CellClass::Tumor, None);
        let touches = (0..size * size).any(|i| {
            mask[i] == CellClass::Tumor && {
                let (r, c) = (i / size, i % size);
                let near = [(0, 0), (0, 1), (1, 0), (0, -1), (-1, 0)];
                near.iter().any(|&(dr, dc)| {
                    let (rr, cc) = (r as isize + dr, c as isize + dc);
                    rr >= 0
                        && cc >= 0
                        && (rr as usize) < size
                        && (cc as usize) < size
                        && primary.contains(rr as usize, cc as usize)
                })
            }
        });
        if !touches {
            paint(&mut cells, size, &sat, CellClass::Tumor, Some(CellClass::NonMalignant));
        }
    }
    HeatMap::new(size, size, cells).expect("cell count matches size")
}

/// Patients with 1 to `max_slides_per_patient` slides. Primary-tumor
/// irregularity follows a latent score that also drives the hazard.
pub fn generate_cohort(spec: &CohortSpec) -> SyntheticCohort {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let unit_exp = Exp::new(1.0).expect("valid rate");
    let mut slides = Vec::new();
    let mut map = SlideMap::new();
    let mut clinical = Vec::new();
    let mut latent = Vec::new();
    for p in 0..spec.n_patients {
        let patient_id = format!("P{p:04}");
        let z: f64 = normal.sample(&mut rng);
        let irregularity = (0.16 + 0.07 * z).clamp(0.02, 0.4);
        let n_slides = rng.random_range(1..=spec.max_slides_per_patient.max(1));
        for s in 0..n_slides {
            let slide_id = format!("{patient_id}_S{s}");
            slides.push((slide_id.clone(), synthetic_heatmap(&mut rng, spec.size, irregularity)));
            map.insert(slide_id, patient_id.clone());
        }
        let stage = match rng.random_range(0..10) {
            0..=3 => Stage::I,
            4..=6 => Stage::II,
            7..=8 => Stage::III,
            _ => Stage::IV,
        };
        let stage_effect = 0.3 * (stage as u8 as f64);
        let hazard = 0.05 * (spec.effect * z + stage_effect).exp();
        let t_event = unit_exp.sample(&mut rng) / hazard;
        let t_censor = unit_exp.sample(&mut rng) / 0.02;
        let time = t_event.min(t_censor).min(120.0);
        clinical.push(ClinicalRecord {
            patient_id,
            time: ((time * 100.0).round() + 1.0) / 100.0,
            event: t_event <= t_censor && t_event <= 120.0,
            age: Some(rng.random_range(45..85) as f64),
            female: Some(rng.random_bool(0.45)),
            smoker: Some(rng.random_bool(0.7)),
            stage: Some(stage),
        });
        latent.push(z);
    }
    slides.sort_by(|a, b| a.0.cmp(&b.0));
    SyntheticCohort {
        slides,
        map,
        clinical,
        latent,
    }
}

/// Writes `slides/<id>.txt`, `slides.csv` and `clinical.csv` under `dir`.
pub fn write_cohort(cohort: &SyntheticCohort, dir: &Path) -> Result<()> {
    let slide_dir = dir.join("slides");
    std::fs::create_dir_all(&slide_dir).map_err(io_err(&slide_dir))?;
    for (id, hm) in &cohort.slides {
        let p = slide_dir.join(format!("{id}.txt"));
        std::fs::write(&p, hm.to_string()).map_err(io_err(&p))?;
    }
    let mut map_text = String::from("slide_id,patient_id\n");
    for (s, p) in &cohort.map {
        map_text.push_str(&format!("{s},{p}\n"));
    }
    let p = dir.join("slides.csv");
    std::fs::write(&p, map_text).map_err(io_err(&p))?;

    let mut text = String::from("patient_id,time,event,age,gender,smoking,stage\n");
    for r in &cohort.clinical {
        let flag = |b: Option<bool>, y: &str, n: &str| b.map(|b| if b { y } else { n }).unwrap_or("").to_string();
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.patient_id,
            r.time,
            u8::from(r.event),
            r.age.map(|a| a.to_string()).unwrap_or_default(),
            flag(r.female, "F", "M"),
            flag(r.smoker, "1", "0"),
            r.stage.map(Stage::label).unwrap_or(""),
        ));
    }
    let p = dir.join("clinical.csv");
    std::fs::write(&p, text).map_err(io_err(&p))
}
