use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;

use crate::descriptors::{tumor_features, TumorFeatures};
use crate::raster::{segment_tissues_with, segment_tumors_with, HeatMap};

use super::{io_err, PipelineError, Result, RunConfig};

/// Features of one segmented tumor.
#[derive(Debug, Clone, PartialEq)]
pub struct TumorRow {
    pub slide_id: String,
    /// 1-based rank of the tissue region by area.
    pub tissue_id: u32,
    /// Label in that tissue's segmentation (1 is the largest tumor).
    pub tumor_id: u32,
    pub is_primary: bool,
    pub area: usize,
    /// `None` when feature extraction failed; the failure is listed separately.
    pub features: Option<TumorFeatures>,
}

/// A slide or tumor that could not be processed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlideFailure {
    pub slide_id: String,
    pub tissue_id: Option<u32>,
    pub tumor_id: Option<u32>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlideExtraction {
    pub slide_id: String,
    pub rows: Vec<TumorRow>,
    pub failures: Vec<SlideFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchExtraction {
    /// Successfully parsed slides, sorted by slide id.
    pub slides: Vec<SlideExtraction>,
    /// Per-file and per-tumor failures in slide order.
    pub failures: Vec<SlideFailure>,
    pub n_files: usize,
    pub n_unreadable: usize,
}

impl BatchExtraction {
    pub fn rows(&self) -> impl Iterator<Item = &TumorRow> {
        self.slides.iter().flat_map(|s| s.rows.iter())
    }

    pub fn all_failed(&self) -> bool {
        self.n_files > 0 && self.n_unreadable == self.n_files
    }
}

/// Slide id of a heat-map file: its name without the extension.
pub fn slide_id_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Segments one heat map and computes features for every kept tumor.
///
/// The primary tumor is tumor 1 of tissue 1: both are sorted by decreasing
/// area with ties in raster order.
pub fn extract_heatmap(slide_id: &str, hm: &HeatMap, cfg: &RunConfig) -> SlideExtraction {
    let fcfg = cfg.feature_config();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (t, tissue) in segment_tissues_with(hm, cfg.tissue_fraction).iter().enumerate() {
        let tissue_id = t as u32 + 1;
        let seg = segment_tumors_with(tissue, hm, cfg.min_tumor_area);
        for (k, &area) in seg.areas.iter().enumerate() {
            let tumor_id = k as u32 + 1;
            let features = match tumor_features(&seg.tumor(tumor_id), &fcfg) {
                Ok(f) => Some(f),
                Err(e) => {
                    failures.push(SlideFailure {
                        slide_id: slide_id.to_string(),
                        tissue_id: Some(tissue_id),
                        tumor_id: Some(tumor_id),
                        message: e.to_string(),
                    });
                    None
                }
            };
            rows.push(TumorRow {
                slide_id: slide_id.to_string(),
                tissue_id,
                tumor_id,
                is_primary: tissue_id == 1 && tumor_id == 1,
                area,
                features,
            });
        }
    }
    if rows.is_empty() {
        warn!("slide {slide_id}: no tumor region reaches {} cells", cfg.min_tumor_area);
    }
    SlideExtraction {
        slide_id: slide_id.to_string(),
        rows,
        failures,
    }
}

pub fn extract_slide(path: impl AsRef<Path>, cfg: &RunConfig) -> Result<SlideExtraction> {
    let path = path.as_ref();
    let hm = HeatMap::read(path)?;
    Ok(extract_heatmap(&slide_id_of(path), &hm, cfg))
}

/// Heat-map files (`*.txt`) directly inside `dir`, sorted by name.
pub fn heatmap_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Extracts every heat map of `dir`, one slide per task.
///
/// `cfg.threads` sizes the worker pool (0: rayon's default). Output order
/// does not depend on scheduling.
pub fn extract_directory(dir: impl AsRef<Path>, cfg: &RunConfig) -> Result<BatchExtraction> {
    let dir = dir.as_ref();
    let files = heatmap_files(dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| PipelineError::NoData(format!("thread pool: {e}")))?;
    let results: Vec<(String, Result<SlideExtraction>)> = pool.install(|| {
        files
            .par_iter()
            .map(|p| (slide_id_of(p), extract_slide(p, cfg)))
            .collect()
    });

    let mut ids: Vec<&str> = results.iter().map(|(id, _)| id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(PipelineError::DuplicateKey(format!("slide {}", w[0])));
    }

    let mut slides = Vec::new();
    let mut failures = Vec::new();
    let mut n_unreadable = 0;
    for (slide_id, res) in results {
        match res {
            Ok(s) => {
                failures.extend(s.failures.iter().cloned());
                slides.push(s);
            }
            Err(e) => {
                warn!("slide {slide_id}: {e}");
                n_unreadable += 1;
                failures.push(SlideFailure {
                    slide_id,
                    tissue_id: None,
                    tumor_id: None,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(BatchExtraction {
        slides,
        failures,
        n_files: files.len(),
        n_unreadable,
    })
}

/// `errors.csv`: one line per failed slide or tumor.
pub fn write_failures(path: &Path, failures: &[SlideFailure]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(super::csv_err(path))?;
    let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
    w.write_record(["slide_id", "tissue_id", "tumor_id", "message"])
        .and_then(|_| {
            failures.iter().try_for_each(|f| {
                w.write_record([f.slide_id.clone(), opt(f.tissue_id), opt(f.tumor_id), f.message.clone()])
            })
        })
        .map_err(super::csv_err(path))?;
    w.flush().map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::CellClass;

    fn paint(w: usize, h: usize, rects: &[(usize, usize, usize, usize, CellClass)]) -> HeatMap {
        let mut cells = vec![CellClass::Empty; w * h];
        for &(r, c, rh, rw, class) in rects {
            for rr in r..r + rh {
                for cc in c..c + rw {
                    cells[rr * w + cc] = class;
                }
            }
        }
        HeatMap::new(w, h, cells).unwrap()
    }

    #[test]
    fn primary_is_largest_tumor_of_largest_tissue() {
        use CellClass::*;
        // tissue A: 1200 cells with a 180-cell tumor; tissue B: 4000 with tumors of 200 and 300
        let hm = paint(
            130,
            60,
            &[
                (0, 0, 30, 40, NonMalignant),
                (2, 2, 15, 12, Tumor),
                (0, 45, 50, 80, NonMalignant),
                (5, 50, 10, 20, Tumor),
                (20, 50, 15, 20, Tumor),
            ],
        );
        let out = extract_heatmap("s", &hm, &RunConfig::default());
        assert!(out.failures.is_empty());
        let keys: Vec<(u32, u32, usize, bool)> =
            out.rows.iter().map(|r| (r.tissue_id, r.tumor_id, r.area, r.is_primary)).collect();
        assert_eq!(keys, vec![(1, 1, 300, true), (1, 2, 200, false), (2, 1, 180, false)]);
    }

    #[test]
    fn no_tumor_gives_no_rows() {
        let hm = paint(10, 10, &[(0, 0, 10, 10, CellClass::NonMalignant)]);
        let out = extract_heatmap("empty", &hm, &RunConfig::default());
        assert!(out.rows.is_empty());
        assert!(out.failures.is_empty());
    }

    #[test]
    fn unreadable_files_are_recorded_and_the_batch_continues() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("bad.txt"), "2 2\n0 9\n0 0\n").unwrap();
        let hm = paint(20, 20, &[(0, 0, 20, 20, CellClass::Tumor)]);
        std::fs::write(dir.path().join("good.txt"), hm.to_string()).unwrap();
        std::fs::write(dir.path().join("notes.md"), "ignored").unwrap();
        let cfg = RunConfig { threads: 2, ..RunConfig::default() };
        let batch = extract_directory(dir.path(), &cfg).unwrap();
        assert_eq!(batch.n_files, 2);
        assert_eq!(batch.n_unreadable, 1);
        assert!(!batch.all_failed());
        assert_eq!(batch.failures[0].slide_id, "bad");
        assert_eq!(batch.slides.len(), 1);
        assert_eq!(batch.rows().count(), 1);
    }
}
