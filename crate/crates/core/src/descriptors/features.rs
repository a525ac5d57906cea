use super::{
    box_descriptors, boundary_moments, curvature_descriptors, hu_from, hull_descriptors, mask_descriptors,
    polygon_descriptors, radial_descriptors_with, region_moments, topology_descriptors, DescriptorError,
    DEFAULT_ENTROPY_BINS,
};
use crate::contour::{
    chain_code, convex_hull, curvature_code, min_area_rect, radial_signal_with, trace_boundary,
    DEFAULT_SMOOTHING_FRACTION,
};
use crate::raster::{fill_holes, BinaryMask};

macro_rules! feature_enum {
    ($name:ident, $count:literal, { $($variant:ident => $label:literal),* $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),*
        }

        impl $name {
            pub const ALL: [$name; $count] = [$($name::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $label),*
                }
            }

            pub fn from_name(s: &str) -> Option<Self> {
                Self::ALL.into_iter().find(|f| f.name() == s)
            }

            pub fn index(self) -> usize {
                self as usize
            }
        }
    };
}

feature_enum!(Feature, 30, {
    AspectRatio => "aspect_ratio",
    NetArea => "net_area",
    Elongation => "elongation",
    Thickness => "thickness",
    NHoles => "n_holes",
    Perimeter => "perimeter",
    FilledArea => "filled_area",
    Compactness => "compactness",
    Roundness => "roundness",
    Circularity => "circularity",
    Convexity => "convexity",
    Density => "density",
    MajorAxisLength => "major_axis_length",
    MajorAxisAngle => "major_axis_angle",
    MinorAxisLength => "minor_axis_length",
    Rectangularity => "rectangularity",
    Eccentricity => "eccentricity",
    FibreLength => "fibre_length",
    FibreWidth => "fibre_width",
    Curl => "curl",
    TotalAbsCurvature => "total_abs_curvature",
    BendingEnergy => "bending_energy",
    RadialMean => "radial_mean",
    RadialSd => "radial_sd",
    RadialCircularity => "radial_circularity",
    RadialEntropy => "radial_entropy",
    AreaRatio => "area_ratio",
    ZeroCrossingCount => "zero_crossing_count",
    AvgRoughnessIndex => "avg_roughness_index",
    MarginFluctuation => "margin_fluctuation",
});

feature_enum!(ExtendedFeature, 8, {
    Hu1 => "hu_1",
    Hu2 => "hu_2",
    Hu3 => "hu_3",
    BoundaryF1 => "boundary_f1",
    BoundaryF2 => "boundary_f2",
    BoundaryF3 => "boundary_f3",
    NComponents => "n_components",
    EulerNumber => "euler_number",
});

/// The 30 canonical features; `None` marks a value that is undefined for the shape.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: [Option<f64>; 30],
}

impl Default for FeatureVector {
    fn default() -> Self {
        Self { values: [None; 30] }
    }
}

impl FeatureVector {
    pub fn get(&self, f: Feature) -> Option<f64> {
        self.values[f.index()]
    }

    pub fn set(&mut self, f: Feature, v: Option<f64>) {
        self.values[f.index()] = v;
    }

    pub fn values(&self) -> &[Option<f64>; 30] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (Feature, Option<f64>)> + '_ {
        Feature::ALL.into_iter().zip(self.values.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtendedFeatures {
    values: [Option<f64>; 8],
}

impl ExtendedFeatures {
    pub fn get(&self, f: ExtendedFeature) -> Option<f64> {
        self.values[f.index()]
    }

    pub fn values(&self) -> &[Option<f64>; 8] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureConfig {
    pub smoothing_fraction: f64,
    pub entropy_bins: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            smoothing_fraction: DEFAULT_SMOOTHING_FRACTION,
            entropy_bins: DEFAULT_ENTROPY_BINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TumorFeatures {
    pub canonical: FeatureVector,
    pub extended: ExtendedFeatures,
}

/// Every descriptor of one tumor mask. Holes stay out of the mask-based
/// features; the boundary features see only the outer contour.
pub fn tumor_features(mask: &BinaryMask, cfg: &FeatureConfig) -> Result<TumorFeatures, DescriptorError> {
    use Feature::*;
    let tag = |f: Feature| move |e: DescriptorError| e.for_feature(f);
    let tag_c = |f: Feature| move |e: crate::contour::ContourError| DescriptorError::from(e).for_feature(f);

    let md = mask_descriptors(mask).map_err(tag(AspectRatio))?;
    let topo = topology_descriptors(mask);
    let hu = region_moments(mask, 3).and_then(|m| hu_from(&m)).map_err(tag(AspectRatio))?;

    let chain = trace_boundary(&fill_holes(mask)).map_err(tag_c(Perimeter))?;
    let poly = polygon_descriptors(&chain).map_err(tag(Perimeter))?;
    let hull = convex_hull(&chain).map_err(tag_c(Circularity))?;
    let hd = hull_descriptors(&chain, &hull).map_err(tag(Circularity))?;
    let bbox = min_area_rect(&hull).map_err(tag_c(MajorAxisLength))?;
    let bd = box_descriptors(&chain, &bbox, poly.fibre_length).map_err(tag(MajorAxisLength))?;
    let code = chain_code(&chain).map_err(tag_c(TotalAbsCurvature))?;
    let cd = curvature_descriptors(&curvature_code(&code)).map_err(tag(TotalAbsCurvature))?;
    let signal = radial_signal_with(&chain, cfg.smoothing_fraction).map_err(tag_c(RadialMean))?;
    let rd = radial_descriptors_with(&signal.normalized, &signal.smoothed, cfg.entropy_bins)
        .map_err(tag(RadialMean))?;
    let bm = boundary_moments(&signal.raw).map_err(tag(RadialMean))?;

    let mut v = FeatureVector::default();
    let mut put = |f, x: f64| v.set(f, Some(x));
    put(AspectRatio, md.aspect_ratio);
    put(NetArea, md.net_area as f64);
    put(Elongation, md.elongation);
    put(Thickness, md.thickness as f64);
    put(NHoles, topo.n_holes as f64);
    put(Perimeter, poly.perimeter);
    put(FilledArea, poly.filled_area);
    put(Compactness, poly.compactness);
    put(Roundness, poly.roundness);
    put(Circularity, hd.circularity);
    put(Convexity, hd.convexity);
    put(Density, hd.density);
    put(MajorAxisLength, bd.major_axis_length);
    put(MajorAxisAngle, bd.major_axis_angle);
    put(MinorAxisLength, bd.minor_axis_length);
    put(Rectangularity, bd.rectangularity);
    put(Eccentricity, bd.eccentricity);
    put(TotalAbsCurvature, cd.total_abs_curvature);
    put(BendingEnergy, cd.bending_energy);
    put(RadialMean, rd.radial_mean);
    put(RadialSd, rd.radial_sd);
    put(RadialEntropy, rd.radial_entropy);
    put(AreaRatio, rd.area_ratio);
    put(ZeroCrossingCount, rd.zero_crossing_count as f64);
    put(AvgRoughnessIndex, rd.avg_roughness_index);
    put(MarginFluctuation, rd.margin_fluctuation);
    v.set(FibreLength, poly.fibre_length);
    v.set(FibreWidth, poly.fibre_width);
    v.set(Curl, bd.curl);
    v.set(RadialCircularity, rd.radial_circularity);

    let extended = ExtendedFeatures {
        values: [
            Some(hu.h1),
            Some(hu.h2),
            Some(hu.h3),
            Some(bm.f1),
            bm.f2,
            bm.f3,
            Some(topo.n_components as f64),
            Some(topo.euler as f64),
        ],
    };
    Ok(TumorFeatures {
        canonical: v,
        extended,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn block(size: usize, origin: (usize, usize)) -> BinaryMask {
        BinaryMask::from_fn(origin, size, size, |_, _| true)
    }

    #[test]
    fn names_are_unique_and_ordered() {
        assert_eq!(Feature::ALL[0].name(), "aspect_ratio");
        assert_eq!(Feature::ALL[29].name(), "margin_fluctuation");
        for f in Feature::ALL {
            assert_eq!(Feature::from_name(f.name()), Some(f));
        }
        assert_eq!(Feature::from_name("nope"), None);
    }

    #[test]
    fn block_golden_values() {
        let v = tumor_features(&block(20, (3, 4)), &FeatureConfig::default()).unwrap().canonical;
        let g = |f| v.get(f).unwrap();
        use Feature::*;
        assert_eq!(g(NetArea), 400.0);
        assert_eq!(g(AspectRatio), 1.0);
        assert_eq!(g(Thickness), 10.0);
        assert_eq!(g(Elongation), 2.0);
        assert_eq!(g(NHoles), 0.0);
        assert_eq!(g(Perimeter), 76.0);
        assert_eq!(g(FilledArea), 361.0);
        assert_eq!(g(Compactness), 16.0);
        assert!((g(Roundness) - PI / 4.0).abs() < 1e-12);
        assert_eq!((g(FibreLength), g(FibreWidth)), (19.0, 19.0));
        assert_eq!((g(Convexity), g(Density), g(Rectangularity)), (1.0, 1.0, 1.0));
        assert_eq!((g(MajorAxisLength), g(MinorAxisLength), g(MajorAxisAngle)), (19.0, 19.0, 0.0));
        assert_eq!((g(Eccentricity), g(Curl)), (1.0, 1.0));
        assert_eq!(g(BendingEnergy), 16.0 / 76.0);
        assert_eq!(g(TotalAbsCurvature), 8.0 / 76.0);
    }

    #[test]
    fn translation_does_not_change_features() {
        let a = tumor_features(&block(12, (0, 0)), &FeatureConfig::default()).unwrap();
        let b = tumor_features(&block(12, (40, 17)), &FeatureConfig::default()).unwrap();
        for ((_, x), (_, y)) in a.canonical.iter().zip(b.canonical.iter()) {
            match (x, y) {
                (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0)),
                (x, y) => assert_eq!(x, y),
            }
        }
    }

    #[test]
    fn a_hole_adds_one_to_n_holes() {
        let solid = block(15, (0, 0));
        let holed = solid.difference(&BinaryMask::from_cells([(7, 7)]));
        let a = tumor_features(&solid, &FeatureConfig::default()).unwrap().canonical;
        let b = tumor_features(&holed, &FeatureConfig::default()).unwrap().canonical;
        assert_eq!(b.get(Feature::NHoles).unwrap(), a.get(Feature::NHoles).unwrap() + 1.0);
        assert_eq!(b.get(Feature::NetArea).unwrap(), 224.0);
        // the outer contour is unchanged
        assert_eq!(a.get(Feature::Perimeter), b.get(Feature::Perimeter));
    }

    #[test]
    fn upstream_errors_name_the_feature() {
        let err = tumor_features(&BinaryMask::from_rows((0, 0), &["#####"]), &FeatureConfig::default()).unwrap_err();
        match err {
            DescriptorError::Feature { feature, .. } => assert_eq!(feature, "perimeter"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            tumor_features(&BinaryMask::empty(), &FeatureConfig::default()),
            Err(DescriptorError::Feature { feature: "aspect_ratio", .. })
        ));
    }
}
