//! Image/cloud conversion, the PPM codec, palette files, and quality
//! reports.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::segmentation::Clustering;
use crate::vq::{mean_squared_distance, Codebook, InitializerKind};

/// An 8-bit RGB raster, pixels row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>, // 3 bytes per pixel
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::UnsupportedImage("empty image".into()));
        }
        if pixels.len() != width * height * 3 {
            return Err(Error::ShapeMismatch(format!(
                "expected {} bytes for {width}x{height} RGB, found {}",
                width * height * 3,
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn bytes(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let base = (y * self.width + x) * 3;
        [
            self.pixels[base],
            self.pixels[base + 1],
            self.pixels[base + 2],
        ]
    }

    pub fn unique_colors(&self) -> usize {
        let set: HashSet<[u8; 3]> = self
            .pixels
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        set.len()
    }
}

/// Pixel layout needed to invert a cloud back into an image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImageLayout {
    pub width: usize,
    pub height: usize,
}

/// Flattens an image into a 3 x p cloud: column order is row-major pixel
/// order, channels divided by 255 into [0, 1].
pub fn image_to_cloud(img: &RasterImage) -> (PointCloud, ImageLayout) {
    let p = img.num_pixels();
    let data = DMatrix::from_fn(3, p, |r, c| f64::from(img.pixels[c * 3 + r]) / 255.0);
    let cloud = PointCloud::new(data).expect("images are nonempty with finite channels");
    (
        cloud,
        ImageLayout {
            width: img.width,
            height: img.height,
        },
    )
}

/// Inverse of [`image_to_cloud`]: scales by 255, rounds half to even, and
/// clamps to the byte range.
pub fn cloud_to_image(cloud: &PointCloud, layout: &ImageLayout) -> Result<RasterImage> {
    if cloud.dim() != 3 {
        return Err(Error::DimensionMismatch {
            left: cloud.dim(),
            right: 3,
        });
    }
    let p = cloud.num_points();
    if p != layout.width * layout.height {
        return Err(Error::ShapeMismatch(format!(
            "cloud has {p} points, layout wants {}",
            layout.width * layout.height
        )));
    }
    let mut pixels = Vec::with_capacity(p * 3);
    for i in 0..p {
        for &v in cloud.point(i) {
            let scaled = (v * 255.0).round_ties_even().clamp(0.0, 255.0);
            pixels.push(scaled as u8);
        }
    }
    RasterImage::new(layout.width, layout.height, pixels)
}

/// Encodes a binary P6 PPM with maxval 255. The header is canonical
/// ("P6\n{w} {h}\n255\n"), so equal images encode to equal bytes.
pub fn encode_ppm(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

fn skip_ppm_whitespace(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn read_ppm_number(bytes: &[u8], pos: usize) -> Result<(usize, usize)> {
    let start = skip_ppm_whitespace(bytes, pos);
    let mut end = start;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        return Err(Error::Parse("expected a number in PPM header".into()));
    }
    let text = std::str::from_utf8(&bytes[start..end]).unwrap();
    let value: usize = text
        .parse()
        .map_err(|_| Error::Parse(format!("bad PPM header number {text:?}")))?;
    Ok((value, end))
}

/// Decodes a binary P6 PPM with maxval 255. Comments in the header are
/// tolerated; other magics and maxvals are rejected.
pub fn decode_ppm(bytes: &[u8]) -> Result<RasterImage> {
    if bytes.len() < 2 || &bytes[0..2] != b"P6" {
        return Err(Error::UnsupportedImage("not a binary P6 PPM".into()));
    }
    let (width, pos) = read_ppm_number(bytes, 2)?;
    let (height, pos) = read_ppm_number(bytes, pos)?;
    let (maxval, pos) = read_ppm_number(bytes, pos)?;
    if maxval != 255 {
        return Err(Error::UnsupportedImage(format!(
            "PPM maxval must be 255, found {maxval}"
        )));
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Parse("missing whitespace after PPM maxval".into()));
    }
    let data_start = pos + 1;
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::Parse("PPM dimensions overflow".into()))?;
    let data = &bytes[data_start..];
    if data.len() < expected {
        return Err(Error::Parse(format!(
            "PPM payload truncated: expected {expected} bytes, found {}",
            data.len()
        )));
    }
    RasterImage::new(width, height, data[..expected].to_vec())
}

/// One palette line: cluster id, member count, prototype color.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PaletteEntry {
    pub id: usize,
    pub count: usize,
    pub rgb: [u8; 3],
}

/// A palette: the text-file form of a clustering's prototypes or of a
/// codebook. Lines read "id count r g b" with 0..=255 integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Palette {
    pub entries: Vec<PaletteEntry>,
}

fn channel_to_byte(v: f64) -> u8 {
    (v * 255.0).round_ties_even().clamp(0.0, 255.0) as u8
}

impl Palette {
    pub fn from_clustering(clustering: &Clustering) -> Self {
        let entries = clustering
            .clusters
            .iter()
            .enumerate()
            .map(|(id, cluster)| {
                let mut rgb = [0u8; 3];
                for (r, slot) in rgb.iter_mut().enumerate() {
                    *slot = channel_to_byte(*cluster.prototype.get(r).unwrap_or(&0.0));
                }
                PaletteEntry {
                    id,
                    count: cluster.member_indices.len(),
                    rgb,
                }
            })
            .collect();
        Self { entries }
    }

    pub fn from_codebook(codebook: &Codebook, assignment: &[usize]) -> Self {
        let mut counts = vec![0usize; codebook.len()];
        for &j in assignment {
            if j < counts.len() {
                counts[j] += 1;
            }
        }
        let entries = codebook
            .centers
            .iter()
            .enumerate()
            .map(|(id, center)| {
                let mut rgb = [0u8; 3];
                for (r, slot) in rgb.iter_mut().enumerate() {
                    *slot = channel_to_byte(*center.get(r).unwrap_or(&0.0));
                }
                PaletteEntry {
                    id,
                    count: counts[id],
                    rgb,
                }
            })
            .collect();
        Self { entries }
    }

    /// Prototype colors scaled back to [0, 1].
    pub fn centers(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|e| e.rgb.iter().map(|&c| f64::from(c) / 255.0).collect())
            .collect()
    }

    pub fn to_codebook(&self) -> Result<Codebook> {
        if self.entries.is_empty() {
            return Err(Error::InvalidParameter("palette has no entries".into()));
        }
        Ok(Codebook {
            centers: self
                .centers()
                .iter()
                .map(|c| DVector::from_column_slice(c))
                .collect(),
            origin: InitializerKind::LlecPalette,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                e.id, e.count, e.rgb[0], e.rgb[1], e.rgb[2]
            ));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(Error::Parse(format!(
                    "palette line {}: expected 5 fields, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse_usize = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("palette line {}: bad integer {s:?}", lineno + 1)))
            };
            let parse_u8 = |s: &str| {
                s.parse::<u8>()
                    .map_err(|_| Error::Parse(format!("palette line {}: bad channel {s:?}", lineno + 1)))
            };
            entries.push(PaletteEntry {
                id: parse_usize(fields[0])?,
                count: parse_usize(fields[1])?,
                rgb: [parse_u8(fields[2])?, parse_u8(fields[3])?, parse_u8(fields[4])?],
            });
        }
        if entries.is_empty() {
            return Err(Error::Parse("palette file has no entries".into()));
        }
        Ok(Self { entries })
    }
}

/// Quantization quality summary for a pair of images.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityReport {
    /// Number of subspaces or codebook centers that produced the image.
    pub clusters: usize,
    /// Mean squared pixel error in normalized color space (1/p included).
    pub distortion: f64,
    /// p times the distortion: the squared Frobenius norm of the residual.
    pub total_squared_error: f64,
    pub unique_colors_before: usize,
    pub unique_colors_after: usize,
    pub width: usize,
    pub height: usize,
}

impl std::fmt::Display for QualityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "image {}x{}", self.width, self.height)?;
        writeln!(f, "clusters {}", self.clusters)?;
        writeln!(f, "distortion {}", self.distortion)?;
        writeln!(f, "total_squared_error {}", self.total_squared_error)?;
        writeln!(f, "unique_colors_before {}", self.unique_colors_before)?;
        writeln!(f, "unique_colors_after {}", self.unique_colors_after)
    }
}

/// Compares an original and a quantized image of equal dimensions.
pub fn quality_report(
    original: &RasterImage,
    quantized: &RasterImage,
    clusters: usize,
) -> Result<QualityReport> {
    if original.width != quantized.width || original.height != quantized.height {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            original.width, original.height, quantized.width, quantized.height
        )));
    }
    let (a, _) = image_to_cloud(original);
    let (b, _) = image_to_cloud(quantized);
    let distortion = mean_squared_distance(&a, &b)?;
    Ok(QualityReport {
        clusters,
        distortion,
        total_squared_error: distortion * original.num_pixels() as f64,
        unique_colors_before: original.unique_colors(),
        unique_colors_after: quantized.unique_colors(),
        width: original.width,
        height: original.height,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_white_pixel_maps_to_ones() {
        let img = RasterImage::new(1, 1, vec![255, 255, 255]).unwrap();
        let (cloud, layout) = image_to_cloud(&img);
        assert_eq!(cloud.dim(), 3);
        assert_eq!(cloud.num_points(), 1);
        assert_eq!(cloud.point(0), &[1.0, 1.0, 1.0]);
        assert_eq!(layout, ImageLayout { width: 1, height: 1 });
    }

    #[test]
    fn two_pixel_row_major_order() {
        let img = RasterImage::new(2, 1, vec![255, 0, 0, 0, 0, 255]).unwrap();
        let (cloud, _) = image_to_cloud(&img);
        assert_eq!(cloud.point(0), &[1.0, 0.0, 0.0]);
        assert_eq!(cloud.point(1), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn half_gray_rounds_ties_to_even() {
        // 0.5 * 255 = 127.5 rounds to 128
        let cloud = PointCloud::from_points(&[vec![0.5, 0.5, 0.5]]).unwrap();
        let img = cloud_to_image(&cloud, &ImageLayout { width: 1, height: 1 }).unwrap();
        assert_eq!(img.pixel(0, 0), [128, 128, 128]);
    }

    #[test]
    fn out_of_range_values_clamp() {
        let cloud = PointCloud::from_points(&[vec![1.2, -0.3, 0.0]]).unwrap();
        let img = cloud_to_image(&cloud, &ImageLayout { width: 1, height: 1 }).unwrap();
        assert_eq!(img.pixel(0, 0), [255, 0, 0]);
    }

    #[test]
    fn layout_mismatch_is_rejected() {
        let cloud = PointCloud::from_points(&[vec![0.0, 0.0, 0.0]]).unwrap();
        assert!(cloud_to_image(&cloud, &ImageLayout { width: 2, height: 1 }).is_err());
    }

    #[test]
    fn ppm_decode_tolerates_comments() {
        let bytes = b"P6\n# a comment\n2 1\n# another\n255\n\x01\x02\x03\x04\x05\x06";
        let img = decode_ppm(bytes).unwrap();
        assert_eq!(img.width(), 2);
        assert_eq!(img.height(), 1);
        assert_eq!(img.pixel(1, 0), [4, 5, 6]);
    }

    #[test]
    fn ppm_rejects_wrong_magic_and_maxval() {
        assert!(decode_ppm(b"P5\n1 1\n255\n\x00").is_err());
        assert!(decode_ppm(b"P6\n1 1\n65535\n\x00\x00\x00").is_err());
        assert!(decode_ppm(b"P6\n2 2\n255\n\x00\x00\x00").is_err());
    }

    #[test]
    fn quality_report_identical_images() {
        let img = RasterImage::new(2, 2, vec![10; 12]).unwrap();
        let report = quality_report(&img, &img, 1).unwrap();
        assert_eq!(report.distortion, 0.0);
        assert_eq!(report.unique_colors_before, report.unique_colors_after);
    }

    #[test]
    fn quality_report_black_white_to_gray() {
        // two pixels (0,0,0) and (1,1,1) quantized to (0.5, 0.5, 0.5):
        // each residual is 3 * 0.25, so the mean is 0.75
        let original = RasterImage::new(2, 1, vec![0, 0, 0, 255, 255, 255]).unwrap();
        let gray = RasterImage::new(2, 1, vec![128; 6]).unwrap();
        let report = quality_report(&original, &gray, 1).unwrap();
        let g = 128.0 / 255.0;
        let expected = (3.0 * g * g + 3.0 * (1.0 - g) * (1.0 - g)) / 2.0;
        assert!((report.distortion - expected).abs() < 1e-15);
        assert!((report.distortion - 0.75).abs() < 0.01);
        assert!(
            (report.total_squared_error - 2.0 * report.distortion).abs() < 1e-15
        );
    }

    #[test]
    fn palette_round_trip() {
        let palette = Palette {
            entries: vec![
                PaletteEntry { id: 0, count: 10, rgb: [255, 0, 17] },
                PaletteEntry { id: 1, count: 3, rgb: [0, 128, 64] },
            ],
        };
        let text = palette.to_text();
        assert_eq!(Palette::parse(&text).unwrap(), palette);
        let book = palette.to_codebook().unwrap();
        assert_eq!(book.len(), 2);
        assert!((book.centers[0][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn palette_parse_rejects_bad_lines() {
        assert!(Palette::parse("0 1 2 3\n").is_err());
        assert!(Palette::parse("0 1 256 0 0\n").is_err());
        assert!(Palette::parse("").is_err());
    }

    proptest! {
        #[test]
        fn image_cloud_round_trip(
            w in 1usize..6,
            h in 1usize..6,
            seed in 0u64..100,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let pixels: Vec<u8> = (0..w * h * 3).map(|_| rng.random()).collect();
            let img = RasterImage::new(w, h, pixels).unwrap();
            let (cloud, layout) = image_to_cloud(&img);
            let back = cloud_to_image(&cloud, &layout).unwrap();
            prop_assert_eq!(&img, &back);

            let encoded = encode_ppm(&img);
            let decoded = decode_ppm(&encoded).unwrap();
            prop_assert_eq!(&img, &decoded);
        }
    }
}
